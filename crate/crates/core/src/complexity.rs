//! Complex additions and multiplications per snapshot for the direct-form
//! and sidelobe-canceller algorithm families.

use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    Dfp,
    Gsc,
}

impl Structure {
    pub const ALL: [Structure; 2] = [Structure::Dfp, Structure::Gsc];

    pub fn as_str(&self) -> &'static str {
        match self {
            Structure::Dfp => "dfp",
            Structure::Gsc => "gsc",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dfp" => Ok(Structure::Dfp),
            "gsc" => Ok(Structure::Gsc),
            _ => Err(Error::InvalidConfig("structure must be dfp or gsc")),
        }
    }
}

/// Rows of the complexity tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostedAlgorithm {
    FrCmvSg,
    FrCcmSg,
    FrCmvRls,
    FrCcmRls,
    MswfCmvSg,
    MswfCcmSg,
    MswfCmvRls,
    MswfCcmRls,
    Avf,
    JioCmvSg,
    JioCmvGs,
    JioCcmSg,
    JioCcmGs,
    JioCmvRls,
    JioCmvRgs,
    JioCcmRls,
    JioCcmRgs,
}

impl CostedAlgorithm {
    pub const ALL: [CostedAlgorithm; 17] = [
        CostedAlgorithm::FrCmvSg,
        CostedAlgorithm::FrCcmSg,
        CostedAlgorithm::FrCmvRls,
        CostedAlgorithm::FrCcmRls,
        CostedAlgorithm::MswfCmvSg,
        CostedAlgorithm::MswfCcmSg,
        CostedAlgorithm::MswfCmvRls,
        CostedAlgorithm::MswfCcmRls,
        CostedAlgorithm::Avf,
        CostedAlgorithm::JioCmvSg,
        CostedAlgorithm::JioCmvGs,
        CostedAlgorithm::JioCcmSg,
        CostedAlgorithm::JioCcmGs,
        CostedAlgorithm::JioCmvRls,
        CostedAlgorithm::JioCmvRgs,
        CostedAlgorithm::JioCcmRls,
        CostedAlgorithm::JioCcmRgs,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            CostedAlgorithm::FrCmvSg => "FR-CMV-SG",
            CostedAlgorithm::FrCcmSg => "FR-CCM-SG",
            CostedAlgorithm::FrCmvRls => "FR-CMV-RLS",
            CostedAlgorithm::FrCcmRls => "FR-CCM-RLS",
            CostedAlgorithm::MswfCmvSg => "MSWF-CMV-SG",
            CostedAlgorithm::MswfCcmSg => "MSWF-CCM-SG",
            CostedAlgorithm::MswfCmvRls => "MSWF-CMV-RLS",
            CostedAlgorithm::MswfCcmRls => "MSWF-CCM-RLS",
            CostedAlgorithm::Avf => "AVF",
            CostedAlgorithm::JioCmvSg => "JIO-CMV-SG",
            CostedAlgorithm::JioCmvGs => "JIO-CMV-GS",
            CostedAlgorithm::JioCcmSg => "JIO-CCM-SG",
            CostedAlgorithm::JioCcmGs => "JIO-CCM-GS",
            CostedAlgorithm::JioCmvRls => "JIO-CMV-RLS",
            CostedAlgorithm::JioCmvRgs => "JIO-CMV-RGS",
            CostedAlgorithm::JioCcmRls => "JIO-CCM-RLS",
            CostedAlgorithm::JioCcmRgs => "JIO-CCM-RGS",
        }
    }
}

impl fmt::Display for CostedAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for CostedAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CostedAlgorithm::ALL
            .into_iter()
            .find(|a| a.id().eq_ignore_ascii_case(s))
            .ok_or(Error::UnknownAlgorithm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityEntry {
    pub algorithm: CostedAlgorithm,
    pub structure: Structure,
    pub additions: u64,
    pub multiplications: u64,
}

/// Evaluates one table row at `(m, r)`. Full-rank rows ignore `r`.
pub fn complexity_eval(algorithm: CostedAlgorithm, structure: Structure, m: u64, r: u64) -> Result<ComplexityEntry> {
    if m < 2 {
        return Err(Error::InvalidConfig("complexity needs m ≥ 2"));
    }
    if r < 1 || r >= m {
        return Err(Error::InvalidConfig("complexity needs 1 ≤ r < m"));
    }
    let (adds, muls) = match structure {
        Structure::Dfp => dfp_row(algorithm, m as i128, r as i128),
        Structure::Gsc => gsc_row(algorithm, m as i128, r as i128),
    };
    let to_count = |v: i128| u64::try_from(v).map_err(|_| Error::InvalidConfig("operation count out of range"));
    Ok(ComplexityEntry {
        algorithm,
        structure,
        additions: to_count(adds)?,
        multiplications: to_count(muls)?,
    })
}

/// [`complexity_eval`] keyed by row name, e.g. `"JIO-CCM-SG"`.
pub fn complexity_eval_by_id(id: &str, structure: Structure, m: u64, r: u64) -> Result<ComplexityEntry> {
    complexity_eval(id.parse()?, structure, m, r)
}

fn avf(m: i128, r: i128) -> (i128, i128) {
    (
        (4 * r + 5) * m * m + (r - 1) * m - 2 * r - 1,
        (5 * r + 8) * m * m + (3 * r + 2) * m,
    )
}

fn dfp_row(algorithm: CostedAlgorithm, m: i128, r: i128) -> (i128, i128) {
    use CostedAlgorithm::*;
    let m2 = m * m;
    let r2 = r * r;
    match algorithm {
        FrCmvSg => (3 * m - 1, 4 * m + 1),
        FrCcmSg => (3 * m, 4 * m + 3),
        FrCmvRls => (4 * m2 - m - 1, 5 * m2 + 5 * m - 1),
        FrCcmRls => (5 * m2 + 2 * m - 1, 6 * m2 + 6 * m + 3),
        MswfCmvSg => (r * m2 + (r + 1) * m + 2 * r - 2, r * m2 + 2 * r * m + 5 * r + 2),
        MswfCcmSg => (r * m2 + (r + 1) * m + 4 * r - 2, r * m2 + 2 * r * m + 4 * r + 4),
        MswfCmvRls => (
            r * m2 + (r + 1) * m + 4 * r2 - 3 * r - 1,
            (r + 1) * m2 + 2 * r * m + 5 * r2 + 4 * r,
        ),
        MswfCcmRls => (
            r * m2 + (r + 1) * m + 5 * r2 - r,
            (r + 1) * m2 + 2 * r * m + 6 * r2 + 7 * r + 3,
        ),
        Avf => avf(m, r),
        JioCmvSg => (4 * r * m + m + 2 * r - 3, 4 * r * m + m + 7 * r + 3),
        JioCmvGs => (7 * r * m - m - 1, 7 * r * m - 2 * m + 8 * r + 2),
        JioCcmSg => (4 * r * m + m + 2 * r - 2, 4 * r * m + m + 7 * r + 6),
        JioCcmGs => (7 * r * m - m, 7 * r * m - 2 * m + 8 * r + 5),
        JioCmvRls => (
            4 * m2 + (2 * r - 1) * m + 4 * r2 - 4 * r - 1,
            5 * m2 + (3 * r + 3) * m + 6 * r2 + 4 * r,
        ),
        JioCmvRgs => (
            4 * m2 + (5 * r - 3) * m + 4 * r2 - 6 * r + 1,
            5 * m2 + 6 * r * m + 6 * r2 + 5 * r - 1,
        ),
        JioCcmRls => (
            5 * m2 + r * m + 5 * r2 + 3 * r - 1,
            6 * m2 + (2 * r + 6) * m + 5 * r2 + 9 * r + 3,
        ),
        JioCcmRgs => (
            5 * m2 + (4 * r - 2) * m + 5 * r2 + r + 1,
            6 * m2 + (5 * r + 3) * m + 5 * r2 + 10 * r + 2,
        ),
    }
}

fn gsc_row(algorithm: CostedAlgorithm, m: i128, r: i128) -> (i128, i128) {
    use CostedAlgorithm::*;
    let m2 = m * m;
    let r2 = r * r;
    match algorithm {
        FrCmvSg => (m2 + m - 2, m2 + 2 * m - 1),
        FrCcmSg => (m2 + m - 1, m2 + 2 * m + 1),
        FrCmvRls => (4 * m2 - 6 * m + 4, 5 * m2 - 4 * m),
        FrCcmRls => (4 * m2 - 6 * m + 2, 5 * m2 - 3 * m),
        MswfCmvSg => (
            (r + 1) * m2 - 2 * r * m + 2 * r - 1,
            (r + 2) * m2 - (r + 2) * m + 2 * r + 2,
        ),
        MswfCcmSg => ((r + 1) * m2 - 2 * r * m + 2 * r, (r + 2) * m2 - (r + 2) * m + 2 * r + 4),
        MswfCmvRls => (
            (r + 1) * m2 - 2 * r * m + 3 * r2 + r - 1,
            (r + 2) * m2 - (r + 2) * m + 4 * r2 + 4 * r,
        ),
        MswfCcmRls => (
            (r + 1) * m2 - 2 * r * m + 3 * r2 + r - 1,
            (r + 2) * m2 - (r + 1) * m + 4 * r2 + 4 * r + 1,
        ),
        Avf => avf(m, r),
        JioCmvSg => (m2 + 2 * r * m - m - r, m2 + 2 * r * m + r + 2),
        JioCmvGs => (m2 + 5 * r * m - 3 * m - 6 * r + 4, m2 + 5 * r * m - 3 * m - r + 4),
        JioCcmSg => (m2 + 2 * r * m - m - r + 1, m2 + 2 * r * m + r + 4),
        JioCcmGs => (m2 + 5 * r * m - 3 * m - 6 * r + 5, m2 + 5 * r * m - 3 * m - r + 6),
        JioCmvRls => (
            4 * m2 + (2 * r - 8) * m + 5 * r2 - 2 * r + 4,
            5 * m2 + (2 * r - 6) * m + 7 * r2 + 3 * r + 2,
        ),
        JioCmvRgs => (
            4 * m2 + (5 * r - 10) * m + 5 * r2 - 7 * r + 8,
            5 * m2 + (5 * r - 9) * m + 7 * r2 + r + 4,
        ),
        JioCcmRls => (
            4 * m2 + (2 * r - 7) * m + 5 * r2 - 4 * r + 3,
            5 * m2 + (2 * r - 4) * m + 7 * r2 + 2 * r + 1,
        ),
        JioCcmRgs => (
            4 * m2 + (5 * r - 9) * m + 5 * r2 - 9 * r + 7,
            5 * m2 + (5 * r - 7) * m + 7 * r2 + 3,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let e = complexity_eval(CostedAlgorithm::JioCcmSg, Structure::Dfp, 32, 5).unwrap();
        assert_eq!((e.additions, e.multiplications), (680, 713));
        let e = complexity_eval(CostedAlgorithm::FrCcmSg, Structure::Dfp, 32, 5).unwrap();
        assert_eq!(e.additions, 96);
    }

    #[test]
    fn ids_round_trip() {
        for a in CostedAlgorithm::ALL {
            assert_eq!(a.id().parse::<CostedAlgorithm>().unwrap(), a);
        }
        assert_eq!(
            "jio-ccm-rls".parse::<CostedAlgorithm>().unwrap(),
            CostedAlgorithm::JioCcmRls
        );
        assert_eq!("PC-SG".parse::<CostedAlgorithm>(), Err(Error::UnknownAlgorithm));
        assert_eq!(
            complexity_eval_by_id("CS", Structure::Gsc, 32, 5),
            Err(Error::UnknownAlgorithm)
        );
    }

    #[test]
    fn domain() {
        assert!(complexity_eval(CostedAlgorithm::Avf, Structure::Dfp, 1, 1).is_err());
        assert!(complexity_eval(CostedAlgorithm::Avf, Structure::Dfp, 8, 8).is_err());
        assert!(complexity_eval(CostedAlgorithm::Avf, Structure::Dfp, 8, 0).is_err());
    }

    #[test]
    fn avf_row_shared() {
        let d = complexity_eval(CostedAlgorithm::Avf, Structure::Dfp, 40, 6).unwrap();
        let g = complexity_eval(CostedAlgorithm::Avf, Structure::Gsc, 40, 6).unwrap();
        assert_eq!((d.additions, d.multiplications), (g.additions, g.multiplications));
    }
}
