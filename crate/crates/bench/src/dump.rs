//! Plain-text state dumps, used for golden-file regression tests.
//!
//! A dump is a sequence of lines:
//!
//! ```text
//! rrccm-state 1
//! kind dfp|gsc|auto
//! matrix <name> <rows> <cols>      then <rows> lines of <cols> "re im" pairs
//! vector <name> <len>              then <len> lines "re im"
//! reals <name> <len>               then one line of <len> numbers
//! tracker <name> <dim> <δ> <α>     then <dim> matrix lines, as for matrix
//! absent <name>                    an optional entry that is not there
//! count <name> <value>
//! end
//! ```
//!
//! Numbers use the shortest representation that reads back to the same
//! `f64`, so dump → parse → dump is the identity. Entries appear in a fixed
//! order for each kind and the parser checks names and order.

use std::fmt::Write as _;

use rrccm_core::dfp::DfpState;
use rrccm_core::gsc::GscState;
use rrccm_core::linalg::InverseTracker;
use rrccm_core::rank::RankAdaptState;
use rrccm_core::{CMatrix, CVector, C64};

use crate::error::{Error, Result};

const MAGIC: &str = "rrccm-state 1";

/// A processor state that can be written as a dump.
#[derive(Debug, Clone, PartialEq)]
pub enum SavedState {
    Dfp(DfpState),
    Gsc(GscState),
    Auto(RankAdaptState),
}

impl SavedState {
    pub fn to_text(&self) -> String {
        let mut w = Writer::default();
        w.line(MAGIC);
        match self {
            SavedState::Dfp(s) => {
                w.line("kind dfp");
                write_dfp(&mut w, s);
            }
            SavedState::Gsc(s) => {
                w.line("kind gsc");
                w.matrix("b", &s.b);
                w.matrix("t", &s.t);
                w.vector("w_bar", &s.w_bar);
                w.tracker("phi_xb", s.phi_xb.as_ref());
                w.tracker("phi_bar_xb", s.phi_bar_xb.as_ref());
                w.vector("a_gamma", &s.a_gamma);
                w.vector("w_full", &s.w_full);
                w.vector("a0", &s.a0);
                w.count("replaced_columns", s.replaced_columns);
            }
            SavedState::Auto(s) => {
                w.line("kind auto");
                write_dfp(&mut w, &s.master);
                w.reals("costs", &s.costs);
                w.count("current_r", s.current_r);
                w.count("r_min", s.r_min);
                w.count("snapshots_seen", s.snapshots_seen);
            }
        }
        w.line("end");
        w.out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Reader::new(text);
        r.expect_line(MAGIC)?;
        let kind = r.keyword("kind")?;
        let state = match kind.as_str() {
            "dfp" => SavedState::Dfp(read_dfp(&mut r)?),
            "gsc" => SavedState::Gsc(GscState {
                b: r.matrix("b")?,
                t: r.matrix("t")?,
                w_bar: r.vector("w_bar")?,
                phi_xb: r.tracker("phi_xb")?,
                phi_bar_xb: r.tracker("phi_bar_xb")?,
                a_gamma: r.vector("a_gamma")?,
                w_full: r.vector("w_full")?,
                a0: r.vector("a0")?,
                replaced_columns: r.count("replaced_columns")?,
            }),
            "auto" => SavedState::Auto(RankAdaptState {
                master: read_dfp(&mut r)?,
                costs: r.reals("costs")?,
                current_r: r.count("current_r")?,
                r_min: r.count("r_min")?,
                snapshots_seen: r.count("snapshots_seen")?,
            }),
            other => return Err(r.error(format!("unknown kind `{other}`"))),
        };
        r.expect_line("end")?;
        r.expect_eof()?;
        Ok(state)
    }
}

fn write_dfp(w: &mut Writer, s: &DfpState) {
    w.matrix("t", &s.t);
    w.vector("w_bar", &s.w_bar);
    w.tracker("phi", s.phi.as_ref());
    w.tracker("phi_bar", s.phi_bar.as_ref());
    w.vector("p_hat", &s.p_hat);
    w.vector("p_bar_hat", &s.p_bar_hat);
    w.vector("a0", &s.a0);
    w.count("replaced_columns", s.replaced_columns);
}

fn read_dfp(r: &mut Reader<'_>) -> Result<DfpState> {
    Ok(DfpState {
        t: r.matrix("t")?,
        w_bar: r.vector("w_bar")?,
        phi: r.tracker("phi")?,
        phi_bar: r.tracker("phi_bar")?,
        p_hat: r.vector("p_hat")?,
        p_bar_hat: r.vector("p_bar_hat")?,
        a0: r.vector("a0")?,
        replaced_columns: r.count("replaced_columns")?,
    })
}

#[derive(Default)]
struct Writer {
    out: String,
}

impl Writer {
    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn rows(&mut self, m: &CMatrix) {
        for row in m.row_iter() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:e} {:e}", z.re, z.im)).collect();
            self.line(&cells.join(" "));
        }
    }

    fn matrix(&mut self, name: &str, m: &CMatrix) {
        let _ = writeln!(self.out, "matrix {name} {} {}", m.nrows(), m.ncols());
        self.rows(m);
    }

    fn vector(&mut self, name: &str, v: &CVector) {
        let _ = writeln!(self.out, "vector {name} {}", v.len());
        for z in v.iter() {
            let _ = writeln!(self.out, "{:e} {:e}", z.re, z.im);
        }
    }

    fn reals(&mut self, name: &str, v: &[f64]) {
        let _ = writeln!(self.out, "reals {name} {}", v.len());
        let cells: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
        self.line(&cells.join(" "));
    }

    fn tracker(&mut self, name: &str, t: Option<&InverseTracker>) {
        match t {
            Some(t) => {
                let _ = writeln!(
                    self.out,
                    "tracker {name} {} {:e} {:e}",
                    t.dim(),
                    t.loading(),
                    t.forgetting()
                );
                self.rows(t.phi());
            }
            None => {
                let _ = writeln!(self.out, "absent {name}");
            }
        }
    }

    fn count(&mut self, name: &str, n: usize) {
        let _ = writeln!(self.out, "count {name} {n}");
    }
}

struct Reader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line_no: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate().peekable(),
            line_no: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line_no,
            message: message.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        match self.lines.next() {
            Some((i, line)) => {
                self.line_no = i + 1;
                Ok(line.trim_end_matches('\r'))
            }
            None => Err(self.error("unexpected end of dump")),
        }
    }

    fn expect_line(&mut self, expected: &str) -> Result<()> {
        let line = self.next_line()?;
        if line.trim() != expected {
            return Err(self.error(format!("expected `{expected}`, found `{line}`")));
        }
        Ok(())
    }

    fn expect_eof(&mut self) -> Result<()> {
        while let Some((i, line)) = self.lines.next() {
            if !line.trim().is_empty() {
                self.line_no = i + 1;
                return Err(self.error("trailing content after `end`"));
            }
        }
        Ok(())
    }

    /// Reads `<tag> <name> args…` and returns the arguments.
    fn header(&mut self, tag: &str, name: &str) -> Result<Vec<&'a str>> {
        let line = self.next_line()?;
        let mut words = line.split_whitespace();
        match (words.next(), words.next()) {
            (Some(t), Some(n)) if t == tag && n == name => Ok(words.collect()),
            _ => Err(self.error(format!("expected `{tag} {name} …`, found `{line}`"))),
        }
    }

    fn keyword(&mut self, tag: &str) -> Result<String> {
        let line = self.next_line()?;
        let mut words = line.split_whitespace();
        match (words.next(), words.next(), words.next()) {
            (Some(t), Some(v), None) if t == tag => Ok(v.to_string()),
            _ => Err(self.error(format!("expected `{tag} <value>`, found `{line}`"))),
        }
    }

    fn number<T: std::str::FromStr>(&self, word: &str) -> Result<T> {
        word.parse().map_err(|_| self.error(format!("bad number `{word}`")))
    }

    fn dims<const N: usize>(&self, args: &[&str]) -> Result<[usize; N]> {
        if args.len() < N {
            return Err(self.error("missing dimensions"));
        }
        let mut out = [0; N];
        for (slot, word) in out.iter_mut().zip(args) {
            *slot = self.number(word)?;
        }
        Ok(out)
    }

    fn complex_row(&mut self, cols: usize) -> Result<Vec<C64>> {
        let line = self.next_line()?;
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 2 * cols {
            return Err(self.error(format!("expected {} numbers, found {}", 2 * cols, words.len())));
        }
        words
            .chunks(2)
            .map(|p| Ok(C64::new(self.number(p[0])?, self.number(p[1])?)))
            .collect()
    }

    fn rows(&mut self, rows: usize, cols: usize) -> Result<CMatrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.complex_row(cols)?);
        }
        Ok(CMatrix::from_row_slice(rows, cols, &data))
    }

    fn matrix(&mut self, name: &str) -> Result<CMatrix> {
        let args = self.header("matrix", name)?;
        let [rows, cols] = self.dims(&args)?;
        self.rows(rows, cols)
    }

    fn vector(&mut self, name: &str) -> Result<CVector> {
        let args = self.header("vector", name)?;
        let [len] = self.dims(&args)?;
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.extend(self.complex_row(1)?);
        }
        Ok(CVector::from_vec(data))
    }

    fn reals(&mut self, name: &str) -> Result<Vec<f64>> {
        let args = self.header("reals", name)?;
        let [len] = self.dims(&args)?;
        let line = self.next_line()?;
        let values = line
            .split_whitespace()
            .map(|w| self.number(w))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != len {
            return Err(self.error(format!("expected {len} numbers, found {}", values.len())));
        }
        Ok(values)
    }

    fn tracker(&mut self, name: &str) -> Result<Option<InverseTracker>> {
        let line = self
            .lines
            .peek()
            .map(|(_, l)| *l)
            .ok_or_else(|| self.error("unexpected end of dump"))?;
        if line.split_whitespace().next() == Some("absent") {
            let args = self.header("absent", name)?;
            if !args.is_empty() {
                return Err(self.error("`absent` takes no arguments"));
            }
            return Ok(None);
        }
        let args = self.header("tracker", name)?;
        if args.len() != 3 {
            return Err(self.error("expected `tracker <name> <dim> <loading> <forgetting>`"));
        }
        let dim: usize = self.number(args[0])?;
        let loading: f64 = self.number(args[1])?;
        let forgetting: f64 = self.number(args[2])?;
        let phi = self.rows(dim, dim)?;
        InverseTracker::from_parts(phi, loading, forgetting)
            .map(Some)
            .map_err(|e| self.error(e.to_string()))
    }

    fn count(&mut self, name: &str) -> Result<usize> {
        let args = self.header("count", name)?;
        match args.as_slice() {
            [v] => self.number(v),
            _ => Err(self.error("expected a single count")),
        }
    }
}
