//! CSV output of averaged metrics and rank sweeps.
//!
//! Floats are written in their shortest round-trip form, so reading a file
//! back yields bit-identical values. Lines end in `\n`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rrccm_core::trial::AveragedSeries;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const METRICS_HEADER: &str = "snapshot,algorithm,sinr_db,cm_cost,weight_err,selected_rank";
pub const SWEEP_HEADER: &str = "rank,algorithm,sinr_db,cm_cost,weight_err";

/// One `(snapshot, algorithm)` row. Snapshots are numbered from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub snapshot: usize,
    pub algorithm: String,
    pub sinr_db: f64,
    pub cm_cost: f64,
    pub weight_err: f64,
    pub selected_rank: f64,
}

/// Final-snapshot figures of one algorithm at one rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rank: usize,
    pub algorithm: String,
    pub sinr_db: f64,
    pub cm_cost: f64,
    pub weight_err: f64,
}

/// Snapshot-major rows: all algorithms at snapshot 1, then at 2, …
pub fn metrics_rows(series: &[AveragedSeries]) -> Vec<MetricsRow> {
    let n = series.iter().map(|s| s.sinr_db.len()).max().unwrap_or(0);
    let mut rows = Vec::with_capacity(n * series.len());
    for i in 0..n {
        for s in series.iter().filter(|s| i < s.sinr_db.len()) {
            rows.push(MetricsRow {
                snapshot: i + 1,
                algorithm: s.name.clone(),
                sinr_db: s.sinr_db[i],
                cm_cost: s.cm_cost[i],
                weight_err: s.weight_err[i],
                selected_rank: s.selected_rank[i],
            });
        }
    }
    rows
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    read_rows(path, METRICS_HEADER)
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>> {
    read_rows(path, SWEEP_HEADER)
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config(format!(
            "{}: refusing to write an empty table",
            path.display()
        )));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::csv(path, e))?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?
        .flush()
        .map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, header: &str) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let found = reader.headers().map_err(|e| Error::csv(path, e))?;
    let found: Vec<&str> = found.iter().collect();
    if found.join(",") != header {
        return Err(Error::Config(format!(
            "{}: unexpected header `{}`, expected `{header}`",
            path.display(),
            found.join(",")
        )));
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::csv(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(name: &str, n: usize) -> AveragedSeries {
        AveragedSeries {
            name: name.into(),
            sinr_db: (0..n).map(|i| 0.1 * i as f64 + 1.0 / 3.0).collect(),
            cm_cost: vec![0.5; n],
            weight_err: vec![1e-17; n],
            selected_rank: vec![4.25; n],
            trials: 3,
            excluded: 0,
        }
    }

    #[test]
    fn two_by_three() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let rows = metrics_rows(&[series("a", 3), series("b", 3)]);
        assert_eq!(rows.len(), 6);
        write_metrics(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert_eq!(text.lines().next().unwrap(), METRICS_HEADER);
        assert!(!text.contains('\r'));
        assert_eq!(read_metrics(&path).unwrap(), rows);
    }

    #[test]
    fn empty_table_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_metrics(&dir.path().join("e.csv"), &[]).is_err());
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = write_metrics(Path::new("/nonexistent/dir/x.csv"), &metrics_rows(&[series("a", 1)])).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.csv"));
    }

    #[test]
    fn header_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_sweep(
            &path,
            &[SweepRow {
                rank: 1,
                algorithm: "x".into(),
                sinr_db: 1.0,
                cm_cost: 2.0,
                weight_err: 3.0,
            }],
        )
        .unwrap();
        assert_eq!(read_sweep(&path).unwrap().len(), 1);
        assert!(read_metrics(&path).is_err());
    }
}
