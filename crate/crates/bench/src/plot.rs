//! Generated plotting scripts. The harness itself draws nothing; it writes a
//! short matplotlib script next to each CSV.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// SINR against snapshot index, one curve per algorithm.
    Convergence,
    /// Final SINR against rank, one curve per algorithm.
    RankSweep,
}

/// `metrics.csv` → `metrics.plot.py`.
pub fn script_path(csv: &Path) -> PathBuf {
    csv.with_extension("plot.py")
}

pub fn plot_script(csv_name: &str, kind: PlotKind, bound_db: Option<f64>) -> String {
    let (x, xlabel) = match kind {
        PlotKind::Convergence => ("snapshot", "snapshots"),
        PlotKind::RankSweep => ("rank", "rank r"),
    };
    let marker = match kind {
        PlotKind::Convergence => "",
        PlotKind::RankSweep => ", marker=\"o\"",
    };
    let bound = bound_db
        .filter(|b| b.is_finite())
        .map(|b| format!("ax.axhline({b:?}, color=\"k\", linestyle=\"--\", label=\"MVDR bound\")\n"))
        .unwrap_or_default();
    format!(
        r#"import csv
import os
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, {csv_name:?})
curves = defaultdict(lambda: ([], []))
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        xs, ys = curves[row["algorithm"]]
        xs.append(int(row["{x}"]))
        ys.append(float(row["sinr_db"]))

fig, ax = plt.subplots()
for name, (xs, ys) in curves.items():
    ax.plot(xs, ys, label=name{marker})
{bound}ax.set_xlabel("{xlabel}")
ax.set_ylabel("SINR (dB)")
ax.grid(True)
ax.legend()
out = os.path.splitext(path)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
"#
    )
}

/// Writes the plotting script for `csv` next to it and returns its path.
pub fn write_plot_script(csv: &Path, kind: PlotKind, bound_db: Option<f64>) -> Result<PathBuf> {
    let name = csv
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::Config(format!("{}: not a file name", csv.display())))?;
    let path = script_path(csv);
    std::fs::write(&path, plot_script(name, kind, bound_db)).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
