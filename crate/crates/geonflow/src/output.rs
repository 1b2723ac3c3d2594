//! Comma-separated output. Every file opens with a `# columns:` line and
//! writes floats as `{:.11e}`, so identical runs give identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use geonflow_core::evolution::{RunRecord, Termination};
use geonflow_core::geometry::scalar_curvature;
use geonflow_core::{MetricState, RadialGrid};

pub const SERIES_COLUMNS: &str = "t,s_throat,r_throat,r_min,r_max,h_outer,max_abs_d2s,outer_r_max";

pub fn termination_kind(t: &Termination) -> &'static str {
    match t {
        Termination::Collapsed(_) => "collapsed",
        Termination::ReachedHorizon => "reached-horizon",
        Termination::CurvatureBlowup(_) => "curvature-blowup",
        Termination::StepperFailure(_) => "stepper-failure",
    }
}

pub fn termination_label(t: &Termination) -> String {
    match *t {
        Termination::Collapsed(t) => format!("collapsed {t:.11e}"),
        Termination::ReachedHorizon => "reached-horizon".into(),
        Termination::CurvatureBlowup(t) => format!("curvature-blowup {t:.11e}"),
        Termination::StepperFailure(t) => format!("stepper-failure {t:.11e}"),
    }
}

fn row<W: Write>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        write!(w, "{v:.11e}")?;
    }
    w.write_all(b"\n")
}

pub fn write_series<W: Write>(w: &mut W, run: &RunRecord) -> io::Result<()> {
    writeln!(w, "# columns: {SERIES_COLUMNS}")?;
    for s in &run.samples {
        row(w, &[s.t, s.s_throat, s.r_throat, s.r_min, s.r_max, s.h_outer, s.max_abs_d2s, s.outer_r_max])?;
    }
    writeln!(w, "# termination: {}", termination_label(&run.termination))
}

pub fn write_snapshot<W: Write>(w: &mut W, state: &MetricState, grid: &RadialGrid) -> io::Result<()> {
    writeln!(w, "# columns: r,a,s,scalar_curvature")?;
    let r = scalar_curvature(state, grid);
    for (i, ri) in r.iter().enumerate() {
        row(w, &[grid.r(i), state.a[i], state.s[i], *ri])?;
    }
    writeln!(w, "# time: {:.11e}", state.t)
}

/// `run.csv` → `run.snap0.csv`, `run.snap1.csv`, ...
pub fn snapshot_path(series: &Path, k: usize) -> PathBuf {
    let stem = series.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    series.with_file_name(format!("{stem}.snap{k}.csv"))
}

/// Writes the series to `path` and each snapshot next to it.
pub fn write_run_files(path: &Path, run: &RunRecord) -> io::Result<Vec<PathBuf>> {
    let mut written = vec![path.to_path_buf()];
    let mut w = BufWriter::new(File::create(path)?);
    write_series(&mut w, run)?;
    w.flush()?;
    for (k, snap) in run.snapshots.iter().enumerate() {
        let p = snapshot_path(path, k);
        let mut w = BufWriter::new(File::create(&p)?);
        write_snapshot(&mut w, snap, &run.grid)?;
        w.flush()?;
        written.push(p);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(termination_label(&Termination::ReachedHorizon), "reached-horizon");
        assert_eq!(termination_label(&Termination::Collapsed(0.5)), "collapsed 5.00000000000e-1");
    }

    #[test]
    fn snapshot_names() {
        assert_eq!(snapshot_path(Path::new("out/run.csv"), 2), Path::new("out/run.snap2.csv"));
    }
}
