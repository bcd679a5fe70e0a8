//! Run directories: `plan.json`, `config.json`, one `.spf1` per snapshot and
//! `series.csv` with per-path norms.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use noise_planner::PlanFile;
use serde::Serialize;
use spectral_core::io::write_spf1;
use spectral_core::{FieldPath, Real, SpectralGrid};

use crate::config::SystemConfig;
use crate::SolverError;

#[derive(Serialize)]
struct SeriesRow<'a> {
    time: f64,
    path: &'a str,
    l2: f64,
    sup: f64,
    dead: u8,
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), SolverError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes every artifact for the named paths into `dir`, creating it.
/// Dead nodes have no snapshot and report `NaN` norms.
pub fn write_run_artifacts<T: Real>(
    dir: &Path,
    cfg: &SystemConfig,
    paths: &[(String, &FieldPath<T>)],
) -> Result<(), SolverError> {
    fs::create_dir_all(dir)?;
    write_json(
        &dir.join("plan.json"),
        &PlanFile::new(&cfg.plan, cfg.cutoff),
    )?;
    write_json(&dir.join("config.json"), cfg)?;

    let grid = SpectralGrid::<T>::new(cfg.cutoff);
    let mut series = csv::Writer::from_path(dir.join("series.csv"))?;
    for (name, path) in paths {
        for (node, (t, state)) in path.times().iter().zip(path.states()).enumerate() {
            let row = match state.field() {
                Some(f) => {
                    let mut w =
                        BufWriter::new(File::create(dir.join(format!("{name}_{node:05}.spf1")))?);
                    write_spf1(&mut w, f)?;
                    w.flush()?;
                    SeriesRow {
                        time: t.as_f64(),
                        path: name,
                        l2: f.l2_norm().as_f64(),
                        sup: grid.sup_norm(f).as_f64(),
                        dead: 0,
                    }
                }
                None => SeriesRow {
                    time: t.as_f64(),
                    path: name,
                    l2: f64::NAN,
                    sup: f64::NAN,
                    dead: 1,
                },
            };
            series.serialize(row)?;
        }
    }
    series.flush()?;
    Ok(())
}
