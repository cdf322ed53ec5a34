//! Report files. JSON is authoritative; CSV is a flat copy for plotting.
//!
//! Column orders are fixed:
//! - run / bound-only: the fields of `ReportRow`
//! - convergence: `cells_per_width, h_eta, unknowns, discrete_threshold,
//!   ground, bound_states`, then one `riesz_mean_sigma_<σ>` per σ; a last
//!   row `limit` holds the extrapolated values
//! - asymptotics: the fields of `WeakRow` or `StrongRow`

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use waveguide_core::scenario::{AsymptoticsTable, ConvergenceTable};
use waveguide_core::ScenarioOutcome;

pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Artifacts { dir: dir.to_path_buf() })
    }

    fn create(&self, name: &str, ext: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self.dir.join(format!("{name}.{ext}"));
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok((path, BufWriter::new(f)))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let (path, mut w) = self.create(name, "report.json")?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }

    fn csv_rows<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf> {
        let (path, w) = self.create(name, "table.csv")?;
        let mut out = csv::Writer::from_writer(w);
        for r in rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(path)
    }

    pub fn outcome(&self, out: &ScenarioOutcome) -> Result<Vec<PathBuf>> {
        Ok(vec![self.json(&out.name, out)?, self.csv_rows(&out.name, &out.rows())?])
    }

    pub fn convergence(&self, name: &str, t: &ConvergenceTable) -> Result<Vec<PathBuf>> {
        let json = self.json(name, t)?;
        let (path, w) = self.create(name, "table.csv")?;
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = ["cells_per_width", "h_eta", "unknowns", "discrete_threshold", "ground", "bound_states"]
            .map(String::from)
            .to_vec();
        header.extend(t.riesz_means.iter().map(|(s, _)| format!("riesz_mean_sigma_{s}")));
        out.write_record(&header)?;
        for l in &t.levels {
            let mut rec = vec![
                l.cells_per_width.to_string(),
                l.h_eta.to_string(),
                l.unknowns.to_string(),
                l.discrete_threshold.to_string(),
                l.ground.to_string(),
                l.bound_states.len().to_string(),
            ];
            rec.extend(l.riesz_means.iter().map(|(_, v)| v.to_string()));
            out.write_record(&rec)?;
        }
        let mut rec = vec![
            "limit".to_string(),
            "0".to_string(),
            String::new(),
            t.threshold.limit.to_string(),
            t.ground.limit.to_string(),
            String::new(),
        ];
        rec.extend(t.riesz_means.iter().map(|(_, r)| r.limit.to_string()));
        out.write_record(&rec)?;
        out.flush()?;
        Ok(vec![json, path])
    }

    pub fn asymptotics(&self, name: &str, t: &AsymptoticsTable) -> Result<Vec<PathBuf>> {
        let json = self.json(name, t)?;
        let csv = match t {
            AsymptoticsTable::Weak { rows, .. } => self.csv_rows(name, rows)?,
            AsymptoticsTable::Strong { rows, .. } => self.csv_rows(name, rows)?,
        };
        Ok(vec![json, csv])
    }

    pub fn matrix(&self, name: &str, write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<PathBuf> {
        let (path, mut w) = self.create(name, "matrix.coo")?;
        write(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
        Ok(path)
    }
}
