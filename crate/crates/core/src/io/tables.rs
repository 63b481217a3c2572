use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::ExperimentRecord;

/// Appends one JSON document per line.
pub struct JsonlWriter<W: Write> {
    inner: W,
}

impl JsonlWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self::new(BufWriter::new(File::create(path)?)))
    }
}

impl<W: Write> JsonlWriter<W> {
    pub fn new(inner: W) -> Self {
        Self { inner }
    }

    pub fn write<T: Serialize>(&mut self, item: &T) -> Result<()> {
        serde_json::to_writer(&mut self.inner, item)?;
        self.inner.write_all(b"\n")?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// One row per record: provenance, scalars, fitted slopes and check flags.
pub fn write_records_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let scalars: BTreeSet<&str> = records.iter().flat_map(|r| r.scalars.keys().map(String::as_str)).collect();
    let fits: BTreeSet<&str> = records.iter().flat_map(|r| r.fits.keys().map(String::as_str)).collect();
    let mut checks: Vec<&str> = Vec::new();
    for r in records {
        for c in &r.checks {
            if !checks.contains(&c.name.as_str()) {
                checks.push(&c.name);
            }
        }
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["study".to_string(), "config_hash".into(), "seed".into(), "dt".into(), "passed".into()];
    header.extend(scalars.iter().map(|s| s.to_string()));
    for f in &fits {
        header.push(format!("{f}.slope"));
        header.push(format!("{f}.r2"));
    }
    header.extend(checks.iter().map(|c| format!("check.{c}")));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.study.clone(),
            r.provenance.config_hash.clone(),
            r.provenance.seed.to_string(),
            r.provenance.dt.map(fmt_f64).unwrap_or_default(),
            r.passed.to_string(),
        ];
        row.extend(scalars.iter().map(|s| r.scalars.get(*s).map(|v| fmt_f64(*v)).unwrap_or_default()));
        for f in &fits {
            match r.fits.get(*f) {
                Some(fit) => {
                    row.push(fmt_f64(fit.slope));
                    row.push(fmt_f64(fit.r2));
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        row.extend(
            checks
                .iter()
                .map(|c| r.check_named(c).map(|k| k.passed.to_string()).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format slope-fit data: `series, x, y, fit` with `x`, `y` in original units.
pub fn write_plot_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["config_hash", "series", "x", "y", "fit"])?;
    for r in records {
        for (name, fit) in &r.fits {
            for &(lx, ly) in &fit.points {
                let x = lx.exp();
                w.write_record([
                    r.provenance.config_hash.as_str(),
                    name,
                    &fmt_f64(x),
                    &fmt_f64(ly.exp()),
                    &fmt_f64(fit.predict(x)),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub kind: String,
    pub exponent: f64,
    pub homogeneous: bool,
    pub value: f64,
}

pub fn write_norms_csv<W: Write>(out: W, rows: &[NormRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
