use std::collections::BTreeMap;
use std::path::PathBuf;

use nl4s::experiments::{sweep, ExperimentRecord, PointStatus, RunPlan, Study};
use nl4s::io::{write_plot_csv, write_records_csv, JsonlWriter};
use nl4s::{Error, Result};

#[derive(clap::Args)]
pub struct Args {
    /// One of: small-dispersion, initial-norm-scaling, norm-inflation,
    /// low-frequency, uniform-discontinuity, conservation,
    /// scaling-invariance, scattering-probe.
    study: String,
    /// TOML study config, or a plan with `[base]` and `[axes]` tables.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the default config as TOML and exit.
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// Recorded in every record's config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "nl4s-out")]
    out: PathBuf,
}

pub fn run(a: Args) -> Result<u8> {
    let study: Study = a.study.parse()?;
    if a.print_config {
        print!("{}", study.default_config_toml());
        return Ok(0);
    }
    let mut plan = match &a.config {
        Some(p) => RunPlan::from_config_text(study, &std::fs::read_to_string(p)?)?,
        None => RunPlan::single(study, serde_json::Value::Null)?,
    };
    if let Some(w) = a.workers {
        plan.workers = w;
    }
    if let Some(seed) = a.seed {
        plan.base.insert("seed".into(), seed.into());
    }

    // A single point runs directly so that its error keeps its kind.
    let results = if plan.axes.is_empty() {
        let record = study.run(serde_json::Value::Object(plan.base.clone()))?;
        vec![(BTreeMap::new(), Ok(record))]
    } else {
        sweep(&plan)?
            .into_iter()
            .map(|p| {
                let r = match p.status {
                    PointStatus::Ok => Ok(p.record.expect("ok points carry a record")),
                    PointStatus::Error => Err((p.error.unwrap_or_default(), p.error_kind.unwrap_or_default())),
                };
                (p.overrides, r)
            })
            .collect()
    };

    std::fs::create_dir_all(&a.out)?;
    let mut stream = JsonlWriter::create(&a.out.join(format!("{study}.jsonl")))?;
    let mut records: Vec<ExperimentRecord> = Vec::new();
    let mut worst = 0u8;
    for (i, (overrides, r)) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => {
                stream.write(&serde_json::json!({"index": i, "overrides": overrides, "status": "ok", "record": rec}))?;
                println!("[{i}] {}", rec.summary());
                for c in &rec.checks {
                    println!("    {:<4} {:<40} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
                records.push(rec);
            }
            Err((msg, kind)) => {
                stream.write(&serde_json::json!({"index": i, "overrides": overrides, "status": "error", "error": msg, "error_kind": kind}))?;
                println!("[{i}] ERROR ({kind}) {msg}");
                let code = match kind.as_str() {
                    "numerical" => crate::EXIT_NUMERICAL,
                    "io" => crate::EXIT_IO,
                    _ => crate::EXIT_CONFIG,
                };
                worst = worst.max(code);
            }
        }
    }
    stream.flush()?;
    write_records_csv(&a.out.join(format!("{study}.csv")), &records)?;
    write_plot_csv(&a.out.join(format!("{study}_plot.csv")), &records)?;
    let passed = records.iter().filter(|r| r.passed).count();
    println!("{study}: {passed}/{} points PASS", records.len());
    if worst == 0 && records.is_empty() && !plan.points().is_empty() {
        return Err(Error::Config("no records produced".into()));
    }
    Ok(worst)
}
