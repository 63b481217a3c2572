use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use nl4s::dynamics::{evolve_with, EquationParams, Monitor, Snapshot, StepControl};
use nl4s::experiments::{config_hash, Profile};
use nl4s::io::{read_field, write_field_binary, JsonlWriter};
use nl4s::spectral::{Field, Grid};
use nl4s::{Error, Result};
use serde_json::json;

#[derive(clap::Args, serde::Serialize)]
pub struct Args {
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    disp: f64,
    #[arg(long = "L", default_value_t = 16.0)]
    extent: f64,
    #[arg(long = "N", default_value_t = 256)]
    points: usize,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    /// Initial profile, e.g. `gaussian:amp=2,width=1`.
    #[arg(long, default_value = "gaussian")]
    profile: String,
    /// Start from a field file instead of a profile.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Start from a seeded random field with modes `|k| <= band`.
    #[arg(long, conflicts_with = "field")]
    random_band: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Watch the inhomogeneous Sobolev norm with this exponent for blowup.
    #[arg(long, allow_hyphen_values = true)]
    monitor_gamma: Option<f64>,
    #[arg(long, requires = "monitor_gamma")]
    blowup_factor: Option<f64>,
    /// Enforce the 2/3-rule aliasing guard.
    #[arg(long)]
    guard: bool,
    /// Drop the power nonlinearity (test hook).
    #[arg(long)]
    no_nonlinearity: bool,
    /// Skip binary snapshots; the trajectory stream is still written.
    #[arg(long)]
    no_snapshots: bool,
    #[arg(long, default_value = "nl4s-run")]
    out: PathBuf,
}

fn initial(a: &Args) -> Result<Field> {
    if let Some(p) = &a.field {
        return Ok(read_field(p)?.into_physical());
    }
    let g = Arc::new(Grid::new(a.d, a.extent, a.points)?);
    match a.random_band {
        Some(band) => Ok(Field::random_band_limited(g, a.seed, band)),
        None => a.profile.parse::<Profile>()?.build(&g),
    }
}

pub fn run(a: Args) -> Result<u8> {
    let mut p = EquationParams::new(a.d, a.nu, a.mu, a.disp).map_err(|e| Error::Config(e.to_string()))?;
    p.nonlinear = !a.no_nonlinearity;
    let mut ctrl = StepControl::new(a.dt, a.t_end);
    ctrl.record_every = a.record_every;
    ctrl.guard = a.guard;
    if let Some(g) = a.monitor_gamma {
        let mut m = Monitor::new(g);
        if let Some(f) = a.blowup_factor {
            m.factor = f;
        }
        ctrl.monitor = Some(m);
    }
    ctrl.validate().map_err(|e| Error::Config(e.to_string()))?;
    let f0 = initial(&a)?;

    fs::create_dir_all(&a.out)?;
    let snap_dir = a.out.join("snapshots");
    if !a.no_snapshots {
        fs::create_dir_all(&snap_dir)?;
    }
    let mut args_json = serde_json::to_value(&a)?;
    if let Some(m) = args_json.as_object_mut() {
        m.remove("out");
    }
    let hash = config_hash("simulate", &args_json)?;
    let mut stream = JsonlWriter::create(&a.out.join("trajectory.jsonl"))?;
    stream.write(&json!({
        "kind": "header",
        "config_hash": hash,
        "seed": a.seed,
        "params": p,
        "control": ctrl,
        "grid": f0.grid().spec(),
        "args": args_json,
    }))?;

    let mut observer = |s: &Snapshot| -> Result<()> {
        let snapshot = if a.no_snapshots {
            None
        } else {
            let name = format!("snap_{:08}.bin", s.step);
            write_field_binary(&snap_dir.join(&name), &s.field)?;
            Some(format!("snapshots/{name}"))
        };
        stream.write(&json!({
            "kind": "record",
            "t": s.t,
            "step": s.step,
            "mass": s.conserved.mass,
            "energy": s.conserved.energy,
            "monitor": s.monitor,
            "snapshot": snapshot,
            "config_hash": hash,
            "seed": a.seed,
        }))
    };
    let outcome = evolve_with(&f0, &ctrl, &p, &mut observer);
    let summary = match &outcome {
        Ok(traj) => json!({
            "kind": "summary",
            "status": if traj.blowup.is_some() { "blowup-suspected" } else { "completed" },
            "t_final": traj.last().t,
            "mass_drift": traj.mass_drift(),
            "energy_drift": traj.energy_drift(),
            "blowup": traj.blowup,
            "config_hash": hash,
            "seed": a.seed,
        }),
        Err(e) => json!({
            "kind": "summary",
            "status": "aborted",
            "error": e.to_string(),
            "config_hash": hash,
            "seed": a.seed,
        }),
    };
    stream.write(&summary)?;
    stream.flush()?;
    fs::write(a.out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;

    match outcome {
        Ok(traj) => {
            println!("{}", serde_json::to_string(&summary)?);
            Ok(if traj.blowup.is_some() { crate::EXIT_BLOWUP } else { 0 })
        }
        Err(Error::Aliasing { fraction, limit, spectrum }) => {
            let mut w = csv::Writer::from_path(a.out.join("spectrum.csv")).map_err(Error::from)?;
            w.write_record(["shell", "mass"]).map_err(Error::from)?;
            for (k, m) in spectrum.iter().enumerate() {
                w.write_record([k.to_string(), format!("{m:e}")]).map_err(Error::from)?;
            }
            w.flush()?;
            Err(Error::Aliasing { fraction, limit, spectrum })
        }
        Err(Error::NonFinite { t, last_good }) => {
            write_field_binary(&a.out.join("last_good.bin"), &last_good)?;
            Err(Error::NonFinite { t, last_good })
        }
        Err(e) => Err(e),
    }
}
