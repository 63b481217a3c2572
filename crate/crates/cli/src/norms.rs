use std::path::PathBuf;
use std::sync::Arc;

use nl4s::experiments::Profile;
use nl4s::io::{read_field, write_norms_csv, NormRow};
use nl4s::spectral::{lq_norm, sobolev_norm, weighted_norm, Field, Grid, SobolevSpec, WeightedSpec};
use nl4s::{Error, Result};

#[derive(clap::Args)]
pub struct Args {
    /// Field file (binary sidecar, or `.json`).
    #[arg(long, conflicts_with = "profile")]
    field: Option<PathBuf>,
    /// Build the field from a profile instead, e.g. `gaussian` or `moment:m=2`.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long = "L", default_value_t = 16.0)]
    extent: f64,
    #[arg(long = "N", default_value_t = 256)]
    points: usize,
    /// Inhomogeneous Sobolev exponents.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Vec<f64>,
    /// Homogeneous Sobolev exponents.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    homogeneous: Vec<f64>,
    /// Weighted `H^{k,k}` orders.
    #[arg(long, value_delimiter = ',')]
    weighted: Vec<i64>,
    /// Lebesgue exponents.
    #[arg(long, value_delimiter = ',')]
    lq: Vec<f64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(a: &Args) -> Result<Field> {
    match (&a.field, &a.profile) {
        (Some(p), _) => read_field(p),
        (None, Some(prof)) => {
            let g = Arc::new(Grid::new(a.d, a.extent, a.points)?);
            prof.parse::<Profile>()?.build(&g)
        }
        (None, None) => Err(Error::Config("norms needs --field or --profile".into())),
    }
}

pub fn run(a: Args) -> Result<u8> {
    let f = load(&a)?;
    let mut rows = Vec::new();
    let mut push = |kind: &str, exponent: f64, homogeneous: bool, value: f64| {
        rows.push(NormRow { kind: kind.into(), exponent, homogeneous, value });
    };
    for &g in &a.gamma {
        push("sobolev", g, false, sobolev_norm(&f, SobolevSpec::inhomogeneous(g))?);
    }
    for &g in &a.homogeneous {
        push("sobolev", g, true, sobolev_norm(&f, SobolevSpec::homogeneous(g))?);
    }
    for &k in &a.weighted {
        push("weighted", k as f64, false, weighted_norm(&f, WeightedSpec { k })?);
    }
    for &q in &a.lq {
        push("lebesgue", q, false, lq_norm(&f, q)?);
    }
    if a.gamma.is_empty() && a.homogeneous.is_empty() && a.weighted.is_empty() && a.lq.is_empty() {
        push("sobolev", 0.0, false, sobolev_norm(&f, SobolevSpec::inhomogeneous(0.0))?);
    }
    match &a.out {
        Some(p) => write_norms_csv(std::fs::File::create(p)?, &rows)?,
        None => write_norms_csv(std::io::stdout().lock(), &rows)?,
    }
    Ok(0)
}
