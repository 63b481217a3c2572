use std::io::Write;
use std::path::PathBuf;

use nl4s::regimes::{
    classify, critical_exponent, working_exponents, Real, RegimeQuery, SmallData,
};
use nl4s::{Error, Result};
use serde_json::{json, Value};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<i8>,
    #[arg(long)]
    beta: Option<String>,
    /// Comma-separated smallness flags: l2, h2, critical.
    #[arg(long)]
    small_data: Option<String>,
    /// CSV with header `d,nu,gamma,mu` and optional `beta`, `small_data` columns.
    #[arg(long, conflicts_with_all = ["d", "nu", "gamma", "mu", "beta", "small_data"])]
    batch: Option<PathBuf>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_small(s: &str) -> Result<SmallData> {
    let mut small = SmallData::default();
    for flag in s.split([',', ';', ' ']).map(str::trim).filter(|f| !f.is_empty()) {
        match flag {
            "l2" => small.l2 = true,
            "h2" => small.h2 = true,
            "critical" => small.critical = true,
            other => return Err(Error::Config(format!("unknown smallness flag '{other}'"))),
        }
    }
    Ok(small)
}

fn build_query(d: u32, nu: &str, gamma: &str, mu: i8, beta: Option<&str>, small: Option<&str>) -> Result<RegimeQuery> {
    let mut q = RegimeQuery::new(d, Real::parse(nu)?, Real::parse(gamma)?, mu);
    if let Some(b) = beta.filter(|b| !b.trim().is_empty()) {
        q = q.with_beta(Real::parse(b)?);
    }
    if let Some(s) = small {
        q = q.with_small(parse_small(s)?);
    }
    Ok(q)
}

/// `{verdict, theorem_tag, exponents{..}, conditions}` for one query.
pub fn verdict_json(q: &RegimeQuery) -> Result<Value> {
    let v = classify(q)?;
    let gamma_c = critical_exponent(q.d, q.nu);
    let d = Real::int(q.d as i64);
    let theta = Real::int(1) - (q.nu - Real::int(1)) * (d - Real::int(2) * q.gamma) / Real::int(8);
    let (mut p, mut qq, mut m, mut n) = (Value::Null, Value::Null, Value::Null, Value::Null);
    if let Ok(rep) = working_exponents(q) {
        if let Some((a, b)) = rep.pq {
            p = serde_json::to_value(a)?;
            qq = serde_json::to_value(b)?;
        }
        if let Some((mm, nn)) = rep.mn {
            m = serde_json::to_value(mm)?;
            n = serde_json::to_value(nn)?;
        }
    }
    Ok(json!({
        "query": {
            "d": q.d,
            "nu": q.nu,
            "gamma": q.gamma,
            "mu": q.mu,
            "beta": q.beta,
            "small_data": q.small,
        },
        "verdict": v.verdict,
        "theorem_tag": v.theorem_tag,
        "exponents": {"gamma_c": gamma_c, "p": p, "q": qq, "m": m, "n": n, "theta": theta},
        "conditions": v.conditions,
    }))
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn run(a: Args) -> Result<u8> {
    let mut w = output(&a.out)?;
    if let Some(path) = &a.batch {
        return run_batch(path, &mut w);
    }
    let (Some(d), Some(nu), Some(gamma), Some(mu)) = (a.d, a.nu.as_deref(), a.gamma.as_deref(), a.mu) else {
        return Err(Error::Config("classify needs --d, --nu, --gamma and --mu, or --batch".into()));
    };
    let q = build_query(d, nu, gamma, mu, a.beta.as_deref(), a.small_data.as_deref())?;
    let v = verdict_json(&q)?;
    writeln!(w, "{}", serde_json::to_string_pretty(&v)?)?;
    w.flush()?;
    Ok(0)
}

/// One JSON line per row; malformed rows yield `{row, error}` and the batch goes on.
fn run_batch(path: &PathBuf, w: &mut dyn Write) -> Result<u8> {
    let text = std::fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Ok(0);
    }
    let mut rdr = nl4s_csv_reader(&text);
    let headers = rdr.headers().map_err(Error::from)?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (cd, cnu, cg, cmu) = (col("d"), col("nu"), col("gamma"), col("mu"));
    let (cb, cs) = (col("beta"), col("small_data"));
    if cd.is_none() || cnu.is_none() || cg.is_none() || cmu.is_none() {
        return Err(Error::Config("batch header must name d, nu, gamma and mu".into()));
    }
    let mut failed = false;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let result = rec.map_err(Error::from).and_then(|r| {
            let get = |c: Option<usize>| c.and_then(|c| r.get(c)).map(str::trim);
            let d: u32 = get(cd).unwrap_or("").parse().map_err(|_| Error::Config("bad d".into()))?;
            let mu: i8 = get(cmu).unwrap_or("").parse().map_err(|_| Error::Config("bad mu".into()))?;
            let q = build_query(d, get(cnu).unwrap_or(""), get(cg).unwrap_or(""), mu, get(cb), get(cs))?;
            verdict_json(&q)
        });
        let line = match result {
            Ok(mut v) => {
                v["row"] = json!(row);
                v
            }
            Err(e) => {
                failed = true;
                json!({"row": row, "error": e.to_string()})
            }
        };
        writeln!(w, "{}", serde_json::to_string(&line)?)?;
    }
    w.flush()?;
    Ok(if failed { crate::EXIT_CONFIG } else { 0 })
}

fn nl4s_csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}
