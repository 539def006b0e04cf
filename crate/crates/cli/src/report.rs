//! `insarfopt report`: side-by-side comparison of saved run reports.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use serde_json::Value;

use crate::{create, create_out_dir, CmdResult};

const CONSTRAINTS: usize = 11;

struct Entry {
    label: String,
    mode: String,
    fingerprint: String,
    coverage: f64,
    b_perp: f64,
    h_amb: f64,
    energy: [f64; 2],
    slacks: Vec<f64>,
}

impl Entry {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let v: Value = serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
        let num = |key: &str| {
            v[key]
                .as_f64()
                .ok_or_else(|| anyhow!("{}: missing number `{key}`", path.display()))
        };
        let text_field = |key: &str| {
            v[key]
                .as_str()
                .map(str::to_owned)
                .ok_or_else(|| anyhow!("{}: missing string `{key}`", path.display()))
        };
        let energy = match v["energy_j"]
            .as_array()
            .map(|a| a.iter().filter_map(Value::as_f64).collect::<Vec<_>>())
        {
            Some(e) if e.len() == 2 => [e[0], e[1]],
            _ => bail!("{}: `energy_j` is not a pair", path.display()),
        };
        let slacks = (1..=CONSTRAINTS)
            .map(|i| v["constraints"][format!("C{i}")]["slack"].as_f64().unwrap_or(f64::NAN))
            .collect();
        Ok(Entry {
            label: path.display().to_string(),
            mode: text_field("mode")?,
            fingerprint: text_field("scenario_fingerprint")?,
            coverage: num("coverage_m2")?,
            b_perp: num("b_perp_m")?,
            h_amb: num("h_amb_m")?,
            energy,
            slacks,
        })
    }

    /// Constraint with the smallest slack.
    fn tightest(&self) -> (usize, f64) {
        self.slacks
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, s)| !s.is_nan())
            .fold(
                (0, f64::INFINITY),
                |best, (i, s)| if s < best.1 { (i, s) } else { best },
            )
    }
}

#[derive(Serialize)]
struct Delta<'a> {
    first: &'a str,
    second: &'a str,
    first_mode: &'a str,
    second_mode: &'a str,
    coverage_delta_m2: f64,
}

pub fn cmd_report(paths: &[PathBuf], out: &Path) -> CmdResult {
    let entries = paths
        .iter()
        .map(|p| Entry::load(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let first = &entries[0];
    if let Some(other) = entries.iter().find(|e| e.fingerprint != first.fingerprint) {
        return Err(anyhow!(
            "scenario mismatch: {} ({}) and {} ({}) come from different scenarios",
            first.label,
            first.fingerprint,
            other.label,
            other.fingerprint
        )
        .into());
    }

    println!(
        "{:<32} {:<11} {:>12} {:>9} {:>8} {:>10} {:>10} {:>14}",
        "report", "mode", "coverage_m2", "b_perp_m", "h_amb_m", "energy1_j", "energy2_j", "tightest"
    );
    for e in &entries {
        let (i, s) = e.tightest();
        println!(
            "{:<32} {:<11} {:>12.2} {:>9.4} {:>8.4} {:>10.3} {:>10.3} {:>14}",
            e.label,
            e.mode,
            e.coverage,
            e.b_perp,
            e.h_amb,
            e.energy[0],
            e.energy[1],
            format!("C{} {:.3e}", i + 1, s)
        );
    }

    create_out_dir(out)?;
    let mut w = csv::Writer::from_writer(create(&out.join("report.csv"))?);
    let mut header: Vec<String> = [
        "report",
        "mode",
        "coverage_m2",
        "b_perp_m",
        "h_amb_m",
        "energy1_j",
        "energy2_j",
    ]
    .map(str::to_owned)
    .to_vec();
    header.extend((1..=CONSTRAINTS).map(|i| format!("C{i}_slack")));
    w.write_record(&header)?;
    for e in &entries {
        let mut rec = vec![e.label.clone(), e.mode.clone()];
        rec.extend([e.coverage, e.b_perp, e.h_amb, e.energy[0], e.energy[1]].map(|x| x.to_string()));
        rec.extend(e.slacks.iter().map(|x| x.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;

    if entries.len() < 2 {
        return Ok(());
    }
    let mut deltas = Vec::new();
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i + 1..] {
            deltas.push(Delta {
                first: &a.label,
                second: &b.label,
                first_mode: &a.mode,
                second_mode: &b.mode,
                coverage_delta_m2: a.coverage - b.coverage,
            });
        }
    }
    println!("\ncoverage deltas");
    for d in &deltas {
        println!("  {} - {}: {:+.2} m²", d.first_mode, d.second_mode, d.coverage_delta_m2);
    }
    let mut w = csv::Writer::from_writer(create(&out.join("deltas.csv"))?);
    for d in &deltas {
        w.serialize(d)?;
    }
    w.flush()?;
    Ok(())
}
