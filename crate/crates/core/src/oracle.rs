//! Exhaustive grid search over `(z1, x2, z2)`.
//!
//! The master ground range follows from its altitude, and powers are always
//! the minimal admissible schedules, since power never improves coverage and
//! only the smallest schedule can make C9/C11 easier. Every grid point is
//! checked against the exact constraint forms.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::comms::check_power_constraints;
use crate::error::{Error, Result};
use crate::geometry::{coverage, master_x_for, Formation, Position};
use crate::metrics::{distinct_radar_constants, evaluate_constraints, evaluate_geometry_with, FeasibilityReport};
use crate::sca::{objective_tilde, schedule_for, Mode};
use crate::scenario::ScenarioConfig;

/// Evenly spaced samples `lo, lo + step, …` up to `hi`, which is always
/// included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        Axis { lo, hi, step }
    }

    pub fn single(v: f64) -> Self {
        Axis {
            lo: v,
            hi: v,
            step: 1.0,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if !(self.step > 0.0) || !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Vec::new();
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        let mut v: Vec<f64> = (0..=n).map(|k| self.lo + k as f64 * self.step).collect();
        if self.hi - v[n] > 1e-9 * self.step {
            v.push(self.hi);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub z1: Axis,
    pub x2: Axis,
    pub z2: Axis,
}

impl GridSpec {
    /// Altitudes over `[z_min, z_max]` and slave ground range over
    /// `[x_t − 120, x_t]`, both at 1 m.
    pub fn validation(s: &ScenarioConfig) -> Self {
        Self::uniform(s, 1.0)
    }

    /// The 5 m grid used to repair infeasible starting points.
    pub fn coarse(s: &ScenarioConfig) -> Self {
        Self::uniform(s, 5.0)
    }

    pub fn uniform(s: &ScenarioConfig, step: f64) -> Self {
        let t = &s.thresholds;
        let x_t = s.mission.target_x;
        GridSpec {
            z1: Axis::new(t.z_min, t.z_max, step),
            x2: Axis::new(x_t - 120.0, x_t, step),
            z2: Axis::new(t.z_min, t.z_max, step),
        }
    }

    pub fn single(z1: f64, x2: f64, z2: f64) -> Self {
        GridSpec {
            z1: Axis::single(z1),
            x2: Axis::single(x2),
            z2: Axis::single(z2),
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, a) in [("z1", &self.z1), ("x2", &self.x2), ("z2", &self.z2)] {
            if !(a.step > 0.0) {
                return Err(Error::InvalidArgument(format!("grid step for {name} must be positive")));
            }
            if a.points().is_empty() {
                return Err(Error::InvalidArgument(format!("grid axis {name} is empty")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleBest {
    pub formation: Formation,
    pub coverage_m2: f64,
    pub objective_tilde: f64,
    pub constraints: FeasibilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub mode: Mode,
    /// `None` when no grid point is feasible.
    pub best: Option<OracleBest>,
    pub evaluated: usize,
    pub feasible: usize,
}

#[derive(Clone, Copy)]
struct Candidate {
    coverage: f64,
    key: (f64, f64, f64),
}

// Larger coverage wins; ties go to the lexicographically smallest (z1, x2, z2).
fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let a_wins = a.coverage > b.coverage
                || (a.coverage == b.coverage && a.key.partial_cmp(&b.key) == Some(std::cmp::Ordering::Less));
            Some(if a_wins { a } else { b })
        }
    }
}

/// Power-side feasibility (C9, C11) of the mode's minimal schedule at `q`.
/// C10 holds with equality by construction.
fn power_ok(q: Position, s: &ScenarioConfig, uav: usize, mode: Mode) -> bool {
    let chk = check_power_constraints(&schedule_for(q, s, uav, mode), s);
    chk.c9 && chk.c11
}

struct Visit<'a> {
    s: &'a ScenarioConfig,
    mode: Mode,
    cs: Vec<f64>,
}

impl Visit<'_> {
    fn formation(&self, z1: f64, x2: f64, z2: f64) -> Formation {
        let x1 = master_x_for(z1, self.s.mission.target_x, self.s.radar.theta_d);
        let x2 = if self.mode.vertical() { x1 } else { x2 };
        Formation::new(Position::new(x1, z1), Position::new(x2, z2))
    }

    fn geometry_ok(&self, f: &Formation) -> bool {
        evaluate_geometry_with(f, self.s, &self.cs).iter().all(|r| r.satisfied)
    }
}

/// Proposed-scheme oracle.
pub fn grid_search(s: &ScenarioConfig, g: &GridSpec) -> Result<OracleResult> {
    grid_search_mode(s, g, Mode::Proposed)
}

/// Oracle for any mode. In the vertical benchmark the `x2` axis is ignored.
pub fn grid_search_mode(s: &ScenarioConfig, g: &GridSpec, mode: Mode) -> Result<OracleResult> {
    g.validate()?;
    let z1s = g.z1.points();
    let x2s = if mode.vertical() { vec![f64::NAN] } else { g.x2.points() };
    let z2s = g.z2.points();
    let v = Visit {
        s,
        mode,
        cs: distinct_radar_constants(s),
    };

    // slave power feasibility depends on (x2, z2) only, except in the
    // vertical benchmark where x2 follows z1
    let slave_ok: Vec<Vec<bool>> = if mode.vertical() {
        Vec::new()
    } else {
        x2s.par_iter()
            .map(|&x2| {
                z2s.iter()
                    .map(|&z2| power_ok(Position::new(x2, z2), s, 1, mode))
                    .collect()
            })
            .collect()
    };

    let (best, evaluated, feasible) = z1s
        .par_iter()
        .map(|&z1| {
            let q1 = v.formation(z1, 0.0, 1.0).q1;
            let mut best = None;
            let mut evaluated = 0usize;
            let mut feasible = 0usize;
            if !power_ok(q1, s, 0, mode) {
                return (None, x2s.len() * z2s.len(), 0);
            }
            for (ix, &x2) in x2s.iter().enumerate() {
                for (iz, &z2) in z2s.iter().enumerate() {
                    evaluated += 1;
                    let f = v.formation(z1, x2, z2);
                    let p2_ok = if mode.vertical() {
                        power_ok(f.q2, s, 1, mode)
                    } else {
                        slave_ok[ix][iz]
                    };
                    if !p2_ok || !v.geometry_ok(&f) {
                        continue;
                    }
                    feasible += 1;
                    let cand = Candidate {
                        coverage: coverage(&f, &s.mission, &s.radar),
                        key: (z1, f.q2.x, z2),
                    };
                    best = better(best, Some(cand));
                }
            }
            (best, evaluated, feasible)
        })
        .reduce(|| (None, 0, 0), |a, b| (better(a.0, b.0), a.1 + b.1, a.2 + b.2));

    let best = best.map(|c| {
        let f = v.formation(c.key.0, c.key.1, c.key.2);
        describe(s, f, mode)
    });
    Ok(OracleResult {
        mode,
        best,
        evaluated,
        feasible,
    })
}

fn describe(s: &ScenarioConfig, f: Formation, mode: Mode) -> OracleBest {
    let p1 = schedule_for(f.q1, s, 0, mode);
    let p2 = schedule_for(f.q2, s, 1, mode);
    OracleBest {
        formation: f,
        coverage_m2: coverage(&f, &s.mission, &s.radar),
        objective_tilde: objective_tilde(&f, &s.radar),
        constraints: evaluate_constraints(&f, (&p1, &p2), s),
    }
}

fn centered(c: f64, radius: f64, step: f64, lo: f64, hi: f64) -> Axis {
    let k_lo = ((c - lo.max(c - radius)) / step + 1e-9).floor();
    let k_hi = ((hi.min(c + radius) - c) / step + 1e-9).floor();
    Axis::new(c - k_lo * step, c + k_hi * step, step)
}

/// Exhaustive search of a box of half-width `radius` around `around`, on a
/// grid through the center point.
pub fn refine(s: &ScenarioConfig, around: &Formation, radius: f64, step: f64) -> Result<OracleResult> {
    refine_mode(s, around, radius, step, Mode::Proposed)
}

pub fn refine_mode(s: &ScenarioConfig, around: &Formation, radius: f64, step: f64, mode: Mode) -> Result<OracleResult> {
    if !(step > 0.0 && step < radius) {
        return Err(Error::InvalidArgument("refine needs 0 < step < radius".into()));
    }
    let t = &s.thresholds;
    let x_t = s.mission.target_x;
    let g = GridSpec {
        z1: centered(around.q1.z, radius, step, t.z_min, t.z_max),
        x2: centered(around.q2.x, radius, step, f64::NEG_INFINITY, x_t),
        z2: centered(around.q2.z, radius, step, t.z_min, t.z_max),
    };
    grid_search_mode(s, &g, mode)
}

/// Write every feasible grid point as CSV
/// (`z1,x1,x2,z2,coverage_m2,objective_tilde,C1..C11` slacks) and return the
/// row count.
pub fn dump_feasible_csv<W: Write>(s: &ScenarioConfig, g: &GridSpec, mode: Mode, out: W) -> Result<usize> {
    g.validate()?;
    let v = Visit {
        s,
        mode,
        cs: distinct_radar_constants(s),
    };
    let x2s = if mode.vertical() { vec![f64::NAN] } else { g.x2.points() };
    let z2s = g.z2.points();
    let rows: Vec<Vec<String>> =
        g.z1.points()
            .par_iter()
            .flat_map_iter(|&z1| {
                let mut rows = Vec::new();
                for &x2 in &x2s {
                    for &z2 in &z2s {
                        let f = v.formation(z1, x2, z2);
                        if !v.geometry_ok(&f) {
                            continue;
                        }
                        let p1 = schedule_for(f.q1, s, 0, mode);
                        let p2 = schedule_for(f.q2, s, 1, mode);
                        let rep = evaluate_constraints(&f, (&p1, &p2), s);
                        if !rep.is_feasible() {
                            continue;
                        }
                        let mut row = vec![
                            f.q1.z.to_string(),
                            f.q1.x.to_string(),
                            f.q2.x.to_string(),
                            f.q2.z.to_string(),
                            coverage(&f, &s.mission, &s.radar).to_string(),
                            objective_tilde(&f, &s.radar).to_string(),
                        ];
                        row.extend(rep.records.iter().map(|r| r.slack.to_string()));
                        rows.push(row);
                    }
                }
                rows
            })
            .collect();
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Output(e.to_string());
    let mut header: Vec<String> = ["z1", "x1", "x2", "z2", "coverage_m2", "objective_tilde"]
        .iter()
        .map(|h| h.to_string())
        .collect();
    header.extend((1..=11).map(|k| format!("C{k}_slack")));
    w.write_record(&header).map_err(io)?;
    for r in &rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_includes_endpoint() {
        assert_eq!(Axis::new(1.0, 3.0, 1.0).points(), vec![1.0, 2.0, 3.0]);
        assert_eq!(Axis::new(1.0, 100.0, 5.0).points().last(), Some(&100.0));
        assert_eq!(Axis::single(4.0).points(), vec![4.0]);
        assert!(Axis::new(2.0, 1.0, 1.0).points().is_empty());
    }

    #[test]
    fn singleton_grid() {
        let s = ScenarioConfig::reference();
        let r = grid_search(&s, &GridSpec::single(100.0, -71.0, 100.0)).unwrap();
        let best = r.best.unwrap();
        assert_eq!(r.evaluated, 1);
        assert_eq!(r.feasible, 1);
        let f = best.formation;
        assert_eq!(best.coverage_m2, coverage(&f, &s.mission, &s.radar));
    }

    #[test]
    fn infeasible_grid_is_reported() {
        let mut s = ScenarioConfig::reference();
        s.thresholds.b_min = 1e6;
        let r = grid_search(&s, &GridSpec::coarse(&s)).unwrap();
        assert!(r.best.is_none());
        assert_eq!(r.feasible, 0);
        assert!(r.evaluated > 0);
    }

    #[test]
    fn empty_grid_is_misuse() {
        let s = ScenarioConfig::reference();
        let mut g = GridSpec::coarse(&s);
        g.x2 = Axis::new(1.0, 0.0, 1.0);
        assert!(matches!(grid_search(&s, &g), Err(Error::InvalidArgument(_))));
        g.x2 = Axis::new(0.0, 1.0, 0.0);
        assert!(matches!(grid_search(&s, &g), Err(Error::InvalidArgument(_))));
    }
}
