//! Interferometric quality metrics and the full constraint check.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::comms::{check_power_constraints, rate_slack, PowerSchedule};
use crate::geometry::{baseline, look_angle, perpendicular_baseline, slant_ranges, Formation, Position};
use crate::scenario::ScenarioConfig;

/// Slack at or above `-FEASIBILITY_TOL` counts as satisfied.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Absolute tolerance on the master placement rule, meters.
pub const PLACEMENT_TOL: f64 = 1e-6;

/// Master SNR `c_n / (r1³ sin θ1)`, with `r1 sin θ1 = x_t − x1`.
pub fn snr_master(f: &Formation, s: &ScenarioConfig, n: usize) -> f64 {
    let (r1, _) = slant_ranges(f, s.mission.target_x);
    let w = s.mission.target_x - f.q1.x;
    if w <= 0.0 {
        return f64::INFINITY;
    }
    s.radar_constant(n) / (r1 * r1 * w)
}

/// Slave SNR `c_n / (r1² r2 sin θ2)`, with `r2 sin θ2 = x_t − x2`. A slave at
/// nadir of the target returns `+∞`.
pub fn snr_slave(f: &Formation, s: &ScenarioConfig, n: usize) -> f64 {
    let (r1, _) = slant_ranges(f, s.mission.target_x);
    let w = s.mission.target_x - f.q2.x;
    if w <= 0.0 {
        return f64::INFINITY;
    }
    s.radar_constant(n) / (r1 * r1 * w)
}

/// `Π 1/sqrt(1 + 1/SNR_i)`. Infinite SNR contributes a factor of exactly 1.
pub fn gamma_snr_from(snr1: f64, snr2: f64) -> f64 {
    let inv = |snr: f64| if snr.is_infinite() { 0.0 } else { 1.0 / snr };
    1.0 / ((1.0 + inv(snr1)) * (1.0 + inv(snr2))).sqrt()
}

pub fn gamma_snr(f: &Formation, s: &ScenarioConfig, n: usize) -> f64 {
    gamma_snr_from(snr_master(f, s, n), snr_slave(f, s, n))
}

/// Baseline decorrelation from the two look-angle sines.
pub fn gamma_rg_from(sin1: f64, sin2: f64, bp: f64) -> f64 {
    ((2.0 + bp) * sin2 - (2.0 - bp) * sin1) / (bp * (sin1 + sin2))
}

/// Baseline decorrelation for slave `q2` with the master on boresight.
pub fn gamma_rg(q2: Position, s: &ScenarioConfig) -> f64 {
    let sin1 = s.radar.theta_d.sin();
    let sin2 = crate::geometry::sin_look_angle_slave(q2, s.mission.target_x);
    gamma_rg_from(sin1, sin2, s.radar.fractional_bandwidth())
}

/// The constant in `sin θ2 ≥ A sin θ1`, which is equivalent to
/// `γ_Rg ≥ γ_Rg^min`.
pub fn gamma_rg_ratio(s: &ScenarioConfig) -> f64 {
    let g = s.thresholds.gamma_rg_min;
    let bp = s.radar.fractional_bandwidth();
    (-g * bp - 2.0 + bp) / (g * bp - 2.0 - bp)
}

/// Actual master look angle of a formation (equals `θ_d` under the placement rule).
pub fn master_look_angle(f: &Formation, s: &ScenarioConfig) -> f64 {
    look_angle(f.q1, s.mission.target_x)
}

pub fn perpendicular_baseline_of(f: &Formation, s: &ScenarioConfig) -> f64 {
    perpendicular_baseline(f.q2, s.mission.target_x, master_look_angle(f, s))
}

/// `λ r1 sin θ1 / b⊥`; `+∞` when the slave sits on the master line of sight.
pub fn height_of_ambiguity(f: &Formation, s: &ScenarioConfig) -> f64 {
    let b_perp = perpendicular_baseline_of(f, s);
    if b_perp == 0.0 {
        return f64::INFINITY;
    }
    hoa_numerator(f, s) / b_perp
}

/// `λ r1 sin θ1 = λ (x_t − x1)`.
pub fn hoa_numerator(f: &Formation, s: &ScenarioConfig) -> f64 {
    s.radar.wavelength * (s.mission.target_x - f.q1.x)
}

/// Window `[λ r1 sin θ1/h_max, λ r1 sin θ1/h_min]` on `b⊥` equivalent to the
/// height-of-ambiguity window.
pub fn b_perp_window(f: &Formation, s: &ScenarioConfig) -> (f64, f64) {
    let num = hoa_numerator(f, s);
    (num / s.thresholds.h_amb_max, num / s.thresholds.h_amb_min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub snr1: Vec<f64>,
    pub snr2: Vec<f64>,
    pub gamma_snr: Vec<f64>,
    pub gamma_rg: f64,
    pub h_amb: f64,
    pub b_perp: f64,
    pub baseline: f64,
}

pub fn metrics(f: &Formation, s: &ScenarioConfig) -> MetricsReport {
    let n = s.mission.num_slots;
    let snr1: Vec<f64> = (0..n).map(|k| snr_master(f, s, k)).collect();
    let snr2: Vec<f64> = (0..n).map(|k| snr_slave(f, s, k)).collect();
    let gamma_snr = snr1.iter().zip(&snr2).map(|(&a, &b)| gamma_snr_from(a, b)).collect();
    MetricsReport {
        snr1,
        snr2,
        gamma_snr,
        gamma_rg: gamma_rg(f.q2, s),
        h_amb: height_of_ambiguity(f, s),
        b_perp: perpendicular_baseline_of(f, s),
        baseline: baseline(f),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintRecord {
    pub name: &'static str,
    pub satisfied: bool,
    pub slack: f64,
    #[serde(skip)]
    pub description: &'static str,
}

/// Outcome of checking C1–C11. Slacks are positive when satisfied and are
/// expressed in the algebraic form the optimizer uses:
///
/// | name | slack |
/// |------|-------|
/// | C1  | `min_i min(z_i − z_min, z_max − z_i)` |
/// | C2  | `1e-6 − |x1 − (x_t − z1 tan θ_d)|` |
/// | C3  | `r1 − r2` |
/// | C4  | `x_t − x2` |
/// | C5  | `b² − b_min²` |
/// | C6  | `min_n γ_SNR,n − γ_SNR^min` |
/// | C7  | `(x_t − x2) − A sin θ1 r2` |
/// | C8  | `min(b⊥ − b⊥^lo, b⊥^hi − b⊥)`, meters |
/// | C9  | `min_{i,n} min(p, P_max − p)` |
/// | C10 | `min_{i,n} p − p_min`, watts |
/// | C11 | `min_i E_com − Σ p δt` |
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub records: Vec<ConstraintRecord>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.records.iter().all(|r| r.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&ConstraintRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn slack(&self, name: &str) -> f64 {
        self.get(name).map(|r| r.slack).unwrap_or(f64::NAN)
    }

    pub fn violated(&self) -> Vec<&'static str> {
        self.records.iter().filter(|r| !r.satisfied).map(|r| r.name).collect()
    }
}

impl Serialize for FeasibilityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            satisfied: bool,
            slack: f64,
        }
        let mut map = serializer.serialize_map(Some(self.records.len()))?;
        for r in &self.records {
            map.serialize_entry(
                r.name,
                &Entry {
                    satisfied: r.satisfied,
                    slack: r.slack,
                },
            )?;
        }
        map.end()
    }
}

/// Radar constants with duplicates removed; C6 binds at the smallest.
pub fn distinct_radar_constants(s: &ScenarioConfig) -> Vec<f64> {
    let mut c = s.radar_constants();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

/// Only the geometric constraints C1–C8.
pub fn evaluate_geometry(f: &Formation, s: &ScenarioConfig) -> Vec<ConstraintRecord> {
    evaluate_geometry_with(f, s, &distinct_radar_constants(s))
}

/// [`evaluate_geometry`] with the distinct radar constants precomputed, for
/// callers that check many formations.
pub fn evaluate_geometry_with(f: &Formation, s: &ScenarioConfig, radar_constants: &[f64]) -> Vec<ConstraintRecord> {
    let t = &s.thresholds;
    let x_t = s.mission.target_x;
    let (r1, r2) = slant_ranges(f, x_t);

    let c1 = [f.q1.z, f.q2.z]
        .iter()
        .map(|&z| (z - t.z_min).min(t.z_max - z))
        .fold(f64::INFINITY, f64::min);
    let placement = f.q1.x - (x_t - f.q1.z * s.radar.theta_d.tan());
    let c2 = PLACEMENT_TOL - placement.abs();
    let c3 = r1 - r2;
    let c4 = x_t - f.q2.x;
    let c5 = baseline(f).powi(2) - t.b_min * t.b_min;
    let w1 = x_t - f.q1.x;
    let w2 = x_t - f.q2.x;
    let c6 = radar_constants
        .iter()
        .map(|&c| {
            let snr = |w: f64| if w <= 0.0 { f64::INFINITY } else { c / (r1 * r1 * w) };
            gamma_snr_from(snr(w1), snr(w2))
        })
        .fold(f64::INFINITY, f64::min)
        - t.gamma_snr_min;
    let c7 = (x_t - f.q2.x) - gamma_rg_ratio(s) * s.radar.theta_d.sin() * r2;
    let b_perp = perpendicular_baseline_of(f, s);
    let (lo, hi) = b_perp_window(f, s);
    let c8 = (b_perp - lo).min(hi - b_perp);

    vec![
        record("C1", c1, "altitude within [z_min, z_max]"),
        record("C2", c2, "master beam centered on the target"),
        record("C3", c3, "slave slant range not above master's"),
        record("C4", c4, "slave on the side-looking half plane"),
        record("C5", c5, "minimum separation"),
        record("C6", c6, "SNR decorrelation floor, worst slot"),
        record("C7", c7, "baseline decorrelation floor"),
        record("C8", c8, "height-of-ambiguity window"),
    ]
}

pub fn evaluate_constraints(
    f: &Formation,
    powers: (&PowerSchedule, &PowerSchedule),
    s: &ScenarioConfig,
) -> FeasibilityReport {
    let mut records = evaluate_geometry(f, s);
    let chk1 = check_power_constraints(powers.0, s);
    let chk2 = check_power_constraints(powers.1, s);
    let c10 = rate_slack(powers.0, f.q1, s, 0).min(rate_slack(powers.1, f.q2, s, 1));
    records.push(record(
        "C9",
        chk1.c9_slack.min(chk2.c9_slack),
        "transmit power within [0, P_max]",
    ));
    records.push(record("C10", c10, "minimum offloading rate"));
    records.push(record(
        "C11",
        chk1.c11_slack.min(chk2.c11_slack),
        "communication energy budget",
    ));
    FeasibilityReport { records }
}

fn record(name: &'static str, slack: f64, description: &'static str) -> ConstraintRecord {
    ConstraintRecord {
        name,
        satisfied: slack >= -FEASIBILITY_TOL,
        slack,
        description,
    }
}
