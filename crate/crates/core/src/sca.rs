//! Successive convex approximation inside an alternating optimization.
//!
//! The slave step moves `q2` with the master fixed; the master step moves the
//! master altitude `z1` (its ground range follows from the centering rule)
//! with the slave fixed. Each step repeatedly solves a convex inner
//! approximation of the constraint set around the current point, so every
//! accepted iterate stays feasible for the original problem.
//!
//! The two benchmarks reuse the same machinery: the vertical formation ties
//! `x2 = x1` (the slave then moves with the master in the master step), and the
//! equal-power scheme replaces each power schedule by one scalar per UAV.

use std::str::FromStr;

use serde::Serialize;

use crate::comms::{min_energy_schedule_at, power_coefficient, PowerSchedule};
use crate::convex::{solve_with, ConstraintKind, ConvexProgram, Lin, Row, SolveStatus, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{master_x_for, signed_overlap, Formation, Position};
use crate::metrics::{
    distinct_radar_constants, evaluate_constraints, evaluate_geometry, gamma_rg_ratio, FeasibilityReport,
};
use crate::oracle::{grid_search_mode, GridSpec};
use crate::report::{AoRecord, RunReport, TraceRow};
use crate::scenario::{RadarParams, ScenarioConfig};

/// Tolerance on original-constraint slacks when re-checking an SCA iterate.
pub const ITERATE_TOL: f64 = 1e-6;

/// Signed footprint overlap `min(far) − max(near)`, the concave stand-in for
/// the clamped swath. It equals the swath whenever the footprints overlap.
pub fn objective_tilde(f: &Formation, r: &RadarParams) -> f64 {
    signed_overlap(f, r)
}

/// Convex majorant of `−‖q_var − q_fix‖²` touching it at `a`:
/// `g = b² − 2(a − q_fix)ᵀ(2 q_var − a − q_fix)`.
pub fn surrogate_baseline(q_var: Position, q_fix: Position, a: Position) -> f64 {
    let b2 = (q_var.x - q_fix.x).powi(2) + (q_var.z - q_fix.z).powi(2);
    let (ax, az) = (a.x - q_fix.x, a.z - q_fix.z);
    b2 - 2.0 * (ax * (2.0 * q_var.x - a.x - q_fix.x) + az * (2.0 * q_var.z - a.z - q_fix.z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Proposed,
    /// Vertical formation, `x2 = x1`.
    Benchmark1,
    /// Constant power per UAV over the mission.
    Benchmark2,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Proposed, Mode::Benchmark1, Mode::Benchmark2];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Proposed => "proposed",
            Mode::Benchmark1 => "benchmark1",
            Mode::Benchmark2 => "benchmark2",
        }
    }

    pub fn vertical(self) -> bool {
        self == Mode::Benchmark1
    }

    pub fn equal_power(self) -> bool {
        self == Mode::Benchmark2
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Slave,
    Master,
}

impl Step {
    pub fn name(self) -> &'static str {
        match self {
            Step::Slave => "slave",
            Step::Master => "master",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubproblemKind {
    pub step: Step,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SCAConfig {
    /// Stop when the relative objective change falls to `epsilon`.
    pub epsilon: f64,
    /// Inner SCA iteration cap.
    pub max_iters: usize,
    /// Outer alternation cap.
    pub max_outer: usize,
    /// Duality-gap target of each convex solve.
    pub solver_tol: f64,
}

impl Default for SCAConfig {
    fn default() -> Self {
        SCAConfig {
            epsilon: 1e-4,
            max_iters: 50,
            max_outer: 20,
            solver_tol: 1e-8,
        }
    }
}

/// Starting formation: master altitude (ground range follows the centering
/// rule) and slave position. In the vertical benchmark `q2.x` is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialPoint {
    pub z1: f64,
    pub q2: Position,
}

/// Optimizer state: geometry plus both power schedules.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub z1: f64,
    pub q2: Position,
    pub p1: PowerSchedule,
    pub p2: PowerSchedule,
}

impl State {
    /// State at the given geometry with the cheapest admissible schedules.
    pub fn at(z1: f64, q2: Position, s: &ScenarioConfig, mode: Mode) -> Self {
        let q1 = Position::new(master_x_for(z1, s.mission.target_x, s.radar.theta_d), z1);
        State {
            z1,
            q2,
            p1: schedule_for(q1, s, 0, mode),
            p2: schedule_for(q2, s, 1, mode),
        }
    }

    pub fn q1(&self, s: &ScenarioConfig) -> Position {
        Position::new(master_x_for(self.z1, s.mission.target_x, s.radar.theta_d), self.z1)
    }

    pub fn formation(&self, s: &ScenarioConfig) -> Formation {
        Formation::new(self.q1(s), self.q2)
    }

    pub fn objective(&self, s: &ScenarioConfig) -> f64 {
        objective_tilde(&self.formation(s), &s.radar)
    }

    pub fn feasibility(&self, s: &ScenarioConfig) -> FeasibilityReport {
        evaluate_constraints(&self.formation(s), (&self.p1, &self.p2), s)
    }
}

/// Minimal schedule for the mode: pointwise minimum, or its peak held
/// constant for the equal-power scheme.
pub fn schedule_for(q: Position, s: &ScenarioConfig, uav: usize, mode: Mode) -> PowerSchedule {
    let min = min_energy_schedule_at(q, s, uav);
    if mode.equal_power() {
        PowerSchedule::constant(min.max(), min.len())
    } else {
        min
    }
}

/// A convex inner approximation plus the map back to formation coordinates.
#[derive(Debug, Clone)]
pub struct Subproblem {
    pub kind: SubproblemKind,
    pub program: ConvexProgram,
    geom: Vec<usize>,
    epigraph: usize,
}

impl Subproblem {
    pub fn epigraph_var(&self) -> usize {
        self.epigraph
    }

    /// Geometry of a solution vector, with schedules snapped to the minimal
    /// admissible ones (powers never enter the objective).
    pub fn decode(&self, x: &[f64], from: &State, s: &ScenarioConfig) -> State {
        let (mut z1, mut q2) = (from.z1, from.q2);
        let x_t = s.mission.target_x;
        let tan = s.radar.theta_d.tan();
        match (self.kind.step, self.kind.mode.vertical()) {
            (Step::Slave, false) => q2 = Position::new(x[self.geom[0]], x[self.geom[1]]),
            (Step::Slave, true) => q2.z = x[self.geom[0]],
            (Step::Master, false) => z1 = x[self.geom[0]],
            (Step::Master, true) => {
                z1 = x[self.geom[0]];
                q2.x = x_t - tan * z1;
            }
        }
        State::at(z1, q2, s, self.kind.mode)
    }
}

/// Affine image of the decision vector: `(x, z)` rows.
#[derive(Debug, Clone)]
struct QMap {
    x: Row,
    z: Row,
}

impl QMap {
    fn fixed(q: Position) -> Self {
        QMap {
            x: Row::new(vec![], q.x),
            z: Row::new(vec![], q.z),
        }
    }

    fn is_fixed(&self) -> bool {
        self.x.lin.is_empty() && self.z.lin.is_empty()
    }
}

fn lin_comb(terms: &[(f64, &Row)], c: f64) -> Row {
    let mut lin: Lin = Vec::new();
    let mut off = c;
    for (k, r) in terms {
        for &(i, v) in &r.lin {
            match lin.iter_mut().find(|e| e.0 == i) {
                Some(e) => e.1 += k * v,
                None => lin.push((i, k * v)),
            }
        }
        off += k * r.c;
    }
    lin.retain(|e| e.1 != 0.0);
    Row::new(lin, off)
}

fn eval_row(r: &Row, x: &[f64]) -> f64 {
    r.lin.iter().map(|&(i, c)| c * x[i]).sum::<f64>() + r.c
}

/// Slave-step program with the master held at `st`.
pub fn build_slave_subproblem(st: &State, s: &ScenarioConfig, mode: Mode) -> Result<Subproblem> {
    build(
        SubproblemKind {
            step: Step::Slave,
            mode,
        },
        st,
        s,
    )
}

/// Master-step program with the slave held at `st`.
pub fn build_master_subproblem(st: &State, s: &ScenarioConfig, mode: Mode) -> Result<Subproblem> {
    build(
        SubproblemKind {
            step: Step::Master,
            mode,
        },
        st,
        s,
    )
}

pub fn build_subproblem(kind: SubproblemKind, st: &State, s: &ScenarioConfig) -> Result<Subproblem> {
    build(kind, st, s)
}

fn build(kind: SubproblemKind, st: &State, s: &ScenarioConfig) -> Result<Subproblem> {
    let rep = st.feasibility(s);
    if !rep.is_feasible() {
        return Err(Error::InvalidArgument(format!(
            "expansion point violates {}",
            rep.violated().join(", ")
        )));
    }
    let th = &s.thresholds;
    let x_t = s.mission.target_x;
    let theta = s.radar.theta_d;
    let (sin, tan) = (theta.sin(), theta.tan());
    let sec = (tan * tan + 1.0).sqrt();
    let lambda = s.radar.wavelength;
    let q1_now = st.q1(s);
    let q2_now = st.q2;
    let vertical = kind.mode.vertical();

    let mut p = ConvexProgram::new();
    let mut start: Vec<f64> = Vec::new();
    let mut geom = Vec::new();

    let (q1, q2) = match kind.step {
        Step::Slave => {
            let q1 = QMap::fixed(q1_now);
            let q2 = if vertical {
                let z2 = p.add_var("z2", th.z_min, th.z_max);
                start.push(q2_now.z);
                geom.push(z2);
                QMap {
                    x: Row::new(vec![], q2_now.x),
                    z: Row::new(vec![(z2, 1.0)], 0.0),
                }
            } else {
                let x2 = p.add_var("x2", f64::NEG_INFINITY, x_t);
                let z2 = p.add_var("z2", th.z_min, th.z_max);
                start.extend([q2_now.x, q2_now.z]);
                geom.extend([x2, z2]);
                QMap {
                    x: Row::new(vec![(x2, 1.0)], 0.0),
                    z: Row::new(vec![(z2, 1.0)], 0.0),
                }
            };
            (q1, q2)
        }
        Step::Master => {
            let z1 = p.add_var("z1", th.z_min, th.z_max);
            start.push(st.z1);
            geom.push(z1);
            let x_of_z1 = Row::new(vec![(z1, -tan)], x_t);
            let q1 = QMap {
                x: x_of_z1.clone(),
                z: Row::new(vec![(z1, 1.0)], 0.0),
            };
            let q2 = if vertical {
                QMap {
                    x: x_of_z1,
                    z: Row::new(vec![], q2_now.z),
                }
            } else {
                QMap::fixed(q2_now)
            };
            (q1, q2)
        }
    };
    let z1_var = match kind.step {
        Step::Master => Some(geom[0]),
        Step::Slave => None,
    };
    // r1 = sec·z1 under the centering rule
    let r1 = lin_comb(&[(sec, &q1.z)], 0.0);

    // power variables for every UAV that moves in this step
    let n_slots = s.mission.num_slots;
    let pmax = s.comm.p_com_max;
    let mut powers: Vec<(usize, Vec<usize>, &QMap, Position)> = Vec::new();
    for (uav, qm, q_now) in [(0usize, &q1, q1_now), (1, &q2, q2_now)] {
        if qm.is_fixed() {
            continue;
        }
        let min = min_energy_schedule_at(q_now, s, uav);
        let count = if kind.mode.equal_power() { 1 } else { n_slots };
        let mut vars = Vec::with_capacity(count);
        let e_min = if count == 1 {
            min.max() * n_slots as f64 * s.mission.slot_duration
        } else {
            min.energy(s.mission.slot_duration)
        };
        let e_full = pmax * n_slots as f64 * s.mission.slot_duration;
        let frac = if e_full > e_min {
            (0.5 * (s.comm.e_com - e_min) / (e_full - e_min)).clamp(0.0, 0.5)
        } else {
            0.0
        };
        for k in 0..count {
            let tag = if uav == 0 { "p1" } else { "p2" };
            vars.push(p.add_var(format!("{tag}[{}]", k + 1), 0.0, pmax));
            let lo = if count == 1 { min.max() } else { min.p[k] };
            start.push(lo + frac * (pmax - lo));
        }
        powers.push((uav, vars, qm, q_now));
    }

    // the expansion point attains its own objective, so this floor never binds
    let obj_now = st.objective(s);
    let t = p.add_var("t", obj_now - obj_now.abs().max(1.0), f64::INFINITY);
    p.set_objective(t, 1.0);
    start.push(obj_now - 0.5 * obj_now.abs().max(1.0));

    // epigraph of min(far_i) − max(near_j)
    let (tn, tf) = (s.radar.theta_near().tan(), s.radar.theta_far().tan());
    let near = |q: &QMap| lin_comb(&[(1.0, &q.x), (tn, &q.z)], 0.0);
    let far = |q: &QMap| lin_comb(&[(1.0, &q.x), (tf, &q.z)], 0.0);
    for (fi, fname) in [(far(&q1), "far1"), (far(&q2), "far2")] {
        for (nj, nname) in [(near(&q1), "near1"), (near(&q2), "near2")] {
            let r = lin_comb(&[(-1.0, &fi), (1.0, &nj)], 0.0);
            let mut a = r.lin;
            a.push((t, 1.0));
            p.push(format!("overlap {fname}-{nname}"), ConstraintKind::Affine { a, b: r.c });
        }
    }

    // C3: r2 ≤ r1
    let dx2 = lin_comb(&[(1.0, &q2.x)], -x_t);
    if q2.is_fixed() {
        let r2 = (q2_now.x - x_t).hypot(q2_now.z);
        let mut a = r1.lin.clone();
        a.iter_mut().for_each(|e| e.1 = -e.1);
        p.push("C3", ConstraintKind::Affine { a, b: r2 - r1.c });
    } else {
        p.push(
            "C3",
            ConstraintKind::Soc {
                rows: vec![dx2.clone(), q2.z.clone()],
                g: r1.lin.clone(),
                h: r1.c,
            },
        );
    }

    // C5 through the baseline majorant, in difference coordinates δ = q2 − q1
    let dx = lin_comb(&[(1.0, &q2.x), (-1.0, &q1.x)], 0.0);
    let dz = lin_comb(&[(1.0, &q2.z), (-1.0, &q1.z)], 0.0);
    let (ax, az) = (q2_now.x - q1_now.x, q2_now.z - q1_now.z);
    let lin5 = lin_comb(&[(-4.0 * ax, &dx), (-4.0 * az, &dz)], 0.0);
    p.push(
        "C5~",
        ConstraintKind::Quadratic {
            rows: vec![dx, dz],
            a: lin5.lin,
            b: lin5.c + 2.0 * (ax * ax + az * az) + th.b_min * th.b_min,
        },
    );

    // C6 per distinct radar constant
    let g2 = th.gamma_snr_min * th.gamma_snr_min;
    for c in distinct_radar_constants(s) {
        match z1_var {
            None => {
                if q2.is_fixed() {
                    continue;
                }
                let r1v = (q1_now.x - x_t).hypot(q1_now.z);
                let inv1 = r1v * r1v * (x_t - q1_now.x) / c;
                let k = 1.0 / (g2 * (1.0 + inv1)) - 1.0;
                // (x_t − x2) ≤ k·c/r1²
                let row = lin_comb(&[(-1.0, &q2.x)], x_t - k * c / (r1v * r1v));
                p.push("C6", ConstraintKind::Affine { a: row.lin, b: row.c });
            }
            Some(z1) => {
                // (1 + sinθ r1³/c)(1 + w2 r1²/c) ≤ 1/γ², with w2 = α + β r1
                let (alpha, beta) = if vertical { (0.0, sin) } else { (x_t - q2_now.x, 0.0) };
                let a3 = sin / c;
                let coeffs = vec![
                    1.0 - 1.0 / g2,
                    0.0,
                    alpha / c,
                    beta / c + a3,
                    0.0,
                    a3 * alpha / c,
                    a3 * beta / c,
                ];
                p.push(
                    "C6",
                    ConstraintKind::Poly {
                        t: Row::new(vec![(z1, sec)], 0.0),
                        coeffs,
                        a: vec![],
                        b: 0.0,
                    },
                );
            }
        }
    }

    // C7: A sinθ1 r2 ≤ x_t − x2, a cone in q2
    if !q2.is_fixed() {
        let k = gamma_rg_ratio(s) * sin;
        let w2 = lin_comb(&[(-1.0, &q2.x)], x_t);
        p.push(
            "C7",
            ConstraintKind::Soc {
                rows: vec![lin_comb(&[(k, &dx2)], 0.0), lin_comb(&[(k, &q2.z)], 0.0)],
                g: w2.lin,
                h: w2.c,
            },
        );
    }

    // C8: b⊥ = |D|/sec with D = (x_t − x2) − tanθ1·z2, window ∝ λ z1 tanθ1
    let d = lin_comb(&[(-1.0, &q2.x), (-tan, &q2.z)], x_t);
    let d_now = eval_row(&d, &start);
    let hi_row = lin_comb(&[(sec * lambda * tan / th.h_amb_min, &q1.z)], 0.0);
    let lo_row = lin_comb(&[(sec * lambda * tan / th.h_amb_max, &q1.z)], 0.0);
    if q1.is_fixed() {
        p.push(
            "C8~a",
            ConstraintKind::Quadratic {
                rows: vec![d.clone()],
                a: vec![],
                b: -hi_row.c * hi_row.c,
            },
        );
        // D² ≥ 2 D_a D − D_a²
        let lin = lin_comb(&[(-2.0 * d_now, &d)], d_now * d_now + lo_row.c * lo_row.c);
        p.push("C8~b", ConstraintKind::Affine { a: lin.lin, b: lin.c });
    } else if d.lin.is_empty() {
        let up = lin_comb(&[(-1.0, &hi_row)], d.c.abs());
        p.push("C8~a", ConstraintKind::Affine { a: up.lin, b: up.c });
        let low = lin_comb(&[(1.0, &lo_row)], -d.c.abs());
        p.push("C8~b", ConstraintKind::Affine { a: low.lin, b: low.c });
    } else {
        p.push(
            "C8~a",
            ConstraintKind::Soc {
                rows: vec![d.clone()],
                g: hi_row.lin,
                h: hi_row.c,
            },
        );
        let sign = if d_now >= 0.0 { 1.0 } else { -1.0 };
        let low = lin_comb(&[(1.0, &lo_row), (-sign, &d)], 0.0);
        p.push("C8~b", ConstraintKind::Affine { a: low.lin, b: low.c });
    }

    // C10 at every slot, C11 per UAV; C9 is the power box
    let [gx, gy, gz] = s.mission.ground_station;
    let ys = s.along_track_positions();
    let dt = s.mission.slot_duration;
    for (uav, vars, qm, _) in &powers {
        let kappa = power_coefficient(s, *uav);
        let sk = kappa.sqrt();
        let rx = lin_comb(&[(sk, &qm.x)], -sk * gx);
        let rz = lin_comb(&[(sk, &qm.z)], -sk * gz);
        for (n, y) in ys.iter().enumerate() {
            let var = vars[if vars.len() == 1 { 0 } else { n }];
            p.push(
                format!("C10 uav{} slot{}", uav + 1, n + 1),
                ConstraintKind::Quadratic {
                    rows: vec![rx.clone(), rz.clone()],
                    a: vec![(var, -1.0)],
                    b: kappa * (y - gy).powi(2),
                },
            );
        }
        let per = if vars.len() == 1 { dt * n_slots as f64 } else { dt };
        p.push(
            format!("C11 uav{}", uav + 1),
            ConstraintKind::Affine {
                a: vars.iter().map(|&v| (v, per)).collect(),
                b: -s.comm.e_com,
            },
        );
    }

    p.start = Some(start);
    Ok(Subproblem {
        kind,
        program: p,
        geom,
        epigraph: t,
    })
}

/// Outcome of one SCA run.
#[derive(Debug, Clone)]
pub struct ScaOutcome {
    pub state: State,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each accepted iterate, starting with the initial one.
    pub objectives: Vec<f64>,
    /// Last solver status that ended the loop, if it was not optimal.
    pub stopped_by: Option<SolveStatus>,
}

/// Iterate convex approximations of one subproblem from a feasible state.
pub fn sca_solve(kind: SubproblemKind, cfg: &SCAConfig, s: &ScenarioConfig, init: &State) -> Result<ScaOutcome> {
    let opts = SolverOptions {
        tol: cfg.solver_tol,
        ..SolverOptions::default()
    };
    let mut state = init.clone();
    let mut obj = state.objective(s);
    let mut out = ScaOutcome {
        state: state.clone(),
        iterations: 0,
        converged: false,
        objectives: vec![obj],
        stopped_by: None,
    };
    for _ in 0..cfg.max_iters {
        let sub = build(kind, &state, s)?;
        let rep = solve_with(&sub.program, &opts)?;
        out.iterations += 1;
        if rep.status != SolveStatus::Optimal {
            log::debug!("{} step stopped: solver status {:?}", kind.step.name(), rep.status);
            out.stopped_by = Some(rep.status);
            break;
        }
        let cand = sub.decode(&rep.x, &state, s);
        let geo = evaluate_geometry(&cand.formation(s), s);
        if let Some(bad) = geo.iter().find(|r| r.slack < -ITERATE_TOL) {
            log::warn!(
                "{} step produced an iterate violating {}; keeping previous point",
                kind.step.name(),
                bad.name
            );
            break;
        }
        if !cand.feasibility(s).is_feasible() {
            log::debug!(
                "{} step iterate fails power checks; keeping previous point",
                kind.step.name()
            );
            break;
        }
        let new_obj = cand.objective(s);
        if new_obj <= obj {
            // no improvement: the current point is a fixed point of the map
            out.converged = true;
            break;
        }
        let rel = (new_obj - obj).abs() / new_obj.abs().max(1e-12);
        state = cand;
        obj = new_obj;
        out.objectives.push(obj);
        if rel <= cfg.epsilon {
            out.converged = true;
            break;
        }
    }
    out.state = state;
    Ok(out)
}

/// Three documented starting points used for robustness checks: master at
/// the ceiling, slave on the near side of the master line of sight with its
/// perpendicular baseline mid-window, at three slave altitudes.
pub fn documented_inits(s: &ScenarioConfig) -> Vec<InitialPoint> {
    let z1 = s.thresholds.z_max;
    [1.0, 0.9, 0.75]
        .into_iter()
        .map(|frac| default_init_at(s, z1, frac * z1))
        .collect()
}

fn default_init_at(s: &ScenarioConfig, z1: f64, z2: f64) -> InitialPoint {
    let x_t = s.mission.target_x;
    let tan = s.radar.theta_d.tan();
    let sec = (tan * tan + 1.0).sqrt();
    let num = s.radar.wavelength * tan * z1;
    let b_mid = 0.5 * (num / s.thresholds.h_amb_max + num / s.thresholds.h_amb_min);
    // D = (x_t − x2) − tanθ·z2 = −sec·b_mid
    InitialPoint {
        z1,
        q2: Position::new(x_t - tan * z2 + sec * b_mid, z2),
    }
}

/// Default starting point for a mode.
pub fn default_init(s: &ScenarioConfig, mode: Mode) -> InitialPoint {
    let z1 = s.thresholds.z_max;
    if mode.vertical() {
        let num = s.radar.wavelength * s.radar.theta_d.tan() * z1;
        let b_mid = 0.5 * (num / s.thresholds.h_amb_max + num / s.thresholds.h_amb_min);
        let dz = b_mid / s.radar.theta_d.sin();
        let x1 = master_x_for(z1, s.mission.target_x, s.radar.theta_d);
        InitialPoint {
            z1,
            q2: Position::new(x1, z1 - dz),
        }
    } else {
        default_init_at(s, z1, z1)
    }
}

/// Feasible starting state: the requested point if feasible, otherwise the
/// best point of a coarse grid.
pub fn initial_state(s: &ScenarioConfig, init: Option<InitialPoint>, mode: Mode) -> Result<(State, bool)> {
    let ip = init.unwrap_or_else(|| default_init(s, mode));
    let mut q2 = ip.q2;
    if mode.vertical() {
        q2.x = master_x_for(ip.z1, s.mission.target_x, s.radar.theta_d);
    }
    let st = State::at(ip.z1, q2, s, mode);
    if st.feasibility(s).is_feasible() {
        return Ok((st, false));
    }
    log::info!(
        "initial point infeasible ({}); repairing from the coarse grid",
        st.feasibility(s).violated().join(", ")
    );
    let res = grid_search_mode(s, &GridSpec::coarse(s), mode)?;
    match res.best {
        Some(b) => Ok((State::at(b.formation.q1.z, b.formation.q2, s, mode), true)),
        None => Err(Error::Infeasible("no feasible formation on the repair grid".into())),
    }
}

/// Alternating optimization for the given mode.
pub fn run(s: &ScenarioConfig, init: Option<InitialPoint>, cfg: &SCAConfig, mode: Mode) -> Result<RunReport> {
    let (mut state, repaired) = initial_state(s, init, mode)?;
    let mut obj = state.objective(s);
    let mut inner = vec![TraceRow {
        iteration: 0,
        objective: obj,
        subproblem: "init".into(),
    }];
    let mut outer = Vec::new();
    let mut converged = false;
    for k in 1..=cfg.max_outer {
        let mut counts = [0usize; 2];
        for (i, step) in [Step::Slave, Step::Master].into_iter().enumerate() {
            let res = sca_solve(SubproblemKind { step, mode }, cfg, s, &state)?;
            counts[i] = res.iterations;
            for o in res.objectives.iter().skip(1) {
                inner.push(TraceRow {
                    iteration: inner.len(),
                    objective: *o,
                    subproblem: step.name().into(),
                });
            }
            state = res.state;
        }
        let new_obj = state.objective(s);
        let f = state.formation(s);
        outer.push(AoRecord {
            iteration: k,
            objective: new_obj,
            formation: f,
            slave_iterations: counts[0],
            master_iterations: counts[1],
            p1: state.p1.clone(),
            p2: state.p2.clone(),
            constraints: state.feasibility(s),
        });
        let rel = (new_obj - obj).abs() / new_obj.abs().max(1e-12);
        obj = new_obj;
        if rel <= cfg.epsilon {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("alternating optimization hit {} outer iterations", cfg.max_outer);
    }
    Ok(RunReport::new(s, mode, &state, converged, repaired, outer, inner))
}

/// Proposed scheme.
pub fn ao_solve(s: &ScenarioConfig, init: Option<InitialPoint>, cfg: &SCAConfig) -> Result<RunReport> {
    run(s, init, cfg, Mode::Proposed)
}

/// Vertical formation benchmark (`x2 = x1`).
pub fn benchmark1_vertical(s: &ScenarioConfig, init: Option<InitialPoint>, cfg: &SCAConfig) -> Result<RunReport> {
    run(s, init, cfg, Mode::Benchmark1)
}

/// Equal-power benchmark (one constant power per UAV).
pub fn benchmark2_equal_power(s: &ScenarioConfig, init: Option<InitialPoint>, cfg: &SCAConfig) -> Result<RunReport> {
    run(s, init, cfg, Mode::Benchmark2)
}
