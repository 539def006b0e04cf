//! A small dense log-barrier interior-point solver.
//!
//! Programs maximize a linear objective over box-bounded variables subject to
//! a handful of convex constraint classes, each written as `f(x) ≤ 0`:
//!
//! * affine: `a·x + b`
//! * quadratic: `Σ_k (r_k·x + c_k)² + a·x + b`
//! * second-order cone: `‖(r_k·x + c_k)_k‖ ≤ g·x + h`
//! * monotone polynomial: `Σ_k c_k t^k + a·x + b` with `t = l·x + l0`, convex
//!   on the region the boxes allow
//!
//! The dimension is small (a few geometric variables plus one power variable
//! per slot), so Newton steps use a dense Cholesky factorization.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Sparse linear form `Σ coef·x[idx]`.
pub type Lin = Vec<(usize, f64)>;

fn dot(l: &[(usize, f64)], x: &[f64]) -> f64 {
    l.iter().map(|&(i, c)| c * x[i]).sum()
}

/// One affine row `r·x + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub lin: Lin,
    pub c: f64,
}

impl Row {
    pub fn new(lin: Lin, c: f64) -> Self {
        Row { lin, c }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.lin, x) + self.c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintKind {
    Affine { a: Lin, b: f64 },
    Quadratic { rows: Vec<Row>, a: Lin, b: f64 },
    Soc { rows: Vec<Row>, g: Lin, h: f64 },
    Poly { t: Row, coeffs: Vec<f64>, a: Lin, b: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub label: String,
    pub kind: ConstraintKind,
    support: Vec<usize>,
}

impl Constraint {
    pub fn new(label: impl Into<String>, kind: ConstraintKind) -> Self {
        let mut support: Vec<usize> = match &kind {
            ConstraintKind::Affine { a, .. } => a.iter().map(|p| p.0).collect(),
            ConstraintKind::Quadratic { rows, a, .. } => rows
                .iter()
                .flat_map(|r| r.lin.iter().map(|p| p.0))
                .chain(a.iter().map(|p| p.0))
                .collect(),
            ConstraintKind::Soc { rows, g, .. } => rows
                .iter()
                .flat_map(|r| r.lin.iter().map(|p| p.0))
                .chain(g.iter().map(|p| p.0))
                .collect(),
            ConstraintKind::Poly { t, a, .. } => t.lin.iter().map(|p| p.0).chain(a.iter().map(|p| p.0)).collect(),
        };
        support.sort_unstable();
        support.dedup();
        Constraint {
            label: label.into(),
            kind,
            support,
        }
    }

    /// Convex value whose sign decides feasibility. For cones this is
    /// `‖u‖ − (g·x + h)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ConstraintKind::Affine { a, b } => dot(a, x) + b,
            ConstraintKind::Quadratic { rows, a, b } => {
                rows.iter().map(|r| r.eval(x).powi(2)).sum::<f64>() + dot(a, x) + b
            }
            ConstraintKind::Soc { rows, g, h } => {
                rows.iter().map(|r| r.eval(x).powi(2)).sum::<f64>().sqrt() - (dot(g, x) + h)
            }
            ConstraintKind::Poly { t, coeffs, a, b } => poly(coeffs, t.eval(x)).0 + dot(a, x) + b,
        }
    }

    fn barrier_degree(&self) -> f64 {
        match self.kind {
            ConstraintKind::Soc { .. } => 2.0,
            _ => 1.0,
        }
    }

    /// Copy with an extra `−s` slack (`+s` on a cone's right side).
    fn relaxed(&self, s: usize) -> Constraint {
        let kind = match self.kind.clone() {
            ConstraintKind::Affine { mut a, b } => {
                a.push((s, -1.0));
                ConstraintKind::Affine { a, b }
            }
            ConstraintKind::Quadratic { rows, mut a, b } => {
                a.push((s, -1.0));
                ConstraintKind::Quadratic { rows, a, b }
            }
            ConstraintKind::Soc { rows, mut g, h } => {
                g.push((s, 1.0));
                ConstraintKind::Soc { rows, g, h }
            }
            ConstraintKind::Poly { t, coeffs, mut a, b } => {
                a.push((s, -1.0));
                ConstraintKind::Poly { t, coeffs, a, b }
            }
        };
        Constraint::new(self.label.clone(), kind)
    }

    /// Add this constraint's barrier term into `grad`/`hess`. Returns the
    /// barrier value, or `None` outside the barrier domain.
    fn accumulate(
        &self,
        x: &[f64],
        want_derivs: bool,
        scratch: &mut [f64],
        grad: &mut DVector<f64>,
        hess: &mut DMatrix<f64>,
    ) -> Option<f64> {
        for &i in &self.support {
            scratch[i] = 0.0;
        }
        match &self.kind {
            ConstraintKind::Soc { rows, g, h } => {
                let s = dot(g, x) + h;
                let us: Vec<f64> = rows.iter().map(|r| r.eval(x)).collect();
                let psi = s * s - us.iter().map(|u| u * u).sum::<f64>();
                if s <= 0.0 || psi <= 0.0 || !psi.is_finite() {
                    return None;
                }
                if want_derivs {
                    // ∇ψ = 2 s g − 2 Σ u_k r_k
                    for &(i, c) in g {
                        scratch[i] += 2.0 * s * c;
                    }
                    for (r, u) in rows.iter().zip(&us) {
                        for &(i, c) in &r.lin {
                            scratch[i] -= 2.0 * u * c;
                        }
                    }
                    self.rank_one(scratch, -1.0 / psi, 1.0 / (psi * psi), grad, hess);
                    // −∇²ψ/ψ = (−2 g gᵀ + 2 Σ r rᵀ)/ψ
                    outer(g, g, -2.0 / psi, hess);
                    for r in rows {
                        outer(&r.lin, &r.lin, 2.0 / psi, hess);
                    }
                }
                Some(-psi.ln())
            }
            _ => {
                let f = self.value(x);
                if f >= 0.0 || !f.is_finite() {
                    return None;
                }
                if want_derivs {
                    let neg = -f;
                    match &self.kind {
                        ConstraintKind::Affine { a, .. } => {
                            add_lin(scratch, a, 1.0);
                        }
                        ConstraintKind::Quadratic { rows, a, .. } => {
                            add_lin(scratch, a, 1.0);
                            for r in rows {
                                let v = r.eval(x);
                                add_lin(scratch, &r.lin, 2.0 * v);
                                outer(&r.lin, &r.lin, 2.0 / neg, hess);
                            }
                        }
                        ConstraintKind::Poly { t, coeffs, a, .. } => {
                            let (_, d1, d2) = poly(coeffs, t.eval(x));
                            add_lin(scratch, a, 1.0);
                            add_lin(scratch, &t.lin, d1);
                            outer(&t.lin, &t.lin, d2 / neg, hess);
                        }
                        ConstraintKind::Soc { .. } => unreachable!(),
                    }
                    self.rank_one(scratch, 1.0 / neg, 1.0 / (neg * neg), grad, hess);
                }
                Some(-(-f).ln())
            }
        }
    }

    fn rank_one(&self, v: &[f64], gscale: f64, hscale: f64, grad: &mut DVector<f64>, hess: &mut DMatrix<f64>) {
        for &i in &self.support {
            grad[i] += gscale * v[i];
            for &j in &self.support {
                hess[(i, j)] += hscale * v[i] * v[j];
            }
        }
    }
}

fn add_lin(dst: &mut [f64], l: &[(usize, f64)], scale: f64) {
    for &(i, c) in l {
        dst[i] += scale * c;
    }
}

fn outer(a: &[(usize, f64)], b: &[(usize, f64)], scale: f64, hess: &mut DMatrix<f64>) {
    for &(i, ci) in a {
        for &(j, cj) in b {
            hess[(i, j)] += scale * ci * cj;
        }
    }
}

/// Value, first and second derivative of `Σ c_k t^k`.
fn poly(coeffs: &[f64], t: f64) -> (f64, f64, f64) {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &c in coeffs.iter().rev() {
        d2 = d2 * t + 2.0 * d1;
        d1 = d1 * t + v;
        v = v * t + c;
    }
    (v, d1, d2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexProgram {
    pub names: Vec<String>,
    /// Maximized.
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Optional starting point, typically the previous iterate.
    pub start: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// `max(0, f_i(x))` per constraint, in program order.
    pub residuals: Vec<(String, f64)>,
    pub iterations: usize,
}

impl SolveReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Duality-gap target `m/t`.
    pub tol: f64,
    pub mu: f64,
    pub max_newton: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            mu: 10.0,
            max_newton: 5000,
        }
    }
}

/// A strictly feasible point must clear every constraint by this margin.
pub const STRICT_MARGIN: f64 = 1e-9;

impl ConvexProgram {
    pub fn new() -> Self {
        ConvexProgram {
            names: Vec::new(),
            objective: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            constraints: Vec::new(),
            start: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.names.push(name.into());
        self.objective.push(0.0);
        self.lower.push(lower);
        self.upper.push(upper);
        self.names.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coef: f64) {
        self.objective[var] = coef;
    }

    pub fn push(&mut self, label: impl Into<String>, kind: ConstraintKind) {
        self.constraints.push(Constraint::new(label, kind));
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn residuals(&self, x: &[f64]) -> Vec<(String, f64)> {
        self.constraints
            .iter()
            .map(|c| (c.label.clone(), c.value(x).max(0.0)))
            .collect()
    }

    fn in_box_strict(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&lo, &hi))| v > lo && v < hi)
    }

    fn barrier_degree(&self) -> f64 {
        let boxes = self.lower.iter().chain(&self.upper).filter(|b| b.is_finite()).count() as f64;
        boxes + self.constraints.iter().map(|c| c.barrier_degree()).sum::<f64>()
    }

    /// One constraint per line, for failure triage.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let fmt_lin = |l: &[(usize, f64)]| {
            l.iter()
                .map(|&(i, c)| format!("{c:+e}*{}", self.names[i]))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let obj: Lin = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| (i, *c))
            .collect();
        let _ = writeln!(out, "maximize {}", fmt_lin(&obj));
        for (i, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "var {name} in [{:e}, {:e}]", self.lower[i], self.upper[i]);
        }
        for c in &self.constraints {
            let line = match &c.kind {
                ConstraintKind::Affine { a, b } => format!("affine {} {b:+e} <= 0", fmt_lin(a)),
                ConstraintKind::Quadratic { rows, a, b } => format!(
                    "quadratic sum[{}]^2 {} {b:+e} <= 0",
                    rows.iter()
                        .map(|r| format!("({} {:+e})", fmt_lin(&r.lin), r.c))
                        .collect::<Vec<_>>()
                        .join(", "),
                    fmt_lin(a)
                ),
                ConstraintKind::Soc { rows, g, h } => format!(
                    "soc norm[{}] <= {} {h:+e}",
                    rows.iter()
                        .map(|r| format!("({} {:+e})", fmt_lin(&r.lin), r.c))
                        .collect::<Vec<_>>()
                        .join(", "),
                    fmt_lin(g)
                ),
                ConstraintKind::Poly { t, coeffs, a, b } => format!(
                    "poly {coeffs:?} at t = {} {:+e}; {} {b:+e} <= 0",
                    fmt_lin(&t.lin),
                    t.c,
                    fmt_lin(a)
                ),
            };
            let _ = writeln!(out, "{}: {line}", c.label);
        }
        out
    }

    /// Midpoint-convexity probe on random pairs inside the box. Unbounded
    /// coordinates are sampled within ±100 of the starting point.
    pub fn check_convexity(&self, pairs: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.num_vars();
        let center = self.start.clone().unwrap_or_else(|| vec![0.0; n]);
        let range = |i: usize| {
            let lo = if self.lower[i].is_finite() {
                self.lower[i]
            } else {
                center[i] - 100.0
            };
            let hi = if self.upper[i].is_finite() {
                self.upper[i]
            } else {
                center[i] + 100.0
            };
            (lo, hi.max(lo))
        };
        let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let (lo, hi) = range(i);
                    if hi > lo {
                        rng.random_range(lo..=hi)
                    } else {
                        lo
                    }
                })
                .collect()
        };
        for c in &self.constraints {
            for _ in 0..pairs {
                let a = sample(&mut rng);
                let b = sample(&mut rng);
                let m: Vec<f64> = a.iter().zip(&b).map(|(p, q)| 0.5 * (p + q)).collect();
                let (fa, fb, fm) = (c.value(&a), c.value(&b), c.value(&m));
                let slack = 1e-9 * (1.0 + fa.abs() + fb.abs());
                if fm > 0.5 * (fa + fb) + slack {
                    return Err(Error::Solver(format!(
                        "constraint `{}` failed the midpoint convexity check",
                        c.label
                    )));
                }
            }
        }
        Ok(())
    }

    fn initial_point(&self) -> Vec<f64> {
        let n = self.num_vars();
        let hint = self.start.clone().unwrap_or_else(|| vec![f64::NAN; n]);
        (0..n)
            .map(|i| {
                let (lo, hi) = (self.lower[i], self.upper[i]);
                let mut v = hint.get(i).copied().unwrap_or(f64::NAN);
                if !v.is_finite() {
                    v = match (lo.is_finite(), hi.is_finite()) {
                        (true, true) => 0.5 * (lo + hi),
                        (true, false) => lo + 1.0,
                        (false, true) => hi - 1.0,
                        (false, false) => 0.0,
                    };
                }
                if !(lo < hi) {
                    lo
                } else if lo.is_finite() && hi.is_finite() {
                    let pad = (1e-7 * (hi - lo).max(1.0)).min(0.25 * (hi - lo));
                    v.clamp(lo + pad, hi - pad)
                } else if lo.is_finite() {
                    v.max(lo + 1e-7 * lo.abs().max(1.0))
                } else if hi.is_finite() {
                    v.min(hi - 1e-7 * hi.abs().max(1.0))
                } else {
                    v
                }
            })
            .collect()
    }

    fn degenerate_box(&self) -> Option<usize> {
        (0..self.num_vars()).find(|&i| !(self.lower[i] < self.upper[i]))
    }
}

impl Default for ConvexProgram {
    fn default() -> Self {
        Self::new()
    }
}

/// Find a point strictly satisfying every constraint by at least
/// [`STRICT_MARGIN`]. A starting point that already does is returned unchanged.
pub fn phase1_feasible_point(p: &ConvexProgram) -> std::result::Result<Vec<f64>, SolveStatus> {
    if p.degenerate_box().is_some() {
        return Err(SolveStatus::Infeasible);
    }
    let x0 = p.initial_point();
    let worst = p
        .constraints
        .iter()
        .map(|c| c.value(&x0))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst < -STRICT_MARGIN && p.in_box_strict(&x0) {
        return Ok(x0);
    }

    // minimize s subject to f_i(x) ≤ s, boxes kept hard, s ≥ −1
    let n = p.num_vars();
    let mut aux = ConvexProgram::new();
    aux.names = p.names.clone();
    aux.objective = vec![0.0; n];
    aux.lower = p.lower.clone();
    aux.upper = p.upper.clone();
    let s = aux.add_var("phase1_slack", -1.0, f64::INFINITY);
    aux.set_objective(s, -1.0);
    aux.constraints = p.constraints.iter().map(|c| c.relaxed(s)).collect();
    let mut start = x0;
    start.push(worst.max(-0.5) + 1.0);

    let opts = SolverOptions {
        tol: 1e-10,
        ..SolverOptions::default()
    };
    let (x, _, _) = barrier(&aux, start, &opts, Some((s, -1e-3)));
    if x[s] < -STRICT_MARGIN {
        let mut x = x;
        x.truncate(n);
        let ok = p.constraints.iter().all(|c| c.value(&x) < -STRICT_MARGIN);
        if ok && p.in_box_strict(&x) {
            return Ok(x);
        }
    }
    Err(SolveStatus::Infeasible)
}

/// Maximize the program's objective. Deterministic for identical input.
pub fn solve(p: &ConvexProgram, tol: f64) -> Result<SolveReport> {
    solve_with(
        p,
        &SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_with(p: &ConvexProgram, opts: &SolverOptions) -> Result<SolveReport> {
    if p.objective.len() != p.num_vars() || p.lower.len() != p.num_vars() || p.upper.len() != p.num_vars() {
        return Err(Error::InvalidArgument("program dimensions disagree".into()));
    }
    #[cfg(debug_assertions)]
    p.check_convexity(8, 0x5eed)?;

    let x0 = match phase1_feasible_point(p) {
        Ok(x) => x,
        Err(status) => {
            let x = p.initial_point();
            return Ok(SolveReport {
                status,
                objective: p.objective_value(&x),
                residuals: p.residuals(&x),
                x,
                iterations: 0,
            });
        }
    };
    let (x, iterations, finished) = barrier(p, x0, opts, None);
    Ok(SolveReport {
        status: if finished {
            SolveStatus::Optimal
        } else {
            SolveStatus::MaxIterations
        },
        objective: p.objective_value(&x),
        residuals: p.residuals(&x),
        x,
        iterations,
    })
}

struct Eval {
    value: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

/// `t·(−c·x) + φ(x)`; `None` outside the domain.
fn evaluate(p: &ConvexProgram, x: &[f64], t: f64, derivs: bool, scratch: &mut [f64]) -> Option<Eval> {
    let n = p.num_vars();
    let mut grad = DVector::zeros(if derivs { n } else { 0 });
    let mut hess = DMatrix::zeros(if derivs { n } else { 0 }, if derivs { n } else { 0 });
    let mut value = -t * p.objective_value(x);
    for i in 0..n {
        let (lo, hi) = (p.lower[i], p.upper[i]);
        if lo.is_finite() {
            let d = x[i] - lo;
            if d <= 0.0 {
                return None;
            }
            value -= d.ln();
            if derivs {
                grad[i] -= 1.0 / d;
                hess[(i, i)] += 1.0 / (d * d);
            }
        }
        if hi.is_finite() {
            let d = hi - x[i];
            if d <= 0.0 {
                return None;
            }
            value -= d.ln();
            if derivs {
                grad[i] += 1.0 / d;
                hess[(i, i)] += 1.0 / (d * d);
            }
        }
        if derivs {
            grad[i] -= t * p.objective[i];
        }
    }
    let (mut dummy_g, mut dummy_h) = (DVector::zeros(0), DMatrix::zeros(0, 0));
    for c in &p.constraints {
        let (g, h) = if derivs {
            (&mut grad, &mut hess)
        } else {
            (&mut dummy_g, &mut dummy_h)
        };
        value += c.accumulate(x, derivs, scratch, g, h)?;
    }
    if !value.is_finite() {
        return None;
    }
    Some(Eval { value, grad, hess })
}

/// Newton direction with Jacobi scaling and a regularization fallback.
fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let n = grad.len();
    let d = DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let h = hess[(i, i)];
            if h > 0.0 && h.is_finite() {
                1.0 / h.sqrt()
            } else {
                1.0
            }
        }),
    );
    let mut scaled = hess.clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] *= d[i] * d[j];
        }
    }
    let rhs = -grad.component_mul(&d);
    let mut reg = 0.0;
    for _ in 0..12 {
        let mut m = scaled.clone();
        for i in 0..n {
            m[(i, i)] += reg;
        }
        if let Some(ch) = m.cholesky() {
            let y = ch.solve(&rhs);
            return Some(y.component_mul(&d));
        }
        reg = if reg == 0.0 { 1e-12 } else { reg * 100.0 };
    }
    None
}

/// Barrier weight that best centers `x`: minimizes the Newton decrement of
/// `t·(−c) + ∇φ` over `t`.
fn initial_weight(p: &ConvexProgram, x: &[f64], scratch: &mut [f64]) -> f64 {
    let Some(ev) = evaluate(p, x, 0.0, true, scratch) else {
        return 1.0;
    };
    let c = DVector::from_column_slice(&p.objective);
    let Some(hc) = newton_step(&ev.hess, &c) else {
        return 1.0;
    };
    // newton_step returns −H⁻¹c
    let den = -c.dot(&hc);
    let num = -ev.grad.dot(&hc);
    let t = num / den;
    if t.is_finite() && den > 0.0 {
        t.clamp(1e-8, 1.0)
    } else {
        1.0
    }
}

/// Barrier method from a strictly feasible `x`. Returns the final point, the
/// Newton iteration count and whether the gap target was reached. With
/// `stop_below = Some((i, v))` it returns as soon as a centered `x[i] ≤ v`, or
/// gives up once centering proves `x[i]` cannot drop below `−STRICT_MARGIN`.
fn barrier(
    p: &ConvexProgram,
    mut x: Vec<f64>,
    opts: &SolverOptions,
    stop_below: Option<(usize, f64)>,
) -> (Vec<f64>, usize, bool) {
    let n = p.num_vars();
    let m = p.barrier_degree().max(1.0);
    let mut scratch = vec![0.0; n];
    let mut t = initial_weight(p, &x, &mut scratch);
    let mut iterations = 0;
    loop {
        // centering
        let mut centered = false;
        let mut stalled = 0;
        for _ in 0..200 {
            let Some(ev) = evaluate(p, &x, t, true, &mut scratch) else {
                break;
            };
            let Some(dx) = newton_step(&ev.hess, &ev.grad) else {
                break;
            };
            let decrement = -ev.grad.dot(&dx);
            // below this the Armijo test is decided by rounding in the value
            if !(decrement > 1e-10 && decrement > 1e-13 * ev.value.abs()) {
                centered = true;
                break;
            }
            iterations += 1;
            let mut step = 1.0;
            let mut accepted = None;
            while step > 1e-14 {
                let cand: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + step * d).collect();
                if let Some(v) = evaluate(p, &cand, t, false, &mut scratch) {
                    if v.value <= ev.value - 0.01 * step * decrement {
                        x = cand;
                        accepted = Some(ev.value - v.value);
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some(gain) = accepted else { break };
            stalled = if gain <= 1e-12 * ev.value.abs().max(1.0) {
                stalled + 1
            } else {
                0
            };
            if stalled >= 5 || iterations >= opts.max_newton {
                break;
            }
        }
        if let Some((i, v)) = stop_below {
            if x[i] <= v {
                return (x, iterations, true);
            }
            // centered: the optimum of x[i] is at least x[i] − m/t
            if centered && x[i] - m / t > -STRICT_MARGIN {
                return (x, iterations, false);
            }
            // a clear margin that more weight cannot usefully widen
            if x[i] < -1e3 * STRICT_MARGIN && (!centered || m / t < -x[i]) {
                return (x, iterations, true);
            }
        }
        if m / t <= opts.tol {
            return (x, iterations, true);
        }
        if iterations >= opts.max_newton {
            return (x, iterations, false);
        }
        t *= opts.mu;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn active_box() {
        let mut p = ConvexProgram::new();
        let x = p.add_var("x", 0.0, f64::INFINITY);
        p.set_objective(x, 1.0);
        p.push(
            "x<=3",
            ConstraintKind::Affine {
                a: vec![(x, 1.0)],
                b: -3.0,
            },
        );
        let r = solve(&p, 1e-9).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.x[0] - 3.0).abs() < 1e-8, "{:?}", r.x);
    }

    #[test]
    fn circle_tangency() {
        let mut p = ConvexProgram::new();
        let x = p.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        let z = p.add_var("z", f64::NEG_INFINITY, f64::INFINITY);
        p.set_objective(x, 1.0);
        p.set_objective(z, 1.0);
        p.push(
            "disk",
            ConstraintKind::Quadratic {
                rows: vec![Row::new(vec![(x, 1.0)], 0.0), Row::new(vec![(z, 1.0)], 0.0)],
                a: vec![],
                b: -2.0,
            },
        );
        let r = solve(&p, 1e-10).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
        assert!((r.objective - 2.0).abs() < 1e-8);
    }

    #[test]
    fn single_variable_quadratic_matches_line_search() {
        // maximize z2 s.t. ((x_t − x2) − z2)² ≤ 25 with x2 = 10, x_t = 20, z2 ≤ 100
        let mut p = ConvexProgram::new();
        let z = p.add_var("z2", 1.0, 100.0);
        p.set_objective(z, 1.0);
        p.push(
            "hmin",
            ConstraintKind::Quadratic {
                rows: vec![Row::new(vec![(z, -1.0)], 10.0)],
                a: vec![],
                b: -25.0,
            },
        );
        let r = solve(&p, 1e-10).unwrap();
        let mut best = f64::NEG_INFINITY;
        let mut zz: f64 = 1.0;
        while zz <= 100.0 {
            if (10.0 - zz).powi(2) <= 25.0 {
                best = best.max(zz);
            }
            zz += 1e-3;
        }
        assert!((r.x[0] - 15.0).abs() < 1e-6);
        assert!((r.x[0] - best).abs() < 2e-3);
    }

    #[test]
    fn contradictory_box_is_infeasible() {
        let mut p = ConvexProgram::new();
        p.add_var("x", 1.0, 0.0);
        assert_eq!(phase1_feasible_point(&p), Err(SolveStatus::Infeasible));
        assert_eq!(solve(&p, 1e-8).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn contradictory_constraints_are_infeasible() {
        let mut p = ConvexProgram::new();
        let x = p.add_var("x", -10.0, 10.0);
        p.push(
            "x<=0",
            ConstraintKind::Affine {
                a: vec![(x, 1.0)],
                b: 0.0,
            },
        );
        p.push(
            "x>=1",
            ConstraintKind::Affine {
                a: vec![(x, -1.0)],
                b: 1.0,
            },
        );
        assert_eq!(phase1_feasible_point(&p), Err(SolveStatus::Infeasible));
    }

    #[test]
    fn warm_start_is_returned_unchanged() {
        let mut p = ConvexProgram::new();
        let x = p.add_var("x", 0.0, 10.0);
        let z = p.add_var("z", 0.0, 10.0);
        p.push(
            "cone",
            ConstraintKind::Soc {
                rows: vec![Row::new(vec![(x, 1.0)], 0.0)],
                g: vec![(z, 1.0)],
                h: 0.0,
            },
        );
        p.start = Some(vec![1.25, 3.5]);
        assert_eq!(phase1_feasible_point(&p).unwrap(), vec![1.25, 3.5]);
    }

    #[test]
    fn polynomial_bound() {
        // maximize t s.t. t³ + t − 10 ≤ 0 → t = 2
        let mut p = ConvexProgram::new();
        let t = p.add_var("t", 0.0, 100.0);
        p.set_objective(t, 1.0);
        p.push(
            "cubic",
            ConstraintKind::Poly {
                t: Row::new(vec![(t, 1.0)], 0.0),
                coeffs: vec![-10.0, 1.0, 0.0, 1.0],
                a: vec![],
                b: 0.0,
            },
        );
        let r = solve(&p, 1e-10).unwrap();
        assert!((r.x[0] - 2.0).abs() < 1e-7, "{:?}", r.x);
    }

    #[test]
    fn nonconvex_constraint_is_caught() {
        let mut p = ConvexProgram::new();
        let x = p.add_var("x", -5.0, 5.0);
        p.push(
            "concave",
            ConstraintKind::Poly {
                t: Row::new(vec![(x, 1.0)], 0.0),
                coeffs: vec![0.0, 0.0, -1.0],
                a: vec![],
                b: 0.0,
            },
        );
        assert!(p.check_convexity(64, 1).is_err());
    }

    #[test]
    fn dump_lists_every_constraint() {
        let mut p = ConvexProgram::new();
        let x = p.add_var("x", 0.0, 1.0);
        p.push(
            "a",
            ConstraintKind::Affine {
                a: vec![(x, 1.0)],
                b: -0.5,
            },
        );
        p.push(
            "q",
            ConstraintKind::Quadratic {
                rows: vec![Row::new(vec![(x, 1.0)], 0.0)],
                a: vec![],
                b: -1.0,
            },
        );
        let text = p.dump();
        assert!(text.lines().any(|l| l.starts_with("a: affine")));
        assert!(text.lines().any(|l| l.starts_with("q: quadratic")));
    }

    #[test]
    fn deterministic() {
        let mut p = ConvexProgram::new();
        let x = p.add_var("x", -3.0, 3.0);
        let z = p.add_var("z", -3.0, 3.0);
        p.set_objective(x, 0.3);
        p.set_objective(z, 1.0);
        p.push(
            "ball",
            ConstraintKind::Soc {
                rows: vec![Row::new(vec![(x, 1.0)], 0.2), Row::new(vec![(z, 2.0)], -0.1)],
                g: vec![],
                h: 2.0,
            },
        );
        let a = solve(&p, 1e-9).unwrap();
        let b = solve(&p, 1e-9).unwrap();
        assert_eq!(a, b);
    }
}
