//! Run reports and their on-disk forms.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::comms::PowerSchedule;
use crate::error::{Error, Result};
use crate::geometry::{coverage, Formation};
use crate::metrics::{metrics, FeasibilityReport};
use crate::sca::{objective_tilde, Mode, State};
use crate::scenario::ScenarioConfig;

/// One outer alternation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoRecord {
    pub iteration: usize,
    pub objective: f64,
    pub formation: Formation,
    pub slave_iterations: usize,
    pub master_iterations: usize,
    pub p1: PowerSchedule,
    pub p2: PowerSchedule,
    pub constraints: FeasibilityReport,
}

/// One accepted inner iterate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub subproblem: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedules {
    pub p1_watts: Vec<f64>,
    pub p2_watts: Vec<f64>,
}

/// Everything that varies between otherwise identical runs lives here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub generated_unix_s: u64,
    pub tool_version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: Mode,
    pub scenario_fingerprint: String,
    pub converged: bool,
    /// Whether the starting point came from the repair grid.
    pub init_repaired: bool,
    pub outer_iterations: usize,
    pub formation: Formation,
    pub objective_tilde: f64,
    pub coverage_m2: f64,
    pub b_perp_m: f64,
    pub h_amb_m: f64,
    pub baseline_m: f64,
    pub gamma_rg: f64,
    pub min_gamma_snr: f64,
    pub energy_j: [f64; 2],
    pub constraints: FeasibilityReport,
    pub schedules: Schedules,
    pub trace: Vec<AoRecord>,
    pub inner_trace: Vec<TraceRow>,
    pub metadata: Metadata,
}

impl RunReport {
    pub(crate) fn new(
        s: &ScenarioConfig,
        mode: Mode,
        st: &State,
        converged: bool,
        init_repaired: bool,
        trace: Vec<AoRecord>,
        inner_trace: Vec<TraceRow>,
    ) -> Self {
        let f = st.formation(s);
        let m = metrics(&f, s);
        let dt = s.mission.slot_duration;
        RunReport {
            mode,
            scenario_fingerprint: s.fingerprint(),
            converged,
            init_repaired,
            outer_iterations: trace.len(),
            formation: f,
            objective_tilde: objective_tilde(&f, &s.radar),
            coverage_m2: coverage(&f, &s.mission, &s.radar),
            b_perp_m: m.b_perp,
            h_amb_m: m.h_amb,
            baseline_m: m.baseline,
            gamma_rg: m.gamma_rg,
            min_gamma_snr: m.gamma_snr.iter().copied().fold(f64::INFINITY, f64::min),
            energy_j: [st.p1.energy(dt), st.p2.energy(dt)],
            constraints: st.feasibility(s),
            schedules: Schedules {
                p1_watts: st.p1.p.clone(),
                p2_watts: st.p2.p.clone(),
            },
            trace,
            inner_trace,
            metadata: Metadata {
                generated_unix_s: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                tool_version: env!("CARGO_PKG_VERSION"),
            },
        }
    }

    pub fn power_schedules(&self) -> (PowerSchedule, PowerSchedule) {
        (
            PowerSchedule::new(self.schedules.p1_watts.clone()),
            PowerSchedule::new(self.schedules.p2_watts.clone()),
        )
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// `iteration,objective,subproblem`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Output(e.to_string());
        w.write_record(["iteration", "objective", "subproblem"]).map_err(io)?;
        for r in &self.inner_trace {
            w.write_record([r.iteration.to_string(), r.objective.to_string(), r.subproblem.clone()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Output(e.to_string()))?;
        Ok(())
    }

    pub fn write_schedules_csv<W: Write>(&self, s: &ScenarioConfig, out: W) -> Result<()> {
        let (p1, p2) = self.power_schedules();
        crate::comms::write_schedules_csv(out, s, self.formation.q1, self.formation.q2, &p1, &p2)
    }
}
