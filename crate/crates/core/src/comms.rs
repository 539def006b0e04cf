//! FDMA line-of-sight links from each UAV to the ground station.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Position;
use crate::scenario::{MissionConfig, ScenarioConfig};

/// Per-slot transmit power of one UAV, watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSchedule {
    pub p: Vec<f64>,
}

impl PowerSchedule {
    pub fn new(p: Vec<f64>) -> Self {
        PowerSchedule { p }
    }

    pub fn constant(value: f64, n: usize) -> Self {
        PowerSchedule { p: vec![value; n] }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn energy(&self, slot_duration: f64) -> f64 {
        self.p.iter().sum::<f64>() * slot_duration
    }

    pub fn max(&self) -> f64 {
        self.p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// UAV-to-ground-station distance per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGeometry {
    pub d: Vec<f64>,
}

pub fn link_distances(q: Position, m: &MissionConfig) -> LinkGeometry {
    let [gx, gy, gz] = m.ground_station;
    let d = m
        .along_track_positions()
        .into_iter()
        .map(|y| ((q.x - gx).powi(2) + (y - gy).powi(2) + (q.z - gz).powi(2)).sqrt())
        .collect();
    LinkGeometry { d }
}

/// Shannon rate `B·log2(1 + pγ/d²)`, bits/s.
pub fn throughput(p: f64, d: f64, bandwidth: f64, gamma: f64) -> f64 {
    bandwidth * (p * gamma / (d * d)).ln_1p() / std::f64::consts::LN_2
}

/// Smallest power meeting `rate`: `(2^(R/B) − 1)·d²/γ`.
pub fn min_power(rate: f64, d: f64, bandwidth: f64, gamma: f64) -> f64 {
    rate_factor(rate, bandwidth) * d * d / gamma
}

/// `2^(R/B) − 1`, evaluated without cancellation for small `R/B`.
pub fn rate_factor(rate: f64, bandwidth: f64) -> f64 {
    (rate / bandwidth * std::f64::consts::LN_2).exp_m1()
}

/// `κ_i = (2^(R_min,i/B_i) − 1)/γ`, so that the minimum power is `κ_i·d²`.
pub fn power_coefficient(s: &ScenarioConfig, uav: usize) -> f64 {
    rate_factor(s.comm.r_min[uav], s.comm.bandwidth[uav]) / s.comm.gamma
}

/// The pointwise-smallest schedule meeting the rate floor of UAV `uav`
/// (0 = master, 1 = slave).
pub fn min_energy_schedule(lg: &LinkGeometry, s: &ScenarioConfig, uav: usize) -> PowerSchedule {
    let (rate, b, g) = (s.comm.r_min[uav], s.comm.bandwidth[uav], s.comm.gamma);
    PowerSchedule::new(lg.d.iter().map(|&d| min_power(rate, d, b, g)).collect())
}

pub fn min_energy_schedule_at(q: Position, s: &ScenarioConfig, uav: usize) -> PowerSchedule {
    min_energy_schedule(&link_distances(q, &s.mission), s, uav)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerCheck {
    /// `0 ≤ p[n] ≤ P_max` at every slot.
    pub c9: bool,
    /// `Σ p[n]·δt ≤ E_com`.
    pub c11: bool,
    /// Worst-slot margin `min_n min(p[n], P_max − p[n])`, watts.
    pub c9_slack: f64,
    /// `E_com − Σ p[n]·δt`, joules.
    pub c11_slack: f64,
}

pub fn check_power_constraints(p: &PowerSchedule, s: &ScenarioConfig) -> PowerCheck {
    let pmax = s.comm.p_com_max;
    let c9_slack = p.p.iter().map(|&v| v.min(pmax - v)).fold(f64::INFINITY, f64::min);
    let c11_slack = s.comm.e_com - p.energy(s.mission.slot_duration);
    PowerCheck {
        c9: c9_slack >= 0.0,
        c11: c11_slack >= 0.0,
        c9_slack,
        c11_slack,
    }
}

/// Worst-slot margin of the rate floor in power form, `min_n p[n] − p_min[n]`.
pub fn rate_slack(p: &PowerSchedule, q: Position, s: &ScenarioConfig, uav: usize) -> f64 {
    let need = min_energy_schedule_at(q, s, uav);
    p.p.iter()
        .zip(&need.p)
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min)
}

/// Write the schedules as CSV: `slot,p1_watts,p2_watts,rate1,rate2`, slots
/// numbered from 1.
pub fn write_schedules_csv<W: Write>(
    out: W,
    s: &ScenarioConfig,
    q1: Position,
    q2: Position,
    p1: &PowerSchedule,
    p2: &PowerSchedule,
) -> Result<()> {
    let d1 = link_distances(q1, &s.mission);
    let d2 = link_distances(q2, &s.mission);
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Output(e.to_string());
    w.write_record(["slot", "p1_watts", "p2_watts", "rate1", "rate2"])
        .map_err(io)?;
    for n in 0..s.mission.num_slots {
        let r1 = throughput(p1.p[n], d1.d[n], s.comm.bandwidth[0], s.comm.gamma);
        let r2 = throughput(p2.p[n], d2.d[n], s.comm.bandwidth[1], s.comm.gamma);
        w.write_record([
            (n + 1).to_string(),
            p1.p[n].to_string(),
            p2.p[n].to_string(),
            r1.to_string(),
            r2.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn link_distance_examples() {
        let mut s = ScenarioConfig::reference();
        s.mission.ground_station = [0.0, 0.0, 0.0];
        let lg = link_distances(Position::new(3.0, 4.0), &s.mission);
        assert_eq!(lg.d[0], 5.0);
        assert!(lg.d.windows(2).all(|w| w[1] >= w[0]));

        let s = ScenarioConfig::reference();
        let lg = link_distances(Position::new(-80.0, 100.0), &s.mission);
        let expect = (13f64 * 13.0 + 93.0 * 93.0 + 98.0 * 98.0).sqrt();
        assert!((lg.d[0] - expect).abs() < 1e-12);
        assert!((lg.d[0] - 135.7277).abs() < 5e-4);
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(throughput(0.0, 10.0, 1e9, 100.0), 0.0);
        assert!(rel(throughput(0.01, 1.0, 1e9, 100.0), 1e9) < 1e-12);
        assert!(rel(throughput(0.03, 1.0, 1e9, 100.0), 2e9) < 1e-12);
    }

    #[test]
    fn min_power_examples() {
        assert_eq!(min_power(0.0, 50.0, 1e9, 100.0), 0.0);
        assert!(rel(min_power(1e9, 7.0, 1e9, 100.0), 49.0 / 100.0) < 1e-12);
        let p = min_power(1e6, 141.0, 1e9, 100.0);
        let longhand = (2f64.powf(0.001) - 1.0) * 141.0 * 141.0 / 100.0;
        assert!(rel(p, longhand) < 1e-9);
        assert!((p - 0.13787).abs() < 5e-5);
        assert!(rel(throughput(p, 141.0, 1e9, 100.0), 1e6) < 1e-9);
    }

    #[test]
    fn schedule_examples() {
        let mut s = ScenarioConfig::reference();
        let lg = LinkGeometry {
            d: vec![40.0; s.mission.num_slots],
        };
        let sched = min_energy_schedule(&lg, &s, 0);
        assert!(sched.p.iter().all(|&p| p == sched.p[0]));

        let q = Position::new(-80.0, 100.0);
        let sched = min_energy_schedule_at(q, &s, 0);
        assert!(sched.p.windows(2).all(|w| w[1] >= w[0]));
        // trapezoid-free slot sum recomputed from scratch
        let y = s.along_track_positions();
        let mut total = 0.0;
        for yn in y {
            let d2 = (q.x + 93.0).powi(2) + (yn + 93.0).powi(2) + (q.z - 2.0).powi(2);
            total += (2f64.powf(1e6 / 1e9) - 1.0) * d2 / 100.0 * 0.5;
        }
        assert!(rel(sched.energy(0.5), total) < 1e-9);

        s.comm.p_com_max = 1.0;
        let zero = PowerSchedule::constant(0.0, s.mission.num_slots);
        let chk = check_power_constraints(&zero, &s);
        assert!(chk.c9 && chk.c11);

        let mut over = zero.clone();
        over.p[3] = 2.0;
        let chk = check_power_constraints(&over, &s);
        assert!(!chk.c9);
        assert_eq!(chk.c9_slack, -1.0);

        let exact = PowerSchedule::constant(s.comm.e_com / (100.0 * 0.5), 100);
        s.comm.p_com_max = 100.0;
        let chk = check_power_constraints(&exact, &s);
        assert!(chk.c11);
        assert!(chk.c11_slack.abs() < 1e-12);
    }
}
