//! Mission, radar, communication and threshold parameters.
//!
//! A scenario file is TOML with four sections: `[mission]`, `[radar]`,
//! `[comm]` and `[thresholds]`. Every scalar may be written as a bare SI number
//! or as a `"<number> <unit>"` string (see [`crate::units`]); the loader
//! normalizes everything to SI-linear once so the math modules never see
//! decibels. Angles are measured from nadir.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{quantity_from_toml, Dimension};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// The reference parameter set bundled with the crate.
pub const REFERENCE_SCENARIO: &str = include_str!("../scenarios/reference.scenario");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionConfig {
    pub num_slots: usize,
    /// Slot length, seconds.
    pub slot_duration: f64,
    /// Along-track speed per slot, m/s.
    pub velocity: Vec<f64>,
    /// Ground-range coordinate of the swath center line, m.
    pub target_x: f64,
    /// Ground station position `(x_g, y_g, z_g)`, m.
    pub ground_station: [f64; 3],
}

impl MissionConfig {
    /// Along-track positions `y[n]`, starting at zero.
    pub fn along_track_positions(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.num_slots);
        let mut acc = 0.0;
        for n in 0..self.num_slots {
            y.push(acc);
            acc += self.velocity[n] * self.slot_duration;
        }
        y
    }

    /// `δt · Σ v_y[n]`, the along-track length swept during the mission.
    pub fn track_length(&self) -> f64 {
        self.slot_duration * self.velocity.iter().sum::<f64>()
    }

    /// Mission duration `N·δt`.
    pub fn duration(&self) -> f64 {
        self.num_slots as f64 * self.slot_duration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadarParams {
    pub sigma0: f64,
    pub p_t: f64,
    pub g_t: f64,
    pub g_r: f64,
    pub wavelength: f64,
    pub tau_prf: f64,
    pub t_sys: f64,
    pub b_rg: f64,
    pub noise_figure: f64,
    pub l_atm: f64,
    pub l_sys: f64,
    pub l_az: f64,
    pub f0: f64,
    pub theta_d: f64,
    pub theta_3db: f64,
}

impl RadarParams {
    pub fn theta_near(&self) -> f64 {
        self.theta_d - 0.5 * self.theta_3db
    }

    pub fn theta_far(&self) -> f64 {
        self.theta_d + 0.5 * self.theta_3db
    }

    /// `B_p = B_rg / f0`.
    pub fn fractional_bandwidth(&self) -> f64 {
        self.b_rg / self.f0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommParams {
    /// FDMA bandwidth per UAV, Hz.
    pub bandwidth: [f64; 2],
    /// Reference channel gain at 1 m over noise power (linear).
    pub gamma: f64,
    pub p_com_max: f64,
    /// Minimum rate per UAV, bit/s.
    pub r_min: [f64; 2],
    pub e_com: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thresholds {
    pub z_min: f64,
    pub z_max: f64,
    pub b_min: f64,
    pub gamma_snr_min: f64,
    pub gamma_rg_min: f64,
    pub h_amb_min: f64,
    pub h_amb_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub mission: MissionConfig,
    pub radar: RadarParams,
    pub comm: CommParams,
    pub thresholds: Thresholds,
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    PComMax,
    HAmbMax,
    GammaSnrMin,
    GammaRgMin,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] = [
        SweepParam::PComMax,
        SweepParam::HAmbMax,
        SweepParam::GammaSnrMin,
        SweepParam::GammaRgMin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::PComMax => "p_com_max",
            SweepParam::HAmbMax => "h_amb_max",
            SweepParam::GammaSnrMin => "gamma_snr_min",
            SweepParam::GammaRgMin => "gamma_rg_min",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            SweepParam::PComMax => Dimension::Power,
            SweepParam::HAmbMax => Dimension::Length,
            SweepParam::GammaSnrMin | SweepParam::GammaRgMin => Dimension::Ratio,
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown sweep parameter `{s}` (expected one of p_com_max, h_amb_max, gamma_snr_min, gamma_rg_min)"
            ))
        })
    }
}

impl ScenarioConfig {
    /// The bundled reference scenario.
    pub fn reference() -> Self {
        Self::from_toml_str(REFERENCE_SCENARIO).expect("bundled scenario is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_with_overrides(path, &[])
    }

    /// Load a scenario file, applying `section.key=value` overrides before
    /// validation.
    pub fn load_with_overrides(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str_with_overrides(&text, overrides)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_str_with_overrides(text, &[])
    }

    pub fn from_toml_str_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg = Self::from_table(&table)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serialize with bare SI numbers; reloading yields identical values.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Stable fingerprint of the numeric content, used to tell runs of
    /// different scenarios apart.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_toml_string().as_bytes());
        digest.iter().take(12).map(|b| format!("{b:02x}")).collect()
    }

    /// Copy of this scenario with one sweep parameter replaced.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Self> {
        let mut s = self.clone();
        match param {
            SweepParam::PComMax => s.comm.p_com_max = value,
            SweepParam::HAmbMax => s.thresholds.h_amb_max = value,
            SweepParam::GammaSnrMin => s.thresholds.gamma_snr_min = value,
            SweepParam::GammaRgMin => s.thresholds.gamma_rg_min = value,
        }
        s.validate()?;
        Ok(s)
    }

    pub fn along_track_positions(&self) -> Vec<f64> {
        self.mission.along_track_positions()
    }

    /// Radar constant `c_n` for 0-based slot `n`:
    ///
    /// `σ0·P_t·G_t·G_r·λ³·c·τ_p·PRF / (4⁴·π³·v_y[n]·k_B·T_sys·B_rg·F·L_atm·L_sys·L_az)`.
    pub fn radar_constant(&self, slot: usize) -> f64 {
        let r = &self.radar;
        let num = r.sigma0 * r.p_t * r.g_t * r.g_r * r.wavelength.powi(3) * SPEED_OF_LIGHT * r.tau_prf;
        let den = 4f64.powi(4)
            * std::f64::consts::PI.powi(3)
            * self.mission.velocity[slot]
            * BOLTZMANN
            * r.t_sys
            * r.b_rg
            * r.noise_figure
            * r.l_atm
            * r.l_sys
            * r.l_az;
        num / den
    }

    pub fn radar_constants(&self) -> Vec<f64> {
        (0..self.mission.num_slots).map(|n| self.radar_constant(n)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.mission;
        if m.num_slots == 0 {
            return Err(Error::validation("mission.num_slots", "must be at least 1"));
        }
        positive("mission.slot_duration", m.slot_duration)?;
        if m.velocity.len() != m.num_slots {
            return Err(Error::validation(
                "mission.velocity",
                format!("expected {} entries, found {}", m.num_slots, m.velocity.len()),
            ));
        }
        for (n, v) in m.velocity.iter().enumerate() {
            positive(&format!("mission.velocity[{n}]"), *v)?;
        }
        finite("mission.target_x", m.target_x)?;
        for (i, g) in m.ground_station.iter().enumerate() {
            finite(&format!("mission.ground_station[{i}]"), *g)?;
        }

        let r = &self.radar;
        for (name, v) in [
            ("radar.sigma0", r.sigma0),
            ("radar.p_t", r.p_t),
            ("radar.g_t", r.g_t),
            ("radar.g_r", r.g_r),
            ("radar.wavelength", r.wavelength),
            ("radar.tau_prf", r.tau_prf),
            ("radar.t_sys", r.t_sys),
            ("radar.b_rg", r.b_rg),
            ("radar.noise_figure", r.noise_figure),
            ("radar.l_atm", r.l_atm),
            ("radar.l_sys", r.l_sys),
            ("radar.l_az", r.l_az),
            ("radar.f0", r.f0),
        ] {
            positive(name, v)?;
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        if !(r.theta_d > 0.0 && r.theta_d < half_pi) {
            return Err(Error::validation("radar.theta_d", "must lie in (0, 90) degrees"));
        }
        if !(r.theta_3db > 0.0 && r.theta_3db < std::f64::consts::PI) {
            return Err(Error::validation("radar.theta_3db", "must lie in (0, 180) degrees"));
        }
        if r.theta_near() <= 0.0 {
            return Err(Error::validation(
                "radar.theta_d/theta_3db",
                "beam crosses nadir: theta_d must exceed theta_3db/2 for side-looking geometry",
            ));
        }
        if r.theta_far() >= half_pi {
            return Err(Error::validation(
                "radar.theta_d/theta_3db",
                "far beam edge reaches the horizon: theta_d + theta_3db/2 must be below 90 degrees",
            ));
        }
        if r.fractional_bandwidth() > 1.0 {
            log::debug!(
                "fractional bandwidth B_rg/f0 = {:.3} exceeds 1; accepted as configured",
                r.fractional_bandwidth()
            );
        }

        let c = &self.comm;
        for i in 0..2 {
            positive(&format!("comm.bandwidth[{i}]"), c.bandwidth[i])?;
            positive(&format!("comm.r_min[{i}]"), c.r_min[i])?;
        }
        positive("comm.gamma", c.gamma)?;
        positive("comm.p_com_max", c.p_com_max)?;
        positive("comm.e_com", c.e_com)?;

        let t = &self.thresholds;
        positive("thresholds.z_min", t.z_min)?;
        finite("thresholds.z_max", t.z_max)?;
        if t.z_min >= t.z_max {
            return Err(Error::validation(
                "thresholds.z_min/z_max",
                format!("z_min ({}) must be strictly below z_max ({})", t.z_min, t.z_max),
            ));
        }
        positive("thresholds.b_min", t.b_min)?;
        for (name, v) in [
            ("thresholds.gamma_snr_min", t.gamma_snr_min),
            ("thresholds.gamma_rg_min", t.gamma_rg_min),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::validation(name, format!("must lie in (0, 1), found {v}")));
            }
        }
        positive("thresholds.h_amb_min", t.h_amb_min)?;
        finite("thresholds.h_amb_max", t.h_amb_max)?;
        if t.h_amb_min >= t.h_amb_max {
            return Err(Error::validation(
                "thresholds.h_amb_min/h_amb_max",
                format!(
                    "h_amb_min ({}) must be strictly below h_amb_max ({})",
                    t.h_amb_min, t.h_amb_max
                ),
            ));
        }
        Ok(())
    }

    fn from_table(table: &toml::Table) -> Result<Self> {
        check_keys(table, "", &["mission", "radar", "comm", "thresholds"])?;
        let mission = section(table, "mission")?;
        let radar = section(table, "radar")?;
        let comm = section(table, "comm")?;
        let thr = section(table, "thresholds")?;

        check_keys(
            mission,
            "mission",
            &["num_slots", "slot_duration", "velocity", "target_x", "ground_station"],
        )?;
        let num_slots = match get(mission, "mission", "num_slots")? {
            toml::Value::Integer(n) if *n >= 1 => *n as usize,
            _ => return Err(Error::validation("mission.num_slots", "must be a positive integer")),
        };
        let velocity = match get(mission, "mission", "velocity")? {
            toml::Value::Array(items) => items
                .iter()
                .enumerate()
                .map(|(n, v)| quantity_from_toml(&format!("mission.velocity[{n}]"), v, Dimension::Speed))
                .collect::<Result<Vec<_>>>()?,
            scalar => vec![quantity_from_toml("mission.velocity", scalar, Dimension::Speed)?; num_slots],
        };
        let ground_station = fixed_array::<3>(mission, "mission", "ground_station", Dimension::Length)?;
        let mission = MissionConfig {
            num_slots,
            slot_duration: scalar(mission, "mission", "slot_duration", Dimension::Time)?,
            velocity,
            target_x: scalar(mission, "mission", "target_x", Dimension::Length)?,
            ground_station,
        };

        const RADAR_KEYS: [&str; 15] = [
            "sigma0",
            "p_t",
            "g_t",
            "g_r",
            "wavelength",
            "tau_prf",
            "t_sys",
            "b_rg",
            "noise_figure",
            "l_atm",
            "l_sys",
            "l_az",
            "f0",
            "theta_d",
            "theta_3db",
        ];
        check_keys(radar, "radar", &RADAR_KEYS)?;
        let rq = |k: &str, d: Dimension| scalar(radar, "radar", k, d);
        let radar = RadarParams {
            sigma0: rq("sigma0", Dimension::Ratio)?,
            p_t: rq("p_t", Dimension::Power)?,
            g_t: rq("g_t", Dimension::Ratio)?,
            g_r: rq("g_r", Dimension::Ratio)?,
            wavelength: rq("wavelength", Dimension::Length)?,
            tau_prf: rq("tau_prf", Dimension::Ratio)?,
            t_sys: rq("t_sys", Dimension::Temperature)?,
            b_rg: rq("b_rg", Dimension::Frequency)?,
            noise_figure: rq("noise_figure", Dimension::Ratio)?,
            l_atm: rq("l_atm", Dimension::Ratio)?,
            l_sys: rq("l_sys", Dimension::Ratio)?,
            l_az: rq("l_az", Dimension::Ratio)?,
            f0: rq("f0", Dimension::Frequency)?,
            theta_d: rq("theta_d", Dimension::Angle)?,
            theta_3db: rq("theta_3db", Dimension::Angle)?,
        };

        check_keys(comm, "comm", &["bandwidth", "gamma", "p_com_max", "r_min", "e_com"])?;
        let comm = CommParams {
            bandwidth: pair(comm, "comm", "bandwidth", Dimension::Frequency)?,
            gamma: scalar(comm, "comm", "gamma", Dimension::Ratio)?,
            p_com_max: scalar(comm, "comm", "p_com_max", Dimension::Power)?,
            r_min: pair(comm, "comm", "r_min", Dimension::DataRate)?,
            e_com: scalar(comm, "comm", "e_com", Dimension::Energy)?,
        };

        check_keys(
            thr,
            "thresholds",
            &[
                "z_min",
                "z_max",
                "b_min",
                "gamma_snr_min",
                "gamma_rg_min",
                "h_amb_min",
                "h_amb_max",
            ],
        )?;
        let tq = |k: &str, d: Dimension| scalar(thr, "thresholds", k, d);
        let thresholds = Thresholds {
            z_min: tq("z_min", Dimension::Length)?,
            z_max: tq("z_max", Dimension::Length)?,
            b_min: tq("b_min", Dimension::Length)?,
            gamma_snr_min: tq("gamma_snr_min", Dimension::Ratio)?,
            gamma_rg_min: tq("gamma_rg_min", Dimension::Ratio)?,
            h_amb_min: tq("h_amb_min", Dimension::Length)?,
            h_amb_max: tq("h_amb_max", Dimension::Length)?,
        };

        Ok(ScenarioConfig {
            mission,
            radar,
            comm,
            thresholds,
        })
    }
}

/// Apply one `section.key=value` override to a parsed scenario table. The
/// value is read as a TOML literal when possible, otherwise as a string, so
/// both `thresholds.b_min=1e6` and `comm.p_com_max=10 dBm` work.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::InvalidArgument(format!("override `{spec}` is not section.key=value")))?;
    let (sec, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| Error::InvalidArgument(format!("override key `{path}` is not section.key")))?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let section = table
        .entry(sec.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        .as_table_mut()
        .ok_or_else(|| Error::Parse(format!("`{sec}` is not a section")))?;
    section.insert(key.to_string(), value);
    Ok(())
}

fn section<'a>(table: &'a toml::Table, name: &str) -> Result<&'a toml::Table> {
    table
        .get(name)
        .ok_or_else(|| Error::Parse(format!("missing section [{name}]")))?
        .as_table()
        .ok_or_else(|| Error::Parse(format!("[{name}] must be a table")))
}

fn check_keys(table: &toml::Table, sec: &str, allowed: &[&str]) -> Result<()> {
    let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
    for key in table.keys() {
        if !allowed.contains(key.as_str()) {
            let where_ = if sec.is_empty() {
                "top level".to_string()
            } else {
                format!("[{sec}]")
            };
            return Err(Error::Parse(format!("unknown key `{key}` in {where_}")));
        }
    }
    Ok(())
}

fn get<'a>(table: &'a toml::Table, sec: &str, key: &str) -> Result<&'a toml::Value> {
    table
        .get(key)
        .ok_or_else(|| Error::Parse(format!("missing key `{sec}.{key}`")))
}

fn scalar(table: &toml::Table, sec: &str, key: &str, dim: Dimension) -> Result<f64> {
    quantity_from_toml(&format!("{sec}.{key}"), get(table, sec, key)?, dim)
}

fn fixed_array<const K: usize>(table: &toml::Table, sec: &str, key: &str, dim: Dimension) -> Result<[f64; K]> {
    let field = format!("{sec}.{key}");
    let items = get(table, sec, key)?
        .as_array()
        .ok_or_else(|| Error::validation(&field, format!("expected an array of {K} values")))?;
    if items.len() != K {
        return Err(Error::validation(
            &field,
            format!("expected {K} values, found {}", items.len()),
        ));
    }
    let mut out = [0.0; K];
    for (i, v) in items.iter().enumerate() {
        out[i] = quantity_from_toml(&format!("{field}[{i}]"), v, dim)?;
    }
    Ok(out)
}

// A per-UAV pair; a scalar applies to both UAVs.
fn pair(table: &toml::Table, sec: &str, key: &str, dim: Dimension) -> Result<[f64; 2]> {
    match get(table, sec, key)? {
        toml::Value::Array(_) => fixed_array::<2>(table, sec, key, dim),
        v => {
            let x = quantity_from_toml(&format!("{sec}.{key}"), v, dim)?;
            Ok([x, x])
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("must be strictly positive, found {v}"),
        ))
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, "must be finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let s = ScenarioConfig::reference();
        assert_eq!(s.mission.target_x, 20.0);
        assert_eq!(s.thresholds.z_max, 100.0);
        assert_eq!(s.mission.slot_duration, 0.5);
        assert_eq!(s.mission.num_slots, 100);
        assert!((s.radar.p_t - 0.031_622_776_601_683_79).abs() < 1e-15);
        assert!((s.radar.fractional_bandwidth() - 1.2).abs() < 1e-12);
        assert!((s.comm.gamma - 100.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_altitude_interval_is_rejected() {
        let err = ScenarioConfig::from_toml_str_with_overrides(REFERENCE_SCENARIO, &["thresholds.z_min=100".into()])
            .unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "thresholds.z_min/z_max"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn unknown_keys_and_missing_sections() {
        let bad = REFERENCE_SCENARIO.replace("tau_prf", "tau_prff");
        assert!(matches!(ScenarioConfig::from_toml_str(&bad), Err(Error::Parse(_))));
        let missing = REFERENCE_SCENARIO.replace("[comm]", "[communication]");
        assert!(matches!(ScenarioConfig::from_toml_str(&missing), Err(Error::Parse(_))));
        assert!(matches!(
            ScenarioConfig::from_toml_str("[mission"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn nadir_crossing_beam_is_rejected() {
        let err = ScenarioConfig::from_toml_str_with_overrides(REFERENCE_SCENARIO, &["radar.theta_d=10 deg".into()])
            .unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    #[test]
    fn along_track_examples() {
        let mut s = ScenarioConfig::reference();
        let y = s.along_track_positions();
        assert_eq!(y.len(), 100);
        assert_eq!(y[0], 0.0);
        assert_eq!(y[99], 99.0);
        for (n, v) in y.iter().enumerate() {
            assert_eq!(*v, n as f64);
        }

        s.mission.num_slots = 1;
        s.mission.velocity = vec![2.0];
        assert_eq!(s.along_track_positions(), vec![0.0]);

        s.mission.num_slots = 2;
        s.mission.velocity = vec![1.0, 3.0];
        assert_eq!(s.along_track_positions(), vec![0.0, 0.5]);
    }

    #[test]
    fn radar_constant_scaling() {
        let base = ScenarioConfig::reference();
        let mut fast = base.clone();
        fast.mission.velocity[0] = 4.0;
        let ratio = base.radar_constant(0) / fast.radar_constant(0);
        assert!((ratio - 2.0).abs() < 1e-12);

        let mut lossless = base.clone();
        lossless.radar.l_atm = 1.0;
        lossless.radar.l_sys = 1.0;
        lossless.radar.l_az = 1.0;
        let mut lossy = lossless.clone();
        lossy.radar.l_sys = 2.0;
        assert_eq!(lossless.radar_constant(0) / lossy.radar_constant(0), 2.0);
    }

    #[test]
    fn overrides_accept_unit_strings() {
        let s = ScenarioConfig::from_toml_str_with_overrides(
            REFERENCE_SCENARIO,
            &["comm.p_com_max=10 dBm".into(), "thresholds.b_min=1e6".into()],
        );
        // b_min is only checked for positivity here
        let s = s.unwrap();
        assert!((s.comm.p_com_max - 0.01).abs() < 1e-15);
        assert_eq!(s.thresholds.b_min, 1e6);
    }

    #[test]
    fn sweep_param_names() {
        for p in SweepParam::ALL {
            assert_eq!(p.name().parse::<SweepParam>().unwrap(), p);
        }
        assert!("altitude".parse::<SweepParam>().is_err());
    }
}
