//! Unit-tagged scalar parsing for scenario files.
//!
//! A scenario value is either a bare number, taken to be SI-linear already, or a
//! string of the form `"<number> <unit>"`. Logarithmic units are converted to
//! linear values here so that nothing downstream ever sees decibels.

use crate::error::{Error, Result};

/// Physical dimension a scenario field is expected to carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Dimensionless linear ratio (gains, losses, noise factor, backscatter).
    Ratio,
    Power,
    Length,
    Time,
    Angle,
    Frequency,
    Temperature,
    DataRate,
    Energy,
    Speed,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Ratio => "ratio",
            Dimension::Power => "power",
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Angle => "angle",
            Dimension::Frequency => "frequency",
            Dimension::Temperature => "temperature",
            Dimension::DataRate => "data rate",
            Dimension::Energy => "energy",
            Dimension::Speed => "speed",
        }
    }
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Parse `"<number> <unit>"` (whitespace between the two is optional) into an
/// SI-linear value of the requested dimension.
pub fn parse_quantity(text: &str, dim: Dimension) -> std::result::Result<f64, String> {
    let text = text.trim();
    let split = text
        .char_indices()
        .find(|&(i, c)| c.is_alphabetic() && !(matches!(c, 'e' | 'E') && number_continues(text, i)))
        .map(|(i, _)| i)
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse number in `{text}`"))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Ok(value);
    }
    convert(value, unit, dim).ok_or_else(|| format!("unit `{unit}` is not a valid {} unit", dim.name()))
}

// An `e`/`E` followed by a digit or sign is an exponent, not the start of a unit.
fn number_continues(text: &str, i: usize) -> bool {
    let rest = &text[i + 1..];
    let prev_is_digit = text[..i].chars().last().is_some_and(|c| c.is_ascii_digit() || c == '.');
    prev_is_digit
        && rest
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+')
}

fn convert(v: f64, unit: &str, dim: Dimension) -> Option<f64> {
    use Dimension::*;
    let out = match (dim, unit) {
        // sigma0 is printed in dBm² but is a normalized coefficient; all of
        // these are plain decibels of a linear ratio.
        (Ratio, "dB" | "dBi" | "dBm2" | "dBm²" | "dBsm") => db_to_linear(v),
        (Ratio, "linear" | "x") => v,

        (Power, "W") => v,
        (Power, "mW") => v * 1e-3,
        (Power, "kW") => v * 1e3,
        (Power, "dBW") => db_to_linear(v),
        (Power, "dBm") => db_to_linear(v) * 1e-3,

        (Length, "m") => v,
        (Length, "km") => v * 1e3,
        (Length, "cm") => v * 1e-2,
        (Length, "mm") => v * 1e-3,

        (Time, "s") => v,
        (Time, "ms") => v * 1e-3,
        (Time, "min") => v * 60.0,

        (Angle, "rad") => v,
        (Angle, "deg" | "°") => v.to_radians(),

        (Frequency, "Hz") => v,
        (Frequency, "kHz") => v * 1e3,
        (Frequency, "MHz") => v * 1e6,
        (Frequency, "GHz") => v * 1e9,

        (Temperature, "K") => v,

        (DataRate, "bit/s" | "bps") => v,
        (DataRate, "kbit/s" | "kbps") => v * 1e3,
        (DataRate, "Mbit/s" | "Mbps" | "Mbits") => v * 1e6,
        (DataRate, "Gbit/s" | "Gbps") => v * 1e9,

        (Energy, "J") => v,
        (Energy, "kJ") => v * 1e3,
        (Energy, "Wh") => v * 3600.0,

        (Speed, "m/s") => v,
        (Speed, "km/h") => v / 3.6,

        _ => return None,
    };
    Some(out)
}

/// Read a TOML value (number or unit-tagged string) as a quantity.
pub fn quantity_from_toml(field: &str, value: &toml::Value, dim: Dimension) -> Result<f64> {
    let v = match value {
        toml::Value::Float(f) => *f,
        toml::Value::Integer(i) => *i as f64,
        toml::Value::String(s) => parse_quantity(s, dim).map_err(|reason| Error::validation(field, reason))?,
        other => {
            return Err(Error::validation(
                field,
                format!("expected a number or unit string, found {}", other.type_str()),
            ))
        }
    };
    if !v.is_finite() {
        return Err(Error::validation(field, "value must be finite"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_to_watts() {
        let p = parse_quantity("15 dBm", Dimension::Power).unwrap();
        // 10^(15/10) mW = 31.6227766 mW
        assert!((p - 0.031_622_776_601_683_79).abs() < 1e-15);
    }

    #[test]
    fn negative_db_and_exponents() {
        let s = parse_quantity("-5 dBm2", Dimension::Ratio).unwrap();
        assert!((s - 10f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(parse_quantity("1e6 bit/s", Dimension::DataRate).unwrap(), 1e6);
        assert_eq!(parse_quantity("2.5e-3", Dimension::Length).unwrap(), 2.5e-3);
        assert_eq!(parse_quantity("3GHz", Dimension::Frequency).unwrap(), 3e9);
    }

    #[test]
    fn unit_dimension_mismatch() {
        assert!(parse_quantity("3 GHz", Dimension::Power).is_err());
        assert!(parse_quantity("abc", Dimension::Length).is_err());
    }

    #[test]
    fn angles() {
        let a = parse_quantity("45 deg", Dimension::Angle).unwrap();
        assert!((a - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }
}
