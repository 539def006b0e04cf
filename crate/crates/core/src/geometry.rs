//! Across-track plane geometry.
//!
//! Coordinates are `(x, z)`: ground range and altitude, flat ground at `z = 0`.
//! All look angles are measured from the vertical, so a UAV at `(x, z)` looking
//! at ground point `x_t` has `tan θ = (x_t − x)/z`.

use serde::{Deserialize, Serialize};

use crate::scenario::{MissionConfig, RadarParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, z: f64) -> Self {
        Position { x, z }
    }

    pub fn distance(self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.z - other.z)
    }
}

/// Master `q1` and slave `q2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formation {
    pub q1: Position,
    pub q2: Position,
}

impl Formation {
    pub const fn new(q1: Position, q2: Position) -> Self {
        Formation { q1, q2 }
    }

    /// Master placed by the centering rule at altitude `z1`, slave at `q2`.
    pub fn with_master_altitude(z1: f64, q2: Position, x_t: f64, theta_d: f64) -> Self {
        Formation {
            q1: Position::new(master_x_for(z1, x_t, theta_d), z1),
            q2,
        }
    }

    pub fn is_airborne(&self) -> bool {
        self.q1.z > 0.0 && self.q2.z > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FootprintInterval {
    pub near: f64,
    pub far: f64,
}

impl FootprintInterval {
    pub fn width(&self) -> f64 {
        self.far - self.near
    }
}

pub fn baseline(f: &Formation) -> f64 {
    f.q1.distance(f.q2)
}

pub fn footprint(q: Position, r: &RadarParams) -> FootprintInterval {
    FootprintInterval {
        near: q.x + r.theta_near().tan() * q.z,
        far: q.x + r.theta_far().tan() * q.z,
    }
}

/// Signed overlap of the two footprints, `min(far) − max(near)`. Negative when
/// the footprints are disjoint.
pub fn signed_overlap(f: &Formation, r: &RadarParams) -> f64 {
    let a = footprint(f.q1, r);
    let b = footprint(f.q2, r);
    a.far.min(b.far) - a.near.max(b.near)
}

/// Usable swath width: the overlap of both footprints, clamped at zero.
pub fn swath(f: &Formation, r: &RadarParams) -> f64 {
    signed_overlap(f, r).max(0.0)
}

/// Total covered area `S · δt · Σ v_y[n]`.
pub fn coverage(f: &Formation, m: &MissionConfig, r: &RadarParams) -> f64 {
    swath(f, r) * m.track_length()
}

/// `(r1, r2)`, slant ranges from each UAV to the ground point `x_t`.
pub fn slant_ranges(f: &Formation, x_t: f64) -> (f64, f64) {
    (slant_range(f.q1, x_t), slant_range(f.q2, x_t))
}

pub fn slant_range(q: Position, x_t: f64) -> f64 {
    (q.x - x_t).hypot(q.z)
}

/// Master ground-range position that centers its beam on `x_t`.
pub fn master_x_for(z1: f64, x_t: f64, theta_d: f64) -> f64 {
    x_t - z1 * theta_d.tan()
}

/// Under the centering rule the master always looks along the boresight, so
/// `θ1 = θ_d` independently of altitude.
pub fn look_angle_master(theta_d: f64) -> f64 {
    theta_d
}

/// Actual master look angle for an arbitrary master position.
pub fn look_angle(q: Position, x_t: f64) -> f64 {
    (x_t - q.x).atan2(q.z)
}

/// `sin θ2 = (x_t − x2)/r2`.
pub fn sin_look_angle_slave(q2: Position, x_t: f64) -> f64 {
    let r2 = slant_range(q2, x_t);
    if r2 == 0.0 {
        return 0.0;
    }
    (x_t - q2.x) / r2
}

/// Signed offset `D = (x_t − x2) − tan θ1 · z2` of the slave from the master
/// line of sight, measured horizontally. `b⊥ = |D| cos θ1`.
pub fn los_offset(q2: Position, x_t: f64, theta1: f64) -> f64 {
    (x_t - q2.x) - theta1.tan() * q2.z
}

/// Distance of the slave from the master line of sight; it does not depend
/// on where along that line the master sits.
pub fn perpendicular_baseline(q2: Position, x_t: f64, theta1: f64) -> f64 {
    let t = theta1.tan();
    los_offset(q2, x_t, theta1).abs() / (t * t + 1.0).sqrt()
}

/// Orthogonal projection of the slave onto the master line of sight, the line
/// through `(x_t, 0)` leaning away from the target by `θ1` from the vertical.
pub fn projection_point(q2: Position, x_t: f64, theta1: f64) -> Position {
    let (s, c) = theta1.sin_cos();
    // unit direction from the ground point up towards the master
    let along = (x_t - q2.x) * s + q2.z * c;
    Position::new(x_t - along * s, along * c)
}
