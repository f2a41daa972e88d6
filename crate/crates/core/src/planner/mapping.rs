//! Front-view to top-view coordinate mapping.
//!
//! Plans arrive in the front-view frame used by object descriptions; the
//! executor consumes top-view coordinates. The two frames are related by an
//! independent affine map per axis:
//!
//! ```text
//! x = a_u * u + b_u
//! y = a_v * v + b_v
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error("non-invertible calibration: {axis} scale is {scale}")]
    NonInvertible { axis: &'static str, scale: f64 },
    #[error("non-finite calibration coefficient")]
    NonFinite,
}

/// Per-axis affine calibration from the front view `(u, v)` to the top
/// view `(x, y)`. Always invertible once constructed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Affine2 {
    a_u: f64,
    b_u: f64,
    a_v: f64,
    b_v: f64,
}

impl Affine2 {
    pub const IDENTITY: Affine2 = Affine2 {
        a_u: 1.0,
        b_u: 0.0,
        a_v: 1.0,
        b_v: 0.0,
    };

    pub fn new(a_u: f64, b_u: f64, a_v: f64, b_v: f64) -> Result<Self, CalibrationError> {
        if ![a_u, b_u, a_v, b_v].iter().all(|c| c.is_finite()) {
            return Err(CalibrationError::NonFinite);
        }
        if a_u == 0.0 {
            return Err(CalibrationError::NonInvertible { axis: "u", scale: a_u });
        }
        if a_v == 0.0 {
            return Err(CalibrationError::NonInvertible { axis: "v", scale: a_v });
        }
        Ok(Self { a_u, b_u, a_v, b_v })
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.a_u, self.b_u, self.a_v, self.b_v]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Front view to top view, without clamping.
    pub fn apply(&self, front: Point) -> Point {
        Point::new(self.a_u * front.x + self.b_u, self.a_v * front.y + self.b_v)
    }

    /// Top view to front view.
    pub fn invert(&self, top: Point) -> Point {
        Point::new((top.x - self.b_u) / self.a_u, (top.y - self.b_v) / self.a_v)
    }
}

impl Default for Affine2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl TryFrom<[f64; 4]> for Affine2 {
    type Error = CalibrationError;

    fn try_from(c: [f64; 4]) -> Result<Self, Self::Error> {
        Affine2::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Affine2> for [f64; 4] {
    fn from(a: Affine2) -> Self {
        a.coefficients()
    }
}

/// A top-view point produced by [`map_point`], flagged when the raw image
/// fell outside the workspace and had to be clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedPoint {
    pub point: Point,
    pub clamped: bool,
}

pub fn map_point(cal: &Affine2, front: Point) -> MappedPoint {
    let raw = cal.apply(front);
    let point = raw.clamp_unit();
    MappedPoint {
        point,
        clamped: point != raw,
    }
}

pub fn unmap_point(cal: &Affine2, top: Point) -> Point {
    cal.invert(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_a_no_op() {
        let m = map_point(&Affine2::IDENTITY, Point::new(0.3, 0.7));
        assert_eq!(m.point, Point::new(0.3, 0.7));
        assert!(!m.clamped);
    }

    #[test]
    fn flipped_v_axis() {
        let cal = Affine2::new(1.0, 0.0, -1.0, 1.0).unwrap();
        let m = map_point(&cal, Point::new(0.2, 0.2));
        assert_eq!(m.point, Point::new(0.2, 0.8));
        assert!(unmap_point(&cal, m.point).distance(Point::new(0.2, 0.2)) < 1e-12);
    }

    #[test]
    fn out_of_range_is_clamped_and_flagged() {
        let cal = Affine2::new(2.0, 0.0, 1.0, 0.0).unwrap();
        let m = map_point(&cal, Point::new(0.9, -0.1));
        assert_eq!(m.point, Point::new(1.0, 0.0));
        assert!(m.clamped);
    }

    #[test]
    fn zero_scale_rejected_at_construction() {
        assert!(matches!(
            Affine2::new(0.0, 0.1, 1.0, 0.0),
            Err(CalibrationError::NonInvertible { axis: "u", .. })
        ));
        assert!(Affine2::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert_eq!(Affine2::new(f64::NAN, 0.0, 1.0, 0.0), Err(CalibrationError::NonFinite));
        assert!(serde_json::from_str::<Affine2>("[1.0, 0.0, 0.0, 0.0]").is_err());
    }

    #[test]
    fn serializes_as_coefficient_array() {
        let cal = Affine2::new(0.5, 0.25, -1.0, 1.0).unwrap();
        assert_eq!(serde_json::to_string(&cal).unwrap(), "[0.5,0.25,-1.0,1.0]");
    }
}
