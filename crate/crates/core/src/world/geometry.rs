//! Planar primitives for the top-view workspace.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A coordinate pair in workspace fractions.
///
/// `x` grows rightward and `y` grows away from the robot. Membership in the
/// unit square is checked where points enter an operation, not here.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn in_unit_square(self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    /// Clamps each coordinate into `[lo, hi]`.
    pub fn clamp(self, lo: f64, hi: f64) -> Point {
        Point::new(self.x.clamp(lo, hi), self.y.clamp(lo, hi))
    }

    pub fn clamp_unit(self) -> Point {
        self.clamp(0.0, 1.0)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x, y] = <[f64; 2]>::deserialize(deserializer)?;
        Ok(Point { x, y })
    }
}

/// Normalizes an angle in degrees to `[0, 360)`.
pub fn normalize_deg(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Smallest absolute difference between two headings, in `[0, 180]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = normalize_deg(a - b);
    d.min(360.0 - d)
}

/// Whether `p` lies in the rectangle with the given center, half-extents
/// and rotation (degrees, counter-clockwise). Boundary points count as
/// inside.
pub fn rotated_rect_contains(center: Point, half: (f64, f64), rotation_deg: f64, p: Point) -> bool {
    let (s, c) = rotation_deg.to_radians().sin_cos();
    let dx = p.x - center.x;
    let dy = p.y - center.y;
    // rotate into the rectangle's frame
    let lx = c * dx + s * dy;
    let ly = -s * dx + c * dy;
    lx.abs() <= half.0 + 1e-12 && ly.abs() <= half.1 + 1e-12
}

/// Half-extents of the axis-aligned box enclosing a rotated rectangle.
pub fn rotated_bounds(half: (f64, f64), rotation_deg: f64) -> (f64, f64) {
    let (s, c) = rotation_deg.to_radians().sin_cos();
    (half.0 * c.abs() + half.1 * s.abs(), half.0 * s.abs() + half.1 * c.abs())
}

/// Euclidean distance from `p` to the closed segment `a`–`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let vx = b.x - a.x;
    let vy = b.y - a.y;
    let len2 = vx * vx + vy * vy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * vx, a.y + t * vy))
}

fn orientation(p: Point, q: Point, r: Point) -> i8 {
    let val = (q.y - p.y) * (r.x - q.x) - (q.x - p.x) * (r.y - q.y);
    if val > 0.0 {
        1
    } else if val < 0.0 {
        -1
    } else {
        0
    }
}

fn on_segment(p: Point, q: Point, r: Point) -> bool {
    q.x <= p.x.max(r.x) && q.x >= p.x.min(r.x) && q.y <= p.y.max(r.y) && q.y >= p.y.min(r.y)
}

/// Whether closed segments `p1`–`q1` and `p2`–`q2` share at least one point.
pub fn segments_intersect(p1: Point, q1: Point, p2: Point, q2: Point) -> bool {
    let o1 = orientation(p1, q1, p2);
    let o2 = orientation(p1, q1, q2);
    let o3 = orientation(p2, q2, p1);
    let o4 = orientation(p2, q2, q1);

    (o1 != o2 && o3 != o4)
        || (o1 == 0 && on_segment(p1, p2, q1))
        || (o2 == 0 && on_segment(p1, q2, q1))
        || (o3 == 0 && on_segment(p2, p1, q2))
        || (o4 == 0 && on_segment(p2, q1, q2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_wraps_both_directions() {
        assert_eq!(normalize_deg(370.0), 10.0);
        assert_eq!(normalize_deg(-30.0), 330.0);
        assert_eq!(normalize_deg(360.0), 0.0);
        assert!(normalize_deg(-1e-20) < 360.0);
    }

    #[test]
    fn angular_distance_is_symmetric_and_short_way_round() {
        assert_eq!(angular_distance(350.0, 10.0), 20.0);
        assert_eq!(angular_distance(10.0, 350.0), 20.0);
        assert_eq!(angular_distance(0.0, 180.0), 180.0);
    }

    #[test]
    fn rect_rotated_ninety_swaps_extents() {
        let c = Point::new(0.5, 0.5);
        assert!(rotated_rect_contains(c, (0.2, 0.05), 90.0, Point::new(0.5, 0.65)));
        assert!(!rotated_rect_contains(c, (0.2, 0.05), 90.0, Point::new(0.65, 0.5)));
        assert!(rotated_rect_contains(c, (0.2, 0.05), 0.0, Point::new(0.65, 0.5)));
    }

    #[test]
    fn bounds_of_square_at_45_degrees() {
        let (ex, ey) = rotated_bounds((0.1, 0.1), 45.0);
        assert!((ex - 0.1 * 2f64.sqrt()).abs() < 1e-12);
        assert!((ey - ex).abs() < 1e-12);
    }

    #[test]
    fn segment_distance_cases() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        assert_eq!(point_segment_distance(Point::new(0.5, 0.2), a, b), 0.2);
        assert!((point_segment_distance(Point::new(1.3, 0.4), a, b) - 0.5).abs() < 1e-12);
        assert_eq!(point_segment_distance(Point::new(0.3, 0.4), a, a), 0.5);
    }

    #[test]
    fn crossing_and_parallel_segments() {
        let line = (Point::new(0.5, 0.0), Point::new(0.5, 1.0));
        assert!(segments_intersect(
            Point::new(0.4, 0.5),
            Point::new(0.8, 0.5),
            line.0,
            line.1
        ));
        assert!(!segments_intersect(
            Point::new(0.1, 0.5),
            Point::new(0.4, 0.5),
            line.0,
            line.1
        ));
        assert!(!segments_intersect(
            Point::new(0.6, 0.0),
            Point::new(0.6, 1.0),
            line.0,
            line.1
        ));
        // collinear overlap
        assert!(segments_intersect(
            Point::new(0.5, 0.2),
            Point::new(0.5, 1.5),
            line.0,
            line.1
        ));
    }
}
