//! Planar and spatial primitives: points, canonical directions, lines, tubes.
//!
//! Directions are always *projective*: a direction and its antipode name the
//! same object. The canonical representative has positive last nonzero
//! coordinate, so for d = 2 the representative lives on the upper half
//! circle, with the angle in [0, pi).

use crate::math;

/// Point in the ambient space. For d = 2 the `z` coordinate is 0 and ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const fn xy(x: f64, y: f64) -> Self {
        Point { x, y, z: 0.0 }
    }

    pub const fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn coord(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        math::sqrt(dx * dx + dy * dy + dz * dz)
    }

    pub fn as_vec2(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Planar vector with the handful of operations the tube machinery needs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, t: f64) -> Vec2 {
        Vec2::new(self.x * t, self.y * t)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        self.sub(o).norm()
    }

    pub fn from_angle(theta: f64) -> Vec2 {
        Vec2::new(math::cos(theta), math::sin(theta))
    }

    pub fn to_point(self) -> Point {
        Point::xy(self.x, self.y)
    }

    /// Canonical projective representative: y > 0, or y = 0 and x > 0.
    pub fn canonical_direction(self) -> Vec2 {
        if self.y < 0.0 || (self.y == 0.0 && self.x < 0.0) {
            Vec2::new(-self.x, -self.y)
        } else {
            self
        }
    }

    /// Angle of the canonical representative, in [0, pi).
    pub fn projective_angle(self) -> f64 {
        let c = self.canonical_direction();
        let a = math::atan2(c.y, c.x);
        // atan2 of the canonical representative lies in [0, pi]; pi itself
        // only occurs for (x < 0, y = -0.0)-style inputs already negated away.
        if a >= core::f64::consts::PI {
            0.0
        } else {
            a
        }
    }
}

/// Smallest angle between two projective directions, in [0, pi/2].
pub fn projective_angle_between(a: Vec2, b: Vec2) -> f64 {
    let cross = math::abs(a.cross(b));
    let dot = math::abs(a.dot(b));
    math::atan2(cross, dot)
}

/// Line in the plane, stored as canonical direction plus signed offset.
///
/// The offset is the coordinate of the point on the line closest to the
/// origin, measured along `direction.perp()`; re-canonicalising an already
/// canonical line is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Line {
    direction: Vec2,
    offset: f64,
}

impl Line {
    /// Line with the given direction through the given point. The direction
    /// is normalised and canonicalised.
    pub fn through_point(point: Vec2, direction: Vec2) -> Line {
        let dir = direction.normalized().canonical_direction();
        let offset = point.dot(dir.perp());
        Line {
            direction: dir,
            offset,
        }
    }

    /// Line through two distinct points.
    pub fn through_points(a: Vec2, b: Vec2) -> Line {
        Line::through_point(a, b.sub(a))
    }

    pub fn horizontal(y: f64) -> Line {
        Line::through_point(Vec2::new(0.0, y), Vec2::new(1.0, 0.0))
    }

    pub fn direction(&self) -> Vec2 {
        self.direction
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Unit normal such that `signed_dist` = <p, normal> - offset.
    pub fn normal(&self) -> Vec2 {
        self.direction.perp()
    }

    pub fn signed_dist(&self, p: Vec2) -> f64 {
        p.dot(self.normal()) - self.offset
    }

    pub fn dist(&self, p: Vec2) -> f64 {
        math::abs(self.signed_dist(p))
    }

    /// Point on the line at parameter t from the foot of the origin.
    pub fn point_at(&self, t: f64) -> Vec2 {
        self.normal()
            .scale(self.offset)
            .add(self.direction.scale(t))
    }

    /// Parameter of the orthogonal projection of p onto the line.
    pub fn project_t(&self, p: Vec2) -> f64 {
        p.dot(self.direction)
    }

    /// Intersection point with another line; None when parallel.
    pub fn intersect(&self, other: &Line) -> Option<Vec2> {
        let d = self.direction.cross(other.direction);
        if d == 0.0 {
            return None;
        }
        // Solve <p, n1> = c1, <p, n2> = c2.
        let n1 = self.normal();
        let n2 = other.normal();
        let det = n1.x * n2.y - n1.y * n2.x;
        if det == 0.0 {
            return None;
        }
        let x = (self.offset * n2.y - other.offset * n1.y) / det;
        let y = (n1.x * other.offset - n2.x * self.offset) / det;
        Some(Vec2::new(x, y))
    }
}

/// Open tube of half-width `half_width` around `line`: the set of points at
/// distance < half_width from the axis line.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tube {
    pub line: Line,
    pub half_width: f64,
}

impl Tube {
    pub fn new(line: Line, half_width: f64) -> Tube {
        debug_assert!(half_width > 0.0);
        Tube { line, half_width }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.line.dist(p) < self.half_width
    }

    /// Direction of the tube on the half circle.
    pub fn dir(&self) -> Vec2 {
        self.line.direction()
    }

    /// Same axis, wider body.
    pub fn widened(&self, half_width: f64) -> Tube {
        Tube::new(self.line, half_width)
    }
}

/// Upper bound on diam(T1 ∩ T2 ∩ B(0,1)), from tube geometry alone.
///
/// For non-parallel tubes the intersection is a parallelogram; its diameter
/// is the longer diagonal, computed from the four corner points. The result
/// is capped at 2, the diameter of the unit ball.
pub fn tube_intersection_diameter(t1: &Tube, t2: &Tube) -> f64 {
    let ball_diam = 2.0;
    let d1 = t1.line.direction();
    let d2 = t2.line.direction();
    if d1.cross(d2) == 0.0 {
        return ball_diam;
    }
    let mut corners = [Vec2::new(0.0, 0.0); 4];
    let mut k = 0;
    for s1 in [-1.0, 1.0] {
        for s2 in [-1.0, 1.0] {
            let l1 = Line {
                direction: t1.line.direction(),
                offset: t1.line.offset() + s1 * t1.half_width,
            };
            let l2 = Line {
                direction: t2.line.direction(),
                offset: t2.line.offset() + s2 * t2.half_width,
            };
            match l1.intersect(&l2) {
                Some(p) => {
                    corners[k] = p;
                    k += 1;
                }
                None => return ball_diam,
            }
        }
    }
    let mut diam: f64 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            diam = diam.max(corners[i].dist(corners[j]));
        }
    }
    diam.min(ball_diam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn canonical_direction_is_idempotent() {
        for v in [
            Vec2::new(1.0, -2.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -3.0),
            Vec2::new(0.5, 0.5),
        ] {
            let c = v.canonical_direction();
            assert_eq!(c.canonical_direction(), c);
            assert!(c.y > 0.0 || (c.y == 0.0 && c.x > 0.0));
        }
    }

    #[test]
    fn line_distance_matches_hand_computation() {
        let l = Line::horizontal(0.5);
        assert_relative_eq!(l.dist(Vec2::new(0.3, 0.9)), 0.4, max_relative = 1e-12);
        assert_relative_eq!(l.dist(Vec2::new(7.0, 0.5)), 0.0, max_relative = 1e-12);

        let diag = Line::through_points(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0));
        assert_relative_eq!(
            diag.dist(Vec2::new(1.0, 0.0)),
            core::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn line_canonicalisation_is_stable() {
        let a = Line::through_point(Vec2::new(0.25, 0.75), Vec2::new(-2.0, -1.0));
        let b = Line::through_point(Vec2::new(0.25, 0.75), Vec2::new(2.0, 1.0));
        assert_relative_eq!(a.offset(), b.offset(), max_relative = 1e-12);
        assert_eq!(a.direction(), b.direction());
    }

    #[test]
    fn tube_membership_is_open() {
        let t = Tube::new(Line::horizontal(0.0), 0.25);
        assert!(t.contains(Vec2::new(5.0, 0.2)));
        assert!(!t.contains(Vec2::new(0.0, 0.25)));
        assert!(!t.contains(Vec2::new(0.0, 0.3)));
    }

    #[test]
    fn intersection_diameter_of_crossing_tubes() {
        // Perpendicular tubes of half-width w meet in a square of side 2w,
        // diameter 2w*sqrt(2).
        let w = 0.01;
        let t1 = Tube::new(Line::horizontal(0.0), w);
        let t2 = Tube::new(
            Line::through_point(Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0)),
            w,
        );
        let d = tube_intersection_diameter(&t1, &t2);
        assert_relative_eq!(d, 2.0 * w * core::f64::consts::SQRT_2, max_relative = 1e-9);

        // Parallel tubes fall back to the ball diameter.
        let t3 = Tube::new(Line::horizontal(0.5), w);
        assert_eq!(tube_intersection_diameter(&t1, &t3), 2.0);
    }

    #[test]
    fn shallow_angle_intersection_grows_like_reciprocal_angle() {
        let w = 1e-3;
        let phi = 0.01f64;
        let t1 = Tube::new(Line::horizontal(0.0), w);
        let t2 = Tube::new(
            Line::through_point(Vec2::new(0.0, 0.0), Vec2::from_angle(phi)),
            w,
        );
        let d = tube_intersection_diameter(&t1, &t2);
        // Long diagonal of the parallelogram is ~ 4w/phi for small phi.
        assert!(d > 2.0 * w / phi && d < 6.0 * w / phi, "d = {d}");
    }
}
