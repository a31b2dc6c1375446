//! Planar geometry primitives shared by the tessellation modules.
//!
//! Everything here works on plain `f64` with explicit tolerances. The
//! tessellation code never needs exact arithmetic: generators either emit
//! exactly representable coordinates (brick wall) or generic-position random
//! geometry where all classifications are far from the tolerance.

use serde::{Deserialize, Serialize};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product of `self` and `other` as vectors.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        self.sub(other).norm()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Key for exact grouping of coordinates that were copied bit-for-bit.
    /// Normalizes -0.0 to +0.0 so equal points always share a key.
    pub fn bit_key(self) -> (u64, u64) {
        let fix = |v: f64| if v == 0.0 { 0.0f64.to_bits() } else { v.to_bits() };
        (fix(self.x), fix(self.y))
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn square(origin: f64, side: f64) -> Self {
        Rect::new(origin, origin, origin + side, origin + side)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        Point2::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    /// Circumradius of the rectangle around its center.
    pub fn circumradius(&self) -> f64 {
        0.5 * self.width().hypot(self.height())
    }

    /// Closed containment with tolerance.
    pub fn contains(&self, p: Point2, eps: f64) -> bool {
        p.x >= self.x0 - eps && p.x <= self.x1 + eps && p.y >= self.y0 - eps && p.y <= self.y1 + eps
    }

    /// Half-open containment `[x0, x1) x [y0, y1)` used by reference-point
    /// estimators so periodic patterns are counted exactly once per period.
    pub fn contains_half_open(&self, p: Point2) -> bool {
        p.x >= self.x0 && p.x < self.x1 && p.y >= self.y0 && p.y < self.y1
    }

    /// Does `p` lie on the boundary of the rectangle (within eps)?
    pub fn on_boundary(&self, p: Point2, eps: f64) -> bool {
        self.contains(p, eps)
            && ((p.x - self.x0).abs() <= eps
                || (p.x - self.x1).abs() <= eps
                || (p.y - self.y0).abs() <= eps
                || (p.y - self.y1).abs() <= eps)
    }

    /// The four boundary segments, counterclockwise.
    pub fn boundary_segments(&self) -> [Segment; 4] {
        let a = Point2::new(self.x0, self.y0);
        let b = Point2::new(self.x1, self.y0);
        let c = Point2::new(self.x1, self.y1);
        let d = Point2::new(self.x0, self.y1);
        [
            Segment::new(a, b),
            Segment::new(b, c),
            Segment::new(c, d),
            Segment::new(d, a),
        ]
    }
}

/// A line segment between two points.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    pub fn bbox(&self) -> Rect {
        Rect::new(
            self.a.x.min(self.b.x),
            self.a.y.min(self.b.y),
            self.a.x.max(self.b.x),
            self.a.y.max(self.b.y),
        )
    }

    /// Distance from `p` to the closed segment.
    pub fn dist_to_point(&self, p: Point2) -> f64 {
        let d = self.b.sub(self.a);
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return p.dist(self.a);
        }
        let t = (p.sub(self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.dist(self.a.add(d.scale(t)))
    }

    /// Closed containment of a point on the segment.
    pub fn contains_point(&self, p: Point2, eps: f64) -> bool {
        self.dist_to_point(p) <= eps
    }

    /// Containment in the relative interior (strictly away from endpoints).
    pub fn interior_contains_point(&self, p: Point2, eps: f64) -> bool {
        self.contains_point(p, eps) && p.dist(self.a) > eps && p.dist(self.b) > eps
    }

    /// Is the whole closed segment `other` contained in this closed segment?
    pub fn contains_segment(&self, other: &Segment, eps: f64) -> bool {
        self.contains_point(other.a, eps) && self.contains_point(other.b, eps)
    }
}

/// Proper or improper intersection point of two segments, if any.
///
/// Returns the intersection of the closed segments when they meet in a single
/// point; collinear overlapping segments return `None` (callers must not feed
/// overlapping segments).
pub fn segment_intersection(s: &Segment, t: &Segment, eps: f64) -> Option<Point2> {
    let r = s.b.sub(s.a);
    let q = t.b.sub(t.a);
    let denom = r.cross(q);
    let scale = r.norm().max(q.norm());
    if denom.abs() <= eps * scale * scale {
        return None; // parallel or collinear
    }
    let diff = t.a.sub(s.a);
    let u = diff.cross(q) / denom;
    let v = diff.cross(r) / denom;
    let tol_u = eps / r.norm().max(eps);
    let tol_v = eps / q.norm().max(eps);
    if u >= -tol_u && u <= 1.0 + tol_u && v >= -tol_v && v <= 1.0 + tol_v {
        Some(s.a.add(r.scale(u)))
    } else {
        None
    }
}

/// Convex polygon given by its corner cycle in counterclockwise order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polygon {
    pub corners: Vec<Point2>,
}

impl Polygon {
    pub fn new(corners: Vec<Point2>) -> Self {
        Polygon { corners }
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn sides(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.corners.len();
        (0..n).map(move |i| Segment::new(self.corners[i], self.corners[(i + 1) % n]))
    }

    /// Signed area (positive for counterclockwise orientation).
    pub fn signed_area(&self) -> f64 {
        let n = self.corners.len();
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.corners[i].cross(self.corners[(i + 1) % n]);
        }
        0.5 * acc
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.sides().map(|s| s.length()).sum()
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.corners.len();
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a = 0.0;
        for i in 0..n {
            let p = self.corners[i];
            let q = self.corners[(i + 1) % n];
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
            a += w;
        }
        if a.abs() < f64::MIN_POSITIVE {
            // Degenerate; fall back to vertex average.
            let inv = 1.0 / n as f64;
            return Point2::new(
                self.corners.iter().map(|p| p.x).sum::<f64>() * inv,
                self.corners.iter().map(|p| p.y).sum::<f64>() * inv,
            );
        }
        Point2::new(cx / (3.0 * a), cy / (3.0 * a))
    }

    /// Closed containment test for a convex CCW polygon.
    pub fn contains_point(&self, p: Point2, eps: f64) -> bool {
        self.sides().all(|s| {
            let d = s.b.sub(s.a);
            d.cross(p.sub(s.a)) >= -eps * d.norm().max(eps)
        })
    }

    /// Strict interior test for a convex CCW polygon.
    pub fn interior_contains_point(&self, p: Point2, eps: f64) -> bool {
        self.sides().all(|s| {
            let d = s.b.sub(s.a);
            d.cross(p.sub(s.a)) > eps * d.norm().max(eps)
        })
    }

    /// Is `p` on the polygon boundary (within eps)?
    pub fn boundary_contains_point(&self, p: Point2, eps: f64) -> bool {
        self.sides().any(|s| s.contains_point(p, eps))
    }

    /// Is the closed segment contained in the closed polygon? Convexity makes
    /// endpoint containment sufficient.
    pub fn contains_segment(&self, seg: &Segment, eps: f64) -> bool {
        self.contains_point(seg.a, eps) && self.contains_point(seg.b, eps)
    }

    /// Does the closed segment intersect the closed polygon?
    pub fn intersects_segment(&self, seg: &Segment, eps: f64) -> bool {
        if self.contains_point(seg.a, eps) || self.contains_point(seg.b, eps) {
            return true;
        }
        self.sides()
            .any(|s| segment_intersection(&s, seg, eps).is_some())
    }

    pub fn bbox(&self) -> Rect {
        let mut r = Rect::new(f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in &self.corners {
            r.x0 = r.x0.min(p.x);
            r.y0 = r.y0.min(p.y);
            r.x1 = r.x1.max(p.x);
            r.y1 = r.y1.max(p.y);
        }
        r
    }
}

/// Interval on the circle `[0, H)`, stored as a start and a positive length.
/// `hi` may exceed `H`, meaning the interval wraps around.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TorusInterval {
    pub lo: f64,
    pub len: f64,
    pub period: f64,
}

impl TorusInterval {
    pub fn new(lo: f64, len: f64, period: f64) -> Self {
        TorusInterval { lo, len, period }
    }

    /// Interval from `lo` forward to `hi` on the circle.
    pub fn between(lo: f64, hi: f64, period: f64) -> Self {
        let len = if hi > lo { hi - lo } else { hi + period - lo };
        TorusInterval { lo, len, period }
    }

    pub fn hi(&self) -> f64 {
        let h = self.lo + self.len;
        if h >= self.period { h - self.period } else { h }
    }

    pub fn mid(&self) -> f64 {
        let m = self.lo + 0.5 * self.len;
        if m >= self.period { m - self.period } else { m }
    }

    /// Signed offset of `h` forward from `lo`, in `[0, period)`.
    fn forward(&self, h: f64) -> f64 {
        let mut d = h - self.lo;
        if d < 0.0 {
            d += self.period;
        }
        d
    }

    /// Closed containment of a circle point.
    pub fn contains(&self, h: f64, eps: f64) -> bool {
        let d = self.forward(h);
        d <= self.len + eps || d >= self.period - eps
    }

    /// Strict interior containment of a circle point.
    pub fn interior_contains(&self, h: f64, eps: f64) -> bool {
        let d = self.forward(h);
        d > eps && d < self.len - eps
    }

    /// Is `other` contained in this closed interval?
    pub fn contains_interval(&self, other: &TorusInterval, eps: f64) -> bool {
        if other.len > self.len + eps {
            return false;
        }
        let d = self.forward(other.lo);
        let start_ok = d <= self.len + eps || d >= self.period - eps;
        let start = if d >= self.period - eps { 0.0 } else { d };
        start_ok && start + other.len <= self.len + eps
    }
}

/// Distance between two points on the circle `[0, period)`.
pub fn circle_dist(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// Liang-Barsky clip of a segment to a rectangle. Returns `None` when the
/// segment misses the rectangle or the clipped piece is degenerate.
pub fn clip_segment_to_rect(s: &Segment, r: &Rect, eps: f64) -> Option<Segment> {
    let d = s.b.sub(s.a);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let checks = [
        (-d.x, s.a.x - r.x0),
        (d.x, r.x1 - s.a.x),
        (-d.y, s.a.y - r.y0),
        (d.y, r.y1 - s.a.y),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if t0 >= t1 {
        return None;
    }
    let a = s.a.add(d.scale(t0));
    let b = s.a.add(d.scale(t1));
    if a.dist(b) < eps {
        return None;
    }
    Some(Segment::new(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_basics() {
        let square = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
        ]);
        assert_eq!(square.area(), 4.0);
        assert_eq!(square.perimeter(), 8.0);
        let c = square.centroid();
        assert_eq!((c.x, c.y), (1.0, 1.0));
        assert!(square.contains_point(Point2::new(1.0, 1.0), 1e-12));
        assert!(square.contains_point(Point2::new(2.0, 1.0), 1e-12));
        assert!(!square.interior_contains_point(Point2::new(2.0, 1.0), 1e-12));
        assert!(square.boundary_contains_point(Point2::new(2.0, 1.0), 1e-12));
        assert!(!square.contains_point(Point2::new(2.1, 1.0), 1e-12));
    }

    #[test]
    fn segment_intersection_cases() {
        let eps = 1e-12;
        let s = Segment::new(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0));
        let t = Segment::new(Point2::new(1.0, -1.0), Point2::new(1.0, 1.0));
        let p = segment_intersection(&s, &t, eps).unwrap();
        assert!(p.dist(Point2::new(1.0, 0.0)) < 1e-12);

        // T-junction: endpoint of t on interior of s.
        let t2 = Segment::new(Point2::new(1.0, 0.0), Point2::new(1.0, 5.0));
        let p2 = segment_intersection(&s, &t2, eps).unwrap();
        assert!(p2.dist(Point2::new(1.0, 0.0)) < 1e-12);

        // Disjoint.
        let t3 = Segment::new(Point2::new(3.0, -1.0), Point2::new(3.0, 1.0));
        assert!(segment_intersection(&s, &t3, eps).is_none());

        // Parallel.
        let t4 = Segment::new(Point2::new(0.0, 1.0), Point2::new(2.0, 1.0));
        assert!(segment_intersection(&s, &t4, eps).is_none());
    }

    #[test]
    fn torus_interval_wrap() {
        let iv = TorusInterval::between(7.0, 1.0, 8.0); // [7, 8) u [0, 1)
        assert_eq!(iv.len, 2.0);
        assert!(iv.contains(7.5, 1e-12));
        assert!(iv.contains(0.5, 1e-12));
        assert!(iv.contains(1.0, 1e-12));
        assert!(!iv.contains(3.0, 1e-12));
        assert!(iv.interior_contains(0.5, 1e-12));
        assert!(!iv.interior_contains(1.0, 1e-9));
        assert!((iv.mid() - 0.0).abs() < 1e-12);

        let inner = TorusInterval::between(7.5, 0.5, 8.0);
        assert!(iv.contains_interval(&inner, 1e-12));
        let crossing = TorusInterval::between(0.5, 2.0, 8.0);
        assert!(!iv.contains_interval(&crossing, 1e-12));
    }

    #[test]
    fn circle_distance() {
        assert!((circle_dist(0.1, 7.9, 8.0) - 0.2).abs() < 1e-12);
        assert!((circle_dist(3.0, 5.0, 8.0) - 2.0).abs() < 1e-12);
    }
}
