//! Small planar geometry kit on `C64` points.

use crate::linalg::C64;

/// `Im(conj(b − a)·(c − a))`: positive when `a, b, c` turn left.
pub(crate) fn cross(a: C64, b: C64, c: C64) -> f64 {
    let (u, v) = (b - a, c - a);
    u.re * v.im - u.im * v.re
}

/// Convex hull by monotone chain, counterclockwise, without repeated or
/// exactly collinear vertices. Returns 1 or 2 points for degenerate input.
pub(crate) fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<C64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<C64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub(crate) fn distance_to_segment(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Membership in the hull returned by [`convex_hull`], with an absolute
/// boundary tolerance.
pub(crate) fn hull_contains(hull: &[C64], z: C64, tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => (z - hull[0]).norm() <= tol,
        2 => distance_to_segment(z, hull[0], hull[1]) <= tol,
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            cross(a, b, z) / (b - a).norm() >= -tol
        }),
    }
}

/// Closed half-plane `{z : Re(conj(normal)·z) ≤ offset}`, `normal` a unit
/// vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HalfPlane {
    pub normal: C64,
    pub offset: f64,
}

impl HalfPlane {
    fn signed(&self, z: C64) -> f64 {
        (self.normal.conj() * z).re - self.offset
    }

    /// Left side of the directed line `a → b`.
    pub fn left_of(a: C64, b: C64) -> Self {
        let d = b - a;
        let normal = C64::new(d.im, -d.re) / d.norm();
        Self {
            normal,
            offset: (normal.conj() * a).re,
        }
    }

    /// `Re(conj(u)·z) ≤ Re(conj(u)·p)` for unit `u`.
    pub fn behind(p: C64, u: C64) -> Self {
        Self {
            normal: u,
            offset: (u.conj() * p).re,
        }
    }
}

/// Half-planes cutting out the hull. Degenerate hulls become a zero-width
/// strip with end caps, or a zero-size box.
pub(crate) fn hull_half_planes(hull: &[C64]) -> Vec<HalfPlane> {
    match hull.len() {
        0 => Vec::new(),
        1 => {
            let p = hull[0];
            [
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
            ]
            .into_iter()
            .map(|u| HalfPlane::behind(p, u))
            .collect()
        }
        2 => {
            let (a, b) = (hull[0], hull[1]);
            let u = (b - a) / (b - a).norm();
            vec![
                HalfPlane::left_of(a, b),
                HalfPlane::left_of(b, a),
                HalfPlane::behind(b, u),
                HalfPlane::behind(a, -u),
            ]
        }
        n => (0..n)
            .map(|i| HalfPlane::left_of(hull[i], hull[(i + 1) % n]))
            .collect(),
    }
}

/// One Sutherland–Hodgman step; points within `eps` of the boundary count
/// as inside.
pub(crate) fn clip(polygon: &[C64], h: &HalfPlane, eps: f64) -> Vec<C64> {
    let n = polygon.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, q) = (polygon[i], polygon[(i + 1) % n]);
        let (sp, sq) = (h.signed(p), h.signed(q));
        let (p_in, q_in) = (sp <= eps, sq <= eps);
        if p_in {
            out.push(p);
        }
        if p_in != q_in {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Drops consecutive vertices closer than `tol`.
pub(crate) fn dedup_ring(polygon: &[C64], tol: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(polygon.len());
    for &p in polygon {
        if out.last().is_none_or(|&q| (p - q).norm() > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= tol {
        out.pop();
    }
    out
}

/// Twice the signed area.
pub(crate) fn doubled_area(polygon: &[C64]) -> f64 {
    let n = polygon.len();
    (0..n)
        .map(|i| {
            let (a, b) = (polygon[i], polygon[(i + 1) % n]);
            a.re * b.im - a.im * b.re
        })
        .sum()
}

/// Width of a point set measured across its longest chord.
pub(crate) fn farthest_pair(points: &[C64]) -> (C64, C64, f64) {
    let mut best = (points[0], points[0], 0.0);
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            let d = (p - q).norm();
            if d > best.2 {
                best = (p, q, d);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let pts = [
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.5, 0.5),
            c(1.0, 1.0),
            c(0.0, 1.0),
        ];
        let hull = convex_hull(&pts);
        assert_eq!(
            hull,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]
        );
        assert!(doubled_area(&hull) > 0.0);
        assert!(hull_contains(&hull, c(0.5, 0.5), 0.0));
        assert!(hull_contains(&hull, c(1.0, 0.5), 0.0));
        assert!(!hull_contains(&hull, c(1.1, 0.5), 1e-12));
    }

    #[test]
    fn collinear_hull_is_a_segment() {
        let pts = [c(0.0, 0.0), c(2.0, 2.0), c(1.0, 1.0), c(1.0, 1.0)];
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 2);
        assert!(hull_contains(&hull, c(0.5, 0.5), 1e-15));
        assert!(!hull_contains(&hull, c(0.5, 0.6), 1e-3));
    }

    #[test]
    fn clipping_square_by_diagonal() {
        let square = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        let h = HalfPlane::left_of(c(0.0, 0.0), c(1.0, 1.0));
        let tri = clip(&square, &h, 0.0);
        assert!((doubled_area(&dedup_ring(&tri, 1e-15)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn segment_half_planes_contain_only_the_segment() {
        let planes = hull_half_planes(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let inside = |z: C64| planes.iter().all(|h| h.signed(z) <= 1e-15);
        assert!(inside(c(0.5, 0.0)));
        assert!(!inside(c(0.5, 0.1)));
        assert!(!inside(c(1.5, 0.0)));
    }
}
