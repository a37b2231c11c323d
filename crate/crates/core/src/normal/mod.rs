//! Outer bounds for `Λ_k` of normal matrices.
//!
//! For normal `T` with eigenvalues `z_1, …, z_N`, `Λ_k(T)` lies in the
//! intersection of `co(Γ)` over all `(N+1−k)`-point sub-multisets `Γ` of the
//! spectrum. For real spectra that intersection is exactly
//! `[a_k, a_{N−k+1}]`.

mod planar;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::range::{hermitian_range, RankKRange, RegionStatus};
use planar::{
    clip, convex_hull, cross, dedup_ring, distance_to_segment, doubled_area, farthest_pair,
    hull_contains, hull_half_planes,
};

/// Maximum number of subsets enumerated.
pub const SUBSET_CAP: u128 = 1_000_000;
/// Degeneracy threshold relative to the spectral diameter.
pub const COLLAPSE_TOL: f64 = 1e-12;
/// Boundary tolerance of membership tests, relative to the diameter.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Eigenvalue clustering threshold for the large-`k` check.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Eigenvalues with multiplicity; repeated entries count separately.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumList {
    points: Vec<C64>,
}

impl SpectrumList {
    pub fn new(points: Vec<C64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameters("empty spectrum".into()));
        }
        if points
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameters("non-finite eigenvalue".into()));
        }
        Ok(Self { points })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `n`th roots of unity `exp(2πij/n)`, `j = 0, …, n−1`.
    pub fn roots_of_unity(n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
                .collect(),
        )
    }

    /// Eigenvalues of a normal matrix, from a unitary that diagonalizes a
    /// generic real combination of its Hermitian and skew parts.
    pub fn from_normal_matrix(t: &ComplexMatrix) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "{}×{} matrix",
                t.rows(),
                t.cols()
            )));
        }
        let scale = t.scale_ref();
        let deviation = t.normality_deviation()?;
        if deviation > 1e-9 * scale * scale {
            return Err(Error::NotNormal { deviation });
        }
        let (re, im) = (t.hermitian_part(), t.imaginary_part());
        let mut worst = f64::INFINITY;
        for phi in [
            0.618_033_988_749_895,
            1.324_717_957_244_746,
            -0.754_877_666_246_693,
        ] {
            let h = &re + &im.scale_real(phi);
            let q = hermitian_eig(&h.hermitian_part())?.vectors;
            let d = q.adjoint_mul(&(t * &q))?;
            let diag = d.diagonal();
            let off = (&d - &ComplexMatrix::diag(&diag)).frobenius_norm();
            if off <= 1e-8 * scale {
                return Self::new(diag);
            }
            worst = worst.min(off);
        }
        Err(Error::NotNormal { deviation: worst })
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.points.iter().all(|z| z.im == 0.0)
    }

    pub fn diameter(&self) -> f64 {
        farthest_pair(&self.points).2
    }

    fn boundary_tol(&self) -> f64 {
        let d = self.diameter();
        if d > 0.0 {
            BOUNDARY_TOL * d
        } else {
            BOUNDARY_TOL * self.points[0].norm().max(1.0)
        }
    }
}

/// A closed convex subset of the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexRegion {
    Empty,
    Point(C64),
    Segment(C64, C64),
    /// Counterclockwise vertices.
    Polygon(Vec<C64>),
}

impl ConvexRegion {
    pub fn vertices(&self) -> Vec<C64> {
        match self {
            ConvexRegion::Empty => Vec::new(),
            ConvexRegion::Point(z) => vec![*z],
            ConvexRegion::Segment(a, b) => vec![*a, *b],
            ConvexRegion::Polygon(v) => v.clone(),
        }
    }

    pub fn contains(&self, z: C64, tol: f64) -> bool {
        match self {
            ConvexRegion::Empty => false,
            ConvexRegion::Point(p) => (z - p).norm() <= tol,
            ConvexRegion::Segment(a, b) => distance_to_segment(z, *a, *b) <= tol,
            ConvexRegion::Polygon(v) => hull_contains(v, z, tol),
        }
    }

    /// As a [`RankKRange`]; real segments become intervals.
    pub fn to_range(&self, status: RegionStatus) -> RankKRange {
        match self {
            ConvexRegion::Empty => RankKRange::Empty,
            ConvexRegion::Point(z) => RankKRange::Singleton(*z),
            ConvexRegion::Segment(a, b) if a.im == 0.0 && b.im == 0.0 => RankKRange::Interval {
                lo: a.re.min(b.re),
                hi: a.re.max(b.re),
            },
            other => RankKRange::Region {
                polygon: other.vertices(),
                status,
            },
        }
    }
}

/// Whether the hull intersection is known to equal `Λ_k`: real spectra, and
/// all spectra with `N ≤ 4`.
pub fn region_status(spec: &SpectrumList) -> RegionStatus {
    if spec.is_real() || spec.len() <= 4 {
        RegionStatus::Exact
    } else {
        RegionStatus::OuterBound
    }
}

fn binomial(n: usize, r: usize) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn subset_size(spec: &SpectrumList, k: usize) -> Result<usize> {
    let n = spec.len();
    if k == 0 || k > n {
        return Err(Error::BadRank { k, n });
    }
    let m = n + 1 - k;
    let count = binomial(n, m);
    if count > SUBSET_CAP {
        return Err(Error::TooManySubsets {
            count,
            cap: SUBSET_CAP,
        });
    }
    Ok(m)
}

fn snap(z: C64, tol: f64) -> C64 {
    let s = |x: f64| if x.abs() <= tol { 0.0 } else { x };
    C64::new(s(z.re), s(z.im))
}

/// `∩_Γ co(Γ)` over all `(N+1−k)`-point sub-multisets `Γ`.
pub fn hull_intersection_region(spec: &SpectrumList, k: usize) -> Result<ConvexRegion> {
    let m = subset_size(spec, k)?;
    let pts = spec.points();
    let n = pts.len();
    let (a, b, diam) = farthest_pair(pts);
    if diam == 0.0 {
        return Ok(ConvexRegion::Point(pts[0]));
    }
    let tol = COLLAPSE_TOL * diam;

    let (a, b) = if (a.re, a.im) <= (b.re, b.im) {
        (a, b)
    } else {
        (b, a)
    };
    let u = (b - a) / diam;
    let offset = |z: C64| ((z - a) * u.conj()).re;
    if pts.iter().all(|&z| ((z - a) * u.conj()).im.abs() <= tol) {
        // every Γ is an interval along the line; the k-th and (N+1−k)-th
        // points bound their intersection
        let mut along: Vec<C64> = pts.to_vec();
        along.sort_by(|p, q| offset(*p).total_cmp(&offset(*q)));
        let (lo, hi) = (along[k - 1], along[n - k]);
        let width = offset(hi) - offset(lo);
        return Ok(if width.abs() <= tol {
            ConvexRegion::Point(lo)
        } else if width < 0.0 {
            ConvexRegion::Empty
        } else {
            ConvexRegion::Segment(lo, hi)
        });
    }

    let mut seen = std::collections::HashSet::new();
    let mut planes = Vec::new();
    for subset in (0..n).combinations(m) {
        let sub: Vec<C64> = subset.iter().map(|&i| pts[i]).collect();
        for h in hull_half_planes(&convex_hull(&sub)) {
            let key = [h.normal.re, h.normal.im, h.offset].map(f64::to_bits);
            if seen.insert(key) {
                planes.push(h);
            }
        }
    }

    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for z in pts {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let mut poly = vec![
        C64::new(x0 - diam, y0 - diam),
        C64::new(x1 + diam, y0 - diam),
        C64::new(x1 + diam, y1 + diam),
        C64::new(x0 - diam, y1 + diam),
    ];
    let eps = 1e-2 * tol;
    for h in &planes {
        poly = clip(&poly, h, eps);
        if poly.is_empty() {
            return Ok(ConvexRegion::Empty);
        }
    }
    Ok(collapse(&poly, diam))
}

fn collapse(poly: &[C64], diam: f64) -> ConvexRegion {
    let tol = COLLAPSE_TOL * diam;
    let ring: Vec<C64> = dedup_ring(poly, tol)
        .into_iter()
        .map(|z| snap(z, tol))
        .collect();
    if ring.is_empty() {
        return ConvexRegion::Empty;
    }
    let (p, q, width) = farthest_pair(&ring);
    if width <= tol {
        let c = ring.iter().sum::<C64>() / ring.len() as f64;
        return ConvexRegion::Point(snap(c, tol));
    }
    if doubled_area(&ring).abs() / width <= tol {
        let (p, q) = if (p.re, p.im) <= (q.re, q.im) {
            (p, q)
        } else {
            (q, p)
        };
        return ConvexRegion::Segment(p, q);
    }
    // drop vertices lying on the edge joining their neighbours
    let mut v = ring;
    let mut i = 0;
    while v.len() > 3 && i < v.len() {
        let n = v.len();
        let (prev, cur, next) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
        if cross(prev, cur, next).abs() <= tol * (next - prev).norm() {
            v.remove(i);
        } else {
            i += 1;
        }
    }
    ConvexRegion::Polygon(v)
}

/// `λ ∈ co(Γ)` for every `(N+1−k)`-subset `Γ`, each hull tested directly.
pub fn point_in_region(spec: &SpectrumList, k: usize, lambda: C64) -> Result<bool> {
    let m = subset_size(spec, k)?;
    let tol = spec.boundary_tol();
    let pts = spec.points();
    Ok((0..pts.len()).combinations(m).all(|subset| {
        let sub: Vec<C64> = subset.iter().map(|&i| pts[i]).collect();
        hull_contains(&convex_hull(&sub), lambda, tol)
    }))
}

/// Precomputed subset hulls for repeated [`point_in_region`] queries.
#[derive(Debug, Clone)]
pub struct SubsetHulls {
    hulls: Vec<Vec<C64>>,
    tol: f64,
}

impl SubsetHulls {
    pub fn new(spec: &SpectrumList, k: usize) -> Result<Self> {
        let m = subset_size(spec, k)?;
        let pts = spec.points();
        let mut hulls: Vec<Vec<C64>> = (0..pts.len())
            .combinations(m)
            .map(|subset| convex_hull(&subset.iter().map(|&i| pts[i]).collect::<Vec<_>>()))
            .collect();
        hulls.sort_by_key(Vec::len);
        hulls.dedup();
        Ok(Self {
            hulls,
            tol: spec.boundary_tol(),
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn contains(&self, lambda: C64) -> bool {
        self.hulls
            .iter()
            .all(|h| hull_contains(h, lambda, self.tol))
    }
}

/// `Λ_k(Re T) × Λ_k(Im T)`, which contains `Λ_k(T)` for every `T`.
pub fn rectangle_bound(t: &ComplexMatrix, k: usize) -> Result<ConvexRegion> {
    let bounds = |r: RankKRange| r.real_bounds();
    let (Some((x0, x1)), Some((y0, y1))) = (
        bounds(hermitian_range(&t.hermitian_part(), k)?),
        bounds(hermitian_range(&t.imaginary_part(), k)?),
    ) else {
        return Ok(ConvexRegion::Empty);
    };
    Ok(match (x0 == x1, y0 == y1) {
        (true, true) => ConvexRegion::Point(C64::new(x0, y0)),
        (true, false) => ConvexRegion::Segment(C64::new(x0, y0), C64::new(x0, y1)),
        (false, true) => ConvexRegion::Segment(C64::new(x0, y0), C64::new(x1, y0)),
        (false, false) => ConvexRegion::Polygon(vec![
            C64::new(x0, y0),
            C64::new(x1, y0),
            C64::new(x1, y1),
            C64::new(x0, y1),
        ]),
    })
}

/// Outcome of [`normal_large_k_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalLargeKReport {
    /// `Empty` or `Singleton(λ_0)`.
    pub range: RankKRange,
    /// `2k − N`.
    pub required: usize,
    /// Multiplicity of `λ_0` in the spectrum, 0 when empty.
    pub multiplicity: usize,
}

/// Decides `Λ_k` for `2k > N`: `λ_0` must be an eigenvalue of multiplicity
/// at least `2k − N`, and after removing `2k − N` copies it must lie in the
/// rank-`(N−k)` hull intersection of what remains.
pub fn normal_large_k_check(spec: &SpectrumList, k: usize) -> Result<NormalLargeKReport> {
    let n = spec.len();
    if k == 0 || k > n {
        return Err(Error::BadRank { k, n });
    }
    if 2 * k <= n {
        return Err(Error::RankHypothesisViolated(format!(
            "2k = {} ≤ N = {n}",
            2 * k
        )));
    }
    let required = 2 * k - n;
    let pts = spec.points();
    let diam = spec.diameter();
    let tol = CLUSTER_TOL
        * if diam > 0.0 {
            diam
        } else {
            pts[0].norm().max(1.0)
        };

    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && (pts[j] - pts[i]).norm() <= tol)
            .collect();
        for &j in &members {
            assigned[j] = true;
        }
        if members.len() < required {
            continue;
        }
        let lambda0 = pts[i];
        let accepted = if k == n {
            true
        } else {
            let removed = &members[..required];
            let rest: Vec<C64> = (0..n)
                .filter(|j| !removed.contains(j))
                .map(|j| pts[j])
                .collect();
            point_in_region(&SpectrumList::new(rest)?, n - k, lambda0)?
        };
        if accepted {
            return Ok(NormalLargeKReport {
                range: RankKRange::Singleton(lambda0),
                required,
                multiplicity: members.len(),
            });
        }
    }
    Ok(NormalLargeKReport {
        range: RankKRange::Empty,
        required,
        multiplicity: 0,
    })
}

/// Permutation unitary `e_j ↦ e_{j+1 mod N}`.
pub fn cyclic_shift(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == (j + 1) % n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
