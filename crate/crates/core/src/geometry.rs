//! Points on `S^d` embedded in `R^{d+1}`, geodesic distance, and the
//! Laplacian spectrum `lambda_ell^2 = ell (ell + d - 1)` with its
//! multiplicities.

use crate::error::{Error, Result};

/// Points are accepted as "on the sphere" when their Euclidean norm is
/// within this tolerance of 1.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Pairs at geodesic distance within this tolerance of `pi` are routed to
/// the antipodal-pair machinery instead of the generic-position one.
pub const ANTIPODAL_TOL: f64 = 1e-9;

/// Detection happens on the inner product, where round-off stays
/// quadratically small; `arccos` would amplify one ulp near `+-1` to
/// ~1e-8 in distance and defeat the distance window above.
pub const ANTIPODAL_COS_TOL: f64 = 1e-12;

/// True when the pair should be treated as exactly antipodal.
pub fn is_antipodal(p: &Point, q: &Point) -> bool {
    p.dot(q) <= -1.0 + ANTIPODAL_COS_TOL
}

/// True when the pair should be treated as one point.
pub fn is_same_point(p: &Point, q: &Point) -> bool {
    p.dot(q) >= 1.0 - ANTIPODAL_COS_TOL
}

/// Dimension, spectrum and volume data of a round sphere `S^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereContext {
    d: u32,
    vol_sphere: f64,
    vol_equator: f64,
}

impl SphereContext {
    /// Context for `S^d`, `d >= 2`. Scenario and quasimode operations
    /// additionally require `d` to be 2 or 3 and enforce that themselves.
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!(
                "sphere dimension must be >= 2, got {d}"
            )));
        }
        Ok(SphereContext {
            d,
            vol_sphere: sphere_volume(d),
            vol_equator: sphere_volume(d - 1),
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// `vol(S^d)`.
    pub fn vol_sphere(&self) -> f64 {
        self.vol_sphere
    }

    /// `vol(S^{d-1})`.
    pub fn vol_equator(&self) -> f64 {
        self.vol_equator
    }

    /// Gegenbauer index `(d - 1) / 2` attached to this sphere.
    pub fn alpha(&self) -> f64 {
        (self.d as f64 - 1.0) / 2.0
    }

    /// `lambda_ell^2 = ell (ell + d - 1)`, exact in f64 for every `ell`
    /// used here.
    pub fn lambda_sq(&self, ell: u32) -> f64 {
        let l = ell as f64;
        l * (l + self.d as f64 - 1.0)
    }

    /// Eigenspace dimension of `ker(Lap - lambda_ell^2)`.
    pub fn multiplicity(&self, ell: u32) -> u64 {
        multiplicity(self.d, ell).expect("multiplicity overflow")
    }

    pub fn level(&self, ell: u32) -> SpectralLevel {
        SpectralLevel {
            ell,
            lambda_sq: self.lambda_sq(ell),
            mult: self.multiplicity(ell),
        }
    }

    /// Checks the `d in {2, 3}` restriction of the scenario/quasimode layer.
    pub fn require_low_dim(&self) -> Result<()> {
        if self.d == 2 || self.d == 3 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "operation requires d in {{2, 3}}, got d = {}",
                self.d
            )))
        }
    }
}

/// `vol(S^d)` through the two-step recurrence `vol(S^d) = 2 pi / (d - 1) *
/// vol(S^{d-2})`, seeded by `vol(S^0) = 2`, `vol(S^1) = 2 pi`.
pub fn sphere_volume(d: u32) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    match d {
        0 => 2.0,
        1 => two_pi,
        _ => two_pi / (d as f64 - 1.0) * sphere_volume(d - 2),
    }
}

/// One eigenvalue of the Laplacian on `S^d` together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLevel {
    pub ell: u32,
    pub lambda_sq: f64,
    pub mult: u64,
}

/// A point of `S^d`, stored extrinsically as a unit vector in `R^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Wraps coordinates that must already have unit norm (within
    /// [`UNIT_NORM_TOL`]).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(
                "a sphere point needs at least 2 coordinates".into(),
            ));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "point norm {norm} deviates from 1 by more than {UNIT_NORM_TOL}"
            )));
        }
        Ok(Point { coords })
    }

    /// Projects arbitrary nonzero coordinates onto the sphere.
    pub fn normalized(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(Point {
            coords: coords.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// North pole `e_{d+1}` of `S^d`.
    pub fn pole(d: u32) -> Self {
        let mut coords = vec![0.0; d as usize + 1];
        coords[d as usize] = 1.0;
        Point { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Ambient dimension minus one, i.e. the `d` of the sphere this point
    /// lives on.
    pub fn sphere_dim(&self) -> u32 {
        self.coords.len() as u32 - 1
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Coordinatewise negation; an involution.
    pub fn antipode(&self) -> Point {
        Point {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// Geodesic distance `arccos <p, q>`, with the dot product clamped to
/// `[-1, 1]` so that round-off never escapes the domain of `arccos`.
pub fn geodesic_distance(p: &Point, q: &Point) -> f64 {
    p.dot(q).clamp(-1.0, 1.0).acos()
}

/// A finite scatterer set decomposed as `Q = A u (-A) u B`: antipodal pairs
/// (stored through one representative each) and antipode-free singles.
/// Pairs at distance within [`ANTIPODAL_TOL`] of `pi` are snapped to exact
/// antipodes so the set never sits silently on the pair/no-pair dichotomy.
#[derive(Debug, Clone)]
pub struct ScattererSet {
    pairs: Vec<Point>,
    singles: Vec<Point>,
}

impl ScattererSet {
    pub fn from_points(points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty scatterer set".into()));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if is_same_point(&points[i], &points[j]) {
                    return Err(Error::InvalidArgument(format!(
                        "scatterers {i} and {j} coincide"
                    )));
                }
            }
        }
        let mut used = vec![false; points.len()];
        let mut pairs = Vec::new();
        let mut singles = Vec::new();
        for i in 0..points.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut partner = None;
            for j in i + 1..points.len() {
                if used[j] {
                    continue;
                }
                if is_antipodal(&points[i], &points[j]) {
                    partner = Some(j);
                    break;
                }
            }
            match partner {
                Some(j) => {
                    used[j] = true;
                    pairs.push(points[i].clone());
                }
                None => singles.push(points[i].clone()),
            }
        }
        Ok(ScattererSet { pairs, singles })
    }

    pub fn single(q: Point) -> Self {
        ScattererSet {
            pairs: Vec::new(),
            singles: vec![q],
        }
    }

    pub fn antipodal_pair(q: Point) -> Self {
        ScattererSet {
            pairs: vec![q],
            singles: Vec::new(),
        }
    }

    /// Representatives of the antipodal pairs (the set `A`).
    pub fn pairs(&self) -> &[Point] {
        &self.pairs
    }

    /// Scatterers without an antipodal partner (the set `B`).
    pub fn singles(&self) -> &[Point] {
        &self.singles
    }

    pub fn has_antipodal_pair(&self) -> bool {
        !self.pairs.is_empty()
    }

    /// `N = 2 |A| + |B|`.
    pub fn total_points(&self) -> usize {
        2 * self.pairs.len() + self.singles.len()
    }
}

/// Dimension of the degree-`ell` eigenspace on `S^d`, in exact integer
/// arithmetic: `binom(ell + d, d) - binom(ell + d - 2, d)`.
pub fn multiplicity(d: u32, ell: u32) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "multiplicity requires d >= 1".into(),
        ));
    }
    let head = binomial(ell as u64 + d as u64, d as u64)?;
    let tail = if ell >= 2 {
        binomial(ell as u64 + d as u64 - 2, d as u64)?
    } else {
        0
    };
    let m = head - tail;
    u64::try_from(m)
        .map_err(|_| Error::InvalidArgument(format!("multiplicity({d}, {ell}) exceeds u64")))
}

/// `binom(n, k)` exactly; the running product stays integral because each
/// partial value is itself a binomial coefficient.
fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::InvalidArgument(format!("binomial({n}, {k}) overflows")))?;
        acc /= (i + 1) as u128;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_volumes_match_closed_forms() {
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn geodesic_distance_identity_antipode_orthogonal() {
        let q = Point::normalized(vec![0.3, -0.4, 0.8660254037844386]).unwrap();
        assert_eq!(geodesic_distance(&q, &q), 0.0);
        assert!((geodesic_distance(&q, &q.antipode()) - PI).abs() < 1e-12);
        let e1 = Point::new(vec![1.0, 0.0, 0.0]).unwrap();
        let e2 = Point::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert!((geodesic_distance(&e1, &e2) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn antipode_is_involution() {
        let q = Point::normalized(vec![1.0, 2.0, -2.0]).unwrap();
        assert_eq!(q.antipode().antipode(), q);
        assert_eq!(
            Point::new(vec![1.0, 0.0, 0.0]).unwrap().antipode(),
            Point::new(vec![-1.0, 0.0, 0.0]).unwrap()
        );
    }

    #[test]
    fn multiplicities_match_closed_forms() {
        assert_eq!(multiplicity(2, 5).unwrap(), 11);
        assert_eq!(multiplicity(3, 5).unwrap(), 36);
        assert_eq!(multiplicity(2, 0).unwrap(), 1);
        for ell in 0..=500u32 {
            assert_eq!(multiplicity(2, ell).unwrap(), 2 * ell as u64 + 1);
            assert_eq!(multiplicity(3, ell).unwrap(), (ell as u64 + 1).pow(2));
        }
    }

    #[test]
    fn multiplicity_rejects_bad_domain() {
        assert!(multiplicity(0, 3).is_err());
    }

    #[test]
    fn lambda_sq_shifted_square_identity() {
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let half = (d as f64 - 1.0) / 2.0;
            let mut prev = -1.0;
            for ell in 0..=500u32 {
                let l = ell as f64;
                let direct = ctx.lambda_sq(ell);
                let shifted = (l + half) * (l + half) - half * half;
                assert_eq!(direct, shifted);
                assert!(direct > prev);
                prev = direct;
            }
        }
    }

    #[test]
    fn points_reject_off_sphere_coords() {
        assert!(Point::new(vec![1.0, 1.0, 0.0]).is_err());
        assert!(Point::normalized(vec![0.0, 0.0, 0.0]).is_err());
    }
}
