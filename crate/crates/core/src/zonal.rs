//! Zonal harmonics `Z_ell^q` and their normalized version `z_ell^q` as
//! radial functions of the distance to the center, cross-center evaluations
//! through the reproducing identity, the scatterer interpolation matrix and
//! its Gershgorin certificate.
//!
//! All production inner products between zonal harmonics are analytic;
//! 1-D quadrature appears only in tests as an independent oracle.

use crate::error::{Error, Result};
use crate::geometry::{geodesic_distance, Point, SphereContext};
use crate::specfun;
use num_complex::Complex64;

/// The degree-`ell` zonal harmonic centered at `q`: the reproducing kernel
/// of `ker(Lap - lambda_ell^2)` at `q`, a radial function of `d(x, q)`.
#[derive(Debug, Clone)]
pub struct ZonalHarmonic {
    ctx: SphereContext,
    center: Point,
    ell: u32,
}

impl ZonalHarmonic {
    pub fn new(ctx: SphereContext, center: Point, ell: u32) -> Result<Self> {
        if center.sphere_dim() != ctx.d() {
            return Err(Error::Incompatible(format!(
                "center lives on S^{} but the context is S^{}",
                center.sphere_dim(),
                ctx.d()
            )));
        }
        Ok(ZonalHarmonic { ctx, center, ell })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    /// `||Z_ell^q||^2 = m_ell / vol(S^d)`, which is also the peak value
    /// `Z_ell^q(q)`.
    pub fn norm_sq(&self) -> f64 {
        self.ctx.multiplicity(self.ell) as f64 / self.ctx.vol_sphere()
    }

    /// Radial profile of `Z_ell^q` in the variable `s = cos r`.
    pub fn radial(&self, cos_r: f64) -> Result<f64> {
        zonal_radial(&self.ctx, self.ell, cos_r)
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        zonal_eval(&self.ctx, &self.center, self.ell, x)
    }

    /// Radial profile of the unit-norm version `z_ell^q`.
    pub fn normalized_radial(&self, cos_r: f64) -> Result<f64> {
        Ok(self.norm_sq().sqrt() * specfun::gegenbauer_ratio(self.ctx.alpha(), self.ell, cos_r)?)
    }
}

/// `Z_ell^q(x) = (m_ell / vol(S^d)) C_ell(cos r) / C_ell(1)` with
/// `r = d(x, center)` and Gegenbauer index `(d - 1) / 2`.
pub fn zonal_eval(ctx: &SphereContext, center: &Point, ell: u32, x: &Point) -> Result<f64> {
    let r = geodesic_distance(center, x);
    zonal_radial(ctx, ell, r.cos())
}

/// Radial profile of `Z_ell` in `s = cos r`.
pub fn zonal_radial(ctx: &SphereContext, ell: u32, cos_r: f64) -> Result<f64> {
    let ratio = specfun::gegenbauer_ratio(ctx.alpha(), ell, cos_r)?;
    Ok(ctx.multiplicity(ell) as f64 / ctx.vol_sphere() * ratio)
}

/// Radial profile of the normalized `z_ell` in `s = cos r`.
pub fn normalized_radial(ctx: &SphereContext, ell: u32, cos_r: f64) -> Result<f64> {
    let ratio = specfun::gegenbauer_ratio(ctx.alpha(), ell, cos_r)?;
    Ok((ctx.multiplicity(ell) as f64 / ctx.vol_sphere()).sqrt() * ratio)
}

/// `<Z_ell^p, Z_ell^q> = Z_ell^q(p)`: the reproducing identity evaluates the
/// cross inner product with no quadrature.
pub fn zonal_inner_product(ctx: &SphereContext, p: &Point, q: &Point, ell: u32) -> Result<f64> {
    zonal_eval(ctx, q, ell, p)
}

/// `<z_ell^p, z_ell^q> = C_ell(cos d(p, q)) / C_ell(1)`.
pub fn normalized_inner_product(
    ctx: &SphereContext,
    p: &Point,
    q: &Point,
    ell: u32,
) -> Result<f64> {
    let r = geodesic_distance(p, q);
    specfun::gegenbauer_ratio(ctx.alpha(), ell, r.cos())
}

/// The matrix `(z_ell^q(p))_{p, q}` over a scatterer set, with per-row
/// Gershgorin radii. Real and symmetric; diagonal `sqrt(m_ell / vol)`.
#[derive(Debug, Clone)]
pub struct InterpolationMatrix {
    ell: u32,
    n: usize,
    entries: Vec<f64>,
    gershgorin_radii: Vec<f64>,
}

impl InterpolationMatrix {
    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn gershgorin_radii(&self) -> &[f64] {
        &self.gershgorin_radii
    }

    /// Solves `M x = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs.len() != self.n {
            return Err(Error::Incompatible(format!(
                "rhs length {} does not match matrix size {}",
                rhs.len(),
                self.n
            )));
        }
        let n = self.n;
        let mut a: Vec<f64> = self.entries.clone();
        let mut b: Vec<Complex64> = rhs.to_vec();
        for col in 0..n {
            let (pivot_row, pivot) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pivot < 1e-300 {
                return Err(Error::Singular(format!(
                    "interpolation matrix at ell = {} is numerically singular",
                    self.ell
                )));
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                b.swap(col, pivot_row);
            }
            for r in col + 1..n {
                let factor = a[r * n + col] / a[col * n + col];
                if factor == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= factor * a[col * n + j];
                }
                let pivot_val = b[col];
                b[r] -= factor * pivot_val;
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for row in (0..n).rev() {
            let mut acc = b[row];
            for j in row + 1..n {
                acc -= a[row * n + j] * x[j];
            }
            x[row] = acc / a[row * n + row];
        }
        Ok(x)
    }
}

/// Builds the normalized zonal cross-value matrix over `scatterers` at
/// degree `ell`. Exact duplicates are rejected; antipodal pairs are allowed
/// (they make the matrix singular, which certification reports).
pub fn build_interpolation_matrix(
    ctx: &SphereContext,
    scatterers: &[Point],
    ell: u32,
) -> Result<InterpolationMatrix> {
    let n = scatterers.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty scatterer set".into()));
    }
    for p in scatterers {
        if p.sphere_dim() != ctx.d() {
            return Err(Error::Incompatible(
                "scatterer dimension does not match the context".into(),
            ));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if crate::geometry::is_same_point(&scatterers[i], &scatterers[j]) {
                return Err(Error::InvalidArgument(format!(
                    "scatterers {i} and {j} coincide"
                )));
            }
        }
    }
    let mut entries = vec![0.0; n * n];
    let diag = (ctx.multiplicity(ell) as f64 / ctx.vol_sphere()).sqrt();
    for i in 0..n {
        entries[i * n + i] = diag;
        for j in i + 1..n {
            // snap near-antipodal pairs onto the exact parity dichotomy:
            // the cross value is exactly +-diag there
            let v = if crate::geometry::is_antipodal(&scatterers[i], &scatterers[j]) {
                if ell.is_multiple_of(2) {
                    diag
                } else {
                    -diag
                }
            } else {
                let s = geodesic_distance(&scatterers[i], &scatterers[j]).cos();
                diag * specfun::gegenbauer_ratio(ctx.alpha(), ell, s)?
            };
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    let gershgorin_radii = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| entries[i * n + j].abs())
                .sum()
        })
        .collect();
    Ok(InterpolationMatrix {
        ell,
        n,
        entries,
        gershgorin_radii,
    })
}

/// Outcome of the Gershgorin disk test: invertible iff every disk excludes
/// the origin, with `1 / min_p (|a_pp| - R_p)` as the inverse-norm bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertibilityCertificate {
    pub invertible: bool,
    pub inverse_norm_bound: Option<f64>,
    /// `min_p (|a_pp| - R_p)`, negative when not certified.
    pub margin: f64,
}

pub fn certify_invertible(m: &InterpolationMatrix) -> InvertibilityCertificate {
    let margin = (0..m.size())
        .map(|i| m.entry(i, i).abs() - m.gershgorin_radii[i])
        .fold(f64::INFINITY, f64::min);
    if margin > 0.0 {
        InvertibilityCertificate {
            invertible: true,
            inverse_norm_bound: Some(1.0 / margin),
            margin,
        }
    } else {
        InvertibilityCertificate {
            invertible: false,
            inverse_norm_bound: None,
            margin,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::radial_rule;
    use crate::rng::CounterRng;

    fn point3(x: f64, y: f64, z: f64) -> Point {
        Point::normalized(vec![x, y, z]).unwrap()
    }

    #[test]
    fn peak_value_is_norm_squared() {
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let q = Point::pole(d);
            for ell in [0u32, 1, 7, 33] {
                let z = ZonalHarmonic::new(ctx, q.clone(), ell).unwrap();
                let peak = z.eval(&q).unwrap();
                assert!((peak - z.norm_sq()).abs() < 1e-12 * peak.abs().max(1.0));
            }
        }
    }

    #[test]
    fn degree_one_on_s2_is_cosine_times_three_over_4pi() {
        let ctx = SphereContext::new(2).unwrap();
        let q = Point::pole(2);
        let rng = CounterRng::new(11);
        for c in 0..10 {
            let x = Point::new(rng.unit_vector(c, 3)).unwrap();
            let r = geodesic_distance(&q, &x);
            let want = 3.0 / (4.0 * std::f64::consts::PI) * r.cos();
            let got = zonal_eval(&ctx, &q, 1, &x).unwrap();
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn antipodal_parity() {
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let rng = CounterRng::new(5);
            let q = Point::new(rng.unit_vector(91, d as usize + 1)).unwrap();
            let x = Point::new(rng.unit_vector(92, d as usize + 1)).unwrap();
            for ell in [1u32, 2, 9, 20] {
                let at_x = zonal_eval(&ctx, &q, ell, &x).unwrap();
                let flipped = zonal_eval(&ctx, &q.antipode(), ell, &x).unwrap();
                let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
                assert!((flipped - sign * at_x).abs() <= 1e-12 * at_x.abs().max(1.0));
            }
            // odd-degree value at the antipode of the center
            let ell = 9;
            let at_antipode = zonal_eval(&ctx, &q, ell, &q.antipode()).unwrap();
            let peak = ctx.multiplicity(ell) as f64 / ctx.vol_sphere();
            assert!((at_antipode + peak).abs() < 1e-12 * peak);
        }
    }

    #[test]
    fn center_symmetry() {
        let ctx = SphereContext::new(2).unwrap();
        let p = point3(0.1, -0.7, 0.4);
        let q = point3(0.9, 0.1, 0.2);
        for ell in [0u32, 3, 14] {
            let a = zonal_eval(&ctx, &p, ell, &q).unwrap();
            let b = zonal_eval(&ctx, &q, ell, &p).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn norm_against_quadrature() {
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            for ell in [0u32, 1, 5, 40, 150, 300] {
                let rule = radial_rule(d, 2 * ell as usize + 24).unwrap();
                let z = ZonalHarmonic::new(ctx, Point::pole(d), ell).unwrap();
                let quad = rule.integrate(|s| {
                    let v = z.radial(s).unwrap();
                    v * v
                });
                let analytic = z.norm_sq();
                assert!(
                    (quad - analytic).abs() < 1e-9 * analytic,
                    "d={d} ell={ell}: {quad} vs {analytic}"
                );
            }
        }
    }

    #[test]
    fn cross_inner_product_against_quadrature() {
        // radial-profile product of two harmonics sharing the center
        // collapses to the reproducing value only for equal degrees
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let q = Point::pole(d);
            for (la, lb) in [(5u32, 5u32), (5, 7), (12, 12), (12, 13)] {
                let rule = radial_rule(d, (la + lb) as usize + 24).unwrap();
                let za = ZonalHarmonic::new(ctx, q.clone(), la).unwrap();
                let zb = ZonalHarmonic::new(ctx, q.clone(), lb).unwrap();
                let quad = rule.integrate(|s| {
                    za.normalized_radial(s).unwrap() * zb.normalized_radial(s).unwrap()
                });
                let want = if la == lb { 1.0 } else { 0.0 };
                assert!((quad - want).abs() < 1e-9, "d={d} {la},{lb}: {quad}");
            }
        }
    }

    #[test]
    fn interpolation_matrix_shape_and_certificate() {
        let ctx = SphereContext::new(2).unwrap();
        let single = vec![point3(0.0, 0.0, 1.0)];
        let m = build_interpolation_matrix(&ctx, &single, 12).unwrap();
        assert_eq!(m.size(), 1);
        let diag = (ctx.multiplicity(12) as f64 / ctx.vol_sphere()).sqrt();
        assert!((m.entry(0, 0) - diag).abs() < 1e-14);
        let cert = certify_invertible(&m);
        assert!(cert.invertible);
        assert!((cert.inverse_norm_bound.unwrap() - 1.0 / diag).abs() < 1e-12);

        let generic = vec![
            point3(0.0, 0.0, 1.0),
            point3(1.0, 0.2, -0.1),
            point3(-0.3, 0.9, 0.4),
        ];
        let m = build_interpolation_matrix(&ctx, &generic, 200).unwrap();
        let cert = certify_invertible(&m);
        assert!(cert.invertible, "margin = {}", cert.margin);

        // duplicates rejected
        let dup = vec![point3(0.0, 0.0, 1.0), point3(0.0, 0.0, 1.0)];
        assert!(build_interpolation_matrix(&ctx, &dup, 5).is_err());

        // antipodal pair: singular at every degree, so never certified
        let pair = vec![point3(0.3, 0.4, 0.5), point3(0.3, 0.4, 0.5).antipode()];
        for ell in [10u32, 11] {
            let m = build_interpolation_matrix(&ctx, &pair, ell).unwrap();
            let cert = certify_invertible(&m);
            assert!(!cert.invertible);
            let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
            assert!((m.entry(0, 1) - sign * m.entry(0, 0)).abs() < 1e-10 * m.entry(0, 0));
        }
    }

    #[test]
    fn solver_reproduces_known_solution() {
        let ctx = SphereContext::new(3).unwrap();
        let rng = CounterRng::new(8);
        let pts: Vec<Point> = (0..4)
            .map(|c| Point::new(rng.unit_vector(c, 4)).unwrap())
            .collect();
        let m = build_interpolation_matrix(&ctx, &pts, 60).unwrap();
        let x_true: Vec<Complex64> = (0..4)
            .map(|c| Complex64::new(rng.uniform(100 + c), rng.uniform(200 + c)))
            .collect();
        let rhs: Vec<Complex64> = (0..4)
            .map(|i| (0..4).map(|j| m.entry(i, j) * x_true[j]).sum())
            .collect();
        let x = m.solve(&rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
