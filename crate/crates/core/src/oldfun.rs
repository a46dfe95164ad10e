//! Highest-weight eigenfunctions concentrating on closed geodesics, finite
//! convex combinations of them, and the zonal correction that makes a
//! combination vanish on a scatterer set.
//!
//! A closed geodesic is carried by an oriented 2-plane `span(u, v)`; the
//! beam is `Y_ell(x) = c_ell (<u, x> + i <v, x>)^ell`, evaluated in
//! log-magnitude/phase form. With `w = u + i v`, two beams overlap as
//! `<Y^1, Y^2> = (conj(w_1) . w_2 / 2)^ell` exactly, so combination norms
//! and cross terms never need spherical quadrature.

use crate::error::{Error, Result};
use crate::geometry::{Point, SphereContext};
use crate::specfun::ln_gamma;
use crate::zonal::{build_interpolation_matrix, certify_invertible, normalized_radial};
use num_complex::Complex64;

/// Minimum scatterer-to-geodesic distance below which the exponential
/// vanishing-correction decay degenerates and is not asserted.
pub const GEODESIC_CLEARANCE: f64 = 1e-6;

/// An oriented closed geodesic, stored as the rotation mapping the
/// reference plane `{x_3 = ... = x_{d+1} = 0}` onto its plane; only the
/// first two columns (an orthonormal pair spanning the plane) enter any
/// evaluation.
#[derive(Debug, Clone)]
pub struct GeodesicFrame {
    d: u32,
    rotation: Vec<f64>, // (d+1) x (d+1), row-major
}

impl GeodesicFrame {
    /// The reference equator through `e_1, e_2`.
    pub fn reference(d: u32) -> Self {
        let n = d as usize + 1;
        let mut rotation = vec![0.0; n * n];
        for i in 0..n {
            rotation[i * n + i] = 1.0;
        }
        GeodesicFrame { d, rotation }
    }

    /// Frame through the plane spanned by `u` and `v` (orthonormalized);
    /// the remaining columns complete an orthogonal matrix with det +1.
    pub fn from_plane(u: &[f64], v: &[f64]) -> Result<Self> {
        if u.len() != v.len() || u.len() < 3 {
            return Err(Error::InvalidArgument(
                "plane vectors must share a length >= 3".into(),
            ));
        }
        let n = u.len();
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        cols.push(normalize(u.to_vec())?);
        cols.push(orthonormalize(v.to_vec(), &cols)?);
        // complete with coordinate vectors
        for i in 0..n {
            if cols.len() == n {
                break;
            }
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            if let Ok(next) = orthonormalize(e, &cols) {
                cols.push(next);
            }
        }
        if cols.len() != n {
            return Err(Error::Singular("could not complete the frame".into()));
        }
        // det +1: flip the last completed column if needed
        if determinant_sign(&cols) < 0.0 {
            let last = cols.len() - 1;
            for x in &mut cols[last] {
                *x = -*x;
            }
        }
        let mut rotation = vec![0.0; n * n];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                rotation[i * n + j] = col[i];
            }
        }
        Ok(GeodesicFrame {
            d: n as u32 - 1,
            rotation,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let n = self.d as usize + 1;
        (0..n).map(|i| self.rotation[i * n + j]).collect()
    }

    /// `w = u + i v` over the plane columns.
    fn isotropic_vector(&self) -> Vec<Complex64> {
        let u = self.column(0);
        let v = self.column(1);
        u.iter()
            .zip(&v)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect()
    }

    /// The geodesic itself, `gamma(s) = cos s u + sin s v`.
    pub fn at(&self, s: f64) -> Point {
        let u = self.column(0);
        let v = self.column(1);
        let coords: Vec<f64> = u
            .iter()
            .zip(&v)
            .map(|(&a, &b)| s.cos() * a + s.sin() * b)
            .collect();
        Point::normalized(coords).expect("frame columns are orthonormal")
    }

    /// Distance from `x` to the geodesic plane, as the latitude angle
    /// `theta` with `cos theta = |<u,x> + i <v,x>|`.
    pub fn latitude(&self, x: &Point) -> f64 {
        let z = self.plane_coordinate(x);
        z.norm().clamp(0.0, 1.0).acos()
    }

    /// `<u, x> + i <v, x>`.
    pub fn plane_coordinate(&self, x: &Point) -> Complex64 {
        let u = self.column(0);
        let v = self.column(1);
        let a: f64 = u.iter().zip(x.coords()).map(|(c, y)| c * y).sum();
        let b: f64 = v.iter().zip(x.coords()).map(|(c, y)| c * y).sum();
        Complex64::new(a, b)
    }

    /// Orthogonality defect of the stored rotation, `max |R^T R - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.d as usize + 1;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n)
                    .map(|k| self.rotation[k * n + i] * self.rotation[k * n + j])
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }
}

fn normalize(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::Singular("degenerate plane vector".into()));
    }
    for x in &mut v {
        *x /= norm;
    }
    Ok(v)
}

fn orthonormalize(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Result<Vec<f64>> {
    for b in basis {
        let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
        for (x, c) in v.iter_mut().zip(b) {
            *x -= dot * c;
        }
    }
    normalize(v)
}

fn determinant_sign(cols: &[Vec<f64>]) -> f64 {
    // Gaussian elimination on a copy; only the sign is needed
    let n = cols.len();
    let mut m: Vec<f64> = (0..n * n).map(|k| cols[k % n][k / n]).collect();
    let mut sign = 1.0;
    for col in 0..n {
        let (p, pv) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pv < 1e-14 {
            return 0.0;
        }
        if p != col {
            for j in 0..n {
                m.swap(col * n + j, p * n + j);
            }
            sign = -sign;
        }
        if m[col * n + col] < 0.0 {
            sign = -sign;
        }
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            for j in col..n {
                m[r * n + j] -= f * m[col * n + j];
            }
        }
    }
    sign
}

/// `ln` of the unit-norm beam prefactor
/// `(2 pi^{(d+1)/2})^{-1/2} (Gamma(ell + (d+1)/2) / Gamma(ell + 1))^{1/2}`.
fn ln_beam_normalizer(d: u32, ell: u32) -> f64 {
    let half = (d as f64 + 1.0) / 2.0;
    0.5 * (ln_gamma(ell as f64 + half) - ln_gamma(ell as f64 + 1.0))
        - 0.5 * (2.0 * std::f64::consts::PI.powf(half)).ln()
}

/// Normalized highest-weight harmonic at `x`, in log-magnitude/phase form
/// so that deep off-plane evaluations underflow to zero instead of losing
/// the phase.
pub fn beam_eval(frame: &GeodesicFrame, ell: u32, x: &Point) -> Complex64 {
    let z = frame.plane_coordinate(x);
    let modulus = z.norm();
    if modulus == 0.0 {
        return if ell == 0 {
            Complex64::new(ln_beam_normalizer(frame.d, 0).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let ln_mag = ln_beam_normalizer(frame.d, ell) + ell as f64 * modulus.min(1.0).ln();
    Complex64::from_polar(ln_mag.exp(), ell as f64 * z.arg())
}

/// `<Y^1, Y^2>` of two unit beams of equal degree: the coherent-state
/// overlap `(conj(w_1) . w_2 / 2)^ell`, evaluated in polar form.
pub fn beam_overlap(a: &GeodesicFrame, b: &GeodesicFrame, ell: u32) -> Result<Complex64> {
    if a.d != b.d {
        return Err(Error::Incompatible(
            "frames live on different spheres".into(),
        ));
    }
    let wa = a.isotropic_vector();
    let wb = b.isotropic_vector();
    let dot: Complex64 = wa
        .iter()
        .zip(&wb)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        / 2.0;
    let r = dot.norm();
    if r == 0.0 {
        return Ok(Complex64::new(if ell == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    Ok(Complex64::from_polar(
        (ell as f64 * r.min(1.0).ln()).exp(),
        ell as f64 * dot.arg(),
    ))
}

/// A convex combination of beams at one degree,
/// `Y^T = sum sqrt(b_gamma) Y^gamma`.
#[derive(Debug, Clone)]
pub struct BeamCombination {
    ctx: SphereContext,
    frames: Vec<GeodesicFrame>,
    weights: Vec<f64>,
    ell: u32,
}

impl BeamCombination {
    pub fn new(
        ctx: SphereContext,
        frames: Vec<GeodesicFrame>,
        weights: Vec<f64>,
        ell: u32,
    ) -> Result<Self> {
        if frames.is_empty() || frames.len() != weights.len() {
            return Err(Error::InvalidArgument(
                "need matching nonempty frame and weight lists".into(),
            ));
        }
        if frames.iter().any(|f| f.d() != ctx.d()) {
            return Err(Error::Incompatible(
                "frame dimension does not match the context".into(),
            ));
        }
        if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidArgument(
                "beam weights must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "beam weights must sum to 1, got {total}"
            )));
        }
        Ok(BeamCombination {
            ctx,
            frames,
            weights,
            ell,
        })
    }

    pub fn single(ctx: SphereContext, frame: GeodesicFrame, ell: u32) -> Result<Self> {
        BeamCombination::new(ctx, vec![frame], vec![1.0], ell)
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn frames(&self) -> &[GeodesicFrame] {
        &self.frames
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same combination at a different degree.
    pub fn at_degree(&self, ell: u32) -> BeamCombination {
        BeamCombination {
            ctx: self.ctx,
            frames: self.frames.clone(),
            weights: self.weights.clone(),
            ell,
        }
    }

    pub fn eval(&self, x: &Point) -> Complex64 {
        self.frames
            .iter()
            .zip(&self.weights)
            .map(|(f, &w)| w.sqrt() * beam_eval(f, self.ell, x))
            .sum()
    }

    /// Exact `||Y^T||^2` through the pairwise coherent-state overlaps.
    pub fn norm_sq(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (i, (fi, &wi)) in self.frames.iter().zip(&self.weights).enumerate() {
            acc += wi; // the diagonal overlap is exactly 1
            for (fj, &wj) in self.frames.iter().zip(&self.weights).skip(i + 1) {
                let cross = beam_overlap(fi, fj, self.ell)?;
                acc += 2.0 * (wi * wj).sqrt() * cross.re;
            }
        }
        Ok(acc)
    }

    /// Smallest distance from `q` to any of the carrier geodesics (the
    /// latitude angle to the nearest plane).
    pub fn clearance(&self, q: &Point) -> f64 {
        self.frames
            .iter()
            .map(|f| f.latitude(q))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Result of forcing a beam combination to vanish on a scatterer set by
/// subtracting `sum alpha_q z_ell^q`.
#[derive(Debug, Clone)]
pub struct VanishingCorrection {
    pub alpha: Vec<Complex64>,
    /// `max_Q |w_ell(p)|` after the solve.
    pub defect: f64,
    /// `||Y_vec||`, the right-hand-side magnitude the defect compares to.
    pub rhs_norm: f64,
    /// Exact `||w_ell - Y^T||_{L^2} = ||sum alpha_q z_ell^q||`.
    pub correction_norm: f64,
    /// `sum |alpha_q|`, the triangle bound on the same quantity.
    pub correction_bound: f64,
}

/// Solves the interpolation system `Z_ell alpha = Y_vec` and reports the
/// corrected function's vanishing defect; fails explicitly when the matrix
/// is not Gershgorin-certified (caller raises `ell`).
pub fn vanishing_correction(
    ctx: &SphereContext,
    beam: &BeamCombination,
    scatterers: &[Point],
) -> Result<VanishingCorrection> {
    let ell = beam.ell();
    let matrix = build_interpolation_matrix(ctx, scatterers, ell)?;
    let cert = certify_invertible(&matrix);
    if !cert.invertible {
        return Err(Error::Singular(format!(
            "interpolation matrix not certified invertible at ell = {ell}; raise the degree"
        )));
    }
    let rhs: Vec<Complex64> = scatterers.iter().map(|p| beam.eval(p)).collect();
    let alpha = matrix.solve(&rhs)?;
    // the corrected function at the scatterers
    let mut defect = 0.0f64;
    for p in scatterers {
        let mut w = beam.eval(p);
        for (j, q) in scatterers.iter().enumerate() {
            let cos_r = p.dot(q).clamp(-1.0, 1.0);
            w -= alpha[j] * normalized_radial(ctx, ell, cos_r)?;
        }
        defect = defect.max(w.norm());
    }
    let rhs_norm = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    // ||sum alpha_q z^q||^2 = alpha^dagger Mtilde alpha with Mtilde the
    // normalized cross-value matrix
    let diag = matrix.entry(0, 0);
    let n = scatterers.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += (alpha[i].conj() * alpha[j]).re * matrix.entry(i, j) / diag;
        }
    }
    let correction_norm = quad.max(0.0).sqrt();
    let correction_bound = alpha.iter().map(|a| a.norm()).sum();
    Ok(VanishingCorrection {
        alpha,
        defect,
        rhs_norm,
        correction_norm,
        correction_bound,
    })
}

/// One row of the position-observable limit check: the matrix element
/// `<Y, cos^m r_q Y>` against the geodesic-average limit.
#[derive(Debug, Clone, Copy)]
pub struct BeamObservableRow {
    pub ell: u32,
    pub power: u32,
    pub matrix_element: f64,
    pub geodesic_limit: f64,
}

/// `<Y^gamma, cos^m r_q Y^gamma>` for a single beam, analytically: the
/// moments of `(x_1^2 + x_2^2)^ell` against one or two coordinates reduce
/// to the ratio `J_{ell+1} / J_ell = (ell + 1) / (ell + (d+1)/2)`.
pub fn beam_position_moment(
    ctx: &SphereContext,
    frame: &GeodesicFrame,
    ell: u32,
    q: &Point,
    power: u32,
) -> Result<f64> {
    let z = frame.plane_coordinate(q);
    let in_plane = z.norm_sqr(); // q_1^2 + q_2^2 in frame coordinates
    match power {
        1 => Ok(0.0), // odd moments of the beam density vanish
        2 => {
            let d = ctx.d() as f64;
            let ratio = (ell as f64 + 1.0) / (ell as f64 + (d + 1.0) / 2.0);
            Ok(in_plane * ratio / 2.0 + (1.0 - in_plane) * (1.0 - ratio) / (d - 1.0))
        }
        _ => Err(Error::InvalidArgument(
            "position moments implemented for powers 1 and 2".into(),
        )),
    }
}

/// `int_0^{2 pi} cos^m d(gamma(s), q) ds / (2 pi)` in closed form.
pub fn geodesic_average(frame: &GeodesicFrame, q: &Point, power: u32) -> Result<f64> {
    let z = frame.plane_coordinate(q);
    match power {
        1 => Ok(0.0),
        2 => Ok(z.norm_sqr() / 2.0),
        _ => Err(Error::InvalidArgument(
            "geodesic averages implemented for powers 1 and 2".into(),
        )),
    }
}

/// Limit table `<Y, cos^m r_q Y> -> int cos^m d(gamma(s), q) ds / 2 pi`
/// for a single beam over a list of degrees, `m in {1, 2}`.
pub fn beam_observable_check(
    ctx: &SphereContext,
    frame: &GeodesicFrame,
    q: &Point,
    ells: &[u32],
) -> Result<Vec<BeamObservableRow>> {
    let mut rows = Vec::new();
    for &ell in ells {
        for power in [1u32, 2] {
            rows.push(BeamObservableRow {
                ell,
                power,
                matrix_element: beam_position_moment(ctx, frame, ell, q, power)?,
                geodesic_limit: geodesic_average(frame, q, power)?,
            });
        }
    }
    Ok(rows)
}
