//! Truncated Green's-function eigenvectors `G_h^{Q, beta}` over the
//! normalized zonal basis, the four high-energy scenarios with their series
//! constants and quasimode references, and the weight-to-coefficient
//! chooser realizing prescribed flow-out weights.
//!
//! For an antipodal pair `Q = {q, -q}` the whole object collapses onto the
//! center `q`: the coefficient of `z_ell^q` is
//! `(beta_q + (-1)^ell beta_{-q}) sqrt(m_ell / vol) / (lambda_ell^2 - h^-2)`,
//! with the resonant term dropped when `h^-2` sits on the spectrum.

use crate::error::{Error, Result};
use crate::geometry::{geodesic_distance, Point, ScattererSet, SphereContext};
use crate::specfun;
use num_complex::Complex64;

/// Fractional offsets below this are folded onto the spectrum.
pub const ON_SPECTRUM_TOL: f64 = 1e-12;

/// Default scenario-2-vs-3 cut: ratio above `1 / tolerance` means the
/// resonant term dominates (scenario 2).
pub const DEFAULT_CLASSIFY_TOLERANCE: f64 = 1e-3;

/// Semiclassical energy `h^-2 = (ell_n + sigma_n)(ell_n + sigma_n + d - 1)`
/// split into the nearest spectral index and the fractional offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalPoint {
    d: u32,
    ell_n: u32,
    sigma_n: f64,
    on_spectrum: bool,
}

impl SemiclassicalPoint {
    /// Splits a given `h in (0, 1)`; offsets within [`ON_SPECTRUM_TOL`] of
    /// an integer are folded to `sigma_n = 0` and flagged on-spectrum.
    pub fn from_h(ctx: &SphereContext, h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "semiclassical parameter must satisfy 0 < h < 1, got {h}"
            )));
        }
        let dm1 = ctx.d() as f64 - 1.0;
        let target = 1.0 / (h * h);
        let x = 0.5 * (-dm1 + (dm1 * dm1 + 4.0 * target).sqrt());
        let mut ell = x.floor();
        let mut sigma = x - ell;
        if sigma > 1.0 - ON_SPECTRUM_TOL {
            ell += 1.0;
            sigma = 0.0;
        } else if sigma < ON_SPECTRUM_TOL {
            sigma = 0.0;
        }
        Ok(SemiclassicalPoint {
            d: ctx.d(),
            ell_n: ell as u32,
            sigma_n: sigma,
            on_spectrum: sigma == 0.0,
        })
    }

    /// Off-spectrum point with prescribed `(ell_n, sigma_n)`, `sigma_n` in
    /// `(0, 1)`; `sigma_n = 0` lands exactly on the spectrum.
    pub fn from_ell_sigma(ctx: &SphereContext, ell_n: u32, sigma_n: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&sigma_n) {
            return Err(Error::InvalidArgument(format!(
                "fractional offset must lie in [0, 1), got {sigma_n}"
            )));
        }
        Ok(SemiclassicalPoint {
            d: ctx.d(),
            ell_n,
            sigma_n,
            on_spectrum: sigma_n == 0.0,
        })
    }

    pub fn ell_n(&self) -> u32 {
        self.ell_n
    }

    pub fn sigma_n(&self) -> f64 {
        self.sigma_n
    }

    pub fn on_spectrum(&self) -> bool {
        self.on_spectrum
    }

    /// Parity sign `(-1)^{ell_n}`.
    pub fn rho(&self) -> i32 {
        if self.ell_n.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn h_inv_sq(&self) -> f64 {
        let x = self.ell_n as f64 + self.sigma_n;
        x * (x + self.d as f64 - 1.0)
    }

    pub fn h(&self) -> f64 {
        1.0 / self.h_inv_sq().sqrt()
    }

    /// `lambda_{ell_n + k}^2 - h^-2` in the cancellation-free factored form
    /// `(k - sigma_n)(2 ell_n + k + sigma_n + d - 1)`.
    pub fn resolvent_denominator(&self, k: i64) -> f64 {
        let kf = k as f64;
        (kf - self.sigma_n) * (2.0 * self.ell_n as f64 + kf + self.sigma_n + self.d as f64 - 1.0)
    }
}

/// Antipodal-pair coefficient `beta_q + (-1)^ell beta_{-q}` at absolute
/// degree `ell`.
fn pair_weight_at_degree(beta: &[Complex64; 2], ell: u32) -> Complex64 {
    if ell.is_multiple_of(2) {
        beta[0] + beta[1]
    } else {
        beta[0] - beta[1]
    }
}

/// Same combination indexed by window offset `k` and base parity `rho`.
fn pair_weight_at_offset(beta: &[Complex64; 2], rho: i32, k: i64) -> Complex64 {
    let sign = rho as f64 * if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    beta[0] + sign * beta[1]
}

/// A truncated `G_h^{Q, beta}` for `Q = {q, -q}` (singleton via
/// `beta = (beta_q, 0)`).
#[derive(Debug, Clone)]
pub struct GreensSpec {
    ctx: SphereContext,
    center: Point,
    beta: [Complex64; 2],
    point: SemiclassicalPoint,
    ell_max: u32,
}

impl GreensSpec {
    pub fn new(
        ctx: SphereContext,
        center: Point,
        beta: [Complex64; 2],
        point: SemiclassicalPoint,
        ell_max: u32,
    ) -> Result<Self> {
        ctx.require_low_dim()?;
        if center.sphere_dim() != ctx.d() {
            return Err(Error::Incompatible(
                "center dimension does not match the context".into(),
            ));
        }
        if beta[0].norm_sqr() + beta[1].norm_sqr() == 0.0 {
            return Err(Error::InvalidArgument(
                "coefficient vector beta must be nonzero".into(),
            ));
        }
        if ell_max < 2 * point.ell_n() {
            return Err(Error::InvalidArgument(format!(
                "truncation ell_max = {ell_max} must be at least 2 ell_n = {}",
                2 * point.ell_n()
            )));
        }
        Ok(GreensSpec {
            ctx,
            center,
            beta,
            point,
            ell_max,
        })
    }

    /// Default truncation `max(4 ell_n, ell_n + 10^4)`; keeps desk-scale
    /// runs fast while the analytic remainder stays auditable.
    pub fn with_default_truncation(
        ctx: SphereContext,
        center: Point,
        beta: [Complex64; 2],
        point: SemiclassicalPoint,
    ) -> Result<Self> {
        let ell_max = (4 * point.ell_n()).max(point.ell_n() + 10_000);
        GreensSpec::new(ctx, center, beta, point, ell_max)
    }

    pub fn ctx(&self) -> &SphereContext {
        &self.ctx
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn beta(&self) -> &[Complex64; 2] {
        &self.beta
    }

    pub fn point(&self) -> &SemiclassicalPoint {
        &self.point
    }

    pub fn ell_max(&self) -> u32 {
        self.ell_max
    }

    /// On-spectrum admissibility: the resonant combination
    /// `beta_q + (-1)^{ell_h} beta_{-q}` must vanish.
    pub fn is_admissible(&self) -> bool {
        if !self.point.on_spectrum {
            return true;
        }
        let w = pair_weight_at_degree(&self.beta, self.point.ell_n);
        let scale = (self.beta[0].norm_sqr() + self.beta[1].norm_sqr()).sqrt();
        w.norm() <= 1e-10 * scale
    }

    /// Analytic bound on the squared-norm mass dropped beyond `ell_max`.
    pub fn tail_remainder_bound(&self) -> f64 {
        let d = self.ctx.d() as f64;
        let c_d = if self.ctx.d() == 2 { 3.0 } else { 4.0 };
        let beta_mass = (self.beta[0].norm() + self.beta[1].norm()).powi(2);
        let l = self.ell_max as f64;
        // |c_ell|^2 <= beta_mass c_d ell^(d-1) / (vol (ell^2/2)^2) past 2 ell_n
        8.0 * beta_mass * c_d / (self.ctx.vol_sphere() * (4.0 - d) * l.powf(4.0 - d))
    }
}

/// Coefficients over the orthonormal basis `{z_ell^q}` for one center,
/// indices `0..=ell_max`.
#[derive(Debug, Clone)]
pub struct ZonalExpansion {
    ctx: SphereContext,
    center: Point,
    coeffs: Vec<Complex64>,
}

impl ZonalExpansion {
    pub fn new(ctx: SphereContext, center: Point, coeffs: Vec<Complex64>) -> Self {
        ZonalExpansion {
            ctx,
            center,
            coeffs,
        }
    }

    /// The basis vector `z_ell^q` itself.
    pub fn basis_vector(ctx: SphereContext, center: Point, ell: u32, ell_max: u32) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); ell_max as usize + 1];
        coeffs[ell as usize] = Complex64::new(1.0, 0.0);
        ZonalExpansion {
            ctx,
            center,
            coeffs,
        }
    }

    pub fn ctx(&self) -> &SphereContext {
        &self.ctx
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn ell_max(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> ZonalExpansion {
        let n = self.norm();
        ZonalExpansion {
            ctx: self.ctx,
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|c| c / n).collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> ZonalExpansion {
        ZonalExpansion {
            ctx: self.ctx,
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|c| z * c).collect(),
        }
    }

    /// `<self, other>` for a shared center (conjugate-linear on the left).
    pub fn inner(&self, other: &ZonalExpansion) -> Result<Complex64> {
        self.check_same_center(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `||self - other||` over the common index range (missing indices count
    /// as zeros).
    pub fn distance(&self, other: &ZonalExpansion) -> Result<f64> {
        self.check_same_center(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.coeffs.get(i).copied().unwrap_or(zero);
            let b = other.coeffs.get(i).copied().unwrap_or(zero);
            acc += (a - b).norm_sqr();
        }
        Ok(acc.sqrt())
    }

    /// `<self, other>` across centers, through the analytic cross values
    /// `<z_ell^p, z_ell^q> = C_ell(cos d(p, q)) / C_ell(1)`.
    pub fn cross_inner(&self, other: &ZonalExpansion) -> Result<Complex64> {
        if self.ctx != other.ctx {
            return Err(Error::Incompatible("mismatched sphere contexts".into()));
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let r = geodesic_distance(&self.center, &other.center);
        let ratios = specfun::gegenbauer_ratio_seq(self.ctx.alpha(), r.cos(), n as u32 - 1)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .zip(&ratios)
            .map(|((a, b), &r)| a.conj() * b * r)
            .sum())
    }

    /// Squared norm of the projection onto degrees `lo..=hi` (clamped;
    /// an empty window has zero mass).
    pub fn window_norm_sq(&self, lo: i64, hi: i64) -> f64 {
        if lo > hi || hi < 0 || lo > self.ell_max() as i64 {
            return 0.0;
        }
        let lo = lo.max(0) as usize;
        let hi = (hi.min(self.ell_max() as i64)) as usize;
        self.coeffs[lo..=hi].iter().map(|c| c.norm_sqr()).sum()
    }

    fn check_same_center(&self, other: &ZonalExpansion) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::Incompatible("mismatched sphere contexts".into()));
        }
        if geodesic_distance(&self.center, &other.center) > 1e-12 {
            return Err(Error::Incompatible(
                "expansions have different centers; use cross_inner".into(),
            ));
        }
        Ok(())
    }
}

/// Builds the truncated `G_h^{Q, beta}` as a coefficient vector over
/// `{z_ell^q}`, dropping the resonant degree when on-spectrum.
pub fn build_greens(spec: &GreensSpec) -> Result<ZonalExpansion> {
    if !spec.is_admissible() {
        return Err(Error::InvalidArgument(
            "on-spectrum h with inadmissible beta: resonant combination does not vanish".into(),
        ));
    }
    let ctx = spec.ctx;
    let point = spec.point;
    let vol = ctx.vol_sphere();
    let mut coeffs = Vec::with_capacity(spec.ell_max as usize + 1);
    for ell in 0..=spec.ell_max {
        if point.on_spectrum && ell == point.ell_n {
            coeffs.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let w = pair_weight_at_degree(&spec.beta, ell);
        let k = ell as i64 - point.ell_n as i64;
        let denom = point.resolvent_denominator(k);
        let znorm = (ctx.multiplicity(ell) as f64 / vol).sqrt();
        coeffs.push(w * (znorm / denom));
    }
    Ok(ZonalExpansion::new(ctx, spec.center.clone(), coeffs))
}

/// The four high-energy regimes of an antipodal-pair sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Off-spectrum, `sigma in (0, 1)`.
    One,
    /// Boundary `sigma`, resonant combination dominates the offset.
    Two,
    /// Boundary `sigma`, resonant combination comparable to the offset.
    Three,
    /// On-spectrum with the resonant combination vanishing identically.
    Four,
}

impl Scenario {
    pub fn index(&self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
            Scenario::Three => 3,
            Scenario::Four => 4,
        }
    }
}

/// One element of a classified sequence.
#[derive(Debug, Clone)]
pub struct ScenarioSample {
    pub point: SemiclassicalPoint,
    pub beta: [Complex64; 2],
}

/// Limit data of a classified sequence: scenario, `sigma`, `beta`, parity,
/// the scenario-3 ratio limit `c`, and the series normalizer (`C` or `D`),
/// absent for scenario 2.
#[derive(Debug, Clone)]
pub struct ScenarioClassification {
    pub scenario: Scenario,
    pub sigma: f64,
    pub beta: [Complex64; 2],
    pub rho: i32,
    pub c_limit: Option<Complex64>,
    pub constant: Option<f64>,
}

fn normalize_beta(beta: &[Complex64; 2]) -> Result<[Complex64; 2]> {
    let norm = (beta[0].norm_sqr() + beta[1].norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("zero beta in sequence".into()));
    }
    Ok([beta[0] / norm, beta[1] / norm])
}

/// Decides which scenario a tail of `(h_n, beta_n)` samples belongs to.
///
/// `tolerance` plays two roles, both as in the defaults of the experiment
/// layer: offsets oscillating by more than it fail classification, and the
/// 2-vs-3 dichotomy puts the cut at ratio `1 / tolerance` on the last
/// element. Boundary limits are also accepted when the offsets approach 0
/// or 1 monotonically and finish within 0.2 of the boundary.
pub fn classify(samples: &[ScenarioSample], tolerance: f64) -> Result<ScenarioClassification> {
    if samples.len() < 3 {
        return Err(Error::Classification(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    if tolerance <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let rho = samples[0].point.rho();
    if samples.iter().any(|s| s.point.rho() != rho) {
        return Err(Error::Classification(
            "mixed parity of ell_n across the sequence".into(),
        ));
    }
    let on_spectrum = samples[0].point.on_spectrum();
    if samples.iter().any(|s| s.point.on_spectrum() != on_spectrum) {
        return Err(Error::Classification(
            "sequence mixes on-spectrum and off-spectrum energies".into(),
        ));
    }
    let betas: Vec<[Complex64; 2]> = samples
        .iter()
        .map(|s| normalize_beta(&s.beta))
        .collect::<Result<_>>()?;
    let beta = betas[betas.len() - 1];
    let last = &samples[samples.len() - 1];

    if on_spectrum {
        for (s, b) in samples.iter().zip(&betas) {
            let w = pair_weight_at_degree(b, s.point.ell_n());
            if w.norm() > 1e-10 {
                return Err(Error::Classification(
                    "on-spectrum sample violates the vanishing-combination condition".into(),
                ));
            }
        }
        let mut cls = ScenarioClassification {
            scenario: Scenario::Four,
            sigma: 0.0,
            beta,
            rho,
            c_limit: None,
            constant: None,
        };
        cls.constant = Some(series_constant(&cls)?.constant);
        return Ok(cls);
    }

    let tail: Vec<f64> = samples
        .iter()
        .rev()
        .take(3)
        .map(|s| s.point.sigma_n())
        .collect();
    let (s3, s2, s1) = (tail[0], tail[1], tail[2]); // s3 is the last element
    let spread = (s1 - s2).abs().max((s2 - s3).abs()).max((s1 - s3).abs());
    let sigma_limit = if spread <= tolerance {
        if s3 <= tolerance {
            0.0
        } else if s3 >= 1.0 - tolerance {
            1.0
        } else {
            s3
        }
    } else if s1 > s2 && s2 > s3 && s3 < 0.2 {
        0.0
    } else if s1 < s2 && s2 < s3 && s3 > 0.8 {
        1.0
    } else {
        return Err(Error::Classification(format!(
            "fractional offsets do not settle: tail = [{s1}, {s2}, {s3}], spread {spread} > {tolerance}"
        )));
    };

    if sigma_limit > 0.0 && sigma_limit < 1.0 {
        let mut cls = ScenarioClassification {
            scenario: Scenario::One,
            sigma: sigma_limit,
            beta,
            rho,
            c_limit: None,
            constant: None,
        };
        cls.constant = Some(series_constant(&cls)?.constant);
        return Ok(cls);
    }

    // boundary: scenario 2 vs 3 on the last element
    let w = pair_weight_at_offset(&beta, rho, sigma_limit as i64);
    let gap = (sigma_limit - last.point.sigma_n()).abs();
    if gap == 0.0 {
        return Err(Error::Classification(
            "offset coincides with the boundary but the energy is off-spectrum".into(),
        ));
    }
    let ratio = w.norm() / gap;
    if ratio > 1.0 / tolerance {
        Ok(ScenarioClassification {
            scenario: Scenario::Two,
            sigma: sigma_limit,
            beta,
            rho,
            c_limit: None,
            constant: None,
        })
    } else {
        let c = pair_weight_at_offset(&beta, rho, sigma_limit as i64)
            / Complex64::new(sigma_limit - last.point.sigma_n(), 0.0);
        let mut cls = ScenarioClassification {
            scenario: Scenario::Three,
            sigma: sigma_limit,
            beta,
            rho,
            c_limit: Some(c),
            constant: None,
        };
        cls.constant = Some(series_constant(&cls)?.constant);
        Ok(cls)
    }
}

/// The scenario normalizer with both computation routes: the lattice series
/// (partial sum plus trigamma tails) and, where one exists, the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConstant {
    /// `C_{sigma, beta, rho}` (scenarios 1/3) or `D_beta` (scenario 4).
    pub constant: f64,
    /// Squared value from direct summation.
    pub series_sq: f64,
    /// Squared value from the closed form, when available.
    pub closed_form_sq: Option<f64>,
}

/// `sum_k w_{par(k)}^2 / (k - sigma)^2` over `k in Z`, optionally skipping
/// the lattice point at `sigma` itself (boundary scenarios). Partial sum to
/// `|k| <= 20000` plus parity-split trigamma tails.
fn lattice_sum(w_even_sq: f64, w_odd_sq: f64, sigma: f64, skip_at_sigma: bool) -> f64 {
    const K: i64 = 20_000;
    let mut acc = 0.0;
    for k in -K..=K {
        if skip_at_sigma && k as f64 == sigma {
            continue;
        }
        let w2 = if k.rem_euclid(2) == 0 {
            w_even_sq
        } else {
            w_odd_sq
        };
        let diff = k as f64 - sigma;
        acc += w2 / (diff * diff);
    }
    let m = (K / 2) as f64;
    // positive side, k > K: even k = 2m', odd k = 2m' + 1
    acc += 0.25 * w_even_sq * specfun::trigamma(m + 1.0 - sigma / 2.0);
    acc += 0.25 * w_odd_sq * specfun::trigamma(m + (1.0 - sigma) / 2.0);
    // negative side, k < -K
    acc += 0.25 * w_even_sq * specfun::trigamma(m + 1.0 + sigma / 2.0);
    acc += 0.25 * w_odd_sq * specfun::trigamma(m + (1.0 + sigma) / 2.0);
    acc
}

/// Computes the scenario's series normalizer. Scenario 2 has none and is
/// rejected.
pub fn series_constant(cls: &ScenarioClassification) -> Result<SeriesConstant> {
    let w_even = (cls.beta[0] + cls.rho as f64 * cls.beta[1]).norm_sqr();
    let w_odd = (cls.beta[0] - cls.rho as f64 * cls.beta[1]).norm_sqr();
    match cls.scenario {
        Scenario::Two => Err(Error::InvalidArgument(
            "scenario 2 has no series constant".into(),
        )),
        Scenario::One => {
            let series_sq = lattice_sum(w_even, w_odd, cls.sigma, false);
            let closed = closed_form_interior(cls.sigma, cls.rho, &cls.beta);
            Ok(SeriesConstant {
                constant: series_sq.sqrt(),
                series_sq,
                closed_form_sq: Some(closed),
            })
        }
        Scenario::Three => {
            let c = cls.c_limit.unwrap_or(Complex64::new(0.0, 0.0));
            let series_sq = c.norm_sqr() + lattice_sum(w_even, w_odd, cls.sigma, true);
            // closed form |c|^2 + pi^2 |beta_q|^2 is valid when the
            // boundary-parity combination vanishes exactly
            let w_boundary = pair_weight_at_offset(&cls.beta, cls.rho, cls.sigma as i64);
            let closed = if w_boundary.norm() < 1e-9 {
                Some(c.norm_sqr() + std::f64::consts::PI.powi(2) * cls.beta[0].norm_sqr())
            } else {
                None
            };
            Ok(SeriesConstant {
                constant: series_sq.sqrt(),
                series_sq,
                closed_form_sq: closed,
            })
        }
        Scenario::Four => {
            let series_sq = lattice_sum(w_even, w_odd, 0.0, true);
            let closed = Some(std::f64::consts::PI.powi(2) * cls.beta[0].norm_sqr());
            Ok(SeriesConstant {
                constant: series_sq.sqrt(),
                series_sq,
                closed_form_sq: closed,
            })
        }
    }
}

/// Closed form of `C^2` for interior `sigma`:
/// `(2 pi)^2 / |1 - e^{2 pi i sigma}|^2` times the average of the two
/// endpoint weights `|beta_q + rho beta_{-q} e^{+-i pi sigma}|^2`.
pub fn closed_form_interior(sigma: f64, rho: i32, beta: &[Complex64; 2]) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let phase = Complex64::from_polar(1.0, two_pi * sigma);
    let denom = (Complex64::new(1.0, 0.0) - phase).norm_sqr();
    let plus = (beta[0]
        + rho as f64 * beta[1] * Complex64::from_polar(1.0, std::f64::consts::PI * sigma))
    .norm_sqr();
    let minus = (beta[0]
        + rho as f64 * beta[1] * Complex64::from_polar(1.0, -std::f64::consts::PI * sigma))
    .norm_sqr();
    two_pi * two_pi / denom * 0.5 * (plus + minus)
}

/// Normalized flow-out weights `(m_+, m_-)` realized by `(sigma, beta,
/// rho)` in the strong-coupling regime: `|beta_q + rho beta_{-q}
/// e^{+-i pi sigma}|^2` divided by their average.
pub fn pair_flow_weights(sigma: f64, rho: i32, beta: &[Complex64; 2]) -> (f64, f64) {
    let plus = (beta[0]
        + rho as f64 * beta[1] * Complex64::from_polar(1.0, std::f64::consts::PI * sigma))
    .norm_sqr();
    let minus = (beta[0]
        + rho as f64 * beta[1] * Complex64::from_polar(1.0, -std::f64::consts::PI * sigma))
    .norm_sqr();
    let avg = 0.5 * (plus + minus);
    (plus / avg, minus / avg)
}

/// Inverts the weight map: returns a unit `beta = (beta_q, beta_{-q})`
/// whose normalized flow-out weights at `(sigma, rho)` are the requested
/// `(m_plus, m_minus)`. Requires `(m_plus + m_minus) / 2 = 1`.
pub fn choose_beta_for_weights(
    sigma: f64,
    rho: i32,
    m_plus: f64,
    m_minus: f64,
) -> Result<[Complex64; 2]> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "weight chooser needs sigma in (0, 1), got {sigma}"
        )));
    }
    if rho != 1 && rho != -1 {
        return Err(Error::InvalidArgument("rho must be +1 or -1".into()));
    }
    if m_plus < 0.0 || m_minus < 0.0 || ((m_plus + m_minus) / 2.0 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "weights must be nonnegative with mean 1, got ({m_plus}, {m_minus})"
        )));
    }
    let a = Complex64::new(m_plus.sqrt(), 0.0);
    let b = Complex64::new(m_minus.sqrt(), 0.0);
    let sin = (std::f64::consts::PI * sigma).sin();
    let cos = (std::f64::consts::PI * sigma).cos();
    let rho_beta_minus = (a - b) / Complex64::new(0.0, 2.0 * sin);
    let beta_q = (a + b) / 2.0 - rho_beta_minus * cos;
    let beta_minus = rho_beta_minus * rho as f64;
    let beta = normalize_beta(&[beta_q, beta_minus])?;
    let (got_p, got_m) = pair_flow_weights(sigma, rho, &beta);
    if (got_p - m_plus).abs() > 1e-9 || (got_m - m_minus).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "weight inversion failed: target ({m_plus}, {m_minus}), realized ({got_p}, {got_m})"
        )));
    }
    Ok(beta)
}

/// Degree window `[lo, hi]` of the scenario at truncation radius `upsilon`.
pub fn scenario_window(
    cls: &ScenarioClassification,
    point: &SemiclassicalPoint,
    upsilon: u32,
) -> (i64, i64) {
    let center = point.ell_n() as i64;
    match cls.scenario {
        Scenario::One => (center - upsilon as i64, center + upsilon as i64),
        Scenario::Two => {
            let c = center + cls.sigma as i64;
            (c, c)
        }
        Scenario::Three => {
            let c = center + cls.sigma as i64;
            let r = 2 * upsilon as i64 - 1;
            (c - r, c + r)
        }
        Scenario::Four => {
            let r = 2 * upsilon as i64 - 1;
            (center - r, center + r)
        }
    }
}

/// `||Pi_window G||^2` of the unnormalized expansion.
pub fn window_norm(
    expansion: &ZonalExpansion,
    cls: &ScenarioClassification,
    point: &SemiclassicalPoint,
    upsilon: u32,
) -> f64 {
    let (lo, hi) = scenario_window(cls, point, upsilon);
    expansion.window_norm_sq(lo, hi)
}

/// Window norm scaled by `2 (d - 1) vol(S^d) h^{d - 3}`; approaches the
/// squared scenario constant as `h -> 0`, `upsilon -> infinity`.
pub fn normalized_window_norm(
    expansion: &ZonalExpansion,
    cls: &ScenarioClassification,
    point: &SemiclassicalPoint,
    upsilon: u32,
) -> f64 {
    let d = expansion.ctx().d() as f64;
    let raw = window_norm(expansion, cls, point, upsilon);
    raw * 2.0 * (d - 1.0) * expansion.ctx().vol_sphere() * point.h().powf(d - 3.0)
}

/// The scenario's explicit quasimode: a unit-norm window of zonal basis
/// vectors with coefficients frozen at the limit data.
pub fn quasimode_reference(
    cls: &ScenarioClassification,
    ctx: &SphereContext,
    center: &Point,
    ell_n: u32,
    upsilon: u32,
    ell_max: u32,
) -> Result<ZonalExpansion> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); ell_max as usize + 1];
    let base = ell_n as i64;
    let mut push = |idx: i64, v: Complex64| {
        if idx >= 0 && idx <= ell_max as i64 {
            coeffs[idx as usize] = v;
        }
    };
    match cls.scenario {
        Scenario::Two => {
            push(base + cls.sigma as i64, Complex64::new(1.0, 0.0));
            // the caller rotates the overall phase; see quasimode_residual
        }
        Scenario::One => {
            let c = cls
                .constant
                .ok_or_else(|| Error::InvalidArgument("missing normalizer".into()))?;
            for k in -(upsilon as i64)..=upsilon as i64 {
                let x = pair_weight_at_offset(&cls.beta, cls.rho, k)
                    / Complex64::new(k as f64 - cls.sigma, 0.0);
                push(base + k, x / c);
            }
        }
        Scenario::Three => {
            let cnorm = cls
                .constant
                .ok_or_else(|| Error::InvalidArgument("missing normalizer".into()))?;
            let s = cls.sigma as i64;
            push(
                base + s,
                cls.c_limit.unwrap_or(Complex64::new(0.0, 0.0)) / cnorm,
            );
            let r = 2 * upsilon as i64 - 1;
            for k in (s - r)..=(s + r) {
                if k == s {
                    continue;
                }
                let x = pair_weight_at_offset(&cls.beta, cls.rho, k)
                    / Complex64::new(k as f64 - cls.sigma, 0.0);
                push(base + k, x / cnorm);
            }
        }
        Scenario::Four => {
            let dnorm = cls
                .constant
                .ok_or_else(|| Error::InvalidArgument("missing normalizer".into()))?;
            let r = 2 * upsilon as i64 - 1;
            for k in -r..=r {
                if k == 0 {
                    continue;
                }
                let x =
                    pair_weight_at_offset(&cls.beta, cls.rho, k) / Complex64::new(k as f64, 0.0);
                push(base + k, x / dnorm);
            }
        }
    }
    Ok(ZonalExpansion::new(*ctx, center.clone(), coeffs))
}

/// Exact L2 distance between the normalized truncated Green's function and
/// the scenario's quasimode, with the error-budget terms alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasimodeResidual {
    pub residual: f64,
    pub upsilon_h: f64,
    pub sigma_gap: f64,
    pub beta_gap: f64,
    pub upsilon_invsqrt: f64,
    /// `|sigma - sigma_n| / |resonant combination|`, the scenario-2 term.
    pub resonant_ratio: Option<f64>,
}

pub fn quasimode_residual(
    spec: &GreensSpec,
    cls: &ScenarioClassification,
    upsilon: u32,
) -> Result<QuasimodeResidual> {
    if upsilon as f64 > 1.0 / spec.point().h() {
        return Err(Error::InvalidArgument(format!(
            "window radius {upsilon} exceeds h^-1 = {}",
            1.0 / spec.point().h()
        )));
    }
    let g = build_greens(spec)?.normalized();
    let mut reference = quasimode_reference(
        cls,
        spec.ctx(),
        spec.center(),
        spec.point().ell_n(),
        upsilon,
        spec.ell_max(),
    )?;
    if cls.scenario == Scenario::Two {
        // the resonant coefficient inherits the phase of
        // w / (sigma - sigma_n); offsets live on R/Z, so the side of the
        // approach decides the sign of the reference
        let w = pair_weight_at_offset(&cls.beta, cls.rho, cls.sigma as i64);
        let dir = w / Complex64::new(cls.sigma - spec.point().sigma_n(), 0.0);
        if dir.norm() > 0.0 {
            reference = reference.scale(dir / dir.norm());
        }
    }
    let residual = g.distance(&reference)?;
    let beta_n = normalize_beta(spec.beta())?;
    let beta_gap =
        ((beta_n[0] - cls.beta[0]).norm_sqr() + (beta_n[1] - cls.beta[1]).norm_sqr()).sqrt();
    let point = spec.point();
    let w = pair_weight_at_offset(&beta_n, cls.rho, cls.sigma as i64);
    let resonant_ratio = if cls.scenario == Scenario::Two && w.norm() > 0.0 {
        Some((cls.sigma - point.sigma_n()).abs() / w.norm())
    } else {
        None
    };
    Ok(QuasimodeResidual {
        residual,
        upsilon_h: upsilon as f64 * point.h(),
        sigma_gap: (point.sigma_n() - cls.sigma).abs(),
        beta_gap,
        upsilon_invsqrt: 1.0 / (upsilon.max(1) as f64).sqrt(),
        resonant_ratio,
    })
}

/// General scatterer set `Q = A u (-A) u B` with one coefficient per point;
/// builds one per-center expansion for each pair representative and single.
#[derive(Debug, Clone)]
pub struct MultiGreensSpec {
    pub ctx: SphereContext,
    pub set: ScattererSet,
    /// One `(beta_q, beta_{-q})` per antipodal pair, matching `set.pairs()`.
    pub beta_pairs: Vec<[Complex64; 2]>,
    /// One coefficient per single, matching `set.singles()`.
    pub beta_singles: Vec<Complex64>,
    pub point: SemiclassicalPoint,
    pub ell_max: u32,
}

/// A sum of per-center zonal expansions.
#[derive(Debug, Clone)]
pub struct MultiGreens {
    pub components: Vec<ZonalExpansion>,
}

impl MultiGreensSpec {
    pub fn build(&self) -> Result<MultiGreens> {
        if self.beta_pairs.len() != self.set.pairs().len()
            || self.beta_singles.len() != self.set.singles().len()
        {
            return Err(Error::Incompatible(
                "coefficient counts do not match the scatterer decomposition".into(),
            ));
        }
        let mut components = Vec::new();
        for (q, beta) in self.set.pairs().iter().zip(&self.beta_pairs) {
            let spec = GreensSpec::new(self.ctx, q.clone(), *beta, self.point, self.ell_max)?;
            components.push(build_greens(&spec)?);
        }
        for (p, b) in self.set.singles().iter().zip(&self.beta_singles) {
            let spec = GreensSpec::new(
                self.ctx,
                p.clone(),
                [*b, Complex64::new(0.0, 0.0)],
                self.point,
                self.ell_max,
            )?;
            components.push(build_greens(&spec)?);
        }
        Ok(MultiGreens { components })
    }
}

impl MultiGreens {
    /// Exact squared norm including the analytic cross-center terms.
    pub fn norm_sq(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (i, a) in self.components.iter().enumerate() {
            acc += a.norm_sq();
            for b in self.components.iter().skip(i + 1) {
                acc += 2.0 * a.cross_inner(b)?.re;
            }
        }
        Ok(acc)
    }
}
