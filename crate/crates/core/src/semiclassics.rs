//! Exact banded observables over the zonal basis and analytic integrators
//! for the geodesic flow-out measures.
//!
//! Multiplication by `cos r` acts tridiagonally through the three-term
//! recurrence, and the symmetrized momentum `V_h = (h/i)(sin r d_r +
//! (d/2) cos r)` through the ladder identities; both are banded matrices in
//! the orthonormal basis `{z_ell^q}`, so every quantized word is exact
//! linear algebra. On a unit-speed geodesic leaving `p`, the symbols of a
//! center `c` evaluate to `kappa = cos a cos t + sin a sin t cos psi` and
//! `varsigma = cos a sin t - sin a cos t cos psi` with `a = d(p, c)`, which
//! reduces every measure integral to a (t, psi) quadrature, 1-D when the
//! centers coincide.

use crate::error::{Error, Result};
use crate::geometry::{
    geodesic_distance, is_antipodal, is_same_point, Point, ScattererSet, SphereContext,
};
use crate::greens::{Scenario, ScenarioClassification, ZonalExpansion};
use crate::quad::gauss_legendre;
use num_complex::Complex64;

/// Tensor-quadrature resolution for cross-center flow-out integrals.
const T_NODES: usize = 400;
const PSI_NODES: usize = 200;

/// Grid points excluded around the profile jumps at `t in {0, pi, 2 pi}`
/// where pointwise Fourier convergence fails.
pub const JUMP_EXCLUSION: f64 = 1e-2;

/// A banded matrix over the zonal degrees `0..=ell_max` of one center.
#[derive(Debug, Clone)]
pub struct BandedObservable {
    center: Point,
    dim: usize,
    band: usize,
    /// Row-major band storage: entry `(r, c)` at `r * (2 band + 1) + (c - r
    /// + band)`.
    data: Vec<Complex64>,
}

impl BandedObservable {
    pub fn zero(center: Point, dim: usize, band: usize) -> Self {
        BandedObservable {
            center,
            dim,
            band,
            data: vec![Complex64::new(0.0, 0.0); dim * (2 * band + 1)],
        }
    }

    pub fn identity(center: Point, dim: usize) -> Self {
        let mut m = BandedObservable::zero(center, dim, 0);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.band
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        if row >= self.dim || col >= self.dim {
            return Complex64::new(0.0, 0.0);
        }
        let off = col as i64 - row as i64;
        if off.unsigned_abs() as usize > self.band {
            return Complex64::new(0.0, 0.0);
        }
        self.data[row * (2 * self.band + 1) + (off + self.band as i64) as usize]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        let off = col as i64 - row as i64;
        assert!(
            off.unsigned_abs() as usize <= self.band && row < self.dim && col < self.dim,
            "entry ({row}, {col}) outside the band"
        );
        self.data[row * (2 * self.band + 1) + (off + self.band as i64) as usize] = v;
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (row, o) in out.iter_mut().enumerate() {
            let lo = row.saturating_sub(self.band);
            let hi = (row + self.band).min(self.dim - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, value) in v.iter().enumerate().take(hi + 1).skip(lo) {
                acc += self.get(row, col) * value;
            }
            *o = acc;
        }
        out
    }

    pub fn mul(&self, other: &BandedObservable) -> Result<BandedObservable> {
        self.check_compatible(other)?;
        let band = self.band + other.band;
        let mut out = BandedObservable::zero(self.center.clone(), self.dim, band);
        for row in 0..self.dim {
            let lo = row.saturating_sub(band);
            let hi = (row + band).min(self.dim - 1);
            for col in lo..=hi {
                let klo = row
                    .saturating_sub(self.band)
                    .max(col.saturating_sub(other.band));
                let khi = (row + self.band).min(col + other.band).min(self.dim - 1);
                let mut acc = Complex64::new(0.0, 0.0);
                for k in klo..=khi {
                    acc += self.get(row, k) * other.get(k, col);
                }
                out.set(row, col, acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BandedObservable) -> Result<BandedObservable> {
        self.check_compatible(other)?;
        let band = self.band.max(other.band);
        let mut out = BandedObservable::zero(self.center.clone(), self.dim, band);
        for row in 0..self.dim {
            let lo = row.saturating_sub(band);
            let hi = (row + band).min(self.dim - 1);
            for col in lo..=hi {
                out.set(row, col, self.get(row, col) + other.get(row, col));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> BandedObservable {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= z;
        }
        out
    }

    /// Largest entry of `M - M^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in 0..self.dim {
            let lo = row.saturating_sub(self.band);
            let hi = (row + self.band).min(self.dim - 1);
            for col in lo..=hi {
                worst = worst.max((self.get(row, col) - self.get(col, row).conj()).norm());
            }
        }
        worst
    }

    /// Integer matrix power by repeated banded multiplication.
    pub fn pow(&self, k: u32) -> Result<BandedObservable> {
        let mut acc = BandedObservable::identity(self.center.clone(), self.dim);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn check_compatible(&self, other: &BandedObservable) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Incompatible(format!(
                "banded dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        if !is_same_point(&self.center, &other.center) {
            return Err(Error::Incompatible(
                "banded observables have different centers".into(),
            ));
        }
        Ok(())
    }
}

/// Off-diagonal coupling `<z_{ell+1}, cos r z_ell>` from the three-term
/// recurrence and the basis normalizers `N_ell = sqrt(m_ell / vol) /
/// C_ell(1)`.
fn cos_coupling(ctx: &SphereContext, ell: u32) -> f64 {
    let alpha = ctx.alpha();
    let lf = ell as f64;
    let n_ell =
        (ctx.multiplicity(ell) as f64).sqrt() / crate::specfun::gegenbauer_at_one(alpha, ell);
    let n_up = (ctx.multiplicity(ell + 1) as f64).sqrt()
        / crate::specfun::gegenbauer_at_one(alpha, ell + 1);
    (lf + 1.0) / (2.0 * (lf + alpha)) * n_ell / n_up
}

/// `K`: multiplication by `cos r` about the center, a real symmetric
/// tridiagonal matrix with zero diagonal.
pub fn multiplication_matrix(
    ctx: &SphereContext,
    center: &Point,
    ell_max: u32,
) -> BandedObservable {
    let dim = ell_max as usize + 1;
    let mut m = BandedObservable::zero(center.clone(), dim, 1);
    for ell in 0..ell_max {
        let t = Complex64::new(cos_coupling(ctx, ell), 0.0);
        m.set(ell as usize + 1, ell as usize, t);
        m.set(ell as usize, ell as usize + 1, t);
    }
    m
}

/// `V_h = (h / i)(sin r d_r + (d/2) cos r)`: the symmetrized momentum
/// observable; exactly Hermitian and tridiagonal with zero diagonal,
/// entries `-i h (ell + d/2) t_ell` below the diagonal.
pub fn momentum_matrix(
    ctx: &SphereContext,
    center: &Point,
    h: f64,
    ell_max: u32,
) -> BandedObservable {
    let dim = ell_max as usize + 1;
    let half_d = ctx.d() as f64 / 2.0;
    let mut m = BandedObservable::zero(center.clone(), dim, 1);
    for ell in 0..ell_max {
        let t = cos_coupling(ctx, ell);
        let v = Complex64::new(0.0, -h * (ell as f64 + half_d) * t);
        m.set(ell as usize + 1, ell as usize, v);
        m.set(ell as usize, ell as usize + 1, -v);
    }
    m
}

/// `(K + i s V_h)^k` for `s = +-1`: the banded stand-in for the quantized
/// ladder symbols.
pub fn ladder_power(
    ctx: &SphereContext,
    center: &Point,
    h: f64,
    ell_max: u32,
    k: u32,
    sign: i32,
) -> Result<BandedObservable> {
    let kmat = multiplication_matrix(ctx, center, ell_max);
    let vmat = momentum_matrix(ctx, center, h, ell_max);
    let base = kmat.add(&vmat.scale(Complex64::new(0.0, sign as f64)))?;
    base.pow(k)
}

/// `<u, W v>` with `W` a product of banded observables applied right to
/// left; conjugate-linear on the left, centers must all agree.
pub fn matrix_element(
    u: &ZonalExpansion,
    word: &[&BandedObservable],
    v: &ZonalExpansion,
) -> Result<Complex64> {
    if !is_same_point(u.center(), v.center()) {
        return Err(Error::Incompatible(
            "matrix elements require a shared center; cross-center symbols go through the measure integrator".into(),
        ));
    }
    let mut w = v.coeffs().to_vec();
    for op in word.iter().rev() {
        if !is_same_point(op.center(), u.center()) {
            return Err(Error::Incompatible(
                "observable center differs from the expansion center".into(),
            ));
        }
        if op.dim() != w.len() {
            return Err(Error::Incompatible(format!(
                "observable dimension {} does not cover the expansion ({})",
                op.dim(),
                w.len()
            )));
        }
        w = op.apply(&w);
    }
    Ok(u.coeffs().iter().zip(&w).map(|(a, b)| a.conj() * b).sum())
}

/// Polynomial in the two symbols of one center,
/// `sum c_{ij} kappa^i varsigma^j`.
#[derive(Debug, Clone)]
pub struct SymbolPoly {
    pub center: Point,
    pub terms: Vec<(u32, u32, Complex64)>,
}

impl SymbolPoly {
    pub fn kappa(center: Point) -> Self {
        SymbolPoly {
            center,
            terms: vec![(1, 0, Complex64::new(1.0, 0.0))],
        }
    }

    pub fn varsigma(center: Point) -> Self {
        SymbolPoly {
            center,
            terms: vec![(0, 1, Complex64::new(1.0, 0.0))],
        }
    }

    pub fn constant(center: Point, c: Complex64) -> Self {
        SymbolPoly {
            center,
            terms: vec![(0, 0, c)],
        }
    }

    /// Monomial `kappa^i varsigma^j`.
    pub fn monomial(center: Point, i: u32, j: u32) -> Self {
        SymbolPoly {
            center,
            terms: vec![(i, j, Complex64::new(1.0, 0.0))],
        }
    }

    /// The ladder-form symbol `(1 / ||X||) [sum_{k<=0} X_k (kappa - i
    /// varsigma)^{|k|} + sum_{k>0} X_k (kappa + i varsigma)^k]`, expanded
    /// binomially into the monomial basis.
    pub fn from_ladder_coefficients(center: Point, coeffs: &[(i64, Complex64)]) -> Result<Self> {
        let norm_sq: f64 = coeffs.iter().map(|(_, x)| x.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::InvalidArgument(
                "ladder coefficient vector must be nonzero".into(),
            ));
        }
        let norm = norm_sq.sqrt();
        let mut terms: Vec<(u32, u32, Complex64)> = Vec::new();
        for &(k, x) in coeffs {
            let p = k.unsigned_abs() as u32;
            let sign = if k >= 0 { 1.0 } else { -1.0 };
            // (kappa + i sign varsigma)^p
            for j in 0..=p {
                let mut c = Complex64::new(binomial_f64(p, j), 0.0) * x / norm;
                c *= Complex64::new(0.0, sign).powu(j);
                push_term(&mut terms, p - j, j, c);
            }
        }
        Ok(SymbolPoly { center, terms })
    }

    pub fn eval(&self, kappa: f64, varsigma: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * kappa.powi(i as i32) * varsigma.powi(j as i32))
            .sum()
    }
}

fn push_term(terms: &mut Vec<(u32, u32, Complex64)>, i: u32, j: u32, c: Complex64) {
    for t in terms.iter_mut() {
        if t.0 == i && t.1 == j {
            t.2 += c;
            return;
        }
    }
    terms.push((i, j, c));
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Scatterer set with flow-out weights realizing the mixed measure: each
/// antipodal pair carries half-flow weights `(m_q, m_{-q})`, each single
/// the full invariant measure with weight `m_p`; total mass must be 1.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    ctx: SphereContext,
    set: ScattererSet,
    pair_weights: Vec<(f64, f64)>,
    single_weights: Vec<f64>,
}

impl MeasureSpec {
    pub fn new(
        ctx: SphereContext,
        set: ScattererSet,
        pair_weights: Vec<(f64, f64)>,
        single_weights: Vec<f64>,
    ) -> Result<Self> {
        if pair_weights.len() != set.pairs().len() || single_weights.len() != set.singles().len() {
            return Err(Error::Incompatible(
                "weight counts do not match the scatterer decomposition".into(),
            ));
        }
        let mut mass = 0.0;
        for &(mp, mm) in &pair_weights {
            if !(0.0..=2.0).contains(&mp) || !(0.0..=2.0).contains(&mm) {
                return Err(Error::InvalidArgument(format!(
                    "pair weights must be within [0, 2], got ({mp}, {mm})"
                )));
            }
            mass += 0.5 * (mp + mm);
        }
        for &m in &single_weights {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::InvalidArgument(format!(
                    "single weights must be within [0, 1], got {m}"
                )));
            }
            mass += m;
        }
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "measure weights must sum to total mass 1, got {mass}"
            )));
        }
        Ok(MeasureSpec {
            ctx,
            set,
            pair_weights,
            single_weights,
        })
    }

    /// The invariant single-center measure `nu_q` (one singleton, weight 1).
    pub fn single_flowout(ctx: SphereContext, q: Point) -> Result<Self> {
        MeasureSpec::new(ctx, ScattererSet::single(q), vec![], vec![1.0])
    }

    /// An antipodal pair with prescribed half-flow weights.
    pub fn pair_flowout(ctx: SphereContext, q: Point, m_plus: f64, m_minus: f64) -> Result<Self> {
        MeasureSpec::new(
            ctx,
            ScattererSet::antipodal_pair(q),
            vec![(m_plus, m_minus)],
            vec![],
        )
    }

    pub fn ctx(&self) -> &SphereContext {
        &self.ctx
    }

    pub fn set(&self) -> &ScattererSet {
        &self.set
    }
}

/// `int a d nu_{Q, m}` for a polynomial symbol: the flow-out from each
/// weighted scatterer is parametrized in closed form and integrated by
/// Gauss quadrature in `t` (and in the launch angle `psi` when the symbol
/// is centered elsewhere).
pub fn measure_integral(mspec: &MeasureSpec, symbol: &SymbolPoly) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (q, &(mp, mm)) in mspec.set.pairs().iter().zip(&mspec.pair_weights) {
        if mp != 0.0 {
            acc += mp * half_flowout_integral(&mspec.ctx, q, symbol)?;
        }
        if mm != 0.0 {
            acc += mm * half_flowout_integral(&mspec.ctx, &q.antipode(), symbol)?;
        }
    }
    for (p, &m) in mspec.set.singles().iter().zip(&mspec.single_weights) {
        if m != 0.0 {
            acc += m * full_flowout_integral(&mspec.ctx, p, symbol)?;
        }
    }
    Ok(acc)
}

/// `int a d nu_{p, 1/2}`: time leg `t in [0, pi)`, total mass 1/2.
fn half_flowout_integral(ctx: &SphereContext, p: &Point, symbol: &SymbolPoly) -> Result<Complex64> {
    flowout_integral(ctx, p, symbol, std::f64::consts::PI)
}

/// `int a d nu_p`: full period `t in [0, 2 pi)`, total mass 1.
fn full_flowout_integral(ctx: &SphereContext, p: &Point, symbol: &SymbolPoly) -> Result<Complex64> {
    flowout_integral(ctx, p, symbol, 2.0 * std::f64::consts::PI)
}

fn flowout_integral(
    ctx: &SphereContext,
    p: &Point,
    symbol: &SymbolPoly,
    t_end: f64,
) -> Result<Complex64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let t_rule = gauss_legendre(T_NODES).mapped(0.0, t_end);
    let same = is_same_point(p, &symbol.center);
    let anti = is_antipodal(p, &symbol.center);
    if same || anti {
        // kappa = +-cos t, varsigma = +-sin t: 1-D in t
        let sign = if same { 1.0 } else { -1.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        for (&t, &w) in t_rule.nodes.iter().zip(&t_rule.weights) {
            acc += w / two_pi * symbol.eval(sign * t.cos(), sign * t.sin());
        }
        return Ok(acc);
    }
    // cross-center: spherical law of cosines over the launch angle psi
    let a = geodesic_distance(p, &symbol.center);
    let (cos_a, sin_a) = (a.cos(), a.sin());
    let mut acc = Complex64::new(0.0, 0.0);
    match ctx.d() {
        2 => {
            // psi uniform on the circle of directions
            let psi_rule = gauss_legendre(PSI_NODES).mapped(0.0, two_pi);
            for (&t, &wt) in t_rule.nodes.iter().zip(&t_rule.weights) {
                let (st, ct) = t.sin_cos();
                for (&psi, &wp) in psi_rule.nodes.iter().zip(&psi_rule.weights) {
                    let cpsi = psi.cos();
                    let kappa = cos_a * ct + sin_a * st * cpsi;
                    let varsigma = cos_a * st - sin_a * ct * cpsi;
                    acc += wt / two_pi * wp / two_pi * symbol.eval(kappa, varsigma);
                }
            }
        }
        3 => {
            // u = cos psi with density du / 2 on [-1, 1]
            let u_rule = gauss_legendre(PSI_NODES);
            for (&t, &wt) in t_rule.nodes.iter().zip(&t_rule.weights) {
                let (st, ct) = t.sin_cos();
                for (&u, &wu) in u_rule.nodes.iter().zip(&u_rule.weights) {
                    let kappa = cos_a * ct + sin_a * st * u;
                    let varsigma = cos_a * st - sin_a * ct * u;
                    acc += wt / two_pi * wu / 2.0 * symbol.eval(kappa, varsigma);
                }
            }
        }
        _ => {
            return Err(Error::InvalidArgument(
                "cross-center integrals are implemented for d in {2, 3}".into(),
            ))
        }
    }
    Ok(acc)
}

/// Closed-form boundary profile of the non-invariant limits: `|gamma|^2` is
/// the two-step function taking `m_+` on `[0, pi)` and `m_-` on `[pi, 2 pi)`.
#[derive(Debug, Clone)]
pub struct FourierProfile {
    pub sigma: f64,
    pub beta: [Complex64; 2],
    pub rho: i32,
    pub m_plus: f64,
    pub m_minus: f64,
    kind: ProfileKind,
}

#[derive(Debug, Clone)]
enum ProfileKind {
    /// `(beta_q gamma^sigma + rho beta_{-q} S_{-pi} gamma^sigma) / C`.
    Interior { normalizer: f64 },
    /// `(c + i pi beta_q S) / C` (the on-spectrum case has `c = 0`).
    Boundary { c: Complex64, normalizer: f64 },
    /// Unimodular profile of the invariant scenarios.
    Flat,
}

impl FourierProfile {
    pub fn eval(&self, t: f64) -> Complex64 {
        let t = t.rem_euclid(2.0 * std::f64::consts::PI);
        match &self.kind {
            ProfileKind::Flat => Complex64::from_polar(1.0, self.sigma * t),
            ProfileKind::Interior { normalizer } => {
                let g = gamma_sigma(self.sigma, t);
                let shifted = if t < std::f64::consts::PI {
                    gamma_sigma(self.sigma, t + std::f64::consts::PI)
                } else {
                    gamma_sigma(self.sigma, t - std::f64::consts::PI)
                };
                (self.beta[0] * g + self.rho as f64 * self.beta[1] * shifted) / normalizer
            }
            ProfileKind::Boundary { c, normalizer } => {
                let step = if t < std::f64::consts::PI { 1.0 } else { -1.0 };
                (c + Complex64::new(0.0, std::f64::consts::PI * step) * self.beta[0]) / normalizer
            }
        }
    }

    /// Fourier coefficient of the profile at frequency `k` (the quasimode
    /// coefficient divided by the normalizer).
    pub fn fourier_coefficient(&self, k: i64) -> Complex64 {
        match &self.kind {
            ProfileKind::Flat => {
                if k == self.sigma as i64 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            ProfileKind::Interior { normalizer } => {
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                (self.beta[0] + sign * self.rho as f64 * self.beta[1])
                    / Complex64::new((k as f64 - self.sigma) * normalizer, 0.0)
            }
            ProfileKind::Boundary { c, normalizer } => {
                let s = self.sigma as i64;
                if k == s {
                    c / normalizer
                } else {
                    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    (self.beta[0] + sign * self.rho as f64 * self.beta[1])
                        / Complex64::new((k - s) as f64 * normalizer, 0.0)
                }
            }
        }
    }
}

/// `gamma^sigma(t) = (2 pi i / (1 - e^{2 pi i sigma})) e^{i sigma t}`, whose
/// Fourier coefficients are `1 / (k - sigma)`.
fn gamma_sigma(sigma: f64, t: f64) -> Complex64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let denom = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, two_pi * sigma);
    Complex64::new(0.0, two_pi) / denom * Complex64::from_polar(1.0, sigma * t)
}

/// The boundary profile of a classified sequence together with its step
/// weights. Scenarios 2 and 4 return the invariant (flat) profile.
pub fn fourier_profile(cls: &ScenarioClassification) -> Result<FourierProfile> {
    match cls.scenario {
        Scenario::One => {
            // the closed-form constant makes |gamma|^2 = m_+- hold exactly;
            // it agrees with the series route to within summation error
            let normalizer =
                crate::greens::closed_form_interior(cls.sigma, cls.rho, &cls.beta).sqrt();
            let (m_plus, m_minus) = crate::greens::pair_flow_weights(cls.sigma, cls.rho, &cls.beta);
            Ok(FourierProfile {
                sigma: cls.sigma,
                beta: cls.beta,
                rho: cls.rho,
                m_plus,
                m_minus,
                kind: ProfileKind::Interior { normalizer },
            })
        }
        Scenario::Three => {
            let c = cls.c_limit.unwrap_or(Complex64::new(0.0, 0.0));
            let normalizer =
                (c.norm_sqr() + std::f64::consts::PI.powi(2) * cls.beta[0].norm_sqr()).sqrt();
            let denom = c.norm_sqr() + std::f64::consts::PI.powi(2) * cls.beta[0].norm_sqr();
            let m_plus =
                (c + Complex64::new(0.0, std::f64::consts::PI) * cls.beta[0]).norm_sqr() / denom;
            let m_minus =
                (c - Complex64::new(0.0, std::f64::consts::PI) * cls.beta[0]).norm_sqr() / denom;
            Ok(FourierProfile {
                sigma: cls.sigma,
                beta: cls.beta,
                rho: cls.rho,
                m_plus,
                m_minus,
                kind: ProfileKind::Boundary { c, normalizer },
            })
        }
        Scenario::Two | Scenario::Four => Ok(FourierProfile {
            sigma: cls.sigma,
            beta: cls.beta,
            rho: cls.rho,
            m_plus: 1.0,
            m_minus: 1.0,
            kind: ProfileKind::Flat,
        }),
    }
}

/// Sup distance between the order-`upsilon` partial Fourier sum and the
/// profile over a `t` grid excluding [`JUMP_EXCLUSION`] neighborhoods of
/// the jumps; one row per requested window size.
pub fn carleson_check(
    cls: &ScenarioClassification,
    upsilons: &[u32],
    grid_points: usize,
) -> Result<Vec<(u32, f64)>> {
    let profile = fourier_profile(cls)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let ts: Vec<f64> = (0..grid_points)
        .map(|i| two_pi * (i as f64 + 0.5) / grid_points as f64)
        .filter(|&t| {
            t.min(two_pi - t) > JUMP_EXCLUSION && (t - std::f64::consts::PI).abs() > JUMP_EXCLUSION
        })
        .collect();
    let mut out = Vec::with_capacity(upsilons.len());
    for &upsilon in upsilons {
        let mut sup = 0.0f64;
        for &t in &ts {
            let sum = partial_fourier_sum(&profile, upsilon, t);
            sup = sup.max((sum - profile.eval(t)).norm());
        }
        out.push((upsilon, sup));
    }
    Ok(out)
}

/// `sum_{|k| <= upsilon} X_k e^{i k t}` of the profile's coefficients,
/// accumulated in fixed ascending-`k` order.
pub fn partial_fourier_sum(profile: &FourierProfile, upsilon: u32, t: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, t);
    let mut phase = Complex64::from_polar(1.0, -(upsilon as f64) * t);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -(upsilon as i64)..=upsilon as i64 {
        acc += profile.fourier_coefficient(k) * phase;
        phase *= step;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::{build_greens, classify, GreensSpec, ScenarioSample, SemiclassicalPoint};
    use crate::quad::radial_rule;
    use crate::specfun;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Quadrature-only rebuild of the K and V_h tridiagonals: entries from
    /// 1-D integrals of radial profiles and the analytic Gegenbauer
    /// derivative, no ladder identities involved.
    fn quadrature_k_v(
        ctx: &SphereContext,
        center: &Point,
        h: f64,
        ell_max: u32,
    ) -> (BandedObservable, BandedObservable) {
        let rule = radial_rule(ctx.d(), 2 * ell_max as usize + 40).unwrap();
        let alpha = ctx.alpha();
        let half_d = ctx.d() as f64 / 2.0;
        let norm = |ell: u32| {
            (ctx.multiplicity(ell) as f64 / ctx.vol_sphere()).sqrt()
                / specfun::gegenbauer_at_one(alpha, ell)
        };
        let mut kmat = BandedObservable::zero(center.clone(), ell_max as usize + 1, 1);
        let mut vmat = BandedObservable::zero(center.clone(), ell_max as usize + 1, 1);
        for a in 0..=ell_max {
            for b in a.saturating_sub(1)..=(a + 1).min(ell_max) {
                if a == b {
                    continue;
                }
                let na = norm(a);
                let nb = norm(b);
                let k_entry = rule.integrate(|s| {
                    na * specfun::gegenbauer_eval(alpha, a, s).unwrap()
                        * s
                        * nb
                        * specfun::gegenbauer_eval(alpha, b, s).unwrap()
                });
                kmat.set(a as usize, b as usize, c(k_entry, 0.0));
                // V_h z_b = (h/i) [ (s^2 - 1) d_s + (d/2) s ] z_b
                let v_entry = rule.integrate(|s| {
                    let (vb, db) = specfun::value_and_derivative(alpha, b, s);
                    na * specfun::gegenbauer_eval(alpha, a, s).unwrap()
                        * nb
                        * ((s * s - 1.0) * db + half_d * s * vb)
                });
                vmat.set(a as usize, b as usize, c(0.0, -h * v_entry));
            }
        }
        (kmat, vmat)
    }

    #[test]
    fn banded_matrices_match_quadrature_oracle() {
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let center = Point::pole(d);
            let ell_max = 60u32;
            let h = 0.02;
            let kmat = multiplication_matrix(&ctx, &center, ell_max);
            let vmat = momentum_matrix(&ctx, &center, h, ell_max);
            let (kq, vq) = quadrature_k_v(&ctx, &center, h, ell_max);
            for a in 0..=ell_max as usize {
                for b in a.saturating_sub(1)..=(a + 1).min(ell_max as usize) {
                    assert!(
                        (kmat.get(a, b) - kq.get(a, b)).norm() < 1e-9,
                        "d={d} K({a},{b}): {} vs {}",
                        kmat.get(a, b),
                        kq.get(a, b)
                    );
                    assert!(
                        (vmat.get(a, b) - vq.get(a, b)).norm() < 1e-9,
                        "d={d} V({a},{b}): {} vs {}",
                        vmat.get(a, b),
                        vq.get(a, b)
                    );
                }
            }
            assert!(vmat.hermiticity_defect() < 1e-12);
            assert!(kmat.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn quantized_words_match_quadrature_products() {
        // words of length <= 4 in {K, V}: the quadrature-built tridiagonals
        // multiply exactly like the analytic ones because V z_ell lives in
        // the two neighboring degrees
        let ctx = SphereContext::new(2).unwrap();
        let center = Point::pole(2);
        let ell = 50u32;
        let ell_max = 100u32;
        let h = 1.0 / ctx.lambda_sq(ell).sqrt();
        let kmat = multiplication_matrix(&ctx, &center, ell_max);
        let vmat = momentum_matrix(&ctx, &center, h, ell_max);
        let (kq, vq) = quadrature_k_v(&ctx, &center, h, ell_max);
        let z = ZonalExpansion::basis_vector(ctx, center.clone(), ell, ell_max);
        let words: Vec<Vec<u8>> = vec![
            vec![0],
            vec![1],
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![1, 1],
            vec![0, 1, 1],
            vec![1, 0, 1, 0],
            vec![0, 0, 1, 1],
        ];
        for word in words {
            let analytic: Vec<&BandedObservable> = word
                .iter()
                .map(|&w| if w == 0 { &kmat } else { &vmat })
                .collect();
            let oracle: Vec<&BandedObservable> = word
                .iter()
                .map(|&w| if w == 0 { &kq } else { &vq })
                .collect();
            let a = matrix_element(&z, &analytic, &z).unwrap();
            let b = matrix_element(&z, &oracle, &z).unwrap();
            assert!((a - b).norm() < 1e-8, "word {word:?}: {a} vs {b}");
        }
    }

    #[test]
    fn cos_squared_diagonal_approaches_half() {
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let center = Point::pole(d);
            for ell in [100u32, 400, 1600] {
                let kmat = multiplication_matrix(&ctx, &center, ell + 2);
                let z = ZonalExpansion::basis_vector(ctx, center.clone(), ell, ell + 2);
                let val = matrix_element(&z, &[&kmat, &kmat], &z).unwrap();
                assert!((val.re - 0.5).abs() <= 3.0 / ell as f64, "d={d} ell={ell}");
                assert!(val.im.abs() < 1e-15);
                // off-diagonal couplings drift to 1/2
                let t = kmat.get(ell as usize + 1, ell as usize).re;
                assert!((t - 0.5).abs() <= 2.0 / ell as f64);
            }
        }
    }

    #[test]
    fn momentum_near_diagonal_action() {
        // V_h z_{ell+k} ~ (z_{ell+k+1} - z_{ell+k-1}) / (2i) near ell = 1/h
        let ctx = SphereContext::new(2).unwrap();
        let center = Point::pole(2);
        let ell = 300u32;
        let h = 1.0 / ctx.lambda_sq(ell).sqrt();
        let vmat = momentum_matrix(&ctx, &center, h, ell + 10);
        for k in [-3i64, 0, 4] {
            let at = (ell as i64 + k) as usize;
            let below = vmat.get(at + 1, at);
            let above = vmat.get(at - 1, at);
            assert!((below - c(0.0, -0.5)).norm() <= 3.0 * h, "k={k}: {below}");
            assert!((above - c(0.0, 0.5)).norm() <= 3.0 * h);
        }
    }

    #[test]
    fn identity_element_center_guard_and_mass_guard() {
        let ctx = SphereContext::new(2).unwrap();
        let q = Point::pole(2);
        let p = Point::normalized(vec![1.0, 1.0, 0.2]).unwrap();
        let u = ZonalExpansion::new(ctx, q.clone(), vec![c(0.3, -0.4), c(0.0, 1.2), c(0.5, 0.0)]);
        let id = BandedObservable::identity(q.clone(), 3);
        let got = matrix_element(&u, &[&id], &u).unwrap();
        assert!((got.re - u.norm_sq()).abs() < 1e-14 && got.im.abs() < 1e-15);
        // cross-center elements are refused here
        let v = ZonalExpansion::basis_vector(ctx, p, 1, 2);
        assert!(matrix_element(&u, &[&id], &v).is_err());
        // weights violating the unit-mass constraint are rejected
        assert!(MeasureSpec::pair_flowout(ctx, q.clone(), 2.0, 1.0).is_err());
        assert!(MeasureSpec::new(ctx, ScattererSet::single(q), vec![], vec![0.7]).is_err());
    }

    #[test]
    fn profile_mass_is_two_pi_for_random_parameters() {
        use crate::quad::gauss_legendre;
        use crate::rng::CounterRng;
        let rng = CounterRng::new(91);
        let leg = gauss_legendre(120);
        for draw in 0..20u64 {
            let sigma = rng.uniform_in(3 * draw, 0.05, 0.95);
            let rho = if rng.uniform(3 * draw + 1) < 0.5 {
                1
            } else {
                -1
            };
            let m_plus = 2.0 * rng.uniform(3 * draw + 2);
            let beta =
                crate::greens::choose_beta_for_weights(sigma, rho, m_plus, 2.0 - m_plus).unwrap();
            let cls = ScenarioClassification {
                scenario: Scenario::One,
                sigma,
                beta,
                rho,
                c_limit: None,
                constant: Some(crate::greens::closed_form_interior(sigma, rho, &beta).sqrt()),
            };
            let profile = fourier_profile(&cls).unwrap();
            let mass = leg
                .mapped(0.0, PI)
                .integrate(|t| profile.eval(t).norm_sqr())
                + leg
                    .mapped(PI, 2.0 * PI)
                    .integrate(|t| profile.eval(t).norm_sqr());
            assert!((mass - 2.0 * PI).abs() <= 1e-10, "draw {draw}: mass {mass}");
        }
    }

    #[test]
    fn ladder_powers_shift_the_degree() {
        // K + iV_h acts as a creation operator near ell = 1/h: the
        // down-coupling cancels to O(h) and the up-coupling tends to 1
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let center = Point::pole(d);
            let ell = 400u32;
            let ell_max = ell + 10;
            let h = 1.0 / ctx.lambda_sq(ell).sqrt();
            for k in 1..=3u32 {
                let up = ladder_power(&ctx, &center, h, ell_max, k, 1).unwrap();
                let z = ZonalExpansion::basis_vector(ctx, center.clone(), ell, ell_max);
                let target = ZonalExpansion::basis_vector(ctx, center.clone(), ell + k, ell_max);
                let shifted = matrix_element(&target, &[&up], &z).unwrap();
                assert!(
                    (shifted - c(1.0, 0.0)).norm() <= 12.0 * k as f64 / ell as f64,
                    "d={d} k={k}: {shifted}"
                );
                // everything else is O(h): total mass off the target degree
                let moved = up.apply(z.coeffs());
                let stray: f64 = moved
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != (ell + k) as usize)
                    .map(|(_, v)| v.norm_sqr())
                    .sum();
                assert!(stray.sqrt() <= 15.0 * k as f64 / ell as f64, "d={d} k={k}");
            }
            // (K + iV)(K - iV) ~ kappa^2 + varsigma^2 = 1 on the flow-out
            let plus = ladder_power(&ctx, &center, h, ell_max, 1, 1).unwrap();
            let minus = ladder_power(&ctx, &center, h, ell_max, 1, -1).unwrap();
            let z = ZonalExpansion::basis_vector(ctx, center.clone(), ell, ell_max);
            let val = matrix_element(&z, &[&plus, &minus], &z).unwrap();
            assert!(
                (val - c(1.0, 0.0)).norm() <= 8.0 / ell as f64,
                "d={d}: {val}"
            );
        }
    }

    #[test]
    fn ladder_symbol_integrates_to_its_mean_coefficient() {
        // on its own flow-out the ladder symbol is the trigonometric
        // polynomial sum X_k e^{ikt} / ||X||, so the full-period average is
        // X_0 / ||X|| and the half-period average picks up the odd terms
        let ctx = SphereContext::new(2).unwrap();
        let q = Point::pole(2);
        let coeffs = vec![
            (-2i64, c(0.3, -0.1)),
            (-1, c(0.0, 0.5)),
            (0, c(1.0, 0.0)),
            (1, c(-0.4, 0.2)),
            (3, c(0.1, 0.1)),
        ];
        let norm: f64 = coeffs.iter().map(|(_, x)| x.norm_sqr()).sum::<f64>().sqrt();
        let symbol = SymbolPoly::from_ladder_coefficients(q.clone(), &coeffs).unwrap();
        // pointwise on the flow-out: Gamma(cos t, sin t) = sum X_k e^{ikt}
        for &t in &[0.3f64, 1.7, 4.4] {
            let direct: Complex64 = coeffs
                .iter()
                .map(|&(k, x)| x * Complex64::from_polar(1.0, k as f64 * t))
                .sum::<Complex64>()
                / norm;
            let via_poly = symbol.eval(t.cos(), t.sin());
            assert!((direct - via_poly).norm() < 1e-12, "t={t}");
        }
        let nu_q = MeasureSpec::single_flowout(ctx, q.clone()).unwrap();
        let got = measure_integral(&nu_q, &symbol).unwrap();
        let want = c(1.0, 0.0) / norm;
        assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        // half flow-out: int_0^pi e^{ikt} dt / (2 pi) = (e^{ik pi} - 1)/(2 pi i k)
        let half = MeasureSpec::pair_flowout(ctx, q.clone(), 2.0, 0.0).unwrap();
        let mut want_half = c(0.0, 0.0);
        for &(k, x) in &coeffs {
            want_half += if k == 0 {
                x / 2.0
            } else {
                let kf = k as f64;
                x * (Complex64::from_polar(1.0, kf * PI) - 1.0) / c(0.0, 2.0 * PI * kf)
            };
        }
        want_half = want_half * 2.0 / norm; // pair weight (2, 0)
        let got_half = measure_integral(&half, &symbol).unwrap();
        assert!(
            (got_half - want_half).norm() < 1e-12,
            "{got_half} vs {want_half}"
        );
        // zero coefficient vectors are rejected
        assert!(SymbolPoly::from_ladder_coefficients(q, &[(0, c(0.0, 0.0))]).is_err());
    }

    #[test]
    fn measure_integrals_known_values() {
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let q = Point::pole(d);
            let nu_q = MeasureSpec::single_flowout(ctx, q.clone()).unwrap();
            let half = MeasureSpec::pair_flowout(ctx, q.clone(), 2.0, 0.0).unwrap();

            // mass bookkeeping
            let one = SymbolPoly::constant(q.clone(), c(1.0, 0.0));
            assert!((measure_integral(&nu_q, &one).unwrap().re - 1.0).abs() < 1e-12);
            assert!((measure_integral(&half, &one).unwrap().re - 1.0).abs() < 1e-12);

            // int kappa d nu_q = 0
            let kappa = SymbolPoly::kappa(q.clone());
            assert!(measure_integral(&nu_q, &kappa).unwrap().norm() < 1e-12);

            // int varsigma d nu_{q,1/2} = 1/pi per unit weight; the (2, 0)
            // pair doubles the forward leg
            let varsigma = SymbolPoly::varsigma(q.clone());
            let v = measure_integral(&half, &varsigma).unwrap();
            assert!((v.re - 2.0 / PI).abs() < 1e-12, "d={d}: {v}");

            // reversed leg flips the sign
            let rev = MeasureSpec::pair_flowout(ctx, q.clone(), 0.0, 2.0).unwrap();
            let v = measure_integral(&rev, &varsigma).unwrap();
            assert!((v.re + 2.0 / PI).abs() < 1e-12);

            // int kappa^2 d nu_{q,1/2} = 1/4 at unit weight
            let even = MeasureSpec::pair_flowout(ctx, q.clone(), 1.0, 1.0).unwrap();
            let kappa2 = SymbolPoly::monomial(q.clone(), 2, 0);
            let v = measure_integral(&even, &kappa2).unwrap();
            assert!((v.re - 0.5).abs() < 1e-12); // two legs of 1/4 each

            // balanced weights kill the witness
            let v = measure_integral(&even, &varsigma).unwrap();
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn witness_is_weight_difference_over_pi() {
        let ctx = SphereContext::new(2).unwrap();
        let q = Point::pole(2);
        let other = Point::normalized(vec![0.3, 0.9, 0.2]).unwrap();
        // pair + an extra single: the single's full flow-out contributes
        // nothing to the odd symbol
        let set = ScattererSet::from_points(&[q.clone(), q.antipode(), other]).unwrap();
        let m = MeasureSpec::new(ctx, set, vec![(1.0, 0.25)], vec![0.375]).unwrap();
        let varsigma = SymbolPoly::varsigma(q.clone());
        let v = measure_integral(&m, &varsigma).unwrap();
        assert!((v.re - (1.0 - 0.25) / PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn cross_center_integral_matches_rotation_invariance() {
        // int kappa^c d nu_q depends only on d(c, q): cos a * int cos t
        let ctx = SphereContext::new(3).unwrap();
        let q = Point::pole(3);
        let center = Point::normalized(vec![0.6, 0.0, 0.0, 0.8]).unwrap();
        let nu_q = MeasureSpec::single_flowout(ctx, q.clone()).unwrap();
        let kappa = SymbolPoly::kappa(center.clone());
        assert!(measure_integral(&nu_q, &kappa).unwrap().norm() < 1e-12);
        // kappa^2: average of (cos a cos t + sin a sin t cos psi)^2
        // = cos^2 a / 2 + sin^2 a <cos^2 psi> / 2
        let a = geodesic_distance(&q, &center);
        let mean_cos2_psi = 1.0 / 3.0; // uniform direction on S^2
        let want = 0.5 * a.cos().powi(2) + 0.5 * a.sin().powi(2) * mean_cos2_psi;
        let kappa2 = SymbolPoly::monomial(center, 2, 0);
        let got = measure_integral(&nu_q, &kappa2).unwrap();
        assert!((got.re - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn zonal_matrix_elements_converge_to_flowout_integrals() {
        // observables on z_ell with h = 1/lambda_ell reproduce nu_q
        for d in [2u32, 3] {
            let ctx = SphereContext::new(d).unwrap();
            let center = Point::pole(d);
            let nu_q = MeasureSpec::single_flowout(ctx, center.clone()).unwrap();
            for ell in [100u32, 200] {
                let h = 1.0 / ctx.lambda_sq(ell).sqrt();
                let kmat = multiplication_matrix(&ctx, &center, ell + 8);
                let vmat = momentum_matrix(&ctx, &center, h, ell + 8);
                let z = ZonalExpansion::basis_vector(ctx, center.clone(), ell, ell + 8);
                for (i, j) in [(1u32, 0u32), (2, 0), (0, 2), (1, 1), (2, 2), (0, 4)] {
                    let mut word: Vec<&BandedObservable> = Vec::new();
                    for _ in 0..i {
                        word.push(&kmat);
                    }
                    for _ in 0..j {
                        word.push(&vmat);
                    }
                    let got = matrix_element(&z, &word, &z).unwrap();
                    let want = measure_integral(&nu_q, &SymbolPoly::monomial(center.clone(), i, j))
                        .unwrap();
                    assert!(
                        (got - want).norm() <= 8.0 / ell as f64,
                        "d={d} ell={ell} kappa^{i} varsigma^{j}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn profile_steps_and_mass() {
        // beta realizing (2, 0) has |gamma|^2 = 2 on the first leg, 0 after
        let beta = crate::greens::choose_beta_for_weights(0.5, 1, 2.0, 0.0).unwrap();
        let cls = ScenarioClassification {
            scenario: Scenario::One,
            sigma: 0.5,
            beta,
            rho: 1,
            c_limit: None,
            constant: Some(crate::greens::closed_form_interior(0.5, 1, &beta).sqrt()),
        };
        let profile = fourier_profile(&cls).unwrap();
        assert!((profile.m_plus - 2.0).abs() < 1e-12);
        assert!(profile.m_minus.abs() < 1e-12);
        assert!((profile.eval(1.0).norm_sqr() - 2.0).abs() < 1e-12);
        assert!(profile.eval(4.0).norm_sqr() < 1e-12);

        // beta = (1, 0) gives the flat two-step (1, 1)
        let beta = [c(1.0, 0.0), c(0.0, 0.0)];
        let cls = ScenarioClassification {
            scenario: Scenario::One,
            sigma: 0.5,
            beta,
            rho: 1,
            c_limit: None,
            constant: Some(PI),
        };
        let profile = fourier_profile(&cls).unwrap();
        assert!((profile.m_plus - 1.0).abs() < 1e-12);
        assert!((profile.m_minus - 1.0).abs() < 1e-12);
        // mass: int |gamma|^2 = 2 pi by the step values
        let mass = PI * (profile.m_plus + profile.m_minus);
        assert!((mass - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn carleson_partial_sums_refine() {
        let cls = ScenarioClassification {
            scenario: Scenario::One,
            sigma: 0.5,
            beta: [c(1.0, 0.0), c(0.0, 0.0)],
            rho: 1,
            c_limit: None,
            constant: Some(PI),
        };
        let table = carleson_check(&cls, &[16, 64, 256], 801).unwrap();
        assert!(table[2].1 < table[0].1);
        assert!(table[1].1 < table[0].1);
        // pointwise at t = pi/2 with a large window
        let profile = fourier_profile(&cls).unwrap();
        let sum = partial_fourier_sum(&profile, 10_000, PI / 2.0);
        assert!((sum - profile.eval(PI / 2.0)).norm() < 1e-3);
    }

    #[test]
    fn pair_greens_momentum_expectation_tracks_weights() {
        // scenario-1 pair with weights (2, 0): <g, V g> -> 2/pi
        let ctx = SphereContext::new(2).unwrap();
        let q = Point::pole(2);
        let beta = crate::greens::choose_beta_for_weights(0.5, 1, 2.0, 0.0).unwrap();
        let ell = 500u32;
        let point = SemiclassicalPoint::from_ell_sigma(&ctx, ell, 0.5).unwrap();
        let spec = GreensSpec::new(ctx, q.clone(), beta, point, 3 * ell).unwrap();
        let g = build_greens(&spec).unwrap().normalized();
        let vmat = momentum_matrix(&ctx, &q, point.h(), 3 * ell);
        let got = matrix_element(&g, &[&vmat], &g).unwrap();
        assert!(
            (got.re - 2.0 / PI).abs() <= 0.05 * 2.0 / PI,
            "witness {got} vs {}",
            2.0 / PI
        );
        // control: beta = (1, 0) kills the witness
        let spec =
            GreensSpec::new(ctx, q.clone(), [c(1.0, 0.0), c(0.0, 0.0)], point, 3 * ell).unwrap();
        let g = build_greens(&spec).unwrap().normalized();
        let got = matrix_element(&g, &[&vmat], &g).unwrap();
        assert!(got.norm() <= 0.02);
    }

    #[test]
    fn classification_profile_consistency() {
        // classify a scenario-3 tail and check its profile mass
        let ctx = SphereContext::new(2).unwrap();
        let samples: Vec<ScenarioSample> = [100u32, 200, 400]
            .iter()
            .enumerate()
            .map(|(i, &ell)| {
                let sigma: f64 = [1e-2, 1e-3, 1e-4][i];
                let a = -sigma / 2.0;
                let t = ((1.0 - 2.0 * a * a) / 2.0f64).sqrt();
                ScenarioSample {
                    point: SemiclassicalPoint::from_ell_sigma(&ctx, ell, sigma).unwrap(),
                    beta: [c(a + t, 0.0), c(a - t, 0.0)],
                }
            })
            .collect();
        let cls = classify(&samples, 1e-3).unwrap();
        let profile = fourier_profile(&cls).unwrap();
        assert!((profile.m_plus + profile.m_minus - 2.0).abs() < 1e-9);
        // step values away from the jumps
        for &t in &[0.4, 2.0, 4.0, 6.0] {
            let want = if t < PI {
                profile.m_plus
            } else {
                profile.m_minus
            };
            assert!((profile.eval(t).norm_sqr() - want).abs() < 1e-9);
        }
    }
}
