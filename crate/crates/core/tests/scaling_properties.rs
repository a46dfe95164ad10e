//! Cross-module scaling properties: decay of cross-center overlaps, the
//! multi-scatterer defining identity, and window-norm convergence along
//! shrinking h.

use num_complex::Complex64;
use scatterlab_core::geometry::{Point, ScattererSet, SphereContext};
use scatterlab_core::greens::{
    build_greens, normalized_window_norm, series_constant, GreensSpec, MultiGreensSpec, Scenario,
    ScenarioClassification, SemiclassicalPoint, ZonalExpansion,
};
use scatterlab_core::rng::CounterRng;
use scatterlab_core::specfun::gegenbauer_ratio_seq;
use scatterlab_core::zonal::normalized_radial;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let mx = samples.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = samples.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    let sxy: f64 = samples
        .iter()
        .map(|p| (p.0.ln() - mx) * (p.1.ln() - my))
        .sum();
    sxy / sxx
}

#[test]
fn cross_center_overlap_decays_at_the_interface_rate() {
    // envelope of <z_ell^p, z_ell^q> over degree windows decays like
    // ell^(-(d-1)/2); the raw values oscillate through zeros
    for d in [2u32, 3] {
        let ctx = SphereContext::new(d).unwrap();
        let rng = CounterRng::new(23 + d as u64);
        for pair in 0..2 {
            let p = Point::new(rng.unit_vector(2 * pair, d as usize + 1)).unwrap();
            let q = Point::new(rng.unit_vector(2 * pair + 1, d as usize + 1)).unwrap();
            let s = p.dot(&q).clamp(-1.0, 1.0);
            if s.abs() > 0.95 {
                continue; // too close to coincident/antipodal for a clean rate
            }
            let ratios = gegenbauer_ratio_seq(ctx.alpha(), s, 840).unwrap();
            let mut samples = Vec::new();
            let mut ell = 50usize;
            while ell <= 800 {
                let envelope = ratios[ell..ell + 12]
                    .iter()
                    .fold(0.0f64, |acc, &r| acc.max(r.abs()));
                samples.push((ell as f64, envelope));
                ell = (ell as f64 * 1.5) as usize;
            }
            let slope = loglog_slope(&samples);
            let want = -(d as f64 - 1.0) / 2.0;
            assert!(
                (slope - want).abs() <= 0.15,
                "d={d} pair={pair}: slope {slope} vs {want}"
            );
        }
    }
}

#[test]
fn multi_scatterer_defining_identity() {
    // <G, (Lap - h^-2) u> = sum_Q beta_q u(q) for a pair plus a single,
    // with u a zonal basis vector at an unrelated center (real beta)
    let ctx = SphereContext::new(2).unwrap();
    let q = Point::pole(2);
    let single = Point::normalized(vec![0.9, 0.1, 0.42]).unwrap();
    let probe_center = Point::normalized(vec![0.2, -0.8, 0.57]).unwrap();
    let set = ScattererSet::from_points(&[q.clone(), q.antipode(), single.clone()]).unwrap();
    let point = SemiclassicalPoint::from_ell_sigma(&ctx, 35, 0.41).unwrap();
    let beta_pair = [c(0.7, 0.0), c(-0.4, 0.0)];
    let beta_single = c(0.5, 0.0);
    let spec = MultiGreensSpec {
        ctx,
        set,
        beta_pairs: vec![beta_pair],
        beta_singles: vec![beta_single],
        point,
        ell_max: 120,
    };
    let multi = spec.build().unwrap();
    for m in [0u32, 10, 35, 36, 77] {
        let u = ZonalExpansion::basis_vector(ctx, probe_center.clone(), m, 120);
        let mut lhs = Complex64::new(0.0, 0.0);
        for component in &multi.components {
            lhs += component.cross_inner(&u).unwrap();
        }
        lhs *= point.resolvent_denominator(m as i64 - 35);
        let eval = |at: &Point| normalized_radial(&ctx, m, at.dot(&probe_center)).unwrap();
        let rhs = beta_pair[0] * eval(&q)
            + beta_pair[1] * eval(&q.antipode())
            + beta_single * eval(&single);
        assert!(
            (lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1e-9),
            "m={m}: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn window_norm_converges_monotonically_in_h() {
    // |normalized window norm - constant^2| shrinks along h -> 0 at fixed
    // large window, up to 10% jitter
    for d in [2u32, 3] {
        let ctx = SphereContext::new(d).unwrap();
        let q = Point::pole(d);
        let beta = [c(1.0, 0.0), c(0.0, 0.0)];
        let mut cls = ScenarioClassification {
            scenario: Scenario::One,
            sigma: 0.5,
            beta,
            rho: 1,
            c_limit: None,
            constant: None,
        };
        let sc = series_constant(&cls).unwrap();
        cls.constant = Some(sc.constant);
        let mut prev_gap = f64::INFINITY;
        for ell in [120u32, 240, 480, 960] {
            let point = SemiclassicalPoint::from_ell_sigma(&ctx, ell, 0.5).unwrap();
            let spec = GreensSpec::with_default_truncation(ctx, q.clone(), beta, point).unwrap();
            let g = build_greens(&spec).unwrap();
            let value = normalized_window_norm(&g, &cls, &point, 48);
            let gap = (value - sc.series_sq).abs();
            assert!(
                gap <= prev_gap * 1.10,
                "d={d} ell={ell}: {gap} vs {prev_gap}"
            );
            prev_gap = gap;
        }
        assert!(prev_gap <= 0.05 * sc.series_sq);
    }
}

#[test]
fn quasimode_reference_mass_fills_the_window() {
    // sum |X_k|^2 / C^2 <= 1 and -> 1 as the window grows
    let beta = [c(0.6, 0.2), c(-0.3, 0.7)];
    let norm = (beta[0].norm_sqr() + beta[1].norm_sqr()).sqrt();
    let beta = [beta[0] / norm, beta[1] / norm];
    let ctx = SphereContext::new(2).unwrap();
    let q = Point::pole(2);
    let mut cls = ScenarioClassification {
        scenario: Scenario::One,
        sigma: 0.37,
        beta,
        rho: -1,
        c_limit: None,
        constant: None,
    };
    cls.constant = Some(series_constant(&cls).unwrap().constant);
    let mut prev = 0.0;
    for upsilon in [2u32, 8, 32, 128, 512] {
        let reference =
            scatterlab_core::greens::quasimode_reference(&cls, &ctx, &q, 2000, upsilon, 4000)
                .unwrap();
        let mass = reference.norm_sq();
        assert!(mass <= 1.0 + 1e-12);
        assert!(mass >= prev);
        prev = mass;
    }
    assert!(prev > 0.995);
}
