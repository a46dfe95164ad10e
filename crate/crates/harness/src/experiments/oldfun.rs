//! Old-eigenfunction checks: unit beam norms, exponential decay of the
//! vanishing-correction coefficients away from the carrier geodesics, and
//! position-observable limits along the geodesic average.

use crate::config::Config;
use crate::fit::fit_linear;
use crate::report::{Report, VerdictRow};
use anyhow::{anyhow, bail, Result};
use scatterlab_core::geometry::{Point, SphereContext};
use scatterlab_core::oldfun::{
    beam_observable_check, vanishing_correction, BeamCombination, GeodesicFrame, GEODESIC_CLEARANCE,
};
use scatterlab_core::quad::gauss_legendre;
use scatterlab_core::rng::CounterRng;
use std::collections::BTreeMap;

pub fn run(config: &Config) -> Result<Report> {
    let d = config.dim()?;
    let seed = config.u64("seed", 42)?;
    let ctx = SphereContext::new(d).map_err(|e| anyhow!(e))?;
    let norm_tol = config.tolerance("tol.norm", 1e-8)?;
    let defect_tol = config.tolerance("tol.defect", 1e-10)?;
    let decay_cut = -config.tolerance("tol.decay_slope", 0.01)?;
    let ells = config.list_u32("ell", &[50, 100, 150, 200, 250, 300, 350, 400])?;
    let rng = CounterRng::new(seed);
    let mut rows = Vec::new();

    // single-beam norms by 1-D latitude quadrature
    for &ell in &[50u32, 150, 300] {
        let norm_sq = match d {
            2 => {
                let rule = gauss_legendre(ell as usize + 8);
                let c2 = beam_prefactor_sq(d, ell);
                c2 * 2.0 * std::f64::consts::PI * rule.integrate(|u| (1.0 - u * u).powi(ell as i32))
            }
            3 => {
                let rule = gauss_legendre(ell as usize / 2 + 8).mapped(0.0, 1.0);
                let c2 = beam_prefactor_sq(d, ell);
                c2 * 2.0 * std::f64::consts::PI.powi(2) * rule.integrate(|w| w.powi(ell as i32))
            }
            _ => bail!("beam norms implemented for d in {{2, 3}}"),
        };
        let mut params = BTreeMap::new();
        params.insert("check".into(), "unit beam norm".into());
        rows.push(
            VerdictRow {
                h_inv: Some(ctx.lambda_sq(ell).sqrt()),
                measured: Some(norm_sq.sqrt()),
                reference: Some(1.0),
                ref_provenance: "latitude quadrature".into(),
                ..VerdictRow::new("oldfun", d)
            }
            .with_params(&params)
            .judge_abs(norm_tol),
        );
    }

    // scatterers clear of the carrier geodesics
    let frame = GeodesicFrame::reference(d);
    let tilted = tilted_frame(&rng, d)?;
    let mut scatterers = Vec::new();
    let mut counter = 100;
    while scatterers.len() < 3 {
        let p = Point::new(rng.unit_vector(counter, d as usize + 1)).map_err(|e| anyhow!(e))?;
        counter += 1;
        if frame.latitude(&p) > 0.35 && tilted.latitude(&p) > 0.35 {
            scatterers.push(p);
        }
    }
    for p in &scatterers {
        if frame.latitude(p) <= GEODESIC_CLEARANCE {
            bail!("scatterer draw violated the geodesic clearance");
        }
    }

    // vanishing corrections across the degree list
    let beam = BeamCombination::new(
        ctx,
        vec![frame.clone(), tilted.clone()],
        vec![0.4, 0.6],
        ells[0],
    )
    .map_err(|e| anyhow!(e))?;
    let mut alpha_decay = Vec::new();
    for &ell in &ells {
        let b = beam.at_degree(ell);
        let corr = vanishing_correction(&ctx, &b, &scatterers).map_err(|e| anyhow!(e))?;
        let alpha_norm = corr.alpha.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut params = BTreeMap::new();
        params.insert("check".into(), "vanishing defect".into());
        params.insert("alpha_norm".into(), crate::report::float17(alpha_norm));
        params.insert(
            "correction_l2".into(),
            crate::report::float17(corr.correction_norm),
        );
        rows.push(
            VerdictRow {
                h_inv: Some(ctx.lambda_sq(ell).sqrt()),
                measured: Some(corr.defect),
                reference: Some(0.0),
                ref_provenance: "linear solve residual".into(),
                abs_err: Some(corr.defect),
                pass: corr.defect <= defect_tol * corr.rhs_norm.max(1e-300)
                    && corr.correction_norm <= corr.correction_bound * (1.0 + 1e-12),
                ..VerdictRow::new("oldfun", d)
            }
            .with_params(&params),
        );
        if alpha_norm > 0.0 {
            alpha_decay.push((ell as f64, alpha_norm.ln()));
        }
    }
    // semilog slope of the coefficient norm: strictly negative
    let fit = fit_linear(&alpha_decay)?;
    let mut params = BTreeMap::new();
    params.insert("fit".into(), "ln alpha-norm vs ell".into());
    rows.push(
        VerdictRow {
            measured: Some(fit.slope),
            reference: Some(decay_cut),
            slope: Some(fit.slope),
            ref_provenance: "exponential decay of the correction".into(),
            pass: fit.slope < decay_cut,
            ..VerdictRow::new("oldfun", d)
        }
        .with_params(&params),
    );

    // combination norm drifts to 1 (low degrees: the cross overlap decays
    // so fast it underflows long before the production range)
    let mut gaps = Vec::new();
    for &ell in &[4u32, 16, 64] {
        let b = beam.at_degree(ell);
        gaps.push((b.norm_sq().map_err(|e| anyhow!(e))? - 1.0).abs());
    }
    let mut params = BTreeMap::new();
    params.insert("check".into(), "combination norm -> 1".into());
    rows.push(
        VerdictRow {
            measured: Some(gaps[2]),
            reference: Some(0.0),
            ref_provenance: "pairwise overlap formula".into(),
            abs_err: Some(gaps[2]),
            pass: gaps[2] <= gaps[1] && gaps[1] <= gaps[0] && gaps[2] < 1e-8,
            ..VerdictRow::new("oldfun", d)
        }
        .with_params(&params),
    );

    // position-observable limits within 5/ell of the geodesic averages
    let q = {
        let mut counter = 500;
        loop {
            let p = Point::new(rng.unit_vector(counter, d as usize + 1)).map_err(|e| anyhow!(e))?;
            if frame.latitude(&p) > 0.3 {
                break p;
            }
            counter += 1;
        }
    };
    for row in beam_observable_check(&ctx, &frame, &q, &[100, 200, 400]).map_err(|e| anyhow!(e))? {
        let err = (row.matrix_element - row.geodesic_limit).abs();
        let mut params = BTreeMap::new();
        params.insert(
            "check".into(),
            format!("cos^{} position average", row.power),
        );
        rows.push(
            VerdictRow {
                h_inv: Some(ctx.lambda_sq(row.ell).sqrt()),
                measured: Some(row.matrix_element),
                reference: Some(row.geodesic_limit),
                ref_provenance: "geodesic-average integral".into(),
                abs_err: Some(err),
                pass: err <= 5.0 / row.ell as f64,
                ..VerdictRow::new("oldfun", d)
            }
            .with_params(&params),
        );
    }

    Ok(Report {
        experiment: "oldfun".into(),
        d,
        seed,
        anchor: String::new(),
        rows,
    })
}

fn beam_prefactor_sq(d: u32, ell: u32) -> f64 {
    use scatterlab_core::specfun::ln_gamma;
    let half = (d as f64 + 1.0) / 2.0;
    ((ln_gamma(ell as f64 + half) - ln_gamma(ell as f64 + 1.0))
        - (2.0 * std::f64::consts::PI.powf(half)).ln())
    .exp()
}

fn tilted_frame(rng: &CounterRng, d: u32) -> Result<GeodesicFrame> {
    let u = rng.unit_vector(7, d as usize + 1);
    let v = rng.unit_vector(8, d as usize + 1);
    GeodesicFrame::from_plane(&u, &v).map_err(|e| anyhow!(e))
}
