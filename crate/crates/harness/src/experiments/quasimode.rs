//! Quasimode residuals: the normalized pair eigenvector against the
//! explicit zonal window, shrinking along both `h -> 0` and window growth,
//! with the window-limited regime fitting the `upsilon^(-1/2)` law, and the
//! resonant-dominated scenario obeying its two-term bound on a grid.

use super::{ell_with_parity, parallel_map};
use crate::config::Config;
use crate::fit::fit_rate;
use crate::report::{Report, VerdictRow};
use anyhow::{anyhow, Result};
use num_complex::Complex64;
use scatterlab_core::geometry::{Point, SphereContext};
use scatterlab_core::greens::{
    classify, quasimode_residual, GreensSpec, Scenario, ScenarioSample, SemiclassicalPoint,
    DEFAULT_CLASSIFY_TOLERANCE,
};
use std::collections::BTreeMap;

pub fn run(config: &Config) -> Result<Report> {
    let d = config.dim()?;
    let seed = config.u64("seed", 42)?;
    let ctx = SphereContext::new(d).map_err(|e| anyhow!(e))?;
    let sigma = config.f64("sigma", 0.5)?;
    let rho = config.i32("rho", 1)?;
    let h_grid = config.list_u32("h_inv", &[125, 250, 500, 1000, 2000])?;
    let upsilon_grid = config.list_u32("upsilon", &[4, 8, 16, 32, 64])?;
    let fixed_upsilon = config.u32("fixed_upsilon", 16)?;
    let slope_tol = config.tolerance("tol.slope", 0.1)?;
    let beta = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let q = Point::pole(d);

    // classification from an exact-sigma tail
    let samples: Vec<ScenarioSample> = [100u32, 200, 400]
        .iter()
        .map(|&ell| {
            Ok(ScenarioSample {
                point: SemiclassicalPoint::from_ell_sigma(&ctx, ell_with_parity(ell, rho), sigma)
                    .map_err(|e| anyhow!(e))?,
                beta,
            })
        })
        .collect::<Result<_>>()?;
    let cls = classify(&samples, DEFAULT_CLASSIFY_TOLERANCE).map_err(|e| anyhow!(e))?;
    assert_eq!(cls.scenario, Scenario::One);

    let mut rows = Vec::new();

    // residual along h -> 0 at fixed window
    let along_h: Vec<Result<(f64, f64)>> = parallel_map(h_grid.len(), |i| {
        let ell = ell_with_parity(h_grid[i], rho);
        let point = SemiclassicalPoint::from_ell_sigma(&ctx, ell, sigma).map_err(|e| anyhow!(e))?;
        let spec = GreensSpec::with_default_truncation(ctx, q.clone(), beta, point)
            .map_err(|e| anyhow!(e))?;
        let res = quasimode_residual(&spec, &cls, fixed_upsilon).map_err(|e| anyhow!(e))?;
        Ok((1.0 / point.h(), res.residual))
    });
    // near the window-limited floor the exact residual may creep a few
    // percent toward the floor from below while the error budget shrinks;
    // the check allows the same 10% jitter as the norm convergence
    let mut prev = f64::INFINITY;
    let mut first = None;
    for r in along_h {
        let (h_inv, residual) = r?;
        let mut params = BTreeMap::new();
        params.insert("sweep".into(), "h".into());
        let first_val = *first.get_or_insert(residual);
        let pass = residual <= prev * 1.10 && residual <= first_val * 1.10;
        prev = residual;
        rows.push(
            VerdictRow {
                h_inv: Some(h_inv),
                upsilon: Some(fixed_upsilon as f64),
                sigma: Some(sigma),
                rho: Some(rho),
                measured: Some(residual),
                ref_provenance: "shrink along h up to 10% jitter".into(),
                pass,
                ..VerdictRow::new("quasimode", d)
            }
            .with_params(&params),
        );
    }

    // residual along the window at fixed small h: slope -1/2
    let finest = ell_with_parity(*h_grid.last().unwrap(), rho);
    let along_upsilon: Vec<Result<(u32, f64)>> = parallel_map(upsilon_grid.len(), |i| {
        let point =
            SemiclassicalPoint::from_ell_sigma(&ctx, finest, sigma).map_err(|e| anyhow!(e))?;
        let spec = GreensSpec::with_default_truncation(ctx, q.clone(), beta, point)
            .map_err(|e| anyhow!(e))?;
        let res = quasimode_residual(&spec, &cls, upsilon_grid[i]).map_err(|e| anyhow!(e))?;
        Ok((upsilon_grid[i], res.residual))
    });
    let mut fitted = Vec::new();
    let mut prev = f64::INFINITY;
    for r in along_upsilon {
        let (upsilon, residual) = r?;
        let mut params = BTreeMap::new();
        params.insert("sweep".into(), "upsilon".into());
        let pass = residual <= prev * 1.02;
        prev = residual;
        rows.push(
            VerdictRow {
                h_inv: Some(finest as f64),
                upsilon: Some(upsilon as f64),
                sigma: Some(sigma),
                rho: Some(rho),
                measured: Some(residual),
                ref_provenance: "monotone shrink along the window".into(),
                pass,
                ..VerdictRow::new("quasimode", d)
            }
            .with_params(&params),
        );
        fitted.push((upsilon as f64, residual));
    }
    let fit = fit_rate(&fitted)?;
    let mut params = BTreeMap::new();
    params.insert("fit".into(), "residual vs upsilon".into());
    rows.push(
        VerdictRow {
            h_inv: Some(finest as f64),
            sigma: Some(sigma),
            rho: Some(rho),
            measured: Some(fit.slope),
            reference: Some(-0.5),
            slope: Some(fit.slope),
            ref_provenance: "window-limited regime".into(),
            ..VerdictRow::new("quasimode", d)
        }
        .with_params(&params)
        .judge_abs(slope_tol),
    );

    // scenario 3: the resonant combination tracks the offset with finite
    // ratio c; the residual obeys the same window budget plus the ratio gap
    {
        let offsets = [1e-2f64, 1e-3, 1e-4];
        let samples3: Vec<ScenarioSample> = [100u32, 200, 400]
            .iter()
            .enumerate()
            .map(|(i, &ell)| {
                let s = offsets[i];
                // beta with beta_q + rho beta_{-q} = -s, so c = 1 exactly
                let a = -s / 2.0;
                let t = ((1.0 - 2.0 * a * a) / 2.0f64).sqrt();
                Ok(ScenarioSample {
                    point: SemiclassicalPoint::from_ell_sigma(&ctx, ell_with_parity(ell, 1), s)
                        .map_err(|e| anyhow!(e))?,
                    beta: [Complex64::new(a + t, 0.0), Complex64::new(a - t, 0.0)],
                })
            })
            .collect::<Result<_>>()?;
        let cls3 = classify(&samples3, DEFAULT_CLASSIFY_TOLERANCE).map_err(|e| anyhow!(e))?;
        assert_eq!(cls3.scenario, Scenario::Three);
        let last = samples3.last().unwrap();
        let mut prev = f64::INFINITY;
        for upsilon in [4u32, 16, 64] {
            let spec = GreensSpec::with_default_truncation(ctx, q.clone(), last.beta, last.point)
                .map_err(|e| anyhow!(e))?;
            let res = quasimode_residual(&spec, &cls3, upsilon).map_err(|e| anyhow!(e))?;
            let budget = 3.0 * (res.upsilon_h + res.upsilon_invsqrt + res.sigma_gap + res.beta_gap);
            let mut params = BTreeMap::new();
            params.insert("scenario".into(), "3".into());
            rows.push(
                VerdictRow {
                    h_inv: Some(1.0 / last.point.h()),
                    upsilon: Some(upsilon as f64),
                    sigma: Some(cls3.sigma),
                    rho: Some(cls3.rho),
                    measured: Some(res.residual),
                    reference: Some(budget),
                    ref_provenance: "window error budget".into(),
                    abs_err: Some(res.residual),
                    pass: res.residual <= budget && res.residual <= prev,
                    ..VerdictRow::new("quasimode", d)
                }
                .with_params(&params),
            );
            prev = res.residual;
        }
    }

    // scenario 4: on-spectrum with the resonant combination vanishing
    {
        let beta4 = [
            Complex64::new(1.0 / 2f64.sqrt(), 0.0),
            Complex64::new(-1.0 / 2f64.sqrt(), 0.0),
        ];
        let samples4: Vec<ScenarioSample> = [100u32, 200, 400]
            .iter()
            .map(|&ell| {
                Ok(ScenarioSample {
                    point: SemiclassicalPoint::from_ell_sigma(&ctx, ell_with_parity(ell, 1), 0.0)
                        .map_err(|e| anyhow!(e))?,
                    beta: beta4,
                })
            })
            .collect::<Result<_>>()?;
        let cls4 = classify(&samples4, DEFAULT_CLASSIFY_TOLERANCE).map_err(|e| anyhow!(e))?;
        assert_eq!(cls4.scenario, Scenario::Four);
        let point = samples4.last().unwrap().point;
        let mut prev = f64::INFINITY;
        for upsilon in [4u32, 16, 64] {
            let spec = GreensSpec::with_default_truncation(ctx, q.clone(), beta4, point)
                .map_err(|e| anyhow!(e))?;
            let res = quasimode_residual(&spec, &cls4, upsilon).map_err(|e| anyhow!(e))?;
            let budget = 3.0 * (res.upsilon_h + res.upsilon_invsqrt);
            let mut params = BTreeMap::new();
            params.insert("scenario".into(), "4".into());
            rows.push(
                VerdictRow {
                    h_inv: Some(1.0 / point.h()),
                    upsilon: Some(upsilon as f64),
                    sigma: Some(0.0),
                    rho: Some(cls4.rho),
                    measured: Some(res.residual),
                    reference: Some(budget),
                    ref_provenance: "window error budget".into(),
                    abs_err: Some(res.residual),
                    pass: res.residual <= budget && res.residual <= prev,
                    ..VerdictRow::new("quasimode", d)
                }
                .with_params(&params),
            );
            prev = res.residual;
        }
    }

    // scenario 2: residual bounded by 2 (h + offset / resonant combination)
    let sigma2_grid = config.list_f64("scenario2_sigma", &[0.2, 0.1, 0.05, 0.02])?;
    let ell2_grid = config.list_u32("scenario2_h_inv", &[200, 400, 800])?;
    let samples2: Vec<ScenarioSample> = sigma2_grid
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            Ok(ScenarioSample {
                point: SemiclassicalPoint::from_ell_sigma(
                    &ctx,
                    ell_with_parity(ell2_grid[i % ell2_grid.len()], rho),
                    s,
                )
                .map_err(|e| anyhow!(e))?,
                beta,
            })
        })
        .collect::<Result<_>>()?;
    let cls2 = classify(&samples2, 0.5).map_err(|e| anyhow!(e))?;
    assert_eq!(cls2.scenario, Scenario::Two);
    for &s in &sigma2_grid {
        for &ht in &ell2_grid {
            let ell = ell_with_parity(ht, rho);
            let point = SemiclassicalPoint::from_ell_sigma(&ctx, ell, s).map_err(|e| anyhow!(e))?;
            let spec = GreensSpec::with_default_truncation(ctx, q.clone(), beta, point)
                .map_err(|e| anyhow!(e))?;
            let res = quasimode_residual(&spec, &cls2, 1).map_err(|e| anyhow!(e))?;
            let bound = 2.0 * (point.h() + res.resonant_ratio.unwrap_or(f64::INFINITY));
            let mut params = BTreeMap::new();
            params.insert("scenario".into(), "2".into());
            rows.push(
                VerdictRow {
                    h_inv: Some(1.0 / point.h()),
                    upsilon: Some(1.0),
                    sigma: Some(s),
                    rho: Some(rho),
                    measured: Some(res.residual),
                    reference: Some(bound),
                    ref_provenance: "two-term residual bound".into(),
                    abs_err: Some(res.residual),
                    pass: res.residual <= bound,
                    ..VerdictRow::new("quasimode", d)
                }
                .with_params(&params),
            );
        }
    }

    Ok(Report {
        experiment: "quasimode".into(),
        d,
        seed,
        anchor: String::new(),
        rows,
    })
}
