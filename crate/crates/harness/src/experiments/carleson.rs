//! Boundary-profile Fourier checks: total mass `2 pi`, the two-step values,
//! refinement of partial sums away from the jumps, and pointwise
//! convergence at the midpoint with a deep window.

use crate::config::Config;
use crate::report::{Report, VerdictRow};
use anyhow::{anyhow, Result};
use num_complex::Complex64;
use scatterlab_core::geometry::SphereContext;
use scatterlab_core::greens::{
    choose_beta_for_weights, series_constant, Scenario, ScenarioClassification,
};
use scatterlab_core::quad::gauss_legendre;
use scatterlab_core::semiclassics::{carleson_check, fourier_profile, partial_fourier_sum};
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub fn run(config: &Config) -> Result<Report> {
    let d = config.dim()?;
    let seed = config.u64("seed", 42)?;
    SphereContext::new(d).map_err(|e| anyhow!(e))?;
    let sigma = config.f64("sigma", 0.5)?;
    let rho = config.i32("rho", 1)?;
    let m_plus = config.f64("m_plus", 2.0)?;
    let step_tol = config.tolerance("tol.step", 1e-10)?;
    let upsilons = config.list_u32("upsilon", &[16, 64, 256])?;
    let grid_points = config.u32("grid_points", 2001)? as usize;
    let deep_window = config.u32("deep_window", 10_000)?;
    let mut rows = Vec::new();

    let beta = choose_beta_for_weights(sigma, rho, m_plus, 2.0 - m_plus).map_err(|e| anyhow!(e))?;
    let mut cls = ScenarioClassification {
        scenario: Scenario::One,
        sigma,
        beta,
        rho,
        c_limit: None,
        constant: None,
    };
    cls.constant = Some(series_constant(&cls).map_err(|e| anyhow!(e))?.constant);
    let profile = fourier_profile(&cls).map_err(|e| anyhow!(e))?;

    // mass: per-leg quadrature of |gamma|^2 sums to 2 pi
    let leg = gauss_legendre(80);
    let mass = leg
        .mapped(0.0, PI)
        .integrate(|t| profile.eval(t).norm_sqr())
        + leg
            .mapped(PI, 2.0 * PI)
            .integrate(|t| profile.eval(t).norm_sqr());
    let mut params = BTreeMap::new();
    params.insert("check".into(), "profile mass".into());
    rows.push(
        VerdictRow {
            sigma: Some(sigma),
            rho: Some(rho),
            measured: Some(mass),
            reference: Some(2.0 * PI),
            ref_provenance: "two-leg quadrature".into(),
            ..VerdictRow::new("carleson", d)
        }
        .with_params(&params)
        .judge_abs(step_tol),
    );

    // step values match the weights away from the jumps
    for (t, want, name) in [
        (PI / 2.0, profile.m_plus, "first leg"),
        (3.0 * PI / 2.0, profile.m_minus, "second leg"),
    ] {
        let mut params = BTreeMap::new();
        params.insert("check".into(), format!("step value on the {name}"));
        rows.push(
            VerdictRow {
                sigma: Some(sigma),
                rho: Some(rho),
                measured: Some(profile.eval(t).norm_sqr()),
                reference: Some(want),
                ref_provenance: "two-step weight".into(),
                ..VerdictRow::new("carleson", d)
            }
            .with_params(&params)
            .judge_abs(step_tol),
        );
    }
    // the weights themselves satisfy the mass constraint
    let mut params = BTreeMap::new();
    params.insert("check".into(), "weight mean".into());
    rows.push(
        VerdictRow {
            sigma: Some(sigma),
            rho: Some(rho),
            measured: Some(0.5 * (profile.m_plus + profile.m_minus)),
            reference: Some(1.0),
            ref_provenance: "weight normalization".into(),
            ..VerdictRow::new("carleson", d)
        }
        .with_params(&params)
        .judge_abs(1e-12),
    );

    // sup errors decrease with the window
    let table = carleson_check(&cls, &upsilons, grid_points).map_err(|e| anyhow!(e))?;
    let mut prev = f64::INFINITY;
    for (upsilon, sup) in table {
        let mut params = BTreeMap::new();
        params.insert("check".into(), "sup error off jumps".into());
        rows.push(
            VerdictRow {
                upsilon: Some(upsilon as f64),
                sigma: Some(sigma),
                rho: Some(rho),
                measured: Some(sup),
                ref_provenance: "partial Fourier sum".into(),
                pass: sup < prev,
                ..VerdictRow::new("carleson", d)
            }
            .with_params(&params),
        );
        prev = sup;
    }

    // pointwise at t = pi/2 with a deep window
    let t = PI / 2.0;
    let gap = (partial_fourier_sum(&profile, deep_window, t) - profile.eval(t)).norm();
    let mut params = BTreeMap::new();
    params.insert("check".into(), "midpoint convergence".into());
    rows.push(
        VerdictRow {
            upsilon: Some(deep_window as f64),
            sigma: Some(sigma),
            rho: Some(rho),
            measured: Some(gap),
            reference: Some(0.0),
            ref_provenance: "pointwise limit".into(),
            abs_err: Some(gap),
            pass: gap <= 1e-3,
            ..VerdictRow::new("carleson", d)
        }
        .with_params(&params),
    );

    // a second profile with balanced weights stays flat
    let flat = {
        let beta = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut cls = ScenarioClassification {
            scenario: Scenario::One,
            sigma,
            beta,
            rho,
            c_limit: None,
            constant: None,
        };
        cls.constant = Some(series_constant(&cls).map_err(|e| anyhow!(e))?.constant);
        fourier_profile(&cls).map_err(|e| anyhow!(e))?
    };
    let mut params = BTreeMap::new();
    params.insert("check".into(), "balanced profile is flat".into());
    rows.push(
        VerdictRow {
            sigma: Some(sigma),
            rho: Some(rho),
            measured: Some(flat.eval(1.0).norm_sqr()),
            reference: Some(1.0),
            ref_provenance: "two-step weight".into(),
            ..VerdictRow::new("carleson", d)
        }
        .with_params(&params)
        .judge_abs(step_tol),
    );

    Ok(Report {
        experiment: "carleson".into(),
        d,
        seed,
        anchor: String::new(),
        rows,
    })
}
