//! The flow-out limit of zonal matrix elements: `<z_ell, W z_ell>` for
//! words in the banded position/momentum pair approaches the corresponding
//! flow-out average at rate `O(1/ell)`.

use super::parallel_map;
use crate::config::Config;
use crate::fit::fit_rate;
use crate::report::{Report, VerdictRow};
use anyhow::{anyhow, Result};
use scatterlab_core::geometry::{Point, SphereContext};
use scatterlab_core::greens::ZonalExpansion;
use scatterlab_core::semiclassics::{
    matrix_element, measure_integral, momentum_matrix, multiplication_matrix, BandedObservable,
    MeasureSpec, SymbolPoly,
};
use std::collections::BTreeMap;

pub fn run(config: &Config) -> Result<Report> {
    let d = config.dim()?;
    let seed = config.u64("seed", 42)?;
    let ctx = SphereContext::new(d).map_err(|e| anyhow!(e))?;
    let ells = config.list_u32("ell", &[100, 200, 400, 800, 1600])?;
    let center = Point::pole(d);
    let nu_q = MeasureSpec::single_flowout(ctx, center.clone()).map_err(|e| anyhow!(e))?;

    // monomial words (kappa powers, varsigma powers) up to total degree 4
    let monomials: Vec<(u32, u32)> = vec![(2, 0), (0, 2), (1, 0), (1, 1), (2, 2), (0, 4)];
    let references: Vec<f64> = monomials
        .iter()
        .map(|&(i, j)| {
            Ok(
                measure_integral(&nu_q, &SymbolPoly::monomial(center.clone(), i, j))
                    .map_err(|e| anyhow!(e))?
                    .re,
            )
        })
        .collect::<Result<_>>()?;

    struct Cell {
        ell: u32,
        values: Vec<f64>,
    }
    let computed: Vec<Result<Cell>> = parallel_map(ells.len(), |idx| {
        let ell = ells[idx];
        let ell_max = ell + 8;
        let h = 1.0 / ctx.lambda_sq(ell).sqrt();
        let kmat = multiplication_matrix(&ctx, &center, ell_max);
        let vmat = momentum_matrix(&ctx, &center, h, ell_max);
        let z = ZonalExpansion::basis_vector(ctx, center.clone(), ell, ell_max);
        let mut values = Vec::new();
        for &(i, j) in &monomials {
            let mut word: Vec<&BandedObservable> = Vec::new();
            for _ in 0..i {
                word.push(&kmat);
            }
            for _ in 0..j {
                word.push(&vmat);
            }
            values.push(matrix_element(&z, &word, &z).map_err(|e| anyhow!(e))?.re);
        }
        Ok(Cell { ell, values })
    });

    let mut rows = Vec::new();
    let mut worst_errors: Vec<(f64, f64)> = Vec::new();
    for cell in computed {
        let cell = cell?;
        let mut worst = 0.0f64;
        for (m, (&(i, j), &reference)) in monomials.iter().zip(&references).enumerate() {
            let measured = cell.values[m];
            let err = (measured - reference).abs();
            worst = worst.max(err);
            // headline tolerances: 3/ell for cos^2, 5/ell for the momentum
            // square, 8/ell for the longer words
            let tol = match (i, j) {
                (2, 0) => 3.0 / cell.ell as f64,
                (0, 2) => 5.0 / cell.ell as f64,
                _ => 8.0 / cell.ell as f64,
            };
            let mut params = BTreeMap::new();
            params.insert("word".into(), format!("kappa^{i} varsigma^{j}"));
            rows.push(
                VerdictRow {
                    h_inv: Some(ctx.lambda_sq(cell.ell).sqrt()),
                    upsilon: None,
                    measured: Some(measured),
                    reference: Some(reference),
                    ref_provenance: "analytic flow-out integrator".into(),
                    abs_err: Some(err),
                    pass: err <= tol,
                    ..VerdictRow::new("zonal-limit", d)
                }
                .with_params(&params),
            );
        }
        worst_errors.push((cell.ell as f64, worst));
    }

    // fitted decay of the worst word error: at least O(1/ell)
    let positive: Vec<(f64, f64)> = worst_errors
        .iter()
        .copied()
        .filter(|&(_, e)| e > 1e-14)
        .collect();
    let (slope, pass) = if positive.len() >= 3 {
        let fit = fit_rate(&positive)?;
        (Some(fit.slope), fit.slope <= -0.85)
    } else {
        // errors at rounding level: nothing to fit, trivially fast decay
        (None, true)
    };
    let mut params = BTreeMap::new();
    params.insert("fit".into(), "max word error vs ell".into());
    rows.push(
        VerdictRow {
            measured: slope,
            reference: Some(-1.0),
            slope,
            ref_provenance: "decay at least O(1/ell)".into(),
            pass,
            ..VerdictRow::new("zonal-limit", d)
        }
        .with_params(&params),
    );

    Ok(Report {
        experiment: "zonal-limit".into(),
        d,
        seed,
        anchor: String::new(),
        rows,
    })
}
