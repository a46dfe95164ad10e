//! Least-squares rate fitting for convergence verdicts.

use anyhow::{bail, Result};

/// Power-law fit `y = exp(intercept) x^slope` by ordinary least squares on
/// `(log x, log y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    if samples.len() < 3 {
        bail!("rate fit needs at least 3 samples, got {}", samples.len());
    }
    if samples.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        bail!("rate fit needs strictly positive samples");
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (slope, intercept, r_squared) = ols(&logs);
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Plain linear OLS `y = slope x + intercept` (used for semilog decay
/// fits where `y` is already a logarithm).
pub fn fit_linear(samples: &[(f64, f64)]) -> Result<RateFit> {
    if samples.len() < 3 {
        bail!("linear fit needs at least 3 samples, got {}", samples.len());
    }
    let (slope, intercept, r_squared) = ols(samples);
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

fn ols(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (slope, intercept, r_squared)
}

/// Two-covariate OLS `log y = a log x1 + b log x2 + c` over a product grid;
/// returns `(a, b)`.
pub fn fit_rate_2d(samples: &[(f64, f64, f64)]) -> Result<(f64, f64)> {
    if samples.len() < 4 {
        bail!("2-D rate fit needs at least 4 samples");
    }
    if samples
        .iter()
        .any(|&(x1, x2, y)| x1 <= 0.0 || x2 <= 0.0 || y <= 0.0)
    {
        bail!("2-D rate fit needs strictly positive samples");
    }
    let n = samples.len() as f64;
    let (mut m1, mut m2, mut my) = (0.0, 0.0, 0.0);
    for &(x1, x2, y) in samples {
        m1 += x1.ln();
        m2 += x2.ln();
        my += y.ln();
    }
    m1 /= n;
    m2 /= n;
    my /= n;
    let (mut s11, mut s22, mut s12, mut s1y, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x1, x2, y) in samples {
        let d1 = x1.ln() - m1;
        let d2 = x2.ln() - m2;
        let dy = y.ln() - my;
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
        s1y += d1 * dy;
        s2y += d2 * dy;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < 1e-12 * s11.max(s22).max(1.0) {
        bail!("degenerate design: the two covariates are collinear");
    }
    let a = (s22 * s1y - s12 * s2y) / det;
    let b = (s11 * s2y - s12 * s1y) / det;
    Ok((a, b))
}
