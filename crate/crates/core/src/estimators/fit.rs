use crate::error::{Error, Result};

/// Least-squares fit `log value = slope * log t + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

/// Ordinary least squares on `(log t, log value)`.
pub fn exponent_fit(ts: &[f64], values: &[f64]) -> Result<PowerFit> {
    if ts.len() != values.len() {
        return Err(Error::SizeMismatch {
            expected: ts.len(),
            actual: values.len(),
        });
    }
    if ts.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs at least 4 points, got {}",
            ts.len()
        )));
    }
    if let Some((t, v)) = ts.iter().zip(values).find(|(t, v)| !(**t > 0.0 && **v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs positive finite points, got ({t}, {v})"
        )));
    }
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("power-law fit needs distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - slope * x - intercept;
            r * r
        })
        .sum();
    Ok(PowerFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}
