use crate::error::{invalid, Result};

/// Ordinary least squares y ≈ a + b x; returns (slope b, intercept a).
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("least squares needs at least two paired points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("least squares with constant abscissae"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    Ok((b, my - b * mx))
}

/// Slope of log y against log x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(invalid("log-log fit needs positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    least_squares(&lx, &ly).map(|(b, _)| b)
}

/// δ in ratio ≈ C (L/H + 1/L)^δ, fitted over the H sweep at fixed L.
pub fn fit_delta(hs: &[f64], l: f64, ratios: &[f64]) -> Result<f64> {
    let base: Vec<f64> = hs.iter().map(|h| l / h + 1.0 / l).collect();
    loglog_slope(&base, ratios)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let (b, a) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((b - 2.0).abs() < 1e-14 && (a - 1.0).abs() < 1e-14);
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn power_law() {
        let xs = [4.0, 8.0, 16.0, 32.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.25)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() - 0.25).abs() < 1e-12);
        assert!(loglog_slope(&xs, &[1.0, -1.0, 1.0, 1.0]).is_err());
        let hs = [16.0, 32.0, 64.0];
        let r: Vec<f64> = hs.iter().map(|h| (4.0 / h + 0.25f64).powf(0.7)).collect();
        assert!((fit_delta(&hs, 4.0, &r).unwrap() - 0.7).abs() < 1e-12);
    }
}
