//! least-squares line fits used by the growth-exponent and tail-exponent
//! diagnostics. nothing fancy: closed-form normal equations on (x, y) pairs,
//! plus a log-log variant restricted to the top decade of x, which is where
//! asymptotic exponents live.

/// fitted line y = slope·x + intercept with the worst absolute residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// ordinary least squares through the given points. needs at least two
/// points with distinct x; callers validate their sample sizes first.
pub fn linear_fit(points: &[(f64, f64)]) -> LineFit {
    assert!(points.len() >= 2, "line fit needs at least two points");
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    assert!(sxx > 0.0, "line fit needs at least two distinct x values");
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let max_residual = points
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    LineFit { slope, intercept, max_residual }
}

/// fit log y = slope·log x + intercept over the points whose x lies in the
/// top decade [x_max/10, x_max]. points with nonpositive x or y are skipped
/// (a zero sample carries no exponent information); if the decade holds
/// fewer than two usable points the fit falls back to all usable points.
pub fn log_log_fit_top_decade(points: &[(f64, f64)]) -> LineFit {
    let x_max = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let usable = |lo: f64| -> Vec<(f64, f64)> {
        points
            .iter()
            .filter(|&&(x, y)| x >= lo && x > 0.0 && y > 0.0)
            .map(|&(x, y)| (x.ln(), y.ln()))
            .collect()
    };
    let mut logged = usable(x_max / 10.0);
    if logged.len() < 2 {
        logged = usable(0.0);
    }
    linear_fit(&logged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 * i as f64 - 2.0)).collect();
        let fit = linear_fit(&pts);
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept + 2.0).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
    }

    #[test]
    fn power_law_exponent_from_top_decade() {
        // y = 5 x^{-2} with a big transient at small x that the decade
        // restriction must ignore.
        let pts: Vec<(f64, f64)> = (1..=1000)
            .map(|i| {
                let x = i as f64;
                let transient = if x < 50.0 { 40.0 } else { 0.0 };
                (x, 5.0 * x.powi(-2) + transient)
            })
            .collect();
        let fit = log_log_fit_top_decade(&pts);
        assert!((fit.slope + 2.0).abs() < 1e-6, "slope {}", fit.slope);
        assert!((fit.intercept - 5.0_f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn zero_samples_are_skipped() {
        let pts = vec![(0.0, 0.0), (1.0, 2.0), (2.0, 4.0), (10.0, 20.0), (20.0, 40.0)];
        let fit = log_log_fit_top_decade(&pts);
        assert!((fit.slope - 1.0).abs() < 1e-9);
    }
}
