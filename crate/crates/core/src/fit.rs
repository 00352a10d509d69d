//! Weighted least-squares fits for the three model families used in the
//! analysis: power law `y = c·x^φ`, line `y = γ - δ·x`, and shifted power
//! law `y = ζ + ξ·x^α`.
//!
//! Weights are `1/y_err²` when every point carries a positive `y_err`; the
//! parameter covariance is then taken as is. When any `y_err` is zero the
//! fit is unweighted and the covariance is scaled by the residual variance.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Observation with a one-sigma uncertainty on `y` (0 = unknown).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub x: f64,
    pub y: f64,
    pub y_err: f64,
}

impl WeightedPoint {
    pub fn new(x: f64, y: f64, y_err: f64) -> Self {
        Self { x, y, y_err }
    }

    pub fn unweighted(x: f64, y: f64) -> Self {
        Self { x, y, y_err: 0.0 }
    }
}

/// `y = coeff · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub coeff: f64,
    pub exponent: f64,
    pub coeff_err: f64,
    pub exponent_err: f64,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeff * x.powf(self.exponent)
    }
}

/// `y = gamma - delta · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub gamma: f64,
    pub delta: f64,
    pub gamma_err: f64,
    pub delta_err: f64,
}

impl LinearFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.gamma - self.delta * x
    }
}

/// `y = zeta + xi · x^alpha_exp`; `zeta` is the `x → 0` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrapolationFit {
    pub zeta: f64,
    pub zeta_err: f64,
    pub xi: f64,
    pub xi_err: f64,
    pub alpha_exp: f64,
    pub alpha_err: f64,
    /// Weighted residual sum of squares at the optimum.
    pub rss: f64,
}

impl ExtrapolationFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.zeta + self.xi * x.powf(self.alpha_exp)
    }
}

/// Inverse-variance weighted mean of fitted exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentAverage {
    pub mean: f64,
    pub err: f64,
}

/// Lower (exclusive) and upper edge of the exponent scan.
pub const ALPHA_SCAN: (f64, f64) = (0.02, 1.2);
const ALPHA_SCAN_STEP: f64 = 0.01;
const GOLDEN_REL_TOL: f64 = 1e-6;

fn weights(points: &[WeightedPoint]) -> (Vec<f64>, bool) {
    let weighted = points
        .iter()
        .all(|p| p.y_err > 0.0 && p.y_err.is_finite());
    let w = points
        .iter()
        .map(|p| if weighted { 1.0 / (p.y_err * p.y_err) } else { 1.0 })
        .collect();
    (w, weighted)
}

fn check_finite(points: &[WeightedPoint]) -> Result<()> {
    for (index, p) in points.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::Domain {
                index,
                reason: "non-finite coordinate",
            });
        }
        if !(p.y_err >= 0.0) {
            return Err(Error::Domain {
                index,
                reason: "negative or NaN y_err",
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Line {
    intercept: f64,
    slope: f64,
    intercept_var: f64,
    slope_var: f64,
    rss: f64,
}

/// Weighted straight line through `(x, y)` with weights `w`.
///
/// Variances are the raw `(XᵀWX)⁻¹` entries; callers rescale them for
/// unweighted fits.
fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Result<Line> {
    let sw: f64 = w.iter().sum();
    let x_bar = x.iter().zip(w).map(|(x, w)| w * x).sum::<f64>() / sw;
    let y_bar = y.iter().zip(w).map(|(y, w)| w * y).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((&x, &y), &w) in x.iter().zip(y).zip(w) {
        let dx = x - x_bar;
        sxx += w * dx * dx;
        sxy += w * dx * (y - y_bar);
    }
    let spread = x.iter().map(|v| (v - x_bar).abs()).fold(0.0, f64::max);
    if !(sxx > 0.0) || spread <= 1e-14 * x_bar.abs() {
        return Err(Error::RankDeficient("all abscissas are equal"));
    }
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let rss = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((x, y), w)| {
            let r = y - intercept - slope * x;
            w * r * r
        })
        .sum();
    Ok(Line {
        intercept,
        slope,
        intercept_var: 1.0 / sw + x_bar * x_bar / sxx,
        slope_var: 1.0 / sxx,
        rss,
    })
}

/// Scale applied to raw covariances: 1 for weighted fits, the residual
/// variance otherwise (NaN when there are no spare degrees of freedom).
fn covariance_scale(weighted: bool, rss: f64, n: usize, params: usize) -> f64 {
    if weighted {
        1.0
    } else if n > params {
        rss / (n - params) as f64
    } else {
        f64::NAN
    }
}

/// Power law by weighted linear regression of `ln y` on `ln x`; the log
/// residual of each point is weighted by `(y / y_err)²`.
pub fn fit_power_law(points: &[WeightedPoint]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            need: 3,
            got: points.len(),
        });
    }
    check_finite(points)?;
    for (index, p) in points.iter().enumerate() {
        if p.x <= 0.0 || p.y <= 0.0 {
            return Err(Error::Domain {
                index,
                reason: "power law needs x > 0 and y > 0",
            });
        }
    }
    let x: Vec<f64> = points.iter().map(|p| p.x.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.y.ln()).collect();
    // d(ln y) = dy / y
    let log_points: Vec<WeightedPoint> = points
        .iter()
        .map(|p| WeightedPoint::new(p.x, p.y, p.y_err / p.y))
        .collect();
    let (w, weighted) = weights(&log_points);
    let line = weighted_line(&x, &y, &w)?;
    let scale = covariance_scale(weighted, line.rss, points.len(), 2);
    let coeff = line.intercept.exp();
    let fit = PowerLawFit {
        coeff,
        exponent: line.slope,
        coeff_err: coeff * (line.intercept_var * scale).sqrt(),
        exponent_err: (line.slope_var * scale).sqrt(),
    };
    if !(fit.coeff.is_finite() && fit.exponent.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(fit)
}

/// Straight line `y = γ - δ·x`; the reported `delta` is the negated slope.
pub fn fit_linear(points: &[WeightedPoint]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            need: 2,
            got: points.len(),
        });
    }
    check_finite(points)?;
    let x: Vec<f64> = points.iter().map(|p| p.x).collect();
    let y: Vec<f64> = points.iter().map(|p| p.y).collect();
    let (w, weighted) = weights(points);
    let line = weighted_line(&x, &y, &w)?;
    let scale = covariance_scale(weighted, line.rss, points.len(), 2);
    Ok(LinearFit {
        gamma: line.intercept,
        delta: -line.slope,
        gamma_err: (line.intercept_var * scale).sqrt(),
        delta_err: (line.slope_var * scale).sqrt(),
    })
}

struct ShiftedProblem {
    x: Vec<f64>,
    ln_x: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

impl ShiftedProblem {
    fn new(points: &[WeightedPoint]) -> Self {
        let (w, _) = weights(points);
        Self {
            x: points.iter().map(|p| p.x).collect(),
            ln_x: points.iter().map(|p| p.x.ln()).collect(),
            y: points.iter().map(|p| p.y).collect(),
            w,
        }
    }

    /// Best `(ζ, ξ)` for a fixed exponent.
    fn profile(&self, alpha: f64) -> Result<Line> {
        let t: Vec<f64> = self.x.iter().map(|x| x.powf(alpha)).collect();
        weighted_line(&t, &self.y, &self.w)
    }

    fn rss(&self, zeta: f64, xi: f64, alpha: f64) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .zip(&self.w)
            .map(|((x, y), w)| {
                let r = y - zeta - xi * x.powf(alpha);
                w * r * r
            })
            .sum()
    }

    /// `JᵀWJ` and `JᵀWr` for parameters `(ζ, ξ, α)`.
    fn normal_equations(&self, p: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>) {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for i in 0..self.x.len() {
            let t = self.x[i].powf(p[2]);
            let row = Vector3::new(1.0, t, p[1] * t * self.ln_x[i]);
            let r = self.y[i] - p[0] - p[1] * t;
            jtj += self.w[i] * row * row.transpose();
            jtr += self.w[i] * r * row;
        }
        (jtj, jtr)
    }

    /// Gauss-Newton polish of all three parameters, accepting only steps
    /// that lower the residual.
    fn polish(&self, start: Vector3<f64>) -> Vector3<f64> {
        let mut p = start;
        let mut rss = self.rss(p[0], p[1], p[2]);
        for _ in 0..50 {
            let (jtj, jtr) = self.normal_equations(&p);
            let Some(step) = jtj.cholesky().map(|c| c.solve(&jtr)) else {
                break;
            };
            let mut scale = 1.0;
            let mut improved = false;
            for _ in 0..20 {
                let trial = p + step * scale;
                let trial_rss = self.rss(trial[0], trial[1], trial[2]);
                if trial_rss.is_finite() && trial_rss < rss {
                    p = trial;
                    rss = trial_rss;
                    improved = true;
                    break;
                }
                scale *= 0.5;
            }
            if !improved || step.norm() * scale <= 1e-15 * p.norm() {
                break;
            }
        }
        p
    }
}

/// Weighted residual sum of squares of the shifted power law at a fixed
/// exponent, with `(ζ, ξ)` solved exactly.
pub fn shifted_power_rss(points: &[WeightedPoint], alpha: f64) -> Result<f64> {
    Ok(ShiftedProblem::new(points).profile(alpha)?.rss)
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo) > rel_tol * (lo.abs() + hi.abs()) / 2.0 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

/// Shifted power law `y = ζ + ξ·x^α`.
///
/// `α` is scanned over `(0.02, 1.2]` in steps of 0.01 with `(ζ, ξ)` solved
/// in closed form at each node, refined by golden section around the best
/// node, then polished jointly by Gauss-Newton.
pub fn fit_shifted_power(points: &[WeightedPoint]) -> Result<ExtrapolationFit> {
    if points.len() < 4 {
        return Err(Error::TooFewPoints {
            need: 4,
            got: points.len(),
        });
    }
    check_finite(points)?;
    for (index, p) in points.iter().enumerate() {
        if p.x <= 0.0 {
            return Err(Error::Domain {
                index,
                reason: "shifted power law needs x > 0",
            });
        }
    }
    let problem = ShiftedProblem::new(points);
    let (_, weighted) = weights(points);

    let nodes = ((ALPHA_SCAN.1 - ALPHA_SCAN.0) / ALPHA_SCAN_STEP).round() as usize;
    let grid: Vec<f64> = (1..=nodes)
        .map(|k| ALPHA_SCAN.0 + k as f64 * ALPHA_SCAN_STEP)
        .collect();
    let mut best = (0usize, f64::INFINITY);
    for (k, &alpha) in grid.iter().enumerate() {
        let rss = problem.profile(alpha)?.rss;
        if rss < best.1 {
            best = (k, rss);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::NonFinite);
    }
    let k = best.0;
    if k == 0 || k == grid.len() - 1 {
        return Err(Error::AlphaAtBoundary { alpha: grid[k] });
    }

    let profile_rss = |a: f64| problem.profile(a).map(|l| l.rss).unwrap_or(f64::INFINITY);
    let alpha = golden_section(profile_rss, grid[k - 1], grid[k + 1], GOLDEN_REL_TOL);
    let line = problem.profile(alpha)?;
    let p = problem.polish(Vector3::new(line.intercept, line.slope, alpha));
    let rss = problem.rss(p[0], p[1], p[2]);

    let (jtj, _) = problem.normal_equations(&p);
    let scale = covariance_scale(weighted, rss, points.len(), 3);
    let cov = jtj
        .try_inverse()
        .map(|c| c * scale)
        .unwrap_or_else(|| Matrix3::from_element(f64::NAN));

    let fit = ExtrapolationFit {
        zeta: p[0],
        zeta_err: cov[(0, 0)].sqrt(),
        xi: p[1],
        xi_err: cov[(1, 1)].sqrt(),
        alpha_exp: p[2],
        alpha_err: cov[(2, 2)].sqrt(),
        rss,
    };
    if !(fit.zeta.is_finite() && fit.xi.is_finite() && fit.alpha_exp.is_finite() && rss.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(fit)
}

/// Inverse-variance weighted mean of the exponents. Falls back to the plain
/// mean with its standard error when any exponent lacks a positive error.
pub fn average_exponent(fits: &[PowerLawFit]) -> Result<ExponentAverage> {
    if fits.len() < 2 {
        return Err(Error::TooFewPoints {
            need: 2,
            got: fits.len(),
        });
    }
    let weighted = fits
        .iter()
        .all(|f| f.exponent_err > 0.0 && f.exponent_err.is_finite());
    if weighted {
        let (sw, swx) = fits.iter().fold((0.0, 0.0), |(sw, swx), f| {
            let w = 1.0 / (f.exponent_err * f.exponent_err);
            (sw + w, swx + w * f.exponent)
        });
        Ok(ExponentAverage {
            mean: swx / sw,
            err: 1.0 / sw.sqrt(),
        })
    } else {
        let n = fits.len() as f64;
        let mean = fits.iter().map(|f| f.exponent).sum::<f64>() / n;
        let var = fits
            .iter()
            .map(|f| (f.exponent - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        Ok(ExponentAverage {
            mean,
            err: (var / n).sqrt(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn power_law_exact_recovery() {
        let pts: Vec<_> = [1.0, 2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&x: &f64| WeightedPoint::unweighted(x, 2.0 * x.powf(-0.5)))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.coeff - 2.0).abs() < 1e-12);
        assert!((fit.exponent + 0.5).abs() < 1e-12);
    }

    #[test]
    fn power_law_domain_errors() {
        let mut pts = vec![
            WeightedPoint::unweighted(1.0, 1.0),
            WeightedPoint::unweighted(2.0, 1.0),
            WeightedPoint::unweighted(3.0, 1.0),
        ];
        pts[1].y = -1.0;
        assert!(matches!(fit_power_law(&pts), Err(Error::Domain { index: 1, .. })));
        pts[1].y = 1.0;
        pts[2].x = 0.0;
        assert!(matches!(fit_power_law(&pts), Err(Error::Domain { index: 2, .. })));
        assert!(matches!(
            fit_power_law(&pts[..2]),
            Err(Error::TooFewPoints { need: 3, got: 2 })
        ));
    }

    #[test]
    fn linear_exact_recovery_and_rank_error() {
        let pts: Vec<_> = [0.5, 0.6, 0.7, 0.8, 0.9]
            .iter()
            .map(|&x| WeightedPoint::unweighted(x, 0.001 - 0.0005 * x))
            .collect();
        let fit = fit_linear(&pts).unwrap();
        assert!((fit.gamma - 0.001).abs() < 1e-12);
        assert!((fit.delta - 0.0005).abs() < 1e-12);

        let flat = vec![WeightedPoint::unweighted(0.7, 1.0), WeightedPoint::unweighted(0.7, 2.0)];
        assert!(matches!(fit_linear(&flat), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn shifted_power_exact_recovery() {
        for &(zeta, xi, alpha) in &[(0.5, 2.0, 0.3), (0.00104, 0.024, 0.30), (1e-4, 0.01, 0.8)] {
            let pts: Vec<_> = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8]
                .iter()
                .map(|&x: &f64| WeightedPoint::unweighted(x, zeta + xi * x.powf(alpha)))
                .collect();
            let fit = fit_shifted_power(&pts).unwrap();
            assert!(rel(fit.zeta, zeta) < 1e-8, "{fit:?}");
            assert!(rel(fit.xi, xi) < 1e-8, "{fit:?}");
            assert!(rel(fit.alpha_exp, alpha) < 1e-8, "{fit:?}");
        }
    }

    #[test]
    fn shifted_power_boundary_and_shape_errors() {
        // Linear in x with huge curvature preference: alpha pinned at the top.
        let pts: Vec<_> = [1.0, 2.0, 3.0, 4.0, 5.0]
            .iter()
            .map(|&x: &f64| WeightedPoint::unweighted(x, x.powi(3)))
            .collect();
        assert!(matches!(fit_shifted_power(&pts), Err(Error::AlphaAtBoundary { .. })));
        assert!(matches!(
            fit_shifted_power(&pts[..3]),
            Err(Error::TooFewPoints { need: 4, got: 3 })
        ));
        let same: Vec<_> = (0..4).map(|i| WeightedPoint::unweighted(1e-3, i as f64)).collect();
        assert!(matches!(fit_shifted_power(&same), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn shifted_power_is_locally_optimal() {
        // Noisy data: the returned alpha must sit at a profile minimum.
        let pts = vec![
            WeightedPoint::new(1e-4, 0.00316, 4.7e-5),
            WeightedPoint::new(1e-5, 0.00219, 2.0e-5),
            WeightedPoint::new(1e-6, 0.00168, 1.3e-5),
            WeightedPoint::new(1e-7, 0.00140, 0.9e-5),
        ];
        let fit = fit_shifted_power(&pts).unwrap();
        let at = shifted_power_rss(&pts, fit.alpha_exp).unwrap();
        for da in [-1e-3, 1e-3] {
            assert!(shifted_power_rss(&pts, fit.alpha_exp + da).unwrap() >= at);
        }
        assert!(fit.zeta_err > 0.0 && fit.alpha_err > 0.0);
    }

    #[test]
    fn equal_errors_match_unweighted_parameters() {
        let xs = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
        let ys = [0.0032, 0.0022, 0.0016, 0.00135, 0.0012];
        let plain: Vec<_> = xs.iter().zip(ys).map(|(&x, y)| WeightedPoint::unweighted(x, y)).collect();
        let equal: Vec<_> = xs.iter().zip(ys).map(|(&x, y)| WeightedPoint::new(x, y, 3e-5)).collect();
        let a = fit_shifted_power(&plain).unwrap();
        let b = fit_shifted_power(&equal).unwrap();
        assert!(rel(a.zeta, b.zeta) < 1e-9);
        assert!(rel(a.alpha_exp, b.alpha_exp) < 1e-9);
        // The power law is fitted in log space, where equal weights mean
        // equal relative errors.
        let relative: Vec<_> = xs.iter().zip(ys).map(|(&x, y)| WeightedPoint::new(x, y, 0.05 * y)).collect();
        let a = fit_power_law(&plain).unwrap();
        let b = fit_power_law(&relative).unwrap();
        assert!(rel(a.exponent, b.exponent) < 1e-12);
        let a = fit_linear(&plain).unwrap();
        let b = fit_linear(&equal).unwrap();
        assert!(rel(a.delta, b.delta) < 1e-12);
    }

    #[test]
    fn average_exponent_limits() {
        let f = |e, err| PowerLawFit {
            coeff: 1.0,
            exponent: e,
            coeff_err: 0.0,
            exponent_err: err,
        };
        let two = average_exponent(&[f(-0.7, 0.01), f(-0.7, 0.01)]).unwrap();
        assert!((two.mean + 0.7).abs() < 1e-15);
        assert!((two.err - 0.01 / 2f64.sqrt()).abs() < 1e-15);

        let lopsided = average_exponent(&[f(-0.5, 100.0), f(-0.7, 0.001)]).unwrap();
        assert!((lopsided.mean + 0.7).abs() < 1e-9);

        assert!(average_exponent(&[f(-0.7, 0.01)]).is_err());
    }

    proptest! {
        #[test]
        fn power_law_scale_equivariance(
            c in 0.01f64..100.0,
            k in 0.01f64..100.0,
            phi in -2.0f64..2.0,
            jitter in prop::collection::vec(-0.1f64..0.1, 5),
        ) {
            let pts: Vec<_> = (0..5)
                .map(|i| {
                    let x = 2f64.powi(i + 1);
                    WeightedPoint::unweighted(x, c * x.powf(phi) * (1.0 + jitter[i as usize]))
                })
                .collect();
            let scaled: Vec<_> = pts.iter().map(|p| WeightedPoint::unweighted(p.x, k * p.y)).collect();
            let a = fit_power_law(&pts).unwrap();
            let b = fit_power_law(&scaled).unwrap();
            prop_assert!(rel(b.coeff, k * a.coeff) < 1e-12);
            prop_assert!((b.exponent - a.exponent).abs() < 1e-12);
        }

        #[test]
        fn linear_noiseless_recovery(gamma in -1.0f64..1.0, delta in -1.0f64..1.0) {
            let pts: Vec<_> = (0..5)
                .map(|i| {
                    let x = 0.5 + 0.1 * i as f64;
                    WeightedPoint::new(x, gamma - delta * x, 0.01 + 0.001 * i as f64)
                })
                .collect();
            let fit = fit_linear(&pts).unwrap();
            prop_assert!((fit.gamma - gamma).abs() <= 1e-8 * gamma.abs().max(1e-3));
            prop_assert!((fit.delta - delta).abs() <= 1e-8 * delta.abs().max(1e-3));
        }
    }
}
