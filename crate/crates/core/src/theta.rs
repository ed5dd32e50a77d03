//! Image-method theta function on the strip and its Laplace-domain closed
//! form.
//!
//! `theta(x, t) = sum_n K(x + 2 n L, t)` over all integers n; the transform
//! of each image produces the geometric series whose closed form is
//! `cosh(sigma (L - y)/sqrt(eps)) / (2 sqrt(eps) sigma sinh(sigma L / sqrt(eps)))`.
//! Hyperbolic ratios are evaluated in shifted-exponential form throughout,
//! which is exact for the boundary identities and immune to overflow at
//! large `Re(sigma L)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{kernel_dx_raw, kernel_k, OperatorParams};
use crate::quad::QuadratureConfig;

/// The space-time box `[0, L] x (0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripDomain {
    /// Strip width L.
    pub width: f64,
    /// Final time T.
    pub horizon: f64,
}

impl StripDomain {
    pub fn new(width: f64, horizon: f64) -> Self {
        Self { width, horizon }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::Config(format!("domain.L must be > 0, got {}", self.width)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("domain.T must be > 0, got {}", self.horizon)));
        }
        Ok(())
    }
}

/// Truncation policy for the bilateral image sum.
#[derive(Debug, Clone, Copy)]
pub struct SeriesConfig {
    /// Absolute tolerance on the truncated tail.
    pub tol: f64,
    /// Cap on image pairs.
    pub max_terms: usize,
    /// Consecutive below-tolerance pairs required before stopping; a single
    /// small pair is not trusted because the memory correction makes the
    /// terms non-monotone.
    pub settle_count: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_terms: 200,
            settle_count: 3,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config("series tol must be > 0".into()));
        }
        if self.max_terms < 1 {
            return Err(Error::Config("series max_terms must be >= 1".into()));
        }
        if self.settle_count < 2 {
            return Err(Error::Config("series settle_count must be >= 2".into()));
        }
        Ok(())
    }
}

/// Cheap upper bound on |K(w, t)|, used to skip negligible images without
/// paying for their quadrature.
fn kernel_bound(w: f64, t: f64, p: &OperatorParams) -> f64 {
    let gauss = (-w * w / (4.0 * p.epsilon * t)).exp();
    let c = ((-p.a * t).exp() / t.sqrt() + 1.2 * (p.b.max(0.0) * t).sqrt())
        / (2.0 * (std::f64::consts::PI * p.epsilon).sqrt());
    gauss * c
}

/// Same for |dK/dx|; the derivative factor is bounded by 1.5/|w| after
/// peeling half of the Gaussian.
fn kernel_dx_bound(w: f64, t: f64, p: &OperatorParams) -> f64 {
    if w == 0.0 {
        return f64::INFINITY;
    }
    let gauss = (-w * w / (8.0 * p.epsilon * t)).exp();
    let c = ((-p.a * t).exp() / t.sqrt() + 1.2 * (p.b.max(0.0) * t).sqrt())
        / (2.0 * (std::f64::consts::PI * p.epsilon).sqrt());
    let deriv_sup = (1.5 / w.abs()).max(w.abs() / (2.0 * p.epsilon * t));
    gauss * c * deriv_sup
}

fn image_sum<V, B>(
    x: f64,
    t: f64,
    d: &StripDomain,
    cfg: &SeriesConfig,
    mut value: V,
    bound: B,
    context: &'static str,
) -> Result<f64>
where
    V: FnMut(f64) -> Result<f64>,
    B: Fn(f64) -> f64,
{
    let two_l = 2.0 * d.width;
    let mut term_at = |w: f64| -> Result<f64> {
        if bound(w, t) < 0.25 * cfg.tol {
            Ok(0.0)
        } else {
            value(w)
        }
    };

    let mut sum = term_at(x)?;
    let mut settled = 0usize;
    let mut estimate = 0.0f64;
    for n in 1..=cfg.max_terms {
        let shift = two_l * n as f64;
        let pair = term_at(x + shift)? + term_at(x - shift)?;
        sum += pair;
        if pair.abs() < cfg.tol {
            settled += 1;
            estimate += pair.abs();
            if settled >= cfg.settle_count {
                return Ok(sum);
            }
        } else {
            settled = 0;
            estimate = 0.0;
        }
    }
    Err(Error::Accuracy {
        context,
        requested: cfg.tol,
        achieved: estimate.max(cfg.tol),
    })
}

/// Strip theta function at position `x` (any real; 2L-periodic) and `t > 0`.
pub fn theta(
    x: f64,
    t: f64,
    d: &StripDomain,
    p: &OperatorParams,
    cfg: &SeriesConfig,
    q: &QuadratureConfig,
) -> Result<f64> {
    d.validate()?;
    cfg.validate()?;
    if !(t > 0.0) {
        return Err(Error::domain("theta", format!("t must be > 0, got {t}")));
    }
    image_sum(
        x,
        t,
        d,
        cfg,
        |w| kernel_k(w, t, p, q),
        |w, tt| kernel_bound(w, tt, p),
        "theta image sum",
    )
}

/// x-derivative of the theta function (termwise kernel derivatives).
pub fn theta_dx(
    x: f64,
    t: f64,
    d: &StripDomain,
    p: &OperatorParams,
    cfg: &SeriesConfig,
    q: &QuadratureConfig,
) -> Result<f64> {
    d.validate()?;
    cfg.validate()?;
    if !(t > 0.0) {
        return Err(Error::domain("theta_dx", format!("t must be > 0, got {t}")));
    }
    image_sum(
        x,
        t,
        d,
        cfg,
        |w| {
            if w == 0.0 {
                Ok(0.0) // interior image hitting the even point exactly
            } else {
                kernel_dx_raw(w, t, p, q)
            }
        },
        |w, tt| kernel_dx_bound(w, tt, p),
        "theta_dx image sum",
    )
}

fn check_sigma_arg(sigma: Complex64, context: &'static str) -> Result<()> {
    if !(sigma.re > 0.0) {
        return Err(Error::domain(
            context,
            format!("Re(sigma) must be > 0, got {sigma}"),
        ));
    }
    Ok(())
}

/// Laplace-domain theta function, valid for `y` in `[0, 2L]`.
///
/// Evaluated as `(e^{-mu y} + e^{-mu (2L - y)}) / (2 sqrt(eps) sigma (1 - e^{-2 mu L}))`
/// with `mu = sigma / sqrt(eps)`; all exponents are nonpositive in the valid
/// half-plane.
pub fn theta_hat(y: f64, sigma: Complex64, d: &StripDomain, p: &OperatorParams) -> Result<Complex64> {
    d.validate()?;
    p.validate()?;
    check_sigma_arg(sigma, "theta_hat")?;
    let l = d.width;
    if !(0.0..=2.0 * l + 1e-12).contains(&y) {
        return Err(Error::domain(
            "theta_hat",
            format!("y = {y} outside [0, 2L] = [0, {}]", 2.0 * l),
        ));
    }
    let mu = sigma / p.epsilon.sqrt();
    let num = (-mu * y).exp() + (-mu * (2.0 * l - y)).exp();
    let den = 1.0 - (-mu * (2.0 * l)).exp();
    Ok(num / (2.0 * p.epsilon.sqrt() * sigma * den))
}

/// y-derivative of `theta_hat`:
/// `-(e^{-mu y} - e^{-mu (2L - y)}) / (2 eps (1 - e^{-2 mu L}))`.
///
/// The boundary identities `2 eps theta_hat_dy(0) = -1` and
/// `theta_hat_dy(L) = 0` hold exactly in this form.
pub fn theta_hat_dy(
    y: f64,
    sigma: Complex64,
    d: &StripDomain,
    p: &OperatorParams,
) -> Result<Complex64> {
    d.validate()?;
    p.validate()?;
    check_sigma_arg(sigma, "theta_hat_dy")?;
    let l = d.width;
    if !(0.0..=2.0 * l + 1e-12).contains(&y) {
        return Err(Error::domain(
            "theta_hat_dy",
            format!("y = {y} outside [0, 2L] = [0, {}]", 2.0 * l),
        ));
    }
    let mu = sigma / p.epsilon.sqrt();
    let num = (-mu * y).exp() - (-mu * (2.0 * l - y)).exp();
    let den = 1.0 - (-mu * (2.0 * l)).exp();
    Ok(-num / (2.0 * p.epsilon * den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::sigma;
    use crate::oracles::{numerical_laplace, LaplaceTail};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn qcfg() -> QuadratureConfig {
        QuadratureConfig::with_tol(1e-14, 1e-11)
    }

    fn params() -> OperatorParams {
        OperatorParams::new(1.0, 1.0, 1.0, 2.0)
    }

    #[test]
    fn periodicity() {
        let d = StripDomain::new(1.0, 2.0);
        let p = params();
        let cfg = SeriesConfig::default();
        let q = qcfg();
        for &(x, t) in &[(0.3, 0.5), (0.9, 1.0), (0.1, 0.1)] {
            let a = theta(x, t, &d, &p, &cfg, &q).unwrap();
            let b = theta(x + 2.0 * d.width, t, &d, &p, &cfg, &q).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 2.0 * cfg.tol);
        }
    }

    #[test]
    fn evenness_and_periodicity_on_grid() {
        let d = StripDomain::new(1.0, 1.0);
        let p = params();
        let cfg = SeriesConfig::default();
        let q = qcfg();
        for i in 0..20 {
            for j in 1..=10 {
                let x = -1.0 + 0.1 * i as f64;
                let t = 0.1 * j as f64;
                let v = theta(x, t, &d, &p, &cfg, &q).unwrap();
                let even = theta(-x, t, &d, &p, &cfg, &q).unwrap();
                assert_abs_diff_eq!(v, even, epsilon = 2.0 * cfg.tol);
            }
        }
    }

    #[test]
    fn single_image_dominates_for_wide_strip() {
        // L = 20, t = 0.1: the nearest image is ~e^{-(2L-x)^2/(4t)} away.
        let d = StripDomain::new(20.0, 1.0);
        let p = OperatorParams::new(1.0, 1.0, 1.0, 2.0);
        let cfg = SeriesConfig::default();
        let q = qcfg();
        let x = d.width / 2.0;
        let t = 0.1;
        let th = theta(x, t, &d, &p, &cfg, &q).unwrap();
        let k = kernel_k(x, t, &p, &q).unwrap();
        assert_abs_diff_eq!(th, k, epsilon = 1e-12);
    }

    #[test]
    fn tighter_tolerance_self_oracle() {
        let d = StripDomain::new(1.0, 1.0);
        let p = params();
        let q = qcfg();
        let loose = SeriesConfig {
            tol: 1e-8,
            ..SeriesConfig::default()
        };
        let tight = SeriesConfig {
            tol: 1e-10,
            ..SeriesConfig::default()
        };
        let a = theta(0.3, 0.5, &d, &p, &loose, &q).unwrap();
        let b = theta(0.3, 0.5, &d, &p, &tight, &q).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 2.0 * loose.tol);
    }

    #[test]
    fn max_terms_exhaustion_is_an_accuracy_error() {
        let d = StripDomain::new(0.05, 1.0); // many overlapping images
        let p = params();
        let cfg = SeriesConfig {
            tol: 1e-14,
            max_terms: 3,
            settle_count = 3,
        };
        let q = qcfg();
        let err = theta(0.02, 1.0, &d, &p, &cfg, &q).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    #[test]
    fn dx_odd_symmetry() {
        let d = StripDomain::new(1.0, 1.0);
        let p = params();
        let cfg = SeriesConfig::default();
        let q = qcfg();
        for &(x, t) in &[(0.3, 0.5), (0.7, 0.2)] {
            let plus = theta_dx(x, t, &d, &p, &cfg, &q).unwrap();
            let minus = theta_dx(-x, t, &d, &p, &cfg, &q).unwrap();
            assert_abs_diff_eq!(plus, -minus, epsilon = 2.0 * cfg.tol);
        }
    }

    #[test]
    fn dx_heat_case_matches_gaussian_image_sum() {
        // b = 0: theta_dx is the differentiated Gaussian image sum.
        let d = StripDomain::new(1.0, 1.0);
        let p = OperatorParams::new(0.7, 0.4, 0.0, 1.0);
        let cfg = SeriesConfig {
            tol: 1e-13,
            ..SeriesConfig::default()
        };
        let q = qcfg();
        let (x, t) = (0.4, 0.3);
        let got = theta_dx(x, t, &d, &p, &cfg, &q).unwrap();
        let mut want = 0.0;
        for n in -30..=30 {
            let w = x + 2.0 * d.width * n as f64;
            want += (-w / (2.0 * p.epsilon * t))
                * (-w * w / (4.0 * p.epsilon * t) - p.a * t).exp()
                / (2.0 * (std::f64::consts::PI * p.epsilon * t).sqrt());
        }
        assert_abs_diff_eq!(got, want, epsilon = 1e-10);
    }

    #[test]
    fn dx_matches_central_difference_of_theta() {
        let d = StripDomain::new(1.0, 1.0);
        let p = params();
        let cfg = SeriesConfig {
            tol: 1e-12,
            ..SeriesConfig::default()
        };
        let q = qcfg();
        let h = 1e-4;
        for &(x, t) in &[(0.3, 0.5), (0.6, 1.0)] {
            let fd = (theta(x + h, t, &d, &p, &cfg, &q).unwrap()
                - theta(x - h, t, &d, &p, &cfg, &q).unwrap())
                / (2.0 * h);
            let got = theta_dx(x, t, &d, &p, &cfg, &q).unwrap();
            assert_abs_diff_eq!(got, fd, epsilon = 1e-5);
        }
    }

    #[test]
    fn hat_matches_geometric_series_oracle() {
        // Partial sums of the displayed image series, summed to machine
        // tolerance, against the closed hyperbolic form.
        let d = StripDomain::new(1.0, 1.0);
        let p = OperatorParams::new(1.3, 1.0, 1.0, 2.0);
        for &sig in &[0.5, 1.0, 4.0] {
            for &y in &[0.0, d.width / 3.0, d.width] {
                let sigma = Complex64::new(sig, 0.0);
                let mu = sig / p.epsilon.sqrt();
                let mut series = (-mu * y).exp();
                for n in 1..400 {
                    let shift = 2.0 * n as f64 * d.width;
                    let inc = (-mu * (shift + y)).exp() + (-mu * (shift - y)).exp();
                    series += inc;
                    if inc < 1e-18 * series {
                        break;
                    }
                }
                let want = series / (2.0 * p.epsilon.sqrt() * sig);
                let got = theta_hat(y, sigma, &d, &p).unwrap();
                assert_relative_eq!(got.re, want, max_relative = 1e-13);
                assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn hat_trivials() {
        let d = StripDomain::new(1.0, 1.0);
        let p = OperatorParams::new(1.0, 1.0, 1.0, 2.0);
        let sig = Complex64::new(2.0, 0.0);
        // y = L: cosh(0) = 1 numerator.
        let got = theta_hat(d.width, sig, &d, &p).unwrap();
        let want = 1.0 / (2.0 * 1.0 * 2.0 * (2.0f64).sinh());
        assert_relative_eq!(got.re, want, max_relative = 1e-13);

        // Half-line limit: y = 0, large sigma L: ~ 1/(2 sqrt(eps) sigma).
        let big = Complex64::new(60.0, 0.0);
        let got = theta_hat(0.0, big, &d, &p).unwrap();
        assert_relative_eq!(got.re, 1.0 / (2.0 * 60.0), max_relative = 1e-12);

        // Overflow guard: huge Re(sigma L) must stay finite.
        let huge = Complex64::new(5e4, 0.0);
        let v = theta_hat(0.3, huge, &d, &p).unwrap();
        assert!(v.norm().is_finite());
    }

    #[test]
    fn hat_dy_boundary_identities_exact() {
        let d = StripDomain::new(1.0, 1.0);
        let p = OperatorParams::new(0.9, 1.0, 1.0, 2.0);
        for &sig in &[0.5, 1.0, 4.0, 33.0] {
            let sigma = Complex64::new(sig, 0.0);
            let at0 = theta_hat_dy(0.0, sigma, &d, &p).unwrap();
            assert_eq!(2.0 * p.epsilon * at0.re, -1.0);
            assert_eq!(at0.im, 0.0);
            let atl = theta_hat_dy(d.width, sigma, &d, &p).unwrap();
            assert_eq!(atl.re, 0.0);
        }
    }

    #[test]
    fn hat_dy_matches_finite_difference() {
        let d = StripDomain::new(1.0, 1.0);
        let p = OperatorParams::new(1.0, 1.0, 1.0, 2.0);
        let sigma = Complex64::new(1.7, 0.4);
        let h = 1e-6;
        for &y in &[0.2, 0.5, 0.9] {
            let fd = (theta_hat(y + h, sigma, &d, &p).unwrap()
                - theta_hat(y - h, sigma, &d, &p).unwrap())
                / Complex64::new(2.0 * h, 0.0);
            let got = theta_hat_dy(y, sigma, &d, &p).unwrap();
            assert!((got - fd).norm() < 1e-6);
        }
    }

    #[test]
    fn laplace_link_between_series_and_hat() {
        // Numerical transform of theta(x, .) against theta_hat(x, sigma(s)).
        let d = StripDomain::new(1.0, 1.0);
        let p = params();
        let cfg = SeriesConfig {
            tol: 1e-12,
            ..SeriesConfig::default()
        };
        let q = QuadratureConfig::with_tol(1e-12, 1e-9);
        for &s in &[2.0, 5.0] {
            for &xf in &[0.2, 0.5] {
                let x = xf * d.width;
                let sc = Complex64::new(s, 0.0);
                let sig = sigma(sc, &p).unwrap();
                let want = theta_hat(x, sig, &d, &p).unwrap();
                let tail = LaplaceTail {
                    decay_rate: p.a.min(p.beta),
                    scale: 2.0,
                };
                let t_max = tail.horizon(s, 1e-9);
                let f = |t: f64| theta(x, t, &d, &p, &cfg, &q).unwrap_or(f64::NAN);
                let got = numerical_laplace(&f, sc, t_max, &tail, &q).unwrap();
                assert!(
                    (got.value - want).norm() / want.norm() < 1e-4,
                    "link mismatch at s={s}, x={x}: {} vs {}",
                    got.value,
                    want
                );
            }
        }
    }
}
