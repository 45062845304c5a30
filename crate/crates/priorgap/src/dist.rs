//! The three posterior families the conjugate models produce, with the
//! closed-form pieces the bound engine and the brute-force oracle need:
//! density, distribution function, quantiles, Stein kernel, and partial
//! expectations.
//!
//! The Stein kernel of a density `p` on `(lo, hi)` with mean `mu` is
//!
//! ```text
//!   tau(t) = (1 / p(t)) * integral_{lo}^{t} (mu - y) p(y) dy
//! ```
//!
//! It is nonnegative on the support and characterizes the distribution. For
//! these families it collapses to a polynomial: `t / rate` for a gamma,
//! `t^2 / (shape - 1)` for an inverse gamma, `t (1 - t) / (a + b)` for a
//! beta. [`Distribution::stein_kernel_numeric`] evaluates the defining
//! integral by quadrature so tests can pin the closed forms to the
//! definition rather than to themselves.

use crate::numerics::{
    self, gamma_p_raw, gamma_q_raw, inc_beta_raw, ln_gamma_raw, Interval, QuadratureSettings,
};
use crate::{Error, Result};

/// A univariate continuous distribution with analytic Stein machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Gamma with shape `k` and *rate* `r`: density proportional to
    /// `t^{k-1} e^{-r t}` on `(0, inf)`.
    Gamma { shape: f64, rate: f64 },
    /// Inverse gamma with shape `a` and scale `s`: density proportional to
    /// `t^{-a-1} e^{-s/t}` on `(0, inf)`.
    InvGamma { shape: f64, scale: f64 },
    /// Beta on `(0, 1)` with shape pair `(a, b)`.
    Beta { a: f64, b: f64 },
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

impl Distribution {
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        check_positive("gamma shape", shape)?;
        check_positive("gamma rate", rate)?;
        Ok(Distribution::Gamma { shape, rate })
    }

    pub fn inv_gamma(shape: f64, scale: f64) -> Result<Self> {
        check_positive("inverse-gamma shape", shape)?;
        check_positive("inverse-gamma scale", scale)?;
        Ok(Distribution::InvGamma { shape, scale })
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        check_positive("beta shape a", a)?;
        check_positive("beta shape b", b)?;
        Ok(Distribution::Beta { a, b })
    }

    /// The open support interval.
    pub fn support(&self) -> Interval {
        match *self {
            Distribution::Gamma { .. } | Distribution::InvGamma { .. } => {
                Interval::positive()
            }
            Distribution::Beta { .. } => Interval::unit(),
        }
    }

    /// Log density; `-inf` outside the support.
    pub fn log_pdf(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        if !self.support().contains(t) {
            return f64::NEG_INFINITY;
        }
        match *self {
            Distribution::Gamma { shape, rate } => {
                shape * rate.ln() + (shape - 1.0) * t.ln() - rate * t - ln_gamma_raw(shape)
            }
            Distribution::InvGamma { shape, scale } => {
                shape * scale.ln() - (shape + 1.0) * t.ln() - scale / t - ln_gamma_raw(shape)
            }
            Distribution::Beta { a, b } => {
                (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() + ln_gamma_raw(a + b)
                    - ln_gamma_raw(a)
                    - ln_gamma_raw(b)
            }
        }
    }

    /// Density; zero outside the support.
    pub fn pdf(&self, t: f64) -> f64 {
        self.log_pdf(t).exp()
    }

    /// Distribution function, clamped to 0 and 1 outside the support.
    pub fn cdf(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        let s = self.support();
        if t <= s.lo() {
            return 0.0;
        }
        if t >= s.hi() {
            return 1.0;
        }
        match *self {
            Distribution::Gamma { shape, rate } => gamma_p_raw(shape, rate * t),
            Distribution::InvGamma { shape, scale } => gamma_q_raw(shape, scale / t),
            Distribution::Beta { a, b } => inc_beta_raw(a, b, t),
        }
    }

    /// Survival function `1 - cdf`, computed directly so far-right tails
    /// keep relative accuracy.
    pub fn sf(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        let s = self.support();
        if t <= s.lo() {
            return 1.0;
        }
        if t >= s.hi() {
            return 0.0;
        }
        match *self {
            Distribution::Gamma { shape, rate } => gamma_q_raw(shape, rate * t),
            Distribution::InvGamma { shape, scale } => gamma_p_raw(shape, scale / t),
            Distribution::Beta { a, b } => inc_beta_raw(b, a, 1.0 - t),
        }
    }

    /// Expectation. Errors when it does not exist (inverse gamma needs
    /// shape > 1).
    pub fn mean(&self) -> Result<f64> {
        match *self {
            Distribution::Gamma { shape, rate } => Ok(shape / rate),
            Distribution::InvGamma { shape, scale } => {
                if shape > 1.0 {
                    Ok(scale / (shape - 1.0))
                } else {
                    Err(Error::Domain(format!(
                        "inverse-gamma mean needs shape > 1, got {shape}"
                    )))
                }
            }
            Distribution::Beta { a, b } => Ok(a / (a + b)),
        }
    }

    /// Variance. Errors when it does not exist (inverse gamma needs
    /// shape > 2).
    pub fn variance(&self) -> Result<f64> {
        match *self {
            Distribution::Gamma { shape, rate } => Ok(shape / (rate * rate)),
            Distribution::InvGamma { shape, scale } => {
                if shape > 2.0 {
                    let m = scale / (shape - 1.0);
                    Ok(m * m / (shape - 2.0))
                } else {
                    Err(Error::Domain(format!(
                        "inverse-gamma variance needs shape > 2, got {shape}"
                    )))
                }
            }
            Distribution::Beta { a, b } => {
                let s = a + b;
                Ok(a * b / (s * s * (s + 1.0)))
            }
        }
    }

    pub(crate) fn stein_kernel_raw(&self, t: f64) -> f64 {
        match *self {
            Distribution::Gamma { rate, .. } => t / rate,
            Distribution::InvGamma { shape, .. } => t * t / (shape - 1.0),
            Distribution::Beta { a, b } => t * (1.0 - t) / (a + b),
        }
    }

    /// Closed-form Stein kernel at `t`.
    ///
    /// Errors outside the support, or when the kernel does not exist (the
    /// inverse-gamma kernel needs shape > 1, like the mean).
    pub fn stein_kernel(&self, t: f64) -> Result<f64> {
        if !self.support().contains(t) {
            return Err(Error::Domain(format!(
                "stein_kernel needs t in the open support, got {t}"
            )));
        }
        if let Distribution::InvGamma { shape, .. } = *self {
            if shape <= 1.0 {
                return Err(Error::Domain(format!(
                    "inverse-gamma Stein kernel needs shape > 1, got {shape}"
                )));
            }
        }
        Ok(self.stein_kernel_raw(t))
    }

    /// Stein kernel evaluated from its defining integral by adaptive
    /// quadrature, independent of the closed form. Slow; meant for
    /// verification.
    pub fn stein_kernel_numeric(&self, t: f64) -> Result<f64> {
        if !self.support().contains(t) {
            return Err(Error::Domain(format!(
                "stein_kernel_numeric needs t in the open support, got {t}"
            )));
        }
        let mu = self.mean()?;
        let dom = Interval::new(self.support().lo(), t)?;
        let est = numerics::integrate(
            |y| (mu - y) * self.pdf(y),
            dom,
            &QuadratureSettings::default(),
        )?;
        Ok(est.value / self.pdf(t))
    }

    /// `E[X 1(X <= t)]`, the mean restricted to the lower tail. Converges to
    /// the mean as `t` grows and to 0 at the bottom of the support.
    pub fn partial_expectation(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::Domain(
                "partial_expectation got a NaN cutoff".into(),
            ));
        }
        let mean = self.mean()?;
        let s = self.support();
        if t <= s.lo() {
            return Ok(0.0);
        }
        if t >= s.hi() {
            return Ok(mean);
        }
        Ok(match *self {
            Distribution::Gamma { shape, rate } => mean * gamma_p_raw(shape + 1.0, rate * t),
            Distribution::InvGamma { shape, scale } => {
                mean * gamma_q_raw(shape - 1.0, scale / t)
            }
            Distribution::Beta { a, b } => mean * inc_beta_raw(a + 1.0, b, t),
        })
    }

    /// Quantile function (inverse cdf) for `p` in the open unit interval.
    ///
    /// Safeguarded Newton on the cdf (or on the survival function for
    /// `p > 1/2`, preserving tail accuracy) from a family-specific seed.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!(
                "quantile requires p in (0, 1), got {p}"
            )));
        }
        let use_sf = p > 0.5;
        let h = |t: f64| {
            if use_sf {
                (1.0 - p) - self.sf(t)
            } else {
                self.cdf(t) - p
            }
        };

        let seed = self.quantile_seed(p);
        let sup = self.support();
        let (mut xl, mut xh) = (seed, seed);
        let mut hl = h(xl);
        if hl == 0.0 {
            return Ok(xl);
        }
        let mut guard = 0;
        while hl > 0.0 {
            xl *= 0.25;
            hl = h(xl);
            guard += 1;
            if guard > 2000 {
                return Err(Error::Domain(format!(
                    "failed to bracket quantile p = {p} from below for {self:?}"
                )));
            }
        }
        guard = 0;
        let mut hh = h(xh);
        while hh < 0.0 {
            xh = if sup.hi().is_finite() {
                sup.hi() - 0.25 * (sup.hi() - xh)
            } else {
                xh * 4.0
            };
            hh = h(xh);
            guard += 1;
            if guard > 2000 {
                return Err(Error::Domain(format!(
                    "failed to bracket quantile p = {p} from above for {self:?}"
                )));
            }
        }

        // Newton with a bisection safety net: the bracket [xl, xh] always
        // holds the root, and any step that leaves it (or fails to shrink
        // fast enough) is replaced by a bisection step.
        let mut rts = 0.5 * (xl + xh);
        if seed > xl && seed < xh {
            rts = seed;
        }
        let mut dxold = xh - xl;
        let mut dx = dxold;
        let mut fval = h(rts);
        let mut df = self.pdf(rts);
        for _ in 0..200 {
            let newton_escapes = ((rts - xh) * df - fval) * ((rts - xl) * df - fval) > 0.0;
            let too_slow = (2.0 * fval).abs() > (dxold * df).abs();
            if newton_escapes || too_slow || df == 0.0 {
                dxold = dx;
                dx = 0.5 * (xh - xl);
                rts = xl + dx;
                if rts == xl {
                    return Ok(rts);
                }
            } else {
                dxold = dx;
                dx = fval / df;
                let prev = rts;
                rts -= dx;
                if prev == rts {
                    return Ok(rts);
                }
            }
            if dx.abs() < 1e-14 * (1.0 + rts.abs()) {
                return Ok(rts);
            }
            fval = h(rts);
            df = self.pdf(rts);
            if fval < 0.0 {
                xl = rts;
            } else {
                xh = rts;
            }
        }
        Ok(rts)
    }

    fn quantile_seed(&self, p: f64) -> f64 {
        match *self {
            Distribution::Gamma { shape, rate } => gamma_quantile_seed(shape, rate, p),
            Distribution::InvGamma { shape, scale } => {
                // 1/X is gamma(shape, rate = scale), so the p-quantile of X
                // is the reciprocal of its (1-p)-quantile.
                1.0 / gamma_quantile_seed(shape, scale, 1.0 - p)
            }
            Distribution::Beta { a, b } => {
                let m = a / (a + b);
                let sd = (a * b / ((a + b) * (a + b) * (a + b + 1.0))).sqrt();
                (m + inv_phi(p) * sd).clamp(1e-9, 1.0 - 1e-9)
            }
        }
    }
}

/// Wilson-Hilferty cube seed for the gamma quantile, with a small-shape /
/// deep-tail fallback from the leading term of the series `P(k, x) ~
/// x^k / Gamma(k+1)`.
fn gamma_quantile_seed(shape: f64, rate: f64, p: f64) -> f64 {
    let z = inv_phi(p);
    let c = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * shape.sqrt());
    if c > 0.03 {
        (shape / rate) * c * c * c
    } else {
        ((p.ln() + ln_gamma_raw(shape + 1.0)) / shape).exp() / rate
    }
}

// Coefficients for Acklam's rational approximation of the standard normal
// quantile (~1e-9 relative error; only used to seed Newton iterations).
const PHI_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const PHI_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const PHI_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const PHI_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

fn inv_phi(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((PHI_C[0] * q + PHI_C[1]) * q + PHI_C[2]) * q + PHI_C[3]) * q + PHI_C[4]) * q
            + PHI_C[5])
            / ((((PHI_D[0] * q + PHI_D[1]) * q + PHI_D[2]) * q + PHI_D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((PHI_A[0] * r + PHI_A[1]) * r + PHI_A[2]) * r + PHI_A[3]) * r + PHI_A[4]) * r
            + PHI_A[5])
            * q
            / (((((PHI_B[0] * r + PHI_B[1]) * r + PHI_B[2]) * r + PHI_B[3]) * r + PHI_B[4]) * r
                + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((PHI_C[0] * q + PHI_C[1]) * q + PHI_C[2]) * q + PHI_C[3]) * q + PHI_C[4]) * q
            + PHI_C[5])
            / ((((PHI_D[0] * q + PHI_D[1]) * q + PHI_D[2]) * q + PHI_D[3]) * q + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn families() -> [Distribution; 3] {
        [
            Distribution::gamma(3.0, 2.0).unwrap(),
            Distribution::inv_gamma(2.5, 3.0).unwrap(),
            Distribution::beta(3.0, 5.0).unwrap(),
        ]
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(Distribution::gamma(0.0, 1.0).is_err());
        assert!(Distribution::gamma(2.0, -1.0).is_err());
        assert!(Distribution::inv_gamma(f64::NAN, 1.0).is_err());
        assert!(Distribution::beta(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn densities_normalize_to_one() {
        for d in families() {
            let est = numerics::integrate(
                |t| d.pdf(t),
                d.support(),
                &QuadratureSettings::default(),
            )
            .unwrap();
            assert!(
                (est.value - 1.0).abs() <= 1e-10,
                "{d:?} normalizes to {}",
                est.value
            );
        }
    }

    #[test]
    fn pdf_vanishes_outside_support() {
        let d = Distribution::beta(2.0, 4.0).unwrap();
        assert_eq!(d.pdf(-0.5), 0.0);
        assert_eq!(d.pdf(1.5), 0.0);
        assert_eq!(d.log_pdf(2.0), f64::NEG_INFINITY);
        let g = Distribution::gamma(2.0, 1.0).unwrap();
        assert_eq!(g.pdf(-1e-9), 0.0);
    }

    #[test]
    fn cdf_matches_integrated_density() {
        for d in families() {
            for q in [0.2, 0.5, 0.9] {
                let t = d.quantile(q).unwrap();
                let dom = Interval::new(d.support().lo(), t).unwrap();
                let est = numerics::integrate(
                    |y| d.pdf(y),
                    dom,
                    &QuadratureSettings::default(),
                )
                .unwrap();
                assert!(
                    (est.value - d.cdf(t)).abs() <= 1e-10,
                    "{d:?}: integral {} vs cdf {}",
                    est.value,
                    d.cdf(t)
                );
            }
        }
    }

    #[test]
    fn cdf_and_sf_are_complementary() {
        for d in families() {
            for q in [0.05, 0.3, 0.6, 0.95] {
                let t = d.quantile(q).unwrap();
                let s = d.cdf(t) + d.sf(t);
                assert!((s - 1.0).abs() <= 1e-13, "{d:?} at t={t}: cdf+sf={s}");
            }
        }
    }

    #[test]
    fn quantile_reference_values() {
        let cases = [
            (
                Distribution::gamma(2.0, 1.0).unwrap(),
                0.5,
                1.6783469900166606534,
            ),
            (
                Distribution::beta(3.0, 7.0).unwrap(),
                0.9,
                0.49008119444580300114,
            ),
            (
                Distribution::inv_gamma(5.0, 5.0).unwrap(),
                0.25,
                0.79688504667672948791,
            ),
        ];
        for (d, p, want) in cases {
            let got = d.quantile(p).unwrap();
            assert!(
                ((got - want) / want).abs() <= 1e-12,
                "{d:?} quantile({p}) = {got:.16}, want {want:.16}"
            );
        }
    }

    #[test]
    fn quantile_round_trips_into_deep_tails() {
        for d in families() {
            for p in [1e-8, 1e-3, 0.25, 0.5, 0.75, 1.0 - 1e-3, 1.0 - 1e-8] {
                let t = d.quantile(p).unwrap();
                assert!(d.support().contains(t), "{d:?}: quantile({p}) = {t}");
                let (back, target) = if p > 0.5 {
                    (d.sf(t), 1.0 - p)
                } else {
                    (d.cdf(t), p)
                };
                assert!(
                    ((back - target) / target).abs() <= 1e-9,
                    "{d:?}: round trip p={p} gave {back:.15e} (target {target:.15e})"
                );
            }
        }
    }

    #[test]
    fn quantile_rejects_endpoints() {
        let d = Distribution::gamma(2.0, 1.0).unwrap();
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
        assert!(d.quantile(f64::NAN).is_err());
    }

    #[test]
    fn means_match_numeric_integrals() {
        for d in families() {
            let m = numerics::integrate(
                |t| t * d.pdf(t),
                d.support(),
                &QuadratureSettings::default(),
            )
            .unwrap()
            .value;
            let mean = d.mean().unwrap();
            assert!(
                ((m - mean) / mean).abs() <= 1e-9,
                "{d:?}: numeric mean {m} vs {mean}"
            );
        }
    }

    #[test]
    fn variances_match_numeric_integrals() {
        // Uses an inverse gamma with more shape than `families()` has;
        // t^2 * pdf for shape 2.5 decays like t^{-1.5} and folding that tail
        // onto (0,1) leaves a barely-resolvable singularity at u = 1.
        let dists = [
            Distribution::gamma(3.0, 2.0).unwrap(),
            Distribution::inv_gamma(6.0, 6.0).unwrap(),
            Distribution::beta(3.0, 5.0).unwrap(),
        ];
        for d in dists {
            let settings = QuadratureSettings::default();
            let mean = d.mean().unwrap();
            let m2 = numerics::integrate(|t| t * t * d.pdf(t), d.support(), &settings)
                .unwrap()
                .value;
            let var = d.variance().unwrap();
            assert!(
                ((m2 - mean * mean - var) / var).abs() <= 1e-8,
                "{d:?}: numeric variance {} vs {var}",
                m2 - mean * mean
            );
        }
    }

    #[test]
    fn inverse_gamma_moments_need_enough_shape() {
        let d = Distribution::inv_gamma(1.0, 2.0).unwrap();
        assert!(d.mean().is_err());
        assert!(d.stein_kernel(1.0).is_err());
        assert!(d.partial_expectation(1.0).is_err());
        let d2 = Distribution::inv_gamma(1.5, 2.0).unwrap();
        assert!(d2.mean().is_ok());
        assert!(d2.variance().is_err(), "variance needs shape > 2");
    }

    #[test]
    fn stein_kernel_matches_its_defining_integral() {
        for d in families() {
            for q in [0.1, 0.35, 0.65, 0.9] {
                let t = d.quantile(q).unwrap();
                let closed = d.stein_kernel(t).unwrap();
                let numeric = d.stein_kernel_numeric(t).unwrap();
                assert!(
                    ((closed - numeric) / closed).abs() <= 1e-8,
                    "{d:?} at t={t}: closed {closed} vs numeric {numeric}"
                );
            }
        }
    }

    #[test]
    fn stein_kernel_is_nonnegative_on_support() {
        for d in families() {
            for q in [0.01, 0.2, 0.5, 0.8, 0.99] {
                let t = d.quantile(q).unwrap();
                assert!(d.stein_kernel(t).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn partial_expectation_reference_values() {
        let cases = [
            (
                Distribution::gamma(3.0, 2.0).unwrap(),
                1.7,
                0.66246441707565670931,
            ),
            (
                Distribution::inv_gamma(2.5, 3.0).unwrap(),
                2.1,
                0.82835873193584125366,
            ),
            (
                Distribution::beta(3.0, 5.0).unwrap(),
                0.44,
                0.187363480989696,
            ),
        ];
        for (d, t, want) in cases {
            let got = d.partial_expectation(t).unwrap();
            assert!(
                (got - want).abs() <= 1e-14,
                "{d:?} partial_expectation({t}) = {got:.17}, want {want:.17}"
            );
        }
    }

    #[test]
    fn partial_expectation_limits() {
        for d in families() {
            assert_eq!(d.partial_expectation(d.support().lo()).unwrap(), 0.0);
            let full = d.partial_expectation(f64::INFINITY).unwrap();
            assert_eq!(full, d.mean().unwrap());
            // monotone in the cutoff
            let lo = d.partial_expectation(d.quantile(0.3).unwrap()).unwrap();
            let hi = d.partial_expectation(d.quantile(0.7).unwrap()).unwrap();
            assert!(lo < hi, "{d:?}: partial expectation not increasing");
        }
    }

    proptest! {
        #[test]
        fn gamma_quantile_inverts_cdf(
            shape in 0.5f64..60.0,
            rate in 0.1f64..10.0,
            p in 1e-6f64..0.999999,
        ) {
            let d = Distribution::gamma(shape, rate).unwrap();
            let t = d.quantile(p).unwrap();
            let back = d.cdf(t);
            prop_assert!(
                (back - p).abs() <= 1e-9 * p.max(1e-3),
                "shape={} rate={} p={}: got {}", shape, rate, p, back
            );
        }

        #[test]
        fn beta_quantile_inverts_cdf(
            a in 0.5f64..40.0,
            b in 0.5f64..40.0,
            p in 1e-6f64..0.999999,
        ) {
            let d = Distribution::beta(a, b).unwrap();
            let t = d.quantile(p).unwrap();
            let back = d.cdf(t);
            prop_assert!(
                (back - p).abs() <= 1e-9 * p.max(1e-3),
                "a={} b={} p={}: got {}", a, b, p, back
            );
        }
    }
}
