//! Three worked conjugate models where everything is available in closed
//! form, used both as the library's headline cases and as ground truth for
//! the generic engine.
//!
//! Each case fixes a base posterior `P1`, a tilted posterior `P2` obtained
//! by multiplying the prior by an extra factor, and the resulting ratio
//! `rho = p2 / (c p1)`:
//!
//! | case              | P1                to P2                           | rho(t)                       |
//! |-------------------|---------------------------------------------------|------------------------------|
//! | normal variance   | InvGamma(n/2, S/2) to InvGamma(n/2+a, S/2+b)      | t^{-a} e^{-b/t}              |
//! | binomial success  | Beta(x, n-x) to Beta(a+x, b+n-x)                  | t^a (1-t)^b                  |
//! | poisson rate      | Gamma(Sx+a1, n+b1) to Gamma(Sx+a2, n+b2)          | t^{a2-a1} e^{-(b2-b1) t}     |
//!
//! The closed lower bound is always the gap between the posterior means. The
//! closed upper bound replaces `|rho'|/rho` by the triangle-inequality
//! envelope (e.g. `|a/t - b/(1-t)| <= a/t + b/(1-t)`), which turns the
//! integral into posterior moments; it is therefore *weaker* than the
//! engine's numeric upper bound but costs nothing to evaluate. When `rho` is
//! monotone the lower bound is the exact distance.

use crate::dist::Distribution;
use crate::engine::{Monotonicity, NestedPair};
use crate::{Error, Result};

/// Analytic bounds on the posterior Wasserstein gap.
///
/// `lower` is sharp (it is the mean gap). `upper` comes from the
/// triangle-inequality envelope of `rho'` and dominates the engine's
/// numerically-sharp upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Normal observations with known mean: the unknown is the variance.
///
/// `P1` is the posterior under the scale-reference prior; `P2` tilts it by
/// an extra inverse-gamma factor with parameters `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalVarianceCase {
    /// Number of observations; at least 3 so the base Stein kernel exists.
    pub n: u64,
    /// `S`: the sum of squared deviations from the known mean.
    pub centered_sq_sum: f64,
    /// Extra inverse-gamma shape in the second prior.
    pub alpha: f64,
    /// Extra inverse-gamma scale in the second prior.
    pub beta: f64,
}

/// Bernoulli trials: the unknown is the success probability.
///
/// `P1` is the posterior under the Haldane prior (so it is proper only for
/// interior success counts); `P2` adds a Beta(alpha, beta) factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialSuccessCase {
    /// Number of trials.
    pub n: u64,
    /// Success count; must be strictly between 0 and `n`.
    pub successes: u64,
    pub alpha: f64,
    pub beta: f64,
}

/// Poisson counts: the unknown is the rate, with two *proper* gamma priors
/// `Gamma(alpha1, beta1)` and `Gamma(alpha2, beta2)` compared head to head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonRateCase {
    /// Number of observations.
    pub n: u64,
    /// Total of the observed counts.
    pub sum_x: u64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
}

/// The monotone-case closed form next to a near-miss variant of itself.
///
/// The exact distance divides by the *base* posterior rate `n + beta1`.
/// Dividing by the tilted rate `n + beta2` looks just as plausible on paper
/// and is the kind of slip only a numerical oracle catches, so the pair is
/// exposed together: tests pin the oracle to `exact` and away from
/// `swapped_rate_variant` whenever the two rates differ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactScaleDiagnostics {
    pub exact: f64,
    pub swapped_rate_variant: f64,
}

/// One of the three worked models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelCase {
    NormalVariance(NormalVarianceCase),
    BinomialSuccess(BinomialSuccessCase),
    PoissonRate(PoissonRateCase),
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Model(msg()))
    }
}

fn finite_nonneg(name: &str, v: f64) -> Result<()> {
    require(v.is_finite() && v >= 0.0, || {
        format!("{name} must be finite and nonnegative, got {v}")
    })
}

impl NormalVarianceCase {
    fn validate(&self) -> Result<()> {
        require(self.n >= 3, || {
            format!(
                "normal-variance model needs n >= 3 (base kernel requires shape > 1), got n = {}",
                self.n
            )
        })?;
        require(
            self.centered_sq_sum.is_finite() && self.centered_sq_sum > 0.0,
            || {
                format!(
                    "centered square sum must be finite and positive, got {}",
                    self.centered_sq_sum
                )
            },
        )?;
        finite_nonneg("alpha", self.alpha)?;
        finite_nonneg("beta", self.beta)
    }

    fn posteriors(&self) -> Result<(Distribution, Distribution)> {
        self.validate()?;
        let a1 = self.n as f64 / 2.0;
        let s1 = self.centered_sq_sum / 2.0;
        Ok((
            Distribution::inv_gamma(a1, s1)?,
            Distribution::inv_gamma(a1 + self.alpha, s1 + self.beta)?,
        ))
    }

    fn closed_bounds(&self) -> Result<ClosedBounds> {
        self.validate()?;
        let (alpha, beta) = (self.alpha, self.beta);
        let a1 = self.n as f64 / 2.0;
        let s2 = self.centered_sq_sum / 2.0 + beta;
        let a2 = a1 + alpha;
        let denom = (a2 - 1.0) * (a1 - 1.0);
        Ok(ClosedBounds {
            lower: (beta * (a2 - 1.0) - alpha * s2).abs() / denom,
            upper: (alpha * s2 + beta * (a2 - 1.0)) / denom,
        })
    }

    fn classify(&self) -> Monotonicity {
        // (log rho)' = beta / t^2 - alpha / t changes sign at beta/alpha.
        match (self.alpha > 0.0, self.beta > 0.0) {
            (true, true) => Monotonicity::NonMonotone,
            (true, false) => Monotonicity::Decreasing,
            (false, _) => Monotonicity::Increasing,
        }
    }
}

impl BinomialSuccessCase {
    fn validate(&self) -> Result<()> {
        require(self.successes >= 1 && self.successes < self.n, || {
            format!(
                "binomial model needs an interior success count (0 < x < n), got x = {} of n = {}",
                self.successes, self.n
            )
        })?;
        finite_nonneg("alpha", self.alpha)?;
        finite_nonneg("beta", self.beta)
    }

    fn posteriors(&self) -> Result<(Distribution, Distribution)> {
        self.validate()?;
        let x = self.successes as f64;
        let nx = (self.n - self.successes) as f64;
        Ok((
            Distribution::beta(x, nx)?,
            Distribution::beta(self.alpha + x, self.beta + nx)?,
        ))
    }

    fn closed_bounds(&self) -> Result<ClosedBounds> {
        self.validate()?;
        let (alpha, beta) = (self.alpha, self.beta);
        let n = self.n as f64;
        let x = self.successes as f64;
        let mean2 = (alpha + x) / (alpha + beta + n);
        Ok(ClosedBounds {
            lower: (n * alpha - (alpha + beta) * x).abs() / (n * (n + alpha + beta)),
            upper: (alpha + (beta - alpha) * mean2) / n,
        })
    }

    fn classify(&self) -> Monotonicity {
        // (log rho)' = alpha / t - beta / (1 - t) changes sign inside (0,1)
        // whenever both parts are active.
        match (self.alpha > 0.0, self.beta > 0.0) {
            (true, true) => Monotonicity::NonMonotone,
            (true, false) => Monotonicity::Increasing,
            (false, true) => Monotonicity::Decreasing,
            (false, false) => Monotonicity::Increasing,
        }
    }
}

impl PoissonRateCase {
    fn validate(&self) -> Result<()> {
        require(self.n >= 1, || "poisson model needs n >= 1".to_string())?;
        for (name, v) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
        ] {
            finite_nonneg(name, v)?;
        }
        require(self.sum_x as f64 + self.alpha1 > 0.0, || {
            "first posterior needs sum_x + alpha1 > 0".to_string()
        })?;
        require(self.sum_x as f64 + self.alpha2 > 0.0, || {
            "second posterior needs sum_x + alpha2 > 0".to_string()
        })
    }

    fn posteriors(&self) -> Result<(Distribution, Distribution)> {
        self.validate()?;
        let sx = self.sum_x as f64;
        let n = self.n as f64;
        Ok((
            Distribution::gamma(sx + self.alpha1, n + self.beta1)?,
            Distribution::gamma(sx + self.alpha2, n + self.beta2)?,
        ))
    }

    fn closed_bounds(&self) -> Result<ClosedBounds> {
        self.validate()?;
        let da = self.alpha2 - self.alpha1;
        let db = self.beta2 - self.beta1;
        let n = self.n as f64;
        let mean2 = (self.sum_x as f64 + self.alpha2) / (n + self.beta2);
        let rate1 = n + self.beta1;
        Ok(ClosedBounds {
            lower: (da - db * mean2).abs() / rate1,
            upper: (da.abs() + db.abs() * mean2) / rate1,
        })
    }

    fn classify(&self) -> Monotonicity {
        // (log rho)' = (alpha2 - alpha1)/t - (beta2 - beta1).
        let da = self.alpha2 - self.alpha1;
        let db = self.beta2 - self.beta1;
        if da >= 0.0 && db <= 0.0 {
            Monotonicity::Increasing
        } else if da <= 0.0 && db >= 0.0 {
            Monotonicity::Decreasing
        } else {
            Monotonicity::NonMonotone
        }
    }

    /// Monotone-case closed form together with its near-miss variant; `None`
    /// when `rho` is not monotone (no exact closed form exists then).
    pub fn exact_diagnostics(&self) -> Result<Option<ExactScaleDiagnostics>> {
        self.validate()?;
        if self.classify() == Monotonicity::NonMonotone {
            return Ok(None);
        }
        let da = self.alpha2 - self.alpha1;
        let db = self.beta2 - self.beta1;
        let mean2 = (self.sum_x as f64 + self.alpha2) / (self.n as f64 + self.beta2);
        let numerator = (da - db * mean2).abs();
        Ok(Some(ExactScaleDiagnostics {
            exact: numerator / (self.n as f64 + self.beta1),
            swapped_rate_variant: numerator / (self.n as f64 + self.beta2),
        }))
    }
}

impl ModelCase {
    /// Short machine-readable tag used in CSV output.
    pub fn tag(&self) -> &'static str {
        match self {
            ModelCase::NormalVariance(_) => "normal-variance",
            ModelCase::BinomialSuccess(_) => "binomial",
            ModelCase::PoissonRate(_) => "poisson",
        }
    }

    /// The pair of posteriors `(P1, P2)` the case compares.
    pub fn posterior_pair(&self) -> Result<(Distribution, Distribution)> {
        match self {
            ModelCase::NormalVariance(c) => c.posteriors(),
            ModelCase::BinomialSuccess(c) => c.posteriors(),
            ModelCase::PoissonRate(c) => c.posteriors(),
        }
    }

    /// The same pair in the engine's representation: base posterior plus
    /// the analytic `log rho` and `rho'/rho`.
    pub fn nested_pair(&self) -> Result<NestedPair> {
        let (base, _) = self.posterior_pair()?;
        match *self {
            ModelCase::NormalVariance(c) => {
                let (a, b) = (c.alpha, c.beta);
                // When b = 0 the (b - a t)/t^2 form would hit 0/0 once t^2
                // underflows (t below ~1.5e-162), so use the reduced form.
                let dlog = move |t: f64| {
                    if b == 0.0 {
                        -a / t
                    } else {
                        (b - a * t) / (t * t)
                    }
                };
                Ok(NestedPair::new(base, move |t: f64| -a * t.ln() - b / t)?
                    .with_dlog_rho(dlog))
            }
            ModelCase::BinomialSuccess(c) => {
                let (a, b) = (c.alpha, c.beta);
                Ok(
                    NestedPair::new(base, move |t: f64| a * t.ln() + b * (1.0 - t).ln())?
                        .with_dlog_rho(move |t| a / t - b / (1.0 - t)),
                )
            }
            ModelCase::PoissonRate(c) => {
                let da = c.alpha2 - c.alpha1;
                let db = c.beta2 - c.beta1;
                Ok(NestedPair::new(base, move |t: f64| da * t.ln() - db * t)?
                    .with_dlog_rho(move |t| da / t - db))
            }
        }
    }

    /// Closed-form bounds (sharp lower, enveloped upper).
    pub fn closed_bounds(&self) -> Result<ClosedBounds> {
        match self {
            ModelCase::NormalVariance(c) => c.closed_bounds(),
            ModelCase::BinomialSuccess(c) => c.closed_bounds(),
            ModelCase::PoissonRate(c) => c.closed_bounds(),
        }
    }

    /// Sign pattern of `rho'`, decided from the parameters (no sampling).
    /// A constant ratio counts as increasing, matching the engine.
    pub fn classify_monotone(&self) -> Result<Monotonicity> {
        match self {
            ModelCase::NormalVariance(c) => {
                c.validate()?;
                Ok(c.classify())
            }
            ModelCase::BinomialSuccess(c) => {
                c.validate()?;
                Ok(c.classify())
            }
            ModelCase::PoissonRate(c) => {
                c.validate()?;
                Ok(c.classify())
            }
        }
    }

    /// The exact distance when `rho` is monotone (it equals the closed
    /// lower bound), `None` otherwise.
    pub fn exact_distance(&self) -> Result<Option<f64>> {
        if self.classify_monotone()? == Monotonicity::NonMonotone {
            return Ok(None);
        }
        Ok(Some(self.closed_bounds()?.lower))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::QuadratureSettings;
    use crate::wasserstein::{w1_crosscheck, w1_distance, OracleSettings};
    use proptest::prelude::*;

    fn oracle() -> OracleSettings {
        OracleSettings::default()
    }

    fn quad() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn normal_variance_bounds_sandwich_the_oracle() {
        let case = ModelCase::NormalVariance(NormalVarianceCase {
            n: 10,
            centered_sq_sum: 10.0,
            alpha: 1.0,
            beta: 1.0,
        });
        let closed = case.closed_bounds().unwrap();
        let engine = case.nested_pair().unwrap().bounds(&quad()).unwrap();
        let (p1, p2) = case.posterior_pair().unwrap();
        let d = w1_distance(&p1, &p2, &oracle()).unwrap();

        assert!(
            ((closed.lower - engine.lower) / closed.lower).abs() <= 1e-10,
            "closed lower {} vs engine lower {}",
            closed.lower,
            engine.lower
        );
        assert!(
            engine.upper <= closed.upper * (1.0 + 1e-12),
            "envelope upper {} cannot undercut engine upper {}",
            closed.upper,
            engine.upper
        );
        assert!(
            closed.lower <= d * (1.0 + 1e-9) && d <= engine.upper * (1.0 + 1e-9),
            "sandwich broke: {} <= {} <= {}",
            closed.lower,
            d,
            engine.upper
        );
        assert_eq!(case.classify_monotone().unwrap(), Monotonicity::NonMonotone);
        assert_eq!(case.exact_distance().unwrap(), None);
    }

    #[test]
    fn binomial_bounds_sandwich_the_oracle() {
        let case = ModelCase::BinomialSuccess(BinomialSuccessCase {
            n: 10,
            successes: 3,
            alpha: 2.0,
            beta: 2.0,
        });
        let closed = case.closed_bounds().unwrap();
        let engine = case.nested_pair().unwrap().bounds(&quad()).unwrap();
        let (p1, p2) = case.posterior_pair().unwrap();
        let d = w1_distance(&p1, &p2, &oracle()).unwrap();

        assert!(((closed.lower - engine.lower) / closed.lower).abs() <= 1e-10);
        assert!(engine.upper <= closed.upper * (1.0 + 1e-12));
        assert!(
            closed.lower <= d * (1.0 + 1e-9) && d <= engine.upper * (1.0 + 1e-9),
            "sandwich broke: {} <= {} <= {}",
            closed.lower,
            d,
            engine.upper
        );
        // This pair is the engine's Beta(3,7) -> Beta(5,9) fixture.
        assert_eq!(p1, Distribution::beta(3.0, 7.0).unwrap());
        assert_eq!(p2, Distribution::beta(5.0, 9.0).unwrap());
    }

    #[test]
    fn poisson_monotone_closed_form_is_the_distance() {
        // Gamma(7, 4) vs Gamma(6.5, 5): decreasing ratio, exact distance.
        let case = ModelCase::PoissonRate(PoissonRateCase {
            n: 3,
            sum_x: 6,
            alpha1: 1.0,
            beta1: 1.0,
            alpha2: 0.5,
            beta2: 2.0,
        });
        assert_eq!(case.classify_monotone().unwrap(), Monotonicity::Decreasing);

        let exact = case.exact_distance().unwrap().expect("monotone case");
        assert!(
            (exact - 0.45).abs() <= 1e-15,
            "closed exact distance should be 0.45, got {exact}"
        );

        let (p1, p2) = case.posterior_pair().unwrap();
        let d = w1_crosscheck(&p1, &p2, &oracle()).unwrap();
        assert!(
            ((d.cdf_value - exact) / exact).abs() <= 1e-8,
            "oracle {} vs closed exact {exact}",
            d.cdf_value
        );

        let engine = case.nested_pair().unwrap().bounds(&quad()).unwrap();
        assert!(engine.exact, "engine scan should confirm monotonicity");
        assert_eq!(engine.lower, engine.upper);
        assert!(((engine.lower - exact) / exact).abs() <= 1e-10);
    }

    #[test]
    fn poisson_rate_scale_diagnostics_separate_right_from_plausible() {
        let case = PoissonRateCase {
            n: 3,
            sum_x: 6,
            alpha1: 1.0,
            beta1: 1.0,
            alpha2: 0.5,
            beta2: 2.0,
        };
        let diag = case.exact_diagnostics().unwrap().expect("monotone case");
        assert!((diag.exact - 0.45).abs() <= 1e-15);
        assert!((diag.swapped_rate_variant - 0.36).abs() <= 1e-15);

        let (p1, p2) = ModelCase::PoissonRate(case).posterior_pair().unwrap();
        let d = w1_distance(&p1, &p2, &oracle()).unwrap();
        assert!(
            ((d - diag.exact) / diag.exact).abs() <= 1e-8,
            "oracle {d} should match the exact form {}",
            diag.exact
        );
        assert!(
            (d - diag.swapped_rate_variant).abs() > 0.05,
            "oracle {d} should be far from the swapped-rate variant {}",
            diag.swapped_rate_variant
        );
    }

    #[test]
    fn poisson_non_monotone_case_has_no_exact_form() {
        // Gamma(7, 5) vs Gamma(8, 6): both parameters move the same way.
        let case = ModelCase::PoissonRate(PoissonRateCase {
            n: 4,
            sum_x: 6,
            alpha1: 1.0,
            beta1: 1.0,
            alpha2: 2.0,
            beta2: 2.0,
        });
        assert_eq!(case.classify_monotone().unwrap(), Monotonicity::NonMonotone);
        assert_eq!(case.exact_distance().unwrap(), None);

        let closed = case.closed_bounds().unwrap();
        let engine = case.nested_pair().unwrap().bounds(&quad()).unwrap();
        let (p1, p2) = case.posterior_pair().unwrap();
        let d = w1_distance(&p1, &p2, &oracle()).unwrap();
        assert!(closed.lower <= d && d <= engine.upper && engine.upper <= closed.upper);
        assert!(!engine.exact);
    }

    #[test]
    fn identical_priors_classify_as_increasing_with_zero_distance() {
        let case = ModelCase::PoissonRate(PoissonRateCase {
            n: 5,
            sum_x: 9,
            alpha1: 2.0,
            beta1: 1.5,
            alpha2: 2.0,
            beta2: 1.5,
        });
        assert_eq!(case.classify_monotone().unwrap(), Monotonicity::Increasing);
        assert_eq!(case.exact_distance().unwrap(), Some(0.0));
    }

    #[test]
    fn classification_covers_every_sign_pattern() {
        let poisson = |a1: f64, b1: f64, a2: f64, b2: f64| {
            ModelCase::PoissonRate(PoissonRateCase {
                n: 5,
                sum_x: 9,
                alpha1: a1,
                beta1: b1,
                alpha2: a2,
                beta2: b2,
            })
            .classify_monotone()
            .unwrap()
        };
        assert_eq!(poisson(1.0, 2.0, 2.0, 1.0), Monotonicity::Increasing);
        assert_eq!(poisson(2.0, 1.0, 1.0, 2.0), Monotonicity::Decreasing);
        assert_eq!(poisson(1.0, 1.0, 2.0, 2.0), Monotonicity::NonMonotone);
        assert_eq!(poisson(2.0, 2.0, 1.0, 1.0), Monotonicity::NonMonotone);

        let normal = |a: f64, b: f64| {
            ModelCase::NormalVariance(NormalVarianceCase {
                n: 8,
                centered_sq_sum: 8.0,
                alpha: a,
                beta: b,
            })
            .classify_monotone()
            .unwrap()
        };
        assert_eq!(normal(1.0, 1.0), Monotonicity::NonMonotone);
        assert_eq!(normal(1.0, 0.0), Monotonicity::Decreasing);
        assert_eq!(normal(0.0, 1.0), Monotonicity::Increasing);

        let binom = |a: f64, b: f64| {
            ModelCase::BinomialSuccess(BinomialSuccessCase {
                n: 10,
                successes: 4,
                alpha: a,
                beta: b,
            })
            .classify_monotone()
            .unwrap()
        };
        assert_eq!(binom(1.0, 1.0), Monotonicity::NonMonotone);
        assert_eq!(binom(1.0, 0.0), Monotonicity::Increasing);
        assert_eq!(binom(0.0, 1.0), Monotonicity::Decreasing);
    }

    #[test]
    fn engine_sign_scan_agrees_with_closed_classification() {
        let cases = [
            ModelCase::NormalVariance(NormalVarianceCase {
                n: 12,
                centered_sq_sum: 14.0,
                alpha: 0.5,
                beta: 0.8,
            }),
            ModelCase::BinomialSuccess(BinomialSuccessCase {
                n: 20,
                successes: 7,
                alpha: 1.0,
                beta: 0.0,
            }),
            ModelCase::PoissonRate(PoissonRateCase {
                n: 6,
                sum_x: 11,
                alpha1: 0.5,
                beta1: 0.0,
                alpha2: 0.5,
                beta2: 1.0,
            }),
        ];
        for case in cases {
            let scan = case.nested_pair().unwrap().rho_sign_scan().unwrap();
            let closed = case.classify_monotone().unwrap();
            assert_eq!(scan, closed, "scan disagrees for {case:?}");
        }
    }

    #[test]
    fn degenerate_data_is_rejected() {
        let all_failures = ModelCase::BinomialSuccess(BinomialSuccessCase {
            n: 10,
            successes: 0,
            alpha: 1.0,
            beta: 1.0,
        });
        assert!(matches!(
            all_failures.posterior_pair(),
            Err(Error::Model(_))
        ));

        let too_few = ModelCase::NormalVariance(NormalVarianceCase {
            n: 2,
            centered_sq_sum: 1.0,
            alpha: 1.0,
            beta: 1.0,
        });
        assert!(matches!(too_few.posterior_pair(), Err(Error::Model(_))));

        let bad_prior = ModelCase::PoissonRate(PoissonRateCase {
            n: 5,
            sum_x: 3,
            alpha1: -1.0,
            beta1: 0.0,
            alpha2: 1.0,
            beta2: 0.0,
        });
        assert!(matches!(bad_prior.closed_bounds(), Err(Error::Model(_))));
    }

    proptest! {
        #[test]
        fn closed_bounds_are_ordered_and_exactness_matches_lower(
            n in 3u64..200,
            x_frac in 0.05f64..0.95,
            alpha in 0.0f64..4.0,
            beta in 0.0f64..4.0,
        ) {
            let successes = ((n as f64 * x_frac) as u64).clamp(1, n - 1);
            let case = ModelCase::BinomialSuccess(BinomialSuccessCase {
                n, successes, alpha, beta,
            });
            let b = case.closed_bounds().unwrap();
            prop_assert!(b.lower <= b.upper * (1.0 + 1e-12) + 1e-300,
                "bounds out of order: {} > {}", b.lower, b.upper);
            if let Some(exact) = case.exact_distance().unwrap() {
                prop_assert!((exact - b.lower).abs() <= 1e-15);
            }
        }
    }
}
