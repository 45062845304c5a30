//! A brute-force Wasserstein-1 oracle, computed two independent ways.
//!
//! On the real line the W1 distance between distributions `P` and `Q` has two
//! equivalent integral forms:
//!
//! ```text
//!   d(P, Q) = integral over t of |F_P(t) - F_Q(t)| dt
//!           = integral over u in (0,1) of |Q_P(u) - Q_Q(u)| du
//! ```
//!
//! (distribution functions in the first, quantile functions in the second).
//! This module evaluates both by adaptive quadrature and refuses to hand back
//! a number unless they agree; a bug in the cdf machinery and a bug in the
//! quantile machinery would have to conspire to slip through. The value is
//! used as ground truth when exercising the analytic bound engine, so it must
//! not share that code path: everything here goes through plain cdf/quantile
//! evaluations.
//!
//! Both integrals are truncated to a quantile window and the discarded tails
//! are restored *exactly* (up to a possible sign change inside the tail) from
//! partial expectations: `integral_T^inf (1 - F) dt = E[X] - E[X 1(X<=T)]
//! - T (1 - F(T))` and its mirror image. Any sign-change slack is added to
//! the reported error bound rather than the value.

use crate::dist::Distribution;
use crate::numerics::{integrate_with_breakpoints, Interval, QuadEstimate, QuadratureSettings};
use crate::{Error, Result};

/// Tuning knobs for the oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleSettings {
    /// Quadrature tolerances for both integral forms.
    pub quad: QuadratureSettings,
    /// Probability mass left beyond the truncation points of the
    /// cdf-difference integral (restored analytically).
    pub tail_mass: f64,
    /// Clip for the quantile-difference integral: it runs over
    /// `(clip, 1 - clip)` with the ends restored analytically.
    pub quantile_clip: f64,
    /// Maximum relative disagreement tolerated between the two forms.
    pub agreement_tol: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            quad: QuadratureSettings {
                rel_tol: 1e-9,
                abs_tol: 1e-13,
                ..QuadratureSettings::default()
            },
            // Small enough that an undetected sign change beyond the window
            // cannot matter, large enough that heavy polynomial tails do not
            // stretch the window across so many decades that accumulated
            // cdf evaluation noise (~1e-16 per point, integrated over the
            // window width) swamps the tolerance. The clipped mass itself is
            // restored exactly, so this is not an accuracy/space trade.
            tail_mass: 1e-9,
            quantile_clip: 1e-9,
            agreement_tol: 1e-6,
        }
    }
}

/// Both oracle values, after they have been checked against each other.
#[derive(Debug, Clone, Copy)]
pub struct Crosscheck {
    /// From the cdf-difference integral (the primary value).
    pub cdf_value: f64,
    /// From the quantile-difference integral.
    pub quantile_value: f64,
}

/// W1 distance via the cdf-difference integral (the primary oracle form).
pub fn w1_distance(p: &Distribution, q: &Distribution, settings: &OracleSettings) -> Result<f64> {
    Ok(cdf_integral(p, q, settings)?.value)
}

/// Evaluates both oracle forms and errors with [`Error::OracleMismatch`]
/// unless they agree to `agreement_tol` (relative, floored at 1e-12).
pub fn w1_crosscheck(
    p: &Distribution,
    q: &Distribution,
    settings: &OracleSettings,
) -> Result<Crosscheck> {
    let cdf_value = cdf_integral(p, q, settings)?.value;
    let quantile_value = quantile_integral(p, q, settings)?.value;
    let scale = cdf_value.abs().max(quantile_value.abs()).max(1e-12);
    if (cdf_value - quantile_value).abs() > settings.agreement_tol * scale {
        return Err(Error::OracleMismatch {
            cdf_value,
            quantile_value,
        });
    }
    Ok(Crosscheck {
        cdf_value,
        quantile_value,
    })
}

/// `integral_{support lo}^{T} F dt`, exactly, from the partial expectation.
fn lower_tail_area(d: &Distribution, t: f64) -> Result<f64> {
    let area = t * d.cdf(t) - d.partial_expectation(t)?;
    Ok(area.max(0.0))
}

/// `integral_{T}^{support hi} (1 - F) dt = E[(X - T)^+]`, exactly.
fn upper_tail_area(d: &Distribution, t: f64) -> Result<f64> {
    let area = d.mean()? - d.partial_expectation(t)? - t * d.sf(t);
    Ok(area.max(0.0))
}

/// Folds an exactly-known pair of one-sided tail areas into the estimate:
/// the absolute signed difference joins the value, and the slack that a sign
/// change inside the tail could hide joins the error bound.
fn apply_tail_pair(est: &mut QuadEstimate, area_p: f64, area_q: f64) {
    let diff = (area_p - area_q).abs();
    est.value += diff;
    est.error += (area_p + area_q) - diff;
}

fn cdf_integral(
    p: &Distribution,
    q: &Distribution,
    settings: &OracleSettings,
) -> Result<QuadEstimate> {
    // W1 is finite only when both means exist; fail fast before integrating.
    p.mean()?;
    q.mean()?;

    let delta = settings.tail_mass;
    let t_lo = p.quantile(delta)?.min(q.quantile(delta)?);
    let t_hi = p.quantile(1.0 - delta)?.max(q.quantile(1.0 - delta)?);

    // Mass-aware pre-splits: the quartiles guide the first panels toward
    // where the cdfs actually move (posteriors at large n concentrate on a
    // sliver of the window), and the decade ladder carves heavy polynomial
    // tails into chunks the refinement heap can retire quickly.
    let mut breaks = Vec::with_capacity(18);
    for d in [p, q] {
        for prob in [
            1e-9, 1e-6, 1e-3, 0.25, 0.5, 0.75, 0.999, 0.999_999, 0.999_999_999,
        ] {
            breaks.push(d.quantile(prob)?);
        }
    }

    let mut est = integrate_with_breakpoints(
        |t| (p.cdf(t) - q.cdf(t)).abs(),
        Interval::new(t_lo, t_hi)?,
        &breaks,
        &settings.quad,
    )?;
    apply_tail_pair(
        &mut est,
        lower_tail_area(p, t_lo)?,
        lower_tail_area(q, t_lo)?,
    );
    apply_tail_pair(
        &mut est,
        upper_tail_area(p, t_hi)?,
        upper_tail_area(q, t_hi)?,
    );
    Ok(est)
}

fn quantile_integral(
    p: &Distribution,
    q: &Distribution,
    settings: &OracleSettings,
) -> Result<QuadEstimate> {
    let clip = settings.quantile_clip;
    let integrand = |u: f64| match (p.quantile(u), q.quantile(u)) {
        (Ok(a), Ok(b)) => (a - b).abs(),
        // Poisoning the sample turns a failed quantile solve into a
        // quadrature Domain error instead of a silent wrong value.
        _ => f64::NAN,
    };
    let mut est = integrate_with_breakpoints(
        integrand,
        Interval::new(clip, 1.0 - clip)?,
        &[
            1e-6, 1e-4, 1e-2, 0.25, 0.5, 0.75, 0.99, 0.9999, 0.999_999,
        ],
        &settings.quad,
    )?;

    // integral_0^clip Q(u) du = E[X 1(X <= Q(clip))]; the upper end is the
    // mean minus the same object at 1 - clip.
    let low_p = p.partial_expectation(p.quantile(clip)?)?;
    let low_q = q.partial_expectation(q.quantile(clip)?)?;
    apply_tail_pair(&mut est, low_p, low_q);
    let high_p = p.mean()? - p.partial_expectation(p.quantile(1.0 - clip)?)?;
    let high_q = q.mean()? - q.partial_expectation(q.quantile(1.0 - clip)?)?;
    apply_tail_pair(&mut est, high_p, high_q);
    Ok(est)
}
