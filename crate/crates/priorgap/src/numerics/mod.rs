//! Shared numerical plumbing: open intervals (possibly unbounded), quadrature
//! settings, scalar special functions, adaptive integration, and sup-norm
//! estimation on open domains.

mod quad;
mod special;

pub use quad::{integrate, integrate_with_breakpoints, QuadEstimate};
pub use special::{gamma_p, gamma_q, inc_beta, ln_gamma};

pub(crate) use special::{gamma_p_raw, gamma_q_raw, inc_beta_raw, ln_gamma_raw};

use crate::{Error, Result};

/// An open interval of the extended real line. Endpoints may be
/// `f64::NEG_INFINITY` / `f64::INFINITY`; the interval never contains them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain("interval endpoint is NaN".into()));
        }
        if !(lo < hi) {
            return Err(Error::Domain(format!(
                "interval endpoints must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// The positive half line (0, inf).
    pub fn positive() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    /// The open unit interval (0, 1).
    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Open-interval membership.
    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Tolerances and budgets for adaptive quadrature and the Wasserstein oracle.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSettings {
    /// Stop once the total error estimate falls below `rel_tol * |integral|`.
    pub rel_tol: f64,
    /// Absolute floor on the stopping test, for integrals near zero.
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any one segment.
    pub max_depth: u32,
    /// Probability mass ignored in each tail when a domain is truncated for
    /// CDF integration; the truncated contribution is bounded analytically.
    pub tail_cutoff_mass: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 60,
            tail_cutoff_mass: 1e-14,
        }
    }
}

/// Supremum of `|f|` over an open interval, by dense grid scan plus
/// golden-section refinement around the best grid point.
///
/// The grid has `grid_points` nodes (at least 64), log-spaced toward any
/// endpoint at 0 or infinity so that boundary blow-ups are seen. Returns
/// `f64::INFINITY` when `|f|` exceeds an overflow threshold (1e100) anywhere,
/// or keeps growing monotonically through a probe sequence approaching an
/// endpoint; divergence is a valid answer, not an error.
pub fn sup_abs(f: impl Fn(f64) -> f64, domain: Interval, grid_points: usize) -> Result<f64> {
    const OVERFLOW: f64 = 1e100;
    if grid_points < 64 {
        return Err(Error::Domain(format!(
            "sup_abs needs at least 64 grid points, got {grid_points}"
        )));
    }
    let map = quad::DomainMap::new(domain);
    let eval = |u: f64| -> Result<f64> {
        let (t, _) = map.to_t(u);
        let v = f(t).abs();
        if v.is_nan() {
            return Err(Error::Domain(format!("sup_abs: f returned NaN at t = {t}")));
        }
        Ok(v)
    };

    // Grid in the folded coordinate: uniform interior plus geometric clusters
    // at both ends. Near u = 0 and u = 1 the fold is asymptotically linear /
    // reciprocal, so these clusters are log-spaced in t toward the endpoints.
    let tail = (grid_points / 8).max(16);
    let interior = grid_points - 2 * tail;
    let mut us = Vec::with_capacity(grid_points);
    for i in 0..tail {
        let e = 2.0 + 13.0 * i as f64 / (tail - 1) as f64;
        us.push(10f64.powf(-e));
        us.push(1.0 - 10f64.powf(-e));
    }
    for i in 1..=interior {
        us.push(i as f64 / (interior + 1) as f64);
    }
    us.sort_by(f64::total_cmp);
    us.dedup();

    let mut best = 0.0f64;
    let mut best_idx = 0usize;
    for (i, &u) in us.iter().enumerate() {
        let v = eval(u)?;
        if v > OVERFLOW {
            return Ok(f64::INFINITY);
        }
        if v > best {
            best = v;
            best_idx = i;
        }
    }

    // Probe each endpoint on a ladder of offsets shrinking toward it. A probe
    // sequence that crosses the overflow threshold, or that keeps growing
    // monotonically and gains three orders of magnitude on the way in, is
    // treated as divergent. (A blow-up slower than that, e.g. logarithmic,
    // is reported as the largest value seen; no finite sampler can tell it
    // from a bounded function.)
    let span_scale = if domain.is_bounded() {
        domain.hi - domain.lo
    } else {
        let mut s = 1.0f64;
        if domain.lo.is_finite() {
            s = s.max(domain.lo.abs());
        }
        if domain.hi.is_finite() {
            s = s.max(domain.hi.abs());
        }
        s
    };
    for side in [false, true] {
        let endpoint = if side { domain.hi } else { domain.lo };
        let inward = if side { -1.0 } else { 1.0 };
        let mut values = Vec::new();
        if endpoint.is_finite() {
            let mut k = 2.0;
            while k <= 290.0 {
                let t = endpoint + inward * span_scale * 10f64.powf(-k);
                if t == endpoint || !domain.contains(t) {
                    break;
                }
                values.push(t);
                k += if k < 15.0 { 1.0 } else { 18.0 };
            }
        } else {
            let mut k = 2.0;
            while k <= 290.0 {
                values.push(inward * -10f64.powf(k));
                k += if k < 15.0 { 1.0 } else { 18.0 };
            }
        }
        let mut vs = Vec::with_capacity(values.len());
        for t in values {
            let v = f(t).abs();
            if v.is_nan() {
                return Err(Error::Domain(format!("sup_abs: f returned NaN at t = {t}")));
            }
            if v > OVERFLOW {
                return Ok(f64::INFINITY);
            }
            vs.push(v);
        }
        if vs.len() >= 6 {
            let monotone = vs.windows(2).all(|w| w[1] >= w[0]);
            let first = vs[0];
            let last = *vs.last().unwrap();
            if monotone && first > 0.0 && last >= 1e3 * first {
                return Ok(f64::INFINITY);
            }
        }
        if let Some(m) = vs.iter().copied().reduce(f64::max) {
            best = best.max(m);
        }
    }

    // Golden-section refinement of the bracket around the best grid node.
    let lo = if best_idx == 0 { 0.0 } else { us[best_idx - 1] };
    let hi = if best_idx + 1 == us.len() {
        1.0
    } else {
        us[best_idx + 1]
    };
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..120 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        }
        if f1.max(f2) > OVERFLOW {
            return Ok(f64::INFINITY);
        }
    }
    Ok(best.max(f1).max(f2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_bad_endpoints() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn interval_membership_is_open() {
        let iv = Interval::unit();
        assert!(iv.contains(0.5));
        assert!(!iv.contains(0.0));
        assert!(!iv.contains(1.0));
        assert!(Interval::positive().contains(1e300));
    }

    #[test]
    fn sup_abs_parabola_peak() {
        let s = sup_abs(|x| x * (1.0 - x), Interval::unit(), 4096).unwrap();
        assert!((s - 0.25).abs() <= 1e-12, "sup = {s}");
    }

    #[test]
    fn sup_abs_approaches_open_endpoint() {
        let s = sup_abs(|x| -2.0 * x, Interval::unit(), 4096).unwrap();
        assert!((s - 2.0).abs() <= 1e-9, "sup = {s}");
    }

    #[test]
    fn sup_abs_detects_blowup_at_zero() {
        // d/dt of t^-1 e^0 style ratio: diverges like t^-2 at the origin.
        let s = sup_abs(|t: f64| -t.powi(-2), Interval::positive(), 4096).unwrap();
        assert!(s.is_infinite(), "sup = {s}");
    }

    #[test]
    fn sup_abs_detects_slow_blowup() {
        // Exponent too small for the overflow threshold alone; the monotone
        // probe rule has to catch it.
        let s = sup_abs(|t: f64| t.powf(-0.2), Interval::positive(), 4096).unwrap();
        assert!(s.is_infinite(), "sup = {s}");
    }

    #[test]
    fn sup_abs_bounded_on_half_line() {
        let s = sup_abs(|t: f64| t * (-t).exp(), Interval::positive(), 4096).unwrap();
        let expect = (-1.0f64).exp();
        assert!((s - expect).abs() <= 1e-10, "sup = {s}, expect {expect}");
    }

    #[test]
    fn sup_abs_rejects_tiny_grid() {
        assert!(sup_abs(|x| x, Interval::unit(), 32).is_err());
    }
}
