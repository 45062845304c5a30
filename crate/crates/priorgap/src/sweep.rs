//! Synthetic-data sweep harness: draw data at growing sample sizes, bound
//! the posterior gap on every draw, verify the bounds against the oracle,
//! and fit the decay rate of the gap as `n` grows.
//!
//! Reproducibility contract: every row's random stream is seeded by
//! [`derive_row_seed`], a splittable 64-bit mix of the plan seed, the model
//! tag, `n`, and the replicate index. Rows therefore never share state and
//! the output is bit-identical whether rows run serially or in parallel
//! (output order is canonical: sorted by `n`, then replicate).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::models::{BinomialSuccessCase, ModelCase, NormalVarianceCase, PoissonRateCase};
use crate::numerics::QuadratureSettings;
use crate::wasserstein::{w1_distance, OracleSettings};
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Exact header of the CSV emitted by [`render_csv`].
pub const CSV_HEADER: &str =
    "model,n,replicate,seed,sum_x,centered_sq_sum,successes,lower,upper,upper_supnorm,oracle,exact";

/// Model template for a sweep: prior parameters only, data filled in per row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepModel {
    /// Normal observations with known mean; `true_param` is the variance.
    NormalVariance { alpha: f64, beta: f64 },
    /// Bernoulli trials; `true_param` is the success probability.
    BinomialSuccess { alpha: f64, beta: f64 },
    /// Poisson counts; `true_param` is the rate.
    PoissonRate {
        alpha1: f64,
        beta1: f64,
        alpha2: f64,
        beta2: f64,
    },
}

/// Sufficient statistics produced by [`generate_sample`]; raw draws are
/// never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataSummary {
    NormalVariance { n: u64, centered_sq_sum: f64 },
    BinomialSuccess { n: u64, successes: u64 },
    PoissonRate { n: u64, sum_x: u64 },
}

/// Full description of a sweep; two equal plans produce bit-identical CSV.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub model: SweepModel,
    /// Strictly increasing sample sizes.
    pub n_grid: Vec<u64>,
    /// Data-generating parameter (variance, success probability, or rate).
    pub true_param: f64,
    /// Independent replicates per sample size.
    pub replicates: u32,
    pub seed: u64,
    /// Tolerances for the bound integrals.
    pub quad: QuadratureSettings,
    /// Tolerances for the verification oracle.
    pub oracle: OracleSettings,
}

/// How to schedule independent rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Serial,
    /// Thread-pool execution; falls back to serial when the crate is built
    /// without the `parallel` feature.
    Parallel,
}

/// One verified sweep result. Inapplicable data-summary columns and a
/// non-finite sup-norm bound are `None` (empty in CSV).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub model: &'static str,
    pub n: u64,
    pub replicate: u32,
    pub seed: u64,
    pub sum_x: Option<u64>,
    pub centered_sq_sum: Option<f64>,
    pub successes: Option<u64>,
    pub lower: f64,
    pub upper: f64,
    pub upper_supnorm: Option<f64>,
    pub oracle: f64,
    pub exact: bool,
}

/// Column selector for [`fit_decay_slope`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeColumn {
    Lower,
    Upper,
    Oracle,
}

impl SlopeColumn {
    pub fn name(&self) -> &'static str {
        match self {
            SlopeColumn::Lower => "lower",
            SlopeColumn::Upper => "upper",
            SlopeColumn::Oracle => "oracle",
        }
    }

    fn pick(&self, row: &SweepRow) -> f64 {
        match self {
            SlopeColumn::Lower => row.lower,
            SlopeColumn::Upper => row.upper,
            SlopeColumn::Oracle => row.oracle,
        }
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 step: bijective, avalanching, and cheap. The fixed constants
/// are the reference ones, so seeds are stable across versions.
fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over the model tag so distinct models never share row streams.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Deterministic per-row seed, independent of execution order.
pub fn derive_row_seed(master: u64, tag: &str, n: u64, replicate: u32) -> u64 {
    let tagged = master ^ fnv1a(tag.as_bytes());
    mix64(mix64(mix64(tagged) ^ n) ^ u64::from(replicate))
}

/// Uniform on (0, 1]: safe as a log argument.
fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Standard normal via the Box-Muller transform of two uniforms.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let r = (-2.0 * unit_open(rng).ln()).sqrt();
    let angle = std::f64::consts::TAU * rng.gen::<f64>();
    r * angle.cos()
}

/// Poisson by CDF inversion (sequential search). Rates above 16 are split
/// into equal chunks and summed (rates are additive), which keeps the search
/// short and `e^{-rate}` far from underflow.
fn poisson_draw(rng: &mut ChaCha8Rng, rate: f64) -> u64 {
    const CHUNK: f64 = 16.0;
    let mut total = 0u64;
    let mut remaining = rate;
    while remaining > CHUNK {
        total += poisson_inversion(rng, CHUNK);
        remaining -= CHUNK;
    }
    total + poisson_inversion(rng, remaining)
}

fn poisson_inversion(rng: &mut ChaCha8Rng, rate: f64) -> u64 {
    // The cap is unreachable for rate <= 16 (tail mass ~ 1e-90); it only
    // guards against an infinite loop if u lands above the accumulated CDF
    // after floating-point saturation.
    const CAP: u64 = 512;
    let u = unit_open(rng);
    let mut k = 0u64;
    let mut pmf = (-rate).exp();
    let mut cdf = pmf;
    while u > cdf && k < CAP {
        k += 1;
        pmf *= rate / k as f64;
        cdf += pmf;
    }
    k
}

impl SweepModel {
    /// Tag used in seeds and the CSV `model` column; matches
    /// [`ModelCase::tag`].
    pub fn tag(&self) -> &'static str {
        match self {
            SweepModel::NormalVariance { .. } => "normal-variance",
            SweepModel::BinomialSuccess { .. } => "binomial",
            SweepModel::PoissonRate { .. } => "poisson",
        }
    }

    fn check_true_param(&self, v: f64) -> Result<()> {
        let ok = match self {
            SweepModel::NormalVariance { .. } => v.is_finite() && v > 0.0,
            SweepModel::BinomialSuccess { .. } => v > 0.0 && v < 1.0,
            SweepModel::PoissonRate { .. } => v.is_finite() && v > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Model(format!(
                "true parameter {v} is outside the {} parameter space",
                self.tag()
            )))
        }
    }

    fn minimum_n(&self) -> u64 {
        match self {
            SweepModel::NormalVariance { .. } => 3,
            SweepModel::BinomialSuccess { .. } => 2,
            SweepModel::PoissonRate { .. } => 1,
        }
    }

    /// Combine the template's prior parameters with observed sufficient
    /// statistics into a full case.
    pub fn with_data(&self, data: &DataSummary) -> Result<ModelCase> {
        match (*self, *data) {
            (
                SweepModel::NormalVariance { alpha, beta },
                DataSummary::NormalVariance {
                    n,
                    centered_sq_sum,
                },
            ) => Ok(ModelCase::NormalVariance(NormalVarianceCase {
                n,
                centered_sq_sum,
                alpha,
                beta,
            })),
            (
                SweepModel::BinomialSuccess { alpha, beta },
                DataSummary::BinomialSuccess { n, successes },
            ) => Ok(ModelCase::BinomialSuccess(BinomialSuccessCase {
                n,
                successes,
                alpha,
                beta,
            })),
            (
                SweepModel::PoissonRate {
                    alpha1,
                    beta1,
                    alpha2,
                    beta2,
                },
                DataSummary::PoissonRate { n, sum_x },
            ) => Ok(ModelCase::PoissonRate(PoissonRateCase {
                n,
                sum_x,
                alpha1,
                beta1,
                alpha2,
                beta2,
            })),
            _ => Err(Error::Model(format!(
                "data summary {data:?} does not belong to the {} model",
                self.tag()
            ))),
        }
    }
}

/// Draw `n` observations and reduce them to sufficient statistics.
///
/// Deterministic given `(model, true_param, n, seed)`. The binomial sampler
/// redraws (reseeding deterministically) when every trial lands on the same
/// side, since the base posterior needs an interior success count.
pub fn generate_sample(
    model: &SweepModel,
    true_param: f64,
    n: u64,
    seed: u64,
) -> Result<DataSummary> {
    model.check_true_param(true_param)?;
    if n < model.minimum_n() {
        return Err(Error::Model(format!(
            "{} model needs n >= {}, got {n}",
            model.tag(),
            model.minimum_n()
        )));
    }
    match model {
        SweepModel::NormalVariance { .. } => {
            // Known mean zero: only the squared deviations matter.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sd = true_param.sqrt();
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let x = sd * standard_normal(&mut rng);
                sum_sq += x * x;
            }
            Ok(DataSummary::NormalVariance {
                n,
                centered_sq_sum: sum_sq,
            })
        }
        SweepModel::BinomialSuccess { .. } => {
            for attempt in 0..1000u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ attempt));
                let successes = (0..n).filter(|_| rng.gen::<f64>() < true_param).count() as u64;
                if successes > 0 && successes < n {
                    return Ok(DataSummary::BinomialSuccess { n, successes });
                }
            }
            Err(Error::Model(format!(
                "binomial sample stayed degenerate after 1000 reseeds (n = {n}, theta = {true_param})"
            )))
        }
        SweepModel::PoissonRate { .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum_x = 0u64;
            for _ in 0..n {
                sum_x += poisson_draw(&mut rng, true_param);
            }
            Ok(DataSummary::PoissonRate { n, sum_x })
        }
    }
}

impl DataSummary {
    fn n(&self) -> u64 {
        match *self {
            DataSummary::NormalVariance { n, .. }
            | DataSummary::BinomialSuccess { n, .. }
            | DataSummary::PoissonRate { n, .. } => n,
        }
    }

    fn sum_x(&self) -> Option<u64> {
        match *self {
            DataSummary::PoissonRate { sum_x, .. } => Some(sum_x),
            _ => None,
        }
    }

    fn centered_sq_sum(&self) -> Option<f64> {
        match *self {
            DataSummary::NormalVariance {
                centered_sq_sum, ..
            } => Some(centered_sq_sum),
            _ => None,
        }
    }

    fn successes(&self) -> Option<u64> {
        match *self {
            DataSummary::BinomialSuccess { successes, .. } => Some(successes),
            _ => None,
        }
    }
}

impl SweepPlan {
    /// Plan with the default five replicates and default tolerances.
    pub fn new(model: SweepModel, n_grid: Vec<u64>, true_param: f64, seed: u64) -> Self {
        SweepPlan {
            model,
            n_grid,
            true_param,
            replicates: 5,
            seed,
            quad: QuadratureSettings::default(),
            oracle: OracleSettings::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Model("sweep needs a non-empty n grid".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Model(format!(
                "n grid must be strictly increasing, got {:?}",
                self.n_grid
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Model("sweep needs at least one replicate".into()));
        }
        self.model.check_true_param(self.true_param)
    }
}

fn compute_row(plan: &SweepPlan, n: u64, replicate: u32) -> Result<SweepRow> {
    let tag = plan.model.tag();
    let seed = derive_row_seed(plan.seed, tag, n, replicate);
    let data = generate_sample(&plan.model, plan.true_param, n, seed)?;
    debug_assert_eq!(data.n(), n);
    let case = plan.model.with_data(&data)?;
    let bounds = case.nested_pair()?.bounds(&plan.quad)?;
    let (p1, p2) = case.posterior_pair()?;
    let oracle = w1_distance(&p1, &p2, &plan.oracle)?;

    // Hard sandwich assertion with 1e-6 slack (absolute floor for distances
    // below 1, relative above). The slack applies on both sides because in
    // the monotone case lower == upper and the oracle's own error may land
    // on either side of it.
    let slack = 1e-6 * oracle.max(1.0);
    if !(bounds.lower <= oracle + slack && oracle <= bounds.upper * (1.0 + 1e-6) + slack) {
        return Err(Error::Sandwich {
            model: tag,
            n,
            replicate,
            lower: bounds.lower,
            oracle,
            upper: bounds.upper,
        });
    }

    Ok(SweepRow {
        model: tag,
        n,
        replicate,
        seed,
        sum_x: data.sum_x(),
        centered_sq_sum: data.centered_sq_sum(),
        successes: data.successes(),
        lower: bounds.lower,
        upper: bounds.upper,
        upper_supnorm: bounds.upper_supnorm.is_finite().then_some(bounds.upper_supnorm),
        oracle,
        exact: bounds.exact,
    })
}

/// Sandwich and oracle failures already identify their row; anything else
/// gets the offending (n, replicate) attached here.
fn add_row_context(err: Error, tag: &str, n: u64, replicate: u32) -> Error {
    match err {
        e @ (Error::Sandwich { .. } | Error::OracleMismatch { .. }) => e,
        other => Error::Model(format!(
            "sweep row (model = {tag}, n = {n}, replicate = {replicate}) failed: {other}"
        )),
    }
}

/// The scheduling mode [`run_sweep`] uses: parallel when available.
pub fn default_mode() -> ExecMode {
    if cfg!(feature = "parallel") {
        ExecMode::Parallel
    } else {
        ExecMode::Serial
    }
}

/// Run the plan with [`default_mode`]. Every returned row has already passed
/// the sandwich assertion.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    run_sweep_mode(plan, default_mode())
}

/// Run the plan with an explicit scheduling mode. Output is canonical
/// (sorted by `n`, then replicate) in both modes.
pub fn run_sweep_mode(plan: &SweepPlan, mode: ExecMode) -> Result<Vec<SweepRow>> {
    plan.validate()?;
    let tasks: Vec<(u64, u32)> = plan
        .n_grid
        .iter()
        .flat_map(|&n| (0..plan.replicates).map(move |r| (n, r)))
        .collect();
    let tag = plan.model.tag();
    let row = |&(n, r): &(u64, u32)| {
        compute_row(plan, n, r).map_err(|e| add_row_context(e, tag, n, r))
    };
    let results: Vec<Result<SweepRow>> = match mode {
        ExecMode::Serial => tasks.iter().map(row).collect(),
        ExecMode::Parallel => parallel_map(&tasks, row),
    };
    results.into_iter().collect()
}

#[cfg(feature = "parallel")]
fn parallel_map<F>(tasks: &[(u64, u32)], row: F) -> Vec<Result<SweepRow>>
where
    F: Fn(&(u64, u32)) -> Result<SweepRow> + Sync + Send,
{
    tasks.par_iter().map(row).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<F>(tasks: &[(u64, u32)], row: F) -> Vec<Result<SweepRow>>
where
    F: Fn(&(u64, u32)) -> Result<SweepRow> + Sync + Send,
{
    tasks.iter().map(row).collect()
}

/// Render rows as CSV with the exact [`CSV_HEADER`] schema: '.' decimal
/// points, lowercase booleans, empty strings for inapplicable fields.
pub fn render_csv(rows: &[SweepRow]) -> String {
    use std::fmt::Write as _;

    fn opt<T: ToString>(v: Option<T>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }

    let mut out = String::with_capacity(80 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            r.n,
            r.replicate,
            r.seed,
            opt(r.sum_x),
            opt(r.centered_sq_sum),
            opt(r.successes),
            r.lower,
            r.upper,
            opt(r.upper_supnorm),
            r.oracle,
            r.exact
        );
    }
    out
}

/// Ordinary least-squares slope of `log(column)` against `log(n)`, with
/// replicates reduced to a geometric mean per sample size first (the fit
/// lives on the log scale). Needs at least four distinct sample sizes;
/// non-positive values have no logarithm and fail with the rows named.
pub fn fit_decay_slope(rows: &[SweepRow], column: SlopeColumn) -> Result<f64> {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !(column.pick(r) > 0.0 && column.pick(r).is_finite()))
        .map(|r| format!("(n = {}, replicate = {})", r.n, r.replicate))
        .collect();
    if !bad.is_empty() {
        return Err(Error::Fit(format!(
            "column '{}' has non-positive or non-finite values at rows {}",
            column.name(),
            bad.join(", ")
        )));
    }

    let mut per_n: std::collections::BTreeMap<u64, Vec<f64>> = std::collections::BTreeMap::new();
    for r in rows {
        per_n.entry(r.n).or_default().push(column.pick(r).ln());
    }
    if per_n.len() < 4 {
        return Err(Error::Fit(format!(
            "slope fit needs at least 4 distinct sample sizes, got {}",
            per_n.len()
        )));
    }

    let pts: Vec<(f64, f64)> = per_n
        .iter()
        .map(|(&n, logs)| {
            let geo = logs.iter().sum::<f64>() / logs.len() as f64;
            ((n as f64).ln(), geo)
        })
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}
