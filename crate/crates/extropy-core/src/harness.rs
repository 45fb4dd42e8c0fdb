//! Deterministic Monte Carlo engine for bias/MSE studies of the extropy
//! estimators.
//!
//! Replicates draw from ChaCha8 streams keyed by (master seed, purpose,
//! sample-size lane, replicate index), so a report is bit-identical for
//! any rayon worker count and any execution order. Censoring times are
//! exponential for every lifetime family, with the rate calibrated to the
//! requested censored fraction.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censored::{
    estimate_ce_censored, estimate_ce_censored_with, estimate_cre_censored,
    estimate_cre_censored_with, CensoringWeights,
};
use crate::complete::{estimate_ce, estimate_ce_plugin, estimate_cre, estimate_cre_plugin};
use crate::error::{Error, Result};
use crate::oracles::{
    calibrate_censoring_rate, finite_sample_estimator_variance, true_ce, true_cre, Distribution,
    PairwiseKernel,
};
use crate::sample::{CensoredSample, Observation, Sample};
use crate::special::normal_quantile;
use crate::stream::{derive_rng, Purpose};
use crate::sum::csum;

/// Estimators the harness can run in one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimatorId {
    /// CRE U-statistic on complete (latent) lifetimes.
    CreU,
    /// CE U-statistic on complete (latent) lifetimes.
    CeU,
    /// Plug-in CRE baseline.
    CrePlugin,
    /// Plug-in CE baseline.
    CePlugin,
    /// IPCW CRE with estimated Kaplan-Meier weights.
    CreIpcw,
    /// IPCW CE with estimated Kaplan-Meier weights.
    CeIpcw,
    /// IPCW CRE with the true censoring survival (oracle weights).
    CreIpcwOracle,
    /// IPCW CE with the true censoring survival.
    CeIpcwOracle,
}

impl EstimatorId {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorId::CreU => "cre",
            EstimatorId::CeU => "ce",
            EstimatorId::CrePlugin => "cre-plugin",
            EstimatorId::CePlugin => "ce-plugin",
            EstimatorId::CreIpcw => "cre-ipcw",
            EstimatorId::CeIpcw => "ce-ipcw",
            EstimatorId::CreIpcwOracle => "cre-ipcw-oracle",
            EstimatorId::CeIpcwOracle => "ce-ipcw-oracle",
        }
    }

    pub fn needs_censoring(&self) -> bool {
        matches!(
            self,
            EstimatorId::CreIpcw | EstimatorId::CeIpcw | EstimatorId::CreIpcwOracle | EstimatorId::CeIpcwOracle
        )
    }

    /// Whether the estimator targets CRE (min kernel) or CE (max kernel).
    pub fn kernel(&self) -> PairwiseKernel {
        match self {
            EstimatorId::CreU | EstimatorId::CrePlugin | EstimatorId::CreIpcw | EstimatorId::CreIpcwOracle => {
                PairwiseKernel::Min
            }
            _ => PairwiseKernel::Max,
        }
    }
}

impl std::fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EstimatorId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cre" => Ok(EstimatorId::CreU),
            "ce" => Ok(EstimatorId::CeU),
            "cre-plugin" => Ok(EstimatorId::CrePlugin),
            "ce-plugin" => Ok(EstimatorId::CePlugin),
            "cre-ipcw" => Ok(EstimatorId::CreIpcw),
            "ce-ipcw" => Ok(EstimatorId::CeIpcw),
            "cre-ipcw-oracle" => Ok(EstimatorId::CreIpcwOracle),
            "ce-ipcw-oracle" => Ok(EstimatorId::CeIpcwOracle),
            other => Err(format!("unknown estimator `{other}`")),
        }
    }
}

/// One Monte Carlo experiment: a distribution, a grid of sample sizes,
/// the estimators to evaluate, and optional censoring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub distribution: Distribution,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub estimators: Vec<EstimatorId>,
    /// Target censored fraction; censoring times are exponential with the
    /// calibrated rate.
    pub censoring: Option<f64>,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 100 {
            return Err(Error::InvalidSpec(format!(
                "replications = {} is below the minimum of 100",
                self.replications
            )));
        }
        if self.n_values.is_empty() {
            return Err(Error::InvalidSpec("n_values is empty".into()));
        }
        if let Some(n) = self.n_values.iter().find(|n| **n < 2) {
            return Err(Error::InvalidSpec(format!("sample size {n} is below 2")));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidSpec("no estimators requested".into()));
        }
        if let Some(frac) = self.censoring {
            if !(0.0 < frac && frac < 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "censoring fraction {frac} must lie strictly between 0 and 1"
                )));
            }
        } else if let Some(e) = self.estimators.iter().find(|e| e.needs_censoring()) {
            return Err(Error::InvalidSpec(format!(
                "estimator {e} requires a censoring configuration"
            )));
        }
        Ok(())
    }
}

/// Bias/MSE summary for one (estimator, n) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub estimator: EstimatorId,
    pub n: usize,
    pub bias: f64,
    pub mse: f64,
    /// Monte Carlo standard error of the bias estimate.
    pub mc_se_bias: f64,
    /// Replicates skipped because the estimator was undefined there.
    pub n_degenerate: usize,
    pub truth: f64,
    pub truth_source: String,
    /// Set when more than 5% of replicates were skipped.
    pub high_skip_rate: bool,
}

/// Full experiment summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub distribution: String,
    pub replications: usize,
    pub master_seed: u64,
    pub censoring_target: Option<f64>,
    /// Calibrated exponential censoring rate.
    pub censoring_rate: Option<f64>,
    /// Fraction of censored observations actually realized across all
    /// replicates and sample sizes.
    pub realized_censored_fraction: Option<f64>,
    pub cells: Vec<CellReport>,
}

fn draw_open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

fn draw_standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    normal_quantile(draw_open_unit(rng))
}

fn draw_gamma(shape: f64, rate: f64, rng: &mut ChaCha8Rng) -> f64 {
    if shape < 1.0 {
        // Boost: gamma(a) = gamma(a + 1) * U^{1/a}.
        loop {
            let g = draw_gamma(shape + 1.0, rate, rng);
            let u = draw_open_unit(rng);
            let x = g * u.powf(1.0 / shape);
            if x > 0.0 {
                return x;
            }
        }
    }
    if shape.fract() == 0.0 && shape <= 64.0 {
        // Sum of exponentials for small integer shapes; independent of
        // the incomplete-gamma code path used by the quadrature truths.
        let k = shape as usize;
        let mut acc = 0.0;
        for _ in 0..k {
            acc += -(-draw_open_unit(rng)).ln_1p() / rate;
        }
        return acc;
    }
    // Marsaglia-Tsang squeeze for general shape >= 1.
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = draw_standard_normal(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = draw_open_unit(rng);
        if u < 1.0 - 0.0331 * x.powi(4)
            || u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln())
        {
            return d * v / rate;
        }
    }
}

/// One draw from the distribution; inverse-CDF for the families with a
/// tractable quantile, sum-of-exponentials or Marsaglia-Tsang for gamma.
pub fn draw(d: &Distribution, rng: &mut ChaCha8Rng) -> f64 {
    match d {
        Distribution::Gamma { shape, rate } => draw_gamma(*shape, *rate, rng),
        _ => d.quantile(draw_open_unit(rng)),
    }
}

/// An i.i.d. sample of size `n`, deterministic for a given stream.
pub fn sample_distribution(d: &Distribution, n: usize, rng: &mut ChaCha8Rng) -> Sample {
    Sample::new((0..n).map(|_| draw(d, rng)).collect())
        .expect("positive continuous draws form a valid sample")
}

fn eval_estimator(
    id: EstimatorId,
    latent: &Sample,
    censored: Option<&CensoredSample>,
    censoring_rate: Option<f64>,
) -> Option<f64> {
    match id {
        EstimatorId::CreU => estimate_cre(latent).ok().map(|e| e.value),
        EstimatorId::CeU => estimate_ce(latent).ok().map(|e| e.value),
        EstimatorId::CrePlugin => estimate_cre_plugin(latent).ok().map(|e| e.value),
        EstimatorId::CePlugin => estimate_ce_plugin(latent).ok().map(|e| e.value),
        EstimatorId::CreIpcw => censored.and_then(|cs| estimate_cre_censored(cs).ok().map(|e| e.value)),
        EstimatorId::CeIpcw => censored.and_then(|cs| estimate_ce_censored(cs).ok().map(|e| e.value)),
        EstimatorId::CreIpcwOracle => {
            let rate = censoring_rate?;
            let k = move |t: f64| (-rate * t).exp();
            censored.and_then(|cs| {
                estimate_cre_censored_with(cs, CensoringWeights::Oracle(&k))
                    .ok()
                    .map(|e| e.value)
            })
        }
        EstimatorId::CeIpcwOracle => {
            let rate = censoring_rate?;
            let k = move |t: f64| (-rate * t).exp();
            censored.and_then(|cs| {
                estimate_ce_censored_with(cs, CensoringWeights::Oracle(&k))
                    .ok()
                    .map(|e| e.value)
            })
        }
    }
}

fn truth_and_source(d: &Distribution, kernel: PairwiseKernel) -> Result<(f64, &'static str)> {
    let source = match d {
        Distribution::Exponential { .. } | Distribution::Weibull { .. } => "closed-form",
        _ => "quadrature",
    };
    let value = match kernel {
        PairwiseKernel::Min => true_cre(d)?,
        PairwiseKernel::Max => true_ce(d)?,
        _ => unreachable!("estimators use min/max kernels"),
    };
    Ok((value, source))
}

/// Runs the experiment and also returns the per-replicate estimates for
/// each cell (aligned with `report.cells`; `None` marks a skipped
/// replicate).
pub fn run_experiment_full(
    spec: &ExperimentSpec,
) -> Result<(ExperimentReport, Vec<Vec<Option<f64>>>)> {
    spec.validate()?;
    let d = &spec.distribution;
    let censoring_rate = match spec.censoring {
        Some(target) => Some(calibrate_censoring_rate(d, target)?),
        None => None,
    };

    let mut truths = Vec::with_capacity(spec.estimators.len());
    for e in &spec.estimators {
        truths.push(truth_and_source(d, e.kernel())?);
    }

    let reps = spec.replications;
    let mut cells = Vec::new();
    let mut cell_estimates: Vec<Vec<Option<f64>>> = Vec::new();
    let mut censored_count = 0usize;
    let mut observation_count = 0usize;

    for (lane, &n) in spec.n_values.iter().enumerate() {
        // Per-replicate work is embarrassingly parallel; the collect
        // preserves replicate order, and aggregation below is sequential,
        // so the report does not depend on the worker count.
        let per_rep: Vec<(Vec<Option<f64>>, usize)> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut life_rng =
                    derive_rng(spec.master_seed, Purpose::Lifetimes, lane as u64, r as u64);
                let latent = sample_distribution(d, n, &mut life_rng);
                let (censored, n_censored) = match censoring_rate {
                    Some(rate) => {
                        let mut cens_rng = derive_rng(
                            spec.master_seed,
                            Purpose::Censoring,
                            lane as u64,
                            r as u64,
                        );
                        let mut n_censored = 0usize;
                        let obs: Vec<Observation> = latent
                            .values()
                            .iter()
                            .map(|&x| {
                                let c = -(-draw_open_unit(&mut cens_rng)).ln_1p() / rate;
                                let event = x <= c;
                                if !event {
                                    n_censored += 1;
                                }
                                Observation {
                                    time: x.min(c),
                                    event,
                                }
                            })
                            .collect();
                        (
                            Some(CensoredSample::new(obs).expect("positive observed times")),
                            n_censored,
                        )
                    }
                    None => (None, 0),
                };
                let estimates = spec
                    .estimators
                    .iter()
                    .map(|e| eval_estimator(*e, &latent, censored.as_ref(), censoring_rate))
                    .collect();
                (estimates, n_censored)
            })
            .collect();

        for (est_idx, e) in spec.estimators.iter().enumerate() {
            let (truth, source) = truths[est_idx];
            let values: Vec<Option<f64>> = per_rep.iter().map(|r| r.0[est_idx]).collect();
            let kept: Vec<f64> = values.iter().filter_map(|v| *v).collect();
            let m = kept.len();
            let n_degenerate = reps - m;
            let (bias, mse, mc_se) = if m == 0 {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                let mean = csum(kept.iter().copied()) / m as f64;
                let mse = csum(kept.iter().map(|v| (v - truth) * (v - truth))) / m as f64;
                let sd = if m >= 2 {
                    (csum(kept.iter().map(|v| (v - mean) * (v - mean))) / (m as f64 - 1.0)).sqrt()
                } else {
                    f64::NAN
                };
                (mean - truth, mse, sd / (m as f64).sqrt())
            };
            cells.push(CellReport {
                estimator: *e,
                n,
                bias,
                mse,
                mc_se_bias: mc_se,
                n_degenerate,
                truth,
                truth_source: source.to_string(),
                high_skip_rate: n_degenerate * 20 > reps,
            });
            cell_estimates.push(values);
        }

        censored_count += per_rep.iter().map(|r| r.1).sum::<usize>();
        observation_count += reps * n;
    }

    let report = ExperimentReport {
        distribution: d.label(),
        replications: reps,
        master_seed: spec.master_seed,
        censoring_target: spec.censoring,
        censoring_rate,
        realized_censored_fraction: spec
            .censoring
            .map(|_| censored_count as f64 / observation_count as f64),
        cells,
    };
    Ok((report, cell_estimates))
}

/// Runs the experiment and returns the aggregate report.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_experiment_full(spec).map(|(report, _)| report)
}

/// Published tables the harness can rerun.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableId {
    Table1,
    Table2,
    Table3,
    Table4,
}

impl TableId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
            TableId::Table3 => "table3",
            TableId::Table4 => "table4",
        }
    }
}

impl std::str::FromStr for TableId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "1" | "table1" => Ok(TableId::Table1),
            "2" | "table2" => Ok(TableId::Table2),
            "3" | "table3" => Ok(TableId::Table3),
            "4" | "table4" => Ok(TableId::Table4),
            other => Err(format!("unknown table `{other}` (expected 1-4)")),
        }
    }
}

/// One reproduced cell next to the published value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub distribution: String,
    pub estimator: EstimatorId,
    pub n: usize,
    pub bias: f64,
    pub mse: f64,
    pub mc_se_bias: f64,
    pub n_degenerate: usize,
    pub printed_bias: f64,
    pub printed_mse: f64,
    /// For the exact U-statistics: whether the reproduced bias is within
    /// 3 Monte Carlo standard errors of zero.
    pub unbiasedness_ok: Option<bool>,
    /// For the exact U-statistics: whether the reproduced MSE is within
    /// 15% of the exact finite-sample variance computed by quadrature.
    pub mse_vs_theory_ok: Option<bool>,
    /// Magnitude comparison with the printed bias (25% relative or 4
    /// Monte Carlo SEs, whichever is wider).
    pub printed_bias_agrees: bool,
    /// Comparison with the printed MSE at 25% relative.
    pub printed_mse_agrees: bool,
    /// Printed values in this cell are not reproduction targets (known
    /// typos or documented discrepancies); the printed comparisons are
    /// reported for information only.
    pub informational_only: bool,
}

/// Side-by-side reproduction of one published table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReproduction {
    pub table: TableId,
    pub replications: usize,
    pub master_seed: u64,
    pub note: String,
    pub cells: Vec<TableCell>,
}

struct PrintedBlock {
    distribution: Distribution,
    estimator: EstimatorId,
    /// (n, bias, mse) rows as published.
    rows: &'static [(usize, f64, f64)],
}

fn dist_exp1() -> Distribution {
    Distribution::Exponential { rate: 1.0 }
}
fn dist_gamma21() -> Distribution {
    Distribution::Gamma {
        shape: 2.0,
        rate: 1.0,
    }
}
fn dist_gamma22() -> Distribution {
    Distribution::Gamma {
        shape: 2.0,
        rate: 2.0,
    }
}
fn dist_weibull21() -> Distribution {
    Distribution::Weibull {
        shape: 2.0,
        scale: 1.0,
    }
}
fn dist_lognormal01() -> Distribution {
    Distribution::Lognormal {
        mu: 0.0,
        sigma: 1.0,
    }
}

fn printed_blocks(table: TableId) -> Vec<PrintedBlock> {
    match table {
        TableId::Table1 => vec![
            PrintedBlock {
                distribution: dist_exp1(),
                estimator: EstimatorId::CreU,
                rows: &[
                    (10, 0.00076, 0.00879),
                    (20, 0.00074, 0.00416),
                    (30, 0.00038, 0.00274),
                    (40, 0.00018, 0.00211),
                    (50, 0.00004, 0.00164),
                ],
            },
            PrintedBlock {
                distribution: dist_exp1(),
                estimator: EstimatorId::CrePlugin,
                rows: &[
                    (10, 0.02541, 0.00776),
                    (20, 0.01283, 0.00398),
                    (30, 0.00861, 0.00263),
                    (40, 0.01283, 0.00202),
                    (50, 0.02541, 0.00160),
                ],
            },
            PrintedBlock {
                distribution: dist_gamma21(),
                estimator: EstimatorId::CreU,
                rows: &[
                    (10, 0.00199, 0.02647),
                    (20, 0.00168, 0.01270),
                    (30, 0.00124, 0.00851),
                    (40, 0.00094, 0.00638),
                    (50, 0.00036, 0.00507),
                ],
            },
            PrintedBlock {
                distribution: dist_gamma21(),
                estimator: EstimatorId::CrePlugin,
                rows: &[
                    (10, 0.19588, 0.05776),
                    (20, 0.13943, 0.03153),
                    (30, 0.11270, 0.02151),
                    (40, 0.09819, 0.01632),
                    (50, 0.08221, 0.01348),
                ],
            },
            PrintedBlock {
                distribution: dist_weibull21(),
                estimator: EstimatorId::CreU,
                rows: &[
                    (10, 0.00078, 0.00431),
                    (20, 0.00058, 0.00217),
                    (30, 0.00054, 0.00142),
                    (40, 0.00017, 0.00104),
                    (50, 0.00001, 0.00087),
                ],
            },
            PrintedBlock {
                distribution: dist_weibull21(),
                estimator: EstimatorId::CrePlugin,
                rows: &[
                    (10, 0.12641, 0.01951),
                    (20, 0.09280, 0.01105),
                    (30, 0.07621, 0.00764),
                    (40, 0.06703, 0.00600),
                    (50, 0.05987, 0.00484),
                ],
            },
            PrintedBlock {
                distribution: dist_lognormal01(),
                estimator: EstimatorId::CreU,
                rows: &[
                    (10, 0.00115, 0.01765),
                    (20, 0.00098, 0.00844),
                    (30, 0.00049, 0.00546),
                    (40, 0.00030, 0.00410),
                    (50, 0.00024, 0.00325),
                ],
            },
            PrintedBlock {
                distribution: dist_lognormal01(),
                estimator: EstimatorId::CrePlugin,
                rows: &[
                    (10, 0.08175, 0.02327),
                    (20, 0.06710, 0.01264),
                    (30, 0.05867, 0.00892),
                    (40, 0.05367, 0.00705),
                    (50, 0.04867, 0.00572),
                ],
            },
        ],
        TableId::Table2 => vec![
            PrintedBlock {
                distribution: dist_exp1(),
                estimator: EstimatorId::CreIpcw,
                rows: &[
                    (50, 0.08418, 0.00830),
                    (75, 0.08287, 0.00788),
                    (100, 0.08222, 0.00761),
                    (200, 0.08199, 0.00741),
                ],
            },
            PrintedBlock {
                distribution: dist_gamma21(),
                estimator: EstimatorId::CreIpcw,
                rows: &[
                    (50, 0.17328, 0.04083),
                    (75, 0.17321, 0.03822),
                    (100, 0.17318, 0.03735),
                    (200, 0.17309, 0.03585),
                ],
            },
            PrintedBlock {
                distribution: dist_weibull21(),
                estimator: EstimatorId::CreIpcw,
                rows: &[
                    (50, 0.08358, 0.00914),
                    (75, 0.08128, 0.00852),
                    (100, 0.07956, 0.00807),
                    (200, 0.07942, 0.00762),
                ],
            },
            PrintedBlock {
                distribution: dist_lognormal01(),
                estimator: EstimatorId::CreIpcw,
                rows: &[
                    (50, 0.26264, 0.07059),
                    (75, 0.26235, 0.06979),
                    (100, 0.26228, 0.06956),
                    (200, 0.26189, 0.06895),
                ],
            },
        ],
        TableId::Table3 => vec![
            PrintedBlock {
                distribution: dist_exp1(),
                estimator: EstimatorId::CeU,
                rows: &[
                    (10, 0.00118, 0.01473),
                    (20, 0.00098, 0.00722),
                    (30, 0.00050, 0.00491),
                    (40, 0.00038, 0.00356),
                    (50, 0.00037, 0.00297),
                ],
            },
            PrintedBlock {
                distribution: dist_exp1(),
                estimator: EstimatorId::CePlugin,
                rows: &[
                    (10, 0.03877, 0.01455),
                    (20, 0.01938, 0.00719),
                    (30, 0.00861, 0.00488),
                    (40, 0.01283, 0.00357),
                    (50, 0.02541, 0.00295),
                ],
            },
            PrintedBlock {
                distribution: dist_gamma21(),
                estimator: EstimatorId::CeU,
                rows: &[
                    (10, 0.00074, 0.02564),
                    (20, 0.00052, 0.01243),
                    (30, 0.00036, 0.00827),
                    (40, 0.00032, 0.00649),
                    (50, 0.00028, 0.00493),
                ],
            },
            PrintedBlock {
                distribution: dist_gamma21(),
                estimator: EstimatorId::CePlugin,
                rows: &[
                    (10, 0.13489, 0.04161),
                    (20, 0.08878, 0.02026),
                    (30, 0.06992, 0.01344),
                    (40, 0.05864, 0.01025),
                    (50, 0.05128, 0.00783),
                ],
            },
            PrintedBlock {
                distribution: dist_weibull21(),
                estimator: EstimatorId::CeU,
                rows: &[
                    (10, 0.00098, 0.00845),
                    (20, 0.00092, 0.00419),
                    (30, 0.00031, 0.00281),
                    (40, 0.00013, 0.00210),
                    (50, 0.00001, 0.00165),
                ],
            },
            PrintedBlock {
                distribution: dist_weibull21(),
                estimator: EstimatorId::CePlugin,
                rows: &[
                    (10, 0.15349, 0.03316),
                    (20, 0.10558, 0.01656),
                    (30, 0.08592, 0.01120),
                    (40, 0.07303, 0.00828),
                    (50, 0.06441, 0.00655),
                ],
            },
            PrintedBlock {
                distribution: dist_lognormal01(),
                estimator: EstimatorId::CeU,
                rows: &[
                    (10, 0.00764, 0.35391),
                    (20, 0.00430, 0.18710),
                    (30, 0.00385, 0.12033),
                    (40, 0.00064, 0.08892),
                    (50, 0.00044, 0.07305),
                ],
            },
            PrintedBlock {
                distribution: dist_lognormal01(),
                estimator: EstimatorId::CePlugin,
                rows: &[
                    (10, 0.16508, 0.34391),
                    (20, 0.10203, 0.18699),
                    (30, 0.08764, 0.12357),
                    (40, 0.07814, 0.09248),
                    (50, 0.06620, 0.07591),
                ],
            },
        ],
        TableId::Table4 => vec![
            PrintedBlock {
                distribution: dist_exp1(),
                estimator: EstimatorId::CeIpcw,
                rows: &[
                    (50, 0.19183, 0.04122),
                    (75, 0.19056, 0.03923),
                    (100, 0.19048, 0.03834),
                    (200, 0.18831, 0.03646),
                ],
            },
            PrintedBlock {
                distribution: dist_gamma22(),
                estimator: EstimatorId::CeIpcw,
                rows: &[
                    (50, 0.28382, 0.09566),
                    (75, 0.28137, 0.08928),
                    (100, 0.27948, 0.08552),
                    (200, 0.27659, 0.08010),
                ],
            },
            PrintedBlock {
                distribution: dist_weibull21(),
                estimator: EstimatorId::CeIpcw,
                rows: &[
                    (50, 0.11409, 0.02219),
                    (75, 0.10925, 0.01876),
                    (100, 0.10690, 0.01792),
                    (200, 0.10540, 0.01546),
                ],
            },
            PrintedBlock {
                distribution: dist_lognormal01(),
                estimator: EstimatorId::CeIpcw,
                rows: &[
                    (50, 0.00712, 0.04865),
                    (75, 0.00639, 0.03171),
                    (100, 0.00447, 0.02334),
                    (200, 0.00227, 0.01142),
                ],
            },
        ],
    }
}

fn table_note(table: TableId) -> &'static str {
    match table {
        TableId::Table1 => {
            "T1 cells are gated on unbiasedness and on the exact finite-sample variance; \
             plug-in cells are informational except exp(1) n=10, whose printed bias \
             magnitude is a reproduction target."
        }
        TableId::Table2 => {
            "Informational only: the published censored biases stay near 0.08-0.26 at \
             every n, which a consistent IPCW estimator does not reproduce. Consistency \
             is verified separately via oracle weights and the bias trend in n."
        }
        TableId::Table3 => {
            "T2 cells are gated on unbiasedness; the published MSE column is about a \
             quarter of the exact U-statistic variance, so printed MSE comparisons are \
             informational."
        }
        TableId::Table4 => {
            "Informational only, as for the other censored table; the gamma block uses \
             the (2,2) parameterization printed in the table header."
        }
    }
}

/// Reruns a published table's simulation design and lays the reproduced
/// bias/MSE next to the printed values with agreement flags.
pub fn reproduce_table(
    table: TableId,
    replications: usize,
    master_seed: u64,
) -> Result<TableReproduction> {
    let blocks = printed_blocks(table);
    let censoring = match table {
        TableId::Table1 | TableId::Table3 => None,
        TableId::Table2 | TableId::Table4 => Some(0.2),
    };

    let mut cells = Vec::new();
    let mut processed: Vec<(Distribution, Vec<EstimatorId>)> = Vec::new();
    for block in &blocks {
        if let Some(entry) = processed
            .iter_mut()
            .find(|(d, _)| *d == block.distribution)
        {
            entry.1.push(block.estimator);
        } else {
            processed.push((block.distribution, vec![block.estimator]));
        }
    }

    for (dist_idx, (distribution, estimators)) in processed.iter().enumerate() {
        let n_values: Vec<usize> = blocks
            .iter()
            .find(|b| b.distribution == *distribution)
            .expect("block exists")
            .rows
            .iter()
            .map(|r| r.0)
            .collect();
        let spec = ExperimentSpec {
            distribution: *distribution,
            n_values: n_values.clone(),
            replications,
            estimators: estimators.clone(),
            censoring,
            // Separate lanes per distribution so streams never collide.
            master_seed: master_seed.wrapping_add(dist_idx as u64),
        };
        let report = run_experiment(&spec)?;

        // Exact finite-sample variances, one set of constants per kernel.
        let mut theory_var: Vec<Vec<Option<f64>>> = Vec::new();
        for e in estimators {
            let gated = matches!(e, EstimatorId::CreU | EstimatorId::CeU);
            let mut per_n = Vec::new();
            for &n in &n_values {
                per_n.push(if gated {
                    Some(finite_sample_estimator_variance(
                        distribution,
                        e.kernel(),
                        n,
                    )?)
                } else {
                    None
                });
            }
            theory_var.push(per_n);
        }

        for cell in &report.cells {
            let block = blocks
                .iter()
                .find(|b| b.distribution == *distribution && b.estimator == cell.estimator)
                .expect("printed block exists");
            let (_, printed_bias, printed_mse) = *block
                .rows
                .iter()
                .find(|r| r.0 == cell.n)
                .expect("printed row exists");
            let est_idx = estimators
                .iter()
                .position(|e| *e == cell.estimator)
                .expect("estimator index");
            let n_idx = n_values
                .iter()
                .position(|n| *n == cell.n)
                .expect("n index");
            let theory = theory_var[est_idx][n_idx];

            let unbiasedness_ok = theory.map(|_| cell.bias.abs() <= 3.0 * cell.mc_se_bias);
            let mse_vs_theory_ok = theory.map(|v| (cell.mse - v).abs() <= 0.15 * v);
            let bias_tol = (0.25 * printed_bias).max(4.0 * cell.mc_se_bias);
            let printed_bias_agrees = (cell.bias.abs() - printed_bias).abs() <= bias_tol;
            let printed_mse_agrees = (cell.mse - printed_mse).abs() <= 0.25 * printed_mse;
            let gated_plugin = table == TableId::Table1
                && cell.estimator == EstimatorId::CrePlugin
                && *distribution == dist_exp1()
                && cell.n == 10;
            let informational_only = theory.is_none() && !gated_plugin;

            cells.push(TableCell {
                distribution: distribution.label(),
                estimator: cell.estimator,
                n: cell.n,
                bias: cell.bias,
                mse: cell.mse,
                mc_se_bias: cell.mc_se_bias,
                n_degenerate: cell.n_degenerate,
                printed_bias,
                printed_mse,
                unbiasedness_ok,
                mse_vs_theory_ok,
                printed_bias_agrees,
                printed_mse_agrees,
                informational_only,
            });
        }
    }

    Ok(TableReproduction {
        table,
        replications,
        master_seed,
        note: table_note(table).to_string(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> Distribution {
        Distribution::Exponential { rate: 1.0 }
    }

    #[test]
    fn spec_validation_rejects_bad_inputs() {
        let ok = ExperimentSpec {
            distribution: exp1(),
            n_values: vec![10],
            replications: 100,
            estimators: vec![EstimatorId::CreU],
            censoring: None,
            master_seed: 1,
        };
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.replications = 99;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.n_values = vec![10, 1];
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.estimators = vec![EstimatorId::CreIpcw];
        assert!(bad.validate().is_err());
        bad.censoring = Some(0.2);
        assert!(bad.validate().is_ok());
        bad.censoring = Some(1.2);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let d = dist_gamma21();
        let mut a = derive_rng(9, Purpose::Lifetimes, 0, 0);
        let mut b = derive_rng(9, Purpose::Lifetimes, 0, 0);
        assert_eq!(
            sample_distribution(&d, 50, &mut a).values(),
            sample_distribution(&d, 50, &mut b).values()
        );
    }

    #[test]
    fn law_of_large_numbers_gates() {
        let n = 1_000_000;
        let cases = [
            (exp1(), 1.0, 1.0),
            (dist_gamma21(), 2.0, 2.0),
            (dist_weibull21(), 0.886_226_925_452_758, 0.214_601_836_602_552),
            (dist_lognormal01(), 1.648_721_270_700_128, 4.670_774_270_471_604),
        ];
        for (lane, (d, mean, var)) in cases.iter().enumerate() {
            let mut rng = derive_rng(2024, Purpose::Lifetimes, lane as u64, 0);
            let s = sample_distribution(d, n, &mut rng);
            let m = csum(s.values().iter().copied()) / n as f64;
            let se = (var / n as f64).sqrt();
            assert!(
                (m - mean).abs() < 4.0 * se,
                "{}: sample mean {m} vs {mean} (4se = {})",
                d.label(),
                4.0 * se
            );
        }
    }

    #[test]
    fn gamma_sample_variance_matches() {
        let n = 1_000_000;
        let mut rng = derive_rng(77, Purpose::Lifetimes, 0, 0);
        let s = sample_distribution(&dist_gamma21(), n, &mut rng);
        let mean = csum(s.values().iter().copied()) / n as f64;
        let var = csum(s.values().iter().map(|v| (v - mean) * (v - mean))) / (n as f64 - 1.0);
        // Var = shape / rate^2 = 2; MC SE of the variance is ~sqrt(20/n).
        assert!((var - 2.0).abs() < 4.0 * (20.0_f64 / n as f64).sqrt());
    }

    #[test]
    fn fractional_shape_gamma_moments() {
        let d = Distribution::Gamma {
            shape: 0.7,
            rate: 1.5,
        };
        let n = 400_000;
        let mut rng = derive_rng(31, Purpose::Lifetimes, 0, 0);
        let s = sample_distribution(&d, n, &mut rng);
        let m = csum(s.values().iter().copied()) / n as f64;
        let expected = 0.7 / 1.5;
        let se = (0.7 / (1.5 * 1.5) / n as f64).sqrt();
        assert!((m - expected).abs() < 4.0 * se);
        assert!(s.values().iter().all(|v| *v > 0.0));
    }

    #[test]
    fn report_is_identical_across_thread_counts() {
        let spec = ExperimentSpec {
            distribution: exp1(),
            n_values: vec![10, 25],
            replications: 300,
            estimators: vec![EstimatorId::CreU, EstimatorId::CreIpcw, EstimatorId::CreIpcwOracle],
            censoring: Some(0.2),
            master_seed: 42,
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&spec).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_experiment(&spec).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn report_mse_dominates_bias_squared() {
        let spec = ExperimentSpec {
            distribution: dist_weibull21(),
            n_values: vec![15],
            replications: 500,
            estimators: vec![EstimatorId::CreU, EstimatorId::CeU, EstimatorId::CrePlugin],
            censoring: None,
            master_seed: 7,
        };
        let report = run_experiment(&spec).unwrap();
        for cell in &report.cells {
            assert!(cell.mse >= cell.bias * cell.bias - 1e-12);
            assert_eq!(cell.n_degenerate, 0);
        }
    }

    #[test]
    fn calibrated_rate_lands_in_report() {
        let spec = ExperimentSpec {
            distribution: exp1(),
            n_values: vec![40],
            replications: 400,
            estimators: vec![EstimatorId::CreIpcw],
            censoring: Some(0.2),
            master_seed: 11,
        };
        let report = run_experiment(&spec).unwrap();
        let rate = report.censoring_rate.unwrap();
        assert!((rate - 0.25).abs() < 1e-6);
        let frac = report.realized_censored_fraction.unwrap();
        assert!((frac - 0.2).abs() < 0.02, "realized fraction {frac}");
    }

    #[test]
    fn estimator_names_round_trip() {
        for e in [
            EstimatorId::CreU,
            EstimatorId::CeU,
            EstimatorId::CrePlugin,
            EstimatorId::CePlugin,
            EstimatorId::CreIpcw,
            EstimatorId::CeIpcw,
            EstimatorId::CreIpcwOracle,
            EstimatorId::CeIpcwOracle,
        ] {
            assert_eq!(e.as_str().parse::<EstimatorId>().unwrap(), e);
        }
        assert!("cre-smoothed".parse::<EstimatorId>().is_err());
    }

    #[test]
    fn table_ids_parse() {
        assert_eq!("1".parse::<TableId>().unwrap(), TableId::Table1);
        assert_eq!("table4".parse::<TableId>().unwrap(), TableId::Table4);
        assert!("5".parse::<TableId>().is_err());
    }
}
