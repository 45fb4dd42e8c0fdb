//! Ground-truth machinery for the test distributions: closed-form and
//! quadrature values of the extropy measures, brute-force pair-kernel
//! references, U-statistic variance constants, and calibration of the
//! exponential censoring rate to a target censoring fraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::sample::Sample;
use crate::special::{gamma_p, gamma_q, ln_gamma, normal_cdf, normal_quantile, normal_survival};
use crate::sum::Accumulator;

/// Lifetime distribution families used throughout the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Lognormal { mu: f64, sigma: f64 },
}

impl Distribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        if rate > 0.0 && rate.is_finite() {
            Ok(Distribution::Exponential { rate })
        } else {
            Err(Error::InvalidSpec(format!("exponential rate {rate} must be positive")))
        }
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        if shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite() {
            Ok(Distribution::Gamma { shape, rate })
        } else {
            Err(Error::InvalidSpec(format!(
                "gamma parameters ({shape}, {rate}) must be positive"
            )))
        }
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        if shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite() {
            Ok(Distribution::Weibull { shape, scale })
        } else {
            Err(Error::InvalidSpec(format!(
                "weibull parameters ({shape}, {scale}) must be positive"
            )))
        }
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() && mu.is_finite() {
            Ok(Distribution::Lognormal { mu, sigma })
        } else {
            Err(Error::InvalidSpec(format!(
                "lognormal sigma {sigma} must be positive and mu {mu} finite"
            )))
        }
    }

    /// Short label like `exp(1)` or `gamma(2;1)`. Parameters are joined
    /// with a semicolon so labels stay a single CSV field.
    pub fn label(&self) -> String {
        match self {
            Distribution::Exponential { rate } => format!("exp({rate})"),
            Distribution::Gamma { shape, rate } => format!("gamma({shape};{rate})"),
            Distribution::Weibull { shape, scale } => format!("weibull({shape};{scale})"),
            Distribution::Lognormal { mu, sigma } => format!("lognormal({mu};{sigma})"),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            Distribution::Exponential { rate } => -(-rate * x).exp_m1(),
            Distribution::Gamma { shape, rate } => gamma_p(*shape, rate * x),
            Distribution::Weibull { shape, scale } => -(-(x / scale).powf(*shape)).exp_m1(),
            Distribution::Lognormal { mu, sigma } => normal_cdf((x.ln() - mu) / sigma),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self {
            Distribution::Exponential { rate } => (-rate * x).exp(),
            Distribution::Gamma { shape, rate } => gamma_q(*shape, rate * x),
            Distribution::Weibull { shape, scale } => (-(x / scale).powf(*shape)).exp(),
            Distribution::Lognormal { mu, sigma } => normal_survival((x.ln() - mu) / sigma),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            Distribution::Exponential { rate } => rate * (-rate * x).exp(),
            Distribution::Gamma { shape, rate } => {
                (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(*shape)).exp()
            }
            Distribution::Weibull { shape, scale } => {
                let z = x / scale;
                (shape / scale) * z.powf(shape - 1.0) * (-z.powf(*shape)).exp()
            }
            Distribution::Lognormal { mu, sigma } => {
                let z = (x.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
        }
    }

    /// Inverse CDF. `p = 0` maps to 0; `p` must be below 1.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!((0.0..1.0).contains(&p), "quantile needs p in [0, 1)");
        if p == 0.0 {
            return 0.0;
        }
        match self {
            Distribution::Exponential { rate } => -(-p).ln_1p() / rate,
            Distribution::Weibull { shape, scale } => scale * (-(-p).ln_1p()).powf(1.0 / shape),
            Distribution::Lognormal { mu, sigma } => (mu + sigma * normal_quantile(p)).exp(),
            Distribution::Gamma { .. } => {
                // No closed form: expand an upper bracket, then bisect.
                let mut hi = 1.0;
                while self.cdf(hi) < p {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return hi;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-14 * hi.max(1.0) {
                        break;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Exponential { rate } => 1.0 / rate,
            Distribution::Gamma { shape, rate } => shape / rate,
            Distribution::Weibull { shape, scale } => {
                scale * (ln_gamma(1.0 + 1.0 / shape)).exp()
            }
            Distribution::Lognormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
        }
    }

    /// Upper integration limit: the `1 - 1e-12` quantile, extended until
    /// the integrand bound `1 - F^2 < 1e-14` also holds.
    fn truncation_point(&self) -> f64 {
        let mut u = self.quantile(1.0 - 1e-12).max(1e-6);
        for _ in 0..64 {
            let f = self.cdf(u);
            if (1.0 - f) * (1.0 + f) < 1e-14 {
                break;
            }
            u *= 1.5;
        }
        u
    }
}

/// Cumulative residual extropy `-(1/2) int_0^inf survival^2`, by closed
/// form where one exists.
pub fn true_cre(d: &Distribution) -> Result<f64> {
    match d {
        Distribution::Exponential { rate } => Ok(-1.0 / (4.0 * rate)),
        Distribution::Weibull { shape, scale } => {
            // int exp(-2 (x/scale)^shape) dx = scale * 2^(-1/shape) * Gamma(1 + 1/shape)
            let g = (ln_gamma(1.0 + 1.0 / shape)).exp();
            Ok(-0.5 * scale * 2.0_f64.powf(-1.0 / shape) * g)
        }
        _ => true_cre_quadrature(d),
    }
}

/// CRE by adaptive quadrature regardless of closed-form availability.
pub fn true_cre_quadrature(d: &Distribution) -> Result<f64> {
    let upper = d.truncation_point();
    let integral = integrate(
        |x| {
            let s = d.survival(x);
            s * s
        },
        0.0,
        upper,
        1e-10,
    )?;
    Ok(-0.5 * integral)
}

/// Negative cumulative extropy `(1/2) int_0^inf (1 - F^2)`, closed form
/// where available.
pub fn true_ce(d: &Distribution) -> Result<f64> {
    match d {
        Distribution::Exponential { rate } => Ok(3.0 / (4.0 * rate)),
        Distribution::Weibull { shape, scale } => {
            let g = (ln_gamma(1.0 + 1.0 / shape)).exp();
            Ok(0.5 * scale * g * (2.0 - 2.0_f64.powf(-1.0 / shape)))
        }
        _ => true_ce_quadrature(d),
    }
}

/// CE by adaptive quadrature regardless of closed-form availability.
pub fn true_ce_quadrature(d: &Distribution) -> Result<f64> {
    let upper = d.truncation_point();
    let integral = integrate(
        |x| {
            let f = d.cdf(x);
            (1.0 - f) * (1.0 + f)
        },
        0.0,
        upper,
        1e-10,
    )?;
    Ok(0.5 * integral)
}

/// True value of a named extropy measure (CRE for min-kernel estimators,
/// CE for max-kernel ones).
pub fn truth_for_kernel(d: &Distribution, kernel: PairwiseKernel) -> Result<f64> {
    match kernel {
        PairwiseKernel::Min => true_cre(d),
        PairwiseKernel::Max => true_ce(d),
        _ => Err(Error::InvalidSpec(
            "no extropy truth for squared kernels".into(),
        )),
    }
}

/// Symmetric degree-2 kernels used by the brute-force reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairwiseKernel {
    Min,
    Max,
    MinSq,
    MaxSq,
}

impl PairwiseKernel {
    #[inline]
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        match self {
            PairwiseKernel::Min => a.min(b),
            PairwiseKernel::Max => a.max(b),
            PairwiseKernel::MinSq => {
                let m = a.min(b);
                m * m
            }
            PairwiseKernel::MaxSq => {
                let m = a.max(b);
                m * m
            }
        }
    }
}

/// Brute-force `O(n^2)` mean of a pair kernel over all unordered pairs.
/// This is the reference route the fast order-statistic forms are tested
/// against; it never shares code with them.
pub fn naive_pairwise_oracle(s: &Sample, kernel: PairwiseKernel) -> Result<f64> {
    let v = s.values();
    if v.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: v.len(),
        });
    }
    let mut acc = Accumulator::new();
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            acc.add(kernel.eval(v[i], v[j]));
        }
    }
    let pairs = 0.5 * (v.len() as f64) * (v.len() as f64 - 1.0);
    Ok(acc.total() / pairs)
}

/// Probability that a lifetime from `d` outlives an exponential censoring
/// time with the given rate, `P(T > C)`.
pub fn censoring_probability(d: &Distribution, rate: f64) -> Result<f64> {
    let exp_trunc = 30.0 / rate;
    let dist_trunc = d.quantile(1.0 - 1e-13);
    let upper = exp_trunc.min(dist_trunc.max(1e-6));
    integrate(
        |c| d.survival(c) * rate * (-rate * c).exp(),
        0.0,
        upper,
        1e-10,
    )
}

/// Exponential censoring rate giving `P(T > C) = target`, by bracketing
/// bisection on `log(rate)`.
pub fn calibrate_censoring_rate(d: &Distribution, target: f64) -> Result<f64> {
    if !(0.0 < target && target < 1.0) {
        return Err(Error::Calibration(format!(
            "target {target} must lie strictly between 0 and 1"
        )));
    }
    let mut lo = (1e-8_f64).ln();
    let mut hi = (1e8_f64).ln();
    // P(T > C) is increasing in the censoring rate.
    let p_lo = censoring_probability(d, lo.exp())?;
    let p_hi = censoring_probability(d, hi.exp())?;
    if p_lo > target || p_hi < target {
        return Err(Error::Calibration(format!(
            "target {target} not bracketed in rate range [1e-8, 1e8] (got [{p_lo:.3e}, {p_hi:.3e}])"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let p = censoring_probability(d, mid.exp())?;
        if (p - target).abs() < 1e-8 {
            return Ok(mid.exp());
        }
        if p < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Calibration(format!(
        "bisection did not reach |P - {target}| < 1e-8"
    )))
}

/// First two projection-variance constants of the min/max pair kernels:
/// `zeta1 = Var(h1(X))` and `zeta2 = Var(h(X1, X2))`, computed by
/// quadrature.
pub fn pair_kernel_variance(d: &Distribution, kernel: PairwiseKernel) -> Result<(f64, f64)> {
    let upper = d.truncation_point();
    let mean = d.mean();

    // Residual survival integral R(x) = int_x^U survival. h1_min = mean -
    // R(x); h1_max = x + R(x).
    let residual = |x: f64| integrate(|y| d.survival(y), x, upper, 1e-11);

    let e_min = integrate(
        |x| {
            let s = d.survival(x);
            s * s
        },
        0.0,
        upper,
        1e-11,
    )?;
    let e_min_sq = integrate(
        |x| {
            let s = d.survival(x);
            2.0 * x * s * s
        },
        0.0,
        upper,
        1e-11,
    )?;
    let e_x_sq = integrate(|x| 2.0 * x * d.survival(x), 0.0, upper, 1e-11)?;

    match kernel {
        PairwiseKernel::Min => {
            let zeta2 = e_min_sq - e_min * e_min;
            let e_h1 = e_min;
            let e_h1_sq = integrate(
                |x| {
                    let h1 = mean - residual(x).unwrap_or(f64::NAN);
                    h1 * h1 * d.pdf(x)
                },
                0.0,
                upper,
                1e-9,
            )?;
            Ok((e_h1_sq - e_h1 * e_h1, zeta2))
        }
        PairwiseKernel::Max => {
            let e_max = 2.0 * mean - e_min;
            let e_max_sq = 2.0 * e_x_sq - e_min_sq;
            let zeta2 = e_max_sq - e_max * e_max;
            let e_h1_sq = integrate(
                |x| {
                    let h1 = x + residual(x).unwrap_or(f64::NAN);
                    h1 * h1 * d.pdf(x)
                },
                0.0,
                upper,
                1e-9,
            )?;
            Ok((e_h1_sq - e_max * e_max, zeta2))
        }
        _ => Err(Error::InvalidSpec(
            "kernel variance constants cover min and max only".into(),
        )),
    }
}

/// Exact finite-sample variance of the extropy U-statistics (`T1` for the
/// min kernel, `T2` for max): the classical two-sample-kernel formula
/// scaled by the 1/2 in front of the kernel mean.
pub fn finite_sample_estimator_variance(
    d: &Distribution,
    kernel: PairwiseKernel,
    n: usize,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let (zeta1, zeta2) = pair_kernel_variance(d, kernel)?;
    let nf = n as f64;
    let var_kernel_mean = 2.0 / (nf * (nf - 1.0)) * (2.0 * (nf - 2.0) * zeta1 + zeta2);
    Ok(0.25 * var_kernel_mean)
}
