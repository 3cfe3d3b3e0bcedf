//! Online convergence detection.
//!
//! Sampler outputs are folded into running moments; the stream is declared
//! converged once the normal-approximation half-width of the confidence
//! interval, relative to the mean, drops to `ε`:
//!
//! ```text
//! ε̂ = Φ⁻¹(1 − δ/2) · σ / √N / μ,   σ² = (1/N)·Σx² − μ²
//! ```

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};

/// Outputs required before the first check.
pub const DEFAULT_MIN_SAMPLES: u64 = 64;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Compensated) {
        self.add(other.sum);
        self.add(other.carry);
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Streaming `N`, `Σx`, `Σx²` of sampler outputs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConvergenceStats {
    n: u64,
    nonzero: u64,
    sum: Compensated,
    sum_sq: Compensated,
}

impl ConvergenceStats {
    pub fn new() -> ConvergenceStats {
        ConvergenceStats::default()
    }

    pub fn from_slice(xs: &[f64]) -> ConvergenceStats {
        let mut s = ConvergenceStats::new();
        s.update(xs);
        s
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        debug_assert!(x.is_finite() && x >= 0.0, "sampler output {x}");
        self.n += 1;
        self.nonzero += (x != 0.0) as u64;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn update(&mut self, batch: &[f64]) {
        for &x in batch {
            self.push(x);
        }
    }

    /// Combines two disjoint streams.
    pub fn merge(&mut self, other: &ConvergenceStats) {
        self.n += other.n;
        self.nonzero += other.nonzero;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn nonzero(&self) -> u64 {
        self.nonzero
    }

    pub fn sum(&self) -> f64 {
        self.sum.value()
    }

    pub fn sum_sq(&self) -> f64 {
        self.sum_sq.value()
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum() / self.n as f64
        }
    }

    /// Population variance, clamped at zero.
    pub fn variance(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let mu = self.mean();
        (self.sum_sq() / self.n as f64 - mu * mu).max(0.0)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Relative half-width `z·σ/(√N·μ)`; infinite when the mean is zero.
    pub fn estimated_error(&self, z: f64) -> f64 {
        let mu = self.mean();
        if self.n == 0 || mu <= 0.0 {
            return f64::INFINITY;
        }
        z * self.std_dev() / (self.n as f64).sqrt() / mu
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Check {
    pub converged: bool,
    /// `+∞` until the mean is positive.
    pub eps_hat: f64,
    pub estimate: f64,
    /// Converged only because every output so far was zero.
    pub all_zero: bool,
}

/// Stopping rule for a fixed `(ε, δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detector {
    pub epsilon: f64,
    pub delta: f64,
    z: f64,
    pub min_samples: u64,
    /// All-zero streams are accepted as a zero count at this length.
    pub zero_cutoff: u64,
}

impl Detector {
    pub fn new(epsilon: f64, delta: f64) -> Result<Detector> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon {epsilon} must lie in (0, 1)")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!("delta {delta} must lie in (0, 1)")));
        }
        Ok(Detector {
            epsilon,
            delta,
            z: inv_norm_cdf(1.0 - delta / 2.0)?,
            min_samples: DEFAULT_MIN_SAMPLES,
            zero_cutoff: (1e6 / (epsilon * epsilon)).ceil() as u64,
        })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn check(&self, stats: &ConvergenceStats) -> Check {
        let estimate = stats.mean();
        if stats.n() < self.min_samples {
            return Check {
                converged: false,
                eps_hat: f64::INFINITY,
                estimate,
                all_zero: false,
            };
        }
        if stats.nonzero() == 0 {
            let done = stats.n() >= self.zero_cutoff;
            return Check {
                converged: done,
                eps_hat: f64::INFINITY,
                estimate: 0.0,
                all_zero: done,
            };
        }
        let eps_hat = stats.estimated_error(self.z);
        Check {
            converged: eps_hat <= self.epsilon,
            eps_hat,
            estimate,
            all_zero: false,
        }
    }
}

/// One-shot form of [`Detector::check`].
pub fn converged(stats: &ConvergenceStats, epsilon: f64, delta: f64) -> Result<Check> {
    Ok(Detector::new(epsilon, delta)?.check(stats))
}

/// Inverse standard normal CDF: rational approximation followed by one
/// Halley step against the complementary error function.
pub fn inv_norm_cdf(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(q));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const LOW: f64 = 0.02425;

    let tail = |p: f64| {
        let r = (-2.0 * p.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    let x = if q < LOW {
        tail(q)
    } else if q > 1.0 - LOW {
        -tail(1.0 - q)
    } else {
        let s = q - 0.5;
        let r = s * s;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * s
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // Halley refinement; residual taken on the smaller tail for accuracy
    let e = if q > 0.5 {
        (1.0 - q) - 0.5 * libm::erfc(x / SQRT_2)
    } else {
        0.5 * libm::erfc(-x / SQRT_2) - q
    };
    let u = e * (2.0 * PI).sqrt() * (x * x / 2.0).exp();
    Ok(x - u / (1.0 + x * u / 2.0))
}
