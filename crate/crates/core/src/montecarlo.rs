//! Monte Carlo oracle for the transfer protocol.
//!
//! Every state and operation in the protocol is Gaussian and linear in the
//! quadratures, so the output covariance can be estimated by sampling classical
//! quadrature realizations (shot noise, discording signals, EPR correlations,
//! loss vacua) and pushing them through the photocurrent relations directly,
//! without the covariance engine.
//!
//! Random numbers: ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)`. Samples are split into fixed chunks of
//! [`CHUNK_SAMPLES`]; chunk `k` uses stream `k` of that generator. Chunk sums
//! are merged in chunk order, so the estimate is bit-identical for any thread
//! count.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::gaussian::TwoModeCovariance;
use crate::protocol::{transfer_via_engine, Ancilla, TransferScenario};

pub const MIN_SAMPLES: usize = 1000;
pub const CHUNK_SAMPLES: usize = 1 << 14;
/// Acceptance band, in standard errors, used by [`validate_against_engine`].
pub const ACCEPT_SIGMAS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledCovariance {
    pub estimate: TwoModeCovariance,
    pub standard_errors: Matrix4<f64>,
    pub n_samples: usize,
    pub seed: u64,
}

impl SampledCovariance {
    /// Largest `|estimate − reference| / standard error` over all entries.
    pub fn max_deviation_in_se(&self, reference: &TwoModeCovariance) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let diff = (self.estimate.matrix()[(i, j)] - reference.matrix()[(i, j)]).abs();
                let se = self.standard_errors[(i, j)];
                let z = if se > 0.0 {
                    diff / se
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
            }
        }
        worst
    }
}

/// Running sums of `x_i x_j` and `(x_i x_j)²` over the upper triangle.
#[derive(Clone, Copy, Default)]
struct Moments {
    first: [[f64; 4]; 4],
    second: [[f64; 4]; 4],
    count: usize,
}

impl Moments {
    fn push(&mut self, x: &[f64; 4]) {
        for i in 0..4 {
            for j in i..4 {
                let p = x[i] * x[j];
                self.first[i][j] += p;
                self.second[i][j] += p * p;
            }
        }
        self.count += 1;
    }

    fn merge(&mut self, other: &Moments) {
        for i in 0..4 {
            for j in i..4 {
                self.first[i][j] += other.first[i][j];
                self.second[i][j] += other.second[i][j];
            }
        }
        self.count += other.count;
    }
}

struct Sampler {
    sqrt_va: f64,
    ancilla: Ancilla,
    sqrt_ve: f64,
    epr_s: f64,
    root2_gain: f64,
    /// `(√η, √(1−η))` for a, e, f, d'.
    loss: [(f64, f64); 4],
}

impl Sampler {
    fn new(s: &TransferScenario) -> Self {
        let (sqrt_ve, epr_s) = match s.ancilla {
            Ancilla::Epr { r } => ((2.0 * r).cosh().sqrt(), (2.0 * r).sinh()),
            Ancilla::Discordant { .. } => (1.0, 0.0),
        };
        let e = s.efficiencies;
        let split = |eta: f64| (eta.sqrt(), (1.0 - eta).sqrt());
        Self {
            sqrt_va: s.v_a.sqrt(),
            ancilla: s.ancilla,
            sqrt_ve,
            epr_s,
            root2_gain: SQRT_2 * s.gain,
            loss: [split(e.eta_a), split(e.eta_e), split(e.eta_f), split(e.eta_d)],
        }
    }

    /// One realization of `(X_a, Y_a, X_d', Y_d')`.
    fn draw(&self, rng: &mut ChaCha20Rng) -> [f64; 4] {
        let mut z = || -> f64 { rng.sample(StandardNormal) };

        // Alice: coherent shot noise plus a common signal, anti-correlated in Y.
        let (sx, sy) = (self.sqrt_va * z(), self.sqrt_va * z());
        let (mut xa, mut ya) = (z() + sx, z() + sy);
        let (xb, yb) = (z() + sx, z() - sy);

        let (xc, yc, xd, yd) = match self.ancilla {
            Ancilla::Discordant { v_b } => {
                let sb = v_b.sqrt();
                let (tx, ty) = (sb * z(), sb * z());
                (z() + tx, z() + ty, z() + tx, z() - ty)
            }
            Ancilla::Epr { .. } => {
                // Cholesky factor of [[V_E, ±s], [±s, V_E]] with V_E² − s² = 1.
                let (z1, z2, z3, z4) = (z(), z(), z(), z());
                (
                    self.sqrt_ve * z1,
                    self.sqrt_ve * z3,
                    (self.epr_s * z1 + z2) / self.sqrt_ve,
                    (-self.epr_s * z3 + z4) / self.sqrt_ve,
                )
            }
        };

        let [la, le, lf, ld] = self.loss;
        xa = la.0 * xa + la.1 * z();
        ya = la.0 * ya + la.1 * z();
        let i1 = lf.0 * (xb - xc) * FRAC_1_SQRT_2 + lf.1 * z();
        let i2 = le.0 * (yb + yc) * FRAC_1_SQRT_2 + le.1 * z();
        let xd_out = ld.0 * (xd + self.root2_gain * i1) + ld.1 * z();
        let yd_out = ld.0 * (yd + self.root2_gain * i2) + ld.1 * z();
        [xa, ya, xd_out, yd_out]
    }
}

pub fn sample_transfer(scenario: &TransferScenario, n_samples: usize, seed: u64) -> Result<SampledCovariance> {
    sample_transfer_with(scenario, n_samples, seed, Execution::default())
}

pub fn sample_transfer_with(
    scenario: &TransferScenario,
    n_samples: usize,
    seed: u64,
    execution: Execution,
) -> Result<SampledCovariance> {
    scenario.validate()?;
    if n_samples < MIN_SAMPLES {
        return Err(invalid(format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let sampler = Sampler::new(scenario);
    let chunks = n_samples.div_ceil(CHUNK_SAMPLES);
    let partials = execution.map_range(chunks, |k| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let len = CHUNK_SAMPLES.min(n_samples - k * CHUNK_SAMPLES);
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(&sampler.draw(&mut rng));
        }
        m
    });
    let mut total = Moments::default();
    for p in &partials {
        total.merge(p);
    }

    let n = total.count as f64;
    let mut est = Matrix4::zeros();
    let mut se = Matrix4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let mean = total.first[i][j] / n;
            let var = (total.second[i][j] / n - mean * mean).max(0.0);
            est[(i, j)] = mean;
            est[(j, i)] = mean;
            se[(i, j)] = (var / n).sqrt();
            se[(j, i)] = se[(i, j)];
        }
    }
    Ok(SampledCovariance {
        estimate: TwoModeCovariance::from_matrix(est)?,
        standard_errors: se,
        n_samples,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub sampled: SampledCovariance,
    pub reference: TwoModeCovariance,
    pub max_deviation_se: f64,
    pub passed: bool,
}

/// Compares a seeded sample against the engine output for `scenario`.
///
/// `gain_offset` is added to the gain used by the sampler only; a nonzero value
/// is the negative control and must make the comparison fail.
pub fn validate_against_engine(
    scenario: &TransferScenario,
    n_samples: usize,
    seed: u64,
    gain_offset: f64,
    execution: Execution,
) -> Result<ValidationReport> {
    let reference = transfer_via_engine(scenario)?;
    let sampled_scenario = scenario.with_gain(scenario.gain + gain_offset);
    let sampled = sample_transfer_with(&sampled_scenario, n_samples, seed, execution)?;
    let max_deviation_se = sampled.max_deviation_in_se(&reference);
    Ok(ValidationReport {
        passed: max_deviation_se <= ACCEPT_SIGMAS,
        sampled,
        reference,
        max_deviation_se,
    })
}
