//! Time-domain check of the current correlator.
//!
//! Integrates the coupled circuit equations
//!
//! ```text
//! L di1/dt + M di2/dt + R i1 = E1(t)
//! M di1/dt + L di2/dt + R i2 = E2(t)
//! ```
//!
//! driven by classical Johnson noise. With the Fourier convention
//! `g(w) = int dt e^{iwt} f(t)`, a spectrum `<E(w) E*(w')> = 4 pi k_B T R delta(w - w')`
//! (the `E -> 1` limit) corresponds to `<E(t) E(t')> = 2 k_B T R delta(t - t')`:
//! inverting both transforms gives `(1/(2 pi)^2) int dw 4 pi kT R e^{-iw(t-t')}`
//! `= 2 kT R delta(t - t')`. Each Euler-Maruyama step therefore adds an e.m.f.
//! impulse of variance `2 kT R dt` per wire.
//!
//! The equilibrium covariance of the currents is `kT` times the inverse
//! inductance matrix, which [`equipartition_covariance`] provides as the oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{BatchAccumulator, BatchSummary};

/// Batches per replica for the batch-means error.
pub const BATCHES_PER_REPLICA: u64 = 50;

/// Documented generator and stream-splitting rule, echoed in every estimate.
pub const RNG_ALGORITHM: &str =
    "ChaCha8Rng::seed_from_u64(seed), stream = replica index; normals: rand_distr::StandardNormal (ziggurat)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Self-inductance (H).
    pub inductance: f64,
    /// Mutual inductance (H).
    pub mutual: f64,
    /// Resistance (ohm).
    pub resistance: f64,
    /// Thermal energy k_B T (J).
    pub kt: f64,
    /// Time step (s).
    pub dt: f64,
    /// Recorded steps per replica.
    pub n_steps: u64,
    /// Discarded steps per replica before recording.
    pub burn_in: u64,
    pub seed: u64,
    pub n_replicas: u32,
}

impl SimConfig {
    /// Relaxation time `L/R` of an isolated wire.
    pub fn relaxation_time(&self) -> f64 {
        self.inductance / self.resistance
    }

    /// Fastest normal-mode relaxation time `(L - |M|)/R`.
    pub fn fast_relaxation_time(&self) -> f64 {
        (self.inductance - self.mutual.abs()) / self.resistance
    }

    /// A configuration with step `dt = 0.002 (L - |M|)/R`, long enough for the
    /// requested total simulated time (in units of `L/R`) split over replicas.
    pub fn with_defaults(
        inductance: f64,
        mutual: f64,
        resistance: f64,
        kt: f64,
        total_time_in_l_over_r: f64,
        n_replicas: u32,
        seed: u64,
    ) -> Self {
        let tau = inductance / resistance;
        let dt = 0.002 * (inductance - mutual.abs()) / resistance;
        let per_replica = total_time_in_l_over_r * tau / n_replicas.max(1) as f64;
        SimConfig {
            inductance,
            mutual,
            resistance,
            kt,
            dt,
            n_steps: (per_replica / dt).ceil() as u64,
            burn_in: (20.0 * tau / dt).ceil() as u64,
            seed,
            n_replicas,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.inductance.is_finite() && self.inductance > 0.0) {
            return bad(format!("L must be > 0, got {}", self.inductance));
        }
        if !self.mutual.is_finite() || self.mutual.abs() >= self.inductance {
            let m = self.mutual / self.inductance;
            return Err(Error::CouplingBound { m2: m * m });
        }
        if !(self.resistance.is_finite() && self.resistance > 0.0) {
            return bad(format!("R must be > 0, got {}", self.resistance));
        }
        if !(self.kt.is_finite() && self.kt > 0.0) {
            return bad(format!("kT must be > 0, got {}", self.kt));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if self.n_replicas == 0 {
            return bad("n_replicas must be >= 1".into());
        }
        let tau = self.relaxation_time();
        if self.dt >= 0.1 * tau {
            return bad(format!(
                "dt = {} violates dt < 0.1 L/R = {}",
                self.dt,
                0.1 * tau
            ));
        }
        if self.dt >= 0.1 * self.fast_relaxation_time() {
            return bad(format!(
                "dt = {} violates dt < 0.1 (L - |M|)/R = {} (fast normal mode)",
                self.dt,
                0.1 * self.fast_relaxation_time()
            ));
        }
        if (self.n_steps as f64) <= 10.0 * tau / self.dt {
            return bad(format!(
                "n_steps = {} must exceed 10 (L/R)/dt = {:.0}",
                self.n_steps,
                10.0 * tau / self.dt
            ));
        }
        if (self.burn_in as f64) < 5.0 * tau / self.dt {
            return bad(format!(
                "burn_in = {} must be at least 5 (L/R)/dt = {:.0}",
                self.burn_in,
                (5.0 * tau / self.dt).ceil()
            ));
        }
        if self.n_steps < BATCHES_PER_REPLICA {
            return bad(format!("n_steps must be >= {BATCHES_PER_REPLICA}"));
        }
        Ok(())
    }
}

/// Monte-Carlo estimate of the equilibrium current second moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LangevinEstimate {
    /// `<i1 i2>` (A^2).
    pub corr_12: f64,
    /// `<i1^2>` (A^2).
    pub var_1: f64,
    /// `<i2^2>` (A^2).
    pub var_2: f64,
    pub stderr_corr: f64,
    pub stderr_var_1: f64,
    pub stderr_var_2: f64,
    /// Effective number of independent samples of `i1 i2`.
    pub n_effective: f64,
    pub n_batches: usize,
    pub rng_algorithm: String,
}

impl LangevinEstimate {
    /// `[[<i1^2>, <i1 i2>], [<i1 i2>, <i2^2>]]`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        [[self.var_1, self.corr_12], [self.corr_12, self.var_2]]
    }

    pub fn covariance_stderr(&self) -> [[f64; 2]; 2] {
        [
            [self.stderr_var_1, self.stderr_corr],
            [self.stderr_corr, self.stderr_var_2],
        ]
    }
}

/// Equilibrium current covariance `kT [[L, M], [M, L]]^{-1}`.
pub fn equipartition_covariance(inductance: f64, mutual: f64, kt: f64) -> Result<[[f64; 2]; 2]> {
    if !(inductance.is_finite() && inductance > 0.0) {
        return Err(Error::domain("L", inductance, "must be finite and > 0"));
    }
    if !mutual.is_finite() || mutual.abs() >= inductance {
        let m = mutual / inductance;
        return Err(Error::CouplingBound { m2: m * m });
    }
    let det = inductance * inductance - mutual * mutual;
    let s = kt / det;
    Ok([[s * inductance, -s * mutual], [-s * mutual, s * inductance]])
}

fn run_replica(c: &SimConfig, replica: u32) -> Result<BatchAccumulator<3>> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    rng.set_stream(replica as u64);

    let (l, m, r) = (c.inductance, c.mutual, c.resistance);
    let det = l * l - m * m;
    let (inv_d, inv_o) = (l / det, -m / det);
    let decay = r * c.dt;
    let kick = (2.0 * c.kt * r * c.dt).sqrt();

    let mut i1 = 0.0f64;
    let mut i2 = 0.0f64;
    let batch_len = c.n_steps / BATCHES_PER_REPLICA;
    let mut acc = BatchAccumulator::<3>::new(batch_len);
    let total = c.burn_in + batch_len * BATCHES_PER_REPLICA;
    for step in 0..total {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        // L di = (-R i) dt + dE, solved with the pre-inverted inductance matrix
        let v1 = -decay * i1 + kick * z1;
        let v2 = -decay * i2 + kick * z2;
        i1 += inv_d * v1 + inv_o * v2;
        i2 += inv_o * v1 + inv_d * v2;
        if step >= c.burn_in {
            acc.push([i1 * i2, i1 * i1, i2 * i2]);
        }
        if step & 0xffff == 0 && !(i1.is_finite() && i2.is_finite()) {
            return Err(Error::NumericalBlowup { step, replica });
        }
    }
    if !(i1.is_finite() && i2.is_finite()) {
        return Err(Error::NumericalBlowup {
            step: total,
            replica,
        });
    }
    Ok(acc)
}

/// Simulate `n_replicas` independent trajectories and estimate `<i1 i2>`,
/// `<i1^2>` and `<i2^2>` with batch-means errors. Bit-reproducible for a
/// given configuration regardless of thread count.
pub fn simulate_correlator(c: &SimConfig) -> Result<LangevinEstimate> {
    c.validate()?;
    let replicas: Vec<BatchAccumulator<3>> = (0..c.n_replicas)
        .into_par_iter()
        .map(|k| run_replica(c, k))
        .collect::<Result<_>>()?;
    let mut iter = replicas.into_iter();
    let mut acc = iter.next().expect("at least one replica");
    for other in iter {
        acc.merge(&other);
    }
    let corr: BatchSummary = acc.summary(0);
    let v1 = acc.summary(1);
    let v2 = acc.summary(2);
    Ok(LangevinEstimate {
        corr_12: corr.mean,
        var_1: v1.mean,
        var_2: v2.mean,
        stderr_corr: corr.stderr,
        stderr_var_1: v1.stderr,
        stderr_var_2: v2.stderr,
        n_effective: corr.n_effective,
        n_batches: corr.n_batches,
        rng_algorithm: RNG_ALGORITHM.to_string(),
    })
}

/// Force `<i1 i2> grad M` with its Monte-Carlo standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleForce {
    /// Newtons.
    pub force: [f64; 3],
    pub stderr: [f64; 3],
    pub estimate: LangevinEstimate,
}

/// Force on the second wire from the simulated correlator and the gradient of
/// the mutual inductance with respect to its displacement (H/m).
pub fn oracle_force(c: &SimConfig, grad_m: [f64; 3]) -> Result<OracleForce> {
    if grad_m.iter().any(|g| !g.is_finite()) {
        return Err(Error::Config("grad_M must be finite".into()));
    }
    let estimate = simulate_correlator(c)?;
    Ok(OracleForce {
        force: grad_m.map(|g| estimate.corr_12 * g),
        stderr: grad_m.map(|g| estimate.stderr_corr * g.abs()),
        estimate,
    })
}

/// Stationary covariance of the Euler-Maruyama recursion itself (not of the
/// continuous process), from the discrete Lyapunov equation. Measures the
/// weak-order bias introduced by a finite `dt`.
pub fn euler_maruyama_stationary_covariance(c: &SimConfig) -> [[f64; 2]; 2] {
    // the recursion decouples into sum and difference modes with inductances L +- M
    let mode = |l_mode: f64| {
        let a = 1.0 - c.resistance * c.dt / l_mode;
        let q = 2.0 * c.kt * c.resistance * c.dt / (l_mode * l_mode);
        q / (1.0 - a * a)
    };
    let vs = mode(c.inductance + c.mutual);
    let vd = mode(c.inductance - c.mutual);
    let diag = 0.5 * (vs + vd);
    let off = 0.5 * (vs - vd);
    [[diag, off], [off, diag]]
}
