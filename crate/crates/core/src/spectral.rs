//! Spectral integrals for the force coefficient `H`, the interaction free energy
//! and the derived entropies.
//!
//! All quantities are in reduced units (see [`crate::model`]): free energies in
//! `hbar omega_ref`, entropies in `k_B`, forces in `hbar omega_ref` per unit of the
//! displacement coordinate used for `dm2_da`.
//!
//! The integration range is split at the physical scales of the integrand
//! (`omega_R`, `omega_T`, and with capacitance the band edges
//! `omega_C / sqrt(1 +- m)` and `omega_C`), the gaps are further split
//! geometrically, and everything above `50 max(omega_T, omega_R, omega_C)` is
//! integrated through the map `omega = omega_max / u`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    bose_unchecked, denominator_unchecked, reduced_impedance, ReducedParams, ThermoResult,
};
use crate::quadrature::{integrate, QuadratureConfig};

/// Largest ratio between neighbouring breakpoints.
const MAX_PANEL_RATIO: f64 = 4.0;
/// Upper end of the explicitly subdivided range, in units of the largest scale.
const TAIL_FACTOR: f64 = 50.0;

/// How the reduced resistance `omega_r` follows the temperature when entropies
/// are taken as temperature derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResistanceModel {
    /// `omega_r` is whatever the parameter set holds, independent of `t`.
    Fixed,
    /// `omega_r(t) = coefficient * t^exponent` (pure metals at low T: exponent 2).
    PowerLaw { coefficient: f64, exponent: f64 },
}

impl ResistanceModel {
    pub fn validate(&self) -> Result<()> {
        if let ResistanceModel::PowerLaw {
            coefficient,
            exponent,
        } = *self
        {
            if !(coefficient.is_finite() && coefficient >= 0.0) {
                return Err(Error::domain(
                    "coefficient",
                    coefficient,
                    "must be finite and >= 0",
                ));
            }
            if !(exponent.is_finite() && exponent >= 0.0) {
                return Err(Error::domain(
                    "exponent",
                    exponent,
                    "must be finite and >= 0",
                ));
            }
        }
        Ok(())
    }

    pub fn omega_r(&self, base: &ReducedParams, t: f64) -> f64 {
        match *self {
            ResistanceModel::Fixed => base.omega_r(),
            ResistanceModel::PowerLaw {
                coefficient,
                exponent,
            } => coefficient * t.powf(exponent),
        }
    }

    /// Parameters at temperature `t` along this resistance trajectory.
    pub fn at(&self, base: &ReducedParams, t: f64) -> Result<ReducedParams> {
        ReducedParams::new(base.m(), self.omega_r(base, t), base.omega_c(), t)
    }
}

/// Which integrand [`spectral_density`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralQuantity {
    /// Integrand of `H`.
    HIntegrand,
    /// Integrand of the interaction free energy (units `hbar omega_ref`).
    FreeEnergyIntegrand,
}

#[inline]
fn h_integrand(omega: f64, p: &ReducedParams) -> f64 {
    let e = bose_unchecked(omega / p.t());
    if e == 0.0 {
        return 0.0;
    }
    let d = denominator_unchecked(omega, p);
    let im_inv = -d.im / d.norm_sqr();
    omega * e * im_inv / PI
}

#[inline]
fn free_energy_integrand(omega: f64, p: &ReducedParams) -> f64 {
    let e = bose_unchecked(omega / p.t());
    if e == 0.0 {
        return 0.0;
    }
    let a = reduced_impedance(omega, p);
    let ratio = omega * p.m() / a;
    let z = ratio * ratio;
    // Im log(1 + z) without forming 1 + z's imaginary part by subtraction
    let im_log = z.im.atan2(1.0 + z.re);
    debug_assert!(
        p.omega_c().is_some() || im_log >= 0.0,
        "Im log must be non-negative without capacitance"
    );
    p.t() * e * im_log / (PI * omega)
}

/// Pointwise value of the integrand of `H` or of the interaction free energy.
pub fn spectral_density(omega: f64, p: &ReducedParams, which: SpectralQuantity) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain("omega", omega, "must be finite and > 0"));
    }
    if p.t() == 0.0 {
        return Ok(0.0);
    }
    Ok(match which {
        SpectralQuantity::HIntegrand => h_integrand(omega, p),
        SpectralQuantity::FreeEnergyIntegrand => free_energy_integrand(omega, p),
    })
}

/// Characteristic frequencies of the integrand, ascending.
pub fn characteristic_frequencies(p: &ReducedParams) -> Vec<f64> {
    let mut pts = vec![p.omega_r(), p.t()];
    let m = p.m().abs();
    match p.omega_c() {
        Some(wc) => {
            pts.extend([wc / (1.0 + m).sqrt(), wc, wc / (1.0 - m).sqrt()]);
        }
        None => pts.push(p.omega_r() / (1.0 - m * m).sqrt()),
    }
    pts.retain(|w| *w > 0.0 && w.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Start of the mapped tail, `50 max(omega_T, omega_R, omega_C)`.
pub fn tail_start(p: &ReducedParams) -> f64 {
    TAIL_FACTOR * p.t().max(p.omega_r()).max(p.omega_c().unwrap_or(0.0))
}

fn breakpoints(p: &ReducedParams) -> (Vec<f64>, f64) {
    let omega_max = tail_start(p);
    let mut scales: Vec<f64> = characteristic_frequencies(p)
        .into_iter()
        .filter(|w| *w < omega_max)
        .collect();
    scales.push(omega_max);
    let mut pts = Vec::with_capacity(4 * scales.len() + 2);
    pts.push(0.0);
    pts.push(scales[0] / MAX_PANEL_RATIO);
    for w in scales.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        pts.push(lo);
        let n = ((hi / lo).ln() / MAX_PANEL_RATIO.ln()).ceil() as usize;
        for k in 1..n {
            pts.push(lo * (hi / lo).powf(k as f64 / n as f64));
        }
    }
    pts.push(omega_max);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    (pts, omega_max)
}

/// Analytic bound on the free-energy integral above `omega_max`: with
/// `|Im log| <= pi`, the tail is at most `t * (-ln(1 - e^{-omega_max / t}))`.
pub fn free_energy_tail_bound(p: &ReducedParams) -> f64 {
    let t = p.t();
    if t == 0.0 {
        return 0.0;
    }
    -t * (-(-tail_start(p) / t).exp()).ln_1p()
}

fn integrate_spectrum(
    p: &ReducedParams,
    q: &QuadratureConfig,
    which: SpectralQuantity,
) -> Result<ThermoResult> {
    let (pts, omega_max) = breakpoints(p);
    match which {
        SpectralQuantity::HIntegrand => integrate(|w| h_integrand(w, p), &pts, Some(omega_max), q),
        SpectralQuantity::FreeEnergyIntegrand => {
            integrate(|w| free_energy_integrand(w, p), &pts, Some(omega_max), q)
        }
    }
}

/// Dimensionless force coefficient `H`.
///
/// Exactly zero at `t = 0` (no thermal weight) and at `omega_r = 0`. With
/// capacitance the limit `omega_r -> 0+` is the lossless normal-mode value of
/// [`crate::asymptotics::lossless_mode_h`], not zero.
pub fn h_factor(p: &ReducedParams, q: &QuadratureConfig) -> Result<ThermoResult> {
    q.validate()?;
    if p.t() == 0.0 || p.omega_r() == 0.0 {
        return Ok(ThermoResult::exact(0.0));
    }
    integrate_spectrum(p, q, SpectralQuantity::HIntegrand)
}

/// Force `-k_B T H dm2_da` along the displacement direction whose derivative of
/// `m^2` is `dm2_da`, in units of `hbar omega_ref` per unit length.
pub fn force_reduced(p: &ReducedParams, dm2_da: f64, q: &QuadratureConfig) -> Result<ThermoResult> {
    if !dm2_da.is_finite() {
        return Err(Error::domain("dm2_da", dm2_da, "must be finite"));
    }
    let h = h_factor(p, q)?;
    Ok(h.scale(-p.t() * dm2_da))
}

/// Interaction free energy in units of `hbar omega_ref`.
///
/// Strictly dissipationless wires (`omega_r = 0`) do not interact through
/// this mechanism and give exactly zero.
pub fn interaction_free_energy(p: &ReducedParams, q: &QuadratureConfig) -> Result<ThermoResult> {
    q.validate()?;
    if p.t() == 0.0 || p.omega_r() == 0.0 || p.m() == 0.0 {
        return Ok(ThermoResult::exact(0.0));
    }
    integrate_spectrum(p, q, SpectralQuantity::FreeEnergyIntegrand)
}

/// Thermal free energy `t ln(1 - e^{-1/t})` of one LC oscillator, in units of
/// `hbar omega_C` with `t = k_B T / (hbar omega_C)`.
pub fn self_free_energy(t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain("t", t, "must be finite and >= 0"));
    }
    Ok(oscillator_free_energy(1.0, t))
}

fn oscillator_free_energy(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t * (-(-omega / t).exp()).ln_1p()
}

/// Entropy `-dF/dt` of one oscillator of frequency `omega` at temperature `t`.
fn oscillator_entropy(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let x = omega / t;
    if x > 700.0 {
        return 0.0;
    }
    -(-(-x).exp()).ln_1p() + x / x.exp_m1()
}

/// Entropy of one wire's LC oscillator in units of `k_B`, for parameters that
/// include a capacitance.
pub fn self_entropy(p: &ReducedParams) -> Result<f64> {
    let wc = p
        .omega_c()
        .ok_or_else(|| Error::Config("self entropy needs a capacitance (omega_c)".into()))?;
    Ok(oscillator_entropy(wc, p.t()))
}

/// Free energy of one wire's LC oscillator in units of `hbar omega_ref`.
pub fn self_free_energy_reduced(p: &ReducedParams) -> Result<f64> {
    let wc = p
        .omega_c()
        .ok_or_else(|| Error::Config("self free energy needs a capacitance (omega_c)".into()))?;
    Ok(oscillator_free_energy(wc, p.t()))
}

/// `-dF/dt` by a five-point central stencil, Richardson-extrapolated once
/// against the stencil at twice the step.
fn entropy_by_differences<F>(t: f64, free_energy: F) -> Result<ThermoResult>
where
    F: Fn(f64) -> Result<ThermoResult>,
{
    let mut h = (1e-3 * t).max(1e-6);
    let mut underflow = false;
    if 4.0 * h >= t {
        h = t / 8.0;
        underflow = true;
    }
    let offsets = [-4.0, -2.0, -1.0, 1.0, 2.0, 4.0];
    let mut vals = [ThermoResult::exact(0.0); 6];
    for (v, k) in vals.iter_mut().zip(offsets) {
        *v = free_energy(t + k * h)?;
    }
    let [fm4, fm2, fm1, fp1, fp2, fp4] = vals.map(|v| v.value);
    let d_h = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let d_2h = (fm4 - 8.0 * fm2 + 8.0 * fp2 - fp4) / (24.0 * h);
    let derivative = d_h + (d_h - d_2h) / 15.0;
    // |weights| of the extrapolated stencil on each sample, times 12 h
    let weights = [
        1.0 / 30.0,
        4.0 / 3.0,
        128.0 / 15.0,
        128.0 / 15.0,
        4.0 / 3.0,
        1.0 / 30.0,
    ];
    let propagated: f64 = vals
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.abs_error_estimate)
        .sum::<f64>()
        / (12.0 * h);
    let mut error = (d_h - d_2h).abs() / 15.0 + propagated;
    if underflow {
        error = error.max((d_h - d_2h).abs());
    }
    Ok(ThermoResult::new(-derivative, error))
}

/// Interaction entropy `S = -dF/dt` in units of `k_B`, differentiating along
/// the resistance trajectory `rm`.
pub fn interaction_entropy(
    p: &ReducedParams,
    rm: &ResistanceModel,
    q: &QuadratureConfig,
) -> Result<ThermoResult> {
    rm.validate()?;
    q.validate()?;
    if p.t() <= 0.0 {
        return Err(Error::domain("t", p.t(), "entropy needs t > 0"));
    }
    if p.m() == 0.0 {
        return Ok(ThermoResult::exact(0.0));
    }
    entropy_by_differences(p.t(), |t| interaction_free_energy(&rm.at(p, t)?, q))
}

/// Total entropy `S_int + 2 S_self` of the wire pair with capacitance, in units of `k_B`.
pub fn total_entropy(
    p: &ReducedParams,
    rm: &ResistanceModel,
    q: &QuadratureConfig,
) -> Result<ThermoResult> {
    let s_self = self_entropy(p)?;
    if p.t() == 0.0 {
        return Ok(ThermoResult::exact(0.0));
    }
    let s_int = interaction_entropy(p, rm, q)?;
    Ok(ThermoResult::new(
        s_int.value + 2.0 * s_self,
        s_int.abs_error_estimate,
    ))
}
