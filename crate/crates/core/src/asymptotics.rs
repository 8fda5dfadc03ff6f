//! Closed-form limits of the spectral integrals.
//!
//! Classical regime (`omega_R << omega_T`, no capacitance): the equilibrium
//! current covariance is `k_B T` times the inverse inductance matrix, which fixes
//! `H = f(m^2) = 1 / (2 (1 - m^2))`. Integrating over `m^2` with `g(0) = 0` gives
//! the free energy coefficient `g(m^2) = -ln(1 - m^2) / 2`.
//!
//! Lossless limit with capacitance (`omega_R -> 0+`): the response collapses onto
//! the two normal modes `omega_C / sqrt(1 +- m)` and the integrals reduce to the
//! thermal free energy of a pair of coupled LC oscillators.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::bose_unchecked;

/// `16 pi^5 / 63`, coefficient of the low-temperature capacitive free energy.
pub const LOW_T_COEFFICIENT: f64 = 16.0 * PI * PI * PI * PI * PI / 63.0;

fn check_coupling(m: f64) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::domain("m", m, "must be finite"));
    }
    let m2 = m * m;
    if m2 >= 1.0 {
        return Err(Error::CouplingBound { m2 });
    }
    Ok(m2)
}

/// Classical force coefficient `f(m^2) = 1 / (2 (1 - m^2))`.
pub fn h_classical(m: f64) -> Result<f64> {
    let m2 = check_coupling(m)?;
    Ok(0.5 / (1.0 - m2))
}

/// Classical free-energy coefficient `g(m^2) = -ln(1 - m^2) / 2`, in units of `k_B T`.
pub fn g_classical(m: f64) -> Result<f64> {
    let m2 = check_coupling(m)?;
    Ok(-0.5 * (-m2).ln_1p())
}

/// Zero-temperature entropy of the inductive model, `-g(m^2)` in units of `k_B`.
pub fn nernst_entropy_limit(m: f64) -> Result<f64> {
    Ok(-g_classical(m)?)
}

/// Leading low-temperature interaction free energy with capacitance,
/// `-(16 pi^5 / 63) m^2 t^6 omega_r`, in units of `hbar omega_C` with `omega_r`
/// in units of `omega_C`. Valid for `omega_r << t << 1`.
pub fn low_t_capacitive_free_energy(t: f64, m: f64, omega_r: f64) -> f64 {
    -LOW_T_COEFFICIENT * m * m * t.powi(6) * omega_r
}

fn normal_modes(m: f64) -> (f64, f64) {
    let m = m.abs();
    (1.0 / (1.0 + m).sqrt(), 1.0 / (1.0 - m).sqrt())
}

/// `omega_R -> 0+` limit of the force coefficient with capacitance (`t` in units
/// of `hbar omega_C / k_B`).
pub fn lossless_mode_h(m: f64, t: f64) -> Result<f64> {
    check_coupling(m)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain("t", t, "must be finite and >= 0"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let m = m.abs();
    if m == 0.0 {
        // m -> 0 limit of the difference quotient below
        let y = 1.0 / t;
        let e = bose_unchecked(y);
        let de = if y > 40.0 {
            (1.0 - y) * (-y).exp()
        } else {
            let em1 = y.exp_m1();
            1.0 / em1 - y * (em1 + 1.0) / (em1 * em1)
        };
        return Ok(0.5 * (e + de / (2.0 * t)));
    }
    let (wa, wb) = normal_modes(m);
    let ea = bose_unchecked(wa / t);
    let eb = bose_unchecked(wb / t);
    Ok((eb / (1.0 - m) - ea / (1.0 + m)) / (4.0 * m))
}

/// `omega_R -> 0+` limit of the interaction free energy with capacitance, in
/// units of `hbar omega_C`.
pub fn lossless_mode_free_energy(m: f64, t: f64) -> Result<f64> {
    check_coupling(m)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain("t", t, "must be finite and >= 0"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (wa, wb) = normal_modes(m);
    let mode = |w: f64| t * (-(-w / t).exp()).ln_1p();
    Ok(mode(wa) + mode(wb) - 2.0 * mode(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn classical_coefficients() {
        assert_eq!(h_classical(0.0).unwrap(), 0.5);
        assert_relative_eq!(h_classical(0.8).unwrap(), 1.0 / 0.72, max_relative = 1e-15);
        assert_relative_eq!(h_classical(-0.8).unwrap(), 1.0 / 0.72, max_relative = 1e-15);
        assert_eq!(g_classical(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            g_classical(0.8).unwrap(),
            0.510_825_623_765_990_7,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            nernst_entropy_limit(0.8).unwrap(),
            -0.510_825_623_765_990_7,
            max_relative = 1e-14
        );
        assert_eq!(nernst_entropy_limit(0.0).unwrap(), 0.0);
        assert!(h_classical(1.0).is_err());
        assert!(g_classical(-1.5).is_err());
    }

    #[test]
    fn h_classical_diverges_towards_unit_coupling() {
        let mut prev = 0.0;
        for m in [0.9, 0.99, 0.999, 0.9999] {
            let h = h_classical(m).unwrap();
            assert!(h > prev);
            prev = h;
        }
        assert!(prev > 1e3);
    }

    #[test]
    fn nernst_limit_strictly_negative() {
        for m in [1e-3, 0.1, 0.5, 0.99] {
            assert!(nernst_entropy_limit(m).unwrap() < 0.0);
        }
    }

    #[test]
    fn g_derivative_is_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m2: f64 = rng.gen_range(0.01..0.95);
            let h = 1e-5;
            let g = |z: f64| g_classical(z.sqrt()).unwrap();
            let d = (g(m2 + h) - g(m2 - h)) / (2.0 * h);
            assert_relative_eq!(d, h_classical(m2.sqrt()).unwrap(), max_relative = 1e-8);
        }
        let g = |z: f64| g_classical(z.sqrt()).unwrap();
        let d = (g(0.25 + 1e-6) - g(0.25 - 1e-6)) / 2e-6;
        assert_relative_eq!(d, 2.0 / 3.0, max_relative = 1e-8);
    }

    #[test]
    fn low_t_law() {
        assert_relative_eq!(
            LOW_T_COEFFICIENT,
            77.719_285_024_833_38,
            max_relative = 1e-14
        );
        assert_eq!(low_t_capacitive_free_energy(0.01, 0.0, 1e-3), 0.0);
        assert_eq!(low_t_capacitive_free_energy(0.0, 0.8, 1e-3), 0.0);
        assert_relative_eq!(
            low_t_capacitive_free_energy(1e-2, 0.8, 1e-3),
            -4.974_034_241_589_337e-14,
            max_relative = 1e-13
        );
    }

    #[test]
    fn lossless_limits_reference_values() {
        // 30-digit reference quadrature at omega_R = 1e-6 agrees to ~1e-6
        assert_relative_eq!(
            lossless_mode_h(0.8, 0.1).unwrap(),
            -7.501_516_634_86e-4,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            lossless_mode_free_energy(0.8, 0.1).unwrap(),
            -4.887_415_801_449e-5,
            max_relative = 1e-9
        );
    }

    #[test]
    fn lossless_free_energy_gradient_is_h() {
        for (m, t) in [(0.3, 0.2), (0.8, 0.1), (0.6, 3.0), (1e-3, 0.5)] {
            let m2: f64 = m * m;
            let step = 1e-6;
            let f = |z: f64| lossless_mode_free_energy(z.sqrt(), t).unwrap();
            let d = (f(m2 + step) - f((m2 - step).max(0.0))) / (m2 + step - (m2 - step).max(0.0));
            assert_relative_eq!(d / t, lossless_mode_h(m, t).unwrap(), max_relative = 1e-5);
        }
        // m = 0 branch continues the m > 0 formula
        assert_relative_eq!(
            lossless_mode_h(0.0, 0.7).unwrap(),
            lossless_mode_h(1e-5, 0.7).unwrap(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn lossless_limit_is_classical_at_high_temperature() {
        for m in [0.2, 0.8] {
            let t = 1e6;
            assert_relative_eq!(
                lossless_mode_h(m, t).unwrap(),
                h_classical(m).unwrap(),
                max_relative = 1e-5
            );
            assert_relative_eq!(
                lossless_mode_free_energy(m, t).unwrap() / t,
                g_classical(m).unwrap(),
                max_relative = 1e-5
            );
        }
    }
}
