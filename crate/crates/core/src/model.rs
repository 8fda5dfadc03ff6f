//! Circuit parameters, unit reduction and the pieces shared by every spectral
//! integral: the Bose occupation factor and the complex response denominator.
//!
//! Reduced units measure every frequency in units of a reference frequency
//! `omega_ref`, temperature as `t = k_B T / (hbar omega_ref)`, free energies in
//! `hbar omega_ref` and entropies in `k_B`. When the wires carry an end-point
//! capacitance the reference is the LC resonance `1/sqrt(L C)`, so `omega_c == 1`;
//! otherwise it is the relaxation rate `R/L`, so `omega_r == 1`.
//!
//! Constant `L` and `R` are only meaningful for thin wires at low frequency
//! (no skin effect). Checking that regime is left to the caller.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant (J/K), exact SI value.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant (J s), exact SI value.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Below this argument the Bose factor is evaluated from its Taylor series.
const BOSE_SERIES_CUTOFF: f64 = 1e-4;

/// A computed quantity together with an estimate of its absolute numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoResult {
    pub value: f64,
    pub abs_error_estimate: f64,
}

impl ThermoResult {
    pub fn new(value: f64, abs_error_estimate: f64) -> Self {
        debug_assert!(abs_error_estimate.is_finite() && abs_error_estimate >= 0.0);
        ThermoResult {
            value,
            abs_error_estimate,
        }
    }

    pub fn exact(value: f64) -> Self {
        ThermoResult::new(value, 0.0)
    }

    pub fn scale(self, factor: f64) -> Self {
        ThermoResult::new(self.value * factor, self.abs_error_estimate * factor.abs())
    }
}

/// Circuit description of one identical pair of wires in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Self-inductance of each wire (H).
    pub inductance: f64,
    /// Mutual inductance (H).
    pub mutual: f64,
    /// Resistance of each wire (ohm).
    pub resistance: f64,
    /// End-point capacitance of each wire (F), if modelled.
    pub capacitance: Option<f64>,
    /// Temperature (K).
    pub temperature: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.inductance.is_finite() && self.inductance > 0.0) {
            return Err(Error::domain(
                "L",
                self.inductance,
                "must be finite and > 0",
            ));
        }
        if !self.mutual.is_finite() {
            return Err(Error::domain("M", self.mutual, "must be finite"));
        }
        if !(self.resistance.is_finite() && self.resistance >= 0.0) {
            return Err(Error::domain(
                "R",
                self.resistance,
                "must be finite and >= 0",
            ));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::domain(
                "T",
                self.temperature,
                "must be finite and >= 0",
            ));
        }
        if let Some(c) = self.capacitance {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::domain("C", c, "must be finite and > 0"));
            }
        }
        if self.mutual.abs() >= self.inductance {
            let m = self.mutual / self.inductance;
            return Err(Error::CouplingBound { m2: m * m });
        }
        Ok(())
    }

    /// `1/sqrt(L C)` when a capacitance is present, else `R/L` when `R > 0`.
    pub fn natural_reference_frequency(&self) -> Result<f64> {
        match self.capacitance {
            Some(c) => Ok(1.0 / (self.inductance * c).sqrt()),
            None if self.resistance > 0.0 => Ok(self.resistance / self.inductance),
            None => Err(Error::NoReferenceFrequency),
        }
    }
}

/// Dimensionless state consumed by every thermodynamic operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    m: f64,
    omega_r: f64,
    omega_c: Option<f64>,
    t: f64,
}

impl ReducedParams {
    pub fn new(m: f64, omega_r: f64, omega_c: Option<f64>, t: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::domain("m", m, "must be finite"));
        }
        if m * m >= 1.0 {
            return Err(Error::CouplingBound { m2: m * m });
        }
        if !(omega_r.is_finite() && omega_r >= 0.0) {
            return Err(Error::domain("omega_r", omega_r, "must be finite and >= 0"));
        }
        if let Some(wc) = omega_c {
            if !(wc.is_finite() && wc > 0.0) {
                return Err(Error::domain("omega_c", wc, "must be finite and > 0"));
            }
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::domain("t", t, "must be finite and >= 0"));
        }
        Ok(ReducedParams {
            m,
            omega_r,
            omega_c,
            t,
        })
    }

    /// Capacitive model in units of `omega_c` (so `omega_c == 1`).
    pub fn capacitive(m: f64, omega_r: f64, t: f64) -> Result<Self> {
        Self::new(m, omega_r, Some(1.0), t)
    }

    /// Purely inductive-resistive model.
    pub fn inductive(m: f64, omega_r: f64, t: f64) -> Result<Self> {
        Self::new(m, omega_r, None, t)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn m2(&self) -> f64 {
        self.m * self.m
    }

    pub fn omega_r(&self) -> f64 {
        self.omega_r
    }

    pub fn omega_c(&self) -> Option<f64> {
        self.omega_c
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_t(self, t: f64) -> Result<Self> {
        Self::new(self.m, self.omega_r, self.omega_c, t)
    }

    pub fn with_omega_r(self, omega_r: f64) -> Result<Self> {
        Self::new(self.m, omega_r, self.omega_c, self.t)
    }

    pub fn with_m(self, m: f64) -> Result<Self> {
        Self::new(m, self.omega_r, self.omega_c, self.t)
    }
}

/// What is needed to undo a reduction: the reference frequency and the
/// self-inductance that sets the scale of `M`, `R` and `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitScale {
    pub omega_ref: f64,
    pub inductance: f64,
}

/// Reduce SI parameters using the natural reference frequency.
pub fn to_reduced(p: &PhysicalParams) -> Result<(ReducedParams, UnitScale)> {
    p.validate()?;
    let omega_ref = p.natural_reference_frequency()?;
    to_reduced_with_reference(p, omega_ref)
}

/// Reduce SI parameters against an explicit reference frequency (rad/s). This is
/// the only way to reduce a lossless wire pair without capacitance.
pub fn to_reduced_with_reference(
    p: &PhysicalParams,
    omega_ref: f64,
) -> Result<(ReducedParams, UnitScale)> {
    p.validate()?;
    if !(omega_ref.is_finite() && omega_ref > 0.0) {
        return Err(Error::domain(
            "omega_ref",
            omega_ref,
            "must be finite and > 0",
        ));
    }
    let l = p.inductance;
    let reduced = ReducedParams::new(
        p.mutual / l,
        p.resistance / l / omega_ref,
        p.capacitance.map(|c| 1.0 / (l * c).sqrt() / omega_ref),
        BOLTZMANN * p.temperature / (HBAR * omega_ref),
    )?;
    Ok((
        reduced,
        UnitScale {
            omega_ref,
            inductance: l,
        },
    ))
}

/// Inverse of [`to_reduced`].
pub fn from_reduced(r: &ReducedParams, scale: &UnitScale) -> PhysicalParams {
    let l = scale.inductance;
    let w = scale.omega_ref;
    PhysicalParams {
        inductance: l,
        mutual: r.m * l,
        resistance: r.omega_r * w * l,
        capacitance: r.omega_c.map(|wc| 1.0 / (l * (wc * w) * (wc * w))),
        temperature: r.t * HBAR * w / BOLTZMANN,
    }
}

/// Mean thermal weight `E(y) = y / (e^y - 1)` of a mode at `y = hbar omega / k_B T`,
/// normalised so that the classical limit is `E(0) = 1`.
pub fn bose_factor(y: f64) -> Result<f64> {
    if !(y.is_finite() && y >= 0.0) {
        return Err(Error::domain("y", y, "must be finite and >= 0"));
    }
    Ok(bose_unchecked(y))
}

#[inline]
pub(crate) fn bose_unchecked(y: f64) -> f64 {
    if y < BOSE_SERIES_CUTOFF {
        let y2 = y * y;
        1.0 - 0.5 * y + y2 / 12.0 - y2 * y2 / 720.0
    } else if y > 40.0 {
        // e^-y below machine epsilon relative to 1
        y * (-y).exp()
    } else {
        y / y.exp_m1()
    }
}

/// `a(omega) = omega_R - i omega (+ i omega_C^2 / omega)`, the reduced impedance
/// per unit inductance up to a factor `-i`.
#[inline]
pub(crate) fn reduced_impedance(omega: f64, p: &ReducedParams) -> Complex64 {
    let reactance = match p.omega_c {
        Some(wc) => wc * wc / omega - omega,
        None => -omega,
    };
    Complex64::new(p.omega_r, reactance)
}

/// `D(omega) = a(omega)^2 + omega^2 m^2`, whose inverse is the coupled-circuit
/// response entering the force integral.
pub fn response_denominator(omega: f64, p: &ReducedParams) -> Result<Complex64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain("omega", omega, "must be finite and > 0"));
    }
    Ok(denominator_unchecked(omega, p))
}

#[inline]
pub(crate) fn denominator_unchecked(omega: f64, p: &ReducedParams) -> Complex64 {
    let a = reduced_impedance(omega, p);
    a * a + omega * omega * p.m * p.m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn bose_known_values() {
        assert_eq!(bose_factor(0.0).unwrap(), 1.0);
        assert_relative_eq!(
            bose_factor(1.0).unwrap(),
            1.0 / (std::f64::consts::E - 1.0),
            max_relative = 1e-15
        );
        // 50/(e^50 - 1) from 30-digit arithmetic
        assert_relative_eq!(
            bose_factor(50.0).unwrap(),
            9.643749239819588e-21,
            max_relative = 1e-13
        );
        assert_eq!(bose_factor(1e4).unwrap(), 0.0);
    }

    #[test]
    fn bose_rejects_bad_input() {
        assert!(bose_factor(-1e-300).is_err());
        assert!(bose_factor(f64::NAN).is_err());
        assert!(bose_factor(f64::INFINITY).is_err());
    }

    #[test]
    fn bose_series_matches_low_order_expansion() {
        for y in [1e-8, 1e-4, 1e-2] {
            let series = 1.0 - y / 2.0 + y * y / 12.0;
            assert_relative_eq!(bose_factor(y).unwrap(), series, max_relative = 1e-10);
        }
    }

    #[test]
    fn bose_branches_agree_at_switchover() {
        let below = bose_unchecked(BOSE_SERIES_CUTOFF * (1.0 - 1e-12));
        let closed = BOSE_SERIES_CUTOFF / BOSE_SERIES_CUTOFF.exp_m1();
        assert_relative_eq!(below, closed, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn bose_monotone_decreasing(y in 0.0f64..60.0, dy in 1e-6f64..5.0) {
            let a = bose_factor(y).unwrap();
            let b = bose_factor(y + dy).unwrap();
            prop_assert!(b < a);
            prop_assert!(a > 0.0 && a <= 1.0);
        }

        #[test]
        fn imaginary_part_of_denominator(
            omega in 1e-3f64..1e3,
            m in -0.99f64..0.99,
            wr in 0.0f64..10.0,
            wc in 0.01f64..10.0,
        ) {
            let p = ReducedParams::new(m, wr, Some(wc), 1.0).unwrap();
            let d = response_denominator(omega, &p).unwrap();
            let expected = -2.0 * wr * (omega - wc * wc / omega);
            prop_assert!((d.im - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        }

        #[test]
        fn reduction_round_trip(
            l in 1e-9f64..1e3,
            frac in -0.999f64..0.999,
            r in 1e-6f64..1e6,
            c in proptest::option::of(1e-15f64..1e3),
            temp in 0.0f64..1e4,
        ) {
            let p = PhysicalParams {
                inductance: l,
                mutual: frac * l,
                resistance: r,
                capacitance: c,
                temperature: temp,
            };
            let (red, scale) = to_reduced(&p).unwrap();
            let back = from_reduced(&red, &scale);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
            prop_assert!(close(back.inductance, l));
            prop_assert!(close(back.mutual, p.mutual));
            prop_assert!(close(back.resistance, r));
            prop_assert!(close(back.temperature, temp));
            match (back.capacitance, c) {
                (Some(a), Some(b)) => prop_assert!(close(a, b)),
                (None, None) => {}
                _ => prop_assert!(false),
            }
        }
    }

    #[test]
    fn denominator_examples() {
        let p = ReducedParams::inductive(0.0, 2.0, 1.0).unwrap();
        let d = response_denominator(2.0, &p).unwrap();
        assert_relative_eq!(d.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(d.im, -8.0, max_relative = 1e-15);

        let p = ReducedParams::capacitive(0.0, 0.0, 1.0).unwrap();
        assert_eq!(
            response_denominator(1.0, &p).unwrap(),
            Complex64::new(0.0, 0.0)
        );

        // (0.5 - i)^2 + 0.64 = 0.25 - 1 - i + 0.64
        let p = ReducedParams::inductive(0.8, 0.5, 1.0).unwrap();
        let d = response_denominator(1.0, &p).unwrap();
        assert_relative_eq!(d.re, -0.11, max_relative = 1e-14);
        assert_relative_eq!(d.im, -1.0, max_relative = 1e-14);

        assert!(response_denominator(0.0, &p).is_err());
        assert!(response_denominator(-1.0, &p).is_err());
    }

    #[test]
    fn lossless_resonance_is_the_only_zero() {
        let p = ReducedParams::capacitive(0.0, 0.0, 1.0).unwrap();
        for k in 1..2000 {
            let omega = k as f64 * 1e-3 * 1.7;
            let d = response_denominator(omega, &p).unwrap();
            if (omega - 1.0).abs() > 1e-9 {
                assert!(d.norm() > 0.0);
            }
        }
        // D = (1/w - w)^2 * (-1) vanishes only where 1/w = w
        let d = response_denominator(1.0 + 1e-6, &p).unwrap();
        assert!(d.norm() > 0.0 && d.norm() < 1e-11);
    }

    #[test]
    fn reduction_examples() {
        // k_B T = hbar R/L
        let temp = HBAR / BOLTZMANN;
        let p = PhysicalParams {
            inductance: 1.0,
            mutual: 0.8,
            resistance: 1.0,
            capacitance: None,
            temperature: temp,
        };
        let (r, s) = to_reduced(&p).unwrap();
        assert_eq!(s.omega_ref, 1.0);
        assert_relative_eq!(r.m(), 0.8);
        assert_relative_eq!(r.omega_r(), 1.0);
        assert_relative_eq!(r.t(), 1.0, max_relative = 1e-15);
        assert_eq!(r.omega_c(), None);

        let p = PhysicalParams {
            inductance: 1.0,
            mutual: 0.0,
            resistance: 0.0,
            capacitance: Some(1.0),
            temperature: 0.0,
        };
        let (r, _) = to_reduced(&p).unwrap();
        assert_eq!(
            (r.m(), r.omega_r(), r.omega_c(), r.t()),
            (0.0, 0.0, Some(1.0), 0.0)
        );

        let p = PhysicalParams {
            inductance: 2.0,
            mutual: 1.0,
            resistance: 4.0,
            capacitance: Some(0.125),
            temperature: 1.0,
        };
        let (r, s) = to_reduced(&p).unwrap();
        assert_relative_eq!(s.omega_ref, 2.0, max_relative = 1e-15);
        assert_relative_eq!(r.m(), 0.5);
        assert_relative_eq!(r.omega_r(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(r.omega_c().unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn reduction_errors() {
        let mut p = PhysicalParams {
            inductance: 1.0,
            mutual: 1.0,
            resistance: 1.0,
            capacitance: None,
            temperature: 1.0,
        };
        assert!(matches!(to_reduced(&p), Err(Error::CouplingBound { .. })));
        p.mutual = 0.5;
        p.resistance = 0.0;
        assert_eq!(to_reduced(&p), Err(Error::NoReferenceFrequency));
        let (r, s) = to_reduced_with_reference(&p, 3.0).unwrap();
        assert_eq!(s.omega_ref, 3.0);
        assert_eq!(r.omega_r(), 0.0);
        p.inductance = 0.0;
        assert!(to_reduced(&p).is_err());
    }

    #[test]
    fn reduced_params_validation() {
        assert!(ReducedParams::new(1.0, 1.0, None, 1.0).is_err());
        assert!(ReducedParams::new(-1.0, 1.0, None, 1.0).is_err());
        assert!(ReducedParams::new(0.5, -1.0, None, 1.0).is_err());
        assert!(ReducedParams::new(0.5, 1.0, Some(0.0), 1.0).is_err());
        assert!(ReducedParams::new(0.5, 1.0, None, -1.0).is_err());
        assert!(ReducedParams::new(-0.999, 0.0, Some(2.0), 0.0).is_ok());
    }
}
