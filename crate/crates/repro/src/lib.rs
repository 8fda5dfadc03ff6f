//! Reproduction of the published curves and the acceptance criteria.

pub mod criteria;
pub mod fig1;

/// Round-trip-exact rendering with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
