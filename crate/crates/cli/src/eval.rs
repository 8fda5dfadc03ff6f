//! Evaluation of the requested quantities at one parameter point.

use clap::ValueEnum;
use serde::Serialize;
use wirenoise::spectral::{self_entropy, self_free_energy_reduced};
use wirenoise::{
    force_reduced, h_factor, interaction_entropy, interaction_free_energy, QuadratureConfig,
    ReducedParams, ResistanceModel, Result, ThermoResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize)]
pub enum Quantity {
    #[value(name = "H")]
    H,
    #[value(name = "F_int", alias = "F")]
    FInt,
    #[value(name = "F_self")]
    FSelf,
    #[value(name = "S_int", alias = "S")]
    SInt,
    #[value(name = "S_total")]
    STotal,
    #[value(name = "force")]
    Force,
}

impl Quantity {
    pub fn column(self) -> &'static str {
        match self {
            Quantity::H => "H",
            Quantity::FInt => "F_int",
            Quantity::FSelf => "F_self",
            Quantity::SInt => "S_int",
            Quantity::STotal => "S_total",
            Quantity::Force => "force",
        }
    }

    /// Closed forms carry no error estimate and get no error column.
    pub fn has_error(self) -> bool {
        !matches!(self, Quantity::FSelf)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub resistance_model: ResistanceModel,
    pub quadrature: QuadratureConfig,
    /// `d(m^2)/da` for the force, in inverse length units of the caller's choice.
    pub dm2_da: Option<f64>,
}

/// Memoises `S_int` so that `S_total` does not repeat the differentiation.
pub fn evaluate(
    p: &ReducedParams,
    which: &[Quantity],
    o: &EvalOptions,
) -> Result<Vec<ThermoResult>> {
    let mut s_int: Option<ThermoResult> = None;
    let get_s_int = |s: &mut Option<ThermoResult>| -> Result<ThermoResult> {
        if let Some(v) = *s {
            return Ok(v);
        }
        let v = interaction_entropy(p, &o.resistance_model, &o.quadrature)?;
        *s = Some(v);
        Ok(v)
    };
    which
        .iter()
        .map(|q| match q {
            Quantity::H => h_factor(p, &o.quadrature),
            Quantity::FInt => interaction_free_energy(p, &o.quadrature),
            Quantity::FSelf => self_free_energy_reduced(p).map(ThermoResult::exact),
            Quantity::SInt => get_s_int(&mut s_int),
            Quantity::STotal => {
                let s_self = self_entropy(p)?;
                let s = get_s_int(&mut s_int)?;
                Ok(ThermoResult::new(
                    s.value + 2.0 * s_self,
                    s.abs_error_estimate,
                ))
            }
            Quantity::Force => {
                let g = o.dm2_da.ok_or_else(|| {
                    wirenoise::Error::Config(
                        "force needs --dm2-da (derivative of m^2 along the displacement)".into(),
                    )
                })?;
                force_reduced(p, g, &o.quadrature)
            }
        })
        .collect()
}

pub use wirenoise_repro::fmt_f64;
