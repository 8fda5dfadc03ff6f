//! Free energy and entropy of the capacitive wire pair along `omega_R = c t^p`.

use rayon::prelude::*;
use serde::Serialize;
use wirenoise::spectral::{self_entropy, self_free_energy};
use wirenoise::{
    interaction_entropy, interaction_free_energy, Error, QuadratureConfig, ReducedParams,
    ResistanceModel, Result,
};

use crate::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1Config {
    pub m: f64,
    pub coefficient: f64,
    pub exponent: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub quadrature: QuadratureConfig,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Fig1Config {
            m: 0.8,
            coefficient: 5.0,
            exponent: 2.0,
            t_min: 0.005,
            t_max: 2.0,
            points: 400,
            // F_int spans ~15 decades over the grid, so only a relative target makes sense
            quadrature: QuadratureConfig::relative_only(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Row {
    pub t: f64,
    pub f_int: f64,
    pub f_int_err: f64,
    pub f_self: f64,
    pub s_int: f64,
    pub s_int_err: f64,
    pub s_total: f64,
    pub s_total_err: f64,
}

pub const HEADER: &str = "t,F_int,F_self,S_int,S_total";
pub const HEADER_WITH_ERRORS: &str = "t,F_int,F_self,S_int,S_total,F_int_err,S_int_err,S_total_err";

pub fn log_grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    let (a, b) = (from.ln(), to.ln());
    (0..n)
        .map(|k| {
            if k + 1 == n {
                to
            } else if k == 0 {
                from
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

impl Fig1Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < t_min < t_max, got {} .. {}",
                self.t_min, self.t_max
            )));
        }
        if self.points < 2 {
            return Err(Error::Config("need at least 2 points".into()));
        }
        self.resistance_model().validate()?;
        ReducedParams::capacitive(self.m, 0.0, self.t_min)?;
        self.quadrature.validate()
    }

    pub fn resistance_model(&self) -> ResistanceModel {
        ResistanceModel::PowerLaw {
            coefficient: self.coefficient,
            exponent: self.exponent,
        }
    }

    pub fn row(&self, t: f64) -> Result<Fig1Row> {
        let rm = self.resistance_model();
        let base = ReducedParams::capacitive(self.m, 0.0, t)?;
        let p = rm.at(&base, t)?;
        let f = interaction_free_energy(&p, &self.quadrature)?;
        let s = interaction_entropy(&p, &rm, &self.quadrature)?;
        let s_self = self_entropy(&p)?;
        Ok(Fig1Row {
            t,
            f_int: f.value,
            f_int_err: f.abs_error_estimate,
            f_self: self_free_energy(t)?,
            s_int: s.value,
            s_int_err: s.abs_error_estimate,
            s_total: s.value + 2.0 * s_self,
            s_total_err: s.abs_error_estimate,
        })
    }

    /// All grid rows in increasing `t`, evaluated on the current rayon pool.
    pub fn rows(&self) -> Result<Vec<Fig1Row>> {
        self.validate()?;
        log_grid(self.t_min, self.t_max, self.points)
            .par_iter()
            .map(|&t| self.row(t))
            .collect()
    }
}

pub fn csv_line(r: &Fig1Row, with_errors: bool) -> String {
    let mut cols = vec![r.t, r.f_int, r.f_self, r.s_int, r.s_total];
    if with_errors {
        cols.extend([r.f_int_err, r.s_int_err, r.s_total_err]);
    }
    cols.into_iter().map(fmt_f64).collect::<Vec<_>>().join(",")
}

/// Index ranges `[i, j]` of consecutive rows over which `F_int` increases with `t`.
pub fn positive_slope_windows(rows: &[Fig1Row]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for k in 1..rows.len() {
        let rising = rows[k].f_int > rows[k - 1].f_int;
        match (rising, start) {
            (true, None) => start = Some(k - 1),
            (false, Some(s)) => {
                out.push((s, k - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, rows.len() - 1));
    }
    out
}
