//! One-dimensional parameter sweeps with ordered, resumable CSV output.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wirenoise::{Error, ReducedParams, Result, ThermoResult};

use crate::eval::{evaluate, fmt_f64, EvalOptions, Quantity};
use wirenoise_repro::fig1::log_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum SweepVariable {
    #[value(name = "t")]
    T,
    #[value(name = "m")]
    M,
    #[value(name = "omega_r", alias = "omega-r")]
    OmegaR,
}

impl SweepVariable {
    fn column(self) -> &'static str {
        match self {
            SweepVariable::T => "t",
            SweepVariable::M => "m",
            SweepVariable::OmegaR => "omega_r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub scale: Scale,
    /// Values of the fixed parameters; the swept one is overwritten per row.
    pub base: ReducedParams,
    pub quantities: Vec<Quantity>,
    pub options: EvalOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(Error::Config(format!(
                "need from < to, got {} .. {}",
                self.from, self.to
            )));
        }
        if self.points < 2 {
            return Err(Error::Config("need at least 2 points".into()));
        }
        if self.scale == Scale::Log && self.from <= 0.0 {
            return Err(Error::Config("log scale needs from > 0".into()));
        }
        if self.quantities.is_empty() {
            return Err(Error::Config("no quantities requested".into()));
        }
        self.options.resistance_model.validate()?;
        self.options.quadrature.validate()
    }

    pub fn grid(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log => log_grid(self.from, self.to, self.points),
            Scale::Linear => (0..self.points)
                .map(|k| {
                    if k + 1 == self.points {
                        self.to
                    } else {
                        self.from + (self.to - self.from) * k as f64 / (self.points - 1) as f64
                    }
                })
                .collect(),
        }
    }

    fn params_at(&self, x: f64) -> Result<ReducedParams> {
        let b = &self.base;
        match self.variable {
            SweepVariable::M => b.with_m(x),
            SweepVariable::OmegaR => b.with_omega_r(x),
            SweepVariable::T => self.options.resistance_model.at(b, x),
        }
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["index".to_string(), self.variable.column().to_string()];
        for q in &self.quantities {
            cols.push(q.column().to_string());
            if q.has_error() {
                cols.push(format!("{}_err", q.column()));
            }
        }
        cols.push("error".into());
        cols.join(",")
    }

    /// Rows `start_row..points`, in order. Failures are recorded per row.
    pub fn run(&self, start_row: usize) -> Result<Vec<SweepRow>> {
        self.validate()?;
        let grid = self.grid();
        let todo: Vec<(usize, f64)> = grid.into_iter().enumerate().skip(start_row).collect();
        Ok(todo
            .par_iter()
            .map(|&(index, x)| SweepRow {
                index,
                x,
                values: self
                    .params_at(x)
                    .and_then(|p| evaluate(&p, &self.quantities, &self.options))
                    .map_err(|e| e.to_string()),
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub x: f64,
    pub values: std::result::Result<Vec<ThermoResult>, String>,
}

impl SweepRow {
    pub fn csv_fields(&self, quantities: &[Quantity]) -> Vec<String> {
        let mut out = vec![self.index.to_string(), fmt_f64(self.x)];
        match &self.values {
            Ok(v) => {
                for (q, r) in quantities.iter().zip(v) {
                    out.push(fmt_f64(r.value));
                    if q.has_error() {
                        out.push(fmt_f64(r.abs_error_estimate));
                    }
                }
                out.push(String::new());
            }
            Err(msg) => {
                for q in quantities {
                    out.push(String::new());
                    if q.has_error() {
                        out.push(String::new());
                    }
                }
                out.push(msg.clone());
            }
        }
        out
    }
}
