//! Library side of the `wirenoise` command: point evaluation and sweeps.

pub mod eval;
pub mod sweep;
