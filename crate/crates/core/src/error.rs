use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// |M| >= L, i.e. m^2 >= 1.
    #[error("coupling bound violated: m^2 = {m2} (need 0 <= m^2 < 1)")]
    CouplingBound { m2: f64 },

    /// R = 0 with no capacitance leaves no natural frequency scale.
    #[error("no reference frequency: R = 0 and no capacitance; supply omega_ref explicitly")]
    NoReferenceFrequency,

    /// Adaptive quadrature ran out of subdivisions.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         partial = {partial:e}, error estimate = {error:e}"
    )]
    Convergence {
        partial: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite state at step {step} of replica {replica}")]
    NumericalBlowup { step: u64, replica: u32 },

    /// Two wire curves come closer than the contact cutoff.
    #[error("curves nearly touch: minimum distance {distance:e} m below cutoff {cutoff:e} m")]
    Singularity { distance: f64, cutoff: f64 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}
