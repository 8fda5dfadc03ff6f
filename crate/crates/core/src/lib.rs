pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod langevin;
pub mod model;
pub mod quadrature;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    bose_factor, from_reduced, response_denominator, to_reduced, to_reduced_with_reference,
    PhysicalParams, ReducedParams, ThermoResult, UnitScale, BOLTZMANN, HBAR,
};
pub use quadrature::QuadratureConfig;
pub use spectral::{
    force_reduced, h_factor, interaction_entropy, interaction_free_energy, self_free_energy,
    spectral_density, total_entropy, ResistanceModel, SpectralQuantity,
};
