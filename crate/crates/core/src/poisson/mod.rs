//! Twisted Poisson structures, their brackets, maps and cotangent algebroids.

mod algebroid;
mod maps;
mod structure;
mod symplectic;

pub use algebroid::{algebroid_bracket, check_algebroid_axioms, exact_bracket_residual, induced_action};
pub use maps::{check_poisson_map, check_pullback_phi, poisson_map_residual};
pub use structure::{coordinate_monomials, residual_witness, scalar_witness, Convention, TwistedPoissonStructure};
pub use symplectic::TwistedSymplecticStructure;

#[cfg(test)]
mod tests;
