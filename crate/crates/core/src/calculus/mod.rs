//! Antisymmetric tensor calculus on a single chart.

mod map;
mod ops;
mod schouten;
mod tensor;

pub use map::PolyMap;
pub use ops::{
    apply_vector, commutator, eval_form, eval_multivector, ext_d, interior, interior_form,
    lie_derivative, pairing, wedge, wedge_all,
};
pub use schouten::schouten;
pub use tensor::{index_tuples, sort_sign, Index, TensorField, Variance};
