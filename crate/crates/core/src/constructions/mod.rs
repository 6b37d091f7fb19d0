//! Explicit conjugated families and their transition matrices.

pub mod combinations;
pub mod cyclic;
pub mod kedlaya;
pub mod pochhammer;

pub use combinations::{
    combinations_family, combinations_transition, combinations_weights, k_subsets,
};
pub use cyclic::{
    cyclic_family, cyclic_profile_explicit, cyclic_weights, extract_cyclic_profile,
    lift_cyclic_profile, rotate_transition, verify_cyclic_profile, ProfileMatrix,
};
pub use kedlaya::{kedlaya_family, kedlaya_transition, kedlaya_weights};
pub use pochhammer::{falling, pochhammer, rising, Direction, PochhammerValue};
