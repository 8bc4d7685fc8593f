//! Exact computations with refined scissors congruence groups of finite local
//! rings, their specialization maps, and the tree of `SL_2` over a discretely
//! valued field.

pub mod linalg;
pub mod ring;
pub mod group_ring;
pub mod scissors;
pub mod witt;
pub mod orbit;
pub mod valuation;
pub mod tree;
pub mod global;
pub mod verify;
pub mod groups;
