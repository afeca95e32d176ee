//! Intersection homology and blown-up intersection cohomology of filtered
//! simplicial pseudomanifolds, computed exactly over ℤ, ℚ and ℤ/m.

pub mod blowup;
pub mod chains;
pub mod complex;
pub mod corpus;
pub mod duality;
pub mod harness;
pub mod linalg;
pub mod perverse;
