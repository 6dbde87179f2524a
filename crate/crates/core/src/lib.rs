//! Exact adjoint Chevalley groups of simply-laced type over commutative rings.

pub mod chevalley;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod linalg;
pub mod localtools;
pub mod matrix;
pub mod pipeline;
pub mod relations;
pub mod rigidity;
pub mod rings;
pub mod rootsys;
pub mod spectral;

pub use error::{Error, Result};
pub use rings::{Elem, Ring, RingKind};
