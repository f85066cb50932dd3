//! Chart-level Riemannian geometry: jets, curvature, differential forms,
//! hypersurfaces, special Killing forms, metric cones, holonomy estimation
//! and a search for totally umbilical hypersurfaces.
//!
//! Everything is evaluated on explicit coordinate charts with derivatives
//! supplied by truncated Taylor jets, so identities are checked to near
//! machine precision rather than finite-difference accuracy.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cones;
pub mod error;
pub mod fd;
pub mod field;
pub mod forms;
pub mod g2;
pub mod holonomy;
pub mod hypersurface;
pub mod jet;
pub mod killing;
pub mod linalg;
pub mod residual;
pub mod riemann;
pub mod search;
pub mod zoo;

pub use error::{GeomError, Result};
pub use jet::Jet;
pub use residual::ResidualSummary;
