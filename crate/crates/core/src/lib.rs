//! Exact computation around the Erdős–Ko–Rado theorem for the general
//! linear group GL_n(F_q).
//!
//! Two invertible matrices `T`, `S` *intersect* when `aT = aS` for some
//! non-zero row vector `a`, i.e. when `T - S` is singular. An intersecting
//! family has at most `q^(n(n-1)/2) * prod_{i=1}^{n-1} (q^i - 1)` members,
//! and the stabilizer of a non-zero vector attains this. The crate builds
//! the objects behind that statement (spreads, the cocliques they induce,
//! vector stabilizers), confirms the bound by exact search for small
//! parameters, and writes JSON certificates of each run.

pub mod certificate;
pub mod clique;
pub mod ekr;
pub mod error;
pub mod gfq;
pub mod glgroup;
pub mod igraph;
pub mod matfq;
pub mod spread;
pub mod symbase;

pub use error::{Error, Result};
pub use gfq::{ExtensionField, Felt, Field};
pub use glgroup::{Family, GroupParams};
pub use matfq::{MatF, Subspace, VecF};
