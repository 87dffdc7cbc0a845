//! Orbits and separating invariants of the orthogonal group `O2+(F_q)`
//! acting diagonally on `m`-tuples of plane vectors.

pub mod error;
pub mod gf;
pub mod group;
pub mod invariants;
pub mod invspace;
pub mod orbits;
pub mod poly;
pub mod separate;

pub use error::{Error, Result};
pub use gf::{Fe, Field, MAX_ORDER};
pub use group::{Group, GroupElement, Kind, PointTuple, Vector2};
pub use invariants::{Descriptor, InvariantSet, Manifest, ManifestMember, Member};
pub use invspace::{DenseMatrix, GradedInvariantBasis};
pub use orbits::{CanonicalForm, OrbitCount, OrbitType, Shape};
pub use poly::{Monomial, Poly};
pub use separate::{Fingerprint, OrbitTable, SeparationReport, Witness};
