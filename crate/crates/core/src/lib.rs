//! Planar-code quantum memory: measurement-only encoding and decoding of an
//! unknown qubit, an exact stabilizer engine to verify it, a Pauli-frame Monte
//! Carlo of noisy storage with matching decoding, and the analytic bounds the
//! simulations are compared against.

pub mod bits;
pub mod bounds;
pub mod decoder;
pub mod error;
pub mod lattice;
pub mod montecarlo;
pub mod pauli;
pub mod protocols;
pub mod tableau;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{CheckKind, LatticeGeometry, ReadoutPaths, Region, Sector, Site, TriangleSplit};
pub use pauli::{Pauli, PauliOperator};
pub use tableau::{BasisState, Measurement, Membership, Tableau};
