//! Norm hypergraphs over finite field towers.
//!
//! The crate is `no_std` with `alloc`. It provides GF(p^k) arithmetic with
//! Frobenius maps and norms ([`field`]), relative Galois groups and seeded
//! orbit transversals ([`galois`]), d-partite hypergraphs with an exhaustive
//! complete-subgraph checker ([`hypergraph`]), the norm hypergraph
//! constructions ([`construction`]) and the product-form equation systems
//! used to bound common neighbourhoods ([`krs`]).

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod combinatorics;
pub mod construction;
pub mod error;
pub mod field;
pub mod galois;
pub mod hypergraph;
pub mod krs;

pub use combinatorics::{Partitioner, Sequential};
pub use construction::{AlphaSystem, Construction, ConstructionParams, Family};
pub use error::{Error, Result};
pub use field::{FieldContext, FieldElement};
pub use galois::{RelativeGaloisGroup, TransversalOracle};
pub use hypergraph::{
    contains_complete, Completeness, DPartiteHypergraph, LinkIndex, Variant, VertexLabel,
};
pub use krs::{GridSpec, KrsSystem};
