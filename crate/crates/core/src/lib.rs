//! Construction and verification of 3-manifolds with prescribed Reeb graphs.

pub mod assemble;
pub mod complex;
pub mod corpus;
pub mod error;
pub mod forge;
pub mod model;
pub mod rational;
pub mod reeb;
pub mod surface;
pub mod unionfind;

pub use assemble::{
    assemble, validate_manifold, AssembleOptions, Element, Manifold3, ManifoldReport, Provenance,
};
pub use error::{AssembleError, ForgeError, ParseError, ReebError, SurfaceError};
pub use forge::{build_junction, plan_junction, verify_block, Block, Plan};
pub use model::*;
pub use rational::Rational;
pub use reeb::{labeled_isomorphic, reeb_graph, IsoResult, ReebGraph};
pub use surface::{classify_surface, generate_surface, SurfaceMesh};
