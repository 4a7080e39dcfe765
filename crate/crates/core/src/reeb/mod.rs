//! Independent verification: level sets, Reeb graph extraction, labeled isomorphism.

pub mod extract;
pub mod iso;
pub mod level;

pub use extract::{
    reeb_graph, reeb_graph_with_threads, surface_reeb_graph, ReebEdge, ReebGraph, ReebNode,
};
pub use iso::{labeled_isomorphic, reeb_to_dot, reeb_to_json, IsoResult, Mismatch};
pub use level::{level_set, LevelSet};
