//! Labeled graphs, surface labels and the realizability checker.

pub mod graph;
pub mod label;
pub mod realizability;

pub use graph::{
    graph_to_dot, parse_graph, serialize_graph, Edge, LabeledGraph, Vertex, VertexProfile,
};
pub use label::{connected_sum_label, euler_char, odd_count, SurfaceLabel};
pub use realizability::{check_realizable, Realizability, VertexDiagnostic, Violation};
