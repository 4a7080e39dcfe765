//! Closed surfaces: canonical triangulations, classification and connected sums.

pub mod classify;
pub mod mesh;
pub mod overlay;
pub mod pieces;
pub mod scheme;

pub use classify::{
    analyze, classify_triangles, is_disk, is_sphere, ClassifiedComponent, ComponentInfo,
};
pub use mesh::{
    canonical_recipe, classify_surface, connected_sum_mesh, generate_surface, mesh_to_json,
    parse_mesh, recipe_label, recipe_layout, recipe_surface, refine_midpoint, refine_stellar,
    to_off, Anchor, AnchorPoint, RecipeLayout, SurfaceMesh,
};
pub use overlay::{common_refinement, Overlay, PointKey};
pub use pieces::{piece_surface, solid_handle, Piece, PieceSurface};
pub use scheme::PolygonScheme;
