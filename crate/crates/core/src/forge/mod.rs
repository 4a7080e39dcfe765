//! Local building blocks of the realization and the junction planner.

pub mod block;
pub mod core;
pub mod plan;

pub use self::block::{
    cap_block, cylinder_block, cylinder_block_layers, elementary_junction, fold_block, merge_fig2,
    merge_fig3, verify_block, Block, BlockKind, BlockReport, BoundaryComponent, Clause, Contract,
    Direction, ElementaryKind, Leaf,
};
pub use self::core::{
    add_collar, boundary_sum, interior_sum, normalize, realize, Core, CoreComponent, Side,
};
pub use self::plan::{build_junction, plan_junction, Elementary, Plan, PlanNode};
