//! Energy-aware hybrid drive/fly path planning on rasterised 2.5D maps.

mod grid;
mod search;
mod smooth;

pub use grid::{inflate, load_grid, GridWorld, MapError, MAX_AIR_LAYERS, MAX_CELLS};
pub use search::{
    heuristic, path_energy, plan, plan_traced, segment_cost, successors, CostModel, Edge,
    Expansion, HybridPath, HybridState, Mode, PlannerError,
};
pub use smooth::{shortcut_clear, smooth};
