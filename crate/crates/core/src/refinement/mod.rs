//! The method of refinements on box-union set pairs: rich-fiber passes,
//! parameter towers for both incidence maps, and Jacobian-weighted image
//! volumes.

pub mod step;
pub mod tower;

pub use step::{refine_step, RefineStats, Refined, Weighted, DEFAULT_KEEP};
pub use tower::{
    build_tower, build_tower_at, default_cells_per_fiber, enumerate_levels_2d, image_volume_lower_bound,
    rasterized_image_area_2d, tower_kind, tower_report, tower_side, verify_structure, JacobianSource, Level,
    LevelReport, StepFamily, StructureCheck, Tower, TowerOptions, TowerReport, TowerSets,
};
