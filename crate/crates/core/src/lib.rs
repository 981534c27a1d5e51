//! Partitioning, scheduling and floorplanning of task modules on partially
//! reconfigurable FPGAs with heterogeneous resource columns.

pub mod anneal;
pub mod chip;
pub mod error;
pub mod graph;
pub mod ilp;
pub mod pst;
pub mod report;
pub mod shapes;

pub use chip::{ChipModel, ColumnKind, Rect, ResourceVector};
pub use error::{Error, Result};
pub use graph::{BenchSpec, Edge, TaskGraph, TaskModule};
pub use shapes::{Shape, ShapeGenConfig, ShapeList};
pub use pst::{CostWeights, Placement, Pst, ScheduleResult, Solution};
pub use anneal::{anneal, SaConfig};
pub use ilp::{build_model, export_lp, solve, IlpModel, ShapeSelection, SolveResult, SolveStatus};
pub use report::{compute_rrt, render_svg, run_pipeline, PipelineConfig, RunReport, Rrt};
