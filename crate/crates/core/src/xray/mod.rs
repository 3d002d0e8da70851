//! The transform `X`, its dual, the bilinear form and the exact set
//! machinery they run on.

pub mod fiber;
pub mod quadrature;
pub mod sets;
pub mod superlevel;
pub mod transform;

pub use fiber::{fiber_measure, line_fiber, Family};
pub use quadrature::{GridFunction, QuadMethod, QuadSpec};
pub use sets::{AxisBox, BoxUnionSet, FiberSet, Interval};
pub use superlevel::{superlevel_report, superlevel_set, Superlevel, SuperlevelGrid, SuperlevelReport};
pub use transform::{adjoint_pairing, apply_x, apply_x_star, bilinear_form, dual_indicator, x_indicator, Integrand};
