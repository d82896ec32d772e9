//! Angular control charts for monitoring the reliability of multi-state
//! systems.
//!
//! Each state transition gets a horizontal state line at its median time to
//! failure; an observation's status follows from the angle of the ray from
//! the origin to its point. Limit angles depend only on the distribution
//! shape, the false-alarm probability and the drawing scale.

pub mod acl;
pub mod chart;
pub mod distributions;
pub mod error;
pub mod oracle;
pub mod render;
pub mod scales;
pub mod simulate;

pub use acl::{Angle, AngularLimits, FalseAlarmProb};
pub use chart::{
    build_chart, median_split, Chart, ClassifiedPoint, Design, Observation, Status, StateTransition,
    SystemModel,
};
pub use distributions::{DistributionFamily, DistributionSpec};
pub use error::{AccError, Result};
pub use render::{render_svg, RenderOptions};
pub use scales::DrawingScale;
