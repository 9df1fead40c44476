//! Simulation and numerical property certification for skew product flows
//! over the dyadic odometer with circle fibers.
//!
//! The flow steps the odometer by add-one-with-carry and moves the circle
//! fiber by a cocycle of closed-form homeomorphisms (exact rational
//! rotations and arc power maps) selected by the first digit block
//! containing a zero. Because the cocycle algebra is closed under
//! composition, inversion, and powers, the flow can be fast-forwarded to the
//! block recurrence times `m_k = 2^(n_1+..+n_k)` — far beyond direct
//! stepping — in O(k) operations, which is what the rigidity, proximality,
//! almost-periodicity, Li-Yorke, and orbit-density certifications build on.

pub mod analysis;
pub mod circle;
pub mod cocycle;
pub mod error;
pub mod flow;
pub mod odometer;
pub mod presets;

pub use circle::{arc_metric, CircleAngle, CircleHomeo, Turns};
pub use cocycle::{CocycleFamily, FamilyConfig, TSequence, ValidationReport};
pub use error::{Error, Result};
pub use flow::FlowPoint;
pub use odometer::{BlockSchedule, OdometerPoint};
