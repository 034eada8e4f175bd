//! Design and planning models for hybrid land-air robots: powertrain curve
//! fitting, hover endurance and battery sizing, folding-arm torque loads,
//! energy-aware hybrid path planning and multi-criteria fleet comparison.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod endurance;
pub mod evaluation;
pub mod planner;
pub mod powertrain;
pub mod spec;
