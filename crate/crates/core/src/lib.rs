//! Flying-trot control pipeline for a small quadruped: leg kinematics, gait
//! clock, foot trajectory planning, posture stabilization, virtual-model leg
//! compliance, a rigid-trunk simulator and a scenario harness.

// Validation uses `!(x > 0.0)` so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compliance;
pub mod gait_clock;
pub mod harness;
pub mod kinematics;
pub mod simulator;
pub mod stabilizer;
pub mod trajectory;
