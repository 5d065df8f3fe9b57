//! Energy demand, fuel consumption, and driving-behavior analysis for
//! car-following platoons, plus a synthetic platoon simulator.
//!
//! The crate is organized around a small pipeline:
//!
//! 1. [`trajectory`] — per-vehicle kinematic time series on a uniform grid:
//!    resampling, numerical differentiation, road-grade derivation.
//! 2. [`platoon`] — synchronized multi-vehicle datasets and inter-vehicle
//!    spacing.
//! 3. [`energy`] — instantaneous tractive power and three fuel-rate models
//!    (VT-micro, VSP, ARRB), aggregated to kWh/100 km and L/100 km.
//! 4. [`analysis`] — time/space-gap statistics, steady/perturbation
//!    segmentation, L2 string-stability ratios, speed–acceleration joint
//!    distributions and their Pearson correlation.
//! 5. [`sim`] — a scripted leader with CTH-PID ACC followers and IDM
//!    human-like followers, used to generate verification datasets.
//!
//! The crate is `no_std` (with `alloc`); all float math is routed through
//! `libm`. File I/O, CSV schemas, and the command-line front end live in the
//! companion `platoon-cli` crate.

#![no_std]
#![warn(missing_debug_implementations)]
// validation uses `!(x > 0.0)` so that NaN fails the check too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod energy;
pub(crate) mod float;
pub mod numeric;
pub mod platoon;
pub mod sim;
pub mod trajectory;

pub use analysis::{
    GapSeries, Histogram, JointDistribution, SegmentClass, SegmentLabel, SegmentParams,
    StabilityMetrics, StabilityVerdict, TimeGapReference,
};
pub use energy::{
    ArrbParams, EnergyReport, FuelModel, PlatoonAssessment, VehicleParams, VspParams,
    VtMicroCoefficients,
};
pub use platoon::{DrivingMode, PlatoonDataset};
pub use sim::{
    AccControllerParams, FollowerModel, HumanModelParams, LeaderCycle, SimConfig, SpeedEvent,
};
pub use trajectory::{Trajectory, TrajectorySample};
