//! Synchronized multi-vehicle datasets: a platoon is an ordered list of
//! trajectories on one shared time grid plus per-pair inter-vehicle spacing
//! (IVS) series.

use alloc::string::String;
use alloc::vec::Vec;

use crate::trajectory::{Trajectory, TrajectoryError};

/// Absolute tolerance for comparing timestamps across vehicles.
const TIME_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlatoonError {
    #[error("platoon needs at least one vehicle")]
    NoVehicles,
    #[error("vehicle {vehicle} is not on the shared time grid")]
    GridMismatch { vehicle: String },
    #[error("pair index {pair} out of range for {vehicles} vehicles")]
    PairOutOfRange { pair: usize, vehicles: usize },
    #[error("ivs series for pair {pair} has {got} samples, expected {expected}")]
    IvsLengthMismatch {
        pair: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-positive ivs {value} for pair {pair} at t = {time}: vehicles overlap")]
    NonPositiveIvs { pair: usize, time: f64, value: f64 },
    #[error("pair {pair} has no recorded positions to compute ivs from")]
    MissingPositions { pair: usize },
    #[error("pair {pair} positions were integrated from speed; their origins are not comparable")]
    DerivedPositions { pair: usize },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// Which driving mode produced a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DrivingMode {
    Human,
    Acc,
    Mixed,
}

impl DrivingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DrivingMode::Human => "human",
            DrivingMode::Acc => "acc",
            DrivingMode::Mixed => "mixed",
        }
    }
}

impl core::str::FromStr for DrivingMode {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "human" => Ok(DrivingMode::Human),
            "acc" => Ok(DrivingMode::Acc),
            "mixed" => Ok(DrivingMode::Mixed),
            _ => Err("expected one of: human, acc, mixed"),
        }
    }
}

impl core::fmt::Display for DrivingMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered set of synchronized vehicle trajectories. Index 0 is the platoon
/// leader; pair `k` is the gap between vehicle `k` and vehicle `k + 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PlatoonDataset {
    vehicles: Vec<Trajectory>,
    ivs: Vec<Option<Vec<f64>>>,
    mode: DrivingMode,
    campaign: Option<String>,
    route: Option<String>,
}

impl PlatoonDataset {
    /// Vehicle order is fixed: the first trajectory is the leader.
    pub fn new(vehicles: Vec<Trajectory>, mode: DrivingMode) -> Result<Self, PlatoonError> {
        if vehicles.is_empty() {
            return Err(PlatoonError::NoVehicles);
        }
        let reference = vehicles[0].t();
        for veh in &vehicles[1..] {
            let same = veh.t().len() == reference.len()
                && veh
                    .t()
                    .iter()
                    .zip(reference.iter())
                    .all(|(&a, &b)| (a - b).abs() <= TIME_MATCH_TOL);
            if !same {
                return Err(PlatoonError::GridMismatch {
                    vehicle: String::from(veh.vehicle_id()),
                });
            }
        }
        let pairs = vehicles.len().saturating_sub(1);
        Ok(Self {
            vehicles,
            ivs: (0..pairs).map(|_| None).collect(),
            mode,
            campaign: None,
            route: None,
        })
    }

    pub fn with_campaign(mut self, name: impl Into<String>, route: Option<String>) -> Self {
        self.campaign = Some(name.into());
        self.route = route;
        self
    }

    pub fn vehicles(&self) -> &[Trajectory] {
        &self.vehicles
    }

    pub fn vehicle(&self, i: usize) -> &Trajectory {
        &self.vehicles[i]
    }

    pub fn leader(&self) -> &Trajectory {
        &self.vehicles[0]
    }

    pub fn n_vehicles(&self) -> usize {
        self.vehicles.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.ivs.len()
    }

    pub fn mode(&self) -> DrivingMode {
        self.mode
    }

    pub fn campaign(&self) -> Option<&str> {
        self.campaign.as_deref()
    }

    pub fn route(&self) -> Option<&str> {
        self.route.as_deref()
    }

    pub fn ivs(&self, pair: usize) -> Option<&[f64]> {
        self.ivs.get(pair).and_then(|s| s.as_deref())
    }

    pub fn t(&self) -> &[f64] {
        self.vehicles[0].t()
    }

    pub fn len(&self) -> usize {
        self.vehicles[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn uniform_dt(&self) -> Option<f64> {
        self.vehicles[0].uniform_dt()
    }

    /// Attach a recorded ivs series for pair `pair`.
    pub fn set_ivs(&mut self, pair: usize, series: Vec<f64>) -> Result<(), PlatoonError> {
        if pair >= self.ivs.len() {
            return Err(PlatoonError::PairOutOfRange {
                pair,
                vehicles: self.vehicles.len(),
            });
        }
        if series.len() != self.len() {
            return Err(PlatoonError::IvsLengthMismatch {
                pair,
                expected: self.len(),
                got: series.len(),
            });
        }
        if let Some(i) = series.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(PlatoonError::NonPositiveIvs {
                pair,
                time: self.t()[i],
                value: series[i],
            });
        }
        self.ivs[pair] = Some(series);
        Ok(())
    }

    /// Fill in missing ivs series from recorded positions:
    /// `ivs = s_front - s_rear - vehicle_length`. Series provided on input
    /// pass through unchanged.
    ///
    /// Positions that were integrated from speed have arbitrary origins and
    /// are rejected; a non-positive computed gap means inconsistent data and
    /// is reported with the pair and time.
    pub fn compute_ivs(&self, vehicle_length: f64) -> Result<Self, PlatoonError> {
        let mut out = self.clone();
        for pair in 0..out.ivs.len() {
            if out.ivs[pair].is_some() {
                continue;
            }
            let front = &self.vehicles[pair];
            let rear = &self.vehicles[pair + 1];
            if front.distance_is_derived() || rear.distance_is_derived() {
                return Err(PlatoonError::DerivedPositions { pair });
            }
            let (Some(s_front), Some(s_rear)) = (front.s(), rear.s()) else {
                return Err(PlatoonError::MissingPositions { pair });
            };
            let series: Vec<f64> = s_front
                .iter()
                .zip(s_rear.iter())
                .map(|(&f, &r)| f - r - vehicle_length)
                .collect();
            if let Some(i) = series.iter().position(|&x| x <= 0.0) {
                return Err(PlatoonError::NonPositiveIvs {
                    pair,
                    time: self.t()[i],
                    value: series[i],
                });
            }
            out.ivs[pair] = Some(series);
        }
        Ok(out)
    }

    /// Resample every vehicle and ivs series onto the uniform grid of step
    /// `dt`.
    pub fn resample(&self, dt: f64) -> Result<Self, PlatoonError> {
        let vehicles: Result<Vec<_>, _> = self.vehicles.iter().map(|v| v.resample(dt)).collect();
        let vehicles = vehicles?;
        let new_t = vehicles[0].t().to_vec();
        let old_t = self.t();
        let ivs = self
            .ivs
            .iter()
            .map(|series| {
                series.as_ref().map(|ys| {
                    new_t
                        .iter()
                        .map(|&tq| crate::numeric::interp_linear(old_t, ys, tq))
                        .collect()
                })
            })
            .collect();
        Ok(Self {
            vehicles,
            ivs,
            mode: self.mode,
            campaign: self.campaign.clone(),
            route: self.route.clone(),
        })
    }

    /// Derive acceleration for every vehicle (see
    /// [`Trajectory::derive_acceleration`]).
    pub fn derive_accelerations(&self, window: usize, force: bool) -> Result<Self, PlatoonError> {
        let vehicles: Result<Vec<_>, _> = self
            .vehicles
            .iter()
            .map(|v| v.derive_acceleration(window, force))
            .collect();
        Ok(Self {
            vehicles: vehicles?,
            ivs: self.ivs.clone(),
            mode: self.mode,
            campaign: self.campaign.clone(),
            route: self.route.clone(),
        })
    }

    /// Integrate distance from speed for vehicles without a recorded
    /// distance channel (see [`Trajectory::derive_distance`]).
    pub fn derive_distances(&self) -> Self {
        Self {
            vehicles: self.vehicles.iter().map(|v| v.derive_distance()).collect(),
            ivs: self.ivs.clone(),
            mode: self.mode,
            campaign: self.campaign.clone(),
            route: self.route.clone(),
        }
    }

    /// Derive the grade channel for every vehicle.
    pub fn derive_grades(&self) -> Self {
        Self {
            vehicles: self.vehicles.iter().map(|v| v.derive_grade()).collect(),
            ivs: self.ivs.clone(),
            mode: self.mode,
            campaign: self.campaign.clone(),
            route: self.route.clone(),
        }
    }

    /// Restrict the dataset to samples with `t` in `[t_from, t_to]`.
    pub fn window(&self, t_from: f64, t_to: f64) -> Result<Self, PlatoonError> {
        let t = self.t();
        let lo = t.partition_point(|&ti| ti < t_from);
        let hi = t.partition_point(|&ti| ti <= t_to);
        if lo >= hi {
            return Err(PlatoonError::Trajectory(TrajectoryError::Empty));
        }
        let vehicles: Result<Vec<_>, _> = self
            .vehicles
            .iter()
            .map(|v| v.window(t_from, t_to))
            .collect();
        Ok(Self {
            vehicles: vehicles?,
            ivs: self
                .ivs
                .iter()
                .map(|s| s.as_ref().map(|ys| ys[lo..hi].to_vec()))
                .collect(),
            mode: self.mode,
            campaign: self.campaign.clone(),
            route: self.route.clone(),
        })
    }
}
