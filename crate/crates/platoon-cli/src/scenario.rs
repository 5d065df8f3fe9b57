//! Scenario files describing a simulation run: the leader cycle, the
//! follower chain, and integration settings, with named presets for the
//! shipped stable/unstable gain sets and leader cycles.

use std::path::Path;

use anyhow::{bail, Context, Result};
use platoon_core::sim::{
    presets, AccControllerParams, FollowerModel, GradePoint, HumanModelParams, LeaderCycle,
    NoiseConfig, SimConfig, SpeedEvent,
};
use serde::{Deserialize, Serialize};

/// Scenario file as written by the user; resolves into core types.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub leader: LeaderEntry,
    pub followers: Vec<FollowerEntry>,
    #[serde(default)]
    pub sim: SimEntry,
    #[serde(default)]
    pub campaign: Option<CampaignEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignEntry {
    pub name: String,
    #[serde(default)]
    pub route: Option<String>,
}

/// Leader cycle, either a named preset (with optional field overrides) or a
/// fully explicit profile.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LeaderEntry {
    /// `perturbation` (triangle-wave oscillation phase) or `plateau`
    /// (multi-speed cruise).
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub base_speed: Option<f64>,
    #[serde(default)]
    pub duration: Option<f64>,
    #[serde(default)]
    pub events: Option<Vec<SpeedEvent>>,
    #[serde(default)]
    pub grade: Option<Vec<GradePoint>>,
}

impl LeaderEntry {
    pub fn resolve(&self) -> Result<LeaderCycle> {
        let mut cycle = match self.preset.as_deref() {
            None => LeaderCycle {
                base_speed: self.base_speed.ok_or_else(|| {
                    anyhow::anyhow!("leader: base_speed required without a preset")
                })?,
                duration: self
                    .duration
                    .ok_or_else(|| anyhow::anyhow!("leader: duration required without a preset"))?,
                events: Vec::new(),
                grade: Vec::new(),
            },
            Some("perturbation") => presets::perturbation_cycle(),
            Some("plateau") => presets::plateau_cycle(),
            Some(other) => bail!("leader: unknown preset '{other}'"),
        };
        if let Some(base) = self.base_speed {
            if self.preset.is_some() {
                cycle.base_speed = base;
            }
        }
        if let Some(duration) = self.duration {
            cycle.duration = duration;
        }
        if let Some(events) = &self.events {
            cycle.events = events.clone();
        }
        if let Some(grade) = &self.grade {
            cycle.grade = grade.clone();
        }
        Ok(cycle)
    }
}

/// One follower slot; `count` expands it into several identical vehicles.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FollowerEntry {
    Acc {
        /// `stable` or `unstable`; explicit fields override the preset.
        #[serde(default)]
        preset: Option<String>,
        #[serde(default)]
        count: Option<usize>,
        #[serde(flatten)]
        overrides: AccOverrides,
    },
    Human {
        #[serde(default)]
        count: Option<usize>,
        #[serde(flatten)]
        overrides: HumanOverrides,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AccOverrides {
    pub time_headway: Option<f64>,
    pub standstill_gap: Option<f64>,
    pub kp: Option<f64>,
    pub ki: Option<f64>,
    pub kd: Option<f64>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub v_set: Option<f64>,
}

impl AccOverrides {
    fn apply(&self, mut p: AccControllerParams) -> AccControllerParams {
        if let Some(x) = self.time_headway {
            p.time_headway = x;
        }
        if let Some(x) = self.standstill_gap {
            p.standstill_gap = x;
        }
        if let Some(x) = self.kp {
            p.kp = x;
        }
        if let Some(x) = self.ki {
            p.ki = x;
        }
        if let Some(x) = self.kd {
            p.kd = x;
        }
        if let Some(x) = self.a_min {
            p.a_min = x;
        }
        if let Some(x) = self.a_max {
            p.a_max = x;
        }
        if let Some(x) = self.v_set {
            p.v_set = x;
        }
        p
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct HumanOverrides {
    pub desired_speed: Option<f64>,
    pub time_headway: Option<f64>,
    pub min_gap: Option<f64>,
    pub max_accel: Option<f64>,
    pub comfortable_decel: Option<f64>,
    pub exponent: Option<f64>,
}

impl HumanOverrides {
    fn apply(&self, mut p: HumanModelParams) -> HumanModelParams {
        if let Some(x) = self.desired_speed {
            p.desired_speed = x;
        }
        if let Some(x) = self.time_headway {
            p.time_headway = x;
        }
        if let Some(x) = self.min_gap {
            p.min_gap = x;
        }
        if let Some(x) = self.max_accel {
            p.max_accel = x;
        }
        if let Some(x) = self.comfortable_decel {
            p.comfortable_decel = x;
        }
        if let Some(x) = self.exponent {
            p.exponent = x;
        }
        p
    }
}

impl FollowerEntry {
    pub fn resolve(&self, index: usize) -> Result<Vec<FollowerModel>> {
        match self {
            FollowerEntry::Acc {
                preset,
                count,
                overrides,
            } => {
                let base = match preset.as_deref() {
                    None | Some("stable") => AccControllerParams::stable_preset(),
                    Some("unstable") => AccControllerParams::unstable_preset(),
                    Some(other) => bail!("followers[{index}]: unknown acc preset '{other}'"),
                };
                let params = overrides.apply(base);
                Ok(vec![FollowerModel::Acc(params); count.unwrap_or(1)])
            }
            FollowerEntry::Human { count, overrides } => {
                let params = overrides.apply(HumanModelParams::default());
                Ok(vec![FollowerModel::Human(params); count.unwrap_or(1)])
            }
        }
    }
}

/// Integration settings; mirrors [`SimConfig`] with everything optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SimEntry {
    pub sim_dt: Option<f64>,
    pub output_dt: Option<f64>,
    pub vehicle_length: Option<f64>,
    pub noise: Option<NoiseConfig>,
}

impl SimEntry {
    fn resolve(&self) -> SimConfig {
        let default = SimConfig::default();
        SimConfig {
            sim_dt: self.sim_dt.unwrap_or(default.sim_dt),
            output_dt: self.output_dt.unwrap_or(default.output_dt),
            vehicle_length: self.vehicle_length.unwrap_or(default.vehicle_length),
            noise: self.noise,
        }
    }
}

/// A scenario with every preset and default expanded, ready to run and to
/// echo into output headers.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedScenario {
    pub cycle: LeaderCycle,
    pub followers: Vec<FollowerModel>,
    pub config: SimConfig,
    pub campaign: Option<CampaignEntry>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario file {}", path.display()))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)
                .with_context(|| format!("invalid scenario json in {}", path.display()))
        } else {
            toml::from_str(&text)
                .with_context(|| format!("invalid scenario toml in {}", path.display()))
        }
    }

    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let cycle = self.leader.resolve()?;
        let mut followers = Vec::new();
        for (i, entry) in self.followers.iter().enumerate() {
            followers.extend(entry.resolve(i)?);
        }
        if followers.is_empty() {
            bail!("scenario declares no followers");
        }
        Ok(ResolvedScenario {
            cycle,
            followers,
            config: self.sim.resolve(),
            campaign: self.campaign.clone(),
        })
    }
}
