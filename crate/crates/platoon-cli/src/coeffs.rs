//! Model-coefficient files. The shipped defaults are embedded and versioned;
//! `--coeffs` points at a file with the same layout, and any omitted section
//! or field falls back to the default.

use std::path::Path;

use anyhow::{bail, Context, Result};
use platoon_core::energy::{ArrbParams, FuelModel, VehicleParams, VspParams, VtMicroCoefficients};
use serde::{Deserialize, Serialize};

/// Bundled defaults, the audit trail for every coefficient in use.
pub const DEFAULT_COEFFS_TOML: &str = include_str!("../assets/default_coeffs.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoeffSet {
    pub version: u32,
    pub vehicle: VehicleParams,
    pub vt_micro: VtMicroCoefficients,
    pub vsp: VspParams,
    pub arrb: ArrbParams,
    /// Per-vehicle overrides, applied only when platoon normalization is
    /// switched off.
    pub per_vehicle: Vec<PerVehicleParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerVehicleParams {
    pub vehicle: String,
    #[serde(default)]
    pub mass: Option<f64>,
    #[serde(default)]
    pub f0: Option<f64>,
    #[serde(default)]
    pub f1: Option<f64>,
    #[serde(default)]
    pub f2: Option<f64>,
    #[serde(default)]
    pub length: Option<f64>,
}

impl Default for CoeffSet {
    fn default() -> Self {
        Self {
            version: 1,
            vehicle: VehicleParams::default(),
            vt_micro: VtMicroCoefficients::default(),
            vsp: VspParams::default(),
            arrb: ArrbParams::default(),
            per_vehicle: Vec::new(),
        }
    }
}

impl CoeffSet {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read coefficients file {}", path.display()))?;
        let set: CoeffSet = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)
                .with_context(|| format!("invalid coefficients json in {}", path.display()))?
        } else {
            toml::from_str(&text)
                .with_context(|| format!("invalid coefficients toml in {}", path.display()))?
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            bail!("unsupported coefficients file version {}", self.version);
        }
        self.vehicle
            .validate()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        self.vsp.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(())
    }

    /// The fuel models selected by name, in the order given.
    pub fn models(&self, names: &[String]) -> Result<Vec<FuelModel>> {
        names
            .iter()
            .map(|name| match name.as_str() {
                "vt_micro" => Ok(FuelModel::VtMicro(self.vt_micro.clone())),
                "vsp" => Ok(FuelModel::Vsp(self.vsp)),
                "arrb" => Ok(FuelModel::Arrb(self.arrb)),
                other => bail!("unknown fuel model '{other}' (expected vt_micro, vsp, arrb)"),
            })
            .collect()
    }

    /// Vehicle parameters for each id: the common set under normalization,
    /// otherwise with per-vehicle overrides applied.
    pub fn vehicle_params(&self, ids: &[&str], normalize: bool) -> Vec<VehicleParams> {
        ids.iter()
            .map(|id| {
                let mut p = self.vehicle;
                if !normalize {
                    if let Some(over) = self.per_vehicle.iter().find(|o| o.vehicle == *id) {
                        if let Some(x) = over.mass {
                            p.mass = x;
                        }
                        if let Some(x) = over.f0 {
                            p.f0 = x;
                        }
                        if let Some(x) = over.f1 {
                            p.f1 = x;
                        }
                        if let Some(x) = over.f2 {
                            p.f2 = x;
                        }
                        if let Some(x) = over.length {
                            p.length = x;
                        }
                    }
                }
                p
            })
            .collect()
    }
}
