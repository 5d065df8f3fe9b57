//! Column-mapping schema for raw campaign CSV files: which column carries
//! which quantity, for which vehicle, in which unit.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Quantity a CSV column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Shared timestamp column.
    Time,
    Speed,
    Accel,
    Position,
    Altitude,
    /// Inter-vehicle spacing; bound to the rear vehicle of the pair.
    Ivs,
}

/// Input unit of a column, converted to SI on ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "s")]
    Seconds,
    #[serde(rename = "ms")]
    Milliseconds,
    #[serde(rename = "m/s")]
    MetersPerSecond,
    #[serde(rename = "km/h")]
    KilometersPerHour,
    #[serde(rename = "m")]
    Meters,
    #[serde(rename = "km")]
    Kilometers,
}

impl Unit {
    /// Multiplier taking a value in this unit to SI.
    pub fn to_si(self) -> f64 {
        match self {
            Unit::Seconds | Unit::MetersPerSecond | Unit::Meters => 1.0,
            Unit::Milliseconds => 1e-3,
            Unit::KilometersPerHour => 1.0 / 3.6,
            Unit::Kilometers => 1e3,
        }
    }

    fn valid_for(self, role: Role) -> bool {
        matches!(
            (role, self),
            (Role::Time, Unit::Seconds | Unit::Milliseconds)
                | (Role::Speed, Unit::MetersPerSecond | Unit::KilometersPerHour)
                | (
                    Role::Position | Role::Altitude | Role::Ivs,
                    Unit::Meters | Unit::Kilometers
                )
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    /// Header name in the CSV file.
    pub name: String,
    pub role: Role,
    /// Vehicle the column belongs to; required for every role except time.
    /// For ivs columns this is the rear vehicle of the pair.
    #[serde(default)]
    pub vehicle: Option<String>,
    /// Input unit; defaults to SI. Accelerations are always m/s².
    #[serde(default)]
    pub unit: Option<Unit>,
}

impl ColumnSpec {
    pub fn si_factor(&self) -> f64 {
        self.unit.map_or(1.0, Unit::to_si)
    }
}

/// Declarative mapping from a campaign CSV to a platoon dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    /// Vehicle ids in platoon order, leader first.
    pub vehicles: Vec<String>,
    /// Driving-mode label for the dataset (human, acc, mixed).
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub campaign: Option<String>,
    #[serde(default)]
    pub route: Option<String>,
    pub columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read schema file {}", path.display()))?;
        let schema: Schema = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)
                .with_context(|| format!("invalid schema json in {}", path.display()))?
        } else {
            toml::from_str(&text)
                .with_context(|| format!("invalid schema toml in {}", path.display()))?
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vehicles.is_empty() {
            bail!("schema declares no vehicles");
        }
        let time_columns = self.columns.iter().filter(|c| c.role == Role::Time).count();
        if time_columns != 1 {
            bail!("schema must declare exactly one time column, found {time_columns}");
        }
        if let Some(mode) = &self.mode {
            mode.parse::<platoon_core::DrivingMode>()
                .map_err(|e| anyhow::anyhow!("mode '{mode}': {e}"))?;
        }
        for col in &self.columns {
            if let Some(unit) = col.unit {
                if !unit.valid_for(col.role) {
                    bail!(
                        "column '{}': unit {unit:?} is not valid for role {:?}",
                        col.name,
                        col.role
                    );
                }
            }
            match col.role {
                Role::Time => {
                    if col.vehicle.is_some() {
                        bail!(
                            "column '{}': time columns are shared, not per-vehicle",
                            col.name
                        );
                    }
                }
                _ => {
                    let Some(vehicle) = &col.vehicle else {
                        bail!("column '{}': role {:?} needs a vehicle", col.name, col.role);
                    };
                    if !self.vehicles.contains(vehicle) {
                        bail!(
                            "column '{}': vehicle '{vehicle}' is not in the platoon order",
                            col.name
                        );
                    }
                    if col.role == Role::Ivs && vehicle == &self.vehicles[0] {
                        bail!(
                            "column '{}': ivs columns bind to the rear vehicle of a pair, \
                             not the leader",
                            col.name
                        );
                    }
                }
            }
        }
        for vehicle in &self.vehicles {
            let has_speed = self
                .columns
                .iter()
                .any(|c| c.role == Role::Speed && c.vehicle.as_deref() == Some(vehicle));
            if !has_speed {
                bail!("vehicle '{vehicle}' has no speed column");
            }
        }
        Ok(())
    }

    /// Column of the given role bound to the given vehicle.
    pub fn column_for(&self, role: Role, vehicle: &str) -> Option<&ColumnSpec> {
        self.columns
            .iter()
            .find(|c| c.role == role && c.vehicle.as_deref() == Some(vehicle))
    }

    pub fn time_column(&self) -> &ColumnSpec {
        self.columns
            .iter()
            .find(|c| c.role == Role::Time)
            .expect("validated: exactly one time column")
    }

    pub fn mode(&self) -> platoon_core::DrivingMode {
        self.mode
            .as_deref()
            .and_then(|m| m.parse().ok())
            .unwrap_or(platoon_core::DrivingMode::Mixed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_schema() -> Schema {
        toml::from_str(
            r#"
            vehicles = ["C1", "C2"]
            mode = "acc"

            [[columns]]
            name = "Time"
            role = "time"
            unit = "s"

            [[columns]]
            name = "V1"
            role = "speed"
            vehicle = "C1"
            unit = "m/s"

            [[columns]]
            name = "V2"
            role = "speed"
            vehicle = "C2"
            unit = "km/h"

            [[columns]]
            name = "IVS"
            role = "ivs"
            vehicle = "C2"
            unit = "m"
            "#,
        )
        .unwrap()
    }

    #[test]
    fn valid_schema_passes() {
        base_schema().validate().unwrap();
    }

    #[test]
    fn missing_speed_column_fails() {
        let mut schema = base_schema();
        schema.columns.retain(|c| c.name != "V2");
        assert!(schema.validate().unwrap_err().to_string().contains("C2"));
    }

    #[test]
    fn two_time_columns_fail() {
        let mut schema = base_schema();
        let mut extra = schema.time_column().clone();
        extra.name = "Time2".into();
        schema.columns.push(extra);
        assert!(schema.validate().is_err());
    }

    #[test]
    fn unit_role_mismatch_fails() {
        let mut schema = base_schema();
        schema.columns[1].unit = Some(Unit::Seconds);
        assert!(schema.validate().is_err());
    }

    #[test]
    fn ivs_on_leader_fails() {
        let mut schema = base_schema();
        schema.columns[3].vehicle = Some("C1".into());
        assert!(schema.validate().is_err());
    }

    #[test]
    fn km_h_factor() {
        assert!((Unit::KilometersPerHour.to_si() - 1.0 / 3.6).abs() < 1e-15);
    }
}
