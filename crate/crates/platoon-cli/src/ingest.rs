//! Raw campaign CSV ingestion: parse per the schema, convert units to SI,
//! and run the derivation pipeline that produces a canonical dataset.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use platoon_core::{PlatoonDataset, Trajectory};

use crate::schema::{Role, Schema};

/// Parsed raw columns, still on the recorded (possibly irregular) grid.
struct RawColumns {
    headers: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn parse_csv(path: &Path, schema: &Schema) -> Result<RawColumns> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let headers: Vec<String> = reader
        .headers()
        .context("csv file has no header row")?
        .iter()
        .map(str::to_string)
        .collect();
    for col in &schema.columns {
        if !headers.iter().any(|h| h == &col.name) {
            bail!(
                "missing mandatory column '{}' in {}",
                col.name,
                path.display()
            );
        }
    }
    let mut rows = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("cannot read data row {}", row_idx + 1))?;
        let mut row = Vec::with_capacity(headers.len());
        for (col_idx, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                anyhow!(
                    "unparsable numeric cell at row {}, column '{}': '{}'",
                    row_idx + 1,
                    headers.get(col_idx).map_or("?", |h| h.as_str()),
                    cell
                )
            })?;
            row.push(value);
        }
        if row.len() != headers.len() {
            bail!(
                "row {} has {} cells, expected {}",
                row_idx + 1,
                row.len(),
                headers.len()
            );
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        bail!("{} holds fewer than two data rows", path.display());
    }
    Ok(RawColumns { headers, rows })
}

impl RawColumns {
    fn series(&self, name: &str, factor: f64) -> Vec<f64> {
        let idx = self
            .headers
            .iter()
            .position(|h| h == name)
            .expect("column presence checked during parse");
        self.rows.iter().map(|r| r[idx] * factor).collect()
    }
}

/// Read a raw campaign CSV into a dataset, with units converted to SI and
/// nothing resampled or derived yet.
pub fn ingest_csv(path: &Path, schema: &Schema) -> Result<PlatoonDataset> {
    schema.validate()?;
    let raw = parse_csv(path, schema)?;

    let time_col = schema.time_column();
    let t = raw.series(&time_col.name, time_col.si_factor());
    if let Some(i) = (1..t.len()).find(|&i| t[i] <= t[i - 1]) {
        bail!(
            "time column '{}' is not strictly increasing at row {}",
            time_col.name,
            i + 1
        );
    }

    let mut vehicles = Vec::with_capacity(schema.vehicles.len());
    for id in &schema.vehicles {
        let speed_col = schema
            .column_for(Role::Speed, id)
            .expect("validated: every vehicle has a speed column");
        let v = raw.series(&speed_col.name, speed_col.si_factor());
        let mut traj =
            Trajectory::new(id.clone(), t.clone(), v).map_err(|e| anyhow!("vehicle {id}: {e}"))?;
        if let Some(col) = schema.column_for(Role::Accel, id) {
            traj = traj
                .with_acceleration(raw.series(&col.name, col.si_factor()))
                .map_err(|e| anyhow!("vehicle {id}: {e}"))?;
        }
        if let Some(col) = schema.column_for(Role::Position, id) {
            traj = traj
                .with_distance(raw.series(&col.name, col.si_factor()))
                .map_err(|e| anyhow!("vehicle {id}: {e}"))?;
        }
        if let Some(col) = schema.column_for(Role::Altitude, id) {
            traj = traj
                .with_altitude(raw.series(&col.name, col.si_factor()))
                .map_err(|e| anyhow!("vehicle {id}: {e}"))?;
        }
        vehicles.push(traj);
    }

    let mut dataset = PlatoonDataset::new(vehicles, schema.mode())?;
    if let Some(name) = &schema.campaign {
        dataset = dataset.with_campaign(name.clone(), schema.route.clone());
    }
    for (pair, rear) in schema.vehicles[1..].iter().enumerate() {
        if let Some(col) = schema.column_for(Role::Ivs, rear) {
            dataset
                .set_ivs(pair, raw.series(&col.name, col.si_factor()))
                .map_err(|e| anyhow!("ivs column '{}': {e}", col.name))?;
        }
    }
    Ok(dataset)
}

/// Everything `ingest_csv` leaves raw: resample onto the uniform grid,
/// derive acceleration, distance, and grade, and fill in spacing series
/// from recorded positions where possible.
///
/// Returns the canonical dataset plus human-readable warnings.
pub fn to_canonical(
    raw: &PlatoonDataset,
    dt: f64,
    smoothing_window: usize,
) -> Result<(PlatoonDataset, Vec<String>)> {
    let mut warnings = Vec::new();
    let resampled = raw.resample(dt)?;
    let with_accel = resampled.derive_accelerations(smoothing_window, false)?;
    let derived = with_accel.derive_distances().derive_grades();
    for veh in derived.vehicles() {
        if veh.grade_assumed_zero() {
            warnings.push(format!(
                "vehicle {}: no altitude data, grade assumed zero",
                veh.vehicle_id()
            ));
        }
    }

    let missing_pairs: Vec<usize> = (0..derived.n_pairs())
        .filter(|&p| derived.ivs(p).is_none())
        .collect();
    if missing_pairs.is_empty() {
        return Ok((derived, warnings));
    }
    let positions_usable = missing_pairs.iter().all(|&p| {
        let front = derived.vehicle(p);
        let rear = derived.vehicle(p + 1);
        front.s().is_some()
            && rear.s().is_some()
            && !front.distance_is_derived()
            && !rear.distance_is_derived()
    });
    if positions_usable {
        let vehicle_length = platoon_core::VehicleParams::default().length;
        Ok((derived.compute_ivs(vehicle_length)?, warnings))
    } else {
        warnings.push(format!(
            "{} pair(s) have neither recorded ivs nor recorded positions; \
             spacing analyses will be unavailable",
            missing_pairs.len()
        ));
        Ok((derived, warnings))
    }
}
