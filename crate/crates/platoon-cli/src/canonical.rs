//! The canonical platoon file: one CSV per dataset with every channel in SI
//! units on a uniform grid, plus `#`-prefixed header lines embedding the
//! resolved run configuration.
//!
//! Columns: `t, <id>_v, <id>_a, <id>_s, <id>_theta` per vehicle in platoon
//! order, then `ivs_<i>_<j>` per pair (1-based positions).

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use platoon_core::{DrivingMode, PlatoonDataset, Trajectory};

const FORMAT_TAG: &str = "platoon canonical v1";

/// Write the dataset with the resolved config echoed into the header.
///
/// Canonical files carry every channel; run the derivation pipeline first.
pub fn write(path: &Path, dataset: &PlatoonDataset, config: &serde_json::Value) -> Result<()> {
    for veh in dataset.vehicles() {
        if veh.a().is_none() || veh.s().is_none() || veh.theta().is_none() {
            bail!(
                "vehicle {} is missing a derived channel; canonical files need v, a, s, theta",
                veh.vehicle_id()
            );
        }
    }
    let mut out =
        std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    writeln!(out, "# {FORMAT_TAG}")?;
    writeln!(out, "# config: {config}")?;
    writeln!(out, "# mode: {}", dataset.mode())?;
    if let Some(name) = dataset.campaign() {
        writeln!(out, "# campaign: {name}")?;
    }
    if let Some(route) = dataset.route() {
        writeln!(out, "# route: {route}")?;
    }
    let derived: Vec<&str> = dataset
        .vehicles()
        .iter()
        .filter(|v| v.distance_is_derived())
        .map(Trajectory::vehicle_id)
        .collect();
    if !derived.is_empty() {
        writeln!(out, "# derived_s: {}", derived.join(","))?;
    }

    let mut header = vec![String::from("t")];
    for veh in dataset.vehicles() {
        let id = veh.vehicle_id();
        for ch in ["v", "a", "s", "theta"] {
            header.push(format!("{id}_{ch}"));
        }
    }
    for pair in 0..dataset.n_pairs() {
        if dataset.ivs(pair).is_some() {
            header.push(format!("ivs_{}_{}", pair + 1, pair + 2));
        }
    }
    writeln!(out, "{}", header.join(","))?;

    let n = dataset.len();
    let mut line = String::new();
    for i in 0..n {
        line.clear();
        line.push_str(&dataset.t()[i].to_string());
        for veh in dataset.vehicles() {
            let a = veh.a().expect("checked above")[i];
            let s = veh.s().expect("checked above")[i];
            let theta = veh.theta().expect("checked above")[i];
            for value in [veh.v()[i], a, s, theta] {
                line.push(',');
                line.push_str(&value.to_string());
            }
        }
        for pair in 0..dataset.n_pairs() {
            if let Some(series) = dataset.ivs(pair) {
                line.push(',');
                line.push_str(&series[i].to_string());
            }
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Read a canonical platoon file back into a dataset.
pub fn read(path: &Path) -> Result<PlatoonDataset> {
    let file =
        std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut lines = BufReader::new(file).lines();

    let mut mode = DrivingMode::Mixed;
    let mut campaign: Option<String> = None;
    let mut route: Option<String> = None;
    let mut derived_s: Vec<String> = Vec::new();
    let header_line = loop {
        let line = lines
            .next()
            .ok_or_else(|| anyhow!("{}: no header row", path.display()))??;
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("mode:") {
                mode = value
                    .trim()
                    .parse()
                    .map_err(|e| anyhow!("{}: bad mode header: {e}", path.display()))?;
            } else if let Some(value) = comment.strip_prefix("campaign:") {
                campaign = Some(value.trim().to_string());
            } else if let Some(value) = comment.strip_prefix("route:") {
                route = Some(value.trim().to_string());
            } else if let Some(value) = comment.strip_prefix("derived_s:") {
                derived_s = value.trim().split(',').map(str::to_string).collect();
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        break line;
    };

    let headers: Vec<String> = header_line.split(',').map(str::to_string).collect();
    if headers.first().map(String::as_str) != Some("t") {
        bail!("{}: first column must be 't'", path.display());
    }
    let mut vehicle_ids: Vec<String> = Vec::new();
    for h in &headers {
        if let Some(id) = h.strip_suffix("_v") {
            vehicle_ids.push(id.to_string());
        }
    }
    if vehicle_ids.is_empty() {
        bail!("{}: no <id>_v speed columns found", path.display());
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row_idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != headers.len() {
            bail!(
                "{}: row {} has {} cells, expected {}",
                path.display(),
                row_idx + 1,
                cells.len(),
                headers.len()
            );
        }
        for (col, cell) in cells.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                anyhow!(
                    "{}: unparsable numeric cell at row {}, column '{}'",
                    path.display(),
                    row_idx + 1,
                    headers[col]
                )
            })?;
            columns[col].push(value);
        }
    }

    let find = |name: &str| -> Option<&Vec<f64>> {
        headers.iter().position(|h| h == name).map(|i| &columns[i])
    };
    let t = columns[0].clone();
    let mut vehicles = Vec::with_capacity(vehicle_ids.len());
    for id in &vehicle_ids {
        let v = find(&format!("{id}_v"))
            .ok_or_else(|| anyhow!("missing column {id}_v"))?
            .clone();
        let mut traj = Trajectory::new(id.clone(), t.clone(), v)
            .map_err(|e| anyhow!("{}: vehicle {id}: {e}", path.display()))?;
        if let Some(a) = find(&format!("{id}_a")) {
            traj = traj
                .with_acceleration(a.clone())
                .map_err(|e| anyhow!("{}: vehicle {id}: {e}", path.display()))?;
        }
        if let Some(s) = find(&format!("{id}_s")) {
            traj = if derived_s.iter().any(|d| d == id) {
                traj.with_derived_distance(s.clone())
            } else {
                traj.with_distance(s.clone())
            }
            .map_err(|e| anyhow!("{}: vehicle {id}: {e}", path.display()))?;
        }
        if let Some(theta) = find(&format!("{id}_theta")) {
            traj = traj
                .with_grade(theta.clone())
                .map_err(|e| anyhow!("{}: vehicle {id}: {e}", path.display()))?;
        }
        vehicles.push(traj);
    }

    let mut dataset = PlatoonDataset::new(vehicles, mode)?;
    if let Some(name) = campaign {
        dataset = dataset.with_campaign(name, route);
    }
    for pair in 0..dataset.n_pairs() {
        if let Some(series) = find(&format!("ivs_{}_{}", pair + 1, pair + 2)) {
            dataset
                .set_ivs(pair, series.clone())
                .map_err(|e| anyhow!("{}: {e}", path.display()))?;
        }
    }
    Ok(dataset)
}
