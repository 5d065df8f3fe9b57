//! Writers for assessment and analysis products: long-format CSVs with a
//! config-echo comment line, and JSON summaries embedding the same config.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use platoon_core::analysis::{
    GapSeries, Histogram, JointDistribution, SpeedStdRow, StabilityMetrics,
};
use platoon_core::energy::PlatoonAssessment;

/// Create a CSV file whose first line echoes the resolved configuration.
pub fn csv_writer(path: &Path, config: &serde_json::Value) -> Result<std::fs::File> {
    let mut file =
        std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    writeln!(file, "# config: {config}")?;
    Ok(file)
}

/// Attach the config echo to a JSON value and write it pretty-printed.
pub fn write_json(path: &Path, config: &serde_json::Value, body: serde_json::Value) -> Result<()> {
    let document = serde_json::json!({
        "config": config,
        "result": body,
    });
    std::fs::write(path, serde_json::to_string_pretty(&document)?)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Energy report rows: one line per vehicle, segment class, and metric.
pub fn write_energy_csv(
    path: &Path,
    assessment: &PlatoonAssessment,
    config: &serde_json::Value,
) -> Result<()> {
    let mut out = csv_writer(path, config)?;
    writeln!(out, "vehicle,class,metric,value,unit,ratio_to_leader")?;
    for row in &assessment.rows {
        let class = row.class.map_or("whole", |c| c.as_str());
        let ratio = row
            .e_c_ratio_to_leader
            .map_or(String::new(), |r| r.to_string());
        writeln!(
            out,
            "{},{},tractive_energy,{},kWh/100km,{}",
            row.vehicle_id, class, row.e_c, ratio
        )?;
        for fig in &row.fuel {
            let ratio = fig.ratio_to_leader.map_or(String::new(), |r| r.to_string());
            writeln!(
                out,
                "{},{},{},{},L/100km,{}",
                row.vehicle_id, class, fig.model, fig.f_c, ratio
            )?;
        }
    }
    Ok(())
}

/// Histogram rows: `bin_left,bin_right,mass`.
pub fn write_histogram_csv(
    path: &Path,
    hist: &Histogram,
    config: &serde_json::Value,
) -> Result<()> {
    let mut out = csv_writer(path, config)?;
    writeln!(out, "bin_left,bin_right,mass")?;
    for (i, &mass) in hist.mass.iter().enumerate() {
        writeln!(out, "{},{},{}", hist.edges[i], hist.edges[i + 1], mass)?;
    }
    Ok(())
}

/// Joint-map rows: `v_bin,a_bin,mass` with bin centers.
pub fn write_joint_map_csv(
    path: &Path,
    map: &JointDistribution,
    config: &serde_json::Value,
) -> Result<()> {
    let mut out = csv_writer(path, config)?;
    writeln!(out, "v_bin,a_bin,mass")?;
    for vi in 0..map.n_v_bins() {
        let v_center = 0.5 * (map.v_edges[vi] + map.v_edges[vi + 1]);
        for ai in 0..map.n_a_bins() {
            let a_center = 0.5 * (map.a_edges[ai] + map.a_edges[ai + 1]);
            writeln!(out, "{},{},{}", v_center, a_center, map.cell(vi, ai))?;
        }
    }
    Ok(())
}

/// Per-sample gap-versus-speed scatter rows for one pair, defined samples
/// only.
pub fn write_gap_scatter_csv(
    path: &Path,
    gaps: &GapSeries,
    config: &serde_json::Value,
) -> Result<()> {
    let mut out = csv_writer(path, config)?;
    writeln!(out, "v_ref,time_gap,space_gap")?;
    for i in 0..gaps.space_gap.len() {
        if let Some(tg) = gaps.time_gap[i] {
            writeln!(out, "{},{},{}", gaps.v_ref[i], tg, gaps.space_gap[i])?;
        }
    }
    Ok(())
}

/// Speed variability paired with tractive energy per vehicle and class.
pub fn write_std_energy_csv(
    path: &Path,
    rows: &[(SpeedStdRow, Option<f64>)],
    config: &serde_json::Value,
) -> Result<()> {
    let mut out = csv_writer(path, config)?;
    writeln!(out, "vehicle,class,speed_std,e_c_kwh_per_100km")?;
    for (row, e_c) in rows {
        let e_c = e_c.map_or(String::new(), |e| e.to_string());
        writeln!(
            out,
            "{},{},{},{}",
            row.vehicle_id,
            row.class.as_str(),
            row.std,
            e_c
        )?;
    }
    Ok(())
}

/// Pearson correlations of follower joint maps against the leader.
pub fn write_correlation_csv(
    path: &Path,
    mode: &str,
    pairs: &[(String, f64)],
    config: &serde_json::Value,
) -> Result<()> {
    let mut out = csv_writer(path, config)?;
    writeln!(out, "mode,pair,pearson_r")?;
    for (pair, r) in pairs {
        writeln!(out, "{mode},{pair},{r}")?;
    }
    Ok(())
}

pub fn stability_json(metrics: &StabilityMetrics) -> serde_json::Value {
    serde_json::json!({
        "verdict": metrics.verdict.as_str(),
        "intervals": metrics.intervals.iter().map(|iv| serde_json::json!({
            "t_start": iv.t_start,
            "t_end": iv.t_end,
            "l2_ratios": iv.l2_ratios,
            "overshoot_peaks": iv.overshoot_peaks,
        })).collect::<Vec<_>>(),
    })
}

/// `<out>/<stem>_<suffix>.<ext>`
pub fn out_path(out_dir: &Path, stem: &str, suffix: &str, ext: &str) -> PathBuf {
    if suffix.is_empty() {
        out_dir.join(format!("{stem}.{ext}"))
    } else {
        out_dir.join(format!("{stem}_{suffix}.{ext}"))
    }
}
