//! Implementations of the five subcommands: ingest, simulate, assess,
//! analyze, correlate.

use std::path::{Path, PathBuf};

use anyhow::Result;
use platoon_core::analysis::{self, SegmentParams, TimeGapReference};
use platoon_core::energy;
use platoon_core::sim::{self, SimError};
use platoon_core::PlatoonDataset;
use serde_json::json;

use crate::canonical;
use crate::coeffs::CoeffSet;
use crate::error::CliError;
use crate::ingest;
use crate::report;
use crate::scenario::Scenario;
use crate::schema::Schema;

/// Fully resolved run options shared by the subcommands.
#[derive(Debug, Clone)]
pub struct GlobalOpts {
    pub out_dir: PathBuf,
    pub dt: Option<f64>,
    pub config: Option<PathBuf>,
    pub coeffs: Option<PathBuf>,
    pub segments: SegmentParams,
    pub timegap_ref: TimeGapReference,
}

impl GlobalOpts {
    fn ensure_out_dir(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::data(format!("cannot create output directory: {e}")))
    }

    fn load_coeffs(&self) -> Result<CoeffSet, CliError> {
        match &self.coeffs {
            None => Ok(CoeffSet::default()),
            Some(path) => CoeffSet::load(path).map_err(|e| CliError::data(format!("{e:#}"))),
        }
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| String::from("output"))
}

fn data_err(err: impl std::fmt::Display) -> CliError {
    CliError::data(format!("{err}"))
}

fn segments_json(params: &SegmentParams) -> serde_json::Value {
    json!({
        "a_threshold": params.a_threshold,
        "min_duration": params.min_duration,
        "pad": params.pad,
    })
}

pub fn cmd_ingest(opts: &GlobalOpts, data: &Path, window: usize) -> Result<(), CliError> {
    let schema_path = opts
        .config
        .as_ref()
        .ok_or_else(|| CliError::usage("ingest needs --config <schema file>"))?;
    let schema = Schema::load(schema_path).map_err(|e| CliError::data(format!("{e:#}")))?;
    let raw = ingest::ingest_csv(data, &schema).map_err(|e| CliError::data(format!("{e:#}")))?;
    let dt = opts.dt.unwrap_or(0.1);
    let (canon, warnings) =
        ingest::to_canonical(&raw, dt, window).map_err(|e| CliError::data(format!("{e:#}")))?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    opts.ensure_out_dir()?;
    let config = json!({
        "command": "ingest",
        "input": data.display().to_string(),
        "dt": dt,
        "smoothing_window": window,
        "schema": schema,
    });
    let path = report::out_path(&opts.out_dir, &stem_of(data), "canonical", "csv");
    canonical::write(&path, &canon, &config).map_err(data_err)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_simulate(opts: &GlobalOpts, scenario_path: &Path) -> Result<(), CliError> {
    let scenario = Scenario::load(scenario_path).map_err(|e| CliError::data(format!("{e:#}")))?;
    let mut resolved = scenario
        .resolve()
        .map_err(|e| CliError::data(format!("{e:#}")))?;
    if let Some(dt) = opts.dt {
        resolved.config.output_dt = dt;
    }
    opts.ensure_out_dir()?;
    let stem = stem_of(scenario_path);
    let config = json!({
        "command": "simulate",
        "scenario_file": scenario_path.display().to_string(),
        "resolved": resolved,
    });
    match sim::simulate_platoon(&resolved.cycle, &resolved.followers, &resolved.config) {
        Ok(mut dataset) => {
            if let Some(campaign) = &resolved.campaign {
                dataset = dataset.with_campaign(campaign.name.clone(), campaign.route.clone());
            }
            let path = report::out_path(&opts.out_dir, &stem, "platoon", "csv");
            canonical::write(&path, &dataset, &config).map_err(data_err)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        Err(SimError::Collision {
            time,
            follower,
            partial,
        }) => {
            if let Some(partial) = partial {
                let path = report::out_path(&opts.out_dir, &stem, "partial", "csv");
                canonical::write(&path, &partial, &config).map_err(data_err)?;
                eprintln!("wrote partial output {}", path.display());
            }
            Err(CliError::collision(format!(
                "collision: follower C{} reached zero gap at t = {time} s",
                follower + 1
            )))
        }
        Err(other) => Err(CliError::data(other.to_string())),
    }
}

fn load_canonical(path: &Path) -> Result<PlatoonDataset, CliError> {
    canonical::read(path).map_err(|e| CliError::data(format!("{e:#}")))
}

pub fn cmd_assess(
    opts: &GlobalOpts,
    canonical_path: &Path,
    model_names: &[String],
    normalize: bool,
) -> Result<(), CliError> {
    let dataset = load_canonical(canonical_path)?;
    let coeffs = opts.load_coeffs()?;
    let models = coeffs
        .models(model_names)
        .map_err(|e| CliError::data(format!("{e:#}")))?;
    let ids: Vec<&str> = dataset.vehicles().iter().map(|v| v.vehicle_id()).collect();
    let params = coeffs.vehicle_params(&ids, normalize);

    let labels = analysis::segment_steady_perturbation(dataset.leader(), &opts.segments)
        .map_err(data_err)?;
    let assessment = energy::assess_platoon_per_vehicle(&dataset, &params, &models, Some(&labels))
        .map_err(data_err)?;

    opts.ensure_out_dir()?;
    let config = json!({
        "command": "assess",
        "input": canonical_path.display().to_string(),
        "models": model_names,
        "normalize": normalize,
        "segments": segments_json(&opts.segments),
        "coefficients": coeffs,
    });
    let stem = stem_of(canonical_path);
    let csv_path = report::out_path(&opts.out_dir, &stem, "energy_report", "csv");
    report::write_energy_csv(&csv_path, &assessment, &config).map_err(data_err)?;
    let json_path = report::out_path(&opts.out_dir, &stem, "energy_report", "json");
    report::write_json(
        &json_path,
        &config,
        serde_json::to_value(&assessment).map_err(data_err)?,
    )
    .map_err(data_err)?;
    eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

pub struct AnalyzeBins {
    pub v_bin: f64,
    pub a_bin: f64,
    pub time_bin: f64,
    pub space_bin: f64,
}

pub fn cmd_analyze(
    opts: &GlobalOpts,
    canonical_path: &Path,
    bins: &AnalyzeBins,
) -> Result<(), CliError> {
    let dataset = load_canonical(canonical_path)?;
    if dataset.n_vehicles() < 2 {
        return Err(CliError::data(
            "analysis needs a platoon of at least two vehicles",
        ));
    }
    opts.ensure_out_dir()?;
    let stem = stem_of(canonical_path);
    let config = json!({
        "command": "analyze",
        "input": canonical_path.display().to_string(),
        "segments": segments_json(&opts.segments),
        "timegap_reference": match opts.timegap_ref {
            TimeGapReference::Follower => "follower",
            TimeGapReference::Preceding => "preceding",
        },
        "bins": {
            "speed": bins.v_bin,
            "accel": bins.a_bin,
            "time_gap": bins.time_bin,
            "space_gap": bins.space_bin,
        },
    });

    // gaps, histograms, scatter data
    let gaps = analysis::compute_gaps(&dataset, opts.timegap_ref).map_err(data_err)?;
    let mut pair_summaries = Vec::new();
    for series in &gaps {
        let pair = format!("{}_{}", series.front_id, series.rear_id);
        let scatter = report::out_path(&opts.out_dir, &stem, &format!("gap_speed_{pair}"), "csv");
        report::write_gap_scatter_csv(&scatter, series, &config).map_err(data_err)?;
        let (v, tg) = series.defined_pairs();
        let slope = platoon_core::numeric::least_squares_slope(&v, &tg);
        match analysis::gap_histograms(series, bins.time_bin, bins.space_bin) {
            Ok((time_hist, space_hist)) => {
                let th = report::out_path(
                    &opts.out_dir,
                    &stem,
                    &format!("hist_time_gap_{pair}"),
                    "csv",
                );
                report::write_histogram_csv(&th, &time_hist, &config).map_err(data_err)?;
                let sh = report::out_path(
                    &opts.out_dir,
                    &stem,
                    &format!("hist_space_gap_{pair}"),
                    "csv",
                );
                report::write_histogram_csv(&sh, &space_hist, &config).map_err(data_err)?;
                pair_summaries.push(json!({
                    "front": series.front_id,
                    "rear": series.rear_id,
                    "time_gap": {
                        "mean": time_hist.mean,
                        "median": time_hist.median,
                        "std": time_hist.std,
                        "mode": time_hist.mode(),
                        "n": time_hist.n_samples,
                    },
                    "space_gap": {
                        "mean": space_hist.mean,
                        "median": space_hist.median,
                        "std": space_hist.std,
                        "mode": space_hist.mode(),
                    },
                    "gap_speed_slope": slope,
                }));
            }
            Err(err) => {
                eprintln!("warning: pair {pair}: {err}; histograms skipped");
                pair_summaries.push(json!({
                    "front": series.front_id,
                    "rear": series.rear_id,
                    "skipped": err.to_string(),
                }));
            }
        }
    }

    // segmentation, stability, speed variability
    let labels = analysis::segment_steady_perturbation(dataset.leader(), &opts.segments)
        .map_err(data_err)?;
    let stability = match analysis::l2_amplification(&dataset, &labels) {
        Ok(metrics) => {
            let path = report::out_path(&opts.out_dir, &stem, "stability", "json");
            report::write_json(&path, &config, report::stability_json(&metrics))
                .map_err(data_err)?;
            Some(metrics)
        }
        Err(err) => {
            eprintln!("warning: {err}; stability metrics skipped");
            None
        }
    };

    let coeffs = opts.load_coeffs()?;
    let ids: Vec<&str> = dataset.vehicles().iter().map(|v| v.vehicle_id()).collect();
    let params = coeffs.vehicle_params(&ids, true);
    let std_rows = analysis::speed_std_per_segment(&dataset, &labels).map_err(data_err)?;
    let assessment = energy::assess_platoon_per_vehicle(&dataset, &params, &[], Some(&labels))
        .map_err(data_err)?;
    let paired: Vec<_> = std_rows
        .into_iter()
        .map(|row| {
            let e_c = assessment
                .rows
                .iter()
                .find(|r| r.vehicle_id == row.vehicle_id && r.class == Some(row.class))
                .map(|r| r.e_c);
            (row, e_c)
        })
        .collect();
    let std_path = report::out_path(&opts.out_dir, &stem, "speed_std_energy", "csv");
    report::write_std_energy_csv(&std_path, &paired, &config).map_err(data_err)?;

    // joint maps and correlation against the leader
    let correlations = write_maps_and_correlation(opts, &stem, &dataset, bins, &config)?;

    let summary = json!({
        "mode": dataset.mode().as_str(),
        "vehicles": ids,
        "segments": labels.segments.iter().map(|seg| json!({
            "class": seg.class.as_str(),
            "t_start": seg.t_start,
            "duration_s": seg.duration_s,
        })).collect::<Vec<_>>(),
        "pairs": pair_summaries,
        "stability_verdict": stability.as_ref().map(|m| m.verdict.as_str()),
        "correlation": correlations,
        "speed_std_energy": paired.iter().map(|(row, e_c)| json!({
            "vehicle": row.vehicle_id,
            "class": row.class.as_str(),
            "speed_std": row.std,
            "e_c": e_c,
        })).collect::<Vec<_>>(),
    });
    let summary_path = report::out_path(&opts.out_dir, &stem, "summary", "json");
    report::write_json(&summary_path, &config, summary).map_err(data_err)?;
    eprintln!("wrote analysis products to {}", opts.out_dir.display());
    Ok(())
}

fn write_maps_and_correlation(
    opts: &GlobalOpts,
    stem: &str,
    dataset: &PlatoonDataset,
    bins: &AnalyzeBins,
    config: &serde_json::Value,
) -> Result<serde_json::Value, CliError> {
    let (v_edges, a_edges) =
        analysis::auto_edges(dataset, bins.v_bin, bins.a_bin).map_err(data_err)?;
    let mut maps = Vec::new();
    for veh in dataset.vehicles() {
        let map = analysis::joint_distribution(veh, &v_edges, &a_edges).map_err(data_err)?;
        let path = report::out_path(
            &opts.out_dir,
            stem,
            &format!("joint_map_{}", veh.vehicle_id()),
            "csv",
        );
        report::write_joint_map_csv(&path, &map, config).map_err(data_err)?;
        maps.push(map);
    }
    let leader_id = dataset.leader().vehicle_id().to_string();
    let mut pairs = Vec::new();
    // the self entry doubles as a numerical sanity row
    if let Ok(r) = analysis::map_correlation(&maps[0], &maps[0]) {
        pairs.push((format!("{leader_id}-{leader_id}"), r));
    }
    for (veh, map) in dataset.vehicles().iter().zip(maps.iter()).skip(1) {
        let r = analysis::map_correlation(&maps[0], map).map_err(data_err)?;
        pairs.push((format!("{}-{}", leader_id, veh.vehicle_id()), r));
    }
    let csv_path = report::out_path(&opts.out_dir, stem, "correlation", "csv");
    report::write_correlation_csv(&csv_path, dataset.mode().as_str(), &pairs, config)
        .map_err(data_err)?;
    let body = json!({
        "mode": dataset.mode().as_str(),
        "pairs": pairs.iter().cloned().collect::<std::collections::BTreeMap<String, f64>>(),
    });
    let json_path = report::out_path(&opts.out_dir, stem, "correlation", "json");
    report::write_json(&json_path, config, body.clone()).map_err(data_err)?;
    Ok(body)
}

pub fn cmd_correlate(
    opts: &GlobalOpts,
    canonical_path: &Path,
    v_bin: f64,
    a_bin: f64,
) -> Result<(), CliError> {
    let dataset = load_canonical(canonical_path)?;
    if dataset.n_vehicles() < 2 {
        return Err(CliError::data(
            "correlation needs a platoon of at least two vehicles",
        ));
    }
    opts.ensure_out_dir()?;
    let stem = stem_of(canonical_path);
    let config = json!({
        "command": "correlate",
        "input": canonical_path.display().to_string(),
        "bins": { "speed": v_bin, "accel": a_bin },
    });
    let bins = AnalyzeBins {
        v_bin,
        a_bin,
        time_bin: 0.05,
        space_bin: 1.0,
    };
    write_maps_and_correlation(opts, &stem, &dataset, &bins, &config)?;
    eprintln!("wrote correlation products to {}", opts.out_dir.display());
    Ok(())
}

/// Split a `a_thr,min_dur,pad` triple into segmentation parameters.
pub fn parse_segments(arg: &str) -> Result<SegmentParams, String> {
    let parts: Vec<&str> = arg.split(',').collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected three comma-separated values 'a_thr,min_dur,pad', got '{arg}'"
        ));
    }
    let parse = |s: &str, name: &str| -> Result<f64, String> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("{name} '{s}' is not a number"))
    };
    let params = SegmentParams {
        a_threshold: parse(parts[0], "a_thr")?,
        min_duration: parse(parts[1], "min_dur")?,
        pad: parse(parts[2], "pad")?,
    };
    if params.a_threshold <= 0.0 || params.min_duration <= 0.0 || params.pad < 0.0 {
        return Err(String::from(
            "segments need a_thr > 0, min_dur > 0, pad >= 0",
        ));
    }
    Ok(params)
}
