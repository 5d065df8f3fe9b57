//! Behavioral diagnostics for platoon datasets: time/space-gap series and
//! distributions, steady/perturbation segmentation of the driving cycle,
//! speed variability, L2 string-stability ratios, speed–acceleration joint
//! probability maps, and their Pearson correlation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::float;
use crate::numeric;
use crate::platoon::PlatoonDataset;
use crate::trajectory::Trajectory;

/// Below this reference speed (m/s) the time gap is undefined rather than
/// allowed to blow up.
pub const MIN_TIME_GAP_SPEED: f64 = 1.0;

/// Leader deviation norms below this make an L2 ratio undefined.
pub const MIN_LEADER_DEVIATION_NORM: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("pair {pair} has no ivs series; compute or supply it first")]
    MissingIvs { pair: usize },
    #[error("every sample is undefined; nothing to aggregate")]
    AllSamplesUndefined,
    #[error("no samples to aggregate")]
    EmptyInput,
    #[error("input contains a non-finite sample")]
    NonFiniteSample,
    #[error("bin width must be positive, got {0}")]
    NonPositiveBinWidth(f64),
    #[error("bin edges must be strictly increasing with at least two entries")]
    BadEdges,
    #[error("the two maps have different bin edges")]
    BinMismatch,
    #[error("map has zero variance; correlation is undefined")]
    ZeroVariance,
    #[error("trajectory has no acceleration channel; derive it first")]
    MissingAcceleration,
    #[error("trajectory is not on a uniform time grid")]
    NonUniformGrid,
    #[error("no perturbation intervals in the segment label")]
    NoPerturbationIntervals,
    #[error("segment class {class:?} contains no samples")]
    EmptyClass { class: SegmentClass },
    #[error("segment label does not match the dataset grid")]
    LabelMismatch,
    #[error("dataset has fewer than two vehicles")]
    NotAPlatoon,
}

/// Which vehicle's speed divides the spacing when computing time gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TimeGapReference {
    /// The follower's own speed (standard headway convention).
    #[default]
    Follower,
    /// The preceding vehicle's speed.
    Preceding,
}

/// Space- and time-gap series for one follower behind its predecessor.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapSeries {
    /// Vehicle ahead in the pair.
    pub front_id: String,
    /// Vehicle behind in the pair.
    pub rear_id: String,
    /// Bumper-to-bumper spacing (m).
    pub space_gap: Vec<f64>,
    /// Spacing divided by the reference speed (s); `None` where the
    /// reference speed is below [`MIN_TIME_GAP_SPEED`].
    pub time_gap: Vec<Option<f64>>,
    /// The reference speed actually used per sample (m/s).
    pub v_ref: Vec<f64>,
}

impl GapSeries {
    /// `(speed, time_gap)` pairs at the defined samples.
    pub fn defined_pairs(&self) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (&v, tg) in self.v_ref.iter().zip(self.time_gap.iter()) {
            if let Some(tg) = tg {
                xs.push(v);
                ys.push(*tg);
            }
        }
        (xs, ys)
    }
}

/// Space and time gaps for every consecutive pair of the platoon.
///
/// The time gap is the ivs divided by the reference speed selected by
/// `reference`; samples with reference speed below 1 m/s are marked
/// undefined, not zero.
pub fn compute_gaps(
    dataset: &PlatoonDataset,
    reference: TimeGapReference,
) -> Result<Vec<GapSeries>, AnalysisError> {
    if dataset.n_vehicles() < 2 {
        return Err(AnalysisError::NotAPlatoon);
    }
    let mut out = Vec::with_capacity(dataset.n_pairs());
    for pair in 0..dataset.n_pairs() {
        let ivs = dataset
            .ivs(pair)
            .ok_or(AnalysisError::MissingIvs { pair })?;
        let front = dataset.vehicle(pair);
        let rear = dataset.vehicle(pair + 1);
        let v_ref: Vec<f64> = match reference {
            TimeGapReference::Follower => rear.v().to_vec(),
            TimeGapReference::Preceding => front.v().to_vec(),
        };
        let time_gap = ivs
            .iter()
            .zip(v_ref.iter())
            .map(|(&gap, &v)| {
                if v < MIN_TIME_GAP_SPEED {
                    None
                } else {
                    Some(gap / v)
                }
            })
            .collect();
        out.push(GapSeries {
            front_id: String::from(front.vehicle_id()),
            rear_id: String::from(rear.vehicle_id()),
            space_gap: ivs.to_vec(),
            time_gap,
            v_ref,
        });
    }
    Ok(out)
}

/// Normalized frequency histogram with summary statistics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Histogram {
    /// Bin edges, `bins + 1` entries, multiples of the bin width.
    pub edges: Vec<f64>,
    /// Relative frequency per bin; sums to one.
    pub mass: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_samples: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

impl Histogram {
    /// Histogram of `samples` with bins of `width`, aligned to multiples of
    /// the width.
    pub fn from_samples(samples: &[f64], width: f64) -> Result<Self, AnalysisError> {
        if samples.is_empty() {
            return Err(AnalysisError::EmptyInput);
        }
        if !(width > 0.0) {
            return Err(AnalysisError::NonPositiveBinWidth(width));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(AnalysisError::NonFiniteSample);
        }
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let first = float::floor(min / width);
        let mut bins = (float::ceil(max / width) - first) as usize;
        if bins == 0 {
            bins = 1;
        }
        let edges: Vec<f64> = (0..=bins).map(|k| (first + k as f64) * width).collect();
        let mut counts = vec![0u64; bins];
        for &x in samples {
            let mut idx = ((x - edges[0]) / width) as usize;
            if idx >= bins {
                idx = bins - 1;
            }
            counts[idx] += 1;
        }
        let n = samples.len();
        let mass = counts.iter().map(|&c| c as f64 / n as f64).collect();
        Ok(Self {
            edges,
            mass,
            counts,
            n_samples: n,
            mean: numeric::mean(samples),
            median: numeric::median(samples),
            std: numeric::population_std(samples),
        })
    }

    /// Center of the fullest bin (lowest bin wins ties).
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        0.5 * (self.edges[best] + self.edges[best + 1])
    }
}

/// Time- and space-gap histograms for one pair.
pub fn gap_histograms(
    gaps: &GapSeries,
    time_bin: f64,
    space_bin: f64,
) -> Result<(Histogram, Histogram), AnalysisError> {
    let defined: Vec<f64> = gaps.time_gap.iter().filter_map(|&tg| tg).collect();
    if defined.is_empty() {
        return Err(AnalysisError::AllSamplesUndefined);
    }
    let time = Histogram::from_samples(&defined, time_bin)?;
    let space = Histogram::from_samples(&gaps.space_gap, space_bin)?;
    Ok((time, space))
}

/// Segment class of a stretch of the driving cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SegmentClass {
    /// Near-constant leader speed.
    Steady,
    /// The leader executes a deliberate acceleration or deceleration.
    Perturbation,
}

impl SegmentClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SegmentClass::Steady => "steady",
            SegmentClass::Perturbation => "perturbation",
        }
    }
}

/// One labelled stretch: samples `start .. end` (end exclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub class: SegmentClass,
    pub t_start: f64,
    pub duration_s: f64,
}

/// Contiguous partition of the analysis window into steady and perturbation
/// stretches. Each sample belongs to exactly one segment; segment durations
/// sum to `n_samples * dt`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SegmentLabel {
    pub segments: Vec<Segment>,
    n: usize,
    dt: f64,
}

impl SegmentLabel {
    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn window_duration(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Sample ranges of every segment of the given class.
    pub fn class_ranges(&self, class: SegmentClass) -> Vec<(usize, usize)> {
        self.segments
            .iter()
            .filter(|seg| seg.class == class)
            .map(|seg| (seg.start, seg.end))
            .collect()
    }

    /// Indices of every sample of the given class, in order.
    pub fn class_indices(&self, class: SegmentClass) -> Vec<usize> {
        let mut out = Vec::new();
        for (start, end) in self.class_ranges(class) {
            out.extend(start..end);
        }
        out
    }
}

/// Thresholds for steady/perturbation segmentation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SegmentParams {
    /// Leader acceleration magnitude above which a sample is perturbed
    /// (m/s²).
    pub a_threshold: f64,
    /// Minimum interval length (s); shorter intervals merge into a
    /// neighbor.
    pub min_duration: f64,
    /// Expansion of each perturbation interval on both sides (s).
    pub pad: f64,
}

impl Default for SegmentParams {
    fn default() -> Self {
        Self {
            a_threshold: 0.3,
            min_duration: 5.0,
            pad: 2.0,
        }
    }
}

/// Split the analysis window into steady and perturbation intervals from
/// the leader's acceleration signal.
///
/// Perturbation intervals are maximal stretches with `|a| > a_threshold`,
/// expanded by `pad` on each side and merged when closer than
/// `min_duration`. The steady class is the complement. Any interval shorter
/// than `min_duration` is absorbed into its predecessor (or, at the window
/// start, its successor).
pub fn segment_steady_perturbation(
    leader: &Trajectory,
    params: &SegmentParams,
) -> Result<SegmentLabel, AnalysisError> {
    let dt = leader.uniform_dt().ok_or(AnalysisError::NonUniformGrid)?;
    let a = leader.a().ok_or(AnalysisError::MissingAcceleration)?;
    let n = a.len();
    let pad_n = float::round(params.pad / dt) as usize;
    let min_n = (float::round(params.min_duration / dt) as usize).max(1);

    let mut perturbed = vec![false; n];
    let mut i = 0;
    while i < n {
        if a[i].abs() > params.a_threshold {
            let mut j = i;
            while j < n && a[j].abs() > params.a_threshold {
                j += 1;
            }
            let lo = i.saturating_sub(pad_n);
            let hi = (j + pad_n).min(n);
            for flag in perturbed[lo..hi].iter_mut() {
                *flag = true;
            }
            i = j;
        } else {
            i += 1;
        }
    }

    // merge perturbation runs separated by short steady gaps: runs
    // alternate classes, so a gap is a steady run with perturbed neighbors
    let mut runs = label_runs(&perturbed);
    for i in 0..runs.len() {
        if !runs[i].2 && i > 0 && i + 1 < runs.len() && runs[i].1 - runs[i].0 < min_n {
            runs[i].2 = true;
        }
    }
    runs = coalesce(runs);

    // absorb intervals shorter than the minimum into a neighbor
    loop {
        if runs.len() <= 1 {
            break;
        }
        let Some(short) = runs.iter().position(|&(lo, hi, _)| hi - lo < min_n) else {
            break;
        };
        if short > 0 {
            let class = runs[short - 1].2;
            runs[short].2 = class;
        } else {
            let class = runs[short + 1].2;
            runs[short].2 = class;
        }
        runs = coalesce(runs);
    }

    let segments = runs
        .into_iter()
        .map(|(start, end, flag)| Segment {
            start,
            end,
            class: if flag {
                SegmentClass::Perturbation
            } else {
                SegmentClass::Steady
            },
            t_start: leader.t()[start],
            duration_s: (end - start) as f64 * dt,
        })
        .collect();
    Ok(SegmentLabel { segments, n, dt })
}

fn label_runs(flags: &[bool]) -> Vec<(usize, usize, bool)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=flags.len() {
        if i == flags.len() || flags[i] != flags[start] {
            out.push((start, i, flags[start]));
            start = i;
        }
    }
    out
}

fn coalesce(runs: Vec<(usize, usize, bool)>) -> Vec<(usize, usize, bool)> {
    let mut out: Vec<(usize, usize, bool)> = Vec::with_capacity(runs.len());
    for run in runs {
        match out.last_mut() {
            Some(last) if last.2 == run.2 => last.1 = run.1,
            _ => out.push(run),
        }
    }
    out
}

/// Per-vehicle, per-class speed variability row.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpeedStdRow {
    pub vehicle_id: String,
    pub class: SegmentClass,
    /// Population standard deviation of speed over the class (m/s).
    pub std: f64,
    pub mean: f64,
    pub n_samples: usize,
}

/// Population standard deviation of speed per vehicle over each segment
/// class that has samples.
pub fn speed_std_per_segment(
    dataset: &PlatoonDataset,
    labels: &SegmentLabel,
) -> Result<Vec<SpeedStdRow>, AnalysisError> {
    if labels.n_samples() != dataset.len() {
        return Err(AnalysisError::LabelMismatch);
    }
    let mut rows = Vec::new();
    for class in [SegmentClass::Steady, SegmentClass::Perturbation] {
        let idx = labels.class_indices(class);
        if idx.is_empty() {
            continue;
        }
        for veh in dataset.vehicles() {
            let v: Vec<f64> = idx.iter().map(|&i| veh.v()[i]).collect();
            rows.push(SpeedStdRow {
                vehicle_id: String::from(veh.vehicle_id()),
                class,
                std: numeric::population_std(&v),
                mean: numeric::mean(&v),
                n_samples: v.len(),
            });
        }
    }
    Ok(rows)
}

/// Speed standard deviation per vehicle over one class, erroring when the
/// class has no samples.
pub fn speed_std_for_class(
    dataset: &PlatoonDataset,
    labels: &SegmentLabel,
    class: SegmentClass,
) -> Result<Vec<f64>, AnalysisError> {
    if labels.n_samples() != dataset.len() {
        return Err(AnalysisError::LabelMismatch);
    }
    let idx = labels.class_indices(class);
    if idx.is_empty() {
        return Err(AnalysisError::EmptyClass { class });
    }
    Ok(dataset
        .vehicles()
        .iter()
        .map(|veh| {
            let v: Vec<f64> = idx.iter().map(|&i| veh.v()[i]).collect();
            numeric::population_std(&v)
        })
        .collect())
}

/// String-stability figures over one perturbation interval.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IntervalStability {
    pub t_start: f64,
    pub t_end: f64,
    /// `||v_i - mean(v_i)||_2 / ||v_leader - mean(v_leader)||_2` per
    /// follower, in platoon order; `None` when the leader barely deviates.
    pub l2_ratios: Vec<Option<f64>>,
    /// `max(v_follower) - max(v_leader)` within the interval per follower
    /// (m/s).
    pub overshoot_peaks: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum StabilityVerdict {
    /// L2 ratios strictly increase along the chain in most intervals.
    Amplifying,
    /// All L2 ratios stay at or below one in most intervals.
    Attenuating,
    Mixed,
}

impl StabilityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityVerdict::Amplifying => "amplifying",
            StabilityVerdict::Attenuating => "attenuating",
            StabilityVerdict::Mixed => "mixed",
        }
    }
}

/// Per-interval string-stability metrics and the platoon-level verdict.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StabilityMetrics {
    pub intervals: Vec<IntervalStability>,
    pub verdict: StabilityVerdict,
}

/// L2 amplification of speed deviations along the platoon over every
/// perturbation interval.
///
/// Deviations are taken around each vehicle's own interval mean, so the
/// metric is invariant to a constant speed offset and scales linearly with
/// the deviation amplitude.
pub fn l2_amplification(
    dataset: &PlatoonDataset,
    labels: &SegmentLabel,
) -> Result<StabilityMetrics, AnalysisError> {
    if dataset.n_vehicles() < 2 {
        return Err(AnalysisError::NotAPlatoon);
    }
    if labels.n_samples() != dataset.len() {
        return Err(AnalysisError::LabelMismatch);
    }
    let ranges = labels.class_ranges(SegmentClass::Perturbation);
    if ranges.is_empty() {
        return Err(AnalysisError::NoPerturbationIntervals);
    }
    let deviation_norm = |veh: &Trajectory, lo: usize, hi: usize| -> f64 {
        let v = &veh.v()[lo..hi];
        let m = numeric::mean(v);
        let dev: Vec<f64> = v.iter().map(|&x| x - m).collect();
        numeric::l2_norm(&dev)
    };
    let peak = |veh: &Trajectory, lo: usize, hi: usize| -> f64 {
        veh.v()[lo..hi]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut intervals = Vec::with_capacity(ranges.len());
    for &(lo, hi) in &ranges {
        let leader = dataset.leader();
        let leader_norm = deviation_norm(leader, lo, hi);
        let leader_peak = peak(leader, lo, hi);
        let mut l2_ratios = Vec::new();
        let mut overshoot_peaks = Vec::new();
        for veh in &dataset.vehicles()[1..] {
            let ratio = if leader_norm < MIN_LEADER_DEVIATION_NORM {
                None
            } else {
                Some(deviation_norm(veh, lo, hi) / leader_norm)
            };
            l2_ratios.push(ratio);
            overshoot_peaks.push(peak(veh, lo, hi) - leader_peak);
        }
        let t = dataset.t();
        intervals.push(IntervalStability {
            t_start: t[lo],
            t_end: t[lo] + (hi - lo) as f64 * labels.dt(),
            l2_ratios,
            overshoot_peaks,
        });
    }

    let mut defined = 0usize;
    let mut amplifying = 0usize;
    let mut attenuating = 0usize;
    for interval in &intervals {
        let ratios: Option<Vec<f64>> = interval.l2_ratios.iter().cloned().collect();
        let Some(ratios) = ratios else { continue };
        defined += 1;
        let chain_amplifies = if ratios.len() >= 2 {
            ratios.windows(2).all(|w| w[0] < w[1])
        } else {
            ratios[0] > 1.0
        };
        if chain_amplifies {
            amplifying += 1;
        } else if ratios.iter().all(|&r| r <= 1.0) {
            attenuating += 1;
        }
    }
    let verdict = if defined > 0 && 2 * amplifying > defined {
        StabilityVerdict::Amplifying
    } else if defined > 0 && 2 * attenuating > defined {
        StabilityVerdict::Attenuating
    } else {
        StabilityVerdict::Mixed
    };
    Ok(StabilityMetrics { intervals, verdict })
}

/// Two-dimensional speed–acceleration probability map.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct JointDistribution {
    pub v_edges: Vec<f64>,
    pub a_edges: Vec<f64>,
    /// Row-major `[v_bin][a_bin]` relative frequencies, summing to one.
    pub mass: Vec<f64>,
    pub n_samples: usize,
    /// Samples outside the edge range, clipped into the boundary bins.
    pub clipped: usize,
}

impl JointDistribution {
    pub fn n_v_bins(&self) -> usize {
        self.v_edges.len() - 1
    }

    pub fn n_a_bins(&self) -> usize {
        self.a_edges.len() - 1
    }

    pub fn cell(&self, vi: usize, ai: usize) -> f64 {
        self.mass[vi * self.n_a_bins() + ai]
    }
}

fn check_edges(edges: &[f64]) -> Result<(), AnalysisError> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::BadEdges);
    }
    Ok(())
}

fn bin_index(edges: &[f64], x: f64, clipped: &mut usize) -> usize {
    let bins = edges.len() - 1;
    if x < edges[0] {
        *clipped += 1;
        return 0;
    }
    if x > edges[bins] {
        *clipped += 1;
        return bins - 1;
    }
    let idx = edges.partition_point(|&e| e <= x);
    idx.saturating_sub(1).min(bins - 1)
}

/// Joint speed–acceleration distribution of one trajectory on the given bin
/// edges. Out-of-range samples clip into the boundary bins and are counted.
pub fn joint_distribution(
    traj: &Trajectory,
    v_edges: &[f64],
    a_edges: &[f64],
) -> Result<JointDistribution, AnalysisError> {
    check_edges(v_edges)?;
    check_edges(a_edges)?;
    if traj.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let a = traj.a().ok_or(AnalysisError::MissingAcceleration)?;
    let n_a = a_edges.len() - 1;
    let n_v = v_edges.len() - 1;
    let mut counts = vec![0u64; n_v * n_a];
    let mut clipped = 0usize;
    for (&vi, &ai) in traj.v().iter().zip(a.iter()) {
        let vb = bin_index(v_edges, vi, &mut clipped);
        let ab = bin_index(a_edges, ai, &mut clipped);
        counts[vb * n_a + ab] += 1;
    }
    let n = traj.len();
    Ok(JointDistribution {
        v_edges: v_edges.to_vec(),
        a_edges: a_edges.to_vec(),
        mass: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        n_samples: n,
        clipped,
    })
}

/// Bin edges covering every vehicle's speed and acceleration ranges,
/// aligned to multiples of the bin widths.
pub fn auto_edges(
    dataset: &PlatoonDataset,
    v_width: f64,
    a_width: f64,
) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
    if !(v_width > 0.0) {
        return Err(AnalysisError::NonPositiveBinWidth(v_width));
    }
    if !(a_width > 0.0) {
        return Err(AnalysisError::NonPositiveBinWidth(a_width));
    }
    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    let mut a_min = f64::INFINITY;
    let mut a_max = f64::NEG_INFINITY;
    for veh in dataset.vehicles() {
        for &v in veh.v() {
            v_min = v_min.min(v);
            v_max = v_max.max(v);
        }
        let a = veh.a().ok_or(AnalysisError::MissingAcceleration)?;
        for &ai in a {
            a_min = a_min.min(ai);
            a_max = a_max.max(ai);
        }
    }
    let make = |lo: f64, hi: f64, w: f64| -> Vec<f64> {
        let first = float::floor(lo / w);
        let mut bins = (float::ceil(hi / w) - first) as usize;
        if bins == 0 {
            bins = 1;
        }
        (0..=bins).map(|k| (first + k as f64) * w).collect()
    };
    Ok((make(v_min, v_max, v_width), make(a_min, a_max, a_width)))
}

/// Pearson correlation between two probability maps on identical bins.
pub fn map_correlation(a: &JointDistribution, b: &JointDistribution) -> Result<f64, AnalysisError> {
    if a.v_edges != b.v_edges || a.a_edges != b.a_edges {
        return Err(AnalysisError::BinMismatch);
    }
    numeric::pearson(&a.mass, &b.mass).ok_or(AnalysisError::ZeroVariance)
}
