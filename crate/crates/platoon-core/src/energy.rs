//! Instantaneous tractive power and fuel-rate models, and their aggregation
//! to per-distance consumption figures.
//!
//! Four models are implemented:
//!
//! * tractive power at the wheels from road-load coefficients, mass, and
//!   grade, clamped at zero (no regeneration), aggregated to kWh/100 km;
//! * VT-micro: `exp` of a bivariate cubic polynomial in speed and
//!   acceleration, in L/s;
//! * VSP: specific power in W/kg mapped through a three-branch piecewise
//!   fuel-rate curve in g/s, divided by fuel density to L/s;
//! * ARRB: a polynomial of speed and acceleration in ml/s, with the
//!   squared-acceleration term active only for positive acceleration.
//!
//! All per-distance aggregation uses trapezoidal integration; fuel figures
//! come out in L/100 km, tractive energy in kWh/100 km.

use alloc::string::String;
use alloc::vec::Vec;

use crate::analysis::{SegmentClass, SegmentLabel};
use crate::float;
use crate::numeric;
use crate::platoon::PlatoonDataset;
use crate::trajectory::Trajectory;

/// Gravitational acceleration (m/s²), fixed.
pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnergyError {
    #[error("trajectory is not on a uniform time grid")]
    NonUniformGrid,
    #[error("trajectory has no acceleration channel; derive it first")]
    MissingAcceleration,
    #[error("zero distance travelled; consumption per distance is undefined")]
    ZeroDistance,
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
    #[error("segment label does not match the dataset grid")]
    LabelMismatch,
    #[error("per-vehicle parameter list has {got} entries, expected {expected}")]
    ParamsLengthMismatch { expected: usize, got: usize },
}

/// Common vehicle parameters: road-load coefficients, mass, and length.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct VehicleParams {
    /// Vehicle mass (kg).
    pub mass: f64,
    /// Road-load constant term (N).
    pub f0: f64,
    /// Road-load linear coefficient (N·s/m).
    pub f1: f64,
    /// Road-load quadratic coefficient (N·s²/m²).
    pub f2: f64,
    /// Vehicle length (m); used when deriving spacing from positions.
    pub length: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 1500.0,
            f0: 213.0,
            f1: 0.0861,
            f2: 0.0027,
            length: 5.0,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.mass > 0.0) {
            return Err(EnergyError::InvalidParams("mass must be positive"));
        }
        if self.f0 < 0.0 || self.f1 < 0.0 || self.f2 < 0.0 {
            return Err(EnergyError::InvalidParams(
                "road-load coefficients must be non-negative",
            ));
        }
        if !(self.length > 0.0) {
            return Err(EnergyError::InvalidParams("length must be positive"));
        }
        Ok(())
    }
}

/// Regression coefficient matrix of the VT-micro model. `k[i][j]` multiplies
/// `v^i * a^j` with speed in m/s and acceleration in m/s².
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VtMicroCoefficients {
    pub k: [[f64; 4]; 4],
}

impl Default for VtMicroCoefficients {
    fn default() -> Self {
        Self {
            k: [
                [-7.537, 0.4438, 0.1716, -0.0420],
                [0.0973, 0.0518, 0.0029, -0.0071],
                [-0.003, -7.42e-4, 1.09e-4, 1.16e-4],
                [5.3e-5, 6e-6, -1e-5, -6e-6],
            ],
        }
    }
}

/// Piecewise fuel-rate parameters of the VSP model. The three branches give
/// g/s as a function of specific power `P` (W/kg):
/// `f` below `lower`, `alpha*P^2 + beta*P + gamma` between the bounds, and
/// `delta*P + epsilon` from `upper` up (the upper breakpoint itself is
/// evaluated by the linear branch).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct VspParams {
    pub f: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Fuel density (g/L) used to convert g/s to L/s.
    pub rho: f64,
    /// Lower mode bound (W/kg).
    pub lower: f64,
    /// Upper mode bound (W/kg).
    pub upper: f64,
}

impl Default for VspParams {
    fn default() -> Self {
        Self {
            f: 2.48e-3,
            alpha: 1.98e-3,
            beta: 3.97e-2,
            gamma: 2.01e-1,
            delta: 7.93e-2,
            epsilon: 2.48e-3,
            rho: 850.0,
            lower: -10.0,
            upper: 10.0,
        }
    }
}

impl VspParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.rho > 0.0) {
            return Err(EnergyError::InvalidParams("rho must be positive"));
        }
        if !(self.lower < self.upper) {
            return Err(EnergyError::InvalidParams(
                "lower bound must be below upper",
            ));
        }
        Ok(())
    }

    /// Jumps of the piecewise g/s curve at its two breakpoints:
    /// `(middle(lower) - f, linear(upper) - middle(upper))`.
    ///
    /// The curve is not assumed continuous; these values are recorded in
    /// assessment metadata so the actual discontinuity is visible.
    pub fn breakpoint_jumps(&self) -> (f64, f64) {
        let mid = |p: f64| self.alpha * p * p + self.beta * p + self.gamma;
        let lin = |p: f64| self.delta * p + self.epsilon;
        (mid(self.lower) - self.f, lin(self.upper) - mid(self.upper))
    }
}

/// Polynomial coefficients of the ARRB model; the polynomial yields ml/s.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ArrbParams {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for ArrbParams {
    fn default() -> Self {
        Self {
            beta1: 0.666,
            beta2: 0.019,
            beta3: 0.001,
            beta4: 0.00005,
            gamma1: 0.12,
            gamma2: 0.058,
        }
    }
}

/// Instantaneous tractive power (kW) demanded at the wheels.
///
/// `1e-3 * max(0, (F0 + F1 v + F2 v^2 + 1.03 m a + m g sin(theta)) * v)`;
/// negative demand (braking, regeneration) clamps to zero.
pub fn tractive_power(v: f64, a: f64, theta: f64, p: &VehicleParams) -> f64 {
    let force =
        p.f0 + p.f1 * v + p.f2 * v * v + 1.03 * p.mass * a + p.mass * GRAVITY * float::sin(theta);
    1e-3 * (force * v).max(0.0)
}

/// Instantaneous VT-micro fuel rate (L/s):
/// `exp(sum_ij K[i][j] v^i a^j)`, strictly positive for any input.
pub fn vt_micro_rate(v: f64, a: f64, k: &VtMicroCoefficients) -> f64 {
    let mut exponent = 0.0;
    let mut vi = 1.0;
    for row in &k.k {
        let mut aj = 1.0;
        for &kij in row {
            exponent += kij * vi * aj;
            aj *= a;
        }
        vi *= v;
    }
    float::exp(exponent)
}

/// Instantaneous vehicle specific power (W/kg):
/// `v (1.1 a + 9.81 theta + 0.132) + 3.02e-4 v^3`, with the grade angle
/// entering linearly.
pub fn vsp_power(v: f64, a: f64, theta: f64) -> f64 {
    v * (1.1 * a + 9.81 * theta + 0.132) + 3.02e-4 * v * v * v
}

/// VSP fuel rate in g/s for a given specific power (W/kg).
pub fn vsp_rate_grams(power: f64, vp: &VspParams) -> f64 {
    if power < vp.lower {
        vp.f
    } else if power < vp.upper {
        vp.alpha * power * power + vp.beta * power + vp.gamma
    } else {
        vp.delta * power + vp.epsilon
    }
}

/// VSP fuel rate in L/s (g/s divided by fuel density).
pub fn vsp_rate(power: f64, vp: &VspParams) -> f64 {
    vsp_rate_grams(power, vp) / vp.rho
}

/// ARRB fuel rate in ml/s. The quadratic acceleration term uses only the
/// positive part of the acceleration.
pub fn arrb_rate_ml(v: f64, a: f64, p: &ArrbParams) -> f64 {
    let a_plus = a.max(0.0);
    p.beta1
        + p.beta2 * v
        + p.beta3 * v * v
        + p.beta4 * v * v * v
        + p.gamma1 * v * a
        + p.gamma2 * v * a_plus * a_plus
}

/// ARRB fuel rate in L/s.
pub fn arrb_rate(v: f64, a: f64, p: &ArrbParams) -> f64 {
    1e-3 * arrb_rate_ml(v, a, p)
}

/// Fuel-model selector carrying the model's coefficients. All variants
/// produce rates in L/s so the per-distance aggregation is written once.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "model", rename_all = "snake_case"))]
pub enum FuelModel {
    VtMicro(VtMicroCoefficients),
    Vsp(VspParams),
    Arrb(ArrbParams),
}

impl FuelModel {
    pub fn name(&self) -> &'static str {
        match self {
            FuelModel::VtMicro(_) => "vt_micro",
            FuelModel::Vsp(_) => "vsp",
            FuelModel::Arrb(_) => "arrb",
        }
    }

    /// Instantaneous fuel rate (L/s) at the given kinematic state.
    pub fn rate(&self, v: f64, a: f64, theta: f64) -> f64 {
        match self {
            FuelModel::VtMicro(k) => vt_micro_rate(v, a, k),
            FuelModel::Vsp(vp) => vsp_rate(vsp_power(v, a, theta), vp),
            FuelModel::Arrb(p) => arrb_rate(v, a, p),
        }
    }

    /// The three models with their published default coefficients.
    pub fn defaults() -> Vec<FuelModel> {
        alloc::vec![
            FuelModel::VtMicro(VtMicroCoefficients::default()),
            FuelModel::Vsp(VspParams::default()),
            FuelModel::Arrb(ArrbParams::default()),
        ]
    }
}

/// `(dt, speed, acceleration, grade)` with the grade defaulting to zero.
type Channels<'a> = (f64, &'a [f64], &'a [f64], Vec<f64>);

fn channels(traj: &Trajectory) -> Result<Channels<'_>, EnergyError> {
    let dt = traj.uniform_dt().ok_or(EnergyError::NonUniformGrid)?;
    let a = traj.a().ok_or(EnergyError::MissingAcceleration)?;
    let theta = match traj.theta() {
        Some(th) => th.to_vec(),
        None => alloc::vec![0.0; traj.len()],
    };
    Ok((dt, traj.v(), a, theta))
}

/// Per-sample tractive power series (kW) for a trajectory.
pub fn tractive_power_series(
    traj: &Trajectory,
    p: &VehicleParams,
) -> Result<Vec<f64>, EnergyError> {
    p.validate()?;
    let (_, v, a, theta) = channels(traj)?;
    Ok(v.iter()
        .zip(a.iter())
        .zip(theta.iter())
        .map(|((&vi, &ai), &thi)| tractive_power(vi, ai, thi, p))
        .collect())
}

/// Per-sample fuel rate series (L/s) for a trajectory under one model.
pub fn fuel_rate_series(traj: &Trajectory, model: &FuelModel) -> Result<Vec<f64>, EnergyError> {
    let (_, v, a, theta) = channels(traj)?;
    Ok(v.iter()
        .zip(a.iter())
        .zip(theta.iter())
        .map(|((&vi, &ai), &thi)| model.rate(vi, ai, thi))
        .collect())
}

fn per_distance(
    integrand: &[f64],
    v: &[f64],
    dt: f64,
    denominator_factor: f64,
    ranges: Option<&[(usize, usize)]>,
) -> Result<(f64, f64, f64), EnergyError> {
    let (num, dist, dur) = match ranges {
        None => (
            numeric::trapz_uniform(integrand, dt),
            numeric::trapz_uniform(v, dt),
            (integrand.len().saturating_sub(1)) as f64 * dt,
        ),
        Some(ranges) => {
            let mut num = 0.0;
            let mut dist = 0.0;
            let mut dur = 0.0;
            for &(lo, hi) in ranges {
                // a range of samples [lo, hi) owns the time slices up to the
                // next sample, so integrate through the closing knot; the
                // per-class integrals then sum exactly to the whole
                let end = (hi + 1).min(integrand.len());
                num += numeric::trapz_uniform(&integrand[lo..end], dt);
                dist += numeric::trapz_uniform(&v[lo..end], dt);
                dur += (end - lo).saturating_sub(1) as f64 * dt;
            }
            (num, dist, dur)
        }
    };
    if dist <= 0.0 {
        return Err(EnergyError::ZeroDistance);
    }
    Ok((num / (denominator_factor * dist), dist, dur))
}

/// Tractive energy consumption (kWh/100 km): time integral of tractive power
/// divided by `0.036` times the distance travelled.
pub fn tractive_energy(traj: &Trajectory, p: &VehicleParams) -> Result<f64, EnergyError> {
    let series = tractive_power_series(traj, p)?;
    let dt = traj.uniform_dt().ok_or(EnergyError::NonUniformGrid)?;
    per_distance(&series, traj.v(), dt, 0.036, None).map(|(e, _, _)| e)
}

/// Fuel consumption (L/100 km): time integral of the fuel rate divided by
/// `1e-5` times the distance travelled.
pub fn fuel_consumption(traj: &Trajectory, model: &FuelModel) -> Result<f64, EnergyError> {
    let series = fuel_rate_series(traj, model)?;
    let dt = traj.uniform_dt().ok_or(EnergyError::NonUniformGrid)?;
    per_distance(&series, traj.v(), dt, 1e-5, None).map(|(f, _, _)| f)
}

/// Per-model fuel figure in one report row.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FuelFigure {
    pub model: String,
    /// Fuel consumption (L/100 km).
    pub f_c: f64,
    /// Ratio to the leader's value over the same segment class.
    pub ratio_to_leader: Option<f64>,
}

/// Energy and fuel figures for one vehicle over one segment class
/// (`class = None` covers the whole trajectory).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EnergyReport {
    pub vehicle_id: String,
    pub class: Option<SegmentClass>,
    /// Tractive energy consumption (kWh/100 km).
    pub e_c: f64,
    /// Ratio of `e_c` to the leader's value over the same class.
    pub e_c_ratio_to_leader: Option<f64>,
    pub fuel: Vec<FuelFigure>,
    /// Distance travelled in the assessed windows (m).
    pub distance_m: f64,
    /// Duration of the assessed windows (s).
    pub duration_s: f64,
}

/// Result of assessing a whole platoon: one row per vehicle per segment
/// class, plus metadata about the VSP piecewise curve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PlatoonAssessment {
    pub rows: Vec<EnergyReport>,
    /// `(jump at lower breakpoint, jump at upper breakpoint)` of the VSP
    /// g/s curve, recorded whenever a VSP model was assessed.
    pub vsp_breakpoint_jumps: Option<(f64, f64)>,
    /// Mass applied to every vehicle (kg).
    pub normalized_mass: f64,
}

fn assess_vehicle(
    traj: &Trajectory,
    params: &VehicleParams,
    models: &[FuelModel],
    class: Option<SegmentClass>,
    ranges: Option<&[(usize, usize)]>,
) -> Result<EnergyReport, EnergyError> {
    let dt = traj.uniform_dt().ok_or(EnergyError::NonUniformGrid)?;
    let power = tractive_power_series(traj, params)?;
    let (e_c, distance_m, duration_s) = per_distance(&power, traj.v(), dt, 0.036, ranges)?;
    let mut fuel = Vec::with_capacity(models.len());
    for model in models {
        let rates = fuel_rate_series(traj, model)?;
        let (f_c, _, _) = per_distance(&rates, traj.v(), dt, 1e-5, ranges)?;
        fuel.push(FuelFigure {
            model: String::from(model.name()),
            f_c,
            ratio_to_leader: None,
        });
    }
    Ok(EnergyReport {
        vehicle_id: String::from(traj.vehicle_id()),
        class,
        e_c,
        e_c_ratio_to_leader: None,
        fuel,
        distance_m,
        duration_s,
    })
}

fn ratio(value: f64, leader: f64) -> Option<f64> {
    if leader == 0.0 {
        None
    } else {
        Some(value / leader)
    }
}

fn fill_ratios(rows: &mut [EnergyReport]) {
    if rows.is_empty() {
        return;
    }
    let leader = rows[0].clone();
    for row in rows.iter_mut() {
        row.e_c_ratio_to_leader = ratio(row.e_c, leader.e_c);
        for (fig, lead_fig) in row.fuel.iter_mut().zip(leader.fuel.iter()) {
            fig.ratio_to_leader = ratio(fig.f_c, lead_fig.f_c);
        }
    }
}

/// Assess every vehicle of the platoon with identical vehicle parameters and
/// model coefficients, so that differences reflect driving behavior only.
///
/// Emits one row per vehicle for the whole trajectory, and — when a segment
/// label is supplied — one row per vehicle per segment class. Each row
/// carries its ratio to the leader's value over the same class.
pub fn assess_platoon(
    dataset: &PlatoonDataset,
    params: &VehicleParams,
    models: &[FuelModel],
    labels: Option<&SegmentLabel>,
) -> Result<PlatoonAssessment, EnergyError> {
    let per_vehicle = alloc::vec![*params; dataset.n_vehicles()];
    assess_platoon_per_vehicle(dataset, &per_vehicle, models, labels)
}

/// Like [`assess_platoon`] but with explicit per-vehicle parameters, for
/// runs where platoon normalization is deliberately switched off.
pub fn assess_platoon_per_vehicle(
    dataset: &PlatoonDataset,
    params: &[VehicleParams],
    models: &[FuelModel],
    labels: Option<&SegmentLabel>,
) -> Result<PlatoonAssessment, EnergyError> {
    if params.len() != dataset.n_vehicles() {
        return Err(EnergyError::ParamsLengthMismatch {
            expected: dataset.n_vehicles(),
            got: params.len(),
        });
    }
    if let Some(labels) = labels {
        if labels.n_samples() != dataset.len() {
            return Err(EnergyError::LabelMismatch);
        }
    }
    let mut rows = Vec::new();
    let mut whole: Vec<EnergyReport> = dataset
        .vehicles()
        .iter()
        .zip(params.iter())
        .map(|(veh, p)| assess_vehicle(veh, p, models, None, None))
        .collect::<Result<_, _>>()?;
    fill_ratios(&mut whole);
    rows.extend(whole);

    if let Some(labels) = labels {
        for class in [SegmentClass::Steady, SegmentClass::Perturbation] {
            let ranges = labels.class_ranges(class);
            if ranges.is_empty() {
                continue;
            }
            let mut class_rows: Vec<EnergyReport> = dataset
                .vehicles()
                .iter()
                .zip(params.iter())
                .map(|(veh, p)| assess_vehicle(veh, p, models, Some(class), Some(&ranges)))
                .collect::<Result<_, _>>()?;
            fill_ratios(&mut class_rows);
            rows.extend(class_rows);
        }
    }

    let vsp_breakpoint_jumps = models.iter().find_map(|m| match m {
        FuelModel::Vsp(vp) => Some(vp.breakpoint_jumps()),
        _ => None,
    });
    Ok(PlatoonAssessment {
        rows,
        vsp_breakpoint_jumps,
        normalized_mass: params[0].mass,
    })
}
