//! Synthetic platoon generation: a scripted leader executing scheduled
//! speed events, followed by any mix of CTH-PID ACC controllers and IDM
//! human-driver surrogates, integrated with forward Euler.
//!
//! The chain is deterministic for identical inputs; optional zero-mean
//! Gaussian command noise is driven by a fixed-seed ChaCha stream.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};

use crate::float;
use crate::platoon::{DrivingMode, PlatoonDataset, PlatoonError};
use crate::trajectory::Trajectory;

use crate::energy::GRAVITY;

/// Hard deceleration floor of the human-driver surrogate (m/s²).
pub const HUMAN_DECEL_FLOOR: f64 = -9.0;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SimError {
    #[error("invalid leader cycle: {0}")]
    InvalidCycle(String),
    #[error("event {index} (t = {t_start} s) starts before the previous ramp finishes")]
    InfeasibleEvent { index: usize, t_start: f64 },
    #[error("invalid controller parameters: {0}")]
    InvalidController(&'static str),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(&'static str),
    #[error("a platoon needs at least one follower")]
    NoFollowers,
    #[error("collision: follower {follower} reached non-positive gap at t = {time} s")]
    Collision {
        time: f64,
        follower: usize,
        /// Trajectories up to the last valid step, on the internal grid.
        partial: Option<Box<PlatoonDataset>>,
    },
    #[error(transparent)]
    Platoon(#[from] PlatoonError),
}

/// One scheduled leader maneuver: ramp to `target` at `accel` magnitude,
/// starting at `t_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpeedEvent {
    pub t_start: f64,
    /// Speed to reach (m/s).
    pub target: f64,
    /// Acceleration magnitude of the ramp (m/s²).
    pub accel: f64,
}

/// Road-grade breakpoint: grade angle `theta` (rad) at travelled distance
/// `s` (m); the profile interpolates linearly between breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GradePoint {
    pub s: f64,
    pub theta: f64,
}

/// Scripted leader profile: cruise at `base_speed`, execute the scheduled
/// events, cruise after each ramp. Speed is continuous and piecewise linear.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LeaderCycle {
    /// Initial cruise speed (m/s).
    pub base_speed: f64,
    /// Total cycle duration (s).
    pub duration: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub events: Vec<SpeedEvent>,
    /// Optional grade profile over distance; empty means flat road.
    #[cfg_attr(feature = "serde", serde(default))]
    pub grade: Vec<GradePoint>,
}

/// Piecewise constant-acceleration phase of the compiled leader profile.
#[derive(Debug, Clone, Copy)]
struct Phase {
    t0: f64,
    v0: f64,
    s0: f64,
    a: f64,
    t_end: f64,
}

impl LeaderCycle {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(SimError::InvalidCycle(String::from(
                "duration must be positive",
            )));
        }
        if !(self.base_speed >= 0.0) || !self.base_speed.is_finite() {
            return Err(SimError::InvalidCycle(String::from(
                "base speed must be non-negative",
            )));
        }
        for (i, ev) in self.events.iter().enumerate() {
            if !(ev.target >= 0.0) || !ev.target.is_finite() {
                return Err(SimError::InvalidCycle(alloc::format!(
                    "event {i} target speed must be non-negative"
                )));
            }
            if !(ev.accel > 0.0) || !ev.accel.is_finite() {
                return Err(SimError::InvalidCycle(alloc::format!(
                    "event {i} acceleration must be positive"
                )));
            }
            if i > 0 && ev.t_start <= self.events[i - 1].t_start {
                return Err(SimError::InvalidCycle(alloc::format!(
                    "event {i} does not start after event {}",
                    i - 1
                )));
            }
        }
        for (i, point) in self.grade.iter().enumerate() {
            if !point.s.is_finite() || point.theta.abs() >= core::f64::consts::FRAC_PI_2 {
                return Err(SimError::InvalidCycle(alloc::format!(
                    "grade point {i} is out of range"
                )));
            }
            if i > 0 && point.s <= self.grade[i - 1].s {
                return Err(SimError::InvalidCycle(alloc::format!(
                    "grade point {i} must lie beyond grade point {}",
                    i - 1
                )));
            }
        }
        self.compile().map(|_| ())
    }

    fn compile(&self) -> Result<Vec<Phase>, SimError> {
        let mut phases = Vec::new();
        let mut t = 0.0;
        let mut v = self.base_speed;
        let mut s = 0.0;
        let push = |phases: &mut Vec<Phase>, t0: f64, v0: f64, s0: f64, a: f64, t_end: f64| {
            phases.push(Phase {
                t0,
                v0,
                s0,
                a,
                t_end,
            });
        };
        for (index, ev) in self.events.iter().enumerate() {
            if ev.t_start < t - 1e-9 {
                return Err(SimError::InfeasibleEvent {
                    index,
                    t_start: ev.t_start,
                });
            }
            let t_start = ev.t_start.max(t);
            if t_start > t {
                push(&mut phases, t, v, s, 0.0, t_start);
                s += v * (t_start - t);
                t = t_start;
            }
            let ramp = (ev.target - v).abs() / ev.accel;
            if ramp > 0.0 {
                let a = if ev.target >= v { ev.accel } else { -ev.accel };
                push(&mut phases, t, v, s, a, t + ramp);
                s += v * ramp + 0.5 * a * ramp * ramp;
                v = ev.target;
                t += ramp;
            }
        }
        push(&mut phases, t, v, s, 0.0, f64::INFINITY);
        Ok(phases)
    }

    /// Grade angle at travelled distance `s`, clamped to the profile ends.
    pub fn grade_at(&self, s: f64) -> f64 {
        GradeLookup::new(self).at(s)
    }
}

/// Precomputed grade profile for the integration loop.
struct GradeLookup {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl GradeLookup {
    fn new(cycle: &LeaderCycle) -> Self {
        Self {
            xs: cycle.grade.iter().map(|g| g.s).collect(),
            ys: cycle.grade.iter().map(|g| g.theta).collect(),
        }
    }

    fn at(&self, s: f64) -> f64 {
        if self.xs.is_empty() {
            return 0.0;
        }
        crate::numeric::interp_linear(&self.xs, &self.ys, s)
    }
}

fn eval_phases(phases: &[Phase], t: f64) -> (f64, f64, f64) {
    let idx = phases
        .partition_point(|p| p.t_end <= t)
        .min(phases.len() - 1);
    let p = &phases[idx];
    let dt = t - p.t0;
    (p.v0 + p.a * dt, p.a, p.s0 + p.v0 * dt + 0.5 * p.a * dt * dt)
}

/// Sample the leader profile onto a uniform grid of step `dt`, with exact
/// piecewise closed-form speed and position.
pub fn generate_leader(cycle: &LeaderCycle, dt: f64) -> Result<Trajectory, SimError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SimError::InvalidConfig("dt must be positive"));
    }
    cycle.validate()?;
    let phases = cycle.compile()?;
    let grade = GradeLookup::new(cycle);
    let steps = float::floor(cycle.duration / dt + 1e-9) as usize;
    let mut t = Vec::with_capacity(steps + 1);
    let mut v = Vec::with_capacity(steps + 1);
    let mut a = Vec::with_capacity(steps + 1);
    let mut s = Vec::with_capacity(steps + 1);
    let mut theta = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let tk = k as f64 * dt;
        let (vk, ak, sk) = eval_phases(&phases, tk);
        t.push(tk);
        v.push(vk);
        a.push(ak);
        s.push(sk);
        theta.push(grade.at(sk));
    }
    Ok(Trajectory::new("C1", t, v)
        .map_err(PlatoonError::from)?
        .with_acceleration(a)
        .map_err(PlatoonError::from)?
        .with_distance(s)
        .map_err(PlatoonError::from)?
        .with_grade(theta)
        .map_err(PlatoonError::from)?)
}

/// Kinematic state of one vehicle as seen by a controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// Speed (m/s).
    pub v: f64,
    /// Position along the road (m).
    pub s: f64,
}

/// The follower came within zero gap of its predecessor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionInfo {
    pub gap: f64,
}

/// Constant time-headway PID controller parameters. The spacing target is
/// `s0 + T v`; the PID acts on the spacing error with the gap-closing rate
/// as derivative signal.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AccControllerParams {
    /// Desired time headway T (s).
    pub time_headway: f64,
    /// Standstill spacing s0 (m).
    pub standstill_gap: f64,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Acceleration command floor (m/s²).
    pub a_min: f64,
    /// Acceleration command ceiling (m/s²).
    pub a_max: f64,
    /// Set speed the controller will not exceed (m/s).
    pub v_set: f64,
}

impl Default for AccControllerParams {
    fn default() -> Self {
        Self::stable_preset()
    }
}

impl AccControllerParams {
    /// Gains with closed-loop speed transfer magnitude below one at every
    /// frequency: disturbances attenuate along the chain.
    pub fn stable_preset() -> Self {
        Self {
            time_headway: 1.2,
            standstill_gap: 2.0,
            kp: 1.8,
            ki: 0.02,
            kd: 0.6,
            a_min: -3.0,
            a_max: 2.0,
            v_set: 30.0,
        }
    }

    /// Under-damped gains whose transfer magnitude exceeds one around
    /// [`presets::PERTURBATION_OMEGA`]: disturbances near that frequency
    /// grow from vehicle to vehicle.
    pub fn unstable_preset() -> Self {
        Self {
            kp: 0.9,
            ki: 0.12,
            kd: 0.0,
            ..Self::stable_preset()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.time_headway > 0.0) {
            return Err(SimError::InvalidController("time headway must be positive"));
        }
        if !(self.a_min < 0.0 && self.a_max > 0.0) {
            return Err(SimError::InvalidController(
                "acceleration limits must straddle zero",
            ));
        }
        if !(self.standstill_gap >= 0.0) {
            return Err(SimError::InvalidController(
                "standstill gap must be non-negative",
            ));
        }
        for g in [self.kp, self.ki, self.kd, self.v_set] {
            if !g.is_finite() {
                return Err(SimError::InvalidController("gains must be finite"));
            }
        }
        Ok(())
    }

    /// Magnitude of the linearized speed-to-speed (equivalently gap-to-gap)
    /// transfer of one follower hop at angular frequency `omega` (rad/s).
    ///
    /// Linearizing the loop (spacing error `e = gap - s0 - T v`, command
    /// `a = kp e + ki ∫e + kd (v_front - v - T a)`) gives
    ///
    /// ```text
    ///            kd s^2 + kp s + ki
    /// H(s) = --------------------------------------------------------
    ///        (1 + kd T) s^3 + (kd + kp T) s^2 + (kp + ki T) s + ki
    /// ```
    ///
    /// The chain attenuates disturbances at `omega` when the returned value
    /// is at most one for every frequency.
    pub fn speed_transfer_gain(&self, omega: f64) -> f64 {
        let (kp, ki, kd, t) = (self.kp, self.ki, self.kd, self.time_headway);
        let w2 = omega * omega;
        let num_re = ki - kd * w2;
        let num_im = kp * omega;
        let den_re = ki - (kd + kp * t) * w2;
        let den_im = (kp + ki * t) * omega - (1.0 + kd * t) * omega * w2;
        float::sqrt((num_re * num_re + num_im * num_im) / (den_re * den_re + den_im * den_im))
    }
}

/// Stateful CTH-PID ACC follower.
///
/// The integral term freezes while the command is saturated or capped by
/// the set speed; the derivative uses the gap-closing rate
/// `v_front - v_own - T a_prev` with the previously achieved acceleration.
#[derive(Debug, Clone)]
pub struct AccController {
    pub params: AccControllerParams,
    vehicle_length: f64,
    integral: f64,
    prev_accel: f64,
}

impl AccController {
    pub fn new(params: AccControllerParams, vehicle_length: f64) -> Self {
        Self {
            params,
            vehicle_length,
            integral: 0.0,
            prev_accel: 0.0,
        }
    }

    /// Spacing at which the controller is at equilibrium for speed `v`.
    pub fn equilibrium_gap(&self, v: f64) -> f64 {
        self.params.standstill_gap + self.params.time_headway * v
    }

    /// One control step; returns the commanded acceleration (m/s²).
    pub fn step(
        &mut self,
        own: VehicleState,
        front: VehicleState,
        dt: f64,
    ) -> Result<f64, CollisionInfo> {
        let p = &self.params;
        let gap = front.s - own.s - self.vehicle_length;
        if gap <= 0.0 {
            return Err(CollisionInfo { gap });
        }
        let error = gap - (p.standstill_gap + p.time_headway * own.v);
        let error_rate = front.v - own.v - p.time_headway * self.prev_accel;
        let raw = p.kp * error + p.ki * self.integral + p.kd * error_rate;
        // cap so the follower holds its set speed
        let capped = raw.min((p.v_set - own.v) / dt);
        let command = capped.clamp(p.a_min, p.a_max);
        if command == raw {
            self.integral += error * dt;
        }
        self.prev_accel = command;
        Ok(command)
    }

    /// Report the acceleration actually achieved by the plant (grade
    /// disturbance, speed floor), so the derivative term sees the real
    /// value on the next step.
    pub fn set_achieved_accel(&mut self, a: f64) {
        self.prev_accel = a;
    }
}

/// Intelligent-driver-model parameters for the human-driver surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct HumanModelParams {
    /// Free-flow desired speed (m/s).
    pub desired_speed: f64,
    /// Desired time headway (s).
    pub time_headway: f64,
    /// Minimum standstill gap (m).
    pub min_gap: f64,
    /// Maximum acceleration (m/s²).
    pub max_accel: f64,
    /// Comfortable deceleration (m/s²).
    pub comfortable_decel: f64,
    /// Free-flow exponent.
    pub exponent: f64,
}

impl Default for HumanModelParams {
    fn default() -> Self {
        Self {
            desired_speed: 30.0,
            time_headway: 1.5,
            min_gap: 2.0,
            max_accel: 1.5,
            comfortable_decel: 2.0,
            exponent: 4.0,
        }
    }
}

impl HumanModelParams {
    pub fn validate(&self) -> Result<(), SimError> {
        for (value, _name) in [
            (self.desired_speed, "desired_speed"),
            (self.time_headway, "time_headway"),
            (self.min_gap, "min_gap"),
            (self.max_accel, "max_accel"),
            (self.comfortable_decel, "comfortable_decel"),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SimError::InvalidController(
                    "human model parameters must be positive",
                ));
            }
        }
        if !(self.exponent >= 1.0) {
            return Err(SimError::InvalidController("exponent must be at least 1"));
        }
        Ok(())
    }

    /// Desired dynamic gap `s*(v, dv)` of the IDM.
    pub fn desired_gap(&self, v: f64, dv: f64) -> f64 {
        let dynamic = v * self.time_headway
            + v * dv / (2.0 * float::sqrt(self.max_accel * self.comfortable_decel));
        self.min_gap + dynamic.max(0.0)
    }

    /// Closed-form equilibrium gap behind a constant-speed leader:
    /// `s*(v, 0) / sqrt(1 - (v / v0)^delta)`.
    pub fn equilibrium_gap(&self, v: f64) -> f64 {
        let free = 1.0 - libm::pow(v / self.desired_speed, self.exponent);
        self.desired_gap(v, 0.0) / float::sqrt(free)
    }
}

/// Stateless IDM follower.
#[derive(Debug, Clone)]
pub struct HumanDriver {
    pub params: HumanModelParams,
    vehicle_length: f64,
}

impl HumanDriver {
    pub fn new(params: HumanModelParams, vehicle_length: f64) -> Self {
        Self {
            params,
            vehicle_length,
        }
    }

    /// One IDM evaluation; returns the acceleration (m/s²), bounded below
    /// by [`HUMAN_DECEL_FLOOR`].
    pub fn step(&self, own: VehicleState, front: VehicleState) -> Result<f64, CollisionInfo> {
        let p = &self.params;
        let gap = front.s - own.s - self.vehicle_length;
        if gap <= 0.0 {
            return Err(CollisionInfo { gap });
        }
        let dv = own.v - front.v;
        let desired = p.desired_gap(own.v, dv);
        let free_term = libm::pow(own.v / p.desired_speed, p.exponent);
        let interaction = desired / gap;
        let a = p.max_accel * (1.0 - free_term - interaction * interaction);
        Ok(a.max(HUMAN_DECEL_FLOOR))
    }
}

/// Controller selection for one follower slot.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum FollowerModel {
    Acc(AccControllerParams),
    Human(HumanModelParams),
}

impl FollowerModel {
    fn validate(&self) -> Result<(), SimError> {
        match self {
            FollowerModel::Acc(p) => p.validate(),
            FollowerModel::Human(p) => p.validate(),
        }
    }
}

/// Zero-mean Gaussian acceleration-command noise with a fixed seed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseConfig {
    pub seed: u64,
    /// Standard deviation added to every follower command (m/s²).
    pub accel_std: f64,
}

/// Integration and output settings for a platoon run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SimConfig {
    /// Internal forward-Euler step (s).
    pub sim_dt: f64,
    /// Grid step of the returned dataset (s).
    pub output_dt: f64,
    /// Common vehicle length (m).
    pub vehicle_length: f64,
    /// Optional command noise; `None` keeps the run fully deterministic.
    pub noise: Option<NoiseConfig>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            sim_dt: 0.05,
            output_dt: 0.1,
            vehicle_length: 5.0,
            noise: None,
        }
    }
}

struct GaussianSampler {
    rng: rand_chacha::ChaCha12Rng,
    spare: Option<f64>,
}

impl GaussianSampler {
    fn new(seed: u64) -> Self {
        Self {
            rng: rand_chacha::ChaCha12Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn uniform01(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via Box-Muller.
    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = loop {
            let u = self.uniform01();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.uniform01();
        let r = float::sqrt(-2.0 * float::ln(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        self.spare = Some(r * float::sin(angle));
        r * float::cos(angle)
    }
}

enum Controller {
    Acc(AccController),
    Human(HumanDriver),
}

impl Controller {
    fn step(
        &mut self,
        own: VehicleState,
        front: VehicleState,
        dt: f64,
    ) -> Result<f64, CollisionInfo> {
        match self {
            Controller::Acc(c) => c.step(own, front, dt),
            Controller::Human(d) => d.step(own, front),
        }
    }

    fn set_achieved_accel(&mut self, a: f64) {
        if let Controller::Acc(c) = self {
            c.set_achieved_accel(a);
        }
    }

    fn equilibrium_gap(&self, v: f64) -> f64 {
        match self {
            Controller::Acc(c) => c.equilibrium_gap(v),
            Controller::Human(d) => d.params.equilibrium_gap(v),
        }
    }
}

fn mode_of(followers: &[FollowerModel]) -> DrivingMode {
    let accs = followers
        .iter()
        .filter(|f| matches!(f, FollowerModel::Acc(_)))
        .count();
    if accs == followers.len() {
        DrivingMode::Acc
    } else if accs == 0 {
        DrivingMode::Human
    } else {
        DrivingMode::Mixed
    }
}

/// Simulate the full chain: the leader executes `cycle`, each follower runs
/// its controller against the vehicle ahead, starting at its equilibrium
/// spacing at the leader's initial speed.
///
/// The returned dataset carries speed, achieved acceleration, position,
/// grade, and position-derived ivs for every vehicle on the `output_dt`
/// grid, labelled `C1..Cn`. A non-positive gap aborts the run with the
/// offending time and the partial trajectories.
pub fn simulate_platoon(
    cycle: &LeaderCycle,
    followers: &[FollowerModel],
    cfg: &SimConfig,
) -> Result<PlatoonDataset, SimError> {
    if followers.is_empty() {
        return Err(SimError::NoFollowers);
    }
    if !(cfg.sim_dt > 0.0) || !cfg.sim_dt.is_finite() {
        return Err(SimError::InvalidConfig("sim_dt must be positive"));
    }
    if cfg.output_dt + 1e-12 < cfg.sim_dt {
        return Err(SimError::InvalidConfig(
            "output_dt must not be below sim_dt",
        ));
    }
    if !(cfg.vehicle_length > 0.0) {
        return Err(SimError::InvalidConfig("vehicle length must be positive"));
    }
    for f in followers {
        f.validate()?;
    }
    cycle.validate()?;

    let dt = cfg.sim_dt;
    let phases = cycle.compile()?;
    let grade = GradeLookup::new(cycle);
    let steps = float::floor(cycle.duration / dt + 1e-9) as usize;
    let n = steps + 1;
    let n_veh = followers.len() + 1;

    let mut v: Vec<Vec<f64>> = (0..n_veh).map(|_| Vec::with_capacity(n)).collect();
    let mut s: Vec<Vec<f64>> = (0..n_veh).map(|_| Vec::with_capacity(n)).collect();
    let mut a: Vec<Vec<f64>> = (0..n_veh).map(|_| Vec::with_capacity(n)).collect();

    // leader from the closed-form profile
    for k in 0..n {
        let tk = k as f64 * dt;
        let (vk, ak, sk) = eval_phases(&phases, tk);
        v[0].push(vk);
        a[0].push(ak);
        s[0].push(sk);
    }

    // followers start at controller equilibrium behind their predecessor
    let mut controllers: Vec<Controller> = followers
        .iter()
        .map(|f| match f {
            FollowerModel::Acc(p) => Controller::Acc(AccController::new(*p, cfg.vehicle_length)),
            FollowerModel::Human(p) => Controller::Human(HumanDriver::new(*p, cfg.vehicle_length)),
        })
        .collect();
    let v0 = v[0][0];
    for i in 1..n_veh {
        let gap0 = controllers[i - 1].equilibrium_gap(v0);
        let s0 = s[i - 1][0] - cfg.vehicle_length - gap0;
        v[i].push(v0);
        s[i].push(s0);
    }

    let mut noise = cfg
        .noise
        .map(|nc| (GaussianSampler::new(nc.seed), nc.accel_std));

    for k in 0..steps {
        for i in 1..n_veh {
            let own = VehicleState {
                v: v[i][k],
                s: s[i][k],
            };
            let front = VehicleState {
                v: v[i - 1][k],
                s: s[i - 1][k],
            };
            let mut command = match controllers[i - 1].step(own, front, dt) {
                Ok(c) => c,
                Err(_) => {
                    let time = k as f64 * dt;
                    let partial = build_partial(&grade, &v, &s, &a, k, dt, mode_of(followers));
                    return Err(SimError::Collision {
                        time,
                        follower: i,
                        partial,
                    });
                }
            };
            if let Some((sampler, std)) = noise.as_mut() {
                command += *std * sampler.next();
            }
            // the road grade acts as a disturbance on the achieved
            // acceleration
            let achieved = command - GRAVITY * float::sin(grade.at(own.s));
            let v_next = (own.v + achieved * dt).max(0.0);
            let a_final = (v_next - own.v) / dt;
            controllers[i - 1].set_achieved_accel(a_final);
            a[i].push(a_final);
            v[i].push(v_next);
            s[i].push(own.s + own.v * dt);
        }
    }
    // achieved acceleration of the final sample repeats the last command
    for chan in a.iter_mut().skip(1) {
        let last = *chan.last().unwrap_or(&0.0);
        chan.push(last);
    }

    let dataset = assemble(&grade, &v, &s, &a, n, dt, mode_of(followers))?;
    let out = if (cfg.output_dt - dt).abs() < 1e-12 {
        dataset
    } else {
        dataset.resample(cfg.output_dt)?
    };
    Ok(out.compute_ivs(cfg.vehicle_length)?)
}

fn assemble(
    grade: &GradeLookup,
    v: &[Vec<f64>],
    s: &[Vec<f64>],
    a: &[Vec<f64>],
    n: usize,
    dt: f64,
    mode: DrivingMode,
) -> Result<PlatoonDataset, PlatoonError> {
    let t: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    let mut vehicles = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        let id = alloc::format!("C{}", i + 1);
        let theta: Vec<f64> = s[i][..n].iter().map(|&si| grade.at(si)).collect();
        let traj = Trajectory::new(id, t.clone(), v[i][..n].to_vec())?
            .with_acceleration(a[i][..n].to_vec())?
            .with_distance(s[i][..n].to_vec())?
            .with_grade(theta)?;
        vehicles.push(traj);
    }
    PlatoonDataset::new(vehicles, mode)
}

fn build_partial(
    grade: &GradeLookup,
    v: &[Vec<f64>],
    s: &[Vec<f64>],
    a: &[Vec<f64>],
    valid: usize,
    dt: f64,
    mode: DrivingMode,
) -> Option<Box<PlatoonDataset>> {
    // every channel has at least `valid` entries when the collision is
    // detected at sample index `valid`; that sample itself is dropped
    let n = valid
        .min(v.iter().map(|c| c.len()).min().unwrap_or(0))
        .min(s.iter().map(|c| c.len()).min().unwrap_or(0))
        .min(a.iter().map(|c| c.len()).min().unwrap_or(0));
    if n < 2 {
        return None;
    }
    assemble(grade, v, s, a, n, dt, mode).ok().map(Box::new)
}

/// Shipped scenarios and the frequency they exercise.
pub mod presets {
    use super::*;

    /// Fundamental angular frequency (rad/s) of the triangle-wave
    /// perturbation phase in [`perturbation_cycle`] (period 9.4 s).
    pub const PERTURBATION_OMEGA: f64 = 2.0 * core::f64::consts::PI / 9.4;

    /// Cruise at 25 m/s, then six triangle-wave speed oscillations
    /// (25 ↔ 22.65 m/s at ±0.5 m/s², period 9.4 s), then cruise again.
    ///
    /// The oscillation sits near the gain peak of
    /// [`AccControllerParams::unstable_preset`], so the two shipped gain
    /// sets produce clearly amplifying and clearly attenuating platoons.
    pub fn perturbation_cycle() -> LeaderCycle {
        let base = 25.0;
        let swing = 2.35;
        let accel = 0.5;
        let ramp = swing / accel;
        let mut events = Vec::new();
        let mut t = 60.0;
        for _ in 0..6 {
            events.push(SpeedEvent {
                t_start: t,
                target: base - swing,
                accel,
            });
            t += ramp;
            events.push(SpeedEvent {
                t_start: t,
                target: base,
                accel,
            });
            t += ramp;
        }
        LeaderCycle {
            base_speed: base,
            duration: 300.0,
            events,
            grade: Vec::new(),
        }
    }

    /// Long plateaus at 20, 24, 28, and back to 20 m/s, for spacing-policy
    /// analysis over a range of speeds.
    pub fn plateau_cycle() -> LeaderCycle {
        LeaderCycle {
            base_speed: 20.0,
            duration: 280.0,
            events: alloc::vec![
                SpeedEvent {
                    t_start: 60.0,
                    target: 24.0,
                    accel: 1.0
                },
                SpeedEvent {
                    t_start: 130.0,
                    target: 28.0,
                    accel: 1.0
                },
                SpeedEvent {
                    t_start: 200.0,
                    target: 20.0,
                    accel: 1.0
                },
            ],
            grade: Vec::new(),
        }
    }
}
