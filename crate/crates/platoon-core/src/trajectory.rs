//! Per-vehicle kinematic time series and the operations that put them on a
//! clean uniform grid: resampling, acceleration derivation, road-grade
//! derivation, and distance integration.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::float;
use crate::numeric;

/// Minimum travelled distance over the grade-estimation window; below this
/// the previous grade value is carried forward (near-standstill rule).
pub const MIN_GRADE_DISTANCE: f64 = 0.5;

/// Relative tolerance used when checking a time grid for uniformity.
const GRID_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrajectoryError {
    #[error("trajectory has no samples")]
    Empty,
    #[error("trajectory needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("time is not strictly increasing at sample {index}")]
    NonMonotoneTime { index: usize },
    #[error("negative speed {value} at sample {index}")]
    NegativeSpeed { index: usize, value: f64 },
    #[error("non-finite value in channel {channel} at sample {index}")]
    NonFinite { channel: &'static str, index: usize },
    #[error("distance decreases at sample {index}")]
    DecreasingDistance { index: usize },
    #[error("road grade out of (-pi/2, pi/2) at sample {index}")]
    GradeOutOfRange { index: usize },
    #[error("channel {channel} has {got} samples, expected {expected}")]
    LengthMismatch {
        channel: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("time step must be positive, got {dt}")]
    NonPositiveStep { dt: f64 },
    #[error("time step {dt} exceeds trajectory duration {duration}")]
    StepExceedsDuration { dt: f64, duration: f64 },
    #[error("time grid is not uniform")]
    NonUniformGrid,
    #[error("smoothing window must be odd, got {window}")]
    EvenWindow { window: usize },
    #[error("missing channel: {0}")]
    MissingChannel(&'static str),
}

/// Kinematic state of one vehicle at a single timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Time (s).
    pub t: f64,
    /// Speed (m/s).
    pub v: f64,
    /// Acceleration (m/s²), if recorded or derived.
    pub a: Option<f64>,
    /// Cumulative travelled distance (m), if recorded or derived.
    pub s: Option<f64>,
    /// Altitude (m), if recorded.
    pub h: Option<f64>,
    /// Road grade angle (rad), if derived.
    pub theta: Option<f64>,
}

/// Time series of one vehicle's kinematic state.
///
/// Channels are stored column-wise. Speed is mandatory; acceleration,
/// distance, altitude, and grade are optional until derived. Time must be
/// strictly increasing but is only required to be uniform after
/// [`Trajectory::resample`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Trajectory {
    vehicle_id: String,
    t: Vec<f64>,
    v: Vec<f64>,
    a: Option<Vec<f64>>,
    s: Option<Vec<f64>>,
    h: Option<Vec<f64>>,
    theta: Option<Vec<f64>>,
    /// Distance was integrated from speed; its origin is arbitrary and must
    /// not be compared across vehicles.
    s_from_speed: bool,
    /// Grade was requested without altitude data and defaulted to zero.
    theta_assumed_zero: bool,
}

impl Trajectory {
    pub fn new(
        vehicle_id: impl Into<String>,
        t: Vec<f64>,
        v: Vec<f64>,
    ) -> Result<Self, TrajectoryError> {
        if t.is_empty() {
            return Err(TrajectoryError::Empty);
        }
        if v.len() != t.len() {
            return Err(TrajectoryError::LengthMismatch {
                channel: "v",
                expected: t.len(),
                got: v.len(),
            });
        }
        for (i, &ti) in t.iter().enumerate() {
            if !ti.is_finite() {
                return Err(TrajectoryError::NonFinite {
                    channel: "t",
                    index: i,
                });
            }
            if i > 0 && ti <= t[i - 1] {
                return Err(TrajectoryError::NonMonotoneTime { index: i });
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            if !vi.is_finite() {
                return Err(TrajectoryError::NonFinite {
                    channel: "v",
                    index: i,
                });
            }
            if vi < 0.0 {
                return Err(TrajectoryError::NegativeSpeed {
                    index: i,
                    value: vi,
                });
            }
        }
        Ok(Self {
            vehicle_id: vehicle_id.into(),
            t,
            v,
            a: None,
            s: None,
            h: None,
            theta: None,
            s_from_speed: false,
            theta_assumed_zero: false,
        })
    }

    pub fn with_acceleration(mut self, a: Vec<f64>) -> Result<Self, TrajectoryError> {
        Self::check_channel(&a, self.len(), "a")?;
        self.a = Some(a);
        Ok(self)
    }

    pub fn with_distance(mut self, s: Vec<f64>) -> Result<Self, TrajectoryError> {
        Self::check_channel(&s, self.len(), "s")?;
        for i in 1..s.len() {
            if s[i] < s[i - 1] {
                return Err(TrajectoryError::DecreasingDistance { index: i });
            }
        }
        self.s = Some(s);
        self.s_from_speed = false;
        Ok(self)
    }

    /// Attach a distance channel that was integrated from speed elsewhere,
    /// keeping the derived-origin flag so it is never used for
    /// position-based spacing.
    pub fn with_derived_distance(self, s: Vec<f64>) -> Result<Self, TrajectoryError> {
        let mut out = self.with_distance(s)?;
        out.s_from_speed = true;
        Ok(out)
    }

    pub fn with_altitude(mut self, h: Vec<f64>) -> Result<Self, TrajectoryError> {
        Self::check_channel(&h, self.len(), "h")?;
        self.h = Some(h);
        Ok(self)
    }

    pub fn with_grade(mut self, theta: Vec<f64>) -> Result<Self, TrajectoryError> {
        Self::check_channel(&theta, self.len(), "theta")?;
        let limit = core::f64::consts::FRAC_PI_2;
        for (i, &th) in theta.iter().enumerate() {
            if th <= -limit || th >= limit {
                return Err(TrajectoryError::GradeOutOfRange { index: i });
            }
        }
        self.theta = Some(theta);
        self.theta_assumed_zero = false;
        Ok(self)
    }

    fn check_channel(
        ch: &[f64],
        expected: usize,
        name: &'static str,
    ) -> Result<(), TrajectoryError> {
        if ch.len() != expected {
            return Err(TrajectoryError::LengthMismatch {
                channel: name,
                expected,
                got: ch.len(),
            });
        }
        for (i, &x) in ch.iter().enumerate() {
            if !x.is_finite() {
                return Err(TrajectoryError::NonFinite {
                    channel: name,
                    index: i,
                });
            }
        }
        Ok(())
    }

    pub fn vehicle_id(&self) -> &str {
        &self.vehicle_id
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn a(&self) -> Option<&[f64]> {
        self.a.as_deref()
    }

    pub fn s(&self) -> Option<&[f64]> {
        self.s.as_deref()
    }

    pub fn h(&self) -> Option<&[f64]> {
        self.h.as_deref()
    }

    pub fn theta(&self) -> Option<&[f64]> {
        self.theta.as_deref()
    }

    /// Distance channel was integrated from speed rather than recorded.
    pub fn distance_is_derived(&self) -> bool {
        self.s_from_speed
    }

    /// Grade defaulted to zero because no altitude was available.
    pub fn grade_assumed_zero(&self) -> bool {
        self.theta_assumed_zero
    }

    pub fn sample(&self, i: usize) -> TrajectorySample {
        TrajectorySample {
            t: self.t[i],
            v: self.v[i],
            a: self.a.as_ref().map(|c| c[i]),
            s: self.s.as_ref().map(|c| c[i]),
            h: self.h.as_ref().map(|c| c[i]),
            theta: self.theta.as_ref().map(|c| c[i]),
        }
    }

    pub fn duration(&self) -> f64 {
        if self.t.len() < 2 {
            0.0
        } else {
            self.t[self.t.len() - 1] - self.t[0]
        }
    }

    /// Step of the uniform time grid, or `None` if the grid is irregular.
    pub fn uniform_dt(&self) -> Option<f64> {
        if self.t.len() < 2 {
            return None;
        }
        let n = self.t.len();
        let dt = (self.t[n - 1] - self.t[0]) / (n - 1) as f64;
        if dt <= 0.0 {
            return None;
        }
        let tol = GRID_TOL * dt.max(1.0);
        for (i, &ti) in self.t.iter().enumerate() {
            if (ti - (self.t[0] + i as f64 * dt)).abs() > tol {
                return None;
            }
        }
        Some(dt)
    }

    fn require_uniform(&self) -> Result<f64, TrajectoryError> {
        self.uniform_dt().ok_or(TrajectoryError::NonUniformGrid)
    }

    /// Linearly interpolate every present channel onto the uniform grid of
    /// step `dt` starting at `t_first`; the grid ends at the last multiple
    /// of `dt` within the recorded duration.
    pub fn resample(&self, dt: f64) -> Result<Self, TrajectoryError> {
        if dt <= 0.0 || !dt.is_finite() {
            return Err(TrajectoryError::NonPositiveStep { dt });
        }
        if self.len() < 2 {
            return Err(TrajectoryError::TooFewSamples {
                needed: 2,
                got: self.len(),
            });
        }
        let duration = self.duration();
        if dt > duration {
            return Err(TrajectoryError::StepExceedsDuration { dt, duration });
        }
        let steps = float::floor(duration / dt + GRID_TOL) as usize;
        let grid: Vec<f64> = (0..=steps).map(|k| self.t[0] + k as f64 * dt).collect();
        let interp = |ys: &[f64]| -> Vec<f64> {
            grid.iter()
                .map(|&tq| numeric::interp_linear(&self.t, ys, tq))
                .collect()
        };
        Ok(Self {
            vehicle_id: self.vehicle_id.clone(),
            v: interp(&self.v),
            a: self.a.as_ref().map(|c| interp(c)),
            s: self.s.as_ref().map(|c| interp(c)),
            h: self.h.as_ref().map(|c| interp(c)),
            theta: self.theta.as_ref().map(|c| interp(c)),
            t: grid,
            s_from_speed: self.s_from_speed,
            theta_assumed_zero: self.theta_assumed_zero,
        })
    }

    /// Derive the acceleration channel by centered finite differences of
    /// speed followed by a centered moving average of length `window`
    /// (odd, in samples). Endpoints use one-sided differences.
    ///
    /// A recorded acceleration channel is left untouched unless `force` is
    /// set.
    pub fn derive_acceleration(&self, window: usize, force: bool) -> Result<Self, TrajectoryError> {
        if self.a.is_some() && !force {
            return Ok(self.clone());
        }
        if window.is_multiple_of(2) {
            return Err(TrajectoryError::EvenWindow { window });
        }
        let n = self.len();
        if n < 2 || n < window {
            return Err(TrajectoryError::TooFewSamples {
                needed: window.max(2),
                got: n,
            });
        }
        let dt = self.require_uniform()?;
        let mut raw = Vec::with_capacity(n);
        raw.push((self.v[1] - self.v[0]) / dt);
        for i in 1..n - 1 {
            raw.push((self.v[i + 1] - self.v[i - 1]) / (2.0 * dt));
        }
        raw.push((self.v[n - 1] - self.v[n - 2]) / dt);
        let smoothed = numeric::moving_average(&raw, window);
        let mut out = self.clone();
        out.a = Some(smoothed);
        Ok(out)
    }

    /// Integrate distance from speed (trapezoidal) if no distance channel is
    /// present. The result starts at zero and is flagged as derived.
    pub fn derive_distance(&self) -> Self {
        if self.s.is_some() {
            return self.clone();
        }
        let mut out = self.clone();
        out.s = Some(numeric::cumtrapz(&self.t, &self.v));
        out.s_from_speed = true;
        out
    }

    /// Derive the road-grade channel from altitude and travelled distance:
    /// `theta = atan(dh/ds)` over a centered window. Where the window covers
    /// less than [`MIN_GRADE_DISTANCE`] metres the previous value is carried
    /// forward. Without altitude data the grade is zero and
    /// [`Trajectory::grade_assumed_zero`] is set.
    pub fn derive_grade(&self) -> Self {
        let n = self.len();
        let Some(h) = self.h.as_ref() else {
            let mut out = self.clone();
            out.theta = Some(vec![0.0; n]);
            out.theta_assumed_zero = true;
            return out;
        };
        let with_s = self.derive_distance();
        let s = with_s.s.as_ref().expect("distance was just derived");
        let mut theta = Vec::with_capacity(n);
        let mut prev = 0.0;
        for i in 0..n {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            let ds = s[hi] - s[lo];
            let value = if ds < MIN_GRADE_DISTANCE {
                prev
            } else {
                float::atan((h[hi] - h[lo]) / ds)
            };
            theta.push(value);
            prev = value;
        }
        let mut out = with_s;
        out.theta = Some(theta);
        out.theta_assumed_zero = false;
        out
    }

    /// Samples with `t` in `[t_from, t_to]`, all channels included.
    pub fn window(&self, t_from: f64, t_to: f64) -> Result<Self, TrajectoryError> {
        let lo = self.t.partition_point(|&ti| ti < t_from);
        let hi = self.t.partition_point(|&ti| ti <= t_to);
        if lo >= hi {
            return Err(TrajectoryError::Empty);
        }
        let slice = |c: &Vec<f64>| c[lo..hi].to_vec();
        Ok(Self {
            vehicle_id: self.vehicle_id.clone(),
            t: slice(&self.t),
            v: slice(&self.v),
            a: self.a.as_ref().map(slice),
            s: self.s.as_ref().map(slice),
            h: self.h.as_ref().map(slice),
            theta: self.theta.as_ref().map(slice),
            s_from_speed: self.s_from_speed,
            theta_assumed_zero: self.theta_assumed_zero,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn rejects_negative_speed() {
        let err = Trajectory::new("C1", vec![0.0, 0.1], vec![1.0, -0.5]).unwrap_err();
        assert_eq!(
            err,
            TrajectoryError::NegativeSpeed {
                index: 1,
                value: -0.5
            }
        );
    }

    #[test]
    fn rejects_non_monotone_time() {
        let err = Trajectory::new("C1", vec![0.0, 0.2, 0.2], vec![1.0; 3]).unwrap_err();
        assert_eq!(err, TrajectoryError::NonMonotoneTime { index: 2 });
    }

    #[test]
    fn rejects_decreasing_distance() {
        let traj = Trajectory::new("C1", vec![0.0, 0.1, 0.2], vec![1.0; 3]).unwrap();
        let err = traj.with_distance(vec![0.0, 1.0, 0.5]).unwrap_err();
        assert_eq!(err, TrajectoryError::DecreasingDistance { index: 2 });
    }

    #[test]
    fn resample_constant_speed_stays_constant() {
        let traj = Trajectory::new("C1", vec![0.0, 0.5, 1.3, 2.0], vec![20.0; 4]).unwrap();
        let out = traj.resample(0.25).unwrap();
        assert!(out.v().iter().all(|&v| v == 20.0));
        assert_eq!(out.len(), 9);
        assert_relative_eq!(out.uniform_dt().unwrap(), 0.25);
    }

    #[test]
    fn resample_reproduces_linear_ramp() {
        // v rises linearly 0 -> 10 over 10 s; resampled v(t) = t
        let t = grid(6, 2.0);
        let v: Vec<f64> = t.clone();
        let traj = Trajectory::new("C1", t, v).unwrap();
        let out = traj.resample(1.0).unwrap();
        for (i, &vi) in out.v().iter().enumerate() {
            assert_relative_eq!(vi, i as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn resample_irregular_against_hand_evaluation() {
        let traj =
            Trajectory::new("C1", vec![0.0, 0.09, 0.21, 0.3], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let out = traj.resample(0.1).unwrap();
        // hand-evaluated piecewise-linear values at 0.0, 0.1, 0.2, 0.3
        let expected = [0.0, 1.0 + 0.01 / 0.12, 1.0 + 0.11 / 0.12, 3.0];
        assert_eq!(out.len(), 4);
        for (got, want) in out.v().iter().zip(expected.iter()) {
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn resample_on_target_grid_is_identity() {
        let t = grid(21, 0.1);
        let v: Vec<f64> = t.iter().map(|&ti| 5.0 + (ti * 3.0) % 2.0).collect();
        let traj = Trajectory::new("C1", t, v)
            .unwrap()
            .with_acceleration(vec![0.25; 21])
            .unwrap();
        let out = traj.resample(0.1).unwrap();
        assert_eq!(out, traj);
    }

    #[test]
    fn resample_rejects_oversized_step() {
        let traj = Trajectory::new("C1", vec![0.0, 0.5, 1.0], vec![1.0; 3]).unwrap();
        assert!(matches!(
            traj.resample(2.0),
            Err(TrajectoryError::StepExceedsDuration { .. })
        ));
    }

    #[test]
    fn acceleration_of_constant_speed_is_zero() {
        let traj = Trajectory::new("C1", grid(50, 0.1), vec![5.0; 50]).unwrap();
        let out = traj.derive_acceleration(5, false).unwrap();
        assert!(out.a().unwrap().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn acceleration_of_linear_ramp_is_exact() {
        let t = grid(50, 0.1);
        let v: Vec<f64> = t.iter().map(|&ti| 2.0 * ti).collect();
        let traj = Trajectory::new("C1", t, v).unwrap();
        let out = traj.derive_acceleration(1, false).unwrap();
        for &a in out.a().unwrap() {
            assert_relative_eq!(a, 2.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn acceleration_of_sine_tracks_cosine() {
        let t = grid(200, 0.1);
        let v: Vec<f64> = t.iter().map(|&ti| 2.0 + libm::sin(ti)).collect();
        let traj = Trajectory::new("C1", t.clone(), v).unwrap();
        let out = traj.derive_acceleration(1, false).unwrap();
        let a = out.a().unwrap();
        let max_err = t[1..t.len() - 1]
            .iter()
            .zip(a[1..a.len() - 1].iter())
            .map(|(&ti, &ai)| (ai - libm::cos(ti)).abs())
            .fold(0.0_f64, f64::max);
        assert!(max_err < 0.01, "max interior error {max_err}");
    }

    #[test]
    fn recorded_acceleration_kept_unless_forced() {
        let traj = Trajectory::new("C1", grid(10, 0.1), vec![3.0; 10])
            .unwrap()
            .with_acceleration(vec![9.9; 10])
            .unwrap();
        let kept = traj.derive_acceleration(1, false).unwrap();
        assert_eq!(kept.a().unwrap(), &[9.9; 10][..]);
        let forced = traj.derive_acceleration(1, true).unwrap();
        assert!(forced.a().unwrap().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn acceleration_window_must_fit() {
        let traj = Trajectory::new("C1", grid(3, 0.1), vec![1.0; 3]).unwrap();
        assert!(matches!(
            traj.derive_acceleration(5, false),
            Err(TrajectoryError::TooFewSamples { .. })
        ));
        assert!(matches!(
            traj.derive_acceleration(2, false),
            Err(TrajectoryError::EvenWindow { window: 2 })
        ));
    }

    #[test]
    fn grade_flat_altitude_is_zero() {
        let t = grid(20, 0.1);
        let v = vec![10.0; 20];
        let traj = Trajectory::new("C1", t, v)
            .unwrap()
            .with_altitude(vec![100.0; 20])
            .unwrap();
        let out = traj.derive_grade();
        assert!(out.theta().unwrap().iter().all(|&th| th == 0.0));
        assert!(!out.grade_assumed_zero());
    }

    #[test]
    fn grade_one_percent_rise() {
        // 1 m of altitude per 100 m travelled at 10 m/s
        let t = grid(100, 0.1);
        let v = vec![10.0; 100];
        let h: Vec<f64> = t.iter().map(|&ti| 0.01 * 10.0 * ti).collect();
        let traj = Trajectory::new("C1", t, v)
            .unwrap()
            .with_altitude(h)
            .unwrap();
        let out = traj.derive_grade();
        let theta = out.theta().unwrap();
        for &th in &theta[1..theta.len() - 1] {
            assert_relative_eq!(th, libm::atan(0.01), max_relative = 1e-9);
        }
    }

    #[test]
    fn grade_held_through_standstill() {
        // drive up a 0.02 rad grade, stop for 10 s, drive on
        let dt = 0.1;
        let n = 400;
        let t = grid(n, dt);
        let v: Vec<f64> = t
            .iter()
            .map(|&ti| {
                if (10.0..20.0).contains(&ti) {
                    0.0
                } else {
                    10.0
                }
            })
            .collect();
        let s = numeric::cumtrapz(&t, &v);
        let h: Vec<f64> = s.iter().map(|&si| libm::tan(0.02) * si).collect();
        let traj = Trajectory::new("C1", t.clone(), v)
            .unwrap()
            .with_distance(s)
            .unwrap()
            .with_altitude(h)
            .unwrap();
        let out = traj.derive_grade();
        let theta = out.theta().unwrap();
        for (i, &ti) in t.iter().enumerate() {
            if (10.5..19.5).contains(&ti) {
                assert_relative_eq!(theta[i], 0.02, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn grade_without_altitude_flags_zero() {
        let traj = Trajectory::new("C1", grid(10, 0.1), vec![5.0; 10]).unwrap();
        let out = traj.derive_grade();
        assert!(out.theta().unwrap().iter().all(|&th| th == 0.0));
        assert!(out.grade_assumed_zero());
    }

    #[test]
    fn window_selects_inclusive_range() {
        let traj =
            Trajectory::new("C1", grid(11, 0.1), (0..11).map(|i| i as f64).collect()).unwrap();
        let w = traj.window(0.25, 0.65).unwrap();
        assert_eq!(w.len(), 4); // 0.3, 0.4, 0.5, 0.6
        assert_relative_eq!(w.t()[0], 0.3);
    }
}
