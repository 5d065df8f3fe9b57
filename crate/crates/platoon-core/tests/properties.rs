//! Property tests for the invariants of the trajectory, energy, and
//! analysis operations.

use proptest::prelude::*;

use platoon_core::analysis::{self, SegmentParams};
use platoon_core::energy::{
    self, ArrbParams, FuelModel, VehicleParams, VspParams, VtMicroCoefficients,
};
use platoon_core::numeric;
use platoon_core::platoon::{DrivingMode, PlatoonDataset};
use platoon_core::trajectory::Trajectory;

/// Smooth speed profile `v(t) = base + amp * sin(omega t + phase)`.
#[derive(Debug, Clone)]
struct SineProfile {
    base: f64,
    amp: f64,
    omega: f64,
    phase: f64,
    n: usize,
    dt: f64,
}

impl SineProfile {
    fn v(&self, t: f64) -> f64 {
        self.base + self.amp * (self.omega * t + self.phase).sin()
    }

    fn a(&self, t: f64) -> f64 {
        self.amp * self.omega * (self.omega * t + self.phase).cos()
    }

    /// Exact integral of `v` from 0 to `t`.
    fn s(&self, t: f64) -> f64 {
        self.base * t - self.amp / self.omega * (self.omega * t + self.phase).cos()
            + self.amp / self.omega * self.phase.cos()
    }

    fn times(&self) -> Vec<f64> {
        (0..self.n).map(|i| i as f64 * self.dt).collect()
    }

    fn trajectory(&self, id: &str) -> Trajectory {
        let t = self.times();
        let v = t.iter().map(|&ti| self.v(ti)).collect();
        Trajectory::new(id, t, v).unwrap()
    }

    fn trajectory_with_accel(&self, id: &str) -> Trajectory {
        let t = self.times();
        let a = t.iter().map(|&ti| self.a(ti)).collect();
        self.trajectory(id).with_acceleration(a).unwrap()
    }
}

fn sine_profile() -> impl Strategy<Value = SineProfile> {
    (
        10.0..25.0f64,
        1.0..4.0f64,
        0.2..1.0f64,
        0.0..core::f64::consts::TAU,
        100..400usize,
    )
        .prop_map(|(base, amp, omega, phase, n)| SineProfile {
            base,
            amp,
            omega,
            phase,
            n,
            dt: 0.1,
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn resample_on_own_grid_is_identity(profile in sine_profile()) {
        let traj = profile.trajectory_with_accel("C1");
        let out = traj.resample(profile.dt).unwrap();
        prop_assert_eq!(out, traj);
    }

    #[test]
    fn integrated_speed_matches_recorded_distance(profile in sine_profile()) {
        // distance recorded from the exact antiderivative; the trapezoidal
        // integral of v must agree within 0.1% on a 0.1 s grid
        let t = profile.times();
        let s: Vec<f64> = t.iter().map(|&ti| profile.s(ti)).collect();
        let traj = profile.trajectory("C1").with_distance(s.clone()).unwrap();
        let integrated = numeric::trapz_uniform(traj.v(), profile.dt);
        let recorded = s[s.len() - 1] - s[0];
        prop_assert!(((integrated - recorded) / recorded).abs() < 1e-3);
    }

    #[test]
    fn differentiation_commutes_with_resampling(profile in sine_profile(), window in prop::sample::select(vec![1usize, 5])) {
        // fine 0.05 s grid -> derive -> resample to 0.1 s, against
        // resample -> derive; within 2% RMS for these C2 profiles.
        // Endpoints use one-sided differences; the comparison covers the
        // centered-difference interior.
        let fine = SineProfile { dt: 0.05, n: profile.n * 2, ..profile.clone() };
        let fine_traj = fine.trajectory("C1");
        let path_a = fine_traj
            .derive_acceleration(window, false)
            .unwrap()
            .resample(0.1)
            .unwrap();
        let path_b = fine_traj
            .resample(0.1)
            .unwrap()
            .derive_acceleration(window, false)
            .unwrap();
        let a1 = path_a.a().unwrap();
        let a2 = path_b.a().unwrap();
        let n = a1.len().min(a2.len());
        let skip = 3;
        let diff: f64 = a1[skip..n - skip]
            .iter()
            .zip(&a2[skip..n - skip])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>();
        let scale: f64 = a2[skip..n - skip].iter().map(|y| y * y).sum::<f64>();
        prop_assert!((diff / scale).sqrt() < 0.02, "rms ratio {}", (diff / scale).sqrt());
    }

    #[test]
    fn tractive_power_is_never_negative(
        v in 0.0..60.0f64,
        a in -8.0..8.0f64,
        theta in -0.3..0.3f64,
        mass in 800.0..3000.0f64,
    ) {
        let p = VehicleParams { mass, ..VehicleParams::default() };
        prop_assert!(energy::tractive_power(v, a, theta, &p) >= 0.0);
    }

    #[test]
    fn power_models_monotone_in_acceleration(
        v in 0.1..50.0f64,
        theta in -0.2..0.2f64,
        a1 in -5.0..5.0f64,
        da in 0.0..5.0f64,
    ) {
        let p = VehicleParams::default();
        let a2 = a1 + da;
        prop_assert!(
            energy::tractive_power(v, a1, theta, &p) <= energy::tractive_power(v, a2, theta, &p)
        );
        prop_assert!(energy::vsp_power(v, a1, theta) <= energy::vsp_power(v, a2, theta));
    }

    #[test]
    fn fuel_rates_have_their_floors(v in 0.0..60.0f64, a in -8.0..8.0f64) {
        prop_assert!(energy::vt_micro_rate(v, a, &VtMicroCoefficients::default()) > 0.0);
        if a >= 0.0 {
            let arrb = energy::arrb_rate(v, a, &ArrbParams::default());
            prop_assert!(arrb >= 0.666e-3);
        }
        prop_assert!(energy::vsp_rate(energy::vsp_power(v, a, 0.0), &VspParams::default()) > 0.0);
    }

    #[test]
    fn constant_cruise_matches_closed_forms(v in 1.0..40.0f64, n in 50..400usize) {
        // trapezoid integrates a constant exactly, so the per-distance
        // figures collapse to the closed forms
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        let traj = Trajectory::new("C1", t, vec![v; n])
            .unwrap()
            .with_acceleration(vec![0.0; n])
            .unwrap();
        let p = VehicleParams::default();
        let e = energy::tractive_energy(&traj, &p).unwrap();
        let e_expect = energy::tractive_power(v, 0.0, 0.0, &p) / (0.036 * v);
        prop_assert!(((e - e_expect) / e_expect).abs() < 1e-9);
        for model in FuelModel::defaults() {
            let f = energy::fuel_consumption(&traj, &model).unwrap();
            let f_expect = model.rate(v, 0.0, 0.0) / (1e-5 * v);
            prop_assert!(((f - f_expect) / f_expect).abs() < 1e-9);
        }
    }

    #[test]
    fn consumption_is_translation_invariant(profile in sine_profile(), shift in 0.0..5000.0f64) {
        let base = profile.trajectory_with_accel("C1");
        let t_shifted: Vec<f64> = base.t().iter().map(|&ti| ti + shift).collect();
        let shifted = Trajectory::new("C1", t_shifted, base.v().to_vec())
            .unwrap()
            .with_acceleration(base.a().unwrap().to_vec())
            .unwrap();
        let p = VehicleParams::default();
        let e1 = energy::tractive_energy(&base, &p).unwrap();
        let e2 = energy::tractive_energy(&shifted, &p).unwrap();
        prop_assert!(((e1 - e2) / e1).abs() < 1e-9);
        let model = FuelModel::Arrb(ArrbParams::default());
        let f1 = energy::fuel_consumption(&base, &model).unwrap();
        let f2 = energy::fuel_consumption(&shifted, &model).unwrap();
        prop_assert!(((f1 - f2) / f1).abs() < 1e-9);
    }

    #[test]
    fn standstill_padding_leaves_tractive_energy_unchanged(pad in 1..50usize) {
        // a profile that starts and ends at rest can be padded with more
        // standstill without changing the energy figure
        let n = 200;
        let dt = 0.1;
        let ramp = |i: usize| {
            // smooth 0 -> 20 -> 0 bump
            let x = i as f64 / (n - 1) as f64;
            20.0 * (core::f64::consts::PI * x).sin().powi(2)
        };
        let build = |lead: usize, trail: usize| {
            let total = lead + n + trail;
            let t: Vec<f64> = (0..total).map(|i| i as f64 * dt).collect();
            let v: Vec<f64> = (0..total)
                .map(|i| {
                    if i < lead || i >= lead + n {
                        0.0
                    } else {
                        ramp(i - lead)
                    }
                })
                .collect();
            let a: Vec<f64> = (0..total)
                .map(|i| {
                    if i < lead || i >= lead + n {
                        0.0
                    } else {
                        let x = (i - lead) as f64 / (n - 1) as f64;
                        let pi = core::f64::consts::PI;
                        20.0 * pi / ((n - 1) as f64 * dt) * (2.0 * pi * x).sin()
                    }
                })
                .collect();
            Trajectory::new("C1", t, v).unwrap().with_acceleration(a).unwrap()
        };
        let p = VehicleParams::default();
        let plain = energy::tractive_energy(&build(0, 0), &p).unwrap();
        let padded = energy::tractive_energy(&build(pad, pad), &p).unwrap();
        prop_assert!(((plain - padded) / plain).abs() < 1e-9);
    }

    #[test]
    fn heavier_vehicle_never_spends_less_on_closed_cycles(
        base in 10.0..25.0f64,
        amp in 1.0..4.0f64,
        periods in 1..6usize,
        n in 200..600usize,
    ) {
        // holds for cycles that end at their starting speed: the mass
        // derivative of the clamped power integral is then
        // 1.03 * integral of a*v over the positive-power region, which the
        // clamp keeps non-negative. A trajectory with net deceleration can
        // genuinely spend less when heavier.
        let dt = 0.1;
        let omega = 2.0 * core::f64::consts::PI * periods as f64 / ((n - 1) as f64 * dt);
        let t: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let v: Vec<f64> = t.iter().map(|&ti| base + amp * (omega * ti).sin()).collect();
        let a: Vec<f64> = t.iter().map(|&ti| amp * omega * (omega * ti).cos()).collect();
        let traj = Trajectory::new("C1", t, v)
            .unwrap()
            .with_acceleration(a)
            .unwrap();
        let p1 = VehicleParams::default();
        let p2 = VehicleParams { mass: 2.0 * p1.mass, ..p1 };
        let e1 = energy::tractive_energy(&traj, &p1).unwrap();
        let e2 = energy::tractive_energy(&traj, &p2).unwrap();
        prop_assert!(e2 >= e1 - 1e-9 * e1, "m: {} -> {}", e1, e2);
    }

    #[test]
    fn ivs_invariant_under_common_shift(profile in sine_profile(), shift in -1000.0..1000.0f64) {
        let t = profile.times();
        let s: Vec<f64> = t.iter().map(|&ti| profile.s(ti)).collect();
        let build = |offset: f64| {
            let front = Trajectory::new("C1", t.clone(), profile.times().iter().map(|&ti| profile.v(ti)).collect())
                .unwrap()
                .with_distance(s.iter().map(|&x| x + 60.0 + offset).collect())
                .unwrap();
            let rear = Trajectory::new("C2", t.clone(), t.iter().map(|&ti| profile.v(ti)).collect())
                .unwrap()
                .with_distance(s.iter().map(|&x| x + offset).collect())
                .unwrap();
            PlatoonDataset::new(vec![front, rear], DrivingMode::Human)
                .unwrap()
                .compute_ivs(5.0)
                .unwrap()
        };
        let a = build(0.0);
        let b = build(shift);
        for (x, y) in a.ivs(0).unwrap().iter().zip(b.ivs(0).unwrap()) {
            prop_assert!((x - y).abs() < 1e-7);
        }
    }

    #[test]
    fn joint_distribution_mass_sums_to_one(profile in sine_profile()) {
        let traj = profile.trajectory_with_accel("C1");
        let ds = PlatoonDataset::new(vec![traj], DrivingMode::Human).unwrap();
        let (ve, ae) = analysis::auto_edges(&ds, 1.0, 0.1).unwrap();
        let jd = analysis::joint_distribution(ds.vehicle(0), &ve, &ae).unwrap();
        let total: f64 = jd.mass.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert_eq!(jd.clipped, 0);
    }

    #[test]
    fn map_correlation_affine_invariance(profile in sine_profile(), scale in 0.1..5.0f64, offset in 0.0..0.5f64) {
        let traj = profile.trajectory_with_accel("C1");
        let ds = PlatoonDataset::new(vec![traj], DrivingMode::Human).unwrap();
        let (ve, ae) = analysis::auto_edges(&ds, 1.0, 0.1).unwrap();
        let jd = analysis::joint_distribution(ds.vehicle(0), &ve, &ae).unwrap();
        let mut affine = jd.clone();
        affine.mass = jd.mass.iter().map(|&m| scale * m + offset).collect();
        let r = analysis::map_correlation(&jd, &affine).unwrap();
        prop_assert!((r - 1.0).abs() < 1e-9, "r = {}", r);
    }

    #[test]
    fn l2_ratio_scales_with_deviation(scale in 0.1..3.0f64, offset in -3.0..3.0f64) {
        let n = 800;
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        let dev: Vec<f64> = t.iter().map(|&ti| (0.5 * ti).sin()).collect();
        let v1: Vec<f64> = dev.iter().map(|&d| 20.0 + d).collect();
        let v2: Vec<f64> = dev.iter().map(|&d| 20.0 + offset + scale * d).collect();
        let a1: Vec<f64> = t.iter().map(|&ti| 0.5 * (0.5 * ti).cos()).collect();
        let leader = Trajectory::new("C1", t.clone(), v1)
            .unwrap()
            .with_acceleration(a1)
            .unwrap();
        let follower = Trajectory::new("C2", t, v2).unwrap();
        let ds = PlatoonDataset::new(vec![leader, follower], DrivingMode::Acc).unwrap();
        let labels = analysis::segment_steady_perturbation(ds.leader(), &SegmentParams::default()).unwrap();
        let metrics = analysis::l2_amplification(&ds, &labels).unwrap();
        for interval in &metrics.intervals {
            let r = interval.l2_ratios[0].unwrap();
            prop_assert!((r - scale).abs() < 1e-9 * scale.max(1.0), "r = {}, scale = {}", r, scale);
        }
    }

    #[test]
    fn segmentation_partitions_any_profile(
        pulses in prop::collection::vec((0.05..0.95f64, 1..80usize, 0.4..2.5f64), 0..6),
        n in 600..2000usize,
    ) {
        let mut a = vec![0.0; n];
        for &(at, len, mag) in &pulses {
            let start = (at * n as f64) as usize;
            a[start..(start + len).min(n)].fill(mag);
        }
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        let leader = Trajectory::new("C1", t, vec![20.0; n])
            .unwrap()
            .with_acceleration(a)
            .unwrap();
        let labels = analysis::segment_steady_perturbation(&leader, &SegmentParams::default()).unwrap();
        // contiguous, non-overlapping, covering every sample
        let mut cursor = 0;
        for seg in &labels.segments {
            prop_assert_eq!(seg.start, cursor);
            prop_assert!(seg.end > seg.start);
            cursor = seg.end;
        }
        prop_assert_eq!(cursor, n);
        let total: f64 = labels.segments.iter().map(|s| s.duration_s).sum();
        prop_assert!((total - labels.window_duration()).abs() < 1e-9);
        // every interval respects the minimum duration unless it is alone
        if labels.segments.len() > 1 {
            for seg in &labels.segments {
                prop_assert!(seg.duration_s >= 5.0 - 1e-9, "{:?}", seg);
            }
        }
    }
}
