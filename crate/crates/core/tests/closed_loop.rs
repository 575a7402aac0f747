use aiden_core::sim::{initial_pose_in_view, run_scenario, Scenario};
use aiden_core::{
    detect, directional_command, normalized_center_distance, project, step_camera, CameraPose,
    DetectorNoise, Direction, FrameGeometry, GuidanceConfig, SceneObject,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CUP: u8 = 41;

fn frame() -> FrameGeometry {
    FrameGeometry::new(640, 480).unwrap()
}

fn scenario(seed: u64, noise: DetectorNoise, gain: f64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
    let target = SceneObject::new(
        CUP,
        rng.random_range(-170.0..170.0),
        rng.random_range(-40.0..40.0),
        rng.random_range(2.0..12.0),
    )
    .unwrap();
    let distractor = SceneObject::new(56, target.pan_deg + 15.0, target.tilt_deg - 8.0, 10.0).unwrap();
    let camera = initial_pose_in_view(&target, &CameraPose::default(), seed);
    Scenario {
        scene: vec![target, distractor],
        target_class: CUP,
        camera,
        frame: frame(),
        noise: DetectorNoise { seed, ..noise },
        guidance: GuidanceConfig::default(),
        gain_deg: gain,
        tick_budget: 200,
        tick_ms: 500,
    }
}

#[test]
fn noise_free_placements_all_lock() {
    // gain bound t_inner * hfov / 2 = 3 degrees
    for gain in [0.5, 1.0, 2.0, 3.0] {
        for seed in 0..100 {
            let sc = scenario(seed, DetectorNoise::noiseless(0), gain);
            let out = run_scenario(&sc, false).unwrap();
            assert!(out.locked, "seed {seed} gain {gain}: {:?}", out.final_pose);
            assert!(out.ticks >= sc.guidance.lock_ticks);
        }
    }
}

#[test]
fn total_ticks_do_not_grow_with_gain() {
    let total = |gain| -> u32 {
        (0..100)
            .map(|seed| run_scenario(&scenario(seed, DetectorNoise::noiseless(0), gain), false).unwrap().ticks)
            .sum()
    };
    let ticks: Vec<u32> = [0.5, 1.0, 2.0, 3.0].into_iter().map(total).collect();
    assert!(ticks.windows(2).all(|w| w[1] <= w[0]), "{ticks:?}");
}

#[test]
fn dropout_one_never_locks() {
    let noise = DetectorNoise {
        dropout_prob: 1.0,
        ..DetectorNoise::noiseless(0)
    };
    for seed in 0..20 {
        let out = run_scenario(&scenario(seed, noise, 2.0), true).unwrap();
        assert!(!out.locked);
        assert!(out.trace.iter().all(|r| r.phase == aiden_core::GuidancePhase::Searching));
    }
}

#[test]
fn traces_are_reproducible() {
    let noise = DetectorNoise {
        pixel_sigma: 2.0,
        dropout_prob: 0.1,
        confidence_sigma: 0.05,
        ..DetectorNoise::noiseless(0)
    };
    for seed in 0..10 {
        let sc = scenario(seed, noise, 2.0);
        assert_eq!(run_scenario(&sc, true).unwrap(), run_scenario(&sc, true).unwrap());
    }
}

#[test]
fn on_axis_projection_is_centered_only_on_axis() {
    let pose = CameraPose::default().looking_at(40.0, 10.0);
    let on = SceneObject::new(CUP, 40.0, 10.0, 4.0).unwrap();
    assert_eq!(normalized_center_distance(&project(&on, &pose, &frame(), 0.9).unwrap(), &frame()), 0.0);
    for (dp, dt) in [(0.5, 0.0), (0.0, -0.5), (3.0, 2.0)] {
        let off = SceneObject::new(CUP, 40.0 + dp, 10.0 + dt, 4.0).unwrap();
        assert!(normalized_center_distance(&project(&off, &pose, &frame(), 0.9).unwrap(), &frame()) > 0.0);
    }
}

#[test]
fn noisy_detect_is_reproducible_per_tick() {
    let scene = [SceneObject::new(CUP, 3.0, 2.0, 5.0).unwrap()];
    let noise = DetectorNoise {
        seed: 42,
        pixel_sigma: 4.0,
        dropout_prob: 0.3,
        confidence_base: 0.8,
        confidence_sigma: 0.1,
    };
    let a = detect(&scene, &CameraPose::default(), &frame(), &noise, 7);
    let b = detect(&scene, &CameraPose::default(), &frame(), &noise, 7);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

proptest! {
    /// One commanded step of 1 degree reduces the offset on the commanded axis.
    #[test]
    fn commanded_step_reduces_dominant_offset(d_pan in -33.0f64..33.0, d_tilt in -25.0f64..25.0) {
        let pose = CameraPose::default();
        let obj = SceneObject::new(CUP, d_pan, d_tilt, 2.0).unwrap();
        let Some(det) = project(&obj, &pose, &frame(), 0.9) else { return Ok(()); };
        let Some(dir) = directional_command(&det, &frame(), &GuidanceConfig::default()) else { return Ok(()); };
        let next = step_camera(&pose, dir, 1.0).unwrap();
        let (bp, bt) = pose.offset_to(&obj);
        let (ap, at) = next.offset_to(&obj);
        match dir {
            Direction::Left | Direction::Right => prop_assert!(ap.abs() < bp.abs()),
            Direction::Up | Direction::Down => prop_assert!(at.abs() < bt.abs()),
        }
    }
}
