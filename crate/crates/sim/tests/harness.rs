use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sixdma::config::{Axis, ExperimentConfig, PhysicalConfig, Preset, SweepPoint};
use sixdma::sweep::{execute, read_csv, CSV_NAME, SUMMARY_NAME};
use sixdma::trial::{draw_scenario, run_schemes, sample_uav_position, TrialContext};
use sixdma::{run_sweep, run_trial, HarnessError, SchemeId, SchemeKind};
use sixdma_core::grid::nearest_bs;
use sixdma_core::SolverConfig;

fn small(axis_values: Vec<f64>, schemes: Vec<SchemeId>, trials: usize) -> ExperimentConfig {
    let mut cfg = Preset::Fig2.config();
    cfg.sweep.values = axis_values;
    cfg.sweep.schemes = schemes;
    cfg.sweep.trials = trials;
    cfg.solver = SolverConfig {
        top_c_candidates: Some(3),
        max_outer: 6,
        max_pgd: 30,
        ..SolverConfig::default()
    };
    cfg
}

#[test]
fn pinned_uav_is_returned_verbatim() {
    let layout = PhysicalConfig::default().layout().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(
        sample_uav_position(&layout, 100.0, Some([0.0, 0.0]), &mut rng),
        [0.0, 0.0, 100.0]
    );
}

#[test]
fn sampled_uavs_stay_in_the_central_cell() {
    let layout = PhysicalConfig::default().layout().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let r = layout.cell_radius();
    for _ in 0..10_000 {
        let p = sample_uav_position(&layout, 100.0, None, &mut rng);
        // independent membership test: inside the hexagon with vertices at
        // r (cos(90 + 60 i), sin(90 + 60 i))
        let inside = (0..6).all(|i| {
            let a = (90.0 + 60.0 * i as f64) * PI / 180.0;
            let b = (90.0 + 60.0 * (i + 1) as f64) * PI / 180.0;
            let (x0, y0, x1, y1) = (r * a.cos(), r * a.sin(), r * b.cos(), r * b.sin());
            (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) >= -1e-9
        });
        assert!(inside, "{p:?}");
        assert_eq!(p[2], 100.0);
        assert_eq!(nearest_bs(&layout, p).unwrap(), 0);
    }
}

#[test]
fn fixed_array_without_interference_gets_pure_array_gain() {
    let physical = PhysicalConfig::default();
    let layout = physical.layout().unwrap();
    let solver = SolverConfig::default();
    let ctx = TrialContext {
        physical: &physical,
        layout: &layout,
        solver: &solver,
        axis: Axis::Interferers,
        fpa_rotation: true,
        timing: false,
    };
    let point = SweepPoint {
        j: 0,
        n: 4,
        region: 4.0,
    };
    for seed in 0..10 {
        let rec = run_trial(
            &ctx,
            point,
            0.0,
            SchemeId::new(SchemeKind::NearestAndFixedArv, true),
            seed,
        )
        .unwrap();
        let sc = draw_scenario(&physical, &layout, point, seed).unwrap();
        let d = sc.distance_to(rec.k_star).unwrap();
        assert_eq!(rec.k_star, sc.nearest_available().unwrap());
        let p = sc.phys;
        let expected = p.tx_power * 4.0 * (0.03 / (4.0 * PI * d)).powi(2) / p.noise_power;
        let got = 10f64.powf(rec.sinr_db / 10.0);
        assert!((got / expected - 1.0).abs() < 1e-9, "{got} vs {expected}");
    }
}

#[test]
fn shared_solves_match_single_scheme_trials() {
    let physical = PhysicalConfig::default();
    let layout = physical.layout().unwrap();
    let solver = SolverConfig {
        top_c_candidates: Some(3),
        max_outer: 6,
        ..SolverConfig::default()
    };
    for fpa_rotation in [true, false] {
        let ctx = TrialContext {
            physical: &physical,
            layout: &layout,
            solver: &solver,
            axis: Axis::Interferers,
            fpa_rotation,
            timing: false,
        };
        let point = SweepPoint {
            j: 8,
            n: 4,
            region: 4.0,
        };
        for seed in 0..2 {
            let all = run_schemes(&ctx, point, 8.0, &SchemeId::all(), seed).unwrap();
            for rec in &all {
                let id = rec.scheme_id().unwrap();
                let single = run_trial(&ctx, point, 8.0, id, seed).unwrap();
                assert_eq!(&single, rec, "{id}");
            }
            let get = |id: SchemeId| all.iter().find(|r| r.scheme_id().unwrap() == id).unwrap().sinr_db;
            for fpa in [false, true] {
                let p = get(SchemeId::new(SchemeKind::Proposed, fpa));
                for kind in [
                    SchemeKind::NearestBs,
                    SchemeKind::FixedArv,
                    SchemeKind::NearestAndFixedArv,
                ] {
                    assert!(p >= get(SchemeId::new(kind, fpa)) - 1e-9);
                }
            }
        }
    }
}

#[test]
fn one_trial_one_scheme_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(vec![4.0], vec![SchemeId::PROPOSED_FPA], 1);
    cfg.sweep.out = dir.path().join("run");
    let out = run_sweep(&cfg).unwrap();
    assert_eq!(out.records.len(), 1);
    let text = std::fs::read_to_string(cfg.sweep.out.join(CSV_NAME)).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,scheme,with_fpa,axis_name,axis_value,J,N,region_2L_over_lambda,k_star,sinr_db,wall_time_ms"
    );
    assert_eq!(lines.count(), 1);
    assert_eq!(read_csv(&cfg.sweep.out.join(CSV_NAME)).unwrap(), out.records);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cfg.sweep.out.join(SUMMARY_NAME)).unwrap()).unwrap();
    assert_eq!(summary["axis"], "J");
    assert!(summary["averaging"].as_str().unwrap().contains("linear"));
    let s = &summary["points"][0]["schemes"][0];
    assert_eq!(s["trials"], 1);
    assert_eq!(s["mean_sinr_db"], s["mean_of_db"]);
}

#[test]
fn row_count_and_reruns() {
    let schemes = vec![
        SchemeId::PROPOSED,
        SchemeId::PROPOSED_FPA,
        SchemeId::new(SchemeKind::FixedArv, false),
    ];
    let cfg = small(vec![2.0, 6.0], schemes, 2);
    let a = execute(&cfg).unwrap();
    assert_eq!(a.len(), 2 * 3 * 2);
    let mut parallel = cfg.clone();
    parallel.sweep.workers = 3;
    assert_eq!(execute(&parallel).unwrap(), a);
    let mut other = cfg.clone();
    other.sweep.base_seed = 1;
    assert_ne!(execute(&other).unwrap(), a);
}

#[test]
fn seeds_are_shared_across_points_and_schemes() {
    let cfg = small(vec![2.0, 6.0], vec![SchemeId::PROPOSED, SchemeId::PROPOSED_FPA], 3);
    let recs = execute(&cfg).unwrap();
    let seeds_at = |v: f64, fpa: bool| -> Vec<u64> {
        recs.iter()
            .filter(|r| r.axis_value == v && r.with_fpa == fpa)
            .map(|r| r.seed)
            .collect()
    };
    assert_eq!(seeds_at(2.0, false), seeds_at(6.0, true));
}

#[test]
fn fixed_arrays_ignore_the_region_size() {
    let mut cfg = Preset::Fig3.config();
    cfg.sweep.trials = 4;
    cfg.sweep.schemes = SchemeId::all().into_iter().filter(|s| s.with_fpa).collect();
    cfg.solver.top_c_candidates = Some(4);
    let recs = execute(&cfg).unwrap();
    let at = |v: f64| -> Vec<(u64, String, usize, u64)> {
        recs.iter()
            .filter(|r| r.axis_value == v)
            .map(|r| (r.seed, r.scheme.clone(), r.k_star, r.sinr_db.to_bits()))
            .collect()
    };
    for v in [2.0, 3.0, 4.0, 5.0, 6.0] {
        assert_eq!(at(v), at(1.0));
    }
}

#[test]
fn unwritable_output_fails_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let mut cfg = Preset::Fig2.config();
    cfg.sweep.trials = 10_000;
    cfg.sweep.out = blocker.join("sub");
    let start = std::time::Instant::now();
    assert!(matches!(run_sweep(&cfg), Err(HarnessError::Io { .. })));
    assert!(start.elapsed().as_secs() < 5);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut cfg = Preset::Fig2.config();
    cfg.sweep.values = vec![];
    assert!(matches!(execute(&cfg), Err(HarnessError::Config(_))));
    let mut cfg = Preset::Fig4.config();
    cfg.sweep.values = vec![0.0, 2.0];
    assert!(execute(&cfg).is_err());
    let mut cfg = Preset::Fig2.config();
    cfg.solver.armijo_c = 2.0;
    assert!(matches!(execute(&cfg), Err(HarnessError::Solver(_))));
}

#[test]
fn readme_config_example_parses() {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    let json = readme.split("```json\n").nth(1).unwrap().split("```").next().unwrap();
    let cfg = ExperimentConfig::from_json(json).unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg.sweep.axis, Axis::Interferers);
    assert_eq!(cfg.sweep.schemes.len(), 4);
    assert_eq!(cfg.solver.top_c_candidates, Some(12));
}
