//! Property checks over randomly drawn instances, run by `sixdma selftest`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sixdma_core::channel::{rotation_matrix, sinr, steering_vector, wave_vector};
use sixdma_core::optimizer::pgd_apv;
use sixdma_core::{mmse_weights, Apv, AuxiliaryVector, Complex64, Rotation, SolverConfig};

use crate::config::{PhysicalConfig, SweepPoint};
use crate::scheme::{SchemeId, SchemeKind};
use crate::trial::{draw_scenario, solve_schemes};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} {} ({}; {:.2?})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed
        )
    }
}

fn angle(rng: &mut ChaCha8Rng) -> Rotation {
    Rotation::new(
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
    )
}

fn complex_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn random_apv(rng: &mut ChaCha8Rng, n: usize, l: f64) -> Apv {
    Apv::new(
        (0..n)
            .map(|_| [rng.random_range(-l..l), rng.random_range(-l..l)])
            .collect(),
    )
    .expect("n >= 1")
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn rotation_check(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst_orth = 0.0f64;
    let mut worst_det = 0.0f64;
    for _ in 0..1000 {
        let u = rotation_matrix(angle(rng));
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| u[k][i] * u[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst_orth = worst_orth.max((dot - target).abs());
            }
        }
        worst_det = worst_det.max((det3(&u) - 1.0).abs());
    }
    (
        worst_orth <= 1e-12 && worst_det <= 1e-12,
        format!("1000 rotations, max |U^T U - I| = {worst_orth:.1e}, max |det - 1| = {worst_det:.1e}"),
    )
}

fn wave_and_steering_checks(rng: &mut ChaCha8Rng) -> [(bool, String); 2] {
    let layout = PhysicalConfig::default().layout().expect("default layout");
    let mut worst_norm = 0.0f64;
    let mut worst_mod = 0.0f64;
    for _ in 0..1000 {
        let bs = layout.positions()[rng.random_range(0..layout.len())];
        let uav = [rng.random_range(-90.0..90.0), rng.random_range(-90.0..90.0), 100.0];
        let v = wave_vector(angle(rng), bs, uav).expect("distinct points");
        worst_norm = worst_norm.max((v.norm() - 1.0).abs());
        let apv = random_apv(rng, 8, 0.09);
        for g in steering_vector(&apv, v, 0.03) {
            worst_mod = worst_mod.max((g.norm() - 1.0).abs());
        }
    }
    [
        (
            worst_norm <= 1e-12,
            format!("1000 links, max | ||v|| - 1 | = {worst_norm:.1e}"),
        ),
        (
            worst_mod <= 1e-12,
            format!("8000 entries, max | |g| - 1 | = {worst_mod:.1e}"),
        ),
    ]
}

fn scaling_check(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = [2, 4, 8][rng.random_range(0..3)];
        let j = rng.random_range(0..=12);
        let h = complex_vec(rng, n);
        let hs: Vec<Vec<Complex64>> = (0..j).map(|_| complex_vec(rng, n)).collect();
        let w = complex_vec(rng, n);
        let c = Complex64::from_polar(10f64.powf(rng.random_range(-3.0..3.0)), rng.random_range(-PI..PI));
        let cw: Vec<Complex64> = w.iter().map(|x| c * x).collect();
        let a = sinr(&w, &h, &hs, 1.0, 0.1).expect("valid");
        let b = sinr(&cw, &h, &hs, 1.0, 0.1).expect("valid");
        worst = worst.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
    }
    (
        worst <= 1e-12,
        format!("1000 instances, max relative change under w -> c w = {worst:.1e}"),
    )
}

fn common_phase_check(rng: &mut ChaCha8Rng) -> (bool, String) {
    let physical = PhysicalConfig::default();
    let layout = physical.layout().expect("default layout");
    let mut worst = 0.0f64;
    for t in 0..100 {
        // a common phase on every channel
        let n = 4;
        let h = complex_vec(rng, n);
        let hs: Vec<Vec<Complex64>> = (0..6).map(|_| complex_vec(rng, n)).collect();
        let c = Complex64::cis(rng.random_range(-PI..PI));
        let rot = |v: &[Complex64]| v.iter().map(|x| c * x).collect::<Vec<_>>();
        let a = mmse_weights(&h, &hs, 1.0, 0.1).expect("valid").sinr_linear;
        let hs2: Vec<Vec<Complex64>> = hs.iter().map(|v| rot(v)).collect();
        let b = mmse_weights(&rot(&h), &hs2, 1.0, 0.1).expect("valid").sinr_linear;
        worst = worst.max((a - b).abs() / a);

        // a common translation of the array gives each link its own phase
        let point = SweepPoint {
            j: 8,
            n: 4,
            region: 4.0,
        };
        let sc = draw_scenario(&physical, &layout, point, t).expect("scenario");
        let links = sc.links(sc.available[0]).expect("links");
        let apv = random_apv(rng, 4, 0.05);
        let shift = [rng.random_range(-0.01..0.01), rng.random_range(-0.01..0.01)];
        let r = angle(rng);
        let a = links.sinr(&apv, r).expect("sinr");
        let b = links.sinr(&apv.translated(shift), r).expect("sinr");
        worst = worst.max((a - b).abs() / a);
    }
    (
        worst <= 1e-9,
        format!("200 instances, max relative change of gamma = {worst:.1e}"),
    )
}

fn pgd_box_check(rng: &mut ChaCha8Rng) -> (bool, String) {
    let physical = PhysicalConfig::default();
    let layout = physical.layout().expect("default layout");
    let config = SolverConfig::default();
    let mut ok = true;
    for t in 0..50 {
        let region = rng.random_range(1.0..6.0);
        let point = SweepPoint { j: 6, n: 4, region };
        let sc = draw_scenario(&physical, &layout, point, 1000 + t).expect("scenario");
        let l = sc.phys.panel_half_side;
        let links = sc.links(sc.available[0]).expect("links");
        // start and anchor partly outside the panel
        let start = random_apv(rng, 4, 1.5 * l);
        let aux = AuxiliaryVector::new(random_apv(rng, 4, 1.5 * l).points().to_vec());
        let mu = 10f64.powf(rng.random_range(-2.0..6.0));
        let out = pgd_apv(&links, &start, &aux, angle(rng), mu, &config).expect("pgd");
        ok &= out.in_box(l);
    }
    (ok, "50 instances, every output inside [-L, L]^2N".to_owned())
}

fn dominance_check(seed: u64) -> (bool, String) {
    let physical = PhysicalConfig::default();
    let layout = physical.layout().expect("default layout");
    let config = SolverConfig {
        top_c_candidates: Some(4),
        ..SolverConfig::default()
    };
    let schemes = SchemeId::all();
    let tol = 1e-6;
    let mut worst = f64::INFINITY;
    for t in 0..4 {
        let point = SweepPoint {
            j: 6,
            n: 4,
            region: 4.0,
        };
        let sc = draw_scenario(&physical, &layout, point, seed + t).expect("scenario");
        let out = solve_schemes(&sc, &config, true, &schemes).expect("solve");
        let get = |kind, fpa| {
            out.iter()
                .find(|o| o.scheme == SchemeId::new(kind, fpa))
                .expect("solved")
                .sinr_linear
        };
        for fpa in [false, true] {
            let p = get(SchemeKind::Proposed, fpa);
            let s3 = get(SchemeKind::NearestAndFixedArv, fpa);
            for (hi, lo) in [
                (p, get(SchemeKind::NearestBs, fpa)),
                (p, get(SchemeKind::FixedArv, fpa)),
                (p, s3),
                (get(SchemeKind::NearestBs, fpa), s3),
                (get(SchemeKind::FixedArv, fpa), s3),
            ] {
                worst = worst.min((hi - lo) / lo);
            }
        }
    }
    (
        worst >= -tol,
        format!("4 seeds x MA/FPA, min relative margin of the dominating scheme = {worst:.1e}"),
    )
}

/// Runs every check. Instances are drawn from `seed`.
pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut timed = |name, f: &mut dyn FnMut() -> (bool, String)| {
        let start = Instant::now();
        let (passed, detail) = f();
        checks.push(Check {
            name,
            passed,
            detail,
            elapsed: start.elapsed(),
        });
    };
    timed("rotation orthogonality and determinant", &mut || {
        rotation_check(&mut rng)
    });
    let mut ws = None;
    timed("wave-vector normalization", &mut || {
        let [a, b] = wave_and_steering_checks(&mut rng);
        ws = Some(b);
        a
    });
    timed("steering unit modulus", &mut || {
        ws.take().expect("computed with the wave vectors")
    });
    timed("SINR scaling invariance", &mut || scaling_check(&mut rng));
    timed("common-phase invariance of gamma", &mut || common_phase_check(&mut rng));
    timed("PGD box feasibility", &mut || pgd_box_check(&mut rng));
    timed("per-seed scheme dominance", &mut || dominance_check(seed));
    checks
}
