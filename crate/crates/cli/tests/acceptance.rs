//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line each and exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_6, PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mzi_duality::duality::{predictability, retrodictive_probabilities, visibility_scan, DEFAULT_GRID};
use mzi_duality::interferometer::{
    build_detector, evolve, extract_kraus, kraus_closed_form, linear_polarization, optimal_pointer_basis,
    outcome_probabilities, DetectorModel,
};
use mzi_duality::protocols::{
    alternative_averaged_probabilities, efficiency_grid, run_alternative, run_retrodictive, Estimate,
};
use mzi_duality::qmath::{trace_norm, Vector, Vector2, C64};
use mzi_duality::states::{make_input_state, Bit, InputLabel, PathState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(elapsed: Duration, limit_s: f64, detail: String) -> Outcome {
    let t = elapsed.as_secs_f64();
    check(t < limit_s, format!("{detail}; {t:.2} s of {limit_s} s"))
}

fn random_unit(rng: &mut impl Rng) -> Vector2 {
    loop {
        let v = Vector([
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        ]);
        if v.norm() > 1e-3 {
            return v.normalized().unwrap();
        }
    }
}

fn random_state(rng: &mut impl Rng) -> PathState {
    let v = random_unit(rng);
    PathState::new(v[0], v[1]).unwrap()
}

fn random_detector(rng: &mut impl Rng) -> DetectorModel {
    build_detector(rng.random_range(0.0..PI), random_unit(rng))
        .unwrap()
        .with_phase_delay(rng.random_range(0.0..TAU))
}

/// `D = Tr|w₁ρᵃ − w₂ρᵇ|` straight from the pointer states.
fn trace_norm_d(s: &PathState, det: &DetectorModel) -> f64 {
    let (w1, w2) = s.weights();
    let m = det.pointer_a.projector().scale_real(w1) - det.pointer_b.projector().scale_real(w2);
    trace_norm(&m).unwrap()
}

fn family_state(b_ww: Bit, b_wp: Bit, alpha: f64, phi: f64) -> PathState {
    make_input_state(&InputLabel::new(b_ww, b_wp, alpha, phi).unwrap())
}

/// `(d_WW, d_WP)` as half trace norms of density-matrix differences.
fn oracle_distances(alpha: f64, phi: f64) -> (f64, f64) {
    let rho = |a, b| family_state(a, b, alpha, phi).density().0;
    let d_ww = 0.5 * trace_norm(&(rho(Bit::Plus, Bit::Plus) - rho(Bit::Minus, Bit::Plus))).unwrap();
    let d_wp = 0.5 * trace_norm(&(rho(Bit::Plus, Bit::Plus) - rho(Bit::Plus, Bit::Minus))).unwrap();
    (d_ww, d_wp)
}

/// Guess success for both bits from Born probabilities of the full
/// evolution, with each bit guessed by maximum likelihood per click.
fn born_guess_success(alpha: f64, phi: f64, e: f64) -> (f64, f64) {
    let det = DetectorModel::from_efficiency(e).unwrap();
    let basis = optimal_pointer_basis(&det);
    let mut joint = [[[0.0; 4]; 2]; 2];
    for b_ww in Bit::BOTH {
        for b_wp in Bit::BOTH {
            let out = evolve(&family_state(b_ww, b_wp, alpha, phi), &det, 0.0);
            joint[b_ww.index()][b_wp.index()] = outcome_probabilities(&out, &basis).map(|p| 0.25 * p);
        }
    }
    let (mut p_ww, mut p_wp) = (0.0, 0.0);
    #[allow(clippy::needless_range_loop)]
    for k in 0..4 {
        let ww = |i: usize| joint[i][0][k] + joint[i][1][k];
        let wp = |j: usize| joint[0][j][k] + joint[1][j][k];
        p_ww += ww(0).max(ww(1));
        p_wp += wp(0).max(wp(1));
    }
    (p_ww, p_wp)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0_f64;
    for _ in 0..500 {
        let s = random_state(&mut rng);
        let det = random_detector(&mut rng);
        let v = visibility_scan(&s, &det, DEFAULT_GRID).map_err(|e| e.to_string())?;
        let d = trace_norm_d(&s, &det);
        worst = worst.max((d * d + v * v - 1.0).abs());
    }
    let elapsed = start.elapsed();
    check(worst < 1e-9, format!("max |D²+V²−1| = {worst:.2e}")).and_then(|d| within_budget(elapsed, 10.0, d))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = [0.0_f64; 4];
    for _ in 0..100 {
        // E = 0: D = P
        let s = random_state(&mut rng);
        let det = build_detector(0.0, random_unit(&mut rng)).unwrap();
        worst[0] = worst[0].max((trace_norm_d(&s, &det) - predictability(&s)).abs());

        // P = 0: D = E
        let balanced = PathState::from_weights(0.5, rng.random_range(0.0..TAU)).unwrap();
        let det = random_detector(&mut rng);
        worst[1] = worst[1].max((trace_norm_d(&balanced, &det) - det.efficiency()).abs());

        // E = 1: D = 1
        let s = random_state(&mut rng);
        let det = build_detector(FRAC_PI_2, linear_polarization(rng.random_range(0.0..PI))).unwrap();
        worst[2] = worst[2].max((trace_norm_d(&s, &det) - 1.0).abs());

        // P = 1: D = 1
        let arm = if rng.random::<bool>() {
            PathState::arm_a()
        } else {
            PathState::arm_b()
        };
        let det = random_detector(&mut rng);
        worst[3] = worst[3].max((trace_norm_d(&arm, &det) - 1.0).abs());
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    check(
        max < 1e-12,
        format!(
            "max errors E=0 {:.1e}, P=0 {:.1e}, E=1 {:.1e}, P=1 {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0_f64;
    for pointer_angle in [0.0, PI / 4.0] {
        for k in 0..1000 {
            let beta = TAU * k as f64 / 999.0;
            let det = build_detector(beta, linear_polarization(pointer_angle)).unwrap();
            worst = worst.max((det.efficiency() - beta.sin().abs()).abs());
        }
    }
    check(worst < 1e-12, format!("max |E − |sin β|| = {worst:.2e}"))
}

fn retrodictive_sample(rng: &mut impl Rng) -> (f64, f64, f64) {
    (
        rng.random_range(0.05..FRAC_PI_2 - 0.05),
        rng.random_range(0.05..PI - 0.05),
        rng.random_range(0.01..0.99),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst, mut worst_lib) = (0.0_f64, 0.0_f64);
    for _ in 0..1000 {
        let (alpha, phi, e) = retrodictive_sample(&mut rng);
        let (d_ww, d_wp) = oracle_distances(alpha, phi);
        let (p_ww, p_wp) = born_guess_success(alpha, phi, e);
        let lhs = ((2.0 * p_ww - 1.0) / d_ww).powi(2) + ((2.0 * p_wp - 1.0) / d_wp).powi(2);
        worst = worst.max((lhs - 1.0).abs());
        let r = retrodictive_probabilities(alpha, phi, e).map_err(|e| e.to_string())?;
        worst_lib = worst_lib.max((r.p_ww - p_ww).abs()).max((r.p_wp - p_wp).abs());
    }
    check(
        worst < 1e-10 && worst_lib < 1e-10,
        format!("max |lhs − 1| = {worst:.2e}; library vs Born {worst_lib:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut max_sum = 0.0_f64;
    for _ in 0..1000 {
        let (alpha, phi, _) = retrodictive_sample(&mut rng);
        let (d_ww, d_wp) = oracle_distances(alpha, phi);
        max_sum = max_sum.max(d_ww * d_ww + d_wp * d_wp);
    }
    let mut worst_eq = 0.0_f64;
    for k in 0..=100 {
        let alpha = FRAC_PI_2 * k as f64 / 100.0;
        let (d_ww, d_wp) = oracle_distances(alpha, FRAC_PI_2);
        worst_eq = worst_eq.max((d_ww * d_ww + d_wp * d_wp - 1.0).abs());
    }
    check(
        max_sum <= 1.0 + 1e-10 && worst_eq < 1e-9,
        format!("max d_WW²+d_WP² = {max_sum:.12}; equality error at φ=π/2 {worst_eq:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_p, mut worst_c) = (0.0_f64, 0.0_f64);
    for i in 0..1000 {
        let s = random_state(&mut rng);
        let (det, kraus) = if i % 2 == 0 {
            let det = DetectorModel::from_efficiency(rng.random_range(0.0..=1.0)).unwrap();
            (det, kraus_closed_form(det.efficiency()).unwrap())
        } else {
            let det = build_detector(rng.random_range(0.0..PI), random_unit(&mut rng)).unwrap();
            (det, extract_kraus(&det))
        };
        let born = outcome_probabilities(&evolve(&s, &det, 0.0), &optimal_pointer_basis(&det));
        let via_kraus = kraus.probabilities(&s.density());
        for (a, b) in born.iter().zip(via_kraus.iter()) {
            worst_p = worst_p.max((a - b).abs());
        }
        worst_c = worst_c.max(kraus.completeness_error());
    }
    let elapsed = start.elapsed();
    check(
        worst_p < 1e-10 && worst_c < 1e-10,
        format!("max |Kraus − Born| = {worst_p:.2e}; max |ΣK†K − I| = {worst_c:.2e}"),
    )
    .and_then(|d| within_budget(elapsed, 5.0, d))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let (alpha, phi, e, n) = (FRAC_PI_6, FRAC_PI_2, 0.6, 1_000_000);
    let target_ww = 0.65;
    let target_wp = 0.846_41;
    let mut passed = 0;
    for seed in 0..20u64 {
        let seed = 1_000 + 7 * seed;
        let s = run_retrodictive(alpha, phi, e, n, seed).map_err(|e| e.to_string())?;
        if s.ww.unwrap().within_sigma(target_ww, 3.0) && s.wp.unwrap().within_sigma(target_wp, 3.0) {
            passed += 1;
        }
    }
    let elapsed = start.elapsed();
    check(passed >= 19, format!("{passed} of 20 seeds within 3σ")).and_then(|d| within_budget(elapsed, 60.0, d))
}

/// `(2p̂_WW − 1)² + (2p̂_WP − 1)²` and its propagated standard error.
fn circle_sum(ww: Estimate, wp: Estimate) -> (f64, f64) {
    let (x, y) = (2.0 * ww.p_hat - 1.0, 2.0 * wp.p_hat - 1.0);
    let sigma = ((4.0 * x * ww.std_err).powi(2) + (4.0 * y * wp.std_err).powi(2)).sqrt();
    (x * x + y * y, sigma)
}

fn criterion_8() -> Outcome {
    let n = 1_000_000;
    let mut notes = Vec::new();
    let mut ok = true;
    for (i, e) in [0.2, 0.5, FRAC_1_SQRT_2, 0.9].into_iter().enumerate() {
        let s = run_alternative(e, n, 80 + i as u64, false).map_err(|e| e.to_string())?;
        let (sum, sigma) = circle_sum(s.ww.unwrap(), s.wp.unwrap());
        ok &= (sum - 1.0).abs() < 3.0 * sigma;
        notes.push(format!("E={e:.3}: {sum:.4}±{sigma:.4}"));
    }
    let s = run_alternative(FRAC_1_SQRT_2, n, 88, true).map_err(|e| e.to_string())?;
    let (sum, sigma) = circle_sum(s.ww.unwrap(), s.wp.unwrap());
    ok &= (sum - 0.25).abs() < 3.0 * sigma;
    notes.push(format!("averaged {sum:.4}±{sigma:.4}"));
    check(ok, notes.join(", "))
}

fn criterion_9() -> Outcome {
    // d_WW = d_WP = 1/√2 at α = π/4, φ = π/2
    let (alpha, phi) = (PI / 4.0, FRAC_PI_2);
    let mut min_margin = f64::INFINITY;
    for e in efficiency_grid(101) {
        let (avg_ww, avg_wp) = alternative_averaged_probabilities(e).map_err(|e| e.to_string())?;
        // bisect for the frontier efficiency whose P_WP matches (decreasing in E)
        let p_wp = |x: f64| retrodictive_probabilities(alpha, phi, x).unwrap().p_wp;
        let (mut lo, mut hi) = (0.0, 1.0);
        if p_wp(0.0) < avg_wp {
            return Err(format!("averaged P_WP {avg_wp} beyond the frontier at E={e}"));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p_wp(mid) >= avg_wp {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let frontier_ww = retrodictive_probabilities(alpha, phi, lo).unwrap().p_ww;
        min_margin = min_margin.min(frontier_ww - avg_ww);
    }
    check(min_margin > 0.01, format!("min P_WW margin = {min_margin:.4}"))
}

fn run_cli(args: &[&str], dir: &Path, tag: &str) -> Result<Vec<Vec<u8>>, String> {
    let out = dir.join(format!("{tag}.out"));
    let trials = dir.join(format!("{tag}.trials.csv"));
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    full.extend(["--output".into(), out.display().to_string()]);
    let is_game = args[0] == "game";
    if is_game {
        full.extend(["--trials-csv".into(), trials.display().to_string()]);
    }
    let status = Command::new(env!("CARGO_BIN_EXE_mzi"))
        .args(&full)
        .env_remove("SIM_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)));
    }
    let mut files = vec![std::fs::read(&out).map_err(|e| e.to_string())?];
    if is_game {
        files.push(std::fs::read(&trials).map_err(|e| e.to_string())?);
    }
    Ok(files)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let configs: &[&[&str]] = &[
        &["report", "--alpha", "0.5235988", "--phi", "1.5707963", "--E", "0.6"],
        &[
            "report", "--alpha", "0.3", "--phi", "2", "--beta", "0.7", "--format", "csv",
        ],
        &["fringe", "--E", "0.5"],
        &[
            "fringe",
            "--alpha",
            "0.4",
            "--phi",
            "1",
            "--beta",
            "30",
            "--degrees",
            "--grid",
            "100",
            "--format",
            "json",
        ],
        &["frontier", "--alpha", "0.5235988", "--phi", "1.5707963"],
        &[
            "frontier", "--alpha", "0.7", "--phi", "0.4", "--points", "11", "--format", "json",
        ],
        &[
            "game",
            "predictive-ww",
            "--E",
            "0.8",
            "--alpha",
            "0.64",
            "--n",
            "20000",
            "--seed",
            "3",
        ],
        &["game", "predictive-wp", "--E", "0.5", "--n", "20000", "--seed", "3"],
        &["game", "retrodictive", "--E", "0", "--n", "1000", "--seed", "7"],
        &[
            "game",
            "retrodictive",
            "--E",
            "0.6",
            "--alpha",
            "0.5235988",
            "--phi",
            "1.5707963",
            "--n",
            "20000",
            "--seed",
            "42",
            "--format",
            "csv",
        ],
        &["game", "alternative", "--E", "0.7", "--n", "20000", "--seed", "9"],
        &[
            "game",
            "alternative",
            "--E",
            "0.7",
            "--n",
            "20000",
            "--seed",
            "9",
            "--averaged",
        ],
    ];
    for (i, args) in configs.iter().enumerate() {
        let first = run_cli(args, dir.path(), &format!("{i}a"))?;
        let second = run_cli(args, dir.path(), &format!("{i}b"))?;
        if first != second {
            return Err(format!("outputs differ for {args:?}"));
        }
    }
    Ok(format!(
        "{} configurations byte-identical across two runs",
        configs.len()
    ))
}

fn main() {
    // `cargo test` passes harness flags such as `--list` or a filter; this
    // suite always runs in full but lists itself when asked
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let criteria: [Criterion; 10] = [
        ("predictive duality equality D²+V²=1", criterion_1),
        ("special cases of D", criterion_2),
        ("rotator efficiency E=|sin β|", criterion_3),
        ("retrodictive ellipse", criterion_4),
        ("rectangle constraint d_WW²+d_WP²≤1", criterion_5),
        ("Kraus/POVM equivalence", criterion_6),
        ("Monte Carlo convergence", criterion_7),
        ("alternative-game circle", criterion_8),
        ("frontier dominance", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} [{:>2}] {name}: {detail} ({:.2} s)",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
