//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use common::{brute_force_ml, gaussian_vec, mean_se, PairCovariance};
use impedance_core::bounds::{bayesian_crb_h, capacity_lb, crb};
use impedance_core::estimators::{estimate, ml_fast_fading, ml_multi_packet, ml_single_packet, mm_estimator, mmse_channel};
use impedance_core::fading::{clarke_correlation, doppler_hz, ChannelSpec};
use impedance_core::frontend::{compute_f, recover_za};
use impedance_core::harness::capacity::run_capacity_with_threads;
use impedance_core::harness::sweep::{channel_error, run_cell, Cell, TrialOutcome};
use impedance_core::harness::{degenerate_fraction, run_sweep, to_csv_string, ExperimentConfig};
use impedance_core::harness::sweep::run_sweep_with_threads;
use impedance_core::numerics::herm_eig_n;
use impedance_core::scalar::{complex_gaussian, db_to_linear};
use impedance_core::signalpath::{dft_training, sufficient_stats, synthesize, SufficientStats};
use impedance_core::{Cplx, Mat, Method};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

type Verdict = (bool, String);
type Group = Box<dyn FnOnce() -> Vec<(&'static str, Verdict)>>;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn random_f(rng: &mut ChaCha8Rng, radius: f64) -> Cplx {
    let r = radius * rng.random::<f64>().sqrt();
    Cplx::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

fn golden_f() -> Verdict {
    let f = compute_f(Cplx::new(73.0, 42.5), Cplx::new(50.0, 0.0), Cplx::new(60.0, 20.0)).unwrap();
    let dev = (f.re - 0.9646).abs().max((f.im + 0.1032).abs());
    (dev <= 5e-4, format!("F = {:.5}{:+.5}j, max deviation {dev:.2e} (tol 5e-4)", f.re, f.im))
}

fn golden_za() -> Verdict {
    let (z1, z2) = (Cplx::new(50.0, 0.0), Cplx::new(60.0, 20.0));
    let za = recover_za(Cplx::new(0.9646, -0.1032), z1, z2).unwrap();
    let dev = (za - Cplx::new(73.0, 42.5)).norm();
    (dev <= 0.1, format!("Z_A = {:.4}{:+.4}j, |error| {dev:.3e} ohm (tol 0.1)", za.re, za.im))
}

fn golden_clarke_row() -> Verdict {
    let want = [1.0000, 0.9089, 0.6602, 0.3210, -0.0199];
    let fd: f64 = doppler_hz(50.0, 2.1e9);
    let c = clarke_correlation::<f64>(5, 97.2, 1e-3);
    let dev = (0..5).map(|k| (c[(0, k)].re - want[k]).abs()).fold(0.0, f64::max);
    (
        dev <= 5e-4 && (fd - 97.2).abs() < 0.2,
        format!("f_d = {fd:.2} Hz, max row deviation {dev:.2e} (tol 5e-4)"),
    )
}

fn golden_eigenvalues() -> Verdict {
    let want = [3.5757, 1.3589, 0.0646];
    let eig = herm_eig_n(&clarke_correlation::<f64>(5, 97.2, 1e-3)).unwrap();
    let dev = (0..3).map(|k| (eig.lambdas[k] - want[k]).abs() / want[k]).fold(0.0, f64::max);
    let slow = herm_eig_n(&clarke_correlation::<f64>(5, 9.72, 1e-3)).unwrap().lambdas[0];
    let slow_dev = (slow - 4.981).abs();
    (
        dev <= 1e-3 && slow_dev <= 1e-3,
        format!("top-three rel deviation {dev:.2e} (tol 1e-3), slow top {slow:.5} dev {slow_dev:.2e} (tol 1e-3)"),
    )
}

fn ml1_vs_brute_force() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let n = 8;
    let (mut worst_f, mut worst_s, mut count) = (0.0f64, 0.0f64, 0);
    while count < 50 {
        let f = random_f(&mut rng, 1.5);
        let sigma_h2 = 0.5 + rng.random::<f64>();
        let sigma2 = sigma_h2 / db_to_linear(rng.random_range(5.0..20.0));
        let h = gaussian_vec(&mut rng, n, sigma_h2);
        let y1: Vec<Cplx> = h.iter().map(|x| x + complex_gaussian(&mut rng, sigma2)).collect();
        let y2: Vec<Cplx> = h.iter().map(|x| f * x + complex_gaussian(&mut rng, sigma2)).collect();
        let r = ml_single_packet(&y1, &y2, sigma2).unwrap();
        if r.degenerate {
            continue;
        }
        let (f_bf, s_bf) = brute_force_ml(&PairCovariance::from_samples(&y1, &y2), sigma2);
        worst_f = worst_f.max((r.f_hat - f_bf).norm());
        worst_s = worst_s.max((r.sigma_h2_hat.unwrap() - s_bf).abs() / s_bf.max(1.0));
        count += 1;
    }
    (
        worst_f <= 1e-4 && worst_s <= 1e-4,
        format!("50 instances, max |F diff| {worst_f:.2e}, max sigma_h2 diff {worst_s:.2e} (tol 1e-4)"),
    )
}

fn mp_identity_equals_fast_fading() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (n, l) = (4, 5);
    let spec = ChannelSpec::iid(n, l, 1.0).unwrap();
    let train = dft_training(n, 64, 1.0).unwrap();
    let (mut worst, mut exact_mm) = (0.0f64, true);
    for _ in 0..100 {
        let f = random_f(&mut rng, 1.5);
        let sigma_n2 = 1.0 / db_to_linear(rng.random_range(-5.0..25.0));
        let obs = synthesize(&spec, &train, f, sigma_n2, &mut rng).unwrap();
        let stats = sufficient_stats(&obs, &train, sigma_n2).unwrap();
        let ff = ml_fast_fading(&stats).unwrap();
        let mp = ml_multi_packet(&stats, &spec).unwrap();
        let mm = mm_estimator(&stats).unwrap();
        let ds = (mp.sigma_h2_hat.unwrap() - ff.sigma_h2_hat.unwrap()).abs() / ff.sigma_h2_hat.unwrap().max(1.0);
        worst = worst.max((mp.f_hat - ff.f_hat).norm()).max(ds);
        exact_mm &= mm.f_hat == ff.f_hat;
    }
    (
        worst <= 1e-6 && exact_mm,
        format!("100 instances, max ML_MP vs ML_FF diff {worst:.2e} (tol 1e-6), MM == ML_FF bitwise: {exact_mm}"),
    )
}

fn noiseless_recovery() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let n = 4;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = random_f(&mut rng, 2.0);
        for (l, spec) in [
            (1, ChannelSpec::iid(n, 1, 1.0).unwrap()),
            (5, ChannelSpec::iid(n, 5, 1.0).unwrap()),
            (5, ChannelSpec::clarke(n, 5, 1.0, 97.2, 1e-3).unwrap()),
            (5, ChannelSpec::clarke(n, 5, 1.0, 9.72, 1e-3).unwrap()),
        ] {
            let train = dft_training(n, 16, 1.0).unwrap();
            let obs = synthesize(&spec, &train, f, 0.0, &mut rng).unwrap();
            let stats = sufficient_stats(&obs, &train, 0.0).unwrap();
            for m in Method::ALL {
                if m == Method::Ml1 && l != 1 {
                    continue;
                }
                let r = estimate(&stats, m, Some(&spec)).unwrap();
                worst = worst.max((r.f_hat - f).norm());
            }
        }
    }
    (worst <= 1e-10, format!("max |F_hat - F| {worst:.2e} over all estimators (tol 1e-10)"))
}

fn crb_unit_eigenvalues() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let f = random_f(&mut rng, 2.0);
        let s = 0.1 + rng.random::<f64>();
        let sigma2 = 0.01 + rng.random::<f64>();
        let n = rng.random_range(1..9);
        let l = rng.random_range(1..11);
        let one = crb(f, s, sigma2, n, &[1.0]).unwrap();
        let many = crb(f, s, sigma2, n, &vec![1.0; l]).unwrap();
        let lf = l as f64;
        worst = worst
            .max((many.crb_f - one.crb_f / lf).abs() / (one.crb_f / lf))
            .max((many.crb_sigma_h2 - one.crb_sigma_h2 / lf).abs() / (one.crb_sigma_h2 / lf));
    }
    (worst <= 1e-12, format!("max relative deviation {worst:.2e} (tol 1e-12)"))
}

fn iid_config(trials: usize, grid: &str, estimators: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(&format!(
        "[experiment]\nscenario = \"iid\"\nN = 4\nL = 5\nT = 64\nsnr_grid_db = {grid}\ntrials = {trials}\nseed = 7\nestimators = {estimators}\n"
    ))
    .unwrap()
}

fn iid_sweep_vs_crb() -> Verdict {
    let cfg = iid_config(2000, "[0, 10, 20]", "[\"ML_FF\"]");
    let f = cfg.true_f();
    let sigma_h2 = cfg.sigma_h2();
    let mut ok = true;
    let mut notes = Vec::new();
    for (ci, &snr) in cfg.snr_grid_db.iter().enumerate() {
        let cell = Cell::new(&cfg, snr, f, sigma_h2).unwrap();
        let bound = crb(f, sigma_h2, cell.sigma2, 4, cell.spec.lambdas()).unwrap().crb_f;
        let errs: Vec<f64> = run_cell(&cfg, ci, &cell, None)
            .unwrap()
            .iter()
            .filter_map(|t| match t[0] {
                TrialOutcome::Estimated { f_err2, .. } => Some(f_err2),
                TrialOutcome::Degenerate => None,
            })
            .collect();
        let (mse, se) = mean_se(&errs);
        let ratio = (mse / bound).sqrt();
        let above = mse + 3.0 * se >= bound;
        let in_band = snr < 10.0 || (1.0..=1.3).contains(&ratio);
        ok &= above && in_band;
        notes.push(format!("{snr} dB: rmse/crb {ratio:.3}"));
    }
    (ok, format!("{} (band [1.0, 1.3] at 10 and 20 dB, MSE + 3 SE >= CRB everywhere)", notes.join(", ")))
}

fn mmse_vs_bayesian_bound() -> Verdict {
    let cfg = iid_config(10_000, "[0, 10]", "[\"ML_FF\"]");
    let f = cfg.true_f();
    let sigma_h2 = cfg.sigma_h2();
    let mut ok = true;
    let mut notes = Vec::new();
    for (ci, &snr) in cfg.snr_grid_db.iter().enumerate() {
        let cell = Cell::new(&cfg, snr, f, sigma_h2).unwrap();
        let errs: Vec<f64> = (0..cfg.trials)
            .map(|trial| {
                let (stats, truth) = cell.draw(cfg.seed, ci, trial).unwrap();
                let h = mmse_channel(&stats, f, sigma_h2, &cell.spec).unwrap();
                channel_error(&h, &truth.h)
            })
            .collect();
        let (mse, se) = mean_se(&errs);
        let bound = bayesian_crb_h(f, sigma_h2, cell.sigma2, &cell.spec).unwrap();
        let z = (mse - bound) / se;
        ok &= z.abs() <= 3.0;
        notes.push(format!("{snr} dB: mse {mse:.4e} bound {bound:.4e} ({z:+.2} SE)"));
    }
    (ok, format!("{} (tol 3 SE)", notes.join(", ")))
}

fn capacity_vs_monte_carlo() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let n = 4;
    let chi = Gamma::new(n as f64, 1.0).unwrap();
    let draws: Vec<f64> = (0..1_000_000).map(|_| chi.sample(&mut rng) / n as f64).collect();
    let mut worst = 0.0f64;
    for g in [1.0, 10.0, 100.0] {
        let mc = draws.iter().map(|x| (1.0 + g * x).log2()).sum::<f64>() / draws.len() as f64;
        worst = worst.max((capacity_lb(g, n).unwrap() - mc).abs());
    }
    (worst <= 0.01, format!("max |closed form - Monte Carlo| {worst:.2e} bits/s/Hz (tol 0.01)"))
}

fn capacity_scenario() -> Vec<(&'static str, Verdict)> {
    let cfg = ExperimentConfig::from_path(&configs_dir().join("capacity_5db.toml")).unwrap();
    let rows = run_capacity_with_threads(&cfg, None).unwrap();
    let mut worst = 0.0f64;
    for r in &rows {
        worst = worst.max((r.c_upper.unwrap() - r.c_adapted.unwrap()) / r.c_upper.unwrap());
    }
    let low = rows
        .iter()
        .min_by(|a, b| a.snr_db.total_cmp(&b.snr_db))
        .expect("non-empty grid");
    let ratio = low.c_adapted.unwrap() / low.c_mismatched.unwrap();
    vec![
        (
            "capacity: adapted within 2% of upper bound (5 dB loss)",
            (
                worst <= 0.02 && cfg.trials == 2000 && cfg.l == 10 && cfg.n == 4,
                format!("{} grid points, max relative gap {:.2}%", rows.len(), 100.0 * worst),
            ),
        ),
        (
            "capacity: adapted/mismatched >= 1.8 at lowest SNR",
            (ratio >= 1.8, format!("{} dB: ratio {ratio:.3}", low.snr_db)),
        ),
    ]
}

fn determinism() -> Verdict {
    let cfg = iid_config(200, "[-10, 0, 10]", "[\"ML_FF\", \"ML_MP\", \"MM\"]");
    let reference = to_csv_string(&run_sweep_with_threads(&cfg, Some(1)).unwrap()).unwrap();
    let same = [Some(2), Some(5), None]
        .into_iter()
        .all(|t| to_csv_string(&run_sweep_with_threads(&cfg, t).unwrap()).unwrap() == reference)
        && to_csv_string(&run_sweep(&cfg).unwrap()).unwrap() == reference;
    let mut cap = ExperimentConfig::from_path(&configs_dir().join("capacity_5db.toml")).unwrap();
    cap.trials = 100;
    let c1 = to_csv_string(&run_capacity_with_threads(&cap, Some(1)).unwrap()).unwrap();
    let c4 = to_csv_string(&run_capacity_with_threads(&cap, Some(4)).unwrap()).unwrap();
    let mut other = cfg.clone();
    other.seed += 1;
    let differs = to_csv_string(&run_sweep_with_threads(&other, Some(1)).unwrap()).unwrap() != reference;
    (
        same && c1 == c4 && differs,
        format!("sweep identical over 1/2/5/default workers: {same}, capacity identical: {}, new seed changes output: {differs}", c1 == c4),
    )
}

fn random_stats(rng: &mut ChaCha8Rng, l: usize, n: usize) -> SufficientStats<f64> {
    let y1 = Mat::from_fn(l, n, |_, _| complex_gaussian(rng, 1.0));
    let f = random_f(rng, 1.5);
    let y2 = Mat::from_fn(l, n, |i, j| f * y1[(i, j)] + complex_gaussian(rng, 0.2));
    SufficientStats::new(y1, y2, rng.random_range(0.01..0.5)).unwrap()
}

fn scale_equivariance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let spec = ChannelSpec::clarke(4, 5, 1.0, 97.2, 1e-3).unwrap();
    let methods = [Method::MlFf, Method::Mm, Method::MlMp];
    let mut worst = [0.0f64; 3];
    for _ in 0..100 {
        let stats = random_stats(&mut rng, 5, 4);
        let alpha = random_f(&mut rng, 10.0) + Cplx::new(0.05, 0.0);
        let scaled = SufficientStats::new(
            stats.y1().scale(alpha),
            stats.y2().scale(alpha),
            stats.sigma2() * alpha.norm_sqr(),
        )
        .unwrap();
        for (w, m) in worst.iter_mut().zip(methods) {
            let a = estimate(&stats, m, Some(&spec)).unwrap();
            let b = estimate(&scaled, m, Some(&spec)).unwrap();
            *w = w.max((a.f_hat - b.f_hat).norm() / a.f_hat.norm().max(1.0));
            if let (Some(sa), Some(sb)) = (a.sigma_h2_hat, b.sigma_h2_hat) {
                *w = w.max((sb / alpha.norm_sqr() - sa).abs() / sa.max(1e-3));
            }
        }
    }
    let closed = worst[0].max(worst[1]);
    (
        closed <= 1e-12 && worst[2] <= 1e-6,
        format!(
            "Y -> aY, sigma2 -> |a|^2 sigma2: ML_FF/MM max rel dev {closed:.2e} (tol 1e-12), ML_MP {:.2e} (tol 1e-6)",
            worst[2]
        ),
    )
}

fn nonnegativity_clamp() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let spec = ChannelSpec::clarke(4, 5, 1.0, 97.2, 1e-3).unwrap();
    let (mut min_seen, mut clamped, mut flags_ok) = (f64::INFINITY, 0, true);
    for k in 0..300 {
        let mut stats = random_stats(&mut rng, 5, 4);
        // push σ² past the signal level for a third of the draws
        let boost = if k % 3 == 0 { 50.0 } else { 1.0 };
        stats = SufficientStats::new(stats.y1().clone(), stats.y2().clone(), stats.sigma2() * boost).unwrap();
        for m in [Method::MlFf, Method::MlMp] {
            let r = estimate(&stats, m, Some(&spec)).unwrap();
            let s = r.sigma_h2_hat.unwrap();
            min_seen = min_seen.min(s);
            if s == 0.0 {
                clamped += 1;
            }
            flags_ok &= r.degenerate == (s == 0.0);
        }
    }
    (
        min_seen >= 0.0 && clamped > 0 && flags_ok,
        format!("min sigma_h2_hat {min_seen:.3e}, {clamped} clamped estimates, all flagged degenerate: {flags_ok}"),
    )
}

fn degenerate_accounting() -> Verdict {
    let cfg = iid_config(300, "[-30, -20, 20]", "[\"ML_FF\", \"ML_MP\", \"MM\"]");
    let rows = run_sweep(&cfg).unwrap();
    let totals = rows.iter().all(|r| r.trials_ok + r.trials_degenerate == r.trials);
    let flagged: usize = rows.iter().map(|r| r.trials_degenerate).sum();
    let frac = degenerate_fraction(&rows);
    let frac_ok = (frac - flagged as f64 / (rows.len() * cfg.trials) as f64).abs() < 1e-15;

    // RMSE must be taken over the non-degenerate trials only
    let cell = Cell::new(&cfg, -20.0, cfg.true_f(), cfg.sigma_h2()).unwrap();
    let outcomes = run_cell(&cfg, 1, &cell, None).unwrap();
    let errs: Vec<f64> = outcomes
        .iter()
        .filter_map(|t| match t[0] {
            TrialOutcome::Estimated { f_err2, .. } => Some(f_err2),
            TrialOutcome::Degenerate => None,
        })
        .collect();
    let row = rows.iter().find(|r| r.snr_db == -20.0 && r.estimator == Method::MlFf).unwrap();
    let rmse = (errs.iter().sum::<f64>() / errs.len() as f64).sqrt() / cfg.true_f().norm();
    let rmse_ok = row.trials_ok == errs.len() && (row.rmse_f_rel.unwrap() - rmse).abs() <= 1e-12 * rmse;
    (
        totals && flagged > 0 && frac_ok && rmse_ok,
        format!("ok + degenerate = trials: {totals}, {flagged} degenerate ({:.1}%), RMSE over kept trials only: {rmse_ok}", 100.0 * frac),
    )
}

fn main() {
    let mut checks: Vec<(&'static str, Group)> = Vec::new();
    macro_rules! single {
        ($name:expr, $f:expr) => {
            checks.push(($name, Box::new(|| vec![($name, $f())])));
        };
    }
    single!("golden: F for the dipole loads", golden_f);
    single!("golden: Z_A round trip", golden_za);
    single!("golden: Clarke correlation row", golden_clarke_row);
    single!("golden: Clarke eigenvalues", golden_eigenvalues);
    single!("oracle: ML1 vs brute-force likelihood", ml1_vs_brute_force);
    single!("oracle: ML_MP(C=I) vs ML_FF, MM vs ML_FF", mp_identity_equals_fast_fading);
    single!("oracle: noiseless recovery", noiseless_recovery);
    single!("bounds: unit-eigenvalue CRB = single-packet CRB / L", crb_unit_eigenvalues);
    single!("bounds: i.i.d. sweep RMSE vs CRB", iid_sweep_vs_crb);
    single!("bounds: MMSE vs Bayesian bound", mmse_vs_bayesian_bound);
    single!("capacity: closed form vs Monte Carlo", capacity_vs_monte_carlo);
    checks.push(("capacity: 5 dB loss scenario", Box::new(capacity_scenario)));
    single!("property: determinism", determinism);
    single!("property: scale equivariance", scale_equivariance);
    single!("property: nonnegativity clamp", nonnegativity_clamp);
    single!("property: degenerate accounting", degenerate_accounting);

    let mut failed = 0;
    let mut total = 0;
    for (group, check) in checks {
        let start = Instant::now();
        let lines = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| vec![(group, (false, "panicked".into()))]);
        let elapsed = start.elapsed();
        for (name, (pass, detail)) in lines {
            total += 1;
            if !pass {
                failed += 1;
            }
            println!("{} {name}: {detail} [{elapsed:.2?}]", if pass { "PASS" } else { "FAIL" });
        }
    }
    println!("acceptance: {total} criteria, {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
