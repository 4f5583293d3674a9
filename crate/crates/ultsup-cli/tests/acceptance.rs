//! Acceptance suite: one check per shipping criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them on success).

use std::time::Instant;

use ultsup::{
    build_w, simulate_prediction_error, simulate_reflected_stop, simulate_ultimate_supremum,
    solve, threshold_b_star, CaseTag, LevyModel, PenaltySpec, SimConfig, SimEstimate, Solver,
};
use ultsup_cli::commands::ks_against_exponential;

fn cl() -> LevyModel {
    LevyModel::cramer_lundberg(0.5, 1.0, 1.0).unwrap()
}

fn jd() -> LevyModel {
    LevyModel::jump_diffusion(1.0, 0.5, 1.0, 1.0).unwrap()
}

fn bd() -> LevyModel {
    LevyModel::brownian_drift(1.0, -1.0).unwrap()
}

fn criterion(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

// composite Simpson, independent of the library's closed forms
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn criterion_1_cl_barrier() {
    let t0 = Instant::now();
    let sol = solve(&cl(), &PenaltySpec::Quadratic { b: 5.0 }).unwrap();
    let elapsed = t0.elapsed();
    let a = sol.a_star().unwrap_or(f64::NAN);
    criterion(
        "criterion 1 (CL barrier)",
        sol.case() == CaseTag::Barrier
            && (a - 3.995).abs() <= 0.005
            && elapsed.as_secs_f64() < 1.0,
        &format!(
            "CL(0.5,1,1) b=5 -> {:?}, a*={a} (target 3.995 +- 0.005), {:.1} ms",
            sol.case(),
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_2_jd_barrier() {
    let t0 = Instant::now();
    let sol = solve(&jd(), &PenaltySpec::Quadratic { b: 5.0 }).unwrap();
    let elapsed = t0.elapsed();
    let a = sol.a_star().unwrap_or(f64::NAN);
    criterion(
        "criterion 2 (JD barrier)",
        sol.case() == CaseTag::Barrier
            && (a - 4.38).abs() <= 0.01
            && elapsed.as_secs_f64() < 1.0,
        &format!(
            "JD(1,0.5,1,1) b=5 -> {:?}, a*={a} (target 4.38 +- 0.01), {:.1} ms",
            sol.case(),
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_3_threshold_dichotomy() {
    let t_bd = threshold_b_star(&bd());
    let t_cl = threshold_b_star(&cl());
    let at = solve(&cl(), &PenaltySpec::Quadratic { b: t_cl }).unwrap();
    let above = solve(&cl(), &PenaltySpec::Quadratic { b: t_cl + 1e-9 }).unwrap();
    let below = solve(&cl(), &PenaltySpec::Quadratic { b: t_cl - 1e-9 }).unwrap();
    criterion(
        "criterion 3 (threshold dichotomy)",
        t_bd.abs() <= 1e-15
            && (t_cl - 1.5).abs() <= 1e-10
            && at.case() == CaseTag::StopImmediately
            && below.case() == CaseTag::StopImmediately
            && above.case() == CaseTag::Barrier,
        &format!(
            "b*(BD)={t_bd}, b*(CL)={t_cl}; case at b* = {:?}, just above = {:?}",
            at.case(),
            above.case()
        ),
    );
}

#[test]
fn criterion_4_laplace_identity() {
    let mut worst: f64 = 0.0;
    for m in [cl(), jd(), bd()] {
        let w = build_w(&m).unwrap();
        let phi = m.phi0();
        let coef: f64 = w.terms().iter().map(|(a, _)| a.abs()).sum();
        for i in 0..20 {
            let beta = phi + 0.1 + 4.9 * i as f64 / 19.0;
            let x_max = ((coef / ((beta - phi) * 1e-10)).ln() / (beta - phi)).max(10.0);
            let lhs = simpson(|x| (-beta * x).exp() * w.eval(x), 0.0, x_max, 400_000);
            let rhs = 1.0 / m.psi(beta).unwrap();
            worst = worst.max(((lhs - rhs) / rhs).abs());
        }
    }
    criterion(
        "criterion 4 (scale-function Laplace identity)",
        worst <= 1e-8,
        &format!("max relative error {worst:.3e} over 20-point beta grids, 3 families (tol 1e-8)"),
    );
}

#[test]
fn criterion_5_fit_conditions() {
    // continuous fit for the bounded-variation family
    let s = Solver::new(&cl(), 5.0).unwrap();
    let a = s.find_a_star().unwrap();
    let cont_gap = (s.f_a_lower(a, a - 1e-10) - s.h(a)).abs();
    let cont_ok = cont_gap <= 1e-9;

    // smooth fit for the families with a diffusion part
    let mut smooth_ok = true;
    let mut smooth_detail = String::new();
    for (m, b) in [(jd(), 5.0), (bd(), 2.0)] {
        let s = Solver::new(&m, b).unwrap();
        let a = s.find_a_star().unwrap();
        let left = s.f_a_prime(a, a - 1e-9);
        let hp = s.h_prime(a);
        let gap = (left - hp).abs() / hp.abs().max(1.0);
        smooth_ok &= gap <= 1e-6;
        smooth_detail.push_str(&format!(" {:?}:{gap:.2e}", m.family()));
    }

    // normal reflection at zero drawdown for every tested barrier
    let mut refl_ok = true;
    let mut refl_worst: f64 = 0.0;
    for (m, b) in [(cl(), 5.0), (jd(), 5.0), (bd(), 2.0)] {
        let s = Solver::new(&m, b).unwrap();
        for a in [0.5, 1.0, 2.0, s.find_a_star().unwrap(), 6.0] {
            let h = 1e-5;
            let fd = (s.f_a_lower(a, h) - s.f_a_lower(a, -h)) / (2.0 * h);
            let tol = 1e-4 * s.f_a(a, 0.0).abs() + 1e-8;
            refl_ok &= fd.abs() <= tol;
            refl_worst = refl_worst.max(fd.abs() / tol);
        }
    }

    criterion(
        "criterion 5 (fit conditions)",
        cont_ok && smooth_ok && refl_ok,
        &format!(
            "continuous fit gap {cont_gap:.2e} (tol 1e-9); smooth fit rel{smooth_detail} (tol 1e-6); reflection worst {refl_worst:.2} of tol"
        ),
    );
}

#[test]
fn criterion_6_monte_carlo_vs_closed_form() {
    let t0 = Instant::now();
    let s = Solver::new(&cl(), 5.0).unwrap();
    let a_star = s.find_a_star().unwrap();
    let cfg = SimConfig::new(100_000, 20260809);
    let mut pass = true;
    let mut detail = String::new();
    for a in [a_star, 2.0, 5.0] {
        let est = simulate_reflected_stop(&cl(), 5.0, 0.0, a, &cfg).unwrap();
        let target = s.f_a(a, 0.0);
        let gap = (est.mean - target).abs();
        pass &= gap <= 3.0 * est.std_error;
        detail.push_str(&format!(
            " a={a:.4}: {:.2}sigma;",
            gap / est.std_error
        ));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    pass &= elapsed < 30.0;
    criterion(
        "criterion 6 (MC vs closed form, 1e5 paths)",
        pass,
        &format!("{detail} elapsed {elapsed:.2}s (< 30s)"),
    );
}

#[test]
fn criterion_7_objective_equivalence() {
    let s = Solver::new(&cl(), 5.0).unwrap();
    let a_star = s.find_a_star().unwrap();
    let v0 = s.f_a(a_star, 0.0);
    let cfg = SimConfig::new(100_000, 1117);
    let est: SimEstimate = simulate_prediction_error(&cl(), 5.0, a_star, &cfg).unwrap();
    let gap = (est.mean - v0).abs();
    criterion(
        "criterion 7 (objective equivalence)",
        gap <= 3.0 * est.std_error && est.truncation_bias_bound <= 2e-9,
        &format!(
            "E[(sup - X_tau - 5)^2] = {} vs V(0) = {v0} ({:.2} sigma); bias bound {:.2e} <= 2e-9",
            est.mean,
            gap / est.std_error,
            est.truncation_bias_bound
        ),
    );
}

#[test]
fn criterion_8_supremum_distribution() {
    // exact simulation for CL
    let cfg = SimConfig::new(10_000, 2026);
    let sup = simulate_ultimate_supremum(&cl(), &cfg).unwrap();
    let (d_cl, crit) = ks_against_exponential(&sup.samples, cl().phi0());

    // Euler skeleton for BD, step small enough that the discretization
    // undershoot of the maximum stays below the KS resolution
    let cfg = SimConfig::new(10_000, 2026)
        .with_time_step(7e-5)
        .with_stop_level(7.0);
    let sup = simulate_ultimate_supremum(&bd(), &cfg).unwrap();
    let (d_bd, _) = ks_against_exponential(&sup.samples, bd().phi0());

    criterion(
        "criterion 8 (supremum is Exp(phi), KS at 1%)",
        d_cl <= crit && d_bd <= crit,
        &format!("CL: D={d_cl:.5}, BD: D={d_bd:.5}, critical {crit:.5} at n=1e4"),
    );
}

#[test]
fn criterion_9_optimality_sweep() {
    let s = Solver::new(&cl(), 5.0).unwrap();
    let a_star = s.find_a_star().unwrap();
    let cfg = SimConfig::new(100_000, 5);
    let grid = [2.0, 3.0, a_star, 4.5, 5.0, 6.0];
    let estimates: Vec<(f64, SimEstimate)> = grid
        .iter()
        .map(|&a| (a, simulate_reflected_stop(&cl(), 5.0, 0.0, a, &cfg).unwrap()))
        .collect();
    let star = estimates
        .iter()
        .find(|(a, _)| *a == a_star)
        .expect("grid holds a*")
        .1;
    let mut pass = true;
    let mut detail = String::new();
    for (a, est) in &estimates {
        detail.push_str(&format!(" f_{a:.3}={:.4}", est.mean));
        if *a == a_star {
            continue;
        }
        let combined = (est.std_error.powi(2) + star.std_error.powi(2)).sqrt();
        pass &= star.mean <= est.mean + 2.0 * combined;
    }
    criterion(
        "criterion 9 (optimality sweep)",
        pass,
        &format!("minimum at a*={a_star:.4}:{detail}"),
    );
}
