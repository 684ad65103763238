//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use acasimir::acoustics::{
    acp_pressure, acp_pressure_series, design_bandwidth, electrostatic_pressure, ideal_pressure,
    pressure_profile, repulsive_peak_locations, resonant_extrema, series_terms_for,
    AcousticEnvironment, Bandwidth, DomainMode, Extremum, SignConvention,
};
use acasimir::mems::{
    bifurcation_curve, f_dimensionless, pull_in_acoustic, pull_in_classic, pull_in_with_shape,
    LumpedDevice,
};
use acasimir::numerics::derivative;
use acasimir::{Execution, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LISTED_PEAKS_UM: [f64; 3] = [11.8682, 23.7365, 35.6047];
const PEAK_REL_TOL: f64 = 0.02;
const SCALE_REL_TOL: f64 = 1e-6;
const ORACLE_REL_TOL: f64 = 1e-6;
const DESIGN_OMEGA1: f64 = 2.67035e7;
const DESIGN_OMEGA1_TOL: f64 = 1e2;
const DESIGN_PLACEMENT_TOL: f64 = 0.05;
const CURVE_LAMBDA2: [f64; 3] = [0.005, 0.015, 0.2];
const V_STAR_REL_TOL: f64 = 1e-3;
const ARGMAX_TOL: f64 = 1e-3;
const STATIONARITY_TOL: f64 = 0.01;
const ORDERING_HALF_WIDTH: f64 = 0.05;
const IDEAL_AT_60UM: f64 = -1.30900;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

fn sweep(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn narrow_band() -> (Bandwidth, AcousticEnvironment) {
    (
        Bandwidth::new(9e7, 1e8).unwrap(),
        AcousticEnvironment::default(),
    )
}

fn a1() -> Outcome {
    let dev = LumpedDevice::default();
    let classic = pull_in_classic(&dev);
    let l_in_ok = (classic.l_in - 40e-6).abs() <= 4.0 * f64::EPSILON * 40e-6;
    let quiet = AcousticEnvironment::default().with_intensity(0.0).unwrap();
    let band = Bandwidth::new(9e7, 1e8).unwrap();
    let r = pull_in_acoustic(
        &dev,
        &quiet,
        &band,
        &Tolerance::default(),
        Execution::Parallel,
    )
    .unwrap();
    let x_ok = (r.l_tilde_star - 2.0 / 3.0).abs() <= 1e-6;
    let l_ok = (r.lambda1_star - 4.0 / 27.0).abs() <= 1e-9;
    Outcome::new(
        l_in_ok && x_ok && l_ok,
        format!(
            "L_in = {:.6} um, V_in = {:.4} V, L~* = {:.12}, lambda1* = {:.12}",
            classic.l_in * 1e6,
            classic.v_in,
            r.l_tilde_star,
            r.lambda1_star
        ),
    )
}

fn first_extrema(band: &Bandwidth, env: &AcousticEnvironment, tol: &Tolerance) -> Vec<Extremum> {
    let gaps = sweep(5e-6, 40e-6, 351);
    let profile = pressure_profile(&gaps, band, env, tol, Execution::Parallel).unwrap();
    resonant_extrema(&profile, tol).unwrap()
}

fn a2() -> Outcome {
    let (band, env) = narrow_band();
    let tol = Tolerance::default();
    let extrema = first_extrema(&band, &env, &tol);
    let mut detail = String::new();
    let mut pass = extrema.len() >= 3;
    for (e, want) in extrema.iter().zip(LISTED_PEAKS_UM) {
        let off = (e.gap * 1e6 - want) / want;
        pass &= off.abs() <= PEAK_REL_TOL;
        write!(detail, "{:.4} um ({:+.2}%) ", e.gap * 1e6, 100.0 * off).unwrap();
    }
    let annulus = first_extrema(&band, &env.with_domain(DomainMode::Annulus), &tol);
    write!(detail, "| annulus:").unwrap();
    for (e, want) in annulus.iter().zip(LISTED_PEAKS_UM) {
        write!(detail, " {:+.2}%", 100.0 * (e.gap * 1e6 / want - 1.0)).unwrap();
    }
    write!(detail, " | sign at n*pi*c/w1 (default, printed):").unwrap();
    for l in repulsive_peak_locations(&band, env.c(), 3).unwrap() {
        let p = acp_pressure(l, &band, &env, &tol).unwrap();
        let q = acp_pressure(l, &band, &env.with_sign(SignConvention::Printed), &tol).unwrap();
        write!(detail, " ({:+}, {:+})", p.signum(), q.signum()).unwrap();
    }
    Outcome::new(pass, detail)
}

fn a3() -> Outcome {
    let (band, env) = narrow_band();
    let tol = Tolerance::default();
    let s = 1e3;
    let gaps = sweep(5e-6, 40e-6, 50);
    let small: Vec<f64> = gaps.iter().map(|g| g / s).collect();
    let a = pressure_profile(&gaps, &band, &env, &tol, Execution::Parallel).unwrap();
    let b = pressure_profile(
        &small,
        &band.scaled(s).unwrap(),
        &env,
        &tol,
        Execution::Parallel,
    )
    .unwrap();
    let worst = a
        .scaled_products()
        .iter()
        .zip(b.scaled_products())
        .map(|(x, y)| (x - y).abs() / x.abs())
        .fold(0.0, f64::max);
    Outcome::new(
        worst <= SCALE_REL_TOL,
        format!("max rel diff of L*P = {worst:.3e} over 50 gaps"),
    )
}

fn a4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_eda4);
    let tol = Tolerance::default();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w1 = 10f64.powf(rng.gen_range(6.0..9.0));
        let rel = rng.gen_range(0.02..0.5);
        let r = rng.gen_range(0.1..=0.9);
        let periods = rng.gen_range(3.0..12.0);
        let band = Bandwidth::new(w1, w1 * (1.0 + rel)).unwrap();
        let gap = periods * PI * 340.0 / (band.omega2() - band.omega1());
        let env = AcousticEnvironment::with_product(340.0, 1e-4, r).unwrap();
        let q = acp_pressure(gap, &band, &env, &tol).unwrap();
        let s = acp_pressure_series(gap, &band, &env, series_terms_for(r, 1e-12).unwrap()).unwrap();
        worst = worst.max((q - s.pressure).abs() / q.abs());
    }
    Outcome::new(
        worst <= ORACLE_REL_TOL,
        format!("max rel diff = {worst:.3e} over 100 samples"),
    )
}

fn a5() -> Outcome {
    let band = design_bandwidth(40e-6, 1, 340.0, 0.075).unwrap();
    let env = AcousticEnvironment::default();
    let tol = Tolerance::default();
    let omega_ok = (band.omega1() - DESIGN_OMEGA1).abs() <= DESIGN_OMEGA1_TOL;
    let gaps = sweep(5e-6, 80e-6, 751);
    let profile = pressure_profile(&gaps, &band, &env, &tol, Execution::Parallel).unwrap();
    let nearest = resonant_extrema(&profile, &tol)
        .unwrap()
        .into_iter()
        .min_by(|a, b| (a.gap - 40e-6).abs().total_cmp(&(b.gap - 40e-6).abs()));
    let Some(nearest) = nearest else {
        return Outcome::new(false, "no extremum found".into());
    };
    let placement = (nearest.gap - 40e-6).abs() / 40e-6;
    Outcome::new(
        omega_ok && placement <= DESIGN_PLACEMENT_TOL,
        format!(
            "omega1 = {:.6e} rad/s, extremum at {:.4} um (P = {:+.4e} Pa, {:.2}% off)",
            band.omega1(),
            nearest.gap * 1e6,
            nearest.pressure,
            100.0 * placement
        ),
    )
}

fn a6() -> Vec<(String, Outcome)> {
    let dev = LumpedDevice::default();
    let env = AcousticEnvironment::default();
    let band = design_bandwidth(40e-6, 1, 340.0, 0.075).unwrap();
    let tol = Tolerance::default();
    let f = |x: f64| f_dimensionless(x, &dev, &env, &band, &tol);

    let mut routes = Vec::new();
    let mut argmax = Vec::new();
    let mut route_ok = true;
    let mut argmax_ok = true;
    for l2 in CURVE_LAMBDA2 {
        let r = pull_in_with_shape(&dev, l2, f, &tol, Execution::Parallel).unwrap();
        let rel = r
            .v_star_closed
            .map_or(f64::INFINITY, |c| (r.v_star - c).abs() / c);
        route_ok &= rel <= V_STAR_REL_TOL;
        routes.push(format!(
            "l2={l2}: V*={:.4} V vs {:.4} V ({rel:.2e})",
            r.v_star,
            r.v_star_closed.unwrap_or(f64::NAN)
        ));
        let shift = r.l_tilde_star - 2.0 / 3.0;
        argmax_ok &= shift.abs() <= ARGMAX_TOL;
        argmax.push(format!("l2={l2}: L~*-2/3 = {shift:+.3e}"));
    }

    let slope = derivative(|x| f(x).unwrap(), 2.0 / 3.0, 1e-4).unwrap();
    let stationary = slope.abs() <= STATIONARITY_TOL;

    let grid = sweep(
        2.0 / 3.0 - ORDERING_HALF_WIDTH,
        2.0 / 3.0 + ORDERING_HALF_WIDTH,
        101,
    );
    let mut lambdas = vec![0.0];
    lambdas.extend(CURVE_LAMBDA2);
    let curves: Vec<Vec<f64>> = lambdas
        .iter()
        .map(|&l2| bifurcation_curve(&grid, l2, f, Execution::Parallel).unwrap())
        .collect();
    let ordered = curves
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(lo, hi)| hi > lo));

    vec![
        ("A6a".into(), Outcome::new(route_ok, routes.join("; "))),
        ("A6b".into(), Outcome::new(argmax_ok, argmax.join("; "))),
        (
            "A6c".into(),
            Outcome::new(stationary, format!("df/dL~(2/3) = {slope:+.4e}, f(2/3) = {:+.4e}", f(2.0 / 3.0).unwrap())),
        ),
        (
            "A6d".into(),
            Outcome::new(ordered, format!("curves 0.2 > 0.015 > 0.005 > 0 on |L~-2/3| <= {ORDERING_HALF_WIDTH}: {ordered}")),
        ),
    ]
}

fn a7() -> Outcome {
    let p0 = ideal_pressure(60e-6, 1e-4).unwrap();
    let ideal_ok = (p0 - IDEAL_AT_60UM).abs() <= 1e-5;
    let gaps = sweep(1e-6, 100e-6, 200);
    let mut worst_v: f64 = 0.0;
    let mut worst_l: f64 = 0.0;
    for &l in &gaps {
        let e3 = electrostatic_pressure(l, 3.0).unwrap();
        let e6 = electrostatic_pressure(l, 6.0).unwrap();
        worst_v = worst_v.max((e6 - 4.0 * e3).abs() / (4.0 * e3));
        let half = electrostatic_pressure(l / 2.0, 3.0).unwrap();
        worst_l = worst_l.max((half - 4.0 * e3).abs() / (4.0 * e3));
    }
    Outcome::new(
        ideal_ok && worst_v <= 1e-12 && worst_l <= 1e-12,
        format!("P0(60 um) = {p0:.6} Pa, V6/V3 rel err {worst_v:.1e}, 1/L^2 rel err {worst_l:.1e}"),
    )
}

fn csv(gaps: &[f64], pressures: &[f64]) -> String {
    let mut out = String::from("L_m,P_Pa\n");
    for (l, p) in gaps.iter().zip(pressures) {
        writeln!(out, "{l:.16e},{p:.16e}").unwrap();
    }
    out
}

fn a8() -> Outcome {
    let (band, env) = narrow_band();
    let tol = Tolerance::default();
    let gaps = sweep(5e-6, 150e-6, 200);
    let runs: Vec<String> = [
        Execution::Parallel,
        Execution::Parallel,
        Execution::Sequential,
    ]
    .into_iter()
    .map(|e| {
        let p = pressure_profile(&gaps, &band, &env, &tol, e).unwrap();
        csv(&p.gaps, &p.pressures)
    })
    .collect();
    let same = runs.windows(2).all(|w| w[0].as_bytes() == w[1].as_bytes());
    Outcome::new(
        same,
        format!("3 runs, {} bytes each, identical: {same}", runs[0].len()),
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let single: [Criterion; 7] = [
        ("A1", Duration::from_secs(1), a1),
        ("A2", Duration::from_secs(60), a2),
        ("A3", Duration::from_secs(120), a3),
        ("A4", Duration::from_secs(300), a4),
        ("A5", Duration::from_secs(60), a5),
        ("A7", Duration::from_secs(1), a7),
        ("A8", Duration::from_secs(60), a8),
    ];

    let mut failed = 0;
    let mut report = |name: &str, o: &Outcome, took: Duration, budget: Duration| {
        let pass = o.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{name:<4} {}  [{:.2} s / {} s]  {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
    };

    for (name, budget, run) in &single[..5] {
        let (o, took) = timed(run);
        report(name, &o, took, *budget);
    }
    let (parts, took) = timed(a6);
    for (name, o) in &parts {
        report(name, o, took, Duration::from_secs(300));
    }
    for (name, budget, run) in &single[5..] {
        let (o, took) = timed(run);
        report(name, &o, took, *budget);
    }

    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} checks failed");
        ExitCode::FAILURE
    }
}
