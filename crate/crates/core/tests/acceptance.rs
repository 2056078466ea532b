//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use yamabe_cone::bounds::product_circle_bound;
use yamabe_cone::geometry::{
    cone_ricci, conformal_factor_f0, conformal_map_h0, conformal_map_h0_derivative, critical_exponent,
    sphere_volume, sphere_yamabe,
};
use yamabe_cone::isoperimetry::{
    content_lower_bound, cone_iso_profile, grid_minkowski_content, slice_stability_margin, sphere_iso_profile,
};
use yamabe_cone::symmetrization::{dirichlet_energy, rearrange, transfer_to_sphere, yamabe_quotient};
use yamabe_cone::variational::{closed_form_line, minimize_line, pullback_to_cone};
use yamabe_cone::verify::{random_round_function, random_slice_set};
use yamabe_cone::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let cat = Catalog::builtin();
    let y5 = sphere_yamabe(5)?;
    let mut ratio_err: f64 = 0.0;
    let mut value_err: f64 = 0.0;
    for (spec, ratio) in [("product:sphere:2,sphere:2", 2.0 / 3.0), ("cp2", 0.75)] {
        let r = product_circle_bound(&cat.resolve(spec)?)?;
        ratio_err = ratio_err.max((r.ratio.unwrap() - ratio).abs());
        value_err = value_err.max(rel(r.value, f64::powf(ratio, 0.4) * y5));
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        ratio_err <= 1e-12 && value_err <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("ratio err {ratio_err:.1e}, value rel err {value_err:.1e}, {elapsed:.2?}"),
    ))
}

fn criterion_2() -> Result<Outcome> {
    let mut cases: Vec<(usize, f64)> = (2..=6).map(|n| (n, 1.0)).collect();
    cases.push((4, 2.0 / 3.0));
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for (n, ratio) in cases {
        let start = Instant::now();
        let v = ratio * sphere_volume(n)?;
        let pb = LineProblem::normalized(n, v, 12.0, 4001)?;
        let res = minimize_line(&pb, &MinimizeOptions::default())?;
        slowest = slowest.max(start.elapsed());
        let target = f64::powf(ratio, 2.0 / (n as f64 + 1.0)) * sphere_yamabe(n + 1)?;
        worst = worst.max(rel(res.value, target));
    }
    Ok(outcome(
        worst < 5e-3 && slowest < Duration::from_secs(30),
        format!("worst rel err {worst:.2e}, slowest case {slowest:.2?}"),
    ))
}

fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (n, volume) in [(2, 4.0 * PI), (4, 16.0 * PI * PI / 9.0), (3, 0.3)] {
        let cone = SphericalCone::new(&EinsteinData::einstein("base", n, volume, n as f64 - 1.0)?)?;
        for i in 1..=99 {
            let beta = i as f64 / 100.0;
            worst = worst.max((cone_iso_profile(&cone, beta)? - sphere_iso_profile(n + 1, beta)?).abs());
        }
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("max abs diff {worst:.1e} over 3 volumes x 99 fractions, {elapsed:.2?}"),
    ))
}

fn criterion_4() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 2..=7 {
        for k in 1..=100 {
            let t = PI * k as f64 / 101.0;
            for x in cone_ricci(&vec![n as f64 - 1.0; n], t)? {
                worst = worst.max(rel(x, n as f64));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=8);
        let t = rng.gen_range(1e-3..PI - 1e-3);
        let eig: Vec<f64> = (0..n).map(|_| n as f64 - 1.0 + rng.gen_range(0.0..4.0)).collect();
        if cone_ricci(&eig, t)?.iter().any(|&x| x < n as f64 * (1.0 - 1e-12)) {
            violations += 1;
        }
    }
    Ok(outcome(
        worst <= 1e-12 && violations == 0,
        format!("Einstein rel err {worst:.1e} at 100 angles, {violations}/1000 random lower-bound violations"),
    ))
}

fn criterion_5() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 2;
    let cells = 400;
    let p = critical_exponent(n + 1)?;
    let (mut norm_err, mut energy_excess, mut transfer_err): (f64, f64, f64) = (0.0, f64::NEG_INFINITY, 0.0);
    for _ in 0..50 {
        let f = ConeFunction::Round2d(random_round_function(RoundConeGrid::new(n, cells, cells)?, &mut rng)?);
        let fs = rearrange(&f)?;
        for q in [2.0, p] {
            norm_err = norm_err.max(rel(fs.norm_pow(q).powf(1.0 / q), f.norm_pow(q).powf(1.0 / q)));
        }
        let resampled = fs.resample_uniform(cells)?;
        let e0 = dirichlet_energy(&f)?;
        let e1 = dirichlet_energy(&ConeFunction::Radial(resampled.clone()))?;
        energy_excess = energy_excess.max((e1 - e0) / e0);

        // the same t-profile over a base of another volume
        let v = rng.gen_range(0.1..1.0) * sphere_volume(n)?;
        let other = RadialProfile::from_samples(n, v, &resampled.t_grid(), resampled.values().to_vec())?;
        let sphere = transfer_to_sphere(&other)?;
        let expect = sphere_volume(n)? / v;
        for q in [2.0, p] {
            transfer_err = transfer_err.max(rel(sphere.norm_pow(q) / other.norm_pow(q), expect));
        }
        let ratio = dirichlet_energy(&ConeFunction::Radial(sphere))? / dirichlet_energy(&ConeFunction::Radial(other))?;
        transfer_err = transfer_err.max(rel(ratio, expect));
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        norm_err <= 1e-6 && energy_excess <= 1e-3 && transfer_err <= 1e-10 && elapsed < Duration::from_secs(60),
        format!(
            "norm rel err {norm_err:.1e}, max energy increase {energy_excess:.1e}, transfer err {transfer_err:.1e}, {elapsed:.2?}"
        ),
    ))
}

fn criterion_6() -> Result<Outcome> {
    let cells = 800;
    let radii = [0.04, 0.02];
    let mut content_err: f64 = 0.0;
    for n in [2, 3] {
        for rho in [0.5, 1.0, PI / 2.0, 2.2] {
            let set = GridSet::from_predicate(RoundConeGrid::new(n, cells, cells)?, |_, t| t <= rho);
            let c = grid_minkowski_content(&set, &radii)?;
            content_err = content_err.max(rel(c, rho.sin().powi(n as i32) * sphere_volume(n)?));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_deficit: f64 = f64::NEG_INFINITY;
    for _ in 0..20 {
        let u = random_slice_set(2, cells, &mut rng)?;
        let set = GridSet::from_slice_set(&u, RoundConeGrid::new(2, cells, cells)?)?;
        let content = grid_minkowski_content(&set, &radii)?;
        let bound = content_lower_bound(&u)?;
        worst_deficit = worst_deficit.max((bound - content) / bound);
    }
    Ok(outcome(
        content_err <= 0.02 && worst_deficit <= 0.02,
        format!(
            "vertex-ball content rel err {content_err:.2e}; content lower bound deficit {worst_deficit:.2e} (slack 2e-2) on 20 sets"
        ),
    ))
}

fn criterion_7() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        for k in 1..=50 {
            let t = PI * k as f64 / 51.0;
            worst = worst.max(slice_stability_margin(&StabilityInput::new(t, n, n as f64)?)?.abs());
        }
    }
    Ok(outcome(worst <= 1e-12, format!("max |margin| {worst:.1e} at 50 angles, n = 2..8")))
}

fn criterion_8() -> Result<Outcome> {
    let mut ident: f64 = 0.0;
    for k in 0..=2000 {
        let t = 1e-3 + (PI - 2e-3) * k as f64 / 2000.0;
        let s2 = t.sin().powi(2);
        ident = ident.max((conformal_factor_f0(conformal_map_h0(t)?) - s2).abs());
        ident = ident.max((s2 * conformal_map_h0_derivative(t)?.powi(2) - 1.0).abs());
    }
    let mut route: f64 = 0.0;
    for n in 2..=6 {
        let pb = LineProblem::normalized(n, sphere_volume(n)?, 12.0, 4001)?;
        let res = minimize_line(&pb, &MinimizeOptions::default())?;
        let w = pullback_to_cone(&pb, &res.minimizer, 4000)?;
        let q = yamabe_quotient(&ConeFunction::Radial(w), |_| (n * (n + 1)) as f64)?;
        route = route.max(rel(q, res.value));
        route = route.max(rel(q, closed_form_line(n, sphere_volume(n)?)?));
    }
    Ok(outcome(
        ident <= 1e-8 && route <= 5e-3,
        format!("conformal identity err {ident:.1e}, cone-route rel diff {route:.1e}"),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("example bounds", criterion_1),
        ("line minimizer against closed form", criterion_2),
        ("cone profile equals sphere profile", criterion_3),
        ("cone Ricci curvature", criterion_4),
        ("symmetrization suite", criterion_5),
        ("Minkowski content", criterion_6),
        ("stability degeneracy", criterion_7),
        ("conformal identities and cone route", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (passed, detail) = match check() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!("{} criterion {} ({name}): {detail}", if passed { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
