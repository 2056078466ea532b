//! Seeded property suites. Each check runs a batch of random trials, keeps
//! the worst error against its tolerance, and records the first failing
//! input. Identical seeds give identical reports.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{
    cone_ricci, cone_sectional, conformal_factor_f0, conformal_map_h0, conformal_map_h0_derivative,
    critical_exponent, sphere_volume, sphere_yamabe,
};
use crate::grid::RoundConeGrid;
use crate::isoperimetry::{
    content_lower_bound, cone_iso_profile, grid_minkowski_content, slice_stability_margin,
    sphere_ball_volume, sphere_iso_profile, suspension_distance, GridSet, SliceSet, StabilityInput,
};
use crate::symmetrization::{
    dirichlet_energy, rearrange, superlevel_volume, transfer_to_sphere, yamabe_quotient, ConeFunction,
    RadialProfile, RoundFunction,
};
use crate::variational::{
    closed_form_line, line_quotient, minimize_line, pullback_to_cone, LineProblem, MinimizeOptions,
};
use crate::SphericalCone;
use crate::EinsteinData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Curvature,
    Symmetrization,
    Stability,
    Minkowski,
    Variational,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 5] =
        [Suite::Curvature, Suite::Symmetrization, Suite::Stability, Suite::Minkowski, Suite::Variational];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Curvature => "curvature",
            Suite::Symmetrization => "symmetrization",
            Suite::Stability => "stability",
            Suite::Minkowski => "minkowski",
            Suite::Variational => "variational",
            Suite::All => "all",
        }
    }

    fn salt(self) -> u64 {
        match self {
            Suite::Curvature => 0x11,
            Suite::Symmetrization => 0x22,
            Suite::Stability => 0x33,
            Suite::Minkowski => 0x44,
            Suite::Variational => 0x55,
            Suite::All => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Suite::All)
            .chain(Suite::INDIVIDUAL)
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse { spec: s.to_string(), reason: "unknown suite".into() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub check: String,
    pub passed: bool,
    pub trials: usize,
    /// Largest observed error; `None` if an error was not finite.
    pub worst: Option<f64>,
    pub tolerance: f64,
    pub counterexample: Option<Value>,
}

struct Tracker {
    suite: Suite,
    check: &'static str,
    tolerance: f64,
    trials: usize,
    worst: f64,
    finite: bool,
    counterexample: Option<Value>,
}

impl Tracker {
    fn new(suite: Suite, check: &'static str, tolerance: f64) -> Self {
        Self { suite, check, tolerance, trials: 0, worst: 0.0, finite: true, counterexample: None }
    }

    fn observe(&mut self, err: f64, input: impl FnOnce() -> Value) {
        self.trials += 1;
        if !err.is_finite() {
            self.finite = false;
        } else {
            self.worst = self.worst.max(err);
        }
        if !(err <= self.tolerance) && self.counterexample.is_none() {
            let mut v = input();
            if let Value::Object(m) = &mut v {
                m.insert("error".into(), if err.is_finite() { json!(err) } else { json!(err.to_string()) });
            }
            self.counterexample = Some(v);
        }
    }

    fn observe_result(&mut self, r: Result<f64>, input: impl FnOnce() -> Value) {
        match r {
            Ok(err) => self.observe(err, input),
            Err(e) => {
                self.trials += 1;
                self.finite = false;
                if self.counterexample.is_none() {
                    let mut v = input();
                    if let Value::Object(m) = &mut v {
                        m.insert("failure".into(), json!(e.to_string()));
                    }
                    self.counterexample = Some(v);
                }
            }
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            suite: self.suite.name().into(),
            check: self.check.into(),
            passed: self.counterexample.is_none() && self.finite && self.trials > 0,
            trials: self.trials,
            worst: self.finite.then_some(self.worst),
            tolerance: self.tolerance,
            counterexample: self.counterexample,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// A smooth positive function on the cone over the round `Sⁿ` (which is the
/// round `Sⁿ⁺¹`): a few exponential bumps in the ambient coordinates
/// `x₀ = cos t`, `x₁ = sin t·cos θ`, plus a constant.
pub fn random_round_function<R: Rng>(grid: RoundConeGrid, rng: &mut R) -> Result<RoundFunction> {
    let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=3))
        .map(|_| (rng.gen_range(0.2..1.0), rng.gen_range(1.0..6.0), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let c = rng.gen_range(0.0..0.2);
    RoundFunction::from_fn(grid, move |th, t| {
        let (x0, x1) = (t.cos(), t.sin() * th.cos());
        c + bumps
            .iter()
            .map(|&(w, k, phi)| w * (k * (x0 * phi.cos() + x1 * phi.sin() - 1.0)).exp())
            .sum::<f64>()
    })
}

/// Slice radii `ρ(t) = clamp(ρ₀ + A·sin(ωt + φ), 0, π)`, zero outside a random
/// window of angles. The resulting set need not touch either vertex.
pub fn random_slice_set<R: Rng>(n: usize, cells: usize, rng: &mut R) -> Result<SliceSet> {
    let rho0 = rng.gen_range(0.3..2.5);
    let amp = rng.gen_range(0.0..0.8);
    let omega = rng.gen_range(1..=3) as f64;
    let phase = rng.gen_range(0.0..2.0 * PI);
    let lo = rng.gen_range(0.0..0.8);
    let hi = PI - rng.gen_range(0.0..0.8);
    let t = SliceSet::midpoint_grid(cells);
    let rho = t
        .iter()
        .map(|&s| if s < lo || s > hi { 0.0 } else { (rho0 + amp * (omega * s + phase).sin()).clamp(0.0, PI) })
        .collect();
    SliceSet::from_radii(n, t, rho)
}

/// Nonincreasing step profile with random values.
fn random_decreasing_profile<R: Rng>(n: usize, volume: f64, cells: usize, rng: &mut R) -> Result<RadialProfile> {
    let mut v: Vec<f64> = (0..cells).map(|_| rng.gen_range(0.0..1.0)).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let t = SliceSet::midpoint_grid(cells);
    RadialProfile::from_samples(n, volume, &t, v)
}

pub fn run(suite: Suite, seed: u64) -> Vec<CheckResult> {
    match suite {
        Suite::All => Suite::INDIVIDUAL.iter().flat_map(|s| run(*s, seed)).collect(),
        s => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (s.salt() << 56));
            match s {
                Suite::Curvature => curvature(&mut rng),
                Suite::Symmetrization => symmetrization(&mut rng),
                Suite::Stability => stability(&mut rng),
                Suite::Minkowski => minkowski(&mut rng),
                Suite::Variational => variational(&mut rng),
                Suite::All => unreachable!(),
            }
        }
    }
}

fn curvature(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let s = Suite::Curvature;
    let mut einstein = Tracker::new(s, "einstein_propagation", 1e-12);
    let mut lower = Tracker::new(s, "ricci_lower_bound_propagation", 1e-12);
    let mut sectional = Tracker::new(s, "sectional_round_base", 1e-12);
    let mut profile = Tracker::new(s, "cone_profile_equals_sphere_profile", 1e-10);
    let mut conformal = Tracker::new(s, "conformal_identities", 1e-8);
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let t = rng.gen_range(1e-3..PI - 1e-3);
        let mut eig = vec![n as f64 - 1.0; n];
        einstein.observe_result(
            cone_ricci(&eig, t).map(|r| r.iter().map(|x| rel(*x, n as f64)).fold(0.0, f64::max)),
            || json!({"n": n, "t": t}),
        );
        for e in eig.iter_mut() {
            *e += rng.gen_range(0.0..3.0);
        }
        lower.observe_result(
            cone_ricci(&eig, t).map(|r| r.iter().map(|x| (n as f64 - x) / n as f64).fold(0.0, f64::max)),
            || json!({"n": n, "t": t, "eigenvalues": eig.clone()}),
        );
        sectional.observe_result(
            cone_sectional(1.0, t).map(|(a, b)| rel(a, 1.0).max(rel(b, 1.0))),
            || json!({"t": t}),
        );
        let volume = rng.gen_range(0.05..1.0) * sphere_volume(n).unwrap_or(1.0);
        let beta = rng.gen_range(0.01..0.99);
        profile.observe_result(
            EinsteinData::einstein("random", n, volume, n as f64 - 1.0)
                .and_then(|b| SphericalCone::new(&b))
                .and_then(|c| Ok((cone_iso_profile(&c, beta)? - sphere_iso_profile(n + 1, beta)?).abs())),
            || json!({"n": n, "V": volume, "beta": beta}),
        );
        conformal.observe_result(
            (|| {
                let h = conformal_map_h0(t)?;
                let d = conformal_map_h0_derivative(t)?;
                let s2 = t.sin().powi(2);
                Ok((conformal_factor_f0(h) - s2).abs().max((s2 * d * d - 1.0).abs()))
            })(),
            || json!({"t": t}),
        );
    }
    vec![einstein.finish(), lower.finish(), sectional.finish(), profile.finish(), conformal.finish()]
}

fn stability(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let s = Suite::Stability;
    let mut round = Tracker::new(s, "round_base_margin_zero", 1e-12);
    let mut positive = Tracker::new(s, "margin_positive_above_n", 0.0);
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let t = rng.gen_range(0.1..PI - 0.1);
        round.observe_result(
            StabilityInput::new(t, n, n as f64).and_then(|i| slice_stability_margin(&i)).map(f64::abs),
            || json!({"n": n, "t": t}),
        );
        let l1 = n as f64 + rng.gen_range(1e-3..5.0);
        positive.observe_result(
            StabilityInput::new(t, n, l1)
                .and_then(|i| slice_stability_margin(&i))
                .map(|m| if m > 0.0 { 0.0 } else { -m + 1.0 }),
            || json!({"n": n, "t": t, "lambda1": l1}),
        );
    }
    vec![round.finish(), positive.finish()]
}

fn symmetrization(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let s = Suite::Symmetrization;
    let mut norms = Tracker::new(s, "norm_preservation", 1e-6);
    let mut levels = Tracker::new(s, "equimeasurability", 0.0);
    let mut monotone = Tracker::new(s, "rearrangement_nonincreasing", 0.0);
    let mut polya = Tracker::new(s, "energy_nonincreasing", 1e-3);
    let mut quotient = Tracker::new(s, "quotient_nonincreasing", 1e-3);
    let mut scale = Tracker::new(s, "quotient_scale_invariance", 1e-10);
    let mut transfer = Tracker::new(s, "transfer_scaling", 1e-10);
    let cells = 400;
    for trial in 0..5 {
        let n = 2;
        let grid = match RoundConeGrid::new(n, cells, cells) {
            Ok(g) => g,
            Err(e) => {
                norms.observe_result(Err(e), || json!({}));
                continue;
            }
        };
        let f = match random_round_function(grid, rng) {
            Ok(f) => ConeFunction::Round2d(f),
            Err(e) => {
                norms.observe_result(Err(e), || json!({}));
                continue;
            }
        };
        let ctx = || json!({"trial": trial, "n": n, "grid": cells});
        let fs = match rearrange(&f) {
            Ok(r) => r,
            Err(e) => {
                norms.observe_result(Err(e), ctx);
                continue;
            }
        };
        let p = critical_exponent(n + 1).unwrap_or(2.0);
        let worst_norm = [1.0, 2.0, p]
            .iter()
            .map(|&q| rel(fs.norm_pow(q), f.norm_pow(q)))
            .fold(0.0, f64::max);
        norms.observe(worst_norm, ctx);
        monotone.observe(if fs.is_nonincreasing() { 0.0 } else { 1.0 }, ctx);

        // superlevel volumes at 50 levels, in units of the largest cell
        let star = ConeFunction::Radial(fs.clone());
        let max = f.max_value();
        let cell = match &f {
            ConeFunction::Round2d(rf) => {
                let g = rf.grid();
                g.theta_measure().iter().cloned().fold(0.0, f64::max) * g.t_weight().iter().cloned().fold(0.0, f64::max)
            }
            ConeFunction::Radial(_) => 0.0,
        };
        let worst_level = (0..50)
            .map(|i| {
                let lvl = max * i as f64 / 50.0;
                ((superlevel_volume(&f, lvl) - superlevel_volume(&star, lvl)).abs() - cell).max(0.0)
            })
            .fold(0.0, f64::max);
        levels.observe(worst_level, ctx);

        let resampled = fs.resample_uniform(cells);
        let energies = resampled.as_ref().map_err(|e| Error::Domain(e.to_string())).and_then(|r| {
            let e0 = dirichlet_energy(&f)?;
            let e1 = dirichlet_energy(&ConeFunction::Radial(r.clone()))?;
            Ok((e1 - e0) / e0)
        });
        polya.observe_result(energies, ctx);

        let scal = (n * (n + 1)) as f64;
        let q = resampled.map_err(|e| Error::Domain(e.to_string())).and_then(|r| {
            let q0 = yamabe_quotient(&f, |_| scal)?;
            let q1 = yamabe_quotient(&ConeFunction::Radial(r), |_| scal)?;
            Ok((q1 - q0) / q0)
        });
        quotient.observe_result(q, ctx);

        let c = rng.gen_range(0.1..10.0);
        let scaled = match &f {
            ConeFunction::Round2d(rf) => {
                RoundFunction::new(rf.grid().clone(), rf.values().iter().map(|v| c * v).collect())
            }
            ConeFunction::Radial(_) => unreachable!(),
        };
        scale.observe_result(
            scaled.and_then(|g| {
                Ok(rel(yamabe_quotient(&ConeFunction::Round2d(g), |_| scal)?, yamabe_quotient(&f, |_| scal)?))
            }),
            || json!({"trial": trial, "n": n, "c": c}),
        );
    }
    for trial in 0..20 {
        let n = rng.gen_range(2..=6);
        let ratio = rng.gen_range(0.05..1.0);
        let r = (|| {
            let vn = sphere_volume(n)?;
            let prof = random_decreasing_profile(n, ratio * vn, 200, rng)?;
            let sphere = transfer_to_sphere(&prof)?;
            let expect = 1.0 / ratio;
            let mut worst: f64 = 0.0;
            for q in [1.0, 2.0, critical_exponent(n + 1)?] {
                worst = worst.max(rel(sphere.norm_pow(q) / prof.norm_pow(q), expect));
            }
            let e0 = dirichlet_energy(&ConeFunction::Radial(prof))?;
            let e1 = dirichlet_energy(&ConeFunction::Radial(sphere))?;
            Ok(worst.max(rel(e1 / e0, expect)))
        })();
        transfer.observe_result(r, || json!({"trial": trial, "n": n, "volume_ratio": ratio}));
    }
    vec![
        norms.finish(),
        levels.finish(),
        monotone.finish(),
        polya.finish(),
        quotient.finish(),
        scale.finish(),
        transfer.finish(),
    ]
}

fn minkowski(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let s = Suite::Minkowski;
    let cells = 400;
    let radii = [0.08, 0.04];
    let mut vertex = Tracker::new(s, "vertex_ball_content", 0.02);
    let mut whole = Tracker::new(s, "whole_space_content", 1e-9);
    let mut equator = Tracker::new(s, "off_vertex_ball_growth", 0.01);
    let mut lemma = Tracker::new(s, "content_lower_bound", 0.02);
    let mut inclusion = Tracker::new(s, "slice_inclusion", 0.0);
    let mut monotone = Tracker::new(s, "dilation_monotone", 0.0);

    let grid = |n: usize| RoundConeGrid::new(n, cells, cells);
    for _ in 0..3 {
        let n = rng.gen_range(2..=3);
        let rho = rng.gen_range(0.4..2.6);
        let r = (|| {
            let set = GridSet::from_predicate(grid(n)?, |_, t| t <= rho);
            let c = grid_minkowski_content(&set, &radii)?;
            Ok(rel(c, rho.sin().powi(n as i32) * sphere_volume(n)?))
        })();
        vertex.observe_result(r, || json!({"n": n, "rho": rho, "grid": cells}));
    }
    whole.observe_result(
        grid(2).and_then(|g| grid_minkowski_content(&GridSet::from_predicate(g, |_, _| true), &radii)),
        || json!({"n": 2}),
    );
    for _ in 0..2 {
        let rho = rng.gen_range(0.3..1.2);
        let r = rng.gen_range(0.05..0.3);
        let res = (|| {
            let set = GridSet::from_predicate(RoundConeGrid::new(2, 800, 800)?, |th, t| {
                suspension_distance(th, t, PI / 2.0).map(|d| d <= rho).unwrap_or(false)
            });
            let grown = set.dilate(r)?.volume();
            Ok(rel(grown, sphere_ball_volume(3, rho + r)?))
        })();
        equator.observe_result(res, || json!({"rho": rho, "r": r}));
    }
    for trial in 0..6 {
        let n = 2;
        let res = (|| {
            let u = random_slice_set(n, cells, rng)?;
            let set = GridSet::from_slice_set(&u, grid(n)?)?;
            let content = grid_minkowski_content(&set, &radii)?;
            let bound = content_lower_bound(&u)?;
            Ok(((bound - content) / bound).max(0.0))
        })();
        lemma.observe_result(res, || json!({"trial": trial, "n": n, "grid": cells}));
    }
    for trial in 0..4 {
        let cells = 200;
        let c0 = rng.gen_range(0.3..2.8);
        let c1 = rng.gen_range(-1.0..1.0);
        let w0 = rng.gen_range(0.1..0.6);
        let r = rng.gen_range(0.05..0.3);
        let res = (|| {
            let g = RoundConeGrid::new(2, cells, cells)?;
            let d_theta = g.d_theta();
            let band = GridSet::from_predicate(g, |th, t| {
                let c = c0 + c1 * (t - PI / 2.0);
                (th - c).abs() <= w0 * t.sin()
            });
            let left = band.symmetrized()?.dilate(r)?.slice_radii()?;
            let right = band.dilate(r)?.slice_radii()?;
            let excess = left.iter().zip(&right).map(|(a, b)| a - b - d_theta).fold(0.0, f64::max);
            let small = band.dilate(0.5 * r)?.volume();
            let big = band.dilate(r)?.volume();
            Ok((excess.max(0.0), (small - big).max(0.0)))
        })();
        let ctx = || json!({"trial": trial, "center": c0, "tilt": c1, "width": w0, "r": r});
        match res {
            Ok((e, m)) => {
                inclusion.observe(e, ctx);
                monotone.observe(m, ctx);
            }
            Err(e) => inclusion.observe_result(Err(e), ctx),
        }
    }
    vec![vertex.finish(), whole.finish(), equator.finish(), lemma.finish(), inclusion.finish(), monotone.finish()]
}

fn variational(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let s = Suite::Variational;
    let mut closed = Tracker::new(s, "minimizer_matches_closed_form", 5e-3);
    let mut monotone = Tracker::new(s, "objective_monotone", 0.0);
    let mut cosh = Tracker::new(s, "cosh_profile_quotient", 3e-3);
    let mut scaling = Tracker::new(s, "volume_scaling_law", 1e-12);
    let mut cone = Tracker::new(s, "cone_route_agreement", 5e-3);
    for n in 2..=4 {
        let ratio = if n == 4 { 2.0 / 3.0 } else { rng.gen_range(0.3..1.0) };
        let shift = rng.gen_range(-2.0..2.0);
        let ctx = || json!({"n": n, "volume_ratio": ratio, "shift": shift});
        let res = (|| {
            let v = ratio * sphere_volume(n)?;
            let pb = LineProblem::normalized(n, v, 12.0, 2001)?;
            let opts = MinimizeOptions { initial_shift: shift, ..MinimizeOptions::default() };
            let out = minimize_line(&pb, &opts)?;
            let cf = closed_form_line(n, v)?;
            let w = pullback_to_cone(&pb, &out.minimizer, 2000)?;
            let qc = yamabe_quotient(&ConeFunction::Radial(w), |_| (n * (n + 1)) as f64)?;
            Ok((out, cf, qc))
        })();
        match res {
            Ok((out, cf, qc)) => {
                closed.observe(rel(out.value, cf), ctx);
                let rise = out.history.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
                monotone.observe(rise, ctx);
                cone.observe(rel(qc, out.value), ctx);
            }
            Err(e) => closed.observe_result(Err(e), ctx),
        }
    }
    for _ in 0..5 {
        let n = rng.gen_range(2..=6);
        let ctx = || json!({"n": n});
        let res = (|| {
            let vn = sphere_volume(n)?;
            let pb = LineProblem::normalized(n, vn, 12.0, 4001)?;
            let e = (n as f64 - 1.0) / 2.0;
            let f = pb.profile(|t| t.cosh().powf(-e));
            Ok(rel(line_quotient(&pb, &f)?, sphere_yamabe(n + 1)?))
        })();
        cosh.observe_result(res, ctx);
        let v = rng.gen_range(0.1..10.0);
        let res = (|| {
            let p1 = LineProblem::normalized(n, 1.0, 8.0, 401)?;
            let pv = LineProblem::normalized(n, v, 8.0, 401)?;
            let f = p1.profile(|t| 1.0 / (1.0 + t * t));
            let expo = 1.0 - 2.0 / p1.p();
            Ok(rel(line_quotient(&pv, &f)?, v.powf(expo) * line_quotient(&p1, &f)?))
        })();
        scaling.observe_result(res, || json!({"n": n, "V": v}));
    }
    vec![closed.finish(), monotone.finish(), cosh.finish(), scaling.finish(), cone.finish()]
}
