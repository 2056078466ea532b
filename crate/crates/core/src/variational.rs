//! The Yamabe quotient of `(M × ℝ, g + dt²)` restricted to functions of the
//! line variable, and its minimization.
//!
//! For a base of volume `V` and constant scalar curvature `s`, a function
//! `f(t)` has quotient
//!
//! ```text
//!   V·∫(a·f′² + s·f²) / (V^{2/p}·(∫ f^p)^{2/p}),   a = 4n/(n−1),  p = 2(n+1)/(n−1),
//! ```
//!
//! whose infimum is `(V/Vₙ)^{2/(n+1)}·Y_{n+1}` when `s = n(n−1)`. The
//! minimizer is `cosh^{−(n−1)/2}(t)` up to scaling and translation.
//!
//! The discretization uses piecewise-linear functions on a uniform grid over
//! `[−T, T]` with Dirichlet ends. The minimizer is a preconditioned descent
//! on the quotient: the preconditioner is the quadratic form itself, so a
//! unit step is one step of nonlinear inverse iteration, and a backtracking
//! line search keeps the quotient nonincreasing.

use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Error, Result};
use crate::geometry::{
    conformal_coefficient, conformal_map_h0, critical_exponent, sphere_volume, sphere_yamabe,
};
use crate::symmetrization::RadialProfile;

/// Discretized line problem for a base of dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineProblem {
    pub n: usize,
    pub volume: f64,
    pub scal: f64,
    pub half_width: f64,
    pub grid: usize,
}

impl LineProblem {
    pub fn new(n: usize, volume: f64, scal: f64, half_width: f64, grid: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("base dimension must be >= 2, got {n}")));
        }
        if !(volume > 0.0) || !(scal > 0.0) {
            return Err(domain(format!(
                "need positive volume and scalar curvature, got V = {volume}, s = {scal}"
            )));
        }
        if !(half_width > 0.0) || grid < 5 {
            return Err(domain(format!("need T > 0 and at least 5 nodes, got T = {half_width}, N = {grid}")));
        }
        Ok(Self { n, volume, scal, half_width, grid })
    }

    /// Problem for a base normalized to `Ricci = (n−1)g`, so `s = n(n−1)`.
    pub fn normalized(n: usize, volume: f64, half_width: f64, grid: usize) -> Result<Self> {
        Self::new(n, volume, (n * (n - 1)) as f64, half_width, grid)
    }

    /// `a_{n+1} = 4n/(n−1)`.
    pub fn a(&self) -> f64 {
        conformal_coefficient(self.n + 1).expect("n >= 2")
    }

    /// `p_{n+1} = 2(n+1)/(n−1)`.
    pub fn p(&self) -> f64 {
        critical_exponent(self.n + 1).expect("n >= 2")
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.grid - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.grid).map(|i| -self.half_width + i as f64 * h).collect()
    }

    pub fn profile<F: Fn(f64) -> f64>(&self, f: F) -> LineProfile {
        let x = self.nodes();
        let values = x.iter().map(|&t| f(t)).collect();
        LineProfile { x, values }
    }
}

/// Samples of a function on the uniform grid of a [`LineProblem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineProfile {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl LineProfile {
    /// Piecewise-linear interpolation, zero outside the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if n == 0 || t < self.x[0] || t > self.x[n - 1] {
            return 0.0;
        }
        let h = self.x[1] - self.x[0];
        let pos = (t - self.x[0]) / h;
        let i = (pos.floor() as usize).min(n - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "value"])?;
        for (t, v) in self.x.iter().zip(&self.values) {
            out.serialize((t, v))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_profile(problem: &LineProblem, f: &LineProfile) -> Result<()> {
    if f.values.len() != problem.grid || f.x.len() != problem.grid {
        return Err(validation(format!(
            "profile has {} nodes, problem grid has {}",
            f.values.len(),
            problem.grid
        )));
    }
    if f.values.iter().any(|v| !v.is_finite()) {
        return Err(validation("profile values must be finite"));
    }
    Ok(())
}

/// The three integrals of the quotient: `∫f′²`, `∫f²`, `∫|f|^p` (trapezoid).
fn integrals(h: f64, p: f64, v: &[f64]) -> (f64, f64, f64) {
    let last = v.len() - 1;
    let mut grad = 0.0;
    let mut mass = 0.0;
    let mut pow = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let w = if i == 0 || i == last { 0.5 * h } else { h };
        mass += w * x * x;
        pow += w * x.abs().powf(p);
        if i < last {
            let d = (v[i + 1] - x) / h;
            grad += h * d * d;
        }
    }
    (grad, mass, pow)
}

fn quotient_of(problem: &LineProblem, a: f64, p: f64, v: &[f64]) -> Option<f64> {
    let (grad, mass, pow) = integrals(problem.step(), p, v);
    if !(pow > 0.0) {
        return None;
    }
    let vol = problem.volume;
    Some(vol * (a * grad + problem.scal * mass) / (vol.powf(2.0 / p) * pow.powf(2.0 / p)))
}

/// Yamabe quotient of a line function.
pub fn line_quotient(problem: &LineProblem, f: &LineProfile) -> Result<f64> {
    check_profile(problem, f)?;
    quotient_of(problem, problem.a(), problem.p(), &f.values)
        .ok_or_else(|| domain("line quotient of the zero function"))
}

/// Euler–Lagrange residual `−2a·f″ + 2s·f − μ·f^{p−1}` at interior nodes,
/// with `μ` the least-squares multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// `‖r‖ / ‖−2a·f″ + 2s·f‖`, invariant under `f ↦ c·f`.
    pub relative: f64,
    /// `‖r‖` itself; scales like `c` under `f ↦ c·f`.
    pub absolute: f64,
    /// Scales like `c^{2−p}` under `f ↦ c·f`.
    pub mu: f64,
}

pub fn euler_lagrange_residual(problem: &LineProblem, f: &LineProfile) -> Result<Residual> {
    check_profile(problem, f)?;
    let (a, p) = (problem.a(), problem.p());
    let h = problem.step();
    let v = &f.values;
    let n = v.len();
    let mut lin = Vec::with_capacity(n - 2);
    let mut nonlin = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let lap = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
        lin.push(-2.0 * a * lap + 2.0 * problem.scal * v[i]);
        nonlin.push(v[i].abs().powf(p - 1.0) * v[i].signum());
    }
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() * h;
    let nn = dot(&nonlin, &nonlin);
    if !(nn > 0.0) {
        return Err(domain("residual of the zero function"));
    }
    let mu = dot(&lin, &nonlin) / nn;
    let res: Vec<f64> = lin.iter().zip(&nonlin).map(|(l, q)| l - mu * q).collect();
    let absolute = dot(&res, &res).sqrt();
    let scale = dot(&lin, &lin).sqrt();
    Ok(Residual { relative: absolute / scale, absolute, mu })
}

/// `(V/Vₙ)^{2/(n+1)}·Y_{n+1}`: the line infimum for a base with `Ricci = (n−1)g`.
pub fn closed_form_line(n: usize, volume: f64) -> Result<f64> {
    if n < 2 || !(volume > 0.0) {
        return Err(domain(format!("need n >= 2 and V > 0, got n = {n}, V = {volume}")));
    }
    let nf = n as f64;
    Ok((volume / sphere_volume(n)?).powf(2.0 / (nf + 1.0)) * sphere_yamabe(n + 1)?)
}

/// Line infimum for an arbitrary constant `s > 0`. Rescaling `t` shows the
/// value is `(s/(n(n−1)))^{n/(n+1)}` times the normalized one; the product
/// `V^{2/(n+1)}·s^{n/(n+1)}` is invariant under `g ↦ c·g`.
pub fn closed_form_line_scal(n: usize, volume: f64, scal: f64) -> Result<f64> {
    if !(scal > 0.0) {
        return Err(domain(format!("scalar curvature must be positive, got {scal}")));
    }
    let nf = n as f64;
    let s0 = nf * (nf - 1.0);
    Ok(closed_form_line(n, volume)? * (scal / s0).powf(nf / (nf + 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_iterations: usize,
    /// Stop once the relative Euler–Lagrange residual drops below this.
    pub residual_tol: f64,
    /// Center of the Gaussian initial guess.
    pub initial_shift: f64,
    /// Width of the Gaussian initial guess.
    pub initial_width: f64,
    /// Replace every iterate by its symmetric decreasing rearrangement about
    /// the grid center. This never raises the quotient and removes the
    /// translation mode, which otherwise decays very slowly on `[−T, T]`.
    pub symmetrize: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            residual_tol: 1e-7,
            initial_shift: 0.0,
            initial_width: 2.0,
            symmetrize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub value: f64,
    pub minimizer: LineProfile,
    pub residual: f64,
    pub iterations: usize,
    /// Quotient after each accepted step, starting with the initial guess.
    pub history: Vec<f64>,
}

/// Solve `A x = b` for the symmetric tridiagonal `A` with constant
/// diagonal `d` and off-diagonal `e` (Thomas algorithm).
fn solve_tridiagonal(d: f64, e: f64, b: &[f64], scratch: &mut Vec<f64>, out: &mut Vec<f64>) {
    let n = b.len();
    scratch.clear();
    out.clear();
    scratch.resize(n, 0.0);
    out.resize(n, 0.0);
    let mut denom = d;
    scratch[0] = e / denom;
    out[0] = b[0] / denom;
    for i in 1..n {
        denom = d - e * scratch[i - 1];
        scratch[i] = e / denom;
        out[i] = (b[i] - e * out[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        out[i] -= scratch[i] * out[i + 1];
    }
}

/// Discrete symmetric decreasing rearrangement: the largest value at the
/// center, then alternately right and left. Sums of powers are unchanged and
/// `Σ (uᵢ₊₁ − uᵢ)²` does not increase.
pub fn symmetric_decreasing(u: &[f64]) -> Vec<f64> {
    let len = u.len();
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = vec![0.0; len];
    if len == 0 {
        return out;
    }
    let c = (len - 1) / 2;
    let (mut left, mut right) = (c as isize - 1, c + 1);
    out[c] = sorted[0];
    for (i, v) in sorted.into_iter().enumerate().skip(1) {
        let go_right = (i % 2 == 1 && right < len) || left < 0;
        if go_right {
            out[right] = v;
            right += 1;
        } else {
            out[left as usize] = v;
            left -= 1;
        }
    }
    out
}

/// Minimize [`line_quotient`] over nonnegative grid functions vanishing at `±T`.
pub fn minimize_line(problem: &LineProblem, opts: &MinimizeOptions) -> Result<MinimizeResult> {
    let (a, p) = (problem.a(), problem.p());
    let h = problem.step();
    let n = problem.grid;
    let inner = n - 2;
    // quadratic form on interior nodes: a·stiffness + s·mass
    let diag = a * 2.0 / h + problem.scal * h;
    let off = -a / h;

    let width = opts.initial_width;
    let mut u: Vec<f64> = problem.nodes()[1..n - 1]
        .iter()
        .map(|&x| (-(x - opts.initial_shift).powi(2) / (2.0 * width * width)).exp())
        .collect();
    let full = |u: &[f64]| -> Vec<f64> {
        let mut v = Vec::with_capacity(n);
        v.push(0.0);
        v.extend_from_slice(u);
        v.push(0.0);
        v
    };
    let q_of = |u: &[f64]| quotient_of(problem, a, p, &full(u));
    if opts.symmetrize {
        u = symmetric_decreasing(&u);
    }

    let mut q = q_of(&u).ok_or_else(|| domain("initial guess vanishes on the grid"))?;
    let mut history = vec![q];
    let mut rhs = vec![0.0; inner];
    let mut scratch = Vec::new();
    let mut target = Vec::new();
    let mut trial = vec![0.0; inner];
    let mut residual = f64::INFINITY;

    for iter in 0..opts.max_iterations {
        // N = uᵀAu, D = Σ h·u^p
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..inner {
            let left = if i > 0 { u[i - 1] } else { 0.0 };
            let right = if i + 1 < inner { u[i + 1] } else { 0.0 };
            num += u[i] * (diag * u[i] + off * (left + right));
            den += h * u[i].powf(p);
        }
        let scale = num / den;
        for i in 0..inner {
            rhs[i] = scale * h * u[i].powf(p - 1.0);
        }
        solve_tridiagonal(diag, off, &rhs, &mut scratch, &mut target);

        residual = euler_lagrange_residual(problem, &LineProfile { x: problem.nodes(), values: full(&u) })?.relative;
        if residual < opts.residual_tol {
            return Ok(finish(problem, u, q, residual, iter, history, &full));
        }

        // descent direction d = target − u; backtrack until the quotient drops
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-12 {
            for i in 0..inner {
                trial[i] = (u[i] + alpha * (target[i] - u[i])).max(0.0);
            }
            if opts.symmetrize {
                trial = symmetric_decreasing(&trial);
            }
            match q_of(&trial) {
                Some(qt) if qt <= q => {
                    let peak = trial.iter().cloned().fold(0.0, f64::max);
                    for i in 0..inner {
                        u[i] = trial[i] / peak;
                    }
                    q = qt;
                    history.push(q);
                    accepted = true;
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        if !accepted {
            // no descent left at machine precision
            return Err(Error::Convergence { best_value: q, residual, iterations: iter });
        }
    }
    Err(Error::Convergence { best_value: q, residual, iterations: opts.max_iterations })
}

fn finish(
    problem: &LineProblem,
    u: Vec<f64>,
    q: f64,
    residual: f64,
    iterations: usize,
    history: Vec<f64>,
    full: &dyn Fn(&[f64]) -> Vec<f64>,
) -> MinimizeResult {
    MinimizeResult {
        value: q,
        minimizer: LineProfile { x: problem.nodes(), values: full(&u) },
        residual,
        iterations,
        history,
    }
}

/// JSON record for a line minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeRecord {
    pub n: usize,
    #[serde(rename = "V")]
    pub volume: f64,
    pub scal: f64,
    pub value: f64,
    pub closed_form: f64,
    pub rel_err: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl MinimizeRecord {
    pub fn new(problem: &LineProblem, value: f64, residual: f64, iterations: usize) -> Result<Self> {
        let closed_form = closed_form_line_scal(problem.n, problem.volume, problem.scal)?;
        Ok(Self {
            n: problem.n,
            volume: problem.volume,
            scal: problem.scal,
            value,
            closed_form,
            rel_err: (value - closed_form).abs() / closed_form,
            residual,
            iterations,
        })
    }
}

/// Carry a line function to the spherical cone through the conformal map:
/// `w(t) = f(h₀(t)) / sin^{(n−1)/2}(t)`, so that the cone quotient of `w`
/// (with scalar curvature `n(n+1)`) equals the line quotient of `f`.
/// Requires the normalized problem, `s = n(n−1)`.
pub fn pullback_to_cone(problem: &LineProblem, f: &LineProfile, cells: usize) -> Result<RadialProfile> {
    check_profile(problem, f)?;
    let nf = problem.n as f64;
    if (problem.scal - nf * (nf - 1.0)).abs() > 1e-12 * problem.scal {
        return Err(domain("pullback needs the normalized scalar curvature n(n−1)"));
    }
    let weight = (nf - 1.0) / 2.0;
    RadialProfile::uniform(problem.n, problem.volume, cells, |t| {
        let u = conformal_map_h0(t).expect("cell centers are interior");
        f.eval(u) / t.sin().powf(weight)
    })
}
