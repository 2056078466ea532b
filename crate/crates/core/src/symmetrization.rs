//! Decreasing rearrangement of functions on the spherical cone, transfer of
//! the rearranged profile to the round `Sⁿ⁺¹`, and the energy and Yamabe
//! quotient used to compare them.
//!
//! Functions come in two representations: a [`RadialProfile`] depending on
//! `t` only, and a [`RoundFunction`] on a [`RoundConeGrid`] over the round
//! base. The rearrangement sorts cells by value and lays their measures out
//! as consecutive vertex shells, so it is exact on step functions.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Result};
use crate::geometry::{
    ball_radius_for_integral, conformal_coefficient, critical_exponent, sin_power_integral,
    sphere_volume,
};
use crate::grid::RoundConeGrid;

/// A function of the cone angle, piecewise constant on cells `[edges[i], edges[i+1]]`.
///
/// `weights[i]` is the cone measure of the shell over cell `i`. For profiles
/// built on a grid it is `V·∫ sinⁿ` over the cell; a rearranged profile keeps
/// the exact measures of the cells it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    pub base_volume: f64,
    edges: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    t: f64,
    value: f64,
}

impl RadialProfile {
    /// Profile with given cell edges in `[0, π]` and one value per cell.
    pub fn new(n: usize, base_volume: f64, edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(validation(format!("base dimension must be >= 2, got {n}")));
        }
        if !(base_volume > 0.0) {
            return Err(validation("base volume must be positive"));
        }
        if edges.len() != values.len() + 1 || values.is_empty() {
            return Err(validation("need one more edge than values"));
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) || edges[0] < 0.0 || edges[edges.len() - 1] > PI {
            return Err(validation("edges must increase strictly inside [0, π]"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(validation("profile values must be finite"));
        }
        let weights = edges
            .windows(2)
            .map(|w| base_volume * (sin_power_integral(n, w[1]) - sin_power_integral(n, w[0])))
            .collect();
        Ok(Self { n, base_volume, edges, values, weights })
    }

    /// Profile sampled at the centers of `cells` equal cells covering `[0, π]`.
    pub fn uniform<F: Fn(f64) -> f64>(n: usize, base_volume: f64, cells: usize, f: F) -> Result<Self> {
        let edges: Vec<f64> = (0..=cells).map(|i| PI * i as f64 / cells as f64).collect();
        let values = edges.windows(2).map(|w| f(0.5 * (w[0] + w[1]))).collect();
        Self::new(n, base_volume, edges, values)
    }

    /// Profile from samples at strictly increasing angles in `(0, π)`;
    /// cells are the Voronoi cells of the samples.
    pub fn from_samples(n: usize, base_volume: f64, t: &[f64], values: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != values.len() {
            return Err(validation("t and values must be nonempty and of equal length"));
        }
        if t.iter().any(|x| !(*x > 0.0 && *x < PI)) {
            return Err(validation("sample angles must lie in (0, π)"));
        }
        let mut edges = Vec::with_capacity(t.len() + 1);
        edges.push(0.0);
        edges.extend(t.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        edges.push(PI);
        Self::new(n, base_volume, edges, values)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cell centers.
    pub fn t_grid(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// `∫ |f|^q dvol`.
    pub fn norm_pow(&self, q: f64) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| w * v.abs().powf(q)).sum()
    }

    /// Value of the cell containing `t` (the left cell at an edge).
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.edges[1..self.edges.len() - 1].partition_point(|e| *e < t);
        self.values[k.min(self.values.len() - 1)]
    }

    /// Point-sample this profile at the centers of a uniform `cells`-cell grid.
    pub fn resample_uniform(&self, cells: usize) -> Result<Self> {
        Self::uniform(self.n, self.base_volume, cells, |t| self.value_at(t))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (t, v) in self.t_grid().into_iter().zip(&self.values) {
            out.serialize(ProfileRow { t, value: *v })?;
        }
        out.flush()?;
        Ok(())
    }

    /// Read `t,value` rows (with header) as samples on Voronoi cells.
    pub fn read_csv<R: Read>(n: usize, base_volume: f64, r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut t = Vec::new();
        let mut values = Vec::new();
        for row in rdr.deserialize() {
            let row: ProfileRow = row?;
            t.push(row.t);
            values.push(row.value);
        }
        Self::from_samples(n, base_volume, &t, values)
    }
}

/// A function on the cone over the round `Sⁿ`, sampled at grid cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundFunction {
    grid: RoundConeGrid,
    values: Vec<f64>,
}

impl RoundFunction {
    pub fn new(grid: RoundConeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(validation("value count does not match the grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(validation("function values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: RoundConeGrid, f: F) -> Result<Self> {
        let values = grid.sample(f);
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &RoundConeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm_pow(&self, q: f64) -> f64 {
        let g = &self.grid;
        let mut total = 0.0;
        for k in 0..g.n_t() {
            let row: f64 = (0..g.n_theta())
                .map(|j| g.theta_measure()[j] * self.values[g.index(j, k)].abs().powf(q))
                .sum();
            total += row * g.t_weight()[k];
        }
        total
    }
}

/// A nonnegative function on the cone in one of the supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeFunction {
    Radial(RadialProfile),
    Round2d(RoundFunction),
}

impl ConeFunction {
    pub fn base_dim(&self) -> usize {
        match self {
            Self::Radial(p) => p.n,
            Self::Round2d(f) => f.grid.base_dim(),
        }
    }

    pub fn base_volume(&self) -> f64 {
        match self {
            Self::Radial(p) => p.base_volume,
            Self::Round2d(f) => f.grid.theta_measure().iter().sum(),
        }
    }

    /// `(value, cell measure)` for every cell, in (t, θ) index order.
    fn cells(&self) -> Vec<(f64, f64)> {
        match self {
            Self::Radial(p) => p.values.iter().copied().zip(p.weights.iter().copied()).collect(),
            Self::Round2d(f) => {
                let g = &f.grid;
                let mut out = Vec::with_capacity(g.len());
                for k in 0..g.n_t() {
                    for j in 0..g.n_theta() {
                        out.push((f.values[g.index(j, k)], g.cell_measure(j, k)));
                    }
                }
                out
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        self.cells().iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn norm_pow(&self, q: f64) -> f64 {
        match self {
            Self::Radial(p) => p.norm_pow(q),
            Self::Round2d(f) => f.norm_pow(q),
        }
    }

    pub fn total_volume(&self) -> f64 {
        self.base_volume() * sin_power_integral(self.base_dim(), PI)
    }
}

/// `Vol({f > s})` under the cone measure.
pub fn superlevel_volume(f: &ConeFunction, s: f64) -> f64 {
    f.cells().iter().filter(|c| c.0 > s).map(|c| c.1).sum()
}

/// The symmetric decreasing rearrangement `f*`: radial, nonincreasing in
/// `t`, with `Vol({f* > s}) = Vol({f > s})` for every level `s`.
///
/// Cells are sorted by value (descending; ties by (t, θ) index) and laid out
/// as consecutive shells about the vertex `t = 0`, each shell carrying the
/// exact measure of its source cell. Shells thinner than the radius bisection
/// tolerance may have coinciding edges; use [`RadialProfile::resample_uniform`]
/// before differentiating.
pub fn rearrange(f: &ConeFunction) -> Result<RadialProfile> {
    let mut cells = f.cells();
    if let Some(bad) = cells.iter().find(|c| c.0 < 0.0) {
        return Err(validation(format!("rearrangement needs f >= 0, found {}", bad.0)));
    }
    // stable sort keeps (t, θ) order among equal values
    cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    let n = f.base_dim();
    let v = f.base_volume();
    let total_integral = sin_power_integral(n, PI);
    let mut edges = Vec::with_capacity(cells.len() + 1);
    edges.push(0.0);
    let mut cum = 0.0;
    for (i, c) in cells.iter().enumerate() {
        cum += c.1;
        let edge = if i + 1 == cells.len() {
            PI
        } else {
            ball_radius_for_integral(n, (cum / v).min(total_integral))
        };
        edges.push(edge);
    }
    let values = cells.iter().map(|c| c.0).collect();
    let weights = cells.iter().map(|c| c.1).collect();
    Ok(RadialProfile { n, base_volume: v, edges, values, weights })
}

/// `f*(t)` evaluated by bisection on the level: the supremum of `s` with
/// `Vol({f > s}) > Vol(B(S, t))`. Independent of the sort in [`rearrange`].
pub fn level_cut_value(f: &ConeFunction, t: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&t) {
        return Err(domain(format!("angle {t} outside [0, π]")));
    }
    let ball = f.base_volume() * sin_power_integral(f.base_dim(), t);
    let mut hi = f.max_value();
    let mut lo = 0.0;
    if superlevel_volume(f, lo) <= ball {
        return Ok(0.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if superlevel_volume(f, mid) > ball {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Ok(hi)
}

/// `∫ ‖∇f‖² dvol` on the cone by finite differences between cell centers.
///
/// Radial: `Σ (Δf/Δt)²·V·∫ sinⁿ` over the span between adjacent centers.
/// Round 2D: t-differences weighted the same way per θ band, plus
/// θ-differences scaled by `1/sin²t`, i.e. weighted by `∫ sinⁿ⁻²` over the row.
pub fn dirichlet_energy(f: &ConeFunction) -> Result<f64> {
    match f {
        ConeFunction::Radial(p) => {
            if p.len() < 2 {
                return Err(domain("need at least two cells to differentiate a profile"));
            }
            let c = p.t_grid();
            if c.windows(2).any(|w| w[1] <= w[0]) {
                return Err(domain("profile has zero-width cells; resample it before differentiating"));
            }
            let mut e = 0.0;
            for i in 0..p.len() - 1 {
                let slope = (p.values[i + 1] - p.values[i]) / (c[i + 1] - c[i]);
                let w = sin_power_integral(p.n, c[i + 1]) - sin_power_integral(p.n, c[i]);
                e += slope * slope * w;
            }
            Ok(p.base_volume * e)
        }
        ConeFunction::Round2d(rf) => {
            let g = &rf.grid;
            let n = g.base_dim();
            let (nth, nt) = (g.n_theta(), g.n_t());
            let (t, th) = (g.t(), g.theta());
            let vals = &rf.values;
            let mut e = 0.0;
            for k in 0..nt - 1 {
                let w = sin_power_integral(n, t[k + 1]) - sin_power_integral(n, t[k]);
                let dt = t[k + 1] - t[k];
                for j in 0..nth {
                    let d = (vals[g.index(j, k + 1)] - vals[g.index(j, k)]) / dt;
                    e += d * d * w * g.theta_measure()[j];
                }
            }
            let slice_sphere = sphere_volume(n - 1)?;
            let edges = g.t_edges();
            for k in 0..nt {
                let w = sin_power_integral(n - 2, edges[k + 1]) - sin_power_integral(n - 2, edges[k]);
                for j in 0..nth - 1 {
                    let dth = th[j + 1] - th[j];
                    let d = (vals[g.index(j + 1, k)] - vals[g.index(j, k)]) / dth;
                    let band = slice_sphere
                        * (sin_power_integral(n - 1, th[j + 1]) - sin_power_integral(n - 1, th[j]));
                    e += d * d * w * band;
                }
            }
            Ok(e)
        }
    }
}

/// Reinterpret a rearranged cone profile on the round `Sⁿ⁺¹` (same `t`
/// dependence, base volume `Vₙ`). Every `∫ (f*)^q` and the Dirichlet energy
/// scale by `Vₙ/V`.
pub fn transfer_to_sphere(fstar: &RadialProfile) -> Result<RadialProfile> {
    let vn = sphere_volume(fstar.n)?;
    let ratio = vn / fstar.base_volume;
    Ok(RadialProfile {
        n: fstar.n,
        base_volume: vn,
        edges: fstar.edges.clone(),
        values: fstar.values.clone(),
        weights: fstar.weights.iter().map(|w| w * ratio).collect(),
    })
}

/// `(a·∫‖∇f‖² + ∫ scal·f²) / ‖f‖²_p` with the constants of dimension `n + 1`;
/// `scal` is a function of the cone angle.
pub fn yamabe_quotient<S: Fn(f64) -> f64>(f: &ConeFunction, scal: S) -> Result<f64> {
    let m = f.base_dim() + 1;
    let a = conformal_coefficient(m)?;
    let p = critical_exponent(m)?;
    let denom = f.norm_pow(p);
    if !(denom > 0.0) {
        return Err(domain("Yamabe quotient of the zero function"));
    }
    let potential = match f {
        ConeFunction::Radial(prof) => prof
            .t_grid()
            .iter()
            .zip(&prof.values)
            .zip(&prof.weights)
            .map(|((t, v), w)| scal(*t) * v * v * w)
            .sum::<f64>(),
        ConeFunction::Round2d(rf) => {
            let g = &rf.grid;
            (0..g.n_t())
                .map(|k| {
                    let row: f64 = (0..g.n_theta())
                        .map(|j| g.theta_measure()[j] * rf.values[g.index(j, k)].powi(2))
                        .sum();
                    scal(g.t()[k]) * row * g.t_weight()[k]
                })
                .sum()
        }
    };
    Ok((a * dirichlet_energy(f)? + potential) / denom.powf(2.0 / p))
}
