//! Isoperimetric profiles of round spheres and spherical cones, slice-wise
//! symmetrization of sets, dilation on the cone over a round base, Minkowski
//! content, and the stability margin of the slices `M × {t}`.
//!
//! Sets in the cone are described slice by slice: a [`SliceSet`] stores, for
//! each angle `t`, the fraction of the base occupied by `U ∩ (M × {t})`.
//! Over a round base a set can also be rasterized to a [`GridSet`] on a
//! [`RoundConeGrid`], where distances are exact suspension distances between
//! cell centers and dilations can be measured directly.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Error, Result};
use crate::geometry::{sin_power_integral, sphere_volume, SphericalCone};
use crate::grid::RoundConeGrid;

/// Tolerance used by every radius bisection in this module.
const RADIUS_TOL: f64 = 1e-12;

/// Volume of the geodesic ball of radius `r` in the unit round `Sᵐ`.
pub fn sphere_ball_volume(m: usize, r: f64) -> Result<f64> {
    if m < 2 {
        return Err(domain(format!("sphere dimension must be >= 2, got {m}")));
    }
    Ok(sphere_volume(m - 1)? * sin_power_integral(m - 1, r.clamp(0.0, PI)))
}

/// Area of the boundary of the radius-`r` ball in `Sᵐ`, `V_{m−1}·sin^{m−1}(r)`.
pub fn sphere_ball_area(m: usize, r: f64) -> Result<f64> {
    if m < 2 {
        return Err(domain(format!("sphere dimension must be >= 2, got {m}")));
    }
    Ok(sphere_volume(m - 1)? * r.sin().powi(m as i32 - 1))
}

/// Radius of the ball in `Sᵐ` holding the volume fraction `fraction`
/// (the infimum radius when the fraction is attained on a plateau).
pub fn radius_for_volume(m: usize, fraction: f64) -> Result<f64> {
    if m < 2 {
        return Err(domain(format!("sphere dimension must be >= 2, got {m}")));
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(domain(format!("volume fraction {fraction} outside [0, 1]")));
    }
    if fraction == 0.0 {
        return Ok(0.0);
    }
    if fraction == 1.0 {
        return Ok(PI);
    }
    let total = sin_power_integral(m - 1, PI);
    Ok(crate::quadrature::invert_nondecreasing(
        |r| sin_power_integral(m - 1, r),
        fraction * total,
        0.0,
        PI,
        RADIUS_TOL,
    ))
}

fn check_fraction(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("volume fraction {beta} is not in (0, 1)")))
    }
}

/// Normalized isoperimetric profile of the round `Sᵐ`: boundary area over
/// `V_m` of the geodesic ball holding fraction `beta` of the volume.
pub fn sphere_iso_profile(m: usize, beta: f64) -> Result<f64> {
    check_fraction(beta)?;
    let r = radius_for_volume(m, beta)?;
    Ok(sphere_ball_area(m, r)? / sphere_volume(m)?)
}

/// Normalized profile of the spherical cone, realized by balls about a vertex.
pub fn cone_iso_profile(cone: &SphericalCone, beta: f64) -> Result<f64> {
    check_fraction(beta)?;
    let total = cone.total_volume();
    let r = crate::quadrature::invert_nondecreasing(
        |r| cone.ball_volume(r).unwrap_or(f64::NAN),
        beta * total,
        0.0,
        PI,
        RADIUS_TOL,
    );
    Ok(cone.ball_area(r)? / total)
}

/// A sampled isoperimetric profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoProfile {
    pub label: String,
    /// `(beta, normalized perimeter)` pairs, ordered by `beta`.
    pub samples: Vec<(f64, f64)>,
}

impl IsoProfile {
    /// Sample `profile` at `beta = i/(count+1)`, `i = 1..=count`.
    pub fn sample<F>(label: impl Into<String>, count: usize, profile: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let samples = (1..=count)
            .map(|i| {
                let beta = i as f64 / (count + 1) as f64;
                profile(beta).map(|v| (beta, v))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { label: label.into(), samples })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["beta", "perimeter"])?;
        for (b, p) in &self.samples {
            out.serialize((b, p))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Distance in the spherical suspension between `(x, t1)` and `(y, t2)` with
/// `d(x, y) = d_base`. Vertices (`t ∈ {0, π}`) belong to the metric completion
/// and are accepted.
pub fn suspension_distance(d_base: f64, t1: f64, t2: f64) -> Result<f64> {
    if !(d_base >= 0.0) {
        return Err(domain(format!("base distance must be >= 0, got {d_base}")));
    }
    for t in [t1, t2] {
        if !(0.0..=PI).contains(&t) {
            return Err(domain(format!("cone angle {t} outside [0, π]")));
        }
    }
    Ok(suspension_cos(d_base.min(PI).cos(), t1, t2).acos())
}

#[inline]
fn suspension_cos(cos_base: f64, t1: f64, t2: f64) -> f64 {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    (c1 * c2 + s1 * s2 * cos_base).clamp(-1.0, 1.0)
}

/// Radius of the `r`-neighborhood of a geodesic ball of radius `rho` in a
/// round sphere: `min(rho + r, π)`.
pub fn enlarge_ball(_m: usize, rho: f64, r: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&rho) || !(r >= 0.0) {
        return Err(domain(format!("need rho in [0, π] and r >= 0, got rho = {rho}, r = {r}")));
    }
    Ok((rho + r).min(PI))
}

/// A region of the cone described by per-slice volume fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSet {
    /// Base dimension.
    pub n: usize,
    /// Volume of the base `(M, g)`.
    pub base_volume: f64,
    /// Strictly increasing angles in `(0, π)`; slice `i` stands for the
    /// Voronoi cell of `t_grid[i]` in `[0, π]`.
    pub t_grid: Vec<f64>,
    /// `Vol(U_t)/V` per slice, in `[0, 1]`.
    pub frac: Vec<f64>,
    /// Geodesic-ball radius on the round `Sⁿ` with the same normalized volume.
    pub rho: Option<Vec<f64>>,
}

impl SliceSet {
    pub fn new(n: usize, base_volume: f64, t_grid: Vec<f64>, frac: Vec<f64>) -> Result<Self> {
        let set = Self { n, base_volume, t_grid, frac, rho: None };
        set.validate()?;
        Ok(set)
    }

    /// A set over the round `Sⁿ` whose slice at `t_grid[i]` is the ball of
    /// radius `rho[i]` about the base point `E`.
    pub fn from_radii(n: usize, t_grid: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(validation(format!("base dimension must be >= 2, got {n}")));
        }
        if rho.len() != t_grid.len() {
            return Err(validation("rho and t_grid lengths differ"));
        }
        if rho.iter().any(|r| !(0.0..=PI).contains(r)) {
            return Err(validation("ball radii must lie in [0, π]"));
        }
        let total = sin_power_integral(n - 1, PI);
        let frac = rho.iter().map(|&r| sin_power_integral(n - 1, r) / total).collect();
        let set = Self { n, base_volume: sphere_volume(n)?, t_grid, frac, rho: Some(rho) };
        set.validate()?;
        Ok(set)
    }

    /// Uniform midpoint grid with `cells` slices.
    pub fn midpoint_grid(cells: usize) -> Vec<f64> {
        (0..cells).map(|i| PI * (i as f64 + 0.5) / cells as f64).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(validation(format!("base dimension must be >= 2, got {}", self.n)));
        }
        if !(self.base_volume > 0.0) {
            return Err(validation("base volume must be positive"));
        }
        if self.t_grid.is_empty() || self.t_grid.len() != self.frac.len() {
            return Err(validation("t_grid and frac must be nonempty and of equal length"));
        }
        if self.t_grid.iter().any(|t| !(*t > 0.0 && *t < PI)) {
            return Err(validation("slice angles must lie in (0, π)"));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(validation("slice angles must be strictly increasing"));
        }
        if let Some(bad) = self.frac.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(validation(format!("slice fraction {bad} outside [0, 1]")));
        }
        if let Some(rho) = &self.rho {
            if rho.len() != self.frac.len() {
                return Err(validation("rho and frac lengths differ"));
            }
            let total = sin_power_integral(self.n - 1, PI);
            for (r, f) in rho.iter().zip(&self.frac) {
                let g = sin_power_integral(self.n - 1, *r) / total;
                if (g - f).abs() > 1e-8 {
                    return Err(validation(format!(
                        "rho {r} gives fraction {g}, slice says {f}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Boundaries of the slice cells: 0, midpoints between angles, π.
    pub fn cell_edges(&self) -> Vec<f64> {
        let mut e = Vec::with_capacity(self.t_grid.len() + 1);
        e.push(0.0);
        e.extend(self.t_grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        e.push(PI);
        e
    }

    /// `∫ sinⁿ(t)·Vol(U_t)/V dt`, the volume in units of the base volume.
    pub fn normalized_volume(&self) -> f64 {
        self.cell_edges()
            .windows(2)
            .zip(&self.frac)
            .map(|(w, f)| f * (sin_power_integral(self.n, w[1]) - sin_power_integral(self.n, w[0])))
            .sum()
    }

    pub fn volume(&self) -> f64 {
        self.base_volume * self.normalized_volume()
    }

    /// Index of the slice whose cell contains `t`.
    pub fn slice_at(&self, t: f64) -> usize {
        let edges = self.cell_edges();
        let k = edges[1..edges.len() - 1].partition_point(|e| *e <= t);
        k.min(self.t_grid.len() - 1)
    }

    fn round_base_check(&self) -> Result<()> {
        let vn = sphere_volume(self.n)?;
        if (self.base_volume - vn).abs() > 1e-12 * vn {
            return Err(validation(format!(
                "grid dilation needs the round base (V = {vn}), got V = {}",
                self.base_volume
            )));
        }
        Ok(())
    }
}

/// Symmetrization: each slice becomes the geodesic ball about `E` in the round
/// `Sⁿ` with the same normalized volume. Fractions are unchanged, so
/// `Vol(U)/V = Vol(Uˢ, g₀)/Vₙ`.
pub fn symmetrize_set(u: &SliceSet) -> Result<SliceSet> {
    u.validate()?;
    let rho = u
        .frac
        .iter()
        .map(|&f| radius_for_volume(u.n, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(SliceSet {
        n: u.n,
        base_volume: u.base_volume,
        t_grid: u.t_grid.clone(),
        frac: u.frac.clone(),
        rho: Some(rho),
    })
}

/// An axisymmetric region of the cone over the round `Sⁿ`, rasterized on a
/// [`RoundConeGrid`] as per-cell occupancy in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSet {
    grid: RoundConeGrid,
    occupancy: Vec<f64>,
}

/// Minimum dilation radius, in cells, that the grid can resolve.
const MIN_DILATION_CELLS: f64 = 2.0;

impl GridSet {
    pub fn new(grid: RoundConeGrid, occupancy: Vec<f64>) -> Result<Self> {
        if occupancy.len() != grid.len() {
            return Err(validation("occupancy length does not match the grid"));
        }
        if occupancy.iter().any(|o| !(0.0..=1.0).contains(o)) {
            return Err(validation("occupancy outside [0, 1]"));
        }
        Ok(Self { grid, occupancy })
    }

    /// Cells whose center satisfies `inside(θ, t)`.
    pub fn from_predicate<F: Fn(f64, f64) -> bool>(grid: RoundConeGrid, inside: F) -> Self {
        let occupancy = grid.sample(|th, t| if inside(th, t) { 1.0 } else { 0.0 });
        Self { grid, occupancy }
    }

    /// Rasterize a round-base slice set with ball radii: cell `(θ, t)` is in
    /// the set when `θ ≤ ρ(t)`, `ρ` taken from the slice containing `t`.
    pub fn from_slice_set(u: &SliceSet, grid: RoundConeGrid) -> Result<Self> {
        u.round_base_check()?;
        if grid.base_dim() != u.n {
            return Err(validation("grid and slice set dimensions differ"));
        }
        let rho = u
            .rho
            .as_ref()
            .ok_or_else(|| validation("slice set has no ball radii; symmetrize it first"))?;
        let row_rho: Vec<f64> = grid.t().iter().map(|&t| rho[u.slice_at(t)]).collect();
        let mut occupancy = Vec::with_capacity(grid.len());
        for &r in &row_rho {
            // a zero fraction slice is empty, not a point
            for &th in grid.theta() {
                occupancy.push(if r > 0.0 && th <= r { 1.0 } else { 0.0 });
            }
        }
        Ok(Self { grid, occupancy })
    }

    pub fn grid(&self) -> &RoundConeGrid {
        &self.grid
    }

    pub fn occupancy(&self) -> &[f64] {
        &self.occupancy
    }

    pub fn volume(&self) -> f64 {
        let g = &self.grid;
        let mut v = 0.0;
        for k in 0..g.n_t() {
            let mut row = 0.0;
            for j in 0..g.n_theta() {
                row += self.occupancy[g.index(j, k)] * g.theta_measure()[j];
            }
            v += row * g.t_weight()[k];
        }
        v
    }

    /// Per-row `Vol(U_t)/Vₙ`.
    pub fn row_fractions(&self) -> Vec<f64> {
        let g = &self.grid;
        let vn: f64 = g.theta_measure().iter().sum();
        (0..g.n_t())
            .map(|k| {
                let m: f64 = (0..g.n_theta())
                    .map(|j| self.occupancy[g.index(j, k)] * g.theta_measure()[j])
                    .sum();
                (m / vn).clamp(0.0, 1.0)
            })
            .collect()
    }

    pub fn slice_set(&self) -> Result<SliceSet> {
        SliceSet::new(
            self.grid.base_dim(),
            sphere_volume(self.grid.base_dim())?,
            self.grid.t().to_vec(),
            self.row_fractions(),
        )
    }

    /// Per-row radius of the base ball with the row's measure.
    pub fn slice_radii(&self) -> Result<Vec<f64>> {
        self.row_fractions()
            .into_iter()
            .map(|f| radius_for_volume(self.grid.base_dim(), f))
            .collect()
    }

    /// Slice-wise symmetrization on the same grid.
    pub fn symmetrized(&self) -> Result<Self> {
        let s = symmetrize_set(&self.slice_set()?)?;
        Self::from_slice_set(&s, self.grid.clone())
    }

    /// The closed `r`-neighborhood `B(U, r)`.
    ///
    /// Distances are suspension distances between cell centers, with the
    /// vertices added when the first or last row is occupied. A cell whose
    /// center lies at distance `d` from the nearest occupied center is covered
    /// to the fraction `clamp((r − d)/h + 1, 0, 1)`, `h` being the width of
    /// the cell along the connecting direction; this makes the dilated volume
    /// continuous in `r`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(domain(format!("dilation radius must be >= 0, got {r}")));
        }
        let g = &self.grid;
        let (nth, nt) = (g.n_theta(), g.n_t());
        let (dth, dt) = (g.d_theta(), g.d_t());
        let cell = dth.max(dt);
        if r > 0.0 && r < MIN_DILATION_CELLS * cell {
            return Err(Error::Resolution { radius: r, cell, min_cells: MIN_DILATION_CELLS });
        }

        // per source row: base distance from each column to the nearest occupied column
        let occupied = |j: usize, k: usize| self.occupancy[g.index(j, k)] > 0.0;
        let mut row_dist: Vec<Option<Vec<f64>>> = Vec::with_capacity(nt);
        for k in 0..nt {
            if !(0..nth).any(|j| occupied(j, k)) {
                row_dist.push(None);
                continue;
            }
            let mut d = vec![f64::INFINITY; nth];
            let mut last: Option<usize> = None;
            for j in 0..nth {
                if occupied(j, k) {
                    last = Some(j);
                }
                if let Some(l) = last {
                    d[j] = (j - l) as f64 * dth;
                }
            }
            last = None;
            for j in (0..nth).rev() {
                if occupied(j, k) {
                    last = Some(j);
                }
                if let Some(l) = last {
                    d[j] = d[j].min((l - j) as f64 * dth);
                }
            }
            row_dist.push(Some(d));
        }
        let row_cos: Vec<Option<Vec<f64>>> = row_dist
            .iter()
            .map(|d| d.as_ref().map(|d| d.iter().map(|x| x.cos()).collect()))
            .collect();
        let south = row_dist[0].is_some();
        let north = row_dist[nt - 1].is_some();

        let ts = g.t();
        let window = ((r + cell) / dt).ceil() as usize + 1;
        let mut occupancy = self.occupancy.clone();
        for k in 0..nt {
            let t = ts[k];
            let (st, ct) = t.sin_cos();
            let lo = k.saturating_sub(window);
            let hi = (k + window).min(nt - 1);
            for j in 0..nth {
                let idx = g.index(j, k);
                if self.occupancy[idx] >= 1.0 {
                    continue;
                }
                // maximize the cosine of the distance; remember the direction
                let mut best_cos = -2.0;
                let mut best_dir = (1.0, 0.0);
                for kk in lo..=hi {
                    let Some(cosd) = &row_cos[kk] else { continue };
                    let (s2, c2) = ts[kk].sin_cos();
                    let c = ct * c2 + st * s2 * cosd[j];
                    if c > best_cos {
                        best_cos = c;
                        let base = row_dist[kk].as_ref().map_or(0.0, |d| d[j]);
                        let s_mid = (0.5 * (t + ts[kk])).sin();
                        best_dir = ((t - ts[kk]).abs(), s_mid * base);
                    }
                }
                if south && t.cos() > best_cos {
                    best_cos = t.cos();
                    best_dir = (1.0, 0.0);
                }
                if north && (PI - t).cos() > best_cos {
                    best_cos = (PI - t).cos();
                    best_dir = (1.0, 0.0);
                }
                if best_cos < -1.5 {
                    continue;
                }
                let d = best_cos.clamp(-1.0, 1.0).acos();
                let norm = best_dir.0.hypot(best_dir.1);
                let h = if norm > 0.0 {
                    (best_dir.0 * dt + best_dir.1 * st * dth) / norm
                } else {
                    dt
                };
                let cover = ((r - d) / h + 1.0).clamp(0.0, 1.0);
                occupancy[idx] = occupancy[idx].max(cover);
            }
        }
        Ok(Self { grid: self.grid.clone(), occupancy })
    }
}

/// `Vol(B(U, r))` for a round-base slice set with ball radii, on an
/// `n_theta × n_t` grid.
pub fn neighborhood_volume(u: &SliceSet, r: f64, n_theta: usize, n_t: usize) -> Result<f64> {
    let grid = RoundConeGrid::new(u.n, n_theta, n_t)?;
    let set = GridSet::from_slice_set(u, grid)?;
    Ok(set.dilate(r)?.volume())
}

/// Minkowski content estimate from a decreasing sequence of radii: the
/// difference quotients `(Vol(B(U, r)) − Vol(U))/r` at the last two radii,
/// extrapolated linearly to `r = 0`.
pub fn minkowski_content(u: &SliceSet, r_sequence: &[f64], n_theta: usize, n_t: usize) -> Result<f64> {
    let grid = RoundConeGrid::new(u.n, n_theta, n_t)?;
    let set = GridSet::from_slice_set(u, grid)?;
    grid_minkowski_content(&set, r_sequence)
}

/// [`minkowski_content`] for an already rasterized set.
pub fn grid_minkowski_content(set: &GridSet, r_sequence: &[f64]) -> Result<f64> {
    if r_sequence.is_empty() {
        return Err(domain("empty radius sequence"));
    }
    if r_sequence.windows(2).any(|w| w[1] >= w[0]) || r_sequence.iter().any(|r| !(*r > 0.0)) {
        return Err(domain("radius sequence must be positive and strictly decreasing"));
    }
    let base = set.volume();
    let quotient = |r: f64| -> Result<f64> { Ok((set.dilate(r)?.volume() - base) / r) };
    let last = r_sequence.len() - 1;
    let r2 = r_sequence[last];
    let q2 = quotient(r2)?;
    if last == 0 {
        return Ok(q2);
    }
    let r1 = r_sequence[last - 1];
    let q1 = quotient(r1)?;
    Ok(q2 - r2 * (q1 - q2) / (r1 - r2))
}

/// Model-side lower bound for the Minkowski content of `U`:
/// `(V/Vₙ)·Vol(∂B_U)`, with `B_U` the ball in `Sⁿ⁺¹` of volume `(Vₙ/V)·Vol(U)`.
pub fn content_lower_bound(u: &SliceSet) -> Result<f64> {
    let m = u.n + 1;
    let vn = sphere_volume(u.n)?;
    let model_volume = vn * u.normalized_volume();
    let fraction = (model_volume / sphere_volume(m)?).clamp(0.0, 1.0);
    let r = radius_for_volume(m, fraction)?;
    Ok(u.base_volume / vn * sphere_ball_area(m, r)?)
}

/// Data for the second-variation test of the slice `M × {t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityInput {
    pub t: f64,
    pub n: usize,
    /// First nonzero Laplace eigenvalue of the base normalized to `λ = n − 1`.
    pub lambda1: f64,
    /// `|II|² = n·cot²(t)`.
    pub sigma2: f64,
    /// `Ric(N, N) = n`.
    pub ricci_normal: f64,
}

impl StabilityInput {
    pub fn new(t: f64, n: usize, lambda1: f64) -> Result<Self> {
        if !(t > 0.0 && t < PI) {
            return Err(domain(format!("slice angle {t} is not in (0, π)")));
        }
        if !(lambda1 > 0.0) {
            return Err(domain(format!("lambda1 must be positive, got {lambda1}")));
        }
        let cot = t.cos() / t.sin();
        Ok(Self { t, n, lambda1, sigma2: n as f64 * cot * cot, ricci_normal: n as f64 })
    }
}

/// `λ₁(slice) − (Ric(N,N) + σ²)` with `λ₁(slice) = lambda1/sin²t`.
/// Nonnegative exactly when mean-zero first eigenfunctions do not decrease area
/// to second order.
pub fn slice_stability_margin(input: &StabilityInput) -> Result<f64> {
    let s = input.t.sin();
    if !(input.t > 0.0 && input.t < PI) {
        return Err(domain(format!("slice angle {} is not in (0, π)", input.t)));
    }
    Ok(input.lambda1 / (s * s) - (input.ricci_normal + input.sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_profile_examples() {
        assert_relative_eq!(sphere_iso_profile(2, 0.5).unwrap(), 0.5, max_relative = 1e-10);
        assert_relative_eq!(sphere_iso_profile(3, 0.5).unwrap(), 2.0 / PI, max_relative = 1e-10);
        for &b in &[0.01, 0.2, 0.37] {
            assert_relative_eq!(
                sphere_iso_profile(4, b).unwrap(),
                sphere_iso_profile(4, 1.0 - b).unwrap(),
                max_relative = 1e-9
            );
        }
        assert!(sphere_iso_profile(3, 0.0).is_err());
        assert!(sphere_iso_profile(3, 1.0).is_err());
    }

    #[test]
    fn cone_profile_matches_sphere() {
        let cone = SphericalCone::new(
            &crate::geometry::EinsteinData::einstein("s2", 2, 4.0 * PI, 1.0).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(cone_iso_profile(&cone, 0.5).unwrap(), 2.0 / PI, max_relative = 1e-10);
        assert!(cone_iso_profile(&cone, 1e-9).unwrap() < 1e-4);
    }

    #[test]
    fn suspension_examples() {
        assert_relative_eq!(suspension_distance(0.0, 0.4, 1.3).unwrap(), 0.9, max_relative = 1e-12);
        assert_relative_eq!(
            suspension_distance(1.1, PI / 2.0, PI / 2.0).unwrap(),
            1.1,
            max_relative = 1e-12
        );
        assert_relative_eq!(suspension_distance(PI, PI / 2.0, PI / 2.0).unwrap(), PI);
        // base distances beyond π are capped
        assert_relative_eq!(suspension_distance(5.0, PI / 2.0, PI / 2.0).unwrap(), PI);
        // distance to a vertex depends only on t
        assert_relative_eq!(suspension_distance(2.0, 0.0, 0.7).unwrap(), 0.7, max_relative = 1e-12);
        assert!(suspension_distance(-1.0, 0.1, 0.2).is_err());
    }

    #[test]
    fn enlarge_examples() {
        assert_relative_eq!(enlarge_ball(2, 0.3, 0.2).unwrap(), 0.5);
        assert_eq!(enlarge_ball(2, 3.0, 0.5).unwrap(), PI);
        assert!(enlarge_ball(2, 4.0, 0.5).is_err());
    }

    #[test]
    fn slice_set_validation() {
        let t = SliceSet::midpoint_grid(4);
        assert!(SliceSet::new(2, 4.0 * PI, t.clone(), vec![0.1, 1.2, 0.0, 0.0]).is_err());
        assert!(SliceSet::new(2, 4.0 * PI, vec![0.1, 0.1], vec![0.0, 0.0]).is_err());
        assert!(SliceSet::new(2, 4.0 * PI, vec![0.0, 0.1], vec![0.0, 0.0]).is_err());
        let mut s = SliceSet::new(2, 4.0 * PI, t, vec![0.5; 4]).unwrap();
        s.rho = Some(vec![0.1; 4]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn symmetrize_constant_fraction_is_tube() {
        let t = SliceSet::midpoint_grid(16);
        let u = SliceSet::new(3, 2.0 * PI * PI, t, vec![0.3; 16]).unwrap();
        let s = symmetrize_set(&u).unwrap();
        let r0 = radius_for_volume(3, 0.3).unwrap();
        for r in s.rho.unwrap() {
            assert_eq!(r, r0);
        }
    }

    #[test]
    fn symmetrize_vertex_ball_fixed() {
        let t = SliceSet::midpoint_grid(40);
        let frac: Vec<f64> = t.iter().map(|&x| if x < 1.0 { 1.0 } else { 0.0 }).collect();
        let u = SliceSet::new(2, 4.0 * PI, t, frac.clone()).unwrap();
        let s = symmetrize_set(&u).unwrap();
        assert_eq!(s.frac, frac);
        for (r, f) in s.rho.unwrap().iter().zip(&frac) {
            assert_eq!(*r, if *f == 1.0 { PI } else { 0.0 });
        }
    }

    #[test]
    fn stability_margin_examples() {
        for i in 1..50 {
            let t = PI * i as f64 / 50.0;
            let m = slice_stability_margin(&StabilityInput::new(t, 3, 3.0).unwrap()).unwrap();
            assert!(m.abs() <= 1e-12);
            let m = slice_stability_margin(&StabilityInput::new(t, 3, 3.5).unwrap()).unwrap();
            assert!(m > 0.0);
            // closed form (λ₁ − n)/sin²t
            assert_relative_eq!(m, 0.5 / t.sin().powi(2), max_relative = 1e-10);
        }
        assert_eq!(
            slice_stability_margin(&StabilityInput::new(PI / 2.0, 4, 4.0).unwrap()).unwrap(),
            0.0
        );
        assert!(StabilityInput::new(0.0, 2, 2.0).is_err());
        assert!(StabilityInput::new(1.0, 2, 0.0).is_err());
        let s = StabilityInput::new(PI / 4.0, 2, 2.0).unwrap();
        assert_relative_eq!(s.sigma2, 2.0, max_relative = 1e-12);
        assert_eq!(s.ricci_normal, 2.0);
    }

    #[test]
    fn dilation_rejects_subcell_radius() {
        let g = RoundConeGrid::new(2, 50, 50).unwrap();
        let u = GridSet::from_predicate(g, |_, t| t < 1.0);
        assert!(matches!(u.dilate(0.05), Err(Error::Resolution { .. })));
        assert!(u.dilate(0.0).is_ok());
        assert!(u.dilate(0.2).is_ok());
    }

    #[test]
    fn dilating_whole_space_changes_nothing() {
        let g = RoundConeGrid::new(2, 40, 40).unwrap();
        let all = GridSet::from_predicate(g, |_, _| true);
        assert_eq!(all.dilate(0.3).unwrap().volume(), all.volume());
    }
}
