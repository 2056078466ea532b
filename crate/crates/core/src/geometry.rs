//! Sphere constants, spherical-cone curvature and volumes, and the conformal
//! identification of the punctured cone with `M × ℝ`.
//!
//! The spherical cone over a closed manifold `(Mⁿ, g)` is `M × [0, π]` with
//! both ends collapsed to vertices and metric `sin²(t)·g + dt²`. It is only a
//! Riemannian metric away from the vertices, so every `t`-dependent
//! operation here rejects `t ∈ {0, π}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{adaptive_simpson, invert_nondecreasing};

/// Above this power the reduction recursion for `∫ sinⁿ` is replaced by quadrature.
const RECURSION_MAX_POWER: usize = 256;

/// Γ(k/2) for a positive integer `k`, built from Γ(1) = 1 and Γ(1/2) = √π.
fn gamma_half_integer(k: usize) -> f64 {
    debug_assert!(k >= 1);
    let (mut x, mut g) = if k % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = k as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume of the unit round sphere `Sⁿ`, `2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_volume(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(domain(format!("sphere_volume needs n >= 1, got {n}")));
    }
    Ok(2.0 * PI.powf((n + 1) as f64 / 2.0) / gamma_half_integer(n + 1))
}

/// Yamabe constant of the round sphere, `Yₙ = n(n−1)·Vₙ^{2/n}`.
pub fn sphere_yamabe(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("sphere_yamabe needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(nf * (nf - 1.0) * sphere_volume(n)?.powf(2.0 / nf))
}

/// Coefficient of the gradient term in the conformal Laplacian, `4(m−1)/(m−2)`.
pub fn conformal_coefficient(m: usize) -> Result<f64> {
    if m < 3 {
        return Err(domain(format!("conformal coefficient needs dimension >= 3, got {m}")));
    }
    let mf = m as f64;
    Ok(4.0 * (mf - 1.0) / (mf - 2.0))
}

/// Critical Sobolev exponent `2m/(m−2)`.
pub fn critical_exponent(m: usize) -> Result<f64> {
    if m < 3 {
        return Err(domain(format!("critical exponent needs dimension >= 3, got {m}")));
    }
    let mf = m as f64;
    Ok(2.0 * mf / (mf - 2.0))
}

/// The constants attached to a round sphere of dimension `n ≥ 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereConstants {
    pub n: usize,
    pub volume: f64,
    pub yamabe: f64,
    pub a: f64,
    pub p: f64,
}

impl SphereConstants {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            n,
            volume: sphere_volume(n)?,
            yamabe: sphere_yamabe(n)?,
            a: conformal_coefficient(n)?,
            p: critical_exponent(n)?,
        })
    }
}

/// `∫₀^r sinⁿ(t) dt` by the reduction formula
/// `Iₙ = −sinⁿ⁻¹(r)cos(r)/n + (n−1)/n·Iₙ₋₂`, falling back to adaptive
/// quadrature for very large powers.
pub fn sin_power_integral(n: usize, r: f64) -> f64 {
    if n > RECURSION_MAX_POWER {
        return sin_power_integral_quadrature(n, r);
    }
    let (s, c) = r.sin_cos();
    let (mut prev, mut k) = if n % 2 == 0 { (r, 0) } else { (1.0 - c, 1) };
    let mut s_pow = if n % 2 == 0 { s } else { s * s }; // sin^{k+1}
    while k < n {
        k += 2;
        let kf = k as f64;
        prev = -s_pow * c / kf + (kf - 1.0) / kf * prev;
        s_pow *= s * s;
    }
    prev
}

/// Quadrature route for `∫₀^r sinⁿ(t) dt`; kept as an independent check of the recursion.
pub fn sin_power_integral_quadrature(n: usize, r: f64) -> f64 {
    let f = |t: f64| t.sin().powi(n as i32);
    // split at π/2 so each piece is monotone
    if r <= PI / 2.0 {
        adaptive_simpson(&f, 0.0, r, 1e-14)
    } else {
        adaptive_simpson(&f, 0.0, PI / 2.0, 1e-14) + adaptive_simpson(&f, PI / 2.0, r, 1e-14)
    }
}

fn check_interior(t: f64, what: &str) -> Result<()> {
    if t > 0.0 && t < PI {
        Ok(())
    } else {
        Err(domain(format!("{what}: t = {t} is not in the open interval (0, π)")))
    }
}

/// A closed base manifold reduced to the data the cone constructions use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EinsteinData {
    pub name: String,
    pub n: usize,
    pub volume: f64,
    /// Ricci lower bound; the Einstein constant when `einstein` is set.
    pub lambda: f64,
    pub scalar: f64,
    pub einstein: bool,
}

impl EinsteinData {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        volume: f64,
        lambda: f64,
        scalar: f64,
        einstein: bool,
    ) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("base dimension must be >= 2, got {n}")));
        }
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(domain(format!("base volume must be positive, got {volume}")));
        }
        if !lambda.is_finite() || !scalar.is_finite() {
            return Err(domain("curvature data must be finite"));
        }
        if einstein && (scalar - n as f64 * lambda).abs() > 1e-12 * scalar.abs().max(1.0) {
            return Err(domain(format!(
                "Einstein data needs s = n·λ, got s = {scalar}, n·λ = {}",
                n as f64 * lambda
            )));
        }
        Ok(Self { name: name.into(), n, volume, lambda, scalar, einstein })
    }

    /// Einstein data with `Ricci = λ·g`, so `s = n·λ`.
    pub fn einstein(name: impl Into<String>, n: usize, volume: f64, lambda: f64) -> Result<Self> {
        Self::new(name, n, volume, lambda, n as f64 * lambda, true)
    }

    /// The unit round sphere `Sⁿ`.
    pub fn round_sphere(n: usize) -> Result<Self> {
        Self::einstein(format!("sphere:{n}"), n, sphere_volume(n)?, n as f64 - 1.0)
    }

    /// Rescale `g ↦ c·g` so that the Ricci bound becomes `target`:
    /// `c = λ/target`, `V ↦ c^{n/2}·V`, `s ↦ s/c`.
    pub fn rescaled_to(&self, target: f64) -> Result<Self> {
        if !(self.lambda > 0.0) || !(target > 0.0) {
            return Err(domain(format!(
                "rescaling needs positive Ricci bounds, got λ = {} → {target}",
                self.lambda
            )));
        }
        let c = self.lambda / target;
        Ok(Self {
            name: self.name.clone(),
            n: self.n,
            volume: c.powf(self.n as f64 / 2.0) * self.volume,
            lambda: target,
            scalar: self.scalar / c,
            einstein: self.einstein,
        })
    }

    /// Rescale to the cone normalization `λ = n − 1`.
    pub fn normalized(&self) -> Result<Self> {
        self.rescaled_to(self.n as f64 - 1.0)
    }

    /// Amount by which the normalized volume exceeds `Vₙ` (Bishop), if it does.
    /// This is reported as a warning, never as an error.
    pub fn bishop_excess(&self) -> Result<Option<f64>> {
        let v = self.normalized()?.volume;
        let vn = sphere_volume(self.n)?;
        Ok((v > vn * (1.0 + 1e-12)).then_some(v - vn))
    }
}

/// The `(n+1)`-dimensional spherical cone `sin²(t)·g + dt²`, `t ∈ (0, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalCone {
    base: EinsteinData,
}

impl SphericalCone {
    /// Builds the cone over `base`, normalizing it to `λ = n − 1`.
    pub fn new(base: &EinsteinData) -> Result<Self> {
        Ok(Self { base: base.normalized()? })
    }

    /// Cone over the unit round sphere, i.e. the round `Sⁿ⁺¹` with vertices marked.
    pub fn round(n: usize) -> Result<Self> {
        Self::new(&EinsteinData::round_sphere(n)?)
    }

    pub fn base(&self) -> &EinsteinData {
        &self.base
    }

    pub fn base_dim(&self) -> usize {
        self.base.n
    }

    pub fn dim(&self) -> usize {
        self.base.n + 1
    }

    pub fn base_volume(&self) -> f64 {
        self.base.volume
    }

    pub fn total_volume(&self) -> f64 {
        self.base.volume * sin_power_integral(self.base.n, PI)
    }

    /// Volume of the geodesic ball of radius `r` about the vertex `t = 0`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        cone_ball_volume(self, r)
    }

    pub fn ball_area(&self, r: f64) -> Result<f64> {
        cone_ball_area(self, r)
    }

    /// Smallest vertex-ball radius enclosing volume `vol`.
    pub fn ball_radius(&self, vol: f64) -> Result<f64> {
        let total = self.total_volume();
        if !(0.0..=total * (1.0 + 1e-12)).contains(&vol) {
            return Err(domain(format!("volume {vol} outside [0, {total}]")));
        }
        Ok(ball_radius_for_integral(self.base.n, vol / self.base.volume))
    }
}

/// Radius `r` with `∫₀^r sinⁿ = target`, bisection to 1e−13.
pub(crate) fn ball_radius_for_integral(n: usize, target: f64) -> f64 {
    invert_nondecreasing(|r| sin_power_integral(n, r), target, 0.0, PI, 1e-13)
}

/// Sectional curvatures of the cone at angle `t` over a base plane of curvature
/// `k_base`: `((k_base − cos²t)/sin²t, 1)` for the tangential and radial planes.
pub fn cone_sectional(k_base: f64, t: f64) -> Result<(f64, f64)> {
    check_interior(t, "cone_sectional")?;
    // k − cos²t = (k − 1) + sin²t, which avoids cancellation near the vertices
    let s = t.sin();
    Ok(((k_base - 1.0) / (s * s) + 1.0, 1.0))
}

/// Ricci eigenvalues of the cone in a `𝐠`-orthonormal frame from the base's
/// eigenvalues in a `g`-orthonormal frame. The last entry is the radial one,
/// always `n`; mixed radial/tangential terms vanish.
pub fn cone_ricci(ricci_eigen_base: &[f64], t: f64) -> Result<Vec<f64>> {
    check_interior(t, "cone_ricci")?;
    let n = ricci_eigen_base.len();
    if n < 2 {
        return Err(domain(format!("need at least 2 base eigenvalues, got {n}")));
    }
    // (r − (n−1)cos²t + sin²t)/sin²t, rearranged as below
    let s2 = t.sin().powi(2);
    let nm1 = n as f64 - 1.0;
    let mut out: Vec<f64> = ricci_eigen_base
        .iter()
        .map(|&r| (r - nm1) / s2 + n as f64)
        .collect();
    out.push(n as f64);
    Ok(out)
}

/// `V·∫₀^r sinⁿ(t) dt`.
pub fn cone_ball_volume(cone: &SphericalCone, r: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&r) {
        return Err(domain(format!("ball radius {r} outside [0, π]")));
    }
    Ok(cone.base.volume * sin_power_integral(cone.base.n, r))
}

/// `sinⁿ(r)·V`; zero at the vertices.
pub fn cone_ball_area(cone: &SphericalCone, r: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&r) {
        return Err(domain(format!("ball radius {r} outside [0, π]")));
    }
    if r == 0.0 || r == PI {
        return Ok(0.0);
    }
    Ok(r.sin().powi(cone.base.n as i32) * cone.base.volume)
}

/// The diffeomorphism `(0, π) → ℝ` carrying the cone coordinate to the line
/// coordinate, `arccosh(1/sin t)` on `[π/2, π)` extended oddly about `π/2`.
///
/// Evaluated as `artanh(−cos t)`, which equals the arccosh form on
/// `[π/2, π)` and is odd about `π/2` without cancellation near the equator.
pub fn conformal_map_h0(t: f64) -> Result<f64> {
    check_interior(t, "conformal_map_h0")?;
    Ok((-t.cos()).atanh())
}

/// `h₀′(t) = 1/sin t`.
pub fn conformal_map_h0_derivative(t: f64) -> Result<f64> {
    check_interior(t, "conformal_map_h0_derivative")?;
    Ok(1.0 / t.sin())
}

/// Inverse of [`conformal_map_h0`]: `t = arccos(−tanh u)`.
pub fn conformal_map_h0_inverse(u: f64) -> f64 {
    (-u.tanh()).acos()
}

/// `cosh⁻²(u)`, the factor with `H*(f₀·(g + du²)) = sin²(t)·g + dt²`.
pub fn conformal_factor_f0(u: f64) -> f64 {
    let c = u.cosh();
    if c.is_infinite() {
        0.0
    } else {
        1.0 / (c * c)
    }
}
