//! Midpoint grid on the cone over the round sphere `Sⁿ`, in
//! (base colatitude `θ`, cone angle `t`) coordinates.
//!
//! Sets and functions on this grid are axisymmetric about a fixed base point
//! `E` (θ = 0). Cell measures are exact integrals of the cone volume form,
//! so they sum to `V_{n+1}`.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::geometry::{sin_power_integral, sphere_volume};

#[derive(Debug, Clone, PartialEq)]
pub struct RoundConeGrid {
    n: usize,
    n_theta: usize,
    n_t: usize,
    theta: Vec<f64>,
    t: Vec<f64>,
    theta_edges: Vec<f64>,
    t_edges: Vec<f64>,
    theta_measure: Vec<f64>,
    t_weight: Vec<f64>,
}

fn uniform_edges(cells: usize) -> Vec<f64> {
    (0..=cells).map(|i| PI * i as f64 / cells as f64).collect()
}

impl RoundConeGrid {
    /// `n` is the base sphere dimension; the cone is the round `Sⁿ⁺¹`.
    pub fn new(n: usize, n_theta: usize, n_t: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("base dimension must be >= 2, got {n}")));
        }
        if n_theta < 2 || n_t < 2 {
            return Err(domain(format!("grid needs at least 2x2 cells, got {n_theta}x{n_t}")));
        }
        let theta_edges = uniform_edges(n_theta);
        let t_edges = uniform_edges(n_t);
        let centers = |e: &[f64]| e.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect::<Vec<_>>();
        let slice_sphere = sphere_volume(n - 1)?;
        let theta_measure = theta_edges
            .windows(2)
            .map(|w| slice_sphere * (sin_power_integral(n - 1, w[1]) - sin_power_integral(n - 1, w[0])))
            .collect();
        let t_weight = t_edges
            .windows(2)
            .map(|w| sin_power_integral(n, w[1]) - sin_power_integral(n, w[0]))
            .collect();
        Ok(Self {
            n,
            n_theta,
            n_t,
            theta: centers(&theta_edges),
            t: centers(&t_edges),
            theta_edges,
            t_edges,
            theta_measure,
            t_weight,
        })
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn d_theta(&self) -> f64 {
        PI / self.n_theta as f64
    }

    pub fn d_t(&self) -> f64 {
        PI / self.n_t as f64
    }

    /// Row-major index: one row per `t` slice.
    pub fn index(&self, j_theta: usize, k_t: usize) -> usize {
        k_t * self.n_theta + j_theta
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn theta_edges(&self) -> &[f64] {
        &self.theta_edges
    }

    pub fn t_edges(&self) -> &[f64] {
        &self.t_edges
    }

    /// Measure of the base-sphere band of column `j` (sums to `Vₙ`).
    pub fn theta_measure(&self) -> &[f64] {
        &self.theta_measure
    }

    /// `∫ sinⁿ t dt` over row `k` (sums to `V_{n+1}/Vₙ`).
    pub fn t_weight(&self) -> &[f64] {
        &self.t_weight
    }

    pub fn cell_measure(&self, j_theta: usize, k_t: usize) -> f64 {
        self.theta_measure[j_theta] * self.t_weight[k_t]
    }

    /// Base-sphere measure of the geodesic ball of radius `rho` about `E`,
    /// accumulated over the θ columns with a linear partial last column.
    pub fn cap_measure(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let x = (rho / self.d_theta()).min(self.n_theta as f64);
        let full = x.floor() as usize;
        let mut m: f64 = self.theta_measure[..full].iter().sum();
        if full < self.n_theta {
            m += (x - full as f64) * self.theta_measure[full];
        }
        m
    }

    /// Evaluate `f(θ, t)` at every cell center, in grid order.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for &t in &self.t {
            for &th in &self.theta {
                out.push(f(th, t));
            }
        }
        out
    }
}
