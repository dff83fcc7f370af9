//! Independent numerical estimate of the Dirac mass at the origin.
//!
//! The function is smoothed to `ε·log(Σ exp(a_i·x/ε) + exp(−R/ε))` in the
//! log-coordinates `x_j = log|z_j|`, sampled as an honest function of `z`,
//! and its Monge-Ampère density `4ⁿ n! det(∂²u/∂z_j∂z̄_k)` is obtained from
//! Cartesian finite differences. The density is integrated over log-polar
//! boxes around the tropical vertices of the truncation, which is where all
//! of the mass of the smoothed function sits.

use num_traits::{FromPrimitive, Signed};

use super::{truncated_gradient_image, Normalization, ToricFunction};
use crate::grid::{complex_hessian_at, ma_normalization};
use crate::hermitian::{determinant, HermitianMatrix};
use crate::rational::to_f64;
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    /// Smoothing scale in log-coordinates.
    pub epsilon: f64,
    /// Truncation level `R` of the constant branch.
    pub truncation: f64,
    /// Finite-difference step relative to `|z_j|`.
    pub eta: f64,
    /// Box half-width in units of the widest transition layer.
    pub width: f64,
    /// Quadrature nodes per narrowest transition layer.
    pub points_per_layer: f64,
    pub max_nodes: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            truncation: 50.0,
            eta: 2e-5,
            width: 20.0,
            points_per_layer: 6.0,
            max_nodes: 4_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleEstimate {
    /// Total Monge-Ampère mass of the smoothed function near the origin.
    pub mass: f64,
    pub boxes: usize,
    pub nodes: usize,
}

struct LogBox {
    lo: Vec<f64>,
    step: Vec<f64>,
    count: Vec<usize>,
}

impl LogBox {
    fn hi(&self, a: usize) -> f64 {
        self.lo[a] + self.step[a] * self.count[a] as f64
    }

    fn overlaps(&self, other: &LogBox) -> bool {
        (0..self.lo.len()).all(|a| self.lo[a] < other.hi(a) && other.lo[a] < self.hi(a))
    }
}

fn soft_max(slopes: &[Vec<f64>], floor: f64, eps: f64, logs: &[f64]) -> f64 {
    let vals: Vec<f64> = slopes
        .iter()
        .map(|a| a.iter().zip(logs).map(|(ai, l)| ai * l).sum::<f64>())
        .chain(std::iter::once(-floor))
        .collect();
    let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + eps * vals.iter().map(|v| ((v - top) / eps).exp()).sum::<f64>().ln()
}

pub fn quadrature_mass(u: &ToricFunction, cfg: &OracleConfig) -> Result<OracleEstimate> {
    if !(cfg.epsilon > 0.0 && cfg.truncation > 0.0 && cfg.eta > 0.0 && cfg.points_per_layer > 0.0) {
        return Err(Error::Domain("oracle parameters must be positive".into()));
    }
    let n = u.complex_dim();
    let eps = cfg.epsilon;
    let level = Rational::from_f64(cfg.truncation).ok_or_else(|| Error::Domain("truncation is not finite".into()))?;
    let image = truncated_gradient_image(u, &level)?;

    let mut boxes: Vec<LogBox> = Vec::new();
    for v in &image.tropical_vertices {
        let mut lo = Vec::with_capacity(n);
        let mut step = Vec::with_capacity(n);
        let mut count = Vec::with_capacity(n);
        for a in 0..n {
            let mut dmin = f64::INFINITY;
            let mut dmax: f64 = 0.0;
            for (i, p) in v.slopes.iter().enumerate() {
                for q in &v.slopes[i + 1..] {
                    let d = to_f64(&(&p[a] - &q[a]).abs());
                    if d > 0.0 {
                        dmin = dmin.min(d);
                        dmax = dmax.max(d);
                    }
                }
            }
            if dmax == 0.0 {
                dmin = 1.0;
                dmax = 1.0;
            }
            let center = to_f64(&v.point[a]);
            let half = cfg.width * eps / dmin;
            let left = center - half;
            let right = (center + half).min(0.0);
            let target = eps / (dmax * cfg.points_per_layer);
            let m = ((right - left) / target).ceil().max(1.0) as usize;
            lo.push(left);
            step.push((right - left) / m as f64);
            count.push(m);
        }
        boxes.push(LogBox { lo, step, count });
    }
    for (i, b) in boxes.iter().enumerate() {
        if boxes[i + 1..].iter().any(|c| b.overlaps(c)) {
            return Err(Error::Precondition(
                "quadrature boxes overlap; reduce epsilon or width".into(),
            ));
        }
    }
    let nodes: usize = boxes.iter().map(|b| b.count.iter().product::<usize>()).sum();
    if nodes > cfg.max_nodes {
        return Err(Error::Precondition(format!(
            "{nodes} quadrature nodes exceed the limit {}",
            cfg.max_nodes
        )));
    }

    let slopes: Vec<Vec<f64>> = u.slopes().iter().map(|a| a.iter().map(to_f64).collect()).collect();
    let angles: Vec<f64> = (0..n).map(|a| 0.3 + 1.1 * a as f64).collect();
    let sampler = |p: &[f64]| {
        let logs: Vec<f64> = (0..n)
            .map(|a| 0.5 * (p[2 * a] * p[2 * a] + p[2 * a + 1] * p[2 * a + 1]).ln())
            .collect();
        soft_max(&slopes, cfg.truncation, eps, &logs)
    };
    let c_n: f64 = ma_normalization(n);
    let two_pi = 2.0 * std::f64::consts::PI;

    let mut mass = 0.0;
    let mut x = vec![0.0; n];
    let mut point = vec![0.0; 2 * n];
    let mut steps = vec![0.0; n];
    for b in &boxes {
        // Shell volume divided by Π r_j² at the log-midpoint: 2π sinh(h).
        let weight: f64 = b.step.iter().map(|&h| two_pi * h.sinh()).product();
        let total: usize = b.count.iter().product();
        for flat in 0..total {
            let mut rest = flat;
            for a in (0..n).rev() {
                let i = rest % b.count[a];
                rest /= b.count[a];
                x[a] = b.lo[a] + (i as f64 + 0.5) * b.step[a];
            }
            let r: Vec<f64> = x.iter().map(|l| l.exp()).collect();
            for a in 0..n {
                point[2 * a] = r[a] * angles[a].cos();
                point[2 * a + 1] = r[a] * angles[a].sin();
                steps[a] = cfg.eta * r[a];
            }
            let h = complex_hessian_at(sampler, &point, &steps)?;
            let scaled = HermitianMatrix::from_fn(n, |j, k| h.get(j, k) * (r[j] * r[k]))?;
            mass += c_n * determinant(&scaled) * weight;
        }
    }
    Ok(OracleEstimate {
        mass,
        boxes: boxes.len(),
        nodes,
    })
}

/// The unique normalization whose prediction for `reduced` lies within
/// relative distance `rel_tol` of the oracle mass, if exactly one does.
pub fn arbitrate(oracle_mass: f64, reduced: &Rational, n: usize, rel_tol: f64) -> Option<Normalization> {
    let v = to_f64(reduced);
    let close: Vec<Normalization> = [Normalization::Paper, Normalization::Derived]
        .into_iter()
        .filter(|m| {
            let predicted = m.factor(n) * v;
            (oracle_mass - predicted).abs() <= rel_tol * predicted.abs()
        })
        .collect();
    match close.as_slice() {
        [only] => Some(*only),
        _ => None,
    }
}
