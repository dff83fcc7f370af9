//! Finite-difference complex Hessians and Monge-Ampère densities of smooth
//! functions sampled on uniform grids over boxes in ℂⁿ ≅ ℝ²ⁿ.
//!
//! Real coordinates are ordered `x₁, y₁, …, x_n, y_n`. Only interior nodes
//! (one cell away from every face) are evaluated; there are no one-sided
//! stencils.

use std::io::{BufRead, Write};

use crate::hermitian::{self, determinant, factorial, mixed_determinant_pair, nonneg_power, HermitianMatrix};
use crate::{Error, Real, Result};

/// Minimum samples per axis.
pub const MIN_RESOLUTION: usize = 5;

/// Real samples of `u` on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    complex_dim: usize,
    lower: Vec<T>,
    spacing: T,
    resolution: usize,
    samples: Vec<T>,
}

/// Density values on the interior nodes of a [`GridFunction`]'s grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDensity<T> {
    complex_dim: usize,
    lower: Vec<T>,
    spacing: T,
    resolution: usize,
    values: Vec<T>,
}

fn node_count(real_dim: usize, resolution: usize) -> Result<usize> {
    u32::try_from(real_dim)
        .ok()
        .and_then(|d| resolution.checked_pow(d))
        .ok_or_else(|| Error::Size {
            dim: real_dim,
            max: hermitian::MAX_DIM * 2,
        })
}

fn unravel(mut index: usize, real_dim: usize, resolution: usize) -> Vec<usize> {
    let mut multi = vec![0; real_dim];
    for a in (0..real_dim).rev() {
        multi[a] = index % resolution;
        index /= resolution;
    }
    multi
}

fn ravel(multi: &[usize], resolution: usize) -> usize {
    multi.iter().fold(0, |acc, &i| acc * resolution + i)
}

impl<T: Real> GridFunction<T> {
    pub fn new(complex_dim: usize, lower: Vec<T>, spacing: T, resolution: usize, samples: Vec<T>) -> Result<Self> {
        if complex_dim == 0 {
            return Err(Error::Shape("complex dimension must be at least 1".into()));
        }
        if complex_dim > hermitian::MAX_DIM {
            return Err(Error::Size {
                dim: complex_dim,
                max: hermitian::MAX_DIM,
            });
        }
        if lower.len() != 2 * complex_dim {
            return Err(Error::Shape(format!(
                "lower corner has {} coordinates, expected {}",
                lower.len(),
                2 * complex_dim
            )));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::Shape(format!(
                "resolution {resolution} is below the minimum of {MIN_RESOLUTION}"
            )));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::Domain(format!("grid spacing {spacing} must be positive")));
        }
        let expected = node_count(2 * complex_dim, resolution)?;
        if samples.len() != expected {
            return Err(Error::Shape(format!("{} samples, expected {expected}", samples.len())));
        }
        if let Some(bad) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Domain(format!("sample {bad} is not finite")));
        }
        Ok(Self {
            complex_dim,
            lower,
            spacing,
            resolution,
            samples,
        })
    }

    /// Samples `f` at every node; `f` receives real coordinates `x₁, y₁, …`.
    pub fn from_sampler(
        complex_dim: usize,
        lower: Vec<T>,
        spacing: T,
        resolution: usize,
        f: impl Fn(&[T]) -> T,
    ) -> Result<Self> {
        let real_dim = 2 * complex_dim;
        let count = node_count(real_dim, resolution)?;
        if lower.len() != real_dim {
            return Err(Error::Shape("lower corner has the wrong length".into()));
        }
        let samples = (0..count)
            .map(|i| {
                let multi = unravel(i, real_dim, resolution);
                let x: Vec<T> = multi
                    .iter()
                    .zip(&lower)
                    .map(|(&m, &l)| l + spacing * T::lit(m as f64))
                    .collect();
                f(&x)
            })
            .collect();
        Self::new(complex_dim, lower, spacing, resolution, samples)
    }

    /// Samples `f` on the cube `[lo, hi]^{2n}` with `resolution` nodes per axis.
    pub fn on_cube(complex_dim: usize, lo: T, hi: T, resolution: usize, f: impl Fn(&[T]) -> T) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::Shape("resolution must be at least 2".into()));
        }
        let spacing = (hi - lo) / T::lit((resolution - 1) as f64);
        Self::from_sampler(complex_dim, vec![lo; 2 * complex_dim], spacing, resolution, f)
    }

    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    pub fn real_dim(&self) -> usize {
        2 * self.complex_dim
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> Vec<T> {
        let span = self.spacing * T::lit((self.resolution - 1) as f64);
        self.lower.iter().map(|&l| l + span).collect()
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn coordinates(&self, node: &[usize]) -> Vec<T> {
        node.iter()
            .zip(&self.lower)
            .map(|(&m, &l)| l + self.spacing * T::lit(m as f64))
            .collect()
    }

    pub fn value(&self, node: &[usize]) -> T {
        self.samples[ravel(node, self.resolution)]
    }

    fn same_geometry(&self, other: &Self) -> bool {
        self.complex_dim == other.complex_dim
            && self.resolution == other.resolution
            && self.spacing == other.spacing
            && self.lower == other.lower
    }

    fn require_same_geometry(&self, other: &Self) -> Result<()> {
        if self.same_geometry(other) {
            Ok(())
        } else {
            Err(Error::Shape("grid functions have different geometry".into()))
        }
    }

    /// Nodewise sum; the samples are added, never re-evaluated.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.require_same_geometry(other)?;
        Ok(Self {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| *a + *b).collect(),
            ..self.clone()
        })
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&s| s * c).collect(),
            ..self.clone()
        }
    }

    /// Interior node multi-indices in row-major order.
    pub fn interior_nodes(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let inner = self.resolution - 2;
        let real_dim = self.real_dim();
        (0..inner.pow(real_dim as u32)).map(move |i| unravel(i, real_dim, inner).into_iter().map(|m| m + 1).collect())
    }

    /// Central-difference complex Hessian at an interior node.
    pub fn complex_hessian(&self, node: &[usize]) -> Result<HermitianMatrix<T>> {
        if node.len() != self.real_dim() {
            return Err(Error::Shape("node index has the wrong length".into()));
        }
        if node.iter().any(|&m| m == 0 || m + 1 >= self.resolution) {
            return Err(Error::Margin(node.to_vec()));
        }
        let res = self.resolution;
        let eval = |offset: &[i8]| {
            let mut idx = 0;
            for (a, &o) in offset.iter().enumerate() {
                idx = idx * res + (node[a] as isize + o as isize) as usize;
            }
            self.samples[idx]
        };
        stencil_hessian(self.complex_dim, eval, &vec![self.spacing; self.real_dim()])
    }

    fn interior_density(&self, values: Vec<T>) -> GridDensity<T> {
        GridDensity {
            complex_dim: self.complex_dim,
            lower: self.lower.iter().map(|&l| l + self.spacing).collect(),
            spacing: self.spacing,
            resolution: self.resolution - 2,
            values,
        }
    }

    /// Writes the text grid format: a header, then `values` and one decimal
    /// per line in row-major order (last axis fastest).
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "complex_dim {}", self.complex_dim)?;
        writeln!(out, "lower {}", join(&self.lower))?;
        writeln!(out, "upper {}", join(&self.upper()))?;
        writeln!(out, "resolution {}", self.resolution)?;
        writeln!(out, "values")?;
        for s in &self.samples {
            writeln!(out, "{s}")?;
        }
        Ok(())
    }

    pub fn read_from(input: impl BufRead) -> Result<Self> {
        let mut complex_dim = None;
        let mut lower: Option<Vec<T>> = None;
        let mut upper: Option<Vec<T>> = None;
        let mut resolution = None;
        let mut samples = Vec::new();
        let mut in_values = false;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            if in_values {
                samples.push(parse_real(text, lineno)?);
                continue;
            }
            let mut parts = text.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            match key {
                "complex_dim" => complex_dim = Some(parse_usize(&rest, lineno)?),
                "resolution" => resolution = Some(parse_usize(&rest, lineno)?),
                "lower" => lower = Some(rest.iter().map(|s| parse_real(s, lineno)).collect::<Result<_>>()?),
                "upper" => upper = Some(rest.iter().map(|s| parse_real(s, lineno)).collect::<Result<_>>()?),
                "values" => in_values = true,
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("unknown header key `{other}`"),
                    })
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing `{what}` header"),
        };
        let complex_dim = complex_dim.ok_or_else(|| missing("complex_dim"))?;
        let lower = lower.ok_or_else(|| missing("lower"))?;
        let upper = upper.ok_or_else(|| missing("upper"))?;
        let resolution = resolution.ok_or_else(|| missing("resolution"))?;
        if !in_values {
            return Err(missing("values"));
        }
        if lower.len() != upper.len() || resolution < 2 {
            return Err(Error::Shape("box corners disagree in length".into()));
        }
        let steps: Vec<T> = lower
            .iter()
            .zip(&upper)
            .map(|(&l, &u)| (u - l) / T::lit((resolution - 1) as f64))
            .collect();
        let spacing = steps[0];
        let rel = T::lit(1e-9);
        if steps.iter().any(|&h| (h - spacing).abs() > rel * spacing.abs()) {
            return Err(Error::Shape("grid spacing differs between axes".into()));
        }
        Self::new(complex_dim, lower, spacing, resolution, samples)
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_real<T: Real>(s: &str, line: usize) -> Result<T> {
    s.parse::<f64>().ok().and_then(T::from_f64).ok_or_else(|| Error::Parse {
        line,
        msg: format!("`{s}` is not a number"),
    })
}

fn parse_usize(rest: &[&str], line: usize) -> Result<usize> {
    match rest {
        [one] => one.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("`{one}` is not a non-negative integer"),
        }),
        _ => Err(Error::Parse {
            line,
            msg: "expected exactly one integer".into(),
        }),
    }
}

impl<T: Real> GridDensity<T> {
    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    /// Coordinates of the `i`-th stored value.
    pub fn coordinates(&self, i: usize) -> Vec<T> {
        unravel(i, 2 * self.complex_dim, self.resolution)
            .iter()
            .zip(&self.lower)
            .map(|(&m, &l)| l + self.spacing * T::lit(m as f64))
            .collect()
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    /// Builds a density on the interior of `u`'s grid from a pointwise formula.
    pub fn sample_interior(u: &GridFunction<T>, f: impl Fn(&[T]) -> T) -> Self {
        let values = u.interior_nodes().map(|node| f(&u.coordinates(&node))).collect();
        u.interior_density(values)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    fn matches(&self, u: &GridFunction<T>) -> bool {
        let spacing_ok = (self.spacing - u.spacing).abs() <= T::epsilon() * T::lit(16.0) * u.spacing;
        let lower_ok = self
            .lower
            .iter()
            .zip(&u.lower)
            .all(|(&a, &b)| (a - (b + u.spacing)).abs() <= T::epsilon() * T::lit(16.0) * (T::one() + b.abs()));
        self.complex_dim == u.complex_dim && self.resolution + 2 == u.resolution && spacing_ok && lower_ok
    }
}

/// Complex Hessian from a central-difference stencil.
///
/// `eval(offset)` returns the function at the point displaced by
/// `offset[a] · steps[a]` along real axis `a`; offsets are in `{−1, 0, 1}`.
/// On-diagonal second derivatives use the 3-point stencil and cross
/// derivatives the symmetric 4-point stencil.
pub fn stencil_hessian<T: Real>(
    complex_dim: usize,
    eval: impl Fn(&[i8]) -> T,
    steps: &[T],
) -> Result<HermitianMatrix<T>> {
    let m = 2 * complex_dim;
    if steps.len() != m {
        return Err(Error::Shape("one step per real axis is required".into()));
    }
    let mut offset = vec![0i8; m];
    let center = eval(&offset);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let mut real = vec![T::zero(); m * m];
    for a in 0..m {
        offset[a] = 1;
        let plus = eval(&offset);
        offset[a] = -1;
        let minus = eval(&offset);
        offset[a] = 0;
        real[a * m + a] = (plus - two * center + minus) / (steps[a] * steps[a]);
        for b in a + 1..m {
            let mut corner = |sa: i8, sb: i8| {
                offset[a] = sa;
                offset[b] = sb;
                let v = eval(&offset);
                offset[a] = 0;
                offset[b] = 0;
                v
            };
            let d = (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (four * steps[a] * steps[b]);
            real[a * m + b] = d;
            real[b * m + a] = d;
        }
    }
    let quarter = T::lit(0.25);
    HermitianMatrix::from_fn(complex_dim, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        let re = real[xj * m + xk] + real[yj * m + yk];
        let im = real[xj * m + yk] - real[yj * m + xk];
        num_complex::Complex::new(re * quarter, im * quarter)
    })
}

/// Complex Hessian of a pointwise sampler at `point`, with step `steps[j]`
/// on both real axes of the complex coordinate `z_j`.
pub fn complex_hessian_at<T: Real>(f: impl Fn(&[T]) -> T, point: &[T], steps: &[T]) -> Result<HermitianMatrix<T>> {
    let n = steps.len();
    if point.len() != 2 * n {
        return Err(Error::Shape("point and steps disagree in dimension".into()));
    }
    let real_steps: Vec<T> = steps.iter().flat_map(|&h| [h, h]).collect();
    let eval = |offset: &[i8]| {
        let x: Vec<T> = point
            .iter()
            .zip(offset)
            .zip(&real_steps)
            .map(|((&p, &o), &h)| p + h * T::lit(o as f64))
            .collect();
        f(&x)
    };
    stencil_hessian(n, eval, &real_steps)
}

/// `4ⁿ·n!`, the factor between `det(∂²u/∂z_j∂z̄_k)` and the density of `(ddᶜu)ⁿ`.
pub fn ma_normalization<T: Real>(n: usize) -> T {
    T::lit(4.0).powi(n as i32) * factorial::<T>(n)
}

/// Monge-Ampère density `4ⁿ n! det(H_u)` at every interior node.
pub fn ma_density<T: Real>(u: &GridFunction<T>) -> Result<GridDensity<T>> {
    let c = ma_normalization::<T>(u.complex_dim);
    let values = u
        .interior_nodes()
        .map(|node| u.complex_hessian(&node).map(|h| c * determinant(&h)))
        .collect::<Result<_>>()?;
    Ok(u.interior_density(values))
}

/// Density of `(ddᶜu)^k ∧ (ddᶜv)^{n−k}`.
pub fn mixed_ma_density<T: Real>(u: &GridFunction<T>, v: &GridFunction<T>, k: usize) -> Result<GridDensity<T>> {
    u.require_same_geometry(v)?;
    let n = u.complex_dim;
    if k > n {
        return Err(Error::Precondition(format!("k = {k} exceeds n = {n}")));
    }
    let c = ma_normalization::<T>(n);
    let values = u
        .interior_nodes()
        .map(|node| {
            let hu = u.complex_hessian(&node)?;
            let hv = v.complex_hessian(&node)?;
            Ok(c * mixed_determinant_pair(&hu, &hv, k)?)
        })
        .collect::<Result<_>>()?;
    Ok(u.interior_density(values))
}

/// Interior nodes whose complex Hessian fails the PSD test at `tol`.
pub fn psh_violation_count<T: Real>(u: &GridFunction<T>, tol: T) -> usize {
    u.interior_nodes()
        .filter(|node| {
            u.complex_hessian(node)
                .map(|h| !hermitian::is_psd(&h, tol))
                .unwrap_or(true)
        })
        .count()
}

/// Outcome of a nodewise check of the mixed and Minkowski inequalities.
#[derive(Clone, Debug)]
pub struct Theorem1Report<T> {
    pub k: usize,
    pub tol: T,
    /// `mixed_ma_density − f^{k/n} g^{(n−k)/n}` per interior node.
    pub mixed_gaps: Vec<T>,
    /// `ma_density(u+v) − (f^{1/n} + g^{1/n})ⁿ` per interior node.
    pub minkowski_gaps: Vec<T>,
    pub min_mixed_gap: T,
    pub min_minkowski_gap: T,
    pub mixed_violations: usize,
    pub minkowski_violations: usize,
    /// Nodes where `ma_density(u) < f − tol_node`.
    pub hypothesis_u_failures: usize,
    pub hypothesis_v_failures: usize,
    /// Nodes where `f` or `g` is negative.
    pub negative_density_nodes: usize,
}

impl<T: Real> Theorem1Report<T> {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypothesis_u_failures == 0 && self.hypothesis_v_failures == 0 && self.negative_density_nodes == 0
    }

    pub fn inequalities_hold(&self) -> bool {
        self.mixed_violations == 0 && self.minkowski_violations == 0
    }
}

/// Checks both pointwise inequalities at every interior node.
///
/// The tolerance at a node is `tol · (1 + |f| + |g|)`. Hypothesis failures are
/// counted in the report rather than returned as errors.
pub fn check_theorem1<T: Real>(
    u: &GridFunction<T>,
    v: &GridFunction<T>,
    f: &GridDensity<T>,
    g: &GridDensity<T>,
    k: usize,
    tol: T,
) -> Result<Theorem1Report<T>> {
    u.require_same_geometry(v)?;
    if !f.matches(u) || !g.matches(u) {
        return Err(Error::Shape("densities do not match the grid interior".into()));
    }
    let n = u.complex_dim;
    let ma_u = ma_density(u)?;
    let ma_v = ma_density(v)?;
    let mixed = mixed_ma_density(u, v, k)?;
    let ma_sum = ma_density(&u.try_add(v)?)?;
    let mut report = Theorem1Report {
        k,
        tol,
        mixed_gaps: Vec::with_capacity(f.values.len()),
        minkowski_gaps: Vec::with_capacity(f.values.len()),
        min_mixed_gap: T::infinity(),
        min_minkowski_gap: T::infinity(),
        mixed_violations: 0,
        minkowski_violations: 0,
        hypothesis_u_failures: 0,
        hypothesis_v_failures: 0,
        negative_density_nodes: 0,
    };
    for i in 0..f.values.len() {
        let (fi, gi) = (f.values[i], g.values[i]);
        let tol_node = tol * (T::one() + fi.abs() + gi.abs());
        if fi < T::zero() || gi < T::zero() {
            report.negative_density_nodes += 1;
        }
        if ma_u.values[i] < fi - tol_node {
            report.hypothesis_u_failures += 1;
        }
        if ma_v.values[i] < gi - tol_node {
            report.hypothesis_v_failures += 1;
        }
        let mixed_gap = mixed.values[i] - nonneg_power(fi, k, n) * nonneg_power(gi, n - k, n);
        let root_sum = nonneg_power(fi, 1, n) + nonneg_power(gi, 1, n);
        let minkowski_gap = ma_sum.values[i] - root_sum.powi(n as i32);
        if mixed_gap < -tol_node {
            report.mixed_violations += 1;
        }
        if minkowski_gap < -tol_node {
            report.minkowski_violations += 1;
        }
        report.min_mixed_gap = report.min_mixed_gap.min(mixed_gap);
        report.min_minkowski_gap = report.min_minkowski_gap.min(minkowski_gap);
        report.mixed_gaps.push(mixed_gap);
        report.minkowski_gaps.push(minkowski_gap);
    }
    Ok(report)
}
