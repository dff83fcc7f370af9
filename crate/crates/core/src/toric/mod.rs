//! Exact Monge-Ampère masses at the origin for toric plurisubharmonic
//! functions `u(z) = max_i Σ_j a_{ij} log|z_j|` with rational slopes `a_i ≥ 0`.
//!
//! Under `x_j = log|z_j|` such a function becomes the convex piecewise linear
//! function `max_i a_i·x` on the negative orthant. Truncating at `−j` adds the
//! slope `0`, and the real Monge-Ampère mass of the truncation equals the
//! Lebesgue volume of its gradient image. That image is independent of `j`:
//! it is the union of the simplices `conv({0} ∪ F)` over the compact facets
//! `F` of the Newton polyhedron `conv(slopes) + ℝⁿ₊`.

mod image;
pub mod oracle;
mod report;

use std::fmt;
use std::io::{BufRead, Write};

use num_traits::{Signed, Zero};

use crate::geometry::lp::{self, Constraint, LpOutcome, Relation};
use crate::geometry::{self, Point, MAX_POLYTOPE_DIM};
use crate::rational::{parse_rational, render_exact, to_f64};
use crate::{Error, Rational, Result};

pub use image::{gradient_image, truncated_gradient_image, GradientImage, TropicalVertex, TruncatedImage};
pub use report::{
    counterexample_family, counterexample_report, truncation_invariance_check, CounterexampleReport, InequalityCheck,
    TruncationLevel, TruncationReport, Verdict,
};

/// A positively homogeneous toric psh function, stored by its slope set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricFunction {
    complex_dim: usize,
    slopes: Vec<Point<Rational>>,
}

impl ToricFunction {
    /// Validates the slopes: nonempty, common length `n ≤ 4`, nonnegative
    /// components and pairwise distinct. Slopes are stored sorted.
    pub fn new(slopes: Vec<Point<Rational>>) -> Result<Self> {
        let n = slopes
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Domain("a toric function needs at least one slope".into()))?;
        if n == 0 {
            return Err(Error::Shape("slopes must have at least one component".into()));
        }
        if n > MAX_POLYTOPE_DIM {
            return Err(Error::Size {
                dim: n,
                max: MAX_POLYTOPE_DIM,
            });
        }
        if slopes.iter().any(|s| s.len() != n) {
            return Err(Error::Shape("slopes differ in length".into()));
        }
        if let Some(bad) = slopes.iter().find(|s| s.iter().any(Signed::is_negative)) {
            return Err(Error::Domain(format!(
                "slope {} has a negative component",
                render_point(bad)
            )));
        }
        let count = slopes.len();
        let mut sorted = slopes;
        geometry::sort_dedup(&mut sorted);
        if sorted.len() != count {
            return Err(Error::Domain("slopes must be pairwise distinct".into()));
        }
        Ok(Self {
            complex_dim: n,
            slopes: sorted,
        })
    }

    /// Like [`ToricFunction::new`] but silently merges repeated slopes.
    pub fn from_slopes_dedup(slopes: Vec<Point<Rational>>) -> Result<Self> {
        let mut s = slopes;
        geometry::sort_dedup(&mut s);
        Self::new(s)
    }

    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    pub fn slopes(&self) -> &[Point<Rational>] {
        &self.slopes
    }

    /// `c·u` for `c > 0`.
    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        Self::new(self.slopes.iter().map(|s| geometry::scale(s, c)).collect())
    }

    /// `max(u, b·log|z|)`.
    pub fn with_slope(&self, b: Point<Rational>) -> Result<Self> {
        let mut s = self.slopes.clone();
        s.push(b);
        Self::from_slopes_dedup(s)
    }

    /// `max_i a_i·x` at a point of log-coordinates.
    pub fn evaluate_log(&self, x: &[f64]) -> f64 {
        self.slopes
            .iter()
            .map(|a| a.iter().zip(x).map(|(ai, xi)| to_f64(ai) * xi).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Reads whitespace-separated rational slope vectors, one per line;
    /// `#` starts a comment.
    pub fn read_from(input: impl BufRead) -> Result<Self> {
        let mut slopes = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let slope = text
                .split_whitespace()
                .map(|tok| {
                    parse_rational(tok).ok_or_else(|| Error::Parse {
                        line: i + 1,
                        msg: format!("`{tok}` is not a rational number"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            slopes.push(slope);
        }
        Self::new(slopes)
    }

    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        for s in &self.slopes {
            writeln!(out, "{}", render_point(s))?;
        }
        Ok(())
    }
}

impl fmt::Display for ToricFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.slopes.iter().map(|s| format!("({})", render_point(s))).collect();
        write!(f, "max{{{}}}", parts.join(", "))
    }
}

pub fn render_point(p: &[Rational]) -> String {
    p.iter().map(render_exact).collect::<Vec<_>>().join(" ")
}

/// `u + v`: slopes are all pairwise sums, deduplicated.
pub fn sum(u: &ToricFunction, v: &ToricFunction) -> Result<ToricFunction> {
    if u.complex_dim != v.complex_dim {
        return Err(Error::Shape(format!(
            "cannot add functions on ℂ^{} and ℂ^{}",
            u.complex_dim, v.complex_dim
        )));
    }
    let slopes = u
        .slopes
        .iter()
        .flat_map(|a| v.slopes.iter().map(move |b| geometry::add(a, b)))
        .collect();
    ToricFunction::from_slopes_dedup(slopes)
}

/// Whether slope `i` is the strict maximizer somewhere in the open negative
/// orthant. By homogeneity it suffices to search `x ≤ −1`; with
/// `x = −1 − y, y ≥ 0` the LP maximizes the margin `t ∈ [0, 1]`.
pub fn is_active(u: &ToricFunction, i: usize) -> bool {
    let n = u.complex_dim;
    let a = &u.slopes[i];
    let mut constraints = Vec::with_capacity(u.slopes.len());
    for (j, b) in u.slopes.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = geometry::sub(b, a);
        // d·(−1 − y) + t ≤ 0
        let mut coeffs: Vec<Rational> = d.iter().map(|x| -x.clone()).collect();
        coeffs.push(Rational::from_integer(1.into()));
        let rhs = d.iter().fold(Rational::zero(), |acc, x| acc + x);
        constraints.push(Constraint::new(coeffs, Relation::Le, rhs));
    }
    let mut cap = vec![Rational::zero(); n];
    cap.push(Rational::from_integer(1.into()));
    constraints.push(Constraint::new(
        cap.clone(),
        Relation::Le,
        Rational::from_integer(1.into()),
    ));
    let mut objective = vec![Rational::zero(); n];
    objective.push(Rational::from_integer(1.into()));
    match lp::maximize(&objective, &constraints) {
        LpOutcome::Optimal { value, .. } => value.is_positive(),
        LpOutcome::Unbounded => true,
        LpOutcome::Infeasible => false,
    }
}

/// Slopes that strictly dominate somewhere in the open negative orthant.
pub fn active_slopes(u: &ToricFunction) -> Vec<Point<Rational>> {
    (0..u.slopes.len())
        .filter(|&i| is_active(u, i))
        .map(|i| u.slopes[i].clone())
        .collect()
}

/// Overall constant in front of the gradient-image volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// `(2π)ⁿ · Vol(G)`.
    Paper,
    /// `(2π)ⁿ · n! · Vol(G)`, from `MA = 4ⁿ n! det(∂∂̄u) dλ` and the
    /// logarithmic change of variables.
    Derived,
}

impl Normalization {
    pub fn factor(self, n: usize) -> f64 {
        let base = (2.0 * std::f64::consts::PI).powi(n as i32);
        match self {
            Normalization::Paper => base,
            Normalization::Derived => base * (1..=n).product::<usize>() as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Normalization::Paper => "paper",
            Normalization::Derived => "derived",
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Normalization::Paper),
            "derived" => Ok(Normalization::Derived),
            other => Err(Error::Domain(format!("unknown normalization `{other}`"))),
        }
    }
}

/// Coefficient of `δ₀` in `(ddᶜu)ⁿ` (or a mixed product).
#[derive(Clone, Debug, PartialEq)]
pub struct ToricMass {
    /// Gradient-image volume (or its polarization), exact.
    pub reduced: Rational,
    pub normalization: Normalization,
    pub value: f64,
}

impl ToricMass {
    pub fn new(reduced: Rational, normalization: Normalization, n: usize) -> Self {
        let value = normalization.factor(n) * to_f64(&reduced);
        Self {
            reduced,
            normalization,
            value,
        }
    }
}

pub fn reduced_mass(u: &ToricFunction) -> Rational {
    gradient_image(u).volume()
}

pub fn dirac_mass(u: &ToricFunction, normalization: Normalization) -> ToricMass {
    ToricMass::new(reduced_mass(u), normalization, u.complex_dim)
}

/// One subset-sum term of the polarization formula.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationTerm {
    /// Indices (into the argument list) summed in this term.
    pub subset: Vec<usize>,
    pub sign: i8,
    pub reduced: Rational,
}

fn check_mixed_args(funcs: &[&ToricFunction]) -> Result<usize> {
    let n = funcs.first().ok_or(Error::Arity { expected: 1, got: 0 })?.complex_dim;
    if funcs.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: funcs.len(),
        });
    }
    if funcs.iter().any(|f| f.complex_dim != n) {
        return Err(Error::Shape("mixed mass arguments differ in dimension".into()));
    }
    Ok(n)
}

/// Every nonempty subset sum with its sign `(−1)^{n−|S|}` and reduced mass.
pub fn polarization_terms(funcs: &[&ToricFunction]) -> Result<Vec<PolarizationTerm>> {
    let n = check_mixed_args(funcs)?;
    let mut terms = Vec::with_capacity((1 << n) - 1);
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let mut acc = funcs[subset[0]].clone();
        for &i in &subset[1..] {
            acc = sum(&acc, funcs[i])?;
        }
        let sign = if (n - subset.len()) % 2 == 0 { 1 } else { -1 };
        terms.push(PolarizationTerm {
            subset,
            sign,
            reduced: reduced_mass(&acc),
        });
    }
    Ok(terms)
}

/// Mixed mass of `ddᶜu₁ ∧ … ∧ ddᶜu_n` at the origin by measure-level
/// polarization over sum functions.
pub fn mixed_dirac_mass(funcs: &[&ToricFunction], normalization: Normalization) -> Result<ToricMass> {
    let n = check_mixed_args(funcs)?;
    let terms = polarization_terms(funcs)?;
    let total = terms.iter().fold(Rational::zero(), |acc, t| {
        if t.sign > 0 {
            acc + &t.reduced
        } else {
            acc - &t.reduced
        }
    });
    let fact = Rational::from_integer((1..=n as u64).product::<u64>().into());
    Ok(ToricMass::new(total / fact, normalization, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    pub(crate) fn u_k(k: &Rational) -> ToricFunction {
        ToricFunction::new(vec![vec![k.recip(), int(0)], vec![int(0), k * k]]).unwrap()
    }

    pub(crate) fn v_k(k: &Rational) -> ToricFunction {
        ToricFunction::new(vec![vec![k * k, int(0)], vec![int(0), k.recip()]]).unwrap()
    }

    fn slopes(pairs: &[(i64, i64, i64, i64)]) -> Vec<Point<Rational>> {
        pairs
            .iter()
            .map(|&(a, b, c, d)| vec![ratio(a, b), ratio(c, d)])
            .collect()
    }

    #[test]
    fn validation() {
        assert!(matches!(ToricFunction::new(vec![]), Err(Error::Domain(_))));
        assert!(matches!(
            ToricFunction::new(vec![vec![int(-1), int(0)]]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ToricFunction::new(vec![vec![int(1), int(0)], vec![int(1), int(0)]]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ToricFunction::new(vec![vec![int(1)], vec![int(1), int(0)]]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            ToricFunction::new(vec![vec![int(1); 5]]),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn active_slope_examples() {
        let k = int(2);
        assert_eq!(active_slopes(&u_k(&k)).len(), 2);
        let dominated = ToricFunction::new(vec![vec![int(1), int(1)], vec![int(2), int(2)]]).unwrap();
        assert_eq!(active_slopes(&dominated), vec![vec![int(1), int(1)]]);
        let s = sum(&u_k(&k), &v_k(&k)).unwrap();
        let active = active_slopes(&s);
        assert_eq!(active.len(), 3);
        assert!(!active.contains(&vec![int(4), int(4)]));
        assert!(active.contains(&vec![ratio(1, 2), ratio(1, 2)]));
    }

    #[test]
    fn sum_enumerates_pairwise_sums() {
        let k = int(2);
        let s = sum(&u_k(&k), &v_k(&k)).unwrap();
        let mut expect = slopes(&[(9, 2, 0, 1), (1, 2, 1, 2), (0, 1, 9, 2), (4, 1, 4, 1)]);
        geometry::sort_dedup(&mut expect);
        assert_eq!(s.slopes(), expect.as_slice());
        let one = ToricFunction::new(vec![vec![int(1), int(1)]]).unwrap();
        let three = ToricFunction::new(vec![vec![int(1)]]).unwrap();
        assert!(matches!(sum(&one, &three), Err(Error::Shape(_))));
    }

    #[test]
    fn sum_with_itself_doubles_the_image() {
        let u = ToricFunction::new(slopes(&[(1, 1, 0, 1), (1, 3, 1, 3), (0, 1, 2, 1)])).unwrap();
        let uu = sum(&u, &u).unwrap();
        assert!(uu.slopes().contains(&vec![int(2), int(0)]));
        assert_eq!(reduced_mass(&uu), int(4) * reduced_mass(&u));
        let g2 = gradient_image(&uu);
        let g = gradient_image(&u);
        let doubled: Vec<_> = g.vertices().iter().map(|v| geometry::scale(v, &int(2))).collect();
        assert_eq!(g2.vertices(), doubled.as_slice());
    }

    #[test]
    fn dirac_mass_examples() {
        let k = int(3);
        let m = dirac_mass(&u_k(&k), Normalization::Paper);
        assert_eq!(m.reduced, ratio(3, 2));
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!((m.value - two_pi * two_pi * 1.5).abs() < 1e-12);
        let green = ToricFunction::new(vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let m = dirac_mass(&green, Normalization::Derived);
        assert_eq!(m.reduced, ratio(1, 2));
        assert!((m.value - two_pi * two_pi).abs() < 1e-12);
        let single = ToricFunction::new(vec![vec![int(1), int(1)]]).unwrap();
        assert_eq!(dirac_mass(&single, Normalization::Derived).reduced, int(0));
        assert_eq!(dirac_mass(&single, Normalization::Derived).value, 0.0);
    }

    #[test]
    fn mixed_mass_examples() {
        let k = int(2);
        let (u, v) = (u_k(&k), v_k(&k));
        let m = mixed_dirac_mass(&[&u, &v], Normalization::Paper).unwrap();
        assert_eq!(m.reduced, ratio(1, 8));
        assert_eq!(
            mixed_dirac_mass(&[&u, &u], Normalization::Paper).unwrap().reduced,
            reduced_mass(&u)
        );
        let green = ToricFunction::new(vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let doubled = green.scaled(&int(2)).unwrap();
        // ½(Vol 3G − Vol G − Vol 2G) = ½(9/2 − 1/2 − 2) = 1
        let m = mixed_dirac_mass(&[&green, &doubled], Normalization::Derived).unwrap();
        assert_eq!(m.reduced, int(1));
        assert!(matches!(
            mixed_dirac_mass(&[&green], Normalization::Paper),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn polarization_breakdown_lists_every_subset() {
        let k = int(2);
        let (u, v) = (u_k(&k), v_k(&k));
        let terms = polarization_terms(&[&u, &v]).unwrap();
        assert_eq!(terms.len(), 3);
        let full = terms.iter().find(|t| t.subset == vec![0, 1]).unwrap();
        assert_eq!((full.sign, full.reduced.clone()), (1, ratio(9, 4)));
        assert!(terms
            .iter()
            .filter(|t| t.subset.len() == 1)
            .all(|t| t.sign == -1 && t.reduced == int(1)));
    }

    #[test]
    fn file_round_trip() {
        let text = "# u_2\n1/2 0\n0 4 # second branch\n\n";
        let u = ToricFunction::read_from(text.as_bytes()).unwrap();
        assert_eq!(u, u_k(&int(2)));
        let mut out = Vec::new();
        u.write_to(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0/1 4/1\n1/2 0/1\n");
        assert!(matches!(
            ToricFunction::read_from("1/2 x\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            ToricFunction::read_from("-1 0\n".as_bytes()),
            Err(Error::Domain(_))
        ));
    }
}
