use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{
    gradient_image, mixed_dirac_mass, reduced_mass, sum, truncated_gradient_image, Normalization, ToricFunction,
};
use crate::geometry::Point;
use crate::rational::{cmp_sum_of_roots_squared, exact_root, int, to_f64};
use crate::{Error, Rational, Result};

/// One truncation level compared against the `j`-free gradient image.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationLevel {
    pub level: Rational,
    pub volume: Rational,
    pub vertices: Vec<Point<Rational>>,
    pub tropical_vertices: usize,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationReport {
    pub volume: Rational,
    /// Vertices of the full-dimensional cells of the level-free image.
    pub vertices: Vec<Point<Rational>>,
    pub levels: Vec<TruncationLevel>,
    /// Every level reproduces the volume and the cell vertices.
    pub invariant: bool,
    /// The Dirac mass at 0 is nonnegative (the right-hand side there is 0).
    pub inequality_holds: bool,
}

/// Recomputes the gradient image at each truncation level via tropical
/// vertices and compares it with the level-free construction.
pub fn truncation_invariance_check(u: &ToricFunction, levels: &[Rational]) -> Result<TruncationReport> {
    let g = gradient_image(u);
    let mut out = Vec::with_capacity(levels.len());
    for j in levels {
        let t = truncated_gradient_image(u, j)?;
        let same_vertices = t.vertices == g.cell_vertices();
        out.push(TruncationLevel {
            level: j.clone(),
            matches: t.volume == g.volume() && same_vertices,
            volume: t.volume,
            vertices: t.vertices,
            tropical_vertices: t.tropical_vertices.len(),
        });
    }
    Ok(TruncationReport {
        invariant: out.iter().all(|l| l.matches),
        inequality_holds: !g.volume().is_negative(),
        volume: g.volume(),
        vertices: g.cell_vertices(),
        levels: out,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "NOT VIOLATED",
            Verdict::Violated => "VIOLATED",
        })
    }
}

/// `lhs ≥ rhs`, decided exactly; `rhs_exact` is set when it is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCheck {
    pub lhs: Rational,
    pub rhs_exact: Option<Rational>,
    pub rhs_approx: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub k: Rational,
    /// Reduced masses of `u_k`, `v_k`, `u_k + v_k` and the mixed product.
    pub m_u: Rational,
    pub m_v: Rational,
    pub m_sum: Rational,
    pub m_mixed: Rational,
    /// `(k/2, k/2, k + 1/k², 1/(2k²))`, valid for `k ≥ 1` only.
    pub closed_forms: Option<[Rational; 4]>,
    /// `m_mixed ≥ (m_u·m_v)^{1/2}`.
    pub mixed: InequalityCheck,
    /// `m_sum ≥ (m_u^{1/2} + m_v^{1/2})²`.
    pub sum: InequalityCheck,
    pub note: Option<String>,
}

impl CounterexampleReport {
    pub fn closed_forms_match(&self) -> Option<bool> {
        self.closed_forms
            .as_ref()
            .map(|[a, b, c, d]| *a == self.m_u && *b == self.m_v && *c == self.m_sum && *d == self.m_mixed)
    }

    pub fn normalized(&self, normalization: Normalization) -> [f64; 4] {
        let c = normalization.factor(2);
        [&self.m_u, &self.m_v, &self.m_sum, &self.m_mixed].map(|m| c * to_f64(m))
    }
}

/// `u_k = max{(1/k) log|z₁|, k² log|z₂|}` and `v_k = max{k² log|z₁|, (1/k) log|z₂|}`.
pub fn counterexample_family(k: &Rational) -> Result<(ToricFunction, ToricFunction)> {
    if !k.is_positive() {
        return Err(Error::Domain("k must be positive".into()));
    }
    let zero = Rational::zero();
    let k2 = k * k;
    let u = ToricFunction::new(vec![vec![k.recip(), zero.clone()], vec![zero.clone(), k2.clone()]])?;
    let v = ToricFunction::new(vec![vec![k2, zero.clone()], vec![zero, k.recip()]])?;
    Ok((u, v))
}

pub fn counterexample_report(k: &Rational) -> Result<CounterexampleReport> {
    let (u, v) = counterexample_family(k)?;
    let m_u = reduced_mass(&u);
    let m_v = reduced_mass(&v);
    let m_sum = reduced_mass(&sum(&u, &v)?);
    // Reduced mixed mass uses the same scale as the single masses.
    let m_mixed = mixed_dirac_mass(&[&u, &v], Normalization::Paper)?.reduced;

    let product = &m_u * &m_v;
    let mixed = InequalityCheck {
        lhs: m_mixed.clone(),
        rhs_exact: exact_root(&product, 2),
        rhs_approx: to_f64(&product).sqrt(),
        verdict: if &m_mixed * &m_mixed >= product {
            Verdict::Holds
        } else {
            Verdict::Violated
        },
    };
    let roots = exact_root(&m_u, 2).zip(exact_root(&m_v, 2));
    let sum_check = InequalityCheck {
        lhs: m_sum.clone(),
        rhs_exact: roots.map(|(a, b)| (&a + &b) * (&a + &b)),
        rhs_approx: (to_f64(&m_u).sqrt() + to_f64(&m_v).sqrt()).powi(2),
        verdict: match cmp_sum_of_roots_squared(&m_sum, &m_u, &m_v) {
            Ordering::Less => Verdict::Violated,
            _ => Verdict::Holds,
        },
    };

    let one = Rational::one();
    let (closed_forms, note) = if *k >= one {
        let half = Rational::new(1.into(), 2.into());
        let k2 = k * k;
        let forms = [k * &half, k * &half, k + k2.recip(), (int(2) * &k2).recip()];
        let note = (*k == one).then(|| "k = 1: both inequalities hold with equality".to_string());
        (Some(forms), note)
    } else {
        (
            None,
            Some("k < 1: the slope (1/k, 1/k) of u_k + v_k is dominated, so the closed forms do not apply".into()),
        )
    };
    Ok(CounterexampleReport {
        k: k.clone(),
        m_u,
        m_v,
        m_sum,
        m_mixed,
        closed_forms,
        mixed,
        sum: sum_check,
        note,
    })
}
