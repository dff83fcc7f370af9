use num_traits::{One, Signed, Zero};

use super::{active_slopes, ToricFunction};
use crate::geometry::lp::{self, Constraint, Relation};
use crate::geometry::{self, full_hull, Point, Polytope};
use crate::{Error, Rational, RationalPolytope, Result};

/// Gradient image of the truncated function near the origin, as a union of
/// simplices `conv(0, F)` over the simplices `F` of a triangulation of the
/// compact boundary of `conv(active slopes) + ℝⁿ₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientImage {
    dim: usize,
    vertices: Vec<Point<Rational>>,
    active: Vec<Point<Rational>>,
    cells: Vec<Vec<Point<Rational>>>,
    volume: Rational,
}

impl GradientImage {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `{0} ∪ active slopes`, sorted.
    pub fn vertices(&self) -> &[Point<Rational>] {
        &self.vertices
    }

    pub fn active_slopes(&self) -> &[Point<Rational>] {
        &self.active
    }

    /// Full-dimensional simplices, each listed as `[0, f_1, …, f_n]`.
    pub fn cells(&self) -> &[Vec<Point<Rational>>] {
        &self.cells
    }

    /// Vertices of the full-dimensional cells. Differs from
    /// [`GradientImage::vertices`] when the image has lower-dimensional flaps.
    pub fn cell_vertices(&self) -> Vec<Point<Rational>> {
        let mut out: Vec<Point<Rational>> = self.cells.iter().flatten().cloned().collect();
        geometry::sort_dedup(&mut out);
        out
    }

    pub fn volume(&self) -> Rational {
        self.volume.clone()
    }

    /// Convex hull of the vertex set. Contains the image, usually strictly.
    pub fn convex_hull(&self) -> RationalPolytope {
        Polytope::hull_of(self.dim, self.vertices.clone()).expect("vertex set is nonempty and in range")
    }

    /// Exact membership: `p ∈ conv({0} ∪ S)` for some set `S` of at most `n`
    /// active slopes lying on a common compact face of the Newton polyhedron.
    /// Covers lower-dimensional flaps that [`GradientImage::cells`] omits.
    pub fn contains(&self, p: &[Rational]) -> bool {
        if p.len() != self.dim {
            return false;
        }
        let zero = vec![Rational::zero(); self.dim];
        if p == zero.as_slice() {
            return true;
        }
        let m = self.active.len();
        (1..=self.dim.min(m)).any(|size| {
            subsets(m, size).into_iter().any(|s| {
                let mut pts = vec![zero.clone()];
                pts.extend(s.iter().map(|&i| self.active[i].clone()));
                Polytope::hull_of(self.dim, pts).map_or(false, |c| c.contains(p)) && self.on_compact_face(&s)
            })
        })
    }

    /// Some `c > 0` (scaled to `c ≥ 1`) is minimized over the active slopes
    /// by every slope in `s`.
    fn on_compact_face(&self, s: &[usize]) -> bool {
        let n = self.dim;
        let one = Rational::one();
        let mut cons = Vec::new();
        for i in 0..n {
            let mut row = vec![Rational::zero(); n + 1];
            row[i] = one.clone();
            cons.push(Constraint::new(row, Relation::Ge, one.clone()));
        }
        for (i, a) in self.active.iter().enumerate() {
            let mut row = a.clone();
            row.push(-one.clone());
            let rel = if s.contains(&i) { Relation::Eq } else { Relation::Ge };
            cons.push(Constraint::new(row, rel, Rational::zero()));
        }
        lp::feasible(n + 1, &cons)
    }
}

pub fn gradient_image(u: &ToricFunction) -> GradientImage {
    let n = u.complex_dim();
    let active = active_slopes(u);
    let zero = vec![Rational::zero(); n];
    let mut vertices = active.clone();
    vertices.push(zero.clone());
    geometry::sort_dedup(&mut vertices);

    let mut q = active.clone();
    for a in &active {
        for i in 0..n {
            let mut b = a.clone();
            b[i] += Rational::one();
            q.push(b);
        }
    }
    geometry::sort_dedup(&mut q);
    let hull = full_hull(&q).expect("a point and its unit translates span the space");
    let fact = Rational::from_integer((1..=n as u64).product::<u64>().into());
    let mut cells = Vec::new();
    let mut volume = Rational::zero();
    for f in &hull.facets {
        if !f.normal.iter().all(Signed::is_negative) {
            continue;
        }
        let pts: Vec<Point<Rational>> = f.vertices.iter().map(|&v| hull.points[v].clone()).collect();
        let vol = geometry::determinant(pts.clone()).abs() / fact.clone();
        if vol.is_zero() {
            continue;
        }
        volume += vol;
        let mut cell = vec![zero.clone()];
        cell.extend(pts);
        cells.push(cell);
    }
    cells.sort();
    GradientImage {
        dim: n,
        vertices,
        active,
        cells,
        volume,
    }
}

/// A vertex of the tropical hypersurface of `max(u, −j)` inside the open
/// negative orthant, with every branch that attains the maximum there.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalVertex {
    pub point: Point<Rational>,
    pub value: Rational,
    /// Slopes of the tied branches; the constant branch contributes `0`.
    pub slopes: Vec<Point<Rational>>,
}

/// Gradient image of `max(u, −j)` assembled from its tropical vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedImage {
    pub level: Rational,
    pub tropical_vertices: Vec<TropicalVertex>,
    /// Dual cells `conv(tied slopes)`, one per tropical vertex.
    pub cells: Vec<RationalPolytope>,
    pub vertices: Vec<Point<Rational>>,
    pub volume: Rational,
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Works directly with all branches of `max(u, −j)` (inactive ones included)
/// and never consults the Newton polyhedron.
pub fn truncated_gradient_image(u: &ToricFunction, j: &Rational) -> Result<TruncatedImage> {
    if !j.is_positive() {
        return Err(Error::Domain("truncation level must be positive".into()));
    }
    let n = u.complex_dim();
    let mut branches: Vec<(Point<Rational>, Rational)> =
        u.slopes().iter().map(|a| (a.clone(), Rational::zero())).collect();
    branches.push((vec![Rational::zero(); n], -j.clone()));
    let value_at =
        |b: &(Point<Rational>, Rational), x: &[Rational]| -> Rational { geometry::dot(&b.0, x) + b.1.clone() };

    let mut tropical: Vec<TropicalVertex> = Vec::new();
    for subset in subsets(branches.len(), n + 1) {
        // a_s·x − w = −c_s
        let rows: Vec<Vec<Rational>> = subset
            .iter()
            .map(|&s| {
                let mut r = branches[s].0.clone();
                r.push(-Rational::one());
                r
            })
            .collect();
        let rhs: Vec<Rational> = subset.iter().map(|&s| -branches[s].1.clone()).collect();
        let Some(sol) = geometry::solve(&rows, &rhs) else {
            continue;
        };
        let (x, w) = (&sol[..n], &sol[n]);
        if !x.iter().all(Signed::is_negative) {
            continue;
        }
        if tropical.iter().any(|t| t.point == x) {
            continue;
        }
        let values: Vec<Rational> = branches.iter().map(|b| value_at(b, x)).collect();
        if values.iter().any(|v| v > w) {
            continue;
        }
        let mut slopes: Vec<Point<Rational>> = branches
            .iter()
            .zip(&values)
            .filter(|(_, v)| *v == w)
            .map(|(b, _)| b.0.clone())
            .collect();
        geometry::sort_dedup(&mut slopes);
        tropical.push(TropicalVertex {
            point: x.to_vec(),
            value: w.clone(),
            slopes,
        });
    }
    tropical.sort_by(|a, b| geometry::lex_cmp(&a.point, &b.point));

    let mut cells = Vec::with_capacity(tropical.len());
    let mut vertices = Vec::new();
    let mut volume = Rational::zero();
    for t in &tropical {
        let cell = Polytope::hull_of(n, t.slopes.clone())?;
        volume += cell.volume();
        vertices.extend(cell.vertices().iter().cloned());
        cells.push(cell);
    }
    geometry::sort_dedup(&mut vertices);
    Ok(TruncatedImage {
        level: j.clone(),
        tropical_vertices: tropical,
        cells,
        vertices,
        volume,
    })
}
