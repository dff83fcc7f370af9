//! Exact convex geometry in low dimension: convex hulls, polytope volumes,
//! Minkowski sums and point containment.

pub mod lp;

use std::cmp::Ordering;

use crate::{Error, Field, Result};
use lp::{Constraint, Relation};

/// Largest ambient dimension handled by the hull and volume routines.
pub const MAX_POLYTOPE_DIM: usize = 4;

pub type Point<T> = Vec<T>;

pub(crate) fn lex_cmp<T: Field>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) fn sort_dedup<T: Field>(points: &mut Vec<Point<T>>) {
    points.sort_by(|a, b| lex_cmp(a, b));
    points.dedup();
}

pub(crate) fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub(crate) fn sub<T: Field>(a: &[T], b: &[T]) -> Point<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub(crate) fn add<T: Field>(a: &[T], b: &[T]) -> Point<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub(crate) fn scale<T: Field>(a: &[T], c: &T) -> Point<T> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

/// Determinant of a square matrix by exact Gaussian elimination.
pub fn determinant<T: Field>(mut rows: Vec<Vec<T>>) -> T {
    let n = rows.len();
    let mut det = T::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
            return T::zero();
        };
        if p != col {
            rows.swap(p, col);
            det = -det;
        }
        let pivot = rows[col][col].clone();
        det = det * pivot.clone();
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() / pivot.clone();
            for c in col..n {
                let v = rows[col][c].clone();
                rows[r][c] = rows[r][c].clone() - factor.clone() * v;
            }
        }
    }
    det
}

/// Row-reduces `rows` and returns the pivot columns (their count is the rank).
pub(crate) fn pivot_columns<T: Field>(mut rows: Vec<Vec<T>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let pivot = rows[r][col].clone();
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let factor = rows[i][col].clone() / pivot.clone();
            for c in col..ncols {
                let v = rows[r][c].clone();
                rows[i][c] = rows[i][c].clone() - factor.clone() * v;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub(crate) fn rank<T: Field>(rows: Vec<Vec<T>>) -> usize {
    if rows.is_empty() {
        0
    } else {
        pivot_columns(rows).len()
    }
}

/// Solves the square system `a·x = b`; `None` when singular.
pub(crate) fn solve<T: Field>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(p, col);
        let pivot = m[col][col].clone();
        for c in col..=n {
            m[col][c] = m[col][c].clone() / pivot.clone();
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=n {
                let v = m[col][c].clone();
                m[r][c] = m[r][c].clone() - factor.clone() * v;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// A boundary simplex of a full-dimensional hull with outward normal:
/// `normal · x ≤ offset` on the hull.
#[derive(Clone, Debug)]
pub(crate) struct Facet<T> {
    pub vertices: Vec<usize>,
    pub normal: Vec<T>,
    pub offset: T,
}

/// Triangulated boundary of a full-dimensional convex hull.
#[derive(Clone, Debug)]
pub(crate) struct Hull<T> {
    pub points: Vec<Point<T>>,
    pub facets: Vec<Facet<T>>,
    pub interior: Point<T>,
}

fn facet_through<T: Field>(points: &[Point<T>], vertices: Vec<usize>, interior: &[T]) -> Facet<T> {
    let d = interior.len();
    let base = &points[vertices[0]];
    let diffs: Vec<Vec<T>> = vertices[1..].iter().map(|&v| sub(&points[v], base)).collect();
    // Generalized cross product by cofactors.
    let mut normal: Vec<T> = (0..d)
        .map(|c| {
            let minor: Vec<Vec<T>> = diffs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != c)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let m = determinant(minor);
            if c % 2 == 0 {
                m
            } else {
                -m
            }
        })
        .collect();
    let mut offset = dot(&normal, base);
    if dot(&normal, interior) > offset {
        normal = normal.into_iter().map(|x| -x).collect();
        offset = -offset;
    }
    Facet {
        vertices,
        normal,
        offset,
    }
}

/// Beneath-beyond incremental hull. Returns `None` when the points do not
/// span the ambient space.
pub(crate) fn full_hull<T: Field>(points: &[Point<T>]) -> Option<Hull<T>> {
    let d = points.first()?.len();
    let mut simplex = vec![0usize];
    for i in 1..points.len() {
        if simplex.len() == d + 1 {
            break;
        }
        let mut rows: Vec<Vec<T>> = simplex[1..].iter().map(|&s| sub(&points[s], &points[0])).collect();
        rows.push(sub(&points[i], &points[0]));
        if rank(rows) == simplex.len() {
            simplex.push(i);
        }
    }
    if simplex.len() < d + 1 {
        return None;
    }
    let denom = T::from_usize_exact(d + 1);
    let interior: Point<T> = (0..d)
        .map(|a| simplex.iter().fold(T::zero(), |acc, &s| acc + points[s][a].clone()) / denom.clone())
        .collect();
    let mut facets: Vec<Facet<T>> = (0..=d)
        .map(|skip| {
            let verts = simplex
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            facet_through(points, verts, &interior)
        })
        .collect();
    for (i, p) in points.iter().enumerate() {
        if simplex.contains(&i) {
            continue;
        }
        let visible: Vec<bool> = facets.iter().map(|f| dot(&f.normal, p) > f.offset).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut ridges: Vec<(Vec<usize>, usize)> = Vec::new();
        for (f, _) in facets.iter().zip(&visible).filter(|(_, &v)| v) {
            for skip in 0..f.vertices.len() {
                let mut ridge: Vec<usize> = f
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                ridge.sort_unstable();
                match ridges.iter_mut().find(|(r, _)| *r == ridge) {
                    Some(entry) => entry.1 += 1,
                    None => ridges.push((ridge, 1)),
                }
            }
        }
        let mut kept: Vec<Facet<T>> = facets
            .into_iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| f)
            .collect();
        for (ridge, count) in ridges {
            if count == 1 {
                let mut verts = ridge;
                verts.push(i);
                kept.push(facet_through(points, verts, &interior));
            }
        }
        facets = kept;
    }
    Some(Hull {
        points: points.to_vec(),
        facets,
        interior,
    })
}

impl<T: Field> Hull<T> {
    /// Indices of extreme points: a boundary point is a vertex iff the
    /// normals of its incident facets span the space.
    pub fn vertex_indices(&self) -> Vec<usize> {
        let d = self.interior.len();
        let mut used: Vec<usize> = self.facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
        used.sort_unstable();
        used.dedup();
        used.into_iter()
            .filter(|&v| {
                let normals: Vec<Vec<T>> = self
                    .facets
                    .iter()
                    .filter(|f| f.vertices.contains(&v))
                    .map(|f| f.normal.clone())
                    .collect();
                rank(normals) == d
            })
            .collect()
    }

    /// Volume as a fan of simplices from the interior reference point.
    pub fn volume(&self) -> T {
        let d = self.interior.len();
        let fact = (1..=d).fold(T::one(), |acc, i| acc * T::from_usize_exact(i));
        let total = self.facets.iter().fold(T::zero(), |acc, f| {
            let rows = f
                .vertices
                .iter()
                .map(|&v| sub(&self.points[v], &self.interior))
                .collect();
            acc + determinant(rows).abs()
        });
        total / fact
    }
}

/// Extreme points of the convex hull of `points` (any affine dimension).
fn extreme_points<T: Field>(points: &[Point<T>]) -> Vec<Point<T>> {
    if points.len() <= 1 {
        return points.to_vec();
    }
    let base = &points[0];
    let diffs: Vec<Vec<T>> = points[1..].iter().map(|p| sub(p, base)).collect();
    let pivots = pivot_columns(diffs);
    let d = points[0].len();
    if pivots.is_empty() {
        return vec![base.clone()];
    }
    let indices = if pivots.len() == d {
        full_hull(points)
            .expect("full rank point set has a hull")
            .vertex_indices()
    } else {
        // The coordinate projection onto the pivot columns is injective on
        // the affine hull, so it preserves extremality.
        let projected: Vec<Point<T>> = points
            .iter()
            .map(|p| pivots.iter().map(|&c| p[c].clone()).collect())
            .collect();
        full_hull(&projected).expect("projection is full rank").vertex_indices()
    };
    indices.into_iter().map(|i| points[i].clone()).collect()
}

/// A convex polytope given by its exact vertex (extreme point) set.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope<T> {
    dim: usize,
    vertices: Vec<Point<T>>,
}

impl<T: Field> Polytope<T> {
    /// Convex hull of `points`; interior and duplicate points are discarded.
    pub fn hull_of(dim: usize, points: Vec<Point<T>>) -> Result<Self> {
        if dim > MAX_POLYTOPE_DIM {
            return Err(Error::Size {
                dim,
                max: MAX_POLYTOPE_DIM,
            });
        }
        if points.is_empty() {
            return Err(Error::Domain("a polytope needs at least one point".into()));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Shape(format!("points must have {dim} coordinates")));
        }
        let mut pts = points;
        sort_dedup(&mut pts);
        let mut vertices = extreme_points(&pts);
        sort_dedup(&mut vertices);
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn affine_dim(&self) -> usize {
        let diffs: Vec<Vec<T>> = self.vertices[1..].iter().map(|p| sub(p, &self.vertices[0])).collect();
        rank(diffs)
    }

    /// Exact `dim`-volume; zero for lower-dimensional polytopes.
    pub fn volume(&self) -> T {
        match full_hull(&self.vertices) {
            Some(hull) => hull.volume(),
            None => T::zero(),
        }
    }

    /// Exact membership via a convex-combination feasibility LP.
    pub fn contains(&self, p: &[T]) -> bool {
        let m = self.vertices.len();
        let mut constraints: Vec<Constraint<T>> = (0..self.dim)
            .map(|a| {
                Constraint::new(
                    self.vertices.iter().map(|v| v[a].clone()).collect(),
                    Relation::Eq,
                    p[a].clone(),
                )
            })
            .collect();
        constraints.push(Constraint::new(vec![T::one(); m], Relation::Eq, T::one()));
        lp::feasible(m, &constraints)
    }

    pub fn contains_polytope(&self, other: &Self) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }

    pub fn scaled(&self, c: &T) -> Result<Self> {
        Self::hull_of(self.dim, self.vertices.iter().map(|v| scale(v, c)).collect())
    }
}

/// Exact volume of a convex polytope (ambient dimension at most 4).
pub fn polytope_volume<T: Field>(p: &Polytope<T>) -> Result<T> {
    if p.dim > MAX_POLYTOPE_DIM {
        return Err(Error::Size {
            dim: p.dim,
            max: MAX_POLYTOPE_DIM,
        });
    }
    Ok(p.volume())
}

pub fn minkowski_sum<T: Field>(a: &Polytope<T>, b: &Polytope<T>) -> Result<Polytope<T>> {
    if a.dim != b.dim {
        return Err(Error::Shape("Minkowski summands differ in dimension".into()));
    }
    let points = a
        .vertices
        .iter()
        .flat_map(|p| b.vertices.iter().map(move |q| add(p, q)))
        .collect();
    Polytope::hull_of(a.dim, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::Rational;

    fn pt(xs: &[(i64, i64)]) -> Point<Rational> {
        xs.iter().map(|&(p, q)| ratio(p, q)).collect()
    }

    fn ipt(xs: &[i64]) -> Point<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn triangle_volume() {
        // {(0,0), (1/k,0), (0,k²)} at k = 2 has area k/2 = 1.
        let t = Polytope::hull_of(2, vec![ipt(&[0, 0]), pt(&[(1, 2), (0, 1)]), ipt(&[0, 4])]).unwrap();
        assert_eq!(polytope_volume(&t).unwrap(), int(1));
        assert_eq!(t.vertices().len(), 3);
    }

    #[test]
    fn segment_is_degenerate() {
        let s = Polytope::hull_of(2, vec![ipt(&[0, 0]), ipt(&[1, 1]), pt(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(s.volume(), int(0));
        assert_eq!(s.vertices(), &[ipt(&[0, 0]), ipt(&[1, 1])]);
        assert_eq!(s.affine_dim(), 1);
    }

    #[test]
    fn removes_interior_and_collinear_points() {
        let pts = vec![
            ipt(&[0, 0]),
            ipt(&[1, 0]),
            ipt(&[2, 0]),
            ipt(&[0, 2]),
            ipt(&[2, 2]),
            ipt(&[1, 1]),
            ipt(&[0, 1]),
        ];
        let sq = Polytope::hull_of(2, pts).unwrap();
        assert_eq!(sq.vertices(), &[ipt(&[0, 0]), ipt(&[0, 2]), ipt(&[2, 0]), ipt(&[2, 2])]);
        assert_eq!(sq.volume(), int(4));
    }

    #[test]
    fn cube_and_cross_polytope_volumes() {
        let mut cube = Vec::new();
        for m in 0..16u32 {
            cube.push((0..4).map(|b| int(((m >> b) & 1) as i64)).collect());
        }
        cube.push(pt(&[(1, 2), (1, 3), (1, 4), (1, 5)]));
        let c = Polytope::hull_of(4, cube).unwrap();
        assert_eq!(c.vertices().len(), 16);
        assert_eq!(c.volume(), int(1));
        // Cross-polytope in ℝ³: volume 2³/3! = 4/3.
        let mut cross = Vec::new();
        for a in 0..3 {
            for s in [-1, 1] {
                let mut p = vec![int(0); 3];
                p[a] = int(s);
                cross.push(p);
            }
        }
        let x = Polytope::hull_of(3, cross).unwrap();
        assert_eq!(x.volume(), ratio(4, 3));
    }

    #[test]
    fn coplanar_facets_in_three_dimensions() {
        // A square pyramid with extra points on the base plane.
        let pts = vec![
            ipt(&[0, 0, 0]),
            ipt(&[2, 0, 0]),
            ipt(&[1, 0, 0]),
            ipt(&[0, 2, 0]),
            ipt(&[2, 2, 0]),
            ipt(&[1, 1, 0]),
            ipt(&[1, 1, 3]),
        ];
        let p = Polytope::hull_of(3, pts).unwrap();
        assert_eq!(p.vertices().len(), 5);
        assert_eq!(p.volume(), int(4));
    }

    #[test]
    fn lower_dimensional_in_three_space() {
        let pts = vec![
            ipt(&[0, 0, 1]),
            ipt(&[1, 0, 1]),
            ipt(&[0, 1, 1]),
            pt(&[(1, 3), (1, 3), (1, 1)]),
        ];
        let p = Polytope::hull_of(3, pts).unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.volume(), int(0));
        assert_eq!(p.affine_dim(), 2);
    }

    #[test]
    fn rejects_large_dimension() {
        let pts = vec![vec![int(0); 5]];
        assert!(matches!(Polytope::hull_of(5, pts), Err(Error::Size { dim: 5, max: 4 })));
    }

    #[test]
    fn containment_and_minkowski() {
        let a = Polytope::hull_of(2, vec![ipt(&[0, 0]), ipt(&[1, 0]), ipt(&[0, 1])]).unwrap();
        assert!(a.contains(&pt(&[(1, 3), (1, 3)])));
        assert!(a.contains(&pt(&[(1, 2), (1, 2)])));
        assert!(!a.contains(&pt(&[(2, 3), (2, 3)])));
        let s = minkowski_sum(&a, &a).unwrap();
        assert_eq!(s, a.scaled(&int(2)).unwrap());
        assert_eq!(s.volume(), int(2));
        assert!(s.contains_polytope(&a));
    }

    #[test]
    fn one_dimensional_hull() {
        let p = Polytope::hull_of(1, vec![ipt(&[3]), ipt(&[-1]), ipt(&[2])]).unwrap();
        assert_eq!(p.vertices(), &[ipt(&[-1]), ipt(&[3])]);
        assert_eq!(p.volume(), int(4));
    }

    #[test]
    fn floating_point_field_also_works() {
        let t = Polytope::hull_of(2, vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 3.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(t.vertices().len(), 3);
        assert!((t.volume() - 3.0f64).abs() < 1e-12);
    }
}
