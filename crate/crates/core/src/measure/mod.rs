//! Finitely supported and cellwise-constant measures on a box, their triadic
//! canonical approximation, and cellwise inequality checks.
//!
//! A measure lives on a closed box `Ω` inside a base cube `I`. Level `k` cuts
//! `I` into `3^{dk}` congruent semi-open cubes (lower faces closed), indexed
//! row-major with the last axis fastest. A cellwise measure with density
//! `ρ_c` on cell `c` is `Σ ρ_c · dV|_{c ∩ Ω}`.

mod checks;
mod io;

use std::collections::BTreeMap;

use crate::{Error, Field, Result};

pub use checks::{
    domination_check, geometric_mean_measure, holder_cell_check, CellDeficit, CellGap, Density, DominationLevel,
    DominationReport, DominationVariant, HolderReport,
};

/// `d·k` may not exceed this, so that cell indices fit in a `u64`.
pub const MAX_INDEX_DIGITS: usize = 39;

/// Closed axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain<T> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Field> BoxDomain<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::Shape("box corners must have equal positive length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::Domain("box must have positive extent on every axis".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(dim: usize) -> Self {
        Self::new(vec![T::zero(); dim], vec![T::one(); dim]).expect("unit box is valid")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn contains(&self, p: &[T]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.lo).zip(&self.hi).all(|((x, a), b)| a <= x && x <= b)
    }
}

/// Base cube `lo + [0, side]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cube<T> {
    lo: Vec<T>,
    side: T,
}

impl<T: Field> Cube<T> {
    pub fn new(lo: Vec<T>, side: T) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::Shape("cube needs at least one axis".into()));
        }
        if side <= T::zero() {
            return Err(Error::Domain("cube side must be positive".into()));
        }
        Ok(Self { lo, side })
    }

    /// Smallest cube sharing the lower corner of `domain` and containing it.
    pub fn enclosing(domain: &BoxDomain<T>) -> Self {
        let side = domain
            .lo
            .iter()
            .zip(&domain.hi)
            .map(|(a, b)| b.clone() - a.clone())
            .fold(T::zero(), |m, e| if e > m { e } else { m });
        Self {
            lo: domain.lo.clone(),
            side,
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn side(&self) -> &T {
        &self.side
    }

    fn contains_box(&self, b: &BoxDomain<T>) -> bool {
        self.lo.len() == b.dim()
            && self
                .lo
                .iter()
                .zip(b.lo.iter().zip(&b.hi))
                .all(|(c, (l, h))| c <= l && h.clone() <= c.clone() + self.side.clone())
    }

    fn approx_eq<U: Field>(&self, other: &Cube<U>) -> bool {
        self.dim() == other.dim()
            && self.side.approx() == other.side.approx()
            && self.lo.iter().zip(&other.lo).all(|(a, b)| a.approx() == b.approx())
    }
}

/// Triadic subdivision of a base cube at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct SubdivisionGrid<T> {
    cube: Cube<T>,
    level: usize,
}

impl<T: Field> SubdivisionGrid<T> {
    pub fn new(cube: Cube<T>, level: usize) -> Result<Self> {
        if cube.dim() * level > MAX_INDEX_DIGITS {
            return Err(Error::Size {
                dim: cube.dim() * level,
                max: MAX_INDEX_DIGITS,
            });
        }
        Ok(Self { cube, level })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn cube(&self) -> &Cube<T> {
        &self.cube
    }

    /// Cells per axis, `3^k`.
    pub fn per_axis(&self) -> u64 {
        3u64.pow(self.level as u32)
    }

    pub fn cell_count(&self) -> u64 {
        self.per_axis().pow(self.cube.dim() as u32)
    }

    pub fn cell_side(&self) -> T {
        self.cube.side.clone() / T::from_u64(self.per_axis()).expect("3^k is representable")
    }

    pub fn multi_index(&self, index: u64) -> Vec<u64> {
        let m = self.per_axis();
        let mut out = vec![0; self.cube.dim()];
        let mut rest = index;
        for a in (0..out.len()).rev() {
            out[a] = rest % m;
            rest /= m;
        }
        out
    }

    pub fn flat_index(&self, multi: &[u64]) -> u64 {
        let m = self.per_axis();
        multi.iter().fold(0, |acc, &i| acc * m + i)
    }

    pub fn cell_lo(&self, index: u64) -> Vec<T> {
        let h = self.cell_side();
        self.multi_index(index)
            .into_iter()
            .zip(&self.cube.lo)
            .map(|(i, lo)| lo.clone() + h.clone() * T::from_u64(i).expect("index is representable"))
            .collect()
    }

    /// `vol(cell ∩ Ω)`.
    pub fn clipped_volume(&self, index: u64, domain: &BoxDomain<T>) -> T {
        let h = self.cell_side();
        self.cell_lo(index)
            .into_iter()
            .enumerate()
            .fold(T::one(), |acc, (a, lo)| {
                let hi = lo.clone() + h.clone();
                let top = if hi < domain.hi[a] { hi } else { domain.hi[a].clone() };
                let bot = if lo > domain.lo[a] { lo } else { domain.lo[a].clone() };
                let len = top - bot;
                if len > T::zero() {
                    acc * len
                } else {
                    T::zero()
                }
            })
    }

    /// Semi-open cell of `p ∈ Ω`. A point on the upper face of `Ω` belongs
    /// to the cell below it, whose intersection with `Ω` has positive volume.
    pub fn locate(&self, p: &[T], domain: &BoxDomain<T>) -> u64 {
        let h = self.cell_side();
        let m = self.per_axis();
        let multi: Vec<u64> = p
            .iter()
            .enumerate()
            .map(|(a, x)| {
                let t = (x.clone() - self.cube.lo[a].clone()) / h.clone();
                let f = t.floor();
                let mut i = f.to_u64().unwrap_or(0);
                if *x == domain.hi[a] && f == t && i > 0 {
                    i -= 1;
                }
                i.min(m - 1)
            })
            .collect();
        self.flat_index(&multi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<T> {
    pub location: Vec<T>,
    pub weight: T,
}

/// Cellwise part of a measure: level and sparse per-cell densities.
#[derive(Clone, Debug, PartialEq)]
pub struct CellDensity<T> {
    pub level: usize,
    pub densities: BTreeMap<u64, T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<T> {
    domain: BoxDomain<T>,
    cube: Cube<T>,
    atoms: Vec<Atom<T>>,
    cells: Option<CellDensity<T>>,
}

/// A piece of a measure attributed to one cell of a check level.
#[derive(Clone, Debug)]
pub(crate) struct Piece<T> {
    pub cell: u64,
    pub mass: T,
    pub source: Source,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Source {
    Atom(usize),
    Cell(u64),
}

impl<T: Field> DiscreteMeasure<T> {
    /// Validates every invariant: domain inside the cube, atoms inside the
    /// domain with positive weights, nonnegative densities on existing cells,
    /// positive total mass.
    pub fn new(
        domain: BoxDomain<T>,
        cube: Cube<T>,
        atoms: Vec<Atom<T>>,
        cells: Option<CellDensity<T>>,
    ) -> Result<Self> {
        if !cube.contains_box(&domain) {
            return Err(Error::Containment("domain is not contained in the base cube".into()));
        }
        for a in &atoms {
            if !domain.contains(&a.location) {
                return Err(Error::Containment("atom lies outside the domain".into()));
            }
            if a.weight <= T::zero() {
                return Err(Error::Domain("atom weights must be positive".into()));
            }
        }
        let cells = match cells {
            Some(c) => {
                let grid = SubdivisionGrid::new(cube.clone(), c.level)?;
                let count = grid.cell_count();
                if c.densities.iter().any(|(&i, v)| i >= count || *v < T::zero()) {
                    return Err(Error::Domain(
                        "cell densities must be nonnegative on existing cells".into(),
                    ));
                }
                let densities = c.densities.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                Some(CellDensity {
                    level: c.level,
                    densities,
                })
            }
            None => None,
        };
        let m = Self {
            domain,
            cube,
            atoms,
            cells,
        };
        if m.total_mass() <= T::zero() {
            return Err(Error::Domain("total mass must be positive".into()));
        }
        Ok(m)
    }

    pub fn atomic(domain: BoxDomain<T>, cube: Cube<T>, atoms: Vec<Atom<T>>) -> Result<Self> {
        Self::new(domain, cube, atoms, None)
    }

    pub fn cellwise(domain: BoxDomain<T>, cube: Cube<T>, level: usize, densities: BTreeMap<u64, T>) -> Result<Self> {
        Self::new(domain, cube, Vec::new(), Some(CellDensity { level, densities }))
    }

    /// Unit point mass at `p` on `domain`, cube enclosing the domain.
    pub fn dirac(domain: BoxDomain<T>, p: Vec<T>) -> Result<Self> {
        let cube = Cube::enclosing(&domain);
        Self::atomic(
            domain,
            cube,
            vec![Atom {
                location: p,
                weight: T::one(),
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &BoxDomain<T> {
        &self.domain
    }

    pub fn cube(&self) -> &Cube<T> {
        &self.cube
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn cells(&self) -> Option<&CellDensity<T>> {
        self.cells.as_ref()
    }

    pub fn grid(&self, level: usize) -> Result<SubdivisionGrid<T>> {
        SubdivisionGrid::new(self.cube.clone(), level)
    }

    /// Density of the cellwise part on `cell`, zero if absent.
    pub fn density(&self, cell: u64) -> T {
        self.cells
            .as_ref()
            .and_then(|c| c.densities.get(&cell).cloned())
            .unwrap_or_else(T::zero)
    }

    pub fn total_mass(&self) -> T {
        let atoms = self.atoms.iter().fold(T::zero(), |acc, a| acc + a.weight.clone());
        let cells = match &self.cells {
            Some(c) => {
                let grid = SubdivisionGrid::new(self.cube.clone(), c.level).expect("validated level");
                c.densities.iter().fold(T::zero(), |acc, (&i, rho)| {
                    acc + rho.clone() * grid.clipped_volume(i, &self.domain)
                })
            }
            None => T::zero(),
        };
        atoms + cells
    }

    /// The measure split along the cells of `level`. Pieces of the cellwise
    /// part are whole source cells when `level` is coarser and subcells when
    /// it is finer.
    pub(crate) fn pieces(&self, level: usize) -> Result<Vec<Piece<T>>> {
        let grid = self.grid(level)?;
        let mut out: Vec<Piece<T>> = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| Piece {
                cell: grid.locate(&a.location, &self.domain),
                mass: a.weight.clone(),
                source: Source::Atom(i),
            })
            .collect();
        if let Some(c) = &self.cells {
            let src = self.grid(c.level)?;
            for (&i, rho) in &c.densities {
                let multi = src.multi_index(i);
                if level <= c.level {
                    let shrink = 3u64.pow((c.level - level) as u32);
                    let coarse: Vec<u64> = multi.iter().map(|&x| x / shrink).collect();
                    let mass = rho.clone() * src.clipped_volume(i, &self.domain);
                    if !mass.is_zero() {
                        out.push(Piece {
                            cell: grid.flat_index(&coarse),
                            mass,
                            source: Source::Cell(i),
                        });
                    }
                } else {
                    let grow = 3u64.pow((level - c.level) as u32);
                    let d = multi.len();
                    let sub = grow.pow(d as u32);
                    for s in 0..sub {
                        let mut rest = s;
                        let mut fine = vec![0u64; d];
                        for a in (0..d).rev() {
                            fine[a] = multi[a] * grow + rest % grow;
                            rest /= grow;
                        }
                        let cell = grid.flat_index(&fine);
                        let mass = rho.clone() * grid.clipped_volume(cell, &self.domain);
                        if !mass.is_zero() {
                            out.push(Piece {
                                cell,
                                mass,
                                source: Source::Cell(i),
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `μ(I_j ∩ Ω)` for every cell of `level` carrying mass.
    pub fn cell_masses(&self, level: usize) -> Result<BTreeMap<u64, T>> {
        let mut out: BTreeMap<u64, T> = BTreeMap::new();
        for p in self.pieces(level)? {
            let e = out.entry(p.cell).or_insert_with(T::zero);
            *e = e.clone() + p.mass;
        }
        Ok(out)
    }

    /// `∫ φ dμ`: atoms exactly, cells by the tensor two-point Gauss rule on
    /// each `cell ∩ Ω` (exact for polynomials of degree ≤ 3 in each variable).
    pub fn integrate(&self, phi: impl Fn(&[f64]) -> f64) -> f64 {
        let mut total: f64 = self
            .atoms
            .iter()
            .map(|a| {
                let x: Vec<f64> = a.location.iter().map(Field::approx).collect();
                a.weight.approx() * phi(&x)
            })
            .sum();
        if let Some(c) = &self.cells {
            let grid = self.grid(c.level).expect("validated level");
            let h = grid.cell_side().approx();
            let d = self.dim();
            let dom_lo: Vec<f64> = self.domain.lo.iter().map(Field::approx).collect();
            let dom_hi: Vec<f64> = self.domain.hi.iter().map(Field::approx).collect();
            let nodes = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
            for (&i, rho) in &c.densities {
                let lo: Vec<f64> = grid.cell_lo(i).iter().map(Field::approx).collect();
                let a: Vec<f64> = (0..d).map(|k| lo[k].max(dom_lo[k])).collect();
                let b: Vec<f64> = (0..d).map(|k| (lo[k] + h).min(dom_hi[k])).collect();
                if a.iter().zip(&b).any(|(x, y)| x >= y) {
                    continue;
                }
                let vol: f64 = (0..d).map(|k| b[k] - a[k]).product();
                let mut x = vec![0.0; d];
                let mut acc = 0.0;
                for s in 0..1usize << d {
                    for (k, xk) in x.iter_mut().enumerate() {
                        *xk = a[k] + (b[k] - a[k]) * nodes[(s >> k) & 1];
                    }
                    acc += phi(&x);
                }
                total += rho.approx() * vol * acc / (1usize << d) as f64;
            }
        }
        total
    }

    /// Rounded copy with `f64` weights and coordinates.
    pub fn to_f64(&self) -> DiscreteMeasure<f64> {
        let v = |xs: &[T]| xs.iter().map(Field::approx).collect::<Vec<f64>>();
        DiscreteMeasure {
            domain: BoxDomain {
                lo: v(&self.domain.lo),
                hi: v(&self.domain.hi),
            },
            cube: Cube {
                lo: v(&self.cube.lo),
                side: self.cube.side.approx(),
            },
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: v(&a.location),
                    weight: a.weight.approx(),
                })
                .collect(),
            cells: self.cells.as_ref().map(|c| CellDensity {
                level: c.level,
                densities: c.densities.iter().map(|(&i, r)| (i, r.approx())).collect(),
            }),
        }
    }
}

/// Cellwise average of `μ` at level `k`: density `μ(I_j ∩ Ω)/vol(I_j ∩ Ω)`.
pub fn canonical_approximation<T: Field>(mu: &DiscreteMeasure<T>, k: usize) -> Result<DiscreteMeasure<T>> {
    let grid = mu.grid(k)?;
    let mut densities = BTreeMap::new();
    for (cell, mass) in mu.cell_masses(k)? {
        let vol = grid.clipped_volume(cell, &mu.domain);
        if vol.is_zero() {
            return Err(Error::Domain("positive mass on a cell outside the domain".into()));
        }
        densities.insert(cell, mass / vol);
    }
    DiscreteMeasure::cellwise(mu.domain.clone(), mu.cube.clone(), k, densities)
}

/// Smooth test functions with explicit Lipschitz bounds on a box.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// `c·x + b`.
    Affine(Vec<f64>, f64),
    /// `|x|²`.
    SquaredNorm,
    /// `Σ x_a³`.
    Cubic,
}

impl TestFunction {
    /// `affine` (coefficients `1/(a+1)`), `sqnorm` or `cubic`.
    pub fn named(name: &str, dim: usize) -> Result<Self> {
        match name {
            "affine" => Ok(Self::Affine((0..dim).map(|a| 1.0 / (a + 1) as f64).collect(), 0.0)),
            "sqnorm" => Ok(Self::SquaredNorm),
            "cubic" => Ok(Self::Cubic),
            other => Err(Error::Domain(format!("unknown test function `{other}`"))),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Affine(c, b) => c.iter().zip(x).map(|(c, x)| c * x).sum::<f64>() + b,
            Self::SquaredNorm => x.iter().map(|v| v * v).sum(),
            Self::Cubic => x.iter().map(|v| v * v * v).sum(),
        }
    }

    /// Bound on `|∇φ|` over `[lo, hi]`.
    pub fn lipschitz_on(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let reach = lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs()));
        match self {
            Self::Affine(c, _) => c.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Self::SquaredNorm => 2.0 * reach.map(|r| r * r).sum::<f64>().sqrt(),
            Self::Cubic => reach.map(|r| (3.0 * r * r).powi(2)).sum::<f64>().sqrt(),
        }
    }
}

/// `|∫φ dμ − ∫φ dν|`.
pub fn weak_star_gap<T: Field, U: Field>(
    mu: &DiscreteMeasure<T>,
    nu: &DiscreteMeasure<U>,
    phi: impl Fn(&[f64]) -> f64,
) -> f64 {
    (mu.integrate(&phi) - nu.integrate(&phi)).abs()
}

/// `Lip · diam(level-k cell) · mass(μ)`, the bound on the gap to the level-k
/// approximant.
pub fn weak_star_bound<T: Field>(mu: &DiscreteMeasure<T>, k: usize, lipschitz: f64) -> f64 {
    let d = mu.dim() as f64;
    let h = mu.cube.side.approx() / 3f64.powi(k as i32);
    lipschitz * d.sqrt() * h * mu.total_mass().approx()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pluripolarity {
    Charges,
    DoesNotCharge,
}

/// Syntactic classification: atoms are points, hence pluripolar; cellwise
/// parts are absolutely continuous.
pub fn charges_pluripolar<T: Field>(mu: &DiscreteMeasure<T>) -> Pluripolarity {
    if mu.atoms.iter().any(|a| a.weight > T::zero()) {
        Pluripolarity::Charges
    } else {
        Pluripolarity::DoesNotCharge
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::Rational;

    fn unit(d: usize) -> BoxDomain<Rational> {
        BoxDomain::unit(d)
    }

    fn atom(loc: Vec<Rational>, w: Rational) -> Atom<Rational> {
        Atom {
            location: loc,
            weight: w,
        }
    }

    #[test]
    fn dirac_at_center() {
        let mu = DiscreteMeasure::dirac(unit(2), vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let a = canonical_approximation(&mu, 1).unwrap();
        let c = a.cells().unwrap();
        assert_eq!(c.densities.len(), 1);
        assert_eq!(c.densities.get(&4), Some(&int(9)));
        assert_eq!(a.total_mass(), int(1));
    }

    #[test]
    fn two_atoms_give_densities_nine_and_eighteen() {
        let d = unit(2);
        let mu = DiscreteMeasure::atomic(
            d.clone(),
            Cube::enclosing(&d),
            vec![
                atom(vec![ratio(1, 10), ratio(1, 10)], int(1)),
                atom(vec![ratio(9, 10), ratio(1, 2)], int(2)),
            ],
        )
        .unwrap();
        let a = canonical_approximation(&mu, 1).unwrap();
        let dens: Vec<_> = a.cells().unwrap().densities.values().cloned().collect();
        assert_eq!(dens, vec![int(9), int(18)]);
        assert_eq!(a.density(0), int(9));
        assert_eq!(a.density(7), int(18));
    }

    #[test]
    fn uniform_density_is_a_fixed_point() {
        let d = unit(2);
        let dens: BTreeMap<u64, Rational> = (0..81).map(|i| (i, ratio(3, 7))).collect();
        let mu = DiscreteMeasure::cellwise(d.clone(), Cube::enclosing(&d), 2, dens).unwrap();
        assert_eq!(canonical_approximation(&mu, 2).unwrap(), mu);
        let coarse = canonical_approximation(&mu, 1).unwrap();
        assert!(coarse.cells().unwrap().densities.values().all(|v| *v == ratio(3, 7)));
        let fine = canonical_approximation(&mu, 3).unwrap();
        assert_eq!(fine.total_mass(), ratio(3, 7));
    }

    #[test]
    fn boundary_atoms_follow_the_semi_open_rule() {
        let d = unit(1);
        let cube = Cube::enclosing(&d);
        let mu = DiscreteMeasure::atomic(
            d.clone(),
            cube.clone(),
            vec![
                atom(vec![ratio(1, 3)], int(1)),
                atom(vec![int(1)], int(1)),
                atom(vec![int(0)], int(1)),
            ],
        )
        .unwrap();
        let masses = mu.cell_masses(1).unwrap();
        assert_eq!(masses.get(&0), Some(&int(1)));
        assert_eq!(masses.get(&1), Some(&int(1)));
        assert_eq!(masses.get(&2), Some(&int(1)));
        // Domain smaller than the cube: an atom on the upper face of Ω
        // joins the cell below.
        let small = BoxDomain::new(vec![int(0)], vec![ratio(2, 3)]).unwrap();
        let mu = DiscreteMeasure::atomic(small, cube, vec![atom(vec![ratio(2, 3)], int(1))]).unwrap();
        let a = canonical_approximation(&mu, 1).unwrap();
        assert_eq!(a.density(1), int(3));
        assert_eq!(a.total_mass(), int(1));
    }

    #[test]
    fn clipped_cells_conserve_mass() {
        let d = BoxDomain::new(vec![int(0), int(0)], vec![ratio(1, 2), int(1)]).unwrap();
        let cube = Cube::enclosing(&d);
        let mu = DiscreteMeasure::atomic(d, cube, vec![atom(vec![ratio(2, 5), ratio(1, 5)], int(1))]).unwrap();
        let a = canonical_approximation(&mu, 1).unwrap();
        // Cell [1/3, 2/3) × [0, 1/3) meets Ω in a 1/6 × 1/3 box.
        assert_eq!(a.density(3), int(18));
        assert_eq!(a.total_mass(), int(1));
    }

    #[test]
    fn validation_errors() {
        let d = unit(2);
        let cube = Cube::enclosing(&d);
        assert!(matches!(
            DiscreteMeasure::atomic(d.clone(), cube.clone(), vec![atom(vec![int(2), int(0)], int(1))]),
            Err(Error::Containment(_))
        ));
        assert!(matches!(
            DiscreteMeasure::atomic(d.clone(), cube.clone(), vec![atom(vec![int(0), int(0)], int(0))]),
            Err(Error::Domain(_))
        ));
        let small = Cube::new(vec![int(0), int(0)], ratio(1, 2)).unwrap();
        assert!(matches!(
            DiscreteMeasure::atomic(d.clone(), small, vec![atom(vec![int(0), int(0)], int(1))]),
            Err(Error::Containment(_))
        ));
        let neg: BTreeMap<u64, Rational> = [(0, int(-1))].into_iter().collect();
        assert!(DiscreteMeasure::cellwise(d.clone(), cube.clone(), 1, neg).is_err());
        assert!(matches!(d_grid_too_fine(), Err(Error::Size { .. })));
    }

    fn d_grid_too_fine() -> Result<SubdivisionGrid<Rational>> {
        SubdivisionGrid::new(Cube::new(vec![int(0); 4], int(1))?, 10)
    }

    #[test]
    fn weak_star_examples() {
        let d = unit(2);
        let mu = DiscreteMeasure::dirac(d.clone(), vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(weak_star_gap(&mu, &mu, |x| x[0] * x[1]), 0.0);
        let phi = TestFunction::named("affine", 2).unwrap();
        for k in 1..=3 {
            let a = canonical_approximation(&mu, k).unwrap();
            assert!(weak_star_gap(&mu, &a, |x| phi.eval(x)) < 1e-14);
        }
        let mu = DiscreteMeasure::dirac(d, vec![ratio(1, 10), ratio(1, 5)]).unwrap();
        let a = canonical_approximation(&mu, 2).unwrap();
        let sq = TestFunction::SquaredNorm;
        let gap = weak_star_gap(&mu, &a, |x| sq.eval(x));
        let lip = sq.lipschitz_on(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(gap <= lip * 2f64.sqrt() / 9.0);
        // The atom sits in [0,1/9)×[1/9,2/9); average of |x|² there minus |p|².
        let exact = (0.05f64 - (1.0 / 243.0 + 7.0 / 243.0)).abs();
        assert!(exact <= lip * 2f64.sqrt() / 9.0);
        assert!((gap - exact).abs() < 1e-14, "{gap} vs {exact}");
        assert_eq!(weak_star_bound(&mu, 2, lip), lip * 2f64.sqrt() / 9.0);
    }

    #[test]
    fn pluripolar_classification() {
        let d = unit(2);
        let cube = Cube::enclosing(&d);
        let delta = DiscreteMeasure::dirac(d.clone(), vec![int(0), int(0)]).unwrap();
        assert_eq!(charges_pluripolar(&delta), Pluripolarity::Charges);
        let dens: BTreeMap<u64, Rational> = [(5, int(2))].into_iter().collect();
        let ac = DiscreteMeasure::cellwise(d.clone(), cube.clone(), 3, dens.clone()).unwrap();
        assert_eq!(charges_pluripolar(&ac), Pluripolarity::DoesNotCharge);
        let mixed = DiscreteMeasure::new(
            d,
            cube,
            vec![atom(vec![int(1), int(1)], int(1))],
            Some(CellDensity {
                level: 3,
                densities: dens,
            }),
        )
        .unwrap();
        assert_eq!(charges_pluripolar(&mixed), Pluripolarity::Charges);
    }

    #[test]
    fn floating_point_measures() {
        let d = BoxDomain::<f64>::unit(3);
        let mu = DiscreteMeasure::dirac(d, vec![0.5, 0.5, 0.5]).unwrap();
        let a = canonical_approximation(&mu, 2).unwrap();
        assert!((a.total_mass() - 1.0).abs() < 1e-12);
        let exact = DiscreteMeasure::dirac(unit(1), vec![ratio(1, 3)]).unwrap();
        assert_eq!(exact.to_f64().atoms()[0].location, vec![1.0 / 3.0]);
    }
}
