use std::collections::{BTreeMap, BTreeSet};

use super::{Atom, CellDensity, DiscreteMeasure, Source};
use crate::{Error, Field, Result};

/// Values of a function against a measure: one per atom (same order) and
/// one per cell of the measure's own level. Missing cells read as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Density<T> {
    pub atoms: Vec<T>,
    pub cells: BTreeMap<u64, T>,
}

impl<T: Field> Density<T> {
    pub fn atomic(values: Vec<T>) -> Self {
        Self {
            atoms: values,
            cells: BTreeMap::new(),
        }
    }

    pub fn cellwise(values: BTreeMap<u64, T>) -> Self {
        Self {
            atoms: Vec::new(),
            cells: values,
        }
    }

    pub fn constant<M: Field>(mu: &DiscreteMeasure<M>, c: T) -> Self {
        Self {
            atoms: vec![c.clone(); mu.atoms().len()],
            cells: mu
                .cells()
                .map(|cd| cd.densities.keys().map(|&k| (k, c.clone())).collect())
                .unwrap_or_default(),
        }
    }

    fn validate<M: Field>(&self, mu: &DiscreteMeasure<M>) -> Result<()> {
        if self.atoms.len() != mu.atoms().len() {
            return Err(Error::Shape(format!(
                "{} atom values for {} atoms",
                self.atoms.len(),
                mu.atoms().len()
            )));
        }
        if self.atoms.iter().chain(self.cells.values()).any(|v| *v < T::zero()) {
            return Err(Error::Domain("densities must be nonnegative".into()));
        }
        Ok(())
    }

    fn at(&self, source: Source) -> f64 {
        match source {
            Source::Atom(i) => self.atoms[i].approx(),
            Source::Cell(c) => self.cells.get(&c).map_or(0.0, Field::approx),
        }
    }
}

fn check_exponents(k_exp: usize, n: usize) -> Result<()> {
    if n == 0 || k_exp > n {
        return Err(Error::Domain(format!(
            "need 0 ≤ k ≤ n and n ≥ 1, got k = {k_exp}, n = {n}"
        )));
    }
    Ok(())
}

fn geometric_mean(f: f64, g: f64, k_exp: usize, n: usize) -> f64 {
    let a = k_exp as f64 / n as f64;
    f.powf(a) * g.powf(1.0 - a)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellGap {
    pub cell: u64,
    /// `(∫f dμ)^{k/n} (∫g dμ)^{(n−k)/n}` over the cell.
    pub lhs: f64,
    /// `∫ f^{k/n} g^{(n−k)/n} dμ` over the cell.
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderReport {
    pub level: usize,
    pub k_exp: usize,
    pub n: usize,
    pub cells: Vec<CellGap>,
    pub min_gap: f64,
    pub holds: bool,
}

/// Both sides of the Hölder inequality on every cell of `level` that
/// carries mass.
pub fn holder_cell_check<T: Field, M: Field>(
    f: &Density<T>,
    g: &Density<T>,
    mu: &DiscreteMeasure<M>,
    k_exp: usize,
    n: usize,
    level: usize,
) -> Result<HolderReport> {
    check_exponents(k_exp, n)?;
    f.validate(mu)?;
    g.validate(mu)?;
    let mut sums: BTreeMap<u64, [f64; 3]> = BTreeMap::new();
    for p in mu.pieces(level)? {
        let w = p.mass.approx();
        let (fv, gv) = (f.at(p.source), g.at(p.source));
        let e = sums.entry(p.cell).or_insert([0.0; 3]);
        e[0] += w * fv;
        e[1] += w * gv;
        e[2] += w * geometric_mean(fv, gv, k_exp, n);
    }
    let mut holds = true;
    let cells: Vec<CellGap> = sums
        .into_iter()
        .map(|(cell, [sf, sg, sm])| {
            let lhs = geometric_mean(sf, sg, k_exp, n);
            let gap = lhs - sm;
            let scale = lhs.abs().max(sm.abs()).max(1.0);
            if gap < -1e-12 * scale {
                holds = false;
            }
            CellGap {
                cell,
                lhs,
                rhs: sm,
                gap,
            }
        })
        .collect();
    let min_gap = cells.iter().map(|c| c.gap).fold(f64::INFINITY, f64::min);
    Ok(HolderReport {
        level,
        k_exp,
        n,
        cells,
        min_gap,
        holds,
    })
}

/// Right-hand side of a cellwise domination check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominationVariant {
    /// `∫ f^{k/n} g^{(n−k)/n} dμ`.
    GeometricMean,
    /// `∫ (f^{1/n} + g^{1/n})ⁿ dμ`.
    Minkowski,
}

impl DominationVariant {
    fn integrand(self, f: f64, g: f64, k_exp: usize, n: usize) -> f64 {
        match self {
            DominationVariant::GeometricMean => geometric_mean(f, g, k_exp, n),
            DominationVariant::Minkowski => {
                let r = 1.0 / n as f64;
                (f.powf(r) + g.powf(r)).powi(n as i32)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellDeficit {
    pub cell: u64,
    pub nu_mass: f64,
    pub bound: f64,
    /// `ν(cell) − bound`; negative means ν falls short.
    pub deficit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationLevel {
    pub level: usize,
    pub cells_checked: usize,
    pub violations: Vec<CellDeficit>,
    /// Most negative deficit; the first such cell in index order on ties.
    pub worst: Option<CellDeficit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationReport {
    pub variant: DominationVariant,
    pub k_exp: usize,
    pub n: usize,
    pub tol: f64,
    pub levels: Vec<DominationLevel>,
    pub holds: bool,
}

/// Compares `ν(cell)` with the integral of the variant's integrand against
/// `μ` on every cell of every requested level. Holding at a level means no
/// deficit below `−tol`.
#[allow(clippy::too_many_arguments)]
pub fn domination_check<N: Field, T: Field, M: Field>(
    nu: &DiscreteMeasure<N>,
    f: &Density<T>,
    g: &Density<T>,
    mu: &DiscreteMeasure<M>,
    k_exp: usize,
    n: usize,
    levels: &[usize],
    tol: f64,
    variant: DominationVariant,
) -> Result<DominationReport> {
    check_exponents(k_exp, n)?;
    f.validate(mu)?;
    g.validate(mu)?;
    if !nu.cube().approx_eq(mu.cube()) || nu.dim() != mu.dim() {
        return Err(Error::Containment("ν and μ must share the base cube".into()));
    }
    let mut out = Vec::with_capacity(levels.len());
    for &level in levels {
        let nu_mass: BTreeMap<u64, f64> = nu
            .cell_masses(level)?
            .into_iter()
            .map(|(c, m)| (c, m.approx()))
            .collect();
        let mut bound: BTreeMap<u64, f64> = BTreeMap::new();
        for p in mu.pieces(level)? {
            let v = variant.integrand(f.at(p.source), g.at(p.source), k_exp, n);
            *bound.entry(p.cell).or_insert(0.0) += p.mass.approx() * v;
        }
        let cells: BTreeSet<u64> = nu_mass.keys().chain(bound.keys()).copied().collect();
        let mut violations = Vec::new();
        let mut worst: Option<CellDeficit> = None;
        for &cell in &cells {
            let nm = nu_mass.get(&cell).copied().unwrap_or(0.0);
            let b = bound.get(&cell).copied().unwrap_or(0.0);
            let d = CellDeficit {
                cell,
                nu_mass: nm,
                bound: b,
                deficit: nm - b,
            };
            if d.deficit < -tol {
                violations.push(d.clone());
            }
            if worst.as_ref().map_or(true, |w| d.deficit < w.deficit) {
                worst = Some(d);
            }
        }
        out.push(DominationLevel {
            level,
            cells_checked: cells.len(),
            violations,
            worst,
        });
    }
    Ok(DominationReport {
        variant,
        k_exp,
        n,
        tol,
        holds: out.iter().all(|l| l.violations.is_empty()),
        levels: out,
    })
}

/// `f^{k/n} g^{(n−k)/n} · μ`, keeping the locations and cells of `μ`
/// exactly; only the weights pass through `f64`.
pub fn geometric_mean_measure<T: Field, M: Field>(
    f: &Density<T>,
    g: &Density<T>,
    mu: &DiscreteMeasure<M>,
    k_exp: usize,
    n: usize,
) -> Result<DiscreteMeasure<M>> {
    check_exponents(k_exp, n)?;
    f.validate(mu)?;
    g.validate(mu)?;
    let convert = |x: f64| M::from_f64(x).ok_or_else(|| Error::Domain("weight is not finite".into()));
    let mut atoms = Vec::new();
    for (i, a) in mu.atoms().iter().enumerate() {
        let w = a.weight.approx() * geometric_mean(f.at(Source::Atom(i)), g.at(Source::Atom(i)), k_exp, n);
        if w > 0.0 {
            atoms.push(Atom {
                location: a.location.clone(),
                weight: convert(w)?,
            });
        }
    }
    let cells = match mu.cells() {
        Some(c) => {
            let mut densities = BTreeMap::new();
            for (&i, rho) in &c.densities {
                let w = rho.approx() * geometric_mean(f.at(Source::Cell(i)), g.at(Source::Cell(i)), k_exp, n);
                densities.insert(i, convert(w)?);
            }
            Some(CellDensity {
                level: c.level,
                densities,
            })
        }
        None => None,
    };
    DiscreteMeasure::new(mu.domain.clone(), mu.cube.clone(), atoms, cells)
}
