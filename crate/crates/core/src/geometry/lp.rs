//! Dense two-phase simplex method over an exact ordered field.
//!
//! Bland's rule is used for both the entering and leaving variable, so the
//! method terminates without any tolerance. Intended for the small
//! feasibility problems in this crate (a handful of variables and rows).

use crate::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `coeffs · x  (relation)  rhs`
#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

impl<T> Constraint<T> {
    pub fn new(coeffs: Vec<T>, relation: Relation, rhs: T) -> Self {
        Self { coeffs, relation, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Infeasible,
    Unbounded,
    Optimal { value: T, point: Vec<T> },
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
}

impl<T: Field> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize, reduced: &mut [T], value: &mut T) {
        let p = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            *x = x.clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for (x, pr) in self.rows[r].iter_mut().zip(&pivot_row) {
                *x = x.clone() - factor.clone() * pr.clone();
            }
            self.rhs[r] = self.rhs[r].clone() - factor * pivot_rhs.clone();
        }
        let factor = reduced[col].clone();
        if !factor.is_zero() {
            for (x, pr) in reduced.iter_mut().zip(&pivot_row) {
                *x = x.clone() - factor.clone() * pr.clone();
            }
            *value = value.clone() + factor * pivot_rhs;
        }
        self.basis[row] = col;
    }

    fn reduced_costs(&self, cost: &[T]) -> (Vec<T>, T) {
        let mut reduced = cost.to_vec();
        let mut value = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (r, a) in reduced.iter_mut().zip(&self.rows[i]) {
                *r = r.clone() - cb.clone() * a.clone();
            }
            value = value + cb * self.rhs[i].clone();
        }
        (reduced, value)
    }

    /// Runs Bland's rule to optimality over columns `< allowed`.
    /// Returns `false` when the problem is unbounded.
    fn optimize(&mut self, reduced: &mut [T], value: &mut T, allowed: usize) -> bool {
        loop {
            let Some(col) = (0..allowed).find(|&j| reduced[j] > T::zero()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if *a > T::zero() {
                    let ratio = self.rhs[r].clone() / a.clone();
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = best else {
                return false;
            };
            self.pivot(row, col, reduced, value);
        }
    }
}

/// Maximizes `objective · x` subject to `constraints` and `x ≥ 0`.
pub fn maximize<T: Field>(objective: &[T], constraints: &[Constraint<T>]) -> LpOutcome<T> {
    let nv = objective.len();
    let m = constraints.len();
    let n_slack = constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let n_art = constraints
        .iter()
        .filter(|c| {
            let flipped = c.rhs < T::zero();
            match c.relation {
                Relation::Eq => true,
                Relation::Le => flipped,
                Relation::Ge => !flipped,
            }
        })
        .count();
    let ncols = nv + n_slack + n_art;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
    };
    let (mut slack, mut art) = (nv, nv + n_slack);
    for c in constraints {
        debug_assert_eq!(c.coeffs.len(), nv);
        let flip = c.rhs < T::zero();
        let sign = |x: &T| if flip { -x.clone() } else { x.clone() };
        let mut row: Vec<T> = c.coeffs.iter().map(sign).collect();
        row.resize(ncols, T::zero());
        let relation = match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        match relation {
            Relation::Le => {
                row[slack] = T::one();
                tab.basis.push(slack);
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -T::one();
                slack += 1;
                row[art] = T::one();
                tab.basis.push(art);
                art += 1;
            }
            Relation::Eq => {
                row[art] = T::one();
                tab.basis.push(art);
                art += 1;
            }
        }
        tab.rows.push(row);
        tab.rhs.push(sign(&c.rhs));
    }
    let first_art = nv + n_slack;

    if n_art > 0 {
        let mut cost = vec![T::zero(); ncols];
        for c in cost.iter_mut().skip(first_art) {
            *c = -T::one();
        }
        let (mut reduced, mut value) = tab.reduced_costs(&cost);
        tab.optimize(&mut reduced, &mut value, ncols);
        if value < T::zero() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= first_art {
                if let Some(col) = (0..first_art).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, col, &mut reduced, &mut value);
                } else {
                    tab.rows.remove(r);
                    tab.rhs.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
    }

    let mut cost = objective.to_vec();
    cost.resize(ncols, T::zero());
    let (mut reduced, mut value) = tab.reduced_costs(&cost);
    if !tab.optimize(&mut reduced, &mut value, first_art) {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![T::zero(); nv];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nv {
            point[b] = tab.rhs[i].clone();
        }
    }
    LpOutcome::Optimal { value, point }
}

/// `true` iff the constraints admit some `x ≥ 0`.
pub fn feasible<T: Field>(nv: usize, constraints: &[Constraint<T>]) -> bool {
    !matches!(maximize(&vec![T::zero(); nv], constraints), LpOutcome::Infeasible)
}
