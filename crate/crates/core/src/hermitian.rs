//! Hermitian matrices and the pointwise determinant inequalities.
//!
//! The complex Hessian `(∂²u/∂z_j∂z̄_k)` of a smooth function is a Hermitian
//! matrix; the Monge-Ampère density is proportional to its determinant and
//! mixed Monge-Ampère densities to mixed determinants. Everything here is a
//! pure function of its inputs.

use std::ops::Add;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::{Error, Real, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// An `n × n` complex Hermitian matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Builds a matrix from row-major entries, replacing them with the exact
    /// Hermitian part `(A + A*)/2`.
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let half = T::lit(0.5);
        let mut sym = entries.clone();
        for j in 0..dim {
            for k in 0..dim {
                sym[j * dim + k] = (entries[j * dim + k] + entries[k * dim + j].conj()) * half;
            }
        }
        Ok(Self { dim, entries: sym })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Result<Self> {
        let entries = (0..dim * dim).map(|i| f(i / dim, i % dim)).collect();
        Self::new(dim, entries)
    }

    /// Builds a matrix from real rows (a real symmetric matrix).
    pub fn from_real(rows: &[&[T]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("real rows are not square".into()));
        }
        Self::from_fn(dim, |j, k| Complex::new(rows[j][k], T::zero()))
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        Self::from_fn(diag.len(), |j, k| {
            if j == k {
                Complex::new(diag[j], T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![T::one(); dim])
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![T::zero(); dim])
    }

    /// `M·M*` for a square row-major complex matrix `M`; always PSD.
    pub fn gram(dim: usize, m: &[Complex<T>]) -> Result<Self> {
        if m.len() != dim * dim {
            return Err(Error::Shape("gram factor is not square".into()));
        }
        Self::from_fn(dim, |j, k| {
            (0..dim).fold(Complex::zero(), |acc, l| acc + m[j * dim + l] * m[k * dim + l].conj())
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.entries[j * self.dim + k]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    /// Largest entry modulus, used as the scale for relative tolerances.
    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "cannot add {}x{0} and {}x{1}",
                self.dim, other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }
}

impl<T: Real> Add for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;

    /// Panics on a dimension mismatch; use [`HermitianMatrix::try_add`] otherwise.
    fn add(self, rhs: Self) -> HermitianMatrix<T> {
        self.try_add(rhs).expect("matrix dimensions agree")
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Shape("matrix dimension must be at least 1".into()));
    }
    if dim > MAX_DIM {
        return Err(Error::Size { dim, max: MAX_DIM });
    }
    Ok(())
}

/// Real determinant by partially pivoted LU in complex arithmetic.
///
/// The imaginary residue of the complex product is checked against the
/// scalar tolerance (relative to `max_abs^n`) and then discarded.
pub fn determinant<T: Real>(a: &HermitianMatrix<T>) -> T {
    let n = a.dim;
    let mut lu = a.entries.clone();
    let mut det = Complex::<T>::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                lu[r * n + col]
                    .norm()
                    .partial_cmp(&lu[s * n + col].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if lu[pivot * n + col].is_zero() {
            return T::zero();
        }
        if pivot != col {
            for c in 0..n {
                lu.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let p = lu[col * n + col];
        det = det * p;
        for r in col + 1..n {
            let factor = lu[r * n + col] / p;
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let v = lu[col * n + c];
                lu[r * n + c] = lu[r * n + c] - factor * v;
            }
        }
    }
    let scale = a.max_abs().max(T::one()).powi(n as i32);
    debug_assert!(
        det.im.abs() <= T::default_tol() * scale,
        "determinant of a Hermitian matrix has imaginary residue {}",
        det.im
    );
    det.re
}

/// Mixed determinant `D(A₁,…,A_n)` by inclusion–exclusion polarization:
/// `(1/n!) Σ_{∅≠S⊆[n]} (−1)^{n−|S|} det(Σ_{i∈S} A_i)`.
pub fn mixed_determinant<T: Real>(matrices: &[&HermitianMatrix<T>]) -> Result<T> {
    let first = matrices.first().ok_or(Error::Arity { expected: 1, got: 0 })?;
    let n = first.dim;
    if matrices.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: matrices.len(),
        });
    }
    if matrices.iter().any(|m| m.dim != n) {
        return Err(Error::Shape("mixed determinant arguments differ in dimension".into()));
    }
    let mut total = T::zero();
    for mask in 1u32..(1 << n) {
        let mut sum = HermitianMatrix {
            dim: n,
            entries: vec![Complex::zero(); n * n],
        };
        for (i, m) in matrices.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (s, e) in sum.entries.iter_mut().zip(&m.entries) {
                    *s = *s + e;
                }
            }
        }
        let d = determinant(&sum);
        if (n as u32 - mask.count_ones()) % 2 == 0 {
            total = total + d;
        } else {
            total = total - d;
        }
    }
    Ok(total / factorial::<T>(n))
}

/// Mixed determinant with `a` repeated `k` times and `b` repeated `n − k` times.
pub fn mixed_determinant_pair<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>, k: usize) -> Result<T> {
    let n = a.dim;
    if b.dim != n {
        return Err(Error::Shape("mixed pair differs in dimension".into()));
    }
    if k > n {
        return Err(Error::Precondition(format!("k = {k} exceeds n = {n}")));
    }
    let args: Vec<&HermitianMatrix<T>> = (0..n).map(|i| if i < k { a } else { b }).collect();
    mixed_determinant(&args)
}

pub(crate) fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::lit(i as f64))
}

/// Eigenvalues in ascending order.
///
/// Computed by cyclic Jacobi rotations on the real symmetric `2n × 2n`
/// embedding `[[Re A, −Im A], [Im A, Re A]]`, whose spectrum is that of `A`
/// with every eigenvalue doubled.
pub fn eigenvalues<T: Real>(a: &HermitianMatrix<T>) -> Vec<T> {
    let n = a.dim;
    let m = 2 * n;
    let mut s = vec![T::zero(); m * m];
    for j in 0..n {
        for k in 0..n {
            let z = a.get(j, k);
            s[j * m + k] = z.re;
            s[(j + n) * m + (k + n)] = z.re;
            s[j * m + (k + n)] = -z.im;
            s[(j + n) * m + k] = z.im;
        }
    }
    jacobi_eigenvalues(&mut s, m);
    let mut ev: Vec<T> = (0..m).map(|i| s[i * m + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev.into_iter().step_by(2).collect()
}

fn jacobi_eigenvalues<T: Real>(s: &mut [T], m: usize) {
    let total: T = s.iter().fold(T::zero(), |acc, &x| acc + x * x);
    let threshold = total * T::epsilon() * T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..m)
            .flat_map(|p| (0..m).filter(move |&q| q != p).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc + s[p * m + q] * s[p * m + q]);
        if off <= threshold {
            return;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = s[p * m + q];
                if apq.is_zero() {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for r in 0..m {
                    let srp = s[r * m + p];
                    let srq = s[r * m + q];
                    s[r * m + p] = c * srp - sn * srq;
                    s[r * m + q] = sn * srp + c * srq;
                }
                for r in 0..m {
                    let spr = s[p * m + r];
                    let sqr = s[q * m + r];
                    s[p * m + r] = c * spr - sn * sqr;
                    s[q * m + r] = sn * spr + c * sqr;
                }
            }
        }
    }
}

/// `true` iff every eigenvalue is at least `−tol`.
pub fn is_psd<T: Real>(a: &HermitianMatrix<T>, tol: T) -> bool {
    eigenvalues(a).first().map_or(true, |&lo| lo >= -tol)
}

/// `x^(num/den)` for `x ≥ 0`; negative `x` (rounding residue) is clamped to 0.
pub fn nonneg_power<T: Real>(x: T, num: usize, den: usize) -> T {
    let x = x.max(T::zero());
    if num == 0 {
        return T::one();
    }
    x.powf(T::lit(num as f64) / T::lit(den as f64))
}

fn require_psd<T: Real>(a: &HermitianMatrix<T>, name: &str) -> Result<()> {
    if is_psd(a, T::default_tol()) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} is not positive semidefinite")))
    }
}

/// `D(A×k, B×(n−k)) − det(A)^{k/n} det(B)^{(n−k)/n}`.
pub fn garding_gap<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>, k: usize) -> Result<T> {
    require_psd(a, "A")?;
    require_psd(b, "B")?;
    let n = a.dim;
    let mixed = mixed_determinant_pair(a, b, k)?;
    let mean = nonneg_power(determinant(a), k, n) * nonneg_power(determinant(b), n - k, n);
    Ok(mixed - mean)
}

/// `det(A+B)^{1/n} − det(A)^{1/n} − det(B)^{1/n}`.
pub fn minkowski_gap<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<T> {
    require_psd(a, "A")?;
    require_psd(b, "B")?;
    let n = a.dim;
    let sum = a.try_add(b)?;
    Ok(nonneg_power(determinant(&sum), 1, n) - nonneg_power(determinant(a), 1, n) - nonneg_power(determinant(b), 1, n))
}
