use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::{DualSeries, Monomial, Rat, Ring, Series};

/// Square matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<R> {
    dim: usize,
    entries: Vec<R>,
}

pub type SeriesMatrix = Matrix<Series>;
pub type DualMatrix = Matrix<DualSeries>;
pub type ConstMatrix = Matrix<Rat>;

impl<R> Matrix<R> {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Matrix { dim, entries }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix must be square");
            entries.extend(row);
        }
        Matrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &R> {
        self.entries.iter()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[R]> {
        self.entries.chunks(self.dim.max(1))
    }

    pub fn map<S>(&self, f: impl FnMut(&R) -> S) -> Matrix<S> {
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<R: Ring> Matrix<R> {
    pub fn zero_like(dim: usize, template: &R) -> Self {
        Matrix::from_fn(dim, |_, _| template.zero_like())
    }

    pub fn identity_like(dim: usize, template: &R) -> Self {
        Matrix::from_fn(dim, |i, j| {
            if i == j {
                template.one_like()
            } else {
                template.zero_like()
            }
        })
    }

    /// Embeds a constant matrix into the coefficient ring of `template`.
    pub fn lift_const(c: &ConstMatrix, template: &R) -> Self {
        c.map(|x| template.rat_like(x))
    }

    pub fn template(&self) -> &R {
        &self.entries[0]
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        Matrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        Matrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        Matrix::from_fn(n, |i, j| {
            let mut acc = self.get(i, 0).mul(other.get(0, j));
            for k in 1..n {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if a.is_null() || b.is_null() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            acc
        })
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map(|a| a.scale(c))
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> R {
        let mut acc = self.template().zero_like();
        for i in 0..self.dim {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Matrix::identity_like(self.dim, self.template());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Ring::is_null)
    }

    pub fn partial(&self, k: usize) -> Self {
        self.map(|a| a.partial(k))
    }

    pub fn truncate(&self, d: usize) -> Self {
        self.map(|a| a.truncate(d))
    }

    pub fn num_vars(&self) -> usize {
        self.template().num_vars()
    }

    pub fn trunc_degree(&self) -> usize {
        self.template().trunc_degree()
    }

    /// Constant terms of the primal parts.
    pub fn constant_part(&self) -> ConstMatrix {
        self.map(Ring::constant_rat)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j).is_null()))
    }

    pub fn has_order_at_least(&self, d: usize) -> bool {
        self.entries.iter().all(|e| e.has_order_at_least(d))
    }

    /// First nonzero entry `(i, j)` with its lowest term.
    pub fn first_nonzero(&self) -> Option<(usize, usize, Monomial, Rat)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if let Some((m, c)) = self.get(i, j).first_term() {
                    return Some((i, j, m, c));
                }
            }
        }
        None
    }

    /// Inverse by a Neumann series around the constant term, which must be
    /// invertible over the rationals. The series terminates because the
    /// remainder has positive order.
    pub fn inverse(&self) -> Result<Self> {
        let c_inv = self.constant_part().rat_inverse()?;
        let tmpl = self.template();
        let c_inv = Matrix::lift_const(&c_inv, tmpl);
        let id = Matrix::identity_like(self.dim, tmpl);
        let nil = id.sub(&c_inv.mul(self));
        let mut term = c_inv.clone();
        let mut acc = c_inv;
        // For dual entries the ε-part may have order zero, so allow one extra
        // round beyond the truncation degree.
        for _ in 0..=self.trunc_degree() + 1 {
            term = nil.mul(&term);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

impl SeriesMatrix {
    /// First entry and monomial where `self` and `other` differ.
    pub fn first_difference(&self, other: &SeriesMatrix) -> Option<(usize, usize, Monomial)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = self.get(i, j) - other.get(i, j);
                let first = d.terms().next().map(|(m, _)| m.clone());
                if let Some(m) = first {
                    return Some((i, j, m));
                }
            }
        }
        None
    }

    /// Pairs a value matrix with an ε-part.
    pub fn dual(value: &SeriesMatrix, epsilon: &SeriesMatrix) -> DualMatrix {
        assert_eq!(value.dim, epsilon.dim);
        Matrix {
            dim: value.dim,
            entries: value
                .entries
                .iter()
                .zip(&epsilon.entries)
                .map(|(v, e)| DualSeries::new(v.clone(), e.clone()).expect("dual shapes"))
                .collect(),
        }
    }

    pub fn lift_dual(&self) -> DualMatrix {
        self.map(|s| DualSeries::lift(s.clone()))
    }
}

impl DualMatrix {
    pub fn value(&self) -> SeriesMatrix {
        self.map(|d| d.value.clone())
    }

    pub fn epsilon(&self) -> SeriesMatrix {
        self.map(|d| d.epsilon.clone())
    }
}

impl ConstMatrix {
    pub fn identity(dim: usize) -> Self {
        Matrix::from_fn(dim, |i, j| if i == j { Rat::one() } else { Rat::zero() })
    }

    pub fn zeros(dim: usize) -> Self {
        Matrix::from_fn(dim, |_, _| Rat::zero())
    }

    /// Elementary matrix `E_{ij}` (zero-based).
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        Matrix::from_fn(dim, |a, b| if a == i && b == j { Rat::one() } else { Rat::zero() })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| super::int(x)).collect())
                .collect(),
        )
    }

    /// Gauss-Jordan inverse over the rationals.
    pub fn rat_inverse(&self) -> Result<ConstMatrix> {
        let n = self.dim;
        let mut a: Vec<Vec<Rat>> = self.rows().map(|r| r.to_vec()).collect();
        let mut inv: Vec<Vec<Rat>> = ConstMatrix::identity(n).rows().map(|r| r.to_vec()).collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::Domain("matrix is singular over Q".into()))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x /= &p;
            }
            for x in inv[col].iter_mut() {
                *x /= &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..n {
                    let av = &a[col][c] * &f;
                    a[r][c] -= av;
                    let iv = &inv[col][c] * &f;
                    inv[r][c] -= iv;
                }
            }
        }
        Ok(Matrix::from_rows(inv))
    }

    pub fn det(&self) -> Rat {
        let n = self.dim;
        let mut a: Vec<Vec<Rat>> = self.rows().map(|r| r.to_vec()).collect();
        let mut det = Rat::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rat::zero();
            };
            if pivot != col {
                a.swap(col, pivot);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &p;
                for c in col..n {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
            }
        }
        det
    }
}
