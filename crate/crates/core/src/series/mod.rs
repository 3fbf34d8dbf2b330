//! Truncated multivariate power series over the rationals.
//!
//! A [`Series`] in `t^1..t^N` stores every coefficient of total degree at most
//! `D` in a dense vector laid out in graded-lex order. All series with the same
//! `(N, D)` share one interned [`Shape`] holding the monomial basis and the
//! product and derivative tables, so arithmetic is a table walk.

mod coord;
mod dual;
mod matrix;
mod ring;
mod zseries;

pub use coord::CoordinateMap;
pub use dual::DualSeries;
pub use matrix::{ConstMatrix, DualMatrix, Matrix, SeriesMatrix};
pub use ring::Ring;
pub use zseries::ZSeries;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational coefficient, always kept in lowest terms.
pub type Rat = BigRational;

/// Shorthand for the rational `n / d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// Exponent vector of a monomial `t^e`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// Graded-lex comparison: lower total degree first, then larger
    /// exponent of `t^1`, then of `t^2`, and so on.
    pub fn grlex_cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "t{}", k + 1)?;
            } else {
                write!(f, "t{}^{}", k + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Monomial basis and multiplication tables for a fixed `(N, D)`.
#[derive(Debug)]
pub struct Shape {
    num_vars: usize,
    trunc_degree: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// `degree_start[d]` is the position of the first monomial of degree `d`;
    /// the last entry is the basis size.
    degree_start: Vec<usize>,
    /// For each basis position `i`, the pairs `(j, k)` with `m_i * m_j = m_k`.
    products: Vec<Vec<(usize, usize)>>,
    /// `derivatives[var][i]` is `Some((k, e))` when `d/dt^var m_i = e * m'_k`
    /// in the basis of degree `D - 1`.
    derivatives: Vec<Vec<Option<(usize, u32)>>>,
}

fn monomials_of_degree(num_vars: usize, degree: usize, out: &mut Vec<Monomial>) {
    fn rec(prefix: &mut Vec<u32>, left: usize, remaining: usize, out: &mut Vec<Monomial>) {
        if remaining == 1 {
            prefix.push(left as u32);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e as u32);
            rec(prefix, left - e, remaining - 1, out);
            prefix.pop();
        }
    }
    if num_vars == 0 {
        if degree == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    rec(&mut Vec::with_capacity(num_vars), degree, num_vars, out);
}

impl Shape {
    fn build(num_vars: usize, trunc_degree: usize) -> Shape {
        let mut monomials = Vec::new();
        let mut degree_start = Vec::with_capacity(trunc_degree + 2);
        for d in 0..=trunc_degree {
            degree_start.push(monomials.len());
            monomials_of_degree(num_vars, d, &mut monomials);
        }
        degree_start.push(monomials.len());
        let index: HashMap<Monomial, usize> = monomials
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();

        let mut products = Vec::with_capacity(monomials.len());
        for mi in &monomials {
            let room = trunc_degree - mi.degree();
            let mut row = Vec::new();
            for (j, mj) in monomials[..degree_start[room + 1]].iter().enumerate() {
                let prod: Vec<u32> = mi.0.iter().zip(&mj.0).map(|(a, b)| a + b).collect();
                row.push((j, index[&Monomial(prod)]));
            }
            products.push(row);
        }

        let mut derivatives = Vec::with_capacity(num_vars);
        for var in 0..num_vars {
            let mut col = Vec::with_capacity(monomials.len());
            for m in &monomials {
                let e = m.0[var];
                if e == 0 {
                    col.push(None);
                } else {
                    let mut lowered = m.0.clone();
                    lowered[var] -= 1;
                    // The lowered monomial sits at the same position in the
                    // degree D-1 basis because that basis is a prefix.
                    col.push(Some((index[&Monomial(lowered)], e)));
                }
            }
            derivatives.push(col);
        }

        Shape {
            num_vars,
            trunc_degree,
            monomials,
            index,
            degree_start,
            products,
            derivatives,
        }
    }

    /// Interned shape for `(num_vars, trunc_degree)`.
    pub fn get(num_vars: usize, trunc_degree: usize) -> Arc<Shape> {
        static SHAPES: OnceLock<Mutex<HashMap<(usize, usize), Arc<Shape>>>> = OnceLock::new();
        let registry = SHAPES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = registry.lock().expect("shape registry poisoned");
        guard
            .entry((num_vars, trunc_degree))
            .or_insert_with(|| Arc::new(Shape::build(num_vars, trunc_degree)))
            .clone()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn trunc_degree(&self) -> usize {
        self.trunc_degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        if d > self.trunc_degree {
            return self.len()..self.len();
        }
        self.degree_start[d]..self.degree_start[d + 1]
    }
}

/// Truncated power series in `N` variables, exact modulo total degree `D + 1`.
#[derive(Clone)]
pub struct Series {
    shape: Arc<Shape>,
    coeffs: Vec<Rat>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars() == other.num_vars()
            && self.trunc_degree() == other.trunc_degree()
            && self.coeffs == other.coeffs
    }
}

impl Eq for Series {}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[N={}, D={}](", self.num_vars(), self.trunc_degree())?;
        write!(f, "{self}")?;
        write!(f, ")")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.terms() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let a = c.abs();
            if m.degree() == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Series {
    pub fn zero(num_vars: usize, trunc_degree: usize) -> Series {
        let shape = Shape::get(num_vars, trunc_degree);
        let coeffs = vec![Rat::zero(); shape.len()];
        Series { shape, coeffs }
    }

    pub fn constant(num_vars: usize, trunc_degree: usize, c: Rat) -> Series {
        let mut s = Series::zero(num_vars, trunc_degree);
        s.coeffs[0] = c;
        s
    }

    pub fn one(num_vars: usize, trunc_degree: usize) -> Series {
        Series::constant(num_vars, trunc_degree, Rat::one())
    }

    /// The coordinate `t^(k+1)`; `k` is zero-based.
    pub fn var(num_vars: usize, trunc_degree: usize, k: usize) -> Result<Series> {
        if k >= num_vars {
            return Err(Error::Domain(format!(
                "variable index {} out of range for {} variables",
                k + 1,
                num_vars
            )));
        }
        let mut e = vec![0; num_vars];
        e[k] = 1;
        Ok(Series::monomial(num_vars, trunc_degree, &e, Rat::one()))
    }

    /// `c * t^e`, or zero when the monomial exceeds the truncation degree.
    pub fn monomial(num_vars: usize, trunc_degree: usize, exponents: &[u32], c: Rat) -> Series {
        assert_eq!(exponents.len(), num_vars, "exponent vector length");
        let mut s = Series::zero(num_vars, trunc_degree);
        if let Some(i) = s.shape.position(&Monomial(exponents.to_vec())) {
            s.coeffs[i] = c;
        }
        s
    }

    /// Builds a series from `(exponents, coefficient)` pairs; repeated
    /// monomials are summed and monomials above degree `D` are dropped.
    pub fn from_terms<'a, I>(num_vars: usize, trunc_degree: usize, terms: I) -> Result<Series>
    where
        I: IntoIterator<Item = (&'a [u32], Rat)>,
    {
        let mut s = Series::zero(num_vars, trunc_degree);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::Shape(format!(
                    "exponent vector of length {} in a series of {} variables",
                    e.len(),
                    num_vars
                )));
            }
            if let Some(i) = s.shape.position(&Monomial(e.to_vec())) {
                s.coeffs[i] += c;
            }
        }
        Ok(s)
    }

    pub fn num_vars(&self) -> usize {
        self.shape.num_vars
    }

    pub fn trunc_degree(&self) -> usize {
        self.shape.trunc_degree
    }

    pub fn shape(&self) -> &Arc<Shape> {
        &self.shape
    }

    pub fn same_shape(&self, other: &Series) -> bool {
        self.num_vars() == other.num_vars() && self.trunc_degree() == other.trunc_degree()
    }

    fn check_shape(&self, other: &Series, op: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{op}: (N={}, D={}) vs (N={}, D={})",
                self.num_vars(),
                self.trunc_degree(),
                other.num_vars(),
                other.trunc_degree()
            )))
        }
    }

    pub fn coeff(&self, exponents: &[u32]) -> Rat {
        self.shape
            .position(&Monomial(exponents.to_vec()))
            .map(|i| self.coeffs[i].clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> &Rat {
        &self.coeffs[0]
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.shape
            .monomials
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.terms().next().map(|(m, _)| m.degree())
    }

    /// True when every stored term has total degree at least `d`.
    pub fn has_order_at_least(&self, d: usize) -> bool {
        self.order().is_none_or(|o| o >= d)
    }

    /// First nonzero term of degree below `d`, if any.
    pub fn first_term_below(&self, d: usize) -> Option<(Monomial, Rat)> {
        self.terms()
            .find(|(m, _)| m.degree() < d)
            .map(|(m, c)| (m.clone(), c.clone()))
    }

    /// The homogeneous component of degree `d`, in the same shape.
    pub fn homogeneous_part(&self, d: usize) -> Series {
        let mut out = self.zero_like();
        for i in self.shape.degree_range(d) {
            out.coeffs[i] = self.coeffs[i].clone();
        }
        out
    }

    /// Terms of degree at least `d`.
    pub fn tail_from(&self, d: usize) -> Series {
        let mut out = self.clone();
        let end = self.shape.degree_start[d.min(self.trunc_degree() + 1)];
        for c in &mut out.coeffs[..end] {
            *c = Rat::zero();
        }
        out
    }

    pub fn zero_like(&self) -> Series {
        Series {
            shape: self.shape.clone(),
            coeffs: vec![Rat::zero(); self.shape.len()],
        }
    }

    pub fn constant_like(&self, c: Rat) -> Series {
        let mut s = self.zero_like();
        s.coeffs[0] = c;
        s
    }

    /// Re-truncates at degree `d <= D`.
    pub fn truncate(&self, d: usize) -> Series {
        assert!(
            d <= self.trunc_degree(),
            "cannot raise truncation degree from {} to {}",
            self.trunc_degree(),
            d
        );
        let shape = Shape::get(self.num_vars(), d);
        let coeffs = self.coeffs[..shape.len()].to_vec();
        Series { shape, coeffs }
    }

    /// Embeds into a higher truncation degree, padding with zeros. The new
    /// top-degree coefficients are not known information; callers use this
    /// only for series that are exact polynomials.
    pub fn pad_to(&self, d: usize) -> Series {
        assert!(d >= self.trunc_degree());
        let shape = Shape::get(self.num_vars(), d);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(shape.len(), Rat::zero());
        Series { shape, coeffs }
    }

    pub fn checked_add(&self, other: &Series) -> Result<Series> {
        self.check_shape(other, "add")?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Series) -> Result<Series> {
        self.check_shape(other, "sub")?;
        Ok(self.sub_unchecked(other))
    }

    pub fn checked_mul(&self, other: &Series) -> Result<Series> {
        self.check_shape(other, "mul")?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Series) -> Series {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Series {
            shape: self.shape.clone(),
            coeffs,
        }
    }

    fn sub_unchecked(&self, other: &Series) -> Series {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Series {
            shape: self.shape.clone(),
            coeffs,
        }
    }

    fn mul_unchecked(&self, other: &Series) -> Series {
        let mut out = self.zero_like();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, k) in &self.shape.products[i] {
                let b = &other.coeffs[j];
                if !b.is_zero() {
                    out.coeffs[k] += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Series {
        if c.is_zero() {
            return self.zero_like();
        }
        Series {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, e: usize) -> Series {
        let mut acc = self.constant_like(Rat::one());
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Formal partial derivative in `t^(k+1)` (zero-based `k`). The result is
    /// exact only up to degree `D - 1` and is stored with that truncation.
    pub fn partial(&self, k: usize) -> Result<Series> {
        if k >= self.num_vars() {
            return Err(Error::Domain(format!(
                "partial derivative in t{} of a series in {} variables",
                k + 1,
                self.num_vars()
            )));
        }
        if self.trunc_degree() == 0 {
            return Err(Error::Domain(
                "partial derivative of a degree-0 truncation carries no information".into(),
            ));
        }
        let mut out = Series::zero(self.num_vars(), self.trunc_degree() - 1);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some((k2, e)) = self.shape.derivatives[k][i] {
                if k2 < out.coeffs.len() {
                    out.coeffs[k2] += c * Rat::from_integer(BigInt::from(e));
                }
            }
        }
        Ok(out)
    }

    /// `a * t^e` added in place; ignored beyond the truncation degree.
    pub fn add_term(&mut self, exponents: &[u32], c: &Rat) {
        if let Some(i) = self.shape.position(&Monomial(exponents.to_vec())) {
            self.coeffs[i] += c;
        }
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.checked_add(rhs).expect("series add")
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.checked_sub(rhs).expect("series sub")
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.checked_mul(rhs).expect("series mul")
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
