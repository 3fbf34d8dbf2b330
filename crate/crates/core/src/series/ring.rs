use std::fmt::Debug;

use num_traits::{One, Zero};

use super::{Monomial, Rat, Series};

/// Coefficient ring for matrices, towers and wave functions.
///
/// Implemented by [`Series`], by [`super::DualSeries`] (for exact first
/// derivatives along a deformation) and by [`Rat`] (constant matrices).
/// Binary operations assume both operands have the same truncation shape and
/// panic otherwise; shape-checked entry points live on [`Series`].
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn num_vars(&self) -> usize;
    fn trunc_degree(&self) -> usize;
    fn zero_like(&self) -> Self;
    /// The constant `c` in the same shape as `self`.
    fn rat_like(&self, c: &Rat) -> Self;
    fn is_null(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Rat) -> Self;
    /// Partial derivative in the zero-based variable `k`.
    fn partial(&self, k: usize) -> Self;
    fn truncate(&self, d: usize) -> Self;
    /// Constant term of the primal part.
    fn constant_rat(&self) -> Rat;
    /// True when the primal part has no terms of degree below `d`.
    fn has_order_at_least(&self, d: usize) -> bool;
    /// Lowest nonzero term, used to locate counterexamples. Dual numbers
    /// report their ε-part when the primal part vanishes.
    fn first_term(&self) -> Option<(Monomial, Rat)>;

    fn one_like(&self) -> Self {
        self.rat_like(&Rat::one())
    }
}

impl Ring for Series {
    fn num_vars(&self) -> usize {
        Series::num_vars(self)
    }
    fn trunc_degree(&self) -> usize {
        Series::trunc_degree(self)
    }
    fn zero_like(&self) -> Self {
        Series::zero_like(self)
    }
    fn rat_like(&self, c: &Rat) -> Self {
        self.constant_like(c.clone())
    }
    fn is_null(&self) -> bool {
        Series::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rat) -> Self {
        Series::scale(self, c)
    }
    fn partial(&self, k: usize) -> Self {
        Series::partial(self, k).expect("partial derivative")
    }
    fn truncate(&self, d: usize) -> Self {
        Series::truncate(self, d)
    }
    fn constant_rat(&self) -> Rat {
        self.constant_term().clone()
    }
    fn has_order_at_least(&self, d: usize) -> bool {
        Series::has_order_at_least(self, d)
    }
    fn first_term(&self) -> Option<(Monomial, Rat)> {
        self.terms().next().map(|(m, c)| (m.clone(), c.clone()))
    }
}

impl Ring for Rat {
    fn num_vars(&self) -> usize {
        0
    }
    fn trunc_degree(&self) -> usize {
        0
    }
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn rat_like(&self, c: &Rat) -> Self {
        c.clone()
    }
    fn is_null(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rat) -> Self {
        self * c
    }
    fn partial(&self, _k: usize) -> Self {
        Rat::zero()
    }
    fn truncate(&self, _d: usize) -> Self {
        self.clone()
    }
    fn constant_rat(&self) -> Rat {
        self.clone()
    }
    fn has_order_at_least(&self, d: usize) -> bool {
        d == 0 || Zero::is_zero(self)
    }
    fn first_term(&self) -> Option<(Monomial, Rat)> {
        (!Zero::is_zero(self)).then(|| (Monomial::one(0), self.clone()))
    }
}
