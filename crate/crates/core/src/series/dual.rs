use crate::error::{Error, Result};

use super::{Monomial, Rat, Ring, Series};

/// `value + ε·epsilon` with `ε² = 0`.
///
/// Running any polynomial pipeline over dual series and reading off the
/// ε-part yields its exact directional derivative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualSeries {
    pub value: Series,
    pub epsilon: Series,
}

impl DualSeries {
    pub fn new(value: Series, epsilon: Series) -> Result<DualSeries> {
        if !value.same_shape(&epsilon) {
            return Err(Error::Shape(
                "dual series parts must share (N, D)".to_string(),
            ));
        }
        Ok(DualSeries { value, epsilon })
    }

    /// Lifts a series with zero ε-part.
    pub fn lift(value: Series) -> DualSeries {
        let epsilon = value.zero_like();
        DualSeries { value, epsilon }
    }

    pub fn extract_epsilon(&self) -> &Series {
        &self.epsilon
    }

    pub fn checked_mul(&self, other: &DualSeries) -> Result<DualSeries> {
        if !self.value.same_shape(&other.value) {
            return Err(Error::Shape("dual mul".into()));
        }
        Ok(Ring::mul(self, other))
    }
}

impl Ring for DualSeries {
    fn num_vars(&self) -> usize {
        self.value.num_vars()
    }
    fn trunc_degree(&self) -> usize {
        self.value.trunc_degree()
    }
    fn zero_like(&self) -> Self {
        DualSeries::lift(self.value.zero_like())
    }
    fn rat_like(&self, c: &Rat) -> Self {
        DualSeries::lift(self.value.constant_like(c.clone()))
    }
    fn is_null(&self) -> bool {
        self.value.is_zero() && self.epsilon.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        DualSeries {
            value: &self.value + &other.value,
            epsilon: &self.epsilon + &other.epsilon,
        }
    }
    fn sub(&self, other: &Self) -> Self {
        DualSeries {
            value: &self.value - &other.value,
            epsilon: &self.epsilon - &other.epsilon,
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let value = &self.value * &other.value;
        let epsilon = &(&self.value * &other.epsilon) + &(&self.epsilon * &other.value);
        DualSeries { value, epsilon }
    }
    fn neg(&self) -> Self {
        DualSeries {
            value: -&self.value,
            epsilon: -&self.epsilon,
        }
    }
    fn scale(&self, c: &Rat) -> Self {
        DualSeries {
            value: self.value.scale(c),
            epsilon: self.epsilon.scale(c),
        }
    }
    fn partial(&self, k: usize) -> Self {
        DualSeries {
            value: Ring::partial(&self.value, k),
            epsilon: Ring::partial(&self.epsilon, k),
        }
    }
    fn truncate(&self, d: usize) -> Self {
        DualSeries {
            value: self.value.truncate(d),
            epsilon: self.epsilon.truncate(d),
        }
    }
    fn constant_rat(&self) -> Rat {
        self.value.constant_term().clone()
    }
    fn has_order_at_least(&self, d: usize) -> bool {
        self.value.has_order_at_least(d) && self.epsilon.has_order_at_least(d)
    }
    fn first_term(&self) -> Option<(Monomial, Rat)> {
        Ring::first_term(&self.value).or_else(|| Ring::first_term(&self.epsilon))
    }
}
