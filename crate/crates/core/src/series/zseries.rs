use crate::error::{Error, Result};

use super::{int, Matrix, Rat, Ring};

/// Matrix power series `Σ_{k<=K} c_k x^k` in one auxiliary variable, exact
/// modulo `x^{K+1}`. Used both for `z` and for `z^{-1}` expansions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZSeries<R> {
    coeffs: Vec<Matrix<R>>,
}

impl<R: Ring> ZSeries<R> {
    pub fn new(coeffs: Vec<Matrix<R>>) -> ZSeries<R> {
        assert!(!coeffs.is_empty(), "z-series needs a constant coefficient");
        ZSeries { coeffs }
    }

    pub fn zero(dim: usize, order: usize, template: &R) -> ZSeries<R> {
        ZSeries {
            coeffs: vec![Matrix::zero_like(dim, template); order + 1],
        }
    }

    pub fn identity(dim: usize, order: usize, template: &R) -> ZSeries<R> {
        let mut s = ZSeries::zero(dim, order, template);
        s.coeffs[0] = Matrix::identity_like(dim, template);
        s
    }

    /// Highest stored power `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    pub fn coeffs(&self) -> &[Matrix<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Matrix<R> {
        &self.coeffs[k]
    }

    /// Zero beyond the stored order.
    pub fn coeff_or_zero(&self, k: usize) -> Matrix<R> {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Matrix::zero_like(self.dim(), self.coeffs[0].get(0, 0)))
    }

    pub fn set(&mut self, k: usize, m: Matrix<R>) {
        self.coeffs[k] = m;
    }

    pub fn truncate(&self, order: usize) -> ZSeries<R> {
        ZSeries {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn map<S: Ring>(&self, f: impl FnMut(&Matrix<R>) -> Matrix<S>) -> ZSeries<S> {
        ZSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Product truncated at the smaller order.
    pub fn mul(&self, other: &ZSeries<R>) -> ZSeries<R> {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| {
                let mut acc = self.coeffs[0].mul(&other.coeffs[k]);
                for i in 1..=k {
                    let (a, b) = (&self.coeffs[i], &other.coeffs[k - i]);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                acc
            })
            .collect();
        ZSeries { coeffs }
    }

    pub fn add(&self, other: &ZSeries<R>) -> ZSeries<R> {
        let order = self.order().min(other.order());
        ZSeries {
            coeffs: (0..=order).map(|k| self.coeffs[k].add(&other.coeffs[k])).collect(),
        }
    }

    pub fn sub(&self, other: &ZSeries<R>) -> ZSeries<R> {
        let order = self.order().min(other.order());
        ZSeries {
            coeffs: (0..=order).map(|k| self.coeffs[k].sub(&other.coeffs[k])).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> ZSeries<R> {
        self.map(|m| m.scale(c))
    }

    /// `x ↦ -x`.
    pub fn negate_variable(&self) -> ZSeries<R> {
        ZSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        }
    }

    /// Multiplicative inverse; the constant coefficient must be invertible.
    pub fn inverse(&self) -> Result<ZSeries<R>> {
        let c0_inv = self.coeffs[0].inverse()?;
        let mut inv: Vec<Matrix<R>> = vec![c0_inv.clone()];
        for k in 1..=self.order() {
            let mut acc = self.coeffs[1].mul(&inv[k - 1]);
            for j in 2..=k {
                acc = acc.add(&self.coeffs[j].mul(&inv[k - j]));
            }
            inv.push(c0_inv.mul(&acc).neg());
        }
        Ok(ZSeries { coeffs: inv })
    }

    /// `exp(X)` for `X` with vanishing constant coefficient.
    pub fn exp(&self) -> Result<ZSeries<R>> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain("exp needs a nilpotent series (zero constant term)".into()));
        }
        let tmpl = self.coeffs[0].get(0, 0).clone();
        let mut acc = ZSeries::identity(self.dim(), self.order(), &tmpl);
        let mut term = acc.clone();
        for n in 1..=self.order() {
            term = term.mul(self).scale(&int(n as i64).recip());
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// `log(S)` for `S` with identity constant coefficient.
    pub fn log(&self) -> Result<ZSeries<R>> {
        let tmpl = self.coeffs[0].get(0, 0).clone();
        let id = ZSeries::identity(self.dim(), self.order(), &tmpl);
        if self.coeffs[0] != id.coeffs[0] {
            return Err(Error::Domain("log needs a unipotent series (identity constant term)".into()));
        }
        let x = self.sub(&id);
        let mut acc = ZSeries::zero(self.dim(), self.order(), &tmpl);
        let mut power = id;
        for n in 1..=self.order() {
            power = power.mul(&x);
            let c = int(if n % 2 == 1 { 1 } else { -1 }) / int(n as i64);
            acc = acc.add(&power.scale(&c));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ConstMatrix;

    fn sample() -> ZSeries<Rat> {
        ZSeries::new(vec![
            ConstMatrix::from_ints(&[&[2, 1], &[1, 1]]),
            ConstMatrix::from_ints(&[&[0, 3], &[-1, 2]]),
            ConstMatrix::from_ints(&[&[1, 0], &[5, -2]]),
            ConstMatrix::from_ints(&[&[4, 1], &[0, 1]]),
        ])
    }

    #[test]
    fn inverse_round_trip() {
        let s = sample();
        let p = s.mul(&s.inverse().unwrap());
        assert_eq!(p, ZSeries::identity(2, 3, &Rat::from_integer(0.into())));
    }

    #[test]
    fn exp_log_round_trip() {
        let mut x = sample();
        x.set(0, ConstMatrix::zeros(2));
        let e = x.exp().unwrap();
        assert_eq!(e.log().unwrap(), x);
        let back = x.scale(&int(-1)).exp().unwrap();
        assert_eq!(e.mul(&back), ZSeries::identity(2, 3, &int(0)));
    }
}
