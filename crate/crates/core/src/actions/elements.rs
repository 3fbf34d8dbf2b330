use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::{int, ConstMatrix, Matrix, Rat, ZSeries};

fn check_dims(coeffs: &BTreeMap<usize, ConstMatrix>) -> Result<usize> {
    let mut dims = coeffs.values().map(Matrix::dim);
    let Some(m) = dims.next() else {
        return Ok(0);
    };
    if dims.any(|d| d != m) {
        return Err(Error::Shape("group element coefficients differ in size".into()));
    }
    Ok(m)
}

fn drop_zeros(coeffs: BTreeMap<usize, ConstMatrix>) -> BTreeMap<usize, ConstMatrix> {
    coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// `r(z) = Σ_l r_l z^l`, an element of the upper triangular Lie algebra.
///
/// Indices are `l >= 1` except for elements built by [`GPlusElement::divided_by_z`]
/// or [`GPlusElement::with_zero_slot`], which may carry an `l = 0` term acting
/// by commutator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GPlusElement {
    dim: usize,
    coeffs: BTreeMap<usize, ConstMatrix>,
}

impl GPlusElement {
    pub fn new(dim: usize, coeffs: impl IntoIterator<Item = (usize, ConstMatrix)>) -> Result<GPlusElement> {
        let coeffs: BTreeMap<usize, ConstMatrix> = coeffs.into_iter().collect();
        if coeffs.contains_key(&0) {
            return Err(Error::Domain("upper triangular elements start at z^1".into()));
        }
        GPlusElement::with_zero_slot(dim, coeffs)
    }

    /// Like [`GPlusElement::new`] but admits a `z^0` coefficient.
    pub fn with_zero_slot(
        dim: usize,
        coeffs: impl IntoIterator<Item = (usize, ConstMatrix)>,
    ) -> Result<GPlusElement> {
        let coeffs: BTreeMap<usize, ConstMatrix> = coeffs.into_iter().collect();
        let d = check_dims(&coeffs)?;
        if d != 0 && d != dim {
            return Err(Error::Shape(format!("coefficients are {d}x{d}, expected {dim}x{dim}")));
        }
        Ok(GPlusElement {
            dim,
            coeffs: drop_zeros(coeffs),
        })
    }

    pub fn zero(dim: usize) -> GPlusElement {
        GPlusElement {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// `r_l z^l`.
    pub fn single(l: usize, r: ConstMatrix) -> Result<GPlusElement> {
        let dim = r.dim();
        GPlusElement::new(dim, [(l, r)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &ConstMatrix)> {
        self.coeffs.iter().map(|(l, c)| (*l, c))
    }

    pub fn coeff(&self, l: usize) -> Option<&ConstMatrix> {
        self.coeffs.get(&l)
    }

    /// Largest index carrying a nonzero coefficient, or 0.
    pub fn max_index(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Rat) -> GPlusElement {
        GPlusElement {
            dim: self.dim,
            coeffs: drop_zeros(self.coeffs.iter().map(|(l, m)| (*l, m.scale(c))).collect()),
        }
    }

    pub fn neg(&self) -> GPlusElement {
        self.scale(&int(-1))
    }

    /// `r(z)/z = Σ_l r_l z^{l-1}`; a `z^0` term is dropped.
    pub fn divided_by_z(&self) -> GPlusElement {
        GPlusElement {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(l, _)| **l > 0)
                .map(|(l, m)| (l - 1, m.clone()))
                .collect(),
        }
    }
}

/// `s(z) = Σ_{l>=1} s_l z^{-l}`, an element of the lower triangular Lie algebra.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GMinusElement {
    dim: usize,
    coeffs: BTreeMap<usize, ConstMatrix>,
}

impl GMinusElement {
    pub fn new(dim: usize, coeffs: impl IntoIterator<Item = (usize, ConstMatrix)>) -> Result<GMinusElement> {
        let coeffs: BTreeMap<usize, ConstMatrix> = coeffs.into_iter().collect();
        if coeffs.contains_key(&0) {
            return Err(Error::Domain("lower triangular elements start at z^-1".into()));
        }
        let d = check_dims(&coeffs)?;
        if d != 0 && d != dim {
            return Err(Error::Shape(format!("coefficients are {d}x{d}, expected {dim}x{dim}")));
        }
        Ok(GMinusElement {
            dim,
            coeffs: drop_zeros(coeffs),
        })
    }

    pub fn zero(dim: usize) -> GMinusElement {
        GMinusElement {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// `s_l z^{-l}`.
    pub fn single(l: usize, s: ConstMatrix) -> Result<GMinusElement> {
        let dim = s.dim();
        GMinusElement::new(dim, [(l, s)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &ConstMatrix)> {
        self.coeffs.iter().map(|(l, c)| (*l, c))
    }

    pub fn coeff(&self, l: usize) -> Option<&ConstMatrix> {
        self.coeffs.get(&l)
    }

    pub fn max_index(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Rat) -> GMinusElement {
        GMinusElement {
            dim: self.dim,
            coeffs: drop_zeros(self.coeffs.iter().map(|(l, m)| (*l, m.scale(c))).collect()),
        }
    }

    pub fn neg(&self) -> GMinusElement {
        self.scale(&int(-1))
    }

    /// As a series in `w = z^{-1}` truncated at `w^depth`.
    pub fn to_zseries(&self, depth: usize) -> ZSeries<Rat> {
        let mut out = ZSeries::zero(self.dim, depth, &int(0));
        for (l, c) in self.coeffs() {
            if l <= depth {
                out.set(l, c.clone());
            }
        }
        out
    }

    pub fn from_zseries(s: &ZSeries<Rat>) -> Result<GMinusElement> {
        if !s.coeff(0).is_zero() {
            return Err(Error::Domain("Lie algebra element has a z^0 term".into()));
        }
        GMinusElement::new(s.dim(), (1..=s.order()).map(|l| (l, s.coeff(l).clone())))
    }
}

/// `S(z) = I + Σ_{l>=1} S_l z^{-l}` in the lower triangular group, stored to
/// depth `z^{-K}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GMinusGroup {
    series: ZSeries<Rat>,
}

impl GMinusGroup {
    pub fn identity(dim: usize, depth: usize) -> GMinusGroup {
        GMinusGroup {
            series: ZSeries::identity(dim, depth, &int(0)),
        }
    }

    /// From the coefficients `S_1, …, S_K`.
    pub fn from_coeffs(dim: usize, coeffs: Vec<ConstMatrix>) -> Result<GMinusGroup> {
        let mut all = vec![ConstMatrix::identity(dim)];
        for c in coeffs {
            if c.dim() != dim {
                return Err(Error::Shape("group coefficient size".into()));
            }
            all.push(c);
        }
        Ok(GMinusGroup {
            series: ZSeries::new(all),
        })
    }

    pub fn from_zseries(series: ZSeries<Rat>) -> Result<GMinusGroup> {
        if *series.coeff(0) != ConstMatrix::identity(series.dim()) {
            return Err(Error::Domain("group element must start with the identity".into()));
        }
        Ok(GMinusGroup { series })
    }

    pub fn exp(s: &GMinusElement, depth: usize) -> GMinusGroup {
        GMinusGroup {
            series: s.to_zseries(depth).exp().expect("nilpotent"),
        }
    }

    pub fn log(&self) -> GMinusElement {
        GMinusElement::from_zseries(&self.series.log().expect("unipotent")).expect("no z^0 term")
    }

    pub fn series(&self) -> &ZSeries<Rat> {
        &self.series
    }

    pub fn depth(&self) -> usize {
        self.series.order()
    }

    pub fn dim(&self) -> usize {
        self.series.dim()
    }

    pub fn is_identity(&self) -> bool {
        *self == GMinusGroup::identity(self.dim(), self.depth())
    }
}

/// An invertible constant matrix acting by conjugation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GLElement {
    matrix: ConstMatrix,
    inverse: ConstMatrix,
}

impl GLElement {
    pub fn new(matrix: ConstMatrix) -> Result<GLElement> {
        let inverse = matrix.rat_inverse()?;
        Ok(GLElement { matrix, inverse })
    }

    pub fn identity(dim: usize) -> GLElement {
        GLElement {
            matrix: ConstMatrix::identity(dim),
            inverse: ConstMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ConstMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &ConstMatrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn inverted(&self) -> GLElement {
        GLElement {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
        }
    }
}
