use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::{ConstMatrix, Matrix, Rat, Series};

/// A formal change of coordinates `t ↦ (f_1(t), …, f_N(t))` fixing the origin.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoordinateMap {
    components: Vec<Series>,
}

impl CoordinateMap {
    /// Validates that there are `N` components of shape `(N, D)` with zero
    /// constant terms.
    pub fn new(components: Vec<Series>) -> Result<CoordinateMap> {
        let n = components.len();
        if n == 0 {
            return Err(Error::Domain("coordinate map needs at least one variable".into()));
        }
        let d = components[0].trunc_degree();
        for (k, c) in components.iter().enumerate() {
            if c.num_vars() != n || c.trunc_degree() != d {
                return Err(Error::Shape(format!(
                    "component {} has (N={}, D={}), expected (N={n}, D={d})",
                    k + 1,
                    c.num_vars(),
                    c.trunc_degree()
                )));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::Domain(format!(
                    "component {} has nonzero constant term {}",
                    k + 1,
                    c.constant_term()
                )));
            }
        }
        Ok(CoordinateMap { components })
    }

    pub fn identity(num_vars: usize, trunc_degree: usize) -> CoordinateMap {
        let components = (0..num_vars)
            .map(|k| Series::var(num_vars, trunc_degree, k).expect("in range"))
            .collect();
        CoordinateMap { components }
    }

    pub fn components(&self) -> &[Series] {
        &self.components
    }

    pub fn num_vars(&self) -> usize {
        self.components.len()
    }

    pub fn trunc_degree(&self) -> usize {
        self.components[0].trunc_degree()
    }

    pub fn is_identity(&self) -> bool {
        *self == CoordinateMap::identity(self.num_vars(), self.trunc_degree())
    }

    /// Linear part: entry `(i, j)` is the coefficient of `t^j` in `f_i`.
    pub fn jacobian(&self) -> ConstMatrix {
        let n = self.num_vars();
        Matrix::from_fn(n, |i, j| {
            let mut e = vec![0; n];
            e[j] = 1;
            self.components[i].coeff(&e)
        })
    }

    /// `a ∘ self`, i.e. `a(f_1(t), …, f_N(t))`, truncated at `D`.
    pub fn substitute(&self, a: &Series) -> Result<Series> {
        if a.num_vars() != self.num_vars() {
            return Err(Error::Shape(format!(
                "substituting {} coordinates into a series of {} variables",
                self.num_vars(),
                a.num_vars()
            )));
        }
        let d = a.trunc_degree();
        if self.trunc_degree() < d {
            return Err(Error::Shape(format!(
                "coordinate map known to degree {} cannot be substituted at degree {d}",
                self.trunc_degree()
            )));
        }
        let comps: Vec<Series> = self.components.iter().map(|c| c.truncate(d)).collect();
        // powers[k][e] = f_k^e; powers above D vanish since f_k(0) = 0.
        let powers: Vec<Vec<Series>> = comps
            .iter()
            .map(|c| {
                let mut row = vec![c.constant_like(Rat::one())];
                for e in 1..=d {
                    let next = &row[e - 1] * c;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut out = a.zero_like();
        for (m, c) in a.terms() {
            let mut term = a.constant_like(c.clone());
            for (k, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[k][e as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &CoordinateMap) -> Result<CoordinateMap> {
        let components = self
            .components
            .iter()
            .map(|c| inner.substitute(c))
            .collect::<Result<Vec<_>>>()?;
        CoordinateMap::new(components)
    }

    /// Compositional inverse modulo degree `D + 1`, verified in both orders.
    ///
    /// Writing `f = L t + h(t)`, the iteration `g ↦ L⁻¹(t − h(g))` fixes one
    /// more degree per round.
    pub fn invert(&self) -> Result<CoordinateMap> {
        let n = self.num_vars();
        let d = self.trunc_degree();
        let l_inv = self
            .jacobian()
            .rat_inverse()
            .map_err(|_| Error::Domain("coordinate map has singular linear part".into()))?;
        let id = CoordinateMap::identity(n, d);
        let nonlinear: Vec<Series> = self.components.iter().map(|c| c.tail_from(2)).collect();
        let apply_l_inv = |v: &[Series]| -> Vec<Series> {
            (0..n)
                .map(|i| {
                    let mut acc = v[0].zero_like();
                    for (j, vj) in v.iter().enumerate() {
                        acc = &acc + &vj.scale(l_inv.get(i, j));
                    }
                    acc
                })
                .collect()
        };
        let mut g = CoordinateMap {
            components: apply_l_inv(&id.components),
        };
        for _ in 1..d {
            let hg = nonlinear
                .iter()
                .map(|h| g.substitute(h))
                .collect::<Result<Vec<_>>>()?;
            let rhs: Vec<Series> = id.components.iter().zip(&hg).map(|(t, h)| t - h).collect();
            g = CoordinateMap {
                components: apply_l_inv(&rhs),
            };
        }
        if self.compose(&g)? != id || g.compose(self)? != id {
            return Err(Error::Domain("coordinate inversion failed to round-trip".into()));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat};

    fn t(n: usize, d: usize, k: usize) -> Series {
        Series::var(n, d, k).unwrap()
    }

    #[test]
    fn identity_substitution() {
        let a = &(&t(2, 3, 0) * &t(2, 3, 1)) + &Series::one(2, 3);
        assert_eq!(CoordinateMap::identity(2, 3).substitute(&a).unwrap(), a);
    }

    #[test]
    fn linear_input() {
        let x = t(1, 3, 0);
        let f = CoordinateMap::new(vec![&x + &(&x * &x)]).unwrap();
        assert_eq!(f.substitute(&x).unwrap(), &x + &(&x * &x));
    }

    #[test]
    fn square_of_sum() {
        let f = CoordinateMap::new(vec![&t(2, 2, 0) + &t(2, 2, 1), t(2, 2, 1)]).unwrap();
        let a = Series::monomial(2, 2, &[2, 0], int(1));
        let expected = Series::from_terms(
            2,
            2,
            [
                (&[2u32, 0][..], int(1)),
                (&[1, 1][..], int(2)),
                (&[0, 2][..], int(1)),
            ],
        )
        .unwrap();
        assert_eq!(f.substitute(&a).unwrap(), expected);
    }

    #[test]
    fn constant_term_rejected() {
        let c = &t(1, 2, 0) + &Series::one(1, 2);
        assert!(matches!(CoordinateMap::new(vec![c]), Err(Error::Domain(_))));
    }

    #[test]
    fn inverses() {
        let id = CoordinateMap::identity(2, 4);
        assert_eq!(id.invert().unwrap(), id);

        let lin = CoordinateMap::new(vec![t(1, 3, 0).scale(&int(2))]).unwrap();
        assert_eq!(
            lin.invert().unwrap().components()[0],
            t(1, 3, 0).scale(&rat(1, 2))
        );

        let x = t(1, 3, 0);
        let f = CoordinateMap::new(vec![&x + &(&x * &x)]).unwrap();
        let g = f.invert().unwrap();
        let expected = Series::from_terms(
            1,
            3,
            [(&[1u32][..], int(1)), (&[2][..], int(-1)), (&[3][..], int(2))],
        )
        .unwrap();
        assert_eq!(g.components()[0], expected);
    }

    #[test]
    fn singular_linear_part() {
        let f = CoordinateMap::new(vec![t(2, 3, 0), t(2, 3, 0)]).unwrap();
        assert!(matches!(f.invert(), Err(Error::Domain(_))));
    }
}
