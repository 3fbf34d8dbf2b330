use std::collections::BTreeMap;
use std::fmt;

use crate::series::{int, Matrix, Rat, Series};

use super::Tower;

/// Formal variable `p_{a,μ}` or `q_b^ν`; components are zero-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PQVar {
    P { index: usize, comp: usize },
    Q { index: usize, comp: usize },
}

impl PQVar {
    pub fn p(index: usize, comp: usize) -> PQVar {
        PQVar::P { index, comp }
    }

    pub fn q(index: usize, comp: usize) -> PQVar {
        PQVar::Q { index, comp }
    }

    pub fn index(&self) -> usize {
        match *self {
            PQVar::P { index, .. } | PQVar::Q { index, .. } => index,
        }
    }
}

impl fmt::Display for PQVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PQVar::P { index, comp } => write!(f, "p{index}_{}", comp + 1),
            PQVar::Q { index, comp } => write!(f, "q{index}^{}", comp + 1),
        }
    }
}

/// Polynomial in the `p`, `q` variables with series coefficients. Keys are
/// sorted variable multisets; the empty key is the `p,q`-free part.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PQPolynomial {
    num_vars: usize,
    trunc_degree: usize,
    /// Bilinear terms `p_a q_b` are meaningful for `a + b <= window`.
    window: usize,
    terms: BTreeMap<Vec<PQVar>, Series>,
}

impl PQPolynomial {
    pub fn zero(num_vars: usize, trunc_degree: usize, window: usize) -> PQPolynomial {
        PQPolynomial {
            num_vars,
            trunc_degree,
            window,
            terms: BTreeMap::new(),
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn trunc_degree(&self) -> usize {
        self.trunc_degree
    }

    /// Adds `c * Π vars`.
    pub fn add_term(&mut self, vars: &[PQVar], c: &Series) {
        if c.is_zero() {
            return;
        }
        let mut key = vars.to_vec();
        key.sort();
        match self.terms.get_mut(&key) {
            Some(existing) => {
                *existing = &*existing + c;
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn coeff(&self, vars: &[PQVar]) -> Series {
        let mut key = vars.to_vec();
        key.sort();
        self.terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| Series::zero(self.num_vars, self.trunc_degree))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[PQVar], &Series)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PQPolynomial) -> PQPolynomial {
        let mut out = self.clone();
        for (k, v) in other.terms() {
            out.add_term(k, v);
        }
        out
    }

    pub fn sub(&self, other: &PQPolynomial) -> PQPolynomial {
        let mut out = self.clone();
        for (k, v) in other.terms() {
            out.add_term(k, &-v);
        }
        out
    }

    /// The `p,q`-free part.
    pub fn scalar_part(&self) -> Series {
        self.coeff(&[])
    }

    /// Terms `p_a q_b` with `a + b <= window`.
    pub fn bilinear_part(&self, window: usize) -> PQPolynomial {
        let mut out = PQPolynomial::zero(self.num_vars, self.trunc_degree, window);
        for (k, v) in self.terms() {
            if let [PQVar::P { index: a, .. }, PQVar::Q { index: b, .. }] = k {
                if a + b <= window {
                    out.add_term(k, v);
                }
            }
        }
        out
    }

    /// Drops bilinear terms beyond `window` and records it; other terms stay.
    pub fn restrict(&self, window: usize) -> PQPolynomial {
        let mut out = PQPolynomial::zero(self.num_vars, self.trunc_degree, window);
        for (k, v) in self.terms() {
            let keep = match k {
                [PQVar::P { index: a, .. }, PQVar::Q { index: b, .. }] => a + b <= window,
                _ => true,
            };
            if keep {
                out.add_term(k, v);
            }
        }
        out
    }

    pub fn derivative(&self, v: PQVar) -> PQPolynomial {
        let mut out = PQPolynomial::zero(self.num_vars, self.trunc_degree, self.window);
        for (k, c) in self.terms() {
            let mult = k.iter().filter(|x| **x == v).count();
            if mult == 0 {
                continue;
            }
            let pos = k.iter().position(|x| *x == v).expect("present");
            let mut rest = k.to_vec();
            rest.remove(pos);
            out.add_term(&rest, &c.scale(&int(mult as i64)));
        }
        out
    }

    pub fn mul(&self, other: &PQPolynomial) -> PQPolynomial {
        let mut out = PQPolynomial::zero(self.num_vars, self.trunc_degree, self.window.min(other.window));
        for (k1, c1) in self.terms() {
            for (k2, c2) in other.terms() {
                let mut key = k1.to_vec();
                key.extend_from_slice(k2);
                out.add_term(&key, &(c1 * c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> PQPolynomial {
        let mut out = PQPolynomial::zero(self.num_vars, self.trunc_degree, self.window);
        for (k, v) in self.terms() {
            out.add_term(k, &v.scale(c));
        }
        out
    }

    /// Reads back `(M_{a,b})_{μν}` as the coefficient of `p_{a,μ} q_b^ν`.
    pub fn to_tower(&self, m: usize) -> Tower {
        Tower::from_fn(self.window, |a, b| {
            Matrix::from_fn(m, |mu, nu| self.coeff(&[PQVar::p(a, mu), PQVar::q(b, nu)]))
        })
    }
}

impl fmt::Display for PQPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v})")?;
            for x in k {
                write!(f, "*{x}")?;
            }
        }
        Ok(())
    }
}

/// `F = Σ_{a+b<=B} p_{a,μ} (M_{a,b})_{μν} q_b^ν`.
pub fn full_potential(t: &Tower) -> PQPolynomial {
    let mut f = PQPolynomial::zero(t.num_vars(), t.trunc_degree(), t.window());
    for (a, b, m) in t.cells() {
        for mu in 0..m.dim() {
            for nu in 0..m.dim() {
                f.add_term(&[PQVar::p(a, mu), PQVar::q(b, nu)], m.get(mu, nu));
            }
        }
    }
    f
}
