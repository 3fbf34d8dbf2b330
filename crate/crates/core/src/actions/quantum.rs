//! Differential operators in the `p`, `q` variables realising the actions on
//! the generating function `F = Σ p_a M_{a,b} q_b`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::series::{int, ConstMatrix, Rat, Series};
use crate::tower::{full_potential, PQPolynomial, PQVar, Tower};

use super::{sign, GMinusElement, GPlusElement};

type Key = (Vec<PQVar>, Vec<PQVar>);

/// Normal ordered element of the Weyl algebra: sums of `c · x^A ∂^B` with
/// multiplications on the left, derivatives on the right.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WeylOp {
    terms: BTreeMap<Key, Rat>,
}

impl WeylOp {
    pub fn zero() -> WeylOp {
        WeylOp::default()
    }

    pub fn add_term(&mut self, xs: &[PQVar], ds: &[PQVar], c: &Rat) {
        if *c == int(0) {
            return;
        }
        let mut xs = xs.to_vec();
        let mut ds = ds.to_vec();
        xs.sort();
        ds.sort();
        let key = (xs, ds);
        let e = self.terms.entry(key.clone()).or_insert_with(|| int(0));
        *e += c;
        if *e == int(0) {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[PQVar], &[PQVar], &Rat)> {
        self.terms.iter().map(|((x, d), c)| (x.as_slice(), d.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &WeylOp) -> WeylOp {
        let mut out = self.clone();
        for (x, d, c) in other.terms() {
            out.add_term(x, d, c);
        }
        out
    }

    pub fn sub(&self, other: &WeylOp) -> WeylOp {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rat) -> WeylOp {
        let mut out = WeylOp::zero();
        for (x, d, v) in self.terms() {
            out.add_term(x, d, &(v * c));
        }
        out
    }

    /// Composition `self ∘ other`, brought back to normal order.
    pub fn mul(&self, other: &WeylOp) -> WeylOp {
        let mut out = WeylOp::zero();
        for (xa, da, ca) in self.terms() {
            for (xc, dc, cc) in other.terms() {
                for ((x, d), c) in move_derivatives(da, xc) {
                    let mut xs = xa.to_vec();
                    xs.extend(x);
                    let mut ds = d;
                    ds.extend_from_slice(dc);
                    out.add_term(&xs, &ds, &(&c * ca * cc));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &WeylOp) -> WeylOp {
        self.mul(other).sub(&other.mul(self))
    }

    /// Highest derivative order among the terms.
    pub fn order(&self) -> usize {
        self.terms().map(|(_, d, _)| d.len()).max().unwrap_or(0)
    }

    /// `e^{-F} ∘ self ∘ e^{F}` applied to `1`, for operators of order at most two.
    pub fn conjugate_exp(&self, f: &PQPolynomial) -> Result<PQPolynomial> {
        if self.order() > 2 {
            return Err(Error::Unsupported("conjugation is implemented up to second order".into()));
        }
        let (n, d) = (f.num_vars(), f.trunc_degree());
        let mut out = PQPolynomial::zero(n, d, f.window());
        let mut firsts: BTreeMap<PQVar, PQPolynomial> = BTreeMap::new();
        let mut first = |v: PQVar| firsts.entry(v).or_insert_with(|| f.derivative(v)).clone();
        for (xs, ds, c) in self.terms() {
            let mut unit = PQPolynomial::zero(n, d, f.window());
            unit.add_term(xs, &Series::constant(n, d, c.clone()));
            let body = match ds {
                [] => unit,
                [u] => unit.mul(&first(*u)),
                [u, v] => {
                    let fu = first(*u);
                    let fv = first(*v);
                    unit.mul(&fu.mul(&fv).add(&fu.derivative(*v)))
                }
                _ => unreachable!(),
            };
            out = out.add(&body);
        }
        Ok(out)
    }
}

/// `∂^B x^C` in normal order.
fn move_derivatives(ds: &[PQVar], xs: &[PQVar]) -> BTreeMap<Key, Rat> {
    let mut acc: BTreeMap<Key, Rat> = BTreeMap::new();
    acc.insert((xs.to_vec(), Vec::new()), int(1));
    for y in ds.iter().rev() {
        let mut next: BTreeMap<Key, Rat> = BTreeMap::new();
        let mut push = |k: Key, c: Rat| {
            let e = next.entry(k).or_insert_with(|| int(0));
            *e += c;
        };
        for ((x, e), c) in acc {
            let mult = x.iter().filter(|v| *v == y).count();
            if mult > 0 {
                let mut rest = x.clone();
                let pos = rest.iter().position(|v| v == y).expect("present");
                rest.remove(pos);
                push((rest, e.clone()), &c * int(mult as i64));
            }
            let mut e2 = e;
            e2.push(*y);
            push((x, e2), c);
        }
        acc = next;
    }
    acc.retain(|_, c| *c != int(0));
    acc
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (x, d, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for v in x {
                write!(f, "*{v}")?;
            }
            for v in d {
                write!(f, "*d/d{v}")?;
            }
        }
        Ok(())
    }
}

/// The operator `r̂` on variables with index at most `cap`:
/// `(r_l)_{μκ} p_{a,μ} ∂/∂p_{a+l,κ} - (-1)^l (r_l)_{κν} q_b^ν ∂/∂q_{b+l}^κ
///  + Σ_{i+j=l-1} (-1)^{i+1} (r_l)_{κλ} ∂²/∂q_i^κ ∂p_{j,λ}`.
pub fn r_hat(r: &GPlusElement, cap: usize) -> WeylOp {
    let m = r.dim();
    let mut op = WeylOp::zero();
    for (l, rl) in r.coeffs() {
        for a in 0..=cap.saturating_sub(l) {
            if a + l > cap {
                break;
            }
            for_entries(rl, m, |mu, ka, c| {
                op.add_term(&[PQVar::p(a, mu)], &[PQVar::p(a + l, ka)], c);
                op.add_term(&[PQVar::q(a, ka)], &[PQVar::q(a + l, mu)], &-(sign(l) * c));
            });
        }
        for i in 0..l {
            let j = l - 1 - i;
            if i > cap || j > cap {
                continue;
            }
            for_entries(rl, m, |ka, la, c| {
                op.add_term(&[], &[PQVar::q(i, ka), PQVar::p(j, la)], &(sign(i + 1) * c));
            });
        }
    }
    op
}

/// The operator `ŝ` on variables with index at most `cap`:
/// `(s_l)_{μκ} p_{a+l,μ} ∂/∂p_{a,κ} - (-1)^l (s_l)_{κν} q_{b+l}^ν ∂/∂q_b^κ
///  + Σ_{i+j=l-1} (-1)^j (s_l)_{μν} p_{i,μ} q_j^ν`.
pub fn s_hat(s: &GMinusElement, cap: usize) -> WeylOp {
    let m = s.dim();
    let mut op = WeylOp::zero();
    for (l, sl) in s.coeffs() {
        if l <= cap {
            for a in 0..=cap - l {
                for_entries(sl, m, |mu, ka, c| {
                    op.add_term(&[PQVar::p(a + l, mu)], &[PQVar::p(a, ka)], c);
                    op.add_term(&[PQVar::q(a + l, ka)], &[PQVar::q(a, mu)], &-(sign(l) * c));
                });
            }
        }
        for i in 0..l {
            let j = l - 1 - i;
            if i > cap || j > cap {
                continue;
            }
            for_entries(sl, m, |mu, nu, c| {
                op.add_term(&[PQVar::p(i, mu), PQVar::q(j, nu)], &[], &(sign(j) * c));
            });
        }
    }
    op
}

fn for_entries(a: &ConstMatrix, m: usize, mut f: impl FnMut(usize, usize, &Rat)) {
    for i in 0..m {
        for j in 0..m {
            let c = a.get(i, j);
            if *c != int(0) {
                f(i, j, c);
            }
        }
    }
}

/// `e^{-F} r̂ e^{F}` for the potential of `t`. Bilinear terms are kept on the
/// window `B - L`, where they are complete; the `p,q`-free part is kept.
pub fn operator_r_hat(t: &Tower, r: &GPlusElement) -> Result<PQPolynomial> {
    let l = r.max_index();
    if l > t.window() {
        return Err(Error::Window {
            needed: l,
            available: t.window(),
        });
    }
    let f = full_potential(t);
    Ok(r_hat(r, t.window()).conjugate_exp(&f)?.restrict(t.window() - l))
}

/// `e^{-F} ŝ e^{F}` for the potential of `t`, on the window `B`.
pub fn operator_s_hat(t: &Tower, s: &GMinusElement) -> Result<PQPolynomial> {
    let f = full_potential(t);
    Ok(s_hat(s, t.window()).conjugate_exp(&f)?.restrict(t.window()))
}

/// `[x, y] = Σ_{l,m} [x_l, y_m] z^{-(l+m)}`.
pub fn bracket_minus(x: &GMinusElement, y: &GMinusElement) -> Result<GMinusElement> {
    let mut coeffs: BTreeMap<usize, ConstMatrix> = BTreeMap::new();
    for (l, a) in x.coeffs() {
        for (m, b) in y.coeffs() {
            let c = a.commutator(b);
            let e = coeffs.entry(l + m).or_insert_with(|| ConstMatrix::zeros(c.dim()));
            *e = e.add(&c);
        }
    }
    GMinusElement::new(x.dim(), coeffs)
}

/// First place where `e^{-F} r̂ e^{F}` differs from the potential of `r.M`
/// (bilinear part) or where its `p,q`-free part fails to be `Σ tr(...)`.
pub fn r_hat_failure(t: &Tower, r: &GPlusElement) -> Result<Option<String>> {
    let got = operator_r_hat(t, r)?;
    let want = full_potential(&super::act_r(t, r)?);
    let w = want.window();
    let bil = got.bilinear_part(w);
    if let Some(s) = first_poly_difference(&bil, &want) {
        return Ok(Some(s));
    }
    let rest = got.sub(&bil);
    let scalar = rest.scalar_part();
    let mut expect = Series::zero(t.num_vars(), t.trunc_degree());
    for (l, rl) in r.coeffs() {
        for i in 0..l {
            let j = l - 1 - i;
            if i + j > t.window() {
                continue;
            }
            let m = crate::series::Matrix::lift_const(rl, t.template());
            let tr = m.mul(t.get(j, i)).trace();
            expect = &expect + &tr.scale(&sign(i + 1));
        }
    }
    if scalar != expect {
        return Ok(Some("p,q-free part".into()));
    }
    let mut stray = rest.clone();
    stray.add_term(&[], &-&scalar);
    if let Some((k, _)) = stray.terms().next() {
        return Ok(Some(format!("unexpected term {}", k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("*"))));
    }
    Ok(None)
}

/// First place where `e^{-F} ŝ e^{F}` differs from the potential of `s.M`.
pub fn s_hat_failure(t: &Tower, s: &GMinusElement) -> Result<Option<String>> {
    let got = operator_s_hat(t, s)?;
    let want = full_potential(&super::act_s(t, s)?);
    Ok(first_poly_difference(&got, &want))
}

fn first_poly_difference(a: &PQPolynomial, b: &PQPolynomial) -> Option<String> {
    let d = a.sub(b);
    let first = d.terms().next().map(|(k, _)| {
        if k.is_empty() {
            "p,q-free part".to_string()
        } else {
            k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("*")
        }
    });
    first
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_gminus, random_gplus, random_orbit, OrbitParams};
    use crate::rng::SeededRng;
    use crate::tower::coordinate_seed;

    #[test]
    fn weyl_relation() {
        let x = PQVar::q(0, 0);
        let mut d = WeylOp::zero();
        d.add_term(&[], &[x], &int(1));
        let mut m = WeylOp::zero();
        m.add_term(&[x], &[], &int(1));
        let mut one = WeylOp::zero();
        one.add_term(&[], &[], &int(1));
        assert_eq!(d.commutator(&m), one);
        let mut d2 = WeylOp::zero();
        d2.add_term(&[], &[x, x], &int(1));
        let mut m2 = WeylOp::zero();
        m2.add_term(&[x, x], &[], &int(1));
        // ∂² x² = x²∂² + 4x∂ + 2
        let mut want = WeylOp::zero();
        want.add_term(&[x, x], &[x, x], &int(1));
        want.add_term(&[x], &[x], &int(4));
        want.add_term(&[], &[], &int(2));
        assert_eq!(d2.mul(&m2), want);
    }

    #[test]
    fn r_hat_reproduces_the_action() {
        let mut rng = SeededRng::new(11);
        let seed = coordinate_seed(2, 2, 4, 3).unwrap();
        let orbit = random_orbit(&mut rng, &OrbitParams::new(2, 2, 4, 3)).unwrap();
        for t in [seed, orbit.tower] {
            for l_max in 1..=2 {
                let r = random_gplus(&mut rng, 2, l_max, 2, 2);
                assert_eq!(r_hat_failure(&t, &r).unwrap(), None);
            }
        }
    }

    #[test]
    fn s_hat_reproduces_the_action() {
        let mut rng = SeededRng::new(12);
        let seed = coordinate_seed(2, 2, 4, 3).unwrap();
        let orbit = random_orbit(&mut rng, &OrbitParams::new(2, 2, 4, 3)).unwrap();
        for t in [seed, orbit.tower] {
            for l_max in 1..=3 {
                let s = random_gminus(&mut rng, 2, l_max, 2, 2);
                assert_eq!(s_hat_failure(&t, &s).unwrap(), None);
            }
        }
    }

    #[test]
    fn s_hat_on_zero_tower() {
        let t = Tower::zero(2, 1, 2, 2);
        let s1 = ConstMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        let out = operator_s_hat(&t, &GMinusElement::single(1, s1.clone()).unwrap()).unwrap();
        for mu in 0..2 {
            for nu in 0..2 {
                let c = out.coeff(&[PQVar::p(0, mu), PQVar::q(0, nu)]);
                assert_eq!(c, Series::constant(1, 2, s1.get(mu, nu).clone()));
            }
        }
        assert_eq!(out.terms().count(), 4);
        assert!(operator_s_hat(&t, &GMinusElement::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn dim_one_r_hat_has_no_bilinear_part() {
        let t = coordinate_seed(1, 1, 5, 4).unwrap();
        let r = GPlusElement::new(1, [(1, ConstMatrix::from_ints(&[&[2]])), (2, ConstMatrix::from_ints(&[&[-1]]))])
            .unwrap();
        let out = operator_r_hat(&t, &r).unwrap();
        assert!(out.bilinear_part(out.window()).is_zero());
    }

    #[test]
    fn s_hat_brackets() {
        let mut rng = SeededRng::new(13);
        let cap = 4;
        for _ in 0..4 {
            let x = random_gminus(&mut rng, 2, 2, 2, 1);
            let y = random_gminus(&mut rng, 2, 2, 2, 1);
            let lhs = s_hat(&x, cap).commutator(&s_hat(&y, cap));
            let rhs = s_hat(&bracket_minus(&x, &y).unwrap(), cap);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn r_hat_brackets() {
        let mut rng = SeededRng::new(14);
        let cap = 5;
        for _ in 0..4 {
            let x = random_gplus(&mut rng, 2, 2, 2, 1);
            let y = random_gplus(&mut rng, 2, 2, 2, 1);
            let lhs = r_hat(&x, cap).commutator(&r_hat(&y, cap));
            let rhs = r_hat(&super::super::bracket(&x, &y).unwrap(), cap);
            assert_eq!(lhs, rhs);
        }
    }
}
