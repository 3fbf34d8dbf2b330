//! Upper and lower triangular actions on towers, conjugation, the action on
//! `J`, the quantized operators and the spectrum check.
//!
//! The Lie algebra actions [`act_r`] and [`act_s`] return tangent vectors
//! `r.M` and `s.M` at the input tower. Group elements act through the time-one
//! flow of these vector fields ([`exp_act_r`], [`exp_act_s`]).

mod elements;
pub mod quantum;

pub use elements::{GLElement, GMinusElement, GMinusGroup, GPlusElement};

use crate::error::{Error, Result};
use crate::report::Report;
use crate::series::{int, ConstMatrix, Matrix, Rat, Ring, SeriesMatrix, ZSeries};
use crate::tower::{JSeries, Tower};

pub(crate) fn sign(l: usize) -> Rat {
    if l % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// Weights of the three terms of the `r`-action. The default is the action
/// itself; other values exist to confirm that checks detect broken formulas.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RFormula {
    /// Weight of `r_l M_{a+l,b}`.
    pub raise_a: Rat,
    /// Weight of `-(-1)^l M_{a,b+l} r_l`.
    pub raise_b: Rat,
    /// Weight of `Σ_{i+j=l-1} (-1)^{i+1} M_{a,i} r_l M_{j,b}`.
    pub quadratic: Rat,
}

impl Default for RFormula {
    fn default() -> Self {
        RFormula {
            raise_a: int(1),
            raise_b: int(1),
            quadratic: int(1),
        }
    }
}

/// Weights of the three terms of the `s`-action.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SFormula {
    /// Weight of `s_l M_{a-l,b}`.
    pub lower_a: Rat,
    /// Weight of `-(-1)^l M_{a,b-l} s_l`.
    pub lower_b: Rat,
    /// Weight of `(-1)^b δ_{a+b+1,l} s_l`.
    pub delta: Rat,
}

impl Default for SFormula {
    fn default() -> Self {
        SFormula {
            lower_a: int(1),
            lower_b: int(1),
            delta: int(1),
        }
    }
}

fn lifted<R: Ring>(coeffs: impl Iterator<Item = (usize, ConstMatrix)>, template: &R) -> Vec<(usize, Matrix<R>)> {
    coeffs.map(|(l, c)| (l, Matrix::lift_const(&c, template))).collect()
}

/// Linear part of the `r`-action on `out_window`; cells beyond the input
/// window count as zero.
fn r_linear<R: Ring>(t: &Tower<R>, r: &[(usize, Matrix<R>)], f: &RFormula, out_window: usize) -> Tower<R> {
    let m = t.dim();
    Tower::from_fn(out_window, |a, b| {
        let mut acc = Matrix::zero_like(m, t.template());
        for (l, rl) in r {
            if let Some(x) = t.get_signed((a + l) as i64, b as i64) {
                acc = acc.add(&rl.mul(x).scale(&f.raise_a));
            }
            if let Some(x) = t.get_signed(a as i64, (b + l) as i64) {
                acc = acc.sub(&x.mul(rl).scale(&(&f.raise_b * sign(*l))));
            }
        }
        acc
    })
}

/// `B(x, y)_{a,b} = Σ_l Σ_{i+j=l-1} (-1)^{i+1} x_{a,i} r_l y_{j,b}`.
fn r_bilinear<R: Ring>(
    x: &Tower<R>,
    y: &Tower<R>,
    r: &[(usize, Matrix<R>)],
    f: &RFormula,
    out_window: usize,
) -> Tower<R> {
    let m = x.dim();
    Tower::from_fn(out_window, |a, b| {
        let mut acc = Matrix::zero_like(m, x.template());
        for (l, rl) in r {
            for i in 0..*l {
                let j = l - 1 - i;
                let (Some(xa), Some(yb)) = (x.get_signed(a as i64, i as i64), y.get_signed(j as i64, b as i64)) else {
                    continue;
                };
                if xa.is_zero() || yb.is_zero() {
                    continue;
                }
                let term = xa.mul(rl).mul(yb);
                acc = acc.add(&term.scale(&(&f.quadratic * sign(i + 1))));
            }
        }
        acc
    })
}

/// `r.M` on the window `B - L`, where `L` is the largest index of `r`:
///
/// `(r.M)_{a,b} = Σ_l [ r_l M_{a+l,b} - (-1)^l M_{a,b+l} r_l
///                      + Σ_{i+j=l-1} (-1)^{i+1} M_{a,i} r_l M_{j,b} ]`.
pub fn act_r<R: Ring>(t: &Tower<R>, r: &GPlusElement) -> Result<Tower<R>> {
    act_r_with(t, r, &RFormula::default())
}

pub fn act_r_with<R: Ring>(t: &Tower<R>, r: &GPlusElement, f: &RFormula) -> Result<Tower<R>> {
    check_dim(t.dim(), r.dim())?;
    let l_max = r.max_index();
    if l_max > t.window() {
        return Err(Error::Window {
            needed: l_max,
            available: t.window(),
        });
    }
    let out = t.window() - l_max;
    let rs = lifted(r.coeffs().map(|(l, c)| (l, c.clone())), t.template());
    Ok(r_linear(t, &rs, f, out).add(&r_bilinear(t, t, &rs, f, out)))
}

/// `[r_0, M_{a,b}]` on every cell.
pub fn act_r0<R: Ring>(t: &Tower<R>, r0: &ConstMatrix) -> Tower<R> {
    let r0 = Matrix::lift_const(r0, t.template());
    t.map(|m| r0.commutator(m))
}

fn s_parts<R: Ring>(t: &Tower<R>, s: &GMinusElement, f: &SFormula) -> (Tower<R>, Vec<(usize, Matrix<R>)>) {
    let ss = lifted(s.coeffs().map(|(l, c)| (l, c.clone())), t.template());
    let m = t.dim();
    let constant = Tower::from_fn(t.window(), |a, b| {
        let mut acc = Matrix::zero_like(m, t.template());
        for (l, sl) in &ss {
            if a + b + 1 == *l {
                acc = acc.add(&sl.scale(&(&f.delta * sign(b))));
            }
        }
        acc
    });
    (constant, ss)
}

fn s_linear<R: Ring>(t: &Tower<R>, ss: &[(usize, Matrix<R>)], f: &SFormula) -> Tower<R> {
    let m = t.dim();
    Tower::from_fn(t.window(), |a, b| {
        let mut acc = Matrix::zero_like(m, t.template());
        for (l, sl) in ss {
            let l = *l as i64;
            if let Some(x) = t.get_signed(a as i64 - l, b as i64) {
                acc = acc.add(&sl.mul(x).scale(&f.lower_a));
            }
            if let Some(x) = t.get_signed(a as i64, b as i64 - l) {
                acc = acc.sub(&x.mul(sl).scale(&(&f.lower_b * sign(l as usize))));
            }
        }
        acc
    })
}

/// `s.M` on the same window:
///
/// `(s.M)_{a,b} = Σ_l [ s_l M_{a-l,b} - (-1)^l M_{a,b-l} s_l + (-1)^b δ_{a+b+1,l} s_l ]`,
/// with cells of negative index read as zero.
pub fn act_s<R: Ring>(t: &Tower<R>, s: &GMinusElement) -> Result<Tower<R>> {
    act_s_with(t, s, &SFormula::default())
}

pub fn act_s_with<R: Ring>(t: &Tower<R>, s: &GMinusElement, f: &SFormula) -> Result<Tower<R>> {
    check_dim(t.dim(), s.dim())?;
    let (constant, ss) = s_parts(t, s, f);
    Ok(s_linear(t, &ss, f).add(&constant))
}

fn check_dim(m: usize, d: usize) -> Result<()> {
    if d != 0 && d != m {
        return Err(Error::Shape(format!(
            "element is {d}x{d}, tower matrices are {m}x{m}"
        )));
    }
    Ok(())
}

type Linear<'a, R> = dyn Fn(&Tower<R>) -> Tower<R> + 'a;
type Bilinear<'a, R> = dyn Fn(&Tower<R>, &Tower<R>) -> Tower<R> + 'a;

/// Time-one flow of `dM/dτ = c + L(M) + B(M, M)` by its Taylor series in `τ`:
/// `(k+1) c_{k+1} = δ_{k0} c + L(c_k) + Σ_{i+j=k} B(c_i, c_j)`.
fn flow<R: Ring>(
    start: &Tower<R>,
    constant: Option<&Tower<R>>,
    lin: &Linear<'_, R>,
    bil: Option<&Bilinear<'_, R>>,
    max_terms: usize,
) -> Result<Tower<R>> {
    let mut coeffs = vec![start.clone()];
    let mut total = start.clone();
    for k in 0..max_terms {
        let mut next = lin(&coeffs[k]);
        if k == 0 {
            if let Some(c) = constant {
                next = next.add(c);
            }
        }
        if let Some(bil) = bil {
            for i in 0..=k {
                next = next.add(&bil(&coeffs[i], &coeffs[k - i]));
            }
        }
        let next = next.scale(&int(k as i64 + 1).recip());
        if next.is_zero() {
            return Ok(total);
        }
        total = total.add(&next);
        coeffs.push(next);
    }
    Err(Error::WindowPrecondition(format!(
        "group action did not terminate within {max_terms} terms"
    )))
}

/// Action of `exp(r)`.
///
/// The flow terminates on towers with `M_{a,b} = O(t^{a+b+1})`: every
/// application of `r` raises the order of the increment by one. When in
/// addition `B >= D - 1`, every cell beyond the window vanishes modulo
/// degree `D + 1`, so the window is preserved.
pub fn exp_act_r<R: Ring>(t: &Tower<R>, r: &GPlusElement) -> Result<Tower<R>> {
    exp_act_r_with(t, r, &RFormula::default())
}

pub fn exp_act_r_with<R: Ring>(t: &Tower<R>, r: &GPlusElement, f: &RFormula) -> Result<Tower<R>> {
    check_dim(t.dim(), r.dim())?;
    if r.is_zero() {
        return Ok(t.clone());
    }
    if let Some(loc) = t.grading_failure() {
        return Err(Error::WindowPrecondition(format!(
            "exp of an upper triangular element needs M_ab = O(t^(a+b+1)); {loc}"
        )));
    }
    let d = t.trunc_degree();
    if t.window() + 1 < d {
        return Err(Error::Window {
            needed: d.saturating_sub(1),
            available: t.window(),
        });
    }
    let w = t.window();
    let rs = lifted(r.coeffs().map(|(l, c)| (l, c.clone())), t.template());
    let lin = |x: &Tower<R>| r_linear(x, &rs, f, w);
    let bil = |x: &Tower<R>, y: &Tower<R>| r_bilinear(x, y, &rs, f, w);
    flow(t, None, &lin, Some(&bil), d + 2)
}

/// Action of `exp(s)`; terminates after at most `B + 2` terms because each
/// application lowers the index sum of its sources.
pub fn exp_act_s<R: Ring>(t: &Tower<R>, s: &GMinusElement) -> Result<Tower<R>> {
    exp_act_s_with(t, s, &SFormula::default())
}

pub fn exp_act_s_with<R: Ring>(t: &Tower<R>, s: &GMinusElement, f: &SFormula) -> Result<Tower<R>> {
    check_dim(t.dim(), s.dim())?;
    let (constant, ss) = s_parts(t, s, f);
    let lin = |x: &Tower<R>| s_linear(x, &ss, f);
    flow(t, Some(&constant), &lin, None, t.window() + 3)
}

/// `[x, y] = Σ_{l,m} [x_l, y_m] z^{l+m}`.
pub fn bracket(x: &GPlusElement, y: &GPlusElement) -> Result<GPlusElement> {
    let mut coeffs: std::collections::BTreeMap<usize, ConstMatrix> = Default::default();
    for (l, a) in x.coeffs() {
        for (m, b) in y.coeffs() {
            let c = a.commutator(b);
            let e = coeffs.entry(l + m).or_insert_with(|| ConstMatrix::zeros(c.dim()));
            *e = e.add(&c);
        }
    }
    GPlusElement::with_zero_slot(x.dim(), coeffs)
}

/// Compares the bracket of the vector fields `M ↦ x.M`, `M ↦ y.M` with the
/// field of `[x, y]` at `t`. With `D_x[V]` the derivative of `M ↦ x.M` along
/// `V` (computed with dual numbers), the identity is
/// `D_x[y.M] - D_y[x.M] = [x, y].M` on the window `B - L_x - L_y`.
pub fn bracket_failure(t: &Tower, x: &GPlusElement, y: &GPlusElement) -> Result<Option<String>> {
    let need = x.max_index() + y.max_index();
    if need > t.window() {
        return Err(Error::Window {
            needed: need,
            available: t.window(),
        });
    }
    let w = t.window() - need;
    let qx = act_r(t, x)?;
    let qy = act_r(t, y)?;
    let dx_qy = act_r(&t.with_tangent(&qy), x)?.epsilon();
    let dy_qx = act_r(&t.with_tangent(&qx), y)?.epsilon();
    let lhs = dx_qy.restrict(w)?.sub(&dy_qx.restrict(w)?);
    let rhs = act_r(t, &bracket(x, y)?)?.restrict(w)?;
    Ok(lhs.first_difference(&rhs))
}

pub fn bracket_check(t: &Tower, x: &GPlusElement, y: &GPlusElement) -> Result<bool> {
    Ok(bracket_failure(t, x, y)?.is_none())
}

/// `M_{a,b} ↦ P M_{a,b} P^{-1}`.
pub fn conjugate<R: Ring>(t: &Tower<R>, p: &GLElement) -> Result<Tower<R>> {
    check_dim(t.dim(), p.dim())?;
    let pm = Matrix::lift_const(p.matrix(), t.template());
    let pi = Matrix::lift_const(p.inverse(), t.template());
    Ok(t.map(|m| pm.mul(m).mul(&pi)))
}

/// `J.S = J(z) S^{-1}(-z)`, truncated at the depth of `J`.
pub fn act_s_on_j<R: Ring>(j: &JSeries<R>, s: &GMinusGroup) -> Result<JSeries<R>> {
    let depth = j.window() + 1;
    if s.depth() < depth {
        return Err(Error::Window {
            needed: depth,
            available: s.depth(),
        });
    }
    let tmpl = j.coeffs[0].get(0, 0).clone();
    let jz = ZSeries::new((0..=depth).map(|k| j.coeff(k)).collect());
    let s_neg = s
        .series()
        .truncate(depth)
        .map(|c| Matrix::lift_const(c, &tmpl))
        .negate_variable();
    let out = jz.mul(&s_neg.inverse()?);
    Ok(JSeries {
        coeffs: out.coeffs()[1..].to_vec(),
    })
}

/// Checks that the upper triangular action preserves the spectrum of
/// `∂_k M_{0,0}`: the ε-parts of `tr((∂_k (M_{0,0} + ε (r.M)_{0,0}))^j)` vanish
/// for `j <= m`, and `∂_k (r.M)_{0,0} = [((r/z).M)_{0,0}, ∂_k M_{0,0}]`.
pub fn check_spectrum_invariance(t: &Tower, r: &GPlusElement) -> Result<Report> {
    check_spectrum_invariance_with(t, r, &RFormula::default())
}

pub fn check_spectrum_invariance_with(t: &Tower, r: &GPlusElement, f: &RFormula) -> Result<Report> {
    let mut report = Report::new();
    let rm = act_r_with(t, r, f)?;
    let rz = act_r_with(t, &r.divided_by_z(), f)?;
    let m00 = t.get(0, 0);
    let d = t.trunc_degree();
    if d == 0 {
        report.skip("spectrum", "degree-0 truncation has no derivatives");
        return Ok(report);
    }
    let moved = SeriesMatrix::dual(m00, rm.get(0, 0));
    for k in 0..t.num_vars() {
        let x = moved.partial(k);
        let mut power = x.clone();
        let mut failure = None;
        for j in 1..=t.dim() {
            if j > 1 {
                power = power.mul(&x);
            }
            let eps = power.trace().epsilon;
            if let Some((mono, c)) = eps.first_term() {
                failure = Some(format!("power {j}: monomial {mono} coefficient {c}"));
                break;
            }
        }
        report.record(format!("spectrum trace powers d/dt{}", k + 1), failure);

        let lhs = rm.get(0, 0).partial(k);
        let dm = m00.partial(k);
        let rhs = rz.get(0, 0).truncate(d - 1).commutator(&dm);
        report.record(
            format!("spectrum commutator d/dt{}", k + 1),
            lhs.first_difference(&rhs)
                .map(|(i, j, mono)| format!("entry ({},{}) monomial {mono}", i + 1, j + 1)),
        );
    }
    Ok(report)
}
