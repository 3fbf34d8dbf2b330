//! Towers from wave functions `Ψ^±(t, z)` built on an invertible matrix
//! series `A(z)`, and their variation along `A ↦ A exp(ε r)`.

use crate::actions::{act_r, sign, GPlusElement};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::series::{factorial, ConstMatrix, DualMatrix, DualSeries, Matrix, Ring, Series, SeriesMatrix, ZSeries};
use crate::tower::{verify_master, Tower};

/// `A(z) = A_0 + A_1 z + … + A_Z z^Z` with `A_0` invertible over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AMatrixSeries {
    coeffs: Vec<ConstMatrix>,
}

impl AMatrixSeries {
    pub fn new(coeffs: Vec<ConstMatrix>) -> Result<AMatrixSeries> {
        let Some(a0) = coeffs.first() else {
            return Err(Error::Shape("A(z) needs a constant coefficient".into()));
        };
        let m = a0.dim();
        if coeffs.iter().any(|c| c.dim() != m) {
            return Err(Error::Shape("A(z) coefficients differ in size".into()));
        }
        a0.rat_inverse()
            .map_err(|_| Error::Domain("A_0 is singular".into()))?;
        Ok(AMatrixSeries { coeffs })
    }

    pub fn identity(m: usize) -> AMatrixSeries {
        AMatrixSeries {
            coeffs: vec![ConstMatrix::identity(m)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    pub fn z_trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ConstMatrix] {
        &self.coeffs
    }

    /// Zero beyond `Z`.
    pub fn coeff(&self, k: usize) -> ConstMatrix {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ConstMatrix::zeros(self.dim()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WaveSign {
    Plus,
    Minus,
}

/// `Ψ_0 + z Ψ_1 + … + z^K Ψ_K`, with the matrices `W_k` of the linear system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WaveFunction<R = Series> {
    pub sign: WaveSign,
    pub coeffs: ZSeries<R>,
    pub w: Vec<Matrix<R>>,
}

impl<R: Ring> WaveFunction<R> {
    pub fn order(&self) -> usize {
        self.coeffs.order()
    }

    pub fn coeff(&self, k: usize) -> &Matrix<R> {
        self.coeffs.coeff(k)
    }
}

fn unit(m: usize, k: usize, tmpl: &Series) -> SeriesMatrix {
    Matrix::lift_const(&ConstMatrix::unit(m, k, k), tmpl)
}

/// `Ψ^+ = exp(z diag(t)) A(z)` and `Ψ^-(t, z) = Ψ^+(t, -z)^{-1}` to `z^K`, with
/// `W_k = 0`. Requires `N = m`.
pub fn wave_from_a(a: &AMatrixSeries, trunc_degree: usize, k_max: usize) -> Result<(WaveFunction, WaveFunction)> {
    let m = a.dim();
    let n = m;
    let tmpl = Series::zero(n, trunc_degree);
    let vars: Vec<Series> = (0..n).map(|k| Series::var(n, trunc_degree, k)).collect::<Result<_>>()?;
    let expo: Vec<SeriesMatrix> = (0..=k_max)
        .map(|j| {
            let c = factorial(j).recip();
            Matrix::from_fn(m, |i, l| if i == l { vars[i].pow(j).scale(&c) } else { tmpl.clone() })
        })
        .collect();
    let plus: Vec<SeriesMatrix> = (0..=k_max)
        .map(|k| {
            let mut acc = Matrix::zero_like(m, &tmpl);
            for (j, e) in expo.iter().enumerate().take(k + 1) {
                let ak = a.coeff(k - j);
                if ak.is_zero() {
                    continue;
                }
                acc = acc.add(&e.mul(&Matrix::lift_const(&ak, &tmpl)));
            }
            acc
        })
        .collect();
    let plus = ZSeries::new(plus);
    let minus = plus.negate_variable().inverse()?;
    let w = vec![Matrix::zero_like(m, &tmpl); n];
    Ok((
        WaveFunction {
            sign: WaveSign::Plus,
            coeffs: plus,
            w: w.clone(),
        },
        WaveFunction {
            sign: WaveSign::Minus,
            coeffs: minus,
            w,
        },
    ))
}

fn series_mismatch(a: &SeriesMatrix, b: &SeriesMatrix) -> Option<String> {
    a.first_difference(b)
        .map(|(i, j, mono)| format!("entry ({},{}) at {mono}", i + 1, j + 1))
}

/// P1 shapes, P2 `Ψ^-(t,-z) Ψ^+(t,z) = id`, P3 `∂_k Ψ^+ = (z E_kk + W_k) Ψ^+`, and the
/// form of P4 that follows from them, `∂_k Ψ^-(z) = -Ψ^-(z)(-z E_kk + W_k)`.
pub fn verify_axioms(plus: &WaveFunction, minus: &WaveFunction, w: &[SeriesMatrix]) -> Report {
    let mut report = Report::new();
    let k_max = plus.order().min(minus.order());
    let first = plus.coeff(0);
    let (m, n, d) = (first.dim(), first.num_vars(), first.trunc_degree());
    let shapes_ok = plus
        .coeffs
        .coeffs()
        .iter()
        .chain(minus.coeffs.coeffs())
        .chain(w)
        .all(|c| c.dim() == m && c.num_vars() == n && c.trunc_degree() == d)
        && w.len() == n;
    report.record("P1 shapes", (!shapes_ok).then(|| "coefficient shapes differ".to_string()));
    report.record(
        "P1 invertible at the origin",
        first.constant_part().rat_inverse().err().map(|_| "Ψ+_0(0) singular".into()),
    );
    let prod = minus.coeffs.negate_variable().truncate(k_max).mul(&plus.coeffs.truncate(k_max));
    let tmpl = first.get(0, 0).clone();
    let id = ZSeries::identity(m, k_max, &tmpl);
    let p2 = (0..=k_max).find_map(|k| series_mismatch(prod.coeff(k), id.coeff(k)).map(|s| format!("z^{k} {s}")));
    report.record("P2", p2);
    if !shapes_ok {
        return report;
    }
    let low = d.saturating_sub(1);
    for k in 0..n {
        let e = unit(m, k, &tmpl).truncate(low);
        let wk = w[k].truncate(low);
        let mut p3 = None;
        let mut p4 = None;
        for j in 0..=k_max {
            let lhs = plus.coeff(j).partial(k);
            let mut rhs = wk.mul(&plus.coeff(j).truncate(low));
            if j > 0 {
                rhs = rhs.add(&e.mul(&plus.coeff(j - 1).truncate(low)));
            }
            if p3.is_none() {
                p3 = series_mismatch(&lhs, &rhs).map(|s| format!("z^{j} {s}"));
            }
            let lhs = minus.coeff(j).partial(k);
            let mut rhs = minus.coeff(j).truncate(low).mul(&wk).neg();
            if j > 0 {
                rhs = rhs.add(&minus.coeff(j - 1).truncate(low).mul(&e));
            }
            if p4.is_none() {
                p4 = series_mismatch(&lhs, &rhs).map(|s| format!("z^{j} {s}"));
            }
        }
        report.record(format!("P3 d/dt{}", k + 1), p3);
        report.record(format!("P4 d/dt{}", k + 1), p4);
    }
    report
}

/// `M_{a,b} = Σ_{j=0}^{b} (-1)^{b-j} Ψ^-_{a+b+1-j} Ψ^+_j` on the window `B`.
pub fn lp_tower<R: Ring>(plus: &ZSeries<R>, minus: &ZSeries<R>, window: usize) -> Result<Tower<R>> {
    let k = plus.order().min(minus.order());
    if k < window + 1 {
        return Err(Error::Window {
            needed: window + 1,
            available: k.saturating_sub(1),
        });
    }
    Ok(Tower::from_fn(window, |a, b| {
        let mut acc = minus.coeff(a + b + 1).mul(plus.coeff(0)).scale(&sign(b));
        for j in 1..=b {
            acc = acc.add(&minus.coeff(a + b + 1 - j).mul(plus.coeff(j)).scale(&sign(b - j)));
        }
        acc
    }))
}

/// The tower of `A(z)` with `N = m` on the window `B`.
pub fn lp_tower_of(a: &AMatrixSeries, trunc_degree: usize, window: usize) -> Result<Tower> {
    let (plus, minus) = wave_from_a(a, trunc_degree, window + 1)?;
    lp_tower(&plus.coeffs, &minus.coeffs, window)
}

/// `∂_k M_{0,0} = Ψ^-_0 E_kk Ψ^+_0` for every `k`, modulo degree `D - 1`.
pub fn lp_dm00_failure(plus: &WaveFunction, minus: &WaveFunction, t: &Tower) -> Option<String> {
    let m00 = t.get(0, 0);
    let low = m00.trunc_degree().saturating_sub(1);
    let tmpl = m00.template().clone();
    for k in 0..m00.num_vars() {
        let want = minus
            .coeff(0)
            .mul(&unit(t.dim(), k, &tmpl))
            .mul(plus.coeff(0))
            .truncate(low);
        if let Some(s) = series_mismatch(&m00.partial(k), &want) {
            return Some(format!("d/dt{} {s}", k + 1));
        }
    }
    None
}

pub fn verify_lp_dm00(plus: &WaveFunction, minus: &WaveFunction, t: &Tower) -> bool {
    lp_dm00_failure(plus, minus, t).is_none()
}

/// `∂_k(Ψ^-_0 Ψ^+_{b+1}) = Ψ^-_0 E_kk Ψ^+_b` for `b + 1 <= K`.
pub fn derivative_identity_failure(plus: &WaveFunction, minus: &WaveFunction) -> Option<String> {
    let p0 = minus.coeff(0);
    let low = p0.trunc_degree().saturating_sub(1);
    let tmpl = p0.template().clone();
    let m = p0.dim();
    for b in 0..plus.order() {
        let lhs = p0.mul(plus.coeff(b + 1));
        for k in 0..p0.num_vars() {
            let rhs = p0.mul(&unit(m, k, &tmpl)).mul(plus.coeff(b)).truncate(low);
            if let Some(s) = series_mismatch(&lhs.partial(k), &rhs) {
                return Some(format!("b={b} d/dt{} {s}", k + 1));
            }
        }
    }
    None
}

fn epsilon_const(r: &ConstMatrix, tmpl: &Series) -> DualMatrix {
    let zero = Matrix::zero_like(r.dim(), tmpl);
    SeriesMatrix::dual(&zero, &Matrix::lift_const(r, tmpl))
}

fn dual_ring_tower(plus_new: ZSeries<DualSeries>, window: usize) -> Result<Tower> {
    let minus_new = plus_new.negate_variable().inverse()?;
    Ok(lp_tower(&plus_new, &minus_new, window)?.epsilon())
}

fn check_gplus(r: &ConstMatrix, l: usize, m: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::Domain("r(z) starts at z^1".into()));
    }
    if r.dim() != m {
        return Err(Error::Shape(format!("r_l is {0}x{0}, A(z) is {m}x{m}", r.dim())));
    }
    Ok(())
}

/// `∂_ε M_{a,b}(A exp(ε r_l z^l))` at `ε = 0`, computed with dual numbers.
///
/// On the wave function the variation acts as the first order Birkhoff
/// dressing `Ψ^+ ↦ (I - ε N) Ψ^+ (I + ε ρ)` with `ρ = r_l z^{-l}` and
/// `N = (Ψ^+ ρ (Ψ^+)^{-1})_{<0}`, which keeps `Ψ^+` a power series in `z`.
pub fn lp_lie_derivative(a: &AMatrixSeries, l: usize, r: &ConstMatrix, trunc_degree: usize, window: usize) -> Result<Tower> {
    let m = a.dim();
    check_gplus(r, l, m)?;
    let k = window + 1;
    let (plus, _) = wave_from_a(a, trunc_degree, k + l)?;
    let tmpl = Series::zero(m, trunc_degree);
    let p: Vec<DualMatrix> = plus.coeffs.coeffs().iter().map(SeriesMatrix::lift_dual).collect();
    let pinv = plus.coeffs.inverse()?;
    let pinv: Vec<DualMatrix> = pinv.coeffs().iter().map(SeriesMatrix::lift_dual).collect();
    let rho = epsilon_const(r, &tmpl);
    let dz = DualSeries::lift(tmpl.clone());
    let zero = Matrix::zero_like(m, &dz);
    // Q = Ψ^+ (I + ε ρ), coefficients of z^d for d in -l..=k
    let q = |d: i64| -> DualMatrix {
        let mut acc = if d >= 0 { p[d as usize].clone() } else { zero.clone() };
        let s = d + l as i64;
        if s >= 0 && (s as usize) < p.len() {
            acc = acc.add(&p[s as usize].mul(&rho));
        }
        acc
    };
    // X = Q (Ψ^+)^{-1}, negative part
    let x: Vec<DualMatrix> = (1..=l as i64)
        .map(|mm| {
            let mut acc = zero.clone();
            for d in -(l as i64)..=-mm {
                let e = (-mm - d) as usize;
                acc = acc.add(&q(d).mul(&pinv[e]));
            }
            acc
        })
        .collect();
    let coeffs: Vec<DualMatrix> = (0..=k as i64)
        .map(|d| {
            let mut acc = q(d);
            for (i, xm) in x.iter().enumerate() {
                acc = acc.sub(&xm.mul(&q(d + i as i64 + 1)));
            }
            acc
        })
        .collect();
    dual_ring_tower(ZSeries::new(coeffs), window)
}

/// The same derivative from the explicit variation of the wave function
/// `(r_l z^l).Ψ^+_k = Ψ^+_{l+k} r_l - Σ_{i=1}^{l} Σ_{j=0}^{l-i} (-1)^{l-i-j} Ψ^+_j r_l Ψ^-_{l-i-j} Ψ^+_{i+k}`.
pub fn lp_lie_derivative_explicit(
    a: &AMatrixSeries,
    l: usize,
    r: &ConstMatrix,
    trunc_degree: usize,
    window: usize,
) -> Result<Tower> {
    let m = a.dim();
    check_gplus(r, l, m)?;
    let k = window + 1;
    let (plus, minus) = wave_from_a(a, trunc_degree, k + l)?;
    let tmpl = Series::zero(m, trunc_degree);
    let rl = Matrix::lift_const(r, &tmpl);
    let p = |i: usize| plus.coeff(i);
    let coeffs: Vec<DualMatrix> = (0..=k)
        .map(|kk| {
            let mut delta = p(l + kk).mul(&rl);
            for i in 1..=l {
                for j in 0..=l - i {
                    let term = p(j).mul(&rl).mul(minus.coeff(l - i - j)).mul(p(i + kk));
                    delta = delta.sub(&term.scale(&sign(l - i - j)));
                }
            }
            SeriesMatrix::dual(p(kk), &delta)
        })
        .collect();
    dual_ring_tower(ZSeries::new(coeffs), window)
}

/// `∂_ε` of the tower of `A(z)(I + ε r_l z^l)` inside the `W_k = 0` family.
pub fn lp_lie_derivative_literal(
    a: &AMatrixSeries,
    l: usize,
    r: &ConstMatrix,
    trunc_degree: usize,
    window: usize,
) -> Result<Tower> {
    let m = a.dim();
    check_gplus(r, l, m)?;
    let k = window + 1;
    let (plus, _) = wave_from_a(a, trunc_degree, k)?;
    let tmpl = Series::zero(m, trunc_degree);
    let rho = epsilon_const(r, &tmpl);
    let coeffs: Vec<DualMatrix> = (0..=k)
        .map(|d| {
            let mut acc = plus.coeff(d).lift_dual();
            if d >= l {
                acc = acc.add(&plus.coeff(d - l).lift_dual().mul(&rho));
            }
            acc
        })
        .collect();
    dual_ring_tower(ZSeries::new(coeffs), window)
}

/// Compares the wave-function derivative with `(-1)^{l-1}` times the action of
/// `r_l z^l` on the tower, on the window `B - l`; also cross-checks the dual
/// number path against the explicit variation formula.
pub fn check_sign_theorem(a: &AMatrixSeries, l: usize, r: &ConstMatrix, trunc_degree: usize, window: usize) -> Result<Report> {
    if l > window {
        return Err(Error::Window {
            needed: l,
            available: window,
        });
    }
    let t = lp_tower_of(a, trunc_degree, window)?;
    let lhs = lp_lie_derivative(a, l, r, trunc_degree, window)?;
    let explicit = lp_lie_derivative_explicit(a, l, r, trunc_degree, window)?;
    let rhs = act_r(&t, &GPlusElement::single(l, r.clone())?)?.scale(&sign(l - 1));
    let w = window - l;
    let mut report = Report::new();
    report.record(
        format!("explicit variation formula (l={l})"),
        lhs.first_difference(&explicit),
    );
    report.record(
        format!("sign theorem (l={l})"),
        lhs.restrict(w)?.first_difference(&rhs),
    );
    Ok(report)
}

/// Axioms, master equations, the `dM_{0,0}` formula and the derivative
/// identity for the tower of `A(z)`.
pub fn check_lp(a: &AMatrixSeries, trunc_degree: usize, window: usize) -> Result<Report> {
    let (plus, minus) = wave_from_a(a, trunc_degree, window + 1)?;
    let mut report = verify_axioms(&plus, &minus, &plus.w);
    let t = lp_tower(&plus.coeffs, &minus.coeffs, window)?;
    report.extend(verify_master(&t));
    report.record("dM00 formula", lp_dm00_failure(&plus, &minus, &t));
    report.record("derivative identity", derivative_identity_failure(&plus, &minus));
    report.record(
        "M00 two forms",
        series_mismatch(&minus.coeff(0).mul(plus.coeff(1)), &minus.coeff(1).mul(plus.coeff(0))),
    );
    Ok(report)
}
