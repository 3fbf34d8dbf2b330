//! Bringing a tower to the canonical diagonal form: conjugate by `GL(V)`,
//! remove constant terms with `S = J(-z)`, kill the off-diagonal part of
//! `M_{0,0}` degree by degree with `exp(z^l r_l)`, then change coordinates.

mod eigen;

pub use eigen::{char_poly, diagonalize_distinct, kernel, rational_roots};

use crate::actions::{conjugate, exp_act_r, exp_act_s, act_r, GLElement, GMinusGroup, GPlusElement};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::series::{factorial, int, ConstMatrix, CoordinateMap, Matrix, Series, SeriesMatrix};
use crate::tower::{coordinate_seed, j_series, tower_diag_seed, Tower};

/// One logged stage of [`normalize`].
#[derive(Clone, Debug)]
pub struct NormalizationStep {
    pub name: String,
    pub report: Report,
}

#[derive(Clone, Debug)]
pub struct NormalizationResult {
    /// Conjugation applied first.
    pub gl: GLElement,
    pub s_element: GMinusGroup,
    /// Applied in order as `exp(z^l r_l)`.
    pub r_factors: Vec<(usize, ConstMatrix)>,
    /// `t = g(t')`, substituted into every entry at the end.
    pub coordinate_map: Option<CoordinateMap>,
    pub normalized: Tower,
    pub log: Vec<NormalizationStep>,
}

impl NormalizationResult {
    /// Applies the recorded factors to `t`.
    pub fn replay(&self, t: &Tower) -> Result<Tower> {
        let mut out = conjugate(t, &self.gl)?;
        if !self.s_element.is_identity() {
            out = exp_act_s(&out, &self.s_element.log())?;
        }
        for (l, r) in &self.r_factors {
            out = exp_act_r(&out, &GPlusElement::single(*l, r.clone())?)?;
        }
        if let Some(g) = &self.coordinate_map {
            out = change_coordinates(&out, g)?;
        }
        Ok(out)
    }

    pub fn passed(&self) -> bool {
        self.log.iter().all(|s| s.report.passed())
    }

    /// The final stage's verdict: commuting cells in closed form, and the
    /// coordinate seed when the coordinate step ran.
    pub fn recovered_canonical_form(&self) -> bool {
        self.log
            .iter()
            .find(|s| s.name == "canonical form")
            .is_some_and(|s| s.report.passed())
    }
}

fn derivatives_at_origin(m00: &SeriesMatrix) -> Vec<ConstMatrix> {
    (0..m00.num_vars()).map(|k| m00.partial(k).constant_part()).collect()
}

fn is_diagonal_const(a: &ConstMatrix) -> bool {
    a.is_diagonal()
}

/// A conjugation making every `∂_k M_{0,0}(0)` diagonal, found from the
/// rational eigenvectors of a generic combination.
pub fn diagonalizing_gl(t: &Tower) -> Result<GLElement> {
    let ds = derivatives_at_origin(t.get(0, 0));
    if ds.iter().all(is_diagonal_const) {
        return Ok(GLElement::identity(t.dim()));
    }
    for base in 1..=12i64 {
        let mut a = ConstMatrix::zeros(t.dim());
        let mut c = int(1);
        for d in &ds {
            a = a.add(&d.scale(&c));
            c *= int(base);
        }
        let Some((p, _)) = diagonalize_distinct(&a) else {
            continue;
        };
        let g = GLElement::new(p)?.inverted();
        let m = g.matrix();
        let inv = g.inverse();
        if ds.iter().all(|d| m.mul(d).mul(inv).is_diagonal()) {
            return Ok(g);
        }
    }
    Err(Error::Unsupported(
        "dM00 at the origin is not diagonalizable over the rationals with distinct eigenvalues".into(),
    ))
}

/// `S(z) = J(-z)` at `t = 0` and the tower `S.M`, whose cells vanish at the origin.
pub fn kill_constants(t: &Tower) -> Result<(GMinusGroup, Tower)> {
    let j = j_series(t);
    let coeffs = (1..=t.window() + 1)
        .map(|k| {
            let c = j.coeff(k).constant_part();
            if k % 2 == 1 {
                c.scale(&int(-1))
            } else {
                c
            }
        })
        .collect();
    let s = GMinusGroup::from_coeffs(t.dim(), coeffs)?;
    if s.is_identity() {
        return Ok((s, t.clone()));
    }
    let out = exp_act_s(t, &s.log())?;
    Ok((s, out))
}

fn off_diagonal_order(m: &SeriesMatrix, d: usize) -> Option<String> {
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            if i != j {
                if let Some((mono, c)) = m.get(i, j).first_term_below(d) {
                    return Some(format!("entry ({},{}) has {c}*{mono}", i + 1, j + 1));
                }
            }
        }
    }
    None
}

fn order_failure(m: &SeriesMatrix, d: usize) -> Option<String> {
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            if let Some((mono, c)) = m.get(i, j).first_term_below(d) {
                return Some(format!("entry ({},{}) has {c}*{mono}", i + 1, j + 1));
            }
        }
    }
    None
}

/// `M_{a,b} = O(t^{a+b+1})` and `M_{a,b} = M_{0,0}^{a+b+1}/(a! b! (a+b+1)) + O(t^{a+b+l+1})`,
/// under the preconditions `M_{a,b}(0) = 0` and `M_{0,0} = diagonal + O(t^{l+1})`.
pub fn check_lemma1(t: &Tower, l: usize) -> Report {
    let mut report = Report::new();
    let pre = if !t.constants_vanish() {
        Some("constant terms present".to_string())
    } else {
        off_diagonal_order(t.get(0, 0), l + 1)
    };
    if let Some(why) = pre {
        report.fail(format!("degree bound precondition (l={l})"), why);
        return report;
    }
    let m00 = t.get(0, 0);
    for (a, b, m) in t.cells() {
        let n = a + b + 1;
        report.record(format!("degree bound order (a={a}, b={b})"), order_failure(m, n));
        let den = factorial(a) * factorial(b) * int(n as i64);
        let closed = m00.pow(n).scale(&den.recip());
        report.record(
            format!("degree bound closed form (a={a}, b={b}, l={l})"),
            order_failure(&m.sub(&closed), n + l),
        );
    }
    report
}

/// Linear parts of the diagonal entries of `M_{0,0}`.
pub fn eigen_forms(t: &Tower) -> Vec<Series> {
    let m00 = t.get(0, 0);
    (0..t.dim()).map(|i| m00.get(i, i).homogeneous_part(1)).collect()
}

#[derive(Clone, Debug)]
pub struct DiagonalizeStep {
    pub r: ConstMatrix,
    pub tower: Tower,
    pub report: Report,
}

/// Removes the off-diagonal degree `l+1` part `X` of `M_{0,0}`: with
/// `X_{μν} = x_{μν} (α_ν - α_μ)^{l+1}`, applies `exp(z^l r_l)` where
/// `(r_l)_{μν} = -(l+1)! x_{μν}` off the diagonal and `0` on it.
///
/// On a diagonal tower in closed form the action of `z^l r_l` changes the
/// entry `(μ,ν)` of `M_{0,0}` by `(α_ν - α_μ)^{l+1} (r_l)_{μν}/(l+1)!` in
/// degree `l+1`, since `r_l` multiplies from the left.
pub fn diagonalize_step(t: &Tower, l: usize, alphas: &[Series]) -> Result<DiagonalizeStep> {
    if l == 0 {
        return Err(Error::Domain("steps start at l = 1".into()));
    }
    let m = t.dim();
    let m00 = t.get(0, 0);
    if let Some(why) = off_diagonal_order(m00, l + 1) {
        return Err(Error::Domain(format!("M00 is not diagonal below degree {}: {why}", l + 1)));
    }
    let mut report = check_lemma1(t, l);
    let d = t.trunc_degree();
    let mut r = ConstMatrix::zeros(m);
    if l < d {
        for mu in 0..m {
            for nu in 0..m {
                if mu == nu {
                    continue;
                }
                let x = m00.get(mu, nu).homogeneous_part(l + 1);
                if x.is_zero() {
                    continue;
                }
                let p = (&alphas[nu] - &alphas[mu]).pow(l + 1);
                let Some((lead, pc)) = p.terms().next().map(|(a, b)| (a.clone(), b.clone())) else {
                    return Err(Error::Degenerate(format!(
                        "eigenvalue forms {} and {} coincide",
                        mu + 1,
                        nu + 1
                    )));
                };
                let q = x.coeff(lead.exponents()) / pc;
                if p.scale(&q) != x {
                    return Err(Error::Degenerate(format!(
                        "degree {} part of entry ({},{}) is not a multiple of (α{}-α{})^{}",
                        l + 1,
                        mu + 1,
                        nu + 1,
                        nu + 1,
                        mu + 1,
                        l + 1
                    )));
                }
                r.set(mu, nu, -(factorial(l + 1) * q));
            }
        }
    }
    if r.is_zero() {
        report.pass(format!("diagonalize (l={l}): nothing to remove"));
        report.record(format!("diagonal to order {} (l={l})", l + 2), off_diagonal_order(m00, l + 2));
        return Ok(DiagonalizeStep {
            r,
            tower: t.clone(),
            report,
        });
    }
    let rz = GPlusElement::single(l, r.clone())?;
    if l <= t.window() {
        let tangent = act_r(t, &rz)?;
        let v = tangent.get(0, 0);
        let mut diag_fail = None;
        let mut off_fail = None;
        for mu in 0..m {
            for nu in 0..m {
                let e = v.get(mu, nu);
                if mu == nu {
                    if diag_fail.is_none() {
                        diag_fail = e.first_term_below(l + 2).map(|(mono, c)| format!("entry ({0},{0}) has {c}*{mono}", mu + 1));
                    }
                } else if off_fail.is_none() {
                    let want = (&alphas[nu] - &alphas[mu]).pow(l + 1).scale(&(r.get(mu, nu) / factorial(l + 1)));
                    off_fail = (e - &want)
                        .first_term_below(l + 2)
                        .map(|(mono, c)| format!("entry ({},{}) has {c}*{mono}", mu + 1, nu + 1));
                }
            }
        }
        report.record(format!("diagonalize diagonal part (l={l})"), diag_fail);
        report.record(format!("diagonalize off-diagonal part (l={l})"), off_fail);
    } else {
        report.skip(format!("diagonalize (l={l})"), "index beyond the window");
    }
    let out = exp_act_r(t, &rz)?;
    report.record(
        format!("diagonal to order {} (l={l})", l + 2),
        off_diagonal_order(out.get(0, 0), l + 2),
    );
    Ok(DiagonalizeStep { r, tower: out, report })
}

/// Every entry `f(t) ↦ f(g(t))`.
pub fn change_coordinates(t: &Tower, g: &CoordinateMap) -> Result<Tower> {
    Tower::try_from_fn(t.window(), |a, b| {
        let m = t.get(a, b);
        let entries: Vec<Series> = m.entries().map(|e| g.substitute(e)).collect::<Result<_>>()?;
        Ok(Matrix::from_fn(m.dim(), |i, j| entries[i * m.dim() + j].clone()))
    })
}

pub fn normalize(t: &Tower) -> Result<NormalizationResult> {
    normalize_with_gl(t, None)
}

/// Runs the full pipeline; `gl` overrides the computed diagonalizing conjugation.
pub fn normalize_with_gl(t: &Tower, gl: Option<&GLElement>) -> Result<NormalizationResult> {
    let mut log = Vec::new();
    let gl = match gl {
        Some(g) => g.clone(),
        None => diagonalizing_gl(t)?,
    };
    let mut cur = conjugate(t, &gl)?;
    let mut rep = Report::new();
    let diag0 = derivatives_at_origin(cur.get(0, 0));
    rep.record(
        "dM00 at the origin is diagonal",
        (!diag0.iter().all(is_diagonal_const)).then(|| "off-diagonal entries remain".to_string()),
    );
    log.push(NormalizationStep {
        name: "conjugation".into(),
        report: rep,
    });

    let (s, killed) = kill_constants(&cur)?;
    cur = killed;
    let mut rep = Report::new();
    rep.record(
        "constants vanish",
        cur.cells()
            .find(|(_, _, m)| !m.constant_part().is_zero())
            .map(|(a, b, _)| format!("cell ({a},{b})")),
    );
    log.push(NormalizationStep {
        name: "kill constants".into(),
        report: rep,
    });

    let alphas = eigen_forms(&cur);
    for i in 0..alphas.len() {
        for j in 0..i {
            if alphas[i] == alphas[j] {
                return Err(Error::Unsupported(format!(
                    "eigenvalue forms {} and {} coincide",
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    let mut r_factors = Vec::new();
    for l in 1..t.trunc_degree().max(1) {
        let step = diagonalize_step(&cur, l, &alphas)?;
        log.push(NormalizationStep {
            name: format!("diagonalize l={l}"),
            report: step.report,
        });
        if !step.r.is_zero() {
            r_factors.push((l, step.r));
        }
        cur = step.tower;
    }

    let mut coordinate_map = None;
    if t.num_vars() == t.dim() {
        let m00 = cur.get(0, 0);
        let f = CoordinateMap::new((0..t.dim()).map(|i| m00.get(i, i).clone()).collect())?;
        let g = f.invert()?;
        cur = change_coordinates(&cur, &g)?;
        coordinate_map = Some(g);
    }

    let mut rep = Report::new();
    rep.record(
        "pairwise commuting",
        (!cur.pairwise_commuting()).then(|| "some cells do not commute".to_string()),
    );
    let m00 = cur.get(0, 0);
    let diag: Vec<Series> = (0..t.dim()).map(|i| m00.get(i, i).clone()).collect();
    let closed = if m00.is_diagonal() {
        tower_diag_seed(&diag, cur.window()).ok()
    } else {
        None
    };
    rep.record(
        "closed form",
        match &closed {
            Some(c) => cur.first_difference(c),
            None => Some("M00 is not diagonal".into()),
        },
    );
    if coordinate_map.is_some() {
        let seed = coordinate_seed(t.dim(), t.num_vars(), t.trunc_degree(), cur.window())?;
        rep.record("coordinate seed", cur.first_difference(&seed));
    }
    log.push(NormalizationStep {
        name: "canonical form".into(),
        report: rep,
    });

    Ok(NormalizationResult {
        gl,
        s_element: s,
        r_factors,
        coordinate_map,
        normalized: cur,
        log,
    })
}
