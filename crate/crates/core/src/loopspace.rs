//! Loop space description of the master equations: `μ: 𝒱₊ → 𝒱₋`, the
//! functional `Q`, and `φ = π ∘ z^{-1} ∘ j`.
//!
//! Elements of `𝒱₋` are stored in the basis `(-z)^{-1}, (-z)^{-2}, …`.

use crate::error::{Error, Result};
use crate::report::Report;
use crate::series::{int, Series, SeriesMatrix};
use crate::tower::Tower;

/// A vector of length `m` with series entries.
pub type SeriesVector = Vec<Series>;

fn check_vec(v: &[Series], m: usize) -> Result<()> {
    if v.len() != m {
        return Err(Error::Shape(format!("vector of length {}, expected {m}", v.len())));
    }
    Ok(())
}

fn mat_vec(a: &SeriesMatrix, v: &[Series]) -> SeriesVector {
    (0..a.dim())
        .map(|i| {
            let mut acc = v[0].zero_like();
            for (j, x) in v.iter().enumerate() {
                let c = a.get(i, j);
                if !c.is_zero() && !x.is_zero() {
                    acc = &acc + &(c * x);
                }
            }
            acc
        })
        .collect()
}

fn vec_add(a: &[Series], b: &[Series]) -> SeriesVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vec_neg(a: &[Series]) -> SeriesVector {
    a.iter().map(|x| -x).collect()
}

fn vec_truncate(a: &[Series], d: usize) -> SeriesVector {
    a.iter().map(|x| x.truncate(d)).collect()
}

/// `q_0 + q_1 z + … + q_K z^K`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VPlusVector {
    coeffs: Vec<SeriesVector>,
}

impl VPlusVector {
    pub fn new(coeffs: Vec<SeriesVector>) -> Result<VPlusVector> {
        let Some(first) = coeffs.first() else {
            return Err(Error::Shape("empty vector".into()));
        };
        let m = first.len();
        for c in &coeffs {
            check_vec(c, m)?;
        }
        Ok(VPlusVector { coeffs })
    }

    /// `e_ν z^i` with unit entry `1` in the given series ring.
    pub fn basis(m: usize, nu: usize, i: usize, num_vars: usize, trunc_degree: usize) -> VPlusVector {
        let zero = Series::zero(num_vars, trunc_degree);
        let mut coeffs = vec![vec![zero; m]; i + 1];
        coeffs[i][nu] = Series::one(num_vars, trunc_degree);
        VPlusVector { coeffs }
    }

    /// `q_0` alone.
    pub fn constant(q0: SeriesVector) -> VPlusVector {
        VPlusVector { coeffs: vec![q0] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn coeffs(&self) -> &[SeriesVector] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &SeriesVector {
        &self.coeffs[i]
    }

    /// `(v - q_0)/z`.
    fn shift(&self) -> Option<VPlusVector> {
        (self.coeffs.len() > 1).then(|| VPlusVector {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }
}

/// `q*_0 (-z)^{-1} + q*_1 (-z)^{-2} + …`, known to a finite depth.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VMinusVector {
    coeffs: Vec<SeriesVector>,
}

impl VMinusVector {
    pub fn new(coeffs: Vec<SeriesVector>) -> VMinusVector {
        VMinusVector { coeffs }
    }

    /// Number of known coefficients.
    pub fn depth(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[SeriesVector] {
        &self.coeffs
    }

    /// The coefficient of `(-z)^{-a-1}`.
    pub fn coeff(&self, a: usize) -> &SeriesVector {
        &self.coeffs[a]
    }

    /// The coefficient of `z^{-a-1}`.
    pub fn z_coeff(&self, a: usize) -> SeriesVector {
        if a % 2 == 0 {
            vec_neg(&self.coeffs[a])
        } else {
            self.coeffs[a].clone()
        }
    }

    fn truncate_depth(&self, depth: usize) -> VMinusVector {
        VMinusVector {
            coeffs: self.coeffs[..depth.min(self.coeffs.len())].to_vec(),
        }
    }
}

fn check_dim(t: &Tower, v: &VPlusVector) -> Result<()> {
    if t.dim() != v.dim() {
        return Err(Error::Shape(format!("vector of length {}, tower of size {}", v.dim(), t.dim())));
    }
    Ok(())
}

fn window_need(needed: usize, t: &Tower) -> Result<()> {
    if needed > t.window() {
        return Err(Error::Window {
            needed,
            available: t.window(),
        });
    }
    Ok(())
}

/// `Σ_i M_{a,i} q_i` at `(-z)^{-a-1}` for `a <= B - K`.
pub fn mu_apply(t: &Tower, v: &VPlusVector) -> Result<VMinusVector> {
    check_dim(t, v)?;
    window_need(v.degree(), t)?;
    let coeffs = (0..=t.window() - v.degree())
        .map(|a| {
            let mut acc = mat_vec(t.get(a, 0), v.coeff(0));
            for i in 1..=v.degree() {
                acc = vec_add(&acc, &mat_vec(t.get(a, i), v.coeff(i)));
            }
            acc
        })
        .collect();
    Ok(VMinusVector { coeffs })
}

/// `Σ_i ∂_k M_{a,i} q_i`, the derivative of `μ` along `t_k` with `v` held fixed.
pub fn dmu_apply(t: &Tower, v: &VPlusVector, k: usize) -> Result<VMinusVector> {
    check_dim(t, v)?;
    window_need(v.degree(), t)?;
    let d = t.trunc_degree().saturating_sub(1);
    let mut coeffs = Vec::new();
    for a in 0..=t.window() - v.degree() {
        let mut acc: Option<SeriesVector> = None;
        for i in 0..=v.degree() {
            let term = mat_vec(&t.get(a, i).partial(k), &vec_truncate(v.coeff(i), d));
            acc = Some(match acc {
                None => term,
                Some(x) => vec_add(&x, &term),
            });
        }
        coeffs.push(acc.expect("degree >= 0"));
    }
    Ok(VMinusVector { coeffs })
}

/// `Q = q_0 + Σ_i M_{0,i} q_{i+1}`.
pub fn q_functional(t: &Tower, v: &VPlusVector) -> Result<SeriesVector> {
    check_dim(t, v)?;
    window_need(v.degree().saturating_sub(1), t)?;
    let mut acc = v.coeff(0).clone();
    for i in 1..=v.degree() {
        acc = vec_add(&acc, &mat_vec(t.get(0, i - 1), v.coeff(i)));
    }
    Ok(acc)
}

/// `φ(v) = π(z^{-1} j(v))`. The `𝒱₊` part of `z^{-1}(v + μ(v))` is `w = (v - q_0)/z`,
/// so the projection along the graph subtracts `w + μ(w)`.
pub fn phi_apply(t: &Tower, v: &VPlusVector) -> Result<VMinusVector> {
    check_dim(t, v)?;
    window_need(v.degree(), t)?;
    let mu = mu_apply(t, v)?;
    // z^{-1} maps (-z)^{-a-1} to -(-z)^{-a-2} and z^0 to -(-z)^{-1}.
    let mut shifted = vec![vec_neg(v.coeff(0))];
    shifted.extend(mu.coeffs().iter().map(|c| vec_neg(c)));
    let mut x = VMinusVector::new(shifted);
    if let Some(w) = v.shift() {
        let mu_w = mu_apply(t, &w)?;
        x = x.truncate_depth(mu_w.depth());
        for (a, c) in mu_w.coeffs().iter().enumerate().take(x.depth()) {
            x.coeffs[a] = vec_add(&x.coeffs[a], &vec_neg(c));
        }
    }
    Ok(x)
}

fn first_vec_difference(a: &VMinusVector, b: &VMinusVector) -> Option<String> {
    let depth = a.depth().min(b.depth());
    for k in 0..depth {
        for (mu, (x, y)) in a.coeff(k).iter().zip(b.coeff(k)).enumerate() {
            if x != y {
                return Some(format!("(-z)^-{} component {}", k + 1, mu + 1));
            }
        }
    }
    None
}

/// Condition (b) on the spanning vectors `e_ν z^i`, `i <= B`:
/// (1) `φ(v) = φ(Q(v))`; (2) `φ(v)_k = -M_{k-1,0} Q(v)` with `M_{-1,0} = I`;
/// (3) `∂_j μ(v)_k = ∂_j M_{k,0} Q(v)`.
pub fn check_lemma_b(t: &Tower) -> Report {
    let mut report = Report::new();
    let (m, n, d) = (t.dim(), t.num_vars(), t.trunc_degree());
    for i in 0..=t.window() {
        for nu in 0..m {
            let v = VPlusVector::basis(m, nu, i, n, d);
            let q = q_functional(t, &v).expect("i <= B");
            let phi = phi_apply(t, &v).expect("i <= B");
            let phi_q = phi_apply(t, &VPlusVector::constant(q.clone())).expect("constant");
            report.record(
                format!("loop space phi depends on Q (e{} z^{i})", nu + 1),
                first_vec_difference(&phi, &phi_q),
            );
            let pattern = VMinusVector::new(
                (0..phi.depth())
                    .map(|k| if k == 0 { vec_neg(&q) } else { vec_neg(&mat_vec(t.get(k - 1, 0), &q)) })
                    .collect(),
            );
            report.record(
                format!("loop space phi pattern (e{} z^{i})", nu + 1),
                first_vec_difference(&phi, &pattern),
            );
            let q_low = vec_truncate(&q, d.saturating_sub(1));
            for k in 0..n {
                let dmu = dmu_apply(t, &v, k).expect("i <= B");
                let want = VMinusVector::new(
                    (0..dmu.depth())
                        .map(|a| mat_vec(&t.get(a, 0).partial(k), &q_low))
                        .collect(),
                );
                report.record(
                    format!("loop space dmu pattern d/dt{} (e{} z^{i})", k + 1, nu + 1),
                    first_vec_difference(&dmu, &want),
                );
            }
        }
    }
    report
}

/// Vectors `v = Σ q_i z^i` with `Q(v) = 0`: `q_0 := -Σ M_{0,i} q_{i+1}` for the
/// given higher coefficients.
pub fn kernel_vector(t: &Tower, higher: Vec<SeriesVector>) -> Result<VPlusVector> {
    let m = t.dim();
    let zero = vec![Series::zero(t.num_vars(), t.trunc_degree()); m];
    let mut coeffs = vec![zero];
    coeffs.extend(higher);
    let v = VPlusVector::new(coeffs)?;
    let q = q_functional(t, &v)?;
    let mut coeffs = v.coeffs;
    coeffs[0] = q.iter().map(|x| x.scale(&int(-1))).collect();
    VPlusVector::new(coeffs)
}
