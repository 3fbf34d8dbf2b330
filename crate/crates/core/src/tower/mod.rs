//! Towers `M_{a,b}` of matrix potentials on a triangular window `a + b <= B`.

mod potential;

pub use potential::{full_potential, PQPolynomial, PQVar};

use crate::error::{Error, Result};
use crate::report::Report;
use crate::series::{factorial, int, DualSeries, Matrix, Rat, Ring, Series, SeriesMatrix};

fn cell_index(a: usize, b: usize) -> usize {
    let s = a + b;
    s * (s + 1) / 2 + a
}

/// A triangular array of `m x m` matrices over a common ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tower<R = Series> {
    window: usize,
    cells: Vec<Matrix<R>>,
}

pub type DualTower = Tower<DualSeries>;

impl<R: Ring> Tower<R> {
    /// Builds the cells in `(a + b, a)` order.
    pub fn from_fn(window: usize, mut f: impl FnMut(usize, usize) -> Matrix<R>) -> Tower<R> {
        let mut cells = Vec::with_capacity(cell_index(0, window + 1));
        for s in 0..=window {
            for a in 0..=s {
                cells.push(f(a, s - a));
            }
        }
        let t = Tower { window, cells };
        let (m, n, d) = (t.dim(), t.num_vars(), t.trunc_degree());
        assert!(
            t.cells
                .iter()
                .all(|c| c.dim() == m && c.num_vars() == n && c.trunc_degree() == d),
            "tower cells must share (m, N, D)"
        );
        t
    }

    pub fn try_from_fn(
        window: usize,
        mut f: impl FnMut(usize, usize) -> Result<Matrix<R>>,
    ) -> Result<Tower<R>> {
        let mut cells = Vec::with_capacity(cell_index(0, window + 1));
        for s in 0..=window {
            for a in 0..=s {
                cells.push(f(a, s - a)?);
            }
        }
        let first = &cells[0];
        let (m, n, d) = (first.dim(), first.num_vars(), first.trunc_degree());
        if cells
            .iter()
            .any(|c| c.dim() != m || c.num_vars() != n || c.trunc_degree() != d)
        {
            return Err(Error::Shape("tower cells must share (m, N, D)".into()));
        }
        Ok(Tower { window, cells })
    }

    pub fn zero_like(m: usize, window: usize, template: &R) -> Tower<R> {
        Tower::from_fn(window, |_, _| Matrix::zero_like(m, template))
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.cells[0].dim()
    }

    pub fn num_vars(&self) -> usize {
        self.cells[0].num_vars()
    }

    pub fn trunc_degree(&self) -> usize {
        self.cells[0].trunc_degree()
    }

    pub fn template(&self) -> &R {
        self.cells[0].get(0, 0)
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a + b <= self.window
    }

    /// `M_{a,b}`; panics outside the window.
    pub fn get(&self, a: usize, b: usize) -> &Matrix<R> {
        assert!(
            self.contains(a, b),
            "cell ({a},{b}) outside window {}",
            self.window
        );
        &self.cells[cell_index(a, b)]
    }

    /// `M_{a,b}` for signed indices; `None` outside the window or when an
    /// index is negative.
    pub fn get_signed(&self, a: i64, b: i64) -> Option<&Matrix<R>> {
        if a < 0 || b < 0 {
            return None;
        }
        let (a, b) = (a as usize, b as usize);
        self.contains(a, b).then(|| &self.cells[cell_index(a, b)])
    }

    pub fn set(&mut self, a: usize, b: usize, m: Matrix<R>) {
        assert!(self.contains(a, b));
        self.cells[cell_index(a, b)] = m;
    }

    /// Cells in `(a + b, a)` order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, &Matrix<R>)> {
        (0..=self.window)
            .flat_map(|s| (0..=s).map(move |a| (a, s - a)))
            .zip(&self.cells)
            .map(|((a, b), m)| (a, b, m))
    }

    pub fn restrict(&self, window: usize) -> Result<Tower<R>> {
        if window > self.window {
            return Err(Error::Window {
                needed: window,
                available: self.window,
            });
        }
        Ok(Tower {
            window,
            cells: self.cells[..cell_index(0, window + 1)].to_vec(),
        })
    }

    pub fn map<S: Ring>(&self, mut f: impl FnMut(&Matrix<R>) -> Matrix<S>) -> Tower<S> {
        Tower {
            window: self.window,
            cells: self.cells.iter().map(&mut f).collect(),
        }
    }

    fn zip_with(&self, other: &Tower<R>, f: impl Fn(&Matrix<R>, &Matrix<R>) -> Matrix<R>) -> Tower<R> {
        assert_eq!(self.window, other.window, "tower windows differ");
        Tower {
            window: self.window,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Tower<R>) -> Tower<R> {
        self.zip_with(other, Matrix::add)
    }

    pub fn sub(&self, other: &Tower<R>) -> Tower<R> {
        self.zip_with(other, Matrix::sub)
    }

    pub fn scale(&self, c: &Rat) -> Tower<R> {
        self.map(|m| m.scale(c))
    }

    pub fn truncate(&self, d: usize) -> Tower<R> {
        self.map(|m| m.truncate(d))
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(Matrix::is_zero)
    }

    /// Location of the first nonzero coefficient, if any.
    pub fn first_nonzero(&self) -> Option<String> {
        self.cells().find_map(|(a, b, m)| {
            m.first_nonzero()
                .map(|(i, j, mono, c)| format!("cell ({a},{b}) entry ({},{}) monomial {mono} coefficient {c}", i + 1, j + 1))
        })
    }

    /// Location of the first coefficient where the towers differ on their
    /// common window.
    pub fn first_difference(&self, other: &Tower<R>) -> Option<String> {
        if self.dim() != other.dim() {
            return Some(format!("matrix sizes {} and {}", self.dim(), other.dim()));
        }
        let w = self.window.min(other.window);
        self.restrict(w)
            .expect("within window")
            .sub(&other.restrict(w).expect("within window"))
            .first_nonzero()
    }

    /// First row `M_{0,0}, …, M_{0,B}`.
    pub fn first_row(&self) -> Vec<Matrix<R>> {
        (0..=self.window).map(|b| self.get(0, b).clone()).collect()
    }

    /// Every cell has vanishing constant term.
    pub fn constants_vanish(&self) -> bool {
        self.cells.iter().all(|m| m.has_order_at_least(1))
    }

    /// First cell violating `M_{a,b} = O(t^{a+b+1})`.
    pub fn grading_failure(&self) -> Option<String> {
        self.cells().find_map(|(a, b, m)| {
            (!m.has_order_at_least(a + b + 1)).then(|| format!("cell ({a},{b}) has order below {}", a + b + 1))
        })
    }

    pub fn is_graded(&self) -> bool {
        self.grading_failure().is_none()
    }
}

impl Tower<Series> {
    pub fn zero(m: usize, num_vars: usize, trunc_degree: usize, window: usize) -> Tower {
        Tower::zero_like(m, window, &Series::zero(num_vars, trunc_degree))
    }

    pub fn lift_dual(&self) -> DualTower {
        self.map(SeriesMatrix::lift_dual)
    }

    /// `self + ε·tangent` on the common window.
    pub fn with_tangent(&self, tangent: &Tower) -> DualTower {
        let w = self.window.min(tangent.window);
        let base = self.restrict(w).expect("within window");
        let tan = tangent.restrict(w).expect("within window");
        Tower {
            window: w,
            cells: base
                .cells
                .iter()
                .zip(&tan.cells)
                .map(|(v, e)| SeriesMatrix::dual(v, e))
                .collect(),
        }
    }

    /// All stored cells commute pairwise.
    pub fn pairwise_commuting(&self) -> bool {
        let cells: Vec<&SeriesMatrix> = self.cells.iter().collect();
        cells
            .iter()
            .enumerate()
            .all(|(i, x)| cells[i + 1..].iter().all(|y| x.commutator(y).is_zero()))
    }
}

impl DualTower {
    pub fn value(&self) -> Tower {
        self.map(|m| m.value())
    }

    pub fn epsilon(&self) -> Tower {
        self.map(|m| m.epsilon())
    }
}

/// The tower `M_{a,b} = diag(d_μ^{a+b+1} / (a! b! (a+b+1)))` built from the
/// diagonal of `M_{0,0}`.
pub fn tower_diag_seed(diag: &[Series], window: usize) -> Result<Tower> {
    let Some(first) = diag.first() else {
        return Err(Error::Domain("seed needs at least one diagonal entry".into()));
    };
    for (k, d) in diag.iter().enumerate() {
        if !d.same_shape(first) {
            return Err(Error::Shape("seed entries must share (N, D)".into()));
        }
        if !d.has_order_at_least(1) {
            return Err(Error::Domain(format!(
                "seed entry {} has nonzero constant term",
                k + 1
            )));
        }
    }
    let m = diag.len();
    let max_power = window + 1;
    let powers: Vec<Vec<Series>> = diag
        .iter()
        .map(|d| {
            let mut row = vec![d.constant_like(int(1))];
            for e in 1..=max_power {
                let next = &row[e - 1] * d;
                row.push(next);
            }
            row
        })
        .collect();
    Ok(Tower::from_fn(window, |a, b| {
        let s = a + b + 1;
        let c = (factorial(a) * factorial(b) * int(s as i64)).recip();
        Matrix::from_fn(m, |i, j| {
            if i == j {
                powers[i][s].scale(&c)
            } else {
                first.zero_like()
            }
        })
    }))
}

/// Seed whose `M_{0,0}` is `diag(t^1, …, t^m)`; requires `m <= N`.
pub fn coordinate_seed(m: usize, num_vars: usize, trunc_degree: usize, window: usize) -> Result<Tower> {
    let diag = (0..m)
        .map(|k| Series::var(num_vars, trunc_degree, k))
        .collect::<Result<Vec<_>>>()?;
    tower_diag_seed(&diag, window)
}

fn describe<R: Ring>(diff: &Matrix<R>) -> Option<String> {
    diff.first_nonzero()
        .map(|(i, j, mono, c)| format!("entry ({},{}) monomial {mono} off by {c}", i + 1, j + 1))
}

/// Checks the three master equations on every cell with `a + b + 1 <= B`:
///
/// 1. `∂M_{a+1,b} = M_{a,0} ∂M_{0,b}`
/// 2. `∂M_{a,b+1} = ∂M_{a,0} M_{0,b}`
/// 3. `M_{a+1,b} + M_{a,b+1} = M_{a,0} M_{0,b}`
///
/// Derivative identities hold modulo degree `D`, i.e. in the `D - 1`
/// truncation of every factor.
pub fn verify_master<R: Ring>(t: &Tower<R>) -> Report {
    let mut report = Report::new();
    if t.window == 0 {
        report.skip("master", "window 0 has no equations");
        return report;
    }
    let n = t.num_vars();
    let d = t.trunc_degree();
    let lowered: Option<Tower<R>> = (d > 0).then(|| t.truncate(d - 1));
    let partials: Vec<Tower<R>> = if d > 0 {
        (0..n).map(|k| t.map(|m| m.partial(k))).collect()
    } else {
        Vec::new()
    };
    for s in 0..t.window {
        for a in 0..=s {
            let b = s - a;
            let lhs = t.get(a + 1, b).add(t.get(a, b + 1));
            let rhs = t.get(a, 0).mul(t.get(0, b));
            report.record(
                format!("master eq3 ({a},{b})"),
                describe(&lhs.sub(&rhs)),
            );
            let Some(low) = &lowered else {
                continue;
            };
            let mut f1 = None;
            let mut f2 = None;
            for (k, dt) in partials.iter().enumerate() {
                if f1.is_none() {
                    let diff = dt.get(a + 1, b).sub(&low.get(a, 0).mul(dt.get(0, b)));
                    f1 = describe(&diff).map(|l| format!("d/dt{} {l}", k + 1));
                }
                if f2.is_none() {
                    let diff = dt.get(a, b + 1).sub(&dt.get(a, 0).mul(low.get(0, b)));
                    f2 = describe(&diff).map(|l| format!("d/dt{} {l}", k + 1));
                }
            }
            report.record(format!("master eq1 ({a},{b})"), f1);
            report.record(format!("master eq2 ({a},{b})"), f2);
        }
    }
    report
}

/// First pair `(i, j)` with `∂_i M ∂_j M ≠ ∂_j M ∂_i M`.
pub fn commutativity_failure<R: Ring>(m00: &Matrix<R>) -> Option<String> {
    if m00.trunc_degree() == 0 {
        return None;
    }
    let partials: Vec<Matrix<R>> = (0..m00.num_vars()).map(|k| m00.partial(k)).collect();
    for i in 0..partials.len() {
        for j in i + 1..partials.len() {
            if let Some(loc) = describe(&partials[i].commutator(&partials[j])) {
                return Some(format!("[d/dt{}, d/dt{}] {loc}", i + 1, j + 1));
            }
        }
    }
    None
}

/// `dM ∧ dM = 0`, modulo degree `D - 1`.
pub fn verify_commutativity<R: Ring>(m00: &Matrix<R>) -> bool {
    commutativity_failure(m00).is_none()
}

/// `J(z) = I + Σ_b M_{0,b} z^{-(b+1)}` stored as `[M_{0,0}, …, M_{0,B}]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JSeries<R = Series> {
    pub coeffs: Vec<Matrix<R>>,
}

impl<R: Ring> JSeries<R> {
    pub fn window(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^{-k}`, with the identity at `k = 0`.
    pub fn coeff(&self, k: usize) -> Matrix<R> {
        if k == 0 {
            let c = &self.coeffs[0];
            Matrix::identity_like(c.dim(), c.get(0, 0))
        } else {
            self.coeffs[k - 1].clone()
        }
    }
}

pub fn j_series<R: Ring>(t: &Tower<R>) -> JSeries<R> {
    JSeries {
        coeffs: t.first_row(),
    }
}

/// Coefficientwise `∇_z J = 0`: `dJ_1 = dM_{0,0}` and
/// `dM_{0,b+1} = dM_{0,0} M_{0,b}`, modulo degree `D - 1`.
pub fn flatness_failure<R: Ring>(j: &JSeries<R>, m00: &Matrix<R>) -> Option<String> {
    let d = m00.trunc_degree();
    if d == 0 {
        return None;
    }
    for k in 0..m00.num_vars() {
        let dm = m00.partial(k);
        if let Some(loc) = describe(&j.coeffs[0].partial(k).sub(&dm)) {
            return Some(format!("z^-1 d/dt{} {loc}", k + 1));
        }
        for b in 0..j.window() {
            let lhs = j.coeffs[b + 1].partial(k);
            let rhs = dm.mul(&j.coeffs[b].truncate(d - 1));
            if let Some(loc) = describe(&lhs.sub(&rhs)) {
                return Some(format!("z^-{} d/dt{} {loc}", b + 2, k + 1));
            }
        }
    }
    None
}

pub fn verify_flat<R: Ring>(j: &JSeries<R>, m00: &Matrix<R>) -> bool {
    flatness_failure(j, m00).is_none()
}

/// Rebuilds a window from its first row via
/// `M_{a+1,b} = M_{a,0} M_{0,b} - M_{a,b+1}`.
pub fn reconstruct_from_first_row<R: Ring>(first_row: &[Matrix<R>]) -> Tower<R> {
    let window = first_row.len() - 1;
    let mut rows: Vec<Vec<Matrix<R>>> = vec![first_row.to_vec()];
    for a in 0..window {
        let prev = &rows[a];
        let next: Vec<Matrix<R>> = (0..window - a)
            .map(|b| prev[0].mul(&first_row[b]).sub(&prev[b + 1]))
            .collect();
        rows.push(next);
    }
    Tower::from_fn(window, |a, b| rows[a][b].clone())
}
