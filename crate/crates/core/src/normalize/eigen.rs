use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::series::{int, ConstMatrix, Matrix, Rat};

/// Coefficients `c_0, …, c_m` of `det(x I - A)`, by Faddeev–LeVerrier.
pub fn char_poly(a: &ConstMatrix) -> Vec<Rat> {
    let m = a.dim();
    let mut c = vec![int(0); m + 1];
    c[m] = int(1);
    let mut mk = ConstMatrix::zeros(m);
    for k in 1..=m {
        mk = a.mul(&mk).add(&ConstMatrix::identity(m).scale(&c[m + 1 - k]));
        c[m - k] = -a.mul(&mk).trace() / int(k as i64);
    }
    c
}

fn eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(int(0), |acc, c| acc * x + c)
}

/// Divides by `x - r`; `r` must be a root.
fn deflate(p: &[Rat], r: &Rat) -> Vec<Rat> {
    let n = p.len() - 1;
    let mut q = vec![int(0); n];
    let mut carry = int(0);
    for k in (0..n).rev() {
        carry = &p[k + 1] + &carry * r;
        q[k] = carry.clone();
    }
    q
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    out
}

/// All rational roots with multiplicity, and whether they exhaust the degree.
pub fn rational_roots(p: &[Rat]) -> (Vec<Rat>, bool) {
    let mut p = p.to_vec();
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut roots = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        roots.push(int(0));
        p.remove(0);
    }
    loop {
        if p.len() <= 1 {
            return (roots, true);
        }
        let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();
        let lead = ints.last().expect("nonconstant");
        let mut found = None;
        'search: for num in divisors(&ints[0]) {
            for den in divisors(lead) {
                for s in [1, -1] {
                    let x = Rat::new(&num * BigInt::from(s), den.clone());
                    if eval(&p, &x).is_zero() {
                        found = Some(x);
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(r) => {
                p = deflate(&p, &r);
                roots.push(r);
            }
            None => return (roots, false),
        }
    }
}

/// A basis of the kernel of `a`.
pub fn kernel(a: &ConstMatrix) -> Vec<Vec<Rat>> {
    let m = a.dim();
    let mut rows: Vec<Vec<Rat>> = a.rows().map(|r| r.to_vec()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(p) = (row..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = rows[row][col].recip();
        for x in rows[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i != row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..m {
                    let v = &rows[row][j] * &f;
                    rows[i][j] -= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (0..m)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![int(0); m];
            v[free] = int(1);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[r][free].clone();
            }
            v
        })
        .collect()
}

/// `A = P diag(λ) P^{-1}` when the eigenvalues are rational and distinct.
pub fn diagonalize_distinct(a: &ConstMatrix) -> Option<(ConstMatrix, Vec<Rat>)> {
    let m = a.dim();
    let (mut roots, complete) = rational_roots(&char_poly(a));
    if !complete {
        return None;
    }
    roots.sort();
    if roots.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let mut cols = Vec::new();
    for r in &roots {
        let shifted = a.sub(&ConstMatrix::identity(m).scale(r));
        let k = kernel(&shifted);
        cols.push(k.into_iter().next()?);
    }
    let p = Matrix::from_fn(m, |i, j| cols[j][i].clone());
    Some((p, roots))
}
