//! Random towers on the orbit of a diagonal seed.

use crate::actions::{conjugate, exp_act_r, exp_act_s, GLElement, GMinusElement, GPlusElement};
use crate::error::Result;
use crate::rng::SeededRng;
use crate::series::Series;
use crate::tower::{coordinate_seed, tower_diag_seed, Tower};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitParams {
    pub m: usize,
    pub num_vars: usize,
    pub trunc_degree: usize,
    pub window: usize,
    /// Largest `l` of the random upper triangular element.
    pub r_max: usize,
    /// Largest `l` of the random lower triangular element.
    pub s_max: usize,
    /// Numerators of random entries lie in `-bound..=bound`.
    pub bound: i64,
    /// Denominators of random entries lie in `1..=den`.
    pub den: i64,
}

impl OrbitParams {
    pub fn new(m: usize, num_vars: usize, trunc_degree: usize, window: usize) -> OrbitParams {
        OrbitParams {
            m,
            num_vars,
            trunc_degree,
            window,
            r_max: 2,
            s_max: 2,
            bound: 2,
            den: 2,
        }
    }
}

/// A random tower `P · exp(s) · exp(r) · seed` with every stage kept.
#[derive(Clone, Debug)]
pub struct OrbitSample {
    pub seed: Tower,
    pub r: GPlusElement,
    pub s: GMinusElement,
    pub p: GLElement,
    /// `exp(r) · seed`; still satisfies `M_{a,b} = O(t^{a+b+1})`.
    pub after_r: Tower,
    /// `exp(s) · exp(r) · seed`.
    pub after_s: Tower,
    /// The final tower.
    pub tower: Tower,
}

pub fn random_gplus(rng: &mut SeededRng, m: usize, l_max: usize, bound: i64, den: i64) -> GPlusElement {
    let coeffs: Vec<_> = (1..=l_max).map(|l| (l, rng.const_matrix(m, bound, den))).collect();
    GPlusElement::new(m, coeffs).expect("valid indices")
}

pub fn random_gminus(rng: &mut SeededRng, m: usize, l_max: usize, bound: i64, den: i64) -> GMinusElement {
    let coeffs: Vec<_> = (1..=l_max).map(|l| (l, rng.const_matrix(m, bound, den))).collect();
    GMinusElement::new(m, coeffs).expect("valid indices")
}

pub fn random_gl(rng: &mut SeededRng, m: usize, bound: i64) -> GLElement {
    GLElement::new(rng.invertible_matrix(m, bound, 1)).expect("invertible")
}

/// Draws `r`, then `s`, then `P`, and applies them to the given seed.
pub fn random_orbit_from(rng: &mut SeededRng, seed: Tower, params: &OrbitParams) -> Result<OrbitSample> {
    let m = seed.dim();
    let r = random_gplus(rng, m, params.r_max, params.bound, params.den);
    let s = random_gminus(rng, m, params.s_max, params.bound, params.den);
    let p = random_gl(rng, m, params.bound);
    let after_r = exp_act_r(&seed, &r)?;
    let after_s = exp_act_s(&after_r, &s)?;
    let tower = conjugate(&after_s, &p)?;
    Ok(OrbitSample {
        seed,
        r,
        s,
        p,
        after_r,
        after_s,
        tower,
    })
}

/// Orbit sample over the seed with `M_{0,0} = diag(t^1, …, t^m)`.
pub fn random_orbit(rng: &mut SeededRng, params: &OrbitParams) -> Result<OrbitSample> {
    let seed = coordinate_seed(params.m, params.num_vars, params.trunc_degree, params.window)?;
    random_orbit_from(rng, seed, params)
}

/// Orbit sample over a seed with the given diagonal.
pub fn random_orbit_diag(rng: &mut SeededRng, diag: &[Series], params: &OrbitParams) -> Result<OrbitSample> {
    let seed = tower_diag_seed(diag, params.window)?;
    random_orbit_from(rng, seed, params)
}

/// A reproducible list of orbit samples, one per seed `base, base + 1, …`.
pub fn orbit_corpus(base: u64, count: usize, params: &OrbitParams) -> Result<Vec<OrbitSample>> {
    (0..count)
        .map(|k| random_orbit(&mut SeededRng::new(base + k as u64), params))
        .collect()
}
