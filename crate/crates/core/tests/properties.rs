use proptest::prelude::*;

use commtower::actions::{act_r, act_s, check_spectrum_invariance, conjugate, exp_act_r, exp_act_s};
use commtower::corpus::{random_gl, random_gminus, random_gplus, random_orbit, OrbitParams, OrbitSample};
use commtower::json::{parse_tower, to_string, tower_to_json};
use commtower::kp::{check_lp, check_sign_theorem, derivative_identity_failure, lp_tower_of, wave_from_a, AMatrixSeries};
use commtower::loopspace::check_lemma_b;
use commtower::normalize::{kill_constants, normalize};
use commtower::rng::SeededRng;
use commtower::series::{rat, ConstMatrix, CoordinateMap, DualSeries, Series, Shape, ZSeries};
use commtower::tower::{
    coordinate_seed, reconstruct_from_first_row, tower_diag_seed, verify_commutativity, verify_master, Tower,
};

fn series(n: usize, d: usize) -> impl Strategy<Value = Series> {
    let len = Shape::get(n, d).len();
    prop::collection::vec((-4i64..=4, 1i64..=3), len).prop_map(move |cs| {
        let shape = Shape::get(n, d);
        let terms: Vec<(&[u32], _)> = shape
            .monomials()
            .iter()
            .zip(&cs)
            .map(|(m, &(a, b))| (m.exponents(), rat(a, b)))
            .collect();
        Series::from_terms(n, d, terms).unwrap()
    })
}

fn orbit(seed: u64, params: &OrbitParams) -> OrbitSample {
    random_orbit(&mut SeededRng::new(seed), params).unwrap()
}

fn params2() -> OrbitParams {
    OrbitParams::new(2, 2, 4, 3)
}

fn random_a(seed: u64) -> AMatrixSeries {
    let mut rng = SeededRng::new(seed);
    let mut coeffs = vec![rng.invertible_matrix(2, 2, 1)];
    for _ in 0..3 {
        coeffs.push(rng.const_matrix(2, 2, 2));
    }
    AMatrixSeries::new(coeffs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in series(2, 4), b in series(2, 4), c in series(2, 4), k in -5i64..=5) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a * &b).scale(&rat(k, 1)), &a.scale(&rat(k, 1)) * &b);
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn truncation_is_a_homomorphism(a in series(2, 5), b in series(2, 5), d in 0usize..=5) {
        prop_assert_eq!(&a.truncate(d) * &b.truncate(d), (&a * &b).truncate(d));
        prop_assert_eq!(&a.truncate(d) + &b.truncate(d), (&a + &b).truncate(d));
    }

    #[test]
    fn partials_commute(a in series(3, 4), i in 0usize..3, j in 0usize..3) {
        let ij = a.partial(i).unwrap().partial(j).unwrap();
        let ji = a.partial(j).unwrap().partial(i).unwrap();
        prop_assert_eq!(ij, ji);
    }

    #[test]
    fn leibniz(a in series(2, 4), b in series(2, 4), k in 0usize..2) {
        let lhs = (&a * &b).partial(k).unwrap();
        let rhs = &(&a.partial(k).unwrap() * &b.truncate(3)) + &(&a.truncate(3) * &b.partial(k).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dual_numbers_differentiate(a in series(2, 4), b in series(2, 4), c in -3i64..=3) {
        // f(x) = x^3 + c x^2 has f'(x) = 3x^2 + 2c x
        let x = DualSeries::new(a.clone(), b.clone()).unwrap();
        let x2 = x.checked_mul(&x).unwrap();
        let f = commtower::series::Ring::add(&x2.checked_mul(&x).unwrap(), &commtower::series::Ring::scale(&x2, &rat(c, 1)));
        let deriv = &(&a * &a).scale(&rat(3, 1)) + &a.scale(&rat(2 * c, 1));
        prop_assert_eq!(f.extract_epsilon(), &(&deriv * &b));
    }

    #[test]
    fn coordinate_inverse_round_trip(
        lin in (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3),
        h1 in series(2, 4),
        h2 in series(2, 4),
    ) {
        let (p, q, r, s) = lin;
        prop_assume!(p * s - q * r != 0);
        let t1 = Series::var(2, 4, 0).unwrap();
        let t2 = Series::var(2, 4, 1).unwrap();
        let f1 = &(&t1.scale(&rat(p, 1)) + &t2.scale(&rat(q, 1))) + &h1.tail_from(2);
        let f2 = &(&t1.scale(&rat(r, 1)) + &t2.scale(&rat(s, 1))) + &h2.tail_from(2);
        let f = CoordinateMap::new(vec![f1, f2]).unwrap();
        let g = f.invert().unwrap();
        let id = CoordinateMap::identity(2, 4);
        prop_assert_eq!(f.compose(&g).unwrap(), id.clone());
        prop_assert_eq!(g.compose(&f).unwrap(), id);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tower_invariants(seed in any::<u64>()) {
        let sample = orbit(seed, &params2());
        let t = &sample.tower;
        prop_assert!(verify_master(t).passed());
        prop_assert!(verify_commutativity(t.get(0, 0)));
        prop_assert_eq!(&reconstruct_from_first_row(&t.first_row()), t);
        let (_, k) = kill_constants(t).unwrap();
        for (a, b, m) in k.cells() {
            prop_assert!(m.has_order_at_least(a + b + 1), "cell ({}, {})", a, b);
        }
    }

    #[test]
    fn diag_seeds_commute(d1 in series(2, 4), d2 in series(2, 4)) {
        let t = tower_diag_seed(&[d1.tail_from(1), d2.tail_from(1)], 3).unwrap();
        prop_assert!(t.pairwise_commuting());
        prop_assert!(verify_master(&t).passed());
    }

    #[test]
    fn actions_preserve_master_equations(seed in any::<u64>()) {
        let sample = orbit(seed, &params2());
        let t = &sample.tower;
        let mut rng = SeededRng::new(seed ^ 0x5555);
        let r = random_gplus(&mut rng, 2, 2, 2, 2);
        let s = random_gminus(&mut rng, 2, 2, 2, 2);
        let p = random_gl(&mut rng, 2, 2);
        prop_assert!(verify_master(&t.with_tangent(&act_r(t, &r).unwrap())).passed());
        prop_assert!(verify_master(&t.with_tangent(&act_s(t, &s).unwrap())).passed());
        prop_assert!(verify_master(&exp_act_r(&sample.after_r, &r).unwrap()).passed());
        let moved = exp_act_s(t, &s).unwrap();
        prop_assert!(verify_master(&moved).passed());
        for k in 0..2 {
            prop_assert_eq!(moved.get(0, 0).partial(k), t.get(0, 0).partial(k));
        }
        prop_assert!(verify_master(&conjugate(t, &p).unwrap()).passed());
        prop_assert!(check_spectrum_invariance(t, &r).unwrap().passed());
    }

    #[test]
    fn lemma_matches_master_equations(seed in any::<u64>(), cell in 0usize..10, i in 0usize..2, j in 0usize..2, c in -2i64..=2) {
        let t = orbit(seed, &OrbitParams::new(2, 2, 3, 3)).tower;
        let (a, b, m) = t.cells().nth(cell).map(|(a, b, m)| (a, b, m.clone())).unwrap();
        let mut p: Tower = t.clone();
        let mut mm = m;
        mm.set(i, j, mm.get(i, j) + &Series::monomial(2, 3, &[1, 0], rat(c, 1)));
        p.set(a, b, mm);
        prop_assert_eq!(verify_master(&p).passed(), check_lemma_b(&p).passed());
    }

    #[test]
    fn tower_json_round_trip(seed in any::<u64>()) {
        let t = orbit(seed, &params2()).tower;
        prop_assert_eq!(parse_tower(&to_string(&tower_to_json(&t))).unwrap(), t);
    }

    #[test]
    fn wave_functions(seed in any::<u64>()) {
        let a = random_a(seed);
        let (plus, minus) = wave_from_a(&a, 3, 4).unwrap();
        let prod = minus.coeffs.negate_variable().mul(&plus.coeffs);
        let tmpl = Series::zero(2, 3);
        prop_assert_eq!(prod, ZSeries::identity(2, 4, &tmpl));
        prop_assert_eq!(derivative_identity_failure(&plus, &minus), None);
        prop_assert!(check_lp(&a, 4, 3).unwrap().passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn normalization_replays(seed in any::<u64>()) {
        let sample = orbit(seed, &OrbitParams::new(2, 2, 5, 4));
        let out = normalize(&sample.tower).unwrap();
        prop_assert!(out.passed());
        prop_assert_eq!(&out.normalized, &coordinate_seed(2, 2, 5, 4).unwrap());
        prop_assert_eq!(out.replay(&sample.tower).unwrap(), out.normalized);
    }

    #[test]
    fn sign_theorem(seed in any::<u64>(), l in 1usize..=3) {
        let a = random_a(seed);
        let r: ConstMatrix = SeededRng::new(seed.wrapping_add(1)).const_matrix(2, 3, 2);
        prop_assert!(check_sign_theorem(&a, l, &r, 4, 3).unwrap().passed());
    }

    #[test]
    fn identity_a_is_the_seed(n in 1usize..=3) {
        prop_assert_eq!(lp_tower_of(&AMatrixSeries::identity(n), 3, 2).unwrap(), coordinate_seed(n, n, 3, 2).unwrap());
    }
}
