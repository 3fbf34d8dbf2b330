//! Acceptance run: one PASS/FAIL line per criterion.

use std::time::Instant;

use commtower::actions::quantum::{bracket_minus, r_hat_failure, s_hat, s_hat_failure};
use commtower::actions::{
    act_r, act_r_with, act_s, act_s_on_j, act_s_with, bracket_failure, check_spectrum_invariance, conjugate,
    exp_act_r, exp_act_s, GMinusGroup, GPlusElement, RFormula, SFormula,
};
use commtower::corpus::{random_gl, random_gminus, random_gplus, random_orbit, OrbitParams, OrbitSample};
use commtower::kp::{check_lp, check_sign_theorem, AMatrixSeries};
use commtower::loopspace::check_lemma_b;
use commtower::normalize::{kill_constants, normalize};
use commtower::rng::SeededRng;
use commtower::series::{factorial, int, ConstMatrix, Rat, Series};
use commtower::tower::{coordinate_seed, full_potential, j_series, tower_diag_seed, verify_master, Tower};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn sign(k: usize) -> Rat {
    if k % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// Orbit towers at `m = N = 2, D = 4, B = 3` plus a few with `m = 1` and `m = 3`.
fn corpus() -> Vec<OrbitSample> {
    let mut out = Vec::new();
    let p2 = OrbitParams::new(2, 2, 4, 3);
    for k in 0..50 {
        out.push(random_orbit(&mut SeededRng::new(1000 + k), &p2).unwrap());
    }
    let p1 = OrbitParams::new(1, 1, 4, 3);
    for k in 0..3 {
        out.push(random_orbit(&mut SeededRng::new(2000 + k), &p1).unwrap());
    }
    let p3 = OrbitParams {
        r_max: 1,
        s_max: 1,
        ..OrbitParams::new(3, 3, 3, 2)
    };
    for k in 0..2 {
        out.push(random_orbit(&mut SeededRng::new(3000 + k), &p3).unwrap());
    }
    out
}

fn dim_one_closed_form() -> Outcome {
    let d = 7;
    let b = 5;
    let t = Series::var(1, d, 0).unwrap();
    let tower = tower_diag_seed(&[t.clone()], b).unwrap();
    let me = verify_master(&tower);
    let j = j_series(&tower);
    let mut bad = None;
    for k in 0..=b + 1 {
        let want = t.pow(k).scale(&factorial(k).recip());
        if *j.coeff(k).get(0, 0) != want {
            bad = Some(k);
        }
    }
    let names = ["eq1", "eq2", "eq3"];
    let all_three = names.iter().all(|n| me.checks.iter().any(|c| c.name.contains(n)));
    outcome(
        me.passed() && all_three && bad.is_none(),
        format!(
            "{} master checks pass, J = e^(t/z) for z^0..z^-{} (D={d}, B={b}){}",
            me.checks.len(),
            b + 1,
            bad.map(|k| format!(", mismatch at z^-{k}")).unwrap_or_default()
        ),
    )
}

fn combinatorial_identity() -> Outcome {
    let mut count = 0;
    let mut failures = 0;
    for a in 0..=4usize {
        for b in 0..=4usize {
            for l in 1..=5usize {
                let n = int((a + b + l + 1) as i64);
                let mut acc = (factorial(a + l) * factorial(b) * &n).recip()
                    - sign(l) * (factorial(a) * factorial(b + l) * &n).recip();
                for i in 0..l {
                    let j = l - 1 - i;
                    let den = factorial(a)
                        * factorial(b)
                        * factorial(i)
                        * factorial(j)
                        * int((a + i + 1) as i64)
                        * int((b + j + 1) as i64);
                    acc += sign(i + 1) * den.recip();
                }
                count += 1;
                if acc != int(0) {
                    failures += 1;
                }
            }
        }
    }
    let tower = tower_diag_seed(&[Series::var(1, 7, 0).unwrap()], 6).unwrap();
    let mut rng = SeededRng::new(7);
    let mut trivial = 0;
    for l in 1..=5 {
        let r = GPlusElement::single(l, rng.invertible_matrix(1, 5, 3)).unwrap();
        if act_r(&tower, &r).unwrap().is_zero() {
            trivial += 1;
        }
        let mixed = random_gplus(&mut rng, 1, l, 4, 3);
        if act_r(&tower, &mixed).unwrap().is_zero() {
            trivial += 1;
        }
    }
    outcome(
        failures == 0 && trivial == 10,
        format!("{count} instances sum to 0 ({failures} nonzero); act_r zero on dim-1 tower for {trivial}/10 r"),
    )
}

fn me_preservation(corpus: &[OrbitSample]) -> Outcome {
    let mut rng = SeededRng::new(11);
    let mut failures = Vec::new();
    let r_flips = [
        RFormula { raise_a: int(-1), ..RFormula::default() },
        RFormula { raise_b: int(-1), ..RFormula::default() },
        RFormula { quadratic: int(-1), ..RFormula::default() },
        RFormula { raise_a: int(2), ..RFormula::default() },
    ];
    let s_flips = [
        SFormula { lower_a: int(-1), ..SFormula::default() },
        SFormula { lower_b: int(-1), ..SFormula::default() },
        SFormula { delta: int(-1), ..SFormula::default() },
        SFormula { delta: int(0), ..SFormula::default() },
    ];
    let mut r_caught = [0usize; 4];
    let mut s_caught = [0usize; 4];
    let mut n = 0;
    for (k, sample) in corpus.iter().enumerate() {
        let t = &sample.tower;
        let m = t.dim();
        let r = random_gplus(&mut rng, m, 2, 2, 2);
        let s = random_gminus(&mut rng, m, 2, 2, 2);
        let p = random_gl(&mut rng, m, 2);
        let outputs: Vec<(&str, commtower::report::Report)> = vec![
            ("input", verify_master(t)),
            ("act_r", verify_master(&t.with_tangent(&act_r(t, &r).unwrap()))),
            ("act_s", verify_master(&t.with_tangent(&act_s(t, &s).unwrap()))),
            ("exp_act_r", verify_master(&exp_act_r(&sample.after_r, &r).unwrap())),
            ("exp_act_s", verify_master(&exp_act_s(t, &s).unwrap())),
            ("conjugate", verify_master(&conjugate(t, &p).unwrap())),
        ];
        for (name, rep) in outputs {
            if !rep.passed() {
                failures.push(format!("tower {k} {name}"));
            }
        }
        if m > 1 {
            n += 1;
            for (i, f) in r_flips.iter().enumerate() {
                if !verify_master(&t.with_tangent(&act_r_with(t, &r, f).unwrap())).passed() {
                    r_caught[i] += 1;
                }
            }
            for (i, f) in s_flips.iter().enumerate() {
                if !verify_master(&t.with_tangent(&act_s_with(t, &s, f).unwrap())).passed() {
                    s_caught[i] += 1;
                }
            }
        }
    }
    let caught = r_caught.iter().chain(&s_caught).all(|&c| c >= 1);
    outcome(
        failures.is_empty() && corpus.len() >= 50 && caught,
        format!(
            "{} towers x 6 outputs{}; mutations caught on r {:?}, s {:?} of {n}",
            corpus.len(),
            if failures.is_empty() { String::new() } else { format!(", failing: {}", failures.join("; ")) },
            r_caught,
            s_caught
        ),
    )
}

fn lie_structure() -> Outcome {
    let mut rng = SeededRng::new(12);
    let params = OrbitParams::new(2, 2, 4, 4);
    let mut pairs = 0;
    let mut failures = Vec::new();
    for k in 0..3 {
        let t = random_orbit(&mut rng, &params).unwrap().tower;
        for l in 1..=3 {
            for m in 1..=4 - l {
                let x = GPlusElement::single(l, rng.const_matrix(2, 2, 2)).unwrap();
                let y = GPlusElement::single(m, rng.const_matrix(2, 2, 2)).unwrap();
                pairs += 1;
                if let Some(f) = bracket_failure(&t, &x, &y).unwrap() {
                    failures.push(format!("tower {k} (l,m)=({l},{m}): {f}"));
                }
            }
        }
    }
    let cap = 4;
    let mut ops = 0;
    for _ in 0..6 {
        let x = random_gminus(&mut rng, 2, 2, 2, 2);
        let y = random_gminus(&mut rng, 2, 2, 2, 2);
        let lhs = s_hat(&x, cap).commutator(&s_hat(&y, cap));
        let rhs = s_hat(&bracket_minus(&x, &y).unwrap(), cap);
        let f = full_potential(&random_orbit(&mut rng, &OrbitParams::new(2, 2, 3, cap)).unwrap().tower);
        ops += 1;
        if lhs != rhs {
            failures.push("operator commutator".into());
        } else if lhs.conjugate_exp(&f).unwrap() != rhs.conjugate_exp(&f).unwrap() {
            failures.push("commutator on F".into());
        }
    }
    outcome(
        failures.is_empty(),
        format!("{pairs} bracket pairs with l+m<=4, {ops} s-hat commutators{}", failures.first().map(|f| format!(", first failure {f}")).unwrap_or_default()),
    )
}

fn constants(corpus: &[OrbitSample]) -> Outcome {
    let mut rng = SeededRng::new(13);
    let mut j_fail = 0;
    let mut j_count = 0;
    for sample in corpus.iter().take(20) {
        let t = &sample.tower;
        let s = random_gminus(&mut rng, t.dim(), 2, 2, 2);
        let depth = t.window() + 1;
        let got = act_s_on_j(&j_series(t), &GMinusGroup::exp(&s, depth)).unwrap();
        j_count += 1;
        if got != j_series(&exp_act_s(t, &s).unwrap()) {
            j_fail += 1;
        }
    }
    let mut k_fail = Vec::new();
    for (k, sample) in corpus.iter().enumerate() {
        let (_, out) = kill_constants(&sample.tower).unwrap();
        if !out.constants_vanish() || !verify_master(&out).passed() {
            k_fail.push(k);
        }
    }
    outcome(
        j_fail == 0 && k_fail.is_empty(),
        format!(
            "J transformation agrees on {}/{j_count}; constants killed on {}/{} corpus towers",
            j_count - j_fail,
            corpus.len() - k_fail.len(),
            corpus.len()
        ),
    )
}

fn normalization_round_trip() -> Outcome {
    let params = OrbitParams::new(2, 2, 5, 4);
    let seed = coordinate_seed(2, 2, 5, 4).unwrap();
    let count = 4;
    let mut failures = Vec::new();
    let mut steps = 0;
    for k in 0..count {
        let sample = random_orbit(&mut SeededRng::new(4000 + k), &params).unwrap();
        let out = normalize(&sample.tower).unwrap();
        steps += out.log.len();
        if let Some(bad) = out.log.iter().find(|s| !s.report.passed()) {
            failures.push(format!("sample {k} step {}", bad.name));
        }
        if out.normalized != seed {
            failures.push(format!("sample {k} differs from the seed"));
        }
        if out.replay(&sample.tower).unwrap() != out.normalized {
            failures.push(format!("sample {k} replay"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{count} towers (m=N=2, D=5, B=4) recovered exactly, {steps} logged steps pass{}", failures.first().map(|f| format!(", {f}")).unwrap_or_default()),
    )
}

fn bump_entry(t: &Tower, a: usize, b: usize, i: usize, j: usize, c: &Series) -> Tower {
    let mut p = t.clone();
    let mut m = p.get(a, b).clone();
    m.set(i, j, m.get(i, j) + c);
    p.set(a, b, m);
    p
}

fn loop_space(corpus: &[OrbitSample]) -> Outcome {
    let mut bad_towers = Vec::new();
    for (k, sample) in corpus.iter().enumerate() {
        if !check_lemma_b(&sample.tower).passed() {
            bad_towers.push(k);
        }
    }
    let mut violating = 0;
    let mut missed = Vec::new();
    for sample in corpus.iter().step_by(10) {
        let t = &sample.tower;
        let n = t.num_vars();
        let d = t.trunc_degree();
        let mut bumps = vec![Series::one(n, d), Series::var(n, d, 0).unwrap()];
        if n > 1 {
            bumps.push(Series::var(n, d, 1).unwrap().pow(2));
        }
        for (a, b, m) in t.cells() {
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    for c in &bumps {
                        let p = bump_entry(t, a, b, i, j, c);
                        if verify_master(&p).passed() {
                            continue;
                        }
                        violating += 1;
                        if check_lemma_b(&p).passed() {
                            missed.push(format!("({a},{b}) entry ({},{})", i + 1, j + 1));
                        }
                    }
                }
            }
        }
    }
    outcome(
        bad_towers.is_empty() && missed.is_empty() && violating > 0,
        format!(
            "loop-space check holds on {}/{} corpus towers; detects {}/{violating} single-entry violations",
            corpus.len() - bad_towers.len(),
            corpus.len(),
            violating - missed.len()
        ),
    )
}

fn quantization(corpus: &[OrbitSample]) -> Outcome {
    let mut rng = SeededRng::new(14);
    let mut failures = Vec::new();
    let mut count = 0;
    for (k, sample) in corpus.iter().enumerate().step_by(3) {
        let t = &sample.tower;
        let r = random_gplus(&mut rng, t.dim(), 2, 2, 2);
        let s = random_gminus(&mut rng, t.dim(), 2, 2, 2);
        count += 1;
        if let Some(f) = r_hat_failure(t, &r).unwrap() {
            failures.push(format!("tower {k} r: {f}"));
        }
        if let Some(f) = s_hat_failure(t, &s).unwrap() {
            failures.push(format!("tower {k} s: {f}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("r-hat and s-hat reproduce the actions on {count} corpus towers{}", failures.first().map(|f| format!(", {f}")).unwrap_or_default()),
    )
}

fn random_a(rng: &mut SeededRng) -> AMatrixSeries {
    let mut coeffs = vec![rng.invertible_matrix(2, 2, 1)];
    for _ in 0..3 {
        coeffs.push(rng.const_matrix(2, 2, 2));
    }
    AMatrixSeries::new(coeffs).unwrap()
}

fn wave_function_towers() -> Outcome {
    let mut rng = SeededRng::new(15);
    let count = 20;
    let mut failures = Vec::new();
    for k in 0..count {
        let a = random_a(&mut rng);
        let rep = check_lp(&a, 4, 3).unwrap();
        if let Some(c) = rep.first_failure() {
            failures.push(format!("A {k}: {}", c.name));
        }
        for l in 1..=3 {
            let r: ConstMatrix = rng.const_matrix(2, 3, 2);
            let rep = check_sign_theorem(&a, l, &r, 4, 3).unwrap();
            if let Some(c) = rep.first_failure() {
                failures.push(format!("A {k} l={l}: {}", c.name));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{count} random A(z) (m=2, Z=3, D=4, B=3): towers, dM00 and sign theorem for l=1,2,3{}", failures.first().map(|f| format!(", {f}")).unwrap_or_default()),
    )
}

fn spectrum(corpus: &[OrbitSample]) -> Outcome {
    let mut rng = SeededRng::new(16);
    let mut failures = Vec::new();
    for (k, sample) in corpus.iter().enumerate() {
        let r = random_gplus(&mut rng, sample.tower.dim(), 2, 2, 2);
        let rep = check_spectrum_invariance(&sample.tower, &r).unwrap();
        if let Some(c) = rep.first_failure() {
            failures.push(format!("tower {k}: {}", c.name));
        }
    }
    outcome(
        failures.is_empty(),
        format!("spectrum checks pass on {}/{} corpus towers", corpus.len() - failures.len(), corpus.len()),
    )
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("dim-1 closed form", Box::new(dim_one_closed_form)),
        ("combinatorial identity", Box::new(combinatorial_identity)),
        ("master equations preserved", Box::new(|| me_preservation(&corpus))),
        ("Lie structure", Box::new(lie_structure)),
        ("J transformation and constants", Box::new(|| constants(&corpus))),
        ("normalization round trip", Box::new(normalization_round_trip)),
        ("loop-space equivalence", Box::new(|| loop_space(&corpus))),
        ("quantization consistency", Box::new(|| quantization(&corpus))),
        ("wave-function towers", Box::new(wave_function_towers)),
        ("spectrum invariance", Box::new(|| spectrum(&corpus))),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        all &= o.passed;
        println!(
            "criterion {:>2} [PRIMARY] {name}: {} ({}; {:.1}s)",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
