//! The thirteen acceptance criteria at full size. Prints one PASS/FAIL line
//! per criterion and fails if any criterion fails.

use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use regopen::counterexamples::{atom_branch_witness, cantor_trace, dense_open_below_one, dyadic_sequence, smith_volterra_ratios};
use regopen::credence::Credence;
use regopen::elementary::{Ambient, ElementarySet};
use regopen::finite_oracle::{enumerate_topologies, enumerate_topologies_by_families};
use regopen::liminal::{Atom, BorelPart};
use regopen::piecewise::PiecewiseAffine;
use regopen::scalar::Extended;
use regopen::selftest::{self, Outcome, Sizes};
use regopen::{Rational as Q, Rational128 as F};

const SEED: u64 = 20_240_501;

struct Verdict {
    number: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn from_outcome(o: &Outcome) -> (bool, String) {
    let mut detail = format!("{} cases, {} failures", o.cases, o.failures);
    if let Some(w) = &o.witness {
        detail += &format!(", witness {w}");
    }
    (o.passed(), detail)
}

fn both(a: (bool, String), b: (bool, String)) -> (bool, String) {
    (a.0 && b.0, format!("{}; {}", a.1, b.1))
}

/// Number of labeled topologies on n points (OEIS A000798).
const TOPOLOGY_COUNTS: [usize; 4] = [1, 4, 29, 355];

fn c1() -> (bool, String) {
    let start = Instant::now();
    let o = selftest::algebra_laws::<Q>(Sizes::FULL.algebra_cases, 1_000_000, SEED);
    let took = start.elapsed();
    let (ok, detail) = from_outcome(&o);
    let fast = took < Duration::from_secs(5);
    (ok && fast && o.cases >= 10_000, format!("{detail}, {took:.2?} (budget 5s)"))
}

fn c2() -> (bool, String) {
    let line = Ambient::<Q>::full_line();
    let a = ElementarySet::from_pairs(&[(q(0, 1), q(1, 1))], &line).unwrap();
    let b = ElementarySet::from_pairs(&[(q(1, 1), q(2, 1))], &line).unwrap();
    let join = a.join(&b).unwrap();
    let iv = &join.intervals();
    let direct = iv.len() == 1 && iv[0].lo == Extended::Finite(q(0, 1)) && iv[0].hi == Extended::Finite(q(2, 1));
    both((direct, format!("join = {join}")), from_outcome(&selftest::join_example()))
}

fn c3() -> (bool, String) {
    from_outcome(&selftest::credence_additivity::<F>(Sizes::FULL.random_cases, SEED + 1))
}

fn c4() -> (bool, String) {
    from_outcome(&selftest::integrator_tolerance::<F>(Sizes::FULL.random_cases, SEED + 2))
}

fn c5() -> (bool, String) {
    from_outcome(&selftest::partition_and_bayes::<F>(Sizes::FULL.random_cases, SEED + 3))
}

fn c6() -> (bool, String) {
    from_outcome(&selftest::change_of_variables::<F>(Sizes::FULL.random_cases, SEED + 4))
}

/// On (-1/2, 1/2) normalized length of (0, ε) is ε itself, so the mixture
/// value is (ε + φ₊)/2 with no scaling.
fn c7() -> (bool, String) {
    let half = Ambient::open(Extended::Finite(q(-1, 2)), Extended::Finite(q(1, 2))).unwrap();
    let mut ok = true;
    let mut checked = 0;
    for phi_plus in [q(0, 1), q(1, 3), q(1, 2), q(1, 1)] {
        let nu = selftest::two_sided_mixture(&half, &phi_plus).unwrap();
        for eps in [q(1, 1000), q(1, 10), q(1, 4), q(1, 3), q(49, 100)] {
            let r = ElementarySet::from_pairs(&[(q(0, 1), eps.clone())], &half).unwrap();
            ok &= nu.eval(&r).unwrap() == (eps + phi_plus.clone()) / q(2, 1);
            checked += 1;
        }
    }
    let delta = Credence::point_mass(&Ambient::<Q>::full_line(), q(0, 1), regopen::credence::Side::Right).unwrap();
    for k in 1..=20 {
        let eps = q(1, k);
        let line = Ambient::full_line();
        let right = ElementarySet::from_pairs(&[(q(0, 1), eps.clone())], &line).unwrap();
        let left = ElementarySet::from_pairs(&[(-eps, q(0, 1))], &line).unwrap();
        ok &= delta.eval(&right).unwrap() == q(1, 1) && delta.eval(&left).unwrap().is_zero();
        checked += 1;
    }
    both((ok, format!("{checked} direct values")), from_outcome(&selftest::point_mass_values::<Q>(SEED + 5)))
}

fn c8() -> (bool, String) {
    from_outcome(&selftest::free_end::<F>(200, SEED + 6))
}

fn c9() -> (bool, String) {
    from_outcome(&selftest::liminal_identities::<F>(Sizes::FULL.liminal_max_den, Sizes::FULL.random_cases, SEED + 7))
}

fn c10() -> (bool, String) {
    from_outcome(&selftest::stone_identity::<F>(Sizes::FULL.stone_algebras, SEED + 8))
}

fn c11() -> (bool, String) {
    let start = Instant::now();
    let o = selftest::finite_oracle(4);
    let took = start.elapsed();
    let mut counts_ok = true;
    for (n, want) in (1..=4).zip(TOPOLOGY_COUNTS) {
        counts_ok &= enumerate_topologies(n).unwrap().len() == want;
        counts_ok &= enumerate_topologies_by_families(n).unwrap().len() == want;
    }
    let (ok, detail) = from_outcome(&o);
    let fast = took < Duration::from_secs(120);
    (ok && counts_ok && fast, format!("{detail}, counts 1/4/29/355 {counts_ok}, {took:.2?}"))
}

/// λ(L_n)+λ(R_n) = ½(1−2^{-n}) = (2^n − 1)/2^{n+1}, and the gap is below 2^{-n}.
fn c12() -> (bool, String) {
    let depth = 30;
    let trace = cantor_trace::<Q>(depth, &smith_volterra_ratios(depth)).unwrap();
    let mut ok = true;
    for (n, s) in trace.iter().enumerate().skip(1) {
        let pow = BigInt::one() << n;
        let expected = Q::new(pow.clone() - BigInt::one(), pow.clone() * 2);
        ok &= s.measure == expected;
        ok &= s.coverage_radius.clone() * Q::from_integer(pow) < Q::one();
        ok &= s.measure < Q::one();
    }
    let last = &trace[depth];
    let own = (ok, format!("depth {depth}: measure {}, gap {}", last.measure, last.coverage_radius));
    both(own, from_outcome(&selftest::fat_cantor_nonexample::<Q>(depth)))
}

fn c13() -> (bool, String) {
    let depth = 10;
    let cdf = PiecewiseAffine::new(vec![q(0, 1), q(1, 1)], vec![q(0, 1), q(1, 1)]).unwrap();
    let st = dense_open_below_one(&cdf, &dyadic_sequence(4096), depth).unwrap();
    let one_minus = Q::one() - Q::new(BigInt::one(), BigInt::one() << depth);
    let mut ok = st.mass < Q::one() && st.mass < one_minus.clone() + st.bound.clone() && st.mass <= st.bound;
    ok &= st.set.intervals().len() == depth;
    let nu = BorelPart { lebesgue_weight: q(1, 2), atoms: vec![Atom { x: q(1, 3), mass: q(1, 2) }] };
    let w = atom_branch_witness(&nu).unwrap();
    ok &= w.join.is_full() && w.left_mass.clone() + w.right_mass.clone() < Q::one();
    // an atom of mass 1/2 inside (0,1) is lost from both halves
    ok &= w.sum() == q(1, 2);
    let own = (ok, format!("ν(U_{depth}) = {}, bound {}, atom branch sum {}", st.mass, st.bound, w.sum()));
    both(own, from_outcome(&selftest::dense_open_construction::<Q>(depth)))
}

#[test]
fn acceptance_criteria() {
    type Check = fn() -> (bool, String);
    let titles: [(&str, Check); 13] = [
        ("algebra laws", c1),
        ("worked join value", c2),
        ("credence additivity", c3),
        ("integrator tolerance", c4),
        ("partition decomposition and Bayes", c5),
        ("change of variables", c6),
        ("point-mass values", c7),
        ("free-end credence", c8),
        ("liminal identities", c9),
        ("Stone identity", c10),
        ("finite oracle", c11),
        ("fat Cantor nonexample", c12),
        ("dense open construction", c13),
    ];
    // the timed criterion runs alone so the others do not compete for cores
    let (p1, d1) = c1();
    let mut verdicts = vec![Verdict { number: 1, title: titles[0].0, passed: p1, detail: d1 }];
    let rest: Vec<Verdict> = thread::scope(|s| {
        let handles: Vec<_> = titles[1..]
            .iter()
            .enumerate()
            .map(|(i, &(title, f))| (i + 2, title, s.spawn(f)))
            .collect();
        handles
            .into_iter()
            .map(|(number, title, h)| {
                let (passed, detail) = h.join().unwrap_or_else(|_| (false, "panicked".into()));
                Verdict { number, title, passed, detail }
            })
            .collect()
    });
    verdicts.extend(rest);
    for v in &verdicts {
        println!("{} criterion {:>2} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.number, v.title, v.detail);
    }
    let failed: Vec<usize> = verdicts.iter().filter(|v| !v.passed).map(|v| v.number).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
