//! Seeded invariant checks over random and exhaustive inputs.
//!
//! Each check compares two independently computed routes exactly and counts
//! mismatches; the first mismatch is kept as a JSON witness.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::counterexamples::{
    atom_branch_witness, cantor_trace, coverage_radius, dense_open_below_one, dyadic_sequence, fat_cantor,
    left_right_halves, smith_volterra_ratios, MATERIALIZE_CAP,
};
use crate::credence::{Credence, End, Side};
use crate::elementary::{Ambient, ElementarySet};
use crate::error::Result;
use crate::finite_oracle::{enumerate_topologies, enumerate_topologies_by_families, run_oracle, Check};
use crate::integrator::{
    bayes_expectation, conditional_expectation_exact, integrate, integrate_exact, integrate_over_partition,
    simple_integral, strict_monotonicity_witness, BPartition,
};
use crate::json::{credence_to_json, function_to_json, map_to_json, set_to_json};
use crate::liminal::{decompose, verify_integral_identity, verify_mass_identity, Atom, BorelPart};
use crate::maps::change_of_variables_check;
use crate::piecewise::PiecewiseAffine;
use crate::sample;
use crate::scalar::{Extended, Scalar};
use crate::stone::{
    atom_function, dyadic_algebra, refining_limit, star_function, star_measure, star_sum, AtomMask, FiniteAlgebra,
    StoneSpace,
};

/// Tolerances used by the approximate integrator checks.
pub const EPS_LIST: [(i64, i64); 3] = [(1, 10), (1, 100), (1, 1000)];

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub witness: Option<Value>,
    /// Free-form facts worth printing, such as counts or final values.
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(name: &'static str) -> Self {
        Outcome { name, cases: 0, failures: 0, witness: None, notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    fn error(&mut self, e: crate::Error, context: impl FnOnce() -> Value) {
        self.record(false, || json!({"error": e.to_string(), "input": context()}));
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "cases": self.cases,
            "failures": self.failures,
            "passed": self.passed(),
            "witness": self.witness.clone().unwrap_or(Value::Null),
            "notes": self.notes,
        })
    }
}

/// Case counts for the randomized checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sizes {
    pub algebra_cases: usize,
    pub random_cases: usize,
    pub stone_algebras: usize,
    pub liminal_max_den: i64,
    pub oracle_points: usize,
    pub cantor_depth: usize,
}

impl Sizes {
    pub const FULL: Sizes = Sizes {
        algebra_cases: 10_000,
        random_cases: 1_000,
        stone_algebras: 3,
        liminal_max_den: 32,
        oracle_points: 4,
        cantor_depth: 30,
    };

    pub const QUICK: Sizes = Sizes {
        algebra_cases: 500,
        random_cases: 100,
        stone_algebras: 1,
        liminal_max_den: 8,
        oracle_points: 3,
        cantor_depth: 12,
    };
}

fn q<S: Scalar>(n: i64, d: i64) -> S {
    S::ratio(n, d)
}

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn ambients<S: Scalar>() -> [Ambient<S>; 4] {
    [
        Ambient::open_unit(),
        Ambient::closed_unit(),
        Ambient::full_line(),
        Ambient::open(Extended::Finite(q(-1, 1)), Extended::PosInf).expect("valid"),
    ]
}

fn widen<S: Scalar>(e: &ElementarySet<S>, rng: &mut StdRng) -> ElementarySet<S> {
    let raw = e.intervals().iter().map(|iv| {
        let d: S = q(rng.gen_range(0..=3), rng.gen_range(1..=16));
        let lo = match &iv.lo {
            Extended::Finite(x) => Extended::Finite(x.clone() - d.clone()),
            other => other.clone(),
        };
        let hi = match &iv.hi {
            Extended::Finite(x) => Extended::Finite(x.clone() + d),
            other => other.clone(),
        };
        (lo, hi)
    });
    ElementarySet::regularize_clipped(raw, e.ambient())
}

/// Double negation, De Morgan, absorption and join minimality.
pub fn algebra_laws<S: Scalar>(cases: usize, max_den: i64, seed: u64) -> Outcome {
    let mut out = Outcome::new("algebra laws");
    let mut rng = rng(seed);
    let ambs = ambients::<S>();
    for i in 0..cases {
        let amb = &ambs[i % ambs.len()];
        let draw = |rng: &mut StdRng| sample::elementary(rng, amb, 4, max_den).expect("sampled set");
        let (e, f) = (draw(&mut rng), draw(&mut rng));
        let w = || json!({"e": set_to_json(&e), "f": set_to_json(&f)});
        let ok = (|| -> Result<bool> {
            let join = e.join(&f)?;
            let meet = e.meet(&f)?;
            let g = widen(&e, &mut rng).join(&widen(&f, &mut rng))?;
            Ok(e.neg().neg() == e
                && join.neg() == e.neg().meet(&f.neg())?
                && meet.neg() == e.neg().join(&f.neg())?
                && e.join(&meet)? == e
                && e.meet(&join)? == e
                && e.is_subset(&join)?
                && f.is_subset(&join)?
                && e.is_subset(&g)?
                && f.is_subset(&g)?
                && join.is_subset(&g)?)
        })();
        match ok {
            Ok(b) => out.record(b, w),
            Err(err) => out.error(err, w),
        }
    }
    out
}

/// `(0,1) ∨ (1,2) = (0,2)` on the line.
pub fn join_example() -> Outcome {
    type S = crate::Rational;
    let mut out = Outcome::new("join example");
    let amb = Ambient::<S>::full_line();
    let a = ElementarySet::from_pairs(&[(q(0, 1), q(1, 1))], &amb).expect("valid");
    let b = ElementarySet::from_pairs(&[(q(1, 1), q(2, 1))], &amb).expect("valid");
    let want = ElementarySet::from_pairs(&[(q(0, 1), q(2, 1))], &amb).expect("valid");
    let got = a.join(&b).expect("same ambient");
    out.notes.push(format!("(0,1) ∨ (1,2) = {got}"));
    out.record(got == want, || set_to_json(&got));
    out
}

fn random_algebra<S: Scalar>(rng: &mut StdRng, amb: &Ambient<S>, max_atoms: usize) -> FiniteAlgebra<S> {
    loop {
        let k = rng.gen_range(1..=3);
        let gens: Vec<_> = (0..k).map(|_| sample::elementary(rng, amb, 2, 8).expect("sampled set")).collect();
        if let Ok(alg) = FiniteAlgebra::generate(&gens, amb) {
            if alg.atom_count() <= max_atoms {
                return alg;
            }
        }
    }
}

fn random_weights<S: Scalar>(rng: &mut StdRng, n: usize) -> Vec<S> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    let total: i64 = raw.iter().sum();
    if total == 0 {
        return (0..n).map(|_| q(1, n as i64)).collect();
    }
    raw.into_iter().map(|w| q(w, total)).collect()
}

/// A partition of a union of atoms, cells being random groups of atoms.
fn atom_partition<S: Scalar>(rng: &mut StdRng, alg: &FiniteAlgebra<S>) -> Result<BPartition<S>> {
    let atoms = alg.atoms();
    let mut chosen: Vec<usize> = (0..atoms.len()).filter(|_| rng.gen_bool(0.7)).collect();
    if chosen.is_empty() {
        chosen.push(0);
    }
    let cells_wanted = rng.gen_range(1..=chosen.len());
    let mut groups: Vec<Vec<&ElementarySet<S>>> = vec![Vec::new(); cells_wanted];
    for &i in &chosen {
        groups[rng.gen_range(0..cells_wanted)].push(&atoms[i]);
    }
    let cells = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| ElementarySet::join_all(g, alg.ambient()))
        .collect::<Result<Vec<_>>>()?;
    let target = ElementarySet::join_all(&cells, alg.ambient())?;
    BPartition::new(target, cells)
}

/// Cell masses add up to the mass of the join, for every rule.
pub fn credence_additivity<S: Scalar>(cases: usize, seed: u64) -> Outcome {
    let mut out = Outcome::new("credence additivity");
    let mut rng = rng(seed);
    let unit = Ambient::open_unit();
    let closed = Ambient::closed_unit();
    let line = Ambient::full_line();
    for rule in 0..6 {
        for _ in 0..cases {
            let (mu, part) = (|| -> Result<(Credence<S>, BPartition<S>)> {
                let (mu, amb) = match rule {
                    0 => (Credence::lebesgue(&unit)?, unit.clone()),
                    1 => {
                        let x = sample::distinct_points(&mut rng, &q(-3, 1), &q(3, 1), 1, 16).pop().expect("one point");
                        let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
                        (Credence::point_mass(&line, x, side)?, line.clone())
                    }
                    2 => {
                        let (end, amb) = match rng.gen_range(0..4) {
                            0 => (End::NegInf, &line),
                            1 => (End::PosInf, &line),
                            2 => (End::AmbientLeft, &closed),
                            _ => (End::AmbientRight, &closed),
                        };
                        (Credence::end_mass(amb, end)?, amb.clone())
                    }
                    3 => loop {
                        let c = sample::credence(&mut rng, &unit, 12)?;
                        if matches!(c.rule(), crate::credence::Rule::Density(_)) {
                            break (c, unit.clone());
                        }
                    },
                    4 => {
                        let alg = random_algebra(&mut rng, &unit, 8);
                        let w = random_weights(&mut rng, alg.atom_count());
                        let mu = Credence::atom_table(alg.clone(), w)?;
                        let part = atom_partition(&mut rng, &alg)?;
                        return Ok((mu, part));
                    }
                    _ => {
                        let a = sample::credence(&mut rng, &closed, 12)?;
                        let b = sample::credence(&mut rng, &closed, 12)?;
                        (Credence::mixture(vec![(q(1, 3), a), (q(2, 3), b)])?, closed.clone())
                    }
                };
                let b = sample::elementary(&mut rng, &amb, 3, 16)?;
                let part = sample::partition(&mut rng, &b, 4, 16)?;
                Ok((mu, part))
            })()
            .expect("sampled inputs are valid");
            let w = || json!({"credence": credence_to_json(&mu), "cells": part.cells().iter().map(set_to_json).collect::<Vec<_>>()});
            match mu.check_additivity(&part) {
                Ok(ok) => out.record(ok, w),
                Err(e) => out.error(e, w),
            }
        }
    }
    out
}

fn mixture<S: Scalar>(rng: &mut StdRng, amb: &Ambient<S>) -> Credence<S> {
    let a = sample::credence(rng, amb, 12).expect("sampled credence");
    let b = sample::credence(rng, amb, 12).expect("sampled credence");
    Credence::mixture(vec![(q(1, 2), a), (q(1, 2), b)]).expect("valid mixture")
}

fn function_on<S: Scalar>(rng: &mut StdRng, amb: &Ambient<S>) -> PiecewiseAffine<S> {
    let lo = amb.lo().finite().cloned().unwrap_or_else(|| q(-4, 1));
    let hi = amb.hi().finite().cloned().unwrap_or_else(|| q(4, 1));
    sample::function(rng, &lo, &hi, 5, 3, 8).expect("sampled function")
}

/// `0 ≤ exact - approx ≤ eps·μ[B]`.
pub fn integrator_tolerance<S: Scalar>(cases: usize, seed: u64) -> Outcome {
    let mut out = Outcome::new("integrator tolerance");
    let mut rng = rng(seed);
    let ambs = ambients();
    for i in 0..cases {
        let amb = &ambs[i % ambs.len()];
        let g = function_on(&mut rng, amb);
        let mu = mixture(&mut rng, amb);
        let b = sample::elementary(&mut rng, amb, 3, 16).expect("sampled set");
        for (n, d) in EPS_LIST {
            let eps: S = q(n, d);
            let w = || {
                json!({"fn": function_to_json(&g), "credence": credence_to_json(&mu), "set": set_to_json(&b), "eps": eps.to_string()})
            };
            let r = (|| -> Result<bool> {
                let exact = integrate_exact(&g, &mu, &b)?;
                let approx = integrate(&g, &mu, &b, &eps)?;
                let gap = exact - approx;
                Ok(!gap.is_negative() && gap <= eps.clone() * mu.eval(&b)?)
            })();
            match r {
                Ok(ok) => out.record(ok, w),
                Err(e) => out.error(e, w),
            }
        }
    }
    out
}

/// `𝕀_B[g] = Σ 𝕀_{B_n}[g]` and the Bayes formula for conditional expectation.
pub fn partition_and_bayes<S: Scalar>(cases: usize, seed: u64) -> Outcome {
    let mut out = Outcome::new("partition decomposition and bayes");
    let mut rng = rng(seed);
    let ambs = ambients::<S>();
    let mut bayes_cases = 0;
    for i in 0..cases {
        let amb = &ambs[i % ambs.len()];
        let g = function_on(&mut rng, amb);
        let mu = mixture(&mut rng, amb);
        let b = sample::elementary(&mut rng, amb, 3, 16).expect("sampled set");
        let part = sample::partition(&mut rng, &b, 4, 16).expect("sampled partition");
        let w = || {
            json!({"fn": function_to_json(&g), "credence": credence_to_json(&mu),
                   "cells": part.cells().iter().map(set_to_json).collect::<Vec<_>>()})
        };
        let r = (|| -> Result<bool> {
            let whole = integrate_exact(&g, &mu, &b)?;
            let mut ok = whole == integrate_over_partition(&g, &mu, &part)?;
            if mu.eval(&b)?.is_positive() {
                bayes_cases += 1;
                ok &= bayes_expectation(&g, &mu, &part)? == conditional_expectation_exact(&g, &mu, &b)?;
            }
            Ok(ok)
        })();
        match r {
            Ok(ok) => out.record(ok, w),
            Err(e) => out.error(e, w),
        }
    }
    out.notes.push(format!("{bayes_cases} cases with positive mass checked the Bayes formula"));
    out
}

/// `𝕀^μ_{φ⁻¹B}[g∘φ] = 𝕀^{φ_*μ}_B[g]` exactly, and within `2·eps` approximately.
pub fn change_of_variables<S: Scalar>(cases: usize, seed: u64) -> Outcome {
    let mut out = Outcome::new("change of variables");
    let mut rng = rng(seed);
    let unit = Ambient::open_unit();
    let mut approx_fail = 0;
    for i in 0..cases {
        let phi = sample::monotone_map(&mut rng, &q(0, 1), &q(1, 1), 4, 8).expect("sampled map");
        let mu = sample::credence(&mut rng, &unit, 12).expect("sampled credence");
        let cod = phi.codomain().clone();
        let g = function_on(&mut rng, &cod);
        let b = sample::elementary(&mut rng, &cod, 3, 16).expect("sampled set");
        let (n, d) = EPS_LIST[i % EPS_LIST.len()];
        let eps: S = q(n, d);
        let w = || {
            json!({"map": map_to_json(&phi), "credence": credence_to_json(&mu), "fn": function_to_json(&g),
                   "set": set_to_json(&b), "eps": eps.to_string()})
        };
        match change_of_variables_check(&phi, &mu, &g, &b, &eps) {
            Ok(c) => {
                if c.exact_holds() && !c.approx_holds() {
                    approx_fail += 1;
                }
                out.record(c.holds(), w)
            }
            Err(e) => out.error(e, w),
        }
    }
    out.notes.push(format!("{approx_fail} failures on the approximate branch alone"));
    out
}

/// Germ values at 0 and the two-sided mixture on `[-1,1]`.
pub fn point_mass_values<S: Scalar>(seed: u64) -> Outcome {
    let mut out = Outcome::new("point-mass values");
    let mut rng = rng(seed);
    let closed = Ambient::closed(q(-1, 1), q(1, 1)).expect("valid");
    let open = Ambient::open(Extended::Finite(q(-1, 1)), Extended::Finite(q(1, 1))).expect("valid");
    let epsilons: Vec<S> = (0..50)
        .map(|_| sample::distinct_points(&mut rng, &q(0, 1), &q(1, 1), 1, 1000).pop().expect("one point"))
        .chain([q(1, 1)])
        .collect();
    for amb in [&closed, &open] {
        let delta = Credence::point_mass(amb, q(0, 1), Side::Right).expect("valid");
        for e in &epsilons {
            let right = ElementarySet::from_pairs(&[(q(0, 1), e.clone())], amb).expect("valid");
            let left = ElementarySet::from_pairs(&[(-e.clone(), q(0, 1))], amb).expect("valid");
            let (vr, vl) = (delta.eval(&right).expect("eval"), delta.eval(&left).expect("eval"));
            out.record(vr == q(1, 1) && vl == q(0, 1), || json!({"eps": e.to_string(), "right": vr.to_string(), "left": vl.to_string()}));
        }
    }
    // ν = ½(λ + φ₋δ₋ + φ₊δ₊) on [-1,1], and the same on (-1/2,1/2) where λ(0,ε) = ε
    let half = Ambient::open(Extended::Finite(q(-1, 2)), Extended::Finite(q(1, 2))).expect("valid");
    for phi_plus in [q(0, 1), q(1, 3), q(1, 2), q(1, 1)] {
        for amb in [&closed, &half] {
            let nu = two_sided_mixture(amb, &phi_plus).expect("valid mixture");
            let lam = Credence::lebesgue(amb).expect("bounded");
            for e in &epsilons {
                if Extended::Finite(e.clone()) >= *amb.hi() {
                    continue;
                }
                let r = ElementarySet::from_pairs(&[(q(0, 1), e.clone())], amb).expect("valid");
                let got = nu.eval(&r).expect("eval");
                let structural = (lam.eval(&r).expect("eval") + phi_plus.clone()) / q(2, 1);
                let mut ok = got == structural;
                if amb == &half {
                    ok &= got == (e.clone() + phi_plus.clone()) / q(2, 1);
                }
                out.record(ok, || json!({"phi_plus": phi_plus.to_string(), "eps": e.to_string(), "value": got.to_string()}));
            }
        }
    }
    out
}

/// `½λ + ½φ₋·δ(0,left) + ½φ₊·δ(0,right)`, zero-weight parts dropped.
pub fn two_sided_mixture<S: Scalar>(amb: &Ambient<S>, phi_plus: &S) -> Result<Credence<S>> {
    let phi_minus: S = q::<S>(1, 1) - phi_plus.clone();
    let mut parts = vec![(q(1, 2), Credence::lebesgue(amb)?)];
    if phi_minus.is_positive() {
        parts.push((phi_minus / q(2, 1), Credence::point_mass(amb, q(0, 1), Side::Left)?));
    }
    if phi_plus.is_positive() {
        parts.push((phi_plus.clone() / q(2, 1), Credence::point_mass(amb, q(0, 1), Side::Right)?));
    }
    Credence::mixture(parts)
}

/// Zero tails integrate to zero under the `+∞` germ, and a credence without
/// full support yields a strict-monotonicity witness.
pub fn free_end<S: Scalar>(cases: usize, seed: u64) -> Outcome {
    let mut out = Outcome::new("free-end credence");
    let mut rng = rng(seed);
    let line = Ambient::<S>::full_line();
    let mu = Credence::end_mass(&line, End::PosInf).expect("valid");
    for _ in 0..cases {
        let g = sample::function(&mut rng, &q(-4, 1), &q(4, 1), 5, 3, 8).expect("sampled function");
        let mut vs = g.values().to_vec();
        *vs.last_mut().expect("nonempty") = q(0, 1);
        let g = PiecewiseAffine::new(g.breakpoints().to_vec(), vs).expect("valid");
        let full = ElementarySet::full(&line);
        let exact = integrate_exact(&g, &mu, &full);
        let approx = integrate(&g, &mu, &full, &q(1, 100));
        let ok = matches!((&exact, &approx), (Ok(a), Ok(b)) if a.is_zero() && b.is_zero());
        out.record(ok, || json!({"fn": function_to_json(&g), "exact": format!("{exact:?}"), "approx": format!("{approx:?}")}));
    }
    let germs = [
        Credence::end_mass(&line, End::PosInf).expect("valid"),
        Credence::point_mass(&Ambient::open_unit(), q(1, 2), Side::Left).expect("valid"),
    ];
    for mu in &germs {
        let w = strict_monotonicity_witness(mu);
        let ok = match &w {
            Ok(Some(w)) => {
                let x = w.set.interior_point().expect("nonempty set");
                w.lower_integral == w.upper_integral && w.upper.eval(&x) > w.lower.eval(&x)
            }
            _ => false,
        };
        out.record(ok, || json!({"credence": credence_to_json(mu)}));
        if let Ok(Some(w)) = &w {
            out.notes.push(format!("{} vanishes on {}", credence_to_json(mu)["rule"], w.set));
        }
    }
    let lebesgue = Credence::<S>::lebesgue(&Ambient::open_unit()).expect("bounded");
    out.record(matches!(strict_monotonicity_witness(&lebesgue), Ok(None)), || json!({"credence": "lebesgue"}));
    out
}

fn grid<S: Scalar>(max_den: i64, lo: &S, hi: &S) -> Vec<S> {
    let mut pts: Vec<S> = Vec::new();
    for d in 1..=max_den {
        let (a, b) = ((lo.clone() * q(d, 1)).ceil(), (hi.clone() * q(d, 1)).floor());
        let mut k = a;
        while k <= b {
            pts.push(k.clone() / q(d, 1));
            k = k + q::<S>(1, 1);
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

fn liminal_family<S: Scalar>() -> Vec<Credence<S>> {
    let amb = Ambient::closed(q(-1, 1), q(1, 1)).expect("valid");
    let mut fam: Vec<Credence<S>> =
        [q(0, 1), q(1, 3), q(1, 2), q(1, 1)].iter().map(|p| two_sided_mixture(&amb, p).expect("valid")).collect();
    fam.push(
        Credence::mixture(vec![
            (q(1, 2), Credence::lebesgue(&amb).expect("valid")),
            (q(1, 4), Credence::point_mass(&amb, q(1, 2), Side::Right).expect("valid")),
            (q(1, 8), Credence::end_mass(&amb, End::AmbientLeft).expect("valid")),
            (q(1, 8), Credence::point_mass(&amb, q(-1, 3), Side::Left).expect("valid")),
        ])
        .expect("valid"),
    );
    fam
}

/// Mass and integral identities of the liminal decomposition over every
/// interval with grid endpoints, plus the share consistency condition.
pub fn liminal_identities<S: Scalar>(max_den: i64, partitions: usize, seed: u64) -> Outcome {
    let mut out = Outcome::new("liminal identities");
    let amb = Ambient::closed(q(-1, 1), q(1, 1)).expect("valid");
    let pts = grid(max_den, &q::<S>(-1, 1), &q::<S>(1, 1));
    let g = PiecewiseAffine::new(vec![q(-1, 1), q(0, 1), q(1, 2), q(1, 1)], vec![q(2, 1), q(-1, 1), q(3, 1), q(1, 2)])
        .expect("valid");
    // the integral identity runs on the dyadic sub-grid
    let dyadic = |x: &S| (x.clone() * q(max_den, 1)).is_integer();
    let mut integral_cases = 0u64;
    for mu in liminal_family() {
        let dec = match decompose(&mu) {
            Ok(d) => d,
            Err(e) => {
                out.error(e, || credence_to_json(&mu));
                continue;
            }
        };
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let r = ElementarySet::from_pairs(&[(a.clone(), b.clone())], &amb).expect("valid");
                let mut sets = vec![r.clone()];
                if dyadic(a) && dyadic(b) {
                    sets.push(r.neg());
                }
                for r in sets {
                    let w = || json!({"credence": credence_to_json(&mu), "set": set_to_json(&r)});
                    let mut ok = verify_mass_identity(&mu, &dec, &r).unwrap_or(false);
                    if dyadic(a) && dyadic(b) {
                        integral_cases += 1;
                        ok &= verify_integral_identity(&mu, &dec, &g, &r).unwrap_or(false);
                    }
                    out.record(ok, w);
                }
            }
        }
    }
    let mut rng = rng(seed);
    let full = ElementarySet::full(&amb);
    let fam = liminal_family();
    for i in 0..partitions {
        let mu = &fam[i % fam.len()];
        let dec = decompose(mu).expect("checked above");
        let part = sample::partition(&mut rng, &full, 5, 16).expect("sampled partition");
        // put the atoms on cell boundaries now and then
        let part = if i % 2 == 0 { split_at_atoms(&part, &dec.borel.atoms) } else { part };
        out.record(dec.consistent_on(&part), || {
            json!({"credence": credence_to_json(mu), "cells": part.cells().iter().map(set_to_json).collect::<Vec<_>>()})
        });
    }
    out.notes.push(format!("{} grid points, {integral_cases} integral cases", pts.len()));
    out
}

fn split_at_atoms<S: Scalar>(part: &BPartition<S>, atoms: &[Atom<S>]) -> BPartition<S> {
    let amb = part.ambient();
    let mut cells = part.cells().to_vec();
    for a in atoms {
        if !amb.contains_point(&a.x) || amb.lo().finite() == Some(&a.x) || amb.hi().finite() == Some(&a.x) {
            continue;
        }
        let left = ElementarySet::regularize([(amb.lo().clone(), Extended::Finite(a.x.clone()))], amb).expect("valid");
        cells = cells
            .into_iter()
            .flat_map(|c| [c.meet(&left).expect("same"), c.meet(&left.neg()).expect("same")])
            .filter(|c| !c.is_empty())
            .collect();
    }
    BPartition::new(part.target().clone(), cells).expect("still a partition")
}

/// The star integral on the Stone space equals the simple integral, for all
/// `{0..5}`-valued atom functions and all domains; and the refining limit of
/// atomwise minorants over dyadic algebras is monotone and reaches the exact
/// integral within `eps`.
pub fn stone_identity<S: Scalar>(algebras_per_size: usize, seed: u64) -> Outcome {
    let mut out = Outcome::new("stone identity");
    let mut rng = rng(seed);
    let unit = Ambient::open_unit();
    for atoms in 1..=5usize {
        let mut made = 0;
        while made < algebras_per_size {
            let alg = random_algebra(&mut rng, &unit, atoms);
            if alg.atom_count() != atoms {
                continue;
            }
            made += 1;
            let mus = [
                mixture(&mut rng, &unit),
                Credence::atom_table(alg.clone(), random_weights(&mut rng, atoms)).expect("valid"),
            ];
            let space = StoneSpace::new(alg.clone());
            let domains = alg.elements();
            let masks: Vec<AtomMask> = domains.iter().map(|d| space.clopen(d).expect("domain is in the algebra")).collect();
            let total = 6usize.pow(atoms as u32);
            let functions: Vec<_> = (0..total)
                .map(|code| {
                    let mut c = code;
                    let values: Vec<S> = (0..atoms)
                        .map(|_| {
                            let v = (c % 6) as i64;
                            c /= 6;
                            q(v, 1)
                        })
                        .collect();
                    let f = atom_function(&alg, values).expect("one value per atom");
                    let star = star_function(&f, &alg).expect("f is measurable for the algebra");
                    (f, star)
                })
                .collect();
            for mu in &mus {
                let weights = star_measure(mu, &alg).expect("atoms are in the algebra");
                for (code, (f, star)) in functions.iter().enumerate() {
                    for (d, m) in domains.iter().zip(&masks) {
                        let lhs = star_sum(star, &weights, *m);
                        let ok = matches!(simple_integral(f, mu, d), Ok(b) if b == lhs);
                        out.record(ok, || json!({"credence": credence_to_json(mu), "domain": set_to_json(d), "code": code}));
                    }
                }
            }
        }
    }
    let lebesgue = Credence::lebesgue(&unit).expect("bounded");
    let algebras: Vec<_> = (0..=6).map(|k| dyadic_algebra(&unit, k).expect("bounded")).collect();
    for _ in 0..10 {
        let g = sample::function(&mut rng, &q(0, 1), &q(1, 1), 4, 1, 4).expect("sampled function");
        let eps = q(1, 10);
        let r = refining_limit(&g, &lebesgue, &algebras, &eps);
        let ok = matches!(&r, Ok(t) if t.is_monotone() && t.converged_at.is_some());
        out.record(ok, || json!({"fn": function_to_json(&g), "result": format!("{r:?}")}));
    }
    out
}

/// Every check of the finite oracle on all topologies up to `max_points`,
/// with both enumerations agreeing on the counts.
pub fn finite_oracle(max_points: usize) -> Outcome {
    let mut out = Outcome::new("finite oracle");
    let checks = [Check::Algebra, Check::Baire, Check::Integral, Check::Stone];
    match run_oracle(max_points, &checks) {
        Ok(report) => {
            for (n, count, runs) in &report.rows {
                out.notes.push(format!("{n} points: {count} topologies, {runs} checks"));
                out.cases += *runs as u64;
            }
            out.failures += report.failures.len() as u64;
            if let Some(f) = report.failures.first() {
                out.witness = Some(json!({"points": f.points, "opens": f.opens, "check": f.check.name(), "detail": f.detail}));
            }
        }
        Err(e) => out.error(e, || json!({"max_points": max_points})),
    }
    for n in 1..=max_points.min(4) {
        let a = enumerate_topologies(n).map(|v| v.len());
        let b = enumerate_topologies_by_families(n).map(|v| v.len());
        out.record(matches!((&a, &b), (Ok(x), Ok(y)) if x == y), || json!({"points": n, "preorders": format!("{a:?}"), "families": format!("{b:?}")}));
    }
    out
}

/// Quarter-ratio fat Cantor stages: `λ(L_n) + λ(R_n) = ½(1 - 2^-n)` and the
/// coverage radius stays below `2^-n` and shrinks.
pub fn fat_cantor_nonexample<S: Scalar>(depth: usize) -> Outcome {
    let mut out = Outcome::new("fat cantor nonexample");
    let ratios = smith_volterra_ratios::<S>(depth);
    let trace = cantor_trace(depth, &ratios).expect("valid ratios");
    for n in 1..=depth {
        let s = &trace[n];
        let expected = (q::<S>(1, 1) - S::pow2_inv(n as u32)) / q(2, 1);
        let mut ok = s.measure == expected && s.coverage_radius < S::pow2_inv(n as u32);
        ok &= s.coverage_radius <= trace[n - 1].coverage_radius && s.measure < q(1, 1);
        if n <= MATERIALIZE_CAP.min(12) {
            let st = fat_cantor(n, &ratios).expect("under the cap");
            let (l, r) = left_right_halves(&st.removed).expect("bounded");
            let sum = l.length().expect("bounded") + r.length().expect("bounded");
            ok &= sum == expected
                && st.measure == expected
                && coverage_radius(&st.removed).expect("bounded") == s.coverage_radius
                && l.is_disjoint(&r).expect("same ambient")
                && r.is_subset(&l.neg()).expect("same ambient");
        }
        out.record(ok, || json!({"depth": n, "measure": s.measure.to_string(), "gap": s.coverage_radius.to_string()}));
    }
    if let Some(last) = trace.last() {
        out.notes.push(format!("depth {}: measure {}, gap {}", last.depth, last.measure, last.coverage_radius));
    }
    out
}

/// The dense open set of mass below one for the uniform cdf, and the atom
/// branch for a measure with an atom.
pub fn dense_open_construction<S: Scalar>(depth: usize) -> Outcome {
    let mut out = Outcome::new("dense open below one");
    let cdf = PiecewiseAffine::new(vec![q::<S>(0, 1), q(1, 1)], vec![q(0, 1), q(1, 1)]).expect("valid");
    match dense_open_below_one(&cdf, &dyadic_sequence(4096), depth) {
        Ok(st) => {
            let cap = q::<S>(1, 1) - S::pow2_inv(depth as u32);
            let lebesgue = st.set.length().expect("bounded");
            let ok = st.mass < st.bound
                && st.bound <= cap
                && st.mass == lebesgue
                && st.halves_mass == st.mass
                && st.set.intervals().len() == depth
                && st.right.is_subset(&st.left.neg()).expect("same ambient");
            out.notes.push(format!("depth {depth}: mass {}, bound {}, gap {}", st.mass, st.bound, st.coverage_radius));
            out.record(ok, || json!({"mass": st.mass.to_string(), "bound": st.bound.to_string()}));
        }
        Err(e) => out.error(e, || json!({"depth": depth})),
    }
    let nu = BorelPart { lebesgue_weight: q::<S>(3, 4), atoms: vec![Atom { x: q(2, 5), mass: q(1, 4) }] };
    match atom_branch_witness(&nu) {
        Ok(w) => {
            out.notes.push(format!("atom branch: ν(L) + ν(R) = {}", w.sum()));
            out.record(w.is_violation() && w.sum() == q(3, 4), || json!({"sum": w.sum().to_string()}));
        }
        Err(e) => out.error(e, || json!({})),
    }
    out
}

/// All checks at the given sizes. Randomized checks run on 128-bit
/// rationals (overflow panics rather than wraps); the deep constructions
/// and the algebra laws with large denominators use big rationals.
pub fn run_all(sizes: Sizes, seed: u64) -> Vec<Outcome> {
    type F = crate::Rational128;
    type B = crate::Rational;
    vec![
        algebra_laws::<B>(sizes.algebra_cases, 1_000_000, seed),
        join_example(),
        credence_additivity::<F>(sizes.random_cases, seed + 1),
        integrator_tolerance::<F>(sizes.random_cases, seed + 2),
        partition_and_bayes::<F>(sizes.random_cases, seed + 3),
        change_of_variables::<F>(sizes.random_cases, seed + 4),
        point_mass_values::<B>(seed + 5),
        free_end::<F>(sizes.random_cases.min(200), seed + 6),
        liminal_identities::<F>(sizes.liminal_max_den, sizes.random_cases, seed + 7),
        stone_identity::<F>(sizes.stone_algebras, seed + 8),
        finite_oracle(sizes.oracle_points),
        fat_cantor_nonexample::<B>(sizes.cantor_depth),
        dense_open_construction::<B>(10),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for o in run_all(Sizes::QUICK, 11) {
            assert!(o.passed(), "{} failed: {:?}", o.name, o.witness);
        }
    }
}
