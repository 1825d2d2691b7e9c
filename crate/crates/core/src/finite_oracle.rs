//! Brute-force checks on explicit finite topological spaces.
//!
//! Subsets of an `n`-point space are `u32` bitmasks. Every finite space is a
//! Baire space, and its meager sets are exactly its nowhere dense sets (a
//! finite union of nowhere dense sets is nowhere dense), so all the families
//! involved can be enumerated outright.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Subset = u32;

/// Enumeration is capped at this many points.
pub const MAX_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteSpace {
    n: usize,
    opens: Vec<Subset>,
}

impl FiniteSpace {
    pub fn new(n: usize, opens: impl IntoIterator<Item = Subset>) -> Result<Self> {
        if n > 16 {
            return Err(Error::CapExceeded { requested: n, cap: 16 });
        }
        let full = full_set(n);
        let set: BTreeSet<Subset> = opens.into_iter().collect();
        if set.iter().any(|&u| u & !full != 0) {
            return Err(Error::InvalidTopology("open set mentions a missing point".into()));
        }
        if !set.contains(&0) || !set.contains(&full) {
            return Err(Error::InvalidTopology("empty set and whole space must be open".into()));
        }
        for &u in &set {
            for &v in &set {
                if !set.contains(&(u | v)) || !set.contains(&(u & v)) {
                    return Err(Error::InvalidTopology(format!("not closed under union/intersection: {u:#b}, {v:#b}")));
                }
            }
        }
        Ok(FiniteSpace { n, opens: set.into_iter().collect() })
    }

    pub fn discrete(n: usize) -> Self {
        FiniteSpace { n, opens: (0..=full_set(n)).collect() }
    }

    pub fn indiscrete(n: usize) -> Self {
        FiniteSpace { n, opens: vec![0, full_set(n)] }
    }

    /// Points `a = 0`, `b = 1`; opens `∅, {a}, S`.
    pub fn sierpinski() -> Self {
        FiniteSpace { n: 2, opens: vec![0b00, 0b01, 0b11] }
    }

    /// Points `1, 2, 3` as bits `0, 1, 2`; opens `∅, {1}, {3}, {1,3}, S`.
    pub fn three_point() -> Self {
        FiniteSpace { n: 3, opens: vec![0b000, 0b001, 0b100, 0b101, 0b111] }
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn opens(&self) -> &[Subset] {
        &self.opens
    }

    pub fn full(&self) -> Subset {
        full_set(self.n)
    }

    pub fn is_open(&self, a: Subset) -> bool {
        self.opens.binary_search(&a).is_ok()
    }

    pub fn interior(&self, a: Subset) -> Subset {
        self.opens.iter().filter(|&&u| u & !a == 0).fold(0, |acc, &u| acc | u)
    }

    pub fn closure(&self, a: Subset) -> Subset {
        self.full() & !self.interior(self.full() & !a)
    }

    pub fn is_regular(&self, a: Subset) -> bool {
        self.is_open(a) && self.interior(self.closure(a)) == a
    }

    pub fn is_nowhere_dense(&self, a: Subset) -> bool {
        self.interior(self.closure(a)) == 0
    }

    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        0..=self.full()
    }

    /// Meager sets: here the nowhere dense ones.
    pub fn meager(&self) -> Vec<Subset> {
        self.subsets().filter(|&a| self.is_nowhere_dense(a)).collect()
    }

    /// Sets with the Baire property: `O △ M`, `O` open, `M` meager.
    pub fn baire_sets(&self) -> Vec<Subset> {
        let meager = self.meager();
        let set: BTreeSet<Subset> = self.opens.iter().flat_map(|&o| meager.iter().map(move |&m| o ^ m)).collect();
        set.into_iter().collect()
    }

    pub fn regular_algebra(&self) -> RegularAlgebra<'_> {
        let elements = self.opens.iter().copied().filter(|&u| self.is_regular(u)).collect();
        RegularAlgebra { space: self, elements }
    }
}

fn full_set(n: usize) -> Subset {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// The regular open sets with `∨ = int∘clos∘∪`, `∧ = ∩`, `¬ = int∘complement`.
#[derive(Clone, Debug)]
pub struct RegularAlgebra<'a> {
    space: &'a FiniteSpace,
    elements: Vec<Subset>,
}

impl RegularAlgebra<'_> {
    pub fn elements(&self) -> &[Subset] {
        &self.elements
    }

    pub fn join(&self, a: Subset, b: Subset) -> Subset {
        self.space.interior(self.space.closure(a | b))
    }

    pub fn meet(&self, a: Subset, b: Subset) -> Subset {
        a & b
    }

    pub fn neg(&self, a: Subset) -> Subset {
        self.space.interior(self.space.full() & !a)
    }

    pub fn top(&self) -> Subset {
        self.space.full()
    }

    /// Minimal nonzero elements.
    pub fn atoms(&self) -> Vec<Subset> {
        self.elements
            .iter()
            .copied()
            .filter(|&a| a != 0 && !self.elements.iter().any(|&b| b != 0 && b != a && b & !a == 0))
            .collect()
    }

    /// The unique regular open set `R` with `A △ R` meager, if any.
    pub fn representative(&self, a: Subset) -> Option<Subset> {
        let reps: Vec<Subset> =
            self.elements.iter().copied().filter(|&r| self.space.is_nowhere_dense(a ^ r)).collect();
        (reps.len() == 1).then(|| reps[0])
    }

    /// Exhaustive check of the Boolean algebra laws; the first violated law
    /// is returned as an error string.
    pub fn check_axioms(&self) -> std::result::Result<(), String> {
        let els = &self.elements;
        let (top, bot) = (self.top(), 0);
        let closed = |x: Subset| els.binary_search(&x).is_ok();
        for &a in els {
            let na = self.neg(a);
            if !closed(na) {
                return Err(format!("¬{a:#b} is not regular"));
            }
            if self.join(a, na) != top || self.meet(a, na) != bot {
                return Err(format!("complement law fails at {a:#b}"));
            }
            if self.neg(na) != a {
                return Err(format!("double negation fails at {a:#b}"));
            }
            if self.join(a, bot) != a || self.meet(a, top) != a {
                return Err(format!("identity law fails at {a:#b}"));
            }
            for &b in els {
                let (j, m) = (self.join(a, b), self.meet(a, b));
                if !closed(j) || !closed(m) {
                    return Err(format!("{a:#b}, {b:#b}: not closed"));
                }
                if j != self.join(b, a) || m != self.meet(b, a) {
                    return Err(format!("commutativity fails at {a:#b}, {b:#b}"));
                }
                if self.join(a, m) != a || self.meet(a, j) != a {
                    return Err(format!("absorption fails at {a:#b}, {b:#b}"));
                }
                if self.neg(j) != self.meet(self.neg(a), self.neg(b)) {
                    return Err(format!("De Morgan fails at {a:#b}, {b:#b}"));
                }
                for &c in els {
                    if self.join(a, self.join(b, c)) != self.join(j, c) || self.meet(a, self.meet(b, c)) != self.meet(m, c) {
                        return Err(format!("associativity fails at {a:#b}, {b:#b}, {c:#b}"));
                    }
                    if self.meet(a, self.join(b, c)) != self.join(m, self.meet(a, c)) {
                        return Err(format!("distributivity fails at {a:#b}, {b:#b}, {c:#b}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A finitely additive set function on a family of subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCharge<S> {
    pub values: BTreeMap<Subset, S>,
}

impl<S: Scalar> FiniteCharge<S> {
    pub fn get(&self, a: Subset) -> Option<&S> {
        self.values.get(&a)
    }

    /// `ν[A ⊔ B] = ν[A] + ν[B]` whenever all three sets are in the family.
    pub fn is_additive(&self) -> bool {
        self.values.iter().all(|(&a, va)| {
            self.values.iter().all(|(&b, vb)| {
                a & b != 0 || self.values.get(&(a | b)).is_none_or(|vab| *vab == va.clone() + vb.clone())
            })
        })
    }

    pub fn vanishes_on(&self, sets: &[Subset]) -> bool {
        sets.iter().all(|m| self.values.get(m).is_none_or(|v| v.is_zero()))
    }
}

/// A credence on `ℜ(S)` given by atom weights (in the order of
/// [`RegularAlgebra::atoms`]), evaluated on an element.
pub fn credence_value<S: Scalar>(atoms: &[Subset], weights: &[S], r: Subset) -> S {
    atoms
        .iter()
        .zip(weights)
        .filter(|(&a, _)| a & !r == 0)
        .fold(S::zero(), |acc, (_, w)| acc + w.clone())
}

/// The residual charge `ν[A] := μ[R_A]` on the Baire-property sets.
pub fn residual_charge<S: Scalar>(space: &FiniteSpace, weights: &[S]) -> Result<FiniteCharge<S>> {
    let alg = space.regular_algebra();
    let atoms = alg.atoms();
    let mut values = BTreeMap::new();
    for a in space.baire_sets() {
        let r = alg
            .representative(a)
            .ok_or_else(|| Error::InvalidTopology(format!("{a:#b} has no unique regular representative")))?;
        values.insert(a, credence_value(&atoms, weights, r));
    }
    Ok(FiniteCharge { values })
}

/// Every class of `𝔅𝔞(S)/∼` holds exactly one regular open set, and for each
/// vertex credence (one atom carries all mass) the residual charge is
/// additive, vanishes on meager sets, and restricts back to the credence.
pub fn baire_bijection_check(space: &FiniteSpace) -> std::result::Result<(), String> {
    let alg = space.regular_algebra();
    let baire = space.baire_sets();
    let meager = space.meager();
    for &a in &baire {
        if alg.representative(a).is_none() {
            return Err(format!("class of {a:#b} does not hold exactly one regular open set"));
        }
    }
    for &r in alg.elements() {
        if baire.binary_search(&r).is_err() {
            return Err(format!("regular open {r:#b} lacks the Baire property"));
        }
    }
    let atoms = alg.atoms();
    let k = atoms.len();
    let mut credences: Vec<Vec<crate::Rational>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { crate::Rational::from_integer(1.into()) } else { Default::default() }).collect())
        .collect();
    credences.push(vec![<crate::Rational as Scalar>::ratio(1, k as i64); k]);
    for weights in &credences {
        let nu = residual_charge(space, weights).map_err(|e| e.to_string())?;
        if !nu.is_additive() {
            return Err(format!("residual charge for {weights:?} is not additive"));
        }
        if !nu.vanishes_on(&meager) {
            return Err(format!("residual charge for {weights:?} charges a meager set"));
        }
        if nu.get(space.full()).map(|v| *v == <crate::Rational as num_traits::One>::one()) != Some(true) {
            return Err("residual charge does not have total mass one".into());
        }
        // restriction to ℜ(S) is a credence with the original atom weights
        for (i, &a) in atoms.iter().enumerate() {
            if nu.get(a) != Some(&weights[i]) {
                return Err(format!("round trip changes the weight of atom {a:#b}"));
            }
        }
        for &p in alg.elements() {
            for &q in alg.elements() {
                if p & q == 0 && nu.values[&alg.join(p, q)] != nu.values[&p].clone() + nu.values[&q].clone() {
                    return Err(format!("restriction is not additive on {p:#b}, {q:#b}"));
                }
            }
        }
    }
    Ok(())
}

/// `∫◇_B f dμ` against `∫_B f dν` for the residual charge `ν`.
///
/// `f` takes value `values[i]` on the regular open cell `cells[i]` and `0` on
/// the nowhere dense remainder. The right side sums `r·ν{x ∈ B : f(x) = r}`
/// over the distinct values `r` of the pointwise function.
pub fn baire_integral_check<S: Scalar>(
    space: &FiniteSpace,
    weights: &[S],
    cells: &[Subset],
    values: &[S],
    b: Subset,
) -> Result<(S, S)> {
    let alg = space.regular_algebra();
    let atoms = alg.atoms();
    let mut covered = 0;
    for (i, &c) in cells.iter().enumerate() {
        if !space.is_regular(c) || c & covered != 0 {
            return Err(Error::InvalidTopology(format!("cell {i} is not a disjoint regular open set")));
        }
        covered |= c;
    }
    if space.interior(space.closure(covered)) != space.full() {
        return Err(Error::InvalidTopology("cells do not join to the whole space".into()));
    }
    let lhs = cells
        .iter()
        .zip(values)
        .fold(S::zero(), |acc, (&c, v)| acc + v.clone() * credence_value(&atoms, weights, alg.meet(c, b)));
    let nu = residual_charge(space, weights)?;
    let pointwise = |x: usize| -> S {
        cells.iter().position(|&c| c >> x & 1 == 1).map_or_else(S::zero, |i| values[i].clone())
    };
    let mut levels: BTreeMap<S, Subset> = BTreeMap::new();
    for x in 0..space.points() {
        if b >> x & 1 == 1 {
            *levels.entry(pointwise(x)).or_insert(0) |= 1 << x;
        }
    }
    let mut rhs = S::zero();
    for (r, set) in levels {
        let mass = nu.get(set).ok_or_else(|| Error::InvalidTopology(format!("level set {set:#b} lacks the Baire property")))?;
        rhs = rhs + r * mass.clone();
    }
    Ok((lhs, rhs))
}

/// Stone representation of `ℜ(S)`: `B ↦ B*` (atoms below `B`) is a bijection
/// onto the subsets of atoms that turns `∨, ∧, ¬` into `∪, ∩, complement`.
pub fn stone_check(space: &FiniteSpace) -> std::result::Result<(), String> {
    let alg = space.regular_algebra();
    let atoms = alg.atoms();
    let star = |b: Subset| -> u32 {
        atoms.iter().enumerate().filter(|(_, &a)| a & !b == 0).fold(0, |acc, (i, _)| acc | 1 << i)
    };
    let all = (1u32 << atoms.len()) - 1;
    let images: BTreeSet<u32> = alg.elements().iter().map(|&b| star(b)).collect();
    if images.len() != alg.elements().len() || images.len() != 1 << atoms.len() {
        return Err(format!("clopen map is not a bijection ({} elements, {} atoms)", alg.elements().len(), atoms.len()));
    }
    for &a in alg.elements() {
        if star(alg.neg(a)) != all & !star(a) {
            return Err(format!("(¬{a:#b})* is not the complement"));
        }
        for &b in alg.elements() {
            if star(alg.join(a, b)) != star(a) | star(b) || star(alg.meet(a, b)) != star(a) & star(b) {
                return Err(format!("clopen map fails on {a:#b}, {b:#b}"));
            }
        }
    }
    Ok(())
}

/// For a discrete space the Stone space of `ℜ(S)` is `S`: the atoms are the
/// singletons in point order, so `B*` is `B` itself.
pub fn discrete_stone_is_identity(n: usize) -> bool {
    let space = FiniteSpace::discrete(n);
    let alg = space.regular_algebra();
    let atoms = alg.atoms();
    atoms == (0..n).map(|i| 1u32 << i).collect::<Vec<_>>()
        && alg.elements().len() == 1 << n
        && alg.elements().iter().all(|&b| {
            atoms.iter().enumerate().filter(|(_, &a)| a & !b == 0).fold(0u32, |acc, (i, _)| acc | 1 << i) == b
        })
}

/// All labeled topologies on `n` points, in order of their specialization
/// preorder (the open sets are the up-sets of a reflexive transitive relation).
pub fn enumerate_topologies(n: usize) -> Result<Vec<FiniteSpace>> {
    if n > MAX_POINTS {
        return Err(Error::CapExceeded { requested: n, cap: MAX_POINTS });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for code in 0u64..1 << pairs.len() {
        // up[i]: points above i
        let mut up = vec![0u32; n];
        for (i, u) in up.iter_mut().enumerate() {
            *u = 1 << i;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if code >> k & 1 == 1 {
                up[i] |= 1 << j;
            }
        }
        let transitive = (0..n).all(|i| (0..n).filter(|&j| up[i] >> j & 1 == 1).all(|j| up[j] & !up[i] == 0));
        if !transitive {
            continue;
        }
        let opens = (0..=full_set(n))
            .filter(|&s| (0..n).filter(|&i| s >> i & 1 == 1).all(|i| up[i] & !s == 0))
            .collect();
        out.push(FiniteSpace { n, opens });
    }
    Ok(out)
}

/// All labeled topologies on `n ≤ 4` points found by scanning every family of
/// subsets, in decreasing order of the family's bitmask.
pub fn enumerate_topologies_by_families(n: usize) -> Result<Vec<FiniteSpace>> {
    if n > 4 {
        return Err(Error::CapExceeded { requested: n, cap: 4 });
    }
    let full = full_set(n);
    let inner: Vec<Subset> = (1..full).collect();
    let mut out = Vec::new();
    for code in (0u64..1 << inner.len()).rev() {
        let mut fam = vec![0, full];
        fam.extend(inner.iter().enumerate().filter(|(k, _)| code >> k & 1 == 1).map(|(_, &s)| s));
        let member = |s: Subset| s == 0 || s == full || (code >> (s - 1) & 1 == 1);
        if fam.iter().all(|&u| fam.iter().all(|&v| member(u | v) && member(u & v))) {
            out.push(FiniteSpace::new(n, fam).expect("closed family"));
        }
    }
    Ok(out)
}

/// Which checks [`run_oracle`] performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Algebra,
    Baire,
    Integral,
    Stone,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Algebra => "algebra",
            Check::Baire => "baire",
            Check::Integral => "integral",
            Check::Stone => "stone",
        }
    }

    pub fn parse(s: &str) -> Result<Check> {
        match s.trim() {
            "algebra" => Ok(Check::Algebra),
            "baire" => Ok(Check::Baire),
            "integral" => Ok(Check::Integral),
            "stone" => Ok(Check::Stone),
            other => Err(Error::Parse(format!("unknown check {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleFailure {
    pub points: usize,
    pub opens: Vec<Subset>,
    pub check: Check,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleReport {
    /// `(points, topologies, checks run)` per size.
    pub rows: Vec<(usize, usize, usize)>,
    pub failures: Vec<OracleFailure>,
}

/// The integral check on one space: every vertex credence, `f` the atom
/// index plus one on each atom of `ℜ(S)`, and every element as domain.
fn integral_check(space: &FiniteSpace) -> std::result::Result<(), String> {
    type Q = crate::Rational;
    let alg = space.regular_algebra();
    let atoms = alg.atoms();
    let values: Vec<Q> = (0..atoms.len()).map(|i| Q::from_integer((i as i64 + 1).into())).collect();
    for v in 0..atoms.len() {
        let weights: Vec<Q> = (0..atoms.len()).map(|j| if j == v { Q::from_integer(1.into()) } else { Q::default() }).collect();
        for &b in alg.elements() {
            let (lhs, rhs) = baire_integral_check(space, &weights, &atoms, &values, b).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("integral mismatch on {b:#b}: {lhs} vs {rhs}"));
            }
        }
    }
    Ok(())
}

/// Run the selected checks on every labeled topology with at most
/// `max_points` points.
pub fn run_oracle(max_points: usize, checks: &[Check]) -> Result<OracleReport> {
    let mut report = OracleReport::default();
    for n in 1..=max_points {
        let spaces = enumerate_topologies(n)?;
        let mut runs = 0;
        for space in &spaces {
            for &check in checks {
                runs += 1;
                let outcome = match check {
                    Check::Algebra => space.regular_algebra().check_axioms(),
                    Check::Baire => baire_bijection_check(space),
                    Check::Integral => integral_check(space),
                    Check::Stone => stone_check(space),
                };
                if let Err(detail) = outcome {
                    report.failures.push(OracleFailure { points: n, opens: space.opens.clone(), check, detail });
                }
            }
        }
        report.rows.push((n, spaces.len(), runs));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::q;

    #[test]
    fn sierpinski_space() {
        let s = FiniteSpace::sierpinski();
        assert!(!s.is_regular(0b01));
        assert_eq!(s.closure(0b01), 0b11);
        assert_eq!(s.regular_algebra().elements(), &[0, 0b11]);
        assert_eq!(s.meager(), vec![0, 0b10]);
        assert!(baire_bijection_check(&s).is_ok());
        // 𝔅𝔞 splits into two classes
        let alg = s.regular_algebra();
        let classes: BTreeSet<Subset> = s.baire_sets().iter().map(|&a| alg.representative(a).unwrap()).collect();
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn discrete_space() {
        let d = FiniteSpace::discrete(3);
        assert!(d.subsets().all(|a| d.is_regular(a)));
        assert_eq!(d.meager(), vec![0]);
        assert!(baire_bijection_check(&d).is_ok());
        assert!(discrete_stone_is_identity(3));
    }

    #[test]
    fn three_point_space() {
        let s = FiniteSpace::three_point();
        let alg = s.regular_algebra();
        assert_eq!(alg.elements(), &[0, 0b001, 0b100, 0b111]);
        assert_eq!(alg.join(0b001, 0b100), 0b111);
        assert!(alg.check_axioms().is_ok());
        assert!(stone_check(&s).is_ok());
    }

    #[test]
    fn invalid_topology() {
        assert!(FiniteSpace::new(2, [0, 0b01, 0b10, 0b11]).is_ok());
        assert!(matches!(FiniteSpace::new(2, [0, 0b01, 0b10]), Err(Error::InvalidTopology(_))));
        assert!(matches!(FiniteSpace::new(3, [0, 0b011, 0b110, 0b111]), Err(Error::InvalidTopology(_))));
    }

    #[test]
    fn topology_counts_agree() {
        let expected = [1, 4, 29, 355];
        for n in 1..=4 {
            let a = enumerate_topologies(n).unwrap();
            let b = enumerate_topologies_by_families(n).unwrap();
            assert_eq!(a.len(), expected[n - 1]);
            assert_eq!(b.len(), expected[n - 1]);
            let sa: BTreeSet<_> = a.into_iter().collect();
            let sb: BTreeSet<_> = b.into_iter().collect();
            assert_eq!(sa, sb);
        }
        assert!(matches!(enumerate_topologies(6), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn integral_examples() {
        let s = FiniteSpace::three_point();
        let alg = s.regular_algebra();
        let atoms = alg.atoms();
        let w = vec![q(1, 3), q(2, 3)];
        // constant f
        let (l, r) = baire_integral_check(&s, &w, &[s.full()], &[q(5, 2)], 0b001).unwrap();
        assert_eq!(l, r);
        assert_eq!(l, q(5, 6));
        let (l, r) = baire_integral_check(&s, &w, &atoms, &[q(-1, 1), q(4, 1)], s.full()).unwrap();
        assert_eq!((l.clone(), r), (l, q(7, 3)));
        // all mass on the dense point of the Sierpiński space
        let sp = FiniteSpace::sierpinski();
        let (l, r) = baire_integral_check(&sp, &[q(1, 1)], &[0b11], &[q(3, 1)], 0b11).unwrap();
        assert_eq!((l, r), (q(3, 1), q(3, 1)));
    }

    #[test]
    fn small_oracle_run_is_clean() {
        let rep = run_oracle(3, &[Check::Algebra, Check::Baire, Check::Integral, Check::Stone]).unwrap();
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert_eq!(rep.rows.iter().map(|r| r.1).collect::<Vec<_>>(), vec![1, 4, 29]);
    }
}
