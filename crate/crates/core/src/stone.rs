//! Finitely generated subalgebras and their Stone representation.
//!
//! A finite Boolean algebra of elementary sets is stored through its atoms.
//! An element is identified with the bitmask of atoms below it, which is also
//! its image `B*` under the clopen map into the Stone space (one point per
//! atom, i.e. per ultrafilter).

use crate::credence::Credence;
use crate::elementary::{Ambient, ElementarySet};
use crate::error::{Error, Result};
use crate::integrator::{simple_integral, BPartition, SimpleFunction};
use crate::piecewise::PiecewiseAffine;
use crate::scalar::Scalar;

/// Default cap on the number of elements of a generated algebra.
pub const DEFAULT_CLOSURE_CAP: u128 = 1 << 16;

/// Bitmask of atoms; bit `i` is atom `i`.
pub type AtomMask = u128;

/// Masks hold at most this many atoms.
pub const MAX_ATOMS: usize = 127;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra<S> {
    ambient: Ambient<S>,
    generators: Vec<ElementarySet<S>>,
    atoms: Vec<ElementarySet<S>>,
}

impl<S: Scalar> FiniteAlgebra<S> {
    /// Smallest subalgebra containing `generators`, with the default cap.
    pub fn generate(generators: &[ElementarySet<S>], ambient: &Ambient<S>) -> Result<Self> {
        Self::generate_with_cap(generators, ambient, DEFAULT_CLOSURE_CAP)
    }

    pub fn generate_with_cap(generators: &[ElementarySet<S>], ambient: &Ambient<S>, cap: u128) -> Result<Self> {
        let mut atoms = vec![ElementarySet::full(ambient)];
        for g in generators {
            ambient.check_same(g.ambient())?;
            let ng = g.neg();
            let mut next = Vec::with_capacity(atoms.len() * 2);
            for a in &atoms {
                for piece in [a.meet(g)?, a.meet(&ng)?] {
                    if !piece.is_empty() {
                        next.push(piece);
                    }
                }
            }
            atoms = next;
            let size = 1u128.checked_shl(atoms.len() as u32).unwrap_or(u128::MAX);
            if atoms.len() > MAX_ATOMS || size > cap {
                return Err(Error::ClosureTooLarge { size, cap });
            }
        }
        atoms.sort_by(|a, b| a.intervals().cmp(b.intervals()));
        Ok(FiniteAlgebra { ambient: ambient.clone(), generators: generators.to_vec(), atoms })
    }

    /// The algebra whose atoms are the given cells of a partition of the ambient.
    pub fn from_atoms(cells: &[ElementarySet<S>], ambient: &Ambient<S>) -> Result<Self> {
        BPartition::new(ElementarySet::full(ambient), cells.to_vec())?;
        Self::generate(cells, ambient)
    }

    pub fn ambient(&self) -> &Ambient<S> {
        &self.ambient
    }

    pub fn generators(&self) -> &[ElementarySet<S>] {
        &self.generators
    }

    pub fn atoms(&self) -> &[ElementarySet<S>] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn element_count(&self) -> u128 {
        1u128.checked_shl(self.atoms.len() as u32).unwrap_or(u128::MAX)
    }

    pub fn full_mask(&self) -> AtomMask {
        (1u128 << self.atoms.len()) - 1
    }

    /// The element whose atoms are the set bits of `mask`.
    pub fn element(&self, mask: AtomMask) -> ElementarySet<S> {
        let chosen: Vec<&ElementarySet<S>> =
            self.atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a).collect();
        ElementarySet::join_all(chosen, &self.ambient).expect("atoms share the ambient")
    }

    /// Every element, indexed by its atom mask. Only sensible for small algebras.
    pub fn elements(&self) -> Vec<ElementarySet<S>> {
        (0..=self.full_mask()).map(|m| self.element(m)).collect()
    }

    /// Atoms below `set`, or `None` when `set` is not an element.
    pub fn mask_of(&self, set: &ElementarySet<S>) -> Option<AtomMask> {
        if set.ambient() != &self.ambient {
            return None;
        }
        // an element holds each atom entirely or not at all, so one probe
        // point per atom decides, and the final comparison catches non-elements
        let mut mask = 0;
        for (i, a) in self.atoms.iter().enumerate() {
            if set.contains_point(&a.interior_point().expect("atoms are nonempty")) {
                mask |= 1 << i;
            }
        }
        (self.element(mask) == *set).then_some(mask)
    }

    pub fn contains(&self, set: &ElementarySet<S>) -> bool {
        self.mask_of(set).is_some()
    }

    /// Every atom of `self` lies below an atom of `coarser` (so every element of
    /// `coarser` belongs to `self`).
    pub fn refines(&self, coarser: &FiniteAlgebra<S>) -> bool {
        self.ambient == coarser.ambient
            && coarser.atoms.iter().all(|c| self.contains(c))
    }

    /// For each atom of `self`, the index of the atom of `coarser` containing it.
    pub fn parent_atoms(&self, coarser: &FiniteAlgebra<S>) -> Result<Vec<usize>> {
        if self.ambient != coarser.ambient {
            return Err(Error::AmbientMismatch(self.ambient.to_string(), coarser.ambient.to_string()));
        }
        self.atoms
            .iter()
            .map(|a| {
                coarser
                    .atoms
                    .iter()
                    .position(|c| a.is_subset(c).unwrap_or(false))
                    .ok_or_else(|| Error::NotARefinement(format!("atom {a} lies in no coarse atom")))
            })
            .collect()
    }
}

/// The Stone space of a finite algebra: one point per atom.
#[derive(Clone, Debug)]
pub struct StoneSpace<S> {
    pub algebra: FiniteAlgebra<S>,
}

impl<S: Scalar> StoneSpace<S> {
    pub fn new(algebra: FiniteAlgebra<S>) -> Self {
        StoneSpace { algebra }
    }

    pub fn point_count(&self) -> usize {
        self.algebra.atom_count()
    }

    /// `B ↦ B*`, the set of ultrafilters (atoms) containing `B`.
    pub fn clopen(&self, set: &ElementarySet<S>) -> Result<AtomMask> {
        self.algebra.mask_of(set).ok_or_else(|| Error::NotInAlgebra(set.to_string()))
    }
}

/// `μ*` on the Stone space: the weight of each atom.
pub fn star_measure<S: Scalar>(mu: &Credence<S>, alg: &FiniteAlgebra<S>) -> Result<Vec<S>> {
    alg.atoms().iter().map(|a| mu.eval(a)).collect()
}

/// Mass of a clopen set under the atomic measure `μ*`.
pub fn star_mass<S: Scalar>(weights: &[S], mask: AtomMask) -> S {
    weights
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .fold(S::zero(), |acc, (_, w)| acc + w.clone())
}

/// `∫_{D*} f* dμ*` for a simple function whose cells are elements of `alg`.
pub fn star_integral<S: Scalar>(
    f: &SimpleFunction<S>,
    mu: &Credence<S>,
    alg: &FiniteAlgebra<S>,
    domain: &ElementarySet<S>,
) -> Result<S> {
    let weights = star_measure(mu, alg)?;
    star_integral_with_weights(f, &weights, alg, domain)
}

pub fn star_integral_with_weights<S: Scalar>(
    f: &SimpleFunction<S>,
    weights: &[S],
    alg: &FiniteAlgebra<S>,
    domain: &ElementarySet<S>,
) -> Result<S> {
    let d_mask = alg.mask_of(domain).ok_or_else(|| Error::NotInAlgebra(domain.to_string()))?;
    Ok(star_sum(&star_function(f, alg)?, weights, d_mask))
}

/// `f*` on the Stone space: for each atom, the value of the cell whose
/// clopen image holds it.
pub fn star_function<S: Scalar>(f: &SimpleFunction<S>, alg: &FiniteAlgebra<S>) -> Result<Vec<S>> {
    let mut star_values: Vec<Option<S>> = vec![None; alg.atom_count()];
    for (cell, value) in f.cells().iter().zip(f.values()) {
        let m = alg.mask_of(cell).ok_or_else(|| Error::NotSubordinate(cell.to_string()))?;
        for (i, slot) in star_values.iter_mut().enumerate() {
            if m >> i & 1 == 1 {
                *slot = Some(value.clone());
            }
        }
    }
    star_values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::NotSubordinate(format!("atom {i} uncovered"))))
        .collect()
}

/// `∫_{D*} f* dμ*` from atom values, atom weights and the mask of `D*`.
pub fn star_sum<S: Scalar>(star_values: &[S], weights: &[S], d_mask: AtomMask) -> S {
    star_values
        .iter()
        .zip(weights)
        .enumerate()
        .filter(|(i, _)| d_mask >> i & 1 == 1)
        .fold(S::zero(), |acc, (_, (v, w))| acc + v.clone() * w.clone())
}

/// The largest simple minorant of `g` subordinate to `alg`: on each atom, the
/// infimum of `g` over that atom.
pub fn atomwise_minorant<S: Scalar>(g: &PiecewiseAffine<S>, alg: &FiniteAlgebra<S>) -> Result<SimpleFunction<S>> {
    let values = alg
        .atoms()
        .iter()
        .map(|a| {
            a.intervals()
                .iter()
                .map(|iv| g.range_on(&iv.lo, &iv.hi).0)
                .min()
                .expect("atoms are nonempty")
        })
        .collect();
    let part = BPartition::new(ElementarySet::full(alg.ambient()), alg.atoms().to_vec())?;
    SimpleFunction::new(part, values)
}

/// Progress of [`refining_limit`] along a refining sequence of algebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefiningTrace<S> {
    pub values: Vec<S>,
    pub target: Option<S>,
    pub converged_at: Option<usize>,
}

impl<S: Scalar> RefiningTrace<S> {
    pub fn last(&self) -> &S {
        self.values.last().expect("at least one algebra")
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Star integrals of the atomwise minorants over a refining sequence of
/// algebras, stopping once within `eps·μ[S]` of the exact integral.
///
/// Fails with [`Error::NoConvergence`] when the exact value is available and
/// the last algebra is still too coarse.
pub fn refining_limit<S: Scalar>(
    g: &PiecewiseAffine<S>,
    mu: &Credence<S>,
    algebras: &[FiniteAlgebra<S>],
    eps: &S,
) -> Result<RefiningTrace<S>> {
    if algebras.is_empty() {
        return Err(Error::NotARefinement("empty sequence of algebras".into()));
    }
    for w in algebras.windows(2) {
        if !w[1].refines(&w[0]) {
            return Err(Error::NotARefinement("algebra does not refine its predecessor".into()));
        }
    }
    let full = ElementarySet::full(mu.ambient());
    let target = crate::integrator::integrate_exact(g, mu, &full).ok();
    let mut trace = RefiningTrace { values: Vec::new(), target: target.clone(), converged_at: None };
    for (k, alg) in algebras.iter().enumerate() {
        let f = atomwise_minorant(g, alg)?;
        let v = star_integral(&f, mu, alg, &full)?;
        trace.values.push(v.clone());
        if let Some(t) = &target {
            if t.clone() - v <= eps.clone() {
                trace.converged_at = Some(k);
                return Ok(trace);
            }
        }
    }
    if let Some(t) = target {
        let last = trace.last().clone();
        return Err(Error::NoConvergence {
            last: last.to_string(),
            gap: (t - last).to_string(),
            eps: eps.to_string(),
        });
    }
    Ok(trace)
}

/// Dyadic algebra of depth `k` on a bounded ambient: atoms are the `2^k`
/// equal subintervals.
pub fn dyadic_algebra<S: Scalar>(ambient: &Ambient<S>, depth: u32) -> Result<FiniteAlgebra<S>> {
    let (a, b) = match (ambient.lo().finite(), ambient.hi().finite()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::UnboundedAmbient(ambient.to_string())),
    };
    let n = 1i64 << depth;
    let width = (b - a.clone()) / S::from_i64(n);
    let gens: Vec<ElementarySet<S>> = (1..n)
        .map(|i| {
            let cut = a.clone() + width.clone() * S::from_i64(i);
            ElementarySet::from_pairs(&[(a.clone(), cut)], ambient)
        })
        .collect::<Result<_>>()?;
    // atoms are listed explicitly, so the element cap does not apply
    FiniteAlgebra::generate_with_cap(&gens, ambient, u128::MAX)
}

/// Simple function subordinate to `alg`, with one value per atom.
pub fn atom_function<S: Scalar>(alg: &FiniteAlgebra<S>, values: Vec<S>) -> Result<SimpleFunction<S>> {
    let part = BPartition::new(ElementarySet::full(alg.ambient()), alg.atoms().to_vec())?;
    SimpleFunction::new(part, values)
}

/// `star_integral == simple_integral` for one function and domain.
pub fn gleason_identity_holds<S: Scalar>(
    f: &SimpleFunction<S>,
    mu: &Credence<S>,
    alg: &FiniteAlgebra<S>,
    domain: &ElementarySet<S>,
) -> Result<bool> {
    Ok(star_integral(f, mu, alg, domain)? == simple_integral(f, mu, domain)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credence::Side;
    use crate::testutil::q;
    use num_rational::BigRational as Q;

    fn unit() -> Ambient<Q> {
        Ambient::open_unit()
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> ElementarySet<Q> {
        ElementarySet::from_pairs(&[(q(a.0, a.1), q(b.0, b.1))], &unit()).unwrap()
    }

    #[test]
    fn one_generator() {
        let alg = FiniteAlgebra::generate(&[iv((0, 1), (1, 2))], &unit()).unwrap();
        assert_eq!(alg.atoms(), &[iv((0, 1), (1, 2)), iv((1, 2), (1, 1))]);
        let els = alg.elements();
        assert_eq!(els.len(), 4);
        assert!(els.contains(&ElementarySet::empty(&unit())));
        assert!(els.contains(&ElementarySet::full(&unit())));
    }

    #[test]
    fn two_overlapping_generators() {
        let alg = FiniteAlgebra::generate(&[iv((0, 1), (1, 2)), iv((1, 4), (3, 4))], &unit()).unwrap();
        assert_eq!(
            alg.atoms(),
            &[iv((0, 1), (1, 4)), iv((1, 4), (1, 2)), iv((1, 2), (3, 4)), iv((3, 4), (1, 1))]
        );
    }

    #[test]
    fn no_generators() {
        let alg = FiniteAlgebra::<Q>::generate(&[], &unit()).unwrap();
        assert_eq!(alg.elements().len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let gens: Vec<_> = (1..20).map(|k| iv((0, 1), (k, 20))).collect();
        let err = FiniteAlgebra::generate(&gens, &unit()).unwrap_err();
        assert!(matches!(err, Error::ClosureTooLarge { .. }));
    }

    #[test]
    fn star_measure_examples() {
        let alg = FiniteAlgebra::generate(&[iv((0, 1), (1, 2))], &unit()).unwrap();
        let leb = Credence::lebesgue(&unit()).unwrap();
        assert_eq!(star_measure(&leb, &alg).unwrap(), vec![q(1, 2), q(1, 2)]);
        let pm = Credence::point_mass(&unit(), q(1, 2), Side::Right).unwrap();
        assert_eq!(star_measure(&pm, &alg).unwrap(), vec![q(0, 1), q(1, 1)]);
        let table = Credence::atom_table(alg.clone(), vec![q(1, 3), q(2, 3)]).unwrap();
        assert_eq!(star_measure(&table, &alg).unwrap(), vec![q(1, 3), q(2, 3)]);
    }

    #[test]
    fn star_integral_examples() {
        let alg = FiniteAlgebra::generate(&[iv((0, 1), (1, 2))], &unit()).unwrap();
        let leb = Credence::lebesgue(&unit()).unwrap();
        let one = atom_function(&alg, vec![q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(star_integral(&one, &leb, &alg, &ElementarySet::full(&unit())).unwrap(), q(1, 1));
        let f = atom_function(&alg, vec![q(1, 1), q(3, 1)]).unwrap();
        let full = ElementarySet::full(&unit());
        assert_eq!(star_integral(&f, &leb, &alg, &full).unwrap(), q(2, 1));
        assert_eq!(simple_integral(&f, &leb, &full).unwrap(), q(2, 1));
        assert_eq!(star_integral(&f, &leb, &alg, &iv((0, 1), (1, 2))).unwrap(), q(1, 2));
    }

    #[test]
    fn star_integral_rejects_foreign_cells() {
        let alg = FiniteAlgebra::generate(&[iv((0, 1), (1, 2))], &unit()).unwrap();
        let other = FiniteAlgebra::generate(&[iv((0, 1), (1, 3))], &unit()).unwrap();
        let f = atom_function(&other, vec![q(1, 1), q(0, 1)]).unwrap();
        let leb = Credence::lebesgue(&unit()).unwrap();
        let err = star_integral(&f, &leb, &alg, &ElementarySet::full(&unit())).unwrap_err();
        assert!(matches!(err, Error::NotSubordinate(_)));
    }

    #[test]
    fn refining_limit_constant_converges_immediately() {
        let leb = Credence::lebesgue(&unit()).unwrap();
        let algs: Vec<_> = (1..4).map(|k| dyadic_algebra(&unit(), k).unwrap()).collect();
        let g = PiecewiseAffine::constant(q(3, 7));
        let tr = refining_limit(&g, &leb, &algs, &q(1, 1000)).unwrap();
        assert_eq!(tr.converged_at, Some(0));
        assert_eq!(tr.last(), &q(3, 7));
    }

    #[test]
    fn refining_limit_dyadic_values() {
        let leb = Credence::lebesgue(&unit()).unwrap();
        let algs: Vec<_> = (1..=6).map(|k| dyadic_algebra(&unit(), k).unwrap()).collect();
        let id = PiecewiseAffine::affine(q(1, 1), q(0, 1), q(0, 1), q(1, 1)).unwrap();
        let err = refining_limit(&id, &leb, &algs, &q(1, 1000)).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
        let tr = refining_limit(&id, &leb, &algs, &q(1, 64)).unwrap();
        // depth k gives 1/2 - 2^-(k+1)
        for (i, v) in tr.values.iter().enumerate() {
            assert_eq!(*v, q(1, 2) - <Q as Scalar>::pow2_inv(i as u32 + 2));
        }
        assert!(tr.is_monotone());
        assert_eq!(tr.converged_at, Some(4));
    }
}
