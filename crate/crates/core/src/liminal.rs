//! Liminal decomposition of mixtures of length and point germs on `[a,b]`.
//!
//! Such a credence splits into a Borel part `ν` (a multiple of normalized
//! length plus finitely many atoms) and, for each atom, the shares of its mass
//! carried by the left and right germs. A set `R` then receives
//! `ν(R) + Σ_{x∈∂R} φ_R(x) ν{x}`, where `φ_R(x)` is the share of the sides of
//! `x` that lie in `R`.

use std::collections::BTreeMap;

use crate::credence::{Credence, DensityPiece, End, Rule, Side};
use crate::elementary::{Ambient, AmbientKind, ElementarySet};
use crate::error::{Error, Result};
use crate::integrator::{integrate_exact, BPartition};
use crate::piecewise::PiecewiseAffine;
use crate::scalar::Scalar;
use crate::stone::FiniteAlgebra;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom<S> {
    pub x: S,
    pub mass: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorelPart<S> {
    pub lebesgue_weight: S,
    pub atoms: Vec<Atom<S>>,
}

/// Left and right shares at an atom; they sum to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shares<S> {
    pub x: S,
    pub left: S,
    pub right: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiminalRule<S> {
    pub shares: Vec<Shares<S>>,
}

impl<S: Scalar> LiminalRule<S> {
    pub fn at(&self, x: &S) -> Option<&Shares<S>> {
        self.shares.iter().find(|s| s.x == *x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition<S> {
    pub ambient: Ambient<S>,
    pub borel: BorelPart<S>,
    pub rule: LiminalRule<S>,
}

/// Split a mixture of length, point germs and end germs on a closed interval.
pub fn decompose<S: Scalar>(mu: &Credence<S>) -> Result<Decomposition<S>> {
    let amb = mu.ambient();
    if amb.kind() != AmbientKind::Closed {
        return Err(Error::UnsupportedRule(format!("decomposition needs a compact ambient, got {amb}; compactify first")));
    }
    let (a, b) = (amb.lo().finite().expect("closed").clone(), amb.hi().finite().expect("closed").clone());
    let mut lebesgue_weight = S::zero();
    // x -> (left weight, right weight)
    let mut sides: BTreeMap<S, (S, S)> = BTreeMap::new();
    for (w, leaf) in mu.flatten() {
        let (x, side) = match leaf.rule() {
            Rule::Lebesgue => {
                lebesgue_weight = lebesgue_weight + w;
                continue;
            }
            Rule::PointMass { x, side } => (x.clone(), *side),
            Rule::EndMass(End::AmbientLeft) => (a.clone(), Side::Right),
            Rule::EndMass(End::AmbientRight) => (b.clone(), Side::Left),
            other => return Err(Error::UnsupportedRule(format!("{} in a liminal decomposition", rule_name(other)))),
        };
        let e = sides.entry(x).or_insert((S::zero(), S::zero()));
        match side {
            Side::Left => e.0 = e.0.clone() + w,
            Side::Right => e.1 = e.1.clone() + w,
        }
    }
    let mut atoms = Vec::new();
    let mut shares = Vec::new();
    for (x, (l, r)) in sides {
        let mass = l.clone() + r.clone();
        atoms.push(Atom { x: x.clone(), mass: mass.clone() });
        shares.push(Shares { x, left: l / mass.clone(), right: r / mass });
    }
    Ok(Decomposition { ambient: amb.clone(), borel: BorelPart { lebesgue_weight, atoms }, rule: LiminalRule { shares } })
}

fn rule_name<S>(rule: &Rule<S>) -> &'static str {
    match rule {
        Rule::Lebesgue => "lebesgue",
        Rule::PointMass { .. } => "point_mass",
        Rule::EndMass(_) => "end germ at infinity",
        Rule::AtomTable { .. } => "atom_table",
        Rule::Density(_) => "density",
        Rule::Mixture(_) => "mixture",
    }
}

/// `φ_R(x)`: the share of the sides of `x` lying in `R`.
pub fn share_into<S: Scalar>(shares: &Shares<S>, r: &ElementarySet<S>) -> S {
    let mut s = S::zero();
    if r.has_left_germ(&shares.x) {
        s = s + shares.left.clone();
    }
    if r.has_right_germ(&shares.x) {
        s = s + shares.right.clone();
    }
    s
}

impl<S: Scalar> Decomposition<S> {
    fn length_fraction(&self, r: &ElementarySet<S>) -> S {
        r.length().expect("compact ambient") / self.ambient.length().expect("compact ambient")
    }

    /// `ν(R) + ∫_{∂R} φ_R dν`.
    pub fn mass(&self, r: &ElementarySet<S>) -> S {
        self.weighted(r, |_| S::one())
    }

    /// `∫_R g dν + ∫_{∂R} g φ_R dν`.
    pub fn integral(&self, g: &PiecewiseAffine<S>, r: &ElementarySet<S>) -> S {
        let total = self.ambient.length().expect("compact ambient");
        let smooth = self.borel.lebesgue_weight.clone() * g.integral_over(r).expect("compact ambient") / total;
        smooth + self.atom_terms(r, |x| g.eval(x))
    }

    fn weighted(&self, r: &ElementarySet<S>, f: impl Fn(&S) -> S) -> S {
        self.borel.lebesgue_weight.clone() * self.length_fraction(r) + self.atom_terms(r, f)
    }

    fn atom_terms(&self, r: &ElementarySet<S>, f: impl Fn(&S) -> S) -> S {
        let boundary = r.boundary().points;
        let mut total = S::zero();
        for (atom, sh) in self.borel.atoms.iter().zip(&self.rule.shares) {
            let factor = if boundary.contains(&atom.x) {
                share_into(sh, r)
            } else if r.contains_point(&atom.x) {
                S::one()
            } else {
                S::zero()
            };
            total = total + f(&atom.x) * atom.mass.clone() * factor;
        }
        total
    }

    /// The consistency condition: shares at each atom over the cells of a
    /// partition of the whole space sum to one.
    pub fn consistent_on(&self, part: &BPartition<S>) -> bool {
        self.rule.shares.iter().all(|sh| {
            part.cells().iter().fold(S::zero(), |acc, c| acc + share_into(sh, c)) == S::one()
        })
    }
}

/// `μ[R] = ν(R) + ∫_{∂R} φ_R dν`, exact.
pub fn verify_mass_identity<S: Scalar>(mu: &Credence<S>, dec: &Decomposition<S>, r: &ElementarySet<S>) -> Result<bool> {
    Ok(mu.eval(r)? == dec.mass(r))
}

/// `𝕀_R[g] = ∫_R g dν + ∫_{∂R} g φ_R dν`, exact.
pub fn verify_integral_identity<S: Scalar>(
    mu: &Credence<S>,
    dec: &Decomposition<S>,
    g: &PiecewiseAffine<S>,
    r: &ElementarySet<S>,
) -> Result<bool> {
    Ok(integrate_exact(g, mu, r)? == dec.integral(g, r))
}

/// Transport a credence on `(a,b)` to `[a,b]` through `R̄ ↦ R̄ ∩ (a,b)`.
/// End germs become inward point masses. Compact input is returned as is.
pub fn compactify<S: Scalar>(mu: &Credence<S>) -> Result<Credence<S>> {
    let amb = mu.ambient();
    if amb.kind() == AmbientKind::Closed {
        return Ok(mu.clone());
    }
    if !amb.is_bounded() || amb.kind() != AmbientKind::Open {
        return Err(Error::UnboundedAmbient(amb.to_string()));
    }
    let closed = amb.compactified()?;
    let (a, b) = (amb.lo().finite().expect("bounded").clone(), amb.hi().finite().expect("bounded").clone());
    Ok(match mu.rule() {
        Rule::Lebesgue => Credence::lebesgue(&closed)?,
        Rule::PointMass { x, side } => Credence::point_mass(&closed, x.clone(), *side)?,
        Rule::EndMass(End::AmbientLeft) => Credence::point_mass(&closed, a, Side::Right)?,
        Rule::EndMass(End::AmbientRight) => Credence::point_mass(&closed, b, Side::Left)?,
        Rule::EndMass(_) => return Err(Error::UnboundedAmbient(amb.to_string())),
        Rule::Density(pieces) => Credence::density(&closed, pieces.iter().map(DensityPiece::clone).collect())?,
        Rule::AtomTable { algebra, weights } => {
            let atoms = algebra.atoms().iter().map(|x| x.extend()).collect::<Result<Vec<_>>>()?;
            let alg = FiniteAlgebra::from_atoms(&atoms, &closed)?;
            let w = alg
                .atoms()
                .iter()
                .map(|x| weights[atoms.iter().position(|y| y == x).expect("same atoms")].clone())
                .collect();
            Credence::atom_table(alg, w)?
        }
        Rule::Mixture(parts) => Credence::mixture(
            parts.iter().map(|(w, c)| Ok((w.clone(), compactify(c)?))).collect::<Result<Vec<_>>>()?,
        )?,
    })
}

/// `μ̄(R̄) = μ(R̄ ∩ (a,b))` for one set `R` of the open ambient.
pub fn compactification_agrees<S: Scalar>(mu: &Credence<S>, bar: &Credence<S>, r: &ElementarySet<S>) -> Result<bool> {
    Ok(mu.eval(r)? == bar.eval(&r.extend()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{q, qx};
    use num_rational::BigRational as Q;
    use num_traits::Zero;

    fn sym() -> Ambient<Q> {
        Ambient::closed(q(-1, 1), q(1, 1)).unwrap()
    }

    fn shared(amb: &Ambient<Q>, pm: Q, pp: Q) -> Credence<Q> {
        let mut inner = Vec::new();
        if !pm.is_zero() {
            inner.push((pm, Credence::point_mass(amb, q(0, 1), Side::Left).unwrap()));
        }
        if !pp.is_zero() {
            inner.push((pp, Credence::point_mass(amb, q(0, 1), Side::Right).unwrap()));
        }
        Credence::mixture(vec![
            (q(1, 2), Credence::lebesgue(amb).unwrap()),
            (q(1, 2), Credence::mixture(inner).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&Credence::lebesgue(&sym()).unwrap()).unwrap();
        assert_eq!(d.borel, BorelPart { lebesgue_weight: q(1, 1), atoms: vec![] });
        assert!(d.rule.shares.is_empty());

        let d = decompose(&shared(&sym(), q(1, 3), q(2, 3))).unwrap();
        assert_eq!(d.borel.lebesgue_weight, q(1, 2));
        assert_eq!(d.borel.atoms, vec![Atom { x: q(0, 1), mass: q(1, 2) }]);
        assert_eq!(d.rule.shares, vec![Shares { x: q(0, 1), left: q(1, 3), right: q(2, 3) }]);

        let d = decompose(&Credence::point_mass(&sym(), q(1, 4), Side::Right).unwrap()).unwrap();
        assert_eq!(d.rule.shares, vec![Shares { x: q(1, 4), left: q(0, 1), right: q(1, 1) }]);

        let open = Ambient::open(qx(0, 1), qx(1, 1)).unwrap();
        assert!(matches!(decompose(&Credence::lebesgue(&open).unwrap()), Err(Error::UnsupportedRule(_))));
    }

    #[test]
    fn mass_identity_examples() {
        for (pm, pp) in [(q(1, 1), q(0, 1)), (q(2, 3), q(1, 3)), (q(1, 2), q(1, 2)), (q(0, 1), q(1, 1))] {
            let mu = shared(&sym(), pm, pp.clone());
            let d = decompose(&mu).unwrap();
            assert!(verify_mass_identity(&mu, &d, &ElementarySet::full(&sym())).unwrap());
            let eps = q(1, 9);
            let r = ElementarySet::from_pairs(&[(q(0, 1), eps.clone())], &sym()).unwrap();
            // normalized length on [-1,1] halves ε
            assert_eq!(d.mass(&r), (eps / q(2, 1) + pp) / q(2, 1));
            assert!(verify_mass_identity(&mu, &d, &r).unwrap());
        }
    }

    #[test]
    fn integral_identity_examples() {
        let unit = Ambient::closed_unit();
        let pm = Credence::point_mass(&unit, q(0, 1), Side::Right).unwrap();
        let d = decompose(&pm).unwrap();
        let g = PiecewiseAffine::affine(q(-1, 1), q(1, 1), q(0, 1), q(1, 1)).unwrap();
        let r = ElementarySet::from_pairs(&[(q(0, 1), q(1, 1))], &unit).unwrap();
        assert_eq!(d.integral(&g, &r), q(1, 1));
        assert!(verify_integral_identity(&pm, &d, &g, &r).unwrap());

        let leb = Credence::lebesgue(&unit).unwrap();
        let d = decompose(&leb).unwrap();
        let id = PiecewiseAffine::affine(q(1, 1), q(0, 1), q(0, 1), q(1, 1)).unwrap();
        let half = ElementarySet::from_pairs(&[(q(0, 1), q(1, 2))], &unit).unwrap();
        assert_eq!(d.integral(&id, &half), q(1, 8));
        assert!(verify_integral_identity(&leb, &d, &id, &half).unwrap());
    }

    #[test]
    fn compactify_examples() {
        let open = Ambient::open(qx(0, 1), qx(1, 1)).unwrap();
        let end = Credence::end_mass(&open, End::AmbientLeft).unwrap();
        let bar = compactify(&end).unwrap();
        assert_eq!(bar, Credence::point_mass(&Ambient::closed_unit(), q(0, 1), Side::Right).unwrap());
        let d = decompose(&bar).unwrap();
        // nothing is left for the interior: the Borel part lives on the end point
        assert_eq!(d.borel.lebesgue_weight, q(0, 1));
        assert_eq!(d.borel.atoms, vec![Atom { x: q(0, 1), mass: q(1, 1) }]);

        let leb = Credence::lebesgue(&open).unwrap();
        let lbar = compactify(&leb).unwrap();
        for (a, b) in [(0, 1), (1, 3), (1, 2)] {
            let r = ElementarySet::from_pairs(&[(q(a, 4), q(b + 1, 4))], &open).unwrap();
            assert!(compactification_agrees(&leb, &lbar, &r).unwrap());
            assert!(compactification_agrees(&end, &bar, &r).unwrap());
        }
        assert_eq!(compactify(&lbar).unwrap(), lbar);
    }

    #[test]
    fn consistency_on_partitions() {
        let mu = shared(&sym(), q(1, 4), q(3, 4));
        let d = decompose(&mu).unwrap();
        let full = ElementarySet::full(&sym());
        let cells = vec![
            ElementarySet::from_pairs(&[(q(-1, 1), q(0, 1))], &sym()).unwrap(),
            ElementarySet::from_pairs(&[(q(0, 1), q(1, 2))], &sym()).unwrap(),
            ElementarySet::from_pairs(&[(q(1, 2), q(1, 1))], &sym()).unwrap(),
        ];
        assert!(d.consistent_on(&BPartition::new(full.clone(), cells).unwrap()));
        assert!(d.consistent_on(&BPartition::trivial(full)));
    }
}
