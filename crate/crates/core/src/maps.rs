//! Monotone piecewise-affine maps between interval ambients.
//!
//! A strictly monotone continuous map is open onto its image, so preimages of
//! elementary sets are elementary and `φ⁻¹` is a Boolean homomorphism. This is
//! what lets a credence be pushed forward along the map.

use std::cmp::{max, min};

use crate::credence::{Credence, DensityPiece, End, Rule, Side};
use crate::elementary::{Ambient, AmbientKind, ElementarySet};
use crate::error::{Error, Result};
use crate::integrator::integrate;
use crate::integrator::integrate_exact;
use crate::piecewise::PiecewiseAffine;
use crate::scalar::{Extended, Scalar};
use crate::stone::FiniteAlgebra;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonotoneAffineMap<S> {
    domain: Ambient<S>,
    codomain: Ambient<S>,
    graph: PiecewiseAffine<S>,
    increasing: bool,
}

impl<S: Scalar> MonotoneAffineMap<S> {
    /// The domain is `(x_0, x_k)` (or `[x_0, x_k]` when `closed`), spanned by the
    /// outer breakpoints of `graph`.
    ///
    /// An open domain may map into any codomain whose closure holds the image.
    /// A closed domain needs a closed codomain equal to the image, since the
    /// image of `[a,b]` is only open in itself.
    pub fn new(graph: PiecewiseAffine<S>, codomain: Ambient<S>, closed: bool) -> Result<Self> {
        let increasing = graph
            .strict_monotonicity()
            .ok_or_else(|| Error::InvalidMap("graph is not strictly monotone".into()))?;
        let xs = graph.breakpoints();
        let (a, b) = (xs[0].clone(), xs[xs.len() - 1].clone());
        let domain = if closed { Ambient::closed(a, b)? } else { Ambient::open(a.into(), b.into())? };
        let map = MonotoneAffineMap { domain, codomain, graph, increasing };
        let (lo, hi) = map.image_bounds();
        let ok = if closed {
            map.codomain.kind() == AmbientKind::Closed
                && *map.codomain.lo() == Extended::Finite(lo)
                && *map.codomain.hi() == Extended::Finite(hi)
        } else {
            map.codomain.closure_contains(&lo) && map.codomain.closure_contains(&hi)
        };
        if !ok {
            return Err(Error::InvalidMap(format!("image does not fit the codomain {}", map.codomain)));
        }
        Ok(map)
    }

    /// `x ↦ slope·x + intercept` on `(lo, hi)`.
    pub fn affine(slope: S, intercept: S, lo: S, hi: S, codomain: Ambient<S>) -> Result<Self> {
        Self::new(PiecewiseAffine::affine(slope, intercept, lo, hi)?, codomain, false)
    }

    pub fn identity(ambient: &Ambient<S>) -> Result<Self> {
        let (a, b) = finite_ends(ambient)?;
        let graph = PiecewiseAffine::new(vec![a.clone(), b.clone()], vec![a, b])?;
        Self::new(graph, ambient.clone(), ambient.is_closed())
    }

    pub fn domain(&self) -> &Ambient<S> {
        &self.domain
    }

    pub fn codomain(&self) -> &Ambient<S> {
        &self.codomain
    }

    pub fn graph(&self) -> &PiecewiseAffine<S> {
        &self.graph
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn apply(&self, x: &S) -> S {
        self.graph.eval(x)
    }

    fn image_bounds(&self) -> (S, S) {
        let ys = self.graph.values();
        let (first, last) = (ys[0].clone(), ys[ys.len() - 1].clone());
        if self.increasing {
            (first, last)
        } else {
            (last, first)
        }
    }

    /// The inverse graph, defined on the image.
    fn inverse_graph(&self) -> PiecewiseAffine<S> {
        let mut pts: Vec<(S, S)> =
            self.graph.values().iter().cloned().zip(self.graph.breakpoints().iter().cloned()).collect();
        pts.sort();
        let (ys, xs) = pts.into_iter().unzip();
        PiecewiseAffine::new(ys, xs).expect("strictly monotone graph")
    }

    /// The inverse map; needs the image to be the whole codomain.
    pub fn inverse(&self) -> Result<MonotoneAffineMap<S>> {
        let (lo, hi) = self.image_bounds();
        if *self.codomain.lo() != Extended::Finite(lo) || *self.codomain.hi() != Extended::Finite(hi) {
            return Err(Error::InvalidMap("map is not onto its codomain".into()));
        }
        MonotoneAffineMap::new(self.inverse_graph(), self.domain.clone(), self.domain.is_closed())
    }

    /// `φ⁻¹(B)`, exact.
    pub fn preimage(&self, b: &ElementarySet<S>) -> Result<ElementarySet<S>> {
        self.codomain.check_same(b.ambient())?;
        let inv = self.inverse_graph();
        let (lo, hi) = self.image_bounds();
        let (lo, hi) = (Extended::Finite(lo), Extended::Finite(hi));
        let mut pieces = Vec::new();
        for iv in b.intervals() {
            let l = max(iv.lo.clone(), lo.clone());
            let h = min(iv.hi.clone(), hi.clone());
            if l >= h {
                continue;
            }
            let (xl, xh) = (inv.eval_ext(&l), inv.eval_ext(&h));
            let (p, q) = if xl < xh { (xl, xh) } else { (xh, xl) };
            pieces.push((Extended::Finite(p), Extended::Finite(q)));
        }
        Ok(ElementarySet::regularize_clipped(pieces, &self.domain))
    }

    /// `φ(E)`, exact; open in the codomain because the map is open.
    pub fn image(&self, e: &ElementarySet<S>) -> Result<ElementarySet<S>> {
        self.domain.check_same(e.ambient())?;
        let pieces = e.intervals().iter().map(|iv| {
            let (yl, yh) = (self.graph.eval_ext(&iv.lo), self.graph.eval_ext(&iv.hi));
            let (p, q) = if yl < yh { (yl, yh) } else { (yh, yl) };
            (Extended::Finite(p), Extended::Finite(q))
        });
        Ok(ElementarySet::regularize_clipped(pieces.collect::<Vec<_>>(), &self.codomain))
    }

    /// `int(φ⁻¹[clos B])`; agrees with [`preimage`](Self::preimage) for monotone maps.
    pub fn copreimage(&self, b: &ElementarySet<S>) -> Result<ElementarySet<S>> {
        copreimage(&self.graph, &self.domain, b)
    }

    /// `ψ ∘ φ` where `self = φ` and `next = ψ`.
    pub fn then(&self, next: &MonotoneAffineMap<S>) -> Result<MonotoneAffineMap<S>> {
        self.codomain.check_same(&next.domain)?;
        let composite = next.graph.compose(&self.graph);
        let xs = self.graph.breakpoints();
        // keep only the breakpoints spanning the domain
        let (a, b) = (&xs[0], &xs[xs.len() - 1]);
        let (bx, by): (Vec<S>, Vec<S>) = composite
            .breakpoints()
            .iter()
            .zip(composite.values())
            .filter(|(x, _)| a <= *x && *x <= b)
            .map(|(x, y)| (x.clone(), y.clone()))
            .unzip();
        MonotoneAffineMap::new(PiecewiseAffine::new(bx, by)?, next.codomain.clone(), self.domain.is_closed())
    }

    /// `ν[B] := μ[φ⁻¹(B)]` as a credence on the codomain, in canonical form:
    /// transported germs stay germs, length becomes a piecewise-uniform density
    /// (or plain length when uniform over the codomain).
    pub fn pushforward(&self, mu: &Credence<S>) -> Result<Credence<S>> {
        self.domain.check_same(mu.ambient())?;
        match mu.rule() {
            Rule::Lebesgue => {
                let (a, b) = finite_ends(&self.domain)?;
                self.push_density(&[DensityPiece { lo: a, hi: b, mass: S::one() }])
            }
            Rule::Density(pieces) => self.push_density(pieces),
            Rule::PointMass { x, side } => {
                let side = if self.increasing { *side } else { side.flip() };
                self.germ_at(self.apply(x), side)
            }
            Rule::EndMass(end) => {
                let (x, side) = match end {
                    End::AmbientLeft => (finite_ends(&self.domain)?.0, Side::Right),
                    End::AmbientRight => (finite_ends(&self.domain)?.1, Side::Left),
                    _ => return Err(Error::UnsupportedRule("end germ at infinity on a bounded domain".into())),
                };
                let side = if self.increasing { side } else { side.flip() };
                self.germ_at(self.apply(&x), side)
            }
            Rule::AtomTable { algebra, weights } => {
                let mut atoms = Vec::new();
                let mut w = Vec::new();
                for (atom, wt) in algebra.atoms().iter().zip(weights) {
                    atoms.push(self.image(atom)?);
                    w.push(wt.clone());
                }
                let rest = ElementarySet::join_all(&atoms, &self.codomain)?.neg();
                if !rest.is_empty() {
                    atoms.push(rest);
                    w.push(S::zero());
                }
                let alg = FiniteAlgebra::from_atoms(&atoms, &self.codomain)?;
                // from_atoms sorts the atoms; reorder the weights to match
                let sorted = alg
                    .atoms()
                    .iter()
                    .map(|a| w[atoms.iter().position(|b| b == a).expect("same atoms")].clone())
                    .collect();
                Credence::atom_table(alg, sorted)
            }
            Rule::Mixture(parts) => {
                let pushed = parts
                    .iter()
                    .map(|(w, c)| Ok((w.clone(), self.pushforward(c)?)))
                    .collect::<Result<Vec<_>>>()?;
                Credence::mixture(pushed)
            }
        }
    }

    fn germ_at(&self, y: S, side: Side) -> Result<Credence<S>> {
        let cod = &self.codomain;
        let at_lo = *cod.lo() == Extended::Finite(y.clone()) && side == Side::Right;
        let at_hi = *cod.hi() == Extended::Finite(y.clone()) && side == Side::Left;
        if !cod.is_closed() && at_lo {
            return Credence::end_mass(cod, End::AmbientLeft);
        }
        if !cod.is_closed() && at_hi {
            return Credence::end_mass(cod, End::AmbientRight);
        }
        Credence::point_mass(cod, y, side)
    }

    fn push_density(&self, pieces: &[DensityPiece<S>]) -> Result<Credence<S>> {
        let xs = self.graph.breakpoints();
        let mut out = Vec::new();
        for p in pieces {
            for w in xs.windows(2) {
                let l = max(&p.lo, &w[0]).clone();
                let h = min(&p.hi, &w[1]).clone();
                if l >= h {
                    continue;
                }
                let mass = p.mass.clone() * (h.clone() - l.clone()) / (p.hi.clone() - p.lo.clone());
                let (yl, yh) = (self.apply(&l), self.apply(&h));
                let (lo, hi) = if yl < yh { (yl, yh) } else { (yh, yl) };
                out.push(DensityPiece { lo, hi, mass });
            }
        }
        canonical_density(&self.codomain, out)
    }
}

fn finite_ends<S: Scalar>(ambient: &Ambient<S>) -> Result<(S, S)> {
    match (ambient.lo().finite(), ambient.hi().finite()) {
        (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        _ => Err(Error::UnboundedAmbient(ambient.to_string())),
    }
}

/// Drop empty pieces, merge neighbours of equal density, and collapse a single
/// piece spanning the ambient to plain length.
fn canonical_density<S: Scalar>(ambient: &Ambient<S>, mut pieces: Vec<DensityPiece<S>>) -> Result<Credence<S>> {
    pieces.retain(|p| !p.mass.is_zero());
    pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut merged: Vec<DensityPiece<S>> = Vec::new();
    for p in pieces {
        if let Some(last) = merged.last_mut() {
            let same = last.hi == p.lo
                && last.mass.clone() * (p.hi.clone() - p.lo.clone()) == p.mass.clone() * (last.hi.clone() - last.lo.clone());
            if same {
                last.hi = p.hi;
                last.mass = last.mass.clone() + p.mass;
                continue;
            }
        }
        merged.push(p);
    }
    if merged.len() == 1
        && Extended::Finite(merged[0].lo.clone()) == *ambient.lo()
        && Extended::Finite(merged[0].hi.clone()) == *ambient.hi()
    {
        return Credence::lebesgue(ambient);
    }
    Credence::density(ambient, merged)
}

/// `φ^←(B) = int(φ⁻¹[clos B])` for any continuous piecewise-affine map on `domain`.
pub fn copreimage<S: Scalar>(
    graph: &PiecewiseAffine<S>,
    domain: &Ambient<S>,
    b: &ElementarySet<S>,
) -> Result<ElementarySet<S>> {
    let ranges: Vec<(Extended<S>, Extended<S>)> =
        b.intervals().iter().map(|iv| (iv.lo.clone(), iv.hi.clone())).collect();
    Ok(graph.interior_preimage(&ranges, domain))
}

/// `(ψ∘φ)^←(¬C) ⊆ ¬(ψ∘φ)^←(C)`.
pub fn preserves_negation<S: Scalar>(
    graph: &PiecewiseAffine<S>,
    domain: &Ambient<S>,
    c: &ElementarySet<S>,
) -> Result<bool> {
    let lhs = copreimage(graph, domain, &c.neg())?;
    let rhs = copreimage(graph, domain, c)?.neg();
    lhs.is_subset(&rhs)
}

/// A continuous non-open map with a plateau on `(1/3, 2/3)` at the boundary
/// value `1/2` of `C = (0, 1/2)`, on which negation preservation fails.
pub fn plateau_witness<S: Scalar>() -> (PiecewiseAffine<S>, Ambient<S>, ElementarySet<S>) {
    let graph = PiecewiseAffine::new(
        vec![S::zero(), S::ratio(1, 3), S::ratio(2, 3), S::one()],
        vec![S::zero(), S::ratio(1, 2), S::ratio(1, 2), S::one()],
    )
    .expect("valid breakpoints");
    let unit = Ambient::open_unit();
    let c = ElementarySet::from_pairs(&[(S::zero(), S::ratio(1, 2))], &unit).expect("inside the unit interval");
    (graph, unit, c)
}

/// Both sides of `𝕀^μ_A[g∘φ] = 𝕀^ν_B[g]` with `A = φ⁻¹(B)`, `ν` the push-forward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChangeOfVariables<S> {
    pub lhs_exact: S,
    pub rhs_exact: S,
    pub lhs_approx: S,
    pub rhs_approx: S,
    pub eps: S,
}

impl<S: Scalar> ChangeOfVariables<S> {
    pub fn exact_holds(&self) -> bool {
        self.lhs_exact == self.rhs_exact
    }

    /// The approximate sides agree within `2·eps`.
    pub fn approx_holds(&self) -> bool {
        (self.lhs_approx.clone() - self.rhs_approx.clone()).abs() <= S::two() * self.eps.clone()
    }

    pub fn holds(&self) -> bool {
        self.exact_holds() && self.approx_holds()
    }
}

pub fn change_of_variables_check<S: Scalar>(
    phi: &MonotoneAffineMap<S>,
    mu: &Credence<S>,
    g: &PiecewiseAffine<S>,
    b: &ElementarySet<S>,
    eps: &S,
) -> Result<ChangeOfVariables<S>> {
    let a = phi.preimage(b)?;
    let nu = phi.pushforward(mu)?;
    let pulled = g.compose(phi.graph());
    Ok(ChangeOfVariables {
        lhs_exact: integrate_exact(&pulled, mu, &a)?,
        rhs_exact: integrate_exact(g, &nu, b)?,
        lhs_approx: integrate(&pulled, mu, &a, eps)?,
        rhs_approx: integrate(g, &nu, b, eps)?,
        eps: eps.clone(),
    })
}
