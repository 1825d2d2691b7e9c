//! Finitely additive credences on the elementary algebra.
//!
//! A [`Credence`] is a rule evaluated exactly on elementary sets. The rules
//! cover normalized length, the one-sided germs that model ultrafilters fixed
//! at a point, germs at the ends of the ambient (free ultrafilters), atom tables
//! on finite subalgebras, piecewise-uniform densities and finite mixtures.
//!
//! Every ultrafilter of the elementary algebra fixed at `x` contains either all
//! sets holding some `(x-ε, x)` or all sets holding some `(x, x+ε)`, so two
//! sides per point suffice.

use crate::elementary::{Ambient, AmbientKind, ElementarySet, Interval};
use crate::error::{Error, Result};
use crate::integrator::BPartition;
use crate::scalar::{Extended, Scalar};
use crate::stone::FiniteAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum End {
    NegInf,
    PosInf,
    AmbientLeft,
    AmbientRight,
}

/// A piece of a piecewise-uniform density: `mass` spread evenly over `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensityPiece<S> {
    pub lo: S,
    pub hi: S,
    pub mass: S,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule<S> {
    Lebesgue,
    PointMass { x: S, side: Side },
    EndMass(End),
    AtomTable { algebra: FiniteAlgebra<S>, weights: Vec<S> },
    Density(Vec<DensityPiece<S>>),
    Mixture(Vec<(S, Credence<S>)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Credence<S> {
    ambient: Ambient<S>,
    rule: Rule<S>,
}

impl<S: Scalar> Credence<S> {
    pub fn lebesgue(ambient: &Ambient<S>) -> Result<Self> {
        if !ambient.is_bounded() {
            return Err(Error::Unnormalizable(ambient.to_string()));
        }
        Ok(Credence { ambient: ambient.clone(), rule: Rule::Lebesgue })
    }

    /// Germ of `(x, x+ε)` (side `Right`) or `(x-ε, x)` (side `Left`).
    pub fn point_mass(ambient: &Ambient<S>, x: S, side: Side) -> Result<Self> {
        if !ambient.closure_contains(&x) {
            return Err(Error::InvalidCredence(format!("point {x} outside {ambient}")));
        }
        let ex = Extended::Finite(x.clone());
        let points_out = match side {
            Side::Left => ex == *ambient.lo(),
            Side::Right => ex == *ambient.hi(),
        };
        if points_out {
            return Err(Error::InvalidCredence(format!("germ at {x} on side {side:?} leaves {ambient}")));
        }
        Ok(Credence { ambient: ambient.clone(), rule: Rule::PointMass { x, side } })
    }

    pub fn end_mass(ambient: &Ambient<S>, end: End) -> Result<Self> {
        let ok = match end {
            End::NegInf => *ambient.lo() == Extended::NegInf,
            End::PosInf => *ambient.hi() == Extended::PosInf,
            End::AmbientLeft => ambient.lo().is_finite(),
            End::AmbientRight => ambient.hi().is_finite(),
        };
        if !ok {
            return Err(Error::InvalidCredence(format!("{end:?} is not an end of {ambient}")));
        }
        Ok(Credence { ambient: ambient.clone(), rule: Rule::EndMass(end) })
    }

    pub fn atom_table(algebra: FiniteAlgebra<S>, weights: Vec<S>) -> Result<Self> {
        if weights.len() != algebra.atom_count() {
            return Err(Error::InvalidCredence(format!(
                "{} weights for {} atoms",
                weights.len(),
                algebra.atom_count()
            )));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidCredence("negative atom weight".into()));
        }
        let total = weights.iter().fold(S::zero(), |a, w| a + w.clone());
        if total != S::one() {
            return Err(Error::InvalidCredence(format!("atom weights sum to {total}")));
        }
        Ok(Credence { ambient: algebra.ambient().clone(), rule: Rule::AtomTable { algebra, weights } })
    }

    pub fn density(ambient: &Ambient<S>, mut pieces: Vec<DensityPiece<S>>) -> Result<Self> {
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        for p in &pieces {
            if p.lo >= p.hi || !ambient.closure_contains(&p.lo) || !ambient.closure_contains(&p.hi) {
                return Err(Error::InvalidCredence(format!("density piece ({}, {}) invalid in {ambient}", p.lo, p.hi)));
            }
            if p.mass.is_negative() {
                return Err(Error::InvalidCredence("negative density mass".into()));
            }
        }
        if pieces.windows(2).any(|w| w[1].lo < w[0].hi) {
            return Err(Error::InvalidCredence("density pieces overlap".into()));
        }
        let total = pieces.iter().fold(S::zero(), |a, p| a + p.mass.clone());
        if total != S::one() {
            return Err(Error::InvalidCredence(format!("density masses sum to {total}")));
        }
        Ok(Credence { ambient: ambient.clone(), rule: Rule::Density(pieces) })
    }

    pub fn mixture(parts: Vec<(S, Credence<S>)>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidCredence("empty mixture".into()));
        };
        let ambient = first.1.ambient.clone();
        for (w, c) in &parts {
            if !w.is_positive() {
                return Err(Error::InvalidCredence(format!("mixture weight {w} is not positive")));
            }
            ambient.check_same(&c.ambient)?;
        }
        let total = parts.iter().fold(S::zero(), |a, (w, _)| a + w.clone());
        if total != S::one() {
            return Err(Error::InvalidCredence(format!("mixture weights sum to {total}")));
        }
        Ok(Credence { ambient, rule: Rule::Mixture(parts) })
    }

    pub fn ambient(&self) -> &Ambient<S> {
        &self.ambient
    }

    pub fn rule(&self) -> &Rule<S> {
        &self.rule
    }

    /// `μ[E]`, exact.
    pub fn eval(&self, set: &ElementarySet<S>) -> Result<S> {
        self.ambient.check_same(set.ambient())?;
        Ok(match &self.rule {
            Rule::Lebesgue => {
                let total = self.ambient.length().ok_or_else(|| Error::Unnormalizable(self.ambient.to_string()))?;
                set.length().expect("bounded ambient") / total
            }
            Rule::PointMass { x, side } => indicator(match side {
                Side::Right => set.has_right_germ(x),
                Side::Left => set.has_left_germ(x),
            }),
            Rule::EndMass(end) => indicator(holds_end(set, *end)),
            Rule::AtomTable { algebra, weights } => {
                let mask = algebra.mask_of(set).ok_or_else(|| Error::NotInAlgebra(set.to_string()))?;
                crate::stone::star_mass(weights, mask)
            }
            Rule::Density(pieces) => pieces.iter().fold(S::zero(), |acc, p| {
                acc + p.mass.clone() * set.length_within(&p.lo, &p.hi) / (p.hi.clone() - p.lo.clone())
            }),
            Rule::Mixture(parts) => {
                let mut total = S::zero();
                for (w, c) in parts {
                    total = total + w.clone() * c.eval(set)?;
                }
                total
            }
        })
    }

    /// `Σ μ[B_n] = μ[B]` over the cells of a partition, exact.
    pub fn check_additivity(&self, partition: &BPartition<S>) -> Result<bool> {
        let mut total = S::zero();
        for cell in partition.cells() {
            total = total + self.eval(cell)?;
        }
        Ok(total == self.eval(partition.target())?)
    }

    /// Mixture leaves with their accumulated weights.
    pub fn flatten(&self) -> Vec<(S, Credence<S>)> {
        match &self.rule {
            Rule::Mixture(parts) => parts
                .iter()
                .flat_map(|(w, c)| c.flatten().into_iter().map(move |(v, leaf)| (w.clone() * v, leaf)))
                .collect(),
            _ => vec![(S::one(), self.clone())],
        }
    }

    /// Extend an atom table to a finer algebra, splitting each atom's weight in
    /// proportion to the length of its sub-atoms. Unbounded atoms split evenly.
    pub fn extend_to_refinement(&self, finer: &FiniteAlgebra<S>) -> Result<Credence<S>> {
        let Rule::AtomTable { algebra, weights } = &self.rule else {
            return Err(Error::UnsupportedRule("extension needs an atom table".into()));
        };
        if !finer.refines(algebra) {
            return Err(Error::NotARefinement("finer algebra does not contain every coarse atom".into()));
        }
        let parents = finer.parent_atoms(algebra)?;
        let mut out = vec![S::zero(); finer.atom_count()];
        for (ci, coarse) in algebra.atoms().iter().enumerate() {
            let children: Vec<usize> = (0..parents.len()).filter(|&k| parents[k] == ci).collect();
            match coarse.length() {
                Some(total) => {
                    for &k in &children {
                        let len = finer.atoms()[k].length().expect("sub-atom of a bounded atom");
                        out[k] = weights[ci].clone() * len / total.clone();
                    }
                }
                None => {
                    let n = S::from_i64(children.len() as i64);
                    for &k in &children {
                        out[k] = weights[ci].clone() / n.clone();
                    }
                }
            }
        }
        Credence::atom_table(finer.clone(), out)
    }

    /// A nonempty set of zero mass, if one is found among candidate gaps
    /// around the credence's special points. `None` for rules with a Lebesgue
    /// component, which have full support.
    pub fn zero_mass_witness(&self) -> Result<Option<ElementarySet<S>>> {
        for cand in self.witness_candidates()? {
            if !cand.is_empty() && self.eval(&cand)?.is_zero() {
                return Ok(Some(cand));
            }
        }
        Ok(None)
    }

    fn witness_candidates(&self) -> Result<Vec<ElementarySet<S>>> {
        let amb = &self.ambient;
        if let Rule::AtomTable { algebra, .. } = &self.rule {
            return Ok(algebra.atoms().to_vec());
        }
        let mut pts: Vec<S> = Vec::new();
        self.collect_points(&mut pts);
        if let Some(a) = amb.lo().finite() {
            pts.push(a.clone());
        }
        if let Some(b) = amb.hi().finite() {
            pts.push(b.clone());
        }
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            pts.push(S::zero());
        }
        let first = pts[0].clone();
        let last = pts[pts.len() - 1].clone();
        if !amb.lo().is_finite() {
            pts.insert(0, first - S::from_i64(3));
        }
        if !amb.hi().is_finite() {
            pts.push(last + S::from_i64(3));
        }
        let three = S::from_i64(3);
        let mut out = Vec::new();
        for w in pts.windows(2) {
            let step = (w[1].clone() - w[0].clone()) / three.clone();
            let lo = w[0].clone() + step.clone();
            let hi = lo.clone() + step;
            if let Ok(iv) = Interval::finite(lo, hi) {
                if let Ok(set) = ElementarySet::regularize(vec![(iv.lo, iv.hi)], amb) {
                    out.push(set);
                }
            }
        }
        Ok(out)
    }

    fn collect_points(&self, out: &mut Vec<S>) {
        match &self.rule {
            Rule::PointMass { x, .. } => out.push(x.clone()),
            Rule::Density(pieces) => {
                for p in pieces {
                    out.push(p.lo.clone());
                    out.push(p.hi.clone());
                }
            }
            Rule::Mixture(parts) => {
                for (_, c) in parts {
                    c.collect_points(out);
                }
            }
            _ => {}
        }
    }
}

fn indicator<S: Scalar>(b: bool) -> S {
    if b {
        S::one()
    } else {
        S::zero()
    }
}

fn holds_end<S: Scalar>(set: &ElementarySet<S>, end: End) -> bool {
    let amb = set.ambient();
    let ivs = set.intervals();
    match end {
        End::NegInf => ivs.first().is_some_and(|iv| iv.lo == Extended::NegInf),
        End::PosInf => ivs.last().is_some_and(|iv| iv.hi == Extended::PosInf),
        End::AmbientLeft => ivs.first().is_some_and(|iv| iv.lo == *amb.lo()),
        End::AmbientRight => ivs.last().is_some_and(|iv| iv.hi == *amb.hi()),
    }
}

/// Whether an end germ of a closed ambient coincides with the inward point
/// mass at that end point.
pub fn end_as_point_mass<S: Scalar>(ambient: &Ambient<S>, end: End) -> Option<Credence<S>> {
    if ambient.kind() != AmbientKind::Closed {
        return None;
    }
    match end {
        End::AmbientLeft => Credence::point_mass(ambient, ambient.lo().finite()?.clone(), Side::Right).ok(),
        End::AmbientRight => Credence::point_mass(ambient, ambient.hi().finite()?.clone(), Side::Left).ok(),
        _ => None,
    }
}
