//! Partitions, simple functions and the integrator.
//!
//! `∫◇_B f dμ = Σ r_n μ[P_n ∩ B]` for a simple function `f`. For a bounded
//! continuous piecewise-affine `g`, `𝕀_B[g]` is the supremum of `∫◇_B f` over
//! simple minorants `f ≤ g`. [`integrate`] realizes the supremum up to
//! `eps·μ[B]` with the level-set minorant of mesh `1/N`, and [`integrate_exact`]
//! gives the closed form for every supported credence rule.

use std::collections::BTreeMap;

use crate::credence::{Credence, End, Rule};
use crate::elementary::{Ambient, ElementarySet};
use crate::error::{Error, Result};
use crate::piecewise::PiecewiseAffine;
use crate::scalar::{Extended, Scalar};

/// Pairwise disjoint nonempty cells whose join is `target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BPartition<S> {
    target: ElementarySet<S>,
    cells: Vec<ElementarySet<S>>,
}

impl<S: Scalar> BPartition<S> {
    pub fn new(target: ElementarySet<S>, cells: Vec<ElementarySet<S>>) -> Result<Self> {
        let ambient = target.ambient().clone();
        let mut tagged = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            ambient.check_same(c.ambient())?;
            if c.is_empty() {
                return Err(Error::NotAPartition(format!("cell {i} is empty")));
            }
            tagged.extend(c.intervals().iter().map(|iv| (iv, i)));
        }
        // intervals of one cell are disjoint, so any overlap in sorted order
        // is between two cells
        tagged.sort();
        let mut reach: Option<(&Extended<S>, usize)> = None;
        for (iv, i) in tagged {
            if let Some((hi, j)) = reach {
                if iv.lo < *hi {
                    return Err(Error::NotAPartition(format!("cells {j} and {i} overlap")));
                }
            }
            if reach.is_none_or(|(hi, _)| iv.hi > *hi) {
                reach = Some((&iv.hi, i));
            }
        }
        let join = ElementarySet::join_all(&cells, &ambient)?;
        if join != target {
            return Err(Error::NotAPartition(format!("cells join to {join}, not {target}")));
        }
        Ok(BPartition { target, cells })
    }

    /// The one-cell partition (no cells for the empty set).
    pub fn trivial(target: ElementarySet<S>) -> Self {
        let cells = if target.is_empty() { vec![] } else { vec![target.clone()] };
        BPartition { target, cells }
    }

    pub fn target(&self) -> &ElementarySet<S> {
        &self.target
    }

    pub fn cells(&self) -> &[ElementarySet<S>] {
        &self.cells
    }

    pub fn ambient(&self) -> &Ambient<S> {
        self.target.ambient()
    }
}

/// Minimal common refinement: the nonempty meets `P_i ∩ Q_j`, in
/// lexicographic `(i, j)` order.
pub fn refine<S: Scalar>(p: &BPartition<S>, q: &BPartition<S>) -> Result<BPartition<S>> {
    if p.target != q.target {
        return Err(Error::TargetMismatch);
    }
    let mut cells = Vec::new();
    for a in &p.cells {
        for b in &q.cells {
            let m = a.meet(b)?;
            if !m.is_empty() {
                cells.push(m);
            }
        }
    }
    Ok(BPartition { target: p.target.clone(), cells })
}

/// A function constant on each cell of a partition of the whole ambient.
/// Values on cell boundaries are not represented.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleFunction<S> {
    partition: BPartition<S>,
    values: Vec<S>,
}

impl<S: Scalar> SimpleFunction<S> {
    pub fn new(partition: BPartition<S>, values: Vec<S>) -> Result<Self> {
        if !partition.target.is_full() {
            return Err(Error::NotAPartition("simple function cells must join to the ambient".into()));
        }
        if values.len() != partition.cells.len() {
            return Err(Error::InvalidFunction(format!(
                "{} values for {} cells",
                values.len(),
                partition.cells.len()
            )));
        }
        Ok(SimpleFunction { partition, values })
    }

    pub fn constant(ambient: &Ambient<S>, c: S) -> Self {
        SimpleFunction { partition: BPartition::trivial(ElementarySet::full(ambient)), values: vec![c] }
    }

    pub fn partition(&self) -> &BPartition<S> {
        &self.partition
    }

    pub fn cells(&self) -> &[ElementarySet<S>] {
        &self.partition.cells
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Value at a point inside some cell, `None` on cell boundaries.
    pub fn value_at(&self, x: &S) -> Option<&S> {
        self.cells().iter().position(|c| c.contains_point(x)).map(|i| &self.values[i])
    }

    /// The same function over the common refinement with `q`.
    pub fn refined_to(&self, q: &BPartition<S>) -> Result<SimpleFunction<S>> {
        let mut cells = Vec::new();
        let mut values = Vec::new();
        for (a, v) in self.cells().iter().zip(&self.values) {
            for b in q.cells() {
                let m = a.meet(b)?;
                if !m.is_empty() {
                    cells.push(m);
                    values.push(v.clone());
                }
            }
        }
        if q.target != self.partition.target {
            return Err(Error::TargetMismatch);
        }
        Ok(SimpleFunction { partition: BPartition { target: q.target.clone(), cells }, values })
    }

    pub fn add(&self, other: &SimpleFunction<S>) -> Result<SimpleFunction<S>> {
        let mut cells = Vec::new();
        let mut values = Vec::new();
        for (a, v) in self.cells().iter().zip(&self.values) {
            for (b, w) in other.cells().iter().zip(&other.values) {
                let m = a.meet(b)?;
                if !m.is_empty() {
                    cells.push(m);
                    values.push(v.clone() + w.clone());
                }
            }
        }
        if self.partition.target != other.partition.target {
            return Err(Error::TargetMismatch);
        }
        Ok(SimpleFunction { partition: BPartition { target: self.partition.target.clone(), cells }, values })
    }

    pub fn scale(&self, c: &S) -> SimpleFunction<S> {
        SimpleFunction {
            partition: self.partition.clone(),
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }
}

/// `∫◇_B f dμ = Σ r_n μ[P_n ∩ B]`. The empty set integrates to zero.
pub fn simple_integral<S: Scalar>(f: &SimpleFunction<S>, mu: &Credence<S>, b: &ElementarySet<S>) -> Result<S> {
    mu.ambient().check_same(b.ambient())?;
    let mut total = S::zero();
    if b.is_empty() {
        return Ok(total);
    }
    for (cell, v) in f.cells().iter().zip(f.values()) {
        if v.is_zero() {
            continue;
        }
        total = total + v.clone() * mu.eval(&cell.meet(b)?)?;
    }
    Ok(total)
}

/// Level-set minorant of mesh `1/n`: on the cell where `g` takes values in
/// `[m/n, (m+1)/n)` (up to finitely many points) the value is `m/n`.
///
/// The cell of label `m` is `B_m ∩ ¬B_{m+1}` with `B_m = int(g⁻¹[m/n, (m+1)/n])`,
/// so it keeps the highest admissible level. `n` must be a positive integer.
pub fn level_minorant<S: Scalar>(g: &PiecewiseAffine<S>, ambient: &Ambient<S>, n: &S) -> Result<SimpleFunction<S>> {
    check_mesh(n)?;
    let groups = level_groups(g, [(ambient.lo(), ambient.hi())], n);
    let mut cells = Vec::new();
    let mut values = Vec::new();
    for (label, pieces) in groups {
        let cell = ElementarySet::regularize_clipped(pieces, ambient);
        if !cell.is_empty() {
            cells.push(cell);
            values.push(label / n.clone());
        }
    }
    let part = BPartition::new(ElementarySet::full(ambient), cells)?;
    SimpleFunction::new(part, values)
}

fn check_mesh<S: Scalar>(n: &S) -> Result<()> {
    if !n.is_positive() || !n.is_integer() {
        return Err(Error::InvalidFunction(format!("mesh count must be a positive integer, got {n}")));
    }
    Ok(())
}

/// Open pieces `(lo, hi)` of the line.
type Pieces<S> = Vec<(Extended<S>, Extended<S>)>;

/// Pieces of `ranges` on which `floor(n·g)` is constant, grouped by that label.
fn level_groups<'a, S: Scalar + 'a>(
    g: &PiecewiseAffine<S>,
    ranges: impl IntoIterator<Item = (&'a Extended<S>, &'a Extended<S>)>,
    n: &S,
) -> BTreeMap<S, Pieces<S>> {
    let mut groups: BTreeMap<S, Pieces<S>> = BTreeMap::new();
    for (lo, hi) in ranges {
        for seg in g.segments(lo, hi) {
            if seg.is_constant() {
                let label = (seg.y_lo.clone() * n.clone()).floor();
                groups.entry(label).or_default().push((seg.lo, seg.hi));
                continue;
            }
            let x0 = seg.lo.finite().expect("sloped pieces are bounded").clone();
            let x1 = seg.hi.finite().expect("sloped pieces are bounded").clone();
            let (ny0, ny1) = (seg.y_lo.clone() * n.clone(), seg.y_hi.clone() * n.clone());
            let rising = ny0 < ny1;
            let (bottom, top) = if rising { (ny0.clone(), ny1.clone()) } else { (ny1.clone(), ny0.clone()) };
            // integers strictly inside (bottom, top), in the order x meets them
            let first = bottom.floor() + S::one();
            let last = top.ceil() - S::one();
            let crossing = |k: &S| x0.clone() + (k.clone() - ny0.clone()) * (x1.clone() - x0.clone()) / (ny1.clone() - ny0.clone());
            let mut left = x0.clone();
            let mut label = if rising { bottom.floor() } else { last.clone() };
            let mut k = if rising { first.clone() } else { last.clone() };
            while if rising { k <= last } else { k >= first } {
                let x = crossing(&k);
                groups.entry(label.clone()).or_default().push((Extended::Finite(left), Extended::Finite(x.clone())));
                left = x;
                if rising {
                    label = k.clone();
                    k = k + S::one();
                } else {
                    k = k - S::one();
                    label = k.clone();
                }
            }
            groups.entry(label).or_default().push((Extended::Finite(left), Extended::Finite(x1)));
        }
    }
    groups
}

/// Smallest integer `N` with `1/N ≤ eps`.
pub fn mesh_for<S: Scalar>(eps: &S) -> Result<S> {
    if !eps.is_positive() {
        return Err(Error::InvalidFunction(format!("tolerance must be positive, got {eps}")));
    }
    Ok((S::one() / eps.clone()).ceil())
}

/// `𝕀_B[g]` from below, within `eps·μ[B]`.
///
/// Atom tables integrate exactly against the largest minorant subordinate to
/// their algebra; mixtures that contain an atom table are rejected.
pub fn integrate<S: Scalar>(g: &PiecewiseAffine<S>, mu: &Credence<S>, b: &ElementarySet<S>, eps: &S) -> Result<S> {
    let n = mesh_for(eps)?;
    integrate_with_mesh(g, mu, b, &n)
}

pub fn integrate_with_mesh<S: Scalar>(g: &PiecewiseAffine<S>, mu: &Credence<S>, b: &ElementarySet<S>, n: &S) -> Result<S> {
    if let Rule::AtomTable { algebra, .. } = mu.rule() {
        let f = crate::stone::atomwise_minorant(g, algebra)?;
        return simple_integral(&f, mu, b);
    }
    if mu.flatten().iter().any(|(_, c)| matches!(c.rule(), Rule::AtomTable { .. })) {
        return Err(Error::UnsupportedRule("mixture with an atom table".into()));
    }
    check_mesh(n)?;
    mu.ambient().check_same(b.ambient())?;
    // The cells of the level minorant met with B, built piecewise on B; each
    // value is raised to the infimum of g over the cell.
    let groups = level_groups(g, b.intervals().iter().map(|iv| (&iv.lo, &iv.hi)), n);
    let mut total = S::zero();
    for (label, pieces) in groups {
        let cell = ElementarySet::regularize_clipped(pieces, b.ambient());
        if cell.is_empty() {
            continue;
        }
        let inf = cell.intervals().iter().map(|iv| g.range_on(&iv.lo, &iv.hi).0).min().expect("nonempty cell");
        let value = std::cmp::max(inf, label / n.clone());
        if !value.is_zero() {
            total = total + value * mu.eval(&cell)?;
        }
    }
    Ok(total)
}

/// Raise each cell value to the infimum of `g` over the cell. The result is
/// still a minorant, and exact for constants.
pub fn tightened<S: Scalar>(g: &PiecewiseAffine<S>, f: &SimpleFunction<S>) -> SimpleFunction<S> {
    let values = f
        .cells()
        .iter()
        .zip(f.values())
        .map(|(cell, v)| {
            let inf = cell.intervals().iter().map(|iv| g.range_on(&iv.lo, &iv.hi).0).min().expect("nonempty cell");
            std::cmp::max(inf, v.clone())
        })
        .collect();
    SimpleFunction { partition: f.partition.clone(), values }
}

/// `(N, minorant integral)` rows for each mesh in `meshes`.
pub fn convergence_trace<S: Scalar>(
    g: &PiecewiseAffine<S>,
    mu: &Credence<S>,
    b: &ElementarySet<S>,
    meshes: &[S],
) -> Result<Vec<(S, S)>> {
    meshes.iter().map(|n| Ok((n.clone(), integrate_with_mesh(g, mu, b, n)?))).collect()
}

/// Closed-form `𝕀_B[g]`.
pub fn integrate_exact<S: Scalar>(g: &PiecewiseAffine<S>, mu: &Credence<S>, b: &ElementarySet<S>) -> Result<S> {
    mu.ambient().check_same(b.ambient())?;
    if b.is_empty() {
        return Ok(S::zero());
    }
    let amb = mu.ambient();
    Ok(match mu.rule() {
        Rule::Lebesgue => {
            let total = amb.length().ok_or_else(|| Error::Unnormalizable(amb.to_string()))?;
            g.integral_over(b).expect("bounded ambient") / total
        }
        Rule::PointMass { x, .. } => g.eval(x) * mu.eval(b)?,
        Rule::EndMass(end) => {
            let at = match end {
                End::NegInf => Extended::NegInf,
                End::PosInf => Extended::PosInf,
                End::AmbientLeft => amb.lo().clone(),
                End::AmbientRight => amb.hi().clone(),
            };
            g.eval_ext(&at) * mu.eval(b)?
        }
        Rule::Density(pieces) => {
            let mut total = S::zero();
            for p in pieces {
                let inside = b
                    .intervals()
                    .iter()
                    .filter_map(|iv| {
                        let lo = std::cmp::max(iv.lo.clone(), Extended::Finite(p.lo.clone()));
                        let hi = std::cmp::min(iv.hi.clone(), Extended::Finite(p.hi.clone()));
                        (lo < hi).then(|| g.integral(lo.finite().expect("clipped"), hi.finite().expect("clipped")))
                    })
                    .fold(S::zero(), |a, v| a + v);
                total = total + p.mass.clone() * inside / (p.hi.clone() - p.lo.clone());
            }
            total
        }
        Rule::AtomTable { algebra, weights } => {
            let mask = algebra.mask_of(b).ok_or_else(|| Error::NotInAlgebra(b.to_string()))?;
            let mut total = S::zero();
            for (i, atom) in algebra.atoms().iter().enumerate() {
                if mask >> i & 1 == 0 {
                    continue;
                }
                let ranges: Vec<(S, S)> = atom.intervals().iter().map(|iv| g.range_on(&iv.lo, &iv.hi)).collect();
                let v = ranges[0].0.clone();
                if ranges.iter().any(|(lo, hi)| *lo != v || *hi != v) {
                    return Err(Error::UnsupportedRule(format!("function is not constant on atom {atom}")));
                }
                total = total + v * weights[i].clone();
            }
            total
        }
        Rule::Mixture(parts) => {
            let mut total = S::zero();
            for (w, c) in parts {
                total = total + w.clone() * integrate_exact(g, c, b)?;
            }
            total
        }
    })
}

/// `𝔼_B[g] = 𝕀_B[g] / μ[B]`, approximate.
pub fn conditional_expectation<S: Scalar>(
    g: &PiecewiseAffine<S>,
    mu: &Credence<S>,
    b: &ElementarySet<S>,
    eps: &S,
) -> Result<S> {
    let m = mu.eval(b)?;
    if m.is_zero() {
        return Err(Error::ZeroMassConditioning);
    }
    Ok(integrate(g, mu, b, eps)? / m)
}

pub fn conditional_expectation_exact<S: Scalar>(g: &PiecewiseAffine<S>, mu: &Credence<S>, b: &ElementarySet<S>) -> Result<S> {
    let m = mu.eval(b)?;
    if m.is_zero() {
        return Err(Error::ZeroMassConditioning);
    }
    Ok(integrate_exact(g, mu, b)? / m)
}

/// `(1/μ[B]) Σ μ[B_n] 𝔼_{B_n}[g]` over a partition of `B`; cells of zero mass
/// are skipped since they carry no integral.
pub fn bayes_expectation<S: Scalar>(g: &PiecewiseAffine<S>, mu: &Credence<S>, part: &BPartition<S>) -> Result<S> {
    let total = mu.eval(part.target())?;
    if total.is_zero() {
        return Err(Error::ZeroMassConditioning);
    }
    let mut acc = S::zero();
    for cell in part.cells() {
        let m = mu.eval(cell)?;
        if m.is_zero() {
            continue;
        }
        acc = acc + m * conditional_expectation_exact(g, mu, cell)?;
    }
    Ok(acc / total)
}

/// `Σ 𝕀_{B_n}[g]` over the cells, exact.
pub fn integrate_over_partition<S: Scalar>(g: &PiecewiseAffine<S>, mu: &Credence<S>, part: &BPartition<S>) -> Result<S> {
    part.cells().iter().try_fold(S::zero(), |acc, c| Ok(acc + integrate_exact(g, mu, c)?))
}

/// Two integrands `lower ≤ upper` that differ on the nonempty open set `set`
/// yet have equal integrals: strict monotonicity fails without full support.
#[derive(Clone, Debug)]
pub struct MonotonicityWitness<S> {
    pub set: ElementarySet<S>,
    pub lower: PiecewiseAffine<S>,
    pub upper: PiecewiseAffine<S>,
    pub lower_integral: S,
    pub upper_integral: S,
}

/// Built from a zero-mass set when one exists: `lower = 0` and `upper` a tent
/// of height one over an interval of that set.
pub fn strict_monotonicity_witness<S: Scalar>(mu: &Credence<S>) -> Result<Option<MonotonicityWitness<S>>> {
    let Some(set) = mu.zero_mass_witness()? else {
        return Ok(None);
    };
    let iv = &set.intervals()[0];
    let amb = mu.ambient();
    let (c, d) = match (iv.lo.finite(), iv.hi.finite()) {
        (Some(c), Some(d)) => (c.clone(), d.clone()),
        (Some(c), None) => (c.clone(), c.clone() + S::one()),
        (None, Some(d)) => (d.clone() - S::one(), d.clone()),
        (None, None) => (S::zero(), S::one()),
    };
    let mid = S::midpoint(&c, &d);
    let upper = PiecewiseAffine::new(vec![c, mid, d], vec![S::zero(), S::one(), S::zero()])?;
    let lower = PiecewiseAffine::constant(S::zero());
    let full = ElementarySet::full(amb);
    let lower_integral = integrate_exact(&lower, mu, &full)?;
    let upper_integral = integrate_exact(&upper, mu, &full)?;
    Ok(Some(MonotonicityWitness { set, lower, upper, lower_integral, upper_integral }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credence::Side;
    use crate::testutil::{q, qx};
    use num_rational::BigRational as Q;

    fn unit() -> Ambient<Q> {
        Ambient::open_unit()
    }

    /// `(numerator, denominator)`.
    type Frac = (i64, i64);

    fn set(amb: &Ambient<Q>, pairs: &[(Frac, Frac)]) -> ElementarySet<Q> {
        let v: Vec<(Q, Q)> = pairs.iter().map(|&(a, b)| (q(a.0, a.1), q(b.0, b.1))).collect();
        ElementarySet::from_pairs(&v, amb).unwrap()
    }

    fn identity() -> PiecewiseAffine<Q> {
        PiecewiseAffine::affine(q(1, 1), q(0, 1), q(0, 1), q(1, 1)).unwrap()
    }

    fn fold() -> PiecewiseAffine<Q> {
        PiecewiseAffine::new(vec![q(0, 1), q(1, 2), q(1, 1)], vec![q(1, 1), q(0, 1), q(1, 1)]).unwrap()
    }

    // literal construction: P_m = B_m ∩ ¬B_{m+1}, B_m = int(g⁻¹[m/N, (m+1)/N])
    fn literal_minorant(g: &PiecewiseAffine<Q>, amb: &Ambient<Q>, n: i64) -> Vec<(ElementarySet<Q>, Q)> {
        let nq = q(n, 1);
        let (lo, hi) = g.range_on(amb.lo(), amb.hi());
        let (m0, m1) = ((lo * nq.clone()).floor(), (hi * nq.clone()).floor());
        let b = |m: &Q| g.level_region((m.clone() / nq.clone()).into(), ((m.clone() + q(1, 1)) / nq.clone()).into(), amb);
        let mut out = Vec::new();
        let mut m = m0;
        while m <= m1 {
            let cell = b(&m).meet(&b(&(m.clone() + q(1, 1))).neg()).unwrap();
            if !cell.is_empty() {
                out.push((cell, m.clone() / nq.clone()));
            }
            m += q(1, 1);
        }
        out
    }

    #[test]
    fn partition_validation() {
        let u = unit();
        let full = ElementarySet::full(&u);
        assert!(BPartition::new(full.clone(), vec![set(&u, &[((0, 1), (1, 2))]), set(&u, &[((1, 2), (1, 1))])]).is_ok());
        let overlap = BPartition::new(full.clone(), vec![set(&u, &[((0, 1), (2, 3))]), set(&u, &[((1, 2), (1, 1))])]);
        assert!(matches!(overlap, Err(Error::NotAPartition(_))));
        let short = BPartition::new(full, vec![set(&u, &[((0, 1), (1, 2))])]);
        assert!(matches!(short, Err(Error::NotAPartition(_))));
    }

    #[test]
    fn refine_examples() {
        let u = unit();
        let full = ElementarySet::full(&u);
        let whole = BPartition::trivial(full.clone());
        let halves = BPartition::new(full.clone(), vec![set(&u, &[((0, 1), (1, 2))]), set(&u, &[((1, 2), (1, 1))])]).unwrap();
        let thirds = BPartition::new(full.clone(), vec![set(&u, &[((0, 1), (1, 3))]), set(&u, &[((1, 3), (1, 1))])]).unwrap();
        assert_eq!(refine(&whole, &halves).unwrap(), halves);
        assert_eq!(refine(&halves, &halves).unwrap(), halves);
        let r = refine(&halves, &thirds).unwrap();
        assert_eq!(
            r.cells(),
            &[set(&u, &[((0, 1), (1, 3))]), set(&u, &[((1, 3), (1, 2))]), set(&u, &[((1, 2), (1, 1))])]
        );
        let other = BPartition::trivial(set(&u, &[((0, 1), (1, 2))]));
        assert_eq!(refine(&whole, &other), Err(Error::TargetMismatch));
    }

    #[test]
    fn simple_integral_examples() {
        let u = unit();
        let leb = Credence::lebesgue(&u).unwrap();
        let halves = BPartition::new(
            ElementarySet::full(&u),
            vec![set(&u, &[((0, 1), (1, 2))]), set(&u, &[((1, 2), (1, 1))])],
        )
        .unwrap();
        let f = SimpleFunction::new(halves, vec![q(1, 1), q(3, 1)]).unwrap();
        assert_eq!(simple_integral(&f, &leb, &ElementarySet::full(&u)).unwrap(), q(2, 1));
        assert_eq!(simple_integral(&f, &leb, &set(&u, &[((1, 4), (3, 4))])).unwrap(), q(1, 1));
        assert_eq!(simple_integral(&f, &leb, &ElementarySet::empty(&u)).unwrap(), q(0, 1));
        let c = SimpleFunction::constant(&u, q(5, 3));
        let b = set(&u, &[((1, 5), (2, 5))]);
        assert_eq!(simple_integral(&c, &leb, &b).unwrap(), q(5, 3) * leb.eval(&b).unwrap());
    }

    #[test]
    fn minorant_examples() {
        let u = unit();
        let c = level_minorant(&PiecewiseAffine::constant(q(7, 10)), &u, &q(3, 1)).unwrap();
        assert_eq!(c.cells(), &[ElementarySet::full(&u)]);
        assert_eq!(c.values(), &[q(2, 3)]);
        let f = level_minorant(&identity(), &u, &q(2, 1)).unwrap();
        assert_eq!(f.cells(), &[set(&u, &[((0, 1), (1, 2))]), set(&u, &[((1, 2), (1, 1))])]);
        assert_eq!(f.values(), &[q(0, 1), q(1, 2)]);
        let h = level_minorant(&fold(), &u, &q(2, 1)).unwrap();
        assert_eq!(h.cells(), &[set(&u, &[((1, 4), (3, 4))]), set(&u, &[((0, 1), (1, 4)), ((3, 4), (1, 1))])]);
        assert_eq!(h.values(), &[q(0, 1), q(1, 2)]);
    }

    #[test]
    fn minorant_matches_literal_construction() {
        let line = Ambient::<Q>::full_line();
        let shapes = [
            fold(),
            identity(),
            PiecewiseAffine::new(
                vec![q(-2, 1), q(-1, 1), q(0, 1), q(1, 3), q(2, 1)],
                vec![q(1, 2), q(-3, 4), q(-3, 4), q(5, 2), q(1, 1)],
            )
            .unwrap(),
        ];
        for g in &shapes {
            for amb in [unit(), line.clone(), Ambient::closed(q(-1, 1), q(1, 1)).unwrap()] {
                for n in 1..9 {
                    let fast = level_minorant(g, &amb, &q(n, 1)).unwrap();
                    let lit = literal_minorant(g, &amb, n);
                    let pairs: Vec<_> = fast.cells().iter().cloned().zip(fast.values().iter().cloned()).collect();
                    assert_eq!(pairs, lit, "n={n} ambient={amb}");
                }
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let u = unit();
        let leb = Credence::lebesgue(&u).unwrap();
        let full = ElementarySet::full(&u);
        let one = PiecewiseAffine::constant(q(1, 1));
        let b = set(&u, &[((1, 7), (2, 7)), ((1, 2), (3, 5))]);
        assert_eq!(integrate(&one, &leb, &b, &q(1, 3)).unwrap(), leb.eval(&b).unwrap());
        let v = integrate(&identity(), &leb, &full, &q(1, 100)).unwrap();
        assert!(v >= q(49, 100) && v <= q(1, 2));
        let pm = Credence::point_mass(&u, q(1, 3), Side::Right).unwrap();
        let v = integrate(&identity(), &pm, &full, &q(1, 10)).unwrap();
        assert!(v >= q(1, 3) - q(1, 10) && v <= q(1, 3));
    }

    #[test]
    fn exact_examples() {
        let u = unit();
        let leb = Credence::lebesgue(&u).unwrap();
        assert_eq!(integrate_exact(&identity(), &leb, &set(&u, &[((0, 1), (1, 2))])).unwrap(), q(1, 8));
        let line = Ambient::<Q>::full_line();
        let end = Credence::end_mass(&line, End::PosInf).unwrap();
        let g = PiecewiseAffine::new(vec![q(0, 1), q(5, 1)], vec![q(3, 1), q(0, 1)]).unwrap();
        assert_eq!(integrate_exact(&g, &end, &ElementarySet::full(&line)).unwrap(), q(0, 1));
        let left = Credence::point_mass(&u, q(1, 2), Side::Left).unwrap();
        assert_eq!(integrate_exact(&fold(), &left, &set(&u, &[((0, 1), (1, 2))])).unwrap(), q(0, 1));
        assert_eq!(integrate_exact(&identity(), &left, &set(&u, &[((0, 1), (1, 2))])).unwrap(), q(1, 2));
    }

    #[test]
    fn atom_table_integration() {
        let u = unit();
        let alg = crate::stone::FiniteAlgebra::generate(&[set(&u, &[((0, 1), (1, 2))])], &u).unwrap();
        let t = Credence::atom_table(alg, vec![q(1, 4), q(3, 4)]).unwrap();
        let full = ElementarySet::full(&u);
        let step = PiecewiseAffine::constant(q(2, 1));
        assert_eq!(integrate_exact(&step, &t, &full).unwrap(), q(2, 1));
        assert!(matches!(integrate_exact(&identity(), &t, &full), Err(Error::UnsupportedRule(_))));
        assert_eq!(integrate(&identity(), &t, &full, &q(1, 10)).unwrap(), q(3, 8));
    }

    #[test]
    fn conditional_examples() {
        let u = unit();
        let leb = Credence::lebesgue(&u).unwrap();
        let half = set(&u, &[((0, 1), (1, 2))]);
        assert_eq!(
            conditional_expectation(&PiecewiseAffine::constant(q(4, 9)), &leb, &half, &q(1, 10)).unwrap(),
            q(4, 9)
        );
        let v = conditional_expectation(&identity(), &leb, &half, &q(1, 1000)).unwrap();
        assert!(q(1, 4) - v.clone() <= q(1, 1000) && v <= q(1, 4));
        assert_eq!(conditional_expectation_exact(&identity(), &leb, &half).unwrap(), q(1, 4));
        let full = ElementarySet::full(&u);
        let part = BPartition::new(full.clone(), vec![half.clone(), half.neg()]).unwrap();
        assert_eq!(
            bayes_expectation(&identity(), &leb, &part).unwrap(),
            conditional_expectation_exact(&identity(), &leb, &full).unwrap()
        );
        let pm = Credence::point_mass(&u, q(3, 4), Side::Left).unwrap();
        assert_eq!(conditional_expectation(&identity(), &pm, &half, &q(1, 10)), Err(Error::ZeroMassConditioning));
    }

    #[test]
    fn monotonicity_witness() {
        let a = Ambient::open(qx(-1, 1), qx(1, 1)).unwrap();
        let pm = Credence::point_mass(&a, q(0, 1), Side::Right).unwrap();
        let w = strict_monotonicity_witness(&pm).unwrap().unwrap();
        assert_eq!(w.lower_integral, w.upper_integral);
        assert_ne!(w.lower, w.upper);
        assert!(strict_monotonicity_witness(&Credence::lebesgue(&a).unwrap()).unwrap().is_none());
    }
}
