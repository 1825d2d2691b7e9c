//! Finite-depth constructions showing that length (and more generally any
//! Borel measure) does not give a credence on the regular open sets of `[0,1]`.
//!
//! Both constructions produce an open set `U` whose intervals are split into
//! left and right halves `L` and `R`. As the depth grows `L ∨ R` fills `[0,1]`,
//! yet `ν(L) + ν(R) = ν(U)` stays bounded away from one.

use crate::elementary::{Ambient, ElementarySet};
use crate::error::{Error, Result};
use crate::liminal::BorelPart;
use crate::piecewise::PiecewiseAffine;
use crate::scalar::{Extended, Scalar};

/// Depth beyond which [`fat_cantor`] refuses to list every interval.
pub const MATERIALIZE_CAP: usize = 16;

/// Halvings tried when searching for a radius around each centre.
pub const RADIUS_HALVINGS: u32 = 64;

/// Stage `n` of a middle-removal Cantor construction on `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorStage<S> {
    pub depth: usize,
    pub ratios: Vec<S>,
    /// The removed open middles `U_n`.
    pub removed: ElementarySet<S>,
    /// The closed blocks left over, left to right.
    pub blocks: Vec<(S, S)>,
    pub measure: S,
    pub max_block_width: S,
}

/// The same stage described only through its block count and common width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorSummary<S> {
    pub depth: usize,
    pub block_count_log2: usize,
    pub block_width: S,
    pub measure: S,
    /// The outer blocks touch 0 and 1, so the farthest point from `U_n` is an
    /// end of `[0,1]` at distance one block width.
    pub coverage_radius: S,
}

fn check_ratios<S: Scalar>(depth: usize, ratios: &[S]) -> Result<()> {
    if ratios.len() < depth {
        return Err(Error::BadRatio { stage: ratios.len() + 1, ratio: "missing".into() });
    }
    for (k, r) in ratios.iter().take(depth).enumerate() {
        if !r.is_positive() || *r >= S::one() {
            return Err(Error::BadRatio { stage: k + 1, ratio: r.to_string() });
        }
    }
    Ok(())
}

/// At stage `k` each closed block loses an open middle of `ratios[k-1]` times
/// its width.
pub fn fat_cantor<S: Scalar>(depth: usize, ratios: &[S]) -> Result<CantorStage<S>> {
    check_ratios(depth, ratios)?;
    if depth > MATERIALIZE_CAP {
        return Err(Error::CapExceeded { requested: depth, cap: MATERIALIZE_CAP });
    }
    let ambient = Ambient::closed_unit();
    let mut blocks = vec![(S::zero(), S::one())];
    let mut removed: Vec<(S, S)> = Vec::new();
    for rho in ratios.iter().take(depth) {
        let mut next = Vec::with_capacity(blocks.len() * 2);
        for (l, r) in blocks {
            let w = r.clone() - l.clone();
            let keep = w.clone() * (S::one() - rho.clone()) / S::two();
            let (a, b) = (l.clone() + keep.clone(), r.clone() - keep);
            next.push((l, a.clone()));
            next.push((b.clone(), r));
            removed.push((a, b));
        }
        blocks = next;
    }
    let removed = ElementarySet::from_pairs(&removed, &ambient)?;
    let measure = removed.length().expect("bounded");
    let max_block_width = blocks.iter().map(|(l, r)| r.clone() - l.clone()).max().expect("at least one block");
    Ok(CantorStage { depth, ratios: ratios[..depth].to_vec(), removed, blocks, measure, max_block_width })
}

/// Width and measure of stage `depth` without listing intervals.
pub fn cantor_summary<S: Scalar>(depth: usize, ratios: &[S]) -> Result<CantorSummary<S>> {
    Ok(cantor_trace(depth, ratios)?.pop().expect("stage zero is always present"))
}

/// Summaries of stages `0..=depth`.
pub fn cantor_trace<S: Scalar>(depth: usize, ratios: &[S]) -> Result<Vec<CantorSummary<S>>> {
    check_ratios(depth, ratios)?;
    let mut width = S::one();
    let mut count = S::one();
    let mut out = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        if k > 0 {
            width = width * (S::one() - ratios[k - 1].clone()) / S::two();
            count = count * S::two();
        }
        out.push(CantorSummary {
            depth: k,
            block_count_log2: k,
            block_width: width.clone(),
            measure: S::one() - count.clone() * width.clone(),
            coverage_radius: width.clone(),
        });
    }
    Ok(out)
}

/// Ratios making stage `k` remove a middle of absolute length `4^-k` from
/// each block (the Smith–Volterra–Cantor set).
pub fn smith_volterra_ratios<S: Scalar>(depth: usize) -> Vec<S> {
    let mut width = S::one();
    let mut out = Vec::with_capacity(depth);
    let mut gap = S::one();
    for _ in 0..depth {
        gap = gap / S::from_i64(4);
        out.push(gap.clone() / width.clone());
        width = (width - gap.clone()) / S::two();
    }
    out
}

/// Left and right halves of every interval of a bounded set.
pub fn left_right_halves<S: Scalar>(u: &ElementarySet<S>) -> Result<(ElementarySet<S>, ElementarySet<S>)> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for iv in u.intervals() {
        let (a, b) = match (iv.lo.finite(), iv.hi.finite()) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => return Err(Error::UnboundedAmbient(u.ambient().to_string())),
        };
        let m = S::midpoint(&a, &b);
        left.push((a, m.clone()));
        right.push((m, b));
    }
    Ok((ElementarySet::from_pairs(&left, u.ambient())?, ElementarySet::from_pairs(&right, u.ambient())?))
}

/// Largest distance from a point of the bounded ambient to `u`. A gap that
/// reaches an end of the ambient counts in full, an inner gap by half.
pub fn coverage_radius<S: Scalar>(u: &ElementarySet<S>) -> Result<S> {
    let amb = u.ambient();
    let (lo, hi) = match (amb.lo().finite(), amb.hi().finite()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::UnboundedAmbient(amb.to_string())),
    };
    let ivs = u.intervals();
    if ivs.is_empty() {
        return Ok(hi - lo);
    }
    let fin = |e: &Extended<S>| e.finite().expect("bounded ambient").clone();
    let mut best = max_s(fin(&ivs[0].lo) - lo, hi - fin(&ivs[ivs.len() - 1].hi));
    for w in ivs.windows(2) {
        best = max_s(best, (fin(&w[1].lo) - fin(&w[0].hi)) / S::two());
    }
    Ok(best)
}

fn max_s<S: Scalar>(a: S, b: S) -> S {
    if a >= b {
        a
    } else {
        b
    }
}

/// `1/2, 1/4, 3/4, 1/8, 3/8, …`: the first
/// `count` dyadic rationals of `(0,1)` by level.
pub fn dyadic_sequence<S: Scalar>(count: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(count);
    let mut level: i64 = 1;
    while out.len() < count {
        let den = 1i64 << level;
        let mut k = 1;
        while k < den && out.len() < count {
            out.push(S::ratio(k, den));
            k += 2;
        }
        level += 1;
    }
    out
}

/// One interval added by the recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step<S> {
    /// 1-based index `m` of the centre in the input sequence.
    pub index: usize,
    pub center: S,
    pub radius: S,
    /// The mass bound `2^-m` met by this interval.
    pub bound: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseOpenStage<S> {
    pub steps: Vec<Step<S>>,
    pub set: ElementarySet<S>,
    pub left: ElementarySet<S>,
    pub right: ElementarySet<S>,
    /// `ν(U_n)`.
    pub mass: S,
    /// `Σ 2^-m` over the indices used.
    pub bound: S,
    /// `ν(L_n) + ν(R_n)`.
    pub halves_mass: S,
    pub coverage_radius: S,
}

/// `ν(a,b) = F(b) - F(a)`.
fn cdf_mass<S: Scalar>(cdf: &PiecewiseAffine<S>, a: &S, b: &S) -> S {
    cdf.eval(b) - cdf.eval(a)
}

fn set_mass<S: Scalar>(cdf: &PiecewiseAffine<S>, set: &ElementarySet<S>) -> S {
    set.intervals()
        .iter()
        .map(|iv| cdf_mass(cdf, iv.lo.finite().expect("bounded"), iv.hi.finite().expect("bounded")))
        .fold(S::zero(), |a, b| a + b)
}

/// Grow `O_1 ⊆ O_2 ⊆ …` around points of `rs`, keeping `ν(O_n) < 1`.
///
/// `cdf` must span `[0,1]` and be strictly increasing there, so `ν` has no
/// atoms in `(0,1)`. At each step the centre is the first `r_m` outside
/// `clos(O_n)`; its radius is the smaller of `δ′_m` (found by halving
/// `min(r_m, 1-r_m)` until the interval has mass below `2^-m`) and half the
/// distance from `r_m` to `O_n ∪ {0,1}`, which keeps strict gaps.
pub fn dense_open_below_one<S: Scalar>(cdf: &PiecewiseAffine<S>, rs: &[S], depth: usize) -> Result<DenseOpenStage<S>> {
    let xs = cdf.breakpoints();
    if xs[0] != S::zero() || xs[xs.len() - 1] != S::one() || cdf.strict_monotonicity() != Some(true) {
        return Err(Error::InvalidFunction("cdf must be strictly increasing with breakpoints spanning [0,1]".into()));
    }
    if rs.iter().any(|r| !r.is_positive() || *r >= S::one()) {
        return Err(Error::InvalidFunction("centres must lie in (0,1)".into()));
    }
    let ambient = Ambient::closed_unit();
    let mut steps: Vec<Step<S>> = Vec::new();
    let mut intervals: Vec<(S, S)> = Vec::new();
    for _ in 0..depth {
        let in_closure = |r: &S, ivs: &[(S, S)]| ivs.iter().any(|(a, b)| a <= r && r <= b);
        let m = rs
            .iter()
            .position(|r| !in_closure(r, &intervals))
            .ok_or(Error::Exhausted { index: rs.len() + 1 })?;
        let r = rs[m].clone();
        let bound = S::pow2_inv(m as u32 + 1);
        let mut dp = std::cmp::min(r.clone(), S::one() - r.clone());
        let mut tries = 0;
        while cdf_mass(cdf, &(r.clone() - dp.clone()), &(r.clone() + dp.clone())) >= bound {
            dp = dp / S::two();
            tries += 1;
            if tries > RADIUS_HALVINGS {
                return Err(Error::Exhausted { index: m + 1 });
            }
        }
        let mut dist = std::cmp::min(r.clone(), S::one() - r.clone());
        for (a, b) in &intervals {
            let d = if r < *a { a.clone() - r.clone() } else { r.clone() - b.clone() };
            dist = std::cmp::min(dist, d);
        }
        let radius = std::cmp::min(dp, dist / S::two());
        intervals.push((r.clone() - radius.clone(), r.clone() + radius.clone()));
        steps.push(Step { index: m + 1, center: r, radius, bound });
    }
    let set = ElementarySet::from_pairs(&intervals, &ambient)?;
    debug_assert_eq!(set.intervals().len(), intervals.len());
    let (left, right) = left_right_halves(&set)?;
    let mass = set_mass(cdf, &set);
    let halves_mass = set_mass(cdf, &left) + set_mass(cdf, &right);
    let bound = steps.iter().fold(S::zero(), |a, s| a + s.bound.clone());
    let coverage_radius = coverage_radius(&set)?;
    Ok(DenseOpenStage { steps, set, left, right, mass, bound, halves_mass, coverage_radius })
}

/// `L = [0,x)`, `R = (x,1]` for a measure with an atom at `x ∈ (0,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomBranchWitness<S> {
    pub left: ElementarySet<S>,
    pub right: ElementarySet<S>,
    pub join: ElementarySet<S>,
    pub left_mass: S,
    pub right_mass: S,
}

impl<S: Scalar> AtomBranchWitness<S> {
    pub fn sum(&self) -> S {
        self.left_mass.clone() + self.right_mass.clone()
    }

    /// `L ∨ R` is everything while `ν(L) + ν(R) < 1`.
    pub fn is_violation(&self) -> bool {
        self.join.is_full() && self.sum() < S::one()
    }
}

/// `ν(E)` for a Borel measure given as normalized length plus point atoms,
/// treating `E` as a point set.
pub fn borel_mass<S: Scalar>(nu: &BorelPart<S>, set: &ElementarySet<S>) -> S {
    let amb = set.ambient();
    let total = amb.length().expect("bounded ambient");
    let smooth = nu.lebesgue_weight.clone() * set.length().expect("bounded ambient") / total;
    nu.atoms
        .iter()
        .filter(|a| set.contains_point(&a.x))
        .fold(smooth, |acc, a| acc + a.mass.clone())
}

pub fn atom_branch_witness<S: Scalar>(nu: &BorelPart<S>) -> Result<AtomBranchWitness<S>> {
    let atom = nu
        .atoms
        .iter()
        .find(|a| a.x.is_positive() && a.x < S::one() && a.mass.is_positive())
        .ok_or_else(|| Error::InvalidCredence("no atom inside (0,1)".into()))?;
    let amb = Ambient::closed_unit();
    let left = ElementarySet::from_pairs(&[(S::zero(), atom.x.clone())], &amb)?;
    let right = ElementarySet::from_pairs(&[(atom.x.clone(), S::one())], &amb)?;
    let join = left.join(&right)?;
    Ok(AtomBranchWitness {
        left_mass: borel_mass(nu, &left),
        right_mass: borel_mass(nu, &right),
        left,
        right,
        join,
    })
}
