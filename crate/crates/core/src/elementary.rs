//! Ambient spaces and elementary regular open subsets of the line.
//!
//! An [`ElementarySet`] is a finite union of open intervals kept in a strict
//! normal form: sorted, nonempty, and separated by gaps of positive length.
//! Touching intervals such as `(0,1)` and `(1,2)` are never stored side by
//! side; [`ElementarySet::regularize`] merges them, since the interior of the
//! closure of their union is `(0,2)`.
//!
//! In a closed ambient `[a,b]` an interval whose lower end equals `a` stands for
//! the relatively open piece `[a,hi)` (and symmetrically at `b`). No extra flag
//! is stored.

use std::cmp::{max, min};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AmbientKind {
    FullLine,
    Open,
    Closed,
}

/// The space `S` that sets and credences live in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ambient<S> {
    kind: AmbientKind,
    lo: Extended<S>,
    hi: Extended<S>,
}

impl<S: Scalar> Ambient<S> {
    pub fn full_line() -> Self {
        Ambient { kind: AmbientKind::FullLine, lo: Extended::NegInf, hi: Extended::PosInf }
    }

    /// Open interval `(a,b)`; either end may be infinite. `(-inf,inf)` becomes
    /// the full line.
    pub fn open(a: Extended<S>, b: Extended<S>) -> Result<Self> {
        if a >= b || a == Extended::PosInf || b == Extended::NegInf {
            return Err(Error::InvalidAmbient(format!("({a}, {b})")));
        }
        if a == Extended::NegInf && b == Extended::PosInf {
            return Ok(Self::full_line());
        }
        Ok(Ambient { kind: AmbientKind::Open, lo: a, hi: b })
    }

    pub fn closed(a: S, b: S) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidAmbient(format!("[{a}, {b}]")));
        }
        Ok(Ambient { kind: AmbientKind::Closed, lo: Extended::Finite(a), hi: Extended::Finite(b) })
    }

    pub fn open_unit() -> Self {
        Self::open(S::zero().into(), S::one().into()).expect("valid")
    }

    pub fn closed_unit() -> Self {
        Self::closed(S::zero(), S::one()).expect("valid")
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    pub fn lo(&self) -> &Extended<S> {
        &self.lo
    }

    pub fn hi(&self) -> &Extended<S> {
        &self.hi
    }

    pub fn is_closed(&self) -> bool {
        self.kind == AmbientKind::Closed
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn length(&self) -> Option<S> {
        match (&self.lo, &self.hi) {
            (Extended::Finite(a), Extended::Finite(b)) => Some(b.clone() - a.clone()),
            _ => None,
        }
    }

    /// Membership of a point in the space itself.
    pub fn contains_point(&self, x: &S) -> bool {
        let x = Extended::Finite(x.clone());
        if self.is_closed() {
            self.lo <= x && x <= self.hi
        } else {
            self.lo < x && x < self.hi
        }
    }

    /// Membership of a point in the closure of the space within the line.
    pub fn closure_contains(&self, x: &S) -> bool {
        let x = Extended::Finite(x.clone());
        self.lo <= x && x <= self.hi
    }

    /// The same interval with the opposite topology: `(a,b)` ↔ `[a,b]`.
    pub fn compactified(&self) -> Result<Self> {
        match (&self.lo, &self.hi) {
            (Extended::Finite(a), Extended::Finite(b)) => Self::closed(a.clone(), b.clone()),
            _ => Err(Error::UnboundedAmbient(self.to_string())),
        }
    }

    pub fn interior(&self) -> Self {
        match self.kind {
            AmbientKind::Closed => Ambient { kind: AmbientKind::Open, ..self.clone() },
            _ => self.clone(),
        }
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AmbientMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl<S: Scalar> fmt::Display for Ambient<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AmbientKind::FullLine => f.write_str("R"),
            AmbientKind::Open => write!(f, "({}, {})", self.lo, self.hi),
            AmbientKind::Closed => write!(f, "[{}, {}]", self.lo, self.hi),
        }
    }
}

/// An open interval `(lo, hi)` with `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval<S> {
    pub lo: Extended<S>,
    pub hi: Extended<S>,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: Extended<S>, hi: Extended<S>) -> Result<Self> {
        if lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::MalformedInterval { lo: lo.to_string(), hi: hi.to_string() })
        }
    }

    pub fn finite(lo: S, hi: S) -> Result<Self> {
        Self::new(lo.into(), hi.into())
    }

    pub fn length(&self) -> Option<S> {
        match (&self.lo, &self.hi) {
            (Extended::Finite(a), Extended::Finite(b)) => Some(b.clone() - a.clone()),
            _ => None,
        }
    }

    pub fn contains_open(&self, x: &S) -> bool {
        let x = Extended::Finite(x.clone());
        self.lo < x && x < self.hi
    }
}

/// Finite union of open intervals in strict normal form, relative to an ambient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementarySet<S> {
    ambient: Ambient<S>,
    intervals: Vec<Interval<S>>,
}

/// Finite boundary points of an elementary set inside its ambient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryPoints<S> {
    pub points: Vec<S>,
}

impl<S: Scalar> ElementarySet<S> {
    pub fn empty(ambient: &Ambient<S>) -> Self {
        ElementarySet { ambient: ambient.clone(), intervals: Vec::new() }
    }

    pub fn full(ambient: &Ambient<S>) -> Self {
        ElementarySet {
            ambient: ambient.clone(),
            intervals: vec![Interval { lo: ambient.lo.clone(), hi: ambient.hi.clone() }],
        }
    }

    /// `int(clos(∪ raw))` in normal form. Overlapping or touching intervals merge.
    pub fn regularize<I>(raw: I, ambient: &Ambient<S>) -> Result<Self>
    where
        I: IntoIterator<Item = (Extended<S>, Extended<S>)>,
    {
        let mut items = Vec::new();
        for (lo, hi) in raw {
            let iv = Interval::new(lo, hi)?;
            if iv.lo < ambient.lo || iv.hi > ambient.hi {
                return Err(Error::OutOfAmbient {
                    lo: iv.lo.to_string(),
                    hi: iv.hi.to_string(),
                    ambient: ambient.to_string(),
                });
            }
            items.push(iv);
        }
        Ok(Self::merge_sorted(items, ambient))
    }

    /// Convenience constructor from finite endpoint pairs.
    pub fn from_pairs(pairs: &[(S, S)], ambient: &Ambient<S>) -> Result<Self> {
        Self::regularize(
            pairs.iter().map(|(a, b)| (Extended::Finite(a.clone()), Extended::Finite(b.clone()))),
            ambient,
        )
    }

    /// Like [`regularize`](Self::regularize) but clips to the ambient instead of
    /// rejecting, and silently drops degenerate pieces.
    pub(crate) fn regularize_clipped<I>(raw: I, ambient: &Ambient<S>) -> Self
    where
        I: IntoIterator<Item = (Extended<S>, Extended<S>)>,
    {
        let items = raw
            .into_iter()
            .filter_map(|(lo, hi)| {
                let lo = max(lo, ambient.lo.clone());
                let hi = min(hi, ambient.hi.clone());
                (lo < hi).then_some(Interval { lo, hi })
            })
            .collect();
        Self::merge_sorted(items, ambient)
    }

    fn merge_sorted(mut items: Vec<Interval<S>>, ambient: &Ambient<S>) -> Self {
        items.sort();
        let mut out: Vec<Interval<S>> = Vec::with_capacity(items.len());
        for iv in items {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        ElementarySet { ambient: ambient.clone(), intervals: out }
    }

    pub fn ambient(&self) -> &Ambient<S> {
        &self.ambient
    }

    pub fn intervals(&self) -> &[Interval<S>] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full(&self.ambient)
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.ambient.check_same(&other.ambient)?;
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = max(&a[i].lo, &b[j].lo);
            let hi = min(&a[i].hi, &b[j].hi);
            if lo < hi {
                out.push(Interval { lo: lo.clone(), hi: hi.clone() });
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(ElementarySet { ambient: self.ambient.clone(), intervals: out })
    }

    /// `int(S ∖ E)`: the gaps of `E` inside the ambient.
    pub fn neg(&self) -> Self {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = self.ambient.lo.clone();
        for iv in &self.intervals {
            if cursor < iv.lo {
                out.push(Interval { lo: cursor, hi: iv.lo.clone() });
            }
            cursor = iv.hi.clone();
        }
        if cursor < self.ambient.hi {
            out.push(Interval { lo: cursor, hi: self.ambient.hi.clone() });
        }
        ElementarySet { ambient: self.ambient.clone(), intervals: out }
    }

    /// The smallest regular open set containing both operands.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.ambient.check_same(&other.ambient)?;
        let items = self.intervals.iter().chain(other.intervals.iter()).cloned().collect();
        Ok(Self::merge_sorted(items, &self.ambient))
    }

    pub fn join_all<'a, I>(sets: I, ambient: &Ambient<S>) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        let mut items = Vec::new();
        for s in sets {
            ambient.check_same(&s.ambient)?;
            items.extend(s.intervals.iter().cloned());
        }
        Ok(Self::merge_sorted(items, ambient))
    }

    /// A point inside the first interval, or `None` for the empty set.
    pub fn interior_point(&self) -> Option<S> {
        let iv = self.intervals.first()?;
        Some(match (iv.lo.finite(), iv.hi.finite()) {
            (Some(a), Some(b)) => S::midpoint(a, b),
            (Some(a), None) => a.clone() + S::one(),
            (None, Some(b)) => b.clone() - S::one(),
            (None, None) => S::zero(),
        })
    }

    /// `E ⊆ F`.
    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        Ok(self.meet(other)? == *self)
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.meet(other)?.is_empty())
    }

    /// Membership of a point, honoring the half-open convention at the ends of
    /// a closed ambient.
    pub fn contains_point(&self, x: &S) -> bool {
        if !self.ambient.contains_point(x) {
            return false;
        }
        let ex = Extended::Finite(x.clone());
        self.intervals.iter().any(|iv| {
            (iv.lo < ex && ex < iv.hi)
                || (self.ambient.is_closed() && (ex == iv.lo && iv.lo == self.ambient.lo))
                || (self.ambient.is_closed() && (ex == iv.hi && iv.hi == self.ambient.hi))
        })
    }

    /// `(x, x+ε) ⊆ E` for some `ε > 0`.
    pub fn has_right_germ(&self, x: &S) -> bool {
        let ex = Extended::Finite(x.clone());
        self.intervals.iter().any(|iv| iv.lo <= ex && ex < iv.hi)
    }

    /// `(x-ε, x) ⊆ E` for some `ε > 0`.
    pub fn has_left_germ(&self, x: &S) -> bool {
        let ex = Extended::Finite(x.clone());
        self.intervals.iter().any(|iv| iv.lo < ex && ex <= iv.hi)
    }

    /// Finite endpoints lying strictly inside the ambient's end points.
    ///
    /// With the half-open convention a closed ambient's end point is never a
    /// boundary point: either the set contains it, or the set stays a positive
    /// distance away from it.
    pub fn boundary(&self) -> BoundaryPoints<S> {
        let mut points = Vec::new();
        for iv in &self.intervals {
            for e in [&iv.lo, &iv.hi] {
                if let Extended::Finite(v) = e {
                    if self.ambient.lo < *e && *e < self.ambient.hi {
                        points.push(v.clone());
                    }
                }
            }
        }
        BoundaryPoints { points }
    }

    /// Total length, `None` when some interval is unbounded.
    pub fn length(&self) -> Option<S> {
        let mut total = S::zero();
        for iv in &self.intervals {
            total = total + iv.length()?;
        }
        Some(total)
    }

    /// `int(clos(E))` in `[a,b]` for `E` over the open interval `(a,b)`.
    pub fn extend(&self) -> Result<Self> {
        if self.ambient.kind != AmbientKind::Open || !self.ambient.is_bounded() {
            return Err(Error::UnboundedAmbient(self.ambient.to_string()));
        }
        let ambient = self.ambient.compactified()?;
        Ok(ElementarySet { ambient, intervals: self.intervals.clone() })
    }

    /// `R ∩ (a,b)` for `R` over `[a,b]`; inverse of [`extend`](Self::extend).
    pub fn restrict(&self) -> Result<Self> {
        if self.ambient.kind != AmbientKind::Closed {
            return Err(Error::InvalidAmbient(format!("restrict needs a closed ambient, got {}", self.ambient)));
        }
        Ok(ElementarySet { ambient: self.ambient.interior(), intervals: self.intervals.clone() })
    }

    /// Same intervals viewed in another ambient whose closure contains them.
    pub fn reambient(&self, ambient: &Ambient<S>) -> Result<Self> {
        Self::regularize(self.intervals.iter().map(|iv| (iv.lo.clone(), iv.hi.clone())), ambient)
    }

    /// Length of `E ∩ (lo, hi)` for a bounded window.
    pub fn length_within(&self, lo: &S, hi: &S) -> S {
        let (wl, wh) = (Extended::Finite(lo.clone()), Extended::Finite(hi.clone()));
        let mut total = S::zero();
        for iv in &self.intervals {
            let a = max(&iv.lo, &wl);
            let b = min(&iv.hi, &wh);
            if a < b {
                if let (Extended::Finite(a), Extended::Finite(b)) = (a, b) {
                    total = total + (b.clone() - a.clone());
                }
            }
        }
        if total < S::zero() {
            S::zero()
        } else {
            total
        }
    }

    /// Every finite endpoint, sorted.
    pub fn endpoints(&self) -> Vec<S> {
        let mut v: Vec<S> = self
            .intervals
            .iter()
            .flat_map(|iv| [iv.lo.finite().cloned(), iv.hi.finite().cloned()])
            .flatten()
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

impl<S: Scalar> fmt::Display for ElementarySet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅ in {}", self.ambient);
        }
        let closed = self.ambient.is_closed();
        for (k, iv) in self.intervals.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            let l = if closed && iv.lo == self.ambient.lo { '[' } else { '(' };
            let r = if closed && iv.hi == self.ambient.hi { ']' } else { ')' };
            write!(f, "{l}{}, {}{r}", iv.lo, iv.hi)?;
        }
        write!(f, " in {}", self.ambient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{q, qx};
    use num_rational::BigRational as Q;

    fn set(pairs: &[(i64, i64, i64, i64)], amb: &Ambient<Q>) -> ElementarySet<Q> {
        ElementarySet::regularize(pairs.iter().map(|&(a, b, c, d)| (qx(a, b), qx(c, d))), amb).unwrap()
    }

    fn line() -> Ambient<Q> {
        Ambient::full_line()
    }

    #[test]
    fn regularize_merges_touching() {
        let e = set(&[(0, 1, 1, 1), (1, 1, 2, 1)], &line());
        assert_eq!(e, set(&[(0, 1, 2, 1)], &line()));
    }

    #[test]
    fn regularize_empty_and_overlap() {
        assert!(ElementarySet::<Q>::regularize(vec![], &line()).unwrap().is_empty());
        let unit = Ambient::open_unit();
        let e = set(&[(0, 1, 1, 2), (1, 4, 3, 4)], &unit);
        assert_eq!(e, set(&[(0, 1, 3, 4)], &unit));
    }

    #[test]
    fn regularize_errors() {
        let unit = Ambient::<Q>::open_unit();
        let bad = ElementarySet::regularize(vec![(qx(1, 2), qx(1, 2))], &unit);
        assert!(matches!(bad, Err(Error::MalformedInterval { .. })));
        let out = ElementarySet::regularize(vec![(qx(1, 2), qx(3, 2))], &unit);
        assert!(matches!(out, Err(Error::OutOfAmbient { .. })));
    }

    #[test]
    fn meet_examples() {
        let l = line();
        assert_eq!(set(&[(0, 1, 2, 1)], &l).meet(&set(&[(1, 1, 3, 1)], &l)).unwrap(), set(&[(1, 1, 2, 1)], &l));
        let e = set(&[(0, 1, 1, 1), (2, 1, 3, 1)], &l);
        assert!(e.meet(&ElementarySet::empty(&l)).unwrap().is_empty());
        let m = e.meet(&set(&[(1, 2, 5, 2)], &l)).unwrap();
        assert_eq!(m, set(&[(1, 2, 1, 1), (2, 1, 5, 2)], &l));
        let other = ElementarySet::empty(&Ambient::open_unit());
        assert!(matches!(e.meet(&other), Err(Error::AmbientMismatch(..))));
    }

    #[test]
    fn neg_examples() {
        let unit = Ambient::open_unit();
        assert_eq!(set(&[(0, 1, 1, 2)], &unit).neg(), set(&[(1, 2, 1, 1)], &unit));
        assert_eq!(ElementarySet::empty(&unit).neg(), ElementarySet::full(&unit));
        let l = line();
        let n = set(&[(0, 1, 1, 1), (2, 1, 3, 1)], &l).neg();
        let expect = ElementarySet::regularize(
            vec![(Extended::NegInf, qx(0, 1)), (qx(1, 1), qx(2, 1)), (qx(3, 1), Extended::PosInf)],
            &l,
        )
        .unwrap();
        assert_eq!(n, expect);
    }

    #[test]
    fn join_examples() {
        let l = line();
        assert_eq!(set(&[(0, 1, 1, 1)], &l).join(&set(&[(1, 1, 2, 1)], &l)).unwrap(), set(&[(0, 1, 2, 1)], &l));
        let unit = Ambient::open_unit();
        let e = set(&[(1, 3, 1, 2)], &unit);
        assert!(e.join(&e.neg()).unwrap().is_full());
        let g = set(&[(0, 1, 1, 4)], &unit).join(&set(&[(1, 2, 1, 1)], &unit)).unwrap();
        assert_eq!(g.intervals().len(), 2);
    }

    #[test]
    fn boundary_examples() {
        let unit = Ambient::open_unit();
        assert_eq!(set(&[(0, 1, 1, 2)], &unit).boundary().points, vec![q(1, 2)]);
        assert!(ElementarySet::full(&unit).boundary().points.is_empty());
        let cl = Ambient::<Q>::closed_unit();
        // lo = 0 in [0,1] denotes [0,1/4), so 0 is inside the set, not on its boundary
        let e = set(&[(0, 1, 1, 4), (1, 2, 1, 1)], &cl);
        assert_eq!(e.boundary().points, vec![q(1, 4), q(1, 2)]);
        assert!(e.contains_point(&q(0, 1)) && e.contains_point(&q(1, 1)));
    }

    #[test]
    fn extend_examples() {
        let unit = Ambient::<Q>::open_unit();
        let cl = Ambient::<Q>::closed_unit();
        let e = set(&[(0, 1, 1, 2)], &unit).extend().unwrap();
        assert_eq!(e.ambient(), &cl);
        assert!(e.contains_point(&q(0, 1)));
        assert!(!e.contains_point(&q(1, 2)));
        assert!(ElementarySet::full(&unit).extend().unwrap().is_full());
        let mid = set(&[(1, 4, 1, 2)], &unit).extend().unwrap();
        assert!(!mid.contains_point(&q(1, 4)));
        assert_eq!(mid.restrict().unwrap(), set(&[(1, 4, 1, 2)], &unit));
        let half_line = Ambient::open(qx(0, 1), Extended::PosInf).unwrap();
        assert!(matches!(ElementarySet::full(&half_line).extend(), Err(Error::UnboundedAmbient(_))));
    }

    #[test]
    fn germs() {
        let l = line();
        let e = set(&[(0, 1, 1, 1)], &l);
        assert!(e.has_right_germ(&q(0, 1)));
        assert!(!e.has_left_germ(&q(0, 1)));
        assert!(e.has_left_germ(&q(1, 1)) && !e.has_right_germ(&q(1, 1)));
    }
}
