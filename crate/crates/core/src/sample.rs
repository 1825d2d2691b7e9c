//! Seeded random inputs for property checks and the self-test.
//!
//! Every generator draws endpoints from a grid `k/den` with `den ≤ max_den`,
//! so results stay exact and small.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::credence::{Credence, DensityPiece, Side};
use crate::elementary::{Ambient, ElementarySet};
use crate::error::Result;
use crate::integrator::BPartition;
use crate::maps::MonotoneAffineMap;
use crate::piecewise::PiecewiseAffine;
use crate::scalar::{Extended, Scalar};

/// A rational in `[lo, hi]` on a random grid of denominator at most `max_den`.
pub fn rational_in<S: Scalar, R: Rng>(rng: &mut R, lo: &S, hi: &S, max_den: i64) -> S {
    let den = rng.gen_range(1..=max_den);
    let k = rng.gen_range(0..=den);
    lo.clone() + (hi.clone() - lo.clone()) * S::ratio(k, den)
}

/// `count` distinct sorted rationals strictly inside `(lo, hi)`.
pub fn distinct_points<S: Scalar, R: Rng>(rng: &mut R, lo: &S, hi: &S, count: usize, max_den: i64) -> Vec<S> {
    let mut pts: Vec<S> = Vec::with_capacity(count);
    let mut tries = 0;
    while pts.len() < count && tries < 64 * (count + 1) {
        tries += 1;
        let p = rational_in(rng, lo, hi, max_den.max(2));
        if p > *lo && p < *hi && !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts.sort();
    pts
}

fn bounds<S: Scalar>(ambient: &Ambient<S>) -> (S, S) {
    let lo = ambient.lo().finite().cloned().unwrap_or_else(|| S::from_i64(-4));
    let hi = ambient.hi().finite().cloned().unwrap_or_else(|| S::from_i64(4));
    (lo, hi)
}

/// A random element with up to `max_intervals` intervals. On an unbounded
/// ambient the infinite ends are used now and then.
pub fn elementary<S: Scalar, R: Rng>(
    rng: &mut R,
    ambient: &Ambient<S>,
    max_intervals: usize,
    max_den: i64,
) -> Result<ElementarySet<S>> {
    let (lo, hi) = bounds(ambient);
    let k = rng.gen_range(0..=max_intervals);
    let mut cuts = distinct_points(rng, &lo, &hi, 2 * k, max_den);
    if rng.gen_bool(0.25) {
        cuts.insert(0, lo.clone());
    }
    if rng.gen_bool(0.25) {
        cuts.push(hi.clone());
    }
    if cuts.len() % 2 == 1 {
        cuts.pop();
    }
    let to_ext = |x: &S, end: &Extended<S>, at: &S| if x == at { end.clone() } else { Extended::Finite(x.clone()) };
    let raw = cuts
        .chunks(2)
        .map(|c| (to_ext(&c[0], ambient.lo(), &lo), to_ext(&c[1], ambient.hi(), &hi)))
        .collect::<Vec<_>>();
    ElementarySet::regularize(raw, ambient)
}

/// A partition of `target` into at most `max_cells` nonempty cells: the
/// target is cut at random interior points and the pieces dealt into cells.
pub fn partition<S: Scalar, R: Rng>(
    rng: &mut R,
    target: &ElementarySet<S>,
    max_cells: usize,
    max_den: i64,
) -> Result<BPartition<S>> {
    let ambient = target.ambient();
    let mut pieces: Vec<(Extended<S>, Extended<S>)> = Vec::new();
    for iv in target.intervals() {
        let lo = iv.lo.finite().cloned().unwrap_or_else(|| iv.hi.finite().map_or(S::zero(), |h| h.clone() - S::one()) - S::one());
        let hi = iv.hi.finite().cloned().unwrap_or_else(|| iv.lo.finite().map_or(S::zero(), |l| l.clone() + S::one()) + S::one());
        let count = rng.gen_range(0..=2);
        let cuts = distinct_points(rng, &lo, &hi, count, max_den);
        let mut ends = vec![iv.lo.clone()];
        ends.extend(cuts.into_iter().map(Extended::Finite));
        ends.push(iv.hi.clone());
        for w in ends.windows(2) {
            pieces.push((w[0].clone(), w[1].clone()));
        }
    }
    let cells_wanted = rng.gen_range(1..=max_cells.max(1));
    let mut buckets: Vec<Vec<(Extended<S>, Extended<S>)>> = vec![Vec::new(); cells_wanted];
    for p in pieces {
        buckets[rng.gen_range(0..cells_wanted)].push(p);
    }
    let mut cells = Vec::new();
    for b in buckets {
        if !b.is_empty() {
            cells.push(ElementarySet::regularize(b, ambient)?);
        }
    }
    cells.shuffle(rng);
    if cells.is_empty() {
        return Ok(BPartition::trivial(target.clone()));
    }
    BPartition::new(target.clone(), cells)
}

/// A continuous piecewise-affine function with breakpoints in `[lo, hi]` and
/// values in `[-vmax, vmax]`.
pub fn function<S: Scalar, R: Rng>(
    rng: &mut R,
    lo: &S,
    hi: &S,
    max_pieces: usize,
    vmax: i64,
    max_den: i64,
) -> Result<PiecewiseAffine<S>> {
    let count = rng.gen_range(0..max_pieces.max(1));
    let inner = distinct_points(rng, lo, hi, count, max_den);
    let mut xs = vec![lo.clone()];
    xs.extend(inner);
    xs.push(hi.clone());
    let vs = xs.iter().map(|_| rational_in(rng, &S::from_i64(-vmax), &S::from_i64(vmax), max_den)).collect();
    PiecewiseAffine::new(xs, vs)
}

/// One of length, a germ at a grid point or a piecewise-uniform density, or a
/// mixture of several. Unbounded ambients get point masses and end masses
/// only.
pub fn credence<S: Scalar, R: Rng>(rng: &mut R, ambient: &Ambient<S>, max_den: i64) -> Result<Credence<S>> {
    let parts = rng.gen_range(1..=3);
    let mut out = Vec::with_capacity(parts);
    for _ in 0..parts {
        out.push((S::from_i64(rng.gen_range(1..=4)), simple_credence(rng, ambient, max_den)?));
    }
    if out.len() == 1 {
        return Ok(out.pop().expect("one part").1);
    }
    let total = out.iter().fold(S::zero(), |a, (w, _)| a + w.clone());
    Credence::mixture(out.into_iter().map(|(w, c)| (w / total.clone(), c)).collect())
}

fn simple_credence<S: Scalar, R: Rng>(rng: &mut R, ambient: &Ambient<S>, max_den: i64) -> Result<Credence<S>> {
    let (lo, hi) = bounds(ambient);
    let choice = if ambient.is_bounded() { rng.gen_range(0..4) } else { rng.gen_range(1..3) };
    match choice {
        0 => Credence::lebesgue(ambient),
        1 => {
            let x = distinct_points(rng, &lo, &hi, 1, max_den).pop().unwrap_or_else(|| S::midpoint(&lo, &hi));
            let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
            Credence::point_mass(ambient, x, side)
        }
        2 => {
            use crate::credence::End;
            let end = match (ambient.lo().is_finite(), ambient.hi().is_finite(), rng.gen_bool(0.5)) {
                (false, _, true) | (false, true, _) => End::NegInf,
                (_, false, _) => End::PosInf,
                (true, true, true) => End::AmbientLeft,
                (true, true, false) => End::AmbientRight,
            };
            Credence::end_mass(ambient, end)
        }
        _ => {
            let count = rng.gen_range(1..=3);
            let cuts = distinct_points(rng, &lo, &hi, count, max_den);
            let mut xs = vec![lo.clone()];
            xs.extend(cuts);
            xs.push(hi.clone());
            let raw: Vec<S> = xs.windows(2).map(|_| S::from_i64(rng.gen_range(0..=3))).collect();
            let total = raw.iter().fold(S::zero(), |a, w| a + w.clone());
            let pieces = xs
                .windows(2)
                .zip(&raw)
                .map(|(w, m)| DensityPiece {
                    lo: w[0].clone(),
                    hi: w[1].clone(),
                    mass: if total.is_zero() { S::one() / S::from_i64(raw.len() as i64) } else { m.clone() / total.clone() },
                })
                .collect();
            Credence::density(ambient, pieces)
        }
    }
}

/// An increasing or decreasing piecewise-affine bijection from `domain` onto
/// an open interval.
pub fn monotone_map<S: Scalar, R: Rng>(
    rng: &mut R,
    domain_lo: &S,
    domain_hi: &S,
    max_pieces: usize,
    max_den: i64,
) -> Result<MonotoneAffineMap<S>> {
    let count = rng.gen_range(0..max_pieces.max(1));
    let inner = distinct_points(rng, domain_lo, domain_hi, count, max_den);
    let mut xs = vec![domain_lo.clone()];
    xs.extend(inner);
    xs.push(domain_hi.clone());
    let mut vs = Vec::with_capacity(xs.len());
    let mut v = rational_in(rng, &S::from_i64(-2), &S::from_i64(2), max_den);
    for _ in 0..xs.len() {
        vs.push(v.clone());
        v = v + S::ratio(rng.gen_range(1..=4), rng.gen_range(1..=max_den.max(1)));
    }
    if rng.gen_bool(0.5) {
        vs.reverse();
    }
    let (a, b) = if vs[0] < vs[vs.len() - 1] {
        (vs[0].clone(), vs[vs.len() - 1].clone())
    } else {
        (vs[vs.len() - 1].clone(), vs[0].clone())
    };
    let codomain = Ambient::open(Extended::Finite(a), Extended::Finite(b))?;
    MonotoneAffineMap::new(PiecewiseAffine::new(xs, vs)?, codomain, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational as Q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_inputs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let amb = Ambient::<Q>::open_unit();
        for _ in 0..200 {
            let b = elementary(&mut rng, &amb, 3, 12).unwrap();
            let p = partition(&mut rng, &b, 4, 12).unwrap();
            let mu = credence(&mut rng, &amb, 12).unwrap();
            assert!(mu.check_additivity(&p).unwrap());
            let phi = monotone_map(&mut rng, &Q::from_i64(0), &Q::from_i64(1), 3, 8).unwrap();
            assert_eq!(phi.domain(), &amb);
        }
        let full = Ambient::<Q>::full_line();
        for _ in 0..100 {
            let b = elementary(&mut rng, &full, 3, 12).unwrap();
            partition(&mut rng, &b, 4, 12).unwrap();
            credence(&mut rng, &full, 12).unwrap();
        }
    }
}
