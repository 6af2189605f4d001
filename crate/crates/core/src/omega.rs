//! Compositions `Ω_{n,k}`, Ω-completeness and the (is)-property.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::ladder::ScaleSequence;
use crate::spectra::{box_witnesses, spectrum_window, PlanarBasis, SpectrumFamily, Window};

/// A set of `n`-tuples of positive integers summing to `k`, sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaSet {
    n: usize,
    k: usize,
    tuples: Vec<Vec<usize>>,
}

impl OmegaSet {
    pub fn new(n: usize, k: usize, mut tuples: Vec<Vec<usize>>) -> Result<Self> {
        for t in &tuples {
            if t.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.len() });
            }
            if t.iter().any(|&m| m == 0 || m > k) || t.iter().sum::<usize>() != k {
                return Err(Error::TupleOutOfRange { tuple: t.clone(), k });
            }
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(OmegaSet { n, k, tuples })
    }

    pub fn empty(n: usize, k: usize) -> Self {
        OmegaSet { n, k, tuples: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok()
    }

    /// The tuples kept by `keep`, as a new set.
    pub fn filter(&self, mut keep: impl FnMut(&[usize]) -> bool) -> OmegaSet {
        let tuples = self.tuples.iter().filter(|t| keep(t)).cloned().collect();
        OmegaSet { n: self.n, k: self.k, tuples }
    }
}

/// All compositions of `k` into `n` positive parts, lexicographically.
pub fn enumerate_compositions(n: usize, k: usize) -> Result<OmegaSet> {
    if n == 0 || k < n {
        return Err(Error::CompositionRange { n, k });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    compositions_rec(n, k, &mut current, &mut out);
    Ok(OmegaSet { n, k, tuples: out })
}

fn compositions_rec(parts: usize, rest: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        current.push(rest);
        out.push(current.clone());
        current.pop();
        return;
    }
    for first in 1..=rest - (parts - 1) {
        current.push(first);
        compositions_rec(parts - 1, rest - first, current, out);
        current.pop();
    }
}

/// Tuples of `Ω_{n+1,k}` with `m_1 >= m_2 >= … >= m_n >= 1` (last entry free).
pub fn monotone_tuples(n: usize, k: usize) -> Result<OmegaSet> {
    let all = enumerate_compositions(n + 1, k)?;
    Ok(all.filter(|t| t[..n].windows(2).all(|w| w[0] >= w[1])))
}

/// Every tuple of `{1..k}^n`, lexicographically.
pub fn cube_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    if n == 0 || k == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut t = vec![1usize; n];
    loop {
        out.push(t.clone());
        let mut j = n;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if t[j] < k {
                t[j] += 1;
                break;
            }
            t[j] = 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CardinalityReport {
    pub n: usize,
    pub k: usize,
    /// `C(k−1, n−1)`.
    pub card: BigUint,
    /// `k^{n−1}`.
    pub k_power: BigUint,
    pub within_upper_bound: bool,
    /// `card / k^{n−1}`, the empirical lower constant.
    pub ratio: BigRational,
    pub ratio_f64: f64,
}

pub fn cardinality_bounds_check(n: usize, k: usize) -> Result<CardinalityReport> {
    if n == 0 || k < n {
        return Err(Error::CompositionRange { n, k });
    }
    let card = num_integer::binomial(BigUint::from(k - 1), BigUint::from(n - 1));
    let k_power = num_traits::pow(BigUint::from(k), n - 1);
    let ratio = BigRational::new(BigInt::from(card.clone()), BigInt::from(k_power.clone()));
    let ratio_f64 = ratio_to_f64(&ratio);
    Ok(CardinalityReport { n, k, within_upper_bound: card <= k_power, card, k_power, ratio, ratio_f64 })
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => f64::NAN,
    }
}

/// Realized part of Ω for given scale sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completeness {
    pub realized: OmegaSet,
    /// For each realized tuple, the first spectrum tuple found in its box.
    pub witnesses: BTreeMap<Vec<usize>, Vec<i64>>,
    pub missing: Vec<Vec<usize>>,
}

impl Completeness {
    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Decides, for each `m ∈ Ω`, whether the spectrum has a tuple in
/// `∏_j (s_{j,m_j−1}, s_{j,m_j}]` inside `window`.
pub fn completeness(
    family: &SpectrumFamily,
    sequences: &[ScaleSequence],
    omega: &OmegaSet,
    window: &Window,
) -> Result<Completeness> {
    let n = family.dimension();
    if sequences.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: sequences.len() });
    }
    if omega.n() != n && !omega.is_empty() {
        return Err(Error::DimensionMismatch { expected: n, found: omega.n() });
    }
    if window.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: window.dim() });
    }
    if let Some(s) = sequences.iter().find(|s| s.k() < omega.k()) {
        return Err(Error::TooFewScales(s.as_slice().len()));
    }
    // only the part of the window covered by the boxes matters
    let mut ranges = Vec::with_capacity(n);
    let mut empty = false;
    for (j, s) in sequences.iter().enumerate() {
        let (lo, hi) = window.range(j);
        let lo = lo.max(s.first() + 1);
        let hi = hi.min(s.get(omega.k()));
        empty |= lo > hi;
        ranges.push((lo, hi));
    }
    let witnesses_all = if empty {
        BTreeMap::new()
    } else {
        let spectrum = spectrum_window(family, &Window::new(ranges)?)?;
        box_witnesses(&spectrum, sequences)
    };
    let mut witnesses = BTreeMap::new();
    let mut missing = Vec::new();
    for m in omega.tuples() {
        match witnesses_all.get(m) {
            Some(w) => {
                witnesses.insert(m.clone(), w.clone());
            }
            None => missing.push(m.clone()),
        }
    }
    let realized = omega.filter(|m| witnesses.contains_key(m));
    Ok(Completeness { realized, witnesses, missing })
}

/// Planar intervals `[0, 2^p] × [0, 2^q]` together with the ambient basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShapeList2D {
    pub shapes: Vec<(i64, i64)>,
    pub basis: PlanarBasis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsPropertyReport {
    /// Index pairs `(i, j)` where shape `i` fits inside shape `j`.
    pub comparable: Vec<(usize, usize)>,
    /// Index pairs `(i, j)`, `i <= j`, whose intersection is not in the basis.
    pub not_closed: Vec<(usize, usize)>,
    pub duplicates: Vec<(usize, usize)>,
    pub passed: bool,
}

pub fn is_property_check(list: &ShapeList2D) -> IsPropertyReport {
    let s = &list.shapes;
    let mut comparable = Vec::new();
    let mut not_closed = Vec::new();
    let mut duplicates = Vec::new();
    for i in 0..s.len() {
        for j in i..s.len() {
            let (a, b) = (s[i], s[j]);
            if i != j {
                if a == b {
                    duplicates.push((i, j));
                } else if a.0 <= b.0 && a.1 <= b.1 {
                    comparable.push((i, j));
                } else if b.0 <= a.0 && b.1 <= a.1 {
                    comparable.push((j, i));
                }
            }
            if !list.basis.contains(a.0.min(b.0), a.1.min(b.1)) {
                not_closed.push((i, j));
            }
        }
    }
    let passed = comparable.is_empty() && not_closed.is_empty() && duplicates.is_empty();
    IsPropertyReport { comparable, not_closed, duplicates, passed }
}

/// Scale sequences `(p_m)` and `(q_m)` read off `k + 1` incomparable
/// shapes: sorted by `p`, the `q` values decrease, and `R_i` has sides
/// `(p_i, q_{k−i})`.
pub fn planar_sequences(list: &ShapeList2D) -> Result<(ScaleSequence, ScaleSequence)> {
    let mut shapes = list.shapes.clone();
    shapes.sort_unstable();
    let p: Vec<i64> = shapes.iter().map(|s| s.0).collect();
    let mut q: Vec<i64> = shapes.iter().map(|s| s.1).collect();
    q.reverse();
    Ok((ScaleSequence::new(p)?, ScaleSequence::new(q)?))
}

/// The three-dimensional shape `R_{m_1} ∩ R_{k−m_2} × [0, 2^{t_{m_3}}]`.
pub fn planar_product_shape(p: &ScaleSequence, q: &ScaleSequence, t: &ScaleSequence, m: &[usize]) -> Vec<i64> {
    vec![p.get(m[0]), q.get(m[1]), t.get(m[2])]
}

/// `card(Ω) / k^e` as an exact rational.
pub fn density_ratio(card: usize, k: usize, e: usize) -> BigRational {
    let denom = num_traits::pow(BigInt::from(k), e);
    if denom == BigInt::from(0) {
        return BigRational::one();
    }
    BigRational::new(BigInt::from(card), denom)
}
