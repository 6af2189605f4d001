//! Spectra of rare bases, nets, density and scale-sequence extraction.
//!
//! A basis member `R_1 × … × R_n` contributes the integer tuple
//! `(⌈log₂|R_1|⌉, …, ⌈log₂|R_n|⌉)` to the spectrum. Infinite index sets are
//! only ever looked at through a finite [`Window`]; every net, density and
//! extraction decision here is relative to that window.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::ladder::ScaleSequence;

/// A set of integers, explicit or generated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IntSet {
    /// Every integer.
    All,
    /// A finite list (kept sorted and deduplicated).
    Explicit(Vec<i64>),
    /// `{start + step * j : j ∈ Z}`.
    Arithmetic { start: i64, step: i64 },
    /// `{scale * j² + offset : j >= 0}`.
    Quadratic { scale: i64, offset: i64 },
    /// `start, start + g, start + g + g*r, …` with gaps `g * r^j`.
    GeometricGaps { start: i64, first_gap: i64, ratio: i64 },
}

impl IntSet {
    pub fn explicit(mut values: Vec<i64>) -> Self {
        values.sort_unstable();
        values.dedup();
        IntSet::Explicit(values)
    }

    /// `{j² : j >= 0}`.
    pub fn squares() -> Self {
        IntSet::Quadratic { scale: 1, offset: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidFamily(msg.to_string()));
        match *self {
            IntSet::Arithmetic { step, .. } if step < 1 => bad("arithmetic step must be positive"),
            IntSet::Quadratic { scale, .. } if scale < 1 => bad("quadratic scale must be positive"),
            IntSet::GeometricGaps { first_gap, ratio, .. } if first_gap < 1 || ratio < 1 => {
                bad("geometric gaps need first_gap >= 1 and ratio >= 1")
            }
            _ => Ok(()),
        }
    }

    /// Sorted members in `[lo, hi]`.
    pub fn elements_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        if lo > hi {
            return Vec::new();
        }
        match self {
            IntSet::All => (lo..=hi).collect(),
            IntSet::Explicit(values) => {
                let a = values.partition_point(|&v| v < lo);
                let b = values.partition_point(|&v| v <= hi);
                values[a..b].to_vec()
            }
            &IntSet::Arithmetic { start, step } => {
                let step = step.max(1);
                let first = start + ceil_div(lo - start, step) * step;
                let mut out = Vec::new();
                let mut x = first;
                while x <= hi {
                    out.push(x);
                    x += step;
                }
                out
            }
            &IntSet::Quadratic { scale, offset } => {
                let scale = scale.max(1);
                let mut out = Vec::new();
                let mut j: i64 = 0;
                loop {
                    let Some(v) = j.checked_mul(j).and_then(|q| q.checked_mul(scale)).and_then(|q| q.checked_add(offset)) else {
                        break;
                    };
                    if v > hi {
                        break;
                    }
                    if v >= lo {
                        out.push(v);
                    }
                    j += 1;
                }
                out
            }
            &IntSet::GeometricGaps { start, first_gap, ratio } => {
                let mut out = Vec::new();
                let mut x = start;
                let mut gap = first_gap.max(1);
                while x <= hi {
                    if x >= lo {
                        out.push(x);
                    }
                    match x.checked_add(gap) {
                        Some(next) => x = next,
                        None => break,
                    }
                    gap = gap.saturating_mul(ratio.max(1));
                }
                out
            }
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        match self {
            IntSet::All => true,
            IntSet::Explicit(values) => values.binary_search(&x).is_ok(),
            &IntSet::Arithmetic { start, step } => (x - start).rem_euclid(step.max(1)) == 0,
            _ => !self.elements_in(x, x).is_empty(),
        }
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// A finite box `∏ [lo_j, hi_j]` of integer tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    ranges: Vec<(i64, i64)>,
}

impl Window {
    pub fn new(ranges: Vec<(i64, i64)>) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::InvalidWindow("no coordinates".to_string()));
        }
        if let Some(&(lo, hi)) = ranges.iter().find(|(lo, hi)| lo > hi) {
            return Err(Error::InvalidWindow(format!("empty range {lo}:{hi}")));
        }
        Ok(Window { ranges })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: i64, hi: i64) -> Result<Self> {
        Window::new(alloc::vec![(lo, hi); n])
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn range(&self, axis: usize) -> (i64, i64) {
        self.ranges[axis]
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    pub fn contains(&self, tuple: &[i64]) -> bool {
        tuple.len() == self.ranges.len()
            && tuple.iter().zip(&self.ranges).all(|(&x, &(lo, hi))| lo <= x && x <= hi)
    }
}

/// A lexicographically sorted set of integer `n`-tuples, stored flat.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleSet {
    n: usize,
    data: Vec<i64>,
}

/// The tuples of a projection sharing one prefix, and their next coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub prefix: Vec<i64>,
    pub values: Vec<i64>,
}

impl TupleSet {
    pub fn new<I, T>(n: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[i64]>,
    {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for t in tuples {
            let t = t.as_ref();
            if t.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.len() });
            }
            rows.push(t.to_vec());
        }
        rows.sort_unstable();
        rows.dedup();
        Ok(TupleSet { n, data: rows.concat() })
    }

    fn from_sorted(n: usize, data: Vec<i64>) -> Self {
        debug_assert!(n == 0 || data.len() % n == 0);
        TupleSet { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.data.len() / self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.data.chunks_exact(self.n.max(1))
    }

    pub fn to_vecs(&self) -> Vec<Vec<i64>> {
        self.iter().map(<[i64]>::to_vec).collect()
    }

    pub fn contains(&self, tuple: &[i64]) -> bool {
        let rows: Vec<&[i64]> = self.iter().collect();
        rows.binary_search(&tuple).is_ok()
    }

    /// `π_len`: the distinct prefixes of length `len`.
    pub fn projection(&self, len: usize) -> TupleSet {
        let mut data: Vec<i64> = Vec::new();
        let mut last: Option<&[i64]> = None;
        for row in self.iter() {
            let p = &row[..len];
            if last != Some(p) {
                data.extend_from_slice(p);
                last = Some(p);
            }
        }
        TupleSet::from_sorted(len, data)
    }

    /// Sections of `π_len`: for each prefix `t` of length `len - 1`, the set
    /// `{τ : (t, τ) ∈ π_len}`. Requires `1 <= len <= n`.
    pub fn sections(&self, len: usize) -> Vec<Section> {
        let mut out: Vec<Section> = Vec::new();
        for row in self.iter() {
            let prefix = &row[..len - 1];
            let v = row[len - 1];
            match out.last_mut() {
                Some(sec) if sec.prefix == prefix => {
                    if sec.values.last() != Some(&v) {
                        sec.values.push(v);
                    }
                }
                _ => out.push(Section { prefix: prefix.to_vec(), values: alloc::vec![v] }),
            }
        }
        out
    }
}

/// Membership predicate for a two-dimensional basis, on exponent pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlanarBasis {
    /// All `(a, b)` with `a + b <= bound`.
    SumAtMost(i64),
    /// An explicit list of admissible pairs.
    Pairs(Vec<(i64, i64)>),
}

impl PlanarBasis {
    pub fn contains(&self, a: i64, b: i64) -> bool {
        match self {
            PlanarBasis::SumAtMost(bound) => a + b <= *bound,
            PlanarBasis::Pairs(pairs) => pairs.contains(&(a, b)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationSign {
    /// `w_n ∈ Γ + (w_{j_1} + … + w_{j_p})`.
    Plus,
    /// `w_n ∈ Γ − (w_{j_1} + … + w_{j_p})`.
    Minus,
}

/// One row of a θ-table: `w_n = log θ_index(2^{args})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaEntry {
    pub args: Vec<i64>,
    pub index: u64,
    pub value: i64,
}

/// A rare basis described through its spectrum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumFamily {
    /// Dyadic side lengths `2^{s_j}` with `s_j ∈ S_j`.
    FullProduct(Vec<IntSet>),
    /// `n = 3`, `w_3 ∈ Γ − w_2`.
    Soria(IntSet),
    /// `n = 3`, `w_3 ∈ Γ + w_2`.
    Zygmund(IntSet),
    /// `n = 3`, `w_3 ∈ Γ + w_1 + w_2`.
    Cordoba(IntSet),
    /// `w_j ∈ T_j` for `j < n` and `w_n ∈ Γ ∓ Σ_i w_{j_i}` (indices 1-based).
    LinearRelation {
        t_sets: Vec<IntSet>,
        gamma: IntSet,
        indices: Vec<usize>,
        sign: RelationSign,
    },
    /// `w_j ∈ T_j` for `j < n` and `w_n` read off a finite θ-table.
    ThetaTable { t_sets: Vec<IntSet>, entries: Vec<ThetaEntry> },
    /// Product of a planar basis with a one-dimensional dyadic basis.
    PlanarProduct { planar: PlanarBasis, third: IntSet },
    /// An explicit tuple list.
    Explicit { n: usize, tuples: Vec<Vec<i64>> },
}

impl SpectrumFamily {
    pub fn dimension(&self) -> usize {
        match self {
            SpectrumFamily::FullProduct(sets) => sets.len(),
            SpectrumFamily::Soria(_) | SpectrumFamily::Zygmund(_) | SpectrumFamily::Cordoba(_) => 3,
            SpectrumFamily::LinearRelation { t_sets, .. } => t_sets.len() + 1,
            SpectrumFamily::ThetaTable { t_sets, .. } => t_sets.len() + 1,
            SpectrumFamily::PlanarProduct { .. } => 3,
            SpectrumFamily::Explicit { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidFamily(msg));
        let n = self.dimension();
        if n == 0 {
            return bad("dimension must be at least 1".to_string());
        }
        match self {
            SpectrumFamily::FullProduct(sets) => sets.iter().try_for_each(IntSet::validate),
            SpectrumFamily::Soria(g) | SpectrumFamily::Zygmund(g) | SpectrumFamily::Cordoba(g) => g.validate(),
            SpectrumFamily::LinearRelation { t_sets, gamma, indices, .. } => {
                t_sets.iter().try_for_each(IntSet::validate)?;
                gamma.validate()?;
                if indices.is_empty() {
                    return bad("linear relation needs at least one index".to_string());
                }
                if indices.windows(2).any(|w| w[0] >= w[1]) || indices[0] < 1 || indices[indices.len() - 1] > n - 1 {
                    return bad(format!("indices {indices:?} must be strictly increasing within 1..={}", n - 1));
                }
                Ok(())
            }
            SpectrumFamily::ThetaTable { t_sets, entries } => {
                t_sets.iter().try_for_each(IntSet::validate)?;
                match entries.iter().find(|e| e.args.len() != n - 1) {
                    Some(e) => bad(format!("theta entry {:?} needs {} arguments", e.args, n - 1)),
                    None => Ok(()),
                }
            }
            SpectrumFamily::PlanarProduct { third, .. } => third.validate(),
            SpectrumFamily::Explicit { tuples, .. } => match tuples.iter().find(|t| t.len() != n) {
                Some(t) => bad(format!("tuple {t:?} does not have {n} entries")),
                None => Ok(()),
            },
        }
    }

    /// The sets `S_1 … S_n` the family is naturally dense in.
    pub fn default_s_sets(&self) -> Vec<IntSet> {
        match self {
            SpectrumFamily::FullProduct(sets) => sets.clone(),
            SpectrumFamily::Soria(g) | SpectrumFamily::Zygmund(g) | SpectrumFamily::Cordoba(g) => {
                alloc::vec![IntSet::All, IntSet::All, g.clone()]
            }
            SpectrumFamily::LinearRelation { t_sets, gamma, .. } => {
                let mut sets = t_sets.clone();
                sets.push(gamma.clone());
                sets
            }
            SpectrumFamily::ThetaTable { t_sets, entries } => {
                let mut sets = t_sets.clone();
                let origin = entries.iter().filter(|e| e.args.iter().all(|&a| a == 0)).map(|e| e.value).collect();
                sets.push(IntSet::explicit(origin));
                sets
            }
            SpectrumFamily::PlanarProduct { third, .. } => alloc::vec![IntSet::All, IntSet::All, third.clone()],
            SpectrumFamily::Explicit { n, .. } => alloc::vec![IntSet::All; *n],
        }
    }
}

/// The spectrum tuples inside `window`, in lexicographic order.
/// Upper bound on the tuples a window may hold before enumeration is refused.
pub const SPECTRUM_LIMIT: u128 = 1 << 26;

pub fn spectrum_window(family: &SpectrumFamily, window: &Window) -> Result<TupleSet> {
    family.validate()?;
    let n = family.dimension();
    if window.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: window.dim() });
    }
    let (lo_n, hi_n) = window.range(n - 1);
    let prefix_sets: Vec<Vec<i64>> = match family {
        SpectrumFamily::Explicit { tuples, .. } => {
            return TupleSet::new(n, tuples.iter().filter(|t| window.contains(t)));
        }
        SpectrumFamily::ThetaTable { t_sets, entries } => {
            let rows = entries.iter().filter_map(|e| {
                let mut row = e.args.clone();
                row.push(e.value);
                let admissible = e.args.iter().zip(t_sets).all(|(&a, set)| set.contains(a));
                (admissible && window.contains(&row)).then_some(row)
            });
            return TupleSet::new(n, rows);
        }
        SpectrumFamily::FullProduct(sets) => {
            (0..n - 1).map(|j| sets[j].elements_in(window.range(j).0, window.range(j).1)).collect()
        }
        SpectrumFamily::LinearRelation { t_sets, .. } => {
            (0..n - 1).map(|j| t_sets[j].elements_in(window.range(j).0, window.range(j).1)).collect()
        }
        _ => (0..n - 1).map(|j| IntSet::All.elements_in(window.range(j).0, window.range(j).1)).collect(),
    };

    let last_values = |prefix: &[i64]| -> Vec<i64> {
        let shifted = |gamma: &IntSet, shift: i64| -> Vec<i64> {
            // values γ + shift inside [lo_n, hi_n]
            gamma.elements_in(lo_n - shift, hi_n - shift).into_iter().map(|g| g + shift).collect()
        };
        match family {
            SpectrumFamily::FullProduct(sets) => sets[n - 1].elements_in(lo_n, hi_n),
            SpectrumFamily::Soria(g) => shifted(g, -prefix[1]),
            SpectrumFamily::Zygmund(g) => shifted(g, prefix[1]),
            SpectrumFamily::Cordoba(g) => shifted(g, prefix[0] + prefix[1]),
            SpectrumFamily::LinearRelation { gamma, indices, sign, .. } => {
                let sum: i64 = indices.iter().map(|&j| prefix[j - 1]).sum();
                match sign {
                    RelationSign::Plus => shifted(gamma, sum),
                    RelationSign::Minus => shifted(gamma, -sum),
                }
            }
            SpectrumFamily::PlanarProduct { planar, third } => {
                if planar.contains(prefix[0], prefix[1]) {
                    third.elements_in(lo_n, hi_n)
                } else {
                    Vec::new()
                }
            }
            SpectrumFamily::Explicit { .. } | SpectrumFamily::ThetaTable { .. } => unreachable!(),
        }
    };

    let bound = prefix_sets.iter().fold((hi_n - lo_n + 1).max(0) as u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if bound > SPECTRUM_LIMIT {
        return Err(Error::SpectrumTooLarge(bound));
    }
    let mut data = Vec::new();
    if prefix_sets.iter().any(Vec::is_empty) {
        return Ok(TupleSet::from_sorted(n, data));
    }
    // odometer over the prefix coordinates, in lexicographic order
    let mut idx = alloc::vec![0usize; n - 1];
    let mut prefix: Vec<i64> = prefix_sets.iter().map(|s| s[0]).collect();
    loop {
        for v in last_values(&prefix) {
            data.extend_from_slice(&prefix);
            data.push(v);
        }
        let mut j = n - 1;
        loop {
            if j == 0 {
                return Ok(TupleSet::from_sorted(n, data));
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < prefix_sets[j].len() {
                prefix[j] = prefix_sets[j][idx[j]];
                break;
            }
            idx[j] = 0;
            prefix[j] = prefix_sets[j][0];
        }
    }
}

/// Distance from `s` to the nearest member of sorted `w`.
pub fn nearest_distance(w: &[i64], s: i64) -> Option<u64> {
    let i = w.partition_point(|&x| x < s);
    let right = w.get(i).map(|&x| x.abs_diff(s));
    let left = i.checked_sub(1).map(|i| w[i].abs_diff(s));
    match (left, right) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Smallest `N` for which sorted `w` is an `N`-net for `s`, with the member
/// of `s` that forces it. `None` when `w` is empty but `s` is not.
pub fn net_constant(w: &[i64], s: &[i64]) -> Option<(u64, Option<i64>)> {
    let mut worst = (0u64, None);
    for &x in s {
        let d = nearest_distance(w, x)?;
        if worst.1.is_none() || d > worst.0 {
            worst = (d, Some(x));
        }
    }
    Some(worst)
}

/// Whether every `s ∈ S ∩ window` has some `w ∈ W ∩ window` with `|s − w| <= n`.
pub fn is_net_1d(w: &IntSet, s: &IntSet, window: (i64, i64), n: u64) -> bool {
    let wv = w.elements_in(window.0, window.1);
    let sv = s.elements_in(window.0, window.1);
    matches!(net_constant(&wv, &sv), Some((c, _)) if c <= n)
}

/// Net statistics for one coordinate of a density check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisDensity {
    /// 1-based coordinate.
    pub axis: usize,
    pub sections: usize,
    /// Largest per-section net constant; `None` if some section cannot net `S_j`.
    pub net_constant: Option<u64>,
    /// Prefix of the section attaining the maximum.
    pub worst_section: Option<Vec<i64>>,
    /// The worst gap sits closer to the window edge than to its nearest
    /// section point, so points outside the window might close it.
    pub boundary_limited: bool,
    pub within_budget: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub budget: u64,
    pub axes: Vec<AxisDensity>,
    pub dense: bool,
}

/// Checks that `π_1(W), …, π_n(W)` are nets for `S_1, π_1(W) × S_2, …`
/// inside `window`, each section within `budget`.
pub fn is_dense(w: &TupleSet, s_sets: &[IntSet], window: &Window, budget: u64) -> Result<DensityReport> {
    let n = w.dim();
    if s_sets.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s_sets.len() });
    }
    if window.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: window.dim() });
    }
    let mut axes = Vec::with_capacity(n);
    for j in 0..n {
        let (lo, hi) = window.range(j);
        let targets = s_sets[j].elements_in(lo, hi);
        let sections = if w.is_empty() {
            alloc::vec![Section { prefix: Vec::new(), values: Vec::new() }]
        } else {
            w.sections(j + 1)
        };
        let mut worst: Option<u64> = Some(0);
        let mut worst_section = None;
        let mut boundary_limited = false;
        for sec in &sections {
            match net_constant(&sec.values, &targets) {
                None => {
                    worst = None;
                    worst_section = Some(sec.prefix.clone());
                    break;
                }
                Some((c, at)) => {
                    if worst_section.is_none() || c > worst.unwrap_or(0) {
                        worst = Some(c);
                        worst_section = Some(sec.prefix.clone());
                        boundary_limited = at.is_some_and(|s| (s - lo).min(hi - s) < c as i64);
                    }
                }
            }
        }
        let within_budget = matches!(worst, Some(c) if c <= budget);
        axes.push(AxisDensity {
            axis: j + 1,
            sections: sections.len(),
            net_constant: worst,
            worst_section,
            boundary_limited,
            within_budget,
        });
    }
    let dense = axes.iter().all(|a| a.within_budget);
    Ok(DensityReport { budget, axes, dense })
}

/// For each tuple `m ∈ {1..k}^n` hit by the spectrum, the lexicographically
/// first spectrum tuple `w` with `w_j ∈ (s_{j,m_j−1}, s_{j,m_j}]`.
pub fn box_witnesses(w: &TupleSet, sequences: &[ScaleSequence]) -> BTreeMap<Vec<usize>, Vec<i64>> {
    let mut out = BTreeMap::new();
    for row in w.iter() {
        let boxes: Option<Vec<usize>> = row.iter().zip(sequences).map(|(&x, s)| s.bracket(x)).collect();
        if let Some(b) = boxes {
            out.entry(b).or_insert_with(|| row.to_vec());
        }
    }
    out
}

/// Result of the sequence extraction on one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub sequences: Vec<ScaleSequence>,
    /// Net constant accepted on each axis (points are spaced strictly more).
    pub net_constants: Vec<u64>,
    /// The `2k + 1` spaced points picked on each axis.
    pub spaced_points: Vec<Vec<i64>>,
}

fn pick_spaced(candidates: &[i64], spacing: u64, count: usize) -> core::result::Result<Vec<i64>, usize> {
    let mut picked: Vec<i64> = Vec::with_capacity(count);
    for &c in candidates {
        if picked.last().is_none_or(|&p| c.abs_diff(p) > spacing && c > p) {
            picked.push(c);
            if picked.len() == count {
                return Ok(picked);
            }
        }
    }
    Err(picked.len())
}

/// Builds increasing sequences `(s_{j,m})_{m=0}^k`, `s_{j,m} ∈ S_j`, such that
/// every `m ∈ {1..k}^n` is realized by a spectrum tuple inside the window.
///
/// Coordinate by coordinate: take the sections of `π_j(W)` whose prefixes
/// lie in the already chosen ranges `[s_{i,0}, s_{i,k}]`, find a spacing `N`
/// at least as large as every section's net constant over the span of the
/// picked points, greedily pick `2k + 1` members of `S_j` spaced by more than
/// `N`, and keep the even-indexed ones. The realization property is then
/// rechecked over all `k^n` boxes.
pub fn extract_sequences(
    family: &SpectrumFamily,
    s_sets: &[IntSet],
    k: usize,
    window: &Window,
) -> Result<Extraction> {
    let w = spectrum_window(family, window)?;
    extract_from_spectrum(&w, s_sets, k, window)
}

pub fn extract_from_spectrum(w: &TupleSet, s_sets: &[IntSet], k: usize, window: &Window) -> Result<Extraction> {
    let n = w.dim();
    if k < 1 {
        return Err(Error::TooFewScales(k + 1));
    }
    if s_sets.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s_sets.len() });
    }
    if window.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: window.dim() });
    }
    let needed = 2 * k + 1;
    let mut sequences: Vec<ScaleSequence> = Vec::with_capacity(n);
    let mut net_constants = Vec::with_capacity(n);
    let mut spaced_points = Vec::with_capacity(n);

    for j in 0..n {
        let (lo, hi) = window.range(j);
        let candidates = s_sets[j].elements_in(lo, hi);
        let sections: Vec<Section> = if w.is_empty() {
            Vec::new()
        } else {
            w.sections(j + 1)
                .into_iter()
                .filter(|sec| {
                    sec.prefix.iter().zip(&sequences).all(|(&t, s)| s.first() <= t && t <= s.last())
                })
                .collect()
        };
        if sections.is_empty() {
            return Err(Error::NoSections { axis: j + 1 });
        }

        let mut spacing = 0u64;
        let picked = loop {
            let picked = pick_spaced(&candidates, spacing, needed).map_err(|found| {
                Error::InsufficientSpacedPoints { axis: j + 1, needed, spacing, found }
            })?;
            let (a, b) = (picked[0], picked[needed - 1]);
            let span_targets: Vec<i64> = candidates.iter().copied().filter(|&x| a <= x && x <= b).collect();
            let mut actual = 0u64;
            for sec in &sections {
                match net_constant(&sec.values, &span_targets) {
                    Some((c, _)) => actual = actual.max(c),
                    None => return Err(Error::NoSections { axis: j + 1 }),
                }
            }
            if actual <= spacing {
                break picked;
            }
            spacing = actual;
        };
        let seq: Vec<i64> = picked.iter().step_by(2).copied().collect();
        sequences.push(ScaleSequence::new(seq)?);
        net_constants.push(spacing);
        spaced_points.push(picked);
    }

    let realized = box_witnesses(w, &sequences);
    for m in crate::omega::cube_tuples(n, k) {
        if !realized.contains_key(&m) {
            return Err(Error::RealizationFailed(m));
        }
    }
    Ok(Extraction { sequences, net_constants, spaced_points })
}

/// Per-coordinate `⌈log₂ ℓ_j⌉`: side exponents of the smallest dyadic
/// enclosure.
pub fn dyadic_skeleton(lengths: &[BigRational]) -> Result<Vec<i64>> {
    lengths.iter().map(ceil_log2_rational).collect()
}

fn ceil_log2_rational(x: &BigRational) -> Result<i64> {
    if !x.is_positive() {
        return Err(Error::NonPositiveLength);
    }
    let p = x.numer();
    let q = x.denom();
    // 2^e >= p/q  <=>  q * 2^e >= p
    let fits = |e: i64| -> bool {
        if e >= 0 {
            (q << (e as u64)) >= *p
        } else {
            *q >= (p << ((-e) as u64))
        }
    };
    let guess = p.bits() as i64 - q.bits() as i64;
    let mut e = guess - 1;
    while !fits(e) {
        e += 1;
    }
    while fits(e - 1) {
        e -= 1;
    }
    Ok(e)
}

/// Convenience for integer side lengths.
pub fn dyadic_skeleton_int(lengths: &[u64]) -> Result<Vec<i64>> {
    let rs: Vec<BigRational> = lengths.iter().map(|&l| BigRational::from_integer(BigInt::from(l))).collect();
    dyadic_skeleton(&rs)
}

/// Window-level reading of the θ-table growth conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaReport {
    /// `log θ_k(1, …, 1)` per table index.
    pub origin_values: BTreeMap<u64, i64>,
    /// Origin values reach the lower or upper edge of the window's last
    /// coordinate (the finite shadow of `inf = 0` or `sup = ∞`).
    pub origin_reaches_edge: bool,
    /// Largest `|log θ_k(t) − log θ_k(1)|` over the table.
    pub max_deviation: Option<u64>,
    /// Every entry has an origin value for its index.
    pub window_consistent: bool,
}

pub fn theta_conditions(family: &SpectrumFamily, window: &Window) -> Result<ThetaReport> {
    let SpectrumFamily::ThetaTable { entries, .. } = family else {
        return Err(Error::InvalidFamily("not a theta table".to_string()));
    };
    family.validate()?;
    let n = family.dimension();
    let (lo, hi) = window.range(n - 1);
    let origin_values: BTreeMap<u64, i64> = entries
        .iter()
        .filter(|e| e.args.iter().all(|&a| a == 0))
        .map(|e| (e.index, e.value))
        .collect();
    let origin_reaches_edge = origin_values.values().any(|&v| v <= lo || v >= hi);
    let mut max_deviation: Option<u64> = None;
    let mut window_consistent = true;
    for e in entries {
        match origin_values.get(&e.index) {
            Some(&o) => {
                let d = e.value.abs_diff(o);
                max_deviation = Some(max_deviation.map_or(d, |m| m.max(d)));
            }
            None => window_consistent = false,
        }
    }
    Ok(ThetaReport { origin_values, origin_reaches_edge, max_deviation, window_consistent })
}

impl TupleSet {
    /// Builds from rows known to be sorted; used by callers that enumerate
    /// in lexicographic order themselves.
    pub fn from_rows_sorted(n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.windows(2).any(|w| w[0] >= w[1]) {
            return TupleSet::new(n, rows);
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        Ok(TupleSet::from_sorted(n, rows.concat()))
    }
}
