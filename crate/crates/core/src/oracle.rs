//! Brute-force grid oracle.
//!
//! `E` is materialized cell by cell and a restricted maximal operator is
//! evaluated over cell-aligned translates of the given shapes that fit in
//! the domain `∏ [0, 2^{s_{j,k}})`. Since `E` is a product, the average over
//! a box is the product of one-dimensional averages, so each axis only
//! needs a sliding-window profile.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::cells::{AxisFrame, CellSet1D};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::extremal::ExtremalConfig;
use crate::omega::OmegaSet;

/// Default limit on grid cells.
pub const DEFAULT_GUARD: u64 = 1 << 24;

/// One bit per grid cell, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridMask {
    frames: Vec<AxisFrame>,
    dims: Vec<u64>,
    len: u64,
    words: Vec<u64>,
}

impl GridMask {
    pub fn new(frames: Vec<AxisFrame>, guard: u64) -> Result<Self> {
        let mut cells: u128 = 1;
        for f in &frames {
            cells = cells.saturating_mul(f.cell_count() as u128);
        }
        if cells > guard as u128 {
            return Err(Error::GuardExceeded { cells, guard });
        }
        let len = cells as u64;
        let dims = frames.iter().map(AxisFrame::cell_count).collect();
        Ok(GridMask { frames, dims, len, words: vec![0; len.div_ceil(64) as usize] })
    }

    pub fn frames(&self) -> &[AxisFrame] {
        &self.frames
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, idx: u64) -> bool {
        self.words[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    pub fn set(&mut self, idx: u64) {
        self.words[(idx / 64) as usize] |= 1 << (idx % 64);
    }

    pub fn index_of(&self, coords: &[u64]) -> u64 {
        coords.iter().zip(&self.dims).fold(0, |acc, (&c, &d)| acc * d + c)
    }

    pub fn coords_of(&self, mut idx: u64) -> Vec<u64> {
        let mut out = vec![0; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            out[j] = idx % self.dims[j];
            idx /= self.dims[j];
        }
        out
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Measure of one cell.
    pub fn cell_measure(&self) -> Dyadic {
        Dyadic::pow2(self.frames.iter().map(AxisFrame::fine_exp).sum())
    }

    pub fn measure(&self) -> Dyadic {
        Dyadic::from_u64(self.count_ones()).mul_pow2(self.frames.iter().map(AxisFrame::fine_exp).sum())
    }

    /// Bitwise or with a mask on the same grid.
    pub fn or_assign(&mut self, other: &GridMask) -> Result<()> {
        if self.frames != other.frames {
            return Err(Error::Invariant(alloc::string::String::from("masks on different grids")));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    /// Set cells, in increasing index order.
    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            core::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(w as u64 * 64 + b)
            })
        })
    }

    /// Maximal runs of set cells in flat index order.
    pub fn runs(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = Vec::new();
        for i in self.iter_ones() {
            match out.last_mut() {
                Some(last) if last.1 == i => last.1 += 1,
                _ => out.push((i, i + 1)),
            }
        }
        out
    }

    pub fn from_runs(frames: Vec<AxisFrame>, runs: &[(u64, u64)], guard: u64) -> Result<Self> {
        let mut mask = GridMask::new(frames, guard)?;
        for &(a, b) in runs {
            if a >= b || b > mask.len {
                return Err(Error::InvalidRun { start: a, end: b, cell_count: mask.len });
            }
            for i in a..b {
                mask.set(i);
            }
        }
        Ok(mask)
    }
}

fn axis_sets(config: &ExtremalConfig) -> Result<Vec<&CellSet1D>> {
    let ladders = config.ladders().ok_or_else(|| {
        let cells = config.cell_count().unwrap_or(u128::MAX);
        Error::GuardExceeded { cells, guard: 1 << crate::ladder::LADDER_SPAN_LIMIT }
    })?;
    Ok(ladders.iter().map(|l| l.level(0)).collect())
}

fn frames_of(config: &ExtremalConfig) -> Result<Vec<AxisFrame>> {
    config.scales().iter().map(|s| s.frame()).collect()
}

/// Bits set exactly on the cells of `E`.
pub fn materialize(config: &ExtremalConfig, guard: u64) -> Result<GridMask> {
    let frames = frames_of(config)?;
    let mut mask = GridMask::new(frames, guard)?;
    let sets = axis_sets(config)?;
    let members: Vec<Vec<u64>> = sets
        .iter()
        .map(|s| s.runs().iter().flat_map(|&(a, b)| a..b).collect())
        .collect();
    let mut coords = vec![0u64; members.len()];
    fill_product(&members, 0, &mut coords, &mut mask);
    Ok(mask)
}

fn fill_product(members: &[Vec<u64>], j: usize, coords: &mut Vec<u64>, mask: &mut GridMask) {
    if j == members.len() {
        let idx = mask.index_of(coords);
        mask.set(idx);
        return;
    }
    for &x in &members[j] {
        coords[j] = x;
        fill_product(members, j + 1, coords, mask);
    }
}

/// Best one-dimensional average seen by each cell over windows of length
/// `2^t`, stored as numerators over `cells_per_window`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub window_exp: i64,
    pub cells_per_window: u64,
    pub numerators: Vec<u64>,
}

impl Profile {
    pub fn value(&self, cell: usize) -> Dyadic {
        let shift = self.cells_per_window.trailing_zeros() as i64;
        Dyadic::from_u64(self.numerators[cell]).mul_pow2(-shift)
    }
}

/// For each cell `x`, the largest fraction of `axis_set` in a cell-aligned
/// window of length `2^t` that contains `x` and fits in the frame.
pub fn sliding_profile(axis_set: &CellSet1D, t: i64) -> Result<Profile> {
    let frame = axis_set.frame();
    if t < frame.fine_exp() || t > frame.coarse_exp() {
        return Err(Error::WindowExponent { t, fine: frame.fine_exp(), coarse: frame.coarse_exp() });
    }
    let n = frame.cell_count() as usize;
    let w = 1usize << (t - frame.fine_exp());
    let mut prefix = vec![0u64; n + 1];
    for (i, &m) in axis_set.membership().iter().enumerate() {
        prefix[i + 1] = prefix[i] + m as u64;
    }
    let starts = n - w + 1;
    let sums: Vec<u64> = (0..starts).map(|a| prefix[a + w] - prefix[a]).collect();
    // cell x sees window starts a in [x - w + 1, x], clipped to [0, starts)
    let mut numerators = vec![0u64; n];
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next = 0usize;
    for (x, out) in numerators.iter_mut().enumerate() {
        while next <= x && next < starts {
            while deque.back().is_some_and(|&b| sums[b] <= sums[next]) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        while deque.front().is_some_and(|&f| f + w <= x) {
            deque.pop_front();
        }
        *out = deque.front().map_or(0, |&f| sums[f]);
    }
    Ok(Profile { window_exp: t, cells_per_window: w as u64, numerators })
}

/// Per-shape evaluation data: axis profiles and the integer threshold
/// their numerator product must reach.
#[derive(Clone, Debug)]
pub struct ShapeMarker {
    profiles: Vec<Profile>,
    /// `None` when no cell can reach the threshold.
    need: Option<u128>,
}

impl ShapeMarker {
    pub fn new(config: &ExtremalConfig, shape: &[i64], threshold: &Dyadic) -> Result<Self> {
        let sets = axis_sets(config)?;
        if shape.len() != sets.len() {
            return Err(Error::DimensionMismatch { expected: sets.len(), found: shape.len() });
        }
        let mut profiles = Vec::with_capacity(sets.len());
        for (set, &t) in sets.iter().zip(shape) {
            let f = set.frame();
            if t < f.fine_exp() || t > f.coarse_exp() {
                return Err(Error::ShapeOutOfRange { shape: shape.to_vec() });
            }
            profiles.push(sliding_profile(set, t)?);
        }
        let total_shift: i64 = profiles.iter().map(|p| p.cells_per_window.trailing_zeros() as i64).sum();
        let need = ceil_to_u128(&threshold.mul_pow2(total_shift));
        Ok(ShapeMarker { profiles, need })
    }

    /// Sets every cell whose product of averages reaches the threshold.
    pub fn mark_into(&self, mask: &mut GridMask) {
        let Some(need) = self.need else {
            return;
        };
        let maxima: Vec<u128> =
            self.profiles.iter().map(|p| p.numerators.iter().copied().max().unwrap_or(0) as u128).collect();
        let mut suffix_max = vec![1u128; maxima.len() + 1];
        for j in (0..maxima.len()).rev() {
            suffix_max[j] = suffix_max[j + 1].saturating_mul(maxima[j]);
        }
        self.mark_rec(0, 1, 0, need, &suffix_max, mask);
    }

    fn mark_rec(&self, j: usize, partial: u128, base: u64, need: u128, suffix_max: &[u128], mask: &mut GridMask) {
        if partial.saturating_mul(suffix_max[j]) < need {
            return;
        }
        let p = &self.profiles[j].numerators;
        let len = p.len() as u64;
        if j + 1 == self.profiles.len() {
            for (x, &v) in p.iter().enumerate() {
                if partial * v as u128 >= need {
                    mask.set(base * len + x as u64);
                }
            }
            return;
        }
        for (x, &v) in p.iter().enumerate() {
            self.mark_rec(j + 1, partial * v as u128, base * len + x as u64, need, suffix_max, mask);
        }
    }
}

fn ceil_to_u128(d: &Dyadic) -> Option<u128> {
    if !d.is_positive() {
        return Some(0);
    }
    let m = d.mantissa();
    let e = d.exponent();
    let v: BigInt = if e >= 0 {
        m << (e as u64)
    } else {
        let s = (-e) as u64;
        let one = BigInt::from(1);
        (m + ((&one << s) - &one)) >> s
    };
    debug_assert!(!v.is_negative());
    v.to_u128()
}

/// Cells where some shape's aligned average of `χ_E` reaches `threshold`.
pub fn restricted_superlevel(
    config: &ExtremalConfig,
    shapes: &[Vec<i64>],
    threshold: &Dyadic,
    guard: u64,
) -> Result<(Dyadic, GridMask)> {
    let mut mask = GridMask::new(frames_of(config)?, guard)?;
    for shape in shapes {
        ShapeMarker::new(config, shape, threshold)?.mark_into(&mut mask);
    }
    Ok((mask.measure(), mask))
}

/// `lvl(x)`: the smallest `m` with `x ∈ I*_m`, per cell of one axis.
pub fn level_index(config: &ExtremalConfig, axis: usize) -> Result<Vec<u8>> {
    let ladders = config.ladders().ok_or(Error::GuardExceeded {
        cells: config.cell_count().unwrap_or(u128::MAX),
        guard: 1 << crate::ladder::LADDER_SPAN_LIMIT,
    })?;
    let ladder = &ladders[axis];
    let mut lvl = vec![u8::MAX; ladder.frame().cell_count() as usize];
    for m in (0..=ladder.k()).rev() {
        for &(a, b) in ladder.level(m).runs() {
            lvl[a as usize..b as usize].fill(m as u8);
        }
    }
    Ok(lvl)
}

/// The analytic union `⋃_{m ∈ Ω} ∏_j I*_{j,m_j}` as a grid mask.
pub fn union_mask(config: &ExtremalConfig, omega: &OmegaSet, guard: u64) -> Result<GridMask> {
    let mut mask = GridMask::new(frames_of(config)?, guard)?;
    let n = config.n();
    let lvls: Vec<Vec<u8>> = (0..n).map(|j| level_index(config, j)).collect::<Result<_>>()?;
    let mut dominated: BTreeMap<Vec<u8>, bool> = BTreeMap::new();
    let mut key = vec![0u8; n];
    for idx in 0..mask.len() {
        let mut rest = idx;
        for j in (0..n).rev() {
            let d = lvls[j].len() as u64;
            key[j] = lvls[j][(rest % d) as usize];
            rest /= d;
        }
        let inside = *dominated.entry(key.clone()).or_insert_with(|| {
            omega.tuples().iter().any(|m| key.iter().zip(m).all(|(&c, &mj)| c as usize <= mj))
        });
        if inside {
            mask.set(idx);
        }
    }
    Ok(mask)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentReport {
    pub contained: bool,
    pub union_cells: u64,
    pub marked_cells: u64,
    /// Measure of the marked cells that lie in the analytic union.
    pub oracle_union_measure: Dyadic,
    /// Measure of the whole restricted superlevel set.
    pub superlevel_measure: Dyadic,
    /// Up to 16 union cells left unmarked.
    pub missed: Vec<Vec<u64>>,
    pub missed_count: u64,
}

/// Marks the superlevel set at `2^{-k}` with the supplied shapes and checks
/// that it covers the analytic union.
pub fn check_containment(
    config: &ExtremalConfig,
    omega: &OmegaSet,
    shapes_for_omega: &BTreeMap<Vec<usize>, Vec<i64>>,
    guard: u64,
) -> Result<ContainmentReport> {
    let mut shapes = Vec::with_capacity(omega.len());
    for m in omega.tuples() {
        let shape = shapes_for_omega.get(m).ok_or_else(|| Error::MissingShape(m.clone()))?;
        shapes.push(shape.clone());
    }
    let threshold = Dyadic::pow2(-(config.k() as i64));
    let (superlevel_measure, marked) = restricted_superlevel(config, &shapes, &threshold, guard)?;
    let union = union_mask(config, omega, guard)?;
    compare_masks(&union, &marked, superlevel_measure)
}

/// Containment report for an analytic union and an already marked mask.
pub fn compare_masks(union: &GridMask, marked: &GridMask, superlevel_measure: Dyadic) -> Result<ContainmentReport> {
    if union.frames() != marked.frames() {
        return Err(Error::Invariant(alloc::string::String::from("masks on different grids")));
    }
    let mut missed = Vec::new();
    let mut missed_count = 0u64;
    let mut both = 0u64;
    for idx in union.iter_ones() {
        if marked.get(idx) {
            both += 1;
        } else {
            missed_count += 1;
            if missed.len() < 16 {
                missed.push(union.coords_of(idx));
            }
        }
    }
    Ok(ContainmentReport {
        contained: missed_count == 0,
        union_cells: union.count_ones(),
        marked_cells: marked.count_ones(),
        oracle_union_measure: Dyadic::from_u64(both) * union.cell_measure(),
        superlevel_measure,
        missed,
        missed_count,
    })
}

/// Every aligned window of length `2^{s_{j,m_j}}` inside `I*_{j,m_j}` meets
/// `I*_{j,0}` in exactly the fraction `2^{-m_j}`, for every `m ∈ Ω`.
pub fn saturation_cross_check(config: &ExtremalConfig, omega: &OmegaSet) -> Result<bool> {
    let ladders = config.ladders().ok_or(Error::GuardExceeded {
        cells: config.cell_count().unwrap_or(u128::MAX),
        guard: 1 << crate::ladder::LADDER_SPAN_LIMIT,
    })?;
    for m in omega.tuples() {
        let mut product = Dyadic::one();
        for (ladder, &mj) in ladders.iter().zip(m) {
            let base = ladder.level(0);
            let index = base.index();
            let w = ladder.frame().cells_per(ladder.scales().get(mj)).expect("scale inside frame");
            let expected = Dyadic::pow2(-(mj as i64));
            for &(a, b) in ladder.level(mj).runs() {
                let mut start = a.div_ceil(w) * w;
                while start + w <= b {
                    let avg = Dyadic::from_u64(index.count_in(start, start + w)).mul_pow2(-(w.trailing_zeros() as i64));
                    if avg != expected {
                        return Ok(false);
                    }
                    start += w;
                }
            }
            product = product * expected;
        }
        if product != Dyadic::pow2(-(config.k() as i64)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{build_extremal, union_level_set_measure};
    use crate::ladder::ScaleSequence;
    use crate::omega::enumerate_compositions;
    use proptest::prelude::*;

    fn unit(n: usize, k: usize) -> ExtremalConfig {
        build_extremal(&vec![ScaleSequence::unit(0, k); n]).unwrap()
    }

    fn natural_shapes(c: &ExtremalConfig, omega: &OmegaSet) -> BTreeMap<Vec<usize>, Vec<i64>> {
        omega
            .tuples()
            .iter()
            .map(|m| (m.clone(), c.scales().iter().zip(m).map(|(s, &mj)| s.get(mj)).collect()))
            .collect()
    }

    #[test]
    fn materialize_examples() {
        let mask = materialize(&unit(2, 2), DEFAULT_GUARD).unwrap();
        assert_eq!(mask.dims(), &[4, 4]);
        assert_eq!(mask.iter_ones().collect::<Vec<_>>(), vec![0]);
        let c = build_extremal(&[ScaleSequence::new(vec![0, 2]).unwrap()]).unwrap();
        let mask = materialize(&c, DEFAULT_GUARD).unwrap();
        assert_eq!(mask.iter_ones().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(mask.measure(), c.e_measure());
        assert!(materialize(&unit(2, 2), 8).is_err());
    }

    #[test]
    fn profile_examples() {
        let f = AxisFrame::new(0, 2).unwrap();
        let set = CellSet1D::interval(f, 0, 1).unwrap();
        let p = sliding_profile(&set, 1).unwrap();
        assert_eq!(p.numerators, vec![1, 1, 0, 0]);
        assert_eq!(p.value(0), "1/2".parse().unwrap());
        let p = sliding_profile(&set, 2).unwrap();
        assert!(p.numerators.iter().all(|&v| v == 1));
        let p = sliding_profile(&CellSet1D::full(f), 1).unwrap();
        assert!((0..4).all(|x| p.value(x) == Dyadic::one()));
        assert!(sliding_profile(&set, 3).is_err());
    }

    #[test]
    fn superlevel_examples() {
        let c = unit(2, 2);
        let (m, mask) = restricted_superlevel(&c, &[vec![1, 1]], &"1/4".parse().unwrap(), DEFAULT_GUARD).unwrap();
        assert!(m >= Dyadic::from_int(4));
        for x in 0..2 {
            for y in 0..2 {
                assert!(mask.get(mask.index_of(&[x, y])));
            }
        }
        let (m, _) = restricted_superlevel(&c, &[vec![1, 1]], &Dyadic::zero(), DEFAULT_GUARD).unwrap();
        assert_eq!(m, Dyadic::from_int(16));
        let (m, _) = restricted_superlevel(&c, &[vec![1, 1]], &"3/2".parse().unwrap(), DEFAULT_GUARD).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn containment_examples() {
        let c = unit(2, 5);
        let omega = enumerate_compositions(2, 5).unwrap();
        let r = check_containment(&c, &omega, &natural_shapes(&c, &omega), DEFAULT_GUARD).unwrap();
        assert!(r.contained);
        assert_eq!(r.oracle_union_measure, Dyadic::from_int(80));

        let empty = OmegaSet::empty(2, 5);
        assert!(check_containment(&c, &empty, &BTreeMap::new(), DEFAULT_GUARD).unwrap().contained);

        assert_eq!(
            check_containment(&c, &omega, &BTreeMap::new(), DEFAULT_GUARD).unwrap_err(),
            Error::MissingShape(vec![1, 4])
        );
    }

    #[test]
    fn wrong_shape_is_caught() {
        let seq = ScaleSequence::new(vec![0, 2, 4]).unwrap();
        let c = build_extremal(&[seq.clone(), seq]).unwrap();
        let omega = OmegaSet::new(2, 2, vec![vec![1, 1]]).unwrap();
        let mut shapes = BTreeMap::new();
        shapes.insert(vec![1, 1], vec![2, 2]);
        assert!(check_containment(&c, &omega, &shapes, DEFAULT_GUARD).unwrap().contained);
        shapes.insert(vec![1, 1], vec![0, 0]);
        let r = check_containment(&c, &omega, &shapes, DEFAULT_GUARD).unwrap();
        assert!(!r.contained);
        assert!(r.missed_count > 0);
        assert!(!r.missed.is_empty());
    }

    #[test]
    fn saturation_examples() {
        let c = build_extremal(&[ScaleSequence::from_gaps(0, &[2, 1, 3]).unwrap(), ScaleSequence::unit(1, 3)]).unwrap();
        assert!(saturation_cross_check(&c, &enumerate_compositions(2, 3).unwrap()).unwrap());
    }

    #[test]
    fn mask_runs_round_trip() {
        let mask = materialize(&build_extremal(&vec![ScaleSequence::new(vec![0, 1, 3]).unwrap(); 2]).unwrap(), DEFAULT_GUARD).unwrap();
        let back = GridMask::from_runs(mask.frames().to_vec(), &mask.runs(), DEFAULT_GUARD).unwrap();
        assert_eq!(back, mask);
    }

    /// Averages over every aligned translate, computed directly from the
    /// cell membership of `E`.
    fn brute_superlevel(c: &ExtremalConfig, shape: &[i64], threshold: &Dyadic) -> Vec<bool> {
        let e = materialize(c, DEFAULT_GUARD).unwrap();
        let dims = e.dims().to_vec();
        let w: Vec<u64> = shape.iter().zip(c.scales()).map(|(&t, s)| 1 << (t - s.first())).collect();
        let mut marked = vec![false; e.len() as usize];
        let mut start = vec![0u64; dims.len()];
        let cells_in_box: u64 = w.iter().product();
        loop {
            let mut hits = 0u64;
            for cell in 0..cells_in_box {
                let mut rest = cell;
                let mut coords = vec![0u64; dims.len()];
                for j in (0..dims.len()).rev() {
                    coords[j] = start[j] + rest % w[j];
                    rest /= w[j];
                }
                if e.get(e.index_of(&coords)) {
                    hits += 1;
                }
            }
            let avg = Dyadic::from_u64(hits) * Dyadic::pow2(-(cells_in_box.trailing_zeros() as i64));
            if avg >= *threshold {
                for cell in 0..cells_in_box {
                    let mut rest = cell;
                    let mut coords = vec![0u64; dims.len()];
                    for j in (0..dims.len()).rev() {
                        coords[j] = start[j] + rest % w[j];
                        rest /= w[j];
                    }
                    marked[e.index_of(&coords) as usize] = true;
                }
            }
            let mut j = dims.len();
            loop {
                if j == 0 {
                    return marked;
                }
                j -= 1;
                if start[j] + w[j] < dims[j] {
                    start[j] += 1;
                    break;
                }
                start[j] = 0;
            }
        }
    }

    fn arb_small() -> impl Strategy<Value = ExtremalConfig> {
        (1usize..3, 1usize..4).prop_flat_map(|(n, k)| {
            proptest::collection::vec(proptest::collection::vec(1i64..3, k), n).prop_map(|gaps| {
                let seqs: Vec<ScaleSequence> = gaps.iter().map(|g| ScaleSequence::from_gaps(0, g).unwrap()).collect();
                build_extremal(&seqs).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn profile_marking_matches_brute_force(c in arb_small(), pick in proptest::collection::vec(0usize..8, 2), th in 0u32..5) {
            let shape: Vec<i64> = c.scales().iter().zip(&pick).map(|(s, &p)| s.get(p % (s.k() + 1))).collect();
            let threshold = Dyadic::pow2(-(th as i64));
            let (_, mask) = restricted_superlevel(&c, &[shape.clone()], &threshold, DEFAULT_GUARD).unwrap();
            let brute = brute_superlevel(&c, &shape, &threshold);
            for (i, &b) in brute.iter().enumerate() {
                prop_assert_eq!(mask.get(i as u64), b, "cell {}", i);
            }
        }

        #[test]
        fn oracle_agrees_with_closure_sum(c in arb_small()) {
            prop_assume!(c.n() <= c.k());
            let omega = enumerate_compositions(c.n(), c.k()).unwrap();
            let r = check_containment(&c, &omega, &natural_shapes(&c, &omega), DEFAULT_GUARD).unwrap();
            prop_assert!(r.contained);
            prop_assert_eq!(r.oracle_union_measure, union_level_set_measure(&c, &omega).unwrap());
            prop_assert!(saturation_cross_check(&c, &omega).unwrap());
        }

        #[test]
        fn superlevel_monotone(c in arb_small(), th in 0u32..4) {
            let shapes: Vec<Vec<i64>> = (0..=c.k()).map(|m| c.scales().iter().map(|s| s.get(m)).collect()).collect();
            let t = Dyadic::pow2(-(th as i64));
            let (a, _) = restricted_superlevel(&c, &shapes[..1], &t, DEFAULT_GUARD).unwrap();
            let (b, _) = restricted_superlevel(&c, &shapes, &t, DEFAULT_GUARD).unwrap();
            let (higher, _) = restricted_superlevel(&c, &shapes, &t.mul_pow2(1), DEFAULT_GUARD).unwrap();
            prop_assert!(a <= b);
            prop_assert!(higher <= b);
        }
    }
}
