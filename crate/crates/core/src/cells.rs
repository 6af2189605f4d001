//! One-dimensional dyadic set algebra on a fixed cell grid.
//!
//! A [`CellSet1D`] is a finite union of half-open runs `[a, b)` of cells in
//! an [`AxisFrame`]. Cell `i` covers `[i * 2^f, (i + 1) * 2^f)` in real
//! units, where `f` is the frame's fine exponent. Closed versus half-open
//! endpoints only differ on a null set, so measures are unaffected.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Largest supported `coarse_exp - fine_exp`.
pub const MAX_FRAME_SPAN: i64 = 62;

/// Cell grid for one axis: cells of side `2^fine_exp` tiling `[0, 2^coarse_exp)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AxisFrame {
    fine_exp: i64,
    coarse_exp: i64,
}

impl AxisFrame {
    pub fn new(fine_exp: i64, coarse_exp: i64) -> Result<Self> {
        if fine_exp > coarse_exp {
            return Err(Error::InvalidFrame { fine: fine_exp, coarse: coarse_exp });
        }
        let span = coarse_exp - fine_exp;
        if span > MAX_FRAME_SPAN {
            return Err(Error::FrameTooLarge { span });
        }
        Ok(AxisFrame { fine_exp, coarse_exp })
    }

    pub fn fine_exp(&self) -> i64 {
        self.fine_exp
    }

    pub fn coarse_exp(&self) -> i64 {
        self.coarse_exp
    }

    /// `log2` of the cell count.
    pub fn span(&self) -> u32 {
        (self.coarse_exp - self.fine_exp) as u32
    }

    pub fn cell_count(&self) -> u64 {
        1u64 << self.span()
    }

    /// Number of cells in a real length `2^exp`, if `exp` is within the frame.
    pub fn cells_per(&self, exp: i64) -> Option<u64> {
        if exp < self.fine_exp || exp > self.coarse_exp {
            return None;
        }
        Some(1u64 << (exp - self.fine_exp))
    }

    pub fn cell_measure(&self) -> Dyadic {
        Dyadic::pow2(self.fine_exp)
    }

    fn ensure_same(&self, other: &AxisFrame) -> Result<()> {
        if self != other {
            return Err(Error::FrameMismatch(format!("{self}"), format!("{other}")));
        }
        Ok(())
    }
}

impl fmt::Display for AxisFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "frame(fine={}, coarse={})", self.fine_exp, self.coarse_exp)
    }
}

/// A union of maximal, sorted, pairwise non-adjacent cell runs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellSet1D {
    frame: AxisFrame,
    runs: Vec<(u64, u64)>,
}

impl CellSet1D {
    /// Builds a set from arbitrary runs; overlapping or touching runs merge.
    pub fn new<I>(frame: AxisFrame, runs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let cell_count = frame.cell_count();
        let mut raw: Vec<(u64, u64)> = Vec::new();
        for (start, end) in runs {
            if start >= end || end > cell_count {
                return Err(Error::InvalidRun { start, end, cell_count });
            }
            raw.push((start, end));
        }
        raw.sort_unstable();
        Ok(CellSet1D { frame, runs: merge_sorted(raw) })
    }

    /// Wraps runs already known to be sorted, maximal and in range.
    pub(crate) fn from_canonical(frame: AxisFrame, runs: Vec<(u64, u64)>) -> Self {
        debug_assert!(runs.windows(2).all(|w| w[0].1 < w[1].0));
        debug_assert!(runs.iter().all(|&(a, b)| a < b && b <= frame.cell_count()));
        CellSet1D { frame, runs }
    }

    pub fn empty(frame: AxisFrame) -> Self {
        CellSet1D { frame, runs: Vec::new() }
    }

    pub fn full(frame: AxisFrame) -> Self {
        CellSet1D { frame, runs: alloc::vec![(0, frame.cell_count())] }
    }

    /// The single run `[start, end)`.
    pub fn interval(frame: AxisFrame, start: u64, end: u64) -> Result<Self> {
        CellSet1D::new(frame, [(start, end)])
    }

    pub fn frame(&self) -> AxisFrame {
        self.frame
    }

    pub fn runs(&self) -> &[(u64, u64)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn cell_total(&self) -> u64 {
        self.runs.iter().map(|&(a, b)| b - a).sum()
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Dyadic {
        Dyadic::from_u64(self.cell_total()).mul_pow2(self.frame.fine_exp)
    }

    pub fn contains(&self, cell: u64) -> bool {
        let idx = self.runs.partition_point(|&(a, _)| a <= cell);
        idx > 0 && cell < self.runs[idx - 1].1
    }

    pub fn intersect(&self, other: &CellSet1D) -> Result<CellSet1D> {
        self.frame.ensure_same(&other.frame)?;
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.runs.len() && j < other.runs.len() {
            let (a0, a1) = self.runs[i];
            let (b0, b1) = other.runs[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // pieces of maximal runs stay separated
        Ok(CellSet1D::from_canonical(self.frame, out))
    }

    pub fn union(&self, other: &CellSet1D) -> Result<CellSet1D> {
        self.frame.ensure_same(&other.frame)?;
        let mut all: Vec<(u64, u64)> = self.runs.iter().chain(other.runs.iter()).copied().collect();
        all.sort_unstable();
        Ok(CellSet1D::from_canonical(self.frame, merge_sorted(all)))
    }

    /// `self \ other`.
    pub fn difference(&self, other: &CellSet1D) -> Result<CellSet1D> {
        self.frame.ensure_same(&other.frame)?;
        let mut out = Vec::new();
        let mut j = 0;
        for &(a0, a1) in &self.runs {
            let mut cur = a0;
            while j < other.runs.len() && other.runs[j].1 <= cur {
                j += 1;
            }
            let mut jj = j;
            while cur < a1 && jj < other.runs.len() && other.runs[jj].0 < a1 {
                let (b0, b1) = other.runs[jj];
                if b0 > cur {
                    out.push((cur, b0));
                }
                cur = cur.max(b1);
                jj += 1;
            }
            if cur < a1 {
                out.push((cur, a1));
            }
        }
        Ok(CellSet1D::from_canonical(self.frame, out))
    }

    pub fn is_subset_of(&self, other: &CellSet1D) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    /// Prefix-sum index for fast cell counting over ranges.
    pub fn index(&self) -> RunIndex<'_> {
        let mut prefix = Vec::with_capacity(self.runs.len() + 1);
        prefix.push(0u64);
        let mut acc = 0;
        for &(a, b) in &self.runs {
            acc += b - a;
            prefix.push(acc);
        }
        RunIndex { runs: &self.runs, prefix }
    }

    /// Per-cell membership flags. The caller bounds the frame size.
    pub fn membership(&self) -> Vec<bool> {
        let mut flags = alloc::vec![false; self.frame.cell_count() as usize];
        for &(a, b) in &self.runs {
            flags[a as usize..b as usize].fill(true);
        }
        flags
    }
}

fn merge_sorted(sorted: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(sorted.len());
    for (a, b) in sorted {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Cumulative cell counts over the runs of a [`CellSet1D`].
pub struct RunIndex<'a> {
    runs: &'a [(u64, u64)],
    prefix: Vec<u64>,
}

impl RunIndex<'_> {
    /// Number of member cells below `x`.
    pub fn cumulative(&self, x: u64) -> u64 {
        let idx = self.runs.partition_point(|&(a, _)| a < x);
        let mut total = self.prefix[idx];
        if idx > 0 {
            let end = self.runs[idx - 1].1;
            if end > x {
                total -= end - x;
            }
        }
        total
    }

    /// Number of member cells in `[start, end)`.
    pub fn count_in(&self, start: u64, end: u64) -> u64 {
        self.cumulative(end) - self.cumulative(start)
    }
}

/// Whether `e` meets every maximal run of `h` in exactly the fraction `alpha`.
pub fn saturates(e: &CellSet1D, h: &CellSet1D, alpha: &Dyadic) -> Result<bool> {
    e.frame.ensure_same(&h.frame)?;
    if h.is_empty() {
        return Err(Error::EmptyComponents);
    }
    let index = e.index();
    Ok(h.runs.iter().all(|&(a, b)| {
        let hit = Dyadic::from_u64(index.count_in(a, b));
        hit == alpha * Dyadic::from_u64(b - a)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn frame(fine: i64, coarse: i64) -> AxisFrame {
        AxisFrame::new(fine, coarse).unwrap()
    }

    fn set(f: AxisFrame, runs: &[(u64, u64)]) -> CellSet1D {
        CellSet1D::new(f, runs.iter().copied()).unwrap()
    }

    fn half() -> Dyadic {
        Dyadic::pow2(-1)
    }

    #[test]
    fn measure_examples() {
        let f = frame(0, 2);
        assert_eq!(set(f, &[(0, 4)]).measure(), Dyadic::from_int(4));
        assert_eq!(CellSet1D::empty(f).measure(), Dyadic::zero());
        let g = frame(-1, 1);
        assert_eq!(set(g, &[(0, 1), (2, 3)]).measure(), Dyadic::one());
    }

    #[test]
    fn frame_validation() {
        assert!(AxisFrame::new(3, 2).is_err());
        assert!(AxisFrame::new(0, 63).is_err());
        assert_eq!(frame(-2, 1).cell_count(), 8);
    }

    #[test]
    fn run_validation_and_merge() {
        let f = frame(0, 3);
        assert!(CellSet1D::new(f, [(2, 2)]).is_err());
        assert!(CellSet1D::new(f, [(0, 9)]).is_err());
        let s = set(f, &[(4, 6), (0, 2), (2, 3), (5, 7)]);
        assert_eq!(s.runs(), &[(0, 3), (4, 7)]);
    }

    #[test]
    fn intersect_examples() {
        let f = frame(0, 3);
        let a = set(f, &[(0, 4)]);
        let b = set(f, &[(2, 6)]);
        assert_eq!(a.intersect(&b).unwrap().runs(), &[(2, 4)]);
        assert_eq!(a.intersect(&a).unwrap(), a);
        let c = set(f, &[(0, 1), (2, 3)]);
        let d = set(f, &[(1, 2), (3, 4)]);
        assert!(c.intersect(&d).unwrap().is_empty());
    }

    #[test]
    fn frame_mismatch_is_an_error() {
        let a = CellSet1D::full(frame(0, 2));
        let b = CellSet1D::full(frame(0, 3));
        assert!(matches!(a.intersect(&b), Err(Error::FrameMismatch(..))));
        assert!(matches!(saturates(&a, &b, &half()), Err(Error::FrameMismatch(..))));
    }

    #[test]
    fn difference_and_union() {
        let f = frame(0, 4);
        let a = set(f, &[(0, 8), (10, 16)]);
        let b = set(f, &[(1, 2), (4, 11), (15, 16)]);
        assert_eq!(a.difference(&b).unwrap().runs(), &[(0, 1), (2, 4), (11, 15)]);
        assert_eq!(a.union(&b).unwrap().runs(), &[(0, 16)]);
    }

    #[test]
    fn saturation_examples() {
        let f = frame(0, 3);
        let e = set(f, &[(0, 1)]);
        assert!(saturates(&e, &set(f, &[(0, 2)]), &half()).unwrap());
        assert!(!saturates(&e, &set(f, &[(0, 4)]), &half()).unwrap());
        let e2 = set(f, &[(0, 1), (4, 5)]);
        assert!(saturates(&e2, &set(f, &[(0, 2), (4, 6)]), &half()).unwrap());
        assert_eq!(saturates(&e, &CellSet1D::empty(f), &half()), Err(Error::EmptyComponents));
    }

    #[test]
    fn run_index_counts() {
        let f = frame(0, 4);
        let s = set(f, &[(1, 3), (5, 9), (12, 13)]);
        let idx = s.index();
        for a in 0..=16u64 {
            for b in a..=16u64 {
                let brute = (a..b).filter(|&c| s.contains(c)).count() as u64;
                assert_eq!(idx.count_in(a, b), brute, "[{a},{b})");
            }
        }
    }

    fn arb_set(span: u32) -> impl Strategy<Value = CellSet1D> {
        let n = 1u64 << span;
        proptest::collection::vec((0..n, 1..=n), 0..6).prop_map(move |raw| {
            let f = AxisFrame::new(0, span as i64).unwrap();
            let runs = raw.into_iter().map(|(a, len)| (a, (a + len).min(n))).filter(|(a, b)| a < b);
            CellSet1D::new(f, runs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn measure_is_additive(a in arb_set(6), b in arb_set(6)) {
            let inter = a.intersect(&b).unwrap();
            let uni = a.union(&b).unwrap();
            prop_assert_eq!(&uni.measure() + &inter.measure(), &a.measure() + &b.measure());
            let diff = a.difference(&b).unwrap();
            prop_assert_eq!(&diff.measure() + &inter.measure(), a.measure());
            prop_assert!(inter.measure() <= a.measure().min(b.measure()));
            prop_assert!(inter.is_subset_of(&a).unwrap());
        }

        #[test]
        fn membership_matches_runs(a in arb_set(5)) {
            let flags = a.membership();
            for (i, &flag) in flags.iter().enumerate() {
                prop_assert_eq!(flag, a.contains(i as u64));
            }
            prop_assert_eq!(flags.iter().filter(|&&x| x).count() as u64, a.cell_total());
        }

        #[test]
        fn saturation_implies_global_ratio(a in arb_set(5), num in 0u64..=4) {
            // take H = a's runs, E = leading `num/4` portion of each run when exact
            prop_assume!(!a.is_empty());
            let alpha = Dyadic::from_u64(num).mul_pow2(-2);
            let mut e_runs = vec![];
            for &(s, t) in a.runs() {
                let len = t - s;
                if (len * num) % 4 != 0 { return Ok(()); }
                let keep = len * num / 4;
                if keep > 0 { e_runs.push((s, s + keep)); }
            }
            let e = CellSet1D::new(a.frame(), e_runs).unwrap();
            prop_assert!(saturates(&e, &a, &alpha).unwrap());
            let hit = a.intersect(&e).unwrap().measure();
            prop_assert_eq!(hit, &alpha * &a.measure());
        }
    }
}
