//! Nested saturation ladders.
//!
//! Given scales `s_0 < s_1 < … < s_k`, the ladder starts from the full
//! domain `I*_k = [0, 2^{s_k})` and descends with the halving operator
//! [`interleave`]: each maximal run of `I*_m` is cut into pieces of length
//! `2^{s_{m-1}}` and the pieces in odd positions (first, third, …) are kept.
//! Every level therefore occupies half of the level above it, and `I*_0`
//! occupies exactly `2^{-m}` of every dyadic interval inside `I*_m` whose
//! length lies in `(2^{s_{m-1}}, 2^{s_m}]`.

use alloc::vec::Vec;

use crate::cells::{AxisFrame, CellSet1D};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Largest frame span (in `log2` cells) a ladder will materialize.
pub const LADDER_SPAN_LIMIT: u32 = 26;

/// A strictly increasing scale sequence `s_0 < … < s_k` with `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScaleSequence(Vec<i64>);

impl ScaleSequence {
    pub fn new(scales: Vec<i64>) -> Result<Self> {
        if scales.len() < 2 {
            return Err(Error::TooFewScales(scales.len()));
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonIncreasingScales(scales));
        }
        Ok(ScaleSequence(scales))
    }

    /// `base, base + 1, …, base + k`.
    pub fn unit(base: i64, k: usize) -> Self {
        ScaleSequence((0..=k as i64).map(|m| base + m).collect())
    }

    /// `base` followed by partial sums of `gaps`.
    pub fn from_gaps(base: i64, gaps: &[i64]) -> Result<Self> {
        let mut scales = Vec::with_capacity(gaps.len() + 1);
        let mut cur = base;
        scales.push(cur);
        for &g in gaps {
            cur += g;
            scales.push(cur);
        }
        ScaleSequence::new(scales)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, m: usize) -> i64 {
        self.0[m]
    }

    pub fn first(&self) -> i64 {
        self.0[0]
    }

    pub fn last(&self) -> i64 {
        self.0[self.0.len() - 1]
    }

    pub fn shifted(&self, by: i64) -> Self {
        ScaleSequence(self.0.iter().map(|s| s + by).collect())
    }

    /// Cell grid with cells of side `2^{s_0}` over `[0, 2^{s_k})`.
    pub fn frame(&self) -> Result<AxisFrame> {
        AxisFrame::new(self.first(), self.last())
    }

    /// `|I*_m| = 2^{s_k - (k - m)}`.
    pub fn level_measure(&self, m: usize) -> Dyadic {
        Dyadic::pow2(self.last() - (self.k() - m) as i64)
    }

    /// `|H_0| = |I*_0|` and `|H_m| = |I*_m| / 2` for `m >= 1`.
    pub fn shell_measure(&self, m: usize) -> Dyadic {
        if m == 0 {
            self.level_measure(0)
        } else {
            self.level_measure(m).mul_pow2(-1)
        }
    }

    /// Exponent `e` with `|H_m| = 2^e`.
    pub fn shell_log2(&self, m: usize) -> i64 {
        let top = self.last() - (self.k() - m) as i64;
        if m == 0 {
            top
        } else {
            top - 1
        }
    }

    /// Index `m` with `scale` in `(s_{m-1}, s_m]`, if any.
    pub fn bracket(&self, scale: i64) -> Option<usize> {
        if scale <= self.first() || scale > self.last() {
            return None;
        }
        Some(self.0.partition_point(|&s| s < scale))
    }
}

/// Keeps the odd-positioned pieces of length `2^piece_exp` in every maximal
/// run of `h`. Each run must have length `2^q` with `q > piece_exp`.
pub fn interleave(piece_exp: i64, h: &CellSet1D) -> Result<CellSet1D> {
    let frame = h.frame();
    if piece_exp < frame.fine_exp() {
        return Err(Error::BelowResolution { piece_exp, fine_exp: frame.fine_exp() });
    }
    let mut out = Vec::new();
    for &(a, b) in h.runs() {
        let len = b - a;
        if !len.is_power_of_two() {
            return Err(Error::RunNotDyadic { start: a, end: b });
        }
        let run_exp = frame.fine_exp() + len.trailing_zeros() as i64;
        if piece_exp >= run_exp {
            return Err(Error::PieceNotFiner { piece_exp, run_exp });
        }
        let piece = 1u64 << (piece_exp - frame.fine_exp());
        let count = len / piece;
        for i in (0..count).step_by(2) {
            out.push((a + i * piece, a + (i + 1) * piece));
        }
    }
    Ok(CellSet1D::from_canonical(frame, out))
}

/// Materialized ladder: levels `I*_0 ⊂ … ⊂ I*_k` and shells `H_0 … H_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ladder {
    scales: ScaleSequence,
    frame: AxisFrame,
    levels: Vec<CellSet1D>,
    shells: Vec<CellSet1D>,
}

impl Ladder {
    pub fn scales(&self) -> &ScaleSequence {
        &self.scales
    }

    pub fn frame(&self) -> AxisFrame {
        self.frame
    }

    pub fn k(&self) -> usize {
        self.scales.k()
    }

    pub fn level(&self, m: usize) -> &CellSet1D {
        &self.levels[m]
    }

    pub fn levels(&self) -> &[CellSet1D] {
        &self.levels
    }

    pub fn shell(&self, m: usize) -> &CellSet1D {
        &self.shells[m]
    }

    pub fn shells(&self) -> &[CellSet1D] {
        &self.shells
    }
}

pub fn build_ladder(scales: &ScaleSequence) -> Result<Ladder> {
    let frame = scales.frame()?;
    if frame.span() > LADDER_SPAN_LIMIT {
        return Err(Error::GuardExceeded {
            cells: frame.cell_count() as u128,
            guard: 1u64 << LADDER_SPAN_LIMIT,
        });
    }
    let k = scales.k();
    let mut levels = alloc::vec![CellSet1D::full(frame)];
    for m in (1..=k).rev() {
        let next = interleave(scales.get(m - 1), levels.last().expect("non-empty"))?;
        levels.push(next);
    }
    levels.reverse();
    let mut shells = Vec::with_capacity(k + 1);
    shells.push(levels[0].clone());
    for m in 1..=k {
        shells.push(levels[m].difference(&levels[m - 1])?);
    }
    Ok(Ladder { scales: scales.clone(), frame, levels, shells })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderFailureKind {
    /// `I*_{m-1} ⊄ I*_m`.
    Nesting,
    /// A maximal run of `I*_m` is not of length `2^{s_m}`.
    RunLength,
    /// `|H_m| != |I*_m| / 2`.
    ShellMeasure,
    /// `I*_{m-1}` does not fill half of an admissible `J`.
    ParentHalf,
    /// `I*_0` does not fill `2^{-m}` of an admissible `J`.
    BaseFraction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderFailure {
    pub m: usize,
    /// `log2` of the real length of the offending interval (scale of the run
    /// for structural failures).
    pub t: i64,
    /// First cell of the offending interval or run.
    pub position: u64,
    pub kind: LadderFailureKind,
    pub observed: Dyadic,
    pub expected: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderReport {
    pub scales: ScaleSequence,
    /// Number of dyadic intervals `J` examined.
    pub intervals_checked: u64,
    pub failure: Option<LadderFailure>,
}

impl LadderReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Exhaustively checks the structural invariants and, for every `m` and
/// every dyadic interval `J ⊂ I*_m` of length `2^t` with
/// `t ∈ (s_{m-1}, s_m]`, that `|J ∩ I*_{m-1}| = |J|/2` and
/// `|J ∩ I*_0| = |J|/2^m`. Reports the first failure in `(m, t, position)`
/// order.
pub fn verify_ladder(ladder: &Ladder) -> LadderReport {
    let scales = &ladder.scales;
    let frame = ladder.frame;
    let k = ladder.k();
    let fail = |failure: LadderFailure, checked: u64| LadderReport {
        scales: scales.clone(),
        intervals_checked: checked,
        failure: Some(failure),
    };

    for m in 0..=k {
        let run_cells = frame.cells_per(scales.get(m)).expect("scale within frame");
        if let Some(&(a, b)) = ladder.levels[m].runs().iter().find(|&&(a, b)| b - a != run_cells) {
            return fail(
                LadderFailure {
                    m,
                    t: scales.get(m),
                    position: a,
                    kind: LadderFailureKind::RunLength,
                    observed: Dyadic::from_u64(b - a).mul_pow2(frame.fine_exp()),
                    expected: Dyadic::pow2(scales.get(m)),
                },
                0,
            );
        }
        if m >= 1 {
            let nested = ladder.levels[m - 1].is_subset_of(&ladder.levels[m]).unwrap_or(false);
            if !nested {
                let stray = ladder.levels[m - 1].difference(&ladder.levels[m]).unwrap_or_else(|_| ladder.levels[m - 1].clone());
                return fail(
                    LadderFailure {
                        m,
                        t: scales.get(m - 1),
                        position: stray.runs().first().map_or(0, |r| r.0),
                        kind: LadderFailureKind::Nesting,
                        observed: stray.measure(),
                        expected: Dyadic::zero(),
                    },
                    0,
                );
            }
            let shell = ladder.shells[m].measure();
            let expected = ladder.levels[m].measure().mul_pow2(-1);
            if shell != expected {
                return fail(
                    LadderFailure {
                        m,
                        t: scales.get(m),
                        position: 0,
                        kind: LadderFailureKind::ShellMeasure,
                        observed: shell,
                        expected,
                    },
                    0,
                );
            }
        }
    }

    let base = ladder.levels[0].index();
    let mut checked = 0u64;
    for m in 1..=k {
        let parent = &ladder.levels[m];
        let previous = ladder.levels[m - 1].index();
        for t in (scales.get(m - 1) + 1)..=scales.get(m) {
            let len = frame.cells_per(t).expect("t within frame");
            for &(a, b) in parent.runs() {
                let mut start = a.div_ceil(len) * len;
                while start + len <= b {
                    checked += 1;
                    let prev_hits = previous.count_in(start, start + len);
                    if prev_hits * 2 != len {
                        return fail(
                            LadderFailure {
                                m,
                                t,
                                position: start,
                                kind: LadderFailureKind::ParentHalf,
                                observed: ratio(prev_hits, len),
                                expected: Dyadic::pow2(-1),
                            },
                            checked,
                        );
                    }
                    let base_hits = base.count_in(start, start + len);
                    if (base_hits as u128) << m != len as u128 {
                        return fail(
                            LadderFailure {
                                m,
                                t,
                                position: start,
                                kind: LadderFailureKind::BaseFraction,
                                observed: ratio(base_hits, len),
                                expected: Dyadic::pow2(-(m as i64)),
                            },
                            checked,
                        );
                    }
                    start += len;
                }
            }
        }
    }
    LadderReport { scales: scales.clone(), intervals_checked: checked, failure: None }
}

fn ratio(hits: u64, len: u64) -> Dyadic {
    // len is a power of two
    Dyadic::from_u64(hits).mul_pow2(-(len.trailing_zeros() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::saturates;
    use proptest::prelude::*;

    fn frame(fine: i64, coarse: i64) -> AxisFrame {
        AxisFrame::new(fine, coarse).unwrap()
    }

    fn set(f: AxisFrame, runs: &[(u64, u64)]) -> CellSet1D {
        CellSet1D::new(f, runs.iter().copied()).unwrap()
    }

    fn seq(s: &[i64]) -> ScaleSequence {
        ScaleSequence::new(s.to_vec()).unwrap()
    }

    #[test]
    fn interleave_examples() {
        let f = frame(0, 3);
        let h = set(f, &[(0, 4)]);
        assert_eq!(interleave(0, &h).unwrap().runs(), &[(0, 1), (2, 3)]);
        assert_eq!(interleave(1, &h).unwrap().runs(), &[(0, 2)]);
        let h2 = set(f, &[(0, 2), (4, 6)]);
        assert_eq!(interleave(0, &h2).unwrap().runs(), &[(0, 1), (4, 5)]);
    }

    #[test]
    fn interleave_errors() {
        let f = frame(0, 3);
        assert!(matches!(interleave(0, &set(f, &[(0, 3)])), Err(Error::RunNotDyadic { .. })));
        assert!(matches!(interleave(2, &set(f, &[(0, 4)])), Err(Error::PieceNotFiner { .. })));
        assert!(matches!(interleave(-1, &set(f, &[(0, 4)])), Err(Error::BelowResolution { .. })));
    }

    #[test]
    fn interleave_halves_every_component() {
        let f = frame(0, 5);
        let h = set(f, &[(0, 8), (16, 24)]);
        let out = interleave(1, &h).unwrap();
        assert!(out.is_subset_of(&h).unwrap());
        assert!(saturates(&out, &h, &Dyadic::pow2(-1)).unwrap());
    }

    #[test]
    fn build_ladder_examples() {
        let l = build_ladder(&seq(&[0, 1, 2])).unwrap();
        assert_eq!(l.level(2).runs(), &[(0, 4)]);
        assert_eq!(l.level(1).runs(), &[(0, 2)]);
        assert_eq!(l.level(0).runs(), &[(0, 1)]);

        let l = build_ladder(&seq(&[0, 2])).unwrap();
        assert_eq!(l.level(1).runs(), &[(0, 4)]);
        assert_eq!(l.level(0).runs(), &[(0, 1), (2, 3)]);

        let l = build_ladder(&seq(&[0, 1])).unwrap();
        assert_eq!(l.level(0).measure(), Dyadic::one());
        assert_eq!(l.level(1).measure(), Dyadic::from_int(2));
    }

    #[test]
    fn scale_validation() {
        assert!(matches!(ScaleSequence::new(alloc::vec![3]), Err(Error::TooFewScales(1))));
        assert!(matches!(ScaleSequence::new(alloc::vec![0, 2, 2]), Err(Error::NonIncreasingScales(_))));
        assert!(matches!(ScaleSequence::new(alloc::vec![1, 0]), Err(Error::NonIncreasingScales(_))));
        assert_eq!(ScaleSequence::from_gaps(2, &[1, 3]).unwrap().as_slice(), &[2, 3, 6]);
    }

    #[test]
    fn bracket_lookup() {
        let s = seq(&[0, 2, 5]);
        assert_eq!(s.bracket(0), None);
        assert_eq!(s.bracket(1), Some(1));
        assert_eq!(s.bracket(2), Some(1));
        assert_eq!(s.bracket(3), Some(2));
        assert_eq!(s.bracket(5), Some(2));
        assert_eq!(s.bracket(6), None);
    }

    #[test]
    fn verify_small_ladders() {
        let l = build_ladder(&seq(&[0, 1, 2])).unwrap();
        let report = verify_ladder(&l);
        assert!(report.passed());
        // J = [0,2) for m = 1 and J = [0,4) for m = 2
        assert_eq!(report.intervals_checked, 2);

        let l = build_ladder(&seq(&[0, 2])).unwrap();
        let report = verify_ladder(&l);
        assert!(report.passed(), "{report:?}");
        // t = 1: [0,2), [2,4); t = 2: [0,4)
        assert_eq!(report.intervals_checked, 3);
        let j = CellSet1D::interval(l.frame(), 0, 2).unwrap();
        assert!(saturates(l.level(0), &j, &Dyadic::pow2(-1)).unwrap());
    }

    #[test]
    fn verify_detects_tampering() {
        let mut l = build_ladder(&seq(&[0, 2, 3])).unwrap();
        // drop one cell from the base level
        let broken = l.levels[0].difference(&CellSet1D::interval(l.frame, 0, 1).unwrap()).unwrap();
        l.levels[0] = broken.clone();
        l.shells[0] = broken;
        let report = verify_ladder(&l);
        assert!(!report.passed());
    }

    #[test]
    fn top_level_fraction() {
        for s in [seq(&[0, 1, 3, 4]), seq(&[-2, 0, 1]), seq(&[1, 4])] {
            let l = build_ladder(&s).unwrap();
            let k = s.k();
            let full = CellSet1D::full(l.frame());
            assert!(saturates(l.level(0), &full, &Dyadic::pow2(-(k as i64))).unwrap());
        }
    }

    fn arb_scales() -> impl Strategy<Value = ScaleSequence> {
        (-3i64..3, proptest::collection::vec(1i64..=3, 1..=6))
            .prop_map(|(base, gaps)| ScaleSequence::from_gaps(base, &gaps).unwrap())
    }

    proptest! {
        #[test]
        fn closed_forms_match_construction(s in arb_scales()) {
            let l = build_ladder(&s).unwrap();
            let k = s.k();
            let span = s.last() - s.first();
            prop_assert_eq!(l.level(0).runs().len() as u64, 1u64 << (span - k as i64));
            for m in 0..=k {
                prop_assert_eq!(l.level(m).measure(), s.level_measure(m));
                prop_assert_eq!(l.shell(m).measure(), s.shell_measure(m));
                prop_assert_eq!(s.shell_measure(m), Dyadic::pow2(s.shell_log2(m)));
            }
        }

        #[test]
        fn shells_partition_domain(s in arb_scales()) {
            let l = build_ladder(&s).unwrap();
            let mut acc = CellSet1D::empty(l.frame());
            for m in 0..=s.k() {
                prop_assert!(acc.intersect(l.shell(m)).unwrap().is_empty());
                acc = acc.union(l.shell(m)).unwrap();
            }
            prop_assert_eq!(acc, CellSet1D::full(l.frame()));
        }

        // membership in I*_m is "bits s_m - s_0, …, s_{k-1} - s_0 of the cell index are zero"
        #[test]
        fn levels_match_bit_rule(s in arb_scales()) {
            let l = build_ladder(&s).unwrap();
            let k = s.k();
            for m in 0..=k {
                let flags = l.level(m).membership();
                for (cell, &flag) in flags.iter().enumerate() {
                    let expected = (m..k).all(|lvl| (cell >> (s.get(lvl) - s.first())) & 1 == 0);
                    prop_assert_eq!(flag, expected);
                }
            }
        }

        #[test]
        fn saturation_composes(s in arb_scales()) {
            let l = build_ladder(&s).unwrap();
            let k = s.k();
            for m in 1..=k {
                let alpha = Dyadic::pow2(-(m as i64));
                prop_assert!(saturates(l.level(0), l.level(m), &alpha).unwrap());
                prop_assert_eq!(
                    l.level(m).intersect(l.level(0)).unwrap().measure(),
                    &alpha * &l.level(m).measure()
                );
            }
        }

        #[test]
        fn ladders_verify(s in arb_scales()) {
            let l = build_ladder(&s).unwrap();
            prop_assert!(verify_ladder(&l).passed());
        }
    }
}
