//! Extremal configurations and exact lower-bound verification.
//!
//! With one ladder per axis, `E = I*_{1,0} × … × I*_{n,0}` and the maximal
//! function of `χ_E` is at least `2^{-k}` on `⋃_{m ∈ Ω} ∏_j I*_{j,m_j}`. The
//! measure of that union is computed from the shells: a point lies in the
//! union iff its vector of shell indices is dominated by some `m ∈ Ω`, so
//! the measure is a sum over the downward closure of Ω in `{0..k}^n`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::ladder::{build_ladder, Ladder, ScaleSequence, LADDER_SPAN_LIMIT};
use crate::omega::{completeness, enumerate_compositions, ratio_to_f64, OmegaSet};
use crate::spectra::{extract_sequences, Extraction, IntSet, SpectrumFamily, Window};

/// Largest `(k+1)^n` lattice the downward-closure sum will allocate.
pub const LATTICE_LIMIT: u128 = 1 << 26;

/// One scale sequence per axis, all with the same `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalConfig {
    k: usize,
    scales: Vec<ScaleSequence>,
    /// Present when every axis fits under [`LADDER_SPAN_LIMIT`].
    ladders: Option<Vec<Ladder>>,
}

impl ExtremalConfig {
    pub fn n(&self) -> usize {
        self.scales.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scales(&self) -> &[ScaleSequence] {
        &self.scales
    }

    pub fn ladders(&self) -> Option<&[Ladder]> {
        self.ladders.as_deref()
    }

    /// `|E| = ∏_j 2^{s_{j,k} − k}`.
    pub fn e_measure(&self) -> Dyadic {
        Dyadic::pow2(self.e_log2())
    }

    fn e_log2(&self) -> i64 {
        self.scales.iter().map(|s| s.last() - self.k as i64).sum()
    }

    /// Total grid cells of the evaluation domain `∏ [0, 2^{s_{j,k}})` at
    /// resolution `2^{s_{j,0}}`, or `None` if it does not fit in `u128`.
    pub fn cell_count(&self) -> Option<u128> {
        let bits: i64 = self.scales.iter().map(|s| s.last() - s.first()).sum();
        (bits < 128).then(|| 1u128 << bits)
    }
}

/// Builds ladders for the given sequences and checks the measure identities.
pub fn build_extremal(sequences: &[ScaleSequence]) -> Result<ExtremalConfig> {
    let first = sequences.first().ok_or(Error::EmptyComponents)?;
    let k = first.k();
    if let Some(s) = sequences.iter().find(|s| s.k() != k) {
        return Err(Error::DimensionMismatch { expected: k + 1, found: s.as_slice().len() });
    }
    let fits = sequences.iter().all(|s| s.last() - s.first() <= LADDER_SPAN_LIMIT as i64);
    let ladders = if fits {
        Some(sequences.iter().map(build_ladder).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    let config = ExtremalConfig { k, scales: sequences.to_vec(), ladders };
    check_identities(&config)?;
    Ok(config)
}

fn check_identities(config: &ExtremalConfig) -> Result<()> {
    let Some(ladders) = &config.ladders else {
        return Ok(());
    };
    for (j, (ladder, s)) in ladders.iter().zip(&config.scales).enumerate() {
        for m in 0..=config.k {
            if ladder.level(m).measure() != s.level_measure(m) || ladder.shell(m).measure() != s.shell_measure(m) {
                return Err(Error::Invariant(format!("axis {} level {m} measure disagrees with closed form", j + 1)));
            }
        }
    }
    let e: Dyadic = ladders.iter().fold(Dyadic::one(), |acc, l| acc * l.level(0).measure());
    if e != config.e_measure() {
        return Err(Error::Invariant(String::from("|E| disagrees with the product of base levels")));
    }
    let n = config.n();
    if n <= config.k {
        let target = e.mul_pow2(config.k as i64);
        for m in enumerate_compositions(n, config.k)?.tuples().iter().take(4096) {
            let p = ladders.iter().zip(m).fold(Dyadic::one(), |acc, (l, &mj)| acc * l.level(mj).measure());
            if p != target {
                return Err(Error::Invariant(format!("product of levels for {m:?} is not 2^k |E|")));
            }
        }
    }
    Ok(())
}

fn lattice_size(n: usize, k: usize) -> Result<usize> {
    let mut size: u128 = 1;
    for _ in 0..n {
        size = size.saturating_mul(k as u128 + 1);
    }
    if size > LATTICE_LIMIT {
        return Err(Error::LatticeTooLarge(size));
    }
    Ok(size as usize)
}

/// The downward closure of Ω in `{0..k}^n`, as a row-major boolean lattice.
pub fn downward_closure(n: usize, k: usize, tuples: &[Vec<usize>]) -> Result<Vec<bool>> {
    let size = lattice_size(n, k)?;
    let side = k + 1;
    let mut lattice = vec![false; size];
    for t in tuples {
        if t.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.len() });
        }
        if t.iter().any(|&m| m > k) {
            return Err(Error::TupleOutOfRange { tuple: t.clone(), k });
        }
        let idx = t.iter().fold(0usize, |acc, &m| acc * side + m);
        lattice[idx] = true;
    }
    // suffix-or along each axis
    let mut stride = 1usize;
    for _ in 0..n {
        for idx in (0..size).rev() {
            let c = (idx / stride) % side;
            if c < k && lattice[idx + stride] {
                lattice[idx] = true;
            }
        }
        stride *= side;
    }
    Ok(lattice)
}

/// Exact measure of `⋃_{m ∈ Ω} ∏_j I*_{j,m_j}`.
pub fn union_level_set_measure(config: &ExtremalConfig, omega: &OmegaSet) -> Result<Dyadic> {
    if omega.is_empty() {
        return Ok(Dyadic::zero());
    }
    let n = config.n();
    if omega.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: omega.n() });
    }
    let k = config.k;
    if let Some(t) = omega.tuples().iter().find(|t| t.iter().any(|&m| m == 0 || m > k)) {
        return Err(Error::TupleOutOfRange { tuple: t.clone(), k });
    }
    let lattice = downward_closure(n, k, omega.tuples())?;
    let side = k + 1;
    let shell_exp: Vec<Vec<i64>> = config.scales.iter().map(|s| (0..=k).map(|m| s.shell_log2(m)).collect()).collect();
    // every term is a power of two; count them by exponent
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for (idx, &inside) in lattice.iter().enumerate() {
        if !inside {
            continue;
        }
        let mut rest = idx;
        let mut e = 0i64;
        for j in (0..n).rev() {
            e += shell_exp[j][rest % side];
            rest /= side;
        }
        *counts.entry(e).or_insert(0) += 1;
    }
    Ok(counts.into_iter().map(|(e, c)| Dyadic::new(BigInt::from(c), e)).sum())
}

/// `Σ_{m ∈ Ω} ∏_j |H_{j,m_j}|`, the disjoint-shell lower bound.
pub fn disjoint_shell_sum(config: &ExtremalConfig, omega: &OmegaSet) -> Dyadic {
    omega
        .tuples()
        .iter()
        .map(|m| {
            let e: i64 = config.scales.iter().zip(m).map(|(s, &mj)| s.shell_log2(mj)).sum();
            Dyadic::pow2(e)
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub n: usize,
    pub k: usize,
    pub omega_card: usize,
    pub realized_omega_card: usize,
    pub union_measure: Dyadic,
    /// `2^{-n} · card(realized) · 2^k · |E|`.
    pub bound: Dyadic,
    pub e_measure: Dyadic,
    /// `union / (2^k |E|)`.
    pub achieved_ratio: Dyadic,
    pub pass: bool,
    /// Spectrum tuple witnessing each realized composition.
    pub witnesses: BTreeMap<Vec<usize>, Vec<i64>>,
    pub warnings: Vec<String>,
}

/// Verification over an Ω whose tuples are taken as realized.
pub fn verify_realized(config: &ExtremalConfig, realized: &OmegaSet) -> Result<VerificationReport> {
    let n = config.n();
    let k = config.k;
    let union_measure = union_level_set_measure(config, realized)?;
    let e_measure = config.e_measure();
    let scale = e_measure.mul_pow2(k as i64);
    let bound = (&scale * &Dyadic::from_u64(realized.len() as u64)).mul_pow2(-(n as i64));
    let achieved_ratio = union_measure.mul_pow2(-(k as i64) - config.e_log2());
    let mut warnings = Vec::new();
    if realized.is_empty() {
        warnings.push(String::from("no tuple of omega is realized; nothing to verify"));
    }
    let pass = !realized.is_empty() && union_measure >= bound;
    Ok(VerificationReport {
        n,
        k,
        omega_card: realized.len(),
        realized_omega_card: realized.len(),
        union_measure,
        bound,
        e_measure,
        achieved_ratio,
        pass,
        witnesses: BTreeMap::new(),
        warnings,
    })
}

/// Restricts Ω to the tuples the family realizes inside `window`, then
/// checks the level-set bound on that subset.
pub fn verify_lemma3(
    config: &ExtremalConfig,
    omega: &OmegaSet,
    family: &SpectrumFamily,
    window: &Window,
) -> Result<VerificationReport> {
    let c = completeness(family, &config.scales, omega, window)?;
    let mut report = verify_realized(config, &c.realized)?;
    report.omega_card = omega.len();
    let mut warnings: Vec<String> =
        c.missing.iter().map(|m| format!("tuple {m:?} is not realized inside the window and was dropped")).collect();
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    report.witnesses = c.witnesses;
    Ok(report)
}

/// `k = max(n, ⌈log₂(1/α)⌉)` for `0 < α < 1`.
pub fn k_for_alpha(alpha: &Dyadic, n: usize) -> Result<usize> {
    if !alpha.is_positive() || *alpha >= Dyadic::one() {
        return Err(Error::AlphaOutOfRange);
    }
    // α = m 2^e with m odd: ⌊log₂ α⌋ = e + bits(m) − 1
    let floor_log = alpha.exponent() + alpha.mantissa().bits() as i64 - 1;
    let needed = (-floor_log) as usize;
    Ok(needed.max(n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub alpha: Dyadic,
    pub k: usize,
    pub extraction: Extraction,
    pub report: VerificationReport,
    /// `union · α / ((1 + log₂(1/α))^{n−1} |E|)`, exact when α is a power of two.
    pub log_constant: Option<BigRational>,
    pub log_constant_f64: f64,
    /// `achieved_ratio / k^{n−1}`.
    pub per_k_constant: BigRational,
    pub per_k_constant_f64: f64,
}

pub fn theorem1_run(
    alpha: &Dyadic,
    family: &SpectrumFamily,
    s_sets: &[IntSet],
    window: &Window,
) -> Result<Theorem1Report> {
    let n = family.dimension();
    let k = k_for_alpha(alpha, n)?;
    let extraction = extract_sequences(family, s_sets, k, window)?;
    let config = build_extremal(&extraction.sequences)?;
    let omega = enumerate_compositions(n, k)?;
    let report = verify_lemma3(&config, &omega, family, window)?;

    let value = (&report.union_measure * alpha).checked_div(&report.e_measure).expect("|E| is a power of two");
    let log_constant = if alpha.is_power_of_two() {
        let log_inv = BigInt::from(-alpha.exponent());
        let denom = num_traits::pow(BigInt::one() + log_inv, n - 1);
        Some(value.to_rational() / BigRational::from_integer(denom))
    } else {
        None
    };
    let log_constant_f64 = match &log_constant {
        Some(r) => ratio_to_f64(r),
        None => value.to_f64() / libm::pow(1.0 - libm::log2(alpha.to_f64()), (n - 1) as f64),
    };
    let per_k_constant = per_k(&report.achieved_ratio, k, n - 1);
    let per_k_constant_f64 = ratio_to_f64(&per_k_constant);
    Ok(Theorem1Report {
        alpha: alpha.clone(),
        k,
        extraction,
        report,
        log_constant,
        log_constant_f64,
        per_k_constant,
        per_k_constant_f64,
    })
}

fn per_k(ratio: &Dyadic, k: usize, e: usize) -> BigRational {
    ratio.to_rational() / BigRational::from_integer(num_traits::pow(BigInt::from(k), e))
}

/// One stage `(k_j, Ω_j)`, with sequences either given or extracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub k: usize,
    pub omega: OmegaSet,
    pub sequences: Option<Vec<ScaleSequence>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageOutcome {
    pub k: usize,
    pub omega_card: usize,
    /// `card(Ω_j) / k_j^{d−1}`, `d` the dimension.
    pub density: BigRational,
    pub density_f64: f64,
    pub sequences: Option<Vec<ScaleSequence>>,
    pub report: Option<VerificationReport>,
    /// `achieved_ratio / k_j^{d−1}`.
    pub c_b: Option<BigRational>,
    pub error: Option<Error>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Report {
    pub stages: Vec<StageOutcome>,
    /// The densities fall strictly and end at most half their first value:
    /// the infimum looks like zero and no sharpness conclusion is drawn.
    pub vanishing_infimum: bool,
}

pub fn theorem2_run(
    family: &SpectrumFamily,
    stages: &[Stage],
    s_sets: &[IntSet],
    window: &Window,
) -> Theorem2Report {
    let d = family.dimension();
    let mut outcomes = Vec::with_capacity(stages.len());
    for stage in stages {
        let density = if stage.k == 0 {
            BigRational::zero()
        } else {
            crate::omega::density_ratio(stage.omega.len(), stage.k, d - 1)
        };
        let density_f64 = ratio_to_f64(&density);
        let mut outcome = StageOutcome {
            k: stage.k,
            omega_card: stage.omega.len(),
            density,
            density_f64,
            sequences: None,
            report: None,
            c_b: None,
            error: None,
        };
        let run = || -> Result<(Vec<ScaleSequence>, VerificationReport)> {
            if stage.omega.k() != stage.k {
                return Err(Error::TupleOutOfRange { tuple: Vec::new(), k: stage.k });
            }
            let sequences = match &stage.sequences {
                Some(s) => s.clone(),
                None => extract_sequences(family, s_sets, stage.k, window)?.sequences,
            };
            let config = build_extremal(&sequences)?;
            let report = verify_lemma3(&config, &stage.omega, family, window)?;
            Ok((sequences, report))
        };
        match run() {
            Ok((sequences, report)) => {
                outcome.c_b = Some(per_k(&report.achieved_ratio, stage.k, d - 1));
                outcome.sequences = Some(sequences);
                outcome.report = Some(report);
            }
            Err(e) => outcome.error = Some(e),
        }
        outcomes.push(outcome);
    }
    let vanishing_infimum = outcomes.len() >= 2
        && outcomes.windows(2).all(|w| w[1].density < w[0].density)
        && &outcomes[outcomes.len() - 1].density * BigRational::from_integer(BigInt::from(2)) <= outcomes[0].density;
    Theorem2Report { stages: outcomes, vanishing_infimum }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::cube_tuples;
    use proptest::prelude::*;

    fn unit(n: usize, k: usize) -> ExtremalConfig {
        build_extremal(&vec![ScaleSequence::unit(0, k); n]).unwrap()
    }

    #[test]
    fn build_examples() {
        assert_eq!(unit(2, 5).e_measure(), Dyadic::one());
        let c = build_extremal(&vec![ScaleSequence::new(vec![0, 2]).unwrap(); 2]).unwrap();
        assert_eq!(c.e_measure(), Dyadic::from_int(4));
        assert_eq!(c.ladders().unwrap()[0].level(0).runs(), &[(0, 1), (2, 3)]);
        assert_eq!(unit(1, 1).e_measure(), Dyadic::one());
        assert!(build_extremal(&[ScaleSequence::unit(0, 2), ScaleSequence::unit(0, 3)]).is_err());
    }

    #[test]
    fn huge_scales_stay_symbolic() {
        let s = ScaleSequence::new(vec![0, 16, 36, 64]).unwrap();
        let c = build_extremal(&vec![ScaleSequence::unit(0, 3), ScaleSequence::unit(0, 3), s]).unwrap();
        assert!(c.ladders().is_none());
        assert_eq!(c.e_measure(), Dyadic::pow2(61));
        let r = verify_realized(&c, &enumerate_compositions(3, 3).unwrap()).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn union_examples() {
        let c = unit(2, 2);
        let one = OmegaSet::new(2, 2, vec![vec![1, 1]]).unwrap();
        assert_eq!(union_level_set_measure(&c, &one).unwrap(), Dyadic::from_int(4));
        let c = unit(2, 5);
        assert_eq!(union_level_set_measure(&c, &enumerate_compositions(2, 5).unwrap()).unwrap(), Dyadic::from_int(80));
        assert!(union_level_set_measure(&c, &OmegaSet::empty(2, 5)).unwrap().is_zero());
    }

    #[test]
    fn lemma3_examples() {
        let fam = SpectrumFamily::FullProduct(vec![IntSet::All; 2]);
        let w = Window::cube(2, -5, 10).unwrap();
        let r = verify_lemma3(&unit(2, 5), &enumerate_compositions(2, 5).unwrap(), &fam, &w).unwrap();
        assert_eq!(r.achieved_ratio, "5/2".parse().unwrap());
        // bound / (2^k |E|) = 2^{-2} * 4 = 1
        assert_eq!(r.bound, Dyadic::from_int(32));
        assert!(r.pass);

        let r = verify_lemma3(&unit(2, 2), &enumerate_compositions(2, 2).unwrap(), &fam, &w).unwrap();
        assert_eq!(r.bound, Dyadic::one());
        assert!(r.union_measure >= Dyadic::from_int(4));

        let nothing = SpectrumFamily::Explicit { n: 2, tuples: vec![] };
        let r = verify_lemma3(&unit(2, 3), &enumerate_compositions(2, 3).unwrap(), &nothing, &w).unwrap();
        assert!(!r.pass);
        assert!(r.achieved_ratio.is_zero());
        assert_eq!(r.realized_omega_card, 0);
        assert_eq!(r.warnings.len(), 3);
    }

    #[test]
    fn theorem1_examples() {
        let fam = SpectrumFamily::FullProduct(vec![IntSet::All; 2]);
        let r = theorem1_run(&Dyadic::pow2(-5), &fam, &fam.default_s_sets(), &Window::cube(2, 0, 20).unwrap()).unwrap();
        assert_eq!(r.k, 5);
        assert_eq!(r.report.achieved_ratio, "5/2".parse().unwrap());
        assert_eq!(r.per_k_constant, BigRational::new(1.into(), 2.into()));
        assert_eq!(r.log_constant, Some(BigRational::new(5.into(), 12.into())));

        let fam1 = SpectrumFamily::FullProduct(vec![IntSet::All]);
        let r = theorem1_run(&Dyadic::pow2(-1), &fam1, &fam1.default_s_sets(), &Window::cube(1, 0, 10).unwrap()).unwrap();
        assert_eq!(r.k, 1);
        assert!(r.report.achieved_ratio >= "1/2".parse().unwrap());

        for bad in [Dyadic::one(), Dyadic::from_int(3), Dyadic::zero(), Dyadic::from_int(-1)] {
            assert_eq!(
                theorem1_run(&bad, &fam, &fam.default_s_sets(), &Window::cube(2, 0, 20).unwrap()).unwrap_err(),
                Error::AlphaOutOfRange
            );
        }
    }

    #[test]
    fn k_for_alpha_values() {
        assert_eq!(k_for_alpha(&Dyadic::pow2(-5), 2).unwrap(), 5);
        assert_eq!(k_for_alpha(&"3/8".parse().unwrap(), 1).unwrap(), 2);
        assert_eq!(k_for_alpha(&"3/4".parse().unwrap(), 1).unwrap(), 1);
        assert_eq!(k_for_alpha(&"3/4".parse().unwrap(), 3).unwrap(), 3);
        assert_eq!(k_for_alpha(&"13/128".parse().unwrap(), 1).unwrap(), 4);
    }

    #[test]
    fn theorem2_stages() {
        let fam = SpectrumFamily::FullProduct(vec![IntSet::All; 2]);
        let w = Window::cube(2, 0, 40).unwrap();
        let full: Vec<Stage> = (2..=5)
            .map(|k| Stage { k, omega: enumerate_compositions(2, k).unwrap(), sequences: None })
            .collect();
        let r = theorem2_run(&fam, &full, &fam.default_s_sets(), &w);
        assert!(r.stages.iter().all(|s| s.report.as_ref().is_some_and(|r| r.pass)));
        assert!(!r.vanishing_infimum);

        let singletons: Vec<Stage> = (2..=6)
            .map(|k| Stage {
                k,
                omega: OmegaSet::new(2, k, vec![vec![1, k - 1]]).unwrap(),
                sequences: Some(vec![ScaleSequence::unit(0, k); 2]),
            })
            .collect();
        let r = theorem2_run(&fam, &singletons, &fam.default_s_sets(), &w);
        assert!(r.vanishing_infimum);
        assert_eq!(r.stages[0].density, BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn theorem2_monotone_tuples() {
        let fam = SpectrumFamily::FullProduct(vec![IntSet::All; 3]);
        let w = Window::cube(3, 0, 30).unwrap();
        let stages: Vec<Stage> = (3..=6)
            .map(|k| Stage { k, omega: crate::omega::monotone_tuples(2, k).unwrap(), sequences: None })
            .collect();
        let r = theorem2_run(&fam, &stages, &fam.default_s_sets(), &w);
        for s in &r.stages {
            let brute = cube_tuples(3, s.k)
                .into_iter()
                .filter(|t| t.iter().sum::<usize>() == s.k && t[0] >= t[1])
                .count();
            assert_eq!(s.omega_card, brute);
            assert_eq!(s.density, BigRational::new(brute.into(), (s.k * s.k).into()));
            assert!(s.report.as_ref().unwrap().pass);
        }
    }

    /// Shell cell counts read off materialized ladders, summed over the
    /// lattice points dominated by some tuple (no sweep).
    fn union_from_ladders(c: &ExtremalConfig, omega: &OmegaSet) -> Dyadic {
        let ladders = c.ladders().unwrap();
        let k = c.k();
        let mut total = Dyadic::zero();
        let mut point = vec![0usize; c.n()];
        loop {
            if omega.tuples().iter().any(|m| point.iter().zip(m).all(|(a, b)| a <= b)) {
                total = total + ladders.iter().zip(&point).fold(Dyadic::one(), |acc, (l, &p)| acc * l.shell(p).measure());
            }
            let mut j = c.n();
            loop {
                if j == 0 {
                    return total;
                }
                j -= 1;
                if point[j] < k {
                    point[j] += 1;
                    break;
                }
                point[j] = 0;
            }
        }
    }

    fn arb_config() -> impl Strategy<Value = (ExtremalConfig, Vec<Vec<usize>>)> {
        (1usize..4, 1usize..6).prop_flat_map(|(n, k)| {
            let seqs = proptest::collection::vec(
                (-3i64..3, proptest::collection::vec(1i64..4, k)),
                n,
            );
            let tuples = proptest::collection::vec(proptest::collection::vec(1usize..=k, n), 0..6);
            (seqs, tuples).prop_map(move |(seqs, raw)| {
                let seqs: Vec<ScaleSequence> =
                    seqs.into_iter().map(|(b, g)| ScaleSequence::from_gaps(b, &g).unwrap()).collect();
                (build_extremal(&seqs).unwrap(), raw)
            })
        })
    }

    fn as_omega(c: &ExtremalConfig, raw: &[Vec<usize>]) -> OmegaSet {
        // keep the tuples, whatever their sum, by treating each as its own Ω
        let k = c.k();
        let tuples = raw.iter().filter(|t| t.iter().sum::<usize>() == k).cloned().collect();
        OmegaSet::new(c.n(), k, tuples).unwrap()
    }

    proptest! {
        #[test]
        fn closure_sum_matches_ladders((c, raw) in arb_config()) {
            let omega = if c.n() <= c.k() { enumerate_compositions(c.n(), c.k()).unwrap() } else { OmegaSet::empty(c.n(), c.k()) };
            prop_assert_eq!(union_level_set_measure(&c, &omega).unwrap(), union_from_ladders(&c, &omega));
            let sub = as_omega(&c, &raw);
            prop_assert_eq!(union_level_set_measure(&c, &sub).unwrap(), union_from_ladders(&c, &sub));
        }

        #[test]
        fn shells_bound_the_union((c, _raw) in arb_config()) {
            prop_assume!(c.n() <= c.k());
            let omega = enumerate_compositions(c.n(), c.k()).unwrap();
            let union = union_level_set_measure(&c, &omega).unwrap();
            let shells = disjoint_shell_sum(&c, &omega);
            let expected = (c.e_measure() * Dyadic::from_u64(omega.len() as u64)).mul_pow2(c.k() as i64 - c.n() as i64);
            prop_assert_eq!(&shells, &expected);
            prop_assert!(union >= shells);
            prop_assert!(verify_realized(&c, &omega).unwrap().pass);
        }

        #[test]
        fn unit_gap_closed_form(k in 2usize..13) {
            let r = verify_realized(&unit(2, k), &enumerate_compositions(2, k).unwrap()).unwrap();
            prop_assert_eq!(r.union_measure, Dyadic::new(BigInt::from(k), k as i64 - 1));
            prop_assert_eq!(r.achieved_ratio, Dyadic::new(BigInt::from(k), -1));
        }

        #[test]
        fn shifting_scales_keeps_ratio((c, _raw) in arb_config(), by in -4i64..4) {
            prop_assume!(c.n() <= c.k());
            let omega = enumerate_compositions(c.n(), c.k()).unwrap();
            let shifted: Vec<ScaleSequence> = c.scales().iter().map(|s| s.shifted(by)).collect();
            let c2 = build_extremal(&shifted).unwrap();
            let a = verify_realized(&c, &omega).unwrap();
            let b = verify_realized(&c2, &omega).unwrap();
            prop_assert_eq!(a.achieved_ratio, b.achieved_ratio);
            prop_assert_eq!(b.union_measure, a.union_measure.mul_pow2(by * c.n() as i64));
        }
    }
}
