//! Experiment configuration: TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use rarebasis_core::ladder::ScaleSequence;
use rarebasis_core::omega::{enumerate_compositions, monotone_tuples, ShapeList2D};
use rarebasis_core::spectra::{PlanarBasis, SPECTRUM_LIMIT, RelationSign, ThetaEntry};
use rarebasis_core::{Dyadic, IntSet, OmegaSet, SpectrumFamily, Window};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Default oracle guard, in grid cells.
pub use rarebasis_core::oracle::DEFAULT_GUARD;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: Option<usize>,
    pub k: Option<usize>,
    /// Exact dyadic literal such as `"1*2^-5"` or `"3/8"`.
    pub alpha: Option<String>,
    pub window: Option<WindowSpec>,
    pub guard: Option<u64>,
    pub net_budget: Option<u64>,
    pub family: Option<FamilySpec>,
    pub s_sets: Option<Vec<IntSetSpec>>,
    /// Explicit scale sequences, one per axis.
    pub sequences: Option<Vec<Vec<i64>>>,
    /// Per-axis gap patterns, repeated cyclically to the needed length.
    pub gaps: Option<Vec<Vec<i64>>>,
    /// Per-axis starting scale for `gaps` (default 0).
    pub base: Option<Vec<i64>>,
    pub omega: Option<OmegaSpec>,
    pub k_range: Option<[usize; 2]>,
    pub stages: Option<Vec<StageSpec>>,
    pub shapes: Option<Vec<[i64; 2]>>,
    pub planar: Option<PlanarSpec>,
    pub third: Option<IntSetSpec>,
    /// Number of random configurations for seeded oracle runs.
    pub trials: Option<usize>,
    pub output: Option<OutputSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub report: Option<PathBuf>,
    pub mask: Option<PathBuf>,
}

/// `"lo:hi,lo:hi"` or a list of `[lo, hi]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSpec {
    Text(String),
    Pairs(Vec<[i64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntSetSpec {
    All,
    Explicit { values: Vec<i64> },
    Arithmetic { start: i64, step: i64 },
    Quadratic {
        #[serde(default = "one")]
        scale: i64,
        #[serde(default)]
        offset: i64,
        max_index: Option<i64>,
    },
    /// `{j² : 0 <= j <= max_index}`, or all squares.
    Squares { max_index: Option<i64> },
    GeometricGaps { start: i64, first_gap: i64, ratio: i64 },
}

fn one() -> i64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlanarSpec {
    SumAtMost { bound: i64 },
    Pairs { pairs: Vec<[i64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaEntrySpec {
    pub args: Vec<i64>,
    pub index: u64,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    FullProduct { sets: Option<Vec<IntSetSpec>> },
    Soria { gamma: IntSetSpec },
    Zygmund { gamma: IntSetSpec },
    Cordoba { gamma: IntSetSpec },
    LinearRelation {
        t_sets: Vec<IntSetSpec>,
        gamma: IntSetSpec,
        indices: Vec<usize>,
        sign: SignSpec,
    },
    ThetaTable { t_sets: Vec<IntSetSpec>, entries: Vec<ThetaEntrySpec> },
    PlanarProduct { planar: PlanarSpec, third: IntSetSpec },
    Explicit { n: usize, tuples: Vec<Vec<i64>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignSpec {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OmegaSpec {
    Full,
    /// Tuples with the first `n − 1` entries non-increasing.
    Monotone,
    Explicit { tuples: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub k: usize,
    pub omega: Option<OmegaSpec>,
    pub sequences: Option<Vec<Vec<i64>>>,
}

impl IntSetSpec {
    pub fn to_core(&self) -> IntSet {
        match self {
            IntSetSpec::All => IntSet::All,
            IntSetSpec::Explicit { values } => IntSet::explicit(values.clone()),
            &IntSetSpec::Arithmetic { start, step } => IntSet::Arithmetic { start, step },
            &IntSetSpec::Quadratic { scale, offset, max_index } => match max_index {
                Some(top) => IntSet::explicit((0..=top).map(|j| scale * j * j + offset).collect()),
                None => IntSet::Quadratic { scale, offset },
            },
            &IntSetSpec::Squares { max_index } => match max_index {
                Some(top) => IntSet::explicit((0..=top).map(|j| j * j).collect()),
                None => IntSet::squares(),
            },
            &IntSetSpec::GeometricGaps { start, first_gap, ratio } => IntSet::GeometricGaps { start, first_gap, ratio },
        }
    }
}

impl PlanarSpec {
    pub fn to_core(&self) -> PlanarBasis {
        match self {
            PlanarSpec::SumAtMost { bound } => PlanarBasis::SumAtMost(*bound),
            PlanarSpec::Pairs { pairs } => PlanarBasis::Pairs(pairs.iter().map(|p| (p[0], p[1])).collect()),
        }
    }
}

fn sets(specs: &[IntSetSpec]) -> Vec<IntSet> {
    specs.iter().map(IntSetSpec::to_core).collect()
}

impl FamilySpec {
    pub fn to_core(&self, n: Option<usize>) -> Result<SpectrumFamily, CliError> {
        let family = match self {
            FamilySpec::FullProduct { sets: Some(s) } => SpectrumFamily::FullProduct(sets(s)),
            FamilySpec::FullProduct { sets: None } => {
                let n = n.ok_or_else(|| CliError::Config("full_product without sets needs n".into()))?;
                SpectrumFamily::FullProduct(vec![IntSet::All; n])
            }
            FamilySpec::Soria { gamma } => SpectrumFamily::Soria(gamma.to_core()),
            FamilySpec::Zygmund { gamma } => SpectrumFamily::Zygmund(gamma.to_core()),
            FamilySpec::Cordoba { gamma } => SpectrumFamily::Cordoba(gamma.to_core()),
            FamilySpec::LinearRelation { t_sets, gamma, indices, sign } => SpectrumFamily::LinearRelation {
                t_sets: sets(t_sets),
                gamma: gamma.to_core(),
                indices: indices.clone(),
                sign: match sign {
                    SignSpec::Plus => RelationSign::Plus,
                    SignSpec::Minus => RelationSign::Minus,
                },
            },
            FamilySpec::ThetaTable { t_sets, entries } => SpectrumFamily::ThetaTable {
                t_sets: sets(t_sets),
                entries: entries
                    .iter()
                    .map(|e| ThetaEntry { args: e.args.clone(), index: e.index, value: e.value })
                    .collect(),
            },
            FamilySpec::PlanarProduct { planar, third } => {
                SpectrumFamily::PlanarProduct { planar: planar.to_core(), third: third.to_core() }
            }
            FamilySpec::Explicit { n, tuples } => SpectrumFamily::Explicit { n: *n, tuples: tuples.clone() },
        };
        family.validate()?;
        if let Some(n) = n {
            if family.dimension() != n {
                return Err(CliError::Config(format!("family has dimension {}, but n = {n}", family.dimension())));
            }
        }
        Ok(family)
    }
}

pub fn parse_window(text: &str) -> Result<Vec<(i64, i64)>, CliError> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("window range {part:?} is not lo:hi")))?;
            let parse = |s: &str| {
                s.trim().parse::<i64>().map_err(|_| CliError::Config(format!("bad window bound {s:?}")))
            };
            Ok((parse(lo)?, parse(hi)?))
        })
        .collect()
}

/// Command-line values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub alpha: Option<String>,
    pub window: Option<String>,
    pub guard: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.n.is_some() {
            self.n = o.n;
        }
        if o.k.is_some() {
            self.k = o.k;
        }
        if o.alpha.is_some() {
            self.alpha.clone_from(&o.alpha);
        }
        if let Some(w) = &o.window {
            self.window = Some(WindowSpec::Text(w.clone()));
        }
        if o.guard.is_some() {
            self.guard = o.guard;
        }
    }

    pub fn guard(&self) -> u64 {
        self.guard.unwrap_or(DEFAULT_GUARD)
    }

    /// Dimension from `n`, the family, or explicit sequences.
    pub fn dimension(&self) -> Result<usize, CliError> {
        if let Some(n) = self.n {
            return Ok(n);
        }
        if let Some(f) = &self.family {
            if let Ok(fam) = f.to_core(None) {
                return Ok(fam.dimension());
            }
        }
        if let Some(s) = &self.sequences {
            return Ok(s.len());
        }
        if let Some(g) = &self.gaps {
            return Ok(g.len());
        }
        Err(CliError::Config("cannot tell the dimension: give n, a family, or sequences".into()))
    }

    /// The family, defaulting to the full dyadic product.
    pub fn family(&self) -> Result<(FamilySpec, SpectrumFamily), CliError> {
        let spec = self.family.clone().unwrap_or(FamilySpec::FullProduct { sets: None });
        let n = match (&self.n, &spec) {
            (Some(n), _) => Some(*n),
            (None, FamilySpec::FullProduct { sets: None }) => Some(self.dimension()?),
            _ => None,
        };
        let family = spec.to_core(n)?;
        Ok((spec, family))
    }

    pub fn s_sets(&self, family: &SpectrumFamily) -> Result<Vec<IntSet>, CliError> {
        match &self.s_sets {
            Some(s) if s.len() != family.dimension() => {
                Err(CliError::Config(format!("{} s_sets for dimension {}", s.len(), family.dimension())))
            }
            Some(s) => Ok(sets(s)),
            None => Ok(family.default_s_sets()),
        }
    }

    pub fn alpha(&self) -> Result<Option<Dyadic>, CliError> {
        self.alpha
            .as_deref()
            .map(|a| a.parse::<Dyadic>().map_err(|e| CliError::Config(format!("alpha {a:?}: {e}"))))
            .transpose()
    }

    /// The configured window, if any.
    pub fn explicit_window(&self, n: usize) -> Result<Option<Window>, CliError> {
        let ranges = match &self.window {
            None => return Ok(None),
            Some(WindowSpec::Text(t)) => parse_window(t)?,
            Some(WindowSpec::Pairs(p)) => p.iter().map(|r| (r[0], r[1])).collect(),
        };
        let ranges = if ranges.len() == 1 && n > 1 { vec![ranges[0]; n] } else { ranges };
        if ranges.len() != n {
            return Err(CliError::Config(format!("window has {} ranges for dimension {n}", ranges.len())));
        }
        Ok(Some(Window::new(ranges)?))
    }

    /// The configured window, else one covering `sequences`, else
    /// `[0, max(4k, m)]` on every axis, where `m` is 64 capped so the cube
    /// stays within the spectrum enumeration limit.
    pub fn window(&self, n: usize, k: Option<usize>, sequences: Option<&[ScaleSequence]>) -> Result<Window, CliError> {
        if let Some(w) = self.explicit_window(n)? {
            return Ok(w);
        }
        if let Some(seqs) = sequences {
            return Ok(Window::new(seqs.iter().map(|s| (s.first(), s.last())).collect())?);
        }
        let fit = (SPECTRUM_LIMIT as f64).powf(1.0 / n.max(1) as f64).floor() as i64 - 1;
        let hi = (4 * k.unwrap_or(0) as i64).max(fit.min(64));
        Ok(Window::cube(n, 0, hi)?)
    }

    /// Sequences fixed by the configuration for this `k`: explicit
    /// `sequences` (when their length matches) or cycled `gaps`.
    pub fn fixed_sequences(&self, n: usize, k: usize) -> Result<Option<Vec<ScaleSequence>>, CliError> {
        if let Some(seqs) = &self.sequences {
            if seqs.len() != n {
                return Err(CliError::Config(format!("{} sequences for dimension {n}", seqs.len())));
            }
            if seqs.iter().all(|s| s.len() == k + 1) {
                return Ok(Some(seqs.iter().map(|s| ScaleSequence::new(s.clone())).collect::<Result<_, _>>()?));
            }
            if self.gaps.is_none() {
                return Err(CliError::Config(format!("sequences do not have k + 1 = {} entries", k + 1)));
            }
        }
        if let Some(gaps) = &self.gaps {
            return Ok(Some(cycled(gaps, self.base.as_deref(), n, k)?));
        }
        Ok(None)
    }

    pub fn omega(&self, n: usize, k: usize) -> Result<OmegaSet, CliError> {
        omega_from(self.omega.as_ref(), n, k)
    }

    pub fn shape_list(&self) -> Result<ShapeList2D, CliError> {
        let shapes = self.shapes.as_ref().ok_or_else(|| CliError::Config("is-check needs shapes".into()))?;
        let planar = self.planar.as_ref().ok_or_else(|| CliError::Config("is-check needs a planar basis".into()))?;
        Ok(ShapeList2D { shapes: shapes.iter().map(|s| (s[0], s[1])).collect(), basis: planar.to_core() })
    }
}

pub fn omega_from(spec: Option<&OmegaSpec>, n: usize, k: usize) -> Result<OmegaSet, CliError> {
    Ok(match spec {
        None | Some(OmegaSpec::Full) => {
            if k < n {
                OmegaSet::empty(n, k)
            } else {
                enumerate_compositions(n, k)?
            }
        }
        Some(OmegaSpec::Monotone) => {
            if n < 2 {
                return Err(CliError::Config("monotone omega needs n >= 2".into()));
            }
            monotone_tuples(n - 1, k)?
        }
        Some(OmegaSpec::Explicit { tuples }) => OmegaSet::new(n, k, tuples.clone())?,
    })
}

pub fn cycled(gaps: &[Vec<i64>], base: Option<&[i64]>, n: usize, k: usize) -> Result<Vec<ScaleSequence>, CliError> {
    let patterns: Vec<&Vec<i64>> = match gaps.len() {
        1 => vec![&gaps[0]; n],
        len if len == n => gaps.iter().collect(),
        len => return Err(CliError::Config(format!("{len} gap patterns for dimension {n}"))),
    };
    patterns
        .iter()
        .enumerate()
        .map(|(j, p)| {
            if p.is_empty() {
                return Err(CliError::Config("empty gap pattern".into()));
            }
            let g: Vec<i64> = (0..k).map(|m| p[m % p.len()]).collect();
            let b = base.and_then(|b| b.get(j).copied()).unwrap_or(0);
            Ok(ScaleSequence::from_gaps(b, &g)?)
        })
        .collect()
}
