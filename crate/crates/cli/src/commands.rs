//! The CLI verbs. Each returns its rendered report and a pass flag.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rarebasis_core::extremal::{
    build_extremal, k_for_alpha, theorem1_run, theorem2_run, union_level_set_measure, verify_lemma3,
    verify_realized, Stage,
};
use rarebasis_core::ladder::ScaleSequence;
use rarebasis_core::omega::{completeness, enumerate_compositions, is_property_check, planar_sequences};
use rarebasis_core::oracle::{saturation_cross_check, GridMask};
use rarebasis_core::spectra::{extract_sequences, is_dense, spectrum_window, theta_conditions};
use rarebasis_core::{Dyadic, ExtremalConfig, IntSet, OmegaSet, SpectrumFamily, VerificationReport, Window};
use serde::Serialize;

use crate::config::{omega_from, ExperimentConfig, FamilySpec};
use crate::parallel::parallel_containment;
use crate::report::{csv_row, log_log_slope, to_json, to_text, DyadicJson, Format, RationalJson};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Density,
    Extract,
    Verify,
    Sweep,
    OracleCheck,
    IsCheck,
    Complete,
}

#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
    /// Marked superlevel mask from an oracle run, for export.
    pub mask: Option<GridMask>,
}

pub fn run(
    command: Command,
    cfg: &ExperimentConfig,
    format: Format,
    seed: Option<u64>,
) -> Result<Outcome, CliError> {
    match command {
        Command::Spectrum => cmd_spectrum(cfg, format),
        Command::Density => cmd_density(cfg, format),
        Command::Extract => cmd_extract(cfg, format),
        Command::Verify => cmd_verify(cfg, format),
        Command::Sweep => cmd_sweep(cfg, format),
        Command::OracleCheck => match seed {
            Some(seed) => cmd_oracle_random(cfg, format, seed),
            None => cmd_oracle_check(cfg, format),
        },
        Command::IsCheck => cmd_is_check(cfg, format),
        Command::Complete => cmd_complete(cfg, format),
    }
}

fn render<T: Serialize>(value: &T, format: Format) -> String {
    match format {
        Format::Json => to_json(value),
        Format::Text => to_text(value),
        Format::Csv => {
            let mut out = csv_row(["key", "value"]);
            for line in to_text(value).lines() {
                let (k, v) = line.split_once("  ").unwrap_or((line, ""));
                out.push_str(&csv_row([k.trim(), v.trim()]));
            }
            out
        }
    }
}

fn outcome<T: Serialize>(value: &T, format: Format, passed: bool) -> Outcome {
    Outcome { output: render(value, format), passed, mask: None }
}

fn seqs_json(seqs: &[ScaleSequence]) -> Vec<Vec<i64>> {
    seqs.iter().map(|s| s.as_slice().to_vec()).collect()
}

fn window_json(w: &Window) -> Vec<[i64; 2]> {
    w.ranges().iter().map(|&(a, b)| [a, b]).collect()
}

fn dj(d: &Dyadic) -> DyadicJson {
    DyadicJson::from(d)
}

#[derive(Serialize)]
struct SpectrumOut {
    command: &'static str,
    n: usize,
    window: Vec<[i64; 2]>,
    count: usize,
    tuples: Vec<Vec<i64>>,
}

pub fn cmd_spectrum(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let (_, family) = cfg.family()?;
    let n = family.dimension();
    let window = cfg.window(n, cfg.k, None)?;
    let w = spectrum_window(&family, &window)?;
    let tuples = w.to_vecs();
    let output = match format {
        Format::Json => to_json(&SpectrumOut {
            command: "spectrum",
            n,
            window: window_json(&window),
            count: tuples.len(),
            tuples,
        }),
        Format::Csv | Format::Text => {
            let sep = if format == Format::Csv { "," } else { " " };
            let mut out = (1..=n).map(|j| format!("w{j}")).collect::<Vec<_>>().join(sep);
            out.push('\n');
            for t in &tuples {
                out.push_str(&t.iter().map(i64::to_string).collect::<Vec<_>>().join(sep));
                out.push('\n');
            }
            out
        }
    };
    Ok(Outcome { output, passed: true, mask: None })
}

#[derive(Serialize)]
struct AxisDensityOut {
    axis: usize,
    sections: usize,
    net_constant: Option<u64>,
    worst_section: Option<Vec<i64>>,
    boundary_limited: bool,
    within_budget: bool,
}

#[derive(Serialize)]
struct ThetaOut {
    origin_values: BTreeMap<u64, i64>,
    origin_reaches_edge: bool,
    max_deviation: Option<u64>,
    window_consistent: bool,
}

#[derive(Serialize)]
struct DensityOut {
    command: &'static str,
    family: FamilySpec,
    window: Vec<[i64; 2]>,
    spectrum_size: usize,
    budget: Option<u64>,
    axes: Vec<AxisDensityOut>,
    theta: Option<ThetaOut>,
    dense: bool,
}

pub fn cmd_density(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let (spec, family) = cfg.family()?;
    let n = family.dimension();
    let window = cfg.window(n, cfg.k, None)?;
    let w = spectrum_window(&family, &window)?;
    let s_sets = cfg.s_sets(&family)?;
    let report = is_dense(&w, &s_sets, &window, cfg.net_budget.unwrap_or(u64::MAX))?;
    let theta = match &family {
        SpectrumFamily::ThetaTable { .. } => {
            let t = theta_conditions(&family, &window)?;
            Some(ThetaOut {
                origin_values: t.origin_values,
                origin_reaches_edge: t.origin_reaches_edge,
                max_deviation: t.max_deviation,
                window_consistent: t.window_consistent,
            })
        }
        _ => None,
    };
    let out = DensityOut {
        command: "density",
        family: spec,
        window: window_json(&window),
        spectrum_size: w.len(),
        budget: cfg.net_budget,
        axes: report
            .axes
            .into_iter()
            .map(|a| AxisDensityOut {
                axis: a.axis,
                sections: a.sections,
                net_constant: a.net_constant,
                worst_section: a.worst_section,
                boundary_limited: a.boundary_limited,
                within_budget: a.within_budget,
            })
            .collect(),
        theta,
        dense: report.dense,
    };
    Ok(outcome(&out, format, report.dense))
}

#[derive(Serialize)]
struct ExtractOut {
    command: &'static str,
    family: FamilySpec,
    window: Vec<[i64; 2]>,
    k: usize,
    sequences: Vec<Vec<i64>>,
    net_constants: Vec<u64>,
    spaced_points: Vec<Vec<i64>>,
    realized_boxes: usize,
}

fn need_k(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    cfg.k.ok_or_else(|| CliError::Config("k is required (config or --k)".into()))
}

fn nonempty_omega(cfg: &ExperimentConfig, n: usize, k: usize) -> Result<OmegaSet, CliError> {
    let omega = cfg.omega(n, k)?;
    if omega.is_empty() {
        return Err(CliError::Config(format!("omega is empty for n = {n}, k = {k}")));
    }
    Ok(omega)
}

pub fn cmd_extract(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let (spec, family) = cfg.family()?;
    let n = family.dimension();
    let k = need_k(cfg)?;
    let window = cfg.window(n, Some(k), None)?;
    let ex = extract_sequences(&family, &cfg.s_sets(&family)?, k, &window)?;
    let out = ExtractOut {
        command: "extract",
        family: spec,
        window: window_json(&window),
        k,
        sequences: seqs_json(&ex.sequences),
        net_constants: ex.net_constants,
        spaced_points: ex.spaced_points,
        realized_boxes: k.pow(n as u32),
    };
    Ok(outcome(&out, format, true))
}

#[derive(Serialize)]
struct OracleOut {
    status: &'static str,
    note: String,
    grid_cells: Option<String>,
    contained: Option<bool>,
    union_cells: Option<u64>,
    marked_cells: Option<u64>,
    union_grid_measure: Option<DyadicJson>,
    superlevel_measure: Option<DyadicJson>,
    agrees_with_analytic: Option<bool>,
    saturation_exact: Option<bool>,
    missed_count: Option<u64>,
    missed: Vec<Vec<u64>>,
}

impl OracleOut {
    fn skipped(note: String, cells: Option<u128>) -> Self {
        OracleOut {
            status: "skipped",
            note,
            grid_cells: cells.map(|c| c.to_string()),
            contained: None,
            union_cells: None,
            marked_cells: None,
            union_grid_measure: None,
            superlevel_measure: None,
            agrees_with_analytic: None,
            saturation_exact: None,
            missed_count: None,
            missed: Vec::new(),
        }
    }

    fn passed(&self) -> bool {
        self.status == "skipped"
            || (self.contained == Some(true)
                && self.agrees_with_analytic == Some(true)
                && self.saturation_exact != Some(false))
    }
}

const TRUNCATION_NOTE: &str =
    "aligned translates only; evaluation domain is the product of [0, 2^{s_{j,k}}), cells outside are ignored";

/// Oracle cross-check of the union over `omega` with the given shapes.
fn oracle_check(
    config: &ExtremalConfig,
    omega: &OmegaSet,
    shapes: &BTreeMap<Vec<usize>, Vec<i64>>,
    analytic_union: &Dyadic,
    guard: u64,
) -> Result<(OracleOut, Option<GridMask>), CliError> {
    let cells = config.cell_count();
    let within = cells.is_some_and(|c| c <= guard as u128) && config.ladders().is_some();
    if !within {
        let note = match cells {
            Some(c) => format!("grid of {c} cells exceeds the guard of {guard}; analytic engine only"),
            None => format!("grid exceeds 2^128 cells; analytic engine only (guard {guard})"),
        };
        return Ok((OracleOut::skipped(note, cells), None));
    }
    let (report, marked, union) = parallel_containment(config, omega, shapes, guard)?;
    let union_grid = union.measure();
    let saturation = saturation_cross_check(config, omega)?;
    let out = OracleOut {
        status: "checked",
        note: TRUNCATION_NOTE.to_string(),
        grid_cells: cells.map(|c| c.to_string()),
        contained: Some(report.contained),
        union_cells: Some(report.union_cells),
        marked_cells: Some(report.marked_cells),
        agrees_with_analytic: Some(union_grid == *analytic_union && report.oracle_union_measure == *analytic_union),
        union_grid_measure: Some(dj(&union_grid)),
        superlevel_measure: Some(dj(&report.superlevel_measure)),
        saturation_exact: Some(saturation),
        missed_count: Some(report.missed_count),
        missed: report.missed,
    };
    Ok((out, Some(marked)))
}

#[derive(Serialize)]
struct Theorem1Out {
    alpha: DyadicJson,
    k: usize,
    /// `union · α / ((1 + log₂(1/α))^{n−1} |E|)`.
    log_constant: RationalOrApprox,
    /// `achieved_ratio / k^{n−1}`.
    per_k_constant: RationalJson,
}

#[derive(Serialize)]
struct RationalOrApprox {
    exact: Option<String>,
    approx: f64,
}

#[derive(Serialize)]
struct VerifyOut {
    command: &'static str,
    family: FamilySpec,
    n: usize,
    k: usize,
    window: Vec<[i64; 2]>,
    sequence_source: &'static str,
    sequences: Vec<Vec<i64>>,
    net_constants: Option<Vec<u64>>,
    omega_card: usize,
    realized_omega_card: usize,
    e_measure: DyadicJson,
    union_measure: DyadicJson,
    bound: DyadicJson,
    achieved_ratio: DyadicJson,
    lemma3_pass: bool,
    theorem1: Option<Theorem1Out>,
    oracle: OracleOut,
    warnings: Vec<String>,
    pass: bool,
}

pub fn cmd_verify(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    if cfg.stages.is_some() {
        return cmd_theorem2(cfg, format);
    }
    let (spec, family) = cfg.family()?;
    let n = family.dimension();
    let s_sets = cfg.s_sets(&family)?;

    let (k, sequences, source, net_constants, window, report, theorem1) = if let Some(alpha) = cfg.alpha()? {
        let k_alpha = k_for_alpha(&alpha, n)?;
        let window = cfg.window(n, Some(k_alpha), None)?;
        let t1 = theorem1_run(&alpha, &family, &s_sets, &window)?;
        let out = Theorem1Out {
            alpha: dj(&alpha),
            k: t1.k,
            log_constant: RationalOrApprox {
                exact: t1.log_constant.as_ref().map(ToString::to_string),
                approx: t1.log_constant_f64,
            },
            per_k_constant: RationalJson::new(&t1.per_k_constant, t1.per_k_constant_f64),
        };
        (
            t1.k,
            t1.extraction.sequences,
            "extracted",
            Some(t1.extraction.net_constants),
            window,
            t1.report,
            Some(out),
        )
    } else {
        let k = need_k(cfg)?;
        let omega = nonempty_omega(cfg, n, k)?;
        let (sequences, source, nets, window) = match cfg.fixed_sequences(n, k)? {
            Some(seqs) => {
                let window = cfg.window(n, Some(k), Some(&seqs))?;
                (seqs, "config", None, window)
            }
            None => {
                let window = cfg.window(n, Some(k), None)?;
                let ex = extract_sequences(&family, &s_sets, k, &window)?;
                (ex.sequences, "extracted", Some(ex.net_constants), window)
            }
        };
        let config = build_extremal(&sequences)?;
        let report = verify_lemma3(&config, &omega, &family, &window)?;
        (k, sequences, source, nets, window, report, None)
    };

    let config = build_extremal(&sequences)?;
    let realized = OmegaSet::new(n, k, report.witnesses.keys().cloned().collect())?;
    let (oracle, mask) = oracle_check(&config, &realized, &report.witnesses, &report.union_measure, cfg.guard())?;
    let pass = report.pass && oracle.passed();
    let out = VerifyOut {
        command: "verify",
        family: spec,
        n,
        k,
        window: window_json(&window),
        sequence_source: source,
        sequences: seqs_json(&sequences),
        net_constants,
        omega_card: report.omega_card,
        realized_omega_card: report.realized_omega_card,
        e_measure: dj(&report.e_measure),
        union_measure: dj(&report.union_measure),
        bound: dj(&report.bound),
        achieved_ratio: dj(&report.achieved_ratio),
        lemma3_pass: report.pass,
        theorem1,
        oracle,
        warnings: report.warnings,
        pass,
    };
    Ok(Outcome { output: render(&out, format), passed: pass, mask })
}

#[derive(Serialize)]
struct StageOut {
    k: usize,
    omega_card: usize,
    density: RationalJson,
    sequences: Option<Vec<Vec<i64>>>,
    union_measure: Option<DyadicJson>,
    bound: Option<DyadicJson>,
    achieved_ratio: Option<DyadicJson>,
    c_b: Option<RationalJson>,
    pass: bool,
    error: Option<String>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct Theorem2Out {
    command: &'static str,
    family: FamilySpec,
    n: usize,
    window: Vec<[i64; 2]>,
    stages: Vec<StageOut>,
    vanishing_infimum: bool,
    pass: bool,
}

fn cmd_theorem2(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let (spec, family) = cfg.family()?;
    let n = family.dimension();
    let s_sets = cfg.s_sets(&family)?;
    let specs = cfg.stages.as_deref().unwrap_or_default();
    let max_k = specs.iter().map(|s| s.k).max().unwrap_or(0);
    let window = cfg.window(n, Some(max_k), None)?;
    let mut stages = Vec::with_capacity(specs.len());
    for s in specs {
        let sequences = match &s.sequences {
            Some(seqs) => Some(seqs.iter().map(|q| ScaleSequence::new(q.clone())).collect::<Result<Vec<_>, _>>()?),
            None => cfg.fixed_sequences(n, s.k).ok().flatten(),
        };
        stages.push(Stage { k: s.k, omega: omega_from(s.omega.as_ref().or(cfg.omega.as_ref()), n, s.k)?, sequences });
    }
    let r = theorem2_run(&family, &stages, &s_sets, &window);
    let stage_out: Vec<StageOut> = r
        .stages
        .iter()
        .map(|o| StageOut {
            k: o.k,
            omega_card: o.omega_card,
            density: RationalJson::new(&o.density, o.density_f64),
            sequences: o.sequences.as_deref().map(seqs_json),
            union_measure: o.report.as_ref().map(|r| dj(&r.union_measure)),
            bound: o.report.as_ref().map(|r| dj(&r.bound)),
            achieved_ratio: o.report.as_ref().map(|r| dj(&r.achieved_ratio)),
            c_b: o.c_b.as_ref().map(|c| RationalJson::new(c, crate::ratio_f64(c))),
            pass: o.report.as_ref().is_some_and(|r| r.pass),
            error: o.error.as_ref().map(ToString::to_string),
            warnings: o.report.as_ref().map(|r| r.warnings.clone()).unwrap_or_default(),
        })
        .collect();
    let pass = !stage_out.is_empty() && stage_out.iter().all(|s| s.pass);
    let out = Theorem2Out {
        command: "verify",
        family: spec,
        n,
        window: window_json(&window),
        stages: stage_out,
        vanishing_infimum: r.vanishing_infimum,
        pass,
    };
    Ok(outcome(&out, format, pass))
}

#[derive(Serialize)]
struct SweepRow {
    k: usize,
    card_omega: Option<usize>,
    union_measure: Option<DyadicJson>,
    achieved_ratio: Option<DyadicJson>,
    ratio_f64: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct SweepOut {
    command: &'static str,
    n: usize,
    k_range: [usize; 2],
    rows: Vec<SweepRow>,
    log_log_slope: Option<f64>,
}

fn sweep_row(cfg: &ExperimentConfig, family: Option<&SpectrumFamily>, n: usize, k: usize) -> Result<VerificationReport, CliError> {
    let omega = cfg.omega(n, k)?;
    if let Some(seqs) = cfg.fixed_sequences(n, k)? {
        return Ok(verify_realized(&build_extremal(&seqs)?, &omega)?);
    }
    match family {
        Some(fam) => {
            let window = cfg.window(n, Some(k), None)?;
            let ex = extract_sequences(fam, &cfg.s_sets(fam)?, k, &window)?;
            Ok(verify_lemma3(&build_extremal(&ex.sequences)?, &omega, fam, &window)?)
        }
        None => Ok(verify_realized(&build_extremal(&vec![ScaleSequence::unit(0, k); n])?, &omega)?),
    }
}

pub fn cmd_sweep(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let family = match &cfg.family {
        Some(_) => Some(cfg.family()?.1),
        None => None,
    };
    let n = match &family {
        Some(f) => f.dimension(),
        None => cfg.dimension()?,
    };
    let [lo, hi] = cfg.k_range.unwrap_or([n.max(1), 12]);
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for k in lo..=hi {
        match sweep_row(cfg, family.as_ref(), n, k) {
            Ok(r) => {
                let ratio = r.achieved_ratio.to_f64();
                points.push((k as f64, ratio));
                rows.push(SweepRow {
                    k,
                    card_omega: Some(r.realized_omega_card),
                    union_measure: Some(dj(&r.union_measure)),
                    achieved_ratio: Some(dj(&r.achieved_ratio)),
                    ratio_f64: Some(ratio),
                    error: None,
                });
            }
            Err(e) => rows.push(SweepRow {
                k,
                card_omega: None,
                union_measure: None,
                achieved_ratio: None,
                ratio_f64: None,
                error: Some(e.to_string()),
            }),
        }
    }
    let slope = log_log_slope(&points);
    let passed = rows.iter().all(|r| r.error.is_none());
    let out = SweepOut { command: "sweep", n, k_range: [lo, hi], rows, log_log_slope: slope };
    let output = match format {
        Format::Json => to_json(&out),
        Format::Csv | Format::Text => sweep_table(&out, format),
    };
    Ok(Outcome { output, passed, mask: None })
}

fn sweep_table(out: &SweepOut, format: Format) -> String {
    let header = ["k", "card_omega", "union_measure", "achieved_ratio", "ratio_decimal", "log_log_slope", "status"];
    let exact = |d: &Option<DyadicJson>| {
        d.as_ref().map(|d| if d.exponent == 0 { d.mantissa.clone() } else { format!("{}*2^{}", d.mantissa, d.exponent) })
    };
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in &out.rows {
        table.push(vec![
            r.k.to_string(),
            r.card_omega.map(|c| c.to_string()).unwrap_or_default(),
            exact(&r.union_measure).unwrap_or_default(),
            exact(&r.achieved_ratio).unwrap_or_default(),
            r.achieved_ratio.as_ref().map(|d| d.decimal.clone()).unwrap_or_default(),
            String::new(),
            r.error.clone().unwrap_or_else(|| "ok".to_string()),
        ]);
    }
    let slope = out.log_log_slope.map(|s| format!("{s:.6}")).unwrap_or_else(|| "n/a".to_string());
    table.push(vec!["slope".into(), String::new(), String::new(), String::new(), String::new(), slope, String::new()]);
    if format == Format::Csv {
        return table.iter().map(csv_row).collect();
    }
    let widths: Vec<usize> =
        (0..header.len()).map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for row in &table {
        let line: Vec<String> = row.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct OracleCheckOut {
    command: &'static str,
    n: usize,
    k: usize,
    sequences: Vec<Vec<i64>>,
    omega_card: usize,
    shapes: &'static str,
    analytic_union: DyadicJson,
    oracle: OracleOut,
    pass: bool,
}

fn natural_shapes(config: &ExtremalConfig, omega: &OmegaSet) -> BTreeMap<Vec<usize>, Vec<i64>> {
    omega
        .tuples()
        .iter()
        .map(|m| (m.clone(), config.scales().iter().zip(m).map(|(s, &mj)| s.get(mj)).collect()))
        .collect()
}

pub fn cmd_oracle_check(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let n = cfg.dimension()?;
    let k = need_k(cfg)?;
    let sequences = cfg.fixed_sequences(n, k)?.unwrap_or_else(|| vec![ScaleSequence::unit(0, k); n]);
    let config = build_extremal(&sequences)?;
    let omega = cfg.omega(n, k)?;
    let (omega, shapes, kind) = if cfg.family.is_some() {
        let (_, family) = cfg.family()?;
        let window = cfg.window(n, Some(k), Some(&sequences))?;
        let c = completeness(&family, &sequences, &omega, &window)?;
        (c.realized, c.witnesses, "spectrum witnesses")
    } else {
        let shapes = natural_shapes(&config, &omega);
        (omega, shapes, "side exponents s_{j,m_j}")
    };
    let analytic = union_level_set_measure(&config, &omega)?;
    let (oracle, mask) = oracle_check(&config, &omega, &shapes, &analytic, cfg.guard())?;
    let pass = oracle.status == "checked" && oracle.passed();
    let out = OracleCheckOut {
        command: "oracle-check",
        n,
        k,
        sequences: seqs_json(&sequences),
        omega_card: omega.len(),
        shapes: kind,
        analytic_union: dj(&analytic),
        oracle,
        pass,
    };
    Ok(Outcome { output: render(&out, format), passed: pass, mask })
}

#[derive(Serialize)]
struct TrialOut {
    trial: usize,
    sequences: Vec<Vec<i64>>,
    omega_card: usize,
    analytic_union: DyadicJson,
    grid_union: DyadicJson,
    contained: bool,
    equal: bool,
}

#[derive(Serialize)]
struct RandomOracleOut {
    command: &'static str,
    seed: u64,
    trials: Vec<TrialOut>,
    all_equal: bool,
    all_contained: bool,
    pass: bool,
}

/// Random configuration: `n ∈ {2, 3}`, `n <= k <= 6`, gaps in `{1, 2}`, at
/// most `2^20` cells, and either all of `Ω_{n,k}` or a random part of it.
pub fn random_config(rng: &mut ChaCha8Rng) -> (Vec<ScaleSequence>, OmegaSet) {
    loop {
        let n = rng.gen_range(2..=3usize);
        let k = rng.gen_range(n..=6usize);
        let seqs: Vec<ScaleSequence> = (0..n)
            .map(|_| {
                let gaps: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=2)).collect();
                ScaleSequence::from_gaps(0, &gaps).expect("positive gaps")
            })
            .collect();
        let bits: i64 = seqs.iter().map(|s| s.last() - s.first()).sum();
        if bits > 20 {
            continue;
        }
        let full = enumerate_compositions(n, k).expect("k >= n");
        let omega = if rng.gen_bool(0.5) {
            full
        } else {
            let picked = full.filter(|_| rng.gen_bool(0.5));
            if picked.is_empty() {
                OmegaSet::new(n, k, vec![full.tuples()[0].clone()]).expect("member of the full set")
            } else {
                picked
            }
        };
        return (seqs, omega);
    }
}

pub fn cmd_oracle_random(cfg: &ExperimentConfig, format: Format, seed: u64) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = cfg.trials.unwrap_or(50);
    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let (seqs, omega) = random_config(&mut rng);
        let config = build_extremal(&seqs)?;
        let analytic = union_level_set_measure(&config, &omega)?;
        let (report, _marked, union) =
            parallel_containment(&config, &omega, &natural_shapes(&config, &omega), cfg.guard())?;
        let grid = union.measure();
        out.push(TrialOut {
            trial,
            sequences: seqs_json(&seqs),
            omega_card: omega.len(),
            equal: grid == analytic,
            contained: report.contained,
            analytic_union: dj(&analytic),
            grid_union: dj(&grid),
        });
    }
    let all_equal = out.iter().all(|t| t.equal);
    let all_contained = out.iter().all(|t| t.contained);
    let pass = all_equal && all_contained;
    let report = RandomOracleOut { command: "oracle-check", seed, trials: out, all_equal, all_contained, pass };
    Ok(outcome(&report, format, pass))
}

#[derive(Serialize)]
struct ProductOut {
    k: usize,
    p_sequence: Vec<i64>,
    q_sequence: Vec<i64>,
    t_sequence: Vec<i64>,
    omega_card: usize,
    realized: usize,
    missing: Vec<Vec<usize>>,
    complete: bool,
}

#[derive(Serialize)]
struct IsCheckOut {
    command: &'static str,
    shapes: Vec<[i64; 2]>,
    comparable: Vec<[usize; 2]>,
    not_closed: Vec<[usize; 2]>,
    duplicates: Vec<[usize; 2]>,
    is_property: bool,
    product: Option<ProductOut>,
    pass: bool,
}

pub fn cmd_is_check(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let list = cfg.shape_list()?;
    let r = is_property_check(&list);
    let k = list.shapes.len().saturating_sub(1);
    let product = if r.passed && k >= 3 {
        let (p, q) = planar_sequences(&list)?;
        let third = cfg.third.as_ref().map(|t| t.to_core()).unwrap_or(IntSet::All);
        let (lo, hi) = match cfg.explicit_window(3)? {
            Some(w) => w.range(2),
            None => (0, (4 * k as i64).max(64)),
        };
        let t_vals: Vec<i64> = third.elements_in(lo, hi).into_iter().take(k + 1).collect();
        if t_vals.len() < k + 1 {
            return Err(CliError::Config(format!("third axis has fewer than {} lengths in {lo}:{hi}", k + 1)));
        }
        let t = ScaleSequence::new(t_vals)?;
        let seqs = vec![p, q, t];
        let family = SpectrumFamily::PlanarProduct { planar: list.basis.clone(), third };
        let window = Window::new(seqs.iter().map(|s| (s.first(), s.last())).collect())?;
        let omega = enumerate_compositions(3, k)?;
        let c = completeness(&family, &seqs, &omega, &window)?;
        Some(ProductOut {
            k,
            p_sequence: seqs[0].as_slice().to_vec(),
            q_sequence: seqs[1].as_slice().to_vec(),
            t_sequence: seqs[2].as_slice().to_vec(),
            omega_card: omega.len(),
            realized: c.realized.len(),
            complete: c.is_complete(),
            missing: c.missing,
        })
    } else {
        None
    };
    let pass = r.passed && product.as_ref().is_none_or(|p| p.complete);
    let pair = |v: &[(usize, usize)]| v.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>();
    let out = IsCheckOut {
        command: "is-check",
        shapes: list.shapes.iter().map(|&(a, b)| [a, b]).collect(),
        comparable: pair(&r.comparable),
        not_closed: pair(&r.not_closed),
        duplicates: pair(&r.duplicates),
        is_property: r.passed,
        product,
        pass,
    };
    Ok(outcome(&out, format, pass))
}

#[derive(Serialize)]
struct WitnessOut {
    tuple: Vec<usize>,
    witness: Vec<i64>,
}

#[derive(Serialize)]
struct CompleteOut {
    command: &'static str,
    family: FamilySpec,
    k: usize,
    window: Vec<[i64; 2]>,
    sequences: Vec<Vec<i64>>,
    omega_card: usize,
    realized: usize,
    missing: Vec<Vec<usize>>,
    witnesses: Vec<WitnessOut>,
    complete: bool,
}

pub fn cmd_complete(cfg: &ExperimentConfig, format: Format) -> Result<Outcome, CliError> {
    let (spec, family) = cfg.family()?;
    let n = family.dimension();
    let k = need_k(cfg)?;
    let omega = nonempty_omega(cfg, n, k)?;
    let (sequences, window) = match cfg.fixed_sequences(n, k)? {
        Some(seqs) => {
            let w = cfg.window(n, Some(k), Some(&seqs))?;
            (seqs, w)
        }
        None => {
            let w = cfg.window(n, Some(k), None)?;
            (extract_sequences(&family, &cfg.s_sets(&family)?, k, &w)?.sequences, w)
        }
    };
    let c = completeness(&family, &sequences, &omega, &window)?;
    let complete = c.is_complete();
    let out = CompleteOut {
        command: "complete",
        family: spec,
        k,
        window: window_json(&window),
        sequences: seqs_json(&sequences),
        omega_card: omega.len(),
        realized: c.realized.len(),
        missing: c.missing,
        witnesses: c.witnesses.into_iter().map(|(tuple, witness)| WitnessOut { tuple, witness }).collect(),
        complete,
    };
    Ok(outcome(&out, format, complete))
}
