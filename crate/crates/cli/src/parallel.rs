//! Parallel oracle driver: one marking pass per shape, or-reduced.

use std::collections::BTreeMap;

use rarebasis_core::oracle::{compare_masks, union_mask, ContainmentReport, GridMask, ShapeMarker};
use rarebasis_core::{Dyadic, Error, ExtremalConfig, OmegaSet};
use rayon::prelude::*;

fn frames(config: &ExtremalConfig) -> Result<Vec<rarebasis_core::AxisFrame>, Error> {
    config.scales().iter().map(|s| s.frame()).collect()
}

/// Same result as the sequential `restricted_superlevel`; the or-reduction
/// makes it independent of scheduling.
pub fn parallel_superlevel(
    config: &ExtremalConfig,
    shapes: &[Vec<i64>],
    threshold: &Dyadic,
    guard: u64,
) -> Result<(Dyadic, GridMask), Error> {
    let empty = GridMask::new(frames(config)?, guard)?;
    let mask = shapes
        .par_iter()
        .try_fold(
            || empty.clone(),
            |mut acc, shape| {
                ShapeMarker::new(config, shape, threshold)?.mark_into(&mut acc);
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || empty.clone(),
            |mut a, b| {
                a.or_assign(&b)?;
                Ok(a)
            },
        )?;
    Ok((mask.measure(), mask))
}

/// Parallel counterpart of `check_containment`; also returns the marked mask.
pub fn parallel_containment(
    config: &ExtremalConfig,
    omega: &OmegaSet,
    shapes_for_omega: &BTreeMap<Vec<usize>, Vec<i64>>,
    guard: u64,
) -> Result<(ContainmentReport, GridMask, GridMask), Error> {
    let shapes: Vec<Vec<i64>> = omega
        .tuples()
        .iter()
        .map(|m| shapes_for_omega.get(m).cloned().ok_or_else(|| Error::MissingShape(m.clone())))
        .collect::<Result<_, _>>()?;
    let threshold = Dyadic::pow2(-(config.k() as i64));
    let (measure, marked) = parallel_superlevel(config, &shapes, &threshold, guard)?;
    let union = union_mask(config, omega, guard)?;
    let report = compare_masks(&union, &marked, measure)?;
    Ok((report, marked, union))
}
