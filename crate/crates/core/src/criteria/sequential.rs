//! Gamble-by-gamble algorithms: original and sorted variants.

use super::{check_dims, open, setup, CriterionResult, Outcome, SolveConfig};
use crate::criteria::Algorithm;
use crate::error::{Error, Result};
use crate::linprog::BoundsPair;
use crate::natex::{CredalStart, RunEnd, Sense};
use crate::prevision::{GambleSet, LowerPrevision};

/// Visits `order`, keeping the first strict improvement. Lower sense
/// compares `ℓ_i`, upper sense compares `u_i`. With a warm start each solve
/// may stop once `u_i` drops below the incumbent.
fn single_best(
    prevision: &LowerPrevision,
    k: &GambleSet,
    sense: Sense,
    order: &[usize],
    start: Option<&CredalStart>,
    cfg: &SolveConfig,
    res: &mut CriterionResult,
) -> Result<(usize, f64)> {
    let mut best = f64::NEG_INFINITY;
    let mut star = None;
    for &i in order {
        let mut s = open(prevision, k, i, sense, start, cfg, res)?;
        let end = if start.is_some() {
            let incumbent = best;
            let stop = move |b: &BoundsPair| b.upper < incumbent;
            s.run(cfg.eps, Some(&stop))?
        } else {
            s.run(cfg.eps, None)?
        };
        res.absorb(&s, cfg.eps);
        res.per_gamble[i].outcome = match end {
            RunEnd::Converged => Outcome::Converged,
            RunEnd::Stopped => Outcome::EarlyExcluded,
        };
        let b = s.bounds();
        let candidate = match sense {
            Sense::Lower => b.lower,
            Sense::Upper => b.upper,
        };
        if candidate > best {
            best = candidate;
            star = Some(i);
        }
    }
    star.map(|i| (i, best))
        .ok_or_else(|| Error::contract("empty gamble set"))
}

fn single(
    algorithm: Algorithm,
    prevision: &LowerPrevision,
    k: &GambleSet,
    sense: Sense,
    warm: bool,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    check_dims(prevision, k)?;
    let mut res = CriterionResult::new(algorithm, k.len());
    let (star, value) = if warm {
        let st = setup(prevision, k, true, cfg, &mut res)?;
        single_best(
            prevision,
            k,
            sense,
            &st.order,
            Some(&st.start),
            cfg,
            &mut res,
        )?
    } else {
        let order: Vec<usize> = (0..k.len()).collect();
        single_best(prevision, k, sense, &order, None, cfg, &mut res)?
    };
    res.chosen = vec![star];
    res.value = Some(value);
    Ok(res)
}

/// Every `E(f_i)` from a cold start; first strict maximum of `ℓ_i` wins.
pub fn maximin_original(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    single(Algorithm::Maximin1, prevision, k, Sense::Lower, false, cfg)
}

/// Every `Ē(f_i)` from a cold start; first strict maximum of `u_i` wins.
pub fn maximax_original(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    single(Algorithm::Maximax1, prevision, k, Sense::Upper, false, cfg)
}

/// Warm starts, decreasing `E_p` order, stop a solve once `u_i < e̲`.
pub fn maximin_sorted(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    single(Algorithm::Maximin2, prevision, k, Sense::Lower, true, cfg)
}

/// Warm starts, decreasing `E_p` order, stop a solve once `u_i < ē`.
pub fn maximax_sorted(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    single(Algorithm::Maximax2, prevision, k, Sense::Upper, true, cfg)
}

/// Γ-maximin by full solves, then `Ē(f_i)` in full for every other gamble.
pub fn id_original(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    check_dims(prevision, k)?;
    let mut res = CriterionResult::new(Algorithm::Id1, k.len());
    let order: Vec<usize> = (0..k.len()).collect();
    let (star, e) = single_best(prevision, k, Sense::Lower, &order, None, cfg, &mut res)?;
    let mut chosen = vec![star];
    for i in (0..k.len()).filter(|&i| i != star) {
        let mut s = open(prevision, k, i, Sense::Upper, None, cfg, &mut res)?;
        s.run(cfg.eps, None)?;
        res.absorb(&s, cfg.eps);
        res.per_gamble[i].outcome = Outcome::Converged;
        if s.bounds().upper >= e {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    res.chosen = chosen;
    res.value = Some(e);
    Ok(res)
}

/// Sorted Γ-maximin, then each `Ē(f_i)` solve stops as soon as its bounds
/// fall on one side of `e̲`.
pub fn id_staged(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    check_dims(prevision, k)?;
    let mut res = CriterionResult::new(Algorithm::Id2, k.len());
    let st = setup(prevision, k, true, cfg, &mut res)?;
    let (star, e) = single_best(
        prevision,
        k,
        Sense::Lower,
        &st.order,
        Some(&st.start),
        cfg,
        &mut res,
    )?;
    let mut chosen = vec![star];
    for &i in st.order.iter().filter(|&&i| i != star) {
        let mut s = open(
            prevision,
            k,
            i,
            Sense::Upper,
            Some(&st.start),
            cfg,
            &mut res,
        )?;
        let stop = move |b: &BoundsPair| b.upper < e || b.lower >= e;
        let end = s.run(cfg.eps, Some(&stop))?;
        res.absorb(&s, cfg.eps);
        let b = s.bounds();
        let include = b.upper >= e;
        res.per_gamble[i].outcome = match (end, include) {
            (RunEnd::Converged, _) => Outcome::Converged,
            (RunEnd::Stopped, false) => Outcome::EarlyExcluded,
            (RunEnd::Stopped, true) => Outcome::EarlyIncluded,
        };
        if include {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    res.chosen = chosen;
    res.value = Some(e);
    Ok(res)
}
