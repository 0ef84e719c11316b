//! Round-based algorithms: elimination and interleaved interval dominance.
//!
//! Each round steps a set of sessions once, then combines their bounds with
//! order-independent max and set operations, so stepping the sessions of one
//! round concurrently gives the same result. Sessions that have already met
//! the tolerance are not stepped again.

use rayon::prelude::*;

use super::{
    check_dims, open, setup, Algorithm, CriterionResult, Outcome, RoundTrace, SolveConfig,
};
use crate::error::Result;
use crate::natex::{NatexSession, Sense};
use crate::prevision::{GambleSet, LowerPrevision};

/// Steps every member session that has not converged; returns how many.
fn advance(
    sessions: &mut [Option<NatexSession>],
    members: &[bool],
    cfg: &SolveConfig,
) -> Result<usize> {
    let eps = cfg.eps;
    let work = |(i, s): (usize, &mut Option<NatexSession>)| -> Result<usize> {
        match s {
            Some(s) if members[i] && !s.converged(eps) => s.step().map(|_| 1),
            _ => Ok(0),
        }
    };
    if cfg.parallel_rounds {
        sessions
            .par_iter_mut()
            .enumerate()
            .map(work)
            .try_reduce(|| 0, |a, b| Ok(a + b))
    } else {
        sessions.iter_mut().enumerate().map(work).sum()
    }
}

/// Certified bounds, or `(−∞, +∞)` when the iterate is not yet feasible.
fn trusted(s: &NatexSession) -> (f64, f64) {
    let b = s.bounds();
    if b.certified {
        (b.lower, b.upper)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

fn members(mask: &[bool]) -> Vec<usize> {
    (0..mask.len()).filter(|&i| mask[i]).collect()
}

/// `(max ℓ_i, max u_i)` over the masked sessions.
fn bracket(sessions: &[Option<NatexSession>], mask: &[bool]) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (s, _) in sessions.iter().zip(mask).filter(|(_, m)| **m) {
        if let Some(s) = s {
            let (l, u) = trusted(s);
            lo = lo.max(l);
            hi = hi.max(u);
        }
    }
    (lo, hi)
}

fn open_all(
    prevision: &LowerPrevision,
    k: &GambleSet,
    sense: Sense,
    mask: &[bool],
    start: &crate::natex::CredalStart,
    cfg: &SolveConfig,
    res: &mut CriterionResult,
) -> Result<Vec<Option<NatexSession>>> {
    (0..k.len())
        .map(|i| {
            if mask[i] {
                open(prevision, k, i, sense, Some(start), cfg, res).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect()
}

/// Elimination rounds until one candidate is left or `M* − M_* < ε`.
/// Returns the candidate mask and `(M_*, M^*)`.
fn eliminate(
    sessions: &mut [Option<NatexSession>],
    cfg: &SolveConfig,
    res: &mut CriterionResult,
) -> Result<(Vec<bool>, f64, f64)> {
    let k = sessions.len();
    let mut r = vec![true; k];
    loop {
        let stepped = advance(sessions, &r, cfg)?;
        let (lo, hi) = bracket(sessions, &r);
        for i in 0..k {
            if r[i] {
                let (_, u) = trusted(sessions[i].as_ref().expect("candidate session"));
                if u < lo {
                    r[i] = false;
                    res.per_gamble[i].outcome = Outcome::Eliminated;
                }
            }
        }
        let cands = members(&r);
        res.rounds.push(RoundTrace {
            candidates: cands.clone(),
            included: Vec::new(),
            excluded: Vec::new(),
            undetermined: Vec::new(),
            m_lower: lo,
            m_upper: hi,
        });
        if cands.len() == 1 || hi - lo < cfg.eps || stepped == 0 {
            return Ok((r, lo, hi));
        }
    }
}

fn elimination(
    algorithm: Algorithm,
    prevision: &LowerPrevision,
    k: &GambleSet,
    sense: Sense,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    check_dims(prevision, k)?;
    let mut res = CriterionResult::new(algorithm, k.len());
    let st = setup(prevision, k, false, cfg, &mut res)?;
    let all = vec![true; k.len()];
    let mut sessions = open_all(prevision, k, sense, &all, &st.start, cfg, &mut res)?;
    let (r, lo, hi) = eliminate(&mut sessions, cfg, &mut res)?;
    for s in sessions.iter().flatten() {
        res.absorb(s, cfg.eps);
    }
    for i in members(&r) {
        res.per_gamble[i].outcome = Outcome::Converged;
    }
    res.chosen = members(&r);
    res.maximin_bounds = Some((lo, hi));
    res.value = Some(lo);
    Ok(res)
}

/// Γ-maximin candidates narrowed in rounds; returns every survivor.
pub fn maximin_elimination(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    elimination(Algorithm::Maximin3, prevision, k, Sense::Lower, cfg)
}

/// Γ-maximax candidates narrowed in rounds; returns every survivor.
pub fn maximax_elimination(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    elimination(Algorithm::Maximax3, prevision, k, Sense::Upper, cfg)
}

/// Classifies undetermined gambles against `(M_*, M^*)`: into `I` when
/// `ℓ̄_j ≥ M^*`, into `N` when `ū_j < M_*`.
fn classify(
    upper: &[Option<NatexSession>],
    j: &mut [bool],
    inc: &mut [bool],
    exc: &mut [bool],
    lo: f64,
    hi: f64,
    eps: f64,
    res: &mut CriterionResult,
) {
    for idx in 0..j.len() {
        if !j[idx] {
            continue;
        }
        let (l, u) = trusted(upper[idx].as_ref().expect("undetermined session"));
        if l >= hi {
            inc[idx] = true;
            j[idx] = false;
        } else if u < lo {
            exc[idx] = true;
            j[idx] = false;
        }
        if !j[idx] {
            let s = upper[idx].as_ref().expect("undetermined session");
            res.per_gamble[idx].outcome = if s.converged(eps) {
                Outcome::Converged
            } else if inc[idx] {
                Outcome::EarlyIncluded
            } else {
                Outcome::EarlyExcluded
            };
        }
    }
}

fn all_settled(upper: &[Option<NatexSession>], j: &[bool], eps: f64) -> bool {
    (0..j.len())
        .filter(|&i| j[i])
        .all(|i| upper[i].as_ref().is_some_and(|s| s.converged(eps)))
}

fn round_trace(r: &[bool], inc: &[bool], exc: &[bool], j: &[bool], lo: f64, hi: f64) -> RoundTrace {
    RoundTrace {
        candidates: members(r),
        included: members(inc),
        excluded: members(exc),
        undetermined: members(j),
        m_lower: lo,
        m_upper: hi,
    }
}

fn finish_id(
    mut res: CriterionResult,
    lower: &[Option<NatexSession>],
    upper: &[Option<NatexSession>],
    r: &[bool],
    mut inc: Vec<bool>,
    j: &[bool],
    lo: f64,
    hi: f64,
    eps: f64,
) -> CriterionResult {
    for s in lower.iter().chain(upper).flatten() {
        res.absorb(s, eps);
    }
    for idx in members(j) {
        inc[idx] = true;
        res.per_gamble[idx].outcome = Outcome::Borderline;
    }
    res.chosen = members(&inc);
    res.maximin_candidates = Some(members(r));
    res.maximin_bounds = Some((lo, hi));
    res.value = Some(lo);
    res
}

/// Maximin bounds and upper solves advanced together from the first round.
pub fn id_interleaved(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    check_dims(prevision, k)?;
    let n = k.len();
    let mut res = CriterionResult::new(Algorithm::Id3, n);
    let st = setup(prevision, k, false, cfg, &mut res)?;
    let all = vec![true; n];
    let mut lower = open_all(prevision, k, Sense::Lower, &all, &st.start, cfg, &mut res)?;
    let mut upper = open_all(prevision, k, Sense::Upper, &all, &st.start, cfg, &mut res)?;
    let mut r = vec![true; n];
    let mut j = vec![true; n];
    let mut inc = vec![false; n];
    let mut exc = vec![false; n];
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    loop {
        let mut stepped = 0;
        if hi - lo >= cfg.eps {
            stepped += advance(&mut lower, &r, cfg)?;
            (lo, hi) = bracket(&lower, &r);
            for i in 0..n {
                if r[i] {
                    let (_, u) = trusted(lower[i].as_ref().expect("candidate session"));
                    if u < lo {
                        r[i] = false;
                    }
                }
            }
        }
        stepped += advance(&mut upper, &j, cfg)?;
        classify(
            &upper, &mut j, &mut inc, &mut exc, lo, hi, cfg.eps, &mut res,
        );
        res.rounds.push(round_trace(&r, &inc, &exc, &j, lo, hi));
        let done = !j.contains(&true) || (all_settled(&upper, &j, cfg.eps) && hi - lo < cfg.eps);
        if done || stepped == 0 {
            break;
        }
    }
    Ok(finish_id(res, &lower, &upper, &r, inc, &j, lo, hi, cfg.eps))
}

/// Elimination until the maximin candidates are identified, then upper
/// solves for the rest while the maximin bounds keep tightening.
pub fn id_hybrid(
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    check_dims(prevision, k)?;
    let n = k.len();
    let mut res = CriterionResult::new(Algorithm::Id4, n);
    let st = setup(prevision, k, false, cfg, &mut res)?;
    let all = vec![true; n];
    let mut lower = open_all(prevision, k, Sense::Lower, &all, &st.start, cfg, &mut res)?;
    let (r, mut lo, mut hi) = eliminate(&mut lower, cfg, &mut res)?;
    let mut inc = r.clone();
    let mut exc = vec![false; n];
    let mut j: Vec<bool> = r.iter().map(|x| !x).collect();
    let mut upper = open_all(prevision, k, Sense::Upper, &j, &st.start, cfg, &mut res)?;
    loop {
        let mut stepped = advance(&mut upper, &j, cfg)?;
        if hi - lo >= cfg.eps {
            stepped += advance(&mut lower, &r, cfg)?;
            (lo, hi) = bracket(&lower, &r);
        }
        classify(
            &upper, &mut j, &mut inc, &mut exc, lo, hi, cfg.eps, &mut res,
        );
        res.rounds.push(round_trace(&r, &inc, &exc, &j, lo, hi));
        let done = !j.contains(&true) || (all_settled(&upper, &j, cfg.eps) && hi - lo < cfg.eps);
        if done || stepped == 0 {
            break;
        }
    }
    for i in members(&r) {
        res.per_gamble[i].outcome = Outcome::Converged;
    }
    Ok(finish_id(res, &lower, &upper, &r, inc, &j, lo, hi, cfg.eps))
}
