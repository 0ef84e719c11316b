//! Γ-maximin, Γ-maximax and interval dominance.
//!
//! Three families of algorithms:
//!
//! * original: every natural extension solved to tolerance from a cold start;
//! * sorted: feasible warm starts, gambles visited in decreasing `E_p` order
//!   and each solve stopped as soon as its bounds settle the decision;
//! * elimination: all candidates stepped in rounds, dropping any whose upper
//!   bound falls below the best lower bound.
//!
//! Indices in results are 0-based; the CLI prints them 1-based.

mod elimination;
mod sequential;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use elimination::{id_hybrid, id_interleaved, maximax_elimination, maximin_elimination};
pub use sequential::{
    id_original, id_staged, maximax_original, maximax_sorted, maximin_original, maximin_sorted,
};

use crate::error::{Error, Result};
use crate::linprog::{BoundsPair, IpmParams, DEFAULT_EPS};
use crate::natex::{
    interior_credal_point_with, CredalStart, NatexProblem, NatexSession, Orientation, Sense,
};
use crate::prevision::{sort_by_expectation, GambleSet, LowerPrevision};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    Maximin,
    Maximax,
    IntervalDominance,
}

/// The ten algorithms, by CLI label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Γ-maximin, cold starts, full solves.
    Maximin1,
    /// Γ-maximin, warm starts, sorted, early stopping.
    Maximin2,
    /// Γ-maximin by elimination rounds.
    Maximin3,
    Maximax1,
    Maximax2,
    Maximax3,
    /// Interval dominance, `2k − 1` full solves.
    Id1,
    /// Interval dominance, sorted Γ-maximin then two-sided early stopping.
    Id2,
    /// Interval dominance, maximin bounds and upper solves interleaved.
    Id3,
    /// Interval dominance, elimination until a candidate emerges, then
    /// interleaved.
    Id4,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::Maximin1,
        Algorithm::Maximin2,
        Algorithm::Maximin3,
        Algorithm::Maximax1,
        Algorithm::Maximax2,
        Algorithm::Maximax3,
        Algorithm::Id1,
        Algorithm::Id2,
        Algorithm::Id3,
        Algorithm::Id4,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Maximin1 => "maximin1",
            Algorithm::Maximin2 => "maximin2",
            Algorithm::Maximin3 => "maximin3",
            Algorithm::Maximax1 => "maximax1",
            Algorithm::Maximax2 => "maximax2",
            Algorithm::Maximax3 => "maximax3",
            Algorithm::Id1 => "id1",
            Algorithm::Id2 => "id2",
            Algorithm::Id3 => "id3",
            Algorithm::Id4 => "id4",
        }
    }

    pub fn kind(self) -> CriterionKind {
        match self {
            Algorithm::Maximin1 | Algorithm::Maximin2 | Algorithm::Maximin3 => {
                CriterionKind::Maximin
            }
            Algorithm::Maximax1 | Algorithm::Maximax2 | Algorithm::Maximax3 => {
                CriterionKind::Maximax
            }
            _ => CriterionKind::IntervalDominance,
        }
    }

    /// Whether the algorithm relies on the phase-one interior point.
    pub fn uses_warm_starts(self) -> bool {
        !matches!(
            self,
            Algorithm::Maximin1 | Algorithm::Maximax1 | Algorithm::Id1
        )
    }

    pub fn valid_labels() -> String {
        Self::ALL.map(Algorithm::label).join(", ")
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| {
                Error::Argument(format!(
                    "unknown algorithm `{s}`; valid: {}",
                    Self::valid_labels()
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Tolerance on `max{γ, r_P, r_D}` and on `M* − M_*`.
    pub eps: f64,
    pub params: IpmParams,
    /// Step the sessions of one elimination round on the rayon pool.
    pub parallel_rounds: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            params: IpmParams::default(),
            parallel_rounds: false,
        }
    }
}

/// How the decision about one gamble was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    NotRun,
    /// Solved to tolerance.
    Converged,
    /// Stopped once its upper bound fell below the threshold.
    EarlyExcluded,
    /// Stopped once its lower bound reached the threshold.
    EarlyIncluded,
    /// Removed from the maximin/maximax candidates in an elimination round.
    Eliminated,
    /// Still undetermined at the tolerance exit and included.
    Borderline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GambleTrace {
    pub lower_iterations: usize,
    pub upper_iterations: usize,
    /// Last bounds on `E(f)` / `Ē(f)` seen, if a session ran.
    pub lower: Option<BoundsPair>,
    pub upper: Option<BoundsPair>,
    pub outcome: Outcome,
}

impl Default for GambleTrace {
    fn default() -> Self {
        Self {
            lower_iterations: 0,
            upper_iterations: 0,
            lower: None,
            upper: None,
            outcome: Outcome::NotRun,
        }
    }
}

/// Index sets after one elimination/interleaved round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub candidates: Vec<usize>,
    pub included: Vec<usize>,
    pub excluded: Vec<usize>,
    pub undetermined: Vec<usize>,
    pub m_lower: f64,
    pub m_upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub algorithm: Algorithm,
    pub kind: CriterionKind,
    /// Chosen index set (sorted): the single winner, the elimination
    /// survivors, or the interval-dominant set.
    pub chosen: Vec<usize>,
    /// Surviving maximin candidates for the interleaved/hybrid algorithms.
    pub maximin_candidates: Option<Vec<usize>>,
    /// `(M_*, M^*)` bracketing the maximin (or maximax) value.
    pub maximin_bounds: Option<(f64, f64)>,
    /// Value driving the decision: `e̲`, `ē`, or `M_*`.
    pub value: Option<f64>,
    /// Certified `E(f_i)` for solves that converged.
    pub lower_values: Vec<Option<f64>>,
    /// Certified `Ē(f_i)` for solves that converged.
    pub upper_values: Vec<Option<f64>>,
    pub per_gamble: Vec<GambleTrace>,
    pub rounds: Vec<RoundTrace>,
    /// Natural-extension programs opened.
    pub lp_solves: usize,
    /// Iterations over all programs, phase one included.
    pub cum_ipm_iterations: usize,
    pub setup_iterations: usize,
    /// Phase one plus sorting.
    pub setup_ns: u64,
}

impl CriterionResult {
    fn new(algorithm: Algorithm, k: usize) -> Self {
        Self {
            algorithm,
            kind: algorithm.kind(),
            chosen: Vec::new(),
            maximin_candidates: None,
            maximin_bounds: None,
            value: None,
            lower_values: vec![None; k],
            upper_values: vec![None; k],
            per_gamble: vec![GambleTrace::default(); k],
            rounds: Vec::new(),
            lp_solves: 0,
            cum_ipm_iterations: 0,
            setup_iterations: 0,
            setup_ns: 0,
        }
    }

    /// Folds a finished session into the counters and traces.
    fn absorb(&mut self, s: &NatexSession, eps: f64) {
        let i = s.index();
        let it = s.iterations();
        self.cum_ipm_iterations += it;
        let b = s.bounds();
        let value = s.converged(eps).then(|| s.value());
        let t = &mut self.per_gamble[i];
        match s.problem().sense {
            Sense::Lower => {
                t.lower_iterations += it;
                t.lower = Some(b);
                self.lower_values[i] = value;
            }
            Sense::Upper => {
                t.upper_iterations += it;
                t.upper = Some(b);
                self.upper_values[i] = value;
            }
        }
    }

    /// Iterations per gamble, both senses.
    pub fn per_gamble_iterations(&self) -> Vec<usize> {
        self.per_gamble
            .iter()
            .map(|t| t.lower_iterations + t.upper_iterations)
            .collect()
    }

    /// Chosen set as 1-based indices.
    pub fn chosen_one_based(&self) -> Vec<usize> {
        self.chosen.iter().map(|i| i + 1).collect()
    }
}

/// Shared preparation: the credal interior point and, if asked, the order
/// of decreasing `E_p`.
pub(crate) struct Setup {
    pub start: CredalStart,
    pub order: Vec<usize>,
}

pub(crate) fn setup(
    prevision: &LowerPrevision,
    k: &GambleSet,
    sort: bool,
    cfg: &SolveConfig,
    res: &mut CriterionResult,
) -> Result<Setup> {
    let t0 = Instant::now();
    let start = interior_credal_point_with(prevision, &cfg.params)?;
    let order = if sort {
        sort_by_expectation(k, &start.point)?
    } else {
        (0..k.len()).collect()
    };
    res.setup_ns = t0.elapsed().as_nanos() as u64;
    res.setup_iterations = start.iterations;
    res.cum_ipm_iterations += start.iterations;
    Ok(Setup { start, order })
}

/// Opens a session for gamble `i`, warm if a start is given.
pub(crate) fn open(
    prevision: &LowerPrevision,
    k: &GambleSet,
    i: usize,
    sense: Sense,
    start: Option<&CredalStart>,
    cfg: &SolveConfig,
    res: &mut CriterionResult,
) -> Result<NatexSession> {
    let problem = NatexProblem::new(prevision, k.get(i), sense, Orientation::auto(prevision))?;
    res.lp_solves += 1;
    Ok(match start {
        Some(s) => NatexSession::warm(problem, s, cfg.params, i),
        None => NatexSession::cold(problem, cfg.params, i),
    })
}

fn check_dims(prevision: &LowerPrevision, k: &GambleSet) -> Result<()> {
    if prevision.n_omega() != k.n_omega() {
        return Err(Error::contract(format!(
            "gambles have {} outcomes, prevision has {}",
            k.n_omega(),
            prevision.n_omega()
        )));
    }
    Ok(())
}

/// Runs one algorithm by label.
pub fn run(
    algorithm: Algorithm,
    prevision: &LowerPrevision,
    k: &GambleSet,
    cfg: &SolveConfig,
) -> Result<CriterionResult> {
    check_dims(prevision, k)?;
    if !(cfg.eps > 0.0) {
        return Err(Error::Argument("epsilon must be positive".into()));
    }
    match algorithm {
        Algorithm::Maximin1 => maximin_original(prevision, k, cfg),
        Algorithm::Maximin2 => maximin_sorted(prevision, k, cfg),
        Algorithm::Maximin3 => maximin_elimination(prevision, k, cfg),
        Algorithm::Maximax1 => maximax_original(prevision, k, cfg),
        Algorithm::Maximax2 => maximax_sorted(prevision, k, cfg),
        Algorithm::Maximax3 => maximax_elimination(prevision, k, cfg),
        Algorithm::Id1 => id_original(prevision, k, cfg),
        Algorithm::Id2 => id_staged(prevision, k, cfg),
        Algorithm::Id3 => id_interleaved(prevision, k, cfg),
        Algorithm::Id4 => id_hybrid(prevision, k, cfg),
    }
}
