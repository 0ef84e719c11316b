//! Lower and upper natural extension as linear programs, with feasible
//! starting points and a steppable solve session.
//!
//! With `h_i = g_i − P(g_i)`:
//!
//! ```text
//! P1  min Σ f(ω)p(ω)   s.t. Σ_ω h_i(ω)p(ω) ≥ 0, Σp = 1, p ≥ 0
//! D1  max α            s.t. α + Σ_i λ_i h_i(ω) ≤ f(ω), λ ≥ 0
//! P2  min β            s.t. β − Σ_i λ_i h_i(ω) ≥ f(ω), λ ≥ 0
//! D2  max Σ f(ω)p(ω)   s.t. Σ_ω h_i(ω)p(ω) ≥ 0, Σp = 1, p ≥ 0
//! ```
//!
//! P1/D1 give `E(f)`, P2/D2 give `Ē(f)`. Only one program of each pair is
//! handed to the interior-point method; its iterate carries the other as the
//! dual. We pick whichever has fewer rows.

use crate::error::{Error, Result};
use crate::linprog::{
    pd_init, pd_step, solve_to_tolerance, to_standard_form_with, BoundsPair, FreeHandling,
    IpmParams, IterateState, LpSpec, Objective, Relation, SolveStatus, StandardFormLP, VarKind,
    WarmStart, DEFAULT_EPS,
};
use crate::prevision::{dot, Gamble, LowerPrevision, Pmf};

/// Phase-one margins at or below this magnitude are treated as zero.
pub const TOL_ASL: f64 = 1e-9;
/// Multiplier value used by the direct dual starts.
pub const DELTA_W: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Lower,
    Upper,
}

/// Which program of the pair is the interior-point primal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// P1 (lower) or D2 (upper): variables are the pmf.
    CredalPrimal,
    /// D1 (lower) or P2 (upper): variables are the multipliers.
    CredalDual,
}

impl Orientation {
    /// The orientation with fewer constraint rows.
    pub fn auto(prevision: &LowerPrevision) -> Self {
        let m = prevision.constraint_rows().len();
        if m + 1 <= prevision.n_omega() {
            Orientation::CredalPrimal
        } else {
            Orientation::CredalDual
        }
    }
}

/// Both programs of a natural-extension pair and the one being solved.
#[derive(Debug, Clone)]
pub struct NatexProblem {
    pub sense: Sense,
    pub orientation: Orientation,
    pub gamble: Gamble,
    /// P1 (lower) or P2 (upper).
    pub primal_lp: LpSpec,
    /// D1 (lower) or D2 (upper).
    pub dual_lp: LpSpec,
    solved: StandardFormLP,
    /// Rows `h_i` the programs were built from.
    h: Vec<Vec<f64>>,
}

fn credal_lp(objective: Objective, f: &Gamble, h: &[Vec<f64>]) -> LpSpec {
    let n = f.len();
    let mut spec = LpSpec::new(
        objective,
        f.payoffs().to_vec(),
        vec![VarKind::NonNegative; n],
    );
    for row in h {
        spec.constrain(row.clone(), Relation::GreaterEq, 0.0);
    }
    spec.constrain(vec![1.0; n], Relation::Equal, 1.0);
    spec
}

/// D1 (`lower`) or P2. Variables are `(λ_1..λ_m, α)` or `(λ_1..λ_m, β)`.
fn multiplier_lp(sense: Sense, f: &Gamble, h: &[Vec<f64>]) -> LpSpec {
    let m = h.len();
    let mut costs = vec![0.0; m + 1];
    costs[m] = 1.0;
    let mut vars = vec![VarKind::NonNegative; m + 1];
    vars[m] = VarKind::Free;
    let (objective, lam_sign, rel) = match sense {
        Sense::Lower => (Objective::Maximize, 1.0, Relation::LessEq),
        Sense::Upper => (Objective::Minimize, -1.0, Relation::GreaterEq),
    };
    let mut spec = LpSpec::new(objective, costs, vars);
    for (w, fw) in f.payoffs().iter().enumerate() {
        let mut row: Vec<f64> = h.iter().map(|hi| lam_sign * hi[w]).collect();
        row.push(1.0);
        spec.constrain(row, rel, *fw);
    }
    spec
}

impl NatexProblem {
    pub fn new(
        prevision: &LowerPrevision,
        f: &Gamble,
        sense: Sense,
        orientation: Orientation,
    ) -> Result<Self> {
        prevision.check_gamble(f)?;
        let h = prevision.constraint_rows();
        let (primal_lp, dual_lp) = match sense {
            Sense::Lower => (
                credal_lp(Objective::Minimize, f, &h),
                multiplier_lp(Sense::Lower, f, &h),
            ),
            Sense::Upper => (
                multiplier_lp(Sense::Upper, f, &h),
                credal_lp(Objective::Maximize, f, &h),
            ),
        };
        let source = match (sense, orientation) {
            (Sense::Lower, Orientation::CredalPrimal) | (Sense::Upper, Orientation::CredalDual) => {
                &primal_lp
            }
            _ => &dual_lp,
        };
        let solved = to_standard_form_with(source, FreeHandling::Native)?;
        Ok(Self {
            sense,
            orientation,
            gamble: f.clone(),
            primal_lp,
            dual_lp,
            solved,
            h,
        })
    }

    /// The program handed to the interior-point method.
    pub fn solved_lp(&self) -> &StandardFormLP {
        &self.solved
    }

    /// Whether the solved program is a maximization, in which case its
    /// standard-form bounds are negated and swapped.
    fn flipped(&self) -> bool {
        matches!(
            (self.sense, self.orientation),
            (Sense::Lower, Orientation::CredalDual) | (Sense::Upper, Orientation::CredalPrimal)
        )
    }

    /// Bounds on the natural extension from a standard-form iterate.
    pub fn natex_bounds(&self, state: &IterateState, eps_feas: f64) -> BoundsPair {
        let b = state.bounds(eps_feas);
        if self.flipped() {
            BoundsPair {
                lower: -b.upper,
                upper: -b.lower,
                certified: b.certified,
            }
        } else {
            b
        }
    }

    /// Feasible warm start from a credal interior point and the direct
    /// multiplier start.
    pub fn warm_start(&self, start: &CredalStart) -> WarmStart {
        let p = start.point.mass().to_vec();
        let m = self.h.len();
        let (lam, cushion) = direct_multipliers(&self.h, &self.gamble, self.sense);
        match (self.sense, self.orientation) {
            (Sense::Lower, Orientation::CredalPrimal) => {
                let mut v = lam;
                v.push(cushion);
                WarmStart {
                    primal: Some(p),
                    dual: Some(v),
                }
            }
            (Sense::Upper, Orientation::CredalPrimal) => {
                let mut v: Vec<f64> = lam.iter().map(|l| -l).collect();
                v.push(cushion);
                WarmStart {
                    primal: Some(p),
                    dual: Some(v),
                }
            }
            (_, Orientation::CredalDual) => {
                let mut x = lam;
                x.push(cushion);
                debug_assert_eq!(x.len(), m + 1);
                WarmStart {
                    primal: Some(x),
                    dual: Some(p),
                }
            }
        }
    }

    pub fn h_rows(&self) -> &[Vec<f64>] {
        &self.h
    }
}

pub fn build_lower(prevision: &LowerPrevision, f: &Gamble) -> Result<NatexProblem> {
    NatexProblem::new(prevision, f, Sense::Lower, Orientation::auto(prevision))
}

pub fn build_upper(prevision: &LowerPrevision, f: &Gamble) -> Result<NatexProblem> {
    NatexProblem::new(prevision, f, Sense::Upper, Orientation::auto(prevision))
}

/// A strictly interior point of the credal set, reused for every gamble.
#[derive(Debug, Clone, PartialEq)]
pub struct CredalStart {
    pub point: Pmf,
    /// Smallest of `E_p(g_i) − P(g_i)` and `|Ω|·p(ω)`.
    pub margin: f64,
    /// Phase-one interior-point iterations.
    pub iterations: usize,
}

/// `λ_i = δ_w` and the cushioned α (lower) or β (upper).
fn direct_multipliers(h: &[Vec<f64>], f: &Gamble, sense: Sense) -> (Vec<f64>, f64) {
    let lam = vec![DELTA_W; h.len()];
    let shifted = f.payoffs().iter().enumerate().map(|(w, fw)| {
        let s: f64 = h.iter().map(|hi| DELTA_W * hi[w]).sum();
        match sense {
            Sense::Lower => fw - s,
            Sense::Upper => fw + s,
        }
    });
    let cushion = match sense {
        Sense::Lower => shifted.fold(f64::INFINITY, f64::min) - 1.0,
        Sense::Upper => shifted.fold(f64::NEG_INFINITY, f64::max) + 1.0,
    };
    (lam, cushion)
}

/// Multiplier start for D1 (`Lower`, returns `(λ, α)`) or P2 (`Upper`,
/// returns `(λ, β)`). Every row holds with slack at least 1.
pub fn direct_dual_start(prevision: &LowerPrevision, f: &Gamble, sense: Sense) -> Result<Vec<f64>> {
    prevision.check_gamble(f)?;
    let (mut v, c) = direct_multipliers(&prevision.constraint_rows(), f, sense);
    v.push(c);
    Ok(v)
}

/// Phase one: `max δ` s.t. `E_p(h_i) ≥ δ`, `p(ω) ≥ δ/|Ω|`, `Σp = 1`, solved
/// through its dual
///
/// ```text
/// min z  s.t.  Σ_i μ_i h_i(ω) + ν_ω − z = 0  ∀ω,  Σμ + Σν/|Ω| = 1,  μ, ν ≥ 0
/// ```
///
/// which has `|Ω| + 1` rows; `p` is read off the row multipliers. Since
/// `μ ≤ 1`, `z ≥ −max|h|`, so `z` is shifted to a nonnegative variable
/// rather than left free.
pub fn interior_credal_point(prevision: &LowerPrevision) -> Result<CredalStart> {
    interior_credal_point_with(prevision, &IpmParams::default())
}

pub fn interior_credal_point_with(
    prevision: &LowerPrevision,
    params: &IpmParams,
) -> Result<CredalStart> {
    let n = prevision.n_omega();
    let h = prevision.constraint_rows();
    let m = h.len();
    let mut costs = vec![0.0; m + n + 1];
    costs[m + n] = 1.0;
    let shift = 1.0 + h.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let vars = vec![VarKind::NonNegative; m + n + 1];
    let mut spec = LpSpec::new(Objective::Minimize, costs, vars);
    for w in 0..n {
        let mut row = vec![0.0; m + n + 1];
        for (i, hi) in h.iter().enumerate() {
            row[i] = hi[w];
        }
        row[m + w] = 1.0;
        row[m + n] = -1.0;
        spec.constrain(row, Relation::Equal, -shift);
    }
    let mut last = vec![1.0; m + n + 1];
    for v in &mut last[m..m + n] {
        *v = 1.0 / n as f64;
    }
    last[m + n] = 0.0;
    spec.constrain(last, Relation::Equal, 1.0);

    let lp = to_standard_form_with(&spec, FreeHandling::Native)?;
    // coarse solve first; tighten only when the sign of δ* is in doubt
    let mut out = solve_to_tolerance(&lp, pd_init(&lp, None, params), DEFAULT_EPS, None, params)?;
    if out.status == SolveStatus::Converged
        && (out.value.unwrap_or(f64::NAN) - shift).abs() <= TOL_ASL + DEFAULT_EPS
    {
        let steps = out.steps;
        out = solve_to_tolerance(&lp, out.state, 0.1 * TOL_ASL, None, params)?;
        out.steps += steps;
    }
    if out.status != SolveStatus::Converged {
        return Err(Error::SolverFailed {
            index: 0,
            reason: format!("phase one ended with {:?}", out.status),
        });
    }
    let delta = out.value.unwrap_or(f64::NAN) - shift;
    if delta <= -TOL_ASL {
        return Err(Error::NotAvoidingSureLoss { margin: delta });
    }
    if delta.abs() <= TOL_ASL {
        return Err(Error::DegenerateAsl { margin: delta });
    }
    let v = lp.to_source_dual(&out.state.y);
    let mut p: Vec<f64> = v[..n].iter().map(|x| (-x).max(0.0)).collect();
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x /= total;
    }
    let margin = credal_margin(&h, &p);
    if !(margin > 0.0) {
        return Err(Error::DegenerateAsl { margin });
    }
    Ok(CredalStart {
        point: Pmf::new(p)?,
        margin,
        iterations: out.steps,
    })
}

/// Smallest constraint slack of `p` in the phase-one program.
pub fn credal_margin(h: &[Vec<f64>], p: &[f64]) -> f64 {
    let n = p.len() as f64;
    let mass = p.iter().fold(f64::INFINITY, |a, x| a.min(n * x));
    h.iter().map(|hi| dot(hi, p)).fold(mass, f64::min)
}

/// An interior-point run on one natural-extension program, steppable one
/// iteration at a time.
#[derive(Debug, Clone)]
pub struct NatexSession {
    problem: NatexProblem,
    state: IterateState,
    params: IpmParams,
    index: usize,
    steps: usize,
}

/// Why [`NatexSession::run`] returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunEnd {
    Converged,
    Stopped,
}

impl NatexSession {
    /// Default interior start, no feasibility assumed.
    pub fn cold(problem: NatexProblem, params: IpmParams, index: usize) -> Self {
        let state = pd_init(problem.solved_lp(), None, &params);
        Self {
            problem,
            state,
            params,
            index,
            steps: 0,
        }
    }

    /// Feasible primal and dual start.
    pub fn warm(
        problem: NatexProblem,
        start: &CredalStart,
        params: IpmParams,
        index: usize,
    ) -> Self {
        let warm = problem.warm_start(start);
        let state = pd_init(problem.solved_lp(), Some(&warm), &params);
        Self {
            problem,
            state,
            params,
            index,
            steps: 0,
        }
    }

    pub fn problem(&self) -> &NatexProblem {
        &self.problem
    }

    pub fn state(&self) -> &IterateState {
        &self.state
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Interior-point iterations taken so far.
    pub fn iterations(&self) -> usize {
        self.steps
    }

    /// Current `(ℓ, u)` on the natural extension.
    pub fn bounds(&self) -> BoundsPair {
        self.problem.natex_bounds(&self.state, self.params.eps_feas)
    }

    /// `max{γ, r_P, r_D} < ε` on a certified iterate.
    pub fn converged(&self, eps: f64) -> bool {
        let b = self.bounds();
        b.certified && b.gap().max(self.state.r_p).max(self.state.r_d) < eps
    }

    /// Midpoint of the current bounds.
    pub fn value(&self) -> f64 {
        let b = self.bounds();
        0.5 * (b.lower + b.upper)
    }

    pub fn step(&mut self) -> Result<()> {
        if self.steps >= self.params.max_iter {
            return Err(Error::SolverFailed {
                index: self.index,
                reason: format!("iteration limit {} reached", self.params.max_iter),
            });
        }
        self.state = pd_step(self.problem.solved_lp(), &self.state, &self.params).map_err(|e| {
            Error::SolverFailed {
                index: self.index,
                reason: e.to_string(),
            }
        })?;
        self.steps += 1;
        Ok(())
    }

    /// Repeat-until loop: steps, then tests convergence and `stop` (the
    /// latter only on certified bounds).
    pub fn run(&mut self, eps: f64, stop: Option<&dyn Fn(&BoundsPair) -> bool>) -> Result<RunEnd> {
        loop {
            self.step()?;
            if self.converged(eps) {
                return Ok(RunEnd::Converged);
            }
            let b = self.bounds();
            if b.certified && stop.is_some_and(|pred| pred(&b)) {
                return Ok(RunEnd::Stopped);
            }
        }
    }
}

fn natex(prevision: &LowerPrevision, f: &Gamble, sense: Sense, eps: f64) -> Result<f64> {
    let start = interior_credal_point(prevision)?;
    natex_with_start(prevision, &start, f, sense, eps, IpmParams::default())
}

/// Natural extension from a precomputed interior point.
pub fn natex_with_start(
    prevision: &LowerPrevision,
    start: &CredalStart,
    f: &Gamble,
    sense: Sense,
    eps: f64,
    params: IpmParams,
) -> Result<f64> {
    let problem = NatexProblem::new(prevision, f, sense, Orientation::auto(prevision))?;
    let mut session = NatexSession::warm(problem, start, params, 0);
    session.run(eps, None)?;
    Ok(session.value())
}

/// `E(f)`.
pub fn lower_natex(prevision: &LowerPrevision, f: &Gamble, eps: f64) -> Result<f64> {
    natex(prevision, f, Sense::Lower, eps)
}

/// `Ē(f)`.
pub fn upper_natex(prevision: &LowerPrevision, f: &Gamble, eps: f64) -> Result<f64> {
    natex(prevision, f, Sense::Upper, eps)
}
