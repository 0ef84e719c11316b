//! Infeasible-start Mehrotra predictor-corrector steps.

use super::dense::Cholesky;
use super::{StandardFormLP, VarColumns, EPS_FEAS, ITERATION_CAP};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpmParams {
    pub eps_feas: f64,
    pub max_iter: usize,
    /// Fraction-to-boundary factor.
    pub step_fraction: f64,
    /// Static diagonal regularization of the normal equations.
    pub regularization: f64,
    /// Value that boundary coordinates of a warm start are raised to.
    pub interior_floor: f64,
    /// Warm-start coordinates below this count as on the boundary.
    pub boundary_tol: f64,
    /// Iterates with an entry beyond this magnitude are declared divergent.
    pub divergence: f64,
}

impl Default for IpmParams {
    fn default() -> Self {
        Self {
            eps_feas: EPS_FEAS,
            max_iter: ITERATION_CAP,
            step_fraction: 0.9995,
            regularization: 1e-10,
            interior_floor: 1e-2,
            boundary_tol: 1e-8,
            divergence: 1e10,
        }
    }
}

/// Source-variable warm start: primal values and/or row multipliers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WarmStart {
    pub primal: Option<Vec<f64>>,
    pub dual: Option<Vec<f64>>,
}

/// One primal-dual iterate with its residuals and objective values.
/// `s` is zero on free columns.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub r_p: f64,
    pub r_d: f64,
    pub mu: f64,
    pub primal_value: f64,
    pub dual_value: f64,
    pub iteration: usize,
}

/// Objective bounds in the standard-form (minimization) sense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsPair {
    pub lower: f64,
    pub upper: f64,
    pub certified: bool,
}

impl BoundsPair {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

impl IterateState {
    fn evaluate(
        lp: &StandardFormLP,
        x: Vec<f64>,
        y: Vec<f64>,
        s: Vec<f64>,
        iteration: usize,
    ) -> Self {
        let a = lp.a();
        let ax = a.mul_vec(&x);
        let r_p = ax
            .iter()
            .zip(lp.b())
            .fold(0.0f64, |acc, (v, b)| acc.max((v - b).abs()));
        let aty = a.tr_mul_vec(&y);
        let r_d = aty
            .iter()
            .zip(&s)
            .zip(lp.c())
            .fold(0.0f64, |acc, ((v, s), c)| acc.max((v + s - c).abs()));
        let n_nonneg = (0..lp.n_cols()).filter(|&j| !lp.is_free(j)).count();
        let comp: f64 = (0..lp.n_cols())
            .filter(|&j| !lp.is_free(j))
            .map(|j| x[j] * s[j])
            .sum();
        let mu = if n_nonneg == 0 {
            0.0
        } else {
            comp / n_nonneg as f64
        };
        let primal_value = dot(lp.c(), &x);
        let dual_value = dot(lp.b(), &y);
        Self {
            x,
            y,
            s,
            r_p,
            r_d,
            mu,
            primal_value,
            dual_value,
            iteration,
        }
    }

    pub fn bounds(&self, eps_feas: f64) -> BoundsPair {
        BoundsPair {
            lower: self.dual_value,
            upper: self.primal_value,
            certified: self.r_p < eps_feas && self.r_d < eps_feas,
        }
    }

    pub fn gap(&self) -> f64 {
        self.primal_value - self.dual_value
    }

    fn max_abs(&self) -> (f64, f64) {
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        (inf(&self.x), inf(&self.y).max(inf(&self.s)))
    }
}

/// Bounds with the default feasibility tolerance.
pub fn bounds(state: &IterateState) -> BoundsPair {
    state.bounds(EPS_FEAS)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Initial iterate. Warm-start values are mapped to standard form; boundary
/// coordinates are raised to `interior_floor` and slacks recomputed, so the
/// start may be infeasible but is always strictly interior.
pub fn pd_init(lp: &StandardFormLP, warm: Option<&WarmStart>, params: &IpmParams) -> IterateState {
    let n = lp.n_cols();
    let xi_p = inf_norm(lp.b()).max(1.0);
    let xi_d = inf_norm(lp.c()).max(1.0);
    let floor = params.interior_floor;
    let tol = params.boundary_tol;

    let x = match warm.and_then(|w| w.primal.as_deref()) {
        Some(v) => {
            let mut x = vec![0.0; n];
            for (vc, val) in lp.map().var_cols.iter().zip(v) {
                match *vc {
                    VarColumns::Single(j) => {
                        x[j] = if !lp.is_free(j) && *val < tol {
                            floor
                        } else {
                            *val
                        };
                    }
                    VarColumns::Split { pos, neg } => {
                        x[pos] = val.max(0.0) + floor;
                        x[neg] = (-val).max(0.0) + floor;
                    }
                }
            }
            lp.fill_slacks(&mut x);
            for (j, xj) in x.iter_mut().enumerate() {
                if !lp.is_free(j) && *xj < tol {
                    *xj = floor;
                }
            }
            x
        }
        None => (0..n)
            .map(|j| if lp.is_free(j) { 0.0 } else { xi_p })
            .collect(),
    };

    let (y, s) = match warm.and_then(|w| w.dual.as_deref()) {
        Some(v) => {
            let y = lp.from_source_dual(v);
            let aty = lp.a().tr_mul_vec(&y);
            let s = (0..n)
                .map(|j| {
                    if lp.is_free(j) {
                        0.0
                    } else {
                        let sj = lp.c()[j] - aty[j];
                        if sj < tol {
                            floor
                        } else {
                            sj
                        }
                    }
                })
                .collect();
            (y, s)
        }
        None => (
            vec![0.0; lp.n_rows()],
            (0..n)
                .map(|j| if lp.is_free(j) { 0.0 } else { xi_d })
                .collect(),
        ),
    };
    IterateState::evaluate(lp, x, y, s, 0)
}

/// Relative size below which a Cholesky pivot is skipped.
const PIVOT_SKIP: f64 = 1e-14;

/// Relative regularizations tried after the absolute one fails: 1e-14 up to 1e-6.
const RELATIVE_STEPS: usize = 5;

#[derive(Debug, Clone, Copy)]
enum Regularization {
    Absolute(f64),
    /// Multiple of the largest diagonal entry.
    Relative(f64),
}

impl Regularization {
    fn shift(self, scale: f64) -> f64 {
        match self {
            Self::Absolute(r) => r,
            Self::Relative(r) => r * scale,
        }
    }
}

/// Upper bound on iterative-refinement passes per solve.
const REFINE_PASSES: usize = 4;

/// Factored block system
/// `[A_N D A_Nᵀ  A_F; A_Fᵀ  0] [Δy; Δx_F] = [h; g]`.
struct NormalSystem<'a> {
    lp: &'a StandardFormLP,
    nonneg: &'a [usize],
    free: &'a [usize],
    d: &'a [f64],
    chol: Cholesky,
    /// `M⁻¹ a_j` for each free column `j`.
    z: Vec<Vec<f64>>,
    schur: Option<Cholesky>,
}

impl<'a> NormalSystem<'a> {
    fn factor(
        lp: &'a StandardFormLP,
        nonneg: &'a [usize],
        free: &'a [usize],
        d: &'a [f64],
        reg: Regularization,
        skip: f64,
    ) -> Option<Self> {
        let m = lp.n_rows();
        let mut mat = vec![0.0; m * m];
        for &j in nonneg {
            let dj = d[j];
            let col = lp.column(j);
            for (p, &(i1, a1)) in col.iter().enumerate() {
                let w = dj * a1;
                let row = &mut mat[i1 * m..i1 * m + i1 + 1];
                for &(i2, a2) in &col[..=p] {
                    row[i2] += w * a2;
                }
            }
        }
        let scale = (0..m).fold(1.0f64, |a, i| a.max(mat[i * m + i]));
        for i in 0..m {
            mat[i * m + i] += reg.shift(scale);
        }
        let chol = Cholesky::factor_skipping(mat, m, skip)?;
        let mut z = Vec::with_capacity(free.len());
        for &j in free {
            let mut col = vec![0.0; m];
            for &(i, a) in lp.column(j) {
                col[i] = a;
            }
            chol.solve_in_place(&mut col);
            z.push(col);
        }
        let schur = if free.is_empty() {
            None
        } else {
            let k = free.len();
            let mut sm = vec![0.0; k * k];
            for (p, &j) in free.iter().enumerate() {
                for q in 0..=p {
                    sm[p * k + q] = lp.column(j).iter().map(|&(i, a)| a * z[q][i]).sum();
                }
            }
            let scale = (0..k).fold(1.0f64, |a, p| a.max(sm[p * k + p]));
            for p in 0..k {
                sm[p * k + p] += reg.shift(scale);
            }
            Some(Cholesky::factor_skipping(sm, k, skip)?)
        };
        Some(Self {
            lp,
            nonneg,
            free,
            d,
            chol,
            z,
            schur,
        })
    }

    fn solve_once(&self, h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut w = self.chol.solve(h);
        let Some(schur) = &self.schur else {
            return (w, Vec::new());
        };
        let t: Vec<f64> = self
            .z
            .iter()
            .zip(g)
            .map(|(zj, gj)| dot(zj, h) - gj)
            .collect();
        let dxf = schur.solve(&t);
        for (zj, v) in self.z.iter().zip(&dxf) {
            for (wi, zi) in w.iter_mut().zip(zj) {
                *wi -= v * zi;
            }
        }
        (w, dxf)
    }

    /// Applies the unregularized block operator.
    fn apply(&self, dy: &[f64], dxf: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.lp.n_rows();
        let mut top = vec![0.0; m];
        for &j in self.nonneg {
            let col = self.lp.column(j);
            let t: f64 = col.iter().map(|&(i, a)| a * dy[i]).sum::<f64>() * self.d[j];
            for &(i, a) in col {
                top[i] += a * t;
            }
        }
        let mut bottom = Vec::with_capacity(self.free.len());
        for (&j, v) in self.free.iter().zip(dxf) {
            let col = self.lp.column(j);
            for &(i, a) in col {
                top[i] += a * v;
            }
            bottom.push(col.iter().map(|&(i, a)| a * dy[i]).sum());
        }
        (top, bottom)
    }

    fn solve(&self, h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (mut dy, mut dxf) = self.solve_once(h, g);
        let mut last = f64::INFINITY;
        for _ in 0..REFINE_PASSES {
            let (th, tg) = self.apply(&dy, &dxf);
            let rh: Vec<f64> = h.iter().zip(&th).map(|(a, b)| a - b).collect();
            let rg: Vec<f64> = g.iter().zip(&tg).map(|(a, b)| a - b).collect();
            let size = inf_norm(&rh).max(inf_norm(&rg));
            if !(size < 0.5 * last) || size == 0.0 {
                break;
            }
            last = size;
            let (cy, cx) = self.solve_once(&rh, &rg);
            for (a, b) in dy.iter_mut().zip(&cy) {
                *a += b;
            }
            for (a, b) in dxf.iter_mut().zip(&cx) {
                *a += b;
            }
        }
        (dy, dxf)
    }
}

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    ds: Vec<f64>,
}

fn direction(sys: &NormalSystem<'_>, s: &[f64], rp: &[f64], rd: &[f64], rc: &[f64]) -> Direction {
    let lp = sys.lp;
    let n = lp.n_cols();
    let mut h = rp.to_vec();
    for &j in sys.nonneg {
        let w = sys.d[j] * rd[j] - rc[j] / s[j];
        for &(i, a) in lp.column(j) {
            h[i] += a * w;
        }
    }
    let g: Vec<f64> = sys.free.iter().map(|&j| rd[j]).collect();
    let (dy, dxf) = sys.solve(&h, &g);
    let mut dx = vec![0.0; n];
    let mut ds = vec![0.0; n];
    for &j in sys.nonneg {
        let aty: f64 = lp.column(j).iter().map(|&(i, a)| a * dy[i]).sum();
        dx[j] = sys.d[j] * (aty - rd[j]) + rc[j] / s[j];
        ds[j] = rd[j] - aty;
    }
    for (&j, v) in sys.free.iter().zip(&dxf) {
        dx[j] = *v;
    }
    Direction { dx, dy, ds }
}

/// Largest `t ≤ 1` with `v + t·dv ≥ 0` on the given indices.
fn max_step(v: &[f64], dv: &[f64], idx: &[usize]) -> f64 {
    idx.iter().fold(
        1.0f64,
        |t, &j| {
            if dv[j] < 0.0 {
                t.min(-v[j] / dv[j])
            } else {
                t
            }
        },
    )
}

/// One predictor-corrector iteration.
pub fn pd_step(
    lp: &StandardFormLP,
    state: &IterateState,
    params: &IpmParams,
) -> Result<IterateState> {
    let n = lp.n_cols();
    if state.x.len() != n || state.s.len() != n || state.y.len() != lp.n_rows() {
        return Err(Error::contract("iterate does not belong to this program"));
    }
    let (x, y, s) = (&state.x, &state.y, &state.s);
    let nonneg: Vec<usize> = (0..n).filter(|&j| !lp.is_free(j)).collect();
    let free: Vec<usize> = (0..n).filter(|&j| lp.is_free(j)).collect();

    let ax = lp.a().mul_vec(x);
    let rp: Vec<f64> = lp.b().iter().zip(&ax).map(|(b, v)| b - v).collect();
    let aty = lp.a().tr_mul_vec(y);
    let rd: Vec<f64> = (0..n).map(|j| lp.c()[j] - aty[j] - s[j]).collect();
    let mut d = vec![0.0; n];
    for &j in &nonneg {
        d[j] = x[j] / s[j];
    }

    // absolute regularization, then relative escalation, then pivot skipping
    let mut attempt = 0;
    let sys = loop {
        let (reg, skip) = match attempt {
            0 => (Regularization::Absolute(params.regularization), 0.0),
            t if t <= RELATIVE_STEPS => (
                Regularization::Relative(1e-14 * 100f64.powi(t as i32 - 1)),
                0.0,
            ),
            _ => (Regularization::Absolute(params.regularization), PIVOT_SKIP),
        };
        match NormalSystem::factor(lp, &nonneg, &free, &d, reg, skip) {
            Some(sys) => break sys,
            None if skip == 0.0 => attempt += 1,
            None => {
                return Err(Error::SolverBreakdown {
                    reason: "normal equations are not positive definite".into(),
                    state: Box::new(state.clone()),
                })
            }
        }
    };

    let nn = nonneg.len();
    let mu = if nn == 0 {
        0.0
    } else {
        nonneg.iter().map(|&j| x[j] * s[j]).sum::<f64>() / nn as f64
    };

    // predictor
    let mut rc = vec![0.0; n];
    for &j in &nonneg {
        rc[j] = -x[j] * s[j];
    }
    let aff = direction(&sys, s, &rp, &rd, &rc);
    let ap = max_step(x, &aff.dx, &nonneg);
    let ad = max_step(s, &aff.ds, &nonneg);
    let sigma = if nn == 0 || mu <= 0.0 {
        0.0
    } else {
        let mu_aff = nonneg
            .iter()
            .map(|&j| (x[j] + ap * aff.dx[j]) * (s[j] + ad * aff.ds[j]))
            .sum::<f64>()
            / nn as f64;
        (mu_aff / mu).clamp(0.0, 1.0).powi(3)
    };

    // corrector
    for &j in &nonneg {
        rc[j] = sigma * mu - x[j] * s[j] - aff.dx[j] * aff.ds[j];
    }
    let dir = direction(&sys, s, &rp, &rd, &rc);
    let eta = params.step_fraction;
    let ap = (eta * max_step(x, &dir.dx, &nonneg).min(1.0 / eta)).min(1.0);
    let ad = (eta * max_step(s, &dir.ds, &nonneg).min(1.0 / eta)).min(1.0);

    let bad = |v: &[f64]| v.iter().any(|t| !t.is_finite());
    if bad(&dir.dx) || bad(&dir.dy) || bad(&dir.ds) {
        return Err(Error::SolverBreakdown {
            reason: "non-finite search direction".into(),
            state: Box::new(state.clone()),
        });
    }

    let xn: Vec<f64> = x.iter().zip(&dir.dx).map(|(v, d)| v + ap * d).collect();
    let yn: Vec<f64> = y.iter().zip(&dir.dy).map(|(v, d)| v + ad * d).collect();
    let mut sn: Vec<f64> = s.iter().zip(&dir.ds).map(|(v, d)| v + ad * d).collect();
    for &j in &free {
        sn[j] = 0.0;
    }
    Ok(IterateState::evaluate(lp, xn, yn, sn, state.iteration + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    EarlyStopped,
    IterationLimit,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Standard-form optimum estimate, set only when converged.
    pub value: Option<f64>,
    pub state: IterateState,
    /// Steps taken by this call.
    pub steps: usize,
}

/// Whether the state satisfies `max{γ, r_P, r_D} < ε` on a certified pair.
pub fn is_converged(state: &IterateState, eps: f64, params: &IpmParams) -> bool {
    let b = state.bounds(params.eps_feas);
    b.certified && b.gap().max(state.r_p).max(state.r_d) < eps
}

/// Steps from `init` until convergence, an early stop, the iteration cap or
/// divergence. `stop` is only consulted on certified bounds.
pub fn solve_to_tolerance(
    lp: &StandardFormLP,
    init: IterateState,
    eps: f64,
    stop: Option<&dyn Fn(&BoundsPair) -> bool>,
    params: &IpmParams,
) -> Result<SolveOutcome> {
    if !(eps > 0.0) {
        return Err(Error::contract("tolerance must be positive"));
    }
    let mut state = init;
    let mut steps = 0;
    loop {
        let b = state.bounds(params.eps_feas);
        if is_converged(&state, eps, params) {
            let value = 0.5 * (b.lower + b.upper);
            return Ok(SolveOutcome {
                status: SolveStatus::Converged,
                value: Some(value),
                state,
                steps,
            });
        }
        if let Some(pred) = stop {
            if b.certified && pred(&b) {
                return Ok(SolveOutcome {
                    status: SolveStatus::EarlyStopped,
                    value: None,
                    state,
                    steps,
                });
            }
        }
        let (px, dy) = state.max_abs();
        let status = if dy > params.divergence && dy >= px {
            Some(SolveStatus::Infeasible)
        } else if px > params.divergence {
            Some(SolveStatus::Unbounded)
        } else if steps >= params.max_iter {
            Some(SolveStatus::IterationLimit)
        } else {
            None
        };
        if let Some(status) = status {
            return Ok(SolveOutcome {
                status,
                value: None,
                state,
                steps,
            });
        }
        state = pd_step(lp, &state, params)?;
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linprog::{
        to_standard_form, to_standard_form_with, FreeHandling, LpSpec, Objective, Relation, VarKind,
    };

    fn running_p1(f: [f64; 2]) -> LpSpec {
        let mut spec = LpSpec::new(
            Objective::Minimize,
            f.to_vec(),
            vec![VarKind::NonNegative; 2],
        );
        spec.constrain(vec![0.7, -0.3], Relation::GreaterEq, 0.0)
            .constrain(vec![1.0, 1.0], Relation::Equal, 1.0);
        spec
    }

    fn solve(spec: &LpSpec) -> SolveOutcome {
        let lp = to_standard_form(spec).unwrap();
        let p = IpmParams::default();
        solve_to_tolerance(&lp, pd_init(&lp, None, &p), 1e-8, None, &p).unwrap()
    }

    #[test]
    fn forced_solution() {
        let mut spec = LpSpec::new(Objective::Minimize, vec![1.0], vec![VarKind::NonNegative]);
        spec.constrain(vec![1.0], Relation::Equal, 1.0);
        let out = solve(&spec);
        assert_eq!(out.status, SolveStatus::Converged);
        assert!((out.value.unwrap() - 1.0).abs() < 1e-10);
        assert!(out.steps <= 30);
    }

    #[test]
    fn running_instance_p1() {
        let out = solve(&running_p1([0.0, 1.0]));
        assert_eq!(out.status, SolveStatus::Converged);
        assert!(out.value.unwrap().abs() < 1e-8);
        let out = solve(&running_p1([1.0, 0.0]));
        assert!((out.value.unwrap() - 0.3).abs() < 1e-8);
    }

    #[test]
    fn mid_run_certified_bounds_sandwich_optimum() {
        let lp = to_standard_form(&running_p1([0.0, 1.0])).unwrap();
        let p = IpmParams::default();
        let mut st = pd_init(&lp, None, &p);
        let mut seen = 0;
        for _ in 0..60 {
            let b = bounds(&st);
            if b.certified {
                assert!(b.lower <= 1e-12 && b.upper >= -1e-12, "{b:?}");
                seen += 1;
                let next = pd_step(&lp, &st, &p).unwrap();
                assert!(next.r_p < 10.0 * p.eps_feas && next.r_d < 10.0 * p.eps_feas);
            }
            if is_converged(&st, 1e-9, &p) {
                break;
            }
            st = pd_step(&lp, &st, &p).unwrap();
        }
        assert!(seen > 0);
    }

    #[test]
    fn stop_predicate_semantics() {
        let lp = to_standard_form(&running_p1([0.0, 1.0])).unwrap();
        let p = IpmParams::default();
        let never = |b: &BoundsPair| b.upper < -1.0;
        let out = solve_to_tolerance(&lp, pd_init(&lp, None, &p), 1e-8, Some(&never), &p).unwrap();
        assert_eq!(out.status, SolveStatus::Converged);

        let warm = WarmStart {
            primal: Some(vec![0.99, 0.01]),
            dual: None,
        };
        let early = |b: &BoundsPair| b.upper < 0.05;
        let out =
            solve_to_tolerance(&lp, pd_init(&lp, Some(&warm), &p), 1e-8, Some(&early), &p).unwrap();
        match out.status {
            SolveStatus::EarlyStopped => {
                assert!(out.value.is_none());
                assert!(out.state.primal_value < 0.05);
            }
            SolveStatus::Converged => assert!(out.value.unwrap().abs() < 1e-8),
            s => panic!("unexpected {s:?}"),
        }
    }

    #[test]
    fn warm_start_infeasible_is_accepted() {
        let lp = to_standard_form(&running_p1([0.0, 1.0])).unwrap();
        let p = IpmParams::default();
        let warm = WarmStart {
            primal: Some(vec![1.0, 0.1]),
            dual: None,
        };
        let st = pd_init(&lp, Some(&warm), &p);
        assert!((st.r_p - 0.1).abs() < 1e-12);
        assert!(st.x.iter().all(|v| *v > 0.0) && st.s.iter().all(|v| *v > 0.0));
        let out = solve_to_tolerance(&lp, st, 1e-8, None, &p).unwrap();
        assert!(out.value.unwrap().abs() < 1e-8);
    }

    #[test]
    fn native_free_columns_converge() {
        // max α s.t. α ≤ 0, α ≤ 1
        let mut spec = LpSpec::new(Objective::Maximize, vec![1.0], vec![VarKind::Free]);
        spec.constrain(vec![1.0], Relation::LessEq, 0.0).constrain(
            vec![1.0],
            Relation::LessEq,
            1.0,
        );
        for mode in [FreeHandling::Split, FreeHandling::Native] {
            let lp = to_standard_form_with(&spec, mode).unwrap();
            let p = IpmParams::default();
            let warm = WarmStart {
                primal: Some(vec![-1.0]),
                dual: Some(vec![0.5, 0.5]),
            };
            let st = pd_init(&lp, Some(&warm), &p);
            if mode == FreeHandling::Native {
                assert!(bounds(&st).certified);
            }
            let out = solve_to_tolerance(&lp, st, 1e-8, None, &p).unwrap();
            assert_eq!(out.status, SolveStatus::Converged);
            assert!(lp.source_value(out.value.unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut spec = LpSpec::new(Objective::Minimize, vec![1.0], vec![VarKind::NonNegative]);
        spec.constrain(vec![1.0], Relation::Equal, -1.0);
        assert_eq!(solve(&spec).status, SolveStatus::Infeasible);

        let mut spec = LpSpec::new(
            Objective::Maximize,
            vec![1.0, 0.0],
            vec![VarKind::NonNegative; 2],
        );
        spec.constrain(vec![1.0, -1.0], Relation::Equal, 0.0);
        assert_eq!(solve(&spec).status, SolveStatus::Unbounded);
    }

    #[test]
    fn iterates_are_deterministic() {
        let lp = to_standard_form(&running_p1([0.3, 0.9])).unwrap();
        let p = IpmParams::default();
        let run = || {
            let mut st = pd_init(&lp, None, &p);
            let mut trace = Vec::new();
            for _ in 0..15 {
                st = pd_step(&lp, &st, &p).unwrap();
                trace.push(st.clone());
            }
            trace
        };
        let a = run();
        let b = run();
        for (s, t) in a.iter().zip(&b) {
            assert_eq!(
                s.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                t.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
            assert_eq!(
                s.y.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                t.y.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }
}
