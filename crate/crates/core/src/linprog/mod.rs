//! Standard-form linear programs and a stepwise primal-dual interior-point
//! method.
//!
//! Source problems are written as [`LpSpec`] (free or nonnegative variables,
//! `≤`/`≥`/`=` rows, min or max) and converted with [`to_standard_form`] to
//! `min cᵀx s.t. Ax = b, x ≥ 0`. Each inequality gets its own slack column.
//! Free variables are split by default; [`FreeHandling::Native`] keeps them as
//! unrestricted columns, which lets dual warm starts be strictly interior.

pub mod dense;
mod ipm;

pub use dense::Matrix;
pub use ipm::{
    bounds, is_converged, pd_init, pd_step, solve_to_tolerance, BoundsPair, IpmParams,
    IterateState, SolveOutcome, SolveStatus, WarmStart,
};

use crate::error::{Error, Result};

/// Feasibility tolerance on `‖Ax−b‖∞` and `‖Aᵀy+s−c‖∞` for certification.
pub const EPS_FEAS: f64 = 1e-8;
/// Default optimality tolerance.
pub const DEFAULT_EPS: f64 = 1e-8;
pub const ITERATION_CAP: usize = 500;
/// Pivot threshold for redundant-row detection.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    GreaterEq,
    Equal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program in the form it is naturally written.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSpec {
    pub objective: Objective,
    pub costs: Vec<f64>,
    pub vars: Vec<VarKind>,
    pub constraints: Vec<Constraint>,
}

impl LpSpec {
    pub fn new(objective: Objective, costs: Vec<f64>, vars: Vec<VarKind>) -> Self {
        Self {
            objective,
            costs,
            vars,
            constraints: Vec::new(),
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn n_vars(&self) -> usize {
        self.costs.len()
    }

    /// Source objective `cᵀv`.
    pub fn objective_value(&self, v: &[f64]) -> f64 {
        self.costs.iter().zip(v).map(|(c, x)| c * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreeHandling {
    /// `v = v⁺ − v⁻` with both parts nonnegative.
    #[default]
    Split,
    /// Keep free variables as unrestricted columns.
    Native,
}

/// Where a source variable lives in standard form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarColumns {
    Single(usize),
    Split { pos: usize, neg: usize },
}

/// Bookkeeping to move between source and standard-form variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceMap {
    /// `+1` for a minimization source, `−1` for maximization (`c_std = sign·c`).
    pub objective_sign: f64,
    pub var_cols: Vec<VarColumns>,
    /// Per source row: slack column and its coefficient (`+1` for `≤`, `−1` for `≥`).
    pub slack_cols: Vec<Option<(usize, f64)>>,
    /// Per source row: its row in `A`, or `None` if removed as redundant.
    pub row_index: Vec<Option<usize>>,
}

/// `min cᵀx s.t. Ax = b, x ≥ 0` (free columns only under [`FreeHandling::Native`]).
#[derive(Debug, Clone)]
pub struct StandardFormLP {
    c: Vec<f64>,
    a: Matrix,
    b: Vec<f64>,
    free: Vec<bool>,
    col_nz: Vec<Vec<(usize, f64)>>,
    map: SourceMap,
}

impl StandardFormLP {
    pub fn n_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.a.cols()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn is_free(&self, j: usize) -> bool {
        self.free[j]
    }

    pub fn n_free(&self) -> usize {
        self.free.iter().filter(|f| **f).count()
    }

    pub fn map(&self) -> &SourceMap {
        &self.map
    }

    pub(crate) fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.col_nz[j]
    }

    /// Converts a standard-form objective value to the source sense.
    pub fn source_value(&self, std_value: f64) -> f64 {
        self.map.objective_sign * std_value
    }

    /// Source variable values from a standard-form `x`.
    pub fn to_source_primal(&self, x: &[f64]) -> Vec<f64> {
        self.map
            .var_cols
            .iter()
            .map(|vc| match *vc {
                VarColumns::Single(j) => x[j],
                VarColumns::Split { pos, neg } => x[pos] - x[neg],
            })
            .collect()
    }

    /// Source row multipliers from a standard-form `y`. Rows removed as
    /// redundant get multiplier zero.
    pub fn to_source_dual(&self, y: &[f64]) -> Vec<f64> {
        self.map
            .row_index
            .iter()
            .map(|r| r.map_or(0.0, |i| self.map.objective_sign * y[i]))
            .collect()
    }

    /// Standard-form `y` from source row multipliers.
    pub fn from_source_dual(&self, v: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows()];
        for (src, r) in self.map.row_index.iter().enumerate() {
            if let Some(i) = r {
                y[*i] = self.map.objective_sign * v[src];
            }
        }
        y
    }

    /// Standard-form `x` from source values, slacks computed exactly.
    /// Negative entries are possible when `v` is infeasible.
    pub fn from_source_primal(&self, v: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_cols()];
        for (vc, val) in self.map.var_cols.iter().zip(v) {
            match *vc {
                VarColumns::Single(j) => x[j] = *val,
                VarColumns::Split { pos, neg } => {
                    x[pos] = val.max(0.0);
                    x[neg] = (-val).max(0.0);
                }
            }
        }
        self.fill_slacks(&mut x);
        x
    }

    /// Sets every slack column so its row holds with equality.
    pub(crate) fn fill_slacks(&self, x: &mut [f64]) {
        for (src, slack) in self.map.slack_cols.iter().enumerate() {
            let (Some((j, coef)), Some(i)) = (*slack, self.map.row_index[src]) else {
                continue;
            };
            x[j] = 0.0;
            let ax: f64 = self.a.row(i).iter().zip(x.iter()).map(|(a, v)| a * v).sum();
            x[j] = (self.b[i] - ax) / coef;
        }
    }
}

/// Converts with free variables split.
pub fn to_standard_form(spec: &LpSpec) -> Result<StandardFormLP> {
    to_standard_form_with(spec, FreeHandling::Split)
}

pub fn to_standard_form_with(spec: &LpSpec, free: FreeHandling) -> Result<StandardFormLP> {
    let n_src = spec.costs.len();
    if spec.vars.len() != n_src {
        return Err(Error::contract(format!(
            "{} costs but {} variable kinds",
            n_src,
            spec.vars.len()
        )));
    }
    for (r, con) in spec.constraints.iter().enumerate() {
        if con.coeffs.len() != n_src {
            return Err(Error::contract(format!(
                "row {r} has {} coefficients, expected {n_src}",
                con.coeffs.len()
            )));
        }
        if !con.rhs.is_finite() || con.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract(format!("row {r} has non-finite data")));
        }
    }
    if spec.costs.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("non-finite objective coefficient"));
    }

    let sign = match spec.objective {
        Objective::Minimize => 1.0,
        Objective::Maximize => -1.0,
    };
    let mut c = Vec::new();
    let mut is_free = Vec::new();
    let mut var_cols = Vec::with_capacity(n_src);
    for (cost, kind) in spec.costs.iter().zip(&spec.vars) {
        let col = c.len();
        match (kind, free) {
            (VarKind::Free, FreeHandling::Split) => {
                c.extend([sign * cost, -sign * cost]);
                is_free.extend([false, false]);
                var_cols.push(VarColumns::Split {
                    pos: col,
                    neg: col + 1,
                });
            }
            (kind, _) => {
                c.push(sign * cost);
                is_free.push(*kind == VarKind::Free);
                var_cols.push(VarColumns::Single(col));
            }
        }
    }
    let mut slack_cols = Vec::with_capacity(spec.constraints.len());
    for con in &spec.constraints {
        let coef = match con.relation {
            Relation::LessEq => Some(1.0),
            Relation::GreaterEq => Some(-1.0),
            Relation::Equal => None,
        };
        slack_cols.push(coef.map(|k| {
            c.push(0.0);
            is_free.push(false);
            (c.len() - 1, k)
        }));
    }
    let n = c.len();

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(spec.constraints.len());
    let mut b = Vec::with_capacity(spec.constraints.len());
    for (con, slack) in spec.constraints.iter().zip(&slack_cols) {
        let mut row = vec![0.0; n];
        for (coef, vc) in con.coeffs.iter().zip(&var_cols) {
            match *vc {
                VarColumns::Single(j) => row[j] = *coef,
                VarColumns::Split { pos, neg } => {
                    row[pos] = *coef;
                    row[neg] = -coef;
                }
            }
        }
        if let Some((j, k)) = slack {
            row[*j] = *k;
        }
        rows.push(row);
        b.push(con.rhs);
    }

    let keep = independent_rows(&rows, &b)?;
    let mut row_index = vec![None; rows.len()];
    let mut kept_rows = Vec::new();
    let mut kept_b = Vec::new();
    for (src, row) in rows.into_iter().enumerate() {
        if keep[src] {
            row_index[src] = Some(kept_rows.len());
            kept_rows.push(row);
            kept_b.push(b[src]);
        }
    }
    let a = Matrix::from_rows(&kept_rows, n);
    let mut col_nz = vec![Vec::new(); n];
    for i in 0..a.rows() {
        for (j, v) in a.row(i).iter().enumerate() {
            if *v != 0.0 {
                col_nz[j].push((i, *v));
            }
        }
    }
    // a slack column whose row was dropped is an unconstrained zero-cost column
    for (src, slack) in slack_cols.iter_mut().enumerate() {
        if row_index[src].is_none() {
            *slack = None;
        }
    }
    Ok(StandardFormLP {
        c,
        a,
        b: kept_b,
        free: is_free,
        col_nz,
        map: SourceMap {
            objective_sign: sign,
            var_cols,
            slack_cols,
            row_index,
        },
    })
}

/// Marks which rows to keep. A row owning a column no other row touches is
/// independent of the rest, so elimination only runs over the remaining rows.
fn independent_rows(rows: &[Vec<f64>], b: &[f64]) -> Result<Vec<bool>> {
    let m = rows.len();
    let mut keep = vec![true; m];
    if m == 0 {
        return Ok(keep);
    }
    let n = rows[0].len();
    let mut col_count = vec![0usize; n];
    for row in rows {
        for (j, v) in row.iter().enumerate() {
            if *v != 0.0 {
                col_count[j] += 1;
            }
        }
    }
    let candidates: Vec<usize> = (0..m)
        .filter(|&i| {
            !rows[i]
                .iter()
                .zip(&col_count)
                .any(|(v, c)| *v != 0.0 && *c == 1)
        })
        .collect();

    // reduced rows with their pivot column, rhs carried along
    let mut basis: Vec<(Vec<f64>, f64, usize)> = Vec::new();
    for &i in &candidates {
        let mut r = rows[i].clone();
        let mut rhs = b[i];
        let scale = r
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(rhs.abs());
        for (br, bb, p) in &basis {
            let f = r[*p] / br[*p];
            if f != 0.0 {
                for (x, y) in r.iter_mut().zip(br) {
                    *x -= f * y;
                }
                rhs -= f * bb;
            }
        }
        let (piv, size) = r.iter().enumerate().fold((0, 0.0f64), |acc, (j, v)| {
            if v.abs() > acc.1 {
                (j, v.abs())
            } else {
                acc
            }
        });
        if size <= RANK_TOL * scale.max(1.0) {
            if rhs.abs() > 1e-9 * scale.max(1.0) {
                return Err(Error::contract(format!(
                    "equality row {i} is inconsistent with the rows before it"
                )));
            }
            keep[i] = false;
        } else {
            basis.push((r, rhs, piv));
        }
    }
    Ok(keep)
}
