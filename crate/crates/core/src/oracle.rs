//! Reference answers from a textbook simplex method.
//!
//! Shares no code with the interior-point path: the credal program is built
//! straight from the prevision entries and solved with a dense two-phase
//! tableau under Bland's rule.

use crate::error::{Error, Result};
use crate::natex::Sense;
use crate::prevision::{Gamble, GambleSet, LowerPrevision};

/// Default decision-side tolerance.
pub const ORACLE_TOL: f64 = 1e-6;
const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexResult {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible { phase_one: f64 },
    Unbounded,
}

/// `min cᵀx s.t. Ax = b, x ≥ 0` by two-phase simplex with Bland's rule.
pub fn simplex(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> SimplexResult {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    // tableau rows: constraints, then objective row
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // phase one: minimize the sum of artificials
    for j in 0..width {
        let s: f64 = (0..m).map(|i| t[i][j]).sum();
        t[m][j] = if (n..n + m).contains(&j) { 0.0 } else { -s };
    }
    if run(&mut t, &mut basis, n + m).is_err() {
        unreachable!("phase one is bounded below by zero");
    }
    let phase_one = -t[m][width - 1];
    if phase_one > FEAS_TOL {
        return SimplexResult::Infeasible { phase_one };
    }
    // drive artificials out of the basis where possible
    let mut drop_rows = Vec::new();
    for i in 0..m {
        if basis[i] >= n {
            match (0..n).find(|&j| t[i][j].abs() > 1e-9) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => drop_rows.push(i),
            }
        }
    }
    for &i in drop_rows.iter().rev() {
        t.remove(i);
        basis.remove(i);
    }
    let m = basis.len();

    // phase two
    for j in 0..width {
        t[m][j] = if j < n { c[j] } else { 0.0 };
    }
    for i in 0..m {
        let cb = if basis[i] < n { c[basis[i]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..width {
                t[m][j] -= cb * t[i][j];
            }
        }
    }
    if run(&mut t, &mut basis, n).is_err() {
        return SimplexResult::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1];
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    SimplexResult::Optimal { value, x }
}

/// Pivots until optimal; entering columns restricted to `0..n_enter`.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], n_enter: usize) -> std::result::Result<(), ()> {
    let m = basis.len();
    let last = t[0].len() - 1;
    loop {
        let Some(e) = (0..n_enter).find(|&j| t[m][j] < -PIVOT_TOL) else {
            return Ok(());
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][e] > PIVOT_TOL {
                let ratio = t[i][last] / t[i][e];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[i] < basis[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        let Some((r, _)) = leave else {
            return Err(());
        };
        pivot(t, basis, r, e);
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, e: usize) {
    let p = t[r][e];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let row = t[r].clone();
    for (i, ti) in t.iter_mut().enumerate() {
        if i != r {
            let f = ti[e];
            if f != 0.0 {
                for (v, rv) in ti.iter_mut().zip(&row) {
                    *v -= f * rv;
                }
            }
        }
    }
    basis[r] = e;
}

/// `E(f)` (lower) or `Ē(f)` (upper) by optimizing over the credal set.
pub fn oracle_natex(prevision: &LowerPrevision, f: &Gamble, sense: Sense) -> Result<f64> {
    let n = prevision.n_omega();
    if f.len() != n {
        return Err(Error::contract("gamble and prevision dimensions differ"));
    }
    let m = prevision.len();
    // variables: p (n), surplus t (m)
    let mut a = Vec::with_capacity(m + 1);
    for (i, (g, price)) in prevision.entries().iter().enumerate() {
        let mut row = vec![0.0; n + m];
        for (w, v) in g.payoffs().iter().enumerate() {
            row[w] = v - price;
        }
        row[n + i] = -1.0;
        a.push(row);
    }
    let mut norm = vec![0.0; n + m];
    norm[..n].fill(1.0);
    a.push(norm);
    let mut b = vec![0.0; m];
    b.push(1.0);
    let sign = match sense {
        Sense::Lower => 1.0,
        Sense::Upper => -1.0,
    };
    let mut c: Vec<f64> = f.payoffs().iter().map(|v| sign * v).collect();
    c.resize(n + m, 0.0);
    match simplex(&c, &a, &b) {
        SimplexResult::Optimal { value, .. } => Ok(sign * value),
        SimplexResult::Infeasible { phase_one } => {
            Err(Error::NotAvoidingSureLoss { margin: -phase_one })
        }
        SimplexResult::Unbounded => unreachable!("credal program is bounded"),
    }
}

/// Definition-level optimal sets. Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSets {
    pub maximin: Vec<usize>,
    pub maximax: Vec<usize>,
    pub interval_dominant: Vec<usize>,
    pub e_values: Vec<f64>,
    pub ebar_values: Vec<f64>,
    /// `max E` minus the best `E` outside the maximin set (∞ if none).
    pub maximin_margin: f64,
    /// `max Ē` minus the best `Ē` outside the maximax set (∞ if none).
    pub maximax_margin: f64,
    /// Smallest `|Ē_i − max E|` over gambles outside the maximin set.
    pub id_margin: f64,
}

impl OracleSets {
    pub fn max_e(&self) -> f64 {
        self.e_values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_ebar(&self) -> f64 {
        self.ebar_values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest separation behind any of the three sets.
    pub fn min_margin(&self) -> f64 {
        self.maximin_margin
            .min(self.maximax_margin)
            .min(self.id_margin)
    }
}

pub fn oracle_opt_sets(prevision: &LowerPrevision, k: &GambleSet, tol: f64) -> Result<OracleSets> {
    let e_values = k
        .members()
        .iter()
        .map(|f| oracle_natex(prevision, f, Sense::Lower))
        .collect::<Result<Vec<_>>>()?;
    let ebar_values = k
        .members()
        .iter()
        .map(|f| oracle_natex(prevision, f, Sense::Upper))
        .collect::<Result<Vec<_>>>()?;
    Ok(sets_from_values(e_values, ebar_values, tol))
}

/// The three sets from precomputed values.
pub fn sets_from_values(e_values: Vec<f64>, ebar_values: Vec<f64>, tol: f64) -> OracleSets {
    let max_e = e_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_ebar = ebar_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let maximin: Vec<usize> = (0..e_values.len())
        .filter(|&i| e_values[i] >= max_e - tol)
        .collect();
    let maximax: Vec<usize> = (0..ebar_values.len())
        .filter(|&i| ebar_values[i] >= max_ebar - tol)
        .collect();
    let interval_dominant: Vec<usize> = (0..ebar_values.len())
        .filter(|&i| ebar_values[i] >= max_e - tol)
        .collect();
    let outside = |set: &[usize], vals: &[f64], best: f64| {
        (0..vals.len())
            .filter(|i| !set.contains(i))
            .map(|i| best - vals[i])
            .fold(f64::INFINITY, f64::min)
    };
    let maximin_margin = outside(&maximin, &e_values, max_e);
    let maximax_margin = outside(&maximax, &ebar_values, max_ebar);
    let id_margin = (0..ebar_values.len())
        .filter(|i| !maximin.contains(i))
        .map(|i| (ebar_values[i] - max_e).abs())
        .fold(f64::INFINITY, f64::min);
    OracleSets {
        maximin,
        maximax,
        interval_dominant,
        e_values,
        ebar_values,
        maximin_margin,
        maximax_margin,
        id_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prevision::PossibilitySpace;

    fn g(v: &[f64]) -> Gamble {
        Gamble::new(v.to_vec()).unwrap()
    }

    fn running() -> LowerPrevision {
        LowerPrevision::new(
            PossibilitySpace::new(2).unwrap(),
            vec![(g(&[1.0, 0.0]), 0.3)],
        )
        .unwrap()
    }

    #[test]
    fn simplex_textbook_problem() {
        // min −x1 − 2x2 s.t. x1 + x2 + s1 = 4, x2 + s2 = 3  → x = (1, 3), value −7
        let r = simplex(
            &[-1.0, -2.0, 0.0, 0.0],
            &[vec![1.0, 1.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]],
            &[4.0, 3.0],
        );
        match r {
            SimplexResult::Optimal { value, x } => {
                assert!((value + 7.0).abs() < 1e-12);
                assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simplex_detects_infeasible_unbounded_and_redundant() {
        assert!(matches!(
            simplex(&[1.0], &[vec![1.0]], &[-1.0]),
            SimplexResult::Infeasible { .. }
        ));
        assert_eq!(
            simplex(&[-1.0, 0.0], &[vec![1.0, -1.0]], &[0.0]),
            SimplexResult::Unbounded
        );
        let r = simplex(&[1.0, 2.0], &[vec![1.0, 1.0], vec![2.0, 2.0]], &[1.0, 2.0]);
        assert!(matches!(r, SimplexResult::Optimal { value, .. } if (value - 1.0).abs() < 1e-12));
    }

    #[test]
    fn running_instance_natex() {
        let p = running();
        let v = |f: &[f64], s| oracle_natex(&p, &g(f), s).unwrap();
        assert!(v(&[0.0, 1.0], Sense::Lower).abs() < 1e-12);
        assert!((v(&[0.0, 1.0], Sense::Upper) - 0.7).abs() < 1e-12);
        assert!((v(&[1.0, 0.0], Sense::Lower) - 0.3).abs() < 1e-12);
        assert!((v(&[0.4, 0.4], Sense::Lower) - 0.4).abs() < 1e-12);
        assert!((v(&[0.4, 0.4], Sense::Upper) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn sure_loss_is_reported() {
        let p = LowerPrevision::new(
            PossibilitySpace::new(2).unwrap(),
            vec![(g(&[1.0, 0.0]), 1.2)],
        )
        .unwrap();
        assert!(matches!(
            oracle_natex(&p, &g(&[0.0, 1.0]), Sense::Lower),
            Err(Error::NotAvoidingSureLoss { .. })
        ));
    }

    #[test]
    fn running_instance_sets() {
        let k = GambleSet::new(vec![g(&[0.0, 1.0]), g(&[0.5, 0.5]), g(&[0.2, 0.2])]).unwrap();
        let s = oracle_opt_sets(&running(), &k, ORACLE_TOL).unwrap();
        assert_eq!(s.maximin, vec![1]);
        assert_eq!(s.maximax, vec![0]);
        assert_eq!(s.interval_dominant, vec![0, 1]);
        assert!((s.maximin_margin - 0.3).abs() < 1e-9);
        assert!((s.id_margin - 0.2).abs() < 1e-9);
    }

    #[test]
    fn identical_and_single_sets() {
        let k = GambleSet::new(vec![g(&[0.1, 0.9]); 3]).unwrap();
        let s = oracle_opt_sets(&running(), &k, ORACLE_TOL).unwrap();
        assert_eq!(s.maximin, vec![0, 1, 2]);
        assert_eq!(s.maximax, vec![0, 1, 2]);
        assert_eq!(s.interval_dominant, vec![0, 1, 2]);
        let k = GambleSet::new(vec![g(&[0.1, 0.9])]).unwrap();
        let s = oracle_opt_sets(&running(), &k, ORACLE_TOL).unwrap();
        assert_eq!(
            (
                s.maximin.clone(),
                s.maximax.clone(),
                s.interval_dominant.clone()
            ),
            (vec![0], vec![0], vec![0])
        );
    }
}
