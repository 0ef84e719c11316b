//! Finite possibility spaces, gambles, probability mass functions and lower
//! previsions.
//!
//! Everything here is immutable after construction. Constructors validate
//! their invariants and return [`Error::Contract`] on violation, so a value
//! that exists is always well formed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating probability mass functions.
pub const PMF_TOL: f64 = 1e-10;

/// A finite set of outcomes `w1..wN`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PossibilitySpace {
    size: usize,
    labels: Option<Vec<String>>,
}

impl PossibilitySpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::contract(
                "possibility space must have at least one outcome",
            ));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::contract(
                "possibility space must have at least one outcome",
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::contract(format!("duplicate outcome label {l:?}")));
            }
        }
        Ok(Self {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Label of outcome `i` (0-based); defaults to `w{i+1}`.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("w{}", i + 1),
        }
    }
}

/// A real payoff for every outcome of a possibility space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gamble(Vec<f64>);

impl Gamble {
    pub fn new(payoffs: Vec<f64>) -> Result<Self> {
        if payoffs.is_empty() {
            return Err(Error::contract("gamble must have at least one payoff"));
        }
        if let Some(i) = payoffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::contract(format!("payoff {} is not finite", i + 1)));
        }
        Ok(Self(payoffs))
    }

    pub fn constant(value: f64, size: usize) -> Result<Self> {
        Self::new(vec![value; size])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Entrywise negation.
    pub fn negate(&self) -> Gamble {
        Gamble(self.0.iter().map(|v| -v).collect())
    }

    /// `scale * self + shift`, used for translation and positive scaling.
    pub fn affine(&self, scale: f64, shift: f64) -> Gamble {
        Gamble(self.0.iter().map(|v| scale * v + shift).collect())
    }
}

impl fmt::Display for Gamble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A probability mass function on a finite possibility space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::contract("pmf must have at least one entry"));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < -PMF_TOL) {
            return Err(Error::contract(
                "pmf entries must be finite and nonnegative",
            ));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > PMF_TOL {
            return Err(Error::contract(format!("pmf sums to {total}, not 1")));
        }
        Ok(Self(mass))
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::contract("pmf must have at least one entry"));
        }
        Ok(Self(vec![1.0 / size as f64; size]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.0
    }
}

/// `Σ_ω p(ω) f(ω)`.
pub fn expectation(p: &Pmf, f: &Gamble) -> Result<f64> {
    if p.len() != f.len() {
        return Err(Error::contract(format!(
            "pmf has {} outcomes but gamble has {}",
            p.len(),
            f.len()
        )));
    }
    Ok(dot(p.mass(), f.payoffs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Entrywise negation of a gamble.
pub fn negate(f: &Gamble) -> Gamble {
    f.negate()
}

/// A lower prevision: supremum buying prices for finitely many gambles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerPrevision {
    space: PossibilitySpace,
    entries: Vec<(Gamble, f64)>,
}

impl LowerPrevision {
    pub fn new(space: PossibilitySpace, entries: Vec<(Gamble, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::contract("lower prevision needs at least one gamble"));
        }
        for (i, (g, price)) in entries.iter().enumerate() {
            if g.len() != space.size() {
                return Err(Error::contract(format!(
                    "domain gamble {} has {} payoffs, space has {}",
                    i + 1,
                    g.len(),
                    space.size()
                )));
            }
            if !price.is_finite() {
                return Err(Error::contract(format!(
                    "price of domain gamble {} is not finite",
                    i + 1
                )));
            }
        }
        Ok(Self { space, entries })
    }

    pub fn space(&self) -> &PossibilitySpace {
        &self.space
    }

    pub fn n_omega(&self) -> usize {
        self.space.size()
    }

    pub fn entries(&self) -> &[(Gamble, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The shifted gambles `g_i - P(g_i)` that actually constrain the credal
    /// set. Rows that vanish identically (e.g. a constant gamble priced at its
    /// value) hold for every pmf and are left out.
    pub fn constraint_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|(g, price)| g.payoffs().iter().map(|v| v - price).collect::<Vec<_>>())
            .filter(|row| row.iter().any(|v| v.abs() > ZERO_ROW_TOL))
            .collect()
    }

    pub(crate) fn check_gamble(&self, f: &Gamble) -> Result<()> {
        if f.len() != self.n_omega() {
            return Err(Error::contract(format!(
                "gamble has {} payoffs, space has {}",
                f.len(),
                self.n_omega()
            )));
        }
        Ok(())
    }
}

const ZERO_ROW_TOL: f64 = 1e-14;

/// The decision set `K`. Duplicates are allowed and keep distinct indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GambleSet {
    members: Vec<Gamble>,
}

impl GambleSet {
    pub fn new(members: Vec<Gamble>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::contract("gamble set must not be empty"));
        };
        let n = first.len();
        if let Some(i) = members.iter().position(|g| g.len() != n) {
            return Err(Error::contract(format!(
                "gamble {} has {} payoffs, expected {n}",
                i + 1,
                members[i].len()
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[Gamble] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_omega(&self) -> usize {
        self.members[0].len()
    }

    pub fn get(&self, i: usize) -> &Gamble {
        &self.members[i]
    }
}

/// Indices of `k` ordered by nonincreasing `E_p`, ties kept in original order.
pub fn sort_by_expectation(k: &GambleSet, p: &Pmf) -> Result<Vec<usize>> {
    let values = k
        .members()
        .iter()
        .map(|f| expectation(p, f))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..k.len()).collect();
    // sort_by is stable
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    Ok(order)
}
