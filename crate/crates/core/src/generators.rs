//! Seeded instance generation.
//!
//! Every draw comes from a ChaCha8 stream keyed by `(seed, instance)`, with a
//! separate stream per purpose, so instances can be generated in any order or
//! concurrently and still come out identical.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linprog::IpmParams;
use crate::natex::{interior_credal_point, natex_with_start, Sense};
use crate::oracle::{oracle_opt_sets, ORACLE_TOL};
use crate::prevision::{expectation, Gamble, GambleSet, LowerPrevision, Pmf, PossibilitySpace};

/// Threshold the controlled maximin gambles are translated to.
pub const TARGET: f64 = 0.5;
const MAX_RETRIES: usize = 20;
const NATEX_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    /// Substream index; instance `i` of a benchmark uses `instance = i`.
    pub instance: u64,
    pub n_omega: usize,
    pub dom_size: usize,
    pub k: usize,
    /// Number of pmfs whose lower envelope defines the prevision.
    pub s_coherent: usize,
    /// Table label `a`–`j`; `None` for a uniform gamble set.
    pub option: Option<char>,
    pub margin: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instance: 0,
            n_omega: 4,
            dom_size: 4,
            k: 4,
            s_coherent: 16,
            option: None,
            margin: 1e-3,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n_omega", self.n_omega),
            ("dom_size", self.dom_size),
            ("k", self.k),
            ("s_coherent", self.s_coherent),
        ] {
            if v == 0 {
                return Err(Error::Argument(format!("{name} must be at least 1")));
            }
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::Argument("margin must be positive".into()));
        }
        if let Some(label) = self.option {
            option_for(self.k, label)?;
        }
        Ok(())
    }

    fn rng(&self, purpose: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.instance.wrapping_mul(4).wrapping_add(purpose));
        rng
    }
}

/// One row of the option table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableOption {
    pub label: char,
    /// Number of Γ-maximin gambles.
    pub maximin: usize,
    /// Number of interval-dominant gambles.
    pub dominant: usize,
}

/// The ten `(ℓ, n)` options for a set of `k` gambles. For `k` = 16, 64 and
/// 256 these are the tabulated values; other sizes use `round(k/3)` and
/// `round(2k/3)`.
pub fn option_grid(k: usize) -> Vec<TableOption> {
    let (m1, m2) = match k {
        16 => (5, 11),
        64 => (21, 42),
        256 => (85, 170),
        _ => {
            let m1 = ((k as f64) / 3.0).round().max(1.0) as usize;
            let m2 = ((2.0 * k as f64) / 3.0).round().max(m1 as f64) as usize;
            (m1.min(k), m2.min(k))
        }
    };
    let pairs = [
        (1, 1),
        (1, m1),
        (1, m2),
        (1, k),
        (m1, m1),
        (m1, m2),
        (m1, k),
        (m2, m2),
        (m2, k),
        (k, k),
    ];
    pairs
        .iter()
        .zip('a'..='j')
        .map(|(&(maximin, dominant), label)| TableOption {
            label,
            maximin,
            dominant,
        })
        .collect()
}

/// Looks up option `label` for `k` gambles.
pub fn option_for(k: usize, label: char) -> Result<TableOption> {
    option_grid(k)
        .into_iter()
        .find(|o| o.label == label)
        .ok_or_else(|| Error::Argument(format!("unknown option `{label}`; valid: a-j")))
}

/// Uniform point on the probability simplex.
fn simplex_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn uniform_gamble(rng: &mut ChaCha8Rng, n: usize) -> Gamble {
    Gamble::new((0..n).map(|_| rng.random::<f64>()).collect()).expect("finite payoffs")
}

/// Lower envelope of `s_coherent` uniform pmfs over `dom_size` uniform
/// gambles. Avoids sure loss since each pmf lies in the credal set.
pub fn gen_lower_prevision(cfg: &GenConfig) -> Result<LowerPrevision> {
    gen_envelope(cfg).map(|(p, _)| p)
}

/// [`gen_lower_prevision`] together with the pmfs it envelopes.
pub fn gen_envelope(cfg: &GenConfig) -> Result<(LowerPrevision, Vec<Pmf>)> {
    cfg.validate()?;
    let mut rng = cfg.rng(0);
    let pmfs = (0..cfg.s_coherent)
        .map(|_| Pmf::new(simplex_point(&mut rng, cfg.n_omega)))
        .collect::<Result<Vec<_>>>()?;
    let entries = (0..cfg.dom_size)
        .map(|_| {
            let g = uniform_gamble(&mut rng, cfg.n_omega);
            let low = pmfs
                .iter()
                .map(|p| expectation(p, &g))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok((g, low))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        LowerPrevision::new(PossibilitySpace::new(cfg.n_omega)?, entries)?,
        pmfs,
    ))
}

/// `k` gambles with i.i.d. uniform `[0, 1]` payoffs.
pub fn gen_gamble_set(cfg: &GenConfig) -> Result<GambleSet> {
    cfg.validate()?;
    let mut rng = cfg.rng(1);
    GambleSet::new(
        (0..cfg.k)
            .map(|_| uniform_gamble(&mut rng, cfg.n_omega))
            .collect(),
    )
}

/// Gamble set with exactly the option's number of Γ-maximin and
/// interval-dominant gambles under `prevision`, checked by the oracle.
///
/// Maximin gambles are translated to `E = t`; the other dominant ones get
/// imprecision at least `2·margin` and `E = t − margin`; the rest get
/// `Ē = t − margin`.
pub fn gen_controlled_set(cfg: &GenConfig, prevision: &LowerPrevision) -> Result<GambleSet> {
    cfg.validate()?;
    let label = cfg
        .option
        .ok_or_else(|| Error::Argument("controlled generation needs an option".into()))?;
    let opt = option_for(cfg.k, label)?;
    if prevision.n_omega() != cfg.n_omega {
        return Err(Error::contract("prevision and config disagree on |Ω|"));
    }
    let start = interior_credal_point(prevision)?;
    let params = IpmParams::default();
    let bounds = |f: &Gamble| -> Result<(f64, f64)> {
        Ok((
            natex_with_start(prevision, &start, f, Sense::Lower, NATEX_EPS, params)?,
            natex_with_start(prevision, &start, f, Sense::Upper, NATEX_EPS, params)?,
        ))
    };
    let mut rng = cfg.rng(2);
    let t = TARGET;
    let m = cfg.margin;
    for _ in 0..MAX_RETRIES {
        let mut gambles = Vec::with_capacity(cfg.k);
        for i in 0..cfg.k {
            let mut f = uniform_gamble(&mut rng, cfg.n_omega);
            let (mut lo, hi) = bounds(&f)?;
            if i < opt.maximin {
                gambles.push(f.affine(1.0, t - lo));
            } else if i < opt.dominant {
                let width = hi - lo;
                if width < 2.0 * m {
                    if width <= 0.0 {
                        return Err(Error::Generation(
                            "credal set gives a precise gamble; cannot straddle the threshold"
                                .into(),
                        ));
                    }
                    let a = (2.0 * m + 1e-3) / width;
                    f = f.affine(a, 0.0);
                    lo *= a;
                }
                gambles.push(f.affine(1.0, t - m - lo));
            } else {
                gambles.push(f.affine(1.0, t - m - hi));
            }
        }
        gambles.shuffle(&mut rng);
        let set = GambleSet::new(gambles)?;
        let o = oracle_opt_sets(prevision, &set, ORACLE_TOL)?;
        if o.maximin.len() == opt.maximin && o.interval_dominant.len() == opt.dominant {
            return Ok(set);
        }
    }
    Err(Error::Generation(format!(
        "no set with ({}, {}) after {MAX_RETRIES} attempts",
        opt.maximin, opt.dominant
    )))
}

/// Prevision plus either a uniform or a controlled gamble set.
pub fn gen_instance(cfg: &GenConfig) -> Result<Instance> {
    let prevision = gen_lower_prevision(cfg)?;
    let gambles = match cfg.option {
        Some(_) => gen_controlled_set(cfg, &prevision)?,
        None => gen_gamble_set(cfg)?,
    };
    Instance::new(prevision, gambles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natex::interior_credal_point;

    fn cfg(n: usize, d: usize, k: usize) -> GenConfig {
        GenConfig {
            seed: 42,
            n_omega: n,
            dom_size: d,
            k,
            ..GenConfig::default()
        }
    }

    #[test]
    fn table_values() {
        let cols = |k| {
            option_grid(k)
                .iter()
                .map(|o| (o.maximin, o.dominant))
                .collect::<Vec<_>>()
        };
        assert_eq!(
            cols(16),
            vec![
                (1, 1),
                (1, 5),
                (1, 11),
                (1, 16),
                (5, 5),
                (5, 11),
                (5, 16),
                (11, 11),
                (11, 16),
                (16, 16)
            ]
        );
        let n64: Vec<usize> = option_grid(64).iter().map(|o| o.dominant).collect();
        assert_eq!(&n64[..4], &[1, 21, 42, 64]);
        let m256: Vec<usize> = option_grid(256).iter().map(|o| o.maximin).collect();
        assert!(m256.contains(&85) && m256.contains(&170) && m256.contains(&256));
        assert_eq!(option_for(16, 'f').unwrap().dominant, 11);
        assert!(option_for(16, 'z').is_err());
    }

    #[test]
    fn single_pmf_envelope_is_its_expectation() {
        let c = GenConfig {
            s_coherent: 1,
            ..cfg(5, 1, 1)
        };
        let p = gen_lower_prevision(&c).unwrap();
        let mut rng = c.rng(0);
        let pmf = Pmf::new(simplex_point(&mut rng, 5)).unwrap();
        let g = uniform_gamble(&mut rng, 5);
        assert_eq!(p.entries()[0].0, g);
        assert_eq!(p.entries()[0].1, expectation(&pmf, &g).unwrap());
    }

    #[test]
    fn generated_previsions_avoid_sure_loss() {
        for seed in 0..10 {
            let c = GenConfig {
                seed,
                ..cfg(8, 8, 1)
            };
            assert!(interior_credal_point(&gen_lower_prevision(&c).unwrap()).is_ok());
        }
    }

    #[test]
    fn uniform_sets_are_reproducible_and_in_range() {
        let c = cfg(6, 2, 9);
        let a = gen_gamble_set(&c).unwrap();
        assert_eq!(a, gen_gamble_set(&c).unwrap());
        assert!(a
            .members()
            .iter()
            .flat_map(|g| g.payoffs())
            .all(|v| (0.0..=1.0).contains(v)));
        let other = GenConfig { instance: 1, ..c };
        assert_ne!(a, gen_gamble_set(&other).unwrap());
    }

    #[test]
    fn large_uniform_set_is_fast() {
        let t = std::time::Instant::now();
        let set = gen_gamble_set(&cfg(1024, 1, 1024)).unwrap();
        assert_eq!(set.len(), 1024);
        assert!(t.elapsed().as_secs_f64() < 1.0);
    }

    #[test]
    fn controlled_options_a_and_j() {
        for (label, l, n) in [('a', 1, 1), ('j', 16, 16), ('f', 5, 11)] {
            let c = GenConfig {
                option: Some(label),
                ..cfg(16, 16, 16)
            };
            let inst = gen_instance(&c).unwrap();
            let o = oracle_opt_sets(&inst.prevision, &inst.gambles, ORACLE_TOL).unwrap();
            assert_eq!(
                (o.maximin.len(), o.interval_dominant.len()),
                (l, n),
                "option {label}"
            );
        }
    }

    #[test]
    fn rejects_zero_sizes() {
        assert!(matches!(
            gen_lower_prevision(&cfg(0, 1, 1)),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            gen_gamble_set(&cfg(1, 1, 0)),
            Err(Error::Argument(_))
        ));
    }
}
