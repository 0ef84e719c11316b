//! Decision making with lower previsions: natural extension by a stepwise
//! interior-point method and the Γ-maximin, Γ-maximax and interval-dominance
//! criteria, including early-stopping and elimination variants.

pub mod bench;
pub mod criteria;
pub mod error;
pub mod generators;
pub mod instance;
pub mod linprog;
pub mod natex;
pub mod oracle;
pub mod prevision;

pub use error::{Error, Result};
pub use instance::Instance;
pub use prevision::{Gamble, GambleSet, LowerPrevision, Pmf, PossibilitySpace};
