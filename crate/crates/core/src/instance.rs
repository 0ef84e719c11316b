//! Line-oriented instance format, version 1.
//!
//! ```text
//! # comment
//! omega <N>
//! dom <M>
//! g <N reals> | <price>      (M lines)
//! set <K>
//! f <N reals>                (K lines)
//! ```
//!
//! Blank lines and anything after `#` are ignored. Numbers are written with
//! Rust's shortest round-trip formatting, so write-then-parse is lossless.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::prevision::{Gamble, GambleSet, LowerPrevision, PossibilitySpace};

/// A decision problem: a lower prevision and the gambles to choose from.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub prevision: LowerPrevision,
    pub gambles: GambleSet,
}

impl Instance {
    pub fn new(prevision: LowerPrevision, gambles: GambleSet) -> Result<Self> {
        if gambles.n_omega() != prevision.n_omega() {
            return Err(Error::contract(format!(
                "gambles have {} outcomes, prevision has {}",
                gambles.n_omega(),
                prevision.n_omega()
            )));
        }
        Ok(Self { prevision, gambles })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).parse()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let n = self.prevision.n_omega();
        let _ = writeln!(out, "omega {n}");
        let _ = writeln!(out, "dom {}", self.prevision.len());
        for (g, price) in self.prevision.entries() {
            out.push('g');
            for v in g.payoffs() {
                let _ = write!(out, " {v}");
            }
            let _ = writeln!(out, " | {price}");
        }
        let _ = writeln!(out, "set {}", self.gambles.len());
        for f in self.gambles.members() {
            out.push('f');
            for v in f.payoffs() {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

struct Parser<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let content = raw.split('#').next().unwrap_or("");
                let fields: Vec<&str> = content.split_whitespace().collect();
                (!fields.is_empty()).then_some((i + 1, fields))
            })
            .collect();
        Self { lines, pos: 0 }
    }

    fn next_line(&mut self, expected: &str) -> Result<(usize, Vec<&'a str>)> {
        let Some(line) = self.lines.get(self.pos).cloned() else {
            let last = self.lines.last().map_or(0, |l| l.0);
            return Err(Error::Parse {
                line: last + 1,
                field: 1,
                message: format!("unexpected end of input, expected `{expected}`"),
            });
        };
        self.pos += 1;
        if line.1[0] != expected {
            return Err(Error::Parse {
                line: line.0,
                field: 1,
                message: format!("expected `{expected}`, found `{}`", line.1[0]),
            });
        }
        Ok(line)
    }

    fn count(&mut self, keyword: &str) -> Result<usize> {
        let (line, fields) = self.next_line(keyword)?;
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                field: fields.len().min(3),
                message: format!("`{keyword}` takes exactly one count"),
            });
        }
        let n: usize = fields[1].parse().map_err(|_| Error::Parse {
            line,
            field: 2,
            message: format!("invalid count `{}`", fields[1]),
        })?;
        if n == 0 {
            return Err(Error::Parse {
                line,
                field: 2,
                message: format!("`{keyword}` count must be positive"),
            });
        }
        Ok(n)
    }

    fn reals(line: usize, fields: &[&str], offset: usize, n: usize) -> Result<Vec<f64>> {
        if fields.len() != n {
            return Err(Error::Parse {
                line,
                field: offset + fields.len().min(n) + 1,
                message: format!("expected {n} payoffs, found {}", fields.len()),
            });
        }
        fields
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let v: f64 = s.parse().map_err(|_| Error::Parse {
                    line,
                    field: offset + i + 1,
                    message: format!("invalid number `{s}`"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        field: offset + i + 1,
                        message: format!("non-finite number `{s}`"),
                    });
                }
                Ok(v)
            })
            .collect()
    }

    fn parse(mut self) -> Result<Instance> {
        let n = self.count("omega")?;
        let m = self.count("dom")?;
        let mut entries = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, fields) = self.next_line("g")?;
            let Some(bar) = fields.iter().position(|f| *f == "|") else {
                return Err(Error::Parse {
                    line,
                    field: fields.len(),
                    message: "missing `|` before price".into(),
                });
            };
            let payoffs = Self::reals(line, &fields[1..bar], 1, n)?;
            let price_fields = &fields[bar + 1..];
            if price_fields.len() != 1 {
                return Err(Error::Parse {
                    line,
                    field: bar + 2,
                    message: "expected exactly one price after `|`".into(),
                });
            }
            let price = Self::reals(line, price_fields, bar + 1, 1)?[0];
            entries.push((Gamble::new(payoffs)?, price));
        }
        let k = self.count("set")?;
        let mut members = Vec::with_capacity(k);
        for _ in 0..k {
            let (line, fields) = self.next_line("f")?;
            members.push(Gamble::new(Self::reals(line, &fields[1..], 1, n)?)?);
        }
        if let Some((line, _)) = self.lines.get(self.pos) {
            return Err(Error::Parse {
                line: *line,
                field: 1,
                message: "trailing content after gamble set".into(),
            });
        }
        let prevision = LowerPrevision::new(PossibilitySpace::new(n)?, entries)?;
        Instance::new(prevision, GambleSet::new(members)?)
    }
}
