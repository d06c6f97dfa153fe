//! Group literals used in configs and file headers.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! literal := factor ( ("x" | "×") factor )*
//! factor  := "Z(" n ")" [ "^" r ]
//!          | "Zm(" m ")" [ "[" p1 "," p2 ... "]" ]
//! ```
//!
//! `Zm(m)` is the cyclic group `Z_m` carrying its CRT split; without an
//! explicit prime list the factorization is computed and must be squarefree.

use std::fmt;
use std::str::FromStr;

use crate::arith::factorize;
use crate::error::{Error, Result};

use super::{CrtSplit, GroupSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLiteral {
    pub spec: GroupSpec,
    pub crt: Option<CrtSplit>,
}

impl GroupLiteral {
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty group literal".into()));
        }
        if let Some(rest) = compact.strip_prefix("Zm(") {
            return parse_zm(rest, s);
        }
        let mut moduli = Vec::new();
        for factor in compact.split(['x', '×']) {
            moduli.extend(parse_factor(factor, s)?);
        }
        Ok(GroupLiteral {
            spec: GroupSpec::new(&moduli)?,
            crt: None,
        })
    }
}

fn bad(s: &str) -> Error {
    Error::Parse(format!("invalid group literal {s:?}"))
}

fn parse_factor(factor: &str, whole: &str) -> Result<Vec<u64>> {
    let body = factor.strip_prefix("Z(").ok_or_else(|| bad(whole))?;
    let (n, tail) = body.split_once(')').ok_or_else(|| bad(whole))?;
    let n: u64 = n.parse().map_err(|_| bad(whole))?;
    let reps = if tail.is_empty() {
        1
    } else {
        let r = tail.strip_prefix('^').ok_or_else(|| bad(whole))?;
        r.parse::<usize>().map_err(|_| bad(whole))?
    };
    if reps == 0 {
        return Err(bad(whole));
    }
    Ok(vec![n; reps])
}

fn parse_zm(rest: &str, whole: &str) -> Result<GroupLiteral> {
    let (m, tail) = rest.split_once(')').ok_or_else(|| bad(whole))?;
    let m: u64 = m.parse().map_err(|_| bad(whole))?;
    let primes: Vec<u64> = if tail.is_empty() {
        let f = factorize(m);
        if f.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFactorization(format!(
                "{m} is not squarefree"
            )));
        }
        f
    } else {
        let inner = tail
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| bad(whole))?;
        inner
            .split(',')
            .map(|p| p.parse::<u64>().map_err(|_| bad(whole)))
            .collect::<Result<_>>()?
    };
    let crt = CrtSplit::new(m, &primes)?;
    Ok(GroupLiteral {
        spec: GroupSpec::cyclic(m)?,
        crt: Some(crt),
    })
}

impl FromStr for GroupLiteral {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GroupLiteral::parse(s)
    }
}

impl fmt::Display for GroupLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.crt {
            Some(c) => {
                let ps: Vec<String> = c.primes().iter().map(|p| p.to_string()).collect();
                write!(f, "Zm({})[{}]", c.modulus(), ps.join(","))
            }
            None => write!(f, "{}", self.spec),
        }
    }
}

impl From<GroupSpec> for GroupLiteral {
    fn from(spec: GroupSpec) -> Self {
        GroupLiteral { spec, crt: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let g = GroupLiteral::parse("Z(7)").unwrap();
        assert_eq!(g.spec.moduli(), &[7]);
        let g = GroupLiteral::parse("Z(3)^4").unwrap();
        assert_eq!(g.spec.order(), 81);
        assert_eq!(g.to_string(), "Z(3)^4");
        let g = GroupLiteral::parse("Z(2) x Z(3)^2").unwrap();
        assert_eq!(g.spec.moduli(), &[2, 3, 3]);
        let g = GroupLiteral::parse("Zm(15015)").unwrap();
        assert_eq!(g.crt.as_ref().unwrap().primes(), &[3, 5, 7, 11, 13]);
        assert_eq!(g.spec.order(), 15015);
        assert_eq!(g.to_string(), "Zm(15015)[3,5,7,11,13]");
        let again = GroupLiteral::parse(&g.to_string()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn rejects() {
        assert!(GroupLiteral::parse("Z(1)").is_err());
        assert!(GroupLiteral::parse("Zm(12)").is_err());
        assert!(GroupLiteral::parse("Zm(15)[3,7]").is_err());
        assert!(GroupLiteral::parse("Y(3)").is_err());
        assert!(GroupLiteral::parse("Z(3)^0").is_err());
    }
}
