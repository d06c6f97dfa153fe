//! Homogeneous linear equations `c1·x1 + ... + ck·xk = 0`, their
//! zero-sum classification, solution-freeness tests and solution counting.

mod fourier;
mod solutions;

pub use fourier::{
    count_solutions_dft, dft, dft_direct, inverse_dft, solution_counts_dft, Spectrum,
    DEFAULT_DFT_CAP,
};
pub use solutions::{
    count_duplicate_solutions_brute, count_solutions_brute, count_solutions_injective,
    find_injective_solution, is_solution_free, is_solution_free_in, solution_histogram_brute,
    SolutionSearch, DEFAULT_BRUTE_CAP, DEFAULT_SEARCH_BUDGET,
};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `k` for which [`classify`] runs its exponential subset scan.
pub const MAX_CLASSIFY_K: usize = 30;

/// Nonzero integer coefficients `(c1, ..., ck)` with `k >= 3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    coeffs: Vec<i64>,
}

impl Equation {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::InvalidEquation(format!(
                "need at least 3 variables, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|&c| c == 0) {
            return Err(Error::InvalidEquation(format!(
                "coefficient c{} is zero",
                i + 1
            )));
        }
        if coeffs
            .iter()
            .any(|&c| c == i64::MIN || c.unsigned_abs() > 1 << 40)
        {
            return Err(Error::InvalidEquation(
                "coefficient magnitude too large".into(),
            ));
        }
        Ok(Equation { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    /// `C = Σ c_i`
    pub fn coeff_sum(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// `D = Σ |c_i|`
    pub fn abs_sum(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn max_abs(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn negated(&self) -> Equation {
        Equation {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Reorders variables: new variable `i` is old variable `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Equation> {
        let mut seen = vec![false; self.k()];
        if perm.len() != self.k() {
            return Err(Error::InvalidEquation("permutation length mismatch".into()));
        }
        for &p in perm {
            if p >= self.k() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidEquation(format!(
                    "{perm:?} is not a permutation"
                )));
            }
        }
        Equation::new(perm.iter().map(|&p| self.coeffs[p]).collect())
    }

    /// Evaluates `Σ c_i x_i` in `Z_modulus`.
    pub fn evaluate_mod(&self, xs: &[u64], modulus: u64) -> u64 {
        let m = modulus as i128;
        let s: i128 = self
            .coeffs
            .iter()
            .zip(xs)
            .map(|(&c, &x)| (c as i128 * x as i128).rem_euclid(m))
            .sum();
        s.rem_euclid(m) as u64
    }

    /// Parses `[1,1,-1]` or `1*x1 + 1*x2 - 1*x3 = 0` (also `x1 - 2x2 + 3x3 = 0`).
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('[') {
            let inner = t
                .strip_prefix('[')
                .and_then(|x| x.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("unterminated coefficient list {s:?}")))?;
            let coeffs = inner
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Equation::new(coeffs);
        }
        parse_linear_form(t)
    }
}

fn parse_linear_form(s: &str) -> Result<Equation> {
    let bad = |why: &str| Error::Parse(format!("{why} in equation {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let lhs = match compact.split_once('=') {
        Some((lhs, rhs)) => {
            if rhs != "0" {
                return Err(bad("right-hand side must be 0"));
            }
            lhs
        }
        None => compact.as_str(),
    };
    let mut terms: Vec<(usize, i64)> = Vec::new();
    let mut rest = lhs;
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1i64, &rest[1..]),
            b'-' => (-1i64, &rest[1..]),
            _ if terms.is_empty() => (1i64, rest),
            _ => return Err(bad("missing operator")),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        let (coef, var) = term
            .split_once('x')
            .ok_or_else(|| bad("term without variable"))?;
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c: i64 = if coef.is_empty() {
            1
        } else {
            coef.parse().map_err(|_| bad("bad coefficient"))?
        };
        let idx: usize = var.parse().map_err(|_| bad("bad variable index"))?;
        if idx == 0 {
            return Err(bad("variables are numbered from x1"));
        }
        terms.push((idx, sign * c));
    }
    terms.sort_by_key(|t| t.0);
    for (pos, &(idx, _)) in terms.iter().enumerate() {
        if idx != pos + 1 {
            return Err(bad("variables must be x1..xk, each exactly once"));
        }
    }
    Equation::new(terms.into_iter().map(|t| t.1).collect())
}

impl FromStr for Equation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Equation::parse(s)
    }
}

impl fmt::Display for Equation {
    /// `x1 - 2*x2 + 3*x3 = 0`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &c) in self.coeffs.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "{}*x{}", c.abs(), i + 1)?;
            }
        }
        write!(f, " = 0")
    }
}

/// Zero-sum structure of the coefficient multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationClass {
    /// `Σ c_i = 0`.
    pub roth_degenerate: bool,
    /// Some nonempty subset sums to zero.
    pub rt_degenerate: bool,
    /// Some subset of size at least three sums to zero.
    pub chi_vanishing: bool,
    /// Lexicographically first zero-sum subset (0-based indices).
    pub rt_witness: Option<Vec<usize>>,
    /// Lexicographically first zero-sum subset of size >= 3 (0-based indices).
    pub chi_witness: Option<Vec<usize>>,
}

/// JSON shape of a classification: witness indices are 1-based variable numbers.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClassificationReport {
    pub roth: bool,
    pub rt: bool,
    pub chi_vanishing: bool,
    pub witness_subset: Option<Vec<usize>>,
}

impl EquationClass {
    pub fn report(&self) -> ClassificationReport {
        let w = self.chi_witness.as_ref().or(self.rt_witness.as_ref());
        ClassificationReport {
            roth: self.roth_degenerate,
            rt: self.rt_degenerate,
            chi_vanishing: self.chi_vanishing,
            witness_subset: w.map(|v| v.iter().map(|i| i + 1).collect()),
        }
    }
}

pub fn classify(eq: &Equation) -> Result<EquationClass> {
    let k = eq.k();
    if k > MAX_CLASSIFY_K {
        return Err(Error::CapExceeded {
            what: "subset scan over coefficients",
            size: k as u128,
            cap: MAX_CLASSIFY_K as u128,
        });
    }
    let c = eq.coeffs();
    // suffix bounds on reachable partial sums, for pruning
    let mut pos_tail = vec![0i64; k + 1];
    let mut neg_tail = vec![0i64; k + 1];
    for i in (0..k).rev() {
        pos_tail[i] = pos_tail[i + 1] + c[i].max(0);
        neg_tail[i] = neg_tail[i + 1] + c[i].min(0);
    }

    struct Search<'a> {
        c: &'a [i64],
        pos_tail: Vec<i64>,
        neg_tail: Vec<i64>,
        stack: Vec<usize>,
        rt: Option<Vec<usize>>,
        chi: Option<Vec<usize>>,
    }
    impl Search<'_> {
        // preorder over increasing index sequences = lexicographic order
        fn go(&mut self, next: usize, sum: i64) -> bool {
            if !self.stack.is_empty() && sum == 0 {
                if self.rt.is_none() {
                    self.rt = Some(self.stack.clone());
                }
                if self.chi.is_none() && self.stack.len() >= 3 {
                    self.chi = Some(self.stack.clone());
                }
                if self.rt.is_some() && self.chi.is_some() {
                    return true;
                }
            }
            for i in next..self.c.len() {
                let s = sum + self.c[i];
                let lo = s + self.neg_tail[i + 1];
                let hi = s + self.pos_tail[i + 1];
                if lo > 0 || hi < 0 {
                    continue;
                }
                self.stack.push(i);
                let done = self.go(i + 1, s);
                self.stack.pop();
                if done {
                    return true;
                }
            }
            false
        }
    }

    let mut search = Search {
        c,
        pos_tail,
        neg_tail,
        stack: Vec::new(),
        rt: None,
        chi: None,
    };
    search.go(0, 0);
    let roth = eq.coeff_sum() == 0;
    Ok(EquationClass {
        roth_degenerate: roth,
        rt_degenerate: search.rt.is_some(),
        chi_vanishing: search.chi.is_some(),
        rt_witness: search.rt,
        chi_witness: search.chi,
    })
}
