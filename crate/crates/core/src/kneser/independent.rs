use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{int, is_prime, rational, serialize_rational, Rational, Surd};
use crate::error::{Error, Result};
use crate::group::{ElementSet, GroupSpec};

use super::HammingBall;

/// `f(x) = Σ_{x_i ≠ 0} (p − x_i)/(p − 1)`; for `p = 2` this is the Hamming weight.
pub fn weight_f(p: u64, x: &[u64]) -> Rational {
    rational(weight_numerator(p, x) as i128, p as i128 - 1)
}

/// `(p − 1)·f(x)`, an integer.
fn weight_numerator(p: u64, x: &[u64]) -> u64 {
    x.iter().filter(|&&c| c != 0).map(|&c| p - c).sum()
}

/// `I_λ = {x : f(x) <= n/2 − λ√n, f(−x) <= n/2 − λ√n}`, independent in
/// `Cay(Z_p^n, S_λ)` where `S_λ` is the Hamming ball of radius `λ√n` around `𝟙`.
///
/// `λ = p` is the paper-scale choice; for `p = 2` the default `λ = 1` gives
/// the Kříž–Ruzsa set `{wt(x) <= n/2 − √n}`. At small `n` the paper-scale
/// threshold is negative and the set is empty (reported as degenerate).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependentSetParams {
    pub p: u64,
    pub n: u32,
    #[serde(serialize_with = "serialize_rational")]
    pub lambda: Rational,
}

impl IndependentSetParams {
    pub fn standard(p: u64, n: u32) -> Result<Self> {
        let lambda = if p == 2 { int(1) } else { int(p as i128) };
        Self::scaled(p, n, lambda)
    }

    pub fn scaled(p: u64, n: u32, lambda: Rational) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if lambda <= int(0) {
            return Err(Error::OutOfRange("λ must be positive".into()));
        }
        Ok(IndependentSetParams { p, n, lambda })
    }

    /// `n/2 − λ√n`.
    pub fn threshold(&self) -> Surd {
        Surd::new(rational(self.n as i128, 2), -self.lambda, self.n as u64)
    }

    pub fn is_degenerate(&self) -> bool {
        self.threshold().is_negative()
    }

    /// The matching connection set `S_λ`.
    pub fn ball(&self) -> Result<HammingBall> {
        HammingBall::scaled(self.p, self.n, self.lambda)
    }
}

#[derive(Clone, Debug)]
pub struct IndependentSet {
    params: IndependentSetParams,
    /// `(p − 1)·threshold`, compared against integer weight numerators.
    scaled_threshold: Surd,
}

impl IndependentSet {
    pub fn new(params: &IndependentSetParams) -> Self {
        IndependentSet {
            scaled_threshold: params.threshold().scale(int(params.p as i128 - 1)),
            params: params.clone(),
        }
    }

    pub fn params(&self) -> &IndependentSetParams {
        &self.params
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        let p = self.params.p;
        let w = weight_numerator(p, x);
        if !self.scaled_threshold.admits_le(&int(w as i128)) {
            return false;
        }
        let wneg: u64 = x.iter().filter(|&&c| c != 0).map(|&c| c).sum();
        self.scaled_threshold.admits_le(&int(wneg as i128))
    }

    pub fn group(&self) -> Result<GroupSpec> {
        GroupSpec::power(self.params.p, self.params.n as usize)
    }

    /// Materializes `I` over `Z_p^n` (subject to the element-set cap).
    pub fn to_element_set(&self) -> Result<ElementSet> {
        let g = self.group()?;
        let n = self.params.n as usize;
        let mut coords = vec![0u64; n];
        ElementSet::from_predicate(&g, |i| {
            for (j, c) in coords.iter_mut().enumerate() {
                *c = g.coord_of_index(i, j);
            }
            self.contains(&coords)
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceCheck {
    pub params: IndependentSetParams,
    pub threshold: Surd,
    pub degenerate: bool,
    pub order: usize,
    pub size: usize,
    pub density: f64,
    pub ball_size: usize,
    pub difference_set_size: usize,
    /// `|(I − I) ∩ S|`.
    pub violations: usize,
    pub witness: Option<(Vec<u64>, Vec<u64>)>,
}

/// Materializes `I` and `S_λ` and checks `(I − I) ∩ S_λ = ∅` exhaustively.
pub fn check_independent_exhaustive(params: &IndependentSetParams) -> Result<IndependenceCheck> {
    let set = IndependentSet::new(params);
    let g = set.group()?;
    let members = set.to_element_set()?;
    let ball = params.ball()?.to_element_set()?;
    let diff = members.difference_set(&members)?;
    let bad = diff.intersection(&ball)?;
    let witness = bad.iter().next().map(|s| {
        let pair = members
            .iter()
            .find_map(|y| {
                let x = g.add_index(s, y);
                members.contains(x).then_some((x, y))
            })
            .expect("s lies in I − I");
        let coords = |i: usize| {
            (0..params.n as usize)
                .map(|j| g.coord_of_index(i, j))
                .collect()
        };
        (coords(pair.0), coords(pair.1))
    });
    Ok(IndependenceCheck {
        params: params.clone(),
        threshold: params.threshold(),
        degenerate: params.is_degenerate(),
        order: g.order(),
        size: members.len(),
        density: members.density(),
        ball_size: ball.len(),
        difference_set_size: diff.len(),
        violations: bad.len(),
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityEstimate {
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    /// Wilson score interval at the given normal quantile.
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
    pub seed: u64,
}

/// Monte Carlo estimate of `|I|/p^n` for sizes too large to enumerate.
pub fn estimate_independent_density(
    params: &IndependentSetParams,
    samples: u64,
    seed: u64,
) -> DensityEstimate {
    let set = IndependentSet::new(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0u64; params.n as usize];
    let mut hits = 0u64;
    for _ in 0..samples {
        for c in x.iter_mut() {
            *c = rng.random_range(0..params.p);
        }
        if set.contains(&x) {
            hits += 1;
        }
    }
    let z = 1.96;
    let (lo, hi) = wilson(hits, samples, z);
    DensityEstimate {
        samples,
        hits,
        estimate: if samples == 0 {
            0.0
        } else {
            hits as f64 / samples as f64
        },
        ci_low: lo,
        ci_high: hi,
        z,
        seed,
    }
}

fn wilson(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let ph = hits as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (ph + z * z / (2.0 * n)) / denom;
    let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
