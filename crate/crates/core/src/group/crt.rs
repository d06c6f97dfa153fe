use crate::arith::{inv_mod, is_prime, mul_mod};
use crate::error::{Error, Result};

use super::GroupSpec;

/// CRT isomorphism `Z_m ≅ Z_{p1} x ... x Z_{pn}` for squarefree `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtSplit {
    modulus: u64,
    primes: Vec<u64>,
    product: GroupSpec,
    /// `e_i ≡ 1 (mod p_i)`, `e_i ≡ 0 (mod p_j)` for `j != i`.
    idempotents: Vec<u64>,
}

/// Validates the supplied factorization of `m` and returns the split.
pub fn crt_split(m: u64, primes: &[u64]) -> Result<CrtSplit> {
    CrtSplit::new(m, primes)
}

impl CrtSplit {
    pub fn new(m: u64, primes: &[u64]) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::InvalidFactorization("empty prime list".into()));
        }
        let mut sorted = primes.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFactorization(format!(
                "primes {primes:?} are not distinct"
            )));
        }
        if let Some(&bad) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(bad));
        }
        let product = primes
            .iter()
            .try_fold(1u64, |acc, &p| acc.checked_mul(p))
            .ok_or(Error::OrderOverflow)?;
        if product != m {
            return Err(Error::InvalidFactorization(format!(
                "product of {primes:?} is {product}, not {m}"
            )));
        }
        let idempotents = primes
            .iter()
            .map(|&p| {
                let rest = m / p;
                // p is prime and does not divide rest, so the inverse exists
                let inv = inv_mod(rest % p, p).expect("coprime factors");
                mul_mod(rest, inv, m)
            })
            .collect();
        Ok(CrtSplit {
            modulus: m,
            primes: primes.to_vec(),
            product: GroupSpec::new(primes)?,
            idempotents,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn product_group(&self) -> &GroupSpec {
        &self.product
    }

    /// Residue vector `(y mod p_1, ..., y mod p_n)`.
    pub fn to_vector(&self, y: u64) -> Vec<u64> {
        self.primes.iter().map(|&p| y % p).collect()
    }

    pub fn from_vector(&self, v: &[u64]) -> Result<u64> {
        if v.len() != self.primes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.primes.len(),
                got: v.len(),
            });
        }
        let m = self.modulus;
        let mut acc = 0u64;
        for ((&r, &p), &e) in v.iter().zip(&self.primes).zip(&self.idempotents) {
            if r >= p {
                return Err(Error::CoordinateOutOfRange {
                    value: r,
                    modulus: p,
                });
            }
            acc = ((acc as u128 + mul_mod(r, e, m) as u128) % m as u128) as u64;
        }
        Ok(acc)
    }

    /// Residue in `Z_m` → index in the product group.
    pub fn to_index(&self, y: u64) -> usize {
        self.product
            .index_of(&self.to_vector(y % self.modulus).into())
            .expect("residues are in range")
    }

    /// Index in the product group → residue in `Z_m`.
    pub fn from_index(&self, index: usize) -> Result<u64> {
        let v = self.product.element_at(index)?;
        self.from_vector(&v.coords)
    }
}
