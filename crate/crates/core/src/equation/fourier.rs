use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::{is_prime, reduce};
use crate::error::{Error, Result};
use crate::group::ElementSet;

use super::Equation;

/// Largest `p` accepted by the transforms.
pub const DEFAULT_DFT_CAP: usize = 1 << 21;
/// Below this length the quadratic transform is used.
const DIRECT_CUTOFF: usize = 512;

/// Normalized transform `f̂(ξ) = (1/p) Σ_x f(x) e(-xξ/p)` on `Z_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, xi: u64) -> Complex64 {
        self.values[(xi % self.values.len() as u64) as usize]
    }

    /// Transform of the indicator function of `A ⊆ Z_p`.
    pub fn of_set(set: &ElementSet) -> Result<Spectrum> {
        let p = set.group().cyclic_modulus().ok_or(Error::NotPrimeField)?;
        let mut f = vec![Complex64::new(0.0, 0.0); p as usize];
        for a in set.iter() {
            f[a] = Complex64::new(1.0, 0.0);
        }
        dft(&f)
    }
}

fn roots(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|t| Complex64::from_polar(1.0, sign * TAU * t as f64 / n as f64))
        .collect()
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidModulus(0));
    }
    if n > DEFAULT_DFT_CAP {
        return Err(Error::CapExceeded {
            what: "transform length",
            size: n as u128,
            cap: DEFAULT_DFT_CAP as u128,
        });
    }
    Ok(())
}

/// Quadratic-time reference transform.
pub fn dft_direct(f: &[Complex64]) -> Result<Spectrum> {
    let n = f.len();
    check_len(n)?;
    let w = roots(n, -1.0);
    let values = (0..n)
        .map(|xi| {
            let s: Complex64 = f
                .iter()
                .enumerate()
                .map(|(x, &v)| v * w[(x * xi) % n])
                .sum();
            s / n as f64
        })
        .collect();
    Ok(Spectrum { values })
}

pub fn dft(f: &[Complex64]) -> Result<Spectrum> {
    let n = f.len();
    check_len(n)?;
    if n <= DIRECT_CUTOFF {
        return dft_direct(f);
    }
    let mut buf = f.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    for v in &mut buf {
        *v /= n as f64;
    }
    Ok(Spectrum { values: buf })
}

/// `f(x) = Σ_ξ f̂(ξ) e(xξ/p)`.
pub fn inverse_dft(spec: &Spectrum) -> Result<Vec<Complex64>> {
    let n = spec.values.len();
    check_len(n)?;
    if n <= DIRECT_CUTOFF {
        let w = roots(n, 1.0);
        return Ok((0..n)
            .map(|x| {
                spec.values
                    .iter()
                    .enumerate()
                    .map(|(xi, &v)| v * w[(x * xi) % n])
                    .sum()
            })
            .collect());
    }
    let mut buf = spec.values.clone();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    Ok(buf)
}

fn prime_modulus(set: &ElementSet) -> Result<u64> {
    let p = set.group().cyclic_modulus().ok_or(Error::NotPrimeField)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(p)
}

fn product_spectrum(eq: &Equation, set: &ElementSet, p: u64) -> Result<Spectrum> {
    let ind = Spectrum::of_set(set)?;
    let cs: Vec<u64> = eq.coeffs().iter().map(|&c| reduce(c, p)).collect();
    let values = (0..p)
        .map(|xi| {
            cs.iter()
                .map(|&c| ind.get(((c as u128 * xi as u128) % p as u128) as u64))
                .product()
        })
        .collect();
    Ok(Spectrum { values })
}

/// Admissible distance from the nearest integer for a Fourier count.
fn tolerance(p: u64, k: usize) -> f64 {
    (1e-6 * (p as f64).powi(k as i32 - 1)).min(0.25)
}

fn round_count(z: Complex64, tol: f64) -> Result<u64> {
    let r = z.re.round();
    let residue = (z.re - r).abs().max(z.im.abs());
    if residue > tol || r < 0.0 {
        return Err(Error::NumericInstability {
            residue,
            tolerance: tol,
        });
    }
    Ok(r as u64)
}

/// Solution counts `N(y)` for every `y ∈ Z_p` from the Fourier identity
/// `N(y) = p^(k-1) Σ_ξ Π_i 1̂_A(c_i ξ) e(yξ/p)`.
pub fn solution_counts_dft(eq: &Equation, set: &ElementSet) -> Result<Vec<u64>> {
    let p = prime_modulus(set)?;
    let g = product_spectrum(eq, set, p)?;
    let scale = (p as f64).powi(eq.k() as i32 - 1);
    let tol = tolerance(p, eq.k());
    inverse_dft(&g)?
        .into_iter()
        .map(|z| round_count(z * scale, tol))
        .collect()
}

/// Single right-hand side version of [`solution_counts_dft`].
pub fn count_solutions_dft(eq: &Equation, set: &ElementSet, y: u64) -> Result<u64> {
    let p = prime_modulus(set)?;
    if y >= p {
        return Err(Error::CoordinateOutOfRange {
            value: y,
            modulus: p,
        });
    }
    let g = product_spectrum(eq, set, p)?;
    let w = roots(p as usize, 1.0);
    let s: Complex64 = g
        .values
        .iter()
        .enumerate()
        .map(|(xi, &v)| v * w[((xi as u128 * y as u128) % p as u128) as usize])
        .sum();
    round_count(s * (p as f64).powi(eq.k() as i32 - 1), tolerance(p, eq.k()))
}
