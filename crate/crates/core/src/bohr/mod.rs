//! Large spectrum, Bohr sets and the phase-cell coloring of `Cay(F_p, A)`.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{ceil_rational, inv_mod, mul_mod, reduce, serialize_rational, Rational};
use crate::cayley::Coloring;
use crate::equation::{classify, Equation, Spectrum};
use crate::error::{Error, Result};
use crate::group::{ElementSet, GroupSpec};

/// Threshold `ν`, Bohr radius `ρ` and the index `s` used to rescale the spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumParams {
    pub nu: f64,
    #[serde(serialize_with = "serialize_rational")]
    pub rho: Rational,
    /// Overrides the default choice of `s` (0-based).
    pub s_index: Option<usize>,
}

impl SpectrumParams {
    pub fn new(nu: f64, rho: Rational, s_index: Option<usize>) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::OutOfRange(format!("ν = {nu} outside (0, 1]")));
        }
        if !(rho.is_positive() && rho < Rational::new(1, 2)) {
            return Err(Error::OutOfRange(format!("ρ = {rho} outside (0, 1/2)")));
        }
        Ok(SpectrumParams { nu, rho, s_index })
    }

    /// `M = ⌈2/ρ⌉`
    pub fn arcs(&self) -> u64 {
        ceil_rational(&(Rational::from_integer(2) / self.rho)) as u64
    }

    /// `ρ = δ³/(216πD)` for a supplied supersaturation constant `δ`, rounded
    /// down to a rational with denominator `10^9`.
    pub fn rho_from_delta(delta: f64, d: u64) -> Result<Rational> {
        let rho = delta.powi(3) / (216.0 * std::f64::consts::PI * d as f64);
        let scaled = (rho * 1e9).floor() as i128;
        if scaled <= 0 {
            return Err(Error::OutOfRange(format!("ρ from δ = {delta} underflows")));
        }
        Ok(Rational::new(scaled, 1_000_000_000))
    }
}

/// `L = {ξ : |1̂_A(ξ)| >= ν}` in increasing order.
pub fn large_spectrum(a: &ElementSet, nu: f64) -> Result<Vec<u64>> {
    Ok(large_spectrum_of(&Spectrum::of_set(a)?, nu))
}

pub fn large_spectrum_of(spec: &Spectrum, nu: f64) -> Vec<u64> {
    spec.values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() >= nu)
        .map(|(xi, _)| xi as u64)
        .collect()
}

/// `B(Γ, ρ) = {x : ‖ξx‖ <= ρ for all ξ ∈ Γ}`.
#[derive(Clone, Debug)]
pub struct BohrSet {
    pub frequencies: Vec<u64>,
    pub rho: Rational,
    pub members: ElementSet,
}

/// `‖r/p‖ <= ρ`, decided as `min(r, p − r)·den <= num·p`.
fn within_radius(r: u64, p: u64, rho: &Rational) -> bool {
    let d = r.min(p - r) as i128;
    d * rho.denom() <= rho.numer() * p as i128
}

pub fn bohr_set(p: u64, gamma: &[u64], rho: &Rational) -> Result<BohrSet> {
    let g = GroupSpec::cyclic(p)?;
    let members = ElementSet::from_predicate(&g, |x| {
        gamma
            .iter()
            .all(|&xi| within_radius(mul_mod(xi % p, x as u64, p), p, rho))
    })?;
    Ok(BohrSet {
        frequencies: gamma.to_vec(),
        rho: *rho,
        members,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimTest {
    pub passed: bool,
    pub intersection_size: usize,
    pub k: usize,
    /// First elements of `A ∩ B` (at most 32) when the test fails.
    pub witness: Option<Vec<usize>>,
}

/// `|A ∩ B| < k`.
pub fn claim_ab_test(a: &ElementSet, b: &ElementSet, k: usize) -> Result<ClaimTest> {
    let inter = a.intersection(b)?;
    let passed = inter.len() < k;
    Ok(ClaimTest {
        passed,
        intersection_size: inter.len(),
        k,
        witness: (!passed).then(|| inter.iter().take(32).collect()),
    })
}

/// Cells of `κ(u) = (⌊M·(ξu mod p)/p⌋)_{ξ∈Γ}`, numbered in order of first appearance.
#[derive(Clone, Debug)]
pub struct PhasePartition {
    pub p: u64,
    pub arcs: u64,
    pub frequencies: Vec<u64>,
    pub cell_of: Vec<u32>,
    pub cells: usize,
}

impl PhasePartition {
    /// `κ(u)` as a vector of arc indices.
    pub fn key(&self, u: u64) -> Vec<u64> {
        phase_key(self.p, self.arcs, &self.frequencies, u)
    }
}

fn phase_key(p: u64, arcs: u64, gamma: &[u64], u: u64) -> Vec<u64> {
    gamma
        .iter()
        .map(|&xi| (mul_mod(xi % p, u, p) as u128 * arcs as u128 / p as u128) as u64)
        .collect()
}

pub fn phase_partition(p: u64, gamma: &[u64], arcs: u64) -> Result<PhasePartition> {
    if arcs == 0 {
        return Err(Error::OutOfRange("arc count must be positive".into()));
    }
    GroupSpec::cyclic(p)?;
    let mut ids: HashMap<Vec<u64>, u32> = HashMap::new();
    let cell_of = (0..p)
        .map(|u| {
            let next = ids.len() as u32;
            *ids.entry(phase_key(p, arcs, gamma, u)).or_insert(next)
        })
        .collect();
    Ok(PhasePartition {
        p,
        arcs,
        frequencies: gamma.to_vec(),
        cell_of,
        cells: ids.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BohrReport {
    pub p: u64,
    pub a_size: usize,
    pub k: usize,
    pub nu: f64,
    #[serde(serialize_with = "serialize_rational")]
    pub rho: Rational,
    pub arcs: u64,
    pub spectrum_size: usize,
    /// Parseval bound `ν⁻²` on `|L|`.
    pub spectrum_bound: f64,
    pub gamma_size: usize,
    pub s_index: usize,
    /// No zero-sum subset of size >= 3 exists; `s = 0` was used.
    pub s_fallback: bool,
    pub bohr_size: usize,
    /// `p·(2ρ)^|Γ|`, reported only.
    pub bohr_size_estimate: f64,
    pub claim: ClaimTest,
    pub cells: usize,
    pub max_cell_degree: usize,
    pub colors_used: usize,
    /// `(2k−1)·M^|Γ|` (saturating).
    pub budget: u128,
    pub within_budget: bool,
    pub proper: bool,
}

#[derive(Clone, Debug)]
pub struct BohrColoring {
    pub coloring: Coloring,
    pub report: BohrReport,
}

/// Colors `Cay(F_p, A)`: spectrum `L`, `Γ = c_s⁻¹·L`, Bohr set, the `|A ∩ B| < k`
/// test, phase cells, then greedy coloring of each cell (in vertex order)
/// from its own palette. Properness is re-checked edge by edge afterwards.
pub fn bohr_color(a: &ElementSet, eq: &Equation, params: &SpectrumParams) -> Result<BohrColoring> {
    let p = a.group().cyclic_modulus().ok_or(Error::NotPrimeField)?;
    if p <= eq.max_abs() {
        return Err(Error::ModulusTooSmall {
            modulus: p,
            max_coeff: eq.max_abs(),
        });
    }
    let k = eq.k();
    let (s_index, s_fallback) = match params.s_index {
        Some(s) if s < k => (s, false),
        Some(s) => {
            return Err(Error::OutOfRange(format!(
                "s = {s} is not a variable index"
            )));
        }
        None => match classify(eq)?.chi_witness {
            Some(w) => (w[0], false),
            None => (0, true),
        },
    };
    let spectrum = large_spectrum(a, params.nu)?;
    let inv = inv_mod(reduce(eq.coeffs()[s_index], p), p).ok_or(Error::NotPrimeField)?;
    let mut gamma: Vec<u64> = spectrum.iter().map(|&xi| mul_mod(inv, xi, p)).collect();
    gamma.sort_unstable();
    let bohr = bohr_set(p, &gamma, &params.rho)?;
    let claim = claim_ab_test(a, &bohr.members, k)?;
    let arcs = params.arcs();
    let cells = phase_partition(p, &gamma, arcs)?;

    // same-cell neighbors differ by an element of ±(A ∩ B)
    let inter = a.intersection(&bohr.members)?;
    let mut shifts: Vec<u64> = inter
        .iter()
        .flat_map(|x| [x as u64, (p - x as u64) % p])
        .filter(|&d| d != 0)
        .collect();
    shifts.sort_unstable();
    shifts.dedup();

    let n = p as usize;
    let mut local = vec![u32::MAX; n];
    let mut used = vec![0u32; cells.cells];
    let mut stamp = Vec::<usize>::new();
    let mut max_deg = 0;
    for u in 0..n {
        let cu = cells.cell_of[u];
        let mut deg = 0;
        for &d in &shifts {
            let v = (u + d as usize) % n;
            if cells.cell_of[v] != cu {
                continue;
            }
            deg += 1;
            let c = local[v];
            if c != u32::MAX {
                if stamp.len() <= c as usize {
                    stamp.resize(c as usize + 1, usize::MAX);
                }
                stamp[c as usize] = u;
            }
        }
        max_deg = max_deg.max(deg);
        let c = (0..)
            .find(|&c| stamp.get(c).is_none_or(|&s| s != u))
            .unwrap();
        local[u] = c as u32;
        used[cu as usize] = used[cu as usize].max(c as u32 + 1);
    }
    let mut offset = vec![0u32; cells.cells];
    let mut total = 0u32;
    for (o, &u) in offset.iter_mut().zip(&used) {
        *o = total;
        total += u;
    }
    let colors: Vec<u32> = (0..n)
        .map(|u| offset[cells.cell_of[u] as usize] + local[u])
        .collect();
    let coloring = Coloring::new(colors);
    let proper = cayley_conflict(a, &coloring.colors).is_none();

    let budget = (arcs as u128)
        .checked_pow(gamma.len() as u32)
        .and_then(|x| x.checked_mul(2 * k as u128 - 1))
        .unwrap_or(u128::MAX);
    let rho_f = params.rho.to_f64().unwrap_or(f64::NAN);
    let report = BohrReport {
        p,
        a_size: a.len(),
        k,
        nu: params.nu,
        rho: params.rho,
        arcs,
        spectrum_size: spectrum.len(),
        spectrum_bound: params.nu.powi(-2),
        gamma_size: gamma.len(),
        s_index,
        s_fallback,
        bohr_size: bohr.members.len(),
        bohr_size_estimate: p as f64 * (2.0 * rho_f).powi(gamma.len() as i32),
        claim,
        cells: cells.cells,
        max_cell_degree: max_deg,
        colors_used: coloring.num_colors,
        budget,
        within_budget: (coloring.num_colors as u128) <= budget,
        proper,
    };
    Ok(BohrColoring { coloring, report })
}

/// First monochromatic edge `(u, u + a)` of `Cay(F_p, A)`, by direct scan of
/// every `a ∈ A` and every `u`.
pub fn cayley_conflict(a: &ElementSet, colors: &[u32]) -> Option<(usize, usize)> {
    let n = a.group().order();
    if colors.len() != n {
        return Some((0, 0));
    }
    for d in a.iter().filter(|&d| d != 0) {
        let (head, tail) = colors.split_at(n - d);
        // u + d < n
        if let Some(u) = head.iter().zip(&colors[d..]).position(|(x, y)| x == y) {
            return Some((u, u + d));
        }
        // u + d wraps around
        if let Some(i) = tail.iter().zip(&colors[..d]).position(|(x, y)| x == y) {
            return Some((n - d + i, i));
        }
    }
    None
}

/// `‖x‖` for `x ∈ Z_p`, the distance from `x/p` to the nearest integer.
pub fn torus_norm(x: u64, p: u64) -> Rational {
    let r = x % p;
    Rational::new(r.min(p - r) as i128, p as i128)
}
