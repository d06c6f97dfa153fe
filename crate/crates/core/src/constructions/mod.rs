//! Dense solution-free sets with large Cayley chromatic number: weighted
//! coordinate norms on `Z_m ≅ ∏ Z_{p_i}`, the sets `E0`, `F0`, and their lift to `F_p`.

mod gauss;
mod lift;

pub use gauss::{
    covariance_constants, gauss_alpha, gauss_alpha_integrated, gauss_alpha_monte_carlo,
    rectangle_probability_integrated, std_normal_cdf, GaussParams, MonteCarloCheck,
};
pub use lift::{
    certify_lift, find_patterned_solution, interval_separated, lift_to_fp, negative_control,
    Certificate, CertificateBundle, LiftedSets, Slot, DEFAULT_SCAN_CAP,
};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{
    int, is_prime, next_prime, rational, rational_json, Rational, RationalJson, Surd,
};
use crate::equation::{classify, Equation};
use crate::error::{Error, Result};
use crate::group::{CrtSplit, ElementSet, GroupSpec};

/// `‖·‖_j` on `Z_m` for `m = p_1 ⋯ p_n`, with slope parameter `q`.
#[derive(Clone, Debug)]
pub struct NormContext {
    q: u64,
    split: CrtSplit,
}

impl NormContext {
    pub fn new(q: u64, primes: &[u64]) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let m = primes
            .iter()
            .try_fold(1u64, |acc, &p| acc.checked_mul(p))
            .ok_or(Error::OrderOverflow)?;
        Ok(NormContext {
            q,
            split: CrtSplit::new(m, primes)?,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn primes(&self) -> &[u64] {
        self.split.primes()
    }

    pub fn modulus(&self) -> u64 {
        self.split.modulus()
    }

    pub fn n(&self) -> usize {
        self.primes().len()
    }

    pub fn split(&self) -> &CrtSplit {
        &self.split
    }

    fn check_slope(&self, j: u64) -> Result<()> {
        if j == 0 || j >= self.q {
            return Err(Error::OutOfRange(format!(
                "slope index {j} outside [1, {}]",
                self.q - 1
            )));
        }
        Ok(())
    }

    /// `min{q·ȳ/(j·p), q·(p − ȳ)/((q − j)·p)}` for a residue `ȳ` mod `p`.
    pub fn coord_norm(&self, p: u64, ybar: u64, j: u64) -> Result<Rational> {
        self.check_slope(j)?;
        Ok(self.coord_norm_unchecked(p, ybar, j))
    }

    fn coord_norm_unchecked(&self, p: u64, ybar: u64, j: u64) -> Rational {
        let (q, p, y, j) = (self.q as i128, p as i128, ybar as i128, j as i128);
        // compare q·y/(j·p) with q·(p − y)/((q − j)·p)
        if y * (q - j) <= (p - y) * j {
            rational(q * y, j * p)
        } else {
            rational(q * (p - y), (q - j) * p)
        }
    }

    /// `‖y‖_j = Σ_i ‖y‖_j^{(i)}` for `y ∈ Z_m`.
    pub fn norm(&self, y: u64, j: u64) -> Result<Rational> {
        self.check_slope(j)?;
        if y >= self.modulus() {
            return Err(Error::IndexOutOfRange(y as usize));
        }
        Ok(self.norm_unchecked(y, j))
    }

    fn norm_unchecked(&self, y: u64, j: u64) -> Rational {
        self.primes()
            .iter()
            .map(|&p| self.coord_norm_unchecked(p, y % p, j))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Per-coordinate discretization `x ↦ (⌊x_i·p_i/q⌋)_i` of `Z_q^n` into `Z_m`.
    pub fn discretize(&self, x: &[u64]) -> Result<u64> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        let v: Vec<u64> = x
            .iter()
            .zip(self.primes())
            .map(|(&xi, &p)| (xi % self.q) * p / self.q)
            .collect();
        self.split.from_vector(&v)
    }
}

/// How the `√n` thresholds are instantiated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThresholdMode {
    /// `E0: ‖y‖_1 >= n − q√n − 1`, `F0: ‖±c1·y‖_C <= n/2 − q²D√n`.
    Paper,
    /// `E0: ‖y‖_1 >= n − s`; `F0: ‖±c1·y‖_C < β/2` with
    /// `β = n − (q−1)·D_E·s` and `D_E = Σ_{i>=3} |c_i|`.
    Scaled { slack: Rational },
}

impl Serialize for ThresholdMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            mode: &'static str,
            slack: Option<RationalJson>,
        }
        match self {
            ThresholdMode::Paper => Repr {
                mode: "paper",
                slack: None,
            },
            ThresholdMode::Scaled { slack } => Repr {
                mode: "scaled",
                slack: Some(rational_json(slack)),
            },
        }
        .serialize(s)
    }
}

/// Policy for the target prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeChoice {
    /// Smallest prime above `(D+1)m` whose interval check proves that no mixed
    /// sum can wrap around to `0 mod p` (see [`interval_separated`]).
    Auto,
    /// Next prime above `D²(D+1)m`, where the crude gap estimate applies.
    Conservative,
    Explicit(u64),
}

/// `E0 / F0` thresholds with their comparison direction.
#[derive(Clone, Debug, Serialize)]
pub struct Thresholds {
    /// `y ∈ E0 ⇔ ‖y‖_1 >= e0`.
    pub e0: Surd,
    /// `y ∈ F0 ⇔ ‖±c1·y‖_C <= f0` (or `<` when `f0_strict`).
    pub f0: Surd,
    pub f0_strict: bool,
    /// Guaranteed lower bound for `‖Σ c_i x_i‖_C` over `x_i ∈ E0`.
    pub e0_sum_bound: Surd,
}

/// Validated and normalized parameters of the construction.
#[derive(Clone, Debug)]
pub struct ConstructionParams {
    original: Equation,
    eq: Equation,
    perm: Vec<usize>,
    negated: bool,
    ctx: NormContext,
    p: u64,
    mode: ThresholdMode,
}

/// Normalizes `eq` so that `C >= 1` and `c1 + c2 = 0`.
///
/// Returns the normalized equation, the permutation (`perm[t]` is the original
/// index placed at slot `t`) and whether all signs were flipped.
pub fn normalize_equation(eq: &Equation) -> Result<(Equation, Vec<usize>, bool)> {
    let negated = eq.coeff_sum() < 0;
    if eq.coeff_sum() == 0 {
        return Err(Error::Infeasible(
            "coefficient sum is zero; the construction needs C != 0".into(),
        ));
    }
    let base = if negated { eq.negated() } else { eq.clone() };
    let c = base.coeffs();
    let k = c.len();
    let pair = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find(|&(i, j)| c[i] + c[j] == 0)
        .ok_or_else(|| {
            Error::Infeasible(
                "no pair of coefficients sums to zero (c1 + c2 = 0 unattainable)".into(),
            )
        })?;
    let mut perm = vec![pair.0, pair.1];
    perm.extend((0..k).filter(|&i| i != pair.0 && i != pair.1));
    Ok((base.permuted(&perm)?, perm, negated))
}

impl ConstructionParams {
    pub fn new(
        eq: &Equation,
        q: u64,
        primes: &[u64],
        p: PrimeChoice,
        mode: ThresholdMode,
    ) -> Result<Self> {
        let (norm_eq, perm, negated) = normalize_equation(eq)?;
        let ctx = NormContext::new(q, primes)?;
        let c = norm_eq.coeff_sum() as u64;
        if c >= q {
            return Err(Error::Infeasible(format!(
                "C = {c} must lie in [1, q−1] for q = {q}"
            )));
        }
        if let ThresholdMode::Scaled { slack } = &mode {
            if slack.is_negative() {
                return Err(Error::OutOfRange("slack must be nonnegative".into()));
            }
        }
        let m = ctx.modulus();
        let d = norm_eq.abs_sum() as u64;
        let p = match p {
            PrimeChoice::Explicit(p) => p,
            PrimeChoice::Conservative => {
                let bound = (d * d)
                    .checked_mul(d + 1)
                    .and_then(|x| x.checked_mul(m))
                    .ok_or(Error::OrderOverflow)?;
                next_prime(bound)
            }
            PrimeChoice::Auto => auto_prime(&norm_eq, m)?,
        };
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p <= d * m {
            return Err(Error::Infeasible(format!(
                "p = {p} must exceed D·m = {}",
                d * m
            )));
        }
        let (lo, hi) = interval_bounds(p, d);
        if lo > hi {
            return Err(Error::Infeasible(format!(
                "interval [p/(D+1), p/D] is empty for p = {p}"
            )));
        }
        Ok(ConstructionParams {
            original: eq.clone(),
            eq: norm_eq,
            perm,
            negated,
            ctx,
            p,
            mode,
        })
    }

    pub fn original_equation(&self) -> &Equation {
        &self.original
    }

    /// Normalized equation (`C >= 1`, `c1 + c2 = 0`).
    pub fn equation(&self) -> &Equation {
        &self.eq
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn negated(&self) -> bool {
        self.negated
    }

    pub fn norm_context(&self) -> &NormContext {
        &self.ctx
    }

    pub fn q(&self) -> u64 {
        self.ctx.q
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn m(&self) -> u64 {
        self.ctx.modulus()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn mode(&self) -> &ThresholdMode {
        &self.mode
    }

    /// `C`, after normalization.
    pub fn c_sum(&self) -> u64 {
        self.eq.coeff_sum() as u64
    }

    /// `D`
    pub fn d_sum(&self) -> u64 {
        self.eq.abs_sum() as u64
    }

    /// `Σ_{i>=3} |c_i|`
    pub fn d_tail(&self) -> u64 {
        self.eq.coeffs()[2..].iter().map(|c| c.unsigned_abs()).sum()
    }

    /// `I_p = [⌈p/(D+1)⌉, ⌊p/D⌋]`.
    pub fn interval(&self) -> (u64, u64) {
        interval_bounds(self.p, self.d_sum())
    }

    /// Maps a tuple in normalized slot order back to the original variable order.
    pub fn to_original_order(&self, xs: &[u64]) -> Vec<u64> {
        let mut out = vec![0; xs.len()];
        for (t, &x) in xs.iter().enumerate() {
            out[self.perm[t]] = x;
        }
        out
    }

    pub fn thresholds(&self) -> Thresholds {
        let n = self.n() as i128;
        let q = self.q() as i128;
        let d = self.d_sum() as i128;
        let nn = self.n() as u64;
        match &self.mode {
            ThresholdMode::Paper => Thresholds {
                e0: Surd::new(int(n - 1), int(-q), nn),
                f0: Surd::new(rational(n, 2), int(-q * q * d), nn),
                f0_strict: false,
                e0_sum_bound: Surd::new(int(n - (q - 1) * d), int(-(q - 1) * d * q), nn),
            },
            ThresholdMode::Scaled { slack } => {
                let beta = int(n) - int((q - 1) * self.d_tail() as i128) * slack;
                Thresholds {
                    e0: Surd::from_rational(int(n) - slack),
                    f0: Surd::from_rational(beta / int(2)),
                    f0_strict: true,
                    e0_sum_bound: Surd::from_rational(int(n) - int((q - 1) * d) * slack),
                }
            }
        }
    }

    pub fn group_zm(&self) -> Result<GroupSpec> {
        GroupSpec::cyclic(self.m())
    }

    pub fn group_fp(&self) -> Result<GroupSpec> {
        GroupSpec::cyclic(self.p)
    }

    pub fn in_e0(&self, y: u64) -> bool {
        self.thresholds()
            .e0
            .admits_ge(&self.ctx.norm_unchecked(y, 1))
    }

    pub fn in_f0(&self, y: u64) -> bool {
        self.in_f0_with(&self.thresholds(), y)
    }

    fn in_f0_with(&self, t: &Thresholds, y: u64) -> bool {
        let m = self.m();
        let c1 = crate::arith::reduce(self.eq.coeffs()[0], m);
        let a = crate::arith::mul_mod(c1, y, m);
        let b = (m - a) % m;
        let j = self.c_sum();
        let ok = |v: u64| {
            let nv = self.ctx.norm_unchecked(v, j);
            match t.f0.cmp_rational(&nv) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Equal => !t.f0_strict,
                std::cmp::Ordering::Less => false,
            }
        };
        ok(a) && ok(b)
    }

    /// `E0` materialized over `Z_m`.
    pub fn build_e0(&self) -> Result<ElementSet> {
        let g = self.group_zm()?;
        let e0 = self.thresholds().e0;
        ElementSet::from_predicate(&g, |y| e0.admits_ge(&self.ctx.norm_unchecked(y as u64, 1)))
    }

    /// `F0` materialized over `Z_m`.
    pub fn build_f0(&self) -> Result<ElementSet> {
        let g = self.group_zm()?;
        let t = self.thresholds();
        ElementSet::from_predicate(&g, |y| self.in_f0_with(&t, y as u64))
    }

    /// Evaluates `‖Σ c_i x_i‖_C` for a tuple of `E0` elements (normalized slot order)
    /// and compares it with the guaranteed lower bound.
    pub fn check_e0_norm_bound(&self, xs: &[u64]) -> Result<NormBoundCheck> {
        if xs.len() != self.eq.k() {
            return Err(Error::DimensionMismatch {
                expected: self.eq.k(),
                got: xs.len(),
            });
        }
        if let Some(&bad) = xs.iter().find(|&&x| x >= self.m() || !self.in_e0(x)) {
            return Err(Error::ParamMismatch(format!(
                "{bad} is not an element of E0"
            )));
        }
        let s = self.eq.evaluate_mod(xs, self.m());
        let norm = self.ctx.norm_unchecked(s, self.c_sum());
        let bound = self.thresholds().e0_sum_bound;
        Ok(NormBoundCheck {
            sum: s,
            holds: bound.admits_ge(&norm),
            norm: rational_json(&norm),
            bound,
        })
    }

    /// Every side condition of the asymptotic argument, evaluated at this scale.
    pub fn predicates(&self) -> Vec<Predicate> {
        let n = self.n() as u64;
        let q = self.q();
        let c = self.c_sum();
        let d = self.d_sum();
        let m = self.m();
        let p = self.p as u128;
        let nn = n as i128;
        let mut out = Vec::new();
        let mut add = |name: &'static str, holds: bool, detail: String| {
            out.push(Predicate {
                name,
                holds,
                detail,
            })
        };
        add("q_gt_D", q > d, format!("q = {q}, D = {d}"));
        add("D_gt_C", d > c, format!("D = {d}, C = {c}"));
        let min_p = self.ctx.primes().iter().copied().min().unwrap_or(0);
        add(
            "primes_gt_qn",
            min_p > q * n,
            format!("min p_i = {min_p}, q·n = {}", q * n),
        );
        let e0_paper = Surd::new(int(nn - 1), int(-(q as i128)), n);
        add(
            "paper_e0_threshold_positive",
            !e0_paper.is_negative()
                && e0_paper.cmp_rational(&int(0)) == std::cmp::Ordering::Greater,
            format!("n − q√n − 1 = {e0_paper}"),
        );
        let f0_paper = Surd::new(rational(nn, 2), int(-((q * q * d) as i128)), n);
        add(
            "paper_f0_threshold_positive",
            f0_paper.cmp_rational(&int(0)) == std::cmp::Ordering::Greater,
            format!("n/2 − q²D√n = {f0_paper}"),
        );
        add(
            "n_gt_q4D2",
            (n as u128) > (q as u128).pow(4) * (d as u128).pow(2),
            format!(
                "n = {n}, q⁴D² = {}",
                (q as u128).pow(4) * (d as u128).pow(2)
            ),
        );
        let c1 = self.eq.coeffs()[0].unsigned_abs();
        add(
            "gcd_c1_m_is_1",
            c1.gcd(&m) == 1,
            format!("c1 = {c1}, m = {m}"),
        );
        let no_triple = classify(&self.eq)
            .map(|cl| !cl.chi_vanishing)
            .unwrap_or(false);
        add(
            "no_zero_sum_subset_of_size_3",
            no_triple,
            "no subset of >= 3 coefficients sums to zero".into(),
        );
        let dm = d as u128 * m as u128;
        add("p_gt_Dm", p > dm, format!("p = {p}, D·m = {dm}"));
        add(
            "p_gt_2m",
            p > 2 * m as u128,
            format!("2m = {}", 2 * m as u128),
        );
        add(
            "p_gt_D_plus_1_m",
            p > (d as u128 + 1) * m as u128,
            format!("(D+1)·m = {}", (d as u128 + 1) * m as u128),
        );
        let crude = (d as u128).pow(2) * (d as u128 + 1) * m as u128;
        add(
            "p_gt_D2_D_plus_1_m",
            p > crude,
            format!("D²(D+1)·m = {crude}"),
        );
        add(
            "interval_separated",
            interval_separated(&self.eq, self.p, m),
            "no sum with a nonzero F-coefficient total reaches 0 mod p".into(),
        );
        if let ThresholdMode::Scaled { .. } = self.mode {
            let t = self.thresholds();
            add(
                "e0_sum_bound_positive",
                t.e0_sum_bound.cmp_rational(&int(0)) == std::cmp::Ordering::Greater,
                format!("n − (q−1)·D·s = {}", t.e0_sum_bound),
            );
            add(
                "extension_margin_positive",
                t.f0.cmp_rational(&int(0)) == std::cmp::Ordering::Greater,
                format!("β/2 = {}", t.f0),
            );
        }
        out
    }
}

fn interval_bounds(p: u64, d: u64) -> (u64, u64) {
    (p.div_ceil(d + 1), p / d)
}

fn auto_prime(eq: &Equation, m: u64) -> Result<u64> {
    let d = eq.abs_sum() as u64;
    let start = (d + 1).checked_mul(m).ok_or(Error::OrderOverflow)?;
    let limit = (d * d)
        .checked_mul(d + 1)
        .and_then(|x| x.checked_mul(m))
        .ok_or(Error::OrderOverflow)?;
    let mut p = next_prime(start);
    while !interval_separated(eq, p, m) {
        if p > limit {
            return Err(Error::Infeasible(
                "no prime up to D²(D+1)m separates the interval sums".into(),
            ));
        }
        p = next_prime(p);
    }
    Ok(p)
}

#[derive(Clone, Debug, Serialize)]
pub struct Predicate {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormBoundCheck {
    /// `Σ c_i x_i mod m`
    pub sum: u64,
    pub norm: RationalJson,
    pub bound: Surd,
    pub holds: bool,
}

/// `|F0|/m` next to the Gaussian rectangle constant. Report only: the
/// comparison is meaningful only in the asymptotic regime.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub f0_size: usize,
    pub m: u64,
    pub f0_density: f64,
    /// `a = C/q`
    pub a: f64,
    /// `(σ, σ')`, absent unless `0 < a < 1/2`.
    pub sigma: Option<(f64, f64)>,
    /// `r = q²D`
    pub r: f64,
    pub alpha: Option<f64>,
    /// `|F0|/m >= α/2`
    pub meets_half_alpha: Option<bool>,
}

pub fn density_report(params: &ConstructionParams, f0: &ElementSet) -> DensityReport {
    let m = params.m();
    let f0_density = f0.len() as f64 / m as f64;
    let sigma = covariance_constants(params.c_sum(), params.q());
    let r = (params.q() * params.q() * params.d_sum()) as f64;
    let alpha = sigma
        .and_then(|(s, sp)| GaussParams::new(r, s * s, sp * sp).ok())
        .map(|gp| gauss_alpha(&gp));
    DensityReport {
        f0_size: f0.len(),
        m,
        f0_density,
        a: params.c_sum() as f64 / params.q() as f64,
        sigma,
        r,
        alpha,
        meets_half_alpha: alpha.map(|al| f0_density >= al / 2.0),
    }
}
