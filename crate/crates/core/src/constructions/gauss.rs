use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Rectangle constant parameters: offset scale `r`, eigenvalue bounds `c <= c_cov`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussParams {
    pub r: f64,
    pub c: f64,
    pub c_cov: f64,
}

impl GaussParams {
    pub fn new(r: f64, c: f64, c_cov: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && c_cov.is_finite()) {
            return Err(Error::OutOfRange(format!("c = {c} must be positive")));
        }
        if c > c_cov {
            return Err(Error::OutOfRange(format!("c = {c} exceeds C = {c_cov}")));
        }
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::OutOfRange(format!("r = {r} must be >= 1")));
        }
        Ok(GaussParams { r, c, c_cov })
    }

    /// `a = −r/√c`
    pub fn a(&self) -> f64 {
        -self.r / self.c.sqrt()
    }

    /// `ρ0 = √(1 − (c/C)²)`
    pub fn rho0(&self) -> f64 {
        (1.0 - (self.c / self.c_cov).powi(2)).max(0.0).sqrt()
    }

    /// `a(1 + 2ρ0)/√(1 − ρ0²)`
    fn b(&self) -> f64 {
        let rho = self.rho0();
        self.a() * (1.0 + 2.0 * rho) / (1.0 - rho * rho).sqrt()
    }
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `α = (Φ(a) − Φ(2a))·Φ(a(1+2ρ0)/√(1−ρ0²))`.
pub fn gauss_alpha(gp: &GaussParams) -> f64 {
    let a = gp.a();
    (std_normal_cdf(a) - std_normal_cdf(2.0 * a)) * std_normal_cdf(gp.b())
}

fn simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, eps, 50)
}

/// `Φ` by quadrature of the density (independent of the erfc path).
fn cdf_by_quadrature(x: f64) -> f64 {
    if x >= 0.0 {
        0.5 + integrate(&std_normal_pdf, 0.0, x, 1e-14)
    } else {
        integrate(&std_normal_pdf, (x - 40.0).min(-40.0), x, 1e-16)
    }
}

/// `α` rebuilt from its defining integral `∫_{2a}^{a} Φ(b)·φ(x) dx` with every
/// `Φ` obtained by quadrature.
pub fn gauss_alpha_integrated(gp: &GaussParams) -> f64 {
    let a = gp.a();
    let phi_b = cdf_by_quadrature(gp.b());
    integrate(&|x| phi_b * std_normal_pdf(x), 2.0 * a, a, 1e-15)
}

/// `∫_{2a}^{a} Φ((a − ρx)/√(1−ρ²)) φ(x) dx` for a correlation `|ρ| <= ρ0`;
/// always at least `α`.
pub fn rectangle_probability_integrated(gp: &GaussParams, rho: f64) -> f64 {
    let a = gp.a();
    let s = (1.0 - rho * rho).sqrt();
    integrate(
        &|x| cdf_by_quadrature((a - rho * x) / s) * std_normal_pdf(x),
        2.0 * a,
        a,
        1e-13,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloCheck {
    pub params: GaussParams,
    pub alpha: f64,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    /// Upper end of the Wilson interval at `z = 3`.
    pub upper_3sigma: f64,
    pub passed: bool,
    pub seed: u64,
}

/// Samples `Z ~ N(0, Σ)` with `Σ11 = Σ22 = (c+C)/2`, `Σ12 = (c−C)/2` (eigenvalues
/// `c` and `C`, the extreme allowed correlation) and estimates
/// `P(Z1 <= −r, Z2 <= −r)`, which must be at least `α`.
pub fn gauss_alpha_monte_carlo(gp: &GaussParams, samples: u64, seed: u64) -> MonteCarloCheck {
    let var = 0.5 * (gp.c + gp.c_cov);
    let rho = 0.5 * (gp.c - gp.c_cov) / var;
    let (sd, s) = (var.sqrt(), (1.0 - rho * rho).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let x: f64 = StandardNormal.sample(&mut rng);
        let y: f64 = StandardNormal.sample(&mut rng);
        let z1 = sd * x;
        let z2 = sd * (rho * x + s * y);
        if z1 <= -gp.r && z2 <= -gp.r {
            hits += 1;
        }
    }
    let alpha = gauss_alpha(gp);
    let n = samples.max(1) as f64;
    let ph = hits as f64 / n;
    let z = 3.0;
    let denom = 1.0 + z * z / n;
    let upper =
        (ph + z * z / (2.0 * n) + z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt()) / denom;
    MonteCarloCheck {
        params: *gp,
        alpha,
        samples,
        hits,
        estimate: ph,
        upper_3sigma: upper,
        passed: upper >= alpha,
        seed,
    }
}

/// `(σ, σ')` from the per-coordinate covariance eigenvalues at `a = C/q`;
/// `None` when the smaller eigenvalue is not positive.
pub fn covariance_constants(c_sum: u64, q: u64) -> Option<(f64, f64)> {
    let a = c_sum as f64 / q as f64;
    if !(a > 0.0 && a < 0.5) {
        return None;
    }
    let r1 = (a * (2.0 - 3.0 * a)).sqrt();
    let r2 = 1.0 - 2.0 * a;
    let sigma = (r1 / (3.0 * (1.0 - a))).min(r2 / (3.0 * (1.0 - a)));
    let sigma_p = (r1 / (2.0 * (1.0 - a))).max(r2 / (2.0 * (1.0 - a)));
    (sigma > 0.0).then_some((sigma, sigma_p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_value() {
        let gp = GaussParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(gp.rho0(), 0.0);
        // (Φ(−1) − Φ(−2))·Φ(−1)
        assert_abs_diff_eq!(gauss_alpha(&gp), 0.021_562_061_638_842_592, epsilon = 1e-12);
        assert_abs_diff_eq!(std_normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            std_normal_cdf(-1.0),
            0.158_655_253_931_457_05,
            epsilon = 1e-15
        );
    }

    #[test]
    fn monotone_in_r_and_positive() {
        let mut prev = f64::INFINITY;
        for r in [1.0, 1.5, 2.0, 3.0, 5.0] {
            let a = gauss_alpha(&GaussParams::new(r, 0.8, 1.3).unwrap());
            assert!(a > 0.0 && a < prev);
            prev = a;
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(GaussParams::new(1.0, 2.0, 1.0).is_err());
        assert!(GaussParams::new(0.5, 1.0, 1.0).is_err());
        assert!(GaussParams::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn quadrature_agrees() {
        for (r, c, cc) in [(1.0, 1.0, 1.0), (1.2, 2.0, 3.0), (2.0, 4.0, 4.5)] {
            let gp = GaussParams::new(r, c, cc).unwrap();
            assert_abs_diff_eq!(
                gauss_alpha(&gp),
                gauss_alpha_integrated(&gp),
                epsilon = 1e-9
            );
            let rho = gp.rho0();
            assert!(rectangle_probability_integrated(&gp, rho) >= gauss_alpha(&gp) - 1e-12);
            assert!(rectangle_probability_integrated(&gp, -rho) >= gauss_alpha(&gp) - 1e-12);
        }
    }

    #[test]
    fn monte_carlo_lower_bound() {
        let gp = GaussParams::new(1.0, 1.0, 2.0).unwrap();
        let mc = gauss_alpha_monte_carlo(&gp, 200_000, 4);
        assert!(mc.passed, "{mc:?}");
        assert!(mc.estimate > mc.alpha);
    }

    #[test]
    fn covariance_constants_range() {
        let (s, sp) = covariance_constants(1, 5).unwrap();
        assert!(s > 0.0 && sp >= s);
        assert!(covariance_constants(2, 3).is_none());
    }
}
