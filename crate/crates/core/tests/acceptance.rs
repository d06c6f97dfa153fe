//! Acceptance suite: one test per criterion, each printing a single
//! `[acceptance]` line (written straight to stdout so it survives capture).

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use chroma_core::arith::{ceil_rational, int, is_prime, rational};
use chroma_core::bohr::{bohr_color, cayley_conflict, SpectrumParams};
use chroma_core::cayley::{chromatic_number_exact, CayleyView, SolverBudget};
use chroma_core::constructions::{
    certify_lift, gauss_alpha, gauss_alpha_integrated, gauss_alpha_monte_carlo, lift_to_fp,
    rectangle_probability_integrated, ConstructionParams, GaussParams, PrimeChoice, ThresholdMode,
    DEFAULT_SCAN_CAP,
};
use chroma_core::equation::{
    classify, dft, inverse_dft, solution_counts_dft, solution_histogram_brute, Equation,
};
use chroma_core::group::{ElementSet, GroupSpec};
use chroma_core::kneser::{
    check_embedding_all, check_independent_exhaustive, chi_lower_bound, embedding_k, kneser_graph,
    HammingBall, IndependentSetParams, KneserParams,
};

// tolerances and budgets
const KNESER_REGRESSION_LIMIT: Duration = Duration::from_secs(60);
const SWEEP_LIMIT: Duration = Duration::from_secs(600);
const SWEEP_VERTEX_CAP: u128 = 2000;
const DFT_INSTANCES: usize = 200;
const DFT_LIMIT: Duration = Duration::from_secs(120);
const FOURIER_FUNCTIONS: usize = 100;
const FOURIER_REL_TOL: f64 = 1e-9;
const GOLDEN_LIMIT: Duration = Duration::from_secs(30 * 60);
const BOHR_RANDOM_SETS: usize = 20;
const CLASSIFY_SAMPLES: usize = 10_000;
const GAUSS_TRIPLES: usize = 20;
const GAUSS_TOL: f64 = 1e-6;
const GAUSS_MC_SAMPLES: u64 = 1_000_000;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "[acceptance] criterion {id:>2} {name}: {verdict} ({detail})"
    );
    let _ = out.flush();
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn zp(p: u64) -> GroupSpec {
    GroupSpec::cyclic(p).unwrap()
}

fn random_subset(g: &GroupSpec, density: f64, rng: &mut ChaCha8Rng) -> ElementSet {
    ElementSet::from_predicate(g, |_| rng.random_bool(density)).unwrap()
}

fn random_equation(k: usize, max: i64, rng: &mut ChaCha8Rng) -> Equation {
    let coeffs = (0..k)
        .map(|_| {
            let c = rng.random_range(1..=max);
            if rng.random_bool(0.5) {
                c
            } else {
                -c
            }
        })
        .collect();
    Equation::new(coeffs).unwrap()
}

fn golden_params() -> ConstructionParams {
    ConstructionParams::new(
        &Equation::new(vec![1, -1, 2]).unwrap(),
        3,
        &[13, 17, 19, 23],
        PrimeChoice::Auto,
        ThresholdMode::Scaled {
            slack: rational(2, 5),
        },
    )
    .unwrap()
}

#[test]
fn criterion_01_classical_kneser() {
    let t = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for (n, k) in [(5u32, 2u32), (6, 2), (7, 2), (7, 3)] {
        let (_, g) = kneser_graph(&KneserParams::new(n, k, 1).unwrap()).unwrap();
        let r = chromatic_number_exact(&g, &SolverBudget::unlimited());
        let expected = (n - 2 * k + 2) as usize;
        let ok = r.exact && r.lower == expected && r.coloring.is_proper(&g);
        pass &= ok;
        details.push(format!(
            "KN({n},{k})={}",
            if r.exact {
                r.lower.to_string()
            } else {
                "?".into()
            }
        ));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < KNESER_REGRESSION_LIMIT;
    report(
        1,
        "classical Kneser chromatic numbers",
        pass,
        &format!("{} in {elapsed:.2?}", details.join(" ")),
    );
}

/// `(n, k, m)` with `m + 1` prime, `n >= (m+1)k` and at most the vertex cap.
fn sweep_instances() -> Vec<KneserParams> {
    let mut out = Vec::new();
    for m in 1u32.. {
        if !is_prime(m as u64 + 1) {
            if m > 12 {
                break;
            }
            continue;
        }
        let mut any_k = false;
        for k in 1u32.. {
            let mut any_n = false;
            for n in (m + 1) * k.. {
                let p = KneserParams::new(n, k, m).unwrap();
                if p.vertex_count() > SWEEP_VERTEX_CAP {
                    break;
                }
                any_n = true;
                out.push(p);
            }
            if !any_n {
                break;
            }
            any_k = true;
        }
        if !any_k {
            break;
        }
    }
    out
}

#[test]
fn criterion_02_generalized_kneser_bound() {
    let t = Instant::now();
    let instances = sweep_instances();
    // per instance: the clique bound, then a short exact search
    let budget = SolverBudget::nodes(20_000).with_time(Duration::from_secs(2));
    let results: Vec<(KneserParams, i128, usize, bool, bool)> = instances
        .par_iter()
        .map(|p| {
            let need = ceil_rational(&chi_lower_bound(p).unwrap());
            if need <= 0 {
                return (*p, need, 0, false, true);
            }
            let (_, g) = kneser_graph(p).unwrap();
            let r = chromatic_number_exact(&g, &budget);
            let ok = r.coloring.is_proper(&g) && r.lower as i128 >= need;
            (*p, need, r.lower, r.exact, ok)
        })
        .collect();
    let checked: Vec<_> = results.iter().filter(|r| r.1 > 0).collect();
    let failures: Vec<String> = checked
        .iter()
        .filter(|r| !r.4)
        .map(|r| format!("({},{},{}) need {} got {}", r.0.n, r.0.k, r.0.m, r.1, r.2))
        .collect();
    let exact = checked.iter().filter(|r| r.3).count();
    let elapsed = t.elapsed();
    let pass = failures.is_empty() && !checked.is_empty() && elapsed < SWEEP_LIMIT;
    report(
        2,
        "generalized Kneser lower bound",
        pass,
        &format!(
            "{} feasible instances, {} with positive bound, {} solved exactly, rest certified by clique or exhausted search; failures {:?}; {elapsed:.1?}",
            results.len(),
            checked.len(),
            exact,
            failures
        ),
    );
}

#[test]
fn criterion_03_embedding() {
    let mut details = Vec::new();
    let mut pass = true;
    for (p, n) in [(2u64, 9u32), (3, 9)] {
        let k = embedding_k(p, n);
        let params = KneserParams::new(n, k, p as u32 - 1).unwrap();
        let ball = HammingBall::standard(p, n).unwrap();
        let r = check_embedding_all(&params, &ball).unwrap();
        pass &= r.violations == 0 && r.edges > 0 && r.injective;
        details.push(format!(
            "p={p} n={n} k={k}: {} vertices, {} edges, {} violations",
            r.vertices, r.edges, r.violations
        ));
    }
    report(
        3,
        "embedding into the Hamming-ball Cayley graph",
        pass,
        &details.join("; "),
    );
}

#[test]
fn criterion_04_independent_set() {
    let mut details = Vec::new();
    let mut pass = true;
    for n in [6u32, 7, 8] {
        let strict =
            check_independent_exhaustive(&IndependentSetParams::standard(3, n).unwrap()).unwrap();
        let relaxed =
            check_independent_exhaustive(&IndependentSetParams::scaled(3, n, int(1)).unwrap())
                .unwrap();
        pass &= strict.violations == 0 && relaxed.violations == 0 && relaxed.size > 0;
        pass &= strict.degenerate == (strict.size == 0);
        details.push(format!(
            "n={n}: λ=3 size {} (degenerate {}), λ=1 size {}, violations {}",
            strict.size,
            strict.degenerate,
            relaxed.size,
            strict.violations + relaxed.violations
        ));
    }
    report(
        4,
        "independent set in the Hamming-ball graph",
        pass,
        &details.join("; "),
    );
}

#[test]
fn criterion_05_dft_counts() {
    let t = Instant::now();
    let primes: Vec<u64> = (5..=31).filter(|&p| is_prime(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut mismatches = 0;
    let mut values = 0usize;
    for _ in 0..DFT_INSTANCES {
        let p = primes[rng.random_range(0..primes.len())];
        let k = rng.random_range(3..=4);
        let eq = random_equation(k, (p as i64 - 1).min(9), &mut rng);
        let density = rng.random_range(0.1..0.9);
        let a = random_subset(&zp(p), density, &mut rng);
        let fourier = solution_counts_dft(&eq, &a).unwrap();
        let brute = solution_histogram_brute(&eq, &a, false).unwrap();
        values += brute.len();
        if fourier != brute {
            mismatches += 1;
        }
    }
    let elapsed = t.elapsed();
    let pass = mismatches == 0 && elapsed < DFT_LIMIT;
    report(
        5,
        "Fourier solution counts equal brute force",
        pass,
        &format!("{DFT_INSTANCES} instances, {values} right-hand sides, {mismatches} mismatches, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_06_parseval_and_inversion() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst_parseval: f64 = 0.0;
    let mut worst_inverse: f64 = 0.0;
    for i in 0..FOURIER_FUNCTIONS {
        // mix small lengths (direct transform) with large ones (FFT)
        let p = if i % 2 == 0 {
            rng.random_range(2..=500)
        } else {
            rng.random_range(501..=10_000)
        };
        let f: Vec<Complex64> = (0..p)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let spec = dft(&f).unwrap();
        let lhs: f64 = f.iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = p as f64 * spec.values.iter().map(|v| v.norm_sqr()).sum::<f64>();
        worst_parseval = worst_parseval.max((lhs - rhs).abs() / lhs);
        let back = inverse_dft(&spec).unwrap();
        let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = f
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst_inverse = worst_inverse.max(err / scale);
    }
    let pass = worst_parseval <= FOURIER_REL_TOL && worst_inverse <= FOURIER_REL_TOL;
    report(
        6,
        "Parseval and inversion",
        pass,
        &format!("{FOURIER_FUNCTIONS} functions, worst Parseval {worst_parseval:.2e}, worst inversion {worst_inverse:.2e}, tolerance {FOURIER_REL_TOL:e}"),
    );
}

#[test]
fn criterion_07_counting_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut instances = 0;
    let mut violations = 0;
    for &p in &[5u64, 7, 11, 13] {
        for _ in 0..25 {
            let k = rng.random_range(3..=4);
            let eq = random_equation(k, (p as i64 - 1).min(6), &mut rng);
            let a = random_subset(&zp(p), rng.random_range(0.2..1.0), &mut rng);
            let all = solution_histogram_brute(&eq, &a, false).unwrap();
            let inj = solution_histogram_brute(&eq, &a, true).unwrap();
            let total_cap = p.pow(k as u32 - 1);
            let dup_cap = (k * k) as u64 * p.pow(k as u32 - 2);
            for (t, i) in all.iter().zip(&inj) {
                instances += 1;
                if *t > total_cap || t - i > dup_cap {
                    violations += 1;
                }
            }
        }
    }
    report(
        7,
        "solution-count bounds",
        violations == 0,
        &format!("{instances} (equation, set, y) instances, {violations} violations"),
    );
}

#[test]
fn criterion_08_golden_certificates() {
    let t = Instant::now();
    let params = golden_params();
    let e0 = params.build_e0().unwrap();
    let f0 = params.build_f0().unwrap();
    let lifted = lift_to_fp(&params, &e0, &f0).unwrap();
    let bundle = certify_lift(&params, &e0, &f0, &lifted, DEFAULT_SCAN_CAP);
    let mut out = std::io::stdout().lock();
    for pred in params.predicates() {
        let _ = writeln!(
            out,
            "    side condition {}: {} ({})",
            pred.name, pred.holds, pred.detail
        );
    }
    for rec in &bundle.records {
        let _ = writeln!(
            out,
            "    certificate ({}) {}: {:?} {}",
            rec.id, rec.name, rec.passed, rec.detail
        );
    }
    drop(out);
    let core: Vec<String> = ["i", "ii", "iii", "iv"]
        .iter()
        .map(|id| {
            let passed = bundle.get(id).and_then(|c| c.passed);
            format!(
                "({id})={}",
                passed.map_or("unknown".into(), |b| b.to_string())
            )
        })
        .collect();
    let elapsed = t.elapsed();
    report(
        8,
        "golden lift certificates",
        bundle.core_pass && elapsed < GOLDEN_LIMIT,
        &format!(
            "m={} p={} {} in {elapsed:.1?}",
            params.m(),
            params.p(),
            core.join(" ")
        ),
    );
}

#[test]
fn criterion_09_bohr_coloring() {
    let sp = SpectrumParams::new(0.1, rational(1, 10), None).unwrap();
    let mut details = Vec::new();
    let mut pass = true;

    let params = golden_params();
    let e0 = params.build_e0().unwrap();
    let f0 = params.build_f0().unwrap();
    let lifted = lift_to_fp(&params, &e0, &f0).unwrap();
    let r = bohr_color(&lifted.a, params.equation(), &sp).unwrap();
    let golden_ok = r.report.proper
        && cayley_conflict(&lifted.a, &r.coloring.colors).is_none()
        && (!r.report.claim.passed || r.report.within_budget);
    pass &= golden_ok;
    details.push(format!(
        "golden: proper {}, colors {}, claim {}, |L|={} |B|={}",
        r.report.proper,
        r.report.colors_used,
        r.report.claim.passed,
        r.report.spectrum_size,
        r.report.bohr_size
    ));

    // a chi-vanishing equation for the random sets
    let eq4 = Equation::new(vec![1, -2, 3, -4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let primes: Vec<u64> = (101..=499).filter(|&p| is_prime(p)).collect();
    let (mut claims, mut improper) = (0, 0);
    let mut check = |a: &ElementSet, eq: &Equation, pass: &mut bool| {
        let r = bohr_color(a, eq, &sp).unwrap();
        let graph = CayleyView::new(a.group(), a)
            .unwrap()
            .to_bitgraph()
            .unwrap();
        let proper = r.report.proper && r.coloring.is_proper(&graph);
        if !proper {
            improper += 1;
        }
        if r.report.claim.passed {
            claims += 1;
            *pass &= r.report.within_budget && r.report.max_cell_degree <= 2 * (r.report.k - 1);
        }
        *pass &= proper;
    };
    for _ in 0..BOHR_RANDOM_SETS {
        let p = primes[rng.random_range(0..primes.len())];
        let a = ElementSet::from_predicate(&zp(p), |x| x != 0 && rng.random_bool(0.3)).unwrap();
        check(&a, &eq4, &mut pass);
    }
    // middle intervals, where the claim holds and the budget applies
    for p in [101u64, 211, 307, 499] {
        let a = ElementSet::from_predicate(&zp(p), |x| 4 * x as u64 >= p && 4 * (x as u64) < 3 * p)
            .unwrap();
        check(&a, &eq4, &mut pass);
    }
    details.push(format!("{BOHR_RANDOM_SETS} random and 4 interval sets: {improper} improper, claim passed on {claims}"));
    report(9, "Bohr-cell coloring", pass, &details.join("; "));
}

/// Zero-sum subsets by bitmask enumeration.
fn classify_oracle(c: &[i64]) -> (bool, bool, bool) {
    let k = c.len();
    let (mut rt, mut chi) = (false, false);
    for mask in 1u32..(1 << k) {
        let s: i64 = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| c[i]).sum();
        if s == 0 {
            rt = true;
            chi |= mask.count_ones() >= 3;
        }
    }
    (c.iter().sum::<i64>() == 0, rt, chi)
}

#[test]
fn criterion_10_classification() {
    let region = |c: Vec<i64>| {
        let cl = classify(&Equation::new(c).unwrap()).unwrap();
        if cl.roth_degenerate {
            "roth"
        } else if cl.chi_vanishing {
            "chi"
        } else if cl.rt_degenerate {
            "rt"
        } else {
            "none"
        }
    };
    let exemplars = [
        (vec![1, -1, 3], "rt"),
        (vec![1, -2, 3, -4], "chi"),
        (vec![1, -3, 2], "roth"),
    ];
    let mut pass = exemplars.iter().all(|(c, want)| region(c.clone()) == *want);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let (mut chain, mut oracle) = (0, 0);
    for _ in 0..CLASSIFY_SAMPLES {
        let k = rng.random_range(3..=10);
        let eq = random_equation(k, 6, &mut rng);
        let cl = classify(&eq).unwrap();
        if (cl.roth_degenerate && !cl.chi_vanishing) || (cl.chi_vanishing && !cl.rt_degenerate) {
            chain += 1;
        }
        if classify_oracle(eq.coeffs()) != (cl.roth_degenerate, cl.rt_degenerate, cl.chi_vanishing)
        {
            oracle += 1;
        }
    }
    pass &= chain == 0 && oracle == 0;
    report(
        10,
        "classification hierarchy",
        pass,
        &format!("exemplars in their regions; {CLASSIFY_SAMPLES} random vectors, {chain} chain violations, {oracle} oracle disagreements"),
    );
}

#[test]
fn criterion_11_gauss_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0011);
    let triples: Vec<GaussParams> = (0..GAUSS_TRIPLES)
        .map(|_| {
            let c = rng.random_range(0.5..2.0);
            let big = c * rng.random_range(1.0..2.0);
            GaussParams::new(rng.random_range(1.0..2.5), c, big).unwrap()
        })
        .collect();
    let results: Vec<(f64, bool, bool)> = triples
        .par_iter()
        .enumerate()
        .map(|(i, gp)| {
            let alpha = gauss_alpha(gp);
            let diff = (alpha - gauss_alpha_integrated(gp)).abs();
            let rho = gp.rho0();
            let rect = rectangle_probability_integrated(gp, rho)
                .min(rectangle_probability_integrated(gp, -rho));
            let mc = gauss_alpha_monte_carlo(gp, GAUSS_MC_SAMPLES, 1000 + i as u64);
            (diff, rect >= alpha - GAUSS_TOL, mc.passed)
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let mc_fail = results.iter().filter(|r| !r.2).count();
    let rect_fail = results.iter().filter(|r| !r.1).count();
    let pass = worst <= GAUSS_TOL && mc_fail == 0 && rect_fail == 0;
    report(
        11,
        "Gaussian rectangle constant",
        pass,
        &format!("{GAUSS_TRIPLES} triples, worst quadrature gap {worst:.2e}, {rect_fail} rectangle and {mc_fail} Monte Carlo failures ({GAUSS_MC_SAMPLES} samples, 3σ)"),
    );
}
