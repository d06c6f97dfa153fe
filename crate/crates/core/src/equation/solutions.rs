use std::collections::HashMap;

use serde::Serialize;

use crate::arith::{is_prime, reduce};
use crate::error::{Error, Result};
use crate::group::{ElementSet, GroupElement, GroupSpec};

use super::Equation;

/// Ceiling on `|A|^k` for exhaustive tuple enumeration.
pub const DEFAULT_BRUTE_CAP: u128 = 200_000_000;
/// Above this many left-half tuples the solution search splits the
/// variables into two halves instead of solving for the last one.
pub const DEFAULT_SEARCH_BUDGET: u128 = 50_000_000;
/// Dense bucket tables are used for moduli up to this size.
const DENSE_TABLE_MAX: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionSearch {
    pub solution_free: bool,
    /// Pairwise distinct `(x1, ..., xk)` with `Σ c_i x_i = 0`, in variable order.
    pub witness: Option<Vec<u64>>,
}

impl SolutionSearch {
    fn from_witness(witness: Option<Vec<u64>>) -> Self {
        SolutionSearch {
            solution_free: witness.is_none(),
            witness,
        }
    }
}

/// Tests `A ⊆ F_p` for an injective solution of `eq`.
pub fn is_solution_free(eq: &Equation, set: &ElementSet) -> Result<SolutionSearch> {
    let p = set.group().cyclic_modulus().ok_or(Error::NotPrimeField)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p <= eq.max_abs() {
        return Err(Error::ModulusTooSmall {
            modulus: p,
            max_coeff: eq.max_abs(),
        });
    }
    is_solution_free_in(eq, set)
}

/// Same as [`is_solution_free`] over any cyclic group `Z_N`.
pub fn is_solution_free_in(eq: &Equation, set: &ElementSet) -> Result<SolutionSearch> {
    let n = set.group().cyclic_modulus().ok_or(Error::NotPrimeField)?;
    let members: Vec<u64> = set.iter().map(|i| i as u64).collect();
    Ok(SolutionSearch::from_witness(find_injective_solution(
        eq,
        n,
        &members,
        DEFAULT_SEARCH_BUDGET,
    )))
}

/// Buckets of right-half tuples keyed by their partial sum.
enum Buckets {
    Dense { start: Vec<u32>, entries: Vec<u32> },
    Sparse(HashMap<u64, Vec<u32>>),
}

impl Buckets {
    fn build(keys: &[u64], modulus: u64) -> Self {
        if modulus <= DENSE_TABLE_MAX {
            let mut start = vec![0u32; modulus as usize + 1];
            for &k in keys {
                start[k as usize + 1] += 1;
            }
            for i in 0..modulus as usize {
                start[i + 1] += start[i];
            }
            let mut fill = start.clone();
            let mut entries = vec![0u32; keys.len()];
            for (id, &k) in keys.iter().enumerate() {
                entries[fill[k as usize] as usize] = id as u32;
                fill[k as usize] += 1;
            }
            Buckets::Dense { start, entries }
        } else {
            let mut map: HashMap<u64, Vec<u32>> = HashMap::new();
            for (id, &k) in keys.iter().enumerate() {
                map.entry(k).or_default().push(id as u32);
            }
            Buckets::Sparse(map)
        }
    }

    fn get(&self, key: u64) -> &[u32] {
        match self {
            Buckets::Dense { start, entries } => {
                let k = key as usize;
                &entries[start[k] as usize..start[k + 1] as usize]
            }
            Buckets::Sparse(map) => map.get(&key).map_or(&[], |v| v.as_slice()),
        }
    }
}

/// Enumerates injective tuples over `members` for the given coefficients,
/// calling `visit(values, partial_sum)`; stops when `visit` returns true.
fn for_each_injective(
    coeffs: &[u64],
    members: &[u64],
    modulus: u64,
    visit: &mut dyn FnMut(&[u64], u64) -> bool,
) -> bool {
    fn rec(
        depth: usize,
        coeffs: &[u64],
        members: &[u64],
        modulus: u64,
        stack: &mut Vec<u64>,
        sum: u64,
        visit: &mut dyn FnMut(&[u64], u64) -> bool,
    ) -> bool {
        if depth == coeffs.len() {
            return visit(stack, sum);
        }
        for &x in members {
            if stack.contains(&x) {
                continue;
            }
            let s = ((sum as u128 + coeffs[depth] as u128 * x as u128) % modulus as u128) as u64;
            stack.push(x);
            let stop = rec(depth + 1, coeffs, members, modulus, stack, s, visit);
            stack.pop();
            if stop {
                return true;
            }
        }
        false
    }
    let mut stack = Vec::with_capacity(coeffs.len());
    rec(0, coeffs, members, modulus, &mut stack, 0, visit)
}

/// Finds an injective solution of `eq` with all values in `members ⊆ Z_modulus`.
///
/// The last variable (or, when `|A|^(k-1)` exceeds `budget`, the last `⌊k/2⌋`
/// variables) are tabulated by partial sum; the remaining variables are
/// enumerated and matched against the table. Distinctness is checked exactly
/// across both halves.
pub fn find_injective_solution(
    eq: &Equation,
    modulus: u64,
    members: &[u64],
    budget: u128,
) -> Option<Vec<u64>> {
    let k = eq.k();
    if members.len() < k {
        return None;
    }
    let coeffs: Vec<u64> = eq.coeffs().iter().map(|&c| reduce(c, modulus)).collect();
    let a = members.len() as u128;
    let right_len = if a.saturating_pow(k as u32 - 1) <= budget || k <= 3 {
        1
    } else {
        k / 2
    };
    let left_len = k - right_len;
    let (left_c, right_c) = coeffs.split_at(left_len);

    let mut right_tuples: Vec<Vec<u64>> = Vec::new();
    let mut right_keys: Vec<u64> = Vec::new();
    for_each_injective(right_c, members, modulus, &mut |vals, s| {
        right_tuples.push(vals.to_vec());
        right_keys.push(s);
        false
    });
    let buckets = Buckets::build(&right_keys, modulus);

    let mut found = None;
    for_each_injective(left_c, members, modulus, &mut |vals, s| {
        let target = (modulus - s) % modulus;
        for &id in buckets.get(target) {
            let r = &right_tuples[id as usize];
            if r.iter().all(|x| !vals.contains(x)) {
                let mut w = vals.to_vec();
                w.extend_from_slice(r);
                found = Some(w);
                return true;
            }
        }
        false
    });
    found
}

fn check_cap(set: &ElementSet, k: usize) -> Result<()> {
    let size = (set.len() as u128).saturating_pow(k as u32);
    if size > DEFAULT_BRUTE_CAP {
        return Err(Error::CapExceeded {
            what: "tuple enumeration |A|^k",
            size,
            cap: DEFAULT_BRUTE_CAP,
        });
    }
    Ok(())
}

/// Exhaustive histogram over all right-hand sides: entry `y` counts tuples in
/// `A^k` with `Σ c_i x_i = y` (indices in the group's canonical encoding).
pub fn solution_histogram_brute(
    eq: &Equation,
    set: &ElementSet,
    injective: bool,
) -> Result<Vec<u64>> {
    check_cap(set, eq.k())?;
    let g = set.group();
    let members: Vec<usize> = set.iter().collect();
    let scaled: Vec<Vec<usize>> = eq
        .coeffs()
        .iter()
        .map(|&c| members.iter().map(|&x| g.scalar_mul_index(c, x)).collect())
        .collect();
    let mut hist = vec![0u64; g.order()];
    let mut chosen: Vec<usize> = Vec::with_capacity(eq.k());

    #[allow(clippy::too_many_arguments)]
    fn rec(
        depth: usize,
        sum: usize,
        g: &GroupSpec,
        scaled: &[Vec<usize>],
        injective: bool,
        chosen: &mut Vec<usize>,
        hist: &mut [u64],
    ) {
        if depth == scaled.len() {
            hist[sum] += 1;
            return;
        }
        for (j, &v) in scaled[depth].iter().enumerate() {
            if injective && chosen.contains(&j) {
                continue;
            }
            chosen.push(j);
            rec(
                depth + 1,
                g.add_index(sum, v),
                g,
                scaled,
                injective,
                chosen,
                hist,
            );
            chosen.pop();
        }
    }
    rec(0, 0, g, &scaled, injective, &mut chosen, &mut hist);
    Ok(hist)
}

/// Number of tuples in `A^k` with `Σ c_i x_i = y`, optionally requiring
/// pairwise distinct coordinates. Exhaustive enumeration.
pub fn count_solutions_brute(
    eq: &Equation,
    set: &ElementSet,
    y: &GroupElement,
    injective: bool,
) -> Result<u64> {
    let yi = set.group().index_of(y)?;
    if set.is_empty() {
        return Ok(0);
    }
    Ok(solution_histogram_brute(eq, set, injective)?[yi])
}

/// Solutions in `A^k` with at least two equal coordinates.
pub fn count_duplicate_solutions_brute(
    eq: &Equation,
    set: &ElementSet,
    y: &GroupElement,
) -> Result<u64> {
    Ok(count_solutions_brute(eq, set, y, false)? - count_solutions_brute(eq, set, y, true)?)
}

/// Injective solution count.
///
/// For `k <= 5` this uses inclusion–exclusion over the lattice of
/// coordinate-equality partitions, each term being an exact convolution
/// count; larger `k` falls back to enumeration with distinctness filters.
pub fn count_solutions_injective(eq: &Equation, set: &ElementSet, y: &GroupElement) -> Result<u64> {
    let yi = set.group().index_of(y)?;
    if eq.k() > 5 {
        return count_solutions_brute(eq, set, y, true);
    }
    let g = set.group();
    let k = eq.k();
    let mut total: i128 = 0;
    for blocks in set_partitions(k) {
        let mut mobius: i128 = 1;
        let mut block_coeffs = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let s = b.len() as i128;
            let fact: i128 = (1..s).product();
            mobius *= if (s - 1) % 2 == 0 { fact } else { -fact };
            block_coeffs.push(b.iter().map(|&i| eq.coeffs()[i]).sum::<i64>());
        }
        total += mobius * convolution_count(g, set, &block_coeffs)[yi] as i128;
    }
    u64::try_from(total).map_err(|_| Error::OutOfRange("negative inclusion–exclusion total".into()))
}

/// Histogram of `Σ s_j z_j` over `(z_j) ∈ A^len`, by iterated convolution.
fn convolution_count(g: &GroupSpec, set: &ElementSet, coeffs: &[i64]) -> Vec<u64> {
    let n = g.order();
    let mut dist = vec![0u64; n];
    dist[0] = 1;
    for &s in coeffs {
        let mut step = vec![0u64; n];
        for a in set.iter() {
            step[g.scalar_mul_index(s, a)] += 1;
        }
        let support: Vec<(usize, u64)> = step
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
            .collect();
        let mut next = vec![0u64; n];
        for (t, &d) in dist.iter().enumerate() {
            if d == 0 {
                continue;
            }
            for &(v, c) in &support {
                next[g.add_index(t, v)] += d * c;
            }
        }
        dist = next;
    }
    dist
}

/// All set partitions of `{0..k}` as lists of blocks (restricted growth strings).
fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; k];
    fn rec(i: usize, max: usize, rgs: &mut [usize], out: &mut Vec<Vec<Vec<usize>>>) {
        if i == rgs.len() {
            let nb = rgs.iter().max().map_or(0, |m| m + 1);
            let mut blocks = vec![Vec::new(); nb];
            for (idx, &b) in rgs.iter().enumerate() {
                blocks[b].push(idx);
            }
            out.push(blocks);
            return;
        }
        for b in 0..=max {
            rgs[i] = b;
            rec(i + 1, if b == max { max + 1 } else { max }, rgs, out);
        }
    }
    if k == 0 {
        return vec![vec![]];
    }
    rgs[0] = 0;
    rec(1, 1, &mut rgs, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(p: u64) -> GroupSpec {
        GroupSpec::cyclic(p).unwrap()
    }

    fn set(p: u64, xs: &[u64]) -> ElementSet {
        ElementSet::from_residues(&zp(p), xs).unwrap()
    }

    fn eq(c: &[i64]) -> Equation {
        Equation::new(c.to_vec()).unwrap()
    }

    /// Plain oracle: all k-tuples, distinctness filter.
    fn oracle_witnesses(e: &Equation, p: u64, xs: &[u64]) -> Vec<Vec<u64>> {
        let k = e.k();
        let mut out = Vec::new();
        let total = xs.len().pow(k as u32);
        for mut code in 0..total {
            let mut t = Vec::with_capacity(k);
            for _ in 0..k {
                t.push(xs[code % xs.len()]);
                code /= xs.len();
            }
            let distinct = (0..k).all(|i| (i + 1..k).all(|j| t[i] != t[j]));
            if distinct && e.evaluate_mod(&t, p) == 0 {
                out.push(t);
            }
        }
        out
    }

    #[test]
    fn solution_free_examples() {
        let schur = eq(&[1, 1, -1]);
        assert!(
            is_solution_free(&schur, &set(5, &[1, 2]))
                .unwrap()
                .solution_free
        );

        let r = is_solution_free(&schur, &set(7, &[1, 2, 3])).unwrap();
        assert!(!r.solution_free);
        assert_eq!(r.witness, Some(vec![1, 2, 3]));
        assert_eq!(oracle_witnesses(&schur, 7, &[1, 2, 3]).len(), 2);

        let e = eq(&[1, -3, 2]);
        let r = is_solution_free(&e, &set(11, &[1, 2, 3, 4])).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(e.evaluate_mod(&w, 11), 0);
        assert!(oracle_witnesses(&e, 11, &[1, 2, 3, 4]).contains(&w));
    }

    #[test]
    fn solution_free_errors() {
        let e = eq(&[1, 1, -7]);
        assert!(matches!(
            is_solution_free(&e, &set(7, &[1])),
            Err(Error::ModulusTooSmall { .. })
        ));
        assert!(matches!(
            is_solution_free(&eq(&[1, 1, -1]), &set(9, &[1])),
            Err(Error::NotPrime(9))
        ));
    }

    #[test]
    fn split_search_agrees_with_oracle() {
        // force the two-halves search with a tiny budget
        let e = eq(&[1, 2, -1, -2, 3]);
        for seed in 0..40u64 {
            let p = 13;
            let xs: Vec<u64> = (0..p)
                .filter(|x| (seed >> (x % 13)) & 1 == 1 || x * seed % 5 == 1)
                .collect();
            let split = find_injective_solution(&e, p, &xs, 0);
            let oracle = oracle_witnesses(&e, p, &xs);
            assert_eq!(split.is_some(), !oracle.is_empty(), "seed {seed}");
            if let Some(w) = split {
                assert!(oracle.contains(&w));
            }
        }
    }

    #[test]
    fn counting_examples() {
        let schur = eq(&[1, 1, -1]);
        let full = ElementSet::full(&zp(5)).unwrap();
        let zero = GroupElement::new(vec![0]);
        assert_eq!(
            count_solutions_brute(&schur, &full, &zero, false).unwrap(),
            25
        );
        let empty = ElementSet::empty(&zp(5)).unwrap();
        assert_eq!(
            count_solutions_brute(&schur, &empty, &zero, false).unwrap(),
            0
        );
        // {0,1,3} in F_7: (x1,x2,x3) with x1+x2=x3; frozen from the 27-tuple oracle
        let a = set(7, &[0, 1, 3]);
        let oracle = (0..27)
            .filter(|c| {
                let t = [[0, 1, 3][c % 3], [0, 1, 3][c / 3 % 3], [0, 1, 3][c / 9]];
                (t[0] + t[1]) % 7 == t[2] % 7
            })
            .count();
        assert_eq!(oracle, 5);
        assert_eq!(count_solutions_brute(&schur, &a, &zero, false).unwrap(), 5);
    }

    #[test]
    fn inclusion_exclusion_matches_enumeration() {
        for (c, p, xs) in [
            (vec![1, 1, -1], 7u64, vec![0u64, 1, 2, 3, 5]),
            (vec![1, -2, 3, -4], 11, vec![1, 2, 4, 5, 7, 8, 10]),
            (vec![2, 2, 3, -1, 1], 5, vec![0, 1, 2, 3, 4]),
        ] {
            let e = eq(&c);
            let a = set(p, &xs);
            for y in 0..p {
                let y = GroupElement::new(vec![y]);
                assert_eq!(
                    count_solutions_injective(&e, &a, &y).unwrap(),
                    count_solutions_brute(&e, &a, &y, true).unwrap()
                );
            }
        }
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let bell: Vec<usize> = (0..=5).map(|k| set_partitions(k).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn counts_over_product_group() {
        let g = GroupSpec::power(3, 2).unwrap();
        let a = ElementSet::full(&g).unwrap();
        let e = eq(&[1, 1, 1]);
        // every (x1, x2) determines x3
        assert_eq!(count_solutions_brute(&e, &a, &g.zero(), false).unwrap(), 81);
    }

    #[test]
    fn cap_is_reported() {
        let big = ElementSet::full(&zp(1009)).unwrap();
        let r = count_solutions_brute(&eq(&[1, 1, -1]), &big, &GroupElement::new(vec![0]), false);
        assert!(matches!(r, Err(Error::CapExceeded { .. })));
    }
}
