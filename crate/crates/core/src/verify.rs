//! Invariant suites run by `fqlab verify`. Each check reports pass/fail
//! with a one-line detail; none of them panic on a violated invariant.

use num_traits::One;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::arith::{odd_prime_powers_in, odd_primes_in, prime_powers_in};
use crate::charsum::{gauss_sum, product_irregularity, product_irregularity_brute_2d, squares_bound_report};
use crate::error::Result;
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{count_irreducible, Poly};
use crate::sets::{image_set, PiSet};
use crate::splitting::SplittingType;
use crate::stats::{
    cauchy_density, conjugacy_class_size, enumerate_splitting_types, rational_sum, run_exhaustive,
    ExperimentConfig, Mode,
};
use crate::sets::SetRecipe;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }
}

/// Visits every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Densities sum to 1 and class sizes match a tally over all of `S_n`.
pub fn class_equation(max_n: usize) -> Result<Check> {
    let mut bad = Vec::new();
    for n in 1..=max_n {
        let types = enumerate_splitting_types(n)?;
        let dens: Vec<_> = types.iter().map(cauchy_density).collect();
        if !rational_sum(&dens).is_one() {
            bad.push(format!("n={n}: densities do not sum to 1"));
        }
        let mut tally = std::collections::BTreeMap::<SplittingType, u128>::new();
        for_each_permutation(n, |p| *tally.entry(SplittingType::of_permutation(p)).or_default() += 1);
        for t in &types {
            let got = tally.get(t).copied().unwrap_or(0);
            if got != conjugacy_class_size(t) {
                bad.push(format!("n={n} type {t}: tally {got} vs {}", conjugacy_class_size(t)));
            }
        }
    }
    Ok(Check::new("class-equation", bad.is_empty(), summary(&bad, format!("n = 1..{max_n}"))))
}

/// Exhaustive irreducible counts over uniform coefficients equal the Möbius formula.
pub fn prime_polynomial_theorem(qs: &[u64], max_n: usize) -> Result<Check> {
    let mut bad = Vec::new();
    for &q in qs {
        let f = FieldSpec::of_order(q)?;
        for n in 1..=max_n {
            let r = run_exhaustive(&ExperimentConfig::new(&f, n, &[SetRecipe::uniform()], Mode::Exhaustive)?)?;
            let i = r.index_of(&SplittingType::irreducible(n)).expect("type present");
            let want = count_irreducible(n as u32, &f)?;
            if r.counts[i] as u128 != want {
                bad.push(format!("q={q} n={n}: {} vs {want}", r.counts[i]));
            }
        }
    }
    Ok(Check::new("prime-polynomial-theorem", bad.is_empty(), summary(&bad, format!("q in {qs:?}, n <= {max_n}"))))
}

pub const GAUSS_TOLERANCE: f64 = 1e-9;

/// `|g(beta)| = sqrt(q)` for `beta != 0` and `g(0) = 0`.
pub fn gauss_sums(max_q: u64) -> Result<Check> {
    let mut worst = 0.0f64;
    let grid = odd_prime_powers_in(3, max_q);
    for &q in &grid {
        let f = FieldSpec::of_order(q)?;
        worst = worst.max(gauss_sum(&f, FieldElement::ZERO)?.norm());
        for beta in f.elements().skip(1) {
            worst = worst.max((gauss_sum(&f, beta)?.norm() - (q as f64).sqrt()).abs());
        }
    }
    Ok(Check::new(
        "gauss-sums",
        worst <= GAUSS_TOLERANCE,
        format!("{} fields up to q={max_q}, max deviation {worst:.3e}", grid.len()),
    ))
}

/// `irreg(squares) >= sqrt(q) - 1` over odd prime powers up to `max_q`.
pub fn squares_irregularity(max_q: u64) -> Result<Check> {
    let rows = squares_bound_report(&odd_prime_powers_in(3, max_q))?;
    let failing: Vec<String> = rows.iter().filter(|r| !r.holds).map(|r| format!("q={}", r.q)).collect();
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(Check::new(
        "squares-irregularity",
        failing.is_empty(),
        summary(&failing, format!("{} fields up to q={max_q}, min margin {min_margin:.6}", rows.len())),
    ))
}

/// `irreg(S x S) = irreg(S)^2` by multiplicativity and by the 2D sum.
pub fn product_irregularity_check(qs: &[u64]) -> Result<Check> {
    let mut worst = 0.0f64;
    for &q in qs {
        let f = FieldSpec::of_order(q)?;
        let sq = PiSet::squares(&f);
        let s = sq.elements();
        let by_identity = product_irregularity(&f, &[s, s])?;
        let brute = product_irregularity_brute_2d(&f, s, s)?;
        worst = worst.max((by_identity - brute).abs());
    }
    Ok(Check::new("product-irregularity", worst <= GAUSS_TOLERANCE, format!("q in {qs:?}, max deviation {worst:.3e}")))
}

/// `qchar(disc P) = (-1)^(n - r)` for random squarefree monic `P`.
pub fn stickelberger(samples: u64, seed: u64, max_q: u64, degrees: std::ops::RangeInclusive<usize>) -> Result<Check> {
    let fields: Vec<FieldSpec> =
        odd_prime_powers_in(3, max_q).into_iter().map(FieldSpec::of_order).collect::<Result<_>>()?;
    let degrees: Vec<usize> = degrees.collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng, len: usize| ((rng.next_u64() as u128 * len as u128) >> 64) as usize;
    let mut violations = Vec::new();
    let mut done = 0u64;
    while done < samples {
        let f = &fields[pick(&mut rng, fields.len())];
        let n = degrees[pick(&mut rng, degrees.len())];
        let mut coeffs: Vec<FieldElement> =
            (0..n).map(|_| FieldElement::from_index(pick(&mut rng, f.q() as usize) as u32)).collect();
        coeffs.push(FieldElement::ONE);
        let p = Poly::new(f, coeffs);
        let disc = p.discriminant()?;
        if disc.is_zero() {
            continue;
        }
        done += 1;
        let r = p.splitting_type()?.parts() as usize;
        let want = if (n - r).is_multiple_of(2) { 1 } else { -1 };
        if f.qchar(disc)? != want && violations.len() < 5 {
            violations.push(format!("q={} coeffs={:?}", f.q(), p.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>()));
        }
    }
    Ok(Check::new(
        "stickelberger",
        violations.is_empty(),
        summary(&violations, format!("{samples} squarefree polynomials, seed {seed}")),
    ))
}

/// Square counts, the `[x^2, -x^2]` intersection and the fiber bound on images.
pub fn set_machinery(max_q: u64, images: usize, seed: u64) -> Result<Check> {
    let mut bad = Vec::new();
    for q in odd_prime_powers_in(3, max_q) {
        let f = FieldSpec::of_order(q)?;
        let size = PiSet::squares(&f).len() as u64;
        if size != q.div_ceil(2) {
            bad.push(format!("#squares(F_{q}) = {size}"));
        }
    }
    for q in odd_primes_in(3, 200).into_iter().take(40) {
        let f = FieldSpec::of_order(q)?;
        let set = SetRecipe::intersection(vec![vec![0, 0, 1], vec![0, 0, -1]]).build(&f)?;
        let ok = if q % 4 == 3 {
            set.elements() == [FieldElement::ZERO]
        } else {
            set.elements() == PiSet::squares(&f).elements()
        };
        if !ok {
            bad.push(format!("[x^2, -x^2] over F_{q} has size {}", set.len()));
        }
    }
    let orders = prime_powers_in(2, max_q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng, len: u64| ((rng.next_u64() as u128 * len as u128) >> 64) as u64;
    for _ in 0..images {
        let q = orders[pick(&mut rng, orders.len() as u64) as usize];
        let f = FieldSpec::of_order(q)?;
        let deg = 1 + pick(&mut rng, 6) as usize;
        let mut coeffs: Vec<FieldElement> =
            (0..deg).map(|_| FieldElement::from_index(pick(&mut rng, q) as u32)).collect();
        coeffs.push(FieldElement::from_index(1 + pick(&mut rng, q - 1) as u32));
        let poly = Poly::new(&f, coeffs);
        let size = image_set(&poly)?.len() as u64;
        if size * (deg as u64) < q {
            bad.push(format!("#f(F_{q}) = {size} < q/{deg}"));
        }
    }
    Ok(Check::new("set-machinery", bad.is_empty(), summary(&bad, format!("q <= {max_q}, {images} random images"))))
}

/// The standard suites at full size.
pub fn all(seed: u64) -> Result<Vec<Check>> {
    Ok(vec![
        class_equation(7)?,
        prime_polynomial_theorem(&[2, 3, 4, 5, 7, 8, 9], 4)?,
        gauss_sums(343)?,
        squares_irregularity(361)?,
        product_irregularity_check(&[9, 25, 49])?,
        stickelberger(100_000, seed, 81, 2..=8)?,
        set_machinery(1009, 200, seed)?,
    ])
}

fn summary(bad: &[String], ok: String) -> String {
    if bad.is_empty() {
        ok
    } else {
        format!("{} failures: {}", bad.len(), bad.iter().take(5).cloned().collect::<Vec<_>>().join("; "))
    }
}
