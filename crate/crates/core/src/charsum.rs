//! Fourier coefficients of indicator functions, irregularity and Gauss sums.
//!
//! `1_S^(beta) = (1/q) sum_{alpha in S} e_q(alpha beta)`, with
//! `e_q(a) = exp(2 pi i Tr(a) / p)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::prime_power;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

#[derive(Debug, Clone)]
pub struct Spectrum {
    field: FieldSpec,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Indexed by the canonical index of `beta`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, beta: FieldElement) -> Complex64 {
        self.values[beta.index() as usize]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_beta |1_S^(beta)|^2`, which equals `#S / q`.
    pub fn parseval_sum(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `sum_beta |1_S^(beta)|`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }
}

fn checked_set(field: &FieldSpec, set: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let mut s = set.to_vec();
    if let Some(a) = s.iter().find(|a| a.index() >= field.q()) {
        return Err(Error::ElementOutOfRange(a.index() as u64));
    }
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// Direct `O(q #S)` evaluation. For each `beta` the elements of `S` are
/// bucketed by `Tr(alpha beta)` and the `p` buckets weighted by roots of unity.
pub fn fourier_indicator(field: &FieldSpec, set: &[FieldElement]) -> Result<Spectrum> {
    let set = checked_set(field, set)?;
    let p = field.p() as usize;
    let q = field.q() as f64;
    let roots: Vec<Complex64> = (0..p)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / p as f64))
        .collect();
    let values = field
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&beta| {
            let mut buckets = vec![0u64; p];
            for &a in &set {
                buckets[field.trace(field.mul(a, beta)) as usize] += 1;
            }
            buckets
                .iter()
                .zip(&roots)
                .map(|(&c, r)| r * c as f64)
                .sum::<Complex64>()
                / q
        })
        .collect();
    Ok(Spectrum { field: field.clone(), values })
}

/// `(q / #S) sum_beta |1_S^(beta)|`.
pub fn irregularity(field: &FieldSpec, set: &[FieldElement]) -> Result<f64> {
    let spec = fourier_indicator(field, set)?;
    let size = spec.values[0].re * field.q() as f64;
    if size < 0.5 {
        return Err(Error::EmptySet);
    }
    Ok(field.q() as f64 / size * spec.l1_norm())
}

/// `irreg(S_1 x ... x S_n) = prod irreg(S_i)`.
pub fn product_irregularity(field: &FieldSpec, sets: &[&[FieldElement]]) -> Result<f64> {
    if sets.is_empty() {
        return Err(Error::EmptySet);
    }
    sets.iter().map(|s| irregularity(field, s)).product()
}

/// Irregularity of `S_1 x S_2` in `F_q^2` by the full two-dimensional sum
/// over `q^2` frequencies and `#S_1 #S_2` points.
pub fn product_irregularity_brute_2d(field: &FieldSpec, s1: &[FieldElement], s2: &[FieldElement]) -> Result<f64> {
    let s1 = checked_set(field, s1)?;
    let s2 = checked_set(field, s2)?;
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptySet);
    }
    let q = field.q() as f64;
    let elems: Vec<FieldElement> = field.elements().collect();
    let l1: f64 = elems
        .par_iter()
        .map(|&b1| {
            let mut acc = 0.0;
            for &b2 in &elems {
                let mut v = Complex64::new(0.0, 0.0);
                for &a1 in &s1 {
                    for &a2 in &s2 {
                        v += field.add_char(field.add(field.mul(a1, b1), field.mul(a2, b2)));
                    }
                }
                acc += v.norm() / (q * q);
            }
            acc
        })
        .sum();
    Ok(q * q / (s1.len() * s2.len()) as f64 * l1)
}

/// `sum_{alpha != 0} qchar(alpha) e_q(alpha beta)`.
pub fn gauss_sum(field: &FieldSpec, beta: FieldElement) -> Result<Complex64> {
    if !field.is_odd() {
        return Err(Error::EvenCharacteristic);
    }
    let mut g = Complex64::new(0.0, 0.0);
    for a in field.elements().skip(1) {
        g += field.add_char(field.mul(a, beta)) * field.qchar(a)? as f64;
    }
    Ok(g)
}

pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquaresBoundRow {
    pub q: u64,
    pub irregularity: f64,
    /// `sqrt(q) - 1`.
    pub bound: f64,
    pub margin: f64,
    /// `min_{beta != 0} |1_S^(beta)|`.
    pub min_frequency: f64,
    /// `(sqrt(q) - 1) / (2q)`.
    pub frequency_bound: f64,
    pub holds: bool,
}

/// Irregularity of the squares (with 0) against `sqrt(q) - 1` for each odd prime power.
pub fn squares_bound_report(grid: &[u64]) -> Result<Vec<SquaresBoundRow>> {
    for &q in grid {
        match prime_power(q) {
            Some((2, _)) => return Err(Error::EvenCharacteristic),
            Some(_) => {}
            None => return Err(Error::InvalidConfig(format!("{q} is not a prime power"))),
        }
    }
    grid.par_iter()
        .map(|&q| {
            let field = FieldSpec::of_order(q)?;
            let squares: Vec<FieldElement> = field.elements().filter(|&a| field.qchar(a) != Ok(-1)).collect();
            let spec = fourier_indicator(&field, &squares)?;
            let irreg = q as f64 / squares.len() as f64 * spec.l1_norm();
            let sqrt_q = (q as f64).sqrt();
            let bound = sqrt_q - 1.0;
            let min_frequency = spec.values[1..].iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
            let frequency_bound = bound / (2.0 * q as f64);
            Ok(SquaresBoundRow {
                q,
                irregularity: irreg,
                bound,
                margin: irreg - bound,
                min_frequency,
                frequency_bound,
                holds: irreg >= bound - BOUND_TOLERANCE && min_frequency >= frequency_bound - BOUND_TOLERANCE,
            })
        })
        .collect()
}
