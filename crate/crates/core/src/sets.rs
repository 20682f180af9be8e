//! Coefficient sets of bounded complexity.
//!
//! A [`PiSet`] is an intersection of polynomial images `f_1(F_q) ∩ ... ∩ f_k(F_q)`;
//! a [`ComplexSet`] is a union of such intersections. Both are materialized as
//! sorted, duplicate-free element lists.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::Poly;

/// Largest field order for which sets are materialized.
pub const MAX_SET_FIELD: u32 = 1 << 24;

/// `{ f(a) : a in F_q }`, sorted by canonical index.
pub fn image_set(f: &Poly) -> Result<Vec<FieldElement>> {
    let deg = f.degree().ok_or(Error::ConstantPolynomial)?;
    if deg == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let field = f.field();
    let mut hit = membership(field)?;
    let sparse: Vec<(u64, FieldElement)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, &c)| (i as u64, c))
        .collect();
    // Horner costs `deg` per point; term-by-term powering wins for sparse
    // high-degree generators such as x^q - x + a.
    let use_sparse = sparse.len() * 32 < deg;
    for a in field.elements() {
        let v = if use_sparse {
            sparse
                .iter()
                .fold(FieldElement::ZERO, |acc, &(i, c)| field.add(acc, field.mul(c, field.pow(a, i))))
        } else {
            f.eval(a)
        };
        hit[v.index() as usize] = true;
    }
    Ok(collect(&hit))
}

/// Replaces `f(x) = g(x^{p^r})` by `g`; the image over `F_q` is unchanged
/// because `x -> x^p` permutes `F_q`.
pub fn normalize_separable(f: &Poly) -> Poly {
    let p = f.field().p() as usize;
    let mut coeffs = f.coeffs().to_vec();
    loop {
        if coeffs.len() <= 1 {
            break;
        }
        let all_divisible = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .all(|(i, c)| c.is_zero() || i % p == 0);
        if !all_divisible {
            break;
        }
        coeffs = coeffs.iter().step_by(p).copied().collect();
    }
    Poly::new(f.field(), coeffs)
}

fn membership(field: &FieldSpec) -> Result<Vec<bool>> {
    if field.q() > MAX_SET_FIELD {
        return Err(Error::InvalidConfig(format!(
            "sets are materialized only for q <= {MAX_SET_FIELD}, got {}",
            field.q()
        )));
    }
    Ok(vec![false; field.q() as usize])
}

fn collect(hit: &[bool]) -> Vec<FieldElement> {
    hit.iter()
        .enumerate()
        .filter(|(_, &h)| h)
        .map(|(i, _)| FieldElement::from_index(i as u32))
        .collect()
}

/// Intersection of polynomial images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiSet {
    field: FieldSpec,
    generators: Vec<Poly>,
    elements: Vec<FieldElement>,
    bound: usize,
}

impl PiSet {
    /// `f_1(F_q) ∩ ... ∩ f_k(F_q)`.
    pub fn intersect_images(generators: Vec<Poly>) -> Result<Self> {
        let first = generators.first().ok_or(Error::EmptyGeneratorList)?;
        let field = first.field().clone();
        let mut hit: Option<Vec<bool>> = None;
        let mut max_deg = 0;
        for g in &generators {
            if *g.field() != field {
                return Err(Error::FieldMismatch);
            }
            let image = image_set(g)?;
            max_deg = max_deg.max(g.degree().unwrap_or(0));
            let mut mark = membership(&field)?;
            for e in image {
                mark[e.index() as usize] = true;
            }
            hit = Some(match hit {
                None => mark,
                Some(prev) => prev.iter().zip(&mark).map(|(&a, &b)| a && b).collect(),
            });
        }
        let elements = collect(&hit.expect("at least one generator"));
        let bound = generators.len().max(max_deg);
        Ok(PiSet { field, generators, elements, bound })
    }

    /// The squares `{a^2}`; all of `F_q` when `q` is even.
    pub fn squares(field: &FieldSpec) -> Self {
        Self::intersect_images(vec![Poly::monomial(field, FieldElement::ONE, 2)])
            .expect("x^2 has positive degree")
    }

    /// All of `F_q`, as the image of `x`.
    pub fn full(field: &FieldSpec) -> Self {
        Self::intersect_images(vec![Poly::x(field)]).expect("x has positive degree")
    }

    /// `{a}` as the image of `x^q - x + a`.
    pub fn singleton(field: &FieldSpec, a: FieldElement) -> Self {
        let q = field.q() as usize;
        let mut c = vec![FieldElement::ZERO; q + 1];
        c[0] = a;
        c[1] = field.minus_one();
        c[q] = FieldElement::ONE;
        Self::intersect_images(vec![Poly::new(field, c)]).expect("x^q - x + a has positive degree")
    }

    /// Intersection of two π-sets; the generator lists are concatenated, so
    /// the bound is at most the sum of the two bounds.
    pub fn intersect(&self, other: &PiSet) -> Result<PiSet> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Self::intersect_images(generators)
    }

    /// Same set with every generator replaced by its separable normalization.
    pub fn normalized(&self) -> Result<PiSet> {
        Self::intersect_images(self.generators.iter().map(normalize_separable).collect())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    /// `max(k, deg f_j)`.
    pub fn pi_complexity_bound(&self) -> usize {
        self.bound
    }
}

/// Union of π-sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexSet {
    field: FieldSpec,
    parts: Vec<PiSet>,
    elements: Vec<FieldElement>,
    bound: usize,
}

impl ComplexSet {
    pub fn union(parts: Vec<PiSet>) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyPartsList)?;
        let field = first.field.clone();
        let mut hit = membership(&field)?;
        for part in &parts {
            if part.field != field {
                return Err(Error::FieldMismatch);
            }
            for e in &part.elements {
                hit[e.index() as usize] = true;
            }
        }
        let bound = parts.iter().map(PiSet::pi_complexity_bound).max().unwrap_or(0).max(parts.len());
        Ok(ComplexSet { field, parts, elements: collect(&hit), bound })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn parts(&self) -> &[PiSet] {
        &self.parts
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `max(m, k_i, deg f_ij)`.
    pub fn complexity_bound(&self) -> usize {
        self.bound
    }
}

impl From<PiSet> for ComplexSet {
    fn from(part: PiSet) -> Self {
        ComplexSet::union(vec![part]).expect("single part over one field")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Uniform,
    Squares,
}

/// Symbolic set description valid for every field: a named preset, or a
/// union of intersections of images of integer-coefficient polynomials
/// (coefficients low to high, reduced mod `p`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetRecipe {
    Preset(Preset),
    Parts { parts: Vec<Vec<Vec<i64>>> },
}

impl SetRecipe {
    pub fn squares() -> Self {
        SetRecipe::Preset(Preset::Squares)
    }

    pub fn uniform() -> Self {
        SetRecipe::Preset(Preset::Uniform)
    }

    /// A single intersection of images.
    pub fn intersection(generators: Vec<Vec<i64>>) -> Self {
        SetRecipe::Parts { parts: vec![generators] }
    }

    pub fn build(&self, field: &FieldSpec) -> Result<ComplexSet> {
        match self {
            SetRecipe::Preset(Preset::Uniform) => Ok(PiSet::full(field).into()),
            SetRecipe::Preset(Preset::Squares) => Ok(PiSet::squares(field).into()),
            SetRecipe::Parts { parts } => {
                let built = parts
                    .iter()
                    .map(|gens| {
                        PiSet::intersect_images(gens.iter().map(|c| Poly::from_ints(field, c)).collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                ComplexSet::union(built)
            }
        }
    }
}

impl fmt::Display for SetRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetRecipe::Preset(Preset::Uniform) => f.write_str("uniform"),
            SetRecipe::Preset(Preset::Squares) => f.write_str("squares"),
            SetRecipe::Parts { parts } => {
                let s = serde_json::to_string(parts).map_err(|_| fmt::Error)?;
                f.write_str(&s)
            }
        }
    }
}

impl std::str::FromStr for SetRecipe {
    type Err = Error;

    /// Accepts `uniform`, `squares`, or the JSON forms.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(SetRecipe::uniform()),
            "squares" => Ok(SetRecipe::squares()),
            other => {
                if let Ok(parts) = serde_json::from_str::<Vec<Vec<Vec<i64>>>>(other) {
                    return Ok(SetRecipe::Parts { parts });
                }
                serde_json::from_str(other)
                    .map_err(|e| Error::InvalidConfig(format!("bad set recipe {other:?}: {e}")))
            }
        }
    }
}

/// Classification thresholds for [`dichotomy_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Rows with `#S <= small` (and not linear) are "small".
    pub small: u64,
    /// Rows with `#S >= ratio * q` are "linear".
    pub ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { small: 4, ratio: 0.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Small,
    Linear,
    Intermediate,
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeClass::Small => "small",
            SizeClass::Linear => "linear",
            SizeClass::Intermediate => "intermediate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyRow {
    pub q: u64,
    pub size: u64,
    pub ratio: f64,
    pub class: SizeClass,
}

pub fn classify(q: u64, size: u64, t: Thresholds) -> SizeClass {
    if size as f64 >= t.ratio * q as f64 {
        SizeClass::Linear
    } else if size <= t.small {
        SizeClass::Small
    } else {
        SizeClass::Intermediate
    }
}

/// Exact set sizes for one recipe across a grid of field orders.
pub fn dichotomy_scan(recipe: &SetRecipe, grid: &[u64], t: Thresholds) -> Result<Vec<DichotomyRow>> {
    grid.iter()
        .map(|&q| {
            let field = FieldSpec::of_order(q)?;
            let size = recipe.build(&field)?.len() as u64;
            Ok(DichotomyRow { q, size, ratio: size as f64 / q as f64, class: classify(q, size, t) })
        })
        .collect()
}
