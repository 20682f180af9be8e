use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Cycle type of a permutation of `n` letters, or factor-degree profile of a
/// degree-`n` polynomial: `s[i-1]` counts cycles (factors) of length (degree) `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplittingType(Vec<u32>);

impl SplittingType {
    /// Validates `sum i * s_i = n` where `n = s.len()`.
    pub fn new(s: Vec<u32>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidConfig("splitting type of degree 0".into()));
        }
        let n = s.len() as u64;
        let weight: u64 = s.iter().enumerate().map(|(i, &c)| (i as u64 + 1) * c as u64).sum();
        if weight != n {
            return Err(Error::InvalidConfig(format!(
                "splitting type {s:?} has weight {weight}, expected {n}"
            )));
        }
        Ok(SplittingType(s))
    }

    pub(crate) fn from_counts_unchecked(s: Vec<u32>) -> Self {
        debug_assert_eq!(
            s.iter().enumerate().map(|(i, &c)| (i + 1) * c as usize).sum::<usize>(),
            s.len()
        );
        SplittingType(s)
    }

    /// Type of the identity permutation / a product of `n` linear factors.
    pub fn split(n: usize) -> Self {
        let mut s = vec![0; n];
        s[0] = n as u32;
        SplittingType(s)
    }

    /// Type of an `n`-cycle / an irreducible polynomial.
    pub fn irreducible(n: usize) -> Self {
        let mut s = vec![0; n];
        s[n - 1] = 1;
        SplittingType(s)
    }

    /// Cycle type of a permutation given as images of `0..n`.
    pub fn of_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut s = vec![0u32; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            s[len - 1] += 1;
        }
        SplittingType(s)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// Total number of cycles (factors with multiplicity).
    pub fn parts(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_irreducible(&self) -> bool {
        self.0[self.0.len() - 1] == 1
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for SplittingType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let counts = s
            .split('-')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidConfig(format!("bad splitting type {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SplittingType::new(counts)
    }
}

impl Serialize for SplittingType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SplittingType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_is_checked() {
        assert!(SplittingType::new(vec![1, 1, 0]).is_ok());
        assert!(SplittingType::new(vec![1, 1, 1]).is_err());
        assert!(SplittingType::new(vec![]).is_err());
    }

    #[test]
    fn text_form() {
        let s: SplittingType = "1-1-0".parse().unwrap();
        assert_eq!(s.counts(), &[1, 1, 0]);
        assert_eq!(s.to_string(), "1-1-0");
        assert!("2-1".parse::<SplittingType>().is_err());
    }

    #[test]
    fn permutation_cycle_types() {
        assert_eq!(SplittingType::of_permutation(&[1, 2, 0]), SplittingType::irreducible(3));
        assert_eq!(SplittingType::of_permutation(&[0, 1, 2]), SplittingType::split(3));
        assert_eq!(SplittingType::of_permutation(&[1, 0, 2]).counts(), &[1, 1, 0]);
        assert_eq!(SplittingType::of_permutation(&[1, 0, 3, 2]).counts(), &[0, 2, 0, 0]);
    }
}
