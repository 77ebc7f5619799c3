use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multi-index `(i₁, …, iₙ)` naming the moment `E[X₁^{i₁} ⋯ Xₙ^{iₙ}]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MomentKey(Vec<u32>);

impl MomentKey {
    pub fn new(index: Vec<u32>) -> Self {
        MomentKey(index)
    }

    /// `c·e_s` in dimension `n`.
    pub fn axis(n: usize, s: usize, c: u32) -> Self {
        let mut v = vec![0; n];
        v[s] = c;
        MomentKey(v)
    }

    /// `c·e_i + e_j` in dimension `n`.
    pub fn cross(n: usize, i: usize, c: u32, j: usize) -> Self {
        let mut v = vec![0; n];
        v[i] += c;
        v[j] += 1;
        MomentKey(v)
    }

    pub fn index(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Coordinates with a positive exponent.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(s, _)| s)
            .collect()
    }
}

impl fmt::Display for MomentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Real moment values keyed by multi-index, all of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    n: usize,
    entries: BTreeMap<MomentKey, f64>,
}

#[derive(Serialize, Deserialize)]
struct MomentEntry {
    index: Vec<u32>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct MomentFile {
    n: usize,
    moments: Vec<MomentEntry>,
}

impl MomentTable {
    pub fn new(n: usize) -> Self {
        MomentTable {
            n,
            entries: BTreeMap::new(),
        }
    }

    /// Univariate table holding `m̄_1 … m̄_r` from `values[0..r]`.
    pub fn univariate(values: &[f64]) -> Self {
        let mut t = MomentTable::new(1);
        for (i, &v) in values.iter().enumerate() {
            t.entries.insert(MomentKey(vec![i as u32 + 1]), v);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, key: MomentKey, value: f64) -> Result<()> {
        if key.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: key.dim(),
            });
        }
        if !value.is_finite() {
            return Err(Error::Parse(format!("moment {key} is not finite")));
        }
        if key.order() == 0 && value != 1.0 {
            return Err(Error::Parse(format!("moment {key} must equal 1, got {value}")));
        }
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn get(&self, key: &MomentKey) -> Option<f64> {
        if key.order() == 0 {
            return Some(1.0);
        }
        self.entries.get(key).copied()
    }

    pub fn require(&self, key: &MomentKey) -> Result<f64> {
        self.get(key).ok_or_else(|| Error::MissingMoment(key.clone()))
    }

    /// Axis moment `m_{c e_s}`.
    pub fn axis(&self, s: usize, c: u32) -> Result<f64> {
        self.require(&MomentKey::axis(self.n, s, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MomentKey, f64)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }

    /// Univariate table of the moments along coordinate `s`, orders `1..=max`.
    pub fn marginal(&self, s: usize, max: u32) -> Result<MomentTable> {
        let mut t = MomentTable::new(1);
        for c in 1..=max {
            t.entries.insert(MomentKey(vec![c]), self.axis(s, c)?);
        }
        Ok(t)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MomentFile = serde_json::from_str(s)?;
        let mut t = MomentTable::new(file.n);
        for e in file.moments {
            t.insert(MomentKey(e.index), e.value)?;
        }
        Ok(t)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = MomentFile {
            n: self.n,
            moments: self
                .entries
                .iter()
                .map(|(k, &v)| MomentEntry {
                    index: k.0.clone(),
                    value: v,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_exact() {
        let mut t = MomentTable::new(2);
        t.insert(MomentKey::new(vec![1, 0]), -0.25).unwrap();
        t.insert(MomentKey::new(vec![1, 1]), 0.1 + 0.2).unwrap();
        t.insert(MomentKey::new(vec![2, 1]), 1.0 / 3.0).unwrap();
        let back = MomentTable::from_json_str(&t.to_json_string().unwrap()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn zero_key_is_one() {
        let t = MomentTable::new(3);
        assert_eq!(t.get(&MomentKey::new(vec![0, 0, 0])), Some(1.0));
        let mut t = MomentTable::new(1);
        assert!(t.insert(MomentKey::new(vec![0]), 2.0).is_err());
    }

    #[test]
    fn missing_key_is_named() {
        let t = MomentTable::new(2);
        let err = t.require(&MomentKey::new(vec![2, 1])).unwrap_err();
        assert!(err.to_string().contains("m(2,1)"));
    }

    #[test]
    fn rejects_wrong_dimension() {
        let mut t = MomentTable::new(2);
        assert!(t.insert(MomentKey::new(vec![1]), 1.0).is_err());
    }
}
