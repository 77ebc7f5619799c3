use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which mixture parameters are unknown in a univariate moment system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelClass {
    /// Known weights; unknown means and variances. Moments 1..2k.
    LambdaWeighted,
    /// Known weights; unknown means and one shared variance. Moments 1..k+1.
    Homoscedastic,
    /// Known weights and variances; unknown means. Moments 1..k.
    KnownVarianceMeansOnly,
    /// Everything unknown. Moments 0..3k−1.
    General,
}

impl ModelClass {
    pub const ALL: [ModelClass; 4] = [
        ModelClass::LambdaWeighted,
        ModelClass::Homoscedastic,
        ModelClass::KnownVarianceMeansOnly,
        ModelClass::General,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelClass::LambdaWeighted => "lambda_weighted",
            ModelClass::Homoscedastic => "homoscedastic",
            ModelClass::KnownVarianceMeansOnly => "known_variance_means_only",
            ModelClass::General => "general",
        }
    }

    /// Moment orders used as equations.
    pub fn orders(self, k: usize) -> std::ops::RangeInclusive<usize> {
        match self {
            ModelClass::LambdaWeighted => 1..=2 * k,
            ModelClass::Homoscedastic => 1..=k + 1,
            ModelClass::KnownVarianceMeansOnly => 1..=k,
            ModelClass::General => 0..=3 * k - 1,
        }
    }

    pub fn nvars(self, k: usize) -> usize {
        match self {
            ModelClass::LambdaWeighted => 2 * k,
            ModelClass::Homoscedastic => k + 1,
            ModelClass::KnownVarianceMeansOnly => k,
            ModelClass::General => 3 * k,
        }
    }

    pub fn weights_known(self) -> bool {
        self != ModelClass::General
    }

    /// Generic number of complex solutions.
    pub fn expected_solutions(self, k: usize) -> u128 {
        let fact = |m: usize| (1..=m as u128).product::<u128>();
        let double_fact = |m: usize| (1..=m as u128).filter(|v| v % 2 == 1).product::<u128>();
        match self {
            ModelClass::LambdaWeighted => double_fact(2 * k - 1) * fact(k),
            ModelClass::Homoscedastic => fact(k + 1) / 2,
            ModelClass::KnownVarianceMeansOnly => fact(k),
            ModelClass::General => match k {
                1 => 1,
                2 => 9 * 2,
                3 => 225 * 6,
                4 => 10350 * 24,
                _ => 0,
            },
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.replace('-', "_").as_str() {
            "lambda_weighted" => Ok(ModelClass::LambdaWeighted),
            "homoscedastic" => Ok(ModelClass::Homoscedastic),
            "known_variance_means_only" | "means_only" => Ok(ModelClass::KnownVarianceMeansOnly),
            "general" => Ok(ModelClass::General),
            other => Err(Error::Parse(format!("unknown model class '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(ModelClass::LambdaWeighted.expected_solutions(2), 6);
        assert_eq!(ModelClass::LambdaWeighted.expected_solutions(3), 90);
        assert_eq!(ModelClass::Homoscedastic.expected_solutions(3), 12);
        assert_eq!(ModelClass::KnownVarianceMeansOnly.expected_solutions(3), 6);
        assert_eq!(ModelClass::General.expected_solutions(2), 18);
    }

    #[test]
    fn parse_names() {
        for c in ModelClass::ALL {
            assert_eq!(c.name().parse::<ModelClass>().unwrap(), c);
        }
        assert!("bogus".parse::<ModelClass>().is_err());
    }
}
