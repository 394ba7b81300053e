use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which protocol family a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Nested cubes with uniform inter-shell couplings; perfect transfer.
    NestedIdeal,
    /// Spatially separated blocks with programmable uniform couplings;
    /// supports multi-qubit transfer.
    DisjointIdeal,
    /// Spatially separated blocks with genuine power-law couplings.
    DisjointPhysical,
}

impl Variant {
    pub fn is_disjoint(self) -> bool {
        matches!(self, Variant::DisjointIdeal | Variant::DisjointPhysical)
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nested" | "nested_ideal" => Ok(Variant::NestedIdeal),
            "disjoint" | "disjoint_ideal" => Ok(Variant::DisjointIdeal),
            "physical" | "disjoint_physical" => Ok(Variant::DisjointPhysical),
            other => Err(Error::InvalidArgument(format!("unknown variant `{other}`"))),
        }
    }
}

/// Angle convention for the expand-step rotation of the nested protocol.
///
/// The matching condition for a uniform superposition gives
/// `tan(theta) = sqrt(|shell| / |prev|)`; `Corrected` uses that angle.
/// `Paper` drops the square root. The two coincide in one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Paper,
    #[default]
    Corrected,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(Convention::Paper),
            "corrected" => Ok(Convention::Corrected),
            other => Err(Error::InvalidArgument(format!("unknown convention `{other}`"))),
        }
    }
}

/// All parameters of a protocol run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Spatial dimension.
    pub d: u32,
    /// Power-law exponent of the couplings.
    pub alpha: f64,
    /// Base coupling strength.
    #[serde(default = "default_h0")]
    pub h0: f64,
    /// Number of hierarchy levels per phase.
    pub n: u32,
    pub variant: Variant,
    /// Gap prefactor for the disjoint variants.
    #[serde(default)]
    pub beta: f64,
    /// Multiplicative Gaussian noise strength on couplings.
    #[serde(default)]
    pub epsilon: f64,
    /// Number of qubits to transfer (1 for single-qubit runs).
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub convention: Convention,
}

fn default_h0() -> f64 {
    1.0
}
fn default_m() -> usize {
    1
}

impl ProtocolConfig {
    pub fn new(d: u32, alpha: f64, n: u32, variant: Variant) -> Self {
        ProtocolConfig {
            d,
            alpha,
            h0: 1.0,
            n,
            variant,
            beta: 0.0,
            epsilon: 0.0,
            m: 1,
            seed: 0,
            convention: Convention::default(),
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::InvalidConfig("d must be >= 1".into()));
        }
        if self.n < 1 {
            return Err(Error::InvalidConfig("n must be >= 1".into()));
        }
        if self.m < 1 {
            return Err(Error::InvalidConfig("m must be >= 1".into()));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::InvalidConfig("alpha must be >= 0".into()));
        }
        if !(self.h0 > 0.0) {
            return Err(Error::InvalidConfig("h0 must be > 0".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig("epsilon must be >= 0".into()));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::InvalidConfig("beta must be >= 0".into()));
        }
        if self.variant.is_disjoint() && self.d != 1 {
            return Err(Error::InvalidConfig("disjoint variants are restricted to d = 1".into()));
        }
        if self.m > 1 && self.variant != Variant::DisjointIdeal {
            return Err(Error::InvalidConfig(
                "multi-qubit transfer (m > 1) requires the disjoint ideal variant".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ProtocolConfig::new(1, 1.0, 4, Variant::NestedIdeal);
        assert!(cfg.validate().is_ok());
        cfg.m = 3;
        assert!(cfg.validate().is_err());
        let cfg = ProtocolConfig::new(2, 1.0, 2, Variant::DisjointPhysical);
        assert!(cfg.validate().is_err());
        let mut cfg = ProtocolConfig::new(1, 1.0, 0, Variant::NestedIdeal);
        assert!(cfg.validate().is_err());
        cfg.n = 1;
        cfg.epsilon = -0.1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn variant_parses() {
        assert_eq!("nested".parse::<Variant>().unwrap(), Variant::NestedIdeal);
        assert_eq!("disjoint_physical".parse::<Variant>().unwrap(), Variant::DisjointPhysical);
        assert!("bogus".parse::<Variant>().is_err());
    }
}
