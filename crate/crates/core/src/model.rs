//! Model parameters and population states shared by every other module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest population magnitude the integer simulator accepts (`2^62`).
pub const POPULATION_LIMIT: f64 = 4_611_686_018_427_387_904.0;

/// Validated replication probabilities together with their derived
/// quantities.
///
/// The probabilities are non-increasing and the leading block
/// `v[0] == ... == v[d0 - 1]` holds the dominant types. Ties in the
/// leading block are detected with exact floating-point equality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rates {
    v: Vec<f64>,
    b: Vec<f64>,
    d0: usize,
}

impl Rates {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::NoTypes);
        }
        for &vi in &v {
            if !(vi > 0.0 && vi <= 1.0) {
                return Err(Error::BadProbability(vi));
            }
        }
        for (i, w) in v.windows(2).enumerate() {
            if w[1] > w[0] {
                return Err(Error::OrderingViolation(format!(
                    "v[{}] = {} exceeds v[{}] = {}",
                    i + 2,
                    w[1],
                    i + 1,
                    w[0]
                )));
            }
        }
        let d0 = v.iter().take_while(|&&vi| vi == v[0]).count();
        let b = v.iter().map(|vi| 1.0 + vi).collect();
        Ok(Self { v, b, d0 })
    }

    /// Number of types `d`.
    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Mean offspring numbers `b_i = 1 + v_i`.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Number of dominant types (those sharing the largest probability).
    pub fn d0(&self) -> usize {
        self.d0
    }

    pub fn v1(&self) -> f64 {
        self.v[0]
    }

    pub fn b1(&self) -> f64 {
        self.b[0]
    }

    /// True when every non-dominant component of `x` is exactly zero.
    pub fn in_gamma(&self, x: &[f64]) -> bool {
        x[self.d0..].iter().all(|&xi| xi == 0.0)
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

/// Unvalidated parameter set, as read from a config file or flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub kappa: u32,
    pub v: Vec<f64>,
    pub z0: Vec<u64>,
    #[serde(default)]
    pub seed: u64,
}

/// Immutable, validated model parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    kappa: u32,
    rates: Rates,
    z0: Vec<u64>,
    seed: u64,
    k: f64,
}

impl ModelParams {
    pub fn new(kappa: u32, v: Vec<f64>, z0: Vec<u64>, seed: u64) -> Result<Self> {
        validate(&RawParams { kappa, v, z0, seed })
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn rates(&self) -> &Rates {
        &self.rates
    }

    pub fn z0(&self) -> &[u64] {
        &self.z0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The Michaelis–Menten constant `K = b_1^kappa`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.rates.dim()
    }

    pub fn total_z0(&self) -> u64 {
        self.z0.iter().sum()
    }

    /// Same model with a different pivot exponent.
    pub fn with_kappa(&self, kappa: u32) -> Result<Self> {
        Self::new(kappa, self.rates.v.clone(), self.z0.clone(), self.seed)
    }

    /// Same model with the Michaelis–Menten constant replaced by an
    /// arbitrary `k > 0`.
    ///
    /// Only the one-step law is meaningful afterwards: the limit results
    /// assume `K = b_1^kappa`, and `kappa` is left unchanged.
    pub fn with_k(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Michaelis-Menten constant must be positive, got {k}"
            )));
        }
        Ok(Self { k, ..self.clone() })
    }

    /// Same model with a different root seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams {
            kappa: self.kappa,
            v: self.rates.v.clone(),
            z0: self.z0.clone(),
            seed: self.seed,
        }
    }

    /// Rejects horizons whose projected population `b_1^n * sum(z0)`
    /// leaves the integer range used by the simulator.
    pub fn check_horizon(&self, n_steps: u32) -> Result<()> {
        let projected = powu(self.rates.b1(), n_steps) * self.total_z0() as f64;
        if projected >= POPULATION_LIMIT {
            return Err(Error::OverflowRisk(format!(
                "b1^{n_steps} * sum(z0) = {projected:e} exceeds 2^62"
            )));
        }
        Ok(())
    }
}

/// `base^n` by repeated multiplication, bit-for-bit reproducible.
pub fn powu(base: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= base;
    }
    acc
}

/// Validates a raw parameter set and derives `K`, `b` and `d0`.
pub fn validate(raw: &RawParams) -> Result<ModelParams> {
    if raw.kappa < 1 {
        return Err(Error::BadKappa(raw.kappa));
    }
    let rates = Rates::new(raw.v.clone())?;
    rates.check_dim(raw.z0.len())?;
    if raw.z0.iter().all(|&z| z == 0) {
        return Err(Error::EmptyPopulation);
    }
    let k = powu(rates.b1(), raw.kappa);
    let params = ModelParams {
        kappa: raw.kappa,
        rates,
        z0: raw.z0.clone(),
        seed: raw.seed,
        k,
    };
    params.check_horizon(raw.kappa)?;
    Ok(params)
}

/// Copy numbers at step `n`, optionally paired with the coupled
/// Galton–Watson majorant `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PopulationState {
    pub n: u32,
    pub z: Vec<u64>,
    pub y: Option<Vec<u64>>,
}

impl PopulationState {
    pub fn initial(params: &ModelParams) -> Self {
        Self {
            n: 0,
            z: params.z0.clone(),
            y: None,
        }
    }

    /// Initial coupled state; both processes start from the same ancestors.
    pub fn initial_coupled(params: &ModelParams) -> Self {
        Self {
            n: 0,
            z: params.z0.clone(),
            y: Some(params.z0.clone()),
        }
    }

    pub fn total(&self) -> u64 {
        self.z.iter().sum()
    }

    /// Checks `z_i <= y_i` for every type when the majorant is present.
    pub fn check_dominance(&self) -> Result<()> {
        if let Some(y) = &self.y {
            for (index, (&z, &y)) in self.z.iter().zip(y).enumerate() {
                if z > y {
                    return Err(Error::CouplingViolation { index, z, y });
                }
            }
        }
        Ok(())
    }
}
