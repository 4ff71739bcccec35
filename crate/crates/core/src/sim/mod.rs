//! Exact simulation of the MPCR chain and its Galton–Watson majorant.
//!
//! Per-molecule Bernoulli trials are aggregated into binomial draws. In the
//! coupled step the shared uniform of each molecule is split into three cells
//! `[0, p)`, `[p, q)` and `[q, 1]` with `p = v_i K / (K + z)` and `q = v_i`;
//! the cell counts are drawn as a multinomial through two conditional
//! binomials, which reproduces the joint law of the per-molecule coupling.

mod binomial;
mod rng;

use serde::Serialize;

pub use binomial::sample_binomial;
pub use rng::RngStream;

use crate::error::{Error, Result};
use crate::model::{powu, ModelParams, PopulationState, POPULATION_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// The density-dependent chain alone.
    MpcrOnly,
    /// Chain and majorant driven by shared randomness; `y` is populated.
    Coupled,
    /// Independent Galton–Watson processes alone, stored in `z`.
    GwOnly,
}

impl std::str::FromStr for SimMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mpcr" | "mpcr_only" => Ok(Self::MpcrOnly),
            "coupled" => Ok(Self::Coupled),
            "gw" | "gw_only" => Ok(Self::GwOnly),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub params: ModelParams,
    pub mode: SimMode,
    pub states: Vec<PopulationState>,
}

impl Trajectory {
    pub fn last(&self) -> &PopulationState {
        self.states
            .last()
            .expect("trajectory always holds the initial state")
    }
}

/// Per-molecule replication probability `v K / (K + z)`.
///
/// Evaluated as `v * (K / (K + z))` so that it never exceeds `v` after
/// rounding.
#[inline]
pub fn replication_probability(v: f64, k: f64, total: u64) -> f64 {
    v * (k / (k + total as f64))
}

fn grow(current: u64, added: u64) -> Result<u64> {
    current
        .checked_add(added)
        .filter(|&n| (n as f64) < POPULATION_LIMIT)
        .ok_or_else(|| Error::OverflowRisk(format!("population {current} + {added} exceeds 2^62")))
}

fn check_state_dim(state: &PopulationState, params: &ModelParams) -> Result<()> {
    let d = params.dim();
    if state.z.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: state.z.len(),
        });
    }
    if let Some(y) = &state.y {
        if y.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: y.len(),
            });
        }
    }
    Ok(())
}

/// One cycle of the MPCR chain.
pub fn mpcr_step(
    state: &PopulationState,
    params: &ModelParams,
    rng: &mut RngStream,
) -> Result<PopulationState> {
    check_state_dim(state, params)?;
    if state.y.is_some() {
        return Err(Error::InvalidState(
            "mpcr_step expects an uncoupled state".into(),
        ));
    }
    let total = state.total();
    let k = params.k();
    let z = state
        .z
        .iter()
        .zip(params.rates().v())
        .map(|(&zi, &vi)| {
            let p = replication_probability(vi, k, total);
            grow(zi, sample_binomial(zi, p, rng)?)
        })
        .collect::<Result<_>>()?;
    Ok(PopulationState {
        n: state.n + 1,
        z,
        y: None,
    })
}

/// One generation of the `d` independent Galton–Watson processes, with
/// populations held in `state.z`.
pub fn gw_step(
    state: &PopulationState,
    params: &ModelParams,
    rng: &mut RngStream,
) -> Result<PopulationState> {
    check_state_dim(state, params)?;
    if state.y.is_some() {
        return Err(Error::InvalidState(
            "gw_step expects an uncoupled state".into(),
        ));
    }
    let z = state
        .z
        .iter()
        .zip(params.rates().v())
        .map(|(&zi, &vi)| grow(zi, sample_binomial(zi, vi, rng)?))
        .collect::<Result<_>>()?;
    Ok(PopulationState {
        n: state.n + 1,
        z,
        y: None,
    })
}

/// One cycle of the chain together with its coupled majorant.
pub fn coupled_step(
    state: &PopulationState,
    params: &ModelParams,
    rng: &mut RngStream,
) -> Result<PopulationState> {
    check_state_dim(state, params)?;
    let y = state
        .y
        .as_ref()
        .ok_or_else(|| Error::InvalidState("coupled_step needs the majorant".into()))?;
    state.check_dominance()?;
    let total = state.total();
    let k = params.k();
    let d = params.dim();
    let mut z_next = Vec::with_capacity(d);
    let mut y_next = Vec::with_capacity(d);
    for ((&zi, &yi), &q) in state.z.iter().zip(y).zip(params.rates().v()) {
        let p = replication_probability(q, k, total);
        // Shared molecules: A falls in [0, p), B in [p, q).
        let (both, gw_only) = if p >= 1.0 {
            (zi, 0)
        } else {
            let a = sample_binomial(zi, p, rng)?;
            let cond = ((q - p) / (1.0 - p)).clamp(0.0, 1.0);
            (a, sample_binomial(zi - a, cond, rng)?)
        };
        let extra = sample_binomial(yi - zi, q, rng)?;
        z_next.push(grow(zi, both)?);
        y_next.push(grow(grow(yi, both)?, gw_only + extra)?);
    }
    Ok(PopulationState {
        n: state.n + 1,
        z: z_next,
        y: Some(y_next),
    })
}

/// Runs `n_steps` cycles from the initial copy numbers.
pub fn simulate(
    params: &ModelParams,
    n_steps: u32,
    mode: SimMode,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    params.check_horizon(n_steps)?;
    let mut state = match mode {
        SimMode::Coupled => PopulationState::initial_coupled(params),
        SimMode::MpcrOnly | SimMode::GwOnly => PopulationState::initial(params),
    };
    let mut states = Vec::with_capacity(n_steps as usize + 1);
    for _ in 0..n_steps {
        let next = match mode {
            SimMode::MpcrOnly => mpcr_step(&state, params, rng)?,
            SimMode::Coupled => coupled_step(&state, params, rng)?,
            SimMode::GwOnly => gw_step(&state, params, rng)?,
        };
        states.push(std::mem::replace(&mut state, next));
    }
    states.push(state);
    Ok(Trajectory {
        params: params.clone(),
        mode,
        states,
    })
}

/// `b_i^(-horizon) Y_i(horizon)` for Galton–Watson processes started from
/// `z0`; an estimate of the martingale limits `W_i`.
pub fn sample_w(params: &ModelParams, horizon: u32, rng: &mut RngStream) -> Result<Vec<f64>> {
    if horizon < 1 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let scales: Vec<f64> = params
        .rates()
        .b()
        .iter()
        .map(|&bi| powu(bi, horizon))
        .collect();
    for (&s, &z) in scales.iter().zip(params.z0()) {
        if s * z as f64 >= POPULATION_LIMIT {
            return Err(Error::OverflowRisk(format!(
                "b_i^{horizon} * z0_i = {:e} exceeds 2^62",
                s * z as f64
            )));
        }
    }
    let mut state = PopulationState::initial(params);
    for _ in 0..horizon {
        state = gw_step(&state, params, rng)?;
    }
    Ok(state
        .z
        .iter()
        .zip(&scales)
        .map(|(&y, &s)| y as f64 / s)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_k_params(v: f64) -> ModelParams {
        ModelParams::new(1, vec![v], vec![1], 3)
            .unwrap()
            .with_k(1.0)
            .unwrap()
    }

    #[test]
    fn one_step_law_at_unit_k() {
        let p = unit_k_params(0.9);
        let reps = 100_000u64;
        let mut cells = [0u64; 3];
        let mut doubled = 0u64;
        for r in 0..reps {
            let mut rng = RngStream::new(17, r);
            let next = coupled_step(&PopulationState::initial_coupled(&p), &p, &mut rng).unwrap();
            match (next.z[0], next.y.unwrap()[0]) {
                (2, 2) => cells[0] += 1,
                (1, 2) => cells[1] += 1,
                (1, 1) => cells[2] += 1,
                other => panic!("impossible transition {other:?}"),
            }
            if mpcr_step(&PopulationState::initial(&p), &p, &mut rng)
                .unwrap()
                .z[0]
                == 2
            {
                doubled += 1;
            }
        }
        let n = reps as f64;
        for (count, prob) in cells.iter().zip([0.45, 0.45, 0.10]) {
            let se = (prob * (1.0 - prob) / n).sqrt();
            assert!((*count as f64 / n - prob).abs() <= 4.0 * se);
        }
        let se = (0.45f64 * 0.55 / n).sqrt();
        assert!((doubled as f64 / n - 0.45).abs() <= 4.0 * se);
    }

    #[test]
    fn absorbing_zero_state() {
        let p = ModelParams::new(5, vec![0.9, 0.2], vec![1, 0], 0).unwrap();
        let mut rng = RngStream::new(0, 0);
        let s = PopulationState {
            n: 0,
            z: vec![0, 0],
            y: None,
        };
        assert_eq!(mpcr_step(&s, &p, &mut rng).unwrap().z, vec![0, 0]);
        let s = PopulationState {
            n: 0,
            z: vec![0, 0],
            y: Some(vec![0, 0]),
        };
        let next = coupled_step(&s, &p, &mut rng).unwrap();
        assert_eq!((next.z, next.y), (vec![0, 0], Some(vec![0, 0])));
    }

    #[test]
    fn step_mode_mismatch() {
        let p = unit_k_params(0.9);
        let mut rng = RngStream::new(0, 0);
        let coupled = PopulationState::initial_coupled(&p);
        let plain = PopulationState::initial(&p);
        assert!(matches!(
            mpcr_step(&coupled, &p, &mut rng),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            coupled_step(&plain, &p, &mut rng),
            Err(Error::InvalidState(_))
        ));
        let bad = PopulationState {
            n: 0,
            z: vec![3],
            y: Some(vec![2]),
        };
        assert_eq!(
            coupled_step(&bad, &p, &mut rng),
            Err(Error::CouplingViolation {
                index: 0,
                z: 3,
                y: 2
            })
        );
    }

    #[test]
    fn huge_k_moves_shared_molecules_together() {
        let p = ModelParams::new(70, vec![0.9], vec![5], 0).unwrap_err();
        assert!(matches!(p, Error::OverflowRisk(_)));
        // With K = 1.9^55 the probabilities coincide to rounding, so the
        // middle cell is empty and the chain tracks the majorant exactly.
        let p = ModelParams::new(55, vec![0.9], vec![1], 0).unwrap();
        let mut rng = RngStream::new(9, 9);
        let t = simulate(&p, 20, SimMode::Coupled, &mut rng).unwrap();
        for s in &t.states {
            assert_eq!(Some(&s.z), s.y.as_ref());
        }
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let p = ModelParams::new(10, vec![0.9, 0.2], vec![3, 2], 1).unwrap();
        let mut rng = RngStream::new(1, 0);
        for mode in [SimMode::MpcrOnly, SimMode::Coupled, SimMode::GwOnly] {
            let t = simulate(&p, 0, mode, &mut rng).unwrap();
            assert_eq!(t.states.len(), 1);
            assert_eq!(t.states[0].z, vec![3, 2]);
        }
    }

    #[test]
    fn coupled_trajectories_dominated_and_monotone() {
        let p = ModelParams::new(15, vec![0.9, 0.5, 0.2], vec![2, 1, 3], 4).unwrap();
        for stream in 0..50 {
            let mut rng = RngStream::new(p.seed(), stream);
            let t = simulate(&p, 15, SimMode::Coupled, &mut rng).unwrap();
            for s in &t.states {
                s.check_dominance().unwrap();
            }
            for w in t.states.windows(2) {
                assert_eq!(w[1].n, w[0].n + 1);
                for i in 0..3 {
                    assert!(w[1].z[i] >= w[0].z[i]);
                    assert!(w[1].y.as_ref().unwrap()[i] >= w[0].y.as_ref().unwrap()[i]);
                }
            }
        }
    }

    #[test]
    fn reproducible_per_stream() {
        let p = ModelParams::new(12, vec![0.9, 0.2], vec![1, 1], 77).unwrap();
        let run = |stream| {
            let mut rng = RngStream::new(p.seed(), stream);
            simulate(&p, 12, SimMode::Coupled, &mut rng).unwrap()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3).states, run(4).states);
    }

    #[test]
    fn sample_w_zero_ancestors_and_horizon() {
        let p = ModelParams::new(10, vec![0.9, 0.2], vec![3, 0], 0).unwrap();
        let mut rng = RngStream::new(0, 1);
        for _ in 0..20 {
            assert_eq!(sample_w(&p, 10, &mut rng).unwrap()[1], 0.0);
        }
        assert!(sample_w(&p, 0, &mut rng).is_err());
        assert!(matches!(
            sample_w(&p, 70, &mut rng),
            Err(Error::OverflowRisk(_))
        ));
    }

    #[test]
    fn probability_never_exceeds_v() {
        for total in [0u64, 1, 10, 1 << 40] {
            for k in [1.0, 1.9, 1e8, 1e18] {
                assert!(replication_probability(0.9, k, total) <= 0.9);
            }
        }
        assert_eq!(replication_probability(0.9, 1.0, 1), 0.45);
    }
}
