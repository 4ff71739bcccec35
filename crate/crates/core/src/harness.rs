//! Paired Monte Carlo experiments comparing scaled simulated populations
//! with their limits.
//!
//! Replicate `r` always runs on stream `r` of the root seed, so tables are
//! identical regardless of thread count or scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{g_eval, theorem_limits};
use crate::model::{powu, ModelParams};
use crate::sim::{simulate, RngStream, SimMode};
use crate::table::{Table, Value};

/// Tolerance for the limit functions evaluated per replicate.
pub const LIMIT_TOL: f64 = 1e-8;

/// Relative errors are only reported where the limit exceeds this.
pub const RELATIVE_FLOOR: f64 = 1e-3;

/// Columns that exist only for experiments away from the pivot time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffsetColumns {
    pub n_offset: i32,
    /// `Z(kappa + n) / K`.
    pub x_total: f64,
    /// `f^(n)(H(W_0))`.
    pub limit_total: f64,
    /// `Z_i(kappa + n) / K`.
    pub x: Vec<f64>,
    pub limit: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub replicate: u64,
    /// `b_i^(-kappa) Z_i(kappa)`.
    pub scaled_z: Vec<f64>,
    /// `b_i^(-kappa) Y_i(kappa)`.
    pub w_hat: Vec<f64>,
    /// `W_i G_i(W_0)` evaluated at the estimated `W`.
    pub thm1_limit: Vec<f64>,
    /// `H(W_0)` at the estimated `W`.
    pub h_w0: f64,
    pub offset: Option<OffsetColumns>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeErrors {
    pub mean_abs: f64,
    pub median_abs: f64,
    pub min_abs: f64,
    pub max_abs: f64,
    /// Lower median of `|err| / limit` over records with `limit > RELATIVE_FLOOR`.
    pub median_rel: Option<f64>,
    pub rel_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub kappa: u32,
    pub replicates: usize,
    pub types: Vec<TypeErrors>,
}

fn check_replicates(replicates: u64) -> Result<()> {
    if replicates == 0 {
        return Err(Error::InvalidArgument(
            "replicates must be at least 1".into(),
        ));
    }
    Ok(())
}

fn scales(params: &ModelParams) -> Vec<f64> {
    params
        .rates()
        .b()
        .iter()
        .map(|&b| powu(b, params.kappa()))
        .collect()
}

fn paired_record(
    params: &ModelParams,
    replicate: u64,
    n_offset: Option<i32>,
) -> Result<ExperimentRecord> {
    let kappa = params.kappa();
    let offset_steps = n_offset.map(|n| (kappa as i64 + n as i64) as u32);
    let steps = offset_steps.map_or(kappa, |s| s.max(kappa));
    let mut rng = RngStream::new(params.seed(), replicate);
    let traj = simulate(params, steps, SimMode::Coupled, &mut rng)?;
    let at_pivot = &traj.states[kappa as usize];
    let y = at_pivot.y.as_ref().expect("coupled trajectory");
    let sc = scales(params);
    let scaled_z: Vec<f64> = at_pivot
        .z
        .iter()
        .zip(&sc)
        .map(|(&z, s)| z as f64 / s)
        .collect();
    let w_hat: Vec<f64> = y.iter().zip(&sc).map(|(&y, s)| y as f64 / s).collect();
    let limits = theorem_limits(&w_hat, n_offset.unwrap_or(0), params.rates(), LIMIT_TOL)?;
    let offset = match (n_offset, offset_steps) {
        (Some(n), Some(s)) => {
            let k = params.k();
            let x: Vec<f64> = traj.states[s as usize]
                .z
                .iter()
                .map(|&z| z as f64 / k)
                .collect();
            Some(OffsetColumns {
                n_offset: n,
                x_total: x.iter().sum(),
                limit_total: limits.thm2_total,
                x,
                limit: limits.thm2_vector.clone(),
            })
        }
        _ => None,
    };
    Ok(ExperimentRecord {
        replicate,
        scaled_z,
        w_hat,
        thm1_limit: limits.thm1,
        h_w0: limits.h.value,
        offset,
    })
}

/// One coupled trajectory per replicate to step `kappa`, paired with the
/// limits evaluated at the majorant's scaled value.
pub fn run_theorem1(params: &ModelParams, replicates: u64) -> Result<Vec<ExperimentRecord>> {
    check_replicates(replicates)?;
    (0..replicates)
        .into_par_iter()
        .map(|r| paired_record(params, r, None))
        .collect()
}

/// Like [`run_theorem1`], additionally recording `Z(kappa + n_offset) / K`
/// against `f^(n)(H(W_0))` and its vector form.
pub fn run_theorem2(
    params: &ModelParams,
    n_offset: i32,
    replicates: u64,
) -> Result<Vec<ExperimentRecord>> {
    check_replicates(replicates)?;
    let steps = params.kappa() as i64 + n_offset as i64;
    if steps < 1 {
        return Err(Error::InvalidArgument(format!(
            "kappa + n_offset must be at least 1, got {steps}"
        )));
    }
    params.check_horizon(steps.max(params.kappa() as i64) as u32)?;
    (0..replicates)
        .into_par_iter()
        .map(|r| paired_record(params, r, Some(n_offset)))
        .collect()
}

fn lower_median(sorted: &[f64]) -> f64 {
    sorted[(sorted.len() - 1) / 2]
}

/// Aggregates `|scaled_z_i - thm1_limit_i|` per type.
pub fn summarize(records: &[ExperimentRecord], kappa: u32) -> Result<ErrorSummary> {
    let first = records.first().ok_or(Error::EmptyInput)?;
    let d = first.scaled_z.len();
    let types = (0..d)
        .map(|i| {
            let mut abs: Vec<f64> = records
                .iter()
                .map(|r| (r.scaled_z[i] - r.thm1_limit[i]).abs())
                .collect();
            let mut rel: Vec<f64> = records
                .iter()
                .filter(|r| r.thm1_limit[i] > RELATIVE_FLOOR)
                .map(|r| (r.scaled_z[i] - r.thm1_limit[i]).abs() / r.thm1_limit[i])
                .collect();
            let mean_abs = abs.iter().sum::<f64>() / abs.len() as f64;
            abs.sort_by(f64::total_cmp);
            rel.sort_by(f64::total_cmp);
            TypeErrors {
                mean_abs,
                median_abs: lower_median(&abs),
                min_abs: abs[0],
                max_abs: abs[abs.len() - 1],
                median_rel: (!rel.is_empty()).then(|| lower_median(&rel)),
                rel_count: rel.len(),
            }
        })
        .collect();
    Ok(ErrorSummary {
        kappa,
        replicates: records.len(),
        types,
    })
}

/// [`run_theorem1`] at each `kappa` in `kappa_list`, summarized.
pub fn convergence_sweep(
    template: &ModelParams,
    kappa_list: &[u32],
    replicates: u64,
) -> Result<Vec<ErrorSummary>> {
    if kappa_list.is_empty() {
        return Err(Error::InvalidArgument("kappa list is empty".into()));
    }
    if kappa_list.windows(2).any(|w| w[1] <= w[0]) || kappa_list[0] < 4 {
        return Err(Error::InvalidArgument(
            "kappa list must be strictly increasing with every entry at least 4".into(),
        ));
    }
    kappa_list
        .iter()
        .map(|&kappa| {
            let params = template.with_kappa(kappa)?;
            summarize(&run_theorem1(&params, replicates)?, kappa)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// `G_i` curve family.
    GCurves,
    /// Paired scaled populations against their limits at the pivot time.
    Paired,
    /// Joint samples of the dominant and non-dominant limits.
    Joint,
    /// Per-type populations away from the pivot time against their limits.
    Offset,
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Self::GCurves),
            "1" => Ok(Self::Paired),
            "2" => Ok(Self::Joint),
            "3" => Ok(Self::Offset),
            other => Err(Error::UnknownFigure(other.to_owned())),
        }
    }
}

impl FigureId {
    pub fn label(self) -> &'static str {
        match self {
            Self::GCurves => "A",
            Self::Paired => "1",
            Self::Joint => "2",
            Self::Offset => "3",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub replicates: u64,
    pub grid_points: usize,
    pub x_max: f64,
    pub tol: f64,
    pub n_offset: i32,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            replicates: 200,
            grid_points: 101,
            x_max: 10.0,
            tol: 1e-9,
            n_offset: -3,
        }
    }
}

/// Data table behind one of the reference figures.
///
/// * `GCurves`: `x, G_1, .., G_d` on an even grid over `[0, x_max]`.
/// * `Paired`: per replicate, `scaled_Z_i` and `limit_i = W_i G_i(W_0)`.
/// * `Joint`: per replicate, `H(W_0)` and `W_i G_i(W_0)` for non-dominant `i`.
/// * `Offset`: one row per replicate and type with `Z_i(kappa + n) / K` and
///   its limit.
pub fn figure_data(
    figure: FigureId,
    params: &ModelParams,
    options: &FigureOptions,
) -> Result<Table> {
    let d = params.dim();
    match figure {
        FigureId::GCurves => {
            if options.grid_points < 2 || !(options.x_max > 0.0) {
                return Err(Error::InvalidArgument(
                    "grid needs at least 2 points and a positive x_max".into(),
                ));
            }
            let mut table = Table::new(
                std::iter::once("x".to_owned()).chain((1..=d).map(|i| format!("G_{i}"))),
            );
            let last = (options.grid_points - 1) as f64;
            for j in 0..options.grid_points {
                let x = options.x_max * j as f64 / last;
                let g = g_eval(x, params.rates(), options.tol)?;
                let mut row = vec![Value::from(x)];
                row.extend(g.iter().map(|gi| Value::from(gi.value)));
                table.push(row)?;
            }
            Ok(table)
        }
        FigureId::Paired => {
            let records = run_theorem1(params, options.replicates)?;
            let mut table = Table::new(
                std::iter::once("replicate".to_owned())
                    .chain((1..=d).flat_map(|i| [format!("scaled_Z_{i}"), format!("limit_{i}")])),
            );
            for r in &records {
                let mut row = vec![Value::from(r.replicate)];
                for i in 0..d {
                    row.push(r.scaled_z[i].into());
                    row.push(r.thm1_limit[i].into());
                }
                table.push(row)?;
            }
            Ok(table)
        }
        FigureId::Joint => {
            let d0 = params.rates().d0();
            if d0 == d {
                return Err(Error::InvalidArgument(
                    "joint figure needs at least one non-dominant type".into(),
                ));
            }
            let records = run_theorem1(params, options.replicates)?;
            let mut table = Table::new(
                ["replicate".to_owned(), "H_W0".to_owned()]
                    .into_iter()
                    .chain((d0 + 1..=d).map(|i| format!("limit_{i}"))),
            );
            for r in &records {
                let mut row = vec![Value::from(r.replicate), r.h_w0.into()];
                row.extend(r.thm1_limit[d0..].iter().map(|&x| Value::from(x)));
                table.push(row)?;
            }
            Ok(table)
        }
        FigureId::Offset => {
            let records = run_theorem2(params, options.n_offset, options.replicates)?;
            let mut table = Table::new(["replicate", "type", "simulated", "limit"]);
            for r in &records {
                let off = r.offset.as_ref().expect("offset columns present");
                for i in 0..d {
                    table.push(vec![
                        r.replicate.into(),
                        (i + 1).into(),
                        off.x[i].into(),
                        off.limit[i].into(),
                    ])?;
                }
            }
            Ok(table)
        }
    }
}

/// `replicate`, then `scaled_Z_i, W_hat_i, limit_i` for every type.
pub fn theorem1_table(records: &[ExperimentRecord]) -> Result<Table> {
    let d = records.first().map_or(0, |r| r.scaled_z.len());
    let mut table = Table::new(
        std::iter::once("replicate".to_owned()).chain((1..=d).flat_map(|i| {
            [
                format!("scaled_Z_{i}"),
                format!("W_hat_{i}"),
                format!("limit_{i}"),
            ]
        })),
    );
    for r in records {
        let mut row = vec![Value::from(r.replicate)];
        for i in 0..d {
            row.extend([
                r.scaled_z[i].into(),
                r.w_hat[i].into(),
                r.thm1_limit[i].into(),
            ]);
        }
        table.push(row)?;
    }
    Ok(table)
}

/// `replicate, X_total, limit_total`, then `X_i, limit_i, W_hat_i` per type.
pub fn theorem2_table(records: &[ExperimentRecord]) -> Result<Table> {
    let d = records.first().map_or(0, |r| r.scaled_z.len());
    let mut table = Table::new(
        ["replicate", "X_total", "limit_total"]
            .into_iter()
            .map(str::to_owned)
            .chain(
                (1..=d)
                    .flat_map(|i| [format!("X_{i}"), format!("limit_{i}"), format!("W_hat_{i}")]),
            ),
    );
    for r in records {
        let off = r
            .offset
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("record has no offset columns".into()))?;
        let mut row = vec![
            Value::from(r.replicate),
            off.x_total.into(),
            off.limit_total.into(),
        ];
        for i in 0..d {
            row.extend([off.x[i].into(), off.limit[i].into(), r.w_hat[i].into()]);
        }
        table.push(row)?;
    }
    Ok(table)
}

/// One row per `(kappa, type)`.
pub fn summary_table(summaries: &[ErrorSummary]) -> Result<Table> {
    let mut table = Table::new([
        "kappa",
        "type",
        "replicates",
        "mean_abs",
        "median_abs",
        "min_abs",
        "max_abs",
        "median_rel",
        "rel_count",
    ]);
    for s in summaries {
        for (i, t) in s.types.iter().enumerate() {
            table.push(vec![
                s.kappa.into(),
                (i + 1).into(),
                s.replicates.into(),
                t.mean_abs.into(),
                t.median_abs.into(),
                t.min_abs.into(),
                t.max_abs.into(),
                t.median_rel.map_or(Value::Text(String::new()), Value::from),
                t.rel_count.into(),
            ])?;
        }
    }
    Ok(table)
}
