//! Table runners: temporal and spatial convergence sweeps.

use rayon::prelude::*;
use std::collections::HashMap;

use super::cases;
use super::config::{ErrorAt, RefPolicy, RunConfig};
use super::{error_at_level, error_max, rate, ErrorRow, ErrorTable, TableMeta, Truth};
use crate::error::{Error, Result};
use crate::mesh::{SpatialMesh, TemporalMesh};
use crate::solver::{solve, ProblemSpec, SolveRecord};

/// Reference solve on a `factor`-finer temporal mesh (same grading, same
/// spatial mesh). The ratio to every ladder entry must stay a power of two,
/// which holds by construction when the ladder itself doubles.
pub fn run_reference(
    spec: &ProblemSpec,
    grading: f64,
    n_ref: usize,
    elements: usize,
) -> Result<SolveRecord> {
    let tmesh = TemporalMesh::build(spec.tau, spec.windows, n_ref, grading)?;
    let smesh = SpatialMesh::build(spec.length, elements)?;
    solve(&spec.clone(), &tmesh, &smesh)
}

fn solve_cell(
    spec: &ProblemSpec,
    grading: f64,
    half_steps: usize,
    elements: usize,
) -> Result<SolveRecord> {
    let tmesh = TemporalMesh::build(spec.tau, spec.windows, half_steps, grading)?;
    let smesh = SpatialMesh::build(spec.length, elements)?;
    solve(spec, &tmesh, &smesh)
}

fn attach_rates(rows: &mut [ErrorRow], vary_elements: bool) {
    let mut seen: HashMap<(u64, u64, usize, usize, usize, usize), f64> = HashMap::new();
    let key = |row: &ErrorRow| {
        let fixed = if vary_elements { row.half_steps } else { row.elements };
        let varying = if vary_elements { row.elements } else { row.half_steps };
        (
            row.alpha.to_bits(),
            row.grading.to_bits(),
            fixed,
            varying,
            row.window.0,
            row.window.1,
        )
    };
    for row in rows.iter() {
        seen.insert(key(row), row.error);
    }
    for row in rows.iter_mut() {
        let mut half_key = key(row);
        half_key.3 /= 2;
        if half_key.3 == 0 {
            continue;
        }
        if let Some(&coarse) = seen.get(&half_key) {
            row.rate = rate(coarse, row.error).ok();
        }
    }
}

fn sort_rows(rows: &mut [ErrorRow]) {
    rows.sort_by(|a, b| {
        a.alpha
            .partial_cmp(&b.alpha)
            .unwrap()
            .then(a.grading.partial_cmp(&b.grading).unwrap())
            .then(a.half_steps.cmp(&b.half_steps))
            .then(a.elements.cmp(&b.elements))
            .then(a.window.cmp(&b.window))
    });
}

/// Temporal accuracy sweep: fixed `M`, doubling `N` ladder, one row per
/// `(alpha, grading, N, window)`.
pub fn run_temporal_table(cfg: &RunConfig) -> Result<ErrorTable> {
    cfg.validate_temporal()?;
    let combos = cfg.combos()?;
    let elements = cfg.m_ladder[0];
    let n_max = *cfg.n_ladder.iter().max().unwrap();

    // One problem and, if requested, one nested reference per combination.
    let prepared: Vec<(f64, f64, ProblemSpec, Option<SolveRecord>)> = combos
        .par_iter()
        .map(|&(alpha, grading)| -> Result<_> {
            let spec = cases::build(&cfg.case, alpha, cfg.g_route)?;
            let reference = match cfg.reference {
                RefPolicy::Exact => None,
                RefPolicy::NestedTime { factor } => {
                    Some(run_reference(&spec, grading, factor * n_max, elements)?)
                }
                RefPolicy::NestedSpace { .. } => unreachable!("rejected by validation"),
            };
            Ok((alpha, grading, spec, reference))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> = (0..prepared.len())
        .flat_map(|ci| (0..cfg.n_ladder.len()).map(move |ni| (ci, ni)))
        .collect();
    let mut rows: Vec<ErrorRow> = cells
        .par_iter()
        .map(|&(ci, ni)| -> Result<Vec<ErrorRow>> {
            let (alpha, grading, spec, reference) = &prepared[ci];
            let half_steps = cfg.n_ladder[ni];
            let record = solve_cell(spec, *grading, half_steps, elements)?;
            let truth = match (&cfg.reference, reference) {
                (RefPolicy::Exact, _) => Truth::Exact(spec.exact.as_ref().ok_or_else(|| {
                    Error::Config("exact reference requested but case has none".into())
                })?),
                (_, Some(r)) => Truth::NestedTime(r),
                _ => unreachable!(),
            };
            cfg.windows
                .iter()
                .map(|&(k, l)| {
                    Ok(ErrorRow {
                        case_id: cfg.case.id().to_string(),
                        alpha: *alpha,
                        grading: *grading,
                        elements,
                        half_steps,
                        window: (k, l),
                        error: error_max(&record, truth, k, l)?,
                        rate: None,
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    attach_rates(&mut rows, false);
    sort_rows(&mut rows);
    Ok(ErrorTable {
        meta: TableMeta { case_id: cfg.case.id().to_string(), config_hash: cfg.hash() },
        rows,
    })
}

/// Spatial accuracy sweep: fixed `N`, doubling `M` ladder, errors at the
/// final level or over window pairs.
pub fn run_spatial_table(cfg: &RunConfig) -> Result<ErrorTable> {
    cfg.validate_spatial()?;
    let combos = cfg.combos()?;
    let half_steps = cfg.n_ladder[0];
    let m_max = *cfg.m_ladder.iter().max().unwrap();

    let prepared: Vec<(f64, f64, ProblemSpec, Option<SolveRecord>)> = combos
        .par_iter()
        .map(|&(alpha, grading)| -> Result<_> {
            let spec = cases::build(&cfg.case, alpha, cfg.g_route)?;
            let reference = match cfg.reference {
                RefPolicy::Exact => None,
                RefPolicy::NestedSpace { factor } => {
                    Some(solve_cell(&spec, grading, half_steps, factor * m_max)?)
                }
                RefPolicy::NestedTime { .. } => unreachable!("rejected by validation"),
            };
            Ok((alpha, grading, spec, reference))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> = (0..prepared.len())
        .flat_map(|ci| (0..cfg.m_ladder.len()).map(move |mi| (ci, mi)))
        .collect();
    let mut rows: Vec<ErrorRow> = cells
        .par_iter()
        .map(|&(ci, mi)| -> Result<Vec<ErrorRow>> {
            let (alpha, grading, spec, reference) = &prepared[ci];
            let elements = cfg.m_ladder[mi];
            let record = solve_cell(spec, *grading, half_steps, elements)?;
            let truth = match (&cfg.reference, reference) {
                (RefPolicy::Exact, _) => Truth::Exact(spec.exact.as_ref().ok_or_else(|| {
                    Error::Config("exact reference requested but case has none".into())
                })?),
                (_, Some(r)) => Truth::NestedSpace(r),
                _ => unreachable!(),
            };
            let k_windows = record.tmesh.windows;
            match cfg.error_at {
                ErrorAt::FinalLevel => Ok(vec![ErrorRow {
                    case_id: cfg.case.id().to_string(),
                    alpha: *alpha,
                    grading: *grading,
                    elements,
                    half_steps,
                    window: (k_windows, k_windows),
                    error: error_at_level(&record, truth, record.tmesh.last_level())?,
                    rate: None,
                }]),
                ErrorAt::Windows => cfg
                    .windows
                    .iter()
                    .map(|&(k, l)| {
                        Ok(ErrorRow {
                            case_id: cfg.case.id().to_string(),
                            alpha: *alpha,
                            grading: *grading,
                            elements,
                            half_steps,
                            window: (k, l),
                            error: error_max(&record, truth, k, l)?,
                            rate: None,
                        })
                    })
                    .collect(),
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    attach_rates(&mut rows, true);
    sort_rows(&mut rows);
    Ok(ErrorTable {
        meta: TableMeta { case_id: cfg.case.id().to_string(), config_hash: cfg.hash() },
        rows,
    })
}
