//! Experiment harness: error tables, reference solves, kernel verification
//! and flat-file output for the command-line interface.
//!
//! Errors are measured in the discrete L2 norm of nodal differences, either
//! against a known separable exact solution (interpolated at the nodes) or
//! against a reference record on a nested finer mesh. Windowed errors follow
//! `E(M, N, k, l) = max over levels in (2kN, 2lN] of the nodal L2 error`,
//! and rates are base-2 logarithms of successive error ratios under mesh
//! doubling.

pub mod cases;
pub mod config;
pub mod output;
pub mod tables;
pub mod verify;

use crate::error::{Error, Result};
use crate::fem1d::{assemble_mass, interpolate, l2_norm};
use crate::solver::{SeparableFn, SolveRecord};

/// What a record is compared against.
#[derive(Debug, Clone, Copy)]
pub enum Truth<'a> {
    /// Known separable exact solution, interpolated at the nodes.
    Exact(&'a SeparableFn),
    /// Record on the same spatial mesh and a nested finer temporal mesh.
    NestedTime(&'a SolveRecord),
    /// Record on the same temporal mesh and a nested finer spatial mesh.
    NestedSpace(&'a SolveRecord),
}

/// Shared validation and per-level measurement for [`error_max`] and
/// [`error_at_level`].
struct ErrorProbe<'a> {
    record: &'a SolveRecord,
    truth: Truth<'a>,
    mass: crate::fem1d::TriDiag,
    profile_nodal: Vec<f64>,
    time_stride: i64,
    space_stride: usize,
}

impl<'a> ErrorProbe<'a> {
    fn new(record: &'a SolveRecord, truth: Truth<'a>) -> Result<Self> {
        let mass = assemble_mass(&record.smesh);
        let mut probe = ErrorProbe {
            record,
            truth,
            mass,
            profile_nodal: Vec::new(),
            time_stride: 1,
            space_stride: 1,
        };
        match truth {
            Truth::Exact(exact) => {
                probe.profile_nodal =
                    interpolate(|x| exact.profile.eval(x, record.smesh.length), &record.smesh);
            }
            Truth::NestedTime(reference) => {
                if reference.smesh.elements != record.smesh.elements
                    || (reference.smesh.length - record.smesh.length).abs() > 1e-12
                {
                    return Err(Error::MeshMismatch(
                        "time reference must share the spatial mesh".into(),
                    ));
                }
                probe.time_stride = reference.tmesh.refinement_stride(&record.tmesh)? as i64;
            }
            Truth::NestedSpace(reference) => {
                if reference.tmesh.half_steps != record.tmesh.half_steps {
                    return Err(Error::MeshMismatch(
                        "space reference must share the temporal mesh".into(),
                    ));
                }
                // Identical parameters give identical points; spot-check.
                reference.tmesh.refinement_stride(&record.tmesh)?;
                if reference.smesh.elements % record.smesh.elements != 0
                    || reference.smesh.elements == record.smesh.elements
                {
                    return Err(Error::MeshMismatch(format!(
                        "spatial meshes {} and {} are not nested",
                        record.smesh.elements, reference.smesh.elements
                    )));
                }
                probe.space_stride = reference.smesh.elements / record.smesh.elements;
            }
        }
        Ok(probe)
    }

    /// Nodal L2 error at one level of the coarse record.
    fn at_level(&self, level: i64) -> Result<f64> {
        let u = self.record.level(level);
        let diff: Vec<f64> = match self.truth {
            Truth::Exact(exact) => {
                let tv = exact.temporal.eval(self.record.tmesh.point(level));
                u.iter().zip(&self.profile_nodal).map(|(a, p)| a - p * tv).collect()
            }
            Truth::NestedTime(reference) => {
                let fine = reference.level(level * self.time_stride);
                u.iter().zip(fine).map(|(a, b)| a - b).collect()
            }
            Truth::NestedSpace(reference) => {
                let fine = reference.level(level);
                u.iter()
                    .enumerate()
                    .map(|(j, a)| a - fine[self.space_stride * (j + 1) - 1])
                    .collect()
            }
        };
        l2_norm(&diff, &self.mass)
    }
}

/// Max nodal L2 error over levels `2kN+1 ..= 2lN`.
pub fn error_max(
    record: &SolveRecord,
    truth: Truth<'_>,
    window_start: usize,
    window_end: usize,
) -> Result<f64> {
    let k_windows = record.tmesh.windows;
    if !(window_start < window_end && window_end <= k_windows) {
        return Err(Error::InvalidParameter(format!(
            "window pair ({window_start}, {window_end}) invalid for {k_windows} windows"
        )));
    }
    let probe = ErrorProbe::new(record, truth)?;
    let two_n = record.tmesh.history_steps();
    let lo = (window_start * two_n + 1) as i64;
    let hi = (window_end * two_n) as i64;
    let mut worst: f64 = 0.0;
    for level in lo..=hi {
        worst = worst.max(probe.at_level(level)?);
    }
    Ok(worst)
}

/// Nodal L2 error at a single level.
pub fn error_at_level(record: &SolveRecord, truth: Truth<'_>, level: i64) -> Result<f64> {
    if level < 1 || level > record.tmesh.last_level() {
        return Err(Error::InvalidParameter(format!("level {level} out of range")));
    }
    ErrorProbe::new(record, truth)?.at_level(level)
}

/// Convergence rate `log2(e_coarse / e_fine)`; both inputs must be positive.
pub fn rate(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rate needs positive errors, got {e_coarse} and {e_fine}"
        )));
    }
    Ok((e_coarse / e_fine).log2())
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub case_id: String,
    pub alpha: f64,
    pub grading: f64,
    /// Spatial elements `M`.
    pub elements: usize,
    /// Half-window steps `N`.
    pub half_steps: usize,
    /// Window pair `(k, l)`; `k = l` marks a single-level error at `t_{2lN}`.
    pub window: (usize, usize),
    pub error: f64,
    /// Rate against the half-resolution row, when that row exists.
    pub rate: Option<f64>,
}

/// Table metadata; the config hash makes reruns identifiable.
#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    pub case_id: String,
    pub config_hash: String,
}

/// A finished error table.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub meta: TableMeta,
    pub rows: Vec<ErrorRow>,
}
