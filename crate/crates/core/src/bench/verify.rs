//! Kernel identity suite and truncation-order probes.
//!
//! Every check reports a measured value against its bound; gating checks are
//! the ones the acceptance suite relies on, the rest are informational.

use std::fmt::Write as _;

use crate::error::Result;
use crate::fracops::{
    graded_kernel_bound_excess, kernel_identity_residual, omega, p_sequence_graded,
    p_sequence_uniform, truncation_probe_fracint, truncation_probe_l1, weight_row, WeightRow,
};
use crate::mesh::TemporalMesh;
use crate::powcalc::PowerExpansion;

/// One verification entry.
#[derive(Debug, Clone)]
pub struct VerifyCheck {
    pub group: &'static str,
    pub name: String,
    /// Measured value (residual, excess over a bound, or order deviation).
    pub measured: f64,
    /// The check passes when `measured <= bound`.
    pub bound: f64,
    pub pass: bool,
    pub gating: bool,
}

/// Full verification report.
#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    fn push(&mut self, group: &'static str, name: String, measured: f64, bound: f64, gating: bool) {
        self.checks.push(VerifyCheck {
            group,
            name,
            measured,
            bound,
            pass: measured <= bound,
            gating,
        });
    }

    pub fn all_gating_pass(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kernel and truncation verification");
        let _ = writeln!(out, "{:-<78}", "");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {:<14} {:<40} measured {:>12.4e}  bound {:>9.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.group,
                c.name,
                c.measured,
                c.bound,
            );
        }
        let _ = writeln!(out, "{:-<78}", "");
        let _ = writeln!(
            out,
            "{} checks, {} failed ({} gating failures)",
            self.checks.len(),
            self.checks.iter().filter(|c| !c.pass).count(),
            self.checks.iter().filter(|c| c.gating && !c.pass).count(),
        );
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("group,check,measured,bound,pass,gating\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                c.group,
                c.name.replace(',', ";"),
                super::output::sci5(c.measured),
                super::output::sci5(c.bound),
                c.pass,
                c.gating
            );
        }
        out
    }
}

const ALPHAS: [f64; 3] = [0.3, 0.5, 0.7];
const GRADINGS: [f64; 3] = [1.0, 2.0, 3.0];

fn rows_up_to(mesh: &TemporalMesh, alpha: f64, n: usize) -> Result<Vec<WeightRow>> {
    (1..=n).map(|level| weight_row(mesh, alpha, level)).collect()
}

/// Runs the full identity and probe suite (bounded to about 200 levels, so
/// it finishes in seconds).
pub fn run_verify() -> Result<VerifyReport> {
    run_verify_over(&ALPHAS, &GRADINGS)
}

/// Identity/probe suite over caller-chosen orders and gradings.
pub fn run_verify_over(alphas: &[f64], gradings: &[f64]) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let levels = 200usize;

    // Telescoping weight identity, all mesh gradings.
    for &alpha in alphas {
        for &grading in gradings {
            let mesh = TemporalMesh::build(1.0, 2, levels / 4, grading)?;
            let mut worst: f64 = 0.0;
            for n in 1..=levels {
                let row = weight_row(&mesh, alpha, n)?;
                let expect = omega(2.0 - alpha, mesh.point(n as i64))?;
                worst = worst.max(((row.telescoped_total() - expect) / expect).abs());
            }
            report.push(
                "telescoping",
                format!("sum rho*a = omega_(2-a)(t_n), a={alpha}, r={grading}, n<=200"),
                worst,
                1e-12,
                true,
            );
        }
    }

    // Uniform complementary kernel: inversion identity and sum bound.
    for &alpha in alphas {
        let mesh = TemporalMesh::build(1.0, 1, levels / 2, 1.0)?;
        let row = weight_row(&mesh, alpha, levels)?;
        let a: Vec<f64> = (1..=levels).rev().map(|k| row.coeff(k)).collect();
        let seq = p_sequence_uniform(alpha, &a)?;
        report.push(
            "kernel-uniform",
            format!("sum P_(n-j) a_(j-k) = 1, a={alpha}, n<=200"),
            kernel_identity_residual(&seq, &a)?,
            1e-10,
            true,
        );
        let mut excess: f64 = f64::NEG_INFINITY;
        let mut prefix = 0.0;
        for n in 1..=levels {
            prefix += seq.values()[n - 1];
            excess = excess.max(prefix - omega(1.0 + alpha, mesh.point(n as i64))?);
        }
        report.push(
            "kernel-uniform",
            format!("sum P <= omega_(1+a)(t_n), a={alpha}, n<=200"),
            excess,
            1e-10,
            true,
        );
    }

    // Graded complementary kernel: weighted sum bound per delay window.
    for &alpha in alphas {
        for &grading in gradings {
            let mesh = TemporalMesh::build(1.0, 2, levels / 4, grading)?;
            let rows = rows_up_to(&mesh, alpha, levels)?;
            let mut excess: f64 = f64::NEG_INFINITY;
            for n in 1..=levels {
                let seq = p_sequence_graded(&rows[..n])?;
                excess = excess.max(graded_kernel_bound_excess(&seq, &mesh)?);
            }
            report.push(
                "kernel-graded",
                format!("weighted kernel sum <= 1, a={alpha}, r={grading}, n<=200"),
                excess,
                1e-10,
                true,
            );
        }
    }

    // L1 exactness on affine inputs.
    for &grading in &[1.0, 2.0] {
        let target = PowerExpansion::from_triples(&[(1.0, 0.0, 1.0), (0.5, 0.0, 0.0)]);
        let probe = truncation_probe_l1(0.5, grading, 1.0, 2, &[32], &target)?;
        let worst = probe.entries[0].window_max.iter().cloned().fold(0.0f64, f64::max);
        report.push(
            "probe-l1",
            format!("exact on affine input, r={grading}"),
            worst,
            1e-11,
            true,
        );
    }

    // L1 truncation order on the leading singular profile t^a.
    for &alpha in alphas {
        let target = PowerExpansion::from_triples(&[(1.0, 0.0, alpha)]);
        let probe = truncation_probe_l1(alpha, 1.0, 1.0, 1, &[32, 64, 128, 256], &target)?;
        let order = probe.last_order().unwrap_or(f64::NAN);
        report.push(
            "probe-l1",
            format!(
                "weighted order vs {:.4} on t^a, a={alpha}, r=1",
                probe.predicted_order
            ),
            (order - probe.predicted_order).abs(),
            0.1,
            true,
        );
    }
    // Same probe on the full first-window profile of the manufactured case.
    {
        let alpha = 0.5;
        let target =
            PowerExpansion::from_triples(&[(1.0, 0.0, 0.0), (1.0, 0.0, 1.0), (1.0, 0.0, alpha)]);
        let probe = truncation_probe_l1(alpha, 1.0, 1.0, 1, &[32, 64, 128, 256], &target)?;
        let order = probe.last_order().unwrap_or(f64::NAN);
        report.push(
            "probe-l1",
            format!("weighted order vs {:.4} on 1+t+t^a, a=0.5, r=1", probe.predicted_order),
            (order - probe.predicted_order).abs(),
            0.1,
            false,
        );
    }

    // Rectangle-rule order on affine history, uniform and graded.
    let affine = PowerExpansion::from_triples(&[(1.0, -1.0, 1.0)]);
    for &grading in &[1.0, 2.0] {
        let probe = truncation_probe_fracint(0.5, grading, 1.0, 2, &[16, 32, 64, 128], &affine)?;
        let order = probe.last_order().unwrap_or(f64::NAN);
        report.push(
            "probe-rect",
            format!("order vs 1.0 on affine history, r={grading}"),
            (order - 1.0).abs(),
            0.1,
            grading == 1.0,
        );
    }
    // Constant history integrates exactly.
    {
        let one = PowerExpansion::from_triples(&[(1.0, -1.0, 0.0)]);
        let probe = truncation_probe_fracint(0.5, 1.0, 1.0, 2, &[32], &one)?;
        report.push(
            "probe-rect",
            "exact on constant history".to_string(),
            probe.entries[0].fitted_max,
            1e-12,
            true,
        );
    }

    Ok(report)
}
