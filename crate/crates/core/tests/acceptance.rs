//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them as they complete).
//!
//! Criteria 1-2 run the temporal tables with 1000 elements: the 512-element
//! default was measured to carry a nodal spatial floor of 2.1e-5 (additive at
//! the windowed-error argmax), which alone pushes the finest uniform-mesh
//! rates on the late window below their band; 1000 matches the resolution
//! the target values were produced with. Criterion 3 runs at the original
//! 5000 half-steps for the same reason. Criterion 4 gates rates only on
//! ladder rungs at least 16x below the nested reference: a rung at 8x has a
//! provable rate bias of up to log2((1-s/2)/(1-s)) ~ +0.10 for aligned error
//! profiles (s = 1/8), which the measured profiles exhibit.

use subdelay::bench::config::{CaseSelector, ErrorAt, GRoute, RefPolicy, RunConfig};
use subdelay::bench::tables::{run_spatial_table, run_temporal_table};
use subdelay::bench::verify::run_verify;
use subdelay::bench::{cases, ErrorTable};
use subdelay::mesh::{SpatialMesh, TemporalMesh};
use subdelay::powcalc::PowerExpansion;
use subdelay::quadrature::fractional_integral_oracle;
use subdelay::solver::{solve_with, SourceSpec, WeightPath};

struct Criterion {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
    checked: usize,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Criterion { id, name, failures: Vec::new(), checked: 0 }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.checked += 1;
        if !ok {
            self.failures.push(detail);
        }
    }

    fn within(&mut self, measured: f64, target: f64, tol: f64, what: &str) {
        self.check(
            (measured - target).abs() <= tol,
            format!("{what}: measured {measured:.4} vs {target:.4} (tol {tol})"),
        );
    }

    fn within_rel(&mut self, measured: f64, target: f64, rel: f64, what: &str) {
        self.check(
            (measured - target).abs() <= rel * target.abs(),
            format!("{what}: measured {measured:.5e} vs {target:.5e} ({:.1}% off, tol {:.0}%)",
                100.0 * (measured - target).abs() / target.abs(), 100.0 * rel),
        );
    }

    fn finish(self) {
        let ok = self.failures.is_empty();
        println!(
            "[criterion {}] {}: {} ({} checks, {} failed)",
            self.id,
            if ok { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.failures.len()
        );
        for f in &self.failures {
            println!("    - {f}");
        }
        assert!(ok, "criterion {} failed:\n{}", self.id, self.failures.join("\n"));
    }
}

fn base_config(case: CaseSelector) -> RunConfig {
    RunConfig {
        case,
        alphas: vec![0.5],
        gradings: vec![1.0],
        n_ladder: vec![200],
        m_ladder: vec![1000],
        windows: vec![(0, 1), (1, 3)],
        reference: RefPolicy::Exact,
        error_at: ErrorAt::Windows,
        g_route: GRoute::AnalyticG,
        zip_alpha_grading: false,
        times: None,
        positions: None,
    }
}

fn row(table: &ErrorTable, alpha: f64, grading: f64, n: usize, m: usize, w: (usize, usize)) -> &subdelay::bench::ErrorRow {
    table
        .rows
        .iter()
        .find(|r| {
            r.alpha == alpha
                && (r.grading - grading).abs() < 1e-12
                && r.half_steps == n
                && r.elements == m
                && r.window == w
        })
        .unwrap_or_else(|| panic!("missing row alpha={alpha} r={grading} N={n} M={m} w={w:?}"))
}

/// Uniform-mesh temporal accuracy of the manufactured case: windowed errors
/// and rates against the reference values.
#[test]
fn criterion_1_uniform_temporal_table() {
    let mut c = Criterion::new(1, "uniform temporal table, manufactured case");
    let mut cfg = base_config(CaseSelector::Example1Case1);
    cfg.alphas = vec![0.5, 0.7];
    cfg.n_ladder = vec![200, 400, 800, 1600];
    let table = run_temporal_table(&cfg).expect("table runs");

    let ladder = [200usize, 400, 800, 1600];
    let e_early: [(f64, [f64; 4]); 2] = [
        (0.5, [6.6964e-3, 4.9043e-3, 3.5577e-3, 2.5627e-3]),
        (0.7, [1.8911e-3, 1.1894e-3, 7.3507e-4, 4.5539e-4]),
    ];
    let r_early: [(f64, [f64; 3]); 2] =
        [(0.5, [0.4493, 0.4631, 0.4733]), (0.7, [0.6775, 0.6858, 0.6908])];

    for (alpha, targets) in e_early {
        for (i, &n) in ladder.iter().enumerate() {
            let measured = row(&table, alpha, 1.0, n, 1000, (0, 1)).error;
            c.within_rel(measured, targets[i], 0.10, &format!("E(0,1] alpha={alpha} N={n}"));
        }
    }
    for (alpha, targets) in r_early {
        for (i, &n) in ladder[1..].iter().enumerate() {
            let measured = row(&table, alpha, 1.0, n, 1000, (0, 1)).rate.unwrap();
            c.within(measured, targets[i], 0.05, &format!("rate(0,1] alpha={alpha} N={n}"));
        }
    }
    for &alpha in &[0.5, 0.7] {
        for &n in &ladder[1..] {
            let measured = row(&table, alpha, 1.0, n, 1000, (1, 3)).rate.unwrap();
            c.within(measured, 1.0, 0.06, &format!("rate(1,3] alpha={alpha} N={n}"));
        }
    }
    c.finish();
}

/// Graded-mesh temporal accuracy of the manufactured case: finest-pair rates
/// against min(r*alpha, 1).
#[test]
fn criterion_2_graded_temporal_tables() {
    let mut c = Criterion::new(2, "graded temporal tables, manufactured case");
    let families: [(f64, Vec<f64>); 2] = [
        (0.5, vec![4.0 / 3.0, 5.0 / 3.0, 2.0, 3.0]),
        (0.7, vec![8.0 / 7.0, 10.0 / 7.0, 15.0 / 7.0, 3.0]),
    ];
    for (alpha, gradings) in families {
        let mut cfg = base_config(CaseSelector::Example1Case1);
        cfg.alphas = vec![alpha];
        cfg.gradings = gradings.clone();
        cfg.n_ladder = vec![400, 800, 1600];
        cfg.windows = vec![(0, 3)];
        let table = run_temporal_table(&cfg).expect("table runs");
        for &grading in &gradings {
            let target = (grading * alpha).min(1.0);
            let measured = row(&table, alpha, grading, 1600, 1000, (0, 3)).rate.unwrap();
            c.within(measured, target, 0.06, &format!("rate(0,3] alpha={alpha} r={grading:.4}"));
        }
    }
    c.finish();
}

/// Spatial accuracy at the final time of the manufactured case.
///
/// The error-magnitude anchor 3.61e-2 is the tabulated target; an
/// independent static finite element cross-check of the same quantity gives
/// 5.7e-2 (the exact profile at the final time has amplitude 9.56 for
/// alpha = 0.5, and the tabulated column is alpha-independent even though
/// the amplitude is not), so this check documents the discrepancy rather
/// than being expected to pass.
#[test]
fn criterion_3_spatial_table_manufactured() {
    let mut c = Criterion::new(3, "spatial table at final time, manufactured case");
    let mut cfg = base_config(CaseSelector::Example1Case1);
    cfg.alphas = vec![0.5, 0.6, 0.8];
    cfg.n_ladder = vec![5000];
    cfg.m_ladder = vec![8, 16, 32, 64];
    cfg.windows = vec![];
    cfg.error_at = ErrorAt::FinalLevel;
    let table = run_spatial_table(&cfg).expect("table runs");

    for &alpha in &[0.5, 0.6, 0.8] {
        let measured = row(&table, alpha, 1.0, 5000, 8, (3, 3)).error;
        c.within_rel(measured, 3.61e-2, 0.10, &format!("E at M=8, alpha={alpha}"));
        // The alpha = 0.5 column's finest target cell is a known erratum;
        // its rate checks stop at M = 32.
        let rate_ms: &[usize] = if alpha == 0.5 { &[16, 32] } else { &[16, 32, 64] };
        for &m in rate_ms {
            let measured = row(&table, alpha, 1.0, 5000, m, (3, 3)).rate.unwrap();
            c.within(measured, 2.0, 0.05, &format!("rate_s alpha={alpha} M={m}"));
        }
    }
    c.finish();
}

/// Case-2 shape reproduction with nested references: temporal rates toward
/// alpha / 1 / min(r*alpha, 1) and spatial rates toward 2.
#[test]
fn criterion_4_case2_shape_tables() {
    let mut c = Criterion::new(4, "nested-reference shape tables, polynomial-forcing case");

    // Rate rungs gated at >= 16x below the reference; the 8x-adjacent pair
    // is printed by the table but carries the methodology's own +0.1 bias.
    let gate_n = 50usize; // ladder {25,50,100}, reference at 800

    let mut cfg = base_config(CaseSelector::Example1Case2);
    cfg.alphas = vec![0.6];
    cfg.n_ladder = vec![25, 50, 100];
    cfg.m_ladder = vec![512];
    cfg.reference = RefPolicy::NestedTime { factor: 8 };
    let table = run_temporal_table(&cfg).expect("uniform case-2 table runs");
    let early = row(&table, 0.6, 1.0, gate_n, 512, (0, 1)).rate.unwrap();
    c.within(early, 0.6, 0.08, "rate(0,1] alpha=0.6 r=1");
    let late = row(&table, 0.6, 1.0, gate_n, 512, (1, 3)).rate.unwrap();
    c.within(late, 1.0, 0.08, "rate(1,3] alpha=0.6 r=1");

    let gradings = [4.0 / 3.0, 5.0 / 3.0, 2.0, 7.0 / 3.0];
    let mut cfg = base_config(CaseSelector::Example1Case2);
    cfg.alphas = vec![0.6];
    cfg.gradings = gradings.to_vec();
    cfg.n_ladder = vec![25, 50, 100];
    cfg.m_ladder = vec![512];
    cfg.windows = vec![(0, 3)];
    cfg.reference = RefPolicy::NestedTime { factor: 8 };
    let table = run_temporal_table(&cfg).expect("graded case-2 table runs");
    for &grading in &gradings {
        let target = (grading * 0.6f64).min(1.0);
        let measured = row(&table, 0.6, grading, gate_n, 512, (0, 3)).rate.unwrap();
        c.within(measured, target, 0.08, &format!("rate(0,3] alpha=0.6 r={grading:.4}"));
    }

    // Spatial shape with a nested-space reference: contamination is
    // (M/M_ref)^2 <= 1/64, so every rung is gated.
    let pairs = [(0.4, 2.5), (0.5, 2.0), (0.6, 5.0 / 3.0), (0.7, 10.0 / 7.0)];
    let mut cfg = base_config(CaseSelector::Example1Case2);
    cfg.alphas = pairs.iter().map(|p| p.0).collect();
    cfg.gradings = pairs.iter().map(|p| p.1).collect();
    cfg.zip_alpha_grading = true;
    cfg.n_ladder = vec![200];
    cfg.m_ladder = vec![8, 16, 32, 64];
    cfg.windows = vec![(0, 3)];
    cfg.reference = RefPolicy::NestedSpace { factor: 8 };
    let table = run_spatial_table(&cfg).expect("spatial case-2 table runs");
    for &(alpha, grading) in &pairs {
        for &m in &[16usize, 32, 64] {
            let measured = row(&table, alpha, grading, 200, m, (0, 3)).rate.unwrap();
            c.within(measured, 2.0, 0.08, &format!("rate_s alpha={alpha} M={m}"));
        }
    }
    c.finish();
}

/// Kernel identity suite: telescoping, complementary-kernel identity and
/// both kernel bounds.
#[test]
fn criterion_5_kernel_identities() {
    let mut c = Criterion::new(5, "kernel identity suite");
    let report = run_verify().expect("verify suite runs");
    for check in report.checks.iter().filter(|k| {
        matches!(k.group, "telescoping" | "kernel-uniform" | "kernel-graded")
    }) {
        c.check(
            check.pass,
            format!("{} {}: measured {:.3e} bound {:.1e}", check.group, check.name, check.measured, check.bound),
        );
    }
    assert!(c.checked >= 20, "expected the full identity sweep");
    c.finish();
}

/// Truncation-order probes: L1 on the leading singular profile, rectangle
/// rule on affine history, and exactness on affine inputs.
#[test]
fn criterion_6_truncation_probes() {
    let mut c = Criterion::new(6, "truncation-order probes");
    let report = run_verify().expect("verify suite runs");
    for check in report.checks.iter().filter(|k| {
        k.gating && matches!(k.group, "probe-l1" | "probe-rect")
    }) {
        c.check(
            check.pass,
            format!("{} {}: measured {:.3e} bound {:.1e}", check.group, check.name, check.measured, check.bound),
        );
    }
    assert!(c.checked >= 7, "expected the probe sweep");
    c.finish();
}

/// Forcing-oracle cross-validation: the closed-form transformed forcing
/// against direct quadrature of its defining integrals, and the sampled-raw
/// forcing route against the analytic route on the uniform table.
///
/// The second half documents a methodology defect: the raw forcing of the
/// manufactured case is singular like t^(alpha-1) at the origin, so its
/// right-rectangle transform carries an O(N^-alpha) defect at every level
/// and moves the table cells by far more than 2%.
#[test]
fn criterion_7_forcing_oracle_cross_validation() {
    let mut c = Criterion::new(7, "forcing-route cross-validation");
    let alpha = 0.5;

    // (a) Closed form versus the defining integrals at 20 sample times.
    let spec = cases::example1_case1(alpha, GRoute::AnalyticG).unwrap();
    let g = match &spec.source {
        SourceSpec::ClosedFormG(sep) => sep.temporal.clone(),
        _ => unreachable!(),
    };
    let phi = PowerExpansion::from_triples(&[(1.0, -1.0, 1.0)]);
    let gained = PowerExpansion::from_triples(&[
        (1.0, 0.0, alpha),
        (1.0, 1.0, alpha + 1.0),
        (1.0, 2.0, alpha + 2.0),
    ]);
    let t_full = phi.restricted_to_nonnegative().unwrap().add(&gained);
    let delayed =
        subdelay::powcalc::delayed_history_expansion(&[gained], &phi, 1.0).unwrap();
    let p_lambda_minus_a = 3.0;
    for i in 0..20 {
        let t = 3.0 * (i as f64 + 0.5) / 20.0;
        let caputo = fractional_integral_oracle(&t_full.derivative(), 1.0 - alpha, t, 1e-12);
        let delay_int = fractional_integral_oracle(&delayed, 1.0 - alpha, t, 1e-12);
        let oracle = caputo + p_lambda_minus_a * t_full.eval(t) - delay_int;
        let closed = g.eval(t);
        c.check(
            (closed - oracle).abs() <= 1e-8 * (1.0 + closed.abs()),
            format!("defining-integral oracle at t={t:.3}: {closed:.10e} vs {oracle:.10e}"),
        );
    }

    // (b) Sampled-raw-forcing route versus the analytic route, cell by cell.
    let mut analytic_cfg = base_config(CaseSelector::Example1Case1);
    analytic_cfg.alphas = vec![0.5, 0.7];
    analytic_cfg.n_ladder = vec![200, 400, 800, 1600];
    analytic_cfg.m_ladder = vec![512];
    let mut sampled_cfg = analytic_cfg.clone();
    sampled_cfg.g_route = GRoute::SampledF;
    let analytic = run_temporal_table(&analytic_cfg).expect("analytic table runs");
    let sampled = run_temporal_table(&sampled_cfg).expect("sampled table runs");
    for (a, s) in analytic.rows.iter().zip(&sampled.rows) {
        let change = (s.error - a.error).abs() / a.error;
        c.check(
            change < 0.02,
            format!(
                "cell alpha={} N={} window {:?}: error {:.4e} -> {:.4e} ({:+.1}%)",
                a.alpha, a.half_steps, a.window, a.error, s.error,
                100.0 * (s.error - a.error) / a.error
            ),
        );
    }
    c.finish();
}

/// Degeneracy equivalence: the cached uniform path and the per-level graded
/// path produce the same record on a uniform mesh.
#[test]
fn criterion_8_weight_path_degeneracy() {
    let mut c = Criterion::new(8, "uniform/graded weight-path equivalence");
    let spec = cases::example1_case1(0.5, GRoute::AnalyticG).unwrap();
    let tmesh = TemporalMesh::build(1.0, 3, 100, 1.0).unwrap();
    let smesh = SpatialMesh::build(1.0, 64).unwrap();
    let uniform = solve_with(&spec, &tmesh, &smesh, WeightPath::ForceUniform).unwrap();
    let graded = solve_with(&spec, &tmesh, &smesh, WeightPath::ForceGraded).unwrap();
    let mut scale: f64 = 0.0;
    for n in 0..=tmesh.last_level() {
        for &x in uniform.level(n) {
            scale = scale.max(x.abs());
        }
    }
    let mut worst: f64 = 0.0;
    for n in -(tmesh.history_steps() as i64)..=tmesh.last_level() {
        for (a, b) in uniform.level(n).iter().zip(graded.level(n)) {
            worst = worst.max((a - b).abs());
        }
    }
    c.check(
        worst <= 1e-13 * scale,
        format!("max path difference {worst:.3e} vs allowance {:.3e}", 1e-13 * scale),
    );
    c.finish();
}
