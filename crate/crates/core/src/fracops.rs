//! Discrete fractional operators on a temporal mesh.
//!
//! For a mesh level `n` the shared coefficient family is
//!
//! `a^{(n)}_{n-k} = [omega_{2-a}(t_n - t_{k-1}) - omega_{2-a}(t_n - t_k)] / rho_k`
//!
//! with `omega_b(t) = t^{b-1} / Gamma(b)`. The L1 value
//! `sum_k a^{(n)}_{n-k} (u^k - u^{k-1})` approximates the Caputo derivative of
//! order `a` at `t_n`, and the fractional right-rectangle value
//! `sum_k rho_k a^{(n)}_{n-k} v^k` approximates the Riemann-Liouville integral
//! of order `1-a` of the function sampled by `v` at the right endpoints.
//!
//! The complementary kernel sequences invert the weight convolution:
//! on uniform meshes `P_0 = 1/a_0` with
//! `P_{n-k} = (1/a_0) sum_{j=k+1}^n P_{n-j} (a_{j-k-1} - a_{j-k})`, and on
//! graded meshes the analogous two-index recursion applies with per-level
//! coefficient rows. Truncation probes measure the empirical convergence
//! order of both discrete operators against the exact fractional calculus of
//! power expansions.

use crate::error::{Error, Result};
use crate::mesh::TemporalMesh;
use crate::powcalc::{caputo_of_power, rlint_of_power, PowerExpansion};
use crate::special::recip_gamma;

/// Kernel function `omega_alpha(t) = t^{alpha-1} / Gamma(alpha)`.
pub fn omega(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega order must be positive, got {alpha}")));
    }
    if t <= 0.0 || t.is_nan() {
        return Err(Error::InvalidParameter(format!("omega argument must be positive, got {t}")));
    }
    Ok(t.powf(alpha - 1.0) * recip_gamma(alpha))
}

/// L1 / right-rectangle coefficients for one time level.
#[derive(Debug, Clone)]
pub struct WeightRow {
    /// Time level `n`, `1 <= n <= 2KN`.
    pub level: usize,
    /// Fractional order in (0,1).
    pub alpha: f64,
    /// `a^{(n)}_{n-k}` for `k = 1..=n`, stored at index `k-1`.
    weights: Vec<f64>,
    /// `rho_k` for `k = 1..=n`, stored at index `k-1`.
    steps: Vec<f64>,
}

impl WeightRow {
    /// `a^{(n)}_{n-k}` indexed by `k`.
    pub fn coeff(&self, k: usize) -> f64 {
        self.weights[k - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// `sum_k rho_k a^{(n)}_{n-k}`, which telescopes to `omega_{2-a}(t_n)`.
    pub fn telescoped_total(&self) -> f64 {
        self.weights.iter().zip(&self.steps).map(|(a, r)| a * r).sum()
    }
}

/// Fills `a^{(n)}_{n-k}` for `k = 1..=level` into `out` (resized to `level`).
///
/// Shared by [`weight_row`] and the solver's per-level scratch path.
pub(crate) fn fill_weights(mesh: &TemporalMesh, alpha: f64, level: usize, out: &mut Vec<f64>) {
    let n = level;
    let rg = recip_gamma(2.0 - alpha);
    let t_n = mesh.point(n as i64);
    out.clear();
    out.reserve(n);
    // om_prev runs over omega_{2-a}(t_n - t_{k-1}); the k = n entry is zero.
    let mut om_prev = (t_n - mesh.point(0)).powf(1.0 - alpha) * rg;
    for k in 1..=n {
        let om_k = if k == n {
            0.0
        } else {
            (t_n - mesh.point(k as i64)).powf(1.0 - alpha) * rg
        };
        out.push((om_prev - om_k) / mesh.step(k as i64));
        om_prev = om_k;
    }
}

/// Builds the coefficient row for `level` on `mesh`.
pub fn weight_row(mesh: &TemporalMesh, alpha: f64, level: usize) -> Result<WeightRow> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("order must be in (0,1), got {alpha}")));
    }
    if level < 1 || level as i64 > mesh.last_level() {
        return Err(Error::InvalidParameter(format!(
            "level {level} outside 1..={}",
            mesh.last_level()
        )));
    }
    let mut weights = Vec::new();
    fill_weights(mesh, alpha, level, &mut weights);
    let steps = (1..=level).map(|k| mesh.step(k as i64)).collect();
    Ok(WeightRow { level, alpha, weights, steps })
}

/// L1 value `sum_{k=1}^n a^{(n)}_{n-k} (u^k - u^{k-1})` for `u = u^0..u^n`.
pub fn l1_apply(row: &WeightRow, u: &[f64]) -> Result<f64> {
    if u.len() != row.level + 1 {
        return Err(Error::DimensionMismatch(format!(
            "need {} values u^0..u^n, got {}",
            row.level + 1,
            u.len()
        )));
    }
    Ok(row
        .weights
        .iter()
        .zip(u.windows(2))
        .map(|(a, w)| a * (w[1] - w[0]))
        .sum())
}

/// Right-rectangle value `sum_{k=1}^n rho_k a^{(n)}_{n-k} v^k` for `v = v^1..v^n`.
pub fn fracint_apply(row: &WeightRow, v: &[f64]) -> Result<f64> {
    if v.len() != row.level {
        return Err(Error::DimensionMismatch(format!(
            "need {} values v^1..v^n, got {}",
            row.level,
            v.len()
        )));
    }
    Ok(row
        .weights
        .iter()
        .zip(&row.steps)
        .zip(v)
        .map(|((a, r), x)| a * r * x)
        .sum())
}

/// Which complementary-kernel recursion produced a [`KernelSeq`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `values[m] = P_m`, level-independent coefficients of a uniform mesh.
    Uniform,
    /// `values[j-1] = Pbar^{(n)}_{n-j}` for `j = 1..=n`.
    Graded,
}

/// Complementary kernel of the L1 weights.
#[derive(Debug, Clone)]
pub struct KernelSeq {
    pub alpha: f64,
    /// Length of the underlying weight history `n`.
    pub level: usize,
    pub kind: KernelKind,
    values: Vec<f64>,
}

impl KernelSeq {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Uniform-mesh kernel `P_0..P_{n-1}` from weights `a_0..a_{n-1}`.
///
/// Rejects non-positive or non-decreasing weight input.
pub fn p_sequence_uniform(alpha: f64, a: &[f64]) -> Result<KernelSeq> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("need at least one weight".into()));
    }
    for w in a.windows(2) {
        if !(w[1] > 0.0 && w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "uniform weights must be positive and strictly decreasing".into(),
            ));
        }
    }
    if a[0] <= 0.0 {
        return Err(Error::InvalidParameter("weights must be positive".into()));
    }
    let n = a.len();
    let mut p = Vec::with_capacity(n);
    p.push(1.0 / a[0]);
    for m in 1..n {
        let mut s = 0.0;
        for i in 0..m {
            s += p[i] * (a[m - 1 - i] - a[m - i]);
        }
        p.push(s / a[0]);
    }
    Ok(KernelSeq { alpha, level: n, kind: KernelKind::Uniform, values: p })
}

/// Graded-mesh kernel `Pbar^{(n)}_{n-j}` from the rows for levels `1..=n`.
///
/// Rows must come from one mesh: level `i` row at `rows[i-1]`, all with the
/// same order.
pub fn p_sequence_graded(rows: &[WeightRow]) -> Result<KernelSeq> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one weight row".into()));
    }
    let alpha = rows[0].alpha;
    for (i, row) in rows.iter().enumerate() {
        if row.level != i + 1 {
            return Err(Error::InvalidParameter(format!(
                "row {} has level {}, expected {}",
                i,
                row.level,
                i + 1
            )));
        }
        if (row.alpha - alpha).abs() > 1e-15 {
            return Err(Error::InvalidParameter("rows mix fractional orders".into()));
        }
    }
    let a = |i: usize, idx: usize| -> f64 { rows[i - 1].weights[idx] };
    let mut values = vec![0.0; n];
    // j = n: Pbar_0 = 1 / a_0^{(n)}.
    values[n - 1] = 1.0 / a(n, n - 1);
    for j in (1..n).rev() {
        let mut s = 0.0;
        for i in (j + 1)..=n {
            // a^{(i)}_{i-(j+1)} - a^{(i)}_{i-j} = weights[j] - weights[j-1] of row i.
            s += values[i - 1] * (a(i, j) - a(i, j - 1));
        }
        values[j - 1] = s / a(j, j - 1);
    }
    Ok(KernelSeq { alpha, level: n, kind: KernelKind::Graded, values })
}

/// Max deviation of the uniform inversion identity
/// `sum_{j=k}^n P_{n-j} a_{j-k} = 1` over all `1 <= k <= n`.
pub fn kernel_identity_residual(seq: &KernelSeq, a: &[f64]) -> Result<f64> {
    if seq.kind != KernelKind::Uniform {
        return Err(Error::InvalidParameter("identity check applies to the uniform kernel".into()));
    }
    if a.len() < seq.level {
        return Err(Error::DimensionMismatch("weight array shorter than kernel".into()));
    }
    let p = &seq.values;
    let mut worst: f64 = 0.0;
    // For offset L = n - k the sum is sum_{i=0}^{L} P_{L-i} a_i.
    for l in 0..seq.level {
        let s: f64 = (0..=l).map(|i| p[l - i] * a[i]).sum();
        worst = worst.max((s - 1.0).abs());
    }
    Ok(worst)
}

/// Excess of `sum_{j=1}^n P_{n-j}` over `omega_{1+a}(t_n)`; nonpositive means
/// the uniform kernel bound holds.
pub fn kernel_sum_excess(seq: &KernelSeq, t_n: f64) -> Result<f64> {
    if seq.kind != KernelKind::Uniform {
        return Err(Error::InvalidParameter("sum bound applies to the uniform kernel".into()));
    }
    let sum: f64 = seq.values.iter().sum();
    Ok(sum - omega(1.0 + seq.alpha, t_n)?)
}

/// Excess over 1 of the graded kernel bound
/// `sum_{j=2(k-1)N+1}^{n} Pbar^{(n)}_{n-j} omega_{1-a}(t_j - (k-1)tau) <= 1`,
/// maximized over delay windows `k`. Nonpositive means the bound holds.
pub fn graded_kernel_bound_excess(seq: &KernelSeq, mesh: &TemporalMesh) -> Result<f64> {
    if seq.kind != KernelKind::Graded {
        return Err(Error::InvalidParameter("weighted bound applies to the graded kernel".into()));
    }
    let n = seq.level;
    let two_n = mesh.history_steps();
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=mesh.windows {
        let start_level = (k - 1) * two_n;
        if start_level + 1 > n {
            break;
        }
        let offset = (k - 1) as f64 * mesh.tau;
        let mut s = 0.0;
        for j in (start_level + 1)..=n {
            s += seq.values[j - 1] * omega(1.0 - seq.alpha, mesh.point(j as i64) - offset)?;
        }
        worst = worst.max(s - 1.0);
    }
    Ok(worst)
}

/// One rung of a truncation-order probe ladder.
#[derive(Debug, Clone)]
pub struct ProbeEntry {
    /// Half-window step count `N` of this rung.
    pub half_steps: usize,
    /// Quantity the order is fitted on (weighted for the L1 probe, raw max
    /// for the rectangle probe).
    pub fitted_max: f64,
    /// Raw max error per delay window.
    pub window_max: Vec<f64>,
}

/// Result of a truncation-order probe over a doubling ladder of `N`.
#[derive(Debug, Clone)]
pub struct ProbeLadder {
    pub alpha: f64,
    pub grading: f64,
    pub entries: Vec<ProbeEntry>,
    /// Fitted order per doubling, `log2(fitted_max[i] / fitted_max[i+1])`.
    pub orders: Vec<f64>,
    /// Order the truncation analysis predicts for the fitted quantity.
    pub predicted_order: f64,
}

impl ProbeLadder {
    /// Order fitted over the last doubling, if any.
    pub fn last_order(&self) -> Option<f64> {
        self.orders.last().copied()
    }
}

fn validate_ladder(n_ladder: &[usize]) -> Result<()> {
    if n_ladder.is_empty() {
        return Err(Error::InvalidParameter("probe ladder is empty".into()));
    }
    for w in n_ladder.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::InvalidParameter("probe ladder must double N".into()));
        }
    }
    Ok(())
}

/// Measures the L1 truncation error against the exact Caputo derivative of a
/// power-expansion target over a doubling ladder of meshes.
///
/// The fitted quantity is `max_n t_n^w |error(t_n)|` over the first window
/// with weight `w = min((2-a)/r, 1+a)`, for which the predicted decay order
/// per `N`-doubling is `min(2-a, r(1+a))`.
pub fn truncation_probe_l1(
    alpha: f64,
    grading: f64,
    tau: f64,
    windows: usize,
    n_ladder: &[usize],
    target: &PowerExpansion,
) -> Result<ProbeLadder> {
    validate_ladder(n_ladder)?;
    let exact = caputo_of_power(alpha, target)?;
    let weight_exp = ((2.0 - alpha) / grading).min(1.0 + alpha);

    let mut entries = Vec::with_capacity(n_ladder.len());
    for &n_half in n_ladder {
        let mesh = TemporalMesh::build(tau, windows, n_half, grading)?;
        let last = mesh.last_level() as usize;
        let samples: Vec<f64> = (0..=last).map(|k| target.eval(mesh.point(k as i64))).collect();
        let mut window_max = vec![0.0f64; windows];
        let mut fitted: f64 = 0.0;
        let mut row_weights = Vec::new();
        for n in 1..=last {
            fill_weights(&mesh, alpha, n, &mut row_weights);
            let approx: f64 = row_weights
                .iter()
                .zip(samples.windows(2))
                .map(|(a, w)| a * (w[1] - w[0]))
                .sum();
            let t_n = mesh.point(n as i64);
            let err = (approx - exact.eval(t_n)).abs();
            let w = (n - 1) / (2 * n_half);
            window_max[w] = window_max[w].max(err);
            if w == 0 {
                fitted = fitted.max(t_n.powf(weight_exp) * err);
            }
        }
        entries.push(ProbeEntry { half_steps: n_half, fitted_max: fitted, window_max });
    }
    let orders = fit_orders(&entries);
    Ok(ProbeLadder {
        alpha,
        grading,
        entries,
        orders,
        predicted_order: (2.0 - alpha).min(grading * (1.0 + alpha)),
    })
}

/// Measures the fractional right-rectangle truncation error against the exact
/// order-(1-a) integral of a delayed history profile.
///
/// `history` is a power expansion (truncated-power semantics) describing the
/// solution on `[-tau, (K-1) tau]`; the rectangle rule integrates its delayed
/// samples. The fitted quantity is the raw max error over all levels, with
/// predicted order 1 per `N`-doubling for every grading.
pub fn truncation_probe_fracint(
    alpha: f64,
    grading: f64,
    tau: f64,
    windows: usize,
    n_ladder: &[usize],
    history: &PowerExpansion,
) -> Result<ProbeLadder> {
    validate_ladder(n_ladder)?;
    for t in &history.terms {
        if t.shift < -tau - 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "history term shifted to {} starts before -tau",
                t.shift
            )));
        }
    }
    let exact = rlint_of_power(1.0 - alpha, &history.shift_right(tau))?;

    let mut entries = Vec::with_capacity(n_ladder.len());
    for &n_half in n_ladder {
        let mesh = TemporalMesh::build(tau, windows, n_half, grading)?;
        let last = mesh.last_level() as usize;
        let two_n = mesh.history_steps() as i64;
        let delayed: Vec<f64> =
            (1..=last).map(|k| history.eval(mesh.point(k as i64 - two_n))).collect();
        let mut window_max = vec![0.0f64; windows];
        let mut fitted: f64 = 0.0;
        let mut row_weights = Vec::new();
        for n in 1..=last {
            fill_weights(&mesh, alpha, n, &mut row_weights);
            let approx: f64 = row_weights
                .iter()
                .enumerate()
                .map(|(i, a)| a * mesh.step(i as i64 + 1) * delayed[i])
                .sum();
            let err = (approx - exact.eval(mesh.point(n as i64))).abs();
            let w = (n - 1) / (2 * n_half);
            window_max[w] = window_max[w].max(err);
            fitted = fitted.max(err);
        }
        entries.push(ProbeEntry { half_steps: n_half, fitted_max: fitted, window_max });
    }
    let orders = fit_orders(&entries);
    Ok(ProbeLadder { alpha, grading, entries, orders, predicted_order: 1.0 })
}

fn fit_orders(entries: &[ProbeEntry]) -> Vec<f64> {
    entries
        .windows(2)
        .map(|w| (w[0].fitted_max / w[1].fitted_max).log2())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn omega_values() {
        assert_relative_eq!(omega(1.0, 0.37).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(omega(2.0, 0.7).unwrap(), 0.7, max_relative = 1e-14);
        assert_relative_eq!(omega(1.5, 1.0).unwrap(), 1.128_379_167_1, max_relative = 1e-10);
        assert!(omega(1.5, 0.0).is_err());
        assert!(omega(0.0, 1.0).is_err());
    }

    /// Synthetic unit-step mesh: tau = 2N so every step is 1.
    fn unit_step_mesh(levels: usize) -> TemporalMesh {
        TemporalMesh::build(2.0 * levels as f64, 1, levels, 1.0).unwrap()
    }

    #[test]
    fn unit_step_weights() {
        let mesh = unit_step_mesh(4);
        let row = weight_row(&mesh, 0.5, 2).unwrap();
        // a_0 = 1/Gamma(1.5), a_1 = (sqrt(2)-1)/Gamma(1.5).
        assert_relative_eq!(row.coeff(2), 1.128_38, max_relative = 1e-5);
        assert_relative_eq!(row.coeff(1), 0.467_39, max_relative = 1e-5);
    }

    #[test]
    fn telescoping_identity() {
        for &(r, alpha) in &[(1.0, 0.5), (2.0, 0.3), (3.0, 0.7)] {
            let mesh = TemporalMesh::build(1.0, 2, 25, r).unwrap();
            for n in [1usize, 2, 37, 100] {
                let row = weight_row(&mesh, alpha, n).unwrap();
                let expect = omega(2.0 - alpha, mesh.point(n as i64)).unwrap();
                assert_relative_eq!(row.telescoped_total(), expect, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn uniform_row_translation_invariance() {
        let mesh = TemporalMesh::build(1.0, 1, 8, 1.0).unwrap();
        let row_n = weight_row(&mesh, 0.4, 10).unwrap();
        let row_m = weight_row(&mesh, 0.4, 9).unwrap();
        for k in 1..=9 {
            // a^{(10)}_{10-(k+1)} corresponds to a^{(9)}_{9-k}.
            assert_relative_eq!(row_n.coeff(k + 1), row_m.coeff(k), max_relative = 1e-13);
        }
        // Uniform weights decrease strictly in the n-k offset.
        for k in 1..10 {
            assert!(row_n.coeff(k) < row_n.coeff(k + 1));
        }
    }

    #[test]
    fn l1_basics() {
        let mesh = unit_step_mesh(4);
        let row = weight_row(&mesh, 0.5, 4).unwrap();
        // Constants map to zero.
        assert_eq!(l1_apply(&row, &[3.0; 5]).unwrap(), 0.0);
        // u(t) = t gives the exact Caputo derivative omega_{2-a}(t_n).
        let u: Vec<f64> = (0..=4).map(|k| mesh.point(k as i64)).collect();
        let expect = omega(1.5, mesh.point(4)).unwrap();
        assert_relative_eq!(l1_apply(&row, &u).unwrap(), expect, max_relative = 1e-13);
        assert!(l1_apply(&row, &[0.0; 3]).is_err());
    }

    #[test]
    fn fracint_basics() {
        let mesh = TemporalMesh::build(1.0, 2, 6, 1.5).unwrap();
        let row = weight_row(&mesh, 0.5, 9).unwrap();
        // v = 1 integrates exactly to omega_{2-a}(t_n).
        let expect = omega(1.5, mesh.point(9)).unwrap();
        assert_relative_eq!(fracint_apply(&row, &[1.0; 9]).unwrap(), expect, max_relative = 1e-12);
        // Single-term case.
        let row1 = weight_row(&mesh, 0.5, 1).unwrap();
        let c = 2.75;
        assert_relative_eq!(
            fracint_apply(&row1, &[c]).unwrap(),
            omega(1.5, mesh.point(1)).unwrap() * c,
            max_relative = 1e-13
        );
        assert!(fracint_apply(&row, &[1.0; 4]).is_err());
    }

    #[test]
    fn fracint_converges_to_exact_integral_of_square() {
        // v = t^2 sampled on (0, t_n]: first-order convergence to
        // Gamma(3)/Gamma(4-a) t^{3-a}.
        let alpha = 0.5;
        let mut errs = Vec::new();
        for &n in &[8usize, 16, 32] {
            let mesh = TemporalMesh::build(1.0, 1, n, 1.0).unwrap();
            let last = mesh.last_level() as usize;
            let row = weight_row(&mesh, alpha, last).unwrap();
            let v: Vec<f64> = (1..=last).map(|k| mesh.point(k as i64).powi(2)).collect();
            let t = mesh.point(last as i64);
            let exact = gamma(3.0) / gamma(4.0 - alpha) * t.powf(3.0 - alpha);
            errs.push((fracint_apply(&row, &v).unwrap() - exact).abs());
        }
        let order = (errs[1] / errs[2]).log2();
        assert!((order - 1.0).abs() < 0.15, "observed order {order}");
    }

    #[test]
    fn uniform_kernel_small_cases() {
        let mesh = unit_step_mesh(4);
        let row = weight_row(&mesh, 0.5, 2).unwrap();
        let a: Vec<f64> = (1..=2).rev().map(|k| row.coeff(k)).collect();
        let seq = p_sequence_uniform(0.5, &a).unwrap();
        // P_0 = Gamma(1.5); P_1 = Gamma(1.5)^2 (a_0 - a_1) = 0.519140.
        assert_relative_eq!(seq.values()[0], 0.886_23, max_relative = 1e-5);
        assert_relative_eq!(seq.values()[1], 0.519_14, max_relative = 1e-5);
        assert_relative_eq!(seq.values()[1] * a[0] + seq.values()[0] * a[1], 1.0, max_relative = 1e-12);

        assert!(p_sequence_uniform(0.5, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn uniform_kernel_identity_and_bound() {
        for &alpha in &[0.3, 0.5, 0.7] {
            let mesh = TemporalMesh::build(1.0, 1, 25, 1.0).unwrap();
            let last = mesh.last_level() as usize;
            let row = weight_row(&mesh, alpha, last).unwrap();
            let a: Vec<f64> = (1..=last).rev().map(|k| row.coeff(k)).collect();
            let seq = p_sequence_uniform(alpha, &a).unwrap();
            assert!(kernel_identity_residual(&seq, &a).unwrap() <= 1e-10);
            assert!(kernel_sum_excess(&seq, mesh.point(last as i64)).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn graded_kernel_degenerates_and_bounded() {
        let alpha = 0.5;
        let mesh = TemporalMesh::build(1.0, 1, 10, 1.0).unwrap();
        let rows: Vec<WeightRow> = (1..=20).map(|n| weight_row(&mesh, alpha, n).unwrap()).collect();
        let graded = p_sequence_graded(&rows).unwrap();
        let a: Vec<f64> = (1..=20).rev().map(|k| rows[19].coeff(k)).collect();
        let uniform = p_sequence_uniform(alpha, &a).unwrap();
        // Pbar^{(n)}_{n-j} matches P_{n-j} on the uniform mesh.
        for j in 1..=20usize {
            assert_relative_eq!(
                graded.values()[j - 1],
                uniform.values()[20 - j],
                max_relative = 1e-11
            );
        }

        let mesh = TemporalMesh::build(1.0, 2, 10, 2.0).unwrap();
        let rows: Vec<WeightRow> = (1..=40).map(|n| weight_row(&mesh, alpha, n).unwrap()).collect();
        let seq = p_sequence_graded(&rows).unwrap();
        assert!(seq.values().iter().all(|&v| v >= 0.0));
        assert!(graded_kernel_bound_excess(&seq, &mesh).unwrap() <= 1e-10);
        // j = n entry is 1/a_0^{(n)}.
        assert_relative_eq!(seq.values()[39], 1.0 / rows[39].coeff(40), max_relative = 1e-14);
    }

    #[test]
    fn l1_probe_exact_on_linear_target() {
        let target = PowerExpansion::from_triples(&[(1.0, 0.0, 1.0)]);
        let probe = truncation_probe_l1(0.5, 1.0, 1.0, 1, &[8, 16], &target).unwrap();
        for e in &probe.entries {
            assert!(e.window_max[0] <= 1e-12, "linear target should be exact");
        }
    }

    #[test]
    fn l1_probe_order_on_singular_target() {
        for &alpha in &[0.3, 0.5, 0.7] {
            let target = PowerExpansion::from_triples(&[(1.0, 0.0, alpha)]);
            let probe =
                truncation_probe_l1(alpha, 1.0, 1.0, 1, &[32, 64, 128, 256], &target).unwrap();
            let order = probe.last_order().unwrap();
            assert!(
                (order - probe.predicted_order).abs() < 0.1,
                "alpha {alpha}: fitted {order}, predicted {}",
                probe.predicted_order
            );
        }
    }

    #[test]
    fn fracint_probe_orders() {
        // Constant history is exact.
        let one = PowerExpansion::from_triples(&[(1.0, -1.0, 0.0)]);
        let probe = truncation_probe_fracint(0.5, 1.0, 1.0, 2, &[8, 16], &one).unwrap();
        for e in &probe.entries {
            assert!(e.fitted_max <= 1e-12);
        }
        // Affine history converges at order one, on uniform and graded meshes.
        let affine = PowerExpansion::from_triples(&[(1.0, -1.0, 1.0)]);
        for &r in &[1.0, 2.0] {
            let probe =
                truncation_probe_fracint(0.5, r, 1.0, 2, &[16, 32, 64, 128], &affine).unwrap();
            let order = probe.last_order().unwrap();
            assert!((order - 1.0).abs() < 0.1, "grading {r}: fitted order {order}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn telescoping_holds_for_random_meshes(
            alpha in 0.05f64..0.95,
            r in 1.0f64..3.5,
            n_half in 2usize..20,
            level_frac in 0.05f64..1.0,
        ) {
            let mesh = TemporalMesh::build(1.0, 2, n_half, r).unwrap();
            let last = mesh.last_level() as usize;
            let level = ((level_frac * last as f64) as usize).clamp(1, last);
            let row = weight_row(&mesh, alpha, level).unwrap();
            prop_assert!(row.weights().iter().all(|&a| a > 0.0));
            let expect = omega(2.0 - alpha, mesh.point(level as i64)).unwrap();
            let total = row.telescoped_total();
            prop_assert!((total - expect).abs() <= 1e-12 * expect.abs().max(1e-30));
        }
    }
}
