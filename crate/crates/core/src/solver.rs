//! Fully discrete time stepping for the delayed subdiffusion problem.
//!
//! At each level `n` the scheme solves
//!
//! `(a_0 M + B) U^n = M [a_0 U^{n-1} - sum_{k<n} a^{(n)}_{n-k} dU^k
//!                      + b sum_{k<=n} rho_k a^{(n)}_{n-k} U^{k-2N}] + (G^n, hat_j)`
//!
//! with `M` the mass matrix, `B = p*stiffness + (-a)*mass`, `dU^k` the level
//! differences, and the delay sum reading levels at least `2N` back (history
//! levels are interpolated data). The two history sums share the fused
//! per-level vector `b rho_k U^{k-2N} - dU^k`, which is fixed once level `k`
//! completes, so a step costs one pass over the stored history.
//!
//! On uniform meshes the coefficients depend only on `n - k` and are cached
//! up front; graded meshes recompute the row per level. Both paths read the
//! same mesh points, so grading exponent 1 reproduces the uniform results to
//! rounding.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem1d::{
    assemble_bilinear, assemble_mass, assemble_stiffness, interpolate, load_vector, tridiag_solve,
    NodalVector, TriDiag,
};
use crate::fracops::fill_weights;
use crate::mesh::{SpatialMesh, TemporalMesh};
use crate::powcalc::{rlint_of_power, PowerExpansion};
use crate::special::recip_gamma;

/// Spatial factors are Dirichlet Laplacian eigenfunctions on `(0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialProfile {
    /// `sin(mode * pi * x / L)`.
    SinMode { mode: u32 },
}

impl SpatialProfile {
    pub fn eval(&self, x: f64, length: f64) -> f64 {
        match self {
            SpatialProfile::SinMode { mode } => {
                (*mode as f64 * std::f64::consts::PI * x / length).sin()
            }
        }
    }

    /// Eigenvalue `lambda` with `-X'' = lambda X`.
    pub fn eigenvalue(&self, length: f64) -> f64 {
        match self {
            SpatialProfile::SinMode { mode } => {
                let k = *mode as f64 * std::f64::consts::PI / length;
                k * k
            }
        }
    }
}

/// Separable space-time function `X(x) * T(t)`.
#[derive(Debug, Clone)]
pub struct SeparableFn {
    pub profile: SpatialProfile,
    pub temporal: PowerExpansion,
}

impl SeparableFn {
    pub fn eval(&self, x: f64, t: f64, length: f64) -> f64 {
        self.profile.eval(x, length) * self.temporal.eval(t)
    }
}

/// History data on `[-tau, 0]`.
#[derive(Clone)]
pub enum HistorySpec {
    /// `X(x) * T(t)` with `T` in truncated-power form valid on `[-tau, 0]`.
    Separable(SeparableFn),
    /// Arbitrary sampled history `phi(x, t)`.
    Sampled(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for HistorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistorySpec::Separable(s) => f.debug_tuple("Separable").field(s).finish(),
            HistorySpec::Sampled(_) => f.write_str("Sampled(..)"),
        }
    }
}

/// Forcing data, in decreasing order of preference.
#[derive(Clone)]
pub enum SourceSpec {
    /// The transformed forcing `G` itself, in closed form.
    ClosedFormG(SeparableFn),
    /// The raw forcing `f`; `G` is obtained by the exact order-(1-alpha)
    /// integral of the power expansion.
    ClosedFormF(SeparableFn),
    /// Sampled raw forcing `X(x) * f_T(t)`; `G` is obtained per level by the
    /// fractional right-rectangle rule. First-order accurate only when the
    /// forcing has an integrable derivative; singular forcings degrade it.
    SampledF {
        profile: SpatialProfile,
        temporal: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::ClosedFormG(s) => f.debug_tuple("ClosedFormG").field(s).finish(),
            SourceSpec::ClosedFormF(s) => f.debug_tuple("ClosedFormF").field(s).finish(),
            SourceSpec::SampledF { profile, .. } => {
                f.debug_struct("SampledF").field("profile", profile).finish_non_exhaustive()
            }
        }
    }
}

/// Complete problem description.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    /// Diffusivity `p > 0`.
    pub diffusivity: f64,
    /// Reaction coefficient `a <= 0`.
    pub reaction: f64,
    /// Delay coupling `b`.
    pub delay_coupling: f64,
    /// Fractional order in (0,1).
    pub alpha: f64,
    /// Delay length `tau > 0`.
    pub tau: f64,
    /// Number of delay windows `K >= 1`.
    pub windows: usize,
    /// Spatial domain length `L > 0`.
    pub length: f64,
    pub history: HistorySpec,
    pub source: SourceSpec,
    /// Exact solution when known, for error reporting.
    pub exact: Option<SeparableFn>,
}

impl ProblemSpec {
    fn validate(&self) -> Result<()> {
        if !(self.diffusivity > 0.0 && self.diffusivity.is_finite()) {
            return Err(Error::InvalidParameter("diffusivity must be positive".into()));
        }
        if self.reaction > 0.0 || self.reaction.is_nan() {
            return Err(Error::InvalidParameter("reaction coefficient must be <= 0".into()));
        }
        if !self.delay_coupling.is_finite() {
            return Err(Error::InvalidParameter("delay coupling must be finite".into()));
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::InvalidParameter("fractional order must be in (0,1)".into()));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter("delay must be positive".into()));
        }
        if self.windows < 1 {
            return Err(Error::InvalidParameter("need at least one delay window".into()));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidParameter("domain length must be positive".into()));
        }
        Ok(())
    }
}

/// Solution at every level `-2N ..= 2KN`, plus the meshes that produced it.
#[derive(Debug, Clone)]
pub struct SolveRecord {
    pub tmesh: TemporalMesh,
    pub smesh: SpatialMesh,
    /// Level-major interior values; level `n` starts at `(n + 2N) * (M-1)`.
    values: Vec<f64>,
    /// Max-norm per computed level `1..=2KN`, for divergence detection.
    pub max_norms: Vec<f64>,
}

impl SolveRecord {
    fn new(tmesh: TemporalMesh, smesh: SpatialMesh) -> Self {
        // 2KN computed levels, 2N history levels, plus level 0.
        let levels = tmesh.last_level() as usize + tmesh.history_steps() + 1;
        let total = levels * smesh.interior_len();
        SolveRecord { tmesh, smesh, values: vec![0.0; total], max_norms: Vec::new() }
    }

    fn offset(&self, level: i64) -> usize {
        debug_assert!(level >= -(self.tmesh.history_steps() as i64));
        debug_assert!(level <= self.tmesh.last_level());
        (level + self.tmesh.history_steps() as i64) as usize * self.smesh.interior_len()
    }

    /// Interior values at `level`, `-2N <= level <= 2KN`.
    pub fn level(&self, level: i64) -> &[f64] {
        let o = self.offset(level);
        &self.values[o..o + self.smesh.interior_len()]
    }

    fn level_mut(&mut self, level: i64) -> &mut [f64] {
        let o = self.offset(level);
        let m = self.smesh.interior_len();
        &mut self.values[o..o + m]
    }

    /// Piecewise linear evaluation in space at a stored level.
    pub fn eval(&self, level: i64, x: f64) -> f64 {
        let u = self.level(level);
        let h = self.smesh.h;
        let m = self.smesh.elements;
        let at = |j: usize| -> f64 {
            if j == 0 || j >= m {
                0.0
            } else {
                u[j - 1]
            }
        };
        let clamped = x.clamp(0.0, self.smesh.length);
        let e = ((clamped / h) as usize).min(m - 1);
        let local = (clamped - self.smesh.node(e)) / h;
        at(e) * (1.0 - local) + at(e + 1) * local
    }
}

/// Which coefficient path the stepper uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightPath {
    /// Cached uniform coefficients when the mesh is uniform, else per-level.
    Auto,
    /// Cached coefficients; rejects non-uniform meshes.
    ForceUniform,
    /// Per-level recomputation even on uniform meshes.
    ForceGraded,
}

enum WeightPlan {
    Uniform { a: Vec<f64> },
    Graded { buf: Vec<f64> },
}

enum GTemporal {
    Closed(PowerExpansion),
    /// `weighted[k-1] = rho_k * f(t_k)`; the per-level rectangle sum reuses
    /// the L1 coefficient row.
    Sampled { weighted: Vec<f64> },
}

/// Interpolates the history data onto levels `-2N ..= 0`.
///
/// Rejects history that violates the homogeneous boundary conditions.
pub fn init_history(
    spec: &ProblemSpec,
    tmesh: &TemporalMesh,
    smesh: &SpatialMesh,
) -> Result<Vec<NodalVector>> {
    let two_n = tmesh.history_steps() as i64;
    let mut out = Vec::with_capacity(two_n as usize + 1);
    for level in -two_n..=0 {
        let t = tmesh.point(level);
        let v = match &spec.history {
            HistorySpec::Separable(sep) => {
                let tv = sep.temporal.eval(t);
                interpolate(|x| sep.profile.eval(x, spec.length) * tv, smesh)
            }
            HistorySpec::Sampled(f) => {
                let v = interpolate(|x| f(x, t), smesh);
                let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let b0 = f(0.0, t).abs();
                let b1 = f(spec.length, t).abs();
                if b0 > 1e-12 * scale || b1 > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "history violates the boundary conditions at t = {t}"
                    )));
                }
                v
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// One solve in progress; levels advance strictly in order.
pub struct Stepper {
    alpha: f64,
    delay_coupling: f64,
    mass: TriDiag,
    bilinear: TriDiag,
    load_profile: NodalVector,
    g_temporal: GTemporal,
    plan: WeightPlan,
    rho: Vec<f64>,
    record: SolveRecord,
    /// `b rho_k U^{k-2N} - dU^k` for completed levels, level-major from 1.
    fused: Vec<f64>,
    level: usize,
    acc: Vec<f64>,
    rhs: Vec<f64>,
}

impl Stepper {
    pub fn new(
        spec: &ProblemSpec,
        tmesh: &TemporalMesh,
        smesh: &SpatialMesh,
        path: WeightPath,
    ) -> Result<Self> {
        spec.validate()?;
        if (tmesh.tau - spec.tau).abs() > 1e-12 * spec.tau || tmesh.windows != spec.windows {
            return Err(Error::MeshMismatch(
                "temporal mesh does not match the problem's delay structure".into(),
            ));
        }
        if (smesh.length - spec.length).abs() > 1e-12 * spec.length {
            return Err(Error::MeshMismatch("spatial mesh does not match the domain".into()));
        }

        let mass = assemble_mass(smesh);
        let stiff = assemble_stiffness(smesh);
        let bilinear = assemble_bilinear(spec.diffusivity, spec.reaction, &mass, &stiff)?;

        let last = tmesh.last_level() as usize;
        let rho: Vec<f64> = (1..=last).map(|k| tmesh.step(k as i64)).collect();

        let (profile, g_temporal) = match &spec.source {
            SourceSpec::ClosedFormG(sep) => (sep.profile, GTemporal::Closed(sep.temporal.clone())),
            SourceSpec::ClosedFormF(sep) => (
                sep.profile,
                GTemporal::Closed(rlint_of_power(1.0 - spec.alpha, &sep.temporal)?),
            ),
            SourceSpec::SampledF { profile, temporal } => {
                let weighted: Vec<f64> =
                    (1..=last).map(|k| rho[k - 1] * temporal(tmesh.point(k as i64))).collect();
                (*profile, GTemporal::Sampled { weighted })
            }
        };
        if let GTemporal::Closed(g) = &g_temporal {
            if g.has_singular_terms() {
                for term in &g.terms {
                    if term.exponent < 0.0
                        && (1..=last).any(|k| tmesh.point(k as i64) == term.shift)
                    {
                        return Err(Error::InvalidParameter(format!(
                            "singular forcing term at t = {} coincides with a mesh point",
                            term.shift
                        )));
                    }
                }
            }
        }
        let load_profile = load_vector(|x| profile.eval(x, spec.length), smesh);

        let plan = match (path, tmesh.is_uniform()) {
            (WeightPath::ForceUniform, false) => {
                return Err(Error::InvalidParameter(
                    "uniform coefficient path requested on a graded mesh".into(),
                ))
            }
            (WeightPath::Auto, true) | (WeightPath::ForceUniform, true) => {
                // a_j = [omega_{2-al}(t_{j+1}) - omega_{2-al}(t_j)] / rho.
                let rg = recip_gamma(2.0 - spec.alpha);
                let mut a = Vec::with_capacity(last);
                let mut om_prev = 0.0;
                for (j, step) in rho.iter().enumerate() {
                    let om = tmesh.point(j as i64 + 1).powf(1.0 - spec.alpha) * rg;
                    a.push((om - om_prev) / step);
                    om_prev = om;
                }
                WeightPlan::Uniform { a }
            }
            _ => WeightPlan::Graded { buf: Vec::with_capacity(last) },
        };

        let mut record = SolveRecord::new(tmesh.clone(), smesh.clone());
        let history = init_history(spec, tmesh, smesh)?;
        let two_n = tmesh.history_steps() as i64;
        for (i, values) in history.into_iter().enumerate() {
            record.level_mut(i as i64 - two_n).copy_from_slice(&values);
        }

        let m = smesh.interior_len();
        Ok(Stepper {
            alpha: spec.alpha,
            delay_coupling: spec.delay_coupling,
            mass,
            bilinear,
            load_profile,
            g_temporal,
            plan,
            rho,
            record,
            fused: vec![0.0; last * m],
            level: 0,
            acc: vec![0.0; m],
            rhs: vec![0.0; m],
        })
    }

    /// Last completed level.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn record(&self) -> &SolveRecord {
        &self.record
    }

    /// Advances one level and returns the new interior values.
    pub fn advance(&mut self) -> Result<&[f64]> {
        let n = self.level + 1;
        let last = self.record.tmesh.last_level() as usize;
        if n > last {
            return Err(Error::InvalidParameter("all levels already computed".into()));
        }
        let m = self.record.smesh.interior_len();
        let two_n = self.record.tmesh.history_steps() as i64;
        let b = self.delay_coupling;

        if let WeightPlan::Graded { buf } = &mut self.plan {
            fill_weights(&self.record.tmesh, self.alpha, n, buf);
        }
        let weight = |plan: &WeightPlan, k: usize| -> f64 {
            match plan {
                WeightPlan::Uniform { a } => a[n - k],
                WeightPlan::Graded { buf } => buf[k - 1],
            }
        };
        let a0 = weight(&self.plan, n);

        // acc = a0 U^{n-1} + sum_{k<n} a_{n-k} (b rho_k U^{k-2N} - dU^k)
        //     + a0 b rho_n U^{n-2N}
        let prev = self.record.level(n as i64 - 1);
        for (acc, &u) in self.acc.iter_mut().zip(prev) {
            *acc = a0 * u;
        }
        let mut g_sample_sum = 0.0;
        for k in 1..n {
            let c = weight(&self.plan, k);
            let f = &self.fused[(k - 1) * m..k * m];
            for (acc, &w) in self.acc.iter_mut().zip(f) {
                *acc += c * w;
            }
            if let GTemporal::Sampled { weighted } = &self.g_temporal {
                g_sample_sum += c * weighted[k - 1];
            }
        }
        let delayed = self.record.level(n as i64 - two_n);
        let rho_n = self.rho[n - 1];
        for (acc, &u) in self.acc.iter_mut().zip(delayed) {
            *acc += a0 * b * rho_n * u;
        }

        let g_n = match &self.g_temporal {
            GTemporal::Closed(g) => g.eval(self.record.tmesh.point(n as i64)),
            GTemporal::Sampled { weighted } => g_sample_sum + a0 * weighted[n - 1],
        };
        self.mass.matvec(&self.acc, &mut self.rhs);
        for (r, &l) in self.rhs.iter_mut().zip(&self.load_profile) {
            *r += g_n * l;
        }

        let system = self.bilinear.axpy(a0, &self.mass);
        let u_n = tridiag_solve(&system, &self.rhs)?;

        let max_norm = u_n.iter().fold(0.0f64, |mx, x| mx.max(x.abs()));
        if !max_norm.is_finite() || max_norm > 1e10 {
            return Err(Error::Numerical(format!(
                "solution norm {max_norm} at level {n} exceeds the divergence guard"
            )));
        }
        self.record.max_norms.push(max_norm);

        {
            let prev_off = self.record.offset(n as i64 - 1);
            let del_off = self.record.offset(n as i64 - two_n);
            let fused = &mut self.fused[(n - 1) * m..n * m];
            for j in 0..m {
                fused[j] = b * rho_n * self.record.values[del_off + j]
                    - (u_n[j] - self.record.values[prev_off + j]);
            }
        }
        self.record.level_mut(n as i64).copy_from_slice(&u_n);
        self.level = n;
        Ok(self.record.level(n as i64))
    }

    /// Runs the remaining levels and returns the finished record.
    pub fn run(mut self) -> Result<SolveRecord> {
        let last = self.record.tmesh.last_level() as usize;
        while self.level < last {
            self.advance()?;
        }
        Ok(self.record)
    }
}

/// Solves the problem on the given meshes with the automatic weight path.
pub fn solve(spec: &ProblemSpec, tmesh: &TemporalMesh, smesh: &SpatialMesh) -> Result<SolveRecord> {
    solve_with(spec, tmesh, smesh, WeightPath::Auto)
}

/// Solves with an explicit weight path selection.
pub fn solve_with(
    spec: &ProblemSpec,
    tmesh: &TemporalMesh,
    smesh: &SpatialMesh,
    path: WeightPath,
) -> Result<SolveRecord> {
    Stepper::new(spec, tmesh, smesh, path)?.run()
}
