//! Temporal and spatial meshes.
//!
//! The temporal mesh covers `[-tau, K*tau]` with levels `n = -2N .. 2KN`.
//! Each delay window `((i-1)*tau, i*tau]` is split into `2N` steps graded
//! symmetrically towards both window endpoints with exponent `r`:
//!
//! - first half:  `t_n = (tau/2) * ((n - 2(i-1)N)/N)^r + (i-1)*tau`
//! - second half: `t_n = -(tau/2) * ((2iN - n)/N)^r + i*tau`
//!
//! The history window `[-tau, 0]` (i = 0) uses the same formula. `r = 1`
//! gives a uniform mesh with step `tau / (2N)`. Points are evaluated from
//! the closed form rather than accumulated, so there is no drift, and window
//! endpoints land exactly on multiples of `tau`.

use crate::error::{Error, Result};

/// Symmetric graded time grid over `[-tau, K*tau]`.
#[derive(Debug, Clone)]
pub struct TemporalMesh {
    /// Delay length; each window spans `tau`.
    pub tau: f64,
    /// Number of delay windows `K` covered by `(0, K*tau]`.
    pub windows: usize,
    /// Number of steps per half window `N` (so a window has `2N` steps).
    pub half_steps: usize,
    /// Grading exponent `r >= 1`; `r = 1` is the uniform mesh.
    pub grading: f64,
    /// Points indexed `0 ..= 2(K+1)N`, storing levels `-2N ..= 2KN`.
    points: Vec<f64>,
}

impl TemporalMesh {
    /// Builds the mesh; rejects `tau <= 0`, `K < 1`, `N < 2`, `r < 1`.
    pub fn build(tau: f64, windows: usize, half_steps: usize, grading: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        if windows < 1 {
            return Err(Error::InvalidParameter("need at least one delay window".into()));
        }
        if half_steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "half-window step count must be >= 2, got {half_steps}"
            )));
        }
        if !(grading.is_finite() && grading >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grading exponent must be >= 1, got {grading}"
            )));
        }

        let n = half_steps;
        let k = windows;
        let mut points = vec![0.0; 2 * (k + 1) * n + 1];
        // Window i covers levels 2(i-1)N .. 2iN; i = 0 is the history window.
        for i in 0..=k {
            let start = (i as f64 - 1.0) * tau;
            let end = i as f64 * tau;
            for j in 1..=2 * n {
                let level = 2 * (i as i64 - 1) * n as i64 + j as i64;
                let idx = (level + 2 * n as i64) as usize;
                points[idx] = if j < n {
                    0.5 * tau * ((j as f64) / (n as f64)).powf(grading) + start
                } else if j < 2 * n {
                    -0.5 * tau * ((2 * n - j) as f64 / (n as f64)).powf(grading) + end
                } else {
                    end
                };
            }
        }
        points[0] = -tau;

        Ok(TemporalMesh { tau, windows, half_steps, grading, points })
    }

    /// Highest level index, `2KN`.
    pub fn last_level(&self) -> i64 {
        2 * (self.windows * self.half_steps) as i64
    }

    /// Number of history steps, `2N` (levels `-2N ..= 0`).
    pub fn history_steps(&self) -> usize {
        2 * self.half_steps
    }

    /// Time at `level`, valid for `-2N <= level <= 2KN`.
    pub fn point(&self, level: i64) -> f64 {
        self.points[(level + 2 * self.half_steps as i64) as usize]
    }

    /// Step `rho_level = t_level - t_{level-1}`, valid for `level > -2N`.
    pub fn step(&self, level: i64) -> f64 {
        self.point(level) - self.point(level - 1)
    }

    /// All points, from level `-2N` to level `2KN`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// First positive step `rho_1 = t_1`.
    pub fn first_step(&self) -> f64 {
        self.point(1)
    }

    pub fn is_uniform(&self) -> bool {
        self.grading == 1.0
    }

    /// Checks that `self` refines `coarse` by an integer power-of-two stride
    /// with coinciding points, and returns the stride.
    pub fn refinement_stride(&self, coarse: &TemporalMesh) -> Result<usize> {
        if self.windows != coarse.windows
            || (self.tau - coarse.tau).abs() > 1e-13 * coarse.tau
            || (self.grading - coarse.grading).abs() > 1e-13
        {
            return Err(Error::MeshMismatch(
                "reference and coarse meshes must share tau, window count and grading".into(),
            ));
        }
        if !self.half_steps.is_multiple_of(coarse.half_steps) {
            return Err(Error::MeshMismatch(format!(
                "{} does not divide {}",
                coarse.half_steps, self.half_steps
            )));
        }
        let stride = self.half_steps / coarse.half_steps;
        if !stride.is_power_of_two() {
            return Err(Error::MeshMismatch(format!(
                "refinement ratio {stride} is not a power of two"
            )));
        }
        for level in 0..=coarse.last_level() {
            let fine = self.point(level * stride as i64);
            let diff = (fine - coarse.point(level)).abs();
            if diff > 1e-13 * (1.0 + fine.abs()) {
                return Err(Error::MeshMismatch(format!(
                    "meshes are not nested at level {level}: {fine} vs {}",
                    coarse.point(level)
                )));
            }
        }
        Ok(stride)
    }
}

/// Uniform spatial mesh on `[0, L]` with `M` elements.
#[derive(Debug, Clone)]
pub struct SpatialMesh {
    /// Domain length `L`.
    pub length: f64,
    /// Number of elements `M`.
    pub elements: usize,
    /// Element width `h = L / M`.
    pub h: f64,
    /// Nodes `x_j = j*L/M`, `j = 0..=M`.
    nodes: Vec<f64>,
}

impl SpatialMesh {
    /// Builds a uniform mesh; rejects `L <= 0` and `M < 2`.
    pub fn build(length: f64, elements: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "domain length must be positive, got {length}"
            )));
        }
        if elements < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 elements, got {elements}"
            )));
        }
        let h = length / elements as f64;
        let nodes = (0..=elements).map(|j| j as f64 * length / elements as f64).collect();
        Ok(SpatialMesh { length, elements, h, nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// Number of interior nodes `M - 1`.
    pub fn interior_len(&self) -> usize {
        self.elements - 1
    }
}

/// Convenience constructor matching the library's operation list.
pub fn build_temporal(tau: f64, windows: usize, half_steps: usize, grading: f64) -> Result<TemporalMesh> {
    TemporalMesh::build(tau, windows, half_steps, grading)
}

/// Convenience constructor matching the library's operation list.
pub fn build_spatial(length: f64, elements: usize) -> Result<SpatialMesh> {
    SpatialMesh::build(length, elements)
}
