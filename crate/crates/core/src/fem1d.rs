//! Piecewise linear finite elements on a uniform 1D mesh with homogeneous
//! Dirichlet boundary conditions. Everything acts on the interior nodes
//! `1..=M-1`; boundary values are identically zero.

use crate::error::{Error, Result};
use crate::mesh::SpatialMesh;

/// Coefficient vector over the interior nodes.
pub type NodalVector = Vec<f64>;

/// Symmetric tridiagonal matrix over the interior nodes.
#[derive(Debug, Clone)]
pub struct TriDiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl TriDiag {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// `out = self * v`.
    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        let m = self.size();
        debug_assert_eq!(v.len(), m);
        debug_assert_eq!(out.len(), m);
        for i in 0..m {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.sub[i - 1] * v[i - 1];
            }
            if i + 1 < m {
                s += self.sup[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    /// `self + factor * other`, element-wise.
    pub fn axpy(&self, factor: f64, other: &TriDiag) -> TriDiag {
        TriDiag {
            sub: self.sub.iter().zip(&other.sub).map(|(a, b)| a + factor * b).collect(),
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + factor * b).collect(),
            sup: self.sup.iter().zip(&other.sup).map(|(a, b)| a + factor * b).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> TriDiag {
        TriDiag {
            sub: self.sub.iter().map(|a| factor * a).collect(),
            diag: self.diag.iter().map(|a| factor * a).collect(),
            sup: self.sup.iter().map(|a| factor * a).collect(),
        }
    }
}

/// Mass matrix: rows `(h/6) [1, 4, 1]`.
pub fn assemble_mass(mesh: &SpatialMesh) -> TriDiag {
    let m = mesh.interior_len();
    let h = mesh.h;
    TriDiag {
        sub: vec![h / 6.0; m.saturating_sub(1)],
        diag: vec![2.0 * h / 3.0; m],
        sup: vec![h / 6.0; m.saturating_sub(1)],
    }
}

/// Stiffness matrix: rows `(1/h) [-1, 2, -1]`.
pub fn assemble_stiffness(mesh: &SpatialMesh) -> TriDiag {
    let m = mesh.interior_len();
    let h = mesh.h;
    TriDiag {
        sub: vec![-1.0 / h; m.saturating_sub(1)],
        diag: vec![2.0 / h; m],
        sup: vec![-1.0 / h; m.saturating_sub(1)],
    }
}

/// Bilinear-form matrix `p * stiffness + (-a) * mass` for `p > 0`, `a <= 0`.
pub fn assemble_bilinear(p: f64, a: f64, mass: &TriDiag, stiff: &TriDiag) -> Result<TriDiag> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("diffusivity must be positive, got {p}")));
    }
    if a > 0.0 || a.is_nan() {
        return Err(Error::InvalidParameter(format!("reaction must be <= 0, got {a}")));
    }
    Ok(stiff.scale(p).axpy(-a, mass))
}

/// 3-point Gauss-Legendre nodes and weights on [-1, 1].
const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189),
    (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189),
];

/// Load vector `(profile, hat_j)` via 3-point Gauss per element.
pub fn load_vector<F: Fn(f64) -> f64>(profile: F, mesh: &SpatialMesh) -> NodalVector {
    let m = mesh.interior_len();
    let h = mesh.h;
    let mut out = vec![0.0; m];
    for e in 0..mesh.elements {
        let x_left = mesh.node(e);
        for (xi, w) in GAUSS3 {
            let x = x_left + 0.5 * h * (xi + 1.0);
            let f = profile(x) * 0.5 * h * w;
            let local = 0.5 * (xi + 1.0); // hat of the right node
            if e > 0 {
                out[e - 1] += f * (1.0 - local);
            }
            if e + 1 < mesh.elements {
                out[e] += f * local;
            }
        }
    }
    out
}

/// Nodal interpolation at the interior nodes.
pub fn interpolate<F: Fn(f64) -> f64>(f: F, mesh: &SpatialMesh) -> NodalVector {
    (1..mesh.elements).map(|j| f(mesh.node(j))).collect()
}

/// Discrete L2 norm `sqrt(v' M v)`.
pub fn l2_norm(v: &[f64], mass: &TriDiag) -> Result<f64> {
    if v.len() != mass.size() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against mass matrix of size {}",
            v.len(),
            mass.size()
        )));
    }
    let mut mv = vec![0.0; v.len()];
    mass.matvec(v, &mut mv);
    let s: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
    Ok(s.max(0.0).sqrt())
}

/// Continuous L2 distance between the P1 function with interior values `v`
/// and a smooth `f`, via 5-point Gauss per element.
pub fn l2_error_against<F: Fn(f64) -> f64>(v: &[f64], mesh: &SpatialMesh, f: F) -> f64 {
    let h = mesh.h;
    let at = |j: usize| -> f64 {
        if j == 0 || j == mesh.elements {
            0.0
        } else {
            v[j - 1]
        }
    };
    let mut total = 0.0;
    for e in 0..mesh.elements {
        let x_left = mesh.node(e);
        let (vl, vr) = (at(e), at(e + 1));
        for (xi, w) in GAUSS5 {
            let local = 0.5 * (xi + 1.0);
            let x = x_left + local * h;
            let uh = vl + (vr - vl) * local;
            let d = uh - f(x);
            total += 0.5 * h * w * d * d;
        }
    }
    total.sqrt()
}

/// Thomas solve of a strictly diagonally dominant tridiagonal system.
pub fn tridiag_solve(a: &TriDiag, rhs: &[f64]) -> Result<NodalVector> {
    let m = a.size();
    if rhs.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "rhs of length {} against matrix of size {m}",
            rhs.len()
        )));
    }
    for i in 0..m {
        let off = if i > 0 { a.sub[i - 1].abs() } else { 0.0 }
            + if i + 1 < m { a.sup[i].abs() } else { 0.0 };
        if a.diag[i].abs() <= off {
            return Err(Error::Numerical(format!(
                "matrix is not strictly diagonally dominant at row {i}"
            )));
        }
    }
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut piv = a.diag[0];
    c[0] = if m > 1 { a.sup[0] / piv } else { 0.0 };
    d[0] = rhs[0] / piv;
    for i in 1..m {
        piv = a.diag[i] - a.sub[i - 1] * c[i - 1];
        if piv.abs() < f64::MIN_POSITIVE {
            return Err(Error::Numerical(format!("zero pivot at row {i}")));
        }
        if i + 1 < m {
            c[i] = a.sup[i] / piv;
        }
        d[i] = (rhs[i] - a.sub[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}
