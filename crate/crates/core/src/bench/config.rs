//! Run configuration: plain JSON with unknown keys rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Which benchmark problem a run uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CaseSelector {
    #[serde(rename = "example1-case1")]
    Example1Case1,
    #[serde(rename = "example1-case2")]
    Example1Case2,
    #[serde(rename = "custom")]
    Custom(CustomCase),
}

impl CaseSelector {
    pub fn id(&self) -> &'static str {
        match self {
            CaseSelector::Example1Case1 => "example1-case1",
            CaseSelector::Example1Case2 => "example1-case2",
            CaseSelector::Custom(_) => "custom",
        }
    }

    pub fn has_exact(&self) -> bool {
        match self {
            CaseSelector::Example1Case1 => true,
            CaseSelector::Example1Case2 => false,
            CaseSelector::Custom(c) => c.exact.is_some(),
        }
    }

    pub fn delay_windows(&self) -> usize {
        match self {
            CaseSelector::Custom(c) => c.windows,
            _ => 3,
        }
    }
}

/// Separable power-expansion data for custom cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableTerms {
    /// Sine mode of the spatial factor.
    pub mode: u32,
    /// `(coeff, shift, exponent)` triples of the temporal factor.
    pub terms: Vec<(f64, f64, f64)>,
}

/// Source description for custom cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSource {
    /// "closed-g" or "closed-f".
    pub kind: String,
    pub mode: u32,
    pub terms: Vec<(f64, f64, f64)>,
}

/// Fully custom problem definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomCase {
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub windows: usize,
    pub length: f64,
    pub phi: SeparableTerms,
    pub source: CustomSource,
    #[serde(default)]
    pub exact: Option<SeparableTerms>,
}

/// How table errors are referenced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RefPolicy {
    /// Compare against the known exact solution.
    #[default]
    Exact,
    /// Compare against a solve with `factor * max(N)` half-steps.
    NestedTime { factor: usize },
    /// Compare against a solve with `factor * max(M)` elements.
    NestedSpace { factor: usize },
}

/// Where spatial-table errors are taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorAt {
    /// Windowed max errors over the configured window pairs.
    #[default]
    Windows,
    /// Single-level error at the final time `t = K*tau`.
    FinalLevel,
}

/// How the forcing is supplied to the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GRoute {
    /// Closed-form transformed forcing.
    #[default]
    AnalyticG,
    /// Closed-form raw forcing, transformed exactly.
    ClosedF,
    /// Sampled raw forcing, transformed by the first-order rectangle rule.
    SampledF,
}

/// One benchmark run: case, parameter ladders, windows and reference policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseSelector,
    pub alphas: Vec<f64>,
    #[serde(default = "default_gradings")]
    pub gradings: Vec<f64>,
    /// Half-window step counts `N`, strictly doubling when rates are wanted.
    pub n_ladder: Vec<usize>,
    /// Element counts `M`; one entry for temporal tables.
    pub m_ladder: Vec<usize>,
    /// Window pairs `(k, l)`, `0 <= k < l <= K`.
    #[serde(default)]
    pub windows: Vec<(usize, usize)>,
    #[serde(default)]
    pub reference: RefPolicy,
    #[serde(default)]
    pub error_at: ErrorAt,
    #[serde(default)]
    pub g_route: GRoute,
    /// Pair `alphas[i]` with `gradings[i]` instead of the cross product.
    #[serde(default)]
    pub zip_alpha_grading: bool,
    /// Output times for `solve` slices; defaults to every level.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    /// Output positions for `solve` slices; defaults to every node.
    #[serde(default)]
    pub positions: Option<Vec<f64>>,
}

fn default_gradings() -> Vec<f64> {
    vec![1.0]
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        let mut out = String::with_capacity(16);
        for b in &digest[..8] {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    /// `(alpha, grading)` combinations this config spans.
    pub fn combos(&self) -> Result<Vec<(f64, f64)>> {
        if self.zip_alpha_grading {
            if self.alphas.len() != self.gradings.len() {
                return Err(Error::Config(
                    "zipped alpha/grading lists must have equal length".into(),
                ));
            }
            Ok(self.alphas.iter().copied().zip(self.gradings.iter().copied()).collect())
        } else {
            Ok(self
                .alphas
                .iter()
                .flat_map(|&a| self.gradings.iter().map(move |&r| (a, r)))
                .collect())
        }
    }

    fn validate_shared(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::Config("alpha list is empty".into()));
        }
        for &a in &self.alphas {
            if !(0.0 < a && a < 1.0) {
                return Err(Error::Config(format!("alpha {a} outside (0,1)")));
            }
        }
        for &r in &self.gradings {
            if !(r >= 1.0 && r.is_finite()) {
                return Err(Error::Config(format!("grading {r} must be >= 1")));
            }
        }
        if self.n_ladder.is_empty() || self.m_ladder.is_empty() {
            return Err(Error::Config("resolution ladders must be nonempty".into()));
        }
        let k = self.case.delay_windows();
        for &(lo, hi) in &self.windows {
            if !(lo < hi && hi <= k) {
                return Err(Error::Config(format!(
                    "window pair ({lo}, {hi}) invalid for {k} delay windows"
                )));
            }
        }
        Ok(())
    }

    fn require_doubling(ladder: &[usize], what: &str) -> Result<()> {
        for w in ladder.windows(2) {
            if w[1] != 2 * w[0] {
                return Err(Error::Config(format!(
                    "{what} ladder must double at each rung for rate columns"
                )));
            }
        }
        Ok(())
    }

    fn validate_reference(&self) -> Result<()> {
        match self.reference {
            RefPolicy::Exact => {
                if !self.case.has_exact() {
                    return Err(Error::Config(
                        "case has no exact solution; pick a nested reference policy".into(),
                    ));
                }
            }
            RefPolicy::NestedTime { factor } | RefPolicy::NestedSpace { factor } => {
                if !(factor >= 4 && factor.is_power_of_two()) {
                    return Err(Error::Config(
                        "reference factor must be a power of two and at least 4".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Checks the fields a temporal table needs.
    pub fn validate_temporal(&self) -> Result<()> {
        self.validate_shared()?;
        self.validate_reference()?;
        if self.m_ladder.len() != 1 {
            return Err(Error::Config("temporal tables fix one element count".into()));
        }
        if self.windows.is_empty() {
            return Err(Error::Config("temporal tables need window pairs".into()));
        }
        if matches!(self.reference, RefPolicy::NestedSpace { .. }) {
            return Err(Error::Config("temporal tables use exact or nested-time references".into()));
        }
        Self::require_doubling(&self.n_ladder, "N")
    }

    /// Checks the fields a spatial table needs.
    pub fn validate_spatial(&self) -> Result<()> {
        self.validate_shared()?;
        self.validate_reference()?;
        if self.n_ladder.len() != 1 {
            return Err(Error::Config("spatial tables fix one temporal resolution".into()));
        }
        if matches!(self.error_at, ErrorAt::Windows) && self.windows.is_empty() {
            return Err(Error::Config("windowed spatial tables need window pairs".into()));
        }
        if matches!(self.reference, RefPolicy::NestedTime { .. }) {
            return Err(Error::Config("spatial tables use exact or nested-space references".into()));
        }
        Self::require_doubling(&self.m_ladder, "M")
    }

    /// Checks the fields a single solve needs.
    pub fn validate_solve(&self) -> Result<()> {
        self.validate_shared()
    }
}
