//! Exact fractional calculus on shifted power functions.
//!
//! A [`PowerTerm`] is `c * (t - s)^beta`, supported on `t > s` (value 0 for
//! `t < s`; at `t = s` the value is `c` when `beta = 0` and 0 otherwise).
//! Finite sums of such terms are closed under the Riemann-Liouville integral
//! and the Caputo derivative taken from the origin, with coefficients given
//! by Gamma-function ratios. This drives manufactured solutions, exact
//! forcing construction, and the analytic oracles used by the discrete
//! operator probes.

use crate::error::{Error, Result};
use crate::special::gamma_ratio;

/// One shifted power `coeff * (t - shift)^exponent`, truncated left of `shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub shift: f64,
    pub exponent: f64,
}

impl PowerTerm {
    pub fn new(coeff: f64, shift: f64, exponent: f64) -> Self {
        PowerTerm { coeff, shift, exponent }
    }

    /// Pointwise value with the truncated-power convention.
    pub fn eval(&self, t: f64) -> f64 {
        if t < self.shift {
            0.0
        } else if t == self.shift {
            if self.exponent == 0.0 {
                self.coeff
            } else if self.exponent > 0.0 {
                0.0
            } else {
                f64::INFINITY * self.coeff.signum()
            }
        } else {
            self.coeff * (t - self.shift).powf(self.exponent)
        }
    }
}

/// Finite sum of shifted power terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerExpansion {
    pub terms: Vec<PowerTerm>,
}

impl PowerExpansion {
    pub fn new(terms: Vec<PowerTerm>) -> Self {
        PowerExpansion { terms }
    }

    /// Builds `c0 + c1*(t-s)^b1 + ...` from `(coeff, shift, exponent)` triples.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Self {
        PowerExpansion {
            terms: triples.iter().map(|&(c, s, b)| PowerTerm::new(c, s, b)).collect(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: f64) -> Self {
        PowerExpansion {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm::new(factor * t.coeff, t.shift, t.exponent))
                .collect(),
        }
    }

    pub fn add(&self, other: &PowerExpansion) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        PowerExpansion { terms }.merged()
    }

    /// Replaces `t` by `t - delta`: each `c (t-s)^b` becomes `c (t-s-delta)^b`.
    pub fn shift_right(&self, delta: f64) -> Self {
        PowerExpansion {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm::new(t.coeff, t.shift + delta, t.exponent))
                .collect(),
        }
    }

    /// Term-wise derivative; constants vanish. Valid away from the shifts.
    pub fn derivative(&self) -> Self {
        PowerExpansion {
            terms: self
                .terms
                .iter()
                .filter(|t| t.exponent != 0.0)
                .map(|t| PowerTerm::new(t.coeff * t.exponent, t.shift, t.exponent - 1.0))
                .collect(),
        }
    }

    /// True if any term has a negative exponent (singular at its shift).
    pub fn has_singular_terms(&self) -> bool {
        self.terms.iter().any(|t| t.exponent < 0.0)
    }

    /// Collapses terms with matching shift and exponent and drops zeros.
    pub fn merged(&self) -> Self {
        let mut terms: Vec<PowerTerm> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if let Some(existing) = terms
                .iter_mut()
                .find(|e| (e.shift - t.shift).abs() <= 1e-12 && (e.exponent - t.exponent).abs() <= 1e-12)
            {
                existing.coeff += t.coeff;
            } else {
                terms.push(*t);
            }
        }
        terms.retain(|t| t.coeff != 0.0);
        PowerExpansion { terms }
    }

    /// Rewrites terms with negative shifts as plain powers valid on `t >= 0`.
    ///
    /// `c (t + d)^m` with integer `m >= 0` expands binomially; non-integer
    /// exponents with negative shift are rejected since their restriction to
    /// `t >= 0` leaves the shifted-power class.
    pub fn restricted_to_nonnegative(&self) -> Result<Self> {
        let mut out = Vec::new();
        for t in &self.terms {
            if t.shift >= -1e-14 {
                out.push(PowerTerm::new(t.coeff, t.shift.max(0.0), t.exponent));
                continue;
            }
            let m = t.exponent.round();
            if (t.exponent - m).abs() > 1e-9 || !(0.0..=12.0).contains(&m) {
                return Err(Error::InvalidParameter(format!(
                    "cannot restrict term with shift {} and exponent {} to t >= 0",
                    t.shift, t.exponent
                )));
            }
            let m = m as u32;
            let d = -t.shift;
            let mut binom = 1.0;
            for j in 0..=m {
                // binom = C(m, j) updated multiplicatively below.
                out.push(PowerTerm::new(t.coeff * binom * d.powi((m - j) as i32), 0.0, j as f64));
                binom = binom * (m - j) as f64 / (j + 1) as f64;
            }
        }
        Ok(PowerExpansion { terms: out }.merged())
    }
}

/// Evaluates an expansion at `t`.
pub fn eval_expansion(e: &PowerExpansion, t: f64) -> f64 {
    e.eval(t)
}

/// Caputo derivative of order `alpha` in (0,1) taken from the origin,
/// applied term-wise: `c (t-s)^b` maps to
/// `c * Gamma(b+1)/Gamma(b+1-alpha) * (t-s)^{b-alpha}` for `b > 0`, and
/// constants map to zero. Shifts must be nonnegative.
pub fn caputo_of_power(alpha: f64, e: &PowerExpansion) -> Result<PowerExpansion> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("order must be in (0,1), got {alpha}")));
    }
    let mut terms = Vec::with_capacity(e.terms.len());
    for t in &e.terms {
        if t.shift < -1e-14 {
            return Err(Error::InvalidParameter(format!(
                "negative shift {} not supported by the origin-based derivative",
                t.shift
            )));
        }
        if t.exponent == 0.0 {
            continue;
        }
        if t.exponent < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "exponent {} has no integrable derivative",
                t.exponent
            )));
        }
        terms.push(PowerTerm::new(
            t.coeff * gamma_ratio(t.exponent + 1.0, t.exponent + 1.0 - alpha),
            t.shift.max(0.0),
            t.exponent - alpha,
        ));
    }
    Ok(PowerExpansion { terms })
}

/// Riemann-Liouville integral of order `alpha > 0` applied term-wise:
/// `c (t-s)^b` maps to `c * Gamma(b+1)/Gamma(b+1+alpha) * (t-s)^{b+alpha}`.
/// Shifts must be nonnegative and exponents must exceed -1.
pub fn rlint_of_power(alpha: f64, e: &PowerExpansion) -> Result<PowerExpansion> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("order must be positive, got {alpha}")));
    }
    let mut terms = Vec::with_capacity(e.terms.len());
    for t in &e.terms {
        if t.shift < -1e-14 {
            return Err(Error::InvalidParameter(format!(
                "negative shift {} not supported by the origin-based integral",
                t.shift
            )));
        }
        if t.exponent <= -1.0 {
            return Err(Error::InvalidParameter(format!(
                "exponent {} is not integrable at its shift",
                t.exponent
            )));
        }
        terms.push(PowerTerm::new(
            t.coeff * gamma_ratio(t.exponent + 1.0, t.exponent + 1.0 + alpha),
            t.shift.max(0.0),
            t.exponent + alpha,
        ));
    }
    Ok(PowerExpansion { terms })
}

/// Builds the delayed temporal profile `u(t - tau)` on `(0, K*tau]` from a
/// solution given in cumulative shifted-power form.
///
/// `window_terms[i]` holds the terms the solution gains in window `i+1`
/// (supported on `(i*tau, oo)`), and `phi` is the history profile on
/// `[-tau, 0]` written with shifts in `[-tau, 0]` so that its truncated-power
/// values reproduce the history there. The result shifts every term by `tau`.
pub fn delayed_history_expansion(
    window_terms: &[PowerExpansion],
    phi: &PowerExpansion,
    tau: f64,
) -> Result<PowerExpansion> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    for t in &phi.terms {
        if t.shift < -tau - 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "history term shifted to {} starts before -tau = {}",
                t.shift, -tau
            )));
        }
    }
    for (i, w) in window_terms.iter().enumerate() {
        let window_start = i as f64 * tau;
        for t in &w.terms {
            if t.shift < window_start - 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "window {} term shifted to {} starts before the window; \
                     the representation must be cumulative",
                    i + 1,
                    t.shift
                )));
            }
        }
    }
    let mut all = phi.clone();
    for w in window_terms {
        all = all.add(w);
    }
    Ok(all.shift_right(tau))
}

/// Temporal part of the transformed forcing for a manufactured separable
/// solution `X(x) * T(t)` with `-X'' = lambda * X`:
///
/// `G_T = D^alpha_C T + (p*lambda - a) * T - b * I^{1-alpha}[T(. - tau)]`.
///
/// `solution_after_zero` holds the terms the solution gains on `(0, K*tau]`
/// (cumulative, shifts >= 0) and `phi` the history profile as in
/// [`delayed_history_expansion`]; the full temporal solution on `t >= 0` is
/// their union.
#[allow(clippy::too_many_arguments)]
pub fn manufacture_g(
    alpha: f64,
    p: f64,
    a: f64,
    b: f64,
    tau: f64,
    lambda: f64,
    solution_after_zero: &PowerExpansion,
    phi: &PowerExpansion,
) -> Result<PowerExpansion> {
    for t in &solution_after_zero.terms {
        if t.shift < -1e-14 {
            return Err(Error::InvalidParameter(
                "solution terms gained after t = 0 must have nonnegative shifts".into(),
            ));
        }
    }
    let t_full = phi.restricted_to_nonnegative()?.add(solution_after_zero);
    let delayed = delayed_history_expansion(std::slice::from_ref(solution_after_zero), phi, tau)?;
    let caputo = caputo_of_power(alpha, &t_full)?;
    let delay_int = rlint_of_power(1.0 - alpha, &delayed)?;
    Ok(caputo
        .add(&t_full.scale(p * lambda - a))
        .add(&delay_int.scale(-b))
        .merged())
}
