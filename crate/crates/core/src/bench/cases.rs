//! Built-in benchmark problems.
//!
//! Both run on the unit interval over `(0, 3]` with delay 1 and delay
//! coupling 1:
//!
//! - `example1-case1`: manufactured solution
//!   `sin(pi x) (1 + t + t^a + (t-1)_+^{a+1} + (t-2)_+^{a+2})` with
//!   `p = 1/pi^2`, `a = -2` and history `(1+t) sin(pi x)`. The forcing is
//!   available analytically, as a closed-form raw forcing, or as a sampled
//!   raw forcing.
//! - `example1-case2`: forcing `t^2 sin(pi x)` with `p = 1/5`, `a = -1` and
//!   history `(1 + pi t) sin(pi x)`; no exact solution is known.

use std::f64::consts::PI;
use std::sync::Arc;

use super::config::{CaseSelector, CustomCase, GRoute};
use crate::error::{Error, Result};
use crate::powcalc::{
    delayed_history_expansion, manufacture_g, rlint_of_power, PowerExpansion,
};
use crate::solver::{HistorySpec, ProblemSpec, SeparableFn, SourceSpec, SpatialProfile};

const SIN: SpatialProfile = SpatialProfile::SinMode { mode: 1 };

/// Temporal parts of the manufactured case: history continuation and the
/// terms gained after `t = 0`.
fn case1_parts(alpha: f64) -> (PowerExpansion, PowerExpansion) {
    let phi = PowerExpansion::from_triples(&[(1.0, -1.0, 1.0)]);
    let gained = PowerExpansion::from_triples(&[
        (1.0, 0.0, alpha),
        (1.0, 1.0, alpha + 1.0),
        (1.0, 2.0, alpha + 2.0),
    ]);
    (phi, gained)
}

/// Raw forcing of the manufactured case as a power expansion:
/// `f_T = T' + (p*lambda - a) * d/dt I^alpha T - b * T(. - tau)`.
///
/// The expansion is singular like `t^{alpha-1}` at the origin, which is why
/// the solver's rectangle transform of sampled values degrades there; the
/// closed-form route integrates it exactly.
pub fn case1_raw_forcing(alpha: f64) -> Result<PowerExpansion> {
    let (phi, gained) = case1_parts(alpha);
    let t_full = phi.restricted_to_nonnegative()?.add(&gained);
    let p = 1.0 / (PI * PI);
    let lambda = PI * PI;
    let a = -2.0;
    let b = 1.0;
    let rl_derivative = rlint_of_power(alpha, &t_full)?.derivative();
    let delayed = delayed_history_expansion(&[gained], &phi, 1.0)?;
    Ok(t_full
        .derivative()
        .add(&rl_derivative.scale(p * lambda - a))
        .add(&delayed.scale(-b))
        .merged())
}

/// Manufactured-solution case with the forcing supplied via `route`.
pub fn example1_case1(alpha: f64, route: GRoute) -> Result<ProblemSpec> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("order must be in (0,1), got {alpha}")));
    }
    let (phi, gained) = case1_parts(alpha);
    let p = 1.0 / (PI * PI);
    let exact_temporal = phi.restricted_to_nonnegative()?.add(&gained);

    let source = match route {
        GRoute::AnalyticG => {
            let g = manufacture_g(alpha, p, -2.0, 1.0, 1.0, PI * PI, &gained, &phi)?;
            SourceSpec::ClosedFormG(SeparableFn { profile: SIN, temporal: g })
        }
        GRoute::ClosedF => {
            let f = case1_raw_forcing(alpha)?;
            SourceSpec::ClosedFormF(SeparableFn { profile: SIN, temporal: f })
        }
        GRoute::SampledF => {
            let f = case1_raw_forcing(alpha)?;
            SourceSpec::SampledF { profile: SIN, temporal: Arc::new(move |t| f.eval(t)) }
        }
    };

    Ok(ProblemSpec {
        diffusivity: p,
        reaction: -2.0,
        delay_coupling: 1.0,
        alpha,
        tau: 1.0,
        windows: 3,
        length: 1.0,
        history: HistorySpec::Separable(SeparableFn { profile: SIN, temporal: phi }),
        source,
        exact: Some(SeparableFn { profile: SIN, temporal: exact_temporal }),
    })
}

/// Polynomial-forcing case without a known exact solution.
pub fn example1_case2(alpha: f64, route: GRoute) -> Result<ProblemSpec> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("order must be in (0,1), got {alpha}")));
    }
    let forcing = PowerExpansion::from_triples(&[(1.0, 0.0, 2.0)]);
    let source = match route {
        // The closed-form transform is the natural route here; "analytic"
        // requests collapse to it.
        GRoute::AnalyticG | GRoute::ClosedF => {
            SourceSpec::ClosedFormF(SeparableFn { profile: SIN, temporal: forcing })
        }
        GRoute::SampledF => {
            SourceSpec::SampledF { profile: SIN, temporal: Arc::new(move |t: f64| t * t) }
        }
    };
    Ok(ProblemSpec {
        diffusivity: 0.2,
        reaction: -1.0,
        delay_coupling: 1.0,
        alpha,
        tau: 1.0,
        windows: 3,
        length: 1.0,
        history: HistorySpec::Sampled(Arc::new(|x: f64, t: f64| (1.0 + PI * t) * (PI * x).sin())),
        source,
        exact: None,
    })
}

fn custom_case(custom: &CustomCase, alpha: f64) -> Result<ProblemSpec> {
    let profile = |mode: u32| SpatialProfile::SinMode { mode };
    let history = HistorySpec::Separable(SeparableFn {
        profile: profile(custom.phi.mode),
        temporal: PowerExpansion::from_triples(&custom.phi.terms),
    });
    let source_fn = SeparableFn {
        profile: profile(custom.source.mode),
        temporal: PowerExpansion::from_triples(&custom.source.terms),
    };
    let source = match custom.source.kind.as_str() {
        "closed-g" => SourceSpec::ClosedFormG(source_fn),
        "closed-f" => SourceSpec::ClosedFormF(source_fn),
        other => {
            return Err(Error::Config(format!(
                "custom source kind must be closed-g or closed-f, got {other}"
            )))
        }
    };
    Ok(ProblemSpec {
        diffusivity: custom.p,
        reaction: custom.a,
        delay_coupling: custom.b,
        alpha,
        tau: custom.tau,
        windows: custom.windows,
        length: custom.length,
        history,
        source,
        exact: custom.exact.as_ref().map(|e| SeparableFn {
            profile: profile(e.mode),
            temporal: PowerExpansion::from_triples(&e.terms),
        }),
    })
}

/// Builds the problem a configuration selects, at one fractional order.
pub fn build(case: &CaseSelector, alpha: f64, route: GRoute) -> Result<ProblemSpec> {
    match case {
        CaseSelector::Example1Case1 => example1_case1(alpha, route),
        CaseSelector::Example1Case2 => example1_case2(alpha, route),
        CaseSelector::Custom(custom) => custom_case(custom, alpha),
    }
}
