//! Text and JSON renderings of command results.

use serde_json::{json, Value};

use padic_zeta::integral::{IntegralResult, LevelDelta};
use padic_zeta::operator::{ConvergenceReport, StopReason, TaylorCheck};
use padic_zeta::{ExactRational, PadicNumber};

/// A reconstruction is only reported when numerator times denominator of the
/// unit part stays below p^(N/2); otherwise half of all random units would
/// come back as some fraction.
fn small_rational(x: &PadicNumber) -> Option<ExactRational> {
    let q = x.rational_reconstruction()?;
    let (Some(n), Ok(unit)) = (x.relative_precision(), x.unit_part()) else {
        return Some(q);
    };
    let u = unit.rational_reconstruction()?;
    let height = u.numer().bits() + u.denom().bits();
    let budget = (n as f64 * (x.prime().get() as f64).log2() / 2.0) as u64;
    (height <= budget).then_some(q)
}

pub fn padic(x: &PadicNumber) -> Value {
    json!({
        "digits": x.to_digit_string(),
        "valuation": x.valuation().ok(),
        "absolute_precision": x.absolute_precision(),
        "rational": small_rational(x).map(|q| q.to_string()),
    })
}

/// Digit string plus the small rational it reconstructs to, if any.
pub fn padic_text(x: &PadicNumber) -> String {
    match small_rational(x) {
        Some(q) => format!("{x}  [= {q}]"),
        None => x.to_string(),
    }
}

fn deltas(d: &[LevelDelta]) -> Value {
    d.iter().map(|d| json!([d.level, d.valuation])).collect()
}

pub fn integral(r: &IntegralResult) -> Value {
    json!({
        "levels_used": r.levels_used,
        "converged": r.converged,
        "acceleration": format!("{:?}", r.acceleration).to_lowercase(),
        "level_deltas": deltas(&r.level_deltas),
        "estimate_deltas": deltas(&r.estimate_deltas),
    })
}

pub fn integral_text(r: &IntegralResult) -> String {
    let raw: Vec<u32> = r.level_deltas.iter().map(|d| d.valuation).collect();
    let est: Vec<u32> = r.estimate_deltas.iter().map(|d| d.valuation).collect();
    format!(
        "integral: {} after level r = {} ({:?}); v_p(S_r - S_r-1) = {raw:?}; v_p(E_r - E_r-1) = {est:?}",
        if r.converged { "converged" } else { "NOT converged" },
        r.levels_used,
        r.acceleration,
    )
}

fn stop_reason(s: StopReason) -> &'static str {
    match s {
        StopReason::BoundBelowTarget => "bound_below_target",
        StopReason::TermCap => "term_cap",
    }
}

pub fn terms(report: &ConvergenceReport) -> Value {
    report
        .terms
        .iter()
        .map(|t| {
            json!({
                "n": t.n,
                "coefficient_norm": t.coefficient_norm.to_string(),
                "term_norm": t.term_norm.to_string(),
                "bound": t.bound.as_ref().map(|b| b.to_string()),
            })
        })
        .collect()
}

pub fn convergence(report: &ConvergenceReport) -> Value {
    json!({
        "stop_reason": stop_reason(report.stop_reason),
        "measured_sup": report.measured_sup.to_string(),
        "terms_used": report.terms.len(),
        "bounds_hold": report.bounds_hold(),
    })
}

pub fn convergence_text(report: &ConvergenceReport) -> String {
    let mut out = format!(
        "series: {} terms, stop = {}, measured sup = {}, bounds hold = {}\n",
        report.terms.len(),
        stop_reason(report.stop_reason),
        report.measured_sup,
        report.bounds_hold()
    );
    out.push_str("    n  |P_n|_p          |term|_p         bound\n");
    for t in &report.terms {
        out.push_str(&format!(
            "  {:>3}  {:<15}  {:<15}  {}\n",
            t.n,
            t.coefficient_norm.to_string(),
            t.term_norm.to_string(),
            t.bound.as_ref().map_or("-".into(), |b| b.to_string())
        ));
    }
    out
}

pub fn taylor(check: &TaylorCheck) -> Value {
    json!({
        "steps": check
            .steps
            .iter()
            .map(|s| json!({"k": s.k, "error_valuation": s.error_valuation, "error_norm": s.error_norm.to_string()}))
            .collect::<Vec<_>>(),
        "reached_at": check.reached_at,
        "integral_levels": check.integrals.iter().map(|i| i.levels_used).collect::<Vec<_>>(),
    })
}

pub fn taylor_text(check: &TaylorCheck) -> String {
    let mut out = String::from("   k  v_p(error)\n");
    for s in &check.steps {
        out.push_str(&format!("  {:>2}  {}\n", s.k, s.error_valuation));
    }
    out
}
