//! Choosing the staircase degree `δ` from measured exponents.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::detbound;
use crate::ideal::GroebnerBasis;
use crate::{Error, Result};

pub const DEFAULT_DELTA_MAX: u32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaChoice {
    pub delta: u32,
    pub epsilon: f64,
    /// Degree at which the `a_i` were measured.
    pub probe: u32,
    pub a_probe: Vec<f64>,
    /// `m σ_i(δ) / f` at the chosen `δ`.
    pub finite: Vec<f64>,
    /// `(m+1) a_i / d^{1/m}`.
    pub limit: Vec<f64>,
    pub slack: Vec<f64>,
}

/// Smallest `δ <= delta_max` with `m σ_i(δ)/f <= (m+1) a_i(δ*)/d^{1/m} + ε`
/// for every `i`; degrees with `μ <= 1` are skipped.
pub fn choose_delta(gb: &GroebnerBasis, epsilon: f64, d: f64, m: usize, delta_max: u32, probe: u32) -> Result<DeltaChoice> {
    if !(epsilon > 0.0) {
        return Err(Error::input(format!("ε = {epsilon} must be positive")));
    }
    if gb.ideal().is_zero() {
        return Err(Error::Unsupported(
            "the zero ideal: every monomial is in the staircase and no form avoids the ideal usefully".into(),
        ));
    }
    if m == 0 {
        return Err(Error::Degenerate("dimension 0: d^{1/m} is undefined; give δ explicitly".into()));
    }
    let a_probe: Vec<f64> = gb.a_estimates(probe)?.iter().map(|a| a.to_f64().unwrap_or(f64::NAN)).collect();
    let limit = detbound::limit_exponents(&a_probe, d, m as u32);
    let mut best: Option<(u32, f64, Vec<f64>)> = None;
    for delta in 1..=delta_max {
        let st = gb.staircase(delta)?;
        if st.len() <= 1 {
            continue;
        }
        let ex = detbound::asymptotic_exponents(&st.sigmas(), st.len() as u64, d, m as u32, &a_probe)?;
        let finite = ex.finite;
        let worst = finite.iter().zip(&limit).map(|(x, l)| x - l).fold(f64::NEG_INFINITY, f64::max);
        if worst <= epsilon {
            let slack = finite.iter().zip(&limit).map(|(x, l)| x - l).collect();
            return Ok(DeltaChoice { delta, epsilon, probe, a_probe, finite, limit, slack });
        }
        if best.as_ref().is_none_or(|b| worst < b.1) {
            best = Some((delta, worst, finite));
        }
    }
    let detail = match best {
        Some((delta, worst, finite)) => format!("best δ = {delta} misses by {:.4} with exponents {finite:?}", worst - epsilon),
        None => "every staircase up to δ_max has at most one monomial".into(),
    };
    Err(Error::input(format!("no δ <= {delta_max} achieves slack ε = {epsilon}: {detail}")))
}
