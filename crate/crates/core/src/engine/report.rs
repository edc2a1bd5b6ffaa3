//! The JSON report of a pipeline run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cover::Region;
use super::delta::DeltaChoice;
use crate::ideal::{AffineOrderingBound, IdealMode};
use crate::poly::{GradedOrdering, Polynomial, VarSpace};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub mode: IdealMode,
    /// The `vars:` header of the ideal file.
    pub vars: usize,
    pub generators: Vec<String>,
    /// `[B]` in affine mode, `[B_0, ..., B_n]` in projective mode.
    pub heights: Vec<f64>,
    pub delta: Option<u32>,
    pub epsilon: Option<f64>,
    pub ordering: GradedOrdering,
    pub strategy: String,
    pub norm_bound: Option<f64>,
    pub delta_max: u32,
    pub probe: u32,
}

impl RunParams {
    /// Variable names of the ring the certificates live in (`x0..xn`).
    pub fn form_space(&self) -> VarSpace {
        VarSpace::new(self.vars)
    }

    pub fn input_space(&self) -> VarSpace {
        match self.mode {
            IdealMode::Affine => VarSpace::affine(self.vars - 1),
            IdealMode::Projective => VarSpace::new(self.vars),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub class: usize,
    pub poly: String,
    /// `g(x) = G(1, x)`, affine runs only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine_poly: Option<String>,
    /// Indices into `points`.
    pub points: Vec<usize>,
    pub region: Region,
    pub depth: u32,
}

impl CertificateRecord {
    pub fn form(&self, params: &RunParams) -> Result<Polynomial> {
        Polynomial::parse(&self.poly, &params.form_space())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineBoundRecord {
    pub s: u32,
    pub lhs: String,
    pub intermediate: String,
    pub limit: String,
    pub holds: bool,
    pub a: Vec<String>,
}

impl From<&AffineOrderingBound> for AffineBoundRecord {
    fn from(b: &AffineOrderingBound) -> Self {
        use crate::ideal::rational_string as r;
        AffineBoundRecord {
            s: b.s,
            lhs: r(&b.lhs),
            intermediate: r(&b.intermediate),
            limit: r(&b.limit),
            holds: b.holds,
            a: b.a.iter().map(r).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub params: RunParams,
    pub delta: u32,
    pub mu: u64,
    pub nu: Option<u32>,
    pub f: Option<u64>,
    pub sigma: Vec<u64>,
    pub dimension: Option<usize>,
    pub degree: String,
    pub hilbert_polynomial: Vec<String>,
    /// Heights the forms were built against.
    pub box_heights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_choice: Option<DeltaChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cubes: Option<f64>,
    /// `m σ_i / f`.
    pub k_bound_exponents: Option<Vec<f64>>,
    /// `ln(δ Π B_i^{m σ_i / f})`.
    pub k_bound_log: Option<f64>,
    /// `ln(δ · #classes · ⌈2/ρ⌉^m)`, theoretical runs only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_bound_explicit_log: Option<f64>,
    pub points: Vec<Vec<i64>>,
    pub point_count: usize,
    pub class_count: usize,
    pub class_sizes: Vec<usize>,
    pub certificates: Vec<CertificateRecord>,
    pub k_actual: u64,
    pub max_depth: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine_bound: Option<AffineBoundRecord>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Input(format!("bad report: {e}")))
    }

    pub const CSV_HEADER: &'static str = "height,points,certificates,delta,k_actual,k_bound_log";

    /// One CSV row: the first height, counts, and the bound.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.params.heights.last().copied().unwrap_or(0.0),
            self.point_count,
            self.certificates.len(),
            self.delta,
            self.k_actual,
            self.k_bound_log.map(|v| v.to_string()).unwrap_or_default()
        )
    }
}
