//! JSON report schema (version 1). Exact-mode numbers serialize as reduced
//! fraction strings (`"p/q"`, complex as `"a/b+c/d i"`); approximate numbers
//! as decimals with 17 significant digits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use strominger_core::Scalar;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub scenario: String,
    pub mode: String,
    pub inputs: Inputs,
    pub outputs: Outputs,
    pub oracle: Oracle,
    pub runtime_ms: u64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Inputs {
    pub family: Option<String>,
    pub s: Option<String>,
    pub t: Option<String>,
    pub abs_t: Option<String>,
    pub r: Option<String>,
    pub instanton: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Outputs {
    /// Coefficient of the torsion differential on `w1^~w1^w2^~w2`.
    #[serde(rename = "dT_coeff")]
    pub dt_coeff: Option<String>,
    /// Coefficient of the curvature trace on `w1^~w1^w2^~w2`.
    pub trace_coeff: Option<String>,
    pub alpha: Option<String>,
    pub alpha_sign: Option<String>,
    pub balanced: Option<bool>,
    pub feasibility_margin: Option<String>,
    /// Bott-Chern dimension table, rows indexed by p, columns by q.
    pub bc_dims: Option<[[usize; 4]; 4]>,
    /// Critical `r^4` for sign-threshold scenarios.
    pub threshold_r4: Option<String>,
    /// Free-form verdict (`indeterminate`, `no-solution`, `feasible`,
    /// `infeasible`, ...).
    pub verdict: Option<String>,
}

impl Outputs {
    /// Computed value for an oracle key, rendered as a string.
    pub fn field(&self, key: &str) -> Option<String> {
        match key {
            "dT_coeff" => self.dt_coeff.clone(),
            "trace_coeff" => self.trace_coeff.clone(),
            "alpha" => self.alpha.clone(),
            "alpha_sign" => self.alpha_sign.clone(),
            "balanced" => self.balanced.map(|b| b.to_string()),
            "feasibility_margin" => self.feasibility_margin.clone(),
            "threshold_r4" => self.threshold_r4.clone(),
            "verdict" => self.verdict.clone(),
            "bc_h22" => self.bc_dims.map(|d| d[2][2].to_string()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Oracle {
    /// Expected values keyed by output field name.
    pub expected: BTreeMap<String, String>,
    /// Whether every expected entry matches the computed output.
    #[serde(rename = "match")]
    pub matched: bool,
}

pub fn fmt_scalar(v: &Scalar) -> String {
    v.to_string()
}

pub fn sign_string(sign: i32) -> String {
    match sign.signum() {
        1 => "+".to_string(),
        -1 => "-".to_string(),
        _ => "0".to_string(),
    }
}

/// Bit-exact comparison in exact mode (parsed as scalars when possible so
/// equivalent renderings agree); absolute tolerance 1e-9 in approximate mode.
pub fn values_match(computed: &str, expected: &str, approx: bool) -> bool {
    match (computed.parse::<Scalar>(), expected.parse::<Scalar>()) {
        (Ok(a), Ok(b)) => {
            if approx {
                let (ar, ai) = a.to_f64();
                let (br, bi) = b.to_f64();
                let scale = 1.0 + br.abs() + bi.abs();
                (ar - br).abs() <= 1e-9 * scale && (ai - bi).abs() <= 1e-9 * scale
            } else {
                a == b
            }
        }
        _ => computed == expected,
    }
}

impl Report {
    pub fn evaluate_oracle(&mut self, approx: bool) {
        self.oracle.matched = self.oracle.expected.iter().all(|(key, expected)| {
            self.outputs
                .field(key)
                .map(|got| values_match(&got, expected, approx))
                .unwrap_or(false)
        });
    }

    /// Entries of the oracle that disagree with the computed outputs.
    pub fn mismatches(&self, approx: bool) -> Vec<(String, String, Option<String>)> {
        self.oracle
            .expected
            .iter()
            .filter_map(|(key, expected)| {
                let got = self.outputs.field(key);
                let ok = got
                    .as_deref()
                    .map(|g| values_match(g, expected, approx))
                    .unwrap_or(false);
                (!ok).then(|| (key.clone(), expected.clone(), got))
            })
            .collect()
    }
}
