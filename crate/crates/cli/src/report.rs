//! Report records and their JSON / CSV encodings.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::spec::{Assertion, Cx, OperatorSpec};

pub const ENGINE: &str = "specasym";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Column order of the flat gap table.
pub const CSV_HEADER: [&str; 10] =
    ["operator", "theta", "thetaPrime", "k", "re(gap)", "im(gap)", "re(resPk)", "im(resPk)", "depth", "tol"];

/// Shortest round-trip decimal, the same text the JSON report uses.
fn num(v: f64) -> String {
    serde_json::to_string(&v).expect("f64 serializes")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Engine {
    pub name: String,
    pub version: String,
}

impl Default for Engine {
    fn default() -> Self {
        Self { name: ENGINE.into(), version: VERSION.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastPathRecord {
    pub value: Cx,
    pub discrepancy: f64,
}

/// How a gap row was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Route {
    /// `(2 i pi / m) Res Pi P^{-k}` from the projection symbol.
    Projection,
    /// `i pi Res D^{-k}` for a Dirac operator and the imaginary-axis cuts.
    Residue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GapRow {
    pub operator: String,
    pub cut: usize,
    pub theta: f64,
    pub theta_prime: f64,
    pub k: i32,
    pub gap: Cx,
    pub res_pk: Cx,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub res_pi_pk: Option<Cx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fast_path: Option<FastPathRecord>,
    pub route: Route,
    pub depth: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiracRecord {
    pub k: i32,
    pub residue_route: Cx,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat_route: Option<Cx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat_unavailable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishing: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading_gap: Option<Cx>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterRecord {
    pub eigenvalue: Cx,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectionRecord {
    pub cut: usize,
    pub theta: f64,
    pub theta_prime: f64,
    /// Contour quadrature; absent for `matrix`, which reports the oracle only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<Vec<Vec<Cx>>>,
    pub oracle: Vec<Vec<Cx>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatrixRecord {
    pub clusters: Vec<ClusterRecord>,
    pub projections: Vec<ProjectionRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AssertionOutcome {
    pub assertion: Assertion,
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Above,
}

/// One line of the property table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub module: String,
    pub property: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    /// `None` when the computation itself failed.
    pub measured: Option<f64>,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn at_most(module: &str, property: impl Into<String>, criterion: Option<u8>, measured: f64, tol: f64) -> Self {
        Self {
            module: module.into(),
            property: property.into(),
            criterion,
            measured: Some(measured),
            relation: Relation::AtMost,
            tolerance: tol,
            pass: measured <= tol,
            detail: None,
        }
    }

    pub fn above(module: &str, property: impl Into<String>, criterion: Option<u8>, measured: f64, bound: f64) -> Self {
        Self { relation: Relation::Above, pass: measured > bound, ..Self::at_most(module, property, criterion, measured, bound) }
    }

    pub fn failed(module: &str, property: impl Into<String>, criterion: Option<u8>, tol: f64, err: &CliError) -> Self {
        Self {
            module: module.into(),
            property: property.into(),
            criterion,
            measured: None,
            relation: Relation::AtMost,
            tolerance: tol,
            pass: false,
            detail: Some(err.to_string()),
        }
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifySettings {
    pub seed: u64,
    pub level: String,
}

/// Everything one invocation produced. Wall-clock timings are kept out so
/// that equal inputs give byte-identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub engine: Engine,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<OperatorSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<RunSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySettings>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<GapRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dirac: Vec<DiracRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<AssertionOutcome>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new() -> Self {
        Self {
            engine: Engine::default(),
            spec: None,
            settings: None,
            verify: None,
            rows: Vec::new(),
            dirac: Vec::new(),
            matrix: None,
            checks: Vec::new(),
            assertions: Vec::new(),
            pass: true,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.operator.clone(),
                num(r.theta),
                num(r.theta_prime),
                r.k.to_string(),
                num(r.gap.re),
                num(r.gap.im),
                num(r.res_pk.re),
                num(r.res_pk.im),
                r.depth.to_string(),
                num(r.tol),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<name>.json` and `<name>.csv` into `dir`.
    pub fn write_files(&self, dir: &Path, name: &str) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
        let json = dir.join(format!("{name}.json"));
        std::fs::write(&json, self.to_json()).map_err(|e| CliError::io(json.display().to_string(), e))?;
        let csv_path = dir.join(format!("{name}.csv"));
        let file = std::fs::File::create(&csv_path).map_err(|e| CliError::io(csv_path.display().to_string(), e))?;
        self.write_csv(file).map_err(|e| CliError::io(csv_path.display().to_string(), std::io::Error::other(e)))
    }

    /// Fixed-width pass/fail table for humans.
    pub fn check_table(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let measured = c.measured.map_or_else(|| "error".to_string(), |m| format!("{m:.3e}"));
            let rel = match c.relation {
                Relation::AtMost => "<=",
                Relation::Above => ">",
            };
            let crit = c.criterion.map_or_else(String::new, |n| format!("[{n}]"));
            s.push_str(&format!(
                "{:<4} {:<5} {:<24} {:<56} {:>10} {} {:.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                crit,
                c.module,
                c.property,
                measured,
                rel,
                c.tolerance
            ));
            if let (false, Some(d)) = (c.pass, &c.detail) {
                s.push_str(&format!("           {d}\n"));
            }
        }
        s
    }
}

impl Default for ExperimentReport {
    fn default() -> Self {
        Self::new()
    }
}
