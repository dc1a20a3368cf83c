//! JSON operator specifications.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use specasym_core::cmat::{ComplexMatrix, C64};
use specasym_core::contour::CutPair;
use specasym_core::dirac::{CliffordData, FourierField};
use specasym_core::symbol::{SymbolExpansion, SymbolTerm};
use specasym_core::torus::{Freq, Torus};

use crate::error::CliError;

/// Complex number as `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Cx> for C64 {
    fn from(z: Cx) -> Self {
        C64::new(z.re, z.im)
    }
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<Cx>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m[(i, j)].into()).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Symbolic,
    Dirac,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: Vec<Vec<Cx>>,
    #[serde(default)]
    pub xi: Vec<u8>,
    #[serde(default)]
    pub norm: i32,
    #[serde(default)]
    pub freq: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub freq: Vec<i32>,
    pub coeff: Vec<Vec<Cx>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DiracSpec {
    pub twist_rank: usize,
    /// One list of Fourier modes per direction; may be empty for no twist.
    #[serde(default)]
    pub twist_connection: Vec<Vec<ModeSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_gap_tol")]
    pub gap: f64,
    #[serde(default = "default_projection_tol")]
    pub projection: f64,
}

fn default_gap_tol() -> f64 {
    1e-7
}

fn default_projection_tol() -> f64 {
    1e-10
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { gap: default_gap_tol(), projection: default_projection_tol() }
    }
}

/// Checks evaluated after the computation; any failure gives exit status 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase", deny_unknown_fields)]
pub enum Assertion {
    /// Every computed gap has modulus at most `tol`.
    GapVanishes { tol: Option<f64> },
    /// The gap for `k` (and cut index `cut`, or every cut) equals `equals`.
    Gap { k: i32, cut: Option<usize>, equals: Cx, tol: f64 },
    /// Every available fast-path discrepancy is at most `tol`.
    FastPath { tol: Option<f64> },
    /// Matrix kind: the projection for cut index `cut` equals `equals`.
    Projection { cut: usize, equals: Vec<Vec<Cx>>, tol: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OperatorSpec {
    pub name: String,
    pub kind: OperatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_dim: Option<usize>,
    /// Torus volume; the torus is a cube with this volume. Defaults to `(2 pi)^n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirac: Option<DiracSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Cx>>>,
    /// `[theta, thetaPrime]` pairs in radians.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cuts: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<Assertion>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn freq(v: &[i32], n: usize, what: &str) -> Result<Freq, CliError> {
    if v.len() > n {
        return Err(schema(format!("{what}: frequency has {} entries on T^{n}", v.len())));
    }
    let mut out = [0; 4];
    out[..v.len()].copy_from_slice(v);
    Ok(out)
}

fn matrix(rows: &[Vec<Cx>], dim: usize, what: &str) -> Result<ComplexMatrix, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(schema(format!("{what}: expected a {dim}x{dim} matrix")));
    }
    if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(schema(format!("{what}: non-finite entry")));
    }
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect();
    Ok(ComplexMatrix::from_rows(&rows))
}

impl OperatorSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: OperatorSpec = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(schema("name must be non-empty and free of path separators"));
        }
        for (i, c) in self.cuts.iter().enumerate() {
            if !c.iter().all(|a| (0.0..2.0 * TAU).contains(a)) {
                return Err(schema(format!("cut {i}: angles must lie in [0, 4 pi)")));
            }
            self.cut(i)?;
        }
        if let Some(v) = self.volume {
            if !(v.is_finite() && v > 0.0) {
                return Err(schema("volume must be positive"));
            }
        }
        match self.kind {
            OperatorKind::Symbolic => {
                let n = self.dim()?;
                self.fiber()?;
                self.order.ok_or_else(|| schema("symbolic spec needs order"))?;
                if self.components.is_empty() {
                    return Err(schema("symbolic spec needs at least one component"));
                }
                if !(1..=4).contains(&n) {
                    return Err(schema("n must be between 1 and 4"));
                }
            }
            OperatorKind::Dirac => {
                let n = self.dim()?;
                if n != 2 && n != 4 {
                    return Err(schema("Dirac specs need n = 2 or 4"));
                }
                self.dirac.as_ref().ok_or_else(|| schema("dirac spec needs a dirac block"))?;
            }
            OperatorKind::Matrix => {
                let m = self.matrix.as_ref().ok_or_else(|| schema("matrix spec needs matrix entries"))?;
                matrix(m, m.len(), "matrix")?;
                if m.is_empty() {
                    return Err(schema("matrix must be non-empty"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| schema("missing torus dimension n"))
    }

    fn fiber(&self) -> Result<usize, CliError> {
        match self.fiber_dim {
            Some(0) | None => Err(schema("fiberDim must be a positive integer")),
            Some(d) => Ok(d),
        }
    }

    pub fn cut(&self, i: usize) -> Result<CutPair, CliError> {
        let [a, b] = self.cuts[i];
        CutPair::normalized(a, b).map_err(|e| schema(format!("cut {i}: {e}")))
    }

    pub fn cut_pairs(&self) -> Result<Vec<CutPair>, CliError> {
        (0..self.cuts.len()).map(|i| self.cut(i)).collect()
    }

    pub fn torus(&self) -> Result<Torus, CliError> {
        let n = self.dim()?;
        Ok(match self.volume {
            None => Torus::standard(n),
            Some(v) => Torus::new(vec![v.powf(1.0 / n as f64); n]),
        })
    }

    pub fn symbol(&self) -> Result<SymbolExpansion, CliError> {
        let n = self.dim()?;
        let dim = self.fiber()?;
        let mut comps = Vec::with_capacity(self.components.len());
        for (j, c) in self.components.iter().enumerate() {
            let mut terms = Vec::with_capacity(c.len());
            for (t, term) in c.iter().enumerate() {
                let what = format!("component {j} term {t}");
                if term.xi.len() > n {
                    return Err(schema(format!("{what}: xi exponent has too many entries")));
                }
                let mut pow = [0u8; 4];
                pow[..term.xi.len()].copy_from_slice(&term.xi);
                terms.push(
                    SymbolTerm::new(matrix(&term.coeff, dim, &what)?)
                        .xi(pow)
                        .norm(term.norm)
                        .freq(freq(&term.freq, n, &what)?),
                );
            }
            comps.push(terms);
        }
        let order = self.order.ok_or_else(|| schema("symbolic spec needs order"))?;
        SymbolExpansion::explicit(self.torus()?, dim, order, comps).map_err(|e| schema(e.to_string()))
    }

    pub fn clifford(&self) -> Result<CliffordData, CliError> {
        let n = self.dim()?;
        let d = self.dirac.as_ref().ok_or_else(|| schema("dirac spec needs a dirac block"))?;
        let mut conn = vec![FourierField::new(); n];
        if !d.twist_connection.is_empty() && d.twist_connection.len() != n {
            return Err(schema(format!("twistConnection needs {n} entries")));
        }
        for (i, modes) in d.twist_connection.iter().enumerate() {
            for (t, m) in modes.iter().enumerate() {
                let what = format!("A_{} mode {t}", i + 1);
                let k = freq(&m.freq, n, &what)?;
                if conn[i].insert(k, matrix(&m.coeff, d.twist_rank, &what)?).is_some() {
                    return Err(schema(format!("{what}: repeated frequency")));
                }
            }
        }
        CliffordData::new(self.torus()?, d.twist_rank, conn).map_err(|e| schema(e.to_string()))
    }

    pub fn matrix(&self) -> Result<ComplexMatrix, CliError> {
        let m = self.matrix.as_ref().ok_or_else(|| schema("matrix spec needs matrix entries"))?;
        matrix(m, m.len(), "matrix")
    }
}
