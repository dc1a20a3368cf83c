//! `run` and `matrix`: evaluate an operator spec.

use rayon::prelude::*;
use specasym_core::cmat::ComplexMatrix;
use specasym_core::contour::CutPair;
use specasym_core::dirac::{dirac_asymmetry, dirac_symbol, leading_gap};
use specasym_core::residue::{required_depth, zeta_gap_with, AsymmetryReport};
use specasym_core::sectorial::{ProjectionConfig, FIBER_NODES};
use specasym_core::spectral::{eigen_oracle, oracle_sum, sectorial_projection_matrix, KernelConfig};
use specasym_core::symbol::SymbolExpansion;

use crate::error::CliError;
use crate::report::{
    AssertionOutcome, ClusterRecord, DiracRecord, ExperimentReport, FastPathRecord, GapRow, MatrixRecord,
    ProjectionRecord, Route, RunSettings,
};
use crate::spec::{matrix_to_rows, Assertion, Cx, OperatorKind, OperatorSpec};

/// Command-line overrides of the spec.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub depth: Option<usize>,
    /// Quadrature nodes per contour; defaults depend on the route.
    pub nodes: Option<usize>,
}

pub fn run(spec: &OperatorSpec, ov: Overrides) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new();
    report.spec = Some(spec.clone());
    let default_nodes = match spec.kind {
        OperatorKind::Matrix => KernelConfig::default().nodes,
        _ => FIBER_NODES,
    };
    let nodes = ov.nodes.unwrap_or(default_nodes);
    if nodes < 8 {
        return Err(CliError::Schema("--nodes must be at least 8".into()));
    }
    report.settings = Some(RunSettings { depth: ov.depth.or(spec.depth), nodes });
    let depth = ov.depth.or(spec.depth);
    match spec.kind {
        OperatorKind::Symbolic => {
            let p = spec.symbol()?;
            if spec.cuts.is_empty() || spec.k.is_empty() {
                return Err(CliError::Schema("symbolic specs need cuts and k".into()));
            }
            report.rows = gap_rows(spec, &p, depth, nodes)?;
        }
        OperatorKind::Dirac => {
            let data = spec.clifford()?;
            if spec.k.is_empty() {
                return Err(CliError::Schema("dirac specs need k".into()));
            }
            if spec.cuts.is_empty() {
                let lead = leading_gap(&data);
                let out: Vec<_> = spec.k.par_iter().map(|&k| dirac_asymmetry(&data, k)).collect();
                for (&k, a) in spec.k.iter().zip(out) {
                    let a = a?;
                    let cuts = CutPair::up_down();
                    report.rows.push(GapRow {
                        operator: spec.name.clone(),
                        cut: 0,
                        theta: cuts.theta,
                        theta_prime: cuts.theta_prime,
                        k,
                        gap: a.residue_route.into(),
                        res_pk: a.res_pk.into(),
                        res_pi_pk: None,
                        fast_path: None,
                        route: Route::Residue,
                        depth: a.depth,
                        tol: spec.tolerances.gap,
                    });
                    report.dirac.push(DiracRecord {
                        k,
                        residue_route: a.residue_route.into(),
                        heat_route: a.heat_route.map(Cx::from),
                        discrepancy: a.discrepancy,
                        heat_unavailable: a.heat_error.map(|e| e.to_string()),
                        vanishing: a.vanishing.map(|v| v.describe().to_string()),
                        density_bound: a.density_bound,
                        leading_gap: (k == data.n() as i32).then_some(lead.into()),
                        depth: a.depth,
                    });
                }
            } else {
                report.rows = gap_rows(spec, &dirac_symbol(&data), depth, nodes)?;
            }
        }
        OperatorKind::Matrix => {
            if spec.cuts.is_empty() {
                return Err(CliError::Schema("matrix specs need cuts".into()));
            }
            report.matrix = Some(matrix_record(spec, Some(nodes))?);
        }
    }
    report.assertions = spec.assertions.iter().map(|a| check_assertion(a, spec, &report)).collect();
    report.pass = report.assertions.iter().all(|a| a.pass);
    Ok(report)
}

fn gap_rows(spec: &OperatorSpec, p: &SymbolExpansion, depth: Option<usize>, nodes: usize) -> Result<Vec<GapRow>, CliError> {
    let cuts = spec.cut_pairs()?;
    let cfg = ProjectionConfig { nodes, ..ProjectionConfig::default() };
    let jobs: Vec<(usize, i32)> = (0..cuts.len()).flat_map(|c| spec.k.iter().map(move |&k| (c, k))).collect();
    let out: Vec<Result<AsymmetryReport, CliError>> = jobs
        .par_iter()
        .map(|&(c, k)| {
            let d = depth.unwrap_or_else(|| required_depth(p, k));
            Ok(zeta_gap_with(p, cuts[c], k, d, cfg)?)
        })
        .collect();
    let mut rows = Vec::with_capacity(jobs.len());
    for ((c, _), r) in jobs.into_iter().zip(out) {
        let r = r?;
        rows.push(GapRow {
            operator: spec.name.clone(),
            cut: c,
            theta: r.cuts.theta,
            theta_prime: r.cuts.theta_prime,
            k: r.k,
            gap: r.gap.into(),
            res_pk: r.res_pk.into(),
            res_pi_pk: Some(r.res_pi_pk.into()),
            fast_path: r.fast_path.map(|f| FastPathRecord { value: f.value.into(), discrepancy: f.discrepancy }),
            route: Route::Projection,
            depth: r.depth,
            tol: spec.tolerances.gap,
        });
    }
    Ok(rows)
}

/// Oracle clusters and per-cut projections; `nodes = None` skips the
/// contour quadrature.
pub fn matrix_record(spec: &OperatorSpec, nodes: Option<usize>) -> Result<MatrixRecord, CliError> {
    let a = spec.matrix()?;
    let dim = a.dim();
    let mut cfg = KernelConfig::default();
    let clusters = eigen_oracle(&a, &cfg)?;
    let mut projections = Vec::new();
    for (i, cuts) in spec.cut_pairs()?.into_iter().enumerate() {
        let oracle = oracle_sum(&clusters, dim, |z| cuts.contains(z));
        let (projection, error) = match nodes {
            Some(n) => {
                cfg.nodes = n;
                let p = sectorial_projection_matrix(&a, &cuts, &cfg)?;
                let err = p.dist(&oracle);
                (Some(matrix_to_rows(&p)), Some(err))
            }
            None => (None, None),
        };
        projections.push(ProjectionRecord {
            cut: i,
            theta: cuts.theta,
            theta_prime: cuts.theta_prime,
            projection,
            oracle: matrix_to_rows(&oracle),
            error,
        });
    }
    let clusters =
        clusters.iter().map(|c| ClusterRecord { eigenvalue: c.eigenvalue.into(), multiplicity: c.multiplicity }).collect();
    Ok(MatrixRecord { clusters, projections })
}

pub fn matrix_only(spec: &OperatorSpec) -> Result<ExperimentReport, CliError> {
    if spec.kind != OperatorKind::Matrix {
        return Err(CliError::Schema("the matrix command needs a spec of kind \"matrix\"".into()));
    }
    let mut report = ExperimentReport::new();
    report.spec = Some(spec.clone());
    report.matrix = Some(matrix_record(spec, None)?);
    Ok(report)
}

fn outcome(a: &Assertion, measured: Option<f64>, tol: f64, detail: impl Into<String>) -> AssertionOutcome {
    AssertionOutcome {
        assertion: a.clone(),
        measured,
        tolerance: tol,
        pass: measured.is_some_and(|m| m <= tol),
        detail: detail.into(),
    }
}

fn check_assertion(a: &Assertion, spec: &OperatorSpec, report: &ExperimentReport) -> AssertionOutcome {
    let norm = |z: Cx| z.re.hypot(z.im);
    match a {
        Assertion::GapVanishes { tol } => {
            let tol = tol.unwrap_or(spec.tolerances.gap);
            let worst = report.rows.iter().map(|r| norm(r.gap)).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
            outcome(a, worst, tol, format!("largest |gap| over {} rows", report.rows.len()))
        }
        Assertion::Gap { k, cut, equals, tol } => {
            let rows: Vec<&GapRow> =
                report.rows.iter().filter(|r| r.k == *k && cut.is_none_or(|c| c == r.cut)).collect();
            let worst = rows
                .iter()
                .map(|r| norm(Cx { re: r.gap.re - equals.re, im: r.gap.im - equals.im }))
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
            outcome(a, worst, *tol, format!("{} matching rows", rows.len()))
        }
        Assertion::FastPath { tol } => {
            let tol = tol.unwrap_or(spec.tolerances.gap);
            let d: Vec<f64> = report.rows.iter().filter_map(|r| r.fast_path.as_ref().map(|f| f.discrepancy)).collect();
            let worst = d.iter().copied().fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
            outcome(a, worst, tol, format!("{} rows with a fast path", d.len()))
        }
        Assertion::Projection { cut, equals, tol } => {
            let rec = report.matrix.as_ref().and_then(|m| m.projections.iter().find(|p| p.cut == *cut));
            let Some(rec) = rec else {
                return outcome(a, None, *tol, "no projection for this cut");
            };
            let got = rec.projection.as_ref().unwrap_or(&rec.oracle);
            let want: Vec<Vec<_>> = equals.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect();
            let have: Vec<Vec<_>> = got.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect();
            if want.len() != have.len() || want.iter().any(|r| r.len() != have.len()) {
                return outcome(a, None, *tol, "expected matrix has the wrong shape");
            }
            let d = ComplexMatrix::from_rows(&have).dist(&ComplexMatrix::from_rows(&want));
            outcome(a, Some(d), *tol, "Frobenius distance to the expected projection")
        }
    }
}
