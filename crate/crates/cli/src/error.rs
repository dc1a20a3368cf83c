use specasym_core::error::CalcError;
use specasym_core::spectral::KernelError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("computation error in {module}: {message}")]
    Computation { module: &'static str, message: String },
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Computation { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

/// Engine module a calculus error originates from.
pub fn provenance(e: &CalcError) -> &'static str {
    match e {
        CalcError::OrderExceeded { .. }
        | CalcError::DepthUnavailable { .. }
        | CalcError::XDependentPrincipal
        | CalcError::Mismatch(_)
        | CalcError::NotElliptic { .. } => "symbol-core",
        CalcError::SingularFiber { .. } | CalcError::LambdaOnSpectrum { .. } => "resolvent-parametrix",
        CalcError::EigenvalueOnCut { .. } | CalcError::ClearanceFailure { .. } => "sectorial-projection",
        CalcError::DepthInsufficient { .. } | CalcError::NotSelfadjoint { .. } | CalcError::Precondition(_) => {
            "residue-asymmetry"
        }
        CalcError::HeatCoefficientUnavailable { .. } | CalcError::UnsupportedDimension(_) => "dirac-geometry",
        CalcError::Kernel(_) => "matrix-spectral-kernel",
    }
}

impl From<CalcError> for CliError {
    fn from(e: CalcError) -> Self {
        CliError::Computation { module: provenance(&e), message: e.to_string() }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        CliError::Computation { module: "matrix-spectral-kernel", message: e.to_string() }
    }
}
