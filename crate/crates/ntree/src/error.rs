use thiserror::Error;

use crate::polyring::PolyError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("the shadow of the first apex has more than one vertex")]
    NuStatusMany,
    #[error("face polynomial has roots outside Q; residual factor {residual} (try a linear change of x)")]
    NonRationalRoots { residual: String },
    #[error("elimination budget of {budget} shifts exceeded")]
    EliminationBudgetExceeded { budget: usize },
    #[error("truncated series precision {bound} is too low for this stage")]
    SeriesPrecision { bound: u64 },
    #[error("maximum tree depth {max} exceeded")]
    MaxDepthExceeded { max: usize },
    #[error("no nonnegative solution of 1 + u.q = u0 p for q = {q:?}, p = {p}")]
    NoDiophantineSolution { q: Vec<u64>, p: u64 },
    #[error("{0} is not a root of the edge polynomial")]
    RootNotOnEdge(String),
    #[error("tree contains a black box")]
    BlackBox,
    #[error("tree is not P-good")]
    NotPGood,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("reconstruction needs a tree with exactly one non-dead arrow: {0}")]
    UnsupportedMultiArrow(String),
    #[error("inconsistent sections: {0}")]
    InconsistentSections(String),
    #[error("section cross-check could not find rational centres after {tries} tries")]
    RetryBudgetExceeded { tries: usize },
    #[error("malformed tree json: {0}")]
    Json(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("at stage {stage}: {inner}")]
    AtStage { stage: String, inner: Box<Error> },
}

impl Error {
    pub(crate) fn at(self, stage: &str) -> Error {
        match self {
            Error::AtStage { .. } => self,
            other => Error::AtStage { stage: stage.to_string(), inner: Box::new(other) },
        }
    }

    /// The innermost error, without stage wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtStage { inner, .. } => inner.root_cause(),
            e => e,
        }
    }

    /// Variant name of the innermost error.
    pub fn name(&self) -> &'static str {
        match self.root_cause() {
            Error::Poly(_) => "PolyError",
            Error::NuStatusMany => "NuStatusMany",
            Error::NonRationalRoots { .. } => "NonRationalRoots",
            Error::EliminationBudgetExceeded { .. } => "EliminationBudgetExceeded",
            Error::SeriesPrecision { .. } => "SeriesPrecision",
            Error::MaxDepthExceeded { .. } => "MaxDepthExceeded",
            Error::NoDiophantineSolution { .. } => "NoDiophantineSolution",
            Error::RootNotOnEdge(_) => "RootNotOnEdge",
            Error::BlackBox => "BlackBox",
            Error::NotPGood => "NotPGood",
            Error::Precondition(_) => "Precondition",
            Error::UnsupportedMultiArrow(_) => "UnsupportedMultiArrow",
            Error::InconsistentSections(_) => "InconsistentSections",
            Error::RetryBudgetExceeded { .. } => "RetryBudgetExceeded",
            Error::Json(_) => "Json",
            Error::Internal(_) => "Internal",
            Error::AtStage { .. } => unreachable!("root cause is never a stage wrapper"),
        }
    }

    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self.root_cause(), Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
