use thiserror::Error;

/// Which of the three groupoid-chart domain conditions rejected an arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartComponent {
    Target,
    Source,
    Unitary,
}

impl std::fmt::Display for ChartComponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ChartComponent::Target => "target",
            ChartComponent::Source => "source",
            ChartComponent::Unitary => "unitary",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("singular value decomposition did not converge")]
    NonConvergence,
    #[error("invalid Schatten order {0}; must be >= 1")]
    InvalidOrder(f64),
    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not skew-Hermitian (residual {0:e})")]
    NotSkewHermitian(f64),
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("frame columns are not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),
    #[error("matrix is not an orthogonal projector (residual {0:e})")]
    NotProjector(f64),
    #[error("matrix is not a partial isometry (residual {0:e})")]
    NotPartialIsometry(f64),
    #[error("spectrum too close to zero for inverse-type function (eigenvalue {0:e})")]
    SingularSpectrum(f64),
    #[error("matrix has numerical rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is the full space; its complement is trivial")]
    FullSpace,
    #[error("outside chart domain (smallest singular value {s_min:e})")]
    OutsideDomain { s_min: f64 },
    #[error("arrows are not composable (source/target mismatch {mismatch:e})")]
    NotComposable { mismatch: f64 },
    #[error("projectors too far apart for direct rotation (distance {0})")]
    DomainTooFar(f64),
    #[error("subspace outside cross-section domain (distance {distance}, radius {radius})")]
    OutsideSectionDomain { distance: f64, radius: f64 },
    #[error("eigenvalue within {margin:e} of -1 (distance {distance:e})")]
    BranchCut { distance: f64, margin: f64 },
    #[error("outside groupoid chart domain ({component} condition failed)")]
    OutsideChartDomain {
        component: ChartComponent,
        #[source]
        cause: Box<Error>,
    },
    #[error("charts are incompatible: {0}")]
    ChartMismatch(&'static str),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
