use std::fmt;

use ptolemy_core::frieze::FriezeError;
use ptolemy_core::{GeometryError, LaurentError, QuiverError, SeedError};

/// A failed command. `malformed` errors exit 2, domain errors exit 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: &'static str,
    pub detail: String,
    pub malformed: bool,
}

impl CliError {
    pub fn malformed(kind: &'static str, detail: impl Into<String>) -> Self {
        CliError { kind, detail: detail.into(), malformed: true }
    }

    pub fn domain(kind: &'static str, detail: impl Into<String>) -> Self {
        CliError { kind, detail: detail.into(), malformed: false }
    }

    pub fn exit_code(&self) -> i32 {
        if self.malformed {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.kind, self.detail)
    }
}

impl From<QuiverError> for CliError {
    fn from(e: QuiverError) -> Self {
        let detail = e.to_string();
        match e {
            QuiverError::InvalidVertex { .. } => CliError::domain("InvalidVertex", detail),
            QuiverError::FrozenVertex { .. } => CliError::domain("FrozenVertex", detail),
            QuiverError::Overflow { .. } => CliError::domain("Overflow", detail),
            QuiverError::Shape { .. } | QuiverError::Loop { .. } | QuiverError::NotSkewSymmetric { .. } => {
                CliError::malformed("InvalidQuiver", detail)
            }
        }
    }
}

impl From<LaurentError> for CliError {
    fn from(e: LaurentError) -> Self {
        let detail = e.to_string();
        match e {
            LaurentError::NotDivisible => CliError::domain("NotDivisible", detail),
            LaurentError::DivisionByZero => CliError::domain("DivisionByZero", detail),
            LaurentError::ZeroCoordinate { .. } => CliError::domain("ZeroCoordinate", detail),
            LaurentError::DimensionMismatch { .. } => CliError::malformed("DimensionMismatch", detail),
            LaurentError::Parse { .. } => CliError::malformed("Parse", detail),
        }
    }
}

impl From<SeedError> for CliError {
    fn from(e: SeedError) -> Self {
        let detail = e.to_string();
        match e {
            SeedError::Quiver(q) => q.into(),
            SeedError::LaurentViolation { .. } => CliError::domain("LaurentViolation", detail),
            SeedError::Variable { source, .. } => CliError { detail, ..source.into() },
            SeedError::Shape { .. } => CliError::malformed("InvalidSeed", detail),
            SeedError::Parse(_) => CliError::malformed("Parse", detail),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        use GeometryError::*;
        let detail = e.to_string();
        match e {
            NotInTriangulation { .. } => CliError::domain("NotInTriangulation", detail),
            MissingValue { .. } => CliError::domain("MissingValue", detail),
            BadValue { .. } => CliError::domain("BadValue", detail),
            DegenerateSubspace => CliError::domain("DegenerateSubspace", detail),
            CoincidentPoints(..) => CliError::domain("CoincidentPoints", detail),
            PolygonTooSmall { .. } => CliError::malformed("PolygonTooSmall", detail),
            InvalidDiagonal { .. } => CliError::malformed("InvalidDiagonal", detail),
            Crossing { .. } => CliError::malformed("Crossing", detail),
            DiagonalCount { .. } => CliError::malformed("DiagonalCount", detail),
            MatrixShape => CliError::malformed("MatrixShape", detail),
            IdenticalPoints(..) => CliError::malformed("IdenticalPoints", detail),
            BadHoro => CliError::malformed("BadHoro", detail),
            NotEmbedded(_) => CliError::malformed("NotEmbedded", detail),
            Parse { .. } => CliError::malformed("Parse", detail),
        }
    }
}

impl From<FriezeError> for CliError {
    fn from(e: FriezeError) -> Self {
        let detail = e.to_string();
        match e {
            FriezeError::Format(_) => CliError::malformed("Format", detail),
            FriezeError::NotInteger(_) => CliError::domain("NotInteger", detail),
            FriezeError::Inconsistent(_) => CliError::domain("Inconsistent", detail),
            FriezeError::Geometry(g) => g.into(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::malformed("Parse", e.to_string())
    }
}
