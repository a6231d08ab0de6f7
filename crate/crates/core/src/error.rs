use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by parsing, solving, simulation and geometry generation.
///
/// Every variant maps to a stable machine-readable [`Error::code`] used by the
/// command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("unsupported schema_version {0} (expected 1)")]
    UnsupportedVersion(i64),

    #[error("dangling {kind} reference \"{name}\" at `{path}`")]
    DanglingReference {
        kind: &'static str,
        name: String,
        path: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target {target} outside attainable range [{min}, {max}]")]
    OutOfRange { target: f64, min: f64, max: f64 },

    #[error("target stiffness {target} N/m is not reachable; plateau supremum is {supremum} N/m")]
    PlateauUnreachable { target: f64, supremum: f64 },

    #[error("always jammed: feature spacing D = {spacing} m must exceed head diameter 2r = {diameter} m")]
    AlwaysJammed { spacing: f64, diameter: f64 },

    #[error("unreachable joint limit: no jamming angle in (0, pi)")]
    UnreachableLimit,

    #[error("geometry infeasible: {0}")]
    GeometryInfeasible(String),

    #[error("features in contact at rest (d = {gap} m); minimum feasible feature length is {min_length} m")]
    ContactAtRest { gap: f64, min_length: f64 },

    #[error("target angle {target} rad is unreachable for this extensional geometry")]
    AngleUnreachable { target: f64 },

    #[error("tendon pull {pull} m exceeds total jam capacity {capacity} m")]
    OverPull { pull: f64, capacity: f64 },

    #[error("limb has no joints")]
    EmptyLimb,

    #[error("angle list has {got} entries but limb has {expected} joints")]
    LengthMismatch { expected: usize, got: usize },

    #[error("missing stroke metrics for leg \"{0}\"")]
    MissingLimbMetrics(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier for machine-readable diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax_error",
            Error::Schema { .. } => "schema_violation",
            Error::UnsupportedVersion(_) => "unsupported_schema_version",
            Error::DanglingReference { .. } => "dangling_reference",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::OutOfRange { .. } => "target_out_of_range",
            Error::PlateauUnreachable { .. } => "plateau_unreachable",
            Error::AlwaysJammed { .. } => "always_jammed",
            Error::UnreachableLimit => "unreachable_limit",
            Error::GeometryInfeasible(_) => "geometry_infeasible",
            Error::ContactAtRest { .. } => "contact_at_rest",
            Error::AngleUnreachable { .. } => "angle_unreachable",
            Error::OverPull { .. } => "over_pull",
            Error::EmptyLimb => "empty_limb",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::MissingLimbMetrics(_) => "missing_limb_metrics",
            Error::Geometry(_) => "geometry_error",
            Error::InvalidMesh(_) => "invalid_mesh",
            Error::Io(_) => "io_error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
