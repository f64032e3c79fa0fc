use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` on chart `{chart}`")]
    UnknownVariable { name: String, chart: String },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("chart mismatch: `{left}` vs `{right}`")]
    ChartMismatch { left: String, right: String },

    #[error("pole at point ({point}): denominator `{denominator}` vanishes")]
    Pole { point: String, denominator: String },

    #[error("composition introduces a pole: denominator `{0}` vanishes identically")]
    PoleUnderComposition(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("variance mismatch: expected {expected}, found {found}")]
    VarianceMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid index tuple {tuple:?}: {msg}")]
    InvalidIndex { tuple: Vec<usize>, msg: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not invertible: determinant `{det}` is identically zero")]
    NotInvertible { det: String },

    #[error("2-form is degenerate at ({0})")]
    DegenerateOmega(String),

    #[error("not a twisted Poisson structure: {0}")]
    NotTwistedPoisson(String),

    #[error("truncation exceeded: {0}")]
    Truncation(String),

    #[error("structure has non-polynomial coefficient `{0}`")]
    NonPolynomial(String),

    #[error("denominator magnitude {magnitude:e} below 1e-8 at {point:?}")]
    PoleProximity { point: Vec<f64>, magnitude: f64 },

    #[error("non-finite value encountered at {0:?}")]
    NonFinite(Vec<f64>),

    #[error("could not draw a usable sample point after {0} attempts")]
    SamplesExhausted(usize),

    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Variant name, stable for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "Syntax",
            Error::UnknownVariable { .. } => "UnknownVariable",
            Error::DivisionByZero => "DivisionByZero",
            Error::InvalidChart(_) => "InvalidChart",
            Error::ChartMismatch { .. } => "ChartMismatch",
            Error::Pole { .. } => "Pole",
            Error::PoleUnderComposition(_) => "PoleUnderComposition",
            Error::DegreeMismatch(_) => "DegreeMismatch",
            Error::VarianceMismatch { .. } => "VarianceMismatch",
            Error::InvalidIndex { .. } => "InvalidIndex",
            Error::Dimension(_) => "Dimension",
            Error::NotInvertible { .. } => "NotInvertible",
            Error::DegenerateOmega(_) => "DegenerateOmega",
            Error::NotTwistedPoisson(_) => "NotTwistedPoisson",
            Error::Truncation(_) => "Truncation",
            Error::NonPolynomial(_) => "NonPolynomial",
            Error::PoleProximity { .. } => "PoleProximity",
            Error::NonFinite(_) => "NonFinite",
            Error::SamplesExhausted(_) => "SamplesExhausted",
            Error::Manifest { .. } => "Manifest",
            Error::Usage(_) => "Usage",
            Error::Io(_) => "Io",
        }
    }

    /// 2 for malformed input, 3 for failures of the computation itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::UnknownVariable { .. }
            | Error::InvalidChart(_)
            | Error::ChartMismatch { .. }
            | Error::DegreeMismatch(_)
            | Error::VarianceMismatch { .. }
            | Error::InvalidIndex { .. }
            | Error::Dimension(_)
            | Error::Manifest { .. }
            | Error::Usage(_)
            | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
