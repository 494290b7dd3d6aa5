use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside chart domain: {0}")]
    Domain(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("not flat")]
    NotFlat,
    #[error("index undefined for {0} point")]
    IndexUndefined(String),
    #[error("index formula inapplicable: {0}")]
    IndexFormulaInapplicable(String),
    #[error("point is not special 1-hyperbolic: {0}")]
    NotHyperbolic(String),
    #[error("seed outside filling")]
    SeedOutsideFilling,
    #[error("empty slice at level {0}")]
    EmptySlice(f64),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("χ undefined for open gluing")]
    OpenGluing,
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::UnsupportedModel(_) => "unsupported_model",
            Error::UnsupportedGeometry(_) => "unsupported_geometry",
            Error::Input(_) => "input",
            Error::NotFlat => "not_flat",
            Error::IndexUndefined(_) => "index_undefined",
            Error::IndexFormulaInapplicable(_) => "index_formula_inapplicable",
            Error::NotHyperbolic(_) => "not_hyperbolic",
            Error::SeedOutsideFilling => "seed_outside_filling",
            Error::EmptySlice(_) => "empty_slice",
            Error::Parse { .. } => "parse",
            Error::OpenGluing => "open_gluing",
            Error::InvalidGluing(_) => "invalid_gluing",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
