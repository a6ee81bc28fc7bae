use std::fmt;

use serde_json::json;

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_UNIQUE: i32 = 3;
pub const EXIT_SINGULARITY: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Config { path: String, message: String },
    Engine(quantum_otto::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        use quantum_otto::Error as E;
        match self {
            CliError::Config { .. } | CliError::Engine(E::InvalidParameter { .. }) => EXIT_CONFIG,
            CliError::Engine(E::NonUniqueLimitCycle { .. }) => EXIT_NON_UNIQUE,
            CliError::Engine(E::Singularity { .. }) => EXIT_SINGULARITY,
            CliError::Engine(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Io(_) => "io",
            CliError::Engine(e) => engine_kind(e),
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        let mut v = json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Config { path, .. } = self {
            v["key"] = json!(path);
        }
        v.to_string()
    }
}

/// Short machine name of an engine error, also used in sweep status cells.
pub fn engine_kind(e: &quantum_otto::Error) -> &'static str {
    use quantum_otto::Error as E;
    match e {
        E::NonPhysical { .. } => "non_physical",
        E::InvalidParameter { .. } => "invalid_parameter",
        E::NotNormalized { .. } => "not_normalized",
        E::Singularity { .. } => "singularity",
        E::Integration { .. } => "integration",
        E::NonUniqueLimitCycle { .. } => "non_unique_limit_cycle",
        E::SingularSystem => "singular_system",
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { path, message } => write!(f, "{path}: {message}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<quantum_otto::Error> for CliError {
    fn from(e: quantum_otto::Error) -> Self {
        CliError::Engine(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
