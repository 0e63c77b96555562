use fracpole_core::Error as CoreError;
use serde::Serialize;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("{message}")]
    NotPosDef {
        message: String,
        reflection: Vec<[f64; 2]>,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{0}")]
    Core(CoreError),
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    code: i32,
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<serde_json::Value>,
}

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Malformed(_) => 1,
            Self::NotPosDef { .. } => 2,
            Self::Io { .. } => 4,
            Self::Core(e) => match e {
                CoreError::NotPosDef { .. } | CoreError::InvalidAutocov(_) => 2,
                CoreError::NoConvergence(_) => 3,
                _ => 1,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "not_posdef",
            3 => "no_convergence",
            4 => "io",
            _ => "malformed_input",
        }
    }

    /// Single-line JSON object for standard error.
    pub fn to_json(&self) -> String {
        let details = match self {
            Self::NotPosDef { reflection, .. } => Some(json!({ "reflection": reflection })),
            Self::Core(CoreError::NoConvergence(d)) => serde_json::to_value(d).ok(),
            _ => None,
        };
        let obj = ErrorObject {
            code: self.exit_code(),
            kind: self.kind(),
            message: self.to_string(),
            details,
        };
        json!({ "error": obj }).to_string()
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        Self::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Malformed(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Malformed(e.to_string())
    }
}
