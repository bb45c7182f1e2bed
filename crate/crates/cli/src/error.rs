use serde_json::json;

/// Exit status for a run whose verdicts or verification failed.
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(sphdisp_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use sphdisp_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(E::Io(_) | E::Parse { .. }) => EXIT_IO,
            CliError::Core(_) => EXIT_USAGE,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_IO => "io",
            _ => match self {
                CliError::Usage(_) => "usage",
                _ => "precondition",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    /// One-line JSON object written to stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.message(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

impl From<sphdisp_core::Error> for CliError {
    fn from(e: sphdisp_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
