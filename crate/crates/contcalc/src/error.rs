use std::path::PathBuf;

/// A syntax error at a byte offset of some text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub offset: usize,
    pub message: String,
}

impl Located {
    /// Attaches a file name and converts the offset to line and column.
    pub fn in_text(self, file: &str, text: &str) -> CliError {
        let offset = self.offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        CliError::Parse { file: file.to_string(), line, col, message: self.message }
    }

    /// Shifts the offset by the start of the line it was found in.
    pub fn shifted(self, by: usize) -> Located {
        Located { offset: self.offset + by, ..self }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}:{line}:{col}: {message}")]
    Parse { file: String, line: usize, col: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("unknown machine `{0}`")]
    UnknownMachine(String),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] contcalc_core::Error),
}

impl CliError {
    /// Process exit code: 3 for exceeded budgets, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(contcalc_core::Error::NonRegular { .. }) => 3,
            _ => 2,
        }
    }
}
