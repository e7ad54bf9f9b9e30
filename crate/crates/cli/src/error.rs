//! Error categories and exit codes.
//!
//! Every failure is printed as a single line `error[<category>]: <message>` on
//! stderr so scripts can dispatch on the bracketed token.

use std::fmt;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// A file could not be read or written.
    Io,
    /// An input file is malformed.
    Parse,
    /// Inputs are well-formed but unusable (empty, single class, mismatched).
    Data,
    /// Unknown flags or missing arguments.
    Usage,
    /// Inconsistent or out-of-range options.
    Config,
    /// Training stopped before reaching the KKT tolerance.
    Convergence,
}

impl Category {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Category::Io | Category::Parse | Category::Data => ExitCode::from(1),
            Category::Usage | Category::Config => ExitCode::from(2),
            Category::Convergence => ExitCode::from(3),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Io => "io",
            Category::Parse => "parse",
            Category::Data => "data",
            Category::Usage => "usage",
            Category::Config => "config",
            Category::Convergence => "convergence",
        })
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn new(category: Category, message: impl fmt::Display) -> Self {
        Self {
            category,
            error: anyhow::anyhow!("{message}"),
        }
    }

    /// The one-line form printed on stderr.
    pub fn line(&self) -> String {
        let message = format!("{:#}", self.error).replace(['\n', '\r'], " ");
        format!("error[{}]: {message}", self.category)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub trait Categorize<T> {
    fn category(self, category: Category) -> CliResult<T>;
    fn category_with<C: fmt::Display>(self, category: Category, context: impl FnOnce() -> C) -> CliResult<T>;
}

impl<T, E> Categorize<T> for Result<T, E>
where
    E: Into<anyhow::Error>,
{
    fn category(self, category: Category) -> CliResult<T> {
        self.map_err(|e| CliError {
            category,
            error: e.into(),
        })
    }

    fn category_with<C: fmt::Display>(self, category: Category, context: impl FnOnce() -> C) -> CliResult<T> {
        self.map_err(|e| CliError {
            category,
            error: e.into().context(context().to_string()),
        })
    }
}
