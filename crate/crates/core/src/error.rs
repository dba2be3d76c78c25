use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("lasso period must be nonempty")]
    EmptyPeriod,

    #[error("letter '{0}' is not in the input alphabet")]
    UnknownLetter(char),

    #[error("invalid automaton: {}", .0.join("; "))]
    InvalidAutomaton(Vec<String>),

    /// `line` is 1-based; 0 marks a problem with the file as a whole.
    #[error("{}", parse_message(*line, message))]
    Parse { line: usize, message: String },
}

fn parse_message(line: usize, message: &str) -> String {
    if line == 0 {
        message.to_string()
    } else {
        format!("line {line}: {message}")
    }
}
