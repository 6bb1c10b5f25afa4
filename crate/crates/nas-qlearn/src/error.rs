use std::fmt;

/// Errors from MDP operations and the search loop.
#[derive(Debug)]
pub enum NasError {
    InvalidArgument(String),
    /// The reward evaluator failed while scoring an episode's network.
    EvaluatorFailed { episode: usize, message: String },
}

impl fmt::Display for NasError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NasError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            NasError::EvaluatorFailed { episode, message } => {
                write!(f, "evaluator failed at episode {episode}: {message}")
            }
        }
    }
}

impl std::error::Error for NasError {}
