use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("order undefined: {0}")]
    UndefinedOrder(String),

    #[error("macro step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite values after step {step}")]
    Blowup { step: usize },

    #[error("time budget of {budget:.1} s exceeded after {step} macro steps")]
    Timeout { step: usize, budget: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ (Error::Step { .. } | Error::Timeout { .. } | Error::Blowup { .. }) => e,
            e => Error::Step {
                step,
                source: Box::new(e),
            },
        }
    }
}
