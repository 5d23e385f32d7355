use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("{what} must be non-negative, got {value} h")]
    NegativeHours { what: &'static str, value: f64 },
    #[error("a visit needs at least one answer")]
    NoAnswers,
    #[error("utility has no interior peak unless beta1 > 0 (got {beta1})")]
    NotConcave { beta1: f64 },
}

/// One record that failed a structural check.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("question {question_id}: answer at {answer} h precedes posting at {posted} h")]
    AnswerBeforePosting { question_id: String, answer: f64, posted: f64 },
    #[error("question {question_id}: answer times not strictly ascending ({previous} h then {next} h)")]
    AnswersNotAscending { question_id: String, previous: f64, next: f64 },
    #[error("question {question_id}: closed at {closed} h before its first answer")]
    CloseBeforeFirstAnswer { question_id: String, closed: f64 },
    #[error("question {question_id}: closed at {closed} h without any answer")]
    CloseWithoutAnswers { question_id: String, closed: f64 },
    #[error("question {question_id}: marked closed by asker but has no close time")]
    MissingCloseTime { question_id: String },
    #[error("question {question_id}: no posting event")]
    MissingPosting { question_id: String },
    #[error("question {question_id}: duplicate {what}")]
    Duplicate { question_id: String, what: &'static str },
}

impl RecordError {
    pub fn question_id(&self) -> &str {
        match self {
            RecordError::AnswerBeforePosting { question_id, .. }
            | RecordError::AnswersNotAscending { question_id, .. }
            | RecordError::CloseBeforeFirstAnswer { question_id, .. }
            | RecordError::CloseWithoutAnswers { question_id, .. }
            | RecordError::MissingCloseTime { question_id }
            | RecordError::MissingPosting { question_id }
            | RecordError::Duplicate { question_id, .. } => question_id,
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("{} invalid record(s); first: {}", .0.len(), .0[0])]
    InvalidRecords(Vec<RecordError>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpandError {
    #[error("question {question_id}: no answers, cannot be closed")]
    NoAnswers { question_id: String },
    #[error("question {question_id}: not closed")]
    NotClosed { question_id: String },
    #[error("question {question_id}: closed at {closed} h before its last answer at {last_answer} h")]
    CloseBeforeLastAnswer { question_id: String, closed: f64, last_answer: f64 },
    #[error("visit interval must be positive and finite, got {0}")]
    BadInterval(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("no observations")]
    Empty,
    #[error("all {n} observations share the same outcome")]
    SingleOutcome { n: usize },
    #[error("non-finite covariate in observation {index}")]
    NonFiniteCovariate { index: usize },
    #[error("logit fit did not converge after {iterations} iterations: {reason}")]
    NonConvergence { iterations: usize, reason: String },
    #[error("need at least {needed} values, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("{0} is constant")]
    Constant(&'static str),
    #[error("sample {index} is not positive ({value})")]
    NonPositive { index: usize, value: f64 },
    #[error("samples have zero dispersion")]
    ZeroDispersion,
    #[error("only {distinct} distinct values in tail range [{lo}, {hi}], need 5")]
    InsufficientTail { distinct: usize, lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("value iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("threshold {direction} grid: continuation never changes sign")]
    OutsideGrid { direction: GridSide },
    #[error("continuation changes sign {0} times, expected exactly once")]
    MultipleCrossings(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSide {
    Below,
    Above,
}

impl std::fmt::Display for GridSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GridSide::Below => "below",
            GridSide::Above => "above",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error("invalid scenario: {0}")]
    Scenario(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
