use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("t = {t} with step {h} leaves the domain [0, {domain_end}]")]
    OutOfDomain { t: f64, h: f64, domain_end: f64 },

    #[error("pole at t = {pole} inside [{start}, {end}]")]
    PoleInRange { pole: f64, start: f64, end: f64 },

    #[error("map is not completely positive at t = {t}: k{index} = {value:e}")]
    NotCp { t: f64, index: usize, value: f64 },

    #[error("window t* = {t_star} +/- {delta} straddles the pole at {pole}")]
    IllConditionedWindow { t_star: f64, delta: f64, pole: f64 },

    #[error("intermediate map undefined: lambda{index}({t}) = {value:e}")]
    UndefinedIntermediateMap { t: f64, index: usize, value: f64 },

    #[error("invalid mixing weights: {0}")]
    InvalidWeights(String),

    #[error("invalid decoherence function: {0}")]
    InvalidDecoherence(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("lemma violation in trial {trial}: lambda{index}({t}) = {value:e}")]
    LemmaViolation {
        trial: usize,
        index: usize,
        t: f64,
        value: f64,
    },

    #[error("lemma bound violated in trial {trial}: lambda{index}({t}) = {value} <= {bound}")]
    LemmaBoundViolation {
        trial: usize,
        index: usize,
        t: f64,
        value: f64,
        bound: f64,
    },
}
