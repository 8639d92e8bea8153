//! Error taxonomy shared by every layer of the crate.
//!
//! The split mirrors how failures are surfaced to a caller:
//! bad input data, an inconsistent configuration, a numerical
//! breakdown (with the offending point when known), a mathematical
//! domain violation, and an unsatisfied closed-form condition.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed caller data: dimension mismatches, empty corpora, bad grids.
    #[error("input error: {0}")]
    Input(String),

    /// Structurally inconsistent setup, e.g. a gauge paired with a group
    /// it is not homogeneous on, or an unusable exponent combination.
    #[error("configuration error: {0}")]
    Config(String),

    /// Quadrature or iteration failure. Carries the evaluation point when
    /// the failure is a non-finite integrand value.
    #[error("numeric error: {msg}{}", fmt_point(.point))]
    Numeric { msg: String, point: Option<Vec<f64>> },

    /// A quantity left its mathematical domain (zero or divergent ball
    /// average, negative measure, ...). Names the offending location.
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed form was requested outside its validity conditions.
    /// Names the violated condition.
    #[error("condition not satisfied: {0}")]
    Condition(String),
}

fn fmt_point(p: &Option<Vec<f64>>) -> String {
    match p {
        Some(x) => format!(" at point {x:?}"),
        None => String::new(),
    }
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric { msg: msg.into(), point: None }
    }
    pub fn numeric_at(msg: impl Into<String>, point: &[f64]) -> Self {
        Error::Numeric { msg: msg.into(), point: Some(point.to_vec()) }
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn condition(msg: impl Into<String>) -> Self {
        Error::Condition(msg.into())
    }
}
