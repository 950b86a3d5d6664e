use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("derivative order {order} is not available for {what}")]
    InvalidOrder { what: &'static str, order: u8 },

    #[error("coordinate {coordinate} = {value} is outside the valid range")]
    Domain { coordinate: &'static str, value: f64 },

    #[error("formula pole at {coordinate} = {value}")]
    Pole { coordinate: &'static str, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: &'static str },

    #[error("metric matrix is ill-conditioned (condition estimate {0:e})")]
    Conditioning(f64),

    #[error("resolution {resolution} is too coarse: {reason}")]
    Resolution { resolution: usize, reason: &'static str },

    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: usize, to: usize },

    #[error("root bracket failed while solving {0}")]
    Bracket(&'static str),

    #[error("insufficient range: {0}")]
    Range(&'static str),

    #[error("configuration mismatch: {0}")]
    Configuration(&'static str),
}
