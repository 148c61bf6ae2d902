use thiserror::Error;

/// Errors raised by the design, analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid design parameter `{name}` = {value}")]
    InvalidDesign { name: &'static str, value: f64 },

    #[error(
        "sum constellation is not uniquely factorable: pairs {first:?} and {second:?} \
         both give {value}"
    )]
    Collision {
        first: (usize, usize),
        second: (usize, usize),
        value: f64,
    },

    #[error("users are not ordered: beta1*P1 = {first} exceeds beta2*P2 = {second}")]
    Ordering { first: f64, second: f64 },

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("`{name}` outside its domain: {value}")]
    Domain { name: &'static str, value: f64 },

    #[error("constellation orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),

    #[error("numerical check failed: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
