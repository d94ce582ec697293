use thiserror::Error;

/// Errors raised when model inputs violate their domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field} must be {constraint}, got {value}")]
    Domain {
        field: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("{field} needs {expected} entries, got {actual}")]
    Length {
        field: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{0}")]
    Invalid(String),

    #[error("component `{name}`: {source}")]
    Component {
        name: String,
        #[source]
        source: Box<ModelError>,
    },
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn domain(field: &'static str, constraint: &'static str, value: f64) -> ModelError {
    ModelError::Domain {
        field,
        constraint,
        value,
    }
}

/// Rejects NaN, negative, and (optionally) infinite values.
pub(crate) fn nonnegative(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(domain(field, "finite and >= 0", value))
    }
}

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(domain(field, "finite and > 0", value))
    }
}

pub(crate) fn unit_interval(field: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(domain(field, "in [0, 1]", value))
    }
}
