use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-physical state: eigenvalue {value:.3e} below zero")]
    NonPhysical { value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("probability vector not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    /// The Wei–Norman angles hit `cos(α2) ≈ 0` where the product form breaks down.
    #[error("Wei–Norman singularity at t = {t:.6}: |cos α2| = {cos_alpha2:.3e}")]
    Singularity { t: f64, cos_alpha2: f64 },

    #[error("ODE integration failed at t = {t:.6}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("no unique limit cycle: |μ| = {modulus:.12} lies within the uniqueness gap of 1")]
    NonUniqueLimitCycle { modulus: f64 },

    #[error("fixed-point system is numerically singular")]
    SingularSystem,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
