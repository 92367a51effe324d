use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is out of range: expected {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The annulus momentum L is imaginary; the squeezed solution then uses
    /// modified instead of ordinary Bessel functions, which is not supported.
    #[error("effective momentum L is not real at eps = {eps}: need eps < {threshold}")]
    ComplexRegime { eps: f64, threshold: f64 },

    #[error("no sign change of the dispersion relation near a = {near}")]
    NoRoot { near: f64 },

    #[error("matching matrix is not singular: smallest/largest singular value = {ratio:.3e}")]
    NotARoot { ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "a finite positive number",
        })
    }
}
