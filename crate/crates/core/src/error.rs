use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular time: the map is undefined at t = {t}")]
    SingularTime { t: f64 },

    #[error("gamma*t + delta = {denominator} at t = {t}; only the orientation-preserving branch (> 0) is supported")]
    Orientation { t: f64, denominator: f64 },

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("polytropic exponent {gamma0} is not the symmetric value {expected} for n = {n}")]
    NonSymmetricExponent { gamma0: f64, n: usize, expected: f64 },

    #[error("current family {family} is not defined for n = {n}")]
    UnsupportedFamily { family: String, n: usize },

    #[error("vacuum forms between the Riemann states (pressure positivity condition violated)")]
    Vacuum,

    #[error("source field does not cover the preimage: required window x in [{x_min}, {x_max}], t in [{t_min}, {t_max}]")]
    Coverage {
        x_min: f64,
        x_max: f64,
        t_min: f64,
        t_max: f64,
    },

    #[error("cell {cell} of step {step} lies inside discontinuity zone {zone}")]
    InsideDiscontinuity { cell: usize, step: usize, zone: usize },

    #[error("numerical abort at t = {t}, cell {cell}: {detail}")]
    NumericalAbort { t: f64, cell: usize, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
