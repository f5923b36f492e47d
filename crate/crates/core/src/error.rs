use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside its domain: {reason}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("mean-field continuation failed; last converged drive power {last_power:e} W")]
    ContinuationFailure { last_power: f64 },

    #[error("drift matrix is unstable: eigenvalue {eigenvalue} has non-negative real part")]
    Unstable { eigenvalue: Complex64 },

    #[error("adiabatic elimination is singular: Delta_1^2 + (kappa_1/2)^2 = 0")]
    SingularElimination,

    #[error("inverted mechanical potential: 1 + 4 Lambda'/omega_m = {argument} <= 0")]
    InvertedPotential { argument: f64 },

    #[error("Liouvillian needs an estimated {estimated_nnz} nonzeros, budget is {budget}")]
    Capacity { estimated_nnz: usize, budget: usize },

    #[error("steady state is not unique or not reachable: {0}")]
    DegenerateSteadyState(String),

    #[error("numerics: {0}")]
    Numerics(String),

    #[error("mode index {index} out of range for a {modes}-mode state")]
    IndexOutOfRange { index: usize, modes: usize },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::ParameterDomain {
            name,
            value,
            reason,
        }
    }
}
