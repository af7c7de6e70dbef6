//! Numeric tolerances shared across the engine.

/// Tolerance constants in one place so that checks agree module to module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Maximum deviation of `U^dagger U` from the identity.
    pub unitarity: f64,
    /// Maximum deviation of a state norm from 1.
    pub norm: f64,
    /// Largest imaginary part tolerated for a Hermitian expectation.
    pub hermitian_imag: f64,
    /// Row-sum tolerance of readout confusion matrices.
    pub stochastic_row: f64,
    /// Sum tolerance of probability vectors handed to readout noise.
    pub distribution: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    unitarity: 1e-10,
    norm: 1e-10,
    hermitian_imag: 1e-10,
    stochastic_row: 1e-12,
    distribution: 1e-9,
};

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 12;

/// Largest register accepted by dense diagonalization.
pub const MAX_DIAG_QUBITS: usize = 10;

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}
