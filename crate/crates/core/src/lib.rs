//! Coupling-flow solver.
//!
//! Instead of diagonalizing `H(g) = H₀ + g·H_int` at every coupling, the
//! eigenvalues, the interaction matrix in the eigenbasis, and the
//! eigenvector overlaps are integrated as ODEs in `g`, starting from the
//! solvable point `g = 0`. Within an `N`-state truncation the flow is
//! exactly the continuous diagonalization of the truncated matrix.
//!
//! Modules, bottom up:
//! - [`basis`]: harmonic-oscillator matrix elements and Hermite functions
//! - [`flow`]: flow state and the right-hand side of the flow equations
//! - [`integrator`]: adaptive Dormand–Prince integration
//! - [`models`]: anharmonic oscillator and double-well flows, densities
//! - [`nonadiabatic`]: amplitudes in the adiabatic basis under a linear ramp
//! - [`oracle`]: independent Jacobi diagonalization of the same truncation

pub mod basis;
pub mod error;
pub mod flow;
pub mod integrator;
pub mod linalg;
pub mod models;
pub mod nonadiabatic;
pub mod oracle;
pub mod quadrature;
pub mod reference;

pub use basis::{harmonic_energies, hermite_function, x_power_matrix, BasisConfig};
pub use error::{Error, Result};
pub use flow::{flow_rhs, min_coupled_gap, FlowDerivative, FlowState, DEFAULT_GAP_FLOOR};
pub use integrator::{integrate, IntegratorConfig};
pub use linalg::{Matrix, SymMatrix};
pub use models::{
    aho_initial, dwp_initial, potential_curve, solve_aho, solve_dwp, wavefunction_density, Density,
    ModelKind, ModelSpec, Solution, SpectrumTable,
};
pub use nonadiabatic::{
    continue_ramp, evolve_ramp, nonadiabatic_rhs, NonadiabaticConfig, NonadiabaticState, RampTrajectory,
};
pub use oracle::{build_hamiltonian, jacobi_diagonalize, OracleResult};
