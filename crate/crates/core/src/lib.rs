//! Regular matrix pencils and singular (descriptor) discrete-time systems.
//!
//! * [`pencil`]: regularity, determinant polynomial, eigenstructure and the
//!   Weierstrass canonical form of `sF - G`.
//! * [`descriptor`]: general and initial-value solutions of
//!   `F Y(k+1) = G Y(k) + V(k)` through the canonical form.
//! * [`samuelson`]: the multiplier-accelerator model written as a descriptor
//!   system, with an independent recursion oracle and closed-form solution.
//! * [`cli`]: scenario configuration and the `dpencil` command-line front end.

pub mod cli;
pub mod descriptor;
pub mod error;
pub mod linalg;
pub mod pencil;
pub mod samuelson;

pub use descriptor::{
    check_consistency, forced_term, solve_general, solve_ivp, ConsistencyReport, DescriptorSystem,
    ForcedTerm, InitialCondition, InputSequence, Trajectory,
};
pub use error::{ModelError, PencilError, SolverError};
pub use pencil::{
    eigenstructure, is_regular, pencil_det_poly, weierstrass_decompose, DetPolynomial,
    EigenStructure, FiniteEigenvalue, MatrixPencil, RegularityVerdict, WeierstrassForm,
};
pub use samuelson::{EconomicState, GovernmentExpenditure, SamuelsonParams};
