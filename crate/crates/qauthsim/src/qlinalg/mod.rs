//! Dense complex linear algebra with named-register tensor bookkeeping.
//!
//! Everything downstream (schemes, adversaries, security games) is built on
//! these types. All values are immutable after construction; random sampling
//! takes an explicit seeded source so parallel runs stay reproducible.

pub mod apply;
pub mod channel;
pub mod gates;
pub mod haar;
pub mod linmap;
pub mod norms;
pub mod register;
pub mod schmidt;
pub mod state;

pub use channel::{embed_on, Channel, ChannelRepr};
pub use gates::{
    copy_map, hadamard_all, hadamard_map, maximally_entangled, pauli_operator, pauli_x_map,
    pauli_z_map, permutation_map, plus_state, swap_map,
};
pub use haar::{haar_fourth_moment, haar_random_unitary, haar_second_moment};
pub use linmap::{basis_vector, outer, LinearMap, EXACT_TOL};
pub use norms::{frobenius_norm, hermitian_eigenvalues, operator_norm, trace_distance, trace_norm};
pub use register::{Register, RegisterSpace};
pub use schmidt::{schmidt_decomposition, SchmidtDecomposition};
pub use state::{QuantumState, StateData};

pub type Cx = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<Cx>;
pub type CVector = nalgebra::DVector<Cx>;

/// Tolerance for composed numerical pipelines (exact identities use
/// [`EXACT_TOL`]).
pub const PIPELINE_TOL: f64 = 1e-8;
