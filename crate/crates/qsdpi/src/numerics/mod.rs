//! Dense complex linear algebra: matrices, Hermitian spectra, matrix functions,
//! tensor operations and superoperator matrices.

pub mod eig;
pub mod expm;
pub mod funcs;
pub mod linalg;
pub mod matrix;
pub mod superop;
pub mod tensor;

pub use eig::{eigh, eigvalsh, HermitianEig};
pub use expm::expm;
pub use funcs::{
    apply_on_eig, clip_threshold, hermitian_matrix_function, logm_support, operator_norm,
    pinv_hermitian, powm_support, schatten_norm, schatten_norm_hermitian, sqrtm_psd, trace_norm,
    trace_norm_hermitian, ZeroPolicy, DEFAULT_CLIP_REL,
};
pub use linalg::{
    cholesky, eigenvalues_general, inverse, lower_triangular_inverse, solve_real_spd,
    spectral_radius,
};
pub use matrix::ComplexMatrix;
pub use superop::{
    apply_superop, superop_from_fn, superop_from_kraus, superop_tensor, superop_two_two_norm,
};
pub use tensor::{kron_all, partial_trace, permute_subsystems};
