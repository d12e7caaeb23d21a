//! Scalar special functions: Γ, Pochhammer, Bessel and Jacobi kernels,
//! the c-function and Kostant factors.

mod bessel;
mod gamma;
mod jacobi;

pub use bessel::bessel_psi;
pub(crate) use bessel::psi_unchecked;
pub use gamma::{gamma, gamma_sign, ln_gamma, log_gamma, pochhammer, pochhammer_real};
pub use jacobi::{
    c_function, c_function_inv_sq, jacobi_phi, jacobi_weight, kostant_q, plancherel_density, CInvSq, CosineRule,
    JacobiParams, JacobiPhi, PhiTable,
};

/// Complex scalar used for iλ arguments.
pub type ComplexScalar = num_complex::Complex64;
