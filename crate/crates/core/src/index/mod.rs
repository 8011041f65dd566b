//! Spectral and index computations: ω-nullities, Krein signatures,
//! normal forms of monodromies, Hill discretizations with their Morse
//! indices, splitting-number indices, half-period degeneracy indicators,
//! Fourier kernels and quadratic forms.

pub mod forms;
pub mod hill;
pub mod indicators;
pub mod kernel;
pub mod normal_form;

pub use forms::{
    crossing_test_curve, eccentricity_derivative_form, family_lambda_derivatives, family_lambdas,
    half_frequency_kernel, parameter_derivative_form, potential_form, quadratic_form,
    tangent_oracle, TangentOracle, TrigCurve, TrigTerm,
};
pub use hill::{
    circular_index, hill_matrix, hill_of, morse_index, omega_index, HillOperator, Inertia,
    OmegaIndex, DEFAULT_HILL_N, KERNEL_EPS,
};
pub use indicators::{
    class_indicator, half_period_indicators, HalfPeriodIndicators, SymmetryClass,
};
pub use kernel::{kernel_fourier_solution, KernelSolution};
pub use normal_form::{
    classify_normal_form, d_omega, index_via_splitting, krein_signature, nu_omega,
    nu_omega_with_tol, KreinSignature, NormalForm, NormalFormTag, PairKind, Verdict,
};
