//! Operator-valued reproducing kernels, relative reproducing sections, and
//! compatible semi-inner products on `l^p` spaces.
//!
//! The crate has three layers:
//!
//! * **Kernels and spans** ([`kernels`], [`rkhs`]): declaratively specified
//!   operator-valued kernels `K(t, x)` with values in the `m x m` complex
//!   matrices, block Gram assembly with a positivity check, and finite
//!   spans `f = sum_j K(., x_j) c_j` with evaluation, inner products, and
//!   value interpolation.
//! * **Relative sections** ([`relative`]): differences of kernel sections
//!   `M(x, y) = K(., y) - K(., x)`, which pair against a function to
//!   produce `f(y) - f(x)`. They satisfy a cocycle identity, embed
//!   constructively into the ambient span space, and support least-squares
//!   fitting of prescribed differences up to an additive gauge.
//! * **Semi-inner products** ([`sip`]): the compatible semi-inner product
//!   on `l^p` for `1 < p < infinity`, its duality map into `l^q`, and a
//!   discrete model of Banach function spaces where point evaluation and
//!   point-difference evaluation are bounded maps with computable norms.
//!
//! [`verify`] bundles seeded, deterministic property suites over built-in
//! kernel families; [`io`] and [`model`] handle CSV constraint input and
//! fitted-model JSON files for the command-line front end.

pub mod base;
pub mod complexfmt;
pub mod error;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod model;
pub mod relative;
pub mod rkhs;
pub mod sip;
pub mod verify;

pub use base::{
    approx_eq_mat, approx_eq_real, approx_eq_scalar, approx_eq_vec, hermitian_part_distance, C64,
    OpMatrix, OutVector, Point, Tolerance,
};
pub use error::{Error, Result};
pub use kernels::{
    build_kernel, check_psd, common_dim, gram, section_apply, BaseKernel, Kernel, KernelSpec,
    OperatorKernel, PsdReport, Variant,
};
pub use model::{FittedModel, Gauge, ModelFile};
pub use relative::{
    anchor_offset, cocycle_defect, cocycle_probe_points, containment_residual, cross_inner,
    fit_differences, relative_adjoint, relative_apply, relative_gram, DifferenceConstraint,
    DifferenceFit, RelativeElement, RelativeSection,
};
pub use rkhs::{fit_values, inner_product, norm, RkhsElement, ValueConstraint, ValueFit};
pub use sip::{
    dual_norm_check, duality_map, lp_norm, relative_evaluation, sip, sip_axiom_report, zeta_bound,
    BanachFunctionSample, BanachSampleSpace, DualFunctional, DualNormCheck, HomogeneityForm,
    SipAxiomReport, SipSpace, SipVector,
};
pub use verify::{
    builtin_kernel_specs, run_verify, Fault, SuiteResult, VerifyConfig, VerifyReport,
};
