//! Spherical section transforms on the unit sphere `S^{d-1}`.
//!
//! `U_z` maps a function to its means over the subspheres cut out by
//! hyperplanes through the interior point `z e_d`. For `z = 0` this is the
//! Funk-Radon transform `F`. The crate provides the exact geometry behind the
//! factorization `U_z = N_z F M_z`, quadrature to evaluate both sides, the
//! Laplace-series machinery to invert `F`, and the resulting inverse of `U_z`
//! on functions with the point-reflection symmetry about `z e_d`.

pub mod error;
pub mod function;
pub mod geometry;
pub mod harmonic;
pub mod quadrature;
pub mod samples;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use function::{integrate_sphere, GridFunction};
pub use geometry::{
    g_inv, g_map, h_inv, h_map, r_map, reflection_weight, sphere_measure, stereo, stereo_inv,
    subsphere, tangent_frame, ShiftParameter, Subsphere, TangentFrame, UnitVector,
};
pub use harmonic::{
    analyze, dim_harmonic, funk_eigenvalue, legendre, project_degree, sobolev_norm, synthesize,
    HarmonicBasis, HarmonicCoeffs, SobolevIndex,
};
pub use quadrature::{
    gauss_legendre, mean_over_subsphere, sphere_grid, subsphere_rule, SphereGrid,
    SubsphereResolution, SubsphereRule,
};
pub use samples::random_unit;
pub use transforms::{
    apply_m, apply_n, apply_n_inv, funk_spectral, inverse_spherical_transform, sobolev_gain,
    spherical_transform_direct, spherical_transform_factored, symmetrize_z, FunkDirection,
    FunkRoute, OperatorConfig, Sign,
};
pub use verify::{run_checks, CheckOutcome, Status, VerifyConfig};
