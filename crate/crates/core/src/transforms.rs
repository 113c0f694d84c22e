//! The spherical section transform `U_z`, its factorization
//! `U_z = N_z F M_z` through the Funk-Radon transform `F`, the reflection
//! symmetrizer whose range is the injectivity class `H_z`, and the inverse
//! of `U_z` on bandlimited data.
//!
//! Operators acting on functions take and return closures
//! `Fn(&UnitVector) -> f64`; the `*_grid` variants work on sampled data and
//! interpolate through a truncated Laplace series.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::GridFunction;
use crate::geometry::{g_inv, g_map, h_map, r_map, reflection_weight, ShiftParameter, UnitVector};
use crate::harmonic::{
    analyze, funk_eigenvalue, project_onto_basis, sobolev_norm, HarmonicCoeffs, SobolevIndex,
};
use crate::quadrature::{mean_over_subsphere, SphereGrid, SubsphereResolution};

/// Largest admissible odd-degree energy fraction of data in the range of `F`.
pub const RANGE_TOLERANCE: f64 = 1e-6;

/// Eigenvalues smaller than this are treated as zero by the inverse.
const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Selects `M_z` or `M_{-z}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunkDirection {
    Forward,
    Inverse,
}

/// How `F` is evaluated inside the factored transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FunkRoute {
    /// Great-subsphere quadrature (`U_0`) of the callable `M_z f`.
    #[default]
    Quadrature,
    /// Analyze `M_z f` on the grid, scale by `lambda_n`, synthesize.
    Spectral,
}

/// Weight of `M_z`: `(sqrt(1 - z^2) / (1 + z xi_d))^{d-2}`.
pub fn m_weight(xi: &UnitVector, z: ShiftParameter) -> f64 {
    let z = z.value();
    ((1.0 - z * z).sqrt() / (1.0 + z * xi.last())).powi(xi.dim() as i32 - 2)
}

/// Weight of `N_z`: `(1 - z^2 xi_d^2)^{-(d-2)/2}`.
pub fn n_weight(xi: &UnitVector, z: ShiftParameter) -> f64 {
    let z = z.value();
    (1.0 - z * z * xi.last() * xi.last()).powf(-(xi.dim() as f64 - 2.0) / 2.0)
}

/// Weight of `N_z^{-1}`: `((1 - z^2) / (1 - z^2 + z^2 eta_d^2))^{(d-2)/2}`.
pub fn n_inv_weight(eta: &UnitVector, z: ShiftParameter) -> f64 {
    let z2 = z.value() * z.value();
    ((1.0 - z2) / (1.0 - z2 + z2 * eta.last() * eta.last())).powf((eta.dim() as f64 - 2.0) / 2.0)
}

/// Jacobian of `g_z` on the sphere: `g_z^*(dS) = sqrt(1 - z^2) (1 - z^2 xi_d^2)^{-d/2} dS`.
fn g_jacobian(xi: &UnitVector, z: ShiftParameter) -> f64 {
    let z = z.value();
    (1.0 - z * z).sqrt() * (1.0 - z * z * xi.last() * xi.last()).powf(-(xi.dim() as f64) / 2.0)
}

/// `(M_z f)(xi) = (sqrt(1-z^2)/(1+z xi_d))^{d-2} f(h_z(xi))`; `Sign::Minus` gives `M_{-z} = M_z^{-1}`.
pub fn apply_m<F>(f: F, z: ShiftParameter, sign: Sign) -> impl Fn(&UnitVector) -> f64 + Sync
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let z = match sign {
        Sign::Plus => z,
        Sign::Minus => z.negated(),
    };
    move |xi| m_weight(xi, z) * f(&h_map(xi, z))
}

/// `(N_z f)(xi) = (1 - z^2 xi_d^2)^{-(d-2)/2} f(g_z(xi))`.
pub fn apply_n<F>(f: F, z: ShiftParameter) -> Result<impl Fn(&UnitVector) -> f64 + Sync>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let z = z.require_nonnegative()?;
    Ok(move |xi: &UnitVector| n_weight(xi, z) * f(&g_map(xi, z)))
}

/// `(N_z^{-1} f)(eta) = ((1-z^2)/(1-z^2+z^2 eta_d^2))^{(d-2)/2} f(g_z^{-1}(eta))`.
pub fn apply_n_inv<F>(f: F, z: ShiftParameter) -> Result<impl Fn(&UnitVector) -> f64 + Sync>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let z = z.require_nonnegative()?;
    Ok(move |eta: &UnitVector| n_inv_weight(eta, z) * f(&g_inv(eta, z)))
}

/// `(S f)(omega) = (f(omega) + W_z(omega) f(r_z(omega))) / 2`, the projector
/// onto functions satisfying the reflection symmetry. `U_z (f - S f) = 0`.
pub fn symmetrize_z<F>(f: F, z: ShiftParameter) -> Result<impl Fn(&UnitVector) -> f64 + Sync>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let z = z.require_nonnegative()?;
    Ok(move |w: &UnitVector| {
        let reflected = r_map(w, z).expect("z checked nonnegative");
        0.5 * (f(w) + reflection_weight(w, z) * f(&reflected))
    })
}

/// Degree-`bandlimit` interpolant of sampled data.
pub fn interpolant(f: &GridFunction, bandlimit: usize) -> Result<HarmonicCoeffs> {
    analyze(f, bandlimit)
}

pub fn apply_m_grid(
    f: &GridFunction,
    z: ShiftParameter,
    sign: Sign,
    bandlimit: usize,
) -> Result<GridFunction> {
    let c = interpolant(f, bandlimit)?;
    Ok(GridFunction::sample(
        f.grid().clone(),
        apply_m(c.evaluator(), z, sign),
    ))
}

pub fn apply_n_grid(f: &GridFunction, z: ShiftParameter, bandlimit: usize) -> Result<GridFunction> {
    let c = interpolant(f, bandlimit)?;
    let out = GridFunction::sample(f.grid().clone(), apply_n(c.evaluator(), z)?);
    Ok(out)
}

pub fn apply_n_inv_grid(
    f: &GridFunction,
    z: ShiftParameter,
    bandlimit: usize,
) -> Result<GridFunction> {
    let c = interpolant(f, bandlimit)?;
    let out = GridFunction::sample(f.grid().clone(), apply_n_inv(c.evaluator(), z)?);
    Ok(out)
}

pub fn symmetrize_z_grid(
    f: &GridFunction,
    z: ShiftParameter,
    bandlimit: usize,
) -> Result<GridFunction> {
    let c = interpolant(f, bandlimit)?;
    let out = GridFunction::sample(f.grid().clone(), symmetrize_z(c.evaluator(), z)?);
    Ok(out)
}

/// Parameters shared by the forward and inverse transforms.
#[derive(Debug, Clone)]
pub struct OperatorConfig {
    pub z: ShiftParameter,
    pub grid: Arc<SphereGrid>,
    pub subsphere: SubsphereResolution,
    pub bandlimit: usize,
    /// Odd-energy threshold of the range check in the inverse.
    pub range_tolerance: f64,
    pub funk_route: FunkRoute,
}

impl OperatorConfig {
    /// `m` is the subsphere resolution knob of [`SubsphereResolution::from_m`].
    pub fn new(z: f64, grid: Arc<SphereGrid>, m: usize, bandlimit: usize) -> Result<Self> {
        let z = ShiftParameter::nonnegative(z)?;
        let subsphere = SubsphereResolution::from_m(grid.dim(), m)?;
        let cfg = Self {
            z,
            grid,
            subsphere,
            bandlimit,
            range_tolerance: RANGE_TOLERANCE,
            funk_route: FunkRoute::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Like [`Self::new`] with the subsphere rule from
    /// [`SubsphereResolution::adapted`].
    pub fn adapted(z: f64, grid: Arc<SphereGrid>, bandlimit: usize) -> Result<Self> {
        let res = SubsphereResolution::adapted(grid.dim(), z, bandlimit)?;
        let m = match res {
            SubsphereResolution::Circle(m) => m,
            SubsphereResolution::Sphere { lon, .. } => lon,
        };
        Self::new(z, grid, m, bandlimit)
    }

    pub fn with_route(mut self, route: FunkRoute) -> Self {
        self.funk_route = route;
        self
    }

    pub fn with_subsphere(mut self, res: SubsphereResolution) -> Result<Self> {
        self.subsphere = res;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.z.require_nonnegative()?;
        if self.subsphere.exact_degree() < 2 * self.bandlimit + 1 {
            return Err(Error::Resolution(format!(
                "subsphere rule {:?} must resolve degree {} (m >= 2N + 2)",
                self.subsphere,
                2 * self.bandlimit + 1
            )));
        }
        if 2 * self.bandlimit > self.grid.exact_degree() {
            return Err(Error::Resolution(format!(
                "grid {:?} does not resolve degree {}",
                self.grid.resolution(),
                2 * self.bandlimit
            )));
        }
        Ok(())
    }
}

/// `(U_z f)(xi_i)`: mean of `f` over `C_z^{xi_i}` at every grid node.
pub fn spherical_transform_direct<F>(f: F, cfg: &OperatorConfig) -> Result<GridFunction>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let (z, res) = (cfg.z, cfg.subsphere);
    GridFunction::try_sample(cfg.grid.clone(), |xi| mean_over_subsphere(&f, xi, z, res))
}

/// `N_z F M_z f` at every grid node.
pub fn spherical_transform_factored<F>(f: F, cfg: &OperatorConfig) -> Result<GridFunction>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let z = cfg.z.require_nonnegative()?;
    let mf = apply_m(f, z, Sign::Plus);
    match cfg.funk_route {
        FunkRoute::Quadrature => {
            let great = ShiftParameter::new(0.0)?;
            let res = cfg.subsphere;
            let funk = |eta: &UnitVector| mean_over_subsphere(&mf, eta, great, res);
            GridFunction::try_sample(cfg.grid.clone(), |xi| {
                Ok(n_weight(xi, z) * funk(&g_map(xi, z))?)
            })
        }
        FunkRoute::Spectral => {
            let sampled = GridFunction::sample(cfg.grid.clone(), &mf);
            let c = analyze(&sampled, cfg.grid.max_bandlimit())?;
            let fc = funk_spectral(&c, FunkDirection::Forward)?;
            let out = GridFunction::sample(cfg.grid.clone(), apply_n(fc.evaluator(), z)?);
            Ok(out)
        }
    }
}

/// Funk-Radon transform on coefficients. The inverse requires data in the
/// range of `F` (odd-degree energy fraction at most [`RANGE_TOLERANCE`]) and
/// zeroes the odd blocks.
pub fn funk_spectral(c: &HarmonicCoeffs, direction: FunkDirection) -> Result<HarmonicCoeffs> {
    match direction {
        FunkDirection::Forward => {
            let mut out = c.clone();
            out.scale_blocks(|n| funk_eigenvalue(n, c.dim()));
            Ok(out)
        }
        FunkDirection::Inverse => funk_spectral_inverse(c, RANGE_TOLERANCE),
    }
}

pub fn funk_spectral_inverse(c: &HarmonicCoeffs, range_tolerance: f64) -> Result<HarmonicCoeffs> {
    let fraction = c.odd_energy_fraction();
    if fraction > range_tolerance {
        return Err(Error::NotInRange {
            fraction,
            threshold: range_tolerance,
        });
    }
    let d = c.dim();
    for n in (0..=c.bandlimit()).step_by(2) {
        let lambda = funk_eigenvalue(n, d);
        if lambda.abs() < EIGENVALUE_FLOOR {
            return Err(Error::Conditioning {
                degree: n,
                value: lambda,
            });
        }
    }
    let mut out = c.clone();
    out.scale_blocks(|n| {
        if n % 2 == 1 {
            0.0
        } else {
            1.0 / funk_eigenvalue(n, d)
        }
    });
    Ok(out)
}

/// Coefficients of `N_z^{-1} g` from samples of `g` on the grid.
///
/// The samples are used directly through the substitution `eta = g_z(xi)`,
/// so no interpolation of `g` is involved.
pub fn pulled_back_coeffs(
    g: &GridFunction,
    z: ShiftParameter,
    bandlimit: usize,
) -> Result<HarmonicCoeffs> {
    let z = z.require_nonnegative()?;
    let grid = g.grid();
    if 2 * bandlimit > grid.exact_degree() {
        return Err(Error::Resolution(format!(
            "grid {:?} does not resolve degree {}",
            grid.resolution(),
            2 * bandlimit
        )));
    }
    let points: Vec<UnitVector> = grid.nodes().iter().map(|xi| g_map(xi, z)).collect();
    let weighted: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(g.values())
        .map(|((xi, w), v)| w * v / n_weight(xi, z) * g_jacobian(xi, z))
        .collect();
    project_onto_basis(grid.dim(), bandlimit, &points, &weighted)
}

/// `M_{-z} F^{-1} N_z^{-1} g`, the preimage of `g` under `U_z` in the
/// reflection-symmetric class, sampled on the grid of `g`.
pub fn inverse_spherical_transform(g: &GridFunction, cfg: &OperatorConfig) -> Result<GridFunction> {
    if g.dim() != cfg.grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.grid.dim(),
            found: g.dim(),
        });
    }
    let pulled = pulled_back_coeffs(g, cfg.z, cfg.bandlimit)?;
    let k = funk_spectral_inverse(&pulled, cfg.range_tolerance)?;
    Ok(GridFunction::sample(
        g.grid().clone(),
        apply_m(k.evaluator(), cfg.z, Sign::Minus),
    ))
}

/// `||U_z f||_{H^{s+(d-2)/2}} / ||f||_{H^s}`. `f` is analyzed at
/// `cfg.bandlimit`, `U_z f` at the largest bandlimit the grid resolves.
pub fn sobolev_gain<F>(f: F, cfg: &OperatorConfig, s: SobolevIndex) -> Result<f64>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let d = cfg.grid.dim();
    let sampled = GridFunction::sample(cfg.grid.clone(), &f);
    let denom = sobolev_norm(&analyze(&sampled, cfg.bandlimit)?, s);
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let image = spherical_transform_direct(&f, cfg)?;
    let shifted = SobolevIndex::new(s.value() + (d as f64 - 2.0) / 2.0)?;
    let numer = sobolev_norm(&analyze(&image, cfg.grid.max_bandlimit())?, shifted);
    Ok(numer / denom)
}
