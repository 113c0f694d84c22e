//! Numerical checks of every closed-form identity: geometry of the maps,
//! operator inverses, the factorization of `U_z`, its nullspace, the
//! evenness of its range and the inversion on the symmetric class.
//!
//! Each check reports the worst residual it saw together with the threshold
//! it is held to.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::function::GridFunction;
use crate::geometry::{
    g_inv, g_map, h_inv, h_map, r_map, reflection_weight, stereo, stereo_inv, subsphere,
    tangent_frame, ShiftParameter, UnitVector,
};
use crate::harmonic::{funk_eigenvalue, HarmonicBasis};
use crate::quadrature::{mean_over_subsphere, sphere_grid, SubsphereResolution};
use crate::samples::{random_bandlimited, random_symmetric, random_unit};
use crate::transforms::{
    apply_m, apply_n, apply_n_inv, inverse_spherical_transform, spherical_transform_direct,
    spherical_transform_factored, symmetrize_z, OperatorConfig, Sign,
};

/// Largest `z` at which the transform checks run; beyond it the default
/// resolutions no longer resolve the subsphere integrals.
pub const TRANSFORM_Z_MAX: f64 = 0.9;

/// Step of the central differences in the pullback check.
pub const PULLBACK_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Skip => "skip",
        })
    }
}

/// Result of one check at one `(d, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub d: usize,
    /// `None` for checks that do not depend on `z`.
    pub z: Option<f64>,
    pub residual: f64,
    pub threshold: f64,
    pub status: Status,
}

impl CheckOutcome {
    fn new(check: &'static str, d: usize, z: Option<f64>, residual: f64, threshold: f64) -> Self {
        // NaN residuals fail
        let status = if residual <= threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            check,
            d,
            z,
            residual,
            threshold,
            status,
        }
    }

    fn skipped(check: &'static str, d: usize, z: Option<f64>, threshold: f64) -> Self {
        Self {
            check,
            d,
            z,
            residual: f64::NAN,
            threshold,
            status: Status::Skip,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub dims: Vec<usize>,
    pub zs: Vec<f64>,
    pub seed: u64,
    /// Overrides every default threshold.
    pub tol: Option<f64>,
    /// Random points per geometry check.
    pub samples: usize,
    /// Random functions per transform check.
    pub functions: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dims: vec![3, 4],
            zs: vec![0.0, 0.3, 0.7, 0.9],
            seed: 1,
            tol: None,
            samples: 200,
            functions: 2,
        }
    }
}

/// Runs all checks for every requested `d` and `z`.
pub fn run_checks(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for &d in &cfg.dims {
        if d != 3 && d != 4 {
            return Err(Error::UnsupportedDimension(d));
        }
        let tol = |default: f64| cfg.tol.unwrap_or(default);
        out.push(CheckOutcome::new(
            "funk_eigenvalues",
            d,
            None,
            eigenvalue_residual(d, 8)?,
            tol(1e-8),
        ));
        for &zv in &cfg.zs {
            let z = ShiftParameter::new(zv)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (d as u64) << 32 ^ zv.to_bits());
            out.extend(geometry_checks(d, z, cfg.samples, &mut rng, &tol));
            out.extend(transform_checks(d, z, cfg.seed, cfg.functions, &tol)?);
        }
    }
    Ok(out)
}

/// `max |D_i . D_j - delta_ij s^2| / s^2` for the central-difference
/// derivatives `D_i` of `h_z` along a tangent frame at `eta`, with
/// `s = sqrt(1 - z^2) / (1 + z eta_d)`.
pub fn pullback_residual(eta: &UnitVector, z: ShiftParameter, step: f64) -> f64 {
    let zv = z.value();
    let s = (1.0 - zv * zv).sqrt() / (1.0 + zv * eta.last());
    let frame = tangent_frame(eta);
    let along = |e: &[f64], t: f64| {
        let c: Vec<f64> = eta.coords().iter().zip(e).map(|(a, b)| a + t * b).collect();
        h_map(&UnitVector::new(&c).expect("near-unit point"), z)
    };
    let derivs: Vec<Vec<f64>> = frame
        .basis
        .iter()
        .map(|e| {
            let (p, m) = (along(e, step), along(e, -step));
            p.coords()
                .iter()
                .zip(m.coords())
                .map(|(a, b)| (a - b) / (2.0 * step))
                .collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, a) in derivs.iter().enumerate() {
        for (j, b) in derivs.iter().enumerate() {
            let g: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let expect = if i == j { s * s } else { 0.0 };
            worst = worst.max((g - expect).abs() / (s * s));
        }
    }
    worst
}

/// `|stereo(h_z xi) - sqrt((1 + z) / (1 - z)) stereo(xi)|`, relative to
/// `max(1, |rhs|)`. `None` if either point is at the pole.
pub fn stereo_scaling_residual(xi: &UnitVector, z: ShiftParameter) -> Option<f64> {
    let zv = z.value();
    let scale = ((1.0 + zv) / (1.0 - zv)).sqrt();
    let lhs = stereo(&h_map(xi, z)).ok()?;
    let rhs = stereo(xi).ok()?;
    let size = rhs
        .iter()
        .map(|v| (scale * v).powi(2))
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let diff = lhs
        .iter()
        .zip(&rhs)
        .fold(0.0f64, |m, (a, b)| m.max((a - scale * b).abs()));
    Some(diff / size)
}

/// The scaling identity pulled back to the sphere:
/// `|h_z(xi) - stereo_inv(sqrt((1 + z) / (1 - z)) stereo(xi))|`. Free of the
/// cancellation in `1 - h_z(xi)_d` that limits the planar form near `z = 1`.
pub fn stereo_sphere_residual(xi: &UnitVector, z: ShiftParameter) -> Option<f64> {
    let zv = z.value();
    let scale = ((1.0 + zv) / (1.0 - zv)).sqrt();
    let x: Vec<f64> = stereo(xi).ok()?.iter().map(|v| scale * v).collect();
    Some(stereo_inv(&x).ok()?.max_abs_diff(&h_map(xi, z)))
}

/// `| ||z xi_d xi - (z/2) e_d|| - z/2 |`.
pub fn center_residual(xi: &UnitVector, z: ShiftParameter) -> Result<f64> {
    let sub = subsphere(xi, z)?;
    let d = xi.dim();
    let half = z.value() / 2.0;
    let dist = sub
        .center
        .iter()
        .enumerate()
        .map(|(i, c)| if i == d - 1 { c - half } else { *c })
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    Ok((dist - half.abs()).abs())
}

/// Sine of the angle between `omega - z e_d` and `r_z(omega) - z e_d`.
pub fn collinearity_residual(omega: &UnitVector, z: ShiftParameter) -> Result<f64> {
    let r = r_map(omega, z)?;
    let d = omega.dim();
    let shift = |p: &UnitVector| -> Vec<f64> {
        let mut v = p.coords().to_vec();
        v[d - 1] -= z.value();
        v
    };
    let (a, b) = (shift(omega), shift(&r));
    let mut wedge = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            wedge += (a[i] * b[j] - a[j] * b[i]).powi(2);
        }
    }
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(wedge.sqrt() / (na * nb))
}

/// `|<h_z(p), xi> - z xi_d|` for a point `p` on the great subsphere normal to
/// `g_z(xi)`, built from `seed_point`.
pub fn subsphere_image_residual(
    xi: &UnitVector,
    seed_point: &UnitVector,
    z: ShiftParameter,
) -> f64 {
    let g = g_map(xi, z);
    let t = seed_point.dot(&g);
    let c: Vec<f64> = seed_point
        .coords()
        .iter()
        .zip(g.coords())
        .map(|(a, b)| a - t * b)
        .collect();
    let Ok(p) = UnitVector::new(&c) else {
        return 0.0;
    };
    (h_map(&p, z).dot(xi) - z.value() * xi.last()).abs()
}

/// Quadrature-derived Funk multipliers against `P_{n,d}(0)`, `n <= nmax`:
/// the transform of every degree-`n` basis function, evaluated at a few
/// points by great-subsphere quadrature, is fitted as a multiple of itself.
pub fn eigenvalue_residual(d: usize, nmax: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (n, lambda) in quadrature_eigenvalues(d, nmax)?.into_iter().enumerate() {
        worst = worst.max((lambda - funk_eigenvalue(n, d)).abs());
    }
    Ok(worst)
}

/// `lambda_{n,d}`, `n = 0..=nmax`, from great-subsphere quadrature of the
/// orthonormal basis, independent of the Legendre recurrence.
pub fn quadrature_eigenvalues(d: usize, nmax: usize) -> Result<Vec<f64>> {
    let basis = HarmonicBasis::new(d, nmax)?;
    let zero = ShiftParameter::new(0.0)?;
    let res = SubsphereResolution::from_m(d, 2 * nmax + 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let points: Vec<UnitVector> = (0..12).map(|_| random_unit(d, &mut rng)).collect();
    let values: Vec<Vec<f64>> = points.iter().map(|p| basis.eval(p)).collect();
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let (mut num, mut den) = (0.0, 0.0);
        for k in basis.offset(n)..basis.offset(n + 1) {
            let y = |p: &UnitVector| basis.eval(p)[k];
            for (p, v) in points.iter().zip(&values) {
                num += mean_over_subsphere(&y, p, zero, res)? * v[k];
                den += v[k] * v[k];
            }
        }
        out.push(num / den);
    }
    Ok(out)
}

fn geometry_checks(
    d: usize,
    z: ShiftParameter,
    samples: usize,
    rng: &mut ChaCha8Rng,
    tol: &impl Fn(f64) -> f64,
) -> Vec<CheckOutcome> {
    let zv = Some(z.value());
    let points: Vec<UnitVector> = (0..samples).map(|_| random_unit(d, rng)).collect();
    let others: Vec<UnitVector> = (0..samples).map(|_| random_unit(d, rng)).collect();
    let worst = |f: &dyn Fn(&UnitVector, &UnitVector) -> f64| {
        points
            .iter()
            .zip(&others)
            .fold(0.0f64, |m, (p, q)| m.max(f(p, q)))
    };

    let mut out = vec![
        CheckOutcome::new(
            "h_roundtrip",
            d,
            zv,
            worst(&|p, _| h_inv(&h_map(p, z), z).max_abs_diff(p)),
            tol(1e-12),
        ),
        CheckOutcome::new(
            "g_roundtrip",
            d,
            zv,
            worst(&|p, _| g_inv(&g_map(p, z), z).max_abs_diff(p)),
            tol(1e-12),
        ),
        CheckOutcome::new(
            "subsphere_image",
            d,
            zv,
            worst(&|p, q| subsphere_image_residual(p, q, z)),
            tol(1e-12),
        ),
        CheckOutcome::new(
            "stereo_scaling",
            d,
            zv,
            worst(&|p, _| stereo_sphere_residual(p, z).unwrap_or(0.0)),
            tol(1e-12),
        ),
        CheckOutcome::new(
            "pullback",
            d,
            zv,
            worst(&|p, _| pullback_residual(p, z, PULLBACK_STEP)),
            tol(1e-6),
        ),
    ];
    let probe = |p: &UnitVector| {
        let c = p.coords();
        1.0 + c[0] * c[d - 1] - 0.5 * c[1] + c[d - 1].powi(3)
    };
    out.push(CheckOutcome::new(
        "m_roundtrip",
        d,
        zv,
        worst(&|p, _| {
            let back = apply_m(apply_m(probe, z, Sign::Plus), z, Sign::Minus);
            (back(p) - probe(p)).abs()
        }),
        tol(1e-12),
    ));

    if z.value() < 0.0 {
        for check in [
            "center_sphere",
            "r_involution",
            "r_collinear",
            "w_reciprocity",
            "n_roundtrip",
            "s_idempotent",
        ] {
            out.push(CheckOutcome::skipped(check, d, zv, tol(1e-12)));
        }
        return out;
    }
    let r = |p: &UnitVector| r_map(p, z).expect("z >= 0");
    out.push(CheckOutcome::new(
        "center_sphere",
        d,
        zv,
        worst(&|p, _| center_residual(p, z).unwrap_or(f64::NAN)),
        tol(1e-12),
    ));
    out.push(CheckOutcome::new(
        "r_involution",
        d,
        zv,
        worst(&|p, _| r(&r(p)).max_abs_diff(p)),
        tol(1e-12),
    ));
    out.push(CheckOutcome::new(
        "r_collinear",
        d,
        zv,
        worst(&|p, _| collinearity_residual(p, z).unwrap_or(f64::NAN)),
        tol(1e-12),
    ));
    out.push(CheckOutcome::new(
        "w_reciprocity",
        d,
        zv,
        worst(&|p, _| (reflection_weight(p, z) * reflection_weight(&r(p), z) - 1.0).abs()),
        tol(1e-12),
    ));
    let n_back = apply_n_inv(apply_n(probe, z).expect("z >= 0"), z).expect("z >= 0");
    out.push(CheckOutcome::new(
        "n_roundtrip",
        d,
        zv,
        worst(&|p, _| (n_back(p) - probe(p)).abs() / probe(p).abs().max(1.0)),
        tol(1e-12),
    ));
    let s1 = symmetrize_z(probe, z).expect("z >= 0");
    let s2 = symmetrize_z(&s1, z).expect("z >= 0");
    out.push(CheckOutcome::new(
        "s_idempotent",
        d,
        zv,
        worst(&|p, _| (s2(p) - s1(p)).abs() / s1(p).abs().max(1.0)),
        tol(1e-12),
    ));
    out
}

fn transform_checks(
    d: usize,
    z: ShiftParameter,
    seed: u64,
    functions: u64,
    tol: &impl Fn(f64) -> f64,
) -> Result<Vec<CheckOutcome>> {
    let zv = Some(z.value());
    let (fact_tol, names) = match d {
        3 => (
            1e-8,
            &[
                "factorization",
                "nullspace",
                "symmetric_image",
                "evenness",
                "inversion",
            ][..],
        ),
        _ => (1e-6, &["factorization", "evenness"][..]),
    };
    let thresholds = |name: &str| match name {
        "factorization" => tol(fact_tol),
        "evenness" => tol(1e-10),
        "inversion" => tol(1e-6),
        _ => tol(1e-8),
    };
    if z.value() < 0.0 || z.value() > TRANSFORM_Z_MAX {
        return Ok(names
            .iter()
            .map(|n| CheckOutcome::skipped(n, d, zv, thresholds(n)))
            .collect());
    }

    let (grid, bandlimit) = match d {
        // the pulled-back quadrature of the inverse needs the finer grid near z = 1
        3 if z.value() <= 0.7 => (sphere_grid(3, 32, 32)?, 6),
        3 => (sphere_grid(3, 64, 64)?, 6),
        _ => (sphere_grid(4, 5, 10)?, 4),
    };
    let grid = Arc::new(grid);
    let cfg = OperatorConfig::adapted(z.value(), grid.clone(), bandlimit)?;
    let mut worst = [0.0f64; 5];
    for s in seed..seed + functions {
        let p = random_bandlimited(d, bandlimit, s)?;
        let f = p.evaluator();
        let direct = spherical_transform_direct(&f, &cfg)?;
        let factored = spherical_transform_factored(&f, &cfg)?;
        worst[0] = worst[0].max(direct.max_abs_diff(&factored));
        worst[3] = worst[3].max(antipodal_gap(&direct));
        if d == 3 {
            let sf = symmetrize_z(&f, cfg.z)?;
            let image = spherical_transform_direct(&sf, &cfg)?;
            // U_z (f - S f) by linearity of the rule
            worst[1] = worst[1].max(direct.max_abs_diff(&image));
            let anti = |w: &UnitVector| f(w) - sf(w);
            worst[2] = worst[2].max(spherical_transform_direct(anti, &cfg)?.max_abs());

            let sym = random_symmetric(d, z.value(), bandlimit, s)?;
            let fs = sym.evaluator();
            let g = spherical_transform_direct(&fs, &cfg)?;
            let back = inverse_spherical_transform(&g, &cfg)?;
            worst[4] = worst[4].max(back.max_abs_diff(&GridFunction::sample(grid.clone(), &fs)));
        }
    }
    let out = match d {
        3 => vec![
            CheckOutcome::new(
                "factorization",
                d,
                zv,
                worst[0],
                thresholds("factorization"),
            ),
            CheckOutcome::new("nullspace", d, zv, worst[2], thresholds("nullspace")),
            CheckOutcome::new(
                "symmetric_image",
                d,
                zv,
                worst[1],
                thresholds("symmetric_image"),
            ),
            CheckOutcome::new("evenness", d, zv, worst[3], thresholds("evenness")),
            CheckOutcome::new("inversion", d, zv, worst[4], thresholds("inversion")),
        ],
        _ => vec![
            CheckOutcome::new(
                "factorization",
                d,
                zv,
                worst[0],
                thresholds("factorization"),
            ),
            CheckOutcome::new("evenness", d, zv, worst[3], thresholds("evenness")),
        ],
    };
    Ok(out)
}

/// `max_i |g(xi_i) - g(-xi_i)|` over the antipodal node pairs.
pub fn antipodal_gap(g: &GridFunction) -> f64 {
    let grid = g.grid();
    let v = g.values();
    (0..grid.len())
        .filter_map(|i| grid.antipode_index(i).map(|j| (v[i] - v[j]).abs()))
        .fold(0.0, f64::max)
}

/// Uniform draw from `(lo, hi)`.
pub fn random_z<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
