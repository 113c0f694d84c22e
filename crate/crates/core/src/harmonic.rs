//! Laplace series on `S^{d-1}`: Legendre polynomials `P_{n,d}`, degree
//! projectors, an orthonormal real basis for `d = 3` and `d = 4`, Sobolev
//! norms and the Funk-Radon multipliers.
//!
//! Basis ordering inside the degree-`n` block, `d = 3`: index `0` is the zonal
//! harmonic `Y_n^0`, index `2j - 1` the `cos(j phi)` and `2j` the `sin(j phi)`
//! harmonic. For `d = 4` the block is ordered by the `S^2` degree `l = 0..=n`,
//! each `l` contributing its `2l + 1` functions in the `d = 3` order, so index
//! `0` is again the harmonic zonal about `e_d`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::GridFunction;
use crate::geometry::{sphere_measure, UnitVector};
use crate::quadrature::SphereGrid;

/// `P_{n,d}(t)`, normalized by `P_{n,d}(1) = 1`.
pub fn legendre(n: usize, d: usize, t: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if t.is_nan() || t.abs() > 1.0 + 1e-14 {
        return Err(Error::ArgumentDomain { value: t });
    }
    Ok(legendre_unchecked(n, d, t.clamp(-1.0, 1.0)))
}

pub(crate) fn legendre_unchecked(n: usize, d: usize, t: f64) -> f64 {
    // (n + d - 2) P_{n+1} = (2n + d - 2) t P_n - n P_{n-1}
    let dd = d as f64;
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + dd - 2.0) * t * p1 - kf * p0) / (kf + dd - 2.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `N_{n,d}`, the dimension of the degree-`n` harmonics on `S^{d-1}`.
pub fn dim_harmonic(n: usize, d: usize) -> u64 {
    assert!(d >= 3, "dimension must be at least 3");
    // (2n + d - 2) binom(n + d - 3, n) / (d - 2)
    let mut binom: u128 = 1;
    for i in 1..=n as u128 {
        binom = binom * (i + d as u128 - 3) / i;
    }
    ((2 * n as u128 + d as u128 - 2) * binom / (d as u128 - 2)) as u64
}

/// Multiplier of the Funk-Radon transform on degree-`n` harmonics, `P_{n,d}(0)`.
pub fn funk_eigenvalue(n: usize, d: usize) -> f64 {
    legendre_unchecked(n, d, 0.0)
}

/// Smoothness index `s >= 0` of `H^s(S^{d-1})`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::SobolevIndex(s));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(n + (d - 2) / 2)^{2s}`.
    pub fn weight(self, n: usize, d: usize) -> f64 {
        (n as f64 + (d as f64 - 2.0) / 2.0).powf(2.0 * self.0)
    }
}

/// Evaluates every orthonormal basis function up to a bandlimit at a point.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    d: usize,
    bandlimit: usize,
    offsets: Vec<usize>,
    /// `d = 4` only: normalization of `C^{l+1}_{n-l}(t) |x'|^l Y_l^m`, indexed `[n][l]`.
    radial_norms: Vec<Vec<f64>>,
    solid: SolidTables,
}

impl HarmonicBasis {
    pub fn new(d: usize, bandlimit: usize) -> Result<Self> {
        if d != 3 && d != 4 {
            return Err(Error::UnsupportedDimension(d));
        }
        let mut offsets = Vec::with_capacity(bandlimit + 2);
        let mut acc = 0;
        for n in 0..=bandlimit + 1 {
            offsets.push(acc);
            acc += dim_harmonic(n, d) as usize;
        }
        let radial_norms = if d == 4 {
            (0..=bandlimit)
                .map(|n| (0..=n).map(|l| s3_radial_norm(n, l)).collect())
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            d,
            bandlimit,
            offsets,
            radial_norms,
            solid: SolidTables::new(bandlimit),
        })
    }

    /// Number of basis functions of degree `<= bandlimit`.
    pub fn len(&self) -> usize {
        self.offsets[self.bandlimit + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of the degree-`n` block in the flat layout.
    pub fn offset(&self, n: usize) -> usize {
        self.offsets[n]
    }

    /// Writes all basis values at `p` into `out` (length [`Self::len`]).
    pub fn eval_into(&self, p: &UnitVector, out: &mut [f64]) {
        let c = p.coords();
        match self.d {
            3 => {
                self.solid
                    .eval_into(c[0], c[1], c[2], 1.0, &mut out[..self.len()]);
            }
            _ => {
                let t = c[3];
                let r2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
                let mut solid = vec![0.0; (self.bandlimit + 1) * (self.bandlimit + 1)];
                self.solid.eval_into(c[0], c[1], c[2], r2, &mut solid);
                let mut gegen = vec![0.0; self.bandlimit + 1];
                for l in 0..=self.bandlimit {
                    gegenbauer_into(l as f64 + 1.0, t, &mut gegen[..=self.bandlimit - l]);
                    for n in l..=self.bandlimit {
                        let radial = self.radial_norms[n][l] * gegen[n - l];
                        let base = self.offsets[n] + l * l;
                        for mi in 0..2 * l + 1 {
                            out[base + mi] = radial * solid[l * l + mi];
                        }
                    }
                }
            }
        }
    }

    pub fn eval(&self, p: &UnitVector) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }
}

/// `1 / ||C^{l+1}_{n-l}(t) (1 - t^2)^{l/2}||` in `L^2([0, pi], sin^2)`.
fn s3_radial_norm(n: usize, l: usize) -> f64 {
    let ln_fact = |k: usize| (2..=k).map(|i| (i as f64).ln()).sum::<f64>();
    let ln_norm2 = PI.ln() - (1.0 + 2.0 * l as f64) * 2f64.ln() + ln_fact(n + l + 1)
        - ln_fact(n - l)
        - ((n + 1) as f64).ln()
        - 2.0 * ln_fact(l);
    (-0.5 * ln_norm2).exp()
}

/// Gegenbauer polynomials `C^lambda_k(t)` for `k = 0..out.len()`.
fn gegenbauer_into(lambda: f64, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 2.0 * lambda * t;
    }
    for k in 2..out.len() {
        let kf = k as f64;
        out[k] = (2.0 * t * (kf + lambda - 1.0) * out[k - 1]
            - (kf + 2.0 * lambda - 2.0) * out[k - 2])
            / kf;
    }
}

/// Recurrence coefficients of the fully normalized associated Legendre functions.
#[derive(Debug, Clone)]
struct SolidTables {
    lmax: usize,
    /// `Q_m^m`, the diagonal start values.
    diag: Vec<f64>,
    /// `(a_lm, b_lm)` at `l * (lmax + 1) + m`.
    ab: Vec<(f64, f64)>,
}

impl SolidTables {
    fn new(lmax: usize) -> Self {
        let mut diag = Vec::with_capacity(lmax + 1);
        let mut q = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=lmax {
            if m > 0 {
                q *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
            }
            diag.push(q);
        }
        let mut ab = vec![(0.0, 0.0); (lmax + 1) * (lmax + 1)];
        for l in 0..=lmax {
            for m in 0..l.saturating_sub(1) {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                ab[l * (lmax + 1) + m] = (a, b);
            }
        }
        Self { lmax, diag, ab }
    }

    /// Real spherical harmonics, orthonormal on `S^2`, extended as homogeneous
    /// harmonic polynomials in `(x, y, w)` with `r2 = x^2 + y^2 + w^2`; flat
    /// layout `l^2 + index`.
    fn eval_into(&self, x: f64, y: f64, w: f64, r2: f64, out: &mut [f64]) {
        let lmax = self.lmax;
        // (x + i y)^m
        let (mut re, mut im) = (1.0, 0.0);
        let mut column = [0.0; 64];
        let mut heap;
        let column: &mut [f64] = if lmax < 64 {
            &mut column[..=lmax]
        } else {
            heap = vec![0.0; lmax + 1];
            &mut heap
        };
        for m in 0..=lmax {
            if m > 0 {
                (re, im) = (re * x - im * y, re * y + im * x);
            }
            column[m] = self.diag[m];
            if m < lmax {
                column[m + 1] = (2.0 * m as f64 + 3.0).sqrt() * w * self.diag[m];
            }
            for l in m + 2..=lmax {
                let (a, b) = self.ab[l * (lmax + 1) + m];
                column[l] = a * (w * column[l - 1] - b * r2 * column[l - 2]);
            }
            for l in m..=lmax {
                if m == 0 {
                    out[l * l] = column[l];
                } else {
                    out[l * l + 2 * m - 1] = std::f64::consts::SQRT_2 * column[l] * re;
                    out[l * l + 2 * m] = std::f64::consts::SQRT_2 * column[l] * im;
                }
            }
        }
    }
}

/// Truncated Laplace series coefficients in the basis of [`HarmonicBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoeffs {
    d: usize,
    blocks: Vec<Vec<f64>>,
}

impl HarmonicCoeffs {
    pub fn zeros(d: usize, bandlimit: usize) -> Result<Self> {
        if d != 3 && d != 4 {
            return Err(Error::UnsupportedDimension(d));
        }
        Ok(Self {
            d,
            blocks: (0..=bandlimit)
                .map(|n| vec![0.0; dim_harmonic(n, d) as usize])
                .collect(),
        })
    }

    /// Builds coefficients from a flat vector in basis order.
    pub fn from_flat(d: usize, bandlimit: usize, flat: &[f64]) -> Result<Self> {
        let mut c = Self::zeros(d, bandlimit)?;
        let expected: usize = c.blocks.iter().map(Vec::len).sum();
        if flat.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: flat.len(),
            });
        }
        let mut it = flat.iter();
        for block in &mut c.blocks {
            for v in block.iter_mut() {
                *v = *it.next().unwrap();
            }
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bandlimit(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, n: usize) -> &[f64] {
        &self.blocks[n]
    }

    pub fn block_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.blocks[n]
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.blocks[n][k]
    }

    pub fn set(&mut self, n: usize, k: usize, value: f64) {
        self.blocks[n][k] = value;
    }

    pub fn flat(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// `||P_{n,d} f||^2_{L^2}`.
    pub fn degree_energy(&self, n: usize) -> f64 {
        self.blocks[n].iter().map(|c| c * c).sum()
    }

    pub fn energy(&self) -> f64 {
        (0..self.blocks.len()).map(|n| self.degree_energy(n)).sum()
    }

    /// Energy in odd degrees over total energy; `0` for the zero function.
    pub fn odd_energy_fraction(&self) -> f64 {
        let total = self.energy();
        if total == 0.0 {
            return 0.0;
        }
        let odd: f64 = (1..self.blocks.len())
            .step_by(2)
            .map(|n| self.degree_energy(n))
            .sum();
        odd / total
    }

    pub fn scale_blocks(&mut self, factor: impl Fn(usize) -> f64) {
        for (n, block) in self.blocks.iter_mut().enumerate() {
            let f = factor(n);
            block.iter_mut().for_each(|c| *c *= f);
        }
    }

    pub fn basis(&self) -> HarmonicBasis {
        HarmonicBasis::new(self.d, self.bandlimit()).expect("dimension checked on construction")
    }

    /// Pointwise value of the truncated Laplace series.
    pub fn eval(&self, p: &UnitVector) -> f64 {
        self.eval_with(&self.basis(), p)
    }

    pub fn eval_with(&self, basis: &HarmonicBasis, p: &UnitVector) -> f64 {
        let values = basis.eval(p);
        self.blocks
            .iter()
            .flatten()
            .zip(&values)
            .map(|(c, y)| c * y)
            .sum()
    }

    /// A closure evaluating the series, sharing one basis evaluator.
    pub fn evaluator(&self) -> impl Fn(&UnitVector) -> f64 + Sync + '_ {
        let basis = self.basis();
        move |p| self.eval_with(&basis, p)
    }
}

/// `sum_i weighted_i Y(points_i)` for all basis functions of degree `<= bandlimit`.
pub(crate) fn project_onto_basis(
    d: usize,
    bandlimit: usize,
    points: &[UnitVector],
    weighted: &[f64],
) -> Result<HarmonicCoeffs> {
    let basis = HarmonicBasis::new(d, bandlimit)?;
    let len = basis.len();
    // fixed chunking keeps the summation order independent of scheduling
    let partials: Vec<Vec<f64>> = points
        .par_chunks(256)
        .zip(weighted.par_chunks(256))
        .map(|(pts, ws)| {
            let mut acc = vec![0.0; len];
            let mut buf = vec![0.0; len];
            for (p, w) in pts.iter().zip(ws) {
                basis.eval_into(p, &mut buf);
                acc.iter_mut().zip(&buf).for_each(|(a, y)| *a += w * y);
            }
            acc
        })
        .collect();
    let mut flat = vec![0.0; len];
    for part in partials {
        flat.iter_mut().zip(&part).for_each(|(a, p)| *a += p);
    }
    HarmonicCoeffs::from_flat(d, bandlimit, &flat)
}

fn check_resolution(grid: &SphereGrid, bandlimit: usize) -> Result<()> {
    if 2 * bandlimit > grid.exact_degree() {
        return Err(Error::Resolution(format!(
            "grid {:?} integrates degree {} exactly, bandlimit {bandlimit} needs {}",
            grid.resolution(),
            grid.exact_degree(),
            2 * bandlimit
        )));
    }
    Ok(())
}

/// Coefficients `<f, Y_n^k>` up to degree `bandlimit`, by grid quadrature.
pub fn analyze(f: &GridFunction, bandlimit: usize) -> Result<HarmonicCoeffs> {
    let grid = f.grid();
    check_resolution(grid, bandlimit)?;
    let weighted: Vec<f64> = grid
        .weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * v)
        .collect();
    project_onto_basis(grid.dim(), bandlimit, grid.nodes(), &weighted)
}

/// Samples the truncated Laplace series on `grid`.
pub fn synthesize(c: &HarmonicCoeffs, grid: std::sync::Arc<SphereGrid>) -> Result<GridFunction> {
    if grid.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: grid.dim(),
        });
    }
    Ok(GridFunction::sample(grid, c.evaluator()))
}

/// `(P_{n,d} f)(xi) = N_{n,d} / |S^{d-1}| int f(eta) P_{n,d}(<xi, eta>) d eta`
/// at every node, by quadrature against the zonal kernel.
pub fn project_degree(f: &GridFunction, n: usize) -> Result<GridFunction> {
    let grid = f.grid().clone();
    check_resolution(&grid, n)?;
    let d = grid.dim();
    let scale = dim_harmonic(n, d) as f64 / sphere_measure(d);
    let weighted: Vec<f64> = grid
        .weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * v)
        .collect();
    let nodes = grid.nodes();
    let values = nodes
        .par_iter()
        .map(|xi| {
            scale
                * nodes
                    .iter()
                    .zip(&weighted)
                    .map(|(eta, wv)| wv * legendre_unchecked(n, d, xi.dot(eta).clamp(-1.0, 1.0)))
                    .sum::<f64>()
        })
        .collect();
    GridFunction::new(grid, values)
}

/// `sqrt(sum_n (n + (d-2)/2)^{2s} sum_k |c_{n,k}|^2)`.
pub fn sobolev_norm(c: &HarmonicCoeffs, s: SobolevIndex) -> f64 {
    (0..=c.bandlimit())
        .map(|n| s.weight(n, c.dim()) * c.degree_energy(n))
        .sum::<f64>()
        .sqrt()
}
