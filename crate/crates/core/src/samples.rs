//! Test functions: basis harmonics, random bandlimited series and random
//! members of the reflection-symmetric class.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{ShiftParameter, UnitVector};
use crate::harmonic::{dim_harmonic, HarmonicCoeffs};
use crate::transforms::{apply_m, Sign};

/// The single basis function `Y_n^k`.
pub fn harmonic(d: usize, n: usize, k: usize) -> Result<HarmonicCoeffs> {
    let mut c = HarmonicCoeffs::zeros(d, n)?;
    let count = dim_harmonic(n, d) as usize;
    if k >= count {
        return Err(Error::Resolution(format!(
            "degree {n} has {count} harmonics in dimension {d}, index {k} is out of range"
        )));
    }
    c.set(n, k, 1.0);
    Ok(c)
}

/// Coefficients drawn uniformly from `[-1, 1]`, reproducible from `seed`.
pub fn random_bandlimited(d: usize, bandlimit: usize, seed: u64) -> Result<HarmonicCoeffs> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = HarmonicCoeffs::zeros(d, bandlimit)?;
    for n in 0..=bandlimit {
        for v in c.block_mut(n) {
            *v = rng.random_range(-1.0..=1.0);
        }
    }
    Ok(c)
}

/// A random point on `S^{d-1}`, by rejection from the cube.
pub fn random_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitVector {
    loop {
        let c: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r2: f64 = c.iter().map(|x| x * x).sum();
        if (0.25..=1.0).contains(&r2) {
            if let Ok(p) = UnitVector::new(&c) {
                return p;
            }
        }
    }
}

/// `exp(-|eta - center|^2 / (2 width^2))`.
pub fn gauss_bump(center: UnitVector, width: f64) -> impl Fn(&UnitVector) -> f64 + Sync {
    let scale = 1.0 / (width * width);
    move |p| (-(1.0 - p.dot(&center)) * scale).exp()
}

/// A function `f = M_{-z} k` with `k` even and bandlimited. Such `f` satisfies
/// the reflection symmetry about `z e_d`, and `M_z f = k` is bandlimited.
#[derive(Debug, Clone)]
pub struct SymmetricSample {
    pub z: ShiftParameter,
    /// `M_z f`.
    pub even: HarmonicCoeffs,
}

impl SymmetricSample {
    pub fn new(z: ShiftParameter, mut even: HarmonicCoeffs) -> Result<Self> {
        let z = z.require_nonnegative()?;
        for n in (1..=even.bandlimit()).step_by(2) {
            even.block_mut(n).iter_mut().for_each(|c| *c = 0.0);
        }
        Ok(Self { z, even })
    }

    pub fn evaluator(&self) -> impl Fn(&UnitVector) -> f64 + Sync + '_ {
        apply_m(self.even.evaluator(), self.z, Sign::Minus)
    }
}

/// Random member of the reflection-symmetric class whose `M_z` image has
/// degree at most `bandlimit`.
pub fn random_symmetric(d: usize, z: f64, bandlimit: usize, seed: u64) -> Result<SymmetricSample> {
    SymmetricSample::new(
        ShiftParameter::nonnegative(z)?,
        random_bandlimited(d, bandlimit, seed)?,
    )
}
