//! Closed-form geometry on the unit sphere `S^{d-1}`.
//!
//! Points are [`UnitVector`]s; the last coordinate plays the role of the
//! north-south axis. The maps [`h_map`] and [`g_map`] transport points and
//! normal vectors between the subspheres through `z e_d` and the great
//! subspheres, [`r_map`] is the point reflection of the sphere about `z e_d`.

use smallvec::SmallVec;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Coordinates of a point in `R^d`. Inline up to `d = 4`.
pub type Coords = SmallVec<[f64; 4]>;

/// Largest admissible `|z|`. The maps degenerate at the endpoints.
pub const Z_CAP: f64 = 1.0 - 1e-6;

/// A point on `S^{d-1}`, `d >= 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Coords);

impl UnitVector {
    /// Normalizes `coords`. Inputs whose norm is outside `[0.5, 2]` are
    /// rejected as genuine errors rather than roundoff.
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        let norm = norm(coords);
        if !(0.5..=2.0).contains(&norm) {
            return Err(Error::NotNearUnit(norm));
        }
        Ok(Self(coords.iter().map(|c| c / norm).collect()))
    }

    /// Normalizes without the band check. Used for outputs of maps that
    /// are analytically on the sphere.
    pub(crate) fn renormalized(coords: Coords) -> Self {
        let n = norm(&coords);
        Self(coords.into_iter().map(|c| c / n).collect())
    }

    /// The `i`-th coordinate axis `e_{i+1}` (zero based).
    pub fn axis(d: usize, i: usize) -> Self {
        assert!(d >= 3 && i < d);
        let mut c: Coords = SmallVec::from_elem(0.0, d);
        c[i] = 1.0;
        Self(c)
    }

    /// The north pole `e_d`.
    pub fn north(d: usize) -> Self {
        Self::axis(d, d - 1)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// The last coordinate `xi_d`.
    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    /// `1 - xi_d`, accurate also near the north pole.
    pub(crate) fn one_minus_last(&self) -> f64 {
        let xd = self.last();
        if xd > 0.0 {
            let d = self.dim();
            dot(&self.0[..d - 1], &self.0[..d - 1]) / (1.0 + xd)
        } else {
            1.0 - xd
        }
    }

    /// `1 + xi_d`, accurate also near the south pole.
    pub(crate) fn one_plus_last(&self) -> f64 {
        let xd = self.last();
        if xd < 0.0 {
            let d = self.dim();
            dot(&self.0[..d - 1], &self.0[..d - 1]) / (1.0 - xd)
        } else {
            1.0 + xd
        }
    }

    pub fn antipode(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// Largest coordinate-wise difference.
    pub fn max_abs_diff(&self, other: &UnitVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The shift `z` of the common point `z e_d` of the cutting hyperplanes.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ShiftParameter(f64);

impl ShiftParameter {
    /// Accepts `|z| <= 1 - 1e-6`.
    pub fn new(z: f64) -> Result<Self> {
        if !z.is_finite() || z.abs() > Z_CAP {
            return Err(Error::ParameterDomain {
                z,
                domain: "(-1, 1)",
            });
        }
        Ok(Self(z))
    }

    /// Accepts `0 <= z <= 1 - 1e-6`, the range of the transform-level results.
    pub fn nonnegative(z: f64) -> Result<Self> {
        Self::new(z)?.require_nonnegative()
    }

    pub fn require_nonnegative(self) -> Result<Self> {
        if self.0 < 0.0 {
            return Err(Error::ParameterDomain {
                z: self.0,
                domain: "[0, 1)",
            });
        }
        Ok(self)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn negated(self) -> Self {
        Self(-self.0)
    }

    /// `sqrt(1 - z^2)`.
    pub fn cofactor(self) -> f64 {
        (1.0 - self.0 * self.0).sqrt()
    }
}

/// `h_z(eta)`: transports a great subsphere onto a subsphere through `z e_d`.
pub fn h_map(eta: &UnitVector, z: ShiftParameter) -> UnitVector {
    let z = z.value();
    let d = eta.dim();
    let s = ((1.0 - z) * (1.0 + z)).sqrt();
    // 1 + z eta_d without cancellation near the poles
    let den = if z >= 0.0 {
        (1.0 - z) + z * eta.one_plus_last()
    } else {
        (1.0 + z) - z * eta.one_minus_last()
    };
    let mut out: Coords = eta.0.iter().map(|c| s * c / den).collect();
    out[d - 1] = (z + eta.last()) / den;
    UnitVector::renormalized(out)
}

/// `h_z^{-1} = h_{-z}`.
pub fn h_inv(omega: &UnitVector, z: ShiftParameter) -> UnitVector {
    h_map(omega, z.negated())
}

/// `g_z(xi)`: the normal of the great subsphere `h_z^{-1}(C_z^xi)`.
pub fn g_map(xi: &UnitVector, z: ShiftParameter) -> UnitVector {
    let z = z.value();
    let d = xi.dim();
    let xd = xi.last();
    let den = (1.0 - z * z * xd * xd).sqrt();
    let mut out: Coords = xi.0.iter().map(|c| c / den).collect();
    out[d - 1] = (1.0 - z * z).sqrt() * xd / den;
    UnitVector::renormalized(out)
}

pub fn g_inv(omega: &UnitVector, z: ShiftParameter) -> UnitVector {
    let z = z.value();
    let d = omega.dim();
    let s = (1.0 - z * z).sqrt();
    let wd = omega.last();
    let den = (1.0 - z * z + z * z * wd * wd).sqrt();
    let mut out: Coords = omega.0.iter().map(|c| s * c / den).collect();
    out[d - 1] = wd / den;
    UnitVector::renormalized(out)
}

/// Point reflection of the sphere about `z e_d`: the second intersection of
/// the chord through `omega` and `z e_d`. Requires `z >= 0`.
pub fn r_map(omega: &UnitVector, z: ShiftParameter) -> Result<UnitVector> {
    let z = z.require_nonnegative()?.value();
    let d = omega.dim();
    let den = reflection_denominator(omega, z);
    let mut out: Coords = omega.0.iter().map(|c| (z * z - 1.0) * c / den).collect();
    // 2z - (1 + z^2) omega_d
    out[d - 1] = ((1.0 + z * z) * omega.one_minus_last() - (1.0 - z) * (1.0 - z)) / den;
    Ok(UnitVector::renormalized(out))
}

/// `W_z(omega) = ((1 - z^2) / (1 - 2 z omega_d + z^2))^{d-2}`, the weight of
/// the reflection symmetry. `W_z(omega) W_z(r_z(omega)) = 1`.
pub fn reflection_weight(omega: &UnitVector, z: ShiftParameter) -> f64 {
    let z = z.value();
    let ratio = (1.0 - z) * (1.0 + z) / reflection_denominator(omega, z);
    ratio.powi(omega.dim() as i32 - 2)
}

/// `1 - 2 z omega_d + z^2`, written as `(1 - z)^2 + 2 z (1 - omega_d)`.
fn reflection_denominator(omega: &UnitVector, z: f64) -> f64 {
    (1.0 - z) * (1.0 - z) + 2.0 * z * omega.one_minus_last()
}

/// North-pole stereographic projection onto the equatorial hyperplane.
pub fn stereo(xi: &UnitVector) -> Result<Vec<f64>> {
    let xd = xi.last();
    if xd >= 1.0 - 1e-12 {
        return Err(Error::NearPole);
    }
    let d = xi.dim();
    let den = xi.one_minus_last();
    Ok(xi.0[..d - 1].iter().map(|c| c / den).collect())
}

pub fn stereo_inv(x: &[f64]) -> Result<UnitVector> {
    let d = x.len() + 1;
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let n2 = dot(x, x);
    let mut out: Coords = x.iter().map(|c| 2.0 * c / (1.0 + n2)).collect();
    out.push((n2 - 1.0) / (1.0 + n2));
    Ok(UnitVector::renormalized(out))
}

/// Surface measure `|S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)` of the unit sphere in `R^d`.
pub fn sphere_measure(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * sphere_measure(d - 2),
    }
}

/// The section `C_z^xi` of the sphere by the hyperplane `<eta, xi> = z xi_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsphere {
    pub axis: UnitVector,
    pub z: ShiftParameter,
    pub center: Vec<f64>,
    pub radius: f64,
    pub volume: f64,
}

pub fn subsphere(xi: &UnitVector, z: ShiftParameter) -> Result<Subsphere> {
    let z = z.require_nonnegative()?;
    let d = xi.dim();
    let offset = z.value() * xi.last();
    let r2 = 1.0 - offset * offset;
    Ok(Subsphere {
        axis: xi.clone(),
        z,
        center: xi.0.iter().map(|c| offset * c).collect(),
        radius: r2.sqrt(),
        volume: sphere_measure(d - 1) * r2.powf((d as f64 - 2.0) / 2.0),
    })
}

/// An oriented orthonormal basis of the tangent space at `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    pub axis: UnitVector,
    pub basis: Vec<Coords>,
}

impl TangentFrame {
    /// `det(axis, e^1, ..., e^{d-1})`; `+1` for frames built by [`tangent_frame`].
    pub fn orientation(&self) -> f64 {
        let mut rows: Vec<Vec<f64>> = vec![self.axis.0.to_vec()];
        rows.extend(self.basis.iter().map(|b| b.to_vec()));
        determinant(rows)
    }
}

/// Gram-Schmidt on the coordinate axes, least aligned with `xi` first; the
/// last vector is flipped if needed so that the frame is positively oriented.
pub fn tangent_frame(xi: &UnitVector) -> TangentFrame {
    let d = xi.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| xi.0[a].abs().total_cmp(&xi.0[b].abs()).then(a.cmp(&b)));

    let mut basis: Vec<Coords> = Vec::with_capacity(d - 1);
    for &i in &order {
        if basis.len() == d - 1 {
            break;
        }
        let mut v: Coords = SmallVec::from_elem(0.0, d);
        v[i] = 1.0;
        for u in std::iter::once(&xi.0).chain(basis.iter()) {
            let p = dot(&v, u);
            v.iter_mut().zip(u.iter()).for_each(|(a, b)| *a -= p * b);
        }
        // re-orthogonalize once more for accuracy
        for u in std::iter::once(&xi.0).chain(basis.iter()) {
            let p = dot(&v, u);
            v.iter_mut().zip(u.iter()).for_each(|(a, b)| *a -= p * b);
        }
        let n = norm(&v);
        if n < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|a| *a /= n);
        basis.push(v);
    }

    let mut frame = TangentFrame {
        axis: xi.clone(),
        basis,
    };
    if frame.orientation() < 0.0 {
        let last = frame.basis.last_mut().expect("d - 1 >= 2 basis vectors");
        last.iter_mut().for_each(|a| *a = -*a);
    }
    frame
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant(mut rows: Vec<Vec<f64>>) -> f64 {
    let n = rows.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
            .unwrap();
        if rows[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        det *= rows[col][col];
        for r in col + 1..n {
            let factor = rows[r][col] / rows[col][col];
            for c in col..n {
                rows[r][c] -= factor * rows[col][c];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv(c: &[f64]) -> UnitVector {
        UnitVector::new(c).unwrap()
    }

    fn z(v: f64) -> ShiftParameter {
        ShiftParameter::new(v).unwrap()
    }

    fn assert_close(a: &UnitVector, b: &[f64], tol: f64) {
        for (x, y) in a.coords().iter().zip(b) {
            assert!((x - y).abs() <= tol, "{:?} vs {:?}", a.coords(), b);
        }
    }

    #[test]
    fn construction_normalizes_and_rejects() {
        let v = uv(&[0.0, 0.0, 1.5]);
        assert_eq!(v.coords(), &[0.0, 0.0, 1.0]);
        assert!(matches!(
            UnitVector::new(&[0.0, 0.0, 0.1]),
            Err(Error::NotNearUnit(_))
        ));
        assert!(matches!(
            UnitVector::new(&[3.0, 0.0, 0.0]),
            Err(Error::NotNearUnit(_))
        ));
        assert!(matches!(
            UnitVector::new(&[1.0, 0.0]),
            Err(Error::UnsupportedDimension(2))
        ));
    }

    #[test]
    fn shift_parameter_domain() {
        assert!(ShiftParameter::new(1.0).is_err());
        assert!(ShiftParameter::new(-1.0).is_err());
        assert!(ShiftParameter::new(f64::NAN).is_err());
        assert!(ShiftParameter::new(0.999_999_5).is_err());
        assert!(ShiftParameter::new(-0.5).is_ok());
        assert!(ShiftParameter::nonnegative(-0.5).is_err());
        assert!(r_map(&UnitVector::north(3), z(-0.2)).is_err());
        assert!(subsphere(&UnitVector::north(3), z(-0.2)).is_err());
    }

    #[test]
    fn h_map_examples() {
        let eta = uv(&[0.3, -0.4, 0.5]);
        assert_close(&h_map(&eta, z(0.0)), eta.coords(), 1e-15);
        for zv in [-0.7, 0.2, 0.9] {
            assert_close(
                &h_map(&UnitVector::north(3), z(zv)),
                &[0.0, 0.0, 1.0],
                1e-15,
            );
            assert_close(
                &h_map(&UnitVector::north(3).antipode(), z(zv)),
                &[0.0, 0.0, -1.0],
                1e-15,
            );
        }
        let out = h_map(&uv(&[1.0, 0.0, 0.0]), z(0.5));
        assert_close(&out, &[3f64.sqrt() / 2.0, 0.0, 0.5], 1e-15);
    }

    #[test]
    fn h_inv_examples() {
        assert_close(
            &h_inv(&UnitVector::north(3), z(0.4)),
            &[0.0, 0.0, 1.0],
            1e-15,
        );
        let fwd = h_map(&uv(&[1.0, 0.0, 0.0]), z(0.5));
        assert_close(&h_inv(&fwd, z(0.5)), &[1.0, 0.0, 0.0], 1e-15);
        let img = uv(&[3f64.sqrt() / 2.0, 0.0, 0.5]);
        assert_close(&h_inv(&img, z(0.5)), &[1.0, 0.0, 0.0], 1e-15);
    }

    #[test]
    fn g_map_examples() {
        assert_close(
            &g_map(&uv(&[1.0, 0.0, 0.0]), z(0.6)),
            &[1.0, 0.0, 0.0],
            1e-15,
        );
        assert_close(
            &g_map(&UnitVector::north(3), z(0.6)),
            &[0.0, 0.0, 1.0],
            1e-15,
        );
        let h = 2f64.sqrt() / 2.0;
        let out = g_map(&uv(&[0.0, h, h]), z(0.5));
        assert_close(&out, &[0.0, 0.755_928_946_0, 0.654_653_670_7], 1e-9);
    }

    #[test]
    fn g_inv_examples() {
        assert_close(
            &g_inv(&UnitVector::north(3), z(0.6)),
            &[0.0, 0.0, 1.0],
            1e-15,
        );
        assert_close(
            &g_inv(&uv(&[1.0, 0.0, 0.0]), z(0.6)),
            &[1.0, 0.0, 0.0],
            1e-15,
        );
        let h = 2f64.sqrt() / 2.0;
        let back = g_inv(&uv(&[0.0, 0.755_928_946_0, 0.654_653_670_7]), z(0.5));
        assert_close(&back, &[0.0, h, h], 1e-9);
    }

    #[test]
    fn r_map_examples() {
        let w = uv(&[0.3, -0.4, 0.5]);
        assert_close(&r_map(&w, z(0.0)).unwrap(), w.antipode().coords(), 1e-15);
        assert_close(
            &r_map(&UnitVector::north(3), z(0.7)).unwrap(),
            &[0.0, 0.0, -1.0],
            1e-15,
        );
        let out = r_map(&uv(&[1.0, 0.0, 0.0]), z(0.5)).unwrap();
        assert_close(&out, &[-0.6, 0.0, 0.8], 1e-15);
    }

    #[test]
    fn stereo_examples() {
        let e1 = stereo(&uv(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(e1, vec![1.0, 0.0]);
        let s = stereo(&UnitVector::north(3).antipode()).unwrap();
        assert_eq!(s, vec![0.0, 0.0]);
        let p = stereo(&uv(&[0.0, 3f64.sqrt() / 2.0, 0.5])).unwrap();
        assert!((p[0]).abs() < 1e-15 && (p[1] - 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(stereo(&UnitVector::north(4)), Err(Error::NearPole));
    }

    #[test]
    fn stereo_inv_examples() {
        assert_close(&stereo_inv(&[0.0, 0.0]).unwrap(), &[0.0, 0.0, -1.0], 0.0);
        assert_close(&stereo_inv(&[1.0, 0.0]).unwrap(), &[1.0, 0.0, 0.0], 1e-15);
        let q = stereo_inv(&[0.0, 3f64.sqrt()]).unwrap();
        assert_close(&q, &[0.0, 3f64.sqrt() / 2.0, 0.5], 1e-15);
    }

    #[test]
    fn sphere_measures() {
        assert!((sphere_measure(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_measure(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_measure(4) - 2.0 * PI * PI).abs() < 1e-14);
        assert!((sphere_measure(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn subsphere_examples() {
        let great = subsphere(&UnitVector::axis(3, 0), z(0.5)).unwrap();
        assert!(great.center.iter().all(|c| *c == 0.0));
        assert_eq!(great.radius, 1.0);
        assert!((great.volume - 2.0 * PI).abs() < 1e-15);

        let small = subsphere(&UnitVector::north(3), z(0.5)).unwrap();
        assert_eq!(small.center, vec![0.0, 0.0, 0.5]);
        assert!((small.radius - 0.866_025_403_784_438_6).abs() < 1e-15);
        assert!((small.volume - 2.0 * PI * 0.866_025_403_784_438_6).abs() < 1e-14);

        let any = subsphere(&uv(&[0.2, 0.7, -0.4]), z(0.0)).unwrap();
        assert!((any.volume - 2.0 * PI).abs() < 1e-15);

        let four = subsphere(&UnitVector::north(4), z(0.5)).unwrap();
        assert!((four.volume - 4.0 * PI * 0.75).abs() < 1e-14);
    }

    #[test]
    fn tangent_frame_at_pole() {
        let f = tangent_frame(&UnitVector::north(3));
        assert_eq!(f.basis.len(), 2);
        for b in &f.basis {
            assert_eq!(b[2], 0.0);
        }
        assert!((f.orientation() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tangent_frame_is_deterministic() {
        let xi = uv(&[0.1, -0.8, 0.3, 0.5]);
        assert_eq!(tangent_frame(&xi), tangent_frame(&xi));
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), -1.0);
        let d = determinant(vec![
            vec![2.0, 0.0, 1.0],
            vec![1.0, 3.0, 2.0],
            vec![1.0, 1.0, 2.0],
        ]);
        assert!((d - 6.0).abs() < 1e-14);
    }
}
