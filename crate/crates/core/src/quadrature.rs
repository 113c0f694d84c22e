//! Quadrature on `S^{d-1}` and on its subspheres `C_z^xi`.
//!
//! Node enumeration of [`SphereGrid`] is latitude-major, longitude-minor and
//! is part of the on-disk format: for `d = 3` node `(i, j)` has index
//! `i * M + j`, for `d = 4` node `(i, j, k)` has index `(i * L + j) * M + k`.

use std::f64::consts::PI;

use smallvec::smallvec;

use crate::error::{Error, Result};
use crate::geometry::{
    sphere_measure, subsphere, tangent_frame, Coords, ShiftParameter, Subsphere, UnitVector,
};

/// Gauss-Legendre rule on `[-1, 1]` with `n` nodes, exact for polynomials of
/// degree `2n - 1`. Nodes are strictly increasing.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::EmptyRule);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for k in 1..=n.div_ceil(2) {
        let mut x = (PI * (k as f64 - 0.25) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                deriv = legendre_with_derivative(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        if 2 * k - 1 == n {
            x = 0.0;
        }
        nodes[n - k] = x;
        nodes[k - 1] = -x;
        weights[n - k] = w;
        weights[k - 1] = w;
    }
    Ok((nodes, weights))
}

/// Classical Legendre `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss rule for the weight `sqrt(1 - t^2)` (Chebyshev of the second kind),
/// exact for polynomials of degree `2n - 1`. Nodes increasing.
fn gauss_chebyshev_second(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = PI / (n as f64 + 1.0);
    (1..=n)
        .rev()
        .map(|k| {
            let a = k as f64 * h;
            (a.cos(), h * a.sin().powi(2))
        })
        .unzip()
}

/// Product quadrature on `S^{d-1}` for `d` in `{3, 4}`.
///
/// `d = 3`: `L` Gauss-Legendre nodes in `cos(theta)` times `M` uniform
/// longitudes. `d = 4`: `L` latitudes in the last coordinate (Gauss rule for
/// the `sqrt(1 - t^2)` density of `S^3`) times the `d = 3` grid `(L, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    d: usize,
    lat: usize,
    lon: usize,
    nodes: Vec<UnitVector>,
    weights: Vec<f64>,
}

pub fn sphere_grid(d: usize, lat: usize, lon: usize) -> Result<SphereGrid> {
    if lat < 2 || lon < 2 {
        return Err(Error::Resolution(format!(
            "grid needs L >= 2 and M >= 2, got L = {lat}, M = {lon}"
        )));
    }
    let (nodes, weights) = match d {
        3 => s2_product(lat, lon)?,
        4 => {
            let (inner_nodes, inner_weights) = s2_product(lat, lon)?;
            let (ts, tw) = gauss_chebyshev_second(lat);
            let mut nodes = Vec::with_capacity(lat * inner_nodes.len());
            let mut weights = Vec::with_capacity(lat * inner_nodes.len());
            for (t, wt) in ts.iter().zip(&tw) {
                let rho = (1.0 - t * t).sqrt();
                for (zeta, wz) in inner_nodes.iter().zip(&inner_weights) {
                    let c = zeta.coords();
                    let p: Coords = smallvec![rho * c[0], rho * c[1], rho * c[2], *t];
                    nodes.push(UnitVector::renormalized(p));
                    weights.push(wt * wz);
                }
            }
            (nodes, weights)
        }
        _ => return Err(Error::UnsupportedDimension(d)),
    };
    Ok(SphereGrid {
        d,
        lat,
        lon,
        nodes,
        weights,
    })
}

fn s2_product(lat: usize, lon: usize) -> Result<(Vec<UnitVector>, Vec<f64>)> {
    let (ts, tw) = gauss_legendre(lat)?;
    let dphi = 2.0 * PI / lon as f64;
    let mut nodes = Vec::with_capacity(lat * lon);
    let mut weights = Vec::with_capacity(lat * lon);
    for (t, wt) in ts.iter().zip(&tw) {
        let rho = (1.0 - t * t).sqrt();
        for j in 0..lon {
            let phi = j as f64 * dphi;
            let p: Coords = smallvec![rho * phi.cos(), rho * phi.sin(), *t];
            nodes.push(UnitVector::renormalized(p));
            weights.push(wt * dphi);
        }
    }
    Ok((nodes, weights))
}

impl SphereGrid {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// `(L, M)`.
    pub fn resolution(&self) -> (usize, usize) {
        (self.lat, self.lon)
    }

    pub fn nodes(&self) -> &[UnitVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest total degree of polynomials integrated exactly.
    pub fn exact_degree(&self) -> usize {
        (2 * self.lat - 1).min(self.lon - 1)
    }

    /// Largest bandlimit `N` such that products of two degree-`N` functions
    /// are integrated exactly.
    pub fn max_bandlimit(&self) -> usize {
        self.exact_degree() / 2
    }

    /// Index of the node `-eta_i`. Exists when `M` is even.
    pub fn antipode_index(&self, i: usize) -> Option<usize> {
        if !self.lon.is_multiple_of(2) || i >= self.len() {
            return None;
        }
        let (l, m) = (self.lat, self.lon);
        let flip = |k: usize| (k + m / 2) % m;
        Some(match self.d {
            3 => (l - 1 - i / m) * m + flip(i % m),
            _ => {
                let (a, rest) = (i / (l * m), i % (l * m));
                ((l - 1 - a) * l + (l - 1 - rest / m)) * m + flip(rest % m)
            }
        })
    }

    /// `sum_i w_i f(eta_i)`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    pub fn measure(&self) -> f64 {
        sphere_measure(self.d)
    }
}

/// Resolution of the quadrature on a subsphere `C_z^xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsphereResolution {
    /// `m` equispaced nodes on a circle (`d = 3`).
    Circle(usize),
    /// Gauss-Legendre times uniform product rule on a 2-sphere (`d = 4`).
    Sphere { lat: usize, lon: usize },
}

impl SubsphereResolution {
    /// A single resolution knob `m` per dimension: the circle rule with `m`
    /// nodes for `d = 3`, the `(m / 2) x m` product rule for `d = 4`.
    pub fn from_m(d: usize, m: usize) -> Result<Self> {
        match d {
            3 => Ok(Self::Circle(m)),
            4 => Ok(Self::Sphere {
                lat: (m / 2).max(2),
                lon: m,
            }),
            _ => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// A resolution that also resolves the non-polynomial integrands met near
    /// `z -> 1` (`M_z f`, `f o r_z`), whose analyticity strip narrows like
    /// `ln(1 / z)`. Never below what degree `2N + 1` needs.
    pub fn adapted(d: usize, z: f64, bandlimit: usize) -> Result<Self> {
        let decay = if z > 0.0 {
            (1.0 / z).ln()
        } else {
            f64::INFINITY
        };
        let m = match d {
            3 => round_up((48.0 / decay).ceil() as usize, 64).max(256),
            4 => round_up((12.0 / decay).ceil() as usize, 16).max(32),
            _ => return Err(Error::UnsupportedDimension(d)),
        };
        Self::from_m(d, m.max(2 * bandlimit + 2))
    }

    /// Largest degree of a polynomial restricted to the subsphere that the
    /// rule integrates exactly.
    pub fn exact_degree(&self) -> usize {
        match *self {
            Self::Circle(m) => m.saturating_sub(1),
            Self::Sphere { lat, lon } => (2 * lat - 1).min(lon - 1),
        }
    }
}

fn round_up(m: usize, step: usize) -> usize {
    m.div_ceil(step) * step
}

/// Nodes and weights on `C_z^xi`; the weights sum to its volume.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsphereRule {
    pub subsphere: Subsphere,
    pub nodes: Vec<UnitVector>,
    pub weights: Vec<f64>,
}

pub fn subsphere_rule(
    xi: &UnitVector,
    z: ShiftParameter,
    res: SubsphereResolution,
) -> Result<SubsphereRule> {
    let sub = subsphere(xi, z)?;
    let frame = tangent_frame(xi);
    let d = xi.dim();
    let on_sphere = |local: &[f64]| -> UnitVector {
        let mut p: Coords = sub.center.iter().copied().collect();
        for (coef, e) in local.iter().zip(&frame.basis) {
            for (pi, ei) in p.iter_mut().zip(e.iter()) {
                *pi += sub.radius * coef * ei;
            }
        }
        UnitVector::renormalized(p)
    };

    let (nodes, raw): (Vec<UnitVector>, Vec<f64>) = match (d, res) {
        (3, SubsphereResolution::Circle(m)) => {
            if m < 4 {
                return Err(Error::Resolution(format!(
                    "circle rule needs m >= 4, got {m}"
                )));
            }
            (0..m)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / m as f64;
                    (on_sphere(&[th.cos(), th.sin()]), 1.0)
                })
                .unzip()
        }
        (4, SubsphereResolution::Sphere { lat, lon }) => {
            let (local, w) = s2_product(lat.max(1), lon.max(1))?;
            if lat < 2 || lon < 2 {
                return Err(Error::Resolution(format!(
                    "subsphere rule needs lat, lon >= 2, got ({lat}, {lon})"
                )));
            }
            local.iter().map(|q| on_sphere(q.coords())).zip(w).unzip()
        }
        (3 | 4, other) => {
            return Err(Error::Resolution(format!(
                "{other:?} does not match dimension {d}"
            )))
        }
        _ => return Err(Error::UnsupportedDimension(d)),
    };
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total * sub.volume).collect();
    Ok(SubsphereRule {
        subsphere: sub,
        nodes,
        weights,
    })
}

impl SubsphereRule {
    /// `(1 / V) sum_i w_i f(p_i)`.
    pub fn mean<F: Fn(&UnitVector) -> f64 + ?Sized>(&self, f: &F) -> f64 {
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum();
        s / self.subsphere.volume
    }
}

/// Mean value of `f` over `C_z^xi`.
pub fn mean_over_subsphere<F: Fn(&UnitVector) -> f64 + ?Sized>(
    f: &F,
    xi: &UnitVector,
    z: ShiftParameter,
    res: SubsphereResolution,
) -> Result<f64> {
    Ok(subsphere_rule(xi, z, res)?.mean(f))
}
