//! File format and command implementations behind the `funksphere` binary.
//!
//! A grid function file is one line of JSON header followed by one value per
//! line, in node order of `sphere_grid(d, L, M)` (latitude-major, longitude
//! minor; for `d = 4` the outer latitude is slowest).

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::sync::Arc;

use funksphere::samples::{gauss_bump, harmonic, random_symmetric};
use funksphere::{
    analyze, inverse_spherical_transform, run_checks, sphere_grid, spherical_transform_direct,
    spherical_transform_factored, symmetrize_z, GridFunction, OperatorConfig, SobolevIndex,
    SphereGrid, UnitVector, VerifyConfig,
};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: &str = "1";
pub const GRID_TYPE: &str = "gauss-uniform";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Library(funksphere::Error),
    #[error("data not in the range of the transform: odd-degree energy fraction {fraction:e} exceeds {threshold:e}")]
    NotInRange { fraction: f64, threshold: f64 },
    #[error("verification failed: {failed} of {total} checks")]
    Verification { failed: usize, total: usize },
}

impl From<funksphere::Error> for CliError {
    fn from(e: funksphere::Error) -> Self {
        match e {
            funksphere::Error::NotInRange {
                fraction,
                threshold,
            } => Self::NotInRange {
                fraction,
                threshold,
            },
            other => Self::Library(other),
        }
    }
}

impl CliError {
    /// 0 success, 1 usage or i/o, 2 not in range, 3 verification failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::NotInRange { .. } => 2,
            Self::Verification { .. } => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "L")]
    pub lat: usize,
    #[serde(rename = "M")]
    pub lon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format_version: String,
    pub d: usize,
    pub grid: GridSpec,
    pub z: Option<f64>,
    pub description: String,
}

/// A header plus its payload.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunctionFile {
    pub header: Header,
    pub values: Vec<f64>,
}

impl GridFunctionFile {
    pub fn new(f: &GridFunction, z: Option<f64>, description: impl Into<String>) -> Self {
        let (lat, lon) = f.grid().resolution();
        Self {
            header: Header {
                format_version: FORMAT_VERSION.into(),
                d: f.dim(),
                grid: GridSpec {
                    kind: GRID_TYPE.into(),
                    lat,
                    lon,
                },
                z,
                description: description.into(),
            },
            values: f.values().to_vec(),
        }
    }

    /// Expected payload length: `L M` for `d = 3`, `L L M` for `d = 4`.
    pub fn expected_len(h: &Header) -> usize {
        match h.d {
            4 => h.grid.lat * h.grid.lat * h.grid.lon,
            _ => h.grid.lat * h.grid.lon,
        }
    }

    /// Writes the header and the values; `f64` display is the shortest
    /// representation that reads back to the same bits.
    pub fn write_to<W: Write>(&self, mut w: W) -> CliResult<()> {
        let header =
            serde_json::to_string(&self.header).map_err(|e| CliError::Format(e.to_string()))?;
        let mut buf = String::with_capacity(header.len() + 24 * self.values.len());
        buf.push_str(&header);
        buf.push('\n');
        for v in &self.values {
            let _ = writeln!(buf, "{v}");
        }
        w.write_all(buf.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> CliResult<Self> {
        let mut lines = BufReader::new(r).lines();
        let first = lines
            .next()
            .ok_or_else(|| CliError::Format("empty file".into()))??;
        let header: Header =
            serde_json::from_str(&first).map_err(|e| CliError::Format(format!("header: {e}")))?;
        if header.format_version != FORMAT_VERSION {
            return Err(CliError::Format(format!(
                "unsupported format_version {:?}",
                header.format_version
            )));
        }
        if header.grid.kind != GRID_TYPE {
            return Err(CliError::Format(format!(
                "unsupported grid type {:?}",
                header.grid.kind
            )));
        }
        if header.d != 3 && header.d != 4 {
            return Err(CliError::Format(format!(
                "d must be 3 or 4, found {}",
                header.d
            )));
        }
        let mut values = Vec::with_capacity(Self::expected_len(&header));
        for (i, line) in lines.enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let v: f64 = t
                .parse()
                .map_err(|_| CliError::Format(format!("value {}: cannot parse {t:?}", i + 1)))?;
            if !v.is_finite() {
                return Err(CliError::Format(format!("value {} is not finite", i + 1)));
            }
            values.push(v);
        }
        if values.len() != Self::expected_len(&header) {
            return Err(CliError::Format(format!(
                "payload has {} values, grid needs {}",
                values.len(),
                Self::expected_len(&header)
            )));
        }
        Ok(Self { header, values })
    }

    pub fn read_path(path: &std::path::Path) -> CliResult<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }

    pub fn write_path(&self, path: &std::path::Path) -> CliResult<()> {
        self.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn grid_function(&self) -> CliResult<GridFunction> {
        let grid = Arc::new(sphere_grid(
            self.header.d,
            self.header.grid.lat,
            self.header.grid.lon,
        )?);
        Ok(GridFunction::new(grid, self.values.clone())?)
    }
}

/// A builtin test function, parsed from `name` or `name(arg, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Const,
    CoordD,
    CoordDSq,
    GaussBump { center: Vec<f64>, width: f64 },
    Harmonic { n: usize, k: usize },
    SymmetricZ { z: f64, seed: u64, bandlimit: usize },
}

impl std::str::FromStr for FunctionSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) => {
                let inner = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| CliError::Usage(format!("missing ')' in {s:?}")))?;
                let args: Vec<&str> = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .collect();
                (&s[..i], args)
            }
            None => (s, Vec::new()),
        };
        let num = |a: &str| -> CliResult<f64> {
            let v = a.split_once('=').map_or(a, |(_, v)| v).trim();
            v.parse()
                .map_err(|_| CliError::Usage(format!("bad number {a:?} in {s:?}")))
        };
        let int = |a: &str| -> CliResult<u64> {
            let v = a.split_once('=').map_or(a, |(_, v)| v).trim();
            v.parse()
                .map_err(|_| CliError::Usage(format!("bad integer {a:?} in {s:?}")))
        };
        let arity = |n: usize| -> CliResult<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(CliError::Usage(format!(
                    "{name} takes {n} arguments, got {}",
                    args.len()
                )))
            }
        };
        match name {
            "const" => arity(0).map(|_| Self::Const),
            "coord_d" => arity(0).map(|_| Self::CoordD),
            "coord_d_sq" => arity(0).map(|_| Self::CoordDSq),
            "gauss_bump" => {
                if args.len() < 4 {
                    return Err(CliError::Usage(
                        "gauss_bump takes the center coordinates followed by the width".into(),
                    ));
                }
                let vals = args.iter().map(|a| num(a)).collect::<CliResult<Vec<_>>>()?;
                let (width, center) = vals.split_last().expect("nonempty");
                Ok(Self::GaussBump {
                    center: center.to_vec(),
                    width: *width,
                })
            }
            "harmonic" => {
                arity(2)?;
                Ok(Self::Harmonic {
                    n: int(args[0])? as usize,
                    k: int(args[1])? as usize,
                })
            }
            "symmetric_z" => {
                arity(3)?;
                Ok(Self::SymmetricZ {
                    z: num(args[0])?,
                    seed: int(args[1])?,
                    bandlimit: int(args[2])? as usize,
                })
            }
            other => Err(CliError::Usage(format!(
                "unknown function {other:?}; expected const, coord_d, coord_d_sq, gauss_bump, harmonic or symmetric_z"
            ))),
        }
    }
}

/// Samples a builtin function on `sphere_grid(d, L, M)`.
pub fn sample(
    spec: &FunctionSpec,
    d: usize,
    lat: usize,
    lon: usize,
) -> CliResult<GridFunctionFile> {
    let grid = Arc::new(sphere_grid(d, lat, lon)?);
    let (f, z, what) = match spec {
        FunctionSpec::Const => (
            GridFunction::sample(grid, |_| 1.0),
            None,
            "const".to_string(),
        ),
        FunctionSpec::CoordD => (
            GridFunction::sample(grid, |p| p.last()),
            None,
            "coord_d".into(),
        ),
        FunctionSpec::CoordDSq => (
            GridFunction::sample(grid, |p| p.last() * p.last()),
            None,
            "coord_d_sq".into(),
        ),
        FunctionSpec::GaussBump { center, width } => {
            if center.len() != d {
                return Err(CliError::Usage(format!(
                    "gauss_bump center has {} coordinates, d = {d}",
                    center.len()
                )));
            }
            if width.is_nan() || *width <= 0.0 {
                return Err(CliError::Usage("gauss_bump width must be positive".into()));
            }
            let c = UnitVector::new(center)?;
            (
                GridFunction::sample(grid, gauss_bump(c, *width)),
                None,
                format!("gauss_bump(center={center:?}, width={width})"),
            )
        }
        FunctionSpec::Harmonic { n, k } => {
            let c = harmonic(d, *n, *k)?;
            (
                GridFunction::sample(grid, c.evaluator()),
                None,
                format!("harmonic(n={n}, k={k})"),
            )
        }
        FunctionSpec::SymmetricZ { z, seed, bandlimit } => {
            let s = random_symmetric(d, *z, *bandlimit, *seed)?;
            let f = symmetrize_z(s.evaluator(), s.z)?;
            (
                GridFunction::sample(grid, f),
                Some(*z),
                format!("symmetric_z(z={z}, seed={seed}, N={bandlimit})"),
            )
        }
    };
    Ok(GridFunctionFile::new(&f, z, what))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Factored,
}

#[derive(Debug, Clone)]
pub struct ForwardOutput {
    pub file: GridFunctionFile,
    /// Sup-norm distance between the two methods, with `--check`.
    pub residual: Option<f64>,
}

/// `U_z f` for sampled `f`, which is first interpolated by its Laplace series
/// up to `bandlimit` (default: the largest the grid resolves).
pub fn forward(
    input: &GridFunctionFile,
    z: f64,
    m: Option<usize>,
    method: Method,
    bandlimit: Option<usize>,
    check: bool,
) -> CliResult<ForwardOutput> {
    let f = input.grid_function()?;
    let grid: Arc<SphereGrid> = f.grid().clone();
    let n = bandlimit.unwrap_or(grid.max_bandlimit());
    let series = analyze(&f, n)?;
    // the subsphere rule must resolve the series, the output grid is fixed
    let cfg = match m {
        Some(m) => OperatorConfig::new(z, grid.clone(), m, 0)?,
        None => OperatorConfig::adapted(z, grid.clone(), n)?,
    };
    if cfg.subsphere.exact_degree() < n {
        return Err(CliError::Usage(format!(
            "subsphere resolution {:?} does not resolve degree {n}",
            cfg.subsphere
        )));
    }
    let eval = series.evaluator();
    let run = |method| match method {
        Method::Direct => spherical_transform_direct(&eval, &cfg),
        Method::Factored => spherical_transform_factored(&eval, &cfg),
    };
    let out = run(method)?;
    let residual = if check {
        let other = run(match method {
            Method::Direct => Method::Factored,
            Method::Factored => Method::Direct,
        })?;
        Some(out.max_abs_diff(&other))
    } else {
        None
    };
    let name = match method {
        Method::Direct => "direct",
        Method::Factored => "factored",
    };
    let mut description = format!(
        "U_z ({name}, z={z}, N={n}) of [{}]",
        input.header.description
    );
    if let Some(r) = residual {
        let _ = write!(description, "; cross-method residual {r:e}");
    }
    Ok(ForwardOutput {
        file: GridFunctionFile::new(&out, Some(z), description),
        residual,
    })
}

/// Preimage of `g` under `U_z` in the reflection-symmetric class.
pub fn inverse(input: &GridFunctionFile, z: f64, bandlimit: usize) -> CliResult<GridFunctionFile> {
    let g = input.grid_function()?;
    let cfg = OperatorConfig::new(z, g.grid().clone(), 2 * bandlimit + 2, bandlimit)?;
    let f = inverse_spherical_transform(&g, &cfg)?;
    Ok(GridFunctionFile::new(
        &f,
        Some(z),
        format!(
            "inverse U_z (z={z}, N={bandlimit}) of [{}]",
            input.header.description
        ),
    ))
}

/// CSV `n,energy,sobolev_weighted_energy` for `n = 0..=N`.
pub fn spectrum(input: &GridFunctionFile, bandlimit: Option<usize>, s: f64) -> CliResult<String> {
    let f = input.grid_function()?;
    let n = bandlimit.unwrap_or(f.grid().max_bandlimit());
    let c = analyze(&f, n)?;
    let s = SobolevIndex::new(s)?;
    let d = f.dim();
    let mut out = String::from("n,energy,sobolev_weighted_energy\n");
    for k in 0..=n {
        let e = c.degree_energy(k);
        let _ = writeln!(out, "{k},{e:e},{:e}", s.weight(k, d) * e);
    }
    Ok(out)
}

/// CSV report of every check; the second value is the number of failures.
pub fn verify(cfg: &VerifyConfig) -> CliResult<(String, usize, usize)> {
    let outcomes = run_checks(cfg)?;
    let mut out = String::from("check,d,z,residual,threshold,status\n");
    let mut failed = 0;
    for c in &outcomes {
        if !c.passed() {
            failed += 1;
        }
        let z = c.z.map(|z| z.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{z},{:e},{:e},{}",
            c.check, c.d, c.residual, c.threshold, c.status
        );
    }
    Ok((out, failed, outcomes.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_function_specs() {
        assert_eq!(
            "const".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::Const
        );
        assert_eq!(
            "harmonic(2, 0)".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::Harmonic { n: 2, k: 0 }
        );
        assert_eq!(
            "symmetric_z(z=0.5, seed=7, N=8)"
                .parse::<FunctionSpec>()
                .unwrap(),
            FunctionSpec::SymmetricZ {
                z: 0.5,
                seed: 7,
                bandlimit: 8
            }
        );
        assert_eq!(
            "gauss_bump(0,0,1,0.5)".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::GaussBump {
                center: vec![0.0, 0.0, 1.0],
                width: 0.5
            }
        );
        assert!("harmonic(2)".parse::<FunctionSpec>().is_err());
        assert!("sinc".parse::<FunctionSpec>().is_err());
        assert!("harmonic(2,0".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn payload_length_is_checked() {
        let text = "{\"format_version\":\"1\",\"d\":3,\"grid\":{\"type\":\"gauss-uniform\",\"L\":2,\"M\":2},\"z\":null,\"description\":\"\"}\n1\n2\n3\n";
        assert!(matches!(
            GridFunctionFile::read_from(text.as_bytes()),
            Err(CliError::Format(_))
        ));
        let full = format!("{text}4\n");
        assert_eq!(
            GridFunctionFile::read_from(full.as_bytes())
                .unwrap()
                .values
                .len(),
            4
        );
    }
}
