use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use funksphere::VerifyConfig;
use funksphere_cli::{self as cli, CliError, CliResult, FunctionSpec, GridFunctionFile, Method};

/// Spherical section transforms through an interior point of the sphere.
#[derive(Debug, Parser)]
#[command(name = "funksphere", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Factored,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a builtin function on a grid.
    Sample {
        /// const, coord_d, coord_d_sq, gauss_bump(c1,..,cd,width), harmonic(n,k)
        /// or symmetric_z(z,seed,N).
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long = "L", short = 'L')]
        lat: usize,
        #[arg(long = "M", short = 'M')]
        lon: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply U_z to a sampled function.
    Forward {
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        /// Subsphere resolution; chosen from z when omitted.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "direct")]
        method: MethodArg,
        /// Bandlimit of the interpolating series; defaults to the grid's maximum.
        #[arg(long = "N")]
        bandlimit: Option<usize>,
        /// Also run the other method and report the difference.
        #[arg(long)]
        check: bool,
    },
    /// Invert U_z on bandlimited data.
    Inverse {
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        #[arg(long = "N")]
        bandlimit: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-degree energy of a sampled function as CSV.
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "N")]
        bandlimit: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
    },
    /// Run the numerical checks and print a CSV report.
    Verify {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Replaces every default threshold.
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("FUNKSPHERE_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "FUNKSPHERE_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        if n == 0 {
            return Err(CliError::Usage(
                "FUNKSPHERE_THREADS must be positive".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(args: Args) -> CliResult<()> {
    configure_threads()?;
    match args.command {
        Command::Sample {
            function,
            d,
            lat,
            lon,
            out,
        } => {
            let spec: FunctionSpec = function.parse()?;
            cli::sample(&spec, d, lat, lon)?.write_path(&out)?;
        }
        Command::Forward {
            z,
            m,
            input,
            out,
            method,
            bandlimit,
            check,
        } => {
            let file = GridFunctionFile::read_path(&input)?;
            let method = match method {
                MethodArg::Direct => Method::Direct,
                MethodArg::Factored => Method::Factored,
            };
            let result = cli::forward(&file, z, m, method, bandlimit, check)?;
            result.file.write_path(&out)?;
            if let Some(r) = result.residual {
                println!("cross-method residual: {r:e}");
            }
        }
        Command::Inverse {
            z,
            bandlimit,
            input,
            out,
        } => {
            let file = GridFunctionFile::read_path(&input)?;
            cli::inverse(&file, z, bandlimit)?.write_path(&out)?;
        }
        Command::Spectrum {
            input,
            bandlimit,
            s,
        } => {
            let file = GridFunctionFile::read_path(&input)?;
            print!("{}", cli::spectrum(&file, bandlimit, s)?);
        }
        Command::Verify { z, d, seed, tol } => {
            let mut cfg = VerifyConfig {
                seed,
                tol,
                ..VerifyConfig::default()
            };
            if let Some(z) = z {
                cfg.zs = z;
            }
            if let Some(d) = d {
                cfg.dims = d;
            }
            let (report, failed, total) = cli::verify(&cfg)?;
            print!("{report}");
            if failed > 0 {
                return Err(CliError::Verification { failed, total });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
