//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use funksphere::samples::{random_bandlimited, random_symmetric, random_unit};
use funksphere::transforms::{apply_n, apply_n_inv};
use funksphere::verify::{
    antipodal_gap, center_residual, pullback_residual, quadrature_eigenvalues,
    stereo_scaling_residual, PULLBACK_STEP,
};
use funksphere::{
    apply_m, funk_eigenvalue, inverse_spherical_transform, r_map, reflection_weight, sphere_grid,
    spherical_transform_direct, spherical_transform_factored, symmetrize_z, GridFunction,
    OperatorConfig, ShiftParameter, Sign, UnitVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: std::ops::RangeInclusive<u64> = 1..=5;
const SWEEP_Z: [f64; 4] = [0.0, 0.3, 0.7, 0.9];

/// Bracket for `|lambda_{2n,3}| (2n + 1/2)^{1/2}`, `1 <= n <= 16`, frozen from
/// an oracle run (extremes 0.790569 at n = 1 and 0.797837 at n = 16).
const SMOOTHING_BRACKET: (f64, f64) = (0.7905, 0.7979);

struct Outcome {
    id: u32,
    name: &'static str,
    worst: f64,
    tol: f64,
    detail: String,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.worst <= self.tol
    }
}

fn z(v: f64) -> ShiftParameter {
    ShiftParameter::new(v).unwrap()
}

/// Residuals of the `d = 3` sweep shared by criteria 1, 2 and 4.
#[derive(Default)]
struct Sweep {
    factorization: f64,
    nullspace: f64,
    symmetric_image: f64,
    evenness: f64,
    factorization_d4: f64,
    evenness_d4: f64,
}

fn run_sweep() -> Sweep {
    let mut out = Sweep::default();
    let grid = Arc::new(sphere_grid(3, 64, 64).unwrap());
    for zv in SWEEP_Z {
        let cfg = OperatorConfig::adapted(zv, grid.clone(), 8).unwrap();
        for seed in SEEDS {
            let p = random_bandlimited(3, 8, seed).unwrap();
            let f = p.evaluator();
            let direct = spherical_transform_direct(&f, &cfg).unwrap();
            let factored = spherical_transform_factored(&f, &cfg).unwrap();
            out.factorization = out.factorization.max(direct.max_abs_diff(&factored));
            out.evenness = out
                .evenness
                .max(antipodal_gap(&direct))
                .max(antipodal_gap(&factored));

            let sf = symmetrize_z(&f, cfg.z).unwrap();
            let anti = |w: &UnitVector| f(w) - sf(w);
            let null = spherical_transform_direct(anti, &cfg).unwrap();
            out.nullspace = out.nullspace.max(null.max_abs());
            let image = spherical_transform_direct(&sf, &cfg).unwrap();
            out.symmetric_image = out.symmetric_image.max(image.max_abs_diff(&direct));
        }
    }

    // d = 4 at coarse resolution
    let grid = Arc::new(sphere_grid(4, 5, 10).unwrap());
    for zv in SWEEP_Z {
        let cfg = OperatorConfig::adapted(zv, grid.clone(), 4).unwrap();
        for seed in SEEDS {
            let p = random_bandlimited(4, 4, seed).unwrap();
            let f = p.evaluator();
            let direct = spherical_transform_direct(&f, &cfg).unwrap();
            let factored = spherical_transform_factored(&f, &cfg).unwrap();
            out.factorization_d4 = out.factorization_d4.max(direct.max_abs_diff(&factored));
            out.evenness_d4 = out.evenness_d4.max(antipodal_gap(&direct));
        }
    }
    out
}

fn inversion() -> f64 {
    let grid = Arc::new(sphere_grid(3, 64, 64).unwrap());
    let mut worst: f64 = 0.0;
    for zv in [0.0, 0.5, 0.9] {
        let cfg = OperatorConfig::adapted(zv, grid.clone(), 8).unwrap();
        for seed in SEEDS {
            let sample = random_symmetric(3, zv, 8, seed).unwrap();
            let f = sample.evaluator();
            let g = spherical_transform_direct(&f, &cfg).unwrap();
            let back = inverse_spherical_transform(&g, &cfg).unwrap();
            let truth = GridFunction::sample(grid.clone(), &f);
            worst = worst.max(back.max_abs_diff(&truth));
        }
    }
    worst
}

fn pullback() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for d in [3, 4] {
        for _ in 0..100 {
            let eta = random_unit(d, &mut rng);
            let zv = rng.random_range(-0.9..0.9);
            worst = worst.max(pullback_residual(&eta, z(zv), PULLBACK_STEP));
        }
    }
    worst
}

fn stereographic() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for d in [3, 4] {
        for zv in [0.1, 0.5, 0.9] {
            for _ in 0..1000 {
                let xi = random_unit(d, &mut rng);
                if let Some(r) = stereo_scaling_residual(&xi, z(zv)) {
                    worst = worst.max(r);
                }
            }
        }
    }
    worst
}

fn centers() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for d in [3, 4] {
        for _ in 0..1000 {
            let xi = random_unit(d, &mut rng);
            let zv = rng.random_range(0.0..1.0 - 1e-6);
            worst = worst.max(center_residual(&xi, z(zv)).unwrap());
        }
    }
    worst
}

fn eigenvalues() -> (f64, String) {
    let lambda = quadrature_eigenvalues(3, 12).unwrap();
    let mut worst: f64 = 0.0;
    let mut odd: f64 = 0.0;
    for (n, l) in lambda.iter().enumerate() {
        worst = worst.max((l - funk_eigenvalue(n, 3)).abs());
        if n % 2 == 1 {
            odd = odd.max(l.abs());
        }
    }
    let two = (lambda[2] + 0.5).abs();
    // scale the sub-tolerances to the common 1e-8 line
    let combined = worst.max(odd * 100.0).max(two * 100.0);
    (
        combined,
        format!(
            "max |quad - P(0)| = {worst:.2e}, max odd = {odd:.2e}, |lambda_2 + 1/2| = {two:.2e}"
        ),
    )
}

fn smoothing() -> (f64, String) {
    let (c1, c2) = SMOOTHING_BRACKET;
    let lambda = quadrature_eigenvalues(3, 32).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for n in 1..=16 {
        for l in [funk_eigenvalue(2 * n, 3), lambda[2 * n]] {
            let v = l.abs() * (2.0 * n as f64 + 0.5).sqrt();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    // distance outside the bracket, plus a violation of c2 / c1 <= 3
    let outside = (c1 - lo).max(hi - c2).max(0.0) + (c2 / c1 - 3.0).max(0.0);
    (
        outside,
        format!(
            "range [{lo:.6}, {hi:.6}] in [{c1}, {c2}], c2/c1 = {:.4}",
            c2 / c1
        ),
    )
}

fn identities() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for d in [3, 4] {
        let coeffs = random_bandlimited(d, 5, 99).unwrap();
        let f = coeffs.evaluator();
        for _ in 0..200 {
            let zs = z(rng.random_range(0.0..0.9));
            let p = random_unit(d, &mut rng);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);

            let mm = apply_m(apply_m(&f, zs, Sign::Plus), zs, Sign::Minus);
            let nn = apply_n_inv(apply_n(&f, zs).unwrap(), zs).unwrap();
            let s1 = symmetrize_z(&f, zs).unwrap();
            let s2 = symmetrize_z(&s1, zs).unwrap();
            let r = r_map(&p, zs).unwrap();
            let rr = r_map(&r, zs).unwrap();

            worst = worst
                .max(rel(mm(&p), f(&p)))
                .max(rel(nn(&p), f(&p)))
                .max(rel(s2(&p), s1(&p)))
                .max(rr.max_abs_diff(&p))
                .max((reflection_weight(&p, zs) * reflection_weight(&r, zs) - 1.0).abs());
        }
    }
    worst
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sweep = run_sweep();
    let (eig, eig_detail) = eigenvalues();
    let (smooth, smooth_detail) = smoothing();
    let outcomes = [
        Outcome {
            id: 1,
            name: "factorization (d = 3)",
            worst: sweep.factorization,
            tol: 1e-8,
            detail: "L = M = 64, N = 8, seeds 1-5, z in {0, 0.3, 0.7, 0.9}".into(),
        },
        Outcome {
            id: 1,
            name: "factorization (d = 4)",
            worst: sweep.factorization_d4,
            tol: 1e-6,
            detail: "L = 5, M = 10, N = 4, seeds 1-5".into(),
        },
        Outcome {
            id: 2,
            name: "nullspace",
            worst: sweep.nullspace,
            tol: 1e-8,
            detail: "max |U_z(f - S f)|".into(),
        },
        Outcome {
            id: 2,
            name: "symmetric image",
            worst: sweep.symmetric_image,
            tol: 1e-8,
            detail: "max |U_z f - U_z S f|".into(),
        },
        Outcome {
            id: 3,
            name: "inversion",
            worst: inversion(),
            tol: 1e-6,
            detail: "d = 3, N = 8, z in {0, 0.5, 0.9}".into(),
        },
        Outcome {
            id: 4,
            name: "range evenness",
            worst: sweep.evenness.max(sweep.evenness_d4),
            tol: 1e-10,
            detail: "antipodal node pairs".into(),
        },
        Outcome {
            id: 5,
            name: "pullback",
            worst: pullback(),
            tol: 1e-6,
            detail: "100 random (eta, z) per d, relative".into(),
        },
        Outcome {
            id: 6,
            name: "stereographic scaling",
            worst: stereographic(),
            tol: 1e-12,
            detail: "1000 points per z and d".into(),
        },
        Outcome {
            id: 7,
            name: "subsphere centers",
            worst: centers(),
            tol: 1e-12,
            detail: "1000 random (xi, z) per d".into(),
        },
        Outcome {
            id: 8,
            name: "Funk eigenvalues",
            worst: eig,
            tol: 1e-8,
            detail: eig_detail,
        },
        Outcome {
            id: 9,
            name: "smoothing degree",
            worst: smooth,
            tol: 0.0,
            detail: smooth_detail,
        },
        Outcome {
            id: 10,
            name: "operator identities",
            worst: identities(),
            tol: 1e-12,
            detail: "M, N, r, W, S over random inputs".into(),
        },
    ];

    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.passed() { "PASS" } else { "FAIL" };
        if !o.passed() {
            failed += 1;
        }
        println!(
            "{tag} criterion {:>2} {:<24} worst = {:.3e}  tol = {:.0e}  ({})",
            o.id, o.name, o.worst, o.tol, o.detail
        );
    }
    println!(
        "acceptance: {} of {} checks passed in {:.1?}",
        outcomes.len() - failed,
        outcomes.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
