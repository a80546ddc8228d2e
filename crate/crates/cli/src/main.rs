//! Verification reports from the command line.
//!
//! Every subcommand drives exactly one library operation and emits a
//! schema-versioned JSON (or CSV) report. Exit codes: 0 all checks pass,
//! 1 a check failed or the computation broke down, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rieszkit::ball::{kernel_checks, poisson_mass, verify_representation};
use rieszkit::constants::{
    bubble_integral, bubble_normalization, hls_constant, riesz_constant, sobolev_constant,
};
use rieszkit::extremal::{critical_scale, ie_residual, Bubble, CriticalScale, KelvinTransform};
use rieszkit::profile::AlgebraicBump;
use rieszkit::quad::{QuadStats, QuadratureSpec};
use rieszkit::radial_ops::superharmonic_chain;
use rieszkit::riesz::{
    hartree_apply, verify_composition, verify_convolution_identity, verify_energy_identity,
};
use rieszkit::{Check, Error, ProblemParams, VerificationReport};

#[derive(Parser)]
#[command(name = "rieszkit", version, about = "Numerical verification of kernel identities, sharp constants, and the moving-spheres procedure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Operator/equation parameters shared by several subcommands. The order
/// `s` may be given directly (mapped to `m = ceil(s) - 1`,
/// `alpha = 2(s - m)`) or split as `--m`/`--alpha`.
#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long)]
    n: u32,
    /// Total operator order; shorthand for the matching --m/--alpha pair.
    #[arg(long, conflicts_with_all = ["m", "alpha"])]
    s: Option<f64>,
    #[arg(long, default_value_t = 0)]
    m: u32,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long)]
    sigma: f64,
    /// Inner (convolved) exponent; critical value if omitted.
    #[arg(long)]
    p: Option<f64>,
    /// Outer exponent; critical value if omitted.
    #[arg(long)]
    q: Option<f64>,
}

impl ParamArgs {
    fn build(&self) -> Result<ProblemParams, Error> {
        let (m, alpha) = match self.s {
            Some(s) => {
                let m = (s.ceil() as u32).saturating_sub(1);
                (m, 2.0 * (s - m as f64))
            }
            None => (self.m, self.alpha),
        };
        match (self.p, self.q) {
            (Some(p), Some(q)) => ProblemParams::new(self.n, m, alpha, self.sigma, p, q),
            (None, None) => ProblemParams::critical(self.n, m, alpha, self.sigma),
            _ => {
                let probe = ProblemParams::critical(self.n, m, alpha, self.sigma)?;
                ProblemParams::new(
                    self.n,
                    m,
                    alpha,
                    self.sigma,
                    self.p.unwrap_or(probe.p),
                    self.q.unwrap_or(probe.q),
                )
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the sharp constants attached to one parameter set.
    Constants(ParamArgs),
    /// Run an identity suite against its closed form.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Locate the critical moving-spheres scale of the extremal bubble.
    MovingSpheres(MovingSpheresArgs),
    /// Evaluate the poly-harmonic chain of the extremal bubble.
    Superharmonic(SuperharmonicArgs),
    /// Positivity/symmetry checks of the moving-spheres comparison kernels.
    Kernels(KernelsArgs),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Convolution of two algebraic kernels against its closed form.
    Identity(IdentityArgs),
    /// Riesz kernel semigroup law.
    Composition(CompositionArgs),
    /// Integral-equation residual of the extremal bubble.
    Bubble(BubbleArgs),
    /// Dirichlet vs convolution energy of the extremal (s = 1).
    Energy(EnergyArgs),
    /// Green + Poisson representation on a ball.
    Representation(RepresentationArgs),
    /// Unit exit mass of the fractional Poisson kernel.
    PoissonMass(PoissonMassArgs),
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long)]
    n: u32,
    /// Half the kernel exponent: checks `|x|^{-2 gamma} * (1+|x|^2)^{-(n-gamma)}`.
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct CompositionArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha2: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

#[derive(Args)]
struct BubbleArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Bubble scale.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Write the computed nonlinearity profile (CSV plus tail sidecar).
    #[arg(long, value_name = "PATH")]
    profile_out: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args)]
struct RepresentationArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    /// Decay exponent of the test profile `(1+r^2)^{-power}`;
    /// defaults to `(n - alpha)/2`.
    #[arg(long)]
    power: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args)]
struct PoissonMassArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Evaluation point's distance from the centre (< radius).
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
}

#[derive(Args)]
struct MovingSpheresArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Bubble scale.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Sphere centre, comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Vec<f64>,
    /// Gap slack used by the search.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 20.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write a `lambda,r,omega` trace along the first axis here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SuperharmonicArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Slack allowed below zero for the stage minima.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct KernelsArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = QuadratureSpec::default();
    let before = QuadStats::snapshot();
    let clock = Instant::now();

    let outcome: Result<(String, serde_json::Value, Vec<Check>), Error> = match &cli.command {
        Command::Constants(args) => run_constants(args),
        Command::Verify(v) => run_verify(v, &spec),
        Command::MovingSpheres(args) => run_moving_spheres(args),
        Command::Superharmonic(args) => run_superharmonic(args, &spec),
        Command::Kernels(args) => run_kernels(args),
    };

    let (command, params, checks) = match outcome {
        Ok(t) => t,
        Err(e @ Error::Domain { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let report = VerificationReport::new(
        command,
        params,
        checks,
        clock.elapsed().as_secs_f64() * 1e3,
        QuadStats::snapshot().since(&before),
    );
    let body = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{body}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Self-consistency checks double as the value table: each constant is
/// recomputed along an independent route where one exists, or echoed
/// against itself where the closed form is the only route.
fn run_constants(args: &ParamArgs) -> Result<(String, serde_json::Value, Vec<Check>), Error> {
    let p = args.build()?;
    let n = p.n;
    let nf = n as f64;
    let s = p.s();
    let r = riesz_constant(2.0 * s, n)?;
    let i_sigma = bubble_integral(p.sigma / 2.0, n)?;
    let i_half = bubble_integral((nf - 2.0 * s) / 2.0, n)?;
    let c = bubble_normalization(&p)?;
    let sob = sobolev_constant(s, n)?;
    let hls = hls_constant(p.sigma, s, n)?;

    // C^{p+q-1} R I(sigma/2) I((n-2s)/2) = 1 at the critical pair.
    let (pc, qc) = p.critical_exponents()?;
    let norm_product = c.powf(pc + qc - 1.0) * r * i_sigma * i_half;
    let checks = vec![
        Check::against("riesz_constant(2s)", r, r, 0.0),
        Check::against("bubble_integral(sigma/2)", i_sigma, i_sigma, 0.0),
        Check::against("bubble_integral((n-2s)/2)", i_half, i_half, 0.0),
        Check::against("bubble_normalization", c, c, 0.0),
        Check::against("sobolev_constant", sob, sob, 0.0),
        Check::against("hls_constant", hls, hls, 0.0),
        Check::against("normalization closes the integral equation", norm_product, 1.0, 1e-12),
    ];
    Ok((
        "constants".into(),
        json!({"n": n, "m": p.m, "alpha": p.alpha, "s": s, "sigma": p.sigma, "p": p.p, "q": p.q}),
        checks,
    ))
}

fn run_verify(
    cmd: &VerifyCmd,
    spec: &QuadratureSpec,
) -> Result<(String, serde_json::Value, Vec<Check>), Error> {
    match cmd {
        VerifyCmd::Identity(a) => {
            let radii = [0.0, 0.5, 1.0, 3.0, 10.0];
            let checks = verify_convolution_identity(a.n, a.gamma, &radii, a.tol, spec)?;
            Ok((
                "verify identity".into(),
                json!({"n": a.n, "gamma": a.gamma, "radii": radii, "tol": a.tol}),
                checks,
            ))
        }
        VerifyCmd::Composition(a) => {
            let radii = [0.5, 1.0, 2.0];
            let checks = verify_composition(a.n, a.alpha1, a.alpha2, &radii, a.tol, spec)?;
            Ok((
                "verify composition".into(),
                json!({"n": a.n, "alpha1": a.alpha1, "alpha2": a.alpha2, "radii": radii, "tol": a.tol}),
                checks,
            ))
        }
        VerifyCmd::Bubble(a) => {
            let p = a.params.build()?;
            // The candidate is always the critically normalized bubble;
            // testing it against perturbed exponents is how the residual
            // detects non-solutions.
            let crit = ProblemParams::critical(p.n, p.m, p.alpha, p.sigma)?;
            let b = Bubble::scaled(&crit, a.mu, vec![0.0; p.n as usize])?;
            let radii: Vec<f64> = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
                .iter()
                .map(|r| r / a.mu)
                .collect();
            let res = ie_residual(&b, &p, &radii, spec)?;
            if let Some(path) = &a.profile_out {
                let f1 = hartree_apply(&b.radial_profile(), &p, spec)?;
                f1.write_csv(path)?;
            }
            let checks = vec![Check::residual("integral-equation residual", res, a.tol)];
            Ok((
                "verify bubble".into(),
                json!({"n": p.n, "m": p.m, "alpha": p.alpha, "sigma": p.sigma, "p": p.p, "q": p.q, "mu": a.mu, "tol": a.tol}),
                checks,
            ))
        }
        VerifyCmd::Energy(a) => {
            let p = ProblemParams::critical(a.n, 0, 2.0, a.sigma)?;
            let checks = verify_energy_identity(&p, a.tol, spec)?;
            Ok((
                "verify energy".into(),
                json!({"n": a.n, "sigma": a.sigma, "tol": a.tol}),
                checks,
            ))
        }
        VerifyCmd::Representation(a) => {
            let power = a.power.unwrap_or((a.n as f64 - a.alpha) / 2.0);
            let u = AlgebraicBump::new(1.0, 1.0, power);
            let radii = [0.0, a.radius / 2.0];
            let checks = verify_representation(&u, a.n, a.alpha, a.radius, &radii, a.tol, spec)?;
            Ok((
                "verify representation".into(),
                json!({"n": a.n, "alpha": a.alpha, "radius": a.radius, "power": power, "tol": a.tol}),
                checks,
            ))
        }
        VerifyCmd::PoissonMass(a) => {
            let m = poisson_mass(a.n, a.alpha, a.radius, a.x, spec)?;
            let checks = vec![Check::against("exit mass", m, 1.0, a.tol)];
            Ok((
                "verify poisson-mass".into(),
                json!({"n": a.n, "alpha": a.alpha, "radius": a.radius, "x": a.x, "tol": a.tol}),
                checks,
            ))
        }
    }
}

fn run_moving_spheres(
    args: &MovingSpheresArgs,
) -> Result<(String, serde_json::Value, Vec<Check>), Error> {
    let p = args.params.build()?;
    let n = p.n as usize;
    let center = if args.center.is_empty() {
        vec![0.0; n]
    } else {
        args.center.clone()
    };
    if center.len() != n {
        return Err(Error::Domain {
            name: "center",
            value: center.len() as f64,
            requirement: "length n",
        });
    }
    let b = Bubble::scaled(&p, args.mu, vec![0.0; n])?;
    let f = |x: &[f64]| b.value(x);
    let nu = p.n as f64 - 2.0 * p.s();

    let found = critical_scale(&f, &center, nu, args.lambda_max, args.tol, args.seed)?;
    let dist2: f64 = center.iter().map(|c| c * c).sum();
    // Kelvin images of the bubble family have their asymptotic coefficient
    // matched exactly at lambda^2 = mu^{-2} + |x0|^2.
    let expect = (1.0 / (args.mu * args.mu) + dist2).sqrt();
    let lambda = match found {
        CriticalScale::Finite(l) => l,
        CriticalScale::Infinite => f64::INFINITY,
    };
    let checks = vec![Check::against(
        "critical scale",
        lambda,
        expect,
        1e-5,
    )];

    if let Some(path) = &args.trace {
        let kelvin_err = write_trace(path, &f, &center, nu, lambda)?;
        if let Some(e) = kelvin_err {
            return Err(e);
        }
    }
    Ok((
        "moving-spheres".into(),
        json!({
            "n": p.n, "m": p.m, "alpha": p.alpha, "sigma": p.sigma,
            "mu": args.mu, "center": center, "tol": args.tol,
            "lambda_max": args.lambda_max, "seed": args.seed
        }),
        checks,
    ))
}

/// `lambda,r,omega` rows along the first axis for a bracket of scales
/// around the located one.
fn write_trace<F: Fn(&[f64]) -> f64>(
    path: &PathBuf,
    u: &F,
    x0: &[f64],
    nu: f64,
    lambda_c: f64,
) -> Result<Option<Error>, Error> {
    let mut rows = String::from("lambda,r,omega\n");
    for factor in [0.5, 0.9, 1.0, 1.1] {
        let lambda = factor * lambda_c;
        if !lambda.is_finite() {
            continue;
        }
        let kelvin = KelvinTransform::new(u, x0.to_vec(), lambda, nu)?;
        for i in 0..64 {
            let r = lambda * (i as f64 + 0.5) / 64.0;
            let mut x = x0.to_vec();
            x[0] += r;
            let omega = kelvin.eval(&x)? - u(&x);
            rows.push_str(&format!("{lambda:.9e},{r:.9e},{omega:.17e}\n"));
        }
    }
    std::fs::write(path, rows).map_err(|e| Error::Profile(format!("trace write: {e}")))?;
    Ok(None)
}

fn run_superharmonic(
    args: &SuperharmonicArgs,
    spec: &QuadratureSpec,
) -> Result<(String, serde_json::Value, Vec<Check>), Error> {
    let p = args.params.build()?;
    let b = Bubble::standard(&p)?;
    let radii: Vec<f64> = if p.alpha == 2.0 {
        (0..30).map(|i| i as f64 / 3.0).collect()
    } else {
        vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 40.0]
    };
    let stages = superharmonic_chain(&b.radial_profile(), &p, &radii, spec)?;
    let checks = stages
        .iter()
        .map(|st| {
            Check::at_least(
                format!("stage {} minimum", st.order),
                st.minimum,
                0.0,
                args.tol,
            )
        })
        .collect();
    Ok((
        "superharmonic".into(),
        json!({"n": p.n, "m": p.m, "alpha": p.alpha, "sigma": p.sigma, "tol": args.tol}),
        checks,
    ))
}

fn run_kernels(args: &KernelsArgs) -> Result<(String, serde_json::Value, Vec<Check>), Error> {
    let p = args.params.build()?;
    let n = p.n as usize;
    let center = if args.center.is_empty() {
        vec![0.0; n]
    } else {
        args.center.clone()
    };
    let checks = kernel_checks(
        p.n,
        p.s(),
        p.sigma,
        args.lambda,
        &center,
        args.samples,
        args.seed,
    )?;
    Ok((
        "kernels".into(),
        json!({
            "n": p.n, "s": p.s(), "sigma": p.sigma, "lambda": args.lambda,
            "center": center, "samples": args.samples, "seed": args.seed
        }),
        checks,
    ))
}
