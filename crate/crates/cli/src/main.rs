use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use toda_core::cartan::CartanData;
use toda_core::curves::{random_group, CurveDocument, GramLadder, RationalCurve};
use toda_core::error::TodaError;
use toda_core::field::{self, InvertedField, LadderField, SingularLiouville, SolutionField};
use toda_core::gauge::{self, HolonomyReport};
use toda_core::quadrature::{self, MassReport};

const PLUCKER_TOL: f64 = 1e-10;
const CURVATURE_TOL: f64 = 1e-5;
const CURVATURE_STEP: f64 = 1e-3;
const POHOZAEV_FORM_TOL: f64 = 1e-3;
const POHOZAEV_FUNCTION_TOL: f64 = 1e-8;
const HOLONOMY_TOL: f64 = 1e-5;
const FIT_RADII: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
const ORDER_RANGE: (f64, f64) = (1.8, 2.2);
/// Below this the finite-difference residual is rounding noise and carries no order.
const ORDER_FLOOR: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "toda", version, about = "Generate and verify explicit solutions of the SU(N+1) Toda system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Curve, Gram ladder and a grid dump of the solution.
    Generate,
    /// PDE, Plücker, curvature and Pohozaev residuals against tolerances.
    Verify,
    /// Masses and exponents by plane quadrature.
    Mass,
    /// Holonomy around a circle, with the predicted value when --mu is given.
    Holonomy,
    /// Pohozaev form on quadrature and fitted exponents, and the Pohozaev function.
    Pohozaev,
    /// Everything above in one document.
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug, Clone)]
struct Options {
    /// Rank N (used for the Veronese curve; checked against curve files).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// `veronese` or the path of a JSON curve document.
    #[arg(long, global = true, default_value = "veronese")]
    curve: String,
    /// Apply a seeded random group element to the curve.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_pde: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_mass: f64,
    #[arg(long, global = true, default_value_t = 3.0)]
    grid_extent: f64,
    #[arg(long, global = true, default_value_t = 21)]
    grid_res: usize,
    #[arg(long, global = true, default_value_t = 0.5)]
    radius: f64,
    #[arg(long, global = true, default_value_t = 1024)]
    steps: usize,
    /// Singularity exponents, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    /// Use the closed-form rank-one solution with a cone point of order M at 0.
    #[arg(long, global = true)]
    singular: Option<u32>,
    /// Apply the inversion z -> 1/z to the ladder solution.
    #[arg(long, global = true)]
    invert: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

enum CliError {
    Parse(String),
    Failure(String),
}

impl From<TodaError> for CliError {
    fn from(e: TodaError) -> Self {
        match e {
            TodaError::Parse(_) => CliError::Parse(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

struct Setup {
    cartan: CartanData,
    ladder: Option<GramLadder>,
    field: Arc<dyn SolutionField>,
}

fn load_curve(opts: &Options) -> CliResult<RationalCurve> {
    let curve = if opts.curve == "veronese" {
        RationalCurve::veronese(opts.n.unwrap_or(1))?
    } else {
        let text = fs::read_to_string(&opts.curve)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", opts.curve)))?;
        let doc: CurveDocument =
            serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", opts.curve)))?;
        if let Some(n) = opts.n {
            if n != doc.n {
                return Err(CliError::Parse(format!(
                    "--n {n} disagrees with curve file rank {}",
                    doc.n
                )));
            }
        }
        doc.into_curve()?
    };
    match opts.seed {
        Some(seed) => Ok(curve.apply_group(&random_group(curve.n(), seed))?),
        None => Ok(curve),
    }
}

fn setup(opts: &Options) -> CliResult<Setup> {
    if let Some(m) = opts.singular {
        return Ok(Setup {
            cartan: CartanData::new(1)?,
            ladder: None,
            field: Arc::new(SingularLiouville::new(m)?),
        });
    }
    let curve = load_curve(opts)?;
    let cartan = CartanData::new(curve.n())?;
    let ladder = GramLadder::build(&curve)?;
    let field: Arc<dyn SolutionField> = match ladder.normalize() {
        Ok(normalized) => Arc::new(LadderField::new(&normalized, &cartan)?),
        Err(TodaError::NormalizationUnavailable { .. }) => Arc::new(LadderField::ramified(&ladder, &cartan)?),
        Err(e) => return Err(e.into()),
    };
    let field: Arc<dyn SolutionField> = if opts.invert {
        Arc::new(InvertedField::new(field)?)
    } else {
        field
    };
    Ok(Setup {
        cartan,
        ladder: Some(ladder),
        field,
    })
}

fn validate(opts: &Options) -> CliResult<()> {
    let positive = [
        ("--tol-pde", opts.tol_pde),
        ("--tol-mass", opts.tol_mass),
        ("--grid-extent", opts.grid_extent),
        ("--radius", opts.radius),
    ];
    for (name, v) in positive {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Parse(format!("{name} must be positive, got {v}")));
        }
    }
    if opts.grid_res < 2 {
        return Err(CliError::Parse("--grid-res must be at least 2".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

#[derive(Serialize)]
struct Verification {
    checks: Vec<Check>,
    pass: bool,
}

fn grid_points(s: &Setup, opts: &Options) -> Vec<Complex64> {
    let domain = s.field.domain();
    field::grid(opts.grid_extent, opts.grid_res)
        .map(|(x, y)| Complex64::new(x, y))
        .filter(|z| domain.contains(*z))
        .collect()
}

fn verify(s: &Setup, opts: &Options) -> CliResult<Verification> {
    let points = grid_points(s, opts);
    let mut checks = Vec::new();

    let mut pde = 0.0f64;
    for &z in &points {
        for r in field::pde_residuals(s.field.as_ref(), &s.cartan, z)? {
            pde = pde.max(r.relative());
        }
    }
    checks.push(Check::at_most("pde_residual", pde, opts.tol_pde));

    if let Some(ladder) = &s.ladder {
        let plucker = (1..=ladder.n())
            .map(|k| {
                let (defect, scale) = ladder.plucker_defect(k);
                defect.max_abs_coeff() / scale.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max);
        checks.push(Check::at_most("plucker_defect", plucker, PLUCKER_TOL));
    }

    let domain = s.field.domain();
    let mut raw = 0.0f64;
    let mut extrapolated = 0.0f64;
    let mut worst_order_gap = 0.0f64;
    for &z in &points {
        if domain.is_punctured() && z.norm() <= 4.0 * CURVATURE_STEP {
            continue;
        }
        let study = gauge::curvature_study(s.field.as_ref(), z, CURVATURE_STEP)?;
        raw = raw.max(study.residual);
        extrapolated = extrapolated.max(study.extrapolated);
        if study.residual > ORDER_FLOOR {
            let gap = (ORDER_RANGE.0 - study.order).max(study.order - ORDER_RANGE.1).max(0.0);
            worst_order_gap = worst_order_gap.max(gap);
        }
    }
    checks.push(Check::at_most("curvature_extrapolated", extrapolated, CURVATURE_TOL));
    checks.push(Check::at_most("curvature_order_outside_range", worst_order_gap, 0.0));
    let mut raw_check = Check::at_most("curvature_residual", raw, CURVATURE_TOL);
    // Reported for reference: the raw O(h²) residual depends on the fixture's scale.
    raw_check.pass = true;
    checks.push(raw_check);

    // The Pohozaev function vanishes only for solutions regular on the whole plane.
    if !domain.is_punctured() {
        let mut poh = 0.0f64;
        for &z in &points {
            poh = poh.max(field::pohozaev_function(s.field.as_ref(), &s.cartan, z)?.norm());
        }
        checks.push(Check::at_most("pohozaev_function", poh, POHOZAEV_FUNCTION_TOL));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Verification { checks, pass })
}

fn mass(s: &Setup, opts: &Options) -> CliResult<MassReport> {
    Ok(quadrature::mass_report(s.field.as_ref(), &s.cartan, opts.tol_mass)?)
}

#[derive(Serialize)]
struct PohozaevReport {
    quadrature_gamma: Vec<f64>,
    quadrature_form: f64,
    fitted_gamma: Vec<f64>,
    fitted_form: f64,
    fit_residual: f64,
    max_function: Option<f64>,
    /// The identities hold for solutions regular on the whole plane only.
    applicable: bool,
    pass: bool,
}

fn pohozaev(s: &Setup, opts: &Options) -> CliResult<PohozaevReport> {
    let masses = mass(s, opts)?;
    let fit = field::asymptotic_fit(s.field.as_ref(), &FIT_RADII)?;
    let fitted_form = s.cartan.pohozaev_form(&fit.gamma)?;
    let applicable = !s.field.domain().is_punctured();
    let max_function = if !applicable {
        None
    } else {
        let mut m = 0.0f64;
        for z in grid_points(s, opts) {
            m = m.max(field::pohozaev_function(s.field.as_ref(), &s.cartan, z)?.norm());
        }
        Some(m)
    };
    let pass = !applicable
        || masses.pohozaev_form_value.abs() <= POHOZAEV_FORM_TOL
        && fitted_form.abs() <= POHOZAEV_FORM_TOL
        && max_function.is_none_or(|m| m <= POHOZAEV_FUNCTION_TOL);
    Ok(PohozaevReport {
        quadrature_gamma: masses.gamma.0,
        quadrature_form: masses.pohozaev_form_value,
        fitted_gamma: fit.gamma.0,
        fitted_form,
        fit_residual: fit.residual,
        max_function,
        applicable,
        pass,
    })
}

fn holonomy(s: &Setup, opts: &Options) -> CliResult<HolonomyReport> {
    if let Some(mu) = &opts.mu {
        if mu.len() != s.cartan.n() {
            return Err(CliError::Parse(format!(
                "--mu needs {} values, got {}",
                s.cartan.n(),
                mu.len()
            )));
        }
    }
    let result = gauge::holonomy(s.field.as_ref(), opts.radius, opts.steps)?;
    Ok(HolonomyReport::new(&result, opts.mu.as_deref())?)
}

fn holonomy_pass(r: &HolonomyReport) -> bool {
    r.reliable
        && r
            .prediction
            .as_ref()
            .is_none_or(|p| p.deviation <= HOLONOMY_TOL)
}

#[derive(Serialize)]
struct LadderSummary {
    wronskian: Vec<[f64; 2]>,
    normalized_wronskian_degree: Option<usize>,
    /// Nonzero coefficients `[a, b, re, im]` of `z^a z̄^b` for each h_k.
    h: Vec<Vec<[f64; 4]>>,
}

#[derive(Serialize)]
struct Sample {
    x: f64,
    y: f64,
    u: Vec<f64>,
}

#[derive(Serialize)]
struct Generated {
    curve: Option<CurveDocument>,
    ladder: Option<LadderSummary>,
    samples: Vec<Sample>,
}

fn generate(s: &Setup, opts: &Options) -> CliResult<Generated> {
    let ladder = s.ladder.as_ref().map(|l| LadderSummary {
        wronskian: l.wronskian().coeffs().iter().map(|c| [c.re, c.im]).collect(),
        normalized_wronskian_degree: l.wronskian().effective_degree(1e-10),
        h: l
            .ladder()
            .iter()
            .map(|h| {
                h.terms()
                    .map(|(&(a, b), c)| [a as f64, b as f64, c.re, c.im])
                    .collect()
            })
            .collect(),
    });
    let mut samples = Vec::new();
    for z in grid_points(s, opts) {
        samples.push(Sample {
            x: z.re,
            y: z.im,
            u: s.field.values(z)?,
        });
    }
    Ok(Generated {
        curve: s.ladder.as_ref().map(|l| l.curve().to_document()),
        ladder,
        samples,
    })
}

#[derive(Serialize)]
struct FullReport {
    verification: Verification,
    mass: MassReport,
    pohozaev: PohozaevReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    holonomy: Option<HolonomyReport>,
    pass: bool,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> CliResult<(String, bool)> {
    let opts = &cli.opts;
    validate(opts)?;
    let s = setup(opts)?;
    if opts.format == Format::Csv && cli.command != Command::Generate {
        return Err(CliError::Parse("--format csv is only available for generate".into()));
    }
    Ok(match cli.command {
        Command::Generate => {
            let text = match opts.format {
                Format::Csv => field::csv_dump(s.field.as_ref(), &s.cartan, opts.grid_extent, opts.grid_res)?,
                Format::Json => to_json(&generate(&s, opts)?),
            };
            (text, true)
        }
        Command::Verify => {
            let v = verify(&s, opts)?;
            let pass = v.pass;
            (to_json(&v), pass)
        }
        Command::Mass => {
            let m = mass(&s, opts)?;
            let pass = m.accepted();
            (to_json(&m), pass)
        }
        Command::Holonomy => {
            let h = holonomy(&s, opts)?;
            let pass = holonomy_pass(&h);
            (to_json(&h), pass)
        }
        Command::Pohozaev => {
            let p = pohozaev(&s, opts)?;
            let pass = p.pass;
            (to_json(&p), pass)
        }
        Command::Report => {
            let verification = verify(&s, opts)?;
            let mass = mass(&s, opts)?;
            let pohozaev = pohozaev(&s, opts)?;
            let holonomy = if s.field.domain().is_punctured() || opts.mu.is_some() {
                Some(holonomy(&s, opts)?)
            } else {
                None
            };
            let pass = verification.pass
                && mass.accepted()
                && pohozaev.pass
                && holonomy.as_ref().is_none_or(holonomy_pass);
            let r = FullReport {
                verification,
                mass,
                pohozaev,
                holonomy,
                pass,
            };
            (to_json(&r), pass)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, pass)) => {
            let written = match &cli.opts.out {
                Some(path) => fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(1);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
