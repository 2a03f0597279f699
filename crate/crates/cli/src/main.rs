//! `polyext`: command-line front end for the extension harnesses.

mod expr;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use polyext::ball::{
    point_family_report, reduction_equivalence, three_point_harness, LineConfig, ReductionParams, SphereFunction,
    ThreePointParams, ThreePointStatus, DEFAULT_GLOBAL_LINES, DEFAULT_SEED,
};
use polyext::gallery::{gallery_lookup, gallery_run, EntryFunction, GalleryParams, REGISTERED};
use polyext::geometry::{FamilyAnchor, Point2};
use polyext::json::{format_float, to_json_string};
use polyext::polyanalytic::harness::{family_verdict, CircleRecord, HarnessParams};
use polyext::polyanalytic::recovery::recover_coefficients_with;
use polyext::polyanalytic::{disc_fn, DiscFn};
use polyext::semiquadrics::{
    dz_boundary, first_family_grid, first_family_path, second_family_grid, second_family_path, CSV_HEADER,
};
use polyext::spectral::{DEFAULT_SAMPLES, DEFAULT_TOL};

const TOL_ENV: &str = "CIRCLE_EXTEND_TOL";

const AFTER_HELP: &str = "\
Functions (--fn) are gallery names or expressions in z and w: + - * / ^n, |x|,
conj abs abs2 re im exp, the constant i, and zbar/wbar.

Settings: defaults < --config JSON file < flags < CIRCLE_EXTEND_TOL (tolerance only).
The config file may set tolerance, samples, seed, output and format.

CSV columns:
  disc-test    family,param,pole_bound,violation,passed,marginal
  recover      j,k,re,im          (coefficient of z^k conj(z)^j)
  ball-test    index,status,violation
  three-point  point,index,status,violation
  fibers       family,param,re,im (family: first, second, segment, arc)
  gallery      entry,descriptor,expected,observed,match
  reduce       param,line_pass,circle_pass,agree

Exit codes: 0 success, 1 verdict or expectation failure, 2 usage error.";

#[derive(Parser, Debug)]
#[command(name = "polyext", version, about = "Extension tests for functions on the disc and the sphere in C2")]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Verdict tolerance (default 1e-8)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Boundary samples per circle, a power of two (default 256)
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Seed for line sampling (default 0x5EED)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON file with default settings
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-circle verdicts for one circle family in the disc
    DiscTest {
        #[arg(long = "fn")]
        function: String,
        /// interior:A, boundary:A, interior:RE,IM or a bare number
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        pole: usize,
        #[arg(long, default_value_t = 10)]
        circles: usize,
    },
    /// Taylor matrix of a polyanalytic function from concentric circles
    Recover {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        order: usize,
        #[arg(long, value_delimiter = ',', default_values_t = polyext::polyanalytic::DEFAULT_RADII)]
        radii: Vec<f64>,
        /// Highest Taylor degree recovered
        #[arg(long, default_value_t = 12)]
        degree: usize,
    },
    /// Line tests for all sampled complex lines through a point
    BallTest {
        #[arg(long = "fn")]
        function: String,
        /// x,y,u,v for the point (x+iy, u+iv)
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 50)]
        lines: usize,
        #[arg(long, default_value_t = 0)]
        pole: usize,
    },
    /// Gates, line families and the global test for a triple of points
    ThreePoint {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value_t = 50)]
        lines: usize,
        #[arg(long, default_value_t = DEFAULT_GLOBAL_LINES)]
        global_lines: usize,
    },
    /// Fiber paths of both semiquadric families and the boundary of D_z, as CSV
    Fibers {
        /// re,im
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 64)]
        count: usize,
    },
    /// Run gallery entries against their expected verdicts
    Gallery {
        /// Entry name or "all"
        #[arg(default_value = "all")]
        name: String,
    },
    /// Line tests through (t,0) against circle tests of (z-t)^n c_n
    Reduce {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: i64,
    },
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    tolerance: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone)]
struct RunConfig {
    tol: f64,
    samples: usize,
    seed: u64,
    output: Option<PathBuf>,
    format: Format,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Run(String),
}

impl From<polyext::Error> for CliError {
    fn from(e: polyext::Error) -> Self {
        match e {
            polyext::Error::Domain(_) | polyext::Error::UnknownEntry { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Run(e.to_string()),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

impl RunConfig {
    fn resolve(g: &GlobalOpts) -> Result<Self, CliError> {
        let file = match &g.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| CliError::Usage(format!("bad config {}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        let mut tol = g.tol.or(file.tolerance).unwrap_or(DEFAULT_TOL);
        if let Ok(v) = std::env::var(TOL_ENV) {
            tol = v.trim().parse().map_err(|_| CliError::Usage(format!("{TOL_ENV} is not a number: {v}")))?;
        }
        let samples = g.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if !(tol > 0.0 && tol.is_finite()) {
            return usage(format!("tolerance must be positive, got {tol}"));
        }
        if !samples.is_power_of_two() || samples < 8 {
            return usage(format!("samples must be a power of two >= 8, got {samples}"));
        }
        Ok(RunConfig {
            tol,
            samples,
            seed: g.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            output: g.output.clone().or(file.output),
            format: g.format.or(file.format).unwrap_or(Format::Json),
        })
    }
}

fn parse_reals(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("{what} must be {n} comma-separated numbers, got '{s}'")))?;
    if v.len() != n {
        return usage(format!("{what} must be {n} comma-separated numbers, got '{s}'"));
    }
    Ok(v)
}

fn parse_point(s: &str, what: &str) -> Result<Point2, CliError> {
    let v = parse_reals(s, 4, what)?;
    Ok(Point2::new(C64::new(v[0], v[1]), C64::new(v[2], v[3])))
}

fn parse_anchor(s: &str) -> Result<FamilyAnchor, CliError> {
    let (kind, rest) = match s.split_once(':') {
        Some((k, r)) => (Some(k), r),
        None => (None, s),
    };
    let v: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad family anchor '{s}'")))?;
    let alpha = match v.as_slice() {
        [re] => C64::new(*re, 0.0),
        [re, im] => C64::new(*re, *im),
        _ => return usage(format!("bad family anchor '{s}'")),
    };
    Ok(match kind {
        Some("interior") => FamilyAnchor::interior(alpha)?,
        Some("boundary") => FamilyAnchor::boundary(alpha)?,
        None => FamilyAnchor::at(alpha)?,
        Some(k) => return usage(format!("unknown anchor kind '{k}'; use interior or boundary")),
    })
}

fn is_gallery_name(s: &str) -> bool {
    REGISTERED.contains(&s)
}

fn disc_function(spec: &str) -> Result<(String, DiscFn), CliError> {
    if is_gallery_name(spec) {
        return match gallery_lookup(spec)?.function {
            EntryFunction::Disc(f) => Ok((spec.to_string(), f)),
            EntryFunction::Sphere(_) => usage(format!("'{spec}' is a function on the sphere, not the disc")),
        };
    }
    let e = expr::parse(spec).map_err(|e| CliError::Usage(e.to_string()))?;
    if e.uses_w() {
        return usage("disc functions may only use z");
    }
    Ok((spec.to_string(), disc_fn(move |z| e.eval(z, C64::new(0.0, 0.0)))))
}

fn sphere_function(spec: &str) -> Result<SphereFunction, CliError> {
    if is_gallery_name(spec) {
        return match gallery_lookup(spec)?.function {
            EntryFunction::Sphere(f) => Ok(f),
            EntryFunction::Disc(_) => usage(format!("'{spec}' is a function on the disc, not the sphere")),
        };
    }
    let e = expr::parse(spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let dens = e.denominators();
    let f = SphereFunction::new(spec, move |p: Point2| e.eval(p.z, p.w));
    // quotients take the value 0 where a denominator vanishes
    Ok(if dens.is_empty() {
        f
    } else {
        f.with_singular(move |p: Point2| dens.iter().map(|d| d.eval(p.z, p.w)).product())
    })
}

struct Output {
    text: String,
    ok: bool,
}

fn json<T: Serialize>(v: &T, ok: bool) -> Result<Output, CliError> {
    let mut text = to_json_string(v).map_err(|e| CliError::Run(e.to_string()))?;
    text.push('\n');
    Ok(Output { text, ok })
}

#[derive(Serialize)]
struct DiscTestReport {
    function: String,
    family: String,
    pole_bound: usize,
    circles: Vec<CircleRecord>,
    passed: bool,
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Output, CliError> {
    let csv = cfg.format == Format::Csv;
    match &cli.command {
        Command::DiscTest { function, family, pole, circles } => {
            let (label, f) = disc_function(function)?;
            let anchor = parse_anchor(family)?;
            if *circles == 0 {
                return usage("--circles must be positive");
            }
            let hp = HarnessParams { circles_per_family: *circles, ..HarnessParams::default() };
            let mut records = vec![];
            for p in hp.params() {
                let (_, v) = family_verdict(&*f, &anchor, p, *pole, cfg.samples, cfg.tol)?;
                records.push(CircleRecord {
                    family: anchor.to_string(),
                    param: p,
                    pole_bound: v.pole_bound,
                    violation: v.violation,
                    passed: v.passed,
                    marginal: v.marginal,
                });
            }
            let passed = records.iter().all(|r| r.passed);
            if csv {
                let mut s = String::from("family,param,pole_bound,violation,passed,marginal\n");
                for r in &records {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        r.family,
                        format_float(r.param),
                        r.pole_bound,
                        format_float(r.violation),
                        r.passed,
                        r.marginal
                    );
                }
                return Ok(Output { text: s, ok: passed });
            }
            json(
                &DiscTestReport { function: label, family: anchor.to_string(), pole_bound: *pole, circles: records, passed },
                passed,
            )
        }
        Command::Recover { function, order, radii, degree } => {
            let (_, f) = disc_function(function)?;
            let r = recover_coefficients_with(&*f, *order, radii, *degree, cfg.samples)?;
            if csv {
                let mut s = String::from("j,k,re,im\n");
                for (j, row) in r.taylor.iter().enumerate() {
                    for (k, a) in row.iter().enumerate() {
                        let _ = writeln!(s, "{j},{k},{},{}", format_float(a.re), format_float(a.im));
                    }
                }
                return Ok(Output { text: s, ok: true });
            }
            json(&r, true)
        }
        Command::BallTest { function, point, lines, pole } => {
            let f = sphere_function(function)?;
            let a = parse_point(point, "--point")?;
            let lc = LineConfig { samples: cfg.samples, tol: cfg.tol, pole_bound: *pole, ..LineConfig::default() };
            let r = point_family_report(&f, a, *lines, &lc, cfg.seed)?;
            if csv {
                return Ok(Output { text: r.to_csv(), ok: r.family_pass });
            }
            json(&r, r.family_pass)
        }
        Command::ThreePoint { function, a, b, c, lines, global_lines } => {
            let f = sphere_function(function)?;
            let pts = [parse_point(a, "--a")?, parse_point(b, "--b")?, parse_point(c, "--c")?];
            let tp = ThreePointParams {
                lines_per_point: *lines,
                global_lines: *global_lines,
                line: LineConfig { samples: cfg.samples, tol: cfg.tol, ..LineConfig::default() },
                seed: cfg.seed,
            };
            let r = three_point_harness(&f, pts[0], pts[1], pts[2], &tp)?;
            let ok = r.status != ThreePointStatus::Violated;
            if csv {
                let mut s = String::from("point,index,status,violation\n");
                for (name, fam) in ["a", "b", "c"].iter().zip(&r.families) {
                    for line in fam.to_csv().lines().skip(1) {
                        let _ = writeln!(s, "{name},{line}");
                    }
                }
                return Ok(Output { text: s, ok });
            }
            json(&r, ok)
        }
        Command::Fibers { z, t, count } => {
            let v = parse_reals(z, 2, "--z")?;
            let z = C64::new(v[0], v[1]);
            if *count < 2 {
                return usage("--count must be at least 2");
            }
            let mut s = format!("{CSV_HEADER}\n");
            first_family_path(z, &first_family_grid(z, *count))?.csv_rows(&mut s);
            second_family_path(z, *t, &second_family_grid(z, *t, *count)?)?.csv_rows(&mut s);
            dz_boundary(z, *t)?.csv_rows(*count, &mut s);
            Ok(Output { text: s, ok: true })
        }
        Command::Gallery { name } => {
            let gp = GalleryParams { samples: cfg.samples, tol: cfg.tol, seed: cfg.seed, ..GalleryParams::default() };
            let r = gallery_run(name, &gp)?;
            if csv {
                let mut s = String::from("entry,descriptor,expected,observed,match\n");
                for e in &r.entries {
                    for t in &e.tests {
                        let _ = writeln!(
                            s,
                            "{},\"{}\",{},\"{}\",{}",
                            e.entry,
                            t.descriptor.replace('"', "\"\""),
                            t.expected,
                            t.observed.replace('"', "\"\""),
                            t.matched
                        );
                    }
                }
                return Ok(Output { text: s, ok: r.ok });
            }
            json(&r, r.ok)
        }
        Command::Reduce { function, t, n } => {
            let f = sphere_function(function)?;
            let rp = ReductionParams { samples: cfg.samples, tol: cfg.tol, ..ReductionParams::default() };
            let r = reduction_equivalence(&f, *t, *n, &rp)?;
            let ok = r.disagreements == 0;
            if csv {
                let mut s = String::from("param,line_pass,circle_pass,agree\n");
                for p in &r.pairs {
                    let _ = writeln!(
                        s,
                        "{},{},{},{}",
                        format_float(p.param),
                        p.line_verdict.passed,
                        p.circle_verdict.passed,
                        p.agree
                    );
                }
                return Ok(Output { text: s, ok });
            }
            json(&r, ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = RunConfig::resolve(&cli.global).and_then(|cfg| {
        let out = run(&cli, &cfg)?;
        match &cfg.output {
            Some(p) => std::fs::write(p, &out.text)
                .map_err(|e| CliError::Run(format!("cannot write {}: {e}", p.display())))?,
            None => print!("{}", out.text),
        }
        Ok(out.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
