//! Functions on the unit sphere of C² and their complex-line tests.
//!
//! A continuous `f` on the sphere extends holomorphically into the ball along
//! a complex line `L` when its restriction to the circle `L ∩ bB` has no
//! negative Fourier modes. Testing families of lines (all lines through a
//! point, or sampled lines through the whole ball) is how the harnesses here
//! probe global extendibility. The Fourier expansion in the phase of `w`
//! reduces line tests through `(t, 0)` to circle tests in the disc.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::{
    ball_mobius, ct_circle, herm_inner, BallDisc, Circle, ComplexLine, Point2, C64,
};
use crate::json::format_float;
use crate::polyanalytic::{dbar_residual, default_dbar_grid, recovery, DEFAULT_DBAR_STEP, DEFAULT_RADII};
use crate::spectral::{circle_spectrum, extend_verdict, ExtendVerdict, DEFAULT_SAMPLES, DEFAULT_TOL};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_PHASE_SAMPLES: usize = 64;
pub const EXCLUSION_RADIUS: f64 = 1e-6;

pub type SphereEval = Arc<dyn Fn(Point2) -> C64 + Send + Sync>;

/// A function on the unit sphere of C².
///
/// `singular`, when present, vanishes exactly where the defining formula is a
/// quotient with zero denominator. There `f` takes its continuous value 0, and
/// lines passing close to that locus are excluded from family reports.
#[derive(Clone)]
pub struct SphereFunction {
    pub label: String,
    eval: SphereEval,
    singular: Option<SphereEval>,
}

impl std::fmt::Debug for SphereFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SphereFunction").field("label", &self.label).finish_non_exhaustive()
    }
}

impl SphereFunction {
    pub fn new(label: impl Into<String>, f: impl Fn(Point2) -> C64 + Send + Sync + 'static) -> Self {
        SphereFunction { label: label.into(), eval: Arc::new(f), singular: None }
    }

    pub fn with_singular(mut self, s: impl Fn(Point2) -> C64 + Send + Sync + 'static) -> Self {
        self.singular = Some(Arc::new(s));
        self
    }

    pub fn eval(&self, p: Point2) -> C64 {
        if let Some(s) = &self.singular {
            if s(p) == C64::new(0.0, 0.0) {
                return C64::new(0.0, 0.0);
            }
        }
        (self.eval)(p)
    }

    pub fn has_singular_locus(&self) -> bool {
        self.singular.is_some()
    }

    /// `|singular(p)|`, or `None` for functions without a singular locus.
    pub fn singular_distance(&self, p: Point2) -> Option<f64> {
        self.singular.as_ref().map(|s| s(p).norm())
    }

    /// `f ∘ φ_a`, where `φ_a` is the ball automorphism swapping `0` and `a`
    /// (its own inverse).
    pub fn compose_mobius(&self, a: Point2, label: impl Into<String>) -> Result<Self> {
        if !(a.norm_sqr() < 1.0) {
            return domain("ball automorphism needs |a| < 1");
        }
        let map = move |p: Point2| ball_mobius(a, p).unwrap_or(Point2::new(C64::new(f64::NAN, 0.0), C64::new(f64::NAN, 0.0)));
        let inner = self.clone();
        let mut out = SphereFunction::new(label, move |p| inner.eval(map(p)));
        if let Some(s) = self.singular.clone() {
            out.singular = Some(Arc::new(move |p| s(map(p))));
        }
        Ok(out)
    }
}

fn one_minus_abs2(z: C64) -> f64 {
    let m = z.norm();
    (1.0 - m) * (1.0 + m)
}

/// All phase modes of `θ ↦ f(z, e^{iθ}s)`, `s = √(1−|z|²)`, by FFT:
/// entry `k` is the mode `k` for `k < M/2` and `k − M` above.
pub fn phase_modes(f: &SphereFunction, z: C64, m: usize) -> Result<Vec<C64>> {
    if m < 8 || !m.is_power_of_two() {
        return domain(format!("phase sample count must be a power of two >= 8, got {m}"));
    }
    let q = one_minus_abs2(z);
    if !(q > 0.0) {
        return domain(format!("|z| must be < 1, got {}", z.norm()));
    }
    let s = q.sqrt();
    let mut buf: Vec<C64> = (0..m)
        .map(|k| f.eval(Point2::new(z, C64::from_polar(s, 2.0 * PI * k as f64 / m as f64))))
        .collect();
    if let Some(k) = buf.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { theta: 2.0 * PI * k as f64 / m as f64 });
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let inv = 1.0 / m as f64;
    Ok(buf.into_iter().map(|c| c * inv).collect())
}

fn mode(modes: &[C64], n: i64) -> C64 {
    let m = modes.len() as i64;
    if n >= m / 2 || n < -m / 2 {
        return C64::new(0.0, 0.0);
    }
    modes[n.rem_euclid(m) as usize]
}

/// `c_n(z) = (1−|z|²)^{−n/2}·(1/M)·Σ_k e^{−inθ_k} f(z, e^{iθ_k}√(1−|z|²))`.
/// The prefactor is formed in log space.
pub fn w_coefficient(f: &SphereFunction, n: i64, z: C64, m: usize) -> Result<C64> {
    let modes = phase_modes(f, z, m)?;
    Ok(mode(&modes, n) * prefactor(n, z))
}

fn prefactor(n: i64, z: C64) -> f64 {
    (-(n as f64) / 2.0 * one_minus_abs2(z).ln()).exp()
}

/// `c_n` sampled on a set of disc points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSlice {
    pub n: i64,
    pub grid: Vec<C64>,
    pub values: Vec<C64>,
}

pub fn fourier_slice(f: &SphereFunction, n: i64, grid: &[C64], m: usize) -> Result<FourierSlice> {
    let values = grid
        .par_iter()
        .map(|&z| w_coefficient(f, n, z, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierSlice { n, grid: grid.to_vec(), values })
}

/// Polar grid of 12 Chebyshev-spaced radii in `(0, 0.97]` times 32 angles.
pub fn slice_grid() -> Vec<C64> {
    let rings = 12;
    let mut g = vec![];
    for k in 1..=rings {
        let r = 0.485 * (1.0 - (PI * k as f64 / rings as f64).cos());
        for j in 0..32 {
            g.push(C64::from_polar(r, 2.0 * PI * j as f64 / 32.0));
        }
    }
    g
}

/// Fejér (Cesàro) mean of the phase modes at angle `θ`, using modes `|k| < n`.
pub fn fejer_mean(modes: &[C64], n: usize, theta: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for k in -(n as i64 - 1)..=(n as i64 - 1) {
        let w = 1.0 - k.unsigned_abs() as f64 / n as f64;
        acc += mode(modes, k) * C64::from_polar(w, k as f64 * theta);
    }
    acc
}

/// `2σ_{2n} − σ_n`: reproduces every mode `|k| ≤ n` exactly and damps the
/// rest linearly up to `2n`. Needs at least `4n` phase samples.
pub fn vallee_poussin_mean(modes: &[C64], n: usize, theta: f64) -> C64 {
    2.0 * fejer_mean(modes, 2 * n, theta) - fejer_mean(modes, n, theta)
}

#[derive(Debug, Clone, Copy)]
pub struct LineConfig {
    pub samples: usize,
    pub tol: f64,
    pub pole_bound: usize,
    pub exclusion: f64,
}

impl Default for LineConfig {
    fn default() -> Self {
        LineConfig { samples: DEFAULT_SAMPLES, tol: DEFAULT_TOL, pole_bound: 0, exclusion: EXCLUSION_RADIUS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum LineStatus {
    Pass,
    Fail,
    /// The line's sphere circle runs within the exclusion radius of the
    /// function's singular locus.
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineTestReport {
    pub line: ComplexLine,
    pub disc: BallDisc,
    pub status: LineStatus,
    pub verdict: Option<ExtendVerdict>,
}

impl LineTestReport {
    pub fn passed(&self) -> bool {
        self.status == LineStatus::Pass
    }

    pub fn violation(&self) -> f64 {
        self.verdict.map_or(0.0, |v| v.violation)
    }
}

/// Restricts `f` to the circle where `line` meets the sphere and tests for a
/// pole of degree at most `cfg.pole_bound` at the center of the line's disc.
pub fn line_restriction_verdict(f: &SphereFunction, line: &ComplexLine, cfg: &LineConfig) -> Result<LineTestReport> {
    let disc = line
        .ball_disc()
        .filter(|d| d.rho > 1e-9)
        .ok_or_else(|| Error::Domain(format!("line through {} misses the ball", line.base)))?;
    if f.has_singular_locus() {
        let fine = 16 * cfg.samples;
        let near = (0..fine).any(|k| {
            let p = line.at(disc.boundary_param(2.0 * PI * k as f64 / fine as f64));
            f.singular_distance(p).is_some_and(|d| d < cfg.exclusion)
        });
        if near {
            return Ok(LineTestReport { line: *line, disc, status: LineStatus::Excluded, verdict: None });
        }
    }
    let s = circle_spectrum(|zeta| f.eval(line.at(zeta)), &disc.as_circle(), cfg.samples)?;
    let v = extend_verdict(&s, cfg.pole_bound, cfg.tol)?;
    let status = if v.passed { LineStatus::Pass } else { LineStatus::Fail };
    Ok(LineTestReport { line: *line, disc, status, verdict: Some(v) })
}

/// `count` projective directions from a Fibonacci lattice on the Riemann
/// sphere, with an azimuth offset drawn from `seed`.
pub fn lattice_directions(count: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = rng.random::<f64>() * 2.0 * PI;
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let polar = (1.0 - 2.0 * (i as f64 + 0.5) / count as f64).acos();
            let psi = offset + golden * i as f64;
            Point2::new(
                C64::new((polar / 2.0).cos(), 0.0),
                C64::from_polar((polar / 2.0).sin(), psi),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexedLine {
    pub index: usize,
    #[serde(flatten)]
    pub report: LineTestReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub function: String,
    pub point: Point2,
    pub lines: Vec<IndexedLine>,
    pub tested: usize,
    pub excluded: usize,
    pub first_failure: Option<usize>,
    pub family_pass: bool,
}

impl FamilyReport {
    /// CSV rows `index,status,violation` for every line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,status,violation\n");
        for l in &self.lines {
            let status = match l.report.status {
                LineStatus::Pass => "PASS",
                LineStatus::Fail => "FAIL",
                LineStatus::Excluded => "EXCLUDED",
            };
            let _ = writeln!(out, "{},{status},{}", l.index, format_float(l.report.violation()));
        }
        out
    }
}

/// Tests `f` along `line_count` lattice lines through `a`, keeping those that
/// meet the ball.
pub fn point_family_report(
    f: &SphereFunction,
    a: Point2,
    line_count: usize,
    cfg: &LineConfig,
    seed: u64,
) -> Result<FamilyReport> {
    let lines: Vec<(usize, ComplexLine)> = lattice_directions(line_count, seed)
        .into_iter()
        .enumerate()
        .filter_map(|(i, d)| ComplexLine::new(a, d).ok().map(|l| (i, l)))
        .filter(|(_, l)| l.ball_disc().is_some_and(|d| d.rho > 1e-9))
        .collect();
    if lines.is_empty() {
        return domain(format!("no sampled line through {a} meets the ball"));
    }
    let reports = lines
        .par_iter()
        .map(|(i, l)| Ok(IndexedLine { index: *i, report: line_restriction_verdict(f, l, cfg)? }))
        .collect::<Result<Vec<_>>>()?;
    let excluded = reports.iter().filter(|r| r.report.status == LineStatus::Excluded).count();
    let first_failure = reports.iter().find(|r| r.report.status == LineStatus::Fail).map(|r| r.index);
    Ok(FamilyReport {
        function: f.label.clone(),
        point: a,
        tested: reports.len() - excluded,
        excluded,
        first_failure,
        family_pass: first_failure.is_none(),
        lines: reports,
    })
}

/// Sampled lines through the ball: a base point uniform in the ball and a
/// uniform direction, both by rejection from the cube.
pub fn random_lines(count: usize, seed: u64) -> Vec<ComplexLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cube = |rng: &mut ChaCha8Rng| loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * 2.0 - 1.0);
        let p = Point2::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]));
        let n = p.norm();
        if n < 1.0 && n > 1e-3 {
            return p;
        }
    };
    (0..count)
        .map(|_| {
            let base = cube(&mut rng);
            let dir = cube(&mut rng);
            ComplexLine::new(base, dir).expect("nonzero direction")
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalReport {
    pub function: String,
    pub lines_tested: usize,
    pub excluded: usize,
    pub failures: usize,
    pub worst_violation: f64,
    pub first_failure: Option<IndexedLine>,
    /// No sampled line fails. This can only certify failure; a pass means no
    /// violation was found.
    pub passed: bool,
}

pub const DEFAULT_GLOBAL_LINES: usize = 200;

pub fn global_holomorphy_test(f: &SphereFunction, line_count: usize, cfg: &LineConfig, seed: u64) -> Result<GlobalReport> {
    let lines = random_lines(line_count, seed);
    let reports = lines
        .par_iter()
        .enumerate()
        .map(|(i, l)| Ok(IndexedLine { index: i, report: line_restriction_verdict(f, l, cfg)? }))
        .collect::<Result<Vec<_>>>()?;
    let excluded = reports.iter().filter(|r| r.report.status == LineStatus::Excluded).count();
    let failures = reports.iter().filter(|r| r.report.status == LineStatus::Fail).count();
    let worst_violation = reports.iter().map(|r| r.report.violation()).fold(0.0, f64::max);
    Ok(GlobalReport {
        function: f.label.clone(),
        lines_tested: reports.len() - excluded,
        excluded,
        failures,
        worst_violation,
        first_failure: reports.into_iter().find(|r| r.report.status == LineStatus::Fail),
        passed: failures == 0,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ReductionParams {
    pub circles: usize,
    pub samples: usize,
    pub phase_samples: usize,
    pub tol: f64,
}

impl Default for ReductionParams {
    fn default() -> Self {
        ReductionParams { circles: 10, samples: DEFAULT_SAMPLES, phase_samples: DEFAULT_PHASE_SAMPLES, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionPair {
    /// `T` (the circle's center) for `t > 0`, the radius for `t = 0`.
    pub param: f64,
    pub circle: Circle,
    pub line: ComplexLine,
    pub line_verdict: ExtendVerdict,
    pub circle_verdict: ExtendVerdict,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub function: String,
    pub t: f64,
    pub n: i64,
    pub pairs: Vec<ReductionPair>,
    pub line_pass: bool,
    pub circle_pass: bool,
    pub disagreements: usize,
}

/// The line through `(t, 0)` whose sphere circle projects onto the circle of
/// `C_t` with center `T` (radius `R` when `t = 0`).
fn reduction_line_and_circle(t: f64, param: f64) -> Result<(ComplexLine, Circle)> {
    if t == 0.0 {
        let line = ComplexLine::new(Point2::default(), Point2::real(param, (1.0 - param * param).sqrt()))?;
        return Ok((line, Circle::new(C64::new(0.0, 0.0), param)?));
    }
    let x = 1.0 - param / t;
    let line = ComplexLine::new(Point2::real(t, 0.0), Point2::real(x.sqrt(), (1.0 - x).sqrt()))?;
    Ok((line, ct_circle(t, param)?))
}

/// Compares the line test of `w^n c_n(z)` along lines through `(t, 0)` with the
/// circle test of `(z − t)^n c_n(z)` on the matching circles of `C_t`.
pub fn reduction_equivalence(f: &SphereFunction, t: f64, n: i64, p: &ReductionParams) -> Result<ReductionReport> {
    if !(0.0..1.0).contains(&t) {
        return domain(format!("t must lie in [0, 1), got {t}"));
    }
    if n < 0 {
        return domain("reduction needs n >= 0");
    }
    let k = p.circles;
    let params: Vec<f64> = (0..k)
        .map(|i| {
            if t == 0.0 {
                0.05 + 0.9 * i as f64 / (k.max(2) - 1) as f64
            } else {
                t * (i as f64 + 0.5) / k as f64
            }
        })
        .collect();
    let m = p.phase_samples;
    let pairs = params
        .par_iter()
        .map(|&param| {
            let (line, circle) = reduction_line_and_circle(t, param)?;
            let disc = line.ball_disc().ok_or_else(|| Error::Domain("reduction line misses the ball".into()))?;
            // w^n c_n(z) is the n-th phase mode of f through (z, w)
            let psi = |zeta: C64| {
                let q = line.at(zeta);
                let acc = (0..m).fold(C64::new(0.0, 0.0), |acc, j| {
                    let th = 2.0 * PI * j as f64 / m as f64;
                    let v = f.eval(Point2::new(q.z, q.w * C64::from_polar(1.0, th)));
                    acc + v * C64::from_polar(1.0, -(n as f64) * th)
                });
                acc / m as f64
            };
            let ls = circle_spectrum(psi, &disc.as_circle(), p.samples)?;
            let line_verdict = extend_verdict(&ls, 0, p.tol)?;
            let g = |z: C64| {
                let c = w_coefficient(f, n, z, m).unwrap_or(C64::new(f64::NAN, 0.0));
                (z - t).powi(n as i32) * c
            };
            let cs = circle_spectrum(g, &circle, p.samples)?;
            let circle_verdict = extend_verdict(&cs, 0, p.tol)?;
            Ok(ReductionPair {
                param,
                circle,
                line,
                agree: line_verdict.passed == circle_verdict.passed,
                line_verdict,
                circle_verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReductionReport {
        function: f.label.clone(),
        t,
        n,
        line_pass: pairs.iter().all(|q| q.line_verdict.passed),
        circle_pass: pairs.iter().all(|q| q.circle_verdict.passed),
        disagreements: pairs.iter().filter(|q| !q.agree).count(),
        pairs,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct StructureParams {
    pub phase_samples: usize,
    pub samples: usize,
    pub tol: f64,
    pub dbar_tol: f64,
    /// Negative modes `−1..=−negative_modes` are checked for vanishing.
    pub negative_modes: i64,
    pub taylor_degree: usize,
}

impl Default for StructureParams {
    fn default() -> Self {
        StructureParams {
            phase_samples: DEFAULT_PHASE_SAMPLES,
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            dbar_tol: 1e-5,
            negative_modes: 4,
            taylor_degree: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeModeCheck {
    pub n: i64,
    pub max_abs: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCheck {
    pub n: i64,
    /// Largest `|g_n|` on the slice grid, `g_n = c_n·(1−|z|²)^n`.
    pub scale: f64,
    pub recovery_residual: Option<f64>,
    pub recovery_error: Option<String>,
    pub dbar_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub function: String,
    pub negative: Vec<NegativeModeCheck>,
    pub modes: Vec<ModeCheck>,
    pub passed: bool,
}

/// Radii for an order-`n` recovery: the defaults, or `n + 1` equispaced radii
/// over the same range when more are needed.
fn recovery_radii(n: usize) -> Vec<f64> {
    if n < DEFAULT_RADII.len() {
        DEFAULT_RADII.to_vec()
    } else {
        (0..=n).map(|i| 0.25 + 0.6 * i as f64 / n as f64).collect()
    }
}

/// Checks that negative phase modes vanish and that each
/// `g_n = c_n·(1−|z|²)^n`, `0 ≤ n ≤ n_max`, is polyanalytic of order `≤ n`.
pub fn corollary31_check(f: &SphereFunction, n_max: i64, p: &StructureParams) -> Result<StructureReport> {
    if n_max < 0 {
        return domain("n_max must be >= 0");
    }
    let m = p.phase_samples;
    let grid = slice_grid();
    let modes_on_grid = grid
        .par_iter()
        .map(|&z| phase_modes(f, z, m))
        .collect::<Result<Vec<_>>>()?;
    let sup = modes_on_grid
        .iter()
        .map(|ms| ms.iter().map(|c| c.norm()).sum::<f64>())
        .fold(1.0, f64::max);

    let negative = (1..=p.negative_modes)
        .map(|k| {
            let n = -k;
            let max_abs = grid
                .iter()
                .zip(&modes_on_grid)
                .map(|(z, ms)| (mode(ms, n) * prefactor(n, *z)).norm())
                .fold(0.0, f64::max);
            NegativeModeCheck { n, max_abs, passed: max_abs <= p.tol * sup }
        })
        .collect::<Vec<_>>();

    let mut modes = vec![];
    for n in 0..=n_max {
        // g_n = (1−|z|²)^{n/2} times the n-th phase mode
        let g = move |z: C64| {
            phase_modes(f, z, m)
                .map(|ms| mode(&ms, n) * one_minus_abs2(z).powf(n as f64 / 2.0))
                .unwrap_or(C64::new(f64::NAN, 0.0))
        };
        let scale = grid
            .iter()
            .zip(&modes_on_grid)
            .map(|(z, ms)| (mode(ms, n) * one_minus_abs2(*z).powf(n as f64 / 2.0)).norm())
            .fold(0.0, f64::max);
        let order = n as usize;
        let dbar = dbar_residual(&g, order, &default_dbar_grid(), DEFAULT_DBAR_STEP)?;
        let (recovery_residual, recovery_error) = match recovery::recover_coefficients_with(
            &g,
            order,
            &recovery_radii(order),
            p.taylor_degree,
            p.samples,
        ) {
            Ok(r) => (Some(r.residual), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let s = scale.max(1.0);
        let passed = recovery_residual.is_some_and(|r| r <= p.tol * s) && dbar <= p.dbar_tol * s;
        modes.push(ModeCheck { n, scale, recovery_residual, recovery_error, dbar_residual: dbar, passed });
    }
    let passed = negative.iter().all(|c| c.passed) && modes.iter().all(|c| c.passed);
    Ok(StructureReport { function: f.label.clone(), negative, modes, passed })
}

const GATE_TOL: f64 = 1e-9;

/// The admissibility conditions for a triple of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    /// `|det(b − a, c − a)|` relative to `|b − a|·|c − a|`.
    pub collinearity: f64,
    pub collinear: bool,
    pub ab: C64,
    pub ac: C64,
    pub bc: C64,
    /// A relabelling `[x, y, z]` of `(a, b, c)` = `(0, 1, 2)` satisfying every
    /// condition: the line through x and y meets the ball, `<x|y> ≠ 1` if one
    /// of x, y is inside the ball and the other outside its closure, and at
    /// least one of `<x|z>`, `<y|z>` differs from 1.
    pub ordering: Option<[usize; 3]>,
    pub passed: bool,
}

fn is_one(c: C64) -> bool {
    (c - C64::new(1.0, 0.0)).norm() <= GATE_TOL
}

pub fn gate_report(a: Point2, b: Point2, c: Point2) -> GateReport {
    let u = b - a;
    let v = c - a;
    let det = (u.z * v.w - u.w * v.z).norm();
    let denom = u.norm() * v.norm();
    let collinearity = if denom > 0.0 { det / denom } else { 0.0 };
    let collinear = collinearity <= GATE_TOL;
    let pts = [a, b, c];
    let inner = |i: usize, j: usize| herm_inner(pts[i], pts[j]);
    let mut ordering = None;
    if !collinear {
        for ord in [[0, 1, 2], [0, 2, 1], [1, 2, 0]] {
            let [x, y, z] = ord;
            let meets = ComplexLine::through(pts[x], pts[y])
                .ok()
                .and_then(|l| l.ball_disc())
                .is_some_and(|d| d.rho > 1e-9);
            let nx = pts[x].norm();
            let ny = pts[y].norm();
            let split = (nx < 1.0 && ny > 1.0) || (ny < 1.0 && nx > 1.0);
            let split_ok = !split || !is_one(inner(x, y));
            let third_ok = !is_one(inner(x, z)) || !is_one(inner(y, z));
            if meets && split_ok && third_ok {
                ordering = Some(ord);
                break;
            }
        }
    }
    GateReport {
        collinearity,
        collinear,
        ab: inner(0, 1),
        ac: inner(0, 2),
        bc: inner(1, 2),
        passed: ordering.is_some(),
        ordering,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ThreePointStatus {
    /// The triple is not admissible; families and global test ran as diagnostics.
    GateFailed,
    /// Some family fails, so there is nothing to confirm.
    NotApplicable,
    Confirmed,
    Violated,
}

#[derive(Debug, Clone, Copy)]
pub struct ThreePointParams {
    pub lines_per_point: usize,
    pub global_lines: usize,
    pub line: LineConfig,
    pub seed: u64,
}

impl Default for ThreePointParams {
    fn default() -> Self {
        ThreePointParams {
            lines_per_point: 50,
            global_lines: DEFAULT_GLOBAL_LINES,
            line: LineConfig::default(),
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThreePointReport {
    pub function: String,
    pub gates: GateReport,
    pub families: Vec<FamilyReport>,
    pub family_pass: bool,
    pub global: Option<GlobalReport>,
    pub status: ThreePointStatus,
}

/// Runs the family tests at `a`, `b`, `c` and, when all pass, the global test.
/// Gate failures are reported but do not stop the diagnostic run.
pub fn three_point_harness(
    f: &SphereFunction,
    a: Point2,
    b: Point2,
    c: Point2,
    p: &ThreePointParams,
) -> Result<ThreePointReport> {
    let gates = gate_report(a, b, c);
    let families = [a, b, c]
        .iter()
        .map(|&x| point_family_report(f, x, p.lines_per_point, &p.line, p.seed))
        .collect::<Result<Vec<_>>>()?;
    let family_pass = families.iter().all(|r| r.family_pass);
    let global = if family_pass {
        Some(global_holomorphy_test(f, p.global_lines, &p.line, p.seed)?)
    } else {
        None
    };
    let status = if !gates.passed {
        ThreePointStatus::GateFailed
    } else if !family_pass {
        ThreePointStatus::NotApplicable
    } else if global.as_ref().is_some_and(|g| g.passed) {
        ThreePointStatus::Confirmed
    } else {
        ThreePointStatus::Violated
    };
    Ok(ThreePointReport { function: f.label.clone(), gates, families, family_pass, global, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ball_mobius_at_infinity, c64};

    fn w2_over_wbar() -> SphereFunction {
        SphereFunction::new("w2_over_wbar", |p: Point2| p.w * p.w / p.w.conj()).with_singular(|p: Point2| p.w)
    }

    #[test]
    fn w_coefficient_examples() {
        let f = SphereFunction::new("w", |p: Point2| p.w);
        let g = SphereFunction::new("|w|^2", |p: Point2| C64::new(p.w.norm_sqr(), 0.0));
        let h = w2_over_wbar();
        for z in [c64(0.0, 0.0), c64(0.3, -0.2), c64(-0.6, 0.5)] {
            assert!((w_coefficient(&f, 1, z, 64).unwrap() - 1.0).norm() < 1e-14);
            assert!((w_coefficient(&g, 0, z, 64).unwrap() - (1.0 - z.norm_sqr())).norm() < 1e-14);
            let want = 1.0 / (1.0 - z.norm_sqr());
            assert!((w_coefficient(&h, 3, z, 64).unwrap() - want).norm() < 1e-13);
        }
        assert!(w_coefficient(&f, 1, c64(1.0, 0.0), 64).is_err());
        // log-space prefactor near the rim
        let v = w_coefficient(&f, 8, c64(0.97, 0.0), 64).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn line_examples() {
        let cfg = LineConfig::default();
        let g = SphereFunction::new("|w|^2", |p: Point2| C64::new(p.w.norm_sqr(), 0.0));
        let l = ComplexLine::new(Point2::default(), Point2::real(1.0, 0.0)).unwrap();
        assert!(line_restriction_verdict(&g, &l, &cfg).unwrap().passed());

        let cw = SphereFunction::new("conj w", |p: Point2| p.w.conj());
        let l = ComplexLine::new(Point2::default(), Point2::real(0.0, 1.0)).unwrap();
        let r = line_restriction_verdict(&cw, &l, &cfg).unwrap();
        assert_eq!(r.status, LineStatus::Fail);
        assert!((r.violation() - 1.0).abs() < 1e-14);

        let h = w2_over_wbar();
        // meets w = 0 at z = -0.5, inside the disc
        let l = ComplexLine::new(Point2::real(0.0, 0.5), Point2::real(1.0, 1.0)).unwrap();
        assert!(line_restriction_verdict(&h, &l, &cfg).unwrap().passed());
        // meets w = 0 at z = -2.5
        let l = ComplexLine::new(Point2::real(0.0, 0.5), Point2::real(1.0, 0.2)).unwrap();
        let r = line_restriction_verdict(&h, &l, &cfg).unwrap();
        assert_eq!(r.status, LineStatus::Fail);
        assert!(r.violation() > 1e-3);

        let far = ComplexLine::new(Point2::real(2.0, 0.0), Point2::real(0.0, 1.0)).unwrap();
        assert!(line_restriction_verdict(&g, &far, &cfg).is_err());
        // the horizontal line w = 0 lies in the singular locus
        let flat = ComplexLine::new(Point2::default(), Point2::real(1.0, 0.0)).unwrap();
        assert_eq!(line_restriction_verdict(&h, &flat, &cfg).unwrap().status, LineStatus::Excluded);
    }

    #[test]
    fn example_family_reports() {
        let cfg = LineConfig::default();
        let g = SphereFunction::new("|w|^2", |p: Point2| C64::new(p.w.norm_sqr(), 0.0));
        assert!(point_family_report(&g, Point2::default(), 50, &cfg, DEFAULT_SEED).unwrap().family_pass);
        let a = Point2::real(0.5, 0.5);
        let f = g.compose_mobius(a, "moebius").unwrap();
        let r = point_family_report(&f, a, 50, &cfg, DEFAULT_SEED).unwrap();
        assert!(r.family_pass && r.tested == 50);
        let r = point_family_report(&f, Point2::real(0.3, 0.0), 50, &cfg, DEFAULT_SEED).unwrap();
        assert!(!r.family_pass);
        // the pencils parallel to the axes go to lines through b and c
        let b = ball_mobius_at_infinity(a, Point2::real(1.0, 0.0)).unwrap();
        let c = ball_mobius_at_infinity(a, Point2::real(0.0, 1.0)).unwrap();
        assert!(point_family_report(&f, b, 50, &cfg, DEFAULT_SEED).unwrap().family_pass);
        assert!(point_family_report(&f, c, 50, &cfg, DEFAULT_SEED).unwrap().family_pass);
        let far = point_family_report(&f, Point2::real(5.0, 5.0), 50, &cfg, DEFAULT_SEED).unwrap();
        assert!(far.tested + far.excluded < 50);
    }

    #[test]
    fn global_examples() {
        let cfg = LineConfig::default();
        let poly = SphereFunction::new("poly", |p: Point2| p.z * p.z * p.w + 3.0 * p.w - 1.0);
        assert!(global_holomorphy_test(&poly, 50, &cfg, DEFAULT_SEED).unwrap().passed);
        let cz = SphereFunction::new("conj z", |p: Point2| p.z.conj());
        assert!(!global_holomorphy_test(&cz, 50, &cfg, DEFAULT_SEED).unwrap().passed);
        assert!(!global_holomorphy_test(&w2_over_wbar(), 50, &cfg, DEFAULT_SEED).unwrap().passed);
    }

    #[test]
    fn reduction_examples() {
        let p = ReductionParams::default();
        let f = SphereFunction::new("w g", |q: Point2| q.w * (q.z * q.z + 1.0).exp());
        let r = reduction_equivalence(&f, 0.3, 1, &p).unwrap();
        assert!(r.line_pass && r.circle_pass && r.disagreements == 0);
        let r = reduction_equivalence(&w2_over_wbar(), 0.0, 3, &p).unwrap();
        assert!(r.line_pass && r.circle_pass && r.disagreements == 0);
        let f = SphereFunction::new("w2 conj z", |q: Point2| q.w * q.w * q.z.conj());
        let r = reduction_equivalence(&f, 0.4, 2, &p).unwrap();
        assert_eq!(r.disagreements, 0);
        assert!(!r.line_pass);
    }

    #[test]
    fn structure_examples() {
        let p = StructureParams::default();
        let r = corollary31_check(&w2_over_wbar(), 3, &p).unwrap();
        assert!(r.passed, "{r:#?}");
        let w = SphereFunction::new("w", |q: Point2| q.w);
        assert!(corollary31_check(&w, 2, &p).unwrap().passed);
        let cw = SphereFunction::new("conj w", |q: Point2| q.w.conj());
        let r = corollary31_check(&cw, 1, &p).unwrap();
        assert!(!r.passed);
        // oracle: c_{-1}(z) = (1−|z|²)^{1/2}·(1−|z|²)^{1/2}
        let z = c64(0.4, 0.3);
        let c = w_coefficient(&cw, -1, z, 64).unwrap();
        assert!((c - (1.0 - z.norm_sqr())).norm() < 1e-14);
        assert!(r.negative[0].max_abs > 0.5);
    }

    #[test]
    fn gates() {
        let a = Point2::real(0.5, 0.5);
        let b = ball_mobius_at_infinity(a, Point2::real(1.0, 0.0)).unwrap();
        let c = ball_mobius_at_infinity(a, Point2::real(0.0, 1.0)).unwrap();
        let g = gate_report(a, b, c);
        assert!(!g.collinear && !g.passed);
        assert!(is_one(g.ab) && is_one(g.ac));

        let g = gate_report(Point2::real(0.1, 0.0), Point2::real(0.0, 0.2), Point2::real(-0.3, 0.1));
        assert!(g.passed);
        let g = gate_report(Point2::real(0.1, 0.0), Point2::real(0.2, 0.0), Point2::real(0.5, 0.0));
        assert!(g.collinear && !g.passed);
    }
}
