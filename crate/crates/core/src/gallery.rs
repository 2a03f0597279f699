//! Named example functions with their expected verdicts.
//!
//! Each entry carries a list of checks. A check runs one of the harnesses and
//! reports a short verdict string; the entry is ok when every observed
//! verdict equals the expected one.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{
    corollary31_check, gate_report, global_holomorphy_test, point_family_report, three_point_harness, LineConfig,
    SphereFunction, StructureParams, ThreePointParams, ThreePointStatus, DEFAULT_GLOBAL_LINES, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::geometry::{ball_mobius_at_infinity, herm_inner, FamilyAnchor, Point2, C64};
use crate::polyanalytic::harness::{
    boundary_continuity, family_verdict, two_family_harness, HarnessParams, ImplicationStatus,
};
use crate::polyanalytic::{dbar_residual, default_dbar_grid, disc_fn, recover_coefficients, DiscFn, DEFAULT_DBAR_STEP};
use crate::spectral::{DEFAULT_SAMPLES, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntryKind {
    Disc,
    Sphere,
}

#[derive(Clone)]
pub enum EntryFunction {
    Disc(DiscFn),
    Sphere(SphereFunction),
}

/// Tolerances and sampling shared by every check.
#[derive(Debug, Clone, Copy)]
pub struct GalleryParams {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub lines_per_point: usize,
    pub global_lines: usize,
}

impl Default for GalleryParams {
    fn default() -> Self {
        GalleryParams {
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            lines_per_point: 50,
            global_lines: DEFAULT_GLOBAL_LINES,
        }
    }
}

impl GalleryParams {
    fn line(&self) -> LineConfig {
        LineConfig { samples: self.samples, tol: self.tol, ..LineConfig::default() }
    }

    fn harness(&self) -> HarnessParams {
        HarnessParams { samples: self.samples, tol: self.tol, ..HarnessParams::default() }
    }

    fn three_point(&self) -> ThreePointParams {
        ThreePointParams {
            lines_per_point: self.lines_per_point,
            global_lines: self.global_lines,
            line: self.line(),
            seed: self.seed,
        }
    }
}

type CheckFn = Arc<dyn Fn(&GalleryParams) -> Result<String> + Send + Sync>;

#[derive(Clone)]
pub struct Check {
    pub descriptor: String,
    pub expected: String,
    run: CheckFn,
}

impl Check {
    fn new(
        descriptor: impl Into<String>,
        expected: impl Into<String>,
        run: impl Fn(&GalleryParams) -> Result<String> + Send + Sync + 'static,
    ) -> Self {
        Check { descriptor: descriptor.into(), expected: expected.into(), run: Arc::new(run) }
    }

    pub fn run(&self, p: &GalleryParams) -> TestOutcome {
        let observed = match (self.run)(p) {
            Ok(s) => s,
            Err(e) => format!("ERROR: {e}"),
        };
        TestOutcome {
            descriptor: self.descriptor.clone(),
            expected: self.expected.clone(),
            matched: observed == self.expected,
            observed,
        }
    }
}

#[derive(Clone)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub function: EntryFunction,
    pub checks: Vec<Check>,
    /// Where the example comes from and what it demonstrates.
    pub source: &'static str,
    pub notes: Vec<String>,
}

impl std::fmt::Debug for GalleryEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GalleryEntry").field("name", &self.name).field("kind", &self.kind).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutcome {
    pub descriptor: String,
    pub expected: String,
    pub observed: String,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryReport {
    pub entry: String,
    pub tests: Vec<TestOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub entries: Vec<EntryReport>,
    pub ok: bool,
}

pub const REGISTERED: [&str; 8] = [
    "agranovsky_quotient",
    "boundary_blowup",
    "ck_multi_point",
    "ck_z_quotient",
    "discontinuous_coeffs",
    "moebius_abs_w",
    "outside_points",
    "w2_over_wbar",
];

fn pass_fail(b: bool) -> String {
    if b { "PASS" } else { "FAIL" }.to_string()
}

fn status_name<T: Serialize>(s: &T) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Every circle of the family at `alpha`, parameters `lo..=hi`, passes at `pole`.
fn disc_family_check(f: &DiscFn, alpha: C64, pole: usize, lo: f64, hi: f64) -> Check {
    let f = f.clone();
    let desc = format!("disc family at {alpha}, parameters {lo}..{hi}, pole bound {pole}");
    Check::new(desc, "", move |p| {
        let anchor = FamilyAnchor::at(alpha)?;
        let hp = HarnessParams { param_lo: lo, param_hi: hi, ..p.harness() };
        let all = hp
            .params()
            .par_iter()
            .map(|&t| family_verdict(&*f, &anchor, t, pole, p.samples, p.tol).map(|(_, v)| v.passed))
            .collect::<Result<Vec<_>>>()?;
        Ok(pass_fail(all.into_iter().all(|b| b)))
    })
}

fn expect(mut c: Check, expected: &str) -> Check {
    c.expected = expected.to_string();
    c
}

fn holomorphy_check(f: &DiscFn, order: usize) -> Check {
    let f = f.clone();
    Check::new(format!("dbar residual at order {order} above 0.1"), "PASS", move |_| {
        let r = dbar_residual(&|z| f(z), order, &default_dbar_grid(), DEFAULT_DBAR_STEP)?;
        Ok(pass_fail(r > 0.1))
    })
}

fn continuity_check(label: &str, f: DiscFn, expected: &str) -> Check {
    Check::new(format!("{label} continuous up to the boundary"), expected, move |_| {
        Ok(if boundary_continuity(&*f).continuous { "CONTINUOUS" } else { "DISCONTINUOUS" }.into())
    })
}

fn harness_check(f: &DiscFn, alpha: f64, beta: f64, order: usize, expected: ImplicationStatus) -> Check {
    let f = f.clone();
    let desc = format!("two-family harness at {alpha} and {beta}, order {order}");
    Check::new(desc, status_name(&expected), move |p| {
        let a = FamilyAnchor::at(c(alpha))?;
        let b = FamilyAnchor::at(c(beta))?;
        Ok(status_name(&two_family_harness(&*f, &a, &b, order, &p.harness())?.status))
    })
}

fn family_check(f: &SphereFunction, point: Point2, label: &str, expected: bool) -> Check {
    let f = f.clone();
    Check::new(format!("lines through {label}"), pass_fail(expected), move |p| {
        Ok(pass_fail(point_family_report(&f, point, p.lines_per_point, &p.line(), p.seed)?.family_pass))
    })
}

fn global_check(f: &SphereFunction) -> Check {
    let f = f.clone();
    Check::new("sampled lines through the ball", "FAIL", move |p| {
        Ok(pass_fail(global_holomorphy_test(&f, p.global_lines, &p.line(), p.seed)?.passed))
    })
}

fn three_point_check(f: &SphereFunction, pts: [Point2; 3], expected: ThreePointStatus) -> Check {
    let f = f.clone();
    Check::new("three-point harness", status_name(&expected), move |p| {
        Ok(status_name(&three_point_harness(&f, pts[0], pts[1], pts[2], &p.three_point())?.status))
    })
}

/// `(z − α)(z − β)/(1 − |z|²)`.
pub fn agranovsky_quotient(alpha: f64, beta: f64) -> GalleryEntry {
    let f = disc_fn(move |z| (z - alpha) * (z - beta) / (1.0 - z.norm_sqr()));
    let checks = vec![
        expect(disc_family_check(&f, c(alpha), 0, 0.05, 0.95), "PASS"),
        expect(disc_family_check(&f, c(beta), 0, 0.05, 0.95), "PASS"),
        expect(disc_family_check(&f, c(0.2), 0, 0.05, 0.95), "FAIL"),
        holomorphy_check(&f, 0),
        harness_check(&f, alpha, beta, 0, ImplicationStatus::BoundaryContinuityViolated),
    ];
    GalleryEntry {
        name: "agranovsky_quotient",
        kind: EntryKind::Disc,
        function: EntryFunction::Disc(f),
        checks,
        source: "quotient extending from two interior families without being holomorphic",
        notes: vec![],
    }
}

/// `z(z − 1/2)/(1 − |z|²)`.
pub fn boundary_blowup() -> GalleryEntry {
    let f = disc_fn(|z| z * (z - 0.5) / (1.0 - z.norm_sqr()));
    let checks = vec![
        expect(disc_family_check(&f, c(0.0), 0, 0.05, 0.95), "PASS"),
        expect(disc_family_check(&f, c(0.5), 0, 0.05, 0.95), "PASS"),
        holomorphy_check(&f, 0),
        continuity_check("f", f.clone(), "DISCONTINUOUS"),
        harness_check(&f, 0.0, 0.5, 0, ImplicationStatus::BoundaryContinuityViolated),
    ];
    GalleryEntry {
        name: "boundary_blowup",
        kind: EntryKind::Disc,
        function: EntryFunction::Disc(f),
        checks,
        source: "blows up at the circle, so continuity up to the boundary cannot be dropped",
        notes: vec![],
    }
}

fn w_quotient(label: &str, power: i32, roots: Vec<f64>) -> SphereFunction {
    SphereFunction::new(label, move |p: Point2| {
        roots.iter().fold(p.w.powi(power) / p.w.conj(), |acc, r| acc * (p.z - r))
    })
    .with_singular(|p: Point2| p.w)
}

/// `w²/conj(w)`, zero at `w = 0`.
pub fn w2_over_wbar() -> GalleryEntry {
    let f = w_quotient("w2_over_wbar", 2, vec![]);
    let g3 = {
        let f = f.clone();
        Check::new("g_3 recovered as 1 - 2|z|^2 + |z|^4", "PASS", move |p| {
            let g = |z: C64| crate::ball::w_coefficient(&f, 3, z, 64).unwrap_or(c(f64::NAN)) * (1.0 - z.norm_sqr()).powi(3);
            let r = recover_coefficients(&g, 2, &crate::polyanalytic::DEFAULT_RADII, 6)?;
            let mut want = vec![vec![C64::default(); 7]; 3];
            want[0][0] = c(1.0);
            want[1][1] = c(-2.0);
            want[2][2] = c(1.0);
            Ok(pass_fail(r.max_difference(&want) < 1e-6 && r.residual <= p.tol))
        })
    };
    let structure = {
        let f = f.clone();
        Check::new("negative modes vanish, g_n polyanalytic of order <= n for n <= 3", "PASS", move |p| {
            let sp = StructureParams { samples: p.samples, tol: p.tol, ..StructureParams::default() };
            Ok(pass_fail(corollary31_check(&f, 3, &sp)?.passed))
        })
    };
    let checks = vec![
        structure,
        g3,
        family_check(&f, Point2::default(), "(0,0)", true),
        family_check(&f, Point2::real(0.4, 0.0), "(0.4,0)", true),
        global_check(&f),
    ];
    GalleryEntry {
        name: "w2_over_wbar",
        kind: EntryKind::Sphere,
        function: EntryFunction::Sphere(f),
        checks,
        source: "single-mode function w^3/(1-|z|^2) extending along lines that meet the z-axis disc",
        notes: vec![],
    }
}

/// `w²/conj(w)·(z − 1/t₁)(z − 1/t₂)`, `1 < t₁ < t₂`.
pub fn outside_points(t1: f64, t2: f64) -> GalleryEntry {
    let f = w_quotient("outside_points", 2, vec![1.0 / t1, 1.0 / t2]);
    let checks = vec![
        family_check(&f, Point2::real(t1, 0.0), &format!("({t1},0)"), true),
        family_check(&f, Point2::real(t2, 0.0), &format!("({t2},0)"), true),
        family_check(&f, Point2::real(0.3, 0.0), "(0.3,0)", true),
        family_check(&f, Point2::real(0.0, 0.3), "(0,0.3)", false),
        global_check(&f),
    ];
    GalleryEntry {
        name: "outside_points",
        kind: EntryKind::Sphere,
        function: EntryFunction::Sphere(f),
        checks,
        source: "extends along lines through two marked points outside the closed ball",
        notes: vec![],
    }
}

/// The points of the `|w|²` example: `a = (1/2, 1/2)` and the images of the
/// two coordinate pencils.
pub fn moebius_points() -> [Point2; 3] {
    let a = Point2::real(0.5, 0.5);
    let b = ball_mobius_at_infinity(a, Point2::real(1.0, 0.0)).expect("direction not orthogonal to a");
    let c = ball_mobius_at_infinity(a, Point2::real(0.0, 1.0)).expect("direction not orthogonal to a");
    [a, b, c]
}

/// `|w|²` composed with the automorphism moving the origin to `(1/2, 1/2)`.
pub fn moebius_abs_w() -> GalleryEntry {
    let [a, b, c3] = moebius_points();
    let g = SphereFunction::new("|w|^2", |p: Point2| C64::new(p.w.norm_sqr(), 0.0));
    let f = g.compose_mobius(a, "moebius_abs_w").expect("|a| < 1");
    let gates = Check::new("<a|b> = <a|c> = <b|c> = 1", "PASS", move |_| {
        let one = |z: C64| (z - 1.0).norm() < 1e-9;
        Ok(pass_fail(one(herm_inner(a, b)) && one(herm_inner(a, c3)) && one(herm_inner(b, c3))))
    });
    let checks = vec![
        family_check(&f, a, "a", true),
        family_check(&f, b, "b", true),
        family_check(&f, c3, "c", true),
        family_check(&f, Point2::real(0.3, 0.0), "(0.3,0)", false),
        global_check(&f),
        gates,
        three_point_check(&f, [a, b, c3], ThreePointStatus::GateFailed),
    ];
    GalleryEntry {
        name: "moebius_abs_w",
        kind: EntryKind::Sphere,
        function: EntryFunction::Sphere(f),
        checks,
        source: "real-analytic function extending along three pencils; <a|b> = 1 breaks the gate",
        notes: vec![
            format!("b = {b}, c = {c3}"),
            "<b|c> = 1 for every automorphism taking 0 to a, whichever orthonormal pencils are used".to_string(),
        ],
    }
}

/// `z^{k+2}/conj(z)` composed with the automorphism moving the origin to `(1/2, 0)`.
pub fn ck_z_quotient(k: i32) -> GalleryEntry {
    let a0 = Point2::real(0.5, 0.0);
    let g = SphereFunction::new("z quotient", move |p: Point2| p.z.powi(k + 2) / p.z.conj()).with_singular(|p: Point2| p.z);
    let f = g.compose_mobius(a0, "ck_z_quotient").expect("|a| < 1");
    let a = Point2::new(c(0.5), C64::new(0.3, 0.0));
    let b = Point2::new(c(0.5), C64::new(0.0, -0.4));
    let cc = Point2::real(2.0, 0.0);
    let gates = Check::new("<a|c> = <b|c> = 1", "PASS", move |_| {
        let one = |z: C64| (z - 1.0).norm() < 1e-9;
        Ok(pass_fail(one(herm_inner(a, cc)) && one(herm_inner(b, cc))))
    });
    let checks = vec![
        family_check(&f, a, "a = (0.5,0.3)", true),
        family_check(&f, b, "b = (0.5,-0.4i)", true),
        family_check(&f, cc, "c = (2,0)", true),
        global_check(&f),
        gates,
        three_point_check(&f, [a, b, cc], ThreePointStatus::GateFailed),
    ];
    let ab = herm_inner(a, b);
    GalleryEntry {
        name: "ck_z_quotient",
        kind: EntryKind::Sphere,
        function: EntryFunction::Sphere(f),
        checks,
        source: "C^k function extending along lines meeting z = 1/2 inside the ball and through (2,0)",
        notes: vec![
            format!("k = {k}"),
            format!(
                "<a|b> = {ab}: two points of the ball on z = 1/2 never have <a|b> = 1, so the gate fails through <a|c> = <b|c> = 1"
            ),
            "the gate tests <a|c> != 1, not != 0".to_string(),
        ],
    }
}

/// `w^{k+2}/conj(w)·Π(z − 1/t_j)`.
pub fn ck_multi_point(k: i32, ts: Vec<f64>) -> GalleryEntry {
    let f = w_quotient("ck_multi_point", k + 2, ts.iter().map(|t| 1.0 / t).collect());
    let mut checks = vec![
        family_check(&f, Point2::default(), "(0,0)", true),
        family_check(&f, Point2::real(-0.5, 0.0), "(-0.5,0)", true),
    ];
    for &t in &ts {
        checks.push(family_check(&f, Point2::real(t, 0.0), &format!("({t},0)"), true));
    }
    checks.push(global_check(&f));
    GalleryEntry {
        name: "ck_multi_point",
        kind: EntryKind::Sphere,
        function: EntryFunction::Sphere(f),
        checks,
        source: "C^k function extending along lines through finitely many points outside the ball",
        notes: vec![format!("k = {k}")],
    }
}

/// `(1 − |z|²)·g(z)` with `g(z) = exp(−(1+z)/(1−z))`, bounded by 1 on the disc
/// and without a continuous extension to the point 1.
pub fn discontinuous_coeffs() -> GalleryEntry {
    let g = |z: C64| (-(1.0 + z) / (1.0 - z)).exp();
    let f = disc_fn(move |z| (1.0 - z.norm_sqr()) * g(z));
    let bounded = Check::new("|g| <= 1 on the disc", "PASS", move |_| {
        let sup = crate::polyanalytic::polar_grid(0.999, 40, 128).into_iter().map(|z| g(z).norm()).fold(0.0, f64::max);
        Ok(pass_fail(sup <= 1.0))
    });
    // The coefficient oscillates without bound near 1, so the circles stay
    // away from it to keep the samples resolved.
    let checks = vec![
        expect(disc_family_check(&f, c(0.3), 1, 0.05, 0.5), "PASS"),
        expect(disc_family_check(&f, c(0.3), 0, 0.05, 0.5), "FAIL"),
        bounded,
        continuity_check("f", f.clone(), "CONTINUOUS"),
        continuity_check("a_0 = g", disc_fn(g), "DISCONTINUOUS"),
        continuity_check("a_1 = -z g", disc_fn(move |z| -z * g(z)), "DISCONTINUOUS"),
    ];
    GalleryEntry {
        name: "discontinuous_coeffs",
        kind: EntryKind::Disc,
        function: EntryFunction::Disc(f),
        checks,
        source: "continuous order-1 function whose coefficients are not continuous up to the boundary",
        notes: vec![],
    }
}

/// Three points whose pairwise lines all miss the closed ball. No verdict is
/// expected for this configuration; it is a diagnostic preset only.
pub fn open_question_points() -> [Point2; 3] {
    [Point2::real(2.0, 0.0), Point2::real(0.0, 2.0), Point2::real(2.0, 2.0)]
}

pub fn gallery_lookup(name: &str) -> Result<GalleryEntry> {
    Ok(match name {
        "agranovsky_quotient" => agranovsky_quotient(0.4, 0.7),
        "boundary_blowup" => boundary_blowup(),
        "w2_over_wbar" => w2_over_wbar(),
        "outside_points" => outside_points(2.0, 4.0),
        "moebius_abs_w" => moebius_abs_w(),
        "ck_z_quotient" => ck_z_quotient(2),
        "ck_multi_point" => ck_multi_point(2, vec![2.0, 4.0]),
        "discontinuous_coeffs" => discontinuous_coeffs(),
        _ => {
            return Err(Error::UnknownEntry {
                name: name.to_string(),
                registered: REGISTERED.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

pub fn run_entry(entry: &GalleryEntry, p: &GalleryParams) -> EntryReport {
    let tests: Vec<TestOutcome> = entry.checks.par_iter().map(|c| c.run(p)).collect();
    EntryReport {
        entry: entry.name.to_string(),
        ok: tests.iter().all(|t| t.matched),
        tests,
        notes: entry.notes.clone(),
    }
}

/// Runs one entry, or every entry in name order for `"all"`.
pub fn gallery_run(name: &str, p: &GalleryParams) -> Result<SuiteReport> {
    let entries = if name.eq_ignore_ascii_case("all") {
        REGISTERED.iter().map(|n| gallery_lookup(n)).collect::<Result<Vec<_>>>()?
    } else {
        vec![gallery_lookup(name)?]
    };
    let entries: Vec<EntryReport> = entries.par_iter().map(|e| run_entry(e, p)).collect();
    Ok(SuiteReport { ok: entries.iter().all(|e| e.ok), entries })
}

/// Gate summary for a triple, used by the diagnostic preset.
pub fn open_question_gates() -> crate::ball::GateReport {
    let [a, b, c] = open_question_points();
    gate_report(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(gallery_lookup("w2_over_wbar").unwrap().kind, EntryKind::Sphere);
        assert_eq!(gallery_lookup("agranovsky_quotient").unwrap().kind, EntryKind::Disc);
        match gallery_lookup("nope") {
            Err(Error::UnknownEntry { registered, .. }) => assert_eq!(registered.len(), 8),
            other => panic!("{other:?}"),
        }
        let mut sorted = REGISTERED;
        sorted.sort();
        assert_eq!(sorted, REGISTERED);
    }

    #[test]
    fn every_entry_matches() {
        let r = gallery_run("all", &GalleryParams::default()).unwrap();
        for e in &r.entries {
            for t in &e.tests {
                assert!(t.matched, "{}: {} expected {} got {}", e.entry, t.descriptor, t.expected, t.observed);
            }
        }
        assert!(r.ok);
    }

    #[test]
    fn open_question_preset_lines_miss_the_ball() {
        let g = open_question_gates();
        assert!(!g.collinear && !g.passed);
    }
}
