//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.
//!
//! Run with `cargo test --workspace`; the last criterion reruns the property
//! suites, so their binaries must have been built alongside this one.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::SystemTime;

use polyext::ball::{reduction_equivalence, ReductionParams, SphereFunction};
use polyext::geometry::{family_circle, Circle, FamilyAnchor, Point2, C64};
use polyext::polyanalytic::harness::{condition_h_check, HarnessParams};
use polyext::polyanalytic::{
    eval_poly, recover_coefficients, vandermonde_solve, PolyanalyticFunction, DEFAULT_RADII,
};
use polyext::semiquadrics::{
    concyclicity, first_family_grid, first_family_path, folding, second_family_grid, second_family_path,
};
use polyext::spectral::{circle_spectrum, eval_extension, extend_verdict, pole_degree_estimate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0xACCE;

/// Result of one criterion at one resolution. `verdicts` lists every
/// individual pass/fail decision so that two resolutions can be compared.
struct Outcome {
    failures: Vec<String>,
    verdicts: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: vec![], verdicts: vec![] }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn verdict(&mut self, label: impl Into<String>, v: impl std::fmt::Display) {
        self.verdicts.push(format!("{}={v}", label.into()));
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `M_α(z) = (z − α)/(1 − ᾱz)`, written out independently of the library.
fn mobius_oracle(alpha: C64, z: C64) -> C64 {
    (z - alpha) / (1.0 - alpha.conj() * z)
}

/// Hyperbolic center by bisection along the diameter through the Euclidean
/// center: the `α` on that diameter at which the two diameter endpoints are
/// mapped to the same modulus.
fn hyperbolic_center_oracle(circle: &Circle) -> C64 {
    let u = circle.center / circle.center.norm();
    let (p1, p2) = (circle.center - circle.radius * u, circle.center + circle.radius * u);
    let gap = |s: f64| mobius_oracle(s * u, p1).norm() - mobius_oracle(s * u, p2).norm();
    let (mut lo, mut hi) = ((p1 / u).re, (p2 / u).re);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) * u
}

fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn one_minus_norm_sqr(z: C64) -> C64 {
    c(1.0 - z.norm_sqr(), 0.0)
}

fn criterion_1(n: usize) -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..20 {
        let m = rng.random_range(0.05..0.8);
        let center = C64::from_polar(m, rng.random_range(0.0..2.0 * PI));
        let radius = rng.random_range(0.05..0.95) * (1.0 - m);
        let circle = Circle::new(center, radius).unwrap();
        let s = circle_spectrum(one_minus_norm_sqr, &circle, n).unwrap();
        let degree = pole_degree_estimate(&s, 1e-8);
        out.check(degree == Some(1), || format!("circle {i}: pole degree {degree:?}"));
        let h = hyperbolic_center_oracle(&circle);
        let at_h = eval_extension(&s, h).map(|v| v.norm()).unwrap_or(f64::INFINITY);
        out.check(at_h < 1e-7, || format!("circle {i}: |extension at h| = {at_h:e}"));
        out.verdict(format!("c{i}.degree"), format!("{degree:?}"));
        out.verdict(format!("c{i}.zero"), at_h < 1e-7);
    }
    out
}

fn criterion_2(n: usize) -> Outcome {
    let mut out = Outcome::new();
    for r in [0.2, 0.5, 0.8] {
        let s = circle_spectrum(one_minus_norm_sqr, &Circle::new(c(1.0 - r, 0.0), r).unwrap(), n).unwrap();
        let k = r * (r - 1.0);
        let worst = s
            .iter()
            .map(|(m, v)| {
                let want = match m {
                    -1 | 1 => k,
                    0 => -2.0 * k,
                    _ => 0.0,
                };
                (v - want).norm()
            })
            .fold(0.0, f64::max);
        out.check(worst < 1e-12, || format!("r = {r}: coefficient error {worst:e}"));
        out.verdict(format!("r{r}"), worst < 1e-12);
    }
    out
}

/// Ten seeded polyanalytic functions of order at most 3 with polynomial
/// coefficients of degree at most 4.
fn random_polyanalytic() -> Vec<(usize, Vec<Vec<C64>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    (0..10)
        .map(|_| {
            let order = rng.random_range(0..=3usize);
            let mut taylor: Vec<Vec<C64>> =
                (0..=order).map(|_| (0..5).map(|_| random_complex(&mut rng)).collect()).collect();
            // keep the order exact
            taylor[order][0] = C64::from_polar(rng.random_range(0.5..1.0), rng.random_range(0.0..2.0 * PI));
            (order, taylor)
        })
        .collect()
}

fn criterion_3(n: usize) -> Outcome {
    let mut out = Outcome::new();
    let params = HarnessParams::default().params();
    for (i, (order, taylor)) in random_polyanalytic().into_iter().enumerate() {
        let p = PolyanalyticFunction::from_taylor(taylor.clone()).unwrap();
        for alpha in [0.5, 0.0] {
            let anchor = FamilyAnchor::at(c(alpha, 0.0)).unwrap();
            for &param in &params {
                let circle = family_circle(&anchor, param).unwrap();
                let s = circle_spectrum(|z| eval_poly(&p, z), &circle, n).unwrap();
                let v = extend_verdict(&s, order, 1e-8).unwrap();
                out.check(v.passed, || format!("g{i} on C_{alpha} at {param}: violation {:e}", v.violation));
                out.verdict(format!("g{i}.C{alpha}.{param}"), v.passed);
            }
        }
        let f = p.to_fn();
        let r = recover_coefficients(&*f, order, &DEFAULT_RADII, 4).unwrap();
        let err = r.max_difference(&taylor);
        out.check(err < 1e-6, || format!("g{i}: recovery error {err:e}"));
    }
    out
}

fn criterion_4(n: usize) -> Outcome {
    let mut out = Outcome::new();
    let params = HarnessParams { samples: n, ..HarnessParams::default() };
    for (i, (order, taylor)) in random_polyanalytic().into_iter().enumerate() {
        let g = PolyanalyticFunction::from_taylor(taylor).unwrap().to_fn();
        for gamma in [0.0, 0.5, 1.0, -1.0] {
            let anchor = FamilyAnchor::at(c(gamma, 0.0)).unwrap();
            let r = condition_h_check(&*g, order, &anchor, &params).unwrap();
            out.check(r.h_holds && r.c_holds && r.disagreements == 0, || {
                format!("g{i} at {gamma}: H {} C {} disagreements {}", r.h_holds, r.c_holds, r.disagreements)
            });
            for (h, cc) in r.h_circles.iter().zip(&r.c_circles) {
                out.verdict(format!("g{i}.{gamma}.{}", h.param), format!("{}/{}", h.passed, cc.passed));
            }
        }
    }
    out
}

/// Planted sphere functions with the pole bound used for each and the
/// expected line verdict at `t = 0` and `t = 0.4`.
fn planted() -> Vec<(SphereFunction, i64, [bool; 2])> {
    vec![
        (SphereFunction::new("w(1+z+z^2)", |p: Point2| p.w * (1.0 + p.z + p.z * p.z)), 1, [true, true]),
        (SphereFunction::new("w^2/wbar", |p: Point2| p.w * p.w / p.w.conj()).with_singular(|p| p.w), 3, [true, true]),
        (SphereFunction::new("w^2 zbar", |p: Point2| p.w * p.w * p.z.conj()), 2, [true, false]),
        (SphereFunction::new("w zbar^2", |p: Point2| p.w * p.z.conj() * p.z.conj()), 1, [false, false]),
        (SphereFunction::new("zbar/wbar", |p: Point2| p.z.conj() / p.w.conj()).with_singular(|p| p.w), 1, [true, true]),
    ]
}

fn criterion_5(n: usize) -> Outcome {
    let mut out = Outcome::new();
    let params = ReductionParams { samples: n, ..ReductionParams::default() };
    let mut seen = [false, false];
    for (f, pole, expected) in planted() {
        for (k, t) in [0.0, 0.4].into_iter().enumerate() {
            let r = reduction_equivalence(&f, t, pole, &params).unwrap();
            out.check(r.disagreements == 0, || format!("{} at t = {t}: {} disagreements", f.label, r.disagreements));
            out.check(r.line_pass == expected[k], || {
                format!("{} at t = {t}: line verdict {} expected {}", f.label, r.line_pass, expected[k])
            });
            seen[r.line_pass as usize] = true;
            for pair in &r.pairs {
                out.verdict(
                    format!("{}.{t}.{}", f.label, pair.param),
                    format!("{}/{}", pair.line_verdict.passed, pair.circle_verdict.passed),
                );
            }
        }
    }
    out.check(seen == [true, true], || "planted set lacks a pass/fail mix".into());
    out
}

fn criterion_6(n: usize) -> Outcome {
    let mut out = Outcome::new();
    let run = Command::new(env!("CARGO_BIN_EXE_polyext"))
        .args(["--samples", &n.to_string(), "gallery", "all"])
        .output()
        .expect("gallery run");
    out.check(run.status.code() == Some(0), || format!("gallery all exited with {:?}", run.status.code()));
    let report: serde_json::Value = match serde_json::from_slice(&run.stdout) {
        Ok(v) => v,
        Err(e) => {
            out.check(false, || format!("gallery output is not JSON: {e}"));
            return out;
        }
    };
    let entries = report["entries"].as_array().cloned().unwrap_or_default();
    for name in ["moebius_abs_w", "w2_over_wbar"] {
        let ok = entries.iter().any(|e| e["entry"] == name && e["ok"] == true);
        out.check(ok, || format!("{name} does not reproduce its pattern"));
    }
    for e in &entries {
        for t in e["tests"].as_array().into_iter().flatten() {
            out.verdict(format!("{}: {}", e["entry"], t["descriptor"]), &t["observed"]);
        }
    }
    out.check(!out.verdicts.is_empty(), || "gallery reported no tests".into());
    out
}

/// Sine of the angle between `w − a` and `b − a`; zero on the line through `a`
/// and `b`.
fn collinearity_oracle(w: C64, a: C64, b: C64) -> f64 {
    let (u, v) = (w - a, b - a);
    if u.norm() < 1e-15 {
        return 0.0;
    }
    (u.re * v.im - u.im * v.re).abs() / (u.norm() * v.norm())
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let t = 0.5;
    for i in 0..50 {
        let th = rng.random_range(0.1..PI - 0.1);
        let z = C64::from_polar(rng.random_range(0.05..0.95), if rng.random_bool(0.5) { th } else { -th });
        let (a, b) = (z.conj(), 1.0 / z);

        let first = first_family_path(z, &first_family_grid(z, 50)).unwrap();
        let mut last = f64::NEG_INFINITY;
        let mut worst: f64 = 0.0;
        let mut monotone = true;
        for (_, w) in first.present() {
            worst = worst.max(collinearity_oracle(w, a, b));
            let s = ((w - a) * (b - a).conj()).re / (b - a).norm_sqr();
            monotone &= s > last;
            last = s;
        }
        out.check(worst < 1e-12, || format!("z{i} = {z}: first path collinearity {worst:e}"));
        out.check(monotone, || format!("z{i} = {z}: first path is not monotone"));

        let second = second_family_path(z, t, &second_family_grid(z, t, 50).unwrap()).unwrap();
        let pts: Vec<C64> = second.present().map(|(_, w)| w).collect();
        let worst = pts
            .iter()
            .map(|&w| concyclicity([c(t, 0.0), c(1.0 / t, 0.0), a, w]))
            .fold(0.0, f64::max);
        out.check(worst < 1e-9, || format!("z{i} = {z}: second path concyclicity {worst:e}"));
        let (start, end) = (pts[0], pts[pts.len() - 1]);
        out.check((start - b).norm() < 1e-7 && (end - a).norm() < 1e-7, || {
            format!("z{i} = {z}: second path runs {start} to {end}")
        });
    }
    let etas = (0..5).map(|k| -0.9 + 0.18 * k as f64).chain((0..5).map(|k| 0.55 + 0.09 * k as f64));
    for eta in etas {
        let f = folding(eta, t, 64).unwrap();
        out.check(f.overlap_distance < 1e-9, || format!("eta {eta}: overlap {:e}", f.overlap_distance));
        out.check(f.first_orientation == -f.second_orientation && f.first_orientation != 0.0, || {
            format!("eta {eta}: orientations {} {}", f.first_orientation, f.second_orientation)
        });
    }
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    for m in 1..=20 {
        let d = 2f64.powi(-m);
        let nodes = [c(d, 0.0), c(1.0 + d, 0.0)];
        let values: Vec<C64> = nodes.iter().map(|x| 1.0 + 2.0 * x).collect();
        let q = vandermonde_solve(&nodes, &values).unwrap();
        let err = (q[0] - 1.0).norm().max((q[1] - 2.0).norm());
        out.check(err < 10.0 * d, || format!("delta 2^-{m}: error {err:e}"));
    }
    out
}

/// Property suites whose binaries sit next to this one.
const SUITES: [&str; 5] = ["geometry_props", "spectral_props", "polyanalytic_props", "ball_props", "semiquadric_props"];

fn newest(dir: &Path, stem: &str, accept: impl Fn(&Path) -> bool) -> Option<PathBuf> {
    let prefix = format!("{stem}-");
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.starts_with(&prefix) && !name.contains('.') && p.is_file() && is_executable(p)
        })
        .filter(|p| accept(p))
        .max_by_key(|p| p.metadata().and_then(|m| m.modified()).unwrap_or(SystemTime::UNIX_EPOCH))
}

#[cfg(unix)]
fn is_executable(p: &Path) -> bool {
    use std::os::unix::fs::PermissionsExt;
    p.metadata().map(|m| m.permissions().mode() & 0o111 != 0).unwrap_or(false)
}

#[cfg(not(unix))]
fn is_executable(_: &Path) -> bool {
    true
}

fn run_invariant_suites(out: &mut Outcome) {
    let exe = std::env::current_exe().expect("current executable");
    let dir = exe.parent().expect("deps directory");
    let mut binaries: Vec<(String, Option<PathBuf>)> =
        SUITES.iter().map(|s| (s.to_string(), newest(dir, s, |_| true))).collect();
    // the library unit tests share their stem with the CLI binary's
    let lib = newest(dir, "polyext", |p| {
        Command::new(p)
            .args(["--list", "--format", "terse"])
            .output()
            .map(|o| String::from_utf8_lossy(&o.stdout).contains("ball::tests::"))
            .unwrap_or(false)
    });
    binaries.push(("polyext unit tests".into(), lib));
    for (name, path) in binaries {
        let Some(path) = path else {
            out.check(false, || format!("{name}: binary not built; run cargo test --workspace"));
            continue;
        };
        let status = Command::new(&path).arg("-q").output().map(|o| o.status.success());
        out.check(status.unwrap_or(false), || format!("{name} failed ({})", path.display()));
    }
}

fn criterion_9(base: &[Outcome]) -> Outcome {
    let mut out = Outcome::new();
    let fine = [criterion_1(512), criterion_2(512), criterion_3(512), criterion_4(512), criterion_5(512), criterion_6(512)];
    for (k, (a, b)) in base.iter().zip(&fine).enumerate() {
        let changed: Vec<String> = a
            .verdicts
            .iter()
            .zip(&b.verdicts)
            .filter(|(x, y)| x != y)
            .map(|(x, y)| format!("{x} became {y}"))
            .collect();
        out.check(a.verdicts.len() == b.verdicts.len(), || {
            format!("criterion {}: {} verdicts at 256, {} at 512", k + 1, a.verdicts.len(), b.verdicts.len())
        });
        out.check(changed.is_empty(), || format!("criterion {}: {}", k + 1, changed.join("; ")));
        out.check(b.failures.is_empty(), || format!("criterion {} at 512: {}", k + 1, b.failures.join("; ")));
    }
    run_invariant_suites(&mut out);
    out
}

const TITLES: [&str; 9] = [
    "zero at the hyperbolic center, simple pole at the center",
    "spectrum of 1-|z|^2 on internally tangent circles",
    "polyanalytic pole bound and coefficient recovery",
    "conditions (H) and (C) agree",
    "line tests reduce to circle tests",
    "gallery reproduces every claimed pattern",
    "semiquadric fiber geometry",
    "Vandermonde stability under drifting nodes",
    "verdicts stable under doubling N; invariant suites pass",
];

fn main() {
    let base = vec![criterion_1(256), criterion_2(256), criterion_3(256), criterion_4(256), criterion_5(256), criterion_6(256)];
    let rest = [criterion_7(), criterion_8(), criterion_9(&base)];
    let mut failed = 0;
    for (k, o) in base.iter().chain(&rest).enumerate() {
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {status}  {}", k + 1, TITLES[k]);
        for f in &o.failures {
            println!("    {f}");
        }
        failed += !o.failures.is_empty() as usize;
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
}
