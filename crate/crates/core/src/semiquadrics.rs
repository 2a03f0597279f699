//! Fibers of the semiquadrics `Λ(a, r) = {(z, conj(a) + r²/(z − a))}` over a
//! point `z` of the disc.
//!
//! Two one-parameter families are traced. The first is `Λ(0, R)`, `|z| ≤ R ≤ 1`,
//! whose fiber `v(R) = R²/z` runs along the segment from `conj(z)` to `1/z`. The
//! second is `Λ(T, ρ(T))` with `ρ(T)² = (T − t)(T − 1/t)`, whose fiber
//! `w(T) = T + ρ(T)²/(z − T)` runs along a circular arc from `1/z` back to
//! `conj(z)`. Together they bound the domain `D_z`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::{ct_radius, C64};
use crate::json::format_float;

/// Relative tolerance for `|z − a| = r` (the fiber meets the conjugate diagonal).
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Semiquadric {
    pub a: C64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "w", rename_all = "lowercase")]
pub enum FiberPoint {
    Point(C64),
    /// `z` lies outside the closed disc of the semiquadric.
    Absent,
    /// `z = a`, where the fiber is at infinity.
    Pole,
}

impl FiberPoint {
    pub fn point(self) -> Option<C64> {
        match self {
            FiberPoint::Point(w) => Some(w),
            _ => None,
        }
    }
}

impl Semiquadric {
    pub fn new(a: C64, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("semiquadric radius must be positive, got {r}"));
        }
        Ok(Semiquadric { a, r })
    }

    pub fn fiber(&self, z: C64) -> FiberPoint {
        fiber_point(self, z)
    }
}

pub fn fiber_point(s: &Semiquadric, z: C64) -> FiberPoint {
    let d = z - s.a;
    let dist = d.norm();
    if dist == 0.0 {
        return FiberPoint::Pole;
    }
    if (dist - s.r).abs() <= BOUNDARY_TOL * s.r.max(1.0) {
        return FiberPoint::Point(z.conj());
    }
    if dist > s.r {
        return FiberPoint::Absent;
    }
    FiberPoint::Point(s.a.conj() + s.r * s.r / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum PathFamily {
    First,
    Second { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberPath {
    pub z: C64,
    pub family: PathFamily,
    pub params: Vec<f64>,
    /// `None` where the fiber is absent.
    pub points: Vec<Option<C64>>,
}

impl FiberPath {
    fn label(&self) -> &'static str {
        match self.family {
            PathFamily::First => "first",
            PathFamily::Second { .. } => "second",
        }
    }

    /// CSV rows `family,param,re,im`; absent fibers are skipped.
    pub fn csv_rows(&self, out: &mut String) {
        for (p, w) in self.params.iter().zip(&self.points) {
            if let Some(w) = w {
                csv_row(out, self.label(), *p, *w);
            }
        }
    }

    pub fn present(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.params
            .iter()
            .zip(&self.points)
            .filter_map(|(p, w)| w.map(|w| (*p, w)))
    }
}

pub const CSV_HEADER: &str = "family,param,re,im";

fn csv_row(out: &mut String, label: &str, p: f64, w: C64) {
    let _ = writeln!(out, "{label},{},{},{}", format_float(p), format_float(w.re), format_float(w.im));
}

fn check_increasing(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return domain("empty parameter grid");
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("parameter grid must be strictly increasing");
    }
    Ok(())
}

/// Fibers of `Λ(0, R)` over `z` for `R` in `r_grid ⊂ [|z|, 1]`.
///
/// `R = |z|` is allowed and gives `conj(z)`, the closure point of the segment.
pub fn first_family_path(z: C64, r_grid: &[f64]) -> Result<FiberPath> {
    let m = z.norm();
    if !(m > 0.0 && m <= 1.0) {
        return domain(format!("first family needs 0 < |z| <= 1, got |z| = {m}"));
    }
    check_increasing(r_grid)?;
    let lo = r_grid[0];
    let hi = r_grid[r_grid.len() - 1];
    if lo < m * (1.0 - BOUNDARY_TOL) || hi > 1.0 {
        return domain(format!("radius grid [{lo}, {hi}] is not inside [|z|, 1] = [{m}, 1]"));
    }
    let points = r_grid
        .iter()
        .map(|&r| fiber_point(&Semiquadric { a: C64::new(0.0, 0.0), r }, z).point())
        .collect();
    Ok(FiberPath { z, family: PathFamily::First, params: r_grid.to_vec(), points })
}

/// `count` equispaced radii from `|z|` to 1.
pub fn first_family_grid(z: C64, count: usize) -> Vec<f64> {
    linspace(z.norm(), 1.0, count)
}

fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![a],
        // the last value is pinned so the grid never overshoots `b`
        _ => (0..count)
            .map(|i| if i == count - 1 { b } else { a + (b - a) * i as f64 / (count - 1) as f64 })
            .collect(),
    }
}

/// The `T` at which `z` lies on the circle `bΔ(T, ρ(T))`.
///
/// `|z − T|² = (T − t)(T − 1/t)` loses its `T²` terms and reads
/// `T·(t + 1/t − 2 Re z) = 1 − |z|²`.
pub fn t_of_z(z: C64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("t must lie in (0, 1), got {t}"));
    }
    let big_t = (1.0 - z.norm_sqr()) / (t + 1.0 / t - 2.0 * z.re);
    if !(big_t >= 0.0 && big_t < t) {
        return domain(format!("no circle of the family through {z} (T = {big_t})"));
    }
    Ok(big_t)
}

pub fn rho(t: f64, big_t: f64) -> f64 {
    ct_radius(t, big_t)
}

/// Fibers of `Λ(T, ρ(T))` over `z` for `T` in `t_grid ⊂ [0, T(z)]`; entries
/// past `T(z)` are absent.
pub fn second_family_path(z: C64, t: f64, t_grid: &[f64]) -> Result<FiberPath> {
    let tz = t_of_z(z, t)?;
    check_increasing(t_grid)?;
    if t_grid[0] < 0.0 || t_grid[t_grid.len() - 1] >= t {
        return domain(format!("T grid must lie in [0, {t})"));
    }
    let points = t_grid
        .iter()
        .map(|&bt| {
            if bt > tz * (1.0 + BOUNDARY_TOL) + BOUNDARY_TOL {
                return None;
            }
            let r = rho(t, bt);
            // the closure point is pinned exactly
            if (bt - tz).abs() <= BOUNDARY_TOL * tz.max(1.0) {
                return Some(z.conj());
            }
            fiber_point(&Semiquadric { a: C64::new(bt, 0.0), r }, z).point()
        })
        .collect();
    Ok(FiberPath { z, family: PathFamily::Second { t }, params: t_grid.to_vec(), points })
}

/// `count` equispaced values of `T` from 0 to `T(z)`.
pub fn second_family_grid(z: C64, t: f64, count: usize) -> Result<Vec<f64>> {
    Ok(linspace(0.0, t_of_z(z, t)?, count))
}

/// Scale-free concyclicity measure of four planar points: the determinant with
/// rows `[x²+y², x, y, 1]` divided by the product of the six pairwise distances
/// to the power 2/3. Zero iff the points lie on a common circle or line.
/// Coincident points (distance below 1e-12) are trivially concyclic.
pub fn concyclicity(p: [C64; 4]) -> f64 {
    let mut prod = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let d = (p[i] - p[j]).norm();
            if d < 1e-12 {
                return 0.0;
            }
            prod *= d;
        }
    }
    let m = nalgebra::Matrix4::from_fn(|i, j| match j {
        0 => p[i].norm_sqr(),
        1 => p[i].re,
        2 => p[i].im,
        _ => 1.0,
    });
    m.determinant().abs() / prod.powf(2.0 / 3.0)
}

/// Distance from `p` to the line through `a` and `b`.
pub fn line_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    ((p - a) * d.conj()).im.abs() / d.norm()
}

/// A circular arc `center + radius·e^{iθ}`, `θ` from `start` to `start + sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub center: C64,
    pub radius: f64,
    pub start: f64,
    /// Signed; positive is counterclockwise.
    pub sweep: f64,
}

impl Arc {
    pub fn at(&self, s: f64) -> C64 {
        self.center + C64::from_polar(self.radius, self.start + s * self.sweep)
    }

    pub fn start_point(&self) -> C64 {
        self.at(0.0)
    }

    pub fn end_point(&self) -> C64 {
        self.at(1.0)
    }
}

/// Circle through three points, as (center, radius).
pub fn circumcircle(a: C64, b: C64, c: C64) -> Result<(C64, f64)> {
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    if d.abs() < 1e-14 {
        return Err(Error::Degenerate(format!("{a}, {b}, {c} are collinear")));
    }
    let (na, nb, nc) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (na * (b.im - c.im) + nb * (c.im - a.im) + nc * (a.im - b.im)) / d;
    let uy = (na * (c.re - b.re) + nb * (a.re - c.re) + nc * (b.re - a.re)) / d;
    let center = C64::new(ux, uy);
    Ok((center, (a - center).norm()))
}

/// The real-axis cases, where `D_z` degenerates into subsets of `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum RealAxisCase {
    /// `0 < η < t`: `(−∞, η] ∪ [1/η, ∞)`.
    TwoRays { eta: f64 },
    /// `−1 ≤ η < 0`: `[1/η, η]`.
    NegativeSegment { eta: f64 },
    /// `t < η ≤ 1`: `[η, 1/η]`.
    Segment { eta: f64 },
    /// `η = 0`: the fiber of the first family is at infinity.
    Origin,
    /// `η = t`: the second family never reaches `z`.
    AtT { eta: f64 },
}

impl RealAxisCase {
    pub fn describe(&self) -> String {
        match *self {
            RealAxisCase::TwoRays { eta } => format!("(-inf, {eta}] u [{}, inf)", 1.0 / eta),
            RealAxisCase::NegativeSegment { eta } => format!("[{}, {eta}]", 1.0 / eta),
            RealAxisCase::Segment { eta } => format!("[{eta}, {}]", 1.0 / eta),
            RealAxisCase::Origin => "origin".into(),
            RealAxisCase::AtT { eta } => format!("eta = t = {eta}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DzBoundary {
    Curve {
        /// The segment runs from `conj(z)` to `1/z`, the arc from `1/z` back.
        segment: [C64; 2],
        arc: Arc,
        lower_half_plane: bool,
    },
    Degenerate(RealAxisCase),
}

pub fn dz_boundary(z: C64, t: f64) -> Result<DzBoundary> {
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("t must lie in (0, 1), got {t}"));
    }
    if z.norm() >= 1.0 {
        return domain(format!("{z} is not in the open disc"));
    }
    if z.im == 0.0 {
        let eta = z.re;
        let case = if eta == 0.0 {
            RealAxisCase::Origin
        } else if eta < 0.0 {
            RealAxisCase::NegativeSegment { eta }
        } else if eta < t {
            RealAxisCase::TwoRays { eta }
        } else if eta > t {
            RealAxisCase::Segment { eta }
        } else {
            RealAxisCase::AtT { eta }
        };
        return Ok(DzBoundary::Degenerate(case));
    }
    let zb = z.conj();
    let inv = z.inv();
    let (center, radius) = circumcircle(C64::new(t, 0.0), C64::new(1.0 / t, 0.0), zb)?;
    let start = (inv - center).arg();
    let end = (zb - center).arg();
    // pick the arc direction that passes through the fiber at T(z)/2
    let tz = t_of_z(z, t)?;
    let mid = fiber_point(&Semiquadric { a: C64::new(0.5 * tz, 0.0), r: rho(t, 0.5 * tz) }, z)
        .point()
        .ok_or_else(|| Error::Degenerate("midpoint fiber is absent".into()))?;
    let ccw = (end - start).rem_euclid(2.0 * PI);
    let mid_off = ((mid - center).arg() - start).rem_euclid(2.0 * PI);
    let sweep = if mid_off <= ccw { ccw } else { ccw - 2.0 * PI };
    let arc = Arc { center, radius, start, sweep };
    Ok(DzBoundary::Curve { segment: [zb, inv], arc, lower_half_plane: z.im > 0.0 })
}

impl DzBoundary {
    /// CSV rows `piece,param,re,im` sampling the closed curve with `count`
    /// points per piece.
    pub fn csv_rows(&self, count: usize, out: &mut String) {
        if let DzBoundary::Curve { segment, arc, .. } = self {
            for s in linspace(0.0, 1.0, count) {
                csv_row(out, "segment", s, segment[0] + (segment[1] - segment[0]) * s);
            }
            for s in linspace(0.0, 1.0, count) {
                csv_row(out, "arc", s, arc.at(s));
            }
        }
    }

    /// Points strictly inside the closed curve. The domain is a circular
    /// segment, which is convex, so convex combinations of matching boundary
    /// points stay inside.
    pub fn interior_samples(&self, count: usize) -> Vec<C64> {
        let DzBoundary::Curve { segment, arc, .. } = self else {
            return vec![];
        };
        let mut pts = vec![];
        for i in 1..count {
            let s = i as f64 / count as f64;
            let on_arc = arc.at(s);
            let on_seg = segment[1] + (segment[0] - segment[1]) * s;
            for lam in [0.25, 0.5, 0.75] {
                pts.push(on_arc * lam + on_seg * (1.0 - lam));
            }
        }
        pts
    }
}

/// Comparison of the two families over a real point, where both fibers sweep
/// the same real interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Folding {
    pub first_range: [f64; 2],
    pub second_range: [f64; 2],
    /// Hausdorff distance between the two swept intervals.
    pub overlap_distance: f64,
    /// Sign of the displacement from the first to the last fiber.
    pub first_orientation: f64,
    pub second_orientation: f64,
}

pub fn folding(eta: f64, t: f64, count: usize) -> Result<Folding> {
    if !((-1.0 < eta && eta < 0.0) || (t < eta && eta < 1.0)) {
        return domain(format!("folding needs eta in (-1, 0) or (t, 1), got {eta}"));
    }
    let z = C64::new(eta, 0.0);
    let first = first_family_path(z, &first_family_grid(z, count))?;
    let second = second_family_path(z, t, &second_family_grid(z, t, count)?)?;
    let range = |p: &FiberPath| -> ([f64; 2], f64) {
        let xs: Vec<f64> = p.present().map(|(_, w)| w.re).collect();
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ([lo, hi], (xs[xs.len() - 1] - xs[0]).signum())
    };
    let (r1, o1) = range(&first);
    let (r2, o2) = range(&second);
    Ok(Folding {
        first_range: r1,
        second_range: r2,
        overlap_distance: (r1[0] - r2[0]).abs().max((r1[1] - r2[1]).abs()),
        first_orientation: o1,
        second_orientation: o2,
    })
}
