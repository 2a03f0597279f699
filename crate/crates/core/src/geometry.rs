//! Disc automorphisms, circle families inside the unit disc, and complex lines
//! meeting the unit ball of C².
//!
//! Circles carry two descriptions. The Euclidean one is a center and a radius.
//! The hyperbolic one is the pair `(alpha, R)` such that the circle is the image
//! of `{|ζ| = R}` under the disc automorphism `M_alpha(ζ) = (alpha − ζ)/(1 − conj(alpha) ζ)`.
//! All circles with the same hyperbolic center form the family `C_alpha`; for a
//! boundary point `alpha` the family is the pencil of circles in the closed disc
//! through `alpha`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

/// `| |center| + radius − 1 |` at or below this counts as internal tangency.
pub const TANGENT_TOL: f64 = 1e-9;

const DEGENERATE_DENOM: f64 = 1e-14;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum CircleKind {
    Interior,
    TangentInternal,
    OutsideScope,
}

/// A Euclidean circle `{center + radius·e^{iθ}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("circle radius must be positive, got {radius}"));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return domain("circle center must be finite");
        }
        Ok(Circle { center, radius })
    }

    pub fn kind(&self) -> CircleKind {
        let reach = self.center.norm() + self.radius;
        if (reach - 1.0).abs() <= TANGENT_TOL {
            CircleKind::TangentInternal
        } else if reach < 1.0 {
            CircleKind::Interior
        } else {
            CircleKind::OutsideScope
        }
    }

    pub fn point(&self, theta: f64) -> C64 {
        self.center + C64::from_polar(self.radius, theta)
    }

    /// True when `z` lies in the open disc bounded by the circle.
    pub fn encloses(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// The hyperbolic description; only interior circles have one.
    pub fn hyperbolic_center(&self) -> Result<HyperbolicCircle> {
        hyperbolic_center(self)
    }
}

impl fmt::Display for Circle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "bΔ({}{:+}i, {})",
            self.center.re, self.center.im, self.radius
        )
    }
}

/// Circle given by its hyperbolic center `alpha` and hyperbolic radius parameter `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicCircle {
    pub alpha: C64,
    pub radius: f64,
}

impl HyperbolicCircle {
    pub fn new(alpha: C64, radius: f64) -> Result<Self> {
        if !(alpha.norm() < 1.0) {
            return domain(format!("hyperbolic center must lie in the open disc, |alpha| = {}", alpha.norm()));
        }
        if !(radius > 0.0 && radius < 1.0) {
            return domain(format!("hyperbolic radius parameter must lie in (0,1), got {radius}"));
        }
        Ok(HyperbolicCircle { alpha, radius })
    }

    pub fn to_circle(&self) -> Circle {
        circle_from_hyperbolic(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnchorKind {
    Interior,
    Boundary,
}

/// The point a circle family is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyAnchor {
    pub alpha: C64,
    pub kind: AnchorKind,
}

impl FamilyAnchor {
    pub fn interior(alpha: C64) -> Result<Self> {
        if alpha.norm() < 1.0 - TANGENT_TOL {
            Ok(FamilyAnchor { alpha, kind: AnchorKind::Interior })
        } else {
            domain(format!("interior anchor needs |alpha| < 1, got {}", alpha.norm()))
        }
    }

    /// Boundary anchor; `alpha` must be unimodular within [`TANGENT_TOL`] and
    /// is projected onto the unit circle.
    pub fn boundary(alpha: C64) -> Result<Self> {
        let m = alpha.norm();
        if (m - 1.0).abs() <= TANGENT_TOL {
            Ok(FamilyAnchor { alpha: alpha / m, kind: AnchorKind::Boundary })
        } else {
            domain(format!("boundary anchor needs |alpha| = 1, got {m}"))
        }
    }

    /// Classifies by modulus.
    pub fn at(alpha: C64) -> Result<Self> {
        if alpha.norm() < 1.0 - TANGENT_TOL {
            Self::interior(alpha)
        } else {
            Self::boundary(alpha)
        }
    }

    /// The family member with parameter `param ∈ (0,1)`.
    pub fn circle(&self, param: f64) -> Result<Circle> {
        family_circle(self, param)
    }
}

impl fmt::Display for FamilyAnchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            AnchorKind::Interior => "interior",
            AnchorKind::Boundary => "boundary",
        };
        if self.alpha.im == 0.0 {
            write!(f, "{kind}:{}", self.alpha.re)
        } else {
            write!(f, "{kind}:{},{}", self.alpha.re, self.alpha.im)
        }
    }
}

/// `M_alpha(z) = (alpha − z)/(1 − conj(alpha)·z)`.
pub fn mobius(alpha: C64, z: C64) -> Result<C64> {
    if !(alpha.norm() < 1.0) {
        return domain(format!("Möbius parameter must satisfy |alpha| < 1, got {}", alpha.norm()));
    }
    let denom = C64::new(1.0, 0.0) - alpha.conj() * z;
    if denom.norm() < DEGENERATE_DENOM {
        return domain("Möbius denominator vanishes");
    }
    Ok((alpha - z) / denom)
}

/// Euclidean form of `{M_alpha(R ζ) : |ζ| = 1}`.
///
/// The diameter through `alpha` has endpoints `M_alpha(∓R·alpha/|alpha|)`,
/// which gives center `alpha(1−R²)/(1−|alpha|²R²)` and radius
/// `R(1−|alpha|²)/(1−|alpha|²R²)`.
pub fn circle_from_hyperbolic(h: &HyperbolicCircle) -> Circle {
    let a2 = h.alpha.norm_sqr();
    let r2 = h.radius * h.radius;
    let denom = 1.0 - a2 * r2;
    Circle {
        center: h.alpha * ((1.0 - r2) / denom),
        radius: h.radius * (1.0 - a2) / denom,
    }
}

/// Inverse of [`circle_from_hyperbolic`] on interior circles.
///
/// Along the diameter through the center the two extreme points sit at
/// hyperbolic positions `atanh(|c| ∓ r)`; the hyperbolic center is their
/// hyperbolic midpoint and `R` is the tanh of the half gap.
pub fn hyperbolic_center(c: &Circle) -> Result<HyperbolicCircle> {
    match c.kind() {
        CircleKind::Interior => {}
        kind => {
            return domain(format!("hyperbolic center is undefined for a {kind:?} circle {c}"));
        }
    }
    let m = c.center.norm();
    let near = (m - c.radius).atanh();
    let far = (m + c.radius).atanh();
    let a =(0.5 * (near + far)).tanh();
    let radius = (0.5 * (far - near)).tanh();
    let dir = if m > 0.0 { c.center / m } else { C64::new(1.0, 0.0) };
    Ok(HyperbolicCircle { alpha: dir * a, radius })
}

/// Member of the family anchored at `anchor`.
///
/// Interior anchors use the hyperbolic radius `param`. Boundary anchors use the
/// circle of radius `param` centered at `(1 − param)·alpha`, which passes through
/// `alpha` and touches the unit circle there.
pub fn family_circle(anchor: &FamilyAnchor, param: f64) -> Result<Circle> {
    if !(param > 0.0 && param < 1.0) {
        return domain(format!("family parameter must lie in (0,1), got {param}"));
    }
    match anchor.kind {
        AnchorKind::Interior => {
            Ok(circle_from_hyperbolic(&HyperbolicCircle::new(anchor.alpha, param)?))
        }
        AnchorKind::Boundary => Circle::new(anchor.alpha * (1.0 - param), param),
    }
}

/// `bΔ(T, ρ(T))` with `ρ(T) = √((T − t)(T − 1/t))`, the circles of `C_t`
/// indexed by their Euclidean center `T ∈ [0, t)`.
pub fn ct_circle(t: f64, big_t: f64) -> Result<Circle> {
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("ct_circle needs 0 < t < 1, got {t}"));
    }
    if !(big_t >= 0.0 && big_t < t) {
        return domain(format!("ct_circle needs 0 <= T < t, got T = {big_t}, t = {t}"));
    }
    Circle::new(C64::new(big_t, 0.0), ct_radius(t, big_t))
}

pub(crate) fn ct_radius(t: f64, big_t: f64) -> f64 {
    ((big_t - t) * (big_t - 1.0 / t)).sqrt()
}

/// A point of C².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub z: C64,
    pub w: C64,
}

impl Point2 {
    pub const fn new(z: C64, w: C64) -> Self {
        Point2 { z, w }
    }

    pub fn real(z: f64, w: f64) -> Self {
        Point2 { z: C64::new(z, 0.0), w: C64::new(w, 0.0) }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.w.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.z + o.z, self.w + o.w)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.z - o.z, self.w - o.w)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.z, -self.w)
    }
}

impl Mul<C64> for Point2 {
    type Output = Point2;
    fn mul(self, s: C64) -> Point2 {
        Point2::new(self.z * s, self.w * s)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.z * s, self.w * s)
    }
}

impl Serialize for Point2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(4)?;
        t.serialize_element(&self.z.re)?;
        t.serialize_element(&self.z.im)?;
        t.serialize_element(&self.w.re)?;
        t.serialize_element(&self.w.im)?;
        t.end()
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}{:+}i, {}{:+}i)",
            self.z.re, self.z.im, self.w.re, self.w.im
        )
    }
}

/// `⟨a|b⟩ = a₁·conj(b₁) + a₂·conj(b₂)`.
pub fn herm_inner(a: Point2, b: Point2) -> C64 {
    a.z * b.z.conj() + a.w * b.w.conj()
}

/// Complex line `{base + ζ·direction : ζ ∈ C}` with a unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexLine {
    pub base: Point2,
    pub direction: Point2,
}

const LINE_TOL: f64 = 1e-10;

impl ComplexLine {
    pub fn new(base: Point2, direction: Point2) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return domain("complex line needs a nonzero finite direction");
        }
        if !base.is_finite() {
            return domain("complex line needs a finite base point");
        }
        Ok(ComplexLine { base, direction: direction * (1.0 / n) })
    }

    /// The line through two distinct points.
    pub fn through(a: Point2, b: Point2) -> Result<Self> {
        if (b - a).norm() < LINE_TOL {
            return Err(Error::Degenerate("a line through two coincident points".into()));
        }
        ComplexLine::new(a, b - a)
    }

    pub fn at(&self, zeta: C64) -> Point2 {
        self.base + self.direction * zeta
    }

    /// Distance from `p` to the line.
    pub fn distance(&self, p: Point2) -> f64 {
        let v = p - self.base;
        let along = herm_inner(v, self.direction);
        (v - self.direction * along).norm()
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.distance(p) <= LINE_TOL * (1.0 + p.norm())
    }

    /// Same point set: two points of `other` lie on `self`.
    pub fn same_as(&self, other: &ComplexLine) -> bool {
        self.contains(other.at(C64::new(0.0, 0.0))) && self.contains(other.at(C64::new(1.0, 0.0)))
    }

    pub fn ball_disc(&self) -> Option<BallDisc> {
        line_ball_disc(self)
    }
}

/// The disc `{ζ : |base + ζ·direction| < 1}` in the line's parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallDisc {
    pub zeta0: C64,
    pub rho: f64,
}

impl BallDisc {
    pub fn boundary_param(&self, theta: f64) -> C64 {
        self.zeta0 + C64::from_polar(self.rho, theta)
    }

    pub fn as_circle(&self) -> Circle {
        Circle { center: self.zeta0, radius: self.rho }
    }
}

/// Parameter disc cut from the unit ball by `line`, or `None` when the line misses
/// the open ball. Completing the square gives
/// `|b + ζd|² = |ζ + ⟨b|d⟩|² + |b|² − |⟨b|d⟩|²` for unit `d`.
pub fn line_ball_disc(line: &ComplexLine) -> Option<BallDisc> {
    let beta = herm_inner(line.base, line.direction);
    let rho2 = 1.0 - line.base.norm_sqr() + beta.norm_sqr();
    if rho2 <= 0.0 {
        None
    } else {
        Some(BallDisc { zeta0: -beta, rho: rho2.sqrt() })
    }
}

/// The automorphism of the unit ball exchanging `0` and `a`:
/// `φ_a(p) = (a − P_a p − s_a Q_a p)/(1 − ⟨p|a⟩)` with `P_a` the projection
/// onto `a`, `Q_a = I − P_a` and `s_a = √(1 − |a|²)`. It is an involution.
pub fn ball_mobius(a: Point2, p: Point2) -> Result<Point2> {
    let a2 = a.norm_sqr();
    if !(a2 < 1.0) {
        return domain(format!("ball automorphism needs |a| < 1, got {}", a2.sqrt()));
    }
    if a2 == 0.0 {
        return Ok(-p);
    }
    let pa = a * (herm_inner(p, a) / a2);
    let qa = p - pa;
    let s = (1.0 - a2).sqrt();
    let denom = C64::new(1.0, 0.0) - herm_inner(p, a);
    if denom.norm() < DEGENERATE_DENOM {
        return domain("ball automorphism is singular at this point");
    }
    let num = a - pa - qa * s;
    Ok(num * denom.inv())
}

/// Where [`ball_mobius`] sends the point at infinity in direction `e`, i.e. the
/// common point of the images of all lines parallel to `e`.
pub fn ball_mobius_at_infinity(a: Point2, e: Point2) -> Result<Point2> {
    let a2 = a.norm_sqr();
    if !(a2 < 1.0) {
        return domain("ball automorphism needs |a| < 1");
    }
    let ea = herm_inner(e, a);
    if ea.norm() < DEGENERATE_DENOM {
        return domain("direction is orthogonal to a; its pencil stays parallel");
    }
    let pe = if a2 == 0.0 { Point2::default() } else { a * (ea / a2) };
    let qe = e - pe;
    let s = (1.0 - a2).sqrt();
    Ok((pe + qe * s) * ea.inv())
}
