//! Polyanalytic functions `f(z) = Σ_{j≤n} a_j(z)·conj(z)^j` on the unit disc.
//!
//! On a circle `bΔ(a, r)` the substitution `conj(z) = conj(a) + r²/(z − a)` turns
//! such an `f` into a meromorphic function with a pole of degree at most `n` at
//! the center. The harnesses in [`harness`] check that property across circle
//! families and confirm the polyanalytic form through two independent routes:
//! radial Fourier recovery ([`recovery`]) and finite-difference `∂̄` powers.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::geometry::{Circle, C64};

pub mod harness;
pub mod recovery;
pub mod vandermonde;

pub use harness::{
    boundary_continuity, condition_h_check, two_family_harness, ContinuityReport, HReport,
    HarnessParams, HarnessReport, ImplicationStatus,
};
pub use recovery::{recover_coefficients, RecoveryResult, DEFAULT_RADII};
pub use vandermonde::vandermonde_solve;

/// A function on (part of) the plane, shared across threads.
pub type DiscFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

pub fn disc_fn(f: impl Fn(C64) -> C64 + Send + Sync + 'static) -> DiscFn {
    Arc::new(f)
}

/// A holomorphic coefficient function.
#[derive(Clone)]
pub enum Holomorphic {
    /// Taylor coefficients at the origin, evaluated exactly as a polynomial.
    Taylor(Vec<C64>),
    Closure(DiscFn),
}

impl Holomorphic {
    pub fn eval(&self, z: C64) -> C64 {
        match self {
            Holomorphic::Taylor(c) => c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * z + a),
            Holomorphic::Closure(f) => f(z),
        }
    }
}

impl fmt::Debug for Holomorphic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Holomorphic::Taylor(c) => f.debug_tuple("Taylor").field(c).finish(),
            Holomorphic::Closure(_) => f.write_str("Closure(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolyanalyticFunction {
    coeffs: Vec<Holomorphic>,
}

impl PolyanalyticFunction {
    pub fn new(coeffs: Vec<Holomorphic>) -> Result<Self> {
        if coeffs.is_empty() {
            return domain("a polyanalytic function needs at least one coefficient");
        }
        Ok(PolyanalyticFunction { coeffs })
    }

    /// `taylor[j][k]` is the coefficient of `z^k conj(z)^j`.
    pub fn from_taylor(taylor: Vec<Vec<C64>>) -> Result<Self> {
        Self::new(taylor.into_iter().map(Holomorphic::Taylor).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Holomorphic] {
        &self.coeffs
    }

    pub fn eval(&self, z: C64) -> C64 {
        eval_poly(self, z)
    }

    pub fn to_fn(&self) -> DiscFn {
        let p = self.clone();
        Arc::new(move |z| p.eval(z))
    }
}

pub fn eval_poly(p: &PolyanalyticFunction, z: C64) -> C64 {
    let zb = z.conj();
    p.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * zb + a.eval(z))
}

/// The meromorphic extension of a polyanalytic function from one circle.
#[derive(Debug, Clone)]
pub struct CircleExtension {
    pub function: PolyanalyticFunction,
    pub circle: Circle,
}

impl CircleExtension {
    /// `Σ a_j(z)·(conj(a) + r²/(z − a))^j`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let a = self.circle.center;
        let d = z - a;
        if d.norm() == 0.0 {
            if self.function.order() == 0 {
                return Ok(self.function.coeffs[0].eval(z));
            }
            return Err(Error::Pole { re: z.re, im: z.im });
        }
        let w = a.conj() + self.circle.radius * self.circle.radius / d;
        Ok(self
            .function
            .coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * w + c.eval(z)))
    }
}

pub fn extension_from_circle(p: &PolyanalyticFunction, c: &Circle) -> CircleExtension {
    CircleExtension { function: p.clone(), circle: *c }
}

pub const DEFAULT_DBAR_STEP: f64 = 1e-2;

/// Discrete `∂̄` stencil: the average of the axis-aligned and the 45°-rotated
/// centered stencils. The rotation cancels the `h²·∂³` term that a single
/// stencil leaves on holomorphic data.
fn dbar_stencil() -> BTreeMap<[i32; 4], C64> {
    // offsets are integer combinations of h·{1, i, e^{iπ/4}, i·e^{iπ/4}}
    let q = 0.125;
    let rot = C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let i = C64::new(0.0, 1.0);
    let mut s = BTreeMap::new();
    s.insert([1, 0, 0, 0], C64::new(q, 0.0));
    s.insert([-1, 0, 0, 0], C64::new(-q, 0.0));
    s.insert([0, 1, 0, 0], i * q);
    s.insert([0, -1, 0, 0], -i * q);
    s.insert([0, 0, 1, 0], rot * q);
    s.insert([0, 0, -1, 0], -rot * q);
    s.insert([0, 0, 0, 1], i * rot * q);
    s.insert([0, 0, 0, -1], -i * rot * q);
    s
}

/// Weights of the `power`-fold composition (without the `1/h^power` factor).
fn composed_stencil(power: usize) -> Vec<([i32; 4], C64)> {
    let base = dbar_stencil();
    let mut acc: BTreeMap<[i32; 4], C64> = BTreeMap::new();
    acc.insert([0; 4], C64::new(1.0, 0.0));
    for _ in 0..power {
        let mut next: BTreeMap<[i32; 4], C64> = BTreeMap::new();
        for (o1, w1) in &acc {
            for (o2, w2) in &base {
                let key = [o1[0] + o2[0], o1[1] + o2[1], o1[2] + o2[2], o1[3] + o2[3]];
                *next.entry(key).or_insert(C64::new(0.0, 0.0)) += w1 * w2;
            }
        }
        acc = next;
    }
    acc.into_iter().filter(|(_, w)| w.norm() > 0.0).collect()
}

fn offset(key: &[i32; 4], h: f64) -> C64 {
    let rot = C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let basis = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), rot, rot * C64::new(0.0, 1.0)];
    basis
        .iter()
        .zip(key)
        .fold(C64::new(0.0, 0.0), |acc, (b, k)| acc + b * (*k as f64))
        * h
}

/// Finite-difference `∂̄^power f(z)` with step `h`.
pub fn dbar_power(f: &dyn Fn(C64) -> C64, z: C64, power: usize, h: f64) -> C64 {
    let stencil = composed_stencil(power);
    apply_stencil(f, z, &stencil, h, power)
}

fn apply_stencil(f: &dyn Fn(C64) -> C64, z: C64, stencil: &[([i32; 4], C64)], h: f64, power: usize) -> C64 {
    let sum = stencil
        .iter()
        .fold(C64::new(0.0, 0.0), |acc, (k, w)| acc + w * f(z + offset(k, h)));
    sum / h.powi(power as i32)
}

/// `max_grid |∂̄^{n+1} f|`. A function is polyanalytic of order at most `n`
/// exactly when this derivative vanishes.
pub fn dbar_residual(f: &dyn Fn(C64) -> C64, n: usize, grid: &[C64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return domain("finite-difference step must be positive");
    }
    let reach = (n + 1) as f64 * h;
    if let Some(z) = grid.iter().find(|z| z.norm() + reach >= 1.0) {
        return domain(format!("grid point {z} is within {reach} of the unit circle"));
    }
    let stencil = composed_stencil(n + 1);
    Ok(grid
        .iter()
        .map(|&z| apply_stencil(f, z, &stencil, h, n + 1).norm())
        .fold(0.0, f64::max))
}

/// Polar grid: the origin plus `rings` equispaced radii in `(0, max_radius]`,
/// each with `angles` points.
pub fn polar_grid(max_radius: f64, rings: usize, angles: usize) -> Vec<C64> {
    let mut g = vec![C64::new(0.0, 0.0)];
    for r in 1..=rings {
        let rad = max_radius * r as f64 / rings as f64;
        for k in 0..angles {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5 * (r % 2) as f64) / angles as f64;
            g.push(C64::from_polar(rad, th));
        }
    }
    g
}

/// Grid used by the harnesses for `∂̄` checks.
pub fn default_dbar_grid() -> Vec<C64> {
    polar_grid(0.7, 6, 16)
}
