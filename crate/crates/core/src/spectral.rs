//! Fourier analysis of boundary values on circles.
//!
//! A continuous function on `bΔ(a, r)` extends meromorphically into `Δ(a, r)`
//! with its only pole at `a`, of degree at most `n`, exactly when the Fourier
//! coefficients `c_m` of `θ ↦ f(a + r e^{iθ})` vanish for `m < −n`. Everything in
//! this module is built on that equivalence, discretized by the trapezoidal
//! rule, which is spectrally accurate for analytic periodic data.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::geometry::{Circle, C64};

pub const DEFAULT_SAMPLES: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Coefficients below this magnitude are left out of serialized spectra.
pub const SERIALIZE_FLOOR: f64 = 1e-15;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_fft(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn check_count(count: usize) -> Result<()> {
    if count < 8 || !count.is_power_of_two() {
        return domain(format!("sample count must be a power of two >= 8, got {count}"));
    }
    Ok(())
}

/// Values of a function at `count` equispaced points of a circle,
/// `values[k] = f(center + radius·e^{i(2πk/count + phase)})`.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    pub circle: Circle,
    pub count: usize,
    pub phase: f64,
    pub values: Vec<C64>,
}

impl BoundarySamples {
    pub fn angle(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.count as f64 + self.phase
    }
}

pub fn sample_circle(f: impl Fn(C64) -> C64, circle: &Circle, count: usize) -> Result<BoundarySamples> {
    sample_circle_with_phase(f, circle, count, 0.0)
}

/// Like [`sample_circle`] with the sampling grid rotated by `phase`. A half-step
/// phase keeps the grid off a distinguished point of the circle.
pub fn sample_circle_with_phase(
    f: impl Fn(C64) -> C64,
    circle: &Circle,
    count: usize,
    phase: f64,
) -> Result<BoundarySamples> {
    check_count(count)?;
    let mut values = Vec::with_capacity(count);
    for k in 0..count {
        let theta = 2.0 * PI * k as f64 / count as f64 + phase;
        let v = f(circle.point(theta));
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { theta });
        }
        values.push(v);
    }
    Ok(BoundarySamples { circle: *circle, count, phase, values })
}

/// Fourier coefficients `c_m`, `m ∈ [−N/2, N/2)`, of a function on a circle,
/// so that the boundary function is `Σ c_m e^{imθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub circle: Circle,
    coeffs: Vec<C64>,
}

impl Spectrum {
    pub fn from_samples(samples: &BoundarySamples) -> Spectrum {
        let n = samples.count;
        let mut buf = samples.values.clone();
        forward_fft(n).process(&mut buf);
        let half = n / 2;
        let scale = 1.0 / n as f64;
        let coeffs = (0..n)
            .map(|i| {
                let m = i as i64 - half as i64;
                let c = buf[(m.rem_euclid(n as i64)) as usize] * scale;
                if samples.phase == 0.0 {
                    c
                } else {
                    c * C64::from_polar(1.0, -(m as f64) * samples.phase)
                }
            })
            .collect();
        Spectrum { circle: samples.circle, coeffs }
    }

    /// Builds a spectrum from explicit coefficients ordered `m = −N/2 .. N/2−1`.
    pub fn from_coefficients(circle: Circle, coeffs: Vec<C64>) -> Result<Spectrum> {
        check_count(coeffs.len())?;
        Ok(Spectrum { circle, coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_index(&self) -> i64 {
        -(self.coeffs.len() as i64 / 2)
    }

    pub fn max_index(&self) -> i64 {
        self.coeffs.len() as i64 / 2 - 1
    }

    /// `c_m`, zero outside the resolved range.
    pub fn coeff(&self, m: i64) -> C64 {
        if m < self.min_index() || m > self.max_index() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(m - self.min_index()) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let lo = self.min_index();
        self.coeffs.iter().enumerate().map(move |(i, c)| (lo + i as i64, *c))
    }

    /// Largest coefficient magnitude.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    fn with_coeffs(&self, coeffs: Vec<C64>) -> Spectrum {
        Spectrum { circle: self.circle, coeffs }
    }
}

impl Serialize for Spectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coeffs<'a>(&'a Spectrum);
        impl Serialize for Coeffs<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let kept: Vec<_> = self.0.iter().filter(|(_, c)| c.norm() >= SERIALIZE_FLOOR).collect();
                let mut seq = s.serialize_seq(Some(kept.len()))?;
                for (m, c) in kept {
                    seq.serialize_element(&(m, c.re, c.im))?;
                }
                seq.end()
            }
        }
        let mut st = s.serialize_struct("Spectrum", 3)?;
        st.serialize_field("center", &[self.circle.center.re, self.circle.center.im])?;
        st.serialize_field("radius", &self.circle.radius)?;
        st.serialize_field("coeffs", &Coeffs(self))?;
        st.end()
    }
}

pub fn circle_spectrum(f: impl Fn(C64) -> C64, circle: &Circle, count: usize) -> Result<Spectrum> {
    Ok(Spectrum::from_samples(&sample_circle(f, circle, count)?))
}

pub fn circle_spectrum_with_phase(
    f: impl Fn(C64) -> C64,
    circle: &Circle,
    count: usize,
    phase: f64,
) -> Result<Spectrum> {
    Ok(Spectrum::from_samples(&sample_circle_with_phase(f, circle, count, phase)?))
}

/// Outcome of testing for a pole of degree at most `pole_bound` at the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendVerdict {
    pub pole_bound: usize,
    pub violation: f64,
    pub tolerance: f64,
    pub scale: f64,
    pub passed: bool,
    /// The violation is within a factor 10 of the decision threshold.
    pub marginal: bool,
}

impl ExtendVerdict {
    pub fn threshold(&self) -> f64 {
        self.tolerance * self.scale.max(1.0)
    }
}

pub fn extend_verdict(s: &Spectrum, pole_bound: usize, tol: f64) -> Result<ExtendVerdict> {
    if pole_bound >= s.len() / 2 {
        return Err(Error::Resolution { pole_bound, samples: s.len() });
    }
    let cutoff = -(pole_bound as i64);
    let violation = s
        .iter()
        .filter(|(m, _)| *m < cutoff)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    let scale = s.scale();
    let threshold = tol * scale.max(1.0);
    Ok(ExtendVerdict {
        pole_bound,
        violation,
        tolerance: tol,
        scale,
        passed: violation <= threshold,
        marginal: violation >= threshold / 10.0 && violation <= threshold * 10.0,
    })
}

/// Splits off the principal part of a pole of degree `n` at the center.
///
/// `singular[j] = c_{j−n}` for `j = 0..n`, the coefficients of `ζ^{−n} .. ζ^{−1}`;
/// the regular part keeps every other coefficient, including any residual
/// below `−n`.
pub fn split_singular(s: &Spectrum, n: usize) -> Result<(Vec<C64>, Spectrum)> {
    if n >= s.len() / 2 {
        return Err(Error::Resolution { pole_bound: n, samples: s.len() });
    }
    let singular = (0..n).map(|j| s.coeff(j as i64 - n as i64)).collect();
    let regular = s
        .iter()
        .map(|(m, c)| if m < 0 && m >= -(n as i64) { C64::new(0.0, 0.0) } else { c })
        .collect();
    Ok((singular, s.with_coeffs(regular)))
}

/// Smallest pole bound whose verdict passes, or `None` if nothing below `N/4` does.
pub fn pole_degree_estimate(s: &Spectrum, tol: f64) -> Option<usize> {
    let scale = s.scale();
    let threshold = tol * scale.max(1.0);
    let limit = s.len() / 4;
    // The verdict at n depends only on the tail max below −n.
    let mut degree = 0usize;
    for (m, c) in s.iter() {
        if m < 0 && c.norm() > threshold {
            degree = degree.max((-m) as usize);
        }
    }
    (degree < limit).then_some(degree)
}

/// Value at `z` of the meromorphic extension described by a spectrum,
/// `Σ c_m ((z − center)/radius)^m`, truncated at `|m| ≤ N/2 − 1`.
///
/// Negative indices beyond the estimated pole degree are numerically zero and are
/// dropped; amplifying their rounding noise by `|u|^{m}` would swamp the sum.
pub fn eval_extension(s: &Spectrum, z: C64) -> Result<C64> {
    let u = (z - s.circle.center) / s.circle.radius;
    let r = u.norm();
    if r >= 1.0 {
        return domain(format!("{z} is not inside {}", s.circle));
    }
    let degree = pole_degree_estimate(s, DEFAULT_TOL).ok_or_else(|| {
        Error::Domain("boundary data has no finite pole degree at the resolved scale".into())
    })?;
    if r == 0.0 {
        if degree > 0 {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
        return Ok(s.coeff(0));
    }
    let top = s.max_index().min(s.len() as i64 / 2 - 1);
    // Horner on the holomorphic part.
    let mut acc = C64::new(0.0, 0.0);
    for m in (0..=top).rev() {
        acc = acc * u + s.coeff(m);
    }
    let inv = u.inv();
    let mut neg = C64::new(0.0, 0.0);
    for m in (1..=degree as i64).rev() {
        neg = (neg + s.coeff(-m)) * inv;
    }
    Ok(acc + neg)
}
