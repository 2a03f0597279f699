//! Two-family and (H)/(C) harnesses.
//!
//! The two-family harness samples circles from two families, checks that `f`
//! extends meromorphically from each with a pole of degree at most `n` at the
//! center, and then checks the conclusion that `f` is polyanalytic of order at
//! most `n` by radial recovery and by `∂̄` finite differences.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::recovery::{recover_coefficients_with, RecoveryResult, DEFAULT_RADII};
use super::{dbar_residual, default_dbar_grid, DEFAULT_DBAR_STEP};
use crate::error::{domain, Result};
use crate::geometry::{AnchorKind, Circle, FamilyAnchor, C64};
use crate::spectral::{circle_spectrum_with_phase, extend_verdict, ExtendVerdict, DEFAULT_SAMPLES, DEFAULT_TOL};

pub type DiscFnRef<'a> = &'a (dyn Fn(C64) -> C64 + Sync);

#[derive(Debug, Clone)]
pub struct HarnessParams {
    pub circles_per_family: usize,
    pub param_lo: f64,
    pub param_hi: f64,
    pub samples: usize,
    pub tol: f64,
    pub radii: Vec<f64>,
    /// Highest Taylor degree `K` recovered per coefficient.
    pub taylor_degree: usize,
    pub dbar_step: f64,
    pub dbar_grid: Vec<C64>,
    pub dbar_tol: f64,
}

impl Default for HarnessParams {
    fn default() -> Self {
        HarnessParams {
            circles_per_family: 10,
            param_lo: 0.05,
            param_hi: 0.95,
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            radii: DEFAULT_RADII.to_vec(),
            taylor_degree: 12,
            dbar_step: DEFAULT_DBAR_STEP,
            dbar_grid: default_dbar_grid(),
            dbar_tol: 1e-5,
        }
    }
}

impl HarnessParams {
    /// Family parameters, equispaced from `param_lo` to `param_hi` inclusive.
    pub fn params(&self) -> Vec<f64> {
        let n = self.circles_per_family;
        if n == 1 {
            return vec![0.5 * (self.param_lo + self.param_hi)];
        }
        (0..n)
            .map(|i| self.param_lo + (self.param_hi - self.param_lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// One row of a pass matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleRecord {
    pub family: String,
    pub param: f64,
    pub pole_bound: usize,
    pub violation: f64,
    pub passed: bool,
    pub marginal: bool,
}

impl CircleRecord {
    fn new(anchor: &FamilyAnchor, param: f64, v: &ExtendVerdict) -> Self {
        CircleRecord {
            family: anchor.to_string(),
            param,
            pole_bound: v.pole_bound,
            violation: v.violation,
            passed: v.passed,
            marginal: v.marginal,
        }
    }
}

/// Sampling phase keeping the grid off the tangent point of a boundary family.
fn family_phase(anchor: &FamilyAnchor, samples: usize) -> f64 {
    match anchor.kind {
        AnchorKind::Interior => 0.0,
        AnchorKind::Boundary => anchor.alpha.arg() + PI / samples as f64,
    }
}

/// Verdict for `f` on one circle of a family.
pub fn family_verdict(
    f: DiscFnRef,
    anchor: &FamilyAnchor,
    param: f64,
    pole_bound: usize,
    samples: usize,
    tol: f64,
) -> Result<(Circle, ExtendVerdict)> {
    let c = anchor.circle(param)?;
    let s = circle_spectrum_with_phase(f, &c, samples, family_phase(anchor, samples))?;
    Ok((c, extend_verdict(&s, pole_bound, tol)?))
}

fn family_records(
    f: DiscFnRef,
    anchor: &FamilyAnchor,
    pole_bound: usize,
    params: &HarnessParams,
) -> Result<Vec<CircleRecord>> {
    params
        .params()
        .par_iter()
        .map(|&p| {
            let (_, v) = family_verdict(f, anchor, p, pole_bound, params.samples, params.tol)?;
            Ok(CircleRecord::new(anchor, p, &v))
        })
        .collect()
}

/// Behaviour of `f` as `|z| → 1`.
///
/// On each radius `1 − δ`, `δ = 10^{-k}`, the oscillation is the largest jump
/// between neighbours at angular step `δ` and to the radius `1 − δ/10`. For a
/// function continuous on the closed disc it shrinks with `δ`; a blow-up or a
/// boundary discontinuity keeps it from shrinking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub radii: Vec<f64>,
    pub oscillation: Vec<f64>,
    pub sup: f64,
    pub continuous: bool,
}

pub fn boundary_continuity(f: DiscFnRef) -> ContinuityReport {
    let mut radii = vec![];
    let mut oscillation = vec![];
    let mut sup: f64 = 0.0;
    for k in 3..=5 {
        let delta = 10f64.powi(-k);
        let rho = 1.0 - delta;
        let inner = 1.0 - delta / 10.0;
        let count = (2.0 * PI / delta).ceil() as usize;
        let step = 2.0 * PI / count as f64;
        let (osc, s) = (0..count)
            .into_par_iter()
            .map(|j| {
                let th = j as f64 * step;
                let a = f(C64::from_polar(rho, th));
                let b = f(C64::from_polar(rho, th + step));
                let c = f(C64::from_polar(inner, th));
                let jump = (a - b).norm().max((a - c).norm());
                let jump = if jump.is_finite() { jump } else { f64::INFINITY };
                (jump, a.norm())
            })
            .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
        radii.push(rho);
        oscillation.push(osc);
        sup = sup.max(s);
    }
    let first = oscillation[0];
    let last = *oscillation.last().unwrap_or(&0.0);
    let continuous = last.is_finite() && last <= 0.1 * first + 1e-12 * sup.max(1.0);
    ContinuityReport { radii, oscillation, sup, continuous }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ImplicationStatus {
    /// Hypothesis and conclusion both hold.
    Confirmed,
    /// Some sampled circle fails the hypothesis; nothing to check.
    NotApplicable,
    /// The hypothesis holds and the conclusion fails, but `f` is not
    /// continuous up to the boundary, so this is no counterexample.
    BoundaryContinuityViolated,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub alpha: String,
    pub beta: String,
    pub order: usize,
    pub circles: Vec<CircleRecord>,
    pub hypothesis_holds: bool,
    pub continuity: ContinuityReport,
    pub recovery: Option<RecoveryResult>,
    pub recovery_error: Option<String>,
    pub dbar_residual: f64,
    pub conclusion_holds: bool,
    pub status: ImplicationStatus,
}

pub fn two_family_harness(
    f: DiscFnRef,
    alpha: &FamilyAnchor,
    beta: &FamilyAnchor,
    n: usize,
    params: &HarnessParams,
) -> Result<HarnessReport> {
    if (alpha.alpha - beta.alpha).norm() < 1e-12 {
        return domain("the two family anchors must differ");
    }
    let mut circles = family_records(f, alpha, n, params)?;
    circles.extend(family_records(f, beta, n, params)?);
    let hypothesis_holds = circles.iter().all(|c| c.passed);

    let continuity = boundary_continuity(f);
    let scale = params.dbar_grid.iter().map(|&z| f(z).norm()).fold(1.0, f64::max);
    let dbar = dbar_residual(&|z| f(z), n, &params.dbar_grid, params.dbar_step)?;
    let (recovery, recovery_error) =
        match recover_coefficients_with(f, n, &params.radii, params.taylor_degree, params.samples) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
    let recovered = recovery
        .as_ref()
        .is_some_and(|r| r.residual <= params.tol * scale);
    let conclusion_holds = recovered && dbar <= params.dbar_tol * scale;

    let status = if !hypothesis_holds {
        ImplicationStatus::NotApplicable
    } else if conclusion_holds {
        ImplicationStatus::Confirmed
    } else if !continuity.continuous {
        ImplicationStatus::BoundaryContinuityViolated
    } else {
        ImplicationStatus::Violated
    };
    Ok(HarnessReport {
        alpha: alpha.to_string(),
        beta: beta.to_string(),
        order: n,
        circles,
        hypothesis_holds,
        continuity,
        recovery,
        recovery_error,
        dbar_residual: dbar,
        conclusion_holds,
        status,
    })
}

/// Side-by-side (H) and (C) verdicts on the circles of one family.
#[derive(Debug, Clone, Serialize)]
pub struct HReport {
    pub gamma: String,
    pub order: usize,
    /// (H): `(z−γ)^n F` (interior γ) or `(z−γ)^{2n} F` (boundary γ) extends
    /// holomorphically, where `F = f/(1−|z|²)^n`.
    pub h_circles: Vec<CircleRecord>,
    /// (C): `f` extends with a pole of degree at most `n` at the center.
    pub c_circles: Vec<CircleRecord>,
    pub h_holds: bool,
    pub c_holds: bool,
    /// Number of circles where the two verdicts differ.
    pub disagreements: usize,
    pub equivalent: bool,
}

pub fn condition_h_check(
    f: DiscFnRef,
    n: usize,
    gamma: &FamilyAnchor,
    params: &HarnessParams,
) -> Result<HReport> {
    let g = gamma.alpha;
    let power = match gamma.kind {
        AnchorKind::Interior => n as i32,
        AnchorKind::Boundary => 2 * n as i32,
    };
    let h = move |z: C64| {
        let w = 1.0 - z.norm_sqr();
        (z - g).powi(power) * f(z) / w.powi(n as i32)
    };
    let h_circles = family_records(&h, gamma, 0, params)?;
    let c_circles = family_records(f, gamma, n, params)?;
    let disagreements = h_circles
        .iter()
        .zip(&c_circles)
        .filter(|(a, b)| a.passed != b.passed)
        .count();
    Ok(HReport {
        gamma: gamma.to_string(),
        order: n,
        h_holds: h_circles.iter().all(|c| c.passed),
        c_holds: c_circles.iter().all(|c| c.passed),
        h_circles,
        c_circles,
        disagreements,
        equivalent: disagreements == 0,
    })
}
