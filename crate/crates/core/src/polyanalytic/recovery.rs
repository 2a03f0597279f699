//! Recovery of the Taylor matrix `a_{jk}` of a polyanalytic function from
//! Fourier data on concentric circles.
//!
//! On `|z| = R` the term `a_{jk} z^k conj(z)^j` contributes `a_{jk} R^{k+j}` to
//! frequency `m = k − j`. So frequency `m` sees `Σ_j a_{j,m+j} R^{m+2j}`, and
//! frequencies decouple into small systems across the radii.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::{Circle, C64};
use crate::spectral::{circle_spectrum, Spectrum, DEFAULT_SAMPLES};

pub const DEFAULT_RADII: [f64; 4] = [0.25, 0.45, 0.65, 0.85];
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    pub order: usize,
    /// `taylor[j][k]` multiplies `z^k conj(z)^j`.
    pub taylor: Vec<Vec<C64>>,
    pub residual: f64,
    pub condition: f64,
}

impl RecoveryResult {
    pub fn degree(&self) -> usize {
        self.taylor[0].len() - 1
    }

    pub fn coeff(&self, j: usize, k: usize) -> C64 {
        self.taylor
            .get(j)
            .and_then(|row| row.get(k))
            .copied()
            .unwrap_or_default()
    }

    /// Largest `|a_jk − other_jk|` over the union of both index ranges.
    pub fn max_difference(&self, other: &[Vec<C64>]) -> f64 {
        let rows = self.taylor.len().max(other.len());
        let mut worst: f64 = 0.0;
        for j in 0..rows {
            let cols = self
                .taylor
                .get(j)
                .map_or(0, Vec::len)
                .max(other.get(j).map_or(0, Vec::len));
            for k in 0..cols {
                let b = other.get(j).and_then(|r| r.get(k)).copied().unwrap_or_default();
                worst = worst.max((self.coeff(j, k) - b).norm());
            }
        }
        worst
    }
}

pub fn recover_coefficients(
    f: &(dyn Fn(C64) -> C64 + Sync),
    n: usize,
    radii: &[f64],
    k_max: usize,
) -> Result<RecoveryResult> {
    recover_coefficients_with(f, n, radii, k_max, DEFAULT_SAMPLES)
}

pub fn recover_coefficients_with(
    f: &(dyn Fn(C64) -> C64 + Sync),
    n: usize,
    radii: &[f64],
    k_max: usize,
    samples: usize,
) -> Result<RecoveryResult> {
    if radii.len() < n + 1 {
        return domain(format!("order {n} needs at least {} radii, got {}", n + 1, radii.len()));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return domain(format!("radius {r} is not in (0, 1)"));
    }
    for (i, a) in radii.iter().enumerate() {
        if radii[i + 1..].iter().any(|b| (a - b).abs() < 1e-12) {
            return domain(format!("radius {a} is repeated"));
        }
    }
    if k_max + n >= samples / 2 {
        return Err(Error::Resolution { pole_bound: k_max + n, samples });
    }

    let spectra = radii
        .par_iter()
        .map(|&r| circle_spectrum(f, &Circle::new(C64::new(0.0, 0.0), r)?, samples))
        .collect::<Result<Vec<Spectrum>>>()?;

    let freqs: Vec<i64> = (-(n as i64)..=k_max as i64).collect();
    let solved = freqs
        .par_iter()
        .map(|&m| solve_frequency(m, n, k_max, radii, &spectra))
        .collect::<Result<Vec<_>>>()?;

    let mut taylor = vec![vec![C64::new(0.0, 0.0); k_max + 1]; n + 1];
    let mut residual: f64 = 0.0;
    let mut condition: f64 = 1.0;
    for (m, sol) in freqs.iter().zip(solved) {
        for (j, a) in sol.js.iter().zip(&sol.values) {
            taylor[*j][(*m + *j as i64) as usize] = *a;
        }
        residual = residual.max(sol.residual);
        condition = condition.max(sol.condition);
    }
    Ok(RecoveryResult { order: n, taylor, residual, condition })
}

struct FrequencySolution {
    js: Vec<usize>,
    values: Vec<C64>,
    residual: f64,
    condition: f64,
}

fn solve_frequency(
    m: i64,
    n: usize,
    k_max: usize,
    radii: &[f64],
    spectra: &[Spectrum],
) -> Result<FrequencySolution> {
    let js: Vec<usize> = (0..=n)
        .filter(|&j| {
            let k = m + j as i64;
            k >= 0 && k <= k_max as i64
        })
        .collect();
    let data: Vec<C64> = spectra.iter().map(|s| s.coeff(m)).collect();
    if js.is_empty() {
        let residual = data.iter().map(|c| c.norm()).fold(0.0, f64::max);
        return Ok(FrequencySolution { js, values: vec![], residual, condition: 1.0 });
    }

    // Rows are divided by R^m so each reads Σ_j a_j R^{2j}, then columns are
    // equilibrated; the reported condition is that of the scaled system.
    let p = radii.len();
    let mut a = DMatrix::<f64>::zeros(p, js.len());
    let mut b = DMatrix::<f64>::zeros(p, 2);
    for (i, &r) in radii.iter().enumerate() {
        for (c, &j) in js.iter().enumerate() {
            a[(i, c)] = r.powi(2 * j as i32);
        }
        let d = data[i] / r.powi(m as i32);
        b[(i, 0)] = d.re;
        b[(i, 1)] = d.im;
    }
    let col_scale: Vec<f64> = (0..js.len()).map(|c| a.column(c).norm()).collect();
    for (c, s) in col_scale.iter().enumerate() {
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { frequency: m, condition });
    }
    let x = svd
        .solve(&b, smax * f64::EPSILON)
        .map_err(|e| Error::Degenerate(format!("radial solve at frequency {m}: {e}")))?;
    let values: Vec<C64> = (0..js.len())
        .map(|c| C64::new(x[(c, 0)], x[(c, 1)]) / col_scale[c])
        .collect();

    let mut residual: f64 = 0.0;
    for (i, &r) in radii.iter().enumerate() {
        let fit = js
            .iter()
            .zip(&values)
            .fold(C64::new(0.0, 0.0), |acc, (&j, v)| acc + v * r.powi(m as i32 + 2 * j as i32));
        residual = residual.max((fit - data[i]).norm());
    }
    Ok(FrequencySolution { js, values, residual, condition })
}
