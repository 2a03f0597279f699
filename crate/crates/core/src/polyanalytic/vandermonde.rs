//! Polynomial interpolation through distinct complex nodes.

use crate::error::{Error, Result};
use crate::geometry::C64;

const DUPLICATE_TOL: f64 = 1e-12;

/// Monomial coefficients of the unique polynomial of degree `≤ n` through
/// `(nodes[i], values[i])`, i.e. the solution of the Vandermonde system.
///
/// Computed in Newton form from divided differences and then expanded, which
/// avoids forming or inverting the Vandermonde matrix.
pub fn vandermonde_solve(nodes: &[C64], values: &[C64]) -> Result<Vec<C64>> {
    if nodes.len() != values.len() {
        return Err(Error::Domain(format!(
            "{} nodes but {} values",
            nodes.len(),
            values.len()
        )));
    }
    if nodes.is_empty() {
        return Err(Error::Domain("no interpolation nodes".into()));
    }
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            if (a - b).norm() <= DUPLICATE_TOL {
                return Err(Error::Degenerate(format!("duplicate interpolation node {a}")));
            }
        }
    }
    let n = nodes.len();
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // p(w) = dd[0] + (w − x0)(dd[1] + (w − x1)(dd[2] + ...))
    let mut poly = vec![dd[n - 1]];
    for k in (0..n - 1).rev() {
        let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * nodes[k];
        }
        next[0] += dd[k];
        poly = next;
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::c64;

    fn reals(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c64(x, 0.0)).collect()
    }

    #[test]
    fn small_examples() {
        let p = vandermonde_solve(&reals(&[0.0, 1.0]), &reals(&[1.0, 3.0])).unwrap();
        assert!((p[0] - c64(1.0, 0.0)).norm() < 1e-15 && (p[1] - c64(2.0, 0.0)).norm() < 1e-15);

        let p = vandermonde_solve(&reals(&[-1.0, 0.0, 1.0]), &reals(&[1.0, 0.0, 1.0])).unwrap();
        let want = reals(&[0.0, 0.0, 1.0]);
        for (a, b) in p.iter().zip(&want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_duplicates_and_length_mismatch() {
        let nodes = vec![c64(0.3, 0.1), c64(0.3, 0.1 + 1e-13)];
        assert!(matches!(
            vandermonde_solve(&nodes, &reals(&[1.0, 2.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(vandermonde_solve(&reals(&[0.0, 1.0]), &reals(&[1.0])).is_err());
    }

    #[test]
    fn drifting_nodes_converge() {
        for m in 1..=20 {
            let delta = 0.5f64.powi(m);
            let nodes = reals(&[0.0 + delta, 1.0 + delta]);
            let values: Vec<C64> = nodes.iter().map(|w| 1.0 + 2.0 * w).collect();
            let p = vandermonde_solve(&nodes, &values).unwrap();
            assert!((p[0] - c64(1.0, 0.0)).norm() < 10.0 * delta);
            assert!((p[1] - c64(2.0, 0.0)).norm() < 10.0 * delta);
        }
    }
}
