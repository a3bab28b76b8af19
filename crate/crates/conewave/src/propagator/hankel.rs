//! The Hankel transform
//! `(ℋ_ν f)(ρ) = ∫_0^∞ (rρ)^{-(n-2)/2} J_ν(rρ) f(r) r^{n-1} dr`,
//! the unitary, self-inverse radial transform diagonalizing the radial
//! part of ℒ on each angular mode.

use super::{PropagatorError, RadialGrid};
use crate::specfun::BesselOrder;
use num_complex::Complex64;
use rayon::prelude::*;

/// Dense transform matrix from grid samples to values at `rho_nodes`.
///
/// `M[i·nr + j] = w_j (r_j ρ_i)^{-(n-2)/2} J_ν(r_j ρ_i)` — the weights
/// already carry `r^{n-1}`.
pub fn transform_matrix(
    nu: f64,
    grid: &RadialGrid,
    rho_nodes: &[f64],
) -> Result<Vec<f64>, PropagatorError> {
    let half = (grid.n as f64 - 2.0) / 2.0;
    let nr = grid.len();
    let order = BesselOrder::new(nu)?;
    let rows: Result<Vec<Vec<f64>>, PropagatorError> = rho_nodes
        .par_iter()
        .map(|&rho| {
            let mut row = vec![0.0; nr];
            for (j, (&r, &w)) in grid.nodes.iter().zip(&grid.weights).enumerate() {
                let arg = r * rho;
                row[j] = w * arg.powf(-half) * order.eval(arg)?;
            }
            Ok(row)
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

pub fn apply_matrix(m: &[f64], n_out: usize, x: &[Complex64]) -> Vec<Complex64> {
    let nr = x.len();
    debug_assert_eq!(m.len(), n_out * nr);
    (0..n_out)
        .map(|i| {
            let row = &m[i * nr..(i + 1) * nr];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x) {
                acc += b * *a;
            }
            acc
        })
        .collect()
}

/// One-shot Hankel transform of radial samples, with the spec's tail
/// check: the boundary node must carry negligible mass.
pub fn hankel_transform(
    nu: f64,
    f: &[Complex64],
    grid: &RadialGrid,
    rho_nodes: &[f64],
) -> Result<Vec<Complex64>, PropagatorError> {
    if nu < 0.0 {
        return Err(PropagatorError::Config(format!("order must be ≥ 0, got {nu}")));
    }
    if f.len() != grid.len() {
        return Err(PropagatorError::Config(format!(
            "expected {} samples, got {}",
            grid.len(),
            f.len()
        )));
    }
    let boundary = f.last().unwrap().norm() * grid.weights.last().unwrap();
    if boundary > 1e-8 {
        return Err(PropagatorError::TailWarning(boundary));
    }
    let m = transform_matrix(nu, grid, rho_nodes)?;
    Ok(apply_matrix(&m, rho_nodes.len(), f))
}
