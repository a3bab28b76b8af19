//! Real spherical harmonics on S² with analytic gradients, and the
//! Gauss–Legendre × uniform-longitude quadrature used for Galerkin
//! assembly and mode projection.
//!
//! Values come from fully normalized associated Legendre recurrences
//! (no Condon–Shortley phase); θ-derivatives are propagated through the
//! same recurrences, so value and gradient share one stable pass.

use crate::quad::gauss_legendre;

/// A point on S² in colatitude/longitude coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S2Point {
    pub theta: f64,
    pub phi: f64,
}

impl S2Point {
    pub fn new(theta: f64, phi: f64) -> Self {
        S2Point { theta, phi }
    }

    pub fn unit_vec(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Geodesic (great-circle) distance on the unit sphere.
    pub fn angle_to(&self, other: &S2Point) -> f64 {
        let a = self.unit_vec();
        let b = other.unit_vec();
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        dot.clamp(-1.0, 1.0).acos()
    }
}

/// Product quadrature on S²: Gauss–Legendre in cos θ, uniform in φ.
///
/// Integrates products of spherical harmonics up to combined degree
/// `2·max_degree` exactly when built with `for_degree(max_degree)`.
#[derive(Debug, Clone)]
pub struct S2Quadrature {
    pub points: Vec<S2Point>,
    pub weights: Vec<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl S2Quadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (xs, ws) = gauss_legendre(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        for (x, w) in xs.iter().zip(&ws) {
            let theta = x.acos();
            for j in 0..n_phi {
                points.push(S2Point::new(theta, j as f64 * dphi));
                weights.push(w * dphi);
            }
        }
        S2Quadrature {
            points,
            weights,
            n_theta,
            n_phi,
        }
    }

    /// Rule exact for products of harmonics up to degree `max_degree` each.
    pub fn for_degree(max_degree: usize) -> Self {
        S2Quadrature::new(max_degree + 6, 2 * max_degree + 6)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Index set of the real harmonic basis, degree-major:
/// (0,0), (1,-1), (1,0), (1,1), (2,-2), …
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShIndex {
    pub l: usize,
    pub m: i32,
}

pub fn basis_size(max_degree: usize) -> usize {
    (max_degree + 1) * (max_degree + 1)
}

pub fn basis_indices(max_degree: usize) -> Vec<ShIndex> {
    let mut out = Vec::with_capacity(basis_size(max_degree));
    for l in 0..=max_degree {
        for m in -(l as i32)..=(l as i32) {
            out.push(ShIndex { l, m });
        }
    }
    out
}

/// Value, ∂θ, ∂φ of every real harmonic up to `max_degree` at one point.
#[derive(Debug, Clone)]
pub struct ShEval {
    pub value: Vec<f64>,
    pub d_theta: Vec<f64>,
    pub d_phi: Vec<f64>,
}

/// Evaluates all `Q_ℓ^m(θ) = N_{ℓm} P_ℓ^m(cos θ)` with dQ/dθ,
/// m-major storage: for each m, values at ℓ = m..=L.
fn normalized_legendre_all(max_degree: usize, theta: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let l_max = max_degree;
    let (st, ct) = theta.sin_cos();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(l_max + 1);
    let mut dq: Vec<Vec<f64>> = Vec::with_capacity(l_max + 1);
    // m = 0 seed: Q_0^0 = 1/√(4π)
    let q00 = 0.25 / std::f64::consts::PI;
    let mut diag = q00.sqrt();
    let mut ddiag = 0.0;
    for m in 0..=l_max {
        let mut col = Vec::with_capacity(l_max - m + 1);
        let mut dcol = Vec::with_capacity(l_max - m + 1);
        col.push(diag);
        dcol.push(ddiag);
        if m + 1 <= l_max {
            // Q_{m+1}^m = √(2m+3) cosθ Q_m^m
            let c = (2.0 * m as f64 + 3.0).sqrt();
            col.push(c * ct * diag);
            dcol.push(c * (-st * diag + ct * ddiag));
        }
        for l in (m + 2)..=l_max {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lp = lf - 1.0;
            let a_prev = ((4.0 * lp * lp - 1.0) / (lp * lp - mf * mf)).sqrt();
            let i = l - m;
            let v = a * (ct * col[i - 1] - col[i - 2] / a_prev);
            let dv = a * (-st * col[i - 1] + ct * dcol[i - 1] - dcol[i - 2] / a_prev);
            col.push(v);
            dcol.push(dv);
        }
        q.push(col);
        dq.push(dcol);
        if m + 1 <= l_max {
            // diagonal step: Q_{m+1}^{m+1} = √((2m+3)/(2m+2)) sinθ Q_m^m
            let c = ((2.0 * m as f64 + 3.0) / (2.0 * m as f64 + 2.0)).sqrt();
            let nd = c * (ct * diag + st * ddiag);
            diag = c * st * diag;
            ddiag = nd;
        }
    }
    (q, dq)
}

/// All real harmonics (value and angular gradient components) at a point.
///
/// The returned ∂φ is the plain coordinate derivative; metric factors
/// (1/sin²θ for the `dφ` direction) are applied by callers.
pub fn eval_real_sh(max_degree: usize, p: &S2Point) -> ShEval {
    let (q, dq) = normalized_legendre_all(max_degree, p.theta);
    let size = basis_size(max_degree);
    let mut value = vec![0.0; size];
    let mut d_theta = vec![0.0; size];
    let mut d_phi = vec![0.0; size];
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut idx = 0;
    for l in 0..=max_degree {
        for m in -(l as i32)..=(l as i32) {
            let ma = m.unsigned_abs() as usize;
            let qq = q[ma][l - ma];
            let dqq = dq[ma][l - ma];
            let (ang, dang) = match m.cmp(&0) {
                std::cmp::Ordering::Equal => (1.0, 0.0),
                std::cmp::Ordering::Greater => {
                    let a = (ma as f64) * p.phi;
                    (sqrt2 * a.cos(), -sqrt2 * (ma as f64) * a.sin())
                }
                std::cmp::Ordering::Less => {
                    let a = (ma as f64) * p.phi;
                    (sqrt2 * a.sin(), sqrt2 * (ma as f64) * a.cos())
                }
            };
            value[idx] = qq * ang;
            d_theta[idx] = dqq * ang;
            d_phi[idx] = qq * dang;
            idx += 1;
        }
    }
    ShEval {
        value,
        d_theta,
        d_phi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_degree_closed_forms() {
        let p = S2Point::new(0.7, 1.3);
        let e = eval_real_sh(2, &p);
        let c = 0.5 / std::f64::consts::PI.sqrt(); // Y_00 = 1/(2√π)
        assert_relative_eq!(e.value[0], c, max_relative = 1e-14);
        // Y_10 = √(3/4π) cos θ at index (1,0) → position 2
        let y10 = (3.0 / (4.0 * std::f64::consts::PI)).sqrt() * p.theta.cos();
        assert_relative_eq!(e.value[2], y10, max_relative = 1e-13);
        // Y_11 (real, cos) = √(3/4π)·√2/√2… = √(3/4π) sinθ cosφ (no CS phase)
        let y11 = (3.0 / (4.0 * std::f64::consts::PI)).sqrt() * p.theta.sin() * p.phi.cos();
        assert_relative_eq!(e.value[3], y11, max_relative = 1e-13);
    }

    #[test]
    fn quadrature_orthonormality() {
        let l = 8;
        let quad = S2Quadrature::for_degree(l);
        let size = basis_size(l);
        let mut gram = vec![vec![0.0; size]; size];
        for (p, w) in quad.points.iter().zip(&quad.weights) {
            let e = eval_real_sh(l, p);
            for i in 0..size {
                for j in i..size {
                    gram[i][j] += w * e.value[i] * e.value[j];
                }
            }
        }
        for i in 0..size {
            for j in i..size {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[i][j] - expect).abs() < 1e-12,
                    "gram[{i}][{j}] = {}",
                    gram[i][j]
                );
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let l = 6;
        let p = S2Point::new(1.1, 2.4);
        let h = 1e-6;
        let e = eval_real_sh(l, &p);
        let et = eval_real_sh(l, &S2Point::new(p.theta + h, p.phi));
        let et2 = eval_real_sh(l, &S2Point::new(p.theta - h, p.phi));
        let ep = eval_real_sh(l, &S2Point::new(p.theta, p.phi + h));
        let ep2 = eval_real_sh(l, &S2Point::new(p.theta, p.phi - h));
        for i in 0..basis_size(l) {
            let fd_t = (et.value[i] - et2.value[i]) / (2.0 * h);
            let fd_p = (ep.value[i] - ep2.value[i]) / (2.0 * h);
            assert_relative_eq!(e.d_theta[i], fd_t, epsilon = 1e-7, max_relative = 1e-6);
            assert_relative_eq!(e.d_phi[i], fd_p, epsilon = 1e-7, max_relative = 1e-6);
        }
    }

    #[test]
    fn addition_theorem_diagonal() {
        // Σ_m Y_{ℓm}(p)² = (2ℓ+1)/(4π) at any point
        let l = 12;
        let p = S2Point::new(0.9, 5.1);
        let e = eval_real_sh(l, &p);
        let idx0 = l * l; // first index of degree l block
        let sum: f64 = (0..2 * l + 1).map(|k| e.value[idx0 + k].powi(2)).sum();
        assert_relative_eq!(
            sum,
            (2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI),
            max_relative = 1e-12
        );
    }
}
