//! Spectral Galerkin discretization of the angular operator
//! `L = -Δ_h + (|𝒜|² + i div 𝒜 + a) + 2i 𝒜·∇_h` on the unit S²,
//! in the real spherical-harmonic basis.
//!
//! The magnetic part is assembled in the integrated-by-parts form
//! `i ∫ 𝒜·(φ_j ∇φ_k - φ_k ∇φ_j)`, which needs no derivative of 𝒜 and is
//! antisymmetric by construction, so the discrete operator is exactly
//! Hermitian: `H = diag(ℓ(ℓ+1)) + M_V + i(M - Mᵀ)`.

use super::harmonics::{basis_size, eval_real_sh, S2Quadrature};
use super::{CrossSectionError, S2Field};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub struct GalerkinSolution {
    /// μ_k ascending, with multiplicity
    pub eigenvalues: Vec<f64>,
    /// basis-coefficient matrix, column k = eigenfunction ψ_k
    pub coeffs: DMatrix<Complex64>,
    pub max_degree: usize,
}

pub fn solve(
    a: &S2Field,
    a_theta: &S2Field,
    a_phi: &S2Field,
    max_degree: usize,
    count: usize,
) -> Result<GalerkinSolution, CrossSectionError> {
    let n_basis = basis_size(max_degree);
    if count > n_basis {
        return Err(CrossSectionError::Config(format!(
            "requested {count} modes from a degree-{max_degree} basis of size {n_basis}"
        )));
    }
    let quad = S2Quadrature::for_degree(max_degree);
    let nq = quad.len();

    // node tables: basis values, 𝒜·∇(basis), potential
    let mut phi_mat = DMatrix::<f64>::zeros(nq, n_basis);
    let mut adot_mat = DMatrix::<f64>::zeros(nq, n_basis);
    let mut wv = DVector::<f64>::zeros(nq);
    let mut w = DVector::<f64>::zeros(nq);
    for (q, (p, &wq)) in quad.points.iter().zip(&quad.weights).enumerate() {
        let e = eval_real_sh(max_degree, p);
        let st2 = p.theta.sin().powi(2);
        let at = a_theta.eval(p.theta, p.phi);
        let ap = a_phi.eval(p.theta, p.phi);
        let pot = at * at + ap * ap / st2 + a.eval(p.theta, p.phi);
        for j in 0..n_basis {
            phi_mat[(q, j)] = e.value[j];
            adot_mat[(q, j)] = at * e.d_theta[j] + ap * e.d_phi[j] / st2;
        }
        wv[q] = wq * pot;
        w[q] = wq;
    }

    // A = diag(ℓ(ℓ+1)) + Φᵀ diag(w·V) Φ   (symmetric)
    let mut wphi = phi_mat.clone();
    for q in 0..nq {
        let s = wv[q];
        for j in 0..n_basis {
            wphi[(q, j)] *= s;
        }
    }
    let mut a_mat = phi_mat.transpose() * &wphi;
    {
        let mut j = 0usize;
        for l in 0..=max_degree {
            let lap = (l * (l + 1)) as f64;
            for _ in 0..(2 * l + 1) {
                a_mat[(j, j)] += lap;
                j += 1;
            }
        }
    }
    // force exact symmetry against quadrature roundoff
    let a_sym = (&a_mat + a_mat.transpose()) * 0.5;

    // B = M - Mᵀ with M = Φᵀ diag(w) (𝒜·∇Φ)   (antisymmetric)
    let mut wg = adot_mat;
    for q in 0..nq {
        let s = w[q];
        for j in 0..n_basis {
            wg[(q, j)] *= s;
        }
    }
    let m = phi_mat.transpose() * wg;
    let b = &m - m.transpose();

    // Hermitian H = A + iB
    let h = DMatrix::<Complex64>::from_fn(n_basis, n_basis, |i, j| {
        Complex64::new(a_sym[(i, j)], b[(i, j)])
    });
    let hermitian_defect = (0..n_basis)
        .flat_map(|i| (0..n_basis).map(move |j| (i, j)))
        .map(|(i, j)| (h[(i, j)] - h[(j, i)].conj()).norm())
        .fold(0.0_f64, f64::max);
    debug_assert!(hermitian_defect < 1e-12, "assembly lost Hermiticity: {hermitian_defect}");

    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n_basis).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let eigenvalues: Vec<f64> = order[..count].iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut coeffs = DMatrix::<Complex64>::zeros(n_basis, count);
    for (k, &i) in order[..count].iter().enumerate() {
        coeffs.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok(GalerkinSolution {
        eigenvalues,
        coeffs,
        max_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn free_sphere_is_exact() {
        // 𝒜 = 0, a = 0: eigenvalues ℓ(ℓ+1), machine accurate since the
        // basis is the exact eigenbasis
        let zero = S2Field::zero();
        let sol = solve(&zero, &zero, &zero, 8, 25).unwrap();
        let mut expect = vec![];
        for l in 0..=4 {
            for _ in 0..(2 * l + 1) {
                expect.push((l * (l + 1)) as f64);
            }
        }
        for (got, want) in sol.eigenvalues.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn constant_shift() {
        let zero = S2Field::zero();
        let a = S2Field::constant(-3.0 / 16.0);
        let sol = solve(&a, &zero, &zero, 6, 10).unwrap();
        assert_relative_eq!(sol.eigenvalues[0], -3.0 / 16.0, max_relative = 1e-10);
        assert_relative_eq!(sol.eigenvalues[1], 2.0 - 3.0 / 16.0, max_relative = 1e-10);
    }

    #[test]
    fn gauge_invariance_of_eigenvalues() {
        // 𝒜 = dχ with χ = c cos θ: A_θ = -c sin θ, A_φ = 0. The spectrum
        // must match the 𝒜 = 0 spectrum to solver tolerance.
        let c = 0.4;
        let zero = S2Field::zero();
        let at = S2Field::from_fn(move |theta, _| -c * theta.sin());
        let a = S2Field::constant(0.1);
        let gauged = solve(&a, &at, &zero, 10, 16).unwrap();
        let plain = solve(&a, &zero, &zero, 10, 16).unwrap();
        for (g, p) in gauged.eigenvalues.iter().zip(&plain.eigenvalues) {
            assert!((g - p).abs() < 1e-8, "gauge shift: {g} vs {p}");
        }
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let zero = S2Field::zero();
        let at = S2Field::from_fn(|theta, _| 0.3 * theta.sin());
        let sol = solve(&S2Field::constant(0.05), &at, &zero, 6, 12).unwrap();
        for i in 0..12 {
            for j in i..12 {
                let dot: Complex64 = (0..sol.coeffs.nrows())
                    .map(|r| sol.coeffs[(r, i)] * sol.coeffs[(r, j)].conj())
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dot.norm() - expect).abs() < 1e-9,
                    "<ψ_{i}, ψ_{j}> = {dot}"
                );
            }
        }
    }
}
