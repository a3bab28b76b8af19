//! Zonal (rotation-invariant) kernels on round spheres S^{d} of any
//! radius: the degree-ℓ reproducing kernel
//! `Z_ℓ(x̂, ŷ) = Σ_m ψ_{ℓm}(x̂) conj(ψ_{ℓm}(ŷ))` collapses by the addition
//! theorem to a Gegenbauer polynomial of the angle, which is what makes
//! round-sphere mode sums cheap at any cone dimension.

use crate::specfun::ln_gamma;

/// Zonal data for S^{d} with radius ρ (cross-section of an (d+1)-cone).
#[derive(Debug, Clone)]
pub struct ZonalSphere {
    /// dimension d of the sphere (n - 1 for the cone)
    pub dim: usize,
    pub radius: f64,
    /// Gegenbauer parameter λ = (d-1)/2
    lambda: f64,
    /// surface volume of the radius-ρ sphere
    pub volume: f64,
    /// per-degree normalizers mult_ℓ / (vol · C_ℓ^λ(1))
    norms: Vec<f64>,
    /// spherical-harmonic multiplicities
    mults: Vec<usize>,
}

/// dim H_ℓ(S^d) = (2ℓ+d-1)(ℓ+d-2)! / (ℓ!(d-1)!)
pub fn harmonic_multiplicity(dim: usize, l: usize) -> usize {
    if l == 0 {
        return 1;
    }
    let d = dim as f64;
    let lf = l as f64;
    let ln = (2.0 * lf + d - 1.0).ln() + ln_gamma(lf + d - 1.0)
        - ln_gamma(lf + 1.0)
        - ln_gamma(d);
    ln.exp().round() as usize
}

/// Surface volume of the unit S^d.
pub fn unit_sphere_volume(dim: usize) -> f64 {
    let d = dim as f64;
    2.0 * std::f64::consts::PI.powf((d + 1.0) / 2.0) / crate::specfun::gamma((d + 1.0) / 2.0)
}

impl ZonalSphere {
    pub fn new(dim: usize, radius: f64, max_degree: usize) -> Self {
        assert!(dim >= 2, "cross-section dimension must be ≥ 2 (cone n ≥ 3)");
        assert!(radius > 0.0);
        let lambda = (dim as f64 - 1.0) / 2.0;
        let volume = radius.powi(dim as i32) * unit_sphere_volume(dim);
        let mut norms = Vec::with_capacity(max_degree + 1);
        let mut mults = Vec::with_capacity(max_degree + 1);
        for l in 0..=max_degree {
            let mult = harmonic_multiplicity(dim, l);
            // C_ℓ^λ(1) = Γ(ℓ+2λ)/(Γ(2λ) ℓ!)
            let c1 = if l == 0 {
                1.0
            } else {
                (ln_gamma(l as f64 + 2.0 * lambda) - ln_gamma(2.0 * lambda)
                    - ln_gamma(l as f64 + 1.0))
                .exp()
            };
            norms.push(mult as f64 / (volume * c1));
            mults.push(mult);
        }
        ZonalSphere {
            dim,
            radius,
            lambda,
            volume,
            norms,
            mults,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.norms.len() - 1
    }

    pub fn multiplicity(&self, l: usize) -> usize {
        self.mults[l]
    }

    /// `Z_ℓ(γ)` for all ℓ at once; `gamma` is the geodesic angle on the
    /// *unit* sphere (distance on the radius-ρ sphere is ρ·γ).
    pub fn zonal_values(&self, gamma: f64) -> Vec<f64> {
        let x = gamma.cos();
        let l_max = self.max_degree();
        let lam = self.lambda;
        let mut out = Vec::with_capacity(l_max + 1);
        let mut c_prev = 1.0;
        out.push(self.norms[0] * c_prev);
        if l_max >= 1 {
            let mut c_cur = 2.0 * lam * x;
            out.push(self.norms[1] * c_cur);
            for l in 1..l_max {
                let lf = l as f64;
                let c_next =
                    (2.0 * (lf + lam) * x * c_cur - (lf + 2.0 * lam - 1.0) * c_prev) / (lf + 1.0);
                c_prev = c_cur;
                c_cur = c_next;
                out.push(self.norms[l + 1] * c_cur);
            }
        }
        out
    }

    /// sup over the degree-ℓ eigenspace of ‖ψ‖_∞ (attained by the zonal
    /// member at coincidence): √(mult_ℓ / vol).
    pub fn sup_norm(&self, l: usize) -> f64 {
        (self.mults[l] as f64 / self.volume).sqrt()
    }
}
