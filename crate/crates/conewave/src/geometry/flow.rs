//! Numeric geodesic machinery: an adaptive Dormand–Prince 4/5 integrator,
//! unit-speed geodesic flow (ambient coordinates for spheres, charts for
//! surfaces of revolution), and the scalar normal Jacobi equation
//! `J'' + K(γ(s)) J = 0` carried along the flow.

use super::{GeomError, SurfaceSpec};
use crate::cross_section::S2Point;

/// Dormand–Prince 5(4) adaptive step on a boxed state vector.
pub struct Rk45 {
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
}

impl Default for Rk45 {
    fn default() -> Self {
        Rk45 {
            tol: 1e-10,
            h_init: 1e-2,
            h_min: 1e-12,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl Rk45 {
    /// Integrate `y' = f(s, y)` from `s0` to `s1`, calling `observe` after
    /// every accepted step with `(s, y)` (and once with the initial state).
    pub fn integrate<F, O>(
        &self,
        mut f: F,
        s0: f64,
        s1: f64,
        y0: Vec<f64>,
        mut observe: O,
    ) -> Result<Vec<f64>, GeomError>
    where
        F: FnMut(f64, &[f64]) -> Vec<f64>,
        O: FnMut(f64, &[f64]),
    {
        let dim = y0.len();
        let mut y = y0;
        let mut s = s0;
        let dir = if s1 >= s0 { 1.0 } else { -1.0 };
        let mut h: f64 = self.h_init.min((s1 - s0).abs()).max(self.h_min) * dir;
        observe(s, &y);
        let mut k1 = f(s, &y);
        while (s1 - s) * dir > 1e-14 {
            if (s + h - s1) * dir > 0.0 {
                h = s1 - s;
            }
            let add = |y: &[f64], parts: &[(&[f64], f64)]| -> Vec<f64> {
                let mut out = y.to_vec();
                for (k, c) in parts {
                    for i in 0..dim {
                        out[i] += h * c * k[i];
                    }
                }
                out
            };
            let k2 = f(s + 0.2 * h, &add(&y, &[(&k1, A21)]));
            let k3 = f(s + 0.3 * h, &add(&y, &[(&k1, A31), (&k2, A32)]));
            let k4 = f(s + 0.8 * h, &add(&y, &[(&k1, A41), (&k2, A42), (&k3, A43)]));
            let k5 = f(
                s + 8.0 / 9.0 * h,
                &add(&y, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]),
            );
            let y6 = add(
                &y,
                &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)],
            );
            let k6 = f(s + h, &y6);
            let y_new = add(
                &y,
                &[(&k1, B1), (&k3, B3), (&k4, B4), (&k5, B5), (&k6, B6)],
            );
            let k7 = f(s + h, &y_new);
            let mut err: f64 = 0.0;
            for i in 0..dim {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let scale = 1.0 + y[i].abs().max(y_new[i].abs());
                err = err.max((e / scale).abs());
            }
            if err <= self.tol {
                s += h;
                y = y_new;
                k1 = k7; // FSAL
                observe(s, &y);
            }
            let factor = if err > 0.0 {
                (self.tol / err).powf(0.2).clamp(0.2, 5.0) * 0.9
            } else {
                5.0
            };
            h *= factor;
            if h.abs() < self.h_min {
                return Err(GeomError::IntegratorFailure(format!(
                    "step size underflow at s = {s}"
                )));
            }
        }
        Ok(y)
    }
}

/// A geodesic state with the scalar Jacobi pair `(J, J')` riding along.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub s: f64,
    /// ambient position on the sphere, or (u, φ, 0) for charts
    pub pos: [f64; 3],
    pub vel: [f64; 3],
    pub jacobi: f64,
    pub jacobi_d: f64,
}

/// Unit-speed geodesic flow with Jacobi field, sampled along the way.
///
/// Spheres integrate in ambient R³ (pole-free); surfaces of revolution in
/// the (u, φ) chart. Flat tori are affine and are handled analytically by
/// the callers.
pub fn flow_with_jacobi(
    spec: &SurfaceSpec,
    start: &S2Point,
    direction: f64,
    length: f64,
    tol: f64,
    mut on_sample: impl FnMut(&FlowSample),
) -> Result<FlowSample, GeomError> {
    match spec {
        SurfaceSpec::Sphere { radius } => {
            let rho = *radius;
            let x0 = start.unit_vec().map(|c| c * rho);
            let (e_theta, e_phi) = tangent_frame(start);
            let v0 = [
                direction.cos() * e_theta[0] + direction.sin() * e_phi[0],
                direction.cos() * e_theta[1] + direction.sin() * e_phi[1],
                direction.cos() * e_theta[2] + direction.sin() * e_phi[2],
            ];
            let kcurv = 1.0 / (rho * rho);
            // y = [x(3), v(3), J, J']
            let y0 = vec![x0[0], x0[1], x0[2], v0[0], v0[1], v0[2], 0.0, 1.0];
            let rhs = move |_s: f64, y: &[f64]| -> Vec<f64> {
                let v2 = y[3] * y[3] + y[4] * y[4] + y[5] * y[5];
                let c = v2 / (rho * rho);
                vec![
                    y[3],
                    y[4],
                    y[5],
                    -c * y[0],
                    -c * y[1],
                    -c * y[2],
                    y[7],
                    -kcurv * y[6],
                ]
            };
            let integ = Rk45 {
                tol,
                ..Default::default()
            };
            let mut last = FlowSample {
                s: 0.0,
                pos: x0,
                vel: v0,
                jacobi: 0.0,
                jacobi_d: 1.0,
            };
            let y_end = integ.integrate(rhs, 0.0, length, y0, |s, y| {
                let smp = FlowSample {
                    s,
                    pos: [y[0], y[1], y[2]],
                    vel: [y[3], y[4], y[5]],
                    jacobi: y[6],
                    jacobi_d: y[7],
                };
                on_sample(&smp);
            })?;
            last.s = length;
            last.pos = [y_end[0], y_end[1], y_end[2]];
            last.vel = [y_end[3], y_end[4], y_end[5]];
            last.jacobi = y_end[6];
            last.jacobi_d = y_end[7];
            Ok(last)
        }
        SurfaceSpec::FlatTorus { .. } => Err(GeomError::IntegratorFailure(
            "flat tori are handled analytically".into(),
        )),
        SurfaceSpec::Revolution(profile) => {
            // chart state: [u, φ, u', φ', J, J']
            let f = profile.f.clone();
            let df = profile.df.clone();
            let ddf = profile.ddf.clone();
            let u0 = start.theta;
            let fu0 = (f)(u0);
            let y0 = vec![
                u0,
                start.phi,
                direction.cos(),
                direction.sin() / fu0,
                0.0,
                1.0,
            ];
            let rhs = move |_s: f64, y: &[f64]| -> Vec<f64> {
                let fu = (f)(y[0]);
                let dfu = (df)(y[0]);
                let ddfu = (ddf)(y[0]);
                let kcurv = -ddfu / fu;
                vec![
                    y[2],
                    y[3],
                    fu * dfu * y[3] * y[3],
                    -2.0 * dfu / fu * y[2] * y[3],
                    y[5],
                    -kcurv * y[4],
                ]
            };
            let integ = Rk45 {
                tol,
                ..Default::default()
            };
            let y_end = integ.integrate(rhs, 0.0, length, y0, |s, y| {
                let smp = FlowSample {
                    s,
                    pos: [y[0], y[1], 0.0],
                    vel: [y[2], y[3], 0.0],
                    jacobi: y[4],
                    jacobi_d: y[5],
                };
                on_sample(&smp);
            })?;
            Ok(FlowSample {
                s: length,
                pos: [y_end[0], y_end[1], 0.0],
                vel: [y_end[2], y_end[3], 0.0],
                jacobi: y_end[4],
                jacobi_d: y_end[5],
            })
        }
    }
}

/// Orthonormal tangent frame (e_θ, e_φ) at a point of S².
pub fn tangent_frame(p: &S2Point) -> ([f64; 3], [f64; 3]) {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    ([ct * cp, ct * sp, -st], [-sp, cp, 0.0])
}
