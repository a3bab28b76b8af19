//! Quadrature rules used throughout the crate: Gauss–Legendre nodes and
//! weights, composite panel integration, and an adaptive Gauss–Kronrod
//! (G7, K15) scheme for real- and complex-valued integrands.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature budget exceeded: error estimate {err:.3e} > tol {tol:.3e} after {subdivisions} subdivisions")]
    BudgetExceeded {
        err: f64,
        tol: f64,
        subdivisions: usize,
    },
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre polynomial with the usual Chebyshev
/// initial guess; converges to machine precision in a handful of steps.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                // one polishing step after convergence
                let mut q0 = 1.0;
                let mut q1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let q2 = ((2.0 * kf - 1.0) * x * q1 - (kf - 1.0) * q0) / kf;
                    q0 = q1;
                    q1 = q2;
                }
                dp = n as f64 * (x * q1 - q0) / (x * x - 1.0);
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// A Gauss–Legendre rule cached on `[-1, 1]`, applied to arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GlRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GlRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
        &self,
        a: f64,
        b: f64,
        mut f: F,
    ) -> Complex64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Composite Gauss–Legendre over `panels` equal subintervals of `[a, b]`.
pub fn panel_integrate_complex<F: FnMut(f64) -> Complex64>(
    rule: &GlRule,
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        total += rule.integrate_complex(lo, lo + h, &mut f);
    }
    total
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK constants).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> Complex64>(a: f64, b: f64, f: &mut F) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_g = WG[3] * fc;
    let mut res_k = WGK[7] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        res_k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    res_k *= h;
    res_g *= h;
    ((res_k), (res_k - res_g).norm())
}

/// Adaptive Gauss–Kronrod integration of a complex-valued integrand.
///
/// Splits the worst interval until the summed error estimate drops below
/// `tol` (absolute) or the subdivision budget runs out.
pub fn adaptive_gk<F: FnMut(f64) -> Complex64>(
    a: f64,
    b: f64,
    tol: f64,
    max_subdiv: usize,
    mut f: F,
) -> Result<Complex64, QuadError> {
    #[derive(Clone, Copy)]
    struct Seg {
        a: f64,
        b: f64,
        val: Complex64,
        err: f64,
    }
    let (val, err) = gk15(a, b, &mut f);
    let mut segs = vec![Seg { a, b, val, err }];
    let mut total_err = err;
    let mut n_split = 0;
    while total_err > tol {
        if n_split >= max_subdiv {
            return Err(QuadError::BudgetExceeded {
                err: total_err,
                tol,
                subdivisions: n_split,
            });
        }
        // split the segment with the largest error estimate
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty segment list");
        let seg = segs.swap_remove(idx);
        total_err -= seg.err;
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval at floating-point resolution; accept as is
            total_err += seg.err * 1e-30;
            segs.push(Seg {
                err: seg.err * 1e-30,
                ..seg
            });
            n_split += 1;
            continue;
        }
        let (v1, e1) = gk15(seg.a, mid, &mut f);
        let (v2, e2) = gk15(mid, seg.b, &mut f);
        total_err += e1 + e2;
        segs.push(Seg {
            a: seg.a,
            b: mid,
            val: v1,
            err: e1,
        });
        segs.push(Seg {
            a: mid,
            b: seg.b,
            val: v2,
            err: e2,
        });
        n_split += 1;
    }
    Ok(segs.iter().map(|s| s.val).sum())
}

/// Real-valued adaptive Gauss–Kronrod; thin wrapper over [`adaptive_gk`].
pub fn adaptive_gk_real<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    tol: f64,
    max_subdiv: usize,
    mut f: F,
) -> Result<f64, QuadError> {
    adaptive_gk(a, b, tol, max_subdiv, |x| Complex64::new(f(x), 0.0)).map(|v| v.re)
}
