//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line (visible with `cargo test --test acceptance
//! -- --nocapture`). The oracles are closed forms and brute-force
//! re-derivations, never the implementation path under test.

use conewave::cross_section::{
    eigensolve, mode_cutoff, verify_weyl, AngularSpectrum, CrossSectionSpec, Pair, S2Field,
    S2Point,
};
use conewave::estimates::{
    admissible_set, counterexample_run, decay_fit, decay_small_radius,
    pair_scaling, remark_collapse_holds, DecayGrid,
};
use conewave::geometry::{
    check_nfc_sufficient, check_nrec, conjugate_radius, SurfaceSpec,
};
use conewave::propagator::{hankel_transform, ConeFunction, RadialGrid, WaveEvolver};
use conewave::quad::GlRule;
use conewave::specfun::bessel_j;
use conewave::spectral_measure::{
    resolvent_kernel, spectral_measure_bessel, spectral_measure_ct, ResolventSign,
};
use conewave::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

fn sphere(n: usize, a_const: f64, count: usize) -> AngularSpectrum {
    eigensolve(
        &CrossSectionSpec::RoundSphere {
            dim: n - 1,
            radius: 1.0,
            a_const,
        },
        n,
        count,
    )
    .expect("analytic sphere spectrum")
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

/// Criterion 1: the two spectral-measure representations agree to 1e-3
/// relative on a 5-point λ × 3×3 (x, y) grid, free and a = -3/16, within
/// two minutes.
#[test]
fn criterion_1_dual_representation_oracle() {
    let started = Instant::now();
    let lambdas = [0.8_f64, 1.2, 1.6, 2.0, 2.4];
    let radii = [0.7_f64, 1.0, 1.4];
    let angle = 0.8;
    let mut max_gap: f64 = 0.0;
    for &a_const in &[0.0, -3.0 / 16.0] {
        let spectrum = sphere(3, a_const, 2500);
        for &lambda in &lambdas {
            for &r1 in &radii {
                for &r2 in &radii {
                    let pair = Pair::Angle(angle);
                    let k = mode_cutoff(lambda, r1.max(r2));
                    let series =
                        spectral_measure_bessel(&spectrum, lambda, r1, r2, pair, 1e-8).unwrap();
                    let ct = spectral_measure_ct(&spectrum, lambda, r1, r2, pair, k, 400_000)
                        .unwrap();
                    max_gap = max_gap.max((series - ct).norm() / series.norm());
                }
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    report(
        "1 (dual-representation oracle)",
        max_gap < 1e-3 && secs < 120.0,
        &format!("max relative gap {max_gap:.3e} (tol 1e-3), {secs:.1} s (budget 120 s)"),
    );
}

/// Criterion 2: free-space closed forms at 10 sample points, 1e-4
/// relative — spectral measure λ sin(λD)/(2π²D) and outgoing resolvent
/// e^{iλD}/(4πD).
#[test]
fn criterion_2_free_space_closed_forms() {
    let spectrum = sphere(3, 0.0, 2500);
    // the resolvent's mode tail decays like (r_min/r_max)^ν, so every
    // sample keeps the radii separated (ratio ≤ 0.85)
    let samples = [
        (0.9_f64, 0.8_f64, 1.1_f64, 0.5_f64),
        (1.3, 1.0, 1.25, 0.9),
        (1.7, 0.6, 1.3, 1.2),
        (2.1, 1.2, 0.9, 0.4),
        (2.5, 1.0, 1.5, 1.0),
        (1.1, 0.7, 1.0, 1.4),
        (1.9, 1.4, 1.1, 0.7),
        (2.3, 0.9, 1.2, 1.1),
        (1.5, 1.1, 0.8, 0.6),
        (2.0, 1.3, 0.95, 0.3),
    ];
    let mut worst_measure: f64 = 0.0;
    let mut worst_resolvent: f64 = 0.0;
    for &(lambda, r1, r2, gamma) in &samples {
        let dist = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * (gamma as f64).cos()).sqrt();
        let series =
            spectral_measure_bessel(&spectrum, lambda, r1, r2, Pair::Angle(gamma), 1e-8).unwrap();
        let want = lambda * (lambda * dist).sin() / (2.0 * PI * PI * dist);
        worst_measure = worst_measure.max((series.re - want).abs() / want.abs());

        let k = spectrum.levels.len();
        let res = resolvent_kernel(
            &spectrum,
            lambda,
            ResolventSign::Outgoing,
            r1,
            r2,
            Pair::Angle(gamma),
            k,
            400_000,
        )
        .unwrap();
        let want_res = Complex64::from_polar(1.0, lambda * dist) / (4.0 * PI * dist);
        worst_resolvent = worst_resolvent.max((res - want_res).norm() / want_res.norm());
    }
    report(
        "2 (free-space closed forms)",
        worst_measure < 1e-4 && worst_resolvent < 1e-4,
        &format!(
            "spectral measure gap {worst_measure:.3e}, resolvent gap {worst_resolvent:.3e} (tol 1e-4)"
        ),
    );
}

/// Criterion 3: free n=3 band-0 decay slope -1.0 ± 0.15 over t ∈ [4, 64];
/// the a = -3/16 small-radius weighted sup stays uniformly bounded.
#[test]
fn criterion_3_decay_exponent() {
    let started = Instant::now();
    let free = sphere(3, 0.0, 40_000);
    let t_grid: Vec<f64> = (0..13)
        .map(|i| 4.0 * (16.0_f64).powf(i as f64 / 12.0))
        .collect();
    let grid = DecayGrid::light_cone(2.0, 64.0, 1.0, vec![0.02, 0.12, 0.25]);
    let patches = conewave::geometry::build_microlocalizers(1.0, 0.45).unwrap();
    let fit = decay_fit(&free, Some((&patches, 0)), 0, &t_grid, &grid, 0.15).unwrap();
    let free_secs = started.elapsed().as_secs_f64();

    let shifted = sphere(3, -3.0 / 16.0, 900);
    let small_grid = DecayGrid::all_pairs(vec![0.1, 0.2, 0.4, 0.7, 1.0], vec![0.3, 0.9, 1.6]);
    let small = decay_small_radius(&shifted, 0, &t_grid, &small_grid).unwrap();
    let shifted_secs = started.elapsed().as_secs_f64() - free_secs;

    // "uniformly bounded": the weighted, time-normalized sup stays below a
    // fixed constant across the whole grid (observed ≈ 0.14)
    let bounded = small.max_normalized < 5.0;
    report(
        "3 (decay exponent)",
        (fit.slope - fit.target).abs() <= 0.15
            && !fit.refinement_flagged
            && bounded
            && free_secs < 300.0
            && shifted_secs < 300.0,
        &format!(
            "free slope {:.3} (target {:.1} ± 0.15, refinement stable), weighted small-radius sup {:.3e} < 5, {free_secs:.1}+{shifted_secs:.1} s (budget 300 s each)",
            fit.slope, fit.target, small.max_normalized
        ),
    );
}

/// Criterion 4: counterexample sharpness at ν₀ = 1/4 — growth ≥ 1.5 from
/// ε = 1e-1 to 1e-3 at p = 24, ≈ linear in |log ε| at p = 12, bounded at
/// p = 6, within two minutes.
#[test]
fn criterion_4_counterexample_sharpness() {
    let started = Instant::now();
    let eps = [1e-1, 1e-2, 1e-3];
    let super_crit = counterexample_run(0.25, 3, 24.0, 24.0, &eps).unwrap();
    let growth = super_crit.rows.last().unwrap().1 / super_crit.rows[0].1;

    let critical = counterexample_run(0.25, 3, 12.0, 12.0, &eps).unwrap();
    let inc: Vec<f64> = critical.rows.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let log_linear = (inc[1] / inc[0] - 1.0).abs() < 0.5;

    let sub_crit = counterexample_run(0.25, 3, 6.0, 6.0, &eps).unwrap();
    let spread = sub_crit.rows.last().unwrap().1 / sub_crit.rows[0].1;
    let secs = started.elapsed().as_secs_f64();
    report(
        "4 (counterexample sharpness)",
        growth >= 1.5 && log_linear && (0.7..1.3).contains(&spread) && secs < 120.0,
        &format!(
            "p=24 growth ×{growth:.3} (≥ 1.5), p=12 |log ε|-increment ratio {:.3} (≈ 1), p=6 spread ×{spread:.3} (bounded), {secs:.1} s",
            inc[1] / inc[0]
        ),
    );
}

/// Criterion 5: Hankel-transform unitarity — the Gaussian fixed point at
/// (ν = 1/2, n = 3) to 1e-6, and ‖ℋ_ν f‖ = ‖f‖ to 1e-8 for 20 random
/// band-limited profiles across ν ∈ {1/4, 1/2, 3/2, 5/2}.
#[test]
fn criterion_5_hankel_unitarity() {
    // Gaussian fixed point
    let grid = RadialGrid::new(3, 1e-4, 14.0, 560);
    let gauss: Vec<Complex64> = grid
        .nodes
        .iter()
        .map(|&r| Complex64::new((-r * r / 2.0).exp(), 0.0))
        .collect();
    let rhos = [0.4, 0.9, 1.5, 2.3, 3.0];
    let out = hankel_transform(0.5, &gauss, &grid, &rhos).unwrap();
    let mut fixed_gap: f64 = 0.0;
    for (&rho, v) in rhos.iter().zip(&out) {
        let want = (-rho * rho / 2.0_f64).exp();
        fixed_gap = fixed_gap.max((v.re - want).abs() / want);
    }

    // norm preservation on random band-limited data; the radial grid is
    // graded at the tip because the ν = 1/4 mode behaves like r^{-1/4}
    let grid = Arc::new(RadialGrid::graded(3, 1e-6, 36.0, 832));
    let rho_grid = Arc::new(RadialGrid::new(3, 1e-4, 4.0, 320));
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let nu = [0.25, 0.5, 1.5, 2.5][trial % 4];
        // centered well away from ρ = 0: the half-line boundary leaves an
        // algebraic radial tail proportional to the profile's value at 0
        let center = 1.3 + 0.4 * rng.random::<f64>();
        let width: f64 = 0.18 + 0.06 * rng.random::<f64>();
        let phase = 2.0 * rng.random::<f64>() - 1.0;
        let spectral: Vec<Complex64> = rho_grid
            .nodes
            .iter()
            .map(|&p| {
                Complex64::new(1.0, phase) * (-(p - center).powi(2) / (2.0 * width * width)).exp()
            })
            .collect();
        // f = ℋ g, then ‖ℋ f‖ must reproduce ‖f‖ (and both equal ‖g‖)
        let f = hankel_transform(nu, &spectral, &rho_grid, &grid.nodes).unwrap();
        let back = hankel_transform(nu, &f, &grid, &rho_grid.nodes).unwrap();
        let norm = |v: &[Complex64], g: &RadialGrid| -> f64 {
            v.iter()
                .zip(&g.weights)
                .map(|(x, &w)| w * x.norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let nf = norm(&f, &grid);
        let nb = norm(&back, &rho_grid);
        worst = worst.max((nf - nb).abs() / nf);
    }
    report(
        "5 (Hankel unitarity)",
        fixed_gap < 1e-6 && worst < 1e-8,
        &format!("Gaussian fixed point gap {fixed_gap:.3e} (tol 1e-6), worst norm defect {worst:.3e} (tol 1e-8)"),
    );
}

/// Criterion 6: geometry gates — NREC truth values, the conjugate radius
/// of the unit sphere, and the curvature truth table.
#[test]
fn criterion_6_geometry_gates() {
    let unit = check_nrec(&SurfaceSpec::Sphere { radius: 1.0 }).unwrap();
    let half = check_nrec(&SurfaceSpec::Sphere { radius: 0.5 }).unwrap();
    let torus = check_nrec(&SurfaceSpec::FlatTorus { r_a: 0.5, r_b: 1.0 }).unwrap();

    let conj = conjugate_radius(
        &SurfaceSpec::Sphere { radius: 1.0 },
        &S2Point::new(1.0, 0.4),
        0.7,
        0.05,
    )
    .unwrap();

    let truth_table = check_nfc_sufficient(1.0, 1.0, true)
        && !check_nfc_sufficient(4.0, 4.0, true)
        && check_nfc_sufficient(0.0, 0.0, false);

    report(
        "6 (geometry gates)",
        unit.holds
            && unit.delta0 >= 1.0 - 1e-12
            && !half.holds
            && !torus.holds
            && (conj - PI).abs() < 1e-4
            && truth_table,
        &format!(
            "NREC: unit {} (δ₀ = {:.3}), r=1/2 {}, torus(π) {}; conjugate radius {conj:.8} (π ± 1e-4); Prop.-1.2 table ok",
            unit.holds, unit.delta0, half.holds, torus.holds
        ),
    );
}

/// Criterion 7: spectral infrastructure — Galerkin vs analytic eigenvalues
/// to 1e-8, the Weyl band, Littlewood–Paley Plancherel to 1e-8, and wave
/// energy conservation to 1e-7 over t ∈ [0, 32].
#[test]
fn criterion_7_spectral_infrastructure() {
    // Galerkin agreement on the unit S² with constant a
    let galerkin = eigensolve(
        &CrossSectionSpec::GalerkinSphere2 {
            max_degree: 12,
            a: S2Field::constant(0.3),
            a_theta: S2Field::zero(),
            a_phi: S2Field::zero(),
        },
        3,
        64,
    )
    .unwrap();
    let mut eig_gap: f64 = 0.0;
    let mut idx = 0;
    'outer: for l in 0..=7usize {
        let want = (l * (l + 1)) as f64 + 0.3;
        for _ in 0..(2 * l + 1) {
            if idx >= galerkin.levels.len() {
                break 'outer;
            }
            eig_gap = eig_gap.max((galerkin.levels[idx].mu - want).abs());
            idx += 1;
        }
    }

    // Weyl band
    let free = sphere(3, 0.0, 220);
    let weyl = verify_weyl(&free);
    let weyl_ok = !weyl.insufficient && weyl.min_ratio > 0.4 && weyl.max_ratio < 2.6;

    // Plancherel and energy on a wave evolver
    let spectrum = Arc::new(sphere(3, 0.0, 9).with_harmonic_s2().unwrap());
    let grid = Arc::new(RadialGrid::new(3, 1e-4, 48.0, 960));
    let rho = Arc::new(RadialGrid::new(3, 1e-4, 4.0, 320));
    let ev = WaveEvolver::new(spectrum, grid, rho, 4).unwrap();
    let rule = GlRule::new(160);
    let profile = |nu: f64, r: f64| {
        rule.integrate(1e-9, 3.5, |p| {
            (r * p).powf(-0.5)
                * bessel_j(nu, r * p).unwrap()
                * (-(p - 1.4_f64).powi(2) / (2.0 * 0.0784)).exp()
                * p
                * p
        })
    };
    let mut u0 = ConeFunction::zero(4, ev.grid.len());
    let mut u1 = ConeFunction::zero(4, ev.grid.len());
    for (i, &r) in ev.grid.nodes.iter().enumerate() {
        u0.coeffs[0][i] = Complex64::new(profile(0.5, r), 0.0);
        u0.coeffs[2][i] = Complex64::new(0.6 * profile(1.5, r), 0.0);
        u1.coeffs[1][i] = Complex64::new(0.0, 0.4) * profile(1.5, r);
    }
    let plancherel: f64 = {
        let total: f64 = ev
            .resolved_bands()
            .iter()
            .map(|&j| ev.lp_piece_norm(&u0, j, true).unwrap().powi(2))
            .sum();
        let norm2 = ev.l2_norm(&u0).powi(2);
        ((total - norm2) / norm2).abs()
    };
    let e0 = ev.energy(&u0, &u1);
    let mut energy_drift: f64 = 0.0;
    for &t in &[8.0, 20.0, 32.0] {
        let u = ev.evolve_wave(&u0, &u1, t).unwrap();
        let v = ev.evolve_wave_velocity(&u0, &u1, t).unwrap();
        energy_drift = energy_drift.max(((ev.energy(&u, &v) - e0) / e0).abs());
    }

    report(
        "7 (spectral infrastructure)",
        eig_gap < 1e-8 && weyl_ok && plancherel < 1e-8 && energy_drift < 1e-7,
        &format!(
            "Galerkin gap {eig_gap:.3e} (tol 1e-8), Weyl band [{:.2}, {:.2}] ⊂ [0.4, 2.6], Plancherel defect {plancherel:.3e} (tol 1e-8), energy drift {energy_drift:.3e} (tol 1e-7)",
            weyl.min_ratio, weyl.max_ratio
        ),
    );
}

/// Criterion 8: admissibility bookkeeping equals a brute-force rational
/// lattice evaluation, including the (2, ∞, 3) exclusion and the
/// Remark-1.5 collapse for s < 1/2 + ν₀.
#[test]
fn criterion_8_admissibility_bookkeeping() {
    let n = 3usize;
    let nu0 = 0.25;
    let mut lattice = vec![];
    let mut meta = vec![];
    for i in 0..=50u32 {
        for j in 0..=50u32 {
            let q = if i == 0 { f64::INFINITY } else { 100.0 / i as f64 };
            let p = if j == 0 { f64::INFINITY } else { 100.0 / j as f64 };
            lattice.push((q, p));
            meta.push((i as i64, j as i64));
        }
    }
    // membership of Λ_s at s = 1/2, brute-forced in integer arithmetic:
    // 1/q = i/100, 1/p = j/100, s·100 = n(50 - j) - i
    let s = 0.5;
    let set = admissible_set(n, s, nu0, &lattice).unwrap();
    let mut mismatches = 0;
    for (pair, &(i, j)) in set.iter().zip(&meta) {
        let adm = 2 * i <= (n as i64 - 1) * (50 - j) && !(i == 50 && j == 0);
        let in_s = adm && n as i64 * (50 - j) - i == 50;
        let in_sa = in_s && 12 * j > 100; // p < p(α) = 12 ⟺ 1/p > 1/12
        if pair.in_lambda_s != in_s || pair.in_lambda_s_alpha != in_sa {
            mismatches += 1;
        }
    }

    // the forbidden corner in n = 3 and its n = 4 counterpart
    let corner3 = admissible_set(3, pair_scaling(3, 2.0, f64::INFINITY), 1.0, &[(2.0, f64::INFINITY)])
        .unwrap()[0]
        .in_lambda_s;
    let corner4 = admissible_set(4, pair_scaling(4, 2.0, f64::INFINITY), 1.0, &[(2.0, f64::INFINITY)])
        .unwrap()[0]
        .in_lambda_s;

    // Remark 1.5: Λ_{s,α} = Λ_s for s < 1/2 + ν₀
    let collapse_low = remark_collapse_holds(&admissible_set(3, 0.5, 0.25, &lattice).unwrap());
    let collapse_high_fails =
        !remark_collapse_holds(&admissible_set(3, 1.0, 0.25, &lattice).unwrap());

    report(
        "8 (admissibility bookkeeping)",
        mismatches == 0 && !corner3 && corner4 && collapse_low && collapse_high_fails,
        &format!(
            "lattice mismatches {mismatches}/2601, (2,∞,3) excluded {}, Remark-1.5 collapse below 1/2+ν₀ {collapse_low}, strict above {collapse_high_fails}",
            !corner3
        ),
    );
}
