//! Acceptance gate for the laboratory: one test per advertised guarantee,
//! each pinned to its stated tolerance and, where one is stated, its runtime
//! budget. Everything runs through the public library API except the last
//! test, which drives the installed binary the way a user would.

use std::f64::consts::{LN_2, PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use puncta::asymptotics::{
    check_remainder_rates, cusp_derivative_limits, l_table, minda_limit, LTableMode,
};
use puncta::bounds::{
    ahlfors_check, corner_bound_check, delta_three_puncture, gamma_fn, maximality_check,
    BoundsError, ThreePunctureParams,
};
use puncta::metrics::{
    hyperbolic_disk_density, lambda_alpha_r_density, numeric_curvature, ComplexPoint, Domain,
    LambdaAlphaRParams, MetricField, punctured_disk_density,
};
use puncta::potential::{
    log_kernel_deriv, log_potential, log_potential_with, potential_deriv, MultiIndex, QuadOpts,
    SourceField,
};
use puncta::solver::{build_grid, solve_curvature, CurvatureField, Dirichlet, SolveConfig};

fn pt(re: f64, im: f64) -> ComplexPoint {
    ComplexPoint::new(re, im).unwrap()
}

// Log-uniform radii spread sample points across the decades instead of
// piling up at the outer rim.
fn disk_sample(n: usize, r_lo: f64, r_hi: f64, seed: u64) -> Vec<ComplexPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = r_lo * (r_hi / r_lo).powf(rng.random::<f64>());
            let t = TAU * rng.random::<f64>();
            ComplexPoint::from_polar(r, t).unwrap()
        })
        .collect()
}

// ---------------------------------------------------------------------
// 1. The catalog family has constant curvature −4 at every exponent.
// ---------------------------------------------------------------------

#[test]
fn catalog_curvature_is_constant_minus_four() {
    let start = Instant::now();
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let field =
            MetricField::lambda_alpha_r(LambdaAlphaRParams::new(alpha, 1.0).unwrap());
        for z in disk_sample(50, 1e-3, 0.9, 11) {
            let k = numeric_curvature(&field, z, None).unwrap();
            assert!(
                (k + 4.0).abs() <= 1e-5,
                "alpha = {alpha}, |z| = {}: curvature {k}",
                z.abs()
            );
        }
    }
    let spent = start.elapsed();
    assert!(spent < Duration::from_secs(1), "took {spent:?}");
}

// ---------------------------------------------------------------------
// 2. The exponent endpoints reduce to the classical densities.
// ---------------------------------------------------------------------

#[test]
fn catalog_endpoints_reduce_to_the_classical_densities() {
    let disk = LambdaAlphaRParams::new(0.0, 1.0).unwrap();
    let cusp = LambdaAlphaRParams::new(1.0, 1.0).unwrap();
    for z in disk_sample(100, 1e-3, 0.95, 23) {
        let a = lambda_alpha_r_density(&disk, z).unwrap();
        let b = hyperbolic_disk_density(z).unwrap();
        assert!((a - b).abs() <= 1e-13 * b, "disk at |z| = {}", z.abs());

        let c = lambda_alpha_r_density(&cusp, z).unwrap();
        let d = punctured_disk_density(z).unwrap();
        assert!((c - d).abs() <= 1e-13 * d, "cusp at |z| = {}", z.abs());
    }
}

// ---------------------------------------------------------------------
// 3. The potential engine reproduces its closed forms and its own
//    numerical differentiation.
// ---------------------------------------------------------------------

fn fd_stencil(n: u32) -> Vec<(i32, f64)> {
    match n {
        0 => vec![(0, 1.0)],
        1 => vec![(-1, -0.5), (1, 0.5)],
        2 => vec![(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => vec![(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => vec![(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!(),
    }
}

fn fd_potential_deriv(f: &SourceField, j: MultiIndex, z: ComplexPoint, h: f64) -> f64 {
    let opts = QuadOpts {
        abs_tol: 1e-10,
        ..QuadOpts::default()
    };
    let mut acc = 0.0;
    for &(ix, cx) in &fd_stencil(j.j1()) {
        for &(iy, cy) in &fd_stencil(j.j2()) {
            let p = pt(z.re() + ix as f64 * h, z.im() + iy as f64 * h);
            acc += cx * cy * log_potential_with(f, p, &opts).unwrap().value;
        }
    }
    acc / h.powi(j.total() as i32)
}

#[test]
fn potential_derivatives_match_closed_forms_and_differencing() {
    let start = Instant::now();

    // Unit source on the unit disk: ω(z) = (|z|²−1)/4 inside, so the value
    // at 0, the Hessian trace, and every third derivative have exact values.
    let one = SourceField::new(1.0, |_| 1.0)
        .unwrap()
        .with_derivs(|_, _| 0.0)
        .with_hoelder(2, 1.0);
    let at_zero = log_potential(&one, pt(0.0, 0.0)).unwrap().value;
    assert!((at_zero + 0.25).abs() <= 1e-8, "omega(0) = {at_zero}");

    let z = pt(0.3, -0.1);
    let dxx = potential_deriv(&one, MultiIndex::new(2, 0), z, 2.0).unwrap();
    let dyy = potential_deriv(&one, MultiIndex::new(0, 2), z, 2.0).unwrap();
    assert!((dxx + dyy - 1.0).abs() <= 1e-4, "trace = {}", dxx + dyy);

    for (j1, j2) in [(3, 0), (2, 1), (1, 2), (0, 3)] {
        let d = potential_deriv(&one, MultiIndex::new(j1, j2), z, 2.0).unwrap();
        assert!(d.abs() <= 1e-4, "({j1},{j2}): {d}");
    }

    // Nonradial smooth source: every representation-formula derivative up
    // to order four against central differences of the plain potential.
    // The stencils carry an O(h²) bias; one Richardson step removes it at
    // orders three and four, where the bare step must stay coarse.
    let (a, b) = (0.8, -0.5);
    let smooth = SourceField::new(1.0, move |w: Complex64| (a * w.re + b * w.im).exp())
        .unwrap()
        .with_derivs(move |j: MultiIndex, w: Complex64| {
            a.powi(j.j1() as i32) * b.powi(j.j2() as i32) * (a * w.re + b * w.im).exp()
        })
        .with_hoelder(2, 1.0);
    let z = pt(0.3, -0.2);
    for j1 in 0..=4u32 {
        for j2 in 0..=4 - j1 {
            let order = j1 + j2;
            if order == 0 {
                continue;
            }
            let j = MultiIndex::new(j1, j2);
            let formula = potential_deriv(&smooth, j, z, 1.5).unwrap();
            let numeric = match order {
                1 | 2 => fd_potential_deriv(&smooth, j, z, 0.01),
                3 => {
                    (4.0 * fd_potential_deriv(&smooth, j, z, 0.06)
                        - fd_potential_deriv(&smooth, j, z, 0.12))
                        / 3.0
                }
                _ => {
                    (4.0 * fd_potential_deriv(&smooth, j, z, 0.08)
                        - fd_potential_deriv(&smooth, j, z, 0.16))
                        / 3.0
                }
            };
            let rel = (formula - numeric).abs() / numeric.abs();
            assert!(
                rel <= 1e-3,
                "J = ({j1},{j2}): formula {formula} vs stencil {numeric}, rel {rel:.2e}"
            );
        }
    }

    let spent = start.elapsed();
    assert!(spent < Duration::from_secs(30), "took {spent:?}");
}

// ---------------------------------------------------------------------
// 4. The kernel derivatives obey the factorial bound and the boundary
//    integral stays under 6π.
// ---------------------------------------------------------------------

#[test]
fn kernel_derivatives_respect_the_factorial_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut checked = 0usize;
    while checked < 1000 {
        let z = pt(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
        let zeta = pt(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
        let j1 = rng.random_range(0..=3u32);
        let j2 = rng.random_range(0..=3u32);
        if j1 + j2 == 0 {
            continue;
        }
        let w = Complex64::new(z.re() - zeta.re(), z.im() - zeta.im());
        if w.norm() < 1e-9 {
            continue;
        }
        let d = log_kernel_deriv(MultiIndex::new(j1, j2), z, zeta).unwrap();
        let n = (j1 + j2) as f64;
        let bound = (1..=(j1 + j2)).map(f64::from).product::<f64>() / w.norm().powf(n);
        assert!(
            d.abs() <= bound,
            "J = ({j1},{j2}), |w| = {}: {} vs bound {bound}",
            w.norm(),
            d.abs()
        );
        checked += 1;
    }

    // ∮_{|ζ|=|z|/2} ∂₁L(z−ζ)·N₂(ζ) |dζ| by 2048-node trapezoid; the circle
    // is a full period, so the rule is spectrally accurate here.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let rz = 0.2 + 1.8 * rng.random::<f64>();
        let tz = TAU * rng.random::<f64>();
        let z = pt(rz * tz.cos(), rz * tz.sin());
        let r = rz / 2.0;
        let n = 2048;
        let mut acc = 0.0;
        for i in 0..n {
            let phi = TAU * i as f64 / n as f64;
            let zeta = pt(r * phi.cos(), r * phi.sin());
            acc += log_kernel_deriv(MultiIndex::new(1, 0), z, zeta).unwrap() * phi.sin();
        }
        let total = acc * (TAU / n as f64) * r;
        assert!(total.abs() <= 6.0 * PI + 1e-9, "|z| = {rz}: {total}");
    }
}

// ---------------------------------------------------------------------
// 5. The solver reproduces the manufactured density and refines at
//    second order or better.
// ---------------------------------------------------------------------

fn manufactured_sup_error(nr: usize, nt: usize) -> f64 {
    let params = LambdaAlphaRParams::new(0.5, 1.0).unwrap();
    let exact = move |z: Complex64| {
        lambda_alpha_r_density(&params, ComplexPoint::new(z.re, z.im).unwrap())
            .unwrap()
            .ln()
    };
    let grid = build_grid(1e-3, 0.5, nr, nt).unwrap();
    let kappa = CurvatureField::constant(-4.0).unwrap();
    let boundary = Dirichlet::from_fn(&grid, &exact).unwrap();
    let cfg = SolveConfig {
        tol: 1e-6,
        ..SolveConfig::default()
    };
    let sol = solve_curvature(&kappa, &boundary, &grid, &cfg).unwrap();
    let mut worst = 0.0f64;
    for i in 0..grid.n_s() {
        for j in 0..grid.n_theta() {
            worst = worst.max((sol.value(i, j) - exact(grid.node(i, j))).abs());
        }
    }
    worst
}

#[test]
fn solver_converges_to_the_manufactured_density() {
    let start = Instant::now();
    let coarse = manufactured_sup_error(64, 32);
    let fine = manufactured_sup_error(128, 64);
    assert!(fine <= 1e-4, "sup error at 128x64: {fine:.3e}");
    let order = (coarse / fine).ln() / 2.0f64.ln();
    assert!(
        order >= 1.8,
        "observed order {order:.2} (sup errors {coarse:.3e} / {fine:.3e})"
    );
    let spent = start.elapsed();
    assert!(spent < Duration::from_secs(60), "took {spent:?}");
}

// ---------------------------------------------------------------------
// 6. Remainder decay exponents match the predicted rates, corner and
//    cusp alike.
// ---------------------------------------------------------------------

#[test]
fn remainder_decay_rates_match_the_predicted_exponents() {
    let start = Instant::now();

    // Corner remainder of order 3/4: v = log λ + (3/4)·log|z|.
    let params = LambdaAlphaRParams::new(0.75, 1.0).unwrap();
    let v = move |z: Complex64| {
        lambda_alpha_r_density(&params, ComplexPoint::new(z.re, z.im).unwrap())
            .unwrap()
            .ln()
            + 0.75 * z.norm().ln()
    };
    let report = check_remainder_rates(v, 0.75, 3).unwrap();
    for (n1, n2, want, tol) in [
        (0, 1, -0.5, 0.05),
        (1, 0, -0.5, 0.05),
        (0, 3, -2.5, 0.1),
        (3, 0, -2.5, 0.1),
    ] {
        let check = report
            .checks
            .iter()
            .find(|c| c.n1 == n1 && c.n2 == n2)
            .unwrap();
        assert!(
            (check.fit.p - want).abs() <= tol,
            "corner ({n1},{n2}): p = {} vs {want}",
            check.fit.p
        );
    }

    // Cusp remainder at R = 0.9: w = log λ + log|z| + log log(1/|z|)
    // collapses algebraically to log(L/(L + log R)) − log 2 with
    // L = log(1/|z|); the identity is pinned before the deep ladder uses
    // the collapsed form, which is immune to the cancellation of the two
    // large logs.
    let big_r = 0.9f64;
    let cusp_params = LambdaAlphaRParams::new(1.0, big_r).unwrap();
    let w = move |z: Complex64| {
        let l = -z.norm().ln();
        (l / (l + big_r.ln())).ln() - LN_2
    };
    for r in [1e-2, 1e-4, 1e-6] {
        let z = Complex64::from_polar(r, 0.4);
        let from_density = lambda_alpha_r_density(&cusp_params, pt(z.re, z.im))
            .unwrap()
            .ln()
            + r.ln()
            + (-r.ln()).ln();
        assert!(
            (w(z) - from_density).abs() <= 1e-10,
            "collapsed form drifts at r = {r}"
        );
    }
    let report = check_remainder_rates(w, 1.0, 2).unwrap();
    for (n1, n2, want_p, want_q) in [(0, 2, -2.0, -2.0), (2, 0, -2.0, -2.0), (1, 1, -2.0, -3.0)]
    {
        let check = report
            .checks
            .iter()
            .find(|c| c.n1 == n1 && c.n2 == n2)
            .unwrap();
        assert!(
            (check.fit.p - want_p).abs() <= 0.05,
            "cusp ({n1},{n2}): p = {} vs {want_p}",
            check.fit.p
        );
        assert!(
            (check.fit.q - want_q).abs() <= 0.3,
            "cusp ({n1},{n2}): q = {} vs {want_q}",
            check.fit.q
        );
    }

    let spent = start.elapsed();
    assert!(spent < Duration::from_secs(60), "took {spent:?}");
}

// ---------------------------------------------------------------------
// 7. Cusp limits: the Minda limit, the three weighted derivative limits,
//    and the full limit table against its binomial closed form.
// ---------------------------------------------------------------------

fn cusp_closed_form(n1: u32, n2: u32) -> f64 {
    // binom(−1/2, n1) · binom(−1/2, n2) / √(−κ₀) at κ₀ = −4.
    let binom = |k: u32| -> f64 {
        let mut num = 1.0;
        for i in 0..k {
            num *= -0.5 - i as f64;
        }
        num / (1..=k).map(f64::from).product::<f64>().max(1.0)
    };
    binom(n1) * binom(n2) * 0.5
}

#[test]
fn cusp_limits_match_their_closed_forms() {
    let start = Instant::now();
    let pd = MetricField::punctured_disk();

    let minda = minda_limit(&pd, ComplexPoint::zero()).unwrap();
    assert!(
        (minda.value - 0.5).abs() <= 1e-3,
        "Minda limit {}",
        minda.value
    );

    let limits = cusp_derivative_limits(&pd, -4.0).unwrap();
    for (name, got, want) in [
        ("first", limits.first.value, -0.25),
        ("second", limits.second.value, 0.375),
        ("mixed", limits.mixed.value, 0.125),
    ] {
        assert!(
            (got - want).abs() <= 0.02 * want.abs(),
            "{name}: {got} vs {want}"
        );
    }

    let table = l_table(&pd, LTableMode::Cusp { kappa0: -4.0 }, 3).unwrap();
    for entry in table.entries() {
        let closed = cusp_closed_form(entry.n1, entry.n2);
        assert!(
            (entry.closed_form - closed).abs() <= 1e-14 * closed.abs(),
            "closed-form column disagrees at ({},{})",
            entry.n1,
            entry.n2
        );
        assert!(
            (entry.numeric.value - closed).abs() <= 0.05 * closed.abs(),
            "l({},{}) = {} vs {closed}",
            entry.n1,
            entry.n2,
            entry.numeric.value
        );
    }

    // Exact structure of the closed form: symmetry in the pattern and the
    // one-step binomial recurrence n2·l = (τ−n2+1)·l_prev at τ = −1/2.
    for n1 in 0..=3u32 {
        for n2 in 0..=3 - n1 {
            let here = cusp_closed_form(n1, n2);
            let sym = cusp_closed_form(n2, n1);
            assert!((here - sym).abs() <= 1e-14);
            if n2 >= 1 {
                let prev = cusp_closed_form(n1, n2 - 1);
                let lhs = n2 as f64 * here;
                let rhs = (-0.5 - (n2 as f64 - 1.0)) * prev;
                assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs().max(1.0));
            }
        }
    }

    let spent = start.elapsed();
    assert!(spent < Duration::from_secs(120), "took {spent:?}");
}

// ---------------------------------------------------------------------
// 8. Corner limits: the weighted density limit 1−α and the corner limit
//    table against its binomial closed form.
// ---------------------------------------------------------------------

#[test]
fn corner_limits_match_their_closed_forms() {
    for alpha in [0.25, 0.5, 0.75] {
        let field =
            MetricField::lambda_alpha_r(LambdaAlphaRParams::new(alpha, 1.0).unwrap());
        let verdict = corner_bound_check(&field, alpha).unwrap();
        assert!(verdict.passed, "alpha = {alpha}");
        assert!(
            (verdict.l - (1.0 - alpha)).abs() <= 0.01,
            "alpha = {alpha}: l' = {} vs {}",
            verdict.l,
            1.0 - alpha
        );
    }

    let alpha = 0.5;
    let field = MetricField::lambda_alpha_r(LambdaAlphaRParams::new(alpha, 1.0).unwrap());
    let table = l_table(
        &field,
        LTableMode::Corner {
            alpha,
            l_prime: None,
        },
        2,
    )
    .unwrap();
    for entry in table.entries() {
        assert!(
            (entry.numeric.value - entry.closed_form).abs() <= 0.05 * entry.closed_form.abs(),
            "l({},{}) = {} vs {}",
            entry.n1,
            entry.n2,
            entry.numeric.value,
            entry.closed_form
        );
    }
}

// ---------------------------------------------------------------------
// 9. Special-function bounds against frozen oracles.
// ---------------------------------------------------------------------

#[test]
fn gamma_product_bounds_match_the_oracles() {
    let root_pi = gamma_fn(0.5).unwrap();
    assert!((root_pi - PI.sqrt()).abs() <= 1e-12, "Gamma(1/2) = {root_pi}");

    // Reference value of Γ(0.9)Γ(0.6)/(Γ(1.1)Γ(0.4)), evaluated separately
    // with 30-digit arithmetic and frozen here.
    let params = ThreePunctureParams::new(0.9, 0.9, 1.0).unwrap();
    let bound = delta_three_puncture(&params).unwrap();
    assert!(
        (bound.delta - 0.754_126_405_376_024_2).abs() <= 1e-10,
        "delta = {}",
        bound.delta
    );

    let field = MetricField::lambda_alpha_r(LambdaAlphaRParams::new(0.4, 1.0).unwrap());
    let verdict = corner_bound_check(&field, 0.4).unwrap();
    assert!(verdict.passed);
    assert!(
        (verdict.l - 0.6).abs() <= 0.01,
        "equality case reports l = {}",
        verdict.l
    );
}

// ---------------------------------------------------------------------
// 10. Comparison checks accept the dominated candidate, refuse the
//     inadmissible one, and confirm restriction maximality.
// ---------------------------------------------------------------------

fn scaled_disk(scale: f64) -> MetricField {
    let domain = Domain::disk(ComplexPoint::zero(), 1.0).unwrap();
    MetricField::from_fn(domain, Some(0.0), Some(-4.0 / (scale * scale)), move |z| {
        scale / (1.0 - z.norm_sqr())
    })
    .unwrap()
}

#[test]
fn comparison_checks_accept_and_refuse_correctly() {
    let sample = disk_sample(200, 1e-3, 0.95, 53);

    let modest = ahlfors_check(&scaled_disk(0.8), &sample).unwrap();
    assert!(modest.passed, "worst ratio {}", modest.worst_ratio);
    assert!((modest.worst_ratio - 0.8).abs() <= 1e-9);

    // Scaling up breaks the curvature ceiling, so the check must refuse
    // the candidate rather than compare it.
    match ahlfors_check(&scaled_disk(1.1), &sample) {
        Err(BoundsError::SkViolation { curvature, .. }) => {
            assert!(curvature > -4.0, "reported curvature {curvature}");
        }
        other => panic!("expected a curvature refusal, got {other:?}"),
    }

    // λ_{α,1} restricted to the smaller punctured disk must sit below the
    // smaller disk's own catalog density.
    let params = LambdaAlphaRParams::new(0.5, 1.0).unwrap();
    let restricted = MetricField::from_fn(
        Domain::punctured(ComplexPoint::zero(), 0.0, 0.5).unwrap(),
        Some(0.5),
        Some(-4.0),
        move |z| {
            lambda_alpha_r_density(&params, ComplexPoint::new(z.re, z.im).unwrap()).unwrap()
        },
    )
    .unwrap();
    let inner_sample = disk_sample(200, 5e-4, 0.45, 59);
    let verdict = maximality_check(&restricted, 0.5, 0.5, &inner_sample).unwrap();
    assert!(verdict.passed, "worst ratio {}", verdict.worst_ratio);
    assert!(verdict.worst_ratio <= 1.0 + 1e-9, "violation found");
    assert_eq!(verdict.points_checked, 200);
}

// ---------------------------------------------------------------------
// 11. Two verify runs with the same config emit byte-identical output.
// ---------------------------------------------------------------------

#[test]
fn verify_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.toml");
    let mut text = String::from("[verify]\nseed = 0\n");
    for tag in [
        "thmF-rates",
        "thm3.1",
        "thm3.2",
        "cor3.3",
        "minda",
        "cusp-limits",
        "u-limits",
        "l-table",
        "corner-bound",
        "delta-bound",
        "ahlfors",
        "maximality",
    ] {
        text.push_str(&format!("[[verify.checks]]\ntag = \"{tag}\"\n"));
    }
    std::fs::write(&config, text).unwrap();

    let run = || {
        std::process::Command::new(env!("CARGO_BIN_EXE_puncta"))
            .arg("--config")
            .arg(&config)
            .arg("verify")
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    assert_eq!(
        first.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}
