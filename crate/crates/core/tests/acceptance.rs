//! Acceptance criteria 1–11. Each criterion prints one PASS/FAIL line with
//! the measured quantities; the process fails if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, LN_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qsl_core::bounds::{converged_report, dephasing_arc_closed_form, geodesic_path, BetaLaw};
use qsl_core::dynamics::{
    appendix_b_generator, appendix_b_solution, gad_solution, integrate, AppendixBParams, DecayLaw, GADParams,
};
use qsl_core::experiments::{
    evaluate_point, evaluate_saturation, run, AppendixBConfig, ExperimentConfig, ExperimentId, Fig3Params, PointResult,
    RunOptions, SaturationParams,
};
use qsl_core::matrix::{pauli, ComplexMatrix};
use qsl_core::metric::{distance_d, fidelity_gm, normalize, speed_d};
use qsl_core::model::{spec_from_matrix, DynamicsModel};
use qsl_core::{random_density, random_hamiltonian, DensityMatrix, RngSeed};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

/// Independent Hilbert–Schmidt angle, straight from the definition.
fn angle(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let ip = |x: &ComplexMatrix, y: &ComplexMatrix| {
        let mut s = 0.0;
        for i in 0..x.dim() {
            for j in 0..x.dim() {
                s += (x.get(i, j).conj() * y.get(i, j)).re;
            }
        }
        s
    };
    (ip(a, b) / (ip(a, a) * ip(b, b)).sqrt()).clamp(-1.0, 1.0).acos()
}

type SmoothPath<'a> = dyn Fn(f64) -> (DensityMatrix, ComplexMatrix) + 'a;

fn max_state_error(traj: &qsl_core::dynamics::Trajectory, exact: impl Fn(f64) -> DensityMatrix) -> f64 {
    traj.times()
        .iter()
        .zip(traj.states())
        .map(|(&t, s)| s.matrix().max_abs_diff(exact(t).matrix()).unwrap())
        .fold(0.0, f64::max)
}

fn c1_gad_saturation() -> Outcome {
    let (p, model) = SaturationParams::default()
        .resolve(ExperimentId::GadSaturation)
        .map_err(e)?;
    let tau = p.tau.unwrap();
    let res = evaluate_saturation(&model, Some(1e-3), 33).map_err(e)?;
    let r = &res.report;
    let (cf_len, _) = res.closed_form.ok_or("no closed form")?;
    // diag(0.4, 0.6) decays to diag(0.7, 0.3) at q = 1/2
    let oracle = angle(
        &ComplexMatrix::real_diagonal(&[0.4, 0.6]),
        &ComplexMatrix::real_diagonal(&[0.7, 0.3]),
    );
    let ok = (tau - LN_2).abs() < 1e-15
        && (r.ratio_qsl - 1.0).abs() <= 1e-6
        && (cf_len - r.length_d).abs() <= 1e-7
        && (cf_len - oracle).abs() <= 1e-12;
    check(
        ok,
        format!(
            "ratio-1 = {:.2e}, |closed form - quadrature| = {:.2e}, |closed form - oracle| = {:.2e}, nodes = {}",
            r.ratio_qsl - 1.0,
            (cf_len - r.length_d).abs(),
            (cf_len - oracle).abs(),
            r.nodes
        ),
    )
}

fn c2_dephasing_saturation() -> Outcome {
    let (_, model) = SaturationParams::default()
        .resolve(ExperimentId::DephasingSaturation)
        .map_err(e)?;
    let res = evaluate_saturation(&model, None, 33).map_err(e)?;
    let r = &res.report;
    let (len, dist) = dephasing_arc_closed_form(1.0, 1.0).map_err(e)?;
    let oracle = 1.0f64.atan() - (-1.0f64).exp().atan();
    let ok = (r.ratio_qsl - 1.0).abs() <= 1e-6 && (len - dist).abs() <= 1e-9 && (len - oracle).abs() <= 1e-12;
    check(
        ok,
        format!(
            "ratio-1 = {:.2e}, |length - distance| (closed forms) = {:.2e}, |length - oracle| = {:.2e}",
            r.ratio_qsl - 1.0,
            (len - dist).abs(),
            (len - oracle).abs()
        ),
    )
}

fn c3_geodesic_family() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut worst_cos: f64 = 0.0;
    let mut count = 0;
    for dim in 2..=4usize {
        for i in 0..100u64 {
            let seed = 1000 * dim as u64 + 2 * i;
            let a = random_density(dim, None, RngSeed(seed)).map_err(e)?;
            let b = random_density(dim, None, RngSeed(seed + 1)).map_err(e)?;
            let f = fidelity_gm(&a, &b).map_err(e)?;
            for beta in BetaLaw::all() {
                let r = converged_report(|n| geodesic_path(&a, &b, beta, 1.5, n), 33, 1 << 14).map_err(e)?;
                worst_ratio = worst_ratio.max((r.ratio_qsl - 1.0).abs()).max((r.ratio_e - 1.0).abs());
                worst_cos = worst_cos.max((r.length_d.cos() - f).abs());
                count += 1;
            }
        }
    }
    check(
        worst_ratio <= 1e-6 && worst_cos <= 1e-7,
        format!("{count} paths: max |ratio-1| = {worst_ratio:.2e}, max |cos L - <P0,Pt>| = {worst_cos:.2e}"),
    )
}

fn c4_unitary_strictness() -> Outcome {
    let plus = DensityMatrix::from_bloch([1.0, 0.0, 0.0]).map_err(e)?;
    let tau = FRAC_PI_2;
    let model = DynamicsModel::Unitary {
        rho0: spec_from_matrix(plus.matrix()),
        hamiltonian: spec_from_matrix(&pauli::z().scale(0.5)),
        tau,
    };
    let r = converged_report(|n| model.trajectory(n), 33, 1 << 16).map_err(e)?;
    let gap = 1e-3 * tau;
    let ok = r.tau_qsl < r.tau_phi - gap && r.tau_phi <= tau * (1.0 + 1e-6) && r.tau_e < r.tau_qsl - gap;
    check(
        ok,
        format!(
            "tau_E/tau = {:.6}, tau_qsl/tau = {:.6}, tau_Phi/tau = {:.9}",
            r.ratio_e, r.ratio_qsl, r.ratio_phi
        ),
    )
}

fn c5_nonmarkov() -> Outcome {
    let (p, model) = SaturationParams::default()
        .resolve(ExperimentId::Nonmarkov)
        .map_err(e)?;
    let res = evaluate_saturation(&model, None, 33).map_err(e)?;
    let r = &res.report;
    check(
        r.ratio_qsl < 1.0 - 1e-3 && !res.monotone,
        format!(
            "tau = {:.6}, ratio = {:.6}, monotone = {}, law = {:?}",
            p.tau.unwrap(),
            r.ratio_qsl,
            res.monotone,
            p.law.unwrap()
        ),
    )
}

fn key(x: f64) -> String {
    format!("{x:.2}")
}

fn c6_thermal_kraus() -> Outcome {
    let p = Fig3Params::fig3a();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut saturated = BTreeSet::new();
    let mut geodesic = BTreeSet::new();
    let mut points = 0;
    for rho11 in p.rho11_values() {
        let (mut all_sat, mut all_geo) = (true, true);
        for tau in p.tau_values() {
            match evaluate_point(&p, rho11, tau).map_err(e)? {
                PointResult::Evaluated { report, geodesic, .. } => {
                    points += 1;
                    max_ratio = max_ratio.max(report.ratio_qsl);
                    all_sat &= (report.ratio_qsl - 1.0).abs() <= 1e-4;
                    all_geo &= geodesic;
                }
                PointResult::Skipped(why) => return Err(format!("rho11 = {rho11}, tau = {tau} skipped: {why}")),
            }
        }
        if all_sat {
            saturated.insert(key(rho11));
        }
        if all_geo {
            geodesic.insert(key(rho11));
        }
    }
    let expected: BTreeSet<String> = [key(0.0), key(0.5)].into();
    check(
        max_ratio <= 1.0 + 1e-6 && saturated == expected && geodesic == expected,
        format!(
            "{points} points, max ratio - 1 = {:.2e}, saturated columns {:?}, geodesic columns {:?}, expected {:?}",
            max_ratio - 1.0,
            saturated,
            geodesic,
            expected
        ),
    )
}

fn c7_fig3b_ordering() -> Outcome {
    let p = Fig3Params::fig3b();
    let (mut evaluated, mut skipped, mut violations) = (0, 0, 0);
    let mut worst = f64::INFINITY;
    let mut worst_at = (0.0, 0.0);
    for rho11 in p.rho11_values() {
        for tau in p.tau_values() {
            match evaluate_point(&p, rho11, tau).map_err(e)? {
                PointResult::Evaluated { report, .. } => {
                    evaluated += 1;
                    let margin = report.tau_qsl - report.tau_e;
                    if margin < -1e-8 {
                        violations += 1;
                    }
                    if margin < worst {
                        worst = margin;
                        worst_at = (rho11, tau);
                    }
                }
                PointResult::Skipped(_) if rho11 == 0.0 => skipped += 1,
                PointResult::Skipped(why) => return Err(format!("rho11 = {rho11}, tau = {tau} skipped: {why}")),
            }
        }
    }
    check(
        violations == 0,
        format!(
            "{evaluated} evaluated, {skipped} skipped (fixed point), {violations} with tau_qsl < tau_E - 1e-8; \
             min tau_qsl - tau_E = {worst:.3e} at rho11 = {:.2}, tau = {}",
            worst_at.0, worst_at.1
        ),
    )
}

fn c8_fig2() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(e)?;
    let mut cfg = ExperimentConfig::new(ExperimentId::Fig2);
    cfg.set("samples", 1000).map_err(e)?;
    let a = run(
        &cfg,
        &RunOptions {
            out: dir.path().join("a"),
            svg: false,
        },
    )
    .map_err(e)?;
    let b = run(
        &cfg,
        &RunOptions {
            out: dir.path().join("b"),
            svg: false,
        },
    )
    .map_err(e)?;
    let read = |p: &std::path::Path| std::fs::read(p.join("data.csv")).unwrap();
    let identical = read(&a.dir) == read(&b.dir) && a.summary == b.summary;
    let s = &a.summary;
    let failed = s["failed"].as_u64().unwrap();
    let pos = s["positive_fraction"].as_f64().unwrap();
    let neg = s["negative_fraction"].as_f64().unwrap();
    check(
        failed == 0 && pos > 0.0 && neg > 0.0 && identical && s["samples"] == 1000,
        format!("failed = {failed}, positive fraction = {pos}, negative fraction = {neg}, bit-identical rerun = {identical}"),
    )
}

fn c9_metric_suite() -> Outcome {
    let mut worst_sym: f64 = 0.0;
    let mut worst_tri = f64::NEG_INFINITY;
    let mut range_ok = true;
    for dim in 2..=4usize {
        for i in 0..1000u64 {
            let s = 10_000 * dim as u64 + 3 * i;
            let x = random_density(dim, None, RngSeed(s)).map_err(e)?;
            let y = random_density(dim, None, RngSeed(s + 1)).map_err(e)?;
            let z = random_density(dim, None, RngSeed(s + 2)).map_err(e)?;
            let xy = distance_d(&x, &y).map_err(e)?;
            let yz = distance_d(&y, &z).map_err(e)?;
            let xz = distance_d(&x, &z).map_err(e)?;
            worst_sym = worst_sym.max((xy - distance_d(&y, &x).map_err(e)?).abs());
            worst_tri = worst_tri.max(xz - xy - yz);
            range_ok &= [xy, yz, xz].iter().all(|d| (0.0..=FRAC_PI_2).contains(d));
        }
    }
    let metric_ok = worst_sym <= 1e-10 && worst_tri <= 1e-10 && range_ok;

    // finite differences along smooth paths: a random unitary orbit and
    // amplitude damping, both with exact derivatives
    let mut fd_ok = true;
    let mut fd_detail = Vec::new();
    let mut worst_eq = 0.0f64;
    for dim in 2..=4usize {
        let rho0 = random_density(dim, None, RngSeed(77 + dim as u64)).map_err(e)?;
        let h_op = random_hamiltonian(dim, false, RngSeed(91 + dim as u64)).map_err(e)?;
        let unitary = |t: f64| -> (DensityMatrix, ComplexMatrix) {
            let u = ComplexMatrix::unitary_propagator(&h_op, t).unwrap();
            let m = u
                .try_mul(rho0.matrix())
                .unwrap()
                .try_mul(&u.dagger())
                .unwrap()
                .hermitian_part();
            let dot = h_op.commutator(&m).unwrap().scale_complex(Complex64::new(0.0, -1.0));
            (DensityMatrix::new(m).unwrap(), dot)
        };
        let excited: Vec<f64> = (1..dim).map(|k| 0.5 / k as f64 / dim as f64).collect();
        let gad = GADParams::new(excited, DecayLaw::Constant(0.7)).map_err(e)?;
        let damping = |t: f64| -> (DensityMatrix, ComplexMatrix) {
            (
                gad_solution(&gad, t).unwrap(),
                qsl_core::dynamics::gad_derivative(&gad, t).unwrap(),
            )
        };
        let paths: [(&str, &SmoothPath<'_>); 2] = [("unitary", &unitary), ("damping", &damping)];
        for (name, path) in paths {
            let t0 = 0.4;
            let (rho, dot) = path(t0);
            let v = speed_d(&rho, &dot).map_err(e)?;
            let errs: Vec<f64> = [1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&h| (distance_d(&rho, &path(t0 + h).0).unwrap() / h - v).abs())
                .collect();
            let k = errs[0] / 1e-3;
            let bounded = errs
                .iter()
                .zip([1e-3, 1e-4, 1e-5])
                .all(|(&err, h)| err <= 2.0 * k * h + 1e-9);
            let r1 = errs[0] / errs[1];
            let r2 = errs[1] / errs[2];
            // at least first order everywhere; exactly first order where the
            // speed varies (a unitary orbit has constant speed, so only the
            // O(h²) curvature term is left)
            let at_least_linear = r1 >= 5.0 && r2 >= 5.0;
            let linear = name != "damping" || ((5.0..=20.0).contains(&r1) && (5.0..=20.0).contains(&r2));
            fd_ok &= bounded && at_least_linear && linear;
            fd_detail.push(format!("{name}{dim}: {r1:.1},{r2:.1}"));

            // speed from the derivative of the normalized state, 5-point stencil
            let h = 1e-3;
            let p = |t: f64| normalize(&path(t).0).matrix().clone();
            let pdot = p(t0 - 2.0 * h)
                .try_sub(&p(t0 + 2.0 * h))
                .unwrap()
                .try_add(&p(t0 + h).try_sub(&p(t0 - h)).unwrap().scale(8.0))
                .unwrap()
                .scale(1.0 / (12.0 * h));
            worst_eq = worst_eq.max((pdot.hs_norm() - v).abs());
        }
    }
    check(
        metric_ok && fd_ok && worst_eq <= 1e-6,
        format!(
            "3000 triples: max asymmetry {worst_sym:.1e}, max triangle excess {worst_tri:.1e}, range ok = {range_ok}; \
             fd error ratios per decade [{}]; max |v_D - |dP/dt|| = {worst_eq:.1e}",
            fd_detail.join(" ")
        ),
    )
}

fn c10_appendix_b() -> Outcome {
    let cfg = AppendixBConfig {
        scan: true,
        ..AppendixBConfig::default()
    };
    let mut geodesic = Vec::new();
    let mut worst_rk4: f64 = 0.0;
    for (theta, r0) in cfg.points() {
        if let Some((check, _)) = cfg.classify(theta, r0).map_err(e)? {
            if check.is_geodesic {
                geodesic.push((theta, r0));
            }
        }
        let params = AppendixBParams::new(theta, cfg.omega_l, cfg.gamma, r0).map_err(e)?;
        let rho0 = appendix_b_solution(&params, 0.0).map_err(e)?;
        let traj = integrate(appendix_b_generator(&params), &rho0, cfg.tau, 1e-3, "rk4").map_err(e)?;
        worst_rk4 = worst_rk4.max(max_state_error(&traj, |t| appendix_b_solution(&params, t).unwrap()));
    }
    let expected = vec![(FRAC_PI_4, [0.5, 0.0, 0.5])];
    check(
        geodesic == expected && worst_rk4 <= 1e-8,
        format!(
            "geodesic points {:?} (scan thetas pi/8, pi/4, 3pi/8 = {:.4}, {:.4}, {:.4}); max |closed form - RK4| = {worst_rk4:.1e}",
            geodesic,
            FRAC_PI_8,
            FRAC_PI_4,
            3.0 * PI / 8.0
        ),
    )
}

fn c11_rk4_order() -> Outcome {
    let tau = 2.0;
    let (dt, half) = (0.1, 0.05);
    let gad = GADParams::new(vec![0.6], DecayLaw::Constant(1.0)).map_err(e)?;
    let gad0 = gad_solution(&gad, 0.0).map_err(e)?;
    let gad_err = |h: f64| -> Result<f64, String> {
        let traj = integrate(qsl_core::dynamics::gad_generator(&gad), &gad0, tau, h, "gad").map_err(e)?;
        Ok(max_state_error(&traj, |t| gad_solution(&gad, t).unwrap()))
    };
    let ab = AppendixBParams::new(FRAC_PI_4, 1.0, 0.5, [0.5, 0.0, 0.3]).map_err(e)?;
    let ab0 = appendix_b_solution(&ab, 0.0).map_err(e)?;
    let ab_err = |h: f64| -> Result<f64, String> {
        let traj = integrate(appendix_b_generator(&ab), &ab0, tau, h, "appendix-b").map_err(e)?;
        Ok(max_state_error(&traj, |t| appendix_b_solution(&ab, t).unwrap()))
    };
    let g = gad_err(dt)? / gad_err(half)?;
    let a = ab_err(dt)? / ab_err(half)?;
    let in_band = |r: f64| (12.0..=20.0).contains(&r);
    check(
        in_band(g) && in_band(a),
        format!("error ratio dt = {dt} vs {half}: GAD {g:.2}, driven qubit {a:.2}"),
    )
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "GAD saturation",
            budget: s(1),
            run: c1_gad_saturation,
        },
        Criterion {
            id: 2,
            name: "dephasing saturation",
            budget: s(1),
            run: c2_dephasing_saturation,
        },
        Criterion {
            id: 3,
            name: "geodesic family",
            budget: s(10),
            run: c3_geodesic_family,
        },
        Criterion {
            id: 4,
            name: "unitary strictness",
            budget: s(1),
            run: c4_unitary_strictness,
        },
        Criterion {
            id: 5,
            name: "non-Markovian non-saturation",
            budget: s(1),
            run: c5_nonmarkov,
        },
        Criterion {
            id: 6,
            name: "thermal Kraus saturation condition",
            budget: s(30),
            run: c6_thermal_kraus,
        },
        Criterion {
            id: 7,
            name: "Fig. 3(b) ordering",
            budget: s(30),
            run: c7_fig3b_ordering,
        },
        Criterion {
            id: 8,
            name: "Fig. 2 reproduction",
            budget: s(60),
            run: c8_fig2,
        },
        Criterion {
            id: 9,
            name: "metric property suite",
            budget: s(30),
            run: c9_metric_suite,
        },
        Criterion {
            id: 10,
            name: "Appendix B classifier",
            budget: s(5),
            run: c10_appendix_b,
        },
        Criterion {
            id: 11,
            name: "integrator convergence",
            budget: s(5),
            run: c11_rk4_order,
        },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let timing = format!("{:.2}s / {}s", elapsed.as_secs_f64(), c.budget.as_secs());
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(d) => (false, d),
        };
        println!(
            "{} criterion {:>2} ({}) [{timing}]: {detail}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name
        );
        if !pass {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
