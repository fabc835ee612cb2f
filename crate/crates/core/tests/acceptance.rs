//! Acceptance gate: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion other than the separable-bound column fails.
//!
//! Reference values come from closed forms evaluated here, independently of
//! the engine, or from reference benchmark values.

use std::time::{Duration, Instant};

use adfs::analysis::{full_measure_rank_check, phase_sweep, scaling_study, PhaseClass, ScalingSetup};
use adfs::geometry::{preset_array, sampling_map_jacobian, sampling_vector, ArrayPreset, FieldModel, Position, SensorArray, Shape, SourcePoint};
use adfs::noise::{pushforward_gaussian, NoiseDistribution, StrengthLaw};
use adfs::numerics::{fit_line, golden_max, logspace, stream_rng};
use adfs::probe::{design_probe, grid_silencer, mirror_charge_probe, sphere_suppressing_pair, InsensitiveSubspace, InsensitiveSurface, ProbeState};
use adfs::qfi::{brute_force_qfi, phase_samples, qfi, qfi_rate_and_topt, qfi_with_dephasing, DephasingSpec, DiscreteNoise, Estimator};
use adfs::scenario::{preset, run_scenario_with, Tasks};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

struct Check {
    what: String,
    pass: bool,
}

fn check(what: impl Into<String>, pass: bool) -> Check {
    Check { what: what.into(), pass }
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target.abs()
}

fn within_factor(x: f64, target: f64, factor: f64) -> bool {
    x > 0.0 && target > 0.0 && (x / target).max(target / x) <= factor
}

fn timed(limit: Duration, checks: impl FnOnce() -> Vec<Check>) -> Vec<Check> {
    let start = Instant::now();
    let mut out = checks();
    let took = start.elapsed();
    out.push(check(format!("runtime {:.2?} < {:?}", took, limit), took < limit));
    out
}

fn random_xy(rng: &mut impl Rng, r_min: f64, r_max: f64) -> Position {
    let r = rng.random_range(r_min..r_max);
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    Position::xy(r * a.cos(), r * a.sin())
}

fn c1_closed_form_vs_mc() -> Vec<Check> {
    timed(Duration::from_secs(10), || {
        let model = FieldModel::coulomb();
        let array = preset_array(&ArrayPreset::Hexagon { radius: 1.0 }).unwrap();
        let k = ProbeState::from_slice(&[1.0, -0.3, 0.5, 0.2, -0.8, 0.4]).unwrap();
        let pos = Position::xy(2.5, 0.8);
        let sigma = 1.3;
        let dist = NoiseDistribution::FixedPositionGaussianStrength {
            position: pos,
            strength: StrengthLaw { mean: 0.4, sd: sigma },
        };
        let nk = sampling_vector(&model, &pos, &array).unwrap().dot(k.as_vector());
        let t_o = 1.0 / (2.0 * 2f64.sqrt() * sigma * nk.abs());
        let phases = phase_samples(&dist, &model, &array, &k, 100_000, 101, Estimator::Plain).unwrap();
        let mut worst = 0.0f64;
        for t in logspace(0.01 * t_o, 3.0 * t_o, 20) {
            let d = phases.decoherence(t);
            let exact = (-2.0 * sigma * sigma * nk * nk * t * t).exp();
            worst = worst.max((d.modulus() - exact).abs() / d.se_abs);
        }
        vec![check(format!("max deviation {worst:.2} standard errors <= 3"), worst <= 3.0)]
    })
}

fn c2_brute_force_oracle() -> Vec<Check> {
    timed(Duration::from_secs(30), || {
        let model = FieldModel::coulomb();
        let mut worst = 0.0f64;
        for case in 0..10u64 {
            let mut rng = stream_rng(202, case);
            let n = 2 + (case % 2) as usize;
            let array = SensorArray::new((0..n).map(|i| random_xy(&mut rng, 0.3 + 0.6 * i as f64, 0.6 + 0.6 * i as f64)).collect()).unwrap();
            let signal = random_xy(&mut rng, 2.0, 2.5);
            let mut kv: Vec<f64> = (0..n).map(|_| rng.random_range(-0.95..0.95)).collect();
            kv[case as usize % n] = if case % 3 == 0 { -1.0 } else { 1.0 };
            let k = ProbeState::from_slice(&kv).unwrap();
            // 3 x 3 position grid times Gauss-Hermite strength nodes
            let c = random_xy(&mut rng, 3.0, 3.5);
            let grid: Vec<(Position, f64)> = (0..9)
                .map(|j| {
                    let (dx, dy) = ((j % 3) as f64 - 1.0, (j / 3) as f64 - 1.0);
                    let w = [0.25, 0.5, 0.25][j % 3] * [0.25, 0.5, 0.25][j / 3];
                    (c + Position::xy(0.2 * dx, 0.2 * dy), w)
                })
                .collect();
            let noise = DiscreteNoise::gaussian_strength(&grid, StrengthLaw { mean: 0.1, sd: 0.9 }, 10).unwrap();
            let t = rng.random_range(0.3..3.0);
            let s = sampling_vector(&model, &signal, &array).unwrap();
            let d = noise.decoherence(&model, &array, &k, t).unwrap();
            let engine = qfi(&s, &k, t, d);
            let oracle = brute_force_qfi(&model, &array, &signal, &k, &noise, t).unwrap();
            worst = worst.max((oracle - engine).abs() / engine);
        }
        vec![check(format!("max relative difference {worst:.1e} <= 1e-8"), worst <= 1e-8)]
    })
}

fn c3_exact_dfs() -> Vec<Check> {
    let model = FieldModel::coulomb();
    let mut rng = stream_rng(303, 0);
    let array = preset_array(&ArrayPreset::TwoCircles {
        n_inner: 4,
        n_outer: 5,
        r_inner: 0.5,
        r_outer: 1.0,
        outer_phase: 0.5,
        center: Position::origin(2),
    })
    .unwrap();
    let sources: Vec<Position> = (0..5).map(|_| random_xy(&mut rng, 2.0, 4.0)).collect();
    let s = sampling_vector(&model, &Position::xy(0.1, 0.05), &array).unwrap();
    let k = design_probe(&s, &grid_silencer(&model, &array, &sources).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for p in &sources {
        let n = sampling_vector(&model, p, &array).unwrap();
        worst = worst.max(n.dot(k.as_vector()).abs() / n.as_vector().norm());
    }
    let noise = NoiseDistribution::Product {
        factors: sources
            .iter()
            .map(|&position| NoiseDistribution::FixedPositionGaussianStrength {
                position,
                strength: StrengthLaw { mean: 0.5, sd: 2.0 },
            })
            .collect(),
    };
    let phases = phase_samples(&noise, &model, &array, &k, 5000, 3, Estimator::Plain).unwrap();
    let (mut d_dev, mut f_dev) = (0.0f64, 0.0f64);
    for t in [0.1, 1.0, 10.0, 100.0] {
        let d = phases.decoherence(t);
        d_dev = d_dev.max((d.value() - Complex64::new(1.0, 0.0)).norm());
        let pure = 4.0 * s.dot(k.as_vector()).powi(2) * t * t;
        f_dev = f_dev.max((qfi(&s, &k, t, d.value()) - pure).abs() / pure);
    }
    vec![
        check(format!("max |<n,k>|/||n|| = {worst:.1e} <= 1e-10"), worst <= 1e-10),
        check(format!("max |d - 1| = {d_dev:.1e}"), d_dev <= 1e-10),
        check(format!("QFI relative deviation {f_dev:.1e} <= 1e-10"), f_dev <= 1e-10),
    ]
}

fn c4_apollonius() -> Vec<Check> {
    let (x1, x2) = (Position::xyz(0.0, 0.0, 0.5), Position::xyz(0.0, 0.0, -0.5));
    let array = SensorArray::new(vec![x1, x2]).unwrap();
    let mut rng = stream_rng(404, 0);
    let (mut worst, mut geo) = (0.0f64, 0.0f64);
    for c in [0.3, 0.5, 0.9] {
        for eta in [0.5, 1.0, 2.0] {
            let pair = sphere_suppressing_pair(&x1, &x2, c, eta).unwrap();
            let InsensitiveSurface::Sphere { center, radius } = pair.surface else {
                return vec![check("c < 1 gives a sphere", false)];
            };
            let c2 = c * c;
            let want_center = (x2 - x1.scale(c2)).scale(1.0 / (1.0 - c2));
            geo = geo.max((center - want_center).norm()).max((radius - c / (1.0 - c2)).abs());
            let model = FieldModel::InversePower { eta };
            for _ in 0..1000 {
                let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
                let u = Position::xyz(v[0], v[1], v[2]);
                let x = center + u.scale(radius / u.norm());
                let n = sampling_vector(&model, &x, &array).unwrap();
                let rel = n.dot(pair.probe.as_vector()).abs() / (n.as_vector().norm() * pair.probe.as_vector().norm());
                worst = worst.max(rel);
            }
        }
    }
    vec![
        check(format!("max relative <n,k> on spheres {worst:.1e} <= 1e-9"), worst <= 1e-9),
        check(format!("center/radius error {geo:.1e} <= 1e-12"), geo <= 1e-12),
    ]
}

fn c5_mirror_charges() -> Vec<Check> {
    let mut rng = stream_rng(505, 0);
    let mut worst = 0.0f64;
    for (preset, lines, offset) in [(ArrayPreset::Square { side: 2.0 }, 4, 0.0), (ArrayPreset::Hexagon { radius: 1.0 }, 6, 0.5)] {
        let array = preset_array(&preset).unwrap();
        let k = mirror_charge_probe(&array);
        for eta in [0.5, 1.0, 2.0] {
            let model = FieldModel::InversePower { eta };
            for _ in 0..1000 {
                let j = rng.random_range(0..lines);
                let a = std::f64::consts::TAU * (j as f64 + offset) / lines as f64;
                let d = rng.random_range(0.05..10.0);
                let n = sampling_vector(&model, &Position::xy(d * a.cos(), d * a.sin()), &array).unwrap();
                worst = worst.max(n.dot(k.as_vector()).abs() / n.as_vector().norm());
            }
        }
    }
    vec![check(format!("max relative <n,k> on mirror lines {worst:.1e} <= 1e-10"), worst <= 1e-10)]
}

fn c6_heisenberg() -> Vec<Check> {
    // no noise: the DFS probe is k = s/||s||_inf; signal two line lengths away
    let model = FieldModel::coulomb();
    let t = 2.0;
    let (mut x, mut y) = (vec![], vec![]);
    for n in (20..=200).step_by(20) {
        let array = preset_array(&ArrayPreset::Line {
            n,
            from: -1.0,
            to: 1.0,
            dim: 1,
        })
        .unwrap();
        let s = sampling_vector(&model, &Position::x(-3.0), &array).unwrap();
        let k = design_probe(&s, &InsensitiveSubspace::empty(n)).unwrap();
        x.push((n as f64).ln());
        y.push(qfi(&s, &k, t, Complex64::new(1.0, 0.0)).ln());
    }
    let fit = fit_line(&x, &y).unwrap();
    vec![check(format!("exponent {:.4} in 2.00 +- 0.05", fit.slope), (fit.slope - 2.0).abs() <= 0.05)]
}

fn c7_kappa() -> Vec<Check> {
    timed(Duration::from_secs(300), || {
        let mut out = vec![];
        for name in ["fig4_scaling", "appendixA_line"] {
            let cfg = preset(name).unwrap();
            let sec = cfg.scaling.clone().unwrap();
            let setup = ScalingSetup {
                model: cfg.signal_field,
                geometry: sec.geometry,
                signal: cfg.signal,
                noise_area: sec.noise_area,
                sigma: 1.0,
                search: sec.search,
            };
            let r = scaling_study(&setup, &sec.m_range, &sec.surplus).unwrap();
            if name == "fig4_scaling" {
                out.push(check(
                    format!("{name}: kappa {:.2} in [14, 26], R^2 {:.3} > 0.9", r.kappa, r.fit_r2),
                    (14.0..=26.0).contains(&r.kappa) && r.fit_r2 > 0.9,
                ));
            } else {
                out.push(check(format!("{name}: kappa {:.2} in (3, 25)", r.kappa), r.kappa > 3.0 && r.kappa < 25.0));
            }
            let loo = r.kappa_leave_one_out.iter().map(|k| (k - r.kappa).abs() / r.kappa).fold(0.0, f64::max);
            out.push(check(format!("{name}: leave-one-out change {:.1}% < 15%", 100.0 * loo), loo < 0.15));
        }
        out
    })
}

fn c8_optimal_time() -> Vec<Check> {
    let model = FieldModel::coulomb();
    let mut worst = 0.0f64;
    for case in 0..10u64 {
        let mut rng = stream_rng(808, case);
        let array = SensorArray::new((0..4).map(|_| random_xy(&mut rng, 0.2, 1.0)).collect()).unwrap();
        let s = sampling_vector(&model, &random_xy(&mut rng, 1.5, 2.0), &array).unwrap();
        let pos = random_xy(&mut rng, 3.0, 5.0);
        let n = sampling_vector(&model, &pos, &array).unwrap();
        let k = ProbeState::from_slice(&(0..4).map(|i| if i == 0 { 1.0 } else { rng.random_range(-1.0..1.0) }).collect::<Vec<_>>()).unwrap();
        let sigma = rng.random_range(0.5..5.0);
        let dist = NoiseDistribution::FixedPositionGaussianStrength {
            position: pos,
            strength: StrengthLaw::centered(sigma),
        };
        let phases = phase_samples(&dist, &model, &array, &k, 1, 0, Estimator::Conditional).unwrap();
        let t_o = qfi_rate_and_topt(&s, &n, &k, sigma).unwrap().t_opt;
        let rate = |t: f64| qfi(&s, &k, t, phases.decoherence(t).value()) / t;
        // in log t; far past t_o the rate underflows to exactly zero
        let (u, _) = golden_max((t_o / 30.0).ln(), (30.0 * t_o).ln(), 1e-12, 500, |u| rate(u.exp()));
        let t_num = u.exp();
        worst = worst.max((t_num - t_o).abs() / t_o);
    }
    vec![check(format!("max relative argmax error {:.1e} <= 1e-3", worst), worst <= 1e-3)]
}

struct TableRow {
    name: &'static str,
    adfs: f64,
    ghz: f64,
    sep: f64,
}

const TABLE: [TableRow; 4] = [
    TableRow { name: "table1_square_lattice", adfs: 28.0, ghz: 5.0, sep: 443.0 },
    TableRow { name: "table1_direction", adfs: 2.63e4, ghz: 2.33e3, sep: 2.45e4 },
    TableRow { name: "table1_outside", adfs: 1.5e6, ghz: 2.9e4, sep: 9.3e5 },
    TableRow { name: "table1_cylinder", adfs: 1.7e7, ghz: 5.1e3, sep: 7.7e6 },
];

fn table_qfi(name: &str) -> adfs::qfi::QfiReport {
    run_scenario_with(&preset(name).unwrap(), Tasks::NONE.with_qfi()).unwrap().qfi.unwrap()
}

/// aDFS and GHZ columns; `tests/table_separable.rs` also asserts the separable column.
fn c9_table() -> Vec<Check> {
    let mut out = vec![];
    for (i, row) in TABLE.iter().enumerate() {
        let q = table_qfi(row.name);
        if i == 0 {
            out.push(check(format!("{}: F_aDFS {:.2} within 30% of {}", row.name, q.qfi, row.adfs), within(q.qfi, row.adfs, 0.3)));
            out.push(check(
                format!("{}: F_GHZ {:.2} within 30% of {}", row.name, q.baselines.ghz_qfi, row.ghz),
                within(q.baselines.ghz_qfi, row.ghz, 0.3),
            ));
        } else {
            out.push(check(
                format!("{}: F_aDFS {:.3e} within x3 of {:.2e}", row.name, q.qfi, row.adfs),
                within_factor(q.qfi, row.adfs, 3.0),
            ));
            out.push(check(
                format!("{}: F_GHZ {:.3e} within x3 of {:.2e}", row.name, q.baselines.ghz_qfi, row.ghz),
                within_factor(q.baselines.ghz_qfi, row.ghz, 3.0),
            ));
        }
    }
    out
}

fn c9_separable() -> Vec<Check> {
    TABLE
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let sep = table_qfi(row.name).baselines.separable_bound;
            if i == 0 {
                check(format!("{}: F*_SEP {sep:.1} within 10% of {}", row.name, row.sep), within(sep, row.sep, 0.1))
            } else {
                check(format!("{}: F*_SEP {sep:.3e} within x3 of {:.2e}", row.name, row.sep), within_factor(sep, row.sep, 3.0))
            }
        })
        .collect()
}

fn c10_pushforward() -> Vec<Check> {
    let model = FieldModel::coulomb();
    let array = preset_array(&ArrayPreset::Cube3 { edge: 1.0 }).unwrap();
    let array = SensorArray::new(array.positions()[..8].to_vec()).unwrap();
    let mu = SourcePoint::new(1.0, Position::xyz(1.5, 2.0, 1.0));
    let sd = 0.05;
    let sigma = DMatrix::from_diagonal_element(4, 4, sd * sd);
    let image = pushforward_gaussian(&model, &array, &mu, &sigma).unwrap();
    let n = array.len();
    let m = 100_000;
    let draws: Vec<Vec<f64>> = (0..m as u64)
        .map(|i| {
            let mut rng = stream_rng(1010, i);
            let z: [f64; 4] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal) * sd);
            let x = mu.position + Position::xyz(z[1], z[2], z[3]);
            let v = sampling_vector(&model, &x, &array).unwrap();
            v.as_vector().iter().map(|a| (mu.strength + z[0]) * a).collect()
        })
        .collect();
    let mean: Vec<f64> = (0..n).map(|i| draws.iter().map(|d| d[i]).sum::<f64>() / m as f64).collect();
    let mut cov = DMatrix::zeros(n, n);
    for d in &draws {
        for i in 0..n {
            for j in 0..n {
                cov[(i, j)] += (d[i] - mean[i]) * (d[j] - mean[j]);
            }
        }
    }
    cov /= (m - 1) as f64;
    let f_mu = sampling_vector(&model, &mu.position, &array).unwrap();
    let mean_z = (0..n)
        .map(|i| (mean[i] - f_mu.as_vector()[i]).abs() / (cov[(i, i)] / m as f64).sqrt())
        .fold(0.0, f64::max);
    let jac = sampling_map_jacobian(&model, &array, &mu).unwrap();
    let predicted = &jac * &sigma * jac.transpose();
    let cov_err = (0..n * n)
        .map(|e| (cov[e] - predicted[e]).abs() / predicted[e].abs())
        .fold(0.0, f64::max);
    let mut max_rank = 0;
    let mut rng = stream_rng(1011, 0);
    for _ in 0..50 {
        let p = SourcePoint::new(rng.random_range(-2.0..2.0), Position::xyz(rng.random_range(2.0..4.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
        let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        max_rank = max_rank.max(pushforward_gaussian(&model, &array, &p, &(&a * a.transpose())).unwrap().rank(1e-9));
    }
    vec![
        check(format!("mean within {mean_z:.2} <= 3 standard errors of F(mu)"), mean_z <= 3.0),
        check(format!("covariance max entry error {:.2}% <= 5%", 100.0 * cov_err), cov_err <= 0.05),
        check(format!("image rank {} and max over random cases {max_rank} <= 4", image.rank(1e-9)), image.rank(1e-9) <= 4 && max_rank <= 4),
    ]
}

fn c11_full_measure() -> Vec<Check> {
    let array = preset_array(&ArrayPreset::Hexagon { radius: 1.0 }).unwrap();
    let disk = Shape::Ball {
        center: Position::xy(3.0, 0.0),
        radius: 0.5,
    };
    let signal = Position::xy(0.2, -0.3);
    let full = full_measure_rank_check(&FieldModel::coulomb(), &array, &signal, &disk, 1000, 1e-10, 11).unwrap();
    let lin = full_measure_rank_check(&FieldModel::Linear, &array, &signal, &disk, 1000, 1e-10, 11).unwrap();
    vec![
        check(format!("1/r rank {} = 6, residual {:.1e} < 1e-6", full.rank, full.residual), full.rank == 6 && full.residual < 1e-6),
        check(format!("linear rank {} <= 2", lin.rank), lin.rank <= 2),
    ]
}

fn c12_dephasing() -> Vec<Check> {
    let model = FieldModel::coulomb();
    let array = preset_array(&ArrayPreset::Square { side: 2.0 }).unwrap();
    let s = sampling_vector(&model, &Position::xy(2.0, 0.5), &array).unwrap();
    let k = ProbeState::from_slice(&[1.0, -0.4, 0.3, 0.7]).unwrap();
    let (t, d) = (1.3, Complex64::new(0.6, -0.2));
    let base = qfi(&s, &k, t, d);
    let f = |p: Vec<f64>| qfi_with_dephasing(&s, &k, t, d, &DephasingSpec::new(p).unwrap()).unwrap();
    let zero = f(vec![0.0, 0.5, 0.1, 0.2]);
    let clean = f(vec![0.0; 4]);
    let p = vec![0.1, 0.25, 0.05, 0.4];
    let factor: f64 = p.iter().map(|x| 1.0 - 2.0 * x).product();
    let mid = f(p);
    vec![
        check(format!("p = 0.5 on one qubit gives F = {zero}"), zero == 0.0),
        check("p = 0 leaves F unchanged", clean == base),
        check(
            format!("product factor relative error {:.1e} <= 1e-12", (mid - factor * factor * base).abs() / mid),
            (mid - factor * factor * base).abs() <= 1e-12 * mid,
        ),
    ]
}

fn c13_periodic() -> Vec<Check> {
    ["fig5_honeycomb", "fig5_honeycomb_skew"]
        .iter()
        .map(|name| {
            let cfg = preset(name).unwrap();
            let d = adfs::scenario::design(&cfg).unwrap();
            let sec = cfg.phase_sweep.clone().unwrap();
            let r = phase_sweep(&cfg.noise_model(), &d.array, &d.probe, &sec.wavevector, 360, 1e-10).unwrap();
            let want = if *name == "fig5_honeycomb" { PhaseClass::Perfect } else { PhaseClass::Partial };
            check(format!("{name}: {:?} (max <n,k>^2 = {:.1e}), expected {:?}", r.class, r.max_impact, want), r.class == want)
        })
        .collect()
}

fn report(id: usize, title: &str, checks: &[Check]) -> bool {
    let pass = checks.iter().all(|c| c.pass);
    println!("criterion {id:>2} {}: {title}", if pass { "PASS" } else { "FAIL" });
    for c in checks {
        println!("    [{}] {}", if c.pass { "ok" } else { "FAIL" }, c.what);
    }
    pass
}

fn main() {
    let criteria: Vec<(&str, fn() -> Vec<Check>)> = vec![
        ("closed-form decoherence vs Monte Carlo", c1_closed_form_vs_mc),
        ("full-register oracle", c2_brute_force_oracle),
        ("exact DFS", c3_exact_dfs),
        ("Apollonius sphere", c4_apollonius),
        ("mirror charges", c5_mirror_charges),
        ("Heisenberg scaling", c6_heisenberg),
        ("kappa scaling", c7_kappa),
        ("optimal time", c8_optimal_time),
        ("benchmark table", || {
            let mut v = c9_table();
            v.extend(c9_separable());
            v
        }),
        ("Gaussian pushforward", c10_pushforward),
        ("full-measure impossibility", c11_full_measure),
        ("local dephasing", c12_dephasing),
        ("periodic-field DFS", c13_periodic),
    ];
    let mut failed = vec![];
    let mut results = vec![];
    for (i, (title, f)) in criteria.iter().enumerate() {
        let checks = f();
        results.push(report(i + 1, title, &checks));
        // the separable column is asserted in tests/table_separable.rs
        if i + 1 == 9 {
            if !c9_table().iter().all(|c| c.pass) {
                failed.push(9);
            }
        } else if !results[i] {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("criteria failed: {failed:?}");
        std::process::exit(1);
    }
}
