use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scissortruss::optimize::geometry::MassModel;
use scissortruss::optimize::nn::CurveFit;
use scissortruss::optimize::{
    central_difference, ga_optimize, optimize_geometry, sqp_refine, Architecture, FnObjective, GaConfig,
    GeometryProblem, Objective, RefineConfig,
};

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn rosenbrock(x: &[f64]) -> f64 {
    (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
}

#[test]
fn ga_beats_random_search_on_sphere() {
    let cfg = GaConfig {
        population_size: 50,
        generations: 200,
        stall_generation_limit: 1000,
        seed: 3,
        ..GaConfig::default()
    };
    let ga = ga_optimize(sphere, 5, &cfg).unwrap();
    assert!(ga.best_fitness <= 1e-2, "GA best {}", ga.best_fitness);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let random_best = (0..ga.evaluations)
        .map(|_| {
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-cfg.init_range..cfg.init_range)).collect();
            sphere(&x)
        })
        .fold(f64::INFINITY, f64::min);
    assert!(ga.best_fitness < random_best, "GA {} vs random {random_best}", ga.best_fitness);
}

#[test]
fn sqp_solves_rosenbrock() {
    let f = FnObjective::new(2, rosenbrock);
    let cfg = RefineConfig { fitness_target: 1e-12, ..RefineConfig::default() };
    let r = sqp_refine(&f, &[-1.2, 1.0], &[], &cfg).unwrap();
    assert!(r.fitness <= 1e-8, "fitness {} after {:?}", r.fitness, r.stop);
    assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3);
    assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn curve_fit_gradient_matches_differences() {
    let arch = Architecture::default();
    let t: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
    let y: Vec<f64> = t.iter().map(|v| (3.0 * v).sin()).collect();
    let fit = CurveFit::new(arch, t, y).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let w: Vec<f64> = (0..arch.block_len()).map(|_| rng.random_range(-1.5..1.5)).collect();
        let mut g = vec![0.0; w.len()];
        let mut g_fd = vec![0.0; w.len()];
        fit.gradient(&w, &mut g);
        central_difference(|x| fit.value(x), &w, &mut g_fd);
        let scale = g_fd.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
        for (a, b) in g.iter().zip(&g_fd) {
            assert!((a - b).abs() / scale < 1e-6, "{a} vs {b}");
        }
    }
}

#[test]
fn geometry_optimum_is_locally_optimal() {
    let p = GeometryProblem::default();
    let out = optimize_geometry(&p).unwrap();
    let tol = p.refine.tol_con;
    for dr in [-0.01, -0.005, 0.0, 0.005, 0.01] {
        for ds in [-0.01, -0.005, 0.0, 0.005, 0.01] {
            let r = out.radius * (1.0 + dr);
            let s = out.link_scale * (1.0 + ds);
            if r < p.r_min || r > p.r_max || s < p.scale_min || s > p.scale_max {
                continue;
            }
            let f = p.frequency(r, s).unwrap();
            if f < p.f_lo - tol || f > p.f_hi + tol {
                continue;
            }
            assert!(f >= out.frequency_hz - tol, "({r}, {s}) gives {f} < {}", out.frequency_hz);
        }
    }
}

#[test]
fn geometry_under_constant_mass_reports_flat_objective() {
    let p = GeometryProblem {
        mass_model: MassModel::Constant { mass: 1.0 },
        f_lo: 0.1,
        f_hi: 0.2,
        ..GeometryProblem::default()
    };
    let out = optimize_geometry(&p).unwrap();
    assert!(out.flat_objective && !out.warnings.is_empty());
}
