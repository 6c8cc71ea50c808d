
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scissortruss::geometry::AntennaDesign;
use scissortruss::kinematics::{deployment_profile, Direction, DEFAULT_SLIDER_SPEED};
use scissortruss::optimize::surrogate::{fit_kinematics_surrogate, CurveDataset, SurrogateConfig};
use scissortruss::optimize::{Architecture, Chromosome, GaConfig};

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

#[test]
fn analytic_curves_fit() {
    let unit = AntennaDesign::baseline(true).unit;
    let profile = deployment_profile(&unit, DEFAULT_SLIDER_SPEED, Direction::Deploy, 101).unwrap();
    let ds = CurveDataset::from_profile(&profile, "F").unwrap();
    let fit = fit_kinematics_surrogate(&ds, &SurrogateConfig::default()).unwrap();
    assert!(fit.block_fitness.iter().all(|&e| e <= 1e-4));
    for r in &fit.runs {
        assert!(r.fitness <= r.ga_fitness);
    }
}

#[test]
fn realizable_target_refit() {
    let arch = Architecture::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut w = Chromosome::zeros(arch);
    for g in w.genes.iter_mut() {
        *g = rng.random_range(-2.0..2.0);
    }
    let ds = CurveDataset::from_chromosome(&w, grid(101)).unwrap();
    let fit = fit_kinematics_surrogate(&ds, &SurrogateConfig::default()).unwrap();
    assert!(fit.fitness <= 1e-10, "{:?}", fit.block_fitness);
}

#[test]
fn zero_curves() {
    let t = grid(21);
    let ds = CurveDataset::new(t.clone(), [vec![0.0; 21], vec![0.0; 21], vec![0.0; 21], vec![0.0; 21]]).unwrap();
    let cfg = SurrogateConfig {
        runs: 2,
        ga: GaConfig { generations: 5, ..GaConfig::default() },
        ..SurrogateConfig::default()
    };
    let fit = fit_kinematics_surrogate(&ds, &cfg).unwrap();
    assert!(fit.fitness <= 1e-8);
    assert!(!fit.warnings.is_empty());
}
