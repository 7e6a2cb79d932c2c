use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relfrac_core::grid::{embed_centered, GridField, GridSpec};
use relfrac_core::kernels::{ComparisonKernel, ComparisonKernelSpec, DEFAULT_TIME_NODES};
use relfrac_core::operator::hs_norm;
use relfrac_core::variational::*;

const M: f64 = 1.0;
const S: f64 = 0.3;

fn cubic() -> Nonlinearity {
    Nonlinearity::pure_power(3.0, 1, S).unwrap()
}

fn well() -> PotentialSpec {
    PotentialSpec::new(
        1,
        PotentialShape::GaussianWell { depth: 0.5, width: 1.0 },
        Region::Cube { half_width: 2.0 },
        M,
        S,
    )
    .unwrap()
}

fn plateau() -> PotentialSpec {
    PotentialSpec::new(
        1,
        PotentialShape::Plateau { depth: 0.5, radius: 0.5, width: 1.0 },
        Region::Cube { half_width: 2.5 },
        M,
        S,
    )
    .unwrap()
}

/// Sum of three Gaussian bumps with random centres, widths and amplitudes.
fn random_bumps(g: GridSpec, rng: &mut impl Rng, spread: f64) -> GridField {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-spread..spread), rng.gen_range(0.5..2.0), rng.gen_range(0.2..2.0)))
        .collect();
    GridField::from_fn(g, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| a * (-(x[0] - c) * (x[0] - c) / (w * w)).exp())
            .sum()
    })
    .unwrap()
}

fn min_projected_norm(seed: u64) -> f64 {
    let g = GridSpec::new(1, 20.0, 512).unwrap();
    let pot = well();
    let nl = cubic();
    let pen = PenalizationParams::with_default_kappa(&pot, &nl, M, S, false).unwrap();
    let model = EnergyModel::penalized(g, 0.5, &pot, &pen, nl, M, S).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut least = f64::INFINITY;
    for _ in 0..100 {
        let u = random_bumps(g, &mut rng, 8.0).scaled(rng.gen_range(1e-3..1e3));
        let p = nehari_project(&model, &u).unwrap();
        assert!(p.energy > 0.0, "Nehari point with energy {}", p.energy);
        least = least.min(hs_norm(&p.u, M, S).unwrap());
    }
    least
}

#[test]
fn nehari_points_stay_away_from_zero_with_positive_energy() {
    let a = min_projected_norm(11);
    let b = min_projected_norm(12);
    assert!(a > 0.1 && b > 0.1, "minimum norms {a}, {b}");
    assert!((a / b - 1.0).abs() < 0.5, "minimum norms {a}, {b} disagree");
}

#[test]
fn random_starts_reach_the_same_level() {
    let g = GridSpec::new(1, 20.0, 4096).unwrap();
    let nl = cubic();
    let cfg = SolverConfig::default();
    let reference = ground_state(-0.5, &nl, M, S, g, None, &cfg).unwrap().energy();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let init = random_bumps(g, &mut rng, 5.0);
        let sol = ground_state(-0.5, &nl, M, S, g, Some(&init), &cfg).unwrap();
        let rel = (sol.energy() / reference - 1.0).abs();
        assert!(rel < 1e-6, "level {} vs {reference}", sol.energy());
        assert!(sol.field().min() >= 0.0);
    }
}

#[test]
fn ground_level_increases_with_the_constant_potential() {
    let g = GridSpec::new(1, 20.0, 16384).unwrap();
    let nl = cubic();
    let cfg = SolverConfig::default();
    let levels: Vec<f64> = [-0.5, -0.25, 0.0]
        .iter()
        .map(|&mu| {
            let sol = ground_state(mu, &nl, M, S, g, None, &cfg).unwrap();
            assert!(sol.point.residual < 1e-7);
            assert!(sol.negative_part > -1e-12);
            sol.energy()
        })
        .collect();
    assert!(levels[0] < levels[1] && levels[1] < levels[2], "{levels:?}");
}

#[test]
fn ground_state_decays_at_least_as_fast_as_the_comparison_kernel() {
    let g = GridSpec::new(1, 20.0, 4096).unwrap();
    let sol = ground_state(-0.5, &cubic(), M, S, g, None, &SolverConfig::default()).unwrap();
    let fit = decay_fit(sol.field(), &[0.0], 4.0, 10.0).unwrap();
    assert!(fit.r_squared >= 0.99 && fit.exponential_wins(), "{fit:?}");
    let spec = ComparisonKernelSpec::new(M, S, 0.5, 0.05).unwrap();
    let kernel = ComparisonKernel::on_grid(spec, &GridSpec::new(1, 40.0, 4096).unwrap(), DEFAULT_TIME_NODES).unwrap();
    let samples: Vec<(f64, f64)> = (0..=60).map(|i| 4.0 + 0.1 * i as f64).map(|r| (r, kernel.value(r).ln())).collect();
    let n = samples.len() as f64;
    let (mr, ml) = (
        samples.iter().map(|p| p.0).sum::<f64>() / n,
        samples.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let slope = samples.iter().map(|p| (p.0 - mr) * (p.1 - ml)).sum::<f64>()
        / samples.iter().map(|p| (p.0 - mr) * (p.0 - mr)).sum::<f64>();
    assert!(fit.rate >= 0.9 * -slope, "solution rate {} vs kernel rate {}", fit.rate, -slope);
}

#[test]
fn constant_well_penalization_reproduces_the_ground_state() {
    let g = GridSpec::new(1, 20.0, 1024).unwrap();
    let nl = cubic();
    let pot = PotentialSpec::new(1, PotentialShape::Constant { value: -0.5 }, Region::Everywhere, M, S).unwrap();
    let pen = PenalizationParams::with_default_kappa(&pot, &nl, M, S, false).unwrap();
    let cfg = SolverConfig::default();
    let ground = ground_state(-0.5, &nl, M, S, g, None, &cfg).unwrap();
    for eps in [0.5, 0.2] {
        let sol = solve_penalized(eps, &pot, &pen, &nl, M, S, g, ground.field(), &cfg).unwrap();
        assert!((sol.energy() / ground.energy() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn benchmark_sweep_concentrates_and_respects_the_penalization() {
    let pot = well();
    let nl = cubic();
    let pen = PenalizationParams::with_default_kappa(&pot, &nl, M, S, false).unwrap();
    let cfg = SweepConfig::benchmark(1);
    let rep = epsilon_sweep(&pot, &pen, &nl, M, S, &cfg).unwrap();
    let records: Vec<&SweepRecord> = rep.records().collect();
    assert_eq!(records.len(), 4);
    let mut last_gap = f64::INFINITY;
    for r in &records {
        let gap = r.energy - rep.ground_energy;
        assert!(gap > -1e-6 && gap < last_gap, "eps {} gap {gap}", r.eps);
        last_gap = gap;
        assert!(r.well_distance < r.eps * r.grid.spacing());
        assert!(r.linf <= 2.0 * rep.ground_linf);
        if r.below_switch {
            assert!(r.unpenalized_residual < 1e-6);
        }
        let fit = r.decay.as_ref().unwrap();
        assert!(fit.r_squared >= 0.99 && fit.exponential_wins());
        assert!((r.barycenter[0]).abs() < cfg.delta);
    }
    assert!(records[2].below_switch && records[3].below_switch);
}

#[test]
fn test_functions_recover_the_ground_level_across_the_well_set() {
    let pot = plateau();
    let nl = cubic();
    let pen = PenalizationParams::with_default_kappa(&pot, &nl, M, S, false).unwrap();
    let cfg = SweepConfig::benchmark(1);
    let ground = base_ground_state(&pot, &nl, M, S, &cfg).unwrap();
    for z in [-0.5, -0.25, 0.0, 0.25, 0.5] {
        let (mut gap, mut scale, mut drift) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for &eps in &cfg.eps {
            let grid = cfg.policy.grid_for(eps, &pot).unwrap();
            let w = embed_centered(ground.field(), grid).unwrap();
            let model = EnergyModel::penalized(grid, eps, &pot, &pen, nl, M, S).unwrap();
            let phi = make_phi(&model, &w, &[z], eps, cfg.delta).unwrap();
            let g = phi.energy - ground.energy();
            let t = (phi.scaling - 1.0).abs();
            let d = (barycenter(&phi.u, eps, cfg.rho).unwrap()[0] - z).abs();
            assert!(g >= 0.0 && g < gap, "z {z} eps {eps} gap {g}");
            assert!(t < scale, "z {z} eps {eps} |t - 1| {t}");
            assert!(d < drift || d < 1e-14, "z {z} eps {eps} drift {d}");
            (gap, scale, drift) = (g, t, d);
        }
    }
}
