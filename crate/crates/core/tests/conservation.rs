use fraclog::datum::{gaussian, random_bandlimited, BandlimitedSpec};
use fraclog::integrator::{evolve, step};
use fraclog::observables::mass;
use fraclog::{CouplingConstant, FractionalOrder, Grid32, Grid64, Params32, Params64, RegularizationLevel, Scheme};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(s: f64, lambda: f64, eps: f64, scheme: Scheme) -> Params64 {
    Params64::new(
        FractionalOrder::new(s).unwrap(),
        CouplingConstant::new(lambda).unwrap(),
        RegularizationLevel::new(eps).unwrap(),
        1e-3,
        1.0,
        scheme,
        100,
    )
    .unwrap()
}

#[test]
fn linear_flow_mass_over_1000_steps() {
    let grid = Grid64::new(1, 256, 32.0).unwrap();
    let phi = gaussian(&grid, 1.0, [0.0; 2], [0.0; 2]).unwrap();
    let traj = evolve(&phi, &params(0.5, 0.0, 0.1, Scheme::Strang)).unwrap();
    let m0 = traj.series[0].mass;
    for r in &traj.series {
        assert!((r.mass - m0).abs() / m0 < 1e-12);
    }
    assert_eq!(traj.times.len(), 11);
}

#[test]
fn per_step_mass_on_random_fields() {
    let grid = Grid64::new(1, 256, 32.0).unwrap();
    let spec = BandlimitedSpec::for_grid(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (i, (s, lambda, eps)) in [(0.3, 1.0, 0.0), (0.7, -2.0, 0.5), (1.0, 0.5, 1e-3)]
        .into_iter()
        .enumerate()
    {
        let u = random_bandlimited(&grid, &spec, &mut rng).unwrap();
        let scheme = if i % 2 == 0 { Scheme::Lie } else { Scheme::Strang };
        let v = step(&u, &params(s, lambda, eps, scheme)).unwrap();
        assert!((mass(&v) - mass(&u)).abs() / mass(&u) < 1e-13);
    }
}

#[test]
fn single_precision_runs() {
    let grid = Grid32::new(1, 256, 32.0).unwrap();
    let phi = gaussian(&grid, 1.0f32, [0.0; 2], [0.0; 2]).unwrap();
    let p = Params32::new(
        FractionalOrder::new(0.5).unwrap(),
        CouplingConstant::new(-1.0).unwrap(),
        RegularizationLevel::new(0.1).unwrap(),
        0.01,
        0.5,
        Scheme::Strang,
        10,
    )
    .unwrap();
    let traj = evolve(&phi, &p).unwrap();
    let m0 = traj.series[0].mass;
    assert!((traj.series.last().unwrap().mass - m0).abs() / m0 < 1e-4);
}
