use critspectra::ising::{critical_beta2j, simulate, Metropolis, SimConfig, SpinLattice};
use critspectra::series::SeriesData;

fn spins_of(ts: &critspectra::series::TimeSeriesMatrix) -> &[i8] {
    match ts.data() {
        SeriesData::Spins(s) => s,
        SeriesData::Real(_) => unreachable!(),
    }
}

/// Enumerates the 16 states of the periodic 2×2 lattice and compares the
/// visit frequencies of the chain with `exp(-E/𝒯)`, using batch means for
/// the standard errors.
#[test]
fn stationary_distribution_is_boltzmann() {
    let beta2j = 0.6;
    let kernel = Metropolis::from_beta2j(beta2j).unwrap();
    let mut weights = [0.0f64; 16];
    for (code, w) in weights.iter_mut().enumerate() {
        let spins = (0..4).map(|k| if code >> k & 1 == 1 { -1 } else { 1 }).collect();
        let lattice = SpinLattice::from_spins(2, spins, 0).unwrap();
        *w = (-0.5 * beta2j * lattice.energy_units() as f64).exp();
    }
    let z: f64 = weights.iter().sum();

    let mut lattice = SpinLattice::random(2, 2024).unwrap();
    lattice.run_flips(&kernel, 1000);
    let (batches, per_batch) = (100, 10_000);
    let mut batch_freq = vec![[0.0f64; 16]; batches];
    for freq in batch_freq.iter_mut() {
        for _ in 0..per_batch {
            lattice.random_flip(&kernel);
            freq[lattice.state_code() as usize] += 1.0 / per_batch as f64;
        }
    }
    for state in 0..16 {
        let expected = weights[state] / z;
        let means: Vec<f64> = batch_freq.iter().map(|f| f[state]).collect();
        let mean = means.iter().sum::<f64>() / batches as f64;
        let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
        let se = (var / batches as f64).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "state {state}: {mean} vs {expected} (se {se})"
        );
    }
}

#[test]
fn accumulated_energy_change_matches_totals() {
    for (seed, beta2j) in [(1, 0.2), (2, critical_beta2j()), (3, 1.5)] {
        let mut lattice = SpinLattice::random(12, seed).unwrap();
        let kernel = Metropolis::from_beta2j(beta2j).unwrap();
        let before = lattice.energy_units();
        let delta = lattice.run_flips(&kernel, 200_000);
        assert_eq!(lattice.energy_units() - before, delta);
    }
}

#[test]
fn sign_flipped_start_gives_sign_flipped_trajectory() {
    let kernel = Metropolis::from_beta2j(0.3).unwrap();
    let mut a = SpinLattice::random(16, 5).unwrap();
    let mut b = a.clone();
    b.invert();
    for _ in 0..50 {
        a.run_flips(&kernel, 2560);
        b.run_flips(&kernel, 2560);
        assert!(a.spins().iter().zip(b.spins()).all(|(x, y)| *x == -*y));
    }
}

#[test]
fn recording_is_deterministic_and_ordered() {
    let config = SimConfig::new(6, 0.7, 5, 31).with_equilibration(3);
    let ts = simulate(&config).unwrap();
    assert_eq!(ts, simulate(&config).unwrap());

    let kernel = Metropolis::from_beta2j(0.7).unwrap();
    let mut lattice = SpinLattice::random(6, 31).unwrap();
    lattice.run_flips(&kernel, 3 * config.flips_per_step);
    let spins = spins_of(&ts);
    for k in 0..5 {
        lattice.run_flips(&kernel, config.flips_per_step);
        for site in 0..36 {
            assert_eq!(spins[site * 5 + k], lattice.spins()[site]);
        }
    }
}

#[test]
fn high_temperature_is_disordered() {
    let config = SimConfig::new(32, 0.001, 5120, 77).with_equilibration(100);
    let ts = simulate(&config).unwrap();
    assert!(ts.mean().abs() < 0.02, "{}", ts.mean());
}

#[test]
fn critical_bond_correlation() {
    let config = SimConfig::new(32, critical_beta2j(), 1000, 78);
    let ts = simulate(&config).unwrap();
    let spins = spins_of(&ts);
    let (side, tau) = (32, 1000);
    let mut total = 0i64;
    for k in 0..tau {
        let at = |i: usize, j: usize| i64::from(spins[((i % side) * side + j % side) * tau + k]);
        for i in 0..side {
            for j in 0..side {
                total += at(i, j) * (at(i + 1, j) + at(i, j + 1));
            }
        }
    }
    let bond = total as f64 / (2 * side * side * tau) as f64;
    assert!((0.6..=0.8).contains(&bond), "{bond}");
}
