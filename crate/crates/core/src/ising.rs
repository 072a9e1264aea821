//! 2-D Ising model on a periodic square lattice with single-spin Metropolis
//! dynamics.
//!
//! Energies are tracked as integers in units of the coupling `J`: a lattice
//! with bond sum `B = Σ σ_i σ_j` over the `2L²` nearest-neighbour bonds has
//! energy `-J·B`. Flipping spin `σ` with neighbour sum `h` changes the energy
//! by `ΔU = 2Jσh`.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::rng::{below, rng_from_seed, unit_f64, SimRng};
use crate::series::TimeSeriesMatrix;

/// Largest `N·τ` the simulator will allocate for a recording.
pub const MAX_SERIES_ENTRIES: u128 = 1 << 33;

/// Default number of discarded time steps.
pub const DEFAULT_EQUILIBRATION_STEPS: u64 = 10_000;

/// `2J/𝒯` at the critical point, `ln(1 + √2)`.
pub fn critical_beta2j() -> f64 {
    (1.0 + SQRT_2).ln()
}

/// Critical temperature `𝒯_c = 2J / ln(1 + √2)`.
pub fn critical_temperature(coupling: f64) -> Result<f64> {
    if !(coupling > 0.0 && coupling.is_finite()) {
        return Err(Error::domain(format!(
            "coupling must be positive, got {coupling}"
        )));
    }
    Ok(2.0 * coupling / critical_beta2j())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Lattice side `L`.
    pub side: usize,
    /// Coupling `J`.
    pub coupling: f64,
    /// Dimensionless inverse temperature `2J/𝒯`; zero means infinite temperature.
    pub beta2j: f64,
    pub seed: u64,
    pub equilibration_steps: u64,
    /// Number of recorded time steps.
    pub tau: usize,
    pub flips_per_step: u64,
}

impl SimConfig {
    /// Config with `J = 1`, the default burn-in and `10·L²` flips per step.
    pub fn new(side: usize, beta2j: f64, tau: usize, seed: u64) -> Self {
        Self {
            side,
            coupling: 1.0,
            beta2j,
            seed,
            equilibration_steps: DEFAULT_EQUILIBRATION_STEPS,
            tau,
            flips_per_step: 10 * (side * side) as u64,
        }
    }

    pub fn with_equilibration(mut self, steps: u64) -> Self {
        self.equilibration_steps = steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.side < 2 {
            return Err(Error::domain("lattice side must be at least 2"));
        }
        if self.side > u32::MAX as usize / self.side {
            return Err(Error::Capacity {
                what: "lattice",
                requested: (self.side as u128).pow(2),
                limit: u128::from(u32::MAX),
            });
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(Error::domain("coupling must be positive"));
        }
        if !(self.beta2j >= 0.0 && self.beta2j.is_finite()) {
            return Err(Error::domain("beta2j must be finite and non-negative"));
        }
        if self.tau < 1 {
            return Err(Error::domain("tau must be at least 1"));
        }
        if self.flips_per_step < 1 {
            return Err(Error::domain("flips_per_step must be at least 1"));
        }
        let entries = (self.side as u128).pow(2) * self.tau as u128;
        if entries > MAX_SERIES_ENTRIES {
            return Err(Error::Capacity {
                what: "time series",
                requested: entries,
                limit: MAX_SERIES_ENTRIES,
            });
        }
        Ok(())
    }

    /// `𝒯 = 2J / beta2j`, infinite when `beta2j = 0`.
    pub fn temperature(&self) -> f64 {
        if self.beta2j == 0.0 {
            f64::INFINITY
        } else {
            2.0 * self.coupling / self.beta2j
        }
    }
}

/// `L × L` spins with periodic boundaries and their own random stream.
#[derive(Debug, Clone)]
pub struct SpinLattice {
    side: usize,
    spins: Vec<i8>,
    neighbors: Vec<[u32; 4]>,
    rng: SimRng,
}

impl SpinLattice {
    /// Uniformly random spins drawn from `seed`; the same stream then drives
    /// the dynamics.
    pub fn random(side: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let n = checked_sites(side)?;
        let spins = (0..n)
            .map(|_| if rng.next_u32_bit() { 1 } else { -1 })
            .collect();
        Ok(Self::assemble(side, spins, rng))
    }

    /// Explicit configuration (row-major) with a dynamics stream from `seed`.
    pub fn from_spins(side: usize, spins: Vec<i8>, seed: u64) -> Result<Self> {
        let n = checked_sites(side)?;
        if spins.len() != n {
            return Err(Error::domain(format!(
                "expected {n} spins, got {}",
                spins.len()
            )));
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("spins must be -1 or +1"));
        }
        Ok(Self::assemble(side, spins, rng_from_seed(seed)))
    }

    pub fn uniform(side: usize, spin: i8, seed: u64) -> Result<Self> {
        let n = checked_sites(side)?;
        Self::from_spins(side, vec![spin; n], seed)
    }

    fn assemble(side: usize, spins: Vec<i8>, rng: SimRng) -> Self {
        let at = |i: usize, j: usize| (i * side + j) as u32;
        let neighbors = (0..side * side)
            .map(|site| {
                let (i, j) = (site / side, site % side);
                [
                    at((i + 1) % side, j),
                    at((i + side - 1) % side, j),
                    at(i, (j + 1) % side),
                    at(i, (j + side - 1) % side),
                ]
            })
            .collect();
        Self {
            side,
            spins,
            neighbors,
            rng,
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn sites(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn spin(&self, i: usize, j: usize) -> i8 {
        self.spins[(i % self.side) * self.side + j % self.side]
    }

    /// The four neighbours of `site`: down, up, right, left.
    pub fn neighbors(&self, site: usize) -> [usize; 4] {
        self.neighbors[site].map(|n| n as usize)
    }

    fn neighbor_sum(&self, site: usize) -> i32 {
        self.neighbors[site]
            .iter()
            .map(|&n| i32::from(self.spins[n as usize]))
            .sum()
    }

    /// Energy change, in units of `J`, of flipping `site`.
    pub fn flip_delta_units(&self, site: usize) -> i32 {
        2 * i32::from(self.spins[site]) * self.neighbor_sum(site)
    }

    /// Sum of `σ_i σ_j` over the `2L²` bonds of the torus.
    pub fn bond_sum(&self) -> i64 {
        (0..self.sites())
            .map(|site| {
                let [down, _, right, _] = self.neighbors[site];
                let s = i64::from(self.spins[site]);
                s * i64::from(self.spins[down as usize]) + s * i64::from(self.spins[right as usize])
            })
            .sum()
    }

    /// Energy in units of `J`.
    pub fn energy_units(&self) -> i64 {
        -self.bond_sum()
    }

    pub fn magnetization(&self) -> f64 {
        self.spins.iter().map(|&s| i64::from(s)).sum::<i64>() as f64 / self.sites() as f64
    }

    /// Mean of `σ_i σ_j` over nearest-neighbour bonds.
    pub fn bond_correlation(&self) -> f64 {
        self.bond_sum() as f64 / (2 * self.sites()) as f64
    }

    /// Encodes the configuration as a bit pattern (bit set for spin -1).
    /// Only meaningful for lattices with at most 64 sites.
    pub fn state_code(&self) -> u64 {
        self.spins
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &s)| if s < 0 { acc | 1 << k } else { acc })
    }

    /// Flips every spin; the random stream is untouched.
    pub fn invert(&mut self) {
        for s in &mut self.spins {
            *s = -*s;
        }
    }

    /// One Metropolis proposal at a uniformly chosen site.
    pub fn random_flip(&mut self, kernel: &Metropolis) -> bool {
        let n = self.sites() as u32;
        let site = below(&mut self.rng, n) as usize;
        self.flip_at(site, kernel)
    }

    /// One Metropolis proposal at `site`, returning whether it was accepted.
    pub fn flip_at(&mut self, site: usize, kernel: &Metropolis) -> bool {
        let delta = self.flip_delta_units(site);
        let accept = delta <= 0 || {
            let p = kernel.acceptance(delta);
            p >= 1.0 || unit_f64(&mut self.rng) < p
        };
        if accept {
            self.spins[site] = -self.spins[site];
        }
        accept
    }

    /// `count` proposals at random sites; returns the accumulated energy
    /// change in units of `J`.
    pub fn run_flips(&mut self, kernel: &Metropolis, count: u64) -> i64 {
        let n = self.sites() as u32;
        let mut delta_total = 0i64;
        for _ in 0..count {
            let site = below(&mut self.rng, n) as usize;
            let delta = self.flip_delta_units(site);
            if delta <= 0 || {
                let p = kernel.acceptance(delta);
                p >= 1.0 || unit_f64(&mut self.rng) < p
            } {
                self.spins[site] = -self.spins[site];
                delta_total += i64::from(delta);
            }
        }
        delta_total
    }
}

fn checked_sites(side: usize) -> Result<usize> {
    if side < 2 {
        return Err(Error::domain("lattice side must be at least 2"));
    }
    side.checked_mul(side)
        .filter(|&n| n <= u32::MAX as usize)
        .ok_or(Error::Capacity {
            what: "lattice",
            requested: (side as u128).pow(2),
            limit: u128::from(u32::MAX),
        })
}

trait BitDraw {
    fn next_u32_bit(&mut self) -> bool;
}

impl BitDraw for SimRng {
    fn next_u32_bit(&mut self) -> bool {
        use rand::RngCore;
        self.next_u32() >> 31 == 1
    }
}

/// Metropolis acceptance `min(1, exp(-ΔU/𝒯))` tabulated for the only two
/// positive energy changes on the square lattice, `4J` and `8J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metropolis {
    table: [f64; 2],
}

impl Metropolis {
    /// Kernel at temperature `𝒯`; `f64::INFINITY` accepts every proposal.
    pub fn new(coupling: f64, temperature: f64) -> Result<Self> {
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::domain("coupling must be positive"));
        }
        if !(temperature >= 0.0) {
            return Err(Error::domain("temperature must be non-negative"));
        }
        let beta_j = coupling / temperature;
        Ok(Self {
            table: [(-4.0 * beta_j).exp(), (-8.0 * beta_j).exp()],
        })
    }

    pub fn from_beta2j(beta2j: f64) -> Result<Self> {
        if !(beta2j >= 0.0 && beta2j.is_finite()) {
            return Err(Error::domain("beta2j must be finite and non-negative"));
        }
        Ok(Self {
            table: [(-2.0 * beta2j).exp(), (-4.0 * beta2j).exp()],
        })
    }

    /// Acceptance probability for a positive energy change in units of `J`.
    #[inline]
    pub fn acceptance(&self, delta_units: i32) -> f64 {
        match delta_units {
            i32::MIN..=0 => 1.0,
            4 => self.table[0],
            8 => self.table[1],
            _ => unreachable!("square-lattice energy change {delta_units}"),
        }
    }
}

/// Proposes flipping `site` at temperature `𝒯` and applies the outcome.
pub fn metropolis_flip(
    lattice: &mut SpinLattice,
    site: usize,
    coupling: f64,
    temperature: f64,
) -> Result<bool> {
    if site >= lattice.sites() {
        return Err(Error::domain(format!("site {site} out of range")));
    }
    let kernel = Metropolis::new(coupling, temperature)?;
    Ok(lattice.flip_at(site, &kernel))
}

/// `H = -J Σ σ_i σ_j` over distinct nearest-neighbour pairs.
pub fn total_energy(lattice: &SpinLattice, coupling: f64) -> f64 {
    coupling * lattice.energy_units() as f64
}

/// Runs burn-in then records the full lattice after each of `tau` time steps.
///
/// Row `s` of the result is the history of site `s`; column `k` is the state
/// after `(equilibration_steps + k + 1) · flips_per_step` flips.
pub fn simulate(config: &SimConfig) -> Result<TimeSeriesMatrix> {
    config.validate()?;
    let mut lattice = SpinLattice::random(config.side, config.seed)?;
    let kernel = Metropolis::from_beta2j(config.beta2j)?;
    for _ in 0..config.equilibration_steps {
        lattice.run_flips(&kernel, config.flips_per_step);
    }
    let n = lattice.sites();
    let tau = config.tau;
    let mut data = vec![0i8; n * tau];
    for k in 0..tau {
        lattice.run_flips(&kernel, config.flips_per_step);
        for (site, &s) in lattice.spins().iter().enumerate() {
            data[site * tau + k] = s;
        }
    }
    TimeSeriesMatrix::from_spins(n, tau, data, (0..n).collect(), Some(config.side))
}
