//! Built-in invariant and oracle checks behind the `check` subcommand.

use std::sync::Arc;

use cfield::basis::{BasisTable, Grid};
use cfield::field::ModelParams;
use cfield::gpe::{imaginary_time_ground_state, thomas_fermi_mu, ImaginaryTimeOptions};
use cfield::idealgas::{brute_force_partition, classical_partition, exact_pnex};
use cfield::linalg::{hermitian_eigen, CMatrix};
use cfield::quad::integrate;
use cfield::sampler::{metropolis_accept, run_chain, ChainRng, InitMode, MoveParams, Schedule};
use cfield::Complex64;
use rand::{Rng, SeedableRng};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

fn exact_normalisation(fast: bool) -> CheckOutcome {
    let (n_max, t_max) = if fast { (60, 10) } else { (500, 50) };
    let mut worst: f64 = 0.0;
    for n in 1..=n_max {
        for t in 1..=t_max {
            match exact_pnex(n, t as f64) {
                Ok(d) => worst = worst.max((d.total() - 1.0).abs()),
                Err(e) => return outcome("exact_pnex_normalisation", false, e.to_string()),
            }
        }
    }
    outcome("exact_pnex_normalisation", worst < 1e-12, format!("max |sum - 1| = {worst:e}"))
}

fn partition_closed_form(fast: bool) -> CheckOutcome {
    let atoms: &[f64] = if fast { &[3.0, 500.0] } else { &[1.0, 3.0, 10.0, 500.0] };
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        for &n in atoms {
            for t in [0.5, 1.0, 5.0, 20.0] {
                let (Ok(cf), Ok(bf)) = (classical_partition(n, t, k), brute_force_partition(n, t, k)) else {
                    return outcome("classical_partition_vs_integral", false, format!("K={k} N={n} T={t} failed"));
                };
                worst = worst.max((bf / cf - 1.0).abs());
            }
        }
    }
    outcome("classical_partition_vs_integral", worst < 1e-5, format!("max relative difference {worst:e}"))
}

fn gpe_oracles() -> Vec<CheckOutcome> {
    let opts = ImaginaryTimeOptions::default();
    let ideal = Grid::new(20, 1.5, 4.0)
        .and_then(|g| imaginary_time_ground_state(&ModelParams::new(500.0, 0.0, 0.0, 20)?, &g, opts));
    let strong = Grid::new(83, 1.5, 4.0)
        .and_then(|g| imaginary_time_ground_state(&ModelParams::new(500.0, 1.0, 0.0, 83)?, &g, opts));
    let tf = thomas_fermi_mu(500.0, 1.0).unwrap_or(f64::NAN);
    vec![
        match ideal {
            Ok(gs) => outcome("gpe_ideal_mu", (gs.mu - 0.5).abs() < 1e-6, format!("mu = {}", gs.mu)),
            Err(e) => outcome("gpe_ideal_mu", false, e.to_string()),
        },
        match strong {
            Ok(gs) => outcome("gpe_thomas_fermi_mu", (gs.mu / tf - 1.0).abs() < 0.05, format!("mu = {} vs {tf}", gs.mu)),
            Err(e) => outcome("gpe_thomas_fermi_mu", false, e.to_string()),
        },
    ]
}

fn binomial_acceptance(fast: bool) -> CheckOutcome {
    let trials = if fast { 100_000 } else { 1_000_000 };
    let mut rng = ChainRng::seed_from_u64(2024);
    let hits = (0..trials).filter(|_| metropolis_accept(7.0, 7.0, &mut rng)).count() as f64;
    let p = (-1f64).exp();
    let z = (hits - trials as f64 * p) / (trials as f64 * p * (1.0 - p)).sqrt();
    outcome("acceptance_at_delta_e_equal_t", z.abs() < 3.0, format!("z = {z:.3}"))
}

fn two_mode_stationary(fast: bool) -> CheckOutcome {
    let snapshots = if fast { 5_000 } else { 20_000 };
    let (atoms, t) = (10.0, 4.0);
    let run = || -> cfield::Result<f64> {
        let params = ModelParams::new(atoms, 0.0, t, 1)?;
        let basis = Arc::new(BasisTable::build(1, 1.5, 4.0)?);
        let schedule = Schedule { sweeps: 1_000 + 40 * snapshots, burn_in: 1_000, thinning: 40 };
        let stream = run_chain(params, basis, MoveParams::default(), schedule, 3, InitMode::ThermalRandom)?;
        let mut ys: Vec<f64> = stream.snapshots.iter().map(|s| s.amplitudes()[1].norm_sqr()).collect();
        ys.sort_by(f64::total_cmp);
        let z = integrate(|y| (-y / t).exp(), 0.0, atoms, 1e-13, 0.0);
        let mut gap: f64 = 0.0;
        for (k, y) in ys.iter().enumerate() {
            let exact = integrate(|u| (-u / t).exp(), 0.0, *y, 1e-12, 0.0) / z;
            gap = gap.max((exact - k as f64 / ys.len() as f64).abs()).max((exact - (k + 1) as f64 / ys.len() as f64).abs());
        }
        Ok(gap)
    };
    match run() {
        Ok(gap) => outcome("two_mode_stationary_cdf", gap < 0.02, format!("sup CDF distance {gap:.4}")),
        Err(e) => outcome("two_mode_stationary_cdf", false, e.to_string()),
    }
}

fn eigen_reconstruction() -> CheckOutcome {
    let mut rng = ChainRng::seed_from_u64(77);
    let n = 24;
    let mut a = CMatrix::zeros(n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(rng.random_range(-5.0..5.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let e = match hermitian_eigen(&a) {
        Ok(e) => e,
        Err(err) => return outcome("eigen_reconstruction", false, err.to_string()),
    };
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let r: Complex64 = (0..n).map(|k| e.vectors[k][i] * e.values[k] * e.vectors[k][j].conj()).sum();
            worst = worst.max((r - a[(i, j)]).norm());
        }
    }
    outcome("eigen_reconstruction", worst < 1e-9, format!("max entry error {worst:e}"))
}

pub fn run_checks(fast: bool) -> Vec<CheckOutcome> {
    let mut out = vec![exact_normalisation(fast), partition_closed_form(fast)];
    out.extend(gpe_oracles());
    out.push(binomial_acceptance(fast));
    out.push(two_mode_stationary(fast));
    out.push(eigen_reconstruction());
    out
}
