use cfield::idealgas::{brute_force_partition, classical_partition, exact_condensate_moments, exact_pnex, xi};

/// Boltzmann weight of every nondecreasing tuple of `atoms` level indices
/// below `levels`, grouped by how many atoms sit above the ground level.
fn enumerate(atoms: usize, levels: usize, x: f64) -> Vec<f64> {
    fn rec(left: usize, lowest: usize, levels: usize, energy: usize, excited: usize, x: f64, out: &mut [f64]) {
        if left == 0 {
            out[excited] += x.powi(energy as i32);
            return;
        }
        for n in lowest..levels {
            rec(left - 1, n, levels, energy + n, excited + (n > 0) as usize, x, out);
        }
    }
    let mut out = vec![0.0; atoms + 1];
    rec(atoms, 0, levels, 0, 0, x, &mut out);
    let z: f64 = out.iter().sum();
    out.iter().map(|w| w / z).collect()
}

#[test]
fn exact_distribution_matches_microstate_enumeration() {
    for atoms in 1..=4 {
        for t in [0.3, 0.5, 1.0, 2.0] {
            let x = xi(t);
            let levels = (40.0 * t).ceil() as usize + 1;
            let direct = enumerate(atoms, levels, x);
            let closed = exact_pnex(atoms, t).unwrap();
            for (a, b) in direct.iter().zip(&closed.probabilities) {
                assert!((a - b).abs() < 1e-10, "N={atoms} T={t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn exact_distribution_normalises_over_the_full_range() {
    for atoms in 1..=500 {
        for t in 1..=50 {
            let total = exact_pnex(atoms, t as f64).unwrap().total();
            assert!((total - 1.0).abs() < 1e-12, "N={atoms} T={t}: {total}");
        }
    }
}

#[test]
fn condensate_moments_from_distribution() {
    let d = exact_pnex(500, 20.0).unwrap();
    let m = exact_condensate_moments(500, 20.0).unwrap();
    assert!((m.mean - (500.0 - d.mean_excited())).abs() < 1e-9);
    assert!((m.variance - d.variance_excited()).abs() < 1e-7);
    // large-N ideal gas: <N_ex> close to T ln(T) plus Euler's constant
    let grand = 20.0 * (20f64.ln() + 0.5772);
    assert!((d.mean_excited() / grand - 1.0).abs() < 0.05);
}

#[test]
fn newton_formula_against_direct_integral() {
    for k in 1..=4 {
        for n in [1.0, 3.0, 10.0, 500.0] {
            for t in [0.5, 1.0, 5.0, 20.0] {
                let cf = classical_partition(n, t, k).unwrap();
                let bf = brute_force_partition(n, t, k).unwrap();
                assert!((bf / cf - 1.0).abs() < 1e-5, "K={k} N={n} T={t}: {bf} vs {cf}");
            }
        }
    }
}
