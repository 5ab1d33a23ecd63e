//! Exact references for the trapped 1D ideal Bose gas.
//!
//! Quantum canonical ensemble: the probability of `N_ex` excited atoms is
//!
//! ```text
//! P(N_ex) = xi^N_ex * prod_{l = N_ex + 1}^{N} (1 - xi^l),   xi = exp(-1/T)
//! ```
//!
//! Classical fields with modes `0..=K`: the partition function on the shell
//! is `Z = ((1 - xi^N) T)^K / K!`. The excited modes `1..=K` holding `N_ex`
//! atoms contribute `Z_ex = xi^N_ex ((1 - xi^N_ex) T)^(K-1) / (K-1)!`; the
//! factor `xi^N_ex` is the energy `N_ex` of shifting every excited level
//! down by one. The ratio gives the density of `N_ex` on `[0, N]`:
//!
//! ```text
//! p(N_ex) = (K/T) xi^N_ex (1 - xi^N_ex)^(K-1) / (1 - xi^N)^K
//! ```
//!
//! with cumulative distribution `((1 - xi^N_ex) / (1 - xi^N))^K`.
//! Everything is evaluated in log space.

use crate::quad::integrate;
use crate::{Error, Result};

/// Largest cutoff accepted by [`brute_force_partition`].
pub const BRUTE_FORCE_MAX_CUTOFF: usize = 4;

pub fn xi(temperature: f64) -> f64 {
    (-1.0 / temperature).exp()
}

/// `ln(1 - xi^x)` for `xi = exp(-1/T)`, accurate for small `x/T`.
fn ln_one_minus_xi_pow(x: f64, temperature: f64) -> f64 {
    (-(-x / temperature).exp_m1()).ln()
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn check_temperature(temperature: f64) -> Result<()> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::invalid("temperature", format!("{temperature} is not positive")));
    }
    Ok(())
}

/// Discrete quantum distribution of `N_ex` over `0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumDistribution {
    pub atoms: usize,
    pub temperature: f64,
    pub xi: f64,
    pub probabilities: Vec<f64>,
}

impl QuantumDistribution {
    pub fn mean_excited(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn variance_excited(&self) -> f64 {
        let m = self.mean_excited();
        self.probabilities.iter().enumerate().map(|(n, p)| (n as f64 - m).powi(2) * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }
}

pub fn exact_pnex(atoms: usize, temperature: f64) -> Result<QuantumDistribution> {
    if atoms == 0 {
        return Err(Error::invalid("atoms", "need at least one atom"));
    }
    check_temperature(temperature)?;
    // tail[n] = sum_{l = n + 1}^{N} ln(1 - xi^l)
    let mut tail = vec![0.0; atoms + 1];
    for n in (0..atoms).rev() {
        tail[n] = tail[n + 1] + ln_one_minus_xi_pow((n + 1) as f64, temperature);
    }
    let probabilities = (0..=atoms).map(|n| (-(n as f64) / temperature + tail[n]).exp()).collect();
    Ok(QuantumDistribution { atoms, temperature, xi: xi(temperature), probabilities })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CondensateMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of `N_0 = N - N_ex` in the quantum canonical ensemble.
pub fn exact_condensate_moments(atoms: usize, temperature: f64) -> Result<CondensateMoments> {
    let d = exact_pnex(atoms, temperature)?;
    Ok(CondensateMoments { mean: atoms as f64 - d.mean_excited(), variance: d.variance_excited() })
}

pub fn ln_classical_partition(atoms: f64, temperature: f64, cutoff: usize) -> f64 {
    let k = cutoff as f64;
    k * (ln_one_minus_xi_pow(atoms, temperature) + temperature.ln()) - ln_factorial(cutoff)
}

/// Closed-form classical partition function `((1 - xi^N) T)^K / K!`.
pub fn classical_partition(atoms: f64, temperature: f64, cutoff: usize) -> Result<f64> {
    check_temperature(temperature)?;
    if cutoff == 0 {
        return Err(Error::invalid("cutoff", "need at least two modes"));
    }
    Ok(ln_classical_partition(atoms, temperature, cutoff).exp())
}

/// Direct numerical evaluation of the shell integral
/// `int dn_1..dn_K exp(-sum_j j n_j / T)` over `sum_j n_j <= N`,
/// the ground-mode occupation having been fixed by the norm constraint.
///
/// Each nested one-dimensional integral uses the substitution
/// `u = 1 - exp(-j n / T)`, which flattens the exponential weight.
pub fn brute_force_partition(atoms: f64, temperature: f64, cutoff: usize) -> Result<f64> {
    check_temperature(temperature)?;
    if cutoff == 0 {
        return Err(Error::invalid("cutoff", "need at least two modes"));
    }
    if cutoff > BRUTE_FORCE_MAX_CUTOFF {
        return Err(Error::CutoffTooLarge { requested: cutoff, max: BRUTE_FORCE_MAX_CUTOFF });
    }
    Ok(nested_shell_integral(cutoff, atoms, 1.0 / temperature))
}

fn nested_shell_integral(level: usize, remaining: f64, beta: f64) -> f64 {
    if level == 0 {
        return 1.0;
    }
    if remaining <= 0.0 {
        return 0.0;
    }
    let rate = beta * level as f64;
    let top = -(-rate * remaining).exp_m1();
    let inner = |u: f64| {
        let n = -(-u).ln_1p() / rate;
        nested_shell_integral(level - 1, (remaining - n).max(0.0), beta)
    };
    let tol = 1e-11 * 10f64.powi(level as i32 - 1);
    integrate(inner, 0.0, top, tol, 0.0) / rate
}

/// Classical-field density of `N_ex` on `[0, N]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalDistribution {
    pub atoms: f64,
    pub temperature: f64,
    pub cutoff: usize,
    pub xi: f64,
}

impl ClassicalDistribution {
    pub fn density(&self, n_ex: f64) -> f64 {
        if !(0.0..=self.atoms).contains(&n_ex) {
            return 0.0;
        }
        let k = self.cutoff as f64;
        if n_ex == 0.0 && self.cutoff >= 2 {
            return 0.0;
        }
        let ln = (k / self.temperature).ln() - n_ex / self.temperature
            + (k - 1.0) * ln_one_minus_xi_pow(n_ex, self.temperature)
            - k * ln_one_minus_xi_pow(self.atoms, self.temperature);
        ln.exp()
    }

    pub fn cdf(&self, n_ex: f64) -> f64 {
        if n_ex <= 0.0 {
            return 0.0;
        }
        if n_ex >= self.atoms {
            return 1.0;
        }
        let k = self.cutoff as f64;
        (k * (ln_one_minus_xi_pow(n_ex, self.temperature) - ln_one_minus_xi_pow(self.atoms, self.temperature))).exp()
    }

    pub fn on_grid(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&x| self.density(x)).collect()
    }

    /// `int_0^N p dx` by adaptive quadrature; unity up to quadrature error.
    pub fn normalization(&self) -> f64 {
        integrate(|x| self.density(x), 0.0, self.atoms, 1e-12, 0.0)
    }

    /// Density on a uniform grid rescaled so its trapezoid integral is one.
    pub fn renormalized_on_grid(&self, points: &[f64]) -> Vec<f64> {
        let values = self.on_grid(points);
        let area: f64 = points.windows(2).zip(values.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum();
        values.into_iter().map(|v| v / area).collect()
    }

    pub fn mean(&self) -> f64 {
        integrate(|x| x * self.density(x), 0.0, self.atoms, 1e-12, 0.0) / self.normalization()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        integrate(|x| (x - m).powi(2) * self.density(x), 0.0, self.atoms, 1e-12, 0.0) / self.normalization()
    }
}

pub fn classical_pnex(atoms: f64, temperature: f64, cutoff: usize) -> Result<ClassicalDistribution> {
    check_temperature(temperature)?;
    if cutoff < 1 {
        return Err(Error::invalid("cutoff", "need at least one excited mode"));
    }
    if !(atoms > 0.0) {
        return Err(Error::invalid("atoms", format!("{atoms} is not positive")));
    }
    Ok(ClassicalDistribution { atoms, temperature, cutoff, xi: xi(temperature) })
}

pub fn ln_excited_partition(n_ex: f64, temperature: f64, cutoff: usize) -> f64 {
    let k1 = (cutoff - 1) as f64;
    -n_ex / temperature + k1 * (ln_one_minus_xi_pow(n_ex, temperature) + temperature.ln()) - ln_factorial(cutoff - 1)
}

/// Partition function of `N_ex` atoms spread over the excited modes `1..=K`.
pub fn excited_partition(n_ex: f64, temperature: f64, cutoff: usize) -> Result<f64> {
    check_temperature(temperature)?;
    if cutoff < 1 {
        return Err(Error::invalid("cutoff", "need at least one excited mode"));
    }
    Ok(ln_excited_partition(n_ex, temperature, cutoff).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_atom() {
        let d = exact_pnex(1, 2.0).unwrap();
        let x = xi(2.0);
        assert!((d.probabilities[0] - (1.0 - x)).abs() < 1e-15);
        assert!((d.probabilities[1] - x).abs() < 1e-15);
        assert!((d.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_atoms_at_xi_one_half() {
        let t = 1.0 / 2f64.ln();
        let d = exact_pnex(2, t).unwrap();
        for (p, e) in d.probabilities.iter().zip([0.375, 0.375, 0.25]) {
            assert!((p - e).abs() < 1e-14, "{p} vs {e}");
        }
        let m = exact_condensate_moments(2, t).unwrap();
        assert!((m.mean - 1.125).abs() < 1e-14);
        assert!((m.variance - d.variance_excited()).abs() < 1e-15);
    }

    #[test]
    fn ground_state_limit() {
        let d = exact_pnex(50, 0.01).unwrap();
        assert!((d.probabilities[0] - 1.0).abs() < 1e-12);
        let m = exact_condensate_moments(50, 0.01).unwrap();
        assert!((m.mean - 50.0).abs() < 1e-12 && m.variance < 1e-12);
    }

    #[test]
    fn printed_inverse_prefactor_cannot_normalise() {
        // the 1/xi^N_ex variant exceeds one already at N_ex = N
        let (n, t) = (10usize, 3.0);
        let x = xi(t);
        let bad: f64 = (0..=n)
            .map(|k| x.powi(-(k as i32)) * ((k + 1)..=n).map(|l| 1.0 - x.powi(l as i32)).product::<f64>())
            .sum();
        assert!(bad > 1.5);
        assert!((exact_pnex(n, t).unwrap().total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partition_closed_form_examples() {
        let z1 = classical_partition(7.0, 3.0, 1).unwrap();
        assert!((z1 - (1.0 - xi(3.0).powi(7)) * 3.0).abs() < 1e-13);
        let z = classical_partition(3.0, 1.0, 2).unwrap();
        let expected = 0.5 * (1.0 - (-3f64).exp()).powi(2);
        assert!((z - expected).abs() < 1e-14);
        assert!((z - 0.451452).abs() < 1e-5);
        let big = classical_partition(1e6, 5.0, 4).unwrap();
        assert!((big - 5f64.powi(4) / 24.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_examples() {
        let bf = brute_force_partition(3.0, 1.0, 2).unwrap();
        assert!((bf - 0.451452).abs() < 1e-5);
        let bf1 = brute_force_partition(10.0, 5.0, 1).unwrap();
        let cf1 = classical_partition(10.0, 5.0, 1).unwrap();
        assert!((bf1 / cf1 - 1.0).abs() < 1e-6);
        for (n, t) in [(1.0, 0.5), (10.0, 1.0), (500.0, 5.0), (3.0, 20.0)] {
            let bf = brute_force_partition(n, t, 3).unwrap();
            let cf = classical_partition(n, t, 3).unwrap();
            assert!((bf / cf - 1.0).abs() < 1e-5, "N={n} T={t}: {bf} vs {cf}");
        }
        assert!(matches!(brute_force_partition(3.0, 1.0, 5), Err(Error::CutoffTooLarge { .. })));
    }

    #[test]
    fn classical_density_edges() {
        let d = classical_pnex(500.0, 20.0, 20).unwrap();
        assert_eq!(d.density(0.0), 0.0);
        let k1 = classical_pnex(50.0, 4.0, 1).unwrap();
        let x = xi(4.0);
        assert!((k1.density(50.0) - 0.25 * x.powi(50) / (1.0 - x.powi(50))).abs() < 1e-15);
        assert!((d.normalization() - 1.0).abs() < 1e-10);
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(500.0), 1.0);
    }

    #[test]
    fn printed_classical_form_lacks_boltzmann_factor() {
        // without xi^N_ex the curve grows monotonically to 1/(1 - xi^N) at N_ex = N
        let (n, t, k) = (500.0, 20.0, 20.0);
        let x = xi(t);
        let printed = |ne: f64| (1.0 / (1.0 - x.powf(n))) * ((1.0 - x.powf(ne)) / (1.0 - x.powf(n))).powf(k - 1.0);
        let area = integrate(printed, 0.0, n, 1e-10, 0.0);
        assert!(area > 100.0);
        assert!((printed(n) - 1.0 / (1.0 - x.powf(n))).abs() < 1e-12);
    }

    #[test]
    fn excited_partition_ratio_and_limits() {
        let (n, t) = (30.0, 4.0);
        for k in 2..8 {
            let z = classical_partition(n, t, k).unwrap();
            let d = classical_pnex(n, t, k).unwrap();
            for ne in [0.5, 3.0, 17.0, 30.0] {
                let ratio = excited_partition(ne, t, k).unwrap() / z;
                assert!((ratio / d.density(ne) - 1.0).abs() < 1e-12);
            }
        }
        // K = 2, N_ex = N: Z_ex / Z = 2 xi^N / ((1 - xi^N) T)
        let x = xi(t);
        let r = excited_partition(n, t, 2).unwrap() / classical_partition(n, t, 2).unwrap();
        assert!((r - 2.0 * x.powf(n) / ((1.0 - x.powf(n)) * t)).abs() < 1e-15);
    }

    #[test]
    fn excited_partition_against_direct_quadrature() {
        // K = 2: Z_ex(x) = int_0^x exp(-(n1 + 2 (x - n1)) / T) dn1
        let (ne, t) = (6.0, 2.5);
        let direct = integrate(|n1| (-(n1 + 2.0 * (ne - n1)) / t).exp(), 0.0, ne, 1e-13, 0.0);
        assert!((excited_partition(ne, t, 2).unwrap() / direct - 1.0).abs() < 1e-11);
    }

    #[test]
    fn classical_mean_tracks_quantum_mean() {
        for t in [10usize, 20, 30, 40] {
            let q = exact_pnex(500, t as f64).unwrap().mean_excited();
            let c = classical_pnex(500.0, t as f64, t).unwrap().mean();
            assert!((c / q - 1.0).abs() < 0.02, "T={t}: {c} vs {q}");
        }
    }

    #[test]
    fn density_is_unimodal() {
        for (t, k) in [(20.0, 20), (5.0, 2), (40.0, 61), (1.0, 3)] {
            let d = classical_pnex(500.0, t, k).unwrap();
            let xs: Vec<f64> = (0..=5000).map(|i| 500.0 * i as f64 / 5000.0).collect();
            let ys = d.on_grid(&xs);
            let signs: Vec<bool> = ys.windows(2).filter(|w| w[1] != w[0]).map(|w| w[1] > w[0]).collect();
            let changes = signs.windows(2).filter(|s| s[0] != s[1]).count();
            assert!(changes <= 1, "T={t} K={k}: {changes}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn quantum_distribution_normalises(n in 1usize..=1000, t in 0.05f64..100.0) {
            let d = exact_pnex(n, t).unwrap();
            prop_assert!((d.total() - 1.0).abs() < 1e-12);
            prop_assert!(d.probabilities.iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }
}
