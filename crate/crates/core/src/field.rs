//! Field configurations on the fixed-norm shell and the classical energy
//! functional `E = sum_n n |alpha_n|^2 + (g/2) int |Psi|^4 dx`.
//!
//! The oscillator term omits the zero-point energy `N/2`; it is a constant on
//! the shell and does not enter Boltzmann ratios. Add it back when comparing
//! with the Gross-Pitaevskii functional (see [`EnergyBreakdown::with_zero_point`]).

use num_complex::Complex64;

use crate::basis::{check_len, BasisTable};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Total atom number `N`.
    pub atoms: f64,
    /// Contact coupling `g`.
    pub coupling: f64,
    /// Temperature `T`; zero selects minimisation.
    pub temperature: f64,
    /// Highest retained oscillator mode `K`.
    pub cutoff: usize,
}

impl ModelParams {
    pub fn new(atoms: f64, coupling: f64, temperature: f64, cutoff: usize) -> Result<Self> {
        let p = Self { atoms, coupling, temperature, cutoff };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.atoms > 0.0) || !self.atoms.is_finite() {
            return Err(Error::invalid("atoms", format!("{} is not positive", self.atoms)));
        }
        if !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(Error::invalid("coupling", format!("{} is negative", self.coupling)));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid("temperature", format!("{} is negative", self.temperature)));
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.cutoff + 1
    }
}

/// Complex amplitudes `alpha_0..=alpha_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldConfiguration {
    amplitudes: Vec<Complex64>,
}

impl FieldConfiguration {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// All atoms in the oscillator ground state.
    pub fn ground(atoms: f64, cutoff: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        amplitudes[0] = Complex64::new(atoms.sqrt(), 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn modes(&self) -> usize {
        self.amplitudes.len()
    }

    /// `sum_n |alpha_n|^2`.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn occupations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Rescales onto the shell `sum |alpha|^2 = atoms`.
    pub fn rescale_to(&mut self, atoms: f64) {
        let s = (atoms / self.norm()).sqrt();
        for a in &mut self.amplitudes {
            *a *= s;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic_potential: f64,
    pub interaction: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic_potential: f64, interaction: f64) -> Self {
        Self { kinetic_potential, interaction, total: kinetic_potential + interaction }
    }

    /// Total energy including the zero-point term `N/2`, i.e. the
    /// Gross-Pitaevskii energy functional of the same field.
    pub fn with_zero_point(&self, atoms: f64) -> f64 {
        self.total + 0.5 * atoms
    }
}

/// `sum_n n |alpha_n|^2`.
pub fn oscillator_energy(config: &FieldConfiguration) -> f64 {
    config.amplitudes.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum()
}

/// `(g/2) sum_i |Psi(x_i)|^4 dx` for an already synthesised profile.
pub fn interaction_from_profile(profile: &[Complex64], spacing: f64, coupling: f64) -> f64 {
    if coupling == 0.0 {
        return 0.0;
    }
    let quartic: f64 = profile
        .iter()
        .map(|p| {
            let n = p.norm_sqr();
            n * n
        })
        .sum();
    0.5 * coupling * quartic * spacing
}

pub fn interaction_energy(config: &FieldConfiguration, basis: &BasisTable, coupling: f64) -> Result<f64> {
    check_len(basis.modes(), config.modes())?;
    if coupling == 0.0 {
        return Ok(0.0);
    }
    let profile = basis.synthesize(config.amplitudes())?;
    Ok(interaction_from_profile(&profile, basis.grid().spacing(), coupling))
}

pub fn total_energy(config: &FieldConfiguration, basis: &BasisTable, params: &ModelParams) -> Result<EnergyBreakdown> {
    let interaction = interaction_energy(config, basis, params.coupling)?;
    Ok(EnergyBreakdown::new(oscillator_energy(config), interaction))
}

/// Log of the unnormalised canonical weight, `-E/T`.
pub fn boltzmann_log_weight(energy: f64, temperature: f64) -> Result<f64> {
    if temperature == 0.0 {
        return Err(Error::ZeroTemperature);
    }
    if !(temperature > 0.0) {
        return Err(Error::invalid("temperature", format!("{temperature} is negative")));
    }
    Ok(-energy / temperature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn oscillator_energy_examples() {
        let mut a = FieldConfiguration::ground(500.0, 4);
        assert_eq!(oscillator_energy(&a), 0.0);
        a.amplitudes_mut()[0] = c(0.0);
        a.amplitudes_mut()[1] = c(500f64.sqrt());
        assert!((oscillator_energy(&a) - 500.0).abs() < 1e-12);
        let b = FieldConfiguration::new(vec![c(250f64.sqrt()), c(0.0), c(250f64.sqrt()), c(0.0)]);
        assert!((oscillator_energy(&b) - 500.0).abs() < 1e-12);
    }

    #[test]
    fn interaction_of_ground_state() {
        let basis = BasisTable::build(6, 1.5, 4.0).unwrap();
        let a = FieldConfiguration::ground(500.0, 6);
        assert_eq!(interaction_energy(&a, &basis, 0.0).unwrap(), 0.0);
        let e = interaction_energy(&a, &basis, 0.02).unwrap();
        let expected = 0.01 * 500.0 * 500.0 / (2.0 * PI).sqrt();
        assert!((e - expected).abs() < 0.01, "{e} vs {expected}");
        assert!((expected - 997.36).abs() < 0.01);

        let e1 = interaction_energy(&FieldConfiguration::ground(250.0, 6), &basis, 1.0).unwrap();
        let e2 = interaction_energy(&FieldConfiguration::ground(500.0, 6), &basis, 1.0).unwrap();
        assert!((e2 / e1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn interaction_rejects_length_mismatch() {
        let basis = BasisTable::build(6, 1.5, 4.0).unwrap();
        let a = FieldConfiguration::ground(500.0, 3);
        assert!(matches!(interaction_energy(&a, &basis, 1.0), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn log_weight() {
        assert_eq!(boltzmann_log_weight(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(boltzmann_log_weight(20.0, 20.0).unwrap(), -1.0);
        assert!(matches!(boltzmann_log_weight(1.0, 0.0), Err(Error::ZeroTemperature)));
        let (e1, e2, t) = (3.5, 7.25, 2.0);
        let ratio = (boltzmann_log_weight(e2, t).unwrap() - boltzmann_log_weight(e1, t).unwrap()).exp();
        assert!((ratio - (-(e2 - e1) / t).exp()).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 0.0, 1.0, 1).is_err());
        assert!(ModelParams::new(10.0, -1.0, 1.0, 1).is_err());
        assert!(ModelParams::new(10.0, 0.0, -1.0, 1).is_err());
        assert!(ModelParams::new(10.0, 0.0, 0.0, 0).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn energy_symmetries(raw in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 13),
                             theta in 0.0..(2.0 * PI)) {
            let basis = BasisTable::build(12, 1.5, 4.0).unwrap();
            let params = ModelParams::new(100.0, 0.7, 5.0, 12).unwrap();
            let mut cfg = FieldConfiguration::new(raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect());
            prop_assume!(cfg.norm() > 1e-3);
            cfg.rescale_to(100.0);
            let base = total_energy(&cfg, &basis, &params).unwrap();
            prop_assert_eq!(base.total, base.kinetic_potential + base.interaction);
            prop_assert!(base.interaction >= 0.0);

            let phase = Complex64::from_polar(1.0, theta);
            let rotated = FieldConfiguration::new(cfg.amplitudes().iter().map(|a| a * phase).collect());
            let er = total_energy(&rotated, &basis, &params).unwrap();
            prop_assert!((er.total - base.total).abs() <= 1e-10 * base.total.abs());

            let flipped = FieldConfiguration::new(cfg.amplitudes().iter().enumerate()
                .map(|(n, a)| if n % 2 == 0 { *a } else { -a }).collect());
            let ef = interaction_energy(&flipped, &basis, params.coupling).unwrap();
            prop_assert!((ef - base.interaction).abs() <= 1e-10 * base.interaction);
        }
    }
}
