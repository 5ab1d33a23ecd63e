//! Metropolis sampling of the canonical classical-field ensemble on the
//! shell `sum |alpha_n|^2 = N`.
//!
//! Moves are random SU(2) rotations of a pair of modes `(i, j)`:
//!
//! ```text
//! alpha_i' =  cos(t) alpha_i + e^{ i p} sin(t) alpha_j
//! alpha_j' = -e^{-i p} sin(t) alpha_i + cos(t) alpha_j
//! ```
//!
//! They conserve `|alpha_i|^2 + |alpha_j|^2` exactly, the map `t -> -t`
//! inverts them, and `t`, `p` are drawn symmetrically, so the proposal is
//! symmetric with respect to the uniform measure on the shell.
//!
//! The chain keeps the spatial profile `Psi(x_i)` cached. A move touches two
//! modes, so the new profile is `Psi + d_i phi_i + d_j phi_j` and the
//! interaction energy is re-integrated in one `O(M)` pass.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::basis::BasisTable;
use crate::field::{
    interaction_from_profile, oscillator_energy, total_energy, EnergyBreakdown, FieldConfiguration, ModelParams,
};
use crate::{Error, Result};

pub type ChainRng = ChaCha8Rng;

/// Accepted moves between full resyntheses of the cached profile.
pub const REFRESH_INTERVAL: u64 = 10_000;

const MIN_THETA: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoveParams {
    /// Rotation angles are drawn from `U(-theta_scale, theta_scale)`.
    pub theta_scale: f64,
    /// Relative phases are drawn from `U(-phase_scale, phase_scale)`.
    pub phase_scale: f64,
    pub target_acceptance: f64,
    /// Proposals between adaptation updates during burn-in.
    pub adaptation_interval: u64,
}

impl Default for MoveParams {
    fn default() -> Self {
        Self { theta_scale: 0.1, phase_scale: PI, target_acceptance: 0.5, adaptation_interval: 1000 }
    }
}

impl MoveParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_scale > 0.0 && self.theta_scale <= PI / 2.0) {
            return Err(Error::invalid("theta_scale", format!("{} outside (0, pi/2]", self.theta_scale)));
        }
        if !(self.phase_scale >= 0.0 && self.phase_scale <= PI) {
            return Err(Error::invalid("phase_scale", format!("{} outside [0, pi]", self.phase_scale)));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::invalid("target_acceptance", format!("{} outside (0, 1)", self.target_acceptance)));
        }
        if self.adaptation_interval == 0 {
            return Err(Error::invalid("adaptation_interval", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMode {
    /// `alpha = (sqrt(N), 0, ..., 0)`.
    Ground,
    /// i.i.d. complex Gaussians rescaled onto the shell.
    ThermalRandom,
}

pub fn init_configuration<R: Rng + ?Sized>(params: &ModelParams, mode: InitMode, rng: &mut R) -> FieldConfiguration {
    match mode {
        InitMode::Ground => FieldConfiguration::ground(params.atoms, params.cutoff),
        InitMode::ThermalRandom => {
            let mut cfg = FieldConfiguration::new(
                (0..params.modes())
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect(),
            );
            cfg.rescale_to(params.atoms);
            cfg
        }
    }
}

/// A two-mode SU(2) rotation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
    pub phase: f64,
}

impl Rotation {
    pub fn apply(&self, ai: Complex64, aj: Complex64) -> (Complex64, Complex64) {
        let (s, c) = self.theta.sin_cos();
        let e = Complex64::from_polar(1.0, self.phase);
        (ai * c + e * aj * s, -e.conj() * ai * s + aj * c)
    }

    pub fn inverse(&self) -> Self {
        Self { theta: -self.theta, ..*self }
    }

    pub fn apply_to(&self, config: &mut FieldConfiguration) {
        let a = config.amplitudes_mut();
        let (x, y) = self.apply(a[self.i], a[self.j]);
        a[self.i] = x;
        a[self.j] = y;
    }
}

/// Picks an ordered pair `i != j` uniformly and draws the rotation angles.
pub fn propose_two_mode_rotation<R: Rng + ?Sized>(modes: usize, mp: &MoveParams, rng: &mut R) -> Result<Rotation> {
    propose_with_theta(modes, mp.theta_scale, mp.phase_scale, rng)
}

fn propose_with_theta<R: Rng + ?Sized>(modes: usize, theta_scale: f64, phase_scale: f64, rng: &mut R) -> Result<Rotation> {
    if modes < 2 {
        return Err(Error::FrozenSystem);
    }
    let i = rng.random_range(0..modes);
    let mut j = rng.random_range(0..modes - 1);
    if j >= i {
        j += 1;
    }
    let theta = theta_scale * (2.0 * rng.random::<f64>() - 1.0);
    let phase = phase_scale * (2.0 * rng.random::<f64>() - 1.0);
    Ok(Rotation { i, j, theta, phase })
}

/// Metropolis rule: accept with probability `min(1, exp(-delta / T))`.
pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp()
}

/// Complex profile stored as separate real and imaginary arrays so the
/// per-proposal update vectorises.
#[derive(Clone, Debug, Default)]
struct SplitProfile {
    re: Vec<f64>,
    im: Vec<f64>,
}

const LANES: usize = 8;

impl SplitProfile {
    fn from_complex(psi: &[Complex64]) -> Self {
        Self { re: psi.iter().map(|p| p.re).collect(), im: psi.iter().map(|p| p.im).collect() }
    }

    /// Sets `self = src + di phi_i + dj phi_j` and returns `sum |self|^4`.
    fn shifted_from(&mut self, src: &SplitProfile, di: Complex64, phi_i: &[f64], dj: Complex64, phi_j: &[f64]) -> f64 {
        let m = src.re.len();
        let (re, im) = (&mut self.re[..m], &mut self.im[..m]);
        let (sr, si) = (&src.re[..m], &src.im[..m]);
        let (fi, fj) = (&phi_i[..m], &phi_j[..m]);
        let mut acc = [0.0; LANES];
        let body = m - m % LANES;
        for c in (0..body).step_by(LANES) {
            for l in 0..LANES {
                let k = c + l;
                let vr = sr[k] + di.re * fi[k] + dj.re * fj[k];
                let vi = si[k] + di.im * fi[k] + dj.im * fj[k];
                re[k] = vr;
                im[k] = vi;
                let n = vr * vr + vi * vi;
                acc[l] += n * n;
            }
        }
        for k in body..m {
            let vr = sr[k] + di.re * fi[k] + dj.re * fj[k];
            let vi = si[k] + di.im * fi[k] + dj.im * fj[k];
            re[k] = vr;
            im[k] = vi;
            let n = vr * vr + vi * vi;
            acc[0] += n * n;
        }
        acc.iter().sum()
    }
}

/// A single Markov chain: configuration, cached profile and energy, RNG.
#[derive(Clone, Debug)]
pub struct ChainState {
    params: ModelParams,
    basis: Arc<BasisTable>,
    config: FieldConfiguration,
    // empty when g = 0: the energy then needs no spatial information
    profile: SplitProfile,
    scratch: SplitProfile,
    energy: EnergyBreakdown,
    rng: ChainRng,
    steps: u64,
    accepted: u64,
    accepted_since_refresh: u64,
}

impl ChainState {
    pub fn new(params: ModelParams, basis: Arc<BasisTable>, config: FieldConfiguration, seed: u64) -> Result<Self> {
        Self::with_rng(params, basis, config, ChainRng::seed_from_u64(seed))
    }

    pub fn with_rng(params: ModelParams, basis: Arc<BasisTable>, config: FieldConfiguration, rng: ChainRng) -> Result<Self> {
        params.validate()?;
        crate::basis::check_len(params.modes(), config.modes())?;
        if basis.modes() != params.modes() {
            return Err(Error::LengthMismatch { expected: params.modes(), actual: basis.modes() });
        }
        let mut state = Self {
            params,
            basis,
            config,
            profile: SplitProfile::default(),
            scratch: SplitProfile::default(),
            energy: EnergyBreakdown::new(0.0, 0.0),
            rng,
            steps: 0,
            accepted: 0,
            accepted_since_refresh: 0,
        };
        state.refresh()?;
        Ok(state)
    }

    pub fn config(&self) -> &FieldConfiguration {
        &self.config
    }

    pub fn energy(&self) -> EnergyBreakdown {
        self.energy
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn basis(&self) -> &Arc<BasisTable> {
        &self.basis
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn rng_mut(&mut self) -> &mut ChainRng {
        &mut self.rng
    }

    fn interacting(&self) -> bool {
        self.params.coupling != 0.0
    }

    /// Resynthesises the profile and recomputes the energy from scratch.
    pub fn refresh(&mut self) -> Result<()> {
        if self.interacting() {
            let psi = self.basis.synthesize(self.config.amplitudes())?;
            self.profile = SplitProfile::from_complex(&psi);
            self.scratch = SplitProfile::from_complex(&psi);
            self.energy = EnergyBreakdown::new(
                oscillator_energy(&self.config),
                interaction_from_profile(&psi, self.basis.grid().spacing(), self.params.coupling),
            );
        } else {
            self.energy = EnergyBreakdown::new(oscillator_energy(&self.config), 0.0);
        }
        self.accepted_since_refresh = 0;
        Ok(())
    }

    /// Relative difference between the cached energy and a from-scratch
    /// evaluation.
    pub fn cache_error(&self) -> Result<f64> {
        let fresh = total_energy(&self.config, &self.basis, &self.params)?;
        let scale = fresh.total.abs().max(self.params.atoms);
        Ok((fresh.total - self.energy.total).abs() / scale)
    }

    /// Evaluates a rotation without committing it. Leaves the candidate
    /// profile in `scratch` and returns the candidate energy.
    fn evaluate(&mut self, rot: &Rotation) -> (Complex64, Complex64, EnergyBreakdown) {
        let a = self.config.amplitudes();
        let (ai, aj) = (a[rot.i], a[rot.j]);
        let (ni, nj) = rot.apply(ai, aj);
        let d_osc = rot.i as f64 * (ni.norm_sqr() - ai.norm_sqr()) + rot.j as f64 * (nj.norm_sqr() - aj.norm_sqr());
        let kinetic_potential = self.energy.kinetic_potential + d_osc;
        let interaction = if self.interacting() {
            let (di, dj) = (ni - ai, nj - aj);
            let quartic = self.scratch.shifted_from(&self.profile, di, self.basis.mode(rot.i), dj, self.basis.mode(rot.j));
            0.5 * self.params.coupling * quartic * self.basis.grid().spacing()
        } else {
            0.0
        };
        (ni, nj, EnergyBreakdown::new(kinetic_potential, interaction))
    }

    fn commit(&mut self, rot: &Rotation, ni: Complex64, nj: Complex64, energy: EnergyBreakdown) -> Result<()> {
        let a = self.config.amplitudes_mut();
        a[rot.i] = ni;
        a[rot.j] = nj;
        if self.interacting() {
            std::mem::swap(&mut self.profile, &mut self.scratch);
        }
        self.energy = energy;
        self.accepted += 1;
        self.accepted_since_refresh += 1;
        if self.accepted_since_refresh >= REFRESH_INTERVAL {
            self.refresh()?;
        }
        Ok(())
    }

    /// One Metropolis proposal at the chain's temperature. Returns whether
    /// the move was accepted.
    pub fn metropolis_step(&mut self, mp: &MoveParams) -> Result<bool> {
        let temperature = self.params.temperature;
        if temperature == 0.0 {
            return Err(Error::ZeroTemperature);
        }
        let rot = propose_two_mode_rotation(self.config.modes(), mp, &mut self.rng)?;
        let (ni, nj, candidate) = self.evaluate(&rot);
        let delta = candidate.total - self.energy.total;
        self.steps += 1;
        if !delta.is_finite() {
            return Err(Error::NonFiniteEnergy { delta, step: self.steps });
        }
        if metropolis_accept(delta, temperature, &mut self.rng) {
            self.commit(&rot, ni, nj, candidate)?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Zero-temperature move: accept only strict energy decreases.
    pub fn descent_step(&mut self, theta_scale: f64, phase_scale: f64) -> Result<bool> {
        let rot = propose_with_theta(self.config.modes(), theta_scale, phase_scale, &mut self.rng)?;
        let (ni, nj, candidate) = self.evaluate(&rot);
        let delta = candidate.total - self.energy.total;
        self.steps += 1;
        if !delta.is_finite() {
            return Err(Error::NonFiniteEnergy { delta, step: self.steps });
        }
        if delta < 0.0 {
            self.commit(&rot, ni, nj, candidate)?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Proposals per sweep, `K + 1`.
    pub fn sweep_len(&self) -> u64 {
        self.config.modes() as u64
    }
}

/// Chain length in sweeps (one sweep is `K + 1` proposals).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    /// Total sweeps including burn-in.
    pub sweeps: u64,
    pub burn_in: u64,
    /// Sweeps between retained snapshots.
    pub thinning: u64,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if self.thinning == 0 {
            return Err(Error::invalid("thinning", "must be at least 1"));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::invalid("sweeps", format!("{} does not exceed burn-in {}", self.sweeps, self.burn_in)));
        }
        Ok(())
    }

    pub fn snapshots(&self) -> u64 {
        (self.sweeps - self.burn_in) / self.thinning
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamMeta {
    pub seed: u64,
    pub params: ModelParams,
    pub moves: MoveParams,
    pub schedule: Schedule,
    pub init: InitMode,
    /// Rotation scale after burn-in adaptation (frozen for production).
    pub tuned_theta_scale: f64,
    /// Acceptance fraction over the production window.
    pub acceptance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleStream {
    pub snapshots: Vec<FieldConfiguration>,
    pub energies: Vec<EnergyBreakdown>,
    pub meta: StreamMeta,
}

impl SampleStream {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn atoms(&self) -> f64 {
        self.meta.params.atoms
    }
}

/// Runs one chain. Adapts `theta_scale` toward the target acceptance during
/// burn-in only, then samples with the frozen scale.
pub fn run_chain(
    params: ModelParams,
    basis: Arc<BasisTable>,
    moves: MoveParams,
    schedule: Schedule,
    seed: u64,
    init: InitMode,
) -> Result<SampleStream> {
    moves.validate()?;
    schedule.validate()?;
    if params.temperature == 0.0 {
        return Err(Error::ZeroTemperature);
    }
    let mut rng = ChainRng::seed_from_u64(seed);
    let config = init_configuration(&params, init, &mut rng);
    let mut chain = ChainState::with_rng(params, basis, config, rng)?;
    let sweep = chain.sweep_len();

    let mut mp = moves;
    let mut window_accepts = 0u64;
    let mut window_steps = 0u64;
    let mut updates = 0u64;
    for _ in 0..schedule.burn_in * sweep {
        window_accepts += chain.metropolis_step(&mp)? as u64;
        window_steps += 1;
        if window_steps == mp.adaptation_interval {
            updates += 1;
            let rate = window_accepts as f64 / window_steps as f64;
            let gain = 1.0 / (updates as f64).powf(0.6);
            let theta = mp.theta_scale * (gain * (rate - mp.target_acceptance)).exp();
            mp.theta_scale = theta.clamp(MIN_THETA, PI / 2.0);
            window_accepts = 0;
            window_steps = 0;
        }
    }

    let n_snap = schedule.snapshots() as usize;
    let mut snapshots = Vec::with_capacity(n_snap);
    let mut energies = Vec::with_capacity(n_snap);
    let accepted_before = chain.accepted();
    let steps_before = chain.steps();
    for _ in 0..n_snap {
        for _ in 0..schedule.thinning * sweep {
            chain.metropolis_step(&mp)?;
        }
        snapshots.push(chain.config().clone());
        energies.push(chain.energy());
    }
    let production = (chain.steps() - steps_before).max(1);
    let acceptance = (chain.accepted() - accepted_before) as f64 / production as f64;
    Ok(SampleStream {
        snapshots,
        energies,
        meta: StreamMeta { seed, params, moves, schedule, init, tuned_theta_scale: mp.theta_scale, acceptance },
    })
}

#[derive(Clone, Debug)]
pub struct Minimization {
    pub config: FieldConfiguration,
    pub energy: EnergyBreakdown,
    /// Energy recorded at regular intervals; non-increasing.
    pub history: Vec<f64>,
}

/// Zero-temperature stochastic descent from the oscillator ground state.
/// The rotation scale decays geometrically from `moves.theta_scale` to
/// `1e-4` of it over the run.
pub fn minimize_energy(
    params: ModelParams,
    basis: Arc<BasisTable>,
    moves: MoveParams,
    steps: u64,
    seed: u64,
) -> Result<Minimization> {
    moves.validate()?;
    let config = FieldConfiguration::ground(params.atoms, params.cutoff);
    let mut chain = ChainState::new(params, basis, config, seed)?;
    let mut history = vec![chain.energy().total];
    if params.cutoff == 0 || steps == 0 {
        return Ok(Minimization { config: chain.config().clone(), energy: chain.energy(), history });
    }
    let decay = (1e-4f64).powf(1.0 / steps as f64);
    let record = (steps / 1000).max(1);
    let mut theta = moves.theta_scale;
    for s in 1..=steps {
        chain.descent_step(theta, moves.phase_scale)?;
        theta *= decay;
        if s % record == 0 {
            history.push(chain.energy().total);
        }
    }
    chain.refresh()?;
    Ok(Minimization { config: chain.config().clone(), energy: chain.energy(), history })
}
