//! Zero-temperature mean-field ground state by imaginary-time propagation of
//!
//! ```text
//! d psi / d tau = -(-1/2 d^2/dx^2 + x^2/2 + g |psi|^2) psi
//! ```
//!
//! with Strang splitting (potential half step, spectral kinetic step,
//! potential half step) and renormalisation to `N` atoms after each step.
//! The profile is kept real and mirror-symmetric.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::basis::{check_len, Grid};
use crate::field::ModelParams;
use crate::{Error, Result};

/// Ceiling slack so that `mu + T` landing on an integer up to rounding
/// does not add a spurious mode.
const CUTOFF_SLACK: f64 = 1e-9;

/// Relative energy rise tolerated per iteration before the monotone
/// relaxation check fails.
const ENERGY_RISE_TOL: f64 = 1e-11;

/// Smallest step, relative to the requested one, tried before giving up
/// on a monotone energy decrease.
const MIN_STEP_FRACTION: f64 = 1.0 / 1024.0;

const HISTORY_STRIDE: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Laplacian {
    Spectral,
    /// Fourth-order central differences.
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImaginaryTimeOptions {
    pub dtau: f64,
    /// Convergence when `max_i |psi_new - psi_old| < tol` over one step.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ImaginaryTimeOptions {
    fn default() -> Self {
        Self { dtau: 2e-3, tol: 1e-10, max_iter: 1_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub psi: Vec<f64>,
    pub grid: Grid,
    pub atoms: f64,
    pub coupling: f64,
    /// Chemical potential, including the zero-point energy `1/2`.
    pub mu: f64,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl GroundState {
    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p * p).collect()
    }

    /// `mu` measured from the oscillator zero point, the energy origin of
    /// the classical-field functional.
    pub fn mu_above_zero_point(&self) -> f64 {
        self.mu - 0.5
    }
}

struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k2: Vec<f64>,
    buf: Vec<Complex64>,
}

impl Spectral {
    fn new(grid: &Grid) -> Self {
        let m = grid.len();
        let mut planner = FftPlanner::new();
        let dk = 2.0 * std::f64::consts::PI / (m as f64 * grid.spacing());
        let k2 = (0..m)
            .map(|j| {
                let idx = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
                (idx * dk).powi(2)
            })
            .collect();
        Self {
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            k2,
            buf: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    /// Applies `f(k^2)` in Fourier space to a real profile.
    fn apply(&mut self, psi: &mut [f64], f: impl Fn(f64) -> f64) {
        let m = psi.len();
        for (b, &p) in self.buf.iter_mut().zip(psi.iter()) {
            *b = Complex64::new(p, 0.0);
        }
        self.forward.process(&mut self.buf);
        for (b, &k2) in self.buf.iter_mut().zip(&self.k2) {
            *b *= f(k2);
        }
        self.inverse.process(&mut self.buf);
        let inv = 1.0 / m as f64;
        for (p, b) in psi.iter_mut().zip(&self.buf) {
            *p = b.re * inv;
        }
    }

    fn laplacian(&mut self, psi: &[f64]) -> Vec<f64> {
        let mut out = psi.to_vec();
        self.apply(&mut out, |k2| -k2);
        out
    }
}

fn fd_laplacian(psi: &[f64], dx: f64) -> Vec<f64> {
    let m = psi.len();
    let at = |i: isize| if i < 0 || i >= m as isize { 0.0 } else { psi[i as usize] };
    let c = 1.0 / (12.0 * dx * dx);
    (0..m as isize)
        .map(|i| c * (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) + 16.0 * at(i - 1) - at(i - 2)))
        .collect()
}

fn laplacian(psi: &[f64], grid: &Grid, kind: Laplacian) -> Vec<f64> {
    match kind {
        Laplacian::Spectral => Spectral::new(grid).laplacian(psi),
        Laplacian::FiniteDifference => fd_laplacian(psi, grid.spacing()),
    }
}

fn functional(psi: &[f64], lap: &[f64], grid: &Grid, coupling: f64) -> (f64, f64) {
    let mut energy = 0.0;
    let mut mu_num = 0.0;
    for ((&p, &l), &x) in psi.iter().zip(lap).zip(grid.points()) {
        let kin = -0.5 * p * l;
        let pot = 0.5 * x * x * p * p;
        let int = coupling * p.powi(4);
        energy += kin + pot + 0.5 * int;
        mu_num += kin + pot + int;
    }
    (energy * grid.spacing(), mu_num * grid.spacing())
}

/// `mu = int psi (-1/2 psi'' + x^2/2 psi + g psi^3) dx / N`.
pub fn chemical_potential(psi: &[f64], grid: &Grid, coupling: f64, kind: Laplacian) -> Result<f64> {
    check_len(grid.len(), psi.len())?;
    let norm: f64 = psi.iter().map(|p| p * p).sum::<f64>() * grid.spacing();
    let (_, mu_num) = functional(psi, &laplacian(psi, grid, kind), grid, coupling);
    Ok(mu_num / norm)
}

/// Gross-Pitaevskii energy `int (|psi'|^2/2 + x^2 psi^2/2 + g psi^4/2) dx`.
pub fn energy_functional(psi: &[f64], grid: &Grid, coupling: f64, kind: Laplacian) -> Result<f64> {
    check_len(grid.len(), psi.len())?;
    Ok(functional(psi, &laplacian(psi, grid, kind), grid, coupling).0)
}

fn normalize(psi: &mut [f64], atoms: f64, dx: f64) {
    let norm: f64 = psi.iter().map(|p| p * p).sum::<f64>() * dx;
    let s = (atoms / norm).sqrt();
    psi.iter_mut().for_each(|p| *p *= s);
}

fn symmetrize(psi: &mut [f64]) {
    let m = psi.len();
    for i in 0..m / 2 {
        let avg = 0.5 * (psi[i] + psi[m - 1 - i]);
        psi[i] = avg;
        psi[m - 1 - i] = avg;
    }
}

pub fn imaginary_time_ground_state(params: &ModelParams, grid: &Grid, opts: ImaginaryTimeOptions) -> Result<GroundState> {
    params.validate()?;
    if !(opts.dtau > 0.0) {
        return Err(Error::invalid("dtau", format!("{} is not positive", opts.dtau)));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", format!("{} is not positive", opts.tol)));
    }
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let (atoms, g) = (params.atoms, params.coupling);
    let dx = grid.spacing();
    let width = if g > 0.0 { (thomas_fermi_mu(atoms, g)? * 2.0).sqrt() / 2f64.sqrt() } else { 1.0 };
    let width = width.max(1.0);
    let mut psi: Vec<f64> = grid.points().iter().map(|x| (-0.5 * (x / width).powi(2)).exp()).collect();
    normalize(&mut psi, atoms, dx);

    let mut spectral = Spectral::new(grid);
    let potential: Vec<f64> = grid.points().iter().map(|x| 0.5 * x * x).collect();
    let mut energy = functional(&psi, &spectral.laplacian(&psi), grid, g).0;
    let mut history = Vec::new();
    let mut prev = psi.clone();
    let mut residual = f64::INFINITY;

    let mut dtau = opts.dtau;
    let mut it = 0;
    while it < opts.max_iter {
        prev.copy_from_slice(&psi);
        let half = 0.5 * dtau;
        for (p, v) in psi.iter_mut().zip(&potential) {
            *p *= (-(v + g * *p * *p) * half).exp();
        }
        spectral.apply(&mut psi, |k2| (-0.5 * k2 * dtau).exp());
        for (p, v) in psi.iter_mut().zip(&potential) {
            *p *= (-(v + g * *p * *p) * half).exp();
        }
        symmetrize(&mut psi);
        normalize(&mut psi, atoms, dx);

        let e = functional(&psi, &spectral.laplacian(&psi), grid, g).0;
        if e - energy > ENERGY_RISE_TOL * energy.abs().max(1.0) {
            // splitting error overshot the minimum: retry with a shorter step
            psi.copy_from_slice(&prev);
            dtau *= 0.5;
            if dtau < opts.dtau * MIN_STEP_FRACTION {
                return Err(Error::EnergyIncrease { iteration: it + 1, rise: e - energy });
            }
            continue;
        }
        it += 1;
        residual = psi.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        energy = e;
        if it % HISTORY_STRIDE == 0 {
            history.push(residual);
        }
        if residual < opts.tol {
            psi.iter_mut().for_each(|p| *p = p.abs());
            let mu = chemical_potential(&psi, grid, g, Laplacian::Spectral)?;
            let energy = energy_functional(&psi, grid, g, Laplacian::Spectral)?;
            return Ok(GroundState { psi, grid: grid.clone(), atoms, coupling: g, mu, energy, residual, iterations: it });
        }
    }
    Err(Error::NotConverged { iterations: opts.max_iter, last: residual, history })
}

/// Thomas-Fermi estimate `(3 g N / (4 sqrt 2))^(2/3)`.
pub fn thomas_fermi_mu(atoms: f64, coupling: f64) -> Result<f64> {
    if !(coupling > 0.0) {
        return Err(Error::invalid("coupling", "Thomas-Fermi limit needs g > 0"));
    }
    Ok((3.0 * coupling * atoms / (4.0 * 2f64.sqrt())).powf(2.0 / 3.0))
}

/// Highest retained mode `K = ceil(mu + T)`, with `mu` counted from the
/// energy origin of the field functional. `mu = 0` gives `K = T`.
pub fn cutoff_for(temperature: f64, mu: f64) -> Result<usize> {
    if !(temperature >= 0.0) {
        return Err(Error::invalid("temperature", format!("{temperature} is negative")));
    }
    if !(mu >= 0.0) {
        return Err(Error::invalid("mu", format!("{mu} is negative")));
    }
    let k = (mu + temperature - CUTOFF_SLACK).ceil().max(0.0) as usize;
    if k == 0 {
        return Err(Error::DegenerateCutoff);
    }
    Ok(k)
}

/// Cutoff for zero-temperature profile runs, `max(ceil(2 mu), 20)`. The
/// thermal rule at `T = 0` keeps only modes below `mu`, too few to resolve
/// the broadened profile.
pub fn zero_temperature_cutoff(mu: f64) -> Result<usize> {
    if !(mu >= 0.0) {
        return Err(Error::invalid("mu", format!("{mu} is negative")));
    }
    Ok(((2.0 * mu - CUTOFF_SLACK).ceil() as usize).max(MIN_ZERO_TEMPERATURE_CUTOFF))
}

const MIN_ZERO_TEMPERATURE_CUTOFF: usize = 20;
