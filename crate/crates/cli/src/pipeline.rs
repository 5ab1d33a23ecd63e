//! Orchestration: mean-field chemical potential, cutoff, independent chains,
//! merged reductions, and the figure tables.

use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use cfield::analysis::{
    center_fluctuation_with_error, correlation_profile, crossover_temperature, diagonalize, fluctuation_at, fwhm,
    occupation_series, ground_mode_series, occupation_statistics, CondensateDecomposition, CorrelationProfile,
    Crossover, DensityMatrix, FluctuationEstimate, OccupationSeries, OccupationStatistics, SpatialAccumulator,
};
use cfield::basis::{BasisTable, Grid};
use cfield::field::{total_energy, ModelParams};
use cfield::gpe::{
    cutoff_for, imaginary_time_ground_state, thomas_fermi_mu, zero_temperature_cutoff, GroundState,
};
use cfield::idealgas::{classical_pnex, exact_condensate_moments, exact_pnex};
use cfield::sampler::{minimize_energy, run_chain, SampleStream};
use cfield::stats::Histogram;
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};
use crate::table::{ResultTable, TableError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest tolerated `|trace(rho) - N| / N`.
pub const TRACE_TOL: f64 = 1e-8;
/// Largest tolerated eigen-residual relative to `N`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest tolerated drift of the cached energy.
pub const CACHE_TOL: f64 = 1e-7;
/// Largest tolerated norm drift of any snapshot relative to `N`.
pub const NORM_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical: {0}")]
    Numerical(#[from] cfield::Error),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("output: {0}")]
    Io(#[from] TableError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) | RunError::Invariant(_) => 2,
            RunError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Numerical(_) => "numerical",
            RunError::Invariant(_) => "invariant",
            RunError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(TableError::Io(e))
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, RunError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RunError::Invariant(format!("thread pool: {e}")))
}

/// Mean-field ground state at the configured `(N, g)` on a grid wide enough
/// for the Thomas-Fermi profile.
pub fn mean_field(cfg: &RunConfig) -> Result<GroundState, RunError> {
    let probe = if cfg.coupling > 0.0 { zero_temperature_cutoff(thomas_fermi_mu(cfg.atoms, cfg.coupling)?)? } else { 20 };
    let grid = Grid::new(probe, cfg.extent_factor, cfg.oversample)?;
    let params = ModelParams::new(cfg.atoms, cfg.coupling, 0.0, probe)?;
    Ok(imaginary_time_ground_state(&params, &grid, cfg.gpe)?)
}

/// Chemical potential above the oscillator zero point, the energy origin
/// of the field functional.
pub fn field_mu(gs: &GroundState) -> f64 {
    gs.mu_above_zero_point().max(0.0)
}

/// Everything reduced from the chains at one temperature.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub temperature: f64,
    pub cutoff: usize,
    pub mu: f64,
    pub basis: Arc<BasisTable>,
    pub rho_trace: f64,
    pub decomposition: CondensateDecomposition,
    pub series: Vec<OccupationSeries>,
    pub occupation: OccupationStatistics,
    pub ground_mode: OccupationStatistics,
    pub correlation: CorrelationProfile,
    pub center_fluctuation: f64,
    pub center_fluctuation_err: f64,
    pub center_shot_noise_form: f64,
    pub fluctuations: Vec<FluctuationEstimate>,
    pub fwhm_g1: Option<f64>,
    pub fwhm_condensate: Option<f64>,
    pub acceptance: Vec<f64>,
    pub tuned_theta: Vec<f64>,
    pub seeds: Vec<u64>,
    pub max_cache_error: f64,
    pub max_norm_error: f64,
    pub seconds: f64,
}

struct ChainPartial {
    stream: SampleStream,
    rho: DensityMatrix,
    spatial: SpatialAccumulator,
    cache_error: f64,
    norm_error: f64,
}

fn reduce_chain(stream: SampleStream, basis: &BasisTable) -> Result<ChainPartial, RunError> {
    let mut rho = DensityMatrix::new(basis.modes());
    let mut spatial = SpatialAccumulator::new(basis)?;
    let atoms = stream.atoms();
    let mut norm_error: f64 = 0.0;
    for s in &stream.snapshots {
        rho.add(s)?;
        spatial.add_profile(&basis.synthesize(s.amplitudes())?)?;
        norm_error = norm_error.max((s.norm() - atoms).abs() / atoms);
    }
    let cache_error = match (stream.snapshots.last(), stream.energies.last()) {
        (Some(s), Some(e)) => {
            let fresh = total_energy(s, basis, &stream.meta.params)?;
            (fresh.total - e.total).abs() / fresh.total.abs().max(atoms)
        }
        _ => 0.0,
    };
    Ok(ChainPartial { stream, rho, spatial, cache_error, norm_error })
}

/// Samples and reduces one temperature. `point` offsets the chain seeds so
/// every chain of a sweep has its own stream.
pub fn run_point(cfg: &RunConfig, temperature: f64, mu: f64, point: usize, workers: usize) -> Result<PointResult, RunError> {
    let start = Instant::now();
    let cutoff = match cfg.cutoff {
        Some(k) => k,
        None => cutoff_for(temperature, mu)?,
    };
    let params = ModelParams::new(cfg.atoms, cfg.coupling, temperature, cutoff)?;
    let basis = Arc::new(BasisTable::build(cutoff, cfg.extent_factor, cfg.oversample)?);
    let seeds: Vec<u64> = (0..cfg.chains).map(|c| cfg.chain_seed(point, c)).collect();

    let partials: Vec<ChainPartial> = pool(workers)?.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let stream = run_chain(params, basis.clone(), cfg.moves, cfg.schedule, seed, cfg.init)?;
                reduce_chain(stream, &basis)
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;

    let mut rho = DensityMatrix::new(basis.modes());
    let mut spatial = SpatialAccumulator::new(&basis)?;
    for p in &partials {
        rho.merge(&p.rho)?;
        spatial.merge(&p.spatial)?;
    }
    let rho_trace = rho.trace();
    if (rho_trace - cfg.atoms).abs() > TRACE_TOL * cfg.atoms {
        return Err(RunError::Invariant(format!("density-matrix trace {rho_trace} differs from N = {}", cfg.atoms)));
    }
    let decomposition = diagonalize(&rho)?;
    if decomposition.max_residual > RESIDUAL_TOL * cfg.atoms {
        return Err(RunError::Invariant(format!("eigen residual {:e}", decomposition.max_residual)));
    }
    let max_cache_error = partials.iter().map(|p| p.cache_error).fold(0.0, f64::max);
    if max_cache_error > CACHE_TOL {
        return Err(RunError::Invariant(format!("cached energy drifted by {max_cache_error:e}")));
    }
    let max_norm_error = partials.iter().map(|p| p.norm_error).fold(0.0, f64::max);
    if max_norm_error > NORM_TOL {
        return Err(RunError::Invariant(format!("norm drifted by {max_norm_error:e}")));
    }

    let series: Vec<OccupationSeries> = partials
        .iter()
        .map(|p| occupation_series(&p.stream.snapshots, cfg.atoms, decomposition.condensate_mode()))
        .collect();
    let occupation = occupation_statistics(&series, cfg.histogram_bins)?;
    let bare: Vec<OccupationSeries> = partials.iter().map(|p| ground_mode_series(&p.stream.snapshots, cfg.atoms)).collect();
    let ground_mode = occupation_statistics(&bare, Some(occupation.histogram.bins()))?;

    let correlation = correlation_profile(&spatial, &basis, &decomposition, cfg.g1_denominator)?;
    let (center_fluctuation, center_fluctuation_err) = center_fluctuation_with_error(&spatial)?;
    let center = basis.grid().center();
    let center_shot_noise_form = fluctuation_at(&spatial, &basis, center)?.shot_noise_form;
    let fluctuations = (center..basis.grid().len())
        .filter_map(|i| fluctuation_at(&spatial, &basis, i).ok())
        .collect();
    let fwhm_g1 = correlation.g1_width().ok();
    let fwhm_condensate = correlation.condensate_width().ok();

    Ok(PointResult {
        temperature,
        cutoff,
        mu,
        rho_trace,
        decomposition,
        series,
        occupation,
        ground_mode,
        correlation,
        center_fluctuation,
        center_fluctuation_err,
        center_shot_noise_form,
        fluctuations,
        fwhm_g1,
        fwhm_condensate,
        acceptance: partials.iter().map(|p| p.stream.meta.acceptance).collect(),
        tuned_theta: partials.iter().map(|p| p.stream.meta.tuned_theta_scale).collect(),
        seeds,
        max_cache_error,
        max_norm_error,
        seconds: start.elapsed().as_secs_f64(),
        basis,
    })
}

/// Zero-temperature profiles from the minimiser and from imaginary time.
#[derive(Clone, Debug)]
pub struct ZeroTemperature {
    pub cutoff: usize,
    pub x: Vec<f64>,
    pub minimized: Vec<f64>,
    pub mean_field: Vec<f64>,
    pub minimized_energy: f64,
    pub mean_field_energy: f64,
    pub fwhm_minimized: f64,
    pub fwhm_mean_field: f64,
    /// L2 distance between the two densities, each normalised to unit
    /// integral.
    pub l2_distance: f64,
    pub spacing: f64,
}

pub fn zero_temperature(cfg: &RunConfig, mu: f64) -> Result<ZeroTemperature, RunError> {
    let cutoff = zero_temperature_cutoff(mu)?;
    let basis = Arc::new(BasisTable::build(cutoff, cfg.extent_factor, cfg.oversample)?);
    let params = ModelParams::new(cfg.atoms, cfg.coupling, 0.0, cutoff)?;
    let gs = imaginary_time_ground_state(&params, basis.grid(), cfg.gpe)?;
    let min = minimize_energy(params, basis.clone(), cfg.moves, cfg.minimize_steps, cfg.base_seed)?;
    let dx = basis.grid().spacing();
    let minimized: Vec<f64> = basis.synthesize(min.config.amplitudes())?.iter().map(|p| p.norm_sqr()).collect();
    let mean_field = gs.density();
    let unit = |d: &[f64]| {
        let s = d.iter().sum::<f64>() * dx;
        d.iter().map(|v| v / s).collect::<Vec<_>>()
    };
    let (a, b) = (unit(&minimized), unit(&mean_field));
    let l2_distance = (a.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>() * dx).sqrt();
    let x = basis.grid().points().to_vec();
    Ok(ZeroTemperature {
        cutoff,
        fwhm_minimized: fwhm(&x, &minimized)?,
        fwhm_mean_field: fwhm(&x, &mean_field)?,
        x,
        minimized,
        mean_field,
        minimized_energy: min.energy.total,
        mean_field_energy: gs.energy - 0.5 * cfg.atoms,
        l2_distance,
        spacing: dx,
    })
}

fn integer_atoms(atoms: f64) -> Option<usize> {
    (atoms.fract() == 0.0 && atoms >= 1.0).then_some(atoms as usize)
}

/// Exact quantum `(mean, variance)` of `N_0` for the ideal gas, if `N` is
/// an integer.
pub fn ideal_moments(atoms: f64, temperature: f64) -> Option<(f64, f64)> {
    let n = integer_atoms(atoms)?;
    exact_condensate_moments(n, temperature).ok().map(|m| (m.mean, m.variance))
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Common provenance block.
pub fn provenance(table: &mut ResultTable, cfg: &RunConfig) {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    table.note("config_hash", cfg.hash());
    table.note("version", VERSION);
    table.note("wall_clock_unix", secs);
    table.note("atoms", cfg.atoms);
    table.note("coupling", cfg.coupling);
}

/// Sweep over `cfg.temperatures` (or the single `cfg.temperature`).
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub mu: f64,
    pub points: Vec<PointResult>,
    pub crossover: Option<Crossover>,
}

pub fn sweep(cfg: &RunConfig, workers: usize) -> Result<SweepResult, RunError> {
    let temps = if cfg.temperatures.is_empty() { vec![cfg.temperature] } else { cfg.temperatures.clone() };
    let mu = field_mu(&mean_field(cfg)?);
    let points = temps
        .iter()
        .enumerate()
        .map(|(k, &t)| run_point(cfg, t, mu, k, workers))
        .collect::<Result<Vec<_>, _>>()?;
    let crossover = if points.len() >= 3 {
        let t: Vec<f64> = points.iter().map(|p| p.temperature).collect();
        let v: Vec<f64> = points.iter().map(|p| p.occupation.variance).collect();
        Some(crossover_temperature(&t, &v)?)
    } else {
        None
    };
    Ok(SweepResult { mu, points, crossover })
}

pub fn summary_table(cfg: &RunConfig, s: &SweepResult) -> ResultTable {
    let mut t = ResultTable::new(
        "summary",
        &[
            ("T", "hbar*omega/k_B"),
            ("K", "1"),
            ("n0_fraction", "1"),
            ("n0_fraction_err", "1"),
            ("n0_variance", "atoms^2"),
            ("n0_variance_err", "atoms^2"),
            ("ground_mode_fraction", "1"),
            ("ideal_n0_fraction", "1"),
            ("ideal_n0_variance", "atoms^2"),
            ("fwhm_g1", "a_ho"),
            ("fwhm_condensate", "a_ho"),
            ("center_fluctuation", "1"),
            ("center_fluctuation_err", "1"),
            ("acceptance", "1"),
        ],
    );
    provenance(&mut t, cfg);
    t.note("mu_above_zero_point", s.mu);
    match s.crossover {
        Some(c) => {
            t.note("crossover_T", c.temperature);
            t.note("crossover_at_edge", c.at_edge);
        }
        None => t.note("crossover_T", "not bracketed"),
    }
    for p in &s.points {
        let n = cfg.atoms;
        let ideal = ideal_moments(n, p.temperature);
        t.push(vec![
            p.temperature,
            p.cutoff as f64,
            p.occupation.mean / n,
            p.occupation.mean_error / n,
            p.occupation.variance,
            p.occupation.variance_error,
            p.ground_mode.mean / n,
            opt(ideal.map(|m| m.0 / n)),
            opt(ideal.map(|m| m.1)),
            opt(p.fwhm_g1),
            opt(p.fwhm_condensate),
            p.center_fluctuation,
            p.center_fluctuation_err,
            cfield::stats::mean(&p.acceptance),
        ]);
    }
    t
}

/// Condensate fraction against temperature.
pub fn condensate_fraction_table(cfg: &RunConfig, s: &SweepResult) -> ResultTable {
    let mut t = ResultTable::new(
        "condensate_fraction",
        &[("T", "hbar*omega/k_B"), ("n0_fraction", "1"), ("n0_fraction_err", "1"), ("ground_mode_fraction", "1"), ("ideal_exact", "1")],
    );
    provenance(&mut t, cfg);
    t.note("n0", "dominant eigenvalue projection; ground_mode_fraction is |alpha_0|^2 / N");
    for p in &s.points {
        let ideal = ideal_moments(cfg.atoms, p.temperature).map(|m| m.0 / cfg.atoms);
        t.push(vec![p.temperature, p.occupation.mean / cfg.atoms, p.occupation.mean_error / cfg.atoms, p.ground_mode.mean / cfg.atoms, opt(ideal)]);
    }
    t
}

/// Condensate number fluctuations against temperature.
pub fn fluctuation_table(cfg: &RunConfig, s: &SweepResult) -> ResultTable {
    let mut t = ResultTable::new(
        "condensate_fluctuations",
        &[
            ("T", "hbar*omega/k_B"),
            ("n0_variance", "atoms^2"),
            ("n0_variance_err", "atoms^2"),
            ("relative_fluctuation", "1"),
            ("ideal_exact_variance", "atoms^2"),
        ],
    );
    provenance(&mut t, cfg);
    t.note("relative_fluctuation", "sqrt(variance) / N");
    if let Some(c) = s.crossover {
        t.note("crossover_T", c.temperature);
        t.note("crossover_at_edge", c.at_edge);
    }
    for p in &s.points {
        let ideal = ideal_moments(cfg.atoms, p.temperature).map(|m| m.1);
        t.push(vec![p.temperature, p.occupation.variance, p.occupation.variance_error, p.occupation.variance.sqrt() / cfg.atoms, opt(ideal)]);
    }
    t
}

pub fn widths_table(cfg: &RunConfig, s: &SweepResult) -> ResultTable {
    let mut t = ResultTable::new("widths", &[("T", "hbar*omega/k_B"), ("fwhm_g1", "a_ho"), ("fwhm_condensate", "a_ho")]);
    provenance(&mut t, cfg);
    t.note("fwhm_g1", "full width in x of g1(-x, x); the separation of the correlated points is twice x");
    for p in &s.points {
        t.push(vec![p.temperature, opt(p.fwhm_g1), opt(p.fwhm_condensate)]);
    }
    t
}

pub fn center_fluctuation_table(cfg: &RunConfig, s: &SweepResult) -> ResultTable {
    let mut t = ResultTable::new(
        "center_fluctuations",
        &[("T", "hbar*omega/k_B"), ("normalized_variance", "1"), ("normalized_variance_err", "1"), ("shot_noise_form", "1")],
    );
    provenance(&mut t, cfg);
    t.note("normalized_variance", "(<n^2> - <n>^2) / <n>^2 at x = 0");
    t.note("shot_noise_form", "(<n^2> - <n>) / <n>^2 at x = 0");
    for p in &s.points {
        t.push(vec![p.temperature, p.center_fluctuation, p.center_fluctuation_err, p.center_shot_noise_form]);
    }
    t
}

fn suffix(t: f64) -> String {
    format!("T{t}").replace('.', "p")
}

/// Histogram of `N_ex` with the ideal-gas reference densities.
pub fn histogram_table(cfg: &RunConfig, p: &PointResult) -> Result<ResultTable, RunError> {
    let h: &Histogram = &p.occupation.histogram;
    let mut t = ResultTable::new(
        &format!("excited_histogram_{}", suffix(p.temperature)),
        &[("n_ex", "atoms"), ("sampled_density", "1/atoms"), ("classical_density", "1/atoms"), ("quantum_density", "1/atoms")],
    );
    provenance(&mut t, cfg);
    t.note("T", p.temperature);
    t.note("K", p.cutoff);
    t.note("bins", h.bins());
    let classical = classical_pnex(cfg.atoms, p.temperature, p.cutoff)?;
    let quantum = integer_atoms(cfg.atoms).map(|n| exact_pnex(n, p.temperature)).transpose()?;
    let edges = h.edges();
    let sampled = h.density();
    let mut gap: f64 = 0.0;
    for (k, (c, emp)) in h.cdf().iter().zip(&sampled).enumerate() {
        gap = gap.max((c - classical.cdf(edges[k + 1])).abs());
        let (lo, hi) = (edges[k], edges[k + 1]);
        let cl = (classical.cdf(hi) - classical.cdf(lo)) / h.width();
        // integer N_ex values inside [lo, hi), the last bin closed
        let q = quantum.as_ref().map(|q| {
            q.probabilities
                .iter()
                .enumerate()
                .filter(|(n, _)| {
                    let x = *n as f64;
                    x >= lo && (x < hi || k + 1 == h.bins())
                })
                .map(|(_, p)| p)
                .sum::<f64>()
                / h.width()
        });
        t.push(vec![0.5 * (lo + hi), *emp, cl, opt(q)]);
    }
    t.note("cdf_sup_distance_classical", gap);
    Ok(t)
}

pub fn correlation_table(cfg: &RunConfig, p: &PointResult) -> ResultTable {
    let c = &p.correlation;
    let mut t = ResultTable::new(
        &format!("correlation_{}", suffix(p.temperature)),
        &[
            ("x", "a_ho"),
            ("g1", "1"),
            ("g1_imag", "1"),
            ("condensate_scaled", "1"),
            ("density", "1/a_ho"),
            ("condensate_density", "1/a_ho"),
        ],
    );
    provenance(&mut t, cfg);
    t.note("T", p.temperature);
    t.note("K", p.cutoff);
    t.note("g1", "<conj(Psi(-x)) Psi(x)> / <|Psi(x)|^2>");
    t.note("condensate_occupation", p.decomposition.condensate_occupation());
    for k in 0..c.x.len() {
        t.push(vec![c.x[k], c.g1[k], c.g1_imag[k], c.condensate_scaled[k], c.density[k], c.condensate_density[k]]);
    }
    t
}

pub fn local_fluctuation_table(cfg: &RunConfig, p: &PointResult) -> ResultTable {
    let mut t = ResultTable::new(
        &format!("local_fluctuations_{}", suffix(p.temperature)),
        &[("x", "a_ho"), ("density", "1/a_ho"), ("normalized_variance", "1"), ("shot_noise_form", "1")],
    );
    provenance(&mut t, cfg);
    t.note("T", p.temperature);
    for f in &p.fluctuations {
        t.push(vec![f.x, f.mean_density, f.normalized_variance, f.shot_noise_form]);
    }
    t
}

pub fn zero_temperature_table(cfg: &RunConfig, z: &ZeroTemperature) -> ResultTable {
    let mut t = ResultTable::new("zero_temperature", &[("x", "a_ho"), ("minimized_density", "1/a_ho"), ("gpe_density", "1/a_ho")]);
    provenance(&mut t, cfg);
    t.note("K", z.cutoff);
    t.note("fwhm_minimized", z.fwhm_minimized);
    t.note("fwhm_gpe", z.fwhm_mean_field);
    t.note("l2_distance", z.l2_distance);
    t.note("minimized_energy", z.minimized_energy);
    t.note("gpe_energy_above_zero_point", z.mean_field_energy);
    for k in 0..z.x.len() {
        t.push(vec![z.x[k], z.minimized[k], z.mean_field[k]]);
    }
    t
}

/// Exact and classical `P(N_ex)` side by side on integer `N_ex`.
pub fn ideal_reference(atoms: usize, temperature: f64, cutoff: usize) -> Result<ResultTable, RunError> {
    let quantum = exact_pnex(atoms, temperature)?;
    let classical = classical_pnex(atoms as f64, temperature, cutoff)?;
    let mut t = ResultTable::new(
        &format!("ideal_reference_N{atoms}_{}_K{cutoff}", suffix(temperature)),
        &[("n_ex", "atoms"), ("quantum_probability", "1"), ("quantum_cdf", "1"), ("classical_density", "1/atoms"), ("classical_cdf", "1")],
    );
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    t.note("version", VERSION);
    t.note("wall_clock_unix", secs);
    t.note("atoms", atoms);
    t.note("T", temperature);
    t.note("K", cutoff);
    let qcdf = quantum.cdf();
    for (n, p) in quantum.probabilities.iter().enumerate() {
        let x = n as f64;
        t.push(vec![x, *p, qcdf[n], classical.density(x), classical.cdf(x)]);
    }
    t.note("quantum_sum", quantum.total());
    t.note("classical_integral", classical.normalization());
    t.note("quantum_mean_excited", quantum.mean_excited());
    t.note("classical_mean_excited", classical.mean());
    Ok(t)
}

/// Writes every table of a sweep and returns their paths.
pub fn write_sweep(cfg: &RunConfig, s: &SweepResult) -> Result<Vec<std::path::PathBuf>, RunError> {
    let mut tables = vec![
        summary_table(cfg, s),
        condensate_fraction_table(cfg, s),
        fluctuation_table(cfg, s),
        widths_table(cfg, s),
        center_fluctuation_table(cfg, s),
    ];
    for p in &s.points {
        tables.push(histogram_table(cfg, p)?);
        tables.push(correlation_table(cfg, p));
        tables.push(local_fluctuation_table(cfg, p));
    }
    tables.iter().map(|t| Ok(t.write(&cfg.out_dir)?)).collect()
}
