//! Reductions of sample streams to observables.
//!
//! The condensate is the dominant eigenvector of the ensemble one-body
//! density matrix `rho_ij = <conj(alpha_i) alpha_j>` (Penrose-Onsager). Its
//! per-snapshot occupation is the squared projection of each sampled
//! configuration on that ensemble eigenvector.
//!
//! All accumulators merge by plain addition so independent chains can be
//! reduced in any order.

use num_complex::Complex64;

use crate::basis::BasisTable;
use crate::field::FieldConfiguration;
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::sampler::SampleStream;
use crate::stats::{blocking, block_jackknife, freedman_diaconis_bins, Histogram};
use crate::{Error, Result};

/// Shortest occupation series accepted by [`occupation_statistics`].
pub const MIN_SERIES: usize = 100;

/// Jackknife blocks for ratio estimators.
pub const JACKKNIFE_BLOCKS: usize = 50;

/// Running sum of `conj(alpha_i) alpha_j` over snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    // upper triangle (i <= j) of the sum, row-major in a full n*n buffer
    sums: Vec<Complex64>,
    count: u64,
}

impl DensityMatrix {
    pub fn new(dim: usize) -> Self {
        Self { dim, sums: vec![Complex64::new(0.0, 0.0); dim * dim], count: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn add(&mut self, config: &FieldConfiguration) -> Result<()> {
        let a = config.amplitudes();
        crate::basis::check_len(self.dim, a.len())?;
        for i in 0..self.dim {
            let ci = a[i].conj();
            for j in i..self.dim {
                self.sums[i * self.dim + j] += ci * a[j];
            }
        }
        self.count += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &DensityMatrix) -> Result<()> {
        crate::basis::check_len(self.dim, other.dim)?;
        for (s, o) in self.sums.iter_mut().zip(&other.sums) {
            *s += o;
        }
        self.count += other.count;
        Ok(())
    }

    /// Ensemble mean, exactly Hermitian with a real diagonal.
    pub fn mean(&self) -> CMatrix {
        let n = self.dim;
        let inv = 1.0 / self.count.max(1) as f64;
        CMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(self.sums[i * n + i].re * inv, 0.0)
            } else if i < j {
                self.sums[i * n + j] * inv
            } else {
                self.sums[j * n + i].conj() * inv
            }
        })
    }

    /// `trace(sum) / count`.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.sums[i * self.dim + i].re).sum::<f64>() / self.count.max(1) as f64
    }
}

pub fn accumulate_density_matrix(stream: &SampleStream) -> Result<DensityMatrix> {
    let first = stream.snapshots.first().ok_or(Error::EmptyStream)?;
    let mut rho = DensityMatrix::new(first.modes());
    for s in &stream.snapshots {
        rho.add(s)?;
    }
    Ok(rho)
}

#[derive(Clone, Debug)]
pub struct CondensateDecomposition {
    /// Eigenvalues `lambda_0 >= lambda_1 >= ...`.
    pub occupations: Vec<f64>,
    /// `modes[n]` is the eigenvector `beta(n)` in the oscillator basis.
    pub modes: Vec<Vec<Complex64>>,
    pub max_residual: f64,
}

impl CondensateDecomposition {
    pub fn condensate_occupation(&self) -> f64 {
        self.occupations[0]
    }

    pub fn condensate_mode(&self) -> &[Complex64] {
        &self.modes[0]
    }
}

pub fn diagonalize(rho: &DensityMatrix) -> Result<CondensateDecomposition> {
    if rho.count() == 0 {
        return Err(Error::EmptyStream);
    }
    diagonalize_matrix(&rho.mean())
}

pub fn diagonalize_matrix(m: &CMatrix) -> Result<CondensateDecomposition> {
    let e = hermitian_eigen(m)?;
    Ok(CondensateDecomposition { occupations: e.values, modes: e.vectors, max_residual: e.max_residual })
}

/// Per-snapshot condensate occupations `N_0 = |<beta(0), alpha>|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupationSeries {
    pub atoms: f64,
    pub condensate: Vec<f64>,
}

impl OccupationSeries {
    pub fn excited(&self) -> Vec<f64> {
        self.condensate.iter().map(|n0| self.atoms - n0).collect()
    }

    pub fn len(&self) -> usize {
        self.condensate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.condensate.is_empty()
    }
}

pub fn occupation_series(snapshots: &[FieldConfiguration], atoms: f64, mode: &[Complex64]) -> OccupationSeries {
    let condensate = snapshots
        .iter()
        .map(|s| {
            let overlap: Complex64 = mode.iter().zip(s.amplitudes()).map(|(b, a)| b.conj() * a).sum();
            overlap.norm_sqr().clamp(0.0, atoms)
        })
        .collect();
    OccupationSeries { atoms, condensate }
}

/// `|alpha_0|^2` per snapshot: the bare oscillator ground-state occupation.
pub fn ground_mode_series(snapshots: &[FieldConfiguration], atoms: f64) -> OccupationSeries {
    OccupationSeries { atoms, condensate: snapshots.iter().map(|s| s.amplitudes()[0].norm_sqr()).collect() }
}

#[derive(Clone, Debug)]
pub struct OccupationStatistics {
    pub mean: f64,
    pub mean_error: f64,
    pub variance: f64,
    pub variance_error: f64,
    /// Whether every chain's blocking analysis of `N_0` reached a plateau.
    pub plateau: bool,
    /// Histogram of `N_ex` over `[0, N]`.
    pub histogram: Histogram,
}

/// Mean and variance of `N_0` with blocked errors, pooling independent
/// chains: chain errors combine in quadrature weighted by chain length.
pub fn occupation_statistics(chains: &[OccupationSeries], bins: Option<usize>) -> Result<OccupationStatistics> {
    let total: usize = chains.iter().map(|c| c.len()).sum();
    if chains.is_empty() || chains.iter().any(|c| c.len() < MIN_SERIES) {
        let shortest = chains.iter().map(|c| c.len()).min().unwrap_or(0);
        return Err(Error::SeriesTooShort { len: shortest, min: MIN_SERIES });
    }
    let atoms = chains[0].atoms;
    let nt = total as f64;
    let mean = chains.iter().flat_map(|c| c.condensate.iter()).sum::<f64>() / nt;
    let variance = chains.iter().flat_map(|c| c.condensate.iter()).map(|x| (x - mean).powi(2)).sum::<f64>() / nt;

    let mut mean_err2 = 0.0;
    let mut var_err2 = 0.0;
    let mut plateau = true;
    for c in chains {
        let w = c.len() as f64 / nt;
        let b = blocking(&c.condensate)?;
        plateau &= b.plateau;
        mean_err2 += (w * b.standard_error).powi(2);
        let sq: Vec<f64> = c.condensate.iter().map(|x| (x - mean).powi(2)).collect();
        var_err2 += (w * blocking(&sq)?.standard_error).powi(2);
    }

    let excited: Vec<f64> = chains.iter().flat_map(|c| c.excited()).collect();
    let bins = bins.unwrap_or_else(|| freedman_diaconis_bins(&excited, 0.0, atoms));
    let histogram = Histogram::from_samples(&excited, 0.0, atoms, bins);
    Ok(OccupationStatistics {
        mean,
        mean_error: mean_err2.sqrt(),
        variance,
        variance_error: var_err2.sqrt(),
        plateau,
        histogram,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossover {
    pub temperature: f64,
    /// The maximum sits at the first or last temperature; `temperature` is
    /// then that edge value.
    pub at_edge: bool,
}

/// Location of the maximum of `values(temperatures)` from the parabola
/// through the largest sample and its two neighbours.
pub fn crossover_temperature(temperatures: &[f64], values: &[f64]) -> Result<Crossover> {
    crate::basis::check_len(temperatures.len(), values.len())?;
    if temperatures.len() < 3 {
        return Err(Error::SeriesTooShort { len: temperatures.len(), min: 3 });
    }
    let k = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    if k == 0 || k == values.len() - 1 {
        return Ok(Crossover { temperature: temperatures[k], at_edge: true });
    }
    let (x0, x1, x2) = (temperatures[k - 1], temperatures[k], temperatures[k + 1]);
    let (y0, y1, y2) = (values[k - 1], values[k], values[k + 1]);
    // vertex of the Lagrange parabola through the three points
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature >= 0.0 {
        return Ok(Crossover { temperature: x1, at_edge: false });
    }
    let vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    Ok(Crossover { temperature: vertex.clamp(x0, x2), at_edge: false })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum G1Denominator {
    /// `<|Psi(x)|^2>`.
    #[default]
    Literal,
    /// `sqrt(<|Psi(-x)|^2> <|Psi(x)|^2>)`.
    Symmetric,
}

/// Running spatial moments of sampled profiles, for `g1` and density
/// fluctuations.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialAccumulator {
    center: usize,
    /// `sum conj(Psi(-x_i)) Psi(x_i)` for `x_i >= 0`.
    cross: Vec<Complex64>,
    /// `sum |Psi(x_i)|^2` over the full grid.
    density: Vec<f64>,
    /// `sum |Psi(x_i)|^4` over the full grid.
    density_sq: Vec<f64>,
    count: u64,
    /// `|Psi(0)|^2` per snapshot, for error bars at the trap centre.
    center_series: Vec<f64>,
}

impl SpatialAccumulator {
    pub fn new(basis: &BasisTable) -> Result<Self> {
        let grid = basis.grid();
        if !grid.is_symmetric() {
            return Err(Error::AsymmetricGrid);
        }
        let m = grid.len();
        let c = grid.center();
        Ok(Self {
            center: c,
            cross: vec![Complex64::new(0.0, 0.0); m - c],
            density: vec![0.0; m],
            density_sq: vec![0.0; m],
            count: 0,
            center_series: Vec::new(),
        })
    }

    pub fn add_profile(&mut self, psi: &[Complex64]) -> Result<()> {
        crate::basis::check_len(self.density.len(), psi.len())?;
        let m = psi.len();
        for (k, acc) in self.cross.iter_mut().enumerate() {
            let i = self.center + k;
            *acc += psi[m - 1 - i].conj() * psi[i];
        }
        for ((d, d2), p) in self.density.iter_mut().zip(self.density_sq.iter_mut()).zip(psi) {
            let n = p.norm_sqr();
            *d += n;
            *d2 += n * n;
        }
        self.center_series.push(psi[self.center].norm_sqr());
        self.count += 1;
        Ok(())
    }

    pub fn add_stream(&mut self, stream: &SampleStream, basis: &BasisTable) -> Result<()> {
        for s in &stream.snapshots {
            self.add_profile(&basis.synthesize(s.amplitudes())?)?;
        }
        Ok(())
    }

    pub fn from_stream(stream: &SampleStream, basis: &BasisTable) -> Result<Self> {
        if stream.is_empty() {
            return Err(Error::EmptyStream);
        }
        let mut acc = Self::new(basis)?;
        acc.add_stream(stream, basis)?;
        Ok(acc)
    }

    pub fn merge(&mut self, other: &SpatialAccumulator) -> Result<()> {
        crate::basis::check_len(self.density.len(), other.density.len())?;
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
        for (a, b) in self.density.iter_mut().zip(&other.density) {
            *a += b;
        }
        for (a, b) in self.density_sq.iter_mut().zip(&other.density_sq) {
            *a += b;
        }
        self.center_series.extend_from_slice(&other.center_series);
        self.count += other.count;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `<|Psi(x_i)|^2>` over the full grid.
    pub fn mean_density(&self) -> Vec<f64> {
        let inv = 1.0 / self.count as f64;
        self.density.iter().map(|d| d * inv).collect()
    }

    pub fn center_series(&self) -> &[f64] {
        &self.center_series
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationProfile {
    /// Abscissa `x >= 0`; the two correlated points are `-x` and `x`.
    pub x: Vec<f64>,
    pub g1: Vec<f64>,
    /// Imaginary part of the `g1` estimate; zero in expectation by parity.
    pub g1_imag: Vec<f64>,
    /// `<|Psi(x)|^2>`.
    pub density: Vec<f64>,
    /// `lambda_0 |sum_n beta_n(0) phi_n(x)|^2`.
    pub condensate_density: Vec<f64>,
    /// Condensate density divided by its value at `x = 0`.
    pub condensate_scaled: Vec<f64>,
}

fn mirror_full(x: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let xs = x.iter().rev().skip(1).map(|v| -v).chain(x.iter().copied()).collect();
    let vs = values.iter().rev().skip(1).chain(values.iter()).copied().collect();
    (xs, vs)
}

impl CorrelationProfile {
    /// `g1` on the full symmetric grid.
    pub fn g1_full(&self) -> (Vec<f64>, Vec<f64>) {
        mirror_full(&self.x, &self.g1)
    }

    pub fn condensate_full(&self) -> (Vec<f64>, Vec<f64>) {
        mirror_full(&self.x, &self.condensate_density)
    }

    pub fn g1_width(&self) -> Result<f64> {
        let (x, v) = self.g1_full();
        fwhm(&x, &v)
    }

    pub fn condensate_width(&self) -> Result<f64> {
        let (x, v) = self.condensate_full();
        fwhm(&x, &v)
    }
}

/// `g1(-x, x) = <conj(Psi(-x)) Psi(x)> / <|Psi(x)|^2>` from accumulated
/// moments, with the condensate density of `decomposition`.
pub fn correlation_profile(
    acc: &SpatialAccumulator,
    basis: &BasisTable,
    decomposition: &CondensateDecomposition,
    denominator: G1Denominator,
) -> Result<CorrelationProfile> {
    if acc.count == 0 {
        return Err(Error::EmptyStream);
    }
    let grid = basis.grid();
    let c = grid.center();
    let m = grid.len();
    let inv = 1.0 / acc.count as f64;
    let mut g1 = Vec::with_capacity(m - c);
    let mut g1_imag = Vec::with_capacity(m - c);
    for (k, cross) in acc.cross.iter().enumerate() {
        let i = c + k;
        let den = match denominator {
            G1Denominator::Literal => acc.density[i] * inv,
            G1Denominator::Symmetric => (acc.density[i] * acc.density[m - 1 - i]).sqrt() * inv,
        };
        let z = cross * inv / den;
        g1.push(z.re);
        g1_imag.push(z.im);
    }
    let lambda0 = decomposition.condensate_occupation();
    let mode = basis.synthesize(decomposition.condensate_mode())?;
    let condensate_density: Vec<f64> = mode[c..].iter().map(|p| lambda0 * p.norm_sqr()).collect();
    let center = condensate_density[0];
    let condensate_scaled = condensate_density.iter().map(|d| if center > 0.0 { d / center } else { f64::NAN }).collect();
    Ok(CorrelationProfile {
        x: grid.points()[c..].to_vec(),
        g1,
        g1_imag,
        density: acc.density[c..].iter().map(|d| d * inv).collect(),
        condensate_density,
        condensate_scaled,
    })
}

/// [`correlation_profile`] straight from a stream.
pub fn g1_profile(
    stream: &SampleStream,
    basis: &BasisTable,
    decomposition: &CondensateDecomposition,
    denominator: G1Denominator,
) -> Result<CorrelationProfile> {
    let acc = SpatialAccumulator::from_stream(stream, basis)?;
    correlation_profile(&acc, basis, decomposition, denominator)
}

/// Full width at half maximum with linear interpolation at each crossing.
pub fn fwhm(points: &[f64], values: &[f64]) -> Result<f64> {
    crate::basis::check_len(points.len(), values.len())?;
    let (peak, max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, &v)| (k, v))
        .ok_or(Error::EmptyStream)?;
    if peak == 0 || peak == values.len() - 1 {
        return Err(Error::MaximumAtEdge);
    }
    let half = 0.5 * max;
    let cross = |a: usize, b: usize| {
        let t = (half - values[a]) / (values[b] - values[a]);
        points[a] + t * (points[b] - points[a])
    };
    let left = (1..=peak).rev().find(|&i| values[i - 1] < half).map(|i| cross(i - 1, i));
    let right = (peak..values.len() - 1).find(|&i| values[i + 1] < half).map(|i| cross(i, i + 1));
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::NoHalfMaxCrossing),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluctuationEstimate {
    pub x: f64,
    pub mean_density: f64,
    /// `(<n^2> - <n>^2) / <n>^2`.
    pub normalized_variance: f64,
    /// `(<n^2> - <n>) / <n>^2`, the form with a shot-noise subtraction.
    pub shot_noise_form: f64,
}

/// Normalised local density fluctuations at grid index `index`.
pub fn fluctuation_at(acc: &SpatialAccumulator, basis: &BasisTable, index: usize) -> Result<FluctuationEstimate> {
    if acc.count == 0 {
        return Err(Error::EmptyStream);
    }
    if index >= acc.density.len() {
        return Err(Error::LengthMismatch { expected: acc.density.len(), actual: index + 1 });
    }
    let inv = 1.0 / acc.count as f64;
    let n = acc.density[index] * inv;
    let n2 = acc.density_sq[index] * inv;
    if !(n > 0.0) {
        return Err(Error::ZeroDensity { index });
    }
    Ok(FluctuationEstimate {
        x: basis.grid().points()[index],
        mean_density: n,
        normalized_variance: (n2 - n * n) / (n * n),
        shot_noise_form: (n2 - n) / (n * n),
    })
}

pub fn local_density_fluctuations(stream: &SampleStream, basis: &BasisTable, index: usize) -> Result<FluctuationEstimate> {
    let acc = SpatialAccumulator::from_stream(stream, basis)?;
    fluctuation_at(&acc, basis, index)
}

/// Normalised variance of a density series, computed two-pass.
pub fn normalized_variance(series: &[f64]) -> f64 {
    let m = crate::stats::mean(series);
    crate::stats::variance(series) / (m * m)
}

/// Centre-of-trap normalised variance with a block-jackknife error.
pub fn center_fluctuation_with_error(acc: &SpatialAccumulator) -> Result<(f64, f64)> {
    block_jackknife(&acc.center_series, JACKKNIFE_BLOCKS, normalized_variance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ModelParams;
    use crate::sampler::{InitMode, MoveParams, Schedule, StreamMeta};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn stream(snapshots: Vec<FieldConfiguration>, atoms: f64) -> SampleStream {
        let k = snapshots[0].modes() - 1;
        let params = ModelParams::new(atoms, 0.0, 1.0, k).unwrap();
        SampleStream {
            energies: vec![crate::field::EnergyBreakdown::new(0.0, 0.0); snapshots.len()],
            snapshots,
            meta: StreamMeta {
                seed: 0,
                params,
                moves: MoveParams::default(),
                schedule: Schedule { sweeps: 2, burn_in: 1, thinning: 1 },
                init: InitMode::Ground,
                tuned_theta_scale: 0.1,
                acceptance: 0.5,
            },
        }
    }

    fn random_shell(rng: &mut ChaCha8Rng, modes: usize, atoms: f64) -> FieldConfiguration {
        let mut f = FieldConfiguration::new(
            (0..modes).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect(),
        );
        f.rescale_to(atoms);
        f
    }

    #[test]
    fn single_ground_snapshot() {
        let s = stream(vec![FieldConfiguration::ground(500.0, 4)], 500.0);
        let rho = accumulate_density_matrix(&s).unwrap();
        let m = rho.mean();
        assert!((m[(0, 0)].re - 500.0).abs() < 1e-12);
        assert_eq!(m[(1, 1)], c(0.0, 0.0));
        let d = diagonalize(&rho).unwrap();
        assert!((d.condensate_occupation() - 500.0).abs() < 1e-12);
        assert!((d.condensate_mode()[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_merge_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let snaps: Vec<_> = (0..200).map(|_| random_shell(&mut rng, 7, 500.0)).collect();
        let full = accumulate_density_matrix(&stream(snaps.clone(), 500.0)).unwrap();
        assert!((full.trace() - 500.0).abs() < 1e-9 * 500.0);
        let m = full.mean();
        assert_eq!(m.hermitian_defect(), 0.0);

        let mut a = accumulate_density_matrix(&stream(snaps[..80].to_vec(), 500.0)).unwrap();
        let b = accumulate_density_matrix(&stream(snaps[80..].to_vec(), 500.0)).unwrap();
        a.merge(&b).unwrap();
        assert_eq!(a.count(), full.count());
        let (ma, mf) = (a.mean(), full.mean());
        for i in 0..7 {
            for j in 0..7 {
                assert!((ma[(i, j)] - mf[(i, j)]).norm() <= 1e-12 * 500.0);
            }
        }

        let d = diagonalize(&full).unwrap();
        assert!((d.occupations.iter().sum::<f64>() - 500.0).abs() < 1e-8 * 500.0);
        assert!(d.max_residual <= 1e-8 * 500.0);
        assert!(d.occupations.iter().all(|&l| l >= -1e-9 * 500.0));
    }

    #[test]
    fn merge_is_exact_for_dyadic_samples() {
        let snaps: Vec<_> = (0..16)
            .map(|k| FieldConfiguration::new(vec![c(0.5 * k as f64, 0.25), c(1.0, -0.5 * (k % 3) as f64), c(0.125, 2.0)]))
            .collect();
        let full = accumulate_density_matrix(&stream(snaps.clone(), 1.0)).unwrap();
        let mut a = accumulate_density_matrix(&stream(snaps[..5].to_vec(), 1.0)).unwrap();
        a.merge(&accumulate_density_matrix(&stream(snaps[5..].to_vec(), 1.0)).unwrap()).unwrap();
        assert_eq!(a, full);
    }

    #[test]
    fn diagonal_density_matrix() {
        let mut m = CMatrix::zeros(5);
        for (i, v) in [450.0, 30.0, 20.0, 0.0, 0.0].into_iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        let d = diagonalize_matrix(&m).unwrap();
        assert_eq!(&d.occupations[..3], &[450.0, 30.0, 20.0]);
        assert_eq!(d.condensate_mode()[0], c(1.0, 0.0));
    }

    #[test]
    fn occupation_projection_limits() {
        let beta = vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let along = FieldConfiguration::new(beta.iter().map(|b| b * 500f64.sqrt()).collect());
        let orth = FieldConfiguration::new(vec![c(0.8 * 500f64.sqrt(), 0.0), c(0.0, -0.6 * 500f64.sqrt()), c(0.0, 0.0)]);
        let s = occupation_series(&[along, orth], 500.0, &beta);
        assert!((s.condensate[0] - 500.0).abs() < 1e-10);
        assert!(s.condensate[1].abs() < 1e-10);
    }

    #[test]
    fn occupation_statistics_of_constant_series() {
        let series = OccupationSeries { atoms: 500.0, condensate: vec![420.0; 256] };
        let st = occupation_statistics(&[series.clone()], Some(50)).unwrap();
        assert_eq!(st.variance, 0.0);
        assert_eq!(st.mean, 420.0);
        assert_eq!(st.histogram.bins(), 50);
        let short = OccupationSeries { atoms: 500.0, condensate: vec![1.0; 99] };
        assert!(matches!(occupation_statistics(&[short], None), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn crossover_examples() {
        let t = [1.0, 2.0, 3.5, 4.0, 6.0];
        let v: Vec<f64> = t.iter().map(|x| -(x - 3.2f64).powi(2) + 7.0).collect();
        let cr = crossover_temperature(&t, &v).unwrap();
        assert!((cr.temperature - 3.2).abs() < 1e-12 && !cr.at_edge);
        let mono = crossover_temperature(&t, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!(mono.at_edge && mono.temperature == 6.0);
        assert!(crossover_temperature(&t[..2], &v[..2]).is_err());
    }

    #[test]
    fn fwhm_examples() {
        let xs: Vec<f64> = (-4000..=4000).map(|i| i as f64 * 1e-3).collect();
        let gauss: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
        assert!((fwhm(&xs, &gauss).unwrap() - 2.0 * 2f64.ln().sqrt()).abs() < 1e-3);
        let tri: Vec<f64> = xs.iter().map(|x| (1.0 - x.abs()).max(0.0)).collect();
        assert!((fwhm(&xs, &tri).unwrap() - 1.0).abs() < 1e-9);
        let ramp: Vec<f64> = xs.iter().map(|x| x + 5.0).collect();
        assert!(matches!(fwhm(&xs, &ramp), Err(Error::MaximumAtEdge)));
        let wide: Vec<f64> = xs.iter().map(|x| 2.0 - 0.01 * x * x).collect();
        assert!(matches!(fwhm(&xs, &wide), Err(Error::NoHalfMaxCrossing)));

        let basis = BasisTable::build(0, 5.0, 4.0).unwrap();
        let dens: Vec<f64> = basis.mode(0).iter().map(|p| p * p).collect();
        let w = fwhm(basis.grid().points(), &dens).unwrap();
        assert!((w - 1.665_109_222).abs() < basis.grid().spacing());
    }

    #[test]
    fn coherent_condensate_has_flat_g1() {
        let basis = BasisTable::build(6, 1.5, 4.0).unwrap();
        let s = stream(vec![FieldConfiguration::ground(500.0, 6)], 500.0);
        let d = diagonalize(&accumulate_density_matrix(&s).unwrap()).unwrap();
        let p = g1_profile(&s, &basis, &d, G1Denominator::Literal).unwrap();
        assert_eq!(p.g1[0], 1.0);
        assert!(p.g1.iter().zip(&p.density).filter(|(_, &n)| n > 1e-250).all(|(g, _)| (g - 1.0).abs() < 1e-12));
        assert!((p.condensate_scaled[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g1_at_origin_is_one_and_numerator_symmetric() {
        let basis = BasisTable::build(8, 1.5, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let snaps: Vec<_> = (0..50).map(|_| random_shell(&mut rng, 9, 100.0)).collect();
        let s = stream(snaps.clone(), 100.0);
        let d = diagonalize(&accumulate_density_matrix(&s).unwrap()).unwrap();
        let p = g1_profile(&s, &basis, &d, G1Denominator::Literal).unwrap();
        assert_eq!(p.g1[0], 1.0);
        // numerator at x and at -x are complex conjugates of each other
        let grid = basis.grid();
        for snap in &snaps {
            let psi = basis.synthesize(snap.amplitudes()).unwrap();
            for i in 0..grid.len() {
                let a = psi[grid.mirror(i)].conj() * psi[i];
                let b = psi[i].conj() * psi[grid.mirror(i)];
                assert_eq!(a, b.conj());
            }
        }
        let sym = g1_profile(&s, &basis, &d, G1Denominator::Symmetric).unwrap();
        assert_eq!(sym.g1[0], 1.0);
    }

    #[test]
    fn fluctuations_of_constant_and_gaussian_fields() {
        let basis = BasisTable::build(2, 3.0, 4.0).unwrap();
        let s = stream(vec![FieldConfiguration::ground(100.0, 2); 10], 100.0);
        let f = local_density_fluctuations(&s, &basis, basis.grid().center()).unwrap();
        assert!(f.normalized_variance.abs() < 1e-12);

        // a single Gaussian mode gives |Psi(0)|^2 exponentially distributed
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let snaps: Vec<_> = (0..40_000)
            .map(|_| FieldConfiguration::new(vec![c(rng.sample(StandardNormal), rng.sample(StandardNormal)), c(0.0, 0.0), c(0.0, 0.0)]))
            .collect();
        let s = stream(snaps, 2.0);
        let acc = SpatialAccumulator::from_stream(&s, &basis).unwrap();
        let (v, err) = center_fluctuation_with_error(&acc).unwrap();
        assert!((v - 1.0).abs() < 4.0 * err, "{v} +- {err}");
        assert!(err < 0.05);

        let streaming = fluctuation_at(&acc, &basis, basis.grid().center()).unwrap().normalized_variance;
        let brute = normalized_variance(acc.center_series());
        assert!((streaming / brute - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_density_guard() {
        let basis = BasisTable::build(2, 3.0, 4.0).unwrap();
        let odd = FieldConfiguration::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let s = stream(vec![odd], 1.0);
        assert!(matches!(local_density_fluctuations(&s, &basis, basis.grid().center()), Err(Error::ZeroDensity { .. })));
    }
}
