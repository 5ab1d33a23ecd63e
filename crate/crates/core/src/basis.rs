//! Uniform spatial grids, harmonic-oscillator eigenfunctions and quadrature.
//!
//! A [`Grid`] is symmetric about the origin with an odd number of points, so
//! `x = 0` is always a node and every `x_i` has its mirror `-x_i` at index
//! `M - 1 - i`. Integrals are plain uniform-weight sums `sum_i f(x_i) dx`,
//! which for Gaussian-decaying integrands is spectrally accurate once the
//! grid resolves the fastest oscillation and covers the tails.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Distance (oscillator lengths) the grid always extends beyond the
/// classical turning point of the highest mode. Low modes have turning
/// points near the origin, where `extent_factor` alone leaves visible tails.
pub const TAIL_MARGIN: f64 = 6.0;

/// Tolerance of the quadrature orthonormality check in [`BasisTable::new`].
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    spacing: f64,
    half_width: f64,
    max_mode: usize,
}

impl Grid {
    /// Builds a grid able to represent modes `0..=max_mode`.
    ///
    /// The half-width is `max(extent_factor, 1 + TAIL_MARGIN / k) * k` with
    /// `k = sqrt(2K + 1)` the turning point of mode `K`, and the spacing is
    /// `pi / (2 k oversample)`.
    pub fn new(max_mode: usize, extent_factor: f64, oversample: f64) -> Result<Self> {
        if !(extent_factor >= 1.0) || !extent_factor.is_finite() {
            return Err(Error::invalid("extent_factor", format!("{extent_factor} < 1")));
        }
        if !(oversample >= 1.0) || !oversample.is_finite() {
            return Err(Error::invalid("oversample", format!("{oversample} < 1")));
        }
        let turning = turning_point(max_mode);
        let spacing = PI / (2.0 * turning * oversample);
        let required = (extent_factor * turning).max(turning + TAIL_MARGIN);
        let half_count = (required / spacing).ceil() as usize;
        let points = (0..=2 * half_count)
            .map(|i| (i as f64 - half_count as f64) * spacing)
            .collect();
        Ok(Self { points, spacing, half_width: half_count as f64 * spacing, max_mode })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Highest mode index the grid was built for.
    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    /// Index of the `x = 0` node.
    pub fn center(&self) -> usize {
        self.points.len() / 2
    }

    /// Index of the node at `-x_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.points.len() - 1 - i
    }

    pub fn is_symmetric(&self) -> bool {
        self.points.len() % 2 == 1
            && self.points[self.center()] == 0.0
            && (0..self.points.len()).all(|i| self.points[i] == -self.points[self.mirror(i)])
    }

    /// Index of the grid node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let i = (x / self.spacing).round() + self.center() as f64;
        i.clamp(0.0, (self.points.len() - 1) as f64) as usize
    }

    /// `sum_i f(x_i) dx`.
    pub fn quadrature(&self, samples: &[f64]) -> Result<f64> {
        check_len(self.points.len(), samples.len())?;
        Ok(samples.iter().sum::<f64>() * self.spacing)
    }
}

/// Classical turning point `sqrt(2K + 1)` of oscillator mode `K`.
pub fn turning_point(mode: usize) -> f64 {
    ((2 * mode + 1) as f64).sqrt()
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Hermite functions `phi_0..=phi_K` tabulated on a [`Grid`].
#[derive(Clone, Debug)]
pub struct BasisTable {
    max_mode: usize,
    // mode-major: values[n * M + i] = phi_n(x_i)
    values: Vec<f64>,
    grid: Grid,
}

impl BasisTable {
    /// Tabulates modes `0..=max_mode` with the normalised three-term
    /// recurrence and verifies quadrature orthonormality.
    pub fn new(max_mode: usize, grid: Grid) -> Result<Self> {
        if grid.max_mode() < max_mode {
            return Err(Error::GridTooSmall { grid_modes: grid.max_mode(), requested: max_mode });
        }
        let m = grid.len();
        let mut values = vec![0.0; (max_mode + 1) * m];
        for (i, &x) in grid.points().iter().enumerate() {
            let mut prev = 0.0;
            let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
            values[i] = cur;
            for n in 0..max_mode {
                let nf = n as f64;
                let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
                values[(n + 1) * m + i] = cur;
            }
        }
        let table = Self { max_mode, values, grid };
        let deviation = table.orthonormality_deviation();
        if !(deviation <= ORTHONORMALITY_TOL) {
            return Err(Error::BasisNotOrthonormal { deviation });
        }
        Ok(table)
    }

    /// Convenience: build a grid for `max_mode` and tabulate on it.
    pub fn build(max_mode: usize, extent_factor: f64, oversample: f64) -> Result<Self> {
        Self::new(max_mode, Grid::new(max_mode, extent_factor, oversample)?)
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn modes(&self) -> usize {
        self.max_mode + 1
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `phi_n` on the grid.
    pub fn mode(&self, n: usize) -> &[f64] {
        let m = self.grid.len();
        &self.values[n * m..(n + 1) * m]
    }

    /// Matrix of `sum_i phi_m(x_i) phi_n(x_i) dx`.
    pub fn overlap_matrix(&self) -> Vec<Vec<f64>> {
        let dx = self.grid.spacing();
        (0..self.modes())
            .map(|a| {
                (0..self.modes())
                    .map(|b| {
                        self.mode(a).iter().zip(self.mode(b)).map(|(p, q)| p * q).sum::<f64>() * dx
                    })
                    .collect()
            })
            .collect()
    }

    pub fn orthonormality_deviation(&self) -> f64 {
        let overlap = self.overlap_matrix();
        let mut worst: f64 = 0.0;
        for (a, row) in overlap.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// `Psi(x_i) = sum_n alpha_n phi_n(x_i)`.
    pub fn synthesize(&self, amplitudes: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.modes(), amplitudes.len())?;
        let mut profile = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (n, &a) in amplitudes.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (p, &phi) in profile.iter_mut().zip(self.mode(n)) {
                *p += a * phi;
            }
        }
        Ok(profile)
    }

    /// Amplitudes `alpha_n = sum_i phi_n(x_i) Psi(x_i) dx` of a profile.
    pub fn project(&self, profile: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.grid.len(), profile.len())?;
        let dx = self.grid.spacing();
        Ok((0..self.modes())
            .map(|n| self.mode(n).iter().zip(profile).map(|(&phi, &p)| p * phi).sum::<Complex64>() * dx)
            .collect())
    }

    pub fn quadrature(&self, samples: &[f64]) -> Result<f64> {
        self.grid.quadrature(samples)
    }
}
