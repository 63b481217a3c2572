use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metadata that fully determines a [`Grid`]; this is what gets serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    /// Half-period per axis: axis `a` covers `[-extent[a], extent[a])`.
    pub extent: Vec<f64>,
    pub points: Vec<usize>,
}

/// Periodic sampling lattice on `[-L, L)^d` together with its dual lattice.
///
/// Samples are stored row-major with axis 0 slowest. Dual-lattice arrays are
/// kept in FFT order (`k = 0, 1, .., N/2-1, -N/2, .., -1`), with physical
/// wavenumber `xi = pi k / L`.
#[derive(Clone)]
pub struct Grid {
    spec: GridSpec,
    coords: Vec<Vec<f64>>,
    modes: Vec<Vec<i64>>,
    wavenumbers: Vec<Vec<f64>>,
    xi_sq: Vec<f64>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.spec.dim)
            .field("extent", &self.spec.extent)
            .field("points", &self.spec.points)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Grid {
    /// Same extent and resolution on every axis.
    pub fn new(dim: usize, extent: f64, points: usize) -> Result<Self> {
        Self::from_spec(GridSpec {
            dim,
            extent: vec![extent; dim.max(1)],
            points: vec![points; dim.max(1)],
        })
    }

    pub fn from_spec(spec: GridSpec) -> Result<Self> {
        if !(1..=2).contains(&spec.dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {}",
                spec.dim
            )));
        }
        if spec.extent.len() != spec.dim || spec.points.len() != spec.dim {
            return Err(Error::InvalidGrid(
                "extent and points need one entry per axis".into(),
            ));
        }
        for (&l, &n) in spec.extent.iter().zip(&spec.points) {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("extent must be positive, got {l}")));
            }
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "points per axis must be a power of two >= 8, got {n}"
                )));
            }
        }

        let mut coords = Vec::with_capacity(spec.dim);
        let mut modes = Vec::with_capacity(spec.dim);
        let mut wavenumbers: Vec<Vec<f64>> = Vec::with_capacity(spec.dim);
        for (&l, &n) in spec.extent.iter().zip(&spec.points) {
            // x_j = -L + 2L j / N keeps spacing * N == 2L exactly.
            coords.push((0..n).map(|j| -l + 2.0 * l * j as f64 / n as f64).collect());
            let k: Vec<i64> = (0..n as i64)
                .map(|j| if j < n as i64 / 2 { j } else { j - n as i64 })
                .collect();
            wavenumbers.push(k.iter().map(|&k| PI * k as f64 / l).collect());
            modes.push(k);
        }

        let xi_sq = match spec.dim {
            1 => wavenumbers[0].iter().map(|x| x * x).collect(),
            _ => {
                let (a, b) = (&wavenumbers[0], &wavenumbers[1]);
                let mut v = Vec::with_capacity(a.len() * b.len());
                for x in a {
                    for y in b {
                        v.push(x * x + y * y);
                    }
                }
                v
            }
        };

        Ok(Self {
            spec,
            coords,
            modes,
            wavenumbers,
            xi_sq,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.spec.extent[axis]
    }

    pub fn points(&self, axis: usize) -> usize {
        self.spec.points[axis]
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.spec.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.spec.extent[axis] / self.spec.points[axis] as f64
    }

    /// Physical volume of one sampling cell, `prod_a h_a`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Quadrature weight of one dual cell including the `(2 pi)^-d` factor,
    /// i.e. `prod_a 1 / (2 L_a)`.
    pub fn dual_cell_measure(&self) -> f64 {
        self.spec.extent.iter().map(|l| 0.5 / l).product()
    }

    pub fn coords(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    pub fn modes(&self, axis: usize) -> &[i64] {
        &self.modes[axis]
    }

    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.wavenumbers[axis]
    }

    /// `|xi|^2` for every dual-lattice point, in storage order.
    pub fn xi_squared(&self) -> &[f64] {
        &self.xi_sq
    }

    /// Wavenumber vector of the dual point stored at `index`.
    pub fn xi_at(&self, index: usize) -> [f64; 2] {
        match self.dim() {
            1 => [self.wavenumbers[0][index], 0.0],
            _ => {
                let n1 = self.points(1);
                [
                    self.wavenumbers[0][index / n1],
                    self.wavenumbers[1][index % n1],
                ]
            }
        }
    }

    /// Integer mode vector of the dual point stored at `index`.
    pub fn mode_at(&self, index: usize) -> [i64; 2] {
        match self.dim() {
            1 => [self.modes[0][index], 0],
            _ => {
                let n1 = self.points(1);
                [self.modes[0][index / n1], self.modes[1][index % n1]]
            }
        }
    }

    /// Position of the physical sample stored at `index`.
    pub fn x_at(&self, index: usize) -> [f64; 2] {
        match self.dim() {
            1 => [self.coords[0][index], 0.0],
            _ => {
                let n1 = self.points(1);
                [self.coords[0][index / n1], self.coords[1][index % n1]]
            }
        }
    }

    /// Storage index of the zero mode (always 0 in FFT order).
    pub fn zero_mode(&self) -> usize {
        0
    }

    /// Co-scaled grid: every extent multiplied by `factor`, same resolution.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        for l in &mut spec.extent {
            *l *= factor;
        }
        Self::from_spec(spec)
    }

    /// True when the mode lies in the top third of the dual spectrum on any axis.
    pub fn in_top_third(&self, index: usize) -> bool {
        let m = self.mode_at(index);
        (0..self.dim()).any(|a| 3 * m[a].unsigned_abs() as usize > self.points(a))
    }
}

/// Builds a grid; `points` must be a power of two no smaller than 8.
pub fn make_grid(dim: usize, extent: f64, points: usize) -> Result<Grid> {
    Grid::new(dim, extent, points)
}
