use std::borrow::Cow;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fft, Grid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Physical,
    Fourier,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Physical => "physical",
            Space::Fourier => "fourier",
        }
    }
}

/// Complex samples on a [`Grid`], tagged with the representation they hold.
///
/// Fourier-space values approximate the continuum transform
/// `u_hat(xi) = int u(x) exp(-i xi . x) dx`, so lattice sums weighted by
/// [`Grid::dual_cell_measure`] approximate `(2 pi)^-d int ... d xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
    space: Space,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            space,
        })
    }

    pub fn zeros(grid: Arc<Grid>, space: Space) -> Self {
        let values = vec![Complex64::default(); grid.len()];
        Self {
            grid,
            values,
            space,
        }
    }

    /// Samples `f(x)` at every physical grid point.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.x_at(i))).collect();
        Self {
            grid,
            values,
            space: Space::Physical,
        }
    }

    /// Real-valued profile sampled in physical space.
    pub fn from_real_fn(grid: Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Builds a Fourier-space field from `f(xi)` evaluated on the dual lattice.
    pub fn from_spectrum_fn(grid: Arc<Grid>, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.xi_at(i))).collect();
        Self {
            grid,
            values,
            space: Space::Fourier,
        }
    }

    /// Seeded random field whose spectrum is confined to `|k| <= band` on every axis.
    pub fn random_band_limited(grid: Arc<Grid>, seed: u64, band: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![Complex64::default(); grid.len()];
        for (i, v) in values.iter_mut().enumerate() {
            let m = grid.mode_at(i);
            if (0..grid.dim()).all(|a| m[a].unsigned_abs() as usize <= band) {
                *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        Self {
            grid,
            values,
            space: Space::Fourier,
        }
        .into_physical()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn space(&self) -> Space {
        self.space
    }

    fn expect(&self, space: Space) -> Result<()> {
        if self.space == space {
            Ok(())
        } else {
            Err(Error::WrongSpace {
                expected: space.name(),
                found: self.space.name(),
            })
        }
    }

    /// Forward transform; the field must be in physical space.
    pub fn to_fourier(&self) -> Result<Field> {
        self.expect(Space::Physical)?;
        Ok(self.clone().into_fourier())
    }

    /// Inverse transform; the field must be in Fourier space.
    pub fn to_physical(&self) -> Result<Field> {
        self.expect(Space::Fourier)?;
        Ok(self.clone().into_physical())
    }

    /// Converts to Fourier space if needed.
    pub fn into_fourier(mut self) -> Field {
        if self.space == Space::Physical {
            fft::forward(&self.grid, &mut self.values);
            self.space = Space::Fourier;
        }
        self
    }

    /// Converts to physical space if needed.
    pub fn into_physical(mut self) -> Field {
        if self.space == Space::Fourier {
            fft::inverse(&self.grid, &mut self.values);
            self.space = Space::Physical;
        }
        self
    }

    pub fn into_space(self, space: Space) -> Field {
        match space {
            Space::Physical => self.into_physical(),
            Space::Fourier => self.into_fourier(),
        }
    }

    /// Fourier coefficients, transforming a copy only when necessary.
    pub fn fourier_values(&self) -> Cow<'_, [Complex64]> {
        match self.space {
            Space::Fourier => Cow::Borrowed(&self.values),
            Space::Physical => Cow::Owned(self.clone().into_fourier().values),
        }
    }

    /// Physical samples, transforming a copy only when necessary.
    pub fn physical_values(&self) -> Cow<'_, [Complex64]> {
        match self.space {
            Space::Physical => Cow::Borrowed(&self.values),
            Space::Fourier => Cow::Owned(self.clone().into_physical().values),
        }
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            space: self.space,
        }
    }

    /// `self - other`, taken in `self`'s representation.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(
        &self,
        other: &Field,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let rhs = match self.space {
            Space::Physical => other.physical_values(),
            Space::Fourier => other.fourier_values(),
        };
        Ok(Field {
            grid: self.grid.clone(),
            values: self.values.iter().zip(rhs.iter()).map(|(a, b)| op(*a, *b)).collect(),
            space: self.space,
        })
    }

    /// Pointwise map over physical samples.
    pub fn map_physical(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        let values = self.physical_values().iter().map(|v| f(*v)).collect();
        Field {
            grid: self.grid.clone(),
            values,
            space: Space::Physical,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Same samples reinterpreted on another grid with the same resolution.
    /// Used for co-scaled grid pairs, where `u(x) = c f(x / s)` has identical samples.
    pub fn regrid(&self, grid: Arc<Grid>) -> Result<Field> {
        if grid.spec().points != self.grid.spec().points {
            return Err(Error::GridMismatch);
        }
        let values = self.physical_values().into_owned();
        Ok(Field {
            grid,
            values,
            space: Space::Physical,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1() -> Arc<Grid> {
        Arc::new(Grid::new(1, 16.0, 256).unwrap())
    }

    #[test]
    fn constant_lands_in_zero_mode() {
        let g = grid1();
        let f = Field::from_real_fn(g.clone(), |_| 1.0).to_fourier().unwrap();
        let v = f.values();
        // u_hat(0) = int_{-L}^{L} 1 dx = 2L
        assert!((v[0].re - 32.0).abs() < 1e-12);
        assert!(v[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn single_mode_is_a_delta() {
        let g = grid1();
        let k0 = 5usize;
        let xi0 = g.wavenumbers(0)[k0];
        let f = Field::from_fn(g.clone(), |x| Complex64::from_polar(1.0, xi0 * x[0]));
        let f = f.to_fourier().unwrap();
        for (i, v) in f.values().iter().enumerate() {
            if i == k0 {
                assert!((v.re - 32.0).abs() < 1e-11 && v.im.abs() < 1e-11);
            } else {
                assert!(v.norm() < 1e-11, "mode {i} = {v}");
            }
        }
    }

    #[test]
    fn round_trip_is_identity() {
        for g in [grid1(), Arc::new(Grid::new(2, 4.0, 32).unwrap())] {
            let f = Field::random_band_limited(g.clone(), 7, 100);
            let back = f.to_fourier().unwrap().to_physical().unwrap();
            let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in f.values().iter().zip(back.values()) {
                assert!((a - b).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn wrong_space_is_an_error() {
        let f = Field::zeros(grid1(), Space::Fourier);
        assert!(matches!(f.to_fourier(), Err(Error::WrongSpace { .. })));
        let p = Field::zeros(grid1(), Space::Physical);
        assert!(matches!(p.to_physical(), Err(Error::WrongSpace { .. })));
    }

    #[test]
    fn two_d_transform_matches_separable_product() {
        let g = Arc::new(Grid::new(2, 8.0, 64).unwrap());
        let f = Field::from_real_fn(g.clone(), |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
        let hat = f.to_fourier().unwrap();
        // Gaussian transforms to 2 pi exp(-|xi|^2 / 2).
        for (i, v) in hat.values().iter().enumerate() {
            let want = 2.0 * std::f64::consts::PI * (-g.xi_squared()[i] / 2.0).exp();
            assert!((v.re - want).abs() < 1e-10 && v.im.abs() < 1e-10, "{i}: {v} vs {want}");
        }
    }
}
