use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, Grid, Space};
use crate::error::{Error, Result};

/// Zero-mode mass (relative to the squared L2 norm) above which a homogeneous
/// norm with negative exponent is refused.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-8;

/// Spectral mass fraction allowed in the top third of the dual lattice.
pub const ALIASING_TOLERANCE: f64 = 1e-8;

/// `H^gamma` (inhomogeneous, weight `<xi>^gamma`) or `Hdot^gamma` (weight `|xi|^gamma`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevSpec {
    pub gamma: f64,
    pub homogeneous: bool,
}

impl SobolevSpec {
    pub fn inhomogeneous(gamma: f64) -> Self {
        Self {
            gamma,
            homogeneous: false,
        }
    }

    pub fn homogeneous(gamma: f64) -> Self {
        Self {
            gamma,
            homogeneous: true,
        }
    }

    /// Weight evaluated at `|xi|^2`. `0^0` is taken as 1 so that `Hdot^0 = L2`.
    #[inline]
    pub fn weight_sq(&self, xi_sq: f64) -> f64 {
        if self.homogeneous {
            if self.gamma == 0.0 {
                1.0
            } else {
                xi_sq.powf(self.gamma)
            }
        } else {
            (1.0 + xi_sq).powf(self.gamma)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.gamma.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "Sobolev exponent must be finite, got {}",
                self.gamma
            )))
        }
    }

    fn excludes_zero_mode(&self) -> bool {
        self.homogeneous && self.gamma < 0.0
    }
}

/// Weighted space `H^{k,k}`: `sum_{|alpha| <= k} || <x>^{k-|alpha|} D^alpha f ||_{L2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedSpec {
    pub k: i64,
}

fn zero_mode_fraction(grid: &Grid, hat: &[Complex64]) -> f64 {
    let total: f64 = hat.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        0.0
    } else {
        hat[grid.zero_mode()].norm_sqr() / total
    }
}

fn check_zero_mode(grid: &Grid, hat: &[Complex64], gamma: f64) -> Result<()> {
    let fraction = zero_mode_fraction(grid, hat);
    if fraction > ZERO_MODE_TOLERANCE {
        Err(Error::ZeroModeObstruction { gamma, fraction })
    } else {
        Ok(())
    }
}

/// Multiplies `f_hat` pointwise by `m(xi)`; the result comes back in `f`'s space.
///
/// A non-finite multiplier value is only tolerated at `xi = 0`, and only when
/// the zero mode of `f` is negligible; that mode is then set to zero.
pub fn apply_multiplier(f: &Field, m: impl Fn([f64; 2]) -> Complex64) -> Result<Field> {
    let grid = f.grid();
    let mut hat = f.fourier_values().into_owned();
    let mut zero_mode_checked = false;
    for (i, v) in hat.iter_mut().enumerate() {
        let xi = grid.xi_at(i);
        let w = m(xi);
        if w.re.is_finite() && w.im.is_finite() {
            *v *= w;
        } else if i == grid.zero_mode() {
            zero_mode_checked = true;
            *v = Complex64::default();
        } else {
            return Err(Error::NonFiniteMultiplier {
                xi: xi[..grid.dim()].to_vec(),
            });
        }
    }
    if zero_mode_checked {
        let orig = f.fourier_values();
        if zero_mode_fraction(grid, &orig) > ZERO_MODE_TOLERANCE {
            return Err(Error::NonFiniteMultiplier {
                xi: vec![0.0; grid.dim()],
            });
        }
    }
    let out = Field::new(f.grid_arc().clone(), hat, Space::Fourier)?;
    Ok(out.into_space(f.space()))
}

/// Riemann-sum `L^q` norm over the periodic box; `q = inf` gives the max modulus.
pub fn lq_norm(f: &Field, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidArgument(format!("L^q needs q >= 1, got {q}")));
    }
    let vals = f.physical_values();
    if q.is_infinite() {
        return Ok(vals.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let w = f.grid().cell_volume();
    let sum: f64 = if q == 2.0 {
        vals.iter().map(|v| v.norm_sqr()).sum()
    } else {
        vals.iter().map(|v| v.norm().powf(q)).sum()
    };
    Ok((w * sum).powf(1.0 / q))
}

/// L2-based Sobolev norm evaluated by Parseval on the dual lattice.
pub fn sobolev_norm(f: &Field, s: SobolevSpec) -> Result<f64> {
    sobolev_norm_of_spectrum(f.grid(), &f.fourier_values(), s)
}

/// [`sobolev_norm`] for raw Fourier coefficients on `grid`.
pub fn sobolev_norm_of_spectrum(grid: &Grid, hat: &[Complex64], s: SobolevSpec) -> Result<f64> {
    s.validate()?;
    let skip_zero = s.excludes_zero_mode();
    if skip_zero {
        check_zero_mode(grid, hat, s.gamma)?;
    }
    let xi_sq = grid.xi_squared();
    let sum: f64 = hat
        .iter()
        .zip(xi_sq)
        .enumerate()
        .filter(|(i, _)| !(skip_zero && *i == grid.zero_mode()))
        .map(|(_, (v, &x2))| s.weight_sq(x2) * v.norm_sqr())
        .sum();
    Ok((sum * grid.dual_cell_measure()).sqrt())
}

fn multi_indices(dim: usize, k: i64) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for order in 0..=k as u32 {
        match dim {
            1 => out.push([order, 0]),
            _ => {
                for a in 0..=order {
                    out.push([a, order - a]);
                }
            }
        }
    }
    out
}

/// Norm of the weighted Sobolev space `H^{k,k}`; derivatives are spectral.
pub fn weighted_norm(f: &Field, w: WeightedSpec) -> Result<f64> {
    if w.k < 0 {
        return Err(Error::InvalidArgument(format!(
            "weighted order must be >= 0, got {}",
            w.k
        )));
    }
    let grid = f.grid();
    let dim = grid.dim();
    let cell = grid.cell_volume();
    let mut total = 0.0;
    for alpha in multi_indices(dim, w.k) {
        let order = (alpha[0] + alpha[1]) as i64;
        let deriv = if order == 0 {
            f.clone().into_physical()
        } else {
            apply_multiplier(f, |xi| {
                let mut c = Complex64::new(1.0, 0.0);
                for a in 0..dim {
                    c *= Complex64::new(0.0, xi[a]).powu(alpha[a]);
                }
                c
            })?
            .into_physical()
        };
        let power = (w.k - order) as i32;
        let sum: f64 = deriv
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let x = grid.x_at(i);
                let bracket_sq = 1.0 + x[0] * x[0] + x[1] * x[1];
                bracket_sq.powi(power) * v.norm_sqr()
            })
            .sum();
        total += (cell * sum).sqrt();
    }
    Ok(total)
}

/// Fraction of the L2 mass carried by the top third of the dual spectrum.
pub fn spectral_tail_fraction(f: &Field) -> f64 {
    let grid = f.grid();
    let hat = f.fourier_values();
    let mut total = 0.0;
    let mut tail = 0.0;
    for (i, v) in hat.iter().enumerate() {
        let e = v.norm_sqr();
        total += e;
        if grid.in_top_third(i) {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// Spectral mass binned by shell `max_a |k_a|`, lowest shell first.
pub fn shell_spectrum(f: &Field) -> Vec<f64> {
    let grid = f.grid();
    let hat = f.fourier_values();
    let shells = (0..grid.dim()).map(|a| grid.points(a) / 2).max().unwrap_or(0) + 1;
    let mut out = vec![0.0; shells];
    for (i, v) in hat.iter().enumerate() {
        let m = grid.mode_at(i);
        let s = (0..grid.dim()).map(|a| m[a].unsigned_abs() as usize).max().unwrap_or(0);
        out[s.min(shells - 1)] += v.norm_sqr() * grid.dual_cell_measure();
    }
    out
}

/// The 2/3-rule guard: errors with a shell spectrum when the tail is too heavy.
pub fn check_aliasing(f: &Field, limit: f64) -> Result<f64> {
    let fraction = spectral_tail_fraction(f);
    if fraction > limit {
        Err(Error::Aliasing {
            fraction,
            limit,
            spectrum: shell_spectrum(f),
        })
    } else {
        Ok(fraction)
    }
}

/// Norm of `u(x) = amplitude * f(dilation * x)` through the lattice identity
/// `u_hat(xi) = amplitude * dilation^-d * f_hat(xi / dilation)`.
///
/// Equals [`sobolev_norm`] of `u` sampled on the grid co-scaled by `1 / dilation`.
pub fn rescaled_sobolev_norm(f: &Field, amplitude: f64, dilation: f64, s: SobolevSpec) -> Result<f64> {
    s.validate()?;
    let grid = f.grid();
    let hat = f.fourier_values();
    let skip_zero = s.excludes_zero_mode();
    if skip_zero {
        check_zero_mode(grid, &hat, s.gamma)?;
    }
    let d2 = dilation * dilation;
    let sum: f64 = hat
        .iter()
        .zip(grid.xi_squared())
        .enumerate()
        .filter(|(i, _)| !(skip_zero && *i == grid.zero_mode()))
        .map(|(_, (v, &x2))| s.weight_sq(d2 * x2) * v.norm_sqr())
        .sum();
    let d = grid.dim() as i32;
    Ok(amplitude.abs() * (sum * grid.dual_cell_measure() / dilation.powi(d)).sqrt())
}

/// Continuum transform `f_hat(eta) = h sum_j f(x_j) exp(-i eta x_j)` at arbitrary
/// `eta` (one dimension). Exact for fields supported inside the box.
pub struct ContinuumSpectrum<'a> {
    x0: f64,
    h: f64,
    samples: std::borrow::Cow<'a, [Complex64]>,
}

impl<'a> ContinuumSpectrum<'a> {
    pub fn new(f: &'a Field) -> Result<Self> {
        if f.grid().dim() != 1 {
            return Err(Error::InvalidArgument(
                "off-lattice spectra are only available in one dimension".into(),
            ));
        }
        Ok(Self {
            x0: f.grid().coords(0)[0],
            h: f.grid().spacing(0),
            samples: f.physical_values(),
        })
    }

    pub fn eval(&self, eta: f64) -> Complex64 {
        const RESYNC: usize = 64;
        let step = Complex64::from_polar(1.0, -eta * self.h);
        let mut acc = Complex64::default();
        let mut phase = Complex64::default();
        for (j, v) in self.samples.iter().enumerate() {
            if j % RESYNC == 0 {
                phase = Complex64::from_polar(1.0, -eta * (self.x0 + j as f64 * self.h));
            }
            acc += v * phase;
            phase *= step;
        }
        acc * self.h
    }
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Smooth partition: ~1 below `center`, ~0 above, transition width `width`.
fn cutoff(eta: f64, center: f64, width: f64) -> f64 {
    0.5 * libm::erfc((eta - center) / width)
}

/// Continuum version of [`rescaled_sobolev_norm`] for one-dimensional fields.
///
/// `int w(dilation eta)^2 |f_hat(eta)|^2 d eta / 2 pi` is split by a smooth
/// cutoff: near `eta = 0` it is integrated with panels graded down to the
/// scale `1 / dilation` using the off-lattice transform; the remainder is a
/// lattice sum. This resolves weights that vary faster than the dual lattice.
pub fn rescaled_sobolev_norm_continuum(
    f: &Field,
    amplitude: f64,
    dilation: f64,
    s: SobolevSpec,
) -> Result<f64> {
    s.validate()?;
    if !(dilation.is_finite() && dilation > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dilation must be positive, got {dilation}"
        )));
    }
    let grid = f.grid();
    let spectrum = ContinuumSpectrum::new(f)?;
    let n = grid.points(0);
    let d_eta = PI / grid.extent(0);
    let center = (16.0_f64).min(n as f64 / 16.0) * d_eta;
    let width = center / 7.0;
    let eta_c = 2.0 * center;

    let hat = f.fourier_values();
    let d2 = dilation * dilation;
    let lattice: f64 = hat
        .iter()
        .zip(grid.wavenumbers(0))
        .map(|(v, &eta)| {
            let keep = 0.5 * libm::erfc((center - eta.abs()) / width);
            if keep == 0.0 {
                0.0
            } else {
                keep * s.weight_sq(d2 * eta * eta) * v.norm_sqr()
            }
        })
        .sum::<f64>()
        * grid.dual_cell_measure();

    // Panel breakpoints on (0, eta_c]: geometric towards 0, uniform (<= 2 d_eta) outside.
    let inner = (1.0 / (16.0 * dilation)).min(eta_c / 16.0);
    let mut breaks = vec![eta_c];
    let mut b = eta_c;
    while b > inner && breaks.len() < 400 {
        b *= 0.5;
        breaks.push(b);
    }
    breaks.push(0.0);
    breaks.reverse();

    let (nodes, weights) = gauss_legendre(16);
    let mut near = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let pieces = ((hi - lo) / (2.0 * d_eta)).ceil().max(1.0) as usize;
        let span = (hi - lo) / pieces as f64;
        for p in 0..pieces {
            let a = lo + p as f64 * span;
            for (z, wt) in nodes.iter().zip(&weights) {
                let eta = a + 0.5 * span * (z + 1.0);
                let chi = cutoff(eta, center, width);
                if chi == 0.0 {
                    continue;
                }
                let g = spectrum.eval(eta).norm_sqr() + spectrum.eval(-eta).norm_sqr();
                near += 0.5 * span * wt * chi * s.weight_sq(d2 * eta * eta) * g;
            }
        }
    }
    near /= 2.0 * PI;
    Ok(amplitude.abs() * ((lattice + near) / dilation).sqrt())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn gaussian(l: f64, n: usize) -> Field {
        let g = Arc::new(Grid::new(1, l, n).unwrap());
        Field::from_real_fn(g, |x| (-x[0] * x[0] / 2.0).exp())
    }

    #[test]
    fn gaussian_lq_norms() {
        let g = gaussian(16.0, 256);
        assert!((lq_norm(&g, 2.0).unwrap() - PI.powf(0.25)).abs() < 1e-8);
        assert!((lq_norm(&g, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        let want = (PI / 2.0).powf(0.125);
        assert!((lq_norm(&g, 4.0).unwrap() - want).abs() < 1e-8);
        assert!(lq_norm(&g, 0.5).is_err());
    }

    #[test]
    fn gaussian_hdot_one() {
        let g = gaussian(16.0, 256);
        let v = sobolev_norm(&g, SobolevSpec::homogeneous(1.0)).unwrap();
        assert!((v - (PI.sqrt() / 2.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn gamma_zero_is_l2_exactly_up_to_parseval() {
        let g = gaussian(16.0, 256);
        let a = sobolev_norm(&g, SobolevSpec::homogeneous(0.0)).unwrap();
        let b = sobolev_norm(&g, SobolevSpec::inhomogeneous(0.0)).unwrap();
        let l2 = lq_norm(&g, 2.0).unwrap();
        assert!((a - l2).abs() < 1e-13 && (b - l2).abs() < 1e-13);
    }

    #[test]
    fn zero_mode_obstruction() {
        let g = gaussian(16.0, 256);
        let err = sobolev_norm(&g, SobolevSpec::homogeneous(-1.0)).unwrap_err();
        assert!(matches!(err, Error::ZeroModeObstruction { .. }));
        // Inhomogeneous negative norms are fine.
        assert!(sobolev_norm(&g, SobolevSpec::inhomogeneous(-1.0)).is_ok());
    }

    #[test]
    fn multiplier_identities() {
        let g = gaussian(16.0, 256);
        let same = apply_multiplier(&g, |_| Complex64::new(1.0, 0.0)).unwrap();
        for (a, b) in g.values().iter().zip(same.values()) {
            assert!((a - b).norm() < 1e-14);
        }
        let grid = g.grid_arc().clone();
        let xi0 = grid.wavenumbers(0)[32]; // xi = 2 pi
        let wave = Field::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, xi0 * x[0]));
        let out = apply_multiplier(&wave, |xi| Complex64::new(xi[0] * xi[0], 0.0)).unwrap();
        for (a, b) in wave.values().iter().zip(out.values()) {
            assert!((a * xi0 * xi0 - b).norm() < 1e-10);
        }
        let gamma = 1.7;
        let up = apply_multiplier(&g, |xi| {
            Complex64::new((1.0 + xi[0] * xi[0]).powf(gamma / 2.0), 0.0)
        })
        .unwrap();
        let back = apply_multiplier(&up, |xi| {
            Complex64::new((1.0 + xi[0] * xi[0]).powf(-gamma / 2.0), 0.0)
        })
        .unwrap();
        for (a, b) in g.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_multiplier_needs_vanishing_zero_mode() {
        let g = gaussian(16.0, 256);
        let inv = |xi: [f64; 2]| Complex64::new(1.0 / xi[0].abs(), 0.0);
        assert!(matches!(
            apply_multiplier(&g, inv),
            Err(Error::NonFiniteMultiplier { .. })
        ));
        let d = apply_multiplier(&g, |xi| Complex64::new(0.0, xi[0])).unwrap();
        assert!(apply_multiplier(&d, inv).is_ok());
    }

    #[test]
    fn weighted_norm_order_zero_and_one() {
        let g = gaussian(16.0, 256);
        let l2 = lq_norm(&g, 2.0).unwrap();
        assert!((weighted_norm(&g, WeightedSpec { k: 0 }).unwrap() - l2).abs() < 1e-14);
        // ||<x> g|| = sqrt(int (1 + x^2) e^{-x^2}) = sqrt(3 sqrt(pi) / 2); ||g'|| = sqrt(sqrt(pi) / 2).
        let want = (1.5 * PI.sqrt()).sqrt() + (0.5 * PI.sqrt()).sqrt();
        let got = weighted_norm(&g, WeightedSpec { k: 1 }).unwrap();
        assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
        assert!(weighted_norm(&g, WeightedSpec { k: -1 }).is_err());
    }

    #[test]
    fn aliasing_guard() {
        let g = gaussian(16.0, 256);
        assert!(check_aliasing(&g, ALIASING_TOLERANCE).is_ok());
        let grid = g.grid_arc().clone();
        let xi = grid.wavenumbers(0)[120];
        let hi = Field::from_fn(grid, |x| Complex64::from_polar(1.0, xi * x[0]));
        match check_aliasing(&hi, ALIASING_TOLERANCE) {
            Err(Error::Aliasing { fraction, spectrum, .. }) => {
                assert!(fraction > 0.99);
                assert_eq!(spectrum.len(), 129);
            }
            other => panic!("expected aliasing error, got {other:?}"),
        }
    }

    #[test]
    fn rescaled_lattice_matches_direct_construction() {
        let g = gaussian(16.0, 512);
        let spec = SobolevSpec::inhomogeneous(0.7);
        for s in [0.25, 4.0, 32.0] {
            let amp = 3.0;
            let direct_grid = Arc::new(g.grid().scaled(1.0 / s).unwrap());
            let direct = g.regrid(direct_grid).unwrap().scale(Complex64::new(amp, 0.0));
            let a = sobolev_norm(&direct, spec).unwrap();
            let b = rescaled_sobolev_norm(&g, amp, s, spec).unwrap();
            assert!((a - b).abs() < 1e-10 * a, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn continuum_rescaled_agrees_with_lattice_when_resolved() {
        let g = gaussian(32.0, 1024);
        for (gamma, s) in [(0.5, 1.0), (-1.0, 2.0), (1.0, 8.0)] {
            let spec = SobolevSpec::inhomogeneous(gamma);
            let a = rescaled_sobolev_norm(&g, 1.0, s, spec).unwrap();
            let b = rescaled_sobolev_norm_continuum(&g, 1.0, s, spec).unwrap();
            assert!((a - b).abs() < 1e-9 * a, "gamma={gamma}, s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn continuum_rescaled_for_huge_dilation() {
        // u(x) = g(s x): ||u||_{L2}^2 = sqrt(pi) / s exactly.
        let g = gaussian(16.0, 256);
        for s in [1e3, 1e8] {
            let v = rescaled_sobolev_norm_continuum(&g, 1.0, s, SobolevSpec::inhomogeneous(0.0))
                .unwrap();
            assert!((v - (PI.sqrt() / s).sqrt()).abs() < 1e-9 * v);
        }
        // Far below the lattice scale the H^{-2} weight is ~1 near the origin:
        // ||u||^2 ~ (1/s) int <s eta>^{-4} |g_hat|^2 / 2pi -> |g_hat(0)|^2 / (2 pi s^2) * int <t>^{-4} dt
        let s = 1e6;
        let v = rescaled_sobolev_norm_continuum(&g, 1.0, s, SobolevSpec::inhomogeneous(-2.0))
            .unwrap();
        let want = (2.0 * PI / (2.0 * PI * s * s) * (PI / 2.0)).sqrt();
        assert!((v - want).abs() < 1e-4 * want, "{v} vs {want}");
    }

    #[test]
    fn off_lattice_transform_matches_gaussian() {
        let g = gaussian(16.0, 256);
        let spec = ContinuumSpectrum::new(&g).unwrap();
        for eta in [0.0_f64, 0.013, 0.5, 1.37, 3.0] {
            let want = (2.0 * PI).sqrt() * (-eta * eta / 2.0).exp();
            let got = spec.eval(eta);
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((int - 2.0 / 31.0).abs() < 1e-13);
    }
}
