use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::{cis_product, Dealias, Propagator, SobolevIndex, SpectralGrid};
use crate::error::{Error, Result};

/// A real periodic function on a [`SpectralGrid`].
///
/// A field carries two views, grid samples and Fourier coefficients. It is
/// built from either one and the other is computed on first access, then
/// cached. Fields are immutable; every operation returns a new field.
#[derive(Clone)]
pub struct Field {
    grid: Arc<SpectralGrid>,
    samples: OnceLock<Vec<f64>>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("n", &self.grid.len())
            .field("samples", &self.samples())
            .finish()
    }
}

#[inline]
fn i_pow(m: u32) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl Field {
    /// Field from grid samples. Rejects wrong lengths and non-finite values.
    pub fn from_samples(grid: &Arc<SpectralGrid>, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: samples.len(),
            });
        }
        if let Some(j) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self::from_samples_raw(grid, samples))
    }

    pub(crate) fn from_samples_raw(grid: &Arc<SpectralGrid>, samples: Vec<f64>) -> Self {
        Self {
            grid: grid.clone(),
            samples: OnceLock::from(samples),
            coeffs: OnceLock::new(),
        }
    }

    /// Field from Fourier coefficients (FFT order). The input is projected
    /// onto real fields: `û_{−l}` is replaced by the Hermitian average and
    /// the Nyquist coefficient by its real part.
    pub fn from_coeffs(grid: &Arc<SpectralGrid>, mut coeffs: Vec<Complex64>) -> Result<Self> {
        let n = grid.len();
        if coeffs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: coeffs.len(),
            });
        }
        coeffs[0].im = 0.0;
        coeffs[n / 2].im = 0.0;
        for k in 1..n / 2 {
            let avg = (coeffs[k] + coeffs[n - k].conj()) * 0.5;
            coeffs[k] = avg;
            coeffs[n - k] = avg.conj();
        }
        Ok(Self::from_coeffs_raw(grid, coeffs))
    }

    /// Caller guarantees Hermitian symmetry.
    pub(crate) fn from_coeffs_raw(grid: &Arc<SpectralGrid>, coeffs: Vec<Complex64>) -> Self {
        Self {
            grid: grid.clone(),
            samples: OnceLock::new(),
            coeffs: OnceLock::from(coeffs),
        }
    }

    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(f64) -> f64) -> Self {
        let samples = (0..grid.len()).map(|j| f(grid.point(j))).collect();
        Self::from_samples_raw(grid, samples)
    }

    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<SpectralGrid>, c: f64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        coeffs[0] = Complex64::new(c, 0.0);
        Self {
            grid: grid.clone(),
            samples: OnceLock::from(vec![c; grid.len()]),
            coeffs: OnceLock::from(coeffs),
        }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[f64] {
        self.samples.get_or_init(|| {
            let coeffs = self.coeffs.get().expect("field has neither view");
            self.grid.inverse(coeffs)
        })
    }

    /// Fourier coefficients in FFT order.
    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| {
            let samples = self.samples.get().expect("field has neither view");
            self.grid.forward(samples)
        })
    }

    /// Owned copy of the coefficient vector.
    pub fn forward_transform(&self) -> Vec<Complex64> {
        self.coeffs().to_vec()
    }

    /// Coefficient of wavenumber `l`, zero if `l` is not on the grid.
    pub fn mode(&self, l: i64) -> Complex64 {
        self.grid
            .index_of(l)
            .map_or(Complex64::new(0.0, 0.0), |k| self.coeffs()[k])
    }

    fn check_grid(&self, other: &Field) -> Result<()> {
        if *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.grid.len(),
                right: other.grid.len(),
            })
        }
    }

    pub(crate) fn map_modes(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Field {
        let coeffs = self.coeffs().iter().enumerate().map(|(k, &c)| f(k, c)).collect();
        Field::from_coeffs_raw(&self.grid, coeffs)
    }

    /// `e^{t∂x³} f`. Use a negative `t` (or [`Field::free_flow`]) for the
    /// linear KdV propagator.
    pub fn apply_semigroup(&self, t: f64) -> Field {
        if t == 0.0 {
            return self.clone();
        }
        Propagator::new(&self.grid, t).apply(self)
    }

    /// `e^{−t∂x³} f`: the solution of `∂t u + ∂x³ u = 0` at time `t`.
    pub fn free_flow(&self, t: f64) -> Field {
        self.apply_semigroup(-t)
    }

    /// `∂x^m f`.
    pub fn derivative(&self, m: u32) -> Field {
        if m == 0 {
            return self.clone();
        }
        let unit = i_pow(m);
        let odd = m % 2 == 1;
        self.map_modes(|k, c| {
            let l = if odd {
                self.grid.odd_wavenumber(k)
            } else {
                self.grid.wavenumber(k)
            };
            c * unit * (l as f64).powi(m as i32)
        })
    }

    /// `∂x^{−m} f = Σ_{l≠0} (il)^{−m} f̂_l e^{ilx}`. The zero mode is dropped.
    pub fn inverse_derivative(&self, m: u32) -> Field {
        if m == 0 {
            return self.clone();
        }
        let unit = i_pow(m).inv();
        let odd = m % 2 == 1;
        self.map_modes(|k, c| {
            let l = if odd {
                self.grid.odd_wavenumber(k)
            } else {
                self.grid.wavenumber(k)
            };
            if l == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                c * unit / (l as f64).powi(m as i32)
            }
        })
    }

    /// `f(x − a)`: translation by `a` via the phases `e^{−ila}`.
    pub fn shift(&self, a: f64) -> Field {
        if a == 0.0 {
            return self.clone();
        }
        self.map_modes(|k, c| c * cis_product(-a, self.grid.odd_wavenumber(k) as f64))
    }

    pub fn sobolev_norm(&self, s: SobolevIndex) -> f64 {
        self.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| s.weight_squared(self.grid.wavenumber(k)) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `∫_T f dx = 2π f̂_0`.
    pub fn mass(&self) -> f64 {
        TAU * self.mean()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs()[0].re
    }

    /// Pointwise product.
    pub fn multiply(&self, other: &Field, dealias: Dealias) -> Result<Field> {
        self.check_grid(other)?;
        Ok(self.multiply_unchecked(other, dealias))
    }

    pub(crate) fn multiply_unchecked(&self, other: &Field, dealias: Dealias) -> Field {
        match dealias {
            Dealias::Off => {
                let samples = self
                    .samples()
                    .iter()
                    .zip(other.samples())
                    .map(|(a, b)| a * b)
                    .collect();
                Field::from_samples_raw(&self.grid, samples)
            }
            Dealias::ThreeHalves => {
                let m = 3 * self.len() / 2;
                self.padded_product(&[other], m)
            }
        }
    }

    /// Product of `self` and `others` evaluated on an `m`-point grid, then
    /// truncated back to this grid.
    pub(crate) fn padded_product(&self, others: &[&Field], m: usize) -> Field {
        let mut acc = self.grid.padded_samples(self.coeffs(), m);
        for f in others {
            let s = self.grid.padded_samples(f.coeffs(), m);
            acc.iter_mut().zip(&s).for_each(|(a, b)| *a *= b);
        }
        Field::from_coeffs_raw(&self.grid, self.grid.truncate_from_padded(&acc))
    }

    /// Product of several fields with no aliasing into the retained modes:
    /// the padded grid has `(k+1)N/2` points for `k` factors.
    pub fn product_exact(factors: &[&Field]) -> Result<Field> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::Precondition("empty product".into()))?;
        for f in rest {
            first.check_grid(f)?;
        }
        let n = first.len();
        let mut m = (factors.len() + 1) * n / 2;
        m += m % 2;
        Ok(first.padded_product(rest, m.max(n)))
    }

    pub fn evaluate_offgrid(&self, y: f64) -> f64 {
        self.evaluate_with_derivative(y).0
    }

    pub fn evaluate_offgrid_derivative(&self, y: f64) -> f64 {
        self.evaluate_with_derivative(y).1
    }

    /// Value and derivative of the trigonometric interpolant at `y`, by
    /// direct summation of the Fourier series (`O(N)`).
    pub fn evaluate_with_derivative(&self, y: f64) -> (f64, f64) {
        let c = self.coeffs();
        let n = self.len();
        let half = n / 2;
        let y = y.rem_euclid(TAU);
        let step = Complex64::from_polar(1.0, y);
        let mut z = step;
        let mut value = Complex64::new(0.0, 0.0);
        let mut slope = Complex64::new(0.0, 0.0);
        for (l, coeff) in c.iter().enumerate().take(half).skip(1) {
            let term = coeff * z;
            value += term;
            slope += term * (l as f64);
            z *= step;
        }
        let nyq = c[half].re;
        let (ns, nc) = (half as f64 * y).sin_cos();
        let v = c[0].re + 2.0 * value.re + nyq * nc;
        // d/dy of 2 Re(Σ c_l e^{ily}) is −2 Σ l Im(c_l e^{ily}).
        let d = -2.0 * slope.im - nyq * half as f64 * ns;
        (v, d)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max_j |f(x_j) − g(x_j)|`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.samples()
            .iter()
            .zip(other.samples())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max|f − g| / max|g|`, or the absolute difference when `g = 0`.
    pub fn relative_max_diff(&self, reference: &Field) -> f64 {
        let scale = reference.max_abs();
        let d = self.max_abs_diff(reference);
        if scale > 0.0 {
            d / scale
        } else {
            d
        }
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        Ok(self.axpy(1.0, other))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        Ok(self.axpy(-1.0, other))
    }

    /// `self + a·other` in coefficient space.
    pub(crate) fn axpy(&self, a: f64, other: &Field) -> Field {
        let coeffs = self
            .coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(x, y)| x + y * a)
            .collect();
        Field::from_coeffs_raw(&self.grid, coeffs)
    }

    pub fn scale(&self, a: f64) -> Field {
        self.map_modes(|_, c| c * a)
    }

    pub fn add_constant(&self, c: f64) -> Field {
        let mut coeffs = self.coeffs().to_vec();
        coeffs[0] += c;
        Field::from_coeffs_raw(&self.grid, coeffs)
    }

    /// The same field with its zero Fourier mode removed.
    pub fn without_mean(&self) -> Field {
        let mut coeffs = self.coeffs().to_vec();
        coeffs[0] = Complex64::new(0.0, 0.0);
        Field::from_coeffs_raw(&self.grid, coeffs)
    }

    /// Largest `|l|` with `|û_l| > tol·max|û|`; 0 for constants.
    pub fn bandwidth(&self, tol: f64) -> usize {
        let c = self.coeffs();
        let peak = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if peak == 0.0 {
            return 0;
        }
        (0..self.len())
            .filter(|&k| c[k].norm() > tol * peak)
            .map(|k| self.grid.wavenumber(k).unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Largest imaginary part left by an inverse transform of the
    /// coefficients, relative to `max|samples|`.
    pub fn imaginary_residue(&self) -> f64 {
        let z = self.grid.inverse_complex(self.coeffs());
        let im = z.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
        let scale = self.max_abs();
        if scale > 0.0 {
            im / scale
        } else {
            im
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn grid(n: usize) -> Arc<SpectralGrid> {
        SpectralGrid::new(n).unwrap()
    }

    fn assert_fields_close(a: &Field, b: &Field, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "max diff {d:e} > {tol:e}");
    }

    #[test]
    fn forward_transform_of_constant_and_cosine() {
        let g = grid(16);
        let one = Field::from_fn(&g, |_| 1.0);
        let c = one.forward_transform();
        assert!((c[0].re - 1.0).abs() < 1e-15);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-15));

        let cos = Field::from_fn(&g, f64::cos);
        for l in -8..8i64 {
            let expected = if l.abs() == 1 { 0.5 } else { 0.0 };
            assert!((cos.mode(l) - Complex64::new(expected, 0.0)).norm() < 1e-15, "l={l}");
        }
    }

    #[test]
    fn semigroup_examples() {
        let g = grid(32);
        let cos = Field::from_fn(&g, f64::cos);
        assert_fields_close(&cos.apply_semigroup(0.0), &cos, 0.0);
        assert_fields_close(&Field::zeros(&g).free_flow(0.3), &Field::zeros(&g), 0.0);
        let tau = 0.37;
        let expected = Field::from_fn(&g, |x| (x + tau).cos());
        assert_fields_close(&cos.free_flow(tau), &expected, 1e-14);
    }

    #[test]
    fn derivative_examples() {
        let g = grid(16);
        let sin = Field::from_fn(&g, f64::sin);
        assert_fields_close(&sin.derivative(1), &Field::from_fn(&g, f64::cos), 1e-14);
        let cos2 = Field::from_fn(&g, |x| (2.0 * x).cos());
        assert_fields_close(&cos2.derivative(2), &cos2.scale(-4.0), 1e-13);
        assert_fields_close(&Field::constant(&g, 3.0).derivative(1), &Field::zeros(&g), 0.0);
        assert_eq!(sin.derivative(3).mean(), 0.0);
    }

    #[test]
    fn inverse_derivative_examples() {
        let g = grid(16);
        let sin = Field::from_fn(&g, f64::sin);
        let mcos = Field::from_fn(&g, |x| -x.cos());
        assert_fields_close(&sin.inverse_derivative(1), &mcos, 1e-15);
        let cos2 = Field::from_fn(&g, |x| (2.0 * x).cos());
        assert_fields_close(&cos2.inverse_derivative(2), &cos2.scale(-0.25), 1e-15);
        let c = Field::constant(&g, 2.5).inverse_derivative(1);
        assert_fields_close(&c, &Field::zeros(&g), 0.0);
    }

    #[test]
    fn sobolev_norm_examples() {
        let g = grid(16);
        assert_eq!(Field::zeros(&g).sobolev_norm(SobolevIndex::L2), 0.0);
        let sin = Field::from_fn(&g, f64::sin);
        assert!((sin.sobolev_norm(SobolevIndex::L2) - FRAC_1_SQRT_2).abs() < 1e-15);
        let h1 = SobolevIndex::new(1.0).unwrap();
        assert!((sin.sobolev_norm(h1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mass_examples() {
        let g = grid(16);
        assert!((Field::constant(&g, 1.0).mass() - TAU).abs() < 1e-15);
        assert!(Field::from_fn(&g, f64::sin).mass().abs() < 1e-15);
        let f = Field::from_fn(&g, |x| 2.0 + x.cos());
        assert!((f.mass() - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn multiply_examples() {
        let g = grid(8);
        let cos = Field::from_fn(&g, f64::cos);
        let zero = Field::zeros(&g);
        let expected = Field::from_fn(&g, |x| 0.5 * (1.0 + (2.0 * x).cos()));
        for d in [Dealias::Off, Dealias::ThreeHalves] {
            assert_fields_close(&cos.multiply(&zero, d).unwrap(), &zero, 0.0);
            assert_fields_close(&cos.multiply(&cos, d).unwrap(), &expected, 1e-15);
        }
        let other = Field::zeros(&grid(16));
        assert_eq!(
            cos.multiply(&other, Dealias::Off).unwrap_err(),
            Error::GridMismatch { left: 8, right: 16 }
        );
    }

    #[test]
    fn shift_examples() {
        let g = grid(16);
        let sin = Field::from_fn(&g, f64::sin);
        assert_fields_close(&sin.shift(0.0), &sin, 0.0);
        let mcos = Field::from_fn(&g, |x| -x.cos());
        assert_fields_close(&sin.shift(PI / 2.0), &mcos, 1e-15);
    }

    #[test]
    fn offgrid_examples() {
        let g = grid(16);
        let cos = Field::from_fn(&g, f64::cos);
        assert!((cos.evaluate_offgrid(PI / 3.0) - 0.5).abs() < 1e-15);
        let sin = Field::from_fn(&g, f64::sin);
        assert!((sin.evaluate_offgrid_derivative(0.0) - 1.0).abs() < 1e-14);
        // reduced mod 2π
        assert!((cos.evaluate_offgrid(PI / 3.0 + 2.0 * TAU) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn offgrid_includes_nyquist_cosine() {
        let g = grid(8);
        let f = Field::from_fn(&g, |x| (4.0 * x).cos() + 0.25);
        for j in 0..8 {
            let x = g.point(j);
            assert!((f.evaluate_offgrid(x) - f.samples()[j]).abs() < 1e-14);
        }
        let y = 0.3;
        assert!((f.evaluate_offgrid(y) - ((4.0 * y).cos() + 0.25)).abs() < 1e-14);
        assert!((f.evaluate_offgrid_derivative(y) + 4.0 * (4.0 * y).sin()).abs() < 1e-13);
    }

    #[test]
    fn from_samples_validates() {
        let g = grid(4);
        assert_eq!(
            Field::from_samples(&g, vec![0.0; 3]).unwrap_err(),
            Error::LengthMismatch { expected: 4, actual: 3 }
        );
        assert_eq!(
            Field::from_samples(&g, vec![0.0, f64::NAN, 0.0, 0.0]).unwrap_err(),
            Error::NonFinite(1)
        );
    }

    #[test]
    fn from_coeffs_projects_onto_real_fields() {
        let g = grid(8);
        let mut c = vec![Complex64::new(0.0, 0.0); 8];
        c[1] = Complex64::new(1.0, 1.0);
        c[0] = Complex64::new(0.5, 0.2);
        let f = Field::from_coeffs(&g, c).unwrap();
        assert_eq!(f.mode(-1), Complex64::new(0.5, -0.5));
        assert_eq!(f.mode(0), Complex64::new(0.5, 0.0));
        assert!(f.imaginary_residue() < 1e-15);
    }

    #[test]
    fn product_exact_of_three_band_limited_fields() {
        let g = grid(16);
        let s = Field::from_fn(&g, f64::sin);
        let cube = Field::product_exact(&[&s, &s, &s]).unwrap();
        // sin³x = (3 sin x − sin 3x)/4
        let expected = Field::from_fn(&g, |x| (3.0 * x.sin() - (3.0 * x).sin()) / 4.0);
        assert_fields_close(&cube, &expected, 1e-15);
    }

    #[test]
    fn bandwidth_reports_highest_active_mode() {
        let g = grid(32);
        let f = Field::from_fn(&g, |x| x.cos() + 1e-3 * (5.0 * x).sin());
        assert_eq!(f.bandwidth(1e-12), 5);
        assert_eq!(Field::zeros(&g).bandwidth(1e-12), 0);
    }
}
