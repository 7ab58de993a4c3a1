use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(planner: &mut FftPlanner<f64>, len: usize) -> Self {
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }
}

/// The discrete torus `x_j = 2πj/N`, `j = 0..N`, with its FFT plans.
///
/// Coefficients are stored in FFT order: index `k < N/2` holds wavenumber
/// `k`, index `k ≥ N/2` holds `k − N`. Index `N/2` is the Nyquist mode
/// `l = −N/2`.
///
/// Plans are shared and internally synchronized, so a grid can be used from
/// many threads through an `Arc`.
pub struct SpectralGrid {
    n: usize,
    plans: Plans,
    padded: Mutex<HashMap<usize, Arc<Plans>>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid").field("n", &self.n).finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl SpectralGrid {
    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans::new(&mut planner, n);
        Ok(Arc::new(Self {
            n,
            plans,
            padded: Mutex::new(HashMap::new()),
        }))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Wavenumber of coefficient index `k`, in `−N/2..N/2`.
    #[inline]
    pub fn wavenumber(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Wavenumber used by operators with an odd symbol (odd derivatives,
    /// translations, the Airy group). The Nyquist mode has no real
    /// counterpart under such operators, so it is assigned wavenumber 0.
    #[inline]
    pub fn odd_wavenumber(&self, k: usize) -> i64 {
        if k == self.n / 2 {
            0
        } else {
            self.wavenumber(k)
        }
    }

    pub fn wavenumbers(&self) -> Vec<i64> {
        (0..self.n).map(|k| self.wavenumber(k)).collect()
    }

    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Index of wavenumber `l`, if representable.
    pub fn index_of(&self, l: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if l >= -half && l < half {
            Some(if l >= 0 { l as usize } else { (l + self.n as i64) as usize })
        } else {
            None
        }
    }

    /// Samples to coefficients, scaled by `1/N` so `û_0` is the mean.
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(samples.len(), self.n);
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.plans.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Coefficients to samples. The imaginary residue is discarded.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.n);
        let mut buf = coeffs.to_vec();
        self.plans.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Like [`inverse`](Self::inverse) but keeps the imaginary parts.
    pub fn inverse_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.plans.inverse.process(&mut buf);
        buf
    }

    fn padded_plans(&self, m: usize) -> Arc<Plans> {
        let mut cache = self.padded.lock().expect("plan cache poisoned");
        cache
            .entry(m)
            .or_insert_with(|| Arc::new(Plans::new(&mut FftPlanner::new(), m)))
            .clone()
    }

    /// Samples of the trigonometric interpolant on a finer grid of `m ≥ N`
    /// points. The Nyquist coefficient is split evenly over `±N/2`.
    pub fn padded_samples(&self, coeffs: &[Complex64], m: usize) -> Vec<f64> {
        debug_assert!(m >= self.n);
        if m == self.n {
            return self.inverse(coeffs);
        }
        let half = self.n / 2;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..half].copy_from_slice(&coeffs[..half]);
        for k in half + 1..self.n {
            buf[m - (self.n - k)] = coeffs[k];
        }
        let nyq = coeffs[half] * 0.5;
        buf[half] = nyq;
        buf[m - half] = nyq;
        self.padded_plans(m).inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Coefficients (truncated to this grid) of samples given on `m ≥ N`
    /// points. Energy at `±N/2` folds into the Nyquist mode.
    pub fn truncate_from_padded(&self, samples: &[f64]) -> Vec<Complex64> {
        let m = samples.len();
        if m == self.n {
            return self.forward(samples);
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.padded_plans(m).forward.process(&mut buf);
        let scale = 1.0 / m as f64;
        let half = self.n / 2;
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        out[..half].copy_from_slice(&buf[..half]);
        for k in half + 1..self.n {
            out[k] = buf[m - (self.n - k)];
        }
        out[half] = Complex64::new((buf[half] + buf[m - half]).re, 0.0);
        out.iter_mut().for_each(|c| *c *= scale);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(SpectralGrid::new(2).unwrap_err(), Error::InvalidGrid(2));
        assert_eq!(SpectralGrid::new(7).unwrap_err(), Error::InvalidGrid(7));
        assert!(SpectralGrid::new(4).is_ok());
    }

    #[test]
    fn points_and_wavenumbers() {
        let g = SpectralGrid::new(8).unwrap();
        let x = g.points();
        assert_eq!(x[0], 0.0);
        assert!(x.windows(2).all(|w| w[1] > w[0]));
        assert!(*x.last().unwrap() < TAU);
        assert_eq!(g.wavenumbers(), vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.odd_wavenumber(4), 0);
        assert_eq!(g.index_of(-1), Some(7));
        assert_eq!(g.index_of(4), None);
    }

    #[test]
    fn padded_round_trip_is_exact() {
        let g = SpectralGrid::new(16).unwrap();
        let s: Vec<f64> = (0..16).map(|j| ((j * 7 % 5) as f64).sin()).collect();
        let c = g.forward(&s);
        for m in [16, 24, 40] {
            let back = g.truncate_from_padded(&g.padded_samples(&c, m));
            for (a, b) in back.iter().zip(&c) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }
}
