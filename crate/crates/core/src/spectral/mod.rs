//! Fourier representation of real periodic functions on `[0, 2π)`.
//!
//! Conventions used throughout the crate:
//!
//! * `û_l = (1/N) Σ_j u(x_j) e^{−i l x_j}`, so `û_0` is the sample mean and
//!   `u(x) = Σ_l û_l e^{ilx}`.
//! * `‖u‖_{H^γ} = (Σ_l ⟨l⟩^{2γ} |û_l|²)^{1/2}` with `⟨l⟩ = (1 + l²)^{1/2}`.
//! * `e^{t∂x³}` multiplies mode `l` by `e^{t(il)³} = e^{−itl³}`.
//! * Operators with an odd symbol treat the Nyquist mode as wavenumber 0
//!   (see [`SpectralGrid::odd_wavenumber`]).

mod field;
mod grid;

pub use field::Field;
pub use grid::SpectralGrid;

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sobolev smoothness exponent `γ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub const L2: SobolevIndex = SobolevIndex(0.0);

    pub fn new(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma >= 0.0 {
            Ok(Self(gamma))
        } else {
            Err(Error::InvalidConfig(format!("Sobolev index must be >= 0, got {gamma}")))
        }
    }

    #[inline]
    pub fn gamma(self) -> f64 {
        self.0
    }

    /// `⟨l⟩^{2γ}`.
    #[inline]
    pub fn weight_squared(self, l: i64) -> f64 {
        let b = 1.0 + (l as f64) * (l as f64);
        if self.0 == 0.0 {
            1.0
        } else {
            b.powf(self.0)
        }
    }
}

/// Treatment of pointwise products.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Dealias {
    /// Plain product of grid samples.
    #[default]
    Off,
    /// 3/2-rule: product formed on a `3N/2` grid, then truncated.
    ThreeHalves,
}

impl Dealias {
    pub fn from_flag(on: bool) -> Self {
        if on {
            Dealias::ThreeHalves
        } else {
            Dealias::Off
        }
    }

    pub fn is_on(self) -> bool {
        self == Dealias::ThreeHalves
    }
}

// Low part of 2π, so TAU + TAU_LO is 2π to ~1e-32.
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `e^{i·t·k}` with the product `t·k` reduced modulo 2π in extended
/// precision.
///
/// Phases such as `t·l³` reach 1e5 and beyond on realistic grids; the naive
/// `(t*k).sin_cos()` then loses ~1e-11 absolute accuracy to rounding of the
/// product alone.
pub fn cis_product(t: f64, k: f64) -> Complex64 {
    let hi = t * k;
    if !hi.is_finite() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let lo = t.mul_add(k, -hi);
    let turns = (hi / TAU).round();
    let r = turns.mul_add(-TAU, hi) - turns * TAU_LO + lo;
    let (s, c) = r.sin_cos();
    Complex64::new(c, s)
}

/// The Airy group `e^{t∂x³}` on one grid, with its multipliers precomputed.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Arc<SpectralGrid>,
    multipliers: Vec<Complex64>,
}

impl Propagator {
    /// `e^{t∂x³}`; mode `l` is multiplied by `e^{−itl³}`.
    pub fn new(grid: &Arc<SpectralGrid>, t: f64) -> Self {
        let multipliers = (0..grid.len())
            .map(|k| {
                let l = grid.odd_wavenumber(k) as f64;
                cis_product(-t, l * l * l)
            })
            .collect();
        Self {
            grid: grid.clone(),
            multipliers,
        }
    }

    /// `e^{−t∂x³}`, the free KdV flow over time `t`.
    pub fn free_flow(grid: &Arc<SpectralGrid>, t: f64) -> Self {
        Self::new(grid, -t)
    }

    pub fn apply(&self, f: &Field) -> Field {
        debug_assert!(**f.grid() == *self.grid);
        let coeffs = f
            .coeffs()
            .iter()
            .zip(&self.multipliers)
            .map(|(c, m)| c * m)
            .collect();
        Field::from_coeffs_raw(&self.grid, coeffs)
    }
}
