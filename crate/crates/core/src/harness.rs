//! Experiment drivers: rough random data, global and local convergence
//! studies, and side-by-side scheme comparisons.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracles::reference_solution;
use crate::schemes::{evolve, evolve_with, step_count, Scheme, SchemeConfig};
use crate::spectral::{Dealias, Field, SobolevIndex, SpectralGrid};

/// Parameters of a random initial datum in `H^θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughDataSpec {
    pub n: usize,
    pub theta: f64,
    pub seed: u64,
}

impl RoughDataSpec {
    pub fn new(n: usize, theta: f64, seed: u64) -> Result<Self> {
        let spec = Self { n, theta, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(self.n));
        }
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(Error::InvalidConfig(format!("theta must be >= 0, got {}", self.theta)));
        }
        Ok(())
    }
}

/// `u0 = |∂_{x,N}|^{−θ} U / ‖|∂_{x,N}|^{−θ} U‖_{L∞}` for a vector `U` of
/// uniform `[0,1)` samples.
///
/// `U` comes from ChaCha8 seeded with `spec.seed`, so the datum is
/// reproducible across platforms. The zero and Nyquist modes are removed.
pub fn rough_data(spec: &RoughDataSpec) -> Result<Field> {
    spec.validate()?;
    let grid = SpectralGrid::new(spec.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let raw: Vec<f64> = (0..spec.n).map(|_| rng.gen::<f64>()).collect();
    let raw = Field::from_samples(&grid, raw)?;
    let nyquist = grid.nyquist_index();
    let filtered = raw.map_modes(|k, c| {
        let l = grid.wavenumber(k);
        if l == 0 || k == nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            c * (l.unsigned_abs() as f64).powf(-spec.theta)
        }
    });
    let peak = filtered.max_abs();
    if peak == 0.0 {
        return Err(Error::Precondition("random datum vanished identically".into()));
    }
    Ok(filtered.scale(1.0 / peak))
}

/// What the initial datum of a study was.
#[derive(Debug, Clone, PartialEq)]
pub enum DataDescriptor {
    Rough(RoughDataSpec),
    Named(String),
}

impl DataDescriptor {
    pub fn theta(&self) -> Option<f64> {
        match self {
            DataDescriptor::Rough(s) => Some(s.theta),
            DataDescriptor::Named(_) => None,
        }
    }
}

impl fmt::Display for DataDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataDescriptor::Rough(s) => write!(f, "rough(N={}, theta={}, seed={})", s.n, s.theta, s.seed),
            DataDescriptor::Named(name) => f.write_str(name),
        }
    }
}

/// Supplies reference solutions to studies.
pub trait ReferenceSource: Sync {
    fn reference(&self, u0: &Field, t_final: f64, tau_ref: f64) -> Result<Field>;
}

/// Computes the reference every time, no caching.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectReference;

impl ReferenceSource for DirectReference {
    fn reference(&self, u0: &Field, t_final: f64, tau_ref: f64) -> Result<Field> {
        reference_solution(u0, t_final, tau_ref)
    }
}

/// Inputs shared by all runs of a study.
#[derive(Debug, Clone)]
pub struct Study {
    pub u0: Field,
    pub data: DataDescriptor,
    pub gamma: SobolevIndex,
    pub t_final: f64,
    /// Strictly decreasing step sizes.
    pub taus: Vec<f64>,
    pub tau_ref: f64,
    pub dealias: Dealias,
}

impl Study {
    pub fn validate(&self) -> Result<()> {
        if self.taus.is_empty() {
            return Err(Error::InvalidConfig("tau list is empty".into()));
        }
        if self.taus.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("tau list must be strictly decreasing".into()));
        }
        for &tau in &self.taus {
            step_count(self.t_final, tau)?;
        }
        step_count(self.t_final, self.tau_ref)?;
        let smallest = *self.taus.last().expect("non-empty");
        if self.tau_ref > smallest / 10.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig(format!(
                "tau_ref={} must be at most min(tau)/10 = {}",
                self.tau_ref,
                smallest / 10.0
            )));
        }
        Ok(())
    }
}

/// `τ_k = 2^{−k}` for `k` in `from..=to`.
pub fn dyadic_taus(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

/// Outcome of one `(scheme, τ)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub tau: f64,
    pub rel_error: f64,
    pub wall_ms: f64,
    /// `max_n |mass(u^n) − mass(u^0)|`.
    pub mass_drift: f64,
    pub max_newton_residual: f64,
    /// Failure reason for runs that did not finish (then `rel_error` is NaN).
    pub dnf: Option<String>,
}

impl RunRecord {
    /// Placeholder for a run that failed: NaN measurements plus the reason.
    pub fn did_not_finish(tau: f64, reason: &Error) -> Self {
        Self {
            tau,
            rel_error: f64::NAN,
            wall_ms: f64::NAN,
            mass_drift: f64::NAN,
            max_newton_residual: f64::NAN,
            dnf: Some(reason.to_string()),
        }
    }
}

/// `log(e_i/e_{i+1}) / log(τ_i/τ_{i+1})` for consecutive pairs.
pub fn observed_orders(taus: &[f64], errors: &[f64]) -> Vec<f64> {
    taus.windows(2)
        .zip(errors.windows(2))
        .map(|(t, e)| (e[0] / e[1]).ln() / (t[0] / t[1]).ln())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub gamma: f64,
    pub data: DataDescriptor,
    pub t_final: f64,
    pub taus: Vec<f64>,
    /// `‖u(T) − u^n‖_{H^γ} / ‖u(T)‖_{H^γ}`, NaN for runs that did not finish.
    pub rel_errors: Vec<f64>,
    pub observed_orders: Vec<f64>,
    pub tau_ref: f64,
    pub wall_ms: Vec<f64>,
    pub mass_drift: Vec<f64>,
    pub max_newton_residual: Vec<f64>,
    pub dnf: Vec<Option<String>>,
}

impl ConvergenceReport {
    pub fn from_records(scheme: Scheme, study: &Study, records: Vec<RunRecord>) -> Self {
        let taus: Vec<f64> = records.iter().map(|r| r.tau).collect();
        let rel_errors: Vec<f64> = records.iter().map(|r| r.rel_error).collect();
        Self {
            scheme,
            gamma: study.gamma.gamma(),
            data: study.data.clone(),
            t_final: study.t_final,
            observed_orders: observed_orders(&taus, &rel_errors),
            taus,
            rel_errors,
            tau_ref: study.tau_ref,
            wall_ms: records.iter().map(|r| r.wall_ms).collect(),
            mass_drift: records.iter().map(|r| r.mass_drift).collect(),
            max_newton_residual: records.iter().map(|r| r.max_newton_residual).collect(),
            dnf: records.into_iter().map(|r| r.dnf).collect(),
        }
    }

    /// Errors below this are dominated by the reference's own error and are
    /// left out of [`fitted_orders`](Self::fitted_orders): ten times the
    /// reference error extrapolated from the smallest `τ` at second order.
    pub fn reference_floor(&self) -> f64 {
        match (self.taus.last(), self.rel_errors.last()) {
            (Some(&tau), Some(&err)) if err.is_finite() => 10.0 * err * (self.tau_ref / tau).powi(2),
            _ => 0.0,
        }
    }

    /// Orders of consecutive pairs whose errors are finite and above the
    /// reference floor.
    pub fn fitted_orders(&self) -> Vec<f64> {
        let floor = self.reference_floor();
        self.observed_orders
            .iter()
            .enumerate()
            .filter(|&(i, o)| {
                o.is_finite() && self.rel_errors[i] > floor && self.rel_errors[i + 1] > floor
            })
            .map(|(_, &o)| o)
            .collect()
    }

    /// Mean of [`fitted_orders`](Self::fitted_orders); NaN if there are none.
    pub fn mean_order(&self) -> f64 {
        let o = self.fitted_orders();
        if o.is_empty() {
            f64::NAN
        } else {
            o.iter().sum::<f64>() / o.len() as f64
        }
    }

    /// `max − min` of the fitted orders.
    pub fn order_spread(&self) -> f64 {
        let o = self.fitted_orders();
        let max = o.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = o.iter().copied().fold(f64::INFINITY, f64::min);
        if o.is_empty() {
            f64::NAN
        } else {
            max - min
        }
    }

    pub fn total_wall_ms(&self) -> f64 {
        self.wall_ms.iter().sum()
    }

    pub fn has_dnf(&self) -> bool {
        self.dnf.iter().any(Option::is_some)
    }
}

/// Runs `scheme` at one step size and measures the error against `reference`.
pub fn run_point(
    scheme: Scheme,
    study: &Study,
    tau: f64,
    reference: &Field,
) -> Result<RunRecord> {
    let cfg = SchemeConfig::new(scheme, tau)?.with_dealias(study.dealias);
    let mut drift = 0.0f64;
    let start = Instant::now();
    // iterates are mean-reduced, so their mass should stay exactly 0
    let state = evolve_with(&study.u0, study.t_final, &cfg, |_, _, u| {
        drift = drift.max(u.mass().abs());
    })?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    drift = drift.max((state.u.mass() - study.u0.mass()).abs());
    let err = state.u.sub(reference)?.sobolev_norm(study.gamma);
    let scale = reference.sobolev_norm(study.gamma);
    Ok(RunRecord {
        tau,
        rel_error: if scale > 0.0 { err / scale } else { err },
        wall_ms,
        mass_drift: drift,
        max_newton_residual: state.max_newton_residual,
        dnf: None,
    })
}

/// Runs every `τ` of the study in parallel. Results keep the order of
/// `study.taus`.
pub fn study_points(scheme: Scheme, study: &Study, reference: &Field) -> Vec<Result<RunRecord>> {
    study
        .taus
        .par_iter()
        .map(|&tau| run_point(scheme, study, tau, reference))
        .collect()
}

/// Global convergence of `scheme` against an LRI2 reference with step
/// `study.tau_ref`. The first failing run aborts the study.
pub fn convergence_study(
    scheme: Scheme,
    study: &Study,
    references: &dyn ReferenceSource,
) -> Result<ConvergenceReport> {
    study.validate()?;
    let reference = references.reference(&study.u0, study.t_final, study.tau_ref)?;
    let records = study_points(scheme, study, &reference)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::from_records(scheme, study, records))
}

/// One report per scheme against a shared reference. Numerical failures
/// (Newton divergence, characteristic crossing, blow-up) become DNF entries;
/// anything else aborts.
pub fn compare_schemes(
    schemes: &[Scheme],
    study: &Study,
    references: &dyn ReferenceSource,
) -> Result<Vec<ConvergenceReport>> {
    study.validate()?;
    let reference = references.reference(&study.u0, study.t_final, study.tau_ref)?;
    schemes
        .iter()
        .map(|&scheme| {
            let records = study_points(scheme, study, &reference)
                .into_iter()
                .zip(&study.taus)
                .map(|(r, &tau)| match r {
                    Ok(rec) => Ok(rec),
                    Err(e) if e.is_numerical() => Ok(RunRecord::did_not_finish(tau, &e)),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ConvergenceReport::from_records(scheme, study, records))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalErrorReport {
    pub scheme: Scheme,
    pub gamma: f64,
    pub t_n: f64,
    pub taus: Vec<f64>,
    /// `‖Φ_τ(u(t_n)) − u(t_n + τ)‖_{H^γ}`.
    pub errors: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl LocalErrorReport {
    pub fn mean_slope(&self) -> f64 {
        self.slopes.iter().sum::<f64>() / self.slopes.len() as f64
    }
}

/// Number of LRI2 substeps per `τ` used for local-error references.
pub const LOCAL_REFERENCE_SUBSTEPS: usize = 128;

/// One-step errors from the state at `t_n`. The state at `t_n` and the
/// reference over `[t_n, t_n + τ]` come from LRI2 with
/// [`LOCAL_REFERENCE_SUBSTEPS`] substeps per step.
pub fn local_error_study(
    scheme: Scheme,
    gamma: SobolevIndex,
    u0: &Field,
    t_n: f64,
    taus: &[f64],
) -> Result<LocalErrorReport> {
    if taus.is_empty() {
        return Err(Error::InvalidConfig("tau list is empty".into()));
    }
    let smallest = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let start = if t_n > 0.0 {
        let fine = SchemeConfig::new(Scheme::Lri2, smallest / LOCAL_REFERENCE_SUBSTEPS as f64)?;
        evolve(u0, t_n, &fine)?.u
    } else {
        u0.clone()
    };
    let errors = taus
        .par_iter()
        .map(|&tau| {
            let one = evolve(&start, tau, &SchemeConfig::new(scheme, tau)?)?.u;
            let fine = SchemeConfig::new(Scheme::Lri2, tau / LOCAL_REFERENCE_SUBSTEPS as f64)?;
            let reference = evolve(&start, tau, &fine)?.u;
            Ok(one.sub(&reference)?.sobolev_norm(gamma))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LocalErrorReport {
        scheme,
        gamma: gamma.gamma(),
        t_n,
        slopes: observed_orders(taus, &errors),
        taus: taus.to_vec(),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::smooth_profile;

    #[test]
    fn rough_data_is_normalized_and_mean_free() {
        for theta in [0.0, 2.0, 4.0] {
            let u = rough_data(&RoughDataSpec::new(128, theta, 7).unwrap()).unwrap();
            assert!((u.max_abs() - 1.0).abs() < 1e-12);
            assert_eq!(u.mean(), 0.0);
            assert_eq!(u.coeffs()[64], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn rough_data_is_deterministic_and_seed_dependent() {
        let a = rough_data(&RoughDataSpec::new(64, 1.0, 1).unwrap()).unwrap();
        let b = rough_data(&RoughDataSpec::new(64, 1.0, 1).unwrap()).unwrap();
        let c = rough_data(&RoughDataSpec::new(64, 1.0, 2).unwrap()).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert!(a.max_abs_diff(&c) > 1e-3);
    }

    #[test]
    fn rough_data_coefficient_ratios_follow_the_symbol() {
        let spec = |theta| RoughDataSpec::new(64, theta, 11).unwrap();
        let a = rough_data(&spec(1.0)).unwrap();
        let b = rough_data(&spec(3.0)).unwrap();
        // û_l(θ)/û_l(θ') = |l|^{θ'−θ} · Z'/Z; the normalizations cancel in
        // a ratio of two such ratios.
        let r = |l: i64| (a.mode(l) / b.mode(l)).norm();
        for l in [2i64, 3, 5, -7, 20] {
            let expected = (l.abs() as f64).powi(2);
            assert!((r(l) / r(1) - expected).abs() < 1e-9 * expected, "l={l}");
        }
    }

    #[test]
    fn rough_data_validation() {
        assert!(RoughDataSpec::new(7, 1.0, 0).is_err());
        assert!(RoughDataSpec::new(8, -1.0, 0).is_err());
    }

    #[test]
    fn observed_orders_of_exact_power_law() {
        let taus = dyadic_taus(2, 5);
        let errs: Vec<f64> = taus.iter().map(|t| 3.0 * t * t).collect();
        for o in observed_orders(&taus, &errs) {
            assert!((o - 2.0).abs() < 1e-12);
        }
    }

    fn smooth_study(n: usize, taus: Vec<f64>) -> Study {
        let grid = SpectralGrid::new(n).unwrap();
        Study {
            u0: smooth_profile(&grid),
            data: DataDescriptor::Named("smooth".into()),
            gamma: SobolevIndex::L2,
            t_final: 1.0,
            taus,
            tau_ref: 2f64.powi(-13),
            dealias: Dealias::Off,
        }
    }

    #[test]
    fn study_validation() {
        let mut s = smooth_study(32, vec![]);
        assert!(s.validate().is_err());
        s.taus = vec![0.125, 0.25];
        assert!(s.validate().is_err());
        s.taus = vec![0.3];
        assert!(s.validate().is_err());
        s.taus = vec![2f64.powi(-4), 2f64.powi(-5)];
        s.tau_ref = 2f64.powi(-6);
        assert!(s.validate().is_err());
        s.tau_ref = 2f64.powi(-9);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn smooth_lri2_study_is_second_order() {
        let study = smooth_study(64, dyadic_taus(6, 9));
        let report = convergence_study(Scheme::Lri2, &study, &DirectReference).unwrap();
        for o in &report.observed_orders {
            assert!((1.85..=2.15).contains(o), "{:?}", report.observed_orders);
        }
        assert!(report.rel_errors.windows(2).all(|w| w[1] < w[0]));
        assert!(report.mass_drift.iter().all(|&d| d <= 1e-11));
    }

    #[test]
    fn lri1_is_first_order_and_less_accurate() {
        let study = smooth_study(64, dyadic_taus(5, 8));
        let reports = compare_schemes(&[Scheme::Lri2, Scheme::Lri1], &study, &DirectReference).unwrap();
        let (lri2, lri1) = (&reports[0], &reports[1]);
        assert!((lri1.mean_order() - 1.0).abs() < 0.15, "{:?}", lri1.observed_orders);
        assert!((lri2.mean_order() - lri1.mean_order() - 1.0).abs() < 0.2);
        assert!(lri2.rel_errors.iter().zip(&lri1.rel_errors).all(|(a, b)| a < b));
    }

    #[test]
    fn local_error_of_zero_is_zero() {
        let grid = SpectralGrid::new(32).unwrap();
        let r = local_error_study(Scheme::Lri2, SobolevIndex::L2, &Field::zeros(&grid), 0.0, &[0.1, 0.05])
            .unwrap();
        assert!(r.errors.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn compare_records_strang_failures_as_dnf() {
        let grid = SpectralGrid::new(64).unwrap();
        let study = Study {
            u0: Field::from_fn(&grid, |x| 4.0 * x.sin()),
            data: DataDescriptor::Named("steep".into()),
            gamma: SobolevIndex::L2,
            t_final: 1.0,
            taus: vec![0.5, 0.25],
            tau_ref: 2f64.powi(-6),
            dealias: Dealias::Off,
        };
        let reports = compare_schemes(&[Scheme::Strang], &study, &DirectReference).unwrap();
        assert!(reports[0].has_dnf());
        assert!(reports[0].rel_errors[0].is_nan());
    }
}
