//! Brute-force reference computations.
//!
//! Everything here is deliberately slow and takes a different route from
//! the fast schemes: mode-pair sums in Fourier space, quadrature in time,
//! classical Runge-Kutta on the twisted equation. The test suites compare
//! the two routes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schemes::{evolve, step_count, Scheme, SchemeConfig, MEAN_TOLERANCE};
use crate::spectral::{cis_product, Dealias, Field, Propagator, SobolevIndex};

/// Default cost guard for the `O(N²)` oracle.
pub const ORACLE_MAX_N: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOrder {
    First,
    Second,
}

fn require_zero_mean(f: &Field, what: &str) -> Result<()> {
    let m = f.mean();
    if m.abs() > MEAN_TOLERANCE {
        Err(Error::Precondition(format!("{what} must have zero mean, got {m:e}")))
    } else {
        Ok(())
    }
}

/// `∫_0^τ s^m e^{−i(t_n+s)Φ} ds` for `m ∈ {0, 1}`.
///
/// Closed forms with `A = e^{−it_nΦ}`, `B = e^{−iτΦ}`:
/// `m = 0`: `A(1 − B)/(iΦ)`; `m = 1`: `A(iτB/Φ − (1 − B)/Φ²)`.
/// For `|Φτ| < 0.5` the power series `τ^{m+1} Σ (−iΦτ)^k / (k!(k+m+1))` is
/// used instead to avoid cancellation.
pub fn phase_moment(t_n: f64, tau: f64, phi: f64, m: u32) -> Complex64 {
    let a = cis_product(-t_n, phi);
    let x = phi * tau;
    if x.abs() < 0.5 {
        let z = Complex64::new(0.0, -x);
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..30u32 {
            sum += term / f64::from(k + m + 1);
            term = term * z / f64::from(k + 1);
        }
        return a * sum * tau.powi(m as i32 + 1);
    }
    let b = cis_product(-tau, phi);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match m {
        0 => a * (one - b) / (i * phi),
        1 => a * (i * tau * b / phi - (one - b) / (phi * phi)),
        _ => unreachable!("only the first two time moments are needed"),
    }
}

/// Sparse Fourier series on the integers, used for spectra that outgrow the
/// grid before being folded back.
type Spectrum = BTreeMap<i64, Complex64>;

fn grid_spectrum(f: &Field) -> Spectrum {
    let n = f.len() as i64;
    let mut out = Spectrum::new();
    for l in -(n / 2 - 1)..n / 2 {
        let c = f.mode(l);
        if l != 0 && c != Complex64::new(0.0, 0.0) {
            out.insert(l, c);
        }
    }
    out
}

/// One step of the Taylor-expanded twisted Duhamel map,
///
/// `v^{n+1} = v^n + ½∫_0^τ e^{(t_n+s)∂³}∂x(e^{−(t_n+s)∂³}v^n)² ds
///          + ∫_0^τ s e^{(t_n+s)∂³}∂x[(e^{−(t_n+s)∂³}v^n)(e^{−(t_n+s)∂³}v_t^n)] ds`,
///
/// evaluated by direct summation over mode pairs. The time integrals are
/// done per pair in closed form with the resonance `ξ³ − ξ₁³ − ξ₂³ = 3ξξ₁ξ₂`.
/// Returns `u^{n+1} = e^{−t_{n+1}∂³}v^{n+1}`.
///
/// The oracle acts on the trigonometric interpolant of `u` restricted to
/// `|l| < N/2` and evaluates the exact map on all output wavenumbers; the
/// result is that trigonometric polynomial sampled on the grid. It agrees
/// with the pseudo-spectral scheme whenever the scheme's products are free
/// of aliasing (bandwidth below `N/6`).
pub fn duhamel_oracle_step(
    u: &Field,
    t_n: f64,
    tau: f64,
    order: OracleOrder,
    allow_large: bool,
) -> Result<Field> {
    require_zero_mean(u, "oracle input")?;
    let n = u.len();
    if n > ORACLE_MAX_N && !allow_large {
        return Err(Error::OracleSizeGuard {
            n,
            limit: ORACLE_MAX_N,
        });
    }
    let cube = |x: i64| (x * x * x) as f64;

    // v̂^n(ξ) = e^{−it_nξ³} û(ξ)
    let v: Spectrum = grid_spectrum(u)
        .into_iter()
        .map(|(l, c)| (l, c * cis_product(-t_n, cube(l))))
        .collect();

    let resonance = |xi: i64, x1: i64, x2: i64| 3.0 * (xi as f64) * (x1 as f64) * (x2 as f64);

    let mut next: Spectrum = v.clone();
    let mut vt = Spectrum::new();
    for (&x1, &c1) in &v {
        for (&x2, &c2) in &v {
            let xi = x1 + x2;
            if xi == 0 {
                continue;
            }
            let phi = resonance(xi, x1, x2);
            let ixi = Complex64::new(0.0, xi as f64);
            let pair = c1 * c2;
            *next.entry(xi).or_default() += 0.5 * ixi * phase_moment(t_n, tau, phi, 0) * pair;
            if order == OracleOrder::Second {
                // v̂_t(ξ) = ½ iξ Σ e^{−it_nΦ} v̂(ξ₁)v̂(ξ₂)
                *vt.entry(xi).or_default() += 0.5 * ixi * cis_product(-t_n, phi) * pair;
            }
        }
    }
    if order == OracleOrder::Second {
        for (&x1, &c1) in &v {
            for (&x2, &c2) in &vt {
                let xi = x1 + x2;
                if xi == 0 {
                    continue;
                }
                let phi = resonance(xi, x1, x2);
                let ixi = Complex64::new(0.0, xi as f64);
                *next.entry(xi).or_default() += ixi * phase_moment(t_n, tau, phi, 1) * c1 * c2;
            }
        }
    }

    // û^{n+1}(ξ) = e^{it_{n+1}ξ³} v̂^{n+1}(ξ), then sample on the grid.
    let grid = u.grid();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (xi, c) in next {
        let untwist = cis_product(t_n, cube(xi)) * cis_product(tau, cube(xi));
        let k = xi.rem_euclid(n as i64) as usize;
        coeffs[k] += c * untwist;
    }
    Field::from_coeffs(grid, coeffs)
}

/// Gauss-Legendre nodes and weights on `[−1, 1]`, `n ≥ 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Largest phase span `|Φ|h` per panel that an `n`-node Gauss-Legendre rule
/// integrates to ~1e-15. Derived from the bound `(ωh/2)^{2n}/(2n)!`.
pub fn panel_phase_limit(nodes: usize) -> f64 {
    match nodes {
        0..=15 => 4.0,
        16..=31 => 8.0,
        32..=63 => 16.0,
        _ => 40.0,
    }
}

/// Composite Gauss-Legendre rule on `[0, τ]` with enough panels that each
/// carries a phase span of at most [`panel_phase_limit`].
pub fn composite_rule(tau: f64, nodes: usize, max_phase: f64) -> Vec<(f64, f64)> {
    let panels = ((max_phase.abs() * tau.abs()) / panel_phase_limit(nodes)).ceil().max(1.0) as usize;
    let (x, w) = gauss_legendre(nodes);
    let h = tau / panels as f64;
    let mut rule = Vec::with_capacity(panels * nodes);
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            rule.push((a + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    rule
}

/// Upper bound on `|3ξξ₁ξ₂|` for products of two fields.
fn max_resonance(f: &Field, g: &Field) -> f64 {
    let kf = f.bandwidth(1e-15) as f64;
    let kg = g.bandwidth(1e-15) as f64;
    3.0 * (kf + kg) * kf * kg
}

/// `e^{s∂³}(e^{−s∂³}a · e^{−s∂³}b)`, dealiased.
fn twisted_product(a: &Field, b: &Field, s: f64) -> Field {
    let back = Propagator::new(a.grid(), -s);
    let p = back.apply(a).multiply_unchecked(&back.apply(b), Dealias::ThreeHalves);
    Propagator::new(a.grid(), s).apply(&p)
}

/// Right-hand side of the filtered-integral identity for `f̂(0) = ĝ(0) = 0`:
///
/// * `k = 0`: `⅓e^{t_{n+1}∂³}(e^{−t_{n+1}∂³}∂⁻¹f · e^{−t_{n+1}∂³}∂⁻¹g) − ⅓e^{t_n∂³}(…)`
/// * `k = 1`: `(τ/3)e^{t_{n+1}∂³}(…) − ⅓∫_0^τ e^{(t_n+s)∂³}(e^{−(t_n+s)∂³}∂⁻¹f · e^{−(t_n+s)∂³}∂⁻¹g) ds`,
///   the remaining integral by a 32-node composite Gauss-Legendre rule.
///
/// It equals `∫_0^τ s^k e^{(t_n+s)∂³}∂x(e^{−(t_n+s)∂³}f · e^{−(t_n+s)∂³}g) ds`.
/// Products are dealiased, so the identity holds exactly on the grid when
/// the bandwidths of `f` and `g` sum to less than `N/2`.
pub fn filtered_integral_closed_form(f: &Field, g: &Field, t_n: f64, tau: f64, k: u32) -> Result<Field> {
    require_zero_mean(f, "f")?;
    require_zero_mean(g, "g")?;
    if *f.grid() != *g.grid() {
        return Err(Error::GridMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let fi = f.inverse_derivative(1);
    let gi = g.inverse_derivative(1);
    let t_next = t_n + tau;
    let end = twisted_product(&fi, &gi, t_next);
    match k {
        0 => Ok(end.axpy(-1.0, &twisted_product(&fi, &gi, t_n)).scale(1.0 / 3.0)),
        1 => {
            let rule = composite_rule(tau, 32, max_resonance(f, g));
            let mut integral = Field::zeros(f.grid());
            for (s, w) in rule {
                integral = integral.axpy(w, &twisted_product(&fi, &gi, t_n + s));
            }
            Ok(end.scale(tau / 3.0).axpy(-1.0 / 3.0, &integral))
        }
        _ => Err(Error::Precondition(format!(
            "time moment k={k} is not supported (k must be 0 or 1)"
        ))),
    }
}

/// Direct quadrature of `∫_0^τ s^k e^{(t_n+s)∂³}∂x(e^{−(t_n+s)∂³}f · e^{−(t_n+s)∂³}g) ds`
/// with an `nodes`-point composite Gauss-Legendre rule.
pub fn filtered_integral_quadrature(
    f: &Field,
    g: &Field,
    t_n: f64,
    tau: f64,
    k: u32,
    nodes: usize,
) -> Result<Field> {
    if *f.grid() != *g.grid() {
        return Err(Error::GridMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let rule = composite_rule(tau, nodes, max_resonance(f, g));
    let mut acc = Field::zeros(f.grid());
    for (s, w) in rule {
        let term = twisted_product(f, g, t_n + s).derivative(1);
        acc = acc.axpy(w * s.powi(k as i32), &term);
    }
    Ok(acc)
}

/// `∂t v = ½e^{t∂³}∂x(e^{−t∂³}v)²` with an alias-free product.
fn twisted_rhs(v: &Field, t: f64) -> Field {
    twisted_product(v, v, t).derivative(1).scale(0.5)
}

/// Classical RK4 on the twisted equation from `t0` to `t1` in `steps` steps.
/// Negative intervals integrate backwards.
pub fn twisted_rk4(v: &Field, t0: f64, t1: f64, steps: usize) -> Field {
    let h = (t1 - t0) / steps as f64;
    let mut v = v.clone();
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = twisted_rhs(&v, t);
        let k2 = twisted_rhs(&v.axpy(0.5 * h, &k1), t + 0.5 * h);
        let k3 = twisted_rhs(&v.axpy(0.5 * h, &k2), t + 0.5 * h);
        let k4 = twisted_rhs(&v.axpy(h, &k3), t + h);
        v = v
            .axpy(h / 6.0, &k1)
            .axpy(h / 3.0, &k2)
            .axpy(h / 3.0, &k3)
            .axpy(h / 6.0, &k4);
    }
    v
}

/// `(3/2)e^{t∂³}∂x²(e^{−t∂³}∂x v)² + (1/3)e^{t∂³}∂x²(e^{−t∂³}v)³`, with
/// products formed on padded grids.
pub fn second_derivative_rhs(v: &Field, t: f64) -> Result<Field> {
    let back = Propagator::new(v.grid(), -t);
    let fwd = Propagator::new(v.grid(), t);
    let a = back.apply(&v.derivative(1));
    let b = back.apply(v);
    let quad = Field::product_exact(&[&a, &a])?;
    let cubic = Field::product_exact(&[&b, &b, &b])?;
    let inner = quad.scale(1.5).axpy(1.0 / 3.0, &cubic);
    Ok(fwd.apply(&inner.derivative(2)))
}

/// Largest resonance frequency `|3ξξ1ξ2|` reachable by quadratic
/// interactions of modes up to `band`.
pub fn resonance_bound(band: usize) -> f64 {
    6.0 * (band as f64).powi(3)
}

// RK4 substeps keeping h·Φ ≤ 0.02 over an interval of length eps, so the
// integration error stays far below the ε² finite-difference error.
fn rk4_substeps(band: usize, eps: f64) -> usize {
    let needed = (eps * resonance_bound(band) / 0.02).ceil() as usize;
    needed.max(64)
}

/// `‖FD₂(ε) − RHS‖_{H⁰}` where `FD₂(ε) = (v(t+ε) − 2v(t) + v(t−ε))/ε²` and
/// `v(t±ε)` are obtained from `v = v(t)` by RK4 on the twisted equation.
///
/// Requires zero mean and bandwidth at most `N/8`, so every product is
/// resolved on the grid.
pub fn second_derivative_identity_residual(v: &Field, t: f64, eps: f64) -> Result<f64> {
    require_zero_mean(v, "v")?;
    let band = v.bandwidth(1e-14);
    if band > v.len() / 8 {
        return Err(Error::Precondition(format!(
            "v must be band-limited to N/8 = {} (bandwidth {band})",
            v.len() / 8
        )));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be > 0, got {eps}")));
    }
    let substeps = rk4_substeps(band, eps);
    let plus = twisted_rk4(v, t, t + eps, substeps);
    let minus = twisted_rk4(v, t, t - eps, substeps);
    let fd = plus.axpy(-2.0, v).axpy(1.0, &minus).scale(1.0 / (eps * eps));
    let rhs = second_derivative_rhs(v, t)?;
    Ok(fd.axpy(-1.0, &rhs).sobolev_norm(SobolevIndex::L2))
}

/// Reference solution: LRI2 with step `tau_ref` up to `t_final`.
pub fn reference_solution(u0: &Field, t_final: f64, tau_ref: f64) -> Result<Field> {
    step_count(t_final, tau_ref)?;
    let cfg = SchemeConfig::new(Scheme::Lri2, tau_ref)?;
    Ok(evolve(u0, t_final, &cfg)?.u)
}

/// Inviscid Burgers `∂t u = u ∂x u` by pseudo-spectral RK4 with dealiased
/// products.
pub fn burgers_rk4(u: &Field, t: f64, steps: usize) -> Field {
    let rhs = |w: &Field| w.multiply_unchecked(&w.derivative(1), Dealias::ThreeHalves);
    let h = t / steps as f64;
    let mut u = u.clone();
    for _ in 0..steps {
        let k1 = rhs(&u);
        let k2 = rhs(&u.axpy(0.5 * h, &k1));
        let k3 = rhs(&u.axpy(0.5 * h, &k2));
        let k4 = rhs(&u.axpy(h, &k3));
        u = u
            .axpy(h / 6.0, &k1)
            .axpy(h / 3.0, &k2)
            .axpy(h / 3.0, &k3)
            .axpy(h / 6.0, &k4);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{burgers_exact_step, lri1_step, lri2_step};
    use crate::spectral::SpectralGrid;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<SpectralGrid> {
        SpectralGrid::new(n).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 32, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n={n}");
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "n={n}: {q} vs {exact}");
        }
    }

    #[test]
    fn composite_rule_covers_interval() {
        let r = composite_rule(0.1, 32, 1000.0);
        assert_eq!(r.len() % 32, 0);
        assert!(r.len() / 32 >= (1000.0 * 0.1 / panel_phase_limit(32)) as usize);
        let total: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((total - 0.1).abs() < 1e-15);
    }

    #[test]
    fn phase_moment_closed_form() {
        // ∫_0^τ e^{−i(t_n+s)Φ}ds = (e^{−it_nΦ} − e^{−it_{n+1}Φ})/(iΦ)
        let (t_n, tau) = (0.7, 0.1);
        for phi in [6.0, -18.0, 54.0, 0.3] {
            let closed = (Complex64::from_polar(1.0, -t_n * phi)
                - Complex64::from_polar(1.0, -(t_n + tau) * phi))
                / Complex64::new(0.0, phi);
            assert!((phase_moment(t_n, tau, phi, 0) - closed).norm() < 1e-14, "phi={phi}");
            // first moment against fine quadrature
            let rule = composite_rule(tau, 64, phi);
            let q: Complex64 = rule
                .iter()
                .map(|&(s, w)| w * s * Complex64::from_polar(1.0, -(t_n + s) * phi))
                .sum();
            assert!((phase_moment(t_n, tau, phi, 1) - q).norm() < 1e-15, "phi={phi}");
        }
        assert!((phase_moment(0.0, 0.2, 0.0, 1) - Complex64::new(0.02, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn oracle_of_zero_is_zero() {
        let g = grid(16);
        let z = duhamel_oracle_step(&Field::zeros(&g), 0.3, 0.1, OracleOrder::Second, false).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn oracle_guards() {
        let g = grid(512);
        let err = duhamel_oracle_step(&Field::zeros(&g), 0.0, 0.1, OracleOrder::First, false).unwrap_err();
        assert_eq!(err, Error::OracleSizeGuard { n: 512, limit: 256 });
        let g = grid(16);
        let u = Field::from_fn(&g, |x| 1.0 + x.cos());
        assert!(duhamel_oracle_step(&u, 0.0, 0.1, OracleOrder::First, false).is_err());
    }

    #[test]
    fn oracle_matches_lri2_on_two_modes() {
        let g = grid(32);
        let u = Field::from_fn(&g, |x| x.cos() + 0.5 * (2.0 * x).cos());
        let cfg = SchemeConfig::new(Scheme::Lri2, 0.05).unwrap();
        let fast = lri2_step(&u, 0.0, &cfg).unwrap();
        let slow = duhamel_oracle_step(&u, 0.0, 0.05, OracleOrder::Second, false).unwrap();
        assert!(fast.relative_max_diff(&slow) < 1e-12, "{:e}", fast.relative_max_diff(&slow));
    }

    #[test]
    fn oracle_matches_lri1_and_lri2_on_cosine() {
        let g = grid(64);
        let u = Field::from_fn(&g, f64::cos);
        let cfg = SchemeConfig::new(Scheme::Lri2, 0.1).unwrap();
        for t_n in [0.0, 0.7] {
            let a = lri2_step(&u, t_n, &cfg).unwrap();
            let b = duhamel_oracle_step(&u, t_n, 0.1, OracleOrder::Second, false).unwrap();
            assert!(a.relative_max_diff(&b) < 1e-12);
            let a = lri1_step(&u, t_n, &cfg).unwrap();
            let b = duhamel_oracle_step(&u, t_n, 0.1, OracleOrder::First, false).unwrap();
            assert!(a.relative_max_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn filtered_integral_of_zero() {
        let g = grid(16);
        let z = Field::zeros(&g);
        for k in [0, 1] {
            let r = filtered_integral_closed_form(&z, &z, 0.0, 0.1, k).unwrap();
            assert_eq!(r.max_abs(), 0.0);
        }
        assert!(filtered_integral_closed_form(&z, &z, 0.0, 0.1, 2).is_err());
    }

    #[test]
    fn filtered_integral_single_modes() {
        let g = grid(32);
        let f = Field::from_fn(&g, f64::sin);
        let h = Field::from_fn(&g, |x| (2.0 * x).sin());
        let closed = filtered_integral_closed_form(&f, &h, 0.0, 0.1, 0).unwrap();
        let quad = filtered_integral_quadrature(&f, &h, 0.0, 0.1, 0, 64).unwrap();
        assert!(closed.max_abs_diff(&quad) < 1e-12);
        let closed = filtered_integral_closed_form(&f, &h, 0.0, 0.1, 1).unwrap();
        let quad = filtered_integral_quadrature(&f, &h, 0.0, 0.1, 1, 64).unwrap();
        assert!(closed.max_abs_diff(&quad) < 1e-10);
    }

    #[test]
    fn second_derivative_rhs_of_sine() {
        // (3/2)∂²(cos x)² + (1/3)∂²(sin³x) = −3cos 2x − ¼sin x + ¾sin 3x
        let g = grid(32);
        let v = Field::from_fn(&g, f64::sin);
        let rhs = second_derivative_rhs(&v, 0.0).unwrap();
        let expected = Field::from_fn(&g, |x| {
            -3.0 * (2.0 * x).cos() - 0.25 * x.sin() + 0.75 * (3.0 * x).sin()
        });
        assert!(rhs.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn identity_residual_of_zero() {
        let g = grid(32);
        assert_eq!(second_derivative_identity_residual(&Field::zeros(&g), 0.0, 1e-2).unwrap(), 0.0);
        let rough = Field::from_fn(&g, |x| (10.0 * x).sin());
        assert!(second_derivative_identity_residual(&rough, 0.0, 1e-2).is_err());
    }

    #[test]
    fn identity_residual_is_second_order() {
        let g = grid(64);
        let v = Field::from_fn(&g, f64::sin);
        let r: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&e| second_derivative_identity_residual(&v, 0.0, e).unwrap())
            .collect();
        for w in r.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() < 0.5, "{r:?}");
        }
    }

    #[test]
    fn reference_solution_of_constants() {
        let g = grid(16);
        assert_eq!(reference_solution(&Field::zeros(&g), 1.0, 0.01).unwrap().max_abs(), 0.0);
        let c = reference_solution(&Field::constant(&g, 2.0), 1.0, 0.01).unwrap();
        assert!(c.samples().iter().all(|&x| (x - 2.0).abs() < 1e-14));
        assert!(reference_solution(&Field::zeros(&g), 1.0, 0.3).is_err());
    }

    #[test]
    fn burgers_exact_matches_rk4() {
        let g = grid(64);
        let u = Field::from_fn(&g, |x| 0.1 * x.sin());
        let cfg = SchemeConfig::new(Scheme::Strang, 0.01).unwrap();
        let exact = burgers_exact_step(&u, 0.01, &cfg).unwrap();
        let rk = burgers_rk4(&u, 0.01, 1000);
        assert!(exact.max_abs_diff(&rk) < 1e-9, "{:e}", exact.max_abs_diff(&rk));
    }
}
