//! Late-time covariances, internal energy, and heat capacity of the relaxed
//! network, by regularized frequency integrals over the response matrix.
//!
//! All integrands are even in `kappa` and are integrated over the half line.
//! The position covariance integral converges absolutely. The velocity
//! covariance and the internal energy carry the bath's logarithmic UV
//! divergence; it is isolated by subtracting, per oscillator,
//!
//! ```text
//! t0(kappa) = 2 gamma kappa / (kappa^2 + 4 gamma^2),
//! ```
//!
//! which equals the exact leading diagonal of the integrand, and adding back
//! its cutoff sum evaluated in the same Matsubara `e^{-nu_n/Lambda}` scheme
//! as the closed forms:
//!
//! ```text
//! (1/2pi) int coth(beta kappa/2) t0 dkappa  ->
//!     1/(2 beta) + (gamma/pi) [ ln(beta Lambda / 2 pi) - H(gamma beta / pi) ]
//! ```
//!
//! per oscillator (`H` = harmonic number). With both routes in one scheme,
//! quadrature and closed forms agree to quadrature accuracy, and the heat
//! capacity - whose integrand is absolutely convergent - is manifestly
//! cutoff-free.

use crate::closedform::{complex_harmonic, EULER_GAMMA};
use crate::kernels::BathState;
use crate::network::{build_frequency_matrix, mode_frequencies_squared, propagator, NetworkSpec};
use crate::quad::{self, QuadratureSpec};
use crate::stability::require_stable;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Late-time position and velocity covariance matrices.
#[derive(Debug, Clone)]
pub struct CovariancePair {
    pub sigma_xx: DMatrix<f64>,
    pub sigma_vv: DMatrix<f64>,
}

/// One temperature point of the equilibrium thermodynamics.
#[derive(Debug, Clone)]
pub struct ThermoPoint {
    pub beta: f64,
    pub energy: f64,
    pub heat_capacity: f64,
    pub mode_energies: Vec<f64>,
}

fn coth_factor(bath: &BathState, kappa: f64) -> f64 {
    bath.coth_half(kappa)
}

/// `[(x/2)/sinh(x/2)]^2` without overflow.
fn sinh_weight(x: f64) -> f64 {
    let h = 0.5 * x.abs();
    if h > 300.0 {
        return 0.0;
    }
    if h < 1e-8 {
        return 1.0;
    }
    let r = h / h.sinh();
    r * r
}

/// Leading UV diagonal of the velocity-type integrands.
fn t0(kappa: f64, gamma: f64) -> f64 {
    2.0 * gamma * kappa / (kappa * kappa + 4.0 * gamma * gamma)
}

/// Matsubara-scheme value per oscillator of
/// `(1/2pi) int_{-inf}^{inf} coth(beta k/2) t0(k) dk` at cutoff `lambda`.
fn t0_scheme_sum(bath: &BathState, gamma: f64, lambda: f64) -> Result<f64> {
    match bath {
        BathState::Thermal { beta } => {
            let c = gamma * beta / PI;
            let h = complex_harmonic(Complex64::new(c, 0.0))?.re;
            Ok(0.5 / beta + (gamma / PI) * ((beta * lambda / (2.0 * PI)).ln() - h))
        }
        BathState::ZeroTemperature => {
            // beta -> inf limit of the sum is the continuum integral
            Ok((gamma / PI) * ((lambda / (2.0 * gamma)).ln() - EULER_GAMMA))
        }
    }
}

fn beta_scale(bath: &BathState) -> f64 {
    match bath {
        BathState::Thermal { beta } => *beta,
        BathState::ZeroTemperature => f64::INFINITY,
    }
}

/// Characteristic frequency scales of the spec used to place panel seeds.
fn feature_points(spec: &NetworkSpec, bath: &BathState) -> Vec<f64> {
    let mut pts = Vec::new();
    let gamma = spec.gamma;
    let modes = mode_frequencies_squared(spec);
    for w2 in modes.iter() {
        let w0 = w2.abs().sqrt();
        for d in [-30.0, -10.0, -3.0, -1.0, 1.0, 3.0, 10.0, 30.0] {
            let x = w0 + d * gamma.max(1e-9 * w0.max(1.0));
            if x > 0.0 {
                pts.push(x);
            }
        }
        pts.push(0.5 * w0);
        pts.push(2.0 * w0);
    }
    // subtraction feature at kappa ~ 2 gamma and the small-gamma spike
    for f in [0.5, 1.0, 2.0, 4.0, 8.0, 20.0, 100.0] {
        pts.push(f * gamma.max(1e-12));
    }
    let beta = beta_scale(bath);
    if beta.is_finite() {
        for f in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            pts.push(f / beta);
        }
    }
    pts
}

fn omega_max(spec: &NetworkSpec) -> f64 {
    let modes = mode_frequencies_squared(spec);
    modes
        .iter()
        .fold(spec.omega_p, |m, w2| m.max(w2.abs().sqrt()))
        .max(2.0 * spec.gamma)
}

/// Truncation for the `1/kappa^3`-tailed integrands, with the measured-tail
/// correction applied afterwards.
fn kappa_max_energy(spec: &NetworkSpec, bath: &BathState) -> f64 {
    let beta = beta_scale(bath);
    let thermal = if beta.is_finite() { 35.0 / beta } else { 0.0 };
    (600.0 * omega_max(spec)).max(thermal)
}

/// Average `kappa^3 f(kappa)` over one slow oscillation period past
/// `kappa_max` and integrate the fitted `c3/kappa^3` tail analytically.
fn tail_correction<F>(f: &F, dim: usize, kappa_max: f64, period: f64) -> Vec<f64>
where
    F: Fn(f64, &mut [f64]),
{
    let samples = 48;
    let mut acc = vec![0.0; dim];
    let mut slot = vec![0.0; dim];
    for i in 0..samples {
        let k = kappa_max + period * (i as f64 + 0.5) / samples as f64;
        f(k, &mut slot);
        for d in 0..dim {
            acc[d] += slot[d] * k * k * k;
        }
    }
    acc.iter_mut().for_each(|c| *c = *c / samples as f64 / (2.0 * kappa_max * kappa_max));
    acc
}

/// Clamp for evaluating even integrands near the origin; all combinations
/// used here have finite analytic `kappa -> 0` limits, reached smoothly.
const KAPPA_FLOOR: f64 = 1e-8;

struct MatrixIntegrand<'a> {
    spec: &'a NetworkSpec,
    bath: &'a BathState,
    /// multiplicative spectral filter (e.g. `exp(-k/Lambda_s)`), identity if
    /// `None`
    filter: Option<f64>,
    /// subtract `t0` from the diagonal of the velocity block
    subtract_uv: bool,
}

impl MatrixIntegrand<'_> {
    /// Fills `out` with the upper triangles of the position block
    /// `coth * Im d2 / (m pi)` followed by the velocity block
    /// `coth * (k^2 Im d2 - t0 I) / (m pi)`.
    fn eval(&self, kappa_in: f64, out: &mut [f64]) {
        let n = self.spec.n;
        let kappa = kappa_in.max(KAPPA_FLOOR * self.spec.omega_p);
        let p = match propagator(self.spec, kappa) {
            Ok(p) => p,
            Err(_) => {
                out.iter_mut().for_each(|v| *v = f64::NAN);
                return;
            }
        };
        let coth = coth_factor(self.bath, kappa);
        let filt = self.filter.map_or(1.0, |l| (-kappa / l).exp());
        let m = self.spec.mass;
        let pref = coth * filt / (m * PI);
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                out[idx] = pref * p.d2[(i, j)].im;
                idx += 1;
            }
        }
        let k2 = kappa * kappa;
        let sub = if self.subtract_uv { t0(kappa, self.spec.gamma) } else { 0.0 };
        for i in 0..n {
            for j in i..n {
                let diag = if i == j { sub } else { 0.0 };
                out[idx] = pref * (k2 * p.d2[(i, j)].im - diag);
                idx += 1;
            }
        }
    }
}

fn unpack_symmetric(n: usize, tri: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = tri[idx];
            m[(j, i)] = tri[idx];
            idx += 1;
        }
    }
    m
}

/// Symmetrize and PSD-check a covariance matrix: eigenvalues below
/// `-1e-10 ||sigma||` are an error; small negatives inside the tolerance are
/// clipped to zero.
fn enforce_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let floor = -1e-10 * scale;
    let mut clipped = eig.eigenvalues.clone();
    for v in clipped.iter_mut() {
        if *v < floor {
            return Err(Error::CovarianceNotPsd { min_eig: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let d = DMatrix::from_diagonal(&clipped);
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

fn covariance_inner(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
    filter: Option<f64>,
    band_limit: Option<f64>,
) -> Result<CovariancePair> {
    let n = spec.n;
    let tri = n * (n + 1) / 2;
    let dim = 2 * tri;
    let subtract_uv = filter.is_none() && band_limit.is_none();
    let integrand = MatrixIntegrand { spec, bath, filter, subtract_uv };
    let f = |k: f64, out: &mut [f64]| integrand.eval(k, out);

    let kappa_max = band_limit.unwrap_or_else(|| {
        let from_filter = filter.map_or(0.0, |l| 40.0 * l);
        kappa_max_energy(spec, bath).max(from_filter)
    });
    let features = feature_points(spec, bath);
    let seeds = quad::oscillation_seeds(spec.min_pair_separation(), kappa_max, &features);
    let out = quad::integrate_vec(f, dim, 0.0, kappa_max, &seeds, quad_spec)?;
    let mut vals = out.value;
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotConverged("integrand hit a singular frequency".into()));
    }

    if subtract_uv {
        // smooth 1/k^3 remainder on the diagonals: add the measured tail;
        // the oscillatory off-diagonal tails get their analytic boundary
        // term instead (the velocity block decays only like sin(k l)/k^2)
        let period = spec.min_pair_separation().map_or(2.0, |l| 2.0 * PI / l);
        let tail = tail_correction(&f, dim, kappa_max, period);
        let mut idx = 0;
        for block in 0..2 {
            for i in 0..n {
                for j in i..n {
                    if i == j {
                        vals[idx] += tail[idx];
                    } else if block == 1 {
                        let l = spec.separation(i, j);
                        vals[idx] += 2.0 * spec.gamma * (kappa_max * l).cos()
                            / (l * l * kappa_max * kappa_max)
                            / (spec.mass * PI);
                    }
                    idx += 1;
                }
            }
        }
    }

    let sigma_xx = unpack_symmetric(n, &vals[..tri]);
    let mut sigma_vv = unpack_symmetric(n, &vals[tri..]);
    if subtract_uv {
        let addback = 2.0 * t0_scheme_sum(bath, spec.gamma, spec.uv_cutoff)? / spec.mass;
        for i in 0..n {
            sigma_vv[(i, i)] += addback;
        }
    }
    Ok(CovariancePair {
        sigma_xx: enforce_psd(&sigma_xx)?,
        sigma_vv: enforce_psd(&sigma_vv)?,
    })
}

/// Late-time covariance matrices in the Matsubara cutoff scheme (the
/// velocity variance carries the physical `ln Lambda` term; the position
/// variance is cutoff-free).
pub fn covariance(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
) -> Result<CovariancePair> {
    require_stable(spec)?;
    covariance_inner(spec, bath, quad_spec, None, None)
}

/// Covariances of the network driven by a *soft-filtered* bath: the noise
/// spectrum carries `e^{-kappa/filter_cutoff}` and is band-limited at
/// `band_limit`. This is the exact frequency-domain counterpart of the
/// spectral noise synthesis in [`crate::langevin`], used to close the loop
/// against Monte-Carlo ensembles.
pub fn covariance_filtered(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
    filter_cutoff: f64,
    band_limit: f64,
) -> Result<CovariancePair> {
    require_stable(spec)?;
    covariance_inner(spec, bath, quad_spec, Some(filter_cutoff), Some(band_limit))
}

/// Scalar integrand `Im Tr{(k^2 I + Omega_p^2) d2(k)}` and its UV-subtracted
/// version used by the energy and heat-capacity integrals.
fn trace_integrand(spec: &NetworkSpec, omega2: &DMatrix<f64>, kappa: f64) -> Result<f64> {
    let p = propagator(spec, kappa)?;
    let n = spec.n;
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let w = if i == j {
                kappa * kappa + omega2[(i, i)]
            } else {
                omega2[(i, j)]
            };
            tr += w * p.d2[(j, i)];
        }
    }
    Ok(tr.im)
}

/// Internal (total mechanical) energy of the relaxed network,
/// `E = (m/2) Tr{ sigma_vv + Omega_p^2 sigma_xx }`, evaluated directly in
/// the frequency domain. Carries the physical `(n gamma / pi) ln Lambda`
/// dependence of the Matsubara scheme.
pub fn internal_energy(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
) -> Result<f64> {
    require_stable(spec)?;
    internal_energy_unchecked(spec, bath, quad_spec)
}

fn internal_energy_unchecked(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
) -> Result<f64> {
    let omega2 = build_frequency_matrix(spec).matrix;
    let n = spec.n as f64;
    let gamma = spec.gamma;
    let f = |k_in: f64, out: &mut [f64]| {
        let k = k_in.max(KAPPA_FLOOR * spec.omega_p);
        out[0] = match trace_integrand(spec, &omega2, k) {
            Ok(g) => coth_factor(bath, k) * (g - n * t0(k, gamma)),
            Err(_) => f64::NAN,
        };
    };
    let kappa_max = kappa_max_energy(spec, bath);
    let features = feature_points(spec, bath);
    let seeds = quad::oscillation_seeds(spec.min_pair_separation(), kappa_max, &features);
    let out = quad::integrate_vec(&f, 1, 0.0, kappa_max, &seeds, quad_spec)?;
    let mut val = out.value[0];
    if !val.is_finite() {
        return Err(Error::NotConverged("energy integrand hit a singular frequency".into()));
    }
    let period = spec.min_pair_separation().map_or(2.0, |l| 2.0 * PI / l);
    val += tail_correction(&f, 1, kappa_max, period)[0];
    let addback = n * t0_scheme_sum(bath, gamma, spec.uv_cutoff)?;
    Ok(val / (2.0 * PI) + addback)
}

/// Heat capacity from the direct frequency integral
/// `C = Im int dk/2pi [(beta k/2)/sinh(beta k/2)]^2 (1/k) Tr{(k^2 I +
/// Omega_p^2) d2(k)}`. The integrand is absolutely convergent, so the
/// cutoff regulator is already at its infinite limit and `C` is
/// cutoff-independent.
pub fn heat_capacity_direct(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
) -> Result<f64> {
    require_stable(spec)?;
    let beta = bath
        .beta()
        .ok_or_else(|| Error::Spec("heat capacity requires finite temperature".into()))?;
    let omega2 = build_frequency_matrix(spec).matrix;
    let f = |k_in: f64| {
        let k = k_in.max(KAPPA_FLOOR * spec.omega_p);
        let w = sinh_weight(beta * k);
        if w == 0.0 {
            return 0.0;
        }
        match trace_integrand(spec, &omega2, k) {
            Ok(g) => w * g / k,
            Err(_) => f64::NAN,
        }
    };
    let kappa_max = 35.0 / beta + 30.0 * omega_max(spec);
    let features = feature_points(spec, bath);
    let seeds = quad::oscillation_seeds(spec.min_pair_separation(), kappa_max, &features);
    let v = quad::integrate(f, 0.0, kappa_max, &seeds, quad_spec)?;
    if !v.is_finite() {
        return Err(Error::NotConverged("heat-capacity integrand hit a singular frequency".into()));
    }
    Ok(v / PI)
}

/// Heat capacity by the central finite difference
/// `C = -beta^2 (E(beta+h) - E(beta-h)) / 2h`, with a Richardson step check
/// (the h and h/2 estimates must contract like a second-order scheme).
pub fn heat_capacity_fd(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
    h: f64,
) -> Result<f64> {
    require_stable(spec)?;
    let beta = bath
        .beta()
        .ok_or_else(|| Error::Spec("heat capacity requires finite temperature".into()))?;
    if !(h > 0.0) || h >= beta {
        return Err(Error::Spec(format!("invalid finite-difference step {h}")));
    }
    let central = |step: f64| -> Result<f64> {
        let ep = internal_energy_unchecked(
            spec,
            &BathState::Thermal { beta: beta + step },
            quad_spec,
        )?;
        let em = internal_energy_unchecked(
            spec,
            &BathState::Thermal { beta: beta - step },
            quad_spec,
        )?;
        Ok(-beta * beta * (ep - em) / (2.0 * step))
    };
    let d_h = central(h)?;
    let d_h2 = central(0.5 * h)?;
    let d_h4 = central(0.25 * h)?;
    let num = d_h - d_h2;
    let den = d_h2 - d_h4;
    let scale = d_h.abs().max(1e-12);
    if num.abs() > 1e-7 * scale {
        let ratio = num / den;
        if !(2.0..8.0).contains(&ratio) {
            return Err(Error::StepTooLarge { ratio });
        }
    }
    Ok(d_h)
}

/// Energies of the modes that diagonalize `Omega_p^2`:
/// `E_i = (m/2)[ m_ii + (W_p^2)_ii n_ii ]` with `n = U^T sigma_xx U`,
/// `m = U^T sigma_vv U`. Their sum is the internal energy exactly, by trace
/// invariance.
pub fn normal_mode_energies(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let cov = covariance(spec, bath, quad_spec)?;
    Ok(mode_energies_from_covariance(spec, &cov))
}

pub fn mode_energies_from_covariance(spec: &NetworkSpec, cov: &CovariancePair) -> Vec<f64> {
    let omega2 = build_frequency_matrix(spec).matrix;
    let eig = omega2.symmetric_eigen();
    let u = &eig.eigenvectors;
    let nmat = u.transpose() * &cov.sigma_xx * u;
    let mmat = u.transpose() * &cov.sigma_vv * u;
    (0..spec.n)
        .map(|i| 0.5 * spec.mass * (mmat[(i, i)] + eig.eigenvalues[i] * nmat[(i, i)]))
        .collect()
}

/// Full thermodynamic record at one temperature.
pub fn thermo_point(
    spec: &NetworkSpec,
    bath: &BathState,
    quad_spec: &QuadratureSpec,
) -> Result<ThermoPoint> {
    let beta = bath
        .beta()
        .ok_or_else(|| Error::Spec("thermo point requires finite temperature".into()))?;
    let cov = covariance(spec, bath, quad_spec)?;
    let mode_energies = mode_energies_from_covariance(spec, &cov);
    let energy = mode_energies.iter().sum();
    let heat_capacity = heat_capacity_direct(spec, bath, quad_spec)?;
    Ok(ThermoPoint { beta, energy, heat_capacity, mode_energies })
}
