//! Analytic reference results: single-oscillator Matsubara closed forms and
//! their asymptotes, the conventional-thermodynamics heat capacity, the
//! explicit two-oscillator heat-capacity integral, and the complex digamma /
//! trigamma functions those formulas need.
//!
//! The single-oscillator mechanical energy after relaxation is
//!
//! ```text
//! E = 1/beta - (gamma/pi) ln(2 pi / (beta Lambda)) - 2 Im{ w+ H(-i beta w+) },
//! w+ = (W + i gamma) / (2 pi),   W = sqrt(omega_p^2 - gamma^2),
//! ```
//!
//! with `H` the harmonic number extended to complex argument, and the heat
//! capacity follows by `C = -beta^2 dE/dbeta`. Against these the quadrature
//! route of [`crate::equilibrium`] is validated to full precision.

use crate::kernels::{coth, sinc};
use crate::quad::{self, QuadratureSpec};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Parameters of the one-oscillator system (mass scaled out).
#[derive(Debug, Clone, Copy)]
pub struct SingleOscParams {
    pub beta: f64,
    pub gamma: f64,
    pub omega_p: f64,
    pub uv_cutoff: f64,
}

impl SingleOscParams {
    /// `w+ = (W + i gamma)/(2 pi)`. On the overdamped branch `gamma >
    /// omega_p` the resonance frequency `W` is imaginary; the principal
    /// square root keeps `-i beta w+` real positive there, and the results
    /// stay real (flagged EXTRAPOLATED by the callers that care).
    pub fn w_plus(&self) -> Complex64 {
        let w2 = Complex64::new(self.omega_p * self.omega_p - self.gamma * self.gamma, 0.0);
        (w2.sqrt() + Complex64::new(0.0, self.gamma)) / (2.0 * PI)
    }

    pub fn overdamped(&self) -> bool {
        self.gamma > self.omega_p
    }
}

// ---------------------------------------------------------------------------
// complex digamma / trigamma
// ---------------------------------------------------------------------------

/// Asymptotic-series Bernoulli coefficients `B_{2k} / 2k` for digamma.
const DIGAMMA_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Bernoulli numbers `B_{2k}` for the trigamma series.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Complex digamma `psi(z)` by upward recurrence into `|z| > 12` followed by
/// the asymptotic series; reflection handles `Re z < 0`.
pub fn digamma(mut z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleArgument);
    }
    if z.re < 0.5 {
        // psi(z) = psi(1 - z) - pi cot(pi z)
        let pz = Complex64::new(PI, 0.0) * z;
        let cot = pz.cos() / pz.sin();
        return Ok(digamma(Complex64::new(1.0, 0.0) - z)? - PI * cot);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 12.0 {
        shift -= z.inv();
        z += Complex64::new(1.0, 0.0);
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for c in DIGAMMA_COEFFS.iter().take(6) {
        series += *c * p;
        p *= inv2;
    }
    Ok(shift + z.ln() - 0.5 * inv - series)
}

/// Complex trigamma `psi'(z)`, same strategy as [`digamma`].
pub fn trigamma(mut z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleArgument);
    }
    if z.re < 0.5 {
        // psi'(z) = -psi'(1 - z) + pi^2 / sin^2(pi z)
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Ok(-trigamma(Complex64::new(1.0, 0.0) - z)? + PI * PI / (s * s));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 12.0 {
        shift += (z * z).inv();
        z += Complex64::new(1.0, 0.0);
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    // psi'(z) ~ 1/z + 1/(2 z^2) + sum B_{2k} / z^{2k+1}
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2 * inv;
    for b in BERNOULLI.iter().take(6) {
        series += *b * p;
        p *= inv2;
    }
    Ok(shift + inv + 0.5 * inv2 + series)
}

/// Harmonic number of complex argument, `H(z) = psi(z + 1) + gamma_E`.
pub fn complex_harmonic(z: Complex64) -> Result<Complex64> {
    Ok(digamma(z + Complex64::new(1.0, 0.0))? + EULER_GAMMA)
}

// ---------------------------------------------------------------------------
// single-oscillator closed forms
// ---------------------------------------------------------------------------

/// Mechanical energy of the relaxed single oscillator (Matsubara-regularized,
/// large-cutoff form). Carries the physical `ln Lambda` dependence.
pub fn single_energy_closed(p: &SingleOscParams) -> Result<f64> {
    let wp = p.w_plus();
    let h = complex_harmonic(Complex64::new(0.0, -p.beta) * wp)?;
    Ok(1.0 / p.beta - (p.gamma / PI) * (2.0 * PI / (p.beta * p.uv_cutoff)).ln()
        - 2.0 * (wp * h).im)
}

/// Heat capacity of the relaxed single oscillator; cutoff-free because the
/// logarithmic divergence of the energy is temperature-independent.
pub fn single_heat_capacity_closed(p: &SingleOscParams) -> Result<f64> {
    let wp = p.w_plus();
    let bw = Complex64::new(p.beta, 0.0) * wp;
    let t = trigamma(Complex64::new(1.0, 0.0) - Complex64::new(0.0, 1.0) * bw)?;
    Ok(1.0 - p.gamma * p.beta / PI - 2.0 * (bw * bw * t).re)
}

/// High-temperature asymptote `1 - gamma beta / pi`.
pub fn single_heat_capacity_high_t(p: &SingleOscParams) -> f64 {
    1.0 - p.gamma * p.beta / PI
}

/// Low-temperature asymptote `2 pi gamma / (3 beta omega_p^2)`: algebraic,
/// not exponential, vanishing.
pub fn single_heat_capacity_low_t(p: &SingleOscParams) -> f64 {
    2.0 * PI * p.gamma / (3.0 * p.beta * p.omega_p * p.omega_p)
}

/// Conventional (vanishing-coupling thermal state) heat capacity of one
/// oscillator: `(beta w/2)^2 / sinh^2(beta w/2)`.
pub fn conventional_heat_capacity(beta: f64, omega_p: f64) -> f64 {
    let x = 0.5 * beta * omega_p;
    if x > 350.0 {
        return 0.0;
    }
    let r = x / x.sinh();
    r * r
}

// ---------------------------------------------------------------------------
// two coupled oscillators
// ---------------------------------------------------------------------------

/// Positivity witness: the per-channel heat-capacity integrand
///
/// ```text
/// (1/kappa) Im [ 1 / (w^2 - kappa^2 - 2 i gamma kappa +- (2 gamma/l) e^{i kappa l}) ]
///   = 2 gamma l^2 [1 -+ sinc(kappa l)] / ( [ (kappa^2 - w^2) l -+ 2 gamma cos(kappa l) ]^2
///                                          + 4 gamma^2 [ kappa l -+ sin(kappa l) ]^2 ),
/// ```
///
/// which is nonnegative for every real `kappa`. `delayed_sign = -1` selects
/// the fast (Sigma) channel with `w^2 = omega_p^2 + sigma`, `+1` the slow
/// (Delta) channel with `w^2 = omega_p^2 - sigma`.
pub fn two_osc_channel_integrand(
    kappa: f64,
    w2: f64,
    gamma: f64,
    ell: f64,
    delayed_sign: f64,
) -> f64 {
    let kl = kappa * ell;
    let s = delayed_sign;
    let num = 2.0 * gamma * ell * ell * (1.0 - s * sinc(kl));
    let d1 = (kappa * kappa - w2) * ell - s * 2.0 * gamma * kl.cos();
    let d2 = 2.0 * gamma * (kl - s * kl.sin());
    num / (d1 * d1 + d2 * d2)
}

/// Heat capacity of the two-oscillator system from the explicit two-channel
/// integral (Sigma channel `w+^2 = wp^2 + sigma` with delayed sign `-`, Delta
/// channel `w-^2 = wp^2 - sigma` with `+`). Evaluated in the infinite-cutoff
/// limit where the integrand is absolutely convergent.
pub fn two_osc_heat_capacity(
    beta: f64,
    omega_p: f64,
    gamma: f64,
    sigma: f64,
    ell: f64,
    quad_spec: &QuadratureSpec,
) -> Result<f64> {
    let wp2 = omega_p * omega_p + sigma;
    let wm2 = omega_p * omega_p - sigma;
    runaway_guard(wp2, wm2, gamma, ell)?;
    let weight = move |x: f64| {
        if x > 300.0 {
            0.0
        } else {
            let r = if x.abs() < 1e-8 { 1.0 } else { 0.5 * x / (0.5 * x).sinh() };
            r * r
        }
    };
    let f = move |k: f64| {
        let w = weight(beta * k);
        if w == 0.0 {
            return 0.0;
        }
        let k2 = k * k;
        w * ((wp2 + k2) * two_osc_channel_integrand(k, wp2, gamma, ell, -1.0)
            + (wm2 + k2) * two_osc_channel_integrand(k, wm2, gamma, ell, 1.0))
    };
    let kmax = 30.0 / beta + 30.0 * wp2.sqrt().max(1.0);
    let mut features = vec![
        0.5 / beta,
        1.0 / beta,
        2.0 / beta,
        4.0 / beta,
        8.0 / beta,
        16.0 / beta,
    ];
    for w2 in [wp2, wm2.abs()] {
        let w0 = w2.sqrt();
        for d in [-30.0, -10.0, -3.0, -1.0, 1.0, 3.0, 10.0, 30.0] {
            features.push(w0 + d * gamma.max(1e-8 * w0));
        }
        features.push(0.5 * w0);
        features.push(2.0 * w0);
    }
    let seeds = quad::oscillation_seeds(Some(ell), kmax, &features);
    let v = quad::integrate(f, 0.0, kmax, &seeds, quad_spec)?;
    Ok(v / PI)
}

fn runaway_guard(wp2: f64, wm2: f64, gamma: f64, ell: f64) -> Result<()> {
    // The runaway root sits on the positive real axis; the channel values at
    // z = 0 decide the sign change there.
    let f_sigma0 = wp2 - 2.0 * gamma / ell;
    let f_delta0 = wm2 + 2.0 * gamma / ell;
    if f_sigma0 <= 0.0 || f_delta0 <= 0.0 {
        return Err(Error::UnstableSpec(format!(
            "two-oscillator channel crosses zero at the origin: Sigma {f_sigma0:.3e}, Delta {f_delta0:.3e}"
        )));
    }
    Ok(())
}

/// Crossover scales between the direct coupling and the bath-mediated
/// non-Markovian influence: `gamma_c = sigma l / 4`, `l_c = 4 gamma / sigma`,
/// `varsigma = sigma l / (2 gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalScales {
    pub gamma_c: f64,
    pub ell_c: f64,
    pub varsigma: f64,
}

pub fn critical_scales(gamma: f64, sigma: f64, ell: f64) -> CriticalScales {
    CriticalScales {
        gamma_c: 0.25 * sigma * ell,
        ell_c: 4.0 * gamma / sigma,
        varsigma: 0.5 * sigma * ell / gamma,
    }
}

/// Matsubara-sum position variance of the single oscillator,
/// `sigma_xx = (1/(m beta)) sum_n [omega_p^2 + 2 gamma |nu_n| + nu_n^2]^{-1}`.
///
/// Kept as an analytic cross-check for the frequency-integral route; the sum
/// converges absolutely so no cutoff enters.
pub fn single_position_variance_matsubara(p: &SingleOscParams, mass: f64) -> f64 {
    let wp2 = p.omega_p * p.omega_p;
    let nu = 2.0 * PI / p.beta;
    let mut total = 1.0 / wp2;
    let mut n = 1usize;
    // partial sum; terms fall off like 1/n^2, then an Euler-Maclaurin
    // midpoint tail in closed form
    loop {
        let v = nu * n as f64;
        let term = 2.0 / (wp2 + 2.0 * p.gamma * v + v * v);
        total += term;
        if (term < 1e-12 * total && n > 256) || n > 2_000_000 {
            let v0 = nu * (n as f64 + 0.5);
            let disc = wp2 - p.gamma * p.gamma;
            total += if disc > 0.0 {
                let w = disc.sqrt();
                (2.0 / (nu * w)) * (0.5 * PI - ((v0 + p.gamma) / w).atan())
            } else {
                2.0 / (nu * (v0 + p.gamma))
            };
            break;
        }
        n += 1;
    }
    total / (mass * p.beta)
}

/// `coth(beta omega/2)/(2 m omega)`: thermal variance of the free oscillator.
pub fn free_position_variance(beta: f64, mass: f64, omega_p: f64) -> f64 {
    coth(0.5 * beta * omega_p) / (2.0 * mass * omega_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn harmonic_numbers() {
        assert_relative_eq!(complex_harmonic(c64(1.0, 0.0)).unwrap().re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            complex_harmonic(c64(4.0, 0.0)).unwrap().re,
            25.0 / 12.0,
            epsilon = 1e-14
        );
        // frozen: H(-3i)
        let h = complex_harmonic(c64(0.0, -3.0)).unwrap();
        assert_relative_eq!(h.re, 1.6851963756116837, epsilon = 1e-13);
        assert_relative_eq!(h.im, -1.4041296805875762, epsilon = 1e-13);
        assert!(matches!(
            complex_harmonic(c64(-2.0, 0.0)),
            Err(Error::PoleArgument)
        ));
    }

    #[test]
    fn trigamma_values() {
        assert_relative_eq!(
            trigamma(c64(1.0, 0.0)).unwrap().re,
            PI * PI / 6.0,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            trigamma(c64(0.5, 0.0)).unwrap().re,
            PI * PI / 2.0,
            epsilon = 1e-12
        );
        let t = trigamma(c64(1.0, -0.7)).unwrap();
        assert_relative_eq!(t.re, 0.7715499715965098, epsilon = 1e-13);
        assert_relative_eq!(t.im, 0.8700873344308926, epsilon = 1e-13);
    }

    #[test]
    fn digamma_trigamma_grid_against_reference() {
        // frozen mpmath values across recurrence/asymptotic/reflection paths
        let cases = [
            (c64(0.3, 25.0), c64(3.2188411513057379, 1.578797223262829),
             c64(-0.00032010761363288749, -0.040002774437071767)),
            (c64(3.7, -0.2), c64(1.1690579181182169, -0.061930035982697658),
             c64(0.30887652080466062, 0.019008598059810541)),
            (c64(1.0, 0.001), c64(-0.57721446284566663, 0.0016449329845260101),
             c64(1.644930819883612, -0.002404109658614218)),
            (c64(14.2, 9.5), c64(2.8137552587557459, 0.60616305289985343),
             c64(0.049295607949023721, -0.034162607884251567)),
            (c64(1.0, -40.0), c64(3.6889315407034474, -1.5582963267948966),
             c64(0.0003125, 0.024997395507667051)),
        ];
        for (z, psi_ref, tri_ref) in cases {
            let d = digamma(z).unwrap();
            let t = trigamma(z).unwrap();
            assert_relative_eq!(d.re, psi_ref.re, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(d.im, psi_ref.im, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(t.re, tri_ref.re, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(t.im, tri_ref.im, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn energy_closed_frozen_values() {
        let p = SingleOscParams { beta: 2.0, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
        assert_relative_eq!(
            single_energy_closed(&p).unwrap(),
            0.84685367168262619,
            max_relative = 1e-13
        );
        let p = SingleOscParams { beta: 1.0, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
        assert_relative_eq!(
            single_energy_closed(&p).unwrap(),
            1.2465564234821991,
            max_relative = 1e-13
        );
        let p = SingleOscParams { beta: 0.1, gamma: 0.5, omega_p: 1.0, uv_cutoff: 100.0 };
        assert_relative_eq!(
            single_energy_closed(&p).unwrap(),
            10.078031030448358,
            max_relative = 1e-13
        );
    }

    #[test]
    fn energy_weak_coupling_limit() {
        // gamma -> 0: E -> (omega_p/2) coth(beta omega_p / 2) - (gamma/pi) ln(...)
        let p = SingleOscParams { beta: 2.0, gamma: 1e-7, omega_p: 1.3, uv_cutoff: 100.0 };
        let free = 0.5 * 1.3 * coth(0.5 * 2.0 * 1.3);
        let log_term = (p.gamma / PI) * (2.0 * PI / (p.beta * p.uv_cutoff)).ln();
        assert_relative_eq!(
            single_energy_closed(&p).unwrap(),
            free - log_term,
            max_relative = 1e-6
        );
        // beta -> 0: 1/beta dominates
        let p = SingleOscParams { beta: 1e-4, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
        let e = single_energy_closed(&p).unwrap();
        assert_relative_eq!(e, 1.0 / p.beta, max_relative = 1e-3);
    }

    #[test]
    fn heat_capacity_closed_frozen_and_asymptotes() {
        let p = SingleOscParams { beta: 1.0, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
        assert_relative_eq!(
            single_heat_capacity_closed(&p).unwrap(),
            0.87282336471475140,
            max_relative = 1e-13
        );
        let p = SingleOscParams { beta: 30.0, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
        assert_relative_eq!(
            single_heat_capacity_closed(&p).unwrap(),
            0.014328027179015393,
            max_relative = 1e-12
        );
        // high-T: C = 1 - gamma beta / pi + O(beta^2)
        let p = SingleOscParams { beta: 1e-3, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
        assert_relative_eq!(
            single_heat_capacity_closed(&p).unwrap(),
            single_heat_capacity_high_t(&p),
            max_relative = 1e-6
        );
        // low-T: within 10% of the algebraic asymptote at beta = 30
        let p = SingleOscParams { beta: 30.0, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
        let c = single_heat_capacity_closed(&p).unwrap();
        let asym = single_heat_capacity_low_t(&p);
        assert!((c - asym).abs() / asym < 0.10, "c={c}, asym={asym}");
    }

    #[test]
    fn asymptote_convergence_is_monotone() {
        // (C - asymptote)/asymptote -> 0 monotonically, 5 points per decade
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let beta = 40.0 * 10f64.powf(i as f64 / 5.0);
            let p = SingleOscParams { beta, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
            let c = single_heat_capacity_closed(&p).unwrap();
            let rel = ((c - single_heat_capacity_low_t(&p)) / single_heat_capacity_low_t(&p)).abs();
            assert!(rel < prev, "not monotone at beta={beta}: {rel} vs {prev}");
            prev = rel;
        }
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let beta = 0.05 / 10f64.powf(i as f64 / 5.0);
            let p = SingleOscParams { beta, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
            let c = single_heat_capacity_closed(&p).unwrap();
            let rel = ((c - single_heat_capacity_high_t(&p)) / single_heat_capacity_high_t(&p)).abs();
            assert!(rel < prev, "not monotone at beta={beta}");
            prev = rel;
        }
    }

    #[test]
    fn conventional_limits() {
        assert_relative_eq!(conventional_heat_capacity(1e-9, 1.0), 1.0, epsilon = 1e-9);
        // beta omega = 2 -> 1/sinh^2(1)
        assert_relative_eq!(
            conventional_heat_capacity(2.0, 1.0),
            1.0 / 1.0f64.sinh().powi(2),
            max_relative = 1e-14
        );
        // beta omega = 10: beta^2 w^2 e^{-beta w} scale
        let c = conventional_heat_capacity(10.0, 1.0);
        assert_relative_eq!(c, 100.0 * (-10.0f64).exp() * 4.0 / (1.0 - (-10.0f64).exp()).powi(2) / 4.0, max_relative = 1e-3);
    }

    #[test]
    fn weak_coupling_collapse() {
        let quadless = |beta: f64| {
            let p = SingleOscParams { beta, gamma: 1e-5, omega_p: 1.0, uv_cutoff: 100.0 };
            single_heat_capacity_closed(&p).unwrap()
        };
        for &beta in &[0.2, 0.5, 1.0, 2.0, 3.5, 5.0] {
            let diff = (quadless(beta) - conventional_heat_capacity(beta, 1.0)).abs();
            assert!(diff < 1e-3, "beta={beta}: diff={diff:.2e}");
        }
    }

    #[test]
    fn two_osc_frozen_and_positivity() {
        let spec = QuadratureSpec::default();
        let wp = 1.04f64.sqrt();
        let c1 = two_osc_heat_capacity(1.0, wp, 0.2, 0.5, 1.0, &spec).unwrap();
        assert_relative_eq!(c1, 1.70453150953431211, max_relative = 1e-9);
        let c4 = two_osc_heat_capacity(4.0, wp, 0.2, 0.5, 1.0, &spec).unwrap();
        assert_relative_eq!(c4, 0.659053137926987144, max_relative = 1e-9);
        assert!(c1 > 0.0 && c4 > 0.0);
    }

    #[test]
    fn two_osc_rejects_runaway() {
        let spec = QuadratureSpec::default();
        // sigma large enough that the Delta channel has a positive real root
        let err = two_osc_heat_capacity(1.0, 1.04f64.sqrt(), 0.2, 1.5, 1.0, &spec);
        assert!(matches!(err, Err(Error::UnstableSpec(_))));
    }

    #[test]
    fn critical_scale_relations() {
        let s = critical_scales(0.2, 10.0, 0.08);
        assert_relative_eq!(s.gamma_c, 0.2, max_relative = 1e-14);
        assert_relative_eq!(s.ell_c, 0.08, max_relative = 1e-14);
        // varsigma = sigma l/(2 gamma) = 2 gamma_c / gamma
        assert_relative_eq!(s.varsigma, 2.0 * s.gamma_c / 0.2, max_relative = 1e-14);
    }

    #[test]
    fn matsubara_variance_frozen() {
        let p = SingleOscParams { beta: 2.0, gamma: 0.2, omega_p: 1.0, uv_cutoff: 100.0 };
        assert_relative_eq!(
            single_position_variance_matsubara(&p, 1.0),
            0.64459071277095035,
            max_relative = 1e-8
        );
        // free limit at vanishing coupling
        let p = SingleOscParams { beta: 2.0, gamma: 1e-8, omega_p: 1.0, uv_cutoff: 100.0 };
        assert_relative_eq!(
            single_position_variance_matsubara(&p, 1.0),
            free_position_variance(2.0, 1.0, 1.0),
            max_relative = 1e-6
        );
    }
}
