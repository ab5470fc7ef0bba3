//! Green's functions of the free massless scalar field at finite temperature.
//!
//! The field mediates both dissipation and noise for the oscillator network:
//! the retarded function `G_R` fixes the response kernels, the Hadamard
//! function `G_H` the noise correlations, and the two are tied by the free
//! fluctuation-dissipation relation
//!
//! ```text
//! G~_H(omega; r) = coth(beta omega / 2) * Im G~_R(omega; r).
//! ```
//!
//! Fourier convention: `f~(omega) = int dtau e^{+i omega tau} f(tau)`.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Exclusion half-width around the light cone `tau = +-r` where the
/// time-domain Hadamard function has its principal-value singularity.
pub const DEFAULT_LIGHT_CONE_EXCLUSION: f64 = 1e-9;

/// Thermal state of the field bath. `beta` is the inverse temperature in
/// natural units; zero temperature is a distinguished variant rather than an
/// infinite float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathState {
    Thermal { beta: f64 },
    ZeroTemperature,
}

impl BathState {
    pub fn thermal(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Spec(format!("bath beta must be positive and finite, got {beta}")));
        }
        Ok(BathState::Thermal { beta })
    }

    /// Inverse temperature, `None` at zero temperature.
    pub fn beta(&self) -> Option<f64> {
        match self {
            BathState::Thermal { beta } => Some(*beta),
            BathState::ZeroTemperature => None,
        }
    }

    /// `coth(beta omega / 2)`, degenerating to `sign(omega)` at zero
    /// temperature. The caller is responsible for the `omega -> 0` limit of
    /// whatever combination it appears in.
    pub fn coth_half(&self, omega: f64) -> f64 {
        match self {
            BathState::Thermal { beta } => coth(0.5 * beta * omega),
            BathState::ZeroTemperature => {
                if omega >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Numerically careful `coth`.
pub fn coth(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // Laurent series; keeps the 1/x pole exact and avoids cancellation.
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else {
        1.0 / x.tanh()
    }
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// Frequency-domain retarded function of the field between two points at
/// separation `r >= 0`.
///
/// For `r > 0` this is `e^{i omega r} / (4 pi r)`. At coincidence the real
/// part is a cutoff-dependent constant that is absorbed into the oscillator
/// frequency renormalization and never materialized here; only the odd
/// imaginary part `omega / (4 pi)` is returned.
pub fn g_ret_freq(omega: f64, r: f64) -> Complex64 {
    debug_assert!(r >= 0.0, "separation must be nonnegative");
    if r > 0.0 {
        Complex64::new(0.0, omega * r).exp() / (4.0 * PI * r)
    } else {
        Complex64::new(0.0, omega / (4.0 * PI))
    }
}

/// `Im G~_R(omega; r)`: the field's spectral (dissipation) kernel.
pub fn im_g_ret_freq(omega: f64, r: f64) -> f64 {
    if r > 0.0 {
        // sin(omega r)/(4 pi r), written through sinc so omega -> 0 is exact
        omega * sinc(omega * r) / (4.0 * PI)
    } else {
        omega / (4.0 * PI)
    }
}

/// Frequency-domain Hadamard (noise) kernel via the free-field FDR.
///
/// Even in `omega`; the `omega -> 0` value is the analytic limit
/// `1/(2 pi beta)` (independent of `r`), never an evaluation of `coth` at 0.
pub fn g_had_freq(omega: f64, r: f64, bath: &BathState) -> f64 {
    match bath {
        BathState::Thermal { beta } => {
            if (beta * omega).abs() < 1e-8 {
                return 1.0 / (2.0 * PI * beta);
            }
            bath.coth_half(omega) * im_g_ret_freq(omega, r)
        }
        BathState::ZeroTemperature => omega.signum() * im_g_ret_freq(omega, r),
    }
}

/// Time-domain Hadamard function at lag `tau` and separation `r`.
///
/// Fails with [`Error::LightConeSingularity`] within `exclusion` of the
/// light cone `tau = +-r`. At spatial coincidence the analytic `r -> 0`
/// limit is used.
pub fn g_had_time(tau: f64, r: f64, bath: &BathState, exclusion: f64) -> Result<f64> {
    debug_assert!(r >= 0.0);
    let gap = (tau.abs() - r).abs();
    if gap < exclusion {
        return Err(Error::LightConeSingularity { gap, width: exclusion });
    }
    match bath {
        BathState::Thermal { beta } => {
            if r > 0.0 {
                let a = PI * (tau - r) / beta;
                let b = PI * (tau + r) / beta;
                Ok(-(coth(a) - coth(b)) / (8.0 * PI * beta * r))
            } else {
                // coincidence limit: -csch^2(pi tau / beta) / (4 beta^2)
                let x = PI * tau / beta;
                Ok(-csch2(x) / (4.0 * beta * beta))
            }
        }
        BathState::ZeroTemperature => {
            // vacuum Hadamard: -1 / (4 pi^2 (tau^2 - r^2))
            Ok(-1.0 / (4.0 * PI * PI * (tau * tau - r * r)))
        }
    }
}

/// `1/sinh^2(x)` without overflow for large arguments.
fn csch2(x: f64) -> f64 {
    let ax = x.abs();
    if ax > 350.0 {
        return 0.0;
    }
    if ax < 1e-4 {
        // 1/x^2 - 1/3 + x^2/15
        return 1.0 / (x * x) - 1.0 / 3.0 + x * x / 15.0;
    }
    let s = ax.sinh();
    1.0 / (s * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadratureSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn retarded_kernel_reference_points() {
        // omega = 0, r = 1 -> 1/(4 pi)
        let v = g_ret_freq(0.0, 1.0);
        assert_relative_eq!(v.re, 1.0 / (4.0 * PI), max_relative = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0);
        // omega = pi, r = 1 -> -1/(4 pi)
        let v = g_ret_freq(PI, 1.0);
        assert_relative_eq!(v.re, -1.0 / (4.0 * PI), max_relative = 1e-12);
        // omega = 2, r = 0 -> i/(2 pi)
        let v = g_ret_freq(2.0, 0.0);
        assert_abs_diff_eq!(v.re, 0.0);
        assert_relative_eq!(v.im, 1.0 / (2.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn hadamard_freq_reference_points() {
        let bath = BathState::thermal(2.0).unwrap();
        // omega -> 0 limit equals 2/(4 pi beta)
        assert_relative_eq!(
            g_had_freq(1e-12, 0.0, &bath),
            1.0 / (4.0 * PI),
            max_relative = 1e-9
        );
        // small-beta divergence ~ 2/(4 pi beta)
        let hot = BathState::thermal(1e-8).unwrap();
        assert_relative_eq!(
            g_had_freq(1.0, 0.0, &hot),
            2.0 / (4.0 * PI * 1e-8),
            max_relative = 1e-6
        );
        // frozen oracle: coth(1.365) sin(0.91) / (4 pi 0.7)
        let bath = BathState::thermal(2.1).unwrap();
        assert_relative_eq!(
            g_had_freq(1.3, 0.7, &bath),
            0.10227643175609962,
            max_relative = 1e-14
        );
    }

    #[test]
    fn hadamard_time_reference_points() {
        let bath = BathState::thermal(1.0).unwrap();
        // tau = 0, r = 1: coth(pi)/(4 pi), by antisymmetry of coth
        let v = g_had_time(0.0, 1.0, &bath, DEFAULT_LIGHT_CONE_EXCLUSION).unwrap();
        assert_relative_eq!(v, 0.07987524035383605, max_relative = 1e-14);
        // tau = 5, r = 1: exponentially small residual
        let v = g_had_time(5.0, 1.0, &bath, DEFAULT_LIGHT_CONE_EXCLUSION).unwrap();
        assert_relative_eq!(v, -9.6778255800834209e-13, max_relative = 1e-9);
        // on the light cone
        let err = g_had_time(1.0, 1.0, &bath, DEFAULT_LIGHT_CONE_EXCLUSION);
        assert!(matches!(err, Err(Error::LightConeSingularity { .. })));
        // coincidence limit
        let bath = BathState::thermal(2.0).unwrap();
        let v = g_had_time(0.8, 0.0, &bath, DEFAULT_LIGHT_CONE_EXCLUSION).unwrap();
        assert_relative_eq!(v, -0.023977856281659498, max_relative = 1e-14);
    }

    #[test]
    fn fdr_identity_and_parity() {
        let bath = BathState::thermal(0.7).unwrap();
        for &omega in &[0.13, 0.9, 2.7, 11.0] {
            for &r in &[0.0, 0.4, 1.0, 3.3] {
                let lhs = g_had_freq(omega, r, &bath);
                let rhs = bath.coth_half(omega) * im_g_ret_freq(omega, r);
                assert_relative_eq!(lhs, rhs, max_relative = 1e-15);
                // parity
                assert_relative_eq!(lhs, g_had_freq(-omega, r, &bath), max_relative = 1e-13);
                assert_relative_eq!(
                    im_g_ret_freq(-omega, r),
                    -im_g_ret_freq(omega, r),
                    max_relative = 1e-13
                );
            }
        }
    }

    /// Fourier consistency of the two kernel representations: transforming
    /// the frequency kernel back to the time domain reproduces the closed
    /// time-domain form. The temperature-independent part of the spectrum
    /// (the vacuum piece, whose improper transform carries the light-cone
    /// structure) is transformed analytically; the thermal remainder
    /// `(coth - 1) sin(omega r)` decays exponentially, so a truncated
    /// numerical window converges.
    #[test]
    fn time_freq_consistency() {
        let spec = QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            ..Default::default()
        };
        for &beta in &[0.5, 1.0, 2.0] {
            let bath = BathState::thermal(beta).unwrap();
            for &r in &[0.5, 1.0, 2.0] {
                for &tau in &[0.0, 0.3 * r, 1.7 * r, r + 2.0 * beta] {
                    let vacuum = -1.0 / (4.0 * PI * PI * (tau * tau - r * r));
                    let f = |omega: f64| {
                        (omega * tau).cos()
                            * (omega * r).sin()
                            * (coth(0.5 * beta * omega) - 1.0)
                    };
                    let cut = 45.0 / beta;
                    let period = PI / (tau + r);
                    let seeds: Vec<f64> = (1..)
                        .map(|i| i as f64 * period)
                        .take_while(|&x| x < cut)
                        .collect();
                    let thermal =
                        integrate(f, 0.0, cut, &seeds, &spec).unwrap() / (4.0 * PI * PI * r);
                    assert_relative_eq!(
                        vacuum + thermal,
                        g_had_time(tau, r, &bath, DEFAULT_LIGHT_CONE_EXCLUSION).unwrap(),
                        max_relative = 1e-6,
                        epsilon = 1e-10
                    );
                }
            }
        }
    }
}
