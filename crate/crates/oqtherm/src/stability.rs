//! Existence of the late-time equilibrium state.
//!
//! The network relaxes if and only if the response matrix has no poles in
//! the closed upper half `kappa` plane. Sufficient conditions from the
//! positive-matrix analysis: `Omega_p^2` positive definite and the damping
//! matrix `Gamma` positive definite (which strict diagonal dominance
//! guarantees). The quantitative tools here are
//!
//! - strict diagonal dominance of `Gamma(kappa)` over a frequency grid,
//! - the Routh-Hurwitz test on `p(s) = det(s^2 I + 2 s Gamma' + W_p^2)`
//!   with `Gamma'` frozen at a reference frequency,
//! - the Rayleigh-quotient quadratic bound `s = -b +- i sqrt(c - b^2)`,
//! - and, for two oscillators, a direct search for the roots of the delay
//!   characteristic function `z^2 + 2 gamma z + w^2 -+ (2 gamma/l) e^{-z l}`,
//!   whose runaway root (when present) lies on the positive real axis.

use crate::network::{build_frequency_matrix, gamma_matrix, NetworkSpec};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Outcome of the Routh-Hurwitz test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    /// A Routh row degenerated (marginal case); reported, not guessed.
    Indeterminate,
}

/// Result of the strict-diagonal-dominance scan.
#[derive(Debug, Clone)]
pub struct DominanceReport {
    pub dominant: bool,
    /// Smallest of `|Gamma_ii| - sum_{j != i} |Gamma_ij|` over grid and rows.
    pub worst_margin: f64,
    pub worst_kappa: f64,
}

/// Check `|Gamma_ii| > sum_{j!=i} |Gamma_ij|` at every grid frequency.
pub fn diagonal_dominance(spec: &NetworkSpec, kappa_grid: &[f64]) -> DominanceReport {
    let mut worst_margin = f64::INFINITY;
    let mut worst_kappa = f64::NAN;
    for &kappa in kappa_grid {
        let g = gamma_matrix(spec, kappa).gamma_mat;
        for i in 0..spec.n {
            let off: f64 = (0..spec.n)
                .filter(|&j| j != i)
                .map(|j| g[(i, j)].abs())
                .sum();
            let margin = g[(i, i)].abs() - off;
            if margin < worst_margin {
                worst_margin = margin;
                worst_kappa = kappa;
            }
        }
    }
    DominanceReport {
        dominant: worst_margin > 0.0,
        worst_margin,
        worst_kappa,
    }
}

/// Default dominance grid: log-spaced through the sinc lobes up to several
/// oscillation periods, avoiding `kappa = 0` (the sinc limit is taken there
/// by continuity anyway).
pub fn default_dominance_grid(spec: &NetworkSpec) -> Vec<f64> {
    let hi = match spec.min_pair_separation() {
        Some(l) => (20.0 / l).max(8.0 * spec.omega_p),
        None => 8.0 * spec.omega_p,
    };
    let lo = 1e-3 * spec.omega_p;
    let n = 240;
    (0..=n)
        .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
        .collect()
}

/// Orthogonal diagonalization of `Gamma(kappa_ref)` and the transformed
/// frequency matrix `W_p^2 = V Omega_p^2 V^T`.
#[derive(Debug, Clone)]
pub struct GammaDiagonalization {
    pub v: DMatrix<f64>,
    pub gamma_prime: DVector<f64>,
    pub w_script: DMatrix<f64>,
    pub gamma_prime_positive: bool,
    pub w_script_positive_definite: bool,
}

pub fn diagonalize_gamma(spec: &NetworkSpec, kappa_ref: f64) -> GammaDiagonalization {
    let g = gamma_matrix(spec, kappa_ref).gamma_mat;
    let eig = g.symmetric_eigen();
    let v = eig.eigenvectors.transpose();
    let gamma_prime = eig.eigenvalues;
    let omega = build_frequency_matrix(spec).matrix;
    let w_script = &v * omega * v.transpose();
    let w_eig = w_script.clone().symmetric_eigen().eigenvalues;
    GammaDiagonalization {
        gamma_prime_positive: gamma_prime.iter().all(|&x| x > 0.0),
        w_script_positive_definite: w_eig.iter().all(|&x| x > 0.0),
        v,
        gamma_prime,
        w_script,
    }
}

/// Characteristic polynomial coefficients of `det(sI - A)` (monic, highest
/// power first) by the Faddeev-LeVerrier recursion.
fn char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let m = a.nrows();
    let mut coeffs = vec![0.0; m + 1];
    coeffs[0] = 1.0;
    let mut mk = DMatrix::<f64>::identity(m, m);
    for k in 1..=m {
        let am = a * &mk;
        let c = -am.trace() / k as f64;
        coeffs[k] = c;
        mk = am + DMatrix::<f64>::identity(m, m) * c;
    }
    coeffs
}

/// Routh-Hurwitz verdict for `p(s) = det(s^2 I + 2 s Gamma' + W_p^2)`.
///
/// The polynomial is expanded through the first-order block companion form
/// `A = [[0, I], [-W_p^2, -2 Gamma']]`, then the Routh array decides. A row
/// that degenerates to ~0 yields [`Verdict::Indeterminate`].
pub fn hurwitz_test(gamma_prime: &DVector<f64>, w_script: &DMatrix<f64>) -> (Verdict, Vec<f64>) {
    let n = gamma_prime.len();
    let mut a = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        a[(i, n + i)] = 1.0;
        a[(n + i, n + i)] = -2.0 * gamma_prime[i];
        for j in 0..n {
            a[(n + i, j)] = -w_script[(i, j)];
        }
    }
    let coeffs = char_poly(&a);
    (routh_verdict(&coeffs), coeffs)
}

/// Routh array on a monic coefficient list (highest power first).
pub fn routh_verdict(coeffs: &[f64]) -> Verdict {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Verdict::Stable;
    }
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let tiny = 1e-12 * scale;
    // All coefficients of a Hurwitz polynomial are positive; a nonpositive
    // one settles the verdict immediately (and a ~zero one is marginal).
    for &c in coeffs {
        if c.abs() <= tiny {
            return Verdict::Indeterminate;
        }
        if c < 0.0 {
            return Verdict::Unstable;
        }
    }
    let cols = deg / 2 + 1;
    let mut row0: Vec<f64> = (0..cols).map(|i| coeffs.get(2 * i).copied().unwrap_or(0.0)).collect();
    let mut row1: Vec<f64> =
        (0..cols).map(|i| coeffs.get(2 * i + 1).copied().unwrap_or(0.0)).collect();
    let mut first_column = vec![row0[0], row1[0]];
    for _ in 2..=deg {
        if row1.iter().all(|&x| x.abs() <= tiny) {
            return Verdict::Indeterminate;
        }
        if row1[0].abs() <= tiny {
            return Verdict::Indeterminate;
        }
        let mut next = vec![0.0; cols];
        for j in 0..cols - 1 {
            // standard Routh element: (r1[0]*r0[j+1] - r0[0]*r1[j+1]) / r1[0]
            let a0 = row0.get(j + 1).copied().unwrap_or(0.0);
            let b = row1.get(j + 1).copied().unwrap_or(0.0);
            next[j] = (row1[0] * a0 - row0[0] * b) / row1[0];
        }
        first_column.push(next[0]);
        row0 = row1;
        row1 = next;
    }
    if first_column.iter().any(|&x| x.abs() <= tiny) {
        return Verdict::Indeterminate;
    }
    if first_column.iter().all(|&x| x > 0.0) {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

/// Rayleigh-quotient bound: for a unit vector `x`, the quadratic
/// `s^2 + 2 b s + c` with `b = x^T Gamma' x`, `c = x^T W_p^2 x` has roots
/// `s = -b +- i sqrt(c - b^2)`; positive definiteness of both matrices
/// forces `Re s < 0`.
pub fn quadratic_bound(
    gamma_prime: &DVector<f64>,
    w_script: &DMatrix<f64>,
    x: &DVector<f64>,
) -> (Complex64, Complex64) {
    let b = x
        .iter()
        .zip(gamma_prime.iter())
        .map(|(xi, gi)| xi * xi * gi)
        .sum::<f64>();
    let c = (x.transpose() * w_script * x)[(0, 0)];
    let disc = c - b * b;
    if disc >= 0.0 {
        let w = disc.sqrt();
        (Complex64::new(-b, w), Complex64::new(-b, -w))
    } else {
        let w = (-disc).sqrt();
        (Complex64::new(-b + w, 0.0), Complex64::new(-b - w, 0.0))
    }
}

/// One root of the two-oscillator delay characteristic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayRoot {
    /// `+1` selects the fast (Sigma) channel `w^2 = wp^2 + sigma` with
    /// delayed sign `-`; `-1` the slow (Delta) channel.
    pub channel: i8,
    pub z: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct DelayPoleReport {
    pub roots: Vec<DelayRoot>,
    /// Positive real runaway root, if one exists.
    pub runaway: Option<f64>,
    /// Newton seeds that failed to converge (reported, not fatal).
    pub failed_seeds: usize,
}

fn delay_char(z: Complex64, gamma: f64, w2: f64, ell: f64, delayed_sign: f64) -> Complex64 {
    z * z + 2.0 * gamma * z + w2 + delayed_sign * (2.0 * gamma / ell) * (-z * ell).exp()
}

fn delay_char_deriv(z: Complex64, gamma: f64, ell: f64, delayed_sign: f64) -> Complex64 {
    2.0 * z + 2.0 * gamma - delayed_sign * 2.0 * gamma * (-z * ell).exp()
}

/// Search for characteristic roots of the two-oscillator delay system.
///
/// Runaway detection scans the positive real axis (where any runaway root
/// must sit); oscillatory roots come from Newton iterations seeded at the
/// delay-free roots and at the asymptotic logarithmic branch chain, kept
/// when `|Im z|` is inside `window` (default `20 / ell`).
pub fn delay_pole_search(spec: &NetworkSpec, window: Option<f64>) -> Result<DelayPoleReport> {
    if spec.n != 2 {
        return Err(Error::Spec(format!(
            "delay pole search is defined for n = 2, got n = {}",
            spec.n
        )));
    }
    let ell = spec.separation(0, 1);
    let sigma = spec.coupling.at(ell);
    let gamma = spec.gamma;
    let wp2 = spec.omega_p * spec.omega_p;
    let window = window.unwrap_or(20.0 / ell);

    let mut roots: Vec<DelayRoot> = Vec::new();
    let mut runaway: Option<f64> = None;
    let mut failed = 0usize;

    for (tag, w2, dsign) in [(1i8, wp2 + sigma, -1.0), (-1i8, wp2 - sigma, 1.0)] {
        // (a) positive real axis: f is real there; scan for a sign change.
        let f_real = |z: f64| {
            delay_char(Complex64::new(z, 0.0), gamma, w2, ell, dsign).re
        };
        let zmax = 4.0 * (gamma + w2.abs().sqrt() + 2.0 * gamma / ell + 1.0);
        let mut prev = f_real(0.0);
        let steps = 400;
        for i in 1..=steps {
            let z = zmax * i as f64 / steps as f64;
            let val = f_real(z);
            if prev < 0.0 && val >= 0.0 {
                let mut lo = zmax * (i - 1) as f64 / steps as f64;
                let mut hi = z;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f_real(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let root = 0.5 * (lo + hi);
                runaway = Some(runaway.map_or(root, |r: f64| r.max(root)));
                roots.push(DelayRoot {
                    channel: tag,
                    z: Complex64::new(root, 0.0),
                    residual: f_real(root).abs(),
                });
                break;
            }
            prev = val;
        }

        // (b) Newton from the delay-free roots plus a seed grid over the
        // window (the logarithmic root chains sit at modest negative real
        // part, so a rectangle reaches every branch inside the window).
        let mut seeds: Vec<Complex64> = Vec::new();
        let disc = Complex64::new(w2 - gamma * gamma, 0.0).sqrt();
        seeds.push(Complex64::new(-gamma, 0.0) + Complex64::new(0.0, 1.0) * disc);
        let re_lo = -(2.0 + (1.0 + window * window * ell / (2.0 * gamma).max(1e-12)).ln() / ell);
        let re_steps = 16;
        let im_steps = ((window * ell / 0.7).ceil() as usize).clamp(4, 64);
        for i in 0..=re_steps {
            let zr = re_lo * i as f64 / re_steps as f64;
            for j in 0..=im_steps {
                let zi = 0.2 + (window - 0.2) * j as f64 / im_steps as f64;
                seeds.push(Complex64::new(zr, zi));
            }
        }
        for seed in seeds {
            let mut z = seed;
            let mut ok = false;
            for _ in 0..50 {
                let f = delay_char(z, gamma, w2, ell, dsign);
                let fp = delay_char_deriv(z, gamma, ell, dsign);
                if fp.norm() == 0.0 {
                    break;
                }
                let step = f / fp;
                z -= step;
                if step.norm() < 1e-13 * z.norm().max(1.0) {
                    ok = true;
                    break;
                }
            }
            let res = delay_char(z, gamma, w2, ell, dsign).norm();
            if ok && res < 1e-10 && z.im.abs() <= window {
                let z = if z.im < 0.0 { z.conj() } else { z };
                let dup = roots
                    .iter()
                    .any(|r| r.channel == tag && (r.z - z).norm() < 1e-7);
                if !dup {
                    roots.push(DelayRoot { channel: tag, z, residual: res });
                    if z.im > 1e-12 {
                        roots.push(DelayRoot {
                            channel: tag,
                            z: z.conj(),
                            residual: res,
                        });
                    }
                }
            } else if !ok {
                failed += 1;
            }
        }
    }

    roots.sort_by(|a, b| {
        (a.z.re, a.z.im)
            .partial_cmp(&(b.z.re, b.z.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(DelayPoleReport { roots, runaway, failed_seeds: failed })
}

/// Aggregate stability report.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub omega_p2_positive_definite: bool,
    pub gamma_diagonally_dominant: bool,
    pub worst_dominance_margin: f64,
    pub worst_dominance_kappa: f64,
    pub kappa_ref: f64,
    pub gamma_prime: Vec<f64>,
    pub w_script: DMatrix<f64>,
    pub hurwitz: Verdict,
    /// Delay characteristic roots (two-oscillator systems only).
    pub delay_roots: Vec<DelayRoot>,
    pub runaway: bool,
}

/// Full report: dominance scan, frozen-Gamma Hurwitz test, and (for n = 2)
/// the delay pole search. `Gamma'` is frozen at `kappa_ref = omega_p`.
pub fn stability_report(spec: &NetworkSpec) -> Result<StabilityReport> {
    let fm = build_frequency_matrix(spec);
    let grid = default_dominance_grid(spec);
    let dom = diagonal_dominance(spec, &grid);
    let diag = diagonalize_gamma(spec, spec.omega_p);
    let (verdict, _) = hurwitz_test(&diag.gamma_prime, &diag.w_script);
    let (delay_roots, runaway) = if spec.n == 2 {
        let rep = delay_pole_search(spec, None)?;
        let run = rep.runaway.is_some();
        (rep.roots, run)
    } else {
        (Vec::new(), verdict == Verdict::Unstable)
    };
    Ok(StabilityReport {
        omega_p2_positive_definite: fm.positive_definite,
        gamma_diagonally_dominant: dom.dominant,
        worst_dominance_margin: dom.worst_margin,
        worst_dominance_kappa: dom.worst_kappa,
        kappa_ref: spec.omega_p,
        gamma_prime: diag.gamma_prime.iter().copied().collect(),
        w_script: diag.w_script,
        hurwitz: verdict,
        delay_roots,
        runaway,
    })
}

/// Gate used by the equilibrium-state computations: positive-definite
/// `Omega_p^2`, nonzero damping, a stable frozen-Gamma Hurwitz verdict, and
/// (for two oscillators) no runaway root on the positive real axis.
pub fn require_stable(spec: &NetworkSpec) -> Result<()> {
    spec.validate()?;
    if spec.gamma == 0.0 {
        return Err(Error::UnstableSpec(
            "zero damping is marginal: the network never relaxes".into(),
        ));
    }
    let fm = build_frequency_matrix(spec);
    if !fm.positive_definite {
        return Err(Error::UnstableSpec("Omega_p^2 is not positive definite".into()));
    }
    let diag = diagonalize_gamma(spec, spec.omega_p);
    let (verdict, _) = hurwitz_test(&diag.gamma_prime, &diag.w_script);
    if verdict == Verdict::Unstable {
        return Err(Error::UnstableSpec("Hurwitz test fails at the reference frequency".into()));
    }
    if spec.n == 2 {
        let rep = delay_pole_search(spec, Some(1.0))?;
        if let Some(z) = rep.runaway {
            return Err(Error::UnstableSpec(format!(
                "runaway root on the positive real axis at z = {z:.6}"
            )));
        }
    }
    Ok(())
}
