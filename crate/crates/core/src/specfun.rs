//! Cylinder functions of integer order: `J_n`, `Y_n`, `H^(1)_n`, plus the
//! first two spherical Bessel functions.
//!
//! `J_n` is evaluated by Miller's backward recurrence normalized with
//! `J_0 + 2 sum J_2m = 1`, which is uniformly stable over the order/argument
//! range used here. `Y_0`, `Y_1` use the ascending log series for small
//! argument and Steed's continued fraction combined with the Wronskian for
//! large argument; higher orders follow by the (forward stable) upward
//! recurrence. All routines target the range `order <= 200`, `t <= 100`
//! needed by the disk series and the boundary-integral kernels.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Highest admissible order; the disk series truncates near `k r + 20`,
/// far below this.
pub const MAX_ORDER: u32 = 200;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.5772156649015328606;

/// Crossover between the ascending series and the continued-fraction
/// evaluation of `Y_0`, `Y_1`.
const Y_SERIES_CUTOFF: f64 = 8.0;

fn check_order(order: u32) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Bessel order {order} exceeds supported bound {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Bessel function of the first kind `J_order(t)` for `t >= 0`.
pub fn bessel_j(order: u32, t: f64) -> Result<f64> {
    check_order(order)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "bessel_j requires finite t >= 0, got {t}"
        )));
    }
    Ok(bessel_j_all(order, t)[order as usize])
}

/// `J_0(t) .. J_max_order(t)` in one backward-recurrence pass.
///
/// Callers that need a whole ladder of orders (the disk series, the
/// Funk–Hecke checks) should prefer this over repeated scalar calls.
pub fn bessel_j_all(max_order: u32, t: f64) -> Vec<f64> {
    let n = max_order as usize;
    if t == 0.0 {
        let mut out = vec![0.0; n + 1];
        out[0] = 1.0;
        return out;
    }
    // start deep enough that the downward recurrence has washed out the
    // (growing) Y component by the time it reaches the requested orders
    let base = (n as f64).max(t);
    let start = n.max(t.ceil() as usize) + 18 + (2.0 * base.sqrt()).ceil() as usize;
    let mut out = vec![0.0; n + 1];
    let mut fnext = 0.0f64; // J_{m+1} (unnormalized)
    let mut fcur = 1e-150f64; // J_m
    let mut norm = 0.0f64; // J_0 + 2 * sum_{m even > 0} J_m
    for m in (0..=start).rev() {
        let fprev = (2.0 * (m as f64 + 1.0) / t) * fcur - fnext;
        fnext = fcur;
        fcur = fprev;
        // fcur now holds J_m
        if m <= n {
            out[m] = fcur;
        }
        if m > 0 && m % 2 == 0 {
            norm += 2.0 * fcur;
        }
        if fcur.abs() > 1e250 {
            let r = 1.0 / fcur.abs();
            fcur *= r;
            fnext *= r;
            norm *= r;
            for v in out.iter_mut() {
                *v *= r;
            }
        }
    }
    norm += fcur; // J_0 term
    let scale = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// Bessel function of the second kind `Y_order(t)` for `t > 0`.
pub fn bessel_y(order: u32, t: f64) -> Result<f64> {
    check_order(order)?;
    Ok(bessel_y_all(order, t)?[order as usize])
}

/// `Y_0(t) .. Y_max_order(t)` by upward recurrence from `Y_0`, `Y_1`.
pub fn bessel_y_all(max_order: u32, t: f64) -> Result<Vec<f64>> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "bessel_y requires t > 0 (logarithmic singularity at 0), got {t}"
        )));
    }
    let (y0, y1) = y0_y1(t);
    let n = max_order as usize;
    let mut out = Vec::with_capacity(n + 1);
    out.push(y0);
    if n >= 1 {
        out.push(y1);
    }
    for m in 1..n {
        let next = (2.0 * m as f64 / t) * out[m] - out[m - 1];
        out.push(next);
    }
    Ok(out)
}

/// Hankel function of the first kind, `H^(1)_order(t) = J + iY`.
pub fn hankel1(order: u32, t: f64) -> Result<Complex64> {
    let j = bessel_j(order, t)?;
    let y = bessel_y(order, t)?;
    Ok(Complex64::new(j, y))
}

/// Spherical Bessel functions `j_0`, `j_1` (removable singularity at 0).
pub fn spherical_j(order: u32, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "spherical_j requires finite t >= 0, got {t}"
        )));
    }
    match order {
        0 => {
            if t.abs() < 1e-2 {
                let t2 = t * t;
                Ok(1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0)))
            } else {
                Ok(t.sin() / t)
            }
        }
        1 => {
            if t.abs() < 1e-2 {
                let t2 = t * t;
                Ok(t / 3.0 * (1.0 - t2 / 10.0 * (1.0 - t2 / 28.0)))
            } else {
                Ok(t.sin() / (t * t) - t.cos() / t)
            }
        }
        _ => Err(Error::InvalidArgument(format!(
            "spherical_j implemented for orders 0 and 1 only, got {order}"
        ))),
    }
}

/// `Y_0`, `Y_1` dispatch: ascending series below the cutoff, Steed's
/// continued fraction plus Miller's `J` values above it.
fn y0_y1(t: f64) -> (f64, f64) {
    if t < Y_SERIES_CUTOFF {
        y0_y1_series(t)
    } else {
        let j = bessel_j_all(1, t);
        y0_y1_steed(t, j[0], j[1])
    }
}

/// `(J_0, J_1, Y_0, Y_1)` at `t > 0` in one pass; the boundary-integral
/// kernels need all four per node pair.
pub(crate) fn jy01(t: f64) -> Result<(f64, f64, f64, f64)> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cylinder functions need t > 0, got {t}"
        )));
    }
    let j = bessel_j_all(1, t);
    let (y0, y1) = if t < Y_SERIES_CUTOFF {
        y0_y1_series(t)
    } else {
        y0_y1_steed(t, j[0], j[1])
    };
    Ok((j[0], j[1], y0, y1))
}

/// Ascending log series for `Y_0`, `Y_1` (accurate for small `t`).
fn y0_y1_series(t: f64) -> (f64, f64) {
    let u = 0.25 * t * t;
    let log_term = (0.5 * t).ln() + EULER_GAMMA;

    // J_0 and the harmonic-weighted companion series
    let mut term = 1.0f64;
    let mut j0 = 1.0f64;
    let mut h = 0.0f64; // harmonic number H_k
    let mut s0 = 0.0f64; // sum (-1)^{k+1} H_k u^k / (k!)^2
    for k in 1..200 {
        let kf = k as f64;
        term *= -u / (kf * kf);
        j0 += term;
        h += 1.0 / kf;
        s0 -= term * h; // -(-1)^k = (-1)^{k+1}
        if term.abs() < 1e-18 * j0.abs().max(1.0) {
            break;
        }
    }
    let y0 = (2.0 / PI) * (log_term * j0 + s0);

    // J_1 and its companion with H_k + H_{k+1} weights
    let mut term = 1.0f64; // u^k / (k!(k+1)!)
    let mut j1s = 1.0f64; // sum (-1)^k u^k/(k!(k+1)!)
    let mut hk = 0.0f64;
    let mut hk1 = 1.0f64;
    let mut s1 = 1.0f64; // sum (-1)^k (H_k + H_{k+1}) u^k/(k!(k+1)!)
    let mut sign = 1.0f64;
    for k in 1..200 {
        let kf = k as f64;
        term *= u / (kf * (kf + 1.0));
        sign = -sign;
        hk += 1.0 / kf;
        hk1 += 1.0 / (kf + 1.0);
        j1s += sign * term;
        s1 += sign * term * (hk + hk1);
        if term < 1e-18 {
            break;
        }
    }
    let j1 = 0.5 * t * j1s;
    let y1 = (2.0 / PI) * (log_term * j1) - 2.0 / (PI * t) - (t / (2.0 * PI)) * s1;
    (y0, y1)
}

/// Steed's method: the continued fraction for `(J_0' + iY_0')/(J_0 + iY_0)`
/// (modified Lentz), closed with Miller's `J_0`, `J_1`.
fn y0_y1_steed(t: f64, j0: f64, j1: f64) -> (f64, f64) {
    // CF2 for nu = 0: p + iq = -1/(2t) + i + (i/t) * K_{j>=1} a_j / b_j,
    // a_j = (j - 1/2)^2, b_j = 2(t + i j)
    let tiny = Complex64::new(1e-290, 0.0);
    let mut f = Complex64::new(-0.5 / t, 1.0);
    if f == Complex64::ZERO {
        f = tiny;
    }
    let mut c_lentz = f;
    let mut d_lentz = Complex64::ZERO;
    let coef = Complex64::new(0.0, 1.0 / t);
    for j in 1..1000 {
        let jf = j as f64;
        let a = Complex64::new((jf - 0.5) * (jf - 0.5), 0.0) * if j == 1 { coef } else { Complex64::ONE };
        let b = Complex64::new(2.0 * t, 2.0 * jf);
        d_lentz = b + a * d_lentz;
        if d_lentz == Complex64::ZERO {
            d_lentz = tiny;
        }
        c_lentz = b + a / c_lentz;
        if c_lentz == Complex64::ZERO {
            c_lentz = tiny;
        }
        d_lentz = Complex64::ONE / d_lentz;
        let delta = c_lentz * d_lentz;
        f *= delta;
        if (delta - Complex64::ONE).norm() < 1e-16 {
            break;
        }
    }
    let (p, q) = (f.re, f.im);
    // J_0' = p J_0 - q Y_0 with J_0' = -J_1
    let y0 = (p * j0 + j1) / q;
    let y0p = q * j0 + p * y0;
    (y0, -y0p)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: the defining power series
    /// `J_n(t) = sum_m (-1)^m (t/2)^{n+2m} / (m! (n+m)!)`, reliable for the
    /// small arguments it is used at.
    fn j_series(order: u32, t: f64) -> f64 {
        let half = 0.5 * t;
        let mut term = 1.0f64;
        for m in 1..=order {
            term *= half / m as f64;
        }
        let mut sum = term;
        let u = half * half;
        for m in 1..400 {
            let mf = m as f64;
            term *= -u / (mf * (mf + order as f64));
            sum += term;
            if term.abs() < 1e-20 * sum.abs().max(1e-280) {
                break;
            }
        }
        sum
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol * b.abs().max(1.0),
            "{a} vs {b} (tol {tol})"
        );
    }

    #[test]
    fn j_at_zero() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j_matches_power_series() {
        for order in [0u32, 1, 2, 5, 11, 30] {
            for &t in &[0.05, 0.5, 1.0, 2.5, 4.0, 7.5, 11.0] {
                let oracle = j_series(order, t);
                let v = bessel_j(order, t).unwrap();
                assert!(
                    (v - oracle).abs() <= 1e-13 + 1e-12 * oracle.abs(),
                    "J_{order}({t}) = {v}, series {oracle}"
                );
            }
        }
    }

    #[test]
    fn first_zero_of_j0_by_bisection_on_series() {
        // bracket the first sign change of the series oracle
        let (mut lo, mut hi) = (2.0f64, 3.0f64);
        assert!(j_series(0, lo) > 0.0 && j_series(0, hi) < 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if j_series(0, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let zero = 0.5 * (lo + hi);
        assert!((zero - 2.404825557695773).abs() < 1e-12);
        assert!(bessel_j(0, zero).unwrap().abs() < 1e-10);
    }

    #[test]
    fn y_rejects_nonpositive_argument() {
        assert!(bessel_y(0, 0.0).is_err());
        assert!(bessel_y(0, -1.0).is_err());
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_j(201, 1.0).is_err());
        assert!(bessel_y(201, 1.0).is_err());
    }

    #[test]
    fn y0_log_divergence_near_zero() {
        // Y_0(t) ~ (2/pi) ln(t/2) for t -> 0+
        let v = bessel_y(0, 1e-6).unwrap();
        assert!(v < -8.0, "Y_0(1e-6) = {v}");
        let leading = (2.0 / PI) * ((0.5e-6f64).ln() + EULER_GAMMA);
        assert!((v - leading).abs() < 1e-9);
    }

    #[test]
    fn y0_reference_value() {
        // frozen from the ascending-series oracle, cross-checked against
        // published tables
        assert_close(bessel_y(0, 1.0).unwrap(), 0.08825696421567696, 1e-9);
        assert_close(bessel_y(1, 1.0).unwrap(), -0.7812128213002887, 1e-12);
        assert_close(bessel_y(0, 10.0).unwrap(), 0.05567116728359939, 1e-12);
    }

    #[test]
    fn series_and_steed_agree_in_overlap() {
        for &t in &[5.0, 6.0, 7.0, 7.9, 8.5, 9.0] {
            let (ys0, ys1) = y0_y1_series(t);
            let j = bessel_j_all(1, t);
            let (yc0, yc1) = y0_y1_steed(t, j[0], j[1]);
            assert!((ys0 - yc0).abs() < 5e-13, "Y0({t}): {ys0} vs {yc0}");
            assert!((ys1 - yc1).abs() < 5e-13, "Y1({t}): {ys1} vs {yc1}");
        }
    }

    #[test]
    fn wronskian_identity() {
        // J_{n+1} Y_n - J_n Y_{n+1} = 2/(pi t)
        for n in 0..=10u32 {
            let mut t = 0.1;
            while t <= 50.0 {
                let j = bessel_j_all(n + 1, t);
                let y = bessel_y_all(n + 1, t).unwrap();
                let w = j[n as usize + 1] * y[n as usize] - j[n as usize] * y[n as usize + 1];
                let expect = 2.0 / (PI * t);
                assert!(
                    (w - expect).abs() <= 1e-10 * expect.abs().max(1.0),
                    "wronskian n={n} t={t}: {w} vs {expect}"
                );
                t += 0.7;
            }
        }
    }

    #[test]
    fn wronskian_exact_form_at_three() {
        // J_1(t) Y_0(t) - J_0(t) Y_1(t) = 2/(pi t) at t = 3
        let t = 3.0;
        let w = bessel_j(1, t).unwrap() * bessel_y(0, t).unwrap()
            - bessel_j(0, t).unwrap() * bessel_y(1, t).unwrap();
        assert!((w - 2.0 / (PI * t)).abs() < 1e-12);
    }

    #[test]
    fn three_term_recurrence_consistency() {
        for n in 1..=10u32 {
            let mut t = 0.1;
            while t <= 50.0 {
                let j = bessel_j_all(n + 1, t);
                let lhs = j[n as usize - 1] + j[n as usize + 1];
                let rhs = (2.0 * n as f64 / t) * j[n as usize];
                let scale = j[n as usize].abs().max(1e-30);
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * scale.max(1.0),
                    "recurrence n={n} t={t}"
                );
                t += 0.7;
            }
        }
    }

    #[test]
    fn large_argument_asymptotics() {
        // |J_0(t) - (cos t + sin t)/sqrt(pi t)| <= C / t^{3/2}
        for &t in &[50.0, 100.0, 500.0] {
            let j0 = bessel_j(0, t).unwrap();
            let leading = (t.cos() + t.sin()) / (PI * t).sqrt();
            assert!(
                (j0 - leading).abs() <= 0.5 / t.powf(1.5),
                "J0({t}) asymptotics"
            );
        }
    }

    #[test]
    fn hankel_reference_and_modulus_decay() {
        let h = hankel1(0, 1.0).unwrap();
        assert_close(h.re, 0.7651976865579666, 1e-9);
        assert_close(h.im, 0.08825696421567696, 1e-9);
        // |H0(t)| sqrt(t) -> sqrt(2/pi)
        let t = 500.0;
        let h = hankel1(0, t).unwrap();
        assert!((h.norm() * t.sqrt() - (2.0 / PI).sqrt()).abs() < 1e-3);
        // conj(H1_0) pairs with H2_0: same real part, flipped imaginary part
        let j = bessel_j(0, 2.7).unwrap();
        let y = bessel_y(0, 2.7).unwrap();
        let h1 = hankel1(0, 2.7).unwrap();
        assert_eq!(h1.conj(), Complex64::new(j, -y));
    }

    #[test]
    fn spherical_limits() {
        assert_eq!(spherical_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(spherical_j(1, 0.0).unwrap(), 0.0);
        assert!(spherical_j(0, PI).unwrap().abs() < 1e-15);
        assert!(spherical_j(2, 1.0).is_err());
        // series branch agrees with the closed form evaluated at the same t
        let t = 0.0099999f64;
        let closed = t.sin() / (t * t) - t.cos() / t;
        assert!((spherical_j(1, t).unwrap() - closed).abs() < 2e-13);
    }

    #[test]
    fn high_order_values_stay_accurate() {
        // J_50(20) is deep in the evanescent regime; Miller handles it
        let v = bessel_j(50, 20.0).unwrap();
        assert_close(v, 4.4510392847006816e-16, 1e-10);
        let v = bessel_j(200, 100.0).unwrap();
        assert_close(v, 2.0594424939411679e-41, 1e-9);
    }
}
