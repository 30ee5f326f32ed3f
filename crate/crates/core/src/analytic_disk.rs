//! Closed-form far fields for a disk, by separation of variables in the
//! Jacobi–Anger basis. This is the machine-precision reference the
//! boundary-integral solver is validated against, and the only forward
//! model for penetrable (constant-contrast) scatterers.
//!
//! With incident plane wave `e^{ik x·θ̂}` and scattered wave
//! `u^s = Σ_n i^n a_n H^(1)_n(k|x|) e^{in(φ_x - φ_θ)}` on a disk of radius
//! `r` at the origin, the far field in the normalization used throughout
//! this crate (`u∞ = √(8kπ) e^{-iπ/4} lim √ρ e^{-ikρ} u^s`) is
//!
//! `u∞(x̂, θ̂) = -4i Σ_n a_n e^{in(φ_x - φ_θ)}`.
//!
//! Off-center disks pick up the translation phase
//! `e^{ik(θ̂ - x̂)·c}`.

use crate::farfield::{direction, FarFieldMatrix};
use crate::linalg::CMatrix;
use crate::specfun::{bessel_j_all, bessel_y_all};
use crate::{Error, Point, Result};
use num_complex::Complex64;

/// Boundary condition / material of the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiskCondition {
    Dirichlet,
    Neumann,
    /// Robin condition `∂u/∂ν + λ u = 0` with `Im λ >= 0`.
    Impedance(Complex64),
    /// Constant contrast `q` inside the disk (`Δu + k²(1+q)u = 0`),
    /// `Im q >= 0` and `1 + q` off the nonpositive real axis.
    Penetrable(Complex64),
}

/// A disk scatterer for the analytic series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskScatterer {
    pub center: Point,
    pub radius: f64,
    pub condition: DiskCondition,
}

impl DiskScatterer {
    pub fn new(center: Point, radius: f64, condition: DiskCondition) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        match condition {
            DiskCondition::Impedance(lambda) if lambda.im < 0.0 => {
                return Err(Error::InvalidArgument(format!(
                    "impedance must satisfy Im(lambda) >= 0, got {lambda}"
                )));
            }
            DiskCondition::Penetrable(q) => {
                if q.im < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "contrast must satisfy Im(q) >= 0, got {q}"
                    )));
                }
                let one_plus = Complex64::ONE + q;
                if one_plus.im == 0.0 && one_plus.re <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "1 + q must avoid the nonpositive real axis, got q = {q}"
                    )));
                }
            }
            _ => {}
        }
        Ok(DiskScatterer {
            center,
            radius,
            condition,
        })
    }
}

/// Truncation order for the mode series: past `k r` the modes are
/// evanescent and 20 extra terms push the tail below double precision.
fn truncation_order(kr: f64) -> u32 {
    kr.ceil() as u32 + 20
}

/// Far field `u∞(obs, inc)` of a single disk.
pub fn disk_far_field(disk: &DiskScatterer, k: f64, obs: Point, inc: Point) -> Result<Complex64> {
    let coeffs = mode_coefficients(disk, k, truncation_order(k * disk.radius))?;
    Ok(far_field_from_coeffs(&coeffs, k, disk.center, obs, inc))
}

/// Full far-field matrix on the N-direction grid,
/// `entry[m][l] = u∞(x̂_m, θ̂_l)`.
pub fn disk_far_field_matrix(disk: &DiskScatterer, k: f64, n_dirs: usize) -> Result<FarFieldMatrix> {
    if n_dirs < 4 || n_dirs % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "direction count must be even and at least 4, got {n_dirs}"
        )));
    }
    let coeffs = mode_coefficients(disk, k, truncation_order(k * disk.radius))?;
    let dirs: Vec<Point> = (0..n_dirs).map(|j| direction(j, n_dirs)).collect();
    let entries = CMatrix::from_fn(n_dirs, n_dirs, |m, l| {
        far_field_from_coeffs(&coeffs, k, disk.center, dirs[m], dirs[l])
    });
    FarFieldMatrix::new(k, n_dirs, entries)
}

/// Evaluate `u∞` from precomputed mode coefficients (`a_{-n} = a_n`).
fn far_field_from_coeffs(
    coeffs: &[Complex64],
    k: f64,
    center: Point,
    obs: Point,
    inc: Point,
) -> Complex64 {
    let phi = obs.y.atan2(obs.x) - inc.y.atan2(inc.x);
    let mut sum = coeffs[0];
    for (n, a) in coeffs.iter().enumerate().skip(1) {
        sum += 2.0 * a * (n as f64 * phi).cos();
    }
    let translation = Complex64::new(0.0, k * (inc - obs).dot(center)).exp();
    Complex64::new(0.0, -4.0) * sum * translation
}

/// Per-mode reflection coefficients `a_0 .. a_nmax` of the centered disk.
fn mode_coefficients(disk: &DiskScatterer, k: f64, n_max: u32) -> Result<Vec<Complex64>> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    let x = k * disk.radius;
    if x > 100.0 {
        return Err(Error::InvalidArgument(format!(
            "k * radius = {x} exceeds the series truncation budget of 100"
        )));
    }
    let n = n_max as usize;
    let j = bessel_j_all(n_max + 1, x);
    let y = bessel_y_all(n_max + 1, x)?;
    let h = |m: usize| Complex64::new(j[m], y[m]);
    // derivatives from the three-term recurrence: f_n' = (f_{n-1} - f_{n+1})/2,
    // f_0' = -f_1
    let jp = |m: usize| {
        if m == 0 {
            -j[1]
        } else {
            0.5 * (j[m - 1] - j[m + 1])
        }
    };
    let hp = |m: usize| {
        if m == 0 {
            -h(1)
        } else {
            0.5 * (h(m - 1) - h(m + 1))
        }
    };

    let mut coeffs = Vec::with_capacity(n + 1);
    match disk.condition {
        DiskCondition::Dirichlet => {
            for m in 0..=n {
                let den = h(m);
                check_denominator(den)?;
                coeffs.push(-Complex64::from(j[m]) / den);
            }
        }
        // Neumann is the impedance condition with lambda = 0; a single code
        // path keeps the two bit-identical
        DiskCondition::Neumann | DiskCondition::Impedance(_) => {
            let lambda = match disk.condition {
                DiskCondition::Impedance(l) => l,
                _ => Complex64::ZERO,
            };
            for m in 0..=n {
                let den = k * hp(m) + lambda * h(m);
                check_denominator(den)?;
                coeffs.push(-(k * jp(m) + lambda * j[m]) / den);
            }
        }
        DiskCondition::Penetrable(q) => {
            if q == Complex64::ZERO {
                // no contrast, no scattered field
                coeffs.resize(n + 1, Complex64::ZERO);
                return Ok(coeffs);
            }
            // interior wavenumber on the principal branch (Im k1 >= 0 for
            // passive media)
            let k1 = k * (Complex64::ONE + q).sqrt();
            let x1 = k1 * disk.radius;
            let j1c = bessel_j_all_complex(n_max + 1, x1);
            let j1p = |m: usize| {
                if m == 0 {
                    -j1c[1]
                } else {
                    0.5 * (j1c[m - 1] - j1c[m + 1])
                }
            };
            for m in 0..=n {
                // continuity of u and du/dr across |x - c| = r
                let num = k * jp(m) * j1c[m] - k1 * j[m] * j1p(m);
                let den = k * hp(m) * j1c[m] - k1 * h(m) * j1p(m);
                check_denominator(den)?;
                coeffs.push(-num / den);
            }
        }
    }
    Ok(coeffs)
}

fn check_denominator(den: Complex64) -> Result<()> {
    if den.norm() < 1e-300 {
        return Err(Error::Numerical(
            "degenerate mode denominator in the disk series".into(),
        ));
    }
    Ok(())
}

/// `J_0(z) .. J_max_order(z)` for complex argument, by the same normalized
/// backward recurrence as the real case (`J_0 + 2 Σ J_{2m} = 1` holds for
/// complex arguments too). Only needed for the penetrable transmission
/// system, so it stays private to this module.
fn bessel_j_all_complex(max_order: u32, z: Complex64) -> Vec<Complex64> {
    let n = max_order as usize;
    if z.norm() < 1e-8 {
        // two-term ascending series; plenty below this magnitude
        let half = 0.5 * z;
        let u = half * half;
        let mut out = Vec::with_capacity(n + 1);
        let mut lead = Complex64::ONE;
        for m in 0..=n {
            if m > 0 {
                lead *= half / m as f64;
            }
            out.push(lead * (Complex64::ONE - u / (m as f64 + 1.0)));
        }
        return out;
    }
    let base = (n as f64).max(z.norm());
    let start = n.max(z.norm().ceil() as usize)
        + 18
        + (2.0 * base.sqrt()).ceil() as usize
        + (2.0 * z.im.abs()).ceil() as usize;
    let mut out = vec![Complex64::ZERO; n + 1];
    let mut fnext = Complex64::ZERO;
    let mut fcur = Complex64::new(1e-150, 0.0);
    let mut norm = Complex64::ZERO;
    for m in (0..=start).rev() {
        let fprev = (2.0 * (m as f64 + 1.0)) / z * fcur - fnext;
        fnext = fcur;
        fcur = fprev;
        if m <= n {
            out[m] = fcur;
        }
        if m > 0 && m % 2 == 0 {
            norm += 2.0 * fcur;
        }
        if fcur.norm() > 1e250 {
            let r = 1.0 / fcur.norm();
            fcur *= r;
            fnext *= r;
            norm *= r;
            for v in out.iter_mut() {
                *v *= r;
            }
        }
    }
    norm += fcur;
    // normalize magnitude first: dividing by a complex number whose
    // norm_sqr underflows would produce NaN
    let mag = norm.norm();
    let unit_conj = (norm / mag).conj();
    for v in out.iter_mut() {
        *v = *v / mag * unit_conj;
    }
    out
}
