//! Sampling indicators computed directly from far-field data: the
//! quadratic-form indicator `|⟨Fφ_z, φ_z⟩|`, its imaginary part (reverse
//! time migration), the orthogonality-sampling superposition, and a
//! Picard-series factorization indicator, plus grid sweeps and the
//! inequality chain connecting the first three.
//!
//! Conventions: for the entry matrix `A[m][l] = u∞(x̂_m, θ̂_l)` and
//! `φ_z[j] = e^{-ik θ̂_j·z}`, the quadratic form is
//! `⟨Fφ_z, φ_z⟩ = w² φ_z^H A φ_z`, so `e^{-ikθ̂·z}` weights incidence and
//! `e^{+ikx̂·z}` weights observation. The weight `w = 2π/N` keeps the
//! constants of the continuous identities: with
//! `c = 1/(8π)` and `C = √(2π)` (two dimensions),
//!
//! `c · I²_OSM(z) ≤ I_RTM(z) ≤ I_new(z) ≤ C · sqrt(I²_OSM(z))`.

use crate::farfield::{make_test_vector, FarFieldMatrix, TestVector};
use crate::linalg::{partial_svd, PartialSvd};
use crate::{Error, Point, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Square sampling grid `center + [-c, c]²` with `points` samples per side.
///
/// Grid nodes are `z_{pq} = center + (-c + 2cp/(points-1), -c + 2cq/(points-1))`
/// in row-major order (`p` outer), so index 0 is the bottom-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    pub extent: f64,
    pub points: usize,
    pub center: Point,
}

impl SamplingGrid {
    pub fn new(extent: f64, points: usize, center: Point) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid extent must be positive, got {extent}"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points per side, got {points}"
            )));
        }
        Ok(SamplingGrid {
            extent,
            points,
            center,
        })
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node at row-major index `i = p * points + q`.
    pub fn point(&self, i: usize) -> Point {
        let m = self.points;
        let (p, q) = (i / m, i % m);
        let step = 2.0 * self.extent / (m - 1) as f64;
        self.center
            + Point::new(
                -self.extent + step * p as f64,
                -self.extent + step * q as f64,
            )
    }
}

/// Which indicator a map holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    New,
    Osm,
    Rtm,
    Fm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::New => "new",
            Method::Osm => "osm",
            Method::Rtm => "rtm",
            Method::Fm => "fm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "new" => Ok(Method::New),
            "osm" => Ok(Method::Osm),
            "rtm" => Ok(Method::Rtm),
            "fm" => Ok(Method::Fm),
            other => Err(Error::InvalidArgument(format!(
                "unknown indicator method '{other}' (expected new|osm|rtm|fm)"
            ))),
        }
    }
}

/// Indicator values over a sampling grid, with the run metadata.
/// RTM values are stored signed; the other methods are nonnegative.
#[derive(Debug, Clone)]
pub struct IndicatorMap {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
    pub method: Method,
    pub rho: f64,
    pub k: f64,
    pub n: usize,
    pub delta: f64,
}

impl IndicatorMap {
    pub fn value_at(&self, p: usize, q: usize) -> f64 {
        self.values[p * self.grid.points + q]
    }

    /// Row-major index, location and value of the maximum; ties break to
    /// the lowest index.
    pub fn argmax(&self) -> (usize, Point, f64) {
        let mut best = (0usize, self.values[0]);
        for (i, &v) in self.values.iter().enumerate().skip(1) {
            if v > best.1 {
                best = (i, v);
            }
        }
        (best.0, self.grid.point(best.0), best.1)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `w² φ_z^H A φ_z`, the weighted quadratic form behind `I_new` and RTM.
fn quadratic_form(f: &FarFieldMatrix, phi: &TestVector) -> Complex64 {
    let w = f.weight();
    let aphi = f.entries().matvec(&phi.values);
    let mut q = Complex64::ZERO;
    for (p, a) in phi.values.iter().zip(&aphi) {
        q += p.conj() * a;
    }
    q * (w * w)
}

/// The quadratic-form indicator `|⟨Fφ_z, φ_z⟩|`.
pub fn i_new(f: &FarFieldMatrix, z: Point) -> f64 {
    let phi = make_test_vector(z, f.k(), f.n()).expect("matrix dimensions are valid");
    quadratic_form(f, &phi).norm()
}

/// Reverse-time-migration indicator `Im ⟨Fφ_z, φ_z⟩` (signed).
pub fn i_rtm(f: &FarFieldMatrix, z: Point) -> f64 {
    let phi = make_test_vector(z, f.k(), f.n()).expect("matrix dimensions are valid");
    quadratic_form(f, &phi).im
}

/// Orthogonality sampling: `w Σ_l |w Σ_m A[m][l] e^{+ik x̂_m·z}|^ρ`, the
/// incidence superposition of the single-wave indicator with its inner
/// exponent `ρ >= 1`.
pub fn i_osm(f: &FarFieldMatrix, z: Point, rho: f64) -> Result<f64> {
    if !(rho >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "orthogonality sampling requires rho >= 1, got {rho}"
        )));
    }
    let phi = make_test_vector(z, f.k(), f.n())?;
    Ok(osm_from_phi(f, &phi, rho))
}

fn osm_from_phi(f: &FarFieldMatrix, phi: &TestVector, rho: f64) -> f64 {
    let w = f.weight();
    // (A^H φ)[l] conjugated equals Σ_m A[m][l] conj(φ[m]); only the modulus
    // enters
    let inner = f.entries().adjoint_matvec(&phi.values);
    let sum: f64 = inner.iter().map(|v| (w * v.norm()).powf(rho)).sum();
    w * sum
}

/// Picard-series factorization indicator. The singular system is of the
/// weighted matrix `wA`; modes below `eps * sigma_1` are discarded.
pub fn i_fm(f: &FarFieldMatrix, z: Point, eps: f64) -> Result<f64> {
    let basis = FmBasis::new(f, eps)?;
    let phi = make_test_vector(z, f.k(), f.n())?;
    Ok(basis.eval(&phi))
}

/// Precomputed singular basis for factorization-method sweeps.
pub struct FmBasis {
    svd: PartialSvd,
    w: f64,
}

impl FmBasis {
    pub fn new(f: &FarFieldMatrix, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "factorization cutoff must lie in (0, 1), got {eps}"
            )));
        }
        let svd = partial_svd(f.entries(), eps)?;
        Ok(FmBasis {
            svd,
            w: f.weight(),
        })
    }

    /// `[ Σ_j |⟨φ_z, u_j⟩_w|² / σ_j ]^{-1}` over the retained modes, with
    /// `⟨φ, u⟩_w = w u^H φ` and `σ_j` of `wA`.
    pub fn eval(&self, phi: &TestVector) -> f64 {
        let u = &self.svd.left;
        let mut sum = 0.0f64;
        for j in 0..u.cols() {
            let mut inner = Complex64::ZERO;
            for r in 0..u.rows() {
                inner += u[(r, j)].conj() * phi.values[r];
            }
            let coeff = (self.w * inner.norm()).powi(2);
            sum += coeff / (self.w * self.svd.singular_values[j]);
        }
        1.0 / sum.max(1e-300)
    }
}

/// Relative singular-value cutoff used by factorization-method sweeps.
pub const FM_DEFAULT_CUTOFF: f64 = 1e-4;

/// Evaluate one indicator over a grid. The display power `ρ` is applied
/// pointwise to New/RTM/FM (RTM keeps its sign: `sign · |v|^ρ`); for OSM,
/// `ρ` is the method's own inner exponent and no outer power is applied.
pub fn sweep(
    f: &FarFieldMatrix,
    grid: &SamplingGrid,
    method: Method,
    rho: f64,
    delta: f64,
) -> Result<IndicatorMap> {
    if !(rho >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "indicator power must satisfy rho >= 1, got {rho}"
        )));
    }
    let fm_basis = match method {
        Method::Fm => Some(FmBasis::new(f, FM_DEFAULT_CUTOFF)?),
        _ => None,
    };
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let z = grid.point(i);
            let phi = make_test_vector(z, f.k(), f.n()).expect("valid dimensions");
            match method {
                Method::New => quadratic_form(f, &phi).norm().powf(rho),
                Method::Rtm => {
                    let v = quadratic_form(f, &phi).im;
                    v.signum() * v.abs().powf(rho)
                }
                Method::Osm => osm_from_phi(f, &phi, rho),
                Method::Fm => fm_basis
                    .as_ref()
                    .expect("basis prepared above")
                    .eval(&phi)
                    .powf(rho),
            }
        })
        .collect();
    Ok(IndicatorMap {
        grid: *grid,
        values,
        method,
        rho,
        k: f.k(),
        n: f.n(),
        delta,
    })
}

/// Worst-case margins of the indicator inequality chain over a grid.
///
/// `lower`: `min_z I_RTM - (1/8π) I²_OSM`, `middle`: `min_z I_new - I_RTM`,
/// `upper`: `min_z √(2π)·sqrt(I²_OSM) - I_new`. All three are nonnegative
/// (up to rounding and data error) when the data comes from a passive
/// scatterer; `scale` (the grid maximum of `I_new`) sizes the tolerance.
#[derive(Debug, Clone, Copy)]
pub struct ChainReport {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub scale: f64,
}

impl ChainReport {
    pub fn min_margin(&self) -> f64 {
        self.lower.min(self.middle).min(self.upper)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.min_margin() >= -tol * self.scale.max(f64::MIN_POSITIVE)
    }
}

pub fn chain_report(f: &FarFieldMatrix, grid: &SamplingGrid) -> ChainReport {
    let c_lower = 1.0 / (8.0 * PI);
    let c_upper = (2.0 * PI).sqrt();
    let per_point: Vec<(f64, f64, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let z = grid.point(i);
            let phi = make_test_vector(z, f.k(), f.n()).expect("valid dimensions");
            let q = quadratic_form(f, &phi);
            let new = q.norm();
            let rtm = q.im;
            let osm2 = osm_from_phi(f, &phi, 2.0);
            (
                rtm - c_lower * osm2,
                new - rtm,
                c_upper * osm2.sqrt() - new,
                new,
            )
        })
        .collect();
    let mut report = ChainReport {
        lower: f64::INFINITY,
        middle: f64::INFINITY,
        upper: f64::INFINITY,
        scale: 0.0,
    };
    for (l, m, u, new) in per_point {
        report.lower = report.lower.min(l);
        report.middle = report.middle.min(m);
        report.upper = report.upper.min(u);
        report.scale = report.scale.max(new);
    }
    report
}

/// Discrete stability bound: `|I_new(F, z) - I_new(F^δ, z)| <= w² N ‖ΔA‖₂`
/// for every `z` (Cauchy–Schwarz with `‖φ_z‖² = N`).
#[derive(Debug, Clone, Copy)]
pub struct StabilityCheck {
    /// worst observed deviation over the grid
    pub max_difference: f64,
    /// the a-priori bound
    pub bound: f64,
}

impl StabilityCheck {
    pub fn holds(&self) -> bool {
        // zero-slack inequality modulo rounding
        self.max_difference <= self.bound * (1.0 + 1e-12) + 1e-300
    }
}

pub fn stability_check(
    f: &FarFieldMatrix,
    f_noisy: &FarFieldMatrix,
    grid: &SamplingGrid,
) -> Result<StabilityCheck> {
    if f.n() != f_noisy.n() {
        return Err(Error::InvalidArgument(
            "matrices must share the direction grid".into(),
        ));
    }
    let delta_norm = f_noisy.entries().sub(f.entries()).spectral_norm();
    let w = f.weight();
    let bound = w * w * f.n() as f64 * delta_norm;
    let max_difference = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let z = grid.point(i);
            (i_new(f, z) - i_new(f_noisy, z)).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(StabilityCheck {
        max_difference,
        bound,
    })
}
