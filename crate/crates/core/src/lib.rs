//! Two-dimensional acoustic scattering toolkit: forward solvers that
//! synthesize far-field data for sound-soft, sound-hard, impedance and
//! penetrable obstacles, a calibrated noise model, and direct sampling
//! indicators that image the scatterer from the (possibly noisy) data.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`] — Bessel, Neumann and Hankel functions of integer order.
//! * [`geometry`] — parameterized boundary curves with analytic derivatives.
//! * [`analytic_disk`] — separation-of-variables far fields for disks; the
//!   machine-precision reference the integral-equation solver is held to.
//! * [`bie`] — Nyström boundary-integral solver for general smooth curves.
//! * [`farfield`] — the far-field matrix, its discrete operator semantics,
//!   the noise model and the on-disk file format.
//! * [`indicators`] — the sampling indicators and grid sweeps.
//!
//! Everything is deterministic: noise is drawn from a seeded generator and
//! grid sweeps are pure per-point evaluations.

pub mod analytic_disk;
pub mod bie;
pub mod farfield;
pub mod geometry;
pub mod indicators;
pub mod linalg;
pub mod specfun;

use num_complex::Complex64;

/// Errors reported by the solvers and data types of this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A solver or matrix factorization broke down.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A far-field file did not match the expected grammar.
    #[error("malformed far-field file: {0}")]
    FileFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Unit vector at angle `phi` from the positive x-axis.
    pub fn unit(phi: f64) -> Self {
        Point::new(phi.cos(), phi.sin())
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl core::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl core::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl core::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// `e^{i k d · p}` — plane-wave phase factor used throughout.
pub fn plane_wave(k: f64, direction: Point, p: Point) -> Complex64 {
    Complex64::new(0.0, k * direction.dot(p)).exp()
}
