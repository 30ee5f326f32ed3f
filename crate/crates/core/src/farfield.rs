//! The discrete far-field operator: an N×N matrix of scattering amplitudes
//! on the equiangular direction grid, together with the quadrature weight
//! that turns matrix algebra into the L²(S¹) operator calculus, the
//! calibrated random perturbation, and a strict line-oriented file format.

use crate::linalg::{hermitian_eigen, CMatrix};
use crate::{Error, Point, Result};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::f64::consts::PI;
use std::path::Path;

/// `j`-th direction of the equiangular grid, `(cos 2πj/N, sin 2πj/N)`.
pub fn direction(j: usize, n: usize) -> Point {
    Point::unit(2.0 * PI * j as f64 / n as f64)
}

/// Far-field data `entry[m][l] = u∞(x̂_m, θ̂_l)` (row = observation,
/// column = incidence) on the common direction grid, plus the wavenumber.
///
/// The quadrature weight `w = 2π/N` is carried by all operator-level
/// quantities so that the discrete identities keep the constants of the
/// continuous ones.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldMatrix {
    k: f64,
    n: usize,
    entries: CMatrix,
}

impl FarFieldMatrix {
    pub fn new(k: f64, n: usize, entries: CMatrix) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "wavenumber must be positive and finite, got {k}"
            )));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "direction count must be even and at least 4, got {n}"
            )));
        }
        if entries.rows() != n || entries.cols() != n {
            return Err(Error::InvalidArgument(format!(
                "entry matrix is {}x{}, expected {n}x{n}",
                entries.rows(),
                entries.cols()
            )));
        }
        if !entries.is_finite() {
            return Err(Error::InvalidArgument(
                "far-field entries must be finite".into(),
            ));
        }
        Ok(FarFieldMatrix { k, n, entries })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Quadrature weight `w = 2π/N`.
    pub fn weight(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, m: usize, l: usize) -> Complex64 {
        self.entries[(m, l)]
    }

    /// Discrete far-field operator: `(Fg)[m] = w Σ_l entry[m][l] g[l]`.
    pub fn apply(&self, g: &[Complex64]) -> Result<Vec<Complex64>> {
        if g.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "operand length {} does not match direction count {}",
                g.len(),
                self.n
            )));
        }
        let w = self.weight();
        Ok(self
            .entries
            .matvec(g)
            .into_iter()
            .map(|z| z * w)
            .collect())
    }

    /// Relative residual of the reciprocity permutation identity
    /// `A[m][l] = A[(l+N/2) mod N][(m+N/2) mod N]`.
    pub fn reciprocity_residual(&self) -> f64 {
        let n = self.n;
        let half = n / 2;
        let mut num = 0.0f64;
        for m in 0..n {
            for l in 0..n {
                let swapped = self.entries[((l + half) % n, (m + half) % n)];
                num += (self.entries[(m, l)] - swapped).norm_sqr();
            }
        }
        num.sqrt() / self.entries.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    /// Relative residual of `A - A* = (i/(2N)) A* A`, the discrete form of
    /// the far-field operator identity when the energy-conserving part is
    /// exact (Dirichlet/Neumann scatterers).
    pub fn unitarity_residual(&self) -> f64 {
        let a = &self.entries;
        let astar = a.adjoint();
        let gram = astar.matmul(a);
        let coeff = Complex64::new(0.0, 1.0 / (2.0 * self.n as f64));
        let residual = a.sub(&astar).sub(&gram.scale(coeff));
        residual.frobenius_norm() / a.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    /// Smallest eigenvalue of the Hermitian form
    /// `(1/2i) [ (A - A*) - (i/(2N)) A* A ]`, which discretizes the
    /// absorption operator; nonnegative (up to rounding and discretization)
    /// for passive scatterers.
    pub fn r_form_min_eigenvalue(&self) -> Result<f64> {
        let a = &self.entries;
        let astar = a.adjoint();
        let gram = astar.matmul(a);
        // (A - A*)/(2i) - A*A/(4N)
        let h = a
            .sub(&astar)
            .scale(Complex64::new(0.0, -0.5))
            .sub(&gram.scale(Complex64::new(0.25 / self.n as f64, 0.0)));
        let (eig, _) = hermitian_eigen(&h)?;
        Ok(eig.last().copied().unwrap_or(0.0))
    }

    /// Spectral norm of the entry matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.entries.spectral_norm()
    }

    /// Additive Gaussian perturbation with exactly calibrated relative
    /// spectral-norm error: `F^δ = F + δ ‖F‖ (R₁ + i R₂)/‖R₁ + i R₂‖`.
    ///
    /// `R₁`, `R₂` have independent standard normal entries drawn from a
    /// ChaCha12 stream (ziggurat normal variates), so a fixed seed gives a
    /// reproducible matrix.
    pub fn perturb(&self, noise: &NoiseSpec) -> Result<FarFieldMatrix> {
        if !(noise.delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise level must be nonnegative, got {}",
                noise.delta
            )));
        }
        if noise.delta == 0.0 {
            return Ok(self.clone());
        }
        let mut rng = ChaCha12Rng::seed_from_u64(noise.seed);
        let n = self.n;
        let mut e = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let re: f64 = rng.sample(rand_distr::StandardNormal);
                let im: f64 = rng.sample(rand_distr::StandardNormal);
                e[(i, j)] = Complex64::new(re, im);
            }
        }
        let scale = noise.delta * self.entries.spectral_norm() / e.spectral_norm();
        let mut out = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += scale * e[(i, j)];
            }
        }
        FarFieldMatrix::new(self.k, n, out)
    }

    /// Measured relative spectral-norm distance `‖other - self‖ / ‖self‖`.
    pub fn relative_error(&self, other: &FarFieldMatrix) -> f64 {
        other.entries.sub(&self.entries).spectral_norm()
            / self.entries.spectral_norm().max(f64::MIN_POSITIVE)
    }

    /// Serialize to the line-oriented text format (17 significant digits,
    /// row-major with the observation index outermost).
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut buf = String::with_capacity(32 + 52 * self.n * self.n);
        buf.push_str("FARFIELD 1\n");
        buf.push_str(&format!("k {:.17e}\n", self.k));
        buf.push_str(&format!("n {}\n", self.n));
        buf.push_str("norm spectral\n");
        for m in 0..self.n {
            for l in 0..self.n {
                let z = self.entries[(m, l)];
                buf.push_str(&format!("{:.17e} {:.17e}\n", z.re, z.im));
            }
        }
        std::fs::write(path, buf)?;
        Ok(())
    }

    /// Strict parser for the format emitted by [`FarFieldMatrix::write`];
    /// any deviation from the grammar is an error.
    pub fn read(path: &Path) -> Result<FarFieldMatrix> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<FarFieldMatrix> {
        let mut lines = text.lines();
        let mut line_no = 0usize;
        let mut next = |what: &str| -> Result<&str> {
            line_no += 1;
            lines
                .next()
                .ok_or_else(|| Error::FileFormat(format!("missing {what} (line {line_no})")))
        };
        let magic = next("header")?;
        if magic != "FARFIELD 1" {
            return Err(Error::FileFormat(format!(
                "bad header line '{magic}', expected 'FARFIELD 1'"
            )));
        }
        let k_line = next("wavenumber line")?;
        let k = k_line
            .strip_prefix("k ")
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| Error::FileFormat(format!("bad wavenumber line '{k_line}'")))?;
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::FileFormat(format!(
                "wavenumber must be positive, got {k}"
            )));
        }
        let n_line = next("direction count line")?;
        let n = n_line
            .strip_prefix("n ")
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::FileFormat(format!("bad direction count line '{n_line}'")))?;
        if n % 2 != 0 {
            return Err(Error::FileFormat(format!(
                "direction count must be even, got {n} (parity error)"
            )));
        }
        if n < 4 {
            return Err(Error::FileFormat(format!(
                "direction count must be at least 4, got {n}"
            )));
        }
        let norm_line = next("norm line")?;
        if norm_line != "norm spectral" {
            return Err(Error::FileFormat(format!(
                "bad norm line '{norm_line}', expected 'norm spectral'"
            )));
        }
        let mut entries = CMatrix::zeros(n, n);
        for m in 0..n {
            for l in 0..n {
                let line = lines.next().ok_or_else(|| {
                    Error::FileFormat(format!(
                        "truncated entry block: expected {} values, found {}",
                        n * n,
                        m * n + l
                    ))
                })?;
                let mut parts = line.split(' ');
                let re = parts
                    .next()
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::FileFormat(format!("bad entry line '{line}'")))?;
                let im = parts
                    .next()
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::FileFormat(format!("bad entry line '{line}'")))?;
                if parts.next().is_some() {
                    return Err(Error::FileFormat(format!(
                        "trailing tokens on entry line '{line}'"
                    )));
                }
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::FileFormat(format!(
                        "non-finite entry '{line}'"
                    )));
                }
                entries[(m, l)] = Complex64::new(re, im);
            }
        }
        if let Some(extra) = lines.next() {
            return Err(Error::FileFormat(format!(
                "unexpected content after entries: '{extra}'"
            )));
        }
        FarFieldMatrix::new(k, n, entries)
    }
}

/// Relative noise level and RNG seed for [`FarFieldMatrix::perturb`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
}

/// The Herglotz test function `φ_z` sampled on the direction grid:
/// `values[j] = e^{-i k θ̂_j · z}`.
#[derive(Debug, Clone)]
pub struct TestVector {
    pub values: Vec<Complex64>,
    pub z: Point,
    pub k: f64,
    pub n: usize,
}

impl TestVector {
    /// Weighted squared norm `w Σ |values[j]|²`; equals 2π by construction.
    pub fn norm_sqr_weighted(&self) -> f64 {
        let w = 2.0 * PI / self.n as f64;
        w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

/// Sample `φ_z` on the N-direction grid.
pub fn make_test_vector(z: Point, k: f64, n: usize) -> Result<TestVector> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "direction count must be even and at least 4, got {n}"
        )));
    }
    let values = (0..n)
        .map(|j| {
            let th = direction(j, n);
            Complex64::new(0.0, -k * th.dot(z)).exp()
        })
        .collect();
    Ok(TestVector { values, z, k, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn toy_matrix(n: usize) -> FarFieldMatrix {
        let entries = CMatrix::from_fn(n, n, |m, l| {
            Complex64::new(
                ((m * 3 + l) as f64 * 0.17).sin(),
                ((m + 5 * l) as f64 * 0.29).cos(),
            )
        });
        FarFieldMatrix::new(2.5, n, entries).unwrap()
    }

    #[test]
    fn test_vector_at_origin_is_ones() {
        let tv = make_test_vector(Point::new(0.0, 0.0), 5.0, 8).unwrap();
        for v in &tv.values {
            assert_eq!(*v, Complex64::ONE);
        }
    }

    #[test]
    fn test_vector_weighted_norm_is_two_pi() {
        for &n in &[8usize, 64, 360] {
            let tv = make_test_vector(Point::new(1.3, -0.4), 5.0, n).unwrap();
            assert!((tv.norm_sqr_weighted() - 2.0 * PI).abs() < 1e-13);
            for v in &tv.values {
                assert!((v.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn test_vector_entries_depend_only_on_projection() {
        // displacing z orthogonally to a direction leaves that entry alone
        let n = 4; // directions (1,0), (0,1), (-1,0), (0,-1)
        let k = 5.0;
        let z = Point::new(0.7, -0.3);
        let a = make_test_vector(z, k, n).unwrap();
        let b = make_test_vector(z + Point::new(0.0, 1.9), k, n).unwrap();
        assert_eq!(a.values[0], b.values[0]); // (1, 0) is exact on the grid
        assert!((a.values[2] - b.values[2]).norm() < 1e-14);
        assert_ne!(a.values[1], b.values[1]);
    }

    #[test]
    fn apply_zero_and_identity() {
        let n = 8;
        let zero = FarFieldMatrix::new(1.0, n, CMatrix::zeros(n, n)).unwrap();
        let g = vec![Complex64::ONE; n];
        assert!(zero.apply(&g).unwrap().iter().all(|z| *z == Complex64::ZERO));

        let ident = FarFieldMatrix::new(1.0, n, CMatrix::identity(n)).unwrap();
        let out = ident.apply(&g).unwrap();
        let w = 2.0 * PI / n as f64;
        for z in out {
            assert!((z - w).norm() < 1e-15);
        }

        assert!(ident.apply(&vec![Complex64::ONE; n + 1]).is_err());
    }

    #[test]
    fn perturb_zero_delta_is_identity() {
        let f = toy_matrix(16);
        let g = f
            .perturb(&NoiseSpec {
                delta: 0.0,
                seed: 42,
            })
            .unwrap();
        assert_eq!(f.entries(), g.entries());
    }

    #[test]
    fn perturb_hits_requested_relative_error() {
        let f = toy_matrix(32);
        for &delta in &[0.1, 0.3, 0.9] {
            let g = f.perturb(&NoiseSpec { delta, seed: 7 }).unwrap();
            let measured = f.relative_error(&g);
            assert!(
                (measured - delta).abs() < 1e-12,
                "delta {delta}: measured {measured}"
            );
        }
    }

    #[test]
    fn perturb_is_deterministic_per_seed() {
        let f = toy_matrix(16);
        let spec = NoiseSpec {
            delta: 0.3,
            seed: 123,
        };
        let a = f.perturb(&spec).unwrap();
        let b = f.perturb(&spec).unwrap();
        assert_eq!(a.entries(), b.entries());
        let c = f
            .perturb(&NoiseSpec {
                delta: 0.3,
                seed: 124,
            })
            .unwrap();
        assert_ne!(a.entries(), c.entries());
    }

    #[test]
    fn file_round_trip_is_exact() {
        let f = toy_matrix(4);
        let dir = tempdir().unwrap();
        let path = dir.path().join("ff.txt");
        f.write(&path).unwrap();
        let g = FarFieldMatrix::read(&path).unwrap();
        assert_eq!(f.k(), g.k());
        assert_eq!(f.n(), g.n());
        assert_eq!(f.entries(), g.entries());
    }

    #[test]
    fn reader_rejects_malformed_files() {
        let good = {
            let f = toy_matrix(4);
            let dir = tempdir().unwrap();
            let path = dir.path().join("ff.txt");
            f.write(&path).unwrap();
            std::fs::read_to_string(&path).unwrap()
        };

        // odd direction count
        let odd = good.replace("n 4", "n 5");
        match FarFieldMatrix::parse(&odd) {
            Err(Error::FileFormat(msg)) => assert!(msg.contains("parity")),
            other => panic!("expected parity error, got {other:?}"),
        }
        // nonpositive wavenumber
        let bad_k = good.replace("k 2.5", "k -2.5");
        assert!(FarFieldMatrix::parse(&bad_k).is_err());
        // bad magic
        assert!(FarFieldMatrix::parse(&good.replace("FARFIELD 1", "FARFIELD 2")).is_err());
        // truncated entries
        let truncated: String = good.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(FarFieldMatrix::parse(&truncated).is_err());
        // trailing garbage
        let extra = format!("{good}0.0 0.0\n");
        assert!(FarFieldMatrix::parse(&extra).is_err());
        // non-finite entry
        let nan = {
            let mut lines: Vec<String> = good.lines().map(|s| s.to_string()).collect();
            lines[4] = "NaN 0.0".to_string();
            lines.join("\n") + "\n"
        };
        assert!(FarFieldMatrix::parse(&nan).is_err());
    }

    #[test]
    fn residuals_flag_synthetic_violations() {
        // a matrix obeying A - A* = (i/(2N)) A*A exactly: build from a
        // unitary diagonalization with eigenvalues on the circle
        // lambda = (i/c)(1 - e^{2i alpha}), c = 1/(2N)
        let n = 8;
        let c = 1.0 / (2.0 * n as f64);
        let mut a = CMatrix::zeros(n, n);
        for j in 0..n {
            let alpha = 0.3 + 0.2 * j as f64;
            let lam = Complex64::new(0.0, 1.0 / c) * (Complex64::ONE
                - Complex64::new(0.0, 2.0 * alpha).exp());
            a[(j, j)] = lam;
        }
        let f = FarFieldMatrix::new(1.0, n, a).unwrap();
        assert!(f.unitarity_residual() < 1e-13);
        assert!(f.r_form_min_eigenvalue().unwrap() > -1e-10);

        let mut broken = f.entries().clone();
        broken[(0, 1)] += Complex64::new(0.5, 0.0);
        let g = FarFieldMatrix::new(1.0, n, broken).unwrap();
        assert!(g.unitarity_residual() > 1e-3);
    }
}
