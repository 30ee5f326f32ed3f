//! Nyström boundary-integral forward solver for exterior Helmholtz
//! scattering from one or more smooth, disjoint curves under Dirichlet,
//! Neumann or impedance conditions.
//!
//! The scattered field is sought as a combined layer ansatz on every
//! component, `u^s = Σ_c (D_c - iη S_c) φ_c` with coupling `η = k`, which
//! stays uniquely solvable at every wavenumber. Imposing the boundary
//! condition of each component yields a block system whose diagonal blocks
//! are discretized with spectrally accurate product quadrature for the
//! logarithmic kernel splits; the hypersingular part appearing under
//! Neumann/impedance conditions is reduced by the Maue identity
//! `T = (d/ds) S (d/ds) + k² ν·S ν` to compositions of the single-layer
//! matrix with the spectral differentiation matrix. Cross-component blocks
//! have smooth kernels and use the plain trapezoid rule.
//!
//! Far fields follow the normalization fixed in [`crate::analytic_disk`],
//! under which the single-layer far-field kernel is exactly
//! `e^{-ik x̂·y}` and the double-layer one `-ik x̂·ν(y) e^{-ik x̂·y}`.

use crate::farfield::{direction, FarFieldMatrix};
use crate::geometry::{BoundaryCurve, BoundaryPoint};
use crate::linalg::{CMatrix, LuFactors};
use crate::specfun::jy01;
use crate::{Error, Point, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.5772156649015328606;

/// Boundary condition of one scatterer component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    /// `∂u/∂ν + λ u = 0` with `Im λ >= 0`.
    Impedance(Complex64),
}

impl BoundaryCondition {
    fn as_impedance(self) -> Option<Complex64> {
        match self {
            BoundaryCondition::Dirichlet => None,
            BoundaryCondition::Neumann => Some(Complex64::ZERO),
            BoundaryCondition::Impedance(lambda) => Some(lambda),
        }
    }
}

/// One boundary component with its condition.
#[derive(Debug, Clone, Copy)]
pub struct Component {
    pub curve: BoundaryCurve,
    pub condition: BoundaryCondition,
}

/// A full scattering configuration: disjoint components and a wavenumber.
#[derive(Debug, Clone)]
pub struct ScattererConfig {
    pub components: Vec<Component>,
    pub k: f64,
}

impl ScattererConfig {
    pub fn new(components: Vec<Component>, k: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one scatterer component is required".into(),
            ));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "wavenumber must be positive, got {k}"
            )));
        }
        for c in &components {
            if let BoundaryCondition::Impedance(lambda) = c.condition {
                if lambda.im < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "impedance must satisfy Im(lambda) >= 0, got {lambda}"
                    )));
                }
            }
        }
        Ok(ScattererConfig { components, k })
    }
}

/// Discretization controls.
#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    /// Nyström nodes per component (even, >= 32); `None` picks
    /// `max(128, 16 ceil(k diam))` per component.
    pub nodes_per_component: Option<usize>,
    /// Accuracy the caller expects of the far field; the solve aborts if
    /// the condition estimate says it cannot be met.
    pub target_tolerance: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            nodes_per_component: None,
            target_tolerance: 1e-8,
        }
    }
}

impl SolverSettings {
    pub fn with_nodes(nodes: usize) -> Result<Self> {
        if nodes < 32 || nodes % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "node count must be even and at least 32, got {nodes}"
            )));
        }
        Ok(SolverSettings {
            nodes_per_component: Some(nodes),
            target_tolerance: 1e-8,
        })
    }

    fn nodes_for(&self, curve: &BoundaryCurve, k: f64) -> usize {
        match self.nodes_per_component {
            Some(n) => n,
            None => {
                let per_diam = 16 * (k * curve.diameter()).ceil() as usize;
                per_diam.max(128)
            }
        }
    }
}

struct DiscretizedComponent {
    nodes: Vec<BoundaryPoint>,
    /// half node count: nodes.len() == 2m
    m: usize,
    condition: BoundaryCondition,
}

struct Discretization {
    comps: Vec<DiscretizedComponent>,
    offsets: Vec<usize>,
    total: usize,
    k: f64,
    eta: f64,
}

/// A factorized boundary operator; one factorization serves every
/// incident direction.
pub struct BieSolver {
    disc: Discretization,
    lu: LuFactors,
}

impl BieSolver {
    /// Discretize, assemble and factor the boundary operator.
    pub fn new(cfg: &ScattererConfig, settings: &SolverSettings) -> Result<Self> {
        let disc = discretize(cfg, settings)?;
        let a = assemble_operator(&disc);
        let lu = LuFactors::new(&a).map_err(|e| {
            Error::Numerical(format!(
                "boundary operator factorization failed for {} component(s) at k = {}: {e}",
                cfg.components.len(),
                cfg.k
            ))
        })?;
        let attainable = lu.pivot_ratio * 1e-16;
        if attainable > settings.target_tolerance {
            return Err(Error::Numerical(format!(
                "condition estimate {:.2e} cannot reach target tolerance {:.2e} \
                 for {} component(s) at k = {}",
                lu.pivot_ratio,
                settings.target_tolerance,
                cfg.components.len(),
                cfg.k
            )));
        }
        Ok(BieSolver { disc, lu })
    }

    /// Solve for the layer density generated by the plane wave `e^{ik x·θ̂}`.
    fn solve_incidence(&self, inc: Point) -> Vec<Complex64> {
        let d = &self.disc;
        let mut rhs = vec![Complex64::ZERO; d.total];
        for (c, comp) in d.comps.iter().enumerate() {
            let off = d.offsets[c];
            for (j, node) in comp.nodes.iter().enumerate() {
                let ui = Complex64::new(0.0, d.k * inc.dot(node.position)).exp();
                rhs[off + j] = match comp.condition.as_impedance() {
                    // Dirichlet: u^s = -u^i on the boundary
                    None => -ui,
                    // impedance: du^s/dν + λ u^s = -(du^i/dν + λ u^i)
                    Some(lambda) => {
                        -(Complex64::new(0.0, d.k * inc.dot(node.normal)) + lambda) * ui
                    }
                };
            }
        }
        self.lu.solve(&rhs)
    }

    /// Far field of the ansatz for a solved density.
    fn far_field_of_density(&self, obs: Point, density: &[Complex64]) -> Complex64 {
        let d = &self.disc;
        let mut sum = Complex64::ZERO;
        for (c, comp) in d.comps.iter().enumerate() {
            let off = d.offsets[c];
            let h = PI / comp.m as f64;
            for (j, node) in comp.nodes.iter().enumerate() {
                let kernel = Complex64::new(0.0, -d.k * obs.dot(node.position)).exp()
                    * Complex64::new(0.0, -d.k * obs.dot(node.normal) - d.eta);
                sum += kernel * density[off + j] * (node.jacobian * h);
            }
        }
        sum
    }
}

/// Assemble the full far-field matrix `entry[m][l] = u∞(x̂_m, θ̂_l)` on the
/// equiangular N-direction grid.
pub fn assemble_far_field_matrix(
    cfg: &ScattererConfig,
    settings: &SolverSettings,
    n_dirs: usize,
) -> Result<FarFieldMatrix> {
    if n_dirs < 4 || n_dirs % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "direction count must be even and at least 4, got {n_dirs}"
        )));
    }
    let solver = BieSolver::new(cfg, settings)?;
    let densities: Vec<Vec<Complex64>> = (0..n_dirs)
        .into_par_iter()
        .map(|l| solver.solve_incidence(direction(l, n_dirs)))
        .collect();
    let mut entries = CMatrix::zeros(n_dirs, n_dirs);
    for m in 0..n_dirs {
        let obs = direction(m, n_dirs);
        for (l, density) in densities.iter().enumerate() {
            entries[(m, l)] = solver.far_field_of_density(obs, density);
        }
    }
    FarFieldMatrix::new(cfg.k, n_dirs, entries)
}

/// Scattered field at exterior evaluation points for one incident
/// direction. Points inside a component or closer to a boundary than one
/// panel of the (upsampled) evaluation grid are rejected.
pub fn scattered_field_at(
    cfg: &ScattererConfig,
    settings: &SolverSettings,
    inc: Point,
    points: &[Point],
) -> Result<Vec<Complex64>> {
    let solver = BieSolver::new(cfg, settings)?;
    let density = solver.solve_incidence(inc);
    let d = &solver.disc;

    let mut min_dist = f64::INFINITY;
    for comp in &cfg.components {
        for &p in points {
            if comp.curve.contains(p) {
                return Err(Error::InvalidArgument(format!(
                    "evaluation point ({}, {}) lies inside a scatterer component",
                    p.x, p.y
                )));
            }
            min_dist = min_dist.min(comp.curve.distance_to_boundary(p, 512));
        }
    }

    let mut out = vec![Complex64::ZERO; points.len()];
    for (c, comp) in d.comps.iter().enumerate() {
        let off = d.offsets[c];
        let m = comp.m;
        let arc: f64 = comp.nodes.iter().map(|n| n.jacobian * PI / m as f64).sum();
        // refine the evaluation grid until its panels resolve the closest
        // point, then interpolate the density onto it
        let target = ((8.0 * arc / min_dist).ceil() as usize).clamp(2 * m, 32768);
        let m_eval = target.div_ceil(2);
        let curve = cfg.components[c].curve;
        let eval_panel = arc / (2 * m_eval) as f64;
        if min_dist <= eval_panel {
            return Err(Error::InvalidArgument(format!(
                "evaluation point within one panel length ({eval_panel:.3e}) of a boundary"
            )));
        }
        let fine_density = trig_interpolate(&density[off..off + 2 * m], m_eval);
        let h = PI / m_eval as f64;
        for (i, &p) in points.iter().enumerate() {
            let mut sum = Complex64::ZERO;
            for (j, rho) in fine_density.iter().enumerate() {
                let node = curve.eval(j as f64 * h);
                let r = p.dist(node.position);
                let (h0, h1) = hankel01(d.k * r);
                // dPhi/dν(y) - iη Phi
                let kernel = Complex64::new(0.0, 0.25 * d.k)
                    * h1
                    * ((p - node.position).dot(node.normal) / r)
                    + Complex64::new(0.0, -d.eta) * Complex64::new(0.0, 0.25) * h0;
                sum += kernel * rho * node.jacobian * h;
            }
            out[i] += sum;
        }
    }
    Ok(out)
}

/// Periodic trigonometric interpolation of nodal values from 2m to
/// 2m_eval equispaced points.
fn trig_interpolate(values: &[Complex64], m_eval: usize) -> Vec<Complex64> {
    let n = values.len();
    let m = n / 2;
    if m_eval == m {
        return values.to_vec();
    }
    // direct DFT; node counts here are small
    let mut coeffs = Vec::with_capacity(n);
    for p in -(m as i64 - 1)..=(m as i64) {
        let mut c = Complex64::ZERO;
        for (j, v) in values.iter().enumerate() {
            let t = PI * j as f64 / m as f64;
            c += v * Complex64::new(0.0, -(p as f64) * t).exp();
        }
        coeffs.push(c / n as f64);
    }
    (0..2 * m_eval)
        .map(|j| {
            let t = PI * j as f64 / m_eval as f64;
            let mut v = Complex64::ZERO;
            for (idx, p) in (-(m as i64 - 1)..=(m as i64)).enumerate() {
                v += coeffs[idx] * Complex64::new(0.0, (p as f64) * t).exp();
            }
            v
        })
        .collect()
}

fn discretize(cfg: &ScattererConfig, settings: &SolverSettings) -> Result<Discretization> {
    let mut comps = Vec::with_capacity(cfg.components.len());
    for comp in &cfg.components {
        let nodes_2m = settings.nodes_for(&comp.curve, cfg.k);
        let m = nodes_2m / 2;
        let nodes = comp.curve.discretize(m)?;
        comps.push(DiscretizedComponent {
            nodes,
            m,
            condition: comp.condition,
        });
    }
    // pairwise disjointness: no node of one component inside another, and
    // strictly positive cross-component node distance
    for i in 0..cfg.components.len() {
        for j in 0..cfg.components.len() {
            if i == j {
                continue;
            }
            let curve_j = &cfg.components[j].curve;
            for node in &comps[i].nodes {
                if curve_j.contains(node.position) {
                    return Err(Error::InvalidArgument(format!(
                        "components {i} and {j} are not disjoint"
                    )));
                }
            }
            if i < j {
                let mut dmin = f64::INFINITY;
                for a in &comps[i].nodes {
                    for b in &comps[j].nodes {
                        dmin = dmin.min(a.position.dist(b.position));
                    }
                }
                if dmin <= 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "components {i} and {j} touch (node distance {dmin:.3e})"
                    )));
                }
            }
        }
    }
    let mut offsets = Vec::with_capacity(comps.len());
    let mut total = 0;
    for c in &comps {
        offsets.push(total);
        total += c.nodes.len();
    }
    Ok(Discretization {
        comps,
        offsets,
        total,
        k: cfg.k,
        eta: cfg.k,
    })
}

/// Kress quadrature weights `R_l` for the kernel factor
/// `ln(4 sin²((t - τ)/2))` on 2m nodes: the rule
/// `∫ ln(4sin²((t_i - τ)/2)) f(τ) dτ ≈ Σ_j R_{|i-j|} f(t_j)` is exact for
/// trigonometric polynomials of degree m.
fn log_weights(m: usize) -> Vec<f64> {
    let mf = m as f64;
    (0..2 * m)
        .map(|l| {
            let angle = l as f64 * PI / mf;
            let mut s = 0.0;
            for p in 1..m {
                s += (p as f64 * angle).cos() / p as f64;
            }
            -2.0 * PI / mf * s - PI / (mf * mf) * (mf * angle).cos()
        })
        .collect()
}

/// Spectral differentiation matrix on 2m equispaced periodic nodes.
fn differentiation_matrix(m: usize) -> Vec<Vec<f64>> {
    let n = 2 * m;
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let t = (i as f64 - j as f64) * PI / (2.0 * m as f64);
                d[i][j] = 0.5 * sign / t.tan();
            }
        }
    }
    d
}

fn hankel01(t: f64) -> (Complex64, Complex64) {
    let (j0, j1, y0, y1) = jy01(t).expect("positive argument");
    (Complex64::new(j0, y0), Complex64::new(j1, y1))
}

/// Self-interaction matrices (single layer, double layer, adjoint double
/// layer) of one component, discretized with the logarithmic product
/// quadrature.
struct SelfBlocks {
    s: CMatrix,
    d: CMatrix,
    kp: CMatrix,
}

fn self_blocks(comp: &DiscretizedComponent, k: f64) -> SelfBlocks {
    let n = comp.nodes.len();
    let m = comp.m;
    let h = PI / m as f64;
    let r_weights = log_weights(m);
    let mut s = CMatrix::zeros(n, n);
    let mut d = CMatrix::zeros(n, n);
    let mut kp = CMatrix::zeros(n, n);
    let quarter_i = Complex64::new(0.0, 0.25);

    for i in 0..n {
        let xi = &comp.nodes[i];
        for j in 0..n {
            let yj = &comp.nodes[j];
            let rl = r_weights[(i as i64 - j as i64).unsigned_abs() as usize % (2 * m)];
            if i == j {
                // diagonal limits of the smooth parts
                let jac = xi.jacobian;
                let s2 = Complex64::new(
                    -(EULER_GAMMA + (0.5 * k * jac).ln()) / (2.0 * PI),
                    0.25,
                ) * jac;
                let s1 = -jac / (4.0 * PI);
                s[(i, j)] = Complex64::new(rl * s1, 0.0) + s2 * h;
                // curvature term x''·n / (4π |x'|²) with n = (x₂', -x₁')
                let curv = (xi.second.x * xi.tangent.y - xi.second.y * xi.tangent.x)
                    / (4.0 * PI * jac * jac);
                d[(i, j)] = Complex64::new(h * curv, 0.0);
                kp[(i, j)] = Complex64::new(h * curv, 0.0);
                continue;
            }
            let diff = xi.position - yj.position;
            let r = diff.norm();
            let (j0, j1, y0, y1) = jy01(k * r).expect("distinct nodes");
            let h0 = Complex64::new(j0, y0);
            let h1 = Complex64::new(j1, y1);
            let tdiff = 0.5 * (i as f64 - j as f64) * PI / m as f64;
            let log4sin2 = (4.0 * tdiff.sin().powi(2)).ln();

            // single layer: (i/4) H0(kr) |y'|
            let m_full = quarter_i * h0 * yj.jacobian;
            let m1 = -(j0 / (4.0 * PI)) * yj.jacobian;
            let m2 = m_full - Complex64::new(m1 * log4sin2, 0.0);
            s[(i, j)] = Complex64::new(rl * m1, 0.0) + m2 * h;

            // double layer: (ik/4) H1(kr) (x-y)·n(τ)/r with n = ν |y'|
            let dny = diff.dot(yj.normal) * yj.jacobian / r;
            let l_full = quarter_i * k * h1 * dny;
            let l1 = -(k / (4.0 * PI)) * j1 * dny;
            let l2 = l_full - Complex64::new(l1 * log4sin2, 0.0);
            d[(i, j)] = Complex64::new(rl * l1, 0.0) + l2 * h;

            // adjoint double layer: -(ik/4) H1(kr) (x-y)·ν(t)/r |y'|
            let dnx = diff.dot(xi.normal) * yj.jacobian / r;
            let kp_full = -quarter_i * k * h1 * dnx;
            let kp1 = (k / (4.0 * PI)) * j1 * dnx;
            let kp2 = kp_full - Complex64::new(kp1 * log4sin2, 0.0);
            kp[(i, j)] = Complex64::new(rl * kp1, 0.0) + kp2 * h;
        }
    }
    SelfBlocks { s, d, kp }
}

/// Hypersingular operator via the Maue identity,
/// `T = D_s S D_s + k² (ν₁ S ν₁ + ν₂ S ν₂)` with `D_s` the arc-length
/// spectral derivative.
fn maue_t(comp: &DiscretizedComponent, k: f64, s: &CMatrix) -> CMatrix {
    let n = comp.nodes.len();
    let dt = differentiation_matrix(comp.m);
    let ds = CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(dt[i][j] / comp.nodes[i].jacobian, 0.0)
    });
    let t1 = ds.matmul(&s.matmul(&ds));
    let diag = |f: &dyn Fn(usize) -> f64| {
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(f(i), 0.0)
            } else {
                Complex64::ZERO
            }
        })
    };
    let n1 = diag(&|i| comp.nodes[i].normal.x);
    let n2 = diag(&|i| comp.nodes[i].normal.y);
    let t2 = n1.matmul(&s.matmul(&n1));
    let t3 = n2.matmul(&s.matmul(&n2));
    let mut t = t1;
    let ksq = Complex64::new(k * k, 0.0);
    for i in 0..n {
        for j in 0..n {
            t[(i, j)] += ksq * (t2[(i, j)] + t3[(i, j)]);
        }
    }
    t
}

fn assemble_operator(disc: &Discretization) -> CMatrix {
    let mut a = CMatrix::zeros(disc.total, disc.total);
    let k = disc.k;
    let eta = disc.eta;
    let i_eta = Complex64::new(0.0, eta);
    let half = Complex64::new(0.5, 0.0);

    // diagonal blocks
    let blocks: Vec<(usize, SelfBlocks)> = disc
        .comps
        .par_iter()
        .enumerate()
        .map(|(c, comp)| (c, self_blocks(comp, k)))
        .collect();
    for (c, blk) in blocks {
        let comp = &disc.comps[c];
        let off = disc.offsets[c];
        let n = comp.nodes.len();
        match comp.condition.as_impedance() {
            None => {
                // (1/2) I + D - iη S
                for i in 0..n {
                    for j in 0..n {
                        let mut v = blk.d[(i, j)] - i_eta * blk.s[(i, j)];
                        if i == j {
                            v += half;
                        }
                        a[(off + i, off + j)] = v;
                    }
                }
            }
            Some(lambda) => {
                // T - iη (K' - I/2) + λ (D + I/2) - iη λ S
                let t = maue_t(comp, k, &blk.s);
                for i in 0..n {
                    for j in 0..n {
                        let mut v = t[(i, j)] - i_eta * blk.kp[(i, j)]
                            + lambda * blk.d[(i, j)]
                            - i_eta * lambda * blk.s[(i, j)];
                        if i == j {
                            v += i_eta * half + lambda * half;
                        }
                        a[(off + i, off + j)] = v;
                    }
                }
            }
        }
    }

    // off-diagonal blocks: smooth kernels, trapezoid rule
    for (ci, comp_i) in disc.comps.iter().enumerate() {
        for (cj, comp_j) in disc.comps.iter().enumerate() {
            if ci == cj {
                continue;
            }
            let off_i = disc.offsets[ci];
            let off_j = disc.offsets[cj];
            let h = PI / comp_j.m as f64;
            for (i, xi) in comp_i.nodes.iter().enumerate() {
                for (j, yj) in comp_j.nodes.iter().enumerate() {
                    let diff = xi.position - yj.position;
                    let r = diff.norm();
                    let (h0, h1) = hankel01(k * r);
                    let quarter_i = Complex64::new(0.0, 0.25);
                    let phi = quarter_i * h0;
                    let ddny = diff.dot(yj.normal) / r;
                    let dphi_dny = quarter_i * k * h1 * ddny;
                    let weight = yj.jacobian * h;
                    let v = match comp_i.condition.as_impedance() {
                        None => dphi_dny - i_eta * phi,
                        Some(lambda) => {
                            let ddnx = diff.dot(xi.normal) / r;
                            let dphi_dnx = -quarter_i * k * h1 * ddnx;
                            // H1'(z) = H0(z) - H1(z)/z
                            let h1p = h0 - h1 / (k * r);
                            let d2 = quarter_i
                                * k
                                * (k * h1p * ddnx * ddny
                                    + h1 * (xi.normal.dot(yj.normal) / r - ddnx * ddny / r));
                            d2 - i_eta * dphi_dnx + lambda * dphi_dny - i_eta * lambda * phi
                        }
                    };
                    a[(off_i + i, off_j + j)] = v * weight;
                }
            }
        }
    }
    a
}
