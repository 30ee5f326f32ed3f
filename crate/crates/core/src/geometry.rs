//! Parameterized boundary curves: circle, peanut, pear and kite, with
//! analytic first and second derivatives. Exact Jacobians matter here: the
//! Nyström quadrature downstream is spectrally accurate only because these
//! are closed-form, not finite-differenced.

use crate::{Error, Point, Result};
use std::f64::consts::PI;

/// The stock boundary shapes.
///
/// All four maps are smooth, simple and 2π-periodic, traversed
/// counterclockwise:
///
/// * circle: `c + r (cos t, sin t)`
/// * peanut: `c + sqrt(3 cos^2 t + 1) (cos t, sin t)`
/// * pear:   `c + (2 + 0.3 cos 3t) (cos t, sin t)`
/// * kite:   `c + (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    Circle,
    Peanut,
    Pear,
    Kite,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Circle => "circle",
            CurveKind::Peanut => "peanut",
            CurveKind::Pear => "pear",
            CurveKind::Kite => "kite",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(CurveKind::Circle),
            "peanut" => Ok(CurveKind::Peanut),
            "pear" => Ok(CurveKind::Pear),
            "kite" => Ok(CurveKind::Kite),
            other => Err(Error::InvalidArgument(format!(
                "unknown curve kind '{other}' (expected circle|peanut|pear|kite)"
            ))),
        }
    }
}

/// A positioned boundary curve. `radius` is only meaningful for circles;
/// the other shapes have their size built into the parameterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCurve {
    pub kind: CurveKind,
    pub center: Point,
    pub radius: f64,
}

/// Curve data at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub position: Point,
    /// dx/dt
    pub tangent: Point,
    /// d2x/dt2, needed for the curvature terms of the quadrature
    pub second: Point,
    /// unit outward normal
    pub normal: Point,
    /// |x'(t)| > 0
    pub jacobian: f64,
}

impl BoundaryCurve {
    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        Ok(BoundaryCurve {
            kind: CurveKind::Circle,
            center,
            radius,
        })
    }

    pub fn new(kind: CurveKind, center: Point, radius: Option<f64>) -> Result<Self> {
        match kind {
            CurveKind::Circle => BoundaryCurve::circle(
                center,
                radius.ok_or_else(|| {
                    Error::InvalidArgument("circle requires a radius".into())
                })?,
            ),
            _ => {
                if radius.is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "radius only applies to circles, not {}",
                        kind.name()
                    )));
                }
                Ok(BoundaryCurve {
                    kind,
                    center,
                    radius: 0.0,
                })
            }
        }
    }

    /// Exact reduction of the parameter into [0, 2π). For arguments in
    /// [0, 4π) the subtraction is exact (Sterbenz), so `eval(t + 2π)`
    /// reproduces `eval(t)` up to the rounding of `t + 2π` itself.
    fn reduce(t: f64) -> f64 {
        let two_pi = 2.0 * PI;
        let mut t = t % two_pi;
        if t < 0.0 {
            t += two_pi;
        }
        t
    }

    /// Position, derivatives and outward normal at parameter `t`.
    pub fn eval(&self, t: f64) -> BoundaryPoint {
        let t = Self::reduce(t);
        let (ct, st) = (t.cos(), t.sin());
        let (position, tangent, second) = match self.kind {
            CurveKind::Circle => {
                let r = self.radius;
                (
                    Point::new(r * ct, r * st),
                    Point::new(-r * st, r * ct),
                    Point::new(-r * ct, -r * st),
                )
            }
            CurveKind::Peanut => {
                // rho(t) = sqrt(3 cos^2 t + 1)
                let rho2 = 3.0 * ct * ct + 1.0;
                let rho = rho2.sqrt();
                let rho_p = -3.0 * ct * st / rho;
                let cos2t = ct * ct - st * st;
                let rho_pp = -3.0 * cos2t / rho - 9.0 * ct * ct * st * st / (rho2 * rho);
                polar_derivatives(rho, rho_p, rho_pp, ct, st)
            }
            CurveKind::Pear => {
                // rho(t) = 2 + 0.3 cos 3t
                let (c3, s3) = ((3.0 * t).cos(), (3.0 * t).sin());
                let rho = 2.0 + 0.3 * c3;
                let rho_p = -0.9 * s3;
                let rho_pp = -2.7 * c3;
                polar_derivatives(rho, rho_p, rho_pp, ct, st)
            }
            CurveKind::Kite => {
                let (c2, s2) = ((2.0 * t).cos(), (2.0 * t).sin());
                (
                    Point::new(ct + 0.65 * c2 - 0.65, 1.5 * st),
                    Point::new(-st - 1.3 * s2, 1.5 * ct),
                    Point::new(-ct - 2.6 * c2, -1.5 * st),
                )
            }
        };
        let jacobian = tangent.norm();
        // tangent rotated by -pi/2: outward for counterclockwise curves
        let normal = Point::new(tangent.y / jacobian, -tangent.x / jacobian);
        BoundaryPoint {
            position: position + self.center,
            tangent,
            second,
            normal,
            jacobian,
        }
    }

    /// 2m Nyström nodes at `t_j = π j / m`.
    pub fn discretize(&self, m: usize) -> Result<Vec<BoundaryPoint>> {
        if m < 8 {
            return Err(Error::InvalidArgument(format!(
                "need at least 8 half-nodes per curve, got m = {m}"
            )));
        }
        let h = PI / m as f64;
        Ok((0..2 * m).map(|j| self.eval(j as f64 * h)).collect())
    }

    /// Winding-number test against the discretized polygon (m = 256).
    /// Points within ~1e-9 of the boundary may classify either way.
    pub fn contains(&self, z: Point) -> bool {
        let poly = self.discretize(256).expect("m = 256 is valid");
        let mut winding = 0i32;
        for i in 0..poly.len() {
            let a = poly[i].position;
            let b = poly[(i + 1) % poly.len()].position;
            if a.y <= z.y {
                if b.y > z.y && cross(b - a, z - a) > 0.0 {
                    winding += 1;
                }
            } else if b.y <= z.y && cross(b - a, z - a) < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// Minimum distance from `z` to the sampled boundary.
    pub fn distance_to_boundary(&self, z: Point, samples: usize) -> f64 {
        let h = 2.0 * PI / samples as f64;
        (0..samples)
            .map(|j| self.eval(j as f64 * h).position.dist(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Diameter estimate from the discretized bounding box.
    pub fn diameter(&self) -> f64 {
        let pts = self.discretize(64).expect("m = 64 is valid");
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &pts {
            xmin = xmin.min(p.position.x);
            xmax = xmax.max(p.position.x);
            ymin = ymin.min(p.position.y);
            ymax = ymax.max(p.position.y);
        }
        ((xmax - xmin).powi(2) + (ymax - ymin).powi(2)).sqrt()
    }
}

fn polar_derivatives(
    rho: f64,
    rho_p: f64,
    rho_pp: f64,
    ct: f64,
    st: f64,
) -> (Point, Point, Point) {
    (
        Point::new(rho * ct, rho * st),
        Point::new(rho_p * ct - rho * st, rho_p * st + rho * ct),
        Point::new(
            rho_pp * ct - 2.0 * rho_p * st - rho * ct,
            rho_pp * st + 2.0 * rho_p * ct - rho * st,
        ),
    )
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves() -> Vec<BoundaryCurve> {
        vec![
            BoundaryCurve::circle(Point::new(0.0, 0.0), 2.0).unwrap(),
            BoundaryCurve::new(CurveKind::Peanut, Point::new(0.0, 0.0), None).unwrap(),
            BoundaryCurve::new(CurveKind::Pear, Point::new(0.0, 0.0), None).unwrap(),
            BoundaryCurve::new(CurveKind::Kite, Point::new(0.0, 0.0), None).unwrap(),
        ]
    }

    #[test]
    fn stock_points_at_t_zero() {
        let kite = BoundaryCurve::new(CurveKind::Kite, Point::new(0.0, 0.0), None).unwrap();
        let p = kite.eval(0.0).position;
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15);

        let peanut = BoundaryCurve::new(CurveKind::Peanut, Point::new(0.0, 0.0), None).unwrap();
        let p = peanut.eval(0.0).position;
        assert!((p.x - 2.0).abs() < 1e-15 && p.y.abs() < 1e-15);

        let pear = BoundaryCurve::new(CurveKind::Pear, Point::new(0.0, 0.0), None).unwrap();
        let p = pear.eval(0.0).position;
        assert!((p.x - 2.3).abs() < 1e-15 && p.y.abs() < 1e-15);

        let circle = BoundaryCurve::circle(Point::new(0.5, -1.5), 2.0).unwrap();
        let p = circle.eval(std::f64::consts::FRAC_PI_2).position;
        assert!((p.x - 0.5).abs() < 1e-15 && (p.y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        let h2 = 1e-5; // second differences need a larger step for rounding
        for curve in curves() {
            for j in 0..17 {
                let t = 0.37 + j as f64 * 0.35;
                let p = curve.eval(t);
                let fwd = curve.eval(t + h).position;
                let bwd = curve.eval(t - h).position;
                let dx = (fwd.x - bwd.x) / (2.0 * h);
                let dy = (fwd.y - bwd.y) / (2.0 * h);
                assert!((dx - p.tangent.x).abs() < 1e-7, "{:?} t={t}", curve.kind);
                assert!((dy - p.tangent.y).abs() < 1e-7);
                let fwd2 = curve.eval(t + h2).position;
                let bwd2 = curve.eval(t - h2).position;
                let ddx = (fwd2.x - 2.0 * p.position.x + bwd2.x) / (h2 * h2);
                let ddy = (fwd2.y - 2.0 * p.position.y + bwd2.y) / (h2 * h2);
                assert!((ddx - p.second.x).abs() < 1e-4, "{:?} t={t}", curve.kind);
                assert!((ddy - p.second.y).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn circle_arc_length_is_exact() {
        let circle = BoundaryCurve::circle(Point::new(0.0, 0.0), 2.0).unwrap();
        let pts = circle.discretize(32).unwrap();
        let h = PI / 32.0;
        let len: f64 = pts.iter().map(|p| p.jacobian * h).sum();
        assert!((len - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn kite_arc_length_converges_spectrally() {
        let kite = BoundaryCurve::new(CurveKind::Kite, Point::new(0.0, 0.0), None).unwrap();
        let arc = |m: usize| -> f64 {
            let h = PI / m as f64;
            kite.discretize(m)
                .unwrap()
                .iter()
                .map(|p| p.jacobian * h)
                .sum()
        };
        assert!((arc(64) - arc(128)).abs() <= 1e-10);
    }

    #[test]
    fn jacobians_positive_everywhere() {
        for curve in curves() {
            for p in curve.discretize(32).unwrap() {
                assert!(p.jacobian > 0.0);
            }
        }
    }

    #[test]
    fn normals_are_unit_orthogonal_outward() {
        for curve in curves() {
            for j in 0..64 {
                let t = j as f64 * PI / 32.0;
                let p = curve.eval(t);
                assert!((p.normal.norm() - 1.0).abs() < 1e-14);
                assert!(p.normal.dot(p.tangent).abs() < 1e-12 * p.jacobian);
                let outside = p.position + p.normal * 1e-3;
                assert!(!curve.contains(outside), "{:?} t = {t}", curve.kind);
                let inside = p.position + p.normal * -1e-3;
                assert!(curve.contains(inside), "{:?} t = {t}", curve.kind);
            }
        }
    }

    #[test]
    fn containment_basics() {
        let circle = BoundaryCurve::circle(Point::new(0.0, 0.0), 2.0).unwrap();
        assert!(circle.contains(Point::new(0.0, 0.0)));
        assert!(!circle.contains(Point::new(3.0, 0.0)));
        let kite = BoundaryCurve::new(CurveKind::Kite, Point::new(0.0, 0.0), None).unwrap();
        // max x over the kite is 1 at t = 0 (checked by dense sampling)
        let max_x = (0..100000)
            .map(|j| kite.eval(j as f64 * 2.0 * PI / 100000.0).position.x)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_x <= 1.0 + 1e-9);
        assert!(!kite.contains(Point::new(1.5, 0.0)));
    }

    #[test]
    fn periodicity() {
        for curve in curves() {
            // exact at t = 0 (0 + 2pi reduces exactly)
            let a = curve.eval(0.0);
            let b = curve.eval(2.0 * PI);
            assert_eq!(a.position, b.position);
            for j in 0..20 {
                let t = j as f64 * 0.321;
                let a = curve.eval(t);
                let b = curve.eval(t + 2.0 * PI);
                assert!(a.position.dist(b.position) < 1e-13);
            }
        }
    }

    #[test]
    fn discretize_rejects_small_m() {
        let circle = BoundaryCurve::circle(Point::new(0.0, 0.0), 1.0).unwrap();
        assert!(circle.discretize(4).is_err());
        assert!(circle.discretize(8).is_ok());
        assert!(BoundaryCurve::circle(Point::new(0.0, 0.0), -1.0).is_err());
    }
}
