//! Flat key-value experiment configuration.
//!
//! The format is line oriented and diff friendly: `key = value` pairs,
//! `#` comments, blank lines ignored. Scatterer components are opened by
//! a `component.kind` key and extended by the following `component.*`
//! keys. Unknown keys are rejected.
//!
//! ```text
//! k = 5
//! n_dirs = 64
//! engine = bie
//! delta = 0.3
//! seed = 17
//! grid.extent = 4
//! grid.points = 151
//! methods = new osm rtm fm
//! rho = 1
//! component.kind = kite
//! component.center = 0 0
//! component.condition = dirichlet
//! ```
//!
//! Complex values (impedance `lambda`, contrast `q`) are written as a
//! `re im` pair.

use num_complex::Complex64;
use scatter2d::analytic_disk::{DiskCondition, DiskScatterer};
use scatter2d::bie;
use scatter2d::geometry::{BoundaryCurve, CurveKind};
use scatter2d::indicators::{Method, SamplingGrid};
use scatter2d::{Error, Point, Result};
use std::path::Path;

/// Which forward model generates the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Bie,
    Analytic,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Bie => "bie",
            Engine::Analytic => "analytic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bie" => Ok(Engine::Bie),
            "analytic" => Ok(Engine::Analytic),
            other => Err(Error::InvalidArgument(format!(
                "unknown engine '{other}' (expected bie|analytic)"
            ))),
        }
    }
}

/// Physical condition of one component, as configured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionSpec {
    Dirichlet,
    Neumann,
    Impedance(Complex64),
    Penetrable(Complex64),
}

impl ConditionSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ConditionSpec::Dirichlet => "dirichlet",
            ConditionSpec::Neumann => "neumann",
            ConditionSpec::Impedance(_) => "impedance",
            ConditionSpec::Penetrable(_) => "penetrable",
        }
    }
}

/// One scatterer component, as configured.
#[derive(Debug, Clone, Copy)]
pub struct ComponentSpec {
    pub kind: CurveKind,
    pub center: Point,
    pub radius: Option<f64>,
    pub condition: ConditionSpec,
}

/// A full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub k: f64,
    pub n_dirs: usize,
    pub engine: Engine,
    pub delta: f64,
    pub seed: u64,
    pub grid: SamplingGrid,
    pub methods: Vec<Method>,
    pub rhos: Vec<f64>,
    pub components: Vec<ComponentSpec>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut builder = Builder::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            builder
                .set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidArgument(format!("line {}: {e}", lineno + 1)))?;
        }
        builder.finish()
    }

    /// The components as a boundary-integral configuration; penetrable
    /// components are not representable there.
    pub fn to_bie_config(&self) -> Result<bie::ScattererConfig> {
        let mut comps = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let condition = match c.condition {
                ConditionSpec::Dirichlet => bie::BoundaryCondition::Dirichlet,
                ConditionSpec::Neumann => bie::BoundaryCondition::Neumann,
                ConditionSpec::Impedance(lambda) => bie::BoundaryCondition::Impedance(lambda),
                ConditionSpec::Penetrable(_) => {
                    return Err(Error::InvalidArgument(
                        "penetrable supported for disks only, with the analytic engine".into(),
                    ))
                }
            };
            comps.push(bie::Component {
                curve: BoundaryCurve::new(c.kind, c.center, c.radius)?,
                condition,
            });
        }
        bie::ScattererConfig::new(comps, self.k)
    }

    /// The single disk the analytic engine handles.
    pub fn to_disk(&self) -> Result<DiskScatterer> {
        if self.components.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "the analytic engine handles exactly one disk, got {} components",
                self.components.len()
            )));
        }
        let c = &self.components[0];
        if c.kind != CurveKind::Circle {
            return Err(Error::InvalidArgument(format!(
                "the analytic engine handles disks only, got {}",
                c.kind.name()
            )));
        }
        let condition = match c.condition {
            ConditionSpec::Dirichlet => DiskCondition::Dirichlet,
            ConditionSpec::Neumann => DiskCondition::Neumann,
            ConditionSpec::Impedance(lambda) => DiskCondition::Impedance(lambda),
            ConditionSpec::Penetrable(q) => DiskCondition::Penetrable(q),
        };
        DiskScatterer::new(c.center, c.radius.expect("circles carry a radius"), condition)
    }
}

#[derive(Default)]
struct Builder {
    k: Option<f64>,
    n_dirs: Option<usize>,
    engine: Option<Engine>,
    delta: Option<f64>,
    seed: Option<u64>,
    grid_extent: Option<f64>,
    grid_points: Option<usize>,
    grid_center: Option<Point>,
    methods: Option<Vec<Method>>,
    rhos: Option<Vec<f64>>,
    components: Vec<PartialComponent>,
}

#[derive(Default)]
struct PartialComponent {
    kind: CurveKind2,
    center: Option<Point>,
    radius: Option<f64>,
    condition: Option<&'static str>,
    lambda: Option<Complex64>,
    q: Option<Complex64>,
}

// CurveKind has no sensible Default; wrap it
struct CurveKind2(CurveKind);
impl Default for CurveKind2 {
    fn default() -> Self {
        CurveKind2(CurveKind::Circle)
    }
}

fn parse_f64(v: &str, what: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::InvalidArgument(format!("bad {what} '{v}'")))
}

fn parse_pair(v: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "{what} expects two numbers, got '{v}'"
        )));
    }
    Ok((parse_f64(parts[0], what)?, parse_f64(parts[1], what)?))
}

impl Builder {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "k" => self.k = Some(parse_f64(value, "wavenumber")?),
            "n_dirs" => {
                self.n_dirs = Some(value.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad direction count '{value}'"))
                })?)
            }
            "engine" => self.engine = Some(Engine::parse(value)?),
            "delta" => self.delta = Some(parse_f64(value, "noise level")?),
            "seed" => {
                self.seed = Some(value.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad seed '{value}'"))
                })?)
            }
            "grid.extent" => self.grid_extent = Some(parse_f64(value, "grid extent")?),
            "grid.points" => {
                self.grid_points = Some(value.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad grid point count '{value}'"))
                })?)
            }
            "grid.center" => {
                let (x, y) = parse_pair(value, "grid center")?;
                self.grid_center = Some(Point::new(x, y));
            }
            "methods" => {
                let methods: Result<Vec<Method>> =
                    value.split_whitespace().map(Method::parse).collect();
                self.methods = Some(methods?);
            }
            "rho" => {
                let rhos: Result<Vec<f64>> = value
                    .split_whitespace()
                    .map(|s| parse_f64(s, "rho"))
                    .collect();
                self.rhos = Some(rhos?);
            }
            "component.kind" => {
                self.components.push(PartialComponent {
                    kind: CurveKind2(CurveKind::parse(value)?),
                    ..Default::default()
                });
            }
            other if other.starts_with("component.") => {
                let comp = self.components.last_mut().ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "'{other}' before any component.kind"
                    ))
                })?;
                match other {
                    "component.center" => {
                        let (x, y) = parse_pair(value, "component center")?;
                        comp.center = Some(Point::new(x, y));
                    }
                    "component.radius" => comp.radius = Some(parse_f64(value, "radius")?),
                    "component.condition" => {
                        comp.condition = Some(match value {
                            "dirichlet" => "dirichlet",
                            "neumann" => "neumann",
                            "impedance" => "impedance",
                            "penetrable" => "penetrable",
                            _ => {
                                return Err(Error::InvalidArgument(format!(
                                    "unknown condition '{value}'"
                                )))
                            }
                        });
                    }
                    "component.lambda" => {
                        let (re, im) = parse_pair(value, "impedance")?;
                        comp.lambda = Some(Complex64::new(re, im));
                    }
                    "component.q" => {
                        let (re, im) = parse_pair(value, "contrast")?;
                        comp.q = Some(Complex64::new(re, im));
                    }
                    _ => {
                        return Err(Error::InvalidArgument(format!("unknown key '{other}'")));
                    }
                }
            }
            other => {
                return Err(Error::InvalidArgument(format!("unknown key '{other}'")));
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<ExperimentConfig> {
        let missing = |what: &str| Error::InvalidArgument(format!("missing required key '{what}'"));
        let k = self.k.ok_or_else(|| missing("k"))?;
        let n_dirs = self.n_dirs.ok_or_else(|| missing("n_dirs"))?;
        if n_dirs < 4 || n_dirs % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "n_dirs must be even and at least 4, got {n_dirs}"
            )));
        }
        let delta = self.delta.unwrap_or(0.0);
        if !(delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must be nonnegative, got {delta}"
            )));
        }
        let grid = SamplingGrid::new(
            self.grid_extent.ok_or_else(|| missing("grid.extent"))?,
            self.grid_points.ok_or_else(|| missing("grid.points"))?,
            self.grid_center.unwrap_or(Point::new(0.0, 0.0)),
        )?;
        let methods = self.methods.unwrap_or_else(|| vec![Method::New]);
        if methods.is_empty() {
            return Err(Error::InvalidArgument("methods list is empty".into()));
        }
        let rhos = self.rhos.unwrap_or_else(|| vec![2.0]);
        for &rho in &rhos {
            if !(rho >= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "rho must be at least 1, got {rho}"
                )));
            }
        }
        let engine = self.engine.unwrap_or(Engine::Bie);

        if self.components.is_empty() {
            return Err(missing("component.kind"));
        }
        let mut components = Vec::with_capacity(self.components.len());
        for (i, pc) in self.components.into_iter().enumerate() {
            let kind = pc.kind.0;
            let center = pc
                .center
                .ok_or_else(|| missing(&format!("component.center (component {i})")))?;
            let condition = match pc
                .condition
                .ok_or_else(|| missing(&format!("component.condition (component {i})")))?
            {
                "dirichlet" => ConditionSpec::Dirichlet,
                "neumann" => ConditionSpec::Neumann,
                "impedance" => ConditionSpec::Impedance(pc.lambda.ok_or_else(|| {
                    missing(&format!("component.lambda (component {i})"))
                })?),
                "penetrable" => ConditionSpec::Penetrable(pc.q.ok_or_else(|| {
                    missing(&format!("component.q (component {i})"))
                })?),
                _ => unreachable!(),
            };
            if matches!(condition, ConditionSpec::Impedance(_)) && pc.q.is_some()
                || !matches!(condition, ConditionSpec::Impedance(_)) && pc.lambda.is_some()
                || !matches!(condition, ConditionSpec::Penetrable(_)) && pc.q.is_some()
            {
                return Err(Error::InvalidArgument(format!(
                    "component {i}: lambda/q given for a mismatched condition"
                )));
            }
            // curve construction validates radius presence/absence
            BoundaryCurve::new(kind, center, pc.radius)?;
            components.push(ComponentSpec {
                kind,
                center,
                radius: pc.radius,
                condition,
            });
        }

        // scope rule: penetrable components require the analytic engine,
        // which handles a single disk
        let any_penetrable = components
            .iter()
            .any(|c| matches!(c.condition, ConditionSpec::Penetrable(_)));
        if any_penetrable {
            if components.len() != 1 || components[0].kind != CurveKind::Circle {
                return Err(Error::InvalidArgument(
                    "penetrable supported for disks only (single disk, analytic engine)".into(),
                ));
            }
            if engine != Engine::Analytic {
                return Err(Error::InvalidArgument(
                    "penetrable components require engine = analytic".into(),
                ));
            }
        }
        if engine == Engine::Analytic
            && (components.len() != 1 || components[0].kind != CurveKind::Circle)
        {
            return Err(Error::InvalidArgument(
                "the analytic engine handles exactly one disk".into(),
            ));
        }

        Ok(ExperimentConfig {
            k,
            n_dirs,
            engine,
            delta,
            seed: self.seed.unwrap_or(0),
            grid,
            methods,
            rhos,
            components,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# a comment
k = 5
n_dirs = 64
engine = bie
delta = 0.3
seed = 17
grid.extent = 4
grid.points = 151
methods = new osm rtm fm
rho = 1
component.kind = kite
component.center = 0 0
component.condition = dirichlet
";

    #[test]
    fn parses_the_reference_config() {
        let cfg = ExperimentConfig::parse(GOOD).unwrap();
        assert_eq!(cfg.k, 5.0);
        assert_eq!(cfg.n_dirs, 64);
        assert_eq!(cfg.engine, Engine::Bie);
        assert_eq!(cfg.methods.len(), 4);
        assert_eq!(cfg.rhos, vec![1.0]);
        assert_eq!(cfg.grid.points, 151);
        assert_eq!(cfg.components.len(), 1);
        assert!(cfg.to_bie_config().is_ok());
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = format!("{GOOD}\nwavelength = 3\n");
        match ExperimentConfig::parse(&bad) {
            Err(Error::InvalidArgument(msg)) => assert!(msg.contains("unknown key")),
            other => panic!("expected unknown-key rejection, got {other:?}"),
        }
        let bad = format!("{GOOD}\ncomponent.colour = red\n");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }

    #[test]
    fn rejects_penetrable_non_disk() {
        let cfg = "\
k = 5
n_dirs = 64
engine = analytic
grid.extent = 4
grid.points = 11
component.kind = pear
component.center = 0 0
component.condition = penetrable
component.q = 0.5 0
";
        match ExperimentConfig::parse(cfg) {
            Err(Error::InvalidArgument(msg)) => {
                assert!(msg.contains("penetrable supported for disks only"), "{msg}")
            }
            other => panic!("expected penetrable scope rejection, got {other:?}"),
        }
    }

    #[test]
    fn rejects_penetrable_with_bie_engine() {
        let cfg = "\
k = 5
n_dirs = 64
engine = bie
grid.extent = 4
grid.points = 11
component.kind = circle
component.center = 0 0
component.radius = 2
component.condition = penetrable
component.q = 0.5 0
";
        match ExperimentConfig::parse(cfg) {
            Err(Error::InvalidArgument(msg)) => {
                assert!(msg.contains("analytic"), "{msg}")
            }
            other => panic!("expected engine rejection, got {other:?}"),
        }
    }

    #[test]
    fn multi_component_configs_parse_in_order() {
        let cfg = "\
k = 10
n_dirs = 128
delta = 0.3
grid.extent = 7
grid.points = 301
component.kind = kite
component.center = 3 -3
component.condition = dirichlet
component.kind = peanut
component.center = -3 3
component.condition = neumann
";
        let cfg = ExperimentConfig::parse(cfg).unwrap();
        assert_eq!(cfg.components.len(), 2);
        assert_eq!(cfg.components[0].kind, CurveKind::Kite);
        assert_eq!(cfg.components[1].kind, CurveKind::Peanut);
        assert_eq!(cfg.components[1].condition.name(), "neumann");
        // defaults
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.rhos, vec![2.0]);
    }

    #[test]
    fn impedance_requires_lambda_and_matching_fields() {
        let missing_lambda = "\
k = 5
n_dirs = 64
grid.extent = 4
grid.points = 11
component.kind = pear
component.center = 0 0
component.condition = impedance
";
        assert!(ExperimentConfig::parse(missing_lambda).is_err());
        let stray_q = "\
k = 5
n_dirs = 64
grid.extent = 4
grid.points = 11
component.kind = pear
component.center = 0 0
component.condition = dirichlet
component.q = 0.5 0
";
        assert!(ExperimentConfig::parse(stray_q).is_err());
    }
}
