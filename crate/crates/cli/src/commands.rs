//! The five pipeline commands. Each returns its outcome plus a
//! [`RunReport`]; printing and exit codes are the binary's business.

use crate::config::{ConditionSpec, Engine, ExperimentConfig};
use crate::output::{fmt_rho, write_csv, write_pgm};
use crate::report::{ArgmaxEntry, ChainMargins, Norms, Residuals, RunReport};
use scatter2d::analytic_disk::disk_far_field_matrix;
use scatter2d::bie::{assemble_far_field_matrix, SolverSettings};
use scatter2d::farfield::{FarFieldMatrix, NoiseSpec};
use scatter2d::indicators::{chain_report, stability_check, sweep, Method, SamplingGrid};
use scatter2d::{Error, Point, Result};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const FARFIELD_FILE: &str = "farfield.txt";
pub const NOISY_FILE: &str = "farfield_noisy.txt";

/// Fixed seed for the fresh perturbation drawn inside `verify`.
const VERIFY_SEED: u64 = 0x00C0_FFEE;

pub struct ForwardOutcome {
    pub matrix: FarFieldMatrix,
    pub file: PathBuf,
    pub report: RunReport,
}

/// Synthesize far-field data from a config and write it out.
pub fn cmd_forward(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ForwardOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let matrix = compute_forward(cfg)?;
    let seconds = started.elapsed().as_secs_f64();

    let mut report = RunReport::new("forward");
    report.engine = Some(cfg.engine.name().to_string());
    report.k = Some(cfg.k);
    report.n = Some(cfg.n_dirs);
    fill_matrix_diagnostics(&mut report, &matrix);
    report.timings_seconds.insert("forward".into(), seconds);
    add_scope_notes(&mut report, cfg);

    let file = out_dir.join(FARFIELD_FILE);
    matrix.write(&file)?;
    report.record_file(&file)?;
    report.write(&out_dir.join("forward_report.json"))?;
    Ok(ForwardOutcome {
        matrix,
        file,
        report,
    })
}

pub struct PerturbOutcome {
    pub matrix: FarFieldMatrix,
    pub file: PathBuf,
    pub report: RunReport,
}

/// Perturb a far-field file with exactly calibrated relative noise.
pub fn cmd_perturb(infile: &Path, delta: f64, seed: u64, out_dir: &Path) -> Result<PerturbOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let clean = FarFieldMatrix::read(infile)?;
    let started = Instant::now();
    let noisy = clean.perturb(&NoiseSpec { delta, seed })?;
    let seconds = started.elapsed().as_secs_f64();

    let mut report = RunReport::new("perturb");
    report.k = Some(clean.k());
    report.n = Some(clean.n());
    report.delta = Some(delta);
    report.seed = Some(seed);
    report.measured_relative_error = Some(clean.relative_error(&noisy));
    report.timings_seconds.insert("perturb".into(), seconds);

    let file = out_dir.join(NOISY_FILE);
    noisy.write(&file)?;
    report.record_file(&file)?;
    report.write(&out_dir.join("perturb_report.json"))?;
    Ok(PerturbOutcome {
        matrix: noisy,
        file,
        report,
    })
}

pub struct ReconstructOutcome {
    pub files: Vec<PathBuf>,
    pub report: RunReport,
}

/// Sweep the configured indicators over the configured grid.
pub fn cmd_reconstruct(
    infile: &Path,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ReconstructOutcome> {
    let matrix = FarFieldMatrix::read(infile)?;
    check_data_matches_config(&matrix, cfg)?;
    let mut report = RunReport::new("reconstruct");
    let files = reconstruct_into(&matrix, cfg, &cfg.methods, out_dir, &mut report)?;
    report.write(&out_dir.join("reconstruct_report.json"))?;
    Ok(ReconstructOutcome { files, report })
}

pub struct CompareOutcome {
    pub files: Vec<PathBuf>,
    pub report: RunReport,
    pub forward_seconds: f64,
    pub reconstruct_seconds: f64,
}

/// Forward + perturb + reconstruct with all four indicators.
pub fn cmd_compare(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CompareOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let clean = compute_forward(cfg)?;
    let forward_seconds = started.elapsed().as_secs_f64();

    let mut report = RunReport::new("compare");
    report.engine = Some(cfg.engine.name().to_string());
    report.k = Some(cfg.k);
    report.n = Some(cfg.n_dirs);
    report.delta = Some(cfg.delta);
    report.seed = Some(cfg.seed);
    fill_matrix_diagnostics(&mut report, &clean);
    add_scope_notes(&mut report, cfg);

    let clean_file = out_dir.join(FARFIELD_FILE);
    clean.write(&clean_file)?;

    let noisy = clean.perturb(&NoiseSpec {
        delta: cfg.delta,
        seed: cfg.seed,
    })?;
    report.measured_relative_error = Some(clean.relative_error(&noisy));
    let noisy_file = out_dir.join(NOISY_FILE);
    noisy.write(&noisy_file)?;

    let started = Instant::now();
    let all = [Method::New, Method::Osm, Method::Rtm, Method::Fm];
    let mut files = reconstruct_into(&noisy, cfg, &all, out_dir, &mut report)?;
    let reconstruct_seconds = started.elapsed().as_secs_f64();

    report
        .timings_seconds
        .insert("forward".into(), forward_seconds);
    report
        .timings_seconds
        .insert("reconstruct".into(), reconstruct_seconds);
    report.record_file(&clean_file)?;
    report.record_file(&noisy_file)?;
    files.push(clean_file);
    files.push(noisy_file);
    report.write(&out_dir.join("compare_report.json"))?;
    Ok(CompareOutcome {
        files,
        report,
        forward_seconds,
        reconstruct_seconds,
    })
}

/// One verification check with its measured quantity.
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub struct VerifyOutcome {
    pub checks: Vec<CheckResult>,
    pub report: RunReport,
}

impl VerifyOutcome {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Data-level verification of a far-field file: reciprocity, the operator
/// identity (or absorption positivity), the indicator inequality chain and
/// the stability bound under a fresh perturbation.
pub fn cmd_verify(infile: &Path, out_dir: Option<&Path>) -> Result<VerifyOutcome> {
    let matrix = FarFieldMatrix::read(infile)?;
    let mut checks = Vec::new();
    let mut report = RunReport::new("verify");
    report.k = Some(matrix.k());
    report.n = Some(matrix.n());

    let reciprocity = matrix.reciprocity_residual();
    checks.push(CheckResult {
        name: "reciprocity",
        pass: reciprocity <= 1e-6,
        detail: format!("residual={reciprocity:.3e} tolerance=1e-6"),
    });

    let unitarity = matrix.unitarity_residual();
    let mut residuals = Residuals {
        reciprocity: Some(reciprocity),
        unitarity: Some(unitarity),
        r_form_min_eigenvalue: None,
    };
    if unitarity <= 1e-6 {
        checks.push(CheckResult {
            name: "operator_identity",
            pass: true,
            detail: format!("unitarity residual={unitarity:.3e} tolerance=1e-6"),
        });
    } else {
        // absorbing scatterers have a positive absorption form instead
        let min_eig = matrix.r_form_min_eigenvalue()?;
        residuals.r_form_min_eigenvalue = Some(min_eig);
        let bound = -1e-8 * matrix.spectral_norm();
        checks.push(CheckResult {
            name: "operator_identity",
            pass: min_eig >= bound,
            detail: format!(
                "unitarity residual={unitarity:.3e} exceeded 1e-6; \
                 absorption form min eigenvalue={min_eig:.3e} bound={bound:.3e}"
            ),
        });
    }
    report.residuals = Some(residuals);
    report.norms = Some(Norms {
        spectral: matrix.spectral_norm(),
        frobenius: matrix.entries().frobenius_norm(),
    });

    // chain and stability on a fixed coarse default grid
    let grid = SamplingGrid::new(4.0, 41, Point::new(0.0, 0.0))?;
    let chain = chain_report(&matrix, &grid);
    checks.push(CheckResult {
        name: "indicator_chain",
        pass: chain.passes(1e-8),
        detail: format!(
            "margins=({:.3e}, {:.3e}, {:.3e}) scale={:.3e}",
            chain.lower, chain.middle, chain.upper, chain.scale
        ),
    });
    report.chain = Some(ChainMargins {
        lower: chain.lower,
        middle: chain.middle,
        upper: chain.upper,
        scale: chain.scale,
    });

    let noisy = matrix.perturb(&NoiseSpec {
        delta: 0.3,
        seed: VERIFY_SEED,
    })?;
    let stability = stability_check(&matrix, &noisy, &grid)?;
    checks.push(CheckResult {
        name: "stability_bound",
        pass: stability.holds(),
        detail: format!(
            "max difference={:.6e} bound={:.6e}",
            stability.max_difference, stability.bound
        ),
    });

    for c in &checks {
        report.notes.push(format!(
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        report.write(&dir.join("verify_report.json"))?;
    }
    Ok(VerifyOutcome { checks, report })
}

fn compute_forward(cfg: &ExperimentConfig) -> Result<FarFieldMatrix> {
    match cfg.engine {
        Engine::Bie => {
            let scatterer = cfg.to_bie_config()?;
            assemble_far_field_matrix(&scatterer, &SolverSettings::default(), cfg.n_dirs)
        }
        Engine::Analytic => {
            let disk = cfg.to_disk()?;
            disk_far_field_matrix(&disk, cfg.k, cfg.n_dirs)
        }
    }
}

fn fill_matrix_diagnostics(report: &mut RunReport, matrix: &FarFieldMatrix) {
    let mut residuals = Residuals {
        reciprocity: Some(matrix.reciprocity_residual()),
        unitarity: Some(matrix.unitarity_residual()),
        r_form_min_eigenvalue: None,
    };
    // the eigensolve is cubic; keep forward runs snappy on large grids
    if matrix.n() <= 128 {
        residuals.r_form_min_eigenvalue = matrix.r_form_min_eigenvalue().ok();
    }
    report.residuals = Some(residuals);
    report.norms = Some(Norms {
        spectral: matrix.spectral_norm(),
        frobenius: matrix.entries().frobenius_norm(),
    });
}

fn add_scope_notes(report: &mut RunReport, cfg: &ExperimentConfig) {
    if cfg
        .components
        .iter()
        .any(|c| matches!(c.condition, ConditionSpec::Penetrable(_)))
    {
        report.notes.push(
            "penetrable scattering is modeled by the constant-contrast disk series; \
             general penetrable shapes are out of scope and replaced by disk analogs"
                .into(),
        );
    }
}

fn check_data_matches_config(matrix: &FarFieldMatrix, cfg: &ExperimentConfig) -> Result<()> {
    if matrix.n() != cfg.n_dirs {
        return Err(Error::InvalidArgument(format!(
            "far-field file has N = {}, config says {}",
            matrix.n(),
            cfg.n_dirs
        )));
    }
    let k_rel = (matrix.k() - cfg.k).abs() / cfg.k;
    if k_rel > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "far-field file has k = {}, config says {}",
            matrix.k(),
            cfg.k
        )));
    }
    Ok(())
}

fn reconstruct_into(
    matrix: &FarFieldMatrix,
    cfg: &ExperimentConfig,
    methods: &[Method],
    out_dir: &Path,
    report: &mut RunReport,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    for &method in methods {
        for &rho in &cfg.rhos {
            let map = sweep(matrix, &cfg.grid, method, rho, cfg.delta)?;
            let stem = format!("{}_rho{}", method.name(), fmt_rho(rho));
            let csv = out_dir.join(format!("{stem}.csv"));
            let pgm = out_dir.join(format!("{stem}.pgm"));
            write_csv(&map, &csv)?;
            write_pgm(&map, &pgm)?;
            report.record_file(&csv)?;
            report.record_file(&pgm)?;
            let (index, point, value) = map.argmax();
            report.argmax.insert(
                stem,
                ArgmaxEntry {
                    index,
                    x: point.x,
                    y: point.y,
                    value,
                },
            );
            files.push(csv);
            files.push(pgm);
        }
    }
    let chain = chain_report(matrix, &cfg.grid);
    report.chain = Some(ChainMargins {
        lower: chain.lower,
        middle: chain.middle,
        upper: chain.upper,
        scale: chain.scale,
    });
    Ok(files)
}
