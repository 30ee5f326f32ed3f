//! Experiment runner around the `scatter2d` library: parse a flat
//! key-value experiment config, synthesize far-field data (boundary
//! integral or analytic disk engine), perturb it with calibrated noise,
//! sweep sampling indicators over a grid, and emit CSV maps, PGM
//! heatmaps and JSON run reports.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

/// Process exit codes used by the binary.
pub mod exit_codes {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

/// Map a library error onto the documented exit codes.
pub fn exit_code_for(err: &scatter2d::Error) -> i32 {
    match err {
        scatter2d::Error::InvalidArgument(_) => exit_codes::VALIDATION,
        scatter2d::Error::FileFormat(_) => exit_codes::VALIDATION,
        scatter2d::Error::Io(_) => exit_codes::VALIDATION,
        scatter2d::Error::Numerical(_) => exit_codes::NUMERICAL,
    }
}
