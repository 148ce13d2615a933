//! Job orchestration, JSON/text reporting and the oracle verification driver.

mod config;
mod render;
mod result;
mod verify;

use std::fmt;

use ahg_core::lattice_geometry::normalized_volume;
use ahg_core::monodromy_engine::{check_nondegeneracy, monodromy_at_infinity, validate_configuration};

pub use config::{
    parse_config, parse_config_value, parse_orientation, parse_rational, InputError, J0Selection,
    JobConfig, OutputFormat, VerifyRequest,
};
pub use render::{parse_result, render_json, render_text, RESONANCE_BANNER};
pub use result::*;
pub use verify::{infer_catalog, verify_catalog, MATCH_TOLERANCE};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Input(InputError),
    /// `A` fails validation.
    Invalid(String),
    Engine(ahg_core::Error),
    Verify(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Input(e) => e.fmt(f),
            RunError::Invalid(msg) | RunError::Verify(msg) => f.write_str(msg),
            RunError::Engine(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for RunError {}

impl From<InputError> for RunError {
    fn from(e: InputError) -> Self {
        RunError::Input(e)
    }
}

impl From<ahg_core::Error> for RunError {
    fn from(e: ahg_core::Error) -> Self {
        RunError::Engine(e)
    }
}

/// Validates `A`, evaluates every requested `j0`, and runs the optional
/// non-degeneracy check and oracle comparison.
pub fn run(config: &JobConfig) -> Result<JobResult, RunError> {
    let indices = config.indices()?;
    let a = &config.a;
    let validation = validate_configuration(a);
    if let Some(msg) = validation.message() {
        return Err(RunError::Invalid(msg));
    }
    let delta = a.newton_polytope();
    let volume = normalized_volume(&delta);

    let mut results = Vec::with_capacity(indices.len());
    for &j0 in &indices {
        let report = monodromy_at_infinity(a, &config.c, j0)?.oriented(config.orientation);
        results.push(ReportEntry::new(&report, a.point(j0)?));
    }
    let nondegeneracy = match &config.z {
        Some(z) => Some(NondegeneracyEntry::from(&check_nondegeneracy(a, z)?)),
        None => None,
    };
    let verify = match &config.verify {
        Some(req) => {
            let id = match &req.catalog {
                Some(id) => id.clone(),
                None => infer_catalog(a).ok_or_else(|| {
                    RunError::Verify("A does not match any catalog system; pass a catalog id".into())
                })?,
            };
            Some(verify_catalog(config, &id, req)?)
        }
        None => None,
    };

    Ok(JobResult {
        input: InputEcho {
            a: a.points().iter().map(|p| point(p)).collect(),
            c: scalars(&config.c),
            j0: indices,
            orientation: config.orientation.into(),
            z: config.z.as_ref().map(scalars),
        },
        polytope: PolytopeSummary::new(&delta, &volume, &validation),
        results,
        nondegeneracy,
        verify,
        version: VERSION.to_string(),
    })
}
