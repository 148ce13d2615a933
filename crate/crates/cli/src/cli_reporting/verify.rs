use ahg_core::monodromy_engine::{monodromy_at_infinity, PointConfiguration};
use ahg_core::ode_oracle::{
    catalog_configuration, catalog_system, numeric_monodromy, numeric_spectrum, LoopSpec,
    CATALOG_IDS, DEFAULT_TOLERANCE,
};
use ahg_core::spectral_algebra::compare_spectra;

use super::config::{JobConfig, VerifyRequest};
use super::render::fmt_point;
use super::result::{point, ComplexValue, VerifyEntry};
use super::RunError;

/// Spectra of the engine and the integrated loop must agree this closely.
pub const MATCH_TOLERANCE: f64 = 1e-6;

/// The catalog entry whose configuration is exactly `a`, point order included.
pub fn infer_catalog(a: &PointConfiguration) -> Option<String> {
    CATALOG_IDS
        .iter()
        .find(|id| catalog_configuration(id).is_ok_and(|(cat, _)| cat.points() == a.points()))
        .map(|id| id.to_string())
}

pub fn verify_catalog(config: &JobConfig, id: &str, req: &VerifyRequest) -> Result<VerifyEntry, RunError> {
    let (cat, j0) = catalog_configuration(id)?;
    if cat.points() != config.a.points() {
        return Err(RunError::Verify(format!(
            "catalog system `{id}` restricts A = {{{}}}, which differs from the input A",
            cat.points().iter().map(|p| fmt_point(&point(p))).collect::<Vec<_>>().join(", ")
        )));
    }
    let sys = catalog_system(id, &config.c, req.frozen.as_deref())?;
    let report = monodromy_at_infinity(&config.a, &config.c, j0)?.oriented(config.orientation);
    let spec = LoopSpec {
        radius: req.radius,
        tol: req.tol.unwrap_or(DEFAULT_TOLERANCE),
        orientation: config.orientation,
        ..LoopSpec::default()
    };
    let m = numeric_monodromy(&sys, &spec)?;
    let numeric = numeric_spectrum(&m);
    let engine = report.char_poly.roots();
    let cmp = compare_spectra(&numeric, &engine, MATCH_TOLERANCE);
    let values = |pts: Vec<num_complex::Complex64>| pts.into_iter().map(ComplexValue::from).collect();
    Ok(VerifyEntry {
        catalog: id.to_string(),
        j0,
        orientation: config.orientation.into(),
        radius: m.stats.radius,
        tol: spec.tol,
        frozen: sys.frozen.iter().map(|z| ComplexValue::from(*z)).collect(),
        reduction_residual: sys.residual,
        accepted_steps: m.stats.accepted,
        rejected_steps: m.stats.rejected,
        engine_char_poly: report.char_poly.to_string(),
        engine_roots: values(engine.points()),
        numeric_eigenvalues: values(numeric.points()),
        max_distance: cmp.max_distance,
        match_tolerance: MATCH_TOLERANCE,
        passed: cmp.passed,
    })
}
