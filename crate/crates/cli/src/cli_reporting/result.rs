//! Serializable job results.

use std::fmt;

use ahg_core::lattice_geometry::{Face, LatticePolytope, Point};
use ahg_core::monodromy_engine::{
    FaceCheck, FaceVerdict, FacetContribution, FacetPairing, MonodromyReport, NondegeneracyReport,
    Orientation, ParameterVector, ResonanceStatus, ResonanceVerdict, Scalar, ValidationReport,
};
use ahg_core::spectral_algebra::{signed_angle, Factor, UnitScalar};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An integer written as a JSON number when it fits in `i64`, otherwise as a
/// decimal string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Int(pub BigInt);

impl From<&BigInt> for Int {
    fn from(x: &BigInt) -> Self {
        Int(x.clone())
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
                v.parse().map(Int).map_err(E::custom)
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

pub type IntPoint = Vec<Int>;

pub(crate) fn point(p: &[BigInt]) -> IntPoint {
    p.iter().map(Int::from).collect()
}

fn points(ps: &[Point]) -> Vec<IntPoint> {
    ps.iter().map(|p| point(p)).collect()
}

/// `"p/q"` with an ASCII sign.
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

/// A parameter entry as it appears in the input: `"p/q"` or `{re, im}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarValue {
    Rational(String),
    Complex(ComplexValue),
}

impl From<&Scalar> for ScalarValue {
    fn from(s: &Scalar) -> Self {
        match s {
            Scalar::Exact(q) => ScalarValue::Rational(rational_string(q)),
            Scalar::Float(z) => ScalarValue::Complex((*z).into()),
        }
    }
}

pub(crate) fn scalars(v: &ParameterVector) -> Vec<ScalarValue> {
    (0..v.len()).map(|i| ScalarValue::from(&v.get(i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopDirection {
    Ccw,
    Cw,
}

impl From<Orientation> for LoopDirection {
    fn from(o: Orientation) -> Self {
        match o {
            Orientation::Ccw => LoopDirection::Ccw,
            Orientation::Cw => LoopDirection::Cw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    #[serde(rename = "A")]
    pub a: Vec<IntPoint>,
    pub c: Vec<ScalarValue>,
    pub j0: Vec<usize>,
    pub orientation: LoopDirection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<ScalarValue>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeSummary {
    pub n: usize,
    pub dim: usize,
    pub vertices: Vec<IntPoint>,
    pub normalized_volume: Int,
    pub lattice_divisors: Vec<Int>,
    pub generates_lattice: bool,
}

impl PolytopeSummary {
    pub(crate) fn new(delta: &LatticePolytope, volume: &BigInt, validation: &ValidationReport) -> Self {
        PolytopeSummary {
            n: validation.n,
            dim: delta.dim(),
            vertices: points(delta.vertices()),
            normalized_volume: volume.into(),
            lattice_divisors: validation.divisors.iter().map(Int::from).collect(),
            generates_lattice: validation.generates_lattice,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Multiplier {
    /// `e(q)`, `q` the signed representative in `[−1/2, 1/2)`.
    RationalAngle { q: String },
    Complex { re: f64, im: f64 },
}

impl From<&UnitScalar> for Multiplier {
    fn from(mu: &UnitScalar) -> Self {
        match mu {
            UnitScalar::Angle(q) => Multiplier::RationalAngle {
                q: rational_string(&signed_angle(q)),
            },
            UnitScalar::Complex(z) => Multiplier::Complex { re: z.re, im: z.im },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub h: u64,
    pub mu: Multiplier,
    pub mult: u64,
}

impl From<&Factor> for FactorEntry {
    fn from(f: &Factor) -> Self {
        FactorEntry {
            h: f.h,
            mu: (&f.mu).into(),
            mult: f.mult,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubFacetEntry {
    pub face: Vec<IntPoint>,
    pub rho: IntPoint,
    pub height: Int,
    pub vol_gamma_hat: Int,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionEntry {
    pub facet: Vec<IntPoint>,
    pub facet_normal: IntPoint,
    pub facet_offset: Int,
    pub vol_delta_hat: Int,
    pub sub_facets: Vec<SubFacetEntry>,
}

fn face_points(f: &Face) -> Vec<IntPoint> {
    points(&f.points)
}

impl From<&FacetContribution> for ContributionEntry {
    fn from(c: &FacetContribution) -> Self {
        ContributionEntry {
            facet: face_points(&c.facet),
            facet_normal: point(&c.facet_normal),
            facet_offset: (&c.facet_offset).into(),
            vol_delta_hat: (&c.vol_delta_hat).into(),
            sub_facets: c
                .sub_facets
                .iter()
                .map(|s| SubFacetEntry {
                    face: face_points(&s.face),
                    rho: point(&s.rho),
                    height: (&s.height).into(),
                    vol_gamma_hat: (&s.vol_gamma_hat).into(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub facet: Vec<IntPoint>,
    pub normal: IntPoint,
    pub pairing: ScalarValue,
    pub distance_to_integer: f64,
}

impl From<&FacetPairing> for PairingEntry {
    fn from(p: &FacetPairing) -> Self {
        PairingEntry {
            facet: points(&p.facet),
            normal: point(&p.normal),
            pairing: (&p.pairing).into(),
            distance_to_integer: p.distance_to_integer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceState {
    NonResonant,
    Resonant,
    NearIntegerWarning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEntry {
    pub status: ResonanceState,
    pub witness: Option<PairingEntry>,
    pub warnings: Vec<PairingEntry>,
    pub checked: Vec<PairingEntry>,
}

impl From<&ResonanceVerdict> for ResonanceEntry {
    fn from(v: &ResonanceVerdict) -> Self {
        ResonanceEntry {
            status: match v.status {
                ResonanceStatus::NonResonant => ResonanceState::NonResonant,
                ResonanceStatus::Resonant => ResonanceState::Resonant,
                ResonanceStatus::NearIntegerWarning => ResonanceState::NearIntegerWarning,
            },
            witness: v.witness.as_ref().map(Into::into),
            warnings: v.warnings.iter().map(Into::into).collect(),
            checked: v.checked.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub j0: usize,
    pub point: IntPoint,
    pub degree: u64,
    pub factors: Vec<FactorEntry>,
    pub char_poly: String,
    pub t_minus_one_exponent: Int,
    pub contributions: Vec<ContributionEntry>,
    pub resonance: ResonanceEntry,
    pub theorem_hypotheses_met: bool,
    pub orientation: LoopDirection,
}

impl ReportEntry {
    pub(crate) fn new(report: &MonodromyReport, a_j0: &[BigInt]) -> Self {
        ReportEntry {
            j0: report.j0,
            point: point(a_j0),
            degree: report.degree,
            factors: report.char_poly.factors().iter().map(Into::into).collect(),
            char_poly: report.char_poly.to_string(),
            t_minus_one_exponent: (&report.t_minus_one_exponent).into(),
            contributions: report.contributions.iter().map(Into::into).collect(),
            resonance: (&report.resonance).into(),
            theorem_hypotheses_met: report.theorem_hypotheses_met,
            orientation: report.orientation.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum FaceStatus {
    Nondegenerate,
    Degenerate(String),
    Unchecked(String),
}

impl From<&FaceVerdict> for FaceStatus {
    fn from(v: &FaceVerdict) -> Self {
        match v {
            FaceVerdict::Nondegenerate => FaceStatus::Nondegenerate,
            FaceVerdict::Degenerate(s) => FaceStatus::Degenerate(s.clone()),
            FaceVerdict::Unchecked(s) => FaceStatus::Unchecked(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceEntry {
    pub vertices: Vec<IntPoint>,
    pub dim: usize,
    pub members: Vec<usize>,
    pub verdict: FaceStatus,
}

impl From<&FaceCheck> for FaceEntry {
    fn from(f: &FaceCheck) -> Self {
        FaceEntry {
            vertices: points(&f.vertices),
            dim: f.dim,
            members: f.members.clone(),
            verdict: (&f.verdict).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyEntry {
    pub overall: FaceStatus,
    pub faces: Vec<FaceEntry>,
}

impl From<&NondegeneracyReport> for NondegeneracyEntry {
    fn from(r: &NondegeneracyReport) -> Self {
        NondegeneracyEntry {
            overall: (&r.overall).into(),
            faces: r.faces.iter().map(Into::into).collect(),
        }
    }
}

/// Engine roots against the numerically transported loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub catalog: String,
    pub j0: usize,
    pub orientation: LoopDirection,
    pub radius: f64,
    pub tol: f64,
    pub frozen: Vec<ComplexValue>,
    pub reduction_residual: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub engine_char_poly: String,
    pub engine_roots: Vec<ComplexValue>,
    pub numeric_eigenvalues: Vec<ComplexValue>,
    pub max_distance: Option<f64>,
    pub match_tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobResult {
    pub input: InputEcho,
    pub polytope: PolytopeSummary,
    pub results: Vec<ReportEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nondegeneracy: Option<NondegeneracyEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyEntry>,
    pub version: String,
}

impl JobResult {
    /// 3 on a failed oracle comparison, otherwise 0.
    pub fn exit_code(&self) -> i32 {
        match &self.verify {
            Some(v) if !v.passed => 3,
            _ => 0,
        }
    }

    pub fn any_resonant(&self) -> bool {
        self.results
            .iter()
            .any(|r| r.resonance.status == ResonanceState::Resonant)
    }
}
