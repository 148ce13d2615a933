//! Characteristic polynomial of the monodromy at infinity.
//!
//! For a point configuration `A ⊂ Z^n` generating the lattice, a parameter
//! `c` and a distinguished point `a = a(j0)`, let `Δ = conv(A ∪ {0})`. For
//! every facet `Δ_i` of `Δ` that contains `a` but not the origin, and every
//! facet `Γ_ij` of `Δ_i` that avoids `a`, the cone `Γ̂_ij = conv({0} ∪ Γ_ij)`
//! is a facet of `Δ̂_i = conv({0} ∪ Δ_i)` with primitive inner conormal
//! `ρ_ij`. With `h_ij = ⟨ρ_ij, a⟩`,
//!
//! ```text
//! λ(t) = ∏_{i,j} (t^{h_ij} − e(−⟨ρ_ij, c⟩))^{Vol(Γ̂_ij)} · (t − 1)^{Vol(Δ) − Σ_i Vol(Δ̂_i)}
//! ```
//!
//! where `e(q) = exp(2πi·q)` and volumes are normalized lattice volumes. The
//! loop is one counterclockwise turn of `z_{j0}` on a large circle.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::integer_linalg::{dot, smith_normal_form, IntMatrix, IntVector};
use crate::lattice_geometry::{
    convex_hull, faces_of_codim_one, inner_conormal, is_origin, lattice_height, normalized_volume,
    Face, LatticePolytope, Point,
};
use crate::numeric_linalg::{characteristic_polynomial, CMatrix};
use crate::spectral_algebra::{make_factor, product, Factor, FactoredCharPoly, UnitScalar};

/// Float-mode pairings closer than this to an integer count as resonant.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Float-mode pairings closer than this (but not resonant) raise a warning.
pub const RESONANCE_WARNING_BAND: f64 = 1e-6;
/// Coefficient tolerance of the Φ₁ characteristic polynomial identity.
pub const PHI1_COEFF_TOL: f64 = 1e-10;
/// Relative threshold of the numeric discriminant test.
pub const DISCRIMINANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfiguration {
    n: usize,
    points: Vec<Point>,
}

impl PointConfiguration {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let n = points.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidConfiguration(
                "A needs at least one point of positive dimension".into(),
            ));
        }
        if let Some(bad) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(PointConfiguration { n, points })
    }

    pub fn from_i64(points: &[&[i64]]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|p| p.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The `j`-th point, 1-based.
    pub fn point(&self, j: usize) -> Result<&Point> {
        if j == 0 || j > self.points.len() {
            return Err(Error::IndexOutOfRange {
                j0: j,
                n: self.points.len(),
            });
        }
        Ok(&self.points[j - 1])
    }

    /// The `n × N` matrix whose columns are the points.
    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(&self.points).expect("nonempty configuration")
    }

    /// `Δ = conv(A ∪ {0})`.
    pub fn newton_polytope(&self) -> LatticePolytope {
        let mut pts = self.points.clone();
        pts.push(vec![BigInt::zero(); self.n]);
        convex_hull(&pts)
    }

    pub fn transformed(&self, u: &IntMatrix) -> Self {
        PointConfiguration {
            n: self.n,
            points: self.points.iter().map(|p| u.mul_vector(p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub divisors: Vec<BigInt>,
    pub generates_lattice: bool,
    pub dim_delta: usize,
    pub n: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.generates_lattice && self.dim_delta == self.n
    }

    pub fn message(&self) -> Option<String> {
        if !self.generates_lattice {
            let divs: Vec<String> = self.divisors.iter().map(ToString::to_string).collect();
            return Some(format!(
                "A does not generate Z^n (divisors: [{}])",
                divs.join(", ")
            ));
        }
        (self.dim_delta != self.n).then(|| {
            format!(
                "conv(A ∪ {{0}}) has dimension {} < {}",
                self.dim_delta, self.n
            )
        })
    }
}

pub fn validate_configuration(a: &PointConfiguration) -> ValidationReport {
    let snf = smith_normal_form(&a.matrix());
    let generates_lattice = snf.divisors.len() == a.n() && snf.divisors.iter().all(One::is_one);
    ValidationReport {
        divisors: snf.divisors,
        generates_lattice,
        dim_delta: a.newton_polytope().dim(),
        n: a.n(),
    }
}

/// A vector of scalars that are either all exact rationals or all complex
/// floats. Used for the parameter `c` and for coefficient vectors `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParameterVector {
    Exact(Vec<BigRational>),
    Float(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(Complex64),
}

impl Scalar {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
            Scalar::Float(z) => *z,
        }
    }
}

impl ParameterVector {
    pub fn from_scalars(entries: Vec<Scalar>) -> Result<Self> {
        if entries.iter().all(|e| matches!(e, Scalar::Exact(_))) {
            Ok(ParameterVector::Exact(
                entries
                    .into_iter()
                    .map(|e| match e {
                        Scalar::Exact(q) => q,
                        Scalar::Float(_) => unreachable!(),
                    })
                    .collect(),
            ))
        } else if entries.iter().all(|e| matches!(e, Scalar::Float(_))) {
            Ok(ParameterVector::Float(
                entries.iter().map(Scalar::to_complex).collect(),
            ))
        } else {
            Err(Error::MixedParameterModes)
        }
    }

    /// Exact vector from `(numerator, denominator)` pairs.
    pub fn rational(entries: &[(i64, i64)]) -> Self {
        ParameterVector::Exact(
            entries
                .iter()
                .map(|&(p, q)| BigRational::new(p.into(), q.into()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        match self {
            ParameterVector::Exact(v) => v.len(),
            ParameterVector::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ParameterVector::Exact(_))
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self {
            ParameterVector::Exact(v) => Scalar::Exact(v[i].clone()),
            ParameterVector::Float(v) => Scalar::Float(v[i]),
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.get(i).to_complex()).collect()
    }

    /// `⟨ρ, c⟩`
    pub fn pair(&self, rho: &[BigInt]) -> Scalar {
        match self {
            ParameterVector::Exact(v) => Scalar::Exact(
                v.iter()
                    .zip(rho)
                    .map(|(c, r)| c * r)
                    .fold(BigRational::zero(), |a, b| a + b),
            ),
            ParameterVector::Float(v) => Scalar::Float(
                v.iter()
                    .zip(rho)
                    .map(|(c, r)| c * r.to_f64().unwrap_or(f64::NAN))
                    .sum(),
            ),
        }
    }

    /// `U·c`, for equivariance checks.
    pub fn transformed(&self, u: &IntMatrix) -> Self {
        match self {
            ParameterVector::Exact(v) => ParameterVector::Exact(
                (0..u.rows())
                    .map(|r| {
                        (0..u.cols())
                            .map(|k| &v[k] * &u[(r, k)])
                            .fold(BigRational::zero(), |a, b| a + b)
                    })
                    .collect(),
            ),
            ParameterVector::Float(v) => ParameterVector::Float(
                (0..u.rows())
                    .map(|r| {
                        (0..u.cols())
                            .map(|k| v[k] * u[(r, k)].to_f64().unwrap_or(f64::NAN))
                            .sum()
                    })
                    .collect(),
            ),
        }
    }
}

/// Multiplier `e(−s)` for a pairing `s = ⟨ρ, c⟩`.
fn multiplier(s: &Scalar) -> UnitScalar {
    match s {
        Scalar::Exact(q) => UnitScalar::angle(-q),
        Scalar::Float(z) => UnitScalar::Complex((Complex64::new(0.0, -TAU) * z).exp()),
    }
}

/// Distance of a complex number to the nearest integer.
fn distance_to_integer(z: Complex64) -> f64 {
    Complex64::new(z.re - z.re.round(), z.im).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceStatus {
    NonResonant,
    Resonant,
    /// Float mode only: no pairing is within the resonance tolerance but at
    /// least one lies in the warning band.
    NearIntegerWarning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetPairing {
    /// Vertices of the facet through the origin.
    pub facet: Vec<Point>,
    pub normal: IntVector,
    pub pairing: Scalar,
    /// `0` for exact integral pairings, otherwise the distance to `Z`.
    pub distance_to_integer: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceVerdict {
    pub status: ResonanceStatus,
    /// First resonant facet in canonical order, if any.
    pub witness: Option<FacetPairing>,
    /// Float-mode pairings in the warning band.
    pub warnings: Vec<FacetPairing>,
    pub checked: Vec<FacetPairing>,
}

impl ResonanceVerdict {
    pub fn is_resonant(&self) -> bool {
        self.status == ResonanceStatus::Resonant
    }
}

/// Tests `⟨ρ_Γ, c⟩ ∉ Z` for every facet `Γ` of `Δ` through the origin,
/// which is equivalent to `c ∉ Z^n + Lin(Γ)` since `ρ_Γ` is primitive.
pub fn check_nonresonance(a: &PointConfiguration, c: &ParameterVector) -> Result<ResonanceVerdict> {
    if c.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: c.len(),
        });
    }
    let delta = full_dimensional_delta(a)?;
    let mut checked = Vec::new();
    for f in delta.facets() {
        if !f.offset.is_zero() || f.incident.is_empty() {
            continue;
        }
        let pairing = c.pair(&f.normal);
        let distance = match &pairing {
            Scalar::Exact(q) => {
                if q.is_integer() {
                    0.0
                } else {
                    let frac = q - q.floor();
                    frac.to_f64()
                        .unwrap_or(0.5)
                        .min(1.0 - frac.to_f64().unwrap_or(0.5))
                }
            }
            Scalar::Float(z) => distance_to_integer(*z),
        };
        checked.push(FacetPairing {
            facet: f
                .incident
                .iter()
                .map(|&i| delta.vertices()[i].clone())
                .collect(),
            normal: f.normal.clone(),
            pairing,
            distance_to_integer: distance,
        });
    }
    let resonant = |p: &FacetPairing| match &p.pairing {
        Scalar::Exact(q) => q.is_integer(),
        Scalar::Float(_) => p.distance_to_integer < RESONANCE_TOL,
    };
    let witness = checked.iter().find(|p| resonant(p)).cloned();
    let warnings: Vec<FacetPairing> = checked
        .iter()
        .filter(|p| {
            matches!(p.pairing, Scalar::Float(_))
                && !resonant(p)
                && p.distance_to_integer < RESONANCE_WARNING_BAND
        })
        .cloned()
        .collect();
    let status = if witness.is_some() {
        ResonanceStatus::Resonant
    } else if !warnings.is_empty() {
        ResonanceStatus::NearIntegerWarning
    } else {
        ResonanceStatus::NonResonant
    };
    Ok(ResonanceVerdict {
        status,
        witness,
        warnings,
        checked,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubFacetContribution {
    /// `Γ_ij`, possibly the empty face when `Δ_i` is a point.
    pub face: Face,
    /// `Γ̂_ij = conv({0} ∪ Γ_ij)`
    pub cone: Face,
    pub rho: IntVector,
    pub height: BigInt,
    pub vol_gamma_hat: BigInt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetContribution {
    /// `Δ_i`
    pub facet: Face,
    /// Inner conormal and offset of `Δ_i` in `Δ`.
    pub facet_normal: IntVector,
    pub facet_offset: BigInt,
    pub sub_facets: Vec<SubFacetContribution>,
    pub vol_delta_hat: BigInt,
}

impl FacetContribution {
    /// `Σ_j h_ij · Vol(Γ̂_ij)`
    pub fn pyramid_sum(&self) -> BigInt {
        self.sub_facets
            .iter()
            .map(|s| &s.height * &s.vol_gamma_hat)
            .sum()
    }
}

fn full_dimensional_delta(a: &PointConfiguration) -> Result<LatticePolytope> {
    let delta = a.newton_polytope();
    if !delta.is_full_dimensional() {
        return Err(Error::InvalidConfiguration(format!(
            "conv(A ∪ {{0}}) has dimension {} < {}",
            delta.dim(),
            a.n()
        )));
    }
    Ok(delta)
}

fn with_origin(points: &[Point]) -> Vec<Point> {
    let mut out = points.to_vec();
    if let Some(p) = points.first() {
        out.push(vec![BigInt::zero(); p.len()]);
    }
    out
}

pub fn relevant_facet_data(a: &PointConfiguration, j0: usize) -> Result<Vec<FacetContribution>> {
    let target = a.point(j0)?.clone();
    let delta = full_dimensional_delta(a)?;
    let n = a.n();
    let origin = vec![BigInt::zero(); n];
    let mut out = Vec::new();

    for facet in delta.facets() {
        if !facet.offset.is_negative() || dot(&facet.normal, &target) != facet.offset {
            continue;
        }
        let delta_i = delta.face(&facet.incident);
        let delta_i_poly = delta_i.polytope();
        let target_chart = delta_i_poly
            .chart()
            .to_chart(&target)
            .expect("a(j0) lies on the facet");
        let mut cone_points = delta_i.points.clone();
        cone_points.push(origin.clone());
        let delta_hat = convex_hull(&cone_points);

        let mut sub_facets = Vec::new();
        for (gamma, gdata) in faces_of_codim_one(&delta_i_poly)
            .into_iter()
            .zip(delta_i_poly.facets())
        {
            if !gamma.is_empty() && dot(&gdata.normal, &target_chart) == gdata.offset {
                continue;
            }
            let cone = Face::from_points(with_origin_or_point(&gamma.points, &origin));
            let (rho, offset) = inner_conormal(&delta_hat, &cone)?;
            assert!(offset.is_zero(), "cone facet passes through the origin");
            let height = lattice_height(&rho, &offset, &target);
            assert!(height.is_positive(), "a(j0) lies strictly above Γ̂_ij");
            sub_facets.push(SubFacetContribution {
                vol_gamma_hat: cone.normalized_volume(),
                face: gamma,
                cone,
                rho,
                height,
            });
        }
        let contribution = FacetContribution {
            facet: delta_i,
            facet_normal: facet.normal.clone(),
            facet_offset: facet.offset.clone(),
            sub_facets,
            vol_delta_hat: normalized_volume(&delta_hat),
        };
        assert_eq!(
            contribution.pyramid_sum(),
            contribution.vol_delta_hat,
            "pyramid identity Σ h·Vol(Γ̂) = Vol(Δ̂)"
        );
        out.push(contribution);
    }
    Ok(out)
}

fn with_origin_or_point(points: &[Point], origin: &Point) -> Vec<Point> {
    if points.is_empty() {
        vec![origin.clone()]
    } else {
        with_origin(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Ccw,
    Cw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyReport {
    pub j0: usize,
    pub char_poly: FactoredCharPoly,
    pub contributions: Vec<FacetContribution>,
    pub volume_delta: BigInt,
    pub t_minus_one_exponent: BigInt,
    pub degree: u64,
    pub resonance: ResonanceVerdict,
    pub validation: ValidationReport,
    /// `A` generates `Z^n` and `c` is non-resonant.
    pub theorem_hypotheses_met: bool,
    pub orientation: Orientation,
}

impl MonodromyReport {
    /// Re-expresses the report for the given loop direction; the clockwise
    /// loop has the conjugate multipliers.
    pub fn oriented(mut self, orientation: Orientation) -> Self {
        if orientation != self.orientation {
            self.char_poly = self.char_poly.conjugate();
            self.orientation = orientation;
        }
        self
    }
}

fn to_u64(x: &BigInt) -> u64 {
    x.to_u64()
        .expect("lattice volumes fit in u64 at this scale")
}

pub fn monodromy_at_infinity(
    a: &PointConfiguration,
    c: &ParameterVector,
    j0: usize,
) -> Result<MonodromyReport> {
    a.point(j0)?;
    let validation = validate_configuration(a);
    if validation.dim_delta != a.n() {
        return Err(Error::InvalidConfiguration(
            validation.message().unwrap_or_default(),
        ));
    }
    let resonance = check_nonresonance(a, c)?;
    let contributions = relevant_facet_data(a, j0)?;
    let volume_delta = normalized_volume(&a.newton_polytope());
    let cones: BigInt = contributions.iter().map(|c| &c.vol_delta_hat).sum();
    let t_minus_one_exponent = &volume_delta - cones;
    assert!(
        !t_minus_one_exponent.is_negative(),
        "Vol(Δ) dominates the cones over the relevant facets"
    );

    let mut factors: Vec<Factor> = Vec::new();
    for contribution in &contributions {
        for sub in &contribution.sub_facets {
            factors.push(make_factor(
                to_u64(&sub.height),
                multiplier(&c.pair(&sub.rho)),
                to_u64(&sub.vol_gamma_hat),
            )?);
        }
    }
    if t_minus_one_exponent.is_positive() {
        factors.push(make_factor(
            1,
            UnitScalar::one(),
            to_u64(&t_minus_one_exponent),
        )?);
    }
    let char_poly = product(factors);
    let degree = char_poly.degree();
    assert_eq!(
        BigInt::from(degree),
        volume_delta,
        "degree of λ equals Vol(Δ)"
    );
    Ok(MonodromyReport {
        j0,
        char_poly,
        contributions,
        volume_delta,
        t_minus_one_exponent,
        degree,
        theorem_hypotheses_met: !resonance.is_resonant() && validation.generates_lattice,
        resonance,
        validation,
        orientation: Orientation::Ccw,
    })
}

/// `m = h·{m}_h + [m]_h` with `1 ≤ [m]_h ≤ h`; returns `({m}_h, [m]_h)`.
pub fn split_index(m: i64, h: i64) -> (i64, i64) {
    let rem = (m - 1).rem_euclid(h) + 1;
    ((m - rem) / h, rem)
}

#[derive(Debug, Clone)]
pub struct Phi1Matrices {
    pub k: CMatrix,
    /// Block companion matrix of size `h·d1`.
    pub l: CMatrix,
    /// `L` rebuilt from the action on the basis `δ_{ij}`.
    pub index_map: CMatrix,
    pub max_disagreement: f64,
}

fn phi1_epsilons(c: &ParameterVector) -> Result<(UnitScalar, UnitScalar)> {
    if c.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: c.len(),
        });
    }
    let eps = |s: Scalar, sign: i64| match s {
        Scalar::Exact(q) => UnitScalar::angle(q * BigInt::from(sign)),
        Scalar::Float(z) => UnitScalar::Complex((Complex64::new(0.0, TAU * sign as f64) * z).exp()),
    };
    Ok((eps(c.get(0), 1), eps(c.get(1), -1)))
}

/// Monodromy matrices on one figure-8 block: `K = ε₁·Cyc^p` where `Cyc` has
/// `ε₂` in the top-right corner and `I_{h−1}` below the diagonal, and the
/// block companion `L` with `K` in the top-right block. Here
/// `ε₁ = e(c₁)`, `ε₂ = e(−c₂)`.
pub fn phi1_matrix(p: i64, h: usize, d1: usize, c: &ParameterVector) -> Result<Phi1Matrices> {
    assert!(h >= 1 && d1 >= 1, "block sizes must be positive");
    let (e1, e2) = phi1_epsilons(c)?;
    let (eps1, eps2) = (e1.to_complex(), e2.to_complex());
    let one = Complex64::new(1.0, 0.0);

    let mut cyc = CMatrix::zeros(h, h);
    cyc[(0, h - 1)] = eps2;
    for i in 1..h {
        cyc[(i, i - 1)] = one;
    }
    let base = if p >= 0 {
        cyc
    } else {
        let mut inv = CMatrix::zeros(h, h);
        inv[(h - 1, 0)] = one / eps2;
        for i in 1..h {
            inv[(i - 1, i)] = one;
        }
        inv
    };
    let mut power = CMatrix::identity(h, h);
    for _ in 0..p.unsigned_abs() {
        power = &power * &base;
    }
    let k = power * eps1;

    let size = h * d1;
    let mut l = CMatrix::zeros(size, size);
    l.view_mut((0, (d1 - 1) * h), (h, h)).copy_from(&k);
    for block in 1..d1 {
        for i in 0..h {
            l[(block * h + i, (block - 1) * h + i)] = one;
        }
    }

    // δ_{ij} ↦ δ_{i+1,j} for i < d1; δ_{d1,j} ↦ ε₁·ε₂^{{j+p}_h}·δ_{1,[j+p]_h}
    let idx = |i: usize, j: usize| (i - 1) * h + (j - 1);
    let mut index_map = CMatrix::zeros(size, size);
    for i in 1..=d1 {
        for j in 1..=h {
            if i < d1 {
                index_map[(idx(i + 1, j), idx(i, j))] = one;
            } else {
                let (wraps, target) = split_index(j as i64 + p, h as i64);
                index_map[(idx(1, target as usize), idx(i, j))] = eps1 * eps2.powi(wraps as i32);
            }
        }
    }
    let max_disagreement = l
        .iter()
        .zip(index_map.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(Phi1Matrices {
        k,
        l,
        index_map,
        max_disagreement,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phi1Verdict {
    pub passed: bool,
    pub max_coefficient_error: f64,
    pub matrix_disagreement: f64,
    /// `∏_{ζ^h = ε₂} (t^{d1} − ε₁ζ^p)` in factored form.
    pub zeta_product: FactoredCharPoly,
}

/// Compares `det(t − L)` with `∏_{ζ^h = ε₂} (t^{d1} − ε₁ζ^p)`.
pub fn phi1_charpoly_identity(
    p: i64,
    h: usize,
    d1: usize,
    c: &ParameterVector,
) -> Result<Phi1Verdict> {
    let mats = phi1_matrix(p, h, d1, c)?;
    let (e1, e2) = phi1_epsilons(c)?;
    let factors = e2.roots(h as u64).into_iter().map(|zeta| {
        let mu = match (&e1, &zeta) {
            (UnitScalar::Angle(a), UnitScalar::Angle(z)) => {
                UnitScalar::angle(a + z * BigInt::from(p))
            }
            _ => UnitScalar::Complex(e1.to_complex() * zeta.to_complex().powi(p as i32)),
        };
        make_factor(d1 as u64, mu, 1).expect("positive block sizes")
    });
    let zeta_product = product(factors);
    let expected = zeta_product.expand();
    let actual = characteristic_polynomial(&mats.l);
    let max_coefficient_error = expected
        .iter()
        .zip(&actual)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(Phi1Verdict {
        passed: expected.len() == actual.len()
            && max_coefficient_error <= PHI1_COEFF_TOL
            && mats.max_disagreement <= PHI1_COEFF_TOL,
        max_coefficient_error,
        matrix_disagreement: mats.max_disagreement,
        zeta_product,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum FaceVerdict {
    Nondegenerate,
    Degenerate(String),
    Unchecked(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceCheck {
    pub vertices: Vec<Point>,
    pub dim: usize,
    /// 1-based indices of the points of `A` lying on the face.
    pub members: Vec<usize>,
    pub verdict: FaceVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NondegeneracyReport {
    pub faces: Vec<FaceCheck>,
    pub overall: FaceVerdict,
}

/// Checks the face conditions of `h_z(x) = Σ z_j x^{a(j)}` on every face of
/// `Δ` avoiding the origin. Faces of dimension ≥ 2 are reported unchecked.
pub fn check_nondegeneracy(
    a: &PointConfiguration,
    z: &ParameterVector,
) -> Result<NondegeneracyReport> {
    if z.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: z.len(),
        });
    }
    let delta = a.newton_polytope();
    let mut faces = Vec::new();
    for face in delta.proper_faces() {
        if face.points.iter().any(|p| is_origin(p)) {
            continue;
        }
        let poly = face.polytope();
        let members: Vec<usize> = (0..a.len())
            .filter(|&j| poly.contains(&a.points()[j]))
            .collect();
        let dim = poly.dim();
        let verdict = match dim {
            0 => vertex_verdict(z, &members),
            1 => edge_verdict(&poly, a, z, &members),
            _ => FaceVerdict::Unchecked(format!(
                "{dim}-dimensional face: emptiness of the critical locus needs elimination"
            )),
        };
        faces.push(FaceCheck {
            vertices: face.points.clone(),
            dim,
            members: members.iter().map(|j| j + 1).collect(),
            verdict,
        });
    }
    let overall = if let Some(bad) = faces
        .iter()
        .find(|f| matches!(f.verdict, FaceVerdict::Degenerate(_)))
    {
        bad.verdict.clone()
    } else if faces
        .iter()
        .any(|f| matches!(f.verdict, FaceVerdict::Unchecked(_)))
    {
        FaceVerdict::Unchecked("some faces of dimension ≥ 2 were not checked".into())
    } else {
        FaceVerdict::Nondegenerate
    };
    Ok(NondegeneracyReport { faces, overall })
}

fn vertex_verdict(z: &ParameterVector, members: &[usize]) -> FaceVerdict {
    let vanishes = match z {
        ParameterVector::Exact(v) => members
            .iter()
            .map(|&j| v[j].clone())
            .fold(BigRational::zero(), |a, b| a + b)
            .is_zero(),
        ParameterVector::Float(v) => {
            members.iter().map(|&j| v[j]).sum::<Complex64>().norm() <= DISCRIMINANT_TOL
        }
    };
    if vanishes {
        FaceVerdict::Degenerate("vertex coefficient vanishes".into())
    } else {
        FaceVerdict::Nondegenerate
    }
}

/// On an edge, `h_z^Γ = x^{anchor}·g(s)` with `s` the monomial of the
/// primitive edge direction; nondegenerate iff `g` has no repeated root in C*.
fn edge_verdict(
    edge: &LatticePolytope,
    a: &PointConfiguration,
    z: &ParameterVector,
    members: &[usize],
) -> FaceVerdict {
    let positions: Vec<i64> = members
        .iter()
        .map(|&j| {
            edge.chart()
                .to_chart(&a.points()[j])
                .and_then(|y| y[0].to_i64())
                .expect("edge points have small chart coordinates")
        })
        .collect();
    let lo = positions.iter().copied().min().unwrap_or(0);
    let deg = positions.iter().map(|p| p - lo).max().unwrap_or(0) as usize;
    match z {
        ParameterVector::Exact(v) => {
            let mut g = vec![BigRational::zero(); deg + 1];
            for (&j, &p) in members.iter().zip(&positions) {
                g[(p - lo) as usize] += &v[j];
            }
            let g = strip_rational(g);
            if g.is_empty() {
                return FaceVerdict::Degenerate("edge polynomial vanishes identically".into());
            }
            let dg = derivative_rational(&g);
            if gcd_rational(g, dg).len() > 1 {
                FaceVerdict::Degenerate("edge polynomial has a repeated root in C*".into())
            } else {
                FaceVerdict::Nondegenerate
            }
        }
        ParameterVector::Float(v) => {
            let mut g = vec![Complex64::zero(); deg + 1];
            for (&j, &p) in members.iter().zip(&positions) {
                g[(p - lo) as usize] += v[j];
            }
            let scale = g.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if scale <= DISCRIMINANT_TOL {
                return FaceVerdict::Degenerate("edge polynomial vanishes identically".into());
            }
            let g: Vec<Complex64> = g.into_iter().map(|c| c / scale).collect();
            let g = strip_complex(g);
            if g.len() <= 2 {
                return FaceVerdict::Nondegenerate;
            }
            let disc = normalized_discriminant(&g);
            if disc <= DISCRIMINANT_TOL {
                FaceVerdict::Degenerate(format!(
                    "edge polynomial has a (numerically) repeated root, |disc| = {disc:.3e}"
                ))
            } else {
                FaceVerdict::Nondegenerate
            }
        }
    }
}

/// Drops low-order zero coefficients (powers of `s`) and high-order zeros.
/// Coefficients are indexed by degree.
fn strip_rational(mut g: Vec<BigRational>) -> Vec<BigRational> {
    while g.last().is_some_and(Zero::is_zero) {
        g.pop();
    }
    let first = g.iter().position(|c| !c.is_zero()).unwrap_or(g.len());
    g.drain(..first);
    g
}

fn strip_complex(mut g: Vec<Complex64>) -> Vec<Complex64> {
    while g.last().is_some_and(|c| c.norm() <= DISCRIMINANT_TOL) {
        g.pop();
    }
    let first = g
        .iter()
        .position(|c| c.norm() > DISCRIMINANT_TOL)
        .unwrap_or(g.len());
    g.drain(..first);
    g
}

fn derivative_rational(g: &[BigRational]) -> Vec<BigRational> {
    g.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigInt::from(k))
        .collect()
}

/// Remainder of `a` by `b` (coefficients by degree, `b` nonzero leading).
fn rem_rational(mut a: Vec<BigRational>, b: &[BigRational]) -> Vec<BigRational> {
    let lead = b.last().expect("nonzero divisor").clone();
    while a.len() >= b.len() && !a.is_empty() {
        let shift = a.len() - b.len();
        let q = a.last().expect("nonempty") / &lead;
        for (k, c) in b.iter().enumerate() {
            a[shift + k] -= &q * c;
        }
        a.pop();
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
    }
    a
}

fn gcd_rational(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    while b.last().is_some_and(Zero::is_zero) {
        b.pop();
    }
    while !b.is_empty() {
        let r = rem_rational(a, &b);
        a = b;
        b = r;
    }
    a
}

/// `|Res(g, g')| / |lead|` for `g` scaled to unit max-coefficient, via the
/// Sylvester matrix determinant.
fn normalized_discriminant(g: &[Complex64]) -> f64 {
    let n = g.len() - 1;
    let dg: Vec<Complex64> = g
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let size = 2 * n - 1;
    let mut syl = CMatrix::zeros(size, size);
    // rows: n−1 shifts of g, n shifts of g'; highest degree first
    for r in 0..n - 1 {
        for (k, c) in g.iter().rev().enumerate() {
            syl[(r, r + k)] = *c;
        }
    }
    for r in 0..n {
        for (k, c) in dg.iter().rev().enumerate() {
            syl[(n - 1 + r, r + k)] = *c;
        }
    }
    syl.determinant().norm() / g[n].norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integer_linalg::int_vector;

    fn square() -> PointConfiguration {
        PointConfiguration::from_i64(&[&[1, 0], &[0, 1], &[1, 1]]).unwrap()
    }

    fn third_fifth() -> ParameterVector {
        ParameterVector::rational(&[(1, 3), (1, 5)])
    }

    fn factor(h: u64, num: i64, den: i64, mult: u64) -> Factor {
        make_factor(h, UnitScalar::angle_of(num, den), mult).unwrap()
    }

    #[test]
    fn validation_examples() {
        let v = validate_configuration(&square());
        assert!(v.passed());
        assert_eq!(v.divisors, int_vector(&[1, 1]));

        let two = validate_configuration(&PointConfiguration::from_i64(&[&[2]]).unwrap());
        assert!(!two.passed());
        assert_eq!(two.divisors, int_vector(&[2]));
        assert_eq!(
            two.message().unwrap(),
            "A does not generate Z^n (divisors: [2])"
        );

        let flat =
            validate_configuration(&PointConfiguration::from_i64(&[&[1, 0], &[2, 0]]).unwrap());
        assert!(!flat.passed());
        assert_eq!(flat.dim_delta, 1);
    }

    #[test]
    fn resonance_examples() {
        let r = check_nonresonance(&square(), &third_fifth()).unwrap();
        assert_eq!(r.status, ResonanceStatus::NonResonant);
        assert_eq!(r.checked.len(), 2);

        let r =
            check_nonresonance(&square(), &ParameterVector::rational(&[(1, 1), (1, 2)])).unwrap();
        assert_eq!(r.status, ResonanceStatus::Resonant);
        let w = r.witness.unwrap();
        assert_eq!(w.normal, int_vector(&[1, 0]));
        assert_eq!(w.facet, vec![int_vector(&[0, 0]), int_vector(&[0, 1])]);

        let one = PointConfiguration::from_i64(&[&[1]]).unwrap();
        let half = check_nonresonance(&one, &ParameterVector::rational(&[(1, 2)])).unwrap();
        assert_eq!(half.status, ResonanceStatus::NonResonant);
        let three = check_nonresonance(&one, &ParameterVector::rational(&[(3, 1)])).unwrap();
        assert_eq!(three.status, ResonanceStatus::Resonant);
    }

    #[test]
    fn float_resonance_band() {
        let f = |a: f64, b: f64| {
            ParameterVector::Float(vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
        };
        let plain = check_nonresonance(&square(), &f(0.333333333, 0.2)).unwrap();
        assert_eq!(plain.status, ResonanceStatus::NonResonant);
        assert!(plain.warnings.is_empty());
        let near = check_nonresonance(&square(), &f(1.0 + 5e-7, 0.2)).unwrap();
        assert_eq!(near.status, ResonanceStatus::NearIntegerWarning);
        assert_eq!(near.warnings.len(), 1);
        let hit = check_nonresonance(&square(), &f(2.0 - 1e-12, 0.2)).unwrap();
        assert_eq!(hit.status, ResonanceStatus::Resonant);
    }

    #[test]
    fn facet_data_square_corner() {
        let data = relevant_facet_data(&square(), 3).unwrap();
        assert_eq!(data.len(), 2);
        let mut rhos: Vec<IntVector> = Vec::new();
        for c in &data {
            assert_eq!(c.sub_facets.len(), 1);
            let s = &c.sub_facets[0];
            assert_eq!(s.height, BigInt::one());
            assert_eq!(s.vol_gamma_hat, BigInt::one());
            assert_eq!(c.vol_delta_hat, BigInt::one());
            rhos.push(s.rho.clone());
        }
        rhos.sort();
        assert_eq!(rhos, vec![int_vector(&[0, 1]), int_vector(&[1, 0])]);
        // Δ_1 = edge x = 1 pairs with ρ = (0, 1)
        let right = data
            .iter()
            .find(|c| c.facet_normal == int_vector(&[-1, 0]))
            .unwrap();
        assert_eq!(right.sub_facets[0].rho, int_vector(&[0, 1]));
        assert_eq!(
            right.sub_facets[0].cone.points,
            vec![int_vector(&[1, 0]), int_vector(&[0, 0])]
        );
    }

    #[test]
    fn facet_data_square_side_vertex() {
        let data = relevant_facet_data(&square(), 1).unwrap();
        assert_eq!(data.len(), 1);
        let c = &data[0];
        assert_eq!(c.facet_normal, int_vector(&[-1, 0]));
        assert_eq!(c.sub_facets.len(), 1);
        let s = &c.sub_facets[0];
        assert_eq!(s.rho, int_vector(&[1, -1]));
        assert_eq!(s.height, BigInt::one());
        assert_eq!(s.vol_gamma_hat, BigInt::one());
        assert_eq!(c.vol_delta_hat, BigInt::one());
    }

    #[test]
    fn facet_data_interior_point() {
        let a = PointConfiguration::from_i64(&[&[3, 0], &[0, 3], &[1, 1]]).unwrap();
        assert!(relevant_facet_data(&a, 3).unwrap().is_empty());
        assert_eq!(
            relevant_facet_data(&a, 4),
            Err(Error::IndexOutOfRange { j0: 4, n: 3 })
        );
    }

    #[test]
    fn kummer_square_monodromy() {
        let r = monodromy_at_infinity(&square(), &third_fifth(), 3).unwrap();
        assert_eq!(
            r.char_poly,
            product([factor(1, -1, 3, 1), factor(1, -1, 5, 1)])
        );
        assert!(r.theorem_hypotheses_met);
        assert_eq!(r.degree, 2);

        let r = monodromy_at_infinity(&square(), &third_fifth(), 1).unwrap();
        assert_eq!(
            r.char_poly,
            product([factor(1, -2, 15, 1), factor(1, 0, 1, 1)])
        );
        assert_eq!(r.t_minus_one_exponent, BigInt::one());
    }

    #[test]
    fn interior_point_gives_unipotent() {
        let a = PointConfiguration::from_i64(&[&[3, 0], &[0, 3], &[1, 1]]).unwrap();
        let r = monodromy_at_infinity(&a, &third_fifth(), 3).unwrap();
        assert_eq!(r.char_poly, product([factor(1, 0, 1, 9)]));
        assert!(!r.validation.generates_lattice);
        assert!(!r.theorem_hypotheses_met);
        assert_eq!(r.char_poly.to_string(), "(t \u{2212} 1)^9");
    }

    #[test]
    fn one_dimensional_cases() {
        let one = PointConfiguration::from_i64(&[&[1]]).unwrap();
        let r = monodromy_at_infinity(&one, &ParameterVector::rational(&[(1, 2)]), 1).unwrap();
        assert_eq!(r.char_poly, product([factor(1, 1, 2, 1)]));
        assert_eq!(
            r.char_poly.expand(),
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]
        );

        let hermite = PointConfiguration::from_i64(&[&[1], &[2]]).unwrap();
        let r = monodromy_at_infinity(&hermite, &ParameterVector::rational(&[(1, 3)]), 2).unwrap();
        assert_eq!(r.char_poly, product([factor(2, -1, 3, 1)]));
        let s = &r.contributions[0].sub_facets[0];
        assert!(s.face.is_empty());
        assert_eq!(s.rho, int_vector(&[1]));
        assert_eq!(s.height, BigInt::from(2));
    }

    #[test]
    fn resonant_input_is_flagged_not_refused() {
        let r = monodromy_at_infinity(&square(), &ParameterVector::rational(&[(1, 1), (1, 2)]), 3)
            .unwrap();
        assert!(!r.theorem_hypotheses_met);
        assert_eq!(r.degree, 2);
    }

    #[test]
    fn invalid_inputs() {
        let flat = PointConfiguration::from_i64(&[&[1, 0], &[2, 0]]).unwrap();
        assert!(matches!(
            monodromy_at_infinity(&flat, &third_fifth(), 1),
            Err(Error::InvalidConfiguration(_))
        ));
        assert_eq!(
            monodromy_at_infinity(&square(), &third_fifth(), 0).unwrap_err(),
            Error::IndexOutOfRange { j0: 0, n: 3 }
        );
        assert!(matches!(
            monodromy_at_infinity(&square(), &ParameterVector::rational(&[(1, 2)]), 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(PointConfiguration::from_i64(&[&[1, 0], &[1]]).is_err());
    }

    #[test]
    fn index_split() {
        assert_eq!(split_index(3, 1), (2, 1));
        assert_eq!(split_index(2, 2), (0, 2));
        assert_eq!(split_index(3, 2), (1, 1));
        assert_eq!(split_index(0, 3), (-1, 3));
        assert_eq!(split_index(-4, 3), (-2, 2));
    }

    #[test]
    fn phi1_small_cases() {
        let c = ParameterVector::rational(&[(1, 7), (2, 9)]);
        let e1 = UnitScalar::angle_of(1, 7).to_complex();
        let e2 = UnitScalar::angle_of(-2, 9).to_complex();

        let m = phi1_matrix(2, 1, 1, &c).unwrap();
        assert!((m.l[(0, 0)] - e1 * e2 * e2).norm() < 1e-15);

        let m = phi1_matrix(1, 2, 1, &c).unwrap();
        assert!((m.k[(0, 1)] - e1 * e2).norm() < 1e-15);
        assert!((m.k[(1, 0)] - e1).norm() < 1e-15);
        assert!(m.k[(0, 0)].norm() < 1e-15 && m.k[(1, 1)].norm() < 1e-15);
        let v = phi1_charpoly_identity(1, 2, 1, &c).unwrap();
        assert!(v.passed);
        let expected = [Complex64::new(1.0, 0.0), Complex64::zero(), -(e1 * e1 * e2)];
        let cp = characteristic_polynomial(&m.l);
        for (a, b) in cp.iter().zip(expected) {
            assert!((a - b).norm() < 1e-12);
        }

        let m = phi1_matrix(0, 1, 3, &c).unwrap();
        let cp = characteristic_polynomial(&m.l);
        let expected = [
            Complex64::new(1.0, 0.0),
            Complex64::zero(),
            Complex64::zero(),
            -e1,
        ];
        for (a, b) in cp.iter().zip(expected) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(phi1_charpoly_identity(0, 1, 3, &c).unwrap().passed);
        assert!(phi1_charpoly_identity(-3, 4, 2, &c).unwrap().passed);
    }

    #[test]
    fn nondegeneracy_examples() {
        let ones = ParameterVector::rational(&[(1, 1), (1, 1), (1, 1)]);
        let r = check_nondegeneracy(&square(), &ones).unwrap();
        assert_eq!(r.overall, FaceVerdict::Nondegenerate);
        assert_eq!(r.faces.len(), 5);

        let r = check_nondegeneracy(
            &square(),
            &ParameterVector::rational(&[(0, 1), (1, 1), (1, 1)]),
        )
        .unwrap();
        assert!(matches!(r.overall, FaceVerdict::Degenerate(_)));
        let bad = r
            .faces
            .iter()
            .find(|f| matches!(f.verdict, FaceVerdict::Degenerate(_)))
            .unwrap();
        assert_eq!(bad.vertices, vec![int_vector(&[1, 0])]);

        let hermite = PointConfiguration::from_i64(&[&[1], &[2]]).unwrap();
        let r =
            check_nondegeneracy(&hermite, &ParameterVector::rational(&[(2, 1), (1, 1)])).unwrap();
        assert_eq!(r.overall, FaceVerdict::Nondegenerate);
        assert_eq!(r.faces.len(), 1);

        assert!(check_nondegeneracy(&square(), &ParameterVector::rational(&[(1, 1)])).is_err());
    }

    #[test]
    fn repeated_root_on_an_edge() {
        // edge from (2,0) to (0,2) through (1,1): g = 1 + 2s + s^2 = (1+s)^2
        let a =
            PointConfiguration::from_i64(&[&[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]]).unwrap();
        let exact = ParameterVector::rational(&[(1, 1), (1, 1), (1, 1), (2, 1), (1, 1)]);
        let r = check_nondegeneracy(&a, &exact).unwrap();
        assert!(matches!(r.overall, FaceVerdict::Degenerate(_)));
        let float = ParameterVector::Float(
            [1.0, 1.0, 1.0, 2.0, 1.0]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        );
        assert!(matches!(
            check_nondegeneracy(&a, &float).unwrap().overall,
            FaceVerdict::Degenerate(_)
        ));
        let generic = ParameterVector::rational(&[(1, 1), (1, 1), (1, 1), (3, 1), (1, 1)]);
        assert_eq!(
            check_nondegeneracy(&a, &generic).unwrap().overall,
            FaceVerdict::Nondegenerate
        );
    }

    #[test]
    fn unchecked_faces_propagate() {
        let a = PointConfiguration::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]])
            .unwrap();
        let z = ParameterVector::rational(&[(1, 1), (2, 1), (3, 1), (5, 1)]);
        let r = check_nondegeneracy(&a, &z).unwrap();
        assert!(matches!(r.overall, FaceVerdict::Unchecked(_)));
    }
}
