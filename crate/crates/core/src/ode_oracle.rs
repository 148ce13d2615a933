//! Numeric cross-checks for the monodromy engine.
//!
//! A small catalog of restricted GKZ systems, written as scalar ODEs in the
//! loop coordinate `w = z_{j0}` with the other coordinates frozen, is
//! transported once around a large circle with an adaptive Dormand–Prince
//! integrator. Each catalog entry is checked on construction by substituting
//! its Γ-series solutions into both the original GKZ relations and the
//! reduced ODE.
//!
//! The module also carries an independent normalized-volume routine based on
//! a placing triangulation.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::integer_linalg::{
    cofactor_normal, coordinates_in_basis, determinant, dot, hermite_normal_form,
    lattice_basis_of_span, IntMatrix, IntVector,
};
use crate::monodromy_engine::{Orientation, ParameterVector, PointConfiguration};
use crate::numeric_linalg::{cluster, eigenvalues, CMatrix};
use crate::spectral_algebra::{SpectrumMultiset, UnitScalar};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Eigenvalues closer than this are merged into one multiplicity class.
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// Largest admissible relative residual of a catalog reduction.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Points on the positive real ray where catalog reductions are checked.
pub const RESIDUAL_RAY: [f64; 3] = [1.5, 3.0, 7.0];
const MIN_STEPS_PER_LOOP: f64 = 256.0;
const MAX_STEPS: usize = 2_000_000;

/// `num(w) / den(w)` with coefficients in ascending powers of `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction {
            num: Vec::new(),
            den: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn constant(v: Complex64) -> Self {
        RationalFunction {
            num: vec![v],
            den: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        horner(&self.num, w) / horner(&self.den, w)
    }
}

fn horner(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::zero(), |acc, c| acc * w + c)
}

/// `Σ_k a_k(w)·u^{(k)} = 0`, `a_k` polynomials in ascending powers of `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarOde {
    pub coeffs: Vec<Vec<Complex64>>,
}

impl ScalarOde {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `Σ_k a_k(w)·derivs[k]` and `Σ_k |a_k(w)·derivs[k]|`.
    pub fn residual(&self, w: Complex64, derivs: &[Complex64]) -> (Complex64, f64) {
        self.coeffs
            .iter()
            .zip(derivs)
            .map(|(a, d)| horner(a, w) * d)
            .fold((Complex64::zero(), 0.0), |(s, m), t| (s + t, m + t.norm()))
    }

    /// First-order system `Y' = M(w)·Y` on `(u, u', …, u^{(m−1)})`.
    pub fn companion(&self) -> Vec<RationalFunction> {
        let m = self.order();
        let lead = self.coeffs[m].clone();
        let mut entries = vec![RationalFunction::zero(); m * m];
        for i in 0..m - 1 {
            entries[i * m + i + 1] = RationalFunction::constant(Complex64::new(1.0, 0.0));
        }
        for k in 0..m {
            entries[(m - 1) * m + k] = RationalFunction {
                num: self.coeffs[k].iter().map(|c| -c).collect(),
                den: lead.clone(),
            };
        }
        entries
    }
}

/// Linear system `Y' = M(w)·Y` in the loop variable.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    pub id: String,
    pub size: usize,
    /// Row-major entries of `M`.
    pub entries: Vec<RationalFunction>,
    pub singularity_moduli: Vec<f64>,
    pub c: Vec<f64>,
    pub frozen: Vec<Complex64>,
    pub scalar: Option<ScalarOde>,
    /// Largest relative residual seen when the catalog entry was checked.
    pub residual: f64,
}

impl OdeSystem {
    /// `M(w) = 0`; its loop transport is the identity.
    pub fn zero(size: usize) -> Self {
        OdeSystem {
            id: "zero".into(),
            size,
            entries: vec![RationalFunction::zero(); size * size],
            singularity_moduli: Vec::new(),
            c: Vec::new(),
            frozen: Vec::new(),
            scalar: None,
            residual: 0.0,
        }
    }

    pub fn matrix_at(&self, w: Complex64) -> CMatrix {
        CMatrix::from_row_iterator(self.size, self.size, self.entries.iter().map(|f| f.eval(w)))
    }

    pub fn auto_radius(&self) -> f64 {
        let outer = self.singularity_moduli.iter().copied().fold(0.0, f64::max);
        f64::max(10.0, 2.0 * outer)
    }
}

pub const CATALOG_IDS: [&str; 3] = ["power", "hermite", "kummer_square"];

/// The point configuration and loop index a catalog entry restricts.
pub fn catalog_configuration(id: &str) -> Result<(PointConfiguration, usize)> {
    let (points, j0): (&[&[i64]], usize) = match id {
        "power" => (&[&[1]], 1),
        "hermite" => (&[&[1], &[2]], 2),
        "kummer_square" => (&[&[1, 0], &[0, 1], &[1, 1]], 3),
        other => return Err(Error::UnknownCatalog(other.into())),
    };
    Ok((PointConfiguration::from_i64(points)?, j0))
}

/// `1/Γ(x)`, exactly zero at the poles of `Γ`.
fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `Σ_{k≥0} ∏_j z_j^{γ_j + k·ℓ_j} / Γ(γ_j + k·ℓ_j + 1)`
#[derive(Debug, Clone)]
struct GammaSeries {
    base: Vec<f64>,
    step: Vec<f64>,
}

impl GammaSeries {
    /// `∂^μ φ(z)` for a multi-index `μ`.
    fn derivative(&self, z: &[Complex64], mu: &[usize]) -> Complex64 {
        let single = self.step.iter().all(|s| *s == 0.0);
        let mut sum = Complex64::zero();
        let mut small_run = 0;
        for k in 0..2000 {
            let mut term = Complex64::new(1.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                let e = self.base[j] + k as f64 * self.step[j];
                let mut factor = recip_gamma(e + 1.0);
                for r in 0..mu[j] {
                    factor *= e - r as f64;
                }
                term *= zj.powf(e - mu[j] as f64) * factor;
            }
            sum += term;
            if single {
                break;
            }
            if term.norm() <= 1e-18 * sum.norm().max(1e-300) {
                small_run += 1;
                if small_run >= 4 && k > 8 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        sum
    }
}

struct CatalogShape {
    config: PointConfiguration,
    j0: usize,
    frozen_slots: Vec<usize>,
    /// `(μ⁺, μ⁻)` pairs with `∂^{μ⁺} = ∂^{μ⁻}`.
    boxes: Vec<(Vec<usize>, Vec<usize>)>,
    series: Vec<GammaSeries>,
    ode: ScalarOde,
}

fn real_parameters(id: &str, c: &ParameterVector, n: usize) -> Result<Vec<f64>> {
    if c.len() != n {
        return Err(Error::CatalogBinding {
            id: id.into(),
            reason: format!("expected {n} parameter entries, got {}", c.len()),
        });
    }
    c.to_complex()
        .into_iter()
        .map(|z| {
            if z.im != 0.0 {
                Err(Error::CatalogBinding {
                    id: id.into(),
                    reason: "catalog systems take real parameters".into(),
                })
            } else {
                Ok(z.re)
            }
        })
        .collect()
}

fn shape(id: &str, c: &[f64], frozen: &[Complex64]) -> Result<CatalogShape> {
    let (config, j0) = catalog_configuration(id)?;
    let re = |x: f64| Complex64::new(x, 0.0);
    Ok(match id {
        "power" => CatalogShape {
            config,
            j0,
            frozen_slots: vec![],
            boxes: vec![],
            series: vec![GammaSeries {
                base: vec![-c[0]],
                step: vec![0.0],
            }],
            // w·u' + c·u = 0
            ode: ScalarOde {
                coeffs: vec![vec![re(c[0])], vec![re(0.0), re(1.0)]],
            },
        },
        "hermite" => {
            let z1 = frozen[0];
            CatalogShape {
                config,
                j0,
                frozen_slots: vec![0],
                boxes: vec![(vec![2, 0], vec![0, 1])],
                series: vec![GammaSeries {
                    base: vec![0.0, -c[0] / 2.0],
                    step: vec![1.0, -0.5],
                }],
                // 4w²u'' + ((4c+6)w − z1²)u' + c(c+1)u = 0
                ode: ScalarOde {
                    coeffs: vec![
                        vec![re(c[0] * (c[0] + 1.0))],
                        vec![-z1 * z1, re(4.0 * c[0] + 6.0)],
                        vec![re(0.0), re(0.0), re(4.0)],
                    ],
                },
            }
        }
        "kummer_square" => {
            let (c1, c2) = (c[0], c[1]);
            let z12 = frozen[0] * frozen[1];
            CatalogShape {
                config,
                j0,
                frozen_slots: vec![0, 1],
                boxes: vec![(vec![1, 1, 0], vec![0, 0, 1])],
                series: vec![
                    GammaSeries {
                        base: vec![0.0, c1 - c2, -c1],
                        step: vec![1.0, 1.0, -1.0],
                    },
                    GammaSeries {
                        base: vec![c2 - c1, 0.0, -c2],
                        step: vec![1.0, 1.0, -1.0],
                    },
                ],
                // w²u'' + ((1+c1+c2)w − z1z2)u' + c1c2·u = 0
                ode: ScalarOde {
                    coeffs: vec![
                        vec![re(c1 * c2)],
                        vec![-z12, re(1.0 + c1 + c2)],
                        vec![re(0.0), re(0.0), re(1.0)],
                    ],
                },
            }
        }
        other => return Err(Error::UnknownCatalog(other.into())),
    })
}

fn unit(n: usize, j: usize, k: usize) -> Vec<usize> {
    let mut v = vec![0; n];
    v[j] = k;
    v
}

/// Largest relative residual of the Euler relations, the box relations and
/// the reduced ODE over the nonvanishing Γ-series on the check ray.
fn catalog_residual(shape: &CatalogShape, c: &[f64], frozen: &[Complex64]) -> Option<f64> {
    let pts = shape.config.points();
    let n_pts = pts.len();
    let wi = shape.j0 - 1;
    let mut worst: Option<f64> = None;
    for series in &shape.series {
        for &w in &RESIDUAL_RAY {
            let mut z = vec![Complex64::zero(); n_pts];
            for (slot, value) in shape.frozen_slots.iter().zip(frozen) {
                z[*slot] = *value;
            }
            z[wi] = Complex64::new(w, 0.0);
            let phi = series.derivative(&z, &vec![0; n_pts]);
            if phi.norm() < 1e-12 {
                continue;
            }
            let mut rel = Vec::new();
            for (i, ci) in c.iter().enumerate() {
                let mut total = phi * ci;
                let mut mag = total.norm();
                for (j, p) in pts.iter().enumerate() {
                    let a = p[i].to_string().parse::<f64>().unwrap_or(0.0);
                    let t = z[j] * series.derivative(&z, &unit(n_pts, j, 1)) * a;
                    total += t;
                    mag += t.norm();
                }
                rel.push(total.norm() / mag.max(f64::MIN_POSITIVE));
            }
            for (plus, minus) in &shape.boxes {
                let (l, r) = (series.derivative(&z, plus), series.derivative(&z, minus));
                rel.push((l - r).norm() / (l.norm() + r.norm()).max(f64::MIN_POSITIVE));
            }
            let derivs: Vec<Complex64> = (0..=shape.ode.order())
                .map(|k| series.derivative(&z, &unit(n_pts, wi, k)))
                .collect();
            let (res, mag) = shape.ode.residual(z[wi], &derivs);
            rel.push(res.norm() / mag.max(f64::MIN_POSITIVE));
            let local = rel.into_iter().fold(0.0, f64::max);
            worst = Some(worst.map_or(local, |w: f64| w.max(local)));
        }
    }
    worst
}

/// Builds a catalog system; `frozen` defaults to all ones.
pub fn catalog_system(
    id: &str,
    c: &ParameterVector,
    frozen: Option<&[Complex64]>,
) -> Result<OdeSystem> {
    let (config, _) = catalog_configuration(id)?;
    let c = real_parameters(id, c, config.n())?;
    let slots = config.len() - 1;
    let frozen: Vec<Complex64> = match frozen {
        Some(f) if f.len() != slots => {
            return Err(Error::CatalogBinding {
                id: id.into(),
                reason: format!("expected {slots} frozen coordinates, got {}", f.len()),
            })
        }
        Some(f) => f.to_vec(),
        None => vec![Complex64::new(1.0, 0.0); slots],
    };
    if frozen.iter().any(|z| z.norm() == 0.0) {
        return Err(Error::CatalogBinding {
            id: id.into(),
            reason: "frozen coordinates must be nonzero".into(),
        });
    }
    let shape = shape(id, &c, &frozen)?;
    let residual = catalog_residual(&shape, &c, &frozen).ok_or_else(|| Error::CatalogBinding {
        id: id.into(),
        reason: "every series solution vanishes on the check ray".into(),
    })?;
    if residual.is_nan() || residual > RESIDUAL_TOL {
        return Err(Error::CatalogBinding {
            id: id.into(),
            reason: format!("reduction residual {residual:.3e} exceeds {RESIDUAL_TOL:e}"),
        });
    }
    Ok(OdeSystem {
        id: id.into(),
        size: shape.ode.order(),
        entries: shape.ode.companion(),
        singularity_moduli: vec![0.0],
        c,
        frozen,
        scalar: Some(shape.ode),
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec {
    /// `None` selects the automatic radius.
    pub radius: Option<f64>,
    pub tol: f64,
    pub start_angle: f64,
    pub orientation: Orientation,
}

impl Default for LoopSpec {
    fn default() -> Self {
        LoopSpec {
            radius: None,
            tol: DEFAULT_TOLERANCE,
            start_angle: 0.0,
            orientation: Orientation::Ccw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Sum of accepted local error estimates.
    pub error_estimate: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyMatrix {
    pub matrix: CMatrix,
    pub stats: IntegrationStats,
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Transports the identity fundamental matrix once around `|w| = R`,
/// parameterized by angle: `dY/dθ = i·w·M(w)·Y`.
pub fn numeric_monodromy(sys: &OdeSystem, spec: &LoopSpec) -> Result<MonodromyMatrix> {
    let radius = spec.radius.unwrap_or_else(|| sys.auto_radius());
    let outer = sys.singularity_moduli.iter().copied().fold(0.0, f64::max);
    if radius.is_nan() || radius <= outer || !radius.is_finite() {
        return Err(Error::RadiusInsideSingularity {
            radius,
            modulus: outer,
        });
    }
    let m = sys.size;
    let sign = match spec.orientation {
        Orientation::Ccw => 1.0,
        Orientation::Cw => -1.0,
    };
    let rhs = |theta: f64, y: &CMatrix| -> CMatrix {
        let w = Complex64::from_polar(radius, theta);
        sys.matrix_at(w) * y * (Complex64::new(0.0, sign) * w)
    };

    // s runs over [0, 2π]; θ = θ0 + sign·s
    let h_max = TAU / MIN_STEPS_PER_LOOP;
    let mut s = 0.0;
    let mut h = h_max;
    let mut y = CMatrix::identity(m, m);
    let mut stats = IntegrationStats {
        accepted: 0,
        rejected: 0,
        error_estimate: 0.0,
        radius,
    };
    let theta = |s: f64| spec.start_angle + sign * s;
    let mut k1 = rhs(theta(0.0), &y);
    while s < TAU {
        if stats.accepted + stats.rejected >= MAX_STEPS {
            return Err(Error::Integration {
                steps: stats.accepted + stats.rejected,
                angle: theta(s),
                reason: "step budget exhausted".into(),
            });
        }
        h = h.min(TAU - s);
        let mut ks: Vec<CMatrix> = Vec::with_capacity(7);
        ks.push(k1.clone());
        for stage in 1..7 {
            let mut arg = y.clone();
            for (j, kj) in ks.iter().enumerate() {
                if A[stage][j] != 0.0 {
                    arg += kj * Complex64::new(h * A[stage][j], 0.0);
                }
            }
            ks.push(rhs(theta(s + C[stage] * h), &arg));
        }
        let mut y5 = y.clone();
        let mut err = CMatrix::zeros(m, m);
        for (j, kj) in ks.iter().enumerate() {
            y5 += kj * Complex64::new(h * B5[j], 0.0);
            err += kj * Complex64::new(h * (B5[j] - B4[j]), 0.0);
        }
        let ratio = err
            .iter()
            .zip(y.iter().zip(y5.iter()))
            .map(|(e, (a, b))| e.norm() / (spec.tol + spec.tol * a.norm().max(b.norm())))
            .fold(0.0, f64::max);
        if !ratio.is_finite() {
            return Err(Error::Integration {
                steps: stats.accepted + stats.rejected,
                angle: theta(s),
                reason: "non-finite state".into(),
            });
        }
        if ratio <= 1.0 {
            s += h;
            y = y5;
            k1 = ks.pop().expect("seven stages");
            stats.accepted += 1;
            stats.error_estimate += err.iter().map(|e| e.norm()).fold(0.0, f64::max);
        } else {
            stats.rejected += 1;
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(h_max);
        if h < 1e-14 {
            return Err(Error::Integration {
                steps: stats.accepted + stats.rejected,
                angle: theta(s),
                reason: "step size underflow".into(),
            });
        }
    }
    Ok(MonodromyMatrix { matrix: y, stats })
}

/// Eigenvalues of the loop matrix with multiplicities from clustering.
pub fn numeric_spectrum(m: &MonodromyMatrix) -> SpectrumMultiset {
    matrix_spectrum(&m.matrix)
}

pub fn matrix_spectrum(m: &CMatrix) -> SpectrumMultiset {
    SpectrumMultiset::from_values(
        cluster(&eigenvalues(m), CLUSTER_RADIUS)
            .into_iter()
            .map(|(v, k)| (UnitScalar::Complex(v), k)),
    )
}

/// Closed-form monodromy of `u = w^{−c}` under the requested loop.
pub fn power_closed_form(c: f64, orientation: Orientation) -> Complex64 {
    let sign = match orientation {
        Orientation::Ccw => -1.0,
        Orientation::Cw => 1.0,
    };
    Complex64::from_polar(1.0, sign * 2.0 * PI * c)
}

/// Normalized volume of `conv(points)` from a placing triangulation, summing
/// `|det|` over the simplices in the lattice of the affine span.
pub fn volume_bruteforce(points: &[IntVector]) -> BigInt {
    let Some(anchor) = points.first() else {
        return BigInt::zero();
    };
    let diffs: Vec<IntVector> = points
        .iter()
        .map(|p| p.iter().zip(anchor).map(|(a, b)| a - b).collect())
        .collect();
    let basis = lattice_basis_of_span(&diffs);
    let d = basis.len();
    if d == 0 {
        return BigInt::from(1);
    }
    let pts: Vec<IntVector> = diffs
        .iter()
        .map(|v| coordinates_in_basis(&basis, v).expect("difference lies in its own span"))
        .collect();

    let mut simplex: Vec<usize> = vec![0];
    for i in 1..pts.len() {
        if simplex.len() == d + 1 {
            break;
        }
        let mut rows: Vec<IntVector> = simplex[1..].iter().map(|&j| pts[j].clone()).collect();
        rows.push(pts[i].clone());
        if rank(&rows) == rows.len() {
            simplex.push(i);
        }
    }
    assert_eq!(simplex.len(), d + 1, "span dimension yields a simplex");

    // interior reference, scaled by d + 1 to stay integral
    let interior: IntVector = (0..d)
        .map(|k| simplex.iter().map(|&j| &pts[j][k]).sum())
        .collect();
    let scale = BigInt::from(d + 1);
    let mut boundary: Vec<(Vec<usize>, IntVector, BigInt)> = Vec::new();
    let add_facet = |facet: Vec<usize>, boundary: &mut Vec<(Vec<usize>, IntVector, BigInt)>| {
        let base = &pts[facet[0]];
        let rows: Vec<IntVector> = facet[1..]
            .iter()
            .map(|&j| pts[j].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let mut normal = cofactor_normal(&rows);
        let mut offset = dot(&normal, base);
        if (dot(&normal, &interior) - &offset * &scale).is_positive() {
            normal = normal.into_iter().map(|x| -x).collect();
            offset = -offset;
        }
        boundary.push((facet, normal, offset));
    };
    for skip in 0..=d {
        let mut facet: Vec<usize> = simplex.clone();
        facet.remove(skip);
        add_facet(facet, &mut boundary);
    }
    let simplex_volume = |s: &[usize]| -> BigInt {
        let rows: Vec<IntVector> = s[1..]
            .iter()
            .map(|&j| pts[j].iter().zip(&pts[s[0]]).map(|(a, b)| a - b).collect())
            .collect();
        determinant(rows).abs()
    };
    let mut volume = simplex_volume(&simplex);

    for (p, point) in pts.iter().enumerate() {
        if simplex.contains(&p) {
            continue;
        }
        let (visible, hidden): (Vec<_>, Vec<_>) = boundary
            .into_iter()
            .partition(|(_, normal, offset)| (dot(normal, point) - offset).is_positive());
        boundary = hidden;
        let mut ridges: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (facet, _, _) in &visible {
            let mut s = facet.clone();
            s.push(p);
            volume += simplex_volume(&s);
            for skip in 0..facet.len() {
                let mut ridge = facet.clone();
                ridge.remove(skip);
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        for (ridge, count) in ridges {
            if count == 1 {
                let mut facet = ridge;
                facet.push(p);
                add_facet(facet, &mut boundary);
            }
        }
    }
    volume
}

fn rank(rows: &[IntVector]) -> usize {
    hermite_normal_form(&IntMatrix::from_rows(rows).expect("rows share a length")).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integer_linalg::int_vector;
    use crate::spectral_algebra::compare_spectra;

    fn rational(p: i64, q: i64) -> ParameterVector {
        ParameterVector::rational(&[(p, q)])
    }

    #[test]
    fn power_loop_matches_closed_form() {
        let sys = catalog_system("power", &rational(1, 2), None).unwrap();
        assert_eq!(sys.size, 1);
        let spec = LoopSpec {
            radius: Some(2.0),
            ..LoopSpec::default()
        };
        let m = numeric_monodromy(&sys, &spec).unwrap();
        assert!((m.matrix[(0, 0)] - Complex64::new(-1.0, 0.0)).norm() < 1e-8);
        let sys = catalog_system("power", &rational(1, 3), None).unwrap();
        let cw = numeric_monodromy(
            &sys,
            &LoopSpec {
                orientation: Orientation::Cw,
                ..LoopSpec::default()
            },
        )
        .unwrap();
        assert!((cw.matrix[(0, 0)] - power_closed_form(1.0 / 3.0, Orientation::Cw)).norm() < 1e-8);
    }

    #[test]
    fn zero_system_is_identity() {
        let m = numeric_monodromy(&OdeSystem::zero(3), &LoopSpec::default()).unwrap();
        assert!((m.matrix.clone() - CMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn hermite_eigenvalues() {
        let sys = catalog_system("hermite", &rational(1, 3), None).unwrap();
        assert_eq!(sys.size, 2);
        assert!(sys.residual < RESIDUAL_TOL);
        let m = numeric_monodromy(&sys, &LoopSpec::default()).unwrap();
        let got = numeric_spectrum(&m);
        let e = Complex64::from_polar(1.0, -PI / 3.0);
        let want = SpectrumMultiset::from_values([
            (UnitScalar::Complex(e), 1),
            (UnitScalar::Complex(-e), 1),
        ]);
        assert!(compare_spectra(&got, &want, 1e-6).passed);
    }

    #[test]
    fn kummer_residual_and_spectrum() {
        let c = ParameterVector::rational(&[(1, 3), (1, 5)]);
        let sys = catalog_system("kummer_square", &c, None).unwrap();
        assert!(sys.residual < RESIDUAL_TOL);
        let m = numeric_monodromy(&sys, &LoopSpec::default()).unwrap();
        let want = SpectrumMultiset::from_values([
            (UnitScalar::angle_of(-1, 3), 1),
            (UnitScalar::angle_of(-1, 5), 1),
        ]);
        assert!(compare_spectra(&numeric_spectrum(&m), &want, 1e-6).passed);
    }

    #[test]
    fn wrong_reduction_is_rejected() {
        let mut broken = shape("hermite", &[1.0 / 3.0], &[Complex64::new(1.0, 0.0)]).unwrap();
        broken.ode.coeffs[1][1] = Complex64::new(5.0, 0.0);
        let res = catalog_residual(&broken, &[1.0 / 3.0], &[Complex64::new(1.0, 0.0)]).unwrap();
        assert!(res > 1e-3);
    }

    #[test]
    fn catalog_errors() {
        assert_eq!(
            catalog_system("airy", &rational(1, 2), None).unwrap_err(),
            Error::UnknownCatalog("airy".into())
        );
        let complex = ParameterVector::Float(vec![Complex64::new(0.5, 0.1)]);
        assert!(matches!(
            catalog_system("power", &complex, None),
            Err(Error::CatalogBinding { .. })
        ));
        assert!(catalog_system("hermite", &rational(1, 3), Some(&[Complex64::zero()])).is_err());
        let sys = catalog_system("power", &rational(1, 2), None).unwrap();
        let spec = LoopSpec {
            radius: Some(0.0),
            ..LoopSpec::default()
        };
        assert!(matches!(
            numeric_monodromy(&sys, &spec),
            Err(Error::RadiusInsideSingularity { .. })
        ));
    }

    #[test]
    fn spectrum_examples() {
        let m = CMatrix::from_element(1, 1, Complex64::new(-1.0, 0.0));
        let s = matrix_spectrum(&m);
        assert_eq!(s.total(), 1);
        assert!((s.points()[0] + 1.0).norm() < 1e-15);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ]));
        assert_eq!(matrix_spectrum(&d).entries().len(), 2);
        let repeated = CMatrix::identity(3, 3);
        assert_eq!(matrix_spectrum(&repeated).entries()[0].1, 3);
    }

    #[test]
    fn bruteforce_volumes() {
        let square = [
            int_vector(&[0, 0]),
            int_vector(&[1, 0]),
            int_vector(&[0, 1]),
            int_vector(&[1, 1]),
        ];
        assert_eq!(volume_bruteforce(&square), BigInt::from(2));
        let tri = [
            int_vector(&[0, 0]),
            int_vector(&[3, 0]),
            int_vector(&[0, 3]),
            int_vector(&[1, 1]),
        ];
        assert_eq!(volume_bruteforce(&tri), BigInt::from(9));
        assert_eq!(volume_bruteforce(&[int_vector(&[4, 4])]), BigInt::from(1));
        let segment = [
            int_vector(&[0, 0, 0]),
            int_vector(&[2, 2, 0]),
            int_vector(&[1, 1, 0]),
        ];
        assert_eq!(volume_bruteforce(&segment), BigInt::from(2));
        let cube: Vec<IntVector> = (0..8)
            .map(|b| int_vector(&[b & 1, (b >> 1) & 1, (b >> 2) & 1]))
            .collect();
        assert_eq!(volume_bruteforce(&cube), BigInt::from(6));
    }
}
