//! Factored characteristic polynomials `∏ (t^h − μ)^m` with unit-modulus
//! multipliers.
//!
//! Multipliers coming from rational parameters are kept as exact angles
//! `q ∈ Q/Z` standing for `e(q) = exp(2πi·q)`; floating-point values only
//! appear in [`FactoredCharPoly::expand`] and in numeric spectra.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Tolerance for calling a float multiplier unit-modulus.
pub const UNIT_MODULUS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum UnitScalar {
    /// `e(q)` with `q` reduced into `[0, 1)`.
    Angle(BigRational),
    Complex(Complex64),
}

/// Reduces a rational into `[0, 1)`.
pub fn reduce_angle(q: &BigRational) -> BigRational {
    q - q.floor()
}

/// Representative of `q mod 1` in `[−1/2, 1/2)`, used for display.
pub fn signed_angle(q: &BigRational) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let r = reduce_angle(q);
    if r >= half {
        r - BigRational::one()
    } else {
        r
    }
}

impl UnitScalar {
    pub fn angle(q: BigRational) -> Self {
        UnitScalar::Angle(reduce_angle(&q))
    }

    pub fn angle_of(numer: i64, denom: i64) -> Self {
        Self::angle(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn one() -> Self {
        UnitScalar::Angle(BigRational::zero())
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            UnitScalar::Angle(q) => {
                // exact values at the quarter turns keep expansions clean
                let quarter = (q * BigInt::from(4)).to_integer();
                if BigRational::from_integer(quarter.clone()) == q * BigInt::from(4) {
                    return match quarter.to_i64().unwrap_or(0) {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    };
                }
                Complex64::from_polar(1.0, TAU * q.to_f64().unwrap_or(0.0))
            }
            UnitScalar::Complex(z) => *z,
        }
    }

    /// Complex conjugate, i.e. `q ↦ −q mod 1` for angles.
    pub fn conj(&self) -> Self {
        match self {
            UnitScalar::Angle(q) => Self::angle(-q),
            UnitScalar::Complex(z) => UnitScalar::Complex(z.conj()),
        }
    }

    pub fn is_unit_modulus(&self) -> bool {
        match self {
            UnitScalar::Angle(_) => true,
            UnitScalar::Complex(z) => (z.norm() - 1.0).abs() <= UNIT_MODULUS_TOL,
        }
    }

    /// The `h` solutions of `t^h = self`, as angles `(q + k)/h` when exact.
    pub fn roots(&self, h: u64) -> Vec<UnitScalar> {
        let hb = BigInt::from(h);
        match self {
            UnitScalar::Angle(q) => (0..h)
                .map(|k| Self::angle((q + BigInt::from(k)) / &hb))
                .collect(),
            UnitScalar::Complex(z) => {
                let (r, theta) = z.to_polar();
                let radius = r.powf(1.0 / h as f64);
                (0..h)
                    .map(|k| {
                        UnitScalar::Complex(Complex64::from_polar(
                            radius,
                            (theta + TAU * k as f64) / h as f64,
                        ))
                    })
                    .collect()
            }
        }
    }

    /// Canonical order: exact angles first (by value), then floats by
    /// principal argument.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (UnitScalar::Angle(a), UnitScalar::Angle(b)) => a.cmp(b),
            (UnitScalar::Angle(_), UnitScalar::Complex(_)) => Ordering::Less,
            (UnitScalar::Complex(_), UnitScalar::Angle(_)) => Ordering::Greater,
            (UnitScalar::Complex(a), UnitScalar::Complex(b)) => a
                .arg()
                .total_cmp(&b.arg())
                .then_with(|| a.norm().total_cmp(&b.norm()))
                .then_with(|| a.re.total_cmp(&b.re))
                .then_with(|| a.im.total_cmp(&b.im)),
        }
    }
}

impl fmt::Display for UnitScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitScalar::Angle(q) if q.is_zero() => write!(f, "1"),
            UnitScalar::Angle(q) => write!(f, "e({})", fmt_rational(&signed_angle(q))),
            UnitScalar::Complex(z) => {
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "({}{}{}i)", z.re, sign, z.im.abs())
            }
        }
    }
}

/// `p/q` with a Unicode minus sign, or just `p` for integers.
fn fmt_rational(q: &BigRational) -> String {
    let sign = if q.is_negative() { "\u{2212}" } else { "" };
    let (n, d) = (q.numer().abs(), q.denom());
    if d.is_one() {
        format!("{sign}{n}")
    } else {
        format!("{sign}{n}/{d}")
    }
}

/// `(t^h − μ)^mult`
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub h: u64,
    pub mu: UnitScalar,
    pub mult: u64,
}

pub fn make_factor(h: u64, mu: UnitScalar, mult: u64) -> Result<Factor> {
    if h == 0 || mult == 0 {
        return Err(Error::InvalidFactor { h, mult });
    }
    Ok(Factor { h, mu, mult })
}

impl Factor {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.h
            .cmp(&other.h)
            .then_with(|| self.mu.canonical_cmp(&other.mu))
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.h == 1 {
            write!(f, "(t \u{2212} {})^{}", self.mu, self.mult)
        } else {
            write!(f, "(t^{} \u{2212} {})^{}", self.h, self.mu, self.mult)
        }
    }
}

/// Product of factors in canonical form: merged on equal `(h, μ)` and
/// sorted by `h`, then by multiplier.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FactoredCharPoly {
    factors: Vec<Factor>,
}

pub fn product(factors: impl IntoIterator<Item = Factor>) -> FactoredCharPoly {
    let mut merged: Vec<Factor> = Vec::new();
    for f in factors {
        match merged.iter_mut().find(|g| g.h == f.h && g.mu == f.mu) {
            Some(g) => g.mult += f.mult,
            None => merged.push(f),
        }
    }
    merged.sort_by(Factor::key_cmp);
    FactoredCharPoly { factors: merged }
}

impl FactoredCharPoly {
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|f| f.h * f.mult).sum()
    }

    /// Monic coefficient vector, leading coefficient first.
    pub fn expand(&self) -> Vec<Complex64> {
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for f in &self.factors {
            let mut linear = vec![Complex64::zero(); f.h as usize + 1];
            linear[0] = Complex64::new(1.0, 0.0);
            linear[f.h as usize] = -f.mu.to_complex();
            for _ in 0..f.mult {
                poly = convolve(&poly, &linear);
            }
        }
        poly
    }

    pub fn roots(&self) -> SpectrumMultiset {
        SpectrumMultiset::from_values(
            self.factors
                .iter()
                .flat_map(|f| f.mu.roots(f.h).into_iter().map(move |r| (r, f.mult))),
        )
    }

    /// The polynomial of the inverse loop: every multiplier conjugated.
    pub fn conjugate(&self) -> FactoredCharPoly {
        product(self.factors.iter().map(|f| Factor {
            h: f.h,
            mu: f.mu.conj(),
            mult: f.mult,
        }))
    }

    pub fn is_exact(&self) -> bool {
        self.factors
            .iter()
            .all(|f| matches!(f.mu, UnitScalar::Angle(_)))
    }
}

impl fmt::Display for FactoredCharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Polynomial product of coefficient vectors (same ordering in and out).
pub fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation of a leading-first coefficient vector.
pub fn evaluate(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::zero(), |acc, c| acc * t + c)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumMultiset {
    entries: Vec<(UnitScalar, u64)>,
}

impl SpectrumMultiset {
    pub fn from_values(values: impl IntoIterator<Item = (UnitScalar, u64)>) -> Self {
        let mut entries: Vec<(UnitScalar, u64)> = Vec::new();
        for (v, m) in values {
            if m == 0 {
                continue;
            }
            match entries.iter_mut().find(|(w, _)| *w == v) {
                Some((_, k)) => *k += m,
                None => entries.push((v, m)),
            }
        }
        entries.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        SpectrumMultiset { entries }
    }

    pub fn entries(&self) -> &[(UnitScalar, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// Every eigenvalue repeated by multiplicity.
    pub fn points(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .flat_map(|(v, m)| std::iter::repeat_n(v.to_complex(), *m as usize))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMatch {
    pub passed: bool,
    pub left_count: u64,
    pub right_count: u64,
    /// Bottleneck distance of the best assignment; `None` on a count mismatch.
    pub max_distance: Option<f64>,
    /// The worst-matched pair when the comparison fails.
    pub witness: Option<(Complex64, Complex64)>,
}

/// Matches two spectra by a bottleneck-optimal assignment and passes when
/// every matched pair is within `tol`.
pub fn compare_spectra(a: &SpectrumMultiset, b: &SpectrumMultiset, tol: f64) -> SpectrumMatch {
    let (pa, pb) = (a.points(), b.points());
    let mut report = SpectrumMatch {
        passed: false,
        left_count: pa.len() as u64,
        right_count: pb.len() as u64,
        max_distance: None,
        witness: None,
    };
    if pa.len() != pb.len() {
        return report;
    }
    if pa.is_empty() {
        report.passed = true;
        report.max_distance = Some(0.0);
        return report;
    }
    let dist: Vec<Vec<f64>> = pa
        .iter()
        .map(|x| pb.iter().map(|y| (x - y).norm()).collect())
        .collect();
    let mut levels: Vec<f64> = dist.iter().flatten().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&dist, levels[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let threshold = levels[lo];
    let matching = perfect_matching(&dist, threshold).expect("largest level admits a matching");
    report.max_distance = Some(threshold);
    report.passed = threshold <= tol;
    if !report.passed {
        let (i, j) = matching
            .iter()
            .enumerate()
            .max_by(|(i, &j), (k, &l)| dist[*i][j].total_cmp(&dist[*k][l]))
            .map(|(i, &j)| (i, j))
            .expect("nonempty matching");
        report.witness = Some((pa[i], pb[j]));
    }
    report
}

/// Kuhn's augmenting-path matching using only edges with `dist ≤ limit`.
/// Returns `match_of_left[i] = j` when a perfect matching exists.
fn perfect_matching(dist: &[Vec<f64>], limit: f64) -> Option<Vec<usize>> {
    let n = dist.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        i: usize,
        dist: &[Vec<f64>],
        limit: f64,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..dist.len() {
            if dist[i][j] <= limit && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, dist, limit, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }

    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, dist, limit, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut left = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        left[o.expect("perfect matching")] = j;
    }
    Some(left)
}
