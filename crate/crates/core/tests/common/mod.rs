#![allow(dead_code)]

use std::collections::BTreeMap;

use ahg_core::integer_linalg::{IntMatrix, IntVector};
use ahg_core::monodromy_engine::{
    check_nonresonance, validate_configuration, ParameterVector, PointConfiguration,
};
use ahg_core::spectral_algebra::{FactoredCharPoly, UnitScalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(h, angle in [0,1), multiplicity)` keyed by `(h, angle)`.
pub type FactorMap = BTreeMap<(u64, BigRational), u64>;

pub fn reduce(q: BigRational) -> BigRational {
    let f = q.floor();
    q - f
}

pub fn factor_map(p: &FactoredCharPoly) -> FactorMap {
    let mut out = FactorMap::new();
    for f in p.factors() {
        let angle = match &f.mu {
            UnitScalar::Angle(q) => q.clone(),
            UnitScalar::Complex(_) => panic!("exact input gives exact multipliers"),
        };
        *out.entry((f.h, angle)).or_insert(0) += f.mult;
    }
    out
}

fn add(map: &mut FactorMap, h: u64, angle: BigRational, mult: u64) {
    if mult > 0 {
        *map.entry((h, reduce(angle))).or_insert(0) += mult;
    }
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// One-dimensional oracle. With `Δ = [lo, hi]`, the point `hi > 0`
/// contributes `t^{hi} − e(−c)` and `lo < 0` contributes `t^{−lo} − e(c)`.
pub fn oracle_1d(points: &[i64], c: &BigRational, j0: usize) -> FactorMap {
    let a = points[j0 - 1];
    let hi = points.iter().copied().max().unwrap().max(0);
    let lo = points.iter().copied().min().unwrap().min(0);
    let mut map = FactorMap::new();
    let vol = (hi - lo) as u64;
    if a == hi && a > 0 {
        add(&mut map, a as u64, -c.clone(), 1);
        add(&mut map, 1, BigRational::zero(), vol - a as u64);
    } else if a == lo && a < 0 {
        add(&mut map, (-a) as u64, c.clone(), 1);
        add(&mut map, 1, BigRational::zero(), vol - (-a) as u64);
    } else {
        add(&mut map, 1, BigRational::zero(), vol);
    }
    map
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counterclockwise hull vertices (monotone chain, collinear points dropped).
pub fn hull_2d(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Twice the area of a counterclockwise polygon.
pub fn shoelace(poly: &[(i64, i64)]) -> i64 {
    (0..poly.len())
        .map(|k| {
            let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
            p.0 * q.1 - p.1 * q.0
        })
        .sum::<i64>()
        .abs()
}

fn primitive_2d(v: (i64, i64)) -> (i64, i64) {
    let g = v.0.gcd(&v.1);
    (v.0 / g, v.1 / g)
}

/// Two-dimensional oracle: walks the edges of the hull of `A ∪ {0}`.
pub fn oracle_2d(points: &[(i64, i64)], c: &[BigRational], j0: usize) -> FactorMap {
    let a = points[j0 - 1];
    let mut all = points.to_vec();
    all.push((0, 0));
    let poly = hull_2d(&all);
    let vol = shoelace(&poly);
    let pair = |rho: (i64, i64)| &c[0] * BigInt::from(rho.0) + &c[1] * BigInt::from(rho.1);
    let mut map = FactorMap::new();
    let mut cones = 0;
    for k in 0..poly.len() {
        let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
        // inward normal of a counterclockwise edge
        let normal = primitive_2d((-(q.1 - p.1), q.0 - p.0));
        let offset = normal.0 * p.0 + normal.1 * p.1;
        if offset >= 0 || normal.0 * a.0 + normal.1 * a.1 != offset {
            continue;
        }
        cones += (p.0 * q.1 - p.1 * q.0).abs();
        for (end, other) in [(p, q), (q, p)] {
            if end == a {
                continue;
            }
            let g = end.0.gcd(&end.1);
            let mut rho = primitive_2d((-end.1, end.0));
            if rho.0 * other.0 + rho.1 * other.1 < 0 {
                rho = (-rho.0, -rho.1);
            }
            let h = rho.0 * a.0 + rho.1 * a.1;
            assert!(h > 0);
            add(&mut map, h as u64, -pair(rho), g as u64);
        }
    }
    add(&mut map, 1, BigRational::zero(), (vol - cones) as u64);
    map
}

pub fn to_i64(p: &IntVector) -> Vec<i64> {
    p.iter().map(|x| x.to_i64().unwrap()).collect()
}

pub fn random_points(rng: &mut Rng8, n: usize, count: usize, bound: i64) -> Vec<IntVector> {
    (0..count)
        .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
        .collect()
}

/// A configuration generating `Z^n` with full-dimensional `Δ`, no repeated
/// points and no origin.
pub fn random_configuration(rng: &mut Rng8, n: usize, max_points: usize) -> PointConfiguration {
    loop {
        let count = rng.gen_range(n..=max_points);
        let mut pts = random_points(rng, n, count, 3);
        pts.retain(|p| p.iter().any(|x| !x.is_zero()));
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            continue;
        }
        pts.shuffle(rng);
        let a = PointConfiguration::new(pts).unwrap();
        if validate_configuration(&a).passed() {
            return a;
        }
    }
}

/// Rational `c` with denominators in `2..=11` that is non-resonant for `A`.
pub fn random_nonresonant_c(rng: &mut Rng8, a: &PointConfiguration) -> ParameterVector {
    loop {
        let c = ParameterVector::Exact(
            (0..a.n())
                .map(|_| {
                    let q = rng.gen_range(2..=11);
                    rat(rng.gen_range(-3 * q..=3 * q), q)
                })
                .collect(),
        );
        if !check_nonresonance(a, &c).unwrap().is_resonant() {
            return c;
        }
    }
}

/// Product of random elementary matrices and sign flips.
pub fn random_unimodular(rng: &mut Rng8, n: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    for _ in 0..2 * n + 2 {
        let mut e = IntMatrix::identity(n);
        if n > 1 {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n);
            while j == i {
                j = rng.gen_range(0..n);
            }
            let k: i64 = rng.gen_range(-2..=2);
            let row: Vec<Vec<BigInt>> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|col| {
                            if r == i && col == j {
                                BigInt::from(k)
                            } else {
                                e[(r, col)].clone()
                            }
                        })
                        .collect()
                })
                .collect();
            e = IntMatrix::from_rows(&row).unwrap();
        }
        if rng.gen_bool(0.3) {
            let flip = rng.gen_range(0..n);
            let rows: Vec<Vec<BigInt>> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|col| if r == flip { -e[(r, col)].clone() } else { e[(r, col)].clone() })
                        .collect()
                })
                .collect();
            e = IntMatrix::from_rows(&rows).unwrap();
        }
        u = &u * &e;
    }
    u
}

pub fn exact_c(c: &ParameterVector) -> Vec<BigRational> {
    match c {
        ParameterVector::Exact(v) => v.clone(),
        ParameterVector::Float(_) => panic!("expected exact parameters"),
    }
}
