//! Exact convex hulls and normalized volumes of lattice polytopes.
//!
//! A polytope is stored together with an affine lattice chart: an anchor
//! point and a saturated basis of the lattice `Lin(P - anchor) ∩ Z^n`. All
//! facet data lives in chart coordinates, so a `d`-dimensional polytope is
//! always full-dimensional in its chart `Z^d`. When the polytope is
//! full-dimensional in `Z^n` the chart is the identity (anchor `0`, standard
//! basis) and chart coordinates coincide with ambient ones.
//!
//! A 0-dimensional polytope has exactly one facet, the empty face. Its cone
//! `conv({0} ∪ ∅)` is the origin, whose normalized volume is 1.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::integer_linalg::{
    cofactor_normal, coordinates_in_basis, dot, hermite_normal_form, lattice_basis_of_span,
    primitive_vector, IntMatrix, IntVector,
};

pub type Point = IntVector;

/// `ambient = anchor + Σ y_k · basis[k]` for chart coordinates `y ∈ Z^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineChart {
    pub anchor: Point,
    pub basis: Vec<IntVector>,
}

impl AffineChart {
    fn identity(n: usize) -> Self {
        AffineChart {
            anchor: vec![BigInt::zero(); n],
            basis: (0..n)
                .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect())
                .collect(),
        }
    }

    /// Chart through `anchor` whose lattice saturates the span of `points - anchor`.
    pub fn spanned_by(anchor: &[BigInt], points: &[Point]) -> Self {
        let n = anchor.len();
        let edges: Vec<IntVector> = points
            .iter()
            .map(|p| p.iter().zip(anchor).map(|(a, b)| a - b).collect())
            .collect();
        let basis = lattice_basis_of_span(&edges);
        if basis.len() == n {
            return Self::identity(n);
        }
        AffineChart {
            anchor: anchor.to_vec(),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.anchor.len()
    }

    /// Chart coordinates of `p`, or `None` if `p` is off the affine lattice.
    pub fn to_chart(&self, p: &[BigInt]) -> Option<IntVector> {
        if p.len() != self.anchor.len() {
            return None;
        }
        let shifted: IntVector = p.iter().zip(&self.anchor).map(|(a, b)| a - b).collect();
        coordinates_in_basis(&self.basis, &shifted)
    }

    pub fn from_chart(&self, y: &[BigInt]) -> Point {
        let mut p = self.anchor.clone();
        for (coef, b) in y.iter().zip(&self.basis) {
            for (pi, bi) in p.iter_mut().zip(b) {
                *pi += coef * bi;
            }
        }
        p
    }
}

/// Inward facet inequality `⟨normal, y⟩ ≥ offset` in chart coordinates,
/// tight exactly on `incident` (indices into the polytope's vertex list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetData {
    pub normal: IntVector,
    pub offset: BigInt,
    pub incident: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    ambient_dim: usize,
    vertices: Vec<Point>,
    chart: AffineChart,
    chart_vertices: Vec<IntVector>,
    facets: Vec<FacetData>,
}

/// A face given by its vertex set, with its own lattice chart. The empty
/// face has no chart and dimension −1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub vertex_indices: BTreeSet<usize>,
    pub points: Vec<Point>,
    pub chart: Option<AffineChart>,
}

impl Face {
    pub fn from_points(points: Vec<Point>) -> Self {
        Face::with_indices(BTreeSet::new(), points)
    }

    fn with_indices(vertex_indices: BTreeSet<usize>, points: Vec<Point>) -> Self {
        let chart = points
            .first()
            .map(|anchor| AffineChart::spanned_by(anchor, &points));
        Face {
            vertex_indices,
            points,
            chart,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.chart.as_ref().map_or(-1, |c| c.dim() as isize)
    }

    pub fn contains_point(&self, p: &[BigInt]) -> bool {
        self.points.iter().any(|q| q.as_slice() == p)
    }

    /// The face as a polytope in its own right. Panics on the empty face.
    pub fn polytope(&self) -> LatticePolytope {
        assert!(!self.is_empty(), "the empty face is not a polytope");
        convex_hull(&self.points)
    }

    /// Normalized volume relative to the face's own lattice.
    pub fn normalized_volume(&self) -> BigInt {
        normalized_volume(&self.polytope())
    }
}

impl LatticePolytope {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn chart(&self) -> &AffineChart {
        &self.chart
    }

    pub fn chart_vertices(&self) -> &[IntVector] {
        &self.chart_vertices
    }

    pub fn facets(&self) -> &[FacetData] {
        &self.facets
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        match self.chart.to_chart(p) {
            Some(y) => self
                .facets
                .iter()
                .filter(|f| !f.incident.is_empty())
                .all(|f| dot(&f.normal, &y) >= f.offset),
            None => false,
        }
    }

    /// True if `p` lies in the relative interior.
    pub fn contains_in_interior(&self, p: &[BigInt]) -> bool {
        match self.chart.to_chart(p) {
            Some(y) => self.dim() == 0 || self.facets.iter().all(|f| dot(&f.normal, &y) > f.offset),
            None => false,
        }
    }

    pub fn face(&self, indices: &BTreeSet<usize>) -> Face {
        Face::with_indices(
            indices.clone(),
            indices.iter().map(|&i| self.vertices[i].clone()).collect(),
        )
    }

    pub fn vertex_index(&self, p: &[BigInt]) -> Option<usize> {
        self.vertices.iter().position(|v| v.as_slice() == p)
    }

    /// Every nonempty proper face, as the closure of the facet vertex sets
    /// under intersection. Ordered by dimension, then by vertex set.
    pub fn proper_faces(&self) -> Vec<Face> {
        let mut family: BTreeSet<BTreeSet<usize>> = self
            .facets
            .iter()
            .filter(|f| !f.incident.is_empty())
            .map(|f| f.incident.clone())
            .collect();
        loop {
            let current: Vec<_> = family.iter().cloned().collect();
            let mut grew = false;
            for (i, a) in current.iter().enumerate() {
                for b in &current[i + 1..] {
                    let meet: BTreeSet<usize> = a.intersection(b).copied().collect();
                    if !meet.is_empty() && family.insert(meet) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut faces: Vec<Face> = family.iter().map(|s| self.face(s)).collect();
        faces.sort_by(|a, b| {
            a.dim()
                .cmp(&b.dim())
                .then_with(|| a.vertex_indices.cmp(&b.vertex_indices))
        });
        faces
    }
}

fn sub(a: &[BigInt], b: &[BigInt]) -> IntVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dedup_sorted(points: &[Point]) -> Vec<Point> {
    let set: BTreeSet<Point> = points.iter().cloned().collect();
    set.into_iter().collect()
}

/// Calls `f` on every `k`-subset of `0..n`, in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Facet inequalities of a full-dimensional point set in `Z^d`, by testing
/// the hyperplane through every `d`-subset for one-sidedness.
fn enumerate_facets(points: &[IntVector], d: usize) -> Vec<(IntVector, BigInt)> {
    let mut found: BTreeSet<(IntVector, BigInt)> = BTreeSet::new();
    for_each_subset(points.len(), d, |subset| {
        let base = &points[subset[0]];
        let rows: Vec<IntVector> = subset[1..].iter().map(|&i| sub(&points[i], base)).collect();
        let Ok(normal) = primitive_vector(&cofactor_normal(&rows)) else {
            return;
        };
        let offset = dot(&normal, base);
        let (mut below, mut above) = (false, false);
        for p in points {
            match dot(&normal, p).cmp(&offset) {
                std::cmp::Ordering::Less => below = true,
                std::cmp::Ordering::Greater => above = true,
                std::cmp::Ordering::Equal => {}
            }
            if below && above {
                return;
            }
        }
        if below {
            found.insert((normal.iter().map(|x| -x).collect(), -offset));
        } else {
            found.insert((normal, offset));
        }
    });
    found.into_iter().collect()
}

fn matrix_rank(rows: &[IntVector]) -> usize {
    match IntMatrix::from_rows(rows) {
        Ok(m) => hermite_normal_form(&m).rank(),
        Err(_) => 0,
    }
}

/// Convex hull of a nonempty set of lattice points. Duplicates are ignored;
/// lower-dimensional inputs produce lower-dimensional polytopes.
pub fn convex_hull(points: &[Point]) -> LatticePolytope {
    assert!(!points.is_empty(), "convex hull of an empty point set");
    let ambient_dim = points[0].len();
    let points = dedup_sorted(points);
    let chart = AffineChart::spanned_by(&points[0], &points);
    let d = chart.dim();
    let coords: Vec<IntVector> = points
        .iter()
        .map(|p| chart.to_chart(p).expect("point lies on its own chart"))
        .collect();

    if d == 0 {
        return LatticePolytope {
            ambient_dim,
            vertices: points,
            chart,
            chart_vertices: coords,
            facets: vec![FacetData {
                normal: Vec::new(),
                offset: BigInt::zero(),
                incident: BTreeSet::new(),
            }],
        };
    }

    let inequalities = enumerate_facets(&coords, d);
    let vertex_mask: Vec<bool> = coords
        .iter()
        .map(|y| {
            let tight: Vec<IntVector> = inequalities
                .iter()
                .filter(|(n, b)| &dot(n, y) == b)
                .map(|(n, _)| n.clone())
                .collect();
            matrix_rank(&tight) == d
        })
        .collect();
    let vertices: Vec<Point> = points
        .iter()
        .zip(&vertex_mask)
        .filter(|(_, &keep)| keep)
        .map(|(p, _)| p.clone())
        .collect();
    let chart_vertices: Vec<IntVector> = coords
        .iter()
        .zip(&vertex_mask)
        .filter(|(_, &keep)| keep)
        .map(|(y, _)| y.clone())
        .collect();
    let facets = inequalities
        .into_iter()
        .map(|(normal, offset)| {
            let incident = chart_vertices
                .iter()
                .enumerate()
                .filter(|(_, y)| dot(&normal, y) == offset)
                .map(|(i, _)| i)
                .collect();
            FacetData {
                normal,
                offset,
                incident,
            }
        })
        .collect();
    LatticePolytope {
        ambient_dim,
        vertices,
        chart,
        chart_vertices,
        facets,
    }
}

/// The facets of `p` as faces. A point has the single empty facet.
pub fn faces_of_codim_one(p: &LatticePolytope) -> Vec<Face> {
    p.facets.iter().map(|f| p.face(&f.incident)).collect()
}

/// `d! · vol(P)` measured in the lattice of the affine span of `P`.
pub fn normalized_volume(p: &LatticePolytope) -> BigInt {
    normalized_volume_from(p, 0)
}

/// Cone decomposition from the vertex `anchor`: the sum over facets `F`
/// avoiding the anchor of `height(anchor, F) · Vol(F)`.
pub fn normalized_volume_from(p: &LatticePolytope, anchor: usize) -> BigInt {
    if p.dim() == 0 {
        return BigInt::one();
    }
    let apex = &p.chart_vertices[anchor];
    p.facets
        .iter()
        .filter(|f| !f.incident.contains(&anchor))
        .map(|f| {
            lattice_height(&f.normal, &f.offset, apex) * p.face(&f.incident).normalized_volume()
        })
        .sum()
}

/// Primitive inward conormal `(ρ, b)` of the facet `f` of `p`, in the chart
/// coordinates of `p` (ambient coordinates when `p` is full-dimensional).
pub fn inner_conormal(p: &LatticePolytope, f: &Face) -> Result<(IntVector, BigInt)> {
    let wanted: BTreeSet<&Point> = f.points.iter().collect();
    p.facets
        .iter()
        .find(|facet| {
            let have: BTreeSet<&Point> = facet.incident.iter().map(|&i| &p.vertices[i]).collect();
            have == wanted
        })
        .map(|facet| (facet.normal.clone(), facet.offset.clone()))
        .ok_or(Error::NotAFacet)
}

/// Lattice distance `⟨ρ, a⟩ − b` of `a` from the hyperplane `⟨ρ, ·⟩ = b`.
pub fn lattice_height(normal: &[BigInt], offset: &BigInt, a: &[BigInt]) -> BigInt {
    dot(normal, a) - offset
}

/// Applies an integer matrix to every point.
pub fn transform_points(u: &IntMatrix, points: &[Point]) -> Vec<Point> {
    points.iter().map(|p| u.mul_vector(p)).collect()
}

/// `true` when `p` is an integer point with every coordinate zero.
pub fn is_origin(p: &[BigInt]) -> bool {
    p.iter().all(Zero::is_zero)
}
