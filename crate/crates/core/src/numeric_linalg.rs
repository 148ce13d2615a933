//! Small dense complex matrix helpers: characteristic polynomials and
//! eigenvalues.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_traits::Zero;

pub type CMatrix = DMatrix<Complex64>;

/// Monic characteristic polynomial `det(t·I − M)`, leading coefficient
/// first, by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(m: &CMatrix) -> Vec<Complex64> {
    assert!(
        m.is_square(),
        "characteristic polynomial of a non-square matrix"
    );
    let n = m.nrows();
    let mut coeffs = vec![Complex64::zero(); n + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let mut acc = CMatrix::zeros(n, n);
    for k in 1..=n {
        acc = m * &acc;
        for i in 0..n {
            acc[(i, i)] += coeffs[k - 1];
        }
        let am = m * &acc;
        coeffs[k] = -am.trace() / k as f64;
    }
    coeffs
}

/// Eigenvalues from the diagonal of a complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m[(0, 0)]];
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .expect("complex Schur iteration converges on small matrices");
    let (_, t) = schur.unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Operator 2-norm estimate via the Frobenius norm (an upper bound).
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Groups values closer than `radius` (single linkage) and returns each
/// cluster's mean with its size.
pub fn cluster(values: &[Complex64], radius: f64) -> Vec<(Complex64, u64)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, u64)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(r, _, _)| *r == root) {
            Some((_, sum, count)) => {
                *sum += v;
                *count += 1;
            }
            None => groups.push((root, v, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| (sum / count as f64, count))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn charpoly_of_companion() {
        // companion of t^3 - 2t + 5
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-5.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        let p = characteristic_polynomial(&m);
        let expected = [c(1.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(5.0, 0.0)];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_diagonal_and_rotation() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.0, 1.0),
            c(0.0, -1.0),
        ]));
        let mut ev = eigenvalues(&d);
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);

        let rot =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let mut ev = eigenvalues(&rot);
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn clustering_merges_near_values() {
        let v = [c(1.0, 0.0), c(1.0 + 1e-9, 0.0), c(-1.0, 0.0)];
        let mut groups = cluster(&v, 1e-6);
        groups.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[1].1, 2);
    }
}
