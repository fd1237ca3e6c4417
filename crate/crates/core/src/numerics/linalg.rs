//! Dense linear algebra for the tiny systems that appear in Jacobian solves.

use crate::error::{Error, Result};

/// Determinants at or below this magnitude are treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SmallMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "SmallMatrix rows must be square");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn mul(&self, other: &SmallMatrix) -> SmallMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| self[(i, k)] * other[(k, j)]).sum();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len());
        (0..self.n).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn scale(&self, c: f64) -> SmallMatrix {
        Self { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    /// Determinant; closed forms up to 3x3, partial-pivot elimination beyond.
    pub fn det(&self) -> f64 {
        let m = self;
        match self.n {
            0 => 1.0,
            1 => m[(0, 0)],
            2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
            3 => {
                m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                    - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                    + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
            }
            _ => lu(m).map(|(_, _, det)| det).unwrap_or(0.0),
        }
    }
}

impl std::ops::Index<(usize, usize)> for SmallMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SmallMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorisation with partial pivoting: (packed LU, permutation, determinant).
fn lu(m: &SmallMatrix) -> Option<(SmallMatrix, Vec<usize>, f64)> {
    let n = m.n;
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))?;
        if a[(p, k)] == 0.0 {
            return Some((a, perm, 0.0));
        }
        if p != k {
            for j in 0..n {
                a.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            det = -det;
        }
        det *= a[(k, k)];
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            a[(i, k)] = f;
            for j in k + 1..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    Some((a, perm, det))
}

fn lu_solve(a: &SmallMatrix, perm: &[usize], b: &[f64]) -> Vec<f64> {
    let n = a.n;
    let mut y: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for k in 0..i {
            y[i] -= a[(i, k)] * y[k];
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= a[(i, k)] * y[k];
        }
        y[i] /= a[(i, i)];
    }
    y
}

/// Inverse and determinant. Errors with `SingularMatrix` when |det| <= 1e-12.
pub fn invert_small(m: &SmallMatrix) -> Result<(SmallMatrix, f64)> {
    let n = m.n;
    let det = m.det();
    if !(det.abs() > SINGULAR_THRESHOLD) {
        return Err(Error::SingularMatrix { det });
    }
    let inv = match n {
        1 => SmallMatrix::diag(&[1.0 / det]),
        2 => {
            SmallMatrix::from_rows(&[vec![m[(1, 1)] / det, -m[(0, 1)] / det], vec![-m[(1, 0)] / det, m[(0, 0)] / det]])
        }
        3 => {
            let mut inv = SmallMatrix::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[(i, j)] = (m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)]) / det;
                }
            }
            inv
        }
        _ => {
            let (a, perm, _) = lu(m).ok_or(Error::SingularMatrix { det })?;
            let mut inv = SmallMatrix::zeros(n);
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                for (i, v) in lu_solve(&a, &perm, &e).into_iter().enumerate() {
                    inv[(i, j)] = v;
                }
            }
            inv
        }
    };
    Ok((inv, det))
}

/// Solves `m x = b`. Errors with `SingularMatrix` when |det| <= 1e-12.
pub fn solve(m: &SmallMatrix, b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(m.n, b.len());
    if m.n <= 3 {
        let (inv, _) = invert_small(m)?;
        return Ok(inv.mul_vec(b));
    }
    let (a, perm, det) = lu(m).ok_or(Error::SingularMatrix { det: 0.0 })?;
    if !(det.abs() > SINGULAR_THRESHOLD) {
        return Err(Error::SingularMatrix { det });
    }
    Ok(lu_solve(&a, &perm, b))
}
