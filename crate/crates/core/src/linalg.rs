//! Dense matrices and vectors over `Q_p`.
//!
//! Elimination always pivots on the entry of smallest valuation, which is
//! the choice that loses the fewest trusted digits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{Padic, Qp};

/// Coordinates of a vector in a fixed basis.
pub type Vector = Vec<Padic>;

pub fn zero_vector(qp: &Qp, n: usize) -> Vector {
    vec![qp.zero(); n]
}

pub fn basis_vector(qp: &Qp, n: usize, i: usize) -> Vector {
    let mut v = zero_vector(qp, n);
    v[i] = qp.one();
    v
}

fn check_len(a: &[Padic], b: &[Padic]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

pub fn vec_add(a: &[Padic], b: &[Padic]) -> Result<Vector> {
    check_len(a, b)?;
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vec_sub(a: &[Padic], b: &[Padic]) -> Result<Vector> {
    check_len(a, b)?;
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn vec_scale(c: &Padic, a: &[Padic]) -> Result<Vector> {
    a.iter().map(|x| c.mul(x)).collect()
}

pub fn vec_neg(a: &[Padic]) -> Vector {
    a.iter().map(Padic::neg).collect()
}

/// `a + c * b`
pub fn vec_axpy(a: &[Padic], c: &Padic, b: &[Padic]) -> Result<Vector> {
    vec_add(a, &vec_scale(c, b)?)
}

pub fn vec_is_zero(a: &[Padic]) -> bool {
    a.iter().all(Padic::is_zero)
}

pub fn dot(a: &[Padic], b: &[Padic]) -> Result<Padic> {
    check_len(a, b)?;
    let qp = match a.first() {
        Some(x) => x.field(),
        None => return Err(Error::DimensionMismatch { expected: 1, got: 0 }),
    };
    let terms = a.iter().zip(b).map(|(x, y)| x.mul(y)).collect::<Result<Vec<_>>>()?;
    Padic::sum(&qp, &terms)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    qp: Qp,
    rows: usize,
    cols: usize,
    data: Vec<Padic>,
}

impl Matrix {
    pub fn zeros(qp: &Qp, rows: usize, cols: usize) -> Self {
        Matrix {
            qp: *qp,
            rows,
            cols,
            data: vec![qp.zero(); rows * cols],
        }
    }

    pub fn identity(qp: &Qp, n: usize) -> Self {
        let mut m = Self::zeros(qp, n, n);
        for i in 0..n {
            m.set(i, i, qp.one());
        }
        m
    }

    pub fn diagonal(qp: &Qp, diag: &[Padic]) -> Self {
        let mut m = Self::zeros(qp, diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn from_rows(qp: &Qp, rows: Vec<Vec<Padic>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            qp: *qp,
            rows: r,
            cols: c,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(qp: &Qp, n: usize, columns: &[Vector]) -> Result<Self> {
        let mut m = Self::zeros(qp, n, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: col.len(),
                });
            }
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &Qp {
        &self.qp
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Padic {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Padic) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.qp, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Submatrix of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut b = Matrix::zeros(&self.qp, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        b
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(&self.qp, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut terms = Vec::with_capacity(self.cols);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    terms.push(a.mul(b)?);
                }
                out.set(i, j, Padic::sum(&self.qp, &terms)?);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Padic]) -> Result<Vector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        (0..self.rows)
            .map(|i| {
                let mut terms = Vec::with_capacity(v.len());
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if a.is_exact_zero() || x.is_exact_zero() {
                        continue;
                    }
                    terms.push(a.mul(x)?);
                }
                Padic::sum(&self.qp, &terms)
            })
            .collect()
    }

    pub fn scale(&self, c: &Padic) -> Result<Matrix> {
        let data = self.data.iter().map(|x| c.mul(x)).collect::<Result<_>>()?;
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `x^T A y`
    pub fn bilinear(&self, x: &[Padic], y: &[Padic]) -> Result<Padic> {
        dot(x, &self.mul_vec(y)?)
    }

    pub fn det(&self) -> Result<Padic> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.qp.one();
        for c in 0..n {
            let Some(piv) = pivot_row(&a, c, c) else {
                return Ok(self.qp.zero());
            };
            if piv != c {
                a.swap_rows(piv, c);
                det = det.neg();
            }
            let pv = a.get(c, c).clone();
            det = det.mul(&pv)?;
            for r in c + 1..n {
                if a.get(r, c).is_exact_zero() {
                    continue;
                }
                let f = a.get(r, c).div(&pv)?;
                for k in c..n {
                    let v = a.get(r, k).sub(&f.mul(a.get(c, k))?)?;
                    a.set(r, k, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(&self.qp, n);
        for c in 0..n {
            let piv = pivot_row(&a, c, c).ok_or(Error::Singular)?;
            a.swap_rows(piv, c);
            inv.swap_rows(piv, c);
            let pv = a.get(c, c).inv()?;
            for k in 0..n {
                a.set(c, k, a.get(c, k).mul(&pv)?);
                inv.set(c, k, inv.get(c, k).mul(&pv)?);
            }
            for r in 0..n {
                if r == c || a.get(r, c).is_exact_zero() {
                    continue;
                }
                let f = a.get(r, c).clone();
                for k in 0..n {
                    let v = a.get(r, k).sub(&f.mul(a.get(c, k))?)?;
                    a.set(r, k, v);
                    let w = inv.get(r, k).sub(&f.mul(inv.get(c, k))?)?;
                    inv.set(r, k, w);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(&self.qp, self.rows)
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Padic] {
        &self.data
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

fn pivot_row(a: &Matrix, col: usize, from: usize) -> Option<usize> {
    (from..a.rows)
        .filter(|&r| !a.get(r, col).is_zero())
        .min_by_key(|&r| a.get(r, col).valuation())
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace(a: &Matrix) -> Result<Vec<Vector>> {
    let qp = *a.field();
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = pivot_row(&m, c, r) else {
            continue;
        };
        m.swap_rows(piv, r);
        let pv = m.get(r, c).inv()?;
        for k in 0..cols {
            m.set(r, k, m.get(r, k).mul(&pv)?);
        }
        for i in 0..rows {
            if i == r || m.get(i, c).is_exact_zero() {
                continue;
            }
            let f = m.get(i, c).clone();
            for k in 0..cols {
                let v = m.get(i, k).sub(&f.mul(m.get(r, k))?)?;
                m.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = zero_vector(&qp, cols);
        v[f] = qp.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = m.get(i, f).neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Rank of a matrix.
pub fn rank(a: &Matrix) -> Result<usize> {
    Ok(a.cols() - nullspace(a)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> Qp {
        Qp::with_default_precision(5).unwrap()
    }

    fn mat(qp: &Qp, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(qp, rows.iter().map(|r| r.iter().map(|&x| qp.int(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let f = q5();
        let a = mat(&f, &[&[2, 1, 0], &[5, 3, 1], &[0, 25, 7]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&a).unwrap().is_identity());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let f = q5();
        let a = mat(&f, &[&[2, 1, 0], &[5, 3, 1], &[0, 25, 7]]);
        // 2(21-25) - 1(35-0) + 0 = -43
        assert_eq!(a.det().unwrap(), f.int(-43));
        let s = mat(&f, &[&[1, 2], &[2, 4]]);
        assert!(s.det().unwrap().is_zero());
        assert_eq!(s.inverse(), Err(Error::Singular));
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let f = q5();
        let a = mat(&f, &[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 5, 1, 0]]);
        let ns = nullspace(&a).unwrap();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(vec_is_zero(&a.mul_vec(&v).unwrap()));
        }
        assert_eq!(rank(&a).unwrap(), 2);
    }
}
