//! Nondegenerate quadratic spaces over `Q_p`, always carried in a diagonal
//! basis `Q(x) = sum a_i x_i^2`.
//!
//! Isotropy and equivalence questions are answered from the classical
//! invariants (dimension, discriminant class, Hasse invariant). Explicit
//! vectors are produced by a bounded search modulo `p^k` that solves for
//! one coordinate with a Hensel-lifted square root.

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, basis_vector, vec_axpy, vec_is_zero, vec_scale, Matrix, Vector};
use crate::padic::{hilbert_symbol, Padic, Qp, SquareClass};

/// Number of times the search modulus is raised before giving up.
pub const SEARCH_RAISES: u32 = 2;

/// Complete isometry invariants of a quadratic space over `Q_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub dim: usize,
    #[serde(skip)]
    pub disc: SquareClass,
    pub hasse: i8,
}

impl Invariants {
    pub fn of_diagonal(qp: &Qp, diag: &[Padic]) -> Result<Self> {
        let mut disc = SquareClass::one(qp.prime());
        let mut hasse = 1i8;
        for (i, a) in diag.iter().enumerate() {
            disc = disc.mul(&a.square_class()?);
            for b in &diag[i + 1..] {
                hasse *= hilbert_symbol(a, b)?;
            }
        }
        Ok(Invariants {
            dim: diag.len(),
            disc,
            hasse,
        })
    }

    /// Invariants of an orthogonal sum.
    pub fn orthogonal_sum(&self, other: &Invariants, qp: &Qp) -> Result<Self> {
        let cross = hilbert_symbol(&self.disc.to_padic(qp), &other.disc.to_padic(qp))?;
        Ok(Invariants {
            dim: self.dim + other.dim,
            disc: self.disc.mul(&other.disc),
            hasse: self.hasse * other.hasse * cross,
        })
    }

    /// Rank criteria: never for rank 1, `-d` square for rank 2,
    /// `(-1,-d) = hasse` for rank 3, `d != 1` or `hasse = (-1,-1)` for rank 4.
    pub fn is_isotropic(&self, qp: &Qp) -> Result<bool> {
        let minus_one = qp.int(-1);
        let minus_d = self.disc.to_padic(qp).neg();
        Ok(match self.dim {
            0 | 1 => false,
            2 => minus_d.is_square()?,
            3 => hilbert_symbol(&minus_one, &minus_d)? == self.hasse,
            4 => !self.disc.is_trivial() || self.hasse == hilbert_symbol(&minus_one, &minus_one)?,
            _ => true,
        })
    }

    /// Invariants of `V'` where `V = H + V'` with `H` a hyperbolic plane.
    pub fn split_hyperbolic(&self, qp: &Qp) -> Result<Self> {
        let minus_d = self.disc.to_padic(qp).neg();
        Ok(Invariants {
            dim: self.dim - 2,
            disc: minus_d.square_class()?,
            hasse: self.hasse * hilbert_symbol(&qp.int(-1), &minus_d)?,
        })
    }

    /// `(witt index, invariants of the anisotropic kernel)`.
    pub fn anisotropic_kernel(&self, qp: &Qp) -> Result<(usize, Invariants)> {
        let mut cur = *self;
        let mut index = 0;
        while cur.is_isotropic(qp)? {
            cur = cur.split_hyperbolic(qp)?;
            index += 1;
        }
        Ok((index, cur))
    }

    /// Whether a space with these invariants represents `a`.
    pub fn represents(&self, qp: &Qp, a: &Padic) -> Result<bool> {
        let line = Invariants::of_diagonal(qp, &[a.neg()])?;
        self.orthogonal_sum(&line, qp)?.is_isotropic(qp)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadSpace {
    qp: Qp,
    diag: Vec<Padic>,
    invariants: Invariants,
    witt_index: usize,
}

/// Basis of an orthogonal complement together with the diagonal form it carries.
#[derive(Clone, Debug)]
pub struct Complement {
    /// Mutually orthogonal vectors in ambient coordinates.
    pub basis: Vec<Vector>,
    /// `space.diag()[i] = Q(basis[i])`.
    pub space: QuadSpace,
}

#[derive(Clone, Debug)]
pub struct WittDecomposition {
    pub index: usize,
    /// Hyperbolic pairs `(p_i, q_i)` in ambient coordinates.
    pub pairs: Vec<(Vector, Vector)>,
    pub kernel: QuadSpace,
    pub kernel_basis: Vec<Vector>,
    /// Columns `p_1, q_1, ..., p_r, q_r, kernel basis`.
    pub basis_change: Matrix,
}

impl QuadSpace {
    pub fn new(qp: &Qp, diag: Vec<Padic>) -> Result<Self> {
        if diag.iter().any(Padic::is_zero) {
            return Err(Error::DegenerateForm);
        }
        if let Some(x) = diag.iter().find(|x| x.prime() != qp.prime()) {
            return Err(Error::PrimeMismatch(qp.prime(), x.prime()));
        }
        let invariants = Invariants::of_diagonal(qp, &diag)?;
        let (witt_index, _) = invariants.anisotropic_kernel(qp)?;
        Ok(QuadSpace {
            qp: *qp,
            diag,
            invariants,
            witt_index,
        })
    }

    pub fn from_ints(qp: &Qp, diag: &[i64]) -> Result<Self> {
        Self::new(qp, diag.iter().map(|&a| qp.int(a)).collect())
    }

    /// The space of dimension 0.
    pub fn zero_space(qp: &Qp) -> Self {
        QuadSpace {
            qp: *qp,
            diag: Vec::new(),
            invariants: Invariants {
                dim: 0,
                disc: SquareClass::one(qp.prime()),
                hasse: 1,
            },
            witt_index: 0,
        }
    }

    /// `r` hyperbolic planes `<1,-1>` in sequence.
    pub fn split(qp: &Qp, planes: usize) -> Result<Self> {
        let diag: Vec<i64> = (0..planes).flat_map(|_| [1, -1]).collect();
        Self::from_ints(qp, &diag)
    }

    /// The norm form of the quaternion division algebra, anisotropic of dimension 4.
    pub fn anisotropic_quaternary(qp: &Qp) -> Result<Self> {
        if qp.prime() == 2 {
            return Self::from_ints(qp, &[1, 1, 1, 1]);
        }
        let u = qp.nonresidue() as i64;
        let p = qp.prime() as i64;
        Self::from_ints(qp, &[1, -u, -p, u * p])
    }

    pub fn field(&self) -> &Qp {
        &self.qp
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Padic] {
        &self.diag
    }

    pub fn invariants(&self) -> &Invariants {
        &self.invariants
    }

    pub fn discriminant(&self) -> SquareClass {
        self.invariants.disc
    }

    pub fn hasse(&self) -> i8 {
        self.invariants.hasse
    }

    pub fn witt_index(&self) -> usize {
        self.witt_index
    }

    pub fn gram(&self) -> Matrix {
        Matrix::diagonal(&self.qp, &self.diag)
    }

    fn check_vec(&self, x: &[Padic]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn bilinear(&self, x: &[Padic], y: &[Padic]) -> Result<Padic> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        let mut terms = Vec::with_capacity(x.len());
        for ((a, xi), yi) in self.diag.iter().zip(x).zip(y) {
            if xi.is_exact_zero() || yi.is_exact_zero() {
                continue;
            }
            terms.push(a.mul(&xi.mul(yi)?)?);
        }
        Padic::sum(&self.qp, &terms)
    }

    pub fn q(&self, x: &[Padic]) -> Result<Padic> {
        self.bilinear(x, x)
    }

    /// Orthogonal sum `self + other` in concatenated coordinates.
    pub fn orthogonal_sum(&self, other: &QuadSpace) -> Result<QuadSpace> {
        let mut diag = self.diag.clone();
        diag.extend(other.diag.iter().cloned());
        QuadSpace::new(&self.qp, diag)
    }

    pub fn is_isotropic(&self) -> bool {
        self.witt_index > 0
    }

    /// A nonzero vector with `Q(x) = 0` exactly.
    pub fn isotropic_vector(&self) -> Result<Vector> {
        if !self.is_isotropic() {
            return Err(Error::Anisotropic);
        }
        let n = self.dim();
        let qp = self.qp;
        let embed = |idx: &[usize], sub: Vector| {
            let mut x = linalg::zero_vector(&qp, n);
            for (&i, v) in idx.iter().zip(sub) {
                x[i] = v;
            }
            x
        };
        for size in 2..=n.min(5) {
            for idx in combinations(n, size) {
                let coeffs: Vec<Padic> = idx.iter().map(|&i| self.diag[i].clone()).collect();
                if size < 5 && !Invariants::of_diagonal(&qp, &coeffs)?.is_isotropic(&qp)? {
                    continue;
                }
                let x = embed(&idx, null_vector_of_diagonal(&qp, &coeffs)?);
                if !self.q(&x)?.is_zero() {
                    return Err(Error::PrecisionExhausted {
                        remaining: 0,
                        context: "isotropic vector certification",
                    });
                }
                return Ok(x);
            }
        }
        unreachable!("an isotropic space has an isotropic subform of rank at most 5")
    }

    /// `x` with `Q(x) = a`.
    pub fn represent(&self, a: &Padic) -> Result<Vector> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        if !self.invariants.represents(&self.qp, a)? {
            return Err(Error::NotRepresented);
        }
        let n = self.dim();
        for i in 0..n {
            if let Some(r) = a.div(&self.diag[i])?.sqrt()? {
                let mut x = linalg::zero_vector(&self.qp, n);
                x[i] = r;
                return self.certify_value(x, a);
            }
        }
        let mut ext = self.diag.clone();
        ext.push(a.neg());
        let z = QuadSpace::new(&self.qp, ext)?.isotropic_vector()?;
        let (y, s) = z.split_at(n);
        let x = if !s[0].is_zero() {
            let inv = s[0].inv()?;
            vec_scale(&inv, y)?
        } else {
            // y is null in V, so V is universal: y + (a/2) q has Q = a
            let q = self.hyperbolic_pair(y)?;
            vec_axpy(y, &a.div_int(2)?, &q)?
        };
        self.certify_value(x, a)
    }

    fn certify_value(&self, x: Vector, a: &Padic) -> Result<Vector> {
        if self.q(&x)? != *a {
            return Err(Error::PrecisionExhausted {
                remaining: 0,
                context: "representation certification",
            });
        }
        Ok(x)
    }

    /// `q` with `Q(q) = 0` and `(p, q) = 1`.
    pub fn hyperbolic_pair(&self, p: &[Padic]) -> Result<Vector> {
        self.check_vec(p)?;
        if vec_is_zero(p) || !self.q(p)?.is_zero() {
            return Err(Error::NotNull);
        }
        let i = p.iter().position(|x| !x.is_zero()).expect("p is nonzero");
        let y = basis_vector(&self.qp, self.dim(), i);
        let py = self.bilinear(p, &y)?;
        let yy = self.q(&y)?;
        let coeff = yy.div(&py.square()?.mul_int(2)?)?.neg();
        vec_axpy(&vec_scale(&py.inv()?, &y)?, &coeff, p)
    }

    /// Orthogonal complement of `span`, returned in a diagonalizing basis.
    pub fn orthogonal_complement(&self, span: &[Vector]) -> Result<Complement> {
        let qp = self.qp;
        let n = self.dim();
        for s in span {
            self.check_vec(s)?;
        }
        let k = span.len();
        let mut restricted = Matrix::zeros(&qp, k, k);
        for i in 0..k {
            for j in 0..k {
                restricted.set(i, j, self.bilinear(&span[i], &span[j])?);
            }
        }
        if k > 0 && restricted.det()?.is_zero() {
            return Err(Error::DegenerateRestriction);
        }
        if k == n {
            return Ok(Complement {
                basis: Vec::new(),
                space: QuadSpace::zero_space(&qp),
            });
        }
        let rows: Vec<Vector> = span
            .iter()
            .map(|s| s.iter().zip(&self.diag).map(|(x, a)| x.mul(a)).collect())
            .collect::<Result<_>>()?;
        let ns = if k == 0 {
            (0..n).map(|i| basis_vector(&qp, n, i)).collect()
        } else {
            linalg::nullspace(&Matrix::from_rows(&qp, rows)?)?
        };
        let c = Matrix::from_columns(&qp, n, &ns)?;
        let g = c.transpose().mul(&self.gram())?.mul(&c)?;
        let (space, b) = diagonalize(&g)?;
        let basis = c.mul(&b)?.columns();
        Ok(Complement { basis, space })
    }

    /// Split off hyperbolic planes until the remainder is anisotropic.
    pub fn witt_decompose(&self) -> Result<WittDecomposition> {
        let qp = self.qp;
        let n = self.dim();
        let mut cur = self.clone();
        let mut basis: Vec<Vector> = (0..n).map(|i| basis_vector(&qp, n, i)).collect();
        let mut pairs = Vec::new();
        let to_ambient = |basis: &[Vector], x: &[Padic]| -> Result<Vector> {
            let mut out = linalg::zero_vector(&qp, n);
            for (b, c) in basis.iter().zip(x) {
                if !c.is_exact_zero() {
                    out = vec_axpy(&out, c, b)?;
                }
            }
            Ok(out)
        };
        while cur.is_isotropic() {
            let p = cur.isotropic_vector()?;
            let q = cur.hyperbolic_pair(&p)?;
            let comp = cur.orthogonal_complement(&[p.clone(), q.clone()])?;
            pairs.push((to_ambient(&basis, &p)?, to_ambient(&basis, &q)?));
            basis = comp
                .basis
                .iter()
                .map(|v| to_ambient(&basis, v))
                .collect::<Result<_>>()?;
            cur = comp.space;
        }
        let mut kernel: Vec<(Padic, Vector)> = cur.diag.iter().cloned().zip(basis).collect();
        kernel.sort_by_key(|(a, _)| {
            let c = a.square_class().expect("kernel entries are nonzero");
            (c.odd_valuation(), c.unit_class())
        });
        let (kdiag, kernel_basis): (Vec<Padic>, Vec<Vector>) = kernel.into_iter().unzip();
        let mut cols = Vec::with_capacity(n);
        for (p, q) in &pairs {
            cols.push(p.clone());
            cols.push(q.clone());
        }
        cols.extend(kernel_basis.iter().cloned());
        Ok(WittDecomposition {
            index: pairs.len(),
            pairs,
            kernel: if kdiag.is_empty() {
                QuadSpace::zero_space(&qp)
            } else {
                QuadSpace::new(&qp, kdiag)?
            },
            kernel_basis,
            basis_change: Matrix::from_columns(&qp, n, &cols)?,
        })
    }

    /// Isometric anisotropic kernels, decided by the complete invariants.
    pub fn witt_equivalent(&self, other: &QuadSpace) -> Result<bool> {
        if self.qp.prime() != other.qp.prime() {
            return Err(Error::PrimeMismatch(self.qp.prime(), other.qp.prime()));
        }
        let (_, a) = self.invariants.anisotropic_kernel(&self.qp)?;
        let (_, b) = other.invariants.anisotropic_kernel(&self.qp)?;
        Ok(a == b)
    }

    /// Same dimension, discriminant and Hasse invariant.
    pub fn isometric(&self, other: &QuadSpace) -> bool {
        self.invariants == other.invariants
    }
}

impl Serialize for QuadSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QuadSpace", 2)?;
        st.serialize_field("p", &self.qp.prime())?;
        st.serialize_field("diag", &self.diag)?;
        st.end()
    }
}

/// Diagonalize a symmetric Gram matrix: returns `(D, B)` with `B^T G B = D`.
///
/// A zero diagonal is handled by replacing `e_i` with `e_i + e_j`, whose
/// norm is `2 G_ij`.
pub fn diagonalize(gram: &Matrix) -> Result<(QuadSpace, Matrix)> {
    let qp = *gram.field();
    let n = gram.rows();
    if !gram.is_symmetric() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: gram.cols(),
        });
    }
    let mut g = gram.clone();
    let mut b = Matrix::identity(&qp, n);
    for k in 0..n {
        let diag_pivot = (k..n)
            .filter(|&i| !g.get(i, i).is_zero())
            .min_by_key(|&i| g.get(i, i).valuation());
        let pivot = match diag_pivot {
            Some(i) => i,
            None => {
                let mut best: Option<(usize, usize)> = None;
                for i in k..n {
                    for j in k..n {
                        if i != j && !g.get(i, j).is_zero() {
                            let better = match best {
                                None => true,
                                Some((bi, bj)) => g.get(i, j).valuation() < g.get(bi, bj).valuation(),
                            };
                            if better {
                                best = Some((i, j));
                            }
                        }
                    }
                }
                let (i, j) = best.ok_or(Error::DegenerateForm)?;
                add_basis_vector(&mut g, &mut b, i, j, &qp.one())?;
                i
            }
        };
        swap_basis(&mut g, &mut b, k, pivot);
        let pv = g.get(k, k).clone();
        for j in k + 1..n {
            if g.get(k, j).is_exact_zero() {
                continue;
            }
            let f = g.get(k, j).div(&pv)?.neg();
            add_basis_vector(&mut g, &mut b, j, k, &f)?;
        }
    }
    let diag = (0..n).map(|i| g.get(i, i).clone()).collect();
    Ok((QuadSpace::new(&qp, diag)?, b))
}

/// `e_i <- e_i + c e_j`, updating both the Gram matrix and the basis.
fn add_basis_vector(g: &mut Matrix, b: &mut Matrix, i: usize, j: usize, c: &Padic) -> Result<()> {
    let n = g.rows();
    for r in 0..n {
        let v = b.get(r, i).add(&c.mul(b.get(r, j))?)?;
        b.set(r, i, v);
    }
    for r in 0..n {
        let v = g.get(r, i).add(&c.mul(g.get(r, j))?)?;
        g.set(r, i, v);
    }
    for r in 0..n {
        let v = g.get(i, r).add(&c.mul(g.get(j, r))?)?;
        g.set(i, r, v);
    }
    Ok(())
}

fn swap_basis(g: &mut Matrix, b: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = g.rows();
    for r in 0..n {
        let (x, y) = (b.get(r, i).clone(), b.get(r, j).clone());
        b.set(r, i, y);
        b.set(r, j, x);
    }
    for r in 0..n {
        let (x, y) = (g.get(r, i).clone(), g.get(r, j).clone());
        g.set(r, i, y);
        g.set(r, j, x);
    }
    for r in 0..n {
        let (x, y) = (g.get(i, r).clone(), g.get(j, r).clone());
        g.set(i, r, y);
        g.set(j, r, x);
    }
}

/// Index subsets of `0..n` of the given size, in lexicographic order.
pub(crate) fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Null vector of `<a_1, ..., a_n>` (assumed isotropic, `n <= 5`).
///
/// Coefficients are first scaled by even powers of `p` to valuation 0 or 1.
/// Stage one solves for a coordinate sitting on a unit coefficient; if no
/// zero has such a unit coordinate, the coordinates on unit coefficients are
/// all divisible by `p`, and substituting `x_j = p y_j` then dividing by `p`
/// swaps the roles of the two coefficient groups for stage two.
fn null_vector_of_diagonal(qp: &Qp, coeffs: &[Padic]) -> Result<Vector> {
    let p = qp.prime();
    if coeffs.len() == 2 {
        let r = coeffs[1].div(&coeffs[0])?.neg().sqrt()?.ok_or(Error::Anisotropic)?;
        return Ok(vec![r, qp.one()]);
    }
    let halves: Vec<i64> = coeffs
        .iter()
        .map(|a| a.valuation().expect("nonzero").div_euclid(2))
        .collect();
    let mut normalized: Vec<Padic> = coeffs
        .iter()
        .zip(&halves)
        .map(|(a, &m)| a.div(&qp.p_power(2 * m)))
        .collect::<Result<_>>()?;
    if normalized.iter().all(|a| a.valuation() == Some(1)) {
        let pinv = qp.p_power(-1);
        normalized = normalized.iter().map(|a| a.mul(&pinv)).collect::<Result<_>>()?;
    }
    let unit_idx: Vec<usize> = (0..normalized.len())
        .filter(|&i| normalized[i].valuation() == Some(0))
        .collect();
    let other_idx: Vec<usize> = (0..normalized.len())
        .filter(|&i| normalized[i].valuation() != Some(0))
        .collect();
    let swapped: Vec<Padic> = normalized
        .iter()
        .map(|a| {
            if a.valuation() == Some(0) {
                a.mul(&qp.p_power(1))
            } else {
                a.mul(&qp.p_power(-1))
            }
        })
        .collect::<Result<_>>()?;
    let k0 = if p == 2 { 3 } else { 1 };
    for k in k0..=k0 + SEARCH_RAISES {
        let found = match search_mod_pk(qp, &normalized, &unit_idx, k)? {
            Some(y) => Some(y),
            None => search_mod_pk(qp, &swapped, &other_idx, k)?.map(|mut y| {
                for &j in &unit_idx {
                    y[j] = y[j].mul(&qp.p_power(1)).expect("scaling by p");
                }
                y
            }),
        };
        if let Some(y) = found {
            return y
                .iter()
                .zip(&halves)
                .map(|(v, &m)| v.mul(&qp.p_power(-m)))
                .collect();
        }
    }
    Err(Error::SearchExhausted(k0 + SEARCH_RAISES))
}

/// Enumerate the non-solved coordinates over `[0, p^k)` in lexicographic
/// order and solve `b_i x_i^2 = -sum_{j != i} b_j y_j^2` by a square root.
fn search_mod_pk(qp: &Qp, b: &[Padic], solved: &[usize], k: u32) -> Result<Option<Vector>> {
    let n = b.len();
    let modulus = qp.prime().pow(k);
    let values: Vec<Padic> = (0..modulus).map(|v| qp.int(v as i64)).collect();
    let squares: Vec<Padic> = values.iter().map(Padic::square).collect::<Result<_>>()?;
    for &i in solved {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let total = modulus.pow(others.len() as u32);
        let mut digits = vec![0usize; others.len()];
        for counter in 1..total {
            let mut c = counter;
            for d in digits.iter_mut().rev() {
                *d = (c % modulus) as usize;
                c /= modulus;
            }
            let mut sum = qp.zero();
            for (&j, &d) in others.iter().zip(&digits) {
                if d != 0 {
                    sum = sum.add(&b[j].mul(&squares[d])?)?;
                }
            }
            let target = sum.div(&b[i])?.neg();
            let root = if target.is_zero() {
                Some(qp.zero())
            } else {
                target.sqrt()?
            };
            if let Some(r) = root {
                let mut y = linalg::zero_vector(qp, n);
                y[i] = r;
                for (&j, &d) in others.iter().zip(&digits) {
                    y[j] = values[d].clone();
                }
                return Ok(Some(y));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> Qp {
        Qp::with_default_precision(p).unwrap()
    }

    #[test]
    fn diagonal_gram_keeps_identity_basis() {
        let f = q(5);
        let g = Matrix::diagonal(&f, &[f.int(1), f.int(3), f.int(10)]);
        let (v, b) = diagonalize(&g).unwrap();
        // pivoting may reorder, so check congruence rather than identity
        assert_eq!(b.transpose().mul(&g).unwrap().mul(&b).unwrap(), v.gram());
        let g2 = Matrix::diagonal(&f, &[f.int(1), f.int(3)]);
        assert!(diagonalize(&g2).unwrap().1.is_identity());
    }

    #[test]
    fn hyperbolic_gram_polarizes() {
        let f = q(5);
        let g = Matrix::from_rows(&f, vec![vec![f.zero(), f.one()], vec![f.one(), f.zero()]]).unwrap();
        let (v, b) = diagonalize(&g).unwrap();
        assert_eq!(v.diag(), &[f.int(2), f.ratio(-1, 2).unwrap()]);
        assert_eq!(b.transpose().mul(&g).unwrap().mul(&b).unwrap(), v.gram());
        assert!(v.witt_equivalent(&QuadSpace::from_ints(&f, &[1, -1]).unwrap()).unwrap());
    }

    #[test]
    fn degenerate_gram_is_rejected() {
        let f = q(3);
        let g = Matrix::from_rows(&f, vec![vec![f.one(), f.one()], vec![f.one(), f.one()]]).unwrap();
        assert_eq!(diagonalize(&g).unwrap_err(), Error::DegenerateForm);
        assert_eq!(QuadSpace::from_ints(&f, &[1, 0]).unwrap_err(), Error::DegenerateForm);
    }

    #[test]
    fn isotropy_examples() {
        let f = q(5);
        assert!(QuadSpace::from_ints(&f, &[1, -1]).unwrap().is_isotropic());
        // -1 = 4 mod 5 is a residue, so <1,1> is isotropic over Q_5
        let v = QuadSpace::from_ints(&f, &[1, 1]).unwrap();
        assert!(v.is_isotropic());
        let x = v.isotropic_vector().unwrap();
        assert!(v.q(&x).unwrap().is_zero() && !vec_is_zero(&x));
        // but not over Q_3
        assert!(!QuadSpace::from_ints(&q(3), &[1, 1]).unwrap().is_isotropic());
        assert!(!QuadSpace::from_ints(&f, &[3]).unwrap().is_isotropic());
        for p in [2u64, 3, 5, 7] {
            let f = q(p);
            let v = QuadSpace::from_ints(&f, &[1, 1, 1, 1, 1]).unwrap();
            assert!(v.is_isotropic());
            let x = v.isotropic_vector().unwrap();
            assert!(v.q(&x).unwrap().is_zero());
            assert!(!QuadSpace::anisotropic_quaternary(&f).unwrap().is_isotropic());
        }
    }

    #[test]
    fn isotropic_vector_examples() {
        let f = q(5);
        let v = QuadSpace::from_ints(&f, &[1, -1]).unwrap();
        assert_eq!(v.isotropic_vector().unwrap(), vec![f.one(), f.one()]);
        let v = QuadSpace::from_ints(&f, &[1, -1, 3]).unwrap();
        assert_eq!(v.isotropic_vector().unwrap(), vec![f.one(), f.one(), f.zero()]);
        let f7 = q(7);
        let v = QuadSpace::from_ints(&f7, &[2, -3, 1]).unwrap();
        let x = v.isotropic_vector().unwrap();
        assert!(v.q(&x).unwrap().is_zero() && !vec_is_zero(&x));
        let an = QuadSpace::anisotropic_quaternary(&f7).unwrap();
        assert_eq!(an.isotropic_vector().unwrap_err(), Error::Anisotropic);
    }

    #[test]
    fn represent_examples() {
        let f = q(5);
        let v = QuadSpace::from_ints(&f, &[1, 1]).unwrap();
        assert_eq!(v.represent(&f.one()).unwrap(), vec![f.one(), f.zero()]);
        let h = QuadSpace::from_ints(&f, &[1, -1]).unwrap();
        for a in [2i64, 5, 7, -10, 3] {
            let a = f.int(a);
            assert_eq!(h.q(&h.represent(&a).unwrap()).unwrap(), a);
        }
        // (a+1)/2, (a-1)/2 is an independent witness for the hyperbolic plane
        let a = f.int(7);
        let w = vec![f.int(4), f.int(3)];
        assert_eq!(h.q(&w).unwrap(), a);
        let line = QuadSpace::from_ints(&f, &[1]).unwrap();
        assert!(!f.int(2).is_square().unwrap());
        assert_eq!(line.represent(&f.int(2)).unwrap_err(), Error::NotRepresented);
    }

    #[test]
    fn hyperbolic_pair_examples() {
        let f = q(5);
        let h = QuadSpace::from_ints(&f, &[1, -1]).unwrap();
        let p = vec![f.one(), f.one()];
        let qv = h.hyperbolic_pair(&p).unwrap();
        assert_eq!(qv, vec![f.ratio(1, 2).unwrap(), f.ratio(-1, 2).unwrap()]);
        let v = QuadSpace::from_ints(&f, &[1, -1, 1, -1]).unwrap();
        let p = vec![f.one(), f.one(), f.zero(), f.zero()];
        let qv = v.hyperbolic_pair(&p).unwrap();
        assert!(qv[2].is_zero() && qv[3].is_zero());
        assert!(v.q(&qv).unwrap().is_zero());
        assert_eq!(v.bilinear(&p, &qv).unwrap(), f.one());
        assert_eq!(v.hyperbolic_pair(&[f.one(), f.zero(), f.zero(), f.zero()]).unwrap_err(), Error::NotNull);
    }

    #[test]
    fn witt_decomposition_examples() {
        let f = q(5);
        let h = QuadSpace::from_ints(&f, &[1, -1]).unwrap();
        let d = h.witt_decompose().unwrap();
        assert_eq!((d.index, d.kernel.dim()), (1, 0));
        let v = QuadSpace::from_ints(&f, &[1, -1, 1, -1, 3]).unwrap();
        let d = v.witt_decompose().unwrap();
        assert_eq!((d.index, d.kernel.dim()), (2, 1));
        assert_eq!(d.kernel.discriminant(), f.int(3).square_class().unwrap());
        let gram = d.basis_change.transpose().mul(&v.gram()).unwrap().mul(&d.basis_change).unwrap();
        for (i, (p, qv)) in d.pairs.iter().enumerate() {
            assert!(v.q(p).unwrap().is_zero() && v.q(qv).unwrap().is_zero());
            assert_eq!(gram.get(2 * i, 2 * i + 1), &f.one());
        }
        let w = QuadSpace::from_ints(&f, &[1, 1]).unwrap();
        assert_eq!(w.witt_decompose().unwrap().index, usize::from(w.is_isotropic()));
    }

    #[test]
    fn witt_equivalence_examples() {
        let f = q(5);
        let w = QuadSpace::from_ints(&f, &[1, -1]).unwrap();
        let v = QuadSpace::from_ints(&f, &[1, -1, 1, -1]).unwrap();
        assert!(w.witt_equivalent(&v).unwrap());
        assert!(v.witt_equivalent(&v).unwrap());
        let a = QuadSpace::from_ints(&f, &[1]).unwrap();
        let b = QuadSpace::from_ints(&f, &[f.nonresidue() as i64]).unwrap();
        assert!(!a.witt_equivalent(&b).unwrap());
        let other = QuadSpace::from_ints(&q(3), &[1, -1]).unwrap();
        assert!(matches!(w.witt_equivalent(&other), Err(Error::PrimeMismatch(5, 3))));
    }

    #[test]
    fn complement_examples() {
        let f = q(5);
        let v = QuadSpace::from_ints(&f, &[1, -1, 1, -1]).unwrap();
        let p = vec![f.one(), f.one(), f.zero(), f.zero()];
        let qv = v.hyperbolic_pair(&p).unwrap();
        let c = v.orthogonal_complement(&[p.clone(), qv.clone()]).unwrap();
        assert_eq!(c.space.dim(), 2);
        assert_eq!(c.space.witt_decompose().unwrap().index, 1);
        for b in &c.basis {
            assert!(v.bilinear(b, &p).unwrap().is_zero());
            assert!(v.bilinear(b, &qv).unwrap().is_zero());
        }
        let plane = QuadSpace::from_ints(&f, &[1, -1]).unwrap();
        assert!(v.isometric(&plane.orthogonal_sum(&c.space).unwrap()));
        let all: Vec<Vector> = (0..4).map(|i| basis_vector(&f, 4, i)).collect();
        assert_eq!(v.orthogonal_complement(&all).unwrap().space.dim(), 0);
        assert_eq!(
            v.orthogonal_complement(std::slice::from_ref(&p)).unwrap_err(),
            Error::DegenerateRestriction
        );
    }
}
