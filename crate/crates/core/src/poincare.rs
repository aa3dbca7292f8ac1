//! The Poincaré group of `W` as the stabilizer of a null vector in `SO(V)`,
//! the partial conformal group, and the spin cover `SL(2) -> SO(3)`.
//!
//! All matrices acting on `V` are written in the adapted basis `(p, q, W)`,
//! where `(p, q)` is a hyperbolic pair and `W = <p, q>^perp` carries a
//! diagonal basis.

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, vec_add, vec_is_zero, vec_neg, vec_scale, zero_vector, Matrix, Vector};
use crate::orthogonal::Isometry;
use crate::padic::{Padic, Qp};
use crate::quadspace::QuadSpace;

#[derive(Clone, Debug)]
pub struct Decomposition {
    qp: Qp,
    space: QuadSpace,
    p: Vector,
    q: Vector,
    w_basis: Vec<Vector>,
    w_space: QuadSpace,
    /// Columns `p, q, w_1, ..., w_m` in ambient coordinates.
    change: Matrix,
    change_inv: Matrix,
    gram: Matrix,
}

impl Decomposition {
    /// Adapted basis for a chosen null vector `p`.
    pub fn new(space: &QuadSpace, p: &[Padic]) -> Result<Self> {
        let qp = *space.field();
        let q = space.hyperbolic_pair(p)?;
        let comp = space.orthogonal_complement(&[p.to_vec(), q.clone()])?;
        let n = space.dim();
        let mut cols = vec![p.to_vec(), q.clone()];
        cols.extend(comp.basis.iter().cloned());
        let change = Matrix::from_columns(&qp, n, &cols)?;
        let change_inv = change.inverse()?;
        // The adapted form is known exactly; the computed one only certifies it.
        let mut gram = Matrix::zeros(&qp, n, n);
        gram.set(0, 1, qp.one());
        gram.set(1, 0, qp.one());
        for (k, a) in comp.space.diag().iter().enumerate() {
            gram.set(2 + k, 2 + k, a.clone());
        }
        if change.transpose().mul(&space.gram())?.mul(&change)? != gram {
            return Err(Error::PrecisionExhausted {
                remaining: 0,
                context: "adapted basis certification",
            });
        }
        Ok(Decomposition {
            qp,
            space: space.clone(),
            p: p.to_vec(),
            q,
            w_basis: comp.basis,
            w_space: comp.space,
            change,
            change_inv,
            gram,
        })
    }

    /// Adapted basis built from the first isotropic vector the search finds.
    pub fn standard(space: &QuadSpace) -> Result<Self> {
        let p = space.isotropic_vector()?;
        Self::new(space, &p)
    }

    pub fn field(&self) -> &Qp {
        &self.qp
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn p(&self) -> &[Padic] {
        &self.p
    }

    pub fn q(&self) -> &[Padic] {
        &self.q
    }

    pub fn w_basis(&self) -> &[Vector] {
        &self.w_basis
    }

    pub fn w_space(&self) -> &QuadSpace {
        &self.w_space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn dim_w(&self) -> usize {
        self.w_space.dim()
    }

    /// Gram matrix of `V` in the adapted basis.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn w_gram(&self) -> Matrix {
        self.w_space.gram()
    }

    pub fn to_ambient(&self, x: &[Padic]) -> Result<Vector> {
        self.change.mul_vec(x)
    }

    pub fn from_ambient(&self, x: &[Padic]) -> Result<Vector> {
        self.change_inv.mul_vec(x)
    }

    /// Conjugates an adapted-basis isometry into ambient coordinates.
    pub fn isometry_to_ambient(&self, g: &Isometry) -> Result<Isometry> {
        let m = self.change.mul(g.matrix())?.mul(&self.change_inv)?;
        Isometry::of_space(&self.space, m)
    }

    pub fn isometry_from_ambient(&self, g: &Isometry) -> Result<Isometry> {
        let m = self.change_inv.mul(g.matrix())?.mul(&self.change)?;
        Isometry::certify(&self.gram, m)
    }

    /// Adapted coordinates `(alpha, beta, w)`.
    pub fn assemble(&self, alpha: &Padic, beta: &Padic, w: &[Padic]) -> Vector {
        let mut x = vec![alpha.clone(), beta.clone()];
        x.extend(w.iter().cloned());
        x
    }

    pub fn bilinear(&self, x: &[Padic], y: &[Padic]) -> Result<Padic> {
        self.gram.bilinear(x, y)
    }

    pub fn q_adapted(&self, x: &[Padic]) -> Result<Padic> {
        self.gram.bilinear(x, x)
    }
}

/// Element `(t, R)` of `W x| SO(W)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoincareElt {
    pub t: Vector,
    pub r: Isometry,
}

impl PoincareElt {
    pub fn new(t: Vector, r: Isometry) -> Result<Self> {
        if t.len() != r.dim() {
            return Err(Error::DimensionMismatch {
                expected: r.dim(),
                got: t.len(),
            });
        }
        if !r.is_special() {
            return Err(Error::NotIsometry);
        }
        Ok(PoincareElt { t, r })
    }

    pub fn identity(decomp: &Decomposition) -> Self {
        PoincareElt {
            t: zero_vector(decomp.field(), decomp.dim_w()),
            r: Isometry::identity(&decomp.w_gram()),
        }
    }

    pub fn mul(&self, other: &PoincareElt) -> Result<PoincareElt> {
        let t = vec_add(&self.t, &self.r.apply(&other.t)?)?;
        Ok(PoincareElt {
            t,
            r: self.r.compose(&other.r)?,
        })
    }

    pub fn inverse(&self) -> Result<PoincareElt> {
        let r = self.r.inverse()?;
        let t = vec_neg(&r.apply(&self.t)?);
        Ok(PoincareElt { t, r })
    }

    /// `w -> R w + t`.
    pub fn act(&self, w: &[Padic]) -> Result<Vector> {
        vec_add(&self.r.apply(w)?, &self.t)
    }
}

impl Serialize for PoincareElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PoincareElt", 2)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("R", self.r.matrix())?;
        st.end()
    }
}

/// `c~ h(t, R)`, with `c~ = diag(c, 1/c, I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialConfElt {
    pub c: Padic,
    pub t: Vector,
    pub r: Isometry,
}

impl PartialConfElt {
    pub fn new(c: Padic, t: Vector, r: Isometry) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroInput);
        }
        let h = PoincareElt::new(t, r)?;
        Ok(PartialConfElt { c, t: h.t, r: h.r })
    }

    pub fn identity(decomp: &Decomposition) -> Self {
        let h = PoincareElt::identity(decomp);
        PartialConfElt {
            c: decomp.field().one(),
            t: h.t,
            r: h.r,
        }
    }

    pub fn dilation(decomp: &Decomposition, c: Padic) -> Result<Self> {
        let h = PoincareElt::identity(decomp);
        Self::new(c, h.t, h.r)
    }

    pub fn from_poincare(elt: &PoincareElt) -> Self {
        PartialConfElt {
            c: elt.r.gram().field().one(),
            t: elt.t.clone(),
            r: elt.r.clone(),
        }
    }

    pub fn poincare_part(&self) -> PoincareElt {
        PoincareElt {
            t: self.t.clone(),
            r: self.r.clone(),
        }
    }
}

impl Serialize for PartialConfElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PartialConfElt", 3)?;
        st.serialize_field("c", &self.c)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("R", self.r.matrix())?;
        st.end()
    }
}

/// `c~ h(t,R) c'~ h(t',R') = (cc')~ h(t/c' + R t', R R')`.
pub fn partial_mul(x: &PartialConfElt, y: &PartialConfElt) -> Result<PartialConfElt> {
    let t = vec_add(&vec_scale(&y.c.inv()?, &x.t)?, &x.r.apply(&y.t)?)?;
    Ok(PartialConfElt {
        c: x.c.mul(&y.c)?,
        t,
        r: x.r.compose(&y.r)?,
    })
}

/// Entries `(t, R e_j)` of the `p` row.
fn p_row(decomp: &Decomposition, t: &[Padic], r: &Isometry) -> Result<Vector> {
    let gt = decomp.w_gram().mul_vec(t)?;
    r.matrix()
        .columns()
        .iter()
        .map(|col| dot(&gt, col).map(|x| x.neg()))
        .collect()
}

fn block_matrix(decomp: &Decomposition, c: &Padic, t: &[Padic], r: &Isometry) -> Result<Matrix> {
    let qp = *decomp.field();
    let m = decomp.dim_w();
    if t.len() != m || r.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: t.len(),
        });
    }
    let n = m + 2;
    let tt = decomp.w_gram().bilinear(t, t)?;
    let mut h = Matrix::zeros(&qp, n, n);
    h.set(0, 0, c.clone());
    h.set(0, 1, tt.div_int(-2)?.mul(c)?);
    h.set(1, 1, c.inv()?);
    for (j, e) in p_row(decomp, t, r)?.into_iter().enumerate() {
        h.set(0, 2 + j, e.mul(c)?);
    }
    for k in 0..m {
        h.set(2 + k, 1, t[k].clone());
        for j in 0..m {
            h.set(2 + k, 2 + j, r.matrix().get(k, j).clone());
        }
    }
    Ok(h)
}

/// `h(t, R)` on `V`: fixes `p`, sends `q` to `-(t,t)/2 p + q + t`.
pub fn embed_h(decomp: &Decomposition, elt: &PoincareElt) -> Result<Isometry> {
    let h = block_matrix(decomp, &decomp.field().one(), &elt.t, &elt.r)?;
    Isometry::certify(decomp.gram(), h)
}

pub fn embed_partial(decomp: &Decomposition, elt: &PartialConfElt) -> Result<Isometry> {
    let h = block_matrix(decomp, &elt.c, &elt.t, &elt.r)?;
    Isometry::certify(decomp.gram(), h)
}

/// Inverse of [`embed_h`] on the stabilizer of `p`.
pub fn decompose_h_p(decomp: &Decomposition, h: &Isometry) -> Result<PoincareElt> {
    let n = decomp.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.dim(),
        });
    }
    let mut e0 = zero_vector(decomp.field(), n);
    e0[0] = decomp.field().one();
    if h.apply(&e0)? != e0 {
        return Err(Error::NotInStabilizer);
    }
    let m = h.matrix();
    let t: Vector = (2..n).map(|k| m.get(k, 1).clone()).collect();
    let r = Isometry::certify(&decomp.w_gram(), m.block(2, n, 2, n)).map_err(|_| Error::NotInStabilizer)?;
    let elt = PoincareElt::new(t, r).map_err(|_| Error::NotInStabilizer)?;
    if embed_h(decomp, &elt)?.matrix() != m {
        return Err(Error::NotInStabilizer);
    }
    Ok(elt)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SL2Elt {
    pub a: Padic,
    pub b: Padic,
    pub c: Padic,
    pub d: Padic,
}

impl SL2Elt {
    pub fn new(a: Padic, b: Padic, c: Padic, d: Padic) -> Result<Self> {
        let det = a.mul(&d)?.sub(&b.mul(&c)?)?;
        if det != a.field().one() {
            return Err(Error::NotSpecialLinear);
        }
        Ok(SL2Elt { a, b, c, d })
    }

    pub fn identity(qp: &Qp) -> Self {
        SL2Elt {
            a: qp.one(),
            b: qp.zero(),
            c: qp.zero(),
            d: qp.one(),
        }
    }

    pub fn diagonal(a: &Padic) -> Result<Self> {
        let qp = a.field();
        SL2Elt::new(a.clone(), qp.zero(), qp.zero(), a.inv()?)
    }

    pub fn mul(&self, o: &SL2Elt) -> Result<SL2Elt> {
        Ok(SL2Elt {
            a: self.a.mul(&o.a)?.add(&self.b.mul(&o.c)?)?,
            b: self.a.mul(&o.b)?.add(&self.b.mul(&o.d)?)?,
            c: self.c.mul(&o.a)?.add(&self.d.mul(&o.c)?)?,
            d: self.c.mul(&o.b)?.add(&self.d.mul(&o.d)?)?,
        })
    }

    pub fn neg(&self) -> SL2Elt {
        SL2Elt {
            a: self.a.neg(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.d.neg(),
        }
    }

    pub fn entries(&self) -> [&Padic; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Picks the sign whose first nonzero entry has the smaller unit.
    pub fn canonical(self) -> SL2Elt {
        let first = self.entries().into_iter().find(|x| !x.is_zero()).cloned();
        match first {
            Some(x) if x.neg().unit() < x.unit() => self.neg(),
            _ => self,
        }
    }
}

impl Serialize for SL2Elt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SL2Elt", 4)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("c", &self.c)?;
        st.serialize_field("d", &self.d)?;
        st.end()
    }
}

/// Killing form on `sl(2)` in the basis `(X, H, Y)`, where `X`, `Y` are the
/// upper and lower nilpotents: `B(X,Y) = 4`, `B(H,H) = 8`.
pub fn killing_gram(qp: &Qp) -> Matrix {
    let mut g = Matrix::zeros(qp, 3, 3);
    g.set(0, 2, qp.int(4));
    g.set(2, 0, qp.int(4));
    g.set(1, 1, qp.int(8));
    g
}

fn spin_matrix(g: &SL2Elt) -> Result<Matrix> {
    let (a, b, c, d) = (&g.a, &g.b, &g.c, &g.d);
    let qp = a.field();
    let rows = vec![
        vec![a.square()?, a.mul(b)?.mul_int(-2)?, b.square()?.neg()],
        vec![a.mul(c)?.neg(), a.mul(d)?.add(&b.mul(c)?)?, b.mul(d)?],
        vec![c.square()?.neg(), c.mul(d)?.mul_int(2)?, d.square()?],
    ];
    Matrix::from_rows(&qp, rows)
}

/// Adjoint action of `g` on `sl(2)`, certified against [`killing_gram`].
pub fn spin_cover(g: &SL2Elt) -> Result<Isometry> {
    let qp = g.a.field();
    Isometry::certify(&killing_gram(&qp), spin_matrix(g)?)
}

/// Preimage under [`spin_cover`], canonical up to the kernel `{+-I}`.
pub fn spin_preimage(h: &Matrix) -> Result<SL2Elt> {
    if h.rows() != 3 || h.cols() != 3 {
        return Err(Error::NotInImageShape);
    }
    let qp = *h.field();
    let (a, b, c, d);
    let h11 = h.get(0, 0);
    if !h11.is_zero() {
        let root = h11.sqrt()?.ok_or(Error::NoPreimage)?;
        b = h.get(0, 1).div(&root.mul_int(-2)?)?;
        c = h.get(1, 0).div(&root)?.neg();
        d = qp.one().add(&b.mul(&c)?)?.div(&root)?;
        a = root;
    } else {
        let h13 = h.get(0, 2);
        if h13.is_zero() {
            return Err(Error::NotInImageShape);
        }
        let root = h13.neg().sqrt()?.ok_or(Error::NoPreimage)?;
        a = qp.zero();
        c = root.inv()?.neg();
        d = h.get(1, 2).div(&root)?;
        b = root;
    }
    let g = SL2Elt::new(a, b, c, d).map_err(|_| Error::NotInImageShape)?;
    if spin_matrix(&g)? != *h {
        return Err(Error::NotInImageShape);
    }
    Ok(g.canonical())
}

/// Swaps `p` and `q` and negates one `W` basis vector, giving an element of
/// `SO(V)` that moves the line `k p`.
pub fn swap_pq(decomp: &Decomposition) -> Result<Isometry> {
    let qp = *decomp.field();
    let n = decomp.dim();
    let mut m = Matrix::identity(&qp, n);
    m.set(0, 0, qp.zero());
    m.set(1, 1, qp.zero());
    m.set(0, 1, qp.one());
    m.set(1, 0, qp.one());
    if n < 3 {
        return Err(Error::DimensionTooSmall(3));
    }
    m.set(2, 2, qp.int(-1));
    Isometry::certify(decomp.gram(), m)
}

/// True iff `x` is a nonzero multiple of `p` in adapted coordinates.
pub fn is_on_p_line(x: &[Padic]) -> bool {
    !x[0].is_zero() && vec_is_zero(&x[1..])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> Qp {
        Qp::with_default_precision(p).unwrap()
    }

    #[test]
    fn spin_examples() {
        let f = q(5);
        let g = SL2Elt::new(f.one(), f.one(), f.zero(), f.one()).unwrap();
        let h = spin_cover(&g).unwrap();
        let want = Matrix::from_rows(
            &f,
            vec![
                vec![f.int(1), f.int(-2), f.int(-1)],
                vec![f.int(0), f.int(1), f.int(1)],
                vec![f.int(0), f.int(0), f.int(1)],
            ],
        )
        .unwrap();
        assert_eq!(h.matrix(), &want);
        assert_eq!(spin_cover(&SL2Elt::identity(&f)).unwrap().matrix(), &Matrix::identity(&f, 3));
        let two = SL2Elt::diagonal(&f.int(2)).unwrap();
        let d = spin_cover(&two).unwrap();
        assert_eq!(
            d.matrix(),
            &Matrix::diagonal(&f, &[f.int(4), f.one(), f.ratio(1, 4).unwrap()])
        );
        assert_eq!(spin_preimage(d.matrix()).unwrap(), two.canonical());
        let alpha = Matrix::diagonal(&f, &[f.int(5), f.one(), f.ratio(1, 5).unwrap()]);
        assert_eq!(spin_preimage(&alpha).unwrap_err(), Error::NoPreimage);
        assert_eq!(spin_preimage(&Matrix::identity(&f, 3)).unwrap(), SL2Elt::identity(&f));
    }

    #[test]
    fn preimage_a_zero_branch() {
        let f = q(7);
        let g = SL2Elt::new(f.zero(), f.int(3), f.ratio(-1, 3).unwrap(), f.int(2)).unwrap();
        let h = spin_cover(&g).unwrap();
        let back = spin_preimage(h.matrix()).unwrap();
        assert!(back == g || back == g.neg());
    }

    #[test]
    fn embedding_basics() {
        let f = q(3);
        let v = QuadSpace::from_ints(&f, &[1, -1, 1, 2]).unwrap();
        let dc = Decomposition::standard(&v).unwrap();
        assert_eq!(dc.q_adapted(&dc.assemble(&f.zero(), &f.one(), &[f.zero(), f.zero()])).unwrap(), f.zero());
        let id = PoincareElt::identity(&dc);
        assert!(embed_h(&dc, &id).unwrap().matrix().is_identity());
        let t = vec![f.int(1), f.int(2)];
        let elt = PoincareElt::new(t.clone(), Isometry::identity(&dc.w_gram())).unwrap();
        let h = embed_h(&dc, &elt).unwrap();
        let tt = dc.w_gram().bilinear(&t, &t).unwrap();
        let hq = h.apply(&dc.assemble(&f.zero(), &f.one(), &[f.zero(), f.zero()])).unwrap();
        assert_eq!(hq, dc.assemble(&tt.div_int(-2).unwrap(), &f.one(), &t));
        assert_eq!(decompose_h_p(&dc, &h).unwrap(), elt);
        let s = swap_pq(&dc).unwrap();
        assert_eq!(decompose_h_p(&dc, &s).unwrap_err(), Error::NotInStabilizer);
    }
}
