//! The projective null cone `[Omega]`, the chart `J: W -> [Omega]`, and the
//! conformal behaviour of the induced form.
//!
//! Points and isometries use the adapted coordinates of a [`Decomposition`].

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{vec_add, vec_is_zero, vec_scale, zero_vector, Vector};
use crate::orthogonal::Isometry;
use crate::padic::Padic;
use crate::poincare::{embed_h, Decomposition, PoincareElt};
use crate::sampling::Sampler;

/// A point of `P(V)`, scaled so its last nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    rep: Vector,
}

impl ProjPoint {
    pub fn new(x: &[Padic]) -> Result<Self> {
        let last = x.iter().rposition(|c| !c.is_zero()).ok_or(Error::ZeroInput)?;
        let s = x[last].inv()?;
        let mut rep = vec_scale(&s, x)?;
        rep[last] = s.field().one();
        Ok(ProjPoint { rep })
    }

    pub fn rep(&self) -> &[Padic] {
        &self.rep
    }

    pub fn on_cone(&self, decomp: &Decomposition) -> Result<bool> {
        Ok(decomp.q_adapted(&self.rep)?.is_zero())
    }

    /// Whether the point lies in `A_[p]`, i.e. `(p, x) != 0`.
    pub fn in_chart(&self, decomp: &Decomposition) -> Result<bool> {
        Ok(!pairing_with_p(decomp, &self.rep)?.is_zero())
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rep.serialize(s)
    }
}

fn p_vector(decomp: &Decomposition) -> Vector {
    let mut p = zero_vector(decomp.field(), decomp.dim());
    p[0] = decomp.field().one();
    p
}

fn pairing_with_p(decomp: &Decomposition, x: &[Padic]) -> Result<Padic> {
    decomp.bilinear(&p_vector(decomp), x)
}

/// `J(w) = [-(w,w)/2 p + q + w]`.
pub fn chart_j(decomp: &Decomposition, w: &[Padic]) -> Result<ProjPoint> {
    let ww = decomp.w_space().q(w)?;
    let rep = decomp.assemble(&ww.div_int(-2)?, &decomp.field().one(), w);
    ProjPoint::new(&rep)
}

pub fn chart_j_inv(decomp: &Decomposition, x: &ProjPoint) -> Result<Vector> {
    if !x.on_cone(decomp)? {
        return Err(Error::NotOnCone);
    }
    let beta = pairing_with_p(decomp, x.rep())?;
    if beta.is_zero() {
        return Err(Error::NotInChart);
    }
    let scaled = vec_scale(&beta.inv()?, x.rep())?;
    Ok(scaled[2..].to_vec())
}

pub fn act_on_projective(g: &Isometry, x: &ProjPoint) -> Result<ProjPoint> {
    ProjPoint::new(&g.apply(x.rep())?)
}

/// `h(t,R) J(w) = J(R w + t)`.
pub fn intertwine_check(decomp: &Decomposition, elt: &PoincareElt, w: &[Padic]) -> Result<bool> {
    let h = embed_h(decomp, elt)?;
    intertwine_check_matrix(decomp, &h, elt, w)
}

/// As [`intertwine_check`] with an explicitly supplied matrix for `h`,
/// which lets callers test corrupted embeddings.
pub fn intertwine_check_matrix(
    decomp: &Decomposition,
    h: &Isometry,
    elt: &PoincareElt,
    w: &[Padic],
) -> Result<bool> {
    let lhs = act_on_projective(h, &chart_j(decomp, w)?)?;
    let rhs = chart_j(decomp, &elt.act(w)?)?;
    Ok(lhs == rhs)
}

/// `(v1, v2)` for tangent representatives `v1, v2` in `V_x = x^perp`.
pub fn induced_form(decomp: &Decomposition, x: &[Padic], v1: &[Padic], v2: &[Padic]) -> Result<Padic> {
    if vec_is_zero(x) || !decomp.q_adapted(x)?.is_zero() {
        return Err(Error::NotOnCone);
    }
    for v in [v1, v2] {
        if !decomp.bilinear(x, v)?.is_zero() {
            return Err(Error::NotTangent);
        }
    }
    decomp.bilinear(v1, v2)
}

/// A tangent vector at `[x]` represented by `v` at `x` is represented by
/// `lambda v` at `lambda x`.
pub fn tangent_lift(lambda: &Padic, v: &[Padic]) -> Result<Vector> {
    vec_scale(lambda, v)
}

/// The form induced through the representative `lambda x` is `lambda^2`
/// times the one induced through `x`.
pub fn lambda_scaling_check(
    decomp: &Decomposition,
    x: &[Padic],
    lambda: &Padic,
    v1: &[Padic],
    v2: &[Padic],
) -> Result<bool> {
    let base = induced_form(decomp, x, v1, v2)?;
    let lx = vec_scale(lambda, x)?;
    let scaled = induced_form(decomp, &lx, &tangent_lift(lambda, v1)?, &tangent_lift(lambda, v2)?)?;
    Ok(scaled == base.mul(&lambda.square()?)?)
}

/// Adding `k x` to either tangent leaves the induced value unchanged.
pub fn kernel_line_check(
    decomp: &Decomposition,
    x: &[Padic],
    k: &Padic,
    v1: &[Padic],
    v2: &[Padic],
) -> Result<bool> {
    let base = induced_form(decomp, x, v1, v2)?;
    let kx = vec_scale(k, x)?;
    let s1 = vec_add(v1, &kx)?;
    let s2 = vec_add(v2, &kx)?;
    Ok(induced_form(decomp, x, &s1, v2)? == base && induced_form(decomp, x, v1, &s2)? == base)
}

/// Tangent vector at `J(w)` along the chart direction `d` in `W`.
pub fn chart_tangent(decomp: &Decomposition, w: &[Padic], d: &[Padic]) -> Result<Vector> {
    // derivative of -(w,w)/2 p + q + w along d
    let wd = decomp.w_space().bilinear(w, d)?;
    Ok(decomp.assemble(&wd.neg(), &decomp.field().zero(), d))
}

/// Base point `-(w,w)/2 p + q + w` of the chart, unnormalized.
pub fn chart_rep(decomp: &Decomposition, w: &[Padic]) -> Result<Vector> {
    let ww = decomp.w_space().q(w)?;
    Ok(decomp.assemble(&ww.div_int(-2)?, &decomp.field().one(), w))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartReport {
    /// Whether `g` preserves the line `k p`; this is the verdict.
    pub stabilizes: bool,
    /// Sampled chart points that stayed in the chart.
    pub sampled_in_chart: usize,
    pub sampled: usize,
    /// A chart coordinate `w` with `g J(w)` outside the chart.
    pub escaping_witness: Option<Vector>,
}

/// Decides whether `g` leaves the chart `A_[p]` invariant.
///
/// `g` stabilizes the chart iff it preserves the line `k p`. When it does
/// not, a point of the chart is constructed whose image leaves the chart:
/// with `u = g^-1 p`, either `[u]` itself lies in the chart, or a null `x`
/// with `(p, x) = 1` and `(u, x) = 0` is built from the two linear
/// conditions.
pub fn stabilizes_chart(
    decomp: &Decomposition,
    g: &Isometry,
    sampler: &mut Sampler,
    samples: usize,
) -> Result<ChartReport> {
    let p = p_vector(decomp);
    let gp = g.apply(&p)?;
    let stabilizes = !gp[0].is_zero() && vec_is_zero(&gp[1..]);
    let mut sampled_in_chart = 0;
    for _ in 0..samples {
        let w = sampler.vector(decomp.dim_w());
        if act_on_projective(g, &chart_j(decomp, &w)?)?.in_chart(decomp)? {
            sampled_in_chart += 1;
        }
    }
    let escaping_witness = if stabilizes {
        None
    } else {
        let w = escape_point(decomp, g)?;
        if act_on_projective(g, &chart_j(decomp, &w)?)?.in_chart(decomp)? {
            return Err(Error::WitnessSearchExhausted);
        }
        Some(w)
    };
    Ok(ChartReport {
        stabilizes,
        sampled_in_chart,
        sampled: samples,
        escaping_witness,
    })
}

fn escape_point(decomp: &Decomposition, g: &Isometry) -> Result<Vector> {
    let qp = *decomp.field();
    let n = decomp.dim();
    let u = g.inverse()?.apply(&p_vector(decomp))?;
    let pu = pairing_with_p(decomp, &u)?;
    if !pu.is_zero() {
        return chart_j_inv(decomp, &ProjPoint::new(&u)?);
    }
    // (p, y) = y_1 in adapted coordinates
    let gu = decomp.gram().mul_vec(&u)?;
    let j = (0..n)
        .find(|&j| j != 1 && !gu[j].is_zero())
        .ok_or(Error::WitnessSearchExhausted)?;
    let mut y = zero_vector(&qp, n);
    y[1] = qp.one();
    y[j] = gu[1].div(&gu[j])?.neg();
    let c = decomp.q_adapted(&y)?.div_int(2)?;
    let x = vec_add(&y, &vec_scale(&c.neg(), &p_vector(decomp))?)?;
    chart_j_inv(decomp, &ProjPoint::new(&x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Qp;
    use crate::poincare::swap_pq;
    use crate::quadspace::QuadSpace;

    fn setup() -> (Qp, Decomposition) {
        let f = Qp::with_default_precision(5).unwrap();
        let v = QuadSpace::from_ints(&f, &[1, -1, 1, 2]).unwrap();
        (f, Decomposition::standard(&v).unwrap())
    }

    #[test]
    fn chart_examples() {
        let (f, dc) = setup();
        let zero = vec![f.zero(), f.zero()];
        let j0 = chart_j(&dc, &zero).unwrap();
        assert_eq!(j0.rep(), &[f.zero(), f.one(), f.zero(), f.zero()]);
        assert_eq!(chart_j_inv(&dc, &j0).unwrap(), zero);
        let w = vec![f.int(3), f.ratio(1, 5).unwrap()];
        let x = chart_j(&dc, &w).unwrap();
        assert!(x.on_cone(&dc).unwrap());
        assert_eq!(chart_j_inv(&dc, &x).unwrap(), w);
        let pp = ProjPoint::new(&[f.one(), f.zero(), f.zero(), f.zero()]).unwrap();
        assert_eq!(chart_j_inv(&dc, &pp).unwrap_err(), Error::NotInChart);
    }

    #[test]
    fn swap_escapes_through_q() {
        let (f, dc) = setup();
        let s = swap_pq(&dc).unwrap();
        let mut sampler = Sampler::new(&f, 3);
        let rep = stabilizes_chart(&dc, &s, &mut sampler, 10).unwrap();
        assert!(!rep.stabilizes);
        assert_eq!(rep.escaping_witness, Some(vec![f.zero(), f.zero()]));
        let id = Isometry::identity(dc.gram());
        assert!(stabilizes_chart(&dc, &id, &mut sampler, 10).unwrap().stabilizes);
    }

    #[test]
    fn escape_when_preimage_of_p_is_orthogonal_to_p() {
        let f = Qp::with_default_precision(5).unwrap();
        let v = QuadSpace::split(&f, 2).unwrap();
        let dc = Decomposition::standard(&v).unwrap();
        // u = null vector of W, so (p, u) = 0 and u is off the line k p
        let w0 = dc.w_space().isotropic_vector().unwrap();
        let u = dc.assemble(&f.zero(), &f.zero(), &w0);
        let p = dc.assemble(&f.one(), &f.zero(), &[f.zero(), f.zero()]);
        let amb = crate::orthogonal::transitivity_witness(
            &v,
            &dc.to_ambient(&u).unwrap(),
            &dc.to_ambient(&p).unwrap(),
        )
        .unwrap();
        let g = dc.isometry_from_ambient(&amb).unwrap();
        assert_eq!(g.apply(&u).unwrap(), p);
        let mut sampler = Sampler::new(&f, 9);
        let rep = stabilizes_chart(&dc, &g, &mut sampler, 5).unwrap();
        assert!(!rep.stabilizes);
        let w = rep.escaping_witness.unwrap();
        assert!(!act_on_projective(&g, &chart_j(&dc, &w).unwrap()).unwrap().in_chart(&dc).unwrap());
    }

    #[test]
    fn induced_form_rules() {
        let (f, dc) = setup();
        let w = vec![f.int(2), f.int(1)];
        let x = chart_rep(&dc, &w).unwrap();
        let v1 = chart_tangent(&dc, &w, &[f.one(), f.zero()]).unwrap();
        let v2 = chart_tangent(&dc, &w, &[f.int(3), f.int(-1)]).unwrap();
        assert!(induced_form(&dc, &x, &v1, &x).unwrap().is_zero());
        assert!(lambda_scaling_check(&dc, &x, &f.int(10), &v1, &v2).unwrap());
        assert!(kernel_line_check(&dc, &x, &f.int(7), &v1, &v2).unwrap());
        let bad = vec![f.zero(), f.one(), f.zero(), f.zero()];
        assert_eq!(induced_form(&dc, &x, &bad, &v1).unwrap_err(), Error::NotTangent);
    }
}
