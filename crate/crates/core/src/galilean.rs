//! The Galilean group `G = V x| R` over a spatial quadratic space `V_0`,
//! with `V = V_0 + Q_p` and `R = V_0 x| SO(V_0)`.
//!
//! Elements act on spacetime by `(x, t) -> (W x + t v + u, t + eta)`. The
//! cocycles `theta_tau`, the affine actions they define on the dual, the
//! multipliers `mu_tau` and the orbit invariants `M` and `N` live here.

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{nullspace, vec_add, vec_is_zero, vec_neg, vec_scale, zero_vector, Matrix, Vector};
use crate::orthogonal::Isometry;
use crate::padic::{psi, Padic, Phase};
use crate::quadspace::QuadSpace;
use crate::sampling::Sampler;

/// `(v, W)` in `R = V_0 x| SO(V_0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RElt {
    pub v: Vector,
    pub w: Isometry,
}

impl RElt {
    pub fn new(v: Vector, w: Isometry) -> Result<Self> {
        if v.len() != w.dim() {
            return Err(Error::DimensionMismatch {
                expected: w.dim(),
                got: v.len(),
            });
        }
        if !w.is_special() {
            return Err(Error::NotIsometry);
        }
        Ok(RElt { v, w })
    }

    pub fn identity(space: &QuadSpace) -> Self {
        RElt {
            v: zero_vector(space.field(), space.dim()),
            w: Isometry::identity(&space.gram()),
        }
    }

    pub fn boost(space: &QuadSpace, v: Vector) -> Result<Self> {
        RElt::new(v, Isometry::identity(&space.gram()))
    }

    pub fn mul(&self, o: &RElt) -> Result<RElt> {
        Ok(RElt {
            v: vec_add(&self.v, &self.w.apply(&o.v)?)?,
            w: self.w.compose(&o.w)?,
        })
    }

    pub fn inverse(&self) -> Result<RElt> {
        let w = self.w.inverse()?;
        let v = vec_neg(&w.apply(&self.v)?);
        Ok(RElt { v, w })
    }

    /// `(u, eta) -> (W u + eta v, eta)` on `V = V_0 + Q_p`.
    pub fn act_v(&self, u: &[Padic], eta: &Padic) -> Result<(Vector, Padic)> {
        let wu = self.w.apply(u)?;
        Ok((vec_add(&wu, &vec_scale(eta, &self.v)?)?, eta.clone()))
    }
}

impl Serialize for RElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RElt", 2)?;
        st.serialize_field("v", &self.v)?;
        st.serialize_field("W", self.w.matrix())?;
        st.end()
    }
}

/// `((u, eta), (v, W))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GalileanElt {
    pub u: Vector,
    pub eta: Padic,
    pub r: RElt,
}

impl GalileanElt {
    pub fn new(u: Vector, eta: Padic, r: RElt) -> Result<Self> {
        if u.len() != r.v.len() {
            return Err(Error::DimensionMismatch {
                expected: r.v.len(),
                got: u.len(),
            });
        }
        Ok(GalileanElt { u, eta, r })
    }

    pub fn identity(space: &QuadSpace) -> Self {
        GalileanElt {
            u: zero_vector(space.field(), space.dim()),
            eta: space.field().zero(),
            r: RElt::identity(space),
        }
    }

    pub fn translation(space: &QuadSpace, u: Vector, eta: Padic) -> Result<Self> {
        GalileanElt::new(u, eta, RElt::identity(space))
    }

    pub fn v(&self) -> &[Padic] {
        &self.r.v
    }

    pub fn w(&self) -> &Isometry {
        &self.r.w
    }

    /// `((u + W u' + eta' v, eta + eta'), (v + W v', W W'))`.
    pub fn mul(&self, o: &GalileanElt) -> Result<GalileanElt> {
        let (tu, _) = self.r.act_v(&o.u, &o.eta)?;
        Ok(GalileanElt {
            u: vec_add(&self.u, &tu)?,
            eta: self.eta.add(&o.eta)?,
            r: self.r.mul(&o.r)?,
        })
    }

    pub fn inverse(&self) -> Result<GalileanElt> {
        let r = self.r.inverse()?;
        let eta = self.eta.neg();
        // u'' = W^-1 (eta v - u)
        let u = r.w.apply(&vec_add(&vec_scale(&self.eta, &self.r.v)?, &vec_neg(&self.u))?)?;
        Ok(GalileanElt { u, eta, r })
    }
}

impl Serialize for GalileanElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GalileanElt", 4)?;
        st.serialize_field("u", &self.u)?;
        st.serialize_field("eta", &self.eta)?;
        st.serialize_field("v", &self.r.v)?;
        st.serialize_field("W", self.r.w.matrix())?;
        st.end()
    }
}

/// `(xi, t)` in the dual `V'`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualPoint {
    pub xi: Vector,
    pub t: Padic,
}

impl DualPoint {
    pub fn new(xi: Vector, t: Padic) -> Self {
        DualPoint { xi, t }
    }

    pub fn zero(space: &QuadSpace) -> Self {
        DualPoint {
            xi: zero_vector(space.field(), space.dim()),
            t: space.field().zero(),
        }
    }

    pub fn add(&self, o: &DualPoint) -> Result<DualPoint> {
        Ok(DualPoint {
            xi: vec_add(&self.xi, &o.xi)?,
            t: self.t.add(&o.t)?,
        })
    }

    pub fn sub(&self, o: &DualPoint) -> Result<DualPoint> {
        Ok(DualPoint {
            xi: vec_add(&self.xi, &vec_neg(&o.xi))?,
            t: self.t.sub(&o.t)?,
        })
    }

    /// `<(xi, t), (u, eta)> = (xi, u) + t eta`.
    pub fn pairing(&self, space: &QuadSpace, u: &[Padic], eta: &Padic) -> Result<Padic> {
        space.bilinear(&self.xi, u)?.add(&self.t.mul(eta)?)
    }
}

pub fn act_spacetime(g: &GalileanElt, x: &[Padic], t: &Padic) -> Result<(Vector, Padic)> {
    let wx = g.r.w.apply(x)?;
    let xv = vec_add(&vec_add(&wx, &vec_scale(t, &g.r.v)?)?, &g.u)?;
    Ok((xv, t.add(&g.eta)?))
}

/// `(v, W): (xi, t) -> (W xi, t - (W xi, v))`.
pub fn dual_action(space: &QuadSpace, r: &RElt, chi: &DualPoint) -> Result<DualPoint> {
    let wxi = r.w.apply(&chi.xi)?;
    let t = chi.t.sub(&space.bilinear(&wxi, &r.v)?)?;
    Ok(DualPoint { xi: wxi, t })
}

/// `theta_tau(v, W) = (2 tau v, -tau (v, v))`.
pub fn theta_tau(space: &QuadSpace, tau: &Padic, r: &RElt) -> Result<DualPoint> {
    let xi = vec_scale(&tau.mul_int(2)?, &r.v)?;
    let t = tau.mul(&space.q(&r.v)?)?.neg();
    Ok(DualPoint { xi, t })
}

/// Index of the first pair violating `f(g g') = f(g) + g[f(g')]`.
pub fn cocycle_check<F>(space: &QuadSpace, f: F, pairs: &[(RElt, RElt)]) -> Result<Option<usize>>
where
    F: Fn(&RElt) -> Result<DualPoint>,
{
    for (i, (g, h)) in pairs.iter().enumerate() {
        let lhs = f(&g.mul(h)?)?;
        let rhs = f(g)?.add(&dual_action(space, g, &f(h)?)?)?;
        if lhs != rhs {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// `g[chi] + theta_tau(g)`.
pub fn affine_action(space: &QuadSpace, tau: &Padic, r: &RElt, chi: &DualPoint) -> Result<DualPoint> {
    dual_action(space, r, chi)?.add(&theta_tau(space, tau, r)?)
}

/// `M(xi, t) = (xi, xi) + 4 tau t`.
pub fn invariant_m(space: &QuadSpace, tau: &Padic, chi: &DualPoint) -> Result<Padic> {
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    space.q(&chi.xi)?.add(&tau.mul_int(4)?.mul(&chi.t)?)
}

/// The point `(0, a / 4 tau)` on the level set `M = a`.
pub fn affine_base_point(space: &QuadSpace, tau: &Padic, a: &Padic) -> Result<DualPoint> {
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    Ok(DualPoint {
        xi: zero_vector(space.field(), space.dim()),
        t: a.div(&tau.mul_int(4)?)?,
    })
}

/// `(xi / 2 tau, I)`, certified to send `(0, M(chi) / 4 tau)` to `chi`.
pub fn affine_orbit_witness(space: &QuadSpace, tau: &Padic, chi: &DualPoint) -> Result<RElt> {
    let a = invariant_m(space, tau, chi)?;
    let base = affine_base_point(space, tau, &a)?;
    let v = vec_scale(&tau.mul_int(2)?.inv()?, &chi.xi)?;
    let r = RElt::boost(space, v)?;
    if affine_action(space, tau, &r, &base)? != *chi {
        return Err(Error::PrecisionExhausted {
            remaining: 0,
            context: "affine orbit witness certification",
        });
    }
    Ok(r)
}

/// `mu_tau(r, r') = psi(-2 tau (v, W u') - tau eta' (v, v))`.
pub fn mu_tau(space: &QuadSpace, tau: &Padic, r: &GalileanElt, r2: &GalileanElt) -> Result<Phase> {
    let wu = r.r.w.apply(&r2.u)?;
    let x = space.bilinear(&r.r.v, &wu)?.mul_int(-2)?;
    let y = r2.eta.mul(&space.q(&r.r.v)?)?;
    psi(&tau.mul(&x.sub(&y)?)?)
}

/// Index of the first triple violating `m(x,y) + m(xy,z) = m(y,z) + m(x,yz)`
/// or the normalization `m(x,1) = m(1,x) = 0`.
pub fn multiplier_check<T, M, Mul>(m: M, mul: Mul, one: &T, triples: &[(T, T, T)]) -> Result<Option<usize>>
where
    M: Fn(&T, &T) -> Result<Phase>,
    Mul: Fn(&T, &T) -> Result<T>,
{
    for (i, (x, y, z)) in triples.iter().enumerate() {
        let lhs = m(x, y)?.add(&m(&mul(x, y)?, z)?);
        let rhs = m(y, z)?.add(&m(x, &mul(y, z)?)?);
        if lhs != rhs || !m(x, one)?.is_zero() || !m(one, x)?.is_zero() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierReport {
    pub tau: Padic,
    pub samples: usize,
    /// `m = n_0(W, W') + psi(<theta_tau(g^-1), a'>)` for `r = a g`, `r' = a' g'`.
    pub decomposition_shape: bool,
    pub cocycle: bool,
    pub vanishes_on_translations: bool,
    pub vanishes_on_translation_left: bool,
    pub vanishes_on_translation_right: bool,
}

/// Checks `m_{n_0,tau}(r, r') = n_0(W, W') + mu_tau(r, r')` on samples and
/// records which restrictions vanish.
pub fn multiplier_restrictions<N>(
    space: &QuadSpace,
    tau: &Padic,
    n0: N,
    sampler: &mut Sampler,
    samples: usize,
) -> Result<MultiplierReport>
where
    N: Fn(&Isometry, &Isometry) -> Result<Phase>,
{
    let gram = space.gram();
    let rot: Vec<(Isometry, Isometry, Isometry)> = (0..samples)
        .map(|_| {
            Ok((
                sampler.special_isometry(&gram)?,
                sampler.special_isometry(&gram)?,
                sampler.special_isometry(&gram)?,
            ))
        })
        .collect::<Result<_>>()?;
    let id = Isometry::identity(&gram);
    if multiplier_check(&n0, |a: &Isometry, b: &Isometry| a.compose(b), &id, &rot)?.is_some() {
        return Err(Error::InvalidBaseMultiplier);
    }
    let m = |a: &GalileanElt, b: &GalileanElt| -> Result<Phase> {
        Ok(n0(&a.r.w, &b.r.w)?.add(&mu_tau(space, tau, a, b)?))
    };
    let triples: Vec<(GalileanElt, GalileanElt, GalileanElt)> = (0..samples)
        .map(|_| Ok((random_galilean(space, sampler)?, random_galilean(space, sampler)?, random_galilean(space, sampler)?)))
        .collect::<Result<_>>()?;
    let one = GalileanElt::identity(space);
    let cocycle = multiplier_check(m, |a: &GalileanElt, b: &GalileanElt| a.mul(b), &one, &triples)?.is_none();
    let mut decomposition_shape = true;
    let mut tt = true;
    let mut tg = true;
    let mut gt = true;
    for (x, y, _) in &triples {
        let ginv = x.r.inverse()?;
        let pair = theta_tau(space, tau, &ginv)?.pairing(space, &y.u, &y.eta)?;
        let shape = n0(&x.r.w, &y.r.w)?.add(&psi(&pair)?);
        decomposition_shape &= m(x, y)? == shape;
        let ax = GalileanElt::translation(space, x.u.clone(), x.eta.clone())?;
        let ay = GalileanElt::translation(space, y.u.clone(), y.eta.clone())?;
        tt &= m(&ax, &ay)?.is_zero();
        tg &= m(&ax, y)?.is_zero();
        gt &= m(x, &ay)?.is_zero();
    }
    Ok(MultiplierReport {
        tau: tau.clone(),
        samples,
        decomposition_shape,
        cocycle,
        vanishes_on_translations: tt,
        vanishes_on_translation_left: tg,
        vanishes_on_translation_right: gt,
    })
}

/// `N(xi, t) = (xi, xi)`.
pub fn invariant_n(space: &QuadSpace, chi: &DualPoint) -> Result<Padic> {
    space.q(&chi.xi)
}

/// `(v, I)` with `(xi, v) = -t`, certified to send `(xi, 0)` to `chi`.
pub fn ordinary_orbit_witness(space: &QuadSpace, chi: &DualPoint) -> Result<RElt> {
    if vec_is_zero(&chi.xi) {
        return Err(Error::ZeroXi);
    }
    let qp = *space.field();
    let n = space.dim();
    let i = chi.xi.iter().position(|x| !x.is_zero()).expect("xi is nonzero");
    let mut v = zero_vector(&qp, n);
    v[i] = chi.t.neg().div(&space.diag()[i].mul(&chi.xi[i])?)?;
    let r = RElt::boost(space, v)?;
    let base = DualPoint::new(chi.xi.clone(), qp.zero());
    if dual_action(space, &r, &base)? != *chi {
        return Err(Error::PrecisionExhausted {
            remaining: 0,
            context: "ordinary orbit witness certification",
        });
    }
    Ok(r)
}

/// On the level set `M = a`, the affine action read through the `xi`
/// coordinate is `xi -> W xi + 2 tau v`, whatever `a` is. Checks both
/// statements for two level sets.
pub fn conjugated_action_check(
    space: &QuadSpace,
    tau: &Padic,
    r: &RElt,
    xi: &[Padic],
    a1: &Padic,
    a2: &Padic,
) -> Result<bool> {
    let expected = vec_add(&r.w.apply(xi)?, &vec_scale(&tau.mul_int(2)?, &r.v)?)?;
    for a in [a1, a2] {
        let t = a.sub(&space.q(xi)?)?.div(&tau.mul_int(4)?)?;
        let chi = DualPoint::new(xi.to_vec(), t);
        let image = affine_action(space, tau, r, &chi)?;
        if image.xi != expected || invariant_m(space, tau, &image)? != *a {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `psi(eta (a - (xi,xi)) / 4 tau) = psi(eta a / 4 tau) + psi(-eta (xi,xi) / 4 tau)`.
pub fn phase_factorization_check(
    space: &QuadSpace,
    tau: &Padic,
    eta: &Padic,
    a: &Padic,
    xi: &[Padic],
) -> Result<bool> {
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    let four_tau = tau.mul_int(4)?;
    let n = space.q(xi)?;
    let whole = psi(&eta.mul(&a.sub(&n)?)?.div(&four_tau)?)?;
    let left = psi(&eta.mul(a)?.div(&four_tau)?)?;
    let right = psi(&eta.mul(&n)?.neg().div(&four_tau)?)?;
    Ok(whole == left.add(&right))
}

/// Dimension of the space of skew forms `B` on `V = V_0 + Q_p` with
/// `B(r x, r y) = B(x, y)` for the sampled `r` in `R`.
///
/// The constraints from the sampled elements (pure boosts along each basis
/// vector, pure rotations, and mixed elements) are stacked into one linear
/// system in the entries `B_kl`, `k < l`.
pub fn invariant_skew_forms(space: &QuadSpace, sampler: &mut Sampler, samples: usize) -> Result<usize> {
    let qp = *space.field();
    let d = space.dim();
    let n = d + 1;
    let mut elements = Vec::new();
    for i in 0..d {
        let mut v = zero_vector(&qp, d);
        v[i] = qp.one();
        elements.push(RElt::boost(space, v)?);
    }
    for _ in 0..samples {
        let w = sampler.special_isometry(&space.gram())?;
        elements.push(RElt::new(zero_vector(&qp, d), w.clone())?);
        elements.push(RElt::new(sampler.vector(d), w)?);
    }
    let unknowns: Vec<(usize, usize)> = (0..n).flat_map(|k| (k + 1..n).map(move |l| (k, l))).collect();
    let mut rows: Vec<Vector> = Vec::new();
    for r in &elements {
        let mut m = Matrix::zeros(&qp, n, n);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, r.w.matrix().get(i, j).clone());
            }
            m.set(i, d, r.v[i].clone());
        }
        m.set(d, d, qp.one());
        // column (k,l): upper triangle of m^T E_kl m - E_kl
        let mut cols = Vec::new();
        for &(k, l) in &unknowns {
            let mut e = Matrix::zeros(&qp, n, n);
            e.set(k, l, qp.one());
            e.set(l, k, qp.int(-1));
            let c = m.transpose().mul(&e)?.mul(&m)?.sub(&e)?;
            cols.push(unknowns.iter().map(|&(i, j)| c.get(i, j).clone()).collect::<Vector>());
        }
        for eq in 0..unknowns.len() {
            rows.push(cols.iter().map(|c| c[eq].clone()).collect());
        }
    }
    if unknowns.is_empty() {
        return Ok(0);
    }
    Ok(nullspace(&Matrix::from_rows(&qp, rows)?)?.len())
}

pub fn random_r(space: &QuadSpace, sampler: &mut Sampler) -> Result<RElt> {
    let w = sampler.special_isometry(&space.gram())?;
    RElt::new(sampler.vector(space.dim()), w)
}

pub fn random_galilean(space: &QuadSpace, sampler: &mut Sampler) -> Result<GalileanElt> {
    let r = random_r(space, sampler)?;
    GalileanElt::new(sampler.vector(space.dim()), sampler.scalar(), r)
}

pub fn random_dual(space: &QuadSpace, sampler: &mut Sampler) -> DualPoint {
    DualPoint::new(sampler.vector(space.dim()), sampler.scalar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Qp;

    fn setup(p: u64) -> (Qp, QuadSpace) {
        let f = Qp::with_default_precision(p).unwrap();
        let s = QuadSpace::from_ints(&f, &[1, 1, 1]).unwrap();
        (f, s)
    }

    #[test]
    fn theta_examples() {
        let (f, s) = setup(5);
        // (v, v) = 2 for v = (1, 1, 0)
        let v = vec![f.one(), f.one(), f.zero()];
        let r = RElt::boost(&s, v.clone()).unwrap();
        let th = theta_tau(&s, &f.one(), &r).unwrap();
        assert_eq!(th.xi, vec![f.int(2), f.int(2), f.zero()]);
        assert_eq!(th.t, f.int(-2));
        assert_eq!(theta_tau(&s, &f.zero(), &r).unwrap(), DualPoint::zero(&s));
        // constant nonzero map fails at g = g' = 1
        let one = RElt::identity(&s);
        let c = DualPoint::new(v, f.one());
        let bad = cocycle_check(&s, |_| Ok(c.clone()), &[(one.clone(), one)]).unwrap();
        assert_eq!(bad, Some(0));
    }

    #[test]
    fn dual_action_boost() {
        let (f, s) = setup(3);
        let xi = vec![f.int(1), f.int(2), f.int(0)];
        let v = vec![f.int(1), f.int(1), f.int(1)];
        let r = RElt::boost(&s, v).unwrap();
        let out = dual_action(&s, &r, &DualPoint::new(xi.clone(), f.zero())).unwrap();
        assert_eq!(out, DualPoint::new(xi, f.int(-3)));
    }

    #[test]
    fn invariants_and_witnesses() {
        let (f, s) = setup(7);
        let tau = f.int(3);
        let a = f.int(11);
        let base = affine_base_point(&s, &tau, &a).unwrap();
        assert_eq!(invariant_m(&s, &tau, &base).unwrap(), a);
        assert!(affine_orbit_witness(&s, &tau, &base).unwrap().v.iter().all(Padic::is_zero));
        assert_eq!(invariant_m(&s, &f.zero(), &base).unwrap_err(), Error::ZeroTau);
        let chi = DualPoint::new(vec![f.int(1), f.int(0), f.int(2)], f.int(5));
        let w = ordinary_orbit_witness(&s, &chi).unwrap();
        assert_eq!(dual_action(&s, &w, &DualPoint::new(chi.xi.clone(), f.zero())).unwrap(), chi);
        assert_eq!(
            ordinary_orbit_witness(&s, &DualPoint::new(vec![f.zero(); 3], f.one())).unwrap_err(),
            Error::ZeroXi
        );
    }

    #[test]
    fn mu_examples() {
        let (f, s) = setup(5);
        let id = GalileanElt::identity(&s);
        let mut sampler = Sampler::new(&f, 1);
        let g = random_galilean(&s, &mut sampler).unwrap();
        assert!(mu_tau(&s, &f.one(), &g, &id).unwrap().is_zero());
        // v = u' = e_0, W = I, eta' = 0: psi(-2) = 0
        let e0 = vec![f.one(), f.zero(), f.zero()];
        let r = GalileanElt::new(vec![f.zero(); 3], f.zero(), RElt::boost(&s, e0.clone()).unwrap()).unwrap();
        let r2 = GalileanElt::translation(&s, e0, f.zero()).unwrap();
        assert!(mu_tau(&s, &f.one(), &r, &r2).unwrap().is_zero());
    }

    #[test]
    fn group_inverse() {
        let (f, s) = setup(3);
        let mut sampler = Sampler::new(&f, 4);
        let g = random_galilean(&s, &mut sampler).unwrap();
        assert_eq!(g.mul(&g.inverse().unwrap()).unwrap(), GalileanElt::identity(&s));
    }
}
