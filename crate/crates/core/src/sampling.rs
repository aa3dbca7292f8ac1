//! Seeded random generation of scalars, vectors and group elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::orthogonal::{reflection_for_gram, Isometry};
use crate::padic::{Padic, Qp};
use crate::poincare::{Decomposition, PartialConfElt, PoincareElt, SL2Elt};

const MAX_REDRAWS: usize = 64;

pub struct Sampler {
    qp: Qp,
    rng: ChaCha8Rng,
    bound: i64,
}

impl Sampler {
    pub fn new(qp: &Qp, seed: u64) -> Self {
        let p = qp.prime() as i64;
        Sampler {
            qp: *qp,
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound: p * p * p,
        }
    }

    pub fn field(&self) -> &Qp {
        &self.qp
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn coin(&mut self, num: u32, den: u32) -> bool {
        self.rng.gen_ratio(num, den)
    }

    pub fn nonzero_int(&mut self) -> i64 {
        loop {
            let x = self.int_in(-self.bound, self.bound);
            if x != 0 {
                return x;
            }
        }
    }

    pub fn unit(&mut self) -> Padic {
        let p = self.qp.prime() as i64;
        loop {
            let x = self.nonzero_int();
            if x % p != 0 {
                return self.qp.int(x);
            }
        }
    }

    /// `p^k * u` with `k` in `[-1, 1]` and a small integer unit `u`.
    pub fn nonzero_scalar(&mut self) -> Padic {
        let k = self.int_in(-1, 1);
        self.unit().mul(&self.qp.p_power(k)).expect("small operands")
    }

    /// Like [`Sampler::nonzero_scalar`], zero with probability 1/8.
    pub fn scalar(&mut self) -> Padic {
        if self.coin(1, 8) {
            self.qp.zero()
        } else {
            self.nonzero_scalar()
        }
    }

    pub fn vector(&mut self, n: usize) -> Vector {
        (0..n).map(|_| self.scalar()).collect()
    }

    pub fn nonzero_vector(&mut self, n: usize) -> Vector {
        loop {
            let v = self.vector(n);
            if v.iter().any(|x| !x.is_zero()) {
                return v;
            }
        }
    }

    /// Vector `w` with `(w, w) != 0` for the given Gram matrix.
    ///
    /// `(w, w)` is kept within a few digits of its largest term, so the
    /// reflection in `w` has entries of bounded valuation.
    pub fn anisotropic_vector(&mut self, gram: &Matrix) -> Result<Vector> {
        let slack = 1;
        loop {
            let w = self.nonzero_vector(gram.rows());
            let ww = gram.bilinear(&w, &w)?;
            let Some(v) = ww.valuation() else { continue };
            let mut smallest = i64::MAX;
            for (i, wi) in w.iter().enumerate() {
                for (j, wj) in w.iter().enumerate() {
                    if let Some(t) = wi.mul(gram.get(i, j))?.mul(wj)?.valuation() {
                        smallest = smallest.min(t);
                    }
                }
            }
            if v <= smallest + slack {
                return Ok(w);
            }
        }
    }

    /// Product of two reflections in random anisotropic vectors. Products
    /// that cancel below the guard digits are redrawn.
    pub fn special_isometry(&mut self, gram: &Matrix) -> Result<Isometry> {
        if gram.rows() == 0 {
            return Ok(Isometry::identity(gram));
        }
        let mut redraws = 0;
        loop {
            let w1 = self.anisotropic_vector(gram)?;
            let w2 = self.anisotropic_vector(gram)?;
            match reflection_for_gram(gram, &w1)?.compose(&reflection_for_gram(gram, &w2)?) {
                Err(Error::PrecisionExhausted { .. }) if redraws < MAX_REDRAWS => redraws += 1,
                other => return other,
            }
        }
    }

    /// Product of `pairs` reflection pairs.
    pub fn special_isometry_long(&mut self, gram: &Matrix, pairs: usize) -> Result<Isometry> {
        let mut g = Isometry::identity(gram);
        let mut redraws = 0;
        let mut done = 0;
        while done < pairs {
            match g.compose(&self.special_isometry(gram)?) {
                Ok(h) => {
                    g = h;
                    done += 1;
                }
                Err(Error::PrecisionExhausted { .. }) if redraws < MAX_REDRAWS => redraws += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(g)
    }

    pub fn poincare(&mut self, decomp: &Decomposition) -> Result<PoincareElt> {
        let t = self.vector(decomp.dim_w());
        let r = self.special_isometry(&decomp.w_gram())?;
        PoincareElt::new(t, r)
    }

    pub fn partial_conformal(&mut self, decomp: &Decomposition) -> Result<PartialConfElt> {
        let c = self.nonzero_scalar();
        let h = self.poincare(decomp)?;
        PartialConfElt::new(c, h.t, h.r)
    }

    /// `(a b; c d)` with random `a != 0`, `b`, `c` and `d = (1 + bc)/a`;
    /// one draw in eight takes the `a = 0` shape instead.
    pub fn sl2(&mut self) -> Result<SL2Elt> {
        let qp = self.qp;
        if self.coin(1, 8) {
            let b = self.nonzero_scalar();
            let d = self.scalar();
            return SL2Elt::new(qp.zero(), b.clone(), b.inv()?.neg(), d);
        }
        let a = self.nonzero_scalar();
        let b = self.scalar();
        let c = self.scalar();
        let d = qp.one().add(&b.mul(&c)?)?.div(&a)?;
        SL2Elt::new(a, b, c, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadspace::QuadSpace;

    #[test]
    fn deterministic_and_certified() {
        let f = Qp::with_default_precision(3).unwrap();
        let s = QuadSpace::from_ints(&f, &[1, -1, 2]).unwrap();
        let mut a = Sampler::new(&f, 7);
        let mut b = Sampler::new(&f, 7);
        for _ in 0..5 {
            let g = a.special_isometry(&s.gram()).unwrap();
            assert_eq!(g, b.special_isometry(&s.gram()).unwrap());
            assert_eq!(g.det(), 1);
        }
        assert_eq!(a.sl2().unwrap(), b.sl2().unwrap());
    }
}
