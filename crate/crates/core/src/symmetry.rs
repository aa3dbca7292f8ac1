//! Orbits of the enlarged group `SO(V) x Q_p^x` and the chain of descents
//! `V_0, V_1, ...` through stabilizers of null characters.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{vec_add, vec_is_zero, vec_scale, zero_vector, Vector};
use crate::orthogonal::{orbit_classify, OrbitClass};
use crate::padic::{square_class_ball, Padic, Qp};
use crate::poincare::Decomposition;
use crate::quadspace::QuadSpace;
use crate::sampling::Sampler;

/// `y` lies in the orbit of the massive `x` under `SO(V) x Q_p^x` iff
/// `Q(y) / Q(x)` is a nonzero square.
pub fn enlarged_orbit_member(space: &QuadSpace, x: &[Padic], y: &[Padic]) -> Result<bool> {
    let qx = space.q(x)?;
    if qx.is_zero() {
        return Err(Error::NotMassive);
    }
    let qy = space.q(y)?;
    if qy.is_zero() {
        return Ok(false);
    }
    Ok(qy.div(&qx)?.square_class()?.is_trivial())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpennessReport {
    /// Perturbations are drawn from `p^radius Z_p^n`.
    pub radius: i64,
    pub trials: usize,
    /// Perturbations inside the ball that left the enlarged orbit.
    pub inside_escapes: usize,
    /// Perturbations inside the ball that changed `Q`, leaving the `SO(V)` orbit.
    pub level_set_exits: usize,
    /// A vector outside the enlarged orbit of `x`.
    pub outside_witness: Option<Vector>,
    pub outside_member: Option<bool>,
}

/// Smallest `r` with `Q(x + d) / Q(x)` a square for all `d` in `p^r Z_p^n`.
pub fn openness_radius(space: &QuadSpace, x: &[Padic]) -> Result<i64> {
    let qx = space.q(x)?;
    if qx.is_zero() {
        return Err(Error::NotMassive);
    }
    let qp = space.field();
    let target = qx.valuation().expect("nonzero") + square_class_ball(&qx)? as i64;
    let v2 = qp.int(2).valuation().expect("nonzero");
    let cross = space
        .diag()
        .iter()
        .zip(x)
        .filter(|(_, xi)| !xi.is_zero())
        .map(|(a, xi)| a.mul(xi).map(|t| t.valuation().expect("nonzero")))
        .collect::<Result<Vec<i64>>>()?
        .into_iter()
        .min()
        .expect("x is nonzero");
    let diag_min = space
        .diag()
        .iter()
        .map(|a| a.valuation().expect("nonzero"))
        .min()
        .expect("space is nonzero");
    let r1 = target - v2 - cross;
    let r2 = (target - diag_min + 1).div_euclid(2);
    Ok(r1.max(r2))
}

/// Sample-level evidence that the enlarged orbit of `x` is open while the
/// `SO(V)` orbit is a level set of `Q`.
pub fn openness_demo(space: &QuadSpace, x: &[Padic], sampler: &mut Sampler, trials: usize) -> Result<OpennessReport> {
    let qp = *space.field();
    let n = space.dim();
    let radius = openness_radius(space, x)?;
    let qx = space.q(x)?;
    let scale = qp.p_power(radius);
    let bound = (qp.prime() as i64).pow(3) - 1;
    let mut inside_escapes = 0;
    let mut level_set_exits = 0;
    for _ in 0..trials {
        let d: Vector = (0..n).map(|_| qp.int(sampler.int_in(0, bound))).collect();
        let y = vec_add(x, &vec_scale(&scale, &d)?)?;
        if !enlarged_orbit_member(space, x, &y)? {
            inside_escapes += 1;
        }
        if space.q(&y)? != qx {
            level_set_exits += 1;
        }
    }
    let outside_witness = outside_point(space, &qx)?;
    let outside_member = match &outside_witness {
        Some(y) => Some(enlarged_orbit_member(space, x, y)?),
        None => None,
    };
    Ok(OpennessReport {
        radius,
        trials,
        inside_escapes,
        level_set_exits,
        outside_witness,
        outside_member,
    })
}

/// A vector whose `Q` value lies in another square class than `a`, when
/// the form represents one.
fn outside_point(space: &QuadSpace, a: &Padic) -> Result<Option<Vector>> {
    let qp = space.field();
    for class in qp.square_classes() {
        if class.is_trivial() {
            continue;
        }
        let target = a.mul(&class.to_padic(qp))?;
        match space.represent(&target) {
            Ok(y) => return Ok(Some(y)),
            Err(Error::NotRepresented) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct Descent {
    pub space: QuadSpace,
    pub decomp: Decomposition,
    pub witt_equivalent: bool,
}

/// Passes from `V` to `W = <p, q>^perp` for a null `p` and its hyperbolic partner `q`.
pub fn descend(space: &QuadSpace, p: &[Padic]) -> Result<Descent> {
    if vec_is_zero(p) || !space.q(p)?.is_zero() {
        return Err(Error::NotNull);
    }
    let decomp = Decomposition::new(space, p)?;
    let w = decomp.w_space().clone();
    let witt_equivalent = w.witt_equivalent(space)?;
    Ok(Descent {
        space: w,
        decomp,
        witt_equivalent,
    })
}

/// Picks a character of the current stage, identified with a vector of the stage's space.
pub trait CharacterChooser {
    fn choose(&mut self, stage: usize, space: &QuadSpace) -> Result<Vector>;
}

/// A null vector when one exists, otherwise the trivial character.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullFirst;

impl CharacterChooser for NullFirst {
    fn choose(&mut self, _stage: usize, space: &QuadSpace) -> Result<Vector> {
        if space.is_isotropic() {
            space.isotropic_vector()
        } else {
            Ok(zero_vector(space.field(), space.dim()))
        }
    }
}

/// The first basis vector (massive, as the form is diagonal) at stage `k`; null-first elsewhere.
#[derive(Clone, Copy, Debug)]
pub struct MassiveAt(pub usize);

impl CharacterChooser for MassiveAt {
    fn choose(&mut self, stage: usize, space: &QuadSpace) -> Result<Vector> {
        if stage == self.0 && space.dim() > 0 {
            let mut e = zero_vector(space.field(), space.dim());
            e[0] = space.field().one();
            Ok(e)
        } else {
            NullFirst.choose(stage, space)
        }
    }
}

/// Replays a fixed list of choices, one per stage.
#[derive(Clone, Debug)]
pub struct FromList(pub Vec<Vector>);

impl CharacterChooser for FromList {
    fn choose(&mut self, stage: usize, space: &QuadSpace) -> Result<Vector> {
        let v = self
            .0
            .get(stage)
            .ok_or_else(|| Error::Parse(format!("no choice supplied for stage {stage}")))?;
        if v.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: v.len(),
            });
        }
        Ok(v.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainVerdict {
    EventuallyMassive,
    MasslessTower,
    TerminatedAnisotropic,
    TerminatedTrivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConformalVerdict {
    Impossible,
    NotExcluded,
}

#[derive(Clone, Debug)]
pub struct ChainStage {
    pub space: QuadSpace,
    pub chosen: Vector,
    pub orbit: OrbitClass,
    /// Certification against the previous stage; `None` at stage 0.
    pub witt_equivalent_to_previous: Option<bool>,
}

impl Serialize for ChainStage {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings = |v: &[Padic]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let mut st = s.serialize_struct("ChainStage", 8)?;
        st.serialize_field("dim", &self.space.dim())?;
        st.serialize_field("diag", &strings(self.space.diag()))?;
        st.serialize_field("hasse", &self.space.hasse())?;
        st.serialize_field("witt_index", &self.space.witt_index())?;
        if self.orbit == OrbitClass::Trivial {
            st.serialize_field("chosen", "trivial")?;
        } else {
            st.serialize_field("chosen", &strings(&self.chosen))?;
        }
        st.serialize_field("orbit", &self.orbit)?;
        st.serialize_field("witt_equivalent_to_previous", &self.witt_equivalent_to_previous)?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub stages: Vec<ChainStage>,
    pub verdict: ChainVerdict,
    pub descents: usize,
}

impl ChainReport {
    /// Every stage after the first is certified Witt equivalent to its predecessor.
    pub fn all_stages_certified(&self) -> bool {
        self.stages.iter().skip(1).all(|s| s.witt_equivalent_to_previous == Some(true))
    }
}

/// Runs the descent until a massive choice, the trivial character, or a
/// null choice in dimension at most 2 ends it.
///
/// A null pick in dimension 2 would leave `W = 0`, where only the trivial
/// character remains; the tower is reported as massless at that point.
pub fn chain_descent(v0: &QuadSpace, chooser: &mut dyn CharacterChooser) -> Result<ChainReport> {
    if v0.dim() == 0 {
        return Err(Error::DimensionTooSmall(1));
    }
    let mut space = v0.clone();
    let mut stages = Vec::new();
    let mut previous: Option<bool> = None;
    let mut descents = 0;
    let verdict = loop {
        let chosen = chooser.choose(stages.len(), &space)?;
        let orbit = orbit_classify(&space, &chosen)?.class;
        stages.push(ChainStage {
            space: space.clone(),
            chosen: chosen.clone(),
            orbit: orbit.clone(),
            witt_equivalent_to_previous: previous,
        });
        match orbit {
            OrbitClass::Massive(_) => break ChainVerdict::EventuallyMassive,
            OrbitClass::Trivial => {
                break if space.is_isotropic() {
                    ChainVerdict::TerminatedTrivial
                } else {
                    ChainVerdict::TerminatedAnisotropic
                }
            }
            OrbitClass::Massless if space.dim() <= 2 => break ChainVerdict::MasslessTower,
            OrbitClass::Massless => {
                let d = descend(&space, &chosen)?;
                previous = Some(d.witt_equivalent);
                space = d.space;
                descents += 1;
            }
        }
    };
    Ok(ChainReport {
        stages,
        verdict,
        descents,
    })
}

pub fn conformal_symmetry_verdict(report: &ChainReport) -> ConformalVerdict {
    match report.verdict {
        ChainVerdict::EventuallyMassive => ConformalVerdict::Impossible,
        _ => ConformalVerdict::NotExcluded,
    }
}

/// Convenience for callers holding only a field and diagonal.
pub fn chain_from_ints(qp: &Qp, diag: &[i64], chooser: &mut dyn CharacterChooser) -> Result<ChainReport> {
    chain_descent(&QuadSpace::from_ints(qp, diag)?, chooser)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> Qp {
        Qp::with_default_precision(p).unwrap()
    }

    #[test]
    fn enlarged_membership() {
        let f = q(5);
        let s = QuadSpace::from_ints(&f, &[1, 1, 1]).unwrap();
        let x = vec![f.one(), f.zero(), f.zero()];
        assert!(enlarged_orbit_member(&s, &x, &x).unwrap());
        assert!(enlarged_orbit_member(&s, &x, &vec_scale(&f.int(7), &x).unwrap()).unwrap());
        // Q(y) = 5
        let y = vec![f.int(2), f.one(), f.zero()];
        assert!(!enlarged_orbit_member(&s, &x, &y).unwrap());
        let null = QuadSpace::from_ints(&f, &[1, -1, 1]).unwrap();
        assert_eq!(
            enlarged_orbit_member(&null, &[f.one(), f.one(), f.zero()], &x).unwrap_err(),
            Error::NotMassive
        );
    }

    #[test]
    fn chains() {
        let f = q(3);
        let r = chain_from_ints(&f, &[1, -1, 1, -1, 1, -1, 1, -1], &mut NullFirst).unwrap();
        assert_eq!(r.verdict, ChainVerdict::MasslessTower);
        assert_eq!(r.descents, 3);
        assert!(r.all_stages_certified());
        let r = chain_from_ints(&f, &[1, -1, 1, -1, 1, -1, 1, -1], &mut MassiveAt(0)).unwrap();
        assert_eq!(r.verdict, ChainVerdict::EventuallyMassive);
        assert_eq!(r.stages.len(), 1);
        assert_eq!(conformal_symmetry_verdict(&r), ConformalVerdict::Impossible);
        let an = QuadSpace::anisotropic_quaternary(&f).unwrap();
        let r = chain_descent(&an, &mut NullFirst).unwrap();
        assert_eq!(r.verdict, ChainVerdict::TerminatedAnisotropic);
        assert_eq!(conformal_symmetry_verdict(&r), ConformalVerdict::NotExcluded);
    }

    #[test]
    fn descend_square() {
        let f = q(7);
        let s = QuadSpace::from_ints(&f, &[1, -1, 1, -1]).unwrap();
        let d = descend(&s, &[f.one(), f.one(), f.zero(), f.zero()]).unwrap();
        assert_eq!(d.space.dim(), 2);
        assert!(d.witt_equivalent);
        assert_eq!(descend(&s, &[f.one(), f.zero(), f.zero(), f.zero()]).unwrap_err(), Error::NotNull);
    }

    #[test]
    fn openness_small() {
        let f = q(2);
        let s = QuadSpace::from_ints(&f, &[1, 1, 1]).unwrap();
        let x = vec![f.one(), f.one(), f.one()];
        let mut sampler = Sampler::new(&f, 5);
        let rep = openness_demo(&s, &x, &mut sampler, 50).unwrap();
        assert_eq!(rep.inside_escapes, 0);
        assert_eq!(rep.outside_member, Some(false));
    }
}
