//! Isometries of a quadratic space, reflections, and the orbit structure of
//! `SO(V)` acting on `V`.

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, vec_is_zero, Matrix, Vector};
use crate::padic::{Padic, GUARD_DIGITS};
use crate::quadspace::QuadSpace;

fn check_congruence(gram: &Matrix, matrix: &Matrix) -> Result<()> {
    if !matrix.is_square() || matrix.rows() != gram.rows() {
        return Err(Error::DimensionMismatch {
            expected: gram.rows(),
            got: matrix.rows(),
        });
    }
    let n = gram.rows();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || gram.get(i, j).is_exact_zero()));
    if !diagonal {
        let congruent = matrix.transpose().mul(gram)?.mul(matrix)?;
        return if congruent == *gram { Ok(()) } else { Err(Error::NotIsometry) };
    }
    // sum_k m_ki g_k m_kj, one pass per entry
    let scaled: Vec<Vector> = (0..n)
        .map(|k| (0..n).map(|i| matrix.get(k, i).mul(gram.get(k, k))).collect())
        .collect::<Result<_>>()?;
    for i in 0..n {
        for j in i..n {
            let terms = (0..n)
                .map(|k| scaled[k][i].mul(matrix.get(k, j)))
                .collect::<Result<Vec<_>>>()?;
            if Padic::sum(gram.field(), &terms)? != *gram.get(i, j) {
                return Err(Error::NotIsometry);
            }
        }
    }
    Ok(())
}

/// A matrix `g` with `g^T G g = G` for the Gram matrix `G` it was certified against.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    gram: Matrix,
    matrix: Matrix,
    det: i8,
}

impl Isometry {
    /// Checks the Gram congruence and that the determinant is `+-1`.
    pub fn certify(gram: &Matrix, matrix: Matrix) -> Result<Self> {
        check_congruence(gram, &matrix)?;
        let qp = gram.field();
        let d = matrix.det()?;
        let det = if d == qp.one() {
            1
        } else if d == qp.int(-1) {
            -1
        } else {
            return Err(Error::NotIsometry);
        };
        Ok(Isometry {
            gram: gram.clone(),
            matrix,
            det,
        })
    }

    /// Checks the Gram congruence; `det` is known from how `matrix` was built.
    fn certify_with_det(gram: &Matrix, matrix: Matrix, det: i8) -> Result<Self> {
        check_congruence(gram, &matrix)?;
        Ok(Isometry {
            gram: gram.clone(),
            matrix,
            det,
        })
    }

    /// Skips certification; only for negative controls in the test suites.
    pub(crate) fn uncertified(gram: Matrix, matrix: Matrix) -> Self {
        Isometry { gram, matrix, det: 1 }
    }

    pub fn of_space(space: &QuadSpace, matrix: Matrix) -> Result<Self> {
        Self::certify(&space.gram(), matrix)
    }

    pub fn identity(gram: &Matrix) -> Self {
        Isometry {
            gram: gram.clone(),
            matrix: Matrix::identity(gram.field(), gram.rows()),
            det: 1,
        }
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn det(&self) -> i8 {
        self.det
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_special(&self) -> bool {
        self.det == 1
    }

    pub fn apply(&self, x: &[Padic]) -> Result<Vector> {
        self.matrix.mul_vec(x)
    }

    /// `self * other` (apply `other` first), re-certified.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.gram != other.gram {
            return Err(Error::NotIsometry);
        }
        Isometry::certify_with_det(&self.gram, self.matrix.mul(&other.matrix)?, self.det * other.det)
    }

    pub fn inverse(&self) -> Result<Isometry> {
        Isometry::certify(&self.gram, self.matrix.inverse()?)
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

/// Row-major matrix of scalars plus the determinant flag.
impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Isometry", 2)?;
        st.serialize_field("matrix", &self.matrix)?;
        st.serialize_field("det", &self.det)?;
        st.end()
    }
}

/// `x -> x - 2 (x,w)/(w,w) w` for the form with Gram matrix `gram`.
pub fn reflection_for_gram(gram: &Matrix, w: &[Padic]) -> Result<Isometry> {
    let qp = *gram.field();
    let gw = gram.mul_vec(w)?;
    let ww = crate::linalg::dot(w, &gw)?;
    if ww.is_zero() {
        return Err(Error::NullReflectionVector);
    }
    let c = qp.int(2).div(&ww)?;
    let n = w.len();
    let mut m = Matrix::identity(&qp, n);
    for i in 0..n {
        if w[i].is_exact_zero() {
            continue;
        }
        let ci = c.mul(&w[i])?;
        for j in 0..n {
            if gw[j].is_exact_zero() {
                continue;
            }
            m.set(i, j, m.get(i, j).sub(&ci.mul(&gw[j])?)?);
        }
    }
    Isometry::certify_with_det(gram, m, -1)
}

pub fn reflection(space: &QuadSpace, w: &[Padic]) -> Result<Isometry> {
    if w.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: w.len(),
        });
    }
    reflection_for_gram(&space.gram(), w)
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitClass {
    Massive(Padic),
    Massless,
    Trivial,
}

impl OrbitClass {
    pub fn kind(&self) -> &'static str {
        match self {
            OrbitClass::Massive(_) => "massive",
            OrbitClass::Massless => "massless",
            OrbitClass::Trivial => "trivial",
        }
    }

    pub fn is_massive(&self) -> bool {
        matches!(self, OrbitClass::Massive(_))
    }
}

impl Serialize for OrbitClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OrbitClass", 2)?;
        st.serialize_field("kind", self.kind())?;
        if let OrbitClass::Massive(a) = self {
            st.serialize_field("a", &a.to_string())?;
        }
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitClassification {
    #[serde(flatten)]
    pub class: OrbitClass,
    /// False for `dim V < 3`, where the value of `Q` no longer separates orbits.
    pub complete_invariant: bool,
}

pub fn orbit_classify(space: &QuadSpace, p: &[Padic]) -> Result<OrbitClassification> {
    let class = if vec_is_zero(p) {
        OrbitClass::Trivial
    } else {
        let a = space.q(p)?;
        if a.is_zero() {
            OrbitClass::Massless
        } else {
            OrbitClass::Massive(a)
        }
    };
    Ok(OrbitClassification {
        class,
        complete_invariant: space.dim() >= 3,
    })
}

/// Explicit `T` with `T^T Gram(target) T = Gram(source)` for isometric diagonal spaces.
///
/// Built inductively: represent the first coefficient of `source` in
/// `target`, then recurse on the two orthogonal complements.
pub fn complement_isometry(source: &QuadSpace, target: &QuadSpace) -> Result<Matrix> {
    if !source.isometric(target) {
        return Err(Error::NotIsometric);
    }
    let qp = *source.field();
    let m = source.dim();
    if m == 0 {
        return Ok(Matrix::zeros(&qp, 0, 0));
    }
    if source.diag() == target.diag() {
        return Ok(Matrix::identity(&qp, m));
    }
    let x = target.represent(&source.diag()[0])?;
    let comp = target.orthogonal_complement(std::slice::from_ref(&x))?;
    let rest = QuadSpace::new(&qp, source.diag()[1..].to_vec())?;
    let inner = complement_isometry(&rest, &comp.space)?;
    let mut cols = vec![x];
    if m > 1 {
        let b = Matrix::from_columns(&qp, m, &comp.basis)?;
        cols.extend(b.mul(&inner)?.columns());
    }
    let t = Matrix::from_columns(&qp, m, &cols)?;
    if t.transpose().mul(&target.gram())?.mul(&t)? != source.gram() {
        return Err(Error::PrecisionExhausted {
            remaining: 0,
            context: "complement isometry certification",
        });
    }
    Ok(t)
}

/// How far `(w, w)` falls below its largest diagonal term; `None` for null `w`.
/// Digits already lost in `w` and `(w, w)` are added on.
fn reflection_loss(space: &QuadSpace, w: &[Padic]) -> Result<Option<i64>> {
    let ww = space.q(w)?;
    let Some(v) = ww.valuation() else {
        return Ok(None);
    };
    let mut top = i64::MAX;
    let mut prec = ww.precision();
    for (a, x) in space.diag().iter().zip(w) {
        if let Some(t) = a.mul(&x.square()?)?.valuation() {
            top = top.min(t);
            prec = prec.min(x.precision());
        }
    }
    Ok(Some(v - top + i64::from(space.field().precision()) - i64::from(prec)))
}

/// Best-conditioned anisotropic `w` with `(w, p) = 0`, so that the
/// reflection in `w` fixes `p`, with its loss.
fn fixing_vector(space: &QuadSpace, p: &[Padic]) -> Result<Option<(i64, Vector)>> {
    let qp = *space.field();
    let n = space.dim();
    let pairing: Vec<Padic> = space
        .diag()
        .iter()
        .zip(p)
        .map(|(a, x)| a.mul(x))
        .collect::<Result<_>>()?;
    let mut best: Option<(i64, Vector)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let mut w = vec![qp.zero(); n];
            w[i] = pairing[j].clone();
            w[j] = pairing[i].neg();
            if vec_is_zero(&w) {
                w[j] = qp.one();
            }
            if let Some(loss) = usable_loss(space, Ok(w.clone()))? {
                if best.as_ref().is_none_or(|(b, _)| loss < *b) {
                    best = Some((loss, w));
                }
            }
        }
    }
    Ok(best)
}

/// Loss of the reflection in `w`; a `w` whose own square cancels past the
/// guard digits is unusable.
fn usable_loss(space: &QuadSpace, w: Result<Vector>) -> Result<Option<i64>> {
    match w.and_then(|w| reflection_loss(space, &w)) {
        Err(Error::PrecisionExhausted { .. }) => Ok(None),
        other => other,
    }
}

#[derive(Clone, Copy)]
enum Step {
    /// Reflection in `p - p2`.
    Diff,
    /// Reflection in `p + p2`, then in `p2`.
    SumReflect,
    /// Reflection in `p + p2`, then `-1`.
    SumNegate,
}

/// Candidate single steps carrying `p` to `p2`: loss and whether the
/// determinant is `-1`.
fn steps(space: &QuadSpace, p: &[Padic], p2: &[Padic]) -> Result<Vec<(i64, bool, Step)>> {
    let mut out = Vec::new();
    if let Some(l) = usable_loss(space, linalg::vec_sub(p, p2))? {
        out.push((l, true, Step::Diff));
    }
    if !space.q(p)?.is_zero() {
        if let Some(l) = usable_loss(space, linalg::vec_add(p, p2))? {
            if let Some(l2) = usable_loss(space, Ok(p2.to_vec()))? {
                out.push((l + l2, false, Step::SumReflect));
            }
            out.push((l, space.dim().is_multiple_of(2), Step::SumNegate));
        }
    }
    Ok(out)
}

fn build_step(space: &QuadSpace, p: &[Padic], p2: &[Padic], step: Step) -> Result<Isometry> {
    match step {
        Step::Diff => reflection(space, &linalg::vec_sub(p, p2)?),
        Step::SumReflect => {
            let to_neg = reflection(space, &linalg::vec_add(p, p2)?)?;
            reflection(space, p2)?.compose(&to_neg)
        }
        Step::SumNegate => {
            let to_neg = reflection(space, &linalg::vec_add(p, p2)?)?;
            let gram = space.gram();
            let minus = Isometry::certify(&gram, Matrix::identity(space.field(), space.dim()).scale(&space.field().int(-1))?)?;
            minus.compose(&to_neg)
        }
    }
}

/// Flips the signs of the coordinates selected by `mask`.
fn flip(x: &[Padic], mask: usize) -> Vector {
    x.iter()
        .enumerate()
        .map(|(i, c)| if mask >> i & 1 == 1 { c.neg() } else { c.clone() })
        .collect()
}

/// Sign flips are exact isometries of a diagonal form.
fn flip_isometry(space: &QuadSpace, mask: usize) -> Result<Isometry> {
    let qp = *space.field();
    let mut m = Matrix::identity(&qp, space.dim());
    for i in (0..space.dim()).filter(|i| mask >> i & 1 == 1) {
        m.set(i, i, qp.int(-1));
    }
    Isometry::certify(&space.gram(), m)
}

struct Plan {
    loss: i64,
    mask: usize,
    via: Option<Vector>,
    first: Step,
    fix: bool,
}

/// Keeps `plan` if it beats `best`; odd plans pay for the fixing reflection.
fn consider(best: &mut Option<Plan>, plan: Plan, fix_loss: Option<i64>) {
    let loss = match (plan.fix, fix_loss) {
        (false, _) => plan.loss,
        (true, Some(f)) => plan.loss + f,
        (true, None) => return,
    };
    if best.as_ref().is_none_or(|b| loss < b.loss) {
        *best = Some(Plan { loss, ..plan });
    }
}

/// Searches chains carrying `p` to `p2` for the one that loses fewest
/// digits: exact sign flips of `p`, then one step, or two reflections
/// through a rescaled hyperbolic partner when `p` is null. Losses add up
/// along a chain, and odd chains pay for a reflection fixing `p2`.
fn reflection_chain(space: &QuadSpace, p: &[Padic], p2: &[Padic]) -> Result<Option<Isometry>> {
    let qp = *space.field();
    let fix = fixing_vector(space, p2)?;
    let mut partners = Vec::new();
    if space.q(p)?.is_zero() {
        for anchor in [p, p2] {
            let Ok(partner) = space.hyperbolic_pair(anchor) else {
                continue;
            };
            // the partner's scale is free; p-power rescaling is exact
            for k in -6..=6 {
                let r = linalg::vec_scale(&qp.p_power(k), &partner)?;
                if let Some(l2) = usable_loss(space, linalg::vec_sub(&r, p2))? {
                    partners.push((r, l2));
                }
            }
        }
    }
    let fix_loss = fix.as_ref().map(|(f, _)| *f);
    // certifying g^T G g roughly doubles a chain's loss
    let good_enough = (i64::from(qp.precision()) - i64::from(GUARD_DIGITS)) / 2;
    let mut best: Option<Plan> = None;
    for mask in 0..1usize << space.dim() {
        // flips only pay off for badly conditioned pairs
        if mask == 1 && best.as_ref().is_some_and(|b| b.loss <= good_enough) {
            break;
        }
        let xs = flip(p, mask);
        let flips_odd = mask.count_ones() % 2 == 1;
        for (loss, odd, first) in steps(space, &xs, p2)? {
            consider(&mut best, Plan { loss, mask, via: None, first, fix: odd != flips_odd }, fix_loss);
        }
        for (r, l2) in &partners {
            if let Some(l1) = usable_loss(space, linalg::vec_sub(&xs, r))? {
                let via = Some(r.clone());
                consider(&mut best, Plan { loss: l1 + l2, mask, via, first: Step::Diff, fix: flips_odd }, fix_loss);
            }
        }
    }
    let Some(plan) = best else {
        return Ok(None);
    };
    let xs = flip(p, plan.mask);
    let mut g = flip_isometry(space, plan.mask)?;
    match &plan.via {
        None => g = build_step(space, &xs, p2, plan.first)?.compose(&g)?,
        Some(r) => {
            g = build_step(space, &xs, r, Step::Diff)?.compose(&g)?;
            g = build_step(space, r, p2, Step::Diff)?.compose(&g)?;
        }
    }
    if plan.fix {
        let (_, w) = fix.expect("odd plans need a fixing vector");
        g = reflection(space, &w)?.compose(&g)?;
    }
    Ok(Some(g))
}

/// `g` in `SO(V)` with `g p = p'`, for `p`, `p'` in the same orbit.
///
/// Uses a short chain: sign flips, then the reflection in `p - p'`, or in
/// `p + p'` followed by `p'` or by `-1`, or for null vectors a detour
/// through a rescaled hyperbolic partner, whichever is best conditioned. An odd chain is
/// corrected by a reflection fixing `p'`. If no chain applies the isometry
/// is assembled from adapted bases instead.
pub fn transitivity_witness(space: &QuadSpace, p: &[Padic], p2: &[Padic]) -> Result<Isometry> {
    if space.dim() < 3 {
        return Err(Error::DimensionTooSmall(3));
    }
    let c1 = orbit_classify(space, p)?.class;
    let c2 = orbit_classify(space, p2)?.class;
    if c1 != c2 {
        return Err(Error::DifferentOrbits);
    }
    let gram = space.gram();
    if p == p2 || c1 == OrbitClass::Trivial {
        return Ok(Isometry::identity(&gram));
    }
    let mut g = match reflection_chain(space, p, p2)? {
        Some(g) => g,
        None => frame_witness(space, p, p2, &c1)?,
    };
    if !g.is_special() {
        let (_, w) = fixing_vector(space, p2)?.ok_or(Error::PrecisionExhausted {
            remaining: 0,
            context: "determinant correction",
        })?;
        g = reflection(space, &w)?.compose(&g)?;
    }
    if g.apply(p)? != p2 {
        return Err(Error::PrecisionExhausted {
            remaining: 0,
            context: "transitivity witness certification",
        });
    }
    Ok(g)
}

/// Isometry matching adapted bases `p` (plus a hyperbolic partner when
/// massless) and complement bases, the complements matched by
/// [`complement_isometry`].
fn frame_witness(space: &QuadSpace, p: &[Padic], p2: &[Padic], class: &OrbitClass) -> Result<Isometry> {
    let qp = *space.field();
    let n = space.dim();
    let (src_frame, dst_frame) = match class {
        OrbitClass::Massless => {
            let q = space.hyperbolic_pair(p)?;
            let q2 = space.hyperbolic_pair(p2)?;
            (vec![p.to_vec(), q], vec![p2.to_vec(), q2])
        }
        _ => (vec![p.to_vec()], vec![p2.to_vec()]),
    };
    let src = space.orthogonal_complement(&src_frame)?;
    let dst = space.orthogonal_complement(&dst_frame)?;
    let t = complement_isometry(&src.space, &dst.space)?;
    let dst_basis = Matrix::from_columns(&qp, n, &dst.basis)?.mul(&t)?.columns();
    let source = Matrix::from_columns(&qp, n, &[src_frame, src.basis].concat())?;
    let image = Matrix::from_columns(&qp, n, &[dst_frame, dst_basis].concat())?;
    Isometry::certify(&space.gram(), image.mul(&source.inverse()?)?)
}
