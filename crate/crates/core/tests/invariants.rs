use proptest::prelude::*;

use qp_conformal::orthogonal::{orbit_classify, reflection};
use qp_conformal::{hilbert_symbol, psi, Padic, Qp, QuadSpace};

fn field() -> impl Strategy<Value = Qp> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Qp::with_default_precision(p).unwrap())
}

fn nonzero(qp: Qp) -> impl Strategy<Value = Padic> {
    (1i64..100_000, 1i64..2_000, any::<bool>()).prop_map(move |(n, d, neg)| {
        let n = if neg { -n } else { n };
        qp.ratio(n, d).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (Qp, Padic, Padic, Padic)> {
    field().prop_flat_map(|qp| (Just(qp), nonzero(qp), nonzero(qp), nonzero(qp)))
}

fn small_int(qp: Qp) -> impl Strategy<Value = Padic> {
    (-30i64..30).prop_map(move |n| qp.int(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms((_qp, a, b, c) in triple()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverses((qp, a, _b, _c) in triple()) {
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
        prop_assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), qp.one());
        prop_assert_eq!(a.div(&a).unwrap(), qp.one());
    }

    // reconstruction is unique below sqrt(p^prec / 2), about 2896 at p = 2
    #[test]
    fn rational_round_trip(qp in field(), n in -2_000i64..2_000, d in 1i64..2_000) {
        let a = qp.ratio(n, d).unwrap();
        let r = a.to_rational().unwrap();
        prop_assert_eq!(&r, &num_rational::BigRational::new(n.into(), d.into()));
        prop_assert_eq!(qp.rational(&r).unwrap(), a);
    }

    #[test]
    fn square_classes_multiply((_qp, a, b, _c) in triple()) {
        let ab = a.mul(&b).unwrap().square_class().unwrap();
        prop_assert_eq!(ab, a.square_class().unwrap().mul(&b.square_class().unwrap()));
        prop_assert!(a.square().unwrap().square_class().unwrap().is_trivial());
        let root = a.square().unwrap().sqrt().unwrap().unwrap();
        prop_assert!(root == a || root == a.neg());
    }

    #[test]
    fn psi_is_additive((_qp, a, b, _c) in triple()) {
        let lhs = psi(&a.add(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, psi(&a).unwrap().add(&psi(&b).unwrap()));
        prop_assert!(psi(&a.sub(&a).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn hilbert_symbol_identities((_qp, a, b, c) in triple()) {
        let h = |x: &Padic, y: &Padic| hilbert_symbol(x, y).unwrap();
        prop_assert_eq!(h(&a, &b), h(&b, &a));
        prop_assert_eq!(h(&a.mul(&c).unwrap(), &b), h(&a, &b) * h(&c, &b));
        prop_assert_eq!(h(&a, &a.neg()), 1);
        prop_assert_eq!(h(&a, &b.square().unwrap()), 1);
    }

    #[test]
    fn isometries_close_under_composition(
        (qp, diag, w1, w2, x) in field().prop_flat_map(|qp| {
            (3usize..6).prop_flat_map(move |n| (
                Just(qp),
                prop::collection::vec(nonzero(qp), n),
                prop::collection::vec(small_int(qp), n),
                prop::collection::vec(small_int(qp), n),
                prop::collection::vec(small_int(qp), n),
            ))
        })
    ) {
        let space = QuadSpace::new(&qp, diag).unwrap();
        prop_assume!(!space.q(&w1).unwrap().is_zero() && !space.q(&w2).unwrap().is_zero());
        let r1 = reflection(&space, &w1).unwrap();
        let r2 = reflection(&space, &w2).unwrap();
        prop_assert_eq!(r1.det(), -1);
        let g = r1.compose(&r2).unwrap();
        prop_assert!(g.is_special());
        let gx = g.apply(&x).unwrap();
        prop_assert_eq!(space.q(&gx).unwrap(), space.q(&x).unwrap());
        prop_assert_eq!(orbit_classify(&space, &gx).unwrap(), orbit_classify(&space, &x).unwrap());
        // a reflection is an involution
        prop_assert!(r1.compose(&r1).unwrap().matrix().is_identity());
    }
}
