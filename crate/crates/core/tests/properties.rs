use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skewcode::central::{
    default_tuple, eval_set, make_tuple, min_poly_over_k, EvalKind, SubgroupSpec, DEFAULT_ENUM_CAP,
};
use skewcode::codes::{build_code, min_distance, Ambient, CodeParams, Family, DEFAULT_CODE_CAP};
use skewcode::invariants::{subring_of, verify_subring, SubringKind};
use skewcode::{build_tower, Elem, FieldSpec, Gf, Level, Poly, QuotCtx, SkewRing};

/// `(p, e, n)` with `|L| ≤ 2^12`.
fn arb_tower() -> impl Strategy<Value = (u32, u32, u32)> {
    prop::sample::select(vec![(2, 1, 2), (2, 1, 5), (2, 2, 3), (3, 1, 2), (3, 2, 2), (5, 1, 3), (7, 1, 2), (2, 3, 4)])
}

fn quot(q: u32, n: u32, s: u32, t: usize) -> QuotCtx {
    let tower = build_tower(&FieldSpec::from_q(q, n, s).unwrap()).unwrap();
    let tuple = default_tuple(tower.k(), s as usize, t, DEFAULT_ENUM_CAP).unwrap();
    QuotCtx::new(tower, tuple).unwrap()
}

fn field_laws(f: &Gf, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    for _ in 0..50 {
        let (a, b, c) = (f.random(rng), f.random(rng), f.random(rng));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn field_axioms_on_every_level((p, e, n) in arb_tower(), seed in any::<u64>()) {
        let tw = build_tower(&FieldSpec::new(p, e, n, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for level in [Level::Prime, Level::K, Level::L, Level::E] {
            field_laws(tw.field(level), &mut rng)?;
        }
    }

    #[test]
    fn truncated_norm_recurrence((p, e, n) in arb_tower(), seed in any::<u64>()) {
        let tw = build_tower(&FieldSpec::new(p, e, n, 1)).unwrap();
        let l = tw.l();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = l.random(&mut rng);
        for i in 0..=2 * n as usize {
            prop_assert_eq!(tw.truncated_norm(a, i + 1), l.mul(tw.truncated_norm(a, i), tw.sigma_pow(a, i)));
        }
    }

    #[test]
    fn quotient_metric_and_homomorphisms(seed in any::<u64>(), which in 0usize..3) {
        let ctx = [quot(3, 2, 1, 2), quot(2, 2, 2, 1), quot(4, 2, 1, 3)][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ctx.ring();
        let (a, b, c) = (r.random(&mut rng, ctx.nst()), r.random(&mut rng, ctx.nst()), r.random(&mut rng, ctx.nst()));
        prop_assert_eq!(ctx.f_distance(&a, &b), ctx.f_distance(&b, &a));
        prop_assert!(ctx.f_distance(&a, &c) <= ctx.f_distance(&a, &b) + ctx.f_distance(&b, &c));
        prop_assert_eq!(ctx.f_distance(&a, &a), 0);
        let ab = ctx.mul(&a, &b);
        let split: Vec<_> = ctx.crt_split(&a).iter().zip(ctx.crt_split(&b)).enumerate()
            .map(|(i, (x, y))| r.right_rem(&r.mul(x, &y), &r.inflate(&ctx.tuple().polys[i])).unwrap())
            .collect();
        prop_assert_eq!(ctx.crt_split(&ab), split);
        if let Ok(inv) = ctx.invert_unit(&c) {
            prop_assert_eq!(ctx.mul(&c, &inv), skewcode::SkewPoly::one());
            prop_assert_eq!(ctx.f_weight(&ctx.mul(&c, &a)), ctx.f_weight(&a));
        }
    }

    #[test]
    fn bound_is_two_sided((p, e, n) in prop::sample::select(vec![(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2), (2, 2, 3)]),
                          seed in any::<u64>(), d in 1usize..5) {
        let ring = SkewRing::new(build_tower(&FieldSpec::new(p, e, n, 1)).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = ring.random_of_degree(&mut rng, d);
        if f.coeff(0).is_zero() {
            f.coeffs[0] = Elem::ONE;
        }
        let big = ring.inflate(&ring.bound_of(&f).unwrap());
        prop_assert!(ring.right_divides(&f, &big));
        for _ in 0..8 {
            let g = ring.random(&mut rng, 9);
            prop_assert_eq!(ring.mul(&big, &g), ring.mul(&g, &big));
        }
    }

    #[test]
    fn twist_condition_is_sound(k in 1usize..3, h in 0u32..2, twist in 1u32..9) {
        let tower = build_tower(&FieldSpec::from_q(3, 2, 2).unwrap()).unwrap();
        let p = |c: &[u32]| Poly::new(c.iter().map(|&x| Elem(x)).collect());
        let tuple = skewcode::AdmissibleTuple::new(tower.k(), vec![p(&[2, 1, 1]), p(&[2, 2, 1])]);
        let amb = Ambient::quotient(tower, tuple).unwrap();
        let code = build_code(amb.clone(), CodeParams::new(Family::S, k, Elem(twist)).with_h(h)).unwrap();
        prop_assert_eq!(code.size(), Some(3u128.pow(4 * k as u32)));
        let d = min_distance(&code, DEFAULT_CODE_CAP).unwrap().d;
        if code.condition.passed {
            prop_assert_eq!(d, 4 - k + 1);
        }
        let ctx = code.quotient().unwrap();
        for kind in [SubringKind::Il, SubringKind::Ir] {
            let ring = subring_of(ctx, &code.basis, kind).unwrap();
            prop_assert!(verify_subring(ctx, &ring));
        }
    }
}

#[test]
fn sigma_has_order_n_and_fixes_exactly_k() {
    for (p, e, n) in [(2, 1, 5), (2, 2, 3), (3, 2, 2), (5, 1, 3), (2, 3, 4)] {
        let tw = build_tower(&FieldSpec::new(p, e, n, 1)).unwrap();
        let l = tw.l();
        for i in 1..n as usize {
            assert!(l.elements().any(|a| tw.sigma_pow(a, i) != a));
        }
        assert!(l.elements().all(|a| tw.sigma_pow(a, n as usize) == a));
        let fixed: Vec<Elem> = l.elements().filter(|&a| tw.sigma_pow(a, 1) == a).collect();
        assert_eq!(fixed.len() as u32, tw.k().order());
        assert!(fixed.iter().all(|&a| tw.l_to_k(a).is_some()));
    }
}

#[test]
fn norm_fibers_are_uniform() {
    for (p, e, n) in [(2, 1, 6), (3, 1, 3), (2, 2, 3), (5, 1, 2), (3, 2, 2)] {
        let tw = build_tower(&FieldSpec::new(p, e, n, 1)).unwrap();
        let (k, l) = (tw.k(), tw.l());
        let mut fibers = vec![0u32; k.order() as usize];
        for a in l.elements().skip(1) {
            fibers[tw.norm_l_k(a).0 as usize] += 1;
        }
        let size = (l.order() - 1) / (k.order() - 1);
        assert!(fibers.iter().enumerate().all(|(c, &m)| if c == 0 { m == 0 } else { m == size }));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (a, b) = (l.random(&mut rng), l.random(&mut rng));
            let nab = tw.norm_between(l.mul(a, b), Level::K, Level::L).unwrap();
            let na = tw.norm_between(a, Level::K, Level::L).unwrap();
            let nb = tw.norm_between(b, Level::K, Level::L).unwrap();
            assert_eq!(nab, k.mul(na, nb));
        }
    }
}

#[test]
fn evaluation_points_have_degree_s() {
    for (q, s) in [(3, 3), (2, 4), (4, 2), (5, 2)] {
        let tower = build_tower(&FieldSpec::from_q(q, 1, s).unwrap()).unwrap();
        let pts = eval_set(&tower, EvalKind::A, SubgroupSpec::full(q as u64), DEFAULT_ENUM_CAP).unwrap();
        let e = tower.e_field();
        for &b in &pts {
            assert_eq!(min_poly_over_k(&tower, b).degree(), Some(s as usize));
            // in no proper subfield of E containing K
            let ed = e.degree();
            let kd = tower.k().degree();
            for d in (kd..ed).filter(|d| ed.is_multiple_of(*d) && d % kd == 0) {
                assert!(!e.in_subfield(b, d));
            }
        }
    }
}

#[test]
fn scaled_tuples_have_scaled_constants() {
    let tower = build_tower(&FieldSpec::new(7, 1, 3, 3)).unwrap();
    let k = tower.k();
    let f = Poly::new(vec![Elem(2), Elem(0), Elem(0), Elem(1)]);
    assert!(f.is_irreducible(k));
    let lambdas = [Elem(1), Elem(3)];
    let tuple = make_tuple(k, &f, &lambdas).unwrap();
    for (fi, &l) in tuple.polys.iter().zip(&lambdas) {
        let linv3 = k.pow(k.inv(l).unwrap(), 3);
        assert_eq!(fi.coeff(0), k.mul(linv3, f.coeff(0)));
    }
}
