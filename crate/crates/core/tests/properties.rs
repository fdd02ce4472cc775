use std::sync::Arc;

use pcurv_core::hitchin::{
    canonical_connection_apply, cartier_descend_section, descend_invariants, frobenius_trace_sides,
    hitchin_invariants,
};
use pcurv_core::identities::IdentityRegistry;
use pcurv_core::panel::random_poly;
use pcurv_core::{
    algebroid::{validate_algebroid, validate_p_structure},
    parse_poly, Algebroid, Derivation, Descent, FirstOrder, LambdaModule, Operator, PanelConfig,
    Poly, PolyMatrix, PolyRing, Symbol,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn panel(seed: u64) -> PanelConfig {
    PanelConfig {
        seed,
        trials: 4,
        degree: 2,
    }
}

/// `[e1, e2] = e1`, anchor `(∂, x∂)`, `e1^[p] = 0`, `e2^[p] = e2`.
fn action_algebroid(p: u64) -> Arc<Algebroid> {
    let r = PolyRing::new(p, &["x"]).unwrap();
    let zero = Poly::zero(&r);
    let one = Poly::one(&r);
    let x = Poly::var(&r, 0);
    let mut bracket = vec![vec![vec![zero.clone(); 2]; 2]; 2];
    bracket[0][1][0] = one.clone();
    bracket[1][0][0] = -&one;
    Algebroid::new(
        &r,
        vec!["e1".into(), "e2".into()],
        bracket,
        vec![
            Derivation::new(&r, vec![one.clone()]).unwrap(),
            Derivation::new(&r, vec![x]).unwrap(),
        ],
        vec![FirstOrder::zero(&r, 2), FirstOrder::generator(one, 2, 1)],
    )
    .unwrap()
}

fn algebroid(kind: u8, p: u64, seed: u64) -> Arc<Algebroid> {
    match kind % 4 {
        0 => Algebroid::tangent(&PolyRing::new(p, &["x"]).unwrap()).unwrap(),
        1 => Algebroid::tangent(&PolyRing::new(p, &["x", "y"]).unwrap()).unwrap(),
        2 => {
            let r = PolyRing::new(p, &["x"]).unwrap();
            let mut g = rng(seed);
            let alpha = (0..2)
                .map(|_| (0..2).map(|_| random_poly(&mut g, &r, 2, 2)).collect())
                .collect();
            Algebroid::higgs(&r, alpha).unwrap()
        }
        _ => action_algebroid(p),
    }
}

fn random_first_order(alg: &Arc<Algebroid>, g: &mut ChaCha8Rng) -> FirstOrder {
    let ring = alg.ring();
    let mut d = FirstOrder::field(
        (0..alg.rank())
            .map(|_| random_poly(g, ring, 2, 2))
            .collect(),
    );
    d.scalar = random_poly(g, ring, 2, 2);
    d
}

fn random_operator(alg: &Arc<Algebroid>, g: &mut ChaCha8Rng) -> Operator {
    let a = Operator::from_first_order(alg, &random_first_order(alg, g));
    let b = Operator::from_first_order(alg, &random_first_order(alg, g));
    a.mul(&b).unwrap().add(&Operator::from_first_order(
        alg,
        &random_first_order(alg, g),
    ))
}

fn random_matrix(ring: &Arc<PolyRing>, n: usize, g: &mut ChaCha8Rng) -> PolyMatrix {
    let rows = (0..n)
        .map(|_| (0..n).map(|_| random_poly(g, ring, 2, 2)).collect())
        .collect();
    PolyMatrix::from_rows(ring, rows).unwrap()
}

/// A flat connection on a trivial bundle over the tangent algebroid.
fn random_flat_module(p: u64, shape: u8, g: &mut ChaCha8Rng) -> Arc<LambdaModule> {
    match shape % 3 {
        0 => {
            let r = PolyRing::new(p, &["x"]).unwrap();
            let t = Algebroid::tangent(&r).unwrap();
            Arc::new(LambdaModule::new(&t, vec![random_matrix(&r, 1, g)]).unwrap())
        }
        1 => {
            let r = PolyRing::new(p, &["x"]).unwrap();
            let t = Algebroid::tangent(&r).unwrap();
            Arc::new(LambdaModule::new(&t, vec![random_matrix(&r, 2, g)]).unwrap())
        }
        _ => {
            // exact one-form plus constants: A_j = ∂_j h + c_j
            let r = PolyRing::new(p, &["x", "y"]).unwrap();
            let t = Algebroid::tangent(&r).unwrap();
            let h = random_poly(g, &r, 3, 3);
            let mats = (0..2)
                .map(|j| {
                    let c = Poly::constant(&r, rand::Rng::gen_range(g, 0..p));
                    PolyMatrix::scalar(&(&h.derive(j) + &c), 1)
                })
                .collect();
            Arc::new(LambdaModule::new(&t, mats).unwrap())
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multiplication_is_associative(kind in 0u8..4, p in prop::sample::select(vec![3u64, 5]), seed: u64) {
        let alg = algebroid(kind, p, seed);
        let mut g = rng(seed);
        let (a, b, c) = (random_operator(&alg, &mut g), random_operator(&alg, &mut g), random_operator(&alg, &mut g));
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn symbols_are_multiplicative(kind in 0u8..4, seed: u64) {
        let alg = algebroid(kind, 3, seed);
        let mut g = rng(seed);
        let a = random_operator(&alg, &mut g);
        let b = random_operator(&alg, &mut g);
        let lhs = a.mul(&b).unwrap().symbol_top();
        let rhs = a.symbol_top().mul(&b.symbol_top()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let d = random_first_order(&alg, &mut g);
        let s = Symbol::from_first_order(&alg, &d);
        if !s.is_zero() {
            let dop = Operator::from_first_order(&alg, &d);
            prop_assert_eq!(dop.pow(3).unwrap().symbol_top(), s.pow(3).unwrap());
        }
    }

    #[test]
    fn iota_invariants(kind in 0u8..4, p in prop::sample::select(vec![3u64, 5]), seed: u64) {
        let alg = algebroid(kind, p, seed);
        let rep = IdentityRegistry::iota_suite().run(&alg, &panel(seed)).unwrap();
        prop_assert!(rep.all_passed(), "{}", rep);
    }

    #[test]
    fn p_structure_axioms(kind in 0u8..4, seed: u64) {
        let alg = algebroid(kind, 3, seed);
        let rep = validate_algebroid(&alg, &panel(seed)).unwrap();
        prop_assert!(rep.all_passed(), "{}", rep);
        let rep = validate_p_structure(&alg, &panel(seed)).unwrap();
        prop_assert!(rep.all_passed(), "{}", rep);
        let rep = IdentityRegistry::enveloping_axioms().run(&alg, &panel(seed)).unwrap();
        prop_assert!(rep.all_passed(), "{}", rep);
    }

    #[test]
    fn rees_is_valid_and_specializes(kind in 0u8..4, seed: u64) {
        let alg = algebroid(kind, 3, seed);
        let rees = alg.rees().unwrap();
        prop_assert!(validate_algebroid(&rees, &panel(seed)).unwrap().all_passed());
        let rep = validate_p_structure(&rees, &panel(seed)).unwrap();
        prop_assert!(rep.all_passed(), "{}", rep);
        prop_assert_eq!(&*rees.specialize_t(1).unwrap(), &*alg);
    }

    #[test]
    fn flat_modules_have_descending_invariants(p in prop::sample::select(vec![3u64, 5]), shape in 0u8..3, seed: u64) {
        let mut g = rng(seed);
        let m = random_flat_module(p, shape, &mut g);
        prop_assert!(m.is_flat().unwrap());
        let c = m.p_curvature(false).unwrap();
        prop_assert!(c.check_oracle_equivalence().unwrap().all_passed());
        prop_assert!(c.check_flat_commutation().unwrap().all_passed());
        let inv = hitchin_invariants(&c).unwrap();
        let rep = descend_invariants(&inv, m.algebroid()).unwrap();
        prop_assert!(rep.generically_surjective);
        prop_assert!(rep.all_descended());
        prop_assert!(rep.is_consistent().unwrap());
    }

    #[test]
    fn trace_of_frobenius_power(p in prop::sample::select(vec![2u64, 3, 5, 7]), n in 1usize..4, seed: u64) {
        let r = PolyRing::new(p, &["x", "y"]).unwrap();
        let a = random_matrix(&r, n, &mut rng(seed));
        let (lhs, rhs) = frobenius_trace_sides(&a).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartier_equivalence(p in prop::sample::select(vec![3u64, 5]), pulled_back: bool, seed: u64) {
        let r = PolyRing::new(p, &["x", "y"]).unwrap();
        let mut g = rng(seed);
        let section: Vec<Poly> = (0..2)
            .map(|_| {
                let f = random_poly(&mut g, &r, 3, 3);
                if pulled_back { f.frobenius_pullback().unwrap() } else { f }
            })
            .collect();
        let flat = (0..2).all(|j| {
            canonical_connection_apply(&section, &Derivation::partial(&r, j))
                .unwrap()
                .iter()
                .all(Poly::is_zero)
        });
        let descent = cartier_descend_section(&section);
        prop_assert_eq!(flat, descent.is_descended());
        if pulled_back {
            prop_assert!(flat);
        }
    }

    #[test]
    fn pullback_and_descent_are_inverse(p in prop::sample::select(vec![3u64, 5]), seed: u64) {
        let r = PolyRing::with_rees(p, &["x", "y"], "t").unwrap();
        let g = random_poly(&mut rng(seed), &r, 3, 4);
        let f = g.frobenius_pullback().unwrap();
        match f.pth_root_descend() {
            Descent::Descended(back) => prop_assert_eq!(back, g),
            Descent::NotDescendable(w) => prop_assert!(false, "{}", w.witness()),
        }
    }

    #[test]
    fn display_round_trips(p in prop::sample::select(vec![2u64, 3, 5, 7]), seed: u64) {
        let r = PolyRing::with_rees(p, &["x", "y"], "t").unwrap();
        let f = random_poly(&mut rng(seed), &r, 4, 5);
        prop_assert_eq!(parse_poly(&f.to_string(), &r).unwrap(), f);
    }
}
