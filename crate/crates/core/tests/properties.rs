use larmour_core::base_fields::{
    is_isotropic_quad_finite, witt_class_quad, QuadFormRes, ResidueField,
};
use larmour_core::hermitian::{larmour_decompose, scale_entry_by, HermitianForm};
use larmour_core::involutions::{CaseLabel, Involution};
use larmour_core::quad_forms::{springer_boundary, QuadFormK};
use larmour_core::quaternion::{normalize_presentation, QuatElem};
use larmour_core::residue_maps::boundary;
use larmour_core::sample::{
    fixture, random_form, random_integral, random_nonzero, random_quat, random_res,
    random_unit_quat,
};
use larmour_core::valued_field::ValuedField;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 3] = [3, 5, 7];
const RAMIFIED: [CaseLabel; 6] = [
    CaseLabel::B11,
    CaseLabel::B12,
    CaseLabel::B211,
    CaseLabel::B212,
    CaseLabel::B221,
    CaseLabel::B222,
];

fn setup(seed: u64) -> (ChaCha8Rng, ValuedField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = PRIMES[rng.gen_range(0..3)];
    (rng, ValuedField::prime(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laurent_field_laws(seed in any::<u64>()) {
        let (mut rng, k) = setup(seed);
        let a = random_nonzero(&mut rng, &k, -3, 3);
        let b = random_nonzero(&mut rng, &k, -3, 3);
        let c = random_nonzero(&mut rng, &k, -3, 3);
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert!(a.mul(&b).unwrap().approx_eq(&b.mul(&a).unwrap()));
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs));
        let one = a.mul(&a.inv().unwrap()).unwrap();
        prop_assert!(one.approx_eq(&k.one()));
    }

    #[test]
    fn valuation_is_multiplicative(seed in any::<u64>()) {
        let (mut rng, k) = setup(seed);
        let a = random_nonzero(&mut rng, &k, -4, 4);
        let b = random_nonzero(&mut rng, &k, -4, 4);
        prop_assert_eq!(a.mul(&b).unwrap().valuation().unwrap(), a.valuation().unwrap() + b.valuation().unwrap());
        let s = a.add(&b).unwrap();
        if !s.is_zero_within_precision() {
            prop_assert!(s.valuation().unwrap() >= a.valuation().unwrap().min(b.valuation().unwrap()));
        }
    }

    #[test]
    fn residue_is_a_ring_homomorphism(seed in any::<u64>()) {
        let (mut rng, k) = setup(seed);
        let a = random_integral(&mut rng, &k);
        let b = random_integral(&mut rng, &k);
        let (ra, rb) = (a.residue().unwrap(), b.residue().unwrap());
        prop_assert_eq!(a.add(&b).unwrap().residue().unwrap(), ra.add(&rb).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().residue().unwrap(), ra.mul(&rb).unwrap());
    }

    #[test]
    fn hensel_sqrt_squares_back(seed in any::<u64>()) {
        let (mut rng, k) = setup(seed);
        let a = random_nonzero(&mut rng, &k, -3, 3);
        let sq = a.mul(&a).unwrap();
        prop_assert!(sq.is_square().unwrap());
        let r = sq.hensel_sqrt().unwrap();
        prop_assert!(r.mul(&r).unwrap().approx_eq(&sq));
        prop_assert_eq!(sq.square_class().unwrap(), k.one().square_class().unwrap());
    }

    #[test]
    fn nrd_is_multiplicative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (alg, _, _, _) = fixture(RAMIFIED[rng.gen_range(0..6)], PRIMES[rng.gen_range(0..3)]).unwrap();
        let u = random_quat(&mut rng, &alg, -2, 2);
        let v = random_quat(&mut rng, &alg, -2, 2);
        let lhs = alg.nrd(&alg.mul(&u, &v).unwrap()).unwrap();
        let rhs = alg.nrd(&u).unwrap().mul(&alg.nrd(&v).unwrap()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs));
        prop_assert!(alg.tau(&alg.mul(&u, &v).unwrap()).approx_eq(&alg.mul(&alg.tau(&v), &alg.tau(&u)).unwrap()));
    }

    #[test]
    fn coordinate_valuation_criterion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (alg, _, _, _) = fixture(RAMIFIED[0], PRIMES[rng.gen_range(0..3)]).unwrap();
        let u = random_quat(&mut rng, &alg, -3, 3);
        prop_assert_eq!(Some(alg.valuation_d(&u).unwrap().0), alg.val_lower_bound_d(&u));
        let v = random_quat(&mut rng, &alg, -3, 3);
        let uv = alg.mul(&u, &v).unwrap();
        prop_assert_eq!(alg.valuation_d(&uv).unwrap().0, alg.valuation_d(&u).unwrap().0 + alg.valuation_d(&v).unwrap().0);
    }

    #[test]
    fn involutions_are_involutive_anti_automorphisms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (alg, sigma, _, _) = fixture(RAMIFIED[rng.gen_range(0..6)], PRIMES[rng.gen_range(0..3)]).unwrap();
        let u = random_quat(&mut rng, &alg, -2, 2);
        let v = random_quat(&mut rng, &alg, -2, 2);
        let su = sigma.apply(&alg, &u).unwrap();
        prop_assert_eq!(sigma.apply(&alg, &su).unwrap(), u.clone());
        prop_assert_eq!(alg.valuation_d(&su).unwrap(), alg.valuation_d(&u).unwrap());
        let lhs = sigma.apply(&alg, &alg.mul(&u, &v).unwrap()).unwrap();
        let rhs = alg.mul(&sigma.apply(&alg, &v).unwrap(), &su).unwrap();
        prop_assert!(lhs.approx_eq(&rhs));
        if let Involution::Twisted(z) = &sigma {
            let general = alg.product(&[z, &alg.tau(&u), &alg.inv(z).unwrap()]).unwrap();
            prop_assert!(general.approx_eq(&su));
        }
    }

    #[test]
    fn scaling_shifts_value(seed in any::<u64>(), steps in -2i64..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (alg, sigma, eps, rec) = fixture(RAMIFIED[rng.gen_range(0..6)], PRIMES[rng.gen_range(0..3)]).unwrap();
        let h = random_form(&mut rng, &alg, &sigma, eps, 1);
        let u = &h.entries[0];
        let (out, w) = scale_entry_by(&alg, &sigma, &rec, u, steps).unwrap();
        prop_assert_eq!(alg.valuation_d(&out).unwrap().0, alg.valuation_d(u).unwrap().0 + 2 * steps);
        prop_assert!(w.verify(&alg, &sigma).unwrap());
    }

    #[test]
    fn presentation_isos_round_trip(seed in any::<u64>()) {
        let (mut rng, k) = setup(seed);
        let s = random_nonzero(&mut rng, &k, -1, 1);
        let r = random_nonzero(&mut rng, &k, -1, 1);
        let u = k.constant(k.residue().nonsquare().unwrap());
        let a = u.mul(&s.mul(&s).unwrap()).unwrap();
        let b = k.t().mul(&r.mul(&r).unwrap()).unwrap();
        let iso = normalize_presentation(&a, &b, false).unwrap();
        prop_assert!(iso.verify().unwrap());
        let x = random_quat(&mut rng, &iso.source, -2, 2);
        let y = random_quat(&mut rng, &iso.source, -2, 2);
        let back = iso.to_source(&iso.to_target(&x).unwrap()).unwrap();
        prop_assert!(back.approx_eq(&x));
        let lhs = iso.to_target(&iso.source.mul(&x, &y).unwrap()).unwrap();
        let rhs = iso.target.mul(&iso.to_target(&x).unwrap(), &iso.to_target(&y).unwrap()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs));
    }

    #[test]
    fn witt_classes_add(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = ResidueField::prime(PRIMES[rng.gen_range(0..3)]).unwrap();
        let form = |rng: &mut ChaCha8Rng| {
            let d = rng.gen_range(0..=4);
            let entries = (0..d).map(|_| loop {
                let e = random_res(rng, f);
                if !e.is_zero() { break e; }
            }).collect();
            QuadFormRes::new(f, entries).unwrap()
        };
        let q = form(&mut rng);
        let r = form(&mut rng);
        let sum = witt_class_quad(&q.perp(&r).unwrap()).unwrap();
        prop_assert_eq!(sum, witt_class_quad(&q).unwrap().add(&witt_class_quad(&r).unwrap()).unwrap());
        prop_assert!(witt_class_quad(&q.perp(&q.neg()).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn isotropy_matches_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PRIMES[rng.gen_range(0..3)];
        let f = ResidueField::prime(p).unwrap();
        let d = rng.gen_range(1..=3);
        let entries: Vec<_> = (0..d).map(|_| f.from_int(rng.gen_range(1..p) as i64)).collect();
        let q = QuadFormRes::new(f, entries.clone()).unwrap();
        let mut found = false;
        for code in 1..p.pow(d as u32) {
            let v: Vec<_> = (0..d).map(|i| f.from_int((code / p.pow(i as u32) % p) as i64)).collect();
            if q.eval(&v).unwrap().is_zero() {
                found = true;
                break;
            }
        }
        prop_assert_eq!(is_isotropic_quad_finite(&q).unwrap(), found);
    }

    #[test]
    fn springer_boundary_is_additive(seed in any::<u64>()) {
        let (mut rng, k) = setup(seed);
        let form = |rng: &mut ChaCha8Rng| {
            let d = rng.gen_range(1..=3);
            QuadFormK::new(k, (0..d).map(|_| random_nonzero(rng, &k, -3, 3)).collect()).unwrap()
        };
        let q = form(&mut rng);
        let r = form(&mut rng);
        let (a0, a1) = springer_boundary(&q).unwrap();
        let (b0, b1) = springer_boundary(&r).unwrap();
        let (s0, s1) = springer_boundary(&q.perp(&r).unwrap()).unwrap();
        prop_assert_eq!(s0, a0.add(&b0).unwrap());
        prop_assert_eq!(s1, a1.add(&b1).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_respects_conjugation_and_sums(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (alg, sigma, eps, _) = fixture(RAMIFIED[rng.gen_range(0..6)], [3, 5][rng.gen_range(0..2)]).unwrap();
        let h = random_form(&mut rng, &alg, &sigma, eps, 2);
        let g = random_form(&mut rng, &alg, &sigma, eps, 1);
        let conj: Vec<QuatElem> = h.entries.iter().map(|u| {
            let t = random_unit_quat(&mut rng, &alg);
            alg.product(&[&sigma.apply(&alg, &t).unwrap(), u, &t]).unwrap()
        }).collect();
        let hc = HermitianForm::new(alg.clone(), sigma.clone(), eps, conj).unwrap();
        prop_assert_eq!(boundary(&h).unwrap(), boundary(&hc).unwrap());
        let sum = boundary(&h.perp(&g).unwrap()).unwrap();
        prop_assert_eq!(sum, boundary(&h).unwrap().add(&boundary(&g).unwrap()).unwrap());
    }

    #[test]
    fn decomposition_witnesses_verify(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let label = CaseLabel::ALL[rng.gen_range(0..10)];
        let (alg, sigma, eps, _) = fixture(label, PRIMES[rng.gen_range(0..3)]).unwrap();
        let h = random_form(&mut rng, &alg, &sigma, eps, 3);
        let split = larmour_decompose(&h).unwrap();
        prop_assert_eq!(split.h0.dim() + split.h1.dim(), 3);
        for e in &split.entries {
            prop_assert!(e.witness.verify(&alg, &sigma).unwrap());
        }
    }
}
