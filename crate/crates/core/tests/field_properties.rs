use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use stepwave::characters::CharacterGroup;
use stepwave::galois_field::GaloisField;
use stepwave::local_field::{LaurentElement, LocalField};

fn field_params() -> impl Strategy<Value = (u32, usize)> {
    prop_oneof![Just((2, 1)), Just((3, 1)), Just((5, 1)), Just((2, 2)), Just((2, 3)), Just((3, 2))]
}

fn gf(p: u32, s: usize) -> Arc<GaloisField> {
    Arc::new(GaloisField::with_default_poly(p, s).unwrap())
}

/// A Laurent element as (start, digit indices); indices are reduced mod q.
fn raw_element() -> impl Strategy<Value = (i32, Vec<usize>)> {
    (-4i32..4, prop::collection::vec(0usize..1000, 0..6))
}

fn element(lf: &LocalField, raw: &(i32, Vec<usize>)) -> LaurentElement {
    let q = lf.gf().order();
    let digits: Vec<usize> = raw.1.iter().map(|d| d % q).collect();
    lf.from_indices(raw.0, &digits).unwrap()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-12
}

proptest! {
    #[test]
    fn scalar_product_is_symmetric_and_biadditive((p, s) in field_params(), a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let f = gf(p, s);
        let q = f.order();
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.dot_idx(a, b), f.dot_idx(b, a));
        prop_assert_eq!(f.dot_idx(f.add_idx(a, b), c), (f.dot_idx(a, c) + f.dot_idx(b, c)) % p);
    }

    #[test]
    fn index_and_digits_are_inverse((p, s) in field_params(), i in 0usize..1000) {
        let f = gf(p, s);
        let e = f.from_index(i % f.order()).unwrap();
        prop_assert_eq!(f.from_digits(&e.digits()).unwrap(), e);
        prop_assert_eq!(f.parse_element(&e.to_text()).unwrap(), e);
    }

    #[test]
    fn laurent_multiplication_is_a_ring_law((p, s) in field_params(), x in raw_element(), y in raw_element(), z in raw_element()) {
        let lf = LocalField::new(gf(p, s));
        let (x, y, z) = (element(&lf, &x), element(&lf, &y), element(&lf, &z));
        let xy = lf.mul(&x, &y).unwrap();
        prop_assert_eq!(&xy, &lf.mul(&y, &x).unwrap());
        prop_assert_eq!(lf.mul(&xy, &z).unwrap(), lf.mul(&x, &lf.mul(&y, &z).unwrap()).unwrap());
        let lhs = lf.mul(&x, &lf.add(&y, &z)).unwrap();
        prop_assert_eq!(lhs, lf.add(&xy, &lf.mul(&x, &z).unwrap()));
    }

    #[test]
    fn norm_is_multiplicative_and_ultrametric((p, s) in field_params(), x in raw_element(), y in raw_element()) {
        let lf = LocalField::new(gf(p, s));
        let (x, y) = (element(&lf, &x), element(&lf, &y));
        let product = lf.norm(&lf.mul(&x, &y).unwrap());
        prop_assert!((product - lf.norm(&x) * lf.norm(&y)).abs() <= 1e-12 * product.max(1.0));
        prop_assert!(lf.norm(&lf.add(&x, &y)) <= lf.norm(&x).max(lf.norm(&y)) * (1.0 + 1e-12));
    }

    #[test]
    fn dilation_scales_the_norm_and_is_additive((p, s) in field_params(), x in raw_element(), y in raw_element()) {
        let f = gf(p, s);
        let q = f.order() as f64;
        let lf = LocalField::new(f);
        let (x, y) = (element(&lf, &x), element(&lf, &y));
        prop_assert!((lf.norm(&lf.dilate(&x)) - q * lf.norm(&x)).abs() <= 1e-9 * lf.norm(&x).max(1.0));
        prop_assert_eq!(lf.dilate(&lf.add(&x, &y)), lf.add(&lf.dilate(&x), &lf.dilate(&y)));
        prop_assert_eq!(lf.dilate_inv(&lf.dilate(&x)), x);
    }

    #[test]
    fn characters_are_homomorphisms((p, s) in field_params(), e1 in prop::collection::vec(0usize..1000, 7), e2 in prop::collection::vec(0usize..1000, 7), x in raw_element(), y in raw_element()) {
        let f = gf(p, s);
        let q = f.order();
        let lf = LocalField::new(f.clone());
        let chars = CharacterGroup::new(f.clone());
        let make = |e: &[usize]| chars.from_exponents(e.iter().enumerate().map(|(i, v)| (i as i32 - 3, f.from_index(v % q).unwrap()))).unwrap();
        let (c1, c2) = (make(&e1), make(&e2));
        let (x, y) = (element(&lf, &x), element(&lf, &y));
        prop_assert!(close(chars.eval(&chars.mul(&c1, &c2), &x), chars.eval(&c1, &x) * chars.eval(&c2, &x)));
        prop_assert!(close(chars.eval(&c1, &lf.add(&x, &y)), chars.eval(&c1, &x) * chars.eval(&c1, &y)));
        prop_assert!(close(chars.eval(&chars.dilate(&c1), &x), chars.eval(&c1, &lf.dilate(&x))));
        prop_assert!(close(chars.eval(&chars.dilate_inv(&chars.dilate(&c1)), &x), chars.eval(&c1, &x)));
        prop_assert!(chars.mul(&c1, &chars.inverse(&c1)).is_neutral());
    }

    #[test]
    fn annihilator_is_trivial_on_the_ball((p, s) in field_params(), e in prop::collection::vec(0usize..1000, 4), n in -2i32..3, x in raw_element()) {
        let f = gf(p, s);
        let q = f.order();
        let lf = LocalField::new(f.clone());
        let chars = CharacterGroup::new(f.clone());
        // exponents at levels n-4 .. n-1 only
        let chi = chars.from_exponents(e.iter().enumerate().map(|(i, v)| (n - 4 + i as i32, f.from_index(v % q).unwrap()))).unwrap();
        prop_assert!(chi.annihilates(n));
        let mut x = element(&lf, &x);
        while !x.is_zero() && x.start() < n {
            x = lf.dilate_inv(&x);
        }
        prop_assert!(close(chars.eval(&chi, &x), Complex64::new(1.0, 0.0)));
    }
}

#[test]
fn rademacher_powers_follow_the_exponent_group() {
    for (p, s) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
        let f = gf(p, s);
        let chars = CharacterGroup::new(f.clone());
        let lf = LocalField::new(f.clone());
        for u in f.elements() {
            for v in f.elements() {
                let r = chars.mul(&chars.rademacher(1, u).unwrap(), &chars.rademacher(1, v).unwrap());
                assert_eq!(r, chars.rademacher(1, f.add(u, v).unwrap()).unwrap());
            }
            // a p-th power of any Rademacher function is trivial
            let x = lf.from_indices(1, &[u.index()]).unwrap();
            let z = chars.rademacher_eval(1, u, &x).unwrap();
            assert!((z.powu(p) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn shift_sets_are_complete_residue_systems() {
    let lf = LocalField::new(gf(3, 1));
    for depth in 1..4 {
        let shifts = lf.enumerate_shifts(depth).unwrap();
        assert_eq!(shifts.len(), 3usize.pow(depth as u32));
        let mut seen = std::collections::HashSet::new();
        for h in &shifts.elements {
            assert!(h.in_ball(-(depth as i32)));
            assert!(h.is_zero() || h.end() <= 0);
            assert!(seen.insert(h.clone()));
        }
    }
}
