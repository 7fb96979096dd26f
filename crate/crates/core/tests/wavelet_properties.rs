use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use stepwave::galois_field::GaloisField;
use stepwave::local_field::LocalField;
use stepwave::mra_masks::{
    check_scaling_orthonormality, coefficients_from_mask, random_admissible_mask, synthesize_refinable, RowStyle,
};
use stepwave::step_functions::{DualStepFunction, StepFunction};
use stepwave::wavelet_builder::{
    derive_wavelet_masks, seed_matrix, synthesize_wavelets, unitarity_deviation, unitarize, verify_wavelet_system,
    CompletionMatrix,
};
use stepwave::window::Window;
use stepwave::{Error, Mask};

fn gf(p: u32, s: usize) -> Arc<GaloisField> {
    Arc::new(GaloisField::with_default_poly(p, s).unwrap())
}

fn params() -> impl Strategy<Value = (u32, usize, usize)> {
    prop_oneof![Just((2, 1, 1)), Just((2, 1, 2)), Just((3, 1, 1)), Just((2, 2, 1))]
}

fn complex_vec(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// phi(x) = sum_h beta_h phi(Ax - h), checked on every cell, for masks
    /// whose phi_hat really is supported in F_M^⊥ (a truncated phi_hat is
    /// not refinable).
    #[test]
    fn refinement_equation_holds_pointwise((p, s, n) in params(), seed in any::<u64>(), sparse in any::<bool>()) {
        let field = gf(p, s);
        let lf = LocalField::new(field.clone());
        let style = if sparse { RowStyle::Sparse } else { RowStyle::Dense };
        let m0 = random_admissible_mask(field.clone(), n, style, &mut StdRng::seed_from_u64(seed));
        let m_level = n + 1;
        let wide = synthesize_refinable(&m0, m_level + n + 1).unwrap();
        let q = field.order();
        let ww = wide.window();
        let above = m_level + n;
        let leak = wide
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| ww.decode(*i, q)[above..].iter().any(|&d| d != 0))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        prop_assume!(leak == 0.0);
        let phi = synthesize_refinable(&m0, m_level).unwrap().inv_fourier();
        let beta = coefficients_from_mask(&m0).unwrap();
        let shifts = lf.enumerate_shifts(n + 1).unwrap();
        // sample one level wider than phi's support on both sides
        let w = Window::new(-(n as i32) - 1, m_level as i32 + 1).unwrap();
        for idx in 0..w.size(q) {
            let x = lf.from_indices(w.lo, &w.decode(idx, q)).unwrap();
            let ax = lf.dilate(&x);
            let rhs: Complex64 = shifts.elements.iter().zip(beta.values()).map(|(h, b)| b * phi.value_at(&lf.sub(&ax, h))).sum();
            prop_assert!((phi.value_at(&x) - rhs).norm() < 1e-10, "at {}: {} vs {}", x.to_text(), phi.value_at(&x), rhs);
        }
    }

    #[test]
    fn fourier_is_unitary_and_invertible((p, s) in prop_oneof![Just((2u32, 1usize)), Just((3, 1)), Just((2, 2))], lo in -3i32..1, len in 1i32..4, seed in any::<u64>()) {
        let field = gf(p, s);
        let w = Window::new(lo, lo + len).unwrap();
        let f = StepFunction::new(field.clone(), w, complex_vec(w.size(field.order()), seed)).unwrap();
        let g = StepFunction::new(field.clone(), w, complex_vec(w.size(field.order()), seed ^ 1)).unwrap();
        let (fh, gh) = (f.fourier(), g.fourier());
        prop_assert!((f.inner_product(&g).unwrap() - fh.inner_product(&gh).unwrap()).norm() < 1e-12);
        prop_assert!(fh.inv_fourier().max_abs_diff(&f).unwrap() < 1e-12);
        let wide = Window::new(lo - 1, lo + len + 1).unwrap();
        prop_assert!(f.widen(wide).unwrap().fourier().max_abs_diff(&fh.widen(wide).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn shifts_are_unitary((p, s) in prop_oneof![Just((2u32, 1usize)), Just((3, 1)), Just((2, 2))], seed in any::<u64>(), h in prop::collection::vec(0usize..100, 1..4)) {
        let field = gf(p, s);
        let lf = LocalField::new(field.clone());
        let w = Window::new(-3, 1).unwrap();
        let f = StepFunction::new(field.clone(), w, complex_vec(w.size(field.order()), seed)).unwrap();
        let digits: Vec<usize> = h.iter().map(|d| d % field.order()).collect();
        let h = lf.from_indices(-3, &digits).unwrap();
        let moved = f.shift(&h).unwrap();
        prop_assert!((moved.norm_sq() - f.norm_sq()).abs() < 1e-12);
        prop_assert!(moved.shift(&lf.neg(&h)).unwrap().max_abs_diff(&f).unwrap() < 1e-15);
    }

    #[test]
    fn gram_schmidt_output_is_unitary_with_row_zero_untouched(q in prop_oneof![Just(2usize), Just(3), Just(4), Just(5), Just(9)], seed in any::<u64>(), zero_head in any::<bool>()) {
        let mut entries = complex_vec(q * q, seed);
        if zero_head {
            entries[0] = Complex64::new(0.0, 0.0);
        }
        let norm = entries[..q].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        entries[..q].iter_mut().for_each(|v| *v /= norm);
        let matrix = CompletionMatrix { prefix: 0, prefix_text: "0".into(), dim: q, entries };
        let out = unitarize(&matrix).unwrap();
        prop_assert_eq!(out.row(0), matrix.row(0));
        prop_assert!(unitarity_deviation(&out.entries, q) <= 1e-12);
    }

    #[test]
    fn mask_text_round_trips((p, s, n) in params(), seed in any::<u64>()) {
        let field = gf(p, s);
        let len = field.order().pow(n as u32 + 1);
        let mask = Mask::new(field.clone(), n, complex_vec(len, seed)).unwrap();
        prop_assert_eq!(&Mask::parse(&mask.to_text(), None).unwrap(), &mask);
        let f = DualStepFunction::new(field.clone(), mask.window(), mask.values().to_vec()).unwrap();
        prop_assert_eq!(DualStepFunction::parse_csv(field, &f.to_csv()).unwrap(), f);
    }
}

#[test]
fn seeded_rows_are_independent_in_both_branches() {
    let field = gf(3, 1);
    let mut rng = StdRng::seed_from_u64(3);
    for style in [RowStyle::Dense, RowStyle::Sparse] {
        for _ in 0..40 {
            let m0 = random_admissible_mask(field.clone(), 1, style, &mut rng);
            for prefix in 0..m0.prefix_count() {
                let seeded = seed_matrix(&m0, prefix).unwrap();
                assert!(unitarize(&seeded).is_ok(), "prefix {prefix}");
            }
        }
    }
}

#[test]
fn derived_masks_make_admissible_scaling_masks_orthonormal() {
    // sufficiency of the family criterion on random admissible masks
    let mut checked = 0;
    for (p, s, n) in [(2, 1, 1), (2, 1, 2), (3, 1, 1), (2, 2, 1)] {
        let field = gf(p, s);
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..20 {
            let m0 = random_admissible_mask(field.clone(), n, RowStyle::Sparse, &mut rng);
            let phi_hat = synthesize_refinable(&m0, n + 1).unwrap();
            if !check_scaling_orthonormality(&phi_hat).unwrap().passed(1e-10) {
                continue;
            }
            let ws = synthesize_wavelets(&derive_wavelet_masks(&m0).unwrap(), &phi_hat).unwrap();
            let r = verify_wavelet_system(&ws, n + 2).unwrap();
            assert!(r.passed(1e-10), "({p},{s},{n}): {r:?}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn dense_mask_row_that_vanishes_at_origin_uses_the_fallback() {
    let field = gf(2, 1);
    let mut m0 = Mask::haar(field, 1);
    m0.row_mut(1)[0] = Complex64::new(0.0, 0.0);
    m0.row_mut(1)[1] = Complex64::new(0.0, 1.0);
    let masks = derive_wavelet_masks(&m0).unwrap();
    // the row (0, i) completes to a unit vector supported at a_0 = 0
    assert!((masks[1].row(1)[0].norm() - 1.0).abs() < 1e-15);
    assert_eq!(masks[1].row(1)[1], Complex64::new(0.0, 0.0));
}

#[test]
fn non_unit_first_row_is_rejected() {
    let matrix = CompletionMatrix {
        prefix: 0,
        prefix_text: "0".into(),
        dim: 2,
        entries: vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ],
    };
    assert!(matches!(unitarize(&matrix), Err(Error::Precondition(_))));
}
