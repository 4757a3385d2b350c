use lfharm::bank::random_real_function;
use lfharm::shift_invariant::*;
use lfharm::tiling::*;
use lfharm::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn char_p_fields() -> Vec<LocalField> {
    vec![
        LocalField::laurent(2, 1).unwrap(),
        LocalField::laurent(3, 1).unwrap(),
        LocalField::laurent(2, 2).unwrap(),
    ]
}

fn cell_spec(field: &LocalField, w: Window, cells: &[usize], translations: Vec<LocalElement>) -> TilingSpec {
    let omega = cells
        .iter()
        .map(|&c| Ball::new(field.q(), w.low, w.high, c).unwrap())
        .collect();
    TilingSpec::new(field, w, omega, translations, vec![]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn periodization_preserves_mass(fi in 0usize..3, m in 0u32..3, k in 0u32..3, seed in any::<u64>()) {
        let f = &char_p_fields()[fi];
        let w = Window::new(-(m as i32), k as i32).unwrap();
        let g = random_real_function(f, w.len(), seed).unwrap();
        let phi = SampledFunction::on_window(f, w, g.into_values()).unwrap();
        let spec = PhiSpec::new(phi, None).unwrap();
        let per = periodize(&spec).unwrap();
        prop_assert!((per.w.integral().re - spec.window_mass()).abs() < 1e-10 * spec.window_mass().max(1.0));
    }

    #[test]
    fn periodization_ignores_integer_shifts(fi in 0usize..3, n in 0u64..9, seed in any::<u64>()) {
        let f = &char_p_fields()[fi];
        let w = Window::new(-2, 2).unwrap();
        let g = random_real_function(f, w.len(), seed).unwrap();
        let phi = SampledFunction::on_window(f, w, g.into_values()).unwrap();
        let q = f.q() as u64;
        let shifted = phi.translate(&u_of(f, n % (q * q))).unwrap();
        let a = periodize(&PhiSpec::new(phi, None).unwrap()).unwrap();
        let b = periodize(&PhiSpec::new(shifted, None).unwrap()).unwrap();
        for (x, y) in a.w.values().iter().zip(b.w.values()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn analysis_synthesis_is_isometric(fi in 0usize..3, seed in any::<u64>(), coeffs in prop::collection::vec(-4.0f64..4.0, 8)) {
        let f = &char_p_fields()[fi];
        let w = Window::new(-1, 2).unwrap();
        let g = random_real_function(f, w.len(), seed).unwrap();
        let phi = SampledFunction::on_window(f, w, g.into_values()).unwrap();
        let spec = PhiSpec::new(phi.clone(), None).unwrap();
        let wphi = periodize(&spec).unwrap().w;
        let n = coeffs.len().min(f.cells(2).unwrap());
        let poly = |x: &LocalElement| -> Complex64 {
            (0..n).map(|m| coeffs[m] * x.chi_n(m as u64).unwrap()).sum()
        };
        let on_window: f64 = phi
            .values()
            .iter()
            .enumerate()
            .map(|(c, v)| (poly(&LocalElement::from_cell(f, w, c)) * v).norm_sqr())
            .sum::<f64>()
            * phi.cell_measure();
        let on_d: f64 = wphi
            .values()
            .iter()
            .enumerate()
            .map(|(c, v)| poly(&LocalElement::from_cell(f, Window::on_d(2), c)).norm_sqr() * v.re)
            .sum::<f64>()
            * wphi.cell_measure();
        prop_assert!((on_window - on_d).abs() <= 1e-10 * on_d.max(1.0));
    }

    #[test]
    fn dual_system_is_biorthogonal(fi in 0usize..3, k in 1u32..4, seed in any::<u64>()) {
        let f = &char_p_fields()[fi];
        let g = random_real_function(f, k, seed).unwrap();
        let w = g.map(|v| Complex64::new(0.2 + v.re.abs(), 0.0));
        let n = f.cells(k).unwrap();
        prop_assert!(biorthogonality_check(&w, n, k).unwrap() < 1e-10);
    }

    #[test]
    fn any_section_of_d_tiles(fi in 0usize..3, m in 1u32..3, k in 1u32..3, picks in prop::collection::vec(0usize..81, 81)) {
        let f = &char_p_fields()[fi];
        let q = f.q() as usize;
        let w = Window::new(-(m as i32), k as i32).unwrap();
        // A cell index is low + q^m * high; integer translates only move the low part.
        let span = q.pow(m);
        let cells: Vec<usize> = (0..q.pow(k)).map(|high| picks[high] % span + span * high).collect();
        let t = (0..span as u64).map(|n| u_of(f, n)).collect();
        let spec = cell_spec(f, w, &cells, t);
        prop_assert!(tiling_check(&spec, k).unwrap().tiles);
    }

    #[test]
    fn tiling_survives_translation(fi in 0usize..3, m in 1u32..3, k in 1u32..3, h in 0usize..243, drop in 0usize..81) {
        let f = &char_p_fields()[fi];
        let q = f.q() as usize;
        let w = Window::new(-(m as i32), k as i32).unwrap();
        let span = q.pow(m);
        let size = f.cells(w.len()).unwrap();
        let h = h % size;
        let t: Vec<LocalElement> = (0..span as u64).map(|n| u_of(f, n)).collect();
        let base: Vec<usize> = (0..q.pow(k)).map(|high| span * high).collect();
        let moved: Vec<usize> = base.iter().map(|&c| f.cell_add(w, c, h)).collect();
        prop_assert!(tiling_check(&cell_spec(f, w, &moved, t.clone()), k).unwrap().tiles);
        // removing a cell always leaves a hole
        let mut short = moved.clone();
        short.remove(drop % short.len());
        if !short.is_empty() {
            let r = tiling_check(&cell_spec(f, w, &short, t), k).unwrap();
            prop_assert!(!r.tiles);
            prop_assert_eq!(r.histogram.get(&0).copied(), Some(span));
        }
    }
}

#[test]
fn standard_configuration_is_spectral() {
    for f in char_p_fields().into_iter().chain([LocalField::q_p(2).unwrap(), LocalField::q_p(3).unwrap()]) {
        for (m, k) in [(1, 1), (1, 2), (2, 2)] {
            let s = TilingSpec::standard(&f, m, k).unwrap();
            assert!(tiling_check(&s, k).unwrap().tiles, "{f} m={m} k={k}");
            let c = spectral_certify(&s, k, 6, 3).unwrap();
            assert!(c.certified, "{f} m={m} k={k} {c:?}");
            assert_eq!(c.dimension, c.spectrum_size);
        }
    }
}

#[test]
fn short_spectrum_is_not_certified() {
    let f = LocalField::laurent(3, 1).unwrap();
    let mut s = TilingSpec::standard(&f, 1, 2).unwrap();
    s.spectrum.pop();
    let c = spectral_certify(&s, 2, 4, 1).unwrap();
    assert!(c.gram < 1e-12);
    assert!(!c.certified);
    assert!(c.parseval > 1e-9);
}

#[test]
fn periodization_is_unsupported_in_characteristic_zero() {
    let f = LocalField::q_p(2).unwrap();
    let spec = PhiSpec::indicator_of_d(&f, 3).unwrap();
    assert!(matches!(periodize(&spec), Err(Error::Unsupported(_))));
}

#[test]
fn missing_tail_requests_a_wider_window() {
    let f = LocalField::laurent(2, 1).unwrap();
    let spec = PhiSpec::new(SampledFunction::constant(&f, 2, Complex64::new(1.0, 0.0)).unwrap(), Some(1.5)).unwrap();
    match periodize(&spec) {
        Err(Error::Window { suggested_m, .. }) => assert_eq!(suggested_m, 1),
        other => panic!("expected a window error, got {other:?}"),
    }
}
