use locext_numlab::{
    eig_hermitian, gauss_newton_birank, numeric_extension_dimension, partial_transpose_a, partial_transpose_b,
    random_hermitian, unextendibility_survey, CMatrix, ExtensionOptions, GnOptions, SurveyCase, SurveyOptions, C64,
};
use proptest::prelude::*;

fn case(m: usize, n: usize, p: usize, q: usize) -> SurveyCase {
    SurveyCase { dims: (m, n), birank: (p, q) }
}

/// Elementary symmetric functions of the eigenvalues of an integer 3×3
/// symmetric matrix, from its entries in exact arithmetic.
fn char_poly_invariants(a: &[[i64; 3]; 3]) -> (i64, i64, i64) {
    let tr = a[0][0] + a[1][1] + a[2][2];
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    (tr, minors, det)
}

proptest! {
    #[test]
    fn eigenvalues_match_characteristic_polynomial(e in prop::array::uniform6(-9i64..=9)) {
        let a = [[e[0], e[1], e[2]], [e[1], e[3], e[4]], [e[2], e[4], e[5]]];
        let m = CMatrix::from_fn(3, 3, |i, j| C64::new(a[i][j] as f64, 0.0));
        let ev = eig_hermitian(&m, 1e-14).unwrap().values;
        let (tr, minors, det) = char_poly_invariants(&a);
        let scale = 30.0f64;
        prop_assert!((ev.sum() - tr as f64).abs() <= 1e-9 * scale);
        let e2 = ev[0] * ev[1] + ev[0] * ev[2] + ev[1] * ev[2];
        prop_assert!((e2 - minors as f64).abs() <= 1e-9 * scale * scale);
        prop_assert!((ev.product() - det as f64).abs() <= 1e-9 * scale.powi(3));
    }

    #[test]
    fn partial_transposes_are_involutions(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let x = random_hermitian(m * n, seed);
        prop_assert_eq!(partial_transpose_b(&partial_transpose_b(&x, m, n), m, n), x.clone());
        let both = partial_transpose_a(&partial_transpose_b(&x, m, n), m, n);
        prop_assert_eq!(both, x.transpose());
    }

    #[test]
    fn partial_transpose_keeps_spectrum_of_products(seed in any::<u64>()) {
        // a product state stays a product state under T_B
        let a = random_hermitian(2, seed);
        let b = random_hermitian(3, seed.wrapping_add(1));
        let x = a.kronecker(&b);
        let t = partial_transpose_b(&x, 2, 3);
        let ex = eig_hermitian(&x, 1e-14).unwrap().values;
        let et = eig_hermitian(&t, 1e-14).unwrap().values;
        prop_assert!((ex - et).amax() <= 1e-10 * x.norm());
    }
}

#[test]
fn three_by_three_rank_four_is_unextendible() {
    let opts = SurveyOptions { samples: 20, seed: 17, ..Default::default() };
    let r = unextendibility_survey(case(3, 3, 4, 4), &opts).unwrap();
    assert_eq!(r.converged, 20);
    assert_eq!(r.histogram.get(&3), Some(&20), "{r:?}");
}

#[test]
fn three_by_three_rank_five_six_has_room() {
    let opts = SurveyOptions { samples: 10, seed: 5, ..Default::default() };
    let r = unextendibility_survey(case(3, 3, 5, 6), &opts).unwrap();
    assert!(r.converged >= 9);
    assert!(r.histogram.keys().all(|&d| d >= 6), "{r:?}");
}

#[test]
fn two_by_four_converges() {
    let opts = SurveyOptions { samples: 100, seed: 0, ..Default::default() };
    let r = unextendibility_survey(case(2, 4, 7, 8), &opts).unwrap();
    assert!(r.converged >= 90, "{r:?}");
    assert!(r.mean_iterations.unwrap() <= 200.0);
}

#[test]
fn rounded_samples_stay_ppt() {
    let mut ppt = 0;
    let total = 10;
    for seed in 0..total {
        let s = gauss_newton_birank(3, 3, 4, 4, seed, &GnOptions::default()).unwrap();
        let exact = s.to_exact(40, (1, 1 << 24)).unwrap();
        if exact.is_ppt() {
            ppt += 1;
        }
    }
    assert!(ppt * 10 >= total * 8, "{ppt}/{total}");
}

#[test]
fn extension_report_is_serializable() {
    let s = gauss_newton_birank(2, 3, 5, 5, 2, &GnOptions::default()).unwrap();
    let e = numeric_extension_dimension(&s, &ExtensionOptions::default()).unwrap();
    let back = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
    assert_eq!(e, back);
}
