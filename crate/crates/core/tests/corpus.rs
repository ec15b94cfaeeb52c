use locext_core::exactmat::{basis_vector as e, rank};
use locext_core::extender::{
    extension_count_bound, extremality_check_ppt, is_admissible_coupling, is_trivial_coupling, lift_weighted,
    ppt_extension_space, slocc_extension, split_blocks, ExtensionStep, PptVerdict,
};
use locext_core::qstates::{
    maximally_mixed, rho_3x3, rho_4x5, rho_family, terms_matrix, tiles_complement, BipartiteState, FamilySpec, Side,
};
use num_traits::Zero;

#[test]
fn bound_arithmetic() {
    assert_eq!(extension_count_bound(3, 3, 5, 6), 3);
    assert_eq!(extension_count_bound(3, 3, 4, 4), -6);
    assert_eq!(extension_count_bound(2, 4, 8, 8), 30);
    assert_eq!(extension_count_bound(2, 2, 4, 4), 6);
}

#[test]
fn extension_space_table() {
    let r = rho_4x5().unwrap();
    let cases: Vec<(BipartiteState, usize, usize, i64)> = vec![
        (rho_3x3(), 7, 3, 3),
        (tiles_complement(), 3, 3, -6),
        (maximally_mixed(2, 2), 8, 2, 6),
        (maximally_mixed(2, 3), 18, 2, 16),
        (r.stages[0].clone(), 11, 4, 5),
        (r.stages[1].clone(), 12, 4, 0),
        (r.stages[2].clone(), 11, 4, -9),
        (rho_family(&FamilySpec::new(2)).unwrap(), 6, 3, 0),
        (rho_family(&FamilySpec::new(3)).unwrap(), 15, 5, -15),
    ];
    for (s, dim, trivial, bound) in cases {
        let sp = ppt_extension_space(&s).unwrap();
        assert_eq!((sp.dimension, sp.trivial_dimension, sp.bound), (dim, trivial, bound), "{}", s.label);
        assert!(sp.dimension >= sp.trivial_dimension);
        if sp.bound > 0 {
            assert!(sp.dimension as i64 >= sp.bound + s.dim_a as i64, "{}", s.label);
        }
        for chi in &sp.basis {
            assert!(is_admissible_coupling(&s, chi).unwrap());
        }
    }
}

#[test]
fn rho3x3_has_nontrivial_couplings() {
    let s = rho_3x3();
    let sp = ppt_extension_space(&s).unwrap();
    assert_eq!(sp.birank, (5, 6));
    assert_eq!(sp.nontrivial_dimension(), 4);
    assert!(sp.basis.iter().any(|chi| !is_trivial_coupling(&s, chi)));
}

#[test]
fn slocc_on_rho3x3_keeps_birank() {
    let out = slocc_extension(&rho_3x3(), Side::A, &e(3, 0)).unwrap();
    assert!(out.is_ppt());
    assert_eq!(out.birank(), (5, 6));
}

#[test]
fn pipeline_couplings_are_admissible_and_nontrivial() {
    let r = rho_4x5().unwrap();
    let cores = [&r.start, &r.stages[0], &r.stages[1]];
    for (k, (step, core)) in r.pipeline.steps.iter().zip(cores).enumerate() {
        let b = step.blocks(core).unwrap().unwrap();
        let a = if b.side == Side::B { b.swapped() } else { b.clone() };
        assert!(is_admissible_coupling(&a.core, &a.coupling).unwrap(), "step {k}");
        let trivial = is_trivial_coupling(&a.core, &a.coupling);
        assert_eq!(trivial, matches!(step, ExtensionStep::DirectSum { .. }), "step {k}");
    }
}

#[test]
fn final_split_has_single_coupling_column() {
    let r = rho_4x5().unwrap();
    let b = split_blocks(r.final_state(), Side::B, 4).unwrap();
    assert_eq!(rank(&b.coupling), 1);
    let nonzero: Vec<(usize, usize)> = (0..b.coupling.rows())
        .flat_map(|i| (0..b.coupling.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| !b.coupling.get(i, j).is_zero())
        .collect();
    // core site |02⟩ coupled to A-index 3 of the new B direction
    assert_eq!(nonzero, vec![(2, 3)]);
}

#[test]
fn lift_through_pipeline_reconstructs() {
    let r = rho_4x5().unwrap();
    let mut terms: Vec<_> = locext_core::qstates::rho_3x3_terms().into_iter().map(|t| (t.weight, t.vector)).collect();
    for (step, stage) in r.pipeline.steps.iter().zip(&r.stages) {
        let perp = stage.local_dim(step.side()) - 1;
        let lift = lift_weighted(stage, step.side(), perp, &terms).unwrap();
        assert_eq!(lift.reconstruct().unwrap(), stage.matrix);
        assert!(lift.max_increment() <= 1);
        terms = lift.all_terms();
    }
    let named: Vec<_> = r.terms.iter().map(|t| (t.weight.clone(), t.vector.clone())).collect();
    assert_eq!(terms, named);
    assert_eq!(terms_matrix(&r.terms, 20), r.final_state().matrix);
}

#[test]
fn product_pair_extremality_regression() {
    let r = rho_4x5().unwrap();
    let b = r.pipeline.steps[1].blocks(&r.stages[0]).unwrap().unwrap();
    let v = extremality_check_ppt(&b).unwrap();
    assert_eq!(v.verdict, PptVerdict::NotCertified);
    assert_eq!((v.intersection_dim, v.range_intersection_dim), (2, 0));
}

#[test]
fn edge_blocks_are_hermitian() {
    let r = rho_4x5().unwrap();
    let cores = [&r.start, &r.stages[0], &r.stages[1]];
    for (step, core) in r.pipeline.steps.iter().zip(cores) {
        let b = step.blocks(core).unwrap().unwrap();
        assert!(b.edge.is_hermitian());
        assert_eq!(b.assemble_matrix().unwrap(), step.apply(core, "").unwrap().matrix);
    }
}
