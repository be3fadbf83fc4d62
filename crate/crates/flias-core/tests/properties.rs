//! Property-based invariants over randomly drawn inputs.

use proptest::prelude::*;

use flias_core::algebra::LieAlgebra;
use flias_core::atlas::VarietyPoint;
use flias_core::io::AlgebraFile;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// A six-parameter table is left-symmetric exactly when the four
    /// variety polynomials vanish.
    #[test]
    fn left_symmetry_iff_variety_membership(
        v in prop::array::uniform6(-3.0f64..3.0)
    ) {
        let p = VarietyPoint::from_slice(&v).unwrap();
        let on_variety = p.residual_norm() <= 1e-9;
        let lsa = p.product()
            .is_left_symmetric(&LieAlgebra::aff_r(), 1e-9)
            .unwrap()
            .passed();
        prop_assert_eq!(on_variety, lsa);
    }

    /// Component parameterizations land exactly on the variety, and the
    /// bracket built from any of their products is antisymmetric with
    /// `[x, x] = 0`.
    #[test]
    fn component_points_are_left_symmetric(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        x in prop::array::uniform2(-5.0f64..5.0),
    ) {
        for p in [
            VarietyPoint::from_component1(a, b),
            VarietyPoint::from_component2(if a.abs() < 0.05 { 1.0 } else { a }, b),
            VarietyPoint::from_component3(a, if b.abs() < 0.2 { 1.0 } else { b }),
        ] {
            prop_assert!(p.residual_norm() <= 1e-11);
            let alg = p.product().commutator_algebra();
            let xx = alg.bracket(&x, &x).unwrap();
            prop_assert!(xx.iter().all(|c| c.abs() < 1e-12));
        }
    }

    /// Product files survive a JSON round trip bit-exactly.
    #[test]
    fn algebra_file_json_round_trip(
        entries in prop::collection::vec(
            (0usize..3, 0usize..3, 0usize..3, -4.0f64..4.0), 0..12)
    ) {
        let file = AlgebraFile { dim: 3, bracket: None, product: Some(entries) };
        let json = serde_json::to_string(&file).unwrap();
        let back: AlgebraFile = serde_json::from_str(&json).unwrap();
        let p1 = file.product().unwrap().unwrap();
        let p2 = back.product().unwrap().unwrap();
        prop_assert_eq!(p1.coefficients(), p2.coefficients());
    }
}
