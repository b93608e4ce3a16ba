//! Cross-module invariants checked on random inputs.

use framelab::circle::{rotation_number, CircleMapLift};
use framelab::classify::{classify_algebra, standard_tensors};
use framelab::cocycle::{autonomy_check, derivative_cocycle};
use framelab::geometry::ModelManifold;
use framelab::linalg::{frac, IntMatrix, Matrix, Vector};
use framelab::models::{heis_system, sol_system, suspension, DEFAULT_SUSPENSION_WARP};
use framelab::runner::{Analysis, ConfigFile, ExperimentConfig, SystemSpec};
use framelab::splitting::GridLineField;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn manifolds() -> Vec<ModelManifold> {
    let cat = IntMatrix::from_flat2([2, 1, 1, 1]);
    vec![
        ModelManifold::torus(3).unwrap(),
        ModelManifold::heis(2).unwrap(),
        ModelManifold::sol(&cat).unwrap(),
        ModelManifold::mapping_torus(&cat, 1, [0.0, 0.0]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_a_section_of_the_quotient(which in 0usize..4, x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
        let m = &manifolds()[which];
        let p = Vector::from_row_slice(&[x, y, z]);
        let q = m.reduce_to_fundamental_domain(&p).unwrap();
        prop_assert!(m.in_canonical_box(&q));
        prop_assert!((m.reduce_to_fundamental_domain(&q).unwrap() - &q).amax() < 1e-9);
        for g in m.deck_generators() {
            let qg = m.reduce_to_fundamental_domain(&g.apply(&p)).unwrap();
            // Points on the box boundary may land on either face.
            prop_assert!((qg.clone() - &q).amax() < 1e-9 || m.deck_equivalent(&qg, &q, 2));
        }
    }

    #[test]
    fn nearby_points_reduce_within_short_words(which in 0usize..4, x in -1.0f64..2.0, y in -1.0f64..2.0, z in -1.0f64..2.0) {
        let m = &manifolds()[which];
        let p = Vector::from_row_slice(&[x, y, z]);
        prop_assert!(m.deck_equivalent(&p, &m.reduce_to_fundamental_domain(&p).unwrap(), 6));
    }

    #[test]
    fn grid_binary_round_trip(nx in 1usize..6, ny in 1usize..6, nth in 1usize..4, seed in any::<u64>()) {
        let field = GridLineField::from_fn(nx, ny, nth, |x, y, t| (seed as f64 * 1e-9 + x * 3.1 - y + t).sin());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        field.write_binary(&path).unwrap();
        prop_assert_eq!(GridLineField::read_binary(&path).unwrap(), field);
    }

    #[test]
    fn rigid_rotation_number(alpha in -5.0f64..5.0) {
        let r = rotation_number(&CircleMapLift::rotation(alpha), 1000).unwrap();
        let want = frac(alpha);
        prop_assert!((r - want).abs() < 1e-9 || (r - want).abs() > 1.0 - 1e-9);
    }

    #[test]
    fn algebra_class_is_basis_invariant(which in 0usize..6, entries in prop::collection::vec(-2.0f64..2.0, 9)) {
        let p = Matrix::from_row_slice(3, 3, &entries);
        prop_assume!(p.clone().svd(false, false).singular_values.min() > 0.1);
        let (class, t) = standard_tensors().swap_remove(which);
        prop_assert_eq!(classify_algebra(&t.change_basis(&p).unwrap()).unwrap(), class);
    }

    #[test]
    fn cocycle_is_deck_invariant(which in 0usize..3, x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0) {
        let cat = IntMatrix::from_flat2([2, 1, 1, 1]);
        let sys = match which {
            0 => heis_system(&cat, 1).unwrap(),
            1 => sol_system(&cat).unwrap(),
            _ => suspension(&cat, 1, [0.0, 0.0], DEFAULT_SUSPENSION_WARP).unwrap(),
        };
        let p = Vector::from_row_slice(&[x, y, z]);
        let m = derivative_cocycle(&sys.map, &sys.framing, &p).unwrap();
        for g in sys.manifold.deck_generators() {
            let mg = derivative_cocycle(&sys.map, &sys.framing, &g.apply(&p)).unwrap();
            prop_assert!((m.clone() - mg).amax() < 1e-9);
        }
    }

    #[test]
    fn config_json_round_trip(seed in any::<u64>(), heavy in any::<bool>(), k in 1u32..4) {
        let mut c = ExperimentConfig::new(
            SystemSpec::Heis { b: [2, 1, 1, 1], k },
            vec![Analysis::Autonomy, Analysis::Classify, Analysis::Lyapunov],
        );
        c.seed = seed;
        c.heavy = heavy;
        let json = serde_json::to_string(&c).unwrap();
        match ConfigFile::from_json(&json).unwrap() {
            ConfigFile::Single(back) => prop_assert_eq!(back, c),
            ConfigFile::Batch { .. } => prop_assert!(false, "parsed as a batch"),
        }
    }
}

#[test]
fn autonomy_is_sample_independent() {
    let sys = heis_system(&IntMatrix::from_flat2([3, 1, 2, 1]), 1).unwrap();
    let mut a = ChaCha8Rng::seed_from_u64(1);
    let mut b = ChaCha8Rng::seed_from_u64(2);
    let ra = autonomy_check(&sys.map, &sys.framing, &sys.sample_points(&mut a, 500), None).unwrap();
    let rb = autonomy_check(&sys.map, &sys.framing, &sys.sample_points(&mut b, 500), None).unwrap();
    assert!(ra.autonomous && rb.autonomous);
    assert!((ra.matrix() - rb.matrix()).amax() < 1e-9);
}
