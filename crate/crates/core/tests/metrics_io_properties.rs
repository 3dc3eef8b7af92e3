use proptest::prelude::*;
use veloreg_core::io::{read_labels, read_scalar, write_labels, write_scalar};
use veloreg_core::metrics::{dice, relative_mismatch};
use veloreg_core::{Grid, LabelMap, ScalarField};

fn grid() -> Grid {
    Grid::new([16, 16, 18]).unwrap()
}

fn field(values: &[f32]) -> ScalarField {
    let g = grid();
    ScalarField::from_vec(g, (0..g.len()).map(|i| values[i % values.len()] * (1.0 + (i % 7) as f32)).collect())
        .unwrap()
}

fn labels(values: &[u16], stride: usize) -> LabelMap {
    let g = grid();
    LabelMap::from_vec(g, (0..g.len()).map(|i| values[(i / stride) % values.len()]).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dice_is_symmetric(a in prop::collection::vec(0u16..4, 1..20), b in prop::collection::vec(0u16..4, 1..20), s1 in 1usize..50, s2 in 1usize..50) {
        let (la, lb) = (labels(&a, s1), labels(&b, s2));
        for set in [vec![1u16], vec![1, 2], vec![3]] {
            match (dice(&la, &lb, &set), dice(&lb, &la, &set)) {
                (Ok(x), Ok(y)) => {
                    prop_assert_eq!(x, y);
                    prop_assert!((0.0..=1.0).contains(&x));
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "asymmetric error"),
            }
        }
    }

    #[test]
    fn mismatch_is_scale_invariant(a in prop::collection::vec(-2.0f32..2.0, 3..12), s in 0.01f32..100.0) {
        let m0 = field(&a);
        let m1 = m0.map(|x| (x * 1.3).sin());
        let mf = m0.map(|x| 0.5 * x + 0.5 * (x * 1.3).sin());
        prop_assume!(m1.sub(&m0).norm() > 1e-3);
        let r = relative_mismatch(&mf, &m1, &m0).unwrap();
        let rs = relative_mismatch(&mf.scaled(s), &m1.scaled(s), &m0.scaled(s)).unwrap();
        prop_assert!((r - rs).abs() <= 1e-6 * r.max(1e-12));
    }

    #[test]
    fn volumes_round_trip(a in prop::collection::vec(-1e6f32..1e6, 1..40), l in prop::collection::vec(any::<u16>(), 1..40)) {
        let dir = tempfile::tempdir().unwrap();
        let f = field(&a);
        let path = dir.path().join("img");
        write_scalar(&f, &path).unwrap();
        prop_assert_eq!(read_scalar(&path).unwrap(), f);
        let lm = labels(&l, 3);
        let lpath = dir.path().join("lab.raw");
        write_labels(&lm, &lpath).unwrap();
        prop_assert_eq!(read_labels(&lpath).unwrap(), lm);
    }
}
