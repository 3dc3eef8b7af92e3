use proptest::prelude::*;
use veloreg_core::interp::{interpolate, prefilter_bspline, DeparturePoints, InterpVariant};
use veloreg_core::synth::{interpolation_error, perturbed_nodes, sinsq_value};
use veloreg_core::{Grid, ScalarField};

fn grid16() -> Grid {
    Grid::cubic(16).unwrap()
}

fn variant() -> impl Strategy<Value = InterpVariant> {
    prop::sample::select(InterpVariant::ALL.to_vec())
}

/// Points x + (a·sin(i + c₁), …) for a handful of random parameters.
fn scattered(grid: Grid, amp: f64, phase: [f64; 3]) -> DeparturePoints {
    DeparturePoints::from_fn(grid, |idx, x| {
        let s = idx as f64;
        [x[0] + amp * (s + phase[0]).sin(), x[1] + amp * (1.7 * s + phase[1]).cos(), x[2] + amp * (0.3 * s + phase[2]).sin()]
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn partition_of_unity(v in variant(), amp in 0.0..3.0f64, p0 in 0.0..6.0f64, p1 in 0.0..6.0f64, p2 in 0.0..6.0f64) {
        let g = grid16();
        let ones = ScalarField::constant(g, 1.0f32);
        let got = interpolate(&ones, &scattered(g, amp, [p0, p1, p2]), v).unwrap();
        for &x in got.as_slice() {
            prop_assert!((x - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn linearity(v in variant(), a in -3.0..3.0f64, b in -3.0..3.0f64, k in 1..4i32, p0 in 0.0..6.0f64) {
        let g = grid16();
        let f = ScalarField::<f64>::from_fn(g, |x| (k as f64 * x[0]).sin() * x[1].cos());
        let h = ScalarField::<f64>::from_fn(g, |x| (x[2] + p0).cos() + 0.3 * (2.0 * x[1]).sin());
        let combo = ScalarField::<f64>::from_vec(
            g,
            f.as_slice().iter().zip(h.as_slice()).map(|(x, y)| a * x + b * y).collect(),
        ).unwrap();
        let pts = scattered(g, 0.4, [p0, 1.0, 2.0]);
        let lhs = interpolate(&combo, &pts, v).unwrap();
        let (fi, hi) = (interpolate(&f, &pts, v).unwrap(), interpolate(&h, &pts, v).unwrap());
        let rhs = ScalarField::<f64>::from_vec(
            g,
            fi.as_slice().iter().zip(hi.as_slice()).map(|(x, y)| a * x + b * y).collect(),
        ).unwrap();
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-5 * rhs.norm().max(1e-12));
    }

    #[test]
    fn shift_by_one_period(v in variant(), amp in 0.0..1.0f64, p0 in 0.0..6.0f64) {
        let g = grid16();
        let f = ScalarField::<f32>::from_fn(g, |x| x[0].sin() + (2.0 * x[1]).cos() * x[2].sin());
        let base = scattered(g, amp, [p0, 0.5, 1.5]);
        let shifted = DeparturePoints::from_fn(g, |idx, _| {
            let p = base.physical(idx);
            [p[0] + std::f64::consts::TAU, p[1], p[2]]
        }).unwrap();
        let (a, b) = (interpolate(&f, &base, v).unwrap(), interpolate(&f, &shifted, v).unwrap());
        prop_assert!(a.sub(&b).max_abs() <= 1e-6);
    }
}

#[test]
fn prefilter_is_linear() {
    let g = grid16();
    let f = ScalarField::<f64>::from_fn(g, |x| x[0].sin() * x[2].cos());
    let h = ScalarField::<f64>::from_fn(g, |x| (3.0 * x[1]).sin());
    let mut sum = f.clone();
    sum.axpy(2.0, &h);
    let mut want = prefilter_bspline(&f).into_field();
    want.axpy(2.0, &prefilter_bspline(&h).into_field());
    assert!(prefilter_bspline(&sum).into_field().sub(&want).max_abs() <= 1e-12);
}

fn perturbed_node_errors(n: usize) -> [f64; 3] {
    let g = Grid::cubic(n).unwrap();
    let pts = perturbed_nodes(g, 42, 0.5);
    InterpVariant::ALL.map(|v| interpolation_error(sinsq_value, &pts, v).unwrap())
}

#[test]
fn error_magnitudes_and_ordering_at_64() {
    let [lin, lag, spl] = perturbed_node_errors(64);
    for (got, want) in [(lin, 2.61e-2), (lag, 9.85e-3), (spl, 2.25e-3)] {
        assert!(got / want <= 3.0 && want / got <= 3.0, "{got:e} vs {want:e}");
    }
    assert!(spl < lag && lag < lin);
}

#[test]
fn convergence_orders_between_64_and_128() {
    let coarse = perturbed_node_errors(64);
    let fine = perturbed_node_errors(128);
    let ratio: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| c / f).collect();
    // second order for linear, fourth order for the cubic kernels
    assert!((3.0..=5.0).contains(&ratio[0]), "linear {}", ratio[0]);
    assert!((2f64.powf(3.5)..=32.0).contains(&ratio[1]), "lagrange {}", ratio[1]);
    assert!((2f64.powf(3.5)..=32.0).contains(&ratio[2]), "bspline {}", ratio[2]);
}

#[test]
fn perturbation_is_deterministic() {
    let g = grid16();
    assert_eq!(perturbed_nodes(g, 42, 0.5), perturbed_nodes(g, 42, 0.5));
    assert_ne!(perturbed_nodes(g, 42, 0.5), perturbed_nodes(g, 43, 0.5));
    let h = g.spacing()[0];
    let pts = perturbed_nodes(g, 42, 0.5);
    for idx in 0..g.len() {
        assert!(pts.displacement(idx).iter().all(|d| d.abs() <= 0.5 * h + 1e-6));
    }
}
