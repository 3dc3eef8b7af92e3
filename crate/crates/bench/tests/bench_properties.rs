use veloreg_bench::{
    advect_roundtrip_bench, derivative_accuracy_sweep, interp_accuracy_bench, throughput_bench, BenchSummary,
    InterpParams, IntensityModel, KernelTag, Precision,
};
use veloreg_core::{DerivativeBackend, InterpVariant};

#[test]
fn roundtrip_error_ordering_at_64() {
    let err = |v| advect_roundtrip_bench(64, v, 7, 0.3).unwrap();
    let (lin, lag, bsp) = (err(InterpVariant::Linear), err(InterpVariant::Lagrange), err(InterpVariant::Bspline));
    println!("roundtrip: linear {:.3e} lagrange {:.3e} bspline {:.3e}", lin.rel_err, lag.rel_err, bsp.rel_err);
    assert!(lin.rel_err > lag.rel_err);
    assert!(lag.rel_err >= bsp.rel_err);
    for row in [lin, lag, bsp] {
        assert_eq!(row.n_interp, 14);
    }
}

#[test]
fn copy_baseline_is_the_bandwidth_ceiling() {
    let model = IntensityModel::default();
    let copy = throughput_bench(KernelTag::CopyBaseline, 64, 20, &model).unwrap();
    for k in KernelTag::ALL.into_iter().filter(|&k| k != KernelTag::CopyBaseline) {
        let r = throughput_bench(k, 64, 3, &model).unwrap();
        assert!(copy.eff_bw >= r.eff_bw, "{k}: {} GB/s vs copy {} GB/s", r.eff_bw, copy.eff_bw);
    }
}

#[test]
fn accuracy_rows_are_deterministic() {
    let p = InterpParams { reps: 1, ..Default::default() };
    for v in InterpVariant::ALL {
        assert_eq!(
            interp_accuracy_bench(32, v, &p).unwrap().rel_err,
            interp_accuracy_bench(32, v, &p).unwrap().rel_err
        );
    }
    let a = derivative_accuracy_sweep(32, DerivativeBackend::Spectral, Precision::Single).unwrap();
    let b = derivative_accuracy_sweep(32, DerivativeBackend::Spectral, Precision::Single).unwrap();
    assert_eq!(a, b);
}

#[test]
fn summary_classifies_every_kernel_for_high_ratio_devices() {
    for ratio in [14.71, 20.0, 100.0] {
        let model = IntensityModel::new(ratio * 1000.0, 1000.0).unwrap();
        let s = BenchSummary::new(model, Vec::new());
        assert!(s.classification.iter().all(|c| c.memory_bound));
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["classification"].as_array().unwrap().len(), KernelTag::ALL.len());
    }
}
