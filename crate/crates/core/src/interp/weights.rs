//! One-dimensional kernel weights at fractional offset t ∈ [0, 1).

#[inline]
pub(crate) fn linear(t: f32) -> [f32; 2] {
    [1.0 - t, t]
}

/// Nodal Lagrange cubic through offsets −1, 0, 1, 2.
#[inline]
pub(crate) fn lagrange(t: f32) -> [f32; 4] {
    let tm1 = t - 1.0;
    let tm2 = t - 2.0;
    let tp1 = t + 1.0;
    [
        -t * tm1 * tm2 / 6.0,
        tp1 * tm1 * tm2 / 2.0,
        -tp1 * t * tm2 / 2.0,
        tp1 * t * tm1 / 6.0,
    ]
}

/// Uniform cubic B-spline over offsets −1, 0, 1, 2.
#[inline]
pub(crate) fn bspline(t: f32) -> [f32; 4] {
    let s = 1.0 - t;
    let t2 = t * t;
    let t3 = t2 * t;
    [
        s * s * s / 6.0,
        (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
        (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
        t3 / 6.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity() {
        for i in 0..=20 {
            let t = i as f32 / 20.0;
            assert!((linear(t).iter().sum::<f32>() - 1.0).abs() < 1e-6);
            assert!((lagrange(t).iter().sum::<f32>() - 1.0).abs() < 1e-6);
            assert!((bspline(t).iter().sum::<f32>() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn lagrange_reproduces_cubics() {
        let p = |x: f32| 0.5 * x * x * x - x * x + 2.0 * x - 3.0;
        for i in 0..10 {
            let t = i as f32 / 10.0;
            let w = lagrange(t);
            let got: f32 = (0..4).map(|s| w[s] * p(s as f32 - 1.0)).sum();
            assert!((got - p(t)).abs() < 1e-5);
        }
    }

    #[test]
    fn nodal_values() {
        assert_eq!(lagrange(0.0), [0.0, 1.0, 0.0, 0.0]);
        let b = bspline(0.0);
        assert!((b[0] - 1.0 / 6.0).abs() < 1e-7 && (b[1] - 2.0 / 3.0).abs() < 1e-7);
        assert_eq!(b[3], 0.0);
    }
}
