//! Axis-aligned periodic convolution, shared by the FD8 derivative and the
//! B-spline prefilter.

use rayon::prelude::*;

use crate::field::Real;
use crate::grid::{Axis, Grid};

/// out[a] = Σₙ wₙ·src[a + n] along `axis`, with periodic wrap.
///
/// `taps` holds (offset, weight) pairs; offsets may not exceed the extent.
pub(crate) fn convolve_axis<T: Real>(
    grid: &Grid,
    src: &[T],
    axis: Axis,
    taps: &[(isize, T)],
) -> Vec<T> {
    debug_assert_eq!(src.len(), grid.len());
    let len = grid.extent(axis);
    let inner = grid.stride(axis);
    let radius = taps.iter().map(|(n, _)| n.unsigned_abs()).max().unwrap_or(0);
    assert!(radius <= len, "stencil wider than the periodic extent");
    let mut out = vec![T::zero(); src.len()];

    if inner == 1 {
        // Contiguous rows: pad each row with its periodic halo.
        out.par_chunks_mut(len).zip(src.par_chunks(len)).for_each_init(
            || Vec::with_capacity(len + 2 * radius),
            |padded, (o, s)| {
                padded.clear();
                padded.extend_from_slice(&s[len - radius..]);
                padded.extend_from_slice(s);
                padded.extend_from_slice(&s[..radius]);
                for (a, slot) in o.iter_mut().enumerate() {
                    let centre = (a + radius) as isize;
                    let mut acc = T::zero();
                    for &(n, w) in taps {
                        acc = acc + w * padded[(centre + n) as usize];
                    }
                    *slot = acc;
                }
            },
        );
    } else {
        // Strided axis: combine whole contiguous rows of length `inner`.
        let block = len * inner;
        out.par_chunks_mut(inner).enumerate().for_each(|(row, o)| {
            let base = (row / len) * block;
            let a = (row % len) as isize;
            for &(n, w) in taps {
                let b = (a + n).rem_euclid(len as isize) as usize;
                let s = &src[base + b * inner..base + (b + 1) * inner];
                for (x, &y) in o.iter_mut().zip(s) {
                    *x = *x + w * y;
                }
            }
        });
    }
    out
}
