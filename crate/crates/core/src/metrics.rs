//! Registration quality measures: the deformation map and its Jacobian
//! determinant, label overlap and relative image mismatch.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffops::{fd8_gradient, spectral_gradient, DerivativeBackend};
use crate::error::{Error, Result};
use crate::field::{LabelMap, ScalarField, VectorField};
use crate::interp::{nearest_labels, DeparturePoints};
use crate::kernels::Kernels;
use crate::transport::{trace_characteristics, Direction, TimeGrid};

/// Pullback map y(x) = x + u(x): the final state of a transport solve is
/// m₀ ∘ y.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationMap {
    displacement: VectorField,
}

impl DeformationMap {
    pub fn identity(grid: crate::grid::Grid) -> Self {
        Self { displacement: VectorField::zeros(grid) }
    }

    pub fn from_displacement(displacement: VectorField) -> Result<Self> {
        if !displacement.all_finite() {
            return Err(Error::NonFinite("displacement"));
        }
        Ok(Self { displacement })
    }

    pub fn displacement(&self) -> &VectorField {
        &self.displacement
    }

    /// The points y(x), wrapped into the domain.
    pub fn points(&self) -> Result<DeparturePoints> {
        let u = self.displacement.components();
        DeparturePoints::from_fn(*self.displacement.grid(), |idx, x| {
            std::array::from_fn(|a| x[a] + u[a].as_slice()[idx] as f64)
        })
    }

    /// m₀ ∘ y with the kernels' interpolation variant.
    pub fn warp(&self, kernels: &Kernels, m0: &ScalarField) -> Result<ScalarField> {
        kernels.interpolate(m0, &self.points()?)
    }

    /// Nearest-neighbour pullback of a label map.
    pub fn warp_labels(&self, labels: &LabelMap) -> Result<LabelMap> {
        nearest_labels(labels, &self.points()?)
    }
}

/// Composes the per-step departure maps of v: u_{j+1} = u_j ∘ Y + (Y − x).
pub fn compute_deformation_map(
    kernels: &Kernels,
    v: &VectorField,
    tg: &TimeGrid,
) -> Result<DeformationMap> {
    let grid = *v.grid();
    let points = trace_characteristics(kernels, v, tg.dt(), Direction::Forward)?;
    let step: [Vec<f32>; 3] = {
        let d: Vec<[f64; 3]> = (0..grid.len()).into_par_iter().map(|i| points.displacement(i)).collect();
        std::array::from_fn(|a| d.iter().map(|x| x[a] as f32).collect())
    };
    let mut u = VectorField::zeros(grid);
    for _ in 0..tg.nt() {
        let mut next = kernels.interpolate_vector(&u, &points)?;
        for (c, s) in next.components_mut().iter_mut().zip(&step) {
            c.as_mut_slice().par_iter_mut().zip(s.par_iter()).for_each(|(x, &d)| *x += d);
        }
        u = next;
    }
    DeformationMap::from_displacement(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetFStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl DetFStats {
    pub fn of(field: &ScalarField) -> Self {
        let (min, max) = field.min_max();
        Self { min: min as f64, mean: field.mean(), max: max as f64 }
    }

    /// Whether the map is locally invertible at every node.
    pub fn is_positive(&self) -> bool {
        self.min > 0.0
    }
}

/// det(I + ∇u) at every node, with ∇ from `backend`.
pub fn det_deformation_gradient(
    map: &DeformationMap,
    backend: DerivativeBackend,
) -> (ScalarField, DetFStats) {
    let u = map.displacement();
    let grads: Vec<VectorField> = u
        .components()
        .iter()
        .map(|c| match backend {
            DerivativeBackend::Fd8 => fd8_gradient(c),
            DerivativeBackend::Spectral => spectral_gradient(c),
        })
        .collect();
    // row a of F holds ∂(x_a + u_a)/∂x_b
    let j = |a: usize, b: usize, idx: usize| -> f64 {
        let d = grads[a].components()[b].as_slice()[idx] as f64;
        if a == b {
            1.0 + d
        } else {
            d
        }
    };
    let data = (0..u.grid().len())
        .into_par_iter()
        .map(|i| {
            let det = j(0, 0, i) * (j(1, 1, i) * j(2, 2, i) - j(1, 2, i) * j(2, 1, i))
                - j(0, 1, i) * (j(1, 0, i) * j(2, 2, i) - j(1, 2, i) * j(2, 0, i))
                + j(0, 2, i) * (j(1, 0, i) * j(2, 1, i) - j(1, 1, i) * j(2, 0, i));
            det as f32
        })
        .collect();
    let det = ScalarField::from_vec(*u.grid(), data).expect("finite determinant");
    let stats = DetFStats::of(&det);
    (det, stats)
}

/// ‖m_final − m₁‖ / ‖m₁ − m₀‖.
pub fn relative_mismatch(m_final: &ScalarField, m1: &ScalarField, m0: &ScalarField) -> Result<f64> {
    m_final.grid().ensure_same(m1.grid())?;
    m1.grid().ensure_same(m0.grid())?;
    let denom = m1.sub(m0).norm();
    if denom == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(m_final.sub(m1).norm() / denom)
}

/// 2|A ∩ B| / (|A| + |B|), where A and B are the nodes of `a` and `b`
/// carrying any label in `labels`.
pub fn dice(a: &LabelMap, b: &LabelMap, labels: &[u16]) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    let in_set = |l: u16| labels.contains(&l);
    let (na, nb, both) = a
        .as_slice()
        .par_iter()
        .zip(b.as_slice().par_iter())
        .map(|(&x, &y)| {
            let (p, q) = (in_set(x), in_set(y));
            (p as u64, q as u64, (p && q) as u64)
        })
        .reduce(|| (0, 0, 0), |l, r| (l.0 + r.0, l.1 + r.1, l.2 + r.2));
    if na + nb == 0 {
        return Err(Error::EmptyLabelUnion);
    }
    Ok(2.0 * both as f64 / (na + nb) as f64)
}

/// Distinct nonzero labels present in either map, sorted.
pub fn foreground_labels(a: &LabelMap, b: &LabelMap) -> Vec<u16> {
    let mut seen: Vec<u16> = a.as_slice().iter().chain(b.as_slice()).copied().filter(|&l| l != 0).collect();
    seen.sort_unstable();
    seen.dedup();
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::interp::InterpVariant;
    use crate::transport::solve_state;

    fn kernels() -> Kernels {
        Kernels::new(DerivativeBackend::Fd8, InterpVariant::Bspline)
    }

    #[test]
    fn zero_velocity_gives_identity() {
        let g = Grid::cubic(16).unwrap();
        let map = compute_deformation_map(&kernels(), &VectorField::zeros(g), &TimeGrid::default()).unwrap();
        assert_eq!(map.displacement().max_abs(), 0.0);
        assert_eq!(map.points().unwrap(), DeparturePoints::identity(g));
        let (det, stats) = det_deformation_gradient(&map, DerivativeBackend::Fd8);
        assert!(det.as_slice().iter().all(|&d| d == 1.0));
        assert_eq!((stats.min, stats.mean, stats.max), (1.0, 1.0, 1.0));
    }

    #[test]
    fn constant_flow_displacement() {
        let g = Grid::cubic(16).unwrap();
        let v = VectorField::from_fn(g, |_| [0.4, 0.0, 0.0]);
        let map = compute_deformation_map(&kernels(), &v, &TimeGrid::default()).unwrap();
        let u = map.displacement().components();
        assert!(u[0].as_slice().iter().all(|&x| (x + 0.4).abs() < 1e-4));
        assert!(u[1].max_abs() < 1e-6 && u[2].max_abs() < 1e-6);
    }

    #[test]
    fn warp_matches_transport() {
        let g = Grid::cubic(64).unwrap();
        let k = kernels();
        let v = VectorField::from_fn(g, |x| [0.3 * x[1].sin(), 0.2 * (x[0] + x[2]).cos(), 0.25 * x[0].sin()]);
        let m0 = ScalarField::from_fn(g, |x| x[0].sin() * (x[1]).cos() + 0.5 * x[2].sin());
        let tg = TimeGrid::default();
        let state = solve_state(&k, &v, &m0, &tg).unwrap();
        let warped = compute_deformation_map(&k, &v, &tg).unwrap().warp(&k, &m0).unwrap();
        let want = state.final_slice();
        assert!(warped.sub(want).norm() / want.norm() <= 1e-3);
    }

    #[test]
    fn analytic_jacobian() {
        let g = Grid::cubic(64).unwrap();
        let u = VectorField::from_fn(g, |x| [0.1 * x[0].sin(), 0.0, 0.0]);
        let map = DeformationMap::from_displacement(u).unwrap();
        let want = ScalarField::from_fn(g, |x| 1.0 + 0.1 * x[0].cos());
        for backend in [DerivativeBackend::Fd8, DerivativeBackend::Spectral] {
            let (det, stats) = det_deformation_gradient(&map, backend);
            assert!(det.sub(&want).max_abs() <= 1e-4);
            assert!((stats.max - 1.1).abs() <= 1e-4 && (stats.min - 0.9).abs() <= 1e-4);
            assert!(stats.min <= stats.mean && stats.mean <= stats.max);
        }
    }

    #[test]
    fn mismatch_endpoints_and_errors() {
        let g = Grid::cubic(16).unwrap();
        let m0 = ScalarField::from_fn(g, |x| x[0].sin());
        let m1 = ScalarField::from_fn(g, |x| x[1].cos());
        assert_eq!(relative_mismatch(&m1, &m1, &m0).unwrap(), 0.0);
        assert!((relative_mismatch(&m0, &m1, &m0).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(relative_mismatch(&m0, &m0, &m0), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn dice_cases() {
        let g = Grid::cubic(16).unwrap();
        let h = g.spacing()[0];
        // boxes of 8 slabs along x₁, offset by 4 slabs
        let a = LabelMap::from_fn(g, |x| ((x[0] / h).round() < 8.0) as u16);
        let b = LabelMap::from_fn(g, |x| {
            let i = (x[0] / h).round();
            (4.0..12.0).contains(&i) as u16
        });
        let c = LabelMap::from_fn(g, |x| ((x[0] / h).round() >= 8.0) as u16);
        assert_eq!(dice(&a, &a, &[1]).unwrap(), 1.0);
        assert_eq!(dice(&a, &c, &[1]).unwrap(), 0.0);
        assert_eq!(dice(&a, &b, &[1]).unwrap(), 0.5);
        assert!(matches!(dice(&a, &b, &[7]), Err(Error::EmptyLabelUnion)));
        assert_eq!(foreground_labels(&a, &b), vec![1]);
    }
}
