use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schur::SchurSymbol;

/// Points `origin + h·i` for multi-indices `0 ≤ i < shape`, enumerated in
/// row-major order (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
}

impl UniformGrid {
    pub fn new(origin: Vec<f64>, spacing: f64, shape: Vec<usize>) -> Result<Self> {
        if origin.len() != shape.len() || shape.is_empty() {
            return Err(Error::Dimension("origin and shape must have the same positive length".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Precondition(format!("grid spacing {spacing} must be positive")));
        }
        Ok(Self { origin, spacing, shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.origin)
            .map(|(&i, &o)| o + self.spacing * i as f64)
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Samples `f(x, y)` at every pair of grid points.
    pub fn sample_symbol(
        &self,
        prov: crate::schur::Provenance,
        f: impl Fn(&[f64], &[f64]) -> Complex64,
    ) -> Result<SchurSymbol> {
        let pts = self.points();
        let n = pts.len();
        SchurSymbol::from_fn(n, n, prov, |j, k| {
            if j == k {
                Complex64::new(0.0, 0.0)
            } else {
                f(&pts[j], &pts[k])
            }
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MikhlinCondition {
    pub order: usize,
    /// `sup` over multi-indices and sampled pairs.
    pub value: f64,
    /// `Σ_γ sup_{x≠y}`, the sum of the per-index suprema.
    pub sum: f64,
    pub per_index: Vec<(Vec<usize>, f64)>,
    /// Pair/multi-index combinations with no admissible stencil.
    pub skipped: usize,
}

fn binomial(r: usize, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (r - i) as f64 / (i + 1) as f64)
}

fn multi_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    fn rec(axis: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if axis == cur.len() {
            out.push(cur.clone());
            return;
        }
        for g in 0..=left {
            cur[axis] = g;
            rec(axis + 1, left - g, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, order, &mut vec![0; dim], &mut out);
    out.sort_by_key(|g| g.iter().sum::<usize>());
    out
}

/// Finite-difference stencil of `∂^γ` at `at` that stays in the grid and
/// does not touch `avoid`. Returns `(flat index, weight)` pairs.
fn stencil(grid: &UniformGrid, gamma: &[usize], at: &[usize], avoid: &[usize]) -> Option<Vec<(usize, f64)>> {
    let dim = grid.dim();
    // Per axis: admissible starts of the (γ_i + 1)-point forward difference,
    // nearest to centered first.
    let mut options: Vec<Vec<usize>> = Vec::with_capacity(dim);
    for axis in 0..dim {
        let r = gamma[axis];
        let len = grid.shape[axis];
        if r == 0 {
            options.push(vec![at[axis]]);
            continue;
        }
        if r + 1 > len {
            return None;
        }
        let centered = at[axis] as i64 - (r / 2) as i64;
        let lo = at[axis].saturating_sub(r);
        let hi = at[axis].min(len - 1 - r);
        let mut starts: Vec<usize> = (lo..=hi).collect();
        starts.sort_by_key(|&s| ((s as i64 - centered).abs(), s));
        options.push(starts);
    }
    let contains = |axis: usize, start: usize| {
        let r = gamma[axis];
        if r == 0 {
            avoid[axis] == start
        } else {
            (start..=start + r).contains(&avoid[axis])
        }
    };
    // Combinations ordered by total rank.
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for opts in &options {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                (0..opts.len()).map(move |r| {
                    let mut c = c.clone();
                    c.push(r);
                    c
                })
            })
            .collect();
    }
    combos.sort_by_key(|c| c.iter().sum::<usize>());
    let choice = combos
        .into_iter()
        .find(|c| !(0..dim).all(|axis| contains(axis, options[axis][c[axis]])))?;
    let starts: Vec<usize> = (0..dim).map(|axis| options[axis][choice[axis]]).collect();

    let scale = grid.spacing.powi(gamma.iter().sum::<usize>() as i32);
    let mut out = vec![(Vec::with_capacity(dim), 1.0 / scale)];
    for axis in 0..dim {
        let r = gamma[axis];
        let start = starts[axis];
        out = out
            .into_iter()
            .flat_map(|(idx, w)| {
                (0..=r).map(move |m| {
                    let mut idx = idx.clone();
                    idx.push(start + m);
                    let sign = if (r - m) % 2 == 0 { 1.0 } else { -1.0 };
                    (idx, w * sign * binomial(r, m))
                })
            })
            .collect();
    }
    Some(out.into_iter().map(|(idx, w)| (grid.flat_index(&idx), w)).collect())
}

/// `sup_{x≠y} |x − y|^{|γ|} (|∂_x^γ M| + |∂_y^γ M|)` over `|γ| ≤ ⌊n/2⌋ + 1`,
/// with the `γ = 0` term read as `|M(x,y)|`. Derivatives are finite
/// differences of step `h`, shifted one-sided near the boundary and away
/// from the diagonal.
pub fn mikhlin_condition(grid: &UniformGrid, m: &SchurSymbol) -> Result<MikhlinCondition> {
    let n = grid.len();
    if m.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "symbol of shape {:?} sampled on a grid of {n} points",
            m.shape()
        )));
    }
    let order = grid.dim() / 2 + 1;
    if let Some(&s) = grid.shape.iter().find(|&&s| s < order + 2) {
        return Err(Error::Resolution(format!(
            "an axis has {s} points, order {order} needs at least {}",
            order + 2
        )));
    }
    let pts = grid.points();
    let idx: Vec<Vec<usize>> = (0..n).map(|i| grid.multi_index(i)).collect();
    let mut skipped = 0;
    let mut per_index = Vec::new();
    for gamma in multi_indices(grid.dim(), order) {
        let size: usize = gamma.iter().sum();
        let mut sup: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                if size == 0 {
                    sup = sup.max(m.get(x, y).norm());
                    continue;
                }
                let (Some(sx), Some(sy)) = (
                    stencil(grid, &gamma, &idx[x], &idx[y]),
                    stencil(grid, &gamma, &idx[y], &idx[x]),
                ) else {
                    skipped += 1;
                    continue;
                };
                let dx: Complex64 = sx.iter().map(|&(p, w)| m.get(p, y) * w).sum();
                let dy: Complex64 = sy.iter().map(|&(p, w)| m.get(x, p) * w).sum();
                let dist = pts[x]
                    .iter()
                    .zip(&pts[y])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                sup = sup.max(dist.powi(size as i32) * (dx.norm() + dy.norm()));
            }
        }
        per_index.push((gamma, sup));
    }
    Ok(MikhlinCondition {
        order,
        value: per_index.iter().map(|(_, v)| *v).fold(0.0, f64::max),
        sum: per_index.iter().map(|(_, v)| v).sum(),
        per_index,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::Provenance;

    fn imaginary_power(grid: &UniformGrid, s: f64) -> SchurSymbol {
        grid.sample_symbol(Provenance::new("imag-power"), |x, y| {
            let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            Complex64::from_polar(1.0, s * r.ln())
        })
        .unwrap()
    }

    #[test]
    fn grid_indexing() {
        let g = UniformGrid::new(vec![0.0, 1.0], 0.5, vec![3, 4]).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g.multi_index(7), vec![1, 3]);
        assert_eq!(g.flat_index(&[1, 3]), 7);
        assert_eq!(g.point(7), vec![0.5, 2.5]);
    }

    #[test]
    fn constant_symbol() {
        let g = UniformGrid::new(vec![0.0], 1.0, vec![8]).unwrap();
        let m = g.sample_symbol(Provenance::new("c"), |_, _| Complex64::new(-2.5, 0.0)).unwrap();
        let c = mikhlin_condition(&g, &m).unwrap();
        assert_eq!(c.order, 1);
        assert!((c.value - 2.5).abs() < 1e-12);
        assert!(c.per_index[1..].iter().all(|(_, v)| *v < 1e-12));
        // Only the adjacent boundary pairs have no admissible stencil.
        assert_eq!(c.skipped, 4);
    }

    #[test]
    fn imaginary_power_is_unimodular_and_finite() {
        let g = UniformGrid::new(vec![0.0], 1.0, vec![32]).unwrap();
        let m = imaginary_power(&g, 1.0);
        for j in 0..32 {
            for k in 0..32 {
                if j != k {
                    assert!((m.get(j, k).norm() - 1.0).abs() < 1e-14);
                }
            }
        }
        let c = mikhlin_condition(&g, &m).unwrap();
        assert!(c.value.is_finite() && c.value >= 1.0 && c.value < 4.0);
    }

    #[test]
    fn refinement_is_stable() {
        let coarse = UniformGrid::new(vec![0.0], 0.25, vec![17]).unwrap();
        let fine = UniformGrid::new(vec![0.0], 0.125, vec![33]).unwrap();
        let smooth = |g: &UniformGrid| {
            g.sample_symbol(Provenance::new("smooth"), |x, y| {
                let t = x[0] - y[0];
                Complex64::new(t / (t * t + 1.0).sqrt(), 0.0)
            })
            .unwrap()
        };
        let a = mikhlin_condition(&coarse, &smooth(&coarse)).unwrap().value;
        let b = mikhlin_condition(&fine, &smooth(&fine)).unwrap().value;
        assert!((a - b).abs() <= 0.1 * a, "{a} vs {b}");
        let a = mikhlin_condition(&coarse, &imaginary_power(&coarse, 1.0)).unwrap().value;
        let b = mikhlin_condition(&fine, &imaginary_power(&fine, 1.0)).unwrap().value;
        assert!((a - b).abs() <= 0.1 * a, "{a} vs {b}");
    }

    #[test]
    fn planar_grid() {
        let g = UniformGrid::new(vec![0.0, 0.0], 1.0, vec![6, 6]).unwrap();
        let m = imaginary_power(&g, 0.5);
        let c = mikhlin_condition(&g, &m).unwrap();
        assert_eq!(c.order, 2);
        assert_eq!(c.per_index.len(), 6);
        assert!(c.value.is_finite());
        assert!(c.sum >= c.value);
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = UniformGrid::new(vec![0.0], 1.0, vec![2]).unwrap();
        let m = g.sample_symbol(Provenance::new("c"), |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(mikhlin_condition(&g, &m), Err(Error::Resolution(_))));
    }

    #[test]
    fn stencils_are_exact_on_polynomials() {
        let g = UniformGrid::new(vec![0.0, 0.0], 0.5, vec![5, 5]).unwrap();
        // ∂_0 ∂_1 of x0·x1 is 1; ∂_0² of x0² is 2.
        let f = |p: &[f64]| [p[0] * p[1], p[0] * p[0]];
        let mut missing = 0;
        for at in 0..25 {
            for avoid in 0..25 {
                if at == avoid {
                    continue;
                }
                let (ai, vi) = (g.multi_index(at), g.multi_index(avoid));
                let Some(s) = stencil(&g, &[1, 1], &ai, &vi) else {
                    missing += 1;
                    continue;
                };
                assert!(s.iter().all(|&(p, _)| p != avoid));
                let v: f64 = s.iter().map(|&(p, w)| w * f(&g.point(p))[0]).sum();
                assert!((v - 1.0).abs() < 1e-12);
                let Some(s) = stencil(&g, &[2, 0], &ai, &vi) else {
                    missing += 1;
                    continue;
                };
                let v: f64 = s.iter().map(|&(p, w)| w * f(&g.point(p))[1]).sum();
                assert!((v - 2.0).abs() < 1e-12);
            }
        }
        assert!(missing < 60, "{missing}");
    }
}
