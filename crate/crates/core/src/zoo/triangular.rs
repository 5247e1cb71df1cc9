use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::schur::{sgn, Provenance, SchurSymbol};

/// Threshold map `a: Γ → ℤ` on `Γ = {0, …, n−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularData {
    pub a: Vec<i64>,
}

impl TriangularData {
    pub fn identity(n: usize) -> Self {
        Self {
            a: (0..n as i64).collect(),
        }
    }

    /// `1[j ≥ a_k]`, the projection `(1 + M_a)/2`.
    pub fn projection(&self, j: usize, k: usize) -> f64 {
        if j as i64 >= self.a[k] {
            1.0
        } else {
            0.0
        }
    }
}

/// `M(j,k) = sgn(j − a_k)` with `sgn(0) = 1`.
pub fn triangular_symbol(data: &TriangularData) -> Result<SchurSymbol> {
    let n = data.a.len();
    SchurSymbol::from_real_fn(n, n, Provenance::new("triangular").with("n", n), |j, k| {
        sgn(j as i64 - data.a[k])
    })
}

/// Layer-cake decomposition of one row: `M(j,k) = c + Σ_t w_t 1[k ≥ t]`,
/// where `c` is the shared identity weight. Each indicator is row `j` of the
/// generalized triangular projection `1[j' ≥ a_k]` returned by
/// [`RowDecomposition::projection`].
#[derive(Clone, Debug, Serialize)]
pub struct RowDecomposition {
    pub row: usize,
    /// `(t, w_t)`; `t = 0` carries the part of the row offset not covered by
    /// the identity term.
    pub terms: Vec<(usize, f64)>,
    /// `Σ_k |M(j,k+1) − M(j,k)|`.
    pub variation: f64,
    /// `M(j,0)`.
    pub offset: f64,
}

impl RowDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|(_, w)| w.abs()).sum()
    }

    /// Thresholds making row `self.row` of `1[j ≥ a_k]` equal to `1[k ≥ t]`.
    pub fn projection(&self, n: usize, t: usize) -> TriangularData {
        let j = self.row as i64;
        TriangularData {
            a: (0..n).map(|k| if k >= t { j } else { j + 1 }).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MarcinkiewiczDecomposition {
    pub n: usize,
    /// Weight of the identity multiplier (the all-ones symbol).
    pub identity_weight: f64,
    pub rows: Vec<RowDecomposition>,
}

impl MarcinkiewiczDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::from_real_fn(n, n, |_, _| self.identity_weight);
        for r in &self.rows {
            for &(t, w) in &r.terms {
                let proj = r.projection(n, t);
                for k in 0..n {
                    let z = out.get(r.row, k);
                    out.set(r.row, k, z + w * proj.projection(r.row, k));
                }
            }
        }
        out
    }

    /// Largest per-row `|c| + Σ|w|`.
    pub fn max_weight_sum(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| self.identity_weight.abs() + r.weight_sum())
            .fold(0.0, f64::max)
    }

    /// `sup_j (Var_j + |M(j,0)|)`, the bound the weight sums obey.
    pub fn variation_bound(&self) -> f64 {
        self.rows.iter().map(|r| r.variation + r.offset.abs()).fold(0.0, f64::max)
    }

    pub fn term_count(&self) -> usize {
        self.rows.iter().map(|r| r.terms.len()).sum::<usize>() + usize::from(self.identity_weight != 0.0)
    }
}

fn real_rows(m: &SchurSymbol) -> Result<Vec<Vec<f64>>> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::Decomposition("symbol must be square".into()));
    }
    (0..rows)
        .map(|j| {
            (0..cols)
                .map(|k| {
                    let z = m.get(j, k);
                    if z.im != 0.0 {
                        Err(Error::Decomposition(format!("row {j} is not real")))
                    } else {
                        Ok(z.re)
                    }
                })
                .collect()
        })
        .collect()
}

/// Writes each row as a constant plus half-line indicators, the indicators
/// being rows of generalized triangular projections.
pub fn marcinkiewicz_decompose(m: &SchurSymbol) -> Result<MarcinkiewiczDecomposition> {
    let rows = real_rows(m)?;
    let n = rows.len();
    let first = rows.first().map_or(0.0, |r| r.first().copied().unwrap_or(0.0));
    let identity_weight = if rows.iter().all(|r| r[0] == first) { first } else { 0.0 };
    let rows = rows
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let mut terms = Vec::new();
            let residual = r[0] - identity_weight;
            if residual != 0.0 {
                terms.push((0, residual));
            }
            let mut variation = 0.0;
            for t in 1..n {
                let jump = r[t] - r[t - 1];
                variation += jump.abs();
                if jump != 0.0 {
                    terms.push((t, jump));
                }
            }
            RowDecomposition {
                row: j,
                terms,
                variation,
                offset: r[0],
            }
        })
        .collect();
    Ok(MarcinkiewiczDecomposition {
        n,
        identity_weight,
        rows,
    })
}

/// Column variant: decomposes the columns of `m` (the rows of `M_op`).
pub fn marcinkiewicz_decompose_columns(m: &SchurSymbol) -> Result<MarcinkiewiczDecomposition> {
    marcinkiewicz_decompose(&m.op())
}

/// Variation of each row over the dyadic annuli `2^k ≤ |j − k'| < 2^{k+1}`,
/// each side of the diagonal taken separately.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DyadicVariation {
    /// Largest variation over a single annulus piece.
    pub sup_annulus: f64,
    /// Largest full-row variation.
    pub sup_row: f64,
    /// Largest `|M(j,k)|`.
    pub sup_abs: f64,
}

pub fn dyadic_variation(m: &SchurSymbol) -> Result<DyadicVariation> {
    let rows = real_rows(m)?;
    let n = rows.len();
    let mut out = DyadicVariation {
        sup_annulus: 0.0,
        sup_row: 0.0,
        sup_abs: 0.0,
    };
    for (j, r) in rows.iter().enumerate() {
        let row_var: f64 = r.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        out.sup_row = out.sup_row.max(row_var);
        out.sup_abs = r.iter().fold(out.sup_abs, |a, v| a.max(v.abs()));
        let mut lo = 1usize;
        while lo < n {
            let hi = (2 * lo).min(n);
            // Right piece: k' = j + lo .. j + hi − 1; left piece mirrored.
            let right: Vec<f64> = (j + lo..j + hi).filter(|&k| k < n).map(|k| r[k]).collect();
            let left: Vec<f64> = (lo..hi).filter(|&s| s <= j).map(|s| r[j - s]).collect();
            for piece in [right, left] {
                let v: f64 = piece.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
                out.sup_annulus = out.sup_annulus.max(v);
            }
            lo *= 2;
        }
    }
    Ok(out)
}
