use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::CVector;
use crate::linalg::ComplexMatrix;
use crate::schur::{Provenance, SchurSymbol};
use crate::vector_valued::VectorValuedElement;

/// `k` with `2^k ≤ r < 2^{k+1}` for `r > 0`.
pub fn dyadic_index(r: f64) -> i32 {
    let mut k = r.log2().floor() as i32;
    while 2f64.powi(k) > r {
        k -= 1;
    }
    while 2f64.powi(k + 1) <= r {
        k += 1;
    }
    k
}

/// Partition of index pairs into labelled blocks, by default the dyadic
/// annuli `Δ_k = {(x,y): 2^k ≤ |x − y|_∞ < 2^{k+1}}`.
#[derive(Clone, Debug)]
pub struct DyadicBlocks {
    n: usize,
    blocks: Vec<(i32, Vec<(usize, usize)>)>,
    owner: Vec<Option<usize>>,
}

impl DyadicBlocks {
    /// Dyadic annuli over a finite set of points in `R^m`.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        let m = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != m) {
            return Err(Error::Dimension("grid points of mixed dimension".into()));
        }
        let mut by_level: std::collections::BTreeMap<i32, Vec<(usize, usize)>> = Default::default();
        for j in 0..n {
            for k in 0..n {
                let r = points[j]
                    .iter()
                    .zip(&points[k])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if r > 0.0 {
                    by_level.entry(dyadic_index(r)).or_default().push((j, k));
                }
            }
        }
        Self::custom(n, by_level.into_iter().collect())
    }

    /// Dyadic annuli on `{0, …, n−1} ⊂ ℤ`.
    pub fn integer(n: usize) -> Self {
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        Self::from_points(&pts).expect("one-dimensional grid")
    }

    /// Arbitrary labelled blocks; they must be pairwise disjoint.
    pub fn custom(n: usize, blocks: Vec<(i32, Vec<(usize, usize)>)>) -> Result<Self> {
        let mut owner = vec![None; n * n];
        for (pos, (_, pairs)) in blocks.iter().enumerate() {
            for &(j, k) in pairs {
                if j >= n || k >= n {
                    return Err(Error::Dimension(format!("pair ({j}, {k}) outside a grid of size {n}")));
                }
                if owner[j * n + k].is_some() {
                    return Err(Error::OverlappingBlocks(j, k));
                }
                owner[j * n + k] = Some(pos);
            }
        }
        Ok(Self { n, blocks, owner })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn levels(&self) -> Vec<i32> {
        self.blocks.iter().map(|(k, _)| *k).collect()
    }

    pub fn pairs(&self, pos: usize) -> &[(usize, usize)] {
        &self.blocks[pos].1
    }

    /// Position of the block containing `(j,k)`.
    pub fn block_of(&self, j: usize, k: usize) -> Option<usize> {
        self.owner[j * self.n + k]
    }

    /// `x` restricted to block `pos`.
    pub fn restrict(&self, pos: usize, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for &(j, k) in self.pairs(pos) {
            out.set(j, k, x.get(j, k));
        }
        out
    }

    /// `x` restricted to the union of all blocks.
    pub fn restrict_to_union(&self, x: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |j, k| {
            if self.block_of(j, k).is_some() {
                x.get(j, k)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// `M(j,k) = M_n(j,k)` for `(j,k) ∈ Δ_n`, zero off the blocks. One symbol per
/// block, in block order.
pub fn assemble_from_blocks(blocks: &DyadicBlocks, symbols: &[SchurSymbol]) -> Result<SchurSymbol> {
    if symbols.len() != blocks.len() {
        return Err(Error::Dimension(format!(
            "{} symbols for {} blocks",
            symbols.len(),
            blocks.len()
        )));
    }
    let n = blocks.size();
    if let Some(s) = symbols.iter().find(|s| s.shape() != (n, n)) {
        return Err(Error::Dimension(format!(
            "block symbol of shape {:?} on a grid of size {n}",
            s.shape()
        )));
    }
    SchurSymbol::from_fn(n, n, Provenance::new("dyadic-assembly").with("blocks", blocks.len()), |j, k| {
        blocks
            .block_of(j, k)
            .map_or(Complex64::new(0.0, 0.0), |pos| symbols[pos].get(j, k))
    })
}

/// `Σ_n (x restricted to Δ_n) ⊗ δ_n` with one basis vector per block.
pub fn block_square_function(blocks: &DyadicBlocks, x: &ComplexMatrix) -> Result<VectorValuedElement> {
    let n = blocks.size();
    if x.shape() != (n, n) {
        return Err(Error::Dimension("matrix does not match the grid".into()));
    }
    let d = blocks.len().max(1);
    VectorValuedElement::from_fn(n, d, |j, k| match blocks.block_of(j, k) {
        Some(pos) => {
            let mut v = CVector::zeros(d);
            v[pos] = Complex64::new(1.0, 0.0);
            (x.get(j, k), v)
        }
        None => (Complex64::new(0.0, 0.0), CVector::zeros(d)),
    })
}
