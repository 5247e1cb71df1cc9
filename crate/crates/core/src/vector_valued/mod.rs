//! Elements `Σ_{j,k} x_{jk} e_{jk} ⊗ v_{jk}` of `S_p^n ⊗ C^d` and their
//! column, row and `RC_p` norms.
//!
//! Internally an element is the tensor `Z[j,k,·] = x_{jk} v_{jk}` stored as
//! `d` slices `Z_a` of size `n × n`. The Gram contractions are
//!
//! ```text
//! column:  G = Σ_a Z_a* Z_a      (G(k,k') = Σ_j ⟨v_{jk}, v_{jk'}⟩ conj(x_{jk}) x_{jk'})
//! row:     H = Σ_a Z_a Z_a*      (H(j,j') = Σ_k ⟨J v_{j'k}, J v_{jk}⟩ x_{jk} conj(x_{j'k}))
//! ```
//!
//! and the norms are `‖G^{1/2}‖_p` and `‖H^{1/2}‖_p`. The row Gram pairs the
//! vectors through the conjugation `J`, so that `x ⊗ u` in `C_p` corresponds
//! to `x ⊗ conj(J u)` in `R_p`.

mod splitting;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::{CVector, Conjugation};
use crate::linalg::{check_exponent, operator_norm, psd_sqrt, schatten_norm, ComplexMatrix};

pub use splitting::{SplitOptions, GAP_TOL};

/// Slack allowed on `‖Λ‖ ≤ 1` for contraction arguments.
pub const TOL_CONTRACTION: f64 = 1e-9;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct VectorValuedElement {
    n: usize,
    dim: usize,
    scalars: ComplexMatrix,
    /// `v_{jk}` at index `j * n + k`.
    vectors: Vec<CVector>,
}

/// Outcome of an `RC_p` norm evaluation. For `p ≥ 2` the value is exact and
/// `lower == value`; for `p < 2` `value` is the best splitting found and
/// `lower` a duality certificate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RcNorm {
    pub value: f64,
    pub lower: f64,
    pub certified: bool,
    pub iterations: usize,
}

impl RcNorm {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            lower: value,
            certified: true,
            iterations: 0,
        }
    }

    pub fn relative_gap(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            (self.value - self.lower) / self.value
        }
    }
}

impl VectorValuedElement {
    pub fn new(scalars: ComplexMatrix, dim: usize, vectors: Vec<CVector>) -> Result<Self> {
        if !scalars.is_square() {
            return Err(Error::Dimension(format!(
                "scalar part must be square, got {}x{}",
                scalars.rows(),
                scalars.cols()
            )));
        }
        let n = scalars.rows();
        if vectors.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} vectors, got {}",
                n * n,
                vectors.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::Dimension(format!(
                "vector of length {} in dimension {dim}",
                v.len()
            )));
        }
        Ok(Self {
            n,
            dim,
            scalars,
            vectors,
        })
    }

    pub fn from_fn(
        n: usize,
        dim: usize,
        mut f: impl FnMut(usize, usize) -> (Complex64, CVector),
    ) -> Result<Self> {
        let mut scalars = ComplexMatrix::zeros(n, n);
        let mut vectors = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                let (x, v) = f(j, k);
                scalars.set(j, k, x);
                vectors.push(v);
            }
        }
        Self::new(scalars, dim, vectors)
    }

    /// Element with entries `Z[j,k] ∈ C^d` given directly (scalar part 1 on
    /// nonzero entries).
    pub fn from_entries(n: usize, dim: usize, mut entry: impl FnMut(usize, usize) -> CVector) -> Result<Self> {
        Self::from_fn(n, dim, |j, k| {
            let v = entry(j, k);
            if v.iter().all(|z| *z == ZERO) {
                (ZERO, CVector::zeros(v.len()))
            } else {
                (Complex64::new(1.0, 0.0), v)
            }
        })
    }

    /// `Σ_t x_t ⊗ u_t` for square matrices `x_t` and vectors `u_t`.
    pub fn from_simple_tensors(terms: &[(ComplexMatrix, CVector)]) -> Result<Self> {
        let (first, u0) = terms
            .first()
            .ok_or_else(|| Error::Precondition("no terms".into()))?;
        let n = first.rows();
        let dim = u0.len();
        for (x, u) in terms {
            if x.shape() != (n, n) || u.len() != dim {
                return Err(Error::Dimension("simple tensors of mixed shapes".into()));
            }
        }
        Self::from_entries(n, dim, |j, k| {
            let mut acc = CVector::zeros(dim);
            for (x, u) in terms {
                acc += u * x.get(j, k);
            }
            acc
        })
    }

    pub fn zero(n: usize, dim: usize) -> Self {
        Self {
            n,
            dim,
            scalars: ComplexMatrix::zeros(n, n),
            vectors: vec![CVector::zeros(dim); n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scalars(&self) -> &ComplexMatrix {
        &self.scalars
    }

    pub fn vector(&self, j: usize, k: usize) -> &CVector {
        &self.vectors[j * self.n + k]
    }

    /// `x_{jk} v_{jk}`.
    pub fn entry(&self, j: usize, k: usize) -> CVector {
        self.vector(j, k) * self.scalars.get(j, k)
    }

    pub fn is_zero(&self) -> bool {
        (0..self.n).all(|j| {
            (0..self.n).all(|k| {
                let x = self.scalars.get(j, k);
                x == ZERO || self.vector(j, k).iter().all(|z| *z == ZERO)
            })
        })
    }

    /// The `d` slices `Z_a(j,k) = x_{jk} v_{jk}[a]`.
    pub(crate) fn slices(&self) -> Vec<DMatrix<Complex64>> {
        let n = self.n;
        (0..self.dim)
            .map(|a| {
                DMatrix::from_fn(n, n, |j, k| self.scalars.get(j, k) * self.vectors[j * n + k][a])
            })
            .collect()
    }

    /// Column Gram contraction `Σ_a Z_a* Z_a`.
    pub fn column_gram(&self) -> ComplexMatrix {
        column_gram_of(&self.slices(), self.n)
    }

    /// Row Gram contraction `Σ_a Z_a Z_a*`.
    pub fn row_gram(&self) -> ComplexMatrix {
        row_gram_of(&self.slices(), self.n)
    }

    pub fn column_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        schatten_norm(&psd_sqrt(&self.column_gram())?, p)
    }

    pub fn row_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        schatten_norm(&psd_sqrt(&self.row_gram())?, p)
    }

    /// `RC_p` norm for `1 < p < ∞` with the default solver options.
    pub fn rc_norm(&self, p: f64) -> Result<RcNorm> {
        self.rc_norm_with(p, &SplitOptions::default())
    }

    pub fn rc_norm_with(&self, p: f64, opts: &SplitOptions) -> Result<RcNorm> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponent(p));
        }
        if p >= 2.0 {
            let v = self.column_norm(p)?.max(self.row_norm(p)?);
            return Ok(RcNorm::exact(v));
        }
        splitting::sum_space_norm(&self.slices(), self.n, p, opts)
    }

    /// Adjoint element: scalars conjugate-transposed, vectors sent through `J`.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let j_op = Conjugation;
        let mut vectors = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                vectors.push(j_op.apply(self.vector(k, j)));
            }
        }
        Self {
            n,
            dim: self.dim,
            scalars: self.scalars.adjoint(),
            vectors,
        }
    }

    /// `v_{jk} ↦ Λ v_{jk}` with scalars fixed.
    pub fn apply_contraction(&self, op: &ComplexMatrix) -> Result<Self> {
        if op.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "operator has {} columns, element dimension is {}",
                op.cols(),
                self.dim
            )));
        }
        let m = op.as_dmatrix();
        Ok(Self {
            n: self.n,
            dim: op.rows(),
            scalars: self.scalars.clone(),
            vectors: self.vectors.iter().map(|v| m * v).collect(),
        })
    }

    /// `v_{jk} ↦ Λ_j v_{jk}`, one contraction per row index.
    pub fn row_contraction_per_index(&self, ops: &[ComplexMatrix]) -> Result<Self> {
        self.per_index(ops, |j, _| j)
    }

    /// `v_{jk} ↦ Λ_k v_{jk}`, one contraction per column index.
    pub fn column_contraction_per_index(&self, ops: &[ComplexMatrix]) -> Result<Self> {
        self.per_index(ops, |_, k| k)
    }

    fn per_index(&self, ops: &[ComplexMatrix], pick: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if ops.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} contractions for {} indices",
                ops.len(),
                self.n
            )));
        }
        for op in ops {
            if op.shape() != (self.dim, self.dim) {
                return Err(Error::Dimension("contraction of wrong shape".into()));
            }
            let norm = operator_norm(op);
            if norm > 1.0 + TOL_CONTRACTION {
                return Err(Error::NotContraction {
                    norm,
                    tolerance: TOL_CONTRACTION,
                });
            }
        }
        let n = self.n;
        let mut vectors = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                vectors.push(ops[pick(j, k)].as_dmatrix() * self.vector(j, k));
            }
        }
        Ok(Self {
            n,
            dim: self.dim,
            scalars: self.scalars.clone(),
            vectors,
        })
    }

    /// Stacked column embedding: the `nd × n` matrix `T` with
    /// `T[j·d + a, k] = x_{jk} v_{jk}[a]`. `T*T` is the column Gram.
    pub fn column_embedding(&self) -> ComplexMatrix {
        let (n, d) = (self.n, self.dim);
        ComplexMatrix::from_fn(n * d, n, |r, k| {
            let (j, a) = (r / d, r % d);
            self.scalars.get(j, k) * self.vector(j, k)[a]
        })
    }

    /// Stacked row embedding: the `n × nd` matrix `S` with
    /// `S[j, k·d + a] = x_{jk} v_{jk}[a]`. `SS*` is the row Gram.
    pub fn row_embedding(&self) -> ComplexMatrix {
        let (n, d) = (self.n, self.dim);
        ComplexMatrix::from_fn(n, n * d, |j, c| {
            let (k, a) = (c / d, c % d);
            self.scalars.get(j, k) * self.vector(j, k)[a]
        })
    }
}

pub(crate) fn column_gram_of(slices: &[DMatrix<Complex64>], n: usize) -> ComplexMatrix {
    let mut g = DMatrix::zeros(n, n);
    for z in slices {
        g += z.adjoint() * z;
    }
    ComplexMatrix::from_dmatrix(g)
}

pub(crate) fn row_gram_of(slices: &[DMatrix<Complex64>], n: usize) -> ComplexMatrix {
    let mut h = DMatrix::zeros(n, n);
    for z in slices {
        h += z * z.adjoint();
    }
    ComplexMatrix::from_dmatrix(h)
}

/// Bilinear `RC_p`/`RC_{p'}` bracket, on simple tensors
/// `⟨x ⊗ u, y ⊗ w⟩ = tr(xy) ⟨J w, u⟩`. For tensors this is
/// `Σ_{j,k,a} Z_ξ[j,k,a] Z_η[k,j,a]`.
pub fn duality_bracket(xi: &VectorValuedElement, eta: &VectorValuedElement) -> Result<Complex64> {
    if xi.n != eta.n || xi.dim != eta.dim {
        return Err(Error::Dimension(format!(
            "bracket of ({}, {}) and ({}, {}) elements",
            xi.n, xi.dim, eta.n, eta.dim
        )));
    }
    Ok(bracket_slices(&xi.slices(), &eta.slices()))
}

pub(crate) fn bracket_slices(z: &[DMatrix<Complex64>], y: &[DMatrix<Complex64>]) -> Complex64 {
    let mut acc = ZERO;
    for (za, ya) in z.iter().zip(y) {
        let n = za.nrows();
        for j in 0..n {
            for k in 0..n {
                acc += za[(j, k)] * ya[(k, j)];
            }
        }
    }
    acc
}
