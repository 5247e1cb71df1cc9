//! Dense complex linear algebra: singular values, PSD square roots,
//! Schatten `p`-norms and trace duality.
//!
//! Exponents are plain `f64`. `f64::INFINITY` is the operator norm and is
//! handled as its own branch, never as a limit of finite `p`.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Relative tolerance of singular value reconstructions (against `‖A‖_∞`).
pub const TOL_SVD: f64 = 1e-10;

/// Absolute slack for PSD tests: `TOL_PSD_REL · (1 + ‖A‖_∞)`.
pub const TOL_PSD_REL: f64 = 1e-8;

/// `TOL_PSD_REL · (1 + scale)`.
pub fn tol_psd(scale: f64) -> f64 {
    TOL_PSD_REL * (1.0 + scale)
}

/// Validates `p ∈ [1, ∞]`.
pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Hölder conjugate `p' = p / (p - 1)`, with `1' = ∞` and `∞' = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Dense complex matrix. Storage is column-major internally; the row-major
/// constructors and accessors are the public layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Matrix unit `e_{jk}` in an `rows × cols` matrix.
    pub fn unit(rows: usize, cols: usize, j: usize, k: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.0[(j, k)] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self(DMatrix::from_fn(rows, cols, |i, j| Complex64::new(f(i, j), 0.0)))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.0[(i, j)] = z;
    }

    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn map(&self, f: impl FnMut(Complex64) -> Complex64) -> Self {
        Self(self.0.map(f))
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(shape_error("hadamard", self, other));
        }
        Ok(Self(self.0.component_mul(&other.0)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(shape_error("product", self, other));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diagonal().iter().sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Entries with both components real (imaginary part exactly zero).
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }
}

fn shape_error(op: &str, a: &ComplexMatrix, b: &ComplexMatrix) -> Error {
    Error::Dimension(format!(
        "{op}: {}x{} vs {}x{}",
        a.rows(),
        a.cols(),
        b.rows(),
        b.cols()
    ))
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Serialized as `{rows, cols, entries: [[re, im], ...]}` in row-major order.
#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixDoc {
            rows: self.rows(),
            cols: self.cols(),
            entries: self.to_row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(d)?;
        let entries = doc.entries.iter().map(|e| Complex64::new(e[0], e[1])).collect();
        ComplexMatrix::from_row_major(doc.rows, doc.cols, entries).map_err(serde::de::Error::custom)
    }
}

/// Singular values in nonincreasing order with the matching singular vectors,
/// `A = U · diag(σ) · V*`.
#[derive(Clone, Debug)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    /// `m × r` left singular vectors.
    pub u: DMatrix<Complex64>,
    /// `n × r` right singular vectors (columns of `V`, not `V*`).
    pub v: DMatrix<Complex64>,
}

impl SingularSpectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let sigma = DMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&s| Complex64::new(s, 0.0)),
        ));
        ComplexMatrix(&self.u * sigma * self.v.adjoint())
    }
}

fn all_finite(d: &SVD<Complex64, Dyn, Dyn>) -> bool {
    let ok = |m: &Option<DMatrix<Complex64>>| m.as_ref().map_or(true, |m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    d.singular_values.iter().all(|s| s.is_finite()) && ok(&d.u) && ok(&d.v_t)
}

// nalgebra occasionally reports convergence on a factorization that does not
// reproduce its input (residuals near 1e-3 on nearly rank-one matrices), so
// every result is checked before use: the residual when vectors exist, the
// Frobenius identity `Σ σ² = ‖A‖_F²` otherwise.
fn accurate(m: &DMatrix<Complex64>, d: &SVD<Complex64, Dyn, Dyn>) -> bool {
    if !all_finite(d) {
        return false;
    }
    let frob = m.norm();
    let tol = 256.0 * f64::EPSILON * m.nrows().max(m.ncols()) as f64;
    match (&d.u, &d.v_t) {
        (Some(u), Some(v_t)) => {
            let sigma = DMatrix::from_diagonal(&d.singular_values.map(|s| Complex64::new(s, 0.0)));
            (u * sigma * v_t - m).norm() <= tol * frob
        }
        _ => {
            let sq: f64 = d.singular_values.iter().map(|s| s * s).sum();
            (sq - frob * frob).abs() <= tol * frob * frob
        }
    }
}

fn capped(m: DMatrix<Complex64>, vectors: bool, eps: f64, cap: usize) -> Option<SVD<Complex64, Dyn, Dyn>> {
    SVD::try_new(m, vectors, vectors, eps, cap)
}

/// SVD of `m` computed from `m*`.
fn via_adjoint(m: &DMatrix<Complex64>, vectors: bool) -> Option<SVD<Complex64, Dyn, Dyn>> {
    let d = capped(m.adjoint(), vectors, 4.0 * f64::EPSILON, 100_000)?;
    Some(SVD {
        u: d.v_t.map(|v| v.adjoint()),
        v_t: d.u.map(|u| u.adjoint()),
        singular_values: d.singular_values,
    })
}

/// One-sided complex Jacobi SVD. Slow but very accurate; last resort.
fn jacobi(m: &DMatrix<Complex64>) -> SVD<Complex64, Dyn, Dyn> {
    if m.nrows() < m.ncols() {
        let d = jacobi(&m.adjoint());
        return SVD {
            u: d.v_t.map(|v| v.adjoint()),
            v_t: d.u.map(|u| u.adjoint()),
            singular_values: d.singular_values,
        };
    }
    let (rows, n) = m.shape();
    let mut b = m.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    for _ in 0..100 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = b.column(i).norm_squared();
                let beta = b.column(j).norm_squared();
                let gamma = b.column(i).dotc(&b.column(j));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut b, &mut v] {
                    for r in 0..mat.nrows() {
                        let x = mat[(r, i)];
                        let y = mat[(r, j)] * phase;
                        mat[(r, i)] = x * c - y * s;
                        mat[(r, j)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let values = DVector::from_iterator(n, b.column_iter().map(|c| c.norm()));
    let mut u = DMatrix::<Complex64>::zeros(rows, n);
    let top = values.max();
    for k in 0..n {
        if values[k] > top * f64::EPSILON * n as f64 && values[k] > 0.0 {
            u.set_column(k, &(b.column(k) / Complex64::new(values[k], 0.0)));
        }
    }
    // Complete null directions so `u` keeps orthonormal columns.
    let mut basis = 0;
    for k in 0..n {
        if u.column(k).norm() > 0.0 {
            continue;
        }
        while basis < rows {
            let mut e = DVector::<Complex64>::zeros(rows);
            e[basis] = Complex64::new(1.0, 0.0);
            basis += 1;
            for c in 0..n {
                let proj = u.column(c).dotc(&e);
                e -= u.column(c) * proj;
            }
            let norm = e.norm();
            if norm > 0.5 {
                u.set_column(k, &(e / Complex64::new(norm, 0.0)));
                break;
            }
        }
    }
    SVD { u: Some(u), v_t: Some(v.adjoint()), singular_values: values }
}

/// Iteration-capped, validated SVD. `SVD::new` runs without a cap and can
/// spin forever on some inputs. Entries around 1e-160 underflow when squared
/// inside the Householder steps and leave NaN singular vectors, so retries
/// work on the matrix rescaled to unit max entry with entries below 1e-150
/// flushed to zero. Retries go through the adjoint and then one-sided Jacobi.
fn decompose(m: &DMatrix<Complex64>, vectors: bool) -> SVD<Complex64, Dyn, Dyn> {
    if let Some(d) = capped(m.clone(), vectors, f64::EPSILON, 10_000).filter(|d| accurate(m, d)) {
        return d;
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(scale.is_finite(), "SVD of a matrix with non-finite entries");
    if scale == 0.0 {
        return jacobi(m);
    }
    let cleaned = m.map(|z| {
        let w = z / scale;
        if w.norm() < 1e-150 {
            Complex64::new(0.0, 0.0)
        } else {
            w
        }
    });
    let mut d = capped(cleaned.clone(), vectors, 4.0 * f64::EPSILON, 100_000)
        .filter(|d| accurate(&cleaned, d))
        .or_else(|| via_adjoint(&cleaned, vectors).filter(|d| accurate(&cleaned, d)))
        .unwrap_or_else(|| jacobi(&cleaned));
    d.singular_values *= scale;
    d
}

/// Full thin SVD, sorted.
pub fn svd(a: &ComplexMatrix) -> SingularSpectrum {
    let (m, n) = a.shape();
    let r = m.min(n);
    if r == 0 {
        return SingularSpectrum {
            values: Vec::new(),
            u: DMatrix::zeros(m, 0),
            v: DMatrix::zeros(n, 0),
        };
    }
    let dec = decompose(&a.0, true);
    let u = dec.u.expect("u requested");
    let v_t = dec.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));
    let values = order.iter().map(|&i| dec.singular_values[i].max(0.0)).collect();
    let u = DMatrix::from_fn(m, r, |i, c| u[(i, order[c])]);
    let v = DMatrix::from_fn(n, r, |i, c| v_t[(order[c], i)].conj());
    SingularSpectrum { values, u, v }
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = decompose(&a.0, false)
        .singular_values
        .iter()
        .map(|s| s.max(0.0))
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `ℓ_p` norm of a nonnegative sequence, scaled to avoid overflow.
pub fn lp_norm(values: &[f64], p: f64) -> f64 {
    let top = values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    if p == 1.0 {
        return values.iter().sum();
    }
    if p == 2.0 {
        return values.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    top * values.iter().map(|v| (v / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Schatten `p`-norm `(Σ σ_i^p)^{1/p}`; `p = ∞` gives the largest singular value.
pub fn schatten_norm(a: &ComplexMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p == 2.0 {
        return Ok(a.frobenius());
    }
    Ok(lp_norm(&singular_values(a), p))
}

/// Operator norm `‖A‖_∞`.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Eigen-decomposition of the Hermitian part `(A + A*)/2`: ascending real
/// eigenvalues and unitary eigenvector matrix.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "hermitian eigenproblem needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let h = (&a.0 + a.0.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Factorization("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok((values, vectors))
}

/// Applies a real function to the spectrum of a Hermitian matrix given as
/// `(eigenvalues, eigenvectors)`.
pub fn spectral_apply(
    values: &[f64],
    vectors: &DMatrix<Complex64>,
    mut f: impl FnMut(f64) -> f64,
) -> ComplexMatrix {
    let n = values.len();
    let scaled = DMatrix::from_fn(n, n, |i, c| vectors[(i, c)] * f(values[c]));
    ComplexMatrix(scaled * vectors.adjoint())
}

/// Positive square root of a Hermitian PSD matrix. Eigenvalues in
/// `[-tol_psd, 0)` are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(a)?;
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tol = tol_psd(scale);
    if !a.is_hermitian(tol) {
        return Err(Error::Precondition("psd_sqrt: matrix is not Hermitian".into()));
    }
    if let Some(&min) = values.first() {
        if min < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                tolerance: tol,
            });
        }
    }
    Ok(spectral_apply(&values, &vectors, |l| l.max(0.0).sqrt()))
}

/// Schatten `p`-norm of `G^{1/2}` straight from the spectrum of a PSD `G`:
/// the singular values of `G^{1/2}` are the square roots of its eigenvalues.
pub fn psd_root_norm(g: &ComplexMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let (values, _) = hermitian_eigen(g)?;
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tol = tol_psd(scale);
    if let Some(&min) = values.first() {
        if min < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                tolerance: tol,
            });
        }
    }
    let sigma: Vec<f64> = values.iter().map(|l| l.max(0.0).sqrt()).collect();
    Ok(lp_norm(&sigma, p))
}

/// `tr(AB)` for `A` of shape `m × n` and `B` of shape `n × m`.
pub fn trace_pairing(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.cols() != b.rows() || a.rows() != b.cols() {
        return Err(shape_error("trace pairing", a, b));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            acc += a.0[(i, k)] * b.0[(k, i)];
        }
    }
    Ok(acc)
}

/// Norming element of the dual class: returns `D` with `‖D‖_{p'} = 1` and
/// `tr(D* A) = ‖A‖_p`. At `p = ∞` the top singular subspace is averaged,
/// at `p = 1` the partial isometry on the support of `A` is used.
/// Returns the zero matrix when `A = 0`.
pub fn dual_norming(a: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    Ok(norming_pair(a, p)?.1)
}

/// `(‖A‖_p, D)` with `D` as in [`dual_norming`], from a single SVD.
pub fn norming_pair(a: &ComplexMatrix, p: f64) -> Result<(f64, ComplexMatrix)> {
    check_exponent(p)?;
    if p == 2.0 {
        let f = a.frobenius();
        if f == 0.0 {
            return Ok((0.0, ComplexMatrix::zeros(a.rows(), a.cols())));
        }
        return Ok((f, a.scale(Complex64::new(1.0 / f, 0.0))));
    }
    let spec = svd(a);
    let top = spec.values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok((0.0, ComplexMatrix::zeros(a.rows(), a.cols())));
    }
    let norm = lp_norm(&spec.values, p);
    let weights: Vec<f64> = if p.is_infinite() {
        let cutoff = top * (1.0 - 1e-12);
        let count = spec.values.iter().filter(|&&s| s >= cutoff).count() as f64;
        spec.values
            .iter()
            .map(|&s| if s >= cutoff { 1.0 / count } else { 0.0 })
            .collect()
    } else if p == 1.0 {
        let cutoff = top * TOL_SVD;
        spec.values
            .iter()
            .map(|&s| if s > cutoff { 1.0 } else { 0.0 })
            .collect()
    } else {
        spec.values.iter().map(|&s| (s / norm).powf(p - 1.0)).collect()
    };
    let r = spec.values.len();
    let uw = DMatrix::from_fn(a.rows(), r, |i, c| spec.u[(i, c)] * weights[c]);
    Ok((norm, ComplexMatrix(uw * spec.v.adjoint())))
}

/// Matrix with i.i.d. standard complex gaussian entries (`E|z|² = 1`).
pub fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary via QR of a gaussian matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex(n, n, rng);
    let qr = g.0.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    ComplexMatrix(q * phases)
}
