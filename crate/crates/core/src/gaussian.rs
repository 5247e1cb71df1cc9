//! Monte Carlo realization of the gaussian functor `h ↦ W(h)` on finitely
//! many vectors, and the identities and ratios built on it.
//!
//! Samples are keyed by `(seed, trial, row)`: each row draws from its own
//! ChaCha8 block range, so any row can be regenerated independently and
//! parallel aggregation is deterministic.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::family::{norm, VectorFamily};
use crate::linalg::{conjugate_exponent, hermitian_eigen, schatten_norm, tol_psd, ComplexMatrix};
use crate::vector_valued::{RcNorm, VectorValuedElement};

/// Rows per parallel work unit.
const CHUNK: usize = 4096;

/// Default sample counts for suite runs and identity calibration.
pub const N_SUITE: usize = 100_000;
pub const N_CALIBRATION: usize = 1_000_000;

/// `γ_p = (E|g|^p)^{1/p} = (2^{p/2} Γ((p+1)/2) / √π)^{1/p}`.
pub fn gamma_p(p: f64) -> f64 {
    (2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / std::f64::consts::PI.sqrt()).powf(1.0 / p)
}

#[derive(Clone, Debug)]
pub struct GaussianSampler {
    /// `n × r` real factor `F` with `F Fᵀ` the real Gram; `W(u_j) = (F g)_j`.
    factor: DMatrix<f64>,
    seed: u64,
}

impl GaussianSampler {
    /// Uses the real coordinates of the family as the factor, embedding
    /// complex families as real vectors of twice the dimension first.
    pub fn new(family: &VectorFamily, seed: u64) -> Self {
        let fam = if family.is_real() {
            family.clone()
        } else {
            family.complexify_real_embedding()
        };
        let factor = DMatrix::from_fn(fam.len(), fam.dim(), |j, c| fam.vector(j)[c].re);
        Self { factor, seed }
    }

    /// Factor of an explicit real Gram matrix through its symmetric
    /// eigendecomposition; rank-deficient Grams are allowed.
    pub fn from_gram(gram: &ComplexMatrix, seed: u64) -> Result<Self> {
        if !gram.is_real() {
            return Err(Error::Factorization("Gram matrix must be real".into()));
        }
        let (values, vectors) = hermitian_eigen(gram)?;
        let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let tol = tol_psd(scale);
        if !gram.is_hermitian(tol) {
            return Err(Error::Factorization("Gram matrix is not symmetric".into()));
        }
        if let Some(&min) = values.first() {
            if min < -tol {
                return Err(Error::Factorization(format!(
                    "Gram matrix has eigenvalue {min:e} below -{tol:e}"
                )));
            }
        }
        let n = values.len();
        let factor = DMatrix::from_fn(n, n, |j, c| vectors[(j, c)].re * values[c].max(0.0).sqrt());
        Ok(Self { factor, seed })
    }

    pub fn len(&self) -> usize {
        self.factor.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.factor.nrows() == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn row_rng(&self, trial: u64, row: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng.set_word_pos(u128::from(row) << 32);
        rng
    }

    /// `(W(u_1), …, W(u_n))` for one sample.
    pub fn sample_row(&self, trial: u64, row: u64) -> Vec<f64> {
        let mut rng = self.row_rng(trial, row);
        let g: Vec<f64> = (0..self.factor.ncols()).map(|_| rng.sample(StandardNormal)).collect();
        (0..self.len())
            .map(|j| self.factor.row(j).iter().zip(&g).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `count × n` matrix of samples.
    pub fn sample_field(&self, trial: u64, count: usize) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = (0..count as u64)
            .into_par_iter()
            .map(|r| self.sample_row(trial, r))
            .collect();
        DMatrix::from_fn(count, self.len(), |r, j| rows[r][j])
    }

    /// Sums `stat(row)` componentwise over `count` rows, in a fixed order.
    fn accumulate<const K: usize>(
        &self,
        trial: u64,
        count: usize,
        stat: impl Fn(&[f64]) -> [f64; K] + Sync,
    ) -> [f64; K] {
        let chunks = count.div_ceil(CHUNK);
        let partial: Vec<[f64; K]> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = [0.0; K];
                for r in c * CHUNK..((c + 1) * CHUNK).min(count) {
                    let s = stat(&self.sample_row(trial, r as u64));
                    for (a, v) in acc.iter_mut().zip(s) {
                        *a += v;
                    }
                }
                acc
            })
            .collect();
        partial.into_iter().fold([0.0; K], |mut acc, s| {
            for (a, v) in acc.iter_mut().zip(s) {
                *a += v;
            }
            acc
        })
    }
}

/// Monte Carlo estimate with its standard error and reference value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub target: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn interval(&self, sigmas: f64) -> (f64, f64) {
        (self.value - sigmas * self.std_err, self.value + sigmas * self.std_err)
    }

    /// Whether the target lies in the `sigmas`-wide interval. A zero
    /// standard error only accepts an exact match up to rounding.
    pub fn covers(&self, sigmas: f64) -> bool {
        (self.value - self.target).abs() <= sigmas * self.std_err + 1e-12
    }
}

fn mean_and_err(sum: f64, sum_sq: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    (mean, (var / nf).sqrt())
}

fn check_count(count: usize) -> Result<()> {
    if count < 2 {
        return Err(Error::Precondition("at least two samples are needed".into()));
    }
    Ok(())
}

/// `E sgn(W(u_j)) sgn(W(u_k))` against `(2/π) arcsin⟨u_j, u_k⟩`.
pub fn sgn_covariance(
    sampler: &GaussianSampler,
    family: &VectorFamily,
    j: usize,
    k: usize,
    trial: u64,
    count: usize,
) -> Result<McEstimate> {
    check_count(count)?;
    check_indices(sampler, family, &[j, k])?;
    for i in [j, k] {
        if (norm(family.vector(i)) - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!("u_{i} is not a unit vector")));
        }
    }
    let [s, s2] = sampler.accumulate(trial, count, |w| {
        let v = sgn_f(w[j]) * sgn_f(w[k]);
        [v, v * v]
    });
    let (value, std_err) = mean_and_err(s, s2, count);
    let ip = real_inner(family, j, k).clamp(-1.0, 1.0);
    Ok(McEstimate {
        value,
        std_err,
        target: 2.0 / std::f64::consts::PI * ip.asin(),
        samples: count,
    })
}

/// Regression coefficient of `sgn(W(u_j) − W(u_k))` on
/// `W(u_j − u_k)/‖u_j − u_k‖`, against `√(2/π)`.
pub fn projection_coefficient(
    sampler: &GaussianSampler,
    family: &VectorFamily,
    j: usize,
    k: usize,
    trial: u64,
    count: usize,
) -> Result<McEstimate> {
    check_count(count)?;
    check_indices(sampler, family, &[j, k])?;
    if family.coincide(j, k) {
        return Err(Error::Precondition(format!("u_{j} = u_{k}: no regressor")));
    }
    let len = real_diff_norm(family, j, k);
    let [sxy, sxx, sxy2, sxyxx, sxx2] = sampler.accumulate(trial, count, |w| {
        let x = (w[j] - w[k]) / len;
        let y = sgn_f(w[j] - w[k]);
        let xy = x * y;
        let xx = x * x;
        [xy, xx, xy * xy, xy * xx, xx * xx]
    });
    let nf = count as f64;
    let beta = sxy / sxx;
    // Delta method: Var(β̂) ≈ Var(XY − β X²) / (N (E X²)²).
    let m_xx = sxx / nf;
    let resid = (sxy2 - 2.0 * beta * sxyxx + beta * beta * sxx2) / nf;
    let std_err = (resid.max(0.0) / nf).sqrt() / m_xx;
    Ok(McEstimate {
        value: beta,
        std_err,
        target: (2.0 / std::f64::consts::PI).sqrt(),
        samples: count,
    })
}

fn sgn_f(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn check_indices(sampler: &GaussianSampler, family: &VectorFamily, idx: &[usize]) -> Result<()> {
    if sampler.len() != family.len() {
        return Err(Error::Dimension("sampler and family sizes differ".into()));
    }
    if let Some(&i) = idx.iter().find(|&&i| i >= family.len()) {
        return Err(Error::Dimension(format!("index {i} out of range")));
    }
    Ok(())
}

/// `Re⟨u_j, u_k⟩`, the inner product of the underlying real space.
fn real_inner(family: &VectorFamily, j: usize, k: usize) -> f64 {
    crate::family::inner(family.vector(j), family.vector(k)).re
}

fn real_diff_norm(family: &VectorFamily, j: usize, k: usize) -> f64 {
    norm(&(family.vector(j) - family.vector(k)))
}

#[derive(Clone, Debug, Serialize)]
pub struct KhintchineReport {
    pub p: f64,
    /// `(E ‖Σ_k W(u_k) x_k‖_p^p)^{1/p}`.
    pub numerator: f64,
    pub numerator_err: f64,
    pub rc: RcNorm,
    pub ratio: f64,
    pub ratio_err: f64,
    pub gamma_p: f64,
    pub samples: usize,
}

impl KhintchineReport {
    /// Whether `ratio ∈ [1/a, b√p]`.
    pub fn within(&self, a: f64, b: f64) -> bool {
        self.ratio >= 1.0 / a && self.ratio <= b * self.p.sqrt()
    }
}

/// Gaussian average of `Σ_k x_k ⊗ W(u_k)` in `L_p` against the `RC_p` norm of
/// `Σ_k x_k ⊗ u_k`. Complex families are embedded as real vectors.
pub fn khintchine_ratio(
    xs: &[ComplexMatrix],
    family: &VectorFamily,
    p: f64,
    sampler: &GaussianSampler,
    trial: u64,
    count: usize,
) -> Result<KhintchineReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    check_count(count)?;
    if xs.len() != family.len() || sampler.len() != family.len() {
        return Err(Error::Dimension("one coefficient per family vector is required".into()));
    }
    let fam = if family.is_real() {
        family.clone()
    } else {
        family.complexify_real_embedding()
    };
    let terms: Vec<(ComplexMatrix, crate::family::CVector)> =
        xs.iter().cloned().zip(fam.vectors().iter().cloned()).collect();
    let rc = VectorValuedElement::from_simple_tensors(&terms)?.rc_norm(p)?;
    let (rows, cols) = xs[0].shape();
    let [s, s2] = sampler.accumulate(trial, count, |w| {
        let mut acc = DMatrix::<Complex64>::zeros(rows, cols);
        for (x, &wk) in xs.iter().zip(w) {
            acc += x.as_dmatrix() * Complex64::new(wk, 0.0);
        }
        let v = schatten_norm(&ComplexMatrix::from_dmatrix(acc), p)
            .expect("valid exponent")
            .powf(p);
        [v, v * v]
    });
    let (m, m_err) = mean_and_err(s, s2, count);
    let numerator = m.powf(1.0 / p);
    let numerator_err = if m > 0.0 { numerator / (p * m) * m_err } else { 0.0 };
    let (ratio, ratio_err) = if rc.value > 0.0 {
        (numerator / rc.value, numerator_err / rc.value)
    } else {
        (0.0, 0.0)
    };
    Ok(KhintchineReport {
        p,
        numerator,
        numerator_err,
        rc,
        ratio,
        ratio_err,
        gamma_p: gamma_p(p),
        samples: count,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SignMultiplierReport {
    pub p: f64,
    /// `(E ‖(sgn(f_j − f_k) x_{jk})‖_p^p)^{1/p}`.
    pub mean_norm: f64,
    pub norm_x: f64,
    pub ratio: f64,
    /// `C_p = max{p, p'}`.
    pub c_p: f64,
}

impl SignMultiplierReport {
    pub fn within(&self, k: f64) -> bool {
        let c = k * self.c_p;
        self.ratio >= 1.0 / c && self.ratio <= c
    }
}

/// Sign multipliers `sgn(W(u_j) − W(u_k))` applied to `x`, averaged in `L_p`.
pub fn sign_multiplier_check(
    family: &VectorFamily,
    x: &ComplexMatrix,
    p: f64,
    sampler: &GaussianSampler,
    trial: u64,
    count: usize,
) -> Result<SignMultiplierReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    check_count(count)?;
    let n = family.len();
    if x.shape() != (n, n) || sampler.len() != n {
        return Err(Error::Dimension("matrix, family and sampler sizes differ".into()));
    }
    let norm_x = schatten_norm(x, p)?;
    let [s] = sampler.accumulate(trial, count, |w| {
        let m = ComplexMatrix::from_fn(n, n, |j, k| {
            let s = if w[j] == w[k] {
                1.0
            } else {
                sgn_f(w[j] - w[k])
            };
            x.get(j, k) * s
        });
        [schatten_norm(&m, p).expect("valid exponent").powf(p)]
    });
    let mean_norm = (s / count as f64).powf(1.0 / p);
    Ok(SignMultiplierReport {
        p,
        mean_norm,
        norm_x,
        ratio: if norm_x > 0.0 { mean_norm / norm_x } else { 1.0 },
        c_p: p.max(conjugate_exponent(p)),
    })
}
