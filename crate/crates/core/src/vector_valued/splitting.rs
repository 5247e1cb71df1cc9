//! Sum-space norm `inf { ‖Z_c‖_{C_p} + ‖Z_r‖_{R_p} : Z = Z_c + Z_r }` for
//! `1 < p < 2`.
//!
//! The primal is minimized by iteratively reweighted least squares on the
//! ε-smoothed objective `(tr (G + ε)^{p/2})^{1/p}`. Each step majorizes both
//! terms by quadratics and solves the resulting Sylvester equation
//! `α_r W_r X + α_c X W_c = α_r W_r Z_a` exactly in the eigenbases of the
//! weights. Lower bounds come from the bracket against norming elements of
//! the two parts, normalized in `RC_{p'}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bracket_slices, column_gram_of, row_gram_of, RcNorm};
use crate::error::Result;
use crate::linalg::{dual_norming, hermitian_eigen, lp_norm, psd_root_norm, ComplexMatrix};

/// Default relative gap between the primal value and the dual certificate.
pub const GAP_TOL: f64 = 2e-2;

#[derive(Clone, Debug)]
pub struct SplitOptions {
    pub max_iter: usize,
    /// Random restarts tried after the all-column start, only while the gap
    /// is still open.
    pub restarts: usize,
    pub gap_tol: f64,
    pub seed: u64,
    /// Iterations between certificate evaluations.
    pub check_every: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            restarts: 3,
            gap_tol: GAP_TOL,
            seed: 0x5eed_5b17,
            check_every: 5,
        }
    }
}

/// A run keeps iterating past `gap_tol` until the gap drops below this
/// fraction of it.
const TIGHTEN: f64 = 0.25;

type Slices = Vec<DMatrix<Complex64>>;

struct Best {
    value: f64,
    lower: f64,
    iterations: usize,
}

impl Best {
    fn closed(&self, gap_tol: f64) -> bool {
        self.value - self.lower <= gap_tol * self.value
    }
}

pub(super) fn sum_space_norm(z: &[DMatrix<Complex64>], n: usize, p: f64, opts: &SplitOptions) -> Result<RcNorm> {
    let s2: f64 = z.iter().map(|m| m.norm_squared()).sum();
    if s2 == 0.0 || n == 0 {
        return Ok(RcNorm::exact(0.0));
    }
    let mut best = Best {
        value: f64::INFINITY,
        lower: 0.0,
        iterations: 0,
    };
    // The trivial splits are feasible and their norming elements are
    // certificate candidates.
    let zero: Slices = z.iter().map(|m| DMatrix::zeros(m.nrows(), m.ncols())).collect();
    let all_col = primal(z, &zero, n, p)?;
    let all_row = primal(&zero, z, n, p)?;
    best.value = all_col.min(all_row);
    certify(z, z, n, p, &mut best)?;
    certify(z, &zero, n, p, &mut best)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for attempt in 0..=opts.restarts {
        if best.closed(opts.gap_tol) {
            break;
        }
        let start: Slices = if attempt == 0 {
            z.to_vec()
        } else {
            z.iter()
                .map(|m| m.map(|c| c * rng.random_range(0.0..1.0)))
                .collect()
        };
        run(z, start, n, p, s2, opts, &mut best)?;
    }
    Ok(RcNorm {
        value: best.value,
        lower: best.lower.min(best.value),
        certified: best.closed(opts.gap_tol),
        iterations: best.iterations,
    })
}

fn primal(col: &[DMatrix<Complex64>], row: &[DMatrix<Complex64>], n: usize, p: f64) -> Result<f64> {
    Ok(psd_root_norm(&column_gram_of(col, n), p)? + psd_root_norm(&row_gram_of(row, n), p)?)
}

fn run(
    z: &[DMatrix<Complex64>],
    mut x: Slices,
    n: usize,
    p: f64,
    s2: f64,
    opts: &SplitOptions,
    best: &mut Best,
) -> Result<()> {
    let unit = s2 / n as f64;
    let eps_floor = 1e-13 * unit;
    let mut eps = 1e-2 * unit;
    for it in 0..opts.max_iter {
        best.iterations += 1;
        let y: Slices = z.iter().zip(&x).map(|(za, xa)| za - xa).collect();
        let (mu, q) = hermitian_eigen(&column_gram_of(&x, n))?;
        let (nu, pm) = hermitian_eigen(&row_gram_of(&y, n))?;
        let value = schatten_from_gram(&mu, p) + schatten_from_gram(&nu, p);
        if value < best.value {
            best.value = value;
        }
        if it % opts.check_every == opts.check_every - 1 || it + 1 == opts.max_iter {
            certify(z, &x, n, p, best)?;
            if best.closed(opts.gap_tol * TIGHTEN) {
                return Ok(());
            }
        }

        let (alpha_c, w_c) = weights(&mu, p, eps);
        let (alpha_r, w_r) = weights(&nu, p, eps);
        let q_adj = q.adjoint();
        let p_adj = pm.adjoint();
        for (xa, za) in x.iter_mut().zip(z) {
            let mut b = &p_adj * za * &q;
            for i in 0..n {
                let lr = alpha_r * w_r[i];
                for l in 0..n {
                    b[(i, l)] *= lr / (lr + alpha_c * w_c[l]);
                }
            }
            *xa = &pm * b * &q_adj;
        }
        eps = (eps * 0.5).max(eps_floor);
    }
    Ok(())
}

fn schatten_from_gram(eigenvalues: &[f64], p: f64) -> f64 {
    let sigma: Vec<f64> = eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    lp_norm(&sigma, p)
}

/// `(α, w)` with `w_i = (λ_i + ε)^{(p-2)/2}` and `α = f_ε^{1-p}`, where
/// `f_ε = (Σ (λ_i + ε)^{p/2})^{1/p}`.
fn weights(eigenvalues: &[f64], p: f64, eps: f64) -> (f64, Vec<f64>) {
    let shifted: Vec<f64> = eigenvalues.iter().map(|l| l.max(0.0) + eps).collect();
    let f = shifted.iter().map(|s| s.powf(p / 2.0)).sum::<f64>().powf(1.0 / p);
    let w = shifted.iter().map(|s| s.powf((p - 2.0) / 2.0)).collect();
    (f.powf(1.0 - p), w)
}

/// Updates the lower bound with norming elements of the column part `x` and
/// the row part `z - x`, and convex combinations of the two.
fn certify(z: &[DMatrix<Complex64>], x: &[DMatrix<Complex64>], n: usize, p: f64, best: &mut Best) -> Result<()> {
    let d = z.len();
    let q = p / (p - 1.0);

    // Column part: T[j·d + a, k] = X_a[j, k].
    let t = ComplexMatrix::from_fn(n * d, n, |r, k| x[r % d][(r / d, k)]);
    let dc = dual_norming(&t, p)?;
    let yc: Slices = (0..d)
        .map(|a| DMatrix::from_fn(n, n, |k, j| dc.get(j * d + a, k).conj()))
        .collect();

    // Row part: S[j, k·d + a] = Y_a[j, k].
    let s = ComplexMatrix::from_fn(n, n * d, |j, c| z[c % d][(j, c / d)] - x[c % d][(j, c / d)]);
    let dr = dual_norming(&s, p)?;
    let yr: Slices = (0..d)
        .map(|a| DMatrix::from_fn(n, n, |k, j| dr.get(j, k * d + a).conj()))
        .collect();

    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y: Slices = yc
            .iter()
            .zip(&yr)
            .map(|(c, r)| c * Complex64::new(1.0 - t, 0.0) + r * Complex64::new(t, 0.0))
            .collect();
        let dual = psd_root_norm(&column_gram_of(&y, n), q)?.max(psd_root_norm(&row_gram_of(&y, n), q)?);
        if dual > 0.0 {
            let lower = bracket_slices(z, &y).norm() / dual;
            if lower > best.lower {
                best.lower = lower;
            }
        }
    }
    Ok(())
}
