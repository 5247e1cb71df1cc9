use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::{inner, norm, CVector, VectorFamily, TOL_EQ_REL};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::schur::{Provenance, SchurSymbol};
use crate::vector_valued::TOL_CONTRACTION;

/// Row families `(u_j, w_j)` and column families `(u'_k, w'_k)`.
#[derive(Clone, Debug)]
pub struct GhFamilies {
    pub u: VectorFamily,
    pub u_prime: VectorFamily,
    pub w: VectorFamily,
    pub w_prime: VectorFamily,
}

impl GhFamilies {
    fn validate(&self, lambda: &ComplexMatrix) -> Result<()> {
        if self.u.len() != self.w.len() || self.u_prime.len() != self.w_prime.len() {
            return Err(Error::Dimension("u/w and u'/w' must have matching lengths".into()));
        }
        if self.u.dim() != self.u_prime.dim() || self.w.dim() != self.w_prime.dim() {
            return Err(Error::Dimension("u/u' and w/w' must live in the same spaces".into()));
        }
        if lambda.shape() != (self.u.dim(), self.w.dim()) {
            return Err(Error::Dimension(format!(
                "Λ must be {}x{}, got {}x{}",
                self.u.dim(),
                self.w.dim(),
                lambda.rows(),
                lambda.cols()
            )));
        }
        check_contraction(lambda)
    }
}

fn check_contraction(lambda: &ComplexMatrix) -> Result<()> {
    let norm = operator_norm(lambda);
    if norm > 1.0 + TOL_CONTRACTION {
        return Err(Error::NotContraction {
            norm,
            tolerance: TOL_CONTRACTION,
        });
    }
    Ok(())
}

fn max_norm(fams: &[&VectorFamily]) -> f64 {
    fams.iter()
        .flat_map(|f| f.vectors().iter().map(norm))
        .fold(0.0, f64::max)
}

/// `⟨a/‖a‖, Λ b/‖b‖⟩`, or `None` when either vector is below `tol`.
fn pairing(a: &CVector, b: &CVector, lambda: &ComplexMatrix, tol: f64) -> Option<Complex64> {
    let (na, nb) = (norm(a), norm(b));
    if na <= tol || nb <= tol {
        return None;
    }
    let lb = lambda.as_dmatrix() * b;
    Some(inner(a, &lb) / Complex64::new(na * nb, 0.0))
}

/// `M(j,k) = ⟨(u_j + u'_k)/‖·‖, Λ (w_j + w'_k)/‖·‖⟩`. Pairs with a vanishing
/// denominator get entry 0 and are flagged.
pub fn gh_symbol(f: &GhFamilies, lambda: &ComplexMatrix) -> Result<SchurSymbol> {
    f.validate(lambda)?;
    let tol = TOL_EQ_REL * (1.0 + max_norm(&[&f.u, &f.u_prime, &f.w, &f.w_prime]));
    let (rows, cols) = (f.u.len(), f.u_prime.len());
    let mut degenerate = Vec::new();
    let mut entries = ComplexMatrix::zeros(rows, cols);
    for j in 0..rows {
        for k in 0..cols {
            let a = f.u.vector(j) + f.u_prime.vector(k);
            let b = f.w.vector(j) + f.w_prime.vector(k);
            match pairing(&a, &b, lambda, tol) {
                Some(z) => entries.set(j, k, z),
                None => degenerate.push((j, k)),
            }
        }
    }
    let prov = Provenance::new("gh")
        .with("rows", rows)
        .with("cols", cols)
        .with("dim", f.u.dim());
    Ok(SchurSymbol::new(entries, prov)?.with_degenerate(degenerate))
}

/// Difference-form symbol on the doubled index set `Γ₁ ∪ Γ₂` with
/// `(h, g) = (u, w)` on `Γ₁` and `−(u', w')` on `Γ₂`. Its `Γ₁ × Γ₂` corner is
/// `gh_symbol(f, Λ)`; the corner is checked against `m` entrywise.
pub fn corner_embed(m: &SchurSymbol, f: &GhFamilies, lambda: &ComplexMatrix) -> Result<SchurSymbol> {
    f.validate(lambda)?;
    let (n1, n2) = (f.u.len(), f.u_prime.len());
    if m.shape() != (n1, n2) {
        return Err(Error::Dimension("symbol does not match the families".into()));
    }
    let h: Vec<CVector> = f
        .u
        .vectors()
        .iter()
        .cloned()
        .chain(f.u_prime.vectors().iter().map(|v| -v))
        .collect();
    let g: Vec<CVector> = f
        .w
        .vectors()
        .iter()
        .cloned()
        .chain(f.w_prime.vectors().iter().map(|v| -v))
        .collect();
    let tol = TOL_EQ_REL * (1.0 + max_norm(&[&f.u, &f.u_prime, &f.w, &f.w_prime]));
    let total = n1 + n2;
    let mut degenerate = Vec::new();
    let mut entries = ComplexMatrix::zeros(total, total);
    for a in 0..total {
        for b in 0..total {
            match pairing(&(&h[a] - &h[b]), &(&g[a] - &g[b]), lambda, tol) {
                Some(z) => entries.set(a, b, z),
                None => degenerate.push((a, b)),
            }
        }
    }
    let corner_err = (0..n1)
        .flat_map(|j| (0..n2).map(move |k| (j, k)))
        .map(|(j, k)| (entries.get(j, n1 + k) - m.get(j, k)).norm())
        .fold(0.0, f64::max);
    if corner_err > 1e-12 {
        return Err(Error::Decomposition(format!(
            "corner differs from the symbol by {corner_err:e}"
        )));
    }
    let prov = Provenance::new("gh-corner").with("rows", n1).with("cols", n2);
    Ok(SchurSymbol::new(entries, prov)?.with_degenerate(degenerate))
}

/// `M(j,k) = ‖Λ w_j − Λ w_k‖ / ‖w_j − w_k‖`, zero (and flagged off the
/// diagonal) where `w_j = w_k`.
pub fn hilbert_divided_symbol(w: &VectorFamily, lambda: &ComplexMatrix) -> Result<SchurSymbol> {
    if lambda.cols() != w.dim() {
        return Err(Error::Dimension(format!(
            "Λ has {} columns, family dimension is {}",
            lambda.cols(),
            w.dim()
        )));
    }
    check_contraction(lambda)?;
    let mapped = w.map_linear(lambda)?;
    let n = w.len();
    let mut degenerate = Vec::new();
    let mut entries = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if w.coincide(j, k) {
                if j != k {
                    degenerate.push((j, k));
                }
                continue;
            }
            let num = norm(&(mapped.vector(j) - mapped.vector(k)));
            let den = norm(&(w.vector(j) - w.vector(k)));
            entries.set(j, k, Complex64::new(num / den, 0.0));
        }
    }
    let prov = Provenance::new("hilbert-divided").with("n", n).with("dim", w.dim());
    Ok(SchurSymbol::new(entries, prov)?.with_degenerate(degenerate))
}
