//! Finite families `(u_j)` in `C^d`, the real subspace of real-coordinate
//! vectors and its conjugation `J`, Gram matrices and normalized differences.
//!
//! Inner products are antilinear in the left slot: `⟨a, b⟩ = Σ conj(a_i) b_i`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub type CVector = DVector<Complex64>;

/// Relative tolerance deciding `u_j = u_k`.
pub const TOL_EQ_REL: f64 = 1e-12;

pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &CVector) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn real_vector(coords: &[f64]) -> CVector {
    CVector::from_iterator(coords.len(), coords.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// Entrywise complex conjugation in the standard basis. Fixes exactly the
/// real-coordinate vectors.
#[derive(Clone, Copy, Debug, Default)]
pub struct Conjugation;

impl Conjugation {
    pub fn apply(&self, h: &CVector) -> CVector {
        h.map(|z| z.conj())
    }
}

/// The anchor vector `ξ` of the rank-one column identification: the first
/// standard basis vector.
pub fn anchor(dim: usize) -> CVector {
    let mut xi = CVector::zeros(dim);
    if dim > 0 {
        xi[0] = Complex64::new(1.0, 0.0);
    }
    xi
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorFamily {
    dim: usize,
    labels: Vec<String>,
    vectors: Vec<CVector>,
}

impl VectorFamily {
    pub fn new(dim: usize, labels: Vec<String>, vectors: Vec<CVector>) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} vectors",
                labels.len(),
                vectors.len()
            )));
        }
        if let Some((j, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(Error::Dimension(format!(
                "vector {j} has {} coordinates, expected {dim}",
                v.len()
            )));
        }
        if vectors.iter().flat_map(|v| v.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Precondition("family has non-finite coordinates".into()));
        }
        Ok(Self { dim, labels, vectors })
    }

    /// Family labelled `0..n`.
    pub fn from_vectors(dim: usize, vectors: Vec<CVector>) -> Result<Self> {
        let labels = (0..vectors.len()).map(|j| j.to_string()).collect();
        Self::new(dim, labels, vectors)
    }

    /// Real-coordinate family from rows of coordinates.
    pub fn from_real(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_vectors(dim, rows.iter().map(|r| real_vector(r)).collect())
    }

    /// One-dimensional real family `u_j = values[j]`.
    pub fn scalars(values: &[f64]) -> Self {
        Self::from_real(1, &values.iter().map(|&v| vec![v]).collect::<Vec<_>>())
            .expect("scalar family is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> &CVector {
        &self.vectors[j]
    }

    pub fn is_real(&self) -> bool {
        self.vectors.iter().flat_map(|v| v.iter()).all(|z| z.im == 0.0)
    }

    /// `1e-12 · (1 + max ‖u_j‖)`.
    pub fn tol_eq(&self) -> f64 {
        TOL_EQ_REL * (1.0 + self.vectors.iter().map(norm).fold(0.0, f64::max))
    }

    /// Whether `u_j = u_k` up to `tol_eq`.
    pub fn coincide(&self, j: usize, k: usize) -> bool {
        j == k || norm(&(&self.vectors[j] - &self.vectors[k])) <= self.tol_eq()
    }

    /// `G(j,k) = ⟨u_j, u_k⟩`.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |j, k| inner(&self.vectors[j], &self.vectors[k]))
    }

    /// `(u_j − u_k)/‖u_j − u_k‖`, or zero when `u_j = u_k` (the `0/0 = 0`
    /// convention).
    pub fn normalized_difference(&self, j: usize, k: usize) -> CVector {
        let diff = &self.vectors[j] - &self.vectors[k];
        let len = norm(&diff);
        if j == k || len <= self.tol_eq() {
            CVector::zeros(self.dim)
        } else {
            diff / Complex64::new(len, 0.0)
        }
    }

    /// Realification: `C^d` viewed as the real space `R^{2d}` with inner
    /// product `Re⟨·,·⟩`, embedded as real-coordinate vectors
    /// `(Re u_j, Im u_j)` of `C^{2d}`.
    pub fn complexify_real_embedding(&self) -> Self {
        let d = self.dim;
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                CVector::from_fn(2 * d, |i, _| {
                    if i < d {
                        Complex64::new(v[i].re, 0.0)
                    } else {
                        Complex64::new(v[i - d].im, 0.0)
                    }
                })
            })
            .collect();
        Self {
            dim: 2 * d,
            labels: self.labels.clone(),
            vectors,
        }
    }

    /// Applies a linear map to every vector.
    pub fn map_linear(&self, op: &ComplexMatrix) -> Result<Self> {
        if op.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "operator has {} columns, family dimension is {}",
                op.cols(),
                self.dim
            )));
        }
        let m = op.as_dmatrix();
        let vectors = self.vectors.iter().map(|v| m * v).collect();
        Ok(Self {
            dim: op.rows(),
            labels: self.labels.clone(),
            vectors,
        })
    }

    /// Restriction to a subset of indices (in the given order).
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            dim: self.dim,
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            dim: self.dim,
            labels: self.labels.clone(),
            vectors: self.vectors.iter().map(|v| -v).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FamilyDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&FamilyDoc::from(self)).expect("family serializes")
    }
}

/// JSON form: `{"dim": d, "labels": [...], "vectors": [[[re, im], ...], ...]}`,
/// one array of `[re, im]` coordinate pairs per vector. `labels` may hold
/// strings or numbers and defaults to `0..n`.
#[derive(Serialize, Deserialize)]
struct FamilyDoc {
    dim: usize,
    #[serde(default)]
    labels: Option<Vec<Value>>,
    vectors: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<FamilyDoc> for VectorFamily {
    type Error = Error;

    fn try_from(doc: FamilyDoc) -> Result<Self> {
        let vectors: Vec<CVector> = doc
            .vectors
            .iter()
            .map(|v| CVector::from_iterator(v.len(), v.iter().map(|c| Complex64::new(c[0], c[1]))))
            .collect();
        let labels = match doc.labels {
            Some(ls) => ls
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => s,
                    other => other.to_string(),
                })
                .collect(),
            None => (0..vectors.len()).map(|j| j.to_string()).collect(),
        };
        VectorFamily::new(doc.dim, labels, vectors)
    }
}

impl From<&VectorFamily> for FamilyDoc {
    fn from(f: &VectorFamily) -> Self {
        FamilyDoc {
            dim: f.dim,
            labels: Some(f.labels.iter().map(|l| Value::String(l.clone())).collect()),
            vectors: f
                .vectors
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(coords: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(coords.len(), coords.iter().map(|&(a, b)| Complex64::new(a, b)))
    }

    #[test]
    fn gram_examples() {
        let f = VectorFamily::from_real(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(f.gram(), ComplexMatrix::identity(2));

        let f = VectorFamily::from_real(2, &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(f.gram(), ComplexMatrix::from_real_fn(2, 2, |_, _| 1.0));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = VectorFamily::from_real(2, &[vec![1.0, 0.0], vec![s, s]]).unwrap();
        let g = f.gram();
        let expected = ComplexMatrix::from_real_fn(2, 2, |i, j| if i == j { 1.0 } else { s });
        assert!(g.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn gram_is_antilinear_on_the_left() {
        let f = VectorFamily::from_vectors(1, vec![cv(&[(0.0, 1.0)]), cv(&[(1.0, 0.0)])]).unwrap();
        // ⟨i, 1⟩ = conj(i)·1 = -i
        assert_eq!(f.gram().get(0, 1), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn normalized_difference_examples() {
        let f = VectorFamily::from_real(2, &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(norm(&f.normalized_difference(0, 1)) == 0.0);

        let f = VectorFamily::scalars(&[1.0, 2.0, 3.0]);
        assert_eq!(f.normalized_difference(2, 0)[0], Complex64::new(1.0, 0.0));
        assert_eq!(f.normalized_difference(0, 2)[0], Complex64::new(-1.0, 0.0));
        assert!(norm(&f.normalized_difference(1, 1)) == 0.0);

        let f = VectorFamily::from_real(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = f.normalized_difference(0, 1);
        assert!((v[0].re - s).abs() < 1e-15 && (v[1].re + s).abs() < 1e-15);
    }

    #[test]
    fn equality_uses_tolerance() {
        let f = VectorFamily::scalars(&[1.0, 1.0 + 1e-14, 1.1]);
        assert!(f.coincide(0, 1));
        assert!(!f.coincide(0, 2));
        assert!(norm(&f.normalized_difference(0, 1)) == 0.0);
    }

    #[test]
    fn complexify_examples() {
        let f = VectorFamily::from_real(2, &[vec![1.0, 2.0]]).unwrap();
        let e = f.complexify_real_embedding();
        assert_eq!(e.dim(), 4);
        assert_eq!(e.vector(0), &real_vector(&[1.0, 2.0, 0.0, 0.0]));

        let f = VectorFamily::from_vectors(1, vec![cv(&[(0.0, 1.0)])]).unwrap();
        assert_eq!(f.complexify_real_embedding().vector(0), &real_vector(&[0.0, 1.0]));

        // ⟨u1,u2⟩ = i has zero real part.
        let f = VectorFamily::from_vectors(1, vec![cv(&[(1.0, 0.0)]), cv(&[(0.0, 1.0)])]).unwrap();
        assert_eq!(f.gram().get(0, 1), Complex64::new(0.0, 1.0));
        let e = f.complexify_real_embedding();
        assert_eq!(e.gram().get(0, 1), Complex64::new(0.0, 0.0));
        assert!(e.is_real());
    }

    #[test]
    fn conjugation_is_isometric_involution() {
        let j = Conjugation;
        let h = cv(&[(1.0, 2.0), (-3.0, 0.5)]);
        assert_eq!(j.apply(&j.apply(&h)), h);
        assert_eq!(norm(&j.apply(&h)), norm(&h));
        let r = real_vector(&[1.0, -2.0]);
        assert_eq!(j.apply(&r), r);
        // conjugate-homogeneous
        let z = Complex64::new(0.3, -1.1);
        assert_eq!(j.apply(&(&h * z)), j.apply(&h) * z.conj());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"dim": 2, "labels": ["a", 7], "vectors": [[[1,0],[0,1]], [[0.5,0],[0,0]]]}"#;
        let f = VectorFamily::from_json(text).unwrap();
        assert_eq!(f.labels(), &["a".to_string(), "7".to_string()]);
        assert_eq!(f.vector(0)[1], Complex64::new(0.0, 1.0));
        let back = VectorFamily::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"dim": 3, "vectors": [[[1,0]]]}"#;
        assert!(VectorFamily::from_json(bad).is_err());
    }
}
