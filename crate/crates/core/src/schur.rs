//! Schur symbols `M(j,k)`, the multiplier `S_M(A) = (M(j,k) A_{jk})`, the
//! symmetries `M ↦ M_op, conj(M)` and the block-diagonal conditional
//! expectation attached to a family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::ComplexMatrix;

/// Names the construction that produced a symbol and its parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    #[serde(default)]
    pub parameters: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(construction: impl Into<String>) -> Self {
        Self {
            construction: construction.into(),
            parameters: Vec::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchurSymbol {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    entries: ComplexMatrix,
    provenance: Provenance,
    /// Pairs whose entry was set to 0 by the `0/0 = 0` convention.
    degenerate: Vec<(usize, usize)>,
}

impl SchurSymbol {
    pub fn new(entries: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        if !entries.is_finite() {
            return Err(Error::Precondition("symbol entries must be finite".into()));
        }
        Ok(Self {
            row_labels: (0..entries.rows()).map(|i| i.to_string()).collect(),
            col_labels: (0..entries.cols()).map(|i| i.to_string()).collect(),
            entries,
            provenance,
            degenerate: Vec::new(),
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        provenance: Provenance,
        f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        Self::new(ComplexMatrix::from_fn(rows, cols, f), provenance)
    }

    pub fn from_real_fn(
        rows: usize,
        cols: usize,
        provenance: Provenance,
        f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_fn(rows, cols, f), provenance)
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        if rows.len() != self.entries.rows() || cols.len() != self.entries.cols() {
            return Err(Error::Dimension("label count does not match symbol shape".into()));
        }
        self.row_labels = rows;
        self.col_labels = cols;
        Ok(self)
    }

    pub fn with_degenerate(mut self, pairs: Vec<(usize, usize)>) -> Self {
        self.degenerate = pairs;
        self
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries.get(j, k)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.entries.shape()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn degenerate(&self) -> &[(usize, usize)] {
        &self.degenerate
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.max_abs()
    }

    pub fn is_real(&self) -> bool {
        self.entries.is_real()
    }

    /// `M_op(j,k) = M(k,j)`.
    pub fn op(&self) -> Self {
        Self {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            entries: self.entries.transpose(),
            provenance: self.provenance.clone().with("symmetry", "op"),
            degenerate: self.degenerate.iter().map(|&(j, k)| (k, j)).collect(),
        }
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        Self {
            entries: self.entries.conj(),
            provenance: self.provenance.clone().with("symmetry", "conj"),
            ..self.clone()
        }
    }

    /// Restriction to a subset of rows and columns.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        let entries = ComplexMatrix::from_fn(rows.len(), cols.len(), |a, b| self.get(rows[a], cols[b]));
        Self {
            row_labels: rows.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: cols.iter().map(|&i| self.col_labels[i].clone()).collect(),
            entries,
            provenance: self.provenance.clone(),
            degenerate: self
                .degenerate
                .iter()
                .filter_map(|&(j, k)| {
                    let a = rows.iter().position(|&r| r == j)?;
                    let b = cols.iter().position(|&c| c == k)?;
                    Some((a, b))
                })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SymbolDoc = serde_json::from_str(text)?;
        let rows = doc.entries.len();
        let cols = doc.entries.first().map_or(0, Vec::len);
        if doc.entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged symbol entries".into()));
        }
        let entries = ComplexMatrix::from_fn(rows, cols, |j, k| {
            let [re, im] = doc.entries[j][k];
            Complex64::new(re, im)
        });
        let row_labels = doc.labels.unwrap_or_else(|| (0..rows).map(|i| i.to_string()).collect());
        let col_labels = doc.col_labels.unwrap_or_else(|| row_labels.clone());
        Self::new(entries, doc.provenance)?
            .with_labels(row_labels, col_labels)
            .map(|s| s.with_degenerate(doc.degenerate))
    }

    pub fn to_json(&self) -> String {
        let (rows, cols) = self.shape();
        let doc = SymbolDoc {
            labels: Some(self.row_labels.clone()),
            col_labels: (self.row_labels != self.col_labels).then(|| self.col_labels.clone()),
            entries: (0..rows)
                .map(|j| {
                    (0..cols)
                        .map(|k| {
                            let z = self.get(j, k);
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
            provenance: self.provenance.clone(),
            degenerate: self.degenerate.clone(),
        };
        serde_json::to_string(&doc).expect("symbol serializes")
    }
}

/// JSON form `{labels, entries: [[[re, im], ...], ...], provenance}`.
#[derive(Serialize, Deserialize)]
struct SymbolDoc {
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    col_labels: Option<Vec<String>>,
    entries: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    degenerate: Vec<(usize, usize)>,
}

/// `M_op`, `conj(M)` and their composition `M* (j,k) = conj(M(k,j))`.
#[derive(Clone, Debug)]
pub struct SymbolSymmetries {
    pub op: SchurSymbol,
    pub conj: SchurSymbol,
    pub adjoint: SchurSymbol,
}

pub fn symbol_symmetries(m: &SchurSymbol) -> SymbolSymmetries {
    SymbolSymmetries {
        op: m.op(),
        conj: m.conj(),
        adjoint: m.op().conj(),
    }
}

pub fn apply_multiplier(m: &SchurSymbol, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.shape() != a.shape() {
        return Err(Error::Dimension(format!(
            "symbol is {}x{}, matrix is {}x{}",
            m.shape().0,
            m.shape().1,
            a.rows(),
            a.cols()
        )));
    }
    m.entries.hadamard(a)
}

/// Keeps the entries `(j,k)` with `u_j = u_k` and zeroes the rest.
pub fn diagonal_expectation(a: &ComplexMatrix, family: &VectorFamily) -> Result<ComplexMatrix> {
    let n = family.len();
    if a.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "family has {n} vectors, matrix is {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        if family.coincide(j, k) {
            a.get(j, k)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// `sgn` with `sgn(0) = 1`.
pub fn sgn(x: i64) -> f64 {
    if x >= 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_complex, schatten_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sign_symbol(n: usize) -> SchurSymbol {
        SchurSymbol::from_real_fn(n, n, Provenance::new("sign"), |j, k| sgn(j as i64 - k as i64)).unwrap()
    }

    #[test]
    fn multiplier_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_complex(3, 3, &mut rng);
        let ones = SchurSymbol::from_real_fn(3, 3, Provenance::new("ones"), |_, _| 1.0).unwrap();
        assert_eq!(apply_multiplier(&ones, &a).unwrap(), a);
        let zeros = SchurSymbol::from_real_fn(3, 3, Provenance::new("zeros"), |_, _| 0.0).unwrap();
        assert!(apply_multiplier(&zeros, &a).unwrap().is_zero());

        let all_ones = ComplexMatrix::from_real_fn(2, 2, |_, _| 1.0);
        let out = apply_multiplier(&sign_symbol(2), &all_ones).unwrap();
        let expected = ComplexMatrix::from_real_fn(2, 2, |j, k| [[1.0, -1.0], [1.0, 1.0]][j][k]);
        assert_eq!(out, expected);
        assert!(apply_multiplier(&ones, &random_complex(2, 3, &mut rng)).is_err());
    }

    #[test]
    fn symmetries() {
        let sym = SchurSymbol::from_real_fn(3, 3, Provenance::new("sym"), |j, k| (j + k) as f64).unwrap();
        assert_eq!(sym.op().entries(), sym.entries());
        let s = symbol_symmetries(&sign_symbol(4));
        for j in 0..4 {
            for k in 0..4 {
                assert_eq!(s.op.get(j, k), c(sgn(k as i64 - j as i64)));
            }
        }
        let m = SchurSymbol::from_fn(2, 3, Provenance::new("z"), |j, k| Complex64::new(j as f64, k as f64)).unwrap();
        let s = symbol_symmetries(&m);
        assert_eq!(s.adjoint.shape(), (3, 2));
        assert_eq!(s.adjoint.get(2, 1), Complex64::new(1.0, -2.0));
        assert_eq!(s.conj.get(1, 2), Complex64::new(1.0, -2.0));
    }

    #[test]
    fn hilbert_schmidt_bound_attained_at_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = SchurSymbol::new(random_complex(4, 4, &mut rng), Provenance::new("random")).unwrap();
        let top = m.max_abs();
        for _ in 0..5 {
            let a = random_complex(4, 4, &mut rng);
            let out = apply_multiplier(&m, &a).unwrap();
            assert!(out.frobenius() <= top * a.frobenius() * (1.0 + 1e-12));
        }
        let (mut bj, mut bk) = (0, 0);
        for j in 0..4 {
            for k in 0..4 {
                if m.get(j, k).norm() == top {
                    (bj, bk) = (j, k);
                }
            }
        }
        let e = ComplexMatrix::unit(4, 4, bj, bk);
        assert!((apply_multiplier(&m, &e).unwrap().frobenius() - top).abs() <= 1e-15 * top);
    }

    #[test]
    fn expectation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_complex(3, 3, &mut rng);
        let distinct = VectorFamily::scalars(&[0.0, 1.0, 2.0]);
        let e = diagonal_expectation(&a, &distinct).unwrap();
        assert_eq!(e, ComplexMatrix::from_fn(3, 3, |j, k| if j == k { a.get(j, k) } else { c(0.0) }));
        let equal = VectorFamily::scalars(&[5.0, 5.0, 5.0]);
        assert_eq!(diagonal_expectation(&a, &equal).unwrap(), a);
        let block = VectorFamily::scalars(&[1.0, 1.0, 2.0]);
        let e = diagonal_expectation(&a, &block).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let keep = (j < 2 && k < 2) || (j == 2 && k == 2);
                assert_eq!(e.get(j, k), if keep { a.get(j, k) } else { c(0.0) });
            }
        }
        assert!(diagonal_expectation(&random_complex(2, 2, &mut rng), &block).is_err());
    }

    #[test]
    fn expectation_is_contractive_and_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fam = VectorFamily::scalars(&[0.0, 1.0, 0.0, 2.0, 1.0, 0.0]);
        for _ in 0..10 {
            let a = random_complex(6, 6, &mut rng);
            let e = diagonal_expectation(&a, &fam).unwrap();
            assert_eq!(diagonal_expectation(&e, &fam).unwrap(), e);
            for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
                assert!(schatten_norm(&e, p).unwrap() <= schatten_norm(&a, p).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let m = SchurSymbol::from_fn(2, 2, Provenance::new("test").with("n", 2), |j, k| {
            Complex64::new(j as f64 - 0.5, k as f64 * 0.25)
        })
        .unwrap()
        .with_degenerate(vec![(0, 1)]);
        let back = SchurSymbol::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(SchurSymbol::from_json(r#"{"entries": [[[1,0]],[[1,0],[2,0]]]}"#).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let bad = ComplexMatrix::from_real_fn(1, 1, |_, _| f64::NAN);
        assert!(SchurSymbol::new(bad, Provenance::new("nan")).is_err());
    }
}
