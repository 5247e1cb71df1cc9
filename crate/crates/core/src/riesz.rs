//! Riesz-Schur transforms `R_u(x) = Σ x_{jk} e_{jk} ⊗ (u_j − u_k)/‖u_j − u_k‖`
//! and the measurements behind the two-sided row/column estimates.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Conjugation, VectorFamily};
use crate::linalg::{conjugate_exponent, schatten_norm, ComplexMatrix};
use crate::schur::diagonal_expectation;
use crate::vector_valued::{duality_bracket, RcNorm, SplitOptions, VectorValuedElement};

/// Default slack on the unquantified universal constants.
pub const K_GLOBAL_DEFAULT: f64 = 8.0;

/// Tolerance on the duality identity residual, relative to `1 + |tr(xy)|`.
pub const TOL_DUALITY: f64 = 1e-9;

/// `c_p = max{p, (p/(p−1))^{3/2}}`.
pub fn c_p(p: f64) -> f64 {
    p.max((p / (p - 1.0)).powf(1.5))
}

#[derive(Clone, Debug)]
pub struct RieszInstance {
    pub family: VectorFamily,
    pub x: ComplexMatrix,
    pub p: f64,
    /// Route complex families through their real embedding first.
    pub strict_real: bool,
}

impl RieszInstance {
    pub fn new(family: VectorFamily, x: ComplexMatrix, p: f64) -> Result<Self> {
        let n = family.len();
        if x.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "family has {n} vectors, matrix is {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self {
            family,
            x,
            p,
            strict_real: false,
        })
    }

    pub fn strict_real(mut self, on: bool) -> Self {
        self.strict_real = on;
        self
    }

    fn effective_family(&self) -> VectorFamily {
        if self.strict_real && !self.family.is_real() {
            self.family.complexify_real_embedding()
        } else {
            self.family.clone()
        }
    }
}

/// Scalars `x`, vectors `(u_j − u_k)/‖u_j − u_k‖` (zero where `u_j = u_k`).
pub fn riesz_transform(inst: &RieszInstance) -> Result<VectorValuedElement> {
    transform(&inst.effective_family(), &inst.x, false)
}

/// The conjugate transform with vectors `J(u_j − u_k)/‖u_j − u_k‖`.
pub fn conjugate_riesz_transform(inst: &RieszInstance) -> Result<VectorValuedElement> {
    transform(&inst.effective_family(), &inst.x, true)
}

fn transform(family: &VectorFamily, x: &ComplexMatrix, conjugate: bool) -> Result<VectorValuedElement> {
    let n = family.len();
    if x.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "family has {n} vectors, matrix is {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    VectorValuedElement::from_fn(n, family.dim(), |j, k| {
        let v = family.normalized_difference(j, k);
        let v = if conjugate { Conjugation.apply(&v) } else { v };
        (x.get(j, k), v)
    })
}

/// Measurement of one instance against both inequalities.
#[derive(Clone, Debug, Serialize)]
pub struct RieszMeasurement {
    pub p: f64,
    pub c_p: f64,
    pub c_p_dual: f64,
    pub norm_x: f64,
    pub norm_diag: f64,
    pub rc_norm: f64,
    pub rc_lower: f64,
    pub certified: bool,
    /// `rc_norm(R x) / ‖x‖_p`.
    pub ratio_rs1: f64,
    /// `‖x‖_p − [‖E x‖_p + K c_{p'} rc_norm(R x)]`, evaluated with the
    /// certified lower bound of the `RC_p` norm.
    pub deficit_rs2: f64,
    pub k_global: f64,
}

impl RieszMeasurement {
    pub fn rs1_violation(&self) -> bool {
        self.ratio_rs1 / self.c_p > self.k_global
    }

    pub fn rs2_violation(&self) -> bool {
        self.deficit_rs2 > 0.0
    }
}

pub fn measure(inst: &RieszInstance, k_global: f64, opts: &SplitOptions) -> Result<RieszMeasurement> {
    let p = inst.p;
    let norm_x = schatten_norm(&inst.x, p)?;
    if norm_x == 0.0 {
        return Err(Error::UndefinedRatio("‖x‖_p = 0".into()));
    }
    let norm_diag = schatten_norm(&diagonal_expectation(&inst.x, &inst.family)?, p)?;
    let rc: RcNorm = riesz_transform(inst)?.rc_norm_with(p, opts)?;
    let c = c_p(p);
    let c_dual = c_p(conjugate_exponent(p));
    Ok(RieszMeasurement {
        p,
        c_p: c,
        c_p_dual: c_dual,
        norm_x,
        norm_diag,
        rc_norm: rc.value,
        rc_lower: rc.lower,
        certified: rc.certified,
        ratio_rs1: rc.value / norm_x,
        deficit_rs2: norm_x - (norm_diag + k_global * c_dual * rc.lower),
        k_global,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Rs1Report {
    pub rc_norm: f64,
    pub norm_x: f64,
    pub ratio: f64,
    pub ratio_over_c_p: f64,
    pub violation: bool,
}

pub fn verify_rs1(inst: &RieszInstance, k_global: f64) -> Result<Rs1Report> {
    let m = measure(inst, k_global, &SplitOptions::default())?;
    Ok(Rs1Report {
        rc_norm: m.rc_norm,
        norm_x: m.norm_x,
        ratio: m.ratio_rs1,
        ratio_over_c_p: m.ratio_rs1 / m.c_p,
        violation: m.rs1_violation(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Rs2Report {
    pub norm_x: f64,
    pub norm_diag: f64,
    pub rc_norm: f64,
    pub deficit: f64,
    pub violation: bool,
}

pub fn verify_rs2(inst: &RieszInstance, k_global: f64) -> Result<Rs2Report> {
    let p = inst.p;
    let norm_x = schatten_norm(&inst.x, p)?;
    let norm_diag = schatten_norm(&diagonal_expectation(&inst.x, &inst.family)?, p)?;
    let rc = if norm_x == 0.0 {
        RcNorm::exact(0.0)
    } else {
        riesz_transform(inst)?.rc_norm(p)?
    };
    let deficit = norm_x - (norm_diag + k_global * c_p(conjugate_exponent(p)) * rc.lower);
    Ok(Rs2Report {
        norm_x,
        norm_diag,
        rc_norm: rc.value,
        deficit,
        violation: deficit > 0.0,
    })
}

/// `|⟨R x, R̄ y⟩ + tr(xy)|` for `x`, `y` supported off the blocks `u_j = u_k`.
pub fn duality_identity_check(x: &ComplexMatrix, y: &ComplexMatrix, family: &VectorFamily, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let n = family.len();
    for (name, m) in [("x", x), ("y", y)] {
        if m.shape() != (n, n) {
            return Err(Error::Dimension(format!("{name} does not match the family")));
        }
        for j in 0..n {
            for k in 0..n {
                if family.coincide(j, k) && m.get(j, k) != Complex64::new(0.0, 0.0) {
                    return Err(Error::Precondition(format!(
                        "{name} has an entry at ({j}, {k}) where u_j = u_k"
                    )));
                }
            }
        }
    }
    let rx = transform(family, x, false)?;
    let ry = transform(family, y, true)?;
    let tr = x.matmul(y)?.trace();
    Ok((duality_bracket(&rx, &ry)? + tr).norm())
}

/// Whether a duality residual passes for the given `tr(xy)`.
pub fn duality_passes(residual: f64, trace: Complex64) -> bool {
    residual <= TOL_DUALITY * (1.0 + trace.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{real_vector, CVector};
    use crate::linalg::random_complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_family(n: usize, d: usize, complex: bool, rng: &mut ChaCha8Rng) -> VectorFamily {
        let vs = (0..n)
            .map(|_| {
                CVector::from_fn(d, |_, _| {
                    let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
                    Complex64::new(rng.random_range(-1.0..1.0), im)
                })
            })
            .collect();
        VectorFamily::from_vectors(d, vs).unwrap()
    }

    fn off_support(x: &ComplexMatrix, fam: &VectorFamily) -> ComplexMatrix {
        let n = fam.len();
        ComplexMatrix::from_fn(n, n, |j, k| if fam.coincide(j, k) { c(0.0) } else { x.get(j, k) })
    }

    #[test]
    fn c_p_values() {
        assert_eq!(c_p(4.0), 4.0);
        assert!((c_p(1.5) - 3f64.powf(1.5)).abs() < 1e-12);
        assert_eq!(c_p(2.0), 2.0f64.max(2f64.powf(1.5)));
    }

    #[test]
    fn scalar_family_gives_sign_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fam = VectorFamily::scalars(&[0.0, 1.0, 2.0, 3.0]);
        let x = random_complex(4, 4, &mut rng);
        let r = riesz_transform(&RieszInstance::new(fam, x.clone(), 2.0).unwrap()).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let expected = if j == k {
                    0.0
                } else if j > k {
                    1.0
                } else {
                    -1.0
                };
                assert_eq!(r.entry(j, k)[0], x.get(j, k) * expected);
            }
        }
    }

    #[test]
    fn transform_kills_diagonal_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fam = random_family(4, 2, true, &mut rng);
        let diag = ComplexMatrix::from_fn(4, 4, |j, k| if j == k { c(1.0 + j as f64) } else { c(0.0) });
        assert!(riesz_transform(&RieszInstance::new(fam, diag, 1.5).unwrap()).unwrap().is_zero());
        let same = VectorFamily::scalars(&[2.0; 4]);
        let x = random_complex(4, 4, &mut rng);
        assert!(riesz_transform(&RieszInstance::new(same, x, 1.5).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn transform_ignores_the_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = VectorFamily::scalars(&[0.0, 1.0, 0.0, 1.0, 2.0]);
        let x = random_complex(5, 5, &mut rng);
        let e = diagonal_expectation(&x, &fam).unwrap();
        let a = riesz_transform(&RieszInstance::new(fam.clone(), x.clone(), 2.0).unwrap()).unwrap();
        let b = riesz_transform(&RieszInstance::new(fam, &x - &e, 2.0).unwrap()).unwrap();
        for j in 0..5 {
            for k in 0..5 {
                assert!((a.entry(j, k) - b.entry(j, k)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fam = random_family(4, 3, true, &mut rng);
        for j in 0..4 {
            for k in 0..4 {
                let a = fam.normalized_difference(j, k);
                let b = fam.normalized_difference(k, j);
                assert!((a + b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn pythagoras_at_p2() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(1..8);
            let d = rng.random_range(1..4);
            let fam = random_family(n, d, rng.random_bool(0.5), &mut rng);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let fam = fam.select(&idx);
            let x = random_complex(n, n, &mut rng);
            let e = diagonal_expectation(&x, &fam).unwrap();
            let rc = riesz_transform(&RieszInstance::new(fam, x.clone(), 2.0).unwrap())
                .unwrap()
                .rc_norm(2.0)
                .unwrap()
                .value;
            let lhs = x.frobenius().powi(2);
            let rhs = e.frobenius().powi(2) + rc * rc;
            assert!((lhs - rhs).abs() <= 1e-10 * lhs);
        }
    }

    #[test]
    fn rs1_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let fam = random_family(5, 2, false, &mut rng);
        let x = off_support(&random_complex(5, 5, &mut rng), &fam);
        let r = verify_rs1(&RieszInstance::new(fam.clone(), x, 2.0).unwrap(), K_GLOBAL_DEFAULT).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);

        let diag = ComplexMatrix::from_diagonal(&[c(1.0), c(2.0), c(0.5), c(1.0), c(3.0)]);
        let r = verify_rs1(&RieszInstance::new(fam.clone(), diag, 3.0).unwrap(), K_GLOBAL_DEFAULT).unwrap();
        assert_eq!(r.ratio, 0.0);

        let zero = ComplexMatrix::zeros(5, 5);
        assert!(matches!(
            verify_rs1(&RieszInstance::new(fam, zero, 3.0).unwrap(), K_GLOBAL_DEFAULT),
            Err(Error::UndefinedRatio(_))
        ));

        let fam = random_family(6, 3, false, &mut rng);
        let x = random_complex(6, 6, &mut rng);
        let r = verify_rs1(&RieszInstance::new(fam, x, 4.0).unwrap(), K_GLOBAL_DEFAULT).unwrap();
        assert!(r.ratio <= K_GLOBAL_DEFAULT * 4.0);
        assert!(!r.violation);
    }

    #[test]
    fn rs2_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fam = VectorFamily::scalars(&[0.0, 0.0, 1.0, 1.0]);
        let x = diagonal_expectation(&random_complex(4, 4, &mut rng), &fam).unwrap();
        let r = verify_rs2(&RieszInstance::new(fam.clone(), x, 1.5).unwrap(), K_GLOBAL_DEFAULT).unwrap();
        assert!(r.deficit <= 1e-12);
        let x = off_support(&random_complex(4, 4, &mut rng), &fam);
        let r = verify_rs2(&RieszInstance::new(fam, x, 2.0).unwrap(), 1.0 / c_p(2.0)).unwrap();
        assert!(r.deficit <= 1e-12);
        for p in [1.5, 2.0, 3.0] {
            let fam = random_family(5, 2, true, &mut rng);
            let x = random_complex(5, 5, &mut rng);
            let r = verify_rs2(&RieszInstance::new(fam, x, p).unwrap(), K_GLOBAL_DEFAULT).unwrap();
            assert!(!r.violation, "p={p}");
        }
    }

    #[test]
    fn duality_examples() {
        let fam = VectorFamily::from_vectors(2, vec![real_vector(&[1.0, 0.0]), real_vector(&[0.0, 1.0])]).unwrap();
        let x = ComplexMatrix::unit(2, 2, 0, 1);
        let y = ComplexMatrix::unit(2, 2, 1, 0);
        let rx = riesz_transform(&RieszInstance::new(fam.clone(), x.clone(), 1.5).unwrap()).unwrap();
        let ry = conjugate_riesz_transform(&RieszInstance::new(fam.clone(), y.clone(), 3.0).unwrap()).unwrap();
        assert!((duality_bracket(&rx, &ry).unwrap() - c(-1.0)).norm() < 1e-15);
        assert!(duality_identity_check(&x, &y, &fam, 1.5).unwrap() < 1e-15);
        let z = ComplexMatrix::zeros(2, 2);
        assert_eq!(duality_identity_check(&z, &y, &fam, 1.5).unwrap(), 0.0);
        let bad = ComplexMatrix::identity(2);
        assert!(matches!(
            duality_identity_check(&bad, &y, &fam, 1.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn duality_random_complex_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let fam = random_family(5, 3, true, &mut rng);
            let fam = fam.select(&[0, 1, 2, 0, 3]);
            let x = off_support(&random_complex(5, 5, &mut rng), &fam);
            let y = off_support(&random_complex(5, 5, &mut rng), &fam);
            let tr = x.matmul(&y).unwrap().trace();
            let res = duality_identity_check(&x, &y, &fam, 4.0 / 3.0).unwrap();
            assert!(duality_passes(res, tr), "{res}");
        }
    }

    #[test]
    fn strict_real_mode_uses_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fam = random_family(3, 2, true, &mut rng);
        let x = random_complex(3, 3, &mut rng);
        let inst = RieszInstance::new(fam, x, 2.0).unwrap().strict_real(true);
        let r = riesz_transform(&inst).unwrap();
        assert_eq!(r.dim(), 4);
        // At p = 2 the real embedding is isometric on differences.
        let plain = riesz_transform(&RieszInstance { strict_real: false, ..inst.clone() }).unwrap();
        let a = r.rc_norm(2.0).unwrap().value;
        let b = plain.rc_norm(2.0).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a);
    }
}
