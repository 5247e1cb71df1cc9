use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schur::{Provenance, SchurSymbol};

/// Samples `(x_i, f(x_i))` with strictly increasing `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct FunctionTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl FunctionTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Precondition("function table needs at least two points".into()));
        }
        if points.iter().any(|(x, f)| !x.is_finite() || !f.is_finite()) {
            return Err(Error::Parse("non-finite sample in function table".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Parse("function table abscissae must be strictly increasing".into()));
        }
        let (xs, fs) = points.into_iter().unzip();
        Ok(Self { xs, fs })
    }

    pub fn sample(xs: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(xs.iter().map(|&x| (x, f(x))).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.fs
    }

    /// Largest slope between consecutive samples.
    pub fn lipschitz(&self) -> f64 {
        (1..self.len())
            .map(|i| ((self.fs[i] - self.fs[i - 1]) / (self.xs[i] - self.xs[i - 1])).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_nondecreasing(&self) -> Result<()> {
        for i in 1..self.len() {
            if self.fs[i] < self.fs[i - 1] {
                return Err(Error::NotMonotone {
                    x0: self.xs[i - 1],
                    x1: self.xs[i],
                });
            }
        }
        Ok(())
    }

    /// `(f(x_i) − f(x_j))/(x_i − x_j)` off the diagonal; on it the symmetric
    /// difference quotient, one-sided at the ends.
    pub fn divided_difference(&self, i: usize, j: usize) -> f64 {
        let q = if i == j {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(self.len() - 1);
            (self.fs[hi] - self.fs[lo]) / (self.xs[hi] - self.xs[lo])
        } else {
            (self.fs[i] - self.fs[j]) / (self.xs[i] - self.xs[j])
        };
        q.max(0.0)
    }
}

impl TryFrom<Vec<[f64; 2]>> for FunctionTable {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(v.into_iter().map(|[x, f]| (x, f)).collect())
    }
}

impl From<FunctionTable> for Vec<[f64; 2]> {
    fn from(t: FunctionTable) -> Self {
        t.xs.into_iter().zip(t.fs).map(|(x, f)| [x, f]).collect()
    }
}

fn divided_symbol(f: &FunctionTable, prov: Provenance, map: impl Fn(f64) -> f64) -> Result<SchurSymbol> {
    f.check_nondecreasing()?;
    let n = f.len();
    let labels: Vec<String> = f.xs().iter().map(|x| x.to_string()).collect();
    SchurSymbol::from_real_fn(n, n, prov.with("lip", f.lipschitz()), |i, j| map(f.divided_difference(i, j)))?
        .with_labels(labels.clone(), labels)
}

/// `M(x,y) = ((f(x) − f(y))/(x − y))^{1/2}` on the table's grid.
pub fn arazy_sqrt_symbol(f: &FunctionTable) -> Result<SchurSymbol> {
    divided_symbol(f, Provenance::new("arazy").with("n", f.len()), f64::sqrt)
}

/// `M(x,y) = ((f(x) − f(y))/(x − y))^β` for `β ∈ (0,1)`.
pub fn beta_divided_symbol(f: &FunctionTable, beta: f64) -> Result<SchurSymbol> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Precondition(format!("β = {beta} must lie in (0, 1)")));
    }
    let prov = Provenance::new("beta").with("n", f.len()).with("beta", beta);
    if beta == 0.5 {
        divided_symbol(f, prov, f64::sqrt)
    } else {
        divided_symbol(f, prov, |q| q.powf(beta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect()
    }

    fn random_monotone(n: usize, rng: &mut ChaCha8Rng) -> FunctionTable {
        let mut x = 0.0;
        let mut f = 0.0;
        let mut pts = Vec::new();
        for _ in 0..n {
            pts.push((x, f));
            x += rng.random_range(0.1..1.0);
            f += rng.random_range(0.0..2.0) * rng.random_range(0.0..1.0);
        }
        FunctionTable::new(pts).unwrap()
    }

    #[test]
    fn identity_gives_ones() {
        let f = FunctionTable::sample(&grid(7), |x| x).unwrap();
        let m = arazy_sqrt_symbol(&f).unwrap();
        for b in [0.2, 0.5, 0.9] {
            let mb = beta_divided_symbol(&f, b).unwrap();
            for i in 0..7 {
                for j in 0..7 {
                    assert!((m.get(i, j).re - 1.0).abs() < 1e-14);
                    assert!((mb.get(i, j).re - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn ramp_example() {
        let f = FunctionTable::sample(&[-1.0, 1.0], |x| x.max(0.0)).unwrap();
        let m = arazy_sqrt_symbol(&f).unwrap();
        assert_eq!(m.get(1, 0).re, 0.5f64.sqrt());
    }

    #[test]
    fn doubling_gives_power_of_two() {
        let f = FunctionTable::sample(&grid(5), |x| 2.0 * x).unwrap();
        let m = beta_divided_symbol(&f, 0.3).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((m.get(i, j).re - 2f64.powf(0.3)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn half_power_reproduces_arazy_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_monotone(9, &mut rng);
        assert_eq!(
            arazy_sqrt_symbol(&f).unwrap().entries(),
            beta_divided_symbol(&f, 0.5).unwrap().entries()
        );
    }

    #[test]
    fn caps() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let f = random_monotone(12, &mut rng);
            let lip = f.lipschitz();
            let m = arazy_sqrt_symbol(&f).unwrap();
            for i in 0..12 {
                for j in 0..12 {
                    let v = m.get(i, j).re;
                    assert!(v >= 0.0 && v <= lip.sqrt() * (1.0 + 1e-12));
                }
            }
            let b = rng.random_range(0.05..0.95);
            let m = beta_divided_symbol(&f, b).unwrap();
            assert!(m.max_abs() <= lip.powf(b) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn errors() {
        let f = FunctionTable::sample(&[0.0, 1.0, 2.0], |x| -x).unwrap();
        assert!(matches!(arazy_sqrt_symbol(&f), Err(Error::NotMonotone { .. })));
        let g = FunctionTable::sample(&[0.0, 1.0], |x| x).unwrap();
        assert!(beta_divided_symbol(&g, 1.0).is_err());
        assert!(FunctionTable::new(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(FunctionTable::from_json("[[1,0],[0,1]]").is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = FunctionTable::from_json("[[0, 0], [1, 0.5], [3, 2]]").unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(FunctionTable::from_json(&f.to_json()).unwrap(), f);
        assert_eq!(f.lipschitz(), 0.75);
    }
}
