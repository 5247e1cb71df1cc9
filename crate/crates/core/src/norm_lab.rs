//! Lower bounds for `‖S_M‖_{S_p → S_p}` by duality-mapping ascent, block
//! amplification ladders, and constant-growth sweeps over the symbol zoo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{check_exponent, conjugate_exponent, norming_pair, schatten_norm, ComplexMatrix};
use crate::schur::{apply_multiplier, Provenance, SchurSymbol};
use crate::zoo::{
    arazy_sqrt_symbol, beta_divided_symbol, gh_symbol, hilbert_divided_symbol, triangular_symbol, FunctionTable,
    GhFamilies, TriangularData,
};

#[derive(Clone, Debug)]
pub struct EstimateOptions {
    pub starts: usize,
    pub max_iter: usize,
    /// Relative improvement below which a start counts as stalled.
    pub stall_tol: f64,
    pub stall_window: usize,
    pub seed: u64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            max_iter: 500,
            stall_tol: 1e-9,
            stall_window: 20,
            seed: 0x6e6f_726d,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub provenance: Provenance,
    pub p: f64,
    /// `‖S_M(X*)‖_p / ‖X*‖_p` at the stored certificate.
    pub value: f64,
    pub certificate: ComplexMatrix,
    pub iterations: usize,
    pub converged: bool,
}

impl NormEstimate {
    /// Ratio at the stored certificate, recomputed from scratch.
    pub fn recompute(&self, m: &SchurSymbol) -> Result<f64> {
        ratio(m, &self.certificate, self.p)
    }
}

/// `‖S_M(X)‖_p / ‖X‖_p`, zero for `X = 0`.
pub fn ratio(m: &SchurSymbol, x: &ComplexMatrix, p: f64) -> Result<f64> {
    let den = schatten_norm(x, p)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(schatten_norm(&apply_multiplier(m, x)?, p)? / den)
}

struct Ascent {
    value: f64,
    x: ComplexMatrix,
    iterations: usize,
    converged: bool,
}

fn ascend(m: &SchurSymbol, m_bar: &SchurSymbol, p: f64, x0: ComplexMatrix, opts: &EstimateOptions) -> Result<Ascent> {
    let q = conjugate_exponent(p);
    let x_norm = schatten_norm(&x0, p)?;
    let mut x = x0;
    // Norming elements have unit norm, so after the first step the ratio is
    // just `‖S_M(X)‖_p`.
    let (mut y_norm, mut d) = norming_pair(&apply_multiplier(m, &x)?, p)?;
    let mut value = if x_norm > 0.0 { y_norm / x_norm } else { 0.0 };
    let mut best = Ascent {
        value,
        x: x.clone(),
        iterations: 0,
        converged: false,
    };
    let mut history = vec![value];
    for it in 1..=opts.max_iter {
        if y_norm == 0.0 {
            best.converged = true;
            break;
        }
        let next = norming_pair(&apply_multiplier(m_bar, &d)?, q)?.1;
        if next.is_zero() {
            best.converged = true;
            break;
        }
        x = next;
        (y_norm, d) = norming_pair(&apply_multiplier(m, &x)?, p)?;
        value = y_norm;
        best.iterations = it;
        if value > best.value {
            best.value = value;
            best.x = x.clone();
        }
        history.push(value);
        if it >= opts.stall_window {
            let before = history[it - opts.stall_window];
            if value - before <= opts.stall_tol * value.abs().max(f64::MIN_POSITIVE) {
                best.converged = true;
                break;
            }
        }
    }
    Ok(best)
}

fn default_starts(m: &SchurSymbol, opts: &EstimateOptions) -> Vec<ComplexMatrix> {
    let (rows, cols) = m.shape();
    let mut starts = Vec::with_capacity(opts.starts);
    let (mut bj, mut bk, mut top) = (0, 0, -1.0);
    for j in 0..rows {
        for k in 0..cols {
            let a = m.get(j, k).norm();
            if a > top {
                (bj, bk, top) = (j, k, a);
            }
        }
    }
    starts.push(ComplexMatrix::unit(rows, cols, bj, bk));
    if opts.starts > 1 {
        starts.push(ComplexMatrix::from_real_fn(rows, cols, |_, _| 1.0));
    }
    for s in 2..opts.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(s as u64);
        starts.push(crate::linalg::random_complex(rows, cols, &mut rng));
    }
    starts
}

/// Multi-start ascent of `X ↦ ‖S_M(X)‖_p/‖X‖_p`; always a valid lower bound
/// for the `S_p → S_p` norm. Extra starts run after the default ones.
pub fn estimate_with_starts(
    m: &SchurSymbol,
    p: f64,
    opts: &EstimateOptions,
    extra: &[ComplexMatrix],
) -> Result<NormEstimate> {
    check_exponent(p)?;
    let (rows, cols) = m.shape();
    if let Some(bad) = extra.iter().find(|x| x.shape() != (rows, cols)) {
        return Err(Error::Dimension(format!(
            "start of shape {:?} for a {rows}x{cols} symbol",
            bad.shape()
        )));
    }
    let mut starts = default_starts(m, opts);
    starts.extend(extra.iter().cloned());
    let m_bar = m.conj();
    let runs: Vec<Ascent> = starts
        .into_par_iter()
        .map(|x0| ascend(m, &m_bar, p, x0, opts))
        .collect::<Result<_>>()?;
    // First strictly larger value wins, so ties resolve by start index.
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .ok_or_else(|| Error::Precondition("no starting points".into()))?;
    let scale = schatten_norm(&best.x, p)?;
    let certificate = if scale > 0.0 {
        best.x.scale((1.0 / scale).into())
    } else {
        best.x
    };
    let value = ratio(m, &certificate, p)?;
    Ok(NormEstimate {
        provenance: m.provenance().clone(),
        p,
        value,
        certificate,
        iterations: best.iterations,
        converged: best.converged,
    })
}

pub fn estimate_sp_norm(m: &SchurSymbol, p: f64, opts: &EstimateOptions) -> Result<NormEstimate> {
    estimate_with_starts(m, p, opts, &[])
}

/// `M_amp((j,s),(k,t)) = M(j,k)` on `Γ × {0..m}`, with `(j,s) ↦ j·m + s`.
pub fn amplify(m: &SchurSymbol, block: usize) -> Result<SchurSymbol> {
    if block == 0 {
        return Err(Error::Precondition("amplification block size must be at least 1".into()));
    }
    let (rows, cols) = m.shape();
    let prov = m.provenance().clone().with("amplified", block);
    SchurSymbol::from_fn(rows * block, cols * block, prov, |a, b| m.get(a / block, b / block))
}

/// Places a certificate for block size `from` inside the top-left corner of
/// every block for block size `to ≥ from`.
pub fn embed_certificate(x: &ComplexMatrix, from: usize, to: usize) -> Result<ComplexMatrix> {
    if from == 0 || to < from || x.rows() % from != 0 || x.cols() % from != 0 {
        return Err(Error::Precondition(format!("cannot embed block size {from} into {to}")));
    }
    let (rows, cols) = (x.rows() / from, x.cols() / from);
    let mut out = ComplexMatrix::zeros(rows * to, cols * to);
    for a in 0..x.rows() {
        for b in 0..x.cols() {
            let (j, s) = (a / from, a % from);
            let (k, t) = (b / from, b % from);
            out.set(j * to + s, k * to + t, x.get(a, b));
        }
    }
    Ok(out)
}

/// Estimates on `amplify(M, m)` for increasing `m`, each warm-started from the
/// previous certificate so the ladder is nondecreasing.
pub fn amplification_ladder(
    m: &SchurSymbol,
    p: f64,
    blocks: &[usize],
    opts: &EstimateOptions,
) -> Result<Vec<NormEstimate>> {
    if blocks.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("amplification ladder must be nondecreasing".into()));
    }
    let mut out: Vec<NormEstimate> = Vec::with_capacity(blocks.len());
    let mut prev: Option<usize> = None;
    for &b in blocks {
        let amp = amplify(m, b)?;
        let extra = match (prev, out.last()) {
            (Some(pb), Some(est)) => vec![embed_certificate(&est.certificate, pb, b)?],
            _ => Vec::new(),
        };
        out.push(estimate_with_starts(&amp, p, opts, &extra)?);
        prev = Some(b);
    }
    Ok(out)
}

/// Symbol families with a reference envelope for their `S_p` bound.
#[derive(Clone, Debug, PartialEq)]
pub enum Construction {
    /// Random real families in `R^dim`, `Λ` a random real contraction.
    Gh { dim: usize },
    /// `⟨(u_j − u_k)/‖·‖, w_j/‖w_j‖⟩` (`side = 1`) or with `w_k` (`side = 2`).
    OneSided { dim: usize, side: u8 },
    /// `sgn(j − a_k)`, either `a = id` or random thresholds.
    Triangular { random: bool },
    /// Square root of divided differences of a random monotone `f` (or `f = id`).
    Arazy { identity: bool },
    Beta { beta: f64, identity: bool },
    HilbertDivided { dim: usize },
}

impl Construction {
    /// Parses a tag with its parameter object.
    pub fn parse(tag: &str, params: &serde_json::Map<String, serde_json::Value>) -> Result<Self> {
        let int = |key: &str, default: usize| -> Result<usize> {
            match params.get(key) {
                None => Ok(default),
                Some(v) => v
                    .as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::Config(format!("parameter `{key}` must be a nonnegative integer"))),
            }
        };
        let text = |key: &str, default: &str| -> Result<String> {
            match params.get(key) {
                None => Ok(default.to_string()),
                Some(v) => v
                    .as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Config(format!("parameter `{key}` must be a string"))),
            }
        };
        let f_identity = || -> Result<bool> {
            match text("f", "random")?.as_str() {
                "id" | "identity" => Ok(true),
                "random" => Ok(false),
                other => Err(Error::Config(format!("unknown function `{other}`"))),
            }
        };
        Ok(match tag {
            "gh" => Self::Gh { dim: int("dim", 3)? },
            "one-sided" => {
                let side = int("side", 1)?;
                if side != 1 && side != 2 {
                    return Err(Error::Config("parameter `side` must be 1 or 2".into()));
                }
                Self::OneSided {
                    dim: int("dim", 3)?,
                    side: side as u8,
                }
            }
            "triangular" => Self::Triangular {
                random: match text("a", "identity")?.as_str() {
                    "id" | "identity" => false,
                    "random" => true,
                    other => return Err(Error::Config(format!("unknown threshold map `{other}`"))),
                },
            },
            "arazy" => Self::Arazy { identity: f_identity()? },
            "beta" => {
                let beta = match params.get("beta") {
                    None => 0.5,
                    Some(v) => v
                        .as_f64()
                        .ok_or_else(|| Error::Config("parameter `beta` must be a number".into()))?,
                };
                Self::Beta {
                    beta,
                    identity: f_identity()?,
                }
            }
            "hilbert-divided" => Self::HilbertDivided { dim: int("dim", 3)? },
            other => return Err(Error::UnknownConstruction(other.to_string())),
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Gh { .. } => "gh",
            Self::OneSided { .. } => "one-sided",
            Self::Triangular { .. } => "triangular",
            Self::Arazy { .. } => "arazy",
            Self::Beta { .. } => "beta",
            Self::HilbertDivided { .. } => "hilbert-divided",
        }
    }

    /// Random instance of size `n`; also returns the Lipschitz constant where
    /// the envelope needs it.
    pub fn instance(&self, n: usize, seed: u64) -> Result<(SchurSymbol, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n as u64);
        match *self {
            Self::Gh { dim } => {
                let (fams, lambda) = random_gh_families(n, dim, &mut rng)?;
                Ok((gh_symbol(&fams, &lambda)?, 1.0))
            }
            Self::OneSided { dim, side } => {
                let u = random_family(n, dim, &mut rng)?;
                let w = random_family(n, dim, &mut rng)?;
                let zero = VectorFamily::from_real(dim, &vec![vec![0.0; dim]; n])?;
                let (w, w_prime) = if side == 1 { (w, zero) } else { (zero, w) };
                let fams = GhFamilies {
                    u_prime: u.negated(),
                    u,
                    w,
                    w_prime,
                };
                let m = gh_symbol(&fams, &ComplexMatrix::identity(dim))?;
                let mut prov = m.provenance().clone().with("side", side);
                prov.construction = "one-sided".into();
                Ok((SchurSymbol::new(m.entries().clone(), prov)?.with_degenerate(m.degenerate().to_vec()), 1.0))
            }
            Self::Triangular { random } => {
                let data = if random {
                    TriangularData {
                        a: (0..n).map(|_| rng.random_range(-1..=n as i64)).collect(),
                    }
                } else {
                    TriangularData::identity(n)
                };
                Ok((triangular_symbol(&data)?, 1.0))
            }
            Self::Arazy { identity } => {
                let f = monotone_table(n, identity, &mut rng)?;
                Ok((arazy_sqrt_symbol(&f)?, f.lipschitz()))
            }
            Self::Beta { beta, identity } => {
                let f = monotone_table(n, identity, &mut rng)?;
                Ok((beta_divided_symbol(&f, beta)?, f.lipschitz()))
            }
            Self::HilbertDivided { dim } => {
                let w = random_family(n, dim, &mut rng)?;
                Ok((hilbert_divided_symbol(&w, &random_contraction(dim, &mut rng))?, 1.0))
            }
        }
    }

    /// Reference envelope at `p` (`lip` is ignored where it does not enter).
    pub fn envelope(&self, p: f64, lip: f64) -> f64 {
        let c = p.max(conjugate_exponent(p));
        match *self {
            Self::Gh { .. } | Self::HilbertDivided { .. } => c.powf(2.5),
            Self::OneSided { .. } | Self::Triangular { .. } => c,
            Self::Arazy { .. } => c.powf(2.5) * lip.sqrt(),
            Self::Beta { beta, .. } => c.powf(2.0 - beta) * lip.powf(beta),
        }
    }
}

/// Gaussian families in `R^dim` and a random real contraction `Λ`.
pub fn random_gh_families<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Result<(GhFamilies, ComplexMatrix)> {
    let fams = GhFamilies {
        u: random_family(n, dim, rng)?,
        u_prime: random_family(n, dim, rng)?,
        w: random_family(n, dim, rng)?,
        w_prime: random_family(n, dim, rng)?,
    };
    Ok((fams, random_contraction(dim, rng)))
}

fn random_family<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Result<VectorFamily> {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.sample(rand_distr::StandardNormal)).collect())
        .collect();
    VectorFamily::from_real(dim, &rows)
}

fn random_contraction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_real_fn(dim, dim, |_, _| rng.sample(rand_distr::StandardNormal));
    let s = crate::linalg::operator_norm(&g);
    if s > 0.0 {
        g.scale((1.0 / s).into())
    } else {
        g
    }
}

/// Piecewise-linear nondecreasing `f` on `[0,1]` with slopes in `[0, 2)`.
pub fn monotone_table<R: Rng + ?Sized>(n: usize, identity: bool, rng: &mut R) -> Result<FunctionTable> {
    let n = n.max(2);
    let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    if identity {
        return FunctionTable::sample(&xs, |x| x);
    }
    let mut f = 0.0;
    let mut pts = vec![(xs[0], 0.0)];
    for w in xs.windows(2) {
        f += rng.random_range(0.0..2.0) * (w[1] - w[0]);
        pts.push((w[1], f));
    }
    FunctionTable::new(pts)
}

/// Sweep configuration: `{construction, params, sizes, p_list, seeds, K_global}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    pub construction: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    pub sizes: Vec<usize>,
    pub p_list: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(rename = "K_global", alias = "k_global", default = "default_k")]
    pub k_global: f64,
}

fn default_k() -> f64 {
    crate::riesz::K_GLOBAL_DEFAULT
}

/// One row of a constant-growth ledger.
#[derive(Clone, Debug, Serialize)]
pub struct LedgerRow {
    pub construction: String,
    pub n: usize,
    pub seed: u64,
    pub p: f64,
    pub estimate: f64,
    pub envelope: f64,
    /// `estimate / envelope`, zero when both vanish.
    pub ratio: f64,
    pub k_global: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LedgerRow {
    pub fn violation(&self) -> bool {
        !(self.ratio <= self.k_global)
    }
}

/// Ledger rows in `(size, seed, p)` order.
pub fn p_sweep(cfg: &SweepConfig, opts: &EstimateOptions) -> Result<Vec<LedgerRow>> {
    let construction = Construction::parse(&cfg.construction, &cfg.params)?;
    for &p in &cfg.p_list {
        check_exponent(p)?;
    }
    let mut jobs = Vec::new();
    for &n in &cfg.sizes {
        for &seed in &cfg.seeds {
            jobs.push((n, seed));
        }
    }
    let blocks: Vec<Vec<LedgerRow>> = jobs
        .into_par_iter()
        .map(|(n, seed)| {
            let (m, lip) = construction.instance(n, seed)?;
            cfg.p_list
                .iter()
                .map(|&p| {
                    let est = estimate_sp_norm(&m, p, opts)?;
                    let envelope = construction.envelope(p, lip);
                    let ratio = if est.value == 0.0 { 0.0 } else { est.value / envelope };
                    Ok(LedgerRow {
                        construction: construction.tag().to_string(),
                        n,
                        seed,
                        p,
                        estimate: est.value,
                        envelope,
                        ratio,
                        k_global: cfg.k_global,
                        iterations: est.iterations,
                        converged: est.converged,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}
