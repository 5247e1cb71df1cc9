use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::Value;

use super::report::{Cell, ExperimentReport, Summary, SCHEMA, SCHEMA_VERSION};
use super::SuiteConfig;
use crate::error::{Error, Result};
use crate::family::{CVector, VectorFamily};
use crate::gaussian::{khintchine_ratio, projection_coefficient, sgn_covariance, GaussianSampler, McEstimate};
use crate::linalg::{conjugate_exponent, random_complex, schatten_norm, ComplexMatrix};
use crate::norm_lab::{estimate_sp_norm, monotone_table, p_sweep, random_gh_families, Construction, EstimateOptions, SweepConfig};
use crate::riesz::{duality_identity_check, duality_passes, measure, RieszInstance, TOL_DUALITY};
use crate::schur::{Provenance, SchurSymbol};
use crate::vector_valued::SplitOptions;
use crate::zoo::{
    arazy_sqrt_symbol, beta_divided_symbol, block_square_function, corner_embed, gh_symbol, marcinkiewicz_decompose,
    mikhlin_condition, triangular_symbol, DyadicBlocks, TriangularData, UniformGrid,
};

type Row = Vec<Cell>;

macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$(Cell::from($v)),*] };
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the instance `(n, d, trial)` under a master seed.
pub fn instance_seed(master: u64, n: usize, d: usize, trial: usize) -> u64 {
    mix(master ^ mix(((n as u64) << 42) ^ ((d as u64) << 21) ^ trial as u64))
}

fn gaussian_vector<R: Rng + ?Sized>(d: usize, complex: bool, rng: &mut R) -> CVector {
    CVector::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
        Complex64::new(re, im)
    })
}

/// `n` vectors drawn with repetition from a pool of about `3n/4` gaussian
/// vectors, so that some pairs coincide.
pub fn random_riesz_family<R: Rng + ?Sized>(n: usize, d: usize, complex: bool, rng: &mut R) -> Result<VectorFamily> {
    let pool_size = (3 * n).div_ceil(4).max(1);
    let pool: Vec<CVector> = (0..pool_size).map(|_| gaussian_vector(d, complex, rng)).collect();
    let vectors = (0..n).map(|_| pool[rng.random_range(0..pool_size)].clone()).collect();
    VectorFamily::from_vectors(d, vectors)
}

/// Real rows that are step functions with values in `[−1, 1]`.
pub fn random_bv_symbol<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SchurSymbol> {
    let mut entries = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut v: f64 = rng.random_range(-1.0..1.0);
        for k in 0..n {
            if k > 0 && rng.random_bool(0.25) {
                v = rng.random_range(-1.0..1.0);
            }
            entries.set(j, k, Complex64::new(v, 0.0));
        }
    }
    SchurSymbol::new(entries, Provenance::new("bounded-variation").with("n", n))
}

fn c_max(p: f64) -> f64 {
    p.max(conjugate_exponent(p))
}

fn ratio_or_zero(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

#[derive(Clone, Copy)]
enum Agg {
    Max,
    Min,
    MaxAbs,
}

struct Plan {
    columns: &'static [&'static str],
    metrics: &'static [(&'static str, &'static str, Agg)],
}

const RIESZ: &[&str] = &[
    "trial", "n", "d", "p", "c_p", "norm_x", "norm_diag", "rc_norm", "ratio_rs1", "deficit_rs2", "seed", "rc_lower",
    "certified", "ratio_over_c_p", "violation",
];

fn plan(suite: &str) -> Plan {
    match suite {
        "rs1" => Plan {
            columns: RIESZ,
            metrics: &[
                ("max_ratio_rs1", "ratio_rs1", Agg::Max),
                ("max_ratio_over_c_p", "ratio_over_c_p", Agg::Max),
            ],
        },
        "rs2" => Plan {
            columns: RIESZ,
            metrics: &[("max_deficit_rs2", "deficit_rs2", Agg::Max)],
        },
        "duality" => Plan {
            columns: &["trial", "n", "d", "p", "residual", "trace_abs", "tolerance", "seed", "violation"],
            metrics: &[("max_residual", "residual", Agg::Max)],
        },
        "khintchine" => Plan {
            columns: &[
                "trial", "n", "d", "p", "numerator", "numerator_err", "rc_norm", "rc_lower", "certified", "ratio",
                "ratio_err", "gamma_p", "b_emp", "samples", "seed", "violation",
            ],
            metrics: &[("max_b_emp", "b_emp", Agg::Max), ("min_ratio", "ratio", Agg::Min)],
        },
        "gaussian-identities" => Plan {
            columns: &[
                "trial", "d", "kind", "inner", "estimate", "std_err", "target", "z", "samples", "seed", "violation",
            ],
            metrics: &[("max_abs_z", "z", Agg::MaxAbs)],
        },
        "gh" => Plan {
            columns: &[
                "trial", "n", "d", "p", "max_abs", "degenerate", "corner_ok", "estimate", "envelope", "ratio",
                "converged", "seed", "violation",
            ],
            metrics: &[("max_ratio", "ratio", Agg::Max), ("max_abs_entry", "max_abs", Agg::Max)],
        },
        "arazy" | "beta" => Plan {
            columns: &[
                "trial", "n", "p", "beta", "lip", "max_abs", "cap", "estimate", "envelope", "ratio", "converged",
                "seed", "violation",
            ],
            metrics: &[("max_ratio", "ratio", Agg::Max)],
        },
        "triangular" => Plan {
            columns: &[
                "trial", "n", "p", "thresholds", "estimate", "envelope", "ratio", "converged", "seed", "violation",
            ],
            metrics: &[("max_ratio", "ratio", Agg::Max), ("max_estimate", "estimate", Agg::Max)],
        },
        "marcinkiewicz" => Plan {
            columns: &[
                "trial", "n", "p", "residual", "weight_sum", "variation_bound", "terms", "estimate", "envelope",
                "ratio", "converged", "seed", "violation",
            ],
            metrics: &[("max_residual", "residual", Agg::Max), ("max_ratio", "ratio", Agg::Max)],
        },
        "mikhlin" => Plan {
            columns: &[
                "trial", "n", "d", "p", "s", "order", "value", "sum", "skipped", "refined_value", "rel_change",
                "estimate", "envelope", "ratio", "converged", "seed", "violation",
            ],
            metrics: &[("max_rel_change", "rel_change", Agg::Max), ("max_ratio", "ratio", Agg::Max)],
        },
        "lp-blocks" => Plan {
            columns: &[
                "trial", "n", "p", "blocks", "rc_norm", "rc_lower", "certified", "restricted_norm", "ratio",
                "residual_p2", "seed", "violation",
            ],
            metrics: &[("max_residual_p2", "residual_p2", Agg::Max), ("max_ratio", "ratio", Agg::Max)],
        },
        "p-sweep" => Plan {
            columns: &[
                "construction", "n", "seed", "p", "estimate", "envelope", "ratio", "k_global", "iterations",
                "converged", "violation",
            ],
            metrics: &[("max_ratio", "ratio", Agg::Max)],
        },
        _ => unreachable!("suite names are validated"),
    }
}

/// Trial grid in `(n, d, trial)` order.
fn grid(cfg: &SuiteConfig, sizes: &[usize], dims: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut jobs = Vec::new();
    for &n in sizes {
        for &d in dims {
            for t in 0..cfg.trials {
                jobs.push((n, d, t));
            }
        }
    }
    jobs
}

fn per_job<F>(jobs: Vec<(usize, usize, usize)>, f: F) -> Result<Vec<Row>>
where
    F: Fn(usize, usize, usize) -> Result<Vec<Row>> + Sync,
{
    let blocks: Vec<Vec<Row>> = jobs
        .into_par_iter()
        .map(|(n, d, t)| f(n, d, t))
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn riesz_rows(cfg: &SuiteConfig, rs1: bool) -> Result<Vec<Row>> {
    let opts = SplitOptions::default();
    per_job(grid(cfg, &cfg.n, &cfg.d), |n, d, t| {
        let seed = instance_seed(cfg.seed, n, d, t);
        let mut rng = rng_for(seed);
        let family = random_riesz_family(n, d, d >= 2 && t % 2 == 1, &mut rng)?;
        let x = random_complex(n, n, &mut rng);
        cfg.p
            .iter()
            .map(|&p| {
                let inst = RieszInstance::new(family.clone(), x.clone(), p)?;
                let m = measure(&inst, cfg.k_global, &opts)?;
                let violation = if rs1 { m.rs1_violation() } else { m.rs2_violation() };
                Ok(row![
                    t, n, d, p, m.c_p, m.norm_x, m.norm_diag, m.rc_norm, m.ratio_rs1, m.deficit_rs2, seed,
                    m.rc_lower, m.certified, m.ratio_rs1 / m.c_p, violation,
                ])
            })
            .collect()
    })
}

fn duality_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    per_job(grid(cfg, &cfg.n, &cfg.d), |n, d, t| {
        let seed = instance_seed(cfg.seed, n, d, t);
        let mut rng = rng_for(seed);
        let family = random_riesz_family(n, d, d >= 2 && t % 2 == 1, &mut rng)?;
        let supported = |m: ComplexMatrix| {
            ComplexMatrix::from_fn(n, n, |j, k| {
                if family.coincide(j, k) {
                    Complex64::new(0.0, 0.0)
                } else {
                    m.get(j, k)
                }
            })
        };
        let x = supported(random_complex(n, n, &mut rng));
        let y = supported(random_complex(n, n, &mut rng));
        let tr = x.matmul(&y)?.trace();
        cfg.p
            .iter()
            .map(|&p| {
                let residual = duality_identity_check(&x, &y, &family, p)?;
                let tol = TOL_DUALITY * (1.0 + tr.norm());
                Ok(row![t, n, d, p, residual, tr.norm(), tol, seed, !duality_passes(residual, tr)])
            })
            .collect()
    })
}

fn khintchine_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    per_job(grid(cfg, &cfg.n, &cfg.d), |n, d, t| {
        let seed = instance_seed(cfg.seed, n, d, t);
        let mut rng = rng_for(seed);
        let vectors: Vec<CVector> = (0..d).map(|_| gaussian_vector(d, false, &mut rng)).collect();
        let family = VectorFamily::from_vectors(d, vectors)?;
        let xs: Vec<ComplexMatrix> = (0..d).map(|_| random_complex(n, n, &mut rng)).collect();
        let sampler = GaussianSampler::new(&family, seed);
        cfg.p
            .iter()
            .map(|&p| {
                let r = khintchine_ratio(&xs, &family, p, &sampler, t as u64, cfg.samples)?;
                let b_emp = if r.rc.lower > 0.0 {
                    r.numerator / (r.rc.lower * p.sqrt())
                } else {
                    f64::INFINITY
                };
                let violation = r.ratio < 1.0 / cfg.k_global || b_emp > cfg.k_global;
                Ok(row![
                    t, n, d, p, r.numerator, r.numerator_err, r.rc.value, r.rc.lower, r.rc.certified, r.ratio,
                    r.ratio_err, r.gamma_p, b_emp, r.samples, seed, violation,
                ])
            })
            .collect()
    })
}

fn unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let v = gaussian_vector(d, false, rng);
    let len = crate::family::norm(&v);
    v.map(|z| z / len)
}

fn mc_row(t: usize, d: usize, kind: &str, inner: f64, e: &McEstimate, seed: u64) -> Row {
    let z = if e.std_err > 0.0 {
        (e.value - e.target) / e.std_err
    } else {
        0.0
    };
    row![t, d, kind, inner, e.value, e.std_err, e.target, z, e.samples, seed, !e.covers(3.0)]
}

fn gaussian_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    per_job(grid(cfg, &[0], &cfg.d), |_, d, t| {
        let seed = instance_seed(cfg.seed, 0, d, t);
        let mut rng = rng_for(seed);
        let dim = d.max(2);
        let family = VectorFamily::from_vectors(dim, vec![unit_vector(dim, &mut rng), unit_vector(dim, &mut rng)])?;
        let inner = crate::family::inner(family.vector(0), family.vector(1)).re;
        let sampler = GaussianSampler::new(&family, seed);
        let cov = sgn_covariance(&sampler, &family, 0, 1, t as u64, cfg.samples)?;
        let proj = projection_coefficient(&sampler, &family, 0, 1, t as u64, cfg.samples)?;
        Ok(vec![
            mc_row(t, d, "arcsin", inner, &cov, seed),
            mc_row(t, d, "projection", inner, &proj, seed),
        ])
    })
}

fn estimate_row_parts(m: &SchurSymbol, p: f64, envelope: f64, k: f64) -> Result<(f64, f64, bool, bool)> {
    let est = estimate_sp_norm(m, p, &EstimateOptions::default())?;
    let ratio = ratio_or_zero(est.value, envelope);
    Ok((est.value, ratio, est.converged, !(ratio <= k)))
}

fn gh_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    per_job(grid(cfg, &cfg.n, &cfg.d), |n, d, t| {
        let seed = instance_seed(cfg.seed, n, d, t);
        let mut rng = rng_for(seed);
        let (fams, lambda) = random_gh_families(n, d, &mut rng)?;
        let m = gh_symbol(&fams, &lambda)?;
        let corner_ok = corner_embed(&m, &fams, &lambda).is_ok();
        let max_abs = m.max_abs();
        let kind = Construction::Gh { dim: d };
        cfg.p
            .iter()
            .map(|&p| {
                let env = kind.envelope(p, 1.0);
                let (est, ratio, conv, over) = estimate_row_parts(&m, p, env, cfg.k_global)?;
                let violation = over || !corner_ok || max_abs > 1.0 + 1e-12;
                Ok(row![
                    t, n, d, p, max_abs, m.degenerate().len(), corner_ok, est, env, ratio, conv, seed, violation,
                ])
            })
            .collect()
    })
}

fn param_f64(cfg: &SuiteConfig, key: &str, default: f64) -> Result<f64> {
    match cfg.params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::Config(format!("parameter `{key}` must be a number"))),
    }
}

fn param_identity(cfg: &SuiteConfig, key: &str) -> Result<bool> {
    match cfg.params.get(key).and_then(Value::as_str) {
        None | Some("random") => Ok(false),
        Some("id") | Some("identity") => Ok(true),
        Some(other) => Err(Error::Config(format!("unknown value `{other}` for `{key}`"))),
    }
}

fn divided_rows(cfg: &SuiteConfig, beta: Option<f64>) -> Result<Vec<Row>> {
    let identity = param_identity(cfg, "f")?;
    per_job(grid(cfg, &cfg.n, &[0]), |n, _, t| {
        let seed = instance_seed(cfg.seed, n, 0, t);
        let mut rng = rng_for(seed);
        let f = monotone_table(n, identity, &mut rng)?;
        let lip = f.lipschitz();
        let (m, b, kind) = match beta {
            None => (arazy_sqrt_symbol(&f)?, 0.5, Construction::Arazy { identity }),
            Some(b) => (beta_divided_symbol(&f, b)?, b, Construction::Beta { beta: b, identity }),
        };
        let cap = lip.powf(b);
        let max_abs = m.max_abs();
        cfg.p
            .iter()
            .map(|&p| {
                let env = kind.envelope(p, lip);
                let (est, ratio, conv, over) = estimate_row_parts(&m, p, env, cfg.k_global)?;
                let violation = over || max_abs > cap * (1.0 + 1e-12);
                Ok(row![t, n, p, b, lip, max_abs, cap, est, env, ratio, conv, seed, violation])
            })
            .collect()
    })
}

fn triangular_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    per_job(grid(cfg, &cfg.n, &[0]), |n, _, t| {
        let seed = instance_seed(cfg.seed, n, 0, t);
        let mut rng = rng_for(seed);
        let (data, label) = if t == 0 {
            (TriangularData::identity(n), "identity")
        } else {
            let a = (0..n).map(|_| rng.random_range(-1..=n as i64)).collect();
            (TriangularData { a }, "random")
        };
        let m = triangular_symbol(&data)?;
        cfg.p
            .iter()
            .map(|&p| {
                let env = c_max(p);
                let (est, ratio, conv, over) = estimate_row_parts(&m, p, env, cfg.k_global)?;
                Ok(row![t, n, p, label, est, env, ratio, conv, seed, over])
            })
            .collect()
    })
}

fn marcinkiewicz_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    per_job(grid(cfg, &cfg.n, &[0]), |n, _, t| {
        let seed = instance_seed(cfg.seed, n, 0, t);
        let mut rng = rng_for(seed);
        let m = random_bv_symbol(n, &mut rng)?;
        let dec = marcinkiewicz_decompose(&m)?;
        let residual = dec.reconstruct().max_abs_diff(m.entries());
        let weights = dec.max_weight_sum();
        let bound = dec.variation_bound();
        let broken = residual > 1e-9 || weights > bound * (1.0 + 1e-12) + 1e-12;
        cfg.p
            .iter()
            .map(|&p| {
                let env = c_max(p) * bound;
                let (est, ratio, conv, over) = estimate_row_parts(&m, p, env, cfg.k_global)?;
                Ok(row![
                    t, n, p, residual, weights, bound, dec.term_count(), est, env, ratio, conv, seed, broken || over,
                ])
            })
            .collect()
    })
}

fn imaginary_power(grid: &UniformGrid, s: f64) -> Result<SchurSymbol> {
    grid.sample_symbol(Provenance::new("imaginary-power").with("s", s), |x, y| {
        let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        Complex64::from_polar(1.0, s * r.ln())
    })
}

fn mikhlin_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    per_job(grid(cfg, &cfg.n, &cfg.d), |n, d, t| {
        let seed = instance_seed(cfg.seed, n, d, t);
        let s = 0.25 * (1 + t % 6) as f64;
        let coarse = UniformGrid::new(vec![0.0; d], 1.0, vec![n; d])?;
        let fine = UniformGrid::new(vec![0.0; d], 0.5, vec![2 * n - 1; d])?;
        let m = imaginary_power(&coarse, s)?;
        let cond = mikhlin_condition(&coarse, &m)?;
        let refined = mikhlin_condition(&fine, &imaginary_power(&fine, s)?)?;
        let rel_change = (cond.value - refined.value).abs() / cond.value;
        let unstable = !cond.value.is_finite() || !(rel_change <= 0.1);
        cfg.p
            .iter()
            .map(|&p| {
                let env = cond.value * c_max(p);
                let (est, ratio, conv, over) = estimate_row_parts(&m, p, env, cfg.k_global)?;
                Ok(row![
                    t, n, d, p, s, cond.order, cond.value, cond.sum, cond.skipped, refined.value, rel_change, est,
                    env, ratio, conv, seed, unstable || over,
                ])
            })
            .collect()
    })
}

fn lp_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    let opts = SplitOptions::default();
    per_job(grid(cfg, &cfg.n, &[0]), |n, _, t| {
        let seed = instance_seed(cfg.seed, n, 0, t);
        let mut rng = rng_for(seed);
        let blocks = DyadicBlocks::integer(n);
        let x = random_complex(n, n, &mut rng);
        let sq = block_square_function(&blocks, &x)?;
        let restricted = blocks.restrict_to_union(&x);
        cfg.p
            .iter()
            .map(|&p| {
                let rc = sq.rc_norm_with(p, &opts)?;
                let norm = schatten_norm(&restricted, p)?;
                let residual = (p == 2.0).then(|| (rc.value - norm).abs() / norm);
                let violation = residual.is_some_and(|r| !(r <= 1e-10));
                Ok(row![
                    t, n, p, blocks.len(), rc.value, rc.lower, rc.certified, norm, rc.value / norm, residual, seed,
                    violation,
                ])
            })
            .collect()
    })
}

fn sweep_rows(cfg: &SuiteConfig) -> Result<Vec<Row>> {
    let mut params = cfg.params.clone();
    let construction = match params.remove("construction") {
        None => "gh".to_string(),
        Some(Value::String(s)) => s,
        Some(_) => return Err(Error::Config("parameter `construction` must be a string".into())),
    };
    let sweep = SweepConfig {
        construction,
        params,
        sizes: cfg.n.clone(),
        p_list: cfg.p.clone(),
        seeds: (0..cfg.trials).map(|t| instance_seed(cfg.seed, 0, 0, t)).collect(),
        k_global: cfg.k_global,
    };
    Ok(p_sweep(&sweep, &EstimateOptions::default())?
        .into_iter()
        .map(|r| {
            let violation = r.violation();
            row![
                r.construction, r.n, r.seed, r.p, r.estimate, r.envelope, r.ratio, r.k_global, r.iterations,
                r.converged, violation,
            ]
        })
        .collect())
}

fn aggregate(values: impl Iterator<Item = f64>, agg: Agg) -> Option<f64> {
    values
        .filter(|v| !v.is_nan())
        .map(|v| if let Agg::MaxAbs = agg { v.abs() } else { v })
        .reduce(|a, b| match agg {
            Agg::Min => a.min(b),
            _ => a.max(b),
        })
}

/// Runs one suite over its trial grid. Rows are ordered by trial index
/// regardless of scheduling; a report with violations is still returned.
pub fn run_suite(cfg: &SuiteConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let rows = match cfg.suite.as_str() {
        "rs1" => riesz_rows(cfg, true)?,
        "rs2" => riesz_rows(cfg, false)?,
        "duality" => duality_rows(cfg)?,
        "khintchine" => khintchine_rows(cfg)?,
        "gaussian-identities" => gaussian_rows(cfg)?,
        "gh" => gh_rows(cfg)?,
        "arazy" => divided_rows(cfg, None)?,
        "beta" => divided_rows(cfg, Some(param_f64(cfg, "beta", 0.3)?))?,
        "triangular" => triangular_rows(cfg)?,
        "marcinkiewicz" => marcinkiewicz_rows(cfg)?,
        "mikhlin" => mikhlin_rows(cfg)?,
        "lp-blocks" => lp_rows(cfg)?,
        "p-sweep" => sweep_rows(cfg)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    let plan = plan(&cfg.suite);
    debug_assert!(rows.iter().all(|r| r.len() == plan.columns.len()));
    let violations = rows.iter().filter(|r| r.last() == Some(&Cell::Bool(true))).count() as u64;
    let mut metrics = BTreeMap::new();
    for &(name, column, agg) in plan.metrics {
        let c = plan.columns.iter().position(|&x| x == column).expect("metric column exists");
        let v = aggregate(rows.iter().filter_map(|r| r[c].as_f64()), agg);
        metrics.insert(name.to_string(), Cell::from(v));
    }
    Ok(ExperimentReport {
        schema: SCHEMA.to_string(),
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        suite: cfg.suite.clone(),
        config: cfg.echo(),
        columns: plan.columns.iter().map(|s| s.to_string()).collect(),
        summary: Summary {
            rows: rows.len() as u64,
            violations,
            metrics,
        },
        rows,
    })
}
