//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runtime budgets count as part of each criterion.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use schurlab::family::{real_vector, VectorFamily};
use schurlab::gaussian::{gamma_p, khintchine_ratio, GaussianSampler, N_CALIBRATION};
use schurlab::linalg::{random_complex, schatten_norm, ComplexMatrix};
use schurlab::norm_lab::amplification_ladder;
use schurlab::riesz::{c_p, duality_identity_check, riesz_transform};
use schurlab::suite::{instance_seed, random_bv_symbol, random_riesz_family, render_report, ConfigOverrides};
use schurlab::zoo::marcinkiewicz_decompose;
use schurlab::{
    estimate_sp_norm, run_suite, EstimateOptions, ExperimentReport, Format, Provenance, RieszInstance,
    SchurSymbol, SuiteConfig,
};

type Outcome = Result<(bool, String), schurlab::Error>;

const K_GLOBAL: f64 = 8.0;
const MASTER_SEED: u64 = 20_240_601;

fn suite(name: &str, tweak: impl FnOnce(&mut ConfigOverrides)) -> schurlab::Result<ExperimentReport> {
    let mut o = ConfigOverrides {
        suite: Some(name.to_string()),
        seed: Some(MASTER_SEED),
        k_global: Some(K_GLOBAL),
        ..Default::default()
    };
    tweak(&mut o);
    run_suite(&SuiteConfig::resolve(o)?)
}

fn column_max(r: &ExperimentReport, name: &str) -> schurlab::Result<f64> {
    Ok(r.floats(name)?.into_iter().flatten().fold(f64::NEG_INFINITY, f64::max))
}

fn off_support(x: &ComplexMatrix, family: &VectorFamily) -> ComplexMatrix {
    let n = family.len();
    ComplexMatrix::from_fn(n, n, |j, k| if family.coincide(j, k) { Complex64::new(0.0, 0.0) } else { x.get(j, k) })
}

fn instance(k: usize) -> schurlab::Result<(VectorFamily, ComplexMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(MASTER_SEED, 0, 0, k));
    let n = rng.random_range(2..=8);
    let d = rng.random_range(1..=4);
    let family = random_riesz_family(n, d, d >= 2 && k % 2 == 1, &mut rng)?;
    let x = random_complex(n, n, &mut rng);
    Ok((family, x))
}

fn pythagoras() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..200 {
        let (family, x) = instance(k)?;
        let n = family.len();
        // E(x) keeps the blocks u_j = u_k.
        let diag_sq: f64 = (0..n)
            .flat_map(|j| (0..n).map(move |l| (j, l)))
            .filter(|&(j, l)| family.coincide(j, l))
            .map(|(j, l)| x.get(j, l).norm_sqr())
            .sum();
        let rc = riesz_transform(&RieszInstance::new(family, x.clone(), 2.0)?)?.rc_norm(2.0)?;
        let lhs = x.frobenius().powi(2);
        worst = worst.max((lhs - diag_sq - rc.value.powi(2)).abs() / lhs);
    }
    Ok((worst <= 1e-10, format!("max relative error {worst:.2e} over 200 instances")))
}

fn duality() -> Outcome {
    let ps = [4.0 / 3.0, 1.5, 2.0, 3.0, 4.0];
    let mut worst = 0.0f64;
    for k in 0..200 {
        let (family, x) = instance(1000 + k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let y = off_support(&random_complex(family.len(), family.len(), &mut rng), &family);
        let x = off_support(&x, &family);
        worst = worst.max(duality_identity_check(&x, &y, &family, ps[k % ps.len()])?);
    }
    Ok((worst <= 1e-9, format!("max residual {worst:.2e} over 200 supported pairs")))
}

fn riesz_sweep() -> Outcome {
    let r = suite("rs1", |o| {
        o.p = Some(vec![4.0 / 3.0, 1.5, 2.0, 3.0, 4.0]);
        o.n = Some(vec![4, 8, 16]);
        o.d = Some(vec![1, 2, 4]);
        o.trials = Some(50);
    })?;
    // The c_p column must match the closed form exactly.
    let p = r.floats("p")?;
    let cp = r.floats("c_p")?;
    let cp_exact = p.iter().zip(&cp).all(|(p, c)| c_p(p.unwrap()) == c.unwrap());
    let ratio = column_max(&r, "ratio_over_c_p")?;
    let deficit = column_max(&r, "deficit_rs2")?;
    Ok((
        cp_exact && ratio <= K_GLOBAL && deficit <= 0.0 && r.rows.len() == 2250,
        format!(
            "{} rows, max ratio_rs1/c_p {ratio:.4}, max deficit_rs2 {deficit:.4}, c_p exact {cp_exact}",
            r.rows.len()
        ),
    ))
}

fn gaussian_identities() -> Outcome {
    // The suite's own defaults (seed, dimension, trial count) at the larger N.
    let r = run_suite(&SuiteConfig::resolve(ConfigOverrides {
        suite: Some("gaussian-identities".into()),
        samples: Some(N_CALIBRATION),
        ..Default::default()
    })?)?;
    let z: Vec<f64> = r.floats("z")?.into_iter().flatten().collect();
    let worst = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((
        r.passed() && worst <= 3.0,
        format!("{} estimates at N = {N_CALIBRATION}, max |z| {worst:.3}", z.len()),
    ))
}

fn khintchine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED);
    let mut u: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
    let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    u.iter_mut().for_each(|v| *v /= len);
    let family = VectorFamily::from_vectors(3, vec![real_vector(&u)])?;
    let x = random_complex(4, 4, &mut rng);
    let sampler = GaussianSampler::new(&family, MASTER_SEED);
    let mut single = true;
    let mut worst_z = 0.0f64;
    let mut worst_rc = 0.0f64;
    for (i, p) in [1.5, 2.0, 3.0, 4.0].into_iter().enumerate() {
        let rep = khintchine_ratio(&[x.clone()], &family, p, &sampler, i as u64, 200_000)?;
        let z = (rep.ratio - gamma_p(p)) / rep.ratio_err;
        // A unit vector tensor has RC_p norm ‖x‖_p.
        let rc_err = (rep.rc.value - schatten_norm(&x, p)?).abs() / schatten_norm(&x, p)?;
        worst_z = worst_z.max(z.abs());
        worst_rc = worst_rc.max(rc_err);
        single &= z.abs() <= 3.0 && rc_err <= 1e-6;
    }
    let r = suite("khintchine", |o| o.p = Some(vec![1.5, 2.0, 3.0, 4.0]))?;
    let b = column_max(&r, "b_emp")?;
    Ok((
        single && b <= 4.0 && r.passed(),
        format!("single term max |z| {worst_z:.3} (rc error {worst_rc:.1e}); sweep max B_emp {b:.3}"),
    ))
}

fn random_symbol(rng: &mut ChaCha8Rng, n: usize) -> schurlab::Result<SchurSymbol> {
    SchurSymbol::new(random_complex(n, n, rng), Provenance::new("random").with("n", n))
}

fn estimator_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 6);
    let opts = EstimateOptions::default();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let m = random_symbol(&mut rng, n)?;
        let max = (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .map(|(j, k)| m.get(j, k).norm())
            .fold(0.0, f64::max);
        worst = worst.max((estimate_sp_norm(&m, 2.0, &opts)?.value - max).abs() / max);
    }
    let mut drop = 0.0f64;
    for i in 0..12 {
        let n = rng.random_range(2..=4);
        let m = random_symbol(&mut rng, n)?;
        let p = [4.0 / 3.0, 3.0, 1.0, f64::INFINITY][i % 4];
        let ladder = amplification_ladder(&m, p, &[1, 2, 3], &opts)?;
        for w in ladder.windows(2) {
            drop = drop.max(w[0].value - w[1].value);
        }
    }
    Ok((
        worst <= 1e-8 && drop <= 1e-6,
        format!("p=2 max relative error {worst:.2e} on 100 symbols; largest ladder drop {drop:.2e}"),
    ))
}

fn marcinkiewicz() -> Outcome {
    let mut worst_res = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for t in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(MASTER_SEED, 32, 0, t));
        let m = random_bv_symbol(32, &mut rng)?;
        let dec = marcinkiewicz_decompose(&m)?;
        worst_res = worst_res.max(dec.reconstruct().max_abs_diff(m.entries()));
        // sup_j (|M(j,0)| + Σ_k |M(j,k+1) − M(j,k)|), computed here from the entries.
        let bound = (0..32)
            .map(|j| {
                m.get(j, 0).norm() + (1..32).map(|k| (m.get(j, k) - m.get(j, k - 1)).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max);
        worst_excess = worst_excess.max(dec.max_weight_sum() - bound);
    }
    Ok((
        worst_res <= 1e-9 && worst_excess <= 1e-12,
        format!("max residual {worst_res:.2e}, max weight-sum excess over variation bound {worst_excess:.2e}"),
    ))
}

fn constant_ledgers() -> Outcome {
    let ps = || Some(vec![4.0 / 3.0, 2.0, 4.0]);
    let tri = suite("triangular", |o| {
        o.n = Some(vec![16]);
        o.p = ps();
    })?;
    let gh = suite("gh", |o| o.p = ps())?;
    let arazy = suite("arazy", |o| o.p = ps())?;
    let mut line = Vec::new();
    let mut ok = true;
    for r in [&tri, &gh, &arazy] {
        let max = column_max(r, "ratio")?;
        ok &= r.passed() && max <= K_GLOBAL;
        line.push(format!("{} max ratio {max:.3}", r.suite));
    }
    Ok((ok, line.join(", ")))
}

fn littlewood_paley() -> Outcome {
    let r = suite("lp-blocks", |o| {
        o.n = Some(vec![8, 12]);
        o.p = Some(vec![2.0]);
        o.trials = Some(25);
    })?;
    let worst = column_max(&r, "residual_p2")?;
    // Independent check of the restricted norm: dyadic blocks on ℤ cover every off-diagonal pair.
    let mut hs_err = 0.0f64;
    for (row, norm) in r.rows.iter().zip(r.floats("restricted_norm")?) {
        let seed = match row[r.column("seed").unwrap()] {
            schurlab::suite::Cell::Uint(s) => s,
            _ => unreachable!(),
        };
        let n = row[r.column("n").unwrap()].as_f64().unwrap() as usize;
        let x = random_complex(n, n, &mut ChaCha8Rng::seed_from_u64(seed));
        let off: f64 = (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .filter(|(j, k)| j != k)
            .map(|(j, k)| x.get(j, k).norm_sqr())
            .sum::<f64>()
            .sqrt();
        hs_err = hs_err.max((norm.unwrap() - off).abs() / off);
    }
    Ok((
        r.rows.len() == 50 && worst <= 1e-10 && hs_err <= 1e-12,
        format!("{} instances, max relative residual {worst:.2e}", r.rows.len()),
    ))
}

fn determinism() -> Outcome {
    let mut mismatched = Vec::new();
    for name in schurlab::suite::SUITES {
        let tweak = |o: &mut ConfigOverrides| {
            o.trials = Some(2);
            o.samples = Some(20_000);
            o.n = Some(vec![if name == "mikhlin" { 9 } else { 6 }]);
            o.p = Some(vec![if name == "gh" { 1.0 } else { 1.5 }, 3.0]);
        };
        let a = suite(name, tweak)?;
        let b = suite(name, tweak)?;
        for f in [Format::Csv, Format::Json] {
            if render_report(&a, f)? != render_report(&b, f)? {
                mismatched.push(format!("{name}/{f:?}"));
            }
        }
    }
    Ok((
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("all {} suites byte-identical in csv and json", schurlab::suite::SUITES.len())
        } else {
            format!("differing reports: {}", mismatched.join(" "))
        },
    ))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("p=2 Pythagoras", Duration::from_secs(5), pythagoras),
        ("duality identity", Duration::from_secs(5), duality),
        ("RS1/RS2 sweep", Duration::from_secs(300), riesz_sweep),
        ("gaussian identities", Duration::from_secs(60), gaussian_identities),
        ("Khintchine envelope", Duration::from_secs(120), khintchine),
        ("estimator oracles", Duration::from_secs(60), estimator_oracles),
        ("Marcinkiewicz decomposition", Duration::from_secs(30), marcinkiewicz),
        ("constant-growth ledgers", Duration::from_secs(300), constant_ledgers),
        ("Littlewood-Paley p=2", Duration::from_secs(10), littlewood_paley),
        ("determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {:<28} {}  {detail} [{:.2} s of {} s]",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
