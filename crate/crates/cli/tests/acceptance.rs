//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any of them fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hpl_cli::{corpus, oracle};
use hpl_core::blaschke::{
    exm1_sequences, probe_conditions, prop1_sequences, rho, BlaschkeProduct, ProbeGrid, ProbeTolerances, Verdict,
};
use hpl_core::fourier::FourierSymbol;
use hpl_core::operators::{
    hankel, model_projection, submodule_projection, toeplitz, verify_thma_chain, verify_toeplitz_identity,
    ChainOptions, TruncatedOperator,
};
use hpl_core::polydisc::{
    product_of_inner_projections, tridisc_growth, verify_two_subspace_identity, MultiBasis, SeparatedSymbolPair,
};
use hpl_core::spectral::{all_singular_values, CompactnessVerdict};
use num_complex::Complex;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn oracle_rho_real(ga: f64, gb: f64) -> f64 {
    // a = 1 - ga, b = 1 - gb, both real.
    (gb - ga).abs() / (ga + gb - ga * gb)
}

fn prop1_metric() -> Outcome {
    let (a, b) = prop1_sequences::<f64>(20).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for n in 1..=15 {
        let r = rho(&a.points()[n - 1], &b.points()[n - 1]);
        let closed = 1.0 / (3.0 - 2.0 * 0.25f64.powi(n as i32));
        worst = worst.max((r - closed).abs());
    }
    let r20 = rho(&a.points()[19], &b.points()[19]);
    let far = (r20 - 1.0 / 3.0).abs();
    ensure(worst <= 1e-12 && far <= 1e-6, format!("max gap {worst:.2e} (n<=15), |rho_20 - 1/3| = {far:.2e}"))
}

fn exm1_metric() -> Outcome {
    let (a, b) = exm1_sequences::<f64>(40).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for n in 1..=40 {
        let r = rho(&a.points()[n - 1], &b.points()[n - 1]);
        let inv = 1.0 / n as f64;
        let closed = inv / ((2.0 + inv) - 0.5f64.powi(n as i32) * (1.0 + inv));
        worst = worst.max((r - closed).abs());
    }
    let r30 = rho(&a.points()[29], &b.points()[29]);
    ensure(worst <= 1e-12 && r30 < 0.02, format!("max gap {worst:.2e} (n<=40), rho_30 = {r30:.6}"))
}

fn schwarz_pick() -> Outcome {
    let (a, b) = exm1_sequences::<f64>(30).map_err(|e| e.to_string())?;
    let b2 = BlaschkeProduct::from_zeros(b.clone());
    let gaps_b: Vec<f64> = b.points().iter().map(|p| p.gap()).collect();
    let mut worst_ratio = 0.0f64;
    let mut worst_eval = 0.0f64;
    for n in 1..=25 {
        let ga = 0.5f64.powi(n as i32);
        // |B2(a_n)| as a product of pseudo-hyperbolic distances to its zeros.
        let direct: f64 = gaps_b.iter().map(|&gb| oracle_rho_real(ga, gb)).product();
        let lib = b2.modulus_at(&a.points()[n - 1]);
        worst_eval = worst_eval.max((lib - direct).abs());
        let bound = oracle_rho_real(ga, gaps_b[n - 1]);
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(lib / bound);
        }
    }
    ensure(
        worst_ratio <= 1.0 && worst_eval <= 1e-12,
        format!("max |B2(a_n)|/rho = {worst_ratio:.6}, library vs product oracle {worst_eval:.2e}"),
    )
}

fn dense_toeplitz(f: &FourierSymbol<f64>, n: usize) -> Vec<Complex<f64>> {
    let mut m = vec![Complex::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            m[j * n + k] = f.coeff(j as i64 - k as i64);
        }
    }
    m
}

fn toeplitz_hankel() -> Outcome {
    let pairs = corpus::toeplitz_pairs(20240917, 50, 3);
    let mut worst = 0.0f64;
    let mut layout = 0.0f64;
    for (f, g) in &pairs {
        let rep = verify_toeplitz_identity(f, g, 24).map_err(|e| e.to_string())?;
        worst = worst.max(rep.residual);
        let t = toeplitz(f, 24);
        let dense = dense_toeplitz(f, 24);
        for j in 0..24 {
            for k in 0..24 {
                layout = layout.max((t.entry(j, k) - dense[j * 24 + k]).norm());
            }
        }
    }
    ensure(worst <= 1e-12 && layout == 0.0, format!("50 pairs, max core residual {worst:.2e}"))
}

fn blaschke(zeros: &[(f64, f64)]) -> BlaschkeProduct<f64> {
    let z: Vec<_> = zeros.iter().map(|&(a, b)| Complex::new(a, b)).collect();
    BlaschkeProduct::from_complex_zeros("acc", &z).unwrap()
}

fn thma_chain() -> Outcome {
    let pairs = vec![
        (BlaschkeProduct::monomial(1), BlaschkeProduct::monomial(1)),
        (BlaschkeProduct::monomial(1), BlaschkeProduct::monomial(2)),
        (blaschke(&[(0.4, 0.1)]), blaschke(&[(-0.3, 0.2)])),
        (blaschke(&[(0.2, -0.3), (0.5, 0.0)]), blaschke(&[(-0.1, 0.45)])),
        (blaschke(&[(0.3, 0.3)]), blaschke(&[(-0.4, 0.0), (0.0, -0.35)])),
        (blaschke(&[(0.45, 0.1), (-0.2, 0.3)]), blaschke(&[(0.1, -0.5), (-0.3, -0.2)])),
    ];
    let mut worst_ratio = 0.0f64;
    let mut all = true;
    for (phi, psi) in &pairs {
        let rep = verify_thma_chain(phi, psi, 48, &ChainOptions::default()).map_err(|e| e.to_string())?;
        all &= rep.passed();
        for r in [&rep.reduction, &rep.defect] {
            worst_ratio = worst_ratio.max(r.residual / r.allowed);
        }
    }
    ensure(all, format!("{} pairs at N = 48, max residual/budget {worst_ratio:.2e}", pairs.len()))
}

fn generated_pair(p: usize, q: usize) -> SeparatedSymbolPair<f64> {
    SeparatedSymbolPair::new(corpus::generated_blaschke(p, 0), 0, corpus::generated_blaschke(q, 1), 1)
}

fn bidisc_rank() -> Outcome {
    let mut notes = Vec::new();
    for p in 1..=3 {
        for q in 1..=3 {
            let pair = generated_pair(p, q);
            let mut ranks = Vec::new();
            for d in [12, 16, 20] {
                let op = product_of_inner_projections(&pair, &MultiBasis::new(vec![d, d]).unwrap())
                    .map_err(|e| e.to_string())?;
                let s = all_singular_values(&op);
                let k = p * q;
                let ones = s[..k].iter().all(|v| (v - 1.0).abs() <= 1e-8);
                let rest = s[k..].iter().all(|v| v.abs() < 1e-8);
                if !(ones && rest) {
                    return Err(format!("({p},{q}) at dim {d}: singular values off"));
                }
                ranks.push(k);
            }
            notes.push(format!("{p}x{q}:{}", ranks[0]));
        }
    }
    Ok(format!("ranks stable at dims 12,16,20 [{}]", notes.join(" ")))
}

fn tridisc() -> Outcome {
    let mut notes = Vec::new();
    for p in 1..=2 {
        for q in 1..=2 {
            let pair = generated_pair(p, q);
            let rep = tridisc_growth(&pair, &[3, 4, 5, 6]).map_err(|e| e.to_string())?;
            let expect: Vec<usize> = [3, 4, 5, 6].iter().map(|n| p * q * n).collect();
            if rep.counts != expect || rep.verdict != CompactnessVerdict::NoncompactConsistent {
                return Err(format!("({p},{q}): counts {:?}, verdict {}", rep.counts, rep.verdict));
            }
            notes.push(format!("{p}x{q}:{:?}", rep.counts));
        }
    }
    Ok(format!("noncompact-consistent, {}", notes.join(" ")))
}

fn two_subspace() -> Outcome {
    let basis = MultiBasis::new(vec![12, 12]).unwrap();
    let mut worst_q = 0.0f64;
    let mut worst_i = 0.0f64;
    for (p, q) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)] {
        let rep = verify_two_subspace_identity(&generated_pair(p, q), &basis).map_err(|e| e.to_string())?;
        worst_q = worst_q.max(rep.quotient_identity.residual);
        worst_i = worst_i.max(rep.intersection_identity.residual);
    }
    ensure(
        worst_q <= 1e-10 && worst_i <= 1e-10,
        format!("dims (12,12): quotient identity {worst_q:.2e}, intersection {worst_i:.2e}"),
    )
}

fn row_major(op: &TruncatedOperator<f64>) -> Vec<Complex<f64>> {
    let m = op.matrix();
    (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect()
}

fn spectral_oracle() -> Outcome {
    let mut ops = Vec::new();
    let mut r = corpus::rng(7);
    for n in 1..=12 {
        let f = corpus::random_band_symbol(&mut r, 3);
        ops.push(toeplitz(&f, n));
        ops.push(hankel(&f, n));
    }
    for n in [3, 6, 9, 12] {
        let b = corpus::random_blaschke(&mut r, 2, 0.6);
        ops.push(model_projection(&b, n).unwrap());
        ops.push(submodule_projection(&b, n).unwrap());
    }
    ops.push(product_of_inner_projections(&generated_pair(1, 2), &MultiBasis::new(vec![3, 4]).unwrap()).unwrap());
    let mut worst = 0.0f64;
    let mut gram = 0.0f64;
    for op in &ops {
        let data = row_major(op);
        let s = all_singular_values(op);
        let o = oracle::jacobi_singular_values(op.rows(), op.cols(), &data);
        let scale = o[0].max(f64::MIN_POSITIVE);
        for (a, b) in s.iter().zip(&o) {
            worst = worst.max((a - b).abs() / scale);
        }
        let (tg, _) = oracle::gram_cross_check(op.rows(), op.cols(), &data, &o);
        gram = gram.max(tg);
    }
    ensure(
        worst <= 1e-10 && gram <= 1e-10,
        format!("{} matrices, max relative gap {worst:.2e}, trace check {gram:.2e}", ops.len()),
    )
}

fn probes() -> Outcome {
    let tol = ProbeTolerances::default();
    let (a, b) = exm1_sequences::<f64>(30).map_err(|e| e.to_string())?;
    let grid = ProbeGrid::geometric(2.0, 12).map_err(|e| e.to_string())?;
    let (phi, psi) = (BlaschkeProduct::from_zeros(a), BlaschkeProduct::from_zeros(b));
    let ex = probe_conditions(&phi, &psi, &grid, 256, &tol).map_err(|e| e.to_string())?;
    let at_a10 = ex.min_of_max[9];
    let s = ex.verdict("S");

    let (a40, b40) = exm1_sequences::<f64>(40).map_err(|e| e.to_string())?;
    let longer = probe_conditions(&BlaschkeProduct::from_zeros(a40), &BlaschkeProduct::from_zeros(b40), &grid, 256, &tol)
        .map_err(|e| e.to_string())?;
    let drift = (longer.min_of_max[9] - at_a10).abs();

    let (pa, pb) = prop1_sequences::<f64>(30).map_err(|e| e.to_string())?;
    let pgrid = ProbeGrid::geometric(4.0, 12).map_err(|e| e.to_string())?;
    let pr = probe_conditions(&BlaschkeProduct::from_zeros(pa), &BlaschkeProduct::from_zeros(pb), &pgrid, 256, &tol)
        .map_err(|e| e.to_string())?;
    let wc = pr.summary.wc_statistic;
    ensure(
        at_a10 < 0.5 && s == Some(Verdict::ViolatedAtSamples) && wc >= 0.05 && drift < 1e-6,
        format!("exm1 min max at a_10 = {at_a10:.3e}, S {s:?}, prefix 30->40 drift {drift:.1e}; prop1 WC = {wc:.4}"),
    )
}

fn run_bin(args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_hpl"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HPL_OUT")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?} exited with {:?}", status.status.code()))
    }
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 7] = [
        &["probe", "--scenario", "exm1"],
        &["probe", "--scenario", "prop1"],
        &["verify"],
        &["rank"],
        &["rank", "--variables", "3"],
        &["export"],
        &["selftest"],
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (i, args) in runs.iter().enumerate() {
        let first = tmp.path().join(format!("r{i}a"));
        let second = tmp.path().join(format!("r{i}b"));
        run_bin(args, &first)?;
        run_bin(args, &second)?;
        let mut names: Vec<_> = std::fs::read_dir(&first).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            let x = std::fs::read(first.join(&name)).map_err(|e| e.to_string())?;
            let y = std::fs::read(second.join(&name)).map_err(|e| format!("{name:?}: {e}"))?;
            if x != y {
                return Err(format!("{args:?}: {name:?} differs between runs"));
            }
            files += 1;
        }
    }
    Ok(format!("{files} report files byte-identical across two runs"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "matched-zero metric, 4^-n pair", limit: Duration::from_secs(1), run: prop1_metric },
        Criterion { id: 2, name: "matched-zero metric, 2^-n pair", limit: Duration::from_secs(1), run: exm1_metric },
        Criterion { id: 3, name: "Schwarz-Pick bound on 30-zero prefix", limit: Duration::from_secs(5), run: schwarz_pick },
        Criterion { id: 4, name: "Toeplitz-Hankel product identity", limit: Duration::from_secs(10), run: toeplitz_hankel },
        Criterion { id: 5, name: "reduction chain at N = 48", limit: Duration::from_secs(30), run: thma_chain },
        Criterion { id: 6, name: "bidisc product projection rank", limit: Duration::from_secs(60), run: bidisc_rank },
        Criterion { id: 7, name: "tridisc rank growth", limit: Duration::from_secs(120), run: tridisc },
        Criterion { id: 8, name: "quotient and intersection identities", limit: Duration::from_secs(30), run: two_subspace },
        Criterion { id: 9, name: "singular values vs Jacobi oracle", limit: Duration::from_secs(10), run: spectral_oracle },
        Criterion { id: 10, name: "boundary probe regression", limit: Duration::from_secs(60), run: probes },
        Criterion { id: 11, name: "deterministic reports", limit: Duration::from_secs(300), run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit {:?}", c.limit)),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} [{}] {:.2}s: {}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            took.as_secs_f64(),
            detail
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
