//! The five subcommands. Each writes its reports before reporting failure,
//! so a nonzero exit always leaves the evidence on disk.

use hpl_core::blaschke::{
    exm1_sequences, probe_conditions, prop1_sequences, pseudo_hyperbolic, BlaschkeProduct, ProbeGrid, ProbeReport,
    Verdict,
};
use hpl_core::fourier::FourierSymbol;
use hpl_core::operators::{
    self, hankel, matrix_to_bytes, matrix_to_csv, model_projection, model_space_basis, submodule_projection,
    toeplitz, verify_thma_chain, verify_toeplitz_identity, ChainOptions, TruncatedOperator,
};
use hpl_core::polydisc::{
    defect_operator, product_of_inner_projections, separability_check, tridisc_growth, verify_two_subspace_identity,
    DefectSign, MultiBasis, SeparatedSymbolPair, Separability,
};
use hpl_core::spectral::{all_singular_values, compactness_verdict, rank_estimate, CompactnessVerdict};
use num_complex::Complex;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExportItem, ExportKind, Scenario, SymbolSpec};
use crate::corpus;
use crate::oracle;
use crate::output::OutDir;
use crate::{setup_error, CliError};

const DEFAULT_LEVELS: u32 = 12;

// ---------------------------------------------------------------- probe

#[derive(Serialize)]
struct ProbeResult<'a> {
    scenario: Scenario,
    expected_to_hold: Vec<&'static str>,
    regressions: Vec<String>,
    report: &'a ProbeReport,
}

type ProbeSetup = (BlaschkeProduct<f64>, BlaschkeProduct<f64>, ProbeGrid<f64>, Vec<&'static str>);

fn probe_inputs(cfg: &ExperimentConfig) -> Result<ProbeSetup, CliError> {
    let levels = cfg.radii_levels.unwrap_or(DEFAULT_LEVELS);
    let (phi, psi, base, expected) = match cfg.scenario {
        Scenario::Exm1 => {
            let (a, b) = exm1_sequences(cfg.zero_count).map_err(setup_error)?;
            (BlaschkeProduct::from_zeros(a), BlaschkeProduct::from_zeros(b), 2.0, vec![])
        }
        Scenario::Prop1 => {
            let (a, b) = prop1_sequences(cfg.zero_count).map_err(setup_error)?;
            (BlaschkeProduct::from_zeros(a), BlaschkeProduct::from_zeros(b), 4.0, vec!["C", "WC"])
        }
        Scenario::Custom => {
            let (a, b) = cfg
                .custom_pair()?
                .ok_or_else(|| CliError::Config("the custom scenario needs phi and psi".into()))?;
            (a, b, 2.0, vec![])
        }
    };
    let grid = match &cfg.radii {
        Some(r) => ProbeGrid::from_radii(r),
        None => ProbeGrid::geometric(base, levels),
    }
    .map_err(setup_error)?;
    Ok((phi, psi, grid, expected))
}

pub fn probe(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<String, CliError> {
    let (phi, psi, grid, expected) = probe_inputs(cfg)?;
    let report =
        probe_conditions(&phi, &psi, &grid, cfg.angular_samples, &cfg.tolerances.probe()).map_err(setup_error)?;
    let regressions: Vec<String> = expected
        .iter()
        .filter(|c| report.verdict(c) == Some(Verdict::ViolatedAtSamples))
        .map(|c| c.to_string())
        .collect();

    let mut csv = String::from("radius,min_sum,max_of_max,min_of_max\n");
    for i in 0..report.radii.len() {
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            report.radii[i], report.min_sum[i], report.max_of_max[i], report.min_of_max[i]
        ));
    }
    out.write_text("probe.csv", &csv)?;
    let result = ProbeResult { scenario: cfg.scenario, expected_to_hold: expected, regressions: regressions.clone(), report: &report };
    out.write_report("probe_report.json", "probe", cfg, result)?;

    let summary = report.verdicts.iter().map(|(k, v)| format!("{k}={}", verdict_name(*v))).collect::<Vec<_>>().join(" ");
    if regressions.is_empty() {
        Ok(summary)
    } else {
        Err(CliError::ProbeRegression(format!(
            "{} expected to hold but violated at samples ({summary})",
            regressions.join(", ")
        )))
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Consistent => "consistent",
        Verdict::ViolatedAtSamples => "violated-at-samples",
        Verdict::Inconclusive => "inconclusive",
    }
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyEntry {
    family: &'static str,
    case: String,
    passed: bool,
    report: Option<Value>,
    error: Option<String>,
}

impl VerifyEntry {
    fn from_result<R: Serialize>(
        family: &'static str,
        case: String,
        result: hpl_core::Result<R>,
        passed: impl Fn(&R) -> bool,
    ) -> Self {
        match result {
            Ok(r) => Self {
                family,
                case,
                passed: passed(&r),
                report: Some(serde_json::to_value(&r).expect("reports serialize")),
                error: None,
            },
            Err(e) => Self { family, case, passed: false, report: None, error: Some(e.to_string()) },
        }
    }
}

fn describe(b: &BlaschkeProduct<f64>) -> String {
    let zs: Vec<String> = b.factor_zeros().iter().map(|p| {
        let z = p.to_complex();
        format!("{:.4}{:+.4}i", z.re, z.im)
    }).collect();
    format!("[{}]", zs.join(", "))
}

fn verify_pairs(cfg: &ExperimentConfig) -> Result<Vec<(String, SeparatedSymbolPair<f64>, usize)>, CliError> {
    let z = BlaschkeProduct::<f64>::monomial(1);
    let mut pairs = vec![("z1 x z2".to_string(), SeparatedSymbolPair::new(z.clone(), 0, z.clone(), 1), 3usize)];
    let mut r = corpus::rng(cfg.seed ^ 0x5eed);
    for (p, q) in [(1, 1), (2, 1), (1, 3)] {
        let a = corpus::random_blaschke(&mut r, p, 0.6);
        let b = corpus::random_blaschke(&mut r, q, 0.6);
        let dim = p.max(q) + cfg.guard;
        pairs.push((format!("deg {p} x deg {q}"), SeparatedSymbolPair::new(a, 0, b, 1), dim));
    }
    if let (Some(a), Some(b)) = (&cfg.phi, &cfg.psi) {
        let pair = SeparatedSymbolPair::new(a.to_blaschke("phi")?, a.variable - 1, b.to_blaschke("psi")?, b.variable - 1);
        pairs.push(("custom".into(), pair, a.degree().max(b.degree()) + cfg.guard));
    }
    Ok(pairs)
}

pub fn verify(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<String, CliError> {
    let mut entries = Vec::new();

    for (k, (f, g)) in corpus::toeplitz_pairs(cfg.seed, cfg.corpus_size, 3).iter().enumerate() {
        let n = (f.window() + g.window()) as usize + cfg.guard;
        entries.push(VerifyEntry::from_result(
            "toeplitz-hankel-product",
            format!("pair {k}, N = {n}"),
            verify_toeplitz_identity(f, g, n),
            |r| r.passed(),
        ));
    }

    let chain_n = cfg.dims.as_ref().map(|d| d[0]).unwrap_or(24);
    let opts = ChainOptions { guard: cfg.guard, ..ChainOptions::default() };
    let z = BlaschkeProduct::<f64>::monomial(1);
    let mut chain_pairs = vec![("z, z".to_string(), z.clone(), z.clone()), ("z, z^2".into(), z.clone(), BlaschkeProduct::monomial(2))];
    for (a, b) in corpus::blaschke_pairs(cfg.seed ^ 0xc4a1, (cfg.corpus_size / 5).max(2), 0.5) {
        chain_pairs.push((format!("{} / {}", describe(&a), describe(&b)), a, b));
    }
    if let Some((a, b)) = cfg.custom_pair()? {
        chain_pairs.push(("custom".into(), a, b));
    }
    for (name, a, b) in &chain_pairs {
        entries.push(VerifyEntry::from_result(
            "reduction-chain",
            format!("{name}, N = {chain_n}"),
            verify_thma_chain(a, b, chain_n, &opts),
            |r| r.passed(),
        ));
    }

    let sign = cfg.defect_sign;
    let mut sign_matrix_written = false;
    for (name, pair, dim) in verify_pairs(cfg)? {
        let basis = MultiBasis::new(vec![dim, dim]).map_err(setup_error)?;
        let result = verify_two_subspace_identity(&pair, &basis);
        if sign == DefectSign::Paper && !sign_matrix_written {
            let paper = defect_operator(&pair, &basis, DefectSign::Paper).map_err(setup_error)?;
            let proof = defect_operator(&pair, &basis, DefectSign::Proof).map_err(setup_error)?;
            out.write_text("defect_sign_difference.csv", &matrix_to_csv(&(paper.matrix() - proof.matrix())))?;
            sign_matrix_written = true;
        }
        entries.push(VerifyEntry::from_result("two-subspace", format!("{name}, dims ({dim},{dim})"), result, |r| {
            let quotient_ok = match sign {
                DefectSign::Proof => r.quotient_identity.within_budget,
                DefectSign::Paper => r.paper_sign_residual <= r.quotient_identity.allowed,
            };
            quotient_ok && r.intersection_identity.within_budget && r.separability == Separability::Separable
        }));
    }

    let failed: Vec<String> =
        entries.iter().filter(|e| !e.passed).map(|e| format!("{} ({})", e.family, e.case)).collect();
    let result = json!({
        "defect_sign": sign,
        "entries": entries,
        "failed": failed,
        "total": entries.len(),
    });
    out.write_report("identity_report.json", "verify", cfg, result)?;
    if failed.is_empty() {
        Ok(format!("{} identity checks within budget", entries.len()))
    } else {
        Err(CliError::Identity(format!("{} of {} checks failed: {}", failed.len(), entries.len(), failed.join("; "))))
    }
}

// ---------------------------------------------------------------- rank

fn rank_pair(cfg: &ExperimentConfig) -> Result<SeparatedSymbolPair<f64>, CliError> {
    let n = cfg.variables;
    let pair = match (&cfg.phi, &cfg.psi) {
        (Some(a), Some(b)) => {
            SeparatedSymbolPair::new(a.to_blaschke("phi")?, a.variable - 1, b.to_blaschke("psi")?, b.variable - 1)
        }
        (None, None) => {
            let [p, q] = cfg.degrees.unwrap_or(if n == 2 { [2, 3] } else { [1, 1] });
            SeparatedSymbolPair::new(corpus::generated_blaschke(p, 0), 0, corpus::generated_blaschke(q, 1), 1)
        }
        _ => return Err(CliError::Config("phi and psi must be given together".into())),
    };
    if pair.phi.degree() == 0 || pair.psi.degree() == 0 {
        return Err(CliError::Hypothesis("both symbols must be nonconstant".into()));
    }
    match separability_check(&pair, n) {
        Separability::Separable => Ok(pair),
        Separability::SameVariable => {
            Err(CliError::Hypothesis(format!("phi and psi both act in z{}", pair.phi_var + 1)))
        }
        Separability::NotApplicable => Err(CliError::Config(format!("a symbol variable lies outside z1..z{n}"))),
    }
}

pub fn rank(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<String, CliError> {
    let pair = rank_pair(cfg)?;
    let (p, q) = (pair.phi.degree(), pair.psi.degree());
    if cfg.variables == 2 {
        let dims = cfg.dims.clone().unwrap_or_else(|| vec![8, 12, 16, 20]);
        if dims.len() < 3 {
            return Err(CliError::Config("rank needs at least 3 dims".into()));
        }
        let family = dims
            .iter()
            .map(|&d| Ok((d, product_of_inner_projections(&pair, &MultiBasis::new(vec![d, d])?)?)))
            .collect::<hpl_core::Result<Vec<_>>>()
            .map_err(setup_error)?;
        let report = compactness_verdict(&family, &cfg.tolerances.spectral()).map_err(setup_error)?;
        out.write_text("spectral.csv", &report.to_csv())?;
        let expected = p * q;
        let ok = report.stable_rank == Some(expected) && report.verdict == CompactnessVerdict::FiniteRankStable;
        out.write_report(
            "rank_report.json",
            "rank",
            cfg,
            json!({ "variables": 2, "degrees": [p, q], "expected_rank": expected, "spectral": report }),
        )?;
        let msg = format!("ranks {:?}, expected {expected}, verdict {}", report.rank_estimates, report.verdict);
        if ok {
            Ok(msg)
        } else {
            Err(CliError::Identity(msg))
        }
    } else {
        let dims = cfg.dims.clone().unwrap_or_else(|| vec![2, 3, 4, 5, 6]);
        if dims.iter().any(|&d| d < p.max(q)) {
            return Err(CliError::Config(format!("every dim must be at least max degree {}", p.max(q))));
        }
        let report = tridisc_growth(&pair, &dims).map_err(setup_error)?;
        out.write_text("growth.csv", &report.to_csv())?;
        out.write_report("growth_report.json", "rank", cfg, &report)?;
        let msg = format!("counts {:?}, expected {:?}, verdict {}", report.counts, report.expected, report.verdict);
        if report.matches_expected && report.verdict == CompactnessVerdict::NoncompactConsistent {
            Ok(msg)
        } else {
            Err(CliError::Identity(msg))
        }
    }
}

// ---------------------------------------------------------------- export

pub fn default_export_items() -> Vec<ExportItem> {
    let z = SymbolSpec { zeros: vec![], origin_multiplicity: 1, variable: 1 };
    vec![
        ExportItem { name: "toeplitz_z".into(), kind: ExportKind::Toeplitz, dim: 4, coeffs: vec![[1.0, 1.0, 0.0]], symbol: None },
        ExportItem { name: "model_projection_z".into(), kind: ExportKind::ModelProjection, dim: 4, coeffs: vec![], symbol: Some(z) },
    ]
}

fn export_operator(item: &ExportItem) -> Result<(TruncatedOperator<f64>, String), CliError> {
    if item.dim == 0 {
        return Err(CliError::Config(format!("{}: dim must be positive", item.name)));
    }
    let symbol = || -> Result<FourierSymbol<f64>, CliError> {
        if item.coeffs.is_empty() {
            return Err(CliError::Config(format!("{}: {:?} needs coeffs", item.name, item.kind)));
        }
        let mut entries = Vec::new();
        for c in &item.coeffs {
            if c[0].fract() != 0.0 {
                return Err(CliError::Config(format!("{}: coefficient index {} is not an integer", item.name, c[0])));
            }
            entries.push((c[0] as i64, Complex::new(c[1], c[2])));
        }
        Ok(FourierSymbol::from_entries(&entries))
    };
    let blaschke = || -> Result<BlaschkeProduct<f64>, CliError> {
        item.symbol.as_ref().ok_or_else(|| CliError::Config(format!("{}: projection needs symbol", item.name)))?.to_blaschke(&item.name)
    };
    Ok(match item.kind {
        ExportKind::Toeplitz => {
            let f = symbol()?;
            (toeplitz(&f, item.dim), format!("{:?}", f.provenance()))
        }
        ExportKind::Hankel => {
            let f = symbol()?;
            (hankel(&f, item.dim), format!("{:?}", f.provenance()))
        }
        ExportKind::SubmoduleProjection => {
            (submodule_projection(&blaschke()?, item.dim).map_err(setup_error)?, "finite-blaschke".into())
        }
        ExportKind::ModelProjection => {
            (model_projection(&blaschke()?, item.dim).map_err(setup_error)?, "finite-blaschke".into())
        }
    })
}

pub fn export(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<String, CliError> {
    let items = if cfg.export.is_empty() { default_export_items() } else { cfg.export.clone() };
    let mut manifest = Vec::new();
    for item in &items {
        let (op, provenance) = export_operator(item)?;
        let csv_name = format!("{}.csv", item.name);
        let bin_name = format!("{}.bin", item.name);
        let csv_hash = out.write_text(&csv_name, &matrix_to_csv(op.matrix()))?;
        let bin_hash = out.write_bytes(&bin_name, &matrix_to_bytes(op.matrix()))?;
        manifest.push(json!({
            "name": item.name,
            "kind": item.kind,
            "rows": op.rows(),
            "cols": op.cols(),
            "error_envelope": op.error_envelope(),
            "provenance": provenance,
            "files": [
                { "path": csv_name, "format": "csv", "sha256": csv_hash },
                { "path": bin_name, "format": "binary-le-f64", "sha256": bin_hash },
            ],
        }));
    }
    out.write_report("manifest.json", "export", cfg, json!({ "matrices": manifest }))?;
    Ok(format!("exported {} matrices", items.len()))
}

// ---------------------------------------------------------------- selftest

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> hpl_core::Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: e.to_string() },
    }
}

/// Singular values from the Jacobi oracle, with its Gram cross-check.
fn oracle_singular_values(op: &TruncatedOperator<f64>) -> (Vec<f64>, f64) {
    let m = op.matrix();
    let data: Vec<Complex<f64>> = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
    let s = oracle::jacobi_singular_values(m.nrows(), m.ncols(), &data);
    let (t, d) = oracle::gram_cross_check(m.nrows(), m.ncols(), &data, &s);
    (s, t.max(d))
}

pub fn selftest(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<String, CliError> {
    let c = |re: f64, im: f64| Complex::new(re, im);
    let checks = vec![
        check("pseudo-hyperbolic distance at (0.75, 0.5)", || {
            let r = pseudo_hyperbolic(c(0.75, 0.0), c(0.5, 0.0))?;
            Ok(((r - 0.4).abs() < 1e-15, format!("{r:.17e}")))
        }),
        check("matched-zero distance for n = 2", || {
            let (a, b) = exm1_sequences::<f64>(2)?;
            let r = hpl_core::blaschke::rho(&a.points()[1], &b.points()[1]);
            Ok(((r - 4.0 / 17.0).abs() < 1e-15, format!("{r:.17e}")))
        }),
        check("toeplitz-hankel product identity", || {
            let f = FourierSymbol::<f64>::monomial(-1);
            let g = FourierSymbol::<f64>::monomial(1);
            let r = verify_toeplitz_identity(&f, &g, 6)?;
            Ok((r.passed(), format!("residual {:.3e}", r.residual)))
        }),
        check("reduction chain for z, z^2", || {
            let r = verify_thma_chain(&BlaschkeProduct::<f64>::monomial(1), &BlaschkeProduct::monomial(2), 8, &ChainOptions::default())?;
            Ok((r.passed(), format!("residuals {:.3e}, {:.3e}", r.reduction.residual, r.defect.residual)))
        }),
        check("model projection trace and idempotency", || {
            let b = BlaschkeProduct::from_complex_zeros("q", &[c(0.3, 0.0), c(-0.4, 0.0)])?;
            let p = model_projection(&b, 16)?;
            let tr = p.trace().re;
            let idem = operators::idempotency_defect(&p);
            Ok(((tr - 2.0).abs() < 1e-10 && idem < 1e-10, format!("trace {tr:.17e}, idempotency {idem:.3e}")))
        }),
        check("TMW basis reproduces the model projection", || {
            let b = BlaschkeProduct::from_complex_zeros("r", &[c(0.2, 0.5), c(-0.6, 0.1), c(0.1, -0.3)])?;
            let v = model_space_basis(&b, 96)?;
            let diff = operators::max_abs(&(v.projection().matrix() - model_projection(&b, 96)?.matrix()));
            Ok((diff < 1e-10 && v.orthonormality_defect() < 1e-12, format!("difference {diff:.3e}")))
        }),
        check("bidisc product projection rank", || {
            let pair = SeparatedSymbolPair::new(corpus::generated_blaschke(2, 0), 0, corpus::generated_blaschke(3, 1), 1);
            let p = product_of_inner_projections(&pair, &MultiBasis::new(vec![10, 10])?)?;
            let r = rank_estimate(&p, None)?;
            Ok((r == 6, format!("rank {r}")))
        }),
        check("tridisc growth for z1, z2", || {
            let z = BlaschkeProduct::<f64>::monomial(1);
            let g = tridisc_growth(&SeparatedSymbolPair::new(z.clone(), 0, z, 1), &[2, 3, 4])?;
            Ok((g.matches_expected, format!("counts {:?}", g.counts)))
        }),
        check("singular values against Gram eigenvalues", || {
            let mut r = corpus::rng(cfg.seed);
            let mut worst = 0.0f64;
            for n in [3usize, 7, 12] {
                let f = corpus::random_band_symbol(&mut r, 3);
                let op = toeplitz(&f, n);
                let s = all_singular_values(&op);
                let (g, gram_gap) = oracle_singular_values(&op);
                worst = worst.max(gram_gap * 1e-2);
                for (a, b) in s.iter().zip(&g) {
                    worst = worst.max((a - b).abs() / s[0]);
                }
            }
            Ok((worst < 1e-10, format!("max relative gap {worst:.3e}")))
        }),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    out.write_report("selftest.json", "selftest", cfg, json!({ "checks": checks, "failed": failed }))?;
    if failed.is_empty() {
        Ok(format!("{} checks passed", checks.len()))
    } else {
        Err(CliError::Identity(format!("selftest failures: {}", failed.join("; "))))
    }
}
