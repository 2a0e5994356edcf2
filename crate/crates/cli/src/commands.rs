//! The four subcommands, returning their report text so that callers
//! decide where it goes.

use crate::cachefile;
use crate::error::{CliError, CliResult};
use crate::gamma::{random_parameter, GammaSpec, Parameter};
use crate::spec::FamilySpec;
use famzeta_core::deformation::{precompute as run_precompute, DeformationCache, PrecomputeOptions, StageTiming};
use famzeta_core::oracle::{self, FibreCounter};
use famzeta_core::zeta::{zeta_for_parameter, ZetaFunction, ZetaOptions, ZetaResult};
use rug::Integer;
use serde_json::json;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

/// Columns of the bench table, in pipeline order.
pub const BENCH_STAGES: [&str; 10] = ["resultant", "H", "C", "inverse", "F(0)", "F(Γ)", "r^M F", "γ", "F(γ)", "𝓕"];

fn options_for(spec: &FamilySpec) -> PrecomputeOptions {
    PrecomputeOptions {
        heuristic_m: spec.heuristic_m,
        variant_basis: spec.variant_basis,
        ..PrecomputeOptions::default()
    }
}

fn zeta_options(cache: &DeformationCache) -> ZetaOptions {
    ZetaOptions {
        variant_basis: cache.rt.is_some(),
        ..ZetaOptions::default()
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64())
}

/// `1 - 4*t + 27*t^2`.
pub fn format_poly(c: &[Integer], var: &str) -> String {
    let mut s = String::new();
    for (i, x) in c.iter().enumerate() {
        if x.is_zero() && !(i == 0 && c.len() == 1) {
            continue;
        }
        let abs = Integer::from(x.abs_ref());
        if s.is_empty() {
            if *x < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if *x < 0 { " - " } else { " + " });
        }
        match i {
            0 => write!(s, "{abs}").unwrap(),
            _ => {
                if abs != 1 {
                    write!(s, "{abs}*").unwrap();
                }
                s.push_str(var);
                if i > 1 {
                    write!(s, "^{i}").unwrap();
                }
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn format_zeta(z: &ZetaFunction) -> String {
    format!("({}) / ((1 - t)*(1 - {}*t))", format_poly(&z.numerator, "t"), z.field_size)
}

pub fn precompute(family: &Path, n: usize, out: &Path) -> CliResult<String> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let spec = FamilySpec::load(family)?;
    let fam = spec.to_family()?;
    let cache = run_precompute(&fam, n, &options_for(&spec)).map_err(CliError::from_family)?;
    if !cache.check_base_point().map_err(CliError::from_pipeline)? {
        return Err(CliError::Internal("cache does not reproduce F(0) at Γ = 0".into()));
    }
    cachefile::save(out, &spec, &cache)?;
    let pr = &cache.profile;
    let mut s = String::new();
    writeln!(s, "family   p = {}, a = {}, genus {}, kappa {}", pr.p, pr.a, pr.g, pr.kappa).unwrap();
    writeln!(
        s,
        "profile  n = {} eta = {} N0 = {} N3 = {} N4 = {} N6 = {} N8 = {} Nb = {} Na = {} NGamma = {} M = {}",
        pr.n, pr.eta, pr.n0, pr.n3, pr.n4, pr.n6, pr.n8, pr.nb, pr.na, pr.n_gamma, pr.m
    )
    .unwrap();
    for t in &cache.timings {
        writeln!(s, "time     {}\t{}", t.stage, secs(t.elapsed)).unwrap();
    }
    writeln!(s, "wrote    {}", out.display()).unwrap();
    Ok(s)
}

/// Where the parameter comes from.
#[derive(Clone, Debug)]
pub enum GammaSource {
    Spec(String),
    Random { seed: u64, degree: usize },
}

struct Evaluation {
    param: Parameter,
    seed: Option<u64>,
    result: ZetaResult,
    /// `Z` over the field of `ψ̄`, which may be larger than `F_q(γ̄)`.
    zeta: ZetaFunction,
}

fn evaluate(cache: &DeformationCache, source: &GammaSource) -> CliResult<Evaluation> {
    let (param, seed) = match source {
        GammaSource::Spec(text) => (GammaSpec::parse(text)?.resolve(&cache.family.fq())?, None),
        GammaSource::Random { seed, degree } => (random_parameter(cache, *degree, *seed)?, Some(*seed)),
    };
    let result = zeta_for_parameter(cache, &param.field, &param.gamma, &zeta_options(cache)).map_err(CliError::from_pipeline)?;
    let ratio = param.field.degree() / result.n;
    let zeta = result.zeta.base_change(ratio).map_err(CliError::from_pipeline)?;
    Ok(Evaluation {
        param,
        seed,
        result,
        zeta,
    })
}

fn strings(xs: &[Integer]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

pub fn zeta(cache_path: &Path, source: &GammaSource, as_json: bool) -> CliResult<String> {
    let (_, cache) = cachefile::load(cache_path)?;
    let ev = evaluate(&cache, source)?;
    let pr = &cache.profile;
    let n = ev.param.field.degree();
    let g = pr.g;
    let counts = ev.zeta.counts(2 * g);
    if as_json {
        let doc = json!({
            "p": pr.p.to_string(),
            "field_exponent": (pr.a * n).to_string(),
            "field_size": ev.zeta.field_size.to_string(),
            "n": n.to_string(),
            "effective_n": ev.result.n.to_string(),
            "gamma": ev.param.spec,
            "seed": ev.seed.map(|s| s.to_string()),
            "coefficients": strings(&ev.zeta.numerator),
            "point_count": counts[0].to_string(),
            "counts": strings(&counts),
            "zeta": {
                "numerator": strings(&ev.zeta.numerator),
                "denominator": ev.zeta.denominator().iter().map(|f| strings(f)).collect::<Vec<_>>(),
            },
        });
        return Ok(serde_json::to_string_pretty(&doc).expect("json") + "\n");
    }
    let mut s = String::new();
    if let Some(seed) = ev.seed {
        writeln!(s, "seed     {seed}").unwrap();
    }
    writeln!(s, "gamma    {}", ev.param.spec.to_json()).unwrap();
    writeln!(
        s,
        "field    F_{}^{} (n = {}, gamma generates degree {})",
        pr.p,
        pr.a * n,
        n,
        ev.result.n
    )
    .unwrap();
    writeln!(s, "a        {}", strings(&ev.zeta.numerator).join(" ")).unwrap();
    writeln!(s, "P(t)     {}", format_poly(&ev.zeta.numerator, "t")).unwrap();
    writeln!(s, "count    {}", counts[0]).unwrap();
    writeln!(s, "counts   {}", strings(&counts).join(" ")).unwrap();
    writeln!(s, "Z(t)     {}", format_zeta(&ev.zeta)).unwrap();
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyStatus {
    Pass,
    /// No check could run.
    NothingVerified,
    Mismatch,
}

impl VerifyStatus {
    pub fn label(self) -> &'static str {
        match self {
            VerifyStatus::Pass => "PASS",
            VerifyStatus::NothingVerified => "NOTHING VERIFIED",
            VerifyStatus::Mismatch => "FAIL",
        }
    }
}

/// Enumeration cap: the environment overrides the family document.
pub fn enumeration_cap(spec: &FamilySpec) -> u64 {
    match std::env::var(oracle::ENUM_CAP_VAR) {
        Ok(_) => oracle::enumeration_cap(),
        Err(_) => spec.enum_cap.unwrap_or(oracle::DEFAULT_ENUM_CAP),
    }
}

pub fn verify(cache_path: &Path, gamma: &str, kmax: usize) -> CliResult<(String, VerifyStatus)> {
    let (spec, cache) = cachefile::load(cache_path)?;
    let ev = evaluate(&cache, &GammaSource::Spec(gamma.to_string()))?;
    let cap = enumeration_cap(&spec);
    let g = cache.profile.g;
    let predicted = ev.zeta.counts(kmax.max(1));
    let mut s = String::new();
    writeln!(s, "gamma    {}", ev.param.spec.to_json()).unwrap();
    writeln!(s, "P(t)     {}", format_poly(&ev.zeta.numerator, "t")).unwrap();
    let (mut passed, mut failed, mut skipped) = (0usize, 0usize, 0usize);
    let mut oracle_counts = Vec::new();
    for k in 1..=kmax {
        let counter = FibreCounter::for_parameter(&cache.family, &ev.param.field, &ev.param.gamma, k).map_err(CliError::from_pipeline)?;
        match counter.count(cap) {
            Ok(rep) => {
                let got = Integer::from(rep.total);
                let ok = got == predicted[k - 1];
                writeln!(
                    s,
                    "count    k = {k}: pipeline {} oracle {} {}",
                    predicted[k - 1],
                    got,
                    if ok { "ok" } else { "MISMATCH" }
                )
                .unwrap();
                if ok {
                    passed += 1;
                } else {
                    failed += 1;
                }
                oracle_counts.push(got);
            }
            Err(famzeta_core::Error::CapExceeded { size, cap }) => {
                writeln!(s, "count    k = {k}: skipped, {size} points exceed the cap {cap}").unwrap();
                skipped += 1;
            }
            Err(e) => return Err(CliError::from_pipeline(e)),
        }
    }
    if kmax >= g {
        if oracle_counts.len() >= g {
            let field_size = &ev.zeta.field_size;
            match oracle::zeta_from_counts(&oracle_counts, field_size, g) {
                Ok(p) if p == ev.zeta.numerator => {
                    writeln!(s, "P(t)     oracle agrees").unwrap();
                    passed += 1;
                }
                Ok(p) => {
                    writeln!(s, "P(t)     oracle gives {}, MISMATCH", format_poly(&p, "t")).unwrap();
                    failed += 1;
                }
                Err(e) => {
                    writeln!(s, "P(t)     oracle counts are inconsistent: {e}").unwrap();
                    failed += 1;
                }
            }
        } else {
            writeln!(s, "P(t)     skipped, needs the first {g} counts").unwrap();
            skipped += 1;
        }
    }
    let status = if failed > 0 {
        VerifyStatus::Mismatch
    } else if passed == 0 {
        VerifyStatus::NothingVerified
    } else {
        VerifyStatus::Pass
    };
    writeln!(s, "checks   {passed} passed, {failed} failed, {skipped} skipped").unwrap();
    writeln!(s, "status   {}", status.label()).unwrap();
    Ok((s, status))
}

fn stage_time(timings: &[StageTiming], stage: &str) -> Duration {
    timings.iter().filter(|t| t.stage == stage).map(|t| t.elapsed).sum()
}

/// Per-stage timings as tab-separated values, one row per `n`; each row
/// specialises at one seeded random parameter of degree `n`.
pub fn bench(family: &Path, ns: &[usize]) -> CliResult<String> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Usage("--n needs a list of positive degrees".into()));
    }
    let spec = FamilySpec::load(family)?;
    let fam = spec.to_family()?;
    let opts = PrecomputeOptions {
        residual_checks: false,
        ..options_for(&spec)
    };
    let mut s = String::new();
    writeln!(s, "n\t{}\ttotal", BENCH_STAGES.join("\t")).unwrap();
    for &n in ns {
        let cache = run_precompute(&fam, n, &opts).map_err(CliError::from_family)?;
        let ev = evaluate(&cache, &GammaSource::Random { seed: 0, degree: n })?;
        let all: Vec<StageTiming> = cache.timings.iter().chain(&ev.result.timings).cloned().collect();
        let total: Duration = all.iter().map(|t| t.elapsed).sum();
        let cols: Vec<String> = BENCH_STAGES.iter().map(|st| secs(stage_time(&all, st))).collect();
        writeln!(s, "{n}\t{}\t{}", cols.join("\t"), secs(total)).unwrap();
    }
    Ok(s)
}
