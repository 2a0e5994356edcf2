//! Parameter specs: `γ̄ ∈ F_q[y]/ψ̄` with `ψ̄` supplied by the caller.

use crate::error::{CliError, CliResult};
use famzeta_core::arith::ff::{find_irreducible, poly_eval, Ext, FiniteField, Fq, Fqn};
use famzeta_core::deformation::DeformationCache;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// An `F_q` element: a bare `F_p` integer or its coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FqDoc {
    Int(u64),
    Coords(Vec<u64>),
}

/// `{"psi": [...], "gamma": [...]}`: `ψ̄` monic irreducible over `F_q`,
/// constant term first, and the coordinates of `γ̄` in `1, y, y², …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSpec {
    pub psi: Vec<FqDoc>,
    pub gamma: Vec<FqDoc>,
}

/// A parsed parameter with the field it lives in.
#[derive(Clone, Debug)]
pub struct Parameter {
    pub field: Fqn,
    pub gamma: Vec<Vec<u64>>,
    pub spec: GammaSpec,
}

fn fq_elem(fq: &Fq, d: &FqDoc, what: &str) -> CliResult<Vec<u64>> {
    let p = fq.characteristic();
    let mut v = match d {
        FqDoc::Int(x) => vec![*x],
        FqDoc::Coords(c) => c.clone(),
    };
    if v.len() > fq.degree() {
        return Err(CliError::Usage(format!(
            "{what}: {} coordinates, F_q has degree {}",
            v.len(),
            fq.degree()
        )));
    }
    v.iter_mut().for_each(|x| *x %= p);
    v.resize(fq.degree(), 0);
    Ok(v)
}

impl GammaSpec {
    /// `"0"`, `"1"` or any integer literal is the `F_p` constant with
    /// `ψ̄ = y`; otherwise the text must be the JSON document, or `@path`
    /// naming a file containing it.
    pub fn parse(text: &str) -> CliResult<Self> {
        let text = text.trim();
        if let Ok(k) = text.parse::<u64>() {
            return Ok(GammaSpec {
                psi: vec![FqDoc::Int(0), FqDoc::Int(1)],
                gamma: vec![FqDoc::Int(k)],
            });
        }
        let body = if let Some(path) = text.strip_prefix('@') {
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?
        } else {
            text.to_string()
        };
        serde_json::from_str(&body).map_err(|e| CliError::Usage(format!("gamma spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("gamma spec serialises")
    }

    pub fn resolve(&self, fq: &Fq) -> CliResult<Parameter> {
        let psi: Vec<Vec<u64>> = self
            .psi
            .iter()
            .enumerate()
            .map(|(i, c)| fq_elem(fq, c, &format!("psi[{i}]")))
            .collect::<CliResult<_>>()?;
        if psi.len() < 2 || psi.last() != Some(&fq.one()) {
            return Err(CliError::Usage("psi must be monic of degree >= 1".into()));
        }
        let field = Ext::new(fq.clone(), psi).map_err(|e| CliError::Usage(format!("psi: {e}")))?;
        let n = field.degree();
        if self.gamma.len() > n {
            return Err(CliError::Usage(format!(
                "gamma has {} coordinates, psi has degree {n}",
                self.gamma.len()
            )));
        }
        let mut gamma: Vec<Vec<u64>> = self
            .gamma
            .iter()
            .enumerate()
            .map(|(i, c)| fq_elem(fq, c, &format!("gamma[{i}]")))
            .collect::<CliResult<_>>()?;
        gamma.resize(n, fq.zero());
        Ok(Parameter {
            field,
            gamma,
            spec: self.clone(),
        })
    }
}

fn to_doc(c: &[u64]) -> FqDoc {
    if c.len() == 1 {
        FqDoc::Int(c[0])
    } else {
        FqDoc::Coords(c.to_vec())
    }
}

/// A good parameter generating `F_{q^n}`, drawn from a seeded generator:
/// `ψ̄` is the first irreducible polynomial of degree `n` in counting order.
pub fn random_parameter(cache: &DeformationCache, n: usize, seed: u64) -> CliResult<Parameter> {
    if n == 0 {
        return Err(CliError::Usage("--degree must be at least 1".into()));
    }
    let fq = cache.family.fq();
    let psi = find_irreducible(&fq, n);
    let field = Ext::new(fq.clone(), psi.clone()).map_err(|e| CliError::Internal(e.to_string()))?;
    let qq = &cache.qq;
    let rbar: Vec<Vec<Vec<u64>>> = cache
        .r
        .coeffs(qq)
        .iter()
        .map(|c| qq.reduce_fq(c).map(|c| field.from_base(&c)))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = fq.characteristic();
    for _ in 0..10_000 {
        let gamma: Vec<Vec<u64>> = (0..n)
            .map(|_| (0..fq.degree()).map(|_| rng.gen_range(0..p)).collect())
            .collect();
        let generates = famzeta_core::arith::ff::min_poly_over_base(&field, &gamma).len() == n + 1;
        if generates && !field.is_zero(&poly_eval(&field, &rbar, &gamma)) {
            let spec = GammaSpec {
                psi: psi.iter().map(|c| to_doc(c)).collect(),
                gamma: gamma.iter().map(|c| to_doc(c)).collect(),
            };
            return Ok(Parameter { field, gamma, spec });
        }
    }
    Err(CliError::BadParameter(format!(
        "no good parameter of degree {n} found from seed {seed}"
    )))
}
