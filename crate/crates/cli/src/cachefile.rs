//! On-disk form of a [`DeformationCache`].
//!
//! ```text
//! magic "FAMZETA\0" | version u32 | header length u64 | header JSON
//! | integers, each as `limbs` u64 words, least significant first
//! | SHA-256 of everything before it
//! ```
//!
//! All words are little-endian. Integers are mantissas in `[0, p^(N_b + shift))`
//! and appear in the order `r`, `F(0)`, `r^M F`, then the optional `rT`.
//! Timings are not stored, so the same inputs always give the same bytes.

use crate::error::{CliError, CliResult};
use crate::spec::FamilySpec;
use famzeta_core::arith::qq::{Qq, QqElem};
use famzeta_core::deformation::precision::PrecisionProfile;
use famzeta_core::deformation::{cache_budget, r_precision, DeformationCache, ResidualReport};
use famzeta_core::series::{SeriesMatrix, TruncSeries};
use rug::integer::Order;
use rug::Integer;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const MAGIC: &[u8; 8] = b"FAMZETA\0";
pub const VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub p: u64,
    pub a: usize,
    pub g: usize,
    pub kappa: usize,
    pub n: usize,
    pub eta: u32,
    pub two_mu: i64,
    pub n0: u32,
    pub n3: u32,
    pub n4: u32,
    pub n6: u32,
    pub n8: u32,
    pub nb: u32,
    pub na: u32,
    pub n_gamma: usize,
    pub m: u64,
    pub heuristic_m: bool,
}

impl From<&PrecisionProfile> for ProfileDoc {
    fn from(x: &PrecisionProfile) -> Self {
        ProfileDoc {
            p: x.p,
            a: x.a,
            g: x.g,
            kappa: x.kappa,
            n: x.n,
            eta: x.eta,
            two_mu: x.two_mu,
            n0: x.n0,
            n3: x.n3,
            n4: x.n4,
            n6: x.n6,
            n8: x.n8,
            nb: x.nb,
            na: x.na,
            n_gamma: x.n_gamma,
            m: x.m,
            heuristic_m: x.heuristic_m,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct SeriesShape {
    trunc: usize,
    shift: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct MatrixShape {
    dim: usize,
    trunc: usize,
    shift: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct ResidualDoc {
    c_residual_valuation: Option<i64>,
    c_required: i64,
    f_residual_valuation: Option<i64>,
    f_required: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    family: FamilySpec,
    profile: ProfileDoc,
    budget: u32,
    limbs: usize,
    r: SeriesShape,
    /// Shifts of `F(0)`, row-major.
    f0: Vec<Vec<u32>>,
    rmf: MatrixShape,
    rt: Option<MatrixShape>,
    residuals: Option<ResidualDoc>,
}

fn limbs_for(qq: &Qq) -> usize {
    let top = qq.pow_p(qq.prec() + qq.budget());
    (top.significant_bits() as usize).div_ceil(64).max(1)
}

struct Writer {
    buf: Vec<u8>,
    limbs: usize,
}

impl Writer {
    fn int(&mut self, x: &Integer) -> CliResult<()> {
        if *x < 0 {
            return Err(CliError::Internal("negative mantissa in cache".into()));
        }
        let mut d = x.to_digits::<u64>(Order::Lsf);
        if d.len() > self.limbs {
            return Err(CliError::Internal("mantissa exceeds the limb width".into()));
        }
        d.resize(self.limbs, 0);
        for w in d {
            self.buf.extend_from_slice(&w.to_le_bytes());
        }
        Ok(())
    }

    fn ints<'a>(&mut self, xs: impl IntoIterator<Item = &'a Integer>) -> CliResult<()> {
        xs.into_iter().try_for_each(|x| self.int(x))
    }
}

struct Reader<'a> {
    body: &'a [u8],
    pos: usize,
    limbs: usize,
}

impl Reader<'_> {
    fn int(&mut self) -> CliResult<Integer> {
        let len = 8 * self.limbs;
        let bytes = self
            .body
            .get(self.pos..self.pos + len)
            .ok_or_else(|| CliError::Io("cache body is truncated".into()))?;
        self.pos += len;
        let words: Vec<u64> = bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok(Integer::from_digits(&words, Order::Lsf))
    }

    fn ints(&mut self, k: usize, bound: &Integer) -> CliResult<Vec<Integer>> {
        (0..k)
            .map(|_| {
                let x = self.int()?;
                if x >= *bound {
                    return Err(CliError::Io("cache mantissa out of range".into()));
                }
                Ok(x)
            })
            .collect()
    }
}

/// Serialises a cache built from `spec`.
pub fn encode(spec: &FamilySpec, cache: &DeformationCache) -> CliResult<Vec<u8>> {
    let qq = &cache.qq;
    let limbs = limbs_for(qq);
    let header = Header {
        family: spec.clone(),
        profile: ProfileDoc::from(&cache.profile),
        budget: qq.budget(),
        limbs,
        r: SeriesShape {
            trunc: cache.r.trunc(),
            shift: cache.r.shift(),
        },
        f0: cache.f0.iter().map(|row| row.iter().map(|x| x.shift()).collect()).collect(),
        rmf: matrix_shape(&cache.rmf),
        rt: cache.rt.as_ref().map(matrix_shape),
        residuals: cache.residuals.as_ref().map(|r| ResidualDoc {
            c_residual_valuation: r.c_residual_valuation,
            c_required: r.c_required,
            f_residual_valuation: r.f_residual_valuation,
            f_required: r.f_required,
        }),
    };
    let json = serde_json::to_vec(&header).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut w = Writer { buf: Vec::new(), limbs };
    w.buf.extend_from_slice(MAGIC);
    w.buf.extend_from_slice(&VERSION.to_le_bytes());
    w.buf.extend_from_slice(&(json.len() as u64).to_le_bytes());
    w.buf.extend_from_slice(&json);
    w.ints(cache.r.raw())?;
    for row in &cache.f0 {
        for x in row {
            w.ints(x.coeffs())?;
        }
    }
    write_matrix(&mut w, &cache.rmf)?;
    if let Some(rt) = &cache.rt {
        write_matrix(&mut w, rt)?;
    }
    let digest = Sha256::digest(&w.buf);
    w.buf.extend_from_slice(&digest);
    Ok(w.buf)
}

fn matrix_shape(m: &SeriesMatrix) -> MatrixShape {
    MatrixShape {
        dim: m.dim(),
        trunc: m.trunc(),
        shift: m.shift(),
    }
}

fn write_matrix(w: &mut Writer, m: &SeriesMatrix) -> CliResult<()> {
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            w.ints(m.raw_entry(i, j))?;
        }
    }
    Ok(())
}

/// Parses and validates a cache; any mismatch is an I/O-class refusal.
pub fn decode(bytes: &[u8]) -> CliResult<(FamilySpec, DeformationCache)> {
    let bad = |m: &str| CliError::Io(format!("cache file: {m}"));
    if bytes.len() < MAGIC.len() + 12 + DIGEST_LEN || &bytes[..8] != MAGIC {
        return Err(bad("not a famzeta cache"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(bad(&format!("format version {version}, this build reads version {VERSION}")));
    }
    let (content, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(content).as_slice() != digest {
        return Err(bad("checksum mismatch, the file is corrupted"));
    }
    let hlen = u64::from_le_bytes(content[12..20].try_into().expect("8 bytes")) as usize;
    let hend = 20usize
        .checked_add(hlen)
        .filter(|&e| e <= content.len())
        .ok_or_else(|| bad("header length out of range"))?;
    let header: Header = serde_json::from_slice(&content[20..hend]).map_err(|e| bad(&format!("header: {e}")))?;

    let family = header.family.to_family()?;
    let pd = &header.profile;
    let profile = PrecisionProfile::compute_with(family.p(), family.a(), family.genus(), family.kappa(), pd.n, pd.heuristic_m)
        .map_err(|e| bad(&e.to_string()))?;
    if ProfileDoc::from(&profile) != *pd {
        return Err(bad("stored precision profile does not match the family"));
    }
    if header.budget != cache_budget(&profile) {
        return Err(bad("stored shift budget does not match the profile"));
    }
    let qq = Qq::new(family.p(), family.chibar(), profile.nb, header.budget).map_err(|e| bad(&e.to_string()))?;
    if header.limbs != limbs_for(&qq) {
        return Err(bad("limb width does not match the profile"));
    }
    let dim = 2 * profile.g;
    let a = qq.a();
    let bound = |shift: u32| -> CliResult<Integer> {
        if shift > qq.budget() {
            return Err(bad("shift exceeds the budget"));
        }
        Ok(qq.pow_p(qq.prec() + shift))
    };
    let mut rd = Reader {
        body: &content[hend..],
        pos: 0,
        limbs: header.limbs,
    };

    let qr = qq.with_prec(r_precision(&profile)).map_err(|e| bad(&e.to_string()))?;
    if header.r.shift > 0 {
        return Err(bad("r(Γ) must be integral"));
    }
    let r = TruncSeries::make(&qr, rd.ints(header.r.trunc * a, &qr.pow_p(qr.prec()))?, 0, header.r.trunc);
    if header.f0.len() != dim || header.f0.iter().any(|row| row.len() != dim) {
        return Err(bad("F(0) has the wrong shape"));
    }
    let mut f0 = Vec::with_capacity(dim);
    for row in &header.f0 {
        let mut out = Vec::with_capacity(dim);
        for &s in row {
            out.push(QqElem::from_raw(rd.ints(a, &bound(s)?)?, s));
        }
        f0.push(out);
    }
    let mut read_matrix = |shape: &MatrixShape| -> CliResult<SeriesMatrix> {
        if shape.dim != dim {
            return Err(bad("matrix has the wrong dimension"));
        }
        let b = bound(shape.shift)?;
        let e = (0..dim * dim)
            .map(|_| rd.ints(shape.trunc * a, &b))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(SeriesMatrix::make(&qq, dim, shape.trunc, e, shape.shift))
    };
    let rmf = read_matrix(&header.rmf)?;
    let rt = header.rt.as_ref().map(&mut read_matrix).transpose()?;
    if rd.pos != rd.body.len() {
        return Err(bad("trailing bytes after the cache body"));
    }
    let residuals = header.residuals.map(|r| ResidualReport {
        c_residual_valuation: r.c_residual_valuation,
        c_required: r.c_required,
        f_residual_valuation: r.f_residual_valuation,
        f_required: r.f_required,
    });
    let cache = DeformationCache {
        family,
        profile,
        qq,
        r,
        f0,
        rmf,
        c: None,
        rt,
        residuals,
        timings: Vec::new(),
    };
    Ok((header.family, cache))
}

pub fn save(path: &Path, spec: &FamilySpec, cache: &DeformationCache) -> CliResult<()> {
    let bytes = encode(spec, cache)?;
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> CliResult<(FamilySpec, DeformationCache)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    decode(&bytes)
}
