use famzeta_core::arith::ff::{Ext, FiniteField};
use famzeta_core::cohomology::CurveFamily;
use famzeta_core::deformation::{precompute, PrecomputeOptions};
use famzeta_core::zeta::{zeta_for_parameter, ZetaOptions};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

const LEGENDRE5: &str = r#"{"p":5,"a":1,"chi":[0,1],"Q":[[3,0,[1]],[2,1,[4]],[1,1,[1]],[1,0,[4]]]}"#;
/// `γ̄ = y` in `F_25 = F_5[y]/(y² + 2)`.
const GAMMA_F25: &str = r#"{"psi":[2,0,1],"gamma":[0,1]}"#;

fn famzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_famzeta")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Legendre family over `F_5`, cached for `n = 2`.
    fn legendre_cache(&self) -> PathBuf {
        let fam = self.file("legendre5.json", LEGENDRE5);
        let cache = self.path("legendre5.cache");
        let o = famzeta(&["precompute", "--family", s(&fam), "--n", "2", "--out", s(&cache)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        cache
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn line<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no `{key}` line in {text}"))
        .trim()
}

#[test]
fn zeta_of_a_prime_field_parameter() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let o = famzeta(&["zeta", "--cache", s(&cache), "--gamma", "0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(line(&out, "a "), "1 2 5");
    assert_eq!(line(&out, "count "), "8");
    assert_eq!(line(&out, "P(t) "), "1 + 2*t + 5*t^2");
}

#[test]
fn json_and_plain_output_agree() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let plain = stdout(&famzeta(&["zeta", "--cache", s(&cache), "--gamma", GAMMA_F25]));
    let o = famzeta(&["zeta", "--cache", s(&cache), "--gamma", GAMMA_F25, "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let strs = |v: &serde_json::Value| -> Vec<String> {
        v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
    };
    assert_eq!(strs(&doc["coefficients"]).join(" "), line(&plain, "a "));
    assert_eq!(strs(&doc["counts"]).join(" "), line(&plain, "counts "));
    assert_eq!(doc["field_size"], "25");
    assert_eq!(doc["effective_n"], "2");
}

#[test]
fn cached_result_equals_an_in_process_run() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let o = famzeta(&["zeta", "--cache", s(&cache), "--gamma", GAMMA_F25]);
    let fam = CurveFamily::legendre(5).unwrap();
    let direct = precompute(&fam, 2, &PrecomputeOptions::default()).unwrap();
    let fq = fam.fq();
    let field = Ext::new(fq.clone(), vec![fq.from_prime(2), fq.zero(), fq.one()]).unwrap();
    let z = zeta_for_parameter(&direct, &field, &[fq.zero(), fq.one()], &ZetaOptions::default()).unwrap();
    let want: Vec<String> = z.zeta.numerator.iter().map(|x| x.to_string()).collect();
    assert_eq!(line(&stdout(&o), "a "), want.join(" "));
}

#[test]
fn gamma_from_a_file() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let g = ws.file("gamma.json", GAMMA_F25);
    let via_file = famzeta(&["zeta", "--cache", s(&cache), "--gamma", &format!("@{}", s(&g))]);
    let inline = famzeta(&["zeta", "--cache", s(&cache), "--gamma", GAMMA_F25]);
    assert_eq!(code(&via_file), 0, "{}", stderr(&via_file));
    assert_eq!(stdout(&via_file), stdout(&inline));
}

#[test]
fn cache_is_reproducible_and_round_trips() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let first = std::fs::read(&cache).unwrap();
    let again = ws.path("again.cache");
    let fam = ws.path("legendre5.json");
    let o = famzeta(&["precompute", "--family", s(&fam), "--n", "2", "--out", s(&again)]);
    assert_eq!(code(&o), 0);
    assert_eq!(first, std::fs::read(&again).unwrap());

    let (spec, decoded) = famzeta_cli::cachefile::load(&cache).unwrap();
    assert_eq!(famzeta_cli::cachefile::encode(&spec, &decoded).unwrap(), first);
}

#[test]
fn damaged_caches_are_refused() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let bytes = std::fs::read(&cache).unwrap();

    let mut flipped = bytes.clone();
    let mid = flipped.len() / 2;
    flipped[mid] ^= 0x40;
    let bad = ws.path("flipped.cache");
    std::fs::write(&bad, &flipped).unwrap();
    let o = famzeta(&["zeta", "--cache", s(&bad), "--gamma", "0"]);
    assert_eq!(code(&o), 6);
    assert!(stderr(&o).contains("checksum"), "{}", stderr(&o));

    let mut versioned = bytes.clone();
    versioned[8] = versioned[8].wrapping_add(1);
    std::fs::write(&bad, &versioned).unwrap();
    let o = famzeta(&["zeta", "--cache", s(&bad), "--gamma", "0"]);
    assert_eq!(code(&o), 6);
    assert!(stderr(&o).contains("version"), "{}", stderr(&o));

    std::fs::write(&bad, &bytes[..bytes.len() / 3]).unwrap();
    assert_eq!(code(&famzeta(&["zeta", "--cache", s(&bad), "--gamma", "0"])), 6);
    let missing = ws.path("missing.cache");
    assert_eq!(code(&famzeta(&["zeta", "--cache", s(&missing), "--gamma", "0"])), 6);
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let fam = ws.path("legendre5.json");
    let out = ws.path("x.cache");

    // Usage.
    assert_eq!(code(&famzeta(&["precompute", "--family", s(&fam), "--n", "0", "--out", s(&out)])), 2);
    assert_eq!(code(&famzeta(&["zeta", "--cache", s(&cache)])), 2);
    assert_eq!(code(&famzeta(&["zeta", "--cache", s(&cache), "--random-gamma", "1"])), 2);
    assert_eq!(code(&famzeta(&["zeta", "--cache", s(&cache), "--gamma", "{\"psi\": 3}"])), 2);
    assert_eq!(code(&famzeta(&["zeta", "--cache", s(&cache), "--gamma", r#"{"psi":[1,0,1],"gamma":[0,1]}"#])), 2);
    assert_eq!(code(&famzeta(&["bench", "--family", s(&fam), "--n", "0"])), 2);
    assert_eq!(code(&famzeta(&["frobnicate"])), 2);

    // Bad family: even characteristic, a singular base fibre, malformed JSON.
    let even = ws.file("even.json", r#"{"p":4,"a":1,"chi":[0,1],"Q":[[3,0,[1]],[1,0,[1]]]}"#);
    let singular = ws.file("singular.json", r#"{"p":5,"a":1,"chi":[0,1],"Q":[[3,0,[1]],[1,1,[1]]]}"#);
    let garbage = ws.file("garbage.json", "{\"p\": ");
    for f in [&even, &singular, &garbage] {
        let o = famzeta(&["precompute", "--family", s(f), "--n", "1", "--out", s(&out)]);
        assert_eq!(code(&o), 3, "{}: {}", s(f), stderr(&o));
    }

    // Bad parameters: r̄(γ̄) = 0, or beyond the cache.
    for g in ["1", "2"] {
        let o = famzeta(&["zeta", "--cache", s(&cache), "--gamma", g]);
        assert_eq!(code(&o), 4);
        assert!(stderr(&o).contains("bad parameter"), "{}", stderr(&o));
    }
    let cubic = r#"{"psi":[1,1,0,1],"gamma":[0,1]}"#;
    assert_eq!(code(&famzeta(&["zeta", "--cache", s(&cache), "--gamma", cubic])), 4);

    // I/O.
    let missing = ws.path("nope.json");
    assert_eq!(code(&famzeta(&["precompute", "--family", s(&missing), "--n", "1", "--out", s(&out)])), 6);
}

#[test]
fn verify_reports() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let o = famzeta(&["verify", "--cache", s(&cache), "--gamma", GAMMA_F25, "--kmax", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(line(&out, "status "), "PASS");
    assert!(out.contains("oracle agrees"), "{out}");

    let o = famzeta(&["verify", "--cache", s(&cache), "--gamma", "0", "--kmax", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(line(&stdout(&o), "status "), "NOTHING VERIFIED");
}

#[test]
fn random_parameters_are_seeded() {
    let ws = Workspace::new();
    let cache = ws.legendre_cache();
    let run = |seed: &str| famzeta(&["zeta", "--cache", s(&cache), "--random-gamma", seed, "--degree", "2"]);
    let a = run("7");
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&run("7")));
    assert_eq!(line(&stdout(&a), "seed "), "7");
    let g = line(&stdout(&a), "gamma ").to_string();
    let o = famzeta(&["zeta", "--cache", s(&cache), "--gamma", &g]);
    assert_eq!(line(&stdout(&o), "a "), line(&stdout(&a), "a "));
}

#[test]
fn bench_table() {
    let ws = Workspace::new();
    let fam = ws.file("legendre5.json", LEGENDRE5);
    let o = famzeta(&["bench", "--family", s(&fam), "--n", "1,2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split('\t').collect()).collect();
    let mut header = vec!["n"];
    header.extend(famzeta_cli::commands::BENCH_STAGES);
    header.push("total");
    assert_eq!(rows[0], header);
    assert_eq!(rows.len(), 3);
    for (row, n) in rows[1..].iter().zip(["1", "2"]) {
        assert_eq!(row.len(), header.len());
        assert_eq!(row[0], n);
        let t: Vec<f64> = row[1..].iter().map(|x| x.parse().unwrap()).collect();
        let (stages, total) = t.split_at(t.len() - 1);
        assert!(stages.iter().all(|&x| x >= 0.0 && x <= total[0] + 1e-3));
    }
}
