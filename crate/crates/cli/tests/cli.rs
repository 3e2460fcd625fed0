use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bkmatch");

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn bkmatch(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("BKMATCH_PACK_DIR")
        .output()
        .expect("spawn bkmatch")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn ok(args: &[&str]) -> String {
    let o = bkmatch(args);
    assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn pairs(tsv: &str) -> BTreeSet<(String, String)> {
    tsv.lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut it = l.split('\t');
            (it.next().unwrap().to_string(), it.next().unwrap().to_string())
        })
        .collect()
}

/// (precision, recall, f1) of the first data row of an eval report.
fn first_prf(report: &str) -> (f64, f64, f64) {
    let row: Vec<&str> = report.lines().nth(1).unwrap().split(',').collect();
    (row[5].parse().unwrap(), row[6].parse().unwrap(), row[7].parse().unwrap())
}

#[test]
fn mini_fixture_yields_the_three_hand_derived_cells() {
    let dir = tempfile::tempdir().unwrap();
    let pack = dir.path().join("mini");
    let m = fixtures().join("mini");
    ok(&["build-pack", "--input", s(&m.join("kg.nt")), "--profile", "wordnet-style", "--out", s(&pack)]);
    let out = ok(&[
        "match",
        "--source",
        s(&m.join("source.nt")),
        "--target",
        s(&m.join("target.nt")),
        "--pack",
        s(&pack),
    ]);
    let expected = fs::read_to_string(m.join("expected.tsv")).unwrap();
    assert_eq!(pairs(&out).len(), 3);
    assert_eq!(pairs(&out), pairs(&expected));
}

#[test]
fn toy_track_syn_is_perfect_and_hypernyms_cost_precision() {
    let dir = tempfile::tempdir().unwrap();
    let toy = fixtures().join("toy");
    let reference = toy.join("reference.tsv");
    let conf = toy.join("syn.conf");

    let syn = dir.path().join("syn.tsv");
    ok(&["match", "--config", s(&conf), "--output", s(&syn)]);
    let report = ok(&["eval", "--system", s(&syn), "--reference", s(&reference)]);
    assert_eq!(first_prf(&report), (1.0, 1.0, 1.0));

    // The pack adds Workshop -> Event and Reviewer -> Person as hypernym
    // edges only: two extra cells, none in the gold. P = 7/9, R = 1,
    // F1 = 2·(7/9)/(7/9 + 1) = 7/8.
    let hyp = dir.path().join("syn-hyp.tsv");
    ok(&["match", "--config", s(&conf), "--strategy", "syn-hyp", "--output", s(&hyp)]);
    let (p, r, f1) = first_prf(&ok(&["eval", "--system", s(&hyp), "--reference", s(&reference)]));
    assert!((p - 7.0 / 9.0).abs() < 1e-12);
    assert_eq!(r, 1.0);
    assert!((f1 - 0.875).abs() < 1e-12);
}

#[test]
fn match_output_is_byte_identical_across_runs_and_thread_counts() {
    let conf = fixtures().join("toy/syn.conf");
    let mut outputs = BTreeSet::new();
    for threads in ["1", "4", "1"] {
        for format in ["tsv", "align-xml"] {
            let out = ok(&["--threads", threads, "match", "--config", s(&conf), "--strategy", "syn-hyp", "--output-format", format]);
            outputs.insert((format, out));
        }
    }
    assert_eq!(outputs.len(), 2);
}

#[test]
fn walks_are_byte_identical_across_thread_counts() {
    let m = fixtures().join("mini");
    let nodes = tempfile::NamedTempFile::new().unwrap();
    fs::write(nodes.path(), "http://kg/Banquet\nhttp://kg/Paper\nhttp://kg/Nowhere\n").unwrap();
    let run = |threads: &str, seed: &str| {
        ok(&[
            "--threads", threads, "walks", "--graph", s(&m.join("kg.nt")), "--nodes", s(nodes.path()),
            "--walks-per-node", "20", "--depth", "3", "--seed", seed,
        ])
    };
    let a = run("1", "5");
    assert_eq!(a, run("3", "5"));
    assert_eq!(a.lines().count(), 40);
    assert!(a.lines().all(|l| l.split(' ').count() <= 7));
}

#[test]
fn eval_of_reference_against_itself_is_one() {
    let r = fixtures().join("toy/reference.tsv");
    let report = ok(&["eval", "--system", s(&r), "--reference", s(&r), "--aggregate", "macro"]);
    for line in report.lines().skip(1) {
        assert!(line.ends_with(",1,1,1"), "{line}");
    }
    assert!(report.lines().any(|l| l.starts_with("system,MACRO,")));
}

#[test]
fn significance_of_one_run_is_a_zero_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let r = fixtures().join("toy/reference.tsv");
    let manifest = dir.path().join("runs.csv");
    fs::write(&manifest, format!("config,testcase,alignment,reference\nonly,toy,{0},{0}\n", s(&r))).unwrap();
    assert_eq!(ok(&["significance", "--manifest", s(&manifest)]), "config,only\nonly,0\n");
}

#[test]
fn impact_on_a_two_by_two_grid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let refs: String = (0..5).map(|i| format!("http://a#e{i}\thttp://b#e{i}\t=\t1.0\n")).collect();
    fs::write(d.join("ref.tsv"), &refs).unwrap();
    fs::write(d.join("empty.tsv"), "").unwrap();
    // Only (p1, syn-hyp) misses all five cells; every comparison with it is
    // 5 to 0 discordant, exact one-sided p = 1/32.
    fs::write(
        d.join("grid.csv"),
        "source,strategy,testcase,alignment,reference\n\
         p1,syn,t,ref.tsv,ref.tsv\np1,syn-hyp,t,empty.tsv,ref.tsv\n\
         p2,syn,t,ref.tsv,ref.tsv\np2,syn-hyp,t,ref.tsv,ref.tsv\n",
    )
    .unwrap();
    let grid = d.join("grid.csv");
    assert_eq!(
        ok(&["impact", "--manifest", s(&grid)]),
        "metric,value\nimpact_strategy,0.5\nstd_strategy,0.5\nimpact_source,0.5\nstd_source,0.5\n"
    );
    // |TC|·|BK|² − |BK|·|S| = 4 − 4 = 0, and a zero denominator gives 0.
    let printed = ok(&["impact", "--manifest", s(&grid), "--source-denominator", "as-printed"]);
    assert!(printed.contains("impact_source,0\n"), "{printed}");
}

#[test]
fn pack_dir_variable_resolves_relative_packs() {
    let toy = fixtures().join("toy");
    let o = Command::new(BIN)
        .args(["match", "--source", s(&toy.join("source.tsv")), "--target", s(&toy.join("target.tsv")), "--pack", "pack"])
        .env("BKMATCH_PACK_DIR", &toy)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(pairs(&String::from_utf8(o.stdout).unwrap()).len(), 7);
}

#[test]
fn configuration_errors_exit_with_one() {
    let toy = fixtures().join("toy");
    let src = toy.join("source.tsv");
    let tgt = toy.join("target.tsv");
    let pack = toy.join("pack");
    assert_eq!(code(&bkmatch(&["match", "--no-such-flag"])), 1);
    assert_eq!(code(&bkmatch(&["frobnicate"])), 1);
    assert_eq!(code(&bkmatch(&["match", "--source", s(&src), "--target", s(&tgt)])), 1, "no pack");
    assert_eq!(code(&bkmatch(&["match", "--source", s(&src), "--target", "/nonexistent.tsv", "--pack", s(&pack)])), 1);
    assert_eq!(
        code(&bkmatch(&["match", "--source", s(&src), "--target", s(&tgt), "--pack", s(&pack), "--pack", s(&pack)])),
        1,
        "two packs need a combination strategy"
    );
    assert_eq!(
        code(&bkmatch(&["match", "--source", s(&src), "--target", s(&tgt), "--pack", s(&pack), "--strategy", "embedding"])),
        1,
        "embedding needs vectors"
    );
    assert_eq!(
        code(&bkmatch(&["match", "--source", s(&src), "--target", s(&tgt), "--pack", s(&pack), "--threshold", "1.5", "--strategy", "embedding"])),
        1
    );
    assert_eq!(code(&bkmatch(&["significance", "--manifest", s(&src), "--alpha", "0"])), 1);

    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "[match]\nsource = a.tsv\nstrategey = syn\n").unwrap();
    let o = bkmatch(&["match", "--config", s(&conf)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("strategey"));
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad = d.join("bad.nt");
    fs::write(&bad, "<http://a#x> <http://www.w3.org/2000/01/rdf-schema#label> \"x\" .\nthis is not a triple\n").unwrap();
    let toy = fixtures().join("toy");
    let o = bkmatch(&["match", "--source", s(&bad), "--target", s(&toy.join("target.tsv")), "--pack", s(&toy.join("pack"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    // The same file parses when malformed lines may be skipped.
    let o = bkmatch(&[
        "match", "--lenient", "--source", s(&bad), "--target", s(&toy.join("target.tsv")), "--pack", s(&toy.join("pack")),
    ]);
    assert_eq!(code(&o), 0);

    let broken_pack = d.join("pack");
    fs::create_dir(&broken_pack).unwrap();
    fs::write(broken_pack.join("pack.meta"), "name=broken\n").unwrap();
    let o = bkmatch(&["match", "--source", s(&toy.join("source.tsv")), "--target", s(&toy.join("target.tsv")), "--pack", s(&broken_pack)]);
    assert_eq!(code(&o), 2);

    let align = d.join("bad.tsv");
    fs::write(&align, "http://a#x\thttp://b#y\t~\t1.0\n").unwrap();
    assert_eq!(code(&bkmatch(&["eval", "--system", s(&align), "--reference", s(&align)])), 2);
}

#[test]
fn help_documents_every_flag() {
    let expected: &[(&str, &[&str])] = &[
        ("build-pack", &["--input", "--profile", "--name", "--out", "--lenient", "--threads"]),
        (
            "match",
            &[
                "--config", "--source", "--target", "--format", "--pack", "--vectors", "--strategy", "--threshold",
                "--output", "--output-format", "--lenient", "--seed",
            ],
        ),
        ("eval", &["--system", "--reference", "--manifest", "--aggregate", "--zero-division", "--output", "--lenient"]),
        ("significance", &["--manifest", "--alpha", "--exact-tail", "--output", "--lenient"]),
        ("impact", &["--manifest", "--alpha", "--exact-tail", "--source-denominator", "--output", "--lenient"]),
        (
            "walks",
            &["--graph", "--nodes", "--ontology", "--format", "--pack", "--walks-per-node", "--depth", "--seed", "--output", "--lenient"],
        ),
    ];
    for (cmd, flags) in expected {
        let help = ok(&[cmd, "--help"]);
        for flag in *flags {
            let described = help.lines().zip(help.lines().skip(1).chain([""])).any(|(l, next)| {
                let t = l.trim_start().trim_start_matches("-h, ").trim_start_matches("-V, ");
                let rest = match t.strip_prefix(flag) {
                    Some(r) if r.is_empty() || r.starts_with(' ') => r,
                    _ => return false,
                };
                let rest = rest.trim_start();
                let text = if rest.starts_with('<') { rest.split_once('>').map_or("", |(_, d)| d) } else { rest };
                !text.trim().is_empty()
                    || !next.trim().is_empty() && next.starts_with("          ") && !next.trim_start().starts_with('-')
            });
            assert!(described, "{cmd} {flag} has no description");
        }
    }
    let top = ok(&["--help"]);
    for cmd in ["build-pack", "match", "eval", "significance", "impact", "walks"] {
        assert!(top.contains(cmd));
    }
}
