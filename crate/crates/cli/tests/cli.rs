use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ekrgl::certificate::{Certificate, Verdict};
use ekrgl_cli::jobs::{certificate_path, Caps, JobSpec};

fn ekrgl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ekrgl"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .env_remove("EKRGL_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .map(|rd| rd.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.extension().is_some_and(|x| x == "json")).collect())
        .unwrap_or_default();
    v.sort();
    v
}

fn load(path: &Path) -> Certificate {
    Certificate::from_json(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bound_summaries() {
    let tmp = tempfile::tempdir().unwrap();
    for (n, q, want) in [
        ("2", "3", "bound=6 |GL|=48 alpha=8"),
        ("1", "7", "bound=1 |GL|=6 alpha=6"),
        ("3", "2", "bound=24 |GL|=168 alpha=7"),
    ] {
        let out = ekrgl(tmp.path(), &["bound", "-n", n, "-q", q]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out).trim(), want);
    }
    let out = ekrgl(tmp.path(), &["bound", "-n", "2", "-q", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bound"], "6");
    assert_eq!(v["group_order"], "48");
    assert_eq!(ekrgl(tmp.path(), &["bound", "-n", "2", "-q", "6"]).status.code(), Some(2));
}

#[test]
fn spread_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ekrgl(tmp.path(), &["spread", "-n", "2", "-l", "3", "-q", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n must divide l"), "{}", stderr(&out));
    assert!(json_files(tmp.path()).is_empty());

    let out = ekrgl(tmp.path(), &["spread", "-n", "2", "-l", "4", "-q", "2", "--emit-coclique"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let files = json_files(tmp.path());
    assert_eq!(files.len(), 1);
    let Certificate::Spread(c) = load(&files[0]) else { panic!("wrong kind") };
    assert_eq!(c.coclique.as_ref().unwrap().family.size, 3);
    assert!(c.partition.partition_ok);

    let out = ekrgl(tmp.path(), &["spread", "-n", "2", "-l", "6", "-q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("members=21 partition=true"));

    let out = ekrgl(tmp.path(), &["spread", "-n", "2", "-l", "6", "-q", "2", "--emit-coclique"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ekrgl(tmp.path(), &["verify", "gl", "-n", "2", "-q", "2", "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict=pass clique=2"), "{}", stdout(&out));

    let out = ekrgl(tmp.path(), &["verify", "sn", "-n", "4", "--extremal"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("max_cliques=16 all_point_maps=true"), "{}", stdout(&out));

    let out = ekrgl(tmp.path(), &["verify", "gl", "-n", "2", "-q", "5", "--mode", "certificate", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let Certificate::Gl(c) = Certificate::from_json(&stdout(&out)).unwrap() else { panic!("wrong kind") };
    assert_eq!(c.witnesses.audit.product, 480);
    assert_eq!(c.witnesses.audit.intersection_size, Some(1));

    let out = ekrgl(tmp.path(), &["verify", "audit", "-n", "2", "-q", "3", "--vector", "1,1", "--translate", "0,1,1,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("intersection=1"));
}

#[test]
fn exit_code_classes() {
    let tmp = tempfile::tempdir().unwrap();
    // cap violation
    let out = ekrgl(tmp.path(), &["verify", "gl", "-n", "3", "-q", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("max_vertices"));
    let out = ekrgl(tmp.path(), &["--max-vertices", "10", "verify", "sn", "-n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    // usage
    assert_eq!(ekrgl(tmp.path(), &["verify", "gl", "-n", "2"]).status.code(), Some(2));
    assert_eq!(ekrgl(tmp.path(), &["verify", "gl", "-n", "2", "-q", "2", "--mode", "fast"]).status.code(), Some(2));
    // pass
    let out = ekrgl(tmp.path(), &["verify", "gl", "-n", "2", "-q", "3", "--mode", "certificate"]);
    assert_eq!(out.status.code(), Some(0));
    let file = json_files(tmp.path()).pop().unwrap();
    assert_eq!(ekrgl(tmp.path(), &["check", file.to_str().unwrap()]).status.code(), Some(0));
    // verification failure: a certificate whose claims do not survive re-checking
    let text = fs::read_to_string(&file).unwrap().replacen("\"bound\": 6", "\"bound\": 7", 1);
    let bad = tmp.path().join("tampered.json");
    fs::write(&bad, text).unwrap();
    let out = ekrgl(tmp.path(), &["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    // malformed input
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(ekrgl(tmp.path(), &["check", bad.to_str().unwrap()]).status.code(), Some(2));
}

fn strip_timings(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timings_ms");
    v
}

#[test]
fn determinism_and_cache() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["verify", "gl", "-n", "2", "-q", "3", "--mode", "exhaustive"];
    assert_eq!(ekrgl(a.path(), &args).status.code(), Some(0));
    assert_eq!(ekrgl(b.path(), &args).status.code(), Some(0));
    let (fa, fb) = (json_files(a.path()), json_files(b.path()));
    assert_eq!(fa.len(), 1);
    assert_eq!(fa[0].file_name(), fb[0].file_name());
    let (ta, tb) = (fs::read_to_string(&fa[0]).unwrap(), fs::read_to_string(&fb[0]).unwrap());
    assert_eq!(strip_timings(&ta), strip_timings(&tb));

    let cached = ekrgl(a.path(), &args);
    assert!(stdout(&cached).contains("(cached)"));
    let forced = ekrgl(a.path(), &[&args[..], &["--force"]].concat());
    assert!(!stdout(&forced).contains("(cached)"));
    let fresh = fs::read_to_string(&json_files(a.path())[0]).unwrap();
    assert_eq!(strip_timings(&fresh), strip_timings(&ta));
    assert_eq!(json_files(a.path()).len(), 1);
}

#[test]
fn env_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ekrgl"))
        .args(["verify", "sn", "-n", "3"])
        .env("EKRGL_OUTPUT_DIR", tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_files(tmp.path()).len(), 1);
}

const CAMPAIGN: &str = "\
# desk-scale campaign
max_vertices=512
kind=gl_ekr n=2 q=2 mode=exhaustive extremal=true
kind=gl_ekr n=2 q=3 mode=exhaustive
kind=gl_ekr n=2 q=5 mode=certificate
kind=sn_ekr n=3 extremal=true
kind=spread n=2 l=4 q=3 coclique=true
kind=audit n=2 q=3 vector=0,1 translate=1,2,1,0
";

#[test]
fn campaign_runs_concurrently() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("campaign.txt");
    fs::write(&file, CAMPAIGN).unwrap();
    let out_dir = tmp.path().join("out");
    let out = ekrgl(&out_dir, &["--jobs", "3", "campaign", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    let table = stdout(&out);
    assert!(table.starts_with("job"));
    assert!(table.contains("6/6 jobs passed"));
    let lines: Vec<&str> = table.lines().collect();
    assert!(lines[1].starts_with("gl_ekr_n2_q2_exhaustive_extremal"));
    assert!(lines[6].starts_with("audit_n2_q3"));
    assert_eq!(json_files(&out_dir).len(), 6);
    for f in json_files(&out_dir) {
        assert_eq!(ekrgl(&out_dir, &["check", f.to_str().unwrap()]).status.code(), Some(0), "{}", f.display());
    }

    let again = ekrgl(&out_dir, &["campaign", file.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(stdout(&again).matches("(cached)").count(), 6);
}

#[test]
fn campaign_parse_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("bad.txt");
    fs::write(&file, "kind=gl_ekr n=2 q=3\nkind=spread n=2 l=3 q=2\nkind=gl_ekr n=2 q=10\n").unwrap();
    let out = ekrgl(tmp.path(), &["campaign", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 2: n must divide l"), "{err}");
    assert!(err.contains("line 3: 10 is not a prime power"), "{err}");
    assert!(json_files(tmp.path()).is_empty());
}

#[test]
fn campaign_failure_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = JobSpec::Sn { n: 3, extremal: false };
    let Certificate::Sn(mut c) = spec.run(&Caps::default(), 0).unwrap() else { panic!("wrong kind") };
    c.checks[0].passed = false;
    c.verdict = Verdict::Fail;
    let cert = Certificate::Sn(c);
    fs::write(certificate_path(tmp.path(), &spec, &cert), cert.to_json()).unwrap();
    let file = tmp.path().join("c.txt");
    fs::write(&file, "kind=sn_ekr n=3\nkind=sn_ekr n=2\n").unwrap();
    let out = ekrgl(tmp.path(), &["campaign", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
    assert!(stdout(&out).contains("1/2 jobs passed"));
}
