use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "corpus", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn cflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cflab"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn run_reports_parity() {
    let o = cflab(&["run", &corpus("parity.cf"), "[1,0,1]", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"], "False");
    assert_eq!(v["status"], "ok");
    assert_eq!(v["input_len"], 3);
}

#[test]
fn every_engine_runs() {
    for engine in [
        "tree",
        "stack",
        "memo",
        "confirm",
        "ncf-search",
        "ncf-saturate",
    ] {
        let o = cflab(&[
            "run",
            &corpus("parity2.cf"),
            "1010",
            "--engine",
            engine,
            "--format",
            "json",
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{engine}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(json(&o)["result"], "True", "{engine}");
    }
    let o = cflab(&[
        "run",
        &corpus("parity2.cf"),
        "101",
        "--engine",
        "stack",
        "--tco",
        "--format",
        "json",
    ]);
    assert_eq!(json(&o)["max_frames"], 1);
}

#[test]
fn json_output_is_deterministic() {
    let args = [
        "run",
        &corpus("q.cf"),
        "111111",
        "--engine",
        "memo",
        "--format",
        "json",
    ];
    let a = cflab(&args);
    let b = cflab(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["cache_entries"], 7);
}

#[test]
fn exit_codes() {
    assert_eq!(
        cflab(&["run", &corpus("q.cf"), "111111", "--budget", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cflab(&["run", &corpus("stuck_branch.ncf"), "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        cflab(&["run", &corpus("parity.cf"), "12x"]).status.code(),
        Some(1)
    );
    assert_eq!(
        cflab(&["run", "/nonexistent.cf", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(cflab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cflab(&["--help"]).status.code(), Some(0));
    let file = std::env::temp_dir().join(format!("cflab-stuck-{}.cf", std::process::id()));
    std::fs::write(&file, "main x = head x\n").unwrap();
    let stuck = cflab(&["run", file.to_str().unwrap(), "[]", "--format", "json"]);
    std::fs::remove_file(&file).unwrap();
    assert_eq!(stuck.status.code(), Some(2));
    assert_eq!(json(&stuck)["status"], "stuck");
}

#[test]
fn suffix_audit_flag_counts_checks() {
    let o = cflab(&[
        "run",
        &corpus("has11.cf"),
        "0110",
        "--assert-suffix-lemma",
        "--format",
        "json",
    ]);
    assert!(json(&o)["suffix_checks"].as_u64().unwrap() > 0);
}

#[test]
fn analyze_reports_tail_recursion() {
    let v = json(&cflab(&[
        "analyze",
        &corpus("parity2.cf"),
        "--format",
        "json",
    ]));
    assert_eq!(v["is_cftr"], true);
    let v = json(&cflab(&[
        "analyze",
        &corpus("parity.cf"),
        "--format",
        "json",
    ]));
    assert_eq!(v["is_cftr"], false);
    let o = cflab(&["analyze", &corpus("mcv.cf")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nested"));
}

#[test]
fn sweep_emits_one_record_per_length() {
    let o = cflab(&[
        "sweep",
        &corpus("q.cf"),
        "1..14",
        "--engine",
        "memo",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.len(), 19);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 14);
    let len_col = headers.iter().position(|h| h == "input_len").unwrap();
    let lens: Vec<&str> = rows.iter().map(|r| &r[len_col]).collect();
    assert_eq!(lens, (1..=14).map(|n| n.to_string()).collect::<Vec<_>>());
}

#[test]
fn sweep_json_with_random_family() {
    let args = [
        "sweep",
        &corpus("has11.cf"),
        "0..5",
        "--family",
        "random",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let a = cflab(&args);
    assert_eq!(a.stdout, cflab(&args).stdout);
    assert_eq!(stdout(&a).lines().count(), 6);
}

#[test]
fn mcv_round_trip() {
    let o = cflab(&["mcv-encode", &corpus("sample.circ")]);
    let bits = stdout(&o).trim().to_string();
    assert_eq!(bits, "11101010100011100001101001110100000100001000");
    let decoded = cflab(&["mcv-decode", &bits]);
    assert_eq!(decoded.status.code(), Some(0));
    let sample = std::fs::read_to_string(corpus("sample.circ")).unwrap();
    let strip = |s: &str| {
        s.lines()
            .filter(|l| l.contains(":="))
            .map(str::trim)
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&stdout(&decoded)), strip(&sample));
    assert_eq!(cflab(&["mcv-decode", "11"]).status.code(), Some(1));
}

#[test]
fn mcv_eval_agrees() {
    let out = stdout(&cflab(&["mcv-eval", &corpus("sample.circ")]));
    assert!(out.contains("direct: true"));
    assert!(out.contains("program_result: True"));
}

#[test]
fn tm_commands() {
    let out = stdout(&cflab(&["tm-run", &corpus("contains11.tm"), "0110"]));
    assert!(out.contains("accept: true"));
    let out = stdout(&cflab(&["tm-run", &corpus("contains11.tm"), "0101"]));
    assert!(out.contains("accept: false"));
    let o = cflab(&["tm-compile", &corpus("contains11.tm")]);
    assert_eq!(o.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("cflab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let compiled = dir.join("contains11.cf");
    std::fs::write(&compiled, &o.stdout).unwrap();
    let v = json(&cflab(&[
        "run",
        compiled.to_str().unwrap(),
        "11",
        "--engine",
        "memo",
        "--format",
        "json",
    ]));
    assert_eq!(v["result"], "True");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bound_table() {
    let o = cflab(&[
        "bound",
        &corpus("parity.cf"),
        "--n-max",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&o), "n,reach_bound\n0,6\n1,8\n2,10\n3,12\n");
}
