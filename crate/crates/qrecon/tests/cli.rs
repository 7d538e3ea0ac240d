use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qrecon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrecon")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(args: &[&str]) -> Output {
    let o = qrecon(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    o
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_lists_replication_examples() {
    let o = ok(&["--help"]);
    let text = stdout(&o);
    for cmd in ["gen-data", "train", "eval", "sweep", "bloch-cloud", "qrecon train --channel 'Z(0.2)'"] {
        assert!(text.contains(cmd), "missing {cmd}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.jsonl");
    let bad = qrecon(&["gen-data", "--channel", "Z(0.2", "--samples", "3", "--seed", "1", "--out", p(&out)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("position"), "{}", stderr(&bad));

    let missing = qrecon(&["eval", "--model", "/nonexistent/m.txt", "--data", "/nonexistent/d.jsonl"]);
    assert_eq!(missing.status.code(), Some(2));

    assert_eq!(qrecon(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qrecon(&["gen-data", "--samples", "x"]).status.code(), Some(2));

    let unwritable = dir.path().join("no/such/dir/d.jsonl");
    let o = qrecon(&["gen-data", "--channel", "Z(0.2)", "--samples", "3", "--seed", "1", "--out", p(&unwritable)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_is_echoed_even_when_drawn() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.jsonl");
    let o = ok(&["gen-data", "--channel", "X(0.2)", "--samples", "2", "--out", p(&out)]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.starts_with("seed=") && first[5..].parse::<u64>().is_ok(), "{first}");
}

#[test]
fn gen_data_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (path, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        ok(&["gen-data", "--channel", "GAD(0.5,0.3)", "--samples", "20", "--kind", "mixed", "--seed", seed, "--out", p(path)]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());

    let k = dir.path().join("k");
    ok(&["gen-data", "--classify", "--channels", "Z(0.2);GAD(0.5,0.3)", "--mode", "IN", "--samples", "10", "--seed", "1", "--out", p(&k)]);
    let header = fs::read_to_string(&k).unwrap();
    let header = header.lines().next().unwrap();
    assert!(header.contains("\"classification\"") && header.contains("\"IN\""), "{header}");
}

#[test]
fn train_and_eval_are_deterministic_and_flag_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.jsonl");
    let other = dir.path().join("other.jsonl");
    ok(&["gen-data", "--channel", "Z(0.2)", "--samples", "30", "--seed", "3", "--out", p(&data)]);
    ok(&["gen-data", "--channel", "Z(0.2)", "--samples", "50", "--seed", "4", "--out", p(&other)]);
    let mut outputs = Vec::new();
    for name in ["m1", "m2"] {
        let model = dir.path().join(name);
        let o = ok(&["train", "--data", p(&data), "--epochs", "40", "--hidden", "16,16", "--test-samples", "50", "--seed", "9", "--out", p(&model)]);
        assert!(stdout(&o).lines().last().unwrap().starts_with("ATF="));
        let metrics = fs::read(dir.path().join(format!("{name}.metrics.csv"))).unwrap();
        outputs.push((fs::read(&model).unwrap(), metrics));
    }
    assert_eq!(outputs[0], outputs[1]);
    let csv = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert_eq!(csv.lines().count(), 1 + 40 + 1);
    assert!(csv.lines().last().unwrap().starts_with("final,"));

    let model = dir.path().join("m1");
    let same = ok(&["eval", "--model", p(&model), "--data", p(&data), "--seed", "0"]);
    assert!(stderr(&same).contains("overlap"));
    let fresh = ok(&["eval", "--model", p(&model), "--data", p(&other), "--seed", "0"]);
    assert!(!stderr(&fresh).contains("overlap"));
    assert!(stdout(&fresh).lines().last().unwrap().starts_with("ATF="));
}

#[test]
fn classification_train_reports_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("c");
    let o = ok(&["train", "--task", "classify", "--channels", "Z(0.2);GAD(0.5,0.3)", "--samples", "40", "--epochs", "10", "--hidden", "8", "--seed", "2", "--out", p(&model)]);
    let last = stdout(&o).lines().last().unwrap().to_string();
    let acc: f64 = last.strip_prefix("ACC=").unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    assert!(fs::read_to_string(&model).unwrap().contains("head softmax"));
}

#[test]
fn sweep_writes_one_row_per_size_and_ignores_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for jobs in ["1", "2"] {
        let out = dir.path().join(format!("s{jobs}.csv"));
        ok(&["sweep", "--channel", "Z(0.2)", "--sizes", "5,10,20,40", "--repeats", "2", "--epochs", "15", "--hidden", "32,32", "--test-samples", "20", "--jobs", jobs, "--seed", "4", "--out", p(&out)]);
        tables.push(fs::read_to_string(&out).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    let lines: Vec<&str> = tables[0].lines().collect();
    assert_eq!(lines[0], "size,mean,std,best,seeds");
    assert_eq!(lines.len(), 5);
    for (line, size) in lines[1..].iter().zip(["5", "10", "20", "40"]) {
        assert_eq!(line.split(',').next(), Some(size));
    }
}

#[test]
fn bloch_cloud_is_an_ellipsoid_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        ok(&["bloch-cloud", "--channel", "Z(0.2)", "--samples", "2000", "--seed", "8", "--out", p(path)]);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,nx,ny,nz"));
    let mut count = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let e = (v[3] / 0.6).powi(2) + (v[4] / 0.6).powi(2) + v[5] * v[5];
        assert!((e - 1.0).abs() < 1e-9);
        count += 1;
    }
    assert_eq!(count, 2000);
    assert_eq!(qrecon(&["bloch-cloud", "--channel", "CAD(0.1,0.2)", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_and_unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("d.jsonl");
    fs::write(&cfg, format!("channel = \"X(0.2)\"\nsamples = 7\nseed = 12\nout = \"{}\"\n", p(&out))).unwrap();
    let o = ok(&["gen-data", "--config", p(&cfg)]);
    assert!(stdout(&o).contains("seed=12") && stdout(&o).contains("wrote 7 records"));
    let o = ok(&["gen-data", "--config", p(&cfg), "--samples", "5", "--seed", "13"]);
    assert!(stdout(&o).contains("seed=13") && stdout(&o).contains("wrote 5 records"));

    let json = dir.path().join("run.json");
    fs::write(&json, format!("{{\"channel\": \"Y(0.2)\", \"samples\": 3, \"out\": \"{}\"}}", p(&out))).unwrap();
    assert!(stdout(&ok(&["gen-data", "--config", p(&json), "--seed", "1"])).contains("wrote 3 records"));

    fs::write(&cfg, "channel = \"X(0.2)\"\nsamplez = 7\n").unwrap();
    let o = qrecon(&["gen-data", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("samplez"));
}
