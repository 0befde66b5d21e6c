use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn admwex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_admwex")).args(args).output().expect("spawn admwex")
}

fn bundled(command: &str, name: &str, extra: &[&str]) -> (i32, Value) {
    let cfg = configs().join(name);
    let mut args = vec![command, "--config", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = admwex(&args);
    let code = out.status.code().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report)
}

fn with_config(command: &str, text: &str, extra: &[&str]) -> (i32, Value, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.toml");
    fs::write(&path, text).unwrap();
    let mut args = vec![command, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = admwex(&args);
    (
        out.status.code().unwrap(),
        serde_json::from_slice(&out.stdout).unwrap_or(Value::Null),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn negative_scal_example_is_exact() {
    let (code, r) = bundled("solve", "negative-scal.toml", &[]);
    assert_eq!(code, 0);
    let p = &r["payload"];
    assert_eq!(p["exact"]["A1"], "0");
    assert_eq!(p["exact"]["A2"], "34320/401");
    assert_eq!(p["futaki_vanishes"], true);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn small_classes_exit_zero() {
    let (code, r) = bundled("solve", "small-x.toml", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["positivity"]["verdict"], "positive");
}

#[test]
fn weight_at_most_one_is_a_usage_error() {
    let cfg = "schema_version = 1\n[setup]\nblocks = [{ x = \"1/2\", s = 2 }]\n[weight]\na = \"1\"\n";
    let (code, _, err) = with_config("solve", cfg, &[]);
    assert_eq!(code, 64, "{err}");
    assert!(err.contains("must exceed 1"), "{err}");
}

#[test]
fn config_problems_exit_64() {
    let (code, _, _) = with_config("solve", "schema_version = 1\nunknown = 1\n", &[]);
    assert_eq!(code, 64);
    let (code, _, _) = with_config("solve", "schema_version = 7\n", &[]);
    assert_eq!(code, 64);
    let (code, _, _) = with_config("solve", "schema_version = 1\n", &[]);
    assert_eq!(code, 64);
    assert_eq!(admwex(&["solve"]).status.code(), Some(64));
    assert_eq!(admwex(&["no-such-command"]).status.code(), Some(64));
    let cfg = configs().join("small-x.toml");
    assert_eq!(admwex(&["solve", "--csv", "--config", cfg.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn negative_profile_exits_two() {
    let cfg = "schema_version = 1\n[setup]\nblocks = [{ x = \"1/2\", s = -400 }, { x = \"1/3\", s = 1 }]\n[weight]\na = \"5\"\n";
    let (code, r, _) = with_config("solve", cfg, &[]);
    assert_eq!(code, 2);
    assert_eq!(r["payload"]["positivity"]["verdict"], "negative-somewhere");
    assert_eq!(r["exit_code"], 2);
}

#[test]
fn stability_examples() {
    let (code, r) = bundled("stability", "hirzebruch-4-5.toml", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["relative_verdict"], "analytically-K-stable");
    assert_eq!(r["payload"]["futaki_vanishes"], true);

    let cfg = "schema_version = 1\n[setup]\nblocks = [{ x = \"1/2\", s = 2 }]\n[weight]\na = \"5\"\np = 4\n";
    let (code, r, _) = with_config("stability", cfg, &[]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["futaki_vanishes"], false);
    assert_eq!(r["payload"]["absolute_verdict"], "not-K-semistable");
}

#[test]
fn df_signs_follow_the_profile() {
    let cfg = "schema_version = 1\nmode = \"float\"\n[setup]\nblocks = [{ x = \"1/2\", s = -400 }, { x = \"1/3\", s = 1 }]\n[weight]\na = \"5\"\n[solve]\nsamples = 33\n";
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.toml");
    fs::write(&path, cfg).unwrap();
    let out_dir = dir.path().join("out");
    let (p, o) = (path.to_str().unwrap(), out_dir.to_str().unwrap());
    assert_eq!(admwex(&["solve", "--config", p, "--out", o, "--csv"]).status.code(), Some(2));
    assert_eq!(admwex(&["stability", "--config", p, "--out", o, "--csv"]).status.code(), Some(0));
    let mut f_rows = Vec::new();
    let mut df_rows = Vec::new();
    for entry in fs::read_dir(&out_dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if !name.ends_with(".csv") {
            continue;
        }
        let mut rd = csv::Reader::from_path(&path).unwrap();
        let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
        let rows: Vec<Vec<f64>> =
            rd.records().map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
        if name.starts_with("solve-") {
            assert_eq!(header, ["z", "F", "Theta", "Scal_w"]);
            assert_eq!(rows.len(), 33);
            f_rows = rows;
        } else {
            assert_eq!(header, ["zeta", "DF"]);
            df_rows = rows;
        }
    }
    assert!(!f_rows.is_empty() && !df_rows.is_empty());
    let report: Value = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap().to_str().unwrap().starts_with("stability-") && p.extension().unwrap() == "json")
        .map(|p| serde_json::from_slice(&fs::read(p).unwrap()).unwrap())
        .unwrap();
    assert!(report["csv"].as_str().unwrap().contains(report["report_id"].as_str().unwrap()));
    // DF has the sign of F at each sampled zeta
    for s in report["payload"]["df_samples"].as_array().unwrap() {
        let zeta = s["zeta"].as_f64().unwrap();
        let df = s["DF"].as_f64().unwrap();
        let nearest = f_rows.iter().min_by(|a, b| (a[0] - zeta).abs().total_cmp(&(b[0] - zeta).abs())).unwrap();
        if (nearest[0] - zeta).abs() < 1e-12 {
            assert_eq!(df > 0.0, nearest[1] > 0.0);
        }
    }
    assert!(df_rows.iter().any(|r| r[1] < 0.0));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("hirzebruch-9-10.toml");
    let cfg = cfg.to_str().unwrap();
    let mut texts = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = admwex(&["yamabe", "--mode", "float", "--config", cfg, "--out", out.to_str().unwrap(), "--csv"]);
        assert_eq!(o.status.code(), Some(0));
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().to_str().unwrap().to_string(), fs::read(&p).unwrap())
            })
            .collect();
        files.sort();
        texts.push(files);
    }
    assert_eq!(texts[0].len(), 2);
    assert_eq!(texts[0], texts[1]);
    let (a, b) = (admwex(&["em-search", "--config", cfg]), admwex(&["em-search", "--config", cfg]));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn em_search_examples() {
    let (code, r) = bundled("em-search", "koiso-sakane-csck.toml", &[]);
    assert_eq!(code, 0);
    assert!(r["payload"]["roots"].as_array().unwrap().is_empty());
    assert_eq!(r["payload"]["notes"][0], "CSCK class");

    let (code, r) = bundled("em-search", "hodge4.toml", &[]);
    assert_eq!(code, 0);
    let p = &r["payload"];
    assert_eq!(p["cross_check"]["a0_is_root"], true);
    let a0 = p["cross_check"]["a0"].as_f64().unwrap();
    let root = p["roots"].as_array().unwrap().iter().find(|r| (r["a"].as_f64().unwrap() - a0).abs() < 1e-9).unwrap();
    assert_eq!(root["yamabe"]["kind"], "local-max");

    let (code, r) = bundled("em-search", "hirzebruch-9-10.toml", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["cross_check"]["agrees"], true);
    assert_eq!(r["payload"]["roots"].as_array().unwrap().len(), 3);
}

#[test]
fn yamabe_grid_and_critical_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("hirzebruch-9-10.toml");
    let o = admwex(&["yamabe", "--mode", "float", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let mut report = Value::Null;
    let mut rows = 0;
    for e in fs::read_dir(dir.path()).unwrap() {
        let p = e.unwrap().path();
        if p.extension().unwrap() == "csv" {
            rows = csv::Reader::from_path(&p).unwrap().records().count();
        } else {
            report = serde_json::from_slice(&fs::read(&p).unwrap()).unwrap();
        }
    }
    assert_eq!(rows, 200);
    let cps = report["payload"]["critical_points"].as_array().unwrap();
    let ts: Vec<f64> = cps.iter().map(|c| c["t"].as_f64().unwrap()).collect();
    for (t, e) in ts.iter().zip([1.1459, 1.5954, 7.8541]) {
        assert!((t - e).abs() < 1e-3, "{ts:?}");
    }
    assert_eq!(cps[1]["kind"], "local-max");
    assert!(cps.iter().all(|c| c["below_aubin_bound"] == true));
}

#[test]
fn orthotoric_examples() {
    let (code, r) = bundled("orthotoric", "flat-m2-p5.toml", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["affinity"]["is_affine"], true);
    assert_eq!(r["payload"]["flat"]["matches_fit"], true);

    let (code, r) = bundled("orthotoric", "sigma-m-csck.toml", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["sigma_m_csck_check"]["csck"], true);
    assert_eq!(r["payload"]["sigma_m_csck_check"]["consistent"], true);

    let cfg = "schema_version = 1\n[orthotoric]\nm = 2\np = 5\npoly = [\"1\"]\nf = [\"1\", \"0\", \"0\"]\ntrials = 0\n";
    assert_eq!(with_config("orthotoric", cfg, &[]).0, 64);
}

#[test]
fn mabuchi_examples() {
    let (code, r) = bundled("mabuchi", "mabuchi.toml", &[]);
    assert_eq!(code, 0);
    let fams = r["payload"]["perturbations"].as_array().unwrap();
    assert_eq!(fams[0]["values"][0]["energy"].as_f64(), Some(0.0));
    for f in &fams[1..] {
        let g = &f["gradient_check"];
        assert!(g["relative_error"].as_f64().unwrap() < 1e-4, "{g}");
    }

    let bad = "schema_version = 1\nmode = \"float\"\n[setup]\nblocks = [{ x = \"1/2\", s = 2 }]\n[weight]\na = \"3\"\np = 4\n[[mabuchi.perturbations]]\nv = [-50]\nepsilons = [1]\n";
    let (code, _, err) = with_config("mabuchi", bad, &[]);
    assert_eq!(code, 65, "{err}");
    assert!(err.contains("not positive"), "{err}");
}

#[test]
fn small_sweep_covers_both_kinds_of_cell() {
    let cfg = "schema_version = 1\n[setup]\nblocks = [{ x = \"1/2\", s = 2 }, { x = \"-1/2\", s = -2 }]\n[em_search]\na_max = \"inf\"\n[sweep]\ncommand = \"em-search\"\nx1 = { from = \"1/5\", to = \"3/5\", steps = 2 }\nx2 = { from = \"-1/5\", to = \"-2/5\", steps = 2 }\n";
    let (code, r, err) = with_config("sweep", cfg, &[]);
    assert_eq!(code, 0, "{err}");
    let cells = r["payload"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4);
    for c in cells {
        let (x1, x2) = (c["x1"].as_str().unwrap(), c["x2"].as_str().unwrap());
        // lines x2 = -x1 and x2 = x1 - 1
        let on_line = (x1, x2) == ("1/5", "-1/5") || (x1, x2) == ("3/5", "-2/5");
        let roots = c["result"]["roots"].as_array().unwrap();
        assert_eq!(roots.is_empty(), on_line, "{c}");
    }
}
