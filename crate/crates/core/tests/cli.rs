use std::fs;
use std::process::{Command, Output};

fn qsdesign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsdesign")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let out = qsdesign(&["generate", "--n", "6", "--m", "6", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("n=6 m=6 d1=14 d2sq=40 dH=6 r_ave=0.200 (1/5)"), "{}", stdout(&out));
    assert!(dir.path().join("d.meta.json").exists());

    let eval = qsdesign(&["evaluate", path.to_str().unwrap()]);
    assert!(eval.status.success());
    assert!(stdout(&eval).contains("d1=14 d2sq=40 dH=6"));

    let json = qsdesign(&["evaluate", "--json", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["r_ave_num"], 1);
    assert_eq!(v["r_ave_den"], 5);
}

#[test]
fn generate_is_deterministic_per_seed() {
    let a = qsdesign(&["generate", "--n", "16", "--m", "8", "--seed", "3", "--outer", "10", "--inner", "10"]);
    let b = qsdesign(&["generate", "--n", "16", "--m", "8", "--seed", "3", "--outer", "10", "--inner", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 17);
}

#[test]
fn exit_codes() {
    assert_eq!(qsdesign(&["generate", "--n", "7", "--m", "6"]).status.code(), Some(3));
    assert_eq!(qsdesign(&["generate", "--n", "9", "--m", "9"]).status.code(), Some(3));
    assert_eq!(qsdesign(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qsdesign(&["generate", "--n", "6", "--m", "6", "--outer", "0"]).status.code(), Some(2));
    assert_eq!(qsdesign(&["tsp", "eval", "--strategy", "1,2;x"]).status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "x1,x2,o1,o2\n1,2,2,1\n2,q,1,2\n").unwrap();
    let out = qsdesign(&["evaluate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3, column 2"));
}

#[test]
fn table_and_ratios() {
    let t = stdout(&qsdesign(&["table-b", "--max-p", "13"]));
    assert_eq!(t.lines().nth(2), Some("7,1 2,4 6,2,4,0.200"));

    let out = qsdesign(&["ratios", "--m", "6,9,8", "--outer", "20", "--inner", "20"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("6,glp-pair,1.000,0.976,0.200,0.857,0.816,0.360"));
    assert!(lines[2].starts_with("8,totient-latin,1.000,0.968,"));
}

#[test]
fn catalog_is_sorted() {
    let out = qsdesign(&["catalog", "--max-m", "4", "--max-n", "12", "--outer", "5", "--inner", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let keys: Vec<(usize, usize)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().parse().unwrap(), f.next().unwrap().parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
    assert!(keys.contains(&(4, 12)));
}

#[test]
fn tsp_commands() {
    let eval = qsdesign(&["tsp", "eval", "--strategy", "1.35,2.09,2.23,2.75,4,2.81;6,2,5,3,1,4"]);
    assert_eq!(stdout(&eval).trim(), "222.84");

    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("profits.csv");
    let random = qsdesign(&["tsp", "random", "--n", "300", "--seed", "7", "--profits", raw.to_str().unwrap()]);
    assert!(random.status.success());
    let text = stdout(&random);
    assert!(text.starts_with("best="));
    let counts: usize = text.lines().skip(2).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(counts, 300);
    assert_eq!(fs::read_to_string(raw).unwrap().lines().count(), 301);
}
