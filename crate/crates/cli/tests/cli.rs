use std::path::Path;
use std::process::{Command, Output};

use nilcorr::circle::e_dd;
use nilcorr::correlator::{correlate_fn, FitMode, Weight};
use nilcorr::dd::Dd;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilcorr")).args(args).output().unwrap()
}

fn run_env(args: &[&str], key: &str, value: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilcorr"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn correlate_csv_is_bit_exact() {
    let o = run(&["correlate", "--weight", "mobius", "--phase", "sqrt2", "--ladder", "1e3,1e4,1e5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,re,im,abs,fitted_exponent");
    assert_eq!(lines.len(), 5);
    let alpha = Dd::from_f64(2.0).sqrt();
    let lib = correlate_fn(
        |n| e_dd(alpha * Dd::from_i64(n as i64)),
        &[1000, 10_000, 100_000],
        Weight::Mobius,
        FitMode::Power,
    )
    .unwrap();
    for (line, (n, z)) in lines[1..4].iter().zip(lib.ns.iter().zip(&lib.normalized)) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0].parse::<u64>().unwrap(), *n);
        assert_eq!(cells[1].parse::<f64>().unwrap().to_bits(), z.re.to_bits());
        assert_eq!(cells[2].parse::<f64>().unwrap().to_bits(), z.im.to_bits());
        assert_eq!(cells[3].parse::<f64>().unwrap().to_bits(), z.norm().to_bits());
        assert_eq!(cells[4], "");
    }
    let fit: Vec<&str> = lines[4].split(',').collect();
    assert_eq!(fit[..4], ["fit", "", "", ""]);
    assert_eq!(fit[4].parse::<f64>().unwrap().to_bits(), lib.fitted_exponent.unwrap().to_bits());
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["correlate", "--bracket", "sqrt2,sqrt3", "--ladder", "1e3,1e4,1e5"];
    let one = run(&[&["--threads", "1"][..], &args[..]].concat());
    let four = run(&[&["--threads", "4"][..], &args[..]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn plancherel_report() {
    let o = run(&["char", "--q", "15", "--plancherel"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in text.lines().skip(1) {
        let (_, v) = line.split_once(',').unwrap();
        assert!(v.parse::<f64>().unwrap() < 1e-12, "{line}");
    }
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--n", "100000"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.trim_end().ends_with("ok")).count(), 8);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["correlate", "--phase", "pi"]).status.code(), Some(2));
    assert_eq!(run(&["sieve", "--hi", "1e12", "--summary"]).status.code(), Some(3));
    assert_eq!(run(&["char", "--q", "0"]).status.code(), Some(2));
}

#[test]
fn reproducible_json_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&[
            "--format",
            "json",
            "--reproducible",
            "--seed",
            "9",
            "--output",
            p.to_str().unwrap(),
            "char",
            "--q",
            "21",
            "--plancherel",
        ]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(!text.contains("timestamp"));
    assert!(text.contains("git_describe"));
}

#[test]
fn sieve_uses_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_env(&["sieve", "--lo", "1", "--hi", "1000", "--summary"], "NILCORR_CACHE_DIR", dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "1,1000,2,-15,168");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let again = run_env(&["sieve", "--lo", "1", "--hi", "1000", "--summary"], "NILCORR_CACHE_DIR", dir.path());
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn dichotomy_and_equidist_commands() {
    let o = run(&["dichotomy", "--phase", "1/3", "--n", "1000"]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "3,0.0,obstructed,,major-arc");
    let o = run(&["dichotomy", "--phase", "sqrt2", "--n", "1e4"]);
    assert!(stdout(&o).contains("equidistributed-at-scale"));
    let o = run(&["equidist", "--phase", "sqrt2", "--n", "1e4", "--k-max", "1"]);
    let row: Vec<String> = stdout(&o).lines().nth(1).unwrap().split(',').map(String::from).collect();
    assert!(row[0].parse::<f64>().unwrap() < 0.05);
}
