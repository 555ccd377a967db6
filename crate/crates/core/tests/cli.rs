use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prevalence-bounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sample(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn bounds_without_tests() {
    let o = bin(&["bounds", "--tau", "0", "--gamma", "0", "--pi", "0.7:0.95", "--kappa", "1:inf"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.contains("worst-case") && l.contains("[0.000,1.000]")));
    assert!(text.lines().any(|l| l.contains("sensitivity+selectivity") && l.contains("[0.000,0.000]")));
}

#[test]
fn npv_command() {
    let o = bin(&["npv", "--gamma", "0.1", "--eta", "0.6:0.9"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[0.217,0.526]"));
}

#[test]
fn verify_exits_zero() {
    let o = bin(&["verify", "--tau", "0.05", "--gamma", "0.2", "--pi", "0.7:0.95", "--kappa", "1:inf", "--step", "1e-4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("pass"));
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["bounds", "--tau", "0.1", "--gamma", "0.8"]).status.code(), Some(2));
    assert_eq!(bin(&["bounds", "--tau", "0.1"]).status.code(), Some(64));
    assert_eq!(
        bin(&["series", "--data", "/nonexistent.csv", "--regions", &sample("regions.csv")]).status.code(),
        Some(1)
    );
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn series_csv_and_kappa_grid() {
    let data = sample("sample_generic.csv");
    let regions = sample("regions.csv");
    let o = bin(&["series", "--data", &data, "--regions", &regions, "--format", "csv", "--monotone"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("region,date,prevalence_lo,prevalence_hi,npv_lo,npv_hi"));
    assert_eq!(text.lines().count(), 21);

    let o = bin(&["series", "--data", &data, "--regions", &regions, "--kappa-grid", "1,1.5,2,3,5", "--region", "NY"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    let i5 = header.find("upper_kappa_ge_5").unwrap();
    let i1 = header.find("upper_kappa_ge_1 ").unwrap();
    assert!(i5 < i1);
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn ifr_json() {
    let o = bin(&[
        "ifr", "--data", &sample("sample_generic.csv"), "--regions", &sample("regions.csv"),
        "--format", "json", "--dates", "2020-04-10",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r["ifr"]["lo"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn tracking_export_with_cleaning() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("daily.csv");
    let regions = dir.path().join("regions.csv");
    std::fs::write(
        &data,
        "date,state,positive,death,totalTestResults\n\
         20200813,AZ,187523,4199,1062516\n\
         20200812,AZ,186923,4081,1049877\n\
         20200811,AZ,187000,,1039998\n",
    )
    .unwrap();
    std::fs::write(&regions, "region,population\nAZ,7278717\n").unwrap();
    let (d, r) = (data.to_str().unwrap(), regions.to_str().unwrap());

    let strict = bin(&["series", "--data", d, "--regions", r, "--data-format", "tracking"]);
    assert_eq!(strict.status.code(), Some(1));

    let o = bin(&["series", "--data", d, "--regions", r, "--data-format", "tracking", "--cleaning", "clamp", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][2]["date"], "2020-08-13");
    assert!(!v["parameters"]["warnings"].as_array().unwrap().is_empty());
}
