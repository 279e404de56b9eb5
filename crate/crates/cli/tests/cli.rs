use std::path::Path;
use std::process::{Command, Output};

const LOG_TAU: f64 = 1.837_877_066_409_345_3;

fn brjuno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brjuno"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap_or("").to_string())
        })
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn upsilon_at_rationals() {
    let o = brjuno(&["upsilon", "1/2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let v: f64 = field(&text, "value").parse().unwrap();
    assert!((v - LOG_TAU / 2.0).abs() < 1e-12);
    assert_eq!(field(&text, "method"), "rational_formula");

    let text = stdout(&brjuno(&["upsilon", "0/1"]));
    let v: f64 = field(&text, "value").parse().unwrap();
    assert!((v - LOG_TAU).abs() < 1e-12);
}

#[test]
fn upsilon_at_the_golden_mean() {
    let o = brjuno(&["upsilon", "pcf:[0;|1]"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let v: f64 = field(&text, "value").parse().unwrap();
    assert!((0.0..=LOG_TAU).contains(&v), "{v}");
    assert_eq!(field(&text, "method"), "brjuno_series");
}

#[test]
fn parse_errors_exit_with_two() {
    let o = brjuno(&["upsilon", "pcf:[0;1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position"));
}

#[test]
fn cycle_table() {
    let o = brjuno(&["cycle", "1/2", "1e-4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("2 point(s)"));
    let gap: f64 = field(&text, "gap").parse().unwrap();
    assert!(gap > 0.0 && gap < 0.05);

    let text = stdout(&brjuno(&["cycle", "1/3", "0"]));
    assert!(text.contains("1 point(s)"));

    assert_eq!(brjuno(&["cycle", "1/2", "0.2"]).status.code(), Some(2));
    assert!(brjuno(&["cycle", "1/2", "-1e-4"]).status.success());
}

#[test]
fn farey_sweep_stays_in_range_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let svg = dir.path().join("f.svg");
    let o = brjuno(&[
        "sweep",
        "--grid",
        "farey:8",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = read(&csv);
    assert!(text.starts_with("alpha_text,alpha_float,upsilon,method,error_estimate\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 23);
    for r in &rows {
        assert_eq!(r[3], "rational_formula");
        let v: f64 = r[2].parse().unwrap();
        assert!((-0.1..=1.94).contains(&v), "{r:?}");
    }
    let plot = read(&svg);
    assert!(plot.starts_with("<svg"));
    assert_eq!(plot.matches("<line").count(), 2);

    // deterministic output
    let again = dir.path().join("g.csv");
    brjuno(&[
        "sweep",
        "--grid",
        "farey:8",
        "--sequential",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(read(&again), text);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    std::fs::write(&cfg, "grid = farey:3\nlo = 0/1\nhi = 1/2\n").unwrap();
    let o = brjuno(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&stdout(&o)).len(), 3);
    let o = brjuno(&["sweep", "--config", cfg.to_str().unwrap(), "--hi", "1/1"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 5);

    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(
        brjuno(&["sweep", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn tilde_flavour_rejects_rational_grids() {
    let o = brjuno(&["sweep", "--grid", "farey:4", "--flavor", "phi_tilde"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tilde_sweep_is_symmetric() {
    let o = brjuno(&[
        "sweep",
        "--grid",
        "surd:20",
        "--flavor",
        "phi_tilde",
        "--series-n",
        "1024",
    ]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 20);
    let parsed: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| {
            (
                r[1].parse().unwrap(),
                r[2].parse().unwrap(),
                r[4].parse().unwrap(),
            )
        })
        .collect();
    for &(a, v, e) in &parsed {
        let (_, w, f) = parsed
            .iter()
            .copied()
            .find(|m| (m.0 + a - 1.0).abs() < 1e-12)
            .expect("mirror point");
        assert!((v - w).abs() <= 2.0 * (e + f), "{a}");
    }
}

#[test]
fn surd_sweep_has_no_failed_rows() {
    let o = brjuno(&["sweep", "--grid", "surd:51", "--series-n", "2048"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 51);
    assert!(rows.iter().all(|r| r[3] == "brjuno_series"));
}

#[test]
fn probe_towards_one_half() {
    let o = brjuno(&["probe", "1/2", "--count", "6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("k,alpha_prime,upsilon,delta\n"));
    let rows = csv_rows(&text);
    let ks: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ks, [2, 4, 8, 16, 32, 64]);
    let deltas: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(deltas.windows(2).all(|w| w[1] < w[0]), "{deltas:?}");

    let o = brjuno(&["probe", "1/2", "--count", "0"]);
    assert_eq!(stdout(&o), "k,alpha_prime,upsilon,delta\n");
}

#[test]
fn probe_towards_the_golden_mean() {
    let o = brjuno(&["probe", "pcf:[0;|1]", "--count", "6"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let last: f64 = rows.last().unwrap()[3].parse().unwrap();
    assert!(last < 0.05, "{last}");
}

#[test]
fn dn_starts_at_the_fixed_point() {
    let o = brjuno(&["dn", "pcf:[0;|2]"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let alpha = 2f64.sqrt() - 1.0;
    let d0: f64 = rows[0][2].parse().unwrap();
    assert!((d0 - 2.0 * (std::f64::consts::PI * alpha).sin()).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[1].parse::<u64>().unwrap() <= 12));
    assert_eq!(brjuno(&["dn", "1/3"]).status.code(), Some(2));
}

#[test]
fn phi_commands() {
    let text = stdout(&brjuno(&["phitrunc", "1/2"]));
    let v: f64 = field(&text, "phi_trunc").parse().unwrap();
    assert!((v - 2f64.ln()).abs() < 1e-15);
    let o = brjuno(&["phi", "pcf:[0;|1]", "--flavor", "nearest"]);
    assert!(o.status.success());
    let o = brjuno(&["phi", "cf:[0;2,4,16,256,...]"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn radius_of_the_golden_disk() {
    let o = brjuno(&["radius", "pcf:[0;|1]", "--series-n", "1024"]);
    assert!(o.status.success());
    let r: f64 = field(&stdout(&o), "radius").parse().unwrap();
    assert!((r - 0.3254).abs() < 5e-3, "{r}");
}
