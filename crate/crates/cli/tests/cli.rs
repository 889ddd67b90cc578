use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chernoff-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn count(dir: &Path, prefix: &str, ext: &str) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with(prefix) && n.ends_with(ext))
        .count()
}

fn summary_slope(dir: &Path, condition: &str, operator: &str) -> f64 {
    let mut reader = csv::Reader::from_path(dir.join("summary.csv")).unwrap();
    for record in reader.records() {
        let record = record.unwrap();
        if &record[0] == condition && &record[1] == operator {
            return record[2].parse().unwrap();
        }
    }
    panic!("no summary row for {condition}/{operator}");
}

#[test]
fn default_run_writes_every_artifact() {
    let dir = tempdir().unwrap();
    let out = lab(&["run", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(count(dir.path(), "plot_", ".svg"), 10);
    assert_eq!(count(dir.path(), "curve_", ".csv"), 20);
    assert!(dir.path().join("summary.csv").exists());

    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(
        summary.lines().next(),
        Some("condition,operator,slope,intercept,r2,excluded_n")
    );
    assert_eq!(summary.lines().count(), 21);
    assert!(
        summary.contains("abs-sin-5/2,G,")
            && summary
                .lines()
                .any(|l| l.starts_with("abs-sin-5/2,G,") && l.ends_with(",1;2"))
    );
    let errors = fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    assert_eq!(errors.trim(), "condition,operator,error");

    let slope = summary_slope(dir.path(), "sin", "S");
    assert!((slope + 2.092).abs() <= 0.1, "{slope}");

    // the run's own summary feeds the meta-regression
    let meta = lab(&["meta", dir.path().join("summary.csv").to_str().unwrap()]);
    assert_eq!(meta.status.code(), Some(0));
    let text = stdout(&meta);
    let slope: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("slope"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((slope + 0.684).abs() <= 0.05, "{text}");
    assert!(text.contains("reference y = -0.684x - 0.4467"));
}

#[test]
fn small_run_has_one_row_per_n() {
    let dir = tempdir().unwrap();
    let out = lab(&[
        "run",
        "--conditions",
        "sin",
        "--n-max",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for op in ["G", "S"] {
        let csv = fs::read_to_string(dir.path().join(format!("curve_sin_{op}.csv"))).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "condition,operator,t,n,error");
        assert_eq!(lines.len(), 5);
        let error: &str = lines[1].rsplit(',').next().unwrap();
        let mantissa = error.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{error}");
    }
    assert_eq!(count(dir.path(), "plot_", ".svg"), 1);
}

#[test]
fn runs_are_byte_identical() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    for d in [&a, &b] {
        let out = lab(&[
            "run",
            "--conditions",
            "sin,abs-sin-1/2,exp-abs",
            "--n-max",
            "6",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 6 + 3 + 2);
    for name in names {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("lab.conf");
    let out_dir = dir.path().join("from-file");
    fs::write(
        &config,
        format!(
            "conditions = sin, exp-abs\noperators = G\nn_max = 8\noutput_dir = {}\nexclude.sin.G = 1, 2\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = lab(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--n-max",
        "5",
        "--exclude",
        "exp-abs:G:1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let curve = fs::read_to_string(out_dir.join("curve_sin_G.csv")).unwrap();
    assert_eq!(curve.lines().count(), 6);
    assert!(!out_dir.join("curve_sin_S.csv").exists());
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary
        .lines()
        .any(|l| l.starts_with("sin,G,") && l.ends_with(",1;2")));
    assert!(summary
        .lines()
        .any(|l| l.starts_with("exp-abs,G,") && l.ends_with(",1")));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        lab(&["run", "--operators", "Q", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lab(&["run", "--conditions", "cos", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lab(&["run", "--n-max", "2", "--out", out]).status.code(),
        Some(2)
    );
    assert_eq!(
        lab(&["run", "--exclude", "sin:G", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lab(&["run", "--config", "/nonexistent/lab.conf"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lab(&["check-tangency", "X", "1"]).status.code(), Some(2));
    assert_eq!(lab(&["check-tangency", "G", "0"]).status.code(), Some(2));
    assert_eq!(lab(&["bogus"]).status.code(), Some(2));
}

#[test]
fn tangency_verdicts() {
    let g1 = lab(&["check-tangency", "G", "1"]);
    assert_eq!(g1.status.code(), Some(0));
    assert!(stdout(&g1).contains("verdict: PASS"));
    let s2 = lab(&["check-tangency", "s", "2", "--t-values", "1e-2,1e-3,1e-4"]);
    assert_eq!(s2.status.code(), Some(0));
    assert_eq!(
        stdout(&s2)
            .lines()
            .filter(|l| l.trim_start().starts_with("1.000e"))
            .count(),
        3
    );
    let g2 = lab(&["check-tangency", "G", "2"]);
    assert_eq!(g2.status.code(), Some(1));
    let text = stdout(&g2);
    assert!(text.contains("verdict: FAIL"));
    let limit: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("limiting residual "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((limit - 1.0 / 6.0).abs() <= 0.01);
}

#[test]
fn meta_on_tabulated_slopes() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("table.csv");
    fs::write(
        &path,
        "condition,operator,slope\n\
         abs-sin-1/4,S,-0.6653\nabs-sin-1/2,S,-0.7723\nabs-sin-3/4,S,-0.9262\n\
         abs-sin-1,S,-1.0948\nabs-sin-3/2,S,-1.5109\nabs-sin-1/4,G,-0.6138\nsin,S,-2.092\n",
    )
    .unwrap();
    let out = lab(&["meta", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("points    5"), "{text}");
    assert!(text.contains("slope     -0.6840"), "{text}");
    assert!(text.contains("intercept -0.4467"), "{text}");
}

#[test]
fn meta_input_errors() {
    let dir = tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    fs::write(&missing, "condition,slope\nabs-sin-1,-1.0\n").unwrap();
    let out = lab(&["meta", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing column 'operator'"));

    let short = dir.path().join("short.csv");
    fs::write(
        &short,
        "condition,operator,slope\nabs-sin-1,S,-1.09\nabs-sin-1/2,S,-0.77\n",
    )
    .unwrap();
    let out = lab(&["meta", short.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("insufficient"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let garbage = dir.path().join("garbage.csv");
    fs::write(&garbage, "condition,operator,slope\nabs-sin-1,S,steep\n").unwrap();
    assert_eq!(
        lab(&["meta", garbage.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(lab(&["meta", "/nonexistent.csv"]).status.code(), Some(2));
}
