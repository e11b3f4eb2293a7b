use std::fs;
use std::path::Path;
use std::process::Command;

fn qdnls(sub: &str, config: &str, out: &Path) -> (i32, String) {
    let cfg = out.with_extension("cfg");
    fs::write(&cfg, config).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qdnls"))
        .args([sub, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

#[test]
fn resonance_scan_reports_witness() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("scan");
    let (code, err) = qdnls("resonance-scan", "d = 2\nK = 2\nalpha = 1\nbeta = 1\ngamma = -1\n", &out);
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(out.join("resonance-scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config_sha256="));
    assert!(lines[1].starts_with("sigma1,sigma2,sigma3,K,d,min_ratio_num,min_ratio_den,witness"));
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("1,1,-1,2,2,0,1,\"((1,0),(0,1),(-1,-1))\""), "{}", lines[2]);
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("status = ok"));
    assert!(manifest.contains("gamma = -1"));
}

#[test]
fn zero_data_simulation_conserves_trivially() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sim");
    let cfg = "d = 1\nK = 8\namplitude = 0\nT = 0.05\ndt = 0.01\n";
    let (code, err) = qdnls("simulate", cfg, &out);
    assert_eq!(code, 0, "{err}");
    let table = qdnls::ResultTable::from_csv(&fs::read_to_string(out.join("conservation.csv")).unwrap()).unwrap();
    assert_eq!(table.len(), 6);
    for col in ["mass", "energy", "mass_drift", "energy_drift"] {
        assert!(table.numeric_column(col).unwrap().iter().all(|&x| x == 0.0), "{col}");
    }
    assert!(out.join("final_u.qdsnap").exists());
}

#[test]
fn picard_with_large_data_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("picard");
    let cfg = "d = 1\nK = 8\namplitude = 50\nT = 1\nmax_iter = 8\nsteps = 32\n";
    let (code, _) = qdnls("picard", cfg, &out);
    assert_eq!(code, 3);
    let csv = fs::read_to_string(out.join("picard.csv")).unwrap();
    assert!(csv.lines().count() > 2);
    assert!(fs::read_to_string(out.join("manifest.txt")).unwrap().contains("status = error"));
}

#[test]
fn small_picard_converges() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("picard");
    let cfg = "d = 1\nK = 8\namplitude = 1e-3\nT = 0.5\nsteps = 64\n";
    let (code, err) = qdnls("picard", cfg, &out);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "d = 2\nK = 4\nN = 2, 4\np = 4\ntrials = 3\nseed = 11\n";
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(qdnls("strichartz", cfg, &a).0, 0);
    assert_eq!(qdnls("strichartz", cfg, &b).0, 0);
    for f in ["strichartz.csv", "strichartz.series"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bad");
    assert_eq!(qdnls("simulate", "d = 1\nbogus = 3\n", &out).0, 2);
    assert_eq!(qdnls("simulate", "d = 9\n", &out).0, 2);
    assert_eq!(qdnls("picard", "dt = -1\n", &out).0, 2);
    assert_eq!(qdnls("trilinear", "d = 2\nalpha = 1\nbeta = 1\ngamma = 1\nN1 = 4\nN2 = 4\nN3 = 2\n", &out).0, 2);
}

#[test]
fn vnorm_selftest_agrees() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let (code, err) = qdnls("vnorm-selftest", "d = 1\nK = 4\npaths = 200\nmax_len = 9\n", &out);
    assert_eq!(code, 0, "{err}");
    let table = qdnls::ResultTable::from_csv(&fs::read_to_string(out.join("vnorm-selftest.csv")).unwrap()).unwrap();
    let diff = table.numeric_column("difference").unwrap();
    let refs = table.numeric_column("reference").unwrap();
    for (d, r) in diff.iter().zip(&refs) {
        assert!(*d <= 1e-12 * r.max(1.0), "{d} vs {r}");
    }
}

#[test]
fn plot_subcommand_writes_series() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    assert_eq!(qdnls("resonance-scan", "d = 1\nK = 2, 4\n", &out).0, 0);
    let series = tmp.path().join("k.series");
    let status = Command::new(env!("CARGO_BIN_EXE_qdnls"))
        .args(["plot", "--x", "K", "--y", "triples_scanned", "--transform", "linear", "--table"])
        .arg(out.join("resonance-scan.csv"))
        .arg("--out")
        .arg(&series)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(fs::read_to_string(series).unwrap().lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn oversized_scan_hits_cost_guard() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    assert_eq!(qdnls("resonance-scan", "d = 3\nK = 64\n", &out).0, 5);
}
