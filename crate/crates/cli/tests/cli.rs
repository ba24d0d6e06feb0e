use std::path::Path;
use std::process::{Command, Output};

fn wmfc(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_wmfc"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs");
    out
}

fn ok(args: &[&str]) -> String {
    let out = wmfc(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn synth(dir: &Path) {
    ok(&[
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--seed",
        "4",
        "--subjects-per-group",
        "2",
        "--channels",
        "6",
        "--trials",
        "4,2,2,4",
    ]);
}

#[test]
fn synth_ingest_pipeline_render_anova() {
    let tmp = tempfile::tempdir().unwrap();
    let cohort = tmp.path().join("cohort");
    synth(&cohort);
    assert!(cohort.join("sub-06.edf").is_file());

    let summary = ok(&[
        "ingest",
        cohort.join("sub-01.edf").to_str().unwrap(),
        "--markers",
        cohort.join("sub-01.markers.csv").to_str().unwrap(),
        "--out",
        tmp.path().join("sub-01.csv").to_str().unwrap(),
    ]);
    assert!(summary.contains("channels,6\n"), "{summary}");
    assert!(summary.contains("epochs_retrieval,4\n"), "{summary}");
    let again = ok(&["ingest", tmp.path().join("sub-01.csv").to_str().unwrap(), "--fs", "1000"]);
    assert!(again.contains("channels,6\n"));

    let out = tmp.path().join("run");
    let manifest = cohort.join("manifest.csv");
    let sweep = ok(&[
        "pipeline",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--stages",
        "retrieval,encoding",
        "--threshold",
        "0.5",
        "--metrics",
        "D,Cc",
        "--folds",
        "3",
        "--trees",
        "10",
    ]);
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "stage,threshold,metric,mean_accuracy,std_accuracy,rows,status");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("retrieval,0.5,D,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",ok")), "{sweep}");
    assert_eq!(std::fs::read_to_string(out.join("sweep.csv")).unwrap(), sweep);

    let rendered = ok(&[
        "render",
        out.join("noms/AD_retrieval.csv").to_str().unwrap(),
        "--out",
        tmp.path().join("heat").to_str().unwrap(),
    ]);
    assert_eq!(rendered.lines().count(), 2);
    let pgm = std::fs::read(tmp.path().join("heat.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n6 6\n255\n"));
    assert_eq!(pgm.len(), 11 + 36);

    let report = ok(&[
        "anova",
        out.join("features/retrieval_t0.5_D.csv").to_str().unwrap(),
        out.join("features/encoding_t0.5_D.csv").to_str().unwrap(),
    ]);
    assert!(report.starts_with("effect,df,ss,f,p\ngroup,2,"), "{report}");
    let single = ok(&[
        "anova",
        out.join("features/retrieval_t0.5_Cc.csv").to_str().unwrap(),
        out.join("features/encoding_t0.5_Cc.csv").to_str().unwrap(),
        "--feature",
        "f_001",
    ]);
    assert!(single.contains("interaction,2,"), "{single}");
}

#[test]
fn config_file_and_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cohort = tmp.path().join("cohort");
    synth(&cohort);
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "manifest = {:?}\noutput_dir = {:?}\nstages = [\"recall\"]\nthresholds = [0.3, 0.6]\nmetrics = [\"EC\"]\nfolds = 2\nwrite_group_noms = false\n[forest]\nn_trees = 5\n",
            cohort.join("manifest.csv"),
            tmp.path().join("out")
        ),
    )
    .unwrap();
    let sweep = ok(&["pipeline", "--config", cfg.to_str().unwrap(), "--threshold", "0.4"]);
    assert_eq!(sweep.lines().count(), 2);
    assert!(sweep.lines().nth(1).unwrap().starts_with("recall,0.4,EC,"));
    assert!(!tmp.path().join("out/noms").exists());

    let collision = wmfc(&[
        "synth",
        "--out",
        cohort.to_str().unwrap(),
        "--subjects-per-group",
        "2",
        "--channels",
        "6",
    ]);
    assert!(!collision.status.success());
    assert!(String::from_utf8_lossy(&collision.stderr).contains("already exists"));

    let bad = wmfc(&["pipeline", "--config", cfg.to_str().unwrap(), "--grid", "hex:3"]);
    assert!(!bad.status.success());
    let missing = wmfc(&["render", tmp.path().join("nope.csv").to_str().unwrap(), "--out", "x"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.csv"));
}
