//! Determinism and checkpoint/resume behaviour of the full pipeline,
//! exercised on the fast level-7 configuration.

use cartanpts::pipeline::{run_pipeline, RunConfig, CHECKPOINT_MAGIC};
use std::path::PathBuf;

fn tmpdir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("cartanpts-it-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn candidates_json(report: &cartanpts::pipeline::RunReport) -> String {
    serde_json::to_string(&report.candidates).unwrap()
}

#[test]
fn rerun_reproduces_identical_candidates() {
    let config = RunConfig::for_prime(7);
    let a = run_pipeline(&config).unwrap();
    let b = run_pipeline(&config).unwrap();
    assert_eq!(candidates_json(&a), candidates_json(&b));
    assert_eq!(
        serde_json::to_string(&a.integral_points).unwrap(),
        serde_json::to_string(&b.integral_points).unwrap()
    );
}

#[test]
fn interrupted_run_resumes_to_the_same_report() {
    let dir = tmpdir();
    let ckpt = dir.join("resume.ckpt");
    let ckpt_s = ckpt.to_str().unwrap().to_string();
    std::fs::remove_file(&ckpt).ok();

    let config = RunConfig {
        checkpoint_path: Some(ckpt_s.clone()),
        ..RunConfig::for_prime(7)
    };
    let full = run_pipeline(&config).unwrap();
    assert!(ckpt.exists(), "checkpoint written during the run");

    // simulate a mid-phase kill: drop half of the completed units (and
    // any survivors recorded by the dropped units), then resume
    let text = std::fs::read_to_string(&ckpt).unwrap();
    let mut lines = text.splitn(2, '\n');
    assert_eq!(lines.next().unwrap().trim(), CHECKPOINT_MAGIC);
    let mut body: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    let completed = body["completed"].as_array().unwrap().clone();
    let keep = completed.len() / 2;
    let kept: Vec<serde_json::Value> = completed.into_iter().take(keep).collect();
    let kept_keys: Vec<(u64, u64, i64, i64)> = kept
        .iter()
        .map(|v| {
            let parts: Vec<&str> = v.as_str().unwrap().split(':').collect();
            (
                parts[0].parse().unwrap(),
                parts[1].parse().unwrap(),
                parts[2].parse().unwrap(),
                parts[3].parse().unwrap(),
            )
        })
        .collect();
    let survivors = body["survivors"].as_array().unwrap().clone();
    let kept_survivors: Vec<serde_json::Value> = survivors
        .into_iter()
        .filter(|s| {
            let cusp = s["cusp"].as_u64().unwrap();
            let piece = s["piece"].as_u64().unwrap();
            let b1 = s["b1"].as_i64().unwrap();
            kept_keys
                .iter()
                .any(|&(c, pc, lo, hi)| c == cusp && pc == piece && lo <= b1 && b1 <= hi)
        })
        .collect();
    body["completed"] = serde_json::Value::Array(kept);
    body["survivors"] = serde_json::Value::Array(kept_survivors);
    std::fs::write(&ckpt, format!("{CHECKPOINT_MAGIC}\n{}", body)).unwrap();

    let resumed = run_pipeline(&config).unwrap();
    assert_eq!(candidates_json(&full), candidates_json(&resumed));
    std::fs::remove_file(&ckpt).ok();
}

#[test]
fn incompatible_checkpoint_is_refused() {
    let dir = tmpdir();
    let ckpt = dir.join("badfp.ckpt");
    let ckpt_s = ckpt.to_str().unwrap().to_string();

    // a checkpoint from a different configuration
    let other = RunConfig {
        checkpoint_path: Some(ckpt_s.clone()),
        precision_bits: 320,
        ..RunConfig::for_prime(7)
    };
    run_pipeline(&other).unwrap();

    let config = RunConfig {
        checkpoint_path: Some(ckpt_s),
        ..RunConfig::for_prime(7)
    };
    let err = run_pipeline(&config).unwrap_err();
    assert!(err.to_string().contains("incompatible"), "got: {err}");
    std::fs::remove_file(&ckpt).ok();
}
