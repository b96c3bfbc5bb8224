use std::fs;

use asteroid_gnc::harness::{run_train, Checkpoint, RunConfig, LATEST_CHECKPOINT, TRAINING_LOG};

const SMALL: &str = r#"
seed = 5
[ppo]
episodes_per_batch = 4
[train]
updates = 4
checkpoint_every = 2
plots = false
"#;

fn small(updates: u64) -> RunConfig {
    let mut cfg = RunConfig::from_toml_str(SMALL).unwrap();
    cfg.train.updates = updates;
    cfg
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let straight = tempfile::tempdir().unwrap();
    run_train(&small(4), None, straight.path(), |_| {}).unwrap();

    let split = tempfile::tempdir().unwrap();
    run_train(&small(2), None, split.path(), |_| {}).unwrap();
    let ck = split.path().join(LATEST_CHECKPOINT);
    let summary = run_train(&small(4), Some(&ck), split.path(), |_| {}).unwrap();
    assert_eq!(summary.updates_run, 2);
    assert_eq!(summary.total_updates, 4);

    for f in [TRAINING_LOG, LATEST_CHECKPOINT, "checkpoints/checkpoint_00004.json"] {
        assert_eq!(
            fs::read(straight.path().join(f)).unwrap(),
            fs::read(split.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn resume_from_an_older_checkpoint_truncates_the_log() {
    let dir = tempfile::tempdir().unwrap();
    run_train(&small(4), None, dir.path(), |_| {}).unwrap();
    let reference = fs::read(dir.path().join(TRAINING_LOG)).unwrap();
    let ck2 = dir.path().join("checkpoints/checkpoint_00002.json");
    run_train(&small(4), Some(&ck2), dir.path(), |_| {}).unwrap();
    assert_eq!(fs::read(dir.path().join(TRAINING_LOG)).unwrap(), reference);
}

#[test]
fn resume_with_no_remaining_updates_keeps_weights() {
    let dir = tempfile::tempdir().unwrap();
    run_train(&small(2), None, dir.path(), |_| {}).unwrap();
    let path = dir.path().join(LATEST_CHECKPOINT);
    let before = Checkpoint::load(&path).unwrap();
    let summary = run_train(&small(2), Some(&path), dir.path(), |_| {}).unwrap();
    assert_eq!(summary.updates_run, 0);
    assert_eq!(Checkpoint::load(&path).unwrap(), before);
}

#[test]
fn same_seed_gives_identical_logs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_train(&small(3), None, a.path(), |_| {}).unwrap();
    run_train(&small(3), None, b.path(), |_| {}).unwrap();
    let log = fs::read(a.path().join(TRAINING_LOG)).unwrap();
    assert_eq!(log, fs::read(b.path().join(TRAINING_LOG)).unwrap());
    assert_eq!(String::from_utf8(log).unwrap().lines().count(), 4);

    let mut other = small(3);
    other.seed = 6;
    let c = tempfile::tempdir().unwrap();
    run_train(&other, None, c.path(), |_| {}).unwrap();
    assert_ne!(
        fs::read(a.path().join(TRAINING_LOG)).unwrap(),
        fs::read(c.path().join(TRAINING_LOG)).unwrap()
    );
}

#[test]
fn unreadable_checkpoint_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{}").unwrap();
    let err = run_train(&small(2), Some(&bad), dir.path(), |_| {}).unwrap_err();
    assert!(matches!(err, asteroid_gnc::Error::Checkpoint { .. }), "{err}");
}

/// Twenty updates with failures and biases switched off: the mean batch
/// reward of the last five updates must beat that of the first five.
#[test]
fn smoke_training_improves_reward() {
    let cfg = RunConfig::from_toml_str(
        r#"
seed = 3
[train]
updates = 20
checkpoint_every = 0
plots = false
[episode.actuator]
p_fail = 0.0
[episode.sensor]
range_bias = { min = 0.0, max = 0.0 }
angle_bias = { min = 0.0, max = 0.0 }
attitude_bias = { min = 0.0, max = 0.0 }
rate_bias = { min = 0.0, max = 0.0 }
"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = run_train(&cfg, None, dir.path(), |_| {}).unwrap();
    let rewards: Vec<f64> = summary.history.iter().map(|s| s.mean_reward).collect();
    let first = rewards[..5].iter().sum::<f64>() / 5.0;
    let last = rewards[15..].iter().sum::<f64>() / 5.0;
    println!("first-5 mean {first:.3}, last-5 mean {last:.3}");
    assert!(last > first, "{rewards:?}");
}
