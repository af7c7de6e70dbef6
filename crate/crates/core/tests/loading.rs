use std::fs;

use quantumsea::tasks::{resolve_noise, train_quiet, Task, TaskSpec};
use quantumsea::{EncoderKind, Error, Hamiltonian, NoiseModel, TrainConfig};
use tempfile::TempDir;

fn image_rows(n: usize) -> String {
    (0..n)
        .map(|i| {
            let label = i % 2;
            let px: Vec<String> = (0..16)
                .map(|j| if (j % 4 < 2) == (label == 0) { "0.8" } else { "0.2" }.to_string())
                .collect();
            format!("{label},{}\n", px.join(","))
        })
        .collect()
}

#[test]
fn task_paths_resolve_against_base_dir() {
    let dir = TempDir::new().unwrap();
    fs::create_dir(dir.path().join("data")).unwrap();
    fs::write(dir.path().join("data/train.csv"), image_rows(20)).unwrap();
    fs::write(dir.path().join("data/test.csv"), image_rows(6)).unwrap();
    let spec = TaskSpec::Qml {
        dataset: "data/train.csv".into(),
        n_per_class: 0,
        encoder: EncoderKind::Image16,
        test_dataset: Some("data/test.csv".into()),
    };
    match Task::load(&spec, dir.path(), 0).unwrap() {
        Task::Qml { train, valid, test } => {
            assert_eq!(train.len() + valid.len(), 20);
            assert_eq!(test.unwrap().len(), 6);
            assert_eq!(train.n_classes, 2);
        }
        Task::Vqe { .. } => panic!("expected a classification task"),
    }
}

#[test]
fn hamiltonian_file_round_trips_and_trains() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("h.txt"), Hamiltonian::h2().to_string()).unwrap();
    let loaded = Hamiltonian::load(&dir.path().join("h.txt")).unwrap();
    assert_eq!(loaded, Hamiltonian::h2());

    let config = TrainConfig::from_toml(
        "template = \"rxyz\"\nn_blocks = 2\ntotal_iterations = 30\nmethod = \"dense\"\n[task]\nkind = \"vqe\"\nhamiltonian = \"h.txt\"\n",
    )
    .unwrap();
    let task = Task::load(&config.task, dir.path(), 0).unwrap();
    let run = train_quiet(&config, &task, None).unwrap();
    assert!(run.final_loss() < run.initial_loss());
}

#[test]
fn noise_file_and_preset_resolve() {
    let dir = TempDir::new().unwrap();
    let mut model = NoiseModel::santiago_like();
    model.n_trajectories = 7;
    fs::write(dir.path().join("custom.toml"), model.to_toml()).unwrap();
    assert_eq!(resolve_noise("custom.toml", dir.path()).unwrap(), model);
    assert_eq!(resolve_noise("santiago_like", dir.path()).unwrap(), NoiseModel::santiago_like());
    assert!(matches!(resolve_noise("nowhere.toml", dir.path()), Err(Error::Config(_))));
}

#[test]
fn missing_and_malformed_files_report_their_path() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.toml");
    let err = TrainConfig::load(&missing).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("absent.toml"));

    fs::write(dir.path().join("bad.csv"), "0.1,0.2,1\n").unwrap();
    let spec = TaskSpec::Qml {
        dataset: "bad.csv".into(),
        n_per_class: 0,
        encoder: EncoderKind::Image16,
        test_dataset: None,
    };
    assert!(matches!(Task::load(&spec, dir.path(), 0), Err(Error::Shape(_))));
}
