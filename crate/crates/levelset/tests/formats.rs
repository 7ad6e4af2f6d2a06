use std::path::Path;

use levelset::core::nn::Activation;
use levelset::core::nonsingular::random_network;
use levelset::core::training::{gen_ring_dataset, RingParams};
use levelset::data::{dataset_from_csv, dataset_to_csv, read_dataset, sidecar_path, write_dataset};
use levelset::model::{model_from_json, model_to_json, read_model, write_model};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn model_json_round_trips_exactly(
        n in 1usize..4,
        hidden in prop::collection::vec(1usize..5, 0..4),
        scale in 1e-300..1e300f64,
        fin in any::<bool>(),
        sharp in 1u32..100,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let act = Activation::one_to_one_relu(sharp).unwrap();
        let net = random_network(n, &hidden, act, fin, scale, &mut rng).unwrap();
        let back = model_from_json(&model_to_json(&net), Path::new("m.json")).unwrap();
        prop_assert_eq!(back.fingerprint(), net.fingerprint());
        prop_assert_eq!(back, net);
    }
}

#[test]
fn model_file_layout() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let net = random_network(2, &[3], Activation::Sigmoid, true, 1.0, &mut rng).unwrap();
    let v: serde_json::Value = serde_json::from_str(&model_to_json(&net)).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["input_dim"], 2);
    assert_eq!(v["activation"]["kind"], "sigmoid");
    assert_eq!(v["final_activation"], true);
    let w = v["layers"][0]["weights"].as_array().unwrap();
    assert_eq!((w.len(), w[0].as_array().unwrap().len()), (3, 2));
    assert_eq!(v["layers"][1]["bias"].as_array().unwrap().len(), 1);
}

#[test]
fn model_files_reject_bad_input() {
    let p = Path::new("m.json");
    assert!(model_from_json("{", p).is_err());
    let bad_version = r#"{"format_version":9,"input_dim":1,"layers":[{"weights":[[1.0]],"bias":[0.0]}],"activation":{"kind":"tanh"},"final_activation":false}"#;
    assert!(model_from_json(bad_version, p).is_err());
    let broken = r#"{"format_version":1,"input_dim":2,"layers":[{"weights":[[1.0]],"bias":[0.0]}],"activation":{"kind":"tanh"},"final_activation":false}"#;
    let e = model_from_json(broken, p).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn dataset_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.csv");
    let data = gen_ring_dataset(11, &RingParams::default()).unwrap();
    write_dataset(&path, &data).unwrap();
    assert!(sidecar_path(&path).ends_with("ring.meta.json"));
    let back = read_dataset(&path).unwrap();
    assert_eq!(back, data);

    std::fs::remove_file(sidecar_path(&path)).unwrap();
    let bare = read_dataset(&path).unwrap();
    assert_eq!(bare.points(), data.points());
    assert_eq!(bare.meta().generator, "file");
}

#[test]
fn dataset_csv_errors() {
    let data = gen_ring_dataset(0, &RingParams::default()).unwrap();
    let meta = data.meta().clone();
    let p = Path::new("d.csv");
    assert!(dataset_from_csv("x1,x2,label\n1,2,0\n", meta.clone(), p).is_ok());
    assert!(dataset_from_csv("x1,x2,y\n1,2,0\n", meta.clone(), p).is_err());
    assert!(dataset_from_csv("x1,x2,label\n1,z,0\n", meta.clone(), p).is_err());
    assert!(dataset_from_csv("x1,x2,label\n1,2,7\n", meta.clone(), p).is_err());
    assert!(dataset_from_csv("x1,x2,label\n", meta, p).is_err());
    assert!(dataset_to_csv(&data).starts_with("x1,x2,label\n"));
}

#[test]
fn model_files_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = random_network(2, &[2, 2], Activation::Tanh, false, 3.0, &mut rng).unwrap();
    write_model(&path, &net).unwrap();
    assert_eq!(read_model(&path).unwrap(), net);
    assert_eq!(read_model(&dir.path().join("missing.json")).unwrap_err().exit_code(), 3);
}

#[test]
fn shipped_configs_match_presets() {
    use levelset::config::{load_experiment, load_sweep};
    use levelset::core::analysis::{ExperimentSpec, NonsingularSweep};
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    assert_eq!(load_experiment(&dir.join("fig3a.toml"), "wide").unwrap(), ExperimentSpec::skinny());
    assert_eq!(load_experiment(&dir.join("fig3b.toml"), "skinny").unwrap(), ExperimentSpec::wide());
    assert_eq!(load_sweep(&dir.join("nonsingular.toml")).unwrap(), NonsingularSweep::default());
}
