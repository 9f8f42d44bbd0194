use std::path::{Path, PathBuf};

use macpolar::io::{self, ChannelFile, Metadata};
use macpolar::{catalog, GroupSpec, UserSet};

fn channel(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("channels").join(name)
}

#[test]
fn golden_files_match_the_catalog() {
    let bac = io::load(channel("bac.json")).unwrap();
    assert_eq!(bac.table(), catalog::binary_adder().table());
    assert_eq!(bac.label(2), "z=2");
    let and = io::load(channel("and.json")).unwrap();
    assert_eq!(and.table(), catalog::and_channel().table());
    let z = |n| GroupSpec::cyclic(n).unwrap();
    let id = io::load(channel("identity_z2z3.json")).unwrap();
    assert_eq!(id.table(), catalog::identity(vec![z(2), z(3)]).unwrap().table());
    let noise = io::load(channel("noise.json")).unwrap();
    assert_eq!(noise.table(), catalog::pure_noise(vec![z(2), z(3)], 3).unwrap().table());
}

#[test]
fn golden_rates() {
    let id = io::load(channel("identity_z2z3.json")).unwrap();
    let rates: Vec<f64> =
        UserSet::all_nonempty(2).map(|s| id.mutual_info(s).unwrap()).collect();
    let expected = [1.0, 3f64.log2(), 6f64.log2()];
    for (r, e) in rates.iter().zip(expected) {
        assert!((r - e).abs() < 1e-12, "{rates:?}");
    }
    let noise = io::load(channel("noise.json")).unwrap();
    assert!(noise.sum_capacity().abs() < 1e-12);
}

#[test]
fn metadata_survives_a_round_trip() {
    let file = io::load_file(channel("bac.json")).unwrap();
    assert_eq!(file.metadata.name.as_deref(), Some("binary adder channel"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("copy.json");
    let mac = file.to_mac().unwrap();
    let meta = Metadata { seed: Some(7), ..file.metadata.clone() };
    io::save(&mac, meta.clone(), &path).unwrap();
    let back = io::load_file(&path).unwrap();
    assert_eq!(back.metadata, meta);
    assert_eq!(back.output_labels, file.output_labels);
    assert_eq!(back.to_mac().unwrap().table(), mac.table());
}

#[test]
fn unknown_fields_are_rejected() {
    let text = r#"{"groups": [[2]], "output_size": 1, "probabilities": [[1], [1]], "extra": 0}"#;
    let err = ChannelFile::from_json(text).unwrap_err();
    assert!(err.to_string().contains("extra"), "{err}");
}

#[test]
fn load_errors_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ \"groups\": ").unwrap();
    let err = io::load(&path).unwrap_err().to_string();
    assert!(err.contains("broken.json") && err.contains("line 1"), "{err}");
}
