use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

const BIN: &str = env!("CARGO_BIN_EXE_prime-ifs");

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("PRIME_IFS_THREADS", n),
        None => cmd.env_remove("PRIME_IFS_THREADS"),
    };
    cmd.output().expect("spawn prime-ifs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn modulus_guard_message() {
    let out = run(
        &["drive", "--mod", "7", "--start", "7", "--count", "100", "--out", "/tmp/unused"],
        None,
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("Please choose modulus 5, 8, 10, or 12"),
        "stderr: {stderr}"
    );
}

#[test]
fn tuple_offset_zero_rejected() {
    let out = run(
        &[
            "tuple", "--mod", "8", "--ordering", "0 2 4 6", "--offset", "0", "--start", "1",
            "--count", "100", "--out", "/tmp/unused",
        ],
        None,
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("offset"));
}

#[test]
fn tuple_even_offset_accepted() {
    let dir = tempdir().unwrap();
    let out = run(
        &[
            "tuple", "--mod", "8", "--ordering", "1 3 5 7", "--offset", "2", "--start", "1",
            "--count", "2000", "--depth", "2", "--out", dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_ok(&out);
    assert!(dir.path().join("tuple_census.json").exists());
}

#[test]
fn gasket_zero_points_gives_blank_image_and_manifest() {
    let dir = tempdir().unwrap();
    let out = run(
        &["gasket", "--points", "0", "--size", "32", "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert_ok(&out);
    let pgm = fs::read(dir.path().join("render.pgm")).unwrap();
    let header = b"P5\n32 32\n255\n";
    assert_eq!(&pgm[..header.len()], header);
    assert!(pgm[header.len()..].iter().all(|&b| b == 0xFF));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["subcommand"], "gasket");
    assert_eq!(manifest["artifacts"], serde_json::json!(["render.pgm"]));
    assert_eq!(manifest["prng"], "splitmix64");
}

#[test]
fn drive_defaults_to_three_orderings_and_skip_third_drops_one() {
    let dir = tempdir().unwrap();
    let out = run(
        &[
            "drive", "--mod", "10", "--start", "7", "--count", "500", "--size", "16", "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_ok(&out);
    let census_files = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref().unwrap().file_name().to_string_lossy().starts_with("census_")
        })
        .count();
    assert_eq!(census_files, 3);

    let dir2 = tempdir().unwrap();
    let out = run(
        &[
            "drive", "--mod", "10", "--start", "7", "--count", "500", "--size", "16",
            "--skip-third", "--out", dir2.path().to_str().unwrap(),
        ],
        None,
    );
    assert_ok(&out);
    let census_files = fs::read_dir(dir2.path())
        .unwrap()
        .filter(|e| {
            e.as_ref().unwrap().file_name().to_string_lossy().starts_with("census_")
        })
        .count();
    assert_eq!(census_files, 2);
}

#[test]
fn rotdist_depth1_census_total_is_n_minus_1() {
    let dir = tempdir().unwrap();
    let out = run(
        &[
            "rotdist", "--mod", "10", "--ordering", "1 3 7 9", "--start", "7", "--count",
            "1000", "--depth", "1", "--size", "16", "--out", dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_ok(&out);
    let census: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("census.json")).unwrap())
            .unwrap();
    // One derivation step: N symbols give N-1 distances, and the depth-1
    // census counts each of them.
    assert_eq!(census["total"], 999);
}

#[test]
fn sigma_scan_both_emits_each_interpretation() {
    let dir = tempdir().unwrap();
    let out = run(
        &[
            "sigma-scan", "--mod", "10", "--x0-list", "7,1000", "--size", "500",
            "--interpretation", "both", "--out", dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_ok(&out);
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sigma_scan.json")).unwrap())
            .unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let kinds: Vec<&str> = rows
        .iter()
        .map(|r| r["interpretation"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"window_width") && kinds.contains(&"prime_count"));
}

#[test]
fn replay_reproduces_byte_identical_outputs_across_thread_counts() {
    let dir = tempdir().unwrap();
    let path = dir.path().to_str().unwrap().to_string();

    for args in [
        vec![
            "drive".to_string(), "--mod".into(), "10".into(), "--ordering".into(),
            "1 3 7 9".into(), "--start".into(), "7".into(), "--count".into(), "20000".into(),
            "--depth".into(), "3".into(), "--size".into(), "64".into(), "--points-csv".into(),
            "--out".into(), format!("{path}/drive"),
        ],
        vec![
            "gasket".to_string(), "--system".into(), "square".into(), "--points".into(),
            "50000".into(), "--seed".into(), "99".into(), "--size".into(), "64".into(),
            "--points-csv".into(), "--out".into(), format!("{path}/gasket"),
        ],
        vec![
            "twins".to_string(), "--mod".into(), "10".into(), "--ordering".into(),
            "1 3 7 9".into(), "--start".into(), "5".into(), "--count".into(), "20000".into(),
            "--size".into(), "64".into(), "--out".into(), format!("{path}/twins"),
        ],
    ] {
        let argv: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let out_dir = Path::new(argv.last().unwrap()).to_path_buf();
        assert_ok(&run(&argv, Some("2")));
        let original = snapshot(&out_dir);
        assert!(original.contains_key("manifest.json"));

        let manifest_path = out_dir.join("manifest.json");
        for threads in ["1", "2", "8"] {
            for f in original.keys() {
                fs::remove_file(out_dir.join(f)).unwrap();
            }
            fs::write(
                &manifest_path,
                serde_json::to_string(&serde_json::from_slice::<serde_json::Value>(
                    &original["manifest.json"],
                ).unwrap()).unwrap(),
            )
            .unwrap();
            assert_ok(&run(
                &["replay", "--manifest", manifest_path.to_str().unwrap()],
                Some(threads),
            ));
            let replayed = snapshot(&out_dir);
            assert_eq!(
                original.keys().collect::<Vec<_>>(),
                replayed.keys().collect::<Vec<_>>()
            );
            for (name, bytes) in &original {
                assert_eq!(
                    bytes,
                    &replayed[name],
                    "{name} differs at {threads} threads ({:?})",
                    argv[0]
                );
            }
        }
    }
    println!("ACCEPTANCE manifest_determinism: PASS");
}
