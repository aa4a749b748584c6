use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stressforge::dataset::{
    read_dataset, split_generalization, DatasetManifest, DatasetReader, DatasetWriter,
    GeneralizationMode, Record, MANIFEST_FILE, PREDICTION_CHANNELS, RECORDS_FILE,
};

fn stressforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stressforge"))
        .args(args)
        .env_remove("STRESSFORGE_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const PATCH_CASE: &str = r#"{
  "m": 8,
  "constraints": [
    { "rows": [0, 8], "cols": [0, 0], "fix_x": true },
    { "rows": [8, 8], "cols": [0, 0], "fix_y": true }
  ],
  "loads": [ { "rows": [0, 7], "cols": [7, 7], "face": "right", "q_x": 5.0, "q_y": 0.0 } ]
}"#;

fn write_case(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn read_single(path: &Path) -> Record {
    let mut reader = DatasetReader::open(path).unwrap();
    let r = reader.next().unwrap().unwrap();
    assert!(reader.next().is_none());
    r
}

#[test]
fn solve_patch_case_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_case(dir.path(), "patch.json", PATCH_CASE);
    let out_file = dir.path().join("patch.sgf");
    let img_a = dir.path().join("a");
    let out = stressforge(&[
        "solve", "--case", p(&case), "--out", p(&out_file), "--render", p(&img_a),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rec = read_single(&out_file);
    let vm = rec.channel(8, 3);
    assert!(vm.iter().all(|&v| (v - 5.0).abs() < 1e-5), "{vm:?}");

    // constant field: one colour, equal range ends
    let png = image::open(img_a.join("case0_von_mises.png")).unwrap().to_rgb8();
    let first = *png.get_pixel(0, 0);
    assert!(png.pixels().all(|px| *px == first));
    let range = fs::read_to_string(img_a.join("case0_von_mises.range.txt")).unwrap();
    assert!(range.contains("min 5") && range.contains("max 5"), "{range}");

    // rendering is byte-stable
    let img_b = dir.path().join("b");
    let out = stressforge(&["render", "--records", p(&out_file), "--case-id", "0", "--out", p(&img_b)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for ch in ["geom_bc", "load_x", "load_y", "von_mises"] {
        let f = format!("case0_{ch}.png");
        assert_eq!(fs::read(img_a.join(&f)).unwrap(), fs::read(img_b.join(&f)).unwrap());
    }

    // the record file is never overwritten
    let out = stressforge(&["solve", "--case", p(&case), "--out", p(&out_file)]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unloaded_and_unsupported_cases() {
    let dir = tempfile::tempdir().unwrap();
    let unloaded = write_case(
        dir.path(),
        "unloaded.json",
        r#"{"m": 8, "constraints": [{"rows": [0, 8], "cols": [0, 0], "fix_x": true, "fix_y": true}]}"#,
    );
    let out_file = dir.path().join("u.sgf");
    let out = stressforge(&["solve", "--case", p(&unloaded), "--out", p(&out_file)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(read_single(&out_file).channel(8, 3).iter().all(|&v| v == 0.0));

    let free = write_case(
        dir.path(),
        "free.json",
        r#"{"m": 8, "loads": [{"rows": [0, 7], "cols": [7, 7], "face": "right", "q_x": 1, "q_y": 0}]}"#,
    );
    let out = stressforge(&["solve", "--case", p(&free), "--out", p(&dir.path().join("f.sgf"))]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("constrain"), "{}", stderr(&out));

    let broken = write_case(dir.path(), "broken.json", "{\"m\": 8, \"oops\": 1}");
    let out = stressforge(&["solve", "--case", p(&broken), "--out", p(&dir.path().join("b.sgf"))]);
    assert_eq!(code(&out), 1);
}

#[test]
fn single_solid_element_renders_one_block() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = vec![".".repeat(8); 8];
    rows[3] = "....#...".into();
    let text = format!(
        r#"{{"m": 8, "solid_rows": {}, "constraints": [{{"rows": [3, 4], "cols": [4, 5], "fix_x": true, "fix_y": true}}]}}"#,
        serde_json::to_string(&rows).unwrap()
    );
    let case = write_case(dir.path(), "one.json", &text);
    let rec = dir.path().join("one.sgf");
    assert_eq!(code(&stressforge(&["solve", "--case", p(&case), "--out", p(&rec)])), 0);
    let img = dir.path().join("img");
    let out = stressforge(&[
        "render", "--records", p(&rec), "--case-id", "0", "--out", p(&img), "--channels", "geom-bc",
        "--scale", "3", "--colormap", "gray",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let png = image::open(img.join("case0_geom_bc.png")).unwrap().to_rgb8();
    assert_eq!(png.dimensions(), (24, 24));
    let lit: Vec<(u32, u32)> = png
        .enumerate_pixels()
        .filter(|(_, _, px)| px.0 != [0, 0, 0])
        .map(|(x, y, _)| (x, y))
        .collect();
    assert_eq!(lit.len(), 9);
    assert!(lit.iter().all(|&(x, y)| (12..15).contains(&x) && (9..12).contains(&y)));

    let out = stressforge(&["render", "--records", p(&rec), "--case-id", "4", "--out", p(&img)]);
    assert_eq!(code(&out), 1);
}

fn generate_small(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "generate", "--family", "fine", "--seed", "7", "--out", p(out), "--mesh-size", "8",
        "--geometries", "2", "--limit", "40",
    ];
    args.extend_from_slice(extra);
    stressforge(&args)
}

#[test]
fn generate_is_deterministic_and_refuses_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = generate_small(&a, &["--workers", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("cases: 40"), "{}", stdout(&out));
    let out = Command::new(env!("CARGO_BIN_EXE_stressforge"))
        .args([
            "generate", "--family", "fine", "--seed", "7", "--out", p(&b), "--mesh-size", "8",
            "--geometries", "2", "--limit", "40",
        ])
        .env("STRESSFORGE_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for f in [MANIFEST_FILE, RECORDS_FILE] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    assert_eq!(code(&generate_small(&a, &[])), 1);
    // generation needs a seed
    assert_eq!(code(&stressforge(&["generate", "--family", "fine", "--out", p(&b)])), 1);
}

#[test]
fn full_fine_manifest_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    let out = stressforge(&[
        "generate", "--family", "fine", "--seed", "7", "--out", p(&d), "--manifest-only",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let manifest = DatasetManifest::load(&d.join(MANIFEST_FILE)).unwrap();
    assert_eq!(manifest.total_cases, 38_400);

    let out = stressforge(&[
        "split", "--dataset", p(&d), "--name", "main", "--mode", "random", "--ratio", "0.8", "--seed", "3",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("train 30720  test 7680"), "{}", stdout(&out));
}

#[test]
fn split_modes_and_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("coarse");
    let out = stressforge(&[
        "generate", "--family", "coarse", "--seed", "7", "--out", p(&d), "--normalize", "unit",
        "--manifest-only",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("cases: 120960"));

    let split = |name: &str, mode: &str, seed: &str| {
        stressforge(&["split", "--dataset", p(&d), "--name", name, "--mode", mode, "--seed", seed])
    };
    let out = split("orient", "cross-orientation", "3");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("train 4320"), "{}", stdout(&out));
    assert_eq!(code(&split("orient", "cross-orientation", "3")), 0);

    // a seed drawing another test quadrant conflicts with the stored split
    let m = DatasetManifest::load(&d.join(MANIFEST_FILE)).unwrap();
    let stored = &m.splits["orient"];
    let other = (0..64)
        .find(|&s| split_generalization(&m, GeneralizationMode::CrossOrientation, s).unwrap().test != stored.test)
        .unwrap();
    let out = split("orient", "cross-orientation", &other.to_string());
    assert_eq!(code(&out), 4, "{}", stderr(&out));

    assert_eq!(code(&split("contour", "cross-contour", "0")), 0);
    assert_eq!(code(&split("opening", "cross-opening", "0")), 0);
    assert_eq!(code(&split("x", "sideways", "0")), 1);
}

#[test]
fn evaluate_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    assert_eq!(code(&generate_small(&d, &["--workers", "1"])), 0);
    let (manifest, reader) = read_dataset(&d).unwrap();
    let records: Vec<Record> = reader.map(|r| r.unwrap()).collect();
    let m = manifest.m;

    let write_preds = |name: &str, offset: f32, skip: usize| {
        let path = dir.path().join(name);
        let mut w = DatasetWriter::create(&path, m, PREDICTION_CHANNELS).unwrap();
        for r in records.iter().skip(skip) {
            let data = r.channel(m, 3).iter().map(|v| v + offset).collect();
            w.write(&Record { case_id: r.case_id, data }).unwrap();
        }
        w.finish().unwrap();
        path
    };

    let eval = |preds: &Path, out: &str, extra: &[&str]| {
        let out_dir = dir.path().join(out);
        let mut args = vec!["evaluate", "--dataset", p(&d), "--predictions", p(preds), "--out"];
        args.push(out_dir.to_str().unwrap());
        args.extend_from_slice(extra);
        (stressforge(&args), out_dir)
    };

    let exact = write_preds("exact.sgf", 0.0, 0);
    let (out, out_dir) = eval(&exact, "r0", &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("metrics.json")).unwrap()).unwrap();
    for key in ["mse", "mae", "pae", "pmae_percent", "ppae_percent"] {
        assert_eq!(report["aggregate"][key].as_f64(), Some(0.0), "{key}");
    }
    let csv = fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 42);

    let shifted = write_preds("shifted.sgf", 1.0, 0);
    let (out, out_dir) = eval(&shifted, "r1", &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("metrics.json")).unwrap()).unwrap();
    // v + 1 is rounded to f32 in the prediction file
    let mae = report["aggregate"]["mae"].as_f64().unwrap();
    assert!((mae - 1.0).abs() < 1e-6, "{mae}");

    let partial = write_preds("partial.sgf", 0.0, 3);
    let (out, _) = eval(&partial, "r2", &[]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("3 cases have no prediction: 0, 1, 2"), "{}", stderr(&out));

    // restricted to a split's test side, the missing cases may not matter
    let s = stressforge(&[
        "split", "--dataset", p(&d), "--name", "main", "--mode", "random", "--seed", "1",
    ]);
    assert_eq!(code(&s), 0);
    let (out, out_dir) = eval(&exact, "r3", &["--split", "main"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(report["cases"].as_array().unwrap().len(), 8);
}
