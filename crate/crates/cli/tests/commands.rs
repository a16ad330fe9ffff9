use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stopline::association_eval::{banded_evaluation, read_report_json};
use stopline::gmap::{self, RawGmap};
use stopline::sparse_lines::lines_from_json;
use stopline::target_maps::{direction_map, signed_distance_map};
use stopline::{GridGeometry, MetricPoint, SegMask, StopLine};

fn stopline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stopline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = stopline(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn read_lines(p: PathBuf) -> Vec<StopLine> {
    lines_from_json(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn gen_writes_scenes_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("d");
    ok(&["gen", "--scenes", "5", "--seed", "7", "--out", s(&out)]);
    for i in 0..5 {
        let dir = out.join(format!("scene_{i:06}"));
        for f in ["scene.gmap", "gt_lines.json", "gt_mask.gmap"] {
            assert!(dir.join(f).is_file(), "missing {f} in {}", dir.display());
        }
    }
    assert!(!out.join("scene_000005").exists());
    let m = manifest(&out);
    assert_eq!(m["subcommand"], "gen");
    assert_eq!(m["flags"]["seed"], 7);
    assert_eq!(m["details"]["scenes"].as_array().unwrap().len(), 5);
    assert_eq!(m["seeds"].as_array().unwrap().len(), 6);
}

#[test]
fn gen_rejects_zero_scenes_and_bad_output() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(!stopline(&["gen", "--scenes", "0", "--out", s(tmp.path())])
        .status
        .success());
    let file = tmp.path().join("file");
    fs::write(&file, "x").unwrap();
    let out = stopline(&["gen", "--scenes", "1", "--out", s(&file.join("sub"))]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
    assert!(!stopline(&["gen", "--scenes", "1"]).status.success());
}

#[test]
fn targets_and_zero_loss_on_identical_prediction() {
    let tmp = tempfile::tempdir().unwrap();
    let (gen, tg, pred) = (
        tmp.path().join("gen"),
        tmp.path().join("tg"),
        tmp.path().join("pred"),
    );
    ok(&["gen", "--scenes", "2", "--out", s(&gen)]);
    ok(&["targets", "--input", s(&gen), "--out", s(&tg)]);
    assert_eq!(manifest(&tg)["flags"]["d_thresh"], 12);

    for i in 0..2 {
        let name = format!("scene_{i:06}");
        let mask =
            SegMask::from_raw(&gmap::read_raw(gen.join(&name).join("gt_mask.gmap")).unwrap())
                .unwrap();
        let dist = gmap::read_raw(tg.join(&name).join("distance.gmap")).unwrap();
        let dir = gmap::read_raw(tg.join(&name).join("direction.gmap")).unwrap();
        let want_d = signed_distance_map(&mask, 12).unwrap().to_raw();
        let want_e = direction_map(&mask, 12).unwrap().to_raw();
        assert_eq!(dist, want_d);
        assert_eq!(dir, want_e);

        let mut channels = mask.to_raw().channels;
        channels.extend(dist.channels);
        channels.extend(dir.channels);
        let prediction = RawGmap {
            geometry: *mask.geometry(),
            channels,
        };
        fs::create_dir_all(pred.join(&name)).unwrap();
        gmap::write_raw(pred.join(&name).join("prediction.gmap"), &prediction).unwrap();
    }
    let stdout = ok(&[
        "targets",
        "--input",
        s(&gen),
        "--loss",
        s(&pred),
        "--out",
        s(&tmp.path().join("tg2")),
    ]);
    let losses: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    for l in losses.as_array().unwrap() {
        let total = l["loss"]["total"].as_f64().unwrap();
        assert!(total.abs() < 1e-6, "identical prediction scored {total}");
    }
}

#[test]
fn extract_empty_mask_and_bar_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let g = GridGeometry::default();
    let empty = SegMask::empty(g);
    let bar = SegMask::from_fn(g, |c| {
        (100..102).contains(&c.row) && (40..60).contains(&c.col)
    });
    for (i, m) in [empty, bar].iter().enumerate() {
        let dir = input.join(format!("scene_{i:06}"));
        fs::create_dir_all(&dir).unwrap();
        gmap::write_raw(dir.join("gt_mask.gmap"), &m.to_raw()).unwrap();
    }
    let out = tmp.path().join("out");
    ok(&["extract", "--input", s(&input), "--out", s(&out)]);
    assert_eq!(
        fs::read_to_string(out.join("scene_000000/lines.json"))
            .unwrap()
            .trim(),
        "[]"
    );
    let lines = read_lines(out.join("scene_000001/lines.json"));
    assert_eq!(lines.len(), 1);
    assert!((lines[0].length() - 19.0 * 0.26).abs() < 1e-9);
    let flags = &manifest(&out)["flags"];
    assert_eq!(flags["min_cluster"], 3);
    assert_eq!(flags["merge_dist"], 0.3);
    assert_eq!(flags["merge_angle"], 8.0);
}

#[test]
fn eval_matches_library_and_reports_unpaired() {
    let tmp = tempfile::tempdir().unwrap();
    let (gen, ex, ev) = (
        tmp.path().join("gen"),
        tmp.path().join("ex"),
        tmp.path().join("ev"),
    );
    ok(&["gen", "--scenes", "4", "--seed", "3", "--out", s(&gen)]);
    ok(&[
        "extract",
        "--input",
        s(&gen),
        "--source",
        "grid",
        "--out",
        s(&ex),
    ]);
    ok(&["eval", "--pred", s(&ex), "--gt", s(&gen), "--out", s(&ev)]);
    assert_eq!(manifest(&ev)["flags"]["a_thresh"], 8.0);

    let frames: Vec<_> = (0..4)
        .map(|i| {
            let name = format!("scene_{i:06}");
            (
                read_lines(ex.join(&name).join("lines.json")),
                read_lines(gen.join(&name).join("gt_lines.json")),
            )
        })
        .collect();
    let lib = banded_evaluation(&frames, 8.0, 10).unwrap();
    assert_eq!(
        fs::read_to_string(ev.join("report.csv")).unwrap(),
        lib.to_csv().unwrap()
    );
    assert_eq!(
        read_report_json(ev.join("report.json")).unwrap(),
        lib.report_rows()
    );

    // ground truth against itself is perfect in every band
    let self_eval = tmp.path().join("self");
    ok(&[
        "eval",
        "--pred",
        s(&gen),
        "--pred-name",
        "gt_lines.json",
        "--gt",
        s(&gen),
        "--out",
        s(&self_eval),
    ]);
    for row in read_report_json(self_eval.join("report.json")).unwrap() {
        assert_eq!((row.precision, row.recall), (1.0, 1.0));
    }

    fs::remove_dir_all(ex.join("scene_000002")).unwrap();
    let out = stopline(&[
        "eval",
        "--pred",
        s(&ex),
        "--gt",
        s(&gen),
        "--out",
        s(&tmp.path().join("x")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("scene_000002"));
}

#[test]
fn geometry_table_and_required_distance() {
    let stdout = ok(&[
        "geometry",
        "--speed-mps",
        "15.6464",
        "--decel",
        "3",
        "--latency",
        "0.8",
    ]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "distance_m,pixel_height_px");
    let px: Vec<f64> = lines[1..11]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(px.windows(2).all(|w| w[1] < w[0]));
    let required: f64 = lines[11].split(',').nth(1).unwrap().parse().unwrap();
    assert!((required - 53.3).abs() < 0.5);

    let zero = ok(&["geometry", "--speed-mps", "0"]);
    assert!(zero.lines().last().unwrap().ends_with(",0.000"));
    let bad = stopline(&["geometry", "--decel", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!stopline(&["geometry", "--focal-px", "-5"]).status.success());
}

#[test]
fn report_merges_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let line = StopLine::new(MetricPoint::new(0.0, 5.0), MetricPoint::new(3.0, 5.0)).unwrap();
    for (name, preds) in [("good", vec![line]), ("empty", vec![])] {
        let dir = tmp.path().join(name);
        fs::create_dir_all(&dir).unwrap();
        let r = banded_evaluation(&[(preds, vec![line])], 8.0, 10).unwrap();
        fs::write(dir.join("report.json"), r.to_json().unwrap()).unwrap();
    }
    let out = tmp.path().join("cmp");
    let stdout = ok(&[
        "report",
        s(&tmp.path().join("good")),
        s(&tmp.path().join("empty")),
        "--out",
        s(&out),
    ]);
    let rows: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        rows[0],
        "run,band_lower,band_upper,precision,recall,f1,mae_m,n_gt,n_pos,n_neg"
    );
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[1], "good,0,10,1,1,1,0,1,1,0");
    assert_eq!(rows[7], "empty,0,10,1,0,0,,1,0,0");
    assert_eq!(
        fs::read_to_string(out.join("comparison.csv")).unwrap(),
        stdout
    );
    assert!(
        !stopline(&["report", s(&tmp.path().join("good")), "--labels", "a,b"])
            .status
            .success()
    );
}

#[test]
fn threads_flag_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&[
        "gen",
        "--scenes",
        "3",
        "--seed",
        "11",
        "--threads",
        "1",
        "--out",
        s(&a),
    ]);
    ok(&[
        "gen",
        "--scenes",
        "3",
        "--seed",
        "11",
        "--threads",
        "4",
        "--out",
        s(&b),
    ]);
    for i in 0..3 {
        for f in ["scene.gmap", "gt_lines.json", "gt_mask.gmap"] {
            let rel = format!("scene_{i:06}/{f}");
            assert_eq!(
                fs::read(a.join(&rel)).unwrap(),
                fs::read(b.join(&rel)).unwrap(),
                "{rel}"
            );
        }
    }
}
