//! File-level round trips through the GMAP format.

use stopline::gmap::{self, read_gmap, write_gmap, MAGIC};
use stopline::segmenter::{load_mask, save_mask};
use stopline::synth_scenes::{generate_scene, rasterize_gt, SceneSpec, STOP_BAR_CELLS};
use stopline::{Error, GridGeometry};

#[test]
fn scene_and_mask_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SceneSpec {
        seed: 4,
        occlusion_blobs: 2,
        noise_sigma: 0.05,
        ..SceneSpec::default()
    };
    let (grid, lines) = generate_scene(&spec, &GridGeometry::default()).unwrap();
    let path = dir.path().join("scene.gmap");
    write_gmap(&path, &grid).unwrap();
    assert_eq!(read_gmap(&path).unwrap(), grid);

    let mask = rasterize_gt(&lines, grid.geometry(), STOP_BAR_CELLS).unwrap();
    let mpath = dir.path().join("mask.gmap");
    save_mask(&mpath, &mask).unwrap();
    assert_eq!(load_mask(&mpath).unwrap(), mask);
}

#[test]
fn corrupt_files_report_offsets() {
    let dir = tempfile::tempdir().unwrap();
    let mask = rasterize_gt(&[], &GridGeometry::default(), 2).unwrap();
    let mut bytes = gmap::encode(&mask.to_raw()).unwrap();
    assert_eq!(&bytes[..4], MAGIC);

    bytes[0] = b'X';
    let bad = dir.path().join("bad.gmap");
    std::fs::write(&bad, &bytes).unwrap();
    assert!(matches!(
        load_mask(&bad),
        Err(Error::Format { offset: 0, .. })
    ));

    // a grid map is not a mask
    let (grid, _) = generate_scene(&SceneSpec::default(), &GridGeometry::default()).unwrap();
    let gpath = dir.path().join("grid.gmap");
    write_gmap(&gpath, &grid).unwrap();
    assert!(matches!(load_mask(&gpath), Err(Error::Format { .. })));
}
