mod common;

use std::path::Path;
use std::process::{Command, Output};

use ssf_cli::config::PipelineConfig;
use ssf_core::disparity::{read_disparity, write_disparity, DisparityFormat};
use ssf_core::image::{load_image, write_image, BandLayout};
use ssf_core::synth::Plane;
use ssf_core::{BitDepth, DisparityMap, MultiBandImage};

use common::{calibration_toml, proxy_cams, write_active_scene, write_proxy_scene};

fn ssf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssf")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_config(dir: &Path, edit: impl FnOnce(&mut PipelineConfig)) -> std::path::PathBuf {
    let mut cfg = PipelineConfig::default();
    cfg.matching.d_max = 32;
    cfg.refine.wmdd_window = 15;
    edit(&mut cfg);
    let path = dir.join("config.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    path
}

const PLANE: Plane = Plane { a: 0.02, b: 0.01, c: 12.0 };

#[test]
fn annotate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    write_active_scene(&scene, 1, 128, 96, 3, PLANE);
    let cfg = small_config(dir.path(), |_| {});
    let out = dir.path().join("out");
    let o = ssf(&["--config", p(&cfg), "annotate", p(&scene), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let d = read_disparity(&out.join("disparity.pfm"), DisparityFormat::FloatMap).unwrap();
    assert_eq!((d.width(), d.height()), (128, 96));
    assert!(d.density() > 0.7);
    let manifest: toml::Table = std::fs::read_to_string(out.join("manifest.toml")).unwrap().parse().unwrap();
    assert_eq!(manifest["frame"].as_str(), Some("rgb-rgb"));
    assert_eq!(manifest["pairs"].as_integer(), Some(3));
    assert_eq!(manifest["accepted"].as_bool(), Some(true));
    let ply = std::fs::read_to_string(out.join("cloud.ply")).unwrap();
    assert!(ply.starts_with("ply\nformat ascii 1.0\n"));
    assert!(out.join("mask.png").is_file());
}

#[test]
fn annotate_below_density_gate_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    write_active_scene(&scene, 2, 96, 64, 2, PLANE);
    let cfg = small_config(dir.path(), |c| c.supervision.min_density = 1.0);
    let out = dir.path().join("out");
    let o = ssf(&["--config", p(&cfg), "annotate", p(&scene), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("below"));
    let manifest = std::fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("accepted = false"));
}

#[test]
fn missing_calibration_is_a_geometry_error() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    write_active_scene(&scene, 3, 64, 48, 1, PLANE);
    std::fs::remove_file(scene.join("calibration.toml")).unwrap();
    let o = ssf(&["annotate", p(&scene)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("geometry stage"), "{}", stderr(&o));
}

#[test]
fn unmatched_pair_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    write_active_scene(&scene, 4, 64, 48, 2, PLANE);
    std::fs::remove_file(scene.join("right_1.png")).unwrap();
    let o = ssf(&["annotate", p(&scene)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("right_1.png"), "{}", stderr(&o));
}

#[test]
fn second_rgb_without_second_image_names_the_mode() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("data").join("a");
    write_proxy_scene(&scene, 5, 64, 48, 2, PLANE);
    std::fs::remove_file(scene.join("rgb_right.png")).unwrap();
    let o = ssf(&["proxy", p(&dir.path().join("data")), "--mode", "second-rgb"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("second-rgb"), "{}", stderr(&o));
}

#[test]
fn proxy_batch_gates_scenes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    for k in 0..10 {
        let scene = data.join(format!("scene_{k:02}"));
        write_proxy_scene(&scene, 20 + k, 96, 64, 2, PLANE);
        if k == 3 || k == 7 {
            let flat = MultiBandImage::from_fn(96, 64, 3, BitDepth::Eight, |_, _, _| 128.0).unwrap();
            write_image(&flat, &scene.join("rgb_right.png"), BandLayout::Color).unwrap();
        }
    }
    let cfg = small_config(dir.path(), |_| {});
    let run = |jobs: &str, out: &Path| {
        let o = ssf(&["--config", p(&cfg), "--jobs", jobs, "proxy", p(&data), "--out", p(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run("1", &a);
    run("3", &b);
    let manifest: toml::Table = std::fs::read_to_string(a.join("manifest.toml")).unwrap().parse().unwrap();
    assert_eq!(manifest["mode"].as_str(), Some("second-rgb"));
    assert_eq!(manifest["accepted"].as_integer(), Some(8));
    assert_eq!(manifest["rejected"].as_integer(), Some(2));
    let scenes = manifest["scenes"].as_array().unwrap();
    for (k, s) in scenes.iter().enumerate() {
        let rejected = k == 3 || k == 7;
        assert_eq!(s["accepted"].as_bool(), Some(!rejected), "scene {k}");
        assert_eq!(s.get("reason").is_some(), rejected);
        assert_eq!(a.join(format!("scene_{k:02}/proxy.pfm")).is_file(), !rejected);
    }
    for rel in ["manifest.toml", "scene_00/proxy.pfm", "scene_09/mask.png"] {
        assert_eq!(std::fs::read(a.join(rel)).unwrap(), std::fs::read(b.join(rel)).unwrap(), "{rel}");
    }
}

#[test]
fn proxy_with_every_scene_rejected_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    write_proxy_scene(&data.join("only"), 40, 64, 48, 2, PLANE);
    let cfg = small_config(dir.path(), |c| c.supervision.min_density = 1.0);
    let o = ssf(&["--config", p(&cfg), "proxy", p(&data)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(data.join("proxy/manifest.toml").is_file());
}

fn write_calib(dir: &Path, w: usize, h: usize, scale: usize) -> std::path::PathBuf {
    let path = dir.join("calibration.toml");
    std::fs::write(&path, calibration_toml(&proxy_cams(w, h, scale))).unwrap();
    path
}

#[test]
fn eval_of_ground_truth_against_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let calib = write_calib(dir.path(), 40, 30, 2);
    let gt = PLANE.disparity_map(40, 30);
    let gt_path = dir.path().join("gt.pfm");
    write_disparity(&gt, &gt_path, DisparityFormat::FloatMap).unwrap();
    let out = dir.path().join("report");
    let o = ssf(&["eval", "--pred", p(&gt_path), "--gt", p(&gt_path), "--calib", p(&calib), "--taus", "3,0.5", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let mut lines = stdout.lines();
    let header: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(header, ["D-AEPE", "ADE(m)", "F-AEPE", "bad_3", "bad_0.5"]);
    let values: Vec<f64> = lines.next().unwrap().split_whitespace().map(|v| v.parse().unwrap()).collect();
    assert!(values.iter().all(|v| *v == 0.0));
    let report: toml::Table = std::fs::read_to_string(out.join("report.toml")).unwrap().parse().unwrap();
    assert_eq!(report["scale_ratio"].as_float(), Some(2.0));
    assert_eq!(report["evaluated"].as_integer(), Some(1200));
}

#[test]
fn eval_shape_mismatch_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let calib = write_calib(dir.path(), 40, 30, 2);
    let a = dir.path().join("a.pfm");
    let b = dir.path().join("b.pfm");
    write_disparity(&PLANE.disparity_map(40, 30), &a, DisparityFormat::FloatMap).unwrap();
    write_disparity(&PLANE.disparity_map(20, 30), &b, DisparityFormat::FloatMap).unwrap();
    let o = ssf(&["eval", "--pred", p(&a), "--gt", p(&b), "--calib", p(&calib)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("eval stage"), "{}", stderr(&o));
}

#[test]
fn register_with_zero_disparity_upsamples_ms() {
    let dir = tempfile::tempdir().unwrap();
    let calib = write_calib(dir.path(), 40, 30, 2);
    let ms = MultiBandImage::from_fn(20, 15, 10, BitDepth::Eight, |x, y, c| ((x * 7 + y * 3 + c * 11) % 250) as f32).unwrap();
    let ms_dir = dir.path().join("ms");
    write_image(&ms, &ms_dir, BandLayout::Stack).unwrap();
    let disp = DisparityMap::from_fn(40, 30, |_, _| 0.0).unwrap();
    let disp_path = dir.path().join("d.pfm");
    write_disparity(&disp, &disp_path, DisparityFormat::FloatMap).unwrap();
    let out = dir.path().join("out");
    let o = ssf(&["register", "--ms", p(&ms_dir), "--disp", p(&disp_path), "--calib", p(&calib), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let reg = load_image(&out.join("registered"), BandLayout::Stack).unwrap();
    assert_eq!((reg.width(), reg.height(), reg.bands()), (40, 30, 10));
    for y in (0..30).step_by(2) {
        for x in (0..40).step_by(2) {
            for c in 0..10 {
                assert_eq!(reg.get(x, y, c), ms.get(x / 2, y / 2, c));
            }
        }
    }
    assert!(out.join("valid.png").is_file());
}

#[test]
fn selftest_passes() {
    let o = ssf(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().count() >= 10);
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[sgm]\np1 = 7.0\npenalty = 3\n").unwrap();
    let o = ssf(&["--config", p(&cfg), "selftest"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("config stage"), "{}", stderr(&o));
    assert!(stderr(&o).contains("penalty"), "{}", stderr(&o));

    std::fs::write(&cfg, "[sgm]\np1 = 50.0\np2 = 10.0\n").unwrap();
    let o = ssf(&["--config", p(&cfg), "selftest"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("P1"), "{}", stderr(&o));
}

#[test]
fn unknown_subpixel_mode_is_rejected_by_the_parser() {
    let o = ssf(&["annotate", "nowhere", "--subpixel", "cubic"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("parabola or literal"));
}

#[test]
fn help_exits_zero() {
    let o = ssf(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("annotate"));
}
