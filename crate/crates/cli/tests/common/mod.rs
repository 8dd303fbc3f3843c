//! Scene writers for the CLI tests: synthetic rigs laid out on disk the way
//! the subcommands expect them.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use ssf_cli::scene::{write_any, RGB_NAME, SECOND_RGB_NAME};
use ssf_core::image::{write_image, BandLayout};
use ssf_core::synth::{active_scene, cross_spectral_scene, ActiveScene, CrossSpectralScene, Plane};

/// Axis-aligned pinhole camera at `(cx, 0, 0)` looking down +z.
pub struct Cam {
    pub name: &'static str,
    pub focal: f64,
    pub pp: [f64; 2],
    pub x: f64,
    pub res: [usize; 2],
}

pub fn calibration_toml(cams: &[Cam]) -> String {
    let mut s = String::new();
    for c in cams {
        let _ = writeln!(
            s,
            "[{}]\nfocal = {:?}\nprincipal_point = [{:?}, {:?}]\nrotation = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]\ntranslation = [{:?}, 0.0, 0.0]\nresolution = [{}, {}]\n",
            c.name, c.focal, c.pp[0], c.pp[1], -c.x, c.res[0], c.res[1]
        );
    }
    s
}

pub fn write_calibration(dir: &Path, cams: &[Cam]) {
    std::fs::write(dir.join("calibration.toml"), calibration_toml(cams)).unwrap();
}

pub const FOCAL: f64 = 500.0;

fn center(w: usize, h: usize) -> [f64; 2] {
    [(w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0]
}

/// Active scene with an already rectified 5 cm RGB pair and no MS camera.
pub fn write_active_scene(dir: &Path, seed: u64, w: usize, h: usize, patterns: usize, plane: Plane) -> ActiveScene {
    std::fs::create_dir_all(dir).unwrap();
    let scene = active_scene(seed, w, h, patterns, plane).unwrap();
    for (k, (l, r)) in scene.pairs.iter().enumerate() {
        write_image(l, &dir.join(format!("left_{k}.png")), BandLayout::Single).unwrap();
        write_image(r, &dir.join(format!("right_{k}.png")), BandLayout::Single).unwrap();
    }
    let pp = center(w, h);
    write_calibration(
        dir,
        &[
            Cam { name: "left", focal: FOCAL, pp, x: 0.0, res: [w, h] },
            Cam { name: "right", focal: FOCAL, pp, x: 0.05, res: [w, h] },
        ],
    );
    scene
}

/// Calibration of the cross-spectral rig: RGB reference at the origin, the
/// second RGB camera 8 cm to the right and the MS camera halfway, at
/// `1/scale` of the RGB resolution with corner-aligned pixels.
pub fn proxy_cams(w: usize, h: usize, scale: usize) -> Vec<Cam> {
    let s = scale as f64;
    let pp = [0.0, 0.0];
    vec![
        Cam { name: "left", focal: FOCAL, pp, x: 0.0, res: [w, h] },
        Cam { name: "right", focal: FOCAL, pp, x: 0.08, res: [w, h] },
        Cam { name: "ms", focal: FOCAL / s, pp, x: 0.04, res: [w / scale, h / scale] },
    ]
}

pub fn write_proxy_scene(dir: &Path, seed: u64, w: usize, h: usize, scale: usize, plane_rr: Plane) -> CrossSpectralScene {
    std::fs::create_dir_all(dir).unwrap();
    let scene = cross_spectral_scene(seed, w, h, scale, plane_rr).unwrap();
    write_image(&scene.rgb, &dir.join(RGB_NAME), BandLayout::Color).unwrap();
    write_image(&scene.second_rgb, &dir.join(SECOND_RGB_NAME), BandLayout::Color).unwrap();
    write_any(&scene.ms, dir, "ms").unwrap();
    write_calibration(dir, &proxy_cams(w, h, scale));
    scene
}
