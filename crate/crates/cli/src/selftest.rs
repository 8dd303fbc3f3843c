//! `ssf selftest`: configuration defaults against the library defaults.

use ssf_core::matching::CensusWindow;
use ssf_core::refine::{ConfidencePoolParams, SubpixelMode};
use ssf_core::sgm::{PathSet, SgmParams};
use ssf_core::stereo::StereoConfig;
use ssf_core::supervision::{ProxyConfig, ProxySource};

use crate::config::{PipelineConfig, DEFAULT_CLEANING_RADIUS, DEFAULT_MIN_NEIGHBORS, DEFAULT_SIGMA};
use crate::{Failure, Status, EXIT_FAILURE};

/// Named checks; each is `(name, passed)`.
pub fn checks() -> Vec<(&'static str, bool)> {
    let cfg = PipelineConfig::default();
    let parsed = PipelineConfig::parse("").ok();
    let sgm = SgmParams::default();
    let pool = ConfidencePoolParams::default();
    vec![
        ("empty document parses to the defaults", parsed.as_ref() == Some(&cfg)),
        ("matching.d_max = 128", cfg.matching.d_max == 128 && cfg.stereo().d_max == StereoConfig::default().d_max),
        ("matching.window = 9x7", cfg.stereo().window == CensusWindow::default() && cfg.matching.window == [9, 7]),
        ("sgm = P1 7, P2 100, 8 paths", cfg.sgm == sgm && sgm.p1 == 7.0 && sgm.p2 == 100.0 && sgm.paths == PathSet::Eight),
        ("refine.lrc_threshold = 1", cfg.refine.lrc_threshold == pool.lrc_threshold && pool.lrc_threshold == 1.0),
        ("refine.wmdd_window = 41", cfg.refine.wmdd_window == pool.wmdd_window && pool.wmdd_window == 41),
        ("refine.wmdd_threshold = 1", cfg.refine.wmdd_threshold == pool.wmdd_threshold && pool.wmdd_threshold == 1.0),
        ("refine.wmdd_sigma_color = 10", cfg.refine.wmdd_sigma_color == pool.wmdd_sigma_color && pool.wmdd_sigma_color == 10.0),
        ("refine.subpixel = parabola", cfg.refine.subpixel == SubpixelMode::ParabolaVertex && SubpixelMode::default() == SubpixelMode::ParabolaVertex),
        ("geometry.cleaning_radius = 0.02", cfg.geometry.cleaning_radius == DEFAULT_CLEANING_RADIUS && DEFAULT_CLEANING_RADIUS == 0.02),
        ("geometry.min_neighbors = 5", cfg.geometry.min_neighbors == DEFAULT_MIN_NEIGHBORS && DEFAULT_MIN_NEIGHBORS == 5),
        ("supervision.sigma = 1", cfg.supervision.sigma == DEFAULT_SIGMA && DEFAULT_SIGMA == 1.0),
        ("supervision.min_density = 0.70", cfg.supervision.min_density == ProxyConfig::default().min_density && cfg.supervision.min_density == 0.70),
        ("supervision.mode = second-rgb", cfg.supervision.mode == ProxySource::default() && cfg.supervision.mode == ProxySource::SecondRgb),
        ("eval.taus = 1,2,3", cfg.eval.taus == [1.0, 2.0, 3.0]),
        ("stereo config assembled from sections", cfg.stereo() == StereoConfig::default()),
    ]
}

pub fn run() -> Result<Status, Failure> {
    let results = checks();
    let mut failed = 0;
    for (name, ok) in &results {
        println!("{} {name}", if *ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed == 0 {
        Ok(Status::Success)
    } else {
        Err(Failure {
            stage: "selftest",
            code: EXIT_FAILURE,
            error: anyhow::anyhow!("{failed} of {} checks failed", results.len()),
        })
    }
}
