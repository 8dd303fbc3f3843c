//! Space-time stereo matcher: census costs integrated over every pattern
//! pair, SGM, winner-takes-all, the confidence pool and sub-pixel refinement.

use crate::cost::CostVolume;
use crate::disparity::DisparityMap;
use crate::error::{Error, Result};
use crate::image::{to_single_channel, MultiBandImage};
use crate::matching::{accumulate_dsi, accumulate_right_dsi, census_transform, CensusImage, CensusWindow};
use crate::refine::{filter_pool, subpixel_refine, ConfidencePoolParams, SubpixelMode};
use crate::sgm::{sgm_aggregate, wta, SgmParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoConfig {
    /// Number of disparity hypotheses (`0..d_max`).
    pub d_max: usize,
    pub window: CensusWindow,
    pub sgm: SgmParams,
    pub pool: ConfidencePoolParams,
    pub subpixel: SubpixelMode,
}

impl Default for StereoConfig {
    fn default() -> Self {
        Self {
            d_max: 128,
            window: CensusWindow::default(),
            sgm: SgmParams::default(),
            pool: ConfidencePoolParams::default(),
            subpixel: SubpixelMode::default(),
        }
    }
}

/// Intermediate and final maps of one matcher run, all in the left frame
/// except `right`.
#[derive(Debug, Clone)]
pub struct StereoOutput {
    /// Winner-takes-all over the aggregated left-reference volume.
    pub raw: DisparityMap,
    /// Winner-takes-all over the aggregated right-reference volume.
    pub right: DisparityMap,
    /// `raw` after the confidence pool.
    pub filtered: DisparityMap,
    /// `filtered` after sub-pixel refinement.
    pub refined: DisparityMap,
}

/// Temporal mean of the left frames, used as the WMDD guide so the bilateral
/// weights follow scene structure rather than any single projected pattern.
fn mean_guide(frames: &[MultiBandImage]) -> Result<MultiBandImage> {
    let first = &frames[0];
    let n = frames.len() as f64;
    let mut acc = vec![0.0f64; first.data().len()];
    for f in frames {
        for (a, v) in acc.iter_mut().zip(f.data()) {
            *a += *v as f64;
        }
    }
    let data = acc.into_iter().map(|v| (v / n).round() as f32).collect();
    MultiBandImage::new(first.width(), first.height(), 1, first.depth(), data)
}

/// Runs the matcher on `T >= 1` rectified pairs of the same static scene.
pub fn space_time_stereo(
    pairs: &[(&MultiBandImage, &MultiBandImage)],
    cfg: &StereoConfig,
) -> Result<StereoOutput> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no stereo pairs".into()));
    }
    cfg.sgm.validate()?;
    cfg.pool.validate()?;
    let (w, h) = (pairs[0].0.width(), pairs[0].0.height());
    let mut lefts = Vec::with_capacity(pairs.len());
    let mut census: Vec<(CensusImage, CensusImage)> = Vec::with_capacity(pairs.len());
    for (t, (l, r)) in pairs.iter().enumerate() {
        for img in [l, r] {
            if (img.width(), img.height()) != (w, h) {
                return Err(Error::DimensionMismatch(format!(
                    "pair {t} is {}x{}, expected {w}x{h}",
                    img.width(),
                    img.height()
                )));
            }
        }
        let gl = to_single_channel(l)?;
        let gr = to_single_channel(r)?;
        census.push((census_transform(&gl, cfg.window)?, census_transform(&gr, cfg.window)?));
        lefts.push(gl);
    }
    let guide = mean_guide(&lefts)?;
    drop(lefts);

    // Right-reference pass first so its volumes are released before the
    // left-reference aggregate, which is kept for sub-pixel refinement.
    let right = {
        let mut acc = CostVolume::filled(w, h, cfg.d_max, 0u16)?;
        for (cl, cr) in &census {
            accumulate_right_dsi(&mut acc, cl, cr)?;
        }
        let agg = sgm_aggregate(&acc, &cfg.sgm)?;
        drop(acc);
        wta(&agg)
    };
    let left_agg = {
        let mut acc = CostVolume::filled(w, h, cfg.d_max, 0u16)?;
        for (cl, cr) in &census {
            accumulate_dsi(&mut acc, cl, cr)?;
        }
        sgm_aggregate(&acc, &cfg.sgm)?
    };
    drop(census);
    let raw = wta(&left_agg);
    let filtered = filter_pool(&raw, &right, &guide, &cfg.pool)?;
    let refined = subpixel_refine(&filtered, &left_agg, cfg.subpixel)?;
    Ok(StereoOutput {
        raw,
        right,
        filtered,
        refined,
    })
}
