//! Proxy-label distillation and the network-free continuous-disparity
//! supervision math: Gaussian categorical targets, the classification plus
//! offset loss, and disparity composition.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::disparity::DisparityMap;
use crate::error::{Error, Result};
use crate::geometry::{upsample, warp_disparity};
use crate::image::{to_single_channel, MultiBandImage};
use crate::stereo::{space_time_stereo, StereoConfig};

const LOG_FLOOR: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;

/// Soft label over integer disparities `0..=d_max` with a residual offset.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalTarget {
    pub distribution: Vec<f64>,
    /// `d* - integer_label`.
    pub offset_label: f64,
    pub integer_label: usize,
}

fn argmax(dist: &[f64]) -> usize {
    let mut best = 0;
    for (k, p) in dist.iter().enumerate() {
        if *p > dist[best] {
            best = k;
        }
    }
    best
}

/// Gaussian centered at `d_star` sampled at the integers of `[0, d_max]`
/// and renormalized over that truncated support.
pub fn make_target(d_star: f64, sigma: f64, d_max: usize) -> Result<CategoricalTarget> {
    if !(d_star.is_finite() && d_star >= 0.0 && d_star <= d_max as f64) {
        return Err(Error::OutOfRange(format!("d* = {d_star} outside [0, {d_max}]")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParam(format!("sigma {sigma} must be > 0")));
    }
    let logits: Vec<f64> = (0..=d_max)
        .map(|k| {
            let z = (k as f64 - d_star) / sigma;
            -0.5 * z * z
        })
        .collect();
    let peak = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|l| (l - peak).exp()).collect();
    let total: f64 = weights.iter().sum();
    let distribution: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let integer_label = argmax(&distribution);
    Ok(CategoricalTarget {
        offset_label: d_star - integer_label as f64,
        integer_label,
        distribution,
    })
}

fn check_distribution(dist: &[f64]) -> Result<()> {
    if dist.is_empty() {
        return Err(Error::InvalidInput("empty distribution".into()));
    }
    if dist.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidInput("probabilities must be finite and >= 0".into()));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidInput(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Shannon entropy in nats; zero-probability terms contribute nothing.
pub fn entropy(dist: &[f64]) -> f64 {
    dist.iter().filter(|p| **p > 0.0).map(|p| -p * p.ln()).sum()
}

/// Cross-entropy of `pred_dist` against the target plus the absolute offset
/// error.
pub fn eval_loss(pred_dist: &[f64], pred_offset: f64, target: &CategoricalTarget) -> Result<f64> {
    if pred_dist.len() != target.distribution.len() {
        return Err(Error::DimensionMismatch(format!(
            "prediction has {} bins, target has {}",
            pred_dist.len(),
            target.distribution.len()
        )));
    }
    check_distribution(pred_dist)?;
    if !pred_offset.is_finite() {
        return Err(Error::InvalidInput(format!("offset {pred_offset} is not finite")));
    }
    let ce: f64 = target
        .distribution
        .iter()
        .zip(pred_dist)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, p)| -t * p.max(LOG_FLOOR).ln())
        .sum();
    Ok(ce + (pred_offset - target.offset_label).abs())
}

/// Argmax bin (lowest index on ties) plus the predicted offset.
pub fn compose_disparity(pred_dist: &[f64], pred_offset: f64) -> Result<f64> {
    check_distribution(pred_dist)?;
    Ok(argmax(pred_dist) as f64 + pred_offset)
}

/// Where proxy labels come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProxySource {
    /// Match the RGB image directly against the band-averaged MS image.
    DirectRgbms,
    /// Match two RGB cameras, then warp onto the RGB-MS frame.
    #[default]
    SecondRgb,
}

impl std::str::FromStr for ProxySource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct-rgbms" => Ok(Self::DirectRgbms),
            "second-rgb" => Ok(Self::SecondRgb),
            other => Err(Error::InvalidParam(format!(
                "unknown proxy mode `{other}` (expected direct-rgbms or second-rgb)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyConfig {
    /// Minimum valid-pixel fraction for acceptance, inclusive.
    pub min_density: f64,
    pub source: ProxySource,
    pub stereo: StereoConfig,
}

impl Default for ProxyConfig {
    fn default() -> Self {
        Self {
            min_density: 0.70,
            source: ProxySource::default(),
            stereo: StereoConfig::default(),
        }
    }
}

impl ProxyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_density > 0.0 && self.min_density <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "min_density {} must lie in (0, 1]",
                self.min_density
            )));
        }
        Ok(())
    }
}

/// How an RGB-RGB disparity map is carried onto the RGB-MS frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyGeometry {
    pub h_src: Matrix3<f64>,
    pub h_dst: Matrix3<f64>,
    /// RGB-MS baseline over RGB-RGB baseline.
    pub baseline_ratio: f64,
    pub scale: f64,
    pub out_width: usize,
    pub out_height: usize,
}

impl ProxyGeometry {
    /// Both pairs already rectified in the same left frame.
    pub fn aligned(baseline_ratio: f64, out_width: usize, out_height: usize) -> Self {
        Self {
            h_src: Matrix3::identity(),
            h_dst: Matrix3::identity(),
            baseline_ratio,
            scale: 1.0,
            out_width,
            out_height,
        }
    }
}

/// Images available for one acquisition. Which ones are required depends on
/// the proxy source.
#[derive(Debug, Clone, Copy)]
pub struct ProxyInputs<'a> {
    /// Rectified RGB reference image (left of both pairs).
    pub rgb: &'a MultiBandImage,
    /// Rectified low-resolution MS image.
    pub ms: Option<&'a MultiBandImage>,
    /// Rectified second RGB image.
    pub second_rgb: Option<&'a MultiBandImage>,
    pub geometry: Option<&'a ProxyGeometry>,
}

#[derive(Debug, Clone)]
pub struct ProxyOutcome {
    pub disparity: DisparityMap,
    pub density: f64,
    pub accepted: bool,
    pub rejection: Option<String>,
}

/// Acceptance decision on a valid-pixel fraction; inclusive threshold.
pub fn density_gate(density: f64, min_density: f64) -> (bool, Option<String>) {
    if density >= min_density {
        (true, None)
    } else {
        (
            false,
            Some(format!(
                "valid-pixel fraction {:.2}% below {:.2}%",
                density * 100.0,
                min_density * 100.0
            )),
        )
    }
}

/// Computes a proxy disparity map in the RGB-MS frame and applies the
/// density gate.
pub fn distill_proxy(inputs: &ProxyInputs<'_>, cfg: &ProxyConfig) -> Result<ProxyOutcome> {
    cfg.validate()?;
    let rgb = to_single_channel(inputs.rgb)?;
    let disparity = match cfg.source {
        ProxySource::DirectRgbms => {
            let ms = inputs
                .ms
                .ok_or_else(|| Error::InvalidInput("direct-rgbms mode needs the MS image".into()))?;
            let ms = to_single_channel(ms)?;
            let scale = rgb.width() as f64 / ms.width() as f64;
            let ms_up = upsample(&ms, scale, rgb.width(), rgb.height())?;
            space_time_stereo(&[(&rgb, &ms_up)], &cfg.stereo)?.refined
        }
        ProxySource::SecondRgb => {
            let second = inputs.second_rgb.ok_or_else(|| {
                Error::InvalidInput("second-rgb mode needs the second RGB camera image".into())
            })?;
            let geom = inputs
                .geometry
                .ok_or_else(|| Error::InvalidInput("second-rgb mode needs the MS geometry descriptor".into()))?;
            let second = to_single_channel(second)?;
            let rr = space_time_stereo(&[(&rgb, &second)], &cfg.stereo)?.refined;
            warp_disparity(
                &rr,
                &geom.h_src,
                &geom.h_dst,
                geom.baseline_ratio,
                geom.scale,
                (geom.out_width, geom.out_height),
            )?
        }
    };
    let density = disparity.density();
    let (accepted, rejection) = density_gate(density, cfg.min_density);
    Ok(ProxyOutcome {
        disparity,
        density,
        accepted,
        rejection,
    })
}
