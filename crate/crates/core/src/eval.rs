//! Registration and depth error metrics at the high-resolution reference
//! frame, and MS-to-RGB registration by disparity.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::disparity::DisparityMap;
use crate::error::{Error, Result};
use crate::geometry::RectificationSetup;
use crate::image::MultiBandImage;
use crate::sum::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BadRate {
    /// Flow tolerance in low-resolution pixels.
    pub tau: f64,
    /// Percentage of evaluated pixels whose flow error exceeds `tau`.
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub d_aepe: f64,
    /// Meters.
    pub ade: f64,
    pub f_aepe: f64,
    pub bad: Vec<BadRate>,
    /// Ground-truth-valid pixels (the evaluation domain).
    pub evaluated: usize,
    /// Domain pixels without a prediction; counted as bad, left out of the
    /// means.
    pub missing_prediction: usize,
    /// Pixels left out of ADE because one of the disparities is zero.
    pub depth_excluded: usize,
    pub scale_ratio: f64,
}

fn tau_label(tau: f64) -> String {
    if tau.fract() == 0.0 {
        format!("bad_{}", tau as i64)
    } else {
        format!("bad_{tau}")
    }
}

impl MetricReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metric report serializes")
    }

    /// Aligned plain-text table: D-AEPE, ADE, F-AEPE, then one bad column
    /// per tolerance.
    pub fn to_table(&self) -> String {
        let mut headers = vec!["D-AEPE".to_string(), "ADE(m)".to_string(), "F-AEPE".to_string()];
        let mut cells = vec![
            format!("{:.4}", self.d_aepe),
            format!("{:.4}", self.ade),
            format!("{:.4}", self.f_aepe),
        ];
        for b in &self.bad {
            headers.push(tau_label(b.tau));
            cells.push(format!("{:.2}", b.percent));
        }
        let widths: Vec<usize> = headers.iter().zip(&cells).map(|(h, c)| h.len().max(c.len())).collect();
        let mut out = String::new();
        for row in [&headers, &cells] {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  "));
        }
        out
    }
}

/// Compares a predicted disparity map with ground truth over the
/// ground-truth validity mask.
///
/// Disparities are in high-resolution pixels. The flow of disparity `d` into
/// the MS frame is `(-d / s, 0)`, so flow errors are disparity errors divided
/// by the scale ratio `s`.
pub fn compute_metrics(
    pred: &DisparityMap,
    gt: &DisparityMap,
    setup: &RectificationSetup,
    taus: &[f64],
) -> Result<MetricReport> {
    if !pred.same_shape(gt) {
        return Err(Error::DimensionMismatch(format!(
            "prediction is {}x{}, ground truth is {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    setup.validate()?;
    if let Some(t) = taus.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidParam(format!("tolerance {t} must be finite and >= 0")));
    }
    let s = setup.scale_ratio;
    let fb = setup.focal * setup.baseline;
    let mut disp_err = Vec::new();
    let mut depth_err = Vec::new();
    let mut evaluated = 0;
    let mut missing = 0;
    let mut depth_excluded = 0;
    for (i, (&gv, &pv)) in gt.mask().iter().zip(pred.mask()).enumerate() {
        if !gv {
            continue;
        }
        evaluated += 1;
        if !pv {
            missing += 1;
            continue;
        }
        let (dg, dp) = (gt.values()[i], pred.values()[i]);
        disp_err.push((dp - dg).abs());
        if dg > 0.0 && dp > 0.0 {
            depth_err.push((fb / dp - fb / dg).abs());
        } else {
            depth_excluded += 1;
        }
    }
    if evaluated == 0 {
        return Err(Error::InvalidInput("ground truth has no valid pixels".into()));
    }
    if disp_err.is_empty() {
        return Err(Error::InvalidInput(
            "prediction has no valid pixels inside the evaluation domain".into(),
        ));
    }
    let d_aepe = pairwise_sum(&disp_err) / disp_err.len() as f64;
    let ade = if depth_err.is_empty() {
        0.0
    } else {
        pairwise_sum(&depth_err) / depth_err.len() as f64
    };
    let bad = taus
        .iter()
        .map(|&tau| {
            let over = disp_err.iter().filter(|e| *e / s > tau).count() + missing;
            BadRate {
                tau,
                percent: 100.0 * over as f64 / evaluated as f64,
            }
        })
        .collect();
    Ok(MetricReport {
        d_aepe,
        ade,
        f_aepe: d_aepe / s,
        bad,
        evaluated,
        missing_prediction: missing,
        depth_excluded,
        scale_ratio: s,
    })
}

/// MS image resampled onto the high-resolution frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisteredMs {
    /// Same band count as the input; invalid pixels hold zeros.
    pub image: MultiBandImage,
    pub valid: Vec<bool>,
}

/// Samples the MS image at `((x - d) / s, y / s)` for every valid
/// high-resolution pixel `(x, y)` with disparity `d`.
pub fn register_ms(ms: &MultiBandImage, disp: &DisparityMap, setup: &RectificationSetup) -> Result<RegisteredMs> {
    let s = setup.scale_ratio;
    let expect_w = disp.width() as f64 / s;
    let expect_h = disp.height() as f64 / s;
    if (ms.width() as f64 - expect_w).abs() > 1.0
        || (ms.height() as f64 - expect_h).abs() > 1.0 + 0.01 * expect_h {
        return Err(Error::DimensionMismatch(format!(
            "MS image is {}x{}, expected about {expect_w:.1}x{expect_h:.1} for a {}x{} map at scale {s}",
            ms.width(),
            ms.height(),
            disp.width(),
            disp.height()
        )));
    }
    let bands = ms.bands();
    let (w, h) = (disp.width(), disp.height());
    let mut data = vec![0.0f32; w * h * bands];
    let mut valid = vec![false; w * h];
    let mut px = vec![0.0f64; bands];
    for y in 0..h {
        for x in 0..w {
            let Some(d) = disp.get(x, y) else {
                continue;
            };
            let (sx, sy) = ((x as f64 - d) / s, y as f64 / s);
            let ok = (0..bands).all(|c| match ms.sample_bilinear(sx, sy, c) {
                Some(v) => {
                    px[c] = v;
                    true
                }
                None => false,
            });
            if ok {
                let i = y * w + x;
                valid[i] = true;
                for c in 0..bands {
                    data[i * bands + c] = px[c] as f32;
                }
            }
        }
    }
    Ok(RegisteredMs {
        image: MultiBandImage::new(w, h, bands, ms.depth(), data)?,
        valid,
    })
}
