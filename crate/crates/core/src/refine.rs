//! Outlier suppression and sub-pixel refinement.
//!
//! The confidence pool combines three binary tests, each applied to the same
//! input map; a pixel survives only if all three keep it:
//!
//! * **LRC**: left-right consistency against a right-reference map.
//! * **ACC**: per-row collision test; among left pixels landing on the same
//!   right pixel only the nearest surface (largest disparity) survives.
//! * **WMDD**: deviation from the bilateral-weighted median of the window.
//!
//! Filters never alter surviving values, they only clear mask bits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{Cost, CostVolume};
use crate::disparity::DisparityMap;
use crate::error::{Error, Result};
use crate::image::{to_single_channel, MultiBandImage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfidencePoolParams {
    pub lrc_threshold: f64,
    pub wmdd_window: usize,
    pub wmdd_threshold: f64,
    /// Spread of the bilateral weight on guide intensity differences.
    pub wmdd_sigma_color: f64,
}

impl Default for ConfidencePoolParams {
    fn default() -> Self {
        Self {
            lrc_threshold: 1.0,
            wmdd_window: 41,
            wmdd_threshold: 1.0,
            wmdd_sigma_color: 10.0,
        }
    }
}

impl ConfidencePoolParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lrc_threshold > 0.0 && self.wmdd_threshold > 0.0 && self.wmdd_sigma_color > 0.0) {
            return Err(Error::InvalidParam("confidence thresholds and sigma must be > 0".into()));
        }
        if self.wmdd_window.is_multiple_of(2) {
            return Err(Error::InvalidParam(format!(
                "WMDD window must be odd, got {}",
                self.wmdd_window
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SubpixelMode {
    /// Vertex of the parabola through the three costs around the minimum.
    #[default]
    #[serde(rename = "parabola")]
    ParabolaVertex,
    /// The two-branch ratio interpolation, evaluated as written and clamped
    /// to half a pixel.
    #[serde(rename = "literal")]
    LiteralRatio,
}

fn check_shape(a: &DisparityMap, b: &DisparityMap) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "disparity maps are {}x{} and {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )))
    }
}

fn lrc_mask(left: &DisparityMap, right: &DisparityMap, threshold: f64) -> Vec<bool> {
    let w = left.width();
    (0..left.len())
        .into_par_iter()
        .map(|i| {
            let (x, y) = (i % w, i / w);
            let Some(dl) = left.get(x, y) else {
                return false;
            };
            let xr = x as f64 - dl.round();
            if xr < 0.0 {
                return false;
            }
            match right.get(xr as usize, y) {
                Some(dr) => (dl - dr).abs() <= threshold,
                None => false,
            }
        })
        .collect()
}

/// Left-right consistency: keeps `(x, y)` iff the right map is valid at
/// `x - round(d_L)` and agrees with `d_L` within `threshold`.
pub fn lrc_filter(left: &DisparityMap, right: &DisparityMap, threshold: f64) -> Result<DisparityMap> {
    check_shape(left, right)?;
    if !(threshold > 0.0) {
        return Err(Error::InvalidParam("LRC threshold must be > 0".into()));
    }
    Ok(left.masked(&lrc_mask(left, right, threshold)))
}

fn acc_mask(disp: &DisparityMap) -> Vec<bool> {
    let w = disp.width();
    let mut keep = disp.mask().to_vec();
    keep.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        // target column -> largest disparity landing there
        let mut nearest: Vec<Option<f64>> = vec![None; w];
        let target = |x: usize, d: f64| {
            let t = (x as f64 - d).round();
            (t >= 0.0 && t < w as f64).then_some(t as usize)
        };
        for x in 0..w {
            if let Some(d) = disp.get(x, y) {
                if let Some(t) = target(x, d) {
                    nearest[t] = Some(nearest[t].map_or(d, |m| m.max(d)));
                }
            }
        }
        for (x, k) in row.iter_mut().enumerate() {
            if let Some(d) = disp.get(x, y) {
                if let Some(t) = target(x, d) {
                    *k = nearest[t] == Some(d);
                }
            }
        }
    });
    keep
}

/// Asymmetric consistency check (occlusion ordering).
pub fn acc_filter(disp: &DisparityMap) -> DisparityMap {
    disp.masked(&acc_mask(disp))
}

/// WMDD survivors. A pixel with disparity `d` survives when the weighted
/// median `m` of its window (smallest value whose cumulative weight reaches
/// half the total) satisfies `|d - m| <= t`, which holds exactly when the
/// weight strictly below `d - t` is under half and the weight up to `d + t`
/// reaches half. Pixels outside `only` are skipped and reported as rejected.
fn wmdd_mask(disp: &DisparityMap, guide: &[f32], params: &ConfidencePoolParams, only: Option<&[bool]>) -> Vec<bool> {
    let inv = -1.0 / (2.0 * params.wmdd_sigma_color * params.wmdd_sigma_color);
    // integer-valued guides get an exact weight table
    if guide.iter().all(|g| g.fract() == 0.0 && *g <= 65535.0) {
        let levels: Vec<u16> = guide.iter().map(|g| *g as u16).collect();
        let top = levels.iter().copied().max().unwrap_or(0) as usize;
        let lut: Vec<f64> = (0..=top).map(|k| ((k * k) as f64 * inv).exp()).collect();
        wmdd_scan(disp, params, only, |p, q| lut[levels[p].abs_diff(levels[q]) as usize])
    } else {
        wmdd_scan(disp, params, only, |p, q| {
            let delta = guide[p] as f64 - guide[q] as f64;
            (delta * delta * inv).exp()
        })
    }
}

fn wmdd_scan(
    disp: &DisparityMap,
    params: &ConfidencePoolParams,
    only: Option<&[bool]>,
    weight: impl Fn(usize, usize) -> f64 + Sync,
) -> Vec<bool> {
    let (w, h) = (disp.width(), disp.height());
    let r = params.wmdd_window / 2;
    let t = params.wmdd_threshold;
    let values = disp.values();
    let valid = disp.mask();
    let weight = &weight;
    (0..h)
        .into_par_iter()
        .flat_map_iter(|y| {
            let (y0, y1) = (y.saturating_sub(r), (y + r).min(h - 1));
            (0..w).map(move |x| {
                let p = y * w + x;
                if !valid[p] || only.is_some_and(|m| !m[p]) {
                    return false;
                }
                let (x0, x1) = (x.saturating_sub(r), (x + r).min(w - 1));
                let (lo_cut, hi_cut) = (values[p] - t, values[p] + t);
                let (mut below, mut upto, mut total) = (0.0f64, 0.0f64, 0.0f64);
                for qy in y0..=y1 {
                    for q in qy * w + x0..=qy * w + x1 {
                        if !valid[q] {
                            continue;
                        }
                        let wt = weight(p, q);
                        let v = values[q];
                        total += wt;
                        if v < lo_cut {
                            below += wt;
                        }
                        if v <= hi_cut {
                            upto += wt;
                        }
                    }
                }
                2.0 * below < total && 2.0 * upto >= total
            })
        })
        .collect()
}

fn guide_plane(disp: &DisparityMap, guide: &MultiBandImage) -> Result<Vec<f32>> {
    if guide.width() != disp.width() || guide.height() != disp.height() {
        return Err(Error::DimensionMismatch(format!(
            "guide is {}x{}, disparity map is {}x{}",
            guide.width(),
            guide.height(),
            disp.width(),
            disp.height()
        )));
    }
    Ok(to_single_channel(guide)?.data().to_vec())
}

/// Weighted median disparity deviation test.
///
/// Weights are `exp(-Δg² / 2σ²)` on the (single-channel) guide intensity.
pub fn wmdd_filter(
    disp: &DisparityMap,
    guide: &MultiBandImage,
    params: &ConfidencePoolParams,
) -> Result<DisparityMap> {
    params.validate()?;
    let plane = guide_plane(disp, guide)?;
    Ok(disp.masked(&wmdd_mask(disp, &plane, params, None)))
}

/// Intersection of the LRC, ACC and WMDD survivors, all evaluated on `left`.
pub fn filter_pool(
    left: &DisparityMap,
    right: &DisparityMap,
    guide: &MultiBandImage,
    params: &ConfidencePoolParams,
) -> Result<DisparityMap> {
    params.validate()?;
    check_shape(left, right)?;
    let plane = guide_plane(left, guide)?;
    let lrc = lrc_mask(left, right, params.lrc_threshold);
    let acc = acc_mask(left);
    let both: Vec<bool> = lrc.iter().zip(&acc).map(|(a, b)| *a && *b).collect();
    // WMDD is only evaluated where the other two tests already pass
    let keep = wmdd_mask(left, &plane, params, Some(&both));
    Ok(left.masked(&keep))
}

/// Parabola vertex offset from the three costs around the minimum; `None`
/// when the curvature is not positive.
pub fn parabola_offset(c_prev: f64, c_min: f64, c_next: f64) -> Option<f64> {
    let denom = 2.0 * (c_prev - 2.0 * c_min + c_next);
    (denom > 0.0).then(|| ((c_prev - c_next) / denom).clamp(-0.5, 0.5))
}

/// Two-branch ratio offset evaluated as written, clamped to `[-0.5, 0.5]`.
///
/// Equal neighbours are the symmetric case and give offset 0. `None` when
/// the ratio's denominator vanishes.
pub fn literal_offset(c_prev: f64, c_min: f64, c_next: f64) -> Option<f64> {
    if c_prev == c_next {
        return Some(0.0);
    }
    let raw = if c_prev > c_next {
        let denom = c_next - c_min;
        (denom != 0.0).then(|| -0.5 + (c_prev - c_min) / denom)
    } else {
        let denom = c_prev - c_min;
        (denom != 0.0).then(|| -0.5 + (c_next - c_min) / denom)
    };
    raw.filter(|r| r.is_finite()).map(|r| r.clamp(-0.5, 0.5))
}

/// Refines integer disparities using the aggregated cost volume.
///
/// Pixels whose disparity sits on the first or last hypothesis, or whose
/// costs give a degenerate fit, keep their integer value.
pub fn subpixel_refine<T: Cost>(
    disp: &DisparityMap,
    volume: &CostVolume<T>,
    mode: SubpixelMode,
) -> Result<DisparityMap> {
    if volume.width() != disp.width() || volume.height() != disp.height() {
        return Err(Error::DimensionMismatch(format!(
            "cost volume is {}x{}, disparity map is {}x{}",
            volume.width(),
            volume.height(),
            disp.width(),
            disp.height()
        )));
    }
    let nd = volume.d_max();
    let w = disp.width();
    let mut out = disp.clone();
    for i in 0..disp.len() {
        let (x, y) = (i % w, i / w);
        let Some(d) = disp.get(x, y) else { continue };
        if (d - d.round()).abs() > 1e-9 || d.round() as usize >= nd {
            return Err(Error::InvalidInput(format!(
                "pixel ({x},{y}) has disparity {d}, expected an integer below {nd}"
            )));
        }
        let k = d.round() as usize;
        if k == 0 || k + 1 >= nd {
            continue;
        }
        let col = volume.column(x, y);
        let (cp, c0, cn) = (col[k - 1].to_f64(), col[k].to_f64(), col[k + 1].to_f64());
        let offset = match mode {
            SubpixelMode::ParabolaVertex => parabola_offset(cp, c0, cn),
            SubpixelMode::LiteralRatio => literal_offset(cp, c0, cn),
        };
        if let Some(o) = offset {
            out.set(x, y, k as f64 + o);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::BitDepth;
    use proptest::prelude::*;

    fn uniform_guide(w: usize, h: usize) -> MultiBandImage {
        MultiBandImage::from_fn(w, h, 1, BitDepth::Eight, |_, _, _| 128.0).unwrap()
    }

    fn constant_map(w: usize, h: usize, d: f64) -> DisparityMap {
        DisparityMap::from_fn(w, h, |_, _| d).unwrap()
    }

    #[test]
    fn lrc_keeps_consistent_interior() {
        let l = constant_map(20, 4, 5.0);
        let r = constant_map(20, 4, 5.0);
        let out = lrc_filter(&l, &r, 1.0).unwrap();
        for y in 0..4 {
            for x in 0..20 {
                assert_eq!(out.is_valid(x, y), x >= 5, "({x},{y})");
            }
        }
    }

    #[test]
    fn lrc_rejects_inconsistent_and_out_of_range() {
        let mut l = DisparityMap::new(30, 1);
        let mut r = DisparityMap::new(30, 1);
        l.set(20, 0, 10.0);
        r.set(10, 0, 14.0);
        l.set(3, 0, 7.0);
        let out = lrc_filter(&l, &r, 1.0).unwrap();
        assert!(!out.is_valid(20, 0));
        assert!(!out.is_valid(3, 0));
        r.set(10, 0, 10.5);
        assert_eq!(lrc_filter(&l, &r, 1.0).unwrap().get(20, 0), Some(10.0));
    }

    #[test]
    fn lrc_role_swap_flags_mirrored_pixels() {
        // Right-reference maps look up left at x + d; mirroring the row turns
        // that into the left-reference rule.
        let l = DisparityMap::from_fn(12, 1, |x, _| if x == 7 { 4.0 } else { 2.0 }).unwrap();
        let r = DisparityMap::from_fn(12, 1, |_, _| 2.0).unwrap();
        let mirror = |m: &DisparityMap| DisparityMap::from_fn(12, 1, |x, _| m.get(11 - x, 0).unwrap()).unwrap();
        let fwd = lrc_filter(&l, &r, 1.0).unwrap();
        let back = lrc_filter(&mirror(&r), &mirror(&l), 1.0).unwrap();
        assert!(!fwd.is_valid(7, 0));
        // right pixel 5 = 7 - 2 sees left pixel 7 and is inconsistent
        assert!(!back.is_valid(11 - 5, 0));
        assert!(back.is_valid(11 - 4, 0));
    }

    #[test]
    fn acc_keeps_nearest_surface() {
        let mut d = DisparityMap::new(60, 1);
        d.set(43, 0, 3.0);
        d.set(49, 0, 9.0);
        d.set(20, 0, 2.0);
        let out = acc_filter(&d);
        assert_eq!(out.get(49, 0), Some(9.0));
        assert!(!out.is_valid(43, 0));
        assert_eq!(out.get(20, 0), Some(2.0));
    }

    #[test]
    fn acc_leaves_injective_rows_alone() {
        let constant = constant_map(30, 2, 4.0);
        assert_eq!(acc_filter(&constant), constant);
        let monotone = DisparityMap::from_fn(30, 1, |x, _| (30 - x) as f64 * 0.5).unwrap();
        assert_eq!(acc_filter(&monotone), monotone);
    }

    #[test]
    fn wmdd_constant_map_unchanged() {
        let m = constant_map(15, 12, 10.0);
        let p = ConfidencePoolParams { wmdd_window: 5, ..Default::default() };
        assert_eq!(wmdd_filter(&m, &uniform_guide(15, 12), &p).unwrap(), m);
    }

    #[test]
    fn wmdd_removes_isolated_spike() {
        let mut m = constant_map(50, 50, 10.0);
        m.set(25, 25, 50.0);
        let out = wmdd_filter(&m, &uniform_guide(50, 50), &ConfidencePoolParams::default()).unwrap();
        assert!(!out.is_valid(25, 25));
        assert_eq!(out.valid_count(), 50 * 50 - 1);
    }

    #[test]
    fn wmdd_lonely_pixel_survives() {
        let mut m = DisparityMap::new(9, 9);
        m.set(4, 4, 33.3);
        let out = wmdd_filter(&m, &uniform_guide(9, 9), &ConfidencePoolParams::default()).unwrap();
        assert_eq!(out.get(4, 4), Some(33.3));
    }

    #[test]
    fn wmdd_rejects_even_window() {
        let m = constant_map(5, 5, 1.0);
        let p = ConfidencePoolParams { wmdd_window: 40, ..Default::default() };
        assert!(matches!(wmdd_filter(&m, &uniform_guide(5, 5), &p), Err(Error::InvalidParam(_))));
    }

    #[test]
    fn wmdd_guide_edges_shield_other_side() {
        // Left half at d=10 (dark guide), right half at d=20 (bright guide).
        // With a tight sigma a boundary pixel's median comes from its own side.
        let m = DisparityMap::from_fn(20, 9, |x, _| if x < 10 { 10.0 } else { 20.0 }).unwrap();
        let g = MultiBandImage::from_fn(20, 9, 1, BitDepth::Eight, |x, _, _| if x < 10 { 20.0 } else { 200.0 })
            .unwrap();
        let p = ConfidencePoolParams { wmdd_window: 15, wmdd_sigma_color: 5.0, ..Default::default() };
        assert_eq!(wmdd_filter(&m, &g, &p).unwrap(), m);
    }

    #[test]
    fn subpixel_examples() {
        assert_eq!(parabola_offset(6.0, 2.0, 6.0), Some(0.0));
        assert_eq!(literal_offset(6.0, 2.0, 6.0), Some(0.0));
        let o = parabola_offset(10.0, 2.0, 6.0).unwrap();
        assert!((o - 4.0 / 24.0).abs() < 1e-15);
        // as written: -0.5 + 8/4 = 1.5, clamped
        assert_eq!(literal_offset(10.0, 2.0, 6.0), Some(0.5));
        assert_eq!(parabola_offset(3.0, 3.0, 3.0), None);
        assert_eq!(literal_offset(5.0, 2.0, 2.0), None);
    }

    #[test]
    fn parabola_vertex_matches_dense_sampling() {
        // quadratic through (-1, 10), (0, 2), (1, 6), minimized by brute force
        let (a, b, c) = (6.0, -2.0, 2.0);
        let f = |t: f64| a * t * t + b * t + c;
        assert_eq!((f(-1.0), f(0.0), f(1.0)), (10.0, 2.0, 6.0));
        let best = (0..=200_000)
            .map(|i| -1.0 + i as f64 * 1e-5)
            .min_by(|s, t| f(*s).total_cmp(&f(*t)))
            .unwrap();
        assert!((parabola_offset(10.0, 2.0, 6.0).unwrap() - best).abs() < 1e-5);
    }

    #[test]
    fn subpixel_refine_skips_borders_and_invalid() {
        let v = CostVolume::<u16>::from_fn(3, 1, 4, |x, _, d| match (x, d) {
            (1, 0) => 10,
            (1, 1) => 2,
            (1, 2) => 6,
            _ => 50,
        })
        .unwrap();
        let mut disp = DisparityMap::new(3, 1);
        disp.set(0, 0, 0.0);
        disp.set(1, 0, 1.0);
        let out = subpixel_refine(&disp, &v, SubpixelMode::ParabolaVertex).unwrap();
        assert_eq!(out.get(0, 0), Some(0.0));
        assert!((out.get(1, 0).unwrap() - (1.0 + 4.0 / 24.0)).abs() < 1e-12);
        assert_eq!(out.get(2, 0), None);
        let lit = subpixel_refine(&disp, &v, SubpixelMode::LiteralRatio).unwrap();
        assert_eq!(lit.get(1, 0), Some(1.5));
    }

    #[test]
    fn subpixel_refine_rejects_fractional_or_shape_mismatch() {
        let v = CostVolume::<u16>::filled(2, 1, 4, 1).unwrap();
        let mut disp = DisparityMap::new(2, 1);
        disp.set(0, 0, 1.5);
        assert!(subpixel_refine(&disp, &v, SubpixelMode::ParabolaVertex).is_err());
        assert!(subpixel_refine(&DisparityMap::new(3, 1), &v, SubpixelMode::ParabolaVertex).is_err());
    }

    /// Sorting-based weighted median, the reference for the WMDD scan.
    fn weighted_median(samples: &mut [(f64, f64)]) -> f64 {
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = samples.iter().map(|s| s.1).sum();
        let mut cum = 0.0;
        for (v, w) in samples.iter() {
            cum += w;
            if 2.0 * cum >= total {
                return *v;
            }
        }
        samples.last().unwrap().0
    }

    fn wmdd_oracle(m: &DisparityMap, guide: &[f32], p: &ConfidencePoolParams) -> Vec<bool> {
        let (w, h) = (m.width(), m.height());
        let r = (p.wmdd_window / 2) as i64;
        let mut out = vec![false; w * h];
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let Some(d) = m.get(x as usize, y as usize) else { continue };
                let gp = guide[(y as usize) * w + x as usize] as f64;
                let mut samples = Vec::new();
                for qy in (y - r).max(0)..=(y + r).min(h as i64 - 1) {
                    for qx in (x - r).max(0)..=(x + r).min(w as i64 - 1) {
                        if let Some(v) = m.get(qx as usize, qy as usize) {
                            let dg = gp - guide[qy as usize * w + qx as usize] as f64;
                            let wt = (-dg * dg / (2.0 * p.wmdd_sigma_color * p.wmdd_sigma_color)).exp();
                            samples.push((v, wt));
                        }
                    }
                }
                out[y as usize * w + x as usize] = (d - weighted_median(&mut samples)).abs() <= p.wmdd_threshold;
            }
        }
        out
    }

    #[test]
    fn wmdd_matches_sorted_median_on_two_level_guide() {
        let m = DisparityMap::from_fn(16, 10, |x, y| ((x * 7 + y * 3) % 5) as f64 + if x > 8 { 6.0 } else { 0.0 }).unwrap();
        let guide: Vec<f32> = (0..160).map(|i| if i % 16 > 8 { 90.0 } else { 30.0 }).collect();
        let p = ConfidencePoolParams { wmdd_window: 5, ..Default::default() };
        assert_eq!(wmdd_mask(&m, &guide, &p, None), wmdd_oracle(&m, &guide, &p));
    }

    fn arb_map(w: usize, h: usize) -> impl Strategy<Value = DisparityMap> {
        proptest::collection::vec(proptest::option::weighted(0.85, 0u8..12), w * h).prop_map(move |cells| {
            DisparityMap::from_options(w, h, cells.into_iter().map(|c| c.map(f64::from)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn pool_is_intersection_and_mask_only(l in arb_map(14, 6), r in arb_map(14, 6), seed in 0u32..255) {
            let guide = MultiBandImage::from_fn(14, 6, 1, BitDepth::Eight, |x, y, _| ((x * 37 + y * 11 + seed as usize) % 256) as f32).unwrap();
            let p = ConfidencePoolParams { wmdd_window: 5, ..Default::default() };
            let pool = filter_pool(&l, &r, &guide, &p).unwrap();
            let a = lrc_filter(&l, &r, p.lrc_threshold).unwrap();
            let b = acc_filter(&l);
            let c = wmdd_filter(&l, &guide, &p).unwrap();
            for y in 0..6 {
                for x in 0..14 {
                    prop_assert_eq!(pool.is_valid(x, y), a.is_valid(x, y) && b.is_valid(x, y) && c.is_valid(x, y));
                    if let Some(v) = pool.get(x, y) {
                        prop_assert_eq!(v.to_bits(), l.get(x, y).unwrap().to_bits());
                    }
                }
            }
        }

        #[test]
        fn wmdd_scan_matches_sorted_median(m in arb_map(12, 9), frac in prop_oneof![Just(0.0), Just(0.25)]) {
            // a uniform guide makes every weight exactly 1, so sums are exact
            let guide = vec![7.0f32; 12 * 9];
            let p = ConfidencePoolParams { wmdd_window: 7, ..Default::default() };
            let m = DisparityMap::from_options(12, 9, (0..m.len()).map(|i| m.mask()[i].then(|| m.values()[i] + frac)).collect()).unwrap();
            prop_assert_eq!(wmdd_mask(&m, &guide, &p, None), wmdd_oracle(&m, &guide, &p));
        }

        #[test]
        fn subpixel_offset_is_bounded(cp in 0.0f64..100.0, c0 in 0.0f64..100.0, cn in 0.0f64..100.0) {
            for o in [parabola_offset(cp, c0, cn), literal_offset(cp, c0, cn)].into_iter().flatten() {
                prop_assert!(o.abs() <= 0.5);
            }
            if cp == cn {
                prop_assert_eq!(literal_offset(cp, c0, cn), Some(0.0));
            }
        }
    }
}
