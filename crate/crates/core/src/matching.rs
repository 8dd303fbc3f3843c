//! Census transform and Hamming-distance cost volumes.
//!
//! Descriptor bit `i` of pixel `p` is set iff the `i`-th pixel of the window
//! (row-major, center included) is strictly darker than `p`. The center bit
//! is therefore always zero; a 9×7 window gives 63-bit descriptors.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::cost::{Cost, CostVolume};
use crate::error::{Error, Result};
use crate::image::MultiBandImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusWindow {
    pub width: usize,
    pub height: usize,
}

impl Default for CensusWindow {
    fn default() -> Self {
        Self { width: 9, height: 7 }
    }
}

impl CensusWindow {
    pub fn validate(&self) -> Result<()> {
        let ok = self.width % 2 == 1 && self.height % 2 == 1 && self.width * self.height <= 64;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!(
                "census window {}x{} must have odd sides and at most 64 positions",
                self.width, self.height
            )))
        }
    }

    /// Descriptor length in bits; also the cost assigned to impossible matches.
    pub fn bits(&self) -> u16 {
        (self.width * self.height) as u16
    }

    /// Border (horizontal, vertical) where descriptors are undefined.
    pub fn margin(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusImage {
    width: usize,
    height: usize,
    window: CensusWindow,
    descriptors: Vec<u64>,
}

impl CensusImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn window(&self) -> CensusWindow {
        self.window
    }

    #[inline]
    pub fn is_defined(&self, x: usize, y: usize) -> bool {
        let (mx, my) = self.window.margin();
        x >= mx && x + mx < self.width && y >= my && y + my < self.height
    }

    /// Descriptor of `(x, y)`; `None` inside the border margin.
    #[inline]
    pub fn descriptor(&self, x: usize, y: usize) -> Option<u64> {
        self.is_defined(x, y).then(|| self.descriptors[y * self.width + x])
    }
}

pub fn census_transform(img: &MultiBandImage, window: CensusWindow) -> Result<CensusImage> {
    window.validate()?;
    if img.bands() != 1 {
        return Err(Error::BandMismatch {
            expected: 1,
            found: img.bands(),
        });
    }
    let (w, h) = (img.width(), img.height());
    if w < window.width || h < window.height {
        return Err(Error::InvalidInput(format!(
            "{w}x{h} image is smaller than the {}x{} census window",
            window.width, window.height
        )));
    }
    let (mx, my) = window.margin();
    let px = img.data();
    let mut descriptors = vec![0u64; w * h];
    descriptors
        .par_chunks_mut(w)
        .enumerate()
        .filter(|(y, _)| *y >= my && *y + my < h)
        .for_each(|(y, row)| {
            for x in mx..w - mx {
                let center = px[y * w + x];
                let mut bits = 0u64;
                let mut i = 0;
                for wy in y - my..=y + my {
                    let line = &px[wy * w + x - mx..=wy * w + x + mx];
                    for v in line {
                        bits |= ((*v < center) as u64) << i;
                        i += 1;
                    }
                }
                row[x] = bits;
            }
        });
    Ok(CensusImage {
        width: w,
        height: h,
        window,
        descriptors,
    })
}

/// Which image the cost volume is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reference {
    /// cost(x, y, d) compares left(x) with right(x - d).
    Left,
    /// cost(x, y, d) compares right(x) with left(x + d).
    Right,
}

fn check_pair(left: &CensusImage, right: &CensusImage, d_max: usize) -> Result<()> {
    if d_max == 0 {
        return Err(Error::InvalidParam("d_max must be >= 1".into()));
    }
    if left.width != right.width || left.height != right.height {
        return Err(Error::DimensionMismatch(format!(
            "census images are {}x{} and {}x{}",
            left.width, left.height, right.width, right.height
        )));
    }
    if left.window != right.window {
        return Err(Error::InvalidParam("census images use different windows".into()));
    }
    Ok(())
}

/// Fills one row of a cost volume, calling `emit(index, cost)` per cell.
#[inline]
fn row_costs(
    reference: &CensusImage,
    target: &CensusImage,
    side: Reference,
    y: usize,
    d_max: usize,
    mut emit: impl FnMut(usize, u16),
) {
    let w = reference.width;
    let max_cost = reference.window.bits();
    for x in 0..w {
        let base = x * d_max;
        let Some(r) = reference.descriptor(x, y) else {
            for d in 0..d_max {
                emit(base + d, max_cost);
            }
            continue;
        };
        for d in 0..d_max {
            let tx = match side {
                Reference::Left => x.checked_sub(d),
                Reference::Right => Some(x + d).filter(|t| *t < w),
            };
            let cost = match tx.and_then(|tx| target.descriptor(tx, y)) {
                Some(t) => (r ^ t).count_ones() as u16,
                None => max_cost,
            };
            emit(base + d, cost);
        }
    }
}

fn dsi(left: &CensusImage, right: &CensusImage, d_max: usize, side: Reference) -> Result<CostVolume<u16>> {
    check_pair(left, right, d_max)?;
    let (reference, target) = match side {
        Reference::Left => (left, right),
        Reference::Right => (right, left),
    };
    let w = left.width;
    let mut costs = vec![0u16; w * left.height * d_max];
    costs.par_chunks_mut(w * d_max).enumerate().for_each(|(y, row)| {
        row_costs(reference, target, side, y, d_max, |i, c| row[i] = c);
    });
    Ok(CostVolume::from_raw(w, left.height, d_max, costs))
}

/// Hamming cost volume with the left image as reference.
///
/// Matches falling outside the right image or touching an undefined border
/// descriptor get the maximal cost (the descriptor length).
pub fn compute_dsi(left: &CensusImage, right: &CensusImage, d_max: usize) -> Result<CostVolume<u16>> {
    dsi(left, right, d_max, Reference::Left)
}

/// Hamming cost volume with the right image as reference: `cost(x, y, d)`
/// compares `right(x)` with `left(x + d)`.
pub fn compute_right_dsi(left: &CensusImage, right: &CensusImage, d_max: usize) -> Result<CostVolume<u16>> {
    dsi(left, right, d_max, Reference::Right)
}

fn accumulate(
    acc: &mut CostVolume<u16>,
    left: &CensusImage,
    right: &CensusImage,
    side: Reference,
) -> Result<()> {
    let d_max = acc.d_max();
    check_pair(left, right, d_max)?;
    if acc.width() != left.width || acc.height() != left.height {
        return Err(Error::DimensionMismatch("accumulator and census images differ in size".into()));
    }
    let (reference, target) = match side {
        Reference::Left => (left, right),
        Reference::Right => (right, left),
    };
    let overflow = AtomicBool::new(false);
    let w = left.width;
    acc.costs_mut().par_chunks_mut(w * d_max).enumerate().for_each(|(y, row)| {
        let mut bad = false;
        row_costs(reference, target, side, y, d_max, |i, c| match row[i].checked_add(c) {
            Some(s) => row[i] = s,
            None => bad = true,
        });
        if bad {
            overflow.store(true, Ordering::Relaxed);
        }
    });
    if overflow.load(Ordering::Relaxed) {
        return Err(Error::OutOfRange("integrated cost volume overflowed 16 bits".into()));
    }
    Ok(())
}

/// Adds the left-reference DSI of one pair into `acc` without materializing it.
pub fn accumulate_dsi(acc: &mut CostVolume<u16>, left: &CensusImage, right: &CensusImage) -> Result<()> {
    accumulate(acc, left, right, Reference::Left)
}

/// Right-reference counterpart of [`accumulate_dsi`].
pub fn accumulate_right_dsi(acc: &mut CostVolume<u16>, left: &CensusImage, right: &CensusImage) -> Result<()> {
    accumulate(acc, left, right, Reference::Right)
}

/// Space-time integration: element-wise sum of per-pattern volumes.
pub fn integrate_dsi<T: Cost>(volumes: &[CostVolume<T>]) -> Result<CostVolume<T>> {
    let (first, rest) = volumes
        .split_first()
        .ok_or_else(|| Error::InvalidInput("no cost volumes to integrate".into()))?;
    let mut sum = first.clone();
    for v in rest {
        sum.accumulate(v)?;
    }
    Ok(sum)
}
