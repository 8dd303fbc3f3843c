//! Semi-global matching: scanline cost aggregation and winner-takes-all.
//!
//! Every path `r` runs the recurrence
//!
//! ```text
//! L_r(p, d) = C(p, d) + min(L_r(p-r, d),
//!                           L_r(p-r, d-1) + P1,
//!                           L_r(p-r, d+1) + P1,
//!                           min_k L_r(p-r, k) + P2) - min_k L_r(p-r, k)
//! ```
//!
//! starting from `L_r = C` at the first pixel of each scanline, and the
//! aggregated volume is `S = Σ_r L_r`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{Cost, CostVolume};
use crate::disparity::DisparityMap;
use crate::error::{Error, Result};

/// Scanline direction; the predecessor of `p` is `p - (dx, dy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Direction {
    pub dx: isize,
    pub dy: isize,
}

const FOUR: [Direction; 4] = [
    Direction { dx: 1, dy: 0 },
    Direction { dx: -1, dy: 0 },
    Direction { dx: 0, dy: 1 },
    Direction { dx: 0, dy: -1 },
];

const EIGHT: [Direction; 8] = [
    Direction { dx: 1, dy: 0 },
    Direction { dx: -1, dy: 0 },
    Direction { dx: 0, dy: 1 },
    Direction { dx: 0, dy: -1 },
    Direction { dx: 1, dy: 1 },
    Direction { dx: -1, dy: 1 },
    Direction { dx: 1, dy: -1 },
    Direction { dx: -1, dy: -1 },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum PathSet {
    Four,
    Eight,
}

impl PathSet {
    pub fn directions(self) -> &'static [Direction] {
        match self {
            PathSet::Four => &FOUR,
            PathSet::Eight => &EIGHT,
        }
    }
}

impl TryFrom<u8> for PathSet {
    type Error = String;

    fn try_from(n: u8) -> std::result::Result<Self, String> {
        match n {
            4 => Ok(PathSet::Four),
            8 => Ok(PathSet::Eight),
            n => Err(format!("path count must be 4 or 8, got {n}")),
        }
    }
}

impl From<PathSet> for u8 {
    fn from(p: PathSet) -> u8 {
        match p {
            PathSet::Four => 4,
            PathSet::Eight => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SgmParams {
    pub p1: f64,
    pub p2: f64,
    pub paths: PathSet,
}

impl Default for SgmParams {
    /// Penalties on the 0–63 census scale; not rescaled for integrated volumes.
    fn default() -> Self {
        Self {
            p1: 7.0,
            p2: 100.0,
            paths: PathSet::Eight,
        }
    }
}

impl SgmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p1.is_finite() && self.p2.is_finite() && 0.0 <= self.p1 && self.p1 <= self.p2) {
            return Err(Error::InvalidParam(format!(
                "SGM penalties must satisfy 0 <= P1 <= P2, got P1={} P2={}",
                self.p1, self.p2
            )));
        }
        Ok(())
    }
}

#[inline(always)]
fn min<W: PartialOrd>(a: W, b: W) -> W {
    if b < a {
        b
    } else {
        a
    }
}

/// One recurrence step; writes `L(p, ·)` into `out` and returns its minimum.
#[inline(always)]
fn step<T: Cost>(cost: &[T], prev: &[T::Wide], prev_min: T::Wide, p1: T::Wide, p2: T::Wide, out: &mut [T::Wide]) -> T::Wide {
    let n = cost.len();
    let jump = prev_min + p2;
    let mut best = None::<T::Wide>;
    for d in 0..n {
        let mut m = min(prev[d], jump);
        if d > 0 {
            m = min(m, prev[d - 1] + p1);
        }
        if d + 1 < n {
            m = min(m, prev[d + 1] + p1);
        }
        let v = cost[d].widen() + m - prev_min;
        out[d] = v;
        best = Some(best.map_or(v, |b| min(b, v)));
    }
    best.expect("d_max >= 1")
}

#[inline(always)]
fn start<T: Cost>(cost: &[T], out: &mut [T::Wide]) -> T::Wide {
    let mut best = cost[0].widen();
    for (o, c) in out.iter_mut().zip(cost) {
        *o = c.widen();
        best = min(best, *o);
    }
    best
}

fn penalties<T: Cost>(params: &SgmParams) -> Result<(T::Wide, T::Wide)> {
    params.validate()?;
    let conv = |p: f64, name: &str| {
        <T::Wide as Cost>::from_f64(p).ok_or_else(|| {
            Error::InvalidParam(format!("{name}={p} is not representable in the cost type"))
        })
    };
    Ok((conv(params.p1, "P1")?, conv(params.p2, "P2")?))
}

/// Path cost volume `L_r` for a single direction.
pub fn path_costs<T: Cost>(
    volume: &CostVolume<T>,
    params: &SgmParams,
    dir: Direction,
) -> Result<CostVolume<T::Wide>> {
    let (p1, p2) = penalties::<T>(params)?;
    let mut out = vec![<T::Wide>::default(); volume.costs().len()];
    run_path(volume, dir, p1, p2, &mut out, false);
    Ok(CostVolume::from_raw(volume.width(), volume.height(), volume.d_max(), out))
}

/// Aggregates `volume` over the configured scanline directions.
pub fn sgm_aggregate<T: Cost>(volume: &CostVolume<T>, params: &SgmParams) -> Result<CostVolume<T::Wide>> {
    let (p1, p2) = penalties::<T>(params)?;
    let mut sum = vec![<T::Wide>::default(); volume.costs().len()];
    for dir in params.paths.directions() {
        run_path(volume, *dir, p1, p2, &mut sum, true);
    }
    Ok(CostVolume::from_raw(volume.width(), volume.height(), volume.d_max(), sum))
}

/// Runs one direction, either writing (`add = false`) or adding (`add = true`)
/// the path costs into `target`. Each target cell is touched by exactly one
/// task, so the result does not depend on the thread count.
fn run_path<T: Cost>(
    volume: &CostVolume<T>,
    dir: Direction,
    p1: T::Wide,
    p2: T::Wide,
    target: &mut [T::Wide],
    add: bool,
) {
    let (w, h, nd) = (volume.width(), volume.height(), volume.d_max());
    let costs = volume.costs();
    let row_len = w * nd;
    let emit = |dst: &mut [T::Wide], src: &[T::Wide]| {
        if add {
            for (a, b) in dst.iter_mut().zip(src) {
                *a = *a + *b;
            }
        } else {
            dst.copy_from_slice(src);
        }
    };

    if dir.dy == 0 {
        target.par_chunks_mut(row_len).enumerate().for_each(|(y, out_row)| {
            let cost_row = &costs[y * row_len..(y + 1) * row_len];
            let mut prev = vec![<T::Wide>::default(); nd];
            let mut cur = vec![<T::Wide>::default(); nd];
            let mut prev_min = <T::Wide>::default();
            for i in 0..w {
                let x = if dir.dx > 0 { i } else { w - 1 - i };
                let c = &cost_row[x * nd..(x + 1) * nd];
                prev_min = if i == 0 {
                    start(c, &mut cur)
                } else {
                    step(c, &prev, prev_min, p1, p2, &mut cur)
                };
                emit(&mut out_row[x * nd..(x + 1) * nd], &cur);
                std::mem::swap(&mut prev, &mut cur);
            }
        });
        return;
    }

    const CHUNK: usize = 64;
    let mut prev = vec![<T::Wide>::default(); row_len];
    let mut cur = vec![<T::Wide>::default(); row_len];
    let mut prev_min = vec![<T::Wide>::default(); w];
    let mut cur_min = vec![<T::Wide>::default(); w];
    for i in 0..h {
        let y = if dir.dy > 0 { i } else { h - 1 - i };
        let cost_row = &costs[y * row_len..(y + 1) * row_len];
        let out_row = &mut target[y * row_len..(y + 1) * row_len];
        let (prev_ref, prev_min_ref) = (&prev, &prev_min);
        cur.par_chunks_mut(CHUNK * nd)
            .zip(cur_min.par_chunks_mut(CHUNK))
            .zip(out_row.par_chunks_mut(CHUNK * nd))
            .enumerate()
            .for_each(|(chunk, ((cur_c, min_c), out_c))| {
                for (j, m) in min_c.iter_mut().enumerate() {
                    let x = chunk * CHUNK + j;
                    let c = &cost_row[x * nd..(x + 1) * nd];
                    let l = &mut cur_c[j * nd..(j + 1) * nd];
                    let px = x as isize - dir.dx;
                    *m = if i == 0 || px < 0 || px >= w as isize {
                        start(c, l)
                    } else {
                        let px = px as usize;
                        step(c, &prev_ref[px * nd..(px + 1) * nd], prev_min_ref[px], p1, p2, l)
                    };
                    emit(&mut out_c[j * nd..(j + 1) * nd], l);
                }
            });
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut prev_min, &mut cur_min);
    }
}

/// Winner-takes-all: per pixel, the smallest disparity with minimal cost.
pub fn wta<T: Cost>(volume: &CostVolume<T>) -> DisparityMap {
    let (w, h, nd) = (volume.width(), volume.height(), volume.d_max());
    let values: Vec<f64> = volume
        .costs()
        .par_chunks(nd)
        .map(|col| {
            let mut best = 0;
            for d in 1..nd {
                if col[d] < col[best] {
                    best = d;
                }
            }
            best as f64
        })
        .collect();
    DisparityMap::from_parts(w, h, values, vec![true; w * h])
}
