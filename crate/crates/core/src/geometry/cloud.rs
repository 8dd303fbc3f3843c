use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::rectify::RectificationSetup;
use crate::disparity::DisparityMap;
use crate::error::{Error, Result};
use crate::io_util::write_atomic;

/// A back-projected point tagged with the pixel it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub position: [f64; 3],
    pub pixel: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<CloudPoint>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Pinhole back-projection of every valid pixel with `d > 0`, in the
/// rectified left camera frame.
pub fn project_to_cloud(disp: &DisparityMap, setup: &RectificationSetup) -> PointCloud {
    let f = setup.focal;
    let [cx, cy] = setup.principal_point;
    let mut points = Vec::with_capacity(disp.valid_count());
    for y in 0..disp.height() {
        for x in 0..disp.width() {
            let Some(d) = disp.get(x, y).filter(|d| *d > 0.0) else {
                continue;
            };
            let z = f * setup.baseline / d;
            points.push(CloudPoint {
                position: [(x as f64 - cx) * z / f, (y as f64 - cy) * z / f, z],
                pixel: (x, y),
            });
        }
    }
    PointCloud { points }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleaningOutcome {
    pub kept: PointCloud,
    /// Pixel tags of the discarded points.
    pub removed: Vec<(usize, usize)>,
}

type Cell = (i64, i64, i64);

fn cell_of(p: &[f64; 3], size: f64) -> Cell {
    (
        (p[0] / size).floor() as i64,
        (p[1] / size).floor() as i64,
        (p[2] / size).floor() as i64,
    )
}

/// Drops points with fewer than `min_neighbors` other points within
/// `radius`. Removal repeats until no point changes, so applying the
/// function to its own output removes nothing.
pub fn remove_isolated_points(cloud: &PointCloud, radius: f64, min_neighbors: usize) -> Result<CleaningOutcome> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParam(format!("cleaning radius {radius} must be > 0")));
    }
    let pts = &cloud.points;
    let mut grid: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        grid.entry(cell_of(&p.position, radius)).or_default().push(i);
    }
    let r2 = radius * radius;
    let mut alive = vec![true; pts.len()];
    loop {
        let doomed: Vec<usize> = (0..pts.len())
            .filter(|&i| alive[i] && !has_neighbors(i, pts, &alive, &grid, radius, r2, min_neighbors))
            .collect();
        if doomed.is_empty() {
            break;
        }
        for i in doomed {
            alive[i] = false;
        }
    }
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (p, a) in pts.iter().zip(&alive) {
        if *a {
            kept.push(*p);
        } else {
            removed.push(p.pixel);
        }
    }
    Ok(CleaningOutcome {
        kept: PointCloud { points: kept },
        removed,
    })
}

fn has_neighbors(
    i: usize,
    pts: &[CloudPoint],
    alive: &[bool],
    grid: &HashMap<Cell, Vec<usize>>,
    radius: f64,
    r2: f64,
    needed: usize,
) -> bool {
    if needed == 0 {
        return true;
    }
    let p = pts[i].position;
    let (cx, cy, cz) = cell_of(&p, radius);
    let mut found = 0;
    for dz in -1..=1 {
        for dy in -1..=1 {
            for dx in -1..=1 {
                let Some(bucket) = grid.get(&(cx + dx, cy + dy, cz + dz)) else {
                    continue;
                };
                for &j in bucket {
                    if j == i || !alive[j] {
                        continue;
                    }
                    let q = pts[j].position;
                    let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                    if d2 <= r2 {
                        found += 1;
                        if found >= needed {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Serializes the cloud as ASCII PLY with the pixel tags as extra
/// properties.
pub fn ply_string(cloud: &PointCloud) -> String {
    let mut s = String::new();
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(s, "element vertex {}", cloud.len());
    s.push_str("property double x\nproperty double y\nproperty double z\n");
    s.push_str("property int u\nproperty int v\nend_header\n");
    for p in &cloud.points {
        let [x, y, z] = p.position;
        let _ = writeln!(s, "{x} {y} {z} {} {}", p.pixel.0, p.pixel.1);
    }
    s
}

pub fn write_ply(cloud: &PointCloud, path: &Path) -> Result<()> {
    write_atomic(path, ply_string(cloud).as_bytes())
}
