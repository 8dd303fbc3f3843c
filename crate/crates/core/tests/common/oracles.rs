//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the library's algorithms.

#![allow(dead_code)]

/// Scanline path aggregation by direct recursion.
///
/// `costs` is indexed `(y * w + x) * nd + d`. For each direction `(dx, dy)`
/// the path through `p` is walked back to the image border and the
/// recurrence is evaluated forward from there in `f64`.
pub fn sgm_bruteforce(costs: &[f64], w: usize, h: usize, nd: usize, p1: f64, p2: f64, dirs: &[(isize, isize)]) -> Vec<f64> {
    let mut total = vec![0.0; costs.len()];
    for &(dx, dy) in dirs {
        let per = path_bruteforce(costs, w, h, nd, p1, p2, dx, dy);
        for (t, v) in total.iter_mut().zip(per) {
            *t += v;
        }
    }
    total
}

#[allow(clippy::too_many_arguments)]
pub fn path_bruteforce(costs: &[f64], w: usize, h: usize, nd: usize, p1: f64, p2: f64, dx: isize, dy: isize) -> Vec<f64> {
    let c = |x: isize, y: isize, d: usize| costs[(y as usize * w + x as usize) * nd + d];
    let inside = |x: isize, y: isize| x >= 0 && y >= 0 && x < w as isize && y < h as isize;
    let mut out = vec![0.0; costs.len()];
    for y in 0..h as isize {
        for x in 0..w as isize {
            // walk back to the first pixel of the path
            let (mut sx, mut sy) = (x, y);
            while inside(sx - dx, sy - dy) {
                sx -= dx;
                sy -= dy;
            }
            let mut l: Vec<f64> = (0..nd).map(|d| c(sx, sy, d)).collect();
            while (sx, sy) != (x, y) {
                sx += dx;
                sy += dy;
                let m = l.iter().cloned().fold(f64::INFINITY, f64::min);
                let next: Vec<f64> = (0..nd)
                    .map(|d| {
                        let mut best = l[d];
                        if d > 0 {
                            best = best.min(l[d - 1] + p1);
                        }
                        if d + 1 < nd {
                            best = best.min(l[d + 1] + p1);
                        }
                        best = best.min(m + p2);
                        c(sx, sy, d) + best - m
                    })
                    .collect();
                l = next;
            }
            for d in 0..nd {
                out[(y as usize * w + x as usize) * nd + d] = l[d];
            }
        }
    }
    out
}

pub const FOUR_DIRS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
pub const EIGHT_DIRS: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)];

/// Census descriptor by definition: bit `i` (row-major over the window,
/// center included) is set iff that neighbor is darker than the center.
pub fn census_bruteforce(px: &[f32], w: usize, h: usize, win_w: usize, win_h: usize) -> Vec<Option<u64>> {
    let (rx, ry) = (win_w / 2, win_h / 2);
    let mut out = vec![None; w * h];
    for y in ry..h.saturating_sub(ry) {
        for x in rx..w.saturating_sub(rx) {
            let center = px[y * w + x];
            let mut bits = 0u64;
            let mut i = 0;
            for wy in 0..win_h {
                for wx in 0..win_w {
                    let v = px[(y + wy - ry) * w + (x + wx - rx)];
                    if v < center {
                        bits |= 1 << i;
                    }
                    i += 1;
                }
            }
            out[y * w + x] = Some(bits);
        }
    }
    out
}

/// Minimizes `f` over the probability simplex by exponentiated gradient
/// descent with a numerical gradient. Perturbed points are renormalized so
/// `f` is only ever evaluated on the simplex. Returns the minimizer.
pub fn minimize_on_simplex(f: impl Fn(&[f64]) -> f64, n: usize, iters: usize, step: f64) -> Vec<f64> {
    let mut p = vec![1.0 / n as f64; n];
    let h = 1e-7;
    for _ in 0..iters {
        let base = f(&p);
        let grad: Vec<f64> = (0..n)
            .map(|k| {
                let mut q = p.clone();
                q[k] += h;
                let s: f64 = q.iter().sum();
                q.iter_mut().for_each(|v| *v /= s);
                (f(&q) - base) / h
            })
            .collect();
        let mut next: Vec<f64> = p.iter().zip(&grad).map(|(pi, g)| pi * (-step * g).exp()).collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        p = next;
    }
    p
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..iters {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) < f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}
