//! Disparity space images: `W × H × D` matching costs.

use std::fmt::Debug;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

/// Numeric type usable as a matching cost.
///
/// `Wide` is the accumulator type SGM aggregates into, wide enough to hold
/// the sum of eight path costs over temporally integrated inputs.
pub trait Cost:
    Copy + Send + Sync + Debug + Default + PartialOrd + Add<Output = Self> + Sub<Output = Self> + 'static
{
    type Wide: Cost;

    fn widen(self) -> Self::Wide;
    fn to_f64(self) -> f64;
    /// Exact conversion; `None` when `v` is not representable.
    fn from_f64(v: f64) -> Option<Self>;
    fn checked_sum(self, other: Self) -> Option<Self>;
    /// Finite and non-negative.
    fn is_admissible(self) -> bool;
}

macro_rules! int_cost {
    ($t:ty, $wide:ty) => {
        impl Cost for $t {
            type Wide = $wide;
            #[inline]
            fn widen(self) -> $wide {
                self as $wide
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn from_f64(v: f64) -> Option<Self> {
                (v >= 0.0 && v.fract() == 0.0 && v <= <$t>::MAX as f64).then(|| v as $t)
            }
            #[inline]
            fn checked_sum(self, other: Self) -> Option<Self> {
                self.checked_add(other)
            }
            #[inline]
            fn is_admissible(self) -> bool {
                true
            }
        }
    };
}

macro_rules! float_cost {
    ($t:ty, $wide:ty) => {
        impl Cost for $t {
            type Wide = $wide;
            #[inline]
            fn widen(self) -> $wide {
                self as $wide
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn from_f64(v: f64) -> Option<Self> {
                let c = v as $t;
                (c as f64 == v).then_some(c)
            }
            #[inline]
            fn checked_sum(self, other: Self) -> Option<Self> {
                let s = self + other;
                s.is_finite().then_some(s)
            }
            #[inline]
            fn is_admissible(self) -> bool {
                self.is_finite() && self >= 0.0
            }
        }
    };
}

int_cost!(u8, u32);
int_cost!(u16, u32);
int_cost!(u32, u64);
int_cost!(u64, u64);
float_cost!(f32, f64);
float_cost!(f64, f64);

/// Matching costs indexed by `(x, y, d)` with `d` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVolume<T> {
    width: usize,
    height: usize,
    d_max: usize,
    costs: Vec<T>,
}

impl<T: Cost> CostVolume<T> {
    pub fn new(width: usize, height: usize, d_max: usize, costs: Vec<T>) -> Result<Self> {
        if d_max == 0 {
            return Err(Error::InvalidParam("cost volume needs d_max >= 1".into()));
        }
        if costs.len() != width * height * d_max {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height}x{d_max} volume needs {} costs, got {}",
                width * height * d_max,
                costs.len()
            )));
        }
        if let Some(bad) = costs.iter().find(|c| !c.is_admissible()) {
            return Err(Error::OutOfRange(format!("cost {bad:?} is negative or non-finite")));
        }
        Ok(Self {
            width,
            height,
            d_max,
            costs,
        })
    }

    pub fn filled(width: usize, height: usize, d_max: usize, value: T) -> Result<Self> {
        Self::new(width, height, d_max, vec![value; width * height * d_max])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        d_max: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut costs = Vec::with_capacity(width * height * d_max);
        for y in 0..height {
            for x in 0..width {
                for d in 0..d_max {
                    costs.push(f(x, y, d));
                }
            }
        }
        Self::new(width, height, d_max, costs)
    }

    pub(crate) fn from_raw(width: usize, height: usize, d_max: usize, costs: Vec<T>) -> Self {
        debug_assert_eq!(costs.len(), width * height * d_max);
        Self {
            width,
            height,
            d_max,
            costs,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of disparity hypotheses; valid disparities are `0..d_max`.
    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn costs(&self) -> &[T] {
        &self.costs
    }

    pub(crate) fn costs_mut(&mut self) -> &mut [T] {
        &mut self.costs
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, d: usize) -> T {
        self.costs[(y * self.width + x) * self.d_max + d]
    }

    /// All `d_max` costs of pixel `(x, y)`.
    #[inline]
    pub fn column(&self, x: usize, y: usize) -> &[T] {
        let start = (y * self.width + x) * self.d_max;
        &self.costs[start..start + self.d_max]
    }

    pub fn same_shape<U>(&self, other: &CostVolume<U>) -> bool {
        self.width == other.width && self.height == other.height && self.d_max == other.d_max
    }

    /// Element-wise `self += other`; fails on shape mismatch or overflow.
    pub fn accumulate(&mut self, other: &CostVolume<T>) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{}x{} volume to {}x{}x{} volume",
                other.width, other.height, other.d_max, self.width, self.height, self.d_max
            )));
        }
        for (a, b) in self.costs.iter_mut().zip(&other.costs) {
            *a = a
                .checked_sum(*b)
                .ok_or_else(|| Error::OutOfRange("cost accumulation overflowed".into()))?;
        }
        Ok(())
    }
}
