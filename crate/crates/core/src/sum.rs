//! Order-fixed summation so reductions do not depend on thread count.

const LEAF: usize = 128;

/// Pairwise sum over a fixed binary split of the input.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
