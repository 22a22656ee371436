use crate::scalar::Scalar;
use crate::trace::LayerTrace;

use super::ScoringError;

/// Mean token-wise cosine similarity between layers `l` and `l + 1`, for
/// `l` in `1..L`. Tokens with a zero vector on either side are skipped;
/// `None` when every token was skipped.
pub fn cosine_baseline<T: Scalar>(trace: &LayerTrace) -> Result<Vec<Option<T>>, ScoringError> {
    let l = trace.layer_count();
    if l < 2 {
        return Err(ScoringError::InvalidParameter(format!(
            "cosine baseline needs at least 2 layers, got {l}"
        )));
    }
    Ok((0..l - 1)
        .map(|layer| {
            let (mut total, mut used) = (T::zero(), 0usize);
            for t in 0..trace.token_count() {
                let (a, b) = (trace.point(layer, t), trace.point(layer + 1, t));
                let (mut dot, mut na, mut nb) = (T::zero(), T::zero(), T::zero());
                for (&x, &y) in a.iter().zip(b) {
                    let (x, y) = (T::of(x as f64), T::of(y as f64));
                    dot = dot + x * y;
                    na = na + x * x;
                    nb = nb + y * y;
                }
                if na > T::zero() && nb > T::zero() {
                    total = total + dot / (na.sqrt() * nb.sqrt());
                    used += 1;
                }
            }
            (used > 0).then(|| total / T::of_usize(used))
        })
        .collect())
}
