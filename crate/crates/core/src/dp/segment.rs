use crate::error::{Error, Result};
use crate::scorer::{Observation, Scorer};

use super::MaxPlusMatrix;

/// One-step matrix `m[i][j] = q(next, j | prev, i)`.
pub fn segment_step_matrix<S: Scorer + ?Sized>(model: &S, prev: &Observation, next: &Observation) -> MaxPlusMatrix<S::W> {
    MaxPlusMatrix::from_row_major(model.num_states(), model.step_weights(prev, next))
}

/// `m[i][j] = max` over paths with `y_first = i`, `y_last = j` of the product of
/// the kernel terms inside the segment (no initial density). A single
/// observation gives the max-plus identity.
pub fn segment_max<S: Scorer + ?Sized>(model: &S, segment: &[Observation]) -> Result<MaxPlusMatrix<S::W>> {
    if segment.is_empty() {
        return Err(Error::InvalidArgument("segment is empty".into()));
    }
    model.check_observations(segment)?;
    Ok(segment
        .windows(2)
        .fold(MaxPlusMatrix::identity(model.num_states()), |acc, w| {
            acc.mul(&segment_step_matrix(model, &w[0], &w[1]))
        }))
}
