use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal_io::Epoch;

/// Subtracts the across-channel mean at every sample index.
///
/// After subtraction the last channel is set to the negated running sum of
/// the others, so the output columns sum to exactly zero in sequential
/// floating-point order. Re-applying is then an exact no-op.
pub fn average_reference<T: Real>(epoch: &Epoch<T>) -> Result<Epoch<T>> {
    let channels = epoch.channels();
    if channels < 2 {
        return Err(Error::InvalidArgument(format!(
            "average reference needs >= 2 channels, got {channels}"
        )));
    }
    let mut out = epoch.clone();
    let inv = T::one() / T::from_count(channels);
    let mut column = vec![T::zero(); channels];
    for s in 0..out.len() {
        for (c, v) in column.iter_mut().enumerate() {
            *v = out.data[(c, s)];
        }
        let mean = sequential_sum(&column) * inv;
        if mean != T::zero() {
            for v in column.iter_mut() {
                *v -= mean;
            }
            let head = sequential_sum(&column[..channels - 1]);
            column[channels - 1] = -head;
        }
        for (c, v) in column.iter().enumerate() {
            out.data[(c, s)] = *v;
        }
    }
    Ok(out)
}

fn sequential_sum<T: Real>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, &v| acc + v)
}
