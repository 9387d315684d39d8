//! Prominence- and spacing-constrained peak picking.

use super::DspError;
use crate::scalar::Scalar;
use crate::signal::RealSignal;

/// A retained local maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub index: usize,
    /// Sub-sample time from a parabola through the peak and its neighbours.
    pub time: T,
    pub height: T,
    pub prominence: T,
}

/// Local maxima; a flat top reports its first sample. Endpoints never qualify.
fn local_maxima<T: Scalar>(x: &[T]) -> Vec<usize> {
    let mut out = Vec::new();
    let n = x.len();
    let mut i = 1;
    while i + 1 < n {
        if x[i] > x[i - 1] {
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[i] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] < x[i] {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Height above the higher of the two lowest points reached before meeting a
/// strictly higher sample (or the record edge) on each side.
fn prominence<T: Scalar>(x: &[T], peak: usize) -> T {
    let h = x[peak];
    let mut left_min = h;
    for &v in x[..peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[peak + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

fn refine_time<T: Scalar>(signal: &RealSignal<T>, i: usize) -> T {
    let x = &signal.samples;
    let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
    let denom = a - T::lit(2.0) * b + c;
    let delta = if denom < T::zero() {
        (T::lit(0.5) * (a - c) / denom)
            .max(T::lit(-0.5))
            .min(T::lit(0.5))
    } else {
        T::zero()
    };
    signal.t0 + (T::count(i) + delta) / signal.fs
}

/// Peaks at least `min_spacing` seconds apart whose prominence is at least
/// `min_prominence` times the record's range. Taller peaks win spacing
/// conflicts; equal heights resolve to the earlier sample.
pub fn find_peaks<T: Scalar>(
    signal: &RealSignal<T>,
    min_spacing: T,
    min_prominence: T,
) -> Result<Vec<Peak<T>>, DspError> {
    if !(min_spacing > T::zero()) {
        return Err(DspError::InvalidParameter("min_spacing must be > 0".into()));
    }
    let x = &signal.samples;
    if x.len() < 3 {
        return Ok(Vec::new());
    }
    let (lo, hi) = x
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    if !(range > T::zero()) {
        return Ok(Vec::new());
    }
    let threshold = min_prominence * range;

    let mut candidates: Vec<Peak<T>> = local_maxima(x)
        .into_iter()
        .map(|i| Peak {
            index: i,
            time: refine_time(signal, i),
            height: x[i],
            prominence: prominence(x, i),
        })
        .filter(|p| p.prominence >= threshold)
        .collect();

    let spacing = (min_spacing * signal.fs)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX);
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    // stable sort keeps earlier samples first among equal heights
    order.sort_by(|&a, &b| {
        candidates[b]
            .height
            .partial_cmp(&candidates[a].height)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut keep = vec![true; candidates.len()];
    for (rank, &i) in order.iter().enumerate() {
        if !keep[i] {
            continue;
        }
        for &j in &order[rank + 1..] {
            if keep[j] && candidates[i].index.abs_diff(candidates[j].index) < spacing {
                keep[j] = false;
            }
        }
    }
    let mut idx = 0;
    candidates.retain(|_| {
        let k = keep[idx];
        idx += 1;
        k
    });
    Ok(candidates)
}

/// Times of the peaks retained by [`find_peaks`].
pub fn detect_peaks<T: Scalar>(
    signal: &RealSignal<T>,
    min_spacing: T,
    min_prominence: T,
) -> Result<Vec<T>, DspError> {
    Ok(find_peaks(signal, min_spacing, min_prominence)?
        .into_iter()
        .map(|p| p.time)
        .collect())
}
