use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Instantaneous phase per sample, in (−π, π].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries<T> {
    pub phases: Vec<T>,
}

impl<T: Real> PhaseSeries<T> {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Reusable FFT plans for analytic-signal phase extraction at one length.
pub struct PhaseExtractor<T: Real> {
    len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> PhaseExtractor<T> {
    pub fn new(len: usize) -> Result<Self> {
        if len < 4 {
            return Err(Error::InvalidArgument(format!("analytic phase needs >= 4 samples, got {len}")));
        }
        let mut planner = FftPlanner::new();
        Ok(PhaseExtractor {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Analytic signal: positive-frequency bins doubled, DC and Nyquist kept,
    /// negative bins zeroed.
    pub fn analytic(&self, series: &[T]) -> Result<Vec<Complex<T>>> {
        if series.len() != self.len {
            return Err(Error::Dimension(format!(
                "extractor planned for {} samples, got {}",
                self.len,
                series.len()
            )));
        }
        if series.iter().all(|&v| v == T::zero()) {
            return Err(Error::InvalidArgument("phase is undefined for an all-zero series".into()));
        }
        let n = self.len;
        let mut buf: Vec<Complex<T>> = series.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward.process(&mut buf);
        let two = T::lit(2.0);
        let half = n / 2;
        for (k, b) in buf.iter_mut().enumerate() {
            let keep_single = k == 0 || (n.is_multiple_of(2) && k == half);
            if keep_single {
                continue;
            }
            if k <= (n - 1) / 2 {
                *b *= two;
            } else {
                *b = Complex::new(T::zero(), T::zero());
            }
        }
        self.inverse.process(&mut buf);
        let scale = T::one() / T::from_count(n);
        Ok(buf.into_iter().map(|c| c * scale).collect())
    }

    pub fn phase(&self, series: &[T]) -> Result<PhaseSeries<T>> {
        let pi = T::PI();
        let phases = self
            .analytic(series)?
            .into_iter()
            .map(|c| {
                let p = c.im.atan2(c.re);
                if p == -pi {
                    pi
                } else {
                    p
                }
            })
            .collect();
        Ok(PhaseSeries { phases })
    }
}

pub fn analytic_phase<T: Real>(series: &[T]) -> Result<PhaseSeries<T>> {
    PhaseExtractor::new(series.len())?.phase(series)
}

/// Sign of sin(d), evaluated by interval tests for |d| < 2π.
#[inline]
pub fn lag_sign<T: Real>(d: T) -> i32 {
    let pi = T::PI();
    let ad = d.abs();
    if d == T::zero() {
        return 0;
    }
    let below_pi = if ad == pi {
        // the rounded constant sits on one side of true π
        pi.sin() > T::zero()
    } else if ad < T::lit(2.0) * pi {
        ad < pi
    } else {
        let s = d.sin();
        return if s > T::zero() {
            1
        } else if s < T::zero() {
            -1
        } else {
            0
        };
    };
    let s = if below_pi { 1 } else { -1 };
    if d > T::zero() {
        s
    } else {
        -s
    }
}

/// Count of lag signs over a pair of phase slices.
#[inline]
/// Sum of `lag_sign(px[k] - py[k])`. Branch-free for differences below 2π
/// (always the case for wrapped phases); falls back to `lag_sign` otherwise.
pub(crate) fn lag_sign_sum<T: Real>(px: &[T], py: &[T]) -> i64 {
    let pi = T::PI();
    let two_pi = pi + pi;
    let pi_counts_below = pi.sin() > T::zero();
    let mut total = 0i64;
    let mut wide = false;
    for (&a, &b) in px.iter().zip(py) {
        let d = a - b;
        let ad = d.abs();
        let sgn = (d > T::zero()) as i64 - (d < T::zero()) as i64;
        let beyond = ad > pi || (ad == pi && !pi_counts_below);
        total += if beyond { -sgn } else { sgn };
        wide |= ad >= two_pi;
    }
    if wide {
        return px.iter().zip(py).map(|(&a, &b)| lag_sign(a - b) as i64).sum();
    }
    total
}

/// Phase lag index `|⟨sign(sin Δφ)⟩|`.
pub fn pli<T: Real>(px: &[T], py: &[T]) -> Result<T> {
    if px.len() != py.len() {
        return Err(Error::Dimension(format!(
            "phase series lengths differ: {} vs {}",
            px.len(),
            py.len()
        )));
    }
    if px.len() < 2 {
        return Err(Error::InvalidArgument("PLI needs >= 2 samples".into()));
    }
    let total = lag_sign_sum(px, py);
    Ok(T::from_i64(total.abs()).expect("count") / T::from_count(px.len()))
}
