//! Digital Butterworth bandpass as a cascade of second-order sections.
//!
//! The analog lowpass prototype of order `n` is mapped to a bandpass
//! (2n poles) and discretized with the bilinear transform, pre-warping both
//! band edges. Each conjugate pole pair becomes one section with numerator
//! `1 - z^-2` (one zero at z = 1, one at z = -1).

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal_io::Recording;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandpassSpec {
    pub low_cut: f64,
    pub high_cut: f64,
    /// Order of the lowpass prototype; the bandpass has twice as many poles.
    pub order: usize,
}

impl Default for BandpassSpec {
    fn default() -> Self {
        BandpassSpec {
            low_cut: 0.5,
            high_cut: 40.0,
            order: 4,
        }
    }
}

impl BandpassSpec {
    pub fn validate(&self, fs: f64) -> Result<()> {
        if !(fs > 0.0) {
            return Err(Error::Design(format!("sample rate {fs} must be > 0")));
        }
        if !(self.low_cut > 0.0 && self.low_cut < self.high_cut) {
            return Err(Error::Design(format!(
                "need 0 < low_cut < high_cut, got {} and {}",
                self.low_cut, self.high_cut
            )));
        }
        if self.high_cut >= fs / 2.0 {
            return Err(Error::Design(format!(
                "high_cut {} must be below Nyquist {}",
                self.high_cut,
                fs / 2.0
            )));
        }
        if self.order < 2 || !self.order.is_multiple_of(2) {
            return Err(Error::Design(format!("order {} must be even and >= 2", self.order)));
        }
        Ok(())
    }
}

/// Transposed direct-form II biquad with `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Section {
    /// Both poles strictly inside the unit circle (Jury criterion).
    pub fn is_stable(&self) -> bool {
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }

    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSections {
    pub sections: Vec<Section>,
    pub gain: f64,
}

impl FilterSections {
    /// Number of poles of the cascade.
    pub fn pole_count(&self) -> usize {
        2 * self.sections.len()
    }

    pub fn is_stable(&self) -> bool {
        self.sections.iter().all(Section::is_stable)
    }

    /// Steady-state section states for a unit step at the input, one
    /// `(z1, z2)` pair per section.
    fn step_states(&self) -> Vec<(f64, f64)> {
        let mut level = self.gain;
        self.sections
            .iter()
            .map(|s| {
                let out = level * s.dc_gain();
                let z2 = level * s.b2 - s.a2 * out;
                let z1 = level * s.b1 - s.a1 * out + z2;
                level = out;
                (z1, z2)
            })
            .collect()
    }

    /// The recursion always runs in f64: the low-cut poles sit close to
    /// z = 1 and f32 state arithmetic drifts visibly.
    fn run(&self, buf: &mut [f64], x0: f64) {
        let mut states: Vec<(f64, f64)> = self.step_states().into_iter().map(|(z1, z2)| (z1 * x0, z2 * x0)).collect();
        for v in buf.iter_mut() {
            let mut x = *v * self.gain;
            for (c, (z1, z2)) in self.sections.iter().zip(states.iter_mut()) {
                let y = c.b0 * x + *z1;
                *z1 = c.b1 * x - c.a1 * y + *z2;
                *z2 = c.b2 * x - c.a2 * y;
                x = y;
            }
            *v = x;
        }
    }
}

/// Designs the bandpass for sample rate `fs`, normalized to unit gain at the
/// digital image of the analog geometric center frequency.
pub fn design_bandpass(spec: &BandpassSpec, fs: f64) -> Result<FilterSections> {
    spec.validate(fs)?;
    let n = spec.order;
    let k = 2.0 * fs;
    let w_lo = k * (std::f64::consts::PI * spec.low_cut / fs).tan();
    let w_hi = k * (std::f64::consts::PI * spec.high_cut / fs).tan();
    let bw = w_hi - w_lo;
    let w0_sq = w_lo * w_hi;

    let mut sections = Vec::with_capacity(n);
    for i in 0..n {
        let theta = std::f64::consts::PI * (2 * i + n + 1) as f64 / (2 * n) as f64;
        let proto = Complex64::from_polar(1.0, theta);
        // s^2 - p*B*s + w0^2 = 0
        let pb = proto * bw;
        let disc = (pb * pb - 4.0 * w0_sq).sqrt();
        for s in [(pb + disc) / 2.0, (pb - disc) / 2.0] {
            if s.im <= 0.0 {
                continue;
            }
            let z = (k + s) / (k - s);
            sections.push(Section {
                b0: 1.0,
                b1: 0.0,
                b2: -1.0,
                a1: -2.0 * z.re,
                a2: z.norm_sqr(),
            });
        }
    }
    if sections.len() != n {
        return Err(Error::Design(format!(
            "expected {n} conjugate pole pairs, found {}",
            sections.len()
        )));
    }
    let mut filt = FilterSections { sections, gain: 1.0 };
    let omega0 = 2.0 * (w0_sq.sqrt() / k).atan();
    let z = Complex64::from_polar(1.0, -omega0);
    let response: Complex64 = filt
        .sections
        .iter()
        .map(|s| (s.b0 + s.b1 * z + s.b2 * z * z) / (1.0 + s.a1 * z + s.a2 * z * z))
        .product();
    filt.gain = 1.0 / response.norm();
    if !filt.is_stable() {
        return Err(Error::Design("designed sections are not stable".into()));
    }
    Ok(filt)
}

/// Forward-backward filtering with odd reflection padding of
/// `3 × pole_count` samples at each end. Net phase is zero and the effective
/// magnitude response is the square of the single-pass response.
pub fn apply_zero_phase<T: Real>(filt: &FilterSections, series: &[T]) -> Result<Vec<T>> {
    let pad = 3 * filt.pole_count();
    let n = series.len();
    if n <= pad {
        return Err(Error::InvalidArgument(format!(
            "series of {n} samples is too short; need more than {pad}"
        )));
    }
    let x: Vec<f64> = series.iter().map(|v| v.as_f64()).collect();
    let mut buf = Vec::with_capacity(n + 2 * pad);
    buf.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    buf.extend_from_slice(&x);
    buf.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    let first = buf[0];
    filt.run(&mut buf, first);
    buf.reverse();
    let first = buf[0];
    filt.run(&mut buf, first);
    buf.reverse();
    Ok(buf[pad..pad + n].iter().map(|&v| T::lit(v)).collect())
}

/// Filters every channel of a recording in place; channels run in parallel.
pub fn filter_recording<T: Real>(filt: &FilterSections, rec: &mut Recording<T>) -> Result<()> {
    let samples = rec.samples();
    if samples == 0 {
        return Ok(());
    }
    rec.data_mut().rows_mut().collect::<Vec<_>>().into_par_iter().try_for_each(|row| {
        let out = apply_zero_phase(filt, row)?;
        row.copy_from_slice(&out);
        Ok(())
    })
}
