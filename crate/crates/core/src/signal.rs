//! Uniformly sampled records passed between the channel model and the receiver.

use std::io::{self, Write};

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("sample rate must be positive and finite")]
    InvalidSampleRate,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}

/// Complex baseband record; sample `i` is taken at `t0 + i/fs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSignal<T> {
    pub fs: T,
    pub t0: T,
    pub samples: Vec<Complex<T>>,
}

impl<T: Scalar> BasebandSignal<T> {
    pub fn new(fs: T, t0: T, samples: Vec<Complex<T>>) -> Result<Self, SignalError> {
        check_rate(fs)?;
        if let Some(i) = samples
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(SignalError::NonFinite(i));
        }
        Ok(Self { fs, t0, samples })
    }

    pub fn zeros(fs: T, len: usize) -> Self {
        Self {
            fs,
            t0: T::zero(),
            samples: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> T {
        self.t0 + T::count(i) / self.fs
    }

    pub fn duration(&self) -> T {
        T::count(self.samples.len()) / self.fs
    }

    /// Mean `|x|²`.
    pub fn mean_power(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        self.samples
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
            / T::count(self.samples.len())
    }

    /// CSV with header `t,I,Q`, one row per sample, LF line endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,I,Q")?;
        for (i, c) in self.samples.iter().enumerate() {
            writeln!(out, "{},{},{}", self.time(i), c.re, c.im)?;
        }
        Ok(())
    }
}

/// Real-valued record such as an extracted envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal<T> {
    pub fs: T,
    pub t0: T,
    pub samples: Vec<T>,
}

impl<T: Scalar> RealSignal<T> {
    pub fn new(fs: T, samples: Vec<T>) -> Result<Self, SignalError> {
        check_rate(fs)?;
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(SignalError::NonFinite(i));
        }
        Ok(Self {
            fs,
            t0: T::zero(),
            samples,
        })
    }

    /// Samples `f(t)` at `t = i/fs` for `i < len`.
    pub fn from_fn(fs: T, len: usize, f: impl Fn(T) -> T) -> Self {
        Self {
            fs,
            t0: T::zero(),
            samples: (0..len).map(|i| f(T::count(i) / fs)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> T {
        self.t0 + T::count(i) / self.fs
    }

    pub fn duration(&self) -> T {
        T::count(self.samples.len()) / self.fs
    }

    pub fn mean(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        self.samples.iter().fold(T::zero(), |a, &x| a + x) / T::count(self.samples.len())
    }

    /// CSV with header `t,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,value")?;
        for (i, x) in self.samples.iter().enumerate() {
            writeln!(out, "{},{}", self.time(i), x)?;
        }
        Ok(())
    }
}

fn check_rate<T: Scalar>(fs: T) -> Result<(), SignalError> {
    if fs > T::zero() && fs.is_finite() {
        Ok(())
    } else {
        Err(SignalError::InvalidSampleRate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            RealSignal::new(0.0, vec![1.0]),
            Err(SignalError::InvalidSampleRate)
        );
        assert_eq!(
            RealSignal::new(1.0, vec![1.0, f64::NAN]),
            Err(SignalError::NonFinite(1))
        );
    }

    #[test]
    fn csv_layout() {
        let s = RealSignal::new(2.0, vec![1.0, 0.5, 0.25]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,value\n0,1\n0.5,0.5\n1,0.25\n"
        );

        let b = BasebandSignal::new(4.0, 0.0, vec![Complex::new(1.0, -1.0)]).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,I,Q\n0,1,-1\n");
    }
}
