//! Thin wrapper over `rustfft` with the conventions used throughout the crate:
//! forward transform unnormalized, inverse transform scaled by `1/len`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

#[derive(Clone)]
pub struct FftPair<T: Scalar> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    len: usize,
}

impl<T: Scalar> FftPair<T> {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
        let scale = T::one() / T::from_usize_lossy(self.len);
        for v in buf.iter_mut() {
            *v = *v * scale;
        }
    }
}

impl<T: Scalar> std::fmt::Debug for FftPair<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPair").field("len", &self.len).finish()
    }
}

/// Signed frequency index of DFT bin `m` in a transform of length `len`.
///
/// The Nyquist bin of an even-length transform maps to `+len/2`.
pub fn signed_bin(m: usize, len: usize) -> isize {
    if 2 * m <= len {
        m as isize
    } else {
        m as isize - len as isize
    }
}

/// DFT bin holding signed frequency index `k`.
pub fn bin_of(k: isize, len: usize) -> usize {
    k.rem_euclid(len as isize) as usize
}

/// Bin holding signed frequency index `k`, if `k` is representable in a
/// transform of length `len` (Nyquist belongs to the positive side).
pub fn checked_bin(k: isize, len: usize) -> Option<usize> {
    let m = bin_of(k, len);
    (signed_bin(m, len) == k).then_some(m)
}

/// Analytic-signal weight of bin `p` for a real signal of length `len`.
pub fn analytic_weight<T: Scalar>(p: usize, len: usize) -> T {
    if p == 0 || 2 * p == len {
        T::one()
    } else if 2 * p < len {
        T::lit(2.0)
    } else {
        T::zero()
    }
}
