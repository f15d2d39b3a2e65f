//! Multi-dimensional FFTs over a cube of side `m` in `d` dimensions.
//!
//! Data is stored row-major with axis 0 fastest: `idx = i0 + m*i1 + m^2*i2`.
//! Both directions are unnormalized; callers apply the `1/N` factor.
//!
//! Real fields use a real transform along axis 0 and complex transforms on
//! the `m/2 + 1` retained planes, filling the other half of the spectrum by
//! conjugate symmetry.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct FftPlan {
    m: usize,
    d: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    /// Flat index of the negated multi-index of every axis-0 row.
    neg_row: Vec<usize>,
}

impl fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftPlan").field("m", &self.m).field("d", &self.d).finish()
    }
}

#[derive(Default)]
struct Work {
    half: Vec<Complex64>,
    tmp: Vec<Complex64>,
    scratch: Vec<Complex64>,
    line: Vec<f64>,
}

thread_local! {
    static WORK: RefCell<Work> = RefCell::new(Work::default());
}

fn ensure<T: Default + Clone>(v: &mut Vec<T>, len: usize) {
    if v.len() < len {
        v.resize(len, T::default());
    }
}

impl FftPlan {
    pub fn new(m: usize, d: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut rplanner = RealFftPlanner::<f64>::new();
        let r2c = rplanner.plan_fft_forward(m);
        let c2r = rplanner.plan_fft_inverse(m);
        let rows = m.pow(d as u32 - 1);
        let neg_row = (0..rows)
            .map(|r| {
                let mut rest = r;
                let mut out = 0;
                let mut stride = 1;
                for _ in 1..d {
                    let i = rest % m;
                    rest /= m;
                    out += ((m - i) % m) * stride;
                    stride *= m;
                }
                out
            })
            .collect();
        Self { m, d, forward, inverse, r2c, c2r, neg_row }
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform, `X_k = sum_x f_x exp(-2 pi i k.x/m)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(&*self.forward, data);
    }

    /// Unnormalized inverse transform, `f_x = sum_k X_k exp(+2 pi i k.x/m)`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(&*self.inverse, data);
    }

    /// Forward transform of real data, writing the full Hermitian spectrum.
    pub fn forward_real(&self, input: &[f64], out: &mut [Complex64]) {
        let n = self.len();
        assert_eq!(input.len(), n, "buffer does not match plan size");
        assert_eq!(out.len(), n, "buffer does not match plan size");
        let m = self.m;
        let hlen = m / 2 + 1;
        let rows = n / m;
        WORK.with(|w| {
            let w = &mut *w.borrow_mut();
            ensure(&mut w.half, hlen * rows);
            ensure(&mut w.line, m);
            ensure(&mut w.scratch, self.r2c.get_scratch_len());
            for r in 0..rows {
                w.line[..m].copy_from_slice(&input[r * m..(r + 1) * m]);
                let scratch_len = self.r2c.get_scratch_len();
                self.r2c
                    .process_with_scratch(&mut w.line[..m], &mut w.half[r * hlen..(r + 1) * hlen], &mut w.scratch[..scratch_len])
                    .expect("buffer lengths match the plan");
            }
            let half = &mut w.half[..hlen * rows];
            self.axes(&*self.forward, half, hlen, &mut w.tmp, &mut w.scratch);
            for r in 0..rows {
                let nr = self.neg_row[r];
                let dst = &mut out[r * m..(r + 1) * m];
                dst[..hlen].copy_from_slice(&half[r * hlen..(r + 1) * hlen]);
                for j in hlen..m {
                    dst[j] = half[nr * hlen + (m - j)].conj();
                }
            }
        });
    }

    /// Inverse transform of a Hermitian spectrum into real data.
    ///
    /// Only coefficients with `0 <= k_0 <= m/2` are read; the rest are
    /// assumed to be their conjugate partners.
    pub fn inverse_real(&self, input: &[Complex64], out: &mut [f64]) {
        let n = self.len();
        assert_eq!(input.len(), n, "buffer does not match plan size");
        assert_eq!(out.len(), n, "buffer does not match plan size");
        let m = self.m;
        let hlen = m / 2 + 1;
        let rows = n / m;
        WORK.with(|w| {
            let w = &mut *w.borrow_mut();
            ensure(&mut w.half, hlen * rows);
            for r in 0..rows {
                w.half[r * hlen..(r + 1) * hlen].copy_from_slice(&input[r * m..r * m + hlen]);
            }
            let half = &mut w.half[..hlen * rows];
            self.axes(&*self.inverse, half, hlen, &mut w.tmp, &mut w.scratch);
            let scratch_len = self.c2r.get_scratch_len();
            ensure(&mut w.scratch, scratch_len);
            for r in 0..rows {
                // DC and Nyquist entries carry rounding-level imaginary parts; they are ignored
                let _ = self.c2r.process_with_scratch(
                    &mut half[r * hlen..(r + 1) * hlen],
                    &mut out[r * m..(r + 1) * m],
                    &mut w.scratch[..scratch_len],
                );
            }
        });
    }

    fn run(&self, fft: &dyn Fft<f64>, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len(), "buffer does not match plan size");
        WORK.with(|w| {
            let w = &mut *w.borrow_mut();
            let len = fft.get_inplace_scratch_len();
            ensure(&mut w.scratch, len);
            fft.process_with_scratch(data, &mut w.scratch[..len]);
            self.axes(fft, data, self.m, &mut w.tmp, &mut w.scratch);
        });
    }

    /// Transforms along axes `1..d` of data whose axis-0 rows hold `row` entries.
    fn axes(
        &self,
        fft: &dyn Fft<f64>,
        data: &mut [Complex64],
        row: usize,
        tmp: &mut Vec<Complex64>,
        scratch: &mut Vec<Complex64>,
    ) {
        if self.d == 1 {
            return;
        }
        let m = self.m;
        ensure(tmp, data.len());
        let tmp = &mut tmp[..data.len()];
        let len = fft.get_inplace_scratch_len();
        ensure(scratch, len);
        let scratch = &mut scratch[..len];
        for axis in 1..self.d {
            let inner = row * m.pow(axis as u32 - 1);
            let block = inner * m;
            for (src, dst) in data.chunks_exact(block).zip(tmp.chunks_exact_mut(block)) {
                // gather: dst[i*m + j] = src[j*inner + i]
                for j in 0..m {
                    let line = &src[j * inner..(j + 1) * inner];
                    for (i, v) in line.iter().enumerate() {
                        dst[i * m + j] = *v;
                    }
                }
            }
            fft.process_with_scratch(tmp, scratch);
            for (src, dst) in tmp.chunks_exact(block).zip(data.chunks_exact_mut(block)) {
                for j in 0..m {
                    let line = &mut dst[j * inner..(j + 1) * inner];
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = src[i * m + j];
                    }
                }
            }
        }
    }
}
