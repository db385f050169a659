use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// `J_j = Σ_k w_k v_{j+k}` for `j = 0..n`, where `v` is supplied on the
/// extended range `[k_min, n - 1 + k_max]`. Two real signals are transformed
/// together as the real and imaginary parts of one complex FFT.
pub struct ExplicitJumps {
    pub k_min: i64,
    pub k_max: i64,
    n: usize,
    sparse: Vec<(i64, f64)>,
    fft: Option<FftState>,
}

struct FftState {
    size: usize,
    kernel: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

const DIRECT_LIMIT: usize = 48;

impl ExplicitJumps {
    pub fn new(n: usize, offsets: &[i64], weights: &[f64]) -> Self {
        let sparse: Vec<(i64, f64)> = offsets.iter().copied().zip(weights.iter().copied()).collect();
        let k_min = sparse.iter().map(|s| s.0).min().unwrap_or(0).min(0);
        let k_max = sparse.iter().map(|s| s.0).max().unwrap_or(0).max(0);
        let fft = if sparse.len() > DIRECT_LIMIT {
            let width = (k_max - k_min + 1) as usize;
            let size = (n + 2 * width).next_power_of_two();
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(size);
            let inverse = planner.plan_fft_inverse(size);
            // reversed kernel: h_m = w_{k_max - m}
            let mut kernel = vec![Complex64::new(0.0, 0.0); size];
            for &(k, w) in &sparse {
                kernel[(k_max - k) as usize] = Complex64::new(w / size as f64, 0.0);
            }
            let mut scratch = vec![Complex64::new(0.0, 0.0); forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len())];
            forward.process_with_scratch(&mut kernel, &mut scratch);
            Some(FftState { size, kernel, forward, inverse, buf: vec![Complex64::new(0.0, 0.0); size], scratch })
        } else {
            None
        };
        ExplicitJumps { k_min, k_max, n, sparse, fft }
    }

    pub fn is_empty(&self) -> bool {
        self.sparse.is_empty()
    }

    /// Length of the extended input.
    pub fn ext_len(&self) -> usize {
        self.n + (self.k_max - self.k_min) as usize
    }

    /// `a`, `b`: extended inputs (index 0 ↔ node `k_min`); outputs length `n`.
    pub fn apply2(&mut self, a: &[f64], b: &[f64], out_a: &mut [f64], out_b: &mut [f64]) {
        let n = self.n;
        let shift = -self.k_min;
        match &mut self.fft {
            None => {
                for j in 0..n {
                    let (mut sa, mut sb) = (0.0, 0.0);
                    for &(k, w) in &self.sparse {
                        let idx = (j as i64 + k + shift) as usize;
                        sa += w * a[idx];
                        sb += w * b[idx];
                    }
                    out_a[j] = sa;
                    out_b[j] = sb;
                }
            }
            Some(st) => {
                let width = (self.k_max - self.k_min) as usize;
                for (i, slot) in st.buf.iter_mut().enumerate() {
                    *slot = if i < a.len() { Complex64::new(a[i], b[i]) } else { Complex64::new(0.0, 0.0) };
                }
                st.forward.process_with_scratch(&mut st.buf, &mut st.scratch);
                for (x, h) in st.buf.iter_mut().zip(&st.kernel) {
                    *x *= h;
                }
                st.inverse.process_with_scratch(&mut st.buf, &mut st.scratch);
                // c_t = Σ_m h_m e_{t-m}; J_j = c_{j + width}
                for j in 0..n {
                    let c = st.buf[j + width];
                    out_a[j] = c.re;
                    out_b[j] = c.im;
                }
                debug_assert!(n + width <= st.size);
            }
        }
    }
}
