//! Spectral kernels on uniform periodic grids: FFT wrappers, the wavenumber
//! table, and band-limited resampling `f(x) → f(s·x)` through a chirp-z
//! (Bluestein) transform.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Forward and inverse plans of one size. Cheap to clone.
#[derive(Clone)]
pub struct FftPair {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform in place, normalized by `1/n`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let s = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// Angular wavenumbers `2π m / L` in FFT order (`m = 0..n/2-1, -n/2..-1`).
pub fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let m = if j < n / 2 { j as isize } else { j as isize - n as isize };
            2.0 * PI * m as f64 / length
        })
        .collect()
}

/// Signed mode index for FFT slot `j`.
fn mode(j: usize, n: usize) -> isize {
    if j < n / 2 {
        j as isize
    } else {
        j as isize - n as isize
    }
}

/// Evaluates the trigonometric interpolant of `values` (sampled at
/// `x_min + j·dx`) at an arbitrary point.
pub fn interpolate(values: &[Complex64], x_min: f64, length: f64, x: f64, fft: &FftPair) -> Complex64 {
    let n = values.len();
    let mut spec = values.to_vec();
    fft.forward(&mut spec);
    let u = (x - x_min) / length;
    spec.iter()
        .enumerate()
        .map(|(j, a)| a * Complex64::from_polar(1.0, 2.0 * PI * mode(j, n) as f64 * u))
        .sum::<Complex64>()
        / n as f64
}

/// Resamples band-limited periodic data: `out_j = f(s · x_j)` where `f` is the
/// trigonometric interpolant of the input on `[x_min, x_min + L)`.
///
/// With `x_j = x_min + j·dx` and modes `m ∈ [−n/2, n/2)`,
/// `f(s x_j) = (1/n) Σ_m F_m e^{i k_m x_min (s−1)} e^{2πi m j s / n}`, a chirp-z
/// transform evaluated in `O(n log n)` with Bluestein's identity
/// `m j = (m² + j² − (j−m)²)/2`.
pub struct Resampler {
    n: usize,
    fft: FftPair,
    conv: FftPair,
    /// Pre-chirp multiplied into the (shifted) spectrum.
    pre: Vec<Complex64>,
    /// Post-chirp applied to the convolution output.
    post: Vec<Complex64>,
    /// FFT of the convolution kernel.
    kernel: Vec<Complex64>,
    /// Spectral cut applied after the forward transform: modes with
    /// `|m| > cutoff` are lost when compressing (`s > 1`).
    cutoff: f64,
    scale: f64,
}

impl Resampler {
    pub fn new(n: usize, x_min: f64, length: f64, scale: f64) -> Self {
        assert!(n >= 2 && n.is_power_of_two(), "grid size must be a power of two");
        assert!(scale > 0.0 && scale.is_finite(), "resampling scale must be positive");
        let fft = FftPair::new(n);
        let m_size = (2 * n).next_power_of_two();
        let conv = FftPair::new(m_size);
        let theta = 2.0 * PI * scale / n as f64;
        let half = (n / 2) as f64;
        // Shifted mode index q = m + n/2 ∈ [0, n); e^{iθ m j} = e^{iθ q j} e^{−iθ (n/2) j}.
        let pre: Vec<Complex64> = (0..n)
            .map(|q| {
                let m = q as f64 - half;
                let k = 2.0 * PI * m / length;
                let qf = q as f64;
                Complex64::from_polar(1.0, k * x_min * (scale - 1.0) + theta * qf * qf / 2.0)
            })
            .collect();
        let post: Vec<Complex64> = (0..n)
            .map(|j| {
                let jf = j as f64;
                Complex64::from_polar(1.0 / n as f64, theta * jf * jf / 2.0 - theta * half * jf)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m_size];
        for d in 0..n {
            let df = d as f64;
            let v = Complex64::from_polar(1.0, -theta * df * df / 2.0);
            kernel[d] = v;
            if d > 0 {
                kernel[m_size - d] = v;
            }
        }
        conv.forward(&mut kernel);
        Self {
            n,
            fft,
            conv,
            pre,
            post,
            kernel,
            cutoff: half / scale,
            scale,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Resamples `data` in place. Returns the squared spectral norm (in units
    /// of `Σ|f_j|²`) that cannot be represented after resampling: modes beyond
    /// the compressed band when `s > 1`. Spatial wrap-around for `s < 1` is
    /// measured separately by the caller, since it depends on the geometry.
    pub fn apply(&self, data: &mut [Complex64]) -> f64 {
        let n = self.n;
        assert_eq!(data.len(), n);
        self.fft.forward(data);
        let total: f64 = data.iter().map(|z| z.norm_sqr()).sum();
        let mut lost = 0.0;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.conv.len()];
        for (j, z) in data.iter().enumerate() {
            let m = mode(j, n);
            if (m as f64).abs() > self.cutoff {
                lost += z.norm_sqr();
            }
            let q = (m + (n / 2) as isize) as usize;
            buf[q] = z * self.pre[q];
        }
        self.conv.forward(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel) {
            *b *= k;
        }
        self.conv.inverse(&mut buf);
        for j in 0..n {
            data[j] = buf[j] * self.post[j];
        }
        if total > 0.0 {
            lost / total
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(values: &[Complex64], x_min: f64, length: f64, s: f64) -> Vec<Complex64> {
        let n = values.len();
        let fft = FftPair::new(n);
        let dx = length / n as f64;
        (0..n)
            .map(|j| interpolate(values, x_min, length, s * (x_min + j as f64 * dx), &fft))
            .collect()
    }

    #[test]
    fn wavenumbers_are_in_fft_order() {
        let k = wavenumbers(8, 2.0 * PI);
        assert_eq!(k, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let n = 64;
        let (x_min, length) = (-3.0, 6.0);
        let dx = length / n as f64;
        let f: Vec<Complex64> = (0..n)
            .map(|j| {
                let x = x_min + j as f64 * dx;
                Complex64::new((-x * x).exp(), x.sin() * 0.1)
            })
            .collect();
        let fft = FftPair::new(n);
        for j in [0, 5, 33, 63] {
            let v = interpolate(&f, x_min, length, x_min + j as f64 * dx, &fft);
            assert!((v - f[j]).norm() < 1e-14);
        }
    }

    #[test]
    fn chirp_z_matches_direct_sum() {
        let n = 128;
        let (x_min, length) = (-10.0, 20.0);
        let dx = length / n as f64;
        let f: Vec<Complex64> = (0..n)
            .map(|j| {
                let x = x_min + j as f64 * dx;
                Complex64::from_polar((-(x - 0.7).powi(2) / 2.0).exp(), 0.4 * x)
            })
            .collect();
        for &s in &[0.5, 0.8, 1.0, 1.3, 2.0] {
            let mut fast = f.clone();
            Resampler::new(n, x_min, length, s).apply(&mut fast);
            let slow = direct(&f, x_min, length, s);
            let err = fast
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "s = {s}: {err}");
        }
    }

    #[test]
    fn gaussian_resampling_is_exact_for_resolved_states() {
        let n = 256;
        let (x_min, length) = (-16.0, 32.0);
        let dx = length / n as f64;
        let g = |x: f64| Complex64::new((-x * x / 2.0).exp(), 0.0);
        let mut f: Vec<Complex64> = (0..n).map(|j| g(x_min + j as f64 * dx)).collect();
        let s = 0.6;
        let lost = Resampler::new(n, x_min, length, s).apply(&mut f);
        assert!(lost < 1e-20);
        for (j, v) in f.iter().enumerate() {
            let x = x_min + j as f64 * dx;
            assert!((v - g(s * x)).norm() < 1e-12);
        }
    }
}
