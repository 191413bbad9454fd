//! The 9-7 biorthogonal filter family and the 2-D kernels derived from it.
//!
//! Taps are generated from the CDF 9/7 lifting factorization rather than
//! typed in, so that the analysis/synthesis pair satisfies the
//! perfect-reconstruction identities to machine precision. The lowpass pair is
//! normalized to a DC gain of `sqrt(2)`.

use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

// CDF 9/7 lifting coefficients.
const ALPHA: f64 = -1.586_134_342_059_924;
const BETA: f64 = -0.052_980_118_572_961;
const GAMMA: f64 = 0.882_911_075_530_934;
const DELTA: f64 = 0.443_506_852_043_971;

/// Zero-phase symmetric analysis and synthesis filters, stored centered:
/// tap `k` of a `2r+1`-long filter sits at index `k + r`.
///
/// Lowpass channels keep even samples and highpass channels keep odd
/// samples of the filtered signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSet {
    pub analysis_lowpass: [f64; 9],
    pub synthesis_lowpass: [f64; 7],
    pub analysis_highpass: [f64; 7],
    pub synthesis_highpass: [f64; 9],
}

impl Default for FilterSet {
    fn default() -> Self {
        Self::cdf97()
    }
}

impl FilterSet {
    pub fn cdf97() -> Self {
        const N: usize = 32;
        const CENTER: usize = 16;
        let mut analysis_lowpass = [0.0; 9];
        let mut analysis_highpass = [0.0; 7];
        for j in -4i64..=4 {
            let mut x = [0.0; N];
            x[(CENTER as i64 + j) as usize] = 1.0;
            let (s, _) = lifting_forward(&x);
            analysis_lowpass[(j + 4) as usize] = s[CENTER / 2];
        }
        for j in -3i64..=3 {
            let mut x = [0.0; N];
            x[(CENTER as i64 + 1 + j) as usize] = 1.0;
            let (_, d) = lifting_forward(&x);
            analysis_highpass[(j + 3) as usize] = d[CENTER / 2];
        }
        let mut synthesis_lowpass = [0.0; 7];
        let mut synthesis_highpass = [0.0; 9];
        {
            let mut s = [0.0; N / 2];
            s[CENTER / 2] = 1.0;
            let x = lifting_inverse(&s, &[0.0; N / 2]);
            for j in -3i64..=3 {
                synthesis_lowpass[(j + 3) as usize] = x[(CENTER as i64 + j) as usize];
            }
        }
        {
            let mut d = [0.0; N / 2];
            d[CENTER / 2] = 1.0;
            let x = lifting_inverse(&[0.0; N / 2], &d);
            for j in -4i64..=4 {
                synthesis_highpass[(j + 4) as usize] = x[(CENTER as i64 + 1 + j) as usize];
            }
        }

        // DC gain sqrt(2) on the analysis lowpass; the per-channel products
        // stay unchanged, so reconstruction is unaffected.
        let lo_scale = analysis_lowpass.iter().sum::<f64>() / sqrt(2.0);
        analysis_lowpass.iter_mut().for_each(|t| *t /= lo_scale);
        synthesis_lowpass.iter_mut().for_each(|t| *t *= lo_scale);
        // Balance the highpass pair so that g1[n] = (-1)^n h0[n].
        let hi_scale = synthesis_highpass[4] / analysis_lowpass[4];
        synthesis_highpass.iter_mut().for_each(|t| *t /= hi_scale);
        analysis_highpass.iter_mut().for_each(|t| *t *= hi_scale);

        Self {
            analysis_lowpass,
            synthesis_lowpass,
            analysis_highpass,
            synthesis_highpass,
        }
    }

    /// One level of the two-channel 1-D filter bank with whole-sample
    /// symmetric extension. Returns `(lowpass, highpass)`, each half length.
    ///
    /// # Panics
    /// If `x` has odd length or fewer than two samples.
    pub fn analyze_1d(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert!(x.len() >= 2 && x.len().is_multiple_of(2));
        let half = x.len() / 2;
        let lo = (0..half)
            .map(|n| convolve_at(x, &self.analysis_lowpass, 2 * n as i64))
            .collect();
        let hi = (0..half)
            .map(|n| convolve_at(x, &self.analysis_highpass, 2 * n as i64 + 1))
            .collect();
        (lo, hi)
    }

    /// Inverse of [`FilterSet::analyze_1d`].
    pub fn synthesize_1d(&self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        assert_eq!(lo.len(), hi.len());
        let n = lo.len() * 2;
        let mut up_lo = vec![0.0; n];
        let mut up_hi = vec![0.0; n];
        for i in 0..lo.len() {
            up_lo[2 * i] = lo[i];
            up_hi[2 * i + 1] = hi[i];
        }
        (0..n as i64)
            .map(|m| {
                convolve_at(&up_lo, &self.synthesis_lowpass, m)
                    + convolve_at(&up_hi, &self.synthesis_highpass, m)
            })
            .collect()
    }
}

/// Whole-sample symmetric reflection of `i` into `0..len`.
#[inline]
pub(crate) fn reflect(mut i: i64, len: usize) -> usize {
    let n = len as i64;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    i = i.rem_euclid(period);
    if i >= n {
        i = period - i;
    }
    i as usize
}

/// `sum_k taps[k] * x[pos - k]` with symmetric extension of `x`; `taps` is
/// centered.
#[inline]
pub(crate) fn convolve_at(x: &[f64], taps: &[f64], pos: i64) -> f64 {
    let r = (taps.len() / 2) as i64;
    let mut acc = 0.0;
    for (idx, &t) in taps.iter().enumerate() {
        let k = idx as i64 - r;
        acc += t * x[reflect(pos - k, x.len())];
    }
    acc
}

fn lifting_forward<const N: usize>(x: &[f64; N]) -> ([f64; 16], [f64; 16]) {
    debug_assert_eq!(N, 32);
    let mut s = [0.0; 16];
    let mut d = [0.0; 16];
    for n in 0..16 {
        s[n] = x[2 * n];
        d[n] = x[2 * n + 1];
    }
    predict(&mut d, &s, ALPHA);
    update(&mut s, &d, BETA);
    predict(&mut d, &s, GAMMA);
    update(&mut s, &d, DELTA);
    (s, d)
}

fn lifting_inverse(s: &[f64; 16], d: &[f64; 16]) -> [f64; 32] {
    let (mut s, mut d) = (*s, *d);
    update(&mut s, &d, -DELTA);
    predict(&mut d, &s, -GAMMA);
    update(&mut s, &d, -BETA);
    predict(&mut d, &s, -ALPHA);
    let mut x = [0.0; 32];
    for n in 0..16 {
        x[2 * n] = s[n];
        x[2 * n + 1] = d[n];
    }
    x
}

// Impulses are placed far from the ends, so zero boundaries are exact here.
fn predict(d: &mut [f64; 16], s: &[f64; 16], c: f64) {
    for n in 0..16 {
        let right = if n + 1 < 16 { s[n + 1] } else { 0.0 };
        d[n] += c * (s[n] + right);
    }
}

fn update(s: &mut [f64; 16], d: &[f64; 16], c: f64) {
    for n in 0..16 {
        let left = if n > 0 { d[n - 1] } else { 0.0 };
        s[n] += c * (left + d[n]);
    }
}

/// A square 2-D kernel of odd side `2 * radius + 1`, indexed by offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2d {
    radius: usize,
    taps: Vec<f64>,
}

impl Kernel2d {
    fn zeros(radius: usize) -> Self {
        let side = 2 * radius + 1;
        Self {
            radius,
            taps: vec![0.0; side * side],
        }
    }

    fn delta() -> Self {
        let mut k = Self::zeros(0);
        k.taps[0] = 1.0;
        k
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    #[inline]
    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    /// Tap at offset `(dr, dc)`; zero outside the support.
    pub fn at(&self, dr: i64, dc: i64) -> f64 {
        let r = self.radius as i64;
        if dr.abs() > r || dc.abs() > r {
            return 0.0;
        }
        self.taps[((dr + r) as usize) * self.side() + (dc + r) as usize]
    }

    fn add_at(&mut self, dr: i64, dc: i64, v: f64) {
        let r = self.radius as i64;
        let side = self.side();
        self.taps[((dr + r) as usize) * side + (dc + r) as usize] += v;
    }

    /// Non-zero taps as `(dr, dc, value)`, in row-major offset order.
    pub fn nonzero_taps(&self) -> Vec<(i64, i64, f64)> {
        let r = self.radius as i64;
        let mut out = Vec::new();
        for dr in -r..=r {
            for dc in -r..=r {
                let v = self.at(dr, dc);
                if v != 0.0 {
                    out.push((dr, dc, v));
                }
            }
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }

    fn scaled_add(&mut self, other: &Kernel2d, scale: f64) {
        let r = other.radius as i64;
        for dr in -r..=r {
            for dc in -r..=r {
                let v = other.at(dr, dc);
                if v != 0.0 {
                    self.add_at(dr, dc, scale * v);
                }
            }
        }
    }

    /// Convolution with the diamond averaging kernel
    /// `t = (z_r + 1/z_r + z_c + 1/z_c) / 4`, frequency response
    /// `(cos w_r + cos w_c) / 2`.
    fn diamond_step(&self) -> Kernel2d {
        let mut out = Kernel2d::zeros(self.radius + 1);
        let r = self.radius as i64;
        for dr in -r..=r {
            for dc in -r..=r {
                let v = self.at(dr, dc);
                if v == 0.0 {
                    continue;
                }
                for (er, ec) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    out.add_at(dr + er, dc + ec, 0.25 * v);
                }
            }
        }
        out
    }

    /// Multiplies every tap by `(-1)^dr`, shifting the response by `(pi, 0)`.
    pub fn modulate_rows(&self) -> Kernel2d {
        let mut out = self.clone();
        let r = self.radius as i64;
        let side = self.side();
        for dr in -r..=r {
            if dr % 2 != 0 {
                for dc in -r..=r {
                    out.taps[((dr + r) as usize) * side + (dc + r) as usize] *= -1.0;
                }
            }
        }
        out
    }
}

/// McClellan transform of a centered symmetric 1-D filter: every `cos(k w)`
/// in its zero-phase response becomes `T_k((cos w_r + cos w_c) / 2)`.
///
/// The map sends the aliasing shift `w -> w + pi` to the quincunx aliasing
/// shift `(w_r, w_c) -> (w_r + pi, w_c + pi)`, so a 1-D perfect
/// reconstruction pair becomes a 2-D quincunx (diamond) pair.
pub fn mcclellan(taps: &[f64]) -> Kernel2d {
    assert!(taps.len() % 2 == 1);
    let r = taps.len() / 2;
    let mut out = Kernel2d::zeros(r);
    let mut prev = Kernel2d::delta();
    out.scaled_add(&prev, taps[r]);
    if r == 0 {
        return out;
    }
    let mut cur = prev.diamond_step();
    out.scaled_add(&cur, 2.0 * taps[r + 1]);
    for k in 2..=r {
        let mut next = cur.diamond_step();
        next.taps.iter_mut().for_each(|t| *t *= 2.0);
        next.scaled_add(&prev, -1.0);
        prev = cur;
        cur = next;
        out.scaled_add(&cur, 2.0 * taps[r + k]);
    }
    out
}

/// The four diamond-shaped quincunx kernels
/// `(analysis low, analysis high, synthesis low, synthesis high)`.
pub fn diamond_kernels(f: &FilterSet) -> [Kernel2d; 4] {
    [
        mcclellan(&f.analysis_lowpass),
        mcclellan(&f.analysis_highpass),
        mcclellan(&f.synthesis_lowpass),
        mcclellan(&f.synthesis_highpass),
    ]
}

/// Fan kernels: the diamond kernels shifted by `(pi, 0)`. Channel 0 passes
/// the double fan `|w_c| < |w_r|`, channel 1 its complement.
pub fn fan_kernels(f: &FilterSet) -> [Kernel2d; 4] {
    diamond_kernels(f).map(|k| k.modulate_rows())
}
