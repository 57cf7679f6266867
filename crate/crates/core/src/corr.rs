//! Cross-correlation of coefficient rows over the truncated `eta` lattice.
//!
//! `out(s) = sum_c a(c) * conj(b(c - s))` with `c`, `s` and `c - s` all read
//! inside the box (terms that leave it are zero). Two deliberately separate
//! routes compute this: direct summation, and circular correlation on a
//! zero-padded grid via FFT. The naive route is the correctness oracle for
//! the fast one; they must agree to 1e-12 on unit-scale data.

use std::sync::Arc;

use rustfft::{Fft, FftDirection, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freq::FreqBox;
use crate::sum::pairwise_map_sum_c64;
use crate::{C64, EngineOpts};

/// Which correlation route to take. `Auto` picks by row size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Naive,
    Fft,
    Auto,
}

impl Backend {
    /// Rows shorter than this are cheaper to correlate directly.
    const FFT_CUTOVER: usize = 128;

    pub(crate) fn resolve(self, eta_len: usize) -> Backend {
        match self {
            Backend::Auto => {
                if eta_len < Self::FFT_CUTOVER {
                    Backend::Naive
                } else {
                    Backend::Fft
                }
            }
            fixed => fixed,
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Backend> {
        match s {
            "naive" => Ok(Backend::Naive),
            "fft" => Ok(Backend::Fft),
            "auto" => Ok(Backend::Auto),
            other => Err(Error::InvalidArgument(format!("unknown backend `{other}`"))),
        }
    }
}

/// Smallest length >= `n` whose prime factors rustfft handles without
/// falling back to Bluestein.
pub fn next_fast_len(n: usize) -> usize {
    let mut p = n.max(1);
    loop {
        let mut q = p;
        for f in [2usize, 3, 5, 7, 11] {
            while q.is_multiple_of(f) {
                q /= f;
            }
        }
        if q == 1 {
            return p;
        }
        p += 1;
    }
}

/// Direct-summation correlator for rows of an `axes`-dimensional box.
pub struct NaivePlan {
    axes: usize,
    m: i64,
    len: usize,
    // Flattened coordinate table: coords[i*axes..(i+1)*axes] for row index i.
    coords: Vec<i64>,
}

impl NaivePlan {
    pub fn new(axes: usize, m: usize) -> NaivePlan {
        let l = 2 * m + 1;
        let len = l.pow(axes as u32);
        let mut coords = Vec::with_capacity(len * axes);
        let mut cur = vec![-(m as i64); axes];
        for _ in 0..len {
            coords.extend_from_slice(&cur);
            for t in (0..axes).rev() {
                if cur[t] < m as i64 {
                    cur[t] += 1;
                    break;
                }
                cur[t] = -(m as i64);
            }
        }
        NaivePlan { axes, m: m as i64, len, coords }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn correlate(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        debug_assert_eq!(a.len(), self.len);
        debug_assert_eq!(b.len(), self.len);
        if self.axes == 0 {
            return vec![a[0] * b[0].conj()];
        }
        let l = (2 * self.m + 1) as usize;
        let mut out = Vec::with_capacity(self.len);
        for s in 0..self.len {
            let sc = &self.coords[s * self.axes..(s + 1) * self.axes];
            let sum = pairwise_map_sum_c64(self.len, &|c| {
                let cc = &self.coords[c * self.axes..(c + 1) * self.axes];
                let mut off = 0usize;
                for t in 0..self.axes {
                    let diff = cc[t] - sc[t];
                    if diff.abs() > self.m {
                        return C64::new(0.0, 0.0);
                    }
                    off = off * l + (diff + self.m) as usize;
                }
                a[c] * b[off].conj()
            });
            out.push(sum);
        }
        out
    }
}

/// FFT correlator: pads each axis to a fast length >= 2L-1 so the circular
/// correlation never wraps into the window we read back.
pub struct CorrelationPlan {
    axes: usize,
    l: usize,
    m: usize,
    p: usize,
    padded_len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl CorrelationPlan {
    pub fn new(axes: usize, m: usize) -> CorrelationPlan {
        let l = 2 * m + 1;
        let p = if axes == 0 { 1 } else { next_fast_len(2 * l - 1) };
        let padded_len = p.pow(axes as u32);
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft(p, FftDirection::Forward);
        let inv = planner.plan_fft(p, FftDirection::Inverse);
        CorrelationPlan { axes, l, m, p, padded_len, fwd, inv }
    }

    pub fn for_rows_of(shape: FreqBox) -> CorrelationPlan {
        CorrelationPlan::new(shape.d() * shape.r(), shape.m())
    }

    pub fn padded_len(&self) -> usize {
        self.padded_len
    }

    /// Copy a box row into the padded grid and take its forward transform.
    pub fn forward(&self, v: &[C64]) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.padded_len];
        if self.axes == 0 {
            buf[0] = v[0];
            return buf;
        }
        // Box positions 0..L-1 land at padded positions 0..L-1 on every axis.
        self.scatter_box(v, &mut buf);
        self.transform(&mut buf, true);
        buf
    }

    fn scatter_box(&self, v: &[C64], buf: &mut [C64]) {
        let mut pos = vec![0usize; self.axes];
        for &val in v {
            let mut off = 0usize;
            for &c in pos.iter() {
                off = off * self.p + c;
            }
            buf[off] = val;
            for t in (0..self.axes).rev() {
                if pos[t] + 1 < self.l {
                    pos[t] += 1;
                    break;
                }
                pos[t] = 0;
            }
        }
    }

    /// Multiply `fa * conj(fb)`, invert, and read the `{-M..M}` window back
    /// out in box order.
    pub fn correlate_spectra(&self, fa: &[C64], fb: &[C64]) -> Vec<C64> {
        debug_assert_eq!(fa.len(), self.padded_len);
        debug_assert_eq!(fb.len(), self.padded_len);
        if self.axes == 0 {
            return vec![fa[0] * fb[0].conj()];
        }
        let mut buf: Vec<C64> = fa.iter().zip(fb).map(|(x, y)| x * y.conj()).collect();
        self.transform(&mut buf, false);
        let scale = 1.0 / self.padded_len as f64;
        let out_len = self.l.pow(self.axes as u32);
        let mut out = Vec::with_capacity(out_len);
        let m = self.m as i64;
        let mut sc = vec![-m; self.axes];
        for _ in 0..out_len {
            let mut off = 0usize;
            for &s in sc.iter() {
                let wrapped = if s >= 0 { s as usize } else { (self.p as i64 + s) as usize };
                off = off * self.p + wrapped;
            }
            out.push(buf[off] * scale);
            for t in (0..self.axes).rev() {
                if sc[t] < m {
                    sc[t] += 1;
                    break;
                }
                sc[t] = -m;
            }
        }
        out
    }

    pub fn correlate(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let fa = self.forward(a);
        let fb = self.forward(b);
        self.correlate_spectra(&fa, &fb)
    }

    /// In-place FFT along every axis of the padded row-major cube.
    fn transform(&self, buf: &mut [C64], forward: bool) {
        let fft = if forward { &self.fwd } else { &self.inv };
        let p = self.p;
        for axis in 0..self.axes {
            let stride = p.pow((self.axes - 1 - axis) as u32);
            if stride == 1 {
                // Lines are contiguous; rustfft batches chunks in one call.
                fft.process(buf);
                continue;
            }
            let mut line = vec![C64::new(0.0, 0.0); p];
            let block = stride * p;
            for outer in (0..buf.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for j in 0..p {
                        line[j] = buf[base + j * stride];
                    }
                    fft.process(&mut line);
                    for j in 0..p {
                        buf[base + j * stride] = line[j];
                    }
                }
            }
        }
    }
}

/// Correlate two `eta` rows of tensors shaped by `shape`.
pub fn cross_correlate(a: &[C64], b: &[C64], shape: FreqBox, opts: &EngineOpts) -> Result<Vec<C64>> {
    let want = shape.eta_len();
    if a.len() != want || b.len() != want {
        return Err(Error::DimensionMismatch { expected: want, got: a.len().max(b.len()) });
    }
    let axes = shape.d() * shape.r();
    if axes == 0 {
        return Ok(vec![a[0] * b[0].conj()]);
    }
    match opts.backend.resolve(want) {
        Backend::Fft => {
            let plan = CorrelationPlan::new(axes, shape.m());
            opts.budget.check(plan.padded_len() as u128, "padded correlation grid")?;
            Ok(plan.correlate(a, b))
        }
        _ => Ok(NaivePlan::new(axes, shape.m()).correlate(a, b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn shape(d: usize, r: usize, m: usize) -> FreqBox {
        FreqBox::new(d, r, m, Budget::default()).unwrap()
    }

    fn random_row(len: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
        (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn all_ones_overlap_counts() {
        // r=1, d=1, M=4: out(s) = #{c: both c and c-s in box} = 9 - |s|.
        let b = shape(1, 1, 4);
        let ones = vec![C64::new(1.0, 0.0); 9];
        let out = cross_correlate(&ones, &ones, b, &EngineOpts::default()).unwrap();
        for (i, z) in out.iter().enumerate() {
            let s = i as i64 - 4;
            assert_eq!(z.re, (9 - s.abs()) as f64, "s = {s}");
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn origin_spike_recovers_conjugate_of_b() {
        let b = shape(1, 1, 3);
        let mut a = vec![C64::new(0.0, 0.0); 7];
        a[3] = C64::new(1.0, 0.0); // spike at c = 0
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let row = random_row(7, &mut rng);
        let out = cross_correlate(&a, &row, b, &EngineOpts::default()).unwrap();
        // out(s) = conj(b(-s))
        for (i, z) in out.iter().enumerate() {
            let s = i as i64 - 3;
            let expect = row[(3 - s) as usize].conj();
            assert!((z - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_block_count_multiplies_single_entries() {
        let b = shape(1, 0, 5);
        let a = [C64::new(2.0, 1.0)];
        let c = [C64::new(0.5, -0.25)];
        let out = cross_correlate(&a, &c, b, &EngineOpts::default()).unwrap();
        assert_eq!(out, vec![a[0] * c[0].conj()]);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let b = shape(1, 1, 2);
        let a = vec![C64::new(1.0, 0.0); 5];
        let c = vec![C64::new(1.0, 0.0); 4];
        assert!(cross_correlate(&a, &c, b, &EngineOpts::default()).is_err());
    }

    #[test]
    fn backends_agree_across_seeds_and_radii() {
        // Pinned backend-equivalence sweep: 200 seeds at M in {2,4,8}.
        for m in [2usize, 4, 8] {
            let b = shape(1, 1, m);
            let len = b.eta_len();
            for seed in 0..200u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_row(len, &mut rng);
                let c = random_row(len, &mut rng);
                let naive = NaivePlan::new(1, m).correlate(&a, &c);
                let fft = CorrelationPlan::new(1, m).correlate(&a, &c);
                for (x, y) in naive.iter().zip(&fft) {
                    let scale = x.norm().max(1.0);
                    assert!(
                        (x - y).norm() <= 1e-12 * scale,
                        "seed {seed} M {m}: {x} vs {y}"
                    );
                }
            }
        }
    }

    #[test]
    fn backends_agree_on_two_block_rows() {
        let b = shape(1, 2, 3);
        let len = b.eta_len();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let a = random_row(len, &mut rng);
        let c = random_row(len, &mut rng);
        let naive = NaivePlan::new(2, 3).correlate(&a, &c);
        let fft = CorrelationPlan::new(2, 3).correlate(&a, &c);
        for (x, y) in naive.iter().zip(&fft) {
            assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0));
        }
    }

    #[test]
    fn swapping_arguments_conjugates_and_reflects() {
        let b = shape(1, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_row(9, &mut rng);
        let c = random_row(9, &mut rng);
        let ab = cross_correlate(&a, &c, b, &EngineOpts::default()).unwrap();
        let ba = cross_correlate(&c, &a, b, &EngineOpts::default()).unwrap();
        for s in -4i64..=4 {
            let i = (s + 4) as usize;
            let j = (-s + 4) as usize;
            assert!((ab[i] - ba[j].conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn peak_is_bounded_by_cauchy_schwarz() {
        let b = shape(1, 1, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_row(17, &mut rng);
            let c = random_row(17, &mut rng);
            let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let nc: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let out = cross_correlate(&a, &c, b, &EngineOpts::default()).unwrap();
            for z in &out {
                assert!(z.norm() <= na * nc * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn fast_lengths_are_smooth_and_not_smaller() {
        for n in 1..200 {
            let p = next_fast_len(n);
            assert!(p >= n);
            let mut q = p;
            for f in [2, 3, 5, 7, 11] {
                while q.is_multiple_of(f) {
                    q /= f;
                }
            }
            assert_eq!(q, 1);
        }
        assert_eq!(next_fast_len(129), 132);
    }
}
