//! Truncated frequency boxes and the tensors of Fourier coefficients that
//! live on them.
//!
//! A level-`r` tensor indexes `Z^d x (Z^d)^r` truncated to `{-M..M}` per
//! coordinate. Linearization is row-major with `xi` slowest and the last
//! `eta` block fastest, so the whole `eta` range for a fixed `xi` is one
//! contiguous slice. Everything outside the box is implicitly zero.

use crate::error::{Budget, Error, Result};
use crate::sum::pairwise_map_sum;
use crate::C64;
use serde::Serialize;

/// Truncated frequency lattice `{-M..M}^{d(r+1)}`: `d` torus dimensions,
/// `r` difference blocks, radius `m` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FreqBox {
    d: usize,
    r: usize,
    m: usize,
}

impl FreqBox {
    /// Fails when `(2M+1)^{d(r+1)}` exceeds the element budget.
    pub fn new(d: usize, r: usize, m: usize, budget: Budget) -> Result<FreqBox> {
        if d == 0 {
            return Err(Error::InvalidArgument("torus dimension d must be >= 1".into()));
        }
        let b = FreqBox { d, r, m };
        budget.check(b.point_count(), &format!("frequency box d={d} r={r} M={m}"))?;
        Ok(b)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Points per axis, `2M+1`.
    pub fn axis_len(&self) -> usize {
        2 * self.m + 1
    }

    /// Total number of scalar axes, `d(r+1)`.
    pub fn axes(&self) -> usize {
        self.d * (self.r + 1)
    }

    pub fn point_count(&self) -> u128 {
        (self.axis_len() as u128).pow(self.axes() as u32)
    }

    pub fn len(&self) -> usize {
        self.point_count() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length of one `xi` block, `(2M+1)^d`.
    pub fn xi_len(&self) -> usize {
        self.axis_len().pow(self.d as u32)
    }

    /// Length of the `eta` lattice for one `xi`, `(2M+1)^{dr}`.
    pub fn eta_len(&self) -> usize {
        self.axis_len().pow((self.d * self.r) as u32)
    }

    pub fn layout(&self) -> IndexLayout {
        IndexLayout::new(self.m, self.axes())
    }

    /// Box with one more difference block, same `d` and `M`.
    pub fn extended(&self, budget: Budget) -> Result<FreqBox> {
        FreqBox::new(self.d, self.r + 1, self.m, budget)
    }

    /// Row-major flat index of a `d`-length coordinate within one block,
    /// or `None` if any coordinate leaves the box.
    pub fn block_flat(&self, coords: &[i64]) -> Option<usize> {
        debug_assert_eq!(coords.len(), self.d);
        flat_index(coords, self.m)
    }

    /// Inverse of [`block_flat`]: decode a block-local flat index.
    pub fn block_coords(&self, mut idx: usize) -> Vec<i64> {
        decode_index(&mut idx, self.d, self.m)
    }

    /// Decode a flat `eta` index into `r` blocks of `d` coordinates.
    pub fn eta_coords(&self, mut idx: usize) -> Vec<i64> {
        decode_index(&mut idx, self.d * self.r, self.m)
    }
}

/// Row-major addressing over `axes` coordinates in `{-M..M}`.
///
/// The map `coords -> offset` is the bijection every tensor in the crate
/// shares; tests in this module pin it so serialized reports, the FFT
/// backend and the naive loops can never disagree on addressing.
#[derive(Debug, Clone)]
pub struct IndexLayout {
    m: usize,
    axes: usize,
    strides: Vec<usize>,
}

impl IndexLayout {
    fn new(m: usize, axes: usize) -> IndexLayout {
        let l = 2 * m + 1;
        let mut strides = vec![1usize; axes];
        for i in (0..axes.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * l;
        }
        IndexLayout { m, axes, strides }
    }

    pub fn offset(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.axes {
            return None;
        }
        let m = self.m as i64;
        let mut off = 0usize;
        for (c, s) in coords.iter().zip(&self.strides) {
            if c.abs() > m {
                return None;
            }
            off += ((c + m) as usize) * s;
        }
        Some(off)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<i64> {
        decode_index(&mut idx, self.axes, self.m)
    }
}

fn flat_index(coords: &[i64], m: usize) -> Option<usize> {
    let l = 2 * m + 1;
    let mi = m as i64;
    let mut off = 0usize;
    for &c in coords {
        if c.abs() > mi {
            return None;
        }
        off = off * l + (c + mi) as usize;
    }
    Some(off)
}

fn decode_index(idx: &mut usize, axes: usize, m: usize) -> Vec<i64> {
    let l = 2 * m + 1;
    let mut coords = vec![0i64; axes];
    for slot in coords.iter_mut().rev() {
        *slot = (*idx % l) as i64 - m as i64;
        *idx /= l;
    }
    coords
}

/// Dense complex coefficients on a [`FreqBox`].
///
/// `real_derived` marks tensors built from real measures; those satisfy
/// `T(-p) = conj(T(p))` and the flag propagates through delta steps.
#[derive(Debug, Clone)]
pub struct SpectralTensor {
    shape: FreqBox,
    coeffs: Vec<C64>,
    real_derived: bool,
}

impl SpectralTensor {
    pub fn from_parts(shape: FreqBox, coeffs: Vec<C64>, real_derived: bool) -> Result<SpectralTensor> {
        if coeffs.len() != shape.len() {
            return Err(Error::InvalidArgument(format!(
                "coefficient vector holds {} entries, box needs {}",
                coeffs.len(),
                shape.len()
            )));
        }
        Ok(SpectralTensor { shape, coeffs, real_derived })
    }

    pub fn zeros(shape: FreqBox) -> SpectralTensor {
        SpectralTensor { shape, coeffs: vec![C64::new(0.0, 0.0); shape.len()], real_derived: true }
    }

    pub fn shape(&self) -> FreqBox {
        self.shape
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn real_derived(&self) -> bool {
        self.real_derived
    }

    /// Coefficient at full coordinates `(xi; eta)`; zero outside the box.
    pub fn at(&self, coords: &[i64]) -> C64 {
        match self.shape.layout().offset(coords) {
            Some(off) => self.coeffs[off],
            None => C64::new(0.0, 0.0),
        }
    }

    /// Contiguous `eta` row for a fixed `xi`.
    pub fn xi_slice(&self, xi: &[i64]) -> Result<&[C64]> {
        if xi.len() != self.shape.d() {
            return Err(Error::DimensionMismatch { expected: self.shape.d(), got: xi.len() });
        }
        let flat = self.shape.block_flat(xi).ok_or_else(|| Error::OutOfBox {
            coords: xi.to_vec(),
            m: self.shape.m(),
        })?;
        Ok(self.xi_slice_flat(flat))
    }

    /// Row by block-flat `xi` index; callers that iterate all rows use this.
    pub fn xi_slice_flat(&self, xi_flat: usize) -> &[C64] {
        let w = self.shape.eta_len();
        &self.coeffs[xi_flat * w..(xi_flat + 1) * w]
    }

    /// Largest `|T(-p) - conj(T(p))|` over the box; ~0 for real-derived tensors.
    pub fn hermitian_defect(&self) -> f64 {
        let layout = self.shape.layout();
        let mut worst = 0.0f64;
        for (idx, &z) in self.coeffs.iter().enumerate() {
            let coords = layout.coords(idx);
            let neg: Vec<i64> = coords.iter().map(|c| -c).collect();
            let w = self.at(&neg);
            worst = worst.max((w - z.conj()).norm());
        }
        worst
    }
}

/// `sum_eta |T(0; eta)|^2`: the squared L2 mass of the projection that
/// integrates out the torus variable. Uses the deterministic pairwise scheme.
pub fn plancherel_mass(t: &SpectralTensor) -> f64 {
    let zero = vec![0i64; t.shape().d()];
    let row = t.xi_slice(&zero).expect("origin is always inside the box");
    pairwise_map_sum(row.len(), &|i| row[i].norm_sqr())
}
