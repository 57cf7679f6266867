//! Brute-force reference implementation on the finite group `Z_N^d`.
//!
//! Everything here is deliberately naive: difference arrays by their defining
//! recursion, transforms as `O(N^{2d})` sums, norms as plain averages. This
//! module is the measuring stick the frequency-space engine is checked
//! against, so it shares no correlation or FFT code with it.

use crate::error::{Budget, Error, Result};
use crate::sum::{pairwise_map_sum, pairwise_map_sum_c64};
use crate::C64;
use std::f64::consts::TAU;

/// Complex-valued function on `Z_n^d`, row-major over `d` axes.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicFunction {
    d: usize,
    n: usize,
    values: Vec<C64>,
}

impl CyclicFunction {
    pub fn new(d: usize, n: usize, values: Vec<C64>) -> Result<CyclicFunction> {
        if d == 0 || n == 0 {
            return Err(Error::InvalidArgument("cyclic function needs d >= 1 and n >= 1".into()));
        }
        let want = n.pow(d as u32);
        if values.len() != want {
            return Err(Error::InvalidArgument(format!(
                "cyclic function on Z_{n}^{d} needs {want} values, got {}",
                values.len()
            )));
        }
        Ok(CyclicFunction { d, n, values })
    }

    pub fn from_fn(d: usize, n: usize, f: impl Fn(&[i64]) -> C64) -> Result<CyclicFunction> {
        let len = n.pow(d as u32);
        let values = (0..len).map(|i| f(&decode_point(i, d, n))).collect();
        CyclicFunction::new(d, n, values)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Value at a lattice point, coordinates reduced mod `n`.
    pub fn at(&self, x: &[i64]) -> C64 {
        self.values[flat_mod(x, self.n)]
    }

    pub fn mean(&self) -> C64 {
        pairwise_map_sum_c64(self.values.len(), &|i| self.values[i])
            / C64::new(self.values.len() as f64, 0.0)
    }
}

/// Multi-block array on `(Z_n^d)^blocks`; used for both physical difference
/// arrays (point block first, then the shift blocks) and frequency towers
/// (base frequency first, then the difference blocks, newest last/fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicArray {
    d: usize,
    n: usize,
    blocks: usize,
    values: Vec<C64>,
}

impl CyclicArray {
    fn new(d: usize, n: usize, blocks: usize, values: Vec<C64>) -> CyclicArray {
        debug_assert_eq!(values.len(), n.pow((d * blocks) as u32));
        CyclicArray { d, n, blocks, values }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Entry at full coordinates (all blocks concatenated), reduced mod `n`.
    pub fn at(&self, coords: &[i64]) -> C64 {
        debug_assert_eq!(coords.len(), self.d * self.blocks);
        self.values[flat_mod(coords, self.n)]
    }
}

fn flat_mod(coords: &[i64], n: usize) -> usize {
    let mut idx = 0usize;
    for &c in coords {
        idx = idx * n + c.rem_euclid(n as i64) as usize;
    }
    idx
}

fn decode_point(mut idx: usize, axes: usize, n: usize) -> Vec<i64> {
    let mut coords = vec![0i64; axes];
    for slot in coords.iter_mut().rev() {
        *slot = (idx % n) as i64;
        idx /= n;
    }
    coords
}

fn check_family_shapes(family: &[&CyclicFunction]) -> Result<(usize, usize)> {
    let (d, n) = (family[0].d, family[0].n);
    for f in family {
        if f.d != d || f.n != n {
            return Err(Error::InvalidArgument("family members live on different groups".into()));
        }
    }
    Ok((d, n))
}

/// `k`-fold difference array by the defining recursion: the newest shift
/// displaces the point variable and conjugates the second factor.
pub fn discrete_delta(f: &CyclicFunction, k: usize, budget: Budget) -> Result<CyclicArray> {
    let (d, n) = (f.d, f.n);
    budget.check(
        (n as u128).pow((d * (k + 1)) as u32),
        &format!("difference array on Z_{n}^{d} with {k} shifts"),
    )?;
    let block = n.pow(d as u32);
    let mut cur = CyclicArray::new(d, n, 1, f.values.clone());
    for _ in 0..k {
        let inner = cur.values.len() / block; // shift-block combos so far
        let mut next = Vec::with_capacity(cur.values.len() * block);
        // Precompute (x - v) block indices once per step.
        let shifted: Vec<usize> = (0..block * block)
            .map(|i| {
                let (x, v) = (i / block, i % block);
                let xc = decode_point(x, d, n);
                let vc = decode_point(v, d, n);
                let diff: Vec<i64> = xc.iter().zip(&vc).map(|(a, b)| a - b).collect();
                flat_mod(&diff, n)
            })
            .collect();
        for x in 0..block {
            for u in 0..inner {
                let lead = cur.values[x * inner + u];
                for v in 0..block {
                    let xs = shifted[x * block + v];
                    next.push(lead * cur.values[xs * inner + u].conj());
                }
            }
        }
        // Reorder: we produced (x, u, v) with v innermost, which is already
        // the target layout (newest shift block fastest).
        cur = CyclicArray::new(d, n, cur.blocks + 1, next);
    }
    Ok(cur)
}

/// Same `k`-fold difference evaluated at one point from the closed product
/// over the shift hypercube, conjugating on odd-weight corners. Written
/// independently of [`discrete_delta`] to serve as its oracle.
pub fn closed_product_delta_at(f: &CyclicFunction, k: usize, point: &[i64]) -> C64 {
    let d = f.d;
    debug_assert_eq!(point.len(), d * (k + 1));
    let x = &point[..d];
    let mut prod = C64::new(1.0, 0.0);
    for corner in 0u32..(1 << k) {
        let mut pos: Vec<i64> = x.to_vec();
        for t in 0..k {
            // Bit t of the corner toggles the (t+1)-th shift.
            if corner >> t & 1 == 1 {
                let u = &point[d * (t + 1)..d * (t + 2)];
                for (p, &s) in pos.iter_mut().zip(u) {
                    *p -= s;
                }
            }
        }
        let val = f.at(&pos);
        prod *= if corner.count_ones() % 2 == 1 { val.conj() } else { val };
    }
    prod
}

/// Uniformity norm of order `k >= 1` on the group: the `2^k`-th root of the
/// full average of the `k`-fold difference array.
pub fn discrete_uk_norm(f: &CyclicFunction, k: usize, budget: Budget) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("norm order k must be >= 1".into()));
    }
    let arr = discrete_delta(f, k, budget)?;
    let total = arr.values.len();
    let mean = pairwise_map_sum_c64(total, &|i| arr.values[i]) / C64::new(total as f64, 0.0);
    // The average is a mean of squared magnitudes, so any imaginary residue
    // is pure rounding.
    debug_assert!(mean.im.abs() <= 1e-12 * mean.re.abs().max(1.0));
    Ok(mean.re.max(0.0).powf(0.5f64.powi(k as i32)))
}

/// Normalized transform `E_x f(x) e(-xi.x / n)` as an explicit double loop.
pub fn naive_dft(f: &CyclicFunction) -> CyclicFunction {
    let (d, n) = (f.d, f.n);
    let len = f.values.len();
    let inv = 1.0 / len as f64;
    let values = (0..len)
        .map(|xi_flat| {
            let xi = decode_point(xi_flat, d, n);
            pairwise_map_sum_c64(len, &|x_flat| {
                let x = decode_point(x_flat, d, n);
                let dot: i64 = xi.iter().zip(&x).map(|(a, b)| a * b).sum();
                f.values[x_flat] * C64::from_polar(1.0, -TAU * dot as f64 / n as f64)
            }) * inv
        })
        .collect();
    CyclicFunction { d, n, values }
}

/// Inverse of [`naive_dft`]: `sum_xi fhat(xi) e(+xi.x / n)`.
pub fn naive_idft(fhat: &CyclicFunction) -> CyclicFunction {
    let (d, n) = (fhat.d, fhat.n);
    let len = fhat.values.len();
    let values = (0..len)
        .map(|x_flat| {
            let x = decode_point(x_flat, d, n);
            pairwise_map_sum_c64(len, &|xi_flat| {
                let xi = decode_point(xi_flat, d, n);
                let dot: i64 = xi.iter().zip(&x).map(|(a, b)| a * b).sum();
                fhat.values[xi_flat] * C64::from_polar(1.0, TAU * dot as f64 / n as f64)
            })
        })
        .collect();
    CyclicFunction { d, n, values }
}

/// Normalized cyclic convolution `(kernel * f)(x) = E_y kernel(y) f(x - y)`
/// with a real kernel table on the same grid; a unit-mean kernel preserves
/// the mean of `f`.
pub fn cyclic_convolve(kernel: &[f64], f: &CyclicFunction) -> Result<CyclicFunction> {
    let total = f.values.len();
    if kernel.len() != total {
        return Err(Error::DimensionMismatch { expected: total, got: kernel.len() });
    }
    let (d, n) = (f.d, f.n);
    let inv = 1.0 / total as f64;
    let values = (0..total)
        .map(|x_flat| {
            let x = decode_point(x_flat, d, n);
            pairwise_map_sum_c64(total, &|y_flat| {
                let y = decode_point(y_flat, d, n);
                let diff: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
                f.values[flat_mod(&diff, n)] * kernel[y_flat]
            }) * inv
        })
        .collect();
    Ok(CyclicFunction { d, n, values })
}

/// One frequency-side difference step on the full cyclic lattice
/// (no truncation): `out(xi; eta', lam) = sum_b t0(xi+lam; b) conj(t1(lam; b-eta'))`.
pub fn cyclic_delta_step(t0: &CyclicArray, t1: &CyclicArray) -> Result<CyclicArray> {
    if t0.d != t1.d || t0.n != t1.n || t0.blocks != t1.blocks {
        return Err(Error::InvalidArgument("cyclic tensors differ in shape".into()));
    }
    let (d, n) = (t0.d, t0.n);
    let block = n.pow(d as u32);
    let eta_axes = d * (t0.blocks - 1);
    let eta_len = n.pow(eta_axes as u32);
    let mut out = Vec::with_capacity(t0.values.len() * block);
    let add_block = |a: usize, b: usize| {
        let ac = decode_point(a, d, n);
        let bc = decode_point(b, d, n);
        let sum: Vec<i64> = ac.iter().zip(&bc).map(|(x, y)| x + y).collect();
        flat_mod(&sum, n)
    };
    let sub_eta = |a: usize, b: usize| {
        if eta_axes == 0 {
            return 0;
        }
        let ac = decode_point(a, eta_axes, n);
        let bc = decode_point(b, eta_axes, n);
        let diff: Vec<i64> = ac.iter().zip(&bc).map(|(x, y)| x - y).collect();
        flat_mod(&diff, n)
    };
    for xf in 0..block {
        for ef in 0..eta_len {
            for lf in 0..block {
                let xs = add_block(xf, lf);
                let sum = pairwise_map_sum_c64(eta_len, &|bf| {
                    t0.values[xs * eta_len + bf] * t1.values[lf * eta_len + sub_eta(bf, ef)].conj()
                });
                out.push(sum);
            }
        }
    }
    Ok(CyclicArray::new(d, n, t0.blocks + 1, out))
}

/// Frequency-side tower of `f` up to level `top` (level 0 is its transform).
pub fn cyclic_tower(f: &CyclicFunction, top: usize, budget: Budget) -> Result<Vec<CyclicArray>> {
    budget.check(
        (f.n as u128).pow((f.d * (top + 1)) as u32),
        &format!("cyclic tower on Z_{}^{} to level {top}", f.n, f.d),
    )?;
    let base = naive_dft(f);
    let mut levels = vec![CyclicArray::new(f.d, f.n, 1, base.values)];
    for _ in 0..top {
        let next = cyclic_delta_step(levels.last().unwrap(), levels.last().unwrap())?;
        levels.push(next);
    }
    Ok(levels)
}

/// Norm of order `k` from the frequency tower: the `2^k`-th root of
/// `sum_eta |T_{k-1}(0; eta)|^2`. Independent route against
/// [`discrete_uk_norm`].
pub fn discrete_uk_fourier(f: &CyclicFunction, k: usize, budget: Budget) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("norm order k must be >= 1".into()));
    }
    let levels = cyclic_tower(f, k - 1, budget)?;
    let top = &levels[k - 1];
    let eta_len = top.values.len() / top.n.pow(top.d as u32);
    // The zero base frequency is block-flat index 0, so its row leads.
    let row = &top.values[..eta_len];
    let mass = pairwise_map_sum(eta_len, &|i| row[i].norm_sqr());
    Ok(mass.powf(0.5f64.powi(k as i32)))
}

/// Multilinear average of a family of `2^{k+1}` functions over all points and
/// shift tuples: member `i` is evaluated at `x - sum(bit_t(i) * u_{t+1})` and
/// conjugated when `i` has odd bit weight.
pub fn discrete_inner_product(family: &[&CyclicFunction], budget: Budget) -> Result<C64> {
    let size = family.len();
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::FamilySize { expected: size.next_power_of_two().max(2), got: size });
    }
    let (d, n) = check_family_shapes(family)?;
    let shifts = size.trailing_zeros() as usize; // k + 1
    let axes = d * (shifts + 1);
    budget.check(
        (n as u128).pow(axes as u32),
        &format!("inner product average on Z_{n}^{d} with {shifts} shifts"),
    )?;
    let total = n.pow(axes as u32);
    let sum = pairwise_map_sum_c64(total, &|flat| {
        let coords = decode_point(flat, axes, n);
        let x = &coords[..d];
        let mut prod = C64::new(1.0, 0.0);
        for (i, f) in family.iter().enumerate() {
            let mut pos: Vec<i64> = x.to_vec();
            for t in 0..shifts {
                if i >> t & 1 == 1 {
                    let u = &coords[d * (t + 1)..d * (t + 2)];
                    for (p, &s) in pos.iter_mut().zip(u) {
                        *p -= s;
                    }
                }
            }
            let val = f.at(&pos);
            prod *= if (i.count_ones() % 2) == 1 { val.conj() } else { val };
        }
        prod
    });
    Ok(sum / C64::new(total as f64, 0.0))
}
