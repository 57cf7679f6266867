//! Difference towers over truncated frequency boxes.
//!
//! One step takes two level-`r` tensors to a level-`r+1` tensor:
//!
//! ```text
//! out(xi; eta', lam) = sum_c T0(xi + lam; c) * conj(T1(lam; c - eta'))
//! ```
//!
//! where `lam` is the newly created (last) difference block and `c` runs over
//! the input `eta` cube. For each fixed `(xi, lam)` this is exactly a
//! cross-correlation of two coefficient rows, so both correlation backends
//! apply unchanged. Iterating the step on a measure's own level-0 tensor
//! yields the tower whose origin-row masses give the uniformity norms.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::corr::{Backend, CorrelationPlan, NaivePlan};
use crate::error::{Error, Result};
use crate::freq::{plancherel_mass, FreqBox, SpectralTensor};
use crate::measure::{embed_tensor, MeasureSpec};
use crate::sum::pairwise_map_sum_c64;
use crate::{C64, EngineOpts};

/// One difference step: `(T0, T1)` at level `r` to their pairing at `r + 1`.
pub fn delta_step(t0: &SpectralTensor, t1: &SpectralTensor, opts: &EngineOpts) -> Result<SpectralTensor> {
    let shape = t0.shape();
    let other = t1.shape();
    if shape != other {
        return Err(Error::BoxMismatch {
            left_d: shape.d(),
            left_r: shape.r(),
            left_m: shape.m(),
            right_d: other.d(),
            right_r: other.r(),
            right_m: other.m(),
        });
    }
    let out_shape = shape.extended(opts.budget)?;
    let d = shape.d();
    let m = shape.m();
    let axes = d * shape.r();
    let xi_len = shape.xi_len();
    let in_eta_len = shape.eta_len();
    let out_eta_len = out_shape.eta_len();

    // Block coordinates for every d-length lattice point, shared by the xi
    // and lam loops (both range over the same block).
    let block_coords: Vec<i64> =
        (0..xi_len).flat_map(|i| shape.block_coords(i)).collect();
    let row_of = |x: usize, l: usize| -> Option<usize> {
        let xc = &block_coords[x * d..(x + 1) * d];
        let lc = &block_coords[l * d..(l + 1) * d];
        let sum: Vec<i64> = xc.iter().zip(lc).map(|(a, b)| a + b).collect();
        shape.block_flat(&sum)
    };

    let mut coeffs = vec![C64::new(0.0, 0.0); out_shape.len()];
    match opts.backend.resolve(in_eta_len) {
        Backend::Fft => {
            let plan = CorrelationPlan::new(axes, m);
            opts.budget.check(
                (2 * xi_len as u128 + 1) * plan.padded_len() as u128,
                "delta step row spectra",
            )?;
            // Every row's transform is reused across many (xi, lam) pairs.
            let fa: Vec<Vec<C64>> =
                (0..xi_len).into_par_iter().map(|s| plan.forward(t0.xi_slice_flat(s))).collect();
            let fb: Vec<Vec<C64>> =
                (0..xi_len).into_par_iter().map(|l| plan.forward(t1.xi_slice_flat(l))).collect();
            coeffs.par_chunks_mut(out_eta_len).enumerate().for_each(|(x, chunk)| {
                for l in 0..xi_len {
                    let Some(srow) = row_of(x, l) else { continue };
                    let row = plan.correlate_spectra(&fa[srow], &fb[l]);
                    for (ep, val) in row.iter().enumerate() {
                        chunk[ep * xi_len + l] = *val;
                    }
                }
            });
        }
        _ => {
            let plan = NaivePlan::new(axes, m);
            coeffs.par_chunks_mut(out_eta_len).enumerate().for_each(|(x, chunk)| {
                for l in 0..xi_len {
                    let Some(srow) = row_of(x, l) else { continue };
                    let row = plan.correlate(t0.xi_slice_flat(srow), t1.xi_slice_flat(l));
                    for (ep, val) in row.iter().enumerate() {
                        chunk[ep * xi_len + l] = *val;
                    }
                }
            });
        }
    }
    SpectralTensor::from_parts(out_shape, coeffs, t0.real_derived() && t1.real_derived())
}

/// Tower `levels[j] = j`-fold difference of one measure with itself,
/// `levels[0]` being its raw coefficients on the box.
#[derive(Debug, Clone)]
pub struct DeltaTower {
    levels: Vec<SpectralTensor>,
}

impl DeltaTower {
    pub fn levels(&self) -> &[SpectralTensor] {
        &self.levels
    }

    /// Highest level index present.
    pub fn built(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, j: usize) -> Result<&SpectralTensor> {
        self.levels.get(j).ok_or(Error::LevelMissing { requested: j, built: self.built() })
    }

    pub fn d(&self) -> usize {
        self.levels[0].shape().d()
    }

    pub fn m(&self) -> usize {
        self.levels[0].shape().m()
    }
}

/// Build levels `0..=top` of the self-difference tower of `spec` on the
/// radius-`m` box.
pub fn build_tower(spec: &MeasureSpec, top: usize, m: usize, opts: &EngineOpts) -> Result<DeltaTower> {
    let oracle = spec.oracle()?;
    let base = FreqBox::new(oracle.dim(), 0, m, opts.budget)?;
    let mut levels = vec![embed_tensor(&oracle, base)?];
    for _ in 0..top {
        let next = delta_step(levels.last().unwrap(), levels.last().unwrap(), opts)?;
        levels.push(next);
    }
    Ok(DeltaTower { levels })
}

/// Truncated uniformity norm of order `k >= 1`: the `2^k`-th root of the
/// origin-row mass of level `k - 1`.
pub fn uk_norm(tower: &DeltaTower, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("norm order k must be >= 1".into()));
    }
    let mass = plancherel_mass(tower.level(k - 1)?);
    Ok(mass.powf(0.5f64.powi(k as i32)))
}

/// Convenience: tower plus norm in one call.
pub fn measure_uk_norm(spec: &MeasureSpec, k: usize, m: usize, opts: &EngineOpts) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("norm order k must be >= 1".into()));
    }
    uk_norm(&build_tower(spec, k - 1, m, opts)?, k)
}

/// Multilinear pairing of a family of `2^{k+1}` level-0 tensors (all on one
/// box). Integer index bits select the side taken at each split; the high bit
/// is the outermost one, so the low half of the slice forms the left tower.
pub fn inner_product(family: &[SpectralTensor], opts: &EngineOpts) -> Result<C64> {
    let n = family.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::FamilySize { expected: n.next_power_of_two().max(2), got: n });
    }
    let shape = family[0].shape();
    if shape.r() != 0 {
        return Err(Error::InvalidArgument("family members must be level-0 tensors".into()));
    }
    for t in &family[1..] {
        if t.shape() != shape {
            return Err(Error::BoxMismatch {
                left_d: shape.d(),
                left_r: shape.r(),
                left_m: shape.m(),
                right_d: t.shape().d(),
                right_r: t.shape().r(),
                right_m: t.shape().m(),
            });
        }
    }
    let t0 = mixed_level(&family[..n / 2], opts)?;
    let t1 = mixed_level(&family[n / 2..], opts)?;
    let zero = vec![0i64; shape.d()];
    let a = t0.xi_slice(&zero)?;
    let b = t1.xi_slice(&zero)?;
    Ok(pairwise_map_sum_c64(a.len(), &|i| a[i] * b[i].conj()))
}

fn mixed_level(fam: &[SpectralTensor], opts: &EngineOpts) -> Result<SpectralTensor> {
    if fam.len() == 1 {
        return Ok(fam[0].clone());
    }
    let half = fam.len() / 2;
    let t0 = mixed_level(&fam[..half], opts)?;
    let t1 = mixed_level(&fam[half..], opts)?;
    delta_step(&t0, &t1, opts)
}

/// How a norm series behaves along a growing truncation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Growing,
    Undetermined,
}

/// Verdict for one series of norm values along the schedule: converged when
/// the final relative increment is below 1e-6; growing when the last up-to-3
/// increments all exceed 1%; undetermined otherwise.
pub fn classify_tail(values: &[f64]) -> Verdict {
    if values.len() < 2 {
        return Verdict::Undetermined;
    }
    let rel = |a: f64, b: f64| (b - a).abs() / a.abs().max(b.abs()).max(1e-300);
    let incs: Vec<f64> = values.windows(2).map(|w| rel(w[0], w[1])).collect();
    if *incs.last().unwrap() < 1e-6 {
        return Verdict::Converged;
    }
    let look = incs.len().min(3);
    if incs[incs.len() - look..].iter().all(|&r| r >= 0.01) {
        return Verdict::Growing;
    }
    Verdict::Undetermined
}

/// Norm values per order along a truncation schedule, with tail verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub d: usize,
    pub k_max: usize,
    pub backend: Backend,
    pub schedule: Vec<usize>,
    pub series: Vec<KSeries>,
    pub spec_digest: String,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct KSeries {
    pub k: usize,
    pub values: Vec<f64>,
    pub verdict: Verdict,
}

/// Wall-clock block, kept separate from the payload so that byte-level
/// comparisons of reports can strip it.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
}

/// Norms of order `1..=k_max` at every radius in `schedule`, with a growth
/// verdict per order.
pub fn tail_report(
    spec: &MeasureSpec,
    k_max: usize,
    schedule: &[usize],
    opts: &EngineOpts,
) -> Result<NormReport> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be >= 1".into()));
    }
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("truncation schedule is empty".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "truncation schedule must be strictly increasing".into(),
        ));
    }
    let start = Instant::now();
    let mut values = vec![Vec::with_capacity(schedule.len()); k_max];
    for &m in schedule {
        let tower = build_tower(spec, k_max - 1, m, opts)?;
        for k in 1..=k_max {
            values[k - 1].push(uk_norm(&tower, k)?);
        }
    }
    let series = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| KSeries { k: i + 1, verdict: classify_tail(&v), values: v })
        .collect();
    Ok(NormReport {
        d: spec.dim()?,
        k_max,
        backend: opts.backend,
        schedule: schedule.to_vec(),
        series,
        spec_digest: spec.digest(),
        timing: Timing { total_seconds: start.elapsed().as_secs_f64() },
    })
}
