//! Timing and agreement sweep over the two correlation backends.
//!
//! Each radius produces one naive row and one FFT row that share a
//! `max_abs_diff` column, so agreement and speed can be read off together.

use crate::corr::{CorrelationPlan, NaivePlan};
use crate::error::{Budget, Result};
use crate::freq::FreqBox;
use crate::C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

pub const BENCH_CSV_HEADER: &str = "backend,d,k,M,elements,seconds,max_abs_diff";

/// One timed correlation run.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub backend: String,
    pub d: usize,
    /// Number of difference blocks in the correlated rows.
    pub k: usize,
    pub m: usize,
    /// Row length handed to the backend.
    pub elements: u64,
    pub seconds: f64,
    /// Worst entry-wise disagreement between the two backends at this size.
    pub max_abs_diff: f64,
}

impl BenchRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.9},{:e}",
            self.backend, self.d, self.k, self.m, self.elements, self.seconds, self.max_abs_diff
        )
    }
}

/// Correlates the same unit-norm random row pair with both backends at each
/// radius in `ms`, timing each and recording the worst disagreement.
pub fn run_correlation_bench(
    d: usize,
    r: usize,
    ms: &[usize],
    seed: u64,
    budget: Budget,
) -> Result<Vec<BenchRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * ms.len());
    for &m in ms {
        let shape = FreqBox::new(d, r, m, budget)?;
        let len = shape.eta_len();
        let axes = d * r;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<C64> {
            let mut v: Vec<C64> = (0..len)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                for z in &mut v {
                    *z /= norm;
                }
            }
            v
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);

        let naive_plan = NaivePlan::new(axes, m);
        let start = Instant::now();
        let naive_out = naive_plan.correlate(&a, &b);
        let naive_seconds = start.elapsed().as_secs_f64();

        let fft_plan = CorrelationPlan::new(axes, m);
        budget.check(fft_plan.padded_len() as u128, "padded correlation grid")?;
        let start = Instant::now();
        let fft_out = fft_plan.correlate(&a, &b);
        let fft_seconds = start.elapsed().as_secs_f64();

        let max_abs_diff = naive_out
            .iter()
            .zip(&fft_out)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0f64, f64::max);

        for (backend, seconds) in [("naive", naive_seconds), ("fft", fft_seconds)] {
            rows.push(BenchRow {
                backend: backend.to_string(),
                d,
                k: r,
                m,
                elements: len as u64,
                seconds,
                max_abs_diff,
            });
        }
    }
    Ok(rows)
}
