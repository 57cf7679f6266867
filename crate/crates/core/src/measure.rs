//! Measure families as Fourier coefficient oracles.
//!
//! A spec is a finite description (atoms, grid samples, self-similar digit
//! sets, scalings, sums); its oracle maps a lattice point to the exact
//! coefficient of the measure it denotes. No spatial discretization happens
//! here: atoms and Cantor-type sets stay singular.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::freq::{FreqBox, SpectralTensor};
use crate::sum::pairwise_map_sum_c64;
use crate::C64;

/// Complex scalar in spec JSON: a bare number, a decimal string, or `[re, im]`.
/// Serializes as `[re, im]` so reports round-trip byte-identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CNum(pub C64);

impl Serialize for CNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.0.re, self.0.im).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CNum;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, a decimal string, or [re, im]")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<CNum, E> {
                Ok(CNum(C64::new(v, 0.0)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<CNum, E> {
                Ok(CNum(C64::new(v as f64, 0.0)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<CNum, E> {
                Ok(CNum(C64::new(v as f64, 0.0)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<CNum, E> {
                v.parse::<f64>()
                    .map(|x| CNum(C64::new(x, 0.0)))
                    .map_err(|_| E::custom(format!("`{v}` is not a decimal number")))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<CNum, A::Error> {
                let re: RNum =
                    seq.next_element()?.ok_or_else(|| de::Error::custom("empty complex pair"))?;
                let im: RNum = seq.next_element()?.unwrap_or(RNum(0.0));
                if seq.next_element::<RNum>()?.is_some() {
                    return Err(de::Error::custom("complex pair holds more than two entries"));
                }
                Ok(CNum(C64::new(re.0, im.0)))
            }
        }
        d.deserialize_any(V)
    }
}

/// Real scalar in spec JSON: a bare number or a decimal string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RNum(pub f64);

impl Serialize for RNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for RNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RNum;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a decimal string")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<RNum, E> {
                Ok(RNum(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RNum, E> {
                Ok(RNum(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RNum, E> {
                Ok(RNum(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RNum, E> {
                v.parse::<f64>().map(RNum).map_err(|_| E::custom(format!("`{v}` is not a decimal number")))
            }
        }
        d.deserialize_any(V)
    }
}

/// One weighted point mass: weight `w`, position `x` in `[0,1)^d`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub w: CNum,
    pub x: Vec<RNum>,
}

/// Serializable description of a finite complex measure on the torus.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// Finite sum of weighted point masses.
    Atomic { atoms: Vec<Atom> },
    /// Band-limited density given by `n^d` samples on the uniform grid;
    /// the measure is the trigonometric interpolant times Lebesgue.
    GridDensity { d: usize, n: usize, samples: Vec<CNum> },
    /// Depth-`depth` stage of the self-similar set with the given digit set
    /// in base `base` (each digit a `d`-tuple), uniformly weighted.
    SelfSimilar { base: u32, digits: Vec<Vec<u32>>, depth: u32 },
    /// `factor * inner`.
    Scaled { factor: CNum, inner: Box<MeasureSpec> },
    /// Sum of measures on the same torus.
    Sum { terms: Vec<MeasureSpec> },
}

impl MeasureSpec {
    pub fn atomic(atoms: Vec<(C64, Vec<f64>)>) -> MeasureSpec {
        MeasureSpec::Atomic {
            atoms: atoms
                .into_iter()
                .map(|(w, x)| Atom { w: CNum(w), x: x.into_iter().map(RNum).collect() })
                .collect(),
        }
    }

    pub fn dirac(position: Vec<f64>) -> MeasureSpec {
        MeasureSpec::atomic(vec![(C64::new(1.0, 0.0), position)])
    }

    /// Haar probability measure: the constant-1 density.
    pub fn lebesgue(d: usize) -> MeasureSpec {
        MeasureSpec::GridDensity { d, n: 1, samples: vec![CNum(C64::new(1.0, 0.0))] }
    }

    pub fn grid_density_real(d: usize, n: usize, samples: Vec<f64>) -> MeasureSpec {
        MeasureSpec::GridDensity {
            d,
            n,
            samples: samples.into_iter().map(|v| CNum(C64::new(v, 0.0))).collect(),
        }
    }

    /// Middle-thirds Cantor construction truncated at `depth`.
    pub fn cantor_middle_thirds(depth: u32) -> MeasureSpec {
        MeasureSpec::SelfSimilar { base: 3, digits: vec![vec![0], vec![2]], depth }
    }

    pub fn dim(&self) -> Result<usize> {
        match self {
            MeasureSpec::Atomic { atoms } => match atoms.first() {
                Some(a) => Ok(a.x.len()),
                None => Err(Error::InvalidArgument("atomic spec holds no atoms".into())),
            },
            MeasureSpec::GridDensity { d, .. } => Ok(*d),
            MeasureSpec::SelfSimilar { digits, .. } => match digits.first() {
                Some(t) => Ok(t.len()),
                None => Err(Error::InvalidArgument("self-similar spec holds no digits".into())),
            },
            MeasureSpec::Scaled { inner, .. } => inner.dim(),
            MeasureSpec::Sum { terms } => match terms.first() {
                Some(t) => t.dim(),
                None => Err(Error::InvalidArgument("sum spec holds no terms".into())),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::Atomic { atoms } => {
                let d = self.dim()?;
                if d == 0 {
                    return Err(Error::InvalidArgument("atom positions must have d >= 1".into()));
                }
                for (i, a) in atoms.iter().enumerate() {
                    if a.x.len() != d {
                        return Err(Error::InvalidArgument(format!(
                            "atom {i} has {} coordinates, expected {d}",
                            a.x.len()
                        )));
                    }
                    for &RNum(c) in &a.x {
                        if !(0.0..1.0).contains(&c) {
                            return Err(Error::InvalidArgument(format!(
                                "atom {i} position {c} outside [0,1)"
                            )));
                        }
                    }
                }
                Ok(())
            }
            MeasureSpec::GridDensity { d, n, samples } => {
                if *d == 0 || *n == 0 {
                    return Err(Error::InvalidArgument("grid density needs d >= 1 and n >= 1".into()));
                }
                let want = n.pow(*d as u32);
                if samples.len() != want {
                    return Err(Error::InvalidArgument(format!(
                        "grid density declares n={n}, d={d} but holds {} samples (need {want})",
                        samples.len()
                    )));
                }
                Ok(())
            }
            MeasureSpec::SelfSimilar { base, digits, depth } => {
                if *base < 2 {
                    return Err(Error::InvalidArgument("self-similar base must be >= 2".into()));
                }
                if *depth == 0 {
                    return Err(Error::InvalidArgument("self-similar depth must be >= 1".into()));
                }
                let d = self.dim()?;
                if d == 0 {
                    return Err(Error::InvalidArgument("digit tuples must have d >= 1".into()));
                }
                let mut seen = std::collections::BTreeSet::new();
                for tuple in digits {
                    if tuple.len() != d {
                        return Err(Error::InvalidArgument("digit tuples differ in length".into()));
                    }
                    if tuple.iter().any(|&a| a >= *base) {
                        return Err(Error::InvalidArgument(format!(
                            "digit {tuple:?} outside base {base}"
                        )));
                    }
                    if !seen.insert(tuple.clone()) {
                        return Err(Error::InvalidArgument(format!("duplicate digit {tuple:?}")));
                    }
                }
                Ok(())
            }
            MeasureSpec::Scaled { inner, .. } => inner.validate(),
            MeasureSpec::Sum { terms } => {
                let d = self.dim()?;
                for t in terms {
                    t.validate()?;
                    if t.dim()? != d {
                        return Err(Error::DimensionMismatch { expected: d, got: t.dim()? });
                    }
                }
                Ok(())
            }
        }
    }

    /// Coefficient oracle for the measure this spec denotes.
    pub fn oracle(&self) -> Result<CoeffOracle> {
        self.validate()?;
        match self {
            MeasureSpec::Atomic { atoms } => {
                let pairs: Vec<(C64, Vec<f64>)> =
                    atoms.iter().map(|a| (a.w.0, a.x.iter().map(|r| r.0).collect())).collect();
                fourier_atoms(self.dim()?, pairs)
            }
            MeasureSpec::GridDensity { d, n, samples } => {
                fourier_density_grid(*d, *n, samples.iter().map(|c| c.0).collect())
            }
            MeasureSpec::SelfSimilar { base, digits, depth } => {
                fourier_self_similar(self.dim()?, *base, digits.clone(), *depth)
            }
            MeasureSpec::Scaled { factor, inner } => {
                let inner = inner.oracle()?;
                let c = factor.0;
                let real = inner.real && c.im == 0.0;
                Ok(CoeffOracle {
                    d: inner.d,
                    band: inner.band,
                    real,
                    eval: Arc::new(move |xi: &[i64]| c * (inner.eval)(xi)),
                })
            }
            MeasureSpec::Sum { terms } => {
                let oracles: Vec<CoeffOracle> =
                    terms.iter().map(|t| t.oracle()).collect::<Result<_>>()?;
                let d = oracles[0].d;
                let band = oracles.iter().try_fold(0i64, |acc, o| o.band.map(|b| acc.max(b)));
                let real = oracles.iter().all(|o| o.real);
                Ok(CoeffOracle {
                    d,
                    band,
                    real,
                    eval: Arc::new(move |xi: &[i64]| {
                        oracles.iter().map(|o| (o.eval)(xi)).fold(C64::new(0.0, 0.0), |a, b| a + b)
                    }),
                })
            }
        }
    }

    /// Spec of the total-variation companion `|mu|`. Defined for atoms
    /// (absolute weights at merged positions) and real grid densities
    /// (absolute samples on the same grid); everything else is rejected.
    pub fn total_variation(&self) -> Result<MeasureSpec> {
        self.validate()?;
        match self {
            MeasureSpec::Atomic { atoms } => {
                // Merge coincident positions before taking moduli: the measure
                // carries one atom there, not several.
                let mut merged: BTreeMap<Vec<u64>, (C64, Vec<RNum>)> = BTreeMap::new();
                for a in atoms {
                    let key: Vec<u64> = a.x.iter().map(|r| r.0.to_bits()).collect();
                    let entry = merged.entry(key).or_insert((C64::new(0.0, 0.0), a.x.clone()));
                    entry.0 += a.w.0;
                }
                Ok(MeasureSpec::Atomic {
                    atoms: merged
                        .into_values()
                        .map(|(w, x)| Atom { w: CNum(C64::new(w.norm(), 0.0)), x })
                        .collect(),
                })
            }
            MeasureSpec::GridDensity { d, n, samples } => {
                if samples.iter().any(|c| c.0.im != 0.0) {
                    return Err(Error::UnsupportedVariant(
                        "total variation of a complex grid density".into(),
                    ));
                }
                Ok(MeasureSpec::GridDensity {
                    d: *d,
                    n: *n,
                    samples: samples.iter().map(|c| CNum(C64::new(c.0.re.abs(), 0.0))).collect(),
                })
            }
            other => Err(Error::UnsupportedVariant(format!(
                "total variation of {} specs",
                other.variant_name()
            ))),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            MeasureSpec::Atomic { .. } => "atomic",
            MeasureSpec::GridDensity { .. } => "grid_density",
            MeasureSpec::SelfSimilar { .. } => "self_similar",
            MeasureSpec::Scaled { .. } => "scaled",
            MeasureSpec::Sum { .. } => "sum",
        }
    }

    /// Short content hash of the canonical JSON form, for report provenance.
    pub fn digest(&self) -> String {
        digest_json(self)
    }
}

/// Hash any serializable input description down to 16 hex chars.
pub fn digest_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("spec serialization cannot fail");
    let hash = Sha256::digest(&bytes);
    hash[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Shared closure computing one Fourier coefficient from its frequency.
type EvalFn = Arc<dyn Fn(&[i64]) -> C64 + Send + Sync>;

/// Exact coefficient evaluator `xi -> mu_hat(xi)` with band metadata.
#[derive(Clone)]
pub struct CoeffOracle {
    d: usize,
    band: Option<i64>,
    real: bool,
    eval: EvalFn,
}

impl CoeffOracle {
    pub fn eval(&self, xi: &[i64]) -> C64 {
        debug_assert_eq!(xi.len(), self.d);
        (self.eval)(xi)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Coefficients vanish for `|xi_i|` beyond this radius, when known.
    pub fn band_limit(&self) -> Option<i64> {
        self.band
    }

    /// Whether the underlying measure is real (coefficients conjugate-symmetric).
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn total_mass(&self) -> C64 {
        self.eval(&vec![0; self.d])
    }
}

impl fmt::Debug for CoeffOracle {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.debug_struct("CoeffOracle")
            .field("d", &self.d)
            .field("band", &self.band)
            .field("real", &self.real)
            .finish()
    }
}

/// `mu_hat(xi) = sum_j w_j exp(-2 pi i xi . x_j)`.
pub fn fourier_atoms(d: usize, atoms: Vec<(C64, Vec<f64>)>) -> Result<CoeffOracle> {
    if atoms.is_empty() {
        return Err(Error::InvalidArgument("atomic spec holds no atoms".into()));
    }
    for (w, x) in &atoms {
        let _ = w;
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        if x.iter().any(|&c| !(0.0..1.0).contains(&c)) {
            return Err(Error::InvalidArgument("atom position outside [0,1)".into()));
        }
    }
    let real = atoms.iter().all(|(w, _)| w.im == 0.0);
    Ok(CoeffOracle {
        d,
        band: None,
        real,
        eval: Arc::new(move |xi: &[i64]| {
            pairwise_map_sum_c64(atoms.len(), &|j| {
                let (w, x) = &atoms[j];
                let dot: f64 = xi.iter().zip(x).map(|(&k, &c)| k as f64 * c).sum();
                w * C64::from_polar(1.0, -TAU * dot)
            })
        }),
    })
}

/// Normalized grid transform: `mu_hat(xi) = N^{-d} sum_j f_j exp(-2 pi i xi . j / N)`
/// inside the band `|xi_i| <= floor(N/2)`, zero outside.
///
/// For even `N` the shared edge bin `|xi_i| = N/2` is split half-and-half so
/// the interpolant stays conjugate-symmetric and reproduces the samples.
pub fn fourier_density_grid(d: usize, n: usize, samples: Vec<C64>) -> Result<CoeffOracle> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument("grid density needs d >= 1 and n >= 1".into()));
    }
    if samples.len() != n.pow(d as u32) {
        return Err(Error::InvalidArgument(format!(
            "grid density needs {} samples, got {}",
            n.pow(d as u32),
            samples.len()
        )));
    }
    let real = samples.iter().all(|z| z.im == 0.0);
    let band = (n / 2) as i64;
    let nn = n as i64;
    Ok(CoeffOracle {
        d,
        band: Some(band),
        real,
        eval: Arc::new(move |xi: &[i64]| {
            if xi.iter().any(|&k| k.abs() > band) {
                return C64::new(0.0, 0.0);
            }
            let mut edge = 1.0f64;
            for &k in xi {
                if nn % 2 == 0 && k.abs() * 2 == nn {
                    edge *= 0.5;
                }
            }
            let total = samples.len();
            let inv = 1.0 / total as f64;
            let sum = pairwise_map_sum_c64(total, &|flat| {
                // Decode the row-major grid index into d coordinates.
                let mut rest = flat;
                let mut dot = 0.0f64;
                for t in (0..d).rev() {
                    let j = (rest % n) as f64;
                    rest /= n;
                    dot += xi[t] as f64 * j;
                }
                samples[flat] * C64::from_polar(1.0, -TAU * dot / n as f64)
            });
            sum * inv * edge
        }),
    })
}

/// Truncated self-similar transform:
/// `mu_hat(xi) = prod_{j=1..depth} |D|^{-1} sum_{a in D} exp(-2 pi i xi . a / base^j)`.
///
/// This equals the atomic stage with `|D|^depth` uniformly weighted points,
/// without ever enumerating them.
pub fn fourier_self_similar(
    d: usize,
    base: u32,
    digits: Vec<Vec<u32>>,
    depth: u32,
) -> Result<CoeffOracle> {
    if base < 2 || depth == 0 || digits.is_empty() {
        return Err(Error::InvalidArgument("self-similar spec needs base >= 2, depth >= 1, digits".into()));
    }
    if digits.iter().any(|t| t.len() != d) {
        return Err(Error::InvalidArgument("digit tuples differ in length".into()));
    }
    Ok(CoeffOracle {
        d,
        band: None,
        real: true,
        eval: Arc::new(move |xi: &[i64]| {
            let inv = 1.0 / digits.len() as f64;
            let mut prod = C64::new(1.0, 0.0);
            let mut scale = 1.0f64;
            for _ in 0..depth {
                scale /= base as f64;
                let mut factor = C64::new(0.0, 0.0);
                for a in &digits {
                    let dot: f64 = xi.iter().zip(a).map(|(&k, &c)| k as f64 * c as f64).sum();
                    factor += C64::from_polar(1.0, -TAU * dot * scale);
                }
                prod *= factor * inv;
            }
            prod
        }),
    })
}

/// Fill a zero-block box (`r = 0`) with oracle values.
pub fn embed_tensor(oracle: &CoeffOracle, shape: FreqBox) -> Result<SpectralTensor> {
    if shape.r() != 0 {
        return Err(Error::InvalidArgument(format!(
            "embedding targets a level-0 box, got r = {}",
            shape.r()
        )));
    }
    if shape.d() != oracle.dim() {
        return Err(Error::DimensionMismatch { expected: oracle.dim(), got: shape.d() });
    }
    let layout = shape.layout();
    let coeffs: Vec<C64> = (0..shape.len()).map(|idx| oracle.eval(&layout.coords(idx))).collect();
    SpectralTensor::from_parts(shape, coeffs, oracle.is_real())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;

    fn eval1(o: &CoeffOracle, k: i64) -> C64 {
        o.eval(&[k])
    }

    #[test]
    fn dirac_at_origin_has_unit_coefficients() {
        let o = MeasureSpec::dirac(vec![0.0]).oracle().unwrap();
        for k in -6..=6 {
            assert!((eval1(&o, k) - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn dirac_at_half_alternates_sign() {
        let o = MeasureSpec::dirac(vec![0.5]).oracle().unwrap();
        for k in -6i64..=6 {
            let want = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!((eval1(&o, k) - C64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn equal_mixture_kills_odd_frequencies() {
        let spec = MeasureSpec::atomic(vec![
            (C64::new(0.5, 0.0), vec![0.0]),
            (C64::new(0.5, 0.0), vec![0.5]),
        ]);
        let o = spec.oracle().unwrap();
        for k in -8i64..=8 {
            let want = if k.rem_euclid(2) == 0 { 1.0 } else { 0.0 };
            assert!((eval1(&o, k) - C64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn positions_outside_unit_cube_rejected() {
        let spec = MeasureSpec::atomic(vec![(C64::new(1.0, 0.0), vec![1.0])]);
        assert!(spec.oracle().is_err());
        let spec = MeasureSpec::atomic(vec![(C64::new(1.0, 0.0), vec![-0.1])]);
        assert!(spec.oracle().is_err());
    }

    #[test]
    fn lebesgue_is_the_unit_at_zero_and_nothing_else() {
        let o = MeasureSpec::lebesgue(1).oracle().unwrap();
        assert_eq!(eval1(&o, 0), C64::new(1.0, 0.0));
        for k in 1..=5 {
            assert_eq!(eval1(&o, k), C64::new(0.0, 0.0));
            assert_eq!(eval1(&o, -k), C64::new(0.0, 0.0));
        }
        assert_eq!(o.band_limit(), Some(0));
    }

    #[test]
    fn one_plus_cosine_grid_recovers_known_coefficients() {
        let n = 16;
        let samples: Vec<f64> =
            (0..n).map(|j| 1.0 + (TAU * j as f64 / n as f64).cos()).collect();
        let o = MeasureSpec::grid_density_real(1, n, samples).oracle().unwrap();
        assert!((eval1(&o, 0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((eval1(&o, 1) - C64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((eval1(&o, -1) - C64::new(0.5, 0.0)).norm() < 1e-14);
        for k in 2..=8 {
            assert!(eval1(&o, k).norm() < 1e-13, "leak at {k}");
        }
        assert!(eval1(&o, 9).norm() == 0.0, "outside the band");
    }

    #[test]
    fn grid_oracle_matches_independent_transform_inside_band() {
        // Oracle vs a from-scratch O(N^2) transform written without shared code.
        let n = 8usize;
        let vals = [0.3, -1.2, 0.8, 2.0, -0.4, 0.9, -1.5, 0.1];
        let o = MeasureSpec::grid_density_real(1, n, vals.to_vec()).oracle().unwrap();
        for k in -3i64..=3 {
            let mut acc = C64::new(0.0, 0.0);
            for (j, &v) in vals.iter().enumerate() {
                let ang = -TAU * k as f64 * j as f64 / n as f64;
                acc += C64::new(v * ang.cos(), v * ang.sin());
            }
            acc /= n as f64;
            assert!((eval1(&o, k) - acc).norm() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn grid_interpolant_reproduces_samples_with_split_edge_bins() {
        let n = 8usize;
        let vals = [1.0, -0.5, 0.25, 2.0, -1.0, 0.5, 1.5, -0.25];
        let o = MeasureSpec::grid_density_real(1, n, vals.to_vec()).oracle().unwrap();
        for (j, &v) in vals.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in -4i64..=4 {
                let ang = TAU * k as f64 * j as f64 / n as f64;
                acc += eval1(&o, k) * C64::new(ang.cos(), ang.sin());
            }
            assert!((acc - C64::new(v, 0.0)).norm() < 1e-13, "sample {j}");
        }
    }

    #[test]
    fn self_similar_stage_equals_its_atomic_expansion() {
        let spec = MeasureSpec::cantor_middle_thirds(6);
        let o = spec.oracle().unwrap();
        assert!((eval1(&o, 0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        // Enumerate all 2^6 stage atoms directly.
        let mut atoms = Vec::new();
        for bits in 0u32..64 {
            let mut x = 0.0f64;
            for j in 0..6 {
                let digit = if bits >> j & 1 == 1 { 2.0 } else { 0.0 };
                x += digit / 3f64.powi(j + 1);
            }
            atoms.push((C64::new(1.0 / 64.0, 0.0), vec![x]));
        }
        let expanded = fourier_atoms(1, atoms).unwrap();
        for k in [-9i64, -4, -1, 1, 2, 5, 13] {
            assert!((eval1(&o, k) - eval1(&expanded, k)).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn self_similar_depth_step_multiplies_one_factor() {
        let s6 = MeasureSpec::cantor_middle_thirds(6).oracle().unwrap();
        let s7 = MeasureSpec::cantor_middle_thirds(7).oracle().unwrap();
        for k in [-5i64, 1, 3, 8] {
            let scale = 1.0 / 3f64.powi(7);
            let dot = k as f64 * 2.0 * scale;
            let factor = (C64::new(1.0, 0.0) + C64::from_polar(1.0, -TAU * dot)) * 0.5;
            assert!((eval1(&s7, k) - eval1(&s6, k) * factor).norm() < 1e-14);
        }
    }

    #[test]
    fn oracles_of_real_specs_are_conjugate_symmetric() {
        let specs = [
            MeasureSpec::cantor_middle_thirds(4),
            MeasureSpec::atomic(vec![
                (C64::new(1.0, 0.0), vec![0.2]),
                (C64::new(-0.5, 0.0), vec![0.7]),
            ]),
            MeasureSpec::grid_density_real(1, 8, vec![1.0, 2.0, -0.5, 0.0, 3.0, -1.0, 0.25, 0.75]),
        ];
        for spec in &specs {
            let o = spec.oracle().unwrap();
            assert!(o.is_real());
            for k in 1i64..=20 {
                let defect = (o.eval(&[-k]) - o.eval(&[k]).conj()).norm();
                assert!(defect < 1e-13, "{} at {k}", spec.variant_name());
            }
        }
    }

    #[test]
    fn coefficients_never_exceed_companion_mass() {
        let spec = MeasureSpec::atomic(vec![
            (C64::new(0.8, -0.3), vec![0.11]),
            (C64::new(-1.2, 0.0), vec![0.53]),
            (C64::new(0.4, 0.9), vec![0.78]),
        ]);
        let o = spec.oracle().unwrap();
        let tv_mass = spec.total_variation().unwrap().oracle().unwrap().total_mass().re;
        for k in -30i64..=30 {
            assert!(eval1(&o, k).norm() <= tv_mass + 1e-12);
        }
    }

    #[test]
    fn total_variation_merges_coincident_atoms_before_abs() {
        let spec = MeasureSpec::atomic(vec![
            (C64::new(1.0, 0.0), vec![0.25]),
            (C64::new(-1.0, 0.0), vec![0.25]),
            (C64::new(0.5, 0.0), vec![0.75]),
        ]);
        let tv = spec.total_variation().unwrap();
        let mass = tv.oracle().unwrap().total_mass();
        // The two opposite atoms at 0.25 cancel; only 0.5 survives.
        assert!((mass - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn total_variation_of_grid_takes_absolute_samples() {
        let spec = MeasureSpec::grid_density_real(1, 4, vec![1.0, -2.0, 3.0, -4.0]);
        let tv = spec.total_variation().unwrap();
        let mass = tv.oracle().unwrap().total_mass().re;
        assert!((mass - 2.5).abs() < 1e-15);
    }

    #[test]
    fn total_variation_rejects_other_variants() {
        assert!(matches!(
            MeasureSpec::cantor_middle_thirds(3).total_variation(),
            Err(Error::UnsupportedVariant(_))
        ));
        let scaled = MeasureSpec::Scaled {
            factor: CNum(C64::new(2.0, 0.0)),
            inner: Box::new(MeasureSpec::lebesgue(1)),
        };
        assert!(scaled.total_variation().is_err());
    }

    #[test]
    fn sum_and_scale_compose_linearly() {
        let a = MeasureSpec::dirac(vec![0.3]);
        let b = MeasureSpec::lebesgue(1);
        let sum = MeasureSpec::Sum { terms: vec![a.clone(), b.clone()] };
        let oa = a.oracle().unwrap();
        let ob = b.oracle().unwrap();
        let os = sum.oracle().unwrap();
        for k in -5i64..=5 {
            assert!((os.eval(&[k]) - oa.eval(&[k]) - ob.eval(&[k])).norm() < 1e-14);
        }
        let scaled = MeasureSpec::Scaled {
            factor: CNum(C64::new(0.0, 2.0)),
            inner: Box::new(a.clone()),
        };
        let osc = scaled.oracle().unwrap();
        assert!(!osc.is_real());
        for k in -5i64..=5 {
            assert!((osc.eval(&[k]) - C64::new(0.0, 2.0) * oa.eval(&[k])).norm() < 1e-14);
        }
    }

    #[test]
    fn embedding_fills_a_level_zero_box() {
        let o = MeasureSpec::dirac(vec![0.0]).oracle().unwrap();
        let b = FreqBox::new(1, 0, 8, Budget::default()).unwrap();
        let t = embed_tensor(&o, b).unwrap();
        assert_eq!(t.coeffs().len(), 17);
        assert!(t.coeffs().iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-15));
        assert!(t.real_derived());
    }

    #[test]
    fn embedding_rejects_difference_blocks() {
        let o = MeasureSpec::lebesgue(1).oracle().unwrap();
        let b = FreqBox::new(1, 1, 4, Budget::default()).unwrap();
        assert!(embed_tensor(&o, b).is_err());
    }

    #[test]
    fn spec_json_accepts_documented_scalar_forms() {
        let json = r#"{"variant":"atomic","atoms":[{"w":[1,0],"x":[0.5]},{"w":"-0.25","x":["0.125"]}]}"#;
        let spec: MeasureSpec = serde_json::from_str(json).unwrap();
        let o = spec.oracle().unwrap();
        let expect = C64::new(1.0, 0.0) * C64::from_polar(1.0, -TAU * 0.5)
            + C64::new(-0.25, 0.0) * C64::from_polar(1.0, -TAU * 0.125);
        assert!((o.eval(&[1]) - expect).norm() < 1e-14);
    }

    #[test]
    fn spec_json_rejects_unknown_fields() {
        let json = r#"{"variant":"atomic","atoms":[{"w":1,"x":[0.5],"label":"p"}]}"#;
        let err = serde_json::from_str::<MeasureSpec>(json).unwrap_err();
        assert!(err.to_string().contains("label"), "{err}");
    }

    #[test]
    fn spec_json_roundtrips() {
        let spec = MeasureSpec::Sum {
            terms: vec![
                MeasureSpec::cantor_middle_thirds(5),
                MeasureSpec::Scaled {
                    factor: CNum(C64::new(-1.0, 0.5)),
                    inner: Box::new(MeasureSpec::dirac(vec![0.625])),
                },
            ],
        };
        let json = serde_json::to_string(&spec).unwrap();
        let back: MeasureSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.digest(), spec.digest());
    }
}
