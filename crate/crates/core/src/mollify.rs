//! Approximate-identity kernels described by their Fourier coefficients,
//! plus the composite-kernel algebra used by mollified pairings.
//!
//! Every kernel is normalized to unit mass (`phi_hat(0) = 1`). A kernel
//! extends to several coordinates, and to the `(xi; eta)` lattice of a
//! tensor, as the product of its one-dimensional coefficients.

use crate::error::{Error, Result};
use crate::freq::SpectralTensor;
use crate::sum::pairwise_map_sum_c64;
use crate::C64;

/// Unit-mass smoothing kernel given by its Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum Mollifier {
    /// Triangular profile `max(0, 1 - |t|/(m+1))`; the positive kernel used
    /// whenever an inequality needs positivity.
    Fejer { m: usize },
    /// Sharp cutoff `1` for `|t| <= m`, `0` beyond; not a positive kernel,
    /// provided for exact band-limited comparisons only.
    Dirichlet { m: usize },
    /// Symmetric table: coefficient `table[|t|]` with zero beyond the end.
    Custom { table: Vec<f64> },
}

impl Mollifier {
    /// Validated symmetric coefficient table; `table[0]` is `phi_hat(0)` and
    /// must equal one.
    pub fn custom(table: Vec<f64>) -> Result<Mollifier> {
        if table.is_empty() {
            return Err(Error::InvalidArgument("mollifier table is empty".into()));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("mollifier table has a non-finite entry".into()));
        }
        if (table[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mollifier must have unit mass: phi_hat(0) = {}, expected 1",
                table[0]
            )));
        }
        Ok(Mollifier::Custom { table })
    }

    /// One-dimensional coefficient `phi_hat(t)`.
    pub fn coeff(&self, t: i64) -> f64 {
        let a = t.unsigned_abs();
        match self {
            Mollifier::Fejer { m } => (1.0 - a as f64 / (*m as f64 + 1.0)).max(0.0),
            Mollifier::Dirichlet { m } => {
                if a <= *m as u64 {
                    1.0
                } else {
                    0.0
                }
            }
            Mollifier::Custom { table } => usize::try_from(a)
                .ok()
                .and_then(|i| table.get(i))
                .copied()
                .unwrap_or(0.0),
        }
    }

    /// Product extension over the coordinates of a lattice point.
    pub fn coeff_at(&self, coords: &[i64]) -> f64 {
        coords.iter().map(|&c| self.coeff(c)).product()
    }

    /// Largest `|t|` with a (potentially) nonzero coefficient.
    pub fn radius(&self) -> usize {
        match self {
            Mollifier::Fejer { m } | Mollifier::Dirichlet { m } => *m,
            Mollifier::Custom { table } => table.len() - 1,
        }
    }
}

/// Fejér kernel of radius `m`: `phi_hat(t) = max(0, 1 - |t|/(m+1))`.
pub fn fejer_kernel(m: usize) -> Mollifier {
    Mollifier::Fejer { m }
}

/// Ordered kernels `phi^0 .. phi^n` forming a composite smoothing kernel in
/// `n + 1` torus variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiBracket {
    kernels: Vec<Mollifier>,
}

impl PhiBracket {
    pub fn new(kernels: Vec<Mollifier>) -> Result<PhiBracket> {
        if kernels.is_empty() {
            return Err(Error::InvalidArgument("composite kernel needs at least one mollifier".into()));
        }
        Ok(PhiBracket { kernels })
    }

    /// Number of difference variables `n` (one fewer than the kernel count).
    pub fn arity(&self) -> usize {
        self.kernels.len() - 1
    }

    pub fn kernels(&self) -> &[Mollifier] {
        &self.kernels
    }
}

/// Fourier coefficient of the composite kernel at `(xi; eta_1 .. eta_n)`,
/// each block of length `d`:
/// `phi0(xi) * prod_j phij(-eta_j) * prod_j phij(xi - eta_j)`.
pub fn phi_bracket_transform(pb: &PhiBracket, d: usize, coords: &[i64]) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("torus dimension d must be >= 1".into()));
    }
    if coords.is_empty() || !coords.len().is_multiple_of(d) {
        return Err(Error::DimensionMismatch { expected: d * (pb.arity() + 1), got: coords.len() });
    }
    let blocks = coords.len() / d - 1;
    if blocks != pb.arity() {
        return Err(Error::KernelArity {
            arity: blocks,
            needed: blocks + 1,
            got: pb.kernels.len(),
        });
    }
    let xi = &coords[..d];
    let mut value = pb.kernels[0].coeff_at(xi);
    for j in 1..=blocks {
        let eta = &coords[j * d..(j + 1) * d];
        let phi = &pb.kernels[j];
        for i in 0..d {
            value *= phi.coeff(-eta[i]) * phi.coeff(xi[i] - eta[i]);
        }
    }
    Ok(value)
}

/// Pre-limit smoothed pairing `sum_eta phi_hat(0;eta) T0(0;eta) conj(T1(0;eta))`.
///
/// The weight is the mollifier's product extension over the `eta`
/// coordinates; with a sharp cutoff at least as wide as the box this is
/// exactly the Plancherel pairing of the two origin rows.
pub fn mollified_pairing(t0: &SpectralTensor, t1: &SpectralTensor, moll: &Mollifier) -> Result<C64> {
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
    let zero = vec![0i64; shape.d()];
    let a = t0.xi_slice(&zero)?;
    let b = t1.xi_slice(&zero)?;
    Ok(pairwise_map_sum_c64(a.len(), &|i| {
        let w = moll.coeff_at(&shape.eta_coords(i));
        a[i] * b[i].conj() * w
    }))
}

/// Frequency-side smoothing: multiplies every coefficient by the mollifier's
/// product extension over the full `(xi; eta)` point.
pub fn convolve_spec(moll: &Mollifier, t: &SpectralTensor) -> SpectralTensor {
    let shape = t.shape();
    let layout = shape.layout();
    let coeffs = t
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &z)| z * moll.coeff_at(&layout.coords(i)))
        .collect();
    SpectralTensor::from_parts(shape, coeffs, t.real_derived())
        .expect("smoothing preserves the coefficient count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::build_tower;
    use crate::error::Budget;
    use crate::freq::{plancherel_mass, FreqBox};
    use crate::measure::MeasureSpec;
    use crate::EngineOpts;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn opts() -> EngineOpts {
        EngineOpts::default()
    }

    /// Closed-form physical Fejér kernel `sin^2(pi (m+1) x) / ((m+1) sin^2(pi x))`,
    /// independent of the coefficient table.
    fn fejer_physical(m: usize, x: f64) -> f64 {
        let s = (PI * x).sin();
        if s.abs() < 1e-12 {
            m as f64 + 1.0
        } else {
            let t = (PI * (m as f64 + 1.0) * x).sin();
            t * t / ((m as f64 + 1.0) * s * s)
        }
    }

    #[test]
    fn fejer_coefficients_match_closed_form() {
        let f = fejer_kernel(3);
        assert_eq!(f.coeff(0), 1.0);
        assert_eq!(f.coeff(2), 0.5);
        assert_eq!(f.coeff(-2), 0.5);
        assert_eq!(f.coeff(4), 0.0);
        assert_eq!(f.coeff(9), 0.0);
        let z = fejer_kernel(0);
        assert_eq!(z.coeff(0), 1.0);
        assert_eq!(z.coeff(1), 0.0);
        for t in -9..=9 {
            let v = f.coeff(t);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn dirichlet_is_sharp_cutoff() {
        let d = Mollifier::Dirichlet { m: 3 };
        for t in -8i64..=8 {
            let expect = if t.unsigned_abs() <= 3 { 1.0 } else { 0.0 };
            assert_eq!(d.coeff(t), expect);
        }
        assert_eq!(d.radius(), 3);
    }

    #[test]
    fn custom_table_requires_unit_mass() {
        assert!(Mollifier::custom(vec![]).is_err());
        assert!(Mollifier::custom(vec![0.9]).is_err());
        assert!(Mollifier::custom(vec![1.0, f64::NAN]).is_err());
        let c = Mollifier::custom(vec![1.0, 0.5]).unwrap();
        assert_eq!(c.coeff(-1), 0.5);
        assert_eq!(c.coeff(2), 0.0);
        assert_eq!(c.radius(), 1);
    }

    #[test]
    fn multivariate_extension_is_a_product() {
        let f = fejer_kernel(3);
        assert_eq!(f.coeff_at(&[2, 1]), 0.5 * 0.75);
        assert_eq!(f.coeff_at(&[0, 0, 0]), 1.0);
        assert_eq!(f.coeff_at(&[4, 1]), 0.0);
    }

    #[test]
    fn fejer_physical_kernel_is_nonnegative_with_unit_mean() {
        // Inverse-transform summation on a 64-point grid: the grid mean of
        // sum_t phi_hat(t) e(t x) is phi_hat(0) = 1; values stay nonnegative.
        let m = 5;
        let f = fejer_kernel(m);
        let n = 64usize;
        let mut mean = 0.0;
        for j in 0..n {
            let x = j as f64 / n as f64;
            let mut v = 0.0;
            for t in -(m as i64)..=m as i64 {
                v += f.coeff(t) * (2.0 * PI * t as f64 * x).cos();
            }
            assert!(v >= -1e-12, "Fejér kernel went negative: {v}");
            assert!((v - fejer_physical(m, x)).abs() < 1e-9);
            mean += v;
        }
        mean /= n as f64;
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_transform_matches_product_formula() {
        // Arity zero reduces to the lone kernel.
        let pb = PhiBracket::new(vec![fejer_kernel(3)]).unwrap();
        assert_eq!(phi_bracket_transform(&pb, 1, &[2]).unwrap(), 0.5);

        // n = 1, both Fejér(3), (xi, eta) = (1, 1): 0.75 * 0.75 * 1.0.
        let pb = PhiBracket::new(vec![fejer_kernel(3), fejer_kernel(3)]).unwrap();
        assert_eq!(phi_bracket_transform(&pb, 1, &[1, 1]).unwrap(), 0.5625);
        assert_eq!(phi_bracket_transform(&pb, 1, &[0, 0]).unwrap(), 1.0);
    }

    #[test]
    fn bracket_transform_is_one_when_all_kernels_are_flat() {
        let pb = PhiBracket::new(vec![
            Mollifier::Dirichlet { m: 10 },
            Mollifier::Dirichlet { m: 10 },
            Mollifier::Dirichlet { m: 10 },
        ])
        .unwrap();
        for xi in -3i64..=3 {
            for e1 in -3i64..=3 {
                for e2 in -3i64..=3 {
                    assert_eq!(phi_bracket_transform(&pb, 1, &[xi, e1, e2]).unwrap(), 1.0);
                }
            }
        }
    }

    #[test]
    fn bracket_transform_rejects_wrong_arity() {
        let pb = PhiBracket::new(vec![fejer_kernel(2), fejer_kernel(2)]).unwrap();
        let err = phi_bracket_transform(&pb, 1, &[0, 0, 0]).unwrap_err();
        assert!(matches!(err, Error::KernelArity { arity: 2, needed: 3, got: 2 }));
        let err = phi_bracket_transform(&pb, 2, &[0, 0, 0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn bracket_transform_agrees_with_defining_quadrature() {
        // phi^[1](t0, t1) = integral over c of phi0(t0+c) phi1(-c) phi1(-t1-c),
        // transformed at (xi, eta). The eta slot transforms with the
        // conjugate phase, matching how difference axes pair against
        // conjugated rows everywhere else. A 32-point grid integrates
        // band-limited products of Fejér(2) kernels exactly; the physical
        // kernels use the closed sine form, not the coefficient table.
        let m = 2;
        let pb = PhiBracket::new(vec![fejer_kernel(m), fejer_kernel(m)]).unwrap();
        let n = 32usize;
        let g = |j: i64| fejer_physical(m, j.rem_euclid(n as i64) as f64 / n as f64);
        for &(xi, eta) in &[(1i64, 1i64), (0, 2), (2, -1), (-1, 0)] {
            let mut acc = C64::new(0.0, 0.0);
            for t0 in 0..n as i64 {
                for t1 in 0..n as i64 {
                    let mut inner = 0.0;
                    for c in 0..n as i64 {
                        inner += g(t0 + c) * g(-c) * g(-t1 - c);
                    }
                    inner /= n as f64;
                    let phase = -2.0 * PI * (xi * t0 - eta * t1) as f64 / n as f64;
                    acc += C64::new(phase.cos(), phase.sin()) * inner;
                }
            }
            acc /= (n * n) as f64;
            let direct = phi_bracket_transform(&pb, 1, &[xi, eta]).unwrap();
            assert!((acc.re - direct).abs() < 1e-9, "({xi},{eta}): {} vs {direct}", acc.re);
            assert!(acc.im.abs() < 1e-9);
        }
    }

    #[test]
    fn lebesgue_level1_pairing_is_one_for_any_fejer() {
        let spec = MeasureSpec::lebesgue(1);
        let tower = build_tower(&spec, 1, 4, &opts()).unwrap();
        let t = tower.level(1).unwrap();
        for m in [0, 2, 7] {
            let v = mollified_pairing(t, t, &fejer_kernel(m)).unwrap();
            assert!((v.re - 1.0).abs() < 1e-12 && v.im == 0.0);
        }
    }

    #[test]
    fn dirac_pairing_matches_triangular_weight_sum_and_grows() {
        // Level-1 tensor of the point mass is identically one, so the
        // pairing must equal the direct sum of the triangular weights.
        let spec = MeasureSpec::dirac(vec![0.0]);
        let box_m = 16usize;
        let tower = build_tower(&spec, 1, box_m, &opts()).unwrap();
        let t = tower.level(1).unwrap();
        let mut previous = 0.0;
        for m in [4usize, 8, 16] {
            let v = mollified_pairing(t, t, &fejer_kernel(m)).unwrap();
            let mut direct = 0.0;
            for eta in -(box_m as i64)..=box_m as i64 {
                direct += (1.0 - eta.unsigned_abs() as f64 / (m as f64 + 1.0)).max(0.0);
            }
            assert!((v.re - direct).abs() < 1e-12);
            assert!(v.re > previous, "pairing must grow with the Fejér radius");
            previous = v.re;
        }
    }

    #[test]
    fn dirichlet_pairing_reduces_to_plancherel_mass_for_band_limited() {
        let samples: Vec<f64> = (0..16).map(|j| 1.0 + (2.0 * PI * j as f64 / 16.0).cos()).collect();
        let spec = MeasureSpec::grid_density_real(1, 16, samples);
        let tower = build_tower(&spec, 1, 4, &opts()).unwrap();
        let t = tower.level(1).unwrap();
        let mass = plancherel_mass(t);
        // The level-1 origin row is supported in |eta| <= 1, so any cutoff
        // radius >= 1 reproduces the unsmoothed mass bit for bit.
        for m in [1usize, 2, 4] {
            let v = mollified_pairing(t, t, &Mollifier::Dirichlet { m }).unwrap();
            assert_eq!(v.re, mass);
            assert_eq!(v.im, 0.0);
        }
        let smoothed = mollified_pairing(t, t, &fejer_kernel(4)).unwrap();
        assert!(smoothed.re < mass);
    }

    #[test]
    fn pairing_is_monotone_in_fejer_radius_for_positive_measures() {
        let spec = MeasureSpec::cantor_middle_thirds(3);
        let tower = build_tower(&spec, 1, 6, &opts()).unwrap();
        let t = tower.level(1).unwrap();
        let values: Vec<f64> = [2usize, 4, 6]
            .iter()
            .map(|&m| mollified_pairing(t, t, &fejer_kernel(m)).unwrap().re)
            .collect();
        assert!(values[0] <= values[1] + 1e-15 && values[1] <= values[2] + 1e-15);
    }

    #[test]
    fn pairing_rejects_mismatched_boxes() {
        let spec = MeasureSpec::dirac(vec![0.0]);
        let a = build_tower(&spec, 1, 4, &opts()).unwrap();
        let b = build_tower(&spec, 1, 6, &opts()).unwrap();
        let err = mollified_pairing(a.level(1).unwrap(), b.level(1).unwrap(), &fejer_kernel(2))
            .unwrap_err();
        assert!(matches!(err, Error::BoxMismatch { .. }));
    }

    fn random_tensor(d: usize, r: usize, m: usize, seed: u64) -> SpectralTensor {
        let shape = FreqBox::new(d, r, m, Budget::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..shape.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SpectralTensor::from_parts(shape, coeffs, false).unwrap()
    }

    #[test]
    fn convolve_spec_identity_origin_and_squaring() {
        let t = random_tensor(1, 1, 4, 7);

        // A cutoff at least as wide as the box changes nothing.
        let id = convolve_spec(&Mollifier::Dirichlet { m: 4 }, &t);
        assert_eq!(id.coeffs(), t.coeffs());

        // Fejér(0) keeps only the origin coefficient.
        let origin_only = convolve_spec(&fejer_kernel(0), &t);
        let layout = t.shape().layout();
        for (i, &z) in origin_only.coeffs().iter().enumerate() {
            if layout.coords(i).iter().all(|&c| c == 0) {
                assert_eq!(z, t.coeffs()[i]);
            } else {
                assert_eq!(z, C64::new(0.0, 0.0));
            }
        }

        // Smoothing twice multiplies by the squared factors.
        let twice = convolve_spec(&fejer_kernel(3), &convolve_spec(&fejer_kernel(3), &t));
        for (i, &z) in twice.coeffs().iter().enumerate() {
            let w = fejer_kernel(3).coeff_at(&layout.coords(i));
            let expect = t.coeffs()[i] * w * w;
            assert!((z - expect).norm() <= 1e-14 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn convolve_spec_never_increases_moduli() {
        let t = random_tensor(1, 2, 3, 11);
        for m in [0usize, 1, 3, 5] {
            let s = convolve_spec(&fejer_kernel(m), &t);
            for (a, b) in s.coeffs().iter().zip(t.coeffs()) {
                assert!(a.norm() <= b.norm() + 1e-15);
            }
        }
    }

    #[test]
    fn convolve_spec_preserves_conjugate_symmetry_flag() {
        let spec = MeasureSpec::cantor_middle_thirds(2);
        let tower = build_tower(&spec, 1, 3, &opts()).unwrap();
        let t = tower.level(1).unwrap();
        assert!(t.real_derived());
        let s = convolve_spec(&fejer_kernel(2), t);
        assert!(s.real_derived());
        assert!(s.hermitian_defect() < 1e-12);
    }
}
