//! Normalized associated-Legendre basis for a fixed azimuthal index.
//!
//! Basis state `k` (0-based) is `N_ℓ P_{ℓ,|m|}(η)` with `ℓ = |m| + k`, where
//!
//! ```text
//! N_ℓ = sqrt((2ℓ+1)/2) · sqrt((ℓ-|m|)! / (ℓ+|m|)!)
//! ```
//!
//! so the states are orthonormal on `η ∈ [-1, 1]`. The only operator needed
//! besides the (diagonal) kinetic term is multiplication by `η = cos θ`,
//! which is tridiagonal with
//!
//! ```text
//! ⟨ℓ+1|η|ℓ⟩ = sqrt(((ℓ+1)² - m²) / ((2ℓ+1)(2ℓ+3)))
//! ```

use nalgebra::DMatrix;

use crate::{Error, Result};

fn check_degree(ell: u32, m: i32) -> Result<()> {
    if ell < m.unsigned_abs() {
        return Err(Error::domain(format!("degree {ell} is below |m| = {}", m.unsigned_abs())));
    }
    Ok(())
}

/// Normalization constant `N_ℓ` for `P_{ℓ,|m|}`.
///
/// The factorial ratio is accumulated as a product of `1/sqrt(k)` factors, so
/// it stays finite well past the point where `(ℓ+|m|)!` overflows.
pub fn normalization(ell: u32, m: i32) -> Result<f64> {
    check_degree(ell, m)?;
    let am = m.unsigned_abs();
    let mut ratio = 1.0_f64;
    for k in (ell - am + 1)..=(ell + am) {
        ratio /= f64::from(k).sqrt();
    }
    Ok((f64::from(2 * ell + 1) / 2.0).sqrt() * ratio)
}

/// Matrix element `⟨ℓ+1|η|ℓ⟩` in the normalized basis. Even in `m`.
pub fn eta_offdiagonal(ell: u32, m: i32) -> Result<f64> {
    check_degree(ell, m)?;
    let l1 = f64::from(ell) + 1.0;
    let m2 = f64::from(m.unsigned_abs()).powi(2);
    let num = l1 * l1 - m2;
    let den = (2.0 * f64::from(ell) + 1.0) * (2.0 * f64::from(ell) + 3.0);
    Ok((num / den).sqrt())
}

/// Truncated basis `ℓ = |m|, …, |m| + size - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegendreBasis {
    m: i32,
    size: usize,
}

impl LegendreBasis {
    pub fn new(m: i32, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::domain(format!("basis size must be at least 2, got {size}")));
        }
        if u32::try_from(size).is_err() {
            return Err(Error::domain(format!("basis size {size} too large")));
        }
        Ok(Self { m, size })
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Lowest degree in the basis, `|m|`.
    pub fn first_degree(&self) -> u32 {
        self.m.unsigned_abs()
    }

    /// Degree `ℓ` of basis state `k`.
    pub fn degree(&self, k: usize) -> u32 {
        assert!(k < self.size, "basis index {k} out of range");
        self.first_degree() + k as u32
    }

    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.size).map(|k| self.degree(k))
    }
}

/// Real symmetric tridiagonal matrix of `η` with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaMatrix {
    m: i32,
    offdiagonal: Vec<f64>,
}

impl EtaMatrix {
    pub fn m(&self) -> i32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.offdiagonal.len() + 1
    }

    /// Entries `(k, k+1)` for `k = 0 … N-2`.
    pub fn offdiagonal(&self) -> &[f64] {
        &self.offdiagonal
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (k, &v) in self.offdiagonal.iter().enumerate() {
            out[(k, k + 1)] = v;
            out[(k + 1, k)] = v;
        }
        out
    }
}

pub fn build_eta_matrix(basis: &LegendreBasis) -> EtaMatrix {
    let offdiagonal = (0..basis.size() - 1)
        .map(|k| {
            eta_offdiagonal(basis.degree(k), basis.m())
                .expect("basis degrees are never below |m|")
        })
        .collect();
    EtaMatrix {
        m: basis.m(),
        offdiagonal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_small_cases() {
        assert!((normalization(0, 0).unwrap() - 0.5_f64.sqrt()).abs() < 1e-15);
        assert!((normalization(1, 1).unwrap() - 3.0_f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((normalization(1, -1).unwrap() - 3.0_f64.sqrt() / 2.0).abs() < 1e-15);
        // (ℓ=2, m=1): sqrt(5/2) · sqrt(1/6)
        assert!((normalization(2, 1).unwrap() - (5.0_f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normalization_stays_finite_at_high_degree() {
        for ell in [85, 100, 120, 150] {
            let n = normalization(ell, ell as i32).unwrap();
            assert!(n.is_finite() && n > 0.0, "N({ell},{ell}) = {n}");
        }
    }

    #[test]
    fn degree_below_m_is_rejected() {
        assert!(matches!(normalization(1, 2), Err(Error::Domain(_))));
        assert!(matches!(eta_offdiagonal(2, -3), Err(Error::Domain(_))));
    }

    #[test]
    fn eta_examples() {
        assert!((eta_offdiagonal(0, 0).unwrap() - 1.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((eta_offdiagonal(1, 1).unwrap() - (3.0_f64 / 15.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eta_is_even_in_m() {
        for ell in 0..40u32 {
            for m in 0..=ell as i32 {
                assert_eq!(eta_offdiagonal(ell, m).unwrap(), eta_offdiagonal(ell, -m).unwrap());
            }
        }
    }

    #[test]
    fn eta_approaches_one_half() {
        // m = 0 falls towards 1/2 from above, |m| ≥ 1 rises towards it from below
        let mut prev = f64::INFINITY;
        for ell in 0..2000u32 {
            let v = eta_offdiagonal(ell, 0).unwrap();
            assert!(v > 0.5 && v < prev);
            prev = v;
        }
        assert!(prev - 0.5 < 1e-6);
        for m in 1..5 {
            let mut prev = 0.0;
            for ell in m as u32..2000 {
                let v = eta_offdiagonal(ell, m).unwrap();
                assert!(v < 0.5 && v > prev);
                prev = v;
            }
            assert!(0.5 - prev < 1e-5);
        }
    }

    #[test]
    fn eta_bounds() {
        for ell in 0..200u32 {
            for m in 0..=(ell.min(20) as i32) {
                let v = eta_offdiagonal(ell, m).unwrap();
                let bound = 0.5 * ((2.0 * ell as f64 + 3.0) / (2.0 * ell as f64 + 1.0)).sqrt();
                assert!(v > 0.0 && v < bound && v < 1.0);
            }
        }
    }

    #[test]
    fn basis_validation() {
        assert!(LegendreBasis::new(0, 1).is_err());
        let b = LegendreBasis::new(-2, 4).unwrap();
        assert_eq!(b.degrees().collect::<Vec<_>>(), vec![2, 3, 4, 5]);
    }

    #[test]
    fn eta_matrix_two_by_two() {
        let e = build_eta_matrix(&LegendreBasis::new(0, 2).unwrap()).to_dense();
        let v = 1.0 / 3.0_f64.sqrt();
        assert_eq!(e[(0, 0)], 0.0);
        assert_eq!(e[(1, 1)], 0.0);
        assert!((e[(0, 1)] - v).abs() < 1e-15 && (e[(1, 0)] - v).abs() < 1e-15);

        let e = build_eta_matrix(&LegendreBasis::new(1, 2).unwrap()).to_dense();
        assert!((e[(0, 1)] - (0.2_f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eta_matrix_symmetric_with_zero_diagonal() {
        for m in [-3, 0, 2, 7] {
            let e = build_eta_matrix(&LegendreBasis::new(m, 37).unwrap()).to_dense();
            assert_eq!(&e - e.transpose(), DMatrix::zeros(37, 37));
            for k in 0..37 {
                assert_eq!(e[(k, k)].to_bits(), 0.0_f64.to_bits());
            }
        }
    }
}
