//! Parity and even time reversal on the model bases.
//!
//! Parity is a diagonal sign matrix. Time reversal is antilinear, so it is
//! stored as a signed permutation `U` that acts after complex conjugation:
//! `T ψ = U ψ*`. On operators, `T X T⁻¹ = U X* U⁻¹`.

use num_complex::Complex64;

use crate::legendre::LegendreBasis;
use crate::wigner_eckart::{StateLabel, VectorOperator};
use crate::{CMatrix, Error, Result};

fn parity_sign(ell: u32) -> i8 {
    if ell.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `P = diag(±1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parity {
    signs: Vec<i8>,
}

impl Parity {
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("parity signature entries must be ±1"));
        }
        Ok(Self { signs })
    }

    /// `(-1)^ℓ` on the fixed-m Legendre basis.
    pub fn legendre(basis: &LegendreBasis) -> Self {
        Self {
            signs: basis.degrees().map(parity_sign).collect(),
        }
    }

    /// `P|ℓ,m⟩ = (-1)^ℓ |ℓ,m⟩`.
    pub fn multiplet(labels: &[StateLabel]) -> Self {
        Self {
            signs: labels.iter().map(|s| parity_sign(s.ell)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.signs.iter().map(|&s| Complex64::new(f64::from(s), 0.0)),
        ))
    }

    /// `P X P`, computed entrywise with exact sign flips.
    pub fn conjugate_operator(&self, x: &CMatrix) -> CMatrix {
        CMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            if self.signs[i] == self.signs[j] {
                x[(i, j)]
            } else {
                -x[(i, j)]
            }
        })
    }

    /// `P² = 1` holds by construction; checked entrywise on the matrix.
    pub fn squares_to_identity(&self) -> bool {
        let p = self.to_matrix();
        &p * &p == CMatrix::identity(self.dim(), self.dim())
    }
}

/// Antilinear `T ψ = U ψ*` with `U e_j = phase_j e_{target_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeReversal {
    target: Vec<usize>,
    phase: Vec<i8>,
}

impl TimeReversal {
    /// Plain complex conjugation (`U = 1`), as on the real Legendre basis.
    pub fn conjugation(dim: usize) -> Self {
        Self {
            target: (0..dim).collect(),
            phase: vec![1; dim],
        }
    }

    /// `U|ℓ,m⟩ = (-1)^m |ℓ,-m⟩`. Every partner state must be present.
    pub fn multiplet(labels: &[StateLabel]) -> Result<Self> {
        let mut target = Vec::with_capacity(labels.len());
        let mut phase = Vec::with_capacity(labels.len());
        for s in labels {
            let j = labels
                .iter()
                .position(|t| t.ell == s.ell && t.m == -s.m)
                .ok_or_else(|| Error::domain(format!("state |{}, {}⟩ has no partner", s.ell, -s.m)))?;
            target.push(j);
            phase.push(if s.m.rem_euclid(2) == 0 { 1 } else { -1 });
        }
        Ok(Self { target, phase })
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn unitary(&self) -> CMatrix {
        let n = self.dim();
        let mut u = CMatrix::zeros(n, n);
        for (j, (&t, &p)) in self.target.iter().zip(&self.phase).enumerate() {
            u[(t, j)] = Complex64::new(f64::from(p), 0.0);
        }
        u
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (j, z) in psi.iter().enumerate() {
            out[self.target[j]] = z.conj() * f64::from(self.phase[j]);
        }
        out
    }

    /// `T X T⁻¹ = U X* Uᵀ`, computed with exact permutations and sign flips.
    pub fn conjugate_operator(&self, x: &CMatrix) -> CMatrix {
        let n = x.nrows();
        let mut out = CMatrix::zeros(n, x.ncols());
        for j in 0..x.ncols() {
            for i in 0..n {
                let z = x[(i, j)].conj();
                out[(self.target[i], self.target[j])] =
                    if self.phase[i] == self.phase[j] { z } else { -z };
            }
        }
        out
    }

    /// `T² = U U* = 1`.
    pub fn squares_to_identity(&self) -> bool {
        let u = self.unitary();
        &u * u.map(|z| z.conj()) == CMatrix::identity(self.dim(), self.dim())
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_dims(x: &CMatrix, p: &Parity, t: &TimeReversal) -> Result<()> {
    if !x.is_square() || x.nrows() != p.dim() || x.nrows() != t.dim() {
        return Err(Error::domain(format!(
            "operator is {}x{}, parity acts on {}, time reversal on {}",
            x.nrows(),
            x.ncols(),
            p.dim(),
            t.dim()
        )));
    }
    Ok(())
}

/// Max-norm of `(PT) H (PT)⁻¹ - H`.
pub fn pt_commutes(h: &CMatrix, p: &Parity, t: &TimeReversal) -> Result<f64> {
    check_dims(h, p, t)?;
    let transformed = t.conjugate_operator(&p.conjugate_operator(h));
    Ok(max_abs(&(transformed - h)))
}

/// Residuals of `P V P = -V` and `T V T⁻¹ = -V` for a vector operator.
///
/// Under the antilinear `T` the ladder components swap:
/// `T V± T⁻¹ = -V∓` is the T-odd condition, because `T i T⁻¹ = -i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddnessReport {
    pub p_residual: f64,
    pub t_residual: f64,
    pub p_odd: bool,
    pub t_odd: bool,
}

/// Relative tolerance of the oddness checks.
pub const ODDNESS_TOLERANCE: f64 = 1e-12;

pub fn oddness(v: &VectorOperator, p: &Parity, t: &TimeReversal) -> Result<OddnessReport> {
    for x in [&v.vz, &v.vplus, &v.vminus] {
        check_dims(x, p, t)?;
    }
    let scale = [&v.vz, &v.vplus, &v.vminus]
        .iter()
        .map(|x| max_abs(x))
        .fold(1.0, f64::max);
    let p_residual = [&v.vz, &v.vplus, &v.vminus]
        .iter()
        .map(|x| max_abs(&(p.conjugate_operator(x) + *x)))
        .fold(0.0, f64::max);
    let t_residual = [
        max_abs(&(t.conjugate_operator(&v.vz) + &v.vz)),
        max_abs(&(t.conjugate_operator(&v.vplus) + &v.vminus)),
        max_abs(&(t.conjugate_operator(&v.vminus) + &v.vplus)),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(OddnessReport {
        p_residual,
        t_residual,
        p_odd: p_residual <= ODDNESS_TOLERANCE * scale,
        t_odd: t_residual <= ODDNESS_TOLERANCE * scale,
    })
}
