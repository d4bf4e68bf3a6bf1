//! Vector operators on direct sums of SO(3) multiplets.
//!
//! A vector operator `V` obeys `[L_i, V_j] = i ε_ijk V_k`. Between multiplets
//! its matrix elements are fixed up to one complex constant per channel,
//! without assuming `V` is Hermitian:
//!
//! ```text
//! ℓ' = ℓ    ⟨ℓ,m+1|V₊|ℓ,m⟩   =  A sqrt((ℓ-m)(ℓ+m+1))
//!           ⟨ℓ,m|V_z|ℓ,m⟩    =  A m
//!           ⟨ℓ,m-1|V₋|ℓ,m⟩   =  A sqrt((ℓ-m+1)(ℓ+m))
//!
//! ℓ' = ℓ+1  ⟨ℓ+1,m+1|V₊|ℓ,m⟩ =  B sqrt((ℓ+m+2)(ℓ+m+1) / D)
//!           ⟨ℓ+1,m|V_z|ℓ,m⟩  = -B sqrt((ℓ-m+1)(ℓ+m+1) / D)
//!           ⟨ℓ+1,m-1|V₋|ℓ,m⟩ = -B sqrt((ℓ-m+1)(ℓ-m+2) / D)      D = (2ℓ+2)(2ℓ+1)
//!
//! ℓ' = ℓ-1  ⟨ℓ-1,m+1|V₊|ℓ,m⟩ = -C sqrt((ℓ-m-1)(ℓ-m) / D')
//!           ⟨ℓ-1,m|V_z|ℓ,m⟩  = -C sqrt((ℓ-m)(ℓ+m) / D')
//!           ⟨ℓ-1,m-1|V₋|ℓ,m⟩ =  C sqrt((ℓ+m)(ℓ+m-1) / D')      D' = 2ℓ(2ℓ-1)
//! ```
//!
//! with `V± = V_x ± i V_y`. Every other element vanishes. A Hermitian `V`
//! needs `A` real and `B = C*`.
//!
//! Matrices use row = bra, column = ket.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CMatrix, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Angular-momentum state `|ℓ, m⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateLabel {
    pub ell: u32,
    pub m: i32,
}

impl StateLabel {
    pub fn new(ell: u32, m: i32) -> Self {
        debug_assert!(m.unsigned_abs() <= ell);
        Self { ell, m }
    }
}

/// Direct sum of multiplets. States are ordered by `ℓ` in list order, and
/// within a multiplet by `m = -ℓ … ℓ` ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipletSpace {
    ells: Vec<u32>,
    offsets: Vec<usize>,
    dim: usize,
}

impl MultipletSpace {
    pub fn new(ells: impl Into<Vec<u32>>) -> Result<Self> {
        let ells = ells.into();
        if ells.is_empty() {
            return Err(Error::domain("multiplet space needs at least one ℓ"));
        }
        if ells.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(format!("ℓ values must be strictly increasing, got {ells:?}")));
        }
        let mut offsets = Vec::with_capacity(ells.len());
        let mut dim = 0;
        for &l in &ells {
            offsets.push(dim);
            dim += 2 * l as usize + 1;
        }
        Ok(Self { ells, offsets, dim })
    }

    pub fn ells(&self) -> &[u32] {
        &self.ells
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, ell: u32) -> bool {
        self.ells.binary_search(&ell).is_ok()
    }

    pub fn index_of(&self, ell: u32, m: i32) -> Option<usize> {
        let pos = self.ells.binary_search(&ell).ok()?;
        if m.unsigned_abs() > ell {
            return None;
        }
        Some(self.offsets[pos] + (m + ell as i32) as usize)
    }

    pub fn labels(&self) -> Vec<StateLabel> {
        self.ells
            .iter()
            .flat_map(|&l| (-(l as i32)..=l as i32).map(move |m| StateLabel::new(l, m)))
            .collect()
    }
}

/// `L_z`, `L₊`, `L₋` and `L²` on a multiplet space.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMomentum {
    pub lz: CMatrix,
    pub lplus: CMatrix,
    pub lminus: CMatrix,
    pub l2: CMatrix,
}

fn ladder(ell: u32, m: i32, up: bool) -> f64 {
    let l = i64::from(ell);
    let m = i64::from(m);
    let v = if up { (l - m) * (l + m + 1) } else { (l + m) * (l - m + 1) };
    (v as f64).sqrt()
}

pub fn angular_momentum_matrices(space: &MultipletSpace) -> AngularMomentum {
    let n = space.dim();
    let mut lz = CMatrix::zeros(n, n);
    let mut lplus = CMatrix::zeros(n, n);
    let mut lminus = CMatrix::zeros(n, n);
    let mut l2 = CMatrix::zeros(n, n);
    for (j, s) in space.labels().into_iter().enumerate() {
        lz[(j, j)] = Complex64::new(f64::from(s.m), 0.0);
        l2[(j, j)] = Complex64::new(f64::from(s.ell) * (f64::from(s.ell) + 1.0), 0.0);
        if let Some(i) = space.index_of(s.ell, s.m + 1) {
            lplus[(i, j)] = Complex64::new(ladder(s.ell, s.m, true), 0.0);
        }
        if let Some(i) = space.index_of(s.ell, s.m - 1) {
            lminus[(i, j)] = Complex64::new(ladder(s.ell, s.m, false), 0.0);
        }
    }
    AngularMomentum { lz, lplus, lminus, l2 }
}

/// Reduced matrix elements: `a` within a multiplet, `b` for `ℓ → ℓ+1`,
/// `c` for `ℓ → ℓ-1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReducedElements {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl ReducedElements {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self { a, b, c }
    }

    /// `Im A = 0` and `B = C*`.
    pub fn is_hermitian(&self) -> bool {
        hermiticity_predicate(self)
    }
}

pub fn hermiticity_predicate(r: &ReducedElements) -> bool {
    r.a.im == 0.0 && r.b == r.c.conj()
}

/// Reduced elements for every channel of a multiplet space, keyed by the
/// lower multiplet `ℓ` of each channel:
///
/// - `a` scales the `ℓ → ℓ` block,
/// - `b` scales `⟨ℓ+1|V|ℓ⟩`,
/// - `c` scales `⟨ℓ|V|ℓ+1⟩` (the `ℓ' = ℓ-1` channel leaving `ℓ+1`).
///
/// Missing keys mean zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReducedElementMap(pub BTreeMap<u32, ReducedElements>);

impl ReducedElementMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// The same `(A, B, C)` on every multiplet and every adjacent pair of
    /// `space`. `B` and `C` are dropped where `ℓ+1` is not present.
    pub fn uniform(space: &MultipletSpace, r: ReducedElements) -> Self {
        let map = space
            .ells()
            .iter()
            .map(|&l| {
                let adjacent = space.contains(l + 1);
                let (b, c) = if adjacent { (r.b, r.c) } else { (ZERO, ZERO) };
                (l, ReducedElements::new(r.a, b, c))
            })
            .collect();
        Self(map)
    }

    pub fn insert(&mut self, ell: u32, r: ReducedElements) -> &mut Self {
        self.0.insert(ell, r);
        self
    }

    pub fn get(&self, ell: u32) -> ReducedElements {
        self.0.get(&ell).copied().unwrap_or_default()
    }

    pub fn is_hermitian(&self) -> bool {
        self.0.values().all(ReducedElements::is_hermitian)
    }
}

/// `V_z`, `V₊`, `V₋` on a multiplet space.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorOperator {
    pub vz: CMatrix,
    pub vplus: CMatrix,
    pub vminus: CMatrix,
}

impl VectorOperator {
    /// Cartesian components `(V_x, V_y, V_z)`.
    pub fn cartesian(&self) -> (CMatrix, CMatrix, CMatrix) {
        let vx = (&self.vplus + &self.vminus) * Complex64::new(0.5, 0.0);
        let vy = (&self.vplus - &self.vminus) * Complex64::new(0.0, -0.5);
        (vx, vy, self.vz.clone())
    }
}

fn sqrt_ratio(num: i64, den: i64) -> f64 {
    (num as f64 / den as f64).sqrt()
}

/// Coefficients of `(V₊, V_z, V₋)` for `|ℓ,m⟩ → |ℓ+1, m+q⟩`, per unit `B`.
pub fn raising_coefficients(ell: u32, m: i32) -> [f64; 3] {
    let l = i64::from(ell);
    let m = i64::from(m);
    let d = (2 * l + 2) * (2 * l + 1);
    [
        sqrt_ratio((l + m + 2) * (l + m + 1), d),
        -sqrt_ratio((l - m + 1) * (l + m + 1), d),
        -sqrt_ratio((l - m + 1) * (l - m + 2), d),
    ]
}

/// Coefficients of `(V₊, V_z, V₋)` for `|ℓ,m⟩ → |ℓ-1, m+q⟩`, per unit `C`.
/// Requires `ℓ ≥ 1`.
pub fn lowering_coefficients(ell: u32, m: i32) -> [f64; 3] {
    let l = i64::from(ell);
    let m = i64::from(m);
    let d = 2 * l * (2 * l - 1);
    [
        -sqrt_ratio((l - m - 1) * (l - m), d),
        -sqrt_ratio((l - m) * (l + m), d),
        sqrt_ratio((l + m) * (l + m - 1), d),
    ]
}

/// Coefficients of `(V₊, V_z, V₋)` within multiplet `ℓ`, per unit `A`.
pub fn diagonal_coefficients(ell: u32, m: i32) -> [f64; 3] {
    [ladder(ell, m, true), f64::from(m), ladder(ell, m, false)]
}

pub fn vector_operator(space: &MultipletSpace, reduced: &ReducedElementMap) -> Result<VectorOperator> {
    for (&l, r) in &reduced.0 {
        if !space.contains(l) {
            return Err(Error::domain(format!("reduced elements given for absent ℓ = {l}")));
        }
        if (r.b != ZERO || r.c != ZERO) && !space.contains(l + 1) {
            return Err(Error::domain(format!(
                "channel {l} ↔ {} references absent ℓ = {}",
                l + 1,
                l + 1
            )));
        }
    }
    let n = space.dim();
    let mut v = [CMatrix::zeros(n, n), CMatrix::zeros(n, n), CMatrix::zeros(n, n)];
    let mut put = |target: u32, col: usize, m: i32, scale: Complex64, coeffs: [f64; 3]| {
        for (q, (mat, coef)) in v.iter_mut().zip(coeffs).enumerate() {
            let mt = m + 1 - q as i32;
            if let Some(row) = space.index_of(target, mt) {
                mat[(row, col)] += scale * coef;
            }
        }
    };
    for (col, s) in space.labels().into_iter().enumerate() {
        let own = reduced.get(s.ell);
        if own.a != ZERO {
            put(s.ell, col, s.m, own.a, diagonal_coefficients(s.ell, s.m));
        }
        if own.b != ZERO {
            put(s.ell + 1, col, s.m, own.b, raising_coefficients(s.ell, s.m));
        }
        if s.ell > 0 {
            let below = reduced.get(s.ell - 1);
            if below.c != ZERO {
                put(s.ell - 1, col, s.m, below.c, lowering_coefficients(s.ell, s.m));
            }
        }
    }
    let [vplus, vz, vminus] = v;
    Ok(VectorOperator { vz, vplus, vminus })
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest max-norm residual over the ladder-form vector-operator identities
///
/// ```text
/// [L_z, V±] = ±V±   [L_z, V_z] = 0   [L±, V_z] = ∓V±
/// [L±, V∓] = ±2V_z  [L±, V±] = 0
/// ```
pub fn verify_vector_algebra(l: &AngularMomentum, v: &VectorOperator) -> Result<f64> {
    let n = l.lz.nrows();
    for m in [&l.lplus, &l.lminus, &v.vz, &v.vplus, &v.vminus] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::domain(format!(
                "dimension mismatch: {}x{} against {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    let comm = |a: &CMatrix, b: &CMatrix| a * b - b * a;
    let two = Complex64::new(2.0, 0.0);
    let residuals = [
        comm(&l.lz, &v.vplus) - &v.vplus,
        comm(&l.lz, &v.vminus) + &v.vminus,
        comm(&l.lz, &v.vz),
        comm(&l.lplus, &v.vz) + &v.vplus,
        comm(&l.lminus, &v.vz) - &v.vminus,
        comm(&l.lplus, &v.vminus) - &v.vz * two,
        comm(&l.lminus, &v.vplus) + &v.vz * two,
        comm(&l.lplus, &v.vplus),
        comm(&l.lminus, &v.vminus),
    ];
    Ok(residuals.iter().map(max_abs).fold(0.0, f64::max))
}

/// Outcome of scanning a vector operator for forbidden entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionScan {
    pub violations: usize,
    pub max_offending: f64,
}

impl SelectionScan {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Every nonzero entry must have `m' = m + q` for its component and
/// `|ℓ' - ℓ| ≤ 1`.
pub fn selection_rule_scan(space: &MultipletSpace, v: &VectorOperator) -> SelectionScan {
    let labels = space.labels();
    let mut scan = SelectionScan {
        violations: 0,
        max_offending: 0.0,
    };
    for (mat, dm) in [(&v.vplus, 1), (&v.vz, 0), (&v.vminus, -1)] {
        for (j, ket) in labels.iter().enumerate() {
            for (i, bra) in labels.iter().enumerate() {
                let z = mat[(i, j)];
                if z == ZERO {
                    continue;
                }
                if bra.m != ket.m + dm || bra.ell.abs_diff(ket.ell) > 1 {
                    scan.violations += 1;
                    scan.max_offending = scan.max_offending.max(z.norm());
                }
            }
        }
    }
    scan
}
