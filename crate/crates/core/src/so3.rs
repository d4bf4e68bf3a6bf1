//! Finite-dimensional PT vector model on the multiplets `ℓ` and `ℓ+1`.
//!
//! `H = L² + V_z` with `V_z` restricted by parity and time reversal to the
//! inter-multiplet channels, `⟨ℓ+1,m|V_z|ℓ,m⟩ = -i b f_ℓm` and
//! `⟨ℓ,m|V_z|ℓ+1,m⟩ = -i c f_ℓm` for real `b`, `c`. Since `V_z` conserves `m`
//! the matrix splits into 2x2 blocks
//!
//! ```text
//! h_m = [ ℓ(ℓ+1)      -i c f_ℓm   ]        m = -ℓ … ℓ
//!       [ -i b f_ℓm   (ℓ+1)(ℓ+2)  ]
//! ```
//!
//! plus the uncoupled pair `|ℓ+1, ±(ℓ+1)⟩` at `(ℓ+1)(ℓ+2)`. Each `h_m` has
//! eigenvalues `(ℓ+1)² ± sqrt((ℓ+1)² - bc f²)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::eigen::{self, spectral_order, DEFAULT_IM_THRESHOLD};
use crate::e3::bisect_pair_count;
use crate::sweep::{Branch, So3Row, So3SweepResult};
use crate::wigner_eckart::{
    vector_operator, MultipletSpace, ReducedElementMap, ReducedElements, StateLabel, VectorOperator,
};
use crate::{CMatrix, Error, Result};

/// Scale between `(b, c)` and the reduced elements `(B, C)`:
/// `B = i b K`, `C = i c K`.
///
/// With the sign conventions of [`crate::wigner_eckart`],
/// `⟨ℓ+1,m|V_z|ℓ,m⟩ = -B f_ℓm` and `⟨ℓ,m|V_z|ℓ+1,m⟩ = -C f_ℓm`, so `K = 1`.
pub const CHANNEL_CONSTANT: f64 = 1.0;

fn check_m(ell: u32, m: i32) -> Result<()> {
    if m.unsigned_abs() > ell {
        return Err(Error::domain(format!("|m| = {} exceeds ℓ = {ell}", m.unsigned_abs())));
    }
    Ok(())
}

/// `((ℓ+1)² - m², (2ℓ+1)(2ℓ+2))`, so that `f² = num / den`.
fn f_squared_parts(ell: u32, m: i32) -> (f64, f64) {
    let l = i64::from(ell);
    let m = i64::from(m);
    (((l + 1) * (l + 1) - m * m) as f64, ((2 * l + 1) * (2 * l + 2)) as f64)
}

pub fn f_lm(ell: u32, m: i32) -> Result<f64> {
    check_m(ell, m)?;
    let (num, den) = f_squared_parts(ell, m);
    Ok((num / den).sqrt())
}

/// `(ℓ+1)² - bc f²`, evaluated over a common denominator.
fn discriminant(ell: u32, m: i32, b: f64, c: f64) -> f64 {
    let (num, den) = f_squared_parts(ell, m);
    let l1 = f64::from(ell) + 1.0;
    (l1 * l1 * den - b * c * num) / den
}

/// `bc < (ℓ+1)² / f_ℓm²`: both eigenvalues of `h_m` are real and distinct.
pub fn reality_condition(ell: u32, m: i32, b: f64, c: f64) -> Result<bool> {
    check_m(ell, m)?;
    Ok(discriminant(ell, m, b, c) > 0.0)
}

/// Value of `bc` at which `h_m` has an exceptional point.
pub fn exceptional_bc(ell: u32, m: i32) -> Result<f64> {
    check_m(ell, m)?;
    let (num, den) = f_squared_parts(ell, m);
    let l1 = f64::from(ell) + 1.0;
    Ok(l1 * l1 * den / num)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPair {
    pub m: i32,
    pub plus: Complex64,
    pub minus: Complex64,
    /// Discriminant non-negative. Exceptional points count as real.
    pub is_real: bool,
    /// Discriminant exactly zero.
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSpectrum {
    pub ell: u32,
    /// Doubly degenerate `(ℓ+1)(ℓ+2)` of `|ℓ+1, ±(ℓ+1)⟩`.
    pub top: f64,
    /// One pair per `m`, ordered `m = ℓ … -ℓ`.
    pub pairs: Vec<AnalyticPair>,
}

impl AnalyticSpectrum {
    /// All `4ℓ + 4` eigenvalues in block order.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(self.top, 0.0); 2];
        for p in &self.pairs {
            out.push(p.plus);
            out.push(p.minus);
        }
        out
    }

    pub fn pair(&self, m: i32) -> Option<&AnalyticPair> {
        self.pairs.iter().find(|p| p.m == m)
    }
}

pub fn analytic_pair(ell: u32, m: i32, b: f64, c: f64) -> Result<AnalyticPair> {
    check_m(ell, m)?;
    let l1 = f64::from(ell) + 1.0;
    let center = Complex64::new(l1 * l1, 0.0);
    let disc = discriminant(ell, m, b, c);
    let root = if disc >= 0.0 {
        Complex64::new(disc.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-disc).sqrt())
    };
    Ok(AnalyticPair {
        m,
        plus: center + root,
        minus: center - root,
        is_real: disc >= 0.0,
        marginal: disc == 0.0,
    })
}

pub fn analytic_spectrum(ell: u32, b: f64, c: f64) -> AnalyticSpectrum {
    let l = f64::from(ell);
    let pairs = (-(ell as i32)..=ell as i32)
        .rev()
        .map(|m| analytic_pair(ell, m, b, c).expect("m within range"))
        .collect();
    AnalyticSpectrum {
        ell,
        top: (l + 1.0) * (l + 2.0),
        pairs,
    }
}

/// One diagonal block of the assembled matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// `(ℓ+1)(ℓ+2) · 1₂` on `|ℓ+1, ℓ+1⟩, |ℓ+1, -ℓ-1⟩`.
    Top(CMatrix),
    /// `h_m` on `|ℓ, m⟩, |ℓ+1, m⟩`.
    Pair { m: i32, matrix: CMatrix },
}

impl Block {
    pub fn matrix(&self) -> &CMatrix {
        match self {
            Block::Top(m) | Block::Pair { matrix: m, .. } => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockModel {
    pub ell: u32,
    pub b: f64,
    pub c: f64,
    pub blocks: Vec<Block>,
}

/// `h_m` for one azimuthal index.
pub fn pair_block(ell: u32, m: i32, b: f64, c: f64) -> Result<CMatrix> {
    let f = f_lm(ell, m)?;
    let l = f64::from(ell);
    Ok(CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(l * (l + 1.0), 0.0),
            Complex64::new(0.0, -c * f),
            Complex64::new(0.0, -b * f),
            Complex64::new((l + 1.0) * (l + 2.0), 0.0),
        ],
    ))
}

pub fn build_blocks(ell: u32, b: f64, c: f64) -> Result<BlockModel> {
    if !b.is_finite() || !c.is_finite() {
        return Err(Error::domain(format!("couplings must be finite, got b = {b}, c = {c}")));
    }
    let l = f64::from(ell);
    let top = CMatrix::from_diagonal_element(2, 2, Complex64::new((l + 1.0) * (l + 2.0), 0.0));
    let mut blocks = vec![Block::Top(top)];
    for m in (-(ell as i32)..=ell as i32).rev() {
        blocks.push(Block::Pair {
            m,
            matrix: pair_block(ell, m, b, c)?,
        });
    }
    Ok(BlockModel { ell, b, c, blocks })
}

impl BlockModel {
    pub fn dim(&self) -> usize {
        4 * self.ell as usize + 4
    }

    /// Basis of the assembled matrix, block by block.
    pub fn labels(&self) -> Vec<StateLabel> {
        let top = self.ell + 1;
        let mut out = vec![StateLabel::new(top, top as i32), StateLabel::new(top, -(top as i32))];
        for blk in &self.blocks {
            if let Block::Pair { m, .. } = blk {
                out.push(StateLabel::new(self.ell, *m));
                out.push(StateLabel::new(top, *m));
            }
        }
        out
    }

    /// Block-diagonal matrix, `h_{ℓ+1}` first and then `h_ℓ … h_{-ℓ}`.
    pub fn full_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (k, blk) in self.blocks.iter().enumerate() {
            out.view_mut((2 * k, 2 * k), (2, 2)).copy_from(blk.matrix());
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(|b| b.matrix().trace()).sum()
    }
}

/// `V_z` on `{ℓ, ℓ+1}` from the Wigner–Eckart construction with `A = 0`,
/// `B = i b K`, `C = i c K`.
pub fn wigner_eckart_perturbation(ell: u32, b: f64, c: f64) -> Result<(MultipletSpace, VectorOperator)> {
    let space = MultipletSpace::new(vec![ell, ell + 1])?;
    let mut map = ReducedElementMap::new();
    map.insert(
        ell,
        ReducedElements::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, b * CHANNEL_CONSTANT),
            Complex64::new(0.0, c * CHANNEL_CONSTANT),
        ),
    );
    let v = vector_operator(&space, &map)?;
    Ok((space, v))
}

fn greedy_match_deviation(reference: &[Complex64], computed: &[Complex64]) -> f64 {
    let mut used = vec![false; computed.len()];
    let mut worst = 0.0_f64;
    for r in reference {
        let (j, d) = computed
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, z)| (j, (z - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("equal lengths");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Largest distance between the numeric spectrum of the assembled matrix
/// and the closed-form eigenvalues, matched as multisets.
pub fn cross_check(ell: u32, b: f64, c: f64) -> Result<f64> {
    let model = build_blocks(ell, b, c)?;
    let numeric = eigen::eigenvalues(&model.full_matrix())?;
    let mut analytic = analytic_spectrum(ell, b, c).eigenvalues();
    analytic.sort_by(spectral_order);
    Ok(greedy_match_deviation(&analytic, &numeric.eigenvalues))
}

/// Complex pairs in the numeric spectrum of `h_m`: 0 or 1.
fn numeric_block_pairs(ell: u32, m: i32, b: f64, c: f64) -> Result<usize> {
    let spec = eigen::eigenvalues_with_threshold(&pair_block(ell, m, b, c)?, DEFAULT_IM_THRESHOLD)?;
    Ok(spec.classify()?.n_complex_pairs)
}

/// Locate the exceptional point of `h_m` along `c = ratio · b` by bisecting on
/// whether the numerically computed block eigenvalues are complex.
pub fn numeric_exceptional_point(
    ell: u32,
    m: i32,
    ratio: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<(f64, f64)> {
    check_m(ell, m)?;
    bisect_pair_count(|b| numeric_block_pairs(ell, m, b, ratio * b), 1, bracket, tol)
}

/// How `c` follows `b` along a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingMode {
    /// `c = b`
    Equal,
    /// `c = -b`, the Hermitian line
    Negated,
    Fixed(f64),
}

impl CouplingMode {
    pub fn c_for(self, b: f64) -> f64 {
        match self {
            CouplingMode::Equal => b,
            CouplingMode::Negated => -b,
            CouplingMode::Fixed(c) => c,
        }
    }
}

impl fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingMode::Equal => f.write_str("equal"),
            CouplingMode::Negated => f.write_str("negated"),
            CouplingMode::Fixed(c) => write!(f, "fixed:{c}"),
        }
    }
}

impl FromStr for CouplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(CouplingMode::Equal),
            "negated" => Ok(CouplingMode::Negated),
            _ => {
                let v = s
                    .strip_prefix("fixed:")
                    .ok_or_else(|| Error::domain(format!("expected equal, negated or fixed:<value>, got {s:?}")))?;
                let c: f64 = v
                    .parse()
                    .map_err(|_| Error::domain(format!("bad fixed coupling {v:?}")))?;
                if !c.is_finite() {
                    return Err(Error::domain(format!("fixed coupling must be finite, got {v}")));
                }
                Ok(CouplingMode::Fixed(c))
            }
        }
    }
}

/// Closed-form eigenvalues over a grid of `b`. Per grid point the rows are the
/// two uncoupled top states followed by the `plus` and `minus` branch of each
/// `h_m`, `m = ℓ … -ℓ`.
pub fn sweep(ell: u32, b_grid: &[f64], mode: CouplingMode) -> Result<So3SweepResult> {
    if b_grid.is_empty() {
        return Err(Error::domain("coupling grid is empty"));
    }
    let mut rows = Vec::with_capacity(b_grid.len() * (4 * ell as usize + 4));
    for &b in b_grid {
        let c = mode.c_for(b);
        if !b.is_finite() || !c.is_finite() {
            return Err(Error::domain(format!("couplings must be finite, got b = {b}, c = {c}")));
        }
        let spec = analytic_spectrum(ell, b, c);
        let top = (ell + 1) as i32;
        for m in [top, -top] {
            rows.push(So3Row {
                b,
                c,
                m,
                branch: Branch::Top,
                lambda: Complex64::new(spec.top, 0.0),
                is_real: true,
                marginal: false,
            });
        }
        for p in &spec.pairs {
            for (branch, lambda) in [(Branch::Plus, p.plus), (Branch::Minus, p.minus)] {
                rows.push(So3Row {
                    b,
                    c,
                    m: p.m,
                    branch,
                    lambda,
                    is_real: p.is_real,
                    marginal: p.marginal,
                });
            }
        }
    }
    Ok(So3SweepResult {
        ell,
        c_mode: mode.to_string(),
        b_grid: b_grid.to_vec(),
        rows,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
