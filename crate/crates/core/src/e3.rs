//! Truncated E3 Hamiltonian `h₀ + i g η` for a fixed azimuthal index.
//!
//! In the normalized Legendre basis `h₀` is `diag(ℓ(ℓ+1))` and `η` is the
//! tridiagonal matrix from [`crate::legendre`]. Transitions are counted on a
//! watched window of the lowest eigenvalues by real part; states near the
//! truncation edge are never consulted.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, Spectrum, DEFAULT_IM_THRESHOLD};
use crate::legendre::{build_eta_matrix, LegendreBasis};
use crate::sweep::{detect_transitions, ModelTag, Provenance, SweepPoint, SweepResult};
use crate::{CMatrix, Error, Result};

/// Basis size used unless a caller asks otherwise.
pub const DEFAULT_TRUNCATION: usize = 100;

/// Number of lowest eigenvalues over which complex pairs are counted.
pub const DEFAULT_WINDOW: usize = 12;

#[derive(Debug, Clone)]
pub struct E3Hamiltonian {
    basis: LegendreBasis,
    g: f64,
    matrix: CMatrix,
}

impl E3Hamiltonian {
    pub fn m(&self) -> i32 {
        self.basis.m()
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn trunc(&self) -> usize {
        self.basis.size()
    }

    pub fn basis(&self) -> &LegendreBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues read straight off the diagonal. Only meaningful at `g = 0`.
    pub fn unperturbed_levels(&self) -> Vec<f64> {
        self.basis
            .degrees()
            .map(|l| f64::from(l) * (f64::from(l) + 1.0))
            .collect()
    }
}

/// Build the `trunc × trunc` matrix. Negative `m` gives the same matrix as `|m|`.
pub fn build(m: i32, g: f64, trunc: usize) -> Result<E3Hamiltonian> {
    if !g.is_finite() {
        return Err(Error::domain(format!("coupling must be finite, got {g}")));
    }
    let basis = LegendreBasis::new(m, trunc)?;
    let eta = build_eta_matrix(&basis);
    let mut matrix = CMatrix::zeros(trunc, trunc);
    for (k, l) in basis.degrees().enumerate() {
        matrix[(k, k)] = Complex64::new(f64::from(l) * (f64::from(l) + 1.0), 0.0);
    }
    for (k, &e) in eta.offdiagonal().iter().enumerate() {
        let v = Complex64::new(0.0, g * e);
        matrix[(k, k + 1)] = v;
        matrix[(k + 1, k)] = v;
    }
    Ok(E3Hamiltonian { basis, g, matrix })
}

pub fn spectrum(m: i32, g: f64, trunc: usize) -> Result<Spectrum> {
    let h = build(m, g, trunc)?;
    eigen::eigenvalues(h.matrix()).map_err(|e| e.at_coupling(g))
}

/// The lowest `window` eigenvalues of a sorted spectrum together with their
/// complex flags. The window grows by one when it would split a conjugate
/// pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WatchedWindow {
    pub eigenvalues: Vec<Complex64>,
    pub is_complex: Vec<bool>,
}

impl WatchedWindow {
    pub fn complex_pairs(&self) -> usize {
        self.is_complex.iter().filter(|&&c| c).count() / 2
    }

    pub fn n_real(&self) -> usize {
        self.is_complex.iter().filter(|&&c| !c).count()
    }
}

pub fn watched_window(spectrum: &Spectrum, window: usize) -> Result<WatchedWindow> {
    if window == 0 {
        return Err(Error::domain("watched window must be non-empty"));
    }
    let class = spectrum.classify()?;
    let mut len = window.min(spectrum.len());
    if len < spectrum.len() && (0..len).any(|k| class.partner[k].is_some_and(|p| p >= len)) {
        len += 1;
    }
    Ok(WatchedWindow {
        eigenvalues: spectrum.eigenvalues[..len].to_vec(),
        is_complex: (0..len).map(|k| class.is_complex(k)).collect(),
    })
}

/// Complex pairs among the watched eigenvalues at coupling `g`.
pub fn watched_pair_count(m: i32, g: f64, trunc: usize, window: usize) -> Result<usize> {
    let spec = spectrum(m, g, trunc)?;
    watched_window(&spec, window)
        .map(|w| w.complex_pairs())
        .map_err(|e| e.at_coupling(g))
}

/// Sweep the coupling over a strictly increasing grid. Points are solved in
/// parallel and returned in grid order.
pub fn sweep(m: i32, grid: &[f64], trunc: usize, window: usize) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::domain("coupling grid is empty"));
    }
    if grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::domain("coupling grid must be strictly increasing"));
    }
    LegendreBasis::new(m, trunc)?;
    let points = grid
        .par_iter()
        .map(|&g| {
            let spec = spectrum(m, g, trunc)?;
            let w = watched_window(&spec, window).map_err(|e| e.at_coupling(g))?;
            Ok(SweepPoint::new(g, w.eigenvalues, w.is_complex))
        })
        .collect::<Result<Vec<_>>>()?;
    let transitions = detect_transitions(&points);
    Ok(SweepResult {
        model: ModelTag::E3 { m },
        grid: grid.to_vec(),
        points,
        transitions,
        provenance: Provenance {
            trunc: Some(trunc),
            window: Some(window),
            im_threshold: DEFAULT_IM_THRESHOLD,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

/// Coupling at which the watched window acquires its `index`-th complex pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    pub m: i32,
    pub index: usize,
    pub g_c: f64,
    pub bracket_width: f64,
    pub trunc: usize,
}

/// Bisection on an integer pair count. `count(lo)` must equal `index - 1` and
/// `count(hi)` must equal `index`; the interval is halved until it is no
/// wider than `tol`. Returns the final `(lo, hi)`.
pub fn bisect_pair_count<F>(
    mut count: F,
    index: usize,
    (mut lo, mut hi): (f64, f64),
    tol: f64,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<usize>,
{
    if index == 0 {
        return Err(Error::domain("transition index starts at 1"));
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let lo_count = count(lo)?;
    let hi_count = count(hi)?;
    if hi_count > lo_count + 1 {
        return Err(Error::AmbiguousBracket { lo, hi, lo_count, hi_count });
    }
    if lo_count + 1 != index || hi_count != index {
        return Err(Error::Bracket { lo, hi, index, lo_count, hi_count });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let c = count(mid)?;
        if c == index - 1 {
            lo = mid;
        } else if c == index {
            hi = mid;
        } else {
            return Err(Error::AmbiguousBracket {
                lo,
                hi,
                lo_count: index - 1,
                hi_count: c,
            });
        }
    }
    Ok((lo, hi))
}

pub fn find_transition(
    m: i32,
    index: usize,
    bracket: (f64, f64),
    trunc: usize,
    tol: f64,
) -> Result<TransitionPoint> {
    find_transition_in_window(m, index, bracket, trunc, tol, DEFAULT_WINDOW)
}

pub fn find_transition_in_window(
    m: i32,
    index: usize,
    bracket: (f64, f64),
    trunc: usize,
    tol: f64,
    window: usize,
) -> Result<TransitionPoint> {
    LegendreBasis::new(m, trunc)?;
    let (lo, hi) = bisect_pair_count(
        |g| watched_pair_count(m, g, trunc, window),
        index,
        bracket,
        tol,
    )?;
    Ok(TransitionPoint {
        m,
        index,
        g_c: 0.5 * (lo + hi),
        bracket_width: hi - lo,
        trunc,
    })
}

/// Largest relative change of the lowest `count` eigenvalues between two
/// truncations. Each difference is scaled by `max(1, |λ|)` of the larger
/// truncation.
pub fn convergence_check(m: i32, g: f64, truncs: (usize, usize), count: usize) -> Result<f64> {
    let (n1, n2) = truncs;
    if n2 <= n1 || n1 < count + 10 {
        return Err(Error::domain(format!(
            "need N2 > N1 >= count + 10, got N1 = {n1}, N2 = {n2}, count = {count}"
        )));
    }
    let a = spectrum(m, g, n1)?;
    let b = spectrum(m, g, n2)?;
    Ok(a.eigenvalues[..count]
        .iter()
        .zip(&b.eigenvalues[..count])
        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
        .fold(0.0, f64::max))
}
