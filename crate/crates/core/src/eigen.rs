//! Dense complex eigenvalues via Householder–Hessenberg reduction and a
//! single-shift complex QR iteration.
//!
//! The iteration follows the structure of LAPACK's `zlahqr`: Wilkinson shifts,
//! exceptional shifts every ten stagnant sweeps, and deflation on negligible
//! subdiagonal entries. The full Schur form `H = Q T Q*` is kept so that
//! eigenvectors can be back-substituted from `T` and every eigenpair checked
//! against the input matrix.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::{CMatrix, Error, Result};

/// Default relative cutoff below which `|Im λ|` counts as rounding noise.
pub const DEFAULT_IM_THRESHOLD: f64 = 1e-8;

/// Conjugate partners must lie within this multiple of the threshold.
pub const PAIRING_FACTOR: f64 = 1e3;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;

/// Eigenvalues of one matrix, sorted by real part then imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Largest `‖Hv − λv‖₂ / ‖v‖₂` over the computed eigenpairs.
    pub max_residual: Option<f64>,
    pub im_threshold: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn classify(&self) -> Result<Classification> {
        classify(&self.eigenvalues, self.im_threshold)
    }

    /// Largest distance from any eigenvalue's conjugate to the nearest
    /// eigenvalue. Zero for a conjugation-closed multiset.
    pub fn conjugation_defect(&self) -> f64 {
        let ev = &self.eigenvalues;
        ev.iter()
            .map(|l| {
                ev.iter()
                    .map(|mu| (mu - l.conj()).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

/// Total order used for every spectrum: real part, then imaginary part.
pub fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Real/complex split of a list of eigenvalues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub n_real: usize,
    pub n_complex_pairs: usize,
    /// For each input eigenvalue, the index of its conjugate partner, or
    /// `None` when it counts as real.
    pub partner: Vec<Option<usize>>,
}

impl Classification {
    pub fn is_complex(&self, k: usize) -> bool {
        self.partner[k].is_some()
    }
}

fn is_numerically_real(l: Complex64, threshold: f64) -> bool {
    l.im.abs() <= threshold * l.norm().max(1.0)
}

/// Split eigenvalues into real ones and conjugate pairs.
///
/// `λ` counts as real when `|Im λ| ≤ threshold · max(1, |λ|)`. The rest are
/// paired greedily, each with the nearest unpaired value to its conjugate; a
/// complex eigenvalue with no partner within `PAIRING_FACTOR · threshold ·
/// max(1, |λ|)` is an error.
pub fn classify(eigenvalues: &[Complex64], threshold: f64) -> Result<Classification> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::domain(format!("threshold must be positive, got {threshold}")));
    }
    let n = eigenvalues.len();
    let mut partner = vec![None; n];
    let complex: Vec<usize> = (0..n)
        .filter(|&k| !is_numerically_real(eigenvalues[k], threshold))
        .collect();
    let mut used = vec![false; n];
    let mut n_pairs = 0;
    for &k in &complex {
        if used[k] {
            continue;
        }
        let target = eigenvalues[k].conj();
        let best = complex
            .iter()
            .copied()
            .filter(|&j| j != k && !used[j])
            .map(|j| (j, (eigenvalues[j] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let limit = PAIRING_FACTOR * threshold * eigenvalues[k].norm().max(1.0);
        match best {
            Some((j, d)) if d <= limit => {
                used[k] = true;
                used[j] = true;
                partner[k] = Some(j);
                partner[j] = Some(k);
                n_pairs += 1;
            }
            other => {
                return Err(Error::UnmatchedEigenvalue {
                    re: eigenvalues[k].re,
                    im: eigenvalues[k].im,
                    distance: other.map_or(f64::INFINITY, |(_, d)| d),
                })
            }
        }
    }
    Ok(Classification {
        n_real: n - 2 * n_pairs,
        n_complex_pairs: n_pairs,
        partner,
    })
}

/// All eigenvalues of `h`, with the default classification threshold.
pub fn eigenvalues(h: &CMatrix) -> Result<Spectrum> {
    eigenvalues_with_threshold(h, DEFAULT_IM_THRESHOLD)
}

pub fn eigenvalues_with_threshold(h: &CMatrix, im_threshold: f64) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::domain(format!("matrix is {}x{}, not square", h.nrows(), h.ncols())));
    }
    if h.nrows() == 0 {
        return Err(Error::domain("matrix is empty"));
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }

    let schur = Schur::new(h.clone())?;
    let vectors = schur.eigenvectors();
    let mut max_residual = 0.0_f64;
    for (k, v) in vectors.column_iter().enumerate() {
        let lambda = schur.t[(k, k)];
        let r = (h * v - v * lambda).norm() / v.norm();
        max_residual = max_residual.max(r);
    }

    let mut eigenvalues: Vec<Complex64> = schur.t.diagonal().iter().copied().collect();
    eigenvalues.sort_by(spectral_order);
    Ok(Spectrum {
        eigenvalues,
        max_residual: Some(max_residual),
        im_threshold,
    })
}

/// Complex Schur decomposition `A = Q T Q*` with `T` upper triangular.
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

impl Schur {
    pub fn new(a: CMatrix) -> Result<Self> {
        let n = a.nrows();
        let mut t = a;
        let mut q = CMatrix::identity(n, n);
        hessenberg(&mut t, &mut q);
        qr_iterate(&mut t, &mut q)?;
        Ok(Self { q, t })
    }

    /// Right eigenvectors as columns, in the diagonal order of `T`.
    pub fn eigenvectors(&self) -> CMatrix {
        let n = self.t.nrows();
        let t = &self.t;
        let tnorm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let small = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
        let mut y = CMatrix::zeros(n, n);
        for k in 0..n {
            let lambda = t[(k, k)];
            y[(k, k)] = Complex64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut s = Complex64::new(0.0, 0.0);
                for j in (i + 1)..=k {
                    s += t[(i, j)] * y[(j, k)];
                }
                let mut d = t[(i, i)] - lambda;
                if d.norm() < small {
                    d = Complex64::new(small, 0.0);
                }
                y[(i, k)] = -s / d;
            }
        }
        let mut v = &self.q * y;
        for mut col in v.column_iter_mut() {
            let nrm = col.norm();
            if nrm > 0.0 {
                col /= Complex64::new(nrm, 0.0);
            }
        }
        v
    }
}

/// Householder reduction to upper Hessenberg form, accumulating the
/// reflectors into `q`. Columns whose sub-subdiagonal part is already zero
/// are left untouched, so tridiagonal and diagonal inputs pass through
/// bit-for-bit.
fn hessenberg(a: &mut CMatrix, q: &mut CMatrix) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let tail: f64 = ((k + 2)..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let xnorm = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // A ← (I − 2vv*) A on rows k+1.., then A ← A (I − 2vv*) on columns k+1..
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (p, vp) in v.iter().enumerate() {
                s += vp.conj() * a[(k + 1 + p, j)];
            }
            s *= 2.0;
            for (p, vp) in v.iter().enumerate() {
                a[(k + 1 + p, j)] -= vp * s;
            }
        }
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for (p, vp) in v.iter().enumerate() {
                    s += m[(i, k + 1 + p)] * vp;
                }
                s *= 2.0;
                for (p, vp) in v.iter().enumerate() {
                    m[(i, k + 1 + p)] -= s * vp.conj();
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Rotation `[c s; -s̄ c]` taking `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let nx = x.norm();
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if nx == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let c = nx / r;
    let s = (x / nx) * y.conj() / r;
    (c, s)
}

fn rotate_rows(a: &mut CMatrix, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let x = a[(k, j)];
        let y = a[(k + 1, j)];
        a[(k, j)] = x * c + s * y;
        a[(k + 1, j)] = -s.conj() * x + y * c;
    }
}

fn rotate_cols(a: &mut CMatrix, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let x = a[(i, k)];
        let y = a[(i, k + 1)];
        a[(i, k)] = x * c + y * s.conj();
        a[(i, k + 1)] = -x * s + y * c;
    }
}

/// Eigenvalue of the 2x2 block `[a b; c d]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let r1 = d + half + disc;
    let r2 = d + half - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

fn qr_iterate(h: &mut CMatrix, q: &mut CMatrix) -> Result<()> {
    let n = h.nrows();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let safe_min = f64::MIN_POSITIVE;
    let hnorm = h.iter().map(|z| abs1(*z)).fold(0.0, f64::max);
    let max_sweeps = MAX_SWEEPS_PER_EIGENVALUE * n.max(10);

    let mut hi = n - 1;
    let mut stagnant = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = abs1(h[(lo, lo - 1)]);
            let mut scale = abs1(h[(lo - 1, lo - 1)]) + abs1(h[(lo, lo)]);
            if scale == 0.0 {
                scale = hnorm;
            }
            if sub <= (eps * scale).max(safe_min) {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stagnant = 0;
            continue;
        }

        stagnant += 1;
        total += 1;
        if total > max_sweeps {
            return Err(Error::NonConvergence {
                dim: n,
                iterations: total,
            });
        }

        let shift = if stagnant.is_multiple_of(10) {
            h[(hi, hi)] + Complex64::new(0.75 * abs1(h[(hi, hi - 1)]), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        // implicit single-shift sweep over rows lo..=hi
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first_col = if k == lo { lo } else { k - 1 };
            rotate_rows(h, k, c, s, first_col..n);
            rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
            rotate_cols(q, k, c, s, 0..n);
            if k > lo {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    // clear rounding left below the diagonal
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(())
}
