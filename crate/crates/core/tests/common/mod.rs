//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use ptvec_core::Complex64;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Unnormalized P_{ℓ,m}(x) for ℓ = m … lmax by upward recurrence from P_{m,m}.
pub fn assoc_legendre_column(m: u32, lmax: u32, x: f64) -> Vec<f64> {
    let mut pmm = 1.0;
    let s = (1.0 - x * x).sqrt();
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    let mut out = vec![pmm];
    if lmax == m {
        return out;
    }
    let mut prev = pmm;
    let mut cur = x * (2 * m + 1) as f64 * pmm;
    out.push(cur);
    for l in (m + 2)..=lmax {
        let next = ((2 * l - 1) as f64 * x * cur - (l + m - 1) as f64 * prev) / (l - m) as f64;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// N_ℓ via log-gamma.
pub fn normalization_lgamma(l: u32, m: u32) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let lr = ln_gamma((l - m + 1) as f64) - ln_gamma((l + m + 1) as f64);
    ((2 * l + 1) as f64 / 2.0).sqrt() * (0.5 * lr).exp()
}

/// ⟨ℓ'|f(η)|ℓ⟩ in the normalized basis by quadrature.
pub fn legendre_matrix_element(lp: u32, l: u32, m: u32, f: impl Fn(f64) -> f64, nodes: &[(f64, f64)]) -> f64 {
    let lmax = lp.max(l);
    let np = normalization_lgamma(lp, m);
    let n = normalization_lgamma(l, m);
    nodes
        .iter()
        .map(|&(x, w)| {
            let col = assoc_legendre_column(m, lmax, x);
            w * np * col[(lp - m) as usize] * f(x) * n * col[(l - m) as usize]
        })
        .sum()
}

/// Clebsch–Gordan coefficients ⟨ℓ m; 1 q | ℓ+1 m+q⟩ for all m, q, by applying
/// J₋ = L₋ ⊗ 1 + 1 ⊗ S₋ to the stretched state |ℓ,ℓ⟩|1,1⟩ and normalizing.
/// Returned as a map (m, q) → coefficient.
pub fn cg_stretched(l: u32) -> std::collections::BTreeMap<(i32, i32), f64> {
    let li = l as i32;
    let idx = |m: i32, q: i32| -> usize { ((m + li) * 3 + (q + 1)) as usize };
    let dim = (2 * l as usize + 1) * 3;
    let mut state = vec![0.0; dim];
    state[idx(li, 1)] = 1.0;
    let lower = |j2: f64, mz: f64| (j2 - mz * (mz - 1.0)).sqrt();
    let mut out = std::collections::BTreeMap::new();
    let big = li + 1;
    for big_m in (-big..=big).rev() {
        for m in -li..=li {
            for q in -1..=1 {
                if m + q == big_m {
                    out.insert((m, q), state[idx(m, q)]);
                }
            }
        }
        if big_m == -big {
            break;
        }
        let mut next = vec![0.0; dim];
        for m in -li..=li {
            for q in -1..=1 {
                let a = state[idx(m, q)];
                if a == 0.0 {
                    continue;
                }
                if m > -li {
                    next[idx(m - 1, q)] += a * lower((l * (l + 1)) as f64, m as f64);
                }
                if q > -1 {
                    next[idx(m, q - 1)] += a * lower(2.0, q as f64);
                }
            }
        }
        let nrm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        state = next.into_iter().map(|x| x / nrm).collect();
    }
    out
}

/// Roots of z³ + a z² + b z + c by Cardano, polished with Newton steps.
pub fn cubic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 3] {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut u3 = -q / 2.0 + disc;
    if u3.norm() < (-q / 2.0 - disc).norm() {
        u3 = -q / 2.0 - disc;
    }
    let u = u3.powf(1.0 / 3.0);
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let uk = u * w.powu(k as u32);
        let vk = if uk.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { -p / (3.0 * uk) };
        *r = uk + vk - a / 3.0;
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = *r * *r * *r + a * *r * *r + b * *r + c;
            let df = 3.0 * *r * *r + 2.0 * a * *r + b;
            if df.norm() > 1e-12 {
                *r -= f / df;
            }
        }
    }
    roots
}

/// Determinant by nalgebra's partial-pivoting LU.
pub fn lu_determinant(h: &DMatrix<Complex64>) -> Complex64 {
    h.clone().lu().determinant()
}

/// Largest distance when matching `a` into `b` greedily by nearest value.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (y - x).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Property-test configuration with a pinned seed, so runs are repeatable.
pub fn pinned(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x7074_7665_6373),
        ..Default::default()
    }
}
