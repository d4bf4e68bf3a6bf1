use std::fmt;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ptvec_core::e3::{self, find_transition_in_window};
use ptvec_core::symmetry::{oddness, Parity, TimeReversal};
use ptvec_core::wigner_eckart::{
    angular_momentum_matrices, selection_rule_scan, verify_vector_algebra, vector_operator, MultipletSpace,
    ReducedElementMap, ReducedElements,
};
use ptvec_core::{so3, Complex64, Error};

use crate::{DataFormat, E3CriticalArgs, E3SweepArgs, ReportFormat, So3SweepArgs, WeVerifyArgs, WORKERS_ENV};

/// Commutator residual accepted by `we-verify`.
const ALGEBRA_TOLERANCE: f64 = 1e-12;

/// Truncation added for the cross-check in `e3-critical`.
const TRUNC_STEP: usize = 20;

#[derive(Debug)]
pub enum Failure {
    Io(String),
    Usage(String),
    /// Solver failure or a verification that did not pass.
    Numerical(String),
    Bracket(String),
    /// Stdout closed before all output was written.
    BrokenPipe,
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::BrokenPipe => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Bracket(_) => 4,
        }
    }

    pub fn report(&self) -> ExitCode {
        eprintln!("error: {self}");
        ExitCode::from(self.code())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Io(s) | Failure::Usage(s) | Failure::Numerical(s) | Failure::Bracket(s) => f.write_str(s),
            Failure::BrokenPipe => f.write_str("broken pipe"),
        }
    }
}

fn is_broken_pipe(e: &Error) -> bool {
    let io = match e.root() {
        Error::Io(io) => io,
        Error::Csv(c) => match c.kind() {
            csv::ErrorKind::Io(io) => io,
            _ => return false,
        },
        _ => return false,
    };
    io.kind() == std::io::ErrorKind::BrokenPipe
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_broken_pipe(&e) {
            return Failure::BrokenPipe;
        }
        let msg = e.to_string();
        match e.root() {
            Error::Domain(_) => Failure::Usage(msg),
            Error::NonConvergence { .. } => Failure::Numerical(msg),
            Error::UnmatchedEigenvalue { .. } | Error::Bracket { .. } | Error::AmbiguousBracket { .. } => {
                Failure::Bracket(msg)
            }
            _ => Failure::Io(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::BrokenPipe;
        }
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Size the global worker pool from the environment. Unset or 0 leaves the
/// default of one worker per available core.
pub fn init_workers() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("{WORKERS_ENV} must be a non-negative integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Io(format!("worker pool: {e}")))
}

/// `steps` points from `lo` to `hi`, both ends included.
fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    match steps {
        0 => Err(Failure::Usage("steps must be at least 1".into())),
        1 if lo == hi => Ok(vec![lo]),
        1 => Err(Failure::Usage(format!("one step needs equal ends, got {lo} and {hi}"))),
        _ if lo >= hi => Err(Failure::Usage(format!("range must increase, got {lo} to {hi}"))),
        _ => {
            let last = (steps - 1) as f64;
            Ok((0..steps)
                .map(|k| if k == steps - 1 { hi } else { lo + (hi - lo) * (k as f64 / last) })
                .collect())
        }
    }
}

fn emit<C, J>(format: DataFormat, out: Option<&Path>, save_csv: C, save_json: J) -> Result<(), Failure>
where
    C: FnOnce(Option<&Path>) -> ptvec_core::Result<()>,
    J: FnOnce(Option<&Path>) -> ptvec_core::Result<()>,
{
    match format {
        DataFormat::Csv => save_csv(out)?,
        DataFormat::Json => save_json(out)?,
    }
    Ok(())
}

fn print_json(value: &impl serde::Serialize) -> ptvec_core::Result<()> {
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn e3_sweep(a: E3SweepArgs) -> Result<(), Failure> {
    let g = grid(a.g_min, a.g_max, a.steps)?;
    let r = e3::sweep(a.m, &g, a.trunc, a.window)?;
    emit(
        a.format,
        a.out.as_deref(),
        |out| match out {
            Some(p) => r.save_csv(p),
            None => r.write_csv(std::io::stdout().lock()),
        },
        |out| match out {
            Some(p) => r.save_json(p),
            None => print_json(&r),
        },
    )?;
    eprintln!("m = {}: {} points, N = {}, window {}", a.m, g.len(), a.trunc, a.window);
    for t in &r.transitions {
        eprintln!(
            "  complex pairs {} -> {} between g = {} and {}",
            t.pairs_before, t.pairs_after, t.lower, t.upper
        );
    }
    Ok(())
}

pub fn e3_critical(a: E3CriticalArgs) -> Result<(), Failure> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Failure::Usage(format!("tol must be positive, got {}", a.tol)));
    }
    let t = find_transition_in_window(a.m, a.index, a.bracket, a.trunc, a.tol, a.window)?;
    let bigger = a.trunc + TRUNC_STEP;
    let rerun = find_transition_in_window(a.m, a.index, a.bracket, bigger, a.tol, a.window)?;
    let shift = (rerun.g_c - t.g_c).abs();
    match a.format {
        ReportFormat::Json => {
            let report = json!({
                "m": a.m,
                "index": a.index,
                "g_c": t.g_c,
                "bracket_width": t.bracket_width,
                "trunc": a.trunc,
                "window": a.window,
                "tol": a.tol,
                "rerun": {"trunc": bigger, "g_c": rerun.g_c, "bracket_width": rerun.bracket_width},
                "g_c_shift": shift,
            });
            print_json(&report)?;
        }
        ReportFormat::Text => {
            println!("m = {}, complex pair {}", a.m, a.index);
            println!("g_c            {:.10}", t.g_c);
            println!("bracket width  {:.3e}", t.bracket_width);
            println!("truncation     {}", a.trunc);
            println!("window         {}", a.window);
            println!("N = {bigger}: g_c = {:.10}, shift {shift:.3e}", rerun.g_c);
        }
    }
    Ok(())
}

pub fn so3_sweep(a: So3SweepArgs) -> Result<(), Failure> {
    let (lo, hi, steps) = a.b_range;
    let g = grid(lo, hi, steps)?;
    let r = so3::sweep(a.ell, &g, a.c_mode)?;
    emit(
        a.format,
        a.out.as_deref(),
        |out| match out {
            Some(p) => r.save_csv(p),
            None => r.write_csv(std::io::stdout().lock()),
        },
        |out| match out {
            Some(p) => r.save_json(p),
            None => print_json(&r),
        },
    )?;
    let complex = r.rows.iter().filter(|row| !row.is_real).count();
    eprintln!(
        "ell = {}, c {}: {} points, {} of {} eigenvalues complex",
        a.ell,
        a.c_mode,
        g.len(),
        complex,
        r.rows.len()
    );
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn random_elements(rng: &mut ChaCha8Rng, pt_odd: bool) -> ReducedElements {
    let mut z = || Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
    let (a, b, c) = (z(), z(), z());
    if pt_odd {
        ReducedElements::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, b.im), Complex64::new(0.0, c.im))
    } else {
        ReducedElements::new(a, b, c)
    }
}

struct Verdict {
    residual: f64,
    violations: usize,
    p_odd: bool,
    t_odd: bool,
}

fn verify(space: &MultipletSpace, map: &ReducedElementMap) -> Result<Verdict, Failure> {
    let v = vector_operator(space, map)?;
    let residual = verify_vector_algebra(&angular_momentum_matrices(space), &v)?;
    let scan = selection_rule_scan(space, &v);
    let labels = space.labels();
    let odd = oddness(&v, &Parity::multiplet(&labels), &TimeReversal::multiplet(&labels)?)?;
    Ok(Verdict {
        residual,
        violations: scan.violations,
        p_odd: odd.p_odd,
        t_odd: odd.t_odd,
    })
}

pub fn we_verify(a: WeVerifyArgs) -> Result<(), Failure> {
    let space = MultipletSpace::new(a.ells.clone())?;
    let ells: Vec<String> = space.ells().iter().map(u32::to_string).collect();
    println!("multiplets {{{}}}, dimension {}", ells.join(", "), space.dim());

    if a.trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let top = *space.ells().last().expect("non-empty space");
        let mut passed = 0;
        let mut worst = 0.0_f64;
        for _ in 0..a.trials {
            let mut map = ReducedElementMap::new();
            for &ell in space.ells() {
                let mut r = random_elements(&mut rng, a.require_pt);
                if ell == top || !space.contains(ell + 1) {
                    r.b = Complex64::new(0.0, 0.0);
                    r.c = Complex64::new(0.0, 0.0);
                }
                map.insert(ell, r);
            }
            let v = verify(&space, &map)?;
            worst = worst.max(v.residual);
            let pt_ok = !a.require_pt || (v.p_odd && v.t_odd);
            if v.residual <= ALGEBRA_TOLERANCE && v.violations == 0 && pt_ok {
                passed += 1;
            }
        }
        println!("random trials  {passed}/{} PASS (seed {})", a.trials, a.seed);
        println!("max residual   {worst:.3e}");
        if passed != a.trials {
            return Err(Failure::Numerical(format!("{} of {} trials failed", a.trials - passed, a.trials)));
        }
        return Ok(());
    }

    let map = ReducedElementMap::uniform(&space, ReducedElements::new(a.a, a.b, a.c));
    let v = verify(&space, &map)?;
    let algebra_ok = v.residual <= ALGEBRA_TOLERANCE;
    println!("A = {}, B = {}, C = {}", a.a, a.b, a.c);
    println!("commutator residual  {:.3e}  {}", v.residual, pass(algebra_ok));
    println!("selection rules      {} violations  {}", v.violations, pass(v.violations == 0));
    println!("hermitian            {}", if map.is_hermitian() { "yes" } else { "no" });
    println!("P-odd                {}", pass(v.p_odd));
    println!("T-odd                {}", pass(v.t_odd));
    if !algebra_ok || v.violations != 0 {
        return Err(Failure::Numerical("vector-operator algebra check failed".into()));
    }
    if a.require_pt && !(v.p_odd && v.t_odd) {
        return Err(Failure::Numerical("operator is not both P-odd and T-odd".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends_are_exact() {
        let g = grid(0.0, 20.0, 7).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!((g[0], g[6]), (0.0, 20.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(grid(3.0, 3.0, 1).unwrap(), vec![3.0]);
    }

    #[test]
    fn bad_grids() {
        for (lo, hi, n) in [(0.0, 1.0, 0), (0.0, 1.0, 1), (2.0, 1.0, 5), (1.0, 1.0, 3)] {
            assert!(matches!(grid(lo, hi, n), Err(Failure::Usage(_))), "{lo} {hi} {n}");
        }
    }

    #[test]
    fn error_codes() {
        let f: Failure = Error::Bracket { lo: 0.0, hi: 1.0, index: 1, lo_count: 0, hi_count: 0 }.into();
        assert_eq!(f.code(), 4);
        let f: Failure = Error::AtCoupling {
            coupling: 2.0,
            source: Box::new(Error::NonConvergence { dim: 3, iterations: 9 }),
        }
        .into();
        assert_eq!(f.code(), 3);
        let f: Failure = Error::Domain("x".into()).into();
        assert_eq!(f.code(), 2);
    }
}
