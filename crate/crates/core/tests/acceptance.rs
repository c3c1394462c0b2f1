//! Acceptance suite: one line per criterion, `PASS` or `FAIL`.
//!
//! Runs as a plain binary (`harness = false`) so the report is printed in
//! order and in full. The process fails when a criterion fails, except for
//! criteria listed in `UNATTAINABLE`, which are still evaluated at their
//! stated tolerance and reported as `FAIL` together with the reason.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nonneg_cocycle::cocycle::{
    lambda_estimate, lyapunov_trace, lyapunov_trace_prefix, quasi_additivity_defect,
    check_positivity_condition, CocycleSpec, MeasureModel,
};
use nonneg_cocycle::matproc::{spectral_radius, LogMatrix, NonNegMatrix, ScaledProduct, SupportPattern, DEFAULT_TOL};
use nonneg_cocycle::multifractal::{spectrum_curve, WeightedAverageSpec};
use nonneg_cocycle::returnformula::{
    periodic_exponent, return_formula_estimate, select_marker, select_marker_from,
};
use nonneg_cocycle::scenario::{find, trace_verdict, AnalysisPlan, Outcome};
use nonneg_cocycle::symbolic::{decompose_returns, long_word_mass, InfiniteWordSource, Symbol};

/// Criteria that no correct implementation can meet, with the reason.
const UNATTAINABLE: &[(u32, &str)] = &[(
    1,
    "‖F^n‖ = F_{n+3} for the entry-sum norm, so (1/n) log ‖F^n‖ − log φ = log(φ³/√5)/n + O(φ^{-2n}) ≈ 6.39e-5 at n = 10^4, above 1e-6",
)];

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail = format!("{}; {:.2} s", out.detail, took.as_secs_f64());
    if let Some(l) = limit {
        if took > l {
            out.pass = false;
            out.detail = format!("{} (limit {} s)", out.detail, l.as_secs());
        }
    }
    out
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn to_nonneg(m: &DMatrix<f64>) -> NonNegMatrix {
    NonNegMatrix::from_rows(&rows(m)).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, zero_prob: f64) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| {
        if rng.random::<f64>() < zero_prob {
            0.0
        } else {
            rng.random::<f64>()
        }
    })
}

fn positive_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| 0.05 + rng.random::<f64>())
}

fn entry_sum(m: &DMatrix<f64>) -> f64 {
    m.iter().sum()
}

fn c1() -> Check {
    let f = NonNegMatrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]]).unwrap();
    let spec = CocycleSpec::first_coordinate(&[f]).unwrap();
    let source = InfiniteWordSource::periodic(1, "0").unwrap();
    let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let trace = lyapunov_trace(&spec, &source, &[10_000]).unwrap();
    let exponent = trace.exponents()[0];
    let periodic = periodic_exponent(&spec, &[0]).unwrap();
    let trace_err = (exponent - log_phi).abs();
    let periodic_err = (periodic - log_phi).abs();
    check(
        trace_err < 1e-6 && periodic_err < 1e-12,
        format!("trace exponent error {trace_err:.3e} (tol 1e-6), periodic_exponent error {periodic_err:.1e} (tol 1e-12)"),
    )
}

fn c2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0f64;
    let mut worst_oracle = 0f64;
    for _ in 0..1000 {
        let d = rng.random_range(2..=4);
        let a = random_matrix(&mut rng, d, 0.2);
        let b = random_matrix(&mut rng, d, 0.2);
        let (ab, ba) = (&a * &b, &b * &a);
        let r_ab = spectral_radius(&to_nonneg(&ab), DEFAULT_TOL).unwrap();
        let r_ba = spectral_radius(&to_nonneg(&ba), DEFAULT_TOL).unwrap();
        let rho = r_ab.max(r_ba);
        worst = worst.max((r_ab - r_ba).abs() / (1.0 + rho));
        // independent eigenvalue computation
        let eig = ab.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst_oracle = worst_oracle.max((eig - r_ab).abs() / (1.0 + eig));
    }
    check(
        worst < 1e-9 && worst_oracle < 1e-8,
        format!("max |ρ(AB) − ρ(BA)|/(1+ρ) = {worst:.2e} (tol 1e-9); vs eigenvalue solver {worst_oracle:.2e}"),
    )
}

/// min over all index quadruples of b_ik b_js / (b_jk b_is), by brute force.
fn phi_brute(b: &[[f64; 2]; 2]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for s in 0..2 {
                    best = best.min(b[i][k] * b[j][s] / (b[j][k] * b[i][s]));
                }
            }
        }
    }
    best
}

fn c3() -> Check {
    let ones = NonNegMatrix::ones(3).birkhoff_tau().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut zero_entry_ok = true;
    let mut tried = 0;
    while tried < 500 {
        let d = rng.random_range(2..=4);
        let m = to_nonneg(&random_matrix(&mut rng, d, 0.3));
        if m.allowability().allowable() && !m.is_positive() {
            tried += 1;
            zero_entry_ok &= m.birkhoff_tau().unwrap() == 1.0;
        }
    }
    let b = [[2.0, 1.0], [1.0, 1.0]];
    let m = NonNegMatrix::from_rows(&b).unwrap();
    let brute = phi_brute(&b);
    let expected = (1.0 - 0.5f64.sqrt()) / (1.0 + 0.5f64.sqrt());
    let tau = m.birkhoff_tau().unwrap();
    check(
        ones == 0.0 && zero_entry_ok && (tau - expected).abs() < 1e-12 && brute == 0.5 && m.phi().unwrap() == brute,
        format!(
            "τ(J) = {ones}, τ = 1 on {tried} allowable matrices with zeros: {zero_entry_ok}, τ([[2,1],[1,1]]) error {:.1e}, brute-force φ = {brute}",
            (tau - expected).abs()
        ),
    )
}

fn c4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let d = rng.random_range(1..=4);
        let l = random_matrix(&mut rng, d, 0.3);
        let p = positive_matrix(&mut rng, d);
        let r = random_matrix(&mut rng, d, 0.3);
        let c = to_nonneg(&p).elem_constant().unwrap();
        let nl = entry_sum(&l);
        let npr = entry_sum(&(&p * &r));
        let nlpr = entry_sum(&(&l * &p * &r));
        let lower = c * nl * npr;
        let upper = nl * npr;
        let scale = upper.max(f64::MIN_POSITIVE);
        let excess = ((lower - nlpr) / scale).max((nlpr - upper) / scale);
        worst = worst.max(excess);
        if excess > 1e-12 {
            violations += 1;
        }
    }
    check(violations == 0, format!("{violations} violations, largest relative excess {worst:.2e}"))
}

fn c5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = true;
    let mut report = Vec::new();
    for (m, r, d) in [(2, 1, 2), (2, 2, 3), (3, 2, 2), (2, 3, 4)] {
        let spec = CocycleSpec::from_fn(m, r, |_| {
            let mat = to_nonneg(&positive_matrix(&mut rng, d));
            Ok(LogMatrix::from(&mat))
        })
        .unwrap();
        let c_min = spec.min_elem_constant().unwrap();
        let source = InfiniteWordSource::bernoulli(vec![1.0 / m as f64; m], 50 + d as u64).unwrap();
        let prefix = source.emit_prefix(4_000 + r).unwrap();
        let pairs: Vec<(usize, usize)> = (0..1000)
            .map(|_| (rng.random_range(1..2000), rng.random_range(1..2000)))
            .collect();
        let max = quasi_additivity_defect(&spec, &prefix, &pairs).unwrap().max.unwrap();
        ok &= max <= c_min.ln().abs() + 1e-9;
        report.push(format!("{max:.3} ≤ {:.3}", c_min.ln().abs()));
    }
    check(ok, format!("max defect vs |log c_min| per table: {}", report.join(", ")))
}

fn c6() -> Check {
    let prefix = InfiniteWordSource::bernoulli(vec![0.5, 0.5], 6).unwrap().emit_prefix(1_000_000).unwrap();
    let mut worst = 0f64;
    let mut markers = 0;
    for len in 1..=4u32 {
        for code in 0..(1usize << len) {
            let v: Vec<Symbol> = (0..len).rev().map(|b| ((code >> b) & 1) as Symbol).collect();
            let dec = decompose_returns(&prefix, &v).unwrap();
            let i = dec.last_index() as f64;
            let rate = i / dec.last_return_time() as f64;
            worst = worst.max((rate - 0.5f64.powi(len as i32)).abs());
            markers += 1;
        }
    }
    check(worst < 1e-2, format!("{markers} markers, max |i/τ_i − 2^-|v|| = {worst:.2e} (tol 1e-2)"))
}

fn positive_pair() -> CocycleSpec {
    CocycleSpec::first_coordinate(&[
        NonNegMatrix::from_rows(&[[2.0, 1.0], [1.0, 1.0]]).unwrap(),
        NonNegMatrix::from_rows(&[[1.0, 3.0], [0.5, 1.0]]).unwrap(),
    ])
    .unwrap()
}

fn c7() -> Check {
    let spec = positive_pair();
    let prefix = InfiniteWordSource::thue_morse().emit_prefix(1_000_000).unwrap();
    let sel = select_marker(&spec, &prefix, 8, 8).unwrap();
    let est = return_formula_estimate(&spec, &prefix, &sel, 64).unwrap();
    let trace = lyapunov_trace_prefix(&spec, &prefix, &[est.tau_i]).unwrap();
    let exponent = trace.exponents()[0];
    let diff = (est.estimate - exponent).abs();
    check(
        diff <= est.correction_band + 5e-2,
        format!(
            "estimate {:.5}, trace exponent at τ_i = {} is {exponent:.5}, |diff| {diff:.4} ≤ band {:.4} + 0.05",
            est.estimate, est.tau_i, est.correction_band
        ),
    )
}

/// A pair swapped into each other by the permutation `[[0,1],[1,0]]`.
///
/// Its finite-n bias `E (1/n) log ‖A^{(n)}‖ − Λ` is small next to the
/// ensemble standard error at `n = 10^4`, unlike [`positive_pair`] whose
/// bias alone is about one standard error there.
fn symmetric_pair() -> CocycleSpec {
    CocycleSpec::first_coordinate(&[
        NonNegMatrix::from_rows(&[[3.0, 1.0], [1.0, 1.0]]).unwrap(),
        NonNegMatrix::from_rows(&[[1.0, 1.0], [1.0, 3.0]]).unwrap(),
    ])
    .unwrap()
}

fn c8() -> Check {
    let spec = symmetric_pair();
    let orbit = InfiniteWordSource::bernoulli(vec![0.5, 0.5], 0).unwrap();
    let single = lyapunov_trace(&spec, &orbit, &[1_000_000]).unwrap().exponents()[0];
    let lambda = lambda_estimate(&spec, &MeasureModel::bernoulli(vec![0.5, 0.5]).unwrap(), 10_000, 200, 80).unwrap();
    let z = (single - lambda.mean).abs() / lambda.std_error;
    check(
        z <= 3.0,
        format!("single orbit {single:.5}, Λ estimate {:.5} ± {:.1e}, {z:.2} standard errors", lambda.mean, lambda.std_error),
    )
}

fn c9() -> Check {
    let s = find("nolimit-geometric").unwrap();
    let spec = s.cocycle.build().unwrap();
    let AnalysisPlan::Trace { horizon, rules, condition } = &s.plan else { unreachable!() };
    let mut grid = nonneg_cocycle::cocycle::geometric_checkpoints(rules.geometric_start, *horizon);
    grid.extend(nonneg_cocycle::cocycle::linear_checkpoints(horizon / rules.linear_points, *horizon));
    grid.sort_unstable();
    grid.dedup();
    let trace = lyapunov_trace(&spec, s.source.as_ref().unwrap(), &grid).unwrap();
    let late: Vec<f64> = trace
        .checkpoints()
        .iter()
        .zip(trace.exponents())
        .filter(|(n, _)| **n as f64 >= rules.late_fraction * *horizon as f64)
        .map(|(_, e)| e)
        .collect();
    let gap = late.iter().copied().fold(f64::MIN, f64::max) - late.iter().copied().fold(f64::MAX, f64::min);
    let probe = condition.as_ref().unwrap();
    let sample = probe.sample.emit_prefix(probe.length).unwrap();
    let witness = check_positivity_condition(&spec, &sample, probe.max_ell).unwrap();
    let verdict = trace_verdict(&trace, rules).0;
    check(
        gap > 1.0 && witness.is_none() && verdict == Outcome::Oscillates,
        format!("late-window gap {gap:.4} (> 1.0), positivity witness: {}", if witness.is_none() { "none" } else { "found" }),
    )
}

fn c10() -> Check {
    let s = find("gap-blocks").unwrap();
    let spec = s.cocycle.build().unwrap();
    let AnalysisPlan::Returns { k0, max_ell, z_from, .. } = &s.plan else { unreachable!() };
    let prefix = s.source.as_ref().unwrap().emit_prefix(1_000_000).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [100_000, 1_000_000] {
        let head = &prefix[..n];
        let sel = select_marker_from(&spec, head, *k0, *max_ell, *z_from).unwrap();
        let mass = return_formula_estimate(&spec, head, &sel, 32).unwrap().long_mass;
        let direct = long_word_mass(&decompose_returns(head, &sel.v).unwrap(), 32);
        ok &= mass > 0.2 && (mass - direct).abs() < 1e-12;
        parts.push(format!("{mass:.3} at N = {n}"));
    }
    check(ok, format!("long-word mass above M = 32: {}", parts.join(", ")))
}

fn binary_entropy(a: f64) -> f64 {
    -(a * a.ln() + (1.0 - a) * (1.0 - a).ln()) / 2f64.ln()
}

fn c11() -> Check {
    let spec = WeightedAverageSpec::besicovitch();
    let betas: Vec<f64> = (0..21)
        .map(|k| 0.05 + 0.045 * k as f64)
        .map(|a: f64| (a / (1.0 - a)).ln())
        .collect();
    let curve = spectrum_curve(&spec, &betas, 4096, None).unwrap();
    let worst = curve
        .points
        .iter()
        .map(|p| (p.dim - binary_entropy(p.alpha)).abs())
        .fold(0.0, f64::max);
    let at_zero = spectrum_curve(&spec, &[0.0], 4096, None).unwrap().points[0].dim;
    check(
        worst < 1e-3 && (at_zero - 1.0).abs() < 1e-9,
        format!("max |dim − H(α)/log 2| = {worst:.2e} over 21 points, dim at β = 0 off by {:.1e}", (at_zero - 1.0).abs()),
    )
}

/// Natural log of a positive rational, accurate to a few ulps.
fn ln_rational(q: &BigRational) -> f64 {
    fn ln_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        let shift = bits.saturating_sub(60);
        let top: BigInt = n >> shift;
        let top = top.to_string().parse::<f64>().unwrap();
        top.ln() + shift as f64 * 2f64.ln()
    }
    ln_int(q.numer()) - ln_int(q.denom())
}

fn c12() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0f64;
    let mut flags_ok = true;
    let mut zeros = 0;
    for _ in 0..500 {
        let d = rng.random_range(2..=4);
        let zero_prob = [0.0, 0.3, 0.6][rng.random_range(0..3)];
        let mut product = ScaledProduct::identity(d);
        let mut exact: Vec<BigRational> = (0..d * d)
            .map(|k| BigRational::from_integer(BigInt::from((k / d == k % d) as u8)))
            .collect();
        let mut support = SupportPattern::identity(d);
        for _ in 0..30 {
            let entries: Vec<f64> = (0..d * d)
                .map(|_| {
                    if rng.random::<f64>() < zero_prob {
                        0.0
                    } else {
                        10f64.powf(rng.random_range(-40.0..40.0))
                    }
                })
                .collect();
            let m = NonNegMatrix::new(d, entries.clone()).unwrap();
            product.push_matrix(&m).unwrap();
            support = support.product(m.support());
            let q: Vec<BigRational> = entries.iter().map(|&x| BigRational::from_f64(x).unwrap()).collect();
            let mut next = vec![BigRational::zero(); d * d];
            for i in 0..d {
                for k in 0..d {
                    if exact[i * d + k].is_zero() {
                        continue;
                    }
                    for j in 0..d {
                        next[i * d + j] += &exact[i * d + k] * &q[k * d + j];
                    }
                }
            }
            exact = next;
        }
        let total: BigRational = exact.iter().fold(BigRational::zero(), |a, b| a + b);
        flags_ok &= product.is_zero() == support.is_zero() && support.is_zero() == total.is_zero();
        if total.is_zero() {
            zeros += 1;
            continue;
        }
        assert!(total.is_positive());
        let oracle = ln_rational(&total);
        // relative error of the log-norm, and of the norm itself
        let diff = (product.log_norm() - oracle).abs();
        worst = worst.max(diff / oracle.abs()).max(diff);
    }
    check(
        worst < 1e-9 && flags_ok && zeros > 0,
        format!("max relative error of log-norm and norm {worst:.2e} (tol 1e-9), {zeros} structural zeros, flags exact: {flags_ok}"),
    )
}

type Criterion = (u32, &'static str, Option<u64>, fn() -> Check);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "golden-ratio periodic exponent", Some(1), c1),
        (2, "rotation invariance of the spectral radius", None, c2),
        (3, "Birkhoff contraction coefficient", None, c3),
        (4, "elementary constant sandwich", None, c4),
        (5, "quasi-additivity defect", None, c5),
        (6, "return rate", Some(10), c6),
        (7, "return-word estimate vs trace", None, c7),
        (8, "single orbit vs ensemble exponent", Some(30), c8),
        (9, "no-limit example oscillates", Some(20), c9),
        (10, "gap example keeps long returns", None, c10),
        (11, "Besicovitch-Eggleston spectrum", Some(5), c11),
        (12, "scaled product fidelity", None, c12),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, f) in criteria {
        let out = timed(limit.map(Duration::from_secs), f);
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:2} {status}  {name}: {}", out.detail);
        if !out.pass {
            match UNATTAINABLE.iter().find(|(k, _)| *k == id) {
                Some((_, why)) => println!("             known unattainable: {why}"),
                None => unexpected.push(id),
            }
        }
        if out.pass && UNATTAINABLE.iter().any(|(k, _)| *k == id) {
            println!("             listed as unattainable but passed; update the list");
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failed criteria: {unexpected:?}");
        std::process::exit(1);
    }
}
