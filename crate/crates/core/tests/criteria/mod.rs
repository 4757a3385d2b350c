//! The acceptance criteria, shared by the test runner and the `acceptance` subcommand.

use std::time::{Duration, Instant};

use lfharm::bank::random_function;
use lfharm::kernels::*;
use lfharm::maximal::*;
use lfharm::probes::*;
use lfharm::shift_invariant::*;
use lfharm::tiling::*;
use lfharm::weights::*;
use lfharm::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Outcome {
    pub ok: bool,
    pub detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

/// Every field with q in {2, 3, 4}.
fn fields() -> Vec<LocalField> {
    vec![
        LocalField::q_p(2).unwrap(),
        LocalField::laurent(2, 1).unwrap(),
        LocalField::q_p(3).unwrap(),
        LocalField::laurent(3, 1).unwrap(),
        LocalField::laurent(2, 2).unwrap(),
    ]
}

fn exact_backend(f: &LocalField) -> bool {
    f.is_positive_char() && f.p() == 2
}

fn within(exact: bool, a: Complex64, b: Complex64, tol: f64) -> bool {
    if exact {
        a == b
    } else {
        (a - b).norm() <= tol
    }
}

/// Gaussian-integer cell values keep every sum exact in binary floating point.
fn integer_function(field: &LocalField, k: u32, seed: u64) -> SampledFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = field.cells(k).unwrap();
    let vals = (0..n)
        .map(|_| Complex64::new(rng.random_range(-8..=8) as f64, rng.random_range(-8..=8) as f64))
        .collect();
    SampledFunction::new(field, k, vals).unwrap()
}

fn sup_diff(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for f in fields() {
        let exact = exact_backend(&f);
        for k in 1..=5 {
            let cs = CharacterSystem::new(&f, k).unwrap();
            let n = cs.size();
            let table = cs.table_by_field().unwrap();
            // Gram matrix q^{-k} T T^* straight from the field-arithmetic table.
            let t = DMatrix::from_row_slice(n, n, &table);
            let gram = (&t * t.adjoint()).map(|z| z / n as f64);
            for i in 0..n {
                for j in 0..n {
                    let d = Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0);
                    if !within(exact, gram[(i, j)], d, 1e-10) {
                        return outcome(false, format!("{f} k={k}: gram[{i},{j}] = {}", gram[(i, j)]));
                    }
                    worst = worst.max((gram[(i, j)] - d).norm());
                }
            }
            for seed in 0..3 {
                let g = integer_function(&f, k, seed);
                let fast = fourier(&g).unwrap();
                let slow = transform::fourier_naive(&g, &table).unwrap();
                for (a, b) in fast.coeffs.iter().zip(&slow.coeffs) {
                    if !within(exact, *a, *b, 1e-10) {
                        return outcome(false, format!("{f} k={k}: fast {a} vs naive {b}"));
                    }
                    worst = worst.max((a - b).norm());
                }
                let lhs: f64 = g.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
                let rhs: f64 = fast.coeffs.iter().map(|v| v.norm_sqr()).sum();
                let ok = if exact { lhs == rhs } else { (lhs - rhs).abs() <= 1e-10 * lhs };
                if !ok {
                    return outcome(false, format!("{f} k={k}: Parseval {lhs} vs {rhs}"));
                }
                let back = inverse_fourier(&fast).unwrap();
                if sup_diff(&back, &g) > if exact { 0.0 } else { 1e-10 } {
                    return outcome(false, format!("{f} k={k}: inverse does not recover f"));
                }
            }
        }
    }
    outcome(true, format!("q in {{2,3,4}}, k <= 5; exact in characteristic 2, worst residual {worst:.3e}"))
}

fn criterion_2() -> Outcome {
    for f in fields() {
        let q = f.q() as u64;
        if !u_of(&f, 0).is_zero() {
            return outcome(false, format!("{f}: u(0) != 0"));
        }
        for n in 1..q.pow(6) {
            let k = (1..).find(|&k| n < q.pow(k)).unwrap();
            if u_of(&f, n).valuation() != Some(-(k as i32)) {
                return outcome(false, format!("{f}: |u({n})| != q^{k}"));
            }
        }
        for r in 0..q * q {
            for k in 0..=3u32 {
                let shifted = u_of(&f, r).mul(&LocalElement::prime_power(&f, -(k as i32))).unwrap();
                for s in 0..q.pow(k) {
                    if u_of(&f, r * q.pow(k) + s) != shifted.add(&u_of(&f, s)).unwrap() {
                        return outcome(false, format!("{f}: composition fails at r={r} k={k} s={s}"));
                    }
                }
            }
        }
        if f.is_positive_char() {
            for m in 1..=3u32 {
                let w = Window::new(-(m as i32), 0).unwrap();
                let all: Vec<usize> = (0..q.pow(m) as usize).collect();
                let idx = |x: LocalElement| x.cell_index(w).unwrap();
                let mut neg: Vec<usize> = (0..q.pow(m)).map(|k| idx(u_of(&f, k).neg().unwrap())).collect();
                neg.sort_unstable();
                if neg != all {
                    return outcome(false, format!("{f}: -Lambda != Lambda at m={m}"));
                }
                for l in 0..q.pow(m) {
                    let mut s: Vec<usize> = (0..q.pow(m))
                        .map(|k| idx(u_of(&f, l).add(&u_of(&f, k)).unwrap()))
                        .collect();
                    s.sort_unstable();
                    if s != all {
                        return outcome(false, format!("{f}: u({l}) + Lambda != Lambda at m={m}"));
                    }
                }
            }
        }
    }
    outcome(true, "norm law n < q^6, composition r < q^2, k <= 3, group identities on windows m <= 3")
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for f in fields() {
        let q = f.q() as usize;
        let k = 4;
        for r in 0..=4u32 {
            let d = dirichlet(&f, q.pow(r), k).unwrap();
            for (i, v) in d.values().iter().enumerate() {
                let e = if i % q.pow(r) == 0 { q.pow(r) as f64 } else { 0.0 };
                let dev = (v - Complex64::new(e, 0.0)).norm();
                let ok = if exact_backend(&f) { dev == 0.0 } else { dev <= 1e-10 };
                if !ok {
                    return outcome(false, format!("{f}: D_{{q^{r}}} off by {dev:.3e} at cell {i}"));
                }
            }
        }
        let tables = RecursionTables::new(&f, k).unwrap();
        for l in 1..=k {
            for n in 0..=q.pow(k) {
                if !tables.check(n, l).unwrap() {
                    return outcome(false, format!("{f}: recursion fails at n={n} l={l}"));
                }
            }
        }
        for seed in 0..100 {
            let g = random_function(&f, k, seed).unwrap();
            for r in 0..=k {
                let dev = sup_diff(&apply_sn(q.pow(r), &g).unwrap(), &ball_average(&g, r).unwrap());
                worst = worst.max(dev);
                if dev > 1e-10 {
                    return outcome(false, format!("{f}: S_{{q^{r}}} differs from averaging by {dev:.3e}"));
                }
            }
        }
    }
    outcome(true, format!("D_{{q^r}} exact r <= 4; recursion for n <= q^4; S_{{q^r}} vs averaging {worst:.3e}"))
}

fn criterion_4() -> Outcome {
    let mut top = 0.0f64;
    let q23 = [
        LocalField::q_p(2).unwrap(),
        LocalField::laurent(2, 1).unwrap(),
        LocalField::q_p(3).unwrap(),
        LocalField::laurent(3, 1).unwrap(),
    ];
    for f in q23 {
        let q = f.q() as usize;
        // K_n needs n < q^k, so n <= q^4 is audited at k = 5.
        let k = 5;
        for n in 1..=q.pow(4) {
            let b = kernel_bound(&f, n, k).unwrap();
            top = top.max(b.max_product / q as f64);
            if b.violations > 0 {
                return outcome(false, format!("{f}: {} bound violations at n={n}", b.violations));
            }
            let hat = kernel_hat(&f, n, k).unwrap();
            let mut mass = 0.0;
            for h in &hat {
                let zero = h.norm() <= 1e-10;
                let one = (h - Complex64::new(1.0, 0.0)).norm() <= 1e-10;
                if !zero && !one {
                    return outcome(false, format!("{f}: K^_{n} takes the value {h}"));
                }
                mass += h.re;
            }
            if (mass - n as f64).abs() > 1e-8 {
                return outcome(false, format!("{f}: K^_{n} has mass {mass}"));
            }
        }
        for n in 1..q.pow(3) {
            if !kernel_constancy_check(&f, n, 3).unwrap() {
                return outcome(false, format!("{f}: K_{n} not constant on spheres at window 3"));
            }
        }
    }
    outcome(true, format!("zero violations for n <= q^4, q in {{2,3}}; max |K_n||x|/q = {top:.6}"))
}

/// [|x|^alpha]_{A_p} from the sphere series, independent of the library formula.
fn ap_series(q: u32, alpha: f64, p: f64) -> f64 {
    let q = q as f64;
    let avg = |beta: f64| -> f64 {
        // average of |x|^beta over D
        (0..4000)
            .map(|v| (1.0 - 1.0 / q) * q.powf(-(v as f64) * (1.0 + beta)))
            .sum()
    };
    let v = avg(alpha) * avg(-alpha / (p - 1.0)).powf(p - 1.0);
    v.max(1.0)
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for q in [2u32, 3] {
        let f = if q == 2 { LocalField::q_p(2).unwrap() } else { LocalField::q_p(3).unwrap() };
        for alpha in [-0.5, 0.25, 0.5] {
            let got = ap_characteristic(&f, &Weight::power(alpha), 2.0, 8).unwrap().value;
            let closed = power_ap_closed_form(q, alpha, 2.0);
            let series = ap_series(q, alpha, 2.0);
            let rel = ((got - series) / series).abs().max(((closed - series) / series).abs());
            worst = worst.max(rel);
            if rel > 1e-10 {
                return outcome(false, format!("q={q} alpha={alpha}: {got} vs series {series}"));
            }
        }
    }
    let mass = power_weight_ball_mass_exact(1, &Ball::ideal(2, 0, 0).unwrap()).unwrap();
    if mass != Ratio::new(2, 3) {
        return outcome(false, format!("int_D |x| dx = {mass} at q=2"));
    }
    outcome(true, format!("A_2 of |x|^alpha within {worst:.3e} of the series; int_D |x| = 2/3 exactly"))
}

fn criterion_6() -> Outcome {
    let f = LocalField::q_p(2).unwrap();
    let mut notes = Vec::new();
    for theta in [0.5, 0.25, 0.1] {
        let r = buckley_pointwise(&f, theta, 8, 4).unwrap();
        if r.violations > 0 {
            return outcome(false, format!("theta={theta}: {} pointwise violations", r.violations));
        }
    }
    let mut ok = true;
    for p in [1.5, 2.0, 3.0] {
        let s = buckley_sweep(&f, p, &[0.5, 0.25, 0.1, 0.05], None).unwrap();
        let rel = (s.slope - s.target).abs() / s.target;
        ok &= rel <= 0.15;
        notes.push(format!("p={p}: slope {:.4} vs {:.4} ({:.1}%)", s.slope, s.target, 100.0 * rel));
    }
    outcome(ok, format!("pointwise bound holds at k=8, m=4; {}", notes.join("; ")))
}

fn sn_sup(f: &LocalField, alpha: f64, k: u32, n_max: usize) -> f64 {
    let w = Weight::power(alpha).sampled(f, k).unwrap();
    (1..=n_max.min(f.cells(k).unwrap()))
        .map(|n| weighted_opnorm_l2(&KernelOperator::s_n(f, n, k).unwrap(), Some(&w)).unwrap().norm)
        .fold(0.0, f64::max)
}

fn criterion_7() -> Outcome {
    let f = LocalField::q_p(2).unwrap();
    let (a4, a5) = (sn_sup(&f, 0.5, 4, 32), sn_sup(&f, 0.5, 5, 32));
    let (b4, b5) = (sn_sup(&f, 1.0, 4, 32), sn_sup(&f, 1.0, 5, 32));
    let inside = (a5 - a4) / a4;
    let boundary = (b5 - b4) / b4;
    outcome(
        inside < 0.05 && boundary >= 0.20,
        format!(
            "|x|^(1/2): {a4:.6} -> {a5:.6} ({:+.2}%, need < 5%); |x|: {b4:.6} -> {b5:.6} ({:+.2}%, need >= 20%)",
            100.0 * inside,
            100.0 * boundary
        ),
    )
}

fn criterion_8() -> Outcome {
    let f = LocalField::q_p(2).unwrap();
    let k = 5;
    let q = f.q() as usize;
    let mut failures = 0usize;
    let mut first = None;
    for alpha in [-0.5, 0.25, 0.5] {
        let w = Weight::power(alpha).sampled(&f, k).unwrap();
        for seed in 0..50 {
            let g = random_function(&f, k, seed).unwrap();
            let errs: Vec<f64> = (0..=k)
                .map(|r| apply_sn(q.pow(r), &g).unwrap().sub(&g).unwrap().lp_norm(2.0, Some(&w)).unwrap())
                .collect();
            let monotone = errs.windows(2).all(|e| e[1] <= e[0] * (1.0 + 1e-12));
            let vanishes = errs[k as usize] <= 1e-10;
            if !(monotone && vanishes) {
                failures += 1;
                first.get_or_insert_with(|| format!("alpha={alpha} seed={seed}: {errs:.4?}"));
            }
        }
    }
    match first {
        None => outcome(true, "150 (f, w) pairs decrease monotonically to 0 at r = k"),
        Some(e) => outcome(false, format!("{failures} of 150 pairs not monotone; first {e}")),
    }
}

fn criterion_9() -> Outcome {
    let f = LocalField::laurent(2, 1).unwrap();
    let ks = [3, 4, 5];
    let one = schauder_verdict(&PhiSpec::indicator_of_d(&f, 5).unwrap(), &ks, 32).unwrap();
    let half = schauder_verdict(&PhiSpec::from_power_density(&f, 0.5, 5).unwrap(), &ks, 32).unwrap();
    let full = schauder_verdict(&PhiSpec::from_power_density(&f, 1.0, 5).unwrap(), &ks, 32).unwrap();
    let resid = biorthogonality_check(&half.w_phi, 8, 5).unwrap();
    let ok = one.verdict == Verdict::SchauderBasis
        && half.verdict == Verdict::SchauderBasis
        && resid <= 1e-10
        && full.verdict != Verdict::SchauderBasis;
    outcome(
        ok,
        format!(
            "1_D: {}; |xi|^(1/2): {} (biorthogonality {resid:.3e}); |xi|: {}",
            one.verdict.as_str(),
            half.verdict.as_str(),
            full.verdict.as_str()
        ),
    )
}

fn criterion_10() -> Outcome {
    let f = LocalField::laurent(2, 1).unwrap();
    let (m, k) = (2, 4);
    let s = TilingSpec::standard(&f, m, k).unwrap();
    let gram = spectral_gram(&s, k).unwrap();
    let tiles = tiling_check(&s, k).unwrap().tiles;
    let cert = spectral_certify(&s, k, 8, 11).unwrap();
    // Cell 0 leaves D for cell 1 + q^m, which the translate of cell q^m already covers.
    let span = (f.q() as usize).pow(m);
    let moved = move_cell(&s, k, 0, 1 + span).unwrap();
    let r = tiling_check(&moved, k).unwrap();
    let double = r.histogram.get(&2).copied().unwrap_or(0);
    outcome(
        gram == 0.0 && tiles && cert.certified && !r.tiles && double > 0,
        format!(
            "gram {gram:e}, tiles {tiles}, certified {}; moved cell: tiles {}, {double} cell(s) covered twice",
            cert.certified, r.tiles
        ),
    )
}

fn drift(vals: &[f64]) -> f64 {
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn criterion_11() -> Outcome {
    let f = LocalField::q_p(2).unwrap();
    let grid = default_grid();
    let mut notes = Vec::new();
    let mut ok = true;
    for alpha in [-0.5, 0.25, 0.5] {
        let w = Weight::power(alpha);
        let mut eps = Vec::new();
        let mut delta = Vec::new();
        let mut ratio = Vec::new();
        let mut tn = Vec::new();
        for k in 3..=5u32 {
            eps.push(reverse_holder_probe(&f, &w, k, &grid).unwrap().best_eps);
            delta.push(a_infty_probe(&f, &w, k, 16, 7, &grid).unwrap().delta);
            let bank = bank::test_bank(&f, 3, k, 5, 8).unwrap();
            ratio.push(m_to_sharp_probe(&f, 2.0, &w, k, &bank).unwrap().ratio);
            tn.push(tnmr_probe(5, 2.0, &tnmr_bank(&f, k, 13, 8).unwrap()).unwrap());
        }
        let all = [&eps, &delta, &ratio, &tn];
        let finite = all.iter().all(|v| v.iter().all(|x| x.is_finite() && *x > 0.0));
        let d = all.iter().map(|v| drift(v)).fold(0.0, f64::max);
        ok &= finite && d <= 1.5;
        notes.push(format!(
            "alpha={alpha}: eps {eps:.2?} delta {delta:.2?} M/# {ratio:.3?} T_n {tn:.3?} drift {d:.3}"
        ));
    }
    outcome(ok, notes.join("; "))
}

/// (name, check, time budget in seconds).
pub type Criterion = (&'static str, fn() -> Outcome, u64);

pub const CRITERIA: [Criterion; 11] = [
    ("character and transform exactness", criterion_1, 30),
    ("u(n) laws", criterion_2, 10),
    ("Dirichlet kernel facts", criterion_3, 60),
    ("modified kernel audit", criterion_4, 120),
    ("A_p closed forms", criterion_5, 10),
    ("Buckley sharpness", criterion_6, 300),
    ("weighted uniform boundedness", criterion_7, 120),
    ("convergence of S_{q^r} f", criterion_8, 60),
    ("Schauder pipeline", criterion_9, 120),
    ("tiling and spectral checkers", criterion_10, 10),
    ("probe stability", criterion_11, 180),
];

pub struct Run {
    pub number: usize,
    pub name: &'static str,
    pub outcome: Outcome,
    pub seconds: f64,
}

/// Runs criterion `number` (1-based) and fails it when it exceeds its budget.
pub fn run(number: usize) -> Run {
    let (name, check, budget) = CRITERIA[number - 1];
    let start = Instant::now();
    let mut outcome = check();
    let took = start.elapsed();
    if took > Duration::from_secs(budget) {
        outcome.ok = false;
        outcome.detail.push_str(&format!("; over the {budget} s budget"));
    }
    Run {
        number,
        name,
        outcome,
        seconds: took.as_secs_f64(),
    }
}
