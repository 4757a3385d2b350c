use anyhow::{bail, Context, Result};
use lfharm::bank::{random_function, test_bank};
use lfharm::kernels::*;
use lfharm::maximal::*;
use lfharm::probes::*;
use lfharm::shift_invariant::*;
use lfharm::tiling::*;
use lfharm::transform::fourier_naive;
use lfharm::weights::*;
use lfharm::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{fields_for, FieldArgs, MaximalKind, PhiArg, WeightArg};
use crate::io::{read_function, read_json, FunctionFile, OmegaFile, TranslationFile};
use crate::output::{Cell, Format, Report, Table};

fn field_cell(f: &LocalField) -> Cell {
    Cell::Text(f.to_string())
}

fn ball_cell(b: &Ball) -> Cell {
    Cell::Text(format!("P^{}+[{}]", b.level, b.index))
}

pub fn weight(arg: &WeightArg, field: &LocalField) -> Result<Weight> {
    Ok(match arg {
        WeightArg::Power(a) => Weight::power(*a),
        WeightArg::Unit => Weight::unit(field)?,
        WeightArg::File(path) => {
            let (_, f) = read_function(path)?;
            if f.field().params() != field.params() {
                bail!("{} is sampled on {}, not on {field}", path.display(), f.field());
            }
            Weight::Sampled(f)
        }
    })
}

fn weight_label(arg: &WeightArg) -> String {
    match arg {
        WeightArg::Power(a) => format!("power:{a}"),
        WeightArg::Unit => "unit".into(),
        WeightArg::File(p) => p.display().to_string(),
    }
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, failure: Option<String>, ok_detail: impl Into<String>) -> Check {
    match failure {
        None => Check {
            name,
            passed: true,
            detail: ok_detail.into(),
        },
        Some(detail) => Check {
            name,
            passed: false,
            detail,
        },
    }
}

fn checks_report(command: &str, per_field: Vec<(LocalField, Vec<Check>)>) -> Report {
    let mut r = Report::new(command, Format::Json);
    let mut t = Table::new(&["field", "check", "passed", "detail"]);
    let mut failed = 0usize;
    for (f, checks) in per_field {
        for c in checks {
            if !c.passed {
                failed += 1;
                r.violate(format!("{f}: {} failed: {}", c.name, c.detail));
            }
            t.push(vec![field_cell(&f), c.name.into(), c.passed.into(), c.detail.into()]);
        }
    }
    r.sum("checks", t.rows.len()).sum("failed", failed);
    r.table = Some(t);
    r
}

fn exact_backend(f: &LocalField) -> bool {
    f.is_positive_char() && f.p() == 2
}

/// Gaussian-integer cell values: every transform sum is exact in binary64 when q = 2^c.
fn integer_function(field: &LocalField, k: u32, seed: u64) -> Result<SampledFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..field.cells(k)?)
        .map(|_| Complex64::new(rng.random_range(-8..=8) as f64, rng.random_range(-8..=8) as f64))
        .collect();
    Ok(SampledFunction::new(field, k, vals)?)
}

fn close(exact: bool, a: Complex64, b: Complex64) -> bool {
    if exact {
        a == b
    } else {
        (a - b).norm() <= 1e-10
    }
}

fn selftest_checks(f: &LocalField, k: u32, seed: u64) -> Result<Vec<Check>> {
    let q = f.q() as u64;
    let mut out = Vec::new();

    let kk = (1..=k.min(6)).take_while(|&j| q.pow(j) <= 4096).last().unwrap_or(1);
    let bad = (1..q.pow(kk)).find(|&n| {
        let want = (1..).find(|&j| n < q.pow(j)).unwrap() as i32;
        u_of(f, n).valuation() != Some(-want)
    });
    out.push(check(
        "u_norm_law",
        bad.map(|n| format!("|u({n})| is wrong")),
        format!("n < q^{kk}"),
    ));

    let mut bad = None;
    'comp: for r in 0..q * q {
        for j in 0..=k.min(3) {
            let shifted = u_of(f, r).mul(&LocalElement::prime_power(f, -(j as i32)))?;
            for s in 0..q.pow(j) {
                if u_of(f, r * q.pow(j) + s) != shifted.add(&u_of(f, s))? {
                    bad = Some(format!("r={r} k={j} s={s}"));
                    break 'comp;
                }
            }
        }
    }
    out.push(check("u_composition", bad, format!("r < q^2, k <= {}", k.min(3))));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = None;
    for _ in 0..200 {
        let mut elem = || -> Result<LocalElement> {
            let start = rng.random_range(-3..3);
            let digits: Vec<FqElem> = (0..5).map(|_| FqElem(rng.random_range(0..f.q()))).collect();
            Ok(LocalElement::from_digits(f, start, &digits, Precision::Exact)?)
        };
        let (x, y) = (elem()?, elem()?);
        let s = x.add(&y)?;
        let top = x.abs().max(y.abs());
        if s.abs() > top || (x.abs() != y.abs() && s.abs() != top) {
            bad = Some(format!("ultrametric fails for {x:?} + {y:?}"));
            break;
        }
        if !x.is_zero() && !y.is_zero() && x.mul(&y)?.valuation() != Some(x.valuation().unwrap() + y.valuation().unwrap()) {
            bad = Some(format!("|xy| != |x||y| for {x:?}, {y:?}"));
            break;
        }
    }
    out.push(check("ultrametric", bad, "200 seeded pairs"));

    if f.is_positive_char() {
        let m = k.clamp(1, 3);
        let w = Window::new(-(m as i32), 0)?;
        let all: Vec<usize> = (0..q.pow(m) as usize).collect();
        let mut bad = None;
        let mut neg = (0..q.pow(m))
            .map(|n| u_of(f, n).neg()?.cell_index(w))
            .collect::<lfharm::Result<Vec<_>>>()?;
        neg.sort_unstable();
        if neg != all {
            bad = Some("-Lambda != Lambda".to_string());
        }
        for l in 0..q.pow(m) {
            let mut s = (0..q.pow(m))
                .map(|n| u_of(f, l).add(&u_of(f, n))?.cell_index(w))
                .collect::<lfharm::Result<Vec<_>>>()?;
            s.sort_unstable();
            if s != all && bad.is_none() {
                bad = Some(format!("u({l}) + Lambda != Lambda"));
            }
        }
        out.push(check("lambda_group", bad, format!("window P^-{m}/D")));
    }

    let level = (1..=k).take_while(|&j| q.pow(j) <= 256).last().unwrap_or(1);
    let cs = CharacterSystem::new(f, level)?;
    let n = cs.size();
    let table = cs.table_by_field()?;
    let exact = exact_backend(f);
    let mut bad = None;
    'gram: for a in 0..n {
        for b in 0..n {
            let s: Complex64 = (0..n).map(|j| table[a * n + j] * table[b * n + j].conj()).sum::<Complex64>() / n as f64;
            let d = Complex64::new(if a == b { 1.0 } else { 0.0 }, 0.0);
            if !close(exact, s, d) {
                bad = Some(format!("<chi_{a}, chi_{b}> = {s}"));
                break 'gram;
            }
        }
    }
    out.push(check("character_orthonormality", bad, format!("level {level}, exact: {exact}")));

    let g = integer_function(f, level, seed)?;
    let fast = fourier(&g)?;
    let slow = fourier_naive(&g, &table)?;
    let bad = fast
        .coeffs
        .iter()
        .zip(&slow.coeffs)
        .position(|(a, b)| !close(exact, *a, *b))
        .map(|i| format!("coefficient {i}: {} vs {}", fast.coeffs[i], slow.coeffs[i]));
    out.push(check("fast_vs_naive", bad, format!("level {level}")));

    let g = random_function(f, k, seed)?;
    let lhs = g.lp_norm(2.0, None)?.powi(2);
    let rhs: f64 = fourier(&g)?.coeffs.iter().map(|v| v.norm_sqr()).sum();
    let dev = (lhs - rhs).abs() / lhs;
    out.push(check(
        "parseval",
        (dev > 1e-10).then(|| format!("relative deviation {dev:e}")),
        format!("level {k}, deviation {dev:.3e}"),
    ));
    Ok(out)
}

pub fn field_selftest(field: &FieldArgs, k: u32, seed: u64, all: bool) -> Result<Report> {
    let mut per = Vec::new();
    for f in fields_for(field, all)? {
        per.push((f.clone(), selftest_checks(&f, k, seed)?));
    }
    let mut r = checks_report("field-selftest", per);
    r.param("k", k).param("seed", seed);
    Ok(r)
}

pub fn characters(field: &FieldArgs, k: u32) -> Result<Report> {
    let f = field.field()?;
    let cs = CharacterSystem::new(&f, k)?;
    let n = cs.size();
    if n > 1024 {
        bail!("a table with q^k = {n} rows is too large; use k with q^k <= 1024");
    }
    let table = cs.table();
    let mut header = vec!["n".to_string()];
    for j in 0..n {
        header.push(format!("x{j}_re"));
        header.push(format!("x{j}_im"));
    }
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for m in 0..n {
        let mut row = vec![Cell::from(m)];
        for v in &table[m * n..(m + 1) * n] {
            row.push(v.re.into());
            row.push(v.im.into());
        }
        t.rows.push(row);
    }
    let mut r = Report::new("characters", Format::Csv);
    r.param("field", field_cell(&f)).param("k", k);
    r.table = Some(t);
    Ok(r)
}

fn dirichlet_checks(f: &LocalField, k: u32, bank: usize, seed: u64) -> Result<Vec<Check>> {
    let q = f.q() as usize;
    let mut out = Vec::new();
    let exact = exact_backend(f);
    let mut bad = None;
    for r in 0..=k {
        let d = dirichlet(f, q.pow(r), k)?;
        if let Some(i) = d.values().iter().enumerate().position(|(i, v)| {
            let e = if i % q.pow(r) == 0 { q.pow(r) as f64 } else { 0.0 };
            !close(exact, *v, Complex64::new(e, 0.0))
        }) {
            bad = Some(format!("D_(q^{r}) differs from q^{r} 1_(P^{r}) at cell {i}"));
            break;
        }
    }
    out.push(check("prime_power_kernels", bad, format!("r <= {k}, exact: {exact}")));

    let tables = RecursionTables::new(f, k)?;
    let mut bad = None;
    'rec: for l in 1..=k {
        for n in 0..=q.pow(k) {
            if !tables.check(n, l)? {
                bad = Some(format!("n={n} l={l}"));
                break 'rec;
            }
        }
    }
    out.push(check("recursion", bad, format!("n <= q^{k}, 1 <= l <= {k}")));

    let mut worst = 0.0f64;
    for s in 0..bank as u64 {
        let g = random_function(f, k, seed.wrapping_add(s))?;
        for r in 0..=k {
            let a = apply_sn(q.pow(r), &g)?;
            let b = ball_average(&g, r)?;
            for (x, y) in a.values().iter().zip(b.values()) {
                worst = worst.max((x - y).norm());
            }
        }
    }
    out.push(check(
        "partial_sum_is_averaging",
        (worst > 1e-10).then(|| format!("deviation {worst:e}")),
        format!("{bank} functions, deviation {worst:.3e}"),
    ));
    Ok(out)
}

pub fn dirichlet_cmd(field: &FieldArgs, n: Option<usize>, k: u32, bank: usize, seed: u64, all: bool) -> Result<Report> {
    let Some(n) = n else {
        let mut per = Vec::new();
        for f in fields_for(field, all)? {
            per.push((f.clone(), dirichlet_checks(&f, k, bank, seed)?));
        }
        let mut r = checks_report("dirichlet", per);
        r.param("k", k).param("bank", bank).param("seed", seed);
        return Ok(r);
    };
    let f = field.field()?;
    let d = dirichlet(&f, n, k)?;
    let naive = dirichlet_naive(&f, n, k)?;
    let diff = d
        .values()
        .iter()
        .zip(naive.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let mut r = Report::new("dirichlet", Format::Csv);
    r.param("field", field_cell(&f)).param("n", n).param("k", k);
    r.sum("naive_max_diff", diff);
    if diff > 1e-10 {
        r.violate(format!("fast and direct D_{n} differ by {diff:e}"));
    }
    let mut t = Table::new(&["cell", "re", "im"]);
    for (i, v) in d.values().iter().enumerate() {
        t.push(vec![i.into(), v.re.into(), v.im.into()]);
    }
    r.table = Some(t);
    Ok(r)
}

pub fn kernel_audit(field: &FieldArgs, nmax: Option<usize>, k: Option<u32>, all: bool) -> Result<Report> {
    let mut r = Report::new("kernel-audit", Format::Csv);
    if all {
        r.param("fields", "all");
    } else {
        r.param("field", field_cell(&field.field()?));
    }
    let mut t = Table::new(&["field", "k", "n", "max_abs_k_times_abs_x", "violations", "hat_binary", "hat_mass", "sphere_constant"]);
    for f in fields_for(field, all)? {
        let q = f.q() as usize;
        let nmax = nmax.unwrap_or(q.pow(4));
        let k = match k {
            Some(k) => k,
            None => (1..).find(|&j| nmax < q.pow(j)).unwrap(),
        };
        for n in 1..=nmax {
            let b = kernel_bound(&f, n, k)?;
            let hat = kernel_hat(&f, n, k)?;
            let binary = hat
                .iter()
                .all(|h| h.norm() <= 1e-10 || (h - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
            let mass: f64 = hat.iter().map(|h| h.re).sum();
            let constant = kernel_constancy_check(&f, n, k)?;
            if b.violations > 0 {
                r.violate(format!("{f}: |K_{n}(x)||x| > q on {} cells", b.violations));
            }
            if !binary || (mass - n as f64).abs() > 1e-8 {
                r.violate(format!("{f}: transform of K_{n} is not an indicator of mass {n}"));
            }
            if !constant {
                r.violate(format!("{f}: K_{n} is not constant on spheres"));
            }
            t.push(vec![
                field_cell(&f),
                k.into(),
                n.into(),
                b.max_product.into(),
                b.violations.into(),
                binary.into(),
                mass.into(),
                constant.into(),
            ]);
        }
    }
    r.sum("rows", t.rows.len());
    r.table = Some(t);
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
pub fn sn_norms(f: &LocalField, w: &WeightArg, p: f64, k: u32, nmax: usize, budget: usize, seed: u64) -> Result<Report> {
    let wt = weight(w, f)?;
    let ws = wt.sampled(f, k)?;
    let mut r = Report::new("sn-norms", Format::Csv);
    r.param("field", field_cell(f))
        .param("w", weight_label(w))
        .param("p", p)
        .param("k", k)
        .param("nmax", nmax);
    let exact = p == 2.0;
    r.param("method", if exact { "l2 top singular pair" } else { "lower bound search" });
    if !exact {
        r.param("budget", budget).param("seed", seed);
    }
    let top = nmax.min(f.cells(k)?);
    let mut t = Table::new(&["n", "norm", "residual"]);
    let mut sup = 0.0f64;
    for n in 1..=top {
        let op = KernelOperator::s_n(f, n, k)?;
        let (norm, res) = if exact {
            let o = weighted_opnorm_l2(&op, Some(&ws))?;
            (o.norm, o.residual)
        } else {
            (opnorm_lower_bound_lp(&op, Some(&ws), p, budget, seed)?, f64::NAN)
        };
        sup = sup.max(norm);
        t.push(vec![n.into(), norm.into(), res.into()]);
    }
    r.sum("sup", sup);
    r.table = Some(t);
    Ok(r)
}

pub fn ap(f: &LocalField, w: &WeightArg, p: f64, k: u32) -> Result<Report> {
    let rep = ap_characteristic(f, &weight(w, f)?, p, k)?;
    let mut r = Report::new("ap", Format::Json);
    r.param("field", field_cell(f)).param("w", weight_label(w)).param("p", p).param("k", k);
    r.sum("value", rep.value).sum("witness", ball_cell(&rep.witness));
    if let WeightArg::Power(a) = w {
        r.sum("closed_form", power_ap_closed_form(f.q(), *a, p));
    }
    Ok(r)
}

pub fn doubling(f: &LocalField, w: &WeightArg, k: u32) -> Result<Report> {
    let rep = doubling_ratio(f, &weight(w, f)?, k)?;
    let mut r = Report::new("doubling", Format::Json);
    r.param("field", field_cell(f)).param("w", weight_label(w)).param("k", k);
    r.sum("max", rep.max).sum("ratios", rep.ratios);
    Ok(r)
}

fn trace_table(name: &str, trace: &[(f64, f64)]) -> Table {
    let mut t = Table::new(&[name, "c"]);
    for (e, c) in trace {
        t.push(vec![(*e).into(), (*c).into()]);
    }
    t
}

pub fn rhi(f: &LocalField, w: &WeightArg, k: u32) -> Result<Report> {
    let rep = reverse_holder_probe(f, &weight(w, f)?, k, &default_grid())?;
    let mut r = Report::new("rhi-probe", Format::Json);
    r.param("field", field_cell(f)).param("w", weight_label(w)).param("k", k).param("c_max", PROBE_C);
    r.sum("eps", rep.best_eps).sum("c", rep.c);
    r.table = Some(trace_table("eps", &rep.trace));
    Ok(r)
}

pub fn ainf(f: &LocalField, w: &WeightArg, k: u32, samples: usize, seed: u64) -> Result<Report> {
    let rep = a_infty_probe(f, &weight(w, f)?, k, samples, seed, &default_grid())?;
    let mut r = Report::new("ainf-probe", Format::Json);
    r.param("field", field_cell(f))
        .param("w", weight_label(w))
        .param("k", k)
        .param("samples", samples)
        .param("seed", seed)
        .param("c_max", PROBE_C);
    r.sum("delta", rep.delta).sum("c", rep.c).sum("pairs", rep.pairs);
    r.table = Some(trace_table("delta", &rep.trace));
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
pub fn maximal_cmd(
    field: &FieldArgs,
    input: Option<&std::path::Path>,
    k: u32,
    seed: u64,
    m: u32,
    kind: MaximalKind,
    s: f64,
) -> Result<Report> {
    let mut r = Report::new("maximal", Format::Csv);
    let f = match input {
        Some(path) => {
            r.param("input", path.display().to_string());
            read_function(path)?.1
        }
        None => {
            let fld = field.field()?;
            r.param("field", field_cell(&fld)).param("k", k).param("seed", seed);
            random_function(&fld, k, seed)?
        }
    };
    let out = match kind {
        MaximalKind::Hl => maximal(&f, m)?,
        MaximalKind::Sharp => sharp_maximal(&f, m)?,
        MaximalKind::Ms => m_s(&f, s, m)?,
    };
    r.param("m", m).param("kind", format!("{kind:?}").to_lowercase());
    if kind == MaximalKind::Ms {
        r.param("s", s);
    }
    let w = out.window();
    r.sum("window_low", w.low).sum("window_high", w.high);
    r.sum("max", out.values().iter().map(|v| v.re).fold(0.0, f64::max));
    let mut t = Table::new(&["cell", "value"]);
    for (i, v) in out.values().iter().enumerate() {
        t.push(vec![i.into(), v.re.into()]);
    }
    r.table = Some(t);
    Ok(r)
}

pub fn buckley(f: &LocalField, p: f64, thetas: &[f64], k: Option<u32>, m: Option<u32>) -> Result<Report> {
    let mut r = Report::new("buckley", Format::Csv);
    r.param("field", field_cell(f)).param("p", p);
    let mut t = Table::new(&["theta", "k", "m", "ap", "ratio", "paper_bound", "ratio_above_bound", "log_slope", "tail"]);
    let mut records = Vec::new();
    let mut sorted = thetas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    for &theta in &sorted {
        let kk = k.unwrap_or_else(|| auto_depth(f.q(), theta));
        let mm = match m {
            Some(m) => m,
            None => auto_window(f, p, theta, kk)?,
        };
        let rec = buckley_experiment(f, p, theta, kk, mm)?;
        let above = rec.ratio >= rec.paper_bound;
        if !above {
            r.violate(format!("theta={theta}: ratio {} below {}", rec.ratio, rec.paper_bound));
        }
        t.push(vec![
            theta.into(),
            kk.into(),
            mm.into(),
            rec.ap.into(),
            rec.ratio.into(),
            rec.paper_bound.into(),
            above.into(),
            (rec.ratio.ln() / rec.ap.ln()).into(),
            rec.tail.into(),
        ]);
        records.push(rec);
    }
    if records.len() >= 2 {
        let xs: Vec<f64> = records.iter().map(|x| x.ap.ln()).collect();
        let ys: Vec<f64> = records.iter().map(|x| x.ratio.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        r.sum("sweep_slope", sxy / sxx);
    }
    r.sum("target_slope", 1.0 / (p - 1.0));
    r.table = Some(t);
    Ok(r)
}

pub fn m_sharp(f: &LocalField, p: f64, w: &WeightArg, k: u32, seed: u64, random: usize) -> Result<Report> {
    let bank = test_bank(f, k.min(3), k, seed, random)?;
    let rep = m_to_sharp_probe(f, p, &weight(w, f)?, k, &bank)?;
    let mut r = Report::new("m-sharp-probe", Format::Json);
    r.param("field", field_cell(f))
        .param("p", p)
        .param("w", weight_label(w))
        .param("k", k)
        .param("seed", seed)
        .param("random", random);
    r.sum("ratio", rep.ratio).sum("skipped", rep.skipped);
    let mut t = Table::new(&["member", "ratio"]);
    for (label, v) in rep.members {
        t.push(vec![label.into(), v.into()]);
    }
    r.table = Some(t);
    Ok(r)
}

pub fn schauder(field: &FieldArgs, phi: &PhiArg, klist: &[u32], n: usize) -> Result<Report> {
    let top = klist.iter().copied().max().context("--klist is empty")?;
    let (spec, label) = match phi {
        PhiArg::Indicator => (PhiSpec::indicator_of_d(&field.field()?, top)?, "indicator".to_string()),
        PhiArg::Power(a) => (PhiSpec::from_power_density(&field.field()?, *a, top)?, format!("power:{a}")),
        PhiArg::File(path) => {
            let (file, f): (FunctionFile, _) = read_function(path)?;
            (PhiSpec::new(f, file.declared_total)?, path.display().to_string())
        }
    };
    let rep = schauder_verdict(&spec, klist, n)?;
    let mut r = Report::new("schauder", Format::Json);
    r.param("field", field_cell(spec.field()))
        .param("phi", label)
        .param("klist", klist.to_vec())
        .param("N", n)
        .param("a2_stable_tol", A2_STABLE)
        .param("trace_spread_tol", TRACE_SPREAD)
        .param("trace_growth_tol", TRACE_GROWTH);
    r.sum("verdict", rep.verdict.as_str())
        .sum("tail", rep.tail)
        .sum("a2", rep.levels.iter().map(|l| l.a2).collect::<Vec<_>>())
        .sum(
            "sup_norms",
            rep.levels
                .iter()
                .map(|l| l.norms.iter().copied().fold(0.0, f64::max))
                .collect::<Vec<_>>(),
        )
        .sum("a2_stable", rep.a2_stable)
        .sum("trace_bounded", rep.trace_bounded)
        .sum("trace_diverges", rep.trace_diverges)
        .sum("dual_integrable", rep.dual.integrable)
        .sum("dual_integral", rep.dual.integral)
        .sum("dual_growth", rep.dual.growth);
    if rep.dual.integrable {
        let nb = 8.min(spec.field().cells(top)?);
        r.sum("biorthogonality_residual", biorthogonality_check(&rep.w_phi, nb, top)?);
        r.sum("biorthogonality_n", nb);
    }
    let mut t = Table::new(&["k", "n", "norm"]);
    for l in &rep.levels {
        for (i, v) in l.norms.iter().enumerate() {
            t.push(vec![l.k.into(), (i + 1).into(), (*v).into()]);
        }
    }
    r.table = Some(t);
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
pub fn tiling(
    field: &FieldArgs,
    omega: Option<&std::path::Path>,
    t_file: Option<&std::path::Path>,
    standard: Option<u32>,
    k: u32,
    spectral: bool,
    mv: Option<&[usize]>,
) -> Result<Report> {
    let f = field.field()?;
    let mut r = Report::new("tiling", Format::Csv);
    r.param("field", field_cell(&f)).param("k", k);
    let mut spec = match (standard, omega) {
        (Some(m), _) => {
            r.param("standard_m", m);
            TilingSpec::standard(&f, m, k)?
        }
        (None, Some(path)) => {
            let o: OmegaFile = read_json(path)?;
            let w = Window::new(o.window[0], o.window[1])?;
            let balls = o
                .balls
                .iter()
                .map(|[level, index]| Ball::new(f.q(), w.low, *level as i32, *index as usize))
                .collect::<lfharm::Result<Vec<_>>>()?;
            let tr: TranslationFile = match t_file {
                Some(p) => read_json(p)?,
                None => TranslationFile::default(),
            };
            let mut ts: Vec<LocalElement> = tr.u.iter().map(|&n| u_of(&f, n)).collect();
            ts.extend(tr.cells.iter().map(|&c| LocalElement::from_cell(&f, w, c)));
            let gamma = (0..f.cells(k)? as u64).map(|n| u_of(&f, n)).collect();
            r.param("omega", path.display().to_string());
            TilingSpec::new(&f, w, balls, ts, gamma)?
        }
        (None, None) => bail!("give --standard M or --omega FILE"),
    };
    if let Some(mv) = mv {
        if mv.len() != 2 {
            bail!("--move-cell takes FROM,TO");
        }
        spec = move_cell(&spec, k, mv[0], mv[1])?;
        r.param("moved", format!("{}->{}", mv[0], mv[1]));
    }
    let rep = tiling_check(&spec, k)?;
    r.sum("tiles", rep.tiles);
    match rep.first_defect {
        Some((c, v)) => r.sum("first_defect", format!("cell {c} covered {v} times")),
        None => r.sum("first_defect", "none"),
    };
    if spectral {
        let c = spectral_certify(&spec, k, 8, 0)?;
        r.sum("gram", c.gram)
            .sum("dimension", c.dimension)
            .sum("spectrum_size", c.spectrum_size)
            .sum("parseval", c.parseval)
            .sum("spectral_certified", c.certified);
    }
    let mut t = Table::new(&["coverage", "cells"]);
    for (cov, count) in &rep.histogram {
        t.push(vec![(*cov).into(), (*count).into()]);
    }
    r.table = Some(t);
    Ok(r)
}
