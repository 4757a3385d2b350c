//! Numerical probes for self-improvement properties of A_p weights and for the
//! pointwise sharp-function bounds. The constants found are reported, not asserted.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bank::BankEntry;
use crate::error::{Error, Result};
use crate::field::{LocalField, Window};
use crate::function::SampledFunction;
use crate::kernels::apply_tn;
use crate::maximal::{m_s, maximal, sharp_maximal};
use crate::weights::{level_sums, power_cell_averages, Weight};

/// Largest constant accepted by the reverse Holder and A_infinity probes.
pub const PROBE_C: f64 = 4.0;

/// The grid 0.05, 0.10, ..., 1.
pub fn default_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.05).collect()
}

#[derive(Debug, Clone)]
pub struct RhiReport {
    /// Largest grid exponent passing with C <= PROBE_C; 0 if none does.
    pub best_eps: f64,
    pub c: f64,
    /// (eps, C(eps)) for every grid point.
    pub trace: Vec<(f64, f64)>,
}

fn powered_cells(field: &LocalField, w: &Weight, k: u32, e: f64) -> Result<Vec<f64>> {
    match w {
        Weight::Power { alpha } => {
            if alpha * e <= -1.0 {
                return Ok(vec![f64::INFINITY; field.cells(k)?]);
            }
            power_cell_averages(field.q(), alpha * e, Window::on_d(k))
        }
        Weight::Sampled(_) => Ok(w.cell_values(field, k)?.iter().map(|v| v.powf(e)).collect()),
    }
}

/// Max over balls B in D of levels 0..=k of (avg_B w^{1+eps})^{1/(1+eps)} / avg_B w.
pub fn reverse_holder_constant(field: &LocalField, w: &Weight, k: u32, eps: f64) -> Result<f64> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::param(format!("eps must be nonnegative, got {eps}")));
    }
    let q = field.q() as usize;
    let base = level_sums(q, &w.cell_values(field, k)?, k);
    let high = level_sums(q, &powered_cells(field, w, k, 1.0 + eps)?, k);
    let mut c = 1.0f64;
    for j in 0..=k as usize {
        let cells = q.pow(k - j as u32) as f64;
        for (a, b) in base[j].iter().zip(&high[j]) {
            c = c.max((b / cells).powf(1.0 / (1.0 + eps)) / (a / cells));
        }
    }
    Ok(c)
}

pub fn reverse_holder_probe(field: &LocalField, w: &Weight, k: u32, grid: &[f64]) -> Result<RhiReport> {
    let mut trace = Vec::with_capacity(grid.len());
    let mut best = (0.0, 1.0);
    for &eps in grid {
        let c = reverse_holder_constant(field, w, k, eps)?;
        trace.push((eps, c));
        if c <= PROBE_C && eps > best.0 {
            best = (eps, c);
        }
    }
    Ok(RhiReport {
        best_eps: best.0,
        c: best.1,
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct AinfReport {
    /// Largest grid exponent passing with C <= PROBE_C; 0 if none does.
    pub delta: f64,
    pub c: f64,
    pub trace: Vec<(f64, f64)>,
    /// Number of (B, E) pairs examined.
    pub pairs: usize,
}

/// (w(E)/w(B), |E|/|B|) over balls B of levels 0..k and unions E of cells of B: B itself,
/// every nonempty set of children when q <= 8, and `samples` seeded unions of level-k cells.
fn ainf_pairs(field: &LocalField, w: &Weight, k: u32, samples: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let q = field.q() as usize;
    let vals = w.cell_values(field, k)?;
    let sums = level_sums(q, &vals, k);
    let mut out = Vec::new();
    for j in 0..k {
        let n = q.pow(j);
        let per = q.pow(k - j);
        for r in 0..n {
            let wb = sums[j as usize][r];
            out.push((1.0, 1.0));
            if q <= 8 {
                for mask in 1..(1usize << q) - 1 {
                    let we: f64 = (0..q)
                        .filter(|d| mask & (1 << d) != 0)
                        .map(|d| sums[j as usize + 1][r + d * n])
                        .sum();
                    out.push((we / wb, mask.count_ones() as f64 / q as f64));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((j as u64) << 32 | r as u64));
            for _ in 0..samples {
                let mut we = 0.0;
                let mut count = 0usize;
                for t in 0..per {
                    if rng.random_bool(0.5) {
                        we += vals[r + t * n];
                        count += 1;
                    }
                }
                if count > 0 {
                    out.push((we / wb, count as f64 / per as f64));
                }
            }
        }
    }
    Ok(out)
}

/// Fits w(E) |B|^delta <= C w(B) |E|^delta on the grid.
pub fn a_infty_probe(
    field: &LocalField,
    w: &Weight,
    k: u32,
    samples: usize,
    seed: u64,
    grid: &[f64],
) -> Result<AinfReport> {
    let pairs = ainf_pairs(field, w, k, samples, seed)?;
    let mut trace = Vec::with_capacity(grid.len());
    let mut best = (0.0, 1.0);
    for &delta in grid {
        let c = pairs
            .iter()
            .map(|(rw, rm)| rw / rm.powf(delta))
            .fold(1.0f64, f64::max);
        trace.push((delta, c));
        if c <= PROBE_C && delta > best.0 {
            best = (delta, c);
        }
    }
    Ok(AinfReport {
        delta: best.0,
        c: best.1,
        trace,
        pairs: pairs.len(),
    })
}

#[derive(Debug, Clone)]
pub struct MSharpReport {
    pub ratio: f64,
    /// (label, ||Mf|| / ||f^#||) per member used.
    pub members: Vec<(String, f64)>,
    /// Members that are constant and were skipped.
    pub skipped: Vec<String>,
}

/// max over the bank of ||Mf||_{L^p(w)} / ||f^#||_{L^p(w)} on D, each f shifted to mean 0.
pub fn m_to_sharp_probe(
    field: &LocalField,
    p: f64,
    w: &Weight,
    k: u32,
    bank: &[BankEntry],
) -> Result<MSharpReport> {
    if p <= 1.0 || !p.is_finite() {
        return Err(Error::param(format!("p must exceed 1, got {p}")));
    }
    let wf = w.sampled(field, k)?;
    let results: Vec<Result<Option<(String, f64)>>> = bank
        .par_iter()
        .map(|e| {
            if e.f.level() != k || !e.f.is_on_d() {
                return Err(Error::param(format!("bank member {} is not at level {k}", e.label)));
            }
            let mean = e.f.integral();
            let g = e.f.map(|v| v - mean);
            if g.values().iter().all(|v| v.norm() < 1e-12) {
                return Ok(None);
            }
            let num = maximal(&g, 0)?.lp_norm(p, Some(&wf))?;
            let den = sharp_maximal(&g, 0)?.lp_norm(p, Some(&wf))?;
            Ok(Some((e.label.clone(), num / den)))
        })
        .collect();
    let mut members = Vec::new();
    let mut skipped = Vec::new();
    for (e, r) in bank.iter().zip(results) {
        match r? {
            Some(m) => members.push(m),
            None => skipped.push(e.label.clone()),
        }
    }
    let ratio = members.iter().map(|m| m.1).fold(0.0, f64::max);
    Ok(MSharpReport {
        ratio,
        members,
        skipped,
    })
}

/// max over cells and bank members of (T_n f)^#(x) / M_s f(x), balls inside D.
pub fn tnmr_probe(n: usize, s: f64, bank: &[SampledFunction]) -> Result<f64> {
    let ratios: Vec<Result<f64>> = bank
        .par_iter()
        .map(|f| {
            let t = sharp_maximal(&apply_tn(n, f)?, 0)?;
            let ms = m_s(f, s, 0)?;
            Ok(t.values()
                .iter()
                .zip(ms.values())
                .filter(|(_, b)| b.re > 0.0)
                .map(|(a, b)| a.re / b.re)
                .fold(0.0, f64::max))
        })
        .collect();
    ratios.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

/// Seeded random functions for the pointwise probe.
pub fn tnmr_bank(field: &LocalField, k: u32, seed: u64, count: usize) -> Result<Vec<SampledFunction>> {
    (0..count)
        .map(|i| crate::bank::random_function(field, k, seed.wrapping_add(i as u64)))
        .collect()
}

/// Zeroes one cell; used to check positivity guards.
pub fn zero_one_cell(w: &SampledFunction, cell: usize) -> Result<SampledFunction> {
    let mut v = w.values().to_vec();
    if cell >= v.len() {
        return Err(Error::param("cell out of range"));
    }
    v[cell] = Complex64::default();
    w.with_values(v)
}
