//! Hardy-Littlewood, M_s and sharp maximal functions by a pass over the coset tree,
//! plus the power-weight sharpness experiment.

use std::ops::{Add, Div};

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::LocalField;
use crate::function::SampledFunction;
use crate::weights::{ap_characteristic, log_power_mass_at_origin, power_function, Weight};

/// Default number of ambient levels P^{-1}, ..., P^{-m} above D.
pub const DEFAULT_WINDOW: u32 = 3;

/// For every cell of a window with `depth` digits, the largest average over the
/// balls i mod q^d, d = 0..=depth, that contain it.
fn tree_max<T>(q: usize, vals: &[T], depth: u32, count: impl Fn(u32) -> T) -> Vec<T>
where
    T: Copy + PartialOrd + Zero + Add<Output = T> + Div<Output = T>,
{
    let mut best = vals.to_vec();
    let mut sums = vals.to_vec();
    for d in (0..depth).rev() {
        let n = q.pow(d);
        let mut coarse = vec![T::zero(); n];
        for (i, v) in sums.iter().enumerate() {
            coarse[i % n] = coarse[i % n] + *v;
        }
        let c = count(depth - d);
        for (i, b) in best.iter_mut().enumerate() {
            let avg = coarse[i % n] / c;
            if avg > *b {
                *b = avg;
            }
        }
        sums = coarse;
    }
    best
}

fn widen(f: &SampledFunction, m: u32) -> Result<SampledFunction> {
    let low = -(m as i32);
    if f.window().low < low {
        return Err(Error::param(format!(
            "window P^{} is wider than the requested P^{low}",
            f.window().low
        )));
    }
    if f.window().low == low {
        return Ok(f.clone());
    }
    if f.window().low != 0 {
        return Err(Error::param("only functions on D or on the full window can be widened"));
    }
    f.extend_to(low)
}

/// Mf(x) = max over balls x in B of level -m..=k of avg_B |f|, on the window P^{-m}/P^k.
pub fn maximal(f: &SampledFunction, m: u32) -> Result<SampledFunction> {
    let g = widen(f, m)?;
    let q = g.field().q() as usize;
    let vals: Vec<f64> = g.values().iter().map(|v| v.norm()).collect();
    let depth = g.window().len();
    let out = tree_max(q, &vals, depth, |e| (q as f64).powi(e as i32));
    SampledFunction::on_window(
        g.field(),
        g.window(),
        out.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

/// Maximal function of nonnegative rational cell values on a window with `depth` digits.
pub fn maximal_exact(q: u32, vals: &[Ratio<i128>], depth: u32) -> Vec<Ratio<i128>> {
    tree_max(q as usize, vals, depth, |e| {
        Ratio::from_integer((q as i128).pow(e))
    })
}

/// M_s f = (M |f|^s)^{1/s}.
pub fn m_s(f: &SampledFunction, s: f64, m: u32) -> Result<SampledFunction> {
    if s <= 1.0 || !s.is_finite() {
        return Err(Error::param(format!("M_s needs s > 1, got {s}")));
    }
    let fs = f.map(|v| Complex64::new(v.norm().powf(s), 0.0));
    Ok(maximal(&fs, m)?.map(|v| Complex64::new(v.re.powf(1.0 / s), 0.0)))
}

/// f^#(x) = max over balls x in B of level -m..=k of avg_B |f - f_B|.
pub fn sharp_maximal(f: &SampledFunction, m: u32) -> Result<SampledFunction> {
    let g = widen(f, m)?;
    let q = g.field().q() as usize;
    let depth = g.window().len();
    let vals = g.values();
    let mut best = vec![0.0f64; vals.len()];
    let mut sums = vals.to_vec();
    for d in (0..depth).rev() {
        let n = q.pow(d);
        let mut coarse = vec![Complex64::default(); n];
        for (i, v) in sums.iter().enumerate() {
            coarse[i % n] += v;
        }
        let cells = q.pow(depth - d) as f64;
        let mut osc = vec![0.0; n];
        for (i, v) in vals.iter().enumerate() {
            osc[i % n] += (v - coarse[i % n] / cells).norm();
        }
        for (i, b) in best.iter_mut().enumerate() {
            *b = b.max(osc[i % n] / cells);
        }
        sums = coarse;
    }
    SampledFunction::on_window(
        g.field(),
        g.window(),
        best.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

/// (1 - 1/q) / (q^theta - 1), the lower constant for M on |x|^{theta-1} 1_D.
pub fn buckley_constant(q: u32, theta: f64) -> f64 {
    let q = q as f64;
    (1.0 - 1.0 / q) / (q.powf(theta) - 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct PointwiseReport {
    pub violations: usize,
    /// min over checked cells of Mf / (constant * f).
    pub min_ratio: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("theta must lie in (0, 1), got {theta}")))
    }
}

/// Cellwise Mf >= (1 - 1/q)(q^theta - 1)^{-1} f for f = |x|^{theta-1} 1_D cell-averaged.
///
/// The core cell P^k is skipped: there f is an average over a ball through the origin
/// and the bound is not claimed for it.
pub fn buckley_pointwise(field: &LocalField, theta: f64, k: u32, m: u32) -> Result<PointwiseReport> {
    check_theta(theta)?;
    let f = power_function(field, theta - 1.0, k)?;
    let mf = maximal(&f, m)?.restrict_to_d()?;
    let c = buckley_constant(field.q(), theta);
    let mut out = PointwiseReport {
        violations: 0,
        min_ratio: f64::INFINITY,
    };
    for (a, b) in mf.values().iter().zip(f.values()).skip(1) {
        let r = a.re / (c * b.re);
        out.min_ratio = out.min_ratio.min(r);
        if a.re < c * b.re {
            out.violations += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct BuckleyRecord {
    pub p: f64,
    pub theta: f64,
    pub k: u32,
    pub m: u32,
    pub ap: f64,
    pub ratio: f64,
    pub paper_bound: f64,
    /// Share of |Mf|^p w outside the window, relative to the captured part.
    pub tail: f64,
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// ln w(sphere of valuation v) for w = |x|^alpha: ln(w(P^v) - w(P^{v+1})).
fn log_sphere_mass(q: u32, alpha: f64, v: i32) -> Result<f64> {
    let a = log_power_mass_at_origin(q, alpha, v)?;
    let b = log_power_mass_at_origin(q, alpha, v + 1)?;
    Ok(a + (-(b - a).exp()).ln_1p())
}

/// Window tolerance: the uncaptured share of |Mf|^p w.
pub const WINDOW_TOL: f64 = 1e-3;

/// ||Mf||_{L^p(w)} / ||f||_{L^p(w)} with w = |x|^{(p-1)(1-theta)}, f = |x|^{theta-1} 1_D.
///
/// f, w and Mf are radial, so the norms are sums over spheres computed in log space;
/// the result agrees with the cellwise tree pass at the same (k, m).
pub fn buckley_experiment(
    field: &LocalField,
    p: f64,
    theta: f64,
    k: u32,
    m: u32,
) -> Result<BuckleyRecord> {
    check_theta(theta)?;
    if p <= 1.0 || !p.is_finite() {
        return Err(Error::param(format!("p must exceed 1, got {p}")));
    }
    let alpha = (p - 1.0) * (1.0 - theta);
    let q = field.q();
    let ap = ap_characteristic(field, &Weight::power(alpha), p, k)?.value;
    let lq = (q as f64).ln();
    let beta = theta - 1.0;
    // ln of the ball average of f over P^j, j >= 0; I = int_D f is j = 0.
    let ln_avg = |j: i32| -> Result<f64> { Ok(log_power_mass_at_origin(q, beta, j)? + j as f64 * lq) };
    let ln_i = ln_avg(0)?;
    let mut f_terms = Vec::new();
    let mut mf_terms = Vec::new();
    for v in 0..k as i32 {
        let ln_f = -(v as f64) * beta * lq;
        let ln_mf = ln_f.max(ln_avg(v)?);
        let ln_s = log_sphere_mass(q, alpha, v)?;
        f_terms.push(p * ln_f + ln_s);
        mf_terms.push(p * ln_mf + ln_s);
    }
    let ln_core = ln_avg(k as i32)?;
    let ln_wcore = log_power_mass_at_origin(q, alpha, k as i32)?;
    f_terms.push(p * ln_core + ln_wcore);
    mf_terms.push(p * ln_core + ln_wcore);
    for v in -(m as i32)..0 {
        mf_terms.push(p * (ln_i + v as f64 * lq) + log_sphere_mass(q, alpha, v)?);
    }
    // Spheres v < -m contribute a geometric series with ratio q^{-(p-1) theta}.
    let decay = (p - 1.0) * theta * lq;
    let first = p * (ln_i - (m as f64 + 1.0) * lq) + log_sphere_mass(q, alpha, -(m as i32) - 1)?;
    let ln_tail = first - (-(-decay).exp_m1()).ln();
    let ln_mf = log_sum_exp(&mf_terms);
    let tail = (ln_tail - ln_mf).exp();
    if tail > WINDOW_TOL {
        // tail(m') = tail(m) q^{-(m'-m)(p-1)theta}
        let extra = ((tail / WINDOW_TOL).ln() / decay).ceil() as u32;
        return Err(Error::Window {
            reason: format!(
                "window m = {m} leaves {tail:.3e} of the maximal-function mass outside"
            ),
            suggested_m: m + extra + 1,
        });
    }
    let ratio = ((ln_mf - log_sum_exp(&f_terms)) / p).exp();
    Ok(BuckleyRecord {
        p,
        theta,
        k,
        m,
        ap,
        ratio,
        paper_bound: buckley_constant(q, theta),
        tail,
    })
}

/// Smallest window m passing the tail tolerance.
pub fn auto_window(field: &LocalField, p: f64, theta: f64, k: u32) -> Result<u32> {
    match buckley_experiment(field, p, theta, k, 0) {
        Ok(_) => Ok(0),
        Err(Error::Window { suggested_m, .. }) => {
            let mut m = suggested_m;
            loop {
                match buckley_experiment(field, p, theta, k, m) {
                    Ok(_) => return Ok(m),
                    Err(Error::Window { suggested_m, .. }) => m = suggested_m.max(m + 1),
                    Err(e) => return Err(e),
                }
            }
        }
        Err(e) => Err(e),
    }
}

/// Depth at which the inner sphere sums of ||f||^p_{L^p(w)} are captured to `WINDOW_TOL`.
pub fn auto_depth(q: u32, theta: f64) -> u32 {
    // f^p w = |x|^{theta - 1}: sphere masses decay like q^{-v theta}.
    let lq = (q as f64).ln();
    ((WINDOW_TOL.recip().ln() / (theta * lq)).ceil() as u32).max(1)
}

#[derive(Debug, Clone)]
pub struct BuckleySweep {
    pub p: f64,
    pub records: Vec<BuckleyRecord>,
    /// Least-squares slope of ln(ratio) against ln(ap).
    pub slope: f64,
    pub target: f64,
}

/// Runs the experiment over `thetas`; k = None picks the depth per theta.
pub fn buckley_sweep(
    field: &LocalField,
    p: f64,
    thetas: &[f64],
    k: Option<u32>,
) -> Result<BuckleySweep> {
    if thetas.len() < 2 {
        return Err(Error::param("the sweep needs at least two theta values"));
    }
    let mut records = Vec::new();
    for &theta in thetas {
        let k = k.unwrap_or_else(|| auto_depth(field.q(), theta));
        let m = auto_window(field, p, theta, k)?;
        records.push(buckley_experiment(field, p, theta, k, m)?);
    }
    let xs: Vec<f64> = records.iter().map(|r| r.ap.ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.ratio.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(BuckleySweep {
        p,
        records,
        slope: sxy / sxx,
        target: 1.0 / (p - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Window;
    use crate::function::SampledFunction;

    #[test]
    fn maximal_of_indicator_of_d() {
        let f = LocalField::q_p(2).unwrap();
        let one = SampledFunction::constant(&f, 3, Complex64::new(1.0, 0.0)).unwrap();
        let mf = maximal(&one, 3).unwrap();
        let w = mf.window();
        for (i, v) in mf.values().iter().enumerate() {
            let expect = match w.cell_valuation(2, i) {
                Some(v) if v < 0 => 2f64.powi(v),
                _ => 1.0,
            };
            assert!((v.re - expect).abs() < 1e-15, "cell {i}");
        }
    }

    #[test]
    fn sharp_of_constant_vanishes() {
        let f = LocalField::laurent(3, 1).unwrap();
        let c = SampledFunction::constant(&f, 2, Complex64::new(2.5, -1.0)).unwrap();
        let s = sharp_maximal(&c, 0).unwrap();
        assert!(s.values().iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn radial_record_matches_tree_pass() {
        let field = LocalField::q_p(2).unwrap();
        let (p, theta, k, m) = (3.0, 0.5, 8, 12);
        let rec = buckley_experiment(&field, p, theta, k, m).unwrap();
        let f = power_function(&field, theta - 1.0, k).unwrap();
        let mf = maximal(&f, m).unwrap();
        let w = Window::new(-(m as i32), k as i32).unwrap();
        let alpha = (p - 1.0) * (1.0 - theta);
        let wv = crate::weights::power_cell_averages(2, alpha, w).unwrap();
        let wf = power_function(&field, alpha, k).unwrap();
        let num: f64 = mf.values().iter().zip(&wv).map(|(a, b)| a.re.powf(p) * b).sum::<f64>()
            * mf.cell_measure();
        let den = f.lp_norm(p, Some(&wf)).unwrap().powf(p);
        let direct = (num / den).powf(1.0 / p);
        assert!((direct - rec.ratio).abs() / rec.ratio < 1e-10, "{direct} {}", rec.ratio);
    }

    #[test]
    fn small_window_is_rejected_with_suggestion() {
        let f = LocalField::q_p(2).unwrap();
        match buckley_experiment(&f, 2.0, 0.1, 8, 1) {
            Err(Error::Window { suggested_m, .. }) => {
                assert!(buckley_experiment(&f, 2.0, 0.1, 8, suggested_m).is_ok());
            }
            other => panic!("{other:?}"),
        }
    }
}
