//! Weights on D: power weights |x|^alpha in closed form and sampled cell weights.

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{Ball, LocalField, Window};
use crate::function::{positive_cells, SampledFunction};

#[derive(Debug, Clone)]
pub enum Weight {
    /// |x|^alpha, alpha > -1.
    Power { alpha: f64 },
    /// Positive cell values on D.
    Sampled(SampledFunction),
}

impl Weight {
    pub fn power(alpha: f64) -> Self {
        Weight::Power { alpha }
    }

    pub fn unit(field: &LocalField) -> Result<Self> {
        Ok(Weight::Sampled(SampledFunction::constant(
            field,
            0,
            Complex64::new(1.0, 0.0),
        )?))
    }

    /// Cell averages on D / P^k.
    pub fn cell_values(&self, field: &LocalField, k: u32) -> Result<Vec<f64>> {
        match self {
            Weight::Power { alpha } => power_cell_averages(field.q(), *alpha, Window::on_d(k)),
            Weight::Sampled(w) => {
                let w = if w.level() < k { w.lift(k)? } else { w.coarsen(k)? };
                positive_cells(&w)
            }
        }
    }

    pub fn sampled(&self, field: &LocalField, k: u32) -> Result<SampledFunction> {
        let v = self.cell_values(field, k)?;
        SampledFunction::from_real(field, k, v)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha <= -1.0 {
        Err(Error::NonIntegrable { alpha })
    } else {
        Ok(())
    }
}

/// w(P^j) = int_{P^j} |x|^alpha dx = (q-1) q^{alpha - j(alpha+1)} / (q^{alpha+1} - 1).
pub fn power_mass_at_origin(q: u32, alpha: f64, j: i32) -> Result<f64> {
    check_alpha(alpha)?;
    let q = q as f64;
    if alpha == 0.0 {
        return Ok(q.powi(-j));
    }
    Ok((q - 1.0) * q.powf(alpha - j as f64 * (alpha + 1.0)) / (q.powf(alpha + 1.0) - 1.0))
}

/// Natural log of w(P^j), stable for large |j|.
pub fn log_power_mass_at_origin(q: u32, alpha: f64, j: i32) -> Result<f64> {
    check_alpha(alpha)?;
    let lq = (q as f64).ln();
    if alpha == 0.0 {
        return Ok(-(j as f64) * lq);
    }
    Ok(((q - 1) as f64).ln() + (alpha - j as f64 * (alpha + 1.0)) * lq
        - ((alpha + 1.0) * lq).exp_m1().ln())
}

/// Mass of a ball of level j whose centre has valuation `center` (None: contains 0).
pub fn power_mass(q: u32, alpha: f64, j: i32, center: Option<i32>) -> Result<f64> {
    check_alpha(alpha)?;
    match center {
        None => power_mass_at_origin(q, alpha, j),
        Some(v) => Ok((q as f64).powf(-(v as f64) * alpha) * (q as f64).powi(-j)),
    }
}

/// Closed-form w(B) for w = |x|^alpha.
pub fn power_weight_ball_mass(alpha: f64, ball: &Ball) -> Result<f64> {
    power_mass(ball.q, alpha, ball.level, ball.center_valuation())
}

/// Exact w(B) for an integer exponent alpha >= 0.
pub fn power_weight_ball_mass_exact(alpha: u32, ball: &Ball) -> Result<Ratio<i128>> {
    let q = ball.q as i128;
    let pow = |e: i64| -> Ratio<i128> {
        if e >= 0 {
            Ratio::from_integer(q.pow(e as u32))
        } else {
            Ratio::new(1, q.pow((-e) as u32))
        }
    };
    let a = alpha as i64;
    let j = ball.level as i64;
    Ok(match ball.center_valuation() {
        None => Ratio::from_integer(q - 1) * pow(a - j * (a + 1)) / (q.pow(alpha + 1) - 1),
        Some(v) => pow(-(v as i64) * a) * pow(-j),
    })
}

/// Cell averages of |x|^alpha on a window: |x|^alpha off the core, w(P^high)/|P^high| on it.
pub fn power_cell_averages(q: u32, alpha: f64, window: Window) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let n = (q as usize)
        .checked_pow(window.len())
        .ok_or_else(|| Error::param("window too large"))?;
    let core = power_mass_at_origin(q, alpha, window.high)? * (q as f64).powi(window.high);
    Ok((0..n)
        .map(|i| match window.cell_valuation(q as usize, i) {
            None => core,
            Some(v) => (q as f64).powf(-(v as f64) * alpha),
        })
        .collect())
}

/// Exact cell averages of |x|^alpha on D / P^k for integer alpha >= 0.
pub fn power_cell_averages_exact(q: u32, alpha: u32, k: u32) -> Result<Vec<Ratio<i128>>> {
    let n = (q as usize).pow(k);
    let cell = Ratio::from_integer((q as i128).pow(k));
    (0..n)
        .map(|i| {
            let b = Ball::containing_cell(q, k, i);
            Ok(power_weight_ball_mass_exact(alpha, &b)? * cell)
        })
        .collect()
}

/// |x|^alpha cell-averaged on D / P^k as a function.
pub fn power_function(field: &LocalField, alpha: f64, k: u32) -> Result<SampledFunction> {
    SampledFunction::from_real(field, k, power_cell_averages(field.q(), alpha, Window::on_d(k))?)
}

/// Closed-form [|x|^alpha]_{A_p} = max(1, (q-1)^p (q^{a+1}-1)^{-1} (q^{1-a/(p-1)}-1)^{1-p}).
pub fn power_ap_closed_form(q: u32, alpha: f64, p: f64) -> f64 {
    if alpha <= -1.0 || alpha >= p - 1.0 {
        return f64::INFINITY;
    }
    let q = q as f64;
    let v = (q - 1.0).powf(p)
        / (q.powf(alpha + 1.0) - 1.0)
        / (q.powf(1.0 - alpha / (p - 1.0)) - 1.0).powf(p - 1.0);
    if alpha == 0.0 {
        1.0
    } else {
        v.max(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct ApReport {
    pub p: f64,
    pub value: f64,
    /// Coarsest ball attaining the maximum.
    pub witness: Ball,
    pub level: u32,
}

fn ensure_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("A_p needs 1 < p < infinity, got {p}")))
    }
}

/// Maximum over balls B in D of levels 0..=k of (avg_B w)(avg_B w^{-1/(p-1)})^{p-1}.
pub fn ap_characteristic(field: &LocalField, w: &Weight, p: f64, k: u32) -> Result<ApReport> {
    ensure_p(p)?;
    let q = field.q();
    match w {
        Weight::Power { alpha } => {
            check_alpha(*alpha)?;
            let beta = -alpha / (p - 1.0);
            let mut best = 1.0;
            let mut witness = Ball::ideal(q, 0, 0)?;
            // Off-origin balls sit inside one sphere where w is constant: the product is 1.
            // Balls P^j through the origin all give the same value.
            for j in 0..=k as i32 {
                let v = if beta <= -1.0 {
                    f64::INFINITY
                } else {
                    let aw = power_mass_at_origin(q, *alpha, j)?;
                    let asig = power_mass_at_origin(q, beta, j)?;
                    let m = (q as f64).powi(-j);
                    (aw / m) * (asig / m).powf(p - 1.0)
                };
                if v > best * (1.0 + 1e-12) {
                    best = v;
                    witness = Ball::ideal(q, 0, j)?;
                }
            }
            Ok(ApReport {
                p,
                value: best,
                witness,
                level: k,
            })
        }
        Weight::Sampled(s) => {
            let vals = positive_cells(s)?;
            sampled_ap(q, &vals, s.level(), p, k)
        }
    }
}

/// Bottom-up block sums: `out[d][r]` is the sum over cells i with i mod q^d == r.
pub(crate) fn level_sums(q: usize, vals: &[f64], levels: u32) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(); levels as usize + 1];
    out[levels as usize] = vals.to_vec();
    for d in (0..levels as usize).rev() {
        let n = q.pow(d as u32);
        let fine = &out[d + 1];
        let mut s = vec![0.0; n];
        for (i, v) in fine.iter().enumerate() {
            s[i % n] += v;
        }
        out[d] = s;
    }
    out
}

fn sampled_ap(q: u32, vals: &[f64], level: u32, p: f64, k: u32) -> Result<ApReport> {
    let qs = q as usize;
    let sig: Vec<f64> = vals.iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let sw = level_sums(qs, vals, level);
    let ss = level_sums(qs, &sig, level);
    let mut best = f64::NEG_INFINITY;
    let mut witness = Ball::ideal(q, 0, 0)?;
    for j in 0..=k.min(level) {
        let cells = qs.pow(level - j) as f64;
        for (r, (a, b)) in sw[j as usize].iter().zip(&ss[j as usize]).enumerate() {
            let v = (a / cells) * (b / cells).powf(p - 1.0);
            if v > best * (1.0 + 1e-12) || best == f64::NEG_INFINITY {
                best = v;
                witness = Ball::new(q, 0, j as i32, r)?;
            }
        }
    }
    Ok(ApReport {
        p,
        value: best.max(1.0),
        witness,
        level: k,
    })
}

/// Exact [w]_{A_2} over balls of levels 0..=level for rational cell weights.
pub fn a2_exact(q: u32, vals: &[Ratio<i128>], level: u32) -> Result<(Ratio<i128>, Ball)> {
    if vals.iter().any(|v| *v <= Ratio::from_integer(0)) {
        return Err(Error::domain("weight cell is not positive"));
    }
    let qs = q as usize;
    let mut best = Ratio::from_integer(0);
    let mut witness = Ball::ideal(q, 0, 0)?;
    for j in 0..=level {
        let n = qs.pow(j);
        let mut sw = vec![Ratio::from_integer(0); n];
        let mut sr = vec![Ratio::from_integer(0); n];
        for (i, v) in vals.iter().enumerate() {
            sw[i % n] += v;
            sr[i % n] += v.recip();
        }
        let cells = Ratio::from_integer(qs.pow(level - j) as i128);
        for r in 0..n {
            let v = (sw[r] / cells) * (sr[r] / cells);
            if v > best {
                best = v;
                witness = Ball::new(q, 0, j as i32, r)?;
            }
        }
    }
    Ok((best, witness))
}

#[derive(Debug, Clone)]
pub struct DoublingReport {
    pub max: f64,
    /// Distinct parent/child mass ratios, ascending.
    pub ratios: Vec<f64>,
}

/// Max over cells and levels 1..=k of w(x + P^{j-1}) / w(x + P^j).
pub fn doubling_ratio(field: &LocalField, w: &Weight, k: u32) -> Result<DoublingReport> {
    let q = field.q();
    let mut ratios = Vec::new();
    match w {
        Weight::Power { alpha } => {
            for j in 1..=k as i32 {
                // child through the origin, child on the sphere of valuation j-1, deeper off-origin
                ratios.push(power_mass(q, *alpha, j - 1, None)? / power_mass(q, *alpha, j, None)?);
                ratios.push(
                    power_mass(q, *alpha, j - 1, None)? / power_mass(q, *alpha, j, Some(j - 1))?,
                );
                for v in 0..j - 1 {
                    ratios.push(
                        power_mass(q, *alpha, j - 1, Some(v))? / power_mass(q, *alpha, j, Some(v))?,
                    );
                }
            }
        }
        Weight::Sampled(s) => {
            let vals = positive_cells(s)?;
            let sums = level_sums(q as usize, &vals, s.level());
            for j in 1..=k.min(s.level()) as usize {
                for (r, child) in sums[j].iter().enumerate() {
                    let parent = sums[j - 1][r % sums[j - 1].len()];
                    ratios.push(parent / child);
                }
            }
        }
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    ratios.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let max = ratios.last().copied().unwrap_or(1.0);
    Ok(DoublingReport { max, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_of_d_for_alpha_one_is_two_thirds() {
        let d = Ball::ideal(2, 0, 0).unwrap();
        assert_eq!(power_weight_ball_mass_exact(1, &d).unwrap(), Ratio::new(2, 3));
        assert!((power_weight_ball_mass(1.0, &d).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mass_q3_alpha1_p1() {
        let b = Ball::ideal(3, 0, 1).unwrap();
        assert_eq!(power_weight_ball_mass_exact(1, &b).unwrap(), Ratio::new(1, 12));
    }

    #[test]
    fn alpha_zero_gives_haar() {
        for j in -2..4 {
            let b = Ball::ideal(3, -2, j).unwrap();
            let h = crate::field::haar_measure(&b);
            let h = *h.numer() as f64 / *h.denom() as f64;
            assert!((power_weight_ball_mass(0.0, &b).unwrap() - h).abs() < 1e-15);
        }
    }

    #[test]
    fn nonintegrable_rejected() {
        let b = Ball::ideal(2, 0, 0).unwrap();
        assert!(matches!(
            power_weight_ball_mass(-1.0, &b),
            Err(Error::NonIntegrable { .. })
        ));
    }

    #[test]
    fn unit_weight_is_a1() {
        let f = LocalField::q_p(3).unwrap();
        let w = Weight::Sampled(SampledFunction::constant(&f, 3, Complex64::new(2.0, 0.0)).unwrap());
        assert_eq!(ap_characteristic(&f, &w, 2.0, 3).unwrap().value, 1.0);
        let d = doubling_ratio(&f, &w, 3).unwrap();
        assert!((d.max - 3.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_q2_alpha1() {
        let f = LocalField::q_p(2).unwrap();
        let d = doubling_ratio(&f, &Weight::power(1.0), 4).unwrap();
        let expect = [4.0 / 3.0, 2.0, 4.0];
        assert_eq!(d.ratios.len(), 3);
        for (a, b) in d.ratios.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((d.max - 4.0).abs() < 1e-12);
    }

    #[test]
    fn power_ap_matches_closed_form() {
        for q in [2, 3] {
            let f = LocalField::q_p(q).unwrap();
            for alpha in [-0.5, 0.25, 0.5] {
                let r = ap_characteristic(&f, &Weight::power(alpha), 2.0, 6).unwrap();
                let c = power_ap_closed_form(q, alpha, 2.0);
                assert!((r.value - c).abs() <= 1e-12 * c);
                assert_eq!(r.witness.level, 0);
            }
        }
    }
}
