//! Periodization of a frequency profile, the A_2(D) test for Schauder bases of
//! integer translates, canonical duals and biorthogonality.

use num_complex::Complex64;

use crate::characters::CharacterSystem;
use crate::error::{Error, Result};
use crate::field::{LocalField, Window};
use crate::function::{positive_cells, SampledFunction};
use crate::kernels::{weighted_opnorm_l2, KernelOperator};
use crate::weights::{ap_characteristic, power_cell_averages, ApReport, Weight};

/// Largest share of |phi^|^2 allowed outside the declared window.
pub const TAIL_TOL: f64 = 1e-3;

/// Cell values of phi^ on the frequency window P^{-m} / P^k.
#[derive(Debug, Clone)]
pub struct PhiSpec {
    pub phi_hat: SampledFunction,
    /// Total of int |phi^|^2 over K when known; the window must carry all but the tail.
    pub declared_total: Option<f64>,
}

impl PhiSpec {
    pub fn new(phi_hat: SampledFunction, declared_total: Option<f64>) -> Result<Self> {
        let w = phi_hat.window();
        if w.low > 0 || w.high < 0 {
            return Err(Error::param("the frequency window must contain D"));
        }
        Ok(PhiSpec {
            phi_hat,
            declared_total,
        })
    }

    /// phi^ = 1_D.
    pub fn indicator_of_d(field: &LocalField, k: u32) -> Result<Self> {
        let f = SampledFunction::constant(field, k, Complex64::new(1.0, 0.0))?;
        Self::new(f, Some(1.0))
    }

    /// |phi^|^2 = |xi|^alpha 1_D, cell-averaged; phi^ is the nonnegative root.
    pub fn from_power_density(field: &LocalField, alpha: f64, k: u32) -> Result<Self> {
        let dens = power_cell_averages(field.q(), alpha, Window::on_d(k))?;
        let total = dens.iter().sum::<f64>() * (field.q() as f64).powi(-(k as i32));
        let f = SampledFunction::from_real(field, k, dens.iter().map(|v| v.sqrt()).collect())?;
        Self::new(f, Some(total))
    }

    pub fn field(&self) -> &LocalField {
        self.phi_hat.field()
    }

    pub fn level(&self) -> u32 {
        self.phi_hat.level()
    }

    /// int |phi^|^2 over the window.
    pub fn window_mass(&self) -> f64 {
        self.phi_hat.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * self.phi_hat.cell_measure()
    }
}

#[derive(Debug, Clone)]
pub struct Periodized {
    /// w_phi on D at the frequency resolution, flagged periodic.
    pub w: SampledFunction,
    pub tail: f64,
}

/// w_phi(xi) = sum_n |phi^(xi + u(n))|^2 over the translates inside the window.
pub fn periodize(spec: &PhiSpec) -> Result<Periodized> {
    let field = spec.field();
    if !field.is_positive_char() {
        return Err(Error::Unsupported(
            "periodization needs the translates u(n) to form a group; only F_q((X)) is supported"
                .into(),
        ));
    }
    let tail = match spec.declared_total {
        Some(t) => (t - spec.window_mass()).max(0.0),
        None => 0.0,
    };
    let win = spec.phi_hat.window();
    if tail > TAIL_TOL {
        return Err(Error::Window {
            reason: format!("the frequency window P^{} misses {tail:.3e} of |phi^|^2", win.low),
            suggested_m: (-win.low) as u32 + 1,
        });
    }
    // Digits below 0 enumerate the cosets u(n) + D, n < q^m, and are the fastest.
    let shift = (field.q() as usize).pow((-win.low) as u32);
    let k = win.high as u32;
    let vals = spec.phi_hat.values();
    let w: Vec<f64> = (0..field.cells(k)?)
        .map(|c| (0..shift).map(|a| vals[a + shift * c].norm_sqr()).sum())
        .collect();
    Ok(Periodized {
        w: SampledFunction::from_real(field, k, w)?.periodic()?,
        tail,
    })
}

/// [w]_{A_2(D)} over balls B inside D of levels 0..=k.
pub fn a2_check(field: &LocalField, w: &Weight, k: u32) -> Result<ApReport> {
    ap_characteristic(field, w, 2.0, k)
}

#[derive(Debug, Clone)]
pub struct DualReport {
    /// 1 / w_phi cellwise; None when a cell vanishes.
    pub m: Option<SampledFunction>,
    /// int_D 1/w_phi at the finest level (infinite if a cell vanishes).
    pub integral: f64,
    /// Ratio of the integral at level k to level k - 1.
    pub growth: f64,
    pub integrable: bool,
}

/// Reciprocal weight and its integrability; growth >= q^{1/2} per refinement fails.
pub fn canonical_dual(w_phi: &SampledFunction) -> Result<DualReport> {
    if !w_phi.is_on_d() {
        return Err(Error::domain("w_phi lives on D"));
    }
    if w_phi.values().iter().any(|v| v.re < 0.0 || v.im != 0.0) {
        return Err(Error::domain("w_phi must be nonnegative"));
    }
    if w_phi.values().iter().any(|v| v.re == 0.0) {
        return Ok(DualReport {
            m: None,
            integral: f64::INFINITY,
            growth: f64::INFINITY,
            integrable: false,
        });
    }
    let m = w_phi.map(|v| Complex64::new(1.0 / v.re, 0.0));
    let integral = m.integral().re;
    let k = w_phi.level();
    let growth = if k == 0 {
        1.0
    } else {
        let coarse = w_phi.coarsen(k - 1)?.map(|v| Complex64::new(1.0 / v.re, 0.0));
        integral / coarse.integral().re
    };
    let q = w_phi.field().q() as f64;
    Ok(DualReport {
        m: Some(m),
        integral,
        growth,
        integrable: integral.is_finite() && growth < q.sqrt(),
    })
}

/// max over k, l < n of |<chi_k, chi_l / w>_{L^2(D, w)} - delta_kl|.
pub fn biorthogonality_check(w_phi: &SampledFunction, n: usize, k: u32) -> Result<f64> {
    let field = w_phi.field();
    let size = field.cells(k)?;
    if n > size {
        return Err(Error::Resolution {
            what: format!("biorthogonality for {n} characters"),
            needed: crate::characters::level_for(field.q(), n - 1),
            have: k,
        });
    }
    let w = if w_phi.level() == k {
        w_phi.clone()
    } else if w_phi.level() > k {
        w_phi.coarsen(k)?
    } else {
        w_phi.lift(k)?
    };
    let wv = positive_cells(&w)?;
    let cs = CharacterSystem::new(field, k)?;
    let chis: Vec<Vec<Complex64>> = (0..n)
        .map(|m| (0..size).map(|c| cs.value(m, c)).collect())
        .collect::<Result<_>>()?;
    let scale = (field.q() as f64).powi(-(k as i32));
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let s: Complex64 = (0..size)
                .map(|c| chis[a][c] * (chis[b][c] / wv[c]).conj() * wv[c])
                .sum::<Complex64>()
                * scale;
            let d = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((s - d).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SchauderBasis,
    NotSchauder,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::SchauderBasis => "schauder_basis",
            Verdict::NotSchauder => "not_schauder",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Relative change allowed between the last two A_2 values.
pub const A2_STABLE: f64 = 0.05;
/// Bound on max/min over the upper half of a norm trace.
pub const TRACE_SPREAD: f64 = 2.0;
/// Per-level growth of sup_n ||S_n|| taken as divergence.
pub const TRACE_GROWTH: f64 = 0.20;

#[derive(Debug, Clone)]
pub struct LevelTrace {
    pub k: u32,
    pub a2: f64,
    /// ||S_n|| on L^2(D, w_phi) for n = 1..=min(N, q^k).
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SchauderReport {
    pub w_phi: SampledFunction,
    pub tail: f64,
    pub levels: Vec<LevelTrace>,
    pub dual: DualReport,
    pub a2_stable: bool,
    pub trace_bounded: bool,
    pub trace_diverges: bool,
    pub verdict: Verdict,
}

/// A_2 values, dual integrability and partial-sum norms across `k_list`, combined
/// by the fixed thresholds above.
pub fn schauder_verdict(spec: &PhiSpec, k_list: &[u32], n_max: usize) -> Result<SchauderReport> {
    if k_list.is_empty() || n_max == 0 {
        return Err(Error::param("need at least one level and N >= 1"));
    }
    let mut ks = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let top = *ks.last().expect("nonempty");
    if top > spec.level() {
        return Err(Error::Resolution {
            what: "phi^ for the requested levels".into(),
            needed: top,
            have: spec.level(),
        });
    }
    let per = periodize(spec)?;
    let field = spec.field().clone();
    let dual = canonical_dual(&per.w.coarsen(top)?)?;
    let levels = ks
        .iter()
        .map(|&k| {
            let wk = per.w.coarsen(k)?;
            let a2 = a2_check(&field, &Weight::Sampled(wk.clone()), k)?.value;
            let nn = n_max.min(field.cells(k)?);
            let norms = (1..=nn)
                .map(|n| Ok(weighted_opnorm_l2(&KernelOperator::s_n(&field, n, k)?, Some(&wk))?.norm))
                .collect::<Result<Vec<_>>>()?;
            Ok(LevelTrace { k, a2, norms })
        })
        .collect::<Result<Vec<_>>>()?;
    let a2_stable = match levels.len() {
        1 => levels[0].a2.is_finite(),
        n => {
            let (a, b) = (levels[n - 2].a2, levels[n - 1].a2);
            b.is_finite() && (b - a).abs() / a < A2_STABLE
        }
    };
    let last = &levels.last().expect("nonempty").norms;
    let upper = &last[last.len() / 2..];
    let hi = upper.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = upper.iter().copied().fold(f64::INFINITY, f64::min);
    let trace_bounded = hi.is_finite() && hi / lo < TRACE_SPREAD;
    let sups: Vec<f64> = levels
        .iter()
        .map(|l| l.norms.iter().copied().fold(0.0, f64::max))
        .collect();
    let trace_diverges =
        sups.len() >= 2 && sups.windows(2).all(|p| p[1] >= p[0] * (1.0 + TRACE_GROWTH));
    let verdict = if !dual.integrable || trace_diverges {
        Verdict::NotSchauder
    } else if a2_stable && trace_bounded {
        Verdict::SchauderBasis
    } else {
        Verdict::Inconclusive
    };
    Ok(SchauderReport {
        w_phi: per.w,
        tail: per.tail,
        levels,
        dual,
        a2_stable,
        trace_bounded,
        trace_diverges,
        verdict,
    })
}
