//! Step functions on D (and on bounded windows of K) constant on cosets of P^k.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ensure_same, CosetIndex, LocalElement, LocalField, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Supported on the window, zero outside.
    OnD,
    /// Extended periodically by the translates u(n) + D.
    Periodic,
}

/// Cell values of a function constant on cosets of P^high inside P^low.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    field: LocalField,
    window: Window,
    values: Vec<Complex64>,
    domain: Domain,
}

impl SampledFunction {
    /// A function on D at level k.
    pub fn new(field: &LocalField, k: u32, values: Vec<Complex64>) -> Result<Self> {
        Self::on_window(field, Window::on_d(k), values)
    }

    pub fn on_window(field: &LocalField, window: Window, values: Vec<Complex64>) -> Result<Self> {
        let n = field.cells(window.len())?;
        if values.len() != n {
            return Err(Error::param(format!(
                "expected q^{} = {n} cell values, got {}",
                window.len(),
                values.len()
            )));
        }
        Ok(SampledFunction {
            field: field.clone(),
            window,
            values,
            domain: Domain::OnD,
        })
    }

    pub fn from_real(field: &LocalField, k: u32, values: Vec<f64>) -> Result<Self> {
        Self::new(field, k, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(field: &LocalField, k: u32, c: Complex64) -> Result<Self> {
        Self::new(field, k, vec![c; field.cells(k)?])
    }

    pub fn zeros(field: &LocalField, k: u32) -> Result<Self> {
        Self::constant(field, k, Complex64::new(0.0, 0.0))
    }

    /// Samples `g` at the exact representative of every cell.
    pub fn from_fn(
        field: &LocalField,
        window: Window,
        g: impl Fn(&LocalElement) -> Complex64,
    ) -> Result<Self> {
        let n = field.cells(window.len())?;
        let values = (0..n)
            .map(|i| g(&LocalElement::from_cell(field, window, i)))
            .collect();
        Self::on_window(field, window, values)
    }

    /// The indicator of h + P^j sampled at level k.
    pub fn indicator(field: &LocalField, k: u32, h: &CosetIndex) -> Result<Self> {
        if h.level > k {
            return Err(Error::Resolution {
                what: format!("indicator of a coset of P^{}", h.level),
                needed: h.level,
                have: k,
            });
        }
        let modulus = (field.q() as usize).pow(h.level);
        let target = h.index(field.q());
        let n = field.cells(k)?;
        let values = (0..n)
            .map(|i| Complex64::new(if i % modulus == target { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Self::new(field, k, values)
    }

    /// The same data viewed as a Lambda-periodic function.
    pub fn periodic(mut self) -> Result<Self> {
        if self.window.low != 0 {
            return Err(Error::domain("periodic functions are stored on D"));
        }
        self.domain = Domain::Periodic;
        Ok(self)
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Resolution level k (cells are cosets of P^k).
    pub fn level(&self) -> u32 {
        self.window.high.max(0) as u32
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_on_d(&self) -> bool {
        self.window.low == 0
    }

    /// Haar measure of one cell, q^{-high}.
    pub fn cell_measure(&self) -> f64 {
        (self.field.q() as f64).powi(-self.window.high)
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        let mut out = Self::on_window(&self.field, self.window, values)?;
        out.domain = self.domain;
        Ok(out)
    }

    pub fn map(&self, g: impl Fn(Complex64) -> Complex64) -> Self {
        SampledFunction {
            values: self.values.iter().map(|&v| g(v)).collect(),
            ..self.clone()
        }
    }

    fn zip(&self, other: &Self, g: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(SampledFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| g(a, b))
                .collect(),
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub(crate) fn ensure_compatible(&self, other: &Self) -> Result<()> {
        ensure_same(&self.field, &other.field)?;
        if self.window != other.window {
            return Err(Error::Resolution {
                what: format!(
                    "window P^{}/P^{} vs P^{}/P^{}",
                    self.window.low, self.window.high, other.window.low, other.window.high
                ),
                needed: other.level(),
                have: self.level(),
            });
        }
        Ok(())
    }

    /// Refines to level k >= current level; each value is replicated q^(k - level) times.
    pub fn lift(&self, k: u32) -> Result<Self> {
        let high = k as i32;
        if high < self.window.high {
            return Err(Error::param(format!(
                "cannot lift from level {} down to {k}",
                self.window.high
            )));
        }
        let window = Window::new(self.window.low, high)?;
        let n = self.field.cells(window.len())?;
        let m = self.values.len();
        let values = (0..n).map(|i| self.values[i % m]).collect();
        let mut out = Self::on_window(&self.field, window, values)?;
        out.domain = self.domain;
        Ok(out)
    }

    /// Averages down to level k <= current level.
    pub fn coarsen(&self, k: u32) -> Result<Self> {
        let high = k as i32;
        if high > self.window.high || high < self.window.low {
            return Err(Error::param(format!(
                "cannot coarsen level {} to {k}",
                self.window.high
            )));
        }
        let window = Window::new(self.window.low, high)?;
        let n = self.field.cells(window.len())?;
        let per = self.values.len() / n;
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        for (i, v) in self.values.iter().enumerate() {
            values[i % n] += v;
        }
        for v in &mut values {
            *v /= per as f64;
        }
        let mut out = Self::on_window(&self.field, window, values)?;
        out.domain = self.domain;
        Ok(out)
    }

    /// Extends a function on D by zero to the window P^low (low <= 0).
    pub fn extend_to(&self, low: i32) -> Result<Self> {
        if low > self.window.low {
            return Err(Error::param("extension must enlarge the window"));
        }
        let window = Window::new(low, self.window.high)?;
        let n = self.field.cells(window.len())?;
        let shift = (self.field.q() as usize).pow((self.window.low - low) as u32);
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        for (i, &v) in self.values.iter().enumerate() {
            values[i * shift] = v;
        }
        Self::on_window(&self.field, window, values)
    }

    /// Restricts a window function to D.
    pub fn restrict_to_d(&self) -> Result<Self> {
        if self.window.low > 0 || self.window.high < 0 {
            return Err(Error::domain("window does not contain D"));
        }
        let shift = (self.field.q() as usize).pow((-self.window.low) as u32);
        let values = (0..self.values.len() / shift)
            .map(|i| self.values[i * shift])
            .collect();
        Self::new(&self.field, self.window.high as u32, values)
    }

    /// Integral against Haar measure.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.cell_measure()
    }

    /// (int |f|^p w)^{1/p} over the window.
    pub fn lp_norm(&self, p: f64, w: Option<&SampledFunction>) -> Result<f64> {
        if p < 1.0 || !p.is_finite() {
            return Err(Error::param(format!("L^p norm needs p >= 1, got {p}")));
        }
        let weights = match w {
            Some(w) => {
                self.ensure_compatible(w)?;
                Some(positive_cells(w)?)
            }
            None => None,
        };
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let a = if p == 2.0 { v.norm_sqr() } else { v.norm().powf(p) };
            acc += a * weights.as_ref().map_or(1.0, |w| w[i]);
        }
        Ok((acc * self.cell_measure()).powf(1.0 / p))
    }

    /// <f, g> = int f conj(g) w.
    pub fn inner(&self, other: &Self, w: Option<&SampledFunction>) -> Result<Complex64> {
        self.ensure_compatible(other)?;
        let weights = match w {
            Some(w) => {
                self.ensure_compatible(w)?;
                Some(positive_cells(w)?)
            }
            None => None,
        };
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| a * b.conj() * weights.as_ref().map_or(1.0, |w| w[i]))
            .sum();
        Ok(s * self.cell_measure())
    }

    /// Translation (tau_h f)(x) = f(x - h) inside the window group.
    pub fn translate(&self, h: &LocalElement) -> Result<Self> {
        ensure_same(&self.field, h.field())?;
        let h_idx = match self.domain {
            Domain::Periodic => periodic_index(h, self.window)?,
            Domain::OnD => h.cell_index(self.window)?,
        };
        let n = self.values.len();
        let values = (0..n)
            .map(|i| self.values[self.field.cell_sub(self.window, i, h_idx)])
            .collect();
        Ok(SampledFunction {
            values,
            ..self.clone()
        })
    }

    /// Value at a field element; zero outside the window unless periodic.
    pub fn evaluate(&self, x: &LocalElement) -> Result<Complex64> {
        ensure_same(&self.field, x.field())?;
        let idx = match self.domain {
            Domain::Periodic => periodic_index(x, self.window)?,
            Domain::OnD => {
                if x.valuation().is_some_and(|v| v < self.window.low) {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                x.cell_index(self.window)?
            }
        };
        Ok(self.values[idx])
    }
}

/// Cell index of x modulo the lattice: digits at negative positions are dropped.
fn periodic_index(x: &LocalElement, window: Window) -> Result<usize> {
    let q = x.field().q() as usize;
    let mut idx = 0usize;
    for pos in (window.low..window.high).rev() {
        idx = idx * q + x.digit(pos)?.0 as usize;
    }
    Ok(idx)
}

/// Real parts of a weight, rejecting nonpositive or complex cells.
pub fn positive_cells(w: &SampledFunction) -> Result<Vec<f64>> {
    w.values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v.re > 0.0 && v.im == 0.0 && v.re.is_finite() {
                Ok(v.re)
            } else {
                Err(Error::domain(format!("weight cell {i} is not positive: {v}")))
            }
        })
        .collect()
}

/// Whether g is constant on x + P^{v+1} for every cell x of valuation v.
///
/// Values are compared with relative tolerance `tol`; the core cell is exempt.
pub fn sphere_constant(g: &SampledFunction, tol: f64) -> bool {
    let q = g.field.q() as usize;
    let w = g.window;
    let scale = g.values.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(1.0);
    let mut seen: std::collections::HashMap<(i32, usize), Complex64> = Default::default();
    for (i, &v) in g.values.iter().enumerate() {
        let Some(val) = w.cell_valuation(q, i) else {
            continue;
        };
        let lead = (i / q.pow((val - w.low) as u32)) % q;
        match seen.get(&(val, lead)) {
            Some(&u) if (u - v).norm() > tol * scale => return false,
            Some(_) => {}
            None => {
                seen.insert((val, lead), v);
            }
        }
    }
    true
}
