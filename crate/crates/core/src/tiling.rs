//! Finite checkers for tilings Omega + T and for exponential bases on Omega.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::bank::random_function;
use crate::error::{Error, Result};
use crate::field::{Ball, LocalElement, LocalField, Window};

/// Omega as a union of balls of the window group, translations and a spectrum candidate.
#[derive(Debug, Clone)]
pub struct TilingSpec {
    pub field: LocalField,
    pub window: Window,
    /// Balls with `ambient == window.low`.
    pub omega: Vec<Ball>,
    pub translations: Vec<LocalElement>,
    pub spectrum: Vec<LocalElement>,
}

impl TilingSpec {
    pub fn new(
        field: &LocalField,
        window: Window,
        omega: Vec<Ball>,
        translations: Vec<LocalElement>,
        spectrum: Vec<LocalElement>,
    ) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::param("Omega must contain at least one ball"));
        }
        for b in &omega {
            if b.ambient != window.low || b.q != field.q() {
                return Err(Error::param("Omega balls must live in the window group"));
            }
        }
        Ok(TilingSpec {
            field: field.clone(),
            window,
            omega,
            translations,
            spectrum,
        })
    }

    /// Omega = D, T = {u(n) : u(n) in the window}, Gamma = {u(n) : n < q^k}.
    pub fn standard(field: &LocalField, m: u32, k: u32) -> Result<Self> {
        let window = Window::new(-(m as i32), k as i32)?;
        let q = field.q() as u64;
        let omega = vec![Ball::ideal(field.q(), window.low, 0)?];
        let translations = (0..q.pow(m)).map(|n| crate::field::u_of(field, n)).collect();
        let spectrum = (0..q.pow(k)).map(|n| crate::field::u_of(field, n)).collect();
        Self::new(field, window, omega, translations, spectrum)
    }

    fn resolution(&self, k: u32) -> Result<Window> {
        let w = Window::new(self.window.low, k as i32)?;
        if let Some(b) = self.omega.iter().find(|b| b.level > k as i32) {
            return Err(Error::Resolution {
                what: format!("a ball of level {} in Omega", b.level),
                needed: b.level.max(0) as u32,
                have: k,
            });
        }
        Ok(w)
    }

    /// Indicator of Omega on the cells of P^low / P^k.
    pub fn omega_cells(&self, k: u32) -> Result<Vec<bool>> {
        let w = self.resolution(k)?;
        let n = self.field.cells(w.len())?;
        Ok((0..n)
            .map(|c| self.omega.iter().any(|b| b.contains_cell(k as i32, c)))
            .collect())
    }
}

#[derive(Debug, Clone)]
pub struct TilingReport {
    pub tiles: bool,
    /// Number of translates covering each cell.
    pub coverage: Vec<u32>,
    /// coverage value -> number of cells.
    pub histogram: BTreeMap<u32, usize>,
    /// First cell not covered exactly once, with its count.
    pub first_defect: Option<(usize, u32)>,
}

/// Whether the translates Omega + t, t in T, cover each cell of the window exactly once.
pub fn tiling_check(spec: &TilingSpec, k: u32) -> Result<TilingReport> {
    let w = spec.resolution(k)?;
    let cells = spec.omega_cells(k)?;
    let mut coverage = vec![0u32; cells.len()];
    for t in &spec.translations {
        let ti = t.cell_index(w)?;
        for (c, inside) in cells.iter().enumerate() {
            if *inside {
                coverage[spec.field.cell_add(w, c, ti)] += 1;
            }
        }
    }
    let mut histogram = BTreeMap::new();
    for &v in &coverage {
        *histogram.entry(v).or_insert(0) += 1;
    }
    let first_defect = coverage
        .iter()
        .enumerate()
        .find(|(_, v)| **v != 1)
        .map(|(c, v)| (c, *v));
    Ok(TilingReport {
        tiles: first_defect.is_none(),
        coverage,
        histogram,
        first_defect,
    })
}

fn omega_points(spec: &TilingSpec, k: u32) -> Result<(Window, Vec<LocalElement>)> {
    let w = spec.resolution(k)?;
    let pts = spec
        .omega_cells(k)?
        .iter()
        .enumerate()
        .filter(|(_, b)| **b)
        .map(|(c, _)| LocalElement::from_cell(&spec.field, w, c))
        .collect();
    Ok((w, pts))
}

/// e_gamma(x) = chi(gamma x) on the cells of Omega.
fn exponentials(spec: &TilingSpec, pts: &[LocalElement]) -> Result<Vec<Vec<Complex64>>> {
    spec.spectrum
        .iter()
        .map(|g| pts.iter().map(|x| g.mul(x)?.chi()).collect())
        .collect()
}

/// max over gamma, gamma' of |<e_gamma, e_gamma'>_{L^2(Omega)} / |Omega| - delta|.
pub fn spectral_gram(spec: &TilingSpec, k: u32) -> Result<f64> {
    let (_, pts) = omega_points(spec, k)?;
    let e = exponentials(spec, &pts)?;
    let count = pts.len() as f64;
    let mut worst = 0.0f64;
    for (a, ea) in e.iter().enumerate() {
        for (b, eb) in e.iter().enumerate() {
            let s: Complex64 = ea.iter().zip(eb).map(|(x, y)| x * y.conj()).sum::<Complex64>() / count;
            let d = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((s - d).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralReport {
    pub gram: f64,
    /// Number of level-k cells in Omega.
    pub dimension: usize,
    pub spectrum_size: usize,
    /// max over the bank of |sum_gamma |<f, e_gamma>|^2 - ||f||^2| / ||f||^2.
    pub parseval: f64,
    pub certified: bool,
}

/// Gram, dimension count and Parseval on `bank` seeded functions; tolerance 1e-9.
pub fn spectral_certify(spec: &TilingSpec, k: u32, bank: usize, seed: u64) -> Result<SpectralReport> {
    let gram = spectral_gram(spec, k)?;
    let (_, pts) = omega_points(spec, k)?;
    let e = exponentials(spec, &pts)?;
    let dim = pts.len();
    let mut parseval = 0.0f64;
    for i in 0..bank {
        let len = spec.resolution(k)?.len();
        let f = random_function(&spec.field, len, seed.wrapping_add(i as u64))?.into_values();
        let fv: Vec<Complex64> = spec
            .omega_cells(k)?
            .iter()
            .zip(&f)
            .filter(|(b, _)| **b)
            .map(|(_, v)| *v)
            .collect();
        // Normalized counting measure on Omega: e_gamma has unit norm.
        let norm2 = fv.iter().map(|v| v.norm_sqr()).sum::<f64>() / dim as f64;
        let coeff2: f64 = e
            .iter()
            .map(|eg| {
                (fv.iter().zip(eg).map(|(x, y)| x * y.conj()).sum::<Complex64>() / dim as f64)
                    .norm_sqr()
            })
            .sum();
        if norm2 > 0.0 {
            parseval = parseval.max((coeff2 - norm2).abs() / norm2);
        }
    }
    Ok(SpectralReport {
        gram,
        dimension: dim,
        spectrum_size: spec.spectrum.len(),
        parseval,
        certified: gram <= 1e-9 && spec.spectrum.len() >= dim && parseval <= 1e-9,
    })
}

/// Omega with one level-k cell `from` replaced by `to` (both in the window group).
pub fn move_cell(spec: &TilingSpec, k: u32, from: usize, to: usize) -> Result<TilingSpec> {
    let w = spec.resolution(k)?;
    let cells = spec.omega_cells(k)?;
    if from >= cells.len() || to >= cells.len() || !cells[from] || cells[to] {
        return Err(Error::param("move needs a cell of Omega and a cell outside it"));
    }
    let q = spec.field.q();
    let omega = cells
        .iter()
        .enumerate()
        .filter(|(c, b)| **b && *c != from)
        .map(|(c, _)| c)
        .chain(std::iter::once(to))
        .map(|c| Ball::new(q, w.low, w.high, c))
        .collect::<Result<Vec<_>>>()?;
    TilingSpec::new(
        &spec.field,
        spec.window,
        omega,
        spec.translations.clone(),
        spec.spectrum.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_tiles_and_is_spectral() {
        for f in [LocalField::q_p(2).unwrap(), LocalField::laurent(3, 1).unwrap()] {
            let s = TilingSpec::standard(&f, 2, 3).unwrap();
            let r = tiling_check(&s, 3).unwrap();
            assert!(r.tiles, "{f}");
            assert_eq!(r.histogram.len(), 1);
            let c = spectral_certify(&s, 3, 5, 1).unwrap();
            assert!(c.certified, "{f} {c:?}");
        }
    }

    #[test]
    fn gram_is_exactly_zero_for_q2() {
        let f = LocalField::laurent(2, 1).unwrap();
        assert_eq!(spectral_gram(&TilingSpec::standard(&f, 1, 4).unwrap(), 4).unwrap(), 0.0);
        let f = LocalField::q_p(2).unwrap();
        assert!(spectral_gram(&TilingSpec::standard(&f, 1, 4).unwrap(), 4).unwrap() < 1e-12);
    }

    #[test]
    fn moved_cell_breaks_tiling() {
        let f = LocalField::q_p(2).unwrap();
        let s = TilingSpec::standard(&f, 1, 3).unwrap();
        // cells of D have even index in P^{-1}/P^3; 3 lies in u(1) + D
        let m = move_cell(&s, 3, 2, 3).unwrap();
        let r = tiling_check(&m, 3).unwrap();
        assert!(!r.tiles);
        assert!(r.histogram.contains_key(&2));
    }

    #[test]
    fn half_translate_leaves_d() {
        // P^1 + {0, 1} covers D; with 1/2 the second translate sits outside D.
        let f = LocalField::q_p(2).unwrap();
        let w = Window::on_d(2);
        let omega = vec![Ball::ideal(2, 0, 1).unwrap()];
        let one = LocalElement::one(&f);
        let good = TilingSpec::new(&f, w, omega.clone(), vec![LocalElement::zero(&f), one], vec![]).unwrap();
        assert!(tiling_check(&good, 2).unwrap().tiles);
        let half = crate::field::u_of(&f, 1);
        let bad = TilingSpec::new(&f, w, omega, vec![LocalElement::zero(&f), half], vec![]).unwrap();
        assert!(tiling_check(&bad, 2).is_err());
    }
}
