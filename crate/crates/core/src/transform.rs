//! Fourier coefficients of step functions on D.
//!
//! f^(n) = q^{-k} sum_x f(x) conj(chi_n(x)) for n < q^k. Positive characteristic
//! factors into k stages of q-point transforms (D/P^k = F_q^k); Q_p uses a
//! radix-p FFT of length p^k read in digit-reversed order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::characters::{digit_reverse, CharacterSystem};
use crate::error::{Error, Result};
use crate::field::{root_of_unity, FqElem, LocalElement, LocalField, Window};
use crate::function::{sphere_constant, SampledFunction};

#[derive(Debug, Clone)]
pub struct FourierCoeffs {
    pub field: LocalField,
    pub level: u32,
    /// Coefficient of chi_n at position n.
    pub coeffs: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn new(field: &LocalField, level: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != field.cells(level)? {
            return Err(Error::param("coefficient vector must have q^k entries"));
        }
        Ok(FourierCoeffs {
            field: field.clone(),
            level,
            coeffs,
        })
    }

    /// The coefficient at n, zero beyond the resolution.
    pub fn get(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }
}

fn on_d(f: &SampledFunction) -> Result<u32> {
    if !f.is_on_d() {
        return Err(Error::domain("Fourier coefficients are taken over D"));
    }
    Ok(f.level())
}

pub fn fourier(f: &SampledFunction) -> Result<FourierCoeffs> {
    let k = on_d(f)?;
    let mut a = f.values().to_vec();
    forward_in_place(f.field(), k, &mut a);
    FourierCoeffs::new(f.field(), k, a)
}

pub fn inverse_fourier(c: &FourierCoeffs) -> Result<SampledFunction> {
    let mut a = c.coeffs.clone();
    inverse_in_place(&c.field, c.level, &mut a);
    SampledFunction::new(&c.field, c.level, a)
}

/// Transforms a batch in parallel; output order follows input order.
pub fn fourier_batch(fs: &[SampledFunction]) -> Result<Vec<FourierCoeffs>> {
    fs.par_iter().map(fourier).collect()
}

/// O(q^{2k}) transform against a character table built through field arithmetic.
pub fn fourier_naive(f: &SampledFunction, table: &[Complex64]) -> Result<FourierCoeffs> {
    let k = on_d(f)?;
    let n = f.len();
    if table.len() != n * n {
        return Err(Error::param("character table has the wrong size"));
    }
    let scale = f.cell_measure();
    let coeffs = (0..n)
        .into_par_iter()
        .map(|m| {
            let row = &table[m * n..(m + 1) * n];
            row.iter()
                .zip(f.values())
                .map(|(chi, v)| v * chi.conj())
                .sum::<Complex64>()
                * scale
        })
        .collect();
    FourierCoeffs::new(f.field(), k, coeffs)
}

pub fn inverse_fourier_naive(c: &FourierCoeffs, table: &[Complex64]) -> Result<SampledFunction> {
    let n = c.coeffs.len();
    if table.len() != n * n {
        return Err(Error::param("character table has the wrong size"));
    }
    let values = (0..n)
        .into_par_iter()
        .map(|j| (0..n).map(|m| c.coeffs[m] * table[m * n + j]).sum())
        .collect();
    SampledFunction::new(&c.field, c.level, values)
}

pub(crate) fn forward_in_place(field: &LocalField, k: u32, a: &mut [Complex64]) {
    if field.is_positive_char() {
        tensor_stages(field, k, a, true);
    } else {
        let p = field.p() as usize;
        radix_p_fft(a, p, k, -1.0);
        let n = a.len();
        let inv = 1.0 / n as f64;
        let b: Vec<Complex64> = (0..n).map(|m| a[digit_reverse(m, p, k)] * inv).collect();
        a.copy_from_slice(&b);
    }
}

pub(crate) fn inverse_in_place(field: &LocalField, k: u32, a: &mut [Complex64]) {
    if field.is_positive_char() {
        tensor_stages(field, k, a, false);
    } else {
        let p = field.p() as usize;
        let n = a.len();
        let b: Vec<Complex64> = (0..n).map(|m| a[digit_reverse(m, p, k)]).collect();
        a.copy_from_slice(&b);
        radix_p_fft(a, p, k, 1.0);
    }
}

/// k stages of the q-point matrix omega_p^{tr(b d)} along each digit.
fn tensor_stages(field: &LocalField, k: u32, a: &mut [Complex64], forward: bool) {
    let q = field.q() as usize;
    let p = field.p();
    let fq = field.fq();
    let mat: Vec<Complex64> = (0..q * q)
        .map(|i| {
            let t = fq.trace(fq.mul(FqElem((i / q) as u32), FqElem((i % q) as u32)));
            let z = root_of_unity(t as u128, p as u128);
            if forward {
                z.conj()
            } else {
                z
            }
        })
        .collect();
    let inv_q = 1.0 / q as f64;
    let mut x = vec![Complex64::default(); q];
    let mut stride = 1;
    for _ in 0..k {
        let block = stride * q;
        for base in (0..a.len()).step_by(block) {
            for off in 0..stride {
                for (d, xd) in x.iter_mut().enumerate() {
                    *xd = a[base + off + d * stride];
                }
                for b in 0..q {
                    let row = &mat[b * q..(b + 1) * q];
                    let s: Complex64 = row.iter().zip(&x).map(|(m, v)| m * v).sum();
                    a[base + off + b * stride] = if forward { s * inv_q } else { s };
                }
            }
        }
        stride = block;
    }
}

/// In-place radix-p decimation-in-time FFT: A[m] = sum_x a[x] exp(sign 2 pi i m x / p^k).
fn radix_p_fft(a: &mut [Complex64], p: usize, k: u32, sign: f64) {
    let n = a.len();
    debug_assert_eq!(n, p.pow(k));
    let tw: Vec<Complex64> = (0..n)
        .map(|e| {
            let z = root_of_unity(e as u128, n as u128);
            if sign < 0.0 {
                z.conj()
            } else {
                z
            }
        })
        .collect();
    let perm: Vec<Complex64> = (0..n).map(|i| a[digit_reverse(i, p, k)]).collect();
    a.copy_from_slice(&perm);
    let mut x = vec![Complex64::default(); p];
    let mut half = 1;
    for _ in 0..k {
        let m = half * p;
        let step = n / m;
        for base in (0..n).step_by(m) {
            for j in 0..half {
                for (r, xr) in x.iter_mut().enumerate() {
                    *xr = a[base + j + r * half] * tw[(j * r * step) % n];
                }
                for t in 0..p {
                    let mut s = Complex64::default();
                    for (r, xr) in x.iter().enumerate() {
                        s += xr * tw[(r * t * half * step) % n];
                    }
                    a[base + j + t * half] = s;
                }
            }
        }
        half = m;
    }
}

/// Transform over a bounded window: for f on P^low/P^high the result lives on
/// P^{-high}/P^{-low}, g(xi) = int f(x) conj(chi(xi x)) dx. Computed naively.
pub fn window_transform(f: &SampledFunction) -> Result<SampledFunction> {
    let field = f.field();
    let w = f.window();
    let dual = Window::new(-w.high, -w.low)?;
    let n = f.len();
    let xs: Vec<LocalElement> = (0..n).map(|i| LocalElement::from_cell(field, w, i)).collect();
    let scale = f.cell_measure();
    let values: Result<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let xi = LocalElement::from_cell(field, dual, j);
            let mut s = Complex64::default();
            for (x, v) in xs.iter().zip(f.values()) {
                if *v != Complex64::default() {
                    s += v * xi.mul(x)?.chi()?.conj();
                }
            }
            Ok(s * scale)
        })
        .collect();
    SampledFunction::on_window(field, dual, values?)
}

/// Whether sphere-wise coset constancy of f carries over to its window transform.
///
/// Returns true when f lacks the property (the implication holds vacuously).
pub fn constancy_dual_check(f: &SampledFunction) -> Result<bool> {
    if !sphere_constant(f, 1e-12) {
        return Ok(true);
    }
    Ok(sphere_constant(&window_transform(f)?, 1e-10))
}

/// Transform of the character table rows, used as a Gram check of orthonormality.
pub fn character_gram(cs: &CharacterSystem, table: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = cs.size();
    let field = cs.field();
    let rows: Result<Vec<Vec<Complex64>>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut row = table[m * n..(m + 1) * n].to_vec();
            forward_in_place(field, cs.level(), &mut row);
            Ok(row)
        })
        .collect();
    Ok(rows?.concat())
}
