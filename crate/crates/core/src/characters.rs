//! The additive character chi and the family chi_n = chi(u(n) .) on D.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{root_of_unity, u_of, FqElem, LocalElement, LocalField, Window};

/// Characters chi_n, n < q^k, materialized on the cells of D / P^k.
#[derive(Debug, Clone)]
pub struct CharacterSystem {
    field: LocalField,
    level: u32,
}

impl CharacterSystem {
    pub fn new(field: &LocalField, level: u32) -> Result<Self> {
        field.cells(level)?;
        Ok(CharacterSystem {
            field: field.clone(),
            level,
        })
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn size(&self) -> usize {
        (self.field.q() as usize).pow(self.level)
    }

    /// chi_n(x) through the field product u(n) x.
    pub fn chi_n(&self, n: u64, x: &LocalElement) -> Result<Complex64> {
        x.chi_n(n)
    }

    /// chi_n on the level-k cell `cell`, evaluated through field arithmetic.
    pub fn value_by_field(&self, n: usize, cell: usize) -> Result<Complex64> {
        self.check_index(n)?;
        let x = LocalElement::from_cell(&self.field, Window::on_d(self.level), cell);
        x.chi_n(n as u64)
    }

    /// chi_n on a cell from the digit formula (no field products).
    pub fn value(&self, n: usize, cell: usize) -> Result<Complex64> {
        self.check_index(n)?;
        Ok(character_value(&self.field, self.level, n, cell))
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n >= self.size() {
            return Err(Error::Resolution {
                what: format!("chi_{n}"),
                needed: level_for(self.field.q(), n),
                have: self.level,
            });
        }
        Ok(())
    }

    /// Row-major table [chi_n(x_j)] built through field arithmetic.
    pub fn table_by_field(&self) -> Result<Vec<Complex64>> {
        let n = self.size();
        let rows: Result<Vec<Vec<Complex64>>> = (0..n)
            .into_par_iter()
            .map(|m| {
                let u = u_of(&self.field, m as u64);
                (0..n)
                    .map(|j| {
                        LocalElement::from_cell(&self.field, Window::on_d(self.level), j)
                            .mul(&u)?
                            .chi()
                    })
                    .collect()
            })
            .collect();
        Ok(rows?.concat())
    }

    /// Row-major table from the digit formula.
    pub fn table(&self) -> Vec<Complex64> {
        let n = self.size();
        (0..n)
            .into_par_iter()
            .flat_map_iter(|m| (0..n).map(move |j| (m, j)))
            .map(|(m, j)| character_value(&self.field, self.level, m, j))
            .collect()
    }

    /// chi_m = chi_n on D exactly when u(m) - u(n) lies in D.
    pub fn same_on_d(&self, m: u64, n: u64) -> Result<bool> {
        u_of(&self.field, m).congruent(&u_of(&self.field, n), 0)
    }
}

/// Smallest k with n < q^k.
pub fn level_for(q: u32, n: usize) -> u32 {
    let mut k = 0;
    let mut size = 1usize;
    while size <= n {
        size *= q as usize;
        k += 1;
    }
    k
}

/// Base-q digit reversal of n with k digits.
pub fn digit_reverse(n: usize, q: usize, k: u32) -> usize {
    let mut m = n;
    let mut r = 0;
    for _ in 0..k {
        r = r * q + m % q;
        m /= q;
    }
    r
}

/// chi_n(x) for n < q^k and a level-k cell x.
///
/// Positive characteristic: prod_j omega_p^{tr(b_j d_j)}. Q_p: exp(2 pi i rev(n) X / p^k).
pub(crate) fn character_value(field: &LocalField, k: u32, n: usize, cell: usize) -> Complex64 {
    let q = field.q() as usize;
    let p = field.p();
    if field.is_positive_char() {
        let fq = field.fq();
        let (mut a, mut b, mut t) = (n, cell, 0u32);
        for _ in 0..k {
            let prod = fq.mul(FqElem((a % q) as u32), FqElem((b % q) as u32));
            t = (t + fq.trace(prod)) % p;
            a /= q;
            b /= q;
        }
        root_of_unity(t as u128, p as u128)
    } else {
        let size = q.pow(k) as u128;
        let r = digit_reverse(n, q, k) as u128;
        root_of_unity(r * cell as u128 % size, size)
    }
}
