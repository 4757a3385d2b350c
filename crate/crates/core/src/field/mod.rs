//! Local fields Q_p and F_q((X)) at finite precision.

mod coset;
mod element;
mod fq;

pub use coset::{ball_relation, haar_measure, Ball, BallRelation, CosetIndex, Window};
pub use element::{root_of_unity, u_of, LocalElement, Precision};
pub use fq::{default_modulus, is_irreducible, is_prime, Fq, FqElem};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Characteristic {
    /// Q_p
    Zero,
    /// F_q((X))
    Positive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldParams {
    pub p: u32,
    pub c: u32,
    pub q: u32,
    pub characteristic: Characteristic,
    /// Monic irreducible polynomial defining F_q over F_p, low degree first.
    pub modulus: Vec<u32>,
}

impl FieldParams {
    pub fn new(
        characteristic: Characteristic,
        p: u32,
        c: u32,
        modulus: Option<Vec<u32>>,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::param(format!("p = {p} is not prime")));
        }
        if c == 0 {
            return Err(Error::param("c must be positive"));
        }
        if characteristic == Characteristic::Zero && c != 1 {
            return Err(Error::param(
                "characteristic zero supports only Q_p (c = 1)",
            ));
        }
        let q = p
            .checked_pow(c)
            .filter(|&q| q <= 4096)
            .ok_or_else(|| Error::param(format!("q = {p}^{c} is too large")))?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != c as usize + 1 || m.iter().any(|&d| d >= p) || m[c as usize] != 1 {
                    return Err(Error::param(format!(
                        "modulus {m:?} must be {} base-{p} digits, monic, low degree first",
                        c + 1
                    )));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::param(format!("modulus {m:?} is reducible over F_{p}")));
                }
                m
            }
            None => default_modulus(p, c),
        };
        Ok(FieldParams {
            p,
            c,
            q,
            characteristic,
            modulus,
        })
    }
}

struct Inner {
    params: FieldParams,
    fq: Fq,
}

/// Shared handle to a local field together with its residue field tables.
#[derive(Clone)]
pub struct LocalField {
    inner: Arc<Inner>,
}

impl LocalField {
    pub fn new(params: FieldParams) -> Result<Self> {
        let fq = Fq::new(params.p, params.c, &params.modulus)?;
        Ok(LocalField {
            inner: Arc::new(Inner { params, fq }),
        })
    }

    /// The p-adic field Q_p.
    pub fn q_p(p: u32) -> Result<Self> {
        Self::new(FieldParams::new(Characteristic::Zero, p, 1, None)?)
    }

    /// The Laurent series field F_q((X)), q = p^c, with the default modulus.
    pub fn laurent(p: u32, c: u32) -> Result<Self> {
        Self::new(FieldParams::new(Characteristic::Positive, p, c, None)?)
    }

    pub fn params(&self) -> &FieldParams {
        &self.inner.params
    }

    pub fn fq(&self) -> &Fq {
        &self.inner.fq
    }

    pub fn p(&self) -> u32 {
        self.inner.params.p
    }

    pub fn c(&self) -> u32 {
        self.inner.params.c
    }

    pub fn q(&self) -> u32 {
        self.inner.params.q
    }

    pub fn characteristic(&self) -> Characteristic {
        self.inner.params.characteristic
    }

    pub fn is_positive_char(&self) -> bool {
        self.characteristic() == Characteristic::Positive
    }

    /// Field trace F_q -> F_p; only meaningful in positive characteristic.
    pub fn trace(&self, a: FqElem) -> Result<u32> {
        if !self.is_positive_char() {
            return Err(Error::Unsupported(
                "trace is defined for the positive characteristic backend".into(),
            ));
        }
        if a.0 >= self.q() {
            return Err(Error::param(format!("{} is not an element of F_{}", a.0, self.q())));
        }
        Ok(self.fq().trace(a))
    }

    /// Number of cells q^len, failing when it does not fit comfortably in memory.
    pub fn cells(&self, len: u32) -> Result<usize> {
        (self.q() as usize)
            .checked_pow(len)
            .filter(|&n| n <= 1 << 26)
            .ok_or_else(|| Error::param(format!("q^{len} cells is too many")))
    }

    /// Sum of two cell indices of the window group P^low / P^high.
    pub fn cell_add(&self, w: Window, a: usize, b: usize) -> usize {
        let n = self.q() as usize;
        if !self.is_positive_char() {
            let size = n.pow(w.len());
            return (a + b) % size;
        }
        let fq = self.fq();
        let (mut a, mut b, mut out, mut scale) = (a, b, 0usize, 1usize);
        for _ in 0..w.len() {
            let s = fq.add(FqElem((a % n) as u32), FqElem((b % n) as u32));
            out += s.0 as usize * scale;
            scale *= n;
            a /= n;
            b /= n;
        }
        out
    }

    pub fn cell_neg(&self, w: Window, a: usize) -> usize {
        let n = self.q() as usize;
        if !self.is_positive_char() {
            let size = n.pow(w.len());
            return (size - a % size) % size;
        }
        let fq = self.fq();
        let (mut a, mut out, mut scale) = (a, 0usize, 1usize);
        for _ in 0..w.len() {
            out += fq.neg(FqElem((a % n) as u32)).0 as usize * scale;
            scale *= n;
            a /= n;
        }
        out
    }

    pub fn cell_sub(&self, w: Window, a: usize, b: usize) -> usize {
        self.cell_add(w, a, self.cell_neg(w, b))
    }
}

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.params == other.inner.params
    }
}

impl Eq for LocalField {}

impl fmt::Debug for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pr = self.params();
        match pr.characteristic {
            Characteristic::Zero => write!(f, "Q_{}", pr.p),
            Characteristic::Positive => write!(f, "F_{}((X))", pr.q),
        }
    }
}

pub(crate) fn ensure_same(a: &LocalField, b: &LocalField) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::param(format!("field mismatch: {a} vs {b}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(FieldParams::new(Characteristic::Zero, 4, 1, None).is_err());
        assert!(FieldParams::new(Characteristic::Zero, 3, 2, None).is_err());
        assert!(FieldParams::new(Characteristic::Positive, 2, 2, Some(vec![1, 0, 1])).is_err());
        let p = FieldParams::new(Characteristic::Positive, 3, 2, None).unwrap();
        assert_eq!(p.q, 9);
        assert_eq!(p.modulus, vec![2, 2, 1]);
    }

    #[test]
    fn trace_unsupported_in_char_zero() {
        let f = LocalField::q_p(3).unwrap();
        assert!(matches!(f.trace(FqElem(1)), Err(Error::Unsupported(_))));
        let g = LocalField::laurent(2, 2).unwrap();
        assert_eq!(g.trace(FqElem(2)).unwrap(), 1);
    }

    #[test]
    fn cell_group_laws() {
        for field in [
            LocalField::q_p(2).unwrap(),
            LocalField::q_p(3).unwrap(),
            LocalField::laurent(2, 2).unwrap(),
            LocalField::laurent(3, 1).unwrap(),
        ] {
            let w = Window::new(-1, 2).unwrap();
            let n = field.cells(w.len()).unwrap();
            for a in 0..n {
                assert_eq!(field.cell_add(w, a, field.cell_neg(w, a)), 0);
                for b in 0..n {
                    assert_eq!(field.cell_add(w, a, b), field.cell_add(w, b, a));
                    assert_eq!(field.cell_sub(w, field.cell_add(w, a, b), b), a);
                }
            }
        }
    }
}
