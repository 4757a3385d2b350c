use std::fmt;

use num_complex::Complex64;

use super::coset::Window;
use super::fq::FqElem;
use super::{ensure_same, LocalField};
use crate::error::{Error, Result};

/// How much of an element is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    /// The digit string is the whole expansion.
    Exact,
    /// Known modulo P^N.
    Absolute(i32),
}

impl Precision {
    fn min(self, other: Precision) -> Precision {
        match (self, other) {
            (Precision::Exact, o) | (o, Precision::Exact) => o,
            (Precision::Absolute(a), Precision::Absolute(b)) => Precision::Absolute(a.min(b)),
        }
    }

    fn shifted(self, by: i32) -> Precision {
        match self {
            Precision::Exact => Precision::Exact,
            Precision::Absolute(n) => Precision::Absolute(n + by),
        }
    }

    /// Absolute precision as an integer, `None` when exact.
    pub fn bound(self) -> Option<i32> {
        match self {
            Precision::Exact => None,
            Precision::Absolute(n) => Some(n),
        }
    }
}

/// A field element `sum_i d_i pi^i` with finitely many known digits.
///
/// The zero element has no digits and valuation `None`; it is always exact.
#[derive(Clone)]
pub struct LocalElement {
    field: LocalField,
    start: i32,
    digits: Vec<FqElem>,
    precision: Precision,
}

impl LocalElement {
    pub fn zero(field: &LocalField) -> Self {
        LocalElement {
            field: field.clone(),
            start: 0,
            digits: Vec::new(),
            precision: Precision::Exact,
        }
    }

    pub fn one(field: &LocalField) -> Self {
        Self::prime_power(field, 0)
    }

    /// The prime element pi (X in F_q((X)), p in Q_p).
    pub fn prime(field: &LocalField) -> Self {
        Self::prime_power(field, 1)
    }

    pub fn prime_power(field: &LocalField, k: i32) -> Self {
        LocalElement {
            field: field.clone(),
            start: k,
            digits: vec![FqElem::ONE],
            precision: Precision::Exact,
        }
    }

    /// Builds `sum_i digits[i] pi^(start + i)`.
    pub fn from_digits(
        field: &LocalField,
        start: i32,
        digits: &[FqElem],
        precision: Precision,
    ) -> Result<Self> {
        if let Some(d) = digits.iter().find(|d| d.0 >= field.q()) {
            return Err(Error::param(format!("digit {} outside F_{}", d.0, field.q())));
        }
        if let Precision::Absolute(n) = precision {
            if start + digits.len() as i32 > n {
                return Err(Error::param(format!(
                    "digits run past the declared precision P^{n}"
                )));
            }
        }
        normalize(field, start, digits.to_vec(), precision)
    }

    /// `n * 1`: base-p expansion of n in Q_p, n mod p in positive characteristic.
    pub fn from_integer(field: &LocalField, n: u64) -> Self {
        let p = field.p() as u64;
        if field.is_positive_char() {
            let d = vec![FqElem((n % p) as u32)];
            return normalize(field, 0, d, Precision::Exact).expect("exact");
        }
        let mut digits = Vec::new();
        let mut m = n;
        while m > 0 {
            digits.push(FqElem((m % p) as u32));
            m /= p;
        }
        normalize(field, 0, digits, Precision::Exact).expect("exact")
    }

    /// Exact representative of cell `index` of the window (digits low.., d_low fastest).
    pub fn from_cell(field: &LocalField, window: Window, index: usize) -> Self {
        let q = field.q() as usize;
        let mut m = index;
        let digits: Vec<FqElem> = (0..window.len())
            .map(|_| {
                let d = FqElem((m % q) as u32);
                m /= q;
                d
            })
            .collect();
        normalize(field, window.low, digits, Precision::Exact).expect("exact")
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Valuation v with |x| = q^{-v}; `None` for zero.
    pub fn valuation(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.start)
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Leading-digit-first digit string, starting at the valuation.
    pub fn digits(&self) -> &[FqElem] {
        &self.digits
    }

    /// Digit at position `pos`, or a precision error when it is not known.
    pub fn digit(&self, pos: i32) -> Result<FqElem> {
        if let Precision::Absolute(n) = self.precision {
            if pos >= n {
                return Err(Error::precision(format!(
                    "digit at position {pos} is beyond precision P^{n}"
                )));
            }
        }
        Ok(self.raw_digit(pos))
    }

    fn raw_digit(&self, pos: i32) -> FqElem {
        if pos < self.start {
            return FqElem::ZERO;
        }
        self.digits
            .get((pos - self.start) as usize)
            .copied()
            .unwrap_or(FqElem::ZERO)
    }

    /// |x| = q^{-v}.
    pub fn abs(&self) -> f64 {
        match self.valuation() {
            None => 0.0,
            Some(v) => (self.field.q() as f64).powi(-v),
        }
    }

    /// Same value, known only modulo P^n.
    pub fn with_precision(&self, n: i32) -> Result<Self> {
        if let Precision::Absolute(m) = self.precision {
            if n > m {
                return Err(Error::precision(format!(
                    "cannot raise precision from P^{m} to P^{n}"
                )));
            }
        }
        let keep = (n - self.start).clamp(0, self.digits.len() as i32) as usize;
        normalize(
            &self.field,
            self.start,
            self.digits[..keep].to_vec(),
            Precision::Absolute(n),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Result<Self> {
        Self::zero(&self.field).combine(self, true)
    }

    /// Whether x and y lie in the same coset of P^level.
    pub fn congruent(&self, other: &Self, level: i32) -> Result<bool> {
        ensure_same(&self.field, &other.field)?;
        let prec = self.precision.min(other.precision);
        if let Some(n) = prec.bound() {
            if n < level {
                return Err(Error::precision(format!(
                    "congruence modulo P^{level} needs precision P^{level}, have P^{n}"
                )));
            }
        }
        let lo = self.low().min(other.low()).min(level);
        let (_, digits, _) = self.raw_combine(other, true, lo, level)?;
        Ok(digits.iter().all(|d| d.is_zero()))
    }

    fn low(&self) -> i32 {
        if self.is_zero() {
            i32::MAX
        } else {
            self.start
        }
    }

    fn end(&self) -> i32 {
        if self.is_zero() {
            i32::MIN
        } else {
            self.start + self.digits.len() as i32
        }
    }

    /// Digits of self +- other on positions lo..hi and the final carry/borrow.
    fn raw_combine(
        &self,
        other: &Self,
        subtract: bool,
        lo: i32,
        hi: i32,
    ) -> Result<(i32, Vec<FqElem>, u32)> {
        let fq = self.field.fq();
        let mut out = Vec::with_capacity((hi - lo).max(0) as usize);
        if self.field.is_positive_char() {
            for pos in lo..hi {
                let (a, b) = (self.raw_digit(pos), other.raw_digit(pos));
                out.push(if subtract { fq.sub(a, b) } else { fq.add(a, b) });
            }
            return Ok((lo, out, 0));
        }
        let p = self.field.p() as i64;
        let mut carry = 0i64;
        for pos in lo..hi {
            let a = self.raw_digit(pos).0 as i64;
            let b = other.raw_digit(pos).0 as i64;
            let mut s = if subtract { a - b - carry } else { a + b + carry };
            if subtract {
                carry = 0;
                if s < 0 {
                    s += p;
                    carry = 1;
                }
            } else {
                carry = s / p;
                s %= p;
            }
            out.push(FqElem(s as u32));
        }
        Ok((lo, out, carry as u32))
    }

    fn combine(&self, other: &Self, subtract: bool) -> Result<Self> {
        ensure_same(&self.field, &other.field)?;
        let precision = self.precision.min(other.precision);
        if self.is_zero() && other.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let lo = self.low().min(other.low());
        let hi = match precision {
            Precision::Exact => self.end().max(other.end()),
            Precision::Absolute(n) => n,
        };
        if lo >= hi {
            return Err(Error::precision(
                "no digit of the result lies inside the known precision window",
            ));
        }
        let (start, mut digits, carry) = self.raw_combine(other, subtract, lo, hi)?;
        if carry > 0 && precision == Precision::Exact {
            if subtract {
                return Err(Error::precision(
                    "negative value has an infinite p-adic expansion; use with_precision",
                ));
            }
            let p = self.field.p();
            let mut c = carry;
            while c > 0 {
                digits.push(FqElem(c % p));
                c /= p;
            }
        }
        normalize(&self.field, start, digits, precision)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.field, &other.field)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let start = self.start + other.start;
        let precision = self
            .precision
            .shifted(other.start)
            .min(other.precision.shifted(self.start));
        let len = match precision {
            Precision::Exact => self.digits.len() + other.digits.len() - 1,
            Precision::Absolute(n) => {
                if n <= start {
                    return Err(Error::precision("product has no known digit"));
                }
                (n - start) as usize
            }
        };
        let fq = self.field.fq();
        let mut digits;
        if self.field.is_positive_char() {
            digits = vec![FqElem::ZERO; len];
            for (i, &a) in self.digits.iter().enumerate().take(len) {
                for (j, &b) in other.digits.iter().enumerate().take(len - i) {
                    digits[i + j] = fq.add(digits[i + j], fq.mul(a, b));
                }
            }
        } else {
            let p = self.field.p() as u64;
            let mut acc = vec![0u64; len];
            for (i, &a) in self.digits.iter().enumerate().take(len) {
                for (j, &b) in other.digits.iter().enumerate().take(len - i) {
                    acc[i + j] += a.0 as u64 * b.0 as u64;
                }
            }
            digits = Vec::with_capacity(len + 2);
            let mut carry = 0u64;
            for v in acc {
                let s = v + carry;
                digits.push(FqElem((s % p) as u32));
                carry = s / p;
            }
            if precision == Precision::Exact {
                while carry > 0 {
                    digits.push(FqElem((carry % p) as u32));
                    carry /= p;
                }
            }
        }
        normalize(&self.field, start, digits, precision)
    }

    /// Cell index of x in the window group P^low / P^high (d_low fastest).
    pub fn cell_index(&self, window: Window) -> Result<usize> {
        if let Some(v) = self.valuation() {
            if v < window.low {
                return Err(Error::domain(format!(
                    "element with valuation {v} is outside P^{}",
                    window.low
                )));
            }
        }
        let q = self.field.q() as usize;
        let mut idx = 0usize;
        for pos in (window.low..window.high).rev() {
            idx = idx * q + self.digit(pos)?.0 as usize;
        }
        Ok(idx)
    }

    /// The additive character: trivial on D, nontrivial on P^{-1}.
    pub fn chi(&self) -> Result<Complex64> {
        if self.is_zero() || self.start >= 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if let Precision::Absolute(n) = self.precision {
            if n < 0 {
                return Err(Error::precision(format!(
                    "chi needs the digits at negative positions; known only modulo P^{n}"
                )));
            }
        }
        let p = self.field.p();
        if self.field.is_positive_char() {
            let t = self.field.fq().trace(self.raw_digit(-1));
            return Ok(root_of_unity(t as u128, p as u128));
        }
        // frac(x) = num / p^e, using at most the leading digits that fit in u128.
        let mut e = 0u32;
        let mut den: u128 = 1;
        while e < (-self.start) as u32 {
            match den.checked_mul(p as u128 * p as u128) {
                Some(_) => {
                    den *= p as u128;
                    e += 1;
                }
                None => break,
            }
        }
        let mut num: u128 = 0;
        for pos in (-(e as i32)..0).rev() {
            num = num * p as u128 + self.raw_digit(pos).0 as u128;
        }
        Ok(root_of_unity(num, den))
    }

    /// chi_n(x) = chi(u(n) x).
    pub fn chi_n(&self, n: u64) -> Result<Complex64> {
        u_of(&self.field, n).mul(self)?.chi()
    }
}

/// exp(2 pi i num / den), exact when the reduced denominator divides 4.
pub fn root_of_unity(num: u128, den: u128) -> Complex64 {
    let num = num % den;
    let g = gcd(num, den);
    let (num, den) = (num / g, den / g);
    match (num, den) {
        (0, 1) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        _ => {
            let t = std::f64::consts::TAU * (num as f64 / den as f64);
            Complex64::new(t.cos(), t.sin())
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn normalize(
    field: &LocalField,
    start: i32,
    mut digits: Vec<FqElem>,
    precision: Precision,
) -> Result<LocalElement> {
    let lead = digits.iter().position(|d| !d.is_zero());
    let Some(lead) = lead else {
        return match precision {
            Precision::Exact => Ok(LocalElement::zero(field)),
            Precision::Absolute(n) => Err(Error::precision(format!(
                "value vanishes modulo P^{n}; its leading digit is undetermined"
            ))),
        };
    };
    digits.drain(..lead);
    if precision == Precision::Exact {
        while digits.last().is_some_and(|d| d.is_zero()) {
            digits.pop();
        }
    }
    Ok(LocalElement {
        field: field.clone(),
        start: start + lead as i32,
        digits,
        precision,
    })
}

/// Coset representative u(n): base-q digits b_j of n placed at pi^{-1-j}.
pub fn u_of(field: &LocalField, n: u64) -> LocalElement {
    let q = field.q() as u64;
    let mut digits = Vec::new();
    let mut m = n;
    while m > 0 {
        digits.push(FqElem((m % q) as u32));
        m /= q;
    }
    let len = digits.len() as i32;
    digits.reverse();
    normalize(field, -len, digits, Precision::Exact).expect("exact")
}

impl PartialEq for LocalElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.start == other.start
            && self.digits == other.digits
            && self.precision == other.precision
            || (self.is_zero() && other.is_zero() && self.field == other.field)
    }
}

impl fmt::Debug for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .digits
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| format!("{}*pi^{}", d.0, self.start + i as i32))
            .collect();
        write!(f, "{}", terms.join(" + "))?;
        if let Precision::Absolute(n) = self.precision {
            write!(f, " + O(pi^{n})")?;
        }
        Ok(())
    }
}
