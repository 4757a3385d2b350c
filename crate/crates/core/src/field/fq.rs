//! The residue field F_q = F_p[t]/(m(t)).
//!
//! Elements are packed as integers `a_0 + a_1 p + ... + a_{c-1} p^{c-1}`, the
//! base-p digits being the coefficients of `1, t, ..., t^{c-1}`. With this
//! packing the element with index `n < q` is exactly the residue used by
//! `u(n)`, and addition is carry-free base-p digit addition.

use crate::error::{Error, Result};

/// An element of F_q in packed base-p form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem(pub u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Lookup tables for F_q arithmetic.
#[derive(Debug, Clone)]
pub struct Fq {
    p: u32,
    c: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    trace: Vec<u32>,
}

impl Fq {
    /// Builds the tables for `F_p[t]/(modulus)`; `modulus` is monic of degree `c`,
    /// low degree first, and must be irreducible.
    pub fn new(p: u32, c: u32, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::param(format!("p = {p} is not prime")));
        }
        if c == 0 {
            return Err(Error::param("c must be positive"));
        }
        if modulus.len() != c as usize + 1 {
            return Err(Error::param(format!(
                "modulus must have c + 1 = {} coefficients, got {}",
                c + 1,
                modulus.len()
            )));
        }
        if modulus.iter().any(|&d| d >= p) {
            return Err(Error::param("modulus coefficients must lie in [0, p)"));
        }
        if modulus[c as usize] != 1 {
            return Err(Error::param("modulus must be monic"));
        }
        if !is_irreducible(modulus, p) {
            return Err(Error::param(format!(
                "modulus {modulus:?} is reducible over F_{p}"
            )));
        }
        let q = p
            .checked_pow(c)
            .filter(|&q| q <= 1 << 12)
            .ok_or_else(|| Error::param("q = p^c too large for table arithmetic"))?;

        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        let mut neg = vec![0; qs];
        for a in 0..q {
            let da = unpack(a, p, c);
            neg[a as usize] = pack(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>(), p);
            for b in 0..q {
                let db = unpack(b, p, c);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = pack(&sum, p);
                mul[a as usize * qs + b as usize] = pack(&poly_mulmod(&da, &db, modulus, p), p);
            }
        }
        let mut fq = Fq {
            p,
            c,
            q,
            modulus: modulus.to_vec(),
            add,
            mul,
            neg,
            trace: vec![0; qs],
        };
        for a in 0..q {
            // tr(a) = a + a^p + ... + a^{p^{c-1}}
            let mut acc = FqElem::ZERO;
            let mut pow = FqElem(a);
            for _ in 0..c {
                acc = fq.add(acc, pow);
                pow = fq.pow(pow, p as u64);
            }
            debug_assert!(acc.0 < p, "trace must land in the prime field");
            fq.trace[a as usize] = acc.0;
        }
        Ok(fq)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Packs base-p digits (coefficients of `1, t, ..., t^{c-1}`).
    pub fn elem(&self, digits: &[u32]) -> Result<FqElem> {
        if digits.len() != self.c as usize || digits.iter().any(|&d| d >= self.p) {
            return Err(Error::param(format!(
                "{digits:?} is not a digit vector of F_{}",
                self.q
            )));
        }
        Ok(FqElem(pack(digits, self.p)))
    }

    pub fn digits(&self, a: FqElem) -> Vec<u32> {
        unpack(a.0, self.p, self.c)
    }

    fn check(&self, a: FqElem) -> Result<()> {
        if a.0 < self.q {
            Ok(())
        } else {
            Err(Error::param(format!(
                "element {} does not belong to F_{}",
                a.0, self.q
            )))
        }
    }

    /// Checked addition; fails when an operand is not an element of this field.
    pub fn fq_add(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    /// Checked multiplication (reduction modulo the modulus polynomial).
    pub fn fq_mul(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.add[(a.0 * self.q + b.0) as usize])
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.mul[(a.0 * self.q + b.0) as usize])
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Field trace F_q -> F_p.
    #[inline]
    pub fn trace(&self, a: FqElem) -> u32 {
        self.trace[a.0 as usize]
    }
}

pub(crate) fn pack(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

pub(crate) fn unpack(mut v: u32, p: u32, c: u32) -> Vec<u32> {
    (0..c)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime: a^{p-2}
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Remainder of `a` modulo `m` over F_p (`m` nonzero, leading coefficient nonzero).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    let mut r = trim(a.to_vec());
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - dm;
        let coef = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &mc) in m.iter().enumerate() {
            let t = (coef as u64 * mc as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = trim(r);
        if dm == 0 {
            return vec![0];
        }
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = poly_rem(&prod, m, p);
    r.resize(m.len() - 1, 0);
    r
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=deg/2`.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = trim(modulus.to_vec()).len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for lower in 0..count {
            let mut f: Vec<u32> = unpack(lower as u32, p, d as u32);
            f.push(1);
            let r = poly_rem(modulus, &f, p);
            if r.iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Default modulus for F_{p^c}: Conway polynomials where tabulated, otherwise
/// the lexicographically first monic irreducible polynomial.
pub fn default_modulus(p: u32, c: u32) -> Vec<u32> {
    let conway: Option<&[u32]> = match (p, c) {
        (_, 1) => Some(&[0, 1]),
        (2, 2) => Some(&[1, 1, 1]),
        (2, 3) => Some(&[1, 1, 0, 1]),
        (2, 4) => Some(&[1, 1, 0, 0, 1]),
        (3, 2) => Some(&[2, 2, 1]),
        (3, 3) => Some(&[1, 2, 0, 1]),
        (5, 2) => Some(&[2, 4, 1]),
        (7, 2) => Some(&[3, 6, 1]),
        _ => None,
    };
    if let Some(m) = conway {
        return m.to_vec();
    }
    let count = (p as u64).pow(c);
    (0..count)
        .map(|lower| {
            let mut f = unpack(lower as u32, p, c);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Fq {
        Fq::new(2, 2, &[1, 1, 1]).unwrap()
    }

    #[test]
    fn f2_one_plus_one_is_zero() {
        let f2 = Fq::new(2, 1, &[0, 1]).unwrap();
        assert_eq!(f2.add(FqElem::ONE, FqElem::ONE), FqElem::ZERO);
    }

    #[test]
    fn f4_t_squared_is_t_plus_one() {
        let f = f4();
        let t = f.elem(&[0, 1]).unwrap();
        // t^2 = t + 1 in F_2[t]/(t^2 + t + 1)
        assert_eq!(f.mul(t, t), f.elem(&[1, 1]).unwrap());
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for (p, c) in [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2)] {
            let f = Fq::new(p, c, &default_modulus(p, c)).unwrap();
            let q = f.q();
            for a in (0..q).map(FqElem) {
                assert_eq!(f.mul(a, FqElem::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FqElem::ZERO);
                if !a.is_zero() {
                    assert!((0..q).map(FqElem).any(|b| f.mul(a, b) == FqElem::ONE));
                }
                for b in (0..q).map(FqElem) {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for cc in (0..q).map(FqElem) {
                        assert_eq!(f.mul(f.mul(a, b), cc), f.mul(a, f.mul(b, cc)));
                        assert_eq!(f.mul(a, f.add(b, cc)), f.add(f.mul(a, b), f.mul(a, cc)));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_values() {
        let f = f4();
        assert_eq!(f.trace(FqElem::ZERO), 0);
        // tr(t) = t + t^2 = t + t + 1 = 1
        assert_eq!(f.trace(f.elem(&[0, 1]).unwrap()), 1);
        let f2 = Fq::new(2, 1, &[0, 1]).unwrap();
        assert_eq!(f2.trace(FqElem::ONE), 1);
    }

    #[test]
    fn trace_is_linear_and_onto() {
        for (p, c) in [(2, 2), (2, 3), (3, 2)] {
            let f = Fq::new(p, c, &default_modulus(p, c)).unwrap();
            let mut hit = vec![false; p as usize];
            for a in (0..f.q()).map(FqElem) {
                hit[f.trace(a) as usize] = true;
                for b in (0..f.q()).map(FqElem) {
                    assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % p);
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 + 1 = (t + 1)^2 over F_2
        assert!(matches!(Fq::new(2, 2, &[1, 0, 1]), Err(Error::Parameter(_))));
        // t^4 + t^2 + 1 = (t^2 + t + 1)^2 over F_2: no roots, still reducible
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
    }

    #[test]
    fn default_moduli_are_irreducible() {
        for (p, c) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (5, 3), (7, 2)] {
            assert!(is_irreducible(&default_modulus(p, c), p), "p={p} c={c}");
        }
    }

    #[test]
    fn out_of_field_operand_is_parameter_error() {
        let f = f4();
        assert!(f.fq_add(FqElem(4), FqElem::ONE).is_err());
        assert!(f.fq_mul(FqElem::ONE, FqElem(9)).is_err());
        assert_eq!(f.fq_mul(FqElem(2), FqElem(2)).unwrap(), FqElem(3));
    }
}
