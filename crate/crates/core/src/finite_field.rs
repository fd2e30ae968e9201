//! Small finite fields GF(p^k) with table arithmetic.
//!
//! Elements are encoded as integers 0..p^k whose base-p digits are the
//! coefficients of a polynomial modulo a primitive polynomial; 0 and 1 are the
//! field's zero and one.

use crate::error::{Error, Result};
use crate::rootdata::prime_power;

pub const MAX_FIELD_SIZE: u32 = 4096;

pub type Elem = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u32,
    k: u32,
    size: u32,
    add: Vec<Elem>,
    neg: Vec<Elem>,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

fn digits(x: u32, p: u32, k: u32) -> Vec<u32> {
    let mut x = x;
    (0..k)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::BadPrimePower(q))?;
        if q > u64::from(MAX_FIELD_SIZE) {
            return Err(Error::GroupTooLarge { bound: MAX_FIELD_SIZE as usize });
        }
        let (p, size) = (p as u32, q as u32);
        let add: Vec<Elem> = (0..size * size)
            .map(|ab| {
                let (a, b) = (digits(ab / size, p, k), digits(ab % size, p, k));
                undigits(&a.iter().zip(&b).map(|(x, y)| (x + y) % p).collect::<Vec<_>>(), p)
            })
            .collect();
        let neg =
            (0..size).map(|a| undigits(&digits(a, p, k).iter().map(|x| (p - x) % p).collect::<Vec<_>>(), p)).collect();
        // search monic polynomials x^k + c(x) for one in which x has order q − 1
        for tail in 0..size {
            let c = digits(tail, p, k);
            if k > 1 && c[0] == 0 {
                continue;
            }
            let times_x = |a: u32| -> u32 {
                let d = digits(a, p, k);
                let top = d[k as usize - 1];
                let mut out = vec![0u32; k as usize];
                for i in (1..k as usize).rev() {
                    out[i] = d[i - 1];
                }
                for i in 0..k as usize {
                    out[i] = (out[i] + p * p - top * c[i] % p) % p;
                }
                undigits(&out, p)
            };
            let generator = if k == 1 { tail } else { p };
            if k == 1 && (tail == 0 || (size > 2 && tail == 1)) {
                continue;
            }
            let mut exp = Vec::with_capacity(size as usize - 1);
            let mut log = vec![u32::MAX; size as usize];
            let mut cur = 1u32;
            let mut ok = true;
            for i in 0..size - 1 {
                if log[cur as usize] != u32::MAX {
                    ok = false;
                    break;
                }
                log[cur as usize] = i;
                exp.push(cur);
                cur = if k == 1 { (cur * generator) % p } else { times_x(cur) };
            }
            if ok && cur == 1 {
                return Ok(FiniteField { p, k, size, add, neg, exp, log });
            }
        }
        Err(Error::InvariantViolation(format!("no primitive element found for GF({q})")))
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size
    }

    pub fn units(&self) -> impl Iterator<Item = Elem> + '_ {
        self.exp.iter().copied()
    }

    /// The primitive element used for discrete logarithms.
    pub fn generator(&self) -> Elem {
        self.exp[1 % self.exp.len()]
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[(a * self.size + b) as usize]
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.size - 1;
        self.exp[((self.log[a as usize] + self.log[b as usize]) % n) as usize]
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| {
            let n = self.size - 1;
            self.exp[((n - self.log[a as usize]) % n) as usize]
        })
    }

    pub fn pow(&self, a: Elem, e: i64) -> Elem {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = i64::from(self.size - 1);
        self.exp[(i64::from(self.log[a as usize]) * e).rem_euclid(n) as usize]
    }

    /// Discrete logarithm to the base `generator()`.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn exp(&self, e: i64) -> Elem {
        self.exp[e.rem_euclid(i64::from(self.size - 1)) as usize]
    }

    /// The image of an integer.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(i64::from(self.p)) as Elem
    }

    /// x ↦ x^{p^i}.
    pub fn frobenius(&self, a: Elem, i: u32) -> Elem {
        self.pow(a, i64::from(self.p).pow(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49] {
            let f = FiniteField::new(q).unwrap();
            assert_eq!(f.units().count() as u64, q - 1);
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.mul(a, 1), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    for c in [0, 1, f.generator()] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs, "distributivity in GF({q})");
                    }
                }
            }
            // Frobenius is additive
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
                }
            }
        }
    }

    #[test]
    fn prime_fields_are_integers_mod_p() {
        let f = FiniteField::new(7).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                assert_eq!(f.mul(a, b), a * b % 7);
                assert_eq!(f.add(a, b), (a + b) % 7);
            }
        }
        assert_eq!(f.from_int(-1), 6);
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert_eq!(FiniteField::new(6).unwrap_err(), Error::BadPrimePower(6));
        assert_eq!(FiniteField::new(1).unwrap_err(), Error::BadPrimePower(1));
    }
}
