//! Exact arithmetic in cyclotomic fields ℚ(ζ_N).
//!
//! Elements are polynomials in ζ of degree < φ(N), reduced modulo the N-th
//! cyclotomic polynomial.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::qz::{QmodZ, Rational};

#[derive(Debug, PartialEq, Eq)]
struct FieldData {
    order: u32,
    /// Monic Φ_N, lowest degree first.
    modulus: Vec<i64>,
    /// ζ^k reduced, for k in 0..N.
    powers: Vec<Vec<Rational>>,
}

/// The field ℚ(ζ_N); cheap to clone.
#[derive(Clone, Debug)]
pub struct CyclotomicField(Arc<FieldData>);

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        self.0.order == other.0.order
    }
}
impl Eq for CyclotomicField {}

/// Integer coefficients of Φ_n, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert_eq!(*den.last().unwrap(), 1);
    let mut q = vec![0i64; num.len() - dd];
    for k in (0..q.len()).rev() {
        let c = rem[k + dd];
        q[k] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

impl CyclotomicField {
    pub fn new(order: u32) -> Self {
        let order = order.max(1);
        let modulus = cyclotomic_polynomial(order);
        let deg = modulus.len() - 1;
        let mut powers = Vec::with_capacity(order as usize);
        let mut cur = vec![Rational::zero(); deg];
        cur[0] = Rational::one();
        for _ in 0..order {
            powers.push(cur.clone());
            // multiply by ζ
            let mut next = vec![Rational::zero(); deg + 1];
            next[1..].clone_from_slice(&cur);
            let top = next[deg];
            for (i, m) in modulus.iter().enumerate().take(deg) {
                next[i] -= top * *m;
            }
            next.truncate(deg);
            cur = next;
        }
        CyclotomicField(Arc::new(FieldData { order, modulus, powers }))
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn degree(&self) -> usize {
        self.0.modulus.len() - 1
    }

    pub fn zero(&self) -> Cyclotomic {
        Cyclotomic { field: self.clone(), coeffs: vec![Rational::zero(); self.degree()] }
    }

    pub fn one(&self) -> Cyclotomic {
        self.from_rational(Rational::one())
    }

    pub fn from_rational(&self, r: Rational) -> Cyclotomic {
        let mut z = self.zero();
        z.coeffs[0] = r;
        z
    }

    /// ζ_N^k.
    pub fn zeta_pow(&self, k: i64) -> Cyclotomic {
        let n = self.0.order as i64;
        Cyclotomic { field: self.clone(), coeffs: self.0.powers[k.rem_euclid(n) as usize].clone() }
    }

    /// The root of unity exp(2πi·t) for t ∈ ℚ/ℤ; `None` if its order does not divide N.
    pub fn root_of_unity(&self, t: QmodZ) -> Option<Cyclotomic> {
        let n = self.0.order as i64;
        let v = t.value() * n;
        v.is_integer().then(|| self.zeta_pow(*v.numer()))
    }

    fn reduce(&self, mut p: Vec<Rational>) -> Vec<Rational> {
        let deg = self.degree();
        let m = &self.0.modulus;
        while p.len() > deg {
            let top = p.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = p.len() - deg;
            for i in 0..deg {
                p[shift + i] -= top * m[i];
            }
        }
        p.resize(deg, Rational::zero());
        p
    }
}

/// An element of ℚ(ζ_N).
#[derive(Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    field: CyclotomicField,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational() == Some(Rational::one())
    }

    /// The value as a rational number, when it lies in ℚ.
    pub fn as_rational(&self) -> Option<Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| self.coeffs[0])
    }

    pub fn scale(&self, r: Rational) -> Cyclotomic {
        Cyclotomic { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| *c * r).collect() }
    }

    /// self += a * b, avoiding a temporary.
    pub fn add_mul(&mut self, a: &Cyclotomic, b: &Cyclotomic) {
        let p = a * b;
        *self += &p;
    }

    pub fn inverse(&self) -> Option<Cyclotomic> {
        if self.is_zero() {
            return None;
        }
        // extended Euclid in ℚ[x]: find s with s*self ≡ 1 mod Φ
        let f = &self.field;
        let modulus: Vec<Rational> = f.0.modulus.iter().map(|&c| Rational::from_integer(c)).collect();
        let (mut r0, mut r1) = (modulus, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (vec![], vec![Rational::one()]);
        while !(r1.len() == 1 && !r1[0].is_zero()) {
            let (q, r) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                return None;
            }
        }
        let c = r1[0].recip();
        let s: Vec<Rational> = s1.into_iter().map(|x| x * c).collect();
        Some(Cyclotomic { field: f.clone(), coeffs: f.reduce(s) })
    }

    fn check(&self, other: &Cyclotomic) {
        assert_eq!(self.field.order(), other.field.order(), "cyclotomic field mismatch");
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += *x * *y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let out = (0..n).map(|i| a.get(i).copied().unwrap_or_default() - b.get(i).copied().unwrap_or_default()).collect();
    trim(out)
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead = b[db];
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let c = *r.last().unwrap() / lead;
        q[k] = c;
        for (i, x) in b.iter().enumerate() {
            r[k + i] -= c * *x;
        }
        r = trim(r);
    }
    (trim(q), r)
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| if i == 0 { format!("{c}") } else { format!("{c}*z^{i}") })
            .collect();
        write!(f, "[{}](N={})", terms.join(" + "), self.field.order())
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: &Cyclotomic) -> Cyclotomic {
        let mut r = self.clone();
        r += o;
        r
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, o: &Cyclotomic) -> Cyclotomic {
        let mut r = self.clone();
        r -= o;
        r
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, o: &Cyclotomic) {
        self.check(o);
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += *b;
        }
    }
}

impl SubAssign<&Cyclotomic> for Cyclotomic {
    fn sub_assign(&mut self, o: &Cyclotomic) {
        self.check(o);
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a -= *b;
        }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        self.scale(-Rational::one())
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: &Cyclotomic) -> Cyclotomic {
        self.check(o);
        let deg = self.field.degree();
        let mut prod = vec![Rational::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += *a * *b;
                }
            }
        }
        Cyclotomic { field: self.field.clone(), coeffs: self.field.reduce(prod) }
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: Cyclotomic) -> Cyclotomic {
        &self + &o
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, o: Cyclotomic) -> Cyclotomic {
        &self - &o
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: Cyclotomic) -> Cyclotomic {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qz::rat;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(8).len(), 5);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for n in [3u32, 4, 5, 6, 8, 12] {
            let f = CyclotomicField::new(n);
            let mut s = f.zero();
            for k in 0..n as i64 {
                s += &f.zeta_pow(k);
            }
            assert!(s.is_zero(), "N={n}");
            assert!((&f.zeta_pow(1) * &f.zeta_pow(n as i64 - 1)).is_one());
        }
    }

    #[test]
    fn inverse_and_quadratic_gauss_sum() {
        let f = CyclotomicField::new(5);
        let x = &f.one() + &f.zeta_pow(2);
        let y = x.inverse().unwrap();
        assert!((&x * &y).is_one());
        // (ζ - ζ^2 - ζ^3 + ζ^4)^2 = 5
        let g = &(&f.zeta_pow(1) - &f.zeta_pow(2)) - &(&f.zeta_pow(3) - &f.zeta_pow(4));
        assert_eq!((&g * &g).as_rational(), Some(rat(5, 1)));
    }

    #[test]
    fn root_of_unity_lookup() {
        let f = CyclotomicField::new(6);
        assert_eq!(f.root_of_unity(QmodZ::from_frac(1, 2)).unwrap().as_rational(), Some(rat(-1, 1)));
        assert!(f.root_of_unity(QmodZ::from_frac(1, 4)).is_none());
    }
}
