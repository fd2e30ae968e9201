//! Extended affine Hecke algebras with unequal parameters over ℚ(ζ_N)[v, v⁻¹],
//! where v is a formal square root of q_F, together with the Bernstein
//! elements θ_x and the algebra attached to a depth-zero block.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::affine_weyl::{AffineRoot, AffineWeyl, ExtAffineElement, FacetType};
use crate::cyclotomic::{Cyclotomic, CyclotomicField};
use crate::error::{Error, Result};
use crate::extensions::{Cocycle2, CoefficientGroup, FiniteGroup};
use crate::finite_oracle::{hecke_fin, q_parameter, FiniteGroupOfLieType, FiniteTorusCharacter, GroupKind};
use crate::intmat::{integer_kernel, IntMatrix};
use crate::qz::{dot, exact_log, fmt_rational, lcm_all, QmodZ, Rational};
use crate::rootdata::{pairing, weyl_group, FrobeniusAction, RootDatum, TorusCharacter};
use crate::stabilizers::{gamma_decomposition, singular_subsystem};

static NEXT_TAG: AtomicU64 = AtomicU64::new(1);

/// Default cap on the length of basis elements produced by products.
pub const DEFAULT_MAX_LENGTH: u64 = 200;

/// A Laurent polynomial in v with coefficients in ℚ(ζ_N).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    field: CyclotomicField,
    terms: BTreeMap<i64, Cyclotomic>,
}

impl Laurent {
    pub fn zero(field: &CyclotomicField) -> Self {
        Laurent { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(c: Cyclotomic, k: i64) -> Self {
        let mut out = Laurent::zero(c.field());
        if !c.is_zero() {
            out.terms.insert(k, c);
        }
        out
    }

    pub fn v_pow(field: &CyclotomicField, k: i64) -> Self {
        Laurent::monomial(field.one(), k)
    }

    pub fn from_rational(field: &CyclotomicField, r: Rational) -> Self {
        Laurent::monomial(field.from_rational(r), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<i64, Cyclotomic> {
        &self.terms
    }

    fn add_term(&mut self, k: i64, c: &Cyclotomic) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(|| self.field.zero());
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_assign(&mut self, other: &Laurent) {
        for (&k, c) in &other.terms {
            self.add_term(k, c);
        }
    }

    pub fn sub_assign(&mut self, other: &Laurent) {
        for (&k, c) in &other.terms {
            self.add_term(k, &-c);
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn neg(&self) -> Laurent {
        Laurent { field: self.field.clone(), terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect() }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero(&self.field);
        for (&i, a) in &self.terms {
            for (&j, b) in &other.terms {
                out.add_term(i + j, &(a * b));
            }
        }
        out
    }

    /// Multiplication by v^k.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent { field: self.field.clone(), terms: self.terms.iter().map(|(&i, c)| (i + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &Cyclotomic) -> Laurent {
        let mut out = Laurent::zero(&self.field);
        for (&k, a) in &self.terms {
            out.add_term(k, &(a * c));
        }
        out
    }

    pub fn as_constant(&self) -> Option<Cyclotomic> {
        match self.terms.len() {
            0 => Some(self.field.zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// The value at v² = q when only even powers of v occur.
    pub fn at_even(&self, q: Rational) -> Option<Cyclotomic> {
        let mut out = self.field.zero();
        for (&k, c) in &self.terms {
            if k % 2 != 0 {
                return None;
            }
            let p = k / 2;
            let mut qp = Rational::one();
            for _ in 0..p.unsigned_abs() {
                qp *= q;
            }
            if p < 0 {
                qp = qp.recip();
            }
            out += &c.scale(qp);
        }
        Some(out)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&k, c)| {
                let coeff = match c.as_rational() {
                    Some(r) => fmt_rational(&r),
                    None => format!("({c:?})"),
                };
                match k {
                    0 => coeff,
                    1 => format!("{coeff}*v"),
                    _ => format!("{coeff}*v^{k}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A finite linear combination Σ c_w T_w.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeElement {
    tag: u64,
    field: CyclotomicField,
    terms: HashMap<ExtAffineElement, Laurent>,
}

impl HeckeElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &ExtAffineElement) -> Option<&Laurent> {
        self.terms.get(w)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExtAffineElement, &Laurent)> {
        self.terms.iter()
    }

    /// Terms ordered by length, then translation, then finite part.
    pub fn sorted_terms(&self) -> Vec<(&ExtAffineElement, &Laurent)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by_cached_key(|(w, _)| (w.length(), w.translation().to_vec(), w.finite_part().on_characters.to_rows()));
        v
    }

    fn empty_like(&self) -> HeckeElement {
        HeckeElement { tag: self.tag, field: self.field.clone(), terms: HashMap::new() }
    }

    fn add_term(&mut self, w: ExtAffineElement, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                e.add_assign(c);
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    fn check(&self, other: &HeckeElement) -> Result<()> {
        if self.tag != other.tag {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &HeckeElement) -> Result<HeckeElement> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HeckeElement) -> Result<HeckeElement> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), &c.neg());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Laurent) -> HeckeElement {
        let mut out = self.empty_like();
        for (w, a) in &self.terms {
            out.add_term(w.clone(), &a.mul(c));
        }
        out
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|(w, c)| format!("({c}) T[{:?}; {:?}]", w.translation(), w.finite_part().on_characters.to_rows()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// q_s = q_F^{e_s} for each simple affine reflection s.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParameterFunction {
    pub exponents: Vec<i64>,
}

impl ParameterFunction {
    pub fn new(exponents: Vec<i64>) -> Self {
        ParameterFunction { exponents }
    }

    pub fn equal(n: usize, e: i64) -> Self {
        ParameterFunction { exponents: vec![e; n] }
    }

    pub fn from_values(values: &[Rational], q_f: u64) -> Result<Self> {
        let exponents = values
            .iter()
            .map(|v| {
                exact_log(v, q_f).map(i64::from).ok_or_else(|| Error::NotAPower { value: fmt_rational(v), base: q_f })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ParameterFunction { exponents })
    }

    pub fn value(&self, i: usize, q_f: u64) -> Rational {
        let mut out = Rational::one();
        for _ in 0..self.exponents[i] {
            out *= Rational::from_integer(q_f as i64);
        }
        out
    }
}

struct OmegaTwist {
    index: HashMap<ExtAffineElement, usize>,
    mu: Cocycle2,
}

/// H(W, q) for W = W_aff ⋊ Ω, optionally twisted on Ω by a 2-cocycle μ.
///
/// Basis: T_w = T_{s_1} ⋯ T_{s_k} T_ω for w = s_1 ⋯ s_k ω reduced, with
/// (T_s + 1)(T_s − q_s) = 0 and T_ω T_ω′ = μ(ω, ω′) T_{ωω′}.
pub struct ExtAffineHeckeAlgebra {
    tag: u64,
    aw: AffineWeyl,
    params: ParameterFunction,
    q_f: u64,
    field: CyclotomicField,
    omega: Option<OmegaTwist>,
    max_length: u64,
}

/// Result of a centrality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralityWitness {
    pub central: bool,
    pub generators_checked: usize,
    pub failures: Vec<String>,
}

/// Result of the relation checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub quadratic: bool,
    pub braid: bool,
    pub omega_conjugation: bool,
    pub reduced_words: bool,
    pub associativity: bool,
    pub words_checked: usize,
}

impl RelationReport {
    pub fn all(&self) -> bool {
        self.quadratic && self.braid && self.omega_conjugation && self.reduced_words && self.associativity
    }
}

impl ExtAffineHeckeAlgebra {
    pub fn new(datum: &RootDatum, params: ParameterFunction, q_f: u64) -> Result<Self> {
        let aw = AffineWeyl::new(datum);
        let n = aw.simple_reflections().len();
        if params.exponents.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} parameters given for {n} simple affine reflections",
                params.exponents.len()
            )));
        }
        if params.exponents.iter().any(|&e| e < 0) {
            return Err(Error::InvalidInput("parameters must be at least 1".into()));
        }
        if q_f < 2 {
            return Err(Error::InvalidInput("q_F must be at least 2".into()));
        }
        let alg = ExtAffineHeckeAlgebra {
            tag: NEXT_TAG.fetch_add(1, Ordering::Relaxed),
            aw,
            params,
            q_f,
            field: CyclotomicField::new(1),
            omega: None,
            max_length: DEFAULT_MAX_LENGTH,
        };
        alg.check_parameters()?;
        Ok(alg)
    }

    pub fn with_max_length(mut self, max_length: u64) -> Self {
        self.max_length = max_length;
        self
    }

    /// Twists the Ω part by μ, given as a table indexed by `omega_group()` order.
    pub fn with_cocycle(mut self, table: Vec<Vec<QmodZ>>) -> Result<Self> {
        let elements = self.aw.omega_group()?;
        let index: HashMap<ExtAffineElement, usize> =
            elements.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mult: Vec<Vec<usize>> =
            elements.iter().map(|a| elements.iter().map(|b| index[&self.aw.mul(a, b)]).collect()).collect();
        let group = Arc::new(FiniteGroup::from_table(mult)?);
        if table.len() != elements.len() || table.iter().any(|r| r.len() != elements.len()) {
            return Err(Error::InvalidInput(format!("cocycle table must be {0}×{0}", elements.len())));
        }
        let values = table.into_iter().map(|row| row.into_iter().map(|x| vec![x]).collect()).collect();
        let mu = Cocycle2::new(group, CoefficientGroup::roots_of_unity(), values)?;
        if (0..elements.len()).any(|x| !mu.value(0, x)[0].is_zero() || !mu.value(x, 0)[0].is_zero()) {
            return Err(Error::InvalidInput("cocycle must be normalized".into()));
        }
        let n = lcm_all(mu.table().iter().flatten().map(|v| v[0].order()));
        self.field = CyclotomicField::new(n as u32);
        self.omega = Some(OmegaTwist { index, mu });
        self.tag = NEXT_TAG.fetch_add(1, Ordering::Relaxed);
        Ok(self)
    }

    fn check_parameters(&self) -> Result<()> {
        let gens = self.aw.simple_reflections();
        let e = &self.params.exponents;
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if let Some(m) = self.coxeter_order(i, j) {
                    if m % 2 == 1 && e[i] != e[j] {
                        return Err(Error::InvalidInput(format!(
                            "s{i} and s{j} are conjugate but carry different parameters"
                        )));
                    }
                }
            }
        }
        if self.aw.datum().is_semisimple() {
            for w in self.aw.omega_group()? {
                for (i, a) in self.aw.simple_roots().roots.iter().enumerate() {
                    let image = w.act_root(a);
                    let j = self.aw.simple_roots().roots.iter().position(|b| *b == image).ok_or_else(|| {
                        Error::InvariantViolation("Ω does not permute the simple affine roots".into())
                    })?;
                    if e[i] != e[j] {
                        return Err(Error::InvalidInput(format!("parameters are not Ω-invariant at s{i}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn affine_weyl(&self) -> &AffineWeyl {
        &self.aw
    }

    pub fn datum(&self) -> &RootDatum {
        self.aw.datum()
    }

    pub fn parameters(&self) -> &ParameterFunction {
        &self.params
    }

    pub fn q_f(&self) -> u64 {
        self.q_f
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    pub fn num_generators(&self) -> usize {
        self.aw.simple_reflections().len()
    }

    /// Order of s_i s_j if at most 6.
    pub fn coxeter_order(&self, i: usize, j: usize) -> Option<usize> {
        let gens = self.aw.simple_reflections();
        let p = self.aw.mul(&gens[i], &gens[j]);
        let mut cur = p.clone();
        for m in 1..=6 {
            if cur.is_identity() {
                return Some(m);
            }
            cur = self.aw.mul(&cur, &p);
        }
        None
    }

    fn q_of(&self, i: usize) -> Laurent {
        Laurent::v_pow(&self.field, 2 * self.params.exponents[i])
    }

    fn laurent_one(&self) -> Laurent {
        Laurent::v_pow(&self.field, 0)
    }

    pub fn zero(&self) -> HeckeElement {
        HeckeElement { tag: self.tag, field: self.field.clone(), terms: HashMap::new() }
    }

    pub fn one(&self) -> HeckeElement {
        self.basis(&self.aw.identity())
    }

    pub fn basis(&self, w: &ExtAffineElement) -> HeckeElement {
        let mut out = self.zero();
        out.add_term(w.clone(), &self.laurent_one());
        out
    }

    pub fn generator(&self, i: usize) -> HeckeElement {
        self.basis(&self.aw.simple_reflections()[i])
    }

    /// c · 1 for a Laurent polynomial c.
    pub fn scalar(&self, c: &Laurent) -> HeckeElement {
        self.one().scale(c)
    }

    pub fn v_pow(&self, k: i64) -> Laurent {
        Laurent::v_pow(&self.field, k)
    }

    fn guard(&self, w: &ExtAffineElement) -> Result<()> {
        if w.length() > self.max_length {
            return Err(Error::GroupTooLarge { bound: self.max_length as usize });
        }
        Ok(())
    }

    fn mu(&self, a: &ExtAffineElement, b: &ExtAffineElement) -> Option<Cyclotomic> {
        let tw = self.omega.as_ref()?;
        let v = tw.mu.value(tw.index[a], tw.index[b])[0];
        if v.is_zero() {
            None
        } else {
            self.field.root_of_unity(v)
        }
    }

    fn omega_part(&self, w: &ExtAffineElement) -> ExtAffineElement {
        self.aw.strip(w).1
    }

    pub fn left_mul_gen(&self, i: usize, h: &HeckeElement) -> Result<HeckeElement> {
        let s = &self.aw.simple_reflections()[i];
        let q = self.q_of(i);
        let qm1 = q.sub(&self.laurent_one());
        let mut out = self.zero();
        for (w, c) in &h.terms {
            let sw = self.aw.mul(s, w);
            self.guard(&sw)?;
            if sw.length() > w.length() {
                out.add_term(sw, c);
            } else {
                out.add_term(sw, &c.mul(&q));
                out.add_term(w.clone(), &c.mul(&qm1));
            }
        }
        Ok(out)
    }

    pub fn right_mul_gen(&self, h: &HeckeElement, i: usize) -> Result<HeckeElement> {
        let s = &self.aw.simple_reflections()[i];
        let q = self.q_of(i);
        let qm1 = q.sub(&self.laurent_one());
        let mut out = self.zero();
        for (w, c) in &h.terms {
            let ws = self.aw.mul(w, s);
            self.guard(&ws)?;
            if ws.length() > w.length() {
                out.add_term(ws, c);
            } else {
                out.add_term(ws, &c.mul(&q));
                out.add_term(w.clone(), &c.mul(&qm1));
            }
        }
        Ok(out)
    }

    /// h · T_s⁻¹ with T_s⁻¹ = q_s⁻¹ T_s + (q_s⁻¹ − 1).
    pub fn right_mul_inv_gen(&self, h: &HeckeElement, i: usize) -> Result<HeckeElement> {
        let qinv = Laurent::v_pow(&self.field, -2 * self.params.exponents[i]);
        let hs = self.right_mul_gen(h, i)?.scale(&qinv);
        let rest = h.scale(&qinv.sub(&self.laurent_one()));
        hs.add(&rest)
    }

    /// T_ω · h for ω of length zero.
    pub fn left_mul_omega(&self, omega: &ExtAffineElement, h: &HeckeElement) -> HeckeElement {
        let mut out = self.zero();
        for (w, c) in &h.terms {
            let c = match self.mu(omega, &self.omega_part(w)) {
                Some(z) => c.scale(&z),
                None => c.clone(),
            };
            out.add_term(self.aw.mul(omega, w), &c);
        }
        out
    }

    /// h · T_ω for ω of length zero.
    pub fn right_mul_omega(&self, h: &HeckeElement, omega: &ExtAffineElement) -> HeckeElement {
        let mut out = self.zero();
        for (w, c) in &h.terms {
            let c = match self.mu(&self.omega_part(w), omega) {
                Some(z) => c.scale(&z),
                None => c.clone(),
            };
            out.add_term(self.aw.mul(w, omega), &c);
        }
        out
    }

    /// T_x · h.
    pub fn left_mul_basis(&self, x: &ExtAffineElement, h: &HeckeElement) -> Result<HeckeElement> {
        let (word, omega) = self.aw.strip(x);
        let mut cur = self.left_mul_omega(&omega, h);
        for &i in word.iter().rev() {
            cur = self.left_mul_gen(i, &cur)?;
        }
        Ok(cur)
    }

    pub fn multiply(&self, a: &HeckeElement, b: &HeckeElement) -> Result<HeckeElement> {
        if a.tag != self.tag || b.tag != self.tag {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.zero();
        for (x, c) in &a.terms {
            let prod = self.left_mul_basis(x, b)?;
            for (w, d) in prod.terms {
                out.add_term(w, &d.mul(c));
            }
        }
        Ok(out)
    }

    /// h · T_w⁻¹.
    pub fn right_mul_basis_inverse(&self, h: &HeckeElement, w: &ExtAffineElement) -> Result<HeckeElement> {
        let (word, omega) = self.aw.strip(w);
        let omega_inv = self.aw.inv(&omega);
        let mut cur = self.right_mul_omega(h, &omega_inv);
        if let Some(z) = self.mu(&omega, &omega_inv) {
            let zi = z.inverse().expect("roots of unity are invertible");
            cur = cur.scale(&Laurent::monomial(zi, 0));
        }
        for &i in word.iter().rev() {
            cur = self.right_mul_inv_gen(&cur, i)?;
        }
        Ok(cur)
    }

    pub fn basis_inverse(&self, w: &ExtAffineElement) -> Result<HeckeElement> {
        self.right_mul_basis_inverse(&self.one(), w)
    }

    /// The v-exponent of q(w)^{1/2} = Π q_{s_i}^{1/2} over a reduced word.
    pub fn half_weight(&self, w: &ExtAffineElement) -> i64 {
        self.aw.strip(w).0.iter().map(|&i| self.params.exponents[i]).sum()
    }

    /// 2ρ^∨: the sum of the positive coroots.
    pub fn two_rho_check(&self) -> Vec<i64> {
        let mut out = vec![0; self.datum().rank()];
        for r in self.datum().positive_roots() {
            for (o, c) in out.iter_mut().zip(&r.coroot) {
                *o += c;
            }
        }
        out
    }

    pub fn is_dominant(&self, x: &[i64]) -> bool {
        self.datum().simple_roots().iter().all(|a| dot(a, x) >= 0)
    }

    /// Smallest k with x + k·2ρ^∨ dominant.
    pub fn dominant_shift(&self, x: &[i64]) -> usize {
        let rho = self.two_rho_check();
        (0..)
            .find(|&k| {
                let y: Vec<i64> = x.iter().zip(&rho).map(|(a, b)| a + b * k as i64).collect();
                self.is_dominant(&y)
            })
            .expect("2ρ^∨ pairs positively with every simple root")
    }

    /// θ_x = T̃_{t_{x₁}} T̃_{t_{x₂}}⁻¹ with x = x₁ − x₂, x₂ = k·2ρ^∨, T̃_w = q(w)^{−1/2} T_w.
    pub fn bernstein_theta_with_shift(&self, x: &[i64], k: usize) -> Result<HeckeElement> {
        let rho = self.two_rho_check();
        let x2: Vec<i64> = rho.iter().map(|r| r * k as i64).collect();
        let x1: Vec<i64> = x.iter().zip(&x2).map(|(a, b)| a + b).collect();
        if !self.is_dominant(&x1) {
            return Err(Error::InvalidInput(format!("shift {k} does not make {x:?} dominant")));
        }
        let t1 = ExtAffineElement::translation_by(self.datum(), x1);
        let t2 = ExtAffineElement::translation_by(self.datum(), x2);
        self.guard(&t1)?;
        self.guard(&t2)?;
        let norm = self.v_pow(self.half_weight(&t2) - self.half_weight(&t1));
        let start = self.basis(&t1).scale(&norm);
        self.right_mul_basis_inverse(&start, &t2)
    }

    pub fn bernstein_theta(&self, x: &[i64]) -> Result<HeckeElement> {
        if x.len() != self.datum().rank() {
            return Err(Error::InvalidInput(format!("cocharacter {x:?} has the wrong rank")));
        }
        self.bernstein_theta_with_shift(x, self.dominant_shift(x))
    }

    /// Σ θ_y over the W-orbit of x.
    pub fn symmetrized_theta(&self, x: &[i64]) -> Result<HeckeElement> {
        let w = weyl_group(self.datum())?;
        let orbit: HashSet<Vec<i64>> = w.elements().iter().map(|g| g.on_cocharacters.apply(x)).collect();
        let mut orbit: Vec<Vec<i64>> = orbit.into_iter().collect();
        orbit.sort();
        let mut out = self.zero();
        for y in orbit {
            out = out.add(&self.bernstein_theta(&y)?)?;
        }
        Ok(out)
    }

    /// Generators of the algebra: the T_s and the T_ω (or, for a datum with a
    /// central torus, the length-zero translations along a lattice basis of it).
    fn algebra_generators(&self) -> Result<Vec<(String, HeckeElement)>> {
        let mut out: Vec<(String, HeckeElement)> =
            (0..self.num_generators()).map(|i| (format!("T_s{i}"), self.generator(i))).collect();
        if self.datum().is_semisimple() {
            for (k, w) in self.aw.omega_group()?.iter().enumerate() {
                if !w.is_identity() {
                    out.push((format!("T_omega{k}"), self.basis(w)));
                }
            }
        } else {
            let rows: Vec<Vec<i64>> = self.datum().simple_roots().to_vec();
            let basis = if rows.is_empty() {
                (0..self.datum().rank())
                    .map(|i| (0..self.datum().rank()).map(|j| i64::from(i == j)).collect())
                    .collect()
            } else {
                integer_kernel(&IntMatrix::from_rows(&rows))
            };
            for y in basis {
                let t = ExtAffineElement::translation_by(self.datum(), y.clone());
                out.push((format!("T_t{y:?}"), self.basis(&t)));
            }
        }
        Ok(out)
    }

    pub fn verify_central(&self, z: &HeckeElement) -> Result<CentralityWitness> {
        let gens = self.algebra_generators()?;
        let mut failures = vec![];
        for (name, g) in &gens {
            let left = self.multiply(g, z)?;
            let right = self.multiply(z, g)?;
            if left != right {
                failures.push(name.clone());
            }
        }
        Ok(CentralityWitness { central: failures.is_empty(), generators_checked: gens.len(), failures })
    }

    fn word_product(&self, word: &[usize]) -> Result<HeckeElement> {
        let mut cur = self.one();
        for &i in word.iter().rev() {
            cur = self.left_mul_gen(i, &cur)?;
        }
        Ok(cur)
    }

    /// Quadratic, braid and Ω relations, and consistency of all products of
    /// generator words up to `max_len`.
    pub fn check_relations(&self, max_len: usize) -> Result<RelationReport> {
        let n = self.num_generators();
        let one = self.one();
        let mut quadratic = true;
        for i in 0..n {
            let t = self.generator(i);
            let q = self.q_of(i);
            let lhs = self.multiply(&t.add(&one)?, &t.sub(&self.scalar(&q))?)?;
            quadratic &= lhs.is_zero();
            let inv = self.basis_inverse(&self.aw.simple_reflections()[i])?;
            quadratic &= self.multiply(&t, &inv)? == one;
        }
        let mut braid = true;
        for i in 0..n {
            for j in i + 1..n {
                if let Some(m) = self.coxeter_order(i, j) {
                    let a: Vec<usize> = (0..m).map(|k| if k % 2 == 0 { i } else { j }).collect();
                    let b: Vec<usize> = (0..m).map(|k| if k % 2 == 0 { j } else { i }).collect();
                    braid &= self.word_product(&a)? == self.word_product(&b)?;
                }
            }
        }
        let mut omega_conjugation = true;
        if self.datum().is_semisimple() {
            for w in self.aw.omega_group()? {
                for i in 0..n {
                    let s = &self.aw.simple_reflections()[i];
                    let conj = self.aw.mul(&self.aw.mul(&w, s), &self.aw.inv(&w));
                    let lhs = self.right_mul_basis_inverse(&self.multiply(&self.basis(&w), &self.generator(i))?, &w)?;
                    omega_conjugation &= lhs == self.basis(&conj);
                }
            }
        }
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_len {
            let mut next = vec![];
            for w in &frontier {
                for i in 0..n {
                    let mut x: Vec<usize> = w.clone();
                    x.push(i);
                    next.push(x);
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        let products: HashMap<Vec<usize>, HeckeElement> =
            words.iter().map(|w| Ok((w.clone(), self.word_product(w)?))).collect::<Result<_>>()?;
        let mut reduced_words = true;
        let mut associativity = true;
        for w in &words {
            let g = w.iter().fold(self.aw.identity(), |acc, &i| self.aw.mul(&acc, &self.aw.simple_reflections()[i]));
            if g.length() == w.len() as u64 {
                reduced_words &= products[w] == self.basis(&g);
            }
            for cut in 1..w.len() {
                let (a, b) = w.split_at(cut);
                associativity &= self.multiply(&products[a], &products[b])? == products[w];
            }
        }
        Ok(RelationReport {
            quadratic,
            braid,
            omega_conjugation,
            reduced_words,
            associativity,
            words_checked: words.len(),
        })
    }

    /// Index of the simple affine reflection conjugate to s_{1−α} for the simple root α_i.
    fn companion_index(&self, i: usize) -> Option<usize> {
        let simple = &self.aw.simple_roots().roots;
        let start = AffineRoot::new(self.datum().simple_roots()[i].iter().map(|x| -x).collect(), 1);
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            if let Some(j) = simple.iter().position(|b| *b == a) {
                return Some(j);
            }
            if seen.len() > 10_000 {
                return None;
            }
            for s in self.aw.simple_reflections() {
                let b = s.act_root(&a);
                if seen.insert(b.clone()) {
                    queue.push_back(b);
                }
            }
        }
        None
    }

    /// (q_α, q_α*) as v-exponents for the simple root α_i: q(s) = q_α q_α*,
    /// q(s′) = q_α / q_α* when α ∈ 2X*, and q_α* = 1 otherwise.
    pub fn bernstein_exponents(&self, i: usize) -> (i64, i64) {
        let e = &self.params.exponents;
        let alpha = &self.datum().simple_roots()[i];
        if alpha.iter().all(|x| x % 2 == 0) {
            let j = self.companion_index(i).unwrap_or(i);
            (e[i] + e[j], e[i] - e[j])
        } else {
            (2 * e[i], 0)
        }
    }

    /// Checks (θ_x T_s − T_s θ_{s(x)})(1 − θ_{−2α^∨}) = (θ_x − θ_{s(x)})((q_α q_α* − 1) + θ_{−α^∨}(q_α − q_α*))
    /// for the simple root α_i.
    pub fn bernstein_relation_holds(&self, i: usize, x: &[i64]) -> Result<bool> {
        let root = self.datum().find_root(&self.datum().simple_roots()[i]).expect("simple root").clone();
        let sx = self.datum().coreflect(&root, x);
        let neg: Vec<i64> = root.coroot.iter().map(|c| -c).collect();
        let neg2: Vec<i64> = root.coroot.iter().map(|c| -2 * c).collect();
        let t = self.generator(i);
        let th_x = self.bernstein_theta(x)?;
        let th_sx = self.bernstein_theta(&sx)?;
        let lhs = self.multiply(&th_x, &t)?.sub(&self.multiply(&t, &th_sx)?)?;
        let lhs = self.multiply(&lhs, &self.one().sub(&self.bernstein_theta(&neg2)?)?)?;
        let (a, b) = self.bernstein_exponents(i);
        let qa = self.v_pow(a);
        let qs = self.v_pow(b);
        let c0 = qa.mul(&qs).sub(&self.laurent_one());
        let c1 = qa.sub(&qs);
        let factor = self.scalar(&c0).add(&self.bernstein_theta(&neg)?.scale(&c1))?;
        let rhs = self.multiply(&th_x.sub(&th_sx)?, &factor)?;
        Ok(lhs == rhs)
    }
}

/// Options for [`build_block_algebra`].
#[derive(Clone, Debug)]
pub struct BlockOptions {
    /// Size guard for the rank-one finite groups.
    pub oracle_bound: usize,
    /// Supplied parameters keyed by simple affine root index; these override the oracle.
    pub parameters: BTreeMap<usize, Rational>,
    /// Length ball for the derived system when J is nonempty.
    pub ball: u64,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions { oracle_bound: 1_000_000, parameters: BTreeMap::new(), ball: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParameterEntry {
    /// Index in the simple affine roots of the input datum (or of the block datum for generators).
    pub index: usize,
    pub root: Vec<i64>,
    pub offset: i64,
    pub kind: Option<String>,
    pub oracle_character: Option<String>,
    pub q: String,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BernsteinEntry {
    pub root: Vec<i64>,
    /// Exponents of q_F, possibly half-integers.
    pub q_alpha: String,
    pub q_alpha_star: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub facet: Vec<usize>,
    pub shape: String,
    pub candidates: Vec<ParameterEntry>,
    pub hecke_generators: Vec<ParameterEntry>,
    pub r_sigma: Vec<Vec<i64>>,
    pub r_dual: Vec<Vec<i64>>,
    pub weyl_order_sigma: usize,
    pub weyl_order_dual: usize,
    pub parameter_preserving: bool,
    pub gamma_order: usize,
    pub lattice_rank: usize,
    pub bernstein: Vec<BernsteinEntry>,
}

pub struct BlockAlgebra {
    pub algebra: ExtAffineHeckeAlgebra,
    pub report: BlockReport,
}

fn q_power_string(half_exponent: i64) -> String {
    match half_exponent {
        0 => "1".into(),
        2 => "q".into(),
        k if k % 2 == 0 => format!("q^{}", k / 2),
        k => format!("q^{k}/2"),
    }
}

/// Rank-one oracle: SL2 when α^∨ ∉ 2X_*, else PGL2 with the cocharacter α^∨/2.
fn rank_one_parameter(
    theta: &TorusCharacter,
    coroot: &[i64],
    q: u64,
    bound: usize,
    cache: &mut HashMap<(GroupKind, QmodZ), Rational>,
) -> Result<(GroupKind, QmodZ, Rational)> {
    let (kind, y): (GroupKind, Vec<i64>) = if coroot.iter().all(|c| c % 2 == 0) {
        (GroupKind::PGL2, coroot.iter().map(|c| c / 2).collect())
    } else {
        (GroupKind::SL2, coroot.to_vec())
    };
    let chi = pairing(theta, &y);
    if let Some(v) = cache.get(&(kind, chi)) {
        return Ok((kind, chi, *v));
    }
    let group = FiniteGroupOfLieType::build_bounded(kind, q, bound).map_err(|e| match e {
        Error::GroupTooLarge { bound } => Error::OracleTooLarge { bound },
        e => e,
    })?;
    let alg = hecke_fin(&group, &FiniteTorusCharacter(vec![chi]))?;
    let value = q_parameter(&alg)?;
    cache.insert((kind, chi), value);
    Ok((kind, chi, value))
}

fn is_split(frob: &FrobeniusAction) -> bool {
    frob.matrix().is_identity()
}

/// The Hecke algebra of the block attached to (J, θ).
///
/// For J = ∅ the parameters of every simple affine reflection fixing θ come
/// from the rank-one oracle; the algebra is H(R_θ, q) over X_*, extended by Γ.
/// For J ≠ ∅ the derived system must have rank one and the parameters of the
/// two R-elements must be supplied.
pub fn build_block_algebra(
    datum: &RootDatum,
    frob: &FrobeniusAction,
    theta: &TorusCharacter,
    j: &FacetType,
    options: &BlockOptions,
) -> Result<BlockAlgebra> {
    theta.validate(frob)?;
    if j.0.is_empty() {
        build_iwahori_block(datum, frob, theta, options)
    } else {
        build_rank_one_block(datum, frob, j, options)
    }
}

fn build_iwahori_block(
    datum: &RootDatum,
    frob: &FrobeniusAction,
    theta: &TorusCharacter,
    options: &BlockOptions,
) -> Result<BlockAlgebra> {
    let q = frob.q();
    let aw = AffineWeyl::new(datum);
    let mut cache = HashMap::new();
    let mut lookup = |index: usize, root: &[i64], offset: i64| -> Result<ParameterEntry> {
        let coroot = datum.coroot_of(root).expect("affine root has a root as linear part").to_vec();
        let (kind, chi, value) = match options.parameters.get(&index) {
            Some(v) => {
                return Ok(ParameterEntry {
                    index,
                    root: root.to_vec(),
                    offset,
                    kind: None,
                    oracle_character: None,
                    q: fmt_rational(v),
                    source: "supplied".into(),
                })
            }
            None if !is_split(frob) => {
                return Err(Error::UnrecognizedRankOneKind(format!(
                    "non-split Frobenius at affine root {index}; supply the parameter"
                )))
            }
            None => rank_one_parameter(theta, &coroot, q, options.oracle_bound, &mut cache)?,
        };
        Ok(ParameterEntry {
            index,
            root: root.to_vec(),
            offset,
            kind: Some(kind.to_string()),
            oracle_character: Some(fmt_rational(&chi.value())),
            q: fmt_rational(&value),
            source: "oracle".into(),
        })
    };

    let mut candidates = vec![];
    for (i, a) in aw.simple_roots().roots.iter().enumerate() {
        let r = datum.find_root(&a.root).expect("linear part is a root");
        // s_α θ = θ − ⟨θ, α^∨⟩α
        let c = pairing(theta, &r.coroot);
        if theta.values().iter().zip(&r.root).any(|(t, &x)| *t - c.times(x) != *t) {
            continue;
        }
        candidates.push(lookup(i, &a.root, a.offset)?);
    }

    let sub = singular_subsystem(datum, theta)?;
    let simple: Vec<Vec<i64>> = sub.simple.iter().map(|r| r.root.clone()).collect();
    let cosimple: Vec<Vec<i64>> = sub.simple.iter().map(|r| r.coroot.clone()).collect();
    let block_datum = RootDatum::new(datum.rank(), simple, cosimple)?;
    let block_aw = AffineWeyl::new(&block_datum);
    let mut generators = vec![];
    for (i, a) in block_aw.simple_roots().roots.iter().enumerate() {
        let source_index = aw.simple_roots().roots.iter().position(|b| b == a);
        let mut entry = lookup(source_index.unwrap_or(usize::MAX), &a.root, a.offset)?;
        entry.index = i;
        generators.push(entry);
    }
    let values: Vec<Rational> =
        generators.iter().map(|g| crate::qz::parse_rational(&g.q).expect("formatted rational")).collect();
    for c in &candidates {
        let v = crate::qz::parse_rational(&c.q).expect("formatted rational");
        let in_r_theta = sub.roots.iter().any(|r| r.root == c.root);
        if (v > Rational::one()) != in_r_theta {
            return Err(Error::InvariantViolation(format!(
                "affine root {} has q = {} but lies {} R_θ",
                c.index,
                c.q,
                if in_r_theta { "in" } else { "outside" }
            )));
        }
    }
    if values.iter().any(|v| *v <= Rational::one()) {
        return Err(Error::InvariantViolation("a generator of W_aff(R_θ) has q = 1".into()));
    }
    let params = ParameterFunction::from_values(&values, q)?;
    let algebra = ExtAffineHeckeAlgebra::new(&block_datum, params, q)?;
    let gamma_order = gamma_decomposition(datum, theta)?.gamma.len();
    let w_sigma = weyl_group(&block_datum)?.order();
    let w_dual = weyl_group(&block_datum.dual())?.order();
    let r_sigma: Vec<Vec<i64>> = block_datum.positive_roots().map(|r| r.root.clone()).collect();
    let r_dual: Vec<Vec<i64>> = block_datum.positive_roots().map(|r| r.coroot.clone()).collect();
    let bernstein = (0..block_datum.semisimple_rank())
        .map(|i| {
            let (a, b) = algebra.bernstein_exponents(i);
            BernsteinEntry {
                root: block_datum.simple_roots()[i].clone(),
                q_alpha: q_power_string(a),
                q_alpha_star: q_power_string(b),
            }
        })
        .collect();
    let shape = match (generators.is_empty(), gamma_order) {
        (true, _) => "twisted group algebra",
        (false, 1) => "affine Hecke algebra",
        (false, _) => "affine Hecke algebra extended by Gamma",
    };
    let report = BlockReport {
        facet: vec![],
        shape: shape.into(),
        candidates,
        hecke_generators: generators,
        parameter_preserving: w_sigma == w_dual && r_sigma.len() == r_dual.len(),
        r_sigma,
        r_dual,
        weyl_order_sigma: w_sigma,
        weyl_order_dual: w_dual,
        gamma_order,
        lattice_rank: datum.rank(),
        bernstein,
    };
    Ok(BlockAlgebra { algebra, report })
}

fn build_rank_one_block(
    datum: &RootDatum,
    frob: &FrobeniusAction,
    j: &FacetType,
    options: &BlockOptions,
) -> Result<BlockAlgebra> {
    let aw = AffineWeyl::new(datum);
    let derived = aw.derived_affine_system(j, options.ball, false)?;
    if derived.delta.len() != 2 {
        return Err(Error::DecompositionFailure(format!(
            "derived system has {} generators; only rank one is supported for J ≠ ∅",
            derived.delta.len()
        )));
    }
    let prod = aw.mul(&derived.generators[0], &derived.generators[1]);
    if prod.translation().iter().all(|&x| x == 0) {
        return Err(Error::DecompositionFailure("the two R-elements generate a finite group".into()));
    }
    let ss = datum.semisimple_rank();
    let mut order = derived.delta.clone();
    order.sort_by_key(|&i| (i >= ss, i));
    let mut entries = vec![];
    let mut values = vec![];
    for &i in &order {
        let v = options.parameters.get(&i).ok_or_else(|| {
            Error::UnrecognizedRankOneKind(format!("R-element for affine root {i}; supply its parameter"))
        })?;
        let a = &aw.simple_roots().roots[i];
        values.push(*v);
        entries.push(ParameterEntry {
            index: i,
            root: a.root.clone(),
            offset: a.offset,
            kind: None,
            oracle_character: None,
            q: fmt_rational(v),
            source: "supplied".into(),
        });
    }
    let model = RootDatum::simply_connected("A1")?;
    let params = ParameterFunction::from_values(&values, frob.q())?;
    let algebra = ExtAffineHeckeAlgebra::new(&model, params, frob.q())?;
    let (a, b) = algebra.bernstein_exponents(0);
    let generators: Vec<ParameterEntry> =
        entries.iter().filter(|e| crate::qz::parse_rational(&e.q).unwrap() > Rational::one()).cloned().collect();
    let report = BlockReport {
        facet: j.0.clone(),
        shape: if generators.is_empty() { "twisted group algebra" } else { "affine Hecke algebra" }.into(),
        candidates: entries,
        hecke_generators: generators,
        r_sigma: vec![model.simple_roots()[0].clone()],
        r_dual: vec![model.simple_coroots()[0].clone()],
        weyl_order_sigma: 2,
        weyl_order_dual: 2,
        parameter_preserving: true,
        gamma_order: 1,
        lattice_rank: 1,
        bernstein: vec![BernsteinEntry {
            root: model.simple_roots()[0].clone(),
            q_alpha: q_power_string(a),
            q_alpha_star: q_power_string(b),
        }],
    };
    Ok(BlockAlgebra { algebra, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1_sc(e: (i64, i64)) -> ExtAffineHeckeAlgebra {
        let d = RootDatum::simply_connected("A1").unwrap();
        ExtAffineHeckeAlgebra::new(&d, ParameterFunction::new(vec![e.0, e.1]), 3).unwrap()
    }

    #[test]
    fn a1_relations() {
        let alg = a1_sc((1, 1));
        let r = alg.check_relations(6).unwrap();
        assert!(r.all(), "{r:?}");
    }

    #[test]
    fn a1_unequal_relations() {
        let alg = a1_sc((3, 1));
        assert!(alg.check_relations(5).unwrap().all());
    }

    #[test]
    fn bernstein_relation_a1() {
        for e in [(1, 1), (3, 1), (2, 0)] {
            let alg = a1_sc(e);
            for x in -2..=2 {
                assert!(alg.bernstein_relation_holds(0, &[x]).unwrap(), "{e:?} x={x}");
            }
        }
        let d = RootDatum::adjoint("A1").unwrap();
        let alg = ExtAffineHeckeAlgebra::new(&d, ParameterFunction::equal(2, 1), 5).unwrap();
        for x in -2..=2 {
            assert!(alg.bernstein_relation_holds(0, &[x]).unwrap());
        }
    }

    fn c2_sc() -> ExtAffineHeckeAlgebra {
        let d = RootDatum::simply_connected("C2").unwrap();
        ExtAffineHeckeAlgebra::new(&d, ParameterFunction::new(vec![2, 3, 1]), 2).unwrap()
    }

    #[test]
    fn c2_relations_and_bernstein() {
        let alg = c2_sc();
        let r = alg.check_relations(4).unwrap();
        assert!(r.all(), "{r:?}");
        for i in 0..2 {
            for x in [[1, 0], [0, 1], [-1, 1]] {
                assert!(alg.bernstein_relation_holds(i, &x).unwrap(), "i={i} x={x:?}");
            }
        }
    }

    #[test]
    fn wrong_bernstein_parameters_fail() {
        let alg = a1_sc((3, 1));
        let t = alg.generator(0);
        let x = [1];
        let lhs = alg.multiply(&alg.bernstein_theta(&x).unwrap(), &t).unwrap();
        let rhs = alg.multiply(&t, &alg.bernstein_theta(&[-1]).unwrap()).unwrap();
        assert_ne!(lhs, rhs);
        // swapping the two parameters changes the right side
        let swapped = a1_sc((1, 3));
        assert_ne!(swapped.bernstein_exponents(0), alg.bernstein_exponents(0));
        assert_eq!(alg.bernstein_exponents(0), (4, 2));
    }

    #[test]
    fn adjoint_omega_relations() {
        let d = RootDatum::adjoint("A1").unwrap();
        let alg = ExtAffineHeckeAlgebra::new(&d, ParameterFunction::equal(2, 1), 3).unwrap();
        assert!(alg.check_relations(6).unwrap().all());
        assert!(ExtAffineHeckeAlgebra::new(&d, ParameterFunction::new(vec![1, 2]), 3).is_err());
    }

    #[test]
    fn twisted_omega() {
        let d = RootDatum::adjoint("A1").unwrap();
        let alg = ExtAffineHeckeAlgebra::new(&d, ParameterFunction::equal(2, 1), 3).unwrap();
        let table = vec![vec![QmodZ::zero(); 2], vec![QmodZ::zero(), QmodZ::from_frac(1, 2)]];
        let alg = alg.with_cocycle(table).unwrap();
        assert!(alg.check_relations(4).unwrap().all());
        let omega = alg.affine_weyl().omega_group().unwrap().into_iter().find(|w| !w.is_identity()).unwrap();
        let sq = alg.multiply(&alg.basis(&omega), &alg.basis(&omega)).unwrap();
        assert_eq!(sq, alg.one().scale(&alg.v_pow(0).neg()));
    }

    #[test]
    fn theta_is_decomposition_independent() {
        let alg = c2_sc();
        for x in [[1, -1], [0, 0], [-1, 0], [2, -1]] {
            let k = alg.dominant_shift(&x);
            assert_eq!(
                alg.bernstein_theta_with_shift(&x, k).unwrap(),
                alg.bernstein_theta_with_shift(&x, k + 1).unwrap()
            );
        }
        assert_eq!(alg.bernstein_theta(&[0, 0]).unwrap(), alg.one());
    }

    #[test]
    fn theta_dominant_is_normalized_basis() {
        let alg = a1_sc((2, 1));
        let t = ExtAffineElement::translation_by(alg.datum(), vec![2]);
        let expect = alg.basis(&t).scale(&alg.v_pow(-alg.half_weight(&t)));
        assert_eq!(alg.bernstein_theta(&[2]).unwrap(), expect);
    }

    #[test]
    fn symmetric_thetas_are_central() {
        let alg = a1_sc((1, 1));
        let z = alg.symmetrized_theta(&[1]).unwrap();
        assert!(alg.verify_central(&z).unwrap().central);
        let theta = alg.bernstein_theta(&[1]).unwrap();
        let w = alg.verify_central(&theta).unwrap();
        assert!(!w.central && !w.failures.is_empty());
        let c2 = c2_sc();
        let z = c2.symmetrized_theta(&[1, 0]).unwrap();
        assert!(c2.verify_central(&z).unwrap().central);
    }

    #[test]
    fn mixing_algebras_is_an_error() {
        let a = a1_sc((1, 1));
        let b = a1_sc((1, 1));
        assert_eq!(a.multiply(&a.one(), &b.one()), Err(Error::AlgebraMismatch));
    }

    #[test]
    fn laurent_evaluation() {
        let f = CyclotomicField::new(1);
        let p = Laurent::v_pow(&f, 4).sub(&Laurent::v_pow(&f, 0));
        assert_eq!(p.at_even(Rational::from_integer(3)).unwrap().as_rational(), Some(Rational::from_integer(8)));
        assert_eq!(p.to_string(), "1*v^4 + -1");
        assert!(Laurent::v_pow(&f, 1).at_even(Rational::one()).is_none());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn theta_multiplicative_a1(x in -2i64..=2, y in -2i64..=2, e0 in 0i64..3, e1 in 0i64..3) {
            let alg = a1_sc((e0, e1));
            let lhs = alg.multiply(&alg.bernstein_theta(&[x]).unwrap(), &alg.bernstein_theta(&[y]).unwrap()).unwrap();
            proptest::prop_assert_eq!(lhs, alg.bernstein_theta(&[x + y]).unwrap());
        }

        #[test]
        fn theta_multiplicative_c2(x in proptest::collection::vec(-1i64..=1, 2), y in proptest::collection::vec(-1i64..=1, 2)) {
            let alg = c2_sc();
            let lhs = alg.multiply(&alg.bernstein_theta(&x).unwrap(), &alg.bernstein_theta(&y).unwrap()).unwrap();
            let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            proptest::prop_assert_eq!(lhs, alg.bernstein_theta(&sum).unwrap());
        }
    }

    fn split_block(kind: &str, sc: bool, theta: TorusCharacter, q: u64) -> Result<BlockAlgebra> {
        let d = if sc { RootDatum::simply_connected(kind) } else { RootDatum::adjoint(kind) }.unwrap();
        let f = FrobeniusAction::split(&d, q).unwrap();
        build_block_algebra(&d, &f, &theta, &FacetType(vec![]), &BlockOptions::default())
    }

    #[test]
    fn sl2_trivial_block() {
        let b = split_block("A1", true, TorusCharacter::zero(1), 5).unwrap();
        assert_eq!(b.report.shape, "affine Hecke algebra");
        assert_eq!(b.report.hecke_generators.len(), 2);
        assert!(b.report.hecke_generators.iter().all(|g| g.q == "5"));
        assert_eq!(b.algebra.parameters().exponents, vec![1, 1]);
        assert!(b.algebra.check_relations(4).unwrap().all());
        assert_eq!(b.report.weyl_order_sigma, b.report.weyl_order_dual);
    }

    #[test]
    fn sl2_legendre_block() {
        for q in [3, 5, 7] {
            let b = split_block("A1", true, TorusCharacter::new(&[1], 2).unwrap(), q).unwrap();
            assert_eq!(b.report.shape, "twisted group algebra");
            assert!(b.report.hecke_generators.is_empty());
            assert_eq!(b.report.candidates.len(), 2);
            assert!(b.report.candidates.iter().all(|c| c.q == "1" && c.kind.as_deref() == Some("SL2")));
            assert_eq!(b.report.gamma_order, 2);
            assert!(b.report.r_sigma.is_empty() && b.report.r_dual.is_empty());
        }
    }

    #[test]
    fn pgl2_blocks() {
        let b = split_block("A1", false, TorusCharacter::zero(1), 3).unwrap();
        assert!(b.report.candidates.iter().all(|c| c.kind.as_deref() == Some("PGL2") && c.q == "3"));
        // quadratic θ on PGL2 still has q_s = q
        let b = split_block("A1", false, TorusCharacter::new(&[1], 2).unwrap(), 5).unwrap();
        assert_eq!(b.report.hecke_generators.len(), 2);
    }

    #[test]
    fn regular_character_gives_lattice_algebra() {
        let b = split_block("A2", true, TorusCharacter::new(&[1, 1], 4).unwrap(), 5).unwrap();
        assert!(b.report.candidates.is_empty());
        assert_eq!(b.report.shape, "twisted group algebra");
        assert_eq!(b.report.gamma_order, 1);
    }

    #[test]
    fn c2_unequal_rank_one_block() {
        let d = RootDatum::simply_connected("C2").unwrap();
        let f = FrobeniusAction::split(&d, 2).unwrap();
        let mut opts = BlockOptions::default();
        opts.parameters.insert(2, Rational::from_integer(2));
        opts.parameters.insert(1, Rational::from_integer(8));
        let b = build_block_algebra(&d, &f, &TorusCharacter::zero(2), &FacetType(vec![0]), &opts).unwrap();
        assert_eq!(b.algebra.parameters().exponents, vec![3, 1]);
        assert_eq!(b.report.bernstein[0].q_alpha, "q^2");
        assert_eq!(b.report.bernstein[0].q_alpha_star, "q");
        assert!(b.algebra.bernstein_relation_holds(0, &[1]).unwrap());
        opts.parameters.clear();
        let e = build_block_algebra(&d, &f, &TorusCharacter::zero(2), &FacetType(vec![0]), &opts);
        assert!(matches!(e, Err(Error::UnrecognizedRankOneKind(_))));
    }

    #[test]
    fn nonsplit_needs_parameters() {
        let d = RootDatum::simply_connected("A2").unwrap();
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let f = FrobeniusAction::new(&d, swap, 2).unwrap();
        let e = build_block_algebra(&d, &f, &TorusCharacter::zero(2), &FacetType(vec![]), &BlockOptions::default());
        assert!(matches!(e, Err(Error::UnrecognizedRankOneKind(_))));
    }

    #[test]
    fn oracle_guard() {
        let d = RootDatum::simply_connected("A1").unwrap();
        let f = FrobeniusAction::split(&d, 7).unwrap();
        let opts = BlockOptions { oracle_bound: 10, ..BlockOptions::default() };
        let e = build_block_algebra(&d, &f, &TorusCharacter::zero(1), &FacetType(vec![]), &opts);
        assert!(matches!(e, Err(Error::OracleTooLarge { .. })));
    }
}
