//! Twisted graded Hecke algebras H(t, W(R) ⋊ Γ, k, ♮) and the passage from
//! affine parameters (q, q*) to graded parameters k.
//!
//! Parameters are rational multiples of a formal central unit r = log q_F^{1/2},
//! so every identity is checked over ℚ(ζ_N)[r].

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cyclotomic::{Cyclotomic, CyclotomicField};
use crate::error::{Error, Result};
use crate::extensions::{Cocycle2, CoefficientGroup, FiniteGroup};
use crate::hecke::ExtAffineHeckeAlgebra;
use crate::intmat::IntMatrix;
use crate::qz::{exact_log, fmt_rational, lcm_all, QmodZ, Rational};
use crate::rootdata::{Root, RootDatum};

static NEXT_TAG: AtomicU64 = AtomicU64::new(1);

const MAX_GROUP: usize = 100_000;

fn signed_log(x: &Rational, base: u64) -> Option<Rational> {
    if *x >= Rational::one() {
        exact_log(x, base).map(|e| Rational::from_integer(i64::from(e)))
    } else if *x > Rational::zero() {
        exact_log(&x.recip(), base).map(|e| -Rational::from_integer(i64::from(e)))
    } else {
        None
    }
}

/// (λ, λ*) with q·q* = q_F^λ and q/q* = q_F^{λ*}.
pub fn lambda_exponents(q: Rational, q_star: Rational, q_f: u64) -> Result<(Rational, Rational)> {
    let not_power = |v: Rational| Error::NotAPower { value: fmt_rational(&v), base: q_f };
    signed_log(&q, q_f).ok_or_else(|| not_power(q))?;
    signed_log(&q_star, q_f).ok_or_else(|| not_power(q_star))?;
    let lambda = signed_log(&(q * q_star), q_f).ok_or_else(|| not_power(q * q_star))?;
    let lambda_star = signed_log(&(q / q_star), q_f).ok_or_else(|| not_power(q / q_star))?;
    Ok((lambda, lambda_star))
}

/// k_α as a multiple of r: log q for sign +1 and log q* for sign −1, checked
/// against r(λ + sign·λ*).
pub fn k_parameters(q: Rational, q_star: Rational, sign: i8, q_f: u64) -> Result<Rational> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidInput(format!("sign must be ±1, got {sign}")));
    }
    let (lambda, lambda_star) = lambda_exponents(q, q_star, q_f)?;
    // log x = 2r·log_{q_F} x
    let chosen = if sign == 1 { q } else { q_star };
    let direct = signed_log(&chosen, q_f).expect("checked above") * Rational::from_integer(2);
    let closed = lambda + Rational::from_integer(i64::from(sign)) * lambda_star;
    if direct != closed {
        return Err(Error::InvariantViolation(format!("k = {direct}·r but r(λ ± λ*) = {closed}·r")));
    }
    Ok(direct)
}

/// Polynomials in the coordinates of t and r; the last exponent slot is r.
pub type Poly = BTreeMap<Vec<u32>, Cyclotomic>;

fn poly_add_term(p: &mut Poly, m: Vec<u32>, c: &Cyclotomic) {
    if c.is_zero() {
        return;
    }
    match p.get_mut(&m) {
        Some(e) => {
            *e += c;
            if e.is_zero() {
                p.remove(&m);
            }
        }
        None => {
            p.insert(m, c.clone());
        }
    }
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (m, c) in b {
        poly_add_term(&mut out, m.clone(), c);
    }
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (m, c) in b {
        poly_add_term(&mut out, m.clone(), &-c);
    }
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (m, c) in a {
        for (n, d) in b {
            let e: Vec<u32> = m.iter().zip(n).map(|(x, y)| x + y).collect();
            poly_add_term(&mut out, e, &(c * d));
        }
    }
    out
}

fn poly_scale(a: &Poly, c: &Cyclotomic) -> Poly {
    let mut out = Poly::new();
    for (m, d) in a {
        poly_add_term(&mut out, m.clone(), &(d * c));
    }
    out
}

/// A twisted graded Hecke algebra.
///
/// Normal form Σ f_w N_w with f_w polynomial; N_s f = (s f) N_s + k_α (f − s f)/α
/// for simple reflections, N_γ f = (γ f) N_γ and N_w N_u = ♮(γ_w, γ_u) N_{wu}.
pub struct GradedHeckeAlgebra {
    tag: u64,
    datum: RootDatum,
    field: CyclotomicField,
    /// k on each positive root, as a multiple of r.
    k: HashMap<Vec<i64>, Rational>,
    simple: Vec<Root>,
    elements: Vec<IntMatrix>,
    index: HashMap<Vec<Vec<i64>>, usize>,
    /// w = s_{i1} ⋯ s_{ik} · γ.
    words: Vec<(Vec<usize>, usize)>,
    gamma: Vec<IntMatrix>,
    natural: Option<Cocycle2>,
}

/// Σ f_w N_w.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement {
    tag: u64,
    terms: BTreeMap<usize, Poly>,
}

impl GradedElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<usize, Poly> {
        &self.terms
    }

    fn add_poly(&mut self, w: usize, f: &Poly) {
        let e = self.terms.entry(w).or_default();
        *e = poly_add(e, f);
        if e.is_empty() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &GradedElement) -> Result<GradedElement> {
        if self.tag != other.tag {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.clone();
        for (w, f) in &other.terms {
            out.add_poly(*w, f);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedElement) -> Result<GradedElement> {
        if self.tag != other.tag {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.clone();
        for (w, f) in &other.terms {
            let neg: Poly = f.iter().map(|(m, c)| (m.clone(), -c)).collect();
            out.add_poly(*w, &neg);
        }
        Ok(out)
    }
}

/// Checks of the presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresentationReport {
    pub cross_relation: bool,
    pub involutions: bool,
    pub braid: bool,
    pub associativity: bool,
    pub symmetric_central: bool,
    pub max_degree: u32,
}

impl PresentationReport {
    pub fn all(&self) -> bool {
        self.cross_relation && self.involutions && self.braid && self.associativity && self.symmetric_central
    }
}

/// Output of [`decompose`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Positive roots of R′ = {α : k_α ≠ 0}.
    pub core_roots: Vec<Vec<i64>>,
    pub core_parameters: Vec<String>,
    pub core_weyl_order: usize,
    pub gamma_prime_order: usize,
    pub gamma_prime_stabilizes_positive: bool,
    /// Products of normal-form basis elements agree in both presentations.
    pub crossed_product_certificate: bool,
    pub group_order: usize,
}

impl GradedHeckeAlgebra {
    /// `k` is given on the simple roots and extended W-invariantly; `gamma`
    /// must stabilize the positive roots; `natural` is a normalized 2-cocycle on
    /// Γ indexed by the order of `gamma` (identity first).
    pub fn new(
        datum: &RootDatum,
        k: &[Rational],
        gamma: Vec<IntMatrix>,
        natural: Option<Vec<Vec<QmodZ>>>,
    ) -> Result<Self> {
        let n = datum.rank();
        let ss = datum.semisimple_rank();
        if k.len() != ss {
            return Err(Error::InvalidInput(format!("{} parameters for {ss} simple roots", k.len())));
        }
        let simple: Vec<Root> =
            datum.simple_roots().iter().map(|a| datum.find_root(a).expect("simple root").clone()).collect();
        let gamma = if gamma.is_empty() { vec![IntMatrix::identity(n)] } else { gamma };
        if !gamma[0].is_identity() {
            return Err(Error::InvalidInput("the first element of Γ must be the identity".into()));
        }
        let positive: HashSet<Vec<i64>> = datum.positive_roots().map(|r| r.root.clone()).collect();
        for g in &gamma {
            if positive.iter().any(|r| !positive.contains(&g.apply(r))) {
                return Err(Error::InvalidInput("Γ does not stabilize the positive roots".into()));
            }
        }

        // k on all roots through W-orbits of the simple roots
        let reflections: Vec<IntMatrix> = simple.iter().map(|r| datum.reflection_matrix(r)).collect();
        let mut kmap: HashMap<Vec<i64>, Rational> = HashMap::new();
        for (i, r) in simple.iter().enumerate() {
            let mut queue = VecDeque::from([r.root.clone()]);
            while let Some(a) = queue.pop_front() {
                match kmap.get(&a) {
                    Some(v) if *v != k[i] => {
                        return Err(Error::InvalidInput(format!("k is not W-invariant at the root {a:?}")));
                    }
                    Some(_) => continue,
                    None => {
                        kmap.insert(a.clone(), k[i]);
                    }
                }
                for s in reflections.iter().chain(&gamma) {
                    queue.push_back(s.apply(&a));
                }
            }
        }
        let k: HashMap<Vec<i64>, Rational> = kmap.into_iter().filter(|(a, _)| positive.contains(a)).collect();

        // W(R) with words, then W = W(R)·Γ
        let mut core: Vec<(IntMatrix, Vec<usize>)> = vec![(IntMatrix::identity(n), vec![])];
        let mut seen: HashSet<Vec<Vec<i64>>> = HashSet::from([IntMatrix::identity(n).to_rows()]);
        let mut at = 0;
        while at < core.len() {
            for (i, s) in reflections.iter().enumerate() {
                let x = s.mul(&core[at].0);
                if seen.insert(x.to_rows()) {
                    if core.len() >= MAX_GROUP {
                        return Err(Error::GroupTooLarge { bound: MAX_GROUP });
                    }
                    let mut word = vec![i];
                    word.extend(&core[at].1);
                    core.push((x, word));
                }
            }
            at += 1;
        }
        let mut elements = vec![];
        let mut words = vec![];
        let mut index = HashMap::new();
        for (gi, g) in gamma.iter().enumerate() {
            for (u, word) in &core {
                let w = u.mul(g);
                if index.insert(w.to_rows(), elements.len()).is_some() {
                    return Err(Error::InvalidInput("Γ meets W(R) nontrivially".into()));
                }
                elements.push(w);
                words.push((word.clone(), gi));
            }
        }

        let (natural, field) = match natural {
            None => (None, CyclotomicField::new(1)),
            Some(table) => {
                let gindex: HashMap<Vec<Vec<i64>>, usize> =
                    gamma.iter().enumerate().map(|(i, g)| (g.to_rows(), i)).collect();
                let mult = gamma
                    .iter()
                    .map(|a| {
                        gamma
                            .iter()
                            .map(|b| {
                                gindex
                                    .get(&a.mul(b).to_rows())
                                    .copied()
                                    .ok_or_else(|| Error::InvalidInput("Γ is not closed".into()))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let group = Arc::new(FiniteGroup::from_table(mult)?);
                if table.len() != gamma.len() || table.iter().any(|r| r.len() != gamma.len()) {
                    return Err(Error::InvalidInput(format!("♮ must be a {0}×{0} table", gamma.len())));
                }
                let values = table.into_iter().map(|r| r.into_iter().map(|x| vec![x]).collect()).collect();
                let c = Cocycle2::new(group, CoefficientGroup::roots_of_unity(), values)?;
                if (0..gamma.len()).any(|x| !c.value(0, x)[0].is_zero() || !c.value(x, 0)[0].is_zero()) {
                    return Err(Error::InvalidInput("♮ must be normalized".into()));
                }
                let order = lcm_all(c.table().iter().flatten().map(|v| v[0].order()));
                (Some(c), CyclotomicField::new(order as u32))
            }
        };

        Ok(GradedHeckeAlgebra {
            tag: NEXT_TAG.fetch_add(1, Ordering::Relaxed),
            datum: datum.clone(),
            field,
            k,
            simple,
            elements,
            index,
            words,
            gamma,
            natural,
        })
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn group_order(&self) -> usize {
        self.elements.len()
    }

    pub fn gamma_order(&self) -> usize {
        self.gamma.len()
    }

    pub fn element_matrix(&self, w: usize) -> &IntMatrix {
        &self.elements[w]
    }

    pub fn position(&self, m: &IntMatrix) -> Option<usize> {
        self.index.get(&m.to_rows()).copied()
    }

    pub fn k_of(&self, root: &[i64]) -> Rational {
        let key: Vec<i64> = if self.k.contains_key(root) { root.to_vec() } else { root.iter().map(|x| -x).collect() };
        self.k.get(&key).copied().unwrap_or_else(Rational::zero)
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    fn nvars(&self) -> usize {
        self.datum.rank() + 1
    }

    /// The linear form λ ∈ t* as a polynomial.
    pub fn linear(&self, lambda: &[i64]) -> Poly {
        let mut p = Poly::new();
        for (j, &c) in lambda.iter().enumerate() {
            let mut m = vec![0; self.nvars()];
            m[j] = 1;
            poly_add_term(&mut p, m, &self.field.from_rational(Rational::from_integer(c)));
        }
        p
    }

    pub fn constant(&self, c: Rational) -> Poly {
        let mut p = Poly::new();
        poly_add_term(&mut p, vec![0; self.nvars()], &self.field.from_rational(c));
        p
    }

    /// c·r.
    pub fn r_multiple(&self, c: Rational) -> Poly {
        let mut p = Poly::new();
        let mut m = vec![0; self.nvars()];
        m[self.datum.rank()] = 1;
        poly_add_term(&mut p, m, &self.field.from_rational(c));
        p
    }

    /// w·f with (w·x_j) the j-th column of the character matrix of w.
    pub fn act(&self, m: &IntMatrix, f: &Poly) -> Poly {
        let n = self.datum.rank();
        let images: Vec<Poly> = (0..n).map(|j| self.linear(&m.col(j))).collect();
        let mut out = Poly::new();
        for (mono, c) in f {
            let mut term = Poly::new();
            let mut r = vec![0; self.nvars()];
            r[n] = mono[n];
            poly_add_term(&mut term, r, c);
            for j in 0..n {
                for _ in 0..mono[j] {
                    term = poly_mul(&term, &images[j]);
                }
            }
            out = poly_add(&out, &term);
        }
        out
    }

    /// (f − s_α f)/α, computed by the twisted Leibniz rule.
    pub fn divided_difference(&self, root: &Root, f: &Poly) -> Poly {
        let n = self.datum.rank();
        let s = self.datum.reflection_matrix(root);
        let mut out = Poly::new();
        for (mono, c) in f {
            // peel one variable at a time: Δ(x_j m) = ⟨x_j, α^∨⟩ m + (s x_j) Δ(m)
            let mut vars = vec![];
            for j in 0..n {
                for _ in 0..mono[j] {
                    vars.push(j);
                }
            }
            let mut r = vec![0; self.nvars()];
            r[n] = mono[n];
            let mut tail = Poly::new();
            poly_add_term(&mut tail, r.clone(), c);
            let mut delta = Poly::new();
            for &j in vars.iter().rev() {
                let xj = self.linear(&(0..n).map(|i| i64::from(i == j)).collect::<Vec<_>>());
                let sxj = self.linear(&s.col(j));
                let coeff = self.field.from_rational(Rational::from_integer(root.coroot[j]));
                delta = poly_add(&poly_scale(&tail, &coeff), &poly_mul(&sxj, &delta));
                tail = poly_mul(&xj, &tail);
            }
            out = poly_add(&out, &delta);
        }
        out
    }

    pub fn zero(&self) -> GradedElement {
        GradedElement { tag: self.tag, terms: BTreeMap::new() }
    }

    pub fn from_poly(&self, f: Poly) -> GradedElement {
        let mut out = self.zero();
        out.add_poly(self.identity_index(), &f);
        out
    }

    pub fn one(&self) -> GradedElement {
        self.from_poly(self.constant(Rational::one()))
    }

    fn identity_index(&self) -> usize {
        0
    }

    pub fn group_element(&self, w: usize) -> GradedElement {
        let mut out = self.zero();
        out.add_poly(w, &self.constant(Rational::one()));
        out
    }

    /// N_s for the i-th simple root.
    pub fn simple_element(&self, i: usize) -> GradedElement {
        let w = self.position(&self.datum.reflection_matrix(&self.simple[i])).expect("simple reflection");
        self.group_element(w)
    }

    fn gamma_part(&self, w: usize) -> usize {
        self.words[w].1
    }

    fn natural_phase(&self, a: usize, b: usize) -> Option<Cyclotomic> {
        let c = self.natural.as_ref()?;
        let v = c.value(a, b)[0];
        if v.is_zero() {
            None
        } else {
            self.field.root_of_unity(v)
        }
    }

    fn left_mul_simple(&self, i: usize, h: &GradedElement) -> GradedElement {
        let root = &self.simple[i];
        let s = self.datum.reflection_matrix(root);
        let k = self.k_of(&root.root);
        let mut out = self.zero();
        for (&v, f) in &h.terms {
            let sv = self.position(&s.mul(&self.elements[v])).expect("closed");
            out.add_poly(sv, &self.act(&s, f));
            if !k.is_zero() {
                let d = poly_mul(&self.r_multiple(k), &self.divided_difference(root, f));
                out.add_poly(v, &d);
            }
        }
        out
    }

    fn left_mul_gamma(&self, g: usize, h: &GradedElement) -> GradedElement {
        let m = &self.gamma[g];
        let mut out = self.zero();
        for (&v, f) in &h.terms {
            let gv = self.position(&m.mul(&self.elements[v])).expect("closed");
            let mut f = self.act(m, f);
            if let Some(z) = self.natural_phase(g, self.gamma_part(v)) {
                f = poly_scale(&f, &z);
            }
            out.add_poly(gv, &f);
        }
        out
    }

    /// N_w · h.
    pub fn left_mul_group(&self, w: usize, h: &GradedElement) -> GradedElement {
        let (word, g) = &self.words[w];
        let mut cur = self.left_mul_gamma(*g, h);
        for &i in word.iter().rev() {
            cur = self.left_mul_simple(i, &cur);
        }
        cur
    }

    pub fn multiply(&self, a: &GradedElement, b: &GradedElement) -> Result<GradedElement> {
        if a.tag != self.tag || b.tag != self.tag {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.zero();
        for (&w, f) in &a.terms {
            let prod = self.left_mul_group(w, b);
            for (v, g) in prod.terms {
                out.add_poly(v, &poly_mul(f, &g));
            }
        }
        Ok(out)
    }

    fn monomials(&self, max_degree: u32) -> Vec<Poly> {
        let n = self.datum.rank();
        let mut out = vec![];
        let mut stack: Vec<Vec<u32>> = vec![vec![]];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == n {
                let mut m = prefix.clone();
                m.push(0);
                let mut p = Poly::new();
                poly_add_term(&mut p, m, &self.field.one());
                out.push(p);
                continue;
            }
            let used: u32 = prefix.iter().sum();
            for e in 0..=max_degree - used {
                let mut next = prefix.clone();
                next.push(e);
                stack.push(next);
            }
        }
        out
    }

    /// The polynomial representation: N_s ↦ s + k_α Δ_α, N_γ ↦ γ, f ↦ f·.
    fn rep_simple(&self, i: usize, g: &Poly) -> Poly {
        let root = &self.simple[i];
        let s = self.datum.reflection_matrix(root);
        let k = self.k_of(&root.root);
        poly_add(&self.act(&s, g), &poly_mul(&self.r_multiple(k), &self.divided_difference(root, g)))
    }

    /// Cross relation, N_s² = 1 and braid relations as operators on polynomials
    /// of degree ≤ `max_degree`, associativity on basis triples, and centrality of
    /// symmetrized monomials of degree ≤ min(max_degree, 4).
    pub fn verify_presentation(&self, max_degree: u32) -> Result<PresentationReport> {
        let monos = self.monomials(max_degree);
        let small = self.monomials(max_degree.min(2));
        let ss = self.simple.len();

        let mut cross_relation = true;
        for i in 0..ss {
            let root = &self.simple[i];
            let s = self.datum.reflection_matrix(root);
            let k = self.r_multiple(self.k_of(&root.root));
            for f in &small {
                let df = poly_mul(&k, &self.divided_difference(root, f));
                for g in &monos {
                    let lhs = poly_sub(
                        &self.rep_simple(i, &poly_mul(f, g)),
                        &poly_mul(&self.act(&s, f), &self.rep_simple(i, g)),
                    );
                    cross_relation &= lhs == poly_mul(&df, g);
                }
            }
        }

        let mut involutions = true;
        for i in 0..ss {
            for g in &monos {
                involutions &= self.rep_simple(i, &self.rep_simple(i, g)) == *g;
            }
        }

        let mut braid = true;
        for i in 0..ss {
            for j in i + 1..ss {
                let si = self.datum.reflection_matrix(&self.simple[i]);
                let sj = self.datum.reflection_matrix(&self.simple[j]);
                let p = si.mul(&sj);
                let mut cur = p.clone();
                let mut m = 1;
                while !cur.is_identity() {
                    cur = cur.mul(&p);
                    m += 1;
                }
                for g in &monos {
                    let mut a = g.clone();
                    let mut b = g.clone();
                    for t in 0..m {
                        a = self.rep_simple(if t % 2 == 0 { i } else { j }, &a);
                        b = self.rep_simple(if t % 2 == 0 { j } else { i }, &b);
                    }
                    braid &= a == b;
                }
            }
        }

        let mut associativity = true;
        let lin: Vec<GradedElement> = (0..self.datum.rank())
            .map(|j| {
                self.from_poly(self.linear(&(0..self.datum.rank()).map(|i| i64::from(i == j)).collect::<Vec<_>>()))
            })
            .collect();
        let sample: Vec<GradedElement> =
            (0..self.group_order()).map(|w| self.group_element(w)).chain(lin.iter().cloned()).take(24).collect();
        for a in &sample {
            for b in &sample {
                let ab = self.multiply(a, b)?;
                for c in lin.iter().chain(sample.iter().take(4)) {
                    associativity &= self.multiply(&ab, c)? == self.multiply(a, &self.multiply(b, c)?)?;
                }
            }
        }

        let mut symmetric_central = true;
        for f in self.monomials(max_degree.min(4)) {
            let mut sym = Poly::new();
            for w in &self.elements {
                sym = poly_add(&sym, &self.act(w, &f));
            }
            let z = self.from_poly(sym);
            for w in 0..self.group_order() {
                let n = self.group_element(w);
                symmetric_central &= self.multiply(&n, &z)? == self.multiply(&z, &n)?;
            }
        }

        Ok(PresentationReport { cross_relation, involutions, braid, associativity, symmetric_central, max_degree })
    }
}

/// H = H(R′, k) ⋊ ℂ[Γ′, ♮] with R′ = {α : k_α ≠ 0} and Γ′ the stabilizer of R′⁺.
pub fn decompose(alg: &GradedHeckeAlgebra) -> Result<(GradedHeckeAlgebra, Decomposition)> {
    let datum = &alg.datum;
    let core: Vec<Root> = datum.positive_roots().filter(|r| !alg.k_of(&r.root).is_zero()).cloned().collect();
    let core_set: HashSet<Vec<i64>> = core.iter().map(|r| r.root.clone()).collect();
    let simple: Vec<Root> = core
        .iter()
        .filter(|b| {
            !core.iter().any(|a| {
                let rest: Vec<i64> = b.root.iter().zip(&a.root).map(|(x, y)| x - y).collect();
                core_set.contains(&rest)
            })
        })
        .cloned()
        .collect();
    let core_datum = RootDatum::new(
        datum.rank(),
        simple.iter().map(|r| r.root.clone()).collect(),
        simple.iter().map(|r| r.coroot.clone()).collect(),
    )?;
    let k: Vec<Rational> = simple.iter().map(|r| alg.k_of(&r.root)).collect();
    let mut gamma_idx: Vec<usize> = (0..alg.group_order())
        .filter(|&w| core_set.iter().all(|r| core_set.contains(&alg.elements[w].apply(r))))
        .collect();
    gamma_idx.sort_by_key(|&w| !alg.elements[w].is_identity());
    let gamma: Vec<IntMatrix> = gamma_idx.iter().map(|&w| alg.elements[w].clone()).collect();
    let natural = alg.natural.as_ref().map(|c| {
        gamma_idx
            .iter()
            .map(|&a| gamma_idx.iter().map(|&b| c.value(alg.gamma_part(a), alg.gamma_part(b))[0]).collect())
            .collect()
    });
    let stabilizes = gamma.iter().all(|g| core_set.iter().all(|r| core_set.contains(&g.apply(r))));
    let out = GradedHeckeAlgebra::new(&core_datum, &k, gamma, natural)?;

    // the identity on f·N_w must be an isomorphism of algebras
    let mut certificate = out.group_order() == alg.group_order();
    if certificate {
        let transfer = |x: &GradedElement, from: &GradedHeckeAlgebra, to: &GradedHeckeAlgebra| -> GradedElement {
            let mut y = to.zero();
            for (&w, f) in &x.terms {
                y.add_poly(to.position(&from.elements[w]).expect("same group"), f);
            }
            y
        };
        let n = datum.rank();
        let mut sample: Vec<GradedElement> = (0..alg.group_order()).map(|w| alg.group_element(w)).collect();
        for j in 0..n {
            sample.push(alg.from_poly(alg.linear(&(0..n).map(|i| i64::from(i == j)).collect::<Vec<_>>())));
        }
        for a in &sample {
            for b in &sample {
                let direct = alg.multiply(a, b)?;
                let via = out.multiply(&transfer(a, alg, &out), &transfer(b, alg, &out))?;
                certificate &= transfer(&direct, alg, &out) == via;
            }
        }
    }
    let report = Decomposition {
        core_roots: out.datum.positive_roots().map(|r| r.root.clone()).collect(),
        core_parameters: k.iter().map(|c| format!("{}*r", fmt_rational(c))).collect(),
        core_weyl_order: out.group_order() / out.gamma_order(),
        gamma_prime_order: out.gamma_order(),
        gamma_prime_stabilizes_positive: stabilizes,
        crossed_product_certificate: certificate,
        group_order: alg.group_order(),
    };
    Ok((out, report))
}

/// The graded algebra of an affine Hecke algebra at a real central character:
/// k_α = r(λ + X_α λ*) from the Bernstein parameters of each simple root.
pub fn from_affine(alg: &ExtAffineHeckeAlgebra, signs: &[i8]) -> Result<GradedHeckeAlgebra> {
    let datum = alg.datum();
    let ss = datum.semisimple_rank();
    if signs.len() != ss {
        return Err(Error::InvalidInput(format!("{} signs for {ss} simple roots", signs.len())));
    }
    let k = (0..ss)
        .map(|i| {
            // v-exponents: q_α = v^a, q_α* = v^b, so λ = (a + b)/2 and λ* = (a − b)/2
            let (a, b) = alg.bernstein_exponents(i);
            if signs[i] != 1 && signs[i] != -1 {
                return Err(Error::InvalidInput(format!("sign must be ±1, got {}", signs[i])));
            }
            let half = Rational::new(1, 2);
            let lambda = Rational::from_integer(a + b) * half;
            let lambda_star = Rational::from_integer(a - b) * half;
            Ok(lambda + Rational::from_integer(i64::from(signs[i])) * lambda_star)
        })
        .collect::<Result<Vec<_>>>()?;
    GradedHeckeAlgebra::new(datum, &k, vec![], None)
}
