//! Affine roots, the extended affine Weyl group X_* ⋊ W₀, its length-zero
//! subgroup Ω, R-elements and the derived affine Weyl group of a facet.
//!
//! An element (λ, w) acts on X_*⊗ℚ by x ↦ w·x + λ. The fundamental alcove is
//! {x : α(x) > 0 for simple α, θ_h(x) < 1 for each highest root θ_h}.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::qz::{dot, dot_rat_int, int, Rational};
use crate::rootdata::{weyl_group, RootDatum, WeylElement, WeylGroup};

/// The affine function x ↦ ⟨α, x⟩ + k on X_*⊗ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineRoot {
    pub root: Vec<i64>,
    pub offset: i64,
}

impl AffineRoot {
    pub fn new(root: Vec<i64>, offset: i64) -> Self {
        AffineRoot { root, offset }
    }

    pub fn negate(&self) -> AffineRoot {
        AffineRoot { root: self.root.iter().map(|x| -x).collect(), offset: -self.offset }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot_rat_int(x, &self.root) + int(self.offset)
    }

    pub fn is_positive(&self, datum: &RootDatum) -> bool {
        self.offset > 0 || (self.offset == 0 && datum.find_root(&self.root).map(|r| r.is_positive()).unwrap_or(false))
    }
}

/// Element t_λ w of the extended affine Weyl group, with its length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtAffineElement {
    translation: Vec<i64>,
    w: WeylElement,
    length: u64,
}

/// ℓ(t_λ w) = Σ_{α>0} |⟨α, λ⟩ − [w⁻¹α < 0]|.
pub fn length_of(datum: &RootDatum, translation: &[i64], w: &WeylElement) -> u64 {
    let winv = w.on_cocharacters.transpose();
    datum
        .positive_roots()
        .map(|r| {
            let image = winv.apply(&r.root);
            let neg = !datum.find_root(&image).expect("W permutes roots").is_positive();
            (dot(&r.root, translation) - i64::from(neg)).unsigned_abs()
        })
        .sum()
}

impl ExtAffineElement {
    pub fn new(datum: &RootDatum, translation: Vec<i64>, w: WeylElement) -> Self {
        let length = length_of(datum, &translation, &w);
        ExtAffineElement { translation, w, length }
    }

    pub fn identity(datum: &RootDatum) -> Self {
        ExtAffineElement { translation: vec![0; datum.rank()], w: WeylElement::identity(datum.rank()), length: 0 }
    }

    pub fn translation_by(datum: &RootDatum, lambda: Vec<i64>) -> Self {
        ExtAffineElement::new(datum, lambda, WeylElement::identity(datum.rank()))
    }

    pub fn finite(datum: &RootDatum, w: WeylElement) -> Self {
        ExtAffineElement::new(datum, vec![0; datum.rank()], w)
    }

    /// Reflection in the affine root α + k: (−k α^∨, s_α).
    pub fn reflection(datum: &RootDatum, a: &AffineRoot) -> Self {
        let r = datum.find_root(&a.root).expect("affine root with a root as gradient");
        let lambda = r.coroot.iter().map(|c| -a.offset * c).collect();
        ExtAffineElement::new(datum, lambda, WeylElement::from_character_matrix(datum.reflection_matrix(r)))
    }

    pub fn translation(&self) -> &[i64] {
        &self.translation
    }

    pub fn finite_part(&self) -> &WeylElement {
        &self.w
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn is_identity(&self) -> bool {
        self.translation.iter().all(|&x| x == 0) && self.w.is_identity()
    }

    /// (λ, w)(μ, v) = (λ + wμ, wv).
    pub fn compose(&self, datum: &RootDatum, other: &ExtAffineElement) -> Self {
        let wm = self.w.on_cocharacters.apply(&other.translation);
        let lambda = self.translation.iter().zip(wm).map(|(a, b)| a + b).collect();
        ExtAffineElement::new(datum, lambda, self.w.compose(&other.w))
    }

    pub fn inverse(&self, datum: &RootDatum) -> Self {
        let winv = self.w.inverse();
        let lambda = winv.on_cocharacters.apply(&self.translation).into_iter().map(|x| -x).collect();
        ExtAffineElement { translation: lambda, w: winv, length: self.length }.relength(datum)
    }

    fn relength(mut self, datum: &RootDatum) -> Self {
        self.length = length_of(datum, &self.translation, &self.w);
        self
    }

    pub fn conjugate(&self, datum: &RootDatum, by: &ExtAffineElement) -> Self {
        by.compose(datum, self).compose(datum, &by.inverse(datum))
    }

    pub fn act_point(&self, x: &[Rational]) -> Vec<Rational> {
        let wx = self.w.on_cocharacters.apply_rat(x);
        wx.into_iter().zip(&self.translation).map(|(a, &b)| a + int(b)).collect()
    }

    /// g·(α + k) = wα + (k − ⟨wα, λ⟩).
    pub fn act_root(&self, a: &AffineRoot) -> AffineRoot {
        let wa = self.w.on_characters.apply(&a.root);
        let offset = a.offset - dot(&wa, &self.translation);
        AffineRoot { root: wa, offset }
    }

    /// Whether the translation part lies in the coroot lattice, i.e. the element is in W_aff.
    pub fn in_affine_weyl_group(&self, datum: &RootDatum) -> bool {
        in_coroot_lattice(datum, &self.translation)
    }
}

fn in_coroot_lattice(datum: &RootDatum, v: &[i64]) -> bool {
    if datum.simple_coroots().is_empty() {
        return v.iter().all(|&x| x == 0);
    }
    let a = IntMatrix::from_cols(datum.simple_coroots(), datum.rank());
    crate::intmat::solve_integer(&a, v).is_some()
}

/// Simple affine roots, with the component each one belongs to.
///
/// Index i < semisimple rank is the simple root α_i; the remaining entries are
/// 1 − θ_h, one per irreducible component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleAffineRoots {
    pub roots: Vec<AffineRoot>,
    pub component: Vec<usize>,
}

pub fn simple_affine_roots(datum: &RootDatum) -> SimpleAffineRoots {
    let comps = datum.components();
    let mut roots: Vec<AffineRoot> = datum.simple_roots().iter().map(|r| AffineRoot::new(r.clone(), 0)).collect();
    let mut component = vec![0; roots.len()];
    for (c, comp) in comps.iter().enumerate() {
        for &i in comp {
            component[i] = c;
        }
    }
    for (c, h) in datum.highest_roots().into_iter().enumerate() {
        roots.push(AffineRoot::new(h.root.iter().map(|x| -x).collect(), 1));
        component.push(c);
    }
    SimpleAffineRoots { roots, component }
}

/// The extended affine Weyl group of a datum, with its Coxeter generators.
#[derive(Clone, Debug)]
pub struct AffineWeyl {
    datum: RootDatum,
    simple: SimpleAffineRoots,
    reflections: Vec<ExtAffineElement>,
}

/// A facet type: a subset of the simple affine roots, given by indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FacetType(pub Vec<usize>);

/// Output of `derived_affine_system`.
#[derive(Clone, Debug)]
pub struct DerivedSystem {
    /// Indices of Δ_{f,aff} in the simple affine roots.
    pub delta: Vec<usize>,
    /// The R-elements v(α, J) for α ∈ Δ_{f,aff}.
    pub generators: Vec<ExtAffineElement>,
    /// N_W(J) restricted to the length ball.
    pub normalizer: Vec<ExtAffineElement>,
    /// Ω(J) restricted to the length ball.
    pub omega: Vec<ExtAffineElement>,
    /// W_aff(J) restricted to the length ball.
    pub affine_part: Vec<ExtAffineElement>,
    /// Every ball element of N_W(J) factors as u·ω with u ∈ W_aff(J), ω ∈ Ω(J).
    pub decomposition_verified: bool,
    pub ball: u64,
}

const MAX_ALCOVE_STEPS: usize = 100_000;

impl AffineWeyl {
    pub fn new(datum: &RootDatum) -> Self {
        let simple = simple_affine_roots(datum);
        let reflections = simple.roots.iter().map(|a| ExtAffineElement::reflection(datum, a)).collect();
        AffineWeyl { datum: datum.clone(), simple, reflections }
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn simple_roots(&self) -> &SimpleAffineRoots {
        &self.simple
    }

    pub fn simple_reflections(&self) -> &[ExtAffineElement] {
        &self.reflections
    }

    pub fn mul(&self, a: &ExtAffineElement, b: &ExtAffineElement) -> ExtAffineElement {
        a.compose(&self.datum, b)
    }

    pub fn inv(&self, a: &ExtAffineElement) -> ExtAffineElement {
        a.inverse(&self.datum)
    }

    pub fn identity(&self) -> ExtAffineElement {
        ExtAffineElement::identity(&self.datum)
    }

    /// Ω: all length-zero elements. Requires a semisimple datum.
    pub fn omega_group(&self) -> Result<Vec<ExtAffineElement>> {
        if !self.datum.is_semisimple() {
            return Err(Error::NotSemisimple);
        }
        let w0 = weyl_group(&self.datum)?;
        let inv = IntMatrix::from_rows(self.datum.simple_roots()).inverse_rat().expect("semisimple");
        let mut out = vec![];
        for w in w0.elements() {
            let winv = w.on_cocharacters.transpose();
            let b: Vec<Rational> = self
                .datum
                .simple_roots()
                .iter()
                .map(|a| int(i64::from(!self.datum.find_root(&winv.apply(a)).unwrap().is_positive())))
                .collect();
            let lambda: Vec<Rational> = inv.iter().map(|row| row.iter().zip(&b).map(|(x, y)| x * y).sum()).collect();
            if lambda.iter().all(|x| x.is_integer()) {
                let lambda: Vec<i64> = lambda.iter().map(|x| x.to_integer()).collect();
                let e = ExtAffineElement::new(&self.datum, lambda, w.clone());
                if e.length() == 0 {
                    out.push(e);
                }
            }
        }
        self.verify_omega(&out)?;
        Ok(out)
    }

    fn verify_omega(&self, omega: &[ExtAffineElement]) -> Result<()> {
        let simple: HashSet<&AffineRoot> = self.simple.roots.iter().collect();
        for w in omega {
            if !self.simple.roots.iter().all(|a| simple.contains(&w.act_root(a))) {
                return Err(Error::DecompositionFailure("Ω does not permute the simple affine roots".into()));
            }
            if !w.is_identity() && w.in_affine_weyl_group(&self.datum) {
                return Err(Error::DecompositionFailure("Ω meets W_aff nontrivially".into()));
            }
        }
        // generators of W: simple reflections of W₀ and unit translations
        let n = self.datum.rank();
        let mut gens: Vec<ExtAffineElement> = self.reflections.clone();
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 1;
            gens.push(ExtAffineElement::translation_by(&self.datum, e));
        }
        for g in gens {
            let (_, w) = self.strip(&g);
            if !omega.contains(&w) {
                return Err(Error::DecompositionFailure("generator does not factor through Ω".into()));
            }
        }
        Ok(())
    }

    /// Writes g = s_{i1} ⋯ s_{ik} · ω with ω of length zero; returns the word and ω.
    pub fn strip(&self, g: &ExtAffineElement) -> (Vec<usize>, ExtAffineElement) {
        let mut word = vec![];
        let mut cur = g.clone();
        while cur.length() > 0 {
            let (i, next) = self
                .reflections
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.compose(&self.datum, &cur)))
                .find(|(_, x)| x.length() < cur.length())
                .expect("every element of positive length has a left descent");
            word.push(i);
            cur = next;
        }
        (word, cur)
    }

    pub fn is_finite_type(&self, j: &FacetType) -> bool {
        let comps: HashSet<usize> = self.simple.component.iter().copied().collect();
        comps
            .into_iter()
            .all(|c| (0..self.simple.roots.len()).any(|i| self.simple.component[i] == c && !j.0.contains(&i)))
    }

    /// W_J as a finite list of elements.
    pub fn parabolic(&self, j: &FacetType, bound: usize) -> Result<Vec<ExtAffineElement>> {
        let gens: Vec<&ExtAffineElement> = j.0.iter().map(|&i| &self.reflections[i]).collect();
        let id = self.identity();
        let mut seen = HashSet::from([id.clone()]);
        let mut out = vec![id];
        let mut k = 0;
        while k < out.len() {
            for g in &gens {
                let x = g.compose(&self.datum, &out[k]);
                if seen.insert(x.clone()) {
                    if out.len() >= bound {
                        return Err(Error::GroupTooLarge { bound });
                    }
                    out.push(x);
                }
            }
            k += 1;
        }
        Ok(out)
    }

    pub fn longest_element(&self, j: &FacetType) -> Result<ExtAffineElement> {
        Ok(self.parabolic(j, 100_000)?.into_iter().max_by_key(|e| e.length()).unwrap())
    }

    fn facet_roots(&self, j: &FacetType) -> HashSet<AffineRoot> {
        j.0.iter().map(|&i| self.simple.roots[i].clone()).collect()
    }

    /// Whether w(J) = J as sets of affine roots.
    pub fn normalizes(&self, w: &ExtAffineElement, j: &FacetType) -> bool {
        let set = self.facet_roots(j);
        set.iter().all(|a| set.contains(&w.act_root(a)))
    }

    /// v(α, J) = w_{J∪α} w_J when w_{J∪α}(J) = −J.
    pub fn r_element(&self, alpha: usize, j: &FacetType) -> Option<ExtAffineElement> {
        if j.0.contains(&alpha) {
            return None;
        }
        let mut big = j.clone();
        big.0.push(alpha);
        if !self.is_finite_type(&big) {
            return None;
        }
        let wbig = self.longest_element(&big).ok()?;
        let wj = self.longest_element(j).ok()?;
        let neg: HashSet<AffineRoot> = self.facet_roots(j).iter().map(AffineRoot::negate).collect();
        let image: HashSet<AffineRoot> = self.facet_roots(j).iter().map(|a| wbig.act_root(a)).collect();
        (image == neg).then(|| wbig.compose(&self.datum, &wj))
    }

    /// Ball of W of the given length radius (W_aff ball times Ω).
    pub fn ball(&self, radius: u64) -> Result<Vec<ExtAffineElement>> {
        let omega = self.omega_group()?;
        let id = self.identity();
        let mut seen = HashSet::from([id.clone()]);
        let mut layer = vec![id];
        let mut aff = layer.clone();
        for _ in 0..radius {
            let mut next = vec![];
            for x in &layer {
                for s in &self.reflections {
                    let y = s.compose(&self.datum, x);
                    if y.length() > x.length() && seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            aff.extend(next.iter().cloned());
            layer = next;
        }
        Ok(aff.iter().flat_map(|u| omega.iter().map(move |w| (u, w))).map(|(u, w)| u.compose(&self.datum, w)).collect())
    }

    /// Δ_{f,aff}, S_{f,aff}, and N_W(J) = W_aff(J) ⋊ Ω(J) on a length ball.
    pub fn derived_affine_system(&self, j: &FacetType, ball: u64, relax: bool) -> Result<DerivedSystem> {
        let candidates: Vec<(usize, ExtAffineElement)> = (0..self.simple.roots.len())
            .filter(|i| !j.0.contains(i))
            .filter_map(|i| self.r_element(i, j).map(|v| (i, v)))
            .collect();
        let needed = if relax { 1 } else { 2 };
        let chosen: Vec<(usize, ExtAffineElement)> = candidates
            .iter()
            .filter(|(i, _)| {
                candidates.iter().filter(|(k, _)| self.simple.component[*k] == self.simple.component[*i]).count()
                    >= needed
            })
            .cloned()
            .collect();
        let delta: Vec<usize> = chosen.iter().map(|(i, _)| *i).collect();
        let generators: Vec<ExtAffineElement> = chosen.into_iter().map(|(_, v)| v).collect();
        let delta_set: HashSet<AffineRoot> = delta.iter().map(|&i| self.simple.roots[i].clone()).collect();

        let normalizer: Vec<ExtAffineElement> =
            self.ball(ball)?.into_iter().filter(|w| self.normalizes(w, j)).collect();
        let stabilizes_delta = |w: &ExtAffineElement| delta_set.iter().all(|a| delta_set.contains(&w.act_root(a)));
        let omega: Vec<ExtAffineElement> = normalizer.iter().filter(|w| stabilizes_delta(w)).cloned().collect();

        // W_aff(J) on the ball: words in the R-elements, bounded by W-length
        let id = self.identity();
        let mut seen = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        let mut affine_part = vec![];
        while let Some(x) = queue.pop_front() {
            for v in &generators {
                let y = v.compose(&self.datum, &x);
                if y.length() <= ball && seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
            affine_part.push(x);
        }

        let mut verified = true;
        for n in &normalizer {
            let mut cur = n.clone();
            'strip: loop {
                for v in &generators {
                    let y = v.compose(&self.datum, &cur);
                    if y.length() < cur.length() {
                        cur = y;
                        continue 'strip;
                    }
                }
                break;
            }
            if !stabilizes_delta(&cur) || !self.normalizes(&cur, j) {
                verified = false;
            }
        }
        for w in &omega {
            if !w.is_identity() && affine_part.contains(w) {
                verified = false;
            }
            for v in &generators {
                if !generators.contains(&v.conjugate(&self.datum, w)) {
                    verified = false;
                }
            }
        }
        for v in &generators {
            if !v.compose(&self.datum, v).is_identity() || !self.normalizes(v, j) {
                verified = false;
            }
        }
        Ok(DerivedSystem { delta, generators, normalizer, omega, affine_part, decomposition_verified: verified, ball })
    }

    /// Ω_f = {ω ∈ Ω : ω(J) = J}.
    pub fn omega_facet(&self, j: &FacetType) -> Result<Vec<ExtAffineElement>> {
        Ok(self.omega_group()?.into_iter().filter(|w| self.normalizes(w, j)).collect())
    }

    /// Ω_f⁰: elements of Ω_f fixing the facet pointwise, i.e. fixing each simple
    /// affine root outside J.
    pub fn omega_facet_pointwise(&self, j: &FacetType) -> Result<Vec<ExtAffineElement>> {
        let outside: Vec<&AffineRoot> =
            (0..self.simple.roots.len()).filter(|i| !j.0.contains(i)).map(|i| &self.simple.roots[i]).collect();
        Ok(self.omega_facet(j)?.into_iter().filter(|w| outside.iter().all(|a| &w.act_root(a) == *a)).collect())
    }

    /// Moves x ∈ X_*⊗ℚ into the closed fundamental alcove; returns (x₀, g) with g·x = x₀.
    pub fn alcove_reduce(&self, x: &[Rational]) -> Result<(Vec<Rational>, ExtAffineElement)> {
        let mut cur = x.to_vec();
        let mut g = self.identity();
        let zero = int(0);
        for _ in 0..MAX_ALCOVE_STEPS {
            let bad = self.simple.roots.iter().position(|a| a.eval(&cur) < zero);
            match bad {
                None => return Ok((cur, g)),
                Some(i) => {
                    let s = &self.reflections[i];
                    cur = s.act_point(&cur);
                    g = s.compose(&self.datum, &g);
                }
            }
        }
        Err(Error::NoConvergence)
    }
}

/// Checks Ω is abelian.
pub fn is_abelian(aw: &AffineWeyl, elems: &[ExtAffineElement]) -> bool {
    elems.iter().all(|a| elems.iter().all(|b| aw.mul(a, b) == aw.mul(b, a)))
}

/// Checks that `center` commutes with `group` and that no nontrivial element of
/// `center` lies in W_aff, which contains every commutator of `group`.
pub fn central_and_commutator_free(aw: &AffineWeyl, center: &[ExtAffineElement], group: &[ExtAffineElement]) -> bool {
    let d = aw.datum();
    let central = center.iter().all(|z| group.iter().all(|g| aw.mul(z, g) == aw.mul(g, z)));
    let commutators_affine = group.iter().all(|a| {
        group.iter().all(|b| {
            let c = aw.mul(&aw.mul(a, b), &aw.mul(&aw.inv(a), &aw.inv(b)));
            c.in_affine_weyl_group(d)
        })
    });
    let trivial_meet = center.iter().all(|z| z.is_identity() || !z.in_affine_weyl_group(d));
    central && commutators_affine && trivial_meet
}

/// Index lookup helper for finite groups of affine elements.
pub fn index_of(elems: &[ExtAffineElement]) -> HashMap<ExtAffineElement, usize> {
    elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
}

/// The finite Weyl group embedded in the affine one.
pub fn finite_part_elements(datum: &RootDatum, w0: &WeylGroup) -> Vec<ExtAffineElement> {
    w0.elements().iter().map(|w| ExtAffineElement::finite(datum, w.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qz::rat;

    fn aw(kind: &str, sc: bool) -> AffineWeyl {
        let d = if sc { RootDatum::simply_connected(kind) } else { RootDatum::adjoint(kind) };
        AffineWeyl::new(&d.unwrap())
    }

    #[test]
    fn simple_affine_root_examples() {
        let a1 = simple_affine_roots(&RootDatum::simply_connected("A1").unwrap());
        assert_eq!(a1.roots, vec![AffineRoot::new(vec![2], 0), AffineRoot::new(vec![-2], 1)]);
        let c2 = RootDatum::adjoint("C2").unwrap();
        let s = simple_affine_roots(&c2);
        assert_eq!(s.roots.len(), 3);
        assert_eq!(s.roots[2], AffineRoot::new(vec![-2, -1], 1));
        let a2 = simple_affine_roots(&RootDatum::adjoint("A2").unwrap());
        assert_eq!(a2.roots[2], AffineRoot::new(vec![-1, -1], 1));
    }

    #[test]
    fn simple_reflections_have_length_one() {
        for (k, sc) in [("A1", true), ("A2", false), ("C2", true), ("G2", true), ("A1xA1", false)] {
            let w = aw(k, sc);
            for s in w.simple_reflections() {
                assert_eq!(s.length(), 1, "{k}");
                assert!(w.mul(s, s).is_identity());
            }
        }
    }

    #[test]
    fn omega_examples() {
        assert_eq!(aw("A1", true).omega_group().unwrap().len(), 1);
        assert_eq!(aw("A1", false).omega_group().unwrap().len(), 2);
        assert_eq!(aw("A2", false).omega_group().unwrap().len(), 3);
        assert_eq!(aw("C2", false).omega_group().unwrap().len(), 2);
        assert_eq!(aw("A3", false).omega_group().unwrap().len(), 4);
        let gl2 = AffineWeyl::new(&RootDatum::gl(2).unwrap());
        assert_eq!(gl2.omega_group().unwrap_err(), Error::NotSemisimple);
    }

    #[test]
    fn omega_is_abelian_and_permutes_simple_roots() {
        for (k, sc) in [("A2", false), ("A3", false), ("D4", false), ("B3", false), ("C3", false)] {
            let w = aw(k, sc);
            let om = w.omega_group().unwrap();
            assert!(is_abelian(&w, &om));
            assert!(om.iter().all(|x| x.length() == 0));
        }
    }

    #[test]
    fn r_element_examples() {
        let c2 = aw("C2", true);
        let j = FacetType(vec![0]);
        let v = c2.r_element(1, &j).expect("present");
        assert!(c2.mul(&v, &v).is_identity());
        assert!(!v.is_identity());
        // v = w₀ s₁ in the finite Weyl group
        assert!(v.translation().iter().all(|&x| x == 0));
        let a2 = aw("A2", true);
        assert!(a2.r_element(1, &j).is_none());
        for i in 0..3 {
            let v = a2.r_element(i, &FacetType(vec![])).unwrap();
            assert_eq!(v, a2.simple_reflections()[i]);
        }
    }

    #[test]
    fn derived_system_examples() {
        let c2 = aw("C2", true);
        let d = c2.derived_affine_system(&FacetType(vec![0]), 8, false).unwrap();
        assert_eq!(d.generators.len(), 2);
        assert!(d.decomposition_verified);
        assert!(d.affine_part.len() > 4);
        assert!(d.generators.iter().all(|v| c2.normalizes(v, &FacetType(vec![0]))));

        let a2 = aw("A2", true);
        let d = a2.derived_affine_system(&FacetType(vec![0]), 8, false).unwrap();
        assert!(d.delta.is_empty());
        assert_eq!(d.normalizer.len(), d.omega.len());
        assert!(d.decomposition_verified);

        let pgl3 = aw("A2", false);
        let d = pgl3.derived_affine_system(&FacetType(vec![]), 4, false).unwrap();
        assert_eq!(d.delta, vec![0, 1, 2]);
        assert_eq!(d.omega.len(), 3);
        assert!(d.decomposition_verified);
    }

    #[test]
    fn omega_centralizes_and_avoids_commutators() {
        for (k, sc, j) in
            [("A2", false, vec![]), ("C2", false, vec![0]), ("A1", false, vec![]), ("A3", false, vec![0, 2])]
        {
            let w = aw(k, sc);
            let j = FacetType(j);
            let d = w.derived_affine_system(&j, 4, false).unwrap();
            let z = w.omega_facet_pointwise(&j).unwrap();
            assert!(central_and_commutator_free(&w, &z, &d.normalizer), "{k}");
        }
    }

    #[test]
    fn alcove_examples() {
        let a1 = aw("A1", true);
        let (x0, g) = a1.alcove_reduce(&[rat(7, 3)]).unwrap();
        // X_* coordinate in the coroot basis: α(x) = 2x
        assert_eq!(a1.simple_roots().roots[0].eval(&x0), rat(2, 3));
        assert_eq!(g.act_point(&[rat(7, 3)]), x0);
        let (y, g) = a1.alcove_reduce(&[rat(1, 6)]).unwrap();
        assert_eq!(y, vec![rat(1, 6)]);
        assert!(g.is_identity());

        let a2 = aw("A2", true);
        let x = [rat(5, 3), rat(4, 3)];
        let (x0, g) = a2.alcove_reduce(&x).unwrap();
        assert!(g.length() <= 4);
        assert!(a2.simple_roots().roots.iter().all(|a| a.eval(&x0) >= int(0)));
        assert_eq!(x0, vec![rat(2, 3), rat(1, 3)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_word(w: &AffineWeyl, word: &[usize]) -> ExtAffineElement {
            let n = w.simple_reflections().len();
            word.iter().fold(w.identity(), |acc, &i| w.mul(&acc, &w.simple_reflections()[i % n]))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn length_subadditive(k in prop_oneof![Just("A2"), Just("C2"), Just("G2")],
                                  a in proptest::collection::vec(0usize..3, 0..8),
                                  b in proptest::collection::vec(0usize..3, 0..8)) {
                let w = aw(k, false);
                let x = random_word(&w, &a);
                let y = random_word(&w, &b);
                let xy = w.mul(&x, &y);
                prop_assert!(xy.length() <= x.length() + y.length());
                prop_assert!(x.length() as usize <= a.len());
                prop_assert_eq!(w.inv(&x).length(), x.length());
                // reduced products: extend x by a simple reflection that raises its length
                for s in w.simple_reflections() {
                    let xs = w.mul(&x, s);
                    prop_assert!(xs.length() == x.length() + 1 || xs.length() + 1 == x.length());
                }
            }

            #[test]
            fn length_counts_separating_hyperplanes(a in proptest::collection::vec(0usize..3, 0..7)) {
                let w = aw("A2", true);
                let x = random_word(&w, &a);
                let d = w.datum();
                // count positive affine roots sent to negative ones, offsets up to a bound
                let mut count = 0;
                for r in d.roots() {
                    for k in 0..12 {
                        let ar = AffineRoot::new(r.root.clone(), k);
                        if ar.is_positive(d) && !x.act_root(&ar).is_positive(d) {
                            count += 1;
                        }
                    }
                }
                prop_assert_eq!(count, x.length());
            }

            #[test]
            fn alcove_reduction_lands_in_alcove(n in proptest::collection::vec(-20i64..20, 2), den in 1i64..7) {
                let w = aw("C2", true);
                let x: Vec<Rational> = n.iter().map(|&v| rat(v, den)).collect();
                let (x0, g) = w.alcove_reduce(&x).unwrap();
                prop_assert_eq!(g.act_point(&x), x0.clone());
                prop_assert!(w.simple_roots().roots.iter().all(|a| a.eval(&x0) >= int(0)));
            }
        }
    }
}
