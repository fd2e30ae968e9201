//! Stabilizers of torus characters in the Weyl group: W_θ, its reflection
//! subgroup W_θ°, the complement Γ, the alcove lift θ̃ and the class map
//! Γ → X*/ℤR.

use std::collections::HashSet;

use serde::Serialize;

use crate::affine_weyl::AffineWeyl;
use crate::error::{Error, Result};
use crate::intmat::{IntMatrix, LatticeQuotient};
use crate::qz::{fmt_rational, Rational};
use crate::rootdata::{
    pairing, weyl_group, weyl_group_bounded, FrobeniusAction, Root, RootDatum, TorusCharacter, WeylElement, WeylGroup,
    DEFAULT_MAX_GROUP_ORDER,
};

/// W_θ = {w ∈ W : w·θ = θ}.
pub fn stab_theta(datum: &RootDatum, theta: &TorusCharacter) -> Result<WeylGroup> {
    stab_theta_bounded(datum, theta, DEFAULT_MAX_GROUP_ORDER)
}

pub fn stab_theta_bounded(datum: &RootDatum, theta: &TorusCharacter, bound: usize) -> Result<WeylGroup> {
    check_rank(datum, theta)?;
    let w = weyl_group_bounded(datum, bound)?;
    let elems = w.elements().iter().filter(|e| &e.act_theta(theta) == theta).cloned().collect();
    Ok(WeylGroup::from_elements(datum.rank(), elems))
}

/// W_θ ∩ C_W(F₀), the stabilizer among Frobenius-fixed Weyl elements.
pub fn stab_theta_frobenius(datum: &RootDatum, theta: &TorusCharacter, frob: &FrobeniusAction) -> Result<WeylGroup> {
    let f = frob.matrix();
    let full = stab_theta(datum, theta)?;
    let elems = full.elements().iter().filter(|w| w.on_characters.mul(f) == f.mul(&w.on_characters)).cloned().collect();
    Ok(WeylGroup::from_elements(datum.rank(), elems))
}

fn check_rank(datum: &RootDatum, theta: &TorusCharacter) -> Result<()> {
    if theta.rank() != datum.rank() {
        return Err(Error::InvalidCharacter(format!(
            "character of rank {} for a datum of rank {}",
            theta.rank(),
            datum.rank()
        )));
    }
    Ok(())
}

/// R_θ and W_θ° = W(R_θ).
#[derive(Clone, Debug)]
pub struct SingularSubsystem {
    pub roots: Vec<Root>,
    pub positive: Vec<Root>,
    pub simple: Vec<Root>,
    pub group: WeylGroup,
}

pub fn singular_subsystem(datum: &RootDatum, theta: &TorusCharacter) -> Result<SingularSubsystem> {
    check_rank(datum, theta)?;
    let roots: Vec<Root> = datum.roots().iter().filter(|r| pairing(theta, &r.coroot).is_zero()).cloned().collect();
    let positive: Vec<Root> = roots.iter().filter(|r| r.is_positive()).cloned().collect();
    let pos_set: HashSet<&Vec<i64>> = positive.iter().map(|r| &r.root).collect();
    let simple: Vec<Root> = positive
        .iter()
        .filter(|b| {
            !positive.iter().any(|a| {
                let rest: Vec<i64> = b.root.iter().zip(&a.root).map(|(x, y)| x - y).collect();
                pos_set.contains(&rest)
            })
        })
        .cloned()
        .collect();
    let gens: Vec<IntMatrix> = simple.iter().map(|r| datum.reflection_matrix(r)).collect();
    let group = WeylGroup::generate(datum.rank(), &gens, DEFAULT_MAX_GROUP_ORDER)?;
    Ok(SingularSubsystem { roots, positive, simple, group })
}

/// W_θ = W_θ° ⋊ Γ with a factorization witness for every element.
#[derive(Clone, Debug)]
pub struct GammaDecomposition {
    pub w_theta: WeylGroup,
    pub subsystem: SingularSubsystem,
    pub gamma: Vec<WeylElement>,
    /// For the i-th element w of W_θ: (index of u in W_θ°, index of γ in Γ) with w = u·γ.
    pub witness: Vec<(usize, usize)>,
}

pub fn gamma_decomposition(datum: &RootDatum, theta: &TorusCharacter) -> Result<GammaDecomposition> {
    let w_theta = stab_theta(datum, theta)?;
    let sub = singular_subsystem(datum, theta)?;
    let pos: HashSet<&Vec<i64>> = sub.positive.iter().map(|r| &r.root).collect();
    let keeps_positive = |w: &WeylElement| sub.positive.iter().all(|r| pos.contains(&w.on_characters.apply(&r.root)));
    let gamma: Vec<WeylElement> = w_theta.elements().iter().filter(|w| keeps_positive(w)).cloned().collect();
    let gamma_group = WeylGroup::from_elements(datum.rank(), gamma.clone());

    for u in sub.group.elements() {
        if !w_theta.contains(&u.on_characters) {
            return Err(Error::DecompositionFailure("W_θ° is not contained in W_θ".into()));
        }
        if !u.is_identity() && keeps_positive(u) {
            return Err(Error::DecompositionFailure("W_θ° meets Γ nontrivially".into()));
        }
    }
    let mut witness = vec![];
    for w in w_theta.elements() {
        let mut cur = w.clone();
        let mut u = WeylElement::identity(datum.rank());
        loop {
            let inv = cur.inverse();
            let flip = sub.simple.iter().find(|b| {
                let neg: Vec<i64> = b.root.iter().map(|x| -x).collect();
                pos.contains(&inv.on_characters.apply(&neg))
            });
            match flip {
                None => break,
                Some(b) => {
                    let s = WeylElement::from_character_matrix(datum.reflection_matrix(b));
                    cur = s.compose(&cur);
                    u = u.compose(&s);
                }
            }
        }
        let ui = sub
            .group
            .position(&u.on_characters)
            .ok_or_else(|| Error::DecompositionFailure("reflection part escaped W_θ°".into()))?;
        let gi = gamma_group
            .position(&cur.on_characters)
            .ok_or_else(|| Error::DecompositionFailure("complement part escaped Γ".into()))?;
        witness.push((ui, gi));
    }
    if sub.group.order() * gamma.len() != w_theta.order() {
        return Err(Error::DecompositionFailure("|W_θ| ≠ |W_θ°|·|Γ|".into()));
    }
    Ok(GammaDecomposition { w_theta, subsystem: sub, gamma, witness })
}

/// The representative θ̃ ∈ X*⊗ℚ of the W-orbit of θ in the closed fundamental
/// alcove, and w₁ ∈ W with θ̃ ≡ w₁θ mod X*.
///
/// Among several alcove points in the orbit the lexicographically smallest is chosen.
pub fn alcove_lift(datum: &RootDatum, theta: &TorusCharacter) -> Result<(Vec<Rational>, WeylElement)> {
    check_rank(datum, theta)?;
    let dual = AffineWeyl::new(&datum.dual());
    let (x0, g) = dual.alcove_reduce(&theta.rationals())?;
    let best = if datum.is_semisimple() {
        let omega = dual.omega_group()?;
        omega.iter().map(|w| (w.act_point(&x0), w.compose(dual.datum(), &g))).min_by(|a, b| a.0.cmp(&b.0)).unwrap()
    } else {
        (x0, g)
    };
    let f = best.1.finite_part();
    let w1 = WeylElement { on_characters: f.on_cocharacters.clone(), on_cocharacters: f.on_characters.clone() };
    Ok((best.0, w1))
}

/// {(w, x) ∈ W ⋉ X* : wθ̃ + x = θ̃}.
#[derive(Clone, Debug)]
pub struct AlcoveLiftStabilizer {
    pub theta_tilde: Vec<Rational>,
    /// w₁ with θ̃ ≡ w₁θ; w ↦ w₁ w w₁⁻¹ identifies W_θ with the projection.
    pub conjugator: WeylElement,
    pub elements: Vec<(WeylElement, Vec<i64>)>,
}

impl AlcoveLiftStabilizer {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements whose translation part lies in ℤR.
    pub fn affine_part(&self, datum: &RootDatum) -> Vec<&(WeylElement, Vec<i64>)> {
        let q = LatticeQuotient::new(datum.simple_roots(), datum.rank());
        self.elements.iter().filter(|(_, x)| q.contains(x)).collect()
    }
}

pub fn alcove_lift_stabilizer(datum: &RootDatum, theta: &TorusCharacter) -> Result<AlcoveLiftStabilizer> {
    let (theta_tilde, conjugator) = alcove_lift(datum, theta)?;
    let w = weyl_group(datum)?;
    let mut elements = vec![];
    for e in w.elements() {
        let image = e.on_characters.apply_rat(&theta_tilde);
        let diff: Vec<Rational> = theta_tilde.iter().zip(&image).map(|(a, b)| a - b).collect();
        if diff.iter().all(|x| x.is_integer()) {
            elements.push((e.clone(), diff.iter().map(|x| x.to_integer()).collect()));
        }
    }
    let w_theta = stab_theta(datum, theta)?;
    let c_inv = conjugator.inverse();
    let onto = elements.len() == w_theta.order()
        && elements.iter().all(|(e, _)| w_theta.contains(&c_inv.compose(e).compose(&conjugator).on_characters));
    if !onto {
        return Err(Error::InvariantViolation("projection of the alcove stabilizer is not onto W_θ".into()));
    }
    Ok(AlcoveLiftStabilizer { theta_tilde, conjugator, elements })
}

/// The homomorphism Γ → X*/ℤR, γ ↦ [θ̃ − γθ̃].
#[derive(Clone, Debug)]
pub struct ClassMap {
    /// Cyclic factors of X*/ℤR (0 for ℤ).
    pub quotient: Vec<i64>,
    pub gamma: Vec<WeylElement>,
    pub images: Vec<Vec<i64>>,
}

impl ClassMap {
    pub fn image_order(&self) -> usize {
        self.images.iter().collect::<HashSet<_>>().len()
    }
}

pub fn gamma_class_map(datum: &RootDatum, theta: &TorusCharacter) -> Result<ClassMap> {
    let dec = gamma_decomposition(datum, theta)?;
    let (theta_tilde, w1) = alcove_lift(datum, theta)?;
    let w1_inv = w1.inverse();
    let q = LatticeQuotient::new(datum.simple_roots(), datum.rank());
    let class_of = |g: &WeylElement| -> Vec<i64> {
        let moved = w1.compose(g).compose(&w1_inv);
        let image = moved.on_characters.apply_rat(&theta_tilde);
        let diff: Vec<i64> = theta_tilde.iter().zip(&image).map(|(a, b)| (a - b).to_integer()).collect();
        q.class(&diff)
    };
    let images: Vec<Vec<i64>> = dec.gamma.iter().map(class_of).collect();
    let distinct: HashSet<&Vec<i64>> = images.iter().collect();
    if distinct.len() != images.len() {
        return Err(Error::NonInjective(format!("{} elements, {} classes", images.len(), distinct.len())));
    }
    let add = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    let invariants = q.invariants();
    let reduce = |v: Vec<i64>| -> Vec<i64> {
        v.into_iter().zip(&invariants).map(|(c, &f)| if f == 0 { c } else { c.rem_euclid(f) }).collect()
    };
    for (i, a) in dec.gamma.iter().enumerate() {
        for (j, b) in dec.gamma.iter().enumerate() {
            let ab = class_of(&a.compose(b));
            if ab != reduce(add(&images[i], &images[j])) {
                return Err(Error::InvariantViolation("class map is not a homomorphism".into()));
            }
        }
    }
    Ok(ClassMap { quotient: invariants, gamma: dec.gamma, images })
}

/// Centrality test for a Levi subsystem given by simple-root indices.
#[derive(Clone, Debug, Serialize)]
pub struct LeviCentrality {
    /// θ is nonsingular for the Levi roots.
    pub levi_nonsingular: bool,
    /// W(R_L)_θ meets W_θ° trivially.
    pub meets_reflections_trivially: bool,
    pub levi_stabilizer_order: usize,
    pub normalizer_stabilizer_order: usize,
    /// W(R_L)_θ is central in N_W(R_L)_θ.
    pub central: bool,
}

pub fn levi_centrality(datum: &RootDatum, levi: &[usize], theta: &TorusCharacter) -> Result<LeviCentrality> {
    check_rank(datum, theta)?;
    let levi_roots: Vec<&Root> = datum
        .roots()
        .iter()
        .filter(|r| r.coeffs.iter().enumerate().all(|(i, &c)| c == 0 || levi.contains(&i)))
        .collect();
    let levi_set: HashSet<&Vec<i64>> = levi_roots.iter().map(|r| &r.root).collect();
    let simple: Vec<&Root> = levi_roots.iter().copied().filter(|r| r.height() == 1).collect();
    let w_l = crate::rootdata::reflection_subgroup(datum, &simple, DEFAULT_MAX_GROUP_ORDER)?;
    let w_theta = stab_theta(datum, theta)?;
    let sub = singular_subsystem(datum, theta)?;
    let levi_stab: Vec<&WeylElement> = w_l.elements().iter().filter(|w| w_theta.contains(&w.on_characters)).collect();
    let normalizer: Vec<&WeylElement> = w_theta
        .elements()
        .iter()
        .filter(|w| levi_roots.iter().all(|r| levi_set.contains(&w.on_characters.apply(&r.root))))
        .collect();
    let central = levi_stab.iter().all(|a| {
        normalizer.iter().all(|b| a.on_characters.mul(&b.on_characters) == b.on_characters.mul(&a.on_characters))
    });
    Ok(LeviCentrality {
        levi_nonsingular: levi_roots.iter().all(|r| !pairing(theta, &r.coroot).is_zero()),
        meets_reflections_trivially: levi_stab.iter().all(|w| w.is_identity() || !sub.group.contains(&w.on_characters)),
        levi_stabilizer_order: levi_stab.len(),
        normalizer_stabilizer_order: normalizer.len(),
        central,
    })
}

/// Everything above in serializable form.
#[derive(Clone, Debug, Serialize)]
pub struct StabilizerReport {
    pub w_theta_order: usize,
    pub w_theta_frobenius_order: Option<usize>,
    pub singular_roots: Vec<Vec<i64>>,
    pub w_theta_circ_order: usize,
    pub gamma_order: usize,
    pub gamma: Vec<Vec<Vec<i64>>>,
    pub theta_tilde: Vec<String>,
    pub alcove_stabilizer_order: usize,
    pub class_group: Vec<i64>,
    pub class_images: Vec<Vec<i64>>,
}

pub fn stabilizer_report(
    datum: &RootDatum,
    theta: &TorusCharacter,
    frob: Option<&FrobeniusAction>,
) -> Result<StabilizerReport> {
    let dec = gamma_decomposition(datum, theta)?;
    let lift = alcove_lift_stabilizer(datum, theta)?;
    let cm = gamma_class_map(datum, theta)?;
    let w_theta_frobenius_order = match frob {
        Some(f) => Some(stab_theta_frobenius(datum, theta, f)?.order()),
        None => None,
    };
    Ok(StabilizerReport {
        w_theta_order: dec.w_theta.order(),
        w_theta_frobenius_order,
        singular_roots: dec.subsystem.roots.iter().map(|r| r.root.clone()).collect(),
        w_theta_circ_order: dec.subsystem.group.order(),
        gamma_order: dec.gamma.len(),
        gamma: dec.gamma.iter().map(|g| g.on_characters.to_rows()).collect(),
        theta_tilde: lift.theta_tilde.iter().map(fmt_rational).collect(),
        alcove_stabilizer_order: lift.order(),
        class_group: cm.quotient,
        class_images: cm.images,
    })
}
