//! Exact computations in group algebras of small finite groups of Lie type.
//!
//! Groups are enumerated as matrices over a finite field. The θ-spherical
//! algebra e·ℂ[G]·e, with e the idempotent of θ on B, is computed by
//! convolution with values in ℤ[C_N] (N the exponent of T) and read off in ℚ(ζ_N).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cyclotomic::{Cyclotomic, CyclotomicField};
use crate::error::{Error, Result};
use crate::extensions::{pushout, Cocycle2, CoefficientGroup, FiniteGroup};
use crate::finite_field::{Elem, FiniteField};
use crate::intmat::IntMatrix;
use crate::qz::{exact_log, rat, rational_sqrt, QmodZ, Rational};
use crate::rootdata::{FrobeniusAction, RootDatum, TorusCharacter};

pub const DEFAULT_MAX_ORDER: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GroupKind {
    SL2,
    PGL2,
    GL2,
    SU3,
    PU3,
    Custom,
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SL2" => Ok(GroupKind::SL2),
            "PGL2" => Ok(GroupKind::PGL2),
            "GL2" => Ok(GroupKind::GL2),
            "SU3" => Ok(GroupKind::SU3),
            "PU3" => Ok(GroupKind::PU3),
            _ => Err(Error::InvalidInput(format!("unknown group kind {s}"))),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl GroupKind {
    pub const BUILTIN: [GroupKind; 5] =
        [GroupKind::SL2, GroupKind::PGL2, GroupKind::GL2, GroupKind::SU3, GroupKind::PU3];

    /// |G(F_q)|.
    pub fn order_formula(self, q: u64) -> Option<u128> {
        let q = u128::from(q);
        match self {
            GroupKind::SL2 | GroupKind::PGL2 => Some(q * (q * q - 1)),
            GroupKind::GL2 => Some(q * (q - 1) * (q * q - 1)),
            GroupKind::SU3 | GroupKind::PU3 => Some(q.pow(3) * (q * q - 1) * (q.pow(3) + 1)),
            GroupKind::Custom => None,
        }
    }

    fn is_unitary(self) -> bool {
        matches!(self, GroupKind::SU3 | GroupKind::PU3)
    }
}

pub type Mat = Vec<Elem>;

/// Input for a group enumerated by closure from generators.
#[derive(Clone, Debug)]
pub struct CustomGroup {
    pub field_size: u64,
    /// Size of the residue field F_q; defaults to the field size.
    pub q: Option<u64>,
    pub dimension: usize,
    pub projective: bool,
    pub generators: Vec<Mat>,
    /// Generators of T with their orders; T is their direct product.
    pub torus: Vec<(Mat, i64)>,
    pub unipotent_generators: Vec<Mat>,
    pub weyl_lift: Mat,
    pub expected_order: Option<u64>,
}

/// A finite group of Lie type of semisimple rank one with its subgroups B = T⋉U.
#[derive(Clone, Debug)]
pub struct FiniteGroupOfLieType {
    kind: GroupKind,
    q: u64,
    field: FiniteField,
    n: usize,
    projective: bool,
    elements: Vec<Mat>,
    index: HashMap<u128, usize>,
    identity: usize,
    borel: Vec<usize>,
    torus: Vec<usize>,
    unipotent: Vec<usize>,
    torus_gens: Vec<usize>,
    torus_orders: Vec<i64>,
    /// Exponents of the T-part of each element of B.
    torus_exponents: HashMap<usize, Vec<i64>>,
    weyl_lift: usize,
    /// ŝ⁻¹ t_i ŝ = Π_l t_l^{M[i][l]}.
    weyl_matrix: Vec<Vec<i64>>,
}

/// A character of T(F_q), by its values on the torus generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FiniteTorusCharacter(pub Vec<QmodZ>);

impl FiniteTorusCharacter {
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(QmodZ::is_zero)
    }
}

struct MatOps<'a> {
    f: &'a FiniteField,
    n: usize,
    projective: bool,
}

impl MatOps<'_> {
    fn mul(&self, a: &[Elem], b: &[Elem]) -> Mat {
        let n = self.n;
        let mut out = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i * n + k];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = self.f.add(out[i * n + j], self.f.mul(x, b[k * n + j]));
                }
            }
        }
        self.normalize(out)
    }

    fn normalize(&self, mut m: Mat) -> Mat {
        if self.projective {
            if let Some(&lead) = m.iter().find(|&&x| x != 0) {
                let inv = self.f.inv(lead).expect("nonzero");
                for x in &mut m {
                    *x = self.f.mul(*x, inv);
                }
            }
        }
        m
    }

    fn key(&self, m: &[Elem]) -> u128 {
        let s = u128::from(self.f.size());
        m.iter().fold(0u128, |acc, &x| acc * s + u128::from(x))
    }

    fn diag(&self, d: &[Elem]) -> Mat {
        let n = self.n;
        let mut m = vec![0; n * n];
        for i in 0..n {
            m[i * n + i] = d[i];
        }
        self.normalize(m)
    }

    fn identity(&self) -> Mat {
        self.diag(&vec![1; self.n])
    }

    fn pow(&self, a: &[Elem], e: u64) -> Mat {
        let mut out = self.identity();
        for _ in 0..e {
            out = self.mul(&out, a);
        }
        out
    }

    fn order(&self, a: &[Elem]) -> u64 {
        let id = self.identity();
        let mut cur = a.to_vec();
        let mut k = 1;
        while cur != id {
            cur = self.mul(&cur, a);
            k += 1;
        }
        k
    }
}

impl FiniteGroupOfLieType {
    pub fn build(kind: GroupKind, q: u64) -> Result<Self> {
        FiniteGroupOfLieType::build_bounded(kind, q, DEFAULT_MAX_ORDER)
    }

    pub fn build_bounded(kind: GroupKind, q: u64, bound: usize) -> Result<Self> {
        if !crate::rootdata::is_prime_power(q) {
            return Err(Error::BadPrimePower(q));
        }
        let expected =
            kind.order_formula(q).ok_or_else(|| Error::InvalidInput("custom groups need generators".into()))?;
        if expected > bound as u128 {
            return Err(Error::GroupTooLarge { bound });
        }
        let field = FiniteField::new(if kind.is_unitary() { q * q } else { q })?;
        let (n, projective) = match kind {
            GroupKind::SL2 | GroupKind::GL2 => (2, false),
            GroupKind::PGL2 => (2, true),
            GroupKind::SU3 => (3, false),
            GroupKind::PU3 => (3, true),
            GroupKind::Custom => unreachable!(),
        };
        let ops = MatOps { f: &field, n, projective };
        let f = &field;
        let g = f.generator();
        let conj = |x: Elem| f.pow(x, q as i64);
        let one = 1;
        let m1 = f.neg(1);
        let (torus, unipotent, s_hat): (Vec<(Mat, i64)>, Vec<Mat>, Mat) = match kind {
            GroupKind::SL2 | GroupKind::PGL2 | GroupKind::GL2 => {
                let torus = match kind {
                    GroupKind::SL2 => vec![(ops.diag(&[g, f.inv(g).unwrap()]), q as i64 - 1)],
                    GroupKind::PGL2 => vec![(ops.diag(&[g, one]), q as i64 - 1)],
                    _ => vec![(ops.diag(&[g, one]), q as i64 - 1), (ops.diag(&[one, g]), q as i64 - 1)],
                };
                let unipotent = f.elements().map(|a| vec![1, a, 0, 1]).collect();
                (torus, unipotent, ops.normalize(vec![0, 1, m1, 0]))
            }
            GroupKind::SU3 | GroupKind::PU3 => {
                let order = (q * q - 1) as i64;
                let t = if kind == GroupKind::SU3 {
                    ops.diag(&[g, f.mul(conj(g), f.inv(g).unwrap()), f.inv(conj(g)).unwrap()])
                } else {
                    ops.diag(&[g, one, f.inv(conj(g)).unwrap()])
                };
                let mut unipotent = vec![];
                for a in f.elements() {
                    let norm = f.mul(a, conj(a));
                    for b in f.elements() {
                        if f.add(b, conj(b)) == f.neg(norm) {
                            unipotent.push(vec![1, a, b, 0, 1, f.neg(conj(a)), 0, 0, 1]);
                        }
                    }
                }
                // antidiag(a, 1, c) with a·c = −1 and a·c̄ = 1
                let c = f.units().find(|&c| f.pow(c, q as i64 - 1) == m1).expect("c^(q-1) = -1 is solvable");
                let a = f.inv(conj(c)).unwrap();
                let s = ops.normalize(vec![0, 0, a, 0, 1, 0, c, 0, 0]);
                (vec![(t, order)], unipotent, s)
            }
            GroupKind::Custom => unreachable!(),
        };
        let group = Self::assemble(kind, q, field.clone(), n, projective, torus, unipotent, s_hat, None, bound)?;
        if group.order() as u128 != expected {
            return Err(Error::InvariantViolation(format!(
                "|{kind}({q})| = {} but the order formula gives {expected}",
                group.order()
            )));
        }
        Ok(group)
    }

    /// Enumerates ⟨generators⟩ by closure and the subgroups from the given data.
    pub fn custom(def: &CustomGroup, bound: usize) -> Result<Self> {
        let field = FiniteField::new(def.field_size)?;
        let q = def.q.unwrap_or(def.field_size);
        let n = def.dimension;
        let size = field.size();
        let well_formed = |m: &Mat| m.len() == n * n && m.iter().all(|&x| x < size);
        if n == 0
            || !def.generators.iter().all(well_formed)
            || !def.torus.iter().all(|(m, _)| well_formed(m))
            || !def.unipotent_generators.iter().all(well_formed)
            || !well_formed(&def.weyl_lift)
        {
            return Err(Error::InvalidInput("custom group matrices have the wrong shape".into()));
        }
        let ops = MatOps { f: &field, n, projective: def.projective };
        let unipotent = closure(&ops, &def.unipotent_generators, bound)?;
        let torus = def.torus.iter().map(|(m, k)| (ops.normalize(m.clone()), *k)).collect();
        let gens: Vec<Mat> = def.generators.iter().map(|m| ops.normalize(m.clone())).collect();
        let all = closure(&ops, &gens, bound)?;
        let group = Self::assemble(
            GroupKind::Custom,
            q,
            field.clone(),
            n,
            def.projective,
            torus,
            unipotent,
            ops.normalize(def.weyl_lift.clone()),
            Some(all),
            bound,
        )?;
        if let Some(e) = def.expected_order {
            if group.order() as u64 != e {
                return Err(Error::InvariantViolation(format!("enumerated {} elements, expected {e}", group.order())));
            }
        }
        Ok(group)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: GroupKind,
        q: u64,
        field: FiniteField,
        n: usize,
        projective: bool,
        torus_data: Vec<(Mat, i64)>,
        unipotent_list: Vec<Mat>,
        s_hat: Mat,
        all: Option<Vec<Mat>>,
        bound: usize,
    ) -> Result<Self> {
        let ops = MatOps { f: &field, n, projective };
        let mut elements: Vec<Mat> = vec![];
        let mut index: HashMap<u128, usize> = HashMap::new();
        let insert = |m: Mat, elements: &mut Vec<Mat>, index: &mut HashMap<u128, usize>| -> Result<(usize, bool)> {
            let k = ops.key(&m);
            if let Some(&i) = index.get(&k) {
                return Ok((i, false));
            }
            if elements.len() >= bound {
                return Err(Error::GroupTooLarge { bound });
            }
            index.insert(k, elements.len());
            elements.push(m);
            Ok((elements.len() - 1, true))
        };

        // T as a direct product of cyclic groups
        let orders: Vec<i64> = torus_data.iter().map(|(_, k)| *k).collect();
        for (t, k) in &torus_data {
            if ops.order(t) != *k as u64 {
                return Err(Error::InvariantViolation("torus generator has the wrong order".into()));
            }
        }
        let t_size: i64 = orders.iter().product();
        let mut torus_mats: Vec<(Mat, Vec<i64>)> = vec![];
        for code in 0..t_size {
            let mut c = code;
            let mut e = vec![0i64; orders.len()];
            let mut m = ops.identity();
            for (i, (t, k)) in torus_data.iter().enumerate() {
                e[i] = c % k;
                c /= k;
                m = ops.mul(&m, &ops.pow(t, e[i] as u64));
            }
            torus_mats.push((m, e));
        }
        let mut borel_mats: Vec<(Mat, Vec<i64>)> = vec![];
        for (t, e) in &torus_mats {
            for u in &unipotent_list {
                borel_mats.push((ops.mul(t, u), e.clone()));
            }
        }
        let mut torus_exponents = HashMap::new();
        let mut borel = vec![];
        for (m, e) in &borel_mats {
            let (i, fresh) = insert(m.clone(), &mut elements, &mut index)?;
            if !fresh {
                return Err(Error::InvariantViolation("B is not the semidirect product T⋉U".into()));
            }
            torus_exponents.insert(i, e.clone());
            borel.push(i);
        }
        let pos = |m: &Mat, index: &HashMap<u128, usize>| index.get(&ops.key(m)).copied();
        let identity = pos(&ops.identity(), &index).expect("1 ∈ B");
        let torus: Vec<usize> = torus_mats.iter().map(|(m, _)| pos(m, &index).unwrap()).collect();
        let unipotent: Vec<usize> = unipotent_list.iter().map(|m| pos(m, &index).unwrap()).collect();
        let u_keys: std::collections::HashSet<u128> = unipotent_list.iter().map(|m| ops.key(m)).collect();
        for (t, k) in &torus_data {
            let t_inv = ops.pow(t, *k as u64 - 1);
            for u in &unipotent_list {
                if !u_keys.contains(&ops.key(&ops.mul(&ops.mul(t, u), &t_inv))) {
                    return Err(Error::InvariantViolation("T does not normalize U".into()));
                }
            }
        }
        for a in &unipotent_list {
            for b in &unipotent_list {
                if !u_keys.contains(&ops.key(&ops.mul(a, b))) {
                    return Err(Error::InvariantViolation("U is not closed under multiplication".into()));
                }
            }
        }
        let weyl_lift = match all {
            None => {
                // Bruhat decomposition G = B ⊔ UŝB
                for u in &unipotent_list {
                    let us = ops.mul(u, &s_hat);
                    for (b, _) in &borel_mats {
                        let (_, fresh) = insert(ops.mul(&us, b), &mut elements, &mut index)?;
                        if !fresh {
                            return Err(Error::InvariantViolation("Bruhat cells overlap".into()));
                        }
                    }
                }
                pos(&s_hat, &index).unwrap()
            }
            Some(list) => {
                let known: Vec<u128> = elements.iter().map(|m| ops.key(m)).collect();
                for m in list {
                    insert(m, &mut elements, &mut index)?;
                }
                let total = elements.len();
                let keys: std::collections::HashSet<u128> = elements.iter().map(|m| ops.key(m)).collect();
                if keys.len() != total || known.iter().any(|k| !keys.contains(k)) {
                    return Err(Error::InvariantViolation("custom group does not contain B".into()));
                }
                // closure of the given generators must already contain B
                pos(&s_hat, &index).ok_or_else(|| Error::InvalidInput("Weyl lift is not in the group".into()))?
            }
        };
        if torus_exponents.contains_key(&weyl_lift) {
            return Err(Error::InvariantViolation("Weyl lift lies in B".into()));
        }
        let s_order = ops.order(&s_hat);
        let s_inv = ops.pow(&s_hat, s_order - 1);
        let torus_keys: HashMap<u128, Vec<i64>> = torus_mats.iter().map(|(m, e)| (ops.key(m), e.clone())).collect();
        let mut weyl_matrix = vec![];
        for (t, _) in &torus_data {
            let c = ops.mul(&ops.mul(&s_inv, t), &s_hat);
            match torus_keys.get(&ops.key(&c)) {
                Some(e) => weyl_matrix.push(e.clone()),
                None => return Err(Error::InvariantViolation("Weyl lift does not normalize T".into())),
            }
        }
        if !torus_keys.contains_key(&ops.key(&ops.mul(&s_hat, &s_hat))) {
            return Err(Error::InvariantViolation("ŝ² is not in T".into()));
        }
        let torus_gens = torus_data.iter().map(|(m, _)| pos(m, &index).unwrap()).collect();
        Ok(FiniteGroupOfLieType {
            kind,
            q,
            field,
            n,
            projective,
            elements,
            index,
            identity,
            borel,
            torus,
            unipotent,
            torus_gens,
            torus_orders: orders,
            torus_exponents,
            weyl_lift,
            weyl_matrix,
        })
    }

    fn ops(&self) -> MatOps<'_> {
        MatOps { f: &self.field, n: self.n, projective: self.projective }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &Mat {
        &self.elements[i]
    }

    pub fn position(&self, m: &[Elem]) -> Option<usize> {
        let ops = self.ops();
        self.index.get(&ops.key(&ops.normalize(m.to_vec()))).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let ops = self.ops();
        let m = ops.mul(&self.elements[a], &self.elements[b]);
        self.index[&ops.key(&m)]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn borel(&self) -> &[usize] {
        &self.borel
    }

    pub fn torus(&self) -> &[usize] {
        &self.torus
    }

    pub fn unipotent(&self) -> &[usize] {
        &self.unipotent
    }

    pub fn torus_orders(&self) -> &[i64] {
        &self.torus_orders
    }

    pub fn torus_generators(&self) -> &[usize] {
        &self.torus_gens
    }

    /// Exponent of T(F_q).
    pub fn torus_exponent(&self) -> i64 {
        self.torus_orders.iter().fold(1, |acc, k| acc.lcm(k))
    }

    /// Exponents of the T-component of an element of B.
    pub fn torus_part(&self, b: usize) -> Option<&[i64]> {
        self.torus_exponents.get(&b).map(Vec::as_slice)
    }

    /// Lift of w ∈ W(G,T) = {e, s}: index 0 is e, 1 is s.
    pub fn tits_lift(&self, w: usize) -> usize {
        if w == 0 {
            self.identity
        } else {
            self.weyl_lift
        }
    }

    /// α^∨(−1) for the coroot of the relative root.
    pub fn coroot_of_minus_one(&self) -> Option<usize> {
        let f = &self.field;
        let m1 = f.neg(1);
        let ops = self.ops();
        let d = match self.kind {
            GroupKind::SL2 | GroupKind::PGL2 | GroupKind::GL2 => vec![m1, m1],
            GroupKind::SU3 | GroupKind::PU3 => vec![m1, 1, m1],
            GroupKind::Custom => return None,
        };
        self.position(&ops.diag(&d))
    }

    pub fn characters(&self) -> Vec<FiniteTorusCharacter> {
        let total: i64 = self.torus_orders.iter().product();
        (0..total)
            .map(|code| {
                let mut c = code;
                FiniteTorusCharacter(
                    self.torus_orders
                        .iter()
                        .map(|&k| {
                            let j = c % k;
                            c /= k;
                            QmodZ::from_frac(j, k)
                        })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn validate_character(&self, theta: &FiniteTorusCharacter) -> Result<()> {
        if theta.0.len() != self.torus_orders.len()
            || theta.0.iter().zip(&self.torus_orders).any(|(v, &k)| !v.times(k).is_zero())
        {
            return Err(Error::InvalidCharacter("values are not compatible with the torus generators".into()));
        }
        Ok(())
    }

    /// θ(b) for b ∈ B, with θ trivial on U.
    pub fn theta_on_borel(&self, theta: &FiniteTorusCharacter, b: usize) -> Option<QmodZ> {
        let e = self.torus_exponents.get(&b)?;
        Some(e.iter().zip(&theta.0).fold(QmodZ::zero(), |acc, (k, v)| acc + v.times(*k)))
    }

    /// (s·θ)(t) = θ(ŝ⁻¹ t ŝ).
    pub fn weyl_act(&self, theta: &FiniteTorusCharacter) -> FiniteTorusCharacter {
        FiniteTorusCharacter(
            self.weyl_matrix
                .iter()
                .map(|row| row.iter().zip(&theta.0).fold(QmodZ::zero(), |acc, (m, v)| acc + v.times(*m)))
                .collect(),
        )
    }

    /// #{w ∈ W(G,T) : w·θ = θ}.
    pub fn stabilizer_count(&self, theta: &FiniteTorusCharacter) -> usize {
        1 + usize::from(self.weyl_act(theta) == *theta)
    }

    /// The root datum, Frobenius and relative coroot matching this group, with
    /// characters identified through [`Self::to_root_datum_character`].
    pub fn root_datum_model(&self) -> Option<(RootDatum, FrobeniusAction, Vec<i64>)> {
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let (datum, frob, coroot) = match self.kind {
            GroupKind::SL2 => {
                let d = RootDatum::simply_connected("A1").ok()?;
                let f = FrobeniusAction::split(&d, self.q).ok()?;
                (d, f, vec![1])
            }
            GroupKind::PGL2 => {
                let d = RootDatum::adjoint("A1").ok()?;
                let f = FrobeniusAction::split(&d, self.q).ok()?;
                (d, f, vec![2])
            }
            GroupKind::GL2 => {
                let d = RootDatum::gl(2).ok()?;
                let f = FrobeniusAction::split(&d, self.q).ok()?;
                (d, f, vec![1, -1])
            }
            GroupKind::SU3 | GroupKind::PU3 => {
                let d = if self.kind == GroupKind::SU3 {
                    RootDatum::simply_connected("A2").ok()?
                } else {
                    RootDatum::adjoint("A2").ok()?
                };
                let f = FrobeniusAction::new(&d, swap, self.q).ok()?;
                (d, f, vec![1, 1])
            }
            GroupKind::Custom => return None,
        };
        Some((datum, frob, coroot))
    }

    /// Split kinds: θ ↦ (j_i/(q−1))_i. Unitary kinds: θ_j ↦ (qj, j)/(q²−1).
    pub fn to_root_datum_character(&self, theta: &FiniteTorusCharacter) -> Option<TorusCharacter> {
        match self.kind {
            GroupKind::SL2 | GroupKind::PGL2 | GroupKind::GL2 => {
                Some(TorusCharacter::from_values(theta.0.iter().map(QmodZ::value).collect()))
            }
            GroupKind::SU3 | GroupKind::PU3 => {
                let j = theta.0[0];
                Some(TorusCharacter::from_values(vec![j.times(self.q as i64).value(), j.value()]))
            }
            GroupKind::Custom => None,
        }
    }
}

fn closure(ops: &MatOps<'_>, gens: &[Mat], bound: usize) -> Result<Vec<Mat>> {
    let mut out = vec![ops.identity()];
    let mut seen: std::collections::HashSet<u128> = out.iter().map(|m| ops.key(m)).collect();
    let mut k = 0;
    while k < out.len() {
        for g in gens {
            let x = ops.mul(&out[k], g);
            if seen.insert(ops.key(&x)) {
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

/// A function G → ℤ[C_N] divided by a common denominator.
#[derive(Clone, Debug)]
struct GroupRingFn {
    values: HashMap<usize, Vec<i64>>,
    denominator: i64,
}

impl GroupRingFn {
    fn add_at(&mut self, g: usize, k: usize, n: usize, c: i64) {
        self.values.entry(g).or_insert_with(|| vec![0; n])[k] += c;
    }
}

fn convolve(group: &FiniteGroupOfLieType, a: &GroupRingFn, b: &GroupRingFn, n: usize) -> GroupRingFn {
    let mut out = GroupRingFn { values: HashMap::new(), denominator: a.denominator * b.denominator };
    let mut buf = vec![0i64; n];
    for (&x, va) in &a.values {
        for (&y, vb) in &b.values {
            buf.iter_mut().for_each(|v| *v = 0);
            let mut any = false;
            for (i, &p) in va.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                for (j, &r) in vb.iter().enumerate() {
                    if r != 0 {
                        buf[(i + j) % n] += p * r;
                        any = true;
                    }
                }
            }
            if any {
                let entry = out.values.entry(group.mul(x, y)).or_insert_with(|| vec![0; n]);
                for (e, v) in entry.iter_mut().zip(&buf) {
                    *e += v;
                }
            }
        }
    }
    out
}

fn to_cyclotomic(field: &CyclotomicField, v: Option<&Vec<i64>>, denominator: i64) -> Cyclotomic {
    let mut out = field.zero();
    if let Some(v) = v {
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                out += &field.zeta_pow(k as i64).scale(rat(c, denominator));
            }
        }
    }
    out
}

/// The algebra e·ℂ[G]·e of θ-spherical functions, with basis T_w = e ŵ e for
/// the w whose double coset carries a nonzero such function.
#[derive(Clone, Debug)]
pub struct ThetaSphericalAlgebra {
    field: CyclotomicField,
    q_f: u64,
    kind: GroupKind,
    theta: FiniteTorusCharacter,
    /// Weyl labels (0 = e, 1 = s) of the basis elements.
    basis: Vec<usize>,
    /// structure[i][j][k]: coefficient of T_k in T_i T_j.
    structure: Vec<Vec<Vec<Cyclotomic>>>,
}

/// e·ℂ[G]·e for θ on B; structure constants by exact convolution.
pub fn hecke_fin(group: &FiniteGroupOfLieType, theta: &FiniteTorusCharacter) -> Result<ThetaSphericalAlgebra> {
    group.validate_character(theta)?;
    let n = group.torus_exponent() as usize;
    let field = CyclotomicField::new(n as u32);
    let b_size = group.borel.len() as i64;
    let exponent = |b: usize| -> usize {
        let v = group.theta_on_borel(theta, b).expect("element of B");
        // θ(b)⁻¹ = ζ^{−k}
        (-(v.value() * n as i64).to_integer()).rem_euclid(n as i64) as usize
    };
    let exps: Vec<(usize, usize)> = group.borel.iter().map(|&b| (b, exponent(b))).collect();
    let mut candidates = vec![];
    for w in 0..2 {
        let lift = group.tits_lift(w);
        let mut f = GroupRingFn { values: HashMap::new(), denominator: b_size * b_size };
        for &(b, kb) in &exps {
            let bw = group.mul(b, lift);
            for &(b2, kb2) in &exps {
                f.add_at(group.mul(bw, b2), (kb + kb2) % n, n, 1);
            }
        }
        let at_rep = to_cyclotomic(&field, f.values.get(&lift), f.denominator);
        if !at_rep.is_zero() {
            candidates.push((w, lift, f, at_rep));
        }
    }
    let dim = candidates.len();
    let mut structure = vec![vec![vec![field.zero(); dim]; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let prod = convolve(group, &candidates[i].2, &candidates[j].2, n);
            let coeffs: Vec<Cyclotomic> = candidates
                .iter()
                .map(|(_, lift, _, at_rep)| {
                    let v = to_cyclotomic(&field, prod.values.get(lift), prod.denominator);
                    &v * &at_rep.inverse().expect("nonzero")
                })
                .collect();
            // the product must be exactly Σ_k c_k T_k
            let mut support: Vec<usize> = prod.values.keys().copied().collect();
            for (_, _, f, _) in &candidates {
                support.extend(f.values.keys().copied());
            }
            support.sort_unstable();
            support.dedup();
            for g in support {
                let lhs = to_cyclotomic(&field, prod.values.get(&g), prod.denominator);
                let mut rhs = field.zero();
                for (k, (_, _, f, _)) in candidates.iter().enumerate() {
                    rhs.add_mul(&coeffs[k], &to_cyclotomic(&field, f.values.get(&g), f.denominator));
                }
                if lhs != rhs {
                    return Err(Error::InvariantViolation(
                        "product of spherical functions is not in their span".into(),
                    ));
                }
            }
            structure[i][j] = coeffs;
        }
    }
    let alg = ThetaSphericalAlgebra {
        field,
        q_f: group.q,
        kind: group.kind,
        theta: theta.clone(),
        basis: candidates.iter().map(|c| c.0).collect(),
        structure,
    };
    if !alg.is_associative() || !alg.has_unit() {
        return Err(Error::InvariantViolation("θ-spherical algebra fails the algebra axioms".into()));
    }
    Ok(alg)
}

impl ThetaSphericalAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    pub fn basis_labels(&self) -> &[usize] {
        &self.basis
    }

    pub fn theta(&self) -> &FiniteTorusCharacter {
        &self.theta
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn residue_field_size(&self) -> u64 {
        self.q_f
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Cyclotomic {
        &self.structure[i][j][k]
    }

    pub fn multiply(&self, a: &[Cyclotomic], b: &[Cyclotomic]) -> Vec<Cyclotomic> {
        let d = self.dim();
        let mut out = vec![self.field.zero(); d];
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[j].is_zero() {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for (k, o) in out.iter_mut().enumerate() {
                    o.add_mul(&ab, &self.structure[i][j][k]);
                }
            }
        }
        out
    }

    fn basis_vector(&self, i: usize) -> Vec<Cyclotomic> {
        (0..self.dim()).map(|k| if k == i { self.field.one() } else { self.field.zero() }).collect()
    }

    pub fn is_associative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                (0..d).all(|k| {
                    let (x, y, z) = (self.basis_vector(i), self.basis_vector(j), self.basis_vector(k));
                    self.multiply(&self.multiply(&x, &y), &z) == self.multiply(&x, &self.multiply(&y, &z))
                })
            })
        })
    }

    /// T_e (basis index 0) is a two-sided unit.
    pub fn has_unit(&self) -> bool {
        self.basis.first() == Some(&0)
            && (0..self.dim()).all(|i| {
                let x = self.basis_vector(i);
                self.multiply(&self.basis_vector(0), &x) == x && self.multiply(&x, &self.basis_vector(0)) == x
            })
    }

    /// (a, b) with T′² = a·T_e + b·T′, when the algebra has dimension two.
    pub fn t_prime_square(&self) -> Option<(Cyclotomic, Cyclotomic)> {
        (self.dim() == 2).then(|| (self.structure[1][1][0].clone(), self.structure[1][1][1].clone()))
    }
}

/// The q in (T + 1)(T − q) = 0 for the rescaled generator T = λT′.
pub fn q_parameter(alg: &ThetaSphericalAlgebra) -> Result<Rational> {
    let (a, b) = alg
        .t_prime_square()
        .ok_or_else(|| Error::InvalidInput(format!("algebra has dimension {}, not 2", alg.dim())))?;
    let (a, b) = match (a.as_rational(), b.as_rational()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NonRationalStructureConstants(format!("{a:?}, {b:?}"))),
    };
    let q = solve_quadratic_parameter(a, b)?;
    if exact_log(&q, alg.q_f).is_none() {
        return Err(Error::NoAdmissibleRoot(format!("q = {q} is not a power of {}", alg.q_f)));
    }
    Ok(q)
}

/// The root q ≥ 1 of a(q−1)² = b²q, or 1 when b = 0.
pub fn solve_quadratic_parameter(a: Rational, b: Rational) -> Result<Rational> {
    if b.is_zero() {
        return if a.is_zero() {
            Err(Error::NoAdmissibleRoot("T′ is nilpotent".into()))
        } else {
            Ok(Rational::one())
        };
    }
    if a <= Rational::zero() {
        return Err(Error::NoAdmissibleRoot(format!("a = {a} is not positive")));
    }
    let disc = rat(4, 1) * a + b * b;
    let root = rational_sqrt(&disc).ok_or_else(|| Error::NoAdmissibleRoot(format!("√{disc} is irrational")))?;
    let two_a = rat(2, 1) * a;
    let abs_b = if b < Rational::zero() { -b } else { b };
    let q = ((two_a + b * b) + abs_b * root) / two_a;
    debug_assert!(a * (q - 1) * (q - 1) == b * b * q);
    Ok(q)
}

/// The extension 1 → T → N_G(T)_θ → W_θ → 1 as a cocycle on W_θ valued in T(F_q),
/// from the section w ↦ ŵ.
pub fn torus_normalizer_extension(group: &FiniteGroupOfLieType, theta: &FiniteTorusCharacter) -> Result<Cocycle2> {
    group.validate_character(theta)?;
    let coeff = CoefficientGroup::finite(&group.torus_orders);
    if group.stabilizer_count(theta) == 1 {
        return Ok(Cocycle2::zero(Arc::new(FiniteGroup::trivial()), coeff));
    }
    let s = group.tits_lift(1);
    let square = group.mul(s, s);
    let e = group.torus_part(square).ok_or_else(|| Error::InvariantViolation("ŝ² is not in T".into()))?.to_vec();
    let value: Vec<QmodZ> = e.iter().zip(&group.torus_orders).map(|(&k, &m)| QmodZ::from_frac(k, m)).collect();
    let zero = coeff.zero();
    Cocycle2::from_fn(Arc::new(FiniteGroup::cyclic(2)), coeff, |x, y| {
        if x == 1 && y == 1 {
            value.clone()
        } else {
            zero.clone()
        }
    })
}

/// The pushout of [`torus_normalizer_extension`] along θ.
pub fn theta_pushout(group: &FiniteGroupOfLieType, theta: &FiniteTorusCharacter) -> Result<Cocycle2> {
    let c = torus_normalizer_extension(group, theta)?;
    let chi: Vec<Rational> = theta.0.iter().map(QmodZ::value).collect();
    pushout(&c, &chi)
}

/// One character in a sweep over T(F_q)^∨.
#[derive(Clone, Debug, Serialize)]
pub struct SweepCase {
    pub theta: FiniteTorusCharacter,
    pub weyl_fixed: bool,
    pub dimension: usize,
    pub howlett_lehrer: usize,
    #[serde(serialize_with = "crate::qz::serialize_opt_rational")]
    pub q_parameter: Option<Rational>,
    /// Pairing of θ with the norm of the relative coroot.
    pub norm_pairing: Option<QmodZ>,
}

pub fn sweep(group: &FiniteGroupOfLieType) -> Result<Vec<SweepCase>> {
    let model = group.root_datum_model();
    group
        .characters()
        .into_iter()
        .map(|theta| {
            let alg = hecke_fin(group, &theta)?;
            let q_parameter = if alg.dim() == 2 { Some(q_parameter(&alg)?) } else { None };
            let norm_pairing = match (&model, group.to_root_datum_character(&theta)) {
                (Some((_, frob, coroot)), Some(t)) => Some(crate::rootdata::norm_pairing(&t, coroot, frob)?),
                _ => None,
            };
            Ok(SweepCase {
                weyl_fixed: group.weyl_act(&theta) == theta,
                dimension: alg.dim(),
                howlett_lehrer: group.stabilizer_count(&theta),
                q_parameter,
                norm_pairing,
                theta,
            })
        })
        .collect()
}

/// Serializable summary of a θ-spherical algebra.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub kind: GroupKind,
    pub q: u64,
    pub group_order: usize,
    pub borel_order: usize,
    pub torus_order: usize,
    pub theta: FiniteTorusCharacter,
    pub dimension: usize,
    pub t_prime_square: Option<(String, String)>,
    #[serde(serialize_with = "crate::qz::serialize_opt_rational")]
    pub q_parameter: Option<Rational>,
    pub normalizer_extension_splits: bool,
}

pub fn oracle_report(group: &FiniteGroupOfLieType, theta: &FiniteTorusCharacter) -> Result<OracleReport> {
    let alg = hecke_fin(group, theta)?;
    let q_parameter = if alg.dim() == 2 { Some(q_parameter(&alg)?) } else { None };
    Ok(OracleReport {
        kind: group.kind,
        q: group.q,
        group_order: group.order(),
        borel_order: group.borel.len(),
        torus_order: group.torus.len(),
        theta: theta.clone(),
        dimension: alg.dim(),
        t_prime_square: alg.t_prime_square().map(|(a, b)| (format!("{a:?}"), format!("{b:?}"))),
        q_parameter,
        normalizer_extension_splits: crate::extensions::is_split(&theta_pushout(group, theta)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre(g: &FiniteGroupOfLieType) -> FiniteTorusCharacter {
        let t = FiniteTorusCharacter(vec![QmodZ::from_frac(1, 2)]);
        assert!(g.validate_character(&t).is_ok());
        t
    }

    #[test]
    fn group_orders() {
        let g = FiniteGroupOfLieType::build(GroupKind::SL2, 3).unwrap();
        assert_eq!((g.order(), g.borel().len(), g.torus().len()), (24, 6, 2));
        assert_eq!(FiniteGroupOfLieType::build(GroupKind::SL2, 7).unwrap().order(), 336);
        let su = FiniteGroupOfLieType::build(GroupKind::SU3, 2).unwrap();
        assert_eq!((su.order(), su.torus().len(), su.unipotent().len()), (216, 3, 8));
        for kind in GroupKind::BUILTIN {
            for q in [2u64, 3, 4, 5] {
                if kind.is_unitary() && q > 3 {
                    continue;
                }
                let g = FiniteGroupOfLieType::build(kind, q).unwrap();
                assert_eq!(g.order() as u128, kind.order_formula(q).unwrap(), "{kind}({q})");
            }
        }
    }

    #[test]
    fn guards() {
        assert_eq!(FiniteGroupOfLieType::build(GroupKind::SL2, 6).unwrap_err(), Error::BadPrimePower(6));
        assert_eq!(
            FiniteGroupOfLieType::build_bounded(GroupKind::SL2, 7, 100).unwrap_err(),
            Error::GroupTooLarge { bound: 100 }
        );
    }

    #[test]
    fn tits_lifts() {
        for kind in GroupKind::BUILTIN {
            for q in [2u64, 3, 5] {
                if kind.is_unitary() && q > 3 {
                    continue;
                }
                let g = FiniteGroupOfLieType::build(kind, q).unwrap();
                assert_eq!(g.tits_lift(0), g.identity());
                let s = g.tits_lift(1);
                assert_eq!(Some(g.mul(s, s)), g.coroot_of_minus_one(), "{kind}({q})");
            }
        }
        let g = FiniteGroupOfLieType::build(GroupKind::SL2, 5).unwrap();
        let f = g.field();
        assert_eq!(g.element(g.tits_lift(1)), &vec![0, 1, f.neg(1), 0]);
    }

    #[test]
    fn legendre_algebra() {
        for q in [3u64, 5, 7] {
            let g = FiniteGroupOfLieType::build(GroupKind::SL2, q).unwrap();
            let alg = hecke_fin(&g, &legendre(&g)).unwrap();
            assert_eq!(alg.dim(), 2);
            let (a, b) = alg.t_prime_square().unwrap();
            // ŝ² = −I contributes θ(−I) = χ(−1) = (−1)^{(q−1)/2}
            let sign = if q % 4 == 1 { 1 } else { -1 };
            assert_eq!(a.as_rational(), Some(rat(sign, q as i64)));
            assert!(b.is_zero());
            assert_eq!(q_parameter(&alg).unwrap(), Rational::one());
        }
    }

    #[test]
    fn iwahori_case() {
        for kind in [GroupKind::SL2, GroupKind::PGL2, GroupKind::GL2] {
            for q in [2u64, 3, 4, 5] {
                let g = FiniteGroupOfLieType::build(kind, q).unwrap();
                let one = FiniteTorusCharacter(vec![QmodZ::zero(); g.torus_orders().len()]);
                let alg = hecke_fin(&g, &one).unwrap();
                let (a, b) = alg.t_prime_square().unwrap();
                assert_eq!(a.as_rational(), Some(rat(1, q as i64)));
                assert_eq!(b.as_rational(), Some(rat(q as i64 - 1, q as i64)));
                assert_eq!(q_parameter(&alg).unwrap(), rat(q as i64, 1));
            }
        }
        let su = FiniteGroupOfLieType::build(GroupKind::SU3, 2).unwrap();
        let alg = hecke_fin(&su, &FiniteTorusCharacter(vec![QmodZ::zero()])).unwrap();
        assert_eq!(q_parameter(&alg).unwrap(), rat(8, 1));
    }

    #[test]
    fn generic_characters_have_dimension_one() {
        let g = FiniteGroupOfLieType::build(GroupKind::SL2, 7).unwrap();
        let theta = FiniteTorusCharacter(vec![QmodZ::from_frac(1, 6)]);
        assert_eq!(g.weyl_act(&theta), FiniteTorusCharacter(vec![QmodZ::from_frac(5, 6)]));
        assert_eq!(hecke_fin(&g, &theta).unwrap().dim(), 1);
        assert!(q_parameter(&hecke_fin(&g, &theta).unwrap()).is_err());
    }

    #[test]
    fn pgl2_quadratic_character() {
        // θ(diag(x,1)) = χ(x) is the restriction of χ∘det, so Ind θ = χ ⊗ Ind 1 has
        // constituents of dimension 1 and q
        for q in [3u64, 5, 7] {
            let g = FiniteGroupOfLieType::build(GroupKind::PGL2, q).unwrap();
            let theta = FiniteTorusCharacter(vec![QmodZ::from_frac(1, 2)]);
            let alg = hecke_fin(&g, &theta).unwrap();
            assert_eq!(q_parameter(&alg).unwrap(), rat(q as i64, 1));
            let (a, b) = alg.t_prime_square().unwrap();
            let s = g.tits_lift(1);
            let chi_det = |m: usize| -> QmodZ {
                let e = g.element(m);
                let f = g.field();
                let det = f.sub(f.mul(e[0], e[3]), f.mul(e[1], e[2]));
                QmodZ::from_frac(i64::from(f.log(det).unwrap()), 2)
            };
            for &t in g.torus() {
                assert_eq!(Some(chi_det(t)), g.theta_on_borel(&theta, t));
            }
            assert!(chi_det(g.mul(s, s)).is_zero());
            assert_eq!(a.as_rational(), Some(rat(1, q as i64)));
            assert_eq!(b.as_rational().map(|b| b * b), Some(rat((q as i64 - 1).pow(2), (q * q) as i64)));
        }
    }

    #[test]
    fn howlett_lehrer_sweeps() {
        for kind in GroupKind::BUILTIN {
            for q in [2u64, 3, 4] {
                if kind.is_unitary() && q > 2 || kind == GroupKind::GL2 && q > 3 {
                    continue;
                }
                let g = FiniteGroupOfLieType::build(kind, q).unwrap();
                for case in sweep(&g).unwrap() {
                    assert_eq!(case.dimension, case.howlett_lehrer, "{kind}({q}) {:?}", case.theta);
                    assert_eq!(case.dimension == 2, case.weyl_fixed);
                }
            }
        }
    }

    #[test]
    fn normalizer_extension() {
        let g5 = FiniteGroupOfLieType::build(GroupKind::SL2, 5).unwrap();
        let c5 = theta_pushout(&g5, &legendre(&g5)).unwrap();
        assert!(c5.value(1, 1)[0].is_zero());
        let g7 = FiniteGroupOfLieType::build(GroupKind::SL2, 7).unwrap();
        let c7 = theta_pushout(&g7, &legendre(&g7)).unwrap();
        assert_eq!(c7.value(1, 1)[0], QmodZ::from_frac(1, 2));
        assert!(crate::extensions::is_split(&c7));
        // the unpushed extension by T(F_7) ≅ ℤ/6 is the nonsplit ℤ/4 ⊂ ℤ/12 shape
        let raw = torus_normalizer_extension(&g7, &legendre(&g7)).unwrap();
        assert_eq!(raw.value(1, 1)[0], QmodZ::from_frac(3, 6));
        let trivial = theta_pushout(&g7, &FiniteTorusCharacter(vec![QmodZ::zero()])).unwrap();
        assert!(crate::extensions::is_split(&trivial));
    }

    #[test]
    fn custom_group_matches_builtin() {
        // SL2(F_3) from generators
        let m1 = 2;
        let def = CustomGroup {
            field_size: 3,
            q: None,
            dimension: 2,
            projective: false,
            generators: vec![vec![1, 1, 0, 1], vec![0, 1, m1, 0]],
            torus: vec![(vec![2, 0, 0, 2], 2)],
            unipotent_generators: vec![vec![1, 1, 0, 1]],
            weyl_lift: vec![0, 1, m1, 0],
            expected_order: Some(24),
        };
        let g = FiniteGroupOfLieType::custom(&def, 1000).unwrap();
        assert_eq!(g.borel().len(), 6);
        let theta = FiniteTorusCharacter(vec![QmodZ::from_frac(1, 2)]);
        let alg = hecke_fin(&g, &theta).unwrap();
        assert_eq!(q_parameter(&alg).unwrap(), Rational::one());
        let bad = CustomGroup { expected_order: Some(25), ..def };
        assert!(FiniteGroupOfLieType::custom(&bad, 1000).is_err());
    }

    #[test]
    fn quadratic_solver() {
        for q in 1..20i64 {
            let a = rat(1, q);
            let b = rat(q - 1, q);
            assert_eq!(solve_quadratic_parameter(a, b).unwrap(), rat(q, 1));
            // rescaling T′ by λ leaves q unchanged
            let l = rat(3, 7);
            assert_eq!(solve_quadratic_parameter(a / (l * l), b / l).unwrap(), rat(q, 1));
        }
        assert!(solve_quadratic_parameter(rat(1, 1), rat(1, 1)).is_err());
    }
}
