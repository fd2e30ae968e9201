//! Root data, Frobenius actions and torus characters.
//!
//! Both lattices are ℤⁿ with the dot-product pairing; roots live in X* and
//! coroots in X_*.

use std::collections::{HashMap, HashSet, VecDeque};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
pub use crate::intmat::{smith_normal_form, Snf};
use crate::qz::{dot, QmodZ, Rational};

/// Default guard on enumerated group orders.
pub const DEFAULT_MAX_GROUP_ORDER: usize = 1_000_000;

const MAX_ROOTS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Root {
    pub root: Vec<i64>,
    pub coroot: Vec<i64>,
    /// Coordinates in the basis of simple roots.
    pub coeffs: Vec<i64>,
}

impl Root {
    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    rank: usize,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
    roots: Vec<Root>,
    root_index: HashMap<Vec<i64>, usize>,
}

/// Cartan matrix a_ij = ⟨α_i, α_j^∨⟩ of a named type such as "A2", "C2", "A1xA1".
pub fn cartan_matrix(kind: &str) -> Result<Vec<Vec<i64>>> {
    let parts: Vec<&str> = kind.split(['x', '*']).filter(|p| !p.is_empty()).collect();
    if parts.len() > 1 {
        let blocks = parts.iter().map(|p| cartan_matrix(p)).collect::<Result<Vec<_>>>()?;
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut out = vec![vec![0; n]; n];
        let mut off = 0;
        for b in blocks {
            for (i, row) in b.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    out[off + i][off + j] = *x;
                }
            }
            off += b.len();
        }
        return Ok(out);
    }
    let bad = || Error::InvalidDatum(format!("unknown Cartan type {kind:?}"));
    let (letter, num) = kind.split_at(1);
    let n: usize = num.parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 2;
    }
    let chain = |a: &mut Vec<Vec<i64>>, len: usize| {
        for i in 0..len.saturating_sub(1) {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    };
    match letter {
        "A" => chain(&mut a, n),
        "B" if n >= 2 => {
            chain(&mut a, n);
            a[n - 2][n - 1] = -2;
        }
        "C" if n >= 2 => {
            chain(&mut a, n);
            a[n - 1][n - 2] = -2;
        }
        "D" if n >= 4 => {
            chain(&mut a, n - 1);
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
        }
        "G" if n == 2 => {
            a[0][1] = -1;
            a[1][0] = -3;
        }
        "F" if n == 4 => {
            chain(&mut a, 4);
            a[1][2] = -2;
        }
        "E" if (6..=8).contains(&n) => {
            // Bourbaki labelling: 1-3-4-5-..., 2 attached to 4
            let edges: Vec<(usize, usize)> =
                [(0, 2), (2, 3), (3, 4), (1, 3)].into_iter().chain((4..n - 1).map(|i| (i, i + 1))).collect();
            for (i, j) in edges {
                a[i][j] = -1;
                a[j][i] = -1;
            }
        }
        _ => return Err(bad()),
    }
    Ok(a)
}

impl RootDatum {
    pub fn new(rank: usize, simple_roots: Vec<Vec<i64>>, simple_coroots: Vec<Vec<i64>>) -> Result<Self> {
        let problems = Self::diagnostics(rank, &simple_roots, &simple_coroots);
        if !problems.is_empty() {
            return Err(Error::InvalidDatum(problems.join("; ")));
        }
        let mut d = RootDatum { rank, simple_roots, simple_coroots, roots: vec![], root_index: HashMap::new() };
        d.generate_roots()?;
        Ok(d)
    }

    /// Every violated structural condition (empty when the data define a finite root datum).
    pub fn diagnostics(rank: usize, simple_roots: &[Vec<i64>], simple_coroots: &[Vec<i64>]) -> Vec<String> {
        let mut out = vec![];
        if rank == 0 {
            out.push("rank must be positive".into());
        }
        if simple_roots.len() != simple_coroots.len() {
            out.push(format!("{} simple roots but {} simple coroots", simple_roots.len(), simple_coroots.len()));
            return out;
        }
        for (i, v) in simple_roots.iter().chain(simple_coroots).enumerate() {
            if v.len() != rank {
                out.push(format!("vector {i} has length {} instead of rank {rank}", v.len()));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let l = simple_roots.len();
        for i in 0..l {
            for j in 0..l {
                let a = dot(&simple_roots[i], &simple_coroots[j]);
                if i == j && a != 2 {
                    out.push(format!("<alpha_{i}, alpha_{i}^vee> = {a}, expected 2"));
                }
                if i != j {
                    let b = dot(&simple_roots[j], &simple_coroots[i]);
                    if a > 0 {
                        out.push(format!("Cartan entry ({i},{j}) = {a} is positive"));
                    }
                    if (a == 0) != (b == 0) {
                        out.push(format!("Cartan entries ({i},{j}) and ({j},{i}) are not both zero"));
                    }
                }
            }
        }
        if l > 0 && IntMatrix::from_rows(simple_roots).rank() < l {
            out.push("simple roots are linearly dependent".into());
        }
        if l > 0 && IntMatrix::from_rows(simple_coroots).rank() < l {
            out.push("simple coroots are linearly dependent".into());
        }
        if out.is_empty() {
            // finite type: the root closure must terminate
            let probe = RootDatum {
                rank,
                simple_roots: simple_roots.to_vec(),
                simple_coroots: simple_coroots.to_vec(),
                roots: vec![],
                root_index: HashMap::new(),
            };
            let mut probe = probe;
            if probe.generate_roots().is_err() {
                out.push("Cartan matrix is not of finite type".into());
            }
        }
        out
    }

    fn generate_roots(&mut self) -> Result<()> {
        let l = self.simple_roots.len();
        let mut roots = vec![];
        let mut index = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..l {
            let mut coeffs = vec![0; l];
            coeffs[i] = 1;
            queue.push_back(Root {
                root: self.simple_roots[i].clone(),
                coroot: self.simple_coroots[i].clone(),
                coeffs,
            });
        }
        while let Some(r) = queue.pop_front() {
            if index.contains_key(&r.root) {
                continue;
            }
            index.insert(r.root.clone(), roots.len());
            for j in 0..l {
                let a = dot(&r.root, &self.simple_coroots[j]);
                let b = dot(&self.simple_roots[j], &r.coroot);
                let root: Vec<i64> = r.root.iter().zip(&self.simple_roots[j]).map(|(x, y)| x - a * y).collect();
                if index.contains_key(&root) {
                    continue;
                }
                let coroot = r.coroot.iter().zip(&self.simple_coroots[j]).map(|(x, y)| x - b * y).collect();
                let mut coeffs = r.coeffs.clone();
                coeffs[j] -= a;
                queue.push_back(Root { root, coroot, coeffs });
            }
            roots.push(r);
            if roots.len() > MAX_ROOTS {
                return Err(Error::InvalidDatum("root system is not finite".into()));
            }
        }
        for r in &roots {
            if !(r.coeffs.iter().all(|&c| c >= 0) || r.coeffs.iter().all(|&c| c <= 0)) {
                return Err(Error::InvalidDatum("root with mixed-sign coordinates".into()));
            }
        }
        self.roots = roots;
        self.root_index = index;
        Ok(())
    }

    /// Simply connected datum (X_* = coroot lattice) for a Cartan type.
    pub fn simply_connected(kind: &str) -> Result<Self> {
        let a = cartan_matrix(kind)?;
        let n = a.len();
        let coroots = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        RootDatum::new(n, a.clone(), coroots)
    }

    /// Adjoint datum (X* = root lattice) for a Cartan type.
    pub fn adjoint(kind: &str) -> Result<Self> {
        let a = cartan_matrix(kind)?;
        let n = a.len();
        let roots = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let coroots = (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect();
        RootDatum::new(n, roots, coroots)
    }

    /// GL_n in the standard coordinates.
    pub fn gl(n: usize) -> Result<Self> {
        let simple: Vec<Vec<i64>> =
            (0..n - 1).map(|i| (0..n).map(|k| i64::from(k == i) - i64::from(k == i + 1)).collect()).collect();
        RootDatum::new(n, simple.clone(), simple)
    }

    /// The dual datum: roots and coroots exchanged.
    pub fn dual(&self) -> RootDatum {
        RootDatum::new(self.rank, self.simple_coroots.clone(), self.simple_roots.clone())
            .expect("dual of a valid datum is valid")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn semisimple_rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn is_semisimple(&self) -> bool {
        self.rank == self.simple_roots.len()
    }

    pub fn simple_roots(&self) -> &[Vec<i64>] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Vec<i64>] {
        &self.simple_coroots
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.is_positive())
    }

    pub fn find_root(&self, root: &[i64]) -> Option<&Root> {
        self.root_index.get(root).map(|&i| &self.roots[i])
    }

    pub fn coroot_of(&self, root: &[i64]) -> Option<&[i64]> {
        self.find_root(root).map(|r| r.coroot.as_slice())
    }

    pub fn is_root(&self, v: &[i64]) -> bool {
        self.root_index.contains_key(v)
    }

    pub fn cartan(&self) -> Vec<Vec<i64>> {
        let l = self.simple_roots.len();
        (0..l).map(|i| (0..l).map(|j| dot(&self.simple_roots[i], &self.simple_coroots[j])).collect()).collect()
    }

    /// Irreducible components as sets of simple-root indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let a = self.cartan();
        let l = a.len();
        let mut seen = vec![false; l];
        let mut comps = vec![];
        for s in 0..l {
            if seen[s] {
                continue;
            }
            let mut comp = vec![];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(i) = stack.pop() {
                comp.push(i);
                for j in 0..l {
                    if !seen[j] && a[i][j] != 0 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Index of the component containing a root.
    pub fn component_of(&self, root: &Root) -> usize {
        let comps = self.components();
        let i = root.coeffs.iter().position(|&c| c != 0).expect("nonzero root");
        comps.iter().position(|c| c.contains(&i)).unwrap()
    }

    /// Highest root of each irreducible component (same order as `components`).
    pub fn highest_roots(&self) -> Vec<&Root> {
        self.components()
            .iter()
            .map(|comp| {
                self.positive_roots()
                    .filter(|r| r.coeffs.iter().enumerate().all(|(i, &c)| c == 0 || comp.contains(&i)))
                    .max_by_key(|r| r.height())
                    .expect("component has roots")
            })
            .collect()
    }

    /// s_α on X*: x ↦ x − ⟨x, α^∨⟩ α.
    pub fn reflect(&self, root: &Root, x: &[i64]) -> Vec<i64> {
        let a = dot(x, &root.coroot);
        x.iter().zip(&root.root).map(|(xi, ri)| xi - a * ri).collect()
    }

    /// s_α on X_*: y ↦ y − ⟨α, y⟩ α^∨.
    pub fn coreflect(&self, root: &Root, y: &[i64]) -> Vec<i64> {
        let a = dot(&root.root, y);
        y.iter().zip(&root.coroot).map(|(yi, ci)| yi - a * ci).collect()
    }

    /// Matrix of s_α acting on X*.
    pub fn reflection_matrix(&self, root: &Root) -> IntMatrix {
        let n = self.rank;
        let mut m = IntMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] -= root.root[i] * root.coroot[j];
            }
        }
        m
    }

    /// Does the lattice automorphism `m` (on X*) permute the roots?
    pub fn preserves_roots(&self, m: &IntMatrix) -> bool {
        self.roots.iter().all(|r| self.is_root(&m.apply(&r.root)))
    }
}

/// An element of the finite Weyl group, with its actions on both lattices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    /// Action on X*.
    pub on_characters: IntMatrix,
    /// Action on X_* (inverse transpose).
    pub on_cocharacters: IntMatrix,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        WeylElement { on_characters: IntMatrix::identity(n), on_cocharacters: IntMatrix::identity(n) }
    }

    pub fn from_character_matrix(m: IntMatrix) -> Self {
        let co = m.inverse_unimodular().expect("lattice automorphism").transpose();
        WeylElement { on_characters: m, on_cocharacters: co }
    }

    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement {
            on_characters: self.on_characters.mul(&other.on_characters),
            on_cocharacters: self.on_cocharacters.mul(&other.on_cocharacters),
        }
    }

    pub fn inverse(&self) -> WeylElement {
        WeylElement { on_characters: self.on_cocharacters.transpose(), on_cocharacters: self.on_characters.transpose() }
    }

    pub fn is_identity(&self) -> bool {
        self.on_characters.is_identity()
    }

    pub fn act_theta(&self, theta: &TorusCharacter) -> TorusCharacter {
        TorusCharacter::from_values(self.on_characters.apply_rat(&theta.rationals()))
    }
}

/// A finite group of lattice automorphisms given by its elements.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    elements: Vec<WeylElement>,
    index: HashMap<IntMatrix, usize>,
}

impl WeylGroup {
    /// Closure of the given generators (acting on X*), with a size guard.
    pub fn generate(rank: usize, generators: &[IntMatrix], bound: usize) -> Result<WeylGroup> {
        let gens: Vec<WeylElement> = generators.iter().cloned().map(WeylElement::from_character_matrix).collect();
        let id = WeylElement::identity(rank);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id.on_characters.clone(), 0)]);
        let mut k = 0;
        while k < elements.len() {
            for g in &gens {
                let x = g.compose(&elements[k]);
                if !index.contains_key(&x.on_characters) {
                    if elements.len() >= bound {
                        return Err(Error::GroupTooLarge { bound });
                    }
                    index.insert(x.on_characters.clone(), elements.len());
                    elements.push(x);
                }
            }
            k += 1;
        }
        Ok(WeylGroup { elements, index })
    }

    pub fn from_elements(rank: usize, elements: Vec<WeylElement>) -> WeylGroup {
        let mut elements = elements;
        if elements.is_empty() {
            elements.push(WeylElement::identity(rank));
        }
        let index = elements.iter().enumerate().map(|(i, e)| (e.on_characters.clone(), i)).collect();
        WeylGroup { elements, index }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn contains(&self, m: &IntMatrix) -> bool {
        self.index.contains_key(m)
    }

    pub fn position(&self, m: &IntMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn is_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| self.contains(&a.on_characters.mul(&b.on_characters))))
    }

    pub fn is_abelian(&self) -> bool {
        self.elements.iter().all(|a| {
            self.elements.iter().all(|b| a.on_characters.mul(&b.on_characters) == b.on_characters.mul(&a.on_characters))
        })
    }
}

pub fn weyl_group(datum: &RootDatum) -> Result<WeylGroup> {
    weyl_group_bounded(datum, DEFAULT_MAX_GROUP_ORDER)
}

pub fn weyl_group_bounded(datum: &RootDatum, bound: usize) -> Result<WeylGroup> {
    let gens: Vec<IntMatrix> =
        datum.roots().iter().filter(|r| r.height() == 1).map(|r| datum.reflection_matrix(r)).collect();
    WeylGroup::generate(datum.rank(), &gens, bound)
}

/// Subgroup of W generated by the reflections in the given roots.
pub fn reflection_subgroup(datum: &RootDatum, roots: &[&Root], bound: usize) -> Result<WeylGroup> {
    let gens: Vec<IntMatrix> = roots.iter().map(|r| datum.reflection_matrix(r)).collect();
    WeylGroup::generate(datum.rank(), &gens, bound)
}

/// Order of the Weyl group of a named irreducible type (classification formula).
pub fn weyl_order_formula(kind: &str) -> Option<u64> {
    let fact = |n: u64| (1..=n).product::<u64>();
    kind.split(['x', '*']).filter(|p| !p.is_empty()).try_fold(1u64, |acc, part| {
        let (letter, num) = part.split_at(1);
        let n: u64 = num.parse().ok()?;
        let o = match letter {
            "A" => fact(n + 1),
            "B" | "C" => (1u64 << n) * fact(n),
            "D" => (1u64 << (n - 1)) * fact(n),
            "G" if n == 2 => 12,
            "F" if n == 4 => 1152,
            "E" if n == 6 => 51840,
            "E" if n == 7 => 2903040,
            "E" if n == 8 => 696729600,
            _ => return None,
        };
        Some(acc * o)
    })
}

/// A finite-order automorphism of X* permuting the roots, and the residue field size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusAction {
    matrix: IntMatrix,
    q: u64,
    order: usize,
}

const MAX_FROBENIUS_ORDER: usize = 720;

pub fn is_prime_power(q: u64) -> bool {
    prime_power(q).is_some()
}

/// (p, k) with q = p^k.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut v = q;
    let mut k = 0;
    while v.is_multiple_of(p) {
        v /= p;
        k += 1;
    }
    (v == 1).then_some((p, k))
}

impl FrobeniusAction {
    pub fn new(datum: &RootDatum, matrix: IntMatrix, q: u64) -> Result<Self> {
        let problems = Self::diagnostics(datum, &matrix, q);
        if !problems.is_empty() {
            return Err(Error::InvalidFrobenius(problems.join("; ")));
        }
        let order = matrix_order(&matrix).unwrap();
        Ok(FrobeniusAction { matrix, q, order })
    }

    pub fn split(datum: &RootDatum, q: u64) -> Result<Self> {
        FrobeniusAction::new(datum, IntMatrix::identity(datum.rank()), q)
    }

    pub fn diagnostics(datum: &RootDatum, matrix: &IntMatrix, q: u64) -> Vec<String> {
        let mut out = vec![];
        if !is_prime_power(q) {
            out.push(format!("q = {q} is not a prime power"));
        }
        if matrix.rows() != datum.rank() || matrix.cols() != datum.rank() {
            out.push("Frobenius matrix has the wrong shape".into());
            return out;
        }
        if matrix_order(matrix).is_none() {
            out.push("Frobenius matrix does not have finite order".into());
            return out;
        }
        if !datum.preserves_roots(matrix) {
            out.push("Frobenius matrix does not permute the roots".into());
        }
        let t = matrix.transpose();
        if !datum.roots().iter().all(|r| datum.roots().iter().any(|s| s.coroot == t.apply(&r.coroot))) {
            out.push("transpose of the Frobenius matrix does not permute the coroots".into());
        }
        out
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Action on X_* used for orbits of coroots.
    pub fn on_cocharacters(&self, y: &[i64]) -> Vec<i64> {
        self.matrix.transpose().apply(y)
    }

    /// Smallest d ≥ 1 with F₀^d y = y.
    pub fn orbit_length(&self, y: &[i64]) -> usize {
        let mut cur = self.on_cocharacters(y);
        let mut d = 1;
        while cur != y {
            cur = self.on_cocharacters(&cur);
            d += 1;
        }
        d
    }
}

fn matrix_order(m: &IntMatrix) -> Option<usize> {
    if m.rows() != m.cols() {
        return None;
    }
    let mut cur = m.clone();
    for k in 1..=MAX_FROBENIUS_ORDER {
        if cur.is_identity() {
            return Some(k);
        }
        cur = cur.mul(m);
    }
    None
}

/// A character of the finite torus, as an element of X* ⊗ ℚ/ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TorusCharacter {
    values: Vec<QmodZ>,
}

impl TorusCharacter {
    /// θ = numerators / denominator, normalised into [0,1)ⁿ.
    pub fn new(numerators: &[i64], denominator: i64) -> Result<Self> {
        if denominator <= 0 {
            return Err(Error::InvalidCharacter(format!("denominator {denominator} must be positive")));
        }
        Ok(TorusCharacter { values: numerators.iter().map(|&n| QmodZ::from_frac(n, denominator)).collect() })
    }

    pub fn zero(rank: usize) -> Self {
        TorusCharacter { values: vec![QmodZ::zero(); rank] }
    }

    pub fn from_values(values: Vec<Rational>) -> Self {
        TorusCharacter { values: values.into_iter().map(QmodZ::new).collect() }
    }

    pub fn values(&self) -> &[QmodZ] {
        &self.values
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn rationals(&self) -> Vec<Rational> {
        self.values.iter().map(QmodZ::value).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(QmodZ::is_zero)
    }

    /// Common denominator of the coordinates.
    pub fn denominator(&self) -> i64 {
        self.values.iter().fold(1, |acc, v| acc.lcm(&v.order()))
    }

    pub fn numerators(&self) -> Vec<i64> {
        let d = self.denominator();
        self.values.iter().map(|v| *(v.value() * d).numer()).collect()
    }

    /// Conditions for θ to be a character of T(k_F) under `frob`.
    pub fn diagnostics(&self, frob: &FrobeniusAction) -> Vec<String> {
        let mut out = vec![];
        if self.rank() != frob.matrix().rows() {
            out.push("character has the wrong rank".into());
            return out;
        }
        let q = frob.q() as i64;
        let image = frob.matrix().apply_rat(&self.rationals());
        let bad: Vec<usize> =
            (0..self.rank()).filter(|&i| !QmodZ::new(image[i] * q - self.values[i].value()).is_zero()).collect();
        if !bad.is_empty() {
            out.push(format!("(q*F0 - 1)*theta != 0 in coordinates {bad:?}"));
        }
        let qd = (frob.q() as i128).pow(frob.order() as u32) - 1;
        if qd % i128::from(self.denominator()) != 0 {
            out.push(format!("denominator {} does not divide q^{} - 1", self.denominator(), frob.order()));
        }
        out
    }

    pub fn validate(&self, frob: &FrobeniusAction) -> Result<()> {
        let d = self.diagnostics(frob);
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCharacter(d.join("; ")))
        }
    }
}

/// ⟨θ, y⟩ mod 1.
pub fn pairing(theta: &TorusCharacter, y: &[i64]) -> QmodZ {
    QmodZ::new(crate::qz::dot_rat_int(&theta.rationals(), y))
}

/// ⟨θ, Σ_{i<d} (q F₀)^i α^∨⟩ with d the F₀-orbit length of α^∨.
pub fn norm_pairing(theta: &TorusCharacter, coroot: &[i64], frob: &FrobeniusAction) -> Result<QmodZ> {
    theta.validate(frob)?;
    Ok(norm_pairing_unchecked(theta, coroot, frob))
}

fn norm_pairing_unchecked(theta: &TorusCharacter, coroot: &[i64], frob: &FrobeniusAction) -> QmodZ {
    let d = frob.orbit_length(coroot);
    let mut sum = QmodZ::zero();
    let mut y = coroot.to_vec();
    let mut qi: i64 = 1;
    for _ in 0..d {
        sum += pairing(theta, &y).times(qi);
        y = frob.on_cocharacters(&y);
        qi = qi.wrapping_mul(frob.q() as i64);
    }
    sum
}

/// Non-singularity: no norm of a coroot is orthogonal to θ.
///
/// With Q = q^d the degree of the splitting field of α^∨ and ν the base
/// norm pairing, checks ν ≠ 0 and (1 + Q + … + Q^{m−1}) ν ≠ 0 for
/// 1 ≤ m < ord(ν).
pub fn is_nonsingular(theta: &TorusCharacter, datum: &RootDatum, frob: &FrobeniusAction) -> Result<bool> {
    theta.validate(frob)?;
    for r in datum.roots() {
        let nu = norm_pairing_unchecked(theta, &r.coroot, frob);
        if nu.is_zero() {
            return Ok(false);
        }
        let d = frob.orbit_length(&r.coroot) as u32;
        let big_q = (frob.q() as i64).pow(d);
        let ord = nu.order();
        let mut factor: i64 = 0;
        let mut qpow: i64 = 1;
        for _ in 1..ord {
            factor = (factor + qpow).rem_euclid(ord);
            qpow = (qpow * big_q).rem_euclid(ord);
            if nu.times(factor).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Roots orthogonal to θ.
pub fn orthogonal_roots<'a>(datum: &'a RootDatum, theta: &TorusCharacter) -> Vec<&'a Root> {
    datum.roots().iter().filter(|r| pairing(theta, &r.coroot).is_zero()).collect()
}

/// Whether the root set `roots` (given as vectors) is stable under the matrix.
pub fn stabilizes_set(m: &IntMatrix, roots: &[Vec<i64>]) -> bool {
    let set: HashSet<&Vec<i64>> = roots.iter().collect();
    roots.iter().all(|r| set.contains(&m.apply(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qz::rat;

    #[test]
    fn weyl_group_small_orders() {
        assert_eq!(weyl_group(&RootDatum::simply_connected("A1").unwrap()).unwrap().order(), 2);
        let a2 = weyl_group(&RootDatum::simply_connected("A2").unwrap()).unwrap();
        assert_eq!(a2.order(), 6);
        assert!(a2.is_closed());
        assert_eq!(weyl_group(&RootDatum::adjoint("C2").unwrap()).unwrap().order(), 8);
    }

    #[test]
    fn weyl_group_guard() {
        let d = RootDatum::simply_connected("A3").unwrap();
        assert_eq!(weyl_group_bounded(&d, 10).unwrap_err(), Error::GroupTooLarge { bound: 10 });
    }

    #[test]
    fn weyl_orders_match_classification() {
        for kind in ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "G2", "A1xA1", "A2xB2"] {
            for d in [RootDatum::simply_connected(kind).unwrap(), RootDatum::adjoint(kind).unwrap()] {
                assert_eq!(weyl_group(&d).unwrap().order() as u64, weyl_order_formula(kind).unwrap(), "{kind}");
            }
        }
    }

    #[test]
    fn root_counts() {
        assert_eq!(RootDatum::simply_connected("A2").unwrap().roots().len(), 6);
        assert_eq!(RootDatum::simply_connected("C2").unwrap().roots().len(), 8);
        assert_eq!(RootDatum::simply_connected("G2").unwrap().roots().len(), 12);
        assert_eq!(RootDatum::simply_connected("E6").unwrap().roots().len(), 72);
        assert_eq!(RootDatum::simply_connected("D4").unwrap().roots().len(), 24);
    }

    #[test]
    fn highest_root_c2() {
        let d = RootDatum::adjoint("C2").unwrap();
        assert_eq!(d.highest_roots()[0].coeffs, vec![2, 1]);
        let d = RootDatum::adjoint("A2").unwrap();
        assert_eq!(d.highest_roots()[0].coeffs, vec![1, 1]);
    }

    #[test]
    fn invalid_data_rejected() {
        assert!(RootDatum::new(1, vec![vec![1]], vec![vec![1]]).is_err());
        // affine A1 Cartan matrix is not of finite type
        let d = RootDatum::diagnostics(2, &[vec![2, -2], vec![-2, 2]], &[vec![1, 0], vec![0, 1]]);
        assert!(!d.is_empty());
        let d = RootDatum::diagnostics(2, &[vec![2, 1], vec![1, 2]], &[vec![1, 0], vec![0, 1]]);
        assert!(d.iter().any(|m| m.contains("positive")));
    }

    #[test]
    fn pairing_examples() {
        // SL3 in GL3 coordinates
        let theta = TorusCharacter::new(&[0, 1, 2], 3).unwrap();
        assert_eq!(pairing(&theta, &[1, -1, 0]), QmodZ::from_frac(-1, 3));
        assert!(pairing(&TorusCharacter::zero(3), &[1, -1, 0]).is_zero());
        let half = TorusCharacter::new(&[1], 2).unwrap();
        assert!(pairing(&half, &[2]).is_zero());
    }

    #[test]
    fn norm_pairing_examples() {
        let sl2 = RootDatum::simply_connected("A1").unwrap();
        let f = FrobeniusAction::split(&sl2, 3).unwrap();
        let legendre = TorusCharacter::new(&[1], 2).unwrap();
        assert_eq!(norm_pairing(&legendre, &[1], &f).unwrap(), QmodZ::from_frac(1, 2));
        assert!(norm_pairing(&TorusCharacter::zero(1), &[1], &f).unwrap().is_zero());
        let bad = TorusCharacter::new(&[1], 3).unwrap();
        assert!(matches!(norm_pairing(&bad, &[1], &f), Err(Error::InvalidCharacter(_))));
    }

    #[test]
    fn norm_pairing_unitary_fixed_coroot() {
        // SU3: weight coordinates, Frobenius swaps the two simple roots.
        let sc = RootDatum::simply_connected("A2").unwrap();
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let q = 2;
        let f = FrobeniusAction::new(&sc, swap.clone(), q).unwrap();
        assert_eq!(f.order(), 2);
        // characters with (qF0 - 1)θ = 0: θ = (q b, b), b ∈ (1/(q²-1))ℤ
        let mut checked = 0;
        for b in 0..3 {
            let theta = TorusCharacter::new(&[q as i64 * b, b], 3).unwrap();
            theta.validate(&f).unwrap();
            let w0 = IntMatrix::from_rows(&[vec![0, -1], vec![-1, 0]]);
            let w0theta = TorusCharacter::from_values(w0.apply_rat(&theta.rationals()));
            if w0theta == theta {
                // the F₀-fixed coroot α₁^∨ + α₂^∨ pairs trivially
                assert_eq!(f.orbit_length(&[1, 1]), 1);
                assert!(norm_pairing(&theta, &[1, 1], &f).unwrap().is_zero());
                checked += 1;
            }
        }
        assert_eq!(checked, 3);
    }

    #[test]
    fn nonsingular_examples() {
        // SL3 in weight coordinates; GL-coordinates (0,1/3,2/3) become (2/3, 2/3)
        let sl3 = RootDatum::simply_connected("A2").unwrap();
        let theta = TorusCharacter::new(&[2, 2], 3).unwrap();
        let f = FrobeniusAction::split(&sl3, 7).unwrap();
        assert!(is_nonsingular(&theta, &sl3, &f).unwrap());
        // brute force over all six coroots
        assert!(sl3.roots().iter().all(|r| !pairing(&theta, &r.coroot).is_zero()));
        assert!(!is_nonsingular(&TorusCharacter::zero(2), &sl3, &f).unwrap());
        let sl2 = RootDatum::simply_connected("A1").unwrap();
        let f3 = FrobeniusAction::split(&sl2, 3).unwrap();
        assert!(is_nonsingular(&TorusCharacter::new(&[1], 2).unwrap(), &sl2, &f3).unwrap());
    }

    #[test]
    fn frobenius_validation() {
        let sl3 = RootDatum::simply_connected("A2").unwrap();
        assert!(FrobeniusAction::new(&sl3, IntMatrix::identity(2), 6).is_err());
        let shear = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        assert!(FrobeniusAction::new(&sl3, shear, 5).is_err());
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn character_normalization() {
        let t = TorusCharacter::new(&[4, -1], 6).unwrap();
        assert_eq!(t.values()[0].value(), rat(2, 3));
        assert_eq!(t.values()[1].value(), rat(5, 6));
        assert_eq!(t.denominator(), 6);
        assert_eq!(t.numerators(), vec![4, 5]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn kinds() -> impl Strategy<Value = RootDatum> {
            prop_oneof![
                Just("A1"),
                Just("A2"),
                Just("A3"),
                Just("B2"),
                Just("C3"),
                Just("G2"),
                Just("D4"),
                Just("A1xA1")
            ]
            .prop_flat_map(|k| {
                prop_oneof![Just(RootDatum::simply_connected(k).unwrap()), Just(RootDatum::adjoint(k).unwrap())]
            })
        }

        proptest! {
            #[test]
            fn reflections_are_involutive_isometries(d in kinds(), x in proptest::collection::vec(-5i64..6, 4), y in proptest::collection::vec(-5i64..6, 4)) {
                let n = d.rank();
                let (x, y) = (&x[..n], &y[..n]);
                for r in d.roots() {
                    prop_assert_eq!(d.reflect(r, &d.reflect(r, x)), x.to_vec());
                    prop_assert_eq!(dot(&d.reflect(r, x), &d.coreflect(r, y)), dot(x, y));
                    for s in d.roots() {
                        prop_assert!(d.is_root(&d.reflect(r, &s.root)));
                    }
                }
            }

            #[test]
            fn split_norm_pairing_is_pairing(num in proptest::collection::vec(0i64..6, 2)) {
                let d = RootDatum::simply_connected("A2").unwrap();
                let f = FrobeniusAction::split(&d, 7).unwrap();
                let theta = TorusCharacter::new(&num, 6).unwrap();
                for r in d.roots() {
                    prop_assert_eq!(norm_pairing(&theta, &r.coroot, &f).unwrap(), pairing(&theta, &r.coroot));
                }
            }

            #[test]
            fn nonsingularity_is_weyl_invariant(num in proptest::collection::vec(0i64..4, 3)) {
                let d = RootDatum::simply_connected("A3").unwrap();
                let f = FrobeniusAction::split(&d, 5).unwrap();
                let theta = TorusCharacter::new(&num, 4).unwrap();
                let base = is_nonsingular(&theta, &d, &f).unwrap();
                for w in weyl_group(&d).unwrap().elements() {
                    prop_assert_eq!(is_nonsingular(&w.act_theta(&theta), &d, &f).unwrap(), base);
                }
            }
        }
    }
}
