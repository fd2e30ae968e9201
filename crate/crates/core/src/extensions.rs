//! Central extensions of finite groups through normalized 2-cocycles.
//!
//! Coefficient groups are finite direct sums of cyclic groups ℤ/m and copies of
//! ℚ/ℤ. Every value is stored in (ℚ/ℤ)^k, with ℤ/m embedded as (1/m)ℤ/ℤ, and
//! written additively.

use std::collections::HashMap;
use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::{solve_mod, IntMatrix};
use crate::qz::{QmodZ, Rational};

/// A finite group given by its multiplication table; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let bad = |m: &str| Err(Error::InvalidInput(format!("multiplication table: {m}")));
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("not a square table of indices");
        }
        if (0..n).any(|x| table[0][x] != x || table[x][0] != x) {
            return bad("element 0 is not the identity");
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return bad("not associative");
                    }
                }
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for x in 0..n {
            match (0..n).find(|&y| table[x][y] == 0) {
                Some(y) => inverse[x] = y,
                None => return bad("missing inverse"),
            }
        }
        Ok(FiniteGroup { table, inverse })
    }

    pub fn trivial() -> Self {
        FiniteGroup { table: vec![vec![0]], inverse: vec![0] }
    }

    pub fn cyclic(n: usize) -> Self {
        FiniteGroup::abelian(&[n])
    }

    /// ℤ/n₁ × ⋯ × ℤ/n_k; element index is the mixed-radix encoding, first factor fastest.
    pub fn abelian(orders: &[usize]) -> Self {
        let size: usize = orders.iter().product();
        let decode = |mut x: usize| -> Vec<usize> {
            orders
                .iter()
                .map(|&m| {
                    let d = x % m;
                    x /= m;
                    d
                })
                .collect()
        };
        let encode = |v: &[usize]| -> usize { v.iter().zip(orders).rev().fold(0, |acc, (d, m)| acc * m + d) };
        let table: Vec<Vec<usize>> = (0..size)
            .map(|x| {
                let a = decode(x);
                (0..size)
                    .map(|y| {
                        let b = decode(y);
                        let s: Vec<usize> = a.iter().zip(&b).zip(orders).map(|((p, q), m)| (p + q) % m).collect();
                        encode(&s)
                    })
                    .collect()
            })
            .collect();
        let inverse = (0..size)
            .map(|x| {
                let a = decode(x);
                encode(&a.iter().zip(orders).map(|(p, m)| (m - p) % m).collect::<Vec<_>>())
            })
            .collect();
        FiniteGroup { table, inverse }
    }

    /// Closure of permutations (images of 0..n) under composition.
    pub fn from_permutations(gens: &[Vec<usize>], bound: usize) -> Result<(Self, Vec<Vec<usize>>)> {
        let degree = gens.first().map_or(0, Vec::len);
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&i| a[i]).collect() };
        let mut k = 0;
        while k < elems.len() {
            for g in gens {
                let x = compose(g, &elems[k]);
                if !index.contains_key(&x) {
                    if elems.len() >= bound {
                        return Err(Error::GroupTooLarge { bound });
                    }
                    index.insert(x.clone(), elems.len());
                    elems.push(x);
                }
            }
            k += 1;
        }
        let table = elems.iter().map(|a| elems.iter().map(|b| index[&compose(a, b)]).collect()).collect();
        Ok((FiniteGroup::from_table(table)?, elems))
    }

    pub fn product(&self, other: &FiniteGroup) -> FiniteGroup {
        let m = other.order();
        let n = self.order() * m;
        let table =
            (0..n).map(|x| (0..n).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect()).collect();
        let inverse = (0..n).map(|x| self.inv(x / m) * m + other.inv(x % m)).collect();
        FiniteGroup { table, inverse }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut cur = x;
        let mut k = 1;
        while cur != 0 {
            cur = self.mul(cur, x);
            k += 1;
        }
        k
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        (0..self.order()).fold(1, |acc, x| acc.lcm(&self.element_order(x)))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|x| (0..self.order()).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn is_homomorphism_from(&self, source: &FiniteGroup, f: &[usize]) -> bool {
        f.len() == source.order()
            && f.iter().all(|&v| v < self.order())
            && (0..source.order()).all(|x| (0..source.order()).all(|y| f[source.mul(x, y)] == self.mul(f[x], f[y])))
    }
}

/// ⊕ ℤ/m_i ⊕ (ℚ/ℤ)^r; `None` marks a ℚ/ℤ factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CoefficientGroup {
    pub orders: Vec<Option<i64>>,
}

impl CoefficientGroup {
    pub fn finite(orders: &[i64]) -> Self {
        CoefficientGroup { orders: orders.iter().map(|&m| Some(m)).collect() }
    }

    pub fn roots_of_unity() -> Self {
        CoefficientGroup { orders: vec![None] }
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn zero(&self) -> Vec<QmodZ> {
        vec![QmodZ::zero(); self.rank()]
    }

    pub fn contains(&self, v: &[QmodZ]) -> bool {
        v.len() == self.rank() && v.iter().zip(&self.orders).all(|(x, m)| m.is_none_or(|m| x.times(m).is_zero()))
    }

    /// The element of ℤ/m_i with integer representative `k`.
    pub fn generator_multiple(&self, i: usize, k: i64) -> QmodZ {
        QmodZ::from_frac(k, self.orders[i].expect("finite factor"))
    }
}

pub type Value = Vec<QmodZ>;

fn add(a: &[QmodZ], b: &[QmodZ]) -> Value {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

fn sub(a: &[QmodZ], b: &[QmodZ]) -> Value {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

/// A normalized 2-cocycle c : Q × Q → A for the trivial action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle2 {
    group: Arc<FiniteGroup>,
    coefficients: CoefficientGroup,
    table: Vec<Vec<Value>>,
}

impl Cocycle2 {
    pub fn new(group: Arc<FiniteGroup>, coefficients: CoefficientGroup, table: Vec<Vec<Value>>) -> Result<Self> {
        let c = Cocycle2 { group, coefficients, table };
        let d = c.diagnostics();
        if d.is_empty() {
            Ok(c)
        } else {
            Err(Error::InvalidInput(d.join("; ")))
        }
    }

    /// Builds a cocycle from a function, then validates it.
    pub fn from_fn(
        group: Arc<FiniteGroup>,
        coefficients: CoefficientGroup,
        f: impl Fn(usize, usize) -> Value,
    ) -> Result<Self> {
        let n = group.order();
        let table = (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect();
        Cocycle2::new(group, coefficients, table)
    }

    pub fn zero(group: Arc<FiniteGroup>, coefficients: CoefficientGroup) -> Self {
        let n = group.order();
        let z = coefficients.zero();
        Cocycle2 { table: vec![vec![z; n]; n], group, coefficients }
    }

    /// The coboundary of a normalized 1-cochain: (ds)(x,y) = s(x) + s(y) − s(xy).
    pub fn coboundary(group: Arc<FiniteGroup>, coefficients: CoefficientGroup, s: &[Value]) -> Result<Self> {
        let g = group.clone();
        Cocycle2::from_fn(group, coefficients, |x, y| sub(&add(&s[x], &s[y]), &s[g.mul(x, y)]))
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let n = self.group.order();
        let mut out = vec![];
        if self.table.len() != n || self.table.iter().any(|r| r.len() != n) {
            return vec!["cocycle table has the wrong shape".into()];
        }
        if self.table.iter().flatten().any(|v| !self.coefficients.contains(v)) {
            out.push("cocycle value outside the coefficient group".into());
            return out;
        }
        let zero = self.coefficients.zero();
        if (0..n).any(|x| self.table[0][x] != zero || self.table[x][0] != zero) {
            out.push("cocycle is not normalized: c(1,q) or c(q,1) is nonzero".into());
        }
        'outer: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let l = add(&self.table[x][y], &self.table[self.group.mul(x, y)][z]);
                    let r = add(&self.table[y][z], &self.table[x][self.group.mul(y, z)]);
                    if l != r {
                        out.push(format!("cocycle identity fails at ({x},{y},{z})"));
                        break 'outer;
                    }
                }
            }
        }
        out
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coefficients(&self) -> &CoefficientGroup {
        &self.coefficients
    }

    pub fn value(&self, x: usize, y: usize) -> &Value {
        &self.table[x][y]
    }

    pub fn table(&self) -> &[Vec<Value>] {
        &self.table
    }

    pub fn negate(&self) -> Cocycle2 {
        let table = self.table.iter().map(|r| r.iter().map(|v| v.iter().map(|x| -*x).collect()).collect()).collect();
        Cocycle2 { group: self.group.clone(), coefficients: self.coefficients.clone(), table }
    }

    fn same_base(&self, other: &Cocycle2) -> bool {
        (Arc::ptr_eq(&self.group, &other.group) || self.group == other.group) && self.coefficients == other.coefficients
    }

    /// The alternating form c(x,y) − c(y,x) on commuting pairs; a class invariant.
    pub fn commutator_form(&self, x: usize, y: usize) -> Option<Value> {
        (self.group.mul(x, y) == self.group.mul(y, x)).then(|| sub(&self.table[x][y], &self.table[y][x]))
    }
}

/// χ∘c for a homomorphism χ : A → ℚ/ℤ.
///
/// `chi[i]` is the image of the generator 1 of a ℤ/m_i factor, or an integer
/// multiplier for a ℚ/ℤ factor.
pub fn pushout(c: &Cocycle2, chi: &[Rational]) -> Result<Cocycle2> {
    let coeff = c.coefficients();
    if chi.len() != coeff.rank() {
        return Err(Error::InvalidInput("character has the wrong number of components".into()));
    }
    for (x, m) in chi.iter().zip(&coeff.orders) {
        let ok = match m {
            Some(m) => QmodZ::new(*x * *m).is_zero(),
            None => x.is_integer(),
        };
        if !ok {
            return Err(Error::InvalidInput("pushout map is not a homomorphism".into()));
        }
    }
    let apply = |v: &Value| -> Value {
        let total = v.iter().zip(chi).zip(&coeff.orders).fold(QmodZ::zero(), |acc, ((x, k), m)| {
            let r = match m {
                Some(m) => QmodZ::new(*k * (x.value() * *m)),
                None => QmodZ::new(x.value() * *k),
            };
            acc + r
        });
        vec![total]
    };
    let table = c.table.iter().map(|r| r.iter().map(apply).collect()).collect();
    Ok(Cocycle2 { group: c.group.clone(), coefficients: CoefficientGroup::roots_of_unity(), table })
}

/// c∘(f×f) for a homomorphism f : Q′ → Q.
pub fn pullback(c: &Cocycle2, source: Arc<FiniteGroup>, f: &[usize]) -> Result<Cocycle2> {
    if !c.group.is_homomorphism_from(&source, f) {
        return Err(Error::InvalidInput("pullback map is not a homomorphism".into()));
    }
    let n = source.order();
    let table = (0..n).map(|x| (0..n).map(|y| c.table[f[x]][f[y]].clone()).collect()).collect();
    Ok(Cocycle2 { group: source, coefficients: c.coefficients.clone(), table })
}

/// Pointwise sum; represents the Baer sum of the extensions.
pub fn baer_sum(a: &Cocycle2, b: &Cocycle2) -> Result<Cocycle2> {
    if !a.same_base(b) {
        return Err(Error::MismatchedBase);
    }
    let table = a.table.iter().zip(&b.table).map(|(r, s)| r.iter().zip(s).map(|(x, y)| add(x, y)).collect()).collect();
    Ok(Cocycle2 { group: a.group.clone(), coefficients: a.coefficients.clone(), table })
}

/// One generator of a group Γ acting on Q and A, with the cochain b_γ recording
/// γ·c(x,y) − c(γx,γy) = (d b_γ)(x,y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaAction {
    /// Automorphism of Q as a permutation of element indices.
    pub on_group: Vec<usize>,
    /// Integer multiplier on each coefficient factor.
    pub on_coefficients: Vec<i64>,
    pub shift: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantStructure {
    pub actions: Vec<GammaAction>,
}

impl EquivariantStructure {
    /// Validates each generator against the cocycle.
    pub fn new(c: &Cocycle2, actions: Vec<GammaAction>) -> Result<Self> {
        let g = c.group();
        let coeff = c.coefficients();
        for a in &actions {
            if !g.is_homomorphism_from(g, &a.on_group) {
                return Err(Error::InvalidInput("Γ does not act by group automorphisms".into()));
            }
            let mut seen = vec![false; g.order()];
            for &x in &a.on_group {
                seen[x] = true;
            }
            if seen.iter().any(|s| !s) || a.on_coefficients.len() != coeff.rank() || a.shift.len() != g.order() {
                return Err(Error::InvalidInput("malformed Γ-action".into()));
            }
            for x in 0..g.order() {
                for y in 0..g.order() {
                    let lhs = sub(&act(&a.on_coefficients, c.value(x, y)), c.value(a.on_group[x], a.on_group[y]));
                    let db = sub(&add(&a.shift[x], &a.shift[y]), &a.shift[g.mul(x, y)]);
                    if lhs != db {
                        return Err(Error::InvalidInput(format!("Γ-compatibility fails at ({x},{y})")));
                    }
                }
            }
        }
        Ok(EquivariantStructure { actions })
    }

    /// Actions with zero shift; valid when c(γx,γy) = γ·c(x,y).
    pub fn strict(c: &Cocycle2, generators: Vec<(Vec<usize>, Vec<i64>)>) -> Result<Self> {
        let n = c.group().order();
        let zero = c.coefficients().zero();
        let actions = generators
            .into_iter()
            .map(|(on_group, on_coefficients)| GammaAction { on_group, on_coefficients, shift: vec![zero.clone(); n] })
            .collect();
        EquivariantStructure::new(c, actions)
    }
}

fn act(mult: &[i64], v: &[QmodZ]) -> Value {
    v.iter().zip(mult).map(|(x, &m)| x.times(m)).collect()
}

/// A normalized 1-cochain s with ds = c (and γ·s(x) − s(γx) = b_γ(x) when an
/// equivariant structure is given), or `None` when no such cochain exists.
pub fn splitting(c: &Cocycle2, equivariance: Option<&EquivariantStructure>) -> Option<Vec<Value>> {
    let g = c.group();
    let n = g.order();
    let coeff = c.coefficients();
    let mut s = vec![coeff.zero(); n];
    for (i, order) in coeff.orders.iter().enumerate() {
        // work in (1/M)ℤ/ℤ
        let modulus = match order {
            Some(m) => *m,
            None => {
                let mut den = 1i64;
                for v in c.table.iter().flatten() {
                    den = den.lcm(&v[i].order());
                }
                if let Some(e) = equivariance {
                    for a in &e.actions {
                        for v in &a.shift {
                            den = den.lcm(&v[i].order());
                        }
                    }
                }
                den * (g.order() * g.exponent()) as i64
            }
        };
        let to_int = |q: &QmodZ| -> i64 { (q.value() * modulus).to_integer() };
        // unknowns s(x) for x = 1..n
        let mut rows: Vec<Vec<i64>> = vec![];
        let mut rhs: Vec<i64> = vec![];
        for x in 1..n {
            for y in 1..n {
                let mut row = vec![0i64; n - 1];
                row[x - 1] += 1;
                row[y - 1] += 1;
                let xy = g.mul(x, y);
                if xy != 0 {
                    row[xy - 1] -= 1;
                }
                rows.push(row);
                rhs.push(to_int(&c.table[x][y][i]));
            }
        }
        if let Some(e) = equivariance {
            for a in &e.actions {
                for x in 1..n {
                    let mut row = vec![0i64; n - 1];
                    row[x - 1] += a.on_coefficients[i];
                    row[a.on_group[x] - 1] -= 1;
                    rows.push(row);
                    rhs.push(to_int(&a.shift[x][i]));
                }
            }
        }
        if n == 1 {
            continue;
        }
        let sol = solve_mod(&IntMatrix::from_rows(&rows), &rhs, modulus)?;
        for x in 1..n {
            s[x][i] = QmodZ::from_frac(sol[x - 1], modulus);
        }
    }
    Some(s)
}

/// Exhaustive search for a normalized splitting with values in a finite coefficient group.
pub fn splitting_exhaustive(c: &Cocycle2) -> Result<Option<Vec<Value>>> {
    let coeff = c.coefficients();
    let orders: Vec<i64> = coeff
        .orders
        .iter()
        .map(|m| m.ok_or_else(|| Error::InvalidInput("exhaustive search needs finite coefficients".into())))
        .collect::<Result<_>>()?;
    let a_size: i64 = orders.iter().product();
    let n = c.group().order();
    let total = (a_size as u128).pow(n as u32);
    if total > 1 << 24 {
        return Err(Error::GroupTooLarge { bound: 1 << 24 });
    }
    let decode = |mut k: i64| -> Value {
        orders
            .iter()
            .map(|&m| {
                let d = k % m;
                k /= m;
                QmodZ::from_frac(d, m)
            })
            .collect()
    };
    for code in 0..total {
        let mut k = code;
        let s: Vec<Value> = (0..n)
            .map(|_| {
                let d = (k % a_size as u128) as i64;
                k /= a_size as u128;
                decode(d)
            })
            .collect();
        let g = c.group();
        let ok = (0..n).all(|x| (0..n).all(|y| sub(&add(&s[x], &s[y]), &s[g.mul(x, y)]) == c.table[x][y]));
        if ok {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

pub fn is_split(c: &Cocycle2) -> bool {
    splitting(c, None).is_some()
}

/// Whether two cocycles over the same base are cohomologous.
pub fn same_class(a: &Cocycle2, b: &Cocycle2) -> Result<bool> {
    Ok(is_split(&baer_sum(a, &b.negate())?))
}

/// The Heisenberg cocycle on (ℤ/2)² with values in ℤ/2: c(x,y) = x₁y₂.
pub fn heisenberg_cocycle() -> Cocycle2 {
    let g = Arc::new(FiniteGroup::abelian(&[2, 2]));
    Cocycle2::from_fn(g, CoefficientGroup::finite(&[2]), |x, y| {
        let (x1, y2) = ((x % 2) as i64, ((y / 2) % 2) as i64);
        vec![QmodZ::from_frac(x1 * y2, 2)]
    })
    .expect("bilinear forms are cocycles")
}

/// Bilinear cocycle on an abelian group ⊕ℤ/n_i: c(x,y) = Σ a_ij x_i y_j / gcd(n_i, n_j) in ℚ/ℤ.
pub fn bilinear_cocycle(orders: &[usize], matrix: &[Vec<i64>], coefficients: CoefficientGroup) -> Result<Cocycle2> {
    let g = Arc::new(FiniteGroup::abelian(orders));
    let decode = |mut x: usize| -> Vec<i64> {
        orders
            .iter()
            .map(|&m| {
                let d = x % m;
                x /= m;
                d as i64
            })
            .collect()
    };
    let k = orders.len();
    Cocycle2::from_fn(g, coefficients.clone(), |x, y| {
        let (a, b) = (decode(x), decode(y));
        let mut total = QmodZ::zero();
        for i in 0..k {
            for j in 0..k {
                let g = (orders[i] as i64).gcd(&(orders[j] as i64));
                total += QmodZ::from_frac(matrix[i][j] * a[i] * b[j], g);
            }
        }
        let mut v = coefficients.zero();
        if !v.is_empty() {
            v[0] = total;
        }
        v
    })
}

/// Serializable cocycle table.
#[derive(Clone, Debug, Serialize)]
pub struct CocycleReport {
    pub group_order: usize,
    pub coefficients: CoefficientGroup,
    pub table: Vec<Vec<Vec<QmodZ>>>,
}

impl From<&Cocycle2> for CocycleReport {
    fn from(c: &Cocycle2) -> Self {
        CocycleReport { group_order: c.group().order(), coefficients: c.coefficients().clone(), table: c.table.clone() }
    }
}
