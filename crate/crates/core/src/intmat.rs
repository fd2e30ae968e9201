//! Dense integer matrices and the Smith normal form.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::qz::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend_from_slice(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<i64>], height: usize) -> Self {
        let mut m = IntMatrix::zeros(height, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..height {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply_rat(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| *b * *a).sum()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == IntMatrix::identity(self.rows)
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            self.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    /// Inverse over ℚ; `None` when singular.
    pub fn inverse_rat(&self) -> Option<Vec<Vec<Rational>>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut r: Vec<Rational> = self.row(i).iter().map(|&x| Rational::from_integer(x)).collect();
                r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !a[i][c].is_zero())?;
            a.swap(p, c);
            let inv = a[c][c].recip();
            for x in a[c].iter_mut() {
                *x *= inv;
            }
            for i in 0..n {
                if i != c && !a[i][c].is_zero() {
                    let f = a[i][c];
                    for j in 0..2 * n {
                        let t = a[c][j] * f;
                        a[i][j] -= t;
                    }
                }
            }
        }
        Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        let inv = self.inverse_rat()?;
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for (i, row) in inv.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_integer() {
                    return None;
                }
                out[(i, j)] = *x.numer();
            }
        }
        Some(out)
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).invariant_factors().iter().filter(|d| **d != 0).count()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// Result of a Smith normal form computation: `u * m * v == d`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    /// Diagonal entries d_0 | d_1 | ... (length min(rows, cols)).
    pub fn invariant_factors(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)]).collect()
    }
}

struct Work {
    a: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    ui: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    vi: Vec<Vec<i128>>,
}

impl Work {
    // row_i += k * row_j  (left multiply by E; U <- E U, U^{-1} <- U^{-1} E^{-1})
    fn row_add(&mut self, i: usize, j: usize, k: i128) {
        if k == 0 {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m[0].len() {
                let t = m[j][c] * k;
                m[i][c] += t;
            }
        }
        for r in 0..self.ui.len() {
            let t = self.ui[r][i] * k;
            self.ui[r][j] -= t;
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
        for r in self.ui.iter_mut() {
            r.swap(i, j);
        }
    }

    fn row_neg(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -*x;
        }
        for r in self.ui.iter_mut() {
            r[i] = -r[i];
        }
    }

    // col_i += k * col_j  (right multiply by E; V <- V E, V^{-1} <- E^{-1} V^{-1})
    fn col_add(&mut self, i: usize, j: usize, k: i128) {
        if k == 0 {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for r in m.iter_mut() {
                let t = r[j] * k;
                r[i] += t;
            }
        }
        let n = self.vi[0].len();
        for c in 0..n {
            let t = self.vi[i][c] * k;
            self.vi[j][c] -= t;
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        for m in [&mut self.a, &mut self.v] {
            for r in m.iter_mut() {
                r.swap(i, j);
            }
        }
        self.vi.swap(i, j);
    }
}

fn ident128(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn to_int(m: &[Vec<i128>], rows: usize, cols: usize) -> IntMatrix {
    let mut out = IntMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            out[(i, j)] = i64::try_from(m[i][j]).expect("Smith normal form entry overflowed i64");
        }
    }
    out
}

/// Smith normal form with unimodular transforms.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: (0..rows).map(|i| m.row(i).iter().map(|&x| i128::from(x)).collect()).collect(),
        u: ident128(rows),
        ui: ident128(rows),
        v: ident128(cols),
        vi: ident128(cols),
    };
    if rows == 0 || cols == 0 {
        return Snf {
            u: to_int(&w.u, rows, rows),
            d: m.clone(),
            v: to_int(&w.v, cols, cols),
            u_inv: to_int(&w.ui, rows, rows),
            v_inv: to_int(&w.vi, cols, cols),
        };
    }
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the remaining block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = w.a[i][j];
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < w.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            if pi != t {
                w.row_swap(pi, t);
            }
            if pj != t {
                w.col_swap(pj, t);
            }
            let p = w.a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = Integer::div_floor(&w.a[i][t], &p);
                w.row_add(i, t, -q);
                if w.a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = Integer::div_floor(&w.a[t][j], &p);
                w.col_add(j, t, -q);
                if w.a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let mut bad = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if w.a[i][j] % p != 0 {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => w.row_add(t, i, 1),
                None => break,
            }
        }
        if w.a[t][t] < 0 {
            w.row_neg(t);
        }
    }
    Snf {
        u: to_int(&w.u, rows, rows),
        d: to_int(&w.a, rows, cols),
        v: to_int(&w.v, cols, cols),
        u_inv: to_int(&w.ui, rows, rows),
        v_inv: to_int(&w.vi, cols, cols),
    }
}

/// Solves `a x = b` over ℤ. Returns one solution if it exists.
pub fn solve_integer(a: &IntMatrix, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(a.rows(), b.len());
    let snf = smith_normal_form(a);
    let c = snf.u.apply(b);
    let mut y = vec![0i64; a.cols()];
    for (i, ci) in c.iter().enumerate() {
        let d = if i < a.cols() { snf.d[(i, i)] } else { 0 };
        if d == 0 {
            if *ci != 0 {
                return None;
            }
        } else {
            if ci % d != 0 {
                return None;
            }
            y[i] = ci / d;
        }
    }
    Some(snf.v.apply(&y))
}

/// Solves `a x ≡ b (mod modulus)` componentwise; one solution if it exists.
pub fn solve_mod(a: &IntMatrix, b: &[i64], modulus: i64) -> Option<Vec<i64>> {
    assert!(modulus > 0);
    let snf = smith_normal_form(a);
    let c: Vec<i64> = snf.u.apply(b).into_iter().map(|x| x.rem_euclid(modulus)).collect();
    let mut y = vec![0i64; a.cols()];
    for (i, &ci) in c.iter().enumerate() {
        let d = if i < a.cols() { snf.d[(i, i)].rem_euclid(modulus) } else { 0 };
        // d y ≡ ci (mod modulus)
        let g = d.gcd(&modulus);
        if ci % g != 0 {
            return None;
        }
        if d == 0 {
            continue;
        }
        let m = modulus / g;
        let inv = mod_inverse((d / g).rem_euclid(m), m).expect("coprime by construction");
        y[i] = ((ci / g) as i128 * inv as i128).rem_euclid(m as i128) as i64;
    }
    Some(snf.v.apply(&y).into_iter().map(|x| x.rem_euclid(modulus)).collect())
}

pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// ℤ-basis (as columns) of the kernel of `a` acting on ℤ^cols.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<i64>> {
    let snf = smith_normal_form(a);
    let r = snf.invariant_factors().iter().filter(|d| **d != 0).count();
    (r..a.cols()).map(|j| snf.v.col(j)).collect()
}

/// ℤⁿ modulo the span of some integer vectors, with coordinates from the SNF.
#[derive(Clone, Debug)]
pub struct LatticeQuotient {
    u: IntMatrix,
    factors: Vec<i64>,
}

impl LatticeQuotient {
    pub fn new(generators: &[Vec<i64>], n: usize) -> Self {
        if generators.is_empty() {
            return LatticeQuotient { u: IntMatrix::identity(n), factors: vec![0; n] };
        }
        let snf = smith_normal_form(&IntMatrix::from_cols(generators, n));
        let diag = snf.invariant_factors();
        let factors = (0..n).map(|i| diag.get(i).map_or(0, |d| d.abs())).collect();
        LatticeQuotient { u: snf.u, factors }
    }

    /// Canonical coordinates of the class of `x`, one per nontrivial cyclic factor
    /// (reduced mod the factor, or unreduced for free factors).
    pub fn class(&self, x: &[i64]) -> Vec<i64> {
        self.u
            .apply(x)
            .into_iter()
            .zip(&self.factors)
            .filter(|(_, &f)| f != 1)
            .map(|(c, &f)| if f == 0 { c } else { c.rem_euclid(f) })
            .collect()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.class(x).iter().all(|&c| c == 0)
    }

    /// Orders of the cyclic factors (0 for a free factor).
    pub fn invariants(&self) -> Vec<i64> {
        self.factors.iter().copied().filter(|&f| f != 1).collect()
    }

    /// Order of the quotient, if finite.
    pub fn order(&self) -> Option<u64> {
        self.invariants().iter().try_fold(1u64, |acc, &f| (f != 0).then(|| acc * f as u64))
    }
}
