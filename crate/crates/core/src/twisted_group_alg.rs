//! Twisted group algebras ℂ[Λ, μ] of lattices Λ = ℤ^r.
//!
//! μ is bilinear, μ(x,y) = xᵀMy mod 1, so T_x T_y = e(μ(x,y)) T_{x+y} with
//! e(t) = exp(2πit). Every class in H²(ℤ^r, ℚ/ℤ) has such a representative.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::cyclotomic::{Cyclotomic, CyclotomicField};
use crate::error::{Error, Result};
use crate::extensions::{splitting, Cocycle2, CoefficientGroup, FiniteGroup};
use crate::intmat::{smith_normal_form, IntMatrix, LatticeQuotient};
use crate::qz::{QmodZ, Rational};

/// Largest |Λ/ZΛ| for which the finite quotient algebra is built.
pub const MAX_QUOTIENT_ORDER: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedLatticeAlgebra {
    mu: Vec<Vec<Rational>>,
    beta: Vec<Vec<Rational>>,
    /// λ = V y; ZΛ = { y : f_i | y_i }.
    v: IntMatrix,
    v_inv: IntMatrix,
    factors: Vec<i64>,
}

fn form(m: &[Vec<Rational>], x: &[i64], y: &[i64]) -> QmodZ {
    let mut s = Rational::zero();
    for (i, row) in m.iter().enumerate() {
        if x[i] == 0 {
            continue;
        }
        for (j, a) in row.iter().enumerate() {
            s += *a * (x[i] * y[j]);
        }
    }
    QmodZ::new(s)
}

fn add(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn scale(x: &[i64], k: i64) -> Vec<i64> {
    x.iter().map(|a| a * k).collect()
}

impl TwistedLatticeAlgebra {
    /// From the bilinear cocycle matrix M.
    pub fn from_cocycle(mu: Vec<Vec<Rational>>) -> Result<Self> {
        let r = mu.len();
        if mu.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidInput("cocycle matrix must be square".into()));
        }
        let beta: Vec<Vec<Rational>> = (0..r).map(|i| (0..r).map(|j| mu[i][j] - mu[j][i]).collect()).collect();
        let den = beta.iter().flatten().fold(1i64, |acc, x| acc.lcm(x.denom()));
        let a = IntMatrix::from_rows(
            &beta.iter().map(|row| row.iter().map(|x| (x * den).to_integer()).collect()).collect::<Vec<_>>(),
        );
        let snf = smith_normal_form(&a);
        let diag = snf.invariant_factors();
        let factors: Vec<i64> = (0..r).map(|i| den / diag.get(i).copied().unwrap_or(0).abs().gcd(&den)).collect();
        if factors.iter().any(|&f| f <= 0) {
            return Err(Error::InfiniteIndexCenter(format!("invariant factors {diag:?}")));
        }
        let alg = TwistedLatticeAlgebra { mu, beta, v: snf.v, v_inv: snf.v_inv, factors };
        for z in alg.center_basis() {
            if !(0..r).all(|i| alg.beta(&z, &unit(r, i)).is_zero()) {
                return Err(Error::InvariantViolation("computed center is not in the radical of β".into()));
            }
        }
        Ok(alg)
    }

    /// From an alternating matrix B with β(x,y) = xᵀBy, using M = strict upper part of B.
    pub fn from_bicharacter(beta: Vec<Vec<Rational>>) -> Result<Self> {
        let r = beta.len();
        if beta.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidInput("bicharacter matrix must be square".into()));
        }
        for i in 0..r {
            for j in 0..r {
                if !QmodZ::new(beta[i][j] + beta[j][i]).is_zero() || (i == j && !beta[i][i].is_integer()) {
                    return Err(Error::InvalidInput("β is not alternating".into()));
                }
            }
        }
        let mu = (0..r).map(|i| (0..r).map(|j| if i < j { beta[i][j] } else { Rational::zero() }).collect()).collect();
        TwistedLatticeAlgebra::from_cocycle(mu)
    }

    /// The bicharacter β(e₁,e₂) = 1/m on ℤ².
    pub fn rank_two(m: i64) -> Result<Self> {
        let t = Rational::new(1, m);
        TwistedLatticeAlgebra::from_bicharacter(vec![vec![Rational::zero(), t], vec![-t, Rational::zero()]])
    }

    pub fn rank(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self, x: &[i64], y: &[i64]) -> QmodZ {
        form(&self.mu, x, y)
    }

    /// T_x T_y T_x⁻¹ T_y⁻¹ = e(β(x,y)).
    pub fn beta(&self, x: &[i64], y: &[i64]) -> QmodZ {
        form(&self.beta, x, y)
    }

    pub fn beta_matrix(&self) -> &[Vec<Rational>] {
        &self.beta
    }

    /// T_x T_y = e(c) T_{x+y}.
    pub fn multiply_basis(&self, x: &[i64], y: &[i64]) -> (QmodZ, Vec<i64>) {
        (self.mu(x, y), add(x, y))
    }

    /// Basis of ZΛ = rad β.
    pub fn center_basis(&self) -> Vec<Vec<i64>> {
        (0..self.rank()).map(|i| scale(&self.v.col(i), self.factors[i])).collect()
    }

    pub fn center_index(&self) -> u64 {
        self.factors.iter().map(|&f| f as u64).product()
    }

    /// Invariant factors of Λ/ZΛ (entries 1 included).
    pub fn quotient_factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn is_central(&self, x: &[i64]) -> bool {
        (0..self.rank()).all(|i| self.beta(x, &unit(self.rank(), i)).is_zero())
    }

    /// λ = ẇ + Σ a_i z_i with ẇ the box representative.
    fn decompose(&self, x: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let y = self.v_inv.apply(x);
        let w: Vec<i64> = y.iter().zip(&self.factors).map(|(a, f)| a.rem_euclid(*f)).collect();
        let a = y.iter().zip(&w).zip(&self.factors).map(|((a, b), f)| (a - b) / f).collect();
        (w, a)
    }

    fn quotient_index(&self, w: &[i64]) -> usize {
        w.iter().zip(&self.factors).rev().fold(0, |acc, (d, f)| acc * *f as usize + *d as usize)
    }

    fn quotient_rep(&self, mut k: usize) -> Vec<i64> {
        let w: Vec<i64> = self
            .factors
            .iter()
            .map(|&f| {
                let d = k % f as usize;
                k /= f as usize;
                d as i64
            })
            .collect();
        self.v.apply(&w)
    }

    /// T′_λ = e(κ(λ)) T_λ with T′_{ẇ + Σa_i z_i} = T_ẇ T_{z_1}^{a_1} ⋯ T_{z_r}^{a_r}.
    fn kappa(&self, x: &[i64]) -> QmodZ {
        let (w, a) = self.decompose(x);
        let z = self.center_basis();
        let rep = self.v.apply(&w);
        let mut k = QmodZ::zero();
        let mut total = vec![0i64; self.rank()];
        for i in 0..self.rank() {
            // T_z^a = e(μ(z,z)·a(a−1)/2) T_{az}
            k += self.mu(&z[i], &z[i]).times(a[i] * (a[i] - 1) / 2);
            let piece = scale(&z[i], a[i]);
            k += self.mu(&total, &piece);
            total = add(&total, &piece);
        }
        k + self.mu(&rep, &total)
    }

    /// μ′(λ,ν) with T′_λ T′_ν = e(μ′(λ,ν)) T′_{λ+ν}.
    pub fn rescaled_mu(&self, x: &[i64], y: &[i64]) -> QmodZ {
        self.kappa(x) + self.kappa(y) + self.mu(x, y) - self.kappa(&add(x, y))
    }

    pub fn rescale_normal_form(&self) -> Result<NormalForm> {
        let order = self.center_index();
        if order > MAX_QUOTIENT_ORDER {
            return Err(Error::GroupTooLarge { bound: MAX_QUOTIENT_ORDER as usize });
        }
        let n = order as usize;
        let reps: Vec<Vec<i64>> = (0..n).map(|k| self.quotient_rep(k)).collect();
        let table: Vec<Vec<QmodZ>> =
            reps.iter().map(|x| reps.iter().map(|y| self.rescaled_mu(x, y)).collect()).collect();
        // μ′ factors through (Λ/ZΛ)²: shift representatives by center elements
        let z = self.center_basis();
        let mixed =
            z.iter().enumerate().fold(vec![0; self.rank()], |acc, (i, v)| add(&acc, &scale(v, 2 - 3 * (i as i64 % 2))));
        let shifts: Vec<Vec<i64>> =
            std::iter::once(vec![0; self.rank()]).chain(z.iter().cloned()).chain([mixed]).collect();
        for (i, x) in reps.iter().enumerate() {
            for (j, y) in reps.iter().enumerate() {
                for s in &shifts {
                    for t in &shifts {
                        if self.rescaled_mu(&add(x, s), &add(y, t)) != table[i][j] {
                            return Err(Error::InvariantViolation(
                                "rescaled cocycle does not factor through Λ/ZΛ".into(),
                            ));
                        }
                    }
                }
            }
        }
        // T′_z multiplicative on the chosen basis of ZΛ
        for a in &z {
            for b in &z {
                if !self.rescaled_mu(a, b).is_zero() {
                    return Err(Error::InvariantViolation("T′ is not multiplicative on ZΛ".into()));
                }
            }
        }
        let orders: Vec<usize> = self.factors.iter().map(|&f| f as usize).collect();
        Ok(NormalForm { group: Arc::new(FiniteGroup::abelian(&orders)), reps, center_basis: z, table })
    }

    /// Whether the center is spanned by {T_z : z ∈ ZΛ}: every ZΛ basis vector is
    /// central and no nonzero class of Λ/ZΛ is.
    pub fn verify_center(&self) -> bool {
        let r = self.rank();
        self.center_basis().iter().all(|z| self.is_central(z))
            && (1..self.center_index() as usize).all(|k| !self.is_central(&self.quotient_rep(k)))
            && r == self.center_basis().len()
    }

    pub fn isotropic_tower(&self) -> Result<IsotropicTower> {
        let nf = self.rescale_normal_form()?;
        let g = nf.group.clone();
        let n = g.order();
        let beta_q = |i: usize, j: usize| self.beta(&nf.reps[i], &nf.reps[j]);
        let mut gens: Vec<usize> = vec![];
        let mut span: BTreeSet<usize> = BTreeSet::from([0]);
        for x in 1..n {
            if span.contains(&x) || !gens.iter().all(|&g0| beta_q(x, g0).is_zero()) {
                continue;
            }
            gens.push(x);
            // close the span under adding x
            let mut frontier: Vec<usize> = span.iter().copied().collect();
            while let Some(y) = frontier.pop() {
                let s = g.mul(y, x);
                if span.insert(s) {
                    frontier.push(s);
                }
            }
        }
        let subgroup: Vec<usize> = span.into_iter().collect();
        // isotropy and maximality
        for &a in &subgroup {
            for &b in &subgroup {
                if !beta_q(a, b).is_zero() {
                    return Err(Error::InvariantViolation("CΛ is not isotropic".into()));
                }
            }
        }
        let c_z = subgroup.len() as u64;
        let lambda_c = n as u64 / c_z;
        if lambda_c != c_z {
            return Err(Error::InvariantViolation(format!("[Λ:CΛ] = {lambda_c} but [CΛ:ZΛ] = {c_z}")));
        }
        // Λ/CΛ → Irr(CΛ/ZΛ), x ↦ β(x, ·)
        let mut characters: HashMap<Vec<QmodZ>, usize> = HashMap::new();
        for x in 0..n {
            let chi: Vec<QmodZ> = subgroup.iter().map(|&c| beta_q(x, c)).collect();
            characters.entry(chi).or_insert(x);
        }
        if characters.len() as u64 != lambda_c {
            return Err(Error::InvariantViolation("pairing Λ/CΛ → Irr(CΛ/ZΛ) is not bijective".into()));
        }
        let mut pairing: Vec<(usize, Vec<QmodZ>)> = characters.into_iter().map(|(chi, x)| (x, chi)).collect();
        pairing.sort();
        let mut generators: Vec<Vec<i64>> = nf.center_basis.clone();
        generators.extend(gens.iter().map(|&k| nf.reps[k].clone()));
        Ok(IsotropicTower { normal_form: nf, subgroup, generators, index_lambda_c: lambda_c, index_c_z: c_z, pairing })
    }

    /// Certifies that the twisted group algebra of Λ/ZΛ is a d×d matrix algebra.
    pub fn block_structure(&self) -> Result<BlockStructure> {
        let tower = self.isotropic_tower()?;
        let nf = &tower.normal_form;
        let g = nf.group.clone();
        let n = g.order();
        let d = tower.index_c_z as usize;
        // the cocycle restricted to CΛ/ZΛ is symmetric, hence split over ℚ/ℤ
        let sub = &tower.subgroup;
        let pos: HashMap<usize, usize> = sub.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let sub_table: Vec<Vec<usize>> =
            sub.iter().map(|&a| sub.iter().map(|&b| pos[&g.mul(a, b)]).collect()).collect();
        let sub_group = Arc::new(FiniteGroup::from_table(sub_table)?);
        let restricted =
            Cocycle2::from_fn(sub_group, CoefficientGroup::roots_of_unity(), |a, b| vec![nf.table[sub[a]][sub[b]]])?;
        let s = splitting(&restricted, None)
            .ok_or_else(|| Error::InvariantViolation("μ′ does not split on CΛ/ZΛ".into()))?;
        let mut order = 1i64;
        for v in nf.table.iter().flatten().chain(s.iter().map(|v| &v[0])) {
            order = order.lcm(&v.order());
        }
        for (_, chi) in &tower.pairing {
            for v in chi {
                order = order.lcm(&v.order());
            }
        }
        let field = CyclotomicField::new(order as u32);
        let alg = QuotientAlgebra { group: g.clone(), table: nf.table.clone(), field: field.clone() };
        // center: common kernel of X ↦ [T_g, X] over generators of Λ/ZΛ
        let gens: Vec<usize> = (0..self.rank())
            .filter(|&i| self.factors[i] > 1)
            .map(|i| {
                let mut w = vec![0i64; self.rank()];
                w[i] = 1;
                self.quotient_index(&w)
            })
            .collect();
        let mut rows: Vec<Vec<Cyclotomic>> = vec![];
        for &gen in &gens {
            for x in 0..n {
                let mut col = vec![field.zero(); n];
                let (a, b) = (&alg.basis(gen), &alg.basis(x));
                let c = alg.mul(a, b);
                let e = alg.mul(b, a);
                for k in 0..n {
                    col[k] = &c[k] - &e[k];
                }
                rows.push(col);
            }
        }
        // rows[k·n + x] is the image of T_x under ad(T_gen_k); transpose to get the map's matrix
        let mut matrix: Vec<Vec<Cyclotomic>> = vec![];
        for k in 0..gens.len() {
            for out in 0..n {
                matrix.push((0..n).map(|x| rows[k * n + x][out].clone()).collect());
            }
        }
        let center_dimension = n - rank(matrix, n);
        // idempotents p_χ = (1/d) Σ_c χ(c)⁻¹ e(−s(c)) T_c
        let mut idempotents = vec![];
        for (_, chi) in &tower.pairing {
            let mut p = vec![field.zero(); n];
            for (i, &c) in sub.iter().enumerate() {
                let phase = -(chi[i] + s[i][0]);
                p[c] = field.root_of_unity(phase).expect("order divides N").scale(Rational::new(1, d as i64));
            }
            idempotents.push(p);
        }
        let one = alg.basis(0);
        let mut sum = vec![field.zero(); n];
        let mut orthogonal = true;
        for (i, p) in idempotents.iter().enumerate() {
            for (k, v) in p.iter().enumerate() {
                sum[k] += v;
            }
            for (j, p2) in idempotents.iter().enumerate() {
                let prod = alg.mul(p, p2);
                let expected = if i == j { p.clone() } else { vec![field.zero(); n] };
                if prod != expected {
                    orthogonal = false;
                }
            }
        }
        let corner_dimensions: Vec<usize> = idempotents
            .iter()
            .map(|p| rank((0..n).map(|x| alg.mul(&alg.mul(p, &alg.basis(x)), p)).collect(), n))
            .collect();
        let module_dimension =
            idempotents.first().map_or(0, |p| rank((0..n).map(|x| alg.mul(&alg.basis(x), p)).collect(), n));
        let certified = n == d * d
            && center_dimension == 1
            && orthogonal
            && sum == one
            && idempotents.len() == d
            && corner_dimensions.iter().all(|&c| c == 1)
            && module_dimension == d;
        Ok(BlockStructure {
            d,
            quotient_order: n,
            center_dimension,
            idempotents: idempotents.len(),
            idempotents_orthogonal: orthogonal,
            idempotents_sum_to_one: sum == one,
            corner_dimensions,
            module_dimension,
            certified,
        })
    }

    pub fn report(&self) -> Result<TwistedReport> {
        let tower = self.isotropic_tower()?;
        let block = self.block_structure()?;
        Ok(TwistedReport {
            rank: self.rank(),
            center_basis: self.center_basis(),
            center_index: self.center_index(),
            isotropic_generators: tower.generators.clone(),
            index_lambda_c: tower.index_lambda_c,
            index_c_z: tower.index_c_z,
            block,
        })
    }
}

fn unit(r: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; r];
    v[i] = 1;
    v
}

/// Rank over ℚ(ζ_N) by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Cyclotomic>>, width: usize) -> usize {
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inverse().expect("nonzero pivot");
        let pivot: Vec<Cyclotomic> = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in col..width {
                    let t = &f * &pivot[j];
                    rows[i][j] -= &t;
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

/// μ′ on Λ/ZΛ after rescaling.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub group: Arc<FiniteGroup>,
    /// Representative in Λ of each element of Λ/ZΛ.
    pub reps: Vec<Vec<i64>>,
    pub center_basis: Vec<Vec<i64>>,
    pub table: Vec<Vec<QmodZ>>,
}

#[derive(Clone, Debug)]
pub struct IsotropicTower {
    pub normal_form: NormalForm,
    /// CΛ/ZΛ as indices into Λ/ZΛ.
    pub subgroup: Vec<usize>,
    /// Generators of CΛ: the ZΛ basis followed by lifted isotropic vectors.
    pub generators: Vec<Vec<i64>>,
    pub index_lambda_c: u64,
    pub index_c_z: u64,
    /// Coset representative x and the character β(x, ·) on CΛ/ZΛ.
    pub pairing: Vec<(usize, Vec<QmodZ>)>,
}

impl IsotropicTower {
    pub fn contains(&self, x: &[i64]) -> bool {
        LatticeQuotient::new(&self.generators, x.len()).contains(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockStructure {
    pub d: usize,
    pub quotient_order: usize,
    pub center_dimension: usize,
    pub idempotents: usize,
    pub idempotents_orthogonal: bool,
    pub idempotents_sum_to_one: bool,
    pub corner_dimensions: Vec<usize>,
    pub module_dimension: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedReport {
    pub rank: usize,
    pub center_basis: Vec<Vec<i64>>,
    pub center_index: u64,
    pub isotropic_generators: Vec<Vec<i64>>,
    pub index_lambda_c: u64,
    pub index_c_z: u64,
    pub block: BlockStructure,
}

/// The twisted group algebra of a finite abelian group with cocycle `table`.
struct QuotientAlgebra {
    group: Arc<FiniteGroup>,
    table: Vec<Vec<QmodZ>>,
    field: CyclotomicField,
}

impl QuotientAlgebra {
    fn basis(&self, x: usize) -> Vec<Cyclotomic> {
        let mut v = vec![self.field.zero(); self.group.order()];
        v[x] = self.field.one();
        v
    }

    fn mul(&self, a: &[Cyclotomic], b: &[Cyclotomic]) -> Vec<Cyclotomic> {
        let n = self.group.order();
        let mut out = vec![self.field.zero(); n];
        for (x, ax) in a.iter().enumerate() {
            if ax.is_zero() {
                continue;
            }
            for (y, by) in b.iter().enumerate() {
                if by.is_zero() {
                    continue;
                }
                let phase = self.field.root_of_unity(self.table[x][y]).expect("order divides N");
                out[self.group.mul(x, y)].add_mul(&(ax * by), &phase);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qz::rat;

    fn lattice_eq(basis: &[Vec<i64>], expected: &[Vec<i64>]) -> bool {
        let r = expected[0].len();
        let a = LatticeQuotient::new(basis, r);
        let b = LatticeQuotient::new(expected, r);
        basis.iter().all(|x| b.contains(x)) && expected.iter().all(|x| a.contains(x))
    }

    #[test]
    fn sign_bicharacter() {
        let alg = TwistedLatticeAlgebra::rank_two(2).unwrap();
        assert_eq!(alg.center_index(), 4);
        assert!(lattice_eq(&alg.center_basis(), &[vec![2, 0], vec![0, 2]]));
        assert!(alg.verify_center());
        let tower = alg.isotropic_tower().unwrap();
        assert_eq!((tower.index_lambda_c, tower.index_c_z), (2, 2));
        let b = alg.block_structure().unwrap();
        assert_eq!(b.d, 2);
        assert!(b.certified, "{b:?}");
        // T_{2e₁} is central after rescaling
        let nf = alg.rescale_normal_form().unwrap();
        assert_eq!(nf.table.len(), 4);
        for y in [[1, 0], [0, 1], [1, 1], [3, -5]] {
            assert_eq!(alg.rescaled_mu(&[2, 0], &y), alg.rescaled_mu(&y, &[2, 0]));
        }
    }

    #[test]
    fn order_four() {
        let alg = TwistedLatticeAlgebra::rank_two(4).unwrap();
        assert!(lattice_eq(&alg.center_basis(), &[vec![4, 0], vec![0, 4]]));
        let b = alg.block_structure().unwrap();
        assert_eq!(b.d, 4);
        assert!(b.certified);
    }

    #[test]
    fn trivial_cocycle() {
        let alg = TwistedLatticeAlgebra::from_cocycle(vec![vec![rat(0, 1); 3]; 3]).unwrap();
        assert_eq!(alg.center_index(), 1);
        let tower = alg.isotropic_tower().unwrap();
        assert_eq!((tower.index_lambda_c, tower.index_c_z), (1, 1));
        assert!(tower.contains(&[1, 2, 3]));
        assert_eq!(alg.block_structure().unwrap().d, 1);
        // a symmetric cocycle is a coboundary: still commutative
        let sym =
            TwistedLatticeAlgebra::from_cocycle(vec![vec![rat(1, 3), rat(1, 5)], vec![rat(1, 5), rat(0, 1)]]).unwrap();
        assert_eq!(sym.center_index(), 1);
    }

    #[test]
    fn degenerate_rank_three() {
        // β(e₁,e₂) = 1/2, e₃ central
        let mut b = vec![vec![rat(0, 1); 3]; 3];
        b[0][1] = rat(1, 2);
        b[1][0] = rat(-1, 2);
        let alg = TwistedLatticeAlgebra::from_bicharacter(b).unwrap();
        assert_eq!(alg.center_index(), 4);
        assert!(alg.is_central(&[0, 0, 1]));
        assert!(alg.block_structure().unwrap().certified);
    }

    #[test]
    fn rejects_non_alternating() {
        assert!(TwistedLatticeAlgebra::from_bicharacter(vec![vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]])
            .is_err());
        assert!(TwistedLatticeAlgebra::from_bicharacter(vec![vec![rat(0, 1), rat(1, 3)], vec![rat(1, 3), rat(0, 1)]])
            .is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn alternating(r: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
            proptest::collection::vec((0i64..6, prop_oneof![Just(1i64), Just(2), Just(3), Just(4), Just(6)]), r * r)
                .prop_map(move |v| {
                    let mut b = vec![vec![Rational::zero(); r]; r];
                    for i in 0..r {
                        for j in (i + 1)..r {
                            let (n, d) = v[i * r + j];
                            b[i][j] = Rational::new(n, d);
                            b[j][i] = -b[i][j];
                        }
                    }
                    b
                })
        }

        fn vec3() -> impl Strategy<Value = Vec<i64>> {
            proptest::collection::vec(-5i64..6, 3)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]
            #[test]
            fn tower_indices(b in alternating(3)) {
                let alg = TwistedLatticeAlgebra::from_bicharacter(b).unwrap();
                prop_assume!(alg.center_index() <= 64);
                let tower = alg.isotropic_tower().unwrap();
                prop_assert_eq!(tower.index_lambda_c, tower.index_c_z);
                prop_assert_eq!(tower.index_lambda_c * tower.index_c_z, alg.center_index());
                prop_assert!(alg.verify_center());
                // independent check of the center: x ∈ ZΛ iff Bx is integral
                for k in 0..alg.center_index() as usize {
                    let x = alg.quotient_rep(k);
                    let integral = alg.beta_matrix().iter().all(|row| {
                        row.iter().zip(&x).fold(Rational::zero(), |acc, (a, b)| acc + *a * *b).is_integer()
                    });
                    prop_assert_eq!(integral, k == 0);
                }
            }

            #[test]
            fn bicharacter_laws(b in alternating(3), x in vec3(), y in vec3(), z in vec3()) {
                let alg = TwistedLatticeAlgebra::from_bicharacter(b).unwrap();
                prop_assert!(alg.beta(&x, &x).is_zero());
                prop_assert_eq!(alg.beta(&add(&x, &y), &z), alg.beta(&x, &z) + alg.beta(&y, &z));
                prop_assert_eq!(alg.beta(&x, &y), -alg.beta(&y, &x));
                // commutator from the multiplication rule
                let (c1, _) = alg.multiply_basis(&x, &y);
                let (c2, _) = alg.multiply_basis(&y, &x);
                prop_assert_eq!(c1 - c2, alg.beta(&x, &y));
            }

            #[test]
            fn beta_depends_on_class(b in alternating(3), s in proptest::collection::vec(0i64..12, 9)) {
                let alg = TwistedLatticeAlgebra::from_bicharacter(b.clone()).unwrap();
                let mut mu: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| if i < j { b[i][j] } else { Rational::zero() }).collect()).collect();
                // add a symmetric form, which is a coboundary on ℤ³
                for i in 0..3 {
                    for j in 0..3 {
                        let (a, c) = (i.min(j), i.max(j));
                        mu[i][j] += Rational::new(s[a * 3 + c], 12);
                    }
                }
                let other = TwistedLatticeAlgebra::from_cocycle(mu).unwrap();
                prop_assert_eq!(alg.center_index(), other.center_index());
                for x in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 2, 3]] {
                    for y in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [2, -1, 1]] {
                        prop_assert_eq!(alg.beta(&x, &y), other.beta(&x, &y));
                    }
                }
            }

            #[test]
            fn rank_two_blocks(m in 1i64..=5) {
                let alg = TwistedLatticeAlgebra::rank_two(m).unwrap();
                let block = alg.block_structure().unwrap();
                prop_assert_eq!(block.d as i64, m);
                prop_assert!(block.certified);
            }
        }
    }
}
