//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria known to be unattainable as literally stated still print FAIL with
//! the observed values, but do not fail the run; any other failure does.

use std::sync::Arc;
use std::time::{Duration, Instant};

use bernstein_core::affine_weyl::FacetType;
use bernstein_core::extensions::{
    baer_sum, bilinear_cocycle, heisenberg_cocycle, is_split, same_class, splitting, splitting_exhaustive, Cocycle2,
    CoefficientGroup, FiniteGroup, Value,
};
use bernstein_core::finite_oracle::{
    hecke_fin, q_parameter, sweep, FiniteGroupOfLieType, FiniteTorusCharacter, GroupKind,
};
use bernstein_core::graded::{k_parameters, lambda_exponents};
use bernstein_core::hecke::{build_block_algebra, BlockOptions, ExtAffineHeckeAlgebra, ParameterFunction};
use bernstein_core::intmat::IntMatrix;
use bernstein_core::qz::{rat, QmodZ, Rational};
use bernstein_core::rootdata::{is_nonsingular, FrobeniusAction, RootDatum, TorusCharacter, WeylElement};
use bernstein_core::stabilizers::{alcove_lift_stabilizer, gamma_class_map, gamma_decomposition, stab_theta};
use bernstein_core::twisted_group_alg::TwistedLatticeAlgebra;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn legendre() -> FiniteTorusCharacter {
    FiniteTorusCharacter(vec![QmodZ::from_frac(1, 2)])
}

fn criterion_1() -> Outcome {
    let mut literal_failures = vec![];
    let mut ok = true;
    for q in [3u64, 5, 7] {
        let g = FiniteGroupOfLieType::build(GroupKind::SL2, q).unwrap();
        let alg = hecke_fin(&g, &legendre()).unwrap();
        ok &= alg.dim() == 2;
        let (a, b) = alg.t_prime_square().unwrap();
        let a = a.as_rational().unwrap();
        let b = b.as_rational().unwrap();
        let chi_minus_one = if (q - 1) / 2 % 2 == 0 { 1 } else { -1 };
        ok &= b == Rational::from_integer(0);
        ok &= a == rat(chi_minus_one, q as i64);
        ok &= q_parameter(&alg).unwrap() == Rational::from_integer(1);
        if a != rat(1, q as i64) {
            literal_failures.push(format!("q={q}: T'^2 = {a}*T_e"));
        }
    }
    if !ok {
        return outcome(false, "dimension, b = 0, signed identity or q_parameter = 1 failed");
    }
    if literal_failures.is_empty() {
        outcome(true, "dim 2, T'^2 = q^-1 T_e, q_parameter = 1 for q = 3, 5, 7")
    } else {
        outcome(
            false,
            format!(
                "dim 2 and q_parameter = 1 hold; literal T'^2 = q^-1 T_e fails ({}); T'^2 = chi(-1) q^-1 T_e holds",
                literal_failures.join(", ")
            ),
        )
    }
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    for kind in [GroupKind::SL2, GroupKind::PGL2] {
        for q in [3u64, 5, 7] {
            let g = FiniteGroupOfLieType::build(kind, q).unwrap();
            let alg = hecke_fin(&g, &FiniteTorusCharacter(vec![QmodZ::zero(); g.torus_orders().len()])).unwrap();
            ok &= q_parameter(&alg).unwrap() == Rational::from_integer(q as i64);
        }
    }
    outcome(ok, "q_parameter = q for SL2, PGL2 at q = 3, 5, 7")
}

fn sweep_groups() -> Vec<FiniteGroupOfLieType> {
    let mut out = vec![];
    for kind in [GroupKind::SL2, GroupKind::PGL2] {
        for q in [2u64, 3, 4, 5, 7] {
            out.push(FiniteGroupOfLieType::build(kind, q).unwrap());
        }
    }
    out.push(FiniteGroupOfLieType::build(GroupKind::SU3, 2).unwrap());
    out
}

fn criteria_3_4() -> (Outcome, Outcome) {
    let mut cases = 0;
    let mut exceptions_3 = vec![];
    let mut checked_4 = 0;
    let mut exceptions_4 = vec![];
    for g in sweep_groups() {
        for case in sweep(&g).unwrap() {
            cases += 1;
            if (case.dimension == 2) != case.weyl_fixed {
                exceptions_3.push(format!("{}({}) {:?}", g.kind(), g.q(), case.theta));
            }
            if case.weyl_fixed && case.norm_pairing.is_some_and(|n| !n.is_zero()) {
                checked_4 += 1;
                if case.q_parameter != Some(Rational::from_integer(1)) {
                    exceptions_4.push(format!("{}({}) {:?}", g.kind(), g.q(), case.theta));
                }
            }
        }
    }
    (
        outcome(
            exceptions_3.is_empty(),
            format!("{cases} characters, {} exceptions {:?}", exceptions_3.len(), exceptions_3),
        ),
        outcome(
            exceptions_4.is_empty() && checked_4 > 0,
            format!("{checked_4} fixed characters with nonzero norm pairing, {} exceptions", exceptions_4.len()),
        ),
    )
}

fn element_order(w: &WeylElement) -> usize {
    let mut cur = w.clone();
    let mut k = 1;
    while !cur.is_identity() {
        cur = cur.compose(w);
        k += 1;
    }
    k
}

const RANDOM_TYPES: &[&str] =
    &["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "G2", "F4", "A1xA1", "A1xA2", "A2xA2", "A1xB2"];

fn criterion_5() -> Outcome {
    for (n, q) in [(2usize, 3u64), (3, 7), (4, 5)] {
        let kind = format!("A{}", n - 1);
        let d = RootDatum::simply_connected(&kind).unwrap();
        let theta = TorusCharacter::new(&vec![n as i64 - 1; n - 1], n as i64).unwrap();
        let frob = FrobeniusAction::split(&d, q).unwrap();
        let w = stab_theta(&d, &theta).unwrap();
        let cyclic = |els: &[WeylElement]| els.len() == n && els.iter().any(|e| element_order(e) == n);
        if !cyclic(w.elements()) || !is_nonsingular(&theta, &d, &frob).unwrap() {
            return outcome(false, format!("SL{n}: W_theta or nonsingularity wrong"));
        }
        let dec = gamma_decomposition(&d, &theta).unwrap();
        if !cyclic(&dec.gamma) || alcove_lift_stabilizer(&d, &theta).unwrap().order() != n {
            return outcome(false, format!("SL{n}: Gamma or alcove-lift stabilizer wrong"));
        }
        if gamma_class_map(&d, &theta).is_err() {
            return outcome(false, format!("SL{n}: class map not injective"));
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut failures = vec![];
    for _ in 0..100 {
        let kind = RANDOM_TYPES[rng.gen_range(0..RANDOM_TYPES.len())];
        let d = if rng.gen_bool(0.5) { RootDatum::simply_connected(kind) } else { RootDatum::adjoint(kind) }.unwrap();
        let den = rng.gen_range(1..=12);
        let nums: Vec<i64> = (0..d.rank()).map(|_| rng.gen_range(0..den)).collect();
        let theta = TorusCharacter::new(&nums, den).unwrap();
        let result = (|| -> bernstein_core::Result<()> {
            let dec = gamma_decomposition(&d, &theta)?;
            if dec.witness.len() != dec.w_theta.order()
                || dec.subsystem.group.order() * dec.gamma.len() != dec.w_theta.order()
            {
                return Err(bernstein_core::Error::DecompositionFailure("orders".into()));
            }
            alcove_lift_stabilizer(&d, &theta)?;
            gamma_class_map(&d, &theta)?;
            Ok(())
        })();
        if let Err(e) = result {
            failures.push(format!("{kind} {nums:?}/{den}: {e}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("SL2/SL3/SL4 barycentric ok; 100 random cases, {} failures {:?}", failures.len(), failures),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xbae2);
    let shapes: &[&[usize]] =
        &[&[2], &[4], &[2, 2], &[2, 4], &[3, 3], &[2, 2, 2], &[4, 4], &[2, 2, 2, 2], &[8], &[2, 6]];
    let mut additive = 0;
    for _ in 0..50 {
        let orders = shapes[rng.gen_range(0..shapes.len())];
        let k = orders.len();
        let random_form = |rng: &mut StdRng| -> Vec<Vec<i64>> {
            (0..k).map(|_| (0..k).map(|_| rng.gen_range(0..8)).collect()).collect()
        };
        let (ma, mb) = (random_form(&mut rng), random_form(&mut rng));
        let coeff = CoefficientGroup::roots_of_unity();
        let a = bilinear_cocycle(orders, &ma, coeff.clone()).unwrap();
        let b = bilinear_cocycle(orders, &mb, coeff.clone()).unwrap();
        let g = a.group().clone();
        let cochain: Vec<Value> = (0..g.order())
            .map(|x| vec![if x == 0 { QmodZ::zero() } else { QmodZ::from_frac(rng.gen_range(0..12), 12) }])
            .collect();
        let b = baer_sum(&b, &Cocycle2::coboundary(g.clone(), coeff.clone(), &cochain).unwrap()).unwrap();
        let sum = baer_sum(&a, &b).unwrap();
        let mab: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| ma[i][j] + mb[i][j]).collect()).collect();
        let direct = bilinear_cocycle(orders, &mab, coeff).unwrap();
        // independent invariant: for abelian groups and divisible coefficients the class is the commutator form
        let form = |c: &Cocycle2| -> Vec<Option<Vec<QmodZ>>> {
            (0..g.order())
                .flat_map(|x| (0..g.order()).map(move |y| (x, y)))
                .map(|(x, y)| c.commutator_form(x, y))
                .collect()
        };
        let forms_add = form(&sum)
            .iter()
            .zip(form(&a).iter().zip(form(&b).iter()))
            .all(|(s, (x, y))| s.as_ref().unwrap()[0] == x.as_ref().unwrap()[0] + y.as_ref().unwrap()[0]);
        if same_class(&sum, &direct).unwrap() && forms_add {
            additive += 1;
        }
    }
    let h = heisenberg_cocycle();
    let heis_snf = splitting(&h, None).is_none();
    let heis_exhaustive = splitting_exhaustive(&h).unwrap().is_none();
    let mut cyclic_split = true;
    for n in 1..=16usize {
        let g = Arc::new(FiniteGroup::cyclic(n));
        let c = Cocycle2::from_fn(g, CoefficientGroup::roots_of_unity(), |a, b| {
            vec![QmodZ::from_frac(i64::from(a + b >= n) * 5, n as i64)]
        })
        .unwrap();
        cyclic_split &= is_split(&c);
    }
    outcome(
        additive == 50 && heis_snf && heis_exhaustive && cyclic_split,
        format!(
            "Baer additivity {additive}/50; Heisenberg non-split (SNF {heis_snf}, exhaustive {heis_exhaustive}); cyclic split {cyclic_split}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    for m in [2i64, 3, 4] {
        let a = TwistedLatticeAlgebra::rank_two(m).unwrap();
        let center = a.center_basis();
        let z = IntMatrix::from_cols(&center, 2);
        ok &= z.det().abs() == m * m && center.iter().flatten().all(|x| x % m == 0);
        let r = a.report().unwrap();
        ok &= r.index_lambda_c == m as u64 && r.index_c_z == m as u64;
        ok &= r.block.certified && r.block.center_dimension == 1 && r.block.quotient_order == (m * m) as usize;
        ok &= r.block.module_dimension == m as usize;
    }
    outcome(ok, "Z = mZ x mZ, indices m, quotient algebra M_m for m = 2, 3, 4")
}

fn criterion_8() -> Outcome {
    let algebras = [
        (
            "A1 sc (q^2, q)",
            ExtAffineHeckeAlgebra::new(
                &RootDatum::simply_connected("A1").unwrap(),
                ParameterFunction::new(vec![2, 1]),
                3,
            )
            .unwrap(),
        ),
        (
            "A1 adjoint",
            ExtAffineHeckeAlgebra::new(&RootDatum::adjoint("A1").unwrap(), ParameterFunction::equal(2, 1), 3).unwrap(),
        ),
        (
            "C2 sc (q^2, q^3, q)",
            ExtAffineHeckeAlgebra::new(
                &RootDatum::simply_connected("C2").unwrap(),
                ParameterFunction::new(vec![2, 3, 1]),
                2,
            )
            .unwrap(),
        ),
        (
            "C2 adjoint (q, q^2, q^2)",
            ExtAffineHeckeAlgebra::new(&RootDatum::adjoint("C2").unwrap(), ParameterFunction::new(vec![1, 2, 2]), 2)
                .unwrap(),
        ),
    ];
    let mut notes = vec![];
    let mut ok = true;
    for (name, alg) in &algebras {
        let r = alg.check_relations(6).unwrap();
        if !r.all() {
            ok = false;
            notes.push(format!("{name}: {r:?}"));
        }
    }
    let mut rng = StdRng::seed_from_u64(0x8ec4e);
    let mut pairs_ok = 0;
    for t in 0..50 {
        let alg = &algebras[t % algebras.len()].1;
        let n = alg.datum().rank();
        let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let y: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let tx = alg.bernstein_theta(&x).unwrap();
        let k = alg.dominant_shift(&x);
        let independent = alg.bernstein_theta_with_shift(&x, k + 1).unwrap() == tx;
        let product = alg.multiply(&tx, &alg.bernstein_theta(&y).unwrap()).unwrap();
        if independent && product == alg.bernstein_theta(&sum).unwrap() {
            pairs_ok += 1;
        }
    }
    ok &= pairs_ok == 50;
    let mut central = 0;
    let mut candidates = 0;
    for (_, alg) in &algebras {
        let n = alg.datum().rank();
        for j in 0..n {
            let x: Vec<i64> = (0..n).map(|i| i64::from(i == j)).collect();
            let z = alg.symmetrized_theta(&x).unwrap();
            candidates += 1;
            if alg.verify_central(&z).unwrap().central {
                central += 1;
            }
        }
    }
    ok &= central == candidates;
    outcome(
        ok,
        format!("relations up to length 6 on 4 algebras {notes:?}; theta pairs {pairs_ok}/50; central {central}/{candidates}"),
    )
}

fn criterion_9() -> Outcome {
    let qf = 3u64;
    let powers: Vec<Rational> = (0..4).map(|e| Rational::from_integer(qf.pow(e) as i64)).collect();
    let mut good = 0;
    for q in &powers {
        for qs in &powers {
            for sign in [1i8, -1] {
                let (l, ls) = lambda_exponents(*q, *qs, qf).unwrap();
                let pow = |e: Rational| -> Rational {
                    let n = e.to_integer();
                    let p = Rational::from_integer(qf as i64);
                    if n >= 0 {
                        (0..n).fold(Rational::from_integer(1), |acc, _| acc * p)
                    } else {
                        (0..-n).fold(Rational::from_integer(1), |acc, _| acc / p)
                    }
                };
                let exps = pow(l) == q * qs && pow(ls) == q / qs;
                let agree = k_parameters(*q, *qs, sign, qf).map(|k| k == l + Rational::from_integer(sign.into()) * ls);
                if exps && agree == Ok(true) {
                    good += 1;
                }
            }
        }
    }
    outcome(good == 32, format!("{good}/32 cases"))
}

fn criterion_10() -> Outcome {
    let d = RootDatum::simply_connected("A1").unwrap();
    let mut ok = true;
    let mut notes = vec![];
    for q in [3u64, 5, 7] {
        let frob = FrobeniusAction::split(&d, q).unwrap();
        let leg = build_block_algebra(
            &d,
            &frob,
            &TorusCharacter::new(&[1], 2).unwrap(),
            &FacetType(vec![]),
            &BlockOptions::default(),
        )
        .unwrap();
        let r = &leg.report;
        ok &= r.shape == "twisted group algebra" && r.hecke_generators.is_empty() && r.gamma_order == 2;
        ok &= r.weyl_order_sigma == r.weyl_order_dual && r.parameter_preserving;
        let triv =
            build_block_algebra(&d, &frob, &TorusCharacter::zero(1), &FacetType(vec![]), &BlockOptions::default())
                .unwrap();
        let r = &triv.report;
        let qs = q.to_string();
        ok &= r.shape == "affine Hecke algebra" && r.hecke_generators.len() == 2;
        ok &= r.hecke_generators.iter().all(|g| g.q == qs);
        ok &= r.weyl_order_sigma == 2 && r.weyl_order_dual == 2 && r.parameter_preserving;
        ok &= triv.algebra.check_relations(4).unwrap().all();
        notes.push(format!("q={q}"));
    }
    outcome(
        ok,
        format!("Legendre block: twisted group algebra of Z x| Z/2; trivial block: q_s = q ({})", notes.join(", ")),
    )
}

fn main() {
    let mut hard_failures = 0;
    let expected_failures = [1usize];
    let mut emit = |n: usize, budget: Duration, start: Instant, o: Outcome| {
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = o.pass && in_time;
        println!(
            "criterion {n:>2}: {} ({:.2}s / {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
        if !pass && !(expected_failures.contains(&n) && in_time) {
            hard_failures += 1;
        }
    };
    let s = Instant::now();
    emit(1, Duration::from_secs(30), s, criterion_1());
    let s = Instant::now();
    emit(2, Duration::from_secs(60), s, criterion_2());
    let s = Instant::now();
    let (c3, c4) = criteria_3_4();
    let t = s.elapsed();
    println!("criteria 3-4 sweep time {:.2}s", t.as_secs_f64());
    emit(3, Duration::from_secs(120), s, c3);
    emit(4, Duration::from_secs(120), s, c4);
    let s = Instant::now();
    emit(5, Duration::from_secs(60), s, criterion_5());
    let s = Instant::now();
    emit(6, Duration::from_secs(60), s, criterion_6());
    let s = Instant::now();
    emit(7, Duration::from_secs(10), s, criterion_7());
    let s = Instant::now();
    emit(8, Duration::from_secs(120), s, criterion_8());
    let s = Instant::now();
    emit(9, Duration::from_secs(1), s, criterion_9());
    let s = Instant::now();
    emit(10, Duration::from_secs(30), s, criterion_10());
    if hard_failures > 0 {
        eprintln!("{hard_failures} unexpected acceptance failure(s)");
        std::process::exit(1);
    }
}
