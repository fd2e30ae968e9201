use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use bernstein_core::affine_weyl::{AffineWeyl, ExtAffineElement};
use bernstein_core::extensions::{
    baer_sum, is_split, splitting, splitting_exhaustive, Cocycle2, CocycleReport, CoefficientGroup,
    EquivariantStructure, FiniteGroup,
};
use bernstein_core::finite_oracle::{oracle_report, FiniteGroupOfLieType, FiniteTorusCharacter, GroupKind};
use bernstein_core::hecke::{build_block_algebra, BlockOptions};
use bernstein_core::qz::lcm_all;
use bernstein_core::rootdata::{is_nonsingular, weyl_group_bounded, RootDatum, WeylElement};
use bernstein_core::stabilizers::stabilizer_report;
use bernstein_core::Error;
use serde_json::{json, Value};

use crate::input::{parse_table, ParseError, Problem};

/// Word length used when checking Hecke relations.
const RELATION_WORD_LENGTH: usize = 4;
/// Largest Ω for which the exhaustive splitting search is attempted.
const EXHAUSTIVE_LIMIT: usize = 8;

#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Guard(String),
    Invariant(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Guard(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Parse(m) => write!(f, "parse error: {m}"),
            Failure::Guard(m) => write!(f, "guard exceeded: {m}"),
            Failure::Invariant(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::GroupTooLarge { .. } | Error::OracleTooLarge { .. } => Failure::Guard(msg),
            Error::InvalidDatum(_)
            | Error::InvalidFrobenius(_)
            | Error::InvalidCharacter(_)
            | Error::BadPrimePower(_)
            | Error::InvalidInput(_)
            | Error::NotSemisimple
            | Error::UnrecognizedRankOneKind(_)
            | Error::NotAPower { .. } => Failure::Parse(msg),
            _ => Failure::Invariant(msg),
        }
    }
}

pub struct Guards {
    pub max_group_order: usize,
    pub max_length: u64,
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn theta_json(p: &Problem) -> Value {
    json!(p.theta.values())
}

pub fn stab(p: &Problem, g: &Guards) -> Result<Value, Failure> {
    let w = weyl_group_bounded(&p.datum, g.max_group_order)?;
    let report = stabilizer_report(&p.datum, &p.theta, Some(&p.frob))?;
    let mut out = to_json(&report);
    out["nonsingular"] = json!(is_nonsingular(&p.theta, &p.datum, &p.frob)?);
    out["weyl_order"] = json!(w.order());
    out["theta"] = theta_json(p);
    Ok(out)
}

fn block_options(p: &Problem, g: &Guards) -> BlockOptions {
    BlockOptions { oracle_bound: g.max_group_order, parameters: p.parameters.clone(), ..BlockOptions::default() }
}

pub fn qparams(p: &Problem, g: &Guards) -> Result<Value, Failure> {
    weyl_group_bounded(&p.datum, g.max_group_order)?;
    let block = build_block_algebra(&p.datum, &p.frob, &p.theta, &p.facet, &block_options(p, g))?;
    let mut out = to_json(&block.report);
    out["theta"] = theta_json(p);
    Ok(out)
}

/// The report, and whether every checked relation held.
pub fn hecke(p: &Problem, g: &Guards) -> Result<(Value, bool), Failure> {
    weyl_group_bounded(&p.datum, g.max_group_order)?;
    let block = build_block_algebra(&p.datum, &p.frob, &p.theta, &p.facet, &block_options(p, g))?;
    let mut algebra = block.algebra.with_max_length(g.max_length);
    if let Some(table) = &p.omega_cocycle {
        algebra = algebra.with_cocycle(table.clone())?;
    }
    let words = RELATION_WORD_LENGTH.min(g.max_length as usize);
    let relations = algebra.check_relations(words)?;
    let generators: Vec<Value> = (0..algebra.num_generators())
        .map(|i| json!({"index": i, "q_exponent": algebra.parameters().exponents[i]}))
        .collect();
    let bernstein: Vec<Value> = (0..algebra.datum().simple_roots().len())
        .map(|i| {
            let (q_alpha, q_alpha_star) = algebra.bernstein_exponents(i);
            json!({"simple_root": i, "v_exponents": [q_alpha, q_alpha_star]})
        })
        .collect();
    let ok = relations.all();
    let out = json!({
        "block": to_json(&block.report),
        "rank": algebra.datum().rank(),
        "q": algebra.q_f(),
        "generators": generators,
        "bernstein": bernstein,
        "relations": to_json(&relations),
        "relations_hold": ok,
        "twisted": p.omega_cocycle.is_some(),
        "theta": theta_json(p),
    });
    Ok((out, ok))
}

/// Matches the input against the finite groups the oracle can build.
fn oracle_kind(p: &Problem) -> Result<(GroupKind, FiniteTorusCharacter), Failure> {
    for kind in GroupKind::BUILTIN {
        let probe = match FiniteGroupOfLieType::build_bounded(kind, 2, 1_000) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let Some((datum, frob, _)) = probe.root_datum_model() else { continue };
        let same_datum =
            datum.simple_roots() == p.datum.simple_roots() && datum.simple_coroots() == p.datum.simple_coroots();
        if !same_datum || frob.matrix() != p.frob.matrix() {
            continue;
        }
        let values = p.theta.values();
        let finite = match kind {
            GroupKind::SU3 | GroupKind::PU3 => FiniteTorusCharacter(vec![values[1]]),
            _ => FiniteTorusCharacter(values.to_vec()),
        };
        return Ok((kind, finite));
    }
    Err(Failure::Parse("the finite oracle supports SL2, PGL2, GL2, SU3 and PU3 data only".into()))
}

pub fn oracle(p: &Problem, g: &Guards) -> Result<Value, Failure> {
    let (kind, theta) = oracle_kind(p)?;
    let group = FiniteGroupOfLieType::build_bounded(kind, p.frob.q(), g.max_group_order)?;
    if group.to_root_datum_character(&theta).as_ref() != Some(&p.theta) {
        return Err(Failure::Parse("theta does not come from a character of the finite torus".into()));
    }
    group.validate_character(&theta)?;
    let report = oracle_report(&group, &theta)?;
    Ok(to_json(&report))
}

/// Ω with its multiplication table and the cocycle given on it.
pub fn omega_group_cocycle(
    datum: &RootDatum,
    table: &[Vec<Value>],
) -> Result<(Cocycle2, Vec<ExtAffineElement>), Failure> {
    let values = parse_table(table)?;
    let aw = AffineWeyl::new(datum);
    let (group, elements) = omega_group(&aw)?;
    let n = elements.len();
    if values.len() != n || values.iter().any(|r| r.len() != n) {
        return Err(Failure::Parse(format!("omega_cocycle must be {n}x{n}")));
    }
    let table = values.into_iter().map(|row| row.into_iter().map(|x| vec![x]).collect()).collect();
    Ok((Cocycle2::new(group, CoefficientGroup::roots_of_unity(), table)?, elements))
}

fn omega_group(aw: &AffineWeyl) -> Result<(Arc<FiniteGroup>, Vec<ExtAffineElement>), Failure> {
    let elements = aw.omega_group()?;
    let index: HashMap<&ExtAffineElement, usize> = elements.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mult = elements.iter().map(|a| elements.iter().map(|b| index[&aw.mul(a, b)]).collect()).collect();
    Ok((Arc::new(FiniteGroup::from_table(mult)?), elements))
}

/// Frobenius conjugation on Ω as a permutation, or `None` if it does not preserve Ω.
fn frobenius_on_omega(p: &Problem, elements: &[ExtAffineElement]) -> Option<Vec<usize>> {
    let m = p.frob.matrix();
    let m_inv = m.inverse_unimodular()?;
    let a = m.transpose();
    elements
        .iter()
        .map(|x| {
            let w = WeylElement::from_character_matrix(m_inv.mul(&x.finite_part().on_characters).mul(m));
            let image = ExtAffineElement::new(&p.datum, a.apply(x.translation()), w);
            elements.iter().position(|y| *y == image)
        })
        .collect()
}

pub fn cocycle(p: &Problem, raw: Option<&[Vec<Value>]>, equivariant: bool) -> Result<Value, Failure> {
    let (c, elements) = match raw {
        Some(t) => omega_group_cocycle(&p.datum, t)?,
        None => {
            let (group, elements) = omega_group(&AffineWeyl::new(&p.datum))?;
            (Cocycle2::zero(group, CoefficientGroup::roots_of_unity()), elements)
        }
    };
    let diagnostics = c.diagnostics();
    if !diagnostics.is_empty() {
        return Err(Failure::Parse(format!("omega_cocycle: {}", diagnostics.join("; "))));
    }
    let split = splitting(&c, None);
    let n = elements.len();
    // n·s(x) = Σ_y c(x,y) for any splitting s, so s takes values in (1/nN)ℤ/ℤ
    // where N is the exponent of the values of c; search over ℤ/nN exactly.
    let exhaustive = if n <= EXHAUSTIVE_LIMIT {
        let exponent = lcm_all(c.table().iter().flatten().map(|v| v[0].order()));
        let finite =
            Cocycle2::new(c.group().clone(), CoefficientGroup::finite(&[exponent * n as i64]), c.table().to_vec())?;
        match splitting_exhaustive(&finite) {
            Ok(s) => Some(s.is_some()),
            Err(Error::GroupTooLarge { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let inverse_sum = baer_sum(&c, &c.negate())?;
    let commutator: Option<Vec<Vec<Value>>> = c
        .group()
        .is_abelian()
        .then(|| (0..n).map(|x| (0..n).map(|y| json!(c.commutator_form(x, y).map(|v| v[0]))).collect()).collect());
    let mut out = json!({
        "omega": elements.iter().map(|e| json!({"translation": e.translation(), "length": e.length()})).collect::<Vec<_>>(),
        "cocycle": to_json(&CocycleReport::from(&c)),
        "splits": split.is_some(),
        "splitting": split.map(|s| s.into_iter().map(|v| v[0]).collect::<Vec<_>>()),
        "exhaustive_splits": exhaustive,
        "baer_sum_with_inverse_splits": is_split(&inverse_sum),
        "commutator_form": commutator,
    });
    if equivariant {
        out["equivariant"] = match frobenius_on_omega(p, &elements) {
            None => json!({"frobenius_preserves_omega": false}),
            Some(perm) => match EquivariantStructure::strict(&c, vec![(perm.clone(), vec![1])]) {
                Ok(eq) => {
                    let s = splitting(&c, Some(&eq));
                    json!({
                        "frobenius_preserves_omega": true,
                        "frobenius_permutation": perm,
                        "compatible": true,
                        "splits": s.is_some(),
                        "splitting": s.map(|s| s.into_iter().map(|v| v[0]).collect::<Vec<_>>()),
                    })
                }
                Err(e) => json!({
                    "frobenius_preserves_omega": true,
                    "frobenius_permutation": perm,
                    "compatible": false,
                    "reason": e.to_string(),
                }),
            },
        };
    }
    Ok(out)
}
