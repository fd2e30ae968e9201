//! Input schema shared by every command.

use std::collections::BTreeMap;
use std::path::Path;

use bernstein_core::affine_weyl::{AffineWeyl, FacetType};
use bernstein_core::intmat::IntMatrix;
use bernstein_core::qz::{parse_rational, QmodZ, Rational};
use bernstein_core::rootdata::{FrobeniusAction, RootDatum, TorusCharacter};
use serde::Deserialize;
use serde_json::Value;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frobenius {
    pub matrix: Vec<Vec<i64>>,
    pub q: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theta {
    pub numerators: Vec<i64>,
    pub denominator: i64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Facet {
    #[serde(rename = "J", default)]
    pub j: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub rank: usize,
    pub simple_roots: Vec<Vec<i64>>,
    pub simple_coroots: Vec<Vec<i64>>,
    pub frobenius: Frobenius,
    pub theta: Theta,
    #[serde(default)]
    pub facet: Facet,
    /// Table over Ω in `omega_group` order; entries are "p/q" strings or integers.
    #[serde(default)]
    pub omega_cocycle: Option<Vec<Vec<Value>>>,
    /// Hecke parameters keyed by simple affine root index, overriding the finite oracle.
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
}

/// Failure to read or interpret the input; maps to exit code 1.
#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn read(path: &Path) -> Result<InputFile, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ParseError(format!("{}: {e}", path.display())))
}

pub fn rational_value(v: &Value) -> Option<Rational> {
    match v {
        Value::Number(n) => n.as_i64().map(Rational::from_integer),
        Value::String(s) => parse_rational(s),
        _ => None,
    }
}

/// The constructed objects; every field validated.
pub struct Problem {
    pub datum: RootDatum,
    pub frob: FrobeniusAction,
    pub theta: TorusCharacter,
    pub facet: FacetType,
    pub omega_cocycle: Option<Vec<Vec<QmodZ>>>,
    pub parameters: BTreeMap<usize, Rational>,
}

impl InputFile {
    /// Every violated invariant of the constructed types.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out: Vec<String> = RootDatum::diagnostics(self.rank, &self.simple_roots, &self.simple_coroots)
            .into_iter()
            .map(|d| format!("root datum: {d}"))
            .collect();
        if !out.is_empty() {
            return out;
        }
        let datum = match RootDatum::new(self.rank, self.simple_roots.clone(), self.simple_coroots.clone()) {
            Ok(d) => d,
            Err(e) => return vec![format!("root datum: {e}")],
        };
        let m = &self.frobenius.matrix;
        if m.len() != self.rank || m.iter().any(|r| r.len() != self.rank) {
            out.push(format!("frobenius: matrix must be {0}x{0}", self.rank));
            return out;
        }
        let matrix = IntMatrix::from_rows(m);
        out.extend(
            FrobeniusAction::diagnostics(&datum, &matrix, self.frobenius.q)
                .into_iter()
                .map(|d| format!("frobenius: {d}")),
        );
        let frob = FrobeniusAction::new(&datum, matrix, self.frobenius.q).ok();

        if self.theta.denominator <= 0 {
            out.push("theta: denominator must be positive".into());
        } else if self.theta.numerators.len() != self.rank {
            out.push(format!("theta: {} numerators for rank {}", self.theta.numerators.len(), self.rank));
        } else if let (Ok(theta), Some(frob)) =
            (TorusCharacter::new(&self.theta.numerators, self.theta.denominator), &frob)
        {
            out.extend(theta.diagnostics(frob).into_iter().map(|d| format!("theta: {d}")));
        }

        let aw = AffineWeyl::new(&datum);
        let simple = aw.simple_roots();
        let n_aff = simple.roots.len();
        let mut seen = vec![false; n_aff];
        for &j in &self.facet.j {
            if j >= n_aff {
                out.push(format!("facet: index {j} out of range (there are {n_aff} simple affine roots)"));
            } else if std::mem::replace(&mut seen[j], true) {
                out.push(format!("facet: index {j} repeated"));
            }
        }
        let mut components: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (i, &c) in simple.component.iter().enumerate() {
            let e = components.entry(c).or_default();
            e.0 += 1;
            e.1 += usize::from(seen[i]);
        }
        for (c, (total, chosen)) in components {
            if total > 0 && total == chosen {
                out.push(format!("facet: J contains every simple affine root of component {c}"));
            }
        }

        for (k, v) in &self.parameters {
            match k.parse::<usize>() {
                Ok(i) if i < n_aff => {}
                _ => out.push(format!("parameters: key {k:?} is not a simple affine root index")),
            }
            match rational_value(v) {
                Some(r) if r > Rational::from_integer(0) => {}
                _ => out.push(format!("parameters: value {v} for {k:?} is not a positive rational")),
            }
        }

        if let Some(table) = &self.omega_cocycle {
            match crate::commands::omega_group_cocycle(&datum, table) {
                Ok((c, _)) => out.extend(c.diagnostics().into_iter().map(|d| format!("omega_cocycle: {d}"))),
                Err(e) => out.push(format!("omega_cocycle: {e}")),
            }
        }
        out
    }

    pub fn build(&self) -> Result<Problem, ParseError> {
        let diagnostics = self.diagnostics();
        if !diagnostics.is_empty() {
            return Err(ParseError(diagnostics.join("; ")));
        }
        let err = |e: bernstein_core::Error| ParseError(e.to_string());
        let datum = RootDatum::new(self.rank, self.simple_roots.clone(), self.simple_coroots.clone()).map_err(err)?;
        let frob = FrobeniusAction::new(&datum, IntMatrix::from_rows(&self.frobenius.matrix), self.frobenius.q)
            .map_err(err)?;
        let theta = TorusCharacter::new(&self.theta.numerators, self.theta.denominator).map_err(err)?;
        let omega_cocycle = self.omega_cocycle.as_ref().map(|t| parse_table(t)).transpose()?;
        // keys and values were checked by `diagnostics`
        let parameters =
            self.parameters.iter().filter_map(|(k, v)| Some((k.parse::<usize>().ok()?, rational_value(v)?))).collect();
        Ok(Problem { datum, frob, theta, facet: FacetType(self.facet.j.clone()), omega_cocycle, parameters })
    }
}

pub fn parse_table(table: &[Vec<Value>]) -> Result<Vec<Vec<QmodZ>>, ParseError> {
    table
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    rational_value(v)
                        .map(QmodZ::new)
                        .ok_or_else(|| ParseError(format!("omega_cocycle: {v} is not a rational")))
                })
                .collect()
        })
        .collect()
}
