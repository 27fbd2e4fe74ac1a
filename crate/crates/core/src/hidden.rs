//! Per-context hidden variables with deterministic responses.
//!
//! Within one context every measurement is a function of a single random
//! variable λ. The canonical choice takes λ to be the observed outcome tuple
//! itself, restricted to its support.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};
use crate::system::{ContextPmf, Outcome, Sign, System};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HiddenError {
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("context `{context}` has no valid distribution: {reason}")]
    InvalidPmf { context: String, reason: String },
}

/// A finite λ with one response function per content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaModel {
    /// Contents in context order; response tuples follow this order.
    pub contents: Vec<String>,
    pub atoms: Vec<(String, Rational)>,
    /// Content label to (atom identifier to response).
    pub responses: BTreeMap<String, BTreeMap<String, Sign>>,
}

impl LambdaModel {
    /// Responses of every content at `atom`, or `None` if some response is undefined.
    pub fn response_tuple(&self, atom: &str) -> Option<Outcome> {
        self.contents
            .iter()
            .map(|q| self.responses.get(q)?.get(atom).copied())
            .collect::<Option<Vec<_>>>()
            .map(Outcome::new)
    }

    /// Nonnegative probabilities summing to one, distinct atom identifiers
    /// and total response functions.
    pub fn is_well_formed(&self) -> bool {
        let ids: BTreeSet<&str> = self.atoms.iter().map(|(a, _)| a.as_str()).collect();
        ids.len() == self.atoms.len()
            && self.atoms.iter().all(|(_, p)| !p.is_negative())
            && self.atoms.iter().map(|(_, p)| p).sum::<Rational>().is_one()
            && self.responses.len() == self.contents.len()
            && self.atoms.iter().all(|(a, _)| self.response_tuple(a).is_some())
    }

    /// Distribution of the response tuple.
    pub fn joint(&self) -> Option<ContextPmf> {
        let mut out: BTreeMap<Outcome, Rational> = BTreeMap::new();
        for (atom, p) in &self.atoms {
            *out.entry(self.response_tuple(atom)?).or_insert_with(Rational::zero) += p;
        }
        Some(ContextPmf::from_entries(out))
    }

    /// No two atoms share a response tuple.
    pub fn is_minimal(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.atoms.iter().all(|(a, _)| self.response_tuple(a).is_some_and(|t| seen.insert(t)))
    }
}

impl fmt::Display for LambdaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda")?;
        for q in &self.contents {
            write!(f, " {q}")?;
        }
        writeln!(f)?;
        for (atom, p) in &self.atoms {
            write!(f, "{atom} {}", format_rational(p))?;
            for q in &self.contents {
                let sign = self.responses.get(q).and_then(|r| r.get(atom)).map_or('?', |s| s.symbol());
                write!(f, " {q}={sign}1")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The minimal λ of `context`: one atom per positive-probability outcome,
/// responses are coordinate projections.
pub fn reconstruct_lambda(system: &System, context: &str) -> Result<LambdaModel, HiddenError> {
    let ctx = system.context(context).ok_or_else(|| HiddenError::UnknownContext(context.to_string()))?;
    let invalid = |reason: &str| HiddenError::InvalidPmf { context: context.to_string(), reason: reason.to_string() };
    let pmf = system.pmf(context).ok_or_else(|| invalid("missing"))?;
    if pmf.iter().any(|(o, _)| o.len() != ctx.arity()) {
        return Err(invalid("outcome arity differs from the context"));
    }
    if pmf.iter().any(|(_, p)| p.is_negative()) {
        return Err(invalid("negative probability"));
    }
    if !pmf.total().is_one() {
        return Err(invalid("probabilities do not sum to 1"));
    }
    let atoms: Vec<(String, Rational)> = pmf.iter().map(|(o, p)| (o.to_string(), p.clone())).collect();
    let responses = ctx
        .measured
        .iter()
        .enumerate()
        .map(|(i, q)| (q.clone(), pmf.iter().map(|(o, _)| (o.to_string(), o.signs()[i])).collect()))
        .collect();
    Ok(LambdaModel { contents: ctx.measured.clone(), atoms, responses })
}

/// The map `h` from `refined` atoms to `model` atoms with `λ = h(κ)`, or
/// `None` when the two models induce different joints.
///
/// Each κ atom goes to the λ atom with the same response tuple. A
/// zero-probability κ atom whose tuple has no λ atom goes to the first λ
/// atom; the identity then holds almost surely. The pushforward of κ
/// through `h` is checked against λ exactly.
pub fn verify_factorization(model: &LambdaModel, refined: &LambdaModel) -> Option<BTreeMap<String, String>> {
    let same_contents = model.contents.iter().collect::<BTreeSet<_>>() == refined.contents.iter().collect();
    if !same_contents || model.contents.len() != refined.contents.len() {
        return None;
    }
    if !model.is_well_formed() || !refined.is_well_formed() {
        return None;
    }
    // Read κ's responses in λ's content order.
    let kappa = LambdaModel { contents: model.contents.clone(), ..refined.clone() };
    if model.joint()? != kappa.joint()? {
        return None;
    }
    let mut by_tuple: BTreeMap<Outcome, &str> = BTreeMap::new();
    for (atom, _) in &model.atoms {
        by_tuple.entry(model.response_tuple(atom)?).or_insert(atom);
    }
    let fallback = model.atoms.first()?.0.as_str();
    let mut h = BTreeMap::new();
    let mut pushed: BTreeMap<&str, Rational> = BTreeMap::new();
    for (atom, p) in &kappa.atoms {
        let target = match by_tuple.get(&kappa.response_tuple(atom)?) {
            Some(t) => *t,
            None if p.is_zero() => fallback,
            None => return None,
        };
        *pushed.entry(target).or_insert_with(Rational::zero) += p;
        h.insert(atom.clone(), target.to_string());
    }
    let matches = model.atoms.iter().all(|(a, p)| pushed.get(a.as_str()).cloned().unwrap_or_else(Rational::zero) == *p);
    matches.then_some(h)
}
