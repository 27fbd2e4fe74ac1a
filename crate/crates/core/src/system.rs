//! Content-context systems of ±1 random variables.
//!
//! A system lists the contents (properties being measured), the contexts
//! (conditions of measurement, each naming the contents it measures) and one
//! exact joint distribution per context. The random variable recording content
//! `q` in context `c` exists iff `c` measures `q`; variables from different
//! contexts are never jointly distributed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{abs_diff, format_rational, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("content `{content}` is not measured in context `{context}`")]
    NotMeasured { content: String, context: String },
    #[error("content `{0}` listed twice")]
    DuplicateContent(String),
    #[error("context `{context}` has outcome `{outcome}` of length {found}, expected {expected}")]
    ArityMismatch { context: String, outcome: String, expected: usize, found: usize },
    #[error("context `{0}` has no trials")]
    EmptyContext(String),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(String),
}

/// One observed value of a dichotomous variable. `Plus` sorts before `Minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A tuple of signs, one per measured content, in the context's declared order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Outcome(pub Vec<Sign>);

impl Outcome {
    pub fn new(signs: Vec<Sign>) -> Self {
        Outcome(signs)
    }

    /// Parses a string over `+`/`-`, e.g. `"+-"`.
    pub fn parse(text: &str) -> Option<Outcome> {
        text.chars().map(Sign::from_symbol).collect::<Option<Vec<_>>>().map(Outcome)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    /// Product of the ±1 values.
    pub fn product(&self) -> i64 {
        self.0.iter().map(|s| s.value()).product()
    }

    /// All `2^arity` tuples in lexicographic order (`+` before `-`).
    pub fn all(arity: usize) -> impl Iterator<Item = Outcome> {
        (0..1usize << arity).map(move |index| Outcome::from_index(index, arity))
    }

    /// Inverse of [`Outcome::index`]: bit `arity-1-k` of `index` set means coordinate `k` is `-`.
    pub fn from_index(index: usize, arity: usize) -> Outcome {
        Outcome(
            (0..arity)
                .map(|k| if (index >> (arity - 1 - k)) & 1 == 1 { Sign::Minus } else { Sign::Plus })
                .collect(),
        )
    }

    /// Position of this tuple in the lexicographic enumeration.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, s| (acc << 1) | usize::from(*s == Sign::Minus))
    }

    fn project(&self, positions: &[usize]) -> Outcome {
        Outcome(positions.iter().map(|&p| self.0[p]).collect())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

/// Exact joint distribution of one context. Zero-probability entries are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContextPmf {
    entries: BTreeMap<Outcome, Rational>,
}

impl ContextPmf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (Outcome, Rational)>,
    {
        let mut pmf = Self::new();
        for (outcome, p) in entries {
            pmf.insert(outcome, p);
        }
        pmf
    }

    /// Sets the probability of `outcome`, replacing any previous value.
    pub fn insert(&mut self, outcome: Outcome, p: Rational) {
        if p.is_zero() {
            self.entries.remove(&outcome);
        } else {
            self.entries.insert(outcome, p);
        }
    }

    pub fn get(&self, outcome: &Outcome) -> Rational {
        self.entries.get(outcome).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &Rational)> {
        self.entries.iter()
    }

    /// Number of outcomes with nonzero probability.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    fn check_arity(&self, context: &str, arity: usize) -> Result<(), SystemError> {
        match self.entries.keys().find(|o| o.len() != arity) {
            Some(o) => Err(SystemError::ArityMismatch {
                context: context.to_string(),
                outcome: o.to_string(),
                expected: arity,
                found: o.len(),
            }),
            None => Ok(()),
        }
    }

    /// Sums out every coordinate not in `positions`; the result is ordered by `positions`.
    pub(crate) fn project(&self, positions: &[usize]) -> ContextPmf {
        let mut out: BTreeMap<Outcome, Rational> = BTreeMap::new();
        for (outcome, p) in &self.entries {
            *out.entry(outcome.project(positions)).or_insert_with(Rational::zero) += p;
        }
        ContextPmf::from_entries(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub label: String,
    pub measured: Vec<String>,
}

impl Context {
    pub fn new<S: Into<String>>(label: S, measured: &[&str]) -> Self {
        Context { label: label.into(), measured: measured.iter().map(|s| s.to_string()).collect() }
    }

    pub fn arity(&self) -> usize {
        self.measured.len()
    }

    pub fn position(&self, content: &str) -> Option<usize> {
        self.measured.iter().position(|c| c == content)
    }

    pub fn measures(&self, content: &str) -> bool {
        self.position(content).is_some()
    }
}

/// The measurement plan of a system without any distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFormat {
    pub name: Option<String>,
    pub contents: Vec<String>,
    pub contexts: Vec<Context>,
}

/// A variable of the system: content `content` recorded in context `context`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Measurement {
    pub content: String,
    pub context: String,
}

/// All measurements of one content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub content: String,
    /// Contexts measuring the content, in declared context order.
    pub sites: Vec<String>,
}

impl Connection {
    /// Unordered site pairs `(j, j')` with `j` declared before `j'`.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.sites.iter().enumerate().flat_map(move |(i, a)| {
            self.sites[i + 1..].iter().map(move |b| (a.as_str(), b.as_str()))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    pub name: Option<String>,
    pub contents: Vec<String>,
    pub contexts: Vec<Context>,
    pub pmfs: BTreeMap<String, ContextPmf>,
}

const SPECKER_SOURCE: &str = include_str!("../data/specker.cbd");

impl System {
    pub fn new(format: SystemFormat, pmfs: BTreeMap<String, ContextPmf>) -> Self {
        System { name: format.name, contents: format.contents, contexts: format.contexts, pmfs }
    }

    /// The three-box PR system: uniform marginals, perfect correlation in
    /// `c1` and `c2`, perfect anticorrelation in `c3`.
    pub fn specker() -> System {
        crate::dsl::parse(SPECKER_SOURCE).expect("bundled Specker document is valid")
    }

    pub fn specker_source() -> &'static str {
        SPECKER_SOURCE
    }

    pub fn format(&self) -> SystemFormat {
        SystemFormat { name: self.name.clone(), contents: self.contents.clone(), contexts: self.contexts.clone() }
    }

    pub fn context(&self, label: &str) -> Option<&Context> {
        self.contexts.iter().find(|c| c.label == label)
    }

    pub fn pmf(&self, context: &str) -> Option<&ContextPmf> {
        self.pmfs.get(context)
    }

    /// Measurements grouped by context, contexts in declared order.
    pub fn measurements(&self) -> Vec<Measurement> {
        self.contexts
            .iter()
            .flat_map(|ctx| {
                ctx.measured.iter().map(move |q| Measurement { content: q.clone(), context: ctx.label.clone() })
            })
            .collect()
    }

    pub fn measurement_count(&self) -> usize {
        self.contexts.iter().map(Context::arity).sum()
    }

    /// Connections of every content measured at least once, in declared content order.
    pub fn connections(&self) -> Vec<Connection> {
        self.contents
            .iter()
            .filter_map(|q| {
                let sites: Vec<String> =
                    self.contexts.iter().filter(|c| c.measures(q)).map(|c| c.label.clone()).collect();
                (!sites.is_empty()).then(|| Connection { content: q.clone(), sites })
            })
            .collect()
    }

    fn checked_context(&self, label: &str) -> Result<(&Context, &ContextPmf), SystemError> {
        let ctx = self.context(label).ok_or_else(|| SystemError::UnknownContext(label.to_string()))?;
        let pmf = self.pmf(label).ok_or_else(|| SystemError::UnknownContext(label.to_string()))?;
        pmf.check_arity(label, ctx.arity())?;
        Ok((ctx, pmf))
    }
}

/// A broken system invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyLabel,
    InvalidLabel(String),
    DuplicateContent(String),
    DuplicateContext(String),
    EmptyContext(String),
    UnknownContent { context: String, content: String },
    RepeatedMeasurement { context: String, content: String },
    MissingPmf(String),
    OrphanPmf(String),
    ArityMismatch { context: String, outcome: String, expected: usize },
    NegativeProbability { context: String, outcome: String, value: Rational },
    Unnormalized { context: String, sum: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyLabel => write!(f, "empty label"),
            Violation::InvalidLabel(l) => write!(f, "invalid label `{l}`"),
            Violation::DuplicateContent(l) => write!(f, "duplicate content `{l}`"),
            Violation::DuplicateContext(l) => write!(f, "duplicate context `{l}`"),
            Violation::EmptyContext(l) => write!(f, "context `{l}` measures nothing"),
            Violation::UnknownContent { context, content } => {
                write!(f, "context `{context}` measures unknown content `{content}`")
            }
            Violation::RepeatedMeasurement { context, content } => {
                write!(f, "context `{context}` lists `{content}` twice")
            }
            Violation::MissingPmf(l) => write!(f, "context `{l}` has no distribution"),
            Violation::OrphanPmf(l) => write!(f, "distribution for undeclared context `{l}`"),
            Violation::ArityMismatch { context, outcome, expected } => {
                write!(f, "context `{context}`: outcome `{outcome}` should have {expected} signs")
            }
            Violation::NegativeProbability { context, outcome, value } => {
                write!(f, "context `{context}`: negative probability {} for `{outcome}`", format_rational(value))
            }
            Violation::Unnormalized { context, sum } => {
                write!(f, "context `{context}`: probabilities sum to {}, not 1", format_rational(sum))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Labels are ASCII: a letter, digit or `_`, then letters, digits, `_`, `.`, `'` or `-`.
pub fn is_valid_label(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-'))
}

fn check_label(label: &str, out: &mut Vec<Violation>) {
    if label.is_empty() {
        out.push(Violation::EmptyLabel);
    } else if !is_valid_label(label) {
        out.push(Violation::InvalidLabel(label.to_string()));
    }
}

/// Lists every broken invariant of `system`; an empty report means it is well formed.
pub fn validate(system: &System) -> ValidationReport {
    let mut violations = Vec::new();

    let mut seen = BTreeSet::new();
    for q in &system.contents {
        check_label(q, &mut violations);
        if !seen.insert(q.as_str()) {
            violations.push(Violation::DuplicateContent(q.clone()));
        }
    }
    let contents = seen;

    let mut seen_contexts = BTreeSet::new();
    for ctx in &system.contexts {
        check_label(&ctx.label, &mut violations);
        if !seen_contexts.insert(ctx.label.as_str()) {
            violations.push(Violation::DuplicateContext(ctx.label.clone()));
        }
        if ctx.measured.is_empty() {
            violations.push(Violation::EmptyContext(ctx.label.clone()));
        }
        let mut listed = BTreeSet::new();
        for q in &ctx.measured {
            if !contents.contains(q.as_str()) {
                violations.push(Violation::UnknownContent { context: ctx.label.clone(), content: q.clone() });
            }
            if !listed.insert(q.as_str()) {
                violations.push(Violation::RepeatedMeasurement { context: ctx.label.clone(), content: q.clone() });
            }
        }
        let Some(pmf) = system.pmfs.get(&ctx.label) else {
            violations.push(Violation::MissingPmf(ctx.label.clone()));
            continue;
        };
        for (outcome, p) in pmf.iter() {
            if outcome.len() != ctx.arity() {
                violations.push(Violation::ArityMismatch {
                    context: ctx.label.clone(),
                    outcome: outcome.to_string(),
                    expected: ctx.arity(),
                });
            }
            if p.is_negative() {
                violations.push(Violation::NegativeProbability {
                    context: ctx.label.clone(),
                    outcome: outcome.to_string(),
                    value: p.clone(),
                });
            }
        }
        let sum = pmf.total();
        if !sum.is_one() {
            violations.push(Violation::Unnormalized { context: ctx.label.clone(), sum });
        }
    }
    for label in system.pmfs.keys() {
        if !seen_contexts.contains(label.as_str()) {
            violations.push(Violation::OrphanPmf(label.clone()));
        }
    }
    ValidationReport { violations }
}

/// Joint distribution of `subset` within `context`, coordinates in `subset` order.
pub fn marginal(system: &System, context: &str, subset: &[&str]) -> Result<ContextPmf, SystemError> {
    let (ctx, pmf) = system.checked_context(context)?;
    let mut positions = Vec::with_capacity(subset.len());
    for &q in subset {
        let pos = ctx
            .position(q)
            .ok_or_else(|| SystemError::NotMeasured { content: q.to_string(), context: context.to_string() })?;
        if positions.contains(&pos) {
            return Err(SystemError::DuplicateContent(q.to_string()));
        }
        positions.push(pos);
    }
    Ok(pmf.project(&positions))
}

/// `Pr[a = +1]` for the measurement of `content` in `context`.
pub fn success_probability(system: &System, content: &str, context: &str) -> Result<Rational, SystemError> {
    Ok(marginal(system, context, &[content])?.get(&Outcome(vec![Sign::Plus])))
}

/// Product expectation `⟨ab⟩` of two measurements sharing `context`.
pub fn correlation(system: &System, context: &str, a: &str, b: &str) -> Result<Rational, SystemError> {
    let (ctx, pmf) = system.checked_context(context)?;
    let pos = |q: &str| {
        ctx.position(q).ok_or_else(|| SystemError::NotMeasured { content: q.to_string(), context: context.to_string() })
    };
    let (pa, pb) = (pos(a)?, pos(b)?);
    Ok(pmf.iter().map(|(o, p)| p * int(o.0[pa].value() * o.0[pb].value())).sum())
}

/// Two sites of one connection whose single-variable distributions differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalMismatch {
    pub content: String,
    pub first: String,
    pub second: String,
    pub first_p: Rational,
    pub second_p: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectednessReport {
    pub consistent: bool,
    pub mismatches: Vec<MarginalMismatch>,
}

/// Checks that within every connection all variables are identically distributed.
pub fn is_consistently_connected(system: &System) -> Result<ConnectednessReport, SystemError> {
    let mut mismatches = Vec::new();
    for conn in system.connections() {
        let probs = conn
            .sites
            .iter()
            .map(|ctx| success_probability(system, &conn.content, ctx))
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..probs.len() {
            for j in i + 1..probs.len() {
                if probs[i] != probs[j] {
                    mismatches.push(MarginalMismatch {
                        content: conn.content.clone(),
                        first: conn.sites[i].clone(),
                        second: conn.sites[j].clone(),
                        first_p: probs[i].clone(),
                        second_p: probs[j].clone(),
                    });
                }
            }
        }
    }
    Ok(ConnectednessReport { consistent: mismatches.is_empty(), mismatches })
}

fn check_probability(p: &Rational) -> Result<(), SystemError> {
    if p.is_negative() || *p > Rational::one() {
        return Err(SystemError::ProbabilityOutOfRange(format_rational(p)));
    }
    Ok(())
}

/// Largest `Pr[X = Y]` over all couplings of binary `X`, `Y` with
/// `Pr[X = +1] = p` and `Pr[Y = +1] = q`, which is `1 - |p - q|`.
pub fn connection_max_equality(p: &Rational, q: &Rational) -> Result<Rational, SystemError> {
    check_probability(p)?;
    check_probability(q)?;
    Ok(Rational::one() - abs_diff(p, q))
}

/// Builds a system whose distributions are the empirical frequencies of `records`.
pub fn ingest_trials<I>(format: &SystemFormat, records: I) -> Result<System, SystemError>
where
    I: IntoIterator<Item = (String, Outcome)>,
{
    let mut counts: BTreeMap<String, BTreeMap<Outcome, u64>> =
        format.contexts.iter().map(|c| (c.label.clone(), BTreeMap::new())).collect();
    for (label, outcome) in records {
        let ctx = format
            .contexts
            .iter()
            .find(|c| c.label == label)
            .ok_or_else(|| SystemError::UnknownContext(label.clone()))?;
        if outcome.len() != ctx.arity() {
            return Err(SystemError::ArityMismatch {
                context: label,
                outcome: outcome.to_string(),
                expected: ctx.arity(),
                found: outcome.len(),
            });
        }
        *counts.get_mut(&ctx.label).expect("seeded above").entry(outcome).or_insert(0) += 1;
    }
    let mut pmfs = BTreeMap::new();
    for (label, tally) in counts {
        let total: u64 = tally.values().sum();
        if total == 0 {
            return Err(SystemError::EmptyContext(label));
        }
        let pmf = ContextPmf::from_entries(
            tally.into_iter().map(|(o, n)| (o, Rational::new(n.into(), total.into()))),
        );
        pmfs.insert(label, pmf);
    }
    Ok(System::new(format.clone(), pmfs))
}
