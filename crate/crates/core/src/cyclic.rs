//! Cyclic systems and their closed-form noncontextuality criterion.
//!
//! A cyclic system of rank `n` has `n` contents and `n` contexts, each context
//! measuring two contents, arranged so that the content–context incidence
//! graph is one cycle of length `2n`. For consistently connected cyclic
//! systems the criterion is `s_odd(⟨·⟩) ≤ n - 2`, where `s_odd` is the largest
//! signed sum of the context correlations over sign patterns with an odd
//! number of minuses.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;

use crate::rational::{int, ratio, Rational};
use crate::system::{correlation, Context, ContextPmf, Outcome, System};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicProfile {
    pub rank: usize,
    /// `contents[k]` and `contents[k + 1]` (cyclically) share `contexts[k]`.
    pub contents: Vec<String>,
    pub contexts: Vec<String>,
    /// `correlations[k]` is the product expectation within `contexts[k]`.
    pub correlations: Vec<Rational>,
}

impl CyclicProfile {
    /// Alternating content/context labels, closed on the starting content.
    pub fn cycle(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(2 * self.rank + 1);
        for (q, c) in self.contents.iter().zip(&self.contexts) {
            out.push(q.clone());
            out.push(c.clone());
        }
        out.push(self.contents[0].clone());
        out
    }

    pub fn s_odd(&self) -> Rational {
        s_odd(&self.correlations)
    }

    /// The noncontextuality bound `n - 2`.
    pub fn bound(&self) -> Rational {
        int(self.rank as i64 - 2)
    }
}

/// Finds the cyclic arrangement of `system`, if it has one.
///
/// The cycle starts at the smallest content label and moves first into the
/// smaller of that content's two contexts.
pub fn detect_cyclic(system: &System) -> Option<CyclicProfile> {
    let n = system.contents.len();
    if n < 2 || system.contexts.len() != n || system.contexts.iter().any(|c| c.arity() != 2) {
        return None;
    }
    let mut sites: BTreeMap<&str, Vec<&Context>> = system.contents.iter().map(|q| (q.as_str(), Vec::new())).collect();
    for ctx in &system.contexts {
        if ctx.measured[0] == ctx.measured[1] {
            return None;
        }
        for q in &ctx.measured {
            sites.get_mut(q.as_str())?.push(ctx);
        }
    }
    if sites.len() != n || sites.values().any(|s| s.len() != 2) {
        return None;
    }

    let (&start, start_sites) = sites.iter().next()?;
    let mut context = *start_sites.iter().min_by(|a, b| a.label.cmp(&b.label))?;
    let mut content = start;
    let mut contents = Vec::with_capacity(n);
    let mut contexts = Vec::with_capacity(n);
    let mut correlations = Vec::with_capacity(n);
    for _ in 0..n {
        let next = if context.measured[0] == content { &context.measured[1] } else { &context.measured[0] };
        correlations.push(correlation(system, &context.label, content, next).ok()?);
        contents.push(content.to_string());
        contexts.push(context.label.clone());
        content = next.as_str();
        let both = &sites[content];
        context = if both[0].label == context.label { both[1] } else { both[0] };
    }
    // Closing back on the start after exactly n steps means one cycle covers everything.
    if content != start || contents.iter().collect::<std::collections::BTreeSet<_>>().len() != n {
        return None;
    }
    Some(CyclicProfile { rank: n, contents, contexts, correlations })
}

/// Largest `Σ ±values[k]` over sign patterns with an odd number of minuses.
///
/// # Panics
/// If `values` is empty.
pub fn s_odd(values: &[Rational]) -> Rational {
    assert!(!values.is_empty(), "s_odd needs at least one value");
    let total: Rational = values.iter().map(|v| v.abs()).sum();
    let negatives = values.iter().filter(|v| v.is_negative()).count();
    if negatives % 2 == 1 {
        total
    } else {
        let smallest = values.iter().map(|v| v.abs()).min().expect("nonempty");
        total - smallest * int(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CyclicVerdict {
    Contextual,
    Noncontextual,
    NotApplicable,
}

impl fmt::Display for CyclicVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CyclicVerdict::Contextual => "contextual",
            CyclicVerdict::Noncontextual => "noncontextual",
            CyclicVerdict::NotApplicable => "not applicable",
        })
    }
}

/// Closed-form verdict; only defined for consistently connected systems.
pub fn cyclic_criterion(profile: &CyclicProfile, consistently_connected: bool) -> CyclicVerdict {
    if !consistently_connected {
        CyclicVerdict::NotApplicable
    } else if profile.s_odd() > profile.bound() {
        CyclicVerdict::Contextual
    } else {
        CyclicVerdict::Noncontextual
    }
}

/// Cyclic system with uniform marginals and the given context correlations.
///
/// Contents are `q1..qn`, contexts `c1..cn`; `ck` measures `qk q(k+1)` and the
/// last context measures `q1 qn`. Each context puts `(1 + ρ)/4` on `++` and
/// `--` and `(1 - ρ)/4` on `+-` and `-+`, so every `ρ ∈ [-1, 1]` is valid.
///
/// # Panics
/// If fewer than two correlations are given.
pub fn uniform_cyclic_system(correlations: &[Rational]) -> System {
    let n = correlations.len();
    assert!(n >= 2, "cyclic systems have rank at least 2");
    let contents: Vec<String> = (1..=n).map(|k| format!("q{k}")).collect();
    let contexts: Vec<Context> = (1..=n)
        .map(|k| {
            let measured = if k < n { vec![format!("q{k}"), format!("q{}", k + 1)] } else { vec!["q1".into(), format!("q{n}")] };
            Context { label: format!("c{k}"), measured }
        })
        .collect();
    let quarter = ratio(1, 4);
    let pmfs = contexts
        .iter()
        .zip(correlations)
        .map(|(ctx, rho)| {
            let same = (int(1) + rho) * &quarter;
            let differ = (int(1) - rho) * &quarter;
            let pmf = ContextPmf::from_entries(
                Outcome::all(2).map(|o| (o.clone(), if o.product() == 1 { same.clone() } else { differ.clone() })),
            );
            (ctx.label.clone(), pmf)
        })
        .collect();
    System { name: None, contents, contexts, pmfs }
}
