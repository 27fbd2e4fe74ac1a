//! Couplings of a system as a linear program, and the contextuality decision.
//!
//! A coupling assigns a probability to every global assignment of ±1 values
//! to all measurements such that, restricted to any context, it reproduces
//! that context's distribution. The system is noncontextual iff some coupling
//! makes every same-content pair agree with its largest possible probability.
//!
//! Global assignments are indexed lexicographically: measurement 0 is the
//! most significant coordinate and `+` precedes `-`. Measurements are listed
//! context by context in declared order, so each context occupies a
//! contiguous run of bits.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{format_rational, int, Rational};
use crate::simplex::{FarkasCertificate, LinearProgram, LpSolution};
use crate::system::{
    connection_max_equality, success_probability, validate, ContextPmf, Measurement, Outcome, System, SystemError,
    Violation,
};

/// Largest number of measurements accepted (2^20 LP variables).
pub const MAX_MEASUREMENTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CouplingError {
    #[error("invalid system: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("system has {measurements} measurements; at most {MAX_MEASUREMENTS} are supported")]
    TooLarge { measurements: usize },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("witness is over different measurements than the system")]
    WitnessMismatch,
    #[error("witness does not reproduce the distribution of context `{0}`")]
    NotACoupling(String),
    #[error(
        "`{content}` in `{first}` and `{second}` agree with probability {}, not 1",
        format_rational(.agreement)
    )]
    Imperfect { content: String, first: String, second: String, agreement: Box<Rational> },
    #[error("coupling program returned an unexpected status")]
    Solver,
}

/// Two measurements of the same content, by index into the measurement list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionPair {
    pub content: String,
    pub first: usize,
    pub second: usize,
}

/// What an equality row of the coupling program states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowKind {
    /// Mass on assignments restricting to `outcome` in `context` equals its probability.
    Marginal { context: String, outcome: Outcome },
    /// Mass on assignments where the pair disagrees is zero.
    Agreement { content: String, first: String, second: String },
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKind::Marginal { context, outcome } => write!(f, "{context}[{outcome}]"),
            RowKind::Agreement { content, first, second } => write!(f, "{content}:{first}={second}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingLp {
    pub measurements: Vec<Measurement>,
    pub pairs: Vec<ConnectionPair>,
    pub rows: Vec<RowKind>,
    pub program: LinearProgram,
}

impl CouplingLp {
    pub fn num_variables(&self) -> usize {
        self.program.num_vars()
    }

    pub fn assignment(&self, index: usize) -> Outcome {
        Outcome::from_index(index, self.measurements.len())
    }
}

fn bit(assignment: usize, measurement: usize, total: usize) -> usize {
    (assignment >> (total - 1 - measurement)) & 1
}

fn checked(system: &System) -> Result<(), CouplingError> {
    let report = validate(system);
    if !report.is_valid() {
        return Err(CouplingError::Invalid(report.violations));
    }
    let measurements = system.measurement_count();
    if measurements > MAX_MEASUREMENTS {
        return Err(CouplingError::TooLarge { measurements });
    }
    Ok(())
}

fn connection_pairs(system: &System, measurements: &[Measurement]) -> Vec<ConnectionPair> {
    let index = |content: &str, context: &str| {
        measurements.iter().position(|m| m.content == content && m.context == context).expect("measured")
    };
    system
        .connections()
        .iter()
        .flat_map(|conn| {
            conn.pairs()
                .map(|(a, b)| ConnectionPair {
                    content: conn.content.clone(),
                    first: index(&conn.content, a),
                    second: index(&conn.content, b),
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn assemble(system: &System, pin_agreement: bool) -> Result<CouplingLp, CouplingError> {
    checked(system)?;
    let measurements = system.measurements();
    let total = measurements.len();
    let pairs = connection_pairs(system, &measurements);
    let mut program = LinearProgram::new(1usize << total);
    let mut rows = Vec::new();

    let mut start = 0;
    for ctx in &system.contexts {
        let arity = ctx.arity();
        let shift = total - start - arity;
        let mask = (1usize << arity) - 1;
        let pmf = system.pmf(&ctx.label).expect("validated");
        for outcome in Outcome::all(arity) {
            let tuple = outcome.index();
            let vars = (0..program.num_vars()).filter(|k| (k >> shift) & mask == tuple);
            program.add_indicator_row(vars, pmf.get(&outcome));
            rows.push(RowKind::Marginal { context: ctx.label.clone(), outcome });
        }
        start += arity;
    }

    if pin_agreement {
        for pair in &pairs {
            let vars =
                (0..program.num_vars()).filter(|&k| bit(k, pair.first, total) != bit(k, pair.second, total));
            program.add_indicator_row(vars, Rational::zero());
            rows.push(RowKind::Agreement {
                content: pair.content.clone(),
                first: measurements[pair.first].context.clone(),
                second: measurements[pair.second].context.clone(),
            });
        }
    } else if !pairs.is_empty() {
        for k in 0..program.num_vars() {
            let agreeing =
                pairs.iter().filter(|p| bit(k, p.first, total) == bit(k, p.second, total)).count() as i64;
            if agreeing > 0 {
                program.set_objective(k, int(agreeing));
            }
        }
    }
    Ok(CouplingLp { measurements, pairs, rows, program })
}

/// The coupling program: one variable per global assignment, one equality per
/// context outcome, objective = expected number of agreeing connection pairs.
pub fn build_lp(system: &System) -> Result<CouplingLp, CouplingError> {
    assemble(system, false)
}

/// Like [`build_lp`] with no objective and an extra row per connection pair
/// forcing the pair to agree with probability one.
pub fn build_perfect_lp(system: &System) -> Result<CouplingLp, CouplingError> {
    assemble(system, true)
}

pub fn solve_lp(lp: &CouplingLp) -> LpSolution {
    lp.program.solve()
}

/// A joint distribution over all measurements of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    pub measurements: Vec<Measurement>,
    pub pmf: ContextPmf,
}

impl Coupling {
    pub fn from_primal(lp: &CouplingLp, primal: &[Rational]) -> Coupling {
        let pmf = ContextPmf::from_entries(
            primal.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(k, p)| (lp.assignment(k), p.clone())),
        );
        Coupling { measurements: lp.measurements.clone(), pmf }
    }

    /// Distribution of the coordinates belonging to `context`, in its declared order.
    pub fn context_marginal(&self, context: &str) -> ContextPmf {
        let positions: Vec<usize> =
            self.measurements.iter().enumerate().filter(|(_, m)| m.context == context).map(|(i, _)| i).collect();
        self.pmf.project(&positions)
    }

    /// `Pr[S_first = S_second]`.
    pub fn agreement(&self, first: usize, second: usize) -> Rational {
        self.pmf.iter().filter(|(o, _)| o.0[first] == o.0[second]).map(|(_, p)| p.clone()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisResult {
    pub contextual: bool,
    /// `max_total - attained_total`; positive iff contextual.
    pub delta: Rational,
    /// Sum over connection pairs of the largest attainable agreement probability.
    pub max_total: Rational,
    /// Largest total agreement achieved by any coupling.
    pub attained_total: Rational,
    /// A maximally connected coupling, present iff the system is noncontextual.
    pub witness: Option<Coupling>,
}

/// Sum of `1 - |p - p'|` over all connection pairs.
pub fn max_total(system: &System) -> Result<Rational, CouplingError> {
    let mut total = Rational::zero();
    for conn in system.connections() {
        for (a, b) in conn.pairs() {
            let p = success_probability(system, &conn.content, a)?;
            let q = success_probability(system, &conn.content, b)?;
            total += connection_max_equality(&p, &q)?;
        }
    }
    Ok(total)
}

/// Decides contextuality by maximizing total connection agreement over couplings.
pub fn decide_contextuality(system: &System) -> Result<AnalysisResult, CouplingError> {
    let lp = build_lp(system)?;
    let max_total = max_total(system)?;
    let LpSolution::Optimal { value, primal } = solve_lp(&lp) else {
        // The independent product of the context distributions is always feasible.
        return Err(CouplingError::Solver);
    };
    let contextual = value < max_total;
    Ok(AnalysisResult {
        contextual,
        delta: &max_total - &value,
        witness: (!contextual).then(|| Coupling::from_primal(&lp, &primal)),
        max_total,
        attained_total: value,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerfectCoupling {
    Feasible(Coupling),
    /// The certificate refers to the rows of `lp.program`.
    Infeasible { lp: CouplingLp, certificate: FarkasCertificate },
}

impl PerfectCoupling {
    pub fn is_feasible(&self) -> bool {
        matches!(self, PerfectCoupling::Feasible(_))
    }
}

/// Is there a coupling in which every connection pair agrees with probability one?
pub fn check_perfect_coupling(system: &System) -> Result<PerfectCoupling, CouplingError> {
    let lp = build_perfect_lp(system)?;
    match solve_lp(&lp) {
        LpSolution::Optimal { primal, .. } => Ok(PerfectCoupling::Feasible(Coupling::from_primal(&lp, &primal))),
        LpSolution::Infeasible(certificate) => Ok(PerfectCoupling::Infeasible { lp, certificate }),
        LpSolution::Unbounded => Err(CouplingError::Solver),
    }
}

/// A single-indexed joint distribution: one coordinate per measured content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCoupling {
    /// Contents measured in at least one context, in declared order.
    pub contents: Vec<String>,
    pub pmf: ContextPmf,
}

impl ReducedCoupling {
    /// Restriction to the contents of `context`, in the context's order.
    pub fn restrict(&self, contents: &[String]) -> ContextPmf {
        let positions: Vec<usize> =
            contents.iter().map(|q| self.contents.iter().position(|c| c == q).expect("measured content")).collect();
        self.pmf.project(&positions)
    }
}

/// Collapses every connection of a perfectly connected coupling to one variable.
pub fn reduce_coupling(system: &System, witness: &Coupling) -> Result<ReducedCoupling, CouplingError> {
    checked(system)?;
    let measurements = system.measurements();
    if witness.measurements != measurements {
        return Err(CouplingError::WitnessMismatch);
    }
    if witness.pmf.iter().any(|(o, _)| o.len() != measurements.len()) {
        return Err(CouplingError::WitnessMismatch);
    }
    for ctx in &system.contexts {
        if &witness.context_marginal(&ctx.label) != system.pmf(&ctx.label).expect("validated") {
            return Err(CouplingError::NotACoupling(ctx.label.clone()));
        }
    }
    for pair in connection_pairs(system, &measurements) {
        let agreement = witness.agreement(pair.first, pair.second);
        if !agreement.is_one() {
            return Err(CouplingError::Imperfect {
                content: pair.content,
                first: measurements[pair.first].context.clone(),
                second: measurements[pair.second].context.clone(),
                agreement: Box::new(agreement),
            });
        }
    }
    let mut representative: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, m) in measurements.iter().enumerate() {
        representative.entry(m.content.as_str()).or_insert(i);
    }
    let contents: Vec<String> =
        system.contents.iter().filter(|q| representative.contains_key(q.as_str())).cloned().collect();
    let positions: Vec<usize> = contents.iter().map(|q| representative[q.as_str()]).collect();
    Ok(ReducedCoupling { contents, pmf: witness.pmf.project(&positions) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::system::{Context, Sign};
    use proptest::prelude::*;

    fn out(s: &str) -> Outcome {
        Outcome::parse(s).unwrap()
    }

    /// Label, measured contents and distribution of one context.
    type Spec<'a> = (&'a str, &'a [&'a str], &'a [(&'a str, Rational)]);

    fn system(contents: &[&str], contexts: &[Spec]) -> System {
        System {
            name: None,
            contents: contents.iter().map(|s| s.to_string()).collect(),
            contexts: contexts.iter().map(|(l, m, _)| Context::new(*l, m)).collect(),
            pmfs: contexts
                .iter()
                .map(|(l, _, e)| (l.to_string(), ContextPmf::from_entries(e.iter().map(|(o, p)| (out(o), p.clone())))))
                .collect(),
        }
    }

    fn uniform2() -> Vec<(&'static str, Rational)> {
        ["++", "+-", "-+", "--"].iter().map(|o| (*o, ratio(1, 4))).collect()
    }

    fn independent_rank3() -> System {
        let u = uniform2();
        system(&["q1", "q2", "q3"], &[("c1", &["q1", "q2"], &u), ("c2", &["q2", "q3"], &u), ("c3", &["q1", "q3"], &u)])
    }

    fn all_plus_rank3() -> System {
        let p = [("++", int(1))];
        system(&["q1", "q2", "q3"], &[("c1", &["q1", "q2"], &p), ("c2", &["q2", "q3"], &p), ("c3", &["q1", "q3"], &p)])
    }

    /// Oracle: over every deterministic global assignment whose context
    /// restrictions all have positive probability, the largest number of
    /// agreeing connection pairs. No coupling can exceed it.
    fn support_agreement_bound(system: &System) -> i64 {
        let ms = system.measurements();
        let pairs = connection_pairs(system, &ms);
        let total = ms.len();
        (0..1usize << total)
            .filter(|&k| {
                let o = Outcome::from_index(k, total);
                system.contexts.iter().all(|ctx| {
                    let sub: Vec<Sign> =
                        ms.iter().enumerate().filter(|(_, m)| m.context == ctx.label).map(|(i, _)| o.0[i]).collect();
                    !system.pmf(&ctx.label).unwrap().get(&Outcome(sub)).is_zero()
                })
            })
            .map(|k| pairs.iter().filter(|p| bit(k, p.first, total) == bit(k, p.second, total)).count() as i64)
            .max()
            .unwrap()
    }

    #[test]
    fn specker_lp_shape() {
        let lp = build_lp(&System::specker()).unwrap();
        assert_eq!(lp.num_variables(), 64);
        assert_eq!(lp.program.num_constraints(), 12);
        assert_eq!(lp.pairs.len(), 3);
        assert!(lp.rows.iter().all(|r| matches!(r, RowKind::Marginal { .. })));
    }

    #[test]
    fn single_context_lp_shape() {
        let s = system(&["q1", "q2"], &[("c1", &["q1", "q2"], &uniform2())]);
        let lp = build_lp(&s).unwrap();
        assert_eq!(lp.num_variables(), 4);
        assert_eq!(lp.program.num_constraints(), 4);
        assert!(lp.pairs.is_empty());
        assert!(lp.program.objective().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn rank4_lp_has_256_variables() {
        let s = crate::cyclic::uniform_cyclic_system(&[int(0), int(0), int(0), int(0)]);
        assert_eq!(build_lp(&s).unwrap().num_variables(), 256);
    }

    #[test]
    fn size_guard() {
        let labels: Vec<String> = (0..21).map(|i| format!("q{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let s = System {
            name: None,
            contents: labels.clone(),
            contexts: vec![Context::new("c", &refs)],
            pmfs: [("c".to_string(), ContextPmf::from_entries([(Outcome(vec![Sign::Plus; 21]), int(1))]))].into(),
        };
        assert_eq!(build_lp(&s).unwrap_err(), CouplingError::TooLarge { measurements: 21 });
        assert_eq!(decide_contextuality(&s).unwrap_err(), CouplingError::TooLarge { measurements: 21 });
    }

    #[test]
    fn invalid_systems_are_refused() {
        let mut s = System::specker();
        s.pmfs.insert("c1".into(), ContextPmf::from_entries([(out("++"), ratio(1, 2))]));
        assert!(matches!(build_lp(&s), Err(CouplingError::Invalid(_))));
    }

    #[test]
    fn specker_optimum_is_two() {
        let s = System::specker();
        let lp = build_lp(&s).unwrap();
        let LpSolution::Optimal { value, primal } = solve_lp(&lp) else { panic!() };
        assert_eq!(value, int(2));
        assert!(lp.program.is_feasible(&primal));
        assert_eq!(support_agreement_bound(&s), 2);
    }

    #[test]
    fn specker_is_contextual() {
        let r = decide_contextuality(&System::specker()).unwrap();
        assert!(r.contextual);
        assert_eq!((r.max_total, r.attained_total, r.delta), (int(3), int(2), int(1)));
        assert!(r.witness.is_none());
    }

    #[test]
    fn independent_rank3_is_noncontextual() {
        let s = independent_rank3();
        let r = decide_contextuality(&s).unwrap();
        assert!(!r.contextual);
        assert!(r.delta.is_zero());
        let w = r.witness.unwrap();
        for ctx in &s.contexts {
            assert_eq!(&w.context_marginal(&ctx.label), s.pmf(&ctx.label).unwrap());
        }
    }

    #[test]
    fn single_context_witness_is_the_system() {
        let s = system(&["q1", "q2"], &[("c1", &["q1", "q2"], &[("++", ratio(1, 3)), ("-+", ratio(2, 3))])]);
        let r = decide_contextuality(&s).unwrap();
        assert!(!r.contextual);
        assert!(r.delta.is_zero());
        assert_eq!(&r.witness.unwrap().pmf, s.pmf("c1").unwrap());
    }

    #[test]
    fn inconsistent_connection_attains_its_maximum() {
        let s = system(
            &["q1"],
            &[("c1", &["q1"], &[("+", ratio(3, 4)), ("-", ratio(1, 4))]), ("c2", &["q1"], &[("+", ratio(1, 3)), ("-", ratio(2, 3))])],
        );
        let r = decide_contextuality(&s).unwrap();
        assert_eq!(r.attained_total, ratio(7, 12));
        assert_eq!(r.max_total, ratio(7, 12));
        assert!(!r.contextual);
    }

    #[test]
    fn perfect_coupling_examples() {
        let PerfectCoupling::Infeasible { lp, certificate } = check_perfect_coupling(&System::specker()).unwrap()
        else {
            panic!("Specker admits no perfect coupling")
        };
        assert!(certificate.verify(&lp.program));
        assert_eq!(lp.rows.len(), 15);

        assert!(check_perfect_coupling(&independent_rank3()).unwrap().is_feasible());

        let s = system(&["q1"], &[("c1", &["q1"], &[("+", int(1))]), ("c2", &["q1"], &[("-", int(1))])]);
        let PerfectCoupling::Infeasible { lp, certificate } = check_perfect_coupling(&s).unwrap() else { panic!() };
        assert!(certificate.verify(&lp.program));
    }

    #[test]
    fn reduction_examples() {
        let s = independent_rank3();
        let PerfectCoupling::Feasible(w) = check_perfect_coupling(&s).unwrap() else { panic!() };
        let reduced = reduce_coupling(&s, &w).unwrap();
        assert_eq!(reduced.contents, ["q1", "q2", "q3"]);
        for ctx in &s.contexts {
            assert_eq!(&reduced.restrict(&ctx.measured), s.pmf(&ctx.label).unwrap());
        }

        let s = all_plus_rank3();
        let w = decide_contextuality(&s).unwrap().witness.unwrap();
        let reduced = reduce_coupling(&s, &w).unwrap();
        assert_eq!(reduced.pmf, ContextPmf::from_entries([(out("+++"), int(1))]));
    }

    #[test]
    fn reduction_of_specker_fails() {
        let s = System::specker();
        let lp = build_lp(&s).unwrap();
        let LpSolution::Optimal { primal, .. } = solve_lp(&lp) else { panic!() };
        let best = Coupling::from_primal(&lp, &primal);
        assert!(matches!(reduce_coupling(&s, &best), Err(CouplingError::Imperfect { .. })));
    }

    #[test]
    fn reduction_rejects_non_couplings() {
        let s = independent_rank3();
        let ms = s.measurements();
        let point = Coupling { measurements: ms.clone(), pmf: ContextPmf::from_entries([(out("++++++"), int(1))]) };
        assert_eq!(reduce_coupling(&s, &point), Err(CouplingError::NotACoupling("c1".into())));
        let short = Coupling { measurements: ms[..5].to_vec(), pmf: ContextPmf::new() };
        assert_eq!(reduce_coupling(&s, &short), Err(CouplingError::WitnessMismatch));
    }

    #[test]
    fn witness_selection_is_deterministic() {
        let s = independent_rank3();
        let a = decide_contextuality(&s).unwrap();
        let b = decide_contextuality(&s.clone()).unwrap();
        assert_eq!(a, b);
    }

    fn rank3_with(rhos: [i64; 3], den: i64) -> System {
        crate::cyclic::uniform_cyclic_system(&rhos.map(|r| ratio(r, den)))
    }

    /// Renames every label and reverses the content order inside each context.
    fn relabel(s: &System) -> System {
        let rename = |l: &str| format!("x_{l}");
        let contexts: Vec<Context> = s
            .contexts
            .iter()
            .rev()
            .map(|c| Context { label: rename(&c.label), measured: c.measured.iter().rev().map(|q| rename(q)).collect() })
            .collect();
        let pmfs = s
            .pmfs
            .iter()
            .map(|(l, pmf)| {
                let flipped = pmf.iter().map(|(o, p)| (Outcome(o.0.iter().rev().copied().collect()), p.clone()));
                (rename(l), ContextPmf::from_entries(flipped))
            })
            .collect();
        System { name: None, contents: s.contents.iter().rev().map(|q| rename(q)).collect(), contexts, pmfs }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn invariant_under_relabeling(r1 in -6i64..=6, r2 in -6i64..=6, r3 in -6i64..=6) {
            let s = rank3_with([r1, r2, r3], 6);
            let a = decide_contextuality(&s).unwrap();
            let b = decide_contextuality(&relabel(&s)).unwrap();
            prop_assert_eq!(a.contextual, b.contextual);
            prop_assert_eq!(a.delta, b.delta);
        }

        #[test]
        fn optimum_is_a_coupling_within_bounds(r1 in -4i64..=4, r2 in -4i64..=4, r3 in -4i64..=4) {
            let s = rank3_with([r1, r2, r3], 4);
            let lp = build_lp(&s).unwrap();
            let LpSolution::Optimal { value, primal } = solve_lp(&lp) else { panic!() };
            prop_assert!(lp.program.is_feasible(&primal));
            let w = Coupling::from_primal(&lp, &primal);
            for ctx in &s.contexts {
                prop_assert_eq!(&w.context_marginal(&ctx.label), s.pmf(&ctx.label).unwrap());
            }
            let r = decide_contextuality(&s).unwrap();
            prop_assert!(r.attained_total <= r.max_total);
            prop_assert_eq!(r.contextual, r.delta > Rational::zero());
            prop_assert_eq!(value, r.attained_total);
        }

        #[test]
        fn perfect_coupling_implies_noncontextual(r1 in -3i64..=3, r2 in -3i64..=3, r3 in -3i64..=3) {
            let s = rank3_with([r1, r2, r3], 3);
            match check_perfect_coupling(&s).unwrap() {
                PerfectCoupling::Feasible(w) => {
                    prop_assert!(!decide_contextuality(&s).unwrap().contextual);
                    prop_assert!(reduce_coupling(&s, &w).is_ok());
                }
                PerfectCoupling::Infeasible { lp, certificate } => {
                    prop_assert!(certificate.verify(&lp.program));
                    prop_assert!(decide_contextuality(&s).unwrap().contextual);
                }
            }
        }
    }
}
