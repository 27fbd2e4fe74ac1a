//! Full analysis of one system as JSON or text.
//!
//! Every rational is a `p/q` string (`p` for integers). All fields are always
//! present; sections that do not apply are `null` or empty. Only
//! `timings_ms` varies between runs on the same input.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coupling::{check_perfect_coupling, decide_contextuality, CouplingError, PerfectCoupling};
use crate::cyclic::{cyclic_criterion, detect_cyclic};
use crate::rational::{format_rational, Rational};
use crate::system::{is_consistently_connected, validate, System};

pub const SCHEMA: &str = "cbd-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub system: Option<String>,
    pub validation: ValidationSummary,
    pub connectedness: ConnectednessSummary,
    pub cyclic: CyclicSummary,
    pub lp: LpSummary,
    pub witness: Option<WitnessSummary>,
    pub certificate: Option<CertificateSummary>,
    pub timings_ms: Timings,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub valid: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectednessSummary {
    pub consistent: bool,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub content: String,
    pub first: String,
    pub second: String,
    pub first_p: String,
    pub second_p: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicSummary {
    pub cyclic: bool,
    pub rank: Option<usize>,
    /// Alternating content and context labels, closed on the first content.
    pub cycle: Vec<String>,
    pub correlations: Vec<String>,
    pub s_odd: Option<String>,
    pub bound: Option<String>,
    /// `contextual`, `noncontextual`, `not applicable` or `not cyclic`.
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpSummary {
    pub contextual: bool,
    pub verdict: String,
    pub delta: String,
    pub max_total: String,
    pub attained_total: String,
    pub measurements: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSummary {
    /// Coordinate labels `content@context`, in assignment order.
    pub measurements: Vec<String>,
    pub support_size: usize,
    /// Support of the coupling; `null` unless requested.
    pub atoms: Option<Vec<Atom>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub assignment: String,
    pub probability: String,
}

/// Farkas proof that no coupling makes every connection pair agree surely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSummary {
    /// Rows with a nonzero multiplier, as `context[outcome]` or `content:context=context`.
    pub rows: Vec<String>,
    pub multipliers: Vec<String>,
    pub bound: String,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub validate: f64,
    pub lp: f64,
    pub certificate: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOptions {
    pub full_witness: bool,
}

fn r(v: &Rational) -> String {
    format_rational(v)
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1000.0
}

fn verdict(contextual: bool) -> &'static str {
    if contextual {
        "contextual"
    } else {
        "noncontextual"
    }
}

/// Analyzes `system`. Fails on invalid or oversized systems.
pub fn build_report(system: &System, options: ReportOptions) -> Result<Report, CouplingError> {
    let start = Instant::now();
    let validation = validate(system);
    if !validation.is_valid() {
        return Err(CouplingError::Invalid(validation.violations));
    }
    let validate_ms = elapsed_ms(start);

    let conn = is_consistently_connected(system)?;
    let cyclic = match detect_cyclic(system) {
        Some(profile) => CyclicSummary {
            cyclic: true,
            rank: Some(profile.rank),
            cycle: profile.cycle(),
            correlations: profile.correlations.iter().map(r).collect(),
            s_odd: Some(r(&profile.s_odd())),
            bound: Some(r(&profile.bound())),
            verdict: cyclic_criterion(&profile, conn.consistent).to_string(),
        },
        None => CyclicSummary {
            cyclic: false,
            rank: None,
            cycle: Vec::new(),
            correlations: Vec::new(),
            s_odd: None,
            bound: None,
            verdict: "not cyclic".into(),
        },
    };

    let lp_start = Instant::now();
    let result = decide_contextuality(system)?;
    let lp_ms = elapsed_ms(lp_start);

    let witness = result.witness.as_ref().map(|w| WitnessSummary {
        measurements: w.measurements.iter().map(|m| format!("{}@{}", m.content, m.context)).collect(),
        support_size: w.pmf.support_size(),
        atoms: options.full_witness.then(|| {
            w.pmf.iter().map(|(o, p)| Atom { assignment: o.to_string(), probability: r(p) }).collect()
        }),
    });

    let cert_start = Instant::now();
    let certificate = if result.contextual {
        match check_perfect_coupling(system)? {
            PerfectCoupling::Infeasible { lp, certificate } => {
                let (rows, multipliers) = lp
                    .rows
                    .iter()
                    .zip(&certificate.multipliers)
                    .filter(|(_, z)| !num_traits::Zero::is_zero(*z))
                    .map(|(row, z)| (row.to_string(), r(z)))
                    .unzip();
                Some(CertificateSummary {
                    rows,
                    multipliers,
                    bound: r(&certificate.bound(&lp.program)),
                    verified: certificate.verify(&lp.program),
                })
            }
            PerfectCoupling::Feasible(_) => None,
        }
    } else {
        None
    };
    let certificate_ms = elapsed_ms(cert_start);

    Ok(Report {
        schema: SCHEMA.into(),
        system: system.name.clone(),
        validation: ValidationSummary { valid: true, violations: Vec::new() },
        connectedness: ConnectednessSummary {
            consistent: conn.consistent,
            mismatches: conn
                .mismatches
                .iter()
                .map(|m| Mismatch {
                    content: m.content.clone(),
                    first: m.first.clone(),
                    second: m.second.clone(),
                    first_p: r(&m.first_p),
                    second_p: r(&m.second_p),
                })
                .collect(),
        },
        cyclic,
        lp: LpSummary {
            contextual: result.contextual,
            verdict: verdict(result.contextual).into(),
            delta: r(&result.delta),
            max_total: r(&result.max_total),
            attained_total: r(&result.attained_total),
            measurements: system.measurement_count(),
        },
        witness,
        certificate,
        timings_ms: Timings { validate: validate_ms, lp: lp_ms, certificate: certificate_ms, total: elapsed_ms(start) },
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The report with every timing set to zero, for byte comparisons.
    pub fn without_timings(&self) -> Report {
        Report { timings_ms: Timings { validate: 0.0, lp: 0.0, certificate: 0.0, total: 0.0 }, ..self.clone() }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system: {}", self.system.as_deref().unwrap_or("(unnamed)"))?;
        writeln!(f, "valid: yes")?;
        writeln!(f, "consistently connected: {}", if self.connectedness.consistent { "yes" } else { "no" })?;
        for m in &self.connectedness.mismatches {
            writeln!(f, "  {}: P[+1] = {} in {}, {} in {}", m.content, m.first_p, m.first, m.second_p, m.second)?;
        }
        let c = &self.cyclic;
        match (c.rank, &c.s_odd, &c.bound) {
            (Some(rank), Some(s), Some(b)) => {
                writeln!(f, "cyclic: rank {rank}, cycle {}", c.cycle.join(" "))?;
                writeln!(f, "  correlations: {}", c.correlations.join(", "))?;
                writeln!(f, "  s_odd = {s}, bound = {b}, verdict: {}", c.verdict)?;
            }
            _ => writeln!(f, "cyclic: no")?,
        }
        writeln!(f, "lp verdict: {}", self.lp.verdict)?;
        writeln!(f, "  max_total = {}", self.lp.max_total)?;
        writeln!(f, "  attained_total = {}", self.lp.attained_total)?;
        writeln!(f, "  delta = {}", self.lp.delta)?;
        if let Some(w) = &self.witness {
            writeln!(f, "witness: {} atoms over {}", w.support_size, w.measurements.join(" "))?;
            for a in w.atoms.iter().flatten() {
                writeln!(f, "  {} {}", a.assignment, a.probability)?;
            }
        }
        if let Some(cert) = &self.certificate {
            writeln!(
                f,
                "certificate: bound {}, {}",
                cert.bound,
                if cert.verified { "verified" } else { "NOT verified" }
            )?;
            for (row, z) in cert.rows.iter().zip(&cert.multipliers) {
                writeln!(f, "  {row} {z}")?;
            }
        }
        Ok(())
    }
}
