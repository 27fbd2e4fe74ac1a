//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cbd_core::hidden::LambdaModel;
use cbd_core::rational::{int, ratio, Rational};
use cbd_core::system::{Context, ContextPmf, Outcome, System};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A correlation `k/d` with `d` in `1..=12` and `|k| ≤ d`.
pub fn random_rho(rng: &mut impl Rng) -> Rational {
    let d = rng.gen_range(1..=12i64);
    ratio(rng.gen_range(-d..=d), d)
}

pub fn random_probability(rng: &mut impl Rng, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    ratio(rng.gen_range(0..=d), d)
}

/// A distribution over `Outcome::all(arity)` from small integer weights.
pub fn random_pmf(rng: &mut impl Rng, arity: usize) -> ContextPmf {
    let size = 1usize << arity;
    loop {
        let weights: Vec<i64> = (0..size).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=9) }).collect();
        let total: i64 = weights.iter().sum();
        if total > 0 {
            return ContextPmf::from_entries(
                weights.iter().enumerate().map(|(i, w)| (Outcome::from_index(i, arity), ratio(*w, total))),
            );
        }
    }
}

/// An arbitrary valid system: 1 to 4 contents, 1 to 4 contexts of arity 1 to 3.
/// Connections need not be consistent.
pub fn random_system(rng: &mut impl Rng) -> System {
    let n = rng.gen_range(1..=4usize);
    let contents: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    let k = rng.gen_range(1..=4usize);
    let mut contexts = Vec::new();
    let mut pmfs = BTreeMap::new();
    for j in 1..=k {
        let arity = rng.gen_range(1..=n.min(3));
        let mut measured: Vec<&str> = contents.iter().map(String::as_str).collect();
        measured.shuffle(rng);
        measured.truncate(arity);
        let label = format!("c{j}");
        pmfs.insert(label.clone(), random_pmf(rng, arity));
        contexts.push(Context::new(label, &measured));
    }
    let name = rng.gen_bool(0.5).then(|| format!("random {}", rng.gen_range(0..1000)));
    System { name, contents, contexts, pmfs }
}

/// Largest `Pr[X = Y]` over couplings of binary `X`, `Y` with `Pr[X=+1] = p`,
/// `Pr[Y=+1] = q`, found by scanning the free atom `Pr[++]` over a grid
/// fine enough to contain every vertex.
pub fn brute_max_equality(p: &Rational, q: &Rational) -> Rational {
    let den = |r: &Rational| num_traits::ToPrimitive::to_i64(r.denom()).expect("small denominators");
    let steps = den(p) * den(q);
    let one = int(1);
    let mut best: Option<Rational> = None;
    for k in 0..=steps {
        let t = ratio(k, steps);
        let atoms = [t.clone(), p - &t, q - &t, &one - p - q + &t];
        if atoms.iter().any(|a| a.is_negative()) {
            continue;
        }
        let agree = &atoms[0] + &atoms[3];
        if best.as_ref().is_none_or(|b| agree > *b) {
            best = Some(agree);
        }
    }
    best.expect("independent coupling is always on the grid")
}

/// `max Σ ε_k v_k` over sign vectors with an odd number of minus signs, by enumeration.
pub fn brute_s_odd(values: &[Rational]) -> Rational {
    let n = values.len();
    (0..1u32 << n)
        .filter(|mask| mask.count_ones() % 2 == 1)
        .map(|mask| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| if mask >> k & 1 == 1 { -v.clone() } else { v.clone() })
                .sum::<Rational>()
        })
        .max()
        .expect("n ≥ 1")
}

/// Splits random atoms of `model` into random positive pieces, renames every
/// atom and shuffles their order. The joint distribution is unchanged.
pub fn random_refinement(rng: &mut impl Rng, model: &LambdaModel) -> LambdaModel {
    let mut atoms = Vec::new();
    let mut responses: BTreeMap<String, BTreeMap<String, _>> =
        model.contents.iter().map(|q| (q.clone(), BTreeMap::new())).collect();
    for (atom, p) in &model.atoms {
        let pieces = if rng.gen_bool(0.5) { rng.gen_range(2..=4) } else { 1 };
        let weights: Vec<i64> = (0..pieces).map(|_| rng.gen_range(1..=5)).collect();
        let total: i64 = weights.iter().sum();
        for (k, w) in weights.iter().enumerate() {
            let id = format!("k{}_{atom}_{k}", rng.gen_range(0..1_000_000));
            atoms.push((id.clone(), p * ratio(*w, total)));
            for q in &model.contents {
                let sign = model.responses[q][atom];
                responses.get_mut(q).expect("seeded").insert(id.clone(), sign);
            }
        }
    }
    atoms.shuffle(rng);
    LambdaModel { contents: model.contents.clone(), atoms, responses }
}

/// Pushforward of `from` through `h`, keyed by target atom.
pub fn pushforward(from: &LambdaModel, h: &BTreeMap<String, String>) -> BTreeMap<String, Rational> {
    let mut out: BTreeMap<String, Rational> = BTreeMap::new();
    for (atom, p) in &from.atoms {
        *out.entry(h[atom].clone()).or_insert_with(Rational::zero) += p;
    }
    out.retain(|_, p| !p.is_zero());
    out
}
