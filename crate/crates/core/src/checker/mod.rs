//! Zeroness, functionality and equivalence for automata over `Q[x]`.
//!
//! Zeroness runs two semi-decision procedures side by side: a search for a
//! tree with a nonzero output, and a search for an inductive ideal family
//! containing every output polynomial.

mod ideals;
mod linalg;
mod report;
mod search;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::PolyAlgebra;
use crate::automata::{cross_difference, self_product, AutomatonError, Configuration, RegisterAutomaton};
use crate::poly::Polynomial;
use crate::tree::RankedTree;

pub use ideals::{
    enumerate_ideal_families, evaluate_on, grid_candidates, state_candidates, template_monomials, term_polynomial,
    term_var, vanishing_polynomials, verify_ideal_family, FamilyChecker, FamilyEnumerator, IdealFamily,
};
pub use linalg::Echelon;
pub use search::{search_counterexample, ConfigLayers, LayerStatus, Witness};

#[derive(Debug, Error)]
pub enum CheckerError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Resource limits for one decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub max_steps: u64,
    pub max_secs: f64,
    pub max_tree_size: usize,
    pub max_degree: u32,
    pub max_height: i64,
    pub max_generators: usize,
    /// Per-layer cap on new configurations.
    pub layer_cap: usize,
    pub seed: u64,
    /// Single thread, fixed interleaving.
    pub deterministic: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 2_000_000,
            max_secs: 60.0,
            max_tree_size: 12,
            max_degree: 3,
            max_height: 2,
            max_generators: 2,
            layer_cap: 20_000,
            seed: 0,
            deterministic: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Question {
    Zeroness,
    Functionality,
    Equivalence,
}

impl Question {
    pub fn name(self) -> &'static str {
        match self {
            Question::Zeroness => "zeroness",
            Question::Functionality => "functionality",
            Question::Equivalence => "equivalence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Zero,
    NonZero,
    Functional,
    NotFunctional,
    Equivalent,
    NotEquivalent,
    DomainsDiffer,
    Unknown,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Zero => "zero",
            Outcome::NonZero => "nonzero",
            Outcome::Functional => "functional",
            Outcome::NotFunctional => "not-functional",
            Outcome::Equivalent => "equivalent",
            Outcome::NotEquivalent => "not-equivalent",
            Outcome::DomainsDiffer => "domains-differ",
            Outcome::Unknown => "unknown",
        }
    }

    pub fn is_definite(self) -> bool {
        self != Outcome::Unknown
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    None,
    /// A tree on which the automaton has a nonzero output.
    Witness { tree: RankedTree, value: Polynomial },
    /// A tree with two distinct outputs.
    TwoOutputs { tree: RankedTree, first: Polynomial, second: Polynomial },
    /// A tree on which the two automata produce different output sets.
    Distinguishing { tree: RankedTree, left: Vec<Polynomial>, right: Vec<Polynomial> },
    /// Inductive ideal family containing all outputs, with state names.
    Family { states: Vec<String>, family: IdealFamily },
    /// At most one run per tree.
    Deterministic,
    /// A tree in the domain of exactly one automaton (1 or 2).
    Domain { tree: RankedTree, accepted_by: u8 },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::None => "none",
            Certificate::Witness { .. } => "witness",
            Certificate::TwoOutputs { .. } => "two-outputs",
            Certificate::Distinguishing { .. } => "distinguishing",
            Certificate::Family { .. } => "ideal-family",
            Certificate::Deterministic => "deterministic",
            Certificate::Domain { .. } => "domain",
        }
    }

    pub fn tree(&self) -> Option<&RankedTree> {
        match self {
            Certificate::Witness { tree, .. }
            | Certificate::TwoOutputs { tree, .. }
            | Certificate::Distinguishing { tree, .. }
            | Certificate::Domain { tree, .. } => Some(tree),
            _ => None,
        }
    }
}

/// Resources used, reported with every verdict.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BudgetReport {
    pub steps: u64,
    pub tree_size: usize,
    pub degree: u32,
    pub ideal_rounds: usize,
    pub elapsed_ms: u128,
    pub saturated: bool,
    pub exhausted: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub question: Question,
    pub outcome: Outcome,
    pub certificate: Certificate,
    pub report: BudgetReport,
}

impl Verdict {
    /// 0 for a definite answer, 2 for unknown.
    pub fn exit_code(&self) -> i32 {
        if self.outcome.is_definite() {
            0
        } else {
            2
        }
    }
}

struct Clock<'a> {
    start: Instant,
    budget: &'a Budget,
    cancel: Option<&'a AtomicBool>,
}

impl Clock<'_> {
    fn out_of_time(&self) -> bool {
        self.start.elapsed().as_secs_f64() >= self.budget.max_secs
            || self.cancel.is_some_and(|c| c.load(Ordering::Relaxed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Interleaved,
    CounterexampleOnly,
    IdealHeavy,
}

const SAMPLES_PER_STATE: usize = 120;
const RANDOM_SAMPLES: usize = 12;
const GRID_CAP: usize = 48;
const MAX_EXTRA: usize = 600;

fn zeroness_task(
    m: &RegisterAutomaton<PolyAlgebra>,
    budget: &Budget,
    mode: Mode,
    clock: &Clock,
) -> Result<Verdict, CheckerError> {
    let mut report = BudgetReport::default();
    let finish = |outcome, certificate, mut report: BudgetReport| {
        report.elapsed_ms = clock.start.elapsed().as_millis();
        Ok(Verdict {
            question: Question::Zeroness,
            outcome,
            certificate,
            report,
        })
    };
    let checker = if mode == Mode::CounterexampleOnly {
        None
    } else {
        match FamilyChecker::new(m) {
            Ok(c) => Some(c),
            Err(CheckerError::Unsupported(_)) => None,
            Err(e) => return Err(e),
        }
    };
    let state_names = m.states().to_vec();
    let family_verdict = |family: IdealFamily, report: BudgetReport| {
        finish(
            Outcome::Zero,
            Certificate::Family {
                states: state_names.clone(),
                family,
            },
            report,
        )
    };
    if let Some(c) = &checker {
        if c.verify(&IdealFamily::zero()) {
            return family_verdict(IdealFamily::zero(), report);
        }
    }
    let mut layers = ConfigLayers::new(m, budget.max_tree_size, budget.layer_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut extra: Vec<Configuration<Polynomial>> = Vec::new();
    let mut round: u32 = 0;
    let mut last_attempt: Option<(u32, usize)> = None;
    let mut ideal_done = checker.is_none();
    loop {
        let quota = match mode {
            Mode::CounterexampleOnly => 1,
            Mode::IdealHeavy => 1,
            Mode::Interleaved if layers.size() <= 8 => 4,
            Mode::Interleaved => 1,
        };
        for _ in 0..quota {
            if layers.exhausted() {
                break;
            }
            let max_steps = budget.max_steps;
            let mut stop = |steps: u64| steps >= max_steps || clock.out_of_time();
            let (status, witness) = layers.advance(&mut stop)?;
            report.steps = layers.steps();
            report.saturated = layers.saturated();
            if let Some(w) = witness {
                report.tree_size = w.tree.size();
                return finish(
                    Outcome::NonZero,
                    Certificate::Witness {
                        tree: w.tree,
                        value: w.value,
                    },
                    report,
                );
            }
            if status == LayerStatus::Interrupted {
                report.exhausted = Some(if report.steps >= budget.max_steps { "steps" } else { "time" }.into());
                return finish(Outcome::Unknown, Certificate::None, report);
            }
            report.tree_size = layers.size();
        }
        if clock.out_of_time() {
            report.exhausted = Some("time".into());
            return finish(Outcome::Unknown, Certificate::None, report);
        }
        if let Some(c) = checker.as_ref().filter(|_| !ideal_done) {
            // random trees beyond the explored layers: more samples, possibly a witness
            for _ in 0..RANDOM_SAMPLES {
                if extra.len() >= MAX_EXTRA || budget.max_tree_size == 0 {
                    break;
                }
                let Some(t) = m.signature().random_tree(&mut rng, budget.max_tree_size) else {
                    break;
                };
                let run = m.run(&t, budget.layer_cap)?;
                report.steps += t.size() as u64;
                for cfg in run.configurations {
                    if let Some(v) = m.output_of(&cfg) {
                        let v = v?;
                        if !v.is_zero() {
                            report.tree_size = report.tree_size.max(t.size());
                            return finish(Outcome::NonZero, Certificate::Witness { tree: t, value: v }, report);
                        }
                    }
                    extra.push(cfg);
                }
            }
            round += 1;
            let d = round.min(budget.max_degree.max(1));
            let h = (round as i64).min(budget.max_height.max(1));
            let sample_count = layers.len() + extra.len();
            if last_attempt != Some((d, sample_count)) {
                last_attempt = Some((d, sample_count));
                report.ideal_rounds += 1;
                report.degree = d;
                if let Some(fam) = guided_family(c, &layers, &extra, d, h, budget.max_generators) {
                    if c.verify(&fam) {
                        return family_verdict(fam, report);
                    }
                }
            } else if layers.exhausted() {
                ideal_done = true;
            }
        }
        if layers.exhausted() && (ideal_done || checker.is_none()) {
            report.exhausted = Some("tree-size".into());
            return finish(Outcome::Unknown, Certificate::None, report);
        }
    }
}

fn guided_family(
    c: &FamilyChecker,
    layers: &ConfigLayers<PolyAlgebra>,
    extra: &[Configuration<Polynomial>],
    d: u32,
    h: i64,
    max_generators: usize,
) -> Option<IdealFamily> {
    let m = c.automaton();
    let mut samples: BTreeMap<usize, Vec<&[Polynomial]>> = BTreeMap::new();
    for (cfg, _) in layers.configurations() {
        let s = samples.entry(cfg.state).or_default();
        if s.len() < SAMPLES_PER_STATE {
            s.push(&cfg.registers);
        }
    }
    for cfg in extra {
        let s = samples.entry(cfg.state).or_default();
        if s.len() < 2 * SAMPLES_PER_STATE {
            s.push(&cfg.registers);
        }
    }
    let mut cands = IdealFamily::zero();
    for q in c.reachable() {
        let gens = match samples.get(q) {
            Some(s) => state_candidates(m.registers(), d, h, s, GRID_CAP * max_generators),
            None => vec![Polynomial::one()],
        };
        cands.insert(*q, gens);
    }
    let rounds = cands.generator_count() + 1;
    c.houdini(cands, rounds)
}

pub fn decide_zeroness(m: &RegisterAutomaton<PolyAlgebra>, budget: &Budget) -> Result<Verdict, CheckerError> {
    let start = Instant::now();
    if budget.deterministic {
        let clock = Clock {
            start,
            budget,
            cancel: None,
        };
        return zeroness_task(m, budget, Mode::Interleaved, &clock);
    }
    let cancel = AtomicBool::new(false);
    let results: Mutex<Vec<Result<Verdict, CheckerError>>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for mode in [Mode::CounterexampleOnly, Mode::IdealHeavy] {
            let (cancel, results) = (&cancel, &results);
            s.spawn(move || {
                let clock = Clock {
                    start,
                    budget,
                    cancel: Some(cancel),
                };
                let r = zeroness_task(m, budget, mode, &clock);
                if matches!(&r, Ok(v) if v.outcome.is_definite()) || r.is_err() {
                    cancel.store(true, Ordering::Relaxed);
                }
                results.lock().expect("result lock").push(r);
            });
        }
    });
    let mut all = results.into_inner().expect("result lock");
    if let Some(i) = all.iter().position(|r| r.is_err()) {
        return all.swap_remove(i);
    }
    let mut verdicts: Vec<Verdict> = all.into_iter().map(Result::unwrap).collect();
    let best = verdicts
        .iter()
        .position(|v| v.outcome.is_definite())
        .unwrap_or(0);
    let total_steps: u64 = verdicts.iter().map(|v| v.report.steps).sum();
    let saturated = verdicts.iter().any(|v| v.report.saturated);
    let mut v = verdicts.swap_remove(best);
    // the winner's report, with work counted across both tasks
    v.report.steps = total_steps;
    v.report.saturated = saturated;
    v.report.elapsed_ms = start.elapsed().as_millis();
    Ok(v)
}

pub fn decide_functionality(m: &RegisterAutomaton<PolyAlgebra>, budget: &Budget) -> Result<Verdict, CheckerError> {
    if m.is_deterministic() {
        return Ok(Verdict {
            question: Question::Functionality,
            outcome: Outcome::Functional,
            certificate: Certificate::Deterministic,
            report: BudgetReport::default(),
        });
    }
    let product = self_product(m)?;
    let z = decide_zeroness(&product, budget)?;
    let (outcome, certificate) = match (z.outcome, z.certificate) {
        (Outcome::Zero, cert) => (Outcome::Functional, cert),
        (Outcome::NonZero, Certificate::Witness { tree, .. }) => {
            let outs: Vec<Polynomial> = m.outputs_on(&tree)?.into_iter().collect();
            if outs.len() < 2 {
                return Err(CheckerError::Unsupported("witness without two outputs".into()));
            }
            (
                Outcome::NotFunctional,
                Certificate::TwoOutputs {
                    tree,
                    first: outs[0].clone(),
                    second: outs[1].clone(),
                },
            )
        }
        _ => (Outcome::Unknown, Certificate::None),
    };
    Ok(Verdict {
        question: Question::Functionality,
        outcome,
        certificate,
        report: z.report,
    })
}

pub fn decide_equivalence(
    m1: &RegisterAutomaton<PolyAlgebra>,
    m2: &RegisterAutomaton<PolyAlgebra>,
    budget: &Budget,
) -> Result<Verdict, CheckerError> {
    if let Some(tree) = m1.domain_difference(m2)? {
        let accepted_by = if m1.outputs_on(&tree)?.is_empty() { 2 } else { 1 };
        return Ok(Verdict {
            question: Question::Equivalence,
            outcome: Outcome::DomainsDiffer,
            certificate: Certificate::Domain { tree, accepted_by },
            report: BudgetReport::default(),
        });
    }
    let diff = cross_difference(m1, m2)?;
    let z = decide_zeroness(&diff, budget)?;
    let (outcome, certificate) = match (z.outcome, z.certificate) {
        (Outcome::Zero, cert) => (Outcome::Equivalent, cert),
        (Outcome::NonZero, Certificate::Witness { tree, .. }) => {
            let left: Vec<Polynomial> = m1.outputs_on(&tree)?.into_iter().collect();
            let right: Vec<Polynomial> = m2.outputs_on(&tree)?.into_iter().collect();
            let outcome = if left != right {
                Outcome::NotEquivalent
            } else {
                Outcome::NotFunctional
            };
            (outcome, Certificate::Distinguishing { tree, left, right })
        }
        _ => (Outcome::Unknown, Certificate::None),
    };
    Ok(Verdict {
        question: Question::Equivalence,
        outcome,
        certificate,
        report: z.report,
    })
}

/// Re-check a zeroness certificate independently of the search.
pub fn recheck_zeroness(m: &RegisterAutomaton<PolyAlgebra>, v: &Verdict) -> Result<bool, CheckerError> {
    Ok(match &v.certificate {
        Certificate::Witness { tree, value } => {
            !value.is_zero() && m.outputs_on(tree)?.contains(value)
        }
        Certificate::Family { family, .. } => verify_ideal_family(m, family)?,
        _ => !v.outcome.is_definite(),
    })
}

pub use report::{machine_report, text_report};
