//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use raequiv::algebra::PolyAlgebra;
use raequiv::automata::{cross_difference, parse_automaton, AnyAutomaton, RegisterAutomaton};
use raequiv::checker::{
    decide_equivalence, decide_functionality, decide_zeroness, recheck_zeroness, verify_ideal_family, Budget,
    Certificate, Outcome,
};
use raequiv::encodings::{compile_to_poly, encode_context_pair, phi, reduce_alphabet};
use raequiv::forests::{enumerate_forests, fcns_decode, random_context, random_forest, Forest};
use raequiv::gen::{fuzz_instance, random_machine, random_poly_automaton, FuzzKind, RandomShape};
use raequiv::groebner::{buchberger, ideal_member};
use raequiv::poly::{rat, Monomial, MonomialOrder, Polynomial, Var};
use raequiv::reductions::{
    build_oneletter_variant, build_reduction_ra, crossvalidate_bounded, word_tree, CrossMode, TwoCounterMachine,
    ONE_LETTER,
};
use raequiv::tree::RankedTree;

type Check = Result<String, String>;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> AnyAutomaton {
    parse_automaton(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn poly(name: &str) -> RegisterAutomaton<PolyAlgebra> {
    compile_to_poly(&load(name)).unwrap()
}

fn machine(name: &str) -> TwoCounterMachine {
    TwoCounterMachine::parse(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn budget(secs: f64) -> Budget {
    Budget {
        max_secs: secs,
        deterministic: true,
        ..Budget::default()
    }
}

fn within(start: Instant, limit: Duration, detail: String) -> Check {
    let took = start.elapsed();
    if took < limit {
        Ok(format!("{detail}, {:.2}s", took.as_secs_f64()))
    } else {
        Err(format!("{detail}, took {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()))
    }
}

const ROOT: &str = "root";

fn c1_homomorphism() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = Polynomial::var("x");
    for i in 0..1000 {
        let n = rng.gen_range(0..=12);
        let k = rng.gen_range(0..=n);
        let (h, g) = (random_forest(&mut rng, &[ROOT], k), random_forest(&mut rng, &[ROOT], n - k));
        let (ph, pg) = (phi(&h).unwrap(), phi(&g).unwrap());
        if phi(&h.add(&g)).unwrap() != &ph * &pg {
            return Err(format!("sum rule fails on case {i}: {h} and {g}"));
        }
        if phi(&Forest::root(ROOT, &h)).unwrap() != &Polynomial::int(2) + &(&x * &ph) {
            return Err(format!("root rule fails on case {i}: {h}"));
        }
    }
    within(start, Duration::from_secs(10), "1000 forests".into())
}

fn c2_injectivity() -> Check {
    let start = Instant::now();
    let unary = enumerate_forests(&[ROOT], 7);
    let images: HashSet<Polynomial> = unary.iter().map(|h| phi(h).unwrap()).collect();
    if images.len() != unary.len() {
        return Err(format!("{} collisions among unary forests", unary.len() - images.len()));
    }
    let two = enumerate_forests(&["a", "b"], 4);
    let images: HashSet<Polynomial> = two
        .iter()
        .map(|h| phi(&reduce_alphabet(h, &["a", "b"]).unwrap()).unwrap())
        .collect();
    if images.len() != two.len() {
        return Err(format!("{} collisions among 2-letter forests", two.len() - images.len()));
    }
    within(
        start,
        Duration::from_secs(60),
        format!("{} unary forests, {} 2-letter forests", unary.len(), two.len()),
    )
}

fn c3_context_pairs() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..500 {
        let size = rng.gen_range(0..=8);
        let c = random_context(&mut rng, &[ROOT], size);
        let nodes = rng.gen_range(0..=6);
        // half of the arguments are contexts themselves
        let d = if i % 2 == 0 {
            random_forest(&mut rng, &[ROOT], nodes)
        } else {
            random_context(&mut rng, &[ROOT], nodes)
        };
        let plugged = encode_context_pair(&c.substitute(&d).unwrap()).unwrap();
        let rule = encode_context_pair(&c).unwrap().subst(&encode_context_pair(&d).unwrap());
        if plugged != rule {
            return Err(format!("case {i}: {c} with {d}"));
        }
    }
    within(start, Duration::from_secs(10), "500 substitutions".into())
}

fn c4_compilation() -> Check {
    let AnyAutomaton::Uf(src) = load("fcns.ra") else {
        return Err("fcns.ra is not a UF automaton".into());
    };
    let compiled = poly("fcns.ra");
    let labels = ["a", "b", "c", "d", "e", "f"];
    let trees = src.signature().enumerate(10);
    for t in &trees {
        let outs = src.outputs_on(t).unwrap();
        if outs != BTreeSet::from([fcns_decode(t).unwrap()]) {
            return Err(format!("source output on {t} is not its decoding"));
        }
        let through: BTreeSet<Polynomial> = outs
            .iter()
            .map(|h| phi(&reduce_alphabet(h, &labels).unwrap()).unwrap())
            .collect();
        if through != compiled.outputs_on(t).unwrap() {
            return Err(format!("mismatch on {t}"));
        }
    }
    Ok(format!("{} trees, 0 mismatches", trees.len()))
}

fn c5_equivalence_positive() -> Check {
    let start = Instant::now();
    let (a, b) = (poly("fcns.ra"), poly("fcns_swapped.ra"));
    let v = decide_equivalence(&a, &b, &budget(120.0)).unwrap();
    if v.outcome != Outcome::Equivalent {
        return Err(format!("verdict {}", v.outcome.name()));
    }
    let Certificate::Family { family, .. } = &v.certificate else {
        return Err(format!("certificate {}", v.certificate.kind()));
    };
    if !verify_ideal_family(&cross_difference(&a, &b).unwrap(), family).unwrap() {
        return Err("certificate fails re-verification".into());
    }
    within(start, Duration::from_secs(120), format!("family {family}"))
}

fn c6_equivalence_negative() -> Check {
    let start = Instant::now();
    let v = decide_equivalence(&poly("fcns.ra"), &poly("fcns_mutant.ra"), &budget(5.0)).unwrap();
    if v.outcome != Outcome::NotEquivalent {
        return Err(format!("verdict {}", v.outcome.name()));
    }
    let t = v.certificate.tree().ok_or("no witness tree")?;
    if t.size() > 3 {
        return Err(format!("witness {t} has size {}", t.size()));
    }
    within(start, Duration::from_secs(5), format!("witness {t}"))
}

fn c7_functionality() -> Check {
    let start = Instant::now();
    let v = decide_functionality(&poly("twoleaf.ra"), &budget(1.0)).unwrap();
    let leaf = v.certificate.tree().map(|t| t.size() == 1).unwrap_or(false);
    if v.outcome != Outcome::NotFunctional || !leaf {
        return Err(format!("twoleaf: {} {:?}", v.outcome.name(), v.certificate.tree()));
    }
    let first = start.elapsed();
    if first >= Duration::from_secs(1) {
        return Err(format!("twoleaf took {:.2}s", first.as_secs_f64()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut functional = 0;
    for i in 0..20 {
        let m = random_poly_automaton(&mut rng, RandomShape::default());
        let v = decide_functionality(&m, &budget(5.0)).unwrap();
        match v.outcome {
            Outcome::Functional => functional += 1,
            Outcome::Unknown => {}
            o => return Err(format!("random automaton {i}: {}", o.name())),
        }
    }
    Ok(format!(
        "twoleaf in {:.3}s, {functional}/20 random deterministic automata Functional",
        first.as_secs_f64()
    ))
}

fn c8_fuzz() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = Budget {
        max_secs: 2.0,
        max_tree_size: 8,
        deterministic: true,
        ..Budget::default()
    };
    let (mut zero, mut nonzero, mut unknown) = (0, 0, 0);
    for i in 0..200 {
        let (kind, m) = fuzz_instance(&mut rng);
        let nonzero_small = m
            .signature()
            .enumerate(6)
            .into_iter()
            .find(|t| m.outputs_on(t).unwrap().iter().any(|v| !v.is_zero()));
        let v = decide_zeroness(&m, &b).unwrap();
        let bad = match v.outcome {
            Outcome::Zero => {
                zero += 1;
                nonzero_small.is_some() || !recheck_zeroness(&m, &v).unwrap()
            }
            Outcome::NonZero => {
                nonzero += 1;
                !recheck_zeroness(&m, &v).unwrap() || matches!(kind, FuzzKind::SelfProduct | FuzzKind::Permuted)
            }
            _ => {
                unknown += 1;
                false
            }
        };
        if bad {
            return Err(format!("instance {i} ({kind:?}): verdict {} contradicts evaluation", v.outcome.name()));
        }
    }
    Ok(format!("{zero} zero, {nonzero} nonzero, {unknown} unknown, 0 contradictions"))
}

fn c9_crossvalidation() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..50 {
        let n = rng.gen_range(1..=3);
        let m = random_machine(&mut rng, n);
        let target = rng.gen_range(1..=n);
        let r = crossvalidate_bounded(&m, target, 5, CrossMode::Pruned).unwrap();
        if let Some(e) = r.mismatch {
            return Err(format!("random machine {i}: {e}"));
        }
    }
    for name in ["onestep.2cm", "stuck.2cm", "countdown.2cm"] {
        let m = machine(name);
        let r = crossvalidate_bounded(&m, m.states(), 8, CrossMode::Pruned).unwrap();
        if let Some(e) = r.mismatch {
            return Err(format!("{name}: {e}"));
        }
    }
    within(start, Duration::from_secs(300), "50 random machines at L=5, 3 hand-built at L=8".into())
}

fn words(symbols: &[String], k: usize) -> Vec<Vec<&str>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                symbols.iter().map(move |s| {
                    let mut w2 = w.clone();
                    w2.push(s.as_str());
                    w2
                })
            })
            .collect();
    }
    out
}

fn c10_one_letter() -> Check {
    let mut checked = 0;
    for name in ["onestep.2cm", "stuck.2cm", "countdown.2cm"] {
        let m = machine(name);
        let det = build_reduction_ra(&m, m.states()).unwrap();
        let one = build_oneletter_variant(&m, m.states()).unwrap();
        let symbols: Vec<String> = m.transitions().map(|t| t.symbol()).collect();
        for k in 0..=4 {
            let mut union = BTreeSet::new();
            for w in words(&symbols, k) {
                union.extend(det.outputs_on(&word_tree(&w)).unwrap());
            }
            let got = one.outputs_on(&word_tree(&vec![ONE_LETTER; k])).unwrap();
            if got != union {
                return Err(format!("{name} at k={k}: {} vs {} outputs", got.len(), union.len()));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (machine, k) pairs, 0 mismatches"))
}

fn c11_doubling() -> Check {
    let m = poly("doubling.ra");
    let mut t = RankedTree::bottom();
    for n in 0..=10u32 {
        let outs = m.outputs_on(&t).unwrap();
        let degrees: Vec<Option<u32>> = outs.iter().map(Polynomial::total_degree).collect();
        if degrees != [Some(1 << n)] {
            return Err(format!("n={n}: degrees {degrees:?}"));
        }
        t = RankedTree::node("root_a", vec![t]);
    }
    Ok("degree 2^n for n = 0..=10".into())
}

fn random_poly<R: Rng>(rng: &mut R, vars: &[Var]) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let m = Monomial::from_exponents(vars.iter().map(|v| (v.clone(), rng.gen_range(0..=2))));
        p.add_term(m, rat(rng.gen_range(-3..=3)));
    }
    p
}

fn c12_groebner() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (lex, drl) = (MonomialOrder::lex(), MonomialOrder::degrevlex());
    for i in 0..500 {
        let nvars = rng.gen_range(1..=3);
        let vars: Vec<Var> = ["x", "y", "z"][..nvars].iter().map(|v| Var::new(v)).collect();
        let (g1, g2) = (random_poly(&mut rng, &vars), random_poly(&mut rng, &vars));
        let (a, b) = (random_poly(&mut rng, &vars), random_poly(&mut rng, &vars));
        let member = &(&a * &g1) + &(&b * &g2);
        let other = random_poly(&mut rng, &vars);
        let gens = [g1, g2];
        let bl = buchberger(&gens, &lex);
        let bd = buchberger(&gens, &drl);
        if !ideal_member(&member, &bl) || !ideal_member(&member, &bd) {
            return Err(format!("case {i}: closure fails"));
        }
        if buchberger(bl.generators(), &lex).generators() != bl.generators()
            || buchberger(bd.generators(), &drl).generators() != bd.generators()
        {
            return Err(format!("case {i}: Buchberger is not idempotent"));
        }
        if ideal_member(&other, &bl) != ideal_member(&other, &bd) {
            return Err(format!("case {i}: lex and degrevlex disagree on {}", other.to_text(&drl)));
        }
    }
    within(start, Duration::from_secs(600), "500 cases".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("encoding homomorphism", c1_homomorphism),
        ("encoding injectivity", c2_injectivity),
        ("context pair encoding", c3_context_pairs),
        ("compilation fidelity", c4_compilation),
        ("equivalence, positive", c5_equivalence_positive),
        ("equivalence, negative", c6_equivalence_negative),
        ("functionality", c7_functionality),
        ("checker soundness under fuzzing", c8_fuzz),
        ("reduction cross-validation", c9_crossvalidation),
        ("one-letter variant", c10_one_letter),
        ("doubling degree", c11_doubling),
        ("groebner engine", c12_groebner),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
