//! The seven acceptance criteria, each timed against its budget. One
//! PASS/FAIL line per criterion goes straight to stderr, so it shows up
//! without `--nocapture`.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use linmodal::checker::props::{run_suites, SuiteConfig};
use linmodal::checker::{
    check_artifact, countermodel_search, instance_verdicts, r_blackdiamond, ArithmeticBeta, CheckOptions, CheckReport,
    Marker, SearchOptions, Verdict,
};
use linmodal::extraction::roundtrip;
use linmodal::formula::Formula;
use linmodal::kripke::generators::{build_dense, build_m0, build_m0_prime, build_m0_star, build_ordinal};
use linmodal::kripke::{Frame, PredicateModel, ReflexiveSet};
use linmodal::reductions::{gen_separation, gen_variant, letters, ReductionArtifact, Separation, Variant};
use linmodal::tiling::{find_recurrent, recurrent_certificate, PeriodicTiling, TileSet, TileType, TilingGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn one_tile() -> (TileSet, PeriodicTiling) {
    let t = TileSet::new(vec![TileType::new(0, 0, 0, 0)]).unwrap();
    let p = PeriodicTiling::new(&t, TilingGrid::from_fn(1, 1, |_, _| 0)).unwrap();
    (t, p)
}

fn checkerboard() -> (TileSet, PeriodicTiling) {
    let t = TileSet::new(vec![
        TileType::new(0, 1, 0, 1),
        TileType::new(1, 0, 1, 0),
        TileType::new(0, 1, 1, 0),
        TileType::new(1, 0, 0, 1),
    ])
    .unwrap();
    let p = PeriodicTiling::new(&t, TilingGrid::new(2, 2, vec![0, 1, 2, 3]).unwrap()).unwrap();
    (t, p)
}

fn criterion_1() -> Outcome {
    let mut sets = 0;
    for (t, _) in [one_tile(), common::two_tiles(), common::three_tiles()] {
        let a = gen_variant(&t, Variant::A).map_err(|e| e.to_string())?.metrics().unwrap();
        ensure(a.variables.len() == 2, || format!("|T|={}: A uses {:?}", t.len(), a.variables))?;
        let p = gen_variant(&t, Variant::APrime).map_err(|e| e.to_string())?.metrics().unwrap();
        let binary: Vec<&String> = p.letters.iter().filter(|(_, c)| c.arity >= 2).map(|(l, _)| l).collect();
        ensure(binary.is_empty(), || format!("|T|={}: A′ has binary letters {binary:?}", t.len()))?;
        let s = gen_variant(&t, Variant::AStar).map_err(|e| e.to_string())?.metrics().unwrap();
        let arities: Vec<usize> = s.letters.values().map(|c| c.arity).collect();
        let mut sorted = arities.clone();
        sorted.sort_unstable();
        ensure(sorted == [0, 1], || format!("|T|={}: A* letter arities {arities:?}", t.len()))?;
        ensure(s.variables.len() == 2, || format!("|T|={}: A* uses {:?}", t.len(), s.variables))?;
        sets += 1;
    }
    Ok(format!("{sets} tile sets; A: 2 variables, A′: no binary letter, A*: one monadic + one nullary letter, 2 variables"))
}

/// `a` has a successor witness inside the materialized part of `model`.
fn witness_in_prefix(model: &PredicateModel, variant: Variant, s: usize, a: i64) -> bool {
    let dom = model.domain().at(0);
    match variant {
        Variant::A => {
            let succ = model.letter_index(letters::SUCC).unwrap();
            dom.iter().any(|&b| model.holds(0, succ, &[a, b]))
        }
        Variant::APrime => {
            let r = r_blackdiamond(model, Marker::Sep).unwrap();
            let x = model.letter_index(&letters::tile(s + 1)).unwrap();
            let y = model.letter_index(&letters::tile(s + 2)).unwrap();
            let found = r.successors(0).any(|v| model.holds(v, x, &[a]) && dom.iter().any(|&b| model.holds(v, y, &[b])));
            found
        }
        _ => {
            let beta = ArithmeticBeta::new(model, s).unwrap();
            let found = beta
                .relation()
                .successors(0)
                .any(|v| beta.beta(s + 1, a, v) && dom.iter().any(|&b| beta.beta(s + 2, b, v)));
            found
        }
    }
}

fn soundness_run(model: &PredicateModel, art: &ReductionArtifact, variant: Variant) -> Result<String, String> {
    let rep: CheckReport = check_artifact(model, art, 0, CheckOptions::default()).map_err(|e| e.to_string())?;
    ensure(!rep.has_false(), || format!("{variant}: False verdict\n{rep}"))?;
    let a1 = rep.conjuncts.iter().find(|c| c.name.starts_with("A_1")).unwrap();
    ensure(a1.verdict == Verdict::True, || format!("{variant}: {a1}"))?;
    let a2 = art.get(2).unwrap();
    let inst = instance_verdicts(model, 0, &a2.formula, CheckOptions::default()).map_err(|e| e.to_string())?;
    let (mut via_tail, mut unknown) = (Vec::new(), Vec::new());
    for &(a, v) in &inst {
        let w = witness_in_prefix(model, variant, art.s(), a);
        ensure(v != Verdict::False, || format!("{variant}: A₂ instance {a} is False"))?;
        ensure(!w || v == Verdict::True, || format!("{variant}: A₂ instance {a} is {v} despite a witness in the prefix"))?;
        match (w, v) {
            (false, Verdict::True) => via_tail.push(a),
            (false, _) => unknown.push(a),
            _ => {}
        }
    }
    let verdicts: Vec<String> = rep.conjuncts.iter().map(|c| format!("{}={}", c.name, c.verdict)).collect();
    Ok(format!(
        "{variant}: [{}]; A₂ instances: {} True with a prefix witness, True through the tail {:?}, Unknown {:?}",
        verdicts.join(" "),
        inst.len() - via_tail.len() - unknown.len(),
        via_tail,
        unknown
    ))
}

fn criterion_2() -> Outcome {
    let (t, _) = common::two_tiles();
    let cert = find_recurrent(&t, 4).ok_or("no recurrent certificate")?;
    ensure(recurrent_certificate(&t, cert.tiling.block()).unwrap().is_some(), || "certificate rejected".into())?;
    let p = cert.tiling;
    let runs = [
        (Variant::A, build_m0(&t, &p, 100, 12).unwrap()),
        (Variant::APrime, build_m0_prime(&t, &p, 100, 12).unwrap()),
        (Variant::AStar, build_m0_star(&t, &p, 8, 12).unwrap()),
    ];
    let mut parts = Vec::new();
    for (v, m) in &runs {
        let art = gen_variant(&t, *v).map_err(|e| e.to_string())?;
        parts.push(soundness_run(m, &art, *v)?);
    }
    Ok(parts.join("; "))
}

fn criterion_3() -> Outcome {
    let cfg = SuiteConfig::default();
    let mut total = 0;
    let mut names = BTreeSet::new();
    for (t, p) in [one_tile(), common::two_tiles(), common::three_tiles()] {
        let reps = run_suites(&t, &p, &cfg).map_err(|e| e.to_string())?;
        for r in &reps {
            ensure(r.ok(), || format!("|T|={}: {r}; examples {:?}", t.len(), r.examples))?;
            ensure(r.checked > 0 || r.name.contains("irreflexive") || r.name.contains("transitive"), || {
                format!("|T|={}: {} checked nothing", t.len(), r.name)
            })?;
            total += r.checked;
            names.insert(r.name.clone());
        }
    }
    for needed in ["(1)", "(2)", "(3)", "(4)", "(5)", "(6)", "(7)", "(8)"] {
        ensure(names.iter().any(|n| n.starts_with(needed)), || format!("suite {needed} missing"))?;
    }
    ensure(names.iter().any(|n| n.contains("R_⧈ irreflexive")), || "R_⧈ irreflexivity missing".into())?;
    ensure(names.iter().any(|n| n.contains("R_⧈ transitive")), || "R_⧈ transitivity missing".into())?;
    Ok(format!("{} reports over 3 tile sets, {total} obligations, zero violations", names.len()))
}

fn criterion_4() -> Outcome {
    let mut n = 0;
    for (t, p) in [common::two_tiles(), common::three_tiles(), checkerboard()] {
        for v in [Variant::A, Variant::AStar] {
            let r = roundtrip(&t, &p, v, 8, 8, None).map_err(|e| e.to_string())?;
            ensure(r.diffs.is_empty(), || format!("{v}, |T|={}: {:?}", t.len(), r.diffs))?;
            ensure(r.extraction.report.ok(), || format!("{v}, |T|={}: T₁/T₂ violated", t.len()))?;
            ensure(r.extraction.grid.width() == 8 && r.extraction.grid.height() == 8, || "window not 8x8".into())?;
            n += 1;
        }
    }
    Ok(format!("{n} roundtrips of 8x8 windows (M0 and M0* for 3 tile sets), all exact and matching"))
}

fn no_false(model: &PredicateModel, art: &ReductionArtifact, world: usize, what: &str) -> Result<String, String> {
    let rep = check_artifact(model, art, world, CheckOptions::default()).map_err(|e| e.to_string())?;
    ensure(!rep.has_false(), || format!("{what}: False verdict\n{rep}"))?;
    let t = rep.conjuncts.iter().filter(|c| c.verdict == Verdict::True).count();
    Ok(format!("{what}: no False ({t} True)"))
}

fn criterion_5() -> Outcome {
    let (t, p) = common::two_tiles();
    let plus = gen_variant(&t, Variant::APlus).map_err(|e| e.to_string())?;
    let star = build_m0_star(&t, &p, 8, 12).unwrap();
    let n = star.frame().len();
    let mut parts = Vec::new();
    let lt = star.rebase(Frame::nat(n, ReflexiveSet::None).unwrap()).unwrap();
    parts.push(no_false(&lt, &plus, 0, "A⁺ on <")?);
    let set: BTreeSet<usize> = [1, 4, 7].into();
    let some = star.rebase(Frame::nat(n, ReflexiveSet::Some(set)).unwrap()).unwrap();
    parts.push(no_false(&some, &plus, 0, "A⁺ on R{1,4,7}")?);
    let bullet = gen_variant(&t, Variant::ABullet).map_err(|e| e.to_string())?;
    let ord = build_ordinal(&t, &p, 2, 1, 40, 12).unwrap();
    parts.push(no_false(&ord, &bullet, 0, "A• on ω·2+1")?);
    let b = gen_variant(&t, Variant::B).map_err(|e| e.to_string())?;
    let dense = build_dense(&t, &p, 12, 1, 12).unwrap();
    ensure(dense.frame().chain().len() == 12 && dense.frame().len() == 24, || "dense layout".into())?;
    parts.push(no_false(&dense, &b, dense.frame().chain()[0], "B on dense 12+12")?);
    Ok(parts.join("; "))
}

fn refutes(frame: &Frame, f: &Formula, world: Option<usize>) -> Result<bool, String> {
    let opts = SearchOptions { world, ..SearchOptions::default() };
    countermodel_search(frame, f, &opts).map(|c| c.is_some()).map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    let z = gen_separation(Separation::Z);
    let refl = gen_separation(Separation::Ref);
    ensure(refutes(&Frame::nat(1, ReflexiveSet::None).unwrap(), &refl, None)?, || "ref not refuted on <1".into())?;
    ensure(!refutes(&Frame::nat(1, ReflexiveSet::All).unwrap(), &z, None)?, || "Z refuted on 1 reflexive world".into())?;
    for n in 2..=6 {
        ensure(refutes(&Frame::nat(n, ReflexiveSet::All).unwrap(), &z, None)?, || format!("Z holds on reflexive {n}"))?;
    }
    for n in 1..=6 {
        ensure(!refutes(&Frame::nat(n, ReflexiveSet::None).unwrap(), &z, None)?, || {
            format!("Z refuted on irreflexive {n}")
        })?;
    }
    let mut gn = 0;
    for n in 0..=3u32 {
        let f = gen_separation(Separation::BoxIterRef(n));
        let k = n as usize;
        for len in k + 1..=k + 3 {
            ensure(refutes(&Frame::gn(k + 1, len).unwrap(), &f, Some(0))?, || format!("□^{n}ref holds on G_{} len {len}", k + 1))?;
            ensure(!refutes(&Frame::gn(k, len).unwrap(), &f, Some(0))?, || format!("□^{n}ref refuted on G_{k} len {len}"))?;
            gn += 2;
        }
    }
    Ok(format!("ref refuted on <1; Z refuted on reflexive 2..6, none on 1; none on irreflexive 1..6; {gn} G_n/G_n+1 searches as expected"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let ag = common::agreement(&mut rng, 1000);
    ensure(ag.disagreements.is_empty(), || format!("{} disagreements, e.g. {}", ag.disagreements.len(), ag.disagreements[0]))?;
    let mono = common::monotonicity(&mut rng, 100);
    ensure(mono.flips.is_empty(), || format!("{} flips, e.g. {}", mono.flips.len(), mono.flips[0]))?;
    ensure(mono.definite_both > 0, || "no definite pairs".into())?;
    Ok(format!(
        "{} models / {} agreements; {} prefix pairs, {} definite on both, {} resolved by extension, 0 flips",
        ag.models, ag.checked, mono.pairs, mono.definite_both, mono.resolved
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome, Duration); 7] = [
        ("1 syntactic claims", criterion_1, Duration::from_secs(1)),
        ("2 witness-model soundness", criterion_2, Duration::from_secs(120)),
        ("3 proof-property suites", criterion_3, Duration::from_secs(60)),
        ("4 roundtrip", criterion_4, Duration::from_secs(30)),
        ("5 variant frames", criterion_5, Duration::from_secs(120)),
        ("6 separation suite", criterion_6, Duration::from_secs(120)),
        ("7 evaluator integrity", criterion_7, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let res = match res {
            Ok(msg) if took > budget => Err(format!("{msg}; took {took:?}, budget {budget:?}")),
            other => other,
        };
        match res {
            Ok(msg) => {
                let _ = writeln!(err, "criterion {name}: PASS ({:.2}s) {msg}", took.as_secs_f64());
            }
            Err(msg) => {
                let _ = writeln!(err, "criterion {name}: FAIL ({:.2}s) {msg}", took.as_secs_f64());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
