//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero when any fails. Oracles here are independent of the library:
//! permutation actions written out by hand and brute-force enumeration.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use coxdiag::coxeter::{
    longest_element, reduce_first_generator, reduced_words, rex_graph, CoxeterSystem, Family, Gen, LengthTable,
};
use coxdiag::generate::{braid_cycle, corpus};
use coxdiag::map::{canonical_code, glue, Diagram};
use coxdiag::io::stats;
use coxdiag::reduce::{find_adjacent_varied_angles, reduce, reduce_an, reduce_braid_dihedral, reduce_dihedral};
use coxdiag::rules::{
    apply_op, commuting_template, find_matches, inverse_op, read_template_dir, Match, RuleKind, RuleSet,
};
use coxdiag::trace::{expand_macros, parse_trace, serialize_trace, verify_trace};

use common::{random_patch, sys};

type Outcome = Result<String, String>;

/// Permutation of `0..=n` for a word in A_n: `g_i` swaps `i - 1` and `i`.
fn perm_a(n: usize, word: &[Gen]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..=n).collect();
    for &g in word {
        p.swap(g as usize - 1, g as usize);
    }
    p
}

/// Action of a word of I_m on the vertices of an m-gon: `g_1` is `x -> -x`,
/// `g_2` is `x -> 1 - x`. Faithful for m >= 3.
fn perm_i(m: usize, word: &[Gen]) -> Vec<usize> {
    (0..m)
        .map(|x| {
            word.iter().rev().fold(x, |x, &g| match g {
                1 => (m - x) % m,
                _ => (m + 1 - x) % m,
            })
        })
        .collect()
}

fn trivial_by_oracle(sys: &CoxeterSystem, word: &[Gen]) -> bool {
    match sys.family {
        Family::A => perm_a(sys.rank, word).iter().enumerate().all(|(i, &x)| i == x),
        Family::I => {
            let m = sys.m(1, 2).unwrap() as usize;
            perm_i(m, word).iter().enumerate().all(|(i, &x)| i == x)
        }
        _ => panic!("no oracle for {}", sys.header()),
    }
}

/// Corpus with a spread of sizes: targets step up to `max_v * 4 / 5` so every
/// diagram stays within `max_v` vertices.
fn spread_corpus(sys: &Arc<CoxeterSystem>, count: usize, max_v: usize, seed: u64, rules: &RuleSet) -> Vec<Diagram> {
    let top = max_v * 4 / 5;
    let targets = [top / 4, top / 2, top * 3 / 4, top];
    let mut out = Vec::new();
    for (k, &t) in targets.iter().enumerate() {
        let n = count / 4 + usize::from(k < count % 4);
        out.extend(corpus(sys, n, t.max(2), seed.wrapping_add(k as u64 * 1000), rules));
    }
    out
}

fn words(gens: usize, max_len: usize) -> Vec<Vec<Gen>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in 1..=gens as Gen {
                let mut x: Vec<Gen> = w.clone();
                x.push(g);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let x = f();
    (x, t.elapsed())
}

fn dihedral_soundness() -> Outcome {
    let mut worst = Duration::ZERO;
    let mut total = 0;
    for m in 2..=10 {
        let s = sys(Family::I, m);
        let rules = RuleSet::builtin(&s);
        for d in spread_corpus(&s, 200, 40, m as u64, &rules) {
            if d.vertex_count() > 40 {
                return Err(format!("I{m}: corpus diagram with {} vertices", d.vertex_count()));
            }
            let (r, dt) = timed(|| reduce_dihedral(&d, &rules));
            let t = r.map_err(|e| format!("I{m}: {e}"))?;
            if !verify_trace(&d, &t, &rules).ok {
                return Err(format!("I{m}: trace does not verify"));
            }
            if dt >= Duration::from_secs(1) {
                return Err(format!("I{m}: {dt:?} on V={}", d.vertex_count()));
            }
            worst = worst.max(dt);
            total += 1;
        }
    }
    Ok(format!("{total} diagrams, slowest {worst:?}"))
}

fn a_family_soundness() -> Outcome {
    let mut worst = Duration::ZERO;
    let mut total = 0;
    for n in 2..=4 {
        let s = sys(Family::A, n);
        let rules = RuleSet::builtin(&s);
        for d in spread_corpus(&s, 100, 24, 100 + n as u64, &rules) {
            if d.vertex_count() > 24 {
                return Err(format!("A{n}: corpus diagram with {} vertices", d.vertex_count()));
            }
            let (r, dt) = timed(|| reduce_an(&d, &rules));
            let r = r.map_err(|e| format!("A{n}: {e}"))?;
            if !verify_trace(&d, &r.trace, &rules).ok {
                return Err(format!("A{n}: trace does not verify"));
            }
            if dt >= Duration::from_secs(30) {
                return Err(format!("A{n}: {dt:?}"));
            }
            worst = worst.max(dt);
            total += 1;
        }
    }
    Ok(format!("{total} diagrams, slowest {worst:?}"))
}

fn braid_corpora() -> Vec<(usize, Vec<Diagram>)> {
    (2..=8)
        .map(|m| {
            let s = sys(Family::BraidI, m);
            (m, spread_corpus(&s, 200, 40, 200 + m as u64, &RuleSet::empty()))
        })
        .collect()
}

fn braid_soundness(corpora: &[(usize, Vec<Diagram>)]) -> Outcome {
    let mut worst = Duration::ZERO;
    for (m, ds) in corpora {
        for d in ds {
            if d.vertex_count() > 40 {
                return Err(format!("BI{m}: corpus diagram with {} vertices", d.vertex_count()));
            }
            let (r, dt) = timed(|| reduce_braid_dihedral(d, &RuleSet::empty()));
            let r = r.map_err(|e| format!("BI{m}: {e}"))?;
            if r.iterations * 2 != d.vertex_count() {
                return Err(format!("BI{m}: {} iterations for V={}", r.iterations, d.vertex_count()));
            }
            if !verify_trace(d, &r.trace, &RuleSet::empty()).ok {
                return Err(format!("BI{m}: trace does not verify"));
            }
            if dt >= Duration::from_secs(1) {
                return Err(format!("BI{m}: {dt:?}"));
            }
            worst = worst.max(dt);
        }
    }
    Ok(format!("{} diagrams, slowest {worst:?}", corpora.iter().map(|c| c.1.len()).sum::<usize>()))
}

/// Per connected component, since the face count of a disjoint union adds 2
/// per component.
fn euler_identities(corpora: &[(usize, Vec<Diagram>)]) -> Outcome {
    let mut comps = 0;
    for (n, ds) in corpora {
        for d in ds {
            let r = stats(d);
            for c in &r.components {
                if c.e != n * c.v || c.f != (n - 1) * c.v + 2 {
                    return Err(format!("BI{n}: component V={} E={} F={}", c.v, c.e, c.f));
                }
                comps += 1;
            }
            let v = d.vertex_count();
            if r.uniform_angles() != (2 * n - 2) * v {
                return Err(format!("BI{n}: {} uniform angles for V={v}", r.uniform_angles()));
            }
        }
    }
    Ok(format!("{comps} components"))
}

fn varied_angles(corpora: &[(usize, Vec<Diagram>)]) -> Outcome {
    let mut n = 0;
    for (m, ds) in corpora {
        for d in ds.iter().filter(|d| !d.vertices.is_empty()) {
            if find_adjacent_varied_angles(d).is_none() {
                return Err(format!("BI{m}: no site on V={}", d.vertex_count()));
            }
            n += 1;
        }
    }
    Ok(format!("{n} nonempty diagrams"))
}

fn first_generator() -> Outcome {
    let mut checked = 0;
    for (n, len) in [(3, 8), (4, 6)] {
        let s = sys(Family::A, n);
        for w in words(n, len) {
            let out = reduce_first_generator(&s, &w).map_err(|e| e.to_string())?;
            if out.iter().filter(|&&g| g == 1).count() > 1 || perm_a(n, &out) != perm_a(n, &w) {
                return Err(format!("A{n}: {w:?} -> {out:?}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} words"))
}

fn trivial_boundaries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let systems = [sys(Family::A, 3), sys(Family::A, 4), sys(Family::I, 5)];
    let pools: Vec<Vec<Diagram>> =
        systems.iter().map(|s| spread_corpus(s, 40, 32, 300, &RuleSet::builtin(s))).collect();
    let mut count = 0;
    let mut tries = 0;
    while count < 500 {
        tries += 1;
        if tries > 50_000 {
            return Err(format!("only {count} patches with a boundary"));
        }
        let k = rng.gen_range(0..systems.len());
        let Some(d) = pools[k].choose(&mut rng) else { continue };
        let size = rng.gen_range(1..=12);
        let Some(p) = random_patch(d, &mut rng, size) else { continue };
        let Ok(w) = p.boundary_word() else { continue };
        if !trivial_by_oracle(&systems[k], &w) {
            return Err(format!("{}: boundary {w:?}", systems[k].header()));
        }
        count += 1;
    }
    Ok(format!("{count} patches"))
}

fn rule_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut hosts: Vec<(Diagram, RuleSet)> = Vec::new();
    let systems = [
        sys(Family::I, 2),
        sys(Family::I, 3),
        sys(Family::I, 5),
        sys(Family::A, 3),
        sys(Family::A, 4),
        sys(Family::BraidI, 3),
        sys(Family::BraidI, 4),
    ];
    for s in &systems {
        let rules = RuleSet::builtin(s);
        for d in spread_corpus(s, 40, 24, 400, &rules) {
            for _ in 0..4 {
                let k = rng.gen_range(1..=8);
                if let Some(p) = random_patch(&d, &mut rng, k) {
                    hosts.push((p, rules.clone()));
                }
            }
            hosts.push((d, rules.clone()));
        }
    }
    // inflated corpora rarely hold a strand across a whole block of spokes;
    // template sides and braid cycles do
    for m in 2..=6 {
        let t = commuting_template(m).map_err(|e| e.to_string())?;
        for side in &t.sides {
            hosts.push((side.clone(), RuleSet::builtin(&side.sys)));
        }
    }
    for n in [3, 4, 5] {
        let s = sys(Family::A, n);
        let rules = RuleSet::builtin(&s);
        for seed in 0..10 {
            let d = braid_cycle(&s, seed, 2 * n, 12).map_err(|e| e.to_string())?;
            for _ in 0..4 {
                let k = rng.gen_range(2..=10);
                if let Some(p) = random_patch(&d, &mut rng, k) {
                    hosts.push((p, rules.clone()));
                }
            }
            hosts.push((d, rules.clone()));
        }
    }
    let primitive = [
        RuleKind::CircleAdd,
        RuleKind::CircleRemove,
        RuleKind::Bridge,
        RuleKind::CancelPair,
        RuleKind::ZamCommuting,
        RuleKind::ZamA3,
    ];
    let mut report = Vec::new();
    for kind in primitive {
        let sites: Vec<(usize, Match)> = hosts
            .iter()
            .enumerate()
            .flat_map(|(i, (d, rules))| find_matches(d, kind, rules).into_iter().map(move |m| (i, m)))
            .collect();
        if sites.is_empty() {
            return Err(format!("{kind}: no sites in the host pool"));
        }
        for _ in 0..1000 {
            let (i, m) = sites.choose(&mut rng).unwrap();
            let (d, rules) = &hosts[*i];
            let Match::Primitive(op) = m else { return Err(format!("{kind}: non-primitive match")) };
            let mut q = d.clone();
            apply_op(&mut q, op, rules).map_err(|e| format!("{kind} at {:?}: {e}", op.site()))?;
            if let Some(v) = q.validate().first() {
                return Err(format!("{kind}: {}: {}", v.kind, v.detail));
            }
            if format!("{:?}", q.boundary_signature()) != format!("{:?}", d.boundary_signature()) {
                return Err(format!("{kind}: boundary signature changed"));
            }
            let inv = inverse_op(d, op, rules).map_err(|e| format!("{kind}: {e}"))?;
            apply_op(&mut q, &inv, rules).map_err(|e| format!("{kind} inverse: {e}"))?;
            if canonical_code(&q) != canonical_code(d) {
                return Err(format!("{kind}: inverse does not restore the code"));
            }
        }
        report.push(format!("{kind} ({} sites)", sites.len()));
    }
    Ok(format!("1000 each: {}", report.join(", ")))
}

fn rules_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../rules")
}

fn template_soundness() -> Outcome {
    let templates = read_template_dir(&rules_dir()).map_err(|e| e.to_string())?;
    let mut names = Vec::new();
    for t in &templates {
        let s = t.sides[0].sys.clone();
        let mut rules = RuleSet::builtin(&s);
        for u in &templates {
            if u.sides[0].sys == s {
                rules.insert(u.clone());
            }
        }
        // glue reflects its second argument
        let g = glue(&t.sides[0], &t.sides[1]).map_err(|e| format!("{}: {e}", t.name))?;
        let trace = reduce(&g, &rules).map_err(|e| format!("{}: {e}", t.name))?;
        if !verify_trace(&g, &trace, &rules).ok {
            return Err(format!("{}: trace does not verify", t.name));
        }
        names.push(t.name.clone());
    }
    let want = ["a1xi2", "a1xi3", "a1xi4", "a1xi5", "a1xi6", "a3"];
    if want.iter().any(|w| !names.iter().any(|n| n == w)) {
        return Err(format!("templates found: {names:?}"));
    }
    Ok(names.join(", "))
}

fn rex_facts() -> Outcome {
    for (n, want) in [(2, 2), (3, 16)] {
        let s = sys(Family::A, n);
        let w0 = longest_element(&s).map_err(|e| e.to_string())?;
        let len = LengthTable::new(&s).map_err(|e| e.to_string())?.length(&w0);
        let lib = reduced_words(&s, &w0, len).map_err(|e| e.to_string())?;
        // the longest element of A_n reverses 0..=n
        let rev: Vec<usize> = (0..=n).rev().collect();
        let brute = words(n, len).into_iter().filter(|w| w.len() == len && perm_a(n, w) == rev).count();
        if lib.len() != want || brute != want {
            return Err(format!("A{n}: library {} brute force {brute}", lib.len()));
        }
        if !rex_graph(&s, &w0).map_err(|e| e.to_string())?.is_connected() {
            return Err(format!("A{n}: rex graph disconnected"));
        }
    }
    for m in 2..=8 {
        let s = sys(Family::I, m);
        let g = rex_graph(&s, &longest_element(&s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if !g.is_connected() {
            return Err(format!("I{m}: rex graph disconnected"));
        }
    }
    Ok("A2: 2, A3: 16; connected for A2, A3, I2..I8".into())
}

fn trace_integrity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut items = Vec::new();
    for (f, n) in [(Family::I, 3), (Family::I, 6), (Family::A, 3), (Family::A, 4), (Family::BraidI, 3)] {
        let s = sys(f, n);
        let rules = RuleSet::builtin(&s);
        for d in corpus(&s, 20, 14, 500, &rules) {
            let t = reduce(&d, &rules).map_err(|e| e.to_string())?;
            items.push((d, t, rules.clone()));
        }
    }
    let mut tampers = 0;
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    for (d, t, rules) in &items {
        let flat = expand_macros(t).map_err(|e| e.to_string())?;
        if flat.initial != t.initial || flat.final_code != t.final_code || !verify_trace(d, &flat, rules).ok {
            return Err("expanded trace does not verify".into());
        }
        let text = serialize_trace(t);
        if !parse_trace(&text).is_ok_and(|t2| verify_trace(d, &t2, rules).ok) {
            return Err("untampered trace rejected".into());
        }
        for _ in 0..10 {
            let mut bytes = text.clone().into_bytes();
            let i = rng.gen_range(0..bytes.len());
            let old = bytes[i];
            while bytes[i] == old {
                bytes[i] = rng.gen();
            }
            let verdict = match String::from_utf8(bytes) {
                Err(_) => "not utf-8",
                Ok(s) => match parse_trace(&s) {
                    Err(_) => "parse",
                    Ok(t2) if verify_trace(d, &t2, rules).ok => {
                        return Err(format!("tampered byte {i} accepted"));
                    }
                    Ok(_) => "replay",
                },
            };
            *kinds.entry(verdict).or_insert(0) += 1;
            tampers += 1;
        }
    }
    Ok(format!("{} traces expanded, {tampers} tampers rejected {kinds:?}", items.len()))
}

fn main() -> ExitCode {
    let braid = braid_corpora();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("dihedral soundness", Box::new(dihedral_soundness)),
        ("A-family soundness", Box::new(a_family_soundness)),
        ("braid soundness", Box::new(|| braid_soundness(&braid))),
        ("Euler identities", Box::new(|| euler_identities(&braid))),
        ("varied-angle existence", Box::new(|| varied_angles(&braid))),
        ("first-generator removal", Box::new(first_generator)),
        ("trivial patch boundaries", Box::new(trivial_boundaries)),
        ("rule soundness", Box::new(rule_soundness)),
        ("template soundness", Box::new(template_soundness)),
        ("rex-graph facts", Box::new(rex_facts)),
        ("trace integrity", Box::new(trace_integrity)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (r, dt) = timed(|| std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)));
        let r = r.unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{dt:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}) [{dt:.1?}]", i + 1);
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
