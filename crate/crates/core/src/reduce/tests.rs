use std::sync::Arc;

use super::*;
use crate::coxeter::{build_system, CoxeterSystem};
use crate::generate::corpus_sequential;
use crate::map::{digest, glue, parse, Dart};
use crate::trace::verify_trace;

fn sys(f: Family, n: usize) -> Arc<CoxeterSystem> {
    Arc::new(build_system(f, n).unwrap())
}

fn round_trip(s: &Arc<CoxeterSystem>, count: usize, size: usize, seed: u64) -> Vec<Reduction> {
    let rules = RuleSet::builtin(s);
    let mut out = Vec::new();
    for d in corpus_sequential(s, count, size, seed, &rules) {
        let r = reduce_with(&d, &rules, &ReduceOptions::default())
            .unwrap_or_else(|e| panic!("{e}\n{}", crate::map::serialize(&d)));
        let v = verify_trace(&d, &r.trace, &rules);
        assert!(v.ok, "{v:?}");
        out.push(r);
    }
    out
}

#[test]
fn trick_patches_close_up_to_the_relation() {
    for (n, lo) in [(3, 1), (4, 1), (4, 2)] {
        let s = sys(Family::A, n);
        let rules = RuleSet::builtin(&s);
        let p = trick_patches(&s, lo, &rules).unwrap();
        assert_eq!((p.r.vertex_count(), p.p2.vertex_count()), (3, 11));
        assert_eq!(p.r.count_type(lo, lo + 1), 2);
        assert_eq!(p.p2.count_type(lo, lo + 1), 2);
        let name = if lo == 1 { "a3".to_string() } else { format!("a3.{lo}") };
        let t = rules.template(&name).unwrap();
        let closed = glue(&p.r, &p.p2).unwrap();
        assert_eq!(digest(&closed), digest(&glue(&t.sides[0], &t.sides[1]).unwrap()));
    }
}

#[test]
fn empty_diagram_has_an_empty_trace() {
    let s = sys(Family::I, 5);
    let t = reduce(&Diagram::new(s.clone()), &RuleSet::empty()).unwrap();
    assert!(t.entries.is_empty());
}

#[test]
fn fully_glued_pair_cancels_in_one_macro() {
    let d = parse("group I 3\nvertex 1 1 2\nvertex 2 1 2\nedge 1.0 2.0\nedge 1.1 2.5\nedge 1.2 2.4\nedge 1.3 2.3\nedge 1.4 2.2\nedge 1.5 2.1\n")
        .unwrap();
    assert!(d.is_valid(), "{:?}", d.validate());
    let t = reduce_dihedral(&d, &RuleSet::empty()).unwrap();
    assert_eq!(t.entries.len(), 1);
}

#[test]
fn dihedral_corpora_reduce() {
    for m in 2..=6 {
        round_trip(&sys(Family::I, m), 6, 12, m as u64);
    }
}

#[test]
fn braid_corpora_reduce_two_vertices_per_iteration() {
    for m in 2..=5 {
        for r in round_trip(&sys(Family::BraidI, m), 6, 10, m as u64) {
            let v = crate::trace::Trace::primitives(&r.trace).iter().filter(|o| o.rule() == "cancel_pair").count();
            assert_eq!(r.iterations, v);
        }
    }
}

#[test]
fn a3_corpus_reduces() {
    round_trip(&sys(Family::A, 3), 6, 8, 3);
}

#[test]
fn a4_corpus_reduces() {
    round_trip(&sys(Family::A, 4), 4, 10, 4);
}

fn a_rules(n: usize) -> (Arc<CoxeterSystem>, RuleSet) {
    let s = sys(Family::A, n);
    let r = RuleSet::builtin(&s);
    (s, r)
}

fn blue_face_sizes(d: &Diagram) -> Vec<(Vec<Dart>, usize)> {
    crate::map::color_faces(d, 1)
        .into_iter()
        .map(|f| {
            let n = f.len();
            (f, n)
        })
        .collect()
}

#[test]
fn trick_shrinks_the_chosen_face_by_one() {
    let (s, rules) = a_rules(3);
    let mut applied = 0;
    for seed in 0..40 {
        let d = crate::generate::braid_cycle(&s, seed, 6, 12).unwrap();
        for (f, n) in blue_face_sizes(&d) {
            for &a in &f {
                let Dart::V(x, _) = a else { continue };
                let Ok(e) = apply_trick(&d, &rules, TrickSite { arc: a }) else { continue };
                applied += 1;
                assert!(e.is_valid());
                assert!(e.count_type(1, 2) <= d.count_type(1, 2));
                // other nodes of the face survive and now bound a face one smaller
                let after = crate::map::color_faces(&e, 1);
                for z in f.iter().filter(|z| matches!(z, Dart::V(v, _) if *v != x && e.vertices.contains_key(v))) {
                    let g = after.iter().find(|g| g.contains(z)).unwrap();
                    assert_eq!(g.len() + 1, n);
                }
            }
        }
    }
    assert!(applied > 20, "{applied}");
}

#[test]
fn trick_needs_one_crossing_and_a_larger_face() {
    let (s, rules) = a_rules(3);
    let mut digons = 0;
    for seed in 0..40 {
        let d = crate::generate::braid_cycle(&s, seed, 6, 12).unwrap();
        for (f, n) in blue_face_sizes(&d) {
            if n == 2 {
                for &a in &f {
                    assert!(apply_trick(&d, &rules, TrickSite { arc: a }).is_err());
                    digons += 1;
                }
            }
        }
    }
    assert!(digons > 0);
}

#[test]
fn trick_is_undone_by_the_reverse_exchange() {
    let (s, rules) = a_rules(3);
    let p = trick_patches(&s, 1, &rules).unwrap();
    let red = |g: &Diagram, _: Option<usize>| reduce(g, &rules).map_err(|e| RuleError::Stuck(e.to_string()));
    let back = crate::rules::make_certificate(&p.p2, &p.r, &rules, None, &red).unwrap();
    for seed in 0..20 {
        let d = crate::generate::braid_cycle(&s, seed, 6, 10).unwrap();
        let Some(a) = d.darts().into_iter().find(|&a| apply_trick(&d, &rules, TrickSite { arc: a }).is_ok()) else {
            continue;
        };
        let e = apply_trick(&d, &rules, TrickSite { arc: a }).unwrap();
        let fresh: Vec<_> = e.vertices.keys().copied().filter(|v| !d.vertices.contains_key(v)).collect();
        assert_eq!(fresh.len(), 11);
        let (cut, region) = crate::map::cut_patch(&e, &fresh).unwrap();
        let k = (0..cut.boundary.len())
            .find(|&k| digest(&crate::map::rotate_boundary(&p.p2, k)) == digest(&cut))
            .expect("the new vertices form the long side");
        let patch = crate::map::rotate_boundary(&p.r, k);
        let (restored, _) = crate::rules::replace_patch_certified(&e, &region, &patch, &back, &rules).unwrap();
        assert_eq!(digest(&restored), digest(&d));
        return;
    }
    panic!("no trick site found");
}

#[test]
fn normalization_leaves_at_most_one_next_color_crossing() {
    let mut seen = (0, 0);
    for n in [4, 5] {
        let (s, rules) = a_rules(n);
        for seed in 0..30 {
            let d = crate::generate::braid_cycle(&s, seed, 10, 30).unwrap();
            let g = crate::map::color_subgraph(&d, 1);
            for arc in g.arcs.iter().filter(|a| !a.closed && a.crossings.len() >= 2) {
                let Dart::V(x, _) = arc.start else { continue };
                if matches!(arc.end, Dart::V(y, _) if y == x) {
                    continue;
                }
                let colors: Vec<Gen> = arc.crossings.iter().map(|&(v, t)| d.vertex(v).color((t + 1) % 4)).collect();
                let threes = colors.iter().filter(|&&c| c == 3).count();
                let e = normalize_crossings_on_edge(&d, &rules, arc.start).unwrap();
                let (_, ch) = crate::map::walk(&e, arc.start, 1);
                assert!(ch.len() <= 1);
                if let Some(&(v, t)) = ch.first() {
                    assert_eq!(e.vertex(v).color((t + 1) % 4), 3);
                }
                if threes == 0 {
                    assert!(ch.is_empty());
                    seen.0 += 1;
                } else if threes >= 2 {
                    seen.1 += 1;
                }
            }
        }
    }
    assert!(seen.0 > 0 && seen.1 > 0, "{seen:?}");
}

#[test]
fn impossible_digons_have_nontrivial_boundaries() {
    let s = sys(Family::A, 3);
    assert!(an::digon_possible(&s, 1, 0, 0));
    for (a, b) in [(1, 0), (0, 1), (1, 1)] {
        assert!(!an::digon_possible(&s, 1, a, b));
    }
}

#[test]
fn measures_do_not_increase_across_phases() {
    let (s, rules) = a_rules(4);
    for seed in 0..15 {
        let d = crate::generate::braid_cycle(&s, seed, 10, 30).unwrap();
        let r = reduce_with(&d, &rules, &ReduceOptions::default()).unwrap();
        for w in r.measures.chunks(3) {
            assert!(w.windows(2).all(|p| p[1] <= p[0]), "{w:?}");
            if w[0].nodes > 0 {
                assert!(w[1] < w[0]);
            }
        }
    }
}

#[test]
fn blue_crossings_alone_are_removed_before_recursing() {
    let d = parse("group A 3\nvertex 1 1 3\nvertex 2 1 3\nedge 1.0 2.0\nedge 1.1 2.3\nedge 1.2 2.2\nedge 1.3 2.1\n").unwrap();
    let rules = RuleSet::builtin(&d.sys);
    let r = reduce_an(&d, &rules).unwrap();
    assert!(verify_trace(&d, &r.trace, &rules).ok);
    assert!(!r.trace.rule_counts().contains_key("patch_replace"));
}

#[test]
fn a2_uses_the_dihedral_base_case() {
    let s = sys(Family::A, 2);
    let rules = RuleSet::builtin(&s);
    for d in corpus_sequential(&s, 5, 10, 2, &rules) {
        let r = reduce_an(&d, &rules).unwrap();
        assert!(r.measures.is_empty());
    }
}

#[test]
fn braid_cycles_in_a4_reduce() {
    let (s, rules) = a_rules(4);
    for seed in 0..20 {
        let d = crate::generate::braid_cycle(&s, seed, 10, 40).unwrap();
        let t = reduce(&d, &rules).unwrap();
        assert!(verify_trace(&d, &t, &rules).ok);
    }
}

#[test]
fn varied_angles_on_a_glued_pair() {
    let p = parse("group BI 3\nvertex 1 1 2 out@0\nboundary 1.0 1.1 1.2 1.3 1.4 1.5\n").unwrap();
    let d = glue(&p, &p).unwrap();
    assert_eq!(d.vertex_count(), 2);
    let site = find_adjacent_varied_angles(&d).expect("a digon with two varied corners");
    assert_eq!(site.face_size, 2);
    let r = reduce_braid_dihedral(&d, &RuleSet::empty()).unwrap();
    assert_eq!(r.iterations, 1);
}

#[test]
fn no_varied_site_on_empty() {
    assert!(find_adjacent_varied_angles(&Diagram::new(sys(Family::BraidI, 3))).is_none());
}

#[test]
fn bfs_examples() {
    let d = parse("group I 3\nvertex 1 1 2\nvertex 2 1 2\nedge 1.0 2.0\nedge 1.1 2.5\nedge 1.2 2.4\nedge 1.3 2.3\nedge 1.4 2.2\nedge 1.5 2.1\n")
        .unwrap();
    let rules = RuleSet::empty();
    let sig = d.boundary_signature();
    let none = bfs_equivalence(&sig, &d, |x| x == &d, 10, &rules, &SearchMove::DEFAULT).unwrap();
    assert!(none.is_empty());
    let path = bfs_equivalence(&sig, &d, |x| x.is_empty(), 10_000, &rules, &SearchMove::DEFAULT).unwrap();
    assert_eq!(path.last().map(|o| o.rule()), Some("cancel_pair"));
    assert!(path.iter().all(|o| o.rule() == "bridge" || o.rule() == "cancel_pair"));
    let mut e = d.clone();
    for op in &path {
        crate::rules::apply_op(&mut e, op, &rules).unwrap();
    }
    assert!(e.is_empty());
    let far = &corpus_sequential(&d.sys, 1, 8, 1, &rules)[0];
    let err = bfs_equivalence(&sig, far, |x| x.is_empty(), 1, &rules, &SearchMove::DEFAULT).unwrap_err();
    assert_eq!(err, RuleError::Budget(1));
}

fn product_sys(a: &CoxeterSystem, b: &CoxeterSystem) -> Arc<CoxeterSystem> {
    Arc::new(CoxeterSystem::product(a, b).unwrap())
}

#[test]
fn commuting_crossings_slide_apart() {
    let a1 = build_system(Family::A, 1).unwrap();
    let s = product_sys(&a1, &a1);
    let text = format!("{}\nvertex 1 1 2\nvertex 2 1 2\nedge 1.0 2.0\nedge 1.1 2.3\nedge 1.2 2.2\nedge 1.3 2.1\n", s.header());
    let d = parse(&text).unwrap();
    assert_eq!(Strategy::for_system(&d.sys), Strategy::Product);
    let r = reduce_product(&d, &RuleSet::empty(), None).unwrap();
    assert!(verify_trace(&d, &r.trace, &RuleSet::empty()).ok);
}

#[test]
fn product_of_dihedral_factors_reduces() {
    let i3 = build_system(Family::I, 3).unwrap();
    let s = product_sys(&i3, &i3);
    let rules = RuleSet::empty();
    for d in corpus_sequential(&s, 8, 12, 5, &rules) {
        let r = reduce_product(&d, &rules, None).unwrap();
        assert!(verify_trace(&d, &r.trace, &rules).ok);
    }
}

#[test]
fn non_commuting_partition_is_rejected() {
    let (s, rules) = a_rules(3);
    let d = crate::generate::braid_cycle(&s, 1, 6, 8).unwrap();
    let parts = [vec![1], vec![2, 3]];
    let e = reduce_product(&d, &rules, Some(&parts)).unwrap_err();
    assert!(e.message.contains("commute"), "{}", e.message);
}

#[test]
fn budget_exhaustion_keeps_a_partial_trace() {
    let (s, rules) = a_rules(3);
    let d = crate::generate::braid_cycle(&s, 2, 6, 10).unwrap();
    let opts = ReduceOptions { strategy: None, budget: Some(5) };
    let e = reduce_with(&d, &rules, &opts).unwrap_err();
    assert_eq!(e.kind, FailureKind::Budget);
    let v = crate::trace::verify_and_replay(&d, &e.partial, &rules);
    assert!(v.0.ok);
    assert_eq!(digest(&v.1), digest(&e.state));
}
