mod common;

use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use coxdiag::coxeter::{is_trivial_word, Family};
use coxdiag::generate::{inflate, InflationPlan};
use coxdiag::io::stats;
use coxdiag::map::{canonical_code, classify_angles, parse, serialize, AngleKind};
use coxdiag::reduce::{find_adjacent_varied_angles, reduce, reduce_braid_dihedral};
use coxdiag::rules::{apply_op, find_matches, inverse_op, Match, Op, RuleKind, RuleSet};
use coxdiag::trace::{expand_macros, parse_trace, serialize_trace, verify_trace};

use common::{random_patch, relabel, sys};

fn family() -> impl Strategy<Value = (Family, usize)> {
    prop_oneof![
        (2usize..=7).prop_map(|m| (Family::I, m)),
        (2usize..=4).prop_map(|n| (Family::A, n)),
        (2usize..=5).prop_map(|m| (Family::BraidI, m)),
    ]
}

/// Word problems are solved for Coxeter groups only.
fn unoriented() -> impl Strategy<Value = (Family, usize)> {
    prop_oneof![(2usize..=7).prop_map(|m| (Family::I, m)), (2usize..=4).prop_map(|n| (Family::A, n))]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn defining_relations_hold(n in 2usize..=5, m in 2usize..=9, i in 1u8..=5, j in 1u8..=5) {
        for s in [sys(Family::A, n), sys(Family::I, m)] {
            let (i, j) = (1 + (i - 1) % s.rank as u8, 1 + (j - 1) % s.rank as u8);
            let k = s.m(i, j).unwrap() as usize;
            let w: Vec<u8> = (0..2 * k).map(|t| if t % 2 == 0 { i } else { j }).collect();
            prop_assert!(is_trivial_word(&s, &w).unwrap());
        }
    }

    #[test]
    fn generated_diagrams_reduce_and_verify((f, n) in family(), seed in any::<u64>(), steps in 1usize..24) {
        let s = sys(f, n);
        let rules = RuleSet::builtin(&s);
        let d = inflate(&s, &InflationPlan::new(seed, steps), &rules);
        prop_assert!(d.is_valid() && d.is_closed());
        prop_assert_eq!(canonical_code(&d), canonical_code(&inflate(&s, &InflationPlan::new(seed, steps), &rules)));
        let t = reduce(&d, &rules).unwrap();
        prop_assert!(verify_trace(&d, &t, &rules).ok);
        let flat = expand_macros(&t).unwrap();
        prop_assert_eq!((&flat.initial, &flat.final_code), (&t.initial, &t.final_code));
        prop_assert!(verify_trace(&d, &flat, &rules).ok);
    }

    #[test]
    fn euler_and_census((f, n) in family(), seed in any::<u64>(), steps in 1usize..30) {
        let s = sys(f, n);
        let d = inflate(&s, &InflationPlan::new(seed, steps), &RuleSet::builtin(&s));
        let r = stats(&d);
        prop_assert!(r.components.iter().all(|c| c.euler == 2));
        prop_assert_eq!(r.total().f, d.faces().len());
        if s.oriented {
            prop_assert_eq!(r.uniform_angles(), (2 * n - 2) * d.vertex_count());
            for &id in d.vertices.keys() {
                let varied = classify_angles(&d).iter().filter(|a| a.0 == id && a.2 == AngleKind::Varied).count();
                prop_assert_eq!(varied, 2);
            }
        }
    }

    #[test]
    fn cut_patches_have_trivial_boundaries((f, n) in unoriented(), seed in any::<u64>(), k in 1usize..10) {
        let s = sys(f, n);
        let d = inflate(&s, &InflationPlan::new(seed, 16), &RuleSet::builtin(&s));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(p) = random_patch(&d, &mut rng, k) {
            prop_assert!(p.is_valid());
            prop_assert!(is_trivial_word(&s, &p.boundary_word().unwrap_or_default()).unwrap());
        }
    }

    #[test]
    fn code_ignores_labels((f, n) in family(), seed in any::<u64>()) {
        let s = sys(f, n);
        let d = inflate(&s, &InflationPlan::new(seed, 12), &RuleSet::builtin(&s));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = canonical_code(&d);
        for _ in 0..10 {
            prop_assert_eq!(&canonical_code(&relabel(&d, &mut rng)), &code);
        }
    }

    #[test]
    fn text_round_trip((f, n) in family(), seed in any::<u64>()) {
        let s = sys(f, n);
        let d = inflate(&s, &InflationPlan::new(seed, 14), &RuleSet::builtin(&s));
        prop_assert_eq!(canonical_code(&parse(&serialize(&d)).unwrap()), canonical_code(&d));
    }

    #[test]
    fn rules_keep_patches_valid((f, n) in family(), seed in any::<u64>(), kind in 0usize..8) {
        let s = sys(f, n);
        let rules = RuleSet::builtin(&s);
        let d = inflate(&s, &InflationPlan::new(seed, 16), &rules);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let Some(p) = random_patch(&d, &mut rng, 6) else { return Ok(()) };
        let matches = find_matches(&p, RuleKind::ALL[kind], &rules);
        let Some(m) = matches.choose(&mut rng) else { return Ok(()) };
        let q = m.apply(&p, &rules).unwrap();
        prop_assert!(q.is_valid());
        prop_assert_eq!(q.boundary_signature(), p.boundary_signature());
        prop_assert_eq!(q.boundary_word().unwrap_or_default(), p.boundary_word().unwrap_or_default());
        if let Match::Primitive(op) = m {
            let inv = inverse_op(&p, op, &rules).unwrap();
            let mut back = q.clone();
            apply_op(&mut back, &inv, &rules).unwrap();
            prop_assert_eq!(canonical_code(&back), canonical_code(&p));
            if let Op::Cancel { u, .. } = op {
                let k = p.vertices[u].m as usize;
                prop_assert_eq!(p.vertex_count() - q.vertex_count(), 2);
                prop_assert_eq!(p.edge_count() - q.edge_count(), 2 * k);
            }
        }
    }

    #[test]
    fn braid_reduction_halves((m, seed) in (2usize..=6, any::<u64>()), steps in 1usize..30) {
        let s = sys(Family::BraidI, m);
        let d = inflate(&s, &InflationPlan::new(seed, steps), &RuleSet::empty());
        if !d.vertices.is_empty() {
            prop_assert!(find_adjacent_varied_angles(&d).is_some());
        }
        let r = reduce_braid_dihedral(&d, &RuleSet::empty()).unwrap();
        prop_assert_eq!(r.iterations, d.vertex_count() / 2);
    }

    #[test]
    fn tampered_traces_are_rejected(seed in any::<u64>(), pos in any::<prop::sample::Index>(), bit in 0u8..7) {
        let s = sys(Family::I, 4);
        let d = inflate(&s, &InflationPlan::new(seed, 8), &RuleSet::empty());
        let t = reduce(&d, &RuleSet::empty()).unwrap();
        let mut bytes = serialize_trace(&t).into_bytes();
        let i = pos.index(bytes.len());
        bytes[i] ^= 1 << bit;
        let accepted = String::from_utf8(bytes)
            .ok()
            .and_then(|text| parse_trace(&text).ok())
            .is_some_and(|t2| verify_trace(&d, &t2, &RuleSet::empty()).ok);
        prop_assert!(!accepted);
    }
}
