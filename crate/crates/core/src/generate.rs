//! Random closed diagrams built by applying relations backwards from the empty
//! diagram. Every output is homotopic to empty by construction.

use std::sync::Arc;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::coxeter::{braid_moves, rex_path, CoxeterSystem, Gen, LengthTable, Word};
use crate::map::{glue, Diagram};
use crate::rules::{compile_path, find_matches, Match, RuleError, RuleKind, RuleSet};

/// Relative weights of the inflation moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveWeights {
    pub add_circle: f64,
    pub insert_pair: f64,
    pub bridge: f64,
    pub zam_commuting: f64,
    pub zam_a3: f64,
}

impl Default for MoveWeights {
    fn default() -> Self {
        MoveWeights { add_circle: 0.1, insert_pair: 0.5, bridge: 0.3, zam_commuting: 0.05, zam_a3: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InflationPlan {
    pub seed: u64,
    pub steps: usize,
    pub weights: MoveWeights,
}

impl InflationPlan {
    pub fn new(seed: u64, steps: usize) -> Self {
        InflationPlan { seed, steps, weights: MoveWeights::default() }
    }
}

const KINDS: [RuleKind; 5] =
    [RuleKind::CircleAdd, RuleKind::InsertAdjacentPair, RuleKind::Bridge, RuleKind::ZamCommuting, RuleKind::ZamA3];

/// Applies `plan.steps` random moves to the empty diagram. Draws whose move
/// has no site are redrawn a few times, then skipped.
///
/// # Panics
/// When all weights are zero.
pub fn inflate(sys: &Arc<CoxeterSystem>, plan: &InflationPlan, rules: &RuleSet) -> Diagram {
    let w = plan.weights;
    let mut weights = [w.add_circle, w.insert_pair, w.bridge, w.zam_commuting, w.zam_a3];
    if sys.oriented {
        weights[3] = 0.0;
        weights[4] = 0.0;
    }
    let dist = WeightedIndex::new(weights).expect("inflation weights must not all be zero");
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut d = Diagram::new(sys.clone());
    for _ in 0..plan.steps {
        for _attempt in 0..8 {
            let kind = KINDS[dist.sample(&mut rng)];
            let matches = find_matches(&d, kind, rules);
            if matches.is_empty() {
                continue;
            }
            let m: &Match = &matches[rng.gen_range(0..matches.len())];
            if let Ok(next) = m.apply(&d, rules) {
                d = next;
                break;
            }
        }
    }
    d
}

/// `count` diagrams with vertex counts within 25% of `size_target`, each from
/// its own seed derived from `seed`. Runs in parallel with the `parallel`
/// feature.
pub fn corpus(sys: &Arc<CoxeterSystem>, count: usize, size_target: usize, seed: u64, rules: &RuleSet) -> Vec<Diagram> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(|i| sized(sys, size_target, item_seed(seed, i), rules)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    corpus_sequential(sys, count, size_target, seed, rules)
}

/// [`corpus`] on the calling thread; the output is identical.
pub fn corpus_sequential(
    sys: &Arc<CoxeterSystem>,
    count: usize,
    size_target: usize,
    seed: u64,
    rules: &RuleSet,
) -> Vec<Diagram> {
    (0..count).map(|i| sized(sys, size_target, item_seed(seed, i), rules)).collect()
}

fn item_seed(seed: u64, i: usize) -> u64 {
    // splitmix64 step so neighboring items get unrelated streams
    let mut z = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Resamples plans until the vertex count is within 25% of the target.
fn sized(sys: &Arc<CoxeterSystem>, target: usize, seed: u64, rules: &RuleSet) -> Diagram {
    if target == 0 {
        return Diagram::new(sys.clone());
    }
    let (lo, hi) = ((target * 3).div_ceil(4), target * 5 / 4);
    let mut steps = target.max(1);
    let mut best: Option<Diagram> = None;
    for attempt in 0..10_000u64 {
        let d = inflate(sys, &InflationPlan::new(seed.wrapping_add(attempt), steps), rules);
        let v = d.vertex_count();
        if (lo..=hi).contains(&v) {
            return d;
        }
        if v < lo {
            steps += 1;
        } else {
            steps = steps.saturating_sub(1).max(1);
        }
        let dist = |x: &Diagram| x.vertex_count().abs_diff(target);
        if best.as_ref().is_none_or(|b| dist(&d) < dist(b)) {
            best = Some(d);
        }
    }
    best.expect("at least one attempt")
}

/// A closed diagram from two random braid-move walks out of one reduced word
/// that meet again: the walks are compiled into patches and glued. These have
/// few adjacent vertices of one type, unlike inflated diagrams. Unoriented
/// finite systems only.
pub fn braid_cycle(sys: &Arc<CoxeterSystem>, seed: u64, word_len: usize, walk_len: usize) -> Result<Diagram, RuleError> {
    let table = LengthTable::new(sys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<Gen> = sys.gens().collect();
    let mut word: Word = Vec::new();
    let mut x = table.element(&[]);
    for _ in 0..64 * word_len.max(1) {
        if word.len() >= word_len {
            break;
        }
        let g = gens[rng.gen_range(0..gens.len())];
        let y = table.times(&x, g);
        if table.length(&y) > word.len() {
            word.push(g);
            x = y;
        }
    }
    let walk = |rng: &mut ChaCha8Rng| {
        let mut w = word.clone();
        let mut moves = Vec::new();
        for _ in 0..walk_len {
            let options = braid_moves(sys, &w);
            if options.is_empty() {
                break;
            }
            let (mv, next) = options[rng.gen_range(0..options.len())].clone();
            moves.push(mv);
            w = next;
        }
        (moves, w)
    };
    let (one, end) = walk(&mut rng);
    let (mut two, end2) = walk(&mut rng);
    let back = rex_path(sys, &end2, |w| w == end.as_slice())
        .ok_or_else(|| RuleError::Precondition("walks end at different elements".into()))?;
    two.extend(back);
    let a = compile_path(sys, &word, &one)?;
    let b = compile_path(sys, &word, &two)?;
    Ok(glue(&a, &b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{build_system, Family};
    use crate::map::canonical_code;

    fn sys(f: Family, n: usize) -> Arc<CoxeterSystem> {
        Arc::new(build_system(f, n).unwrap())
    }

    #[test]
    fn zero_steps_is_empty() {
        let s = sys(Family::I, 3);
        assert!(inflate(&s, &InflationPlan::new(1, 0), &RuleSet::empty()).is_empty());
    }

    #[test]
    fn circle_then_pair_gives_a_two_vertex_component() {
        let s = sys(Family::I, 3);
        let weights = MoveWeights { add_circle: 1.0, insert_pair: 0.0, bridge: 0.0, zam_commuting: 0.0, zam_a3: 0.0 };
        let d = inflate(&s, &InflationPlan { seed: 3, steps: 1, weights }, &RuleSet::empty());
        assert_eq!(d.circle_count(), 1);
        let m = find_matches(&d, RuleKind::InsertAdjacentPair, &RuleSet::empty());
        let e = m[0].apply(&d, &RuleSet::empty()).unwrap();
        assert_eq!((e.vertex_count(), e.edge_count()), (2, 6));
        assert!(e.is_valid());
    }

    #[test]
    fn inflation_is_deterministic_and_valid() {
        for (f, n) in [(Family::A, 3), (Family::I, 5), (Family::BraidI, 3)] {
            let s = sys(f, n);
            let rules = RuleSet::builtin(&s);
            for seed in 0..20 {
                let plan = InflationPlan::new(seed, 12);
                let a = inflate(&s, &plan, &rules);
                let b = inflate(&s, &plan, &rules);
                assert!(a.is_valid() && a.is_closed());
                assert_eq!(canonical_code(&a), canonical_code(&b));
            }
        }
    }

    #[test]
    fn corpus_hits_the_size_window() {
        let s = sys(Family::I, 4);
        let c = corpus(&s, 20, 20, 7, &RuleSet::empty());
        assert_eq!(c.len(), 20);
        for d in &c {
            assert!((15..=25).contains(&d.vertex_count()), "{}", d.vertex_count());
        }
        let seq = corpus_sequential(&s, 20, 20, 7, &RuleSet::empty());
        assert!(c.iter().zip(&seq).all(|(a, b)| canonical_code(a) == canonical_code(b)));
    }
}
