use std::collections::HashMap;

use edgegame::random::{balanced_order, random_order, random_tree};
use edgegame::{DecrementalError, DecrementalForest, Forest, Variant};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Component id per vertex over the edges not yet deleted.
fn bfs_components(f: &Forest, deleted: &[bool]) -> Vec<usize> {
    let n = f.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &e in f.incident(x) {
                let y = f.other_end(e, x);
                if !deleted[e] && comp[y] == usize::MAX {
                    comp[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Labels and oracle ids induce the same partition.
fn same_partition(df: &DecrementalForest, oracle: &[usize]) -> bool {
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    oracle.iter().enumerate().all(|(v, &c)| {
        let l = df.find(v);
        *fwd.entry(l).or_insert(c) == c && *back.entry(c).or_insert(l) == l
    })
}

fn check_sequence(f: &Forest, order: &[usize], variant: Variant) -> Result<(), TestCaseError> {
    let mut df = DecrementalForest::new(f, variant);
    let mut deleted = vec![false; f.edge_count()];
    prop_assert!(same_partition(&df, &bfs_components(f, &deleted)));
    for &e in order {
        let (u, v) = f.endpoints(e);
        let rep = df.delete_edge(u, v).unwrap();
        deleted[e] = true;
        let oracle = bfs_components(f, &deleted);
        prop_assert!(same_partition(&df, &oracle), "{variant:?} after deleting {e}");
        prop_assert_eq!(df.find(rep.relabelled_endpoint), rep.new_label);
        prop_assert_ne!(df.find(rep.kept_endpoint), rep.new_label);
        let smaller = oracle.iter().filter(|&&c| c == oracle[rep.relabelled_endpoint]).count();
        let other = oracle.iter().filter(|&&c| c == oracle[rep.kept_endpoint]).count();
        if variant == Variant::Baseline {
            prop_assert!(smaller <= other);
            prop_assert_eq!(rep.smaller_side_size, smaller);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn both_variants_track_components(seed in any::<u64>(), n in 1usize..=200, cap in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_tree(n, cap, &mut rng);
        let order = random_order(f.edge_count(), &mut rng);
        check_sequence(&f, &order, Variant::Baseline)?;
        check_sequence(&f, &order, Variant::TwoLevel)?;
    }

    #[test]
    fn balanced_cuts_track_components(seed in any::<u64>(), n in 2usize..=120) {
        let f = random_tree(n, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let order = balanced_order(&f);
        check_sequence(&f, &order, Variant::Baseline)?;
        check_sequence(&f, &order, Variant::TwoLevel)?;
    }
}

#[test]
fn deleting_twice_errors() {
    for variant in [Variant::Baseline, Variant::TwoLevel] {
        let mut df = DecrementalForest::new(&Forest::path(4), variant);
        df.delete_edge(1, 2).unwrap();
        assert_eq!(df.delete_edge(2, 1), Err(DecrementalError::EdgeAlreadyDeleted(1)));
        assert!(matches!(df.delete_edge(0, 3), Err(DecrementalError::NotAnEdge(0, 3))));
    }
}

#[test]
fn baseline_relabel_total_is_logarithmic() {
    let f = Forest::path(1 << 12);
    let mut df = DecrementalForest::new(&f, Variant::Baseline);
    for e in balanced_order(&f) {
        df.delete_edge_id(e).unwrap();
    }
    let n = f.vertex_count() as f64;
    assert!((df.counters().relabels as f64) <= n * n.log2());
}
