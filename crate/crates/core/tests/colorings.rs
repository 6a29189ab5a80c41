use std::collections::HashSet;

use honeycomb_core::colorings::{
    config_count, cycles_from_json, cycles_to_json, dedup_stats, enumerate_cycles, read_checkpoint,
    simple_cycles, write_checkpoint, ConfigSpace, Cycle,
};
use honeycomb_core::lattice::{build_h, EdgeColoring};
use honeycomb_core::QParam;
use num_bigint::BigUint;

#[test]
fn cycle_counts() {
    for (n, want) in [(1, 1), (2, 14), (3, 280), (4, 18370)] {
        assert_eq!(enumerate_cycles(n).unwrap().len(), want, "H_{n}");
    }
    assert!(enumerate_cycles(0).is_err());
}

#[test]
fn cycles_are_simple_closed_and_distinct() {
    let net = build_h(3).unwrap();
    let cycles = simple_cycles(&net).unwrap();
    let mut seen = HashSet::new();
    for c in &cycles {
        assert_eq!(*c, Cycle::canonical(c.edges.clone()));
        let mut set: Vec<_> = c.edges.clone();
        set.sort();
        assert!(seen.insert(set), "edge set repeated");
        // consecutive edges share a vertex, each vertex is visited once
        let mut visits = std::collections::HashMap::new();
        for (i, &e) in c.edges.iter().enumerate() {
            let next = c.edges[(i + 1) % c.len()];
            let [a, b] = net.edges[e].ends.map(Option::unwrap);
            let [x, y] = net.edges[next].ends.map(Option::unwrap);
            assert!(a == x || a == y || b == x || b == y);
            *visits.entry(a).or_insert(0) += 1;
            *visits.entry(b).or_insert(0) += 1;
        }
        assert!(visits.values().all(|&v| v == 2));
    }
}

#[test]
fn canonical_form_ignores_rotation_and_direction() {
    let c = Cycle::canonical(vec![5, 2, 9, 7]);
    assert_eq!(c.edges, vec![2, 5, 7, 9]);
    assert_eq!(Cycle::canonical(vec![9, 2, 5, 7]), c);
    assert_eq!(Cycle::canonical(vec![7, 9, 2, 5]), c);
}

#[test]
fn closed_form_counts() {
    assert_eq!(config_count(14, 6), BigUint::from(38_759u32));
    assert_eq!(config_count(280, 2), BigUint::from(39_620u32));
    // sizes 1 and 2 together; the size-2 multisets alone number 168,737,635
    assert_eq!(config_count(18_370, 2), BigUint::from(168_756_005u64));
    assert_eq!(
        config_count(18_370, 2) - config_count(18_370, 1),
        BigUint::from(168_737_635u64)
    );
    assert_eq!(config_count(5, 1), BigUint::from(5u32));
}

#[test]
fn streamed_counts_match_the_closed_form() {
    let cycles = enumerate_cycles(2).unwrap();
    let edges = build_h(2).unwrap().edges.len();
    for cmax in 1..=6 {
        let space = ConfigSpace::new(cycles.clone(), edges, cmax).unwrap();
        let streamed = space.stream().count() as u64;
        assert_eq!(BigUint::from(streamed), config_count(14, cmax as u64));
        assert_eq!(space.len(), streamed as u128);
    }
    let space = ConfigSpace::for_patch(3, 2).unwrap();
    assert_eq!(space.stream().count(), 39_620);
}

#[test]
fn stream_order_matches_unranking() {
    let space = ConfigSpace::for_patch(2, 3).unwrap();
    for (r, c) in space.stream().enumerate() {
        assert_eq!(c.rank, r as u128);
        let seq = space.unrank(c.rank).unwrap();
        assert_eq!(space.rank_of(&seq).unwrap(), c.rank);
        assert_eq!(space.config(c.rank).unwrap(), c);
    }
    assert!(space.unrank(space.len()).is_err());
}

#[test]
fn ranges_partition_the_stream() {
    let space = ConfigSpace::for_patch(2, 4).unwrap();
    let whole: Vec<_> = space.stream().collect();
    let cut = [0, 7, 100, 101, 500, space.len()];
    let mut parts = Vec::new();
    for w in cut.windows(2) {
        parts.extend(space.range(w[0], w[1]));
    }
    assert_eq!(parts, whole);
}

#[test]
fn every_config_is_admissible() {
    let net = build_h(2).unwrap();
    let space = ConfigSpace::for_patch(2, 3).unwrap();
    for c in space.stream() {
        assert!(c.colors.iter().all(|&x| x <= 3));
        let total: u32 = c.multiset.values().sum();
        assert!((1..=3).contains(&total));
        net.check_coloring(&EdgeColoring::new(c.colors.clone()), QParam::Classical)
            .unwrap();
    }
    let net = build_h(3).unwrap();
    for c in ConfigSpace::for_patch(3, 2).unwrap().range(0, 2000) {
        net.check_coloring(&EdgeColoring::new(c.colors), QParam::Classical)
            .unwrap();
    }
}

#[test]
fn single_cycle_configs() {
    let space = ConfigSpace::for_patch(2, 1).unwrap();
    let configs: Vec<_> = space.stream().collect();
    assert_eq!(configs.len(), 14);
    for (i, c) in configs.iter().enumerate() {
        assert_eq!(c.multiset.len(), 1);
        assert_eq!(c.multiset[&i], 1);
    }
}

#[test]
fn duplicate_colorings_are_counted() {
    // the outer boundary plus an inner hexagon colors like the union of the
    // complementary pieces, so some duplicates are expected at c_M = 2
    let space = ConfigSpace::for_patch(2, 2).unwrap();
    let stats = dedup_stats(space.stream());
    assert_eq!(stats.total, 119);
    assert_eq!(stats.distinct + stats.duplicates, stats.total);
    assert!(stats.duplicates > 0);
    let single = dedup_stats(ConfigSpace::for_patch(2, 1).unwrap().stream());
    assert_eq!(single.duplicates, 0);
}

#[test]
fn checkpoints_resume_the_stream() {
    let space = ConfigSpace::for_patch(2, 3).unwrap();
    let mut s = space.stream();
    let first: Vec<_> = s.by_ref().take(50).collect();
    let mut buf = Vec::new();
    write_checkpoint(&mut buf, s.cursor()).unwrap();
    let resumed = read_checkpoint(buf.as_slice()).unwrap();
    assert_eq!(resumed, 50);
    let rest: Vec<_> = space.range(resumed, space.len()).collect();
    assert_eq!(first.len() + rest.len(), space.len() as usize);
    assert_eq!(rest[0], space.config(50).unwrap());

    let mut big = Vec::new();
    write_checkpoint(&mut big, u128::MAX).unwrap();
    assert_eq!(read_checkpoint(big.as_slice()).unwrap(), u128::MAX);
    assert!(read_checkpoint(&b"XXXX\x01\x00\x00\x00\x00\x00\x00\x00"[..]).is_err());
}

#[test]
fn cycle_dump_round_trip() {
    let cycles = enumerate_cycles(2).unwrap();
    let text = cycles_to_json(2, &cycles).unwrap();
    let (n, back) = cycles_from_json(&text).unwrap();
    assert_eq!(n, 2);
    assert_eq!(back, cycles);
}

#[test]
fn large_spaces_are_addressable_without_streaming() {
    let space = ConfigSpace::new(
        enumerate_cycles(4).unwrap(),
        build_h(4).unwrap().edges.len(),
        2,
    )
    .unwrap();
    assert_eq!(space.len(), 168_756_005);
    let last = space.config(space.len() - 1).unwrap();
    assert_eq!(
        last.multiset.into_iter().collect::<Vec<_>>(),
        vec![(18_369, 2)]
    );
    let mid = space.len() / 2;
    let seq = space.unrank(mid).unwrap();
    assert_eq!(space.rank_of(&seq).unwrap(), mid);
}
