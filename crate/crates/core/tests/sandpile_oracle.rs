use std::collections::{BTreeMap, HashSet};

use metasoc_core::sim::{run_sandpile, run_sandpile_with_state, Sandpile, SandpileConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Straightforward reference: after each drop, scan row-major and topple the
/// first unstable cell until none remains.
fn reference_sizes(w: usize, h: usize, drops: usize, seed: u64) -> Vec<u64> {
    let mut grid = vec![vec![0u32; w]; h];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sizes = Vec::with_capacity(drops);
    for _ in 0..drops {
        let cell = rng.gen_range(0..w * h);
        grid[cell / w][cell % w] += 1;
        let mut size = 0;
        'scan: loop {
            for y in 0..h {
                for x in 0..w {
                    if grid[y][x] >= 4 {
                        grid[y][x] -= 4;
                        size += 1;
                        if x > 0 {
                            grid[y][x - 1] += 1;
                        }
                        if x + 1 < w {
                            grid[y][x + 1] += 1;
                        }
                        if y > 0 {
                            grid[y - 1][x] += 1;
                        }
                        if y + 1 < h {
                            grid[y + 1][x] += 1;
                        }
                        continue 'scan;
                    }
                }
            }
            break;
        }
        sizes.push(size);
    }
    sizes
}

#[test]
fn matches_reference_simulator_5x5() {
    let records = run_sandpile(&SandpileConfig::new(5, 5, 10_000, 2024)).unwrap();
    let expected = reference_sizes(5, 5, 10_000, 2024);
    let histogram = |sizes: &mut dyn Iterator<Item = u64>| {
        let mut h = BTreeMap::new();
        for s in sizes {
            *h.entry(s).or_insert(0u32) += 1;
        }
        h
    };
    let got = histogram(&mut records.iter().map(|r| r.size));
    let want = histogram(&mut expected.iter().copied());
    assert_eq!(got, want);
    assert!(got.keys().any(|&s| s > 10), "expected some large avalanches");
    let sizes: Vec<u64> = records.iter().map(|r| r.size).collect();
    assert_eq!(sizes, expected);
}

/// Every terminal state reachable by any toppling order, with its toppling
/// count.
fn all_relaxations(start: Vec<u32>, w: usize, h: usize) -> HashSet<(Vec<u32>, u32)> {
    let mut terminals = HashSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![(start, 0u32)];
    while let Some((state, count)) = stack.pop() {
        if !seen.insert((state.clone(), count)) {
            continue;
        }
        let unstable: Vec<usize> = (0..state.len()).filter(|&c| state[c] >= 4).collect();
        if unstable.is_empty() {
            terminals.insert((state, count));
            continue;
        }
        for c in unstable {
            let mut next = state.clone();
            next[c] -= 4;
            let (x, y) = (c % w, c / w);
            if x > 0 {
                next[c - 1] += 1;
            }
            if x + 1 < w {
                next[c + 1] += 1;
            }
            if y > 0 {
                next[c - w] += 1;
            }
            if y + 1 < h {
                next[c + w] += 1;
            }
            stack.push((next, count + 1));
        }
    }
    terminals
}

#[test]
fn abelian_on_3x3_all_orders() {
    let configs: [[u32; 9]; 4] = [
        [4, 3, 4, 3, 4, 3, 4, 3, 4],
        [5, 4, 0, 3, 7, 2, 4, 1, 6],
        [3, 3, 3, 3, 8, 3, 3, 3, 3],
        [6, 6, 6, 6, 6, 6, 6, 6, 6],
    ];
    for cfg in configs {
        let terminals = all_relaxations(cfg.to_vec(), 3, 3);
        assert_eq!(terminals.len(), 1, "order-dependent result for {cfg:?}");
        let (final_state, topplings) = terminals.into_iter().next().unwrap();

        let mut pile = Sandpile::from_heights(3, 3, 4, cfg.to_vec());
        let mut ours = 0;
        while let Some(&c) = pile.unstable_cells().first() {
            pile.topple(c);
            ours += 1;
        }
        assert_eq!(pile.heights(), &final_state[..]);
        assert_eq!(ours, topplings);
        assert_eq!(pile.grains_added(), pile.grains_on_grid() + pile.grains_lost());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn conservation_and_determinism(w in 2usize..9, h in 2usize..9, drops in 0usize..3000, seed in any::<u64>()) {
        let cfg = SandpileConfig::new(w, h, drops, seed);
        let (records, pile) = run_sandpile_with_state(&cfg).unwrap();
        prop_assert_eq!(records.len(), drops);
        prop_assert_eq!(pile.grains_added(), drops as u64);
        prop_assert_eq!(pile.grains_added(), pile.grains_on_grid() + pile.grains_lost());
        prop_assert!(pile.unstable_cells().is_empty());
        for r in &records {
            prop_assert_eq!(r.size == 0, r.duration == 0);
        }
        prop_assert_eq!(records, run_sandpile(&cfg).unwrap());
    }

    #[test]
    fn conservation_after_every_drop(seed in any::<u64>()) {
        let mut pile = Sandpile::new(4, 3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for step in 0..500 {
            pile.drop_grain(rng.gen_range(0..12), step);
            prop_assert_eq!(pile.grains_added(), pile.grains_on_grid() + pile.grains_lost());
        }
    }
}
