use drawstring_core::pulled::{lipschitz_cpull_check, LipschitzOutcome, PullExponent, PulledSpace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected random graph: a random spanning tree plus extra edges.
fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> PulledSpace {
    let mut g = PulledSpace::new(vec![[0.0; 3]; n]);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v, rng.gen_range(0.1..2.0)).unwrap();
    }
    for _ in 0..rng.gen_range(0..2 * n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            g.add_edge(a, b, rng.gen_range(0.1..2.0)).unwrap();
        }
    }
    g
}

fn random_subset(rng: &mut ChaCha8Rng, from: &[usize], max: usize) -> Vec<usize> {
    let mut v = from.to_vec();
    v.shuffle(rng);
    v.truncate(rng.gen_range(1..=max.min(from.len())));
    v.sort_unstable();
    v
}

fn all_pairs(g: &PulledSpace, c: PullExponent) -> Vec<Vec<f64>> {
    (0..g.len()).map(|s| g.pulled_distances_from(s, c).unwrap()).collect()
}

/// Distance on the subgraph induced by `set`.
fn induced(g: &PulledSpace, set: &[usize]) -> Vec<Vec<f64>> {
    let mut sub = PulledSpace::new(g.coords().to_vec());
    for e in g.edges() {
        if set.contains(&e.a) && set.contains(&e.b) {
            sub.add_edge(e.a, e.b, e.length).unwrap();
        }
    }
    (0..g.len())
        .map(|s| {
            (0..g.len())
                .map(|t| sub.geodesic_distance(s, t).unwrap_or(f64::INFINITY))
                .collect()
        })
        .collect()
}

#[test]
fn pulled_distance_is_a_pseudometric_monotone_in_c() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let exponents = [
        PullExponent::Finite(0.0),
        PullExponent::Finite(0.3),
        PullExponent::Finite(1.0),
        PullExponent::Finite(4.0),
        PullExponent::Infinite,
    ];
    for _ in 0..500 {
        let n = rng.gen_range(3..14);
        let nodes: Vec<usize> = (0..n).collect();
        let k = random_subset(&mut rng, &nodes, n);
        let g = random_graph(&mut rng, n).with_pulled(&k).unwrap();
        let tables: Vec<_> = exponents.iter().map(|&c| all_pairs(&g, c)).collect();
        let base = &tables[0];
        for x in 0..n {
            assert_eq!(base[x][x], 0.0);
            for y in 0..n {
                assert_eq!(base[x][y], g.geodesic_distance(x, y).unwrap());
                for w in tables.windows(2) {
                    assert!(w[1][x][y] <= w[0][x][y] + 1e-12, "not monotone in c");
                }
                for d in &tables {
                    assert!((d[x][y] - d[y][x]).abs() <= 1e-12);
                    assert!(d[x][y] >= 0.0 && d[x][y] <= base[x][y] + 1e-12);
                    assert!(d[x][y] >= tables[4][x][y] - 1e-12);
                    for z in 0..n {
                        assert!(d[x][z] <= d[x][y] + d[y][z] + 1e-12, "triangle inequality");
                    }
                }
            }
        }
        if g.pulled_set_connected() {
            for &a in &k {
                for &b in &k {
                    assert_eq!(tables[4][a][b], 0.0);
                }
            }
        }
    }
}

#[test]
fn lipschitz_maps_stay_lipschitz_for_pulled_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for trial in 0..10_000 {
        let n = rng.gen_range(3..9);
        let g = random_graph(&mut rng, n);
        let nodes: Vec<usize> = (0..n).collect();
        let a = random_subset(&mut rng, &nodes, n);
        let b = random_subset(&mut rng, &a, a.len());
        let f: Vec<usize> = (0..n)
            .map(|v| {
                if b.contains(&v) {
                    v
                } else if a.contains(&v) {
                    *b.choose(&mut rng).unwrap()
                } else {
                    rng.gen_range(0..n)
                }
            })
            .collect();
        let base: Vec<Vec<f64>> = (0..n)
            .map(|s| (0..n).map(|t| g.geodesic_distance(s, t).unwrap()).collect())
            .collect();
        let (da, db) = (induced(&g, &a), induced(&g, &b));
        let mut lipschitz: f64 = 1.0;
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    lipschitz = lipschitz.max(base[f[x]][f[y]] / base[x][y]);
                }
                if a.contains(&x) && a.contains(&y) && da[x][y].is_finite() && x != y {
                    lipschitz = lipschitz.max(db[f[x]][f[y]] / da[x][y]);
                }
            }
        }
        if !lipschitz.is_finite() {
            continue;
        }
        let lipschitz = lipschitz * (1.0 + 1e-9);
        let c = if trial % 4 == 0 {
            PullExponent::Infinite
        } else {
            PullExponent::Finite(rng.gen_range(0.0..5.0))
        };
        match lipschitz_cpull_check(&g, &a, &b, &f, lipschitz, c).unwrap() {
            LipschitzOutcome::Checked { holds, worst_ratio, .. } => {
                assert!(holds, "trial {trial}: ratio {worst_ratio} > {lipschitz}");
                checked += 1;
            }
            LipschitzOutcome::Precondition(why) => panic!("trial {trial}: {why}"),
        }
    }
    assert!(checked > 5_000, "only {checked} trials had a finite constant");
}

#[test]
fn broken_hypotheses_are_reported_not_tested() {
    let g = PulledSpace::path(&[0.0, 1.0, 2.0, 3.0]).unwrap();
    let id: Vec<usize> = (0..4).collect();
    let c = PullExponent::Finite(1.0);
    let not_subset = lipschitz_cpull_check(&g, &[0, 1], &[2], &id, 1.0, c).unwrap();
    assert!(matches!(not_subset, LipschitzOutcome::Precondition(_)));
    let moves_b = lipschitz_cpull_check(&g, &[0, 1], &[0, 1], &[1, 0, 2, 3], 1.0, c).unwrap();
    assert!(matches!(moves_b, LipschitzOutcome::Precondition(_)));
    let stretched = lipschitz_cpull_check(&g, &[0], &[0], &[0, 3, 2, 1], 1.0, c).unwrap();
    assert!(matches!(stretched, LipschitzOutcome::Precondition(_)));
}
