//! Metric-structure properties of the exact distances, plus the
//! sampled-space equality and the correspondence/map reformulation.

mod common;

use common::random_network;
use netmetric::approx::{local_search_partial_embedding, ApproxConfig};
use netmetric::exact::{
    correspondence_distance, correspondence_distance_via_maps, embedding_distance,
    partial_embedding_distance, sampled_partial_embedding_distance,
};
use netmetric::interior::midpoint_augment;
use netmetric::network::are_isomorphic;
use netmetric::rng::SplitMix64;

#[test]
fn sampled_midpoint_distance_equals_partial_embedding() {
    // The midpoint augmentations of any two networks form a regular sample
    // pair, so the sampled-space distance must equal the plain one.
    let mut rng = SplitMix64::new(0x2001);
    for case in 0..50 {
        let nx = 2 + rng.below(2); // 2..=3
        let ny = 2 + rng.below(2);
        let a = random_network(&mut rng, nx, 0.1, 2.0);
        let b = random_network(&mut rng, ny, 0.1, 2.0);
        let qa = midpoint_augment(&a).unwrap();
        let qb = midpoint_augment(&b).unwrap();
        let (sampled, _) = sampled_partial_embedding_distance(&qa, &qb).unwrap();
        let (plain, _) = partial_embedding_distance(&a, &b).unwrap();
        assert!(
            (sampled - plain).abs() <= 1e-9,
            "case {case}: sampled {sampled} vs plain {plain}"
        );
    }
}

#[test]
fn correspondence_distance_equals_map_reformulation() {
    let mut rng = SplitMix64::new(0x2002);
    for case in 0..30 {
        let nx = 2 + rng.below(3); // 2..=4
        let ny = 2 + rng.below(3);
        let a = random_network(&mut rng, nx, 0.1, 2.0);
        let b = random_network(&mut rng, ny, 0.1, 2.0);
        let (dc, _) = correspondence_distance(&a, &b).unwrap();
        let via_maps = correspondence_distance_via_maps(&a, &b).unwrap();
        assert!(
            (dc - via_maps).abs() <= 1e-9,
            "case {case}: correspondence {dc} vs map pair {via_maps}"
        );
        // The embedding distance never exceeds the correspondence distance.
        let dee = embedding_distance(&a, &b).unwrap();
        assert!(dee <= dc + 1e-12, "case {case}: d_EE {dee} > d_C {dc}");
    }
}

#[test]
fn embedding_distance_metric_axioms() {
    let mut rng = SplitMix64::new(0x2003);
    for case in 0..100 {
        let sizes: Vec<usize> = (0..3).map(|_| 2 + rng.below(3)).collect();
        let x = random_network(&mut rng, sizes[0], 0.1, 2.0);
        let y = random_network(&mut rng, sizes[1], 0.1, 2.0);
        let z = random_network(&mut rng, sizes[2], 0.1, 2.0);

        let xy = embedding_distance(&x, &y).unwrap();
        let yx = embedding_distance(&y, &x).unwrap();
        let yz = embedding_distance(&y, &z).unwrap();
        let xz = embedding_distance(&x, &z).unwrap();
        assert!((xy - yx).abs() <= 1e-9, "case {case}: symmetry");
        assert!(xz <= xy + yz + 1e-9, "case {case}: d_EE triangle");
        assert!(xy >= 0.0);

        // Directed triangle inequality for the partial distance.
        let (pxy, _) = partial_embedding_distance(&x, &y).unwrap();
        let (pyz, _) = partial_embedding_distance(&y, &z).unwrap();
        let (pxz, _) = partial_embedding_distance(&x, &z).unwrap();
        assert!(pxz <= pxy + pyz + 1e-9, "case {case}: d_PE triangle");
    }
}

#[test]
fn subnetwork_embeds_at_distance_zero() {
    let mut rng = SplitMix64::new(0x2004);
    for case in 0..20 {
        let n = 4 + rng.below(3); // 4..=6
        let parent = random_network(&mut rng, n, 0.1, 2.0);
        let k = 2 + rng.below(n - 2);
        // Pick k distinct nodes.
        let mut nodes: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + rng.below(n - i);
            nodes.swap(i, j);
        }
        let sub = parent.induced_subnetwork(&nodes[..k]).unwrap();
        let (d, witness) = partial_embedding_distance(&sub, &parent).unwrap();
        assert!(d <= 1e-12, "case {case}: sub-network distance {d}");
        witness.check(sub.len(), parent.len()).unwrap();
    }
}

#[test]
fn zero_distance_detects_isomorphic_networks() {
    let mut rng = SplitMix64::new(0x2005);
    for _ in 0..20 {
        let n = 3 + rng.below(3);
        let a = random_network(&mut rng, n, 0.1, 2.0);
        // Random relabeling.
        let mut perm: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let j = i + rng.below(n - i);
            perm.swap(i, j);
        }
        let b = a.permuted(&perm).unwrap();
        assert!(embedding_distance(&a, &b).unwrap() <= 1e-12);
        assert!(are_isomorphic(&a, &b, 1e-9).unwrap());
        // Invariance: distances to a third network are unchanged.
        let c = random_network(&mut rng, 3, 0.1, 2.0);
        let da = embedding_distance(&a, &c).unwrap();
        let db = embedding_distance(&b, &c).unwrap();
        assert!((da - db).abs() <= 1e-9);
    }
}

#[test]
fn local_search_upper_bound_and_gap_on_raw_matrices() {
    // The heuristic on raw dissimilarities can never beat the exact
    // optimum; the observed gap is reported for the record.
    let mut rng = SplitMix64::new(0x2006);
    let cfg = ApproxConfig::new(0x2006);
    let mut worst_gap = 0.0f64;
    for case in 0..10 {
        let nx = 5 + rng.below(3); // 5..=7
        let a = random_network(&mut rng, nx, 0.1, 2.0);
        let b = random_network(&mut rng, 8, 0.1, 2.0);
        let (exact, _) = partial_embedding_distance(&a, &b).unwrap();
        let (heur, map) =
            local_search_partial_embedding(a.matrix(), b.matrix(), nx, 8, &cfg, &[]).unwrap();
        assert!(
            heur >= exact - 1e-9,
            "case {case}: heuristic {heur} beats exact {exact}"
        );
        map.check(a.len(), b.len()).unwrap();
        worst_gap = worst_gap.max(heur - exact);
    }
    println!("local-search worst gap over 10 instances: {worst_gap:.6}");
}
