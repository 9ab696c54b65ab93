//! Property-based invariants: serialization round-trips and basic
//! mismatch identities under randomized inputs.

use netmetric::exact::{delta_map, gamma_diff};
use netmetric::network::{Correspondence, Network, NodeMapping};
use proptest::prelude::*;

fn arb_network() -> impl Strategy<Value = Network> {
    (2usize..=6).prop_flat_map(|n| {
        let edges = n * (n - 1) / 2;
        proptest::collection::vec(0.1f64..2.0, edges).prop_map(move |w| {
            let mut d = vec![vec![0.0; n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    d[i][j] = w[k];
                    d[j][i] = w[k];
                    k += 1;
                }
            }
            Network::from_matrix(d).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn json_round_trip_is_exact(net in arb_network()) {
        let back = Network::from_json_str(&net.to_json_string()).unwrap();
        prop_assert_eq!(net.labels(), back.labels());
        prop_assert_eq!(net.matrix(), back.matrix());
    }

    #[test]
    fn csv_round_trip_is_exact(net in arb_network()) {
        let back = Network::from_csv_str(&net.to_csv_string()).unwrap();
        prop_assert_eq!(net.labels(), back.labels());
        prop_assert_eq!(net.matrix(), back.matrix());
    }

    #[test]
    fn identity_correspondence_has_zero_mismatch(net in arb_network()) {
        let n = net.len();
        let c = Correspondence::identity(n);
        prop_assert_eq!(gamma_diff(&net, &net, &c).unwrap(), 0.0);
        let id = NodeMapping::identity(n);
        prop_assert_eq!(delta_map(&net, &net, &id).unwrap(), 0.0);
    }

    #[test]
    fn mismatch_is_bounded_by_weight_ranges(a in arb_network(), b in arb_network()) {
        // Any constant-to-constant comparison is bounded by the extreme
        // weight gap, so delta for an arbitrary map must be too.
        let map = NodeMapping { assignment: vec![0; a.len()] };
        let d = delta_map(&a, &b, &map).unwrap();
        let hi = a
            .matrix()
            .iter()
            .flatten()
            .chain(b.matrix().iter().flatten())
            .cloned()
            .fold(0.0f64, f64::max);
        prop_assert!(d >= 0.0);
        prop_assert!(d <= hi + 1e-12);
    }
}
