use ixdrl_core::clustering::{agglomerate, cut, silhouette, DistanceMatrix};
use proptest::prelude::*;

fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..max)
}

fn matrix(pts: &[(f64, f64)]) -> DistanceMatrix {
    DistanceMatrix::from_fn(pts.len(), |i, j| {
        let (a, b) = (pts[i], pts[j]);
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    })
}

/// Pairs of items placed together, a label-free view of a partition.
fn co_membership(labels: &[usize]) -> Vec<bool> {
    let n = labels.len();
    (0..n * n).map(|i| labels[i / n] == labels[i % n]).collect()
}

proptest! {
    #[test]
    fn partition_survives_reordering(pts in points(25), k in 2usize..6, rot in 0usize..25) {
        let n = pts.len();
        let k = k.min(n);
        let rot = rot % n;
        let mut moved = pts.clone();
        moved.rotate_left(rot);
        let a = cut(&agglomerate(&matrix(&pts)).unwrap(), k).unwrap();
        let b = cut(&agglomerate(&matrix(&moved)).unwrap(), k).unwrap();
        // map b back to the original order
        let b_orig: Vec<usize> = (0..n).map(|i| b[(i + n - rot) % n]).collect();
        prop_assert_eq!(co_membership(&a), co_membership(&b_orig));
    }

    #[test]
    fn merge_heights_never_decrease(pts in points(40)) {
        let d = agglomerate(&matrix(&pts)).unwrap();
        prop_assert!(d.merges.windows(2).all(|w| w[0].distance <= w[1].distance));
        prop_assert_eq!(d.merges.last().unwrap().size, pts.len());
    }

    #[test]
    fn silhouette_is_bounded_and_label_free(pts in points(30), k in 2usize..8) {
        let d = matrix(&pts);
        let k = k.min(pts.len());
        let labels = cut(&agglomerate(&d).unwrap(), k).unwrap();
        let s = silhouette(&d, &labels);
        prop_assert!((-1.0..=1.0).contains(&s));
        let relabeled: Vec<usize> = labels.iter().map(|l| k - 1 - l).collect();
        prop_assert_eq!(s, silhouette(&d, &relabeled));
    }
}

#[test]
fn cut_labels_follow_first_member() {
    let pts = [(10.0, 0.0), (0.0, 0.0), (10.1, 0.0), (0.1, 0.0)];
    let labels = cut(&agglomerate(&matrix(&pts)).unwrap(), 2).unwrap();
    assert_eq!(labels, vec![0, 1, 0, 1]);
}
