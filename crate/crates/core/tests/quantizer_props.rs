mod common;

use proptest::prelude::*;
use rand::Rng;

use termdisc::io::{FeatureSequence, FrameMatrix};
use termdisc::quantizer::{assign, train_codebook, train_codebook_with_report, train_on_points, Codebook, KMeansConfig};

fn matrix(rows: &[Vec<f32>]) -> FrameMatrix {
    FrameMatrix::from_rows(rows).unwrap()
}

fn brute_nearest(z: &[f32], centroids: &[Vec<f32>]) -> u32 {
    let mut best = (0, f64::INFINITY);
    for (k, e) in centroids.iter().enumerate() {
        let d = common::euclid(z, e);
        if d < best.1 {
            best = (k as u32, d);
        }
    }
    best.0
}

/// Every 2-partition of the points; returns the minimum within-cluster
/// squared distance and the matching centroid pair.
fn best_two_partition(points: &[Vec<f32>]) -> (f64, Vec<Vec<f64>>) {
    let n = points.len();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 1u32..(1 << n) - 1 {
        let mut cost = 0.0;
        let mut cents = Vec::new();
        for side in [0, 1] {
            let members: Vec<&Vec<f32>> = (0..n).filter(|&i| (mask >> i & 1) == side).map(|i| &points[i]).collect();
            let dim = points[0].len();
            let mean: Vec<f64> =
                (0..dim).map(|d| members.iter().map(|p| f64::from(p[d])).sum::<f64>() / members.len() as f64).collect();
            cost += members.iter().map(|p| p.iter().zip(&mean).map(|(&a, b)| (f64::from(a) - b).powi(2)).sum::<f64>()).sum::<f64>();
            cents.push(mean);
        }
        if cost < best.0 {
            best = (cost, cents);
        }
    }
    best
}

#[test]
fn two_cluster_example_matches_partition_search() {
    let pts = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![10.0, 0.0], vec![10.0, 1.0]];
    let (_, mut expected) = best_two_partition(&pts);
    expected.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let refs: Vec<&[f32]> = pts.iter().map(Vec::as_slice).collect();
    let (cb, _) = train_on_points(&refs, 2, &KMeansConfig::with_k(2)).unwrap();
    let mut got: Vec<Vec<f64>> = (0..2).map(|k| cb.centroid(k).iter().map(|&v| f64::from(v)).collect()).collect();
    got.sort_by(|a, b| a[0].total_cmp(&b[0]));
    assert_eq!(got, expected);
    assert_eq!(got, vec![vec![0.0, 0.5], vec![10.0, 0.5]]);
}

#[test]
fn well_separated_clusters_reach_the_partition_optimum() {
    let mut rng = common::rng(8);
    for _ in 0..30 {
        let pts: Vec<Vec<f32>> = (0..8)
            .map(|i| {
                let base = if i < 4 { -5.0 } else { 5.0 };
                vec![base + rng.random_range(-1.0f32..1.0), rng.random_range(-1.0f32..1.0)]
            })
            .collect();
        let (best, _) = best_two_partition(&pts);
        let refs: Vec<&[f32]> = pts.iter().map(Vec::as_slice).collect();
        let (_, report) = train_on_points(&refs, 2, &KMeansConfig::with_k(2)).unwrap();
        assert!((report.final_inertia() - best).abs() <= 1e-6 * (1.0 + best), "{} vs {best}", report.final_inertia());
    }
}

#[test]
fn distinct_points_become_the_centroids() {
    let pts: Vec<Vec<f32>> = (0..6).map(|i| vec![i as f32 * 3.0, (i * i) as f32]).collect();
    let refs: Vec<&[f32]> = pts.iter().map(Vec::as_slice).collect();
    let (cb, report) = train_on_points(&refs, 2, &KMeansConfig::with_k(6)).unwrap();
    let mut got: Vec<Vec<f32>> = (0..6).map(|k| cb.centroid(k).to_vec()).collect();
    got.sort_by(|a, b| a[0].total_cmp(&b[0]));
    assert_eq!(got, pts);
    assert_eq!(report.final_inertia(), 0.0);
}

#[test]
fn too_many_clusters_is_an_error() {
    let seq = FeatureSequence::new("u", matrix(&[vec![0.0], vec![1.0]]));
    let err = train_codebook(&[seq], &KMeansConfig::with_k(3)).unwrap_err();
    assert!(err.is_invalid_input());
}

#[test]
fn exact_and_tied_assignments() {
    let centroids: Vec<Vec<f32>> = (0..10).map(|k| vec![k as f32, 0.0]).collect();
    let cb = Codebook::new(matrix(&centroids)).unwrap();
    assert_eq!(assign(&matrix(&[vec![7.0, 0.0]]), &cb).unwrap(), vec![7]);
    let tie = Codebook::new(matrix(&[vec![9.0, 9.0], vec![9.0, 9.0], vec![-1.0, 0.0], vec![9.0, 9.0], vec![9.0, 9.0], vec![1.0, 0.0]]))
        .unwrap();
    assert_eq!(assign(&matrix(&[vec![0.0, 0.0]]), &tie).unwrap(), vec![2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn assignment_matches_linear_scan(frames in prop::collection::vec(prop::collection::vec(-3.0f32..3.0, 3), 1..50),
                                      centroids in prop::collection::vec(prop::collection::vec(-3.0f32..3.0, 3), 1..12)) {
        let cb = Codebook::new(matrix(&centroids)).unwrap();
        let labels = assign(&matrix(&frames), &cb).unwrap();
        for (z, l) in frames.iter().zip(&labels) {
            prop_assert_eq!(*l, brute_nearest(z, &centroids));
        }
    }

    #[test]
    fn assignment_follows_frame_permutation(frames in prop::collection::vec(prop::collection::vec(-3.0f32..3.0, 2), 1..30),
                                            seed in any::<u64>()) {
        let cb = Codebook::new(matrix(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![-1.0, 2.0]])).unwrap();
        let mut order: Vec<usize> = (0..frames.len()).collect();
        let mut rng = common::rng(seed);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let permuted: Vec<Vec<f32>> = order.iter().map(|&i| frames[i].clone()).collect();
        let base = assign(&matrix(&frames), &cb).unwrap();
        let moved = assign(&matrix(&permuted), &cb).unwrap();
        for (p, &i) in order.iter().enumerate() {
            prop_assert_eq!(moved[p], base[i]);
        }
    }

    #[test]
    fn inertia_never_increases_and_training_is_deterministic(
        rows in prop::collection::vec(prop::collection::vec(-4.0f32..4.0, 2), 10..80), k in 1usize..8, seed in any::<u64>()) {
        let seq = FeatureSequence::new("u", matrix(&rows));
        let config = KMeansConfig { k, seed, ..KMeansConfig::default() };
        let (cb, report) = train_codebook_with_report(std::slice::from_ref(&seq), &config).unwrap();
        for w in report.inertia_trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", report.inertia_trace);
        }
        let (again, _) = train_codebook_with_report(&[seq], &config).unwrap();
        prop_assert_eq!(cb, again);
    }
}
