mod common;

use common::{barcodes_match, oracle_barcode, rng, uniform_cloud, weighted_distances};
use filtertop::persistence::rips_barcodes_from_distances;
use filtertop::{max_lifetime, rips_barcodes, DistanceMatrix, Metric, MetricMode, PointCloud64, RipsParams64};
use proptest::prelude::*;
use rand::Rng;

fn barcode(cloud: &PointCloud64, params: &RipsParams64) -> filtertop::Barcode64 {
    rips_barcodes(cloud, MetricMode::Euclidean, params).unwrap()
}

#[test]
fn matches_boundary_matrix_oracle() {
    let mut rng = rng(11);
    for trial in 0..150 {
        let n = rng.random_range(1..=12);
        let d = rng.random_range(1..=4);
        let cloud = uniform_cloud(&mut rng, n, d);
        let dist = weighted_distances(&cloud, None);
        let full = oracle_barcode(&dist, f64::INFINITY, false);
        let ours = barcode(&cloud, &RipsParams64::default());
        barcodes_match(&ours, &full, 1e-12).unwrap_or_else(|e| panic!("trial {trial}: {e}"));

        let scale = rng.random_range(0.1..1.0);
        let truncated = oracle_barcode(&dist, scale, false);
        let ours = barcode(&cloud, &RipsParams64::default().with_maxscale(scale));
        barcodes_match(&ours, &truncated, 1e-12).unwrap_or_else(|e| panic!("trial {trial} at {scale}: {e}"));
    }
}

#[test]
fn matches_oracle_with_ties_and_zero_length_bars() {
    // integer grids produce many equal distances and duplicate points
    let mut rng = rng(5);
    for trial in 0..100 {
        let n = rng.random_range(2..=10);
        let rows: Vec<[f64; 2]> =
            (0..n).map(|_| [rng.random_range(0..3) as f64, rng.random_range(0..3) as f64]).collect();
        let cloud = PointCloud64::from_rows(&rows).unwrap();
        let dist = weighted_distances(&cloud, None);
        for keep in [false, true] {
            let params = RipsParams64 { keep_zero_length: keep, ..RipsParams64::default() };
            let ours = barcode(&cloud, &params);
            let oracle = oracle_barcode(&dist, f64::INFINITY, keep);
            barcodes_match(&ours, &oracle, 1e-12).unwrap_or_else(|e| panic!("trial {trial} keep={keep}: {e}"));
        }
    }
}

#[test]
fn vne_distances_feed_the_same_reduction() {
    let mut rng = rng(3);
    let cloud = uniform_cloud(&mut rng, 10, 3);
    let metric = Metric::new(&cloud, MetricMode::VneStddev).unwrap();
    let dist = DistanceMatrix::from_metric(&metric);
    let ours = rips_barcodes_from_distances(&dist, &RipsParams64::default()).unwrap();
    let rows: Vec<Vec<f64>> = (0..10).map(|i| dist.row(i).to_vec()).collect();
    barcodes_match(&ours, &oracle_barcode(&rows, f64::INFINITY, false), 1e-12).unwrap();
}

#[test]
fn noiseless_circle_has_one_dominant_loop() {
    let cloud = filtertop::sample::<f64>(&filtertop::ShapeSpec::new(filtertop::Shape::Circle2d, 100));
    let bc = barcode(&cloud, &RipsParams64::default());
    let lifetimes = bc.lifetimes(1);
    let second = lifetimes.get(1).copied().unwrap_or(0.0);
    assert!(lifetimes[0] > 5.0 * second, "{lifetimes:?}");
    assert_eq!(max_lifetime(&bc, 1), lifetimes[0]);
}

fn cloud_strategy() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec([-1.0f64..1.0, -1.0f64..1.0], 1..14)
}

fn from_rows(rows: &[[f64; 2]]) -> PointCloud64 {
    PointCloud64::from_rows(rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isometry_invariance(rows in cloud_strategy(), angle in 0.0f64..6.3, dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
        let (s, c) = angle.sin_cos();
        let moved: Vec<[f64; 2]> = rows.iter().map(|p| [c * p[0] - s * p[1] + dx, s * p[0] + c * p[1] + dy]).collect();
        let a = barcode(&from_rows(&rows), &RipsParams64::default());
        let b = barcode(&from_rows(&moved), &RipsParams64::default());
        prop_assert!(barcodes_match(&a, &b, 1e-9).is_ok());
    }

    #[test]
    fn scale_equivariance(rows in cloud_strategy(), factor in 0.1f64..10.0) {
        let scaled: Vec<[f64; 2]> = rows.iter().map(|p| [p[0] * factor, p[1] * factor]).collect();
        let mut a = barcode(&from_rows(&rows), &RipsParams64::default());
        for bar in a.dim0.iter_mut().chain(a.dim1.iter_mut()) {
            bar.birth *= factor;
            bar.death *= factor;
        }
        let b = barcode(&from_rows(&scaled), &RipsParams64::default());
        prop_assert!(barcodes_match(&a, &b, 1e-9).is_ok());
    }

    #[test]
    fn permutation_invariance(rows in cloud_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rng(seed));
        let a = barcode(&from_rows(&rows), &RipsParams64::default());
        let b = barcode(&from_rows(&shuffled), &RipsParams64::default());
        prop_assert!(barcodes_match(&a, &b, 1e-12).is_ok());
    }

    #[test]
    fn raising_maxscale_keeps_short_bars(rows in cloud_strategy(), low in 0.05f64..1.5, extra in 0.0f64..2.0) {
        let cloud = from_rows(&rows);
        let short = |bc: &filtertop::Barcode64, d: usize| -> Vec<(f64, f64)> {
            let mut v: Vec<(f64, f64)> =
                bc.dim(d).iter().filter(|i| i.death < low).map(|i| (i.birth, i.death)).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let a = barcode(&cloud, &RipsParams64::default().with_maxscale(low));
        let b = barcode(&cloud, &RipsParams64::default().with_maxscale(low + extra));
        prop_assert_eq!(short(&a, 0), short(&b, 0));
        prop_assert_eq!(short(&a, 1), short(&b, 1));
    }

    #[test]
    fn barcode_structure(rows in cloud_strategy()) {
        let bc = barcode(&from_rows(&rows), &RipsParams64::default());
        prop_assert_eq!(bc.dim0.iter().filter(|i| !i.is_finite()).count(), 1);
        let all = barcode(&from_rows(&rows), &RipsParams64 { keep_zero_length: true, ..RipsParams64::default() });
        prop_assert_eq!(all.dim0.len(), rows.len());
        for bar in bc.dim0.iter().chain(&bc.dim1) {
            prop_assert!(bar.birth <= bar.death);
            prop_assert!(bar.birth >= 0.0);
        }
        prop_assert!(bc.dim1.iter().all(|i| i.is_finite()));
    }
}
