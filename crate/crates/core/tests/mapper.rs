mod common;

use std::collections::BTreeSet;

use common::rng;
use filtertop::{
    build_cover, cycle_rank, loop_rank, mapper_graph, pca_lens, sample, Error, MapperGraph64, MapperParams64,
    MetricMode, PointCloud64, Shape, ShapeSpec,
};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

/// Ellipse with semi-axes 3 and 1 placed in a random plane of R^9.
fn ellipse_in_9d(n: usize, seed: u64) -> PointCloud64 {
    let mut rng = rng(seed);
    let raw = DMatrix::from_fn(9, 2, |_, _| rng.random_range(-1.0..1.0));
    let basis = raw.qr().q();
    let offset: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64 + 0.1;
        let (x, y) = (3.0 * t.cos(), t.sin());
        let row: Vec<f64> = (0..9).map(|r| offset[r] + x * basis[(r, 0)] + y * basis[(r, 1)]).collect();
        rows.push(row);
    }
    PointCloud64::from_rows(&rows).unwrap()
}

#[test]
fn pca_lens_matches_dense_eigensolver() {
    for seed in 0..5 {
        let cloud = ellipse_in_9d(60, seed);
        let n = cloud.len();
        let data = DMatrix::from_row_slice(n, 9, cloud.as_flat());
        let mean = data.row_mean();
        let centered = DMatrix::from_fn(n, 9, |i, j| data[(i, j)] - mean[j]);
        let cov = centered.transpose() * &centered / n as f64;
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..9).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

        let lens = pca_lens(&cloud, 2).unwrap();
        for (axis, &col) in order[..2].iter().enumerate() {
            let mut v = eig.eigenvectors.column(col).into_owned();
            let big = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if big < 0.0 {
                v = -v;
            }
            let projected = &centered * v;
            for i in 0..n {
                assert!((lens.value(i, axis) - projected[i]).abs() < 1e-9, "seed {seed} axis {axis} point {i}");
            }
        }
        // the ellipse's own coordinates come back as the lens
        let spread: f64 = lens.axis(0).map(|x| x.abs()).fold(0.0, f64::max);
        assert!((spread - 3.0).abs() < 0.01, "{spread}");
    }
}

#[test]
fn pca_lens_is_deterministic_and_rejects_flat_data() {
    let cloud = ellipse_in_9d(40, 9);
    assert_eq!(pca_lens(&cloud, 2).unwrap(), pca_lens(&cloud, 2).unwrap());
    let line = PointCloud64::from_rows(&[[-2.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
    let lens = pca_lens(&line, 1).unwrap();
    assert_eq!(lens.axis(0).collect::<Vec<_>>(), vec![-2.0, -1.0, 1.0, 2.0]);
    assert!(matches!(pca_lens(&line, 2), Err(Error::DegenerateCovariance { .. })));
}

#[test]
fn overlap_formula_across_parameters() {
    let lens = filtertop::Lens::<f64>::from_flat(1, vec![-0.7, 4.3]).unwrap();
    for gain in [1.5f64, 2.0, 3.0, 5.0] {
        for res in [5, 30] {
            let axis = build_cover(&lens, res, gain).unwrap().axes[0];
            for i in 0..res - 1 {
                assert!((axis.overlap_fraction(i) - (1.0 - 1.0 / gain)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn circle_example_is_one_loop() {
    let cloud: PointCloud64 = sample(&ShapeSpec::new(Shape::Circle2d, 200).noise(0.02).seed(1));
    let params = MapperParams64::new(10, 2.0).with_metric(MetricMode::Euclidean).with_lens_dims(1);
    let graph = mapper_graph(&cloud, &params).unwrap();
    assert_eq!(graph.component_count(), 1);
    assert_eq!(cycle_rank(&graph), 1);
    assert_eq!(loop_rank(&graph), 1);
}

#[test]
fn separated_blobs_stay_apart() {
    let mut rng = rng(4);
    let mut rows = Vec::new();
    for center in [-10.0, 10.0] {
        for _ in 0..50 {
            rows.push([center + rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)]);
        }
    }
    let cloud = PointCloud64::from_rows(&rows).unwrap();
    let params = MapperParams64::new(10, 2.0).with_metric(MetricMode::Euclidean).with_lens_dims(1);
    let graph = mapper_graph(&cloud, &params).unwrap();
    assert!(graph.component_count() >= 2);
    for &[a, b] in &graph.edges {
        let side = |n: usize| graph.nodes[n].members[0] < 50;
        assert_eq!(side(a), side(b));
    }
}

fn check_structure(cloud: &PointCloud64, graph: &MapperGraph64) -> Result<(), TestCaseError> {
    let mut seen = vec![false; cloud.len()];
    for (id, node) in graph.nodes.iter().enumerate() {
        prop_assert_eq!(node.id, id);
        prop_assert!(node.size >= 1);
        prop_assert_eq!(node.size, node.members.len());
        for &m in &node.members {
            seen[m] = true;
        }
    }
    prop_assert!(seen.iter().all(|&s| s), "a point is in no node");
    let edges: BTreeSet<[usize; 2]> = graph.edges.iter().copied().collect();
    prop_assert_eq!(edges.len(), graph.edges.len());
    for a in 0..graph.nodes.len() {
        for b in a + 1..graph.nodes.len() {
            let ma: BTreeSet<usize> = graph.nodes[a].members.iter().copied().collect();
            let shares = graph.nodes[b].members.iter().any(|m| ma.contains(m));
            prop_assert_eq!(shares, edges.contains(&[a, b]), "nodes {} and {}", a, b);
        }
    }
    prop_assert!(loop_rank(graph) <= cycle_rank(graph));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn graph_invariants(
        rows in prop::collection::vec([-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0], 3..80),
        res in 1usize..12,
        gain in 1.2f64..4.0,
        dims in 1usize..=2,
    ) {
        let cloud = PointCloud64::from_rows(&rows).unwrap();
        let params = MapperParams64::new(res, gain).with_metric(MetricMode::Euclidean).with_lens_dims(dims);
        match mapper_graph(&cloud, &params) {
            Ok(graph) => {
                check_structure(&cloud, &graph)?;
                prop_assert_eq!(&graph, &mapper_graph(&cloud, &params).unwrap());
            }
            Err(Error::DegenerateCovariance { .. }) | Err(Error::ZeroRange { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn gain_two_bounds_memberships(values in prop::collection::vec(-5.0f64..5.0, 2..60), res in 1usize..20, gain in 1.05f64..=2.0) {
        let lens = filtertop::Lens::from_flat(1, values.clone()).unwrap();
        if let Ok(cover) = build_cover(&lens, res, gain) {
            for &v in &values {
                let hits = cover.axes[0].containing(v).count();
                prop_assert!((1..=2).contains(&hits));
            }
        }
    }
}
