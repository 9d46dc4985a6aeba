//! Identification classes on the checked-in fixtures against a naive
//! label-propagation oracle.

mod common;

use common::{edge_partition_oracle, triangulation, vertex_partition_oracle};
use glueq::triangulation::Triangulation;

const FIXTURES: [&str; 3] = ["fig8.json", "lens5.json", "genus2_double.json"];

fn oracle_agrees(tri: &Triangulation) {
    let expected = edge_partition_oracle(tri);
    let got: Vec<Vec<usize>> =
        tri.edge_classes().iter().map(|c| c.members.clone()).collect();
    assert_eq!(got, expected, "edge classes differ from the oracle partition");

    let expected = vertex_partition_oracle(tri);
    let got: Vec<Vec<usize>> =
        tri.vertex_classes().iter().map(|c| c.corners.clone()).collect();
    assert_eq!(got, expected, "vertex classes differ from the oracle partition");
}

#[test]
fn classes_match_label_propagation() {
    for name in FIXTURES {
        oracle_agrees(&triangulation(name));
    }
}

#[test]
fn every_edge_slot_walked_exactly_once() {
    for name in FIXTURES {
        let tri = triangulation(name);
        let n = tri.num_tetrahedra();
        let total_members: usize = tri.edge_classes().iter().map(|c| c.members.len()).sum();
        let total_degree: usize = tri.edge_classes().iter().map(|c| c.degree()).sum();
        assert_eq!(total_members, 6 * n);
        assert_eq!(total_degree, 6 * n);
    }
}

#[test]
fn knot_complement_fixture_combinatorics() {
    let tri = triangulation("fig8.json");
    assert_eq!(tri.num_tetrahedra(), 2);
    let degrees: Vec<usize> = tri.edge_classes().iter().map(|c| c.degree()).collect();
    assert_eq!(degrees, vec![6, 6]);
    assert_eq!(tri.vertex_classes().len(), 1);
    // The single vertex has a torus link, so the complex is not a manifold
    // at that point.
    assert_eq!(tri.vertex_link_characteristics(), vec![0]);
    assert!(!tri.is_manifold());
}

#[test]
fn lens_fixture_combinatorics() {
    let tri = triangulation("lens5.json");
    assert_eq!(tri.num_tetrahedra(), 5);
    let mut degrees: Vec<usize> = tri.edge_classes().iter().map(|c| c.degree()).collect();
    degrees.sort_unstable();
    // Two order-5 circles (the core curves of the two solid tori) and five
    // degree-4 spokes.
    assert_eq!(degrees, vec![4, 4, 4, 4, 4, 5, 5]);
    assert_eq!(tri.vertex_classes().len(), 2);
    assert_eq!(tri.vertex_link_characteristics(), vec![2, 2]);
    assert!(tri.is_manifold());
}

#[test]
fn double_fixture_combinatorics() {
    let tri = triangulation("genus2_double.json");
    assert_eq!(tri.num_tetrahedra(), 8);
    assert_eq!(tri.edge_classes().len(), 9);
    assert_eq!(tri.vertex_classes().len(), 1);
    assert_eq!(tri.vertex_link_characteristics(), vec![2]);
    assert!(tri.is_manifold());
}

#[test]
fn serialization_round_trips() {
    for name in FIXTURES {
        let text = common::load_fixture(name);
        let tri = Triangulation::from_json_str(&text).unwrap();
        let back = Triangulation::from_json_str(&tri.to_json_string()).unwrap();
        assert_eq!(tri.to_json_string(), back.to_json_string());
    }
}
