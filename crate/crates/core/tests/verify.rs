mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use common::*;
use geonet::angles::solve_angles;
use geonet::builder::{build_net25_from_params, ConstructionParams};
use geonet::geom::{Point, UnitVector};
use geonet::net::{EmbeddedNet, NetTopology, TopologyRules, VertexKind};
use geonet::verify::{
    balanced_subsets, balanced_subsets_naive, check_lemmas, incident_directions, is_irreducible, verify_geodesic_net,
    verify_with_rules, Irreducibility, SearchOptions, Witness, DEFAULT_SUBSET_TOL,
};
use proptest::prelude::*;

fn witness_reverifies(net: &Net, w: &Witness) {
    let sub = w.to_net(net).unwrap();
    let report = verify_with_rules(&sub, DEFAULT_SUBSET_TOL, TopologyRules::subnet());
    assert!(report.passed(), "{report:?}");
    for id in &w.boundary {
        let v = net.topology().index_of(id).unwrap();
        assert_eq!(net.topology().kind(v), VertexKind::Boundary, "{id} must be a parent boundary vertex");
    }
    assert!(w.edges.len() < net.topology().edge_count());
}

/// Vertices allowing only nothing or everything keep all or none of their edges.
fn cascade_holds(net: &Net, w: &Witness) {
    let topo = net.topology();
    let kept: std::collections::BTreeSet<(String, String)> = w.edges.iter().cloned().collect();
    for &v in topo.interior_order() {
        let dirs = incident_directions(net, v).unwrap();
        let subsets = balanced_subsets(&dirs, DEFAULT_SUBSET_TOL);
        if subsets.len() != 2 {
            continue;
        }
        let count = topo
            .neighbors(v)
            .iter()
            .filter(|&&(_, e)| {
                let (a, b) = topo.edges()[e];
                kept.contains(&(topo.id(a).to_string(), topo.id(b).to_string()))
            })
            .count();
        assert!(count == 0 || count == topo.degree(v), "{}", topo.id(v));
    }
}

#[test]
fn x_net_is_reducible_by_a_diagonal() {
    let net = x_net();
    let out = is_irreducible(&net, &SearchOptions::default()).unwrap();
    assert_eq!(out.verdict, Irreducibility::No);
    let w = out.witness.unwrap();
    assert_eq!(w.edges, edge_list(&[("a", "o"), ("c", "o")]));
    assert_eq!(w.boundary, vec!["a".to_string(), "c".to_string()]);
    witness_reverifies(&net, &w);
}

#[test]
fn overlaid_trees_reduce_to_one_tree() {
    let net = two_trees();
    assert!(verify_geodesic_net(&net, 1e-12).passed());
    for minimal in [false, true] {
        let opts = SearchOptions { minimal, ..Default::default() };
        let out = is_irreducible(&net, &opts).unwrap();
        assert_eq!(out.verdict, Irreducibility::No);
        let mut w = out.witness.unwrap();
        w.edges.sort();
        assert!(w.edges == horizontal_tree_edges() || w.edges == vertical_tree_edges(), "{w:?}");
        witness_reverifies(&net, &w);
        cascade_holds(&net, &w);
    }
}

#[test]
fn minimal_mode_finds_the_smallest_witness() {
    // A Y tree plus a separate straight edge between two extra boundary points
    // routed through a degree-4 crossing that admits a collinear pair.
    let k = 0.5 / 3f64.sqrt();
    let net = net_from(
        &[
            ("a", true, Point::new(0.0, 0.0)),
            ("b", true, Point::new(1.0, 0.0)),
            ("c", true, Point::new(1.0, 1.0)),
            ("d", true, Point::new(0.0, 1.0)),
            ("s", false, Point::new(k, 0.5)),
            ("t", false, Point::new(1.0 - k, 0.5)),
            ("x", true, Point::new(0.5, -1.0)),
            ("y", true, Point::new(0.5, 2.0)),
            ("m", false, Point::new(0.5, 0.5)),
        ],
        &[
            ("a", "s"),
            ("d", "s"),
            ("s", "m"),
            ("m", "t"),
            ("b", "t"),
            ("c", "t"),
            ("x", "m"),
            ("m", "y"),
        ],
        Default::default(),
    );
    let opts = SearchOptions {
        minimal: true,
        ..Default::default()
    };
    let w = is_irreducible(&net, &opts).unwrap().witness.unwrap();
    assert_eq!(w.edges.len(), 2);
    witness_reverifies(&net, &w);
}

#[test]
fn net25_cascade_premise() {
    let net = net25();
    let topo = net.topology();
    for &v in topo.interior_order() {
        let dirs = incident_directions(&net, v).unwrap();
        let subsets = balanced_subsets(&dirs, DEFAULT_SUBSET_TOL);
        let full: Vec<usize> = (0..topo.degree(v)).collect();
        assert_eq!(subsets.first(), Some(&vec![]));
        assert_eq!(subsets.last(), Some(&full));
        if topo.degree(v) == 3 {
            assert_eq!(subsets.len(), 2, "{}", topo.id(v));
        }
        // Crossing points of two straight lines admit each line separately.
        if topo.id(v).starts_with('c') {
            assert_eq!(subsets.len(), 8, "{}", topo.id(v));
        }
    }
    assert_eq!(is_irreducible(&net, &SearchOptions::default()).unwrap().verdict, Irreducibility::Yes);
}

#[test]
fn degree_two_interior_fails_degree_check() {
    let net = net_from(
        &[
            ("a", true, Point::new(0.0, 0.0)),
            ("b", true, Point::new(2.0, 0.0)),
            ("v", false, Point::new(1.0, 0.0)),
        ],
        &[("a", "v"), ("v", "b")],
        TopologyRules::subnet(),
    );
    let r = verify_geodesic_net(&net, 1e-9);
    assert!(r.balance_pass);
    assert!(!r.degree_pass);
    assert_eq!(r.low_degree, vec![("v".to_string(), 2)]);
}

#[test]
fn lemma_battery_detects_wrong_beta() {
    let sol = solve_angles(1e-14_f64).unwrap();
    let params = ConstructionParams::from_angles(sol.alpha, sol.beta + 0.01).unwrap();
    let res = build_net25_from_params(&params).unwrap();
    let r = check_lemmas(&res, &sol).unwrap();
    assert!(!r.passed());
    assert!(r.a32_direction_deviation > 5e-3);
    assert!(r.reflex_angle_deviation.iter().all(|&d| d >= 0.0));
}

fn relabel(net: &Net, prefix: &[u32]) -> Net {
    let topo = net.topology();
    let name = |v: usize| format!("v{:04}_{}", prefix[v], topo.id(v));
    let new = NetTopology::new(
        (0..topo.vertex_count()).map(|v| (name(v), topo.kind(v))),
        topo.edges().iter().map(|&(a, b)| (name(a), name(b))),
    )
    .unwrap();
    let pos: BTreeMap<String, P> = (0..topo.vertex_count()).map(|v| (name(v), net.positions()[v])).collect();
    EmbeddedNet::new(new, &pos).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdicts_survive_similarity_and_relabeling(
        theta in -PI..PI,
        scale in 0.05..20.0f64,
        tx in -10.0..10.0f64,
        ty in -10.0..10.0f64,
        prefix in prop::collection::vec(0u32..10_000, 29),
    ) {
        let opts = SearchOptions::default();
        for (net, expected) in [(net25(), Irreducibility::Yes), (two_trees(), Irreducibility::No), (x_net(), Irreducibility::No)] {
            let moved = net.map_positions(|p| (p * scale).rotate(theta) + Point::new(tx, ty)).unwrap();
            let renamed = relabel(&net, &prefix);
            for variant in [&moved, &renamed] {
                let out = is_irreducible(variant, &opts).unwrap();
                prop_assert_eq!(out.verdict, expected);
                if let Some(w) = &out.witness {
                    witness_reverifies(variant, w);
                }
            }
        }
    }

    #[test]
    fn fast_subsets_equal_naive(
        angles in prop::collection::vec(0.0..2.0 * PI, 1..=6),
        mirror in prop::collection::vec(any::<bool>(), 6),
        tol in prop::sample::select(vec![1e-12, 1e-9, 1e-7, 1e-3, 0.5]),
    ) {
        // Add antipodes for some directions so balanced pairs actually occur.
        let mut all = angles.clone();
        for (a, m) in angles.iter().zip(&mirror) {
            if *m && all.len() < 6 {
                all.push(a + PI);
            }
        }
        let dirs: Vec<UnitVector<f64>> = all.iter().map(|&a| UnitVector::from_angle(a)).collect();
        prop_assert_eq!(balanced_subsets(&dirs, tol), balanced_subsets_naive(&dirs, tol));
    }
}
