#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use geonet::angles::solve_angles;
use geonet::builder::{build_net25, topology_template, ConstructionResult, NetFamily};
use geonet::geom::Point;
use geonet::net::{EmbeddedNet, NetTopology, VertexKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type P = Point<f64>;
pub type Net = EmbeddedNet<f64>;

pub fn exact() -> (geonet::AngleSolution, ConstructionResult<f64>) {
    let sol = solve_angles(1e-14_f64).unwrap();
    let res = build_net25(&sol).unwrap();
    (sol, res)
}

pub fn net25() -> Net {
    exact().1.net
}

/// Interior vertices shifted by independent uniform noise in `[-amp, amp]²`.
pub fn jitter(net: &Net, seed: u64, amp: f64) -> Net {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = net.positions().to_vec();
    for &v in net.topology().interior_order() {
        pos[v] = pos[v] + Point::new(rng.gen_range(-amp..=amp), rng.gen_range(-amp..=amp));
    }
    EmbeddedNet::from_parts(net.shared_topology().clone(), pos).unwrap()
}

pub fn rmsd(a: &Net, b: &Net) -> f64 {
    let n = a.positions().len() as f64;
    let sum: f64 = a
        .positions()
        .iter()
        .zip(b.positions())
        .map(|(p, q)| {
            let d = *p - *q;
            d.dot(d)
        })
        .sum();
    (sum / n).sqrt()
}

pub fn net_from(vertices: &[(&str, bool, P)], edges: &[(&str, &str)], rules: geonet::net::TopologyRules) -> Net {
    let topo = NetTopology::with_rules(
        vertices.iter().map(|&(id, b, _)| {
            (id, if b { VertexKind::Boundary } else { VertexKind::Interior })
        }),
        edges.iter().copied(),
        rules,
    )
    .unwrap();
    let pos: BTreeMap<String, P> = vertices.iter().map(|&(id, _, p)| (id.to_string(), p)).collect();
    EmbeddedNet::new(topo, &pos).unwrap()
}

/// Square corners joined to the centre.
pub fn x_net() -> Net {
    net_from(
        &[
            ("a", true, Point::new(0.0, 0.0)),
            ("b", true, Point::new(1.0, 0.0)),
            ("c", true, Point::new(1.0, 1.0)),
            ("d", true, Point::new(0.0, 1.0)),
            ("o", false, Point::new(0.5, 0.5)),
        ],
        &[("a", "o"), ("b", "o"), ("c", "o"), ("d", "o")],
        Default::default(),
    )
}

/// The two Steiner trees on the unit square, one with a horizontal bridge
/// (`s`, `t`) and one with a vertical bridge (`u`, `w`), overlaid.
pub fn two_trees() -> Net {
    let k = 0.5 / 3f64.sqrt();
    net_from(
        &[
            ("a", true, Point::new(0.0, 0.0)),
            ("b", true, Point::new(1.0, 0.0)),
            ("c", true, Point::new(1.0, 1.0)),
            ("d", true, Point::new(0.0, 1.0)),
            ("s", false, Point::new(k, 0.5)),
            ("t", false, Point::new(1.0 - k, 0.5)),
            ("u", false, Point::new(0.5, k)),
            ("w", false, Point::new(0.5, 1.0 - k)),
        ],
        &[
            ("a", "s"),
            ("d", "s"),
            ("s", "t"),
            ("b", "t"),
            ("c", "t"),
            ("a", "u"),
            ("b", "u"),
            ("u", "w"),
            ("c", "w"),
            ("d", "w"),
        ],
        Default::default(),
    )
}

pub fn horizontal_tree_edges() -> Vec<(String, String)> {
    edge_list(&[("a", "s"), ("d", "s"), ("s", "t"), ("b", "t"), ("c", "t")])
}

pub fn vertical_tree_edges() -> Vec<(String, String)> {
    edge_list(&[("a", "u"), ("b", "u"), ("u", "w"), ("c", "w"), ("d", "w")])
}

pub fn edge_list(e: &[(&str, &str)]) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = e
        .iter()
        .map(|&(a, b)| if a < b { (a.into(), b.into()) } else { (b.into(), a.into()) })
        .collect();
    v.sort();
    v
}

/// The 25-net or octagon-net topology with positions drawn uniformly from
/// `[-3, 3]²`, rejecting draws with an edge shorter than 0.05.
pub fn random_net(seed: u64) -> Net {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fam = if seed % 2 == 0 { NetFamily::t3() } else { NetFamily::t2() };
    let topo: Arc<NetTopology> = topology_template::<f64>(fam).unwrap().shared_topology();
    loop {
        let pos: Vec<P> = (0..topo.vertex_count())
            .map(|_| Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            .collect();
        let ok = topo.edges().iter().all(|&(a, b)| pos[a].distance(pos[b]) > 0.05);
        if ok {
            return EmbeddedNet::from_parts(topo.clone(), pos).unwrap();
        }
    }
}

/// Central finite difference of minus the incident edge length at `v`.
pub fn fd_force(net: &Net, v: usize, h: f64) -> P {
    let energy = |x: P| -> f64 {
        net.topology()
            .neighbors(v)
            .iter()
            .map(|&(w, _)| x.distance(net.positions()[w]))
            .sum()
    };
    let x = net.positions()[v];
    let gx = (energy(x + Point::new(h, 0.0)) - energy(x - Point::new(h, 0.0))) / (2.0 * h);
    let gy = (energy(x + Point::new(0.0, h)) - energy(x - Point::new(0.0, h))) / (2.0 * h);
    Point::new(-gx, -gy)
}

pub fn read_figure() -> BTreeMap<String, P> {
    let text = include_str!("../fixtures/figure_net25.csv");
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), Point::new(f[1].parse().unwrap(), f[2].parse().unwrap()))
        })
        .collect()
}

pub fn read_figure_edges() -> Vec<(String, String)> {
    include_str!("../fixtures/figure_net25_edges.csv")
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.to_string(), b.to_string())
        })
        .collect()
}
