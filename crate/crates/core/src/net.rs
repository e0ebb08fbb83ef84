//! Net data model: topology, embedding, imbalance and overlap detection.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::geom::{unit_toward, GeomError, Point, EPS_DEG};
use crate::scalar::{lit, Scalar};

/// Default "is balanced" threshold on the imbalance norm.
pub const DEFAULT_BALANCE_TOL: f64 = 1e-9;
/// Default overlap tolerance, relative to the bounding-box diagonal.
pub const DEFAULT_OVERLAP_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}`-`{1}`")]
    DuplicateEdge(String, String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("interior vertex `{id}` has degree {degree}, at least 3 required")]
    LowDegree { id: String, degree: usize },
    #[error("vertex `{0}` has no position")]
    MissingPosition(String),
    #[error("vertex `{0}` has a non-finite position")]
    NonFinitePosition(String),
    #[error("edge `{0}`-`{1}` is degenerate")]
    DegenerateEdge(String, String),
    #[error("degenerate edge at vertex `{vertex}`: {source}")]
    Geometry {
        vertex: String,
        #[source]
        source: GeomError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Boundary,
    Interior,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
}

/// Construction rules for [`NetTopology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopologyRules {
    /// Minimum degree of interior vertices.
    pub min_interior_degree: usize,
    pub require_connected: bool,
}

impl Default for TopologyRules {
    fn default() -> Self {
        TopologyRules {
            min_interior_degree: 3,
            require_connected: true,
        }
    }
}

impl TopologyRules {
    /// Rules for subnets, which may keep straight-through degree-2 vertices.
    pub fn subnet() -> Self {
        TopologyRules {
            min_interior_degree: 2,
            require_connected: true,
        }
    }
}

/// Combinatorial graph of a net. Vertex order is insertion order; edges are
/// stored as index pairs whose ids are lexicographically sorted, and the
/// edge list itself is sorted by id pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NetTopology {
    vertices: Vec<Vertex>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    /// Per vertex: (neighbor, edge index), in edge order.
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Interior vertices in ascending id order.
    interior_order: Vec<usize>,
}

impl NetTopology {
    pub fn new<I, J, S>(vertices: I, edges: J) -> Result<Self, NetError>
    where
        I: IntoIterator<Item = (S, VertexKind)>,
        J: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        Self::with_rules(vertices, edges, TopologyRules::default())
    }

    pub fn with_rules<I, J, S>(vertices: I, edges: J, rules: TopologyRules) -> Result<Self, NetError>
    where
        I: IntoIterator<Item = (S, VertexKind)>,
        J: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut verts = Vec::new();
        let mut index = HashMap::new();
        for (id, kind) in vertices {
            let id = id.into();
            if index.insert(id.clone(), verts.len()).is_some() {
                return Err(NetError::DuplicateVertex(id));
            }
            verts.push(Vertex { id, kind });
        }

        let mut edge_set = BTreeMap::new();
        for (a, b) in edges {
            let (a, b): (String, String) = (a.into(), b.into());
            let ia = *index.get(&a).ok_or_else(|| NetError::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| NetError::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(NetError::SelfLoop(a));
            }
            let key = if a < b { (a, b) } else { (b, a) };
            let pair = if verts[ia].id < verts[ib].id { (ia, ib) } else { (ib, ia) };
            if edge_set.insert(key.clone(), pair).is_some() {
                return Err(NetError::DuplicateEdge(key.0, key.1));
            }
        }
        let edges: Vec<(usize, usize)> = edge_set.into_values().collect();

        let mut adjacency = vec![Vec::new(); verts.len()];
        for (e, &(a, b)) in edges.iter().enumerate() {
            adjacency[a].push((b, e));
            adjacency[b].push((a, e));
        }

        for (v, vertex) in verts.iter().enumerate() {
            if vertex.kind == VertexKind::Interior && adjacency[v].len() < rules.min_interior_degree {
                return Err(NetError::LowDegree {
                    id: vertex.id.clone(),
                    degree: adjacency[v].len(),
                });
            }
        }

        let mut interior_order: Vec<usize> = (0..verts.len())
            .filter(|&v| verts[v].kind == VertexKind::Interior)
            .collect();
        interior_order.sort_by(|&a, &b| verts[a].id.cmp(&verts[b].id));

        let topo = NetTopology {
            vertices: verts,
            index,
            edges,
            adjacency,
            interior_order,
        };
        if rules.require_connected && !topo.is_connected() {
            return Err(NetError::Disconnected);
        }
        Ok(topo)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertices.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.vertices[v].kind
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edge ids, canonical and sorted.
    pub fn edge_ids(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges.iter().map(|&(a, b)| (self.id(a), self.id(b)))
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn interior_order(&self) -> &[usize] {
        &self.interior_order
    }

    pub fn boundary_count(&self) -> usize {
        self.vertices.len() - self.interior_order.len()
    }

    pub fn interior_count(&self) -> usize {
        self.interior_order.len()
    }
}

/// A topology with a position for every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedNet<T> {
    topology: Arc<NetTopology>,
    positions: Vec<Point<T>>,
}

impl<T: Scalar> EmbeddedNet<T> {
    /// Embeds `topology` using positions keyed by id.
    pub fn new(topology: NetTopology, positions: &BTreeMap<String, Point<T>>) -> Result<Self, NetError> {
        let pos = topology
            .vertices()
            .iter()
            .map(|v| {
                positions
                    .get(&v.id)
                    .copied()
                    .ok_or_else(|| NetError::MissingPosition(v.id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(Arc::new(topology), pos)
    }

    /// Embeds with positions given in topology vertex order.
    pub fn from_parts(topology: Arc<NetTopology>, positions: Vec<Point<T>>) -> Result<Self, NetError> {
        if positions.len() != topology.vertex_count() {
            let missing = topology
                .vertices()
                .get(positions.len())
                .map(|v| v.id.clone())
                .unwrap_or_default();
            return Err(NetError::MissingPosition(missing));
        }
        let net = EmbeddedNet {
            topology,
            positions,
        };
        net.validate()?;
        Ok(net)
    }

    pub(crate) fn from_parts_unchecked(topology: Arc<NetTopology>, positions: Vec<Point<T>>) -> Self {
        EmbeddedNet {
            topology,
            positions,
        }
    }

    fn validate(&self) -> Result<(), NetError> {
        for (v, p) in self.positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(NetError::NonFinitePosition(self.topology.id(v).to_string()));
            }
        }
        let guard = lit::<T>(EPS_DEG);
        for &(a, b) in self.topology.edges() {
            if !(self.positions[a].distance(self.positions[b]) > guard) {
                return Err(NetError::DegenerateEdge(
                    self.topology.id(a).to_string(),
                    self.topology.id(b).to_string(),
                ));
            }
        }
        Ok(())
    }

    pub fn topology(&self) -> &NetTopology {
        &self.topology
    }

    pub fn shared_topology(&self) -> &Arc<NetTopology> {
        &self.topology
    }

    pub fn positions(&self) -> &[Point<T>] {
        &self.positions
    }

    pub(crate) fn positions_mut(&mut self) -> &mut [Point<T>] {
        &mut self.positions
    }

    pub fn position(&self, id: &str) -> Option<Point<T>> {
        self.topology.index_of(id).map(|v| self.positions[v])
    }

    /// Positions keyed by id.
    pub fn position_map(&self) -> BTreeMap<String, Point<T>> {
        self.topology
            .vertices()
            .iter()
            .zip(&self.positions)
            .map(|(v, p)| (v.id.clone(), *p))
            .collect()
    }

    /// Applies `f` to every position, re-validating the result.
    pub fn map_positions(&self, f: impl Fn(Point<T>) -> Point<T>) -> Result<Self, NetError> {
        Self::from_parts(self.topology.clone(), self.positions.iter().map(|&p| f(p)).collect())
    }

    /// Returns a copy with one vertex moved.
    pub fn with_position(&self, id: &str, p: Point<T>) -> Result<Self, NetError> {
        let v = self
            .topology
            .index_of(id)
            .ok_or_else(|| NetError::UnknownVertex(id.to_string()))?;
        let mut positions = self.positions.clone();
        positions[v] = p;
        Self::from_parts(self.topology.clone(), positions)
    }

    /// Diagonal of the axis-aligned bounding box of all positions.
    pub fn bbox_diagonal(&self) -> T {
        let mut it = self.positions.iter();
        let Some(first) = it.next() else {
            return T::zero();
        };
        let (mut lo, mut hi) = (*first, *first);
        for p in it {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        lo.distance(hi)
    }

    /// Sum of incident unit vectors at vertex index `v`.
    pub fn force_at(&self, v: usize) -> Result<Point<T>, GeomError> {
        force_at(&self.topology, &self.positions, v)
    }

    /// Imbalance vector and its norm at vertex `id`.
    pub fn imbalance(&self, id: &str) -> Result<(Point<T>, T), NetError> {
        let v = self
            .topology
            .index_of(id)
            .ok_or_else(|| NetError::UnknownVertex(id.to_string()))?;
        let s = self.force_at(v).map_err(|source| NetError::Geometry {
            vertex: id.to_string(),
            source,
        })?;
        Ok((s, s.norm()))
    }

    /// Imbalance over all interior vertices.
    pub fn total_report(&self) -> Result<ImbalanceReport<T>, NetError> {
        let mut per_vertex = BTreeMap::new();
        let mut total = T::zero();
        let mut max_norm = T::zero();
        for &v in self.topology.interior_order() {
            let id = self.topology.id(v);
            let s = self.force_at(v).map_err(|source| NetError::Geometry {
                vertex: id.to_string(),
                source,
            })?;
            let norm = s.norm();
            total = total + norm;
            max_norm = max_norm.max(norm);
            per_vertex.insert(id.to_string(), VertexImbalance { vector: s, norm });
        }
        Ok(ImbalanceReport {
            per_vertex,
            total_loss: total,
            max_norm,
        })
    }

    /// Overlap findings using the default tolerance relative to the bounding box.
    pub fn detect_overlaps_default(&self) -> Vec<OverlapFinding> {
        self.detect_overlaps(self.bbox_diagonal() * lit(DEFAULT_OVERLAP_REL_TOL))
    }

    /// Reports coincident or collinear-overlapping edge pairs and vertices
    /// closer than `tol`. An empty result means every edge has weight one.
    pub fn detect_overlaps(&self, tol: T) -> Vec<OverlapFinding> {
        let topo = &self.topology;
        let pos = &self.positions;
        let mut findings = Vec::new();

        for u in 0..pos.len() {
            for v in (u + 1)..pos.len() {
                let d = pos[u].distance(pos[v]);
                if d < tol {
                    let (a, b) = sorted_pair(topo.id(u), topo.id(v));
                    findings.push(OverlapFinding::CloseVertices {
                        a,
                        b,
                        distance: d.to_f64_lossy(),
                    });
                }
            }
        }

        let edges = topo.edges();
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (p1, p2) = (pos[edges[i].0], pos[edges[i].1]);
                let (q1, q2) = (pos[edges[j].0], pos[edges[j].1]);
                let edge_a = (topo.id(edges[i].0).to_string(), topo.id(edges[i].1).to_string());
                let edge_b = (topo.id(edges[j].0).to_string(), topo.id(edges[j].1).to_string());
                let same = |x: Point<T>, y: Point<T>| x.distance(y) < tol;
                if (same(p1, q1) && same(p2, q2)) || (same(p1, q2) && same(p2, q1)) {
                    findings.push(OverlapFinding::CoincidentEdges { edge_a, edge_b });
                    continue;
                }
                if let Some(len) = collinear_overlap(p1, p2, q1, q2, tol) {
                    findings.push(OverlapFinding::CollinearOverlap {
                        edge_a,
                        edge_b,
                        overlap: len.to_f64_lossy(),
                    });
                }
            }
        }
        findings
    }
}

pub(crate) fn force_at<T: Scalar>(topo: &NetTopology, pos: &[Point<T>], v: usize) -> Result<Point<T>, GeomError> {
    let here = pos[v];
    let mut s = Point::origin();
    for &(w, _) in topo.neighbors(v) {
        s = s + unit_toward(here, pos[w])?.as_point();
    }
    Ok(s)
}

fn sorted_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Length of the shared stretch of two segments lying on a common line,
/// when it exceeds `tol`.
fn collinear_overlap<T: Scalar>(p1: Point<T>, p2: Point<T>, q1: Point<T>, q2: Point<T>, tol: T) -> Option<T> {
    let d = p2 - p1;
    let len = d.norm();
    let e = q2 - q1;
    let len_e = e.norm();
    if !(len > T::zero()) || !(len_e > T::zero()) {
        return None;
    }
    let off = |x: Point<T>, a: Point<T>, dir: Point<T>, l: T| (x - a).cross(dir).abs() / l;
    if off(q1, p1, d, len) > tol || off(q2, p1, d, len) > tol {
        return None;
    }
    if off(p1, q1, e, len_e) > tol || off(p2, q1, e, len_e) > tol {
        return None;
    }
    let t1 = (q1 - p1).dot(d) / len;
    let t2 = (q2 - p1).dot(d) / len;
    let lo = t1.min(t2).max(T::zero());
    let hi = t1.max(t2).min(len);
    let shared = hi - lo;
    (shared > tol).then_some(shared)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexImbalance<T> {
    pub vector: Point<T>,
    pub norm: T,
}

/// Per-vertex imbalance over interior vertices, with the total loss (sum of
/// norms) and the maximum norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceReport<T> {
    pub per_vertex: BTreeMap<String, VertexImbalance<T>>,
    pub total_loss: T,
    pub max_norm: T,
}

impl<T: Scalar> ImbalanceReport<T> {
    /// Interior vertices whose norm exceeds `tol`, in id order.
    pub fn unbalanced(&self, tol: T) -> Vec<(String, T)> {
        self.per_vertex
            .iter()
            .filter(|(_, m)| !(m.norm <= tol))
            .map(|(id, m)| (id.clone(), m.norm))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OverlapFinding {
    CoincidentEdges {
        edge_a: (String, String),
        edge_b: (String, String),
    },
    CollinearOverlap {
        edge_a: (String, String),
        edge_b: (String, String),
        overlap: f64,
    },
    CloseVertices {
        a: String,
        b: String,
        distance: f64,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn embed(vs: &[(&str, VertexKind, Point<f64>)], es: &[(&str, &str)], rules: TopologyRules) -> EmbeddedNet<f64> {
        let topo = NetTopology::with_rules(
            vs.iter().map(|(id, k, _)| (id.to_string(), *k)),
            es.iter().map(|(a, b)| (a.to_string(), b.to_string())),
            rules,
        )
        .unwrap();
        let pos = vs.iter().map(|(id, _, q)| (id.to_string(), *q)).collect();
        EmbeddedNet::new(topo, &pos).unwrap()
    }

    use VertexKind::{Boundary as B, Interior as I};

    fn x_net(center: Point<f64>) -> EmbeddedNet<f64> {
        embed(
            &[
                ("n", B, p(-1.0, 1.0)),
                ("e", B, p(1.0, 1.0)),
                ("s", B, p(1.0, -1.0)),
                ("w", B, p(-1.0, -1.0)),
                ("x", I, center),
            ],
            &[("x", "n"), ("x", "e"), ("x", "s"), ("x", "w")],
            TopologyRules::default(),
        )
    }

    #[test]
    fn topology_rejects_invalid_inputs() {
        let dup = NetTopology::new([("a", B), ("a", B)], []);
        assert_eq!(dup.unwrap_err(), NetError::DuplicateVertex("a".into()));
        let self_loop = NetTopology::new([("a", B)], [("a", "a")]);
        assert_eq!(self_loop.unwrap_err(), NetError::SelfLoop("a".into()));
        let dup_edge = NetTopology::new([("a", B), ("b", B)], [("a", "b"), ("b", "a")]);
        assert!(matches!(dup_edge.unwrap_err(), NetError::DuplicateEdge(..)));
        let split = NetTopology::new([("a", B), ("b", B), ("c", B), ("d", B)], [("a", "b"), ("c", "d")]);
        assert_eq!(split.unwrap_err(), NetError::Disconnected);
        let deg2 = NetTopology::new([("a", B), ("m", I), ("b", B)], [("a", "m"), ("m", "b")]);
        assert_eq!(
            deg2.unwrap_err(),
            NetError::LowDegree {
                id: "m".into(),
                degree: 2
            }
        );
        let unknown = NetTopology::new([("a", B)], [("a", "z")]);
        assert_eq!(unknown.unwrap_err(), NetError::UnknownVertex("z".into()));
    }

    #[test]
    fn edges_are_canonical_and_sorted() {
        let t = NetTopology::new([("z", B), ("a", B), ("m", B)], [("z", "a"), ("m", "a")]).unwrap();
        let e: Vec<_> = t.edge_ids().collect();
        assert_eq!(e, vec![("a", "m"), ("a", "z")]);
    }

    #[test]
    fn imbalance_of_collinear_pair_is_zero() {
        let net = embed(
            &[("l", B, p(-1.0, 0.0)), ("v", I, p(0.0, 0.0)), ("r", B, p(1.0, 0.0))],
            &[("v", "l"), ("v", "r")],
            TopologyRules::subnet(),
        );
        let (s, n) = net.imbalance("v").unwrap();
        assert_eq!((s.x, s.y, n), (0.0, 0.0, 0.0));
    }

    #[test]
    fn imbalance_of_right_angle_pair() {
        let net = embed(
            &[("a", B, p(1.0, 0.0)), ("v", I, p(0.0, 0.0)), ("b", B, p(0.0, 1.0))],
            &[("v", "a"), ("v", "b")],
            TopologyRules::subnet(),
        );
        let (s, n) = net.imbalance("v").unwrap();
        assert_eq!((s.x, s.y), (1.0, 1.0));
        assert!((n - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(net.imbalance("nope").unwrap_err(), NetError::UnknownVertex("nope".into()));
    }

    #[test]
    fn single_segment_has_no_loss() {
        let net = embed(&[("a", B, p(0.0, 0.0)), ("b", B, p(1.0, 0.0))], &[("a", "b")], TopologyRules::default());
        let r = net.total_report().unwrap();
        assert_eq!(r.total_loss, 0.0);
        assert!(r.per_vertex.is_empty());
    }

    #[test]
    fn displaced_x_center_is_unbalanced() {
        assert!(x_net(p(0.0, 0.0)).total_report().unwrap().total_loss < 1e-15);
        let r = x_net(p(0.1, 0.0)).total_report().unwrap();
        assert!(r.total_loss > 0.0);
        assert_eq!(r.total_loss, r.max_norm);
    }

    #[test]
    fn overlap_detection() {
        let fan = embed(
            &[("o", B, p(0.0, 0.0)), ("a", B, p(1.0, 0.0)), ("b", B, Point::polar(1.0, std::f64::consts::PI / 3.0))],
            &[("o", "a"), ("o", "b")],
            TopologyRules::default(),
        );
        assert!(fan.detect_overlaps(1e-6).is_empty());

        // Two edges between four vertices placed pairwise on top of each other.
        let twin = EmbeddedNet::from_parts_unchecked(
            Arc::new(
                NetTopology::with_rules(
                    [("a", B), ("b", B), ("c", B), ("d", B)],
                    [("a", "b"), ("c", "d"), ("b", "c")],
                    TopologyRules::default(),
                )
                .unwrap(),
            ),
            vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1e-9), p(0.0, 1e-9)],
        );
        let found = twin.detect_overlaps(1e-6);
        assert_eq!(
            found.iter().filter(|f| matches!(f, OverlapFinding::CoincidentEdges { .. })).count(),
            1
        );

        let chain = embed(
            &[("a", B, p(0.0, 0.0)), ("b", B, p(2.0, 0.0)), ("c", B, p(1.0, 0.0))],
            &[("a", "b"), ("a", "c")],
            TopologyRules::default(),
        );
        let found = chain.detect_overlaps(1e-6);
        assert!(matches!(found.as_slice(), [OverlapFinding::CollinearOverlap { .. }]));
    }
}
