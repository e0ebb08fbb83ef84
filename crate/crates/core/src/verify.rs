//! Geodesic-net verification, irreducibility search and the lemma battery
//! for the 25-vertex construction.
//!
//! The irreducibility search treats every edge as a 0/1 variable. Each
//! interior vertex constrains the set of its retained incident edges to one
//! of its balanced subsets (the empty set always among them); boundary
//! vertices are unconstrained. Any nonempty, proper solution contains a
//! connected proper subnet, so a search over edges `e0` with `e0` retained
//! and all earlier edges dropped enumerates every candidate exactly once.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::angles::{side_long, AngleSolution};
use crate::builder::{quadrant, ConstructionResult, Role};
use crate::geom::{angle_ccw, line_intersection, project_onto_line, GeomError, Point, Triangle, UnitVector};
use crate::net::{EmbeddedNet, NetError, NetTopology, OverlapFinding, TopologyRules, VertexKind};
use crate::scalar::{circular_distance, lit, Scalar};

/// Tolerance for deciding that a subset of unit directions sums to zero.
pub const DEFAULT_SUBSET_TOL: f64 = 1e-7;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
/// Tolerance applied to every lemma check.
pub const LEMMA_TOL: f64 = 1e-9;
/// Largest vertex degree accepted by [`balanced_subsets`].
pub const MAX_SUBSET_DEGREE: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("search budget of {0} nodes exhausted")]
    SearchBudgetExceeded(u64),
    #[error("vertex `{id}` has degree {degree}, above the supported {MAX_SUBSET_DEGREE}")]
    DegreeTooLarge { id: String, degree: usize },
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    Yes,
    No,
    NotChecked,
}

/// A proper subnet: retained edges plus the vertices that are unbalanced
/// inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub edges: Vec<(String, String)>,
    pub boundary: Vec<String>,
}

impl Witness {
    /// Re-embeds the witness as its own net, positions taken from `parent`.
    /// Straight-through degree-2 vertices are allowed.
    pub fn to_net<T: Scalar>(&self, parent: &EmbeddedNet<T>) -> Result<EmbeddedNet<T>, NetError> {
        let used: BTreeSet<&str> = self.edges.iter().flat_map(|(a, b)| [a.as_str(), b.as_str()]).collect();
        let boundary: BTreeSet<&str> = self.boundary.iter().map(String::as_str).collect();
        let topo = NetTopology::with_rules(
            used.iter().map(|&id| {
                let kind = if boundary.contains(id) {
                    VertexKind::Boundary
                } else {
                    VertexKind::Interior
                };
                (id.to_string(), kind)
            }),
            self.edges.iter().cloned(),
            TopologyRules::subnet(),
        )?;
        let mut pos = BTreeMap::new();
        for &id in &used {
            let p = parent
                .position(id)
                .ok_or_else(|| NetError::UnknownVertex(id.to_string()))?;
            pos.insert(id.to_string(), p);
        }
        EmbeddedNet::new(topo, &pos)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub pass: bool,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub balance_pass: bool,
    /// Interior vertices above the balance tolerance, with their norms.
    pub unbalanced: Vec<(String, f64)>,
    pub overlap_pass: bool,
    pub overlaps: Vec<OverlapFinding>,
    pub degree_pass: bool,
    pub low_degree: Vec<(String, usize)>,
    pub lemma_checks: Vec<LemmaCheck>,
    pub irreducible: Irreducibility,
    pub witness: Option<Witness>,
}

/// One reportable outcome, used for tabular export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub check: String,
    pub subject: String,
    pub value: f64,
    pub pass: bool,
}

impl VerificationReport {
    /// True when every performed check passed and the net is not reducible.
    pub fn passed(&self) -> bool {
        self.balance_pass
            && self.overlap_pass
            && self.degree_pass
            && self.lemma_checks.iter().all(|c| c.pass)
            && self.irreducible != Irreducibility::No
    }

    /// Failures and lemma outcomes, one per row.
    pub fn findings(&self) -> Vec<Finding> {
        let mut out = Vec::new();
        for (id, norm) in &self.unbalanced {
            out.push(Finding {
                check: "balance".into(),
                subject: id.clone(),
                value: *norm,
                pass: false,
            });
        }
        for f in &self.overlaps {
            let (subject, value) = match f {
                OverlapFinding::CoincidentEdges { edge_a, edge_b } => {
                    (format!("{}-{} {}-{}", edge_a.0, edge_a.1, edge_b.0, edge_b.1), 0.0)
                }
                OverlapFinding::CollinearOverlap { edge_a, edge_b, overlap } => {
                    (format!("{}-{} {}-{}", edge_a.0, edge_a.1, edge_b.0, edge_b.1), *overlap)
                }
                OverlapFinding::CloseVertices { a, b, distance } => (format!("{a} {b}"), *distance),
            };
            out.push(Finding {
                check: "overlap".into(),
                subject,
                value,
                pass: false,
            });
        }
        for (id, degree) in &self.low_degree {
            out.push(Finding {
                check: "degree".into(),
                subject: id.clone(),
                value: *degree as f64,
                pass: false,
            });
        }
        for c in &self.lemma_checks {
            out.push(Finding {
                check: "lemma".into(),
                subject: c.name.clone(),
                value: c.max_deviation,
                pass: c.pass,
            });
        }
        if let Some(w) = &self.witness {
            let subject = w.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(" ");
            out.push(Finding {
                check: "irreducibility".into(),
                subject,
                value: w.edges.len() as f64,
                pass: false,
            });
        }
        out
    }
}

/// Balance, overlap and degree checks with the default topology rules.
pub fn verify_geodesic_net<T: Scalar>(net: &EmbeddedNet<T>, tol: T) -> VerificationReport {
    verify_with_rules(net, tol, TopologyRules::default())
}

/// As [`verify_geodesic_net`], with the minimum interior degree taken from `rules`.
pub fn verify_with_rules<T: Scalar>(net: &EmbeddedNet<T>, tol: T, rules: TopologyRules) -> VerificationReport {
    let topo = net.topology();
    let mut unbalanced = Vec::new();
    let mut low_degree = Vec::new();
    for &v in topo.interior_order() {
        let norm = net.force_at(v).map(Point::norm).unwrap_or(T::nan());
        if !(norm <= tol) {
            unbalanced.push((topo.id(v).to_string(), norm.to_f64_lossy()));
        }
        if topo.degree(v) < rules.min_interior_degree {
            low_degree.push((topo.id(v).to_string(), topo.degree(v)));
        }
    }
    let overlaps = net.detect_overlaps_default();
    VerificationReport {
        balance_pass: unbalanced.is_empty(),
        unbalanced,
        overlap_pass: overlaps.is_empty(),
        overlaps,
        degree_pass: low_degree.is_empty(),
        low_degree,
        lemma_checks: Vec::new(),
        irreducible: Irreducibility::NotChecked,
        witness: None,
    }
}

fn subset_masks<T: Scalar>(dirs: &[UnitVector<T>], tol: T) -> Vec<u32> {
    assert!(dirs.len() <= MAX_SUBSET_DEGREE, "at most {MAX_SUBSET_DEGREE} directions");
    let n = dirs.len();
    let mut sums = vec![Point::origin(); 1 << n];
    let mut out = vec![0u32];
    for mask in 1u32..(1 << n) {
        let high = 31 - mask.leading_zeros();
        let rest = mask & !(1 << high);
        // Accumulating in ascending bit order keeps rounding identical to a
        // straight left-to-right sum.
        sums[mask as usize] = sums[rest as usize] + dirs[high as usize].as_point();
        if mask.count_ones() >= 2 && sums[mask as usize].norm() <= tol {
            out.push(mask);
        }
    }
    out
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

/// Index subsets of `dirs` whose unit vectors sum to norm at most `tol`.
///
/// The empty set is always first; singletons are never included. Subsets
/// are listed in ascending bitmask order. Panics above sixteen directions.
pub fn balanced_subsets<T: Scalar>(dirs: &[UnitVector<T>], tol: T) -> Vec<Vec<usize>> {
    subset_masks(dirs, tol).into_iter().map(mask_to_indices).collect()
}

/// Direct enumeration of every subset, for cross-checking [`balanced_subsets`].
pub fn balanced_subsets_naive<T: Scalar>(dirs: &[UnitVector<T>], tol: T) -> Vec<Vec<usize>> {
    let n = dirs.len();
    let mut out = vec![Vec::new()];
    for mask in 1u32..(1 << n) {
        let idx = mask_to_indices(mask);
        if idx.len() < 2 {
            continue;
        }
        let mut s = Point::origin();
        for &i in &idx {
            s = s + dirs[i].as_point();
        }
        if s.norm() <= tol {
            out.push(idx);
        }
    }
    out
}

/// Unit directions of the incident edges at `v`, in adjacency order.
pub fn incident_directions<T: Scalar>(net: &EmbeddedNet<T>, v: usize) -> Result<Vec<UnitVector<T>>, GeomError> {
    let here = net.positions()[v];
    net.topology()
        .neighbors(v)
        .iter()
        .map(|&(w, _)| crate::geom::unit_toward(here, net.positions()[w]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub subset_tol: f64,
    pub node_budget: u64,
    /// Return a witness with the fewest edges instead of the first found.
    pub minimal: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            subset_tol: DEFAULT_SUBSET_TOL,
            node_budget: DEFAULT_NODE_BUDGET,
            minimal: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub verdict: Irreducibility,
    pub witness: Option<Witness>,
    pub nodes: u64,
}

const UNKNOWN: i8 = -1;

struct Search<'a> {
    topo: &'a NetTopology,
    /// Allowed retained masks per vertex; `None` for boundary vertices.
    allowed: Vec<Option<Vec<u32>>>,
    assign: Vec<i8>,
    trail: Vec<usize>,
    ones: usize,
    max_ones: usize,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn set(&mut self, e: usize, value: i8) -> bool {
        match self.assign[e] {
            UNKNOWN => {
                self.assign[e] = value;
                self.trail.push(e);
                if value == 1 {
                    self.ones += 1;
                }
                self.ones <= self.max_ones
            }
            current => current == value,
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let e = self.trail.pop().expect("trail nonempty");
            if self.assign[e] == 1 {
                self.ones -= 1;
            }
            self.assign[e] = UNKNOWN;
        }
    }

    /// Known bits and values of the incident edges at `v`.
    fn known(&self, v: usize) -> (u32, u32, bool) {
        let mut known = 0;
        let mut values = 0;
        let mut open = false;
        for (bit, &(_, e)) in self.topo.neighbors(v).iter().enumerate() {
            match self.assign[e] {
                UNKNOWN => open = true,
                1 => {
                    known |= 1 << bit;
                    values |= 1 << bit;
                }
                _ => known |= 1 << bit,
            }
        }
        (known, values, open)
    }

    fn compatible(&self, v: usize) -> Vec<u32> {
        let (known, values, _) = self.known(v);
        self.allowed[v]
            .as_ref()
            .map(|masks| masks.iter().copied().filter(|m| m & known == values).collect())
            .unwrap_or_default()
    }

    /// Forces edges on which every compatible mask agrees, until fixpoint.
    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        while let Some(v) = queue.pop() {
            if self.allowed[v].is_none() {
                continue;
            }
            let masks = self.compatible(v);
            if masks.is_empty() {
                return false;
            }
            let all = masks.iter().fold(u32::MAX, |a, &m| a & m);
            let none = masks.iter().fold(0, |a, &m| a | m);
            for (bit, &(w, e)) in self.topo.neighbors(v).iter().enumerate() {
                if self.assign[e] != UNKNOWN {
                    continue;
                }
                let forced = if all & (1 << bit) != 0 {
                    1
                } else if none & (1 << bit) == 0 {
                    0
                } else {
                    continue;
                };
                if !self.set(e, forced) {
                    return false;
                }
                queue.push(w);
                queue.push(v);
            }
        }
        true
    }

    /// Depth-first search for a complete consistent assignment that is not
    /// the full edge set. Leaves the assignment in place on success.
    fn solve(&mut self) -> Result<bool, VerifyError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(VerifyError::SearchBudgetExceeded(self.budget));
        }
        let mut best: Option<(usize, Vec<u32>)> = None;
        for &v in self.topo.interior_order() {
            if !self.known(v).2 {
                continue;
            }
            let masks = self.compatible(v);
            if best.as_ref().is_none_or(|(_, b)| masks.len() < b.len()) {
                best = Some((v, masks));
            }
        }
        let Some((v, masks)) = best else {
            // Only edges between boundary vertices remain open; dropping them
            // keeps the solution consistent.
            let open: Vec<usize> = (0..self.assign.len()).filter(|&e| self.assign[e] == UNKNOWN).collect();
            for e in open {
                self.set(e, 0);
            }
            return Ok(self.assign.iter().any(|&x| x == 0));
        };
        for mask in masks {
            let mark = self.trail.len();
            let mut ok = true;
            let mut queue = Vec::new();
            for (bit, &(w, e)) in self.topo.neighbors(v).iter().enumerate() {
                if !self.set(e, ((mask >> bit) & 1) as i8) {
                    ok = false;
                    break;
                }
                queue.push(w);
            }
            if ok && self.propagate(queue) && self.solve()? {
                return Ok(true);
            }
            self.undo_to(mark);
        }
        Ok(false)
    }

    /// Searches for a proper subnet with at most `max_ones` edges; returns
    /// the retained edge set of the component containing the seed edge.
    fn find(&mut self, max_ones: usize) -> Result<Option<Vec<usize>>, VerifyError> {
        self.max_ones = max_ones;
        let m = self.assign.len();
        for e0 in 0..m {
            self.undo_to(0);
            let mut ok = (0..e0).all(|e| self.set(e, 0)) && self.set(e0, 1);
            if ok {
                let (a, b) = self.topo.edges()[e0];
                let mut queue: Vec<usize> = (0..e0).flat_map(|e| [self.topo.edges()[e].0, self.topo.edges()[e].1]).collect();
                queue.extend([a, b]);
                ok = self.propagate(queue);
            }
            if ok && self.solve()? {
                return Ok(Some(self.component_of(e0)));
            }
        }
        self.undo_to(0);
        Ok(None)
    }

    fn component_of(&self, e0: usize) -> Vec<usize> {
        let mut seen = vec![false; self.assign.len()];
        let mut stack = vec![e0];
        seen[e0] = true;
        while let Some(e) = stack.pop() {
            let (a, b) = self.topo.edges()[e];
            for v in [a, b] {
                for &(_, f) in self.topo.neighbors(v) {
                    if self.assign[f] == 1 && !seen[f] {
                        seen[f] = true;
                        stack.push(f);
                    }
                }
            }
        }
        (0..seen.len()).filter(|&e| seen[e]).collect()
    }
}

/// Decides whether the net has a proper, nontrivial subnet.
///
/// Returns [`Irreducibility::Yes`] when none exists and
/// [`Irreducibility::No`] with a witness otherwise. Deterministic: the
/// witness is the first one found in edge order.
pub fn is_irreducible<T: Scalar>(net: &EmbeddedNet<T>, opts: &SearchOptions) -> Result<SearchOutcome, VerifyError> {
    let topo = net.topology();
    let tol = lit::<T>(opts.subset_tol);
    let mut allowed = Vec::with_capacity(topo.vertex_count());
    for v in 0..topo.vertex_count() {
        if topo.kind(v) == VertexKind::Boundary {
            allowed.push(None);
            continue;
        }
        if topo.degree(v) > MAX_SUBSET_DEGREE {
            return Err(VerifyError::DegreeTooLarge {
                id: topo.id(v).to_string(),
                degree: topo.degree(v),
            });
        }
        let dirs = incident_directions(net, v).map_err(|source| NetError::Geometry {
            vertex: topo.id(v).to_string(),
            source,
        })?;
        allowed.push(Some(subset_masks(&dirs, tol)));
    }
    let m = topo.edge_count();
    let mut search = Search {
        topo,
        allowed,
        assign: vec![UNKNOWN; m],
        trail: Vec::new(),
        ones: 0,
        max_ones: m,
        nodes: 0,
        budget: opts.node_budget,
    };

    let mut found = search.find(m)?;
    if opts.minimal {
        if let Some(first) = &found {
            for k in 1..first.len() {
                if let Some(smaller) = search.find(k)? {
                    found = Some(smaller);
                    break;
                }
            }
        }
    }

    let witness = found.map(|edges| witness_from_edges(net, &edges, tol));
    Ok(SearchOutcome {
        verdict: if witness.is_some() {
            Irreducibility::No
        } else {
            Irreducibility::Yes
        },
        witness,
        nodes: search.nodes,
    })
}

fn witness_from_edges<T: Scalar>(net: &EmbeddedNet<T>, edges: &[usize], tol: T) -> Witness {
    let topo = net.topology();
    let mut force: BTreeMap<usize, Point<T>> = BTreeMap::new();
    for &e in edges {
        let (a, b) = topo.edges()[e];
        let (pa, pb) = (net.positions()[a], net.positions()[b]);
        let u = (pb - pa) * (T::one() / pa.distance(pb));
        let fa = force.entry(a).or_insert_with(Point::origin);
        *fa = *fa + u;
        let fb = force.entry(b).or_insert_with(Point::origin);
        *fb = *fb - u;
    }
    Witness {
        edges: edges
            .iter()
            .map(|&e| {
                let (a, b) = topo.edges()[e];
                (topo.id(a).to_string(), topo.id(b).to_string())
            })
            .collect(),
        boundary: {
            let mut ids: Vec<String> = force
                .iter()
                .filter(|(_, s)| !(s.norm() <= tol))
                .map(|(&v, _)| topo.id(v).to_string())
                .collect();
            ids.sort();
            ids
        },
    }
}

/// Numerical battery on the 25-vertex construction. Deviations are
/// non-negative; inequality checks report how far they are violated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    /// `|measured − α|` of the reflex angle between the `c_i` and `a_i2`
    /// edges at each `a_i1`, for `i = 1..4`.
    pub reflex_angle_deviation: [f64; 4],
    /// Largest interior angle over the triangles `c_i d_i d_(i−1)`.
    pub max_triangle_angle: f64,
    /// Smallest apex angle at `c_i` over the same triangles.
    pub min_apex_angle: f64,
    /// Counterclockwise directions of the five edges at `a32`, measured from
    /// the edge to `a31`, sorted ascending.
    pub a32_directions: [f64; 5],
    pub a32_direction_deviation: f64,
    /// Deviations of the five distance identities at quadrant 2.
    pub distance_identity_deviations: [f64; 5],
    pub sqrt3_deviation: f64,
    pub m_deviation: f64,
    pub n_deviation: f64,
    /// `min_i d(c_i, p) − d(b_i, p)`; positive when `c_i` lies outside.
    pub min_outside_margin: f64,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(name: &str, deviation: f64) -> LemmaCheck {
    LemmaCheck {
        name: name.to_string(),
        pass: deviation < LEMMA_TOL,
        max_deviation: deviation,
    }
}

/// Evaluates the lemma battery on a construction against the angle pair it
/// was meant to realise.
pub fn check_lemmas<T: Scalar>(result: &ConstructionResult<T>, sol: &AngleSolution<T>) -> Result<LemmaReport, GeomError> {
    let pos = |r: Role| result.pos(r);
    let f = |x: T| x.to_f64_lossy();
    let pi = T::PI();
    let (alpha, beta) = (sol.alpha, sol.beta);

    let mut reflex = [0.0; 4];
    for (i, slot) in (1..=4).zip(reflex.iter_mut()) {
        let a = pos(Role::A(i, 1));
        let x = angle_ccw(a, pos(Role::C(i)), pos(Role::A(i, 2)))?;
        let measured = x.max(T::TAU() - x);
        *slot = f((measured - alpha).abs());
    }

    let two_thirds = pi * lit(2.0 / 3.0);
    let mut max_angle = T::zero();
    let mut min_apex = T::infinity();
    for i in 1..=4 {
        let tri = Triangle::new(pos(Role::C(i)), pos(Role::D(i)), pos(Role::D(quadrant(i, -1))))?;
        let angles = tri.interior_angles();
        max_angle = angles.iter().fold(max_angle, |m, &a| m.max(a));
        min_apex = min_apex.min(angles[0]);
    }
    let triangle_violation = (max_angle - two_thirds).max(pi * lit(0.5) - min_apex).max(T::zero());

    let a32 = pos(Role::A(3, 2));
    let reference = pos(Role::A(3, 1));
    let topo = result.net.topology();
    let v = topo.index_of(&result.landmarks[&Role::A(3, 2)]).expect("a32 present");
    let mut dirs: Vec<T> = topo
        .neighbors(v)
        .iter()
        .map(|&(w, _)| angle_ccw(a32, reference, result.net.positions()[w]))
        .collect::<Result<_, _>>()?;
    dirs.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    let mut expected = [T::zero(), beta, alpha, pi * lit(13.0 / 12.0), pi * lit(11.0 / 6.0)];
    expected.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    let direction_dev = if dirs.len() == 5 {
        dirs.iter()
            .zip(&expected)
            .map(|(&d, &e)| circular_distance(d, e))
            .fold(T::zero(), T::max)
    } else {
        T::infinity()
    };
    let mut a32_directions = [f64::NAN; 5];
    for (slot, d) in a32_directions.iter_mut().zip(&dirs) {
        *slot = f(*d);
    }

    // Auxiliary points at quadrant 2 on the lines through d2 and the
    // parallel chords a31-a12 and a22-a21.
    let (a12, a21, a22, a31, d2) = (
        pos(Role::A(1, 2)),
        pos(Role::A(2, 1)),
        pos(Role::A(2, 2)),
        pos(Role::A(3, 1)),
        pos(Role::D(2)),
    );
    let a22p = line_intersection(d2, a22, a31, a12)?;
    let a21p = line_intersection(d2, a21, a31, a12)?;
    let a31p = line_intersection(a22, a21, a31, d2)?;
    let a22pp = project_onto_line(a22, a31, a12);
    let a31pp = project_onto_line(a31p, a31, a12);
    let x = angle_ccw(a21, pos(Role::C(2)), a22)?;
    let alpha_measured = x.max(T::TAU() - x);

    let root6 = lit::<T>(6.0).sqrt();
    let half_root6 = root6 * lit(0.5);
    let cot = |t: T| T::one() / t.tan();
    let long = side_long(alpha, beta).map_err(|_| GeomError::DegenerateConfiguration("singular side length"))?;
    let cot_rest = cot(pi * lit(1.5) - alpha_measured);
    let identities = [
        a31p.distance(a22) / a31.distance(a22p) - a21.distance(a22) / a21p.distance(a22p),
        a21.distance(a22) - long,
        a21p.distance(a22p) - (long + root6 * cot(beta)),
        a31.distance(a22p) - half_root6 * (T::one() - cot(beta)),
        a31p.distance(a22) - half_root6 * (T::one() - cot_rest),
    ]
    .map(|d| f(d.abs()));
    let sqrt3_dev = f((a31.distance(a22) - lit::<T>(3.0).sqrt()).abs());
    let m_dev = f((a22pp.distance(a22p) - half_root6 * cot(beta)).abs());
    let n_dev = f((a31.distance(a31pp) - half_root6 * cot_rest).abs());

    let p = pos(Role::P);
    let margin = (1..=4)
        .map(|i| pos(Role::C(i)).distance(p) - pos(Role::B(i)).distance(p))
        .fold(T::infinity(), T::min);

    let reflex_max = reflex.iter().copied().fold(0.0, f64::max);
    let identity_max = identities.iter().copied().fold(0.0, f64::max);
    let checks = vec![
        check("reflex_angle_equals_alpha", reflex_max),
        check("outer_triangles_admit_fermat_point", f(triangle_violation)),
        check("a32_direction_multiset", f(direction_dev)),
        check("quadrant2_distance_identities", identity_max.max(sqrt3_dev).max(m_dev).max(n_dev)),
        check("c_outside_dodecagon", f((-margin).max(T::zero()))),
    ];

    Ok(LemmaReport {
        reflex_angle_deviation: reflex,
        max_triangle_angle: f(max_angle),
        min_apex_angle: f(min_apex),
        a32_directions,
        a32_direction_deviation: f(direction_dev),
        distance_identity_deviations: identities,
        sqrt3_deviation: sqrt3_dev,
        m_deviation: m_dev,
        n_deviation: n_dev,
        min_outside_margin: f(margin),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::solve_angles;
    use crate::builder::{build_net25, build_net25_from_params, ConstructionParams};
    use std::f64::consts::PI;

    fn dirs(angles: &[f64]) -> Vec<UnitVector<f64>> {
        angles.iter().map(|&a| UnitVector::from_angle(a)).collect()
    }

    #[test]
    fn subsets_of_tripod_and_cross() {
        let t = dirs(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]);
        assert_eq!(balanced_subsets(&t, 1e-9), vec![vec![], vec![0, 1, 2]]);
        let x = dirs(&[0.0, PI / 2.0, PI, 1.5 * PI]);
        assert_eq!(
            balanced_subsets(&x, 1e-9),
            vec![vec![], vec![0, 2], vec![1, 3], vec![0, 1, 2, 3]]
        );
    }

    #[test]
    fn subsets_at_a32_directions() {
        let sol = solve_angles(1e-14).unwrap();
        let d = dirs(&[0.0, sol.beta, sol.alpha, 13.0 * PI / 12.0, 11.0 * PI / 6.0]);
        assert_eq!(balanced_subsets(&d, 1e-7), vec![vec![], vec![0, 1, 2, 3, 4]]);
        assert_eq!(balanced_subsets_naive(&d, 1e-7), balanced_subsets(&d, 1e-7));
    }

    #[test]
    fn exact_net_passes_everything() {
        let sol = solve_angles(1e-14).unwrap();
        let res = build_net25(&sol).unwrap();
        let report = verify_geodesic_net(&res.net, 1e-9);
        assert!(report.passed(), "{report:?}");
        let lemmas = check_lemmas(&res, &sol).unwrap();
        assert!(lemmas.passed(), "{lemmas:?}");
        assert!(lemmas.sqrt3_deviation < 1e-9);
    }

    #[test]
    fn moved_vertex_is_listed() {
        let sol = solve_angles(1e-14).unwrap();
        let net = build_net25(&sol).unwrap().net;
        let p = net.position("e2").unwrap();
        let moved = net.with_position("e2", p + Point::new(0.01, 0.0)).unwrap();
        let report = verify_geodesic_net(&moved, 1e-9);
        assert!(!report.balance_pass);
        assert!(report.unbalanced.iter().any(|(id, _)| id == "e2"));
    }

    #[test]
    fn perturbed_beta_fails_direction_check() {
        let sol = solve_angles(1e-14).unwrap();
        let params = ConstructionParams::from_angles(sol.alpha, sol.beta + 0.01).unwrap();
        let res = build_net25_from_params(&params).unwrap();
        let lemmas = check_lemmas(&res, &sol).unwrap();
        let c = lemmas.checks.iter().find(|c| c.name == "a32_direction_multiset").unwrap();
        assert!(!c.pass);
    }

    #[test]
    fn net25_is_irreducible() {
        let sol = solve_angles(1e-14).unwrap();
        let net = build_net25(&sol).unwrap().net;
        let out = is_irreducible(&net, &SearchOptions::default()).unwrap();
        assert_eq!(out.verdict, Irreducibility::Yes);
        assert!(out.witness.is_none());
    }

    #[test]
    fn tiny_budget_is_reported() {
        let sol = solve_angles(1e-14).unwrap();
        let net = build_net25(&sol).unwrap().net;
        let opts = SearchOptions {
            node_budget: 0,
            ..Default::default()
        };
        assert!(matches!(is_irreducible(&net, &opts), Err(VerifyError::SearchBudgetExceeded(0))));
    }
}
