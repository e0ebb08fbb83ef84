//! Exact construction of the 25-vertex net and topology templates of the
//! ring family.
//!
//! Indices run over the four quadrants `i ∈ {1, 2, 3, 4}` modulo 4. The
//! inner ring visits `b_i, a_i1, …, a_im` counterclockwise for each `i`,
//! where `m = n − 1` for a ring of `4n` vertices. Around that ring:
//!
//! * `d_i` is the boundary vertex facing side `i` and is joined to every `a_ij`;
//! * `c_i` sits just outside `b_i` on the crossing of `a_(i−1)m d_i` and
//!   `a_i1 d_(i−1)`, and is also joined to `b_i` and `e_i`;
//! * `e_i` is the Fermat point of `c_i d_i d_(i−1)`;
//! * for `m ≥ 2`, a centre vertex `p` is joined to each Fermat point
//!   `f_ij` of `a_ij a_i(j+1) p`.
//!
//! `n = 3` is the 25-vertex net, `n = 2` the 16-vertex octagon net. Larger
//! `n` follow the same scheme but are exploratory.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::angles::{boundary_leg, side_long, AngleError, AngleSolution, MIN_ROOT_TOL};
use crate::geom::{fermat_point, line_intersection, GeomError, Point, Triangle};
use crate::net::{EmbeddedNet, NetError, NetTopology, VertexKind};
use crate::scalar::{lit, Scalar};

/// Polygon closure tolerance for the dodecagon traversal, raised to a few
/// hundred ulps for narrow scalar types.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Angle(#[from] AngleError),
    #[error("angle solution out of range or with large residuals")]
    InvalidSolution,
    #[error("geometry failure while placing {role}: {source}")]
    Geometry {
        role: Role,
        #[source]
        source: GeomError,
    },
    #[error("dodecagon fails to close: gap {gap:e}")]
    ClosureFailure { gap: f64 },
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Structural role of a vertex in a ring-family net; quadrant indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    P,
    A(usize, usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F(usize, usize),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::P => write!(f, "p"),
            Role::A(i, j) => write!(f, "a{i}{j}"),
            Role::B(i) => write!(f, "b{i}"),
            Role::C(i) => write!(f, "c{i}"),
            Role::D(i) => write!(f, "d{i}"),
            Role::E(i) => write!(f, "e{i}"),
            Role::F(i, j) => write!(f, "f{i}{j}"),
        }
    }
}

/// Quadrant index `i + k` reduced into `1..=4`.
pub fn quadrant(i: usize, k: isize) -> usize {
    ((i as isize - 1 + k).rem_euclid(4) + 1) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// The 25-vertex dodecagon net.
    T3Dodecagon,
    /// The 16-vertex octagon net.
    T2Octagon,
    /// Pattern extension to rings of `4n` vertices, `n >= 4`.
    RingExperimental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetFamily {
    pub kind: FamilyKind,
    pub n: usize,
}

impl NetFamily {
    pub fn t3() -> Self {
        NetFamily {
            kind: FamilyKind::T3Dodecagon,
            n: 3,
        }
    }

    pub fn t2() -> Self {
        NetFamily {
            kind: FamilyKind::T2Octagon,
            n: 2,
        }
    }

    pub fn ring(n: usize) -> Result<Self, BuildError> {
        if n < 4 {
            return Err(BuildError::UnsupportedFamily(format!(
                "ring_experimental requires n >= 4 (got {n}); use t2 or t3"
            )));
        }
        Ok(NetFamily {
            kind: FamilyKind::RingExperimental,
            n,
        })
    }

    pub fn is_experimental(&self) -> bool {
        self.kind == FamilyKind::RingExperimental
    }
}

/// Lengths and angles of the construction, with unit short sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructionParams<T> {
    pub alpha: T,
    pub beta: T,
    pub side_short: T,
    pub side_long: T,
    pub boundary_leg: T,
}

impl<T: Scalar> ConstructionParams<T> {
    pub fn from_angles(alpha: T, beta: T) -> Result<Self, BuildError> {
        let long = side_long(alpha, beta)?;
        let leg = boundary_leg(long, beta)?;
        Ok(ConstructionParams {
            alpha,
            beta,
            side_short: T::one(),
            side_long: long,
            boundary_leg: leg,
        })
    }

    pub fn from_solution(sol: &AngleSolution<T>) -> Result<Self, BuildError> {
        Self::from_angles(sol.alpha, sol.beta)
    }
}

/// Vertex ids and roles for a ring of `4(m + 1)` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct RingLayout {
    pub m: usize,
    pub roles: BTreeMap<Role, String>,
}

impl RingLayout {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "ring needs at least one a-vertex per side");
        let a_id = |i: usize, j: usize| match m {
            1 => format!("a{i}"),
            2..=9 => format!("a{i}{j}"),
            _ => format!("a{i}_{j}"),
        };
        let f_id = |i: usize, j: usize| match m {
            2 => format!("f{i}"),
            3..=9 => format!("f{i}{j}"),
            _ => format!("f{i}_{j}"),
        };
        let mut roles = BTreeMap::new();
        for i in 1..=4 {
            roles.insert(Role::B(i), format!("b{i}"));
            for j in 1..=m {
                roles.insert(Role::A(i, j), a_id(i, j));
            }
            roles.insert(Role::C(i), format!("c{i}"));
            roles.insert(Role::D(i), format!("d{i}"));
            roles.insert(Role::E(i), format!("e{i}"));
            if m >= 2 {
                for j in 1..m {
                    roles.insert(Role::F(i, j), f_id(i, j));
                }
            }
        }
        if m >= 2 {
            roles.insert(Role::P, "p".to_string());
        }
        RingLayout { m, roles }
    }

    pub fn id(&self, role: Role) -> &str {
        &self.roles[&role]
    }

    /// Ring vertices in counterclockwise order starting at `b1`.
    pub fn ring_order(&self) -> Vec<Role> {
        (1..=4)
            .flat_map(|i| std::iter::once(Role::B(i)).chain((1..=self.m).map(move |j| Role::A(i, j))))
            .collect()
    }

    pub fn edges(&self) -> Vec<(Role, Role)> {
        let m = self.m;
        let ring = self.ring_order();
        let mut edges: Vec<(Role, Role)> = (0..ring.len()).map(|k| (ring[k], ring[(k + 1) % ring.len()])).collect();
        for i in 1..=4 {
            let prev = quadrant(i, -1);
            for j in 1..=m {
                edges.push((Role::A(i, j), Role::D(i)));
            }
            for other in [
                Role::A(prev, m),
                Role::A(i, 1),
                Role::D(i),
                Role::D(prev),
                Role::B(i),
                Role::E(i),
            ] {
                edges.push((Role::C(i), other));
            }
            edges.push((Role::E(i), Role::D(i)));
            edges.push((Role::E(i), Role::D(prev)));
            for j in 1..m {
                edges.push((Role::F(i, j), Role::A(i, j)));
                edges.push((Role::F(i, j), Role::A(i, j + 1)));
                edges.push((Role::F(i, j), Role::P));
            }
        }
        edges
    }

    pub fn topology(&self) -> Result<NetTopology, NetError> {
        let vertices = self.roles.iter().map(|(role, id)| {
            let kind = if matches!(role, Role::D(_)) {
                VertexKind::Boundary
            } else {
                VertexKind::Interior
            };
            (id.clone(), kind)
        });
        let edges = self
            .edges()
            .into_iter()
            .map(|(a, b)| (self.id(a).to_string(), self.id(b).to_string()));
        NetTopology::new(vertices, edges)
    }

    pub fn embed<T: Scalar>(&self, positions: &BTreeMap<Role, Point<T>>) -> Result<EmbeddedNet<T>, BuildError> {
        let topo = self.topology()?;
        let by_id = positions
            .iter()
            .map(|(r, p)| (self.id(*r).to_string(), *p))
            .collect();
        Ok(EmbeddedNet::new(topo, &by_id)?)
    }
}

/// Output of [`build_net25`].
#[derive(Debug, Clone)]
pub struct ConstructionResult<T> {
    pub net: EmbeddedNet<T>,
    pub params: ConstructionParams<T>,
    pub landmarks: BTreeMap<Role, String>,
}

impl<T: Scalar> ConstructionResult<T> {
    pub fn pos(&self, role: Role) -> Point<T> {
        self.net
            .position(&self.landmarks[&role])
            .expect("landmark present in net")
    }

    /// Reattaches landmark roles to a net that uses the 25-vertex ids.
    pub fn from_net(net: EmbeddedNet<T>, params: ConstructionParams<T>) -> Option<Self> {
        let layout = RingLayout::new(2);
        let expected = layout.topology().ok()?;
        let same_ids = net.topology().vertex_count() == expected.vertex_count()
            && net.topology().edge_ids().eq(expected.edge_ids())
            && layout.roles.values().all(|id| net.topology().index_of(id).is_some());
        same_ids.then(|| ConstructionResult {
            net,
            params,
            landmarks: layout.roles,
        })
    }
}

/// The twelve dodecagon corners `b1, a11, a12, b2, …, a42` with `a11` at the
/// origin, `a12` on the positive x-axis and the interior above.
pub fn build_dodecagon<T: Scalar>(params: &ConstructionParams<T>) -> Result<Vec<(Role, Point<T>)>, BuildError> {
    if !(params.side_long > T::zero()) || !(params.side_short > T::zero()) {
        return Err(BuildError::ClosureFailure { gap: f64::NAN });
    }
    let pi = T::PI();
    let turn_at_a = pi - pi * lit(11.0 / 12.0);
    let turn_at_b = pi - pi * lit(2.0 / 3.0);

    // Walk a11 -> a12 -> b2 -> a21 -> ... -> b1 -> a11.
    let mut walk = Vec::with_capacity(12);
    let mut here = Point::origin();
    let mut heading = T::zero();
    for i in 1..=4 {
        let next = quadrant(i, 1);
        for (role, length, turn) in [
            (Role::A(i, 1), params.side_long, turn_at_a),
            (Role::A(i, 2), params.side_short, turn_at_b),
            (Role::B(next), params.side_short, turn_at_a),
        ] {
            walk.push((role, here));
            here = here + Point::polar(length, heading);
            heading = heading + turn;
        }
    }
    let gap = here.norm();
    let tol = lit::<T>(CLOSURE_TOL).max(T::epsilon() * lit(256.0));
    if !(gap <= tol) {
        return Err(BuildError::ClosureFailure { gap: gap.to_f64_lossy() });
    }
    walk.rotate_right(1);
    Ok(walk)
}

/// Builds the 25-vertex net from a solved angle pair.
pub fn build_net25<T: Scalar>(sol: &AngleSolution<T>) -> Result<ConstructionResult<T>, BuildError> {
    let tol = T::epsilon().sqrt().max(lit(1e-12));
    if !sol.is_valid(tol) {
        return Err(BuildError::InvalidSolution);
    }
    build_net25_from_params(&ConstructionParams::from_solution(sol)?)
}

/// Builds the 25-vertex net from explicit parameters without checking that
/// they solve the angle system. Intended for perturbation studies.
pub fn build_net25_from_params<T: Scalar>(params: &ConstructionParams<T>) -> Result<ConstructionResult<T>, BuildError> {
    let layout = RingLayout::new(2);
    let mut pos: BTreeMap<Role, Point<T>> = build_dodecagon(params)?.into_iter().collect();
    let geom = |role: Role| move |source: GeomError| BuildError::Geometry { role, source };

    let center = line_intersection(pos[&Role::B(1)], pos[&Role::B(3)], pos[&Role::B(2)], pos[&Role::B(4)])
        .map_err(geom(Role::P))?;
    pos.insert(Role::P, center);

    for i in 1..=4 {
        let (a1, a2) = (pos[&Role::A(i, 1)], pos[&Role::A(i, 2)]);
        let tri = Triangle::new(a1, a2, center).map_err(geom(Role::F(i, 1)))?;
        pos.insert(Role::F(i, 1), fermat_point(&tri).map_err(geom(Role::F(i, 1)))?);

        // Apex of the isosceles triangle on a_i1 a_i2, on the side away from
        // the centre (the right of the counterclockwise traversal).
        let side = a2 - a1;
        let outward = Point::new(side.y, -side.x) * (T::one() / side.norm());
        let height = params.side_long * lit(0.5) * params.beta.tan();
        pos.insert(Role::D(i), a1.midpoint(a2) + outward * height);
    }

    for i in 1..=4 {
        let prev = quadrant(i, -1);
        let c = line_intersection(
            pos[&Role::A(prev, 2)],
            pos[&Role::D(i)],
            pos[&Role::A(i, 1)],
            pos[&Role::D(prev)],
        )
        .map_err(geom(Role::C(i)))?;
        pos.insert(Role::C(i), c);
        let tri = Triangle::new(c, pos[&Role::D(i)], pos[&Role::D(prev)]).map_err(geom(Role::E(i)))?;
        pos.insert(Role::E(i), fermat_point(&tri).map_err(geom(Role::E(i)))?);
    }

    let net = layout.embed(&pos)?;
    Ok(ConstructionResult {
        net,
        params: *params,
        landmarks: layout.roles,
    })
}

/// Topology of a family member together with seed positions for relaxation.
#[derive(Debug, Clone)]
pub struct Template<T> {
    pub family: NetFamily,
    pub layout: RingLayout,
    pub seed: EmbeddedNet<T>,
}

impl<T: Scalar> Template<T> {
    pub fn topology(&self) -> &NetTopology {
        self.seed.topology()
    }

    pub fn shared_topology(&self) -> Arc<NetTopology> {
        self.seed.shared_topology().clone()
    }
}

/// Topology and seed positions for a family member.
///
/// * T3: the exact construction (needs the angle solve).
/// * T2: seeds transcribed from the schematic drawing of the octagon net:
///   ring at radii 1 and 1.12, boundary at radius `tan 76°`, and the outer
///   Fermat vertices 0.07 beyond the `b_i`.
/// * ring: a regular `4n`-gon seed with no balance guarantee.
pub fn topology_template<T: Scalar>(fam: NetFamily) -> Result<Template<T>, BuildError> {
    let seed = match fam.kind {
        FamilyKind::T3Dodecagon => {
            if fam.n != 3 {
                return Err(BuildError::UnsupportedFamily(format!("t3 has n = 3, got {}", fam.n)));
            }
            let sol = crate::angles::solve_angles(lit::<T>(MIN_ROOT_TOL))?;
            build_net25(&sol)?.net
        }
        FamilyKind::T2Octagon => {
            if fam.n != 2 {
                return Err(BuildError::UnsupportedFamily(format!("t2 has n = 2, got {}", fam.n)));
            }
            octagon_seed()?
        }
        FamilyKind::RingExperimental => {
            let fam = NetFamily::ring(fam.n)?;
            ring_seed(fam.n)?
        }
    };
    Ok(Template {
        family: fam,
        layout: RingLayout::new(fam.n - 1),
        seed,
    })
}

/// Direction of side `i` (quadrant centre) and of corner `b_i`, in radians.
fn side_angle<T: Scalar>(i: usize) -> T {
    T::PI() * lit(1.5 + 0.5 * (i as f64 - 1.0))
}

fn octagon_seed<T: Scalar>() -> Result<EmbeddedNet<T>, BuildError> {
    let layout = RingLayout::new(1);
    let quarter = T::FRAC_PI_4();
    let far = lit::<T>(76.0).to_radians().tan();
    let mut pos = BTreeMap::new();
    for i in 1..=4 {
        let side = side_angle::<T>(i);
        pos.insert(Role::A(i, 1), Point::polar(T::one(), side));
        pos.insert(Role::B(i), Point::polar(lit(1.12), side - quarter));
        pos.insert(Role::E(i), Point::polar(lit(1.12 + 0.07), side - quarter));
        pos.insert(Role::D(i), Point::polar(far, side));
    }
    for i in 1..=4 {
        let prev = quadrant(i, -1);
        let c = line_intersection(
            pos[&Role::A(prev, 1)],
            pos[&Role::D(i)],
            pos[&Role::A(i, 1)],
            pos[&Role::D(prev)],
        )
        .map_err(|source| BuildError::Geometry {
            role: Role::C(i),
            source,
        })?;
        pos.insert(Role::C(i), c);
    }
    layout.embed(&pos)
}

fn ring_seed<T: Scalar>(n: usize) -> Result<EmbeddedNet<T>, BuildError> {
    let m = n - 1;
    let layout = RingLayout::new(m);
    let quarter = T::FRAC_PI_4();
    let mut pos = BTreeMap::new();
    pos.insert(Role::P, Point::origin());
    for i in 1..=4 {
        let b_angle = side_angle::<T>(i) - quarter;
        let spacing = T::FRAC_PI_2() / lit(n as f64);
        pos.insert(Role::B(i), Point::polar(T::one(), b_angle));
        for j in 1..=m {
            pos.insert(Role::A(i, j), Point::polar(T::one(), b_angle + spacing * lit(j as f64)));
        }
        pos.insert(Role::C(i), Point::polar(lit(1.06), b_angle));
        pos.insert(Role::E(i), Point::polar(lit(1.2), b_angle));
        pos.insert(Role::D(i), Point::polar(lit(4.0), side_angle::<T>(i)));
    }
    for i in 1..=4 {
        for j in 1..m {
            let mid = pos[&Role::A(i, j)].midpoint(pos[&Role::A(i, j + 1)]);
            pos.insert(Role::F(i, j), mid * lit(0.75));
        }
    }
    layout.embed(&pos)
}
