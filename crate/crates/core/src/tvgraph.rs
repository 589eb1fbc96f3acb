//! Anisotropic total variation on undirected graphs.
//!
//! Edges are stored canonically as `(i, j)` with `i < j`, sorted. Row `e` of the
//! difference matrix has `+1` at `i` and `−1` at `j`. An orientation assigns `u_e = +1`
//! to the arc `j → i` and `−1` to `i → j`, so `z_u = Dᵀu` is in-degree minus out-degree.

use std::collections::BTreeSet;

use crate::budget::Budget;
use crate::error::{check_len, Error, Result};
use crate::exact::{q, Matrix, QVector, Rational};
use crate::polyhedra::{HPolyhedron, VPolyhedron};
use crate::pwl::CpwlFunction;
use crate::wellposed::ProblemInstance;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Construction(format!("self-loop at node {a}")));
            }
            if a >= node_count || b >= node_count {
                return Err(Error::Construction(format!(
                    "edge ({a}, {b}) references a node outside 0..{node_count}"
                )));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::Construction(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Graph {
            node_count,
            edges: set.into_iter().collect(),
        })
    }

    pub fn path(nodes: usize) -> Self {
        let edges: Vec<_> = (1..nodes).map(|i| (i - 1, i)).collect();
        Graph::new(nodes, &edges).expect("path")
    }

    pub fn cycle(nodes: usize) -> Self {
        let mut edges: Vec<_> = (1..nodes).map(|i| (i - 1, i)).collect();
        edges.push((0, nodes - 1));
        Graph::new(nodes, &edges).expect("cycle needs at least three nodes")
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::new(leaves + 1, &edges).expect("star")
    }

    /// `n × n` grid with 4-neighbour edges; node `(r, c)` has index `r·n + c`.
    pub fn grid(n: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = r * n + c;
                if c + 1 < n {
                    edges.push((v, v + 1));
                }
                if r + 1 < n {
                    edges.push((v, v + n));
                }
            }
        }
        Graph::new(n * n, &edges).expect("grid")
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Forest test by union-find.
    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.node_count).collect();
        fn root(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub signs: Vec<i8>,
}

impl Orientation {
    pub fn new(g: &Graph, signs: Vec<i8>) -> Result<Self> {
        check_len(g.edge_count(), signs.len())?;
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::Construction("orientation signs must be +1 or -1".into()));
        }
        Ok(Orientation { signs })
    }

    /// The `k`-th of the `2^E` orientations: bit `e` set means `u_e = −1`.
    pub fn from_index(edges: usize, k: u64) -> Self {
        Orientation {
            signs: (0..edges).map(|e| if k >> e & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    /// Directed arcs `(tail, head)`.
    pub fn arcs(&self, g: &Graph) -> Vec<(usize, usize)> {
        g.edges()
            .iter()
            .zip(&self.signs)
            .map(|(&(i, j), &s)| if s > 0 { (j, i) } else { (i, j) })
            .collect()
    }
}

pub fn difference_matrix(g: &Graph) -> Matrix {
    let mut d = Matrix::zeros(g.edge_count(), g.node_count());
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        d.set(e, i, q(1));
        d.set(e, j, q(-1));
    }
    d
}

/// `z_u = Σ u_e d_e`
pub fn orientation_vertex(g: &Graph, u: &Orientation) -> Result<QVector> {
    check_len(g.edge_count(), u.signs.len())?;
    let mut z = vec![0i64; g.node_count()];
    for (&(i, j), &s) in g.edges().iter().zip(&u.signs) {
        z[i] += s as i64;
        z[j] -= s as i64;
    }
    Ok(z.into_iter().map(q).collect())
}

/// Kahn's algorithm on the induced digraph.
pub fn is_acyclic(g: &Graph, u: &Orientation) -> Result<bool> {
    check_len(g.edge_count(), u.signs.len())?;
    let n = g.node_count();
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, h) in u.arcs(g) {
        indeg[h] += 1;
        out[t].push(h);
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &h in &out[v] {
            indeg[h] -= 1;
            if indeg[h] == 0 {
                queue.push(h);
            }
        }
    }
    Ok(seen == n)
}

/// Recovers an acyclic orientation with `z_u = z`, or `None` when `z` is not a vertex of
/// the TV dual polytope.
///
/// Peels sinks: a node whose residual value equals its residual degree must have every
/// remaining edge pointing into it, in any preimage of `z` in `[−1, 1]^E`. Such a node
/// exists at every stage when `z` comes from an acyclic orientation.
pub fn orientation_from_point(g: &Graph, z: &[Rational]) -> Result<Option<Orientation>> {
    check_len(g.node_count(), z.len())?;
    let mut val = Vec::with_capacity(z.len());
    for r in z {
        if !r.is_integer() {
            return Ok(None);
        }
        match r.to_integer().to_i64() {
            Some(v) => val.push(v),
            None => return Ok(None),
        }
    }
    let n = g.node_count();
    let mut alive = vec![true; n];
    let mut signs = vec![0i8; g.edge_count()];
    let mut open = vec![true; g.edge_count()];
    for _ in 0..n {
        let deg = |v: usize, open: &[bool]| {
            g.edges()
                .iter()
                .enumerate()
                .filter(|(e, &(a, b))| open[*e] && (a == v || b == v))
                .count() as i64
        };
        let Some(v) = (0..n).find(|&v| alive[v] && val[v] == deg(v, &open)) else {
            return Ok(None);
        };
        alive[v] = false;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            if !open[e] || (a != v && b != v) {
                continue;
            }
            open[e] = false;
            // Arc into v: u = +1 when v is the smaller endpoint.
            signs[e] = if a == v { 1 } else { -1 };
            let w = if a == v { b } else { a };
            val[w] += 1;
        }
    }
    let u = Orientation { signs };
    debug_assert!(is_acyclic(g, &u)?);
    if orientation_vertex(g, &u)? != z {
        return Ok(None);
    }
    Ok(Some(u))
}

fn orientation_count(g: &Graph, budget: &Budget) -> Result<u64> {
    let e = g.edge_count();
    if e >= 63 {
        return Err(Error::BudgetExceeded {
            resource: "orientations",
            limit: budget.orientations,
        });
    }
    let total = 1u64 << e;
    Budget::check("orientations", budget.orientations, total as usize)?;
    Ok(total)
}

fn sorted_unique(mut v: Vec<QVector>) -> Vec<QVector> {
    v.sort();
    v.dedup();
    v
}

/// `{z_u : u acyclic}`, sorted and deduplicated.
pub fn tv_polytope_vertices(g: &Graph, budget: &Budget) -> Result<Vec<QVector>> {
    let total = orientation_count(g, budget)?;
    let mut out = Vec::new();
    for k in 0..total {
        let u = Orientation::from_index(g.edge_count(), k);
        if is_acyclic(g, &u)? {
            out.push(orientation_vertex(g, &u)?);
        }
    }
    Ok(sorted_unique(out))
}

/// All `z_u` over every orientation, acyclic or not.
pub fn all_orientation_points(g: &Graph, budget: &Budget) -> Result<Vec<QVector>> {
    let total = orientation_count(g, budget)?;
    let mut out = Vec::new();
    for k in 0..total {
        out.push(orientation_vertex(g, &Orientation::from_index(g.edge_count(), k))?);
    }
    Ok(sorted_unique(out))
}

/// Vertices of `P_TV − R≥0`, computed from the generators without using acyclicity.
pub fn nn_tv_vertices(g: &Graph, budget: &Budget) -> Result<Vec<QVector>> {
    let n = g.node_count();
    let points = all_orientation_points(g, budget)?;
    let rays = (0..n)
        .map(|i| {
            let mut r = vec![Rational::zero(); n];
            r[i] = -Rational::one();
            r
        })
        .collect();
    let p = VPolyhedron::new(n, points, rays)?;
    Ok(sorted_unique(p.vertices()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TvInstance {
    pub graph: Graph,
    pub gamma: Rational,
    pub nonneg: bool,
}

impl TvInstance {
    pub fn new(graph: Graph, gamma: Rational, nonneg: bool) -> Result<Self> {
        if gamma <= Rational::zero() {
            return Err(Error::Precondition("gamma must be positive".into()));
        }
        Ok(TvInstance { graph, gamma, nonneg })
    }

    /// `γ‖Dx‖₁`, plus the indicator of the nonnegative orthant for the NN variant.
    pub fn function(&self) -> Result<CpwlFunction> {
        let tv = CpwlFunction::l1(&difference_matrix(&self.graph), &self.gamma)?;
        if self.nonneg {
            tv.sum(&CpwlFunction::nonneg_indicator(self.graph.node_count()))
        } else {
            Ok(tv)
        }
    }
}

/// The TV regularizer on the `n × n` grid.
pub fn grid_tv(n: usize) -> CpwlFunction {
    TvInstance::new(Graph::grid(n), q(1), false)
        .and_then(|t| t.function())
        .expect("grid TV")
}

/// Row and column sums of an `n × n` image: rows `0..n` sum column `c`, rows `n..2n`
/// sum image row `r`.
pub fn ct_axis_matrix(n: usize) -> Matrix {
    let mut a = Matrix::zeros(2 * n, n * n);
    for r in 0..n {
        for c in 0..n {
            a.set(c, r * n + c, q(1));
            a.set(n + r, r * n + c, q(1));
        }
    }
    a
}

/// Per-axis residual: `−1` on the first beam, `±2` alternating inside, and half the
/// alternating value on the last beam.
pub fn ct_axis_residual(n: usize) -> Vec<Rational> {
    (0..n)
        .map(|k| {
            if k == 0 {
                q(-1)
            } else if k + 1 < n {
                q(if k % 2 == 1 { 2 } else { -2 })
            } else if n.is_multiple_of(2) {
                q(1)
            } else {
                q(-1)
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CtAxisReport {
    pub n: usize,
    pub instance: ProblemInstance,
    pub z: QVector,
    /// `Aᵀz`, indexed like the grid nodes.
    pub point: QVector,
    pub orientation: Option<Orientation>,
    pub rank_a: usize,
}

impl CtAxisReport {
    /// The orientation certificate exists and is acyclic.
    pub fn certified(&self) -> bool {
        match &self.orientation {
            Some(u) => is_acyclic(&Graph::grid(self.n), u).unwrap_or(false),
            None => false,
        }
    }

    /// `Aᵀz` is a TV vertex, so the accessible face has a point subdifferential and
    /// well-posedness would need `rank(A) = N²`.
    pub fn forces_full_rank(&self) -> bool {
        self.certified()
    }

    pub fn grid_rows(&self) -> Vec<QVector> {
        self.point.chunks(self.n).map(<[Rational]>::to_vec).collect()
    }
}

pub fn ct_axis_instance(n: usize) -> Result<CtAxisReport> {
    let axis = ct_axis_residual(n.max(2));
    let z: QVector = axis.iter().chain(&axis).cloned().collect();
    ct_axis_instance_with(n, &z)
}

/// Same construction with a caller-chosen residual `z` (length `2n`).
pub fn ct_axis_instance_with(n: usize, z: &[Rational]) -> Result<CtAxisReport> {
    if n < 2 {
        return Err(Error::Precondition("the grid needs N >= 2".into()));
    }
    check_len(2 * n, z.len())?;
    let a = ct_axis_matrix(n);
    let point = a.tmul_vec(z)?;
    let g = Graph::grid(n);
    let orientation = orientation_from_point(&g, &point)?;
    let rank_a = a.rank();
    let instance = ProblemInstance::new(a, grid_tv(n))?;
    Ok(CtAxisReport {
        n,
        instance,
        z: z.to_vec(),
        point,
        orientation,
        rank_a,
    })
}

/// Whether a point lies in `P_TV = Dᵀ[−1, 1]^E`, by LP.
pub fn in_tv_polytope(g: &Graph, z: &[Rational]) -> Result<bool> {
    check_len(g.node_count(), z.len())?;
    let e = g.edge_count();
    let mut u = HPolyhedron::cube(e, Rational::one());
    let dt = difference_matrix(g).transpose();
    for (i, zi) in z.iter().enumerate() {
        u.add_equality(dt.row(i).to_vec(), zi.clone())?;
    }
    Ok(!u.is_empty())
}
