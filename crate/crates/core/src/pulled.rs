//! Partially pulled metrics on weighted graphs.
//!
//! For a marked node set `K` and `c ∈ [0, ∞]` the pulled distance is the
//! infimum over chains `x → p1 ⇝ q1 → p2 ⇝ … → y` of the graph distance on
//! the free legs plus `e^{-c}` times the `K`-induced distance on the legs
//! inside `K`. On a graph this infimum is a single shortest path once every
//! edge with both ends in `K` is scaled by `e^{-c}`; for `c = ∞` those edges
//! cost nothing, which contracts `K` to a point.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math;
use crate::models::ModelMetric;
use crate::profile::DrawstringProfile;

/// Pull exponent `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PullExponent {
    Finite(f64),
    Infinite,
}

impl PullExponent {
    /// Factor `e^{-c}` applied to edges inside `K`.
    pub fn factor(self) -> f64 {
        match self {
            PullExponent::Finite(c) => math::exp(-c),
            PullExponent::Infinite => 0.0,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            PullExponent::Finite(c) if !(c >= 0.0) || c.is_infinite() => Err(Error::Parameter {
                name: "c",
                reason: "finite pull exponent must be a nonnegative number",
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Finite weighted graph with coordinates and a marked set `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulledSpace {
    coords: Vec<[f64; 3]>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
    in_k: Vec<bool>,
    mesh: f64,
}

impl PulledSpace {
    /// Graph on `coords` with no edges and empty `K`.
    pub fn new(coords: Vec<[f64; 3]>) -> Self {
        let n = coords.len();
        PulledSpace {
            coords,
            edges: Vec::new(),
            adjacency: alloc::vec![Vec::new(); n],
            in_k: alloc::vec![false; n],
            mesh: 0.0,
        }
    }

    /// Graph from explicit parts, as read back from an export.
    pub fn from_parts(coords: Vec<[f64; 3]>, edges: &[Edge], k: &[usize]) -> Result<Self> {
        let mut space = Self::new(coords);
        for e in edges {
            space.add_edge(e.a, e.b, e.length)?;
        }
        space.set_pulled(k)?;
        Ok(space)
    }

    /// Path graph on `points` (as first coordinates) with consecutive edges.
    pub fn path(points: &[f64]) -> Result<Self> {
        let mut space = Self::new(points.iter().map(|x| [*x, 0.0, 0.0]).collect());
        for i in 1..points.len() {
            space.add_edge(i - 1, i, math::abs(points[i] - points[i - 1]))?;
        }
        space.mesh = points
            .windows(2)
            .map(|w| math::abs(w[1] - w[0]))
            .fold(0.0, f64::max);
        Ok(space)
    }

    /// Uniform path graph on `[lo, hi]` with spacing `step`, with `K` the
    /// nodes inside `[k_lo, k_hi]`.
    pub fn interval(lo: f64, hi: f64, step: f64, k_lo: f64, k_hi: f64) -> Result<Self> {
        if !(hi > lo && step > 0.0) {
            return Err(Error::Parameter {
                name: "step",
                reason: "need lo < hi and a positive step",
            });
        }
        let n = math::floor((hi - lo) / step + 0.5) as usize;
        let pts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let mut space = Self::path(&pts)?;
        let slack = 1e-9 * step;
        let k: Vec<usize> = (0..pts.len())
            .filter(|&i| pts[i] >= k_lo - slack && pts[i] <= k_hi + slack)
            .collect();
        space.set_pulled(&k)?;
        Ok(space)
    }

    pub fn add_edge(&mut self, a: usize, b: usize, length: f64) -> Result<()> {
        let n = self.coords.len();
        if a >= n || b >= n || a == b {
            return Err(Error::Parameter {
                name: "edge",
                reason: "endpoints must be distinct existing nodes",
            });
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Parameter {
                name: "edge",
                reason: "lengths must be positive and finite",
            });
        }
        let id = self.edges.len();
        self.edges.push(Edge { a, b, length });
        self.adjacency[a].push((b, id));
        self.adjacency[b].push((a, id));
        Ok(())
    }

    /// Marks exactly the given nodes as `K`.
    pub fn set_pulled(&mut self, nodes: &[usize]) -> Result<()> {
        let mut mask = alloc::vec![false; self.coords.len()];
        for &i in nodes {
            if i >= mask.len() {
                return Err(Error::Parameter {
                    name: "K",
                    reason: "node index out of range",
                });
            }
            mask[i] = true;
        }
        self.in_k = mask;
        Ok(())
    }

    /// Copy with a different marked set.
    pub fn with_pulled(&self, nodes: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.set_pulled(nodes)?;
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[[f64; 3]] {
        &self.coords
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn in_pulled(&self, node: usize) -> bool {
        self.in_k.get(node).copied().unwrap_or(false)
    }

    pub fn pulled_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_k[i]).collect()
    }

    /// Longest edge of the underlying lattice (`0` for hand-built graphs).
    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    fn is_k_edge(&self, e: &Edge) -> bool {
        self.in_k[e.a] && self.in_k[e.b]
    }

    /// Whether the subgraph induced on `mask` (all nodes if `None`) is connected.
    pub fn is_connected_on(&self, mask: Option<&[bool]>) -> bool {
        let inside = |i: usize| mask.is_none_or(|m| m[i]);
        let Some(start) = (0..self.len()).find(|&i| inside(i)) else {
            return true;
        };
        let mut seen = alloc::vec![false; self.len()];
        let mut stack = alloc::vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if inside(w) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..self.len()).all(|i| !inside(i) || seen[i])
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_on(None)
    }

    /// Whether `K` is nonempty and induces a connected subgraph.
    pub fn pulled_set_connected(&self) -> bool {
        self.in_k.iter().any(|k| *k) && self.is_connected_on(Some(&self.in_k))
    }

    fn check_node(&self, a: usize) -> Result<()> {
        if a >= self.len() {
            return Err(Error::Parameter {
                name: "node",
                reason: "index out of range",
            });
        }
        Ok(())
    }

    /// Single-source shortest paths with a per-edge length map.
    fn dijkstra<W: Fn(&Edge) -> f64>(&self, source: usize, weight: W) -> Vec<f64> {
        let mut dist = alloc::vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry { dist: 0.0, node: source });
        while let Some(Entry { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            for &(next, id) in &self.adjacency[node] {
                let nd = d + weight(&self.edges[id]);
                if nd < dist[next] {
                    dist[next] = nd;
                    heap.push(Entry { dist: nd, node: next });
                }
            }
        }
        dist
    }

    /// Graph distances from `source` to every node (`∞` if unreachable).
    pub fn distances_from(&self, source: usize) -> Result<Vec<f64>> {
        self.check_node(source)?;
        Ok(self.dijkstra(source, |e| e.length))
    }

    /// Shortest-path length between two nodes.
    pub fn geodesic_distance(&self, a: usize, b: usize) -> Result<f64> {
        self.check_node(b)?;
        finite_or_unreachable(self.distances_from(a)?[b], a, b)
    }

    /// Pulled distances from `source` to every node.
    pub fn pulled_distances_from(&self, source: usize, c: PullExponent) -> Result<Vec<f64>> {
        self.check_node(source)?;
        c.validate()?;
        if !self.in_k.iter().any(|k| *k) {
            return Err(Error::Parameter {
                name: "K",
                reason: "pulled set is empty",
            });
        }
        let factor = c.factor();
        Ok(self.dijkstra(source, |e| {
            if self.is_k_edge(e) {
                e.length * factor
            } else {
                e.length
            }
        }))
    }

    /// Pulled distance `d_c(a, b)`.
    pub fn pulled_distance(&self, a: usize, b: usize, c: PullExponent) -> Result<f64> {
        self.check_node(b)?;
        finite_or_unreachable(self.pulled_distances_from(a, c)?[b], a, b)
    }

    /// Node closest in chart coordinates to `p`.
    pub fn nearest_node(&self, p: [f64; 3]) -> Option<usize> {
        let d2 = |q: &[f64; 3]| (0..3).map(|i| (q[i] - p[i]) * (q[i] - p[i])).sum::<f64>();
        (0..self.len()).min_by(|&i, &j| d2(&self.coords[i]).total_cmp(&d2(&self.coords[j])))
    }
}

fn finite_or_unreachable(d: f64, from: usize, to: usize) -> Result<f64> {
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Unreachable { from, to })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lattice used by [`discretize`].
///
/// Each `t` layer is a `(resolution + 1)²` grid on the square
/// `[−half_width, half_width]²` of the normal disc, in Cartesian
/// coordinates `(r cos θ, r sin θ)`; layers are evenly spaced in `t` and
/// joined periodically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub resolution: usize,
    pub half_width: f64,
    pub t_layers: usize,
    pub t_period: f64,
}

impl Lattice {
    /// Default lattice: half width `0.5` on flat models, `1.1` on the round
    /// sphere, and 8 layers in `t`.
    pub fn for_model(model: &ModelMetric, resolution: usize) -> Self {
        let half_width = match model {
            ModelMetric::RoundS3Baseline | ModelMetric::RoundS3Drawstring { .. } => 1.1,
            _ => 0.5,
        };
        Lattice {
            resolution,
            half_width,
            t_layers: 8,
            t_period: model.t_period(),
        }
    }

    pub fn mesh(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn side(&self) -> usize {
        self.resolution + 1
    }

    /// Node index of lattice position `(i, j)` in layer `k`.
    pub fn node(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.side() + j) * self.side() + i
    }

    /// Node on the axis `r = 0` in layer `k`.
    pub fn axis_node(&self, k: usize) -> usize {
        let c = self.resolution / 2;
        self.node(c, c, k)
    }

    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let m = self.mesh();
        [
            -self.half_width + m * i as f64,
            -self.half_width + m * j as f64,
            self.t_period * k as f64 / self.t_layers as f64,
        ]
    }

    /// Nodes nearest to the Cartesian point `(x, y)` in layer `k`.
    pub fn node_near(&self, x: f64, y: f64, k: usize) -> usize {
        let m = self.mesh();
        let idx = |v: f64| {
            let i = math::floor((v + self.half_width) / m + 0.5);
            (i.max(0.0) as usize).min(self.resolution)
        };
        self.node(idx(x), idx(y), k % self.t_layers)
    }
}

/// Radius of the drawstring tube, if the model has one.
fn tube_radius(model: &ModelMetric) -> Option<f64> {
    model.profile().map(DrawstringProfile::outer_radius)
}

/// Graph approximation of a tube model with the default [`Lattice`].
pub fn discretize(model: &ModelMetric, resolution: usize) -> Result<PulledSpace> {
    discretize_on(model, &Lattice::for_model(model, resolution))
}

/// Graph approximation of a tube model on a given lattice.
///
/// Edges join the 8 lattice neighbours within a layer and the same lattice
/// position in adjacent layers. An edge's length is `√(Δᵀ g(mid) Δ)` for the
/// chart displacement `Δ` and the metric at the chart midpoint, with the
/// polar metric written in Cartesian form `A² r̂r̂ᵀ + (B/r)² θ̂θ̂ᵀ`.
/// `K` is the axis `r = 0`, one node per layer.
pub fn discretize_on(model: &ModelMetric, lattice: &Lattice) -> Result<PulledSpace> {
    let res = lattice.resolution;
    if res < 8 {
        return Err(Error::Resolution {
            resolution: res,
            reason: "need at least 8 cells per side",
        });
    }
    if !res.is_multiple_of(2) {
        return Err(Error::Resolution {
            resolution: res,
            reason: "resolution must be even so the axis is a lattice node",
        });
    }
    if lattice.t_layers == 0 || !(lattice.t_period > 0.0) || !(lattice.half_width > 0.0) {
        return Err(Error::Configuration("lattice needs layers, a period and a width"));
    }
    if !(lattice.half_width * core::f64::consts::SQRT_2 < model.max_radius()) {
        return Err(Error::Configuration("lattice window leaves the chart"));
    }
    let mesh = lattice.mesh();
    if let Some(r1) = tube_radius(model) {
        if r1 >= 0.5 * mesh && r1 < 4.0 * mesh {
            return Err(Error::Resolution {
                resolution: res,
                reason: "drawstring tube is only partially resolved (fewer than 4 cells across r1)",
            });
        }
    }
    let side = lattice.side();
    let layers = lattice.t_layers;
    let mut coords = Vec::with_capacity(side * side * layers);
    for k in 0..layers {
        for j in 0..side {
            for i in 0..side {
                coords.push(lattice.position(i, j, k));
            }
        }
    }
    let mut space = PulledSpace::new(coords);
    space.mesh = mesh;
    let dt = lattice.t_period / layers as f64;
    for k in 0..layers {
        for j in 0..side {
            for i in 0..side {
                let a = lattice.node(i, j, k);
                let p = space.coords[a];
                for (di, dj) in [(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= side as i64 || nj >= side as i64 {
                        continue;
                    }
                    let b = lattice.node(ni as usize, nj as usize, k);
                    let q = space.coords[b];
                    let len = segment_length(model, p, [q[0] - p[0], q[1] - p[1], 0.0])?;
                    space.add_edge(a, b, len)?;
                }
                if layers > 1 && (k + 1 < layers || layers > 2) {
                    let b = lattice.node(i, j, (k + 1) % layers);
                    let len = segment_length(model, p, [0.0, 0.0, dt])?;
                    space.add_edge(a, b, len)?;
                }
            }
        }
    }
    let axis: Vec<usize> = (0..layers).map(|k| lattice.axis_node(k)).collect();
    space.set_pulled(&axis)?;
    Ok(space)
}

/// Metric length of the chart segment from Cartesian point `p` by `d`,
/// using the metric at its midpoint.
fn segment_length(model: &ModelMetric, p: [f64; 3], d: [f64; 3]) -> Result<f64> {
    let mx = p[0] + 0.5 * d[0];
    let my = p[1] + 0.5 * d[1];
    let mt = p[2] + 0.5 * d[2];
    let r = math::sqrt(mx * mx + my * my);
    let [a, b, c] = model.diagonal_factors([r, core::f64::consts::FRAC_PI_2, mt])?;
    let planar = if r == 0.0 {
        a * a * (d[0] * d[0] + d[1] * d[1])
    } else {
        let radial = (mx * d[0] + my * d[1]) / r;
        let angular = (mx * d[1] - my * d[0]) / r;
        let b_over_r = b / r;
        a * a * radial * radial + b_over_r * b_over_r * angular * angular
    };
    Ok(math::sqrt(planar + c * c * d[2] * d[2]))
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub index: usize,
    pub sup_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub rows: Vec<StudyRow>,
    pub mesh: f64,
    pub n_pairs: usize,
}

impl StudyTable {
    /// Whether every row is at most its predecessor plus `slack`.
    pub fn nonincreasing_within(&self, slack: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].sup_deviation <= w[0].sup_deviation + slack)
    }

    /// Whether every row is strictly below its predecessor.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].sup_deviation < w[0].sup_deviation)
    }
}

/// Sup over sample pairs of `|d_{g_i} − d_c|`, for each model `i`.
///
/// `d_c` is the pulled distance on the discretised baseline of the first
/// model with `K` the axis; every `d_{g_i}` is the graph distance on the
/// same lattice. Pairs are `(node, node)` indices of that lattice.
pub fn convergence_study(
    models: &[ModelMetric],
    lattice: &Lattice,
    c: PullExponent,
    samples: &[(usize, usize)],
) -> Result<StudyTable> {
    let first = models.first().ok_or(Error::Configuration("no models in study"))?;
    let base = first
        .baseline()
        .ok_or(Error::Configuration("study needs drawstring presets"))?;
    for m in models {
        if m.baseline().as_ref() != Some(&base) || m.t_period() != first.t_period() {
            return Err(Error::Configuration("models do not share one chart"));
        }
    }
    let base_space = discretize_on(&base, lattice)?;
    let n = base_space.len();
    if samples.iter().any(|&(a, b)| a >= n || b >= n) {
        return Err(Error::Configuration("sample pair outside the lattice"));
    }
    let sources = distinct_sources(samples);
    let mut target = Vec::with_capacity(samples.len());
    let mut pulled_rows = Vec::new();
    for &s in &sources {
        pulled_rows.push((s, base_space.pulled_distances_from(s, c)?));
    }
    for &(a, b) in samples {
        target.push(row_for(&pulled_rows, a)[b]);
    }
    let mut rows = Vec::with_capacity(models.len());
    for (index, model) in models.iter().enumerate() {
        let space = discretize_on(model, lattice)?;
        if space.len() != n {
            return Err(Error::Configuration("models do not share one discretisation"));
        }
        let mut dist_rows = Vec::new();
        for &s in &sources {
            dist_rows.push((s, space.distances_from(s)?));
        }
        let mut sup: f64 = 0.0;
        for (i, &(a, b)) in samples.iter().enumerate() {
            sup = sup.max(math::abs(row_for(&dist_rows, a)[b] - target[i]));
        }
        rows.push(StudyRow {
            index,
            sup_deviation: sup,
        });
    }
    Ok(StudyTable {
        rows,
        mesh: lattice.mesh(),
        n_pairs: samples.len(),
    })
}

fn distinct_sources(samples: &[(usize, usize)]) -> Vec<usize> {
    let mut s: Vec<usize> = samples.iter().map(|p| p.0).collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn row_for(rows: &[(usize, Vec<f64>)], source: usize) -> &[f64] {
    let i = rows.partition_point(|r| r.0 < source);
    &rows[i].1
}

/// Sample pairs on opposite sides of the axis in different layers: points
/// at radius `offset` and angles `0, π`, paired across `t` layers `k` and
/// `k + t_layers/2`.
pub fn opposite_pairs(lattice: &Lattice, offset: f64) -> Vec<(usize, usize)> {
    let half = (lattice.t_layers / 2).max(1);
    let mut out = Vec::new();
    for k in 0..lattice.t_layers.min(2) {
        let a = lattice.node_near(-offset, 0.0, k);
        let b = lattice.node_near(offset, 0.0, k + half);
        out.push((a, b));
        let a = lattice.node_near(0.0, -offset, k);
        let b = lattice.node_near(0.0, offset, k + half);
        out.push((a, b));
        let a = lattice.node_near(-offset, 0.0, k);
        let b = lattice.node_near(offset, 0.0, k);
        out.push((a, b));
    }
    out
}

/// Outcome of [`lipschitz_cpull_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum LipschitzOutcome {
    /// Hypotheses hold; `worst_ratio` is `max d_{c,B}(fx, fy) / d_{c,A}(x, y)`.
    Checked {
        holds: bool,
        worst_ratio: f64,
        worst_pair: Option<(usize, usize)>,
    },
    /// A hypothesis fails; the conclusion is not tested.
    Precondition(String),
}

impl LipschitzOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, LipschitzOutcome::Checked { holds: true, .. })
    }
}

/// Tests `d_{c,B}(f(x), f(y)) ≤ L d_{c,A}(x, y)` over all node pairs.
///
/// Hypotheses: `B ⊆ A`, `f(A) ⊆ B`, `f` fixes `B`, `f` is `L`-Lipschitz for
/// the graph distance, and `f` maps `A` into `B` `L`-Lipschitz for their
/// induced graph distances (in a length space the last follows from the
/// previous one; on a graph it has to be assumed).
pub fn lipschitz_cpull_check(
    space: &PulledSpace,
    a_set: &[usize],
    b_set: &[usize],
    f: &[usize],
    lipschitz: f64,
    c: PullExponent,
) -> Result<LipschitzOutcome> {
    let n = space.len();
    if f.len() != n || f.iter().any(|&v| v >= n) {
        return Err(Error::Parameter {
            name: "f",
            reason: "map must send every node to a node",
        });
    }
    let mut in_a = alloc::vec![false; n];
    let mut in_b = alloc::vec![false; n];
    for &v in a_set {
        space.check_node(v)?;
        in_a[v] = true;
    }
    for &v in b_set {
        space.check_node(v)?;
        in_b[v] = true;
    }
    if let Some(v) = (0..n).find(|&v| in_b[v] && !in_a[v]) {
        return Ok(LipschitzOutcome::Precondition(format!("node {v} of B is not in A")));
    }
    if let Some(v) = (0..n).find(|&v| in_a[v] && !in_b[f[v]]) {
        return Ok(LipschitzOutcome::Precondition(format!("f maps node {v} of A outside B")));
    }
    if let Some(v) = (0..n).find(|&v| in_b[v] && f[v] != v) {
        return Ok(LipschitzOutcome::Precondition(format!("f moves node {v} of B")));
    }
    let tol = 1e-12;
    let base: Vec<Vec<f64>> = (0..n).map(|s| space.dijkstra(s, |e| e.length)).collect();
    for x in 0..n {
        for y in (x + 1)..n {
            if base[f[x]][f[y]] > lipschitz * base[x][y] * (1.0 + tol) {
                return Ok(LipschitzOutcome::Precondition(format!(
                    "f is not {lipschitz}-Lipschitz on ({x}, {y})"
                )));
            }
        }
    }
    let induced = |mask: &[bool], s: usize| {
        space.dijkstra(s, |e| {
            if mask[e.a] && mask[e.b] {
                e.length
            } else {
                f64::INFINITY
            }
        })
    };
    for x in (0..n).filter(|&v| in_a[v]) {
        let da = induced(&in_a, x);
        let db = induced(&in_b, f[x]);
        for y in (0..n).filter(|&v| in_a[v]) {
            if db[f[y]] > lipschitz * da[y] * (1.0 + tol) {
                return Ok(LipschitzOutcome::Precondition(format!(
                    "f is not {lipschitz}-Lipschitz from the A-induced to the B-induced distance on ({x}, {y})"
                )));
            }
        }
    }
    let pulled_a = space.with_pulled(a_set)?;
    let pulled_b = space.with_pulled(b_set)?;
    let mut worst: f64 = 0.0;
    let mut worst_pair = None;
    let mut holds = true;
    for x in 0..n {
        let da = pulled_a.pulled_distances_from(x, c)?;
        let db = pulled_b.pulled_distances_from(f[x], c)?;
        for y in 0..n {
            if x == y {
                continue;
            }
            let lhs = db[f[y]];
            let rhs = da[y];
            if lhs > lipschitz * rhs * (1.0 + tol) + tol {
                holds = false;
            }
            let ratio = if rhs > 0.0 {
                lhs / rhs
            } else if lhs > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if ratio > worst || worst_pair.is_none() {
                worst = worst.max(ratio);
                worst_pair = Some((x, y));
            }
        }
    }
    Ok(LipschitzOutcome::Checked {
        holds,
        worst_ratio: worst,
        worst_pair,
    })
}
