//! Finite multigraphs, shortest-path metrics, vertex boundaries, exact
//! conductance, and expander family generators.
//!
//! A [`FiniteGraph`] is an undirected multigraph: parallel edges are kept
//! (the Margulis generator maps collide, and every edge carries weight in
//! the Laplacian and in the `D_f` ratio), self-loops are rejected at
//! construction. Every graph is a metric space under the shortest-path
//! metric, and the vertex boundary `∂A = {x ∉ A : dist(x, A) = 1}` drives
//! the exact conductance
//!
//! ```text
//! c(G) = min { |∂A| / |A| : ∅ ≠ A ⊆ V, |A| ≤ |V|/2 }
//! ```
//!
//! computed here by exhaustive subset enumeration (exact rational output,
//! capped at 24 vertices). Larger graphs get the spectral lower bound
//! `lambda1 / (2 * d_max)` from the [`crate::spectral`] module instead.
//!
//! Two deterministic expander-family generators are provided: the degree-8
//! Margulis construction on the torus `(Z/n)^2` and the configuration-model
//! random regular graph. Cycle families are included as the standard
//! negative control (their spectral gap decays like `1/n^2`).

use std::collections::VecDeque;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{self, SpectralCertificate};

/// Hard cap for exhaustive conductance enumeration (2^24 subsets).
pub const CONDUCTANCE_EXHAUSTIVE_CAP: usize = 24;

/// An undirected finite multigraph with cached degrees, adjacency, and
/// connectivity. Edges are stored endpoint-sorted and lexicographically
/// ordered, so equal graphs compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    connected: bool,
}

impl FiniteGraph {
    /// Validates endpoints, rejects self-loops, and builds the degree
    /// sequence and adjacency lists. Disconnected graphs are accepted but
    /// flagged; the metric and spectral operations reject them later.
    pub fn build(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for endpoint in [u, v] {
                if endpoint >= vertex_count {
                    return Err(Error::EndpointOutOfRange { endpoint, vertex_count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();

        let mut degrees = vec![0usize; vertex_count];
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in &normalized {
            degrees[u] += 1;
            degrees[v] += 1;
            adjacency[u].push(v);
            adjacency[v].push(u);
        }

        let mut graph = FiniteGraph {
            vertex_count,
            edges: normalized,
            degrees,
            adjacency,
            connected: false,
        };
        graph.connected = graph
            .distances_from(0)
            .expect("vertex 0 exists")
            .iter()
            .all(Option::is_some);
        Ok(graph)
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of edges, counting multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoint-sorted edge multiset.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Per-vertex edge-endpoint counts.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Degree of a single vertex.
    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degrees[v])
    }

    /// Maximum degree; the single `d` used wherever one degree is required
    /// for an irregular graph.
    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Neighbor list of `v` with multiplicity.
    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        self.check_vertex(v)?;
        Ok(&self.adjacency[v])
    }

    /// Whether the graph is connected (cached at construction).
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count {
            return Err(Error::VertexOutOfRange { vertex: v, vertex_count: self.vertex_count });
        }
        Ok(())
    }

    /// Requires connectivity; shared guard for the metric/spectral surface.
    pub(crate) fn require_connected(&self) -> Result<()> {
        if !self.connected {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    /// Breadth-first distances from `v`; `None` marks unreachable vertices.
    pub fn distances_from(&self, v: usize) -> Result<Vec<Option<usize>>> {
        self.check_vertex(v)?;
        let mut dist = vec![None; self.vertex_count];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            let next = dist[x].expect("queued vertices have distances") + 1;
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(next);
                    queue.push_back(y);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path distance between two vertices.
    pub fn distance(&self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        self.distances_from(u)?[v].ok_or(Error::Unreachable { u, v })
    }

    /// Full distance matrix (requires connectivity).
    pub fn distance_matrix(&self) -> Result<Vec<Vec<usize>>> {
        self.require_connected()?;
        (0..self.vertex_count)
            .map(|v| {
                Ok(self
                    .distances_from(v)?
                    .into_iter()
                    .map(|d| d.expect("connected graph"))
                    .collect())
            })
            .collect()
    }

    /// Vertex boundary `∂A = {x : dist(x, A) = 1}`: all vertices outside `A`
    /// adjacent to some member of `A`. Returned sorted.
    pub fn vertex_boundary(&self, a: &[usize]) -> Result<Vec<usize>> {
        if a.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut in_a = vec![false; self.vertex_count];
        for &v in a {
            self.check_vertex(v)?;
            in_a[v] = true;
        }
        let mut boundary = Vec::new();
        for x in 0..self.vertex_count {
            if !in_a[x] && self.adjacency[x].iter().any(|&y| in_a[y]) {
                boundary.push(x);
            }
        }
        Ok(boundary)
    }

    /// Exact vertex-boundary conductance by exhaustive enumeration of all
    /// nonempty subsets with `|A| ≤ n/2`, returned as an exact rational.
    /// Capped at [`CONDUCTANCE_EXHAUSTIVE_CAP`] vertices.
    pub fn conductance_exact(&self) -> Result<Ratio<u64>> {
        self.require_connected()?;
        let n = self.vertex_count;
        if n > CONDUCTANCE_EXHAUSTIVE_CAP {
            return Err(Error::ExhaustiveCapExceeded { size: n, cap: CONDUCTANCE_EXHAUSTIVE_CAP });
        }
        if n == 1 {
            // No admissible subset; conductance is vacuous. Treat the single
            // point as perfectly expanding.
            return Ok(Ratio::new(1, 1));
        }
        let neighbor_masks: Vec<u32> = (0..n)
            .map(|v| self.adjacency[v].iter().fold(0u32, |m, &y| m | (1 << y)))
            .collect();
        let half = n / 2; // |A| ≤ n/2 with |A| an integer
        let mut best: Option<(u64, u64)> = None; // (|∂A|, |A|) with minimal ratio
        for mask in 1u32..(1u32 << n) {
            let size = mask.count_ones() as u64;
            if size as usize > half {
                continue;
            }
            let mut reach = 0u32;
            let mut bits = mask;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                reach |= neighbor_masks[v];
                bits &= bits - 1;
            }
            let boundary = (reach & !mask).count_ones() as u64;
            let better = match best {
                None => true,
                // compare boundary/size < b/s via cross multiplication
                Some((b, s)) => boundary * s < b * size,
            };
            if better {
                best = Some((boundary, size));
            }
        }
        let (boundary, size) = best.expect("at least one admissible subset");
        Ok(Ratio::new(boundary, size))
    }

    /// Serializes to the interchange edge-list format: first line `n m`,
    /// then `m` lines `u v` (0-based, parallel edges repeated).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list interchange format produced by
    /// [`FiniteGraph::to_edge_list`]. Blank lines and `#` comments are
    /// permitted.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let mut head = header.split_whitespace();
        let n: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line {header:?}")))?;
        let m: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line {header:?}")))?;
        if head.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens in header {header:?}")));
        }
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line {line:?}")))?;
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line {line:?}")))?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("trailing tokens in edge line {line:?}")));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("expected {m} edges, found {}", edges.len())));
        }
        Self::build(n, &edges)
    }
}

/// Cycle graph `C_n` (n ≥ 3).
pub fn cycle_graph(n: usize) -> Result<FiniteGraph> {
    if n < 3 {
        return Err(Error::Parse(format!("cycle needs n >= 3, got {n}")));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    FiniteGraph::build(n, &edges)
}

/// Complete graph `K_n` (n ≥ 2).
pub fn complete_graph(n: usize) -> Result<FiniteGraph> {
    if n < 2 {
        return Err(Error::Parse(format!("complete graph needs n >= 2, got {n}")));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    FiniteGraph::build(n, &edges)
}

/// Path graph `0 – 1 – … – n-1` (n ≥ 2).
pub fn path_graph(n: usize) -> Result<FiniteGraph> {
    if n < 2 {
        return Err(Error::Parse(format!("path needs n >= 2, got {n}")));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    FiniteGraph::build(n, &edges)
}

/// Degree-8 Margulis expander on the torus `(Z/n)^2` with the four maps
///
/// ```text
/// T1 (x, y) = (x, x + y)      T2 (x, y) = (x, x + y + 1)
/// T3 (x, y) = (x + y, y)      T4 (x, y) = (x + y + 1, y)
/// ```
///
/// Each unordered edge `{v, T(v)}` is added once per map application, so the
/// inverse maps are covered automatically; parallel edges are kept, loops
/// (fixed points of a map) are dropped. Vertex `(x, y)` gets id `x * n + y`.
/// Deterministic; degree at most 8.
pub fn margulis_graph(n: usize) -> Result<FiniteGraph> {
    if n < 2 {
        return Err(Error::Parse(format!("margulis graph needs n >= 2, got {n}")));
    }
    let id = |x: usize, y: usize| x * n + y;
    let mut edges = Vec::with_capacity(4 * n * n);
    for x in 0..n {
        for y in 0..n {
            let images = [
                (x, (x + y) % n),
                (x, (x + y + 1) % n),
                ((x + y) % n, y),
                ((x + y + 1) % n, y),
            ];
            for (ix, iy) in images {
                if (ix, iy) != (x, y) {
                    edges.push((id(x, y), id(ix, iy)));
                }
            }
        }
    }
    FiniteGraph::build(n * n, &edges)
}

/// Maximum pairing rounds before the configuration model gives up.
const CONFIGURATION_MODEL_ATTEMPTS: usize = 200;

/// Simple d-regular graph on n vertices via the configuration model:
/// shuffle `n*d` half-edge stubs, pair consecutively, and reject the whole
/// pairing whenever it contains a loop or parallel edge. Deterministic for a
/// fixed seed.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<FiniteGraph> {
    if !(n * d).is_multiple_of(2) {
        return Err(Error::ParityViolation { n, d });
    }
    if d >= n {
        return Err(Error::DegreeTooLarge { n, d });
    }
    if d == 0 {
        return Err(Error::Parse("degree 0 gives a disconnected graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..CONFIGURATION_MODEL_ATTEMPTS {
        // Fisher-Yates shuffle driven by the seeded stream.
        for i in (1..stubs.len()).rev() {
            let j = rng.gen_range(0..=i);
            stubs.swap(i, j);
        }
        let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
        let mut ok = true;
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                ok = false;
                break;
            }
            edges.push((u, v));
        }
        if ok {
            return FiniteGraph::build(n, &edges);
        }
    }
    Err(Error::RejectionFailure { attempts: CONFIGURATION_MODEL_ATTEMPTS })
}

/// Family kinds known to the generators. `Cycle` is the deliberate
/// non-expander control: its spectral gap `2(1 - cos(2π/n))` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Margulis,
    RandomRegular,
    Cycle,
}

impl FamilyKind {
    /// Stable lowercase name used by the CLI and reports.
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Margulis => "margulis",
            FamilyKind::RandomRegular => "random-regular",
            FamilyKind::Cycle => "cycle",
        }
    }
}

/// One family member: the graph together with its spectral certificate.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub graph: FiniteGraph,
    pub certificate: SpectralCertificate,
}

/// An indexed family of graphs with per-member spectral certificates.
/// Member sizes are strictly increasing; every certificate has
/// `lambda1 > 0` (members are connected by construction) and records the
/// conductance lower bound `lambda1 / (2 * d_max)`.
#[derive(Debug, Clone)]
pub struct ExpanderFamily {
    pub kind: FamilyKind,
    pub sizes: Vec<usize>,
    pub degree: Option<usize>,
    pub seed: Option<u64>,
    pub members: Vec<FamilyMember>,
}

/// Derives a per-member random stream from `(seed, member index)` so family
/// generation is schedule-independent.
fn member_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

impl ExpanderFamily {
    /// Generates and certifies every member. `degree` applies to
    /// random-regular families (default 4); `seed` is required for them and
    /// ignored by the deterministic kinds. Size semantics: Margulis sizes
    /// are torus side lengths (member has `size^2` vertices), cycle and
    /// random-regular sizes are vertex counts.
    pub fn generate(
        kind: FamilyKind,
        sizes: &[usize],
        degree: Option<usize>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::SizesNotIncreasing);
        }
        let mut members = Vec::with_capacity(sizes.len());
        for (index, &size) in sizes.iter().enumerate() {
            let graph = match kind {
                FamilyKind::Margulis => margulis_graph(size)?,
                FamilyKind::Cycle => cycle_graph(size)?,
                FamilyKind::RandomRegular => {
                    let seed = seed.ok_or(Error::SeedRequired { kind: "random-regular" })?;
                    random_regular(size, degree.unwrap_or(4), member_seed(seed, index))?
                }
            };
            let certificate = spectral::lambda1(&graph)?;
            members.push(FamilyMember { graph, certificate });
        }
        Ok(ExpanderFamily { kind, sizes: sizes.to_vec(), degree, seed, members })
    }
}
