//! Finitely supported measures and the Kantorovich–Rubinstein metric.
//!
//! The space `P(X)` of finitely supported equal-mass measures on a finite
//! metric space carries the Wasserstein-1 distance
//!
//! ```text
//! d_P(μ, ν) = min { Σ_{i,j} π_ij · d(x_i, y_j) : π ≥ 0, row sums = μ, col sums = ν },
//! ```
//!
//! equal by LP duality to the supremum of `∫f dμ − ∫f dν` over 1-Lipschitz
//! potentials `f`. This module solves the primal with a transportation
//! simplex; the test suite cross-checks it against an independent dual LP.
//!
//! On top of the metric sit two Lipschitz-extension devices:
//!
//! * [`bary_extend`] — the barycentric extension `ḡ(Σ λᵢ xᵢ) = Σ λᵢ g(xᵢ)`
//!   of a pointwise map `g` into Euclidean space, Lipschitz from `d_P`.
//! * [`partition_map`] — the map `ψ(x) = Σᵢ λᵢ(x) δ_{xᵢ}` with weights
//!   `λᵢ(x) = max(0, K − d(x, xᵢ))` over a `K`-dense net, normalized to a
//!   probability measure. [`psi_lipschitz_audit`] measures its empirical
//!   local Lipschitz constant and the cover multiplicity of the `K`-balls.
//!
//! Masses must agree for the distance to be finite (a constant potential
//! witnesses `+∞` otherwise), so [`kr_distance`] rejects unequal masses and
//! `partition_map` normalizes; unnormalized weighted sums remain available
//! through [`FiniteMeasure`] itself and `bary_extend`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::FiniteGraph;

/// Triangle-inequality validation is exhaustive over all triples up to this
/// point count and randomly sampled above it.
pub const TRIANGLE_EXHAUSTIVE_CAP: usize = 512;

/// Number of sampled triples used to spot-check large distance tables.
const TRIANGLE_SAMPLES: usize = 500_000;

/// Additive slack for triangle-inequality checks on floating-point tables.
const METRIC_TOL: f64 = 1e-9;

/// Pivot budget for one transportation solve; exceeding it indicates
/// degeneracy beyond what Bland's rule should permit.
pub const TRANSPORT_PIVOT_CAP: usize = 50_000;

/// A finite metric space presented as a validated distance table.
#[derive(Debug, Clone)]
pub struct MetricSpaceTable {
    n: usize,
    dist: Vec<f64>, // row-major n×n, symmetrized
}

impl MetricSpaceTable {
    /// Validates and stores a distance table: square, zero diagonal,
    /// symmetric within 1e−12 (stored symmetrized), positive off-diagonal,
    /// and triangle inequality on all triples (sampled above
    /// [`TRIANGLE_EXHAUSTIVE_CAP`] points).
    pub fn new(table: &[Vec<f64>]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAMetric("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAMetric(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let d = table[i][j];
                if !d.is_finite() {
                    return Err(Error::NotAMetric(format!("d({i},{j}) = {d} is not finite")));
                }
                if i == j {
                    if d != 0.0 {
                        return Err(Error::NotAMetric(format!("nonzero diagonal d({i},{i}) = {d}")));
                    }
                } else {
                    if d <= 0.0 {
                        return Err(Error::NotAMetric(format!(
                            "d({i},{j}) = {d} must be positive off the diagonal"
                        )));
                    }
                    if (d - table[j][i]).abs() > 1e-12 {
                        return Err(Error::NotAMetric(format!(
                            "asymmetry: d({i},{j}) = {d} but d({j},{i}) = {}",
                            table[j][i]
                        )));
                    }
                }
                dist[i * n + j] = 0.5 * (d + table[j][i]);
            }
        }
        let space = MetricSpaceTable { n, dist };
        space.check_triangles()?;
        Ok(space)
    }

    fn check_triangles(&self) -> Result<()> {
        let n = self.n;
        let check = |i: usize, j: usize, k: usize| -> Result<()> {
            if self.d(i, k) > self.d(i, j) + self.d(j, k) + METRIC_TOL {
                return Err(Error::NotAMetric(format!(
                    "triangle violation: d({i},{k}) = {} > d({i},{j}) + d({j},{k}) = {}",
                    self.d(i, k),
                    self.d(i, j) + self.d(j, k)
                )));
            }
            Ok(())
        };
        if n <= TRIANGLE_EXHAUSTIVE_CAP {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7a1a);
            for _ in 0..TRIANGLE_SAMPLES {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(())
    }

    /// Shortest-path metric of a connected graph.
    pub fn from_graph(g: &FiniteGraph) -> Result<Self> {
        let matrix = g.distance_matrix()?;
        let n = g.vertex_count();
        if n == 1 {
            return Ok(MetricSpaceTable { n: 1, dist: vec![0.0] });
        }
        let mut dist = vec![0.0; n * n];
        for (i, row) in matrix.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                dist[i * n + j] = d as f64;
            }
        }
        // Graph metrics satisfy the axioms by construction.
        Ok(MetricSpaceTable { n, dist })
    }

    /// Euclidean metric on a list of (distinct) coordinate points.
    pub fn from_euclidean_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::NotAMetric("no points".into()));
        }
        let dim = points[0].len();
        let mut dist = vec![0.0; n * n];
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::LengthMismatch { got: p.len(), want: dim });
            }
            for (j, q) in points.iter().enumerate().skip(i + 1) {
                let d = p
                    .iter()
                    .zip(q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if d <= 0.0 {
                    return Err(Error::NotAMetric(format!("points {i} and {j} coincide")));
                }
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        // Euclidean distances satisfy the axioms by construction.
        Ok(MetricSpaceTable { n, dist })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.n
    }

    /// Whether the space is empty (never true for a constructed table).
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Distance between two points (panics on out-of-range indices).
    pub fn d(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "point index out of range");
        self.dist[i * self.n + j]
    }
}

/// A finitely supported measure with nonnegative weights on distinct points
/// of an ambient finite metric space. Atoms are kept sorted by point.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    atoms: Vec<(usize, f64)>,
    total_mass: f64,
}

impl FiniteMeasure {
    /// Builds a measure from `(point, weight)` atoms. Weights must be
    /// finite and nonnegative, points distinct, and at least one atom
    /// present.
    pub fn new(atoms: &[(usize, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let mut sorted = atoms.to_vec();
        sorted.sort_by_key(|&(p, _)| p);
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateSupport(pair[0].0));
            }
        }
        for &(_, w) in &sorted {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NegativeWeight(w));
            }
        }
        let total_mass = sorted.iter().map(|&(_, w)| w).sum();
        Ok(FiniteMeasure { atoms: sorted, total_mass })
    }

    /// The Dirac measure at one point.
    pub fn dirac(point: usize) -> Self {
        FiniteMeasure { atoms: vec![(point, 1.0)], total_mass: 1.0 }
    }

    /// Atoms sorted by point, including any zero weights.
    pub fn atoms(&self) -> &[(usize, f64)] {
        &self.atoms
    }

    /// Cached total mass.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Atoms with strictly positive weight.
    pub fn positive_atoms(&self) -> Vec<(usize, f64)> {
        self.atoms.iter().copied().filter(|&(_, w)| w > 0.0).collect()
    }

    /// Rescales to total mass 1; errors when the mass is zero.
    pub fn normalized(&self) -> Result<FiniteMeasure> {
        if self.total_mass <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let atoms: Vec<(usize, f64)> = self
            .atoms
            .iter()
            .map(|&(p, w)| (p, w / self.total_mass))
            .collect();
        let total_mass = atoms.iter().map(|&(_, w)| w).sum();
        Ok(FiniteMeasure { atoms, total_mass })
    }

    /// Checks every support point lies inside the given space.
    pub fn validate_in_space(&self, space: &MetricSpaceTable) -> Result<()> {
        for &(p, _) in &self.atoms {
            if p >= space.len() {
                return Err(Error::PointOutOfRange { point: p, len: space.len() });
            }
        }
        Ok(())
    }
}

/// An optimal transportation plan: the minimal cost together with the flows
/// realizing it, as `(source point, target point, mass)` triples sorted by
/// source then target, positive masses only.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub cost: f64,
    pub flows: Vec<(usize, usize, f64)>,
}

/// The Kantorovich–Rubinstein (Wasserstein-1) distance between two
/// equal-mass measures on the same space.
///
/// Exact symmetry holds because the pair is canonically ordered before
/// solving, so both argument orders run the identical solve.
pub fn kr_distance(mu: &FiniteMeasure, nu: &FiniteMeasure, space: &MetricSpaceTable) -> Result<f64> {
    Ok(kr_plan(mu, nu, space)?.cost)
}

/// [`kr_distance`] plus the realizing plan.
pub fn kr_plan(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    space: &MetricSpaceTable,
) -> Result<TransportPlan> {
    mu.validate_in_space(space)?;
    nu.validate_in_space(space)?;
    if (mu.total_mass() - nu.total_mass()).abs() > 1e-12 {
        return Err(Error::UnequalMass { mu: mu.total_mass(), nu: nu.total_mass() });
    }
    let a = mu.positive_atoms();
    let b = nu.positive_atoms();
    if a.is_empty() || b.is_empty() {
        return Err(Error::ZeroMass);
    }
    // Canonical order makes kr(mu, nu) and kr(nu, mu) bitwise identical.
    let swapped = atom_order(&b, &a) == std::cmp::Ordering::Less;
    let (src, dst) = if swapped { (&b, &a) } else { (&a, &b) };

    let cost = |i: usize, j: usize| space.d(src[i].0, dst[j].0);
    let supplies: Vec<f64> = src.iter().map(|&(_, w)| w).collect();
    let demands: Vec<f64> = dst.iter().map(|&(_, w)| w).collect();
    let flows = transportation_simplex(&supplies, &demands, &cost)?;

    let total: f64 = flows.iter().map(|&(i, j, f)| f * cost(i, j)).sum();
    let mut plan: Vec<(usize, usize, f64)> = flows
        .iter()
        .filter(|&&(_, _, f)| f > 0.0)
        .map(|&(i, j, f)| {
            if swapped {
                (dst[j].0, src[i].0, f)
            } else {
                (src[i].0, dst[j].0, f)
            }
        })
        .collect();
    plan.sort_by_key(|&(s, t, _)| (s, t));
    Ok(TransportPlan { cost: total, flows: plan })
}

fn atom_order(a: &[(usize, f64)], b: &[(usize, f64)]) -> std::cmp::Ordering {
    for (&(pa, wa), &(pb, wb)) in a.iter().zip(b) {
        match pa.cmp(&pb).then(wa.total_cmp(&wb)) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Solves the balanced transportation problem by the simplex method on the
/// bipartite basis tree: northwest-corner start, potentials by tree
/// traversal, Bland's rule (first negative reduced cost in row-major order,
/// lexicographically smallest leaving cell among ties) for anti-cycling.
fn transportation_simplex(
    supplies: &[f64],
    demands: &[f64],
    cost: &dyn Fn(usize, usize) -> f64,
) -> Result<Vec<(usize, usize, f64)>> {
    let m = supplies.len();
    let k = demands.len();

    // Northwest-corner initialization: advances one index per step, so it
    // produces exactly m + k − 1 basis cells forming a spanning tree of the
    // bipartite row/column graph (zero-flow cells mark degeneracy).
    let mut basis: Vec<(usize, usize, f64)> = Vec::with_capacity(m + k - 1);
    let mut in_basis = vec![false; m * k];
    {
        let mut s = supplies.to_vec();
        let mut d = demands.to_vec();
        let (mut i, mut j) = (0, 0);
        loop {
            let f = s[i].min(d[j]);
            basis.push((i, j, f));
            in_basis[i * k + j] = true;
            s[i] -= f;
            d[j] -= f;
            if i == m - 1 && j == k - 1 {
                break;
            }
            if s[i] <= 0.0 && i < m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        debug_assert_eq!(basis.len(), m + k - 1);
    }

    let mut u = vec![0.0; m];
    let mut v = vec![0.0; k];
    for pivot in 0..=TRANSPORT_PIVOT_CAP {
        // Potentials: solve u_i + v_j = c_ij over the basis tree, rooted at
        // row 0 with u_0 = 0. Nodes 0..m are rows, m..m+k columns.
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m + k];
        for (idx, &(i, j, _)) in basis.iter().enumerate() {
            adj[i].push(idx);
            adj[m + j].push(idx);
        }
        let mut seen = vec![false; m + k];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        u[0] = 0.0;
        while let Some(node) = queue.pop_front() {
            for &idx in &adj[node] {
                let (i, j, _) = basis[idx];
                let (row, col) = (i, m + j);
                let next = if node == row { col } else { row };
                if !seen[next] {
                    seen[next] = true;
                    if next == col {
                        v[j] = cost(i, j) - u[i];
                    } else {
                        u[i] = cost(i, j) - v[j];
                    }
                    queue.push_back(next);
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "basis must span all rows and columns");

        // Entering cell: first negative reduced cost in row-major order.
        let mut entering = None;
        'scan: for i in 0..m {
            for j in 0..k {
                if !in_basis[i * k + j] && cost(i, j) - u[i] - v[j] < -1e-12 {
                    entering = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            return Ok(basis);
        };
        if pivot == TRANSPORT_PIVOT_CAP {
            return Err(Error::TransportStall(TRANSPORT_PIVOT_CAP));
        }

        // The entering cell closes a unique cycle with the basis tree: find
        // the tree path from row ei to column ej.
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + k]; // (node, basis idx)
        let mut seen = vec![false; m + k];
        let mut queue = std::collections::VecDeque::from([ei]);
        seen[ei] = true;
        while let Some(node) = queue.pop_front() {
            if node == m + ej {
                break;
            }
            for &idx in &adj[node] {
                let (i, j, _) = basis[idx];
                let next = if node == i { m + j } else { i };
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, idx));
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new(); // basis indices from ej side back to ei
        let mut node = m + ej;
        while let Some((prev, idx)) = parent[node] {
            path.push(idx);
            node = prev;
        }
        debug_assert!(node == ei && path.len() % 2 == 1);

        // Walking from row ei toward column ej, path edges alternate
        // −, +, −, …, ending on −; the entering cell is +.
        path.reverse();
        let minus: Vec<usize> = path.iter().step_by(2).copied().collect();
        let theta = minus
            .iter()
            .map(|&idx| basis[idx].2)
            .fold(f64::INFINITY, f64::min);
        let leaving = *minus
            .iter()
            .filter(|&&idx| basis[idx].2 <= theta)
            .min_by_key(|&&idx| (basis[idx].0, basis[idx].1))
            .expect("at least one leaving candidate");

        for (pos, &idx) in path.iter().enumerate() {
            if pos % 2 == 0 {
                basis[idx].2 -= theta;
            } else {
                basis[idx].2 += theta;
            }
        }
        let (li, lj, _) = basis[leaving];
        in_basis[li * k + lj] = false;
        in_basis[ei * k + ej] = true;
        basis[leaving] = (ei, ej, theta);
    }
    unreachable!("loop exits via optimality or the pivot guard");
}

/// Barycentric extension `ḡ(μ) = Σ λᵢ g(xᵢ)` of a pointwise map into
/// Euclidean space. Linear in the measure; reproduces `g` on Diracs. The
/// closure returns `None` where `g` is undefined.
pub fn bary_extend<F>(g: F, mu: &FiniteMeasure) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Option<Vec<f64>>,
{
    let mut out: Option<Vec<f64>> = None;
    for &(p, w) in mu.atoms() {
        let value = g(p).ok_or(Error::UndefinedPoint(p))?;
        match &mut out {
            None => {
                out = Some(value.iter().map(|x| w * x).collect());
            }
            Some(acc) => {
                if value.len() != acc.len() {
                    return Err(Error::LengthMismatch { got: value.len(), want: acc.len() });
                }
                for (a, x) in acc.iter_mut().zip(&value) {
                    *a += w * x;
                }
            }
        }
    }
    out.ok_or(Error::EmptyMeasure)
}

/// The partition-of-unity map `ψ(x)`: weight `max(0, K − d(x, xᵢ))` on each
/// net point `xᵢ` (the discrete distance-to-ball-complement), normalized to
/// a probability measure. Support is exactly the net points with
/// `d(x, xᵢ) < K`; if none exist the net is not `K`-dense at `x`.
pub fn partition_map(
    space: &MetricSpaceTable,
    net: &[usize],
    k: f64,
    x: usize,
) -> Result<FiniteMeasure> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::BadCoverRadius(k));
    }
    if x >= space.len() {
        return Err(Error::PointOutOfRange { point: x, len: space.len() });
    }
    let mut seen = std::collections::HashSet::new();
    for &p in net {
        if p >= space.len() {
            return Err(Error::PointOutOfRange { point: p, len: space.len() });
        }
        if !seen.insert(p) {
            return Err(Error::DuplicateSupport(p));
        }
    }
    let atoms: Vec<(usize, f64)> = net
        .iter()
        .filter_map(|&p| {
            let w = k - space.d(x, p);
            (w > 0.0).then_some((p, w))
        })
        .collect();
    if atoms.is_empty() {
        return Err(Error::NetNotDense { point: x, k });
    }
    FiniteMeasure::new(&atoms)?.normalized()
}

/// Result of [`psi_lipschitz_audit`]: the worst observed local ratio
/// `kr(ψx, ψy)/d(x, y)` over pairs at distance ≤ K, the cover multiplicity
/// `C = max_x #{i : d(x, xᵢ) < K}`, and where the worst ratio occurred.
#[derive(Debug, Clone)]
pub struct PsiAudit {
    pub l_empirical: f64,
    pub cover_multiplicity: usize,
    pub pairs_checked: usize,
    pub worst_pair: Option<(usize, usize)>,
}

/// Exhaustively measures the local Lipschitz constant of the partition map
/// over all pairs with `0 < d(x, y) ≤ K`. A single-point space reports 0
/// by convention. Fails if the net misses any point of the space.
pub fn psi_lipschitz_audit(space: &MetricSpaceTable, net: &[usize], k: f64) -> Result<PsiAudit> {
    let n = space.len();
    let psi: Vec<FiniteMeasure> = (0..n)
        .map(|x| partition_map(space, net, k, x))
        .collect::<Result<_>>()?;
    let cover_multiplicity = (0..n)
        .map(|x| net.iter().filter(|&&p| space.d(x, p) < k).count())
        .max()
        .unwrap_or(0);
    let mut l_empirical = 0.0;
    let mut worst_pair = None;
    let mut pairs_checked = 0;
    for x in 0..n {
        for y in (x + 1)..n {
            let d = space.d(x, y);
            if d > k {
                continue;
            }
            pairs_checked += 1;
            let ratio = kr_distance(&psi[x], &psi[y], space)? / d;
            if ratio > l_empirical {
                l_empirical = ratio;
                worst_pair = Some((x, y));
            }
        }
    }
    Ok(PsiAudit { l_empirical, cover_multiplicity, pairs_checked, worst_pair })
}

/// On-disk measure description: the ambient space (a path to an edge-list
/// graph file, or an inline distance table) plus the atom list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub space: SpaceRef,
    pub atoms: Vec<AtomRecord>,
}

/// Ambient-space reference inside a measure file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SpaceRef {
    /// Path to an edge-list graph file; the space is its path metric.
    Path(String),
    /// Inline distance table.
    Table(Vec<Vec<f64>>),
}

/// One `{"point": i, "weight": w}` atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomRecord {
    pub point: usize,
    pub weight: f64,
}

impl MeasureFile {
    /// Parses the JSON measure format.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Serializes to pretty JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Builds the validated measure (the space reference is resolved by the
    /// caller, which owns file access).
    pub fn to_measure(&self) -> Result<FiniteMeasure> {
        let atoms: Vec<(usize, f64)> =
            self.atoms.iter().map(|a| (a.point, a.weight)).collect();
        FiniteMeasure::new(&atoms)
    }
}
