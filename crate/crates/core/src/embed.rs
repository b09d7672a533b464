//! Euclidean embeddings of finite graphs: Lipschitz constants, the `D_f`
//! ratio, its spectral ceiling `c0`, concentration reports, and embedding
//! builders (spectral and max-spread).
//!
//! For a nonconstant map `f` of a connected graph into Euclidean space the
//! ratio
//!
//! ```text
//! D_f = [ (1/|P|) Σ_pairs ‖f(x)−f(y)‖² ] / [ (1/|E|) Σ_edges ‖f(x)−f(y)‖² ]
//! ```
//!
//! (|P| = n(n−1)/2 vertex pairs, |E| counts edge multiplicity) measures how
//! much the map spreads the graph relative to how much it stretches edges.
//! The Rayleigh characterization of `lambda1` yields a map-independent
//! ceiling
//!
//! ```text
//! D_f ≤ c0(g) = d_max · n / ((n−1) · lambda1(g)),
//! ```
//!
//! tight on complete graphs and C_4. Three concentration consequences for
//! mean-centered 1-Lipschitz maps follow and are computed by
//! [`corollary_report`]: the mean squared pairwise distance is at most
//! `c0`, the mean squared norm is at most `c0/2`, and strictly more than
//! half the vertices land inside the ball of radius `(1+1e−6)·sqrt(c0)`.
//! These are what make expander families crumple: `c0` is O(1) in `n`, so
//! no 1-Lipschitz image can spread.
//!
//! The exact algebraic identity behind the corollaries, for arbitrary maps,
//! is `Σ_pairs ‖f(x)−f(y)‖² = n·Σ_x ‖f(x)‖² − ‖Σ_x f(x)‖²` (see
//! [`pair_sum_identity_sides`]); after centering the last term vanishes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::FiniteGraph;
use crate::spectral;

/// Coordinates differing by more than this in some entry make an embedding
/// "nonconstant".
pub const NONCONSTANT_EPS: f64 = 1e-12;

/// An assignment of a `dim`-dimensional coordinate vector to each vertex.
/// Owns a copy of its graph so reports stay self-contained.
#[derive(Debug, Clone)]
pub struct Embedding {
    graph: FiniteGraph,
    dim: usize,
    coords: Vec<f64>, // row-major, vertex-major: coords[v*dim..(v+1)*dim]
}

impl Embedding {
    /// Builds an embedding from per-vertex coordinate rows; all rows must
    /// share one positive dimension and cover every vertex.
    pub fn new(graph: &FiniteGraph, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != graph.vertex_count() {
            return Err(Error::LengthMismatch { got: rows.len(), want: graph.vertex_count() });
        }
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::DimOutOfRange { dim: 0, max: usize::MAX });
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::LengthMismatch { got: row.len(), want: dim });
            }
            coords.extend_from_slice(row);
        }
        Ok(Embedding { graph: graph.clone(), dim, coords })
    }

    fn from_flat(graph: FiniteGraph, dim: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), graph.vertex_count() * dim);
        Embedding { graph, dim, coords }
    }

    /// The embedded graph.
    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    /// Target dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinate vector of one vertex.
    pub fn point(&self, v: usize) -> &[f64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    /// Whether some pair of vertices differs by more than
    /// [`NONCONSTANT_EPS`] in some coordinate.
    pub fn is_nonconstant(&self) -> bool {
        let first = self.point(0);
        (1..self.graph.vertex_count()).any(|v| {
            self.point(v)
                .iter()
                .zip(first)
                .any(|(a, b)| (a - b).abs() > NONCONSTANT_EPS)
        })
    }

    /// Maximum edge image length. Edges have graph length 1, so this is the
    /// Lipschitz constant with respect to the path metric.
    pub fn lipschitz_constant(&self) -> f64 {
        self.graph
            .edges()
            .iter()
            .map(|&(u, v)| dist(self.point(u), self.point(v)))
            .fold(0.0, f64::max)
    }

    /// Sum of squared image distances over all vertex pairs.
    pub fn pair_sum_squared(&self) -> f64 {
        let n = self.graph.vertex_count();
        let mut total = 0.0;
        for u in 0..n {
            for v in (u + 1)..n {
                total += dist_sq(self.point(u), self.point(v));
            }
        }
        total
    }

    /// Sum of squared image distances over edges (with multiplicity).
    pub fn edge_sum_squared(&self) -> f64 {
        self.graph
            .edges()
            .iter()
            .map(|&(u, v)| dist_sq(self.point(u), self.point(v)))
            .sum()
    }

    /// The ratio `D_f` of mean squared pairwise distance to mean squared
    /// edge distance. Errors on constant embeddings (zero denominator).
    pub fn d_ratio(&self) -> Result<f64> {
        if !self.is_nonconstant() {
            return Err(Error::ConstantEmbedding);
        }
        let n = self.graph.vertex_count() as f64;
        let pairs = n * (n - 1.0) / 2.0;
        let edges = self.graph.edge_count() as f64;
        let edge_mean = self.edge_sum_squared() / edges;
        if edge_mean == 0.0 {
            // Nonconstant but constant on every edge is impossible on a
            // connected graph; guard anyway for disconnected inputs.
            return Err(Error::ConstantEmbedding);
        }
        Ok((self.pair_sum_squared() / pairs) / edge_mean)
    }

    /// Coordinate mean over vertices.
    pub fn mean(&self) -> Vec<f64> {
        let n = self.graph.vertex_count();
        let mut mean = vec![0.0; self.dim];
        for v in 0..n {
            for (m, x) in mean.iter_mut().zip(self.point(v)) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        mean
    }

    /// Returns a copy translated so the coordinate mean is zero.
    pub fn recentered(&self) -> Embedding {
        let mean = self.mean();
        let mut coords = self.coords.clone();
        for row in coords.chunks_exact_mut(self.dim) {
            for (x, m) in row.iter_mut().zip(&mean) {
                *x -= m;
            }
        }
        Embedding::from_flat(self.graph.clone(), self.dim, coords)
    }

    /// Returns a copy scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Embedding {
        let coords = self.coords.iter().map(|x| x * factor).collect();
        Embedding::from_flat(self.graph.clone(), self.dim, coords)
    }

    /// Serializes to CSV with header `vertex,x0,...,x{dim-1}` at full float
    /// precision (shortest round-trip formatting).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex");
        for j in 0..self.dim {
            out.push_str(&format!(",x{j}"));
        }
        out.push('\n');
        for v in 0..self.graph.vertex_count() {
            out.push_str(&v.to_string());
            for x in self.point(v) {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// The spectral ceiling `c0(g) = d_max · n / ((n−1) · lambda1(g))` that
/// dominates `D_f` for every nonconstant map of `g`.
pub fn c0_bound(g: &FiniteGraph) -> Result<f64> {
    let cert = spectral::lambda1(g)?;
    Ok(c0_from_lambda1(g, cert.lambda1))
}

/// Same ceiling from a precomputed `lambda1` (avoids re-solving when a
/// certificate is already in hand).
pub fn c0_from_lambda1(g: &FiniteGraph, lambda1: f64) -> f64 {
    let n = g.vertex_count() as f64;
    g.max_degree() as f64 * n / ((n - 1.0) * lambda1)
}

/// Concentration quantities of a mean-centered 1-Lipschitz embedding:
/// `pair_mean ≤ c0`, `mean_squared_norm ≤ c0/2`, and `inside_count > n/2`
/// vertices within `radius = (1+1e−6)·sqrt(c0)` of the origin.
#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub c0: f64,
    pub radius: f64,
    pub inside_count: usize,
    pub total: usize,
    pub mean_squared_norm: f64,
    pub pair_mean: f64,
    /// Translation applied to reach mean zero.
    pub recenter_shift: Vec<f64>,
    /// Scale applied to reach Lipschitz constant ≤ 1 (1.0 when none needed).
    pub rescale_factor: f64,
}

/// Margin over `sqrt(c0)` that keeps the strict inequality `R > sqrt(c0)`
/// away from floating-point boundary ties.
pub const RADIUS_MARGIN: f64 = 1e-6;

/// Computes the concentration report, recentering to mean zero and
/// rescaling to Lipschitz constant ≤ 1 first (both recorded).
pub fn corollary_report(e: &Embedding) -> Result<ConcentrationReport> {
    let c0 = c0_bound(e.graph())?;
    corollary_report_with_c0(e, c0)
}

/// Same as [`corollary_report`] with a caller-supplied `c0` (one eigensolve
/// can serve many embeddings of the same graph).
pub fn corollary_report_with_c0(e: &Embedding, c0: f64) -> Result<ConcentrationReport> {
    if !e.is_nonconstant() {
        return Err(Error::ConstantEmbedding);
    }
    let shift: Vec<f64> = e.mean().iter().map(|m| -m).collect();
    let centered = e.recentered();
    let lipschitz = centered.lipschitz_constant();
    let rescale_factor = if lipschitz > 1.0 { 1.0 / lipschitz } else { 1.0 };
    let normalized = centered.scaled(rescale_factor);

    let n = normalized.graph.vertex_count();
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    let pair_mean = normalized.pair_sum_squared() / pairs;
    let mean_squared_norm = (0..n)
        .map(|v| normalized.point(v).iter().map(|x| x * x).sum::<f64>())
        .sum::<f64>()
        / n as f64;
    let radius = (1.0 + RADIUS_MARGIN) * c0.sqrt();
    let inside_count = (0..n)
        .filter(|&v| normalized.point(v).iter().map(|x| x * x).sum::<f64>().sqrt() <= radius)
        .count();
    Ok(ConcentrationReport {
        c0,
        radius,
        inside_count,
        total: n,
        mean_squared_norm,
        pair_mean,
        recenter_shift: shift,
        rescale_factor,
    })
}

/// Both sides of the exact identity
/// `Σ_pairs ‖f(x)−f(y)‖² = n·Σ_x‖f(x)‖² − ‖Σ_x f(x)‖²`,
/// valid for arbitrary (uncentered) embeddings. The left side is the
/// literal pair sum; callers assert agreement to 1e-9 relative.
pub fn pair_sum_identity_sides(e: &Embedding) -> (f64, f64) {
    let n = e.graph.vertex_count();
    let lhs = e.pair_sum_squared();
    let sum_norm_sq: f64 = (0..n)
        .map(|v| e.point(v).iter().map(|x| x * x).sum::<f64>())
        .sum();
    let mut coord_sum = vec![0.0; e.dim];
    for v in 0..n {
        for (s, x) in coord_sum.iter_mut().zip(e.point(v)) {
            *s += x;
        }
    }
    let rhs = n as f64 * sum_norm_sq - coord_sum.iter().map(|x| x * x).sum::<f64>();
    (lhs, rhs)
}

/// Embedding from the bottom nonzero Laplacian eigenvectors, rescaled by a
/// single global factor to Lipschitz constant 1. Mean-zero by construction
/// (eigenvectors are orthogonal to constants).
pub fn spectral_embedding(g: &FiniteGraph, dim: usize) -> Result<Embedding> {
    g.require_connected()?;
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::GraphTooSmall(n));
    }
    if dim == 0 || dim > n - 1 {
        return Err(Error::DimOutOfRange { dim, max: n - 1 });
    }
    if n > spectral::DENSE_EIGEN_CAP {
        return Err(Error::ExhaustiveCapExceeded { size: n, cap: spectral::DENSE_EIGEN_CAP });
    }
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (v, &deg) in g.degrees().iter().enumerate() {
        m[(v, v)] = deg as f64;
    }
    for &(u, v) in g.edges() {
        m[(u, v)] -= 1.0;
        m[(v, u)] -= 1.0;
    }
    let eigen = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let mut coords = vec![0.0; n * dim];
    for (j, &idx) in order[1..=dim].iter().enumerate() {
        let col = eigen.eigenvectors.column(idx);
        for v in 0..n {
            coords[v * dim + j] = col[v];
        }
    }
    let mut e = Embedding::from_flat(g.clone(), dim, coords);
    let lipschitz = e.lipschitz_constant();
    if lipschitz > 0.0 {
        e = e.scaled(1.0 / lipschitz);
    }
    Ok(e)
}

/// Smoothing exponent for the soft maximum of edge lengths inside the
/// spread optimizer.
const SPREAD_SOFTMAX_BETA: f64 = 12.0;

/// Maximizes the spread `Σ_x ‖f(x)‖²` over mean-zero embeddings with
/// Lipschitz constant exactly 1, by ascent on a smoothed scale-invariant
/// objective with a backtracking line search. Each candidate step is
/// projected (recenter + exact rescale) before evaluation and accepted only
/// if the projected spread does not decrease, so the recorded objective is
/// monotone by construction. Deterministic for a fixed seed.
///
/// The returned spread can never legitimately exceed `n·c0/2`; that ceiling
/// is asserted as a correctness tripwire.
pub fn max_spread_embedding(
    g: &FiniteGraph,
    dim: usize,
    iters: usize,
    seed: u64,
) -> Result<Embedding> {
    Ok(max_spread_with_history(g, dim, iters, seed)?.0)
}

/// [`max_spread_embedding`] plus the per-iteration objective history
/// (`history[0]` is the projected start, one entry per accepted or
/// converged iteration thereafter).
pub fn max_spread_with_history(
    g: &FiniteGraph,
    dim: usize,
    iters: usize,
    seed: u64,
) -> Result<(Embedding, Vec<f64>)> {
    g.require_connected()?;
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::GraphTooSmall(n));
    }
    if dim == 0 {
        return Err(Error::DimOutOfRange { dim, max: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g.edges();

    let project = |coords: &[f64], graph: &FiniteGraph| -> Option<Vec<f64>> {
        let e = Embedding::from_flat(graph.clone(), dim, coords.to_vec()).recentered();
        let l = e.lipschitz_constant();
        if l < 1e-12 {
            return None;
        }
        Some(e.scaled(1.0 / l).coords)
    };
    let spread = |coords: &[f64]| -> f64 { coords.iter().map(|x| x * x).sum() };

    // Gaussian init via Box–Muller on the seeded stream; resample the
    // (measure-zero) degenerate case where all edges collapse.
    let mut coords = loop {
        let raw: Vec<f64> = (0..n * dim)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        if let Some(p) = project(&raw, g) {
            break p;
        }
    };
    let mut current = spread(&coords);
    let mut history = vec![current];
    let mut step_size = 0.1;

    for _ in 0..iters {
        // Gradient of log( spread / L_beta^2 ) where L_beta is the softmax
        // edge length, computed in (l² / l²_max)^beta form for stability.
        let point = |v: usize| &coords[v * dim..(v + 1) * dim];
        let edge_sq: Vec<f64> = edges.iter().map(|&(u, v)| dist_sq(point(u), point(v))).collect();
        let max_sq = edge_sq.iter().cloned().fold(0.0, f64::max);
        let weight_sum: f64 = edge_sq.iter().map(|&l| (l / max_sq).powf(SPREAD_SOFTMAX_BETA)).sum();
        let mut grad = vec![0.0; n * dim];
        for (x, c) in grad.iter_mut().zip(&coords) {
            *x = 2.0 * c / current;
        }
        for (&(u, v), &l) in edges.iter().zip(&edge_sq) {
            let w = 2.0 * (l / max_sq).powf(SPREAD_SOFTMAX_BETA - 1.0) / (max_sq * weight_sum);
            for j in 0..dim {
                let d = coords[u * dim + j] - coords[v * dim + j];
                grad[u * dim + j] -= w * d;
                grad[v * dim + j] += w * d;
            }
        }

        let mut accepted = false;
        for _ in 0..30 {
            let candidate: Vec<f64> = coords
                .iter()
                .zip(&grad)
                .map(|(c, g)| c + step_size * g)
                .collect();
            if let Some(projected) = project(&candidate, g) {
                let s = spread(&projected);
                if s >= current - 1e-15 {
                    coords = projected;
                    current = s;
                    step_size = (step_size * 1.3).min(10.0);
                    accepted = true;
                    break;
                }
            }
            step_size *= 0.5;
        }
        if !accepted {
            break; // stationary to line-search resolution
        }
        history.push(current);
    }

    let ceiling = n as f64 * c0_bound(g)? / 2.0;
    if current > ceiling + 1e-6 {
        return Err(Error::SpreadCeilingExceeded { spread: current, ceiling });
    }
    Ok((Embedding::from_flat(g.clone(), dim, coords), history))
}

/// Uniform random embedding in `[-1, 1]^dim`, for stress tests and
/// verification sweeps. Nonconstant with probability 1.
pub fn random_embedding<R: Rng>(g: &FiniteGraph, dim: usize, rng: &mut R) -> Embedding {
    let n = g.vertex_count();
    let coords: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Embedding::from_flat(g.clone(), dim, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, cycle_graph, margulis_graph, path_graph, FiniteGraph};
    use approx::assert_relative_eq;

    fn k2() -> FiniteGraph {
        FiniteGraph::build(2, &[(0, 1)]).unwrap()
    }

    fn square_corners() -> Embedding {
        let rows = vec![
            vec![0.5, 0.5],
            vec![0.5, -0.5],
            vec![-0.5, -0.5],
            vec![-0.5, 0.5],
        ];
        Embedding::new(&cycle_graph(4).unwrap(), &rows).unwrap()
    }

    #[test]
    fn lipschitz_examples() {
        assert_relative_eq!(square_corners().lipschitz_constant(), 1.0);
        let constant =
            Embedding::new(&cycle_graph(4).unwrap(), &vec![vec![2.0, 3.0]; 4]).unwrap();
        assert_eq!(constant.lipschitz_constant(), 0.0);
        assert!(!constant.is_nonconstant());
        let path = Embedding::new(
            &path_graph(3).unwrap(),
            &[vec![0.0], vec![1.0], vec![2.0]],
        )
        .unwrap();
        assert_relative_eq!(path.lipschitz_constant(), 1.0);
    }

    #[test]
    fn d_ratio_examples() {
        let k2e = Embedding::new(&k2(), &[vec![0.0], vec![1.0]]).unwrap();
        assert_relative_eq!(k2e.d_ratio().unwrap(), 1.0);

        let path = Embedding::new(
            &path_graph(3).unwrap(),
            &[vec![0.0], vec![1.0], vec![2.0]],
        )
        .unwrap();
        assert_relative_eq!(path.d_ratio().unwrap(), 2.0); // (6/3)/(2/2)

        let c4 = Embedding::new(
            &cycle_graph(4).unwrap(),
            &[vec![1.0], vec![0.0], vec![-1.0], vec![0.0]],
        )
        .unwrap();
        assert_relative_eq!(c4.d_ratio().unwrap(), 4.0 / 3.0); // (8/6)/(4/4)

        let constant = Embedding::new(&k2(), &[vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(constant.d_ratio(), Err(Error::ConstantEmbedding)));
    }

    #[test]
    fn d_ratio_affine_invariance() {
        let e = square_corners();
        let base = e.d_ratio().unwrap();
        let transformed = Embedding::new(
            e.graph(),
            &(0..4)
                .map(|v| e.point(v).iter().map(|x| -2.5 * x + 7.0).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!((transformed.d_ratio().unwrap() - base).abs() <= 1e-9 * base);
    }

    #[test]
    fn c0_examples() {
        assert_relative_eq!(c0_bound(&complete_graph(4).unwrap()).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(
            c0_bound(&cycle_graph(4).unwrap()).unwrap(),
            4.0 / 3.0,
            max_relative = 1e-9
        );
        assert_relative_eq!(c0_bound(&k2()).unwrap(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn c0_is_tight_on_c4_and_k4() {
        let c4 = Embedding::new(
            &cycle_graph(4).unwrap(),
            &[vec![1.0], vec![0.0], vec![-1.0], vec![0.0]],
        )
        .unwrap();
        let c0 = c0_bound(c4.graph()).unwrap();
        assert!((c4.d_ratio().unwrap() - c0).abs() <= 1e-9);

        // Any mean-zero map of K_4 has all pairs equal to all edges.
        let k4 = spectral_embedding(&complete_graph(4).unwrap(), 3).unwrap();
        let c0 = c0_bound(k4.graph()).unwrap();
        assert!((k4.d_ratio().unwrap() - c0).abs() <= 1e-9);
    }

    #[test]
    fn d_ratio_bounded_by_c0_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in [cycle_graph(7).unwrap(), complete_graph(5).unwrap(), margulis_graph(3).unwrap()]
        {
            let c0 = c0_bound(&g).unwrap();
            for _ in 0..500 {
                let e = random_embedding(&g, 3, &mut rng);
                assert!(e.d_ratio().unwrap() <= c0 + 1e-9);
            }
        }
    }

    #[test]
    fn corollary_report_square() {
        let report = corollary_report(&square_corners()).unwrap();
        assert_relative_eq!(report.c0, 4.0 / 3.0, max_relative = 1e-9);
        assert_relative_eq!(report.pair_mean, 4.0 / 3.0, max_relative = 1e-9);
        assert_relative_eq!(report.mean_squared_norm, 0.5, max_relative = 1e-9);
        assert!(report.pair_mean <= report.c0 + 1e-9);
        assert!(report.mean_squared_norm <= report.c0 / 2.0 + 1e-9);
        assert_eq!(report.inside_count, 4, "corners at norm ~0.707 < sqrt(4/3)");
        assert!(report.inside_count * 2 > report.total);
        assert_relative_eq!(report.rescale_factor, 1.0);
        assert!(report.recenter_shift.iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn corollary_report_recenters_and_rescales() {
        // Shifted and stretched square: the report must undo both.
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|v| {
                square_corners()
                    .point(v)
                    .iter()
                    .map(|x| 3.0 * x + 10.0)
                    .collect()
            })
            .collect();
        let e = Embedding::new(&cycle_graph(4).unwrap(), &rows).unwrap();
        let report = corollary_report(&e).unwrap();
        assert_relative_eq!(report.rescale_factor, 1.0 / 3.0, max_relative = 1e-12);
        assert!(report.recenter_shift.iter().all(|s| (s + 10.0).abs() < 1e-9));
        assert_relative_eq!(report.mean_squared_norm, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn centered_identity_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for g in [cycle_graph(6).unwrap(), margulis_graph(3).unwrap()] {
            for _ in 0..200 {
                let mut e = random_embedding(&g, 4, &mut rng);
                // Arbitrary (uncentered) shift.
                e = Embedding::new(
                    &g,
                    &(0..g.vertex_count())
                        .map(|v| e.point(v).iter().map(|x| x + 2.0).collect())
                        .collect::<Vec<_>>(),
                )
                .unwrap();
                let (lhs, rhs) = pair_sum_identity_sides(&e);
                assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn spectral_embedding_c4_square() {
        let e = spectral_embedding(&cycle_graph(4).unwrap(), 2).unwrap();
        let mean = e.mean();
        assert!(mean.iter().all(|m| m.abs() < 1e-9));
        // Square up to rotation: all four edges length 1 after rescale, both
        // diagonals sqrt(2).
        for &(u, v) in e.graph().edges() {
            assert_relative_eq!(dist(e.point(u), e.point(v)), 1.0, max_relative = 1e-9);
        }
        assert_relative_eq!(dist(e.point(0), e.point(2)), 2f64.sqrt(), max_relative = 1e-9);
        assert_relative_eq!(dist(e.point(1), e.point(3)), 2f64.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn spectral_embedding_k4_simplex() {
        let e = spectral_embedding(&complete_graph(4).unwrap(), 3).unwrap();
        for u in 0..4 {
            for v in (u + 1)..4 {
                assert_relative_eq!(dist(e.point(u), e.point(v)), 1.0, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn spectral_embedding_dim_range() {
        let g = cycle_graph(4).unwrap();
        assert!(matches!(
            spectral_embedding(&g, 4),
            Err(Error::DimOutOfRange { dim: 4, max: 3 })
        ));
        assert!(spectral_embedding(&g, 3).is_ok());
    }

    #[test]
    fn max_spread_c4_reaches_square() {
        for seed in [0, 1, 2] {
            let (e, history) =
                max_spread_with_history(&cycle_graph(4).unwrap(), 2, 400, seed).unwrap();
            let spread: f64 = (0..4)
                .map(|v| e.point(v).iter().map(|x| x * x).sum::<f64>())
                .sum();
            assert!((spread - 2.0).abs() < 1e-3, "seed {seed}: spread {spread}");
            assert!(
                history.windows(2).all(|w| w[1] >= w[0] - 1e-12),
                "objective must be monotone"
            );
        }
    }

    #[test]
    fn max_spread_k2_half() {
        let e = max_spread_embedding(&k2(), 1, 100, 3).unwrap();
        let spread: f64 = (0..2)
            .map(|v| e.point(v).iter().map(|x| x * x).sum::<f64>())
            .sum();
        assert!((spread - 0.5).abs() < 1e-9);
    }

    #[test]
    fn max_spread_margulis_under_ceiling() {
        let g = margulis_graph(4).unwrap();
        let e = max_spread_embedding(&g, 3, 150, 1).unwrap();
        let spread: f64 = (0..g.vertex_count())
            .map(|v| e.point(v).iter().map(|x| x * x).sum::<f64>())
            .sum();
        let ceiling = g.vertex_count() as f64 * c0_bound(&g).unwrap() / 2.0;
        assert!(spread <= ceiling + 1e-6, "spread {spread} vs ceiling {ceiling}");
    }

    #[test]
    fn max_spread_reproducible() {
        let a = max_spread_embedding(&cycle_graph(5).unwrap(), 2, 50, 42).unwrap();
        let b = max_spread_embedding(&cycle_graph(5).unwrap(), 2, 50, 42).unwrap();
        for v in 0..5 {
            assert_eq!(a.point(v), b.point(v));
        }
    }

    #[test]
    fn embedding_csv_shape() {
        let e = square_corners();
        let csv = e.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("vertex,x0,x1"));
        assert_eq!(lines.next(), Some("0,0.5,0.5"));
        assert_eq!(csv.lines().count(), 5);
    }
}
