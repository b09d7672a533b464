//! Averaging obstruction for candidate quasi-embeddings into the integer
//! lattice plane with its ℓ¹ metric.
//!
//! The pipeline: a spectral certificate caps the spread any 1-Lipschitz map
//! into ℓ² can achieve, so a 1-Lipschitz lattice map must concentrate more
//! than half of every member inside a ball whose radius `c(R) = 2R` depends
//! only on the family ceiling `c0`. Against that, averaging a candidate over
//! the translation action of the lattice on itself recenters it exactly, and
//! counting lattice points pins the forced occupation fraction
//! `(1/2) / (2k² + 2k + 1)` with `k = ⌈2R⌉`. A uniformly gapped family
//! therefore cannot admit uniformly non-collapsing 1-Lipschitz maps to the
//! lattice at these scales, while the cycle control family watches the same
//! fraction vanish as the gap closes.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::embed::{self, Embedding};
use crate::error::{Error, Result};
use crate::graphs::{ExpanderFamily, FamilyKind, FiniteGraph};
use crate::spectral;

/// Hard cap on the number of candidate ball centers an exhaustive
/// preimage scan will enumerate.
pub const PREIMAGE_CENTER_CAP: usize = 2_000_000;

/// Verdict string for a family whose certificates sustain a uniform gap.
pub const VERDICT_EXCLUDED: &str = "quasi-embedding excluded at these scales";

/// Verdict string for a control family with no sustained gap.
pub const VERDICT_NONE: &str = "no obstruction";

/// Column order of [`ObstructionReport::to_csv`].
pub const OBSTRUCTION_CSV_HEADER: &str =
    "n,d_max,lambda1,c0,R,c_of_R,capacity,forced_fraction,baseline_fraction,verdict";

/// A total map from a graph's vertices into the lattice `Z²`, together with
/// the outcome of an exact integer Lipschitz audit: `lipschitz_verified`
/// holds iff every edge moves by ℓ¹ distance at most 1.
#[derive(Debug, Clone)]
pub struct QuasiEmbeddingCandidate {
    graph: FiniteGraph,
    image: Vec<(i64, i64)>,
    lipschitz_verified: bool,
    worst_edge_stretch: i64,
}

fn l1(p: (i64, i64), q: (i64, i64)) -> i64 {
    (p.0 - q.0).abs() + (p.1 - q.1).abs()
}

impl QuasiEmbeddingCandidate {
    /// Wraps a total vertex map and audits it edge by edge in integer
    /// arithmetic. The map may be arbitrarily non-Lipschitz; the audit
    /// result is recorded, not enforced.
    pub fn new(graph: &FiniteGraph, image: Vec<(i64, i64)>) -> Result<Self> {
        if image.len() != graph.vertex_count() {
            return Err(Error::LengthMismatch { got: image.len(), want: graph.vertex_count() });
        }
        let worst = graph
            .edges()
            .iter()
            .map(|&(u, v)| l1(image[u], image[v]))
            .max()
            .unwrap_or(0);
        Ok(QuasiEmbeddingCandidate {
            graph: graph.clone(),
            image,
            lipschitz_verified: worst <= 1,
            worst_edge_stretch: worst,
        })
    }

    /// Rounds a real embedding coordinatewise to the nearest lattice point.
    /// One-dimensional embeddings land on the axis `y = 0`; dimensions
    /// above 2 have no canonical lattice target and are rejected.
    pub fn from_embedding_rounded(e: &Embedding) -> Result<Self> {
        Self::from_scaled_rounded(e, 1.0)
    }

    /// Rounds `scale * f` to the lattice.
    fn from_scaled_rounded(e: &Embedding, scale: f64) -> Result<Self> {
        if e.dim() == 0 || e.dim() > 2 {
            return Err(Error::DimOutOfRange { dim: e.dim(), max: 2 });
        }
        let image = (0..e.graph().vertex_count())
            .map(|v| {
                let p = e.point(v);
                let x = (scale * p[0]).round() as i64;
                let y = if e.dim() == 2 { (scale * p[1]).round() as i64 } else { 0 };
                (x, y)
            })
            .collect();
        Self::new(e.graph(), image)
    }

    /// Rounds the embedding to the lattice and, if rounding broke the edge
    /// bound, halves the scale until the integer audit passes. Terminates
    /// because a small enough scale rounds everything to the origin; the
    /// constant map is the last-resort fallback.
    pub fn contracted_to_lipschitz(e: &Embedding) -> Result<Self> {
        let mut scale = 1.0;
        for _ in 0..128 {
            let cand = Self::from_scaled_rounded(e, scale)?;
            if cand.lipschitz_verified {
                return Ok(cand);
            }
            scale *= 0.5;
        }
        let n = e.graph().vertex_count();
        Self::new(e.graph(), vec![(0, 0); n])
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    /// Image point of vertex `v`.
    pub fn image(&self, v: usize) -> (i64, i64) {
        self.image[v]
    }

    pub fn image_points(&self) -> &[(i64, i64)] {
        &self.image
    }

    /// Whether the exact edge audit certified the map 1-Lipschitz.
    pub fn is_lipschitz_verified(&self) -> bool {
        self.lipschitz_verified
    }

    /// Largest ℓ¹ displacement across a single edge.
    pub fn worst_edge_stretch(&self) -> i64 {
        self.worst_edge_stretch
    }
}

/// Result of minimizing the averaged energy `F(w) = mean ‖ξ(v) + w‖²` over
/// translations `w` of the lattice plane acting on a candidate `ξ`.
#[derive(Debug, Clone, Copy)]
pub struct AveragingReport {
    /// The exact minimizer `w* = -mean ξ` (computed from integer sums).
    pub center: (f64, f64),
    /// Norm of the gradient `mean(ξ(v) + w*)`, re-accumulated in floating
    /// point as a cancellation check; exact arithmetic gives zero.
    pub residual: f64,
    /// Minimum averaged energy `F(w*)`.
    pub mean_square_radius: f64,
}

/// Minimizes the translation-averaged energy of a candidate in closed form.
/// The unique critical point of `F` is the negated image centroid, so the
/// averaging argument pins a canonical center with no search.
pub fn averaging_center(cand: &QuasiEmbeddingCandidate) -> AveragingReport {
    let n = cand.image.len() as f64;
    let sx: i64 = cand.image.iter().map(|p| p.0).sum();
    let sy: i64 = cand.image.iter().map(|p| p.1).sum();
    let center = (-(sx as f64) / n, -(sy as f64) / n);
    let (mut gx, mut gy, mut energy) = (0.0f64, 0.0f64, 0.0f64);
    for &(x, y) in &cand.image {
        let dx = x as f64 + center.0;
        let dy = y as f64 + center.1;
        gx += dx;
        gy += dy;
        energy += dx * dx + dy * dy;
    }
    AveragingReport {
        center,
        residual: (gx / n).hypot(gy / n),
        mean_square_radius: energy / n,
    }
}

/// Lattice points within ℓ¹ distance `radius` of at least one image point,
/// in lexicographic order. Every nonempty ball of radius `r ≤ radius` is
/// centered at one of these, so scanning them is an exhaustive search.
fn candidate_centers(
    cand: &QuasiEmbeddingCandidate,
    radius: i64,
) -> Result<BTreeSet<(i64, i64)>> {
    let mut centers = BTreeSet::new();
    for &(px, py) in &cand.image {
        for dx in -radius..=radius {
            let rest = radius - dx.abs();
            for dy in -rest..=rest {
                centers.insert((px + dx, py + dy));
                if centers.len() > PREIMAGE_CENTER_CAP {
                    return Err(Error::ExhaustiveCapExceeded {
                        size: centers.len(),
                        cap: PREIMAGE_CENTER_CAP,
                    });
                }
            }
        }
    }
    Ok(centers)
}

fn ball_fraction(cand: &QuasiEmbeddingCandidate, center: (i64, i64), r: f64) -> f64 {
    let hits = cand
        .image
        .iter()
        .filter(|&&p| (l1(p, center) as f64) <= r)
        .count();
    hits as f64 / cand.image.len() as f64
}

/// Worst-case preimage concentration: the largest fraction of vertices any
/// single ℓ¹ ball of radius `r` captures, maximized over all lattice
/// centers by exhaustive scan. Returns the fraction and the
/// lexicographically smallest center attaining it.
pub fn preimage_concentration(
    cand: &QuasiEmbeddingCandidate,
    r: f64,
) -> Result<(f64, (i64, i64))> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::BadCoverRadius(r));
    }
    let centers = candidate_centers(cand, r.floor() as i64)?;
    let mut best = 0.0f64;
    let mut best_center = *centers.iter().next().expect("image is total, centers nonempty");
    for &c in &centers {
        let frac = ball_fraction(cand, c, r);
        if frac > best {
            best = frac;
            best_center = c;
        }
    }
    Ok((best, best_center))
}

/// The ball-counting side of the obstruction, as a function of the spread
/// ceiling alone: `R` is the smallest integer exceeding `√c0`, the
/// concentration radius is `c(R) = 2R`, an ℓ¹ ball of that radius holds
/// `2k² + 2k + 1` lattice points with `k = ⌈2R⌉`, and more than half the
/// mass squeezed into it forces some point to carry at least
/// `(1/2) / (2k² + 2k + 1)` of the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcedFraction {
    pub r: u32,
    pub c_of_r: u32,
    pub capacity: u64,
    pub forced_fraction: f64,
}

/// Evaluates the forced-fraction arithmetic at a given spread ceiling.
pub fn forced_fraction(c0: f64) -> ForcedFraction {
    let r = c0.sqrt().floor() as u32 + 1;
    let c_of_r = 2 * r;
    let k = c_of_r as u64;
    let capacity = 2 * k * k + 2 * k + 1;
    ForcedFraction { r, c_of_r, capacity, forced_fraction: 0.5 / capacity as f64 }
}

/// How the baseline candidate fed to the obstruction experiment is built
/// from each member before lattice rounding.
#[derive(Debug, Clone, Copy)]
pub enum BaselineMap {
    /// Bottom nonzero Laplacian eigenvectors, rescaled to Lipschitz 1.
    Spectral,
    /// Projected-ascent spread maximizer.
    MaxSpread { iters: usize, seed: u64 },
}

/// One member row of the obstruction experiment.
#[derive(Debug, Clone)]
pub struct ObstructionRow {
    pub n: usize,
    pub d_max: usize,
    pub lambda1: f64,
    pub c0: f64,
    /// Largest fraction of the member any radius-`c(R)` lattice ball
    /// captures under the contracted baseline candidate.
    pub baseline_fraction: f64,
}

/// Family-level outcome of the averaging obstruction experiment. The
/// geometry columns (`r`, `c_of_r`, `capacity`, `forced_fraction`) are
/// evaluated at the family ceiling `max c0`, so they are constant across
/// members by construction.
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub kind: FamilyKind,
    pub geometry: ForcedFraction,
    pub verdict: &'static str,
    pub rows: Vec<ObstructionRow>,
}

impl ObstructionReport {
    /// Renders the report with [`OBSTRUCTION_CSV_HEADER`] columns, one row
    /// per member. Deterministic for a fixed family and baseline.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(OBSTRUCTION_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                row.n,
                row.d_max,
                row.lambda1,
                row.c0,
                self.geometry.r,
                self.geometry.c_of_r,
                self.geometry.capacity,
                self.geometry.forced_fraction,
                row.baseline_fraction,
                self.verdict,
            ));
        }
        out
    }
}

/// Runs the averaging obstruction experiment against a certified family.
///
/// The only supported target is the lattice plane (`"z2"`/`"z2_grid"`),
/// where translations act simply transitively and the averaging center is
/// exact. Per member, a baseline embedding is contracted to a verified
/// 1-Lipschitz lattice candidate and its worst-ball concentration at radius
/// `c(R)` is recorded next to the forced fraction; the verdict column
/// reports whether the family certification sustains a uniform gap.
pub fn obstruction_bound(
    fam: &ExpanderFamily,
    target: &str,
    baseline: BaselineMap,
) -> Result<ObstructionReport> {
    obstruction_bound_with_threads(fam, target, baseline, 1)
}

/// [`obstruction_bound`] with member rows computed by up to `threads`
/// workers. Rows are keyed by member index, so the report — including its
/// CSV bytes — is identical for every thread count.
pub fn obstruction_bound_with_threads(
    fam: &ExpanderFamily,
    target: &str,
    baseline: BaselineMap,
    threads: usize,
) -> Result<ObstructionReport> {
    if !matches!(target, "z2" | "z2_grid") {
        return Err(Error::UnsupportedTarget(target.to_string()));
    }
    let certification = spectral::certify_family(fam)?;
    let c0_ceiling = fam
        .members
        .iter()
        .map(|m| embed::c0_from_lambda1(&m.graph, m.certificate.lambda1))
        .fold(0.0f64, f64::max);
    let geometry = forced_fraction(c0_ceiling);
    let verdict = if certification.uniformly_gapped { VERDICT_EXCLUDED } else { VERDICT_NONE };

    let member_count = fam.members.len();
    let workers = threads.clamp(1, member_count.max(1));
    let mut slots: Vec<Option<Result<ObstructionRow>>> = Vec::new();
    slots.resize_with(member_count, || None);
    if workers <= 1 {
        for (index, slot) in slots.iter_mut().enumerate() {
            *slot = Some(member_row(fam, index, baseline, geometry.c_of_r));
        }
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut index = w;
                        while index < member_count {
                            out.push((index, member_row(fam, index, baseline, geometry.c_of_r)));
                            index += workers;
                        }
                        out
                    })
                })
                .collect();
            for handle in handles {
                for (index, row) in handle.join().expect("obstruction worker panicked") {
                    slots[index] = Some(row);
                }
            }
        });
    }
    let rows = slots
        .into_iter()
        .map(|s| s.expect("every member index is assigned to a worker"))
        .collect::<Result<Vec<_>>>()?;
    Ok(ObstructionReport { kind: fam.kind, geometry, verdict, rows })
}

fn member_row(
    fam: &ExpanderFamily,
    index: usize,
    baseline: BaselineMap,
    c_of_r: u32,
) -> Result<ObstructionRow> {
    let member = &fam.members[index];
    let g = &member.graph;
    let e = match baseline {
        BaselineMap::Spectral => embed::spectral_embedding(g, 2)?,
        BaselineMap::MaxSpread { iters, seed } => {
            embed::max_spread_embedding(g, 2, iters, seed ^ (index as u64) << 32)?
        }
    };
    let cand = QuasiEmbeddingCandidate::contracted_to_lipschitz(&e)?;
    let (baseline_fraction, _) = preimage_concentration(&cand, c_of_r as f64)?;
    Ok(ObstructionRow {
        n: g.vertex_count(),
        d_max: g.max_degree(),
        lambda1: member.certificate.lambda1,
        c0: embed::c0_from_lambda1(g, member.certificate.lambda1),
        baseline_fraction,
    })
}

/// A concrete ball certifying concentration of one verified candidate.
#[derive(Debug, Clone, Copy)]
pub struct WitnessReport {
    pub center: (i64, i64),
    /// Ball radius `c(R) = 2R` for this member's own ceiling.
    pub radius: f64,
    /// Fraction of vertices mapped into the ball; at least 1/2.
    pub fraction: f64,
    pub r: u32,
    pub c0: f64,
}

/// Produces the ball the spread ceiling forces a verified 1-Lipschitz
/// candidate to half-fill: the rounded image centroid at radius `c(R)`.
///
/// Rejects unverified candidates — the ceiling argument is vacuous without
/// the edge bound. The centroid ball provably captures more than half the
/// vertices (spread ceiling + second-moment bound, then ℓ² → ℓ¹ at cost √2
/// and centroid rounding at cost 1, all inside `2R`); an exhaustive rescan
/// backs the arithmetic, and failure of both is reported as an error rather
/// than papered over.
pub fn concentration_witness(cand: &QuasiEmbeddingCandidate) -> Result<WitnessReport> {
    if !cand.is_lipschitz_verified() {
        return Err(Error::CandidateNotLipschitz { worst: cand.worst_edge_stretch() });
    }
    let c0 = embed::c0_bound(cand.graph())?;
    let geometry = forced_fraction(c0);
    let radius = geometry.c_of_r as f64;
    let n = cand.image.len() as f64;
    let sx: i64 = cand.image.iter().map(|p| p.0).sum();
    let sy: i64 = cand.image.iter().map(|p| p.1).sum();
    let centroid = ((sx as f64 / n).round() as i64, (sy as f64 / n).round() as i64);
    let fraction = ball_fraction(cand, centroid, radius);
    if fraction >= 0.5 {
        return Ok(WitnessReport { center: centroid, radius, fraction, r: geometry.r, c0 });
    }
    let (best, best_center) = preimage_concentration(cand, radius)?;
    if best >= 0.5 {
        return Ok(WitnessReport { center: best_center, radius, fraction: best, r: geometry.r, c0 });
    }
    Err(Error::WitnessNotFound { radius, best })
}

/// Draws a random candidate that is 1-Lipschitz by construction: a distance
/// profile to a random vertex or vertex set (optionally floor-contracted),
/// or a constant map, composed with a random ℓ¹ isometry of the lattice
/// (axis swap, sign flips, translation). Used to stress the witness
/// invariant with zero counterexamples expected.
pub fn random_lipschitz_candidate(g: &FiniteGraph, seed: u64) -> Result<QuasiEmbeddingCandidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.vertex_count();
    let profile: Vec<i64> = match rng.gen_range(0..4u8) {
        0 => vec![0; n],
        1 => bfs_profile(g, rng.gen_range(0..n))?,
        2 => {
            let k = rng.gen_range(2..=4i64);
            bfs_profile(g, rng.gen_range(0..n))?.iter().map(|d| d.div_euclid(k)).collect()
        }
        _ => {
            let picks = rng.gen_range(1..=3usize);
            let mut best = vec![i64::MAX; n];
            for _ in 0..picks {
                let anchor = bfs_profile(g, rng.gen_range(0..n))?;
                for (b, a) in best.iter_mut().zip(&anchor) {
                    *b = (*b).min(*a);
                }
            }
            best
        }
    };
    let swap = rng.gen_bool(0.5);
    let (fx, fy) = (if rng.gen_bool(0.5) { -1 } else { 1 }, if rng.gen_bool(0.5) { -1 } else { 1 });
    let (tx, ty) = (rng.gen_range(-15..=15i64), rng.gen_range(-15..=15i64));
    let image = profile
        .into_iter()
        .map(|d| {
            let (x, y) = if swap { (0, d) } else { (d, 0) };
            (fx * x + tx, fy * y + ty)
        })
        .collect();
    QuasiEmbeddingCandidate::new(g, image)
}

fn bfs_profile(g: &FiniteGraph, anchor: usize) -> Result<Vec<i64>> {
    Ok(g.distances_from(anchor)?
        .into_iter()
        .map(|d| d.expect("family members are connected") as i64)
        .collect())
}
