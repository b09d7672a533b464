//! Marked groups, word metrics, and displacement diagnostics.
//!
//! A marked group is a group together with a finite symmetric generating
//! set `S = S⁻¹`. The word norm `‖γ‖_S` is the length of a shortest
//! generator word for `γ`, and `d_S(x, y) = ‖x⁻¹y‖_S` is the left-invariant
//! word metric. Everything here works with finite balls: [`cayley_ball`]
//! enumerates all elements of norm at most `radius` by breadth-first
//! search, after which norms, distances, adjacency, and the exported Cayley
//! graph are exact within the ball.
//!
//! On top of the balls sit the displacement diagnostics:
//!
//! * [`displacement_check`] — verifies `‖p(x) − p(γx)‖ ≤ ‖γ‖_S` for an
//!   action and a map `p` into Euclidean space. Generator-level checks are
//!   exhaustive; by telescoping a geodesic word `γ = s₁⋯s_k`, generator
//!   success implies the full bound, which random in-ball elements
//!   spot-check.
//! * [`prop2_crosscheck`] — the equivalent Lipschitz formulation
//!   `‖p(γ₁⁻¹x) − p(γ₂⁻¹x)‖ ≤ d_S(γ₁, γ₂)`, sampled independently and
//!   compared against [`displacement_check`]'s verdict.
//! * [`gamma_variation`] / [`var_r`] — the group-orbit and metric-ball
//!   variation numbers of a scalar observable.
//! * [`radial_map_build`] — constructs the radial map `p(x) = ½ f(‖x‖) φ(x)`
//!   on a grid ball in Z², with `f` piecewise linear, vanishing inside
//!   `r0`, of slope at most `1 − ε`, and capped by the reciprocal of the
//!   empirical direction-variation profile `ν`; this makes every generator
//!   displacement at most `1 − ε/2` while the map stays essential (winding
//!   number 1 around the boundary).

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::FiniteGraph;
use crate::transport::MetricSpaceTable;

/// Memory guard: a ball enumeration never stores more than this many
/// elements.
pub const BALL_ELEMENT_CAP: usize = 200_000;

/// Random spot-check budget used by the displacement and Proposition-2
/// procedures.
pub const DISPLACEMENT_SAMPLES: usize = 1_000;

/// Relative tolerance applied to displacement bounds (`‖γ‖` is exact, the
/// Euclidean norms are not).
const DISPLACEMENT_TOL: f64 = 1e-9;

/// A group element in canonical form. Equality and hashing are exact, so
/// elements serve directly as table keys.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    /// Exponent vector in a free abelian group.
    Abelian(Vec<i64>),
    /// Reduced word in a free group; letter `i > 0` is the `i`-th
    /// generator, `-i` its inverse.
    Word(Vec<i8>),
    /// Element of `Z/n × Z/m`.
    CycPair(u64, u64),
    /// Row-major 2×2 matrix over `Z/p` with determinant 1.
    Mat2([u64; 4]),
}

/// Which group a [`MarkedGroup`] presents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    FreeAbelian(usize),
    Free(usize),
    CyclicProduct(u64, u64),
    Sl2ModP(u64),
}

/// A group with a fixed finite symmetric generating set.
#[derive(Debug, Clone)]
pub struct MarkedGroup {
    kind: GroupKind,
    generators: Vec<GroupElement>,
}

impl MarkedGroup {
    /// `Z^k` with generating set `{±e_1, …, ±e_k}`.
    pub fn free_abelian(k: usize) -> Result<Self> {
        if k == 0 || k > 100 {
            return Err(Error::BadGroupParams(format!("free abelian rank {k} out of range 1..=100")));
        }
        let mut generators = Vec::with_capacity(2 * k);
        for i in 0..k {
            for sign in [1i64, -1] {
                let mut v = vec![0i64; k];
                v[i] = sign;
                generators.push(GroupElement::Abelian(v));
            }
        }
        Ok(MarkedGroup { kind: GroupKind::FreeAbelian(k), generators })
    }

    /// The free group `F_k` on letters `1..=k` and their inverses.
    pub fn free(k: usize) -> Result<Self> {
        if k == 0 || k > 100 {
            return Err(Error::BadGroupParams(format!("free rank {k} out of range 1..=100")));
        }
        let mut generators = Vec::with_capacity(2 * k);
        for i in 1..=k as i8 {
            generators.push(GroupElement::Word(vec![i]));
            generators.push(GroupElement::Word(vec![-i]));
        }
        Ok(MarkedGroup { kind: GroupKind::Free(k), generators })
    }

    /// `Z/n × Z/m` with generating set `{±(1,0), ±(0,1)}` (deduplicated
    /// when a factor has order 2).
    pub fn cyclic_product(n: u64, m: u64) -> Result<Self> {
        if n < 2 || m < 2 {
            return Err(Error::BadGroupParams(format!(
                "cyclic product needs both orders ≥ 2, got {n} × {m}"
            )));
        }
        let mut generators = vec![GroupElement::CycPair(1, 0), GroupElement::CycPair(0, 1)];
        for inv in [GroupElement::CycPair(n - 1, 0), GroupElement::CycPair(0, m - 1)] {
            if !generators.contains(&inv) {
                generators.push(inv);
            }
        }
        Ok(MarkedGroup { kind: GroupKind::CyclicProduct(n, m), generators })
    }

    /// `SL₂(Z/p)` for prime `p`, generated by the elementary matrices
    /// `[[1,±1],[0,1]]` and `[[1,0],[±1,1]]`.
    pub fn sl2_mod_p(p: u64) -> Result<Self> {
        if p < 2 || !is_prime(p) {
            return Err(Error::BadGroupParams(format!("modulus {p} is not prime")));
        }
        let mut generators = vec![
            GroupElement::Mat2([1, 1, 0, 1]),
            GroupElement::Mat2([1, 0, 1, 1]),
        ];
        for inv in [
            GroupElement::Mat2([1, p - 1, 0, 1]),
            GroupElement::Mat2([1, 0, p - 1, 1]),
        ] {
            if !generators.contains(&inv) {
                generators.push(inv);
            }
        }
        Ok(MarkedGroup { kind: GroupKind::Sl2ModP(p), generators })
    }

    /// The group this presentation describes.
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Stable display name.
    pub fn name(&self) -> String {
        match self.kind {
            GroupKind::FreeAbelian(k) => format!("Z^{k}"),
            GroupKind::Free(k) => format!("F_{k}"),
            GroupKind::CyclicProduct(n, m) => format!("Z/{n} x Z/{m}"),
            GroupKind::Sl2ModP(p) => format!("SL2(Z/{p})"),
        }
    }

    /// The symmetric generating set.
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Identity element.
    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::FreeAbelian(k) => GroupElement::Abelian(vec![0; k]),
            GroupKind::Free(_) => GroupElement::Word(Vec::new()),
            GroupKind::CyclicProduct(_, _) => GroupElement::CycPair(0, 0),
            GroupKind::Sl2ModP(_) => GroupElement::Mat2([1, 0, 0, 1]),
        }
    }

    /// Group product `a · b` in canonical form.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        match (self.kind, a, b) {
            (GroupKind::FreeAbelian(k), GroupElement::Abelian(x), GroupElement::Abelian(y))
                if x.len() == k && y.len() == k =>
            {
                Ok(GroupElement::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect()))
            }
            (GroupKind::Free(k), GroupElement::Word(x), GroupElement::Word(y))
                if word_in_rank(x, k) && word_in_rank(y, k) =>
            {
                let mut out = x.clone();
                for &letter in y {
                    if out.last() == Some(&-letter) {
                        out.pop();
                    } else {
                        out.push(letter);
                    }
                }
                Ok(GroupElement::Word(out))
            }
            (GroupKind::CyclicProduct(n, m), &GroupElement::CycPair(a0, a1), &GroupElement::CycPair(b0, b1))
                if a0 < n && a1 < m && b0 < n && b1 < m =>
            {
                Ok(GroupElement::CycPair((a0 + b0) % n, (a1 + b1) % m))
            }
            (GroupKind::Sl2ModP(p), GroupElement::Mat2(x), GroupElement::Mat2(y)) => {
                Ok(GroupElement::Mat2([
                    (x[0] * y[0] + x[1] * y[2]) % p,
                    (x[0] * y[1] + x[1] * y[3]) % p,
                    (x[2] * y[0] + x[3] * y[2]) % p,
                    (x[2] * y[1] + x[3] * y[3]) % p,
                ]))
            }
            _ => Err(Error::WrongGroup { expected: kind_name(self.kind) }),
        }
    }

    /// Group inverse in canonical form.
    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        match (self.kind, a) {
            (GroupKind::FreeAbelian(k), GroupElement::Abelian(x)) if x.len() == k => {
                Ok(GroupElement::Abelian(x.iter().map(|v| -v).collect()))
            }
            (GroupKind::Free(k), GroupElement::Word(x)) if word_in_rank(x, k) => {
                Ok(GroupElement::Word(x.iter().rev().map(|l| -l).collect()))
            }
            (GroupKind::CyclicProduct(n, m), &GroupElement::CycPair(a0, a1)) if a0 < n && a1 < m => {
                Ok(GroupElement::CycPair((n - a0) % n, (m - a1) % m))
            }
            (GroupKind::Sl2ModP(p), GroupElement::Mat2(x)) => Ok(GroupElement::Mat2([
                x[3],
                (p - x[1] % p) % p,
                (p - x[2] % p) % p,
                x[0],
            ])),
            _ => Err(Error::WrongGroup { expected: kind_name(self.kind) }),
        }
    }
}

fn kind_name(kind: GroupKind) -> &'static str {
    match kind {
        GroupKind::FreeAbelian(_) => "free abelian",
        GroupKind::Free(_) => "free",
        GroupKind::CyclicProduct(_, _) => "cyclic product",
        GroupKind::Sl2ModP(_) => "sl2 mod p",
    }
}

fn word_in_rank(word: &[i8], k: usize) -> bool {
    word.iter().all(|&l| l != 0 && (l.unsigned_abs() as usize) <= k)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// All elements of word norm ≤ `radius`, with norms and right-multiplication
/// adjacency. Element 0 is the identity; indices follow BFS discovery
/// order, so they are deterministic for a fixed group.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    group: MarkedGroup,
    radius: usize,
    elements: Vec<GroupElement>,
    norms: Vec<usize>,
    index: HashMap<GroupElement, usize>,
    /// `adjacency[i][g]` is the index of `elements[i] · generators[g]`
    /// when that product lies in the ball.
    adjacency: Vec<Vec<Option<usize>>>,
}

/// Enumerates the ball of the given radius by breadth-first search from the
/// identity.
pub fn cayley_ball(group: &MarkedGroup, radius: usize) -> Result<CayleyBall> {
    let mut elements = vec![group.identity()];
    let mut norms = vec![0usize];
    let mut index = HashMap::from([(group.identity(), 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if norms[i] == radius {
            continue;
        }
        let current = elements[i].clone();
        for g in group.generators() {
            let next = group.multiply(&current, g)?;
            if !index.contains_key(&next) {
                if elements.len() == BALL_ELEMENT_CAP {
                    return Err(Error::BallCapExceeded {
                        cap: BALL_ELEMENT_CAP,
                        radius: radius as u32,
                    });
                }
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
                norms.push(norms[i] + 1);
            }
        }
    }
    let adjacency = elements
        .iter()
        .map(|e| {
            group
                .generators()
                .iter()
                .map(|g| Ok(index.get(&group.multiply(e, g)?).copied()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CayleyBall { group: group.clone(), radius, elements, norms, index, adjacency })
}

impl CayleyBall {
    /// The marked group this ball belongs to.
    pub fn group(&self) -> &MarkedGroup {
        &self.group
    }

    /// Enumeration radius.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of enumerated elements.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Whether the ball is empty (never: it always holds the identity).
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in BFS order.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Word norms, aligned with [`CayleyBall::elements`].
    pub fn norms(&self) -> &[usize] {
        &self.norms
    }

    /// Index of an element inside the ball.
    pub fn element_index(&self, gamma: &GroupElement) -> Result<usize> {
        self.index.get(gamma).copied().ok_or(Error::ElementOutsideBall)
    }

    /// Minimal generator-word length of `gamma`.
    pub fn word_norm(&self, gamma: &GroupElement) -> Result<usize> {
        Ok(self.norms[self.element_index(gamma)?])
    }

    /// Word metric `d_S(x, y) = ‖x⁻¹y‖_S`; both the arguments and their
    /// quotient must lie in the enumerated ball.
    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<usize> {
        self.element_index(x)?;
        self.element_index(y)?;
        let quotient = self.group.multiply(&self.group.inverse(x)?, y)?;
        self.word_norm(&quotient)
    }

    /// Index of `elements[i] · generators[g]` when inside the ball.
    pub fn neighbor(&self, i: usize, g: usize) -> Option<usize> {
        self.adjacency[i][g]
    }

    /// The ball as an undirected graph: one edge per unordered pair
    /// `{γ, γs}` with both endpoints enumerated. Right multiplication by
    /// distinct generators gives distinct neighbors, so the graph is
    /// simple, and interior vertices have degree `|S|`.
    pub fn to_graph(&self) -> Result<FiniteGraph> {
        let mut edges = Vec::new();
        for (i, row) in self.adjacency.iter().enumerate() {
            for &n in row {
                if let Some(j) = n {
                    if j > i {
                        edges.push((i, j));
                    }
                }
            }
        }
        FiniteGraph::build(self.elements.len(), &edges)
    }

    /// Norm table in CSV form, `element_id,word_norm`.
    pub fn norm_table_csv(&self) -> String {
        let mut out = String::from("element_id,word_norm\n");
        for (i, n) in self.norms.iter().enumerate() {
            out.push_str(&format!("{i},{n}\n"));
        }
        out
    }
}

/// Worst observation from a displacement scan.
#[derive(Debug, Clone)]
pub struct DisplacementWitness {
    /// Tested point.
    pub point: usize,
    /// Ball index of the element moving it.
    pub element: usize,
    /// Word norm of that element (the bound).
    pub norm: usize,
    /// Observed Euclidean displacement `‖p(x) − p(γx)‖`.
    pub displacement: f64,
}

/// Outcome of [`displacement_check`].
#[derive(Debug, Clone)]
pub struct DisplacementReport {
    /// Whether every tested displacement stayed within its word-norm bound.
    pub pass: bool,
    /// The observation with the largest displacement-to-bound ratio.
    pub worst: Option<DisplacementWitness>,
    pub generator_checks: usize,
    pub random_checks: usize,
}

/// Verifies the displacement bound `‖p(x) − p(γx)‖ ≤ ‖γ‖_S`.
///
/// Every (generator, point) pair is checked exhaustively; since a geodesic
/// word telescopes the general bound into generator steps, this already
/// decides the condition, and [`DISPLACEMENT_SAMPLES`] random in-ball
/// elements of norm ≥ 2 are checked on top as an independent spot-check.
///
/// `action(γ, x)` returns the moved point, or `None` if the action leaves
/// the tested domain (an error: callers should trim `points` so the whole
/// ball acts within the domain). `p(x)` returns the Euclidean image of a
/// point, or `None` where undefined.
pub fn displacement_check<A, P>(
    ball: &CayleyBall,
    action: A,
    p: P,
    points: &[usize],
    seed: u64,
) -> Result<DisplacementReport>
where
    A: Fn(&GroupElement, usize) -> Option<usize>,
    P: Fn(usize) -> Option<Vec<f64>>,
{
    let eval = |x: usize| p(x).ok_or(Error::UndefinedPoint(x));
    let mut pass = true;
    let mut worst: Option<DisplacementWitness> = None;
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut record = |point: usize, element: usize, norm: usize, displacement: f64| {
        let bound = norm as f64;
        if displacement > bound * (1.0 + DISPLACEMENT_TOL) + 1e-12 {
            pass = false;
        }
        let ratio = displacement / bound;
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst = Some(DisplacementWitness { point, element, norm, displacement });
        }
    };

    let mut generator_checks = 0;
    for (gi, g) in ball.group().generators().iter().enumerate() {
        let element = ball.element_index(g)?;
        for &x in points {
            let y = action(g, x).ok_or(Error::ActionLeavesDomain { point_id: x, generator: gi })?;
            record(x, element, 1, euclid(&eval(x)?, &eval(y)?)?);
            generator_checks += 1;
        }
    }

    let far: Vec<usize> = (0..ball.len()).filter(|&i| ball.norms()[i] >= 2).collect();
    let mut random_checks = 0;
    if !far.is_empty() && !points.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..DISPLACEMENT_SAMPLES {
            let i = far[rng.gen_range(0..far.len())];
            let x = points[rng.gen_range(0..points.len())];
            let gamma = &ball.elements()[i];
            let y = action(gamma, x)
                .ok_or(Error::ActionLeavesDomain { point_id: x, generator: i })?;
            record(x, i, ball.norms()[i], euclid(&eval(x)?, &eval(y)?)?);
            random_checks += 1;
        }
    }
    Ok(DisplacementReport { pass, worst, generator_checks, random_checks })
}

fn euclid(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { got: b.len(), want: a.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// Outcome of [`prop2_crosscheck`].
#[derive(Debug, Clone)]
pub struct Prop2Report {
    /// Verdict of the Lipschitz-form check.
    pub pass: bool,
    /// Verdict of [`displacement_check`] on the same inputs.
    pub displacement_pass: bool,
    /// Whether the two verdicts agree (they must: the conditions are
    /// equivalent).
    pub agree: bool,
    pub exhaustive_checks: usize,
    pub sampled_checks: usize,
}

/// Independently verifies `‖p(γ₁⁻¹x) − p(γ₂⁻¹x)‖ ≤ d_S(γ₁, γ₂)`: exhaustive
/// over `(γ₁, γ₂) = (e, s)` for every generator `s`, then sampled over
/// random in-ball pairs, and finally compared against
/// [`displacement_check`]'s verdict on the same action and map.
pub fn prop2_crosscheck<A, P>(
    ball: &CayleyBall,
    action: A,
    p: P,
    points: &[usize],
    seed: u64,
) -> Result<Prop2Report>
where
    A: Fn(&GroupElement, usize) -> Option<usize>,
    P: Fn(usize) -> Option<Vec<f64>>,
{
    let group = ball.group().clone();
    let eval = |x: usize| p(x).ok_or(Error::UndefinedPoint(x));
    let mut pass = true;
    let mut check = |x: usize, g1: &GroupElement, g2: &GroupElement, d: usize| -> Result<()> {
        let y1 = action(&group.inverse(g1)?, x)
            .ok_or(Error::ActionLeavesDomain { point_id: x, generator: 0 })?;
        let y2 = action(&group.inverse(g2)?, x)
            .ok_or(Error::ActionLeavesDomain { point_id: x, generator: 0 })?;
        let gap = euclid(&eval(y1)?, &eval(y2)?)?;
        if gap > d as f64 * (1.0 + DISPLACEMENT_TOL) + 1e-12 {
            pass = false;
        }
        Ok(())
    };

    let identity = group.identity();
    let mut exhaustive_checks = 0;
    for g in group.generators() {
        for &x in points {
            check(x, &identity, g, 1)?;
            exhaustive_checks += 1;
        }
    }

    let mut sampled_checks = 0;
    if !points.is_empty() && ball.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5_a5a5);
        for _ in 0..DISPLACEMENT_SAMPLES {
            // Draw γ₁ and a quotient δ, both in the ball; retry until
            // γ₂ = γ₁δ also lies in the ball (γ₁ = e always succeeds).
            let (g1, g2, d) = loop {
                let g1 = &ball.elements()[rng.gen_range(0..ball.len())];
                let di = rng.gen_range(0..ball.len());
                let delta = &ball.elements()[di];
                let g2 = group.multiply(g1, delta)?;
                if ball.element_index(&g2).is_ok() {
                    break (g1.clone(), g2, ball.norms()[di]);
                }
            };
            let x = points[rng.gen_range(0..points.len())];
            check(x, &g1, &g2, d)?;
            sampled_checks += 1;
        }
    }

    let displacement = displacement_check(ball, &action, &p, points, seed)?;
    Ok(Prop2Report {
        pass,
        displacement_pass: displacement.pass,
        agree: pass == displacement.pass,
        exhaustive_checks,
        sampled_checks,
    })
}

/// Γ-variation of a scalar observable at `x`: the exact maximum of
/// `|f(x) − f(γx)|` over enumerated `γ` with `‖γ‖ ≤ r`.
pub fn gamma_variation<A, F>(
    ball: &CayleyBall,
    action: A,
    f: F,
    r: usize,
    x: usize,
) -> Result<f64>
where
    A: Fn(&GroupElement, usize) -> Option<usize>,
    F: Fn(usize) -> Option<f64>,
{
    if r > ball.radius() {
        return Err(Error::VariationRadiusTooLarge {
            r: r as u32,
            radius: ball.radius() as u32,
        });
    }
    let fx = f(x).ok_or(Error::UndefinedPoint(x))?;
    let mut best = 0.0f64;
    for i in 0..ball.len() {
        if ball.norms()[i] > r {
            continue;
        }
        let y = action(&ball.elements()[i], x)
            .ok_or(Error::ActionLeavesDomain { point_id: x, generator: i })?;
        let fy = f(y).ok_or(Error::UndefinedPoint(y))?;
        best = best.max((fx - fy).abs());
    }
    Ok(best)
}

/// Metric-ball variation: the maximum of `|f(x) − f(y)|` over points with
/// `d(x, y) ≤ r` in a finite metric space.
pub fn var_r<F>(space: &MetricSpaceTable, f: F, r: f64, x: usize) -> Result<f64>
where
    F: Fn(usize) -> Option<f64>,
{
    if x >= space.len() {
        return Err(Error::PointOutOfRange { point: x, len: space.len() });
    }
    let fx = f(x).ok_or(Error::UndefinedPoint(x))?;
    let mut best = 0.0f64;
    for y in 0..space.len() {
        if space.d(x, y) <= r {
            let fy = f(y).ok_or(Error::UndefinedPoint(y))?;
            best = best.max((fx - fy).abs());
        }
    }
    Ok(best)
}

/// The ℓ¹ ball `{(a, b) ∈ Z² : |a| + |b| ≤ radius}` with stable point ids,
/// the standard domain for the radial map and for Z²-translation actions.
#[derive(Debug, Clone)]
pub struct GridBall {
    radius: i64,
    points: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
}

impl GridBall {
    /// Builds the ball; ids are assigned in lexicographic coordinate order.
    pub fn new(radius: i64) -> Result<Self> {
        if radius < 0 {
            return Err(Error::BadRadialParams(format!("grid radius {radius} is negative")));
        }
        let mut points = Vec::new();
        for a in -radius..=radius {
            for b in -radius..=radius {
                if a.abs() + b.abs() <= radius {
                    points.push((a, b));
                }
            }
        }
        let index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        Ok(GridBall { radius, points, index })
    }

    /// Ball radius.
    pub fn radius(&self) -> i64 {
        self.radius
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether the ball is empty (never: radius 0 still holds the origin).
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates of a point id.
    pub fn point(&self, id: usize) -> (i64, i64) {
        self.points[id]
    }

    /// Id of a coordinate pair, if inside the ball.
    pub fn id(&self, p: (i64, i64)) -> Option<usize> {
        self.index.get(&p).copied()
    }

    /// Ids with `|a| + |b| ≤ radius − margin` — the points on which every
    /// element of a radius-`margin` ball acts within the domain.
    pub fn interior_ids(&self, margin: i64) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| {
                let (a, b) = self.points[i];
                a.abs() + b.abs() <= self.radius - margin
            })
            .collect()
    }

    /// Translation action of `Z²` on the ball: `x ↦ x + γ`, `None` when the
    /// image leaves the ball or `γ` is not a rank-2 abelian element.
    pub fn translate_action(&self, gamma: &GroupElement, id: usize) -> Option<usize> {
        let GroupElement::Abelian(v) = gamma else {
            return None;
        };
        if v.len() != 2 {
            return None;
        }
        let (a, b) = self.points[id];
        self.id((a + v[0], b + v[1]))
    }

    /// The boundary sphere `|a| + |b| = radius` as a counterclockwise
    /// cycle of ids starting at `(radius, 0)`; consecutive entries are
    /// diagonal lattice neighbors (ℓ¹ distance 2).
    pub fn boundary_cycle(&self) -> Vec<usize> {
        let r = self.radius;
        if r == 0 {
            return vec![self.id((0, 0)).expect("origin present")];
        }
        let mut cycle = Vec::with_capacity(4 * r as usize);
        for t in 0..r {
            cycle.push((r - t, t));
        }
        for t in 0..r {
            cycle.push((-t, r - t));
        }
        for t in 0..r {
            cycle.push((-r + t, -t));
        }
        for t in 0..r {
            cycle.push((t, -r + t));
        }
        cycle
            .into_iter()
            .map(|p| self.id(p).expect("boundary point enumerated"))
            .collect()
    }
}

/// The unit direction map `x ↦ x / ‖x‖₂`; defined away from the origin.
pub fn default_phi(x: (i64, i64)) -> [f64; 2] {
    let (a, b) = (x.0 as f64, x.1 as f64);
    let norm = (a * a + b * b).sqrt();
    if norm == 0.0 {
        return [1.0, 0.0];
    }
    [a / norm, b / norm]
}

/// A built radial map with its construction profile and diagnostics.
#[derive(Debug, Clone)]
pub struct RadialMap {
    /// Flat radius: the map vanishes on `‖x‖₁ ≤ r0`.
    pub r0: f64,
    /// Slope deficit of the radial profile.
    pub epsilon: f64,
    /// Empirical direction variation `ν(t)`, indexed by `t = 0..=radius`;
    /// nonincreasing in `t`.
    pub nu: Vec<f64>,
    /// Radial profile `f(t)`, indexed likewise; nondecreasing, zero for
    /// `t ≤ r0`, slope ≤ `1 − ε`, and `f(t) ≤ 1/ν(t)` wherever `ν(t) > 0`.
    pub f: Vec<f64>,
    /// Map values per domain point id.
    values: Vec<[f64; 2]>,
    /// Maximum `‖p(x) − p(x + s)‖` over unit steps inside the domain; the
    /// construction forces this below `1 − ε/2`.
    pub max_generator_displacement: f64,
    /// Accumulated boundary angle divided by 2π.
    pub winding_raw: f64,
    /// Nearest integer to [`RadialMap::winding_raw`].
    pub winding_number: i64,
}

impl RadialMap {
    /// Image of a domain point id.
    pub fn value(&self, id: usize) -> [f64; 2] {
        self.values[id]
    }

    /// All images, aligned with the domain ids.
    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }
}

fn angle_between(u: [f64; 2], v: [f64; 2]) -> f64 {
    let nu = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    ((u[0] * v[0] + u[1] * v[1]) / (nu * nv)).clamp(-1.0, 1.0).acos()
}

/// Builds the radial map `p(x) = ½ f(‖x‖₁) φ(x)` on a grid ball.
///
/// The profile `ν(t)` is the largest angle between `φ` at unit-step
/// neighbors among points of norm ≥ `t`; `f` is the tightest nondecreasing
/// piecewise-linear function with `f ≡ 0` on `[0, r0]`, slope at most
/// `1 − ε`, and `f ≤ 1/ν`. For a unit step between `x` and `y = x + s`
/// with `τ = min(‖x‖₁, ‖y‖₁)`,
///
/// ```text
/// ‖p(x) − p(y)‖ ≤ ½|f(‖x‖₁) − f(‖y‖₁)| + ½ f(τ)·angle(φx, φy)
///              ≤ ½(1 − ε) + ½ = 1 − ε/2,
/// ```
///
/// since the angle is at most `ν(τ)` and `f(τ)·ν(τ) ≤ 1`. Degenerate `φ`
/// (ν ≡ 0) is allowed: `f` then grows at full slope `1 − ε`.
pub fn radial_map_build<PhiF>(
    domain: &GridBall,
    phi: PhiF,
    r0: f64,
    epsilon: f64,
) -> Result<RadialMap>
where
    PhiF: Fn((i64, i64)) -> [f64; 2],
{
    if !r0.is_finite() || r0 < 2.0 {
        return Err(Error::BadRadialParams(format!("r0 must be ≥ 2, got {r0}")));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(Error::BadRadialParams(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    let radius = domain.radius();
    if (radius as f64) <= r0 {
        return Err(Error::DomainTooSmall { radius: radius as u32, r0 });
    }

    // ν(t): record the φ-angle of every oriented unit step at the norm of
    // its source point, then take suffix maxima so ν is nonincreasing.
    let t_max = radius as usize;
    let mut bucket = vec![0.0f64; t_max + 1];
    for id in 0..domain.len() {
        let (a, b) = domain.point(id);
        if (a, b) == (0, 0) {
            continue;
        }
        let t = (a.abs() + b.abs()) as usize;
        for (da, db) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let y = (a + da, b + db);
            if y == (0, 0) || domain.id(y).is_none() {
                continue;
            }
            bucket[t] = bucket[t].max(angle_between(phi((a, b)), phi(y)));
        }
    }
    let mut nu = bucket;
    for t in (0..t_max).rev() {
        nu[t] = nu[t].max(nu[t + 1]);
    }

    let mut f = vec![0.0f64; t_max + 1];
    for t in 1..=t_max {
        if (t as f64) <= r0 {
            continue;
        }
        let step = (1.0 - epsilon) * (t as f64 - r0).min(1.0);
        let grown = f[t - 1] + step;
        f[t] = if nu[t] > 0.0 { grown.min(1.0 / nu[t]) } else { grown };
    }

    let values: Vec<[f64; 2]> = (0..domain.len())
        .map(|id| {
            let (a, b) = domain.point(id);
            let t = (a.abs() + b.abs()) as usize;
            if f[t] <= 0.0 {
                [0.0, 0.0]
            } else {
                let dir = phi((a, b));
                [0.5 * f[t] * dir[0], 0.5 * f[t] * dir[1]]
            }
        })
        .collect();

    let mut max_generator_displacement = 0.0f64;
    for id in 0..domain.len() {
        let (a, b) = domain.point(id);
        for (da, db) in [(1, 0), (0, 1)] {
            if let Some(nid) = domain.id((a + da, b + db)) {
                let (u, v) = (values[id], values[nid]);
                let d = ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2)).sqrt();
                max_generator_displacement = max_generator_displacement.max(d);
            }
        }
    }

    let boundary = domain.boundary_cycle();
    let mut total_angle = 0.0;
    for (pos, &id) in boundary.iter().enumerate() {
        let next = boundary[(pos + 1) % boundary.len()];
        let (u, v) = (values[id], values[next]);
        total_angle += (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]);
    }
    let winding_raw = total_angle / (2.0 * std::f64::consts::PI);

    Ok(RadialMap {
        r0,
        epsilon,
        nu,
        f,
        values,
        max_generator_displacement,
        winding_raw,
        winding_number: winding_raw.round() as i64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::path_graph;
    use approx::assert_relative_eq;

    #[test]
    fn group_parameter_validation() {
        assert!(matches!(MarkedGroup::free_abelian(0), Err(Error::BadGroupParams(_))));
        assert!(matches!(MarkedGroup::cyclic_product(1, 3), Err(Error::BadGroupParams(_))));
        assert!(matches!(MarkedGroup::sl2_mod_p(6), Err(Error::BadGroupParams(_))));
        assert!(MarkedGroup::sl2_mod_p(5).is_ok());
    }

    #[test]
    fn generating_sets_are_symmetric_without_identity() {
        for group in [
            MarkedGroup::free_abelian(2).unwrap(),
            MarkedGroup::free(2).unwrap(),
            MarkedGroup::cyclic_product(2, 3).unwrap(),
            MarkedGroup::sl2_mod_p(5).unwrap(),
            MarkedGroup::sl2_mod_p(2).unwrap(),
        ] {
            let identity = group.identity();
            for g in group.generators() {
                assert_ne!(*g, identity, "{}: identity in S", group.name());
                let inv = group.inverse(g).unwrap();
                assert!(
                    group.generators().contains(&inv),
                    "{}: S is not symmetric",
                    group.name()
                );
                assert_eq!(group.multiply(g, &inv).unwrap(), identity);
            }
        }
    }

    #[test]
    fn free_words_reduce() {
        let f2 = MarkedGroup::free(2).unwrap();
        let a = GroupElement::Word(vec![1]);
        let ab = f2.multiply(&a, &GroupElement::Word(vec![2])).unwrap();
        assert_eq!(ab, GroupElement::Word(vec![1, 2]));
        let back = f2.multiply(&ab, &f2.inverse(&ab).unwrap()).unwrap();
        assert_eq!(back, f2.identity());
        let cancel = f2
            .multiply(&GroupElement::Word(vec![1, -2]), &GroupElement::Word(vec![2, 1]))
            .unwrap();
        assert_eq!(cancel, GroupElement::Word(vec![1, 1]));
    }

    #[test]
    fn z2_ball_radius_1_has_5_elements() {
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let ball = cayley_ball(&z2, 1).unwrap();
        assert_eq!(ball.len(), 5);
        assert_eq!(ball.norms().iter().filter(|&&n| n == 1).count(), 4);
        assert_eq!(ball.word_norm(&z2.identity()).unwrap(), 0);
    }

    #[test]
    fn f2_ball_sizes() {
        let f2 = MarkedGroup::free(2).unwrap();
        assert_eq!(cayley_ball(&f2, 2).unwrap().len(), 17); // 1 + 4 + 12
        assert_eq!(cayley_ball(&f2, 3).unwrap().len(), 53); // + 36
    }

    #[test]
    fn cyclic_3x3_full_ball() {
        let g = MarkedGroup::cyclic_product(3, 3).unwrap();
        let ball = cayley_ball(&g, 2).unwrap();
        assert_eq!(ball.len(), 9);
        let graph = ball.to_graph().unwrap();
        assert_eq!(graph.vertex_count(), 9);
        assert_eq!(graph.edge_count(), 18);
        assert!(graph.degrees().iter().all(|&d| d == 4));
        assert!(graph.is_connected());
    }

    #[test]
    fn word_norm_examples() {
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let ball = cayley_ball(&z2, 5).unwrap();
        assert_eq!(ball.word_norm(&GroupElement::Abelian(vec![2, -3])).unwrap(), 5);
        for g in z2.generators() {
            assert_eq!(ball.word_norm(g).unwrap(), 1);
        }
        assert!(matches!(
            ball.word_norm(&GroupElement::Abelian(vec![6, 0])),
            Err(Error::ElementOutsideBall)
        ));
        // ℓ¹ norm throughout the ball.
        for (i, e) in ball.elements().iter().enumerate() {
            let GroupElement::Abelian(v) = e else { unreachable!() };
            assert_eq!(ball.norms()[i] as i64, v[0].abs() + v[1].abs());
        }
    }

    #[test]
    fn word_norm_subadditive_and_metric_left_invariant() {
        let g = MarkedGroup::cyclic_product(3, 3).unwrap();
        let ball = cayley_ball(&g, 4).unwrap(); // full group
        let elems = ball.elements().to_vec();
        for a in &elems {
            for b in &elems {
                let ab = g.multiply(a, b).unwrap();
                assert!(
                    ball.word_norm(&ab).unwrap()
                        <= ball.word_norm(a).unwrap() + ball.word_norm(b).unwrap()
                );
                for c in &elems {
                    let (ca, cb) = (g.multiply(c, a).unwrap(), g.multiply(c, b).unwrap());
                    assert_eq!(
                        ball.distance(&ca, &cb).unwrap(),
                        ball.distance(a, b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn inverse_preserves_norm() {
        let f2 = MarkedGroup::free(2).unwrap();
        let ball = cayley_ball(&f2, 3).unwrap();
        for e in ball.elements() {
            let inv = f2.inverse(e).unwrap();
            assert_eq!(ball.word_norm(e).unwrap(), ball.word_norm(&inv).unwrap());
        }
    }

    #[test]
    fn sl2_balls() {
        let s3 = MarkedGroup::sl2_mod_p(2).unwrap();
        assert_eq!(cayley_ball(&s3, 10).unwrap().len(), 6); // SL2(F2) ≅ S3

        let g5 = MarkedGroup::sl2_mod_p(5).unwrap();
        let ball = cayley_ball(&g5, 12).unwrap();
        assert_eq!(ball.len(), 120); // p(p²−1)
        let graph = ball.to_graph().unwrap();
        assert!(graph.is_connected());
        assert!(graph.degrees().iter().all(|&d| d == 4));
        // The elementary generators make this a decent expander; certify a
        // healthy gap numerically.
        let cert = crate::spectral::lambda1(&graph).unwrap();
        assert!(cert.lambda1 > 0.1, "lambda1 = {}", cert.lambda1);
    }

    #[test]
    fn norm_csv_shape() {
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let ball = cayley_ball(&z2, 1).unwrap();
        let csv = ball.norm_table_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("element_id,word_norm"));
        assert_eq!(lines.next(), Some("0,0"));
        assert_eq!(csv.lines().count(), 6);
    }

    fn grid_action(grid: &GridBall) -> impl Fn(&GroupElement, usize) -> Option<usize> + '_ {
        |g, x| grid.translate_action(g, x)
    }

    #[test]
    fn displacement_translation_examples() {
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let ball = cayley_ball(&z2, 3).unwrap();
        let grid = GridBall::new(10).unwrap();
        let points = grid.interior_ids(3);

        let identity_map = |x: usize| {
            let (a, b) = grid.point(x);
            Some(vec![a as f64, b as f64])
        };
        let report = displacement_check(&ball, grid_action(&grid), identity_map, &points, 7).unwrap();
        assert!(report.pass, "‖γ‖₂ ≤ ‖γ‖₁ must pass");
        assert!(report.random_checks > 0);

        let doubled = |x: usize| {
            let (a, b) = grid.point(x);
            Some(vec![2.0 * a as f64, 2.0 * b as f64])
        };
        let report = displacement_check(&ball, grid_action(&grid), doubled, &points, 7).unwrap();
        assert!(!report.pass);
        let worst = report.worst.unwrap();
        assert_eq!(worst.norm, 1, "worst ratio occurs already at a generator");
        assert_relative_eq!(worst.displacement, 2.0);
    }

    #[test]
    fn displacement_contraction_on_z() {
        let z = MarkedGroup::free_abelian(1).unwrap();
        let ball = cayley_ball(&z, 4).unwrap();
        let coords: Vec<i64> = (-20..=20).collect();
        let action = |g: &GroupElement, x: usize| {
            let GroupElement::Abelian(v) = g else { return None };
            let moved = coords[x] + v[0];
            coords.iter().position(|&c| c == moved)
        };
        let p = |x: usize| Some(vec![coords[x] as f64 / 2.0]);
        let points: Vec<usize> = (0..coords.len()).filter(|&x| coords[x].abs() <= 16).collect();
        let report = displacement_check(&ball, action, p, &points, 1).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn displacement_errors_when_action_leaves_domain() {
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let ball = cayley_ball(&z2, 1).unwrap();
        let grid = GridBall::new(3).unwrap();
        let all: Vec<usize> = (0..grid.len()).collect(); // includes boundary
        let p = |x: usize| {
            let (a, b) = grid.point(x);
            Some(vec![a as f64, b as f64])
        };
        assert!(matches!(
            displacement_check(&ball, grid_action(&grid), p, &all, 0),
            Err(Error::ActionLeavesDomain { .. })
        ));
    }

    #[test]
    fn generator_pass_telescopes_to_full_ball() {
        // Exhaustive over every ball element on radii ≤ 6: if all generator
        // displacements are within 1, every ‖γ‖-displacement is within ‖γ‖.
        let z = MarkedGroup::free_abelian(1).unwrap();
        let coords: Vec<i64> = (-40..=40).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for radius in 1..=6usize {
            let ball = cayley_ball(&z, radius).unwrap();
            let points: Vec<usize> =
                (0..coords.len()).filter(|&x| coords[x].abs() <= 40 - radius as i64).collect();
            let action = |g: &GroupElement, x: usize| {
                let GroupElement::Abelian(v) = g else { return None };
                let moved = coords[x] + v[0];
                if moved.abs() <= 40 {
                    Some((moved + 40) as usize)
                } else {
                    None
                }
            };
            for _ in 0..50 {
                // Random 1-Lipschitz profile: bounded increments.
                let mut vals = vec![0.0f64];
                for _ in 1..coords.len() {
                    let prev = *vals.last().unwrap();
                    vals.push(prev + rng.gen_range(-1.0..1.0));
                }
                let mut generator_ok = true;
                let mut full_ok = true;
                for i in 0..ball.len() {
                    let norm = ball.norms()[i];
                    if norm == 0 {
                        continue;
                    }
                    for &x in &points {
                        let y = action(&ball.elements()[i], x).unwrap();
                        let d = (vals[x] - vals[y]).abs();
                        if norm == 1 && d > 1.0 + 1e-12 {
                            generator_ok = false;
                        }
                        if d > norm as f64 + 1e-9 {
                            full_ok = false;
                        }
                    }
                }
                assert!(
                    !generator_ok || full_ok,
                    "telescoping failed at radius {radius}"
                );
            }
        }
    }

    #[test]
    fn prop2_agrees_on_translation_examples() {
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let ball = cayley_ball(&z2, 2).unwrap();
        let grid = GridBall::new(8).unwrap();
        let points = grid.interior_ids(2);
        let identity_map = |x: usize| {
            let (a, b) = grid.point(x);
            Some(vec![a as f64, b as f64])
        };
        let report =
            prop2_crosscheck(&ball, grid_action(&grid), identity_map, &points, 3).unwrap();
        assert!(report.pass && report.displacement_pass && report.agree);

        let doubled = |x: usize| {
            let (a, b) = grid.point(x);
            Some(vec![2.0 * a as f64, 2.0 * b as f64])
        };
        let report = prop2_crosscheck(&ball, grid_action(&grid), doubled, &points, 3).unwrap();
        assert!(!report.pass && !report.displacement_pass && report.agree);
    }

    #[test]
    fn prop2_verdicts_agree_on_random_maps() {
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let ball = cayley_ball(&z2, 8).unwrap();
        let grid = GridBall::new(12).unwrap();
        let points = grid.interior_ids(8);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for round in 0..1000 {
            let raw: Vec<[f64; 2]> = (0..grid.len())
                .map(|_| [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)])
                .collect();
            // Generator-level Lipschitz constants of the raw map, over the
            // whole grid and over the exhaustively scanned region.
            let mut lip_global = 0.0f64;
            let mut lip_scanned = 0.0f64;
            let scanned: std::collections::HashSet<usize> = points.iter().copied().collect();
            for id in 0..grid.len() {
                let (a, b) = grid.point(id);
                for step in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    if let Some(nid) = grid.id((a + step.0, b + step.1)) {
                        let d = ((raw[id][0] - raw[nid][0]).powi(2)
                            + (raw[id][1] - raw[nid][1]).powi(2))
                        .sqrt();
                        lip_global = lip_global.max(d);
                        if scanned.contains(&id) {
                            lip_scanned = lip_scanned.max(d);
                        }
                    }
                }
            }
            // Even rounds rescale into full compliance (no violation exists
            // anywhere, by telescoping through the grid); odd rounds force a
            // generator violation inside the scanned region, so both
            // exhaustive phases must fail. Either way the verdict is
            // decided deterministically, never by sampling.
            let scale = if round % 2 == 0 { 1.0 / lip_global } else { 1.3 / lip_scanned };
            let p = |x: usize| Some(vec![raw[x][0] * scale, raw[x][1] * scale]);
            let report =
                prop2_crosscheck(&ball, grid_action(&grid), p, &points, round as u64).unwrap();
            assert!(report.agree, "verdicts diverged on round {round}");
            assert_eq!(report.pass, round % 2 == 0, "unexpected verdict on round {round}");
        }
    }

    #[test]
    fn gamma_variation_examples() {
        let z = MarkedGroup::free_abelian(1).unwrap();
        let ball = cayley_ball(&z, 3).unwrap();
        let coords: Vec<i64> = (-10..=10).collect();
        let action = |g: &GroupElement, x: usize| {
            let GroupElement::Abelian(v) = g else { return None };
            let moved = coords[x] + v[0];
            if moved.abs() <= 10 {
                Some((moved + 10) as usize)
            } else {
                None
            }
        };
        let origin = 10; // coords[10] == 0
        let constant = |_x: usize| Some(2.5);
        assert_eq!(gamma_variation(&ball, action, constant, 3, origin).unwrap(), 0.0);

        let f = |x: usize| {
            let c = coords[x] as f64;
            Some(c / (1.0 + c.abs()))
        };
        assert_relative_eq!(gamma_variation(&ball, action, f, 1, origin).unwrap(), 0.5);

        assert!(matches!(
            gamma_variation(&ball, action, f, 4, origin),
            Err(Error::VariationRadiusTooLarge { r: 4, radius: 3 })
        ));
    }

    #[test]
    fn var_r_on_a_path() {
        let space = MetricSpaceTable::from_graph(&path_graph(6).unwrap()).unwrap();
        let f = |x: usize| Some(x as f64);
        assert_eq!(var_r(&space, f, 2.0, 0).unwrap(), 2.0);
        assert_eq!(var_r(&space, f, 0.5, 0).unwrap(), 0.0);
        assert!(matches!(
            var_r(&space, f, 1.0, 9),
            Err(Error::PointOutOfRange { point: 9, len: 6 })
        ));
    }

    #[test]
    fn grid_ball_structure() {
        let grid = GridBall::new(6).unwrap();
        assert_eq!(grid.len(), 85);
        let boundary = grid.boundary_cycle();
        assert_eq!(boundary.len(), 24);
        for (pos, &id) in boundary.iter().enumerate() {
            let (a, b) = grid.point(id);
            assert_eq!(a.abs() + b.abs(), 6);
            let (c, d) = grid.point(boundary[(pos + 1) % boundary.len()]);
            assert_eq!((a - c).abs(), 1, "boundary steps are diagonal moves");
            assert_eq!((b - d).abs(), 1, "boundary steps are diagonal moves");
        }
        assert_eq!(grid.interior_ids(6).len(), 1);
    }

    #[test]
    fn radial_map_vanishes_inside_r0() {
        let grid = GridBall::new(8).unwrap();
        let map = radial_map_build(&grid, default_phi, 3.0, 0.25).unwrap();
        for id in 0..grid.len() {
            let (a, b) = grid.point(id);
            if a.abs() + b.abs() <= 3 {
                assert_eq!(map.value(id), [0.0, 0.0]);
            } else {
                assert!(map.value(id) != [0.0, 0.0]);
            }
        }
    }

    #[test]
    fn radial_map_profile_invariants() {
        let grid = GridBall::new(32).unwrap();
        let map = radial_map_build(&grid, default_phi, 2.0, 0.25).unwrap();
        for t in 1..map.f.len() {
            let step = map.f[t] - map.f[t - 1];
            assert!(step >= 0.0, "f must be nondecreasing");
            assert!(step <= (1.0 - map.epsilon) + 1e-12, "slope cap violated");
            assert!(map.nu[t] <= map.nu[t - 1] + 1e-15, "nu must be nonincreasing");
            if map.nu[t] > 0.0 {
                assert!(map.f[t] <= 1.0 / map.nu[t] + 1e-12);
            }
        }
    }

    #[test]
    fn radial_map_displacement_and_winding() {
        let grid = GridBall::new(32).unwrap();
        let epsilon = 0.25;
        let map = radial_map_build(&grid, default_phi, 2.0, epsilon).unwrap();
        assert!(
            map.max_generator_displacement <= 1.0 - epsilon / 2.0 + 1e-9,
            "displacement {} exceeds 1 − ε/2",
            map.max_generator_displacement
        );
        assert_eq!(map.winding_number, 1);
        assert!((map.winding_raw - 1.0).abs() < 1e-6);

        // The full displacement condition holds through the check API.
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let ball = cayley_ball(&z2, 1).unwrap();
        let points = grid.interior_ids(1);
        let p = |x: usize| Some(map.value(x).to_vec());
        let report = displacement_check(&ball, |g, x| grid.translate_action(g, x), p, &points, 0)
            .unwrap();
        assert!(report.pass);
    }

    #[test]
    fn radial_map_degenerate_phi_is_allowed() {
        let grid = GridBall::new(10).unwrap();
        let constant_phi = |_x: (i64, i64)| [1.0, 0.0];
        let map = radial_map_build(&grid, constant_phi, 2.0, 0.5).unwrap();
        assert!(map.nu.iter().all(|&v| v == 0.0));
        // f grows at full slope 1 − ε once past r0.
        assert_relative_eq!(map.f[10], 0.5 * 8.0, max_relative = 1e-12);
        assert_eq!(map.winding_number, 0);
        assert!(map.max_generator_displacement <= 1.0 - 0.5 / 2.0 + 1e-9);
    }

    #[test]
    fn radial_map_parameter_errors() {
        let grid = GridBall::new(8).unwrap();
        assert!(matches!(
            radial_map_build(&grid, default_phi, 1.0, 0.5),
            Err(Error::BadRadialParams(_))
        ));
        assert!(matches!(
            radial_map_build(&grid, default_phi, 2.0, 1.0),
            Err(Error::BadRadialParams(_))
        ));
        let tiny = GridBall::new(2).unwrap();
        assert!(matches!(
            radial_map_build(&tiny, default_phi, 2.0, 0.5),
            Err(Error::DomainTooSmall { radius: 2, .. })
        ));
    }
}
