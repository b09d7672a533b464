//! Command-line driver: graph and Cayley-ball generation, spectral
//! certificates, randomized verifier sweeps, embedding optimizers,
//! Kantorovich–Rubinstein distances, and the family-level averaging
//! obstruction report.
//!
//! Conventions shared by every subcommand:
//!
//! - reports are plain CSV columns, written to stdout or, with `-o`,
//!   atomically to a file (temp file + rename in the target directory), so
//!   partial artifacts are never left behind;
//! - randomized commands take an explicit `--seed`, and per-member work
//!   derives an independent stream from `(seed, member index)`, making every
//!   artifact byte-reproducible for a fixed configuration — including under
//!   `COARSE_OBSTRUCT_THREADS`, which only caps worker fan-out;
//! - exit status is 0 on success, 1 when a verifier records at least one
//!   violation, and 2 on usage or input errors.

use std::env;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use coarse_obstruct::cayley::{self, GroupElement, MarkedGroup};
use coarse_obstruct::coarse::{self, BaselineMap};
use coarse_obstruct::embed;
use coarse_obstruct::graphs::{self, ExpanderFamily, FamilyKind, FiniteGraph};
use coarse_obstruct::spectral;
use coarse_obstruct::transport::{self, FiniteMeasure, MeasureFile, MetricSpaceTable, SpaceRef};

#[derive(Parser)]
#[command(name = "coarse-obstruct", version, about = "Expander certificates, embedding ceilings, transport metrics, and the lattice averaging obstruction", propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graphs and Cayley balls as edge-list files
    #[command(subcommand)]
    Gen(GenCommand),
    /// Spectral gap certificate (lambda1, exact Cheeger when feasible)
    Spectral(SpectralArgs),
    /// Randomized verifier sweeps; exit 1 if any row records a violation
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Build embeddings and export per-vertex coordinates
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// Transport distances between finite measures
    #[command(subcommand)]
    Transport(TransportCommand),
    /// Averaging obstruction report for a graph family
    Obstruct(ObstructArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Torus graph on n x n vertices with the four fixed affine generators
    Margulis {
        /// Torus side length (the member has n^2 vertices)
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Uniform random regular graph via the configuration model
    RandomRegular {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Word-metric ball in a marked group, plus a norm table CSV
    Cayley {
        /// Group spec: z<k> (free abelian), f<k> (free), cyc:<n>x<m>, sl2:<p>
        #[arg(long, value_parser = parse_group)]
        group: GroupSpec,
        #[arg(long)]
        radius: usize,
        #[arg(short, long)]
        output: PathBuf,
        /// Norm table destination (default: <output> with .norms.csv)
        #[arg(long)]
        norms: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SpectralArgs {
    /// Edge-list graph file
    #[arg(short, long, conflicts_with_all = ["family", "n"])]
    input: Option<PathBuf>,
    /// Family kind, paired with --n
    #[arg(long, requires = "n")]
    family: Option<FamilyArg>,
    /// Member size for --family
    #[arg(long, requires = "family")]
    n: Option<usize>,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Required when --family random-regular
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Spectral ceiling and concentration corollaries on random embeddings
    ExpanderInequalities {
        #[arg(long, default_value = "margulis")]
        family: FamilyArg,
        /// Member sizes, inclusive range a..b or a single value
        #[arg(long, value_parser = parse_sizes)]
        sizes: Sizes,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Random embeddings per member
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Metric axioms of the transport distance on random measures
    TransportMetric {
        /// Cycle-graph space size
        #[arg(long, default_value_t = 9)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        triples: usize,
        /// Largest support size drawn per measure
        #[arg(long, default_value_t = 6)]
        max_support: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Word-norm displacement bound for a scaled lattice translation action
    Displacement {
        /// Domain ball radius in the lattice plane
        #[arg(long, default_value_t = 10)]
        grid_radius: i64,
        /// Word-ball radius of tested group elements
        #[arg(long, default_value_t = 3)]
        ball_radius: usize,
        /// Coordinate scale of the tested map (1 passes, 2 must fail)
        #[arg(long, default_value_t = 1)]
        scale: i64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EmbedCommand {
    /// Bottom nonzero Laplacian eigenvectors, rescaled to Lipschitz 1
    Spectral {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Projected-ascent spread maximizer under the Lipschitz constraint
    MaxSpread {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 300)]
        iters: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TransportCommand {
    /// Kantorovich-Rubinstein distance between two measure files
    Kr {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        /// Optimal plan destination (source,target,mass)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ObstructArgs {
    #[arg(long, default_value = "margulis")]
    family: FamilyArg,
    /// Member sizes, inclusive range a..b or a single value
    #[arg(long, value_parser = parse_sizes)]
    sizes: Sizes,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Required for random-regular families and the max-spread baseline
    #[arg(long)]
    seed: Option<u64>,
    /// Target space of the excluded quasi-embeddings
    #[arg(long, default_value = "z2")]
    target: String,
    #[arg(long, default_value = "spectral")]
    baseline: BaselineArg,
    /// Ascent iterations for --baseline max-spread
    #[arg(long, default_value_t = 300)]
    iters: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Margulis,
    RandomRegular,
    Cycle,
}

impl FamilyArg {
    fn kind(self) -> FamilyKind {
        match self {
            FamilyArg::Margulis => FamilyKind::Margulis,
            FamilyArg::RandomRegular => FamilyKind::RandomRegular,
            FamilyArg::Cycle => FamilyKind::Cycle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Spectral,
    MaxSpread,
}

#[derive(Clone, Debug)]
struct Sizes(Vec<usize>);

fn parse_sizes(text: &str) -> Result<Sizes, String> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
        if a > b {
            return Err(format!("empty size range {text:?}"));
        }
        Ok(Sizes((a..=b).collect()))
    } else {
        let n: usize = text.parse().map_err(|_| format!("bad size {text:?}"))?;
        Ok(Sizes(vec![n]))
    }
}

#[derive(Clone, Debug)]
enum GroupSpec {
    FreeAbelian(usize),
    Free(usize),
    CyclicProduct(u64, u64),
    Sl2(u64),
}

fn parse_group(text: &str) -> Result<GroupSpec, String> {
    let text = text.trim();
    let bad = || format!("unknown group spec {text:?} (try z2, f2, cyc:3x3, sl2:5)");
    if let Some(rest) = text.strip_prefix("cyc:") {
        let (n, m) = rest.split_once('x').ok_or_else(bad)?;
        return Ok(GroupSpec::CyclicProduct(
            n.parse().map_err(|_| bad())?,
            m.parse().map_err(|_| bad())?,
        ));
    }
    if let Some(p) = text.strip_prefix("sl2:") {
        return Ok(GroupSpec::Sl2(p.parse().map_err(|_| bad())?));
    }
    if let Some(k) = text.strip_prefix('z') {
        return Ok(GroupSpec::FreeAbelian(k.parse().map_err(|_| bad())?));
    }
    if let Some(k) = text.strip_prefix('f') {
        return Ok(GroupSpec::Free(k.parse().map_err(|_| bad())?));
    }
    Err(bad())
}

impl GroupSpec {
    fn build(&self) -> Result<MarkedGroup, coarse_obstruct::Error> {
        match *self {
            GroupSpec::FreeAbelian(k) => MarkedGroup::free_abelian(k),
            GroupSpec::Free(k) => MarkedGroup::free(k),
            GroupSpec::CyclicProduct(n, m) => MarkedGroup::cyclic_product(n, m),
            GroupSpec::Sl2(p) => MarkedGroup::sl2_mod_p(p),
        }
    }
}

// --- plumbing ---------------------------------------------------------

type RunResult = Result<ExitCode, String>;

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Writes via a temp file in the destination directory plus an atomic
/// rename, so interrupted runs never leave a partial artifact.
fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| format!("cannot create temp file in {}: {e}", dir.display()))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| format!("cannot persist {}: {e}", path.display()))?;
    Ok(())
}

/// CSV to `-o` (atomically) or stdout.
fn emit(output: Option<&Path>, contents: &str) -> Result<(), String> {
    match output {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<FiniteGraph, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    FiniteGraph::from_edge_list(&text).map_err(fail)
}

/// Independent per-member stream; the same mixing the family generators use.
fn member_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn thread_budget(members: usize) -> usize {
    let default = std::thread::available_parallelism().map(usize::from).unwrap_or(1);
    let cap = env::var("COARSE_OBSTRUCT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(default);
    cap.clamp(1, members.max(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> RunResult {
    match command {
        Command::Gen(cmd) => run_gen(cmd),
        Command::Spectral(args) => run_spectral(args),
        Command::Verify(cmd) => run_verify(cmd),
        Command::Embed(cmd) => run_embed(cmd),
        Command::Transport(cmd) => run_transport(cmd),
        Command::Obstruct(args) => run_obstruct(args),
    }
}

// --- gen ----------------------------------------------------------------

fn run_gen(cmd: GenCommand) -> RunResult {
    match cmd {
        GenCommand::Margulis { n, output } => {
            let g = graphs::margulis_graph(n).map_err(fail)?;
            write_atomic(&output, &g.to_edge_list())?;
            println!(
                "wrote {} ({} vertices, {} edges)",
                output.display(),
                g.vertex_count(),
                g.edge_count()
            );
            Ok(ExitCode::SUCCESS)
        }
        GenCommand::RandomRegular { n, degree, seed, output } => {
            let g = graphs::random_regular(n, degree, seed).map_err(fail)?;
            write_atomic(&output, &g.to_edge_list())?;
            println!(
                "wrote {} ({} vertices, {} edges)",
                output.display(),
                g.vertex_count(),
                g.edge_count()
            );
            Ok(ExitCode::SUCCESS)
        }
        GenCommand::Cayley { group, radius, output, norms } => {
            let group = group.build().map_err(fail)?;
            let ball = cayley::cayley_ball(&group, radius).map_err(fail)?;
            let g = ball.to_graph().map_err(fail)?;
            write_atomic(&output, &g.to_edge_list())?;
            let norms_path = norms.unwrap_or_else(|| output.with_extension("norms.csv"));
            write_atomic(&norms_path, &ball.norm_table_csv())?;
            println!(
                "wrote {} and {} ({}, radius {}, {} elements)",
                output.display(),
                norms_path.display(),
                group.name(),
                radius,
                ball.len()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

// --- spectral -------------------------------------------------------------

fn run_spectral(args: SpectralArgs) -> RunResult {
    let g = match (&args.input, args.family) {
        (Some(path), None) => load_graph(path)?,
        (None, Some(family)) => {
            let n = args.n.expect("clap: --family requires --n");
            match family.kind() {
                FamilyKind::Margulis => graphs::margulis_graph(n).map_err(fail)?,
                FamilyKind::Cycle => graphs::cycle_graph(n).map_err(fail)?,
                FamilyKind::RandomRegular => {
                    let seed = args
                        .seed
                        .ok_or("--seed is required for --family random-regular")?;
                    graphs::random_regular(n, args.degree, seed).map_err(fail)?
                }
            }
        }
        _ => return Err("provide exactly one of -i <file> or --family <kind> --n <size>".into()),
    };
    let cert = spectral::lambda1(&g).map_err(fail)?;
    let mut csv = String::from(spectral::CERTIFICATE_CSV_HEADER);
    csv.push('\n');
    csv.push_str(&spectral::certificate_csv_row(&g, &cert));
    csv.push('\n');
    emit(args.output.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

// --- verify ---------------------------------------------------------------

/// Exit 1 when a sweep recorded violations, per the tool-wide contract.
fn verdict_exit(violations: usize) -> ExitCode {
    if violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_verify(cmd: VerifyCommand) -> RunResult {
    match cmd {
        VerifyCommand::ExpanderInequalities {
            family,
            sizes,
            degree,
            samples,
            dim,
            seed,
            output,
        } => verify_expander(family, &sizes.0, degree, samples, dim, seed, output.as_deref()),
        VerifyCommand::TransportMetric { n, triples, max_support, seed, output } => {
            verify_transport(n, triples, max_support, seed, output.as_deref())
        }
        VerifyCommand::Displacement { grid_radius, ball_radius, scale, seed, output } => {
            verify_displacement(grid_radius, ball_radius, scale, seed, output.as_deref())
        }
    }
}

fn verify_expander(
    family: FamilyArg,
    sizes: &[usize],
    degree: usize,
    samples: usize,
    dim: usize,
    seed: u64,
    output: Option<&Path>,
) -> RunResult {
    let fam = ExpanderFamily::generate(family.kind(), sizes, Some(degree), Some(seed))
        .map_err(fail)?;
    let mut csv = String::from("n,d_max,lambda1,c0,samples,max_d_ratio,cheeger_ok,violations\n");
    let mut total_violations = 0usize;
    for (index, member) in fam.members.iter().enumerate() {
        let g = &member.graph;
        let n = g.vertex_count();
        let c0 = embed::c0_from_lambda1(g, member.certificate.lambda1);
        let mut rng = ChaCha8Rng::seed_from_u64(member_seed(seed, index));
        let mut violations = 0usize;
        let mut max_ratio = f64::NEG_INFINITY;
        for _ in 0..samples {
            let e = embed::random_embedding(g, dim, &mut rng);
            if !e.is_nonconstant() {
                continue;
            }
            let ratio = e.d_ratio().map_err(fail)?;
            max_ratio = max_ratio.max(ratio);
            if ratio > c0 + 1e-9 {
                violations += 1;
            }
            let report = embed::corollary_report_with_c0(&e, c0).map_err(fail)?;
            if report.pair_mean > c0 + 1e-9
                || report.mean_squared_norm > c0 / 2.0 + 1e-9
                || 2 * report.inside_count <= n
            {
                violations += 1;
            }
            let (lhs, rhs) = embed::pair_sum_identity_sides(&e);
            if (lhs - rhs).abs() > 1e-9 * lhs.abs().max(rhs.abs()).max(1.0) {
                violations += 1;
            }
        }
        let cheeger_ok = if n <= spectral::CHEEGER_EXHAUSTIVE_CAP {
            let rep = spectral::cheeger_crosscheck(g).map_err(fail)?;
            if !rep.bounds_ok {
                violations += 1;
            }
            rep.bounds_ok.to_string()
        } else {
            String::new()
        };
        total_violations += violations;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            n,
            g.max_degree(),
            member.certificate.lambda1,
            c0,
            samples,
            max_ratio,
            cheeger_ok,
            violations
        )
        .expect("string formatting is infallible");
    }
    emit(output, &csv)?;
    Ok(verdict_exit(total_violations))
}

fn random_measure<R: Rng>(n: usize, max_support: usize, rng: &mut R) -> FiniteMeasure {
    let support = rng.gen_range(1..=max_support.min(n));
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    points.truncate(support);
    points.sort_unstable();
    let weights: Vec<f64> = (0..support).map(|_| rng.gen_range(1e-3..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let atoms: Vec<(usize, f64)> =
        points.into_iter().zip(weights).map(|(p, w)| (p, w / total)).collect();
    FiniteMeasure::new(&atoms).expect("atoms are distinct with positive weights")
}

fn verify_transport(
    n: usize,
    triples: usize,
    max_support: usize,
    seed: u64,
    output: Option<&Path>,
) -> RunResult {
    let g = graphs::cycle_graph(n).map_err(fail)?;
    let space = MetricSpaceTable::from_graph(&g).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("triple,d_ab,d_bc,d_ac,symmetry_gap,triangle_slack,ok\n");
    let mut violations = 0usize;
    for t in 0..triples {
        let a = random_measure(n, max_support, &mut rng);
        let b = random_measure(n, max_support, &mut rng);
        let c = random_measure(n, max_support, &mut rng);
        let d_ab = transport::kr_distance(&a, &b, &space).map_err(fail)?;
        let d_ba = transport::kr_distance(&b, &a, &space).map_err(fail)?;
        let d_bc = transport::kr_distance(&b, &c, &space).map_err(fail)?;
        let d_ac = transport::kr_distance(&a, &c, &space).map_err(fail)?;
        let d_aa = transport::kr_distance(&a, &a, &space).map_err(fail)?;
        let symmetry_gap = (d_ab - d_ba).abs();
        let triangle_slack = d_ab + d_bc - d_ac;
        let ok = symmetry_gap == 0.0 && triangle_slack >= -1e-9 && d_aa == 0.0;
        if !ok {
            violations += 1;
        }
        writeln!(csv, "{t},{d_ab},{d_bc},{d_ac},{symmetry_gap},{triangle_slack},{ok}")
            .expect("string formatting is infallible");
    }
    emit(output, &csv)?;
    Ok(verdict_exit(violations))
}

fn verify_displacement(
    grid_radius: i64,
    ball_radius: usize,
    scale: i64,
    seed: u64,
    output: Option<&Path>,
) -> RunResult {
    let grid = cayley::GridBall::new(grid_radius).map_err(fail)?;
    let group = MarkedGroup::free_abelian(2).map_err(fail)?;
    let ball = cayley::cayley_ball(&group, ball_radius).map_err(fail)?;
    let points = grid.interior_ids(ball_radius as i64);
    let action = |g: &GroupElement, id: usize| grid.translate_action(g, id);
    let p = |id: usize| {
        let (x, y) = grid.point(id);
        Some(vec![(scale * x) as f64, (scale * y) as f64])
    };
    let report = cayley::displacement_check(&ball, action, p, &points, seed).map_err(fail)?;
    let cross = cayley::prop2_crosscheck(&ball, action, p, &points, seed).map_err(fail)?;
    let worst = report.worst.as_ref().expect("interior points were tested");
    let mut csv = String::from(
        "points,generator_checks,random_checks,worst_norm,worst_displacement,crosscheck_agree,pass\n",
    );
    writeln!(
        csv,
        "{},{},{},{},{},{},{}",
        points.len(),
        report.generator_checks,
        report.random_checks,
        worst.norm,
        worst.displacement,
        cross.agree,
        report.pass
    )
    .expect("string formatting is infallible");
    emit(output, &csv)?;
    let violations = usize::from(!report.pass) + usize::from(!cross.agree);
    Ok(verdict_exit(violations))
}

// --- embed ------------------------------------------------------------

fn run_embed(cmd: EmbedCommand) -> RunResult {
    let (g, e, output) = match cmd {
        EmbedCommand::Spectral { input, dim, output } => {
            let g = load_graph(&input)?;
            let e = embed::spectral_embedding(&g, dim).map_err(fail)?;
            (g, e, output)
        }
        EmbedCommand::MaxSpread { input, dim, iters, seed, output } => {
            let g = load_graph(&input)?;
            let e = embed::max_spread_embedding(&g, dim, iters, seed).map_err(fail)?;
            (g, e, output)
        }
    };
    emit(output.as_deref(), &e.to_csv())?;
    if output.is_some() {
        let c0 = embed::c0_bound(&g).map_err(fail)?;
        let ratio = e.d_ratio().map_err(fail)?;
        println!(
            "n={} dim={} d_ratio={ratio:.6} c0={c0:.6} lipschitz={:.6}",
            g.vertex_count(),
            e.dim(),
            e.lipschitz_constant()
        );
    }
    Ok(ExitCode::SUCCESS)
}

// --- transport ----------------------------------------------------------

fn load_measure(path: &Path) -> Result<MeasureFile, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    MeasureFile::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve_space(space: &SpaceRef) -> Result<MetricSpaceTable, String> {
    match space {
        SpaceRef::Path(p) => {
            let g = load_graph(Path::new(p))?;
            MetricSpaceTable::from_graph(&g).map_err(fail)
        }
        SpaceRef::Table(t) => MetricSpaceTable::new(t).map_err(fail),
    }
}

fn run_transport(cmd: TransportCommand) -> RunResult {
    let TransportCommand::Kr { mu, nu, output } = cmd;
    let mu_file = load_measure(&mu)?;
    let nu_file = load_measure(&nu)?;
    if mu_file.space != nu_file.space {
        return Err("measure files disagree on the underlying space".into());
    }
    let space = resolve_space(&mu_file.space)?;
    let mu = mu_file.to_measure().map_err(fail)?;
    let nu = nu_file.to_measure().map_err(fail)?;
    mu.validate_in_space(&space).map_err(fail)?;
    nu.validate_in_space(&space).map_err(fail)?;
    let plan = transport::kr_plan(&mu, &nu, &space).map_err(fail)?;
    println!("kr = {}", plan.cost);
    if let Some(path) = output {
        let mut csv = String::from("source,target,mass\n");
        for &(i, j, f) in &plan.flows {
            writeln!(csv, "{i},{j},{f}").expect("string formatting is infallible");
        }
        write_atomic(&path, &csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

// --- obstruct ----------------------------------------------------------

fn run_obstruct(args: ObstructArgs) -> RunResult {
    let needs_seed = matches!(args.family, FamilyArg::RandomRegular)
        || matches!(args.baseline, BaselineArg::MaxSpread);
    if needs_seed && args.seed.is_none() {
        return Err(
            "--seed is required for random-regular families and the max-spread baseline".into(),
        );
    }
    let fam = ExpanderFamily::generate(
        args.family.kind(),
        &args.sizes.0,
        Some(args.degree),
        args.seed,
    )
    .map_err(fail)?;
    let baseline = match args.baseline {
        BaselineArg::Spectral => BaselineMap::Spectral,
        BaselineArg::MaxSpread => BaselineMap::MaxSpread {
            iters: args.iters,
            seed: args.seed.expect("checked above"),
        },
    };
    let threads = thread_budget(fam.members.len());
    let report =
        coarse::obstruction_bound_with_threads(&fam, &args.target, baseline, threads)
            .map_err(fail)?;
    emit(args.output.as_deref(), &report.to_csv())?;
    if args.output.is_some() {
        println!(
            "{} members, R={}, c(R)={}, capacity={}, forced_fraction={}, verdict: {}",
            report.rows.len(),
            report.geometry.r,
            report.geometry.c_of_r,
            report.geometry.capacity,
            report.geometry.forced_fraction,
            report.verdict
        );
    }
    Ok(ExitCode::SUCCESS)
}
