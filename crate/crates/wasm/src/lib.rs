//! Browser bindings for the demo page: each export takes plain scalars,
//! runs the corresponding library pipeline, and returns a JSON string the
//! page renders directly. Errors come back as `{"error": "..."}` rather
//! than exceptions, so the page stays a dumb renderer.
//!
//! The crate also builds as a native rlib, which is how its tests run; the
//! `wasm-bindgen` attribute is attached only on the wasm32 target.

use serde::Serialize;

use coarse_obstruct::coarse::{self, BaselineMap};
use coarse_obstruct::embed;
use coarse_obstruct::graphs::{self, ExpanderFamily, FamilyKind, FiniteGraph};
use coarse_obstruct::spectral;

#[cfg(target_arch = "wasm32")]
use wasm_bindgen::prelude::wasm_bindgen;

fn family_graph(family: &str, size: usize, seed: u64) -> Result<FiniteGraph, String> {
    match family {
        "margulis" => graphs::margulis_graph(size).map_err(|e| e.to_string()),
        "cycle" => graphs::cycle_graph(size).map_err(|e| e.to_string()),
        "random-regular" => graphs::random_regular(size, 4, seed).map_err(|e| e.to_string()),
        other => Err(format!("unknown family {other:?} (margulis, cycle, random-regular)")),
    }
}

fn family_kind(family: &str) -> Result<FamilyKind, String> {
    match family {
        "margulis" => Ok(FamilyKind::Margulis),
        "cycle" => Ok(FamilyKind::Cycle),
        "random-regular" => Ok(FamilyKind::RandomRegular),
        other => Err(format!("unknown family {other:?} (margulis, cycle, random-regular)")),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| error_json(&e.to_string()))
}

fn error_json(message: &str) -> String {
    to_json(&ErrorBody { error: message.to_string() })
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

#[derive(Serialize)]
struct CertificateBody {
    family: String,
    n: usize,
    edges: usize,
    d_max: usize,
    lambda1: f64,
    c0: f64,
    conductance_lower_bound: f64,
}

/// Spectral certificate of one family member: the gap `lambda1`, the spread
/// ceiling `c0` it induces, and the conductance lower bound.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn spectral_certificate(family: &str, size: usize, seed: u64) -> String {
    let run = || -> Result<CertificateBody, String> {
        let g = family_graph(family, size, seed)?;
        let cert = spectral::lambda1(&g).map_err(|e| e.to_string())?;
        Ok(CertificateBody {
            family: family.to_string(),
            n: g.vertex_count(),
            edges: g.edge_count(),
            d_max: g.max_degree(),
            lambda1: cert.lambda1,
            c0: embed::c0_from_lambda1(&g, cert.lambda1),
            conductance_lower_bound: cert.conductance_lower_bound,
        })
    };
    match run() {
        Ok(body) => to_json(&body),
        Err(e) => error_json(&e),
    }
}

#[derive(Serialize)]
struct EmbeddingBody {
    n: usize,
    edges: Vec<(usize, usize)>,
    points: Vec<[f64; 2]>,
    d_ratio: f64,
    c0: f64,
    lipschitz: f64,
    history: Vec<f64>,
}

/// Runs the projected-ascent spread maximizer in the plane and returns the
/// coordinates, the edge list (for drawing), the achieved `D_f`, the ceiling
/// `c0`, and the per-iteration objective history.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn max_spread_demo(family: &str, size: usize, iters: usize, seed: u64) -> String {
    let run = || -> Result<EmbeddingBody, String> {
        let g = family_graph(family, size, seed)?;
        let (e, history) =
            embed::max_spread_with_history(&g, 2, iters, seed).map_err(|e| e.to_string())?;
        let points = (0..g.vertex_count())
            .map(|v| {
                let p = e.point(v);
                [p[0], p[1]]
            })
            .collect();
        Ok(EmbeddingBody {
            n: g.vertex_count(),
            edges: g.edges().to_vec(),
            points,
            d_ratio: e.d_ratio().map_err(|e| e.to_string())?,
            c0: embed::c0_bound(&g).map_err(|e| e.to_string())?,
            lipschitz: e.lipschitz_constant(),
            history,
        })
    };
    match run() {
        Ok(body) => to_json(&body),
        Err(e) => error_json(&e),
    }
}

#[derive(Serialize)]
struct ObstructionRowBody {
    n: usize,
    d_max: usize,
    lambda1: f64,
    c0: f64,
    baseline_fraction: f64,
}

#[derive(Serialize)]
struct ObstructionBody {
    family: String,
    r: u32,
    c_of_r: u32,
    capacity: u64,
    forced_fraction: f64,
    verdict: String,
    rows: Vec<ObstructionRowBody>,
}

/// Family-level averaging obstruction report against the lattice plane,
/// with the spectral baseline candidate per member.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn obstruction_demo(family: &str, min_size: usize, max_size: usize, seed: u64) -> String {
    let run = || -> Result<ObstructionBody, String> {
        let kind = family_kind(family)?;
        if min_size > max_size {
            return Err(format!("empty size range {min_size}..{max_size}"));
        }
        let sizes: Vec<usize> = (min_size..=max_size).collect();
        let fam = ExpanderFamily::generate(kind, &sizes, Some(4), Some(seed))
            .map_err(|e| e.to_string())?;
        let report = coarse::obstruction_bound(&fam, "z2", BaselineMap::Spectral)
            .map_err(|e| e.to_string())?;
        Ok(ObstructionBody {
            family: family.to_string(),
            r: report.geometry.r,
            c_of_r: report.geometry.c_of_r,
            capacity: report.geometry.capacity,
            forced_fraction: report.geometry.forced_fraction,
            verdict: report.verdict.to_string(),
            rows: report
                .rows
                .iter()
                .map(|r| ObstructionRowBody {
                    n: r.n,
                    d_max: r.d_max,
                    lambda1: r.lambda1,
                    c0: r.c0,
                    baseline_fraction: r.baseline_fraction,
                })
                .collect(),
        })
    };
    match run() {
        Ok(body) => to_json(&body),
        Err(e) => error_json(&e),
    }
}
