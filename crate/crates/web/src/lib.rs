//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each export takes plain strings or numbers and returns a JSON string, so
//! the page needs no glue beyond `JSON.parse`. The `*_json` functions hold
//! the logic and run natively in tests.

use posiqubo::anf::{aes_sbox_text, parse_anf, system_to_qubo};
use posiqubo::factor::{factor_pipeline, FactorConfig};
use posiqubo::graph::{
    build_conflict_graph, fix_isolated_vertices, merge_twin_vertices, mwis_bruteforce, realize_graph, reduce_fixpoint,
};
use posiqubo::io;
use posiqubo::{negate_to_posiform, Posiform};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Restarts per candidate in the browser; the CLI default is far larger.
pub const WEB_RESTARTS: usize = 64;

/// Largest `N` the page accepts.
pub const WEB_MAX_N: u32 = 1 << 20;

const G: &str = include_str!("../../core/fixtures/g.poly");

#[derive(Serialize)]
struct Step {
    name: &'static str,
    posiform: String,
    terms: usize,
    live_vars: usize,
    constant: i64,
}

fn step(name: &'static str, phi: &Posiform) -> Step {
    Step {
        name,
        posiform: phi.to_string(),
        terms: phi.len(),
        live_vars: phi.live_vars().len(),
        constant: phi.constant(),
    }
}

pub fn factor_json(n: u32, seed: u32) -> Result<Value, String> {
    if n > WEB_MAX_N {
        return Err(format!("N = {n} is above the demo limit of {WEB_MAX_N}"));
    }
    let config = FactorConfig {
        seed: u64::from(seed),
        restarts: Some(WEB_RESTARTS),
        ..FactorConfig::default()
    };
    let run = factor_pipeline(u64::from(n), &config).map_err(|e| e.to_string())?;
    let r = &run.report;
    let summary = match (r.p, r.q) {
        (Some(p), Some(q)) => format!("{n} = {q} x {p}"),
        _ => format!("{n}: no factors found, best energy {}", r.energy),
    };
    Ok(json!({ "summary": summary, "report": r }))
}

pub fn posiform_chain_json(poly: &str) -> Result<Value, String> {
    let p = io::polynomial_from_json(poly).map_err(|e| e.to_string())?;
    let mut steps = Vec::new();
    let phi = negate_to_posiform(&p).map_err(|e| e.to_string())?;
    steps.push(step("negated", &phi));
    let (fixed, _) = fix_isolated_vertices(&phi).map_err(|e| e.to_string())?;
    steps.push(step("isolated terms fixed", &fixed));
    let (merged, _) = merge_twin_vertices(&fixed).map_err(|e| e.to_string())?;
    steps.push(step("twins merged", &merged));
    let (phi, _) = reduce_fixpoint(&phi).map_err(|e| e.to_string())?;
    steps.push(step("fixpoint", &phi));
    let graph = build_conflict_graph(&phi);
    let (realized, _) = realize_graph(&graph).map_err(|e| e.to_string())?;
    steps.push(step("realized from the conflict graph", &realized));
    let (alpha, set) = mwis_bruteforce(&graph).map_err(|e| e.to_string())?;
    let min = -(phi.constant() + alpha);
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    let weights: Vec<i64> = graph.vertices().iter().map(|v| v.weight).collect();
    Ok(json!({
        "steps": steps,
        "graph": { "weights": weights, "edges": edges, "independent_set": set, "weight": alpha },
        "minimum": min,
    }))
}

pub fn compile_anf_json(text: &str, fixes: &str) -> Result<Value, String> {
    let sys = parse_anf(text).map_err(|e| e.to_string())?;
    let fixes = sys.parse_fixes(fixes).map_err(|e| e.to_string())?;
    let c = system_to_qubo(&sys, &fixes).map_err(|e| e.to_string())?;
    let preview: Vec<String> = c.qubo.to_text().lines().take(12).map(str::to_owned).collect();
    Ok(json!({ "report": c.report, "qubo_preview": preview }))
}

fn finish(v: Result<Value, String>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Factors a small odd `n`; returns `{summary, report}`.
#[wasm_bindgen]
pub fn factor(n: u32, seed: u32) -> Result<String, JsError> {
    finish(factor_json(n, seed))
}

/// Negation and graph reductions of a quadratic polynomial given as JSON.
#[wasm_bindgen]
pub fn posiform_chain(poly: &str) -> Result<String, JsError> {
    finish(posiform_chain_json(poly))
}

/// Compiles ANF equations with optional `name=bit` fixings.
#[wasm_bindgen]
pub fn compile_anf(text: &str, fixes: &str) -> Result<String, JsError> {
    finish(compile_anf_json(text, fixes))
}

/// The factoring-15 polynomial, as the page's default input.
#[wasm_bindgen]
pub fn sample_polynomial() -> String {
    G.to_string()
}

#[wasm_bindgen]
pub fn sample_anf() -> String {
    aes_sbox_text().to_string()
}
