//! WebAssembly entry points for the browser page in `www/`. Graphs are typed
//! as edge lists such as `X1-X2 X2-X3 X3-X4 X4-X1` over binary variables;
//! every entry point returns a JSON string, with an `error` field on bad
//! input.

use serde::Serialize;
use toricgm::exact_arith::Rat;
use toricgm::factorization::{classify, Evidence};
use toricgm::graph_analysis::{chordless_cycle, is_chordal};
use toricgm::markov_ci::graph_toric_basis;
use toricgm::mle::{ips_fit, CountTable, DEFAULT_IPS_MAX_CYCLES, DEFAULT_IPS_TOL};
use toricgm::model_core::{build_graph_matrix, cliques, Distribution, StateSpace, UndirectedGraph, VariableSpec};
use toricgm::poly_engine::TermOrder;
use wasm_bindgen::prelude::wasm_bindgen;

/// Larger graphs make the basis computation too slow for a page.
pub const MAX_VERTICES: usize = 5;

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    }
    .expect("plain data serializes")
}

/// Vertices in order of first appearance; a bare name adds an isolated
/// vertex.
pub fn parse_graph(text: &str) -> Result<UndirectedGraph, String> {
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let vertex = |n: &str, names: &mut Vec<String>| -> Result<usize, String> {
        if n.is_empty() {
            return Err(format!("empty vertex name in `{text}`"));
        }
        Ok(names.iter().position(|x| x == n).unwrap_or_else(|| {
            names.push(n.to_string());
            names.len() - 1
        }))
    };
    for token in text.split(|c: char| c.is_whitespace() || c == ',' || c == ';').filter(|t| !t.is_empty()) {
        match token.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (vertex(a, &mut names)?, vertex(b, &mut names)?);
                edges.push((a, b));
            }
            None => {
                vertex(token, &mut names)?;
            }
        }
    }
    if names.is_empty() {
        return Err("no vertices".into());
    }
    if names.len() > MAX_VERTICES {
        return Err(format!("{} vertices; the demo handles at most {MAX_VERTICES}", names.len()));
    }
    let space = StateSpace::new(names.into_iter().map(|n| VariableSpec::new(n, 2)).collect()).map_err(|e| e.to_string())?;
    UndirectedGraph::from_index_edges(space, &edges).map_err(|e| e.to_string())
}

fn parse_numbers(text: &str) -> Vec<&str> {
    text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect()
}

#[derive(Serialize)]
pub struct GraphReport {
    pub chordal: bool,
    pub chordless_cycle: Option<Vec<String>>,
    pub cliques: Vec<Vec<String>>,
    pub cells: Vec<String>,
    pub basis: Vec<String>,
    pub max_degree: u64,
}

pub fn analyze(text: &str) -> Result<GraphReport, String> {
    let g = parse_graph(text)?;
    let names = |vs: &[usize]| vs.iter().map(|&v| g.name(v).to_string()).collect::<Vec<_>>();
    let a = build_graph_matrix(&g).map_err(|e| e.to_string())?;
    let basis = graph_toric_basis(&g, &TermOrder::grevlex(a.m())).map_err(|e| e.to_string())?;
    Ok(GraphReport {
        chordal: is_chordal(&g).0,
        chordless_cycle: chordless_cycle(&g).map(|c| names(&c)),
        cliques: cliques(&g).names(g.space()),
        cells: a.col_labels().to_vec(),
        basis: basis.texts(),
        max_degree: basis.binomials().iter().map(|b| b.degree()).max().unwrap_or(0),
    })
}

#[derive(Serialize)]
pub struct CheckReport {
    pub verdict: String,
    pub detail: String,
}

pub fn check(graph: &str, values: &str) -> Result<CheckReport, String> {
    let g = parse_graph(graph)?;
    let a = build_graph_matrix(&g).map_err(|e| e.to_string())?;
    let vals = parse_numbers(values);
    if vals.len() != a.m() {
        return Err(format!("expected {} values, got {}", a.m(), vals.len()));
    }
    let vals = vals.iter().map(|s| s.parse::<Rat>().map_err(|_| format!("`{s}` is not a fraction"))).collect::<Result<Vec<_>, _>>()?;
    let p = Distribution::new(vals).map_err(|e| e.to_string())?;
    let basis = graph_toric_basis(&g, &TermOrder::grevlex(a.m())).map_err(|e| e.to_string())?;
    let v = classify(&a, &basis, &p);
    let detail = match v.evidence {
        Evidence::None => "on the toric variety with A-feasible support".to_string(),
        Evidence::InfeasibleColumn { column, .. } => {
            format!("on the toric variety, but cell {} is forced positive by the support", a.col_labels()[column])
        }
        Evidence::FailedBinomial { binomial, value, .. } => {
            format!("{} evaluates to {value}", binomial.text(&a.var_names()))
        }
    };
    Ok(CheckReport { verdict: v.kind.as_str().into(), detail })
}

#[derive(Serialize)]
pub struct FitReport {
    pub cells: Vec<String>,
    pub fitted: Vec<f64>,
    pub cycles: usize,
}

pub fn fit(graph: &str, counts: &str) -> Result<FitReport, String> {
    let g = parse_graph(graph)?;
    let a = build_graph_matrix(&g).map_err(|e| e.to_string())?;
    let counts = parse_numbers(counts)
        .iter()
        .map(|s| s.parse::<i64>().map_err(|_| format!("`{s}` is not a count")))
        .collect::<Result<Vec<_>, _>>()?;
    if counts.len() != a.m() {
        return Err(format!("expected {} counts, got {}", a.m(), counts.len()));
    }
    let n = CountTable::new(counts).map_err(|e| e.to_string())?;
    let f = ips_fit(&a, &n, DEFAULT_IPS_TOL, DEFAULT_IPS_MAX_CYCLES).map_err(|e| e.to_string())?;
    Ok(FitReport { cells: a.col_labels().to_vec(), fitted: f.fitted, cycles: f.cycles })
}

/// Chordality, cliques and Markov basis of the graph.
#[wasm_bindgen]
pub fn markov_basis(graph: &str) -> String {
    respond(analyze(graph))
}

/// Verdict for a distribution given as space-separated fractions in cell
/// order.
#[wasm_bindgen]
pub fn classify_distribution(graph: &str, values: &str) -> String {
    respond(check(graph, values))
}

/// Iterative proportional scaling fit of a count table.
#[wasm_bindgen]
pub fn ips(graph: &str, counts: &str) -> String {
    respond(fit(graph, counts))
}
