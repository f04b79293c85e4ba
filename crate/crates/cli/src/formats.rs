//! JSON file formats. Every struct round-trips through serde unchanged, and
//! exact values travel as strings.

use serde::{Deserialize, Serialize};
use toricgm::exact_arith::{BigInt, Rat};
use toricgm::mle::CountTable;
use toricgm::model_core::{
    build_graph_matrix, build_loglinear_matrix, Distribution, GeneratorSet, ModelMatrix, StateSpace, UndirectedGraph,
    VariableSpec,
};
use toricgm::poly_engine::{Binomial, TermOrder};
use toricgm::toric::ToricBasis;

use crate::CliError;

/// Cell order of value files: states in lexicographic order, last
/// variable changing fastest.
pub const VALUE_ORDER: &str = "lex-last-fastest";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableEntry {
    pub name: String,
    pub levels: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub variables: Vec<VariableEntry>,
    pub edges: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsFile {
    pub variables: Vec<VariableEntry>,
    pub generators: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRow {
    pub label: String,
    pub entries: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: Vec<MatrixRow>,
    pub columns: Vec<String>,
}

/// Distribution or count table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesFile {
    pub order: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinomialEntry {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub order: String,
    pub binomials: Vec<BinomialEntry>,
}

/// Parses JSON, reporting the file name with serde's line and column.
pub fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::validation(format!("{what}: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn space_of(vars: &[VariableEntry]) -> Result<StateSpace, CliError> {
    Ok(StateSpace::new(vars.iter().map(|v| VariableSpec::new(v.name.clone(), v.levels)).collect())?)
}

fn entries_of(space: &StateSpace) -> Vec<VariableEntry> {
    space.variables().iter().map(|v| VariableEntry { name: v.name.clone(), levels: v.levels }).collect()
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<UndirectedGraph, CliError> {
        Ok(UndirectedGraph::new(space_of(&self.variables)?, &self.edges)?)
    }

    pub fn from_graph(g: &UndirectedGraph) -> Self {
        let edges = g.edges().into_iter().map(|(a, b)| (g.name(a).to_string(), g.name(b).to_string())).collect();
        GraphFile { variables: entries_of(g.space()), edges }
    }
}

impl GeneratorsFile {
    pub fn to_model(&self) -> Result<ModelMatrix, CliError> {
        let space = space_of(&self.variables)?;
        let gens = GeneratorSet::from_names(&space, &self.generators)?;
        Ok(build_loglinear_matrix(&space, &gens)?)
    }
}

impl MatrixFile {
    pub fn to_model(&self) -> Result<ModelMatrix, CliError> {
        let rows = self.rows.iter().map(|r| r.entries.clone()).collect();
        let labels = self.rows.iter().map(|r| r.label.clone()).collect();
        Ok(ModelMatrix::from_raw(rows, labels, self.columns.clone())?)
    }

    pub fn from_model(a: &ModelMatrix) -> Self {
        let rows = (0..a.d())
            .map(|i| MatrixRow { label: a.row_labels()[i].clone(), entries: a.matrix().row(i).to_vec() })
            .collect();
        MatrixFile { rows, columns: a.col_labels().to_vec() }
    }
}

/// A model file of any of the three kinds, told apart by its keys. The
/// graph is kept when there is one.
pub struct LoadedModel {
    pub kind: &'static str,
    pub matrix: ModelMatrix,
    pub graph: Option<UndirectedGraph>,
}

pub fn load_model(what: &str, bytes: &[u8]) -> Result<LoadedModel, CliError> {
    let value: serde_json::Value = parse_json(what, bytes)?;
    let has = |k: &str| value.get(k).is_some();
    if has("rows") {
        let f: MatrixFile = parse_json(what, bytes)?;
        Ok(LoadedModel { kind: "matrix", matrix: f.to_model()?, graph: None })
    } else if has("edges") {
        let g = parse_json::<GraphFile>(what, bytes)?.to_graph()?;
        Ok(LoadedModel { kind: "graph", matrix: build_graph_matrix(&g)?, graph: Some(g) })
    } else if has("generators") {
        let f: GeneratorsFile = parse_json(what, bytes)?;
        Ok(LoadedModel { kind: "generators", matrix: f.to_model()?, graph: None })
    } else {
        Err(CliError::validation(format!("{what}: expected a matrix, graph or generators file")))
    }
}

/// `"3"`, `"1/8"` or a plain decimal such as `"0.125"`.
pub fn parse_value(s: &str) -> Result<Rat, String> {
    let t = s.trim();
    let bad = || format!("`{s}` is not a rational or decimal number");
    if let Some((whole, frac)) = t.split_once('.') {
        let (neg, whole) = match whole.strip_prefix('-') {
            Some(w) => (true, w),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        let digits = |x: &str| x.bytes().all(|b| b.is_ascii_digit());
        if !digits(whole) || !digits(frac) || whole.len() + frac.len() == 0 {
            return Err(bad());
        }
        let num: BigInt = format!("0{whole}{frac}").parse().map_err(|_| bad())?;
        let den = BigInt::from(10).pow(frac.len() as u32);
        let r = Rat::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    t.parse::<Rat>().map_err(|_| bad())
}

impl ValuesFile {
    pub fn from_rats(values: &[Rat]) -> Self {
        ValuesFile { order: VALUE_ORDER.into(), values: values.iter().map(|r| r.to_string()).collect() }
    }

    pub fn from_counts(counts: &[i64]) -> Self {
        ValuesFile { order: VALUE_ORDER.into(), values: counts.iter().map(|c| c.to_string()).collect() }
    }

    fn rats(&self, m: usize) -> Result<Vec<Rat>, CliError> {
        if self.order != VALUE_ORDER {
            return Err(CliError::validation(format!("value order must be \"{VALUE_ORDER}\", got \"{}\"", self.order)));
        }
        if self.values.len() != m {
            return Err(toricgm::Error::DimensionMismatch { expected: m, found: self.values.len() }.into());
        }
        self.values
            .iter()
            .enumerate()
            .map(|(j, s)| parse_value(s).map_err(|e| CliError::validation(format!("value {j}: {e}"))))
            .collect()
    }

    pub fn to_distribution(&self, m: usize) -> Result<Distribution, CliError> {
        Ok(Distribution::new(self.rats(m)?)?)
    }

    pub fn to_counts(&self, m: usize) -> Result<CountTable, CliError> {
        let counts = self
            .rats(m)?
            .into_iter()
            .enumerate()
            .map(|(j, r)| {
                if !r.is_integer() {
                    return Err(CliError::validation(format!("count {j} is not an integer: {r}")));
                }
                r.to_integer().try_into().map_err(|_| CliError::validation(format!("count {j} is too large")))
            })
            .collect::<Result<Vec<i64>, _>>()?;
        Ok(CountTable::new(counts)?)
    }
}

pub fn parse_order(name: &str, m: usize) -> Result<TermOrder, CliError> {
    match name {
        "lex" => Ok(TermOrder::lex(m)),
        "grevlex" => Ok(TermOrder::grevlex(m)),
        other => Err(CliError::validation(format!("unknown term order `{other}`, expected lex or grevlex"))),
    }
}

impl BasisFile {
    pub fn from_basis(basis: &ToricBasis) -> Self {
        let names = basis.matrix().var_names();
        let binomials = basis
            .binomials()
            .iter()
            .map(|b| BinomialEntry { u: b.u().exponents().to_vec(), v: b.v().exponents().to_vec(), text: b.text(&names) })
            .collect();
        BasisFile { order: basis.order().name(), binomials }
    }

    /// Rebuilds the basis over `a`; every binomial is checked against the
    /// kernel of `a`, the text is ignored.
    pub fn to_basis(&self, a: &ModelMatrix) -> Result<ToricBasis, CliError> {
        let order = parse_order(&self.order, a.m())?;
        let binomials = self
            .binomials
            .iter()
            .map(|e| {
                if e.u.len() != a.m() || e.v.len() != a.m() {
                    return Err(toricgm::Error::DimensionMismatch { expected: a.m(), found: e.u.len().max(e.v.len()) }.into());
                }
                Ok(Binomial::from_exponents(e.u.clone(), e.v.clone()))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(ToricBasis::from_parts(a.clone(), binomials, order)?)
    }
}
