//! State spaces, generator sets, graphs and the model matrix `A` with its
//! monomial map.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{rat_to_f64, small_to_int_matrix, IntMatrix, Matrix, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VariableSpec {
    pub name: String,
    pub levels: usize,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, levels: usize) -> Self {
        VariableSpec { name: name.into(), levels }
    }
}

/// Product of the level sets. State `j` is the mixed-radix number whose
/// last digit belongs to the last variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    vars: Vec<VariableSpec>,
}

impl StateSpace {
    pub fn new(vars: Vec<VariableSpec>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.name.clone()) {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
            if v.levels < 2 {
                return Err(Error::TooFewLevels { name: v.name.clone(), levels: v.levels });
            }
        }
        Ok(StateSpace { vars })
    }

    /// `n` binary variables named `X1 .. Xn`.
    pub fn binary(n: usize) -> Self {
        StateSpace { vars: (1..=n).map(|i| VariableSpec::new(format!("X{i}"), 2)).collect() }
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn levels(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.levels).collect()
    }

    /// Number of states `m`.
    pub fn size(&self) -> usize {
        self.vars.iter().map(|v| v.levels).product()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars.iter().position(|v| v.name == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn state(&self, mut j: usize) -> Vec<usize> {
        let mut s = vec![0; self.vars.len()];
        for (k, v) in self.vars.iter().enumerate().rev() {
            s[k] = j % v.levels;
            j /= v.levels;
        }
        s
    }

    pub fn index(&self, state: &[usize]) -> usize {
        assert_eq!(state.len(), self.vars.len(), "state has wrong length");
        state.iter().zip(&self.vars).fold(0, |acc, (&x, v)| {
            assert!(x < v.levels, "level out of range");
            acc * v.levels + x
        })
    }

    /// `0110` style label; comma separated when some variable has more than
    /// ten levels.
    pub fn state_label(&self, j: usize) -> String {
        tuple_label(&self.state(j), self.vars.iter().any(|v| v.levels > 10))
    }

    /// Indeterminate names `p0000, p0001, ...` in state order.
    pub fn state_names(&self) -> Vec<String> {
        (0..self.size()).map(|j| format!("p{}", self.state_label(j))).collect()
    }
}

fn tuple_label(t: &[usize], wide: bool) -> String {
    if wide {
        t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    } else {
        t.iter().map(|x| x.to_string()).collect()
    }
}

/// Generators as sorted variable-index lists, in the order given.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    gens: Vec<Vec<usize>>,
}

impl GeneratorSet {
    pub fn from_indices(space: &StateSpace, gens: Vec<Vec<usize>>) -> Result<Self> {
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(gens.len());
        for mut g in gens {
            if g.is_empty() {
                return Err(Error::EmptyGenerator);
            }
            if let Some(&bad) = g.iter().find(|&&i| i >= space.nvars()) {
                return Err(Error::UnknownVariable(format!("#{bad}")));
            }
            g.sort_unstable();
            g.dedup();
            if out.contains(&g) {
                return Err(Error::DuplicateGenerator(g.iter().map(|&i| space.vars[i].name.clone()).collect()));
            }
            out.push(g);
        }
        Ok(GeneratorSet { gens: out })
    }

    pub fn from_names<S: AsRef<str>>(space: &StateSpace, gens: &[Vec<S>]) -> Result<Self> {
        let idx = gens
            .iter()
            .map(|g| g.iter().map(|n| space.index_of(n.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(space, idx)
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn names(&self, space: &StateSpace) -> Vec<Vec<String>> {
        self.gens.iter().map(|g| g.iter().map(|&i| space.vars[i].name.clone()).collect()).collect()
    }
}

/// Simple undirected graph whose vertices are the variables of a state space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UndirectedGraph {
    space: StateSpace,
    adj: Vec<Vec<bool>>,
}

impl UndirectedGraph {
    pub fn from_index_edges(space: StateSpace, edges: &[(usize, usize)]) -> Result<Self> {
        let n = space.nvars();
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidEdge(format!("endpoint out of range in ({a}, {b})")));
            }
            if a == b {
                return Err(Error::InvalidEdge(format!("loop at {}", space.vars[a].name)));
            }
            if adj[a][b] {
                return Err(Error::InvalidEdge(format!(
                    "duplicate edge {}-{}",
                    space.vars[a].name, space.vars[b].name
                )));
            }
            adj[a][b] = true;
            adj[b][a] = true;
        }
        Ok(UndirectedGraph { space, adj })
    }

    pub fn new<S: AsRef<str>>(space: StateSpace, edges: &[(S, S)]) -> Result<Self> {
        let idx = edges
            .iter()
            .map(|(a, b)| Ok((space.index_of(a.as_ref())?, space.index_of(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_index_edges(space, &idx)
    }

    /// Binary path `X1 - X2 - ... - Xn`.
    pub fn binary_chain(n: usize) -> Self {
        let e: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_index_edges(StateSpace::binary(n), &e).unwrap()
    }

    /// Binary cycle `X1 - X2 - ... - Xn - X1`, `n >= 3`.
    pub fn binary_cycle(n: usize) -> Self {
        let e: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_index_edges(StateSpace::binary(n), &e).unwrap()
    }

    pub fn binary_complete(n: usize) -> Self {
        let e: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::from_index_edges(StateSpace::binary(n), &e).unwrap()
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn nvertices(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.adj.len()).filter(|&w| self.adj[v][w]).collect()
    }

    /// Edges `(a, b)` with `a < b` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.adj.len();
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| self.adj[a][b]).collect()
    }

    pub fn nonedges(&self) -> Vec<(usize, usize)> {
        let n = self.adj.len();
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| !self.adj[a][b]).collect()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.space.vars[v].name
    }
}

/// Maximal cliques, each sorted, listed in lexicographic order.
pub fn cliques(g: &UndirectedGraph) -> GeneratorSet {
    fn expand(g: &UndirectedGraph, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() && x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| (p.iter().filter(|&&v| g.has_edge(u, v)).count(), std::cmp::Reverse(u)))
            .unwrap();
        let mut p = p;
        let mut x = x;
        let cands: Vec<usize> = p.iter().copied().filter(|&v| !g.has_edge(pivot, v)).collect();
        for v in cands {
            r.push(v);
            let np = p.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            let nx = x.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            expand(g, r, np, nx, out);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    if g.nvertices() > 0 {
        expand(g, &mut Vec::new(), (0..g.nvertices()).collect(), Vec::new(), &mut out);
    }
    out.sort();
    GeneratorSet { gens: out }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    LogLinear,
    Graph,
    Raw,
}

/// The `d x m` matrix `A` with labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModelMatrix {
    a: Matrix<i64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    provenance: Provenance,
    space: Option<StateSpace>,
}

impl fmt::Debug for ModelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ModelMatrix {}x{} ({:?})", self.d(), self.m(), self.provenance)?;
        for (i, row) in self.a.row_iter().enumerate() {
            writeln!(f, "{:>16} {:?}", self.row_labels[i], row)?;
        }
        Ok(())
    }
}

impl ModelMatrix {
    /// Validates nonnegativity, label counts and equal column sums.
    pub fn from_raw(rows: Vec<Vec<i64>>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let m = col_labels.len();
        if row_labels.len() != rows.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), found: row_labels.len() });
        }
        for r in &rows {
            if r.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: r.len() });
            }
        }
        let a = Matrix::from_rows(rows, m);
        Self::validated(a, row_labels, col_labels, Provenance::Raw, None)
    }

    fn validated(
        a: Matrix<i64>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        provenance: Provenance,
        space: Option<StateSpace>,
    ) -> Result<Self> {
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let v = *a.get(i, j);
                if v < 0 {
                    return Err(Error::NegativeEntry { row: i, column: j, value: v });
                }
            }
        }
        let sums: Vec<i64> = (0..a.ncols()).map(|j| a.column(j).iter().sum()).collect();
        if let Some(first) = sums.first() {
            if let Some((column, &found)) = sums.iter().enumerate().find(|(_, &s)| s != *first) {
                return Err(Error::ColumnSumsDiffer { first: *first, column, found });
            }
        }
        Ok(ModelMatrix { a, row_labels, col_labels, provenance, space })
    }

    pub fn matrix(&self) -> &Matrix<i64> {
        &self.a
    }

    pub fn int_matrix(&self) -> IntMatrix {
        small_to_int_matrix(&self.a)
    }

    pub fn d(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.a.ncols()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        *self.a.get(i, j)
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.a.column(j)
    }

    /// Row indices where column `j` is positive.
    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.d()).filter(|&i| *self.a.get(i, j) > 0).collect()
    }

    pub fn column_sum(&self) -> i64 {
        if self.m() == 0 {
            0
        } else {
            self.a.column(0).iter().sum()
        }
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn space(&self) -> Option<&StateSpace> {
        self.space.as_ref()
    }

    /// Indeterminate names, `p` followed by the column label.
    pub fn var_names(&self) -> Vec<String> {
        self.col_labels.iter().map(|c| format!("p{c}")).collect()
    }

    pub fn is_binary(&self) -> bool {
        (0..self.d()).all(|i| (0..self.m()).all(|j| matches!(*self.a.get(i, j), 0 | 1)))
    }

    /// `A * v` for an integer vector.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.m(), "vector has wrong length");
        self.a.row_iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Whether `A u = A v`.
    pub fn same_image(&self, u: &[u32], v: &[u32]) -> bool {
        let d: Vec<i64> = u.iter().zip(v).map(|(&a, &b)| a as i64 - b as i64).collect();
        self.apply(&d).iter().all(|&x| x == 0)
    }

    /// Columns `cols` and rows `rows` of `A`, as a raw matrix. Column sums of
    /// the result must still agree.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let a = self.a.select_rows(rows).select_columns(cols);
        Self::validated(
            a,
            rows.iter().map(|&i| self.row_labels[i].clone()).collect(),
            cols.iter().map(|&j| self.col_labels[j].clone()).collect(),
            Provenance::Raw,
            None,
        )
    }
}

pub fn build_loglinear_matrix(space: &StateSpace, gens: &GeneratorSet) -> Result<ModelMatrix> {
    build(space, gens, Provenance::LogLinear)
}

fn build(space: &StateSpace, gens: &GeneratorSet, provenance: Provenance) -> Result<ModelMatrix> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerator);
    }
    let m = space.size();
    let wide = space.vars.iter().any(|v| v.levels > 10);
    let states: Vec<Vec<usize>> = (0..m).map(|j| space.state(j)).collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for g in &gens.gens {
        let sub = StateSpace { vars: g.iter().map(|&i| space.vars[i].clone()).collect() };
        let names: Vec<&str> = g.iter().map(|&i| space.vars[i].name.as_str()).collect();
        for k in 0..sub.size() {
            let t = sub.state(k);
            labels.push(format!("{{{}}}={}", names.join(","), tuple_label(&t, wide)));
            rows.push(
                states
                    .iter()
                    .map(|s| i64::from(g.iter().zip(&t).all(|(&v, &l)| s[v] == l)))
                    .collect::<Vec<i64>>(),
            );
        }
    }
    let cols = (0..m).map(|j| space.state_label(j)).collect();
    ModelMatrix::validated(Matrix::from_rows(rows, m), labels, cols, provenance, Some(space.clone()))
}

pub fn build_graph_matrix(g: &UndirectedGraph) -> Result<ModelMatrix> {
    build(g.space(), &cliques(g), Provenance::Graph)
}

/// Exact nonnegative vector over the states; not normalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Distribution {
    values: Vec<Rat>,
}

impl Distribution {
    pub fn new(values: Vec<Rat>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::NegativeValue(i));
        }
        Ok(Distribution { values })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Rat::from_integer(v.into())).collect())
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&j| !self.values[j].is_zero()).collect()
    }

    pub fn total(&self) -> Rat {
        self.values.iter().fold(Rat::zero(), |a, b| a + b)
    }

    /// Divides by the total; unchanged when the total is zero.
    pub fn normalized(&self) -> Self {
        let t = self.total();
        if t.is_zero() {
            return self.clone();
        }
        Distribution { values: self.values.iter().map(|v| v / &t).collect() }
    }

    pub fn scaled(&self, lambda: &Rat) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * lambda).collect())
    }

    pub fn to_numeric(&self) -> NumericDistribution {
        NumericDistribution {
            values: self.values.iter().map(rat_to_f64).collect(),
        }
    }
}

/// Floating-point counterpart of [`Distribution`].
#[derive(Clone, Debug, PartialEq)]
pub struct NumericDistribution {
    values: Vec<f64>,
}

impl NumericDistribution {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::NegativeValue(i));
        }
        Ok(NumericDistribution { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn normalized(&self) -> Self {
        let t = self.total();
        if t == 0.0 {
            return self.clone();
        }
        NumericDistribution { values: self.values.iter().map(|v| v / t).collect() }
    }

    /// Indices whose value exceeds `threshold`.
    pub fn support_above(&self, threshold: f64) -> Vec<usize> {
        (0..self.values.len()).filter(|&j| self.values[j] > threshold).collect()
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.values.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `p_j = prod_i t_i^{a_ij}` with `0^0 = 1`.
pub fn monomial_map(a: &ModelMatrix, t: &[Rat]) -> Result<Distribution> {
    if t.len() != a.d() {
        return Err(Error::DimensionMismatch { expected: a.d(), found: t.len() });
    }
    if let Some(i) = t.iter().position(|v| v.is_negative()) {
        return Err(Error::NegativeValue(i));
    }
    let values = (0..a.m())
        .map(|j| {
            (0..a.d()).fold(Rat::one(), |acc, i| match a.entry(i, j) {
                0 => acc,
                e => acc * num_traits::pow(t[i].clone(), e as usize),
            })
        })
        .collect();
    Distribution::new(values)
}

pub fn monomial_map_f64(a: &ModelMatrix, t: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), a.d(), "parameter vector has wrong length");
    (0..a.m())
        .map(|j| {
            (0..a.d()).fold(1.0, |acc, i| match a.entry(i, j) {
                0 => acc,
                e => acc * t[i].powi(e as i32),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    const EXAMPLE_2: [[i64; 8]; 12] = [
        [1, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 1],
        [1, 0, 0, 0, 1, 0, 0, 0],
        [0, 1, 0, 0, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 0, 1, 0],
        [0, 0, 0, 1, 0, 0, 0, 1],
        [1, 0, 1, 0, 0, 0, 0, 0],
        [0, 1, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 1, 0],
        [0, 0, 0, 0, 0, 1, 0, 1],
    ];

    fn no_three_way() -> ModelMatrix {
        let s = StateSpace::binary(3);
        let g = GeneratorSet::from_names(&s, &[vec!["X1", "X2"], vec!["X2", "X3"], vec!["X1", "X3"]]).unwrap();
        build_loglinear_matrix(&s, &g).unwrap()
    }

    #[test]
    fn no_three_way_interaction_matrix() {
        let a = no_three_way();
        assert_eq!(a.matrix().to_rows(), EXAMPLE_2.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        assert_eq!(a.row_labels()[0], "{X1,X2}=00");
        assert_eq!(a.col_labels()[5], "101");
        assert_eq!(a.column_sum(), 3);
    }

    #[test]
    fn chain_matrix_is_first_eight_rows() {
        let a = build_graph_matrix(&UndirectedGraph::binary_chain(3)).unwrap();
        let rows = a.matrix().to_rows();
        assert_eq!(rows.len(), 8);
        for (r, e) in rows.iter().zip(EXAMPLE_2.iter()) {
            assert_eq!(r.as_slice(), e.as_slice());
        }
    }

    #[test]
    fn saturated_generator_gives_identity() {
        let s = StateSpace::binary(3);
        let g = GeneratorSet::from_indices(&s, vec![vec![0, 1, 2]]).unwrap();
        let a = build_loglinear_matrix(&s, &g).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(a.entry(i, j), i64::from(i == j));
            }
        }
    }

    #[test]
    fn clique_enumeration() {
        let c3 = cliques(&UndirectedGraph::binary_chain(3));
        assert_eq!(c3.generators(), &[vec![0, 1], vec![1, 2]]);
        let c4 = cliques(&UndirectedGraph::binary_cycle(4));
        assert_eq!(c4.generators(), &[vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]]);
        let k3 = cliques(&UndirectedGraph::binary_complete(3));
        assert_eq!(k3.generators(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn four_cycle_rows_in_printed_generator_order() {
        let s = StateSpace::binary(4);
        let g = GeneratorSet::from_names(
            &s,
            &[vec!["X1", "X2"], vec!["X2", "X3"], vec!["X3", "X4"], vec!["X1", "X4"]],
        )
        .unwrap();
        let a = build_loglinear_matrix(&s, &g).unwrap();
        // rows 9..12 (psi_{3,4}) and 13..16 (psi_{1,4}) as printed
        let r = a.matrix().to_rows();
        assert_eq!(r[8], vec![1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(r[12], vec![1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(r[15], vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1]);
        let graph = build_graph_matrix(&UndirectedGraph::binary_cycle(4)).unwrap();
        let mut gr = graph.matrix().to_rows();
        let mut rr = r.clone();
        gr.sort();
        rr.sort();
        assert_eq!(gr, rr);
    }

    #[test]
    fn monomial_map_matches_symbolic_parametrization() {
        // distinct primes as parameters make each product identify its factors
        let primes = [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
        let t: Vec<Rat> = primes.iter().map(|&p| Rat::from_integer(p.into())).collect();
        let p = monomial_map(&no_three_way(), &t).unwrap();
        let expect = [(1, 5, 9), (1, 6, 10), (2, 7, 9), (2, 8, 10), (3, 5, 11), (3, 6, 12), (4, 7, 11), (4, 8, 12)];
        for (j, (a, b, c)) in expect.iter().enumerate() {
            let v = primes[a - 1] * primes[b - 1] * primes[c - 1];
            assert_eq!(p.values()[j], Rat::from_integer(v.into()));
        }
        let ones = monomial_map(&no_three_way(), &vec![Rat::one(); 12]).unwrap();
        assert!(ones.values().iter().all(|v| v.is_one()));
    }

    #[test]
    fn validation_errors() {
        let e = ModelMatrix::from_raw(vec![vec![1, 2]], names(&["r"]), names(&["a", "b"])).unwrap_err();
        assert!(e.to_string().contains("column sums differ"));
        let e = ModelMatrix::from_raw(vec![vec![-1, -1]], names(&["r"]), names(&["a", "b"])).unwrap_err();
        assert!(matches!(e, Error::NegativeEntry { .. }));
        let s = StateSpace::binary(2);
        assert!(GeneratorSet::from_names(&s, &[vec!["X9"]]).is_err());
        assert!(GeneratorSet::from_indices(&s, vec![vec![]]).is_err());
        assert!(UndirectedGraph::new(s.clone(), &[("X1", "X1")]).is_err());
        assert!(UndirectedGraph::new(s, &[("X1", "X2"), ("X2", "X1")]).is_err());
        assert!(StateSpace::new(vec![VariableSpec::new("A", 1)]).is_err());
    }

    #[test]
    fn mixed_radix_states() {
        let s = StateSpace::new(vec![VariableSpec::new("A", 3), VariableSpec::new("B", 2)]).unwrap();
        assert_eq!(s.size(), 6);
        assert_eq!(s.state(3), vec![1, 1]);
        assert_eq!(s.index(&[2, 0]), 4);
        assert_eq!(s.state_names()[5], "p21");
    }

    fn random_graph() -> impl Strategy<Value = UndirectedGraph> {
        (2usize..6).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
                let e: Vec<(usize, usize)> = pairs.into_iter().zip(bits).filter(|(_, b)| *b).map(|(p, _)| p).collect();
                UndirectedGraph::from_index_edges(StateSpace::binary(n), &e).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn cliques_are_exactly_the_maximal_complete_sets(g in random_graph()) {
            let n = g.nvertices();
            let complete = |s: &[usize]| s.iter().all(|&a| s.iter().all(|&b| a == b || g.has_edge(a, b)));
            let mut brute: Vec<Vec<usize>> = Vec::new();
            for mask in 1u32..(1 << n) {
                let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                if !complete(&s) { continue; }
                let maximal = (0..n).all(|v| s.contains(&v) || !s.iter().all(|&a| g.has_edge(a, v)));
                if maximal { brute.push(s); }
            }
            brute.sort();
            prop_assert_eq!(cliques(&g).generators().to_vec(), brute);
        }

        #[test]
        fn graph_matrices_have_equal_column_sums(g in random_graph()) {
            let a = build_graph_matrix(&g).unwrap();
            prop_assert!(a.is_binary());
            prop_assert_eq!(a.column_sum() as usize, cliques(&g).len());
        }
    }
}
