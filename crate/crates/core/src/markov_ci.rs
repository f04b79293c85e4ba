//! Conditional independence as polynomial algebra: CPDs and CPRs, pairwise
//! and global Markov ideals, and constructions that separate the Markov
//! varieties from the toric variety of a graph.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{Matrix, Rat};
use crate::graph_analysis::{saturated_separations, validate_partition, NondecomposablePartition};
use crate::model_core::{build_graph_matrix, Distribution, StateSpace, UndirectedGraph};
use crate::poly_engine::{Binomial, Monomial, Polynomial, TermOrder};
use crate::toric::{compute_toric_basis, ToricBasis};

/// Largest `n` accepted by [`prop2_binomial`]; the binomial has degree `2^n`
/// in `4^n` indeterminates.
pub const PARITY_BINOMIAL_CAP: usize = 6;

/// The statement `X ⊥ Y | Z` over variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CIStatement {
    x: Vec<usize>,
    y: Vec<usize>,
    z: Vec<usize>,
}

impl CIStatement {
    /// Sorts each set; rejects empty `X` or `Y`, overlaps and unknown indices.
    pub fn new(space: &StateSpace, mut x: Vec<usize>, mut y: Vec<usize>, mut z: Vec<usize>) -> Result<Self> {
        for s in [&mut x, &mut y, &mut z] {
            s.sort_unstable();
        }
        if x.is_empty() || y.is_empty() {
            return Err(Error::OutOfRange("independence statement with an empty side".into()));
        }
        let mut seen = vec![false; space.nvars()];
        for &v in x.iter().chain(&y).chain(&z) {
            if v >= space.nvars() {
                return Err(Error::OutOfRange(format!("variable index {v}")));
            }
            if seen[v] {
                return Err(Error::OutOfRange(format!("variable index {v} appears twice")));
            }
            seen[v] = true;
        }
        Ok(CIStatement { x, y, z })
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn z(&self) -> &[usize] {
        &self.z
    }

    /// Whether the statement mentions every variable.
    pub fn is_saturated(&self, nvars: usize) -> bool {
        self.x.len() + self.y.len() + self.z.len() == nvars
    }

    pub fn text(&self, space: &StateSpace) -> String {
        let names = |s: &[usize]| {
            let v: Vec<&str> = s.iter().map(|&i| space.variables()[i].name.as_str()).collect();
            format!("{{{}}}", v.join(","))
        };
        format!("{} _||_ {} | {}", names(&self.x), names(&self.y), names(&self.z))
    }
}

/// One CPD: level tuples `x != x2` over `X`, `y != y2` over `Y` and `z`
/// over `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CpdSpec {
    pub stmt: CIStatement,
    pub x: Vec<usize>,
    pub x2: Vec<usize>,
    pub y: Vec<usize>,
    pub y2: Vec<usize>,
    pub z: Vec<usize>,
}

impl CpdSpec {
    pub fn new(
        space: &StateSpace,
        stmt: CIStatement,
        x: Vec<usize>,
        x2: Vec<usize>,
        y: Vec<usize>,
        y2: Vec<usize>,
        z: Vec<usize>,
    ) -> Result<Self> {
        let levels = space.levels();
        let fits = |vars: &[usize], t: &[usize]| {
            vars.len() == t.len() && vars.iter().zip(t).all(|(&v, &l)| l < levels[v])
        };
        if !(fits(&stmt.x, &x) && fits(&stmt.x, &x2) && fits(&stmt.y, &y) && fits(&stmt.y, &y2) && fits(&stmt.z, &z))
        {
            return Err(Error::OutOfRange("level tuple does not match the variable arities".into()));
        }
        if x == x2 || y == y2 {
            return Err(Error::OutOfRange("CPD needs distinct x and distinct y tuples".into()));
        }
        Ok(CpdSpec { stmt, x, x2, y, y2, z })
    }
}

/// All level tuples over `vars`, lexicographic with the last fastest.
fn tuples(space: &StateSpace, vars: &[usize]) -> Vec<Vec<usize>> {
    let levels = space.levels();
    let mut out = vec![Vec::new()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..levels[v]).map(move |l| {
                    let mut t = t.clone();
                    t.push(l);
                    t
                })
            })
            .collect();
    }
    out
}

/// Every CPD of the statement up to sign: `x < x2` and `y < y2`.
pub fn cpd_specs(stmt: &CIStatement, space: &StateSpace) -> Vec<CpdSpec> {
    let xs = tuples(space, &stmt.x);
    let ys = tuples(space, &stmt.y);
    let zs = tuples(space, &stmt.z);
    let mut out = Vec::new();
    for z in &zs {
        for (i, x) in xs.iter().enumerate() {
            for x2 in &xs[i + 1..] {
                for (j, y) in ys.iter().enumerate() {
                    for y2 in &ys[j + 1..] {
                        out.push(CpdSpec {
                            stmt: stmt.clone(),
                            x: x.clone(),
                            x2: x2.clone(),
                            y: y.clone(),
                            y2: y2.clone(),
                            z: z.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Cells whose restriction to `X, Y, Z` is `(x, y, z)`.
fn marginal_cells(space: &StateSpace, stmt: &CIStatement, x: &[usize], y: &[usize], z: &[usize]) -> Vec<usize> {
    (0..space.size())
        .filter(|&j| {
            let s = space.state(j);
            let agree = |vars: &[usize], t: &[usize]| vars.iter().zip(t).all(|(&v, &l)| s[v] == l);
            agree(&stmt.x, x) && agree(&stmt.y, y) && agree(&stmt.z, z)
        })
        .collect()
}

/// The marginal `P(x, y, z)` as a linear form.
fn marginal_form(
    space: &StateSpace,
    stmt: &CIStatement,
    x: &[usize],
    y: &[usize],
    z: &[usize],
    order: &TermOrder,
) -> Polynomial {
    let m = space.size();
    let terms = marginal_cells(space, stmt, x, y, z)
        .into_iter()
        .map(|j| {
            let mut e = vec![0; m];
            e[j] = 1;
            (Rat::one(), Monomial::new(e))
        })
        .collect();
    Polynomial::new(m, terms, order)
}

/// `P(x,y,z) P(x2,y2,z) - P(x2,y,z) P(x,y2,z)` under grevlex.
pub fn cpd_polynomial(spec: &CpdSpec, space: &StateSpace) -> Polynomial {
    let order = TermOrder::grevlex(space.size());
    let s = &spec.stmt;
    let f = |x: &[usize], y: &[usize]| marginal_form(space, s, x, y, &spec.z, &order);
    let left = f(&spec.x, &spec.y).mul(&f(&spec.x2, &spec.y2), &order);
    let right = f(&spec.x2, &spec.y).mul(&f(&spec.x, &spec.y2), &order);
    left.sub(&right, &order)
}

/// The quadratic polynomials of a statement, one per CPD up to sign and
/// duplicates. For saturated statements these are binomials.
pub fn cpd_polynomials(stmt: &CIStatement, space: &StateSpace) -> Vec<Polynomial> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for spec in cpd_specs(stmt, space) {
        let p = cpd_polynomial(&spec, space);
        if p.is_zero() {
            continue;
        }
        // Sign-normalized term list; the leading coefficient is +1 or -1.
        let p = if p.lead_coeff().unwrap() < &Rat::zero() { p.neg() } else { p };
        let key: Vec<(Rat, Vec<u32>)> = p.terms().iter().map(|(c, m)| (c.clone(), m.exponents().to_vec())).collect();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

/// Binomials of a saturated statement in canonical grevlex form, sorted.
pub fn cpd_binomials(stmt: &CIStatement, space: &StateSpace) -> Result<Vec<Binomial>> {
    if !stmt.is_saturated(space.nvars()) {
        return Err(Error::OutOfRange("statement does not mention every variable".into()));
    }
    let order = TermOrder::grevlex(space.size());
    let mut out: Vec<Binomial> = cpd_polynomials(stmt, space)
        .iter()
        .map(|p| p.as_binomial().expect("saturated CPD is a binomial").canonical(&order))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn union_canonical(parts: impl IntoIterator<Item = Vec<Binomial>>) -> Vec<Binomial> {
    let mut out: Vec<Binomial> = parts.into_iter().flatten().collect();
    out.sort();
    out.dedup();
    out
}

/// Generators of the pairwise Markov ideal: `Xa ⊥ Xb | rest` for each
/// nonedge `{a, b}`.
pub fn pairwise_ideal(g: &UndirectedGraph) -> Vec<Binomial> {
    let space = g.space();
    let n = g.nvertices();
    union_canonical(g.nonedges().into_iter().map(|(a, b)| {
        let rest = (0..n).filter(|&v| v != a && v != b).collect();
        let stmt = CIStatement::new(space, vec![a], vec![b], rest).expect("nonedge statement is valid");
        cpd_binomials(&stmt, space).expect("nonedge statement is saturated")
    }))
}

/// Generators of the global Markov ideal from every saturated separation.
pub fn global_ideal(g: &UndirectedGraph) -> Result<Vec<Binomial>> {
    let space = g.space();
    let seps = saturated_separations(g)?;
    Ok(union_canonical(seps.into_iter().map(|s| {
        let stmt = CIStatement::new(space, s.x, s.y, s.z).expect("separation statement is valid");
        cpd_binomials(&stmt, space).expect("separation statement is saturated")
    })))
}

fn marginal_value(p: &Distribution, cells: &[usize]) -> Rat {
    cells.iter().fold(Rat::zero(), |acc, &j| acc + &p.values()[j])
}

/// The cross-product ratio `P(x,y,z) P(x2,y2,z) / (P(x2,y,z) P(x,y2,z))`,
/// absent when the denominator vanishes.
pub fn cpr(p: &Distribution, space: &StateSpace, spec: &CpdSpec) -> Option<Rat> {
    assert_eq!(p.len(), space.size(), "distribution does not match the state space");
    let s = &spec.stmt;
    let f = |x: &[usize], y: &[usize]| marginal_value(p, &marginal_cells(space, s, x, y, &spec.z));
    let den = f(&spec.x2, &spec.y) * f(&spec.x, &spec.y2);
    if den.is_zero() {
        return None;
    }
    Some(f(&spec.x, &spec.y) * f(&spec.x2, &spec.y2) / den)
}

/// Whether every `u - v` of the basis is an integer combination of the
/// pairwise exponent vectors.
pub fn hc_zspan_check(basis: &ToricBasis, pairwise: &[Binomial]) -> bool {
    let m = basis.matrix().m();
    let rows: Vec<Vec<BigInt>> =
        pairwise.iter().map(|b| b.difference().into_iter().map(BigInt::from).collect()).collect();
    let lattice = Matrix::from_rows(rows, m);
    basis.binomials().iter().all(|b| {
        let w: Vec<BigInt> = b.difference().into_iter().map(BigInt::from).collect();
        crate::exact_arith::smith_lattice_member(&w, &lattice)
    })
}

/// Toric basis of a graph model, seeded with its pairwise binomials.
pub fn graph_toric_basis(g: &UndirectedGraph, order: &TermOrder) -> Result<ToricBasis> {
    let a = build_graph_matrix(g)?;
    compute_toric_basis(&a, order, Some(&pairwise_ideal(g)))
}

/// The graph on `2n` binary variables missing only the edges
/// `{X_i, X_{i+n}}`, with the parity binomial of degree `2^n` in its toric
/// ideal.
pub fn prop2_binomial(n: usize) -> Result<(UndirectedGraph, Binomial)> {
    prop2_binomial_capped(n, PARITY_BINOMIAL_CAP)
}

pub fn prop2_binomial_capped(n: usize, cap: usize) -> Result<(UndirectedGraph, Binomial)> {
    if n == 0 || n > cap {
        return Err(Error::OutOfRange(format!("n = {n} is outside 1..={cap}")));
    }
    let k = 2 * n;
    let edges: Vec<(usize, usize)> =
        (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).filter(|&(a, b)| b != a + n).collect();
    let g = UndirectedGraph::from_index_edges(StateSpace::binary(k), &edges)?;
    let m = g.space().size();
    let mut u = vec![0u32; m];
    let mut v = vec![0u32; m];
    for j in 0..m {
        let s = g.space().state(j);
        // 0-based even positions are the odd-numbered variables.
        if (0..k).step_by(2).any(|i| s[i] != s[0]) {
            continue;
        }
        let parity = (1..k).step_by(2).map(|i| s[i]).sum::<usize>() % 2;
        if parity == s[0] {
            u[j] = 1;
        } else {
            v[j] = 1;
        }
    }
    let b = Binomial::from_exponents(u, v);
    let a = build_graph_matrix(&g)?;
    if !a.same_image(b.u(), b.v()) {
        return Err(Error::NotInKernel(b.text(&a.var_names())));
    }
    Ok((g, b))
}

/// Block roles `[A, B, C, D]` reordered so that `A` neighbours `B` and `D`.
fn ring_roles(g: &UndirectedGraph, part: &NondecomposablePartition) -> [usize; 4] {
    let block = part.block_of(g.nvertices());
    let mut touches = [[false; 5]; 5];
    for (a, b) in g.edges() {
        touches[block[a]][block[b]] = true;
        touches[block[b]][block[a]] = true;
    }
    let nbrs: Vec<usize> = (1..4).filter(|&k| touches[0][k]).collect();
    let far = (1..4).find(|k| !nbrs.contains(k)).expect("A has exactly two neighbouring blocks");
    [0, nbrs[0], far, nbrs[1]]
}

/// Block-constant state: role `r` variables at `levels[r]`, `E` at `levels[4]`.
fn block_state(g: &UndirectedGraph, part: &NondecomposablePartition, roles: &[usize; 4], levels: [usize; 5]) -> usize {
    let block = part.block_of(g.nvertices());
    let mut level_of_block = [levels[4]; 5];
    for (r, &blk) in roles.iter().enumerate() {
        level_of_block[blk] = levels[r];
    }
    let s: Vec<usize> = block.iter().map(|&b| level_of_block[b]).collect();
    g.space().index(&s)
}

fn digits(code: &str) -> [usize; 5] {
    let mut out = [0; 5];
    for (o, c) in out.iter_mut().zip(code.bytes()) {
        *o = (c - b'0') as usize;
    }
    out
}

/// Distribution that satisfies every quadratic binomial of the graph's
/// toric ideal but not the returned quartic one, lifted from the four-cycle
/// along the partition.
pub fn lift_ci_counterexample(
    g: &UndirectedGraph,
    part: &NondecomposablePartition,
) -> Result<(Distribution, Binomial)> {
    validate_partition(g, part)?;
    let roles = ring_roles(g, part);
    let m = g.space().size();
    let cell = |code: &str| block_state(g, part, &roles, digits(code));
    let mut values = vec![Rat::zero(); m];
    for code in ["01001", "01111", "10011", "10101"] {
        values[cell(code)] = Rat::new(1.into(), 4.into());
    }
    let side = |codes: [&str; 4]| {
        let mut e = vec![0u32; m];
        for c in codes {
            e[cell(c)] += 1;
        }
        e
    };
    let witness = Binomial::from_exponents(side(["01001", "01111", "10011", "10101"]), side(["01011", "01101", "10001", "10111"]));
    let a = build_graph_matrix(g)?;
    if !a.same_image(witness.u(), witness.v()) {
        return Err(Error::NotInKernel(witness.text(&a.var_names())));
    }
    Ok((Distribution::new(values)?, witness))
}

/// Exponent of `n` in the unnormalized weight of each cell under the
/// pairwise potentials of the limit construction.
fn limit_exponents(g: &UndirectedGraph, part: &NondecomposablePartition) -> Vec<i64> {
    let roles = ring_roles(g, part);
    let block = part.block_of(g.nvertices());
    let mut role_of = vec![4usize; g.nvertices()];
    for (v, &b) in block.iter().enumerate() {
        if let Some(r) = roles.iter().position(|&x| x == b) {
            role_of[v] = r;
        }
    }
    let space = g.space();
    let edges = g.edges();
    (0..space.size())
        .map(|j| {
            let s = space.state(j);
            let mut e = 0i64;
            for &(a, b) in &edges {
                let (mut p, mut q) = (a, b);
                if role_of[p] > role_of[q] {
                    std::mem::swap(&mut p, &mut q);
                }
                let (rp, rq) = (role_of[p], role_of[q]);
                let (x, y) = (s[p] as i64, s[q] as i64);
                if rp == 4 || rq == 4 || x > 1 || y > 1 {
                    continue;
                }
                e += match (rp, rq) {
                    _ if rp == rq => i64::from(x == y),
                    (0, 1) | (1, 2) => x * y - y,
                    (2, 3) => x * y,
                    (0, 3) => -x * y,
                    _ => unreachable!("chordless ring has no edge between opposite blocks"),
                };
            }
            e
        })
        .collect()
}

/// Normalized distribution of the pairwise potentials with parameter `n`;
/// it factors according to `g`, and its `n -> ∞` limit does not.
pub fn lift_limit_potentials(g: &UndirectedGraph, part: &NondecomposablePartition, n: u64) -> Result<Distribution> {
    validate_partition(g, part)?;
    if n == 0 {
        return Err(Error::OutOfRange("potential parameter must be at least 1".into()));
    }
    let base = Rat::from_integer(BigInt::from(n));
    let weights: Vec<Rat> = limit_exponents(g, part)
        .into_iter()
        .map(|e| {
            let w = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
            if e < 0 { w.recip() } else { w }
        })
        .collect();
    Ok(Distribution::new(weights)?.normalized())
}

/// Support of the `n -> ∞` limit: the cells of maximal exponent.
pub fn lift_limit_support(g: &UndirectedGraph, part: &NondecomposablePartition) -> Result<Vec<usize>> {
    validate_partition(g, part)?;
    let e = limit_exponents(g, part);
    let top = *e.iter().max().expect("state space is nonempty");
    Ok((0..e.len()).filter(|&j| e[j] == top).collect())
}
