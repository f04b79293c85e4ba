//! Maximum likelihood estimation for log-linear models: iterative
//! proportional scaling, and exact elimination of the likelihood equations
//! down to a univariate polynomial with isolated real roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{rat_to_f64, Rat};
use crate::model_core::ModelMatrix;
use crate::poly_engine::{buchberger_with, eliminate_to_triangular, shape_basis, Binomial, Budget, Monomial, Polynomial, TermOrder};
use crate::toric::compute_toric_basis_with;

pub const DEFAULT_IPS_TOL: f64 = 1e-9;
pub const DEFAULT_IPS_MAX_CYCLES: usize = 100_000;

/// Observed cell counts, in state order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<i64>,
}

impl CountTable {
    /// Rejects negative entries and an all-zero table.
    pub fn new(counts: Vec<i64>) -> Result<Self> {
        if let Some(j) = counts.iter().position(|&c| c < 0) {
            return Err(Error::NegativeValue(j));
        }
        if counts.iter().all(|&c| c == 0) {
            return Err(Error::EmptyCounts);
        }
        Ok(CountTable { counts })
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.counts.iter().sum()
    }
}

fn check_len(a: &ModelMatrix, n: &CountTable) -> Result<()> {
    if n.len() != a.m() {
        return Err(Error::DimensionMismatch { expected: a.m(), found: n.len() });
    }
    Ok(())
}

/// `A n`, the observed marginals.
pub fn sufficient_stats(a: &ModelMatrix, n: &CountTable) -> Result<Vec<i64>> {
    check_len(a, n)?;
    Ok(a.apply(n.counts()))
}

/// Cells forced to zero by a zero marginal, removed. Returns the remaining
/// cells and the matrix restricted to them and to the rows with a positive
/// marginal.
pub fn reduce_zero_cells(a: &ModelMatrix, n: &CountTable) -> Result<(Vec<usize>, ModelMatrix)> {
    let stats = sufficient_stats(a, n)?;
    let mut alive = vec![true; a.m()];
    loop {
        let mut changed = false;
        for i in (0..a.d()).filter(|&i| stats[i] == 0) {
            for j in 0..a.m() {
                if alive[j] && a.entry(i, j) > 0 {
                    alive[j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let active: Vec<usize> = (0..a.m()).filter(|&j| alive[j]).collect();
    if active.is_empty() {
        return Err(Error::AllCellsDropped);
    }
    let rows: Vec<usize> = (0..a.d()).filter(|&i| stats[i] > 0).collect();
    let reduced = a.restrict(&rows, &active)?;
    Ok((active, reduced))
}

/// Result of iterative proportional scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct IpsFit {
    /// Fitted counts for every cell; dropped cells are zero.
    pub fitted: Vec<f64>,
    pub active: Vec<usize>,
    pub cycles: usize,
    /// Largest marginal mismatch after the last cycle.
    pub max_error: f64,
    /// `Σ n_j log(m_j / N)` after each cycle.
    pub loglik: Vec<f64>,
}

/// Cyclic marginal matching on the active cells from the uniform start.
/// Each row in turn scales the cells it covers by observed over fitted
/// marginal, so the matrix must have 0/1 entries.
pub fn ips_fit(a: &ModelMatrix, n: &CountTable, tol: f64, max_cycles: usize) -> Result<IpsFit> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange("tolerance must be positive".into()));
    }
    if !a.is_binary() {
        return Err(Error::NonBinaryMatrix);
    }
    let (active, reduced) = reduce_zero_cells(a, n)?;
    let observed: Vec<f64> = reduced.apply(&active.iter().map(|&j| n.counts()[j]).collect::<Vec<_>>()).iter().map(|&x| x as f64).collect();
    let rows: Vec<Vec<usize>> = (0..reduced.d()).map(|i| (0..reduced.m()).filter(|&k| reduced.entry(i, k) == 1).collect()).collect();
    let total = n.total() as f64;
    let mut m = vec![total / active.len() as f64; active.len()];
    let loglik_of = |m: &[f64]| -> f64 {
        active.iter().zip(m).filter(|(&j, _)| n.counts()[j] > 0).map(|(&j, &x)| n.counts()[j] as f64 * (x / total).ln()).sum()
    };
    let max_error = |m: &[f64]| -> f64 {
        rows.iter().zip(&observed).map(|(r, &o)| (r.iter().map(|&k| m[k]).sum::<f64>() - o).abs()).fold(0.0, f64::max)
    };
    let mut loglik = Vec::new();
    let mut err = max_error(&m);
    let mut cycles = 0;
    while err > tol {
        if cycles == max_cycles {
            return Err(Error::NonConvergence { cycles, error: err });
        }
        for (r, &o) in rows.iter().zip(&observed) {
            let fitted: f64 = r.iter().map(|&k| m[k]).sum();
            let ratio = o / fitted;
            for &k in r {
                m[k] *= ratio;
            }
        }
        cycles += 1;
        loglik.push(loglik_of(&m));
        err = max_error(&m);
    }
    let mut fitted = vec![0.0; a.m()];
    for (k, &j) in active.iter().enumerate() {
        fitted[j] = m[k];
    }
    Ok(IpsFit { fitted, active, cycles, max_error: err, loglik })
}

/// Likelihood equations on the active cells: the toric basis of the reduced
/// matrix together with every marginal equation.
#[derive(Clone, Debug, PartialEq)]
pub struct MleSystem {
    pub active: Vec<usize>,
    pub matrix: ModelMatrix,
    pub binomials: Vec<Binomial>,
    pub marginals: Vec<i64>,
    /// One name per active cell, `m` followed by the state label.
    pub names: Vec<String>,
}

impl MleSystem {
    pub fn nvars(&self) -> usize {
        self.active.len()
    }

    /// `Σ_j a_ij x_j - b_i` for every reduced row.
    pub fn linear_equations(&self, order: &TermOrder) -> Vec<Polynomial> {
        let k = self.nvars();
        (0..self.matrix.d())
            .map(|i| {
                let mut terms: Vec<(Rat, Monomial)> = (0..k)
                    .filter(|&j| self.matrix.entry(i, j) != 0)
                    .map(|j| {
                        let mut e = vec![0; k];
                        e[j] = 1;
                        (Rat::from_integer(self.matrix.entry(i, j).into()), Monomial::new(e))
                    })
                    .collect();
                terms.push((-Rat::from_integer(self.marginals[i].into()), Monomial::one(k)));
                Polynomial::new(k, terms, order)
            })
            .collect()
    }

    pub fn polynomials(&self, order: &TermOrder) -> Vec<Polynomial> {
        let mut out: Vec<Polynomial> = self.binomials.iter().map(|b| Polynomial::from_binomial(b, order)).collect();
        out.extend(self.linear_equations(order));
        out
    }
}

pub fn assemble_mle_system(a: &ModelMatrix, n: &CountTable) -> Result<MleSystem> {
    assemble_mle_system_with(a, n, Budget::from_env())
}

pub fn assemble_mle_system_with(a: &ModelMatrix, n: &CountTable, budget: Budget) -> Result<MleSystem> {
    let (active, reduced) = reduce_zero_cells(a, n)?;
    let k = active.len();
    let basis = compute_toric_basis_with(&reduced, &TermOrder::grevlex(k), None, budget)?;
    let counts: Vec<i64> = active.iter().map(|&j| n.counts()[j]).collect();
    let marginals = reduced.apply(&counts);
    let names = active.iter().map(|&j| format!("m{}", a.col_labels()[j])).collect();
    Ok(MleSystem { active, binomials: basis.binomials().to_vec(), matrix: reduced, marginals, names })
}

/// Real root of a univariate polynomial inside `[lo, hi]`; `lo == hi` for a
/// root found exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RootInterval {
    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }

    pub fn approx(&self) -> f64 {
        rat_to_f64(&self.midpoint())
    }
}

/// One positive root of the univariate polynomial and the cell values
/// obtained by back-substitution at it.
#[derive(Clone, Debug, PartialEq)]
pub struct RootProfile {
    pub root: RootInterval,
    /// Values for the active cells, in active order.
    pub cells: Vec<f64>,
    pub all_positive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactMle {
    /// Lex reduced basis sorted so each element brings in one new variable,
    /// the univariate one first.
    pub triangular: Vec<Polynomial>,
    /// Coefficients of the univariate polynomial, constant term first, monic.
    pub psi: Vec<Rat>,
    /// Index of the active variable that `psi` is a polynomial in.
    pub psi_var: usize,
    pub profiles: Vec<RootProfile>,
}

impl ExactMle {
    /// The profile with every cell positive, which is the estimate.
    pub fn estimate(&self) -> Option<&RootProfile> {
        self.profiles.iter().find(|p| p.all_positive)
    }

    /// `psi` coefficients from the leading one down, as exact strings.
    pub fn psi_strings(&self) -> Vec<String> {
        self.psi.iter().rev().map(|c| c.to_string()).collect()
    }

    /// Active cell values at an exact value of the univariate variable.
    pub fn exact_cells(&self, root: &Rat) -> Result<Vec<Rat>> {
        back_substitute(&self.triangular, self.psi_var, root)
    }

    /// The estimate in exact fractions when its root is rational.
    pub fn rational_estimate(&self) -> Option<Vec<Rat>> {
        let est = self.estimate()?;
        let r = rational_root_check(&self.psi).into_iter().find(|r| *r >= est.root.lo && *r <= est.root.hi)?;
        self.exact_cells(&r).ok()
    }
}

pub fn solve_mle_exact(sys: &MleSystem) -> Result<ExactMle> {
    solve_mle_exact_with(sys, Budget::from_env())
}

/// Lex Gröbner basis of the likelihood equations with the active cells in
/// ascending state order as variables of decreasing priority, then real
/// roots of the univariate element in the last variable.
pub fn solve_mle_exact_with(sys: &MleSystem, budget: Budget) -> Result<ExactMle> {
    let k = sys.nvars();
    let order = TermOrder::lex(k);
    let gb = buchberger_with(&sys.polynomials(&order), &order, budget)?;
    if gb.iter().any(|p| p.lead_monomial().is_some_and(|m| m.is_one())) {
        return Err(Error::NotZeroDimensional("the equations have no common solution".into()));
    }
    for v in 0..k {
        let pure = gb.iter().any(|p| {
            let lm = p.lead_monomial().unwrap();
            lm.iter().enumerate().all(|(w, &e)| (w == v) == (e > 0))
        });
        if !pure {
            return Err(Error::NotZeroDimensional(format!("no leading power of {}", sys.names[v])));
        }
    }
    let priority: Vec<usize> = (0..k).collect();
    finish_exact(eliminate_to_triangular(&gb, &priority)?, k - 1)
}

pub fn solve_mle_shape(sys: &MleSystem) -> Result<ExactMle> {
    solve_mle_shape_with(sys, Budget::from_env())
}

/// Same result as `solve_mle_exact_with`, but the lex basis is read off a
/// grevlex basis when the last variable separates the solutions. Fails with
/// `NotTriangular` when it does not; the lex route still applies then.
pub fn solve_mle_shape_with(sys: &MleSystem, budget: Budget) -> Result<ExactMle> {
    let k = sys.nvars();
    let priority: Vec<usize> = (0..k).collect();
    let basis = shape_basis(&sys.polynomials(&TermOrder::grevlex(k)), &priority, budget)?;
    finish_exact(eliminate_to_triangular(&basis, &priority)?, k - 1)
}

/// Univariate polynomial, its positive roots and the cells at each.
fn finish_exact(triangular: Vec<Polynomial>, psi_var: usize) -> Result<ExactMle> {
    let psi = triangular[0]
        .univariate_coeffs(psi_var)
        .ok_or_else(|| Error::NotTriangular("first element is not univariate in the last variable".into()))?;
    let lead = psi.last().unwrap().clone();
    let psi: Vec<Rat> = psi.iter().map(|c| c / &lead).collect();
    // positive roots are refined to width 1e-12
    let width = Rat::new(BigInt::one(), BigInt::from(10).pow(12));
    let mut profiles = Vec::new();
    for root in real_roots(&psi) {
        if !root.hi.is_positive() {
            continue;
        }
        let root = refine(&psi, root, &width);
        let cells = back_substitute(&triangular, psi_var, &root.midpoint())?;
        let cells: Vec<f64> = cells.iter().map(rat_to_f64).collect();
        let all_positive = cells.iter().all(|&x| x > 0.0);
        profiles.push(RootProfile { root, cells, all_positive });
    }
    Ok(ExactMle { triangular, psi, psi_var, profiles })
}

/// Solves the triangular system for each remaining variable in turn at
/// `value` of the first one; each element must be linear in the variable it
/// brings in.
fn back_substitute(tri: &[Polynomial], first: usize, value: &Rat) -> Result<Vec<Rat>> {
    let k = tri[0].nvars();
    let mut known: Vec<Option<Rat>> = vec![None; k];
    known[first] = Some(value.clone());
    for p in &tri[1..] {
        let fresh: Vec<usize> = p.variables().into_iter().filter(|&v| known[v].is_none()).collect();
        let Some(&v) = fresh.first() else { continue };
        if p.degree_in(v) != 1 {
            return Err(Error::NotTriangular(format!("element is not linear in variable {v}")));
        }
        // p = c(x) * x_v + r(x) with x_v absent from c and r.
        let mut coeff = Rat::zero();
        let mut rest = Rat::zero();
        for (c, m) in p.terms() {
            let mut t = c.clone();
            for (w, &e) in m.iter().enumerate() {
                if e > 0 && w != v {
                    t *= num_traits::pow(known[w].clone().expect("variable solved earlier"), e as usize);
                }
            }
            if m[v] == 1 {
                coeff += t;
            } else {
                rest += t;
            }
        }
        if coeff.is_zero() {
            return Err(Error::NotTriangular(format!("variable {v} vanishes from its element at this root")));
        }
        known[v] = Some(-rest / coeff);
    }
    known
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| Error::NotTriangular(format!("variable {v} is never solved"))))
        .collect()
}

// ------------------------------------------------------------ univariate

/// Coefficients constant term first; trailing zeros trimmed.
fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &[Rat]) -> Vec<Rat> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * Rat::from_integer(BigInt::from(i))).collect()
}

/// Quotient and remainder of `a` by nonzero `b`.
fn div_rem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / b.last().unwrap();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        q[shift] = f;
        r = trim(r);
    }
    (q, r)
}

fn gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = div_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Squarefree part: `p / gcd(p, p')`.
fn squarefree(p: &[Rat]) -> Vec<Rat> {
    let g = gcd(p, &derivative(p));
    if g.len() <= 1 {
        return trim(p.to_vec());
    }
    div_rem(p, &g).0
}

/// `p(x + s)`, by repeated synthetic division.
fn taylor_shift(p: &[Rat], s: &Rat) -> Vec<Rat> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c[j + 1] * s;
            c[j] += t;
        }
    }
    c
}

/// Sign variations of the coefficient sequence.
fn variations(p: &[Rat]) -> usize {
    let signs: Vec<bool> = p.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Descartes bound for roots in the open interval `(lo, hi)`:
/// variations of `(1 + x)^n p((lo + hi x) / (1 + x))`.
fn descartes(p: &[Rat], lo: &Rat, hi: &Rat) -> usize {
    let w = hi - lo;
    // q(x) = p(lo + w x), roots in (0, 1)
    let q: Vec<Rat> = taylor_shift(p, lo).into_iter().enumerate().map(|(i, c)| c * num_traits::pow(w.clone(), i)).collect();
    // reversal maps (0, 1) to (1, ∞), the shift by one to (0, ∞)
    let rev: Vec<Rat> = q.into_iter().rev().collect();
    variations(&taylor_shift(&rev, &Rat::one()))
}

/// Isolating intervals for the distinct real roots, in increasing order.
pub fn real_roots(p: &[Rat]) -> Vec<RootInterval> {
    let p = squarefree(p);
    if p.len() <= 1 {
        return Vec::new();
    }
    let lead = p.last().unwrap();
    let bound = Rat::one() + p.iter().map(|c| (c / lead).abs()).max().unwrap();
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        match descartes(&p, &lo, &hi) {
            0 => {}
            1 => out.push(RootInterval { lo, hi }),
            _ => {
                let mid = (&lo + &hi) / Rat::from_integer(2.into());
                if eval(&p, &mid).is_zero() {
                    out.push(RootInterval { lo: mid.clone(), hi: mid.clone() });
                }
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Bisects an isolating interval of `p` until it is narrower than `width`,
/// keeping the half that Descartes' bound still credits with the root.
pub fn refine(p: &[Rat], mut r: RootInterval, width: &Rat) -> RootInterval {
    let p = squarefree(p);
    let two = Rat::from_integer(2.into());
    while r.lo != r.hi && &(&r.hi - &r.lo) >= width {
        let mid = (&r.lo + &r.hi) / &two;
        if eval(&p, &mid).is_zero() {
            return RootInterval { lo: mid.clone(), hi: mid };
        }
        if descartes(&p, &r.lo, &mid) == 1 {
            r.hi = mid;
        } else {
            r.lo = mid;
        }
    }
    r
}

/// Every rational root. A rational root `a/b` in lowest terms has `b`
/// dividing the leading coefficient `L` of the integer-cleared polynomial,
/// so it is a multiple of `1/L`; refining each real root below width `1/L`
/// leaves at most two candidates to test exactly.
pub fn rational_root_check(psi: &[Rat]) -> Vec<Rat> {
    let p = trim(psi.to_vec());
    if p.len() <= 1 {
        return Vec::new();
    }
    let den = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lead = (p.last().unwrap() * Rat::from_integer(den)).to_integer().abs();
    let step = Rat::new(BigInt::one(), lead.clone());
    let mut out = Vec::new();
    for root in real_roots(&p) {
        let r = refine(&p, root, &step);
        let first = (&r.lo * Rat::from_integer(lead.clone())).ceil().to_integer();
        for k in [first.clone(), first + 1] {
            let x = Rat::new(k, lead.clone());
            if x >= r.lo && x <= r.hi && eval(&p, &x).is_zero() && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out.sort();
    out
}

/// `psi` evaluated in floating point.
pub fn eval_f64(p: &[Rat], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or_else(|| rat_to_f64(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov_ci::pairwise_ideal;
    use crate::model_core::{build_graph_matrix, UndirectedGraph};
    use crate::poly_engine::{ideal_equal, reduce};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    const DATA: [i64; 16] = [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 0, 0, 0, 0];
    const IPS_TABLE: [f64; 12] = [0.96, 0.83, 1.03, 1.18, 1.07, 0.93, 0.93, 1.07, 0.97, 1.24, 1.03, 1.76];

    fn four_cycle() -> ModelMatrix {
        build_graph_matrix(&UndirectedGraph::binary_cycle(4)).unwrap()
    }

    #[test]
    fn count_table_validation() {
        assert_eq!(CountTable::new(vec![0, 0]), Err(Error::EmptyCounts));
        assert_eq!(CountTable::new(vec![1, -1]), Err(Error::NegativeValue(1)));
        assert_eq!(CountTable::new(vec![1, 2]).unwrap().total(), 3);
    }

    #[test]
    fn marginals_and_zero_cells() {
        let a = four_cycle();
        let n = CountTable::new(DATA.to_vec()).unwrap();
        let stats = sufficient_stats(&a, &n).unwrap();
        let row = |label: &str| a.row_labels().iter().position(|l| l == label).unwrap();
        assert_eq!(stats[row("{X1,X2}=00")], 4);
        assert_eq!(stats[row("{X1,X2}=10")], 5);
        assert_eq!(stats[row("{X1,X2}=11")], 0);
        assert_eq!(stats[row("{X3,X4}=10")], 3);
        assert_eq!(stats[row("{X1,X4}=10")], 2);
        let (active, reduced) = reduce_zero_cells(&a, &n).unwrap();
        assert_eq!(active, (0..12).collect::<Vec<_>>());
        assert_eq!(reduced.m(), 12);
        let chain = build_graph_matrix(&UndirectedGraph::binary_chain(3)).unwrap();
        let ones = CountTable::new(vec![1; 8]).unwrap();
        assert!(sufficient_stats(&chain, &ones).unwrap().iter().all(|&s| s == 2));
        assert_eq!(reduce_zero_cells(&chain, &ones).unwrap().0.len(), 8);
    }

    #[test]
    fn ips_reproduces_printed_table() {
        let a = four_cycle();
        let n = CountTable::new(DATA.to_vec()).unwrap();
        let fit = ips_fit(&a, &n, DEFAULT_IPS_TOL, DEFAULT_IPS_MAX_CYCLES).unwrap();
        for (x, y) in fit.fitted.iter().zip(&IPS_TABLE) {
            assert!((x - y).abs() <= 0.01, "{x} vs {y}");
        }
        assert!(fit.fitted[12..].iter().all(|&x| x == 0.0));
        assert!(fit.max_error <= DEFAULT_IPS_TOL);
        assert!(fit.loglik.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(matches!(ips_fit(&a, &n, 1e-15, 2), Err(Error::NonConvergence { .. })));
    }

    /// Closed form for the binary 3-chain: `n_{ij+} n_{+jk} / n_{+j+}`.
    fn chain_closed_form(n: &[i64]) -> Vec<Rat> {
        let c = |i: usize, j: usize, k: usize| n[4 * i + 2 * j + k];
        (0..8)
            .map(|s| {
                let (i, j, k) = (s >> 2, (s >> 1) & 1, s & 1);
                let nij: i64 = (0..2).map(|k| c(i, j, k)).sum();
                let njk: i64 = (0..2).map(|i| c(i, j, k)).sum();
                let nj: i64 = (0..2).flat_map(|i| (0..2).map(move |k| (i, k))).map(|(i, k)| c(i, j, k)).sum();
                rat(nij * njk, nj)
            })
            .collect()
    }

    #[test]
    fn decomposable_fit_in_one_cycle() {
        let a = build_graph_matrix(&UndirectedGraph::binary_chain(3)).unwrap();
        let counts = vec![3, 1, 4, 1, 5, 9, 2, 6];
        let n = CountTable::new(counts.clone()).unwrap();
        let fit = ips_fit(&a, &n, 1e-12, 10).unwrap();
        assert_eq!(fit.cycles, 1);
        for (x, y) in fit.fitted.iter().zip(chain_closed_form(&counts)) {
            assert!((x - rat_to_f64(&y)).abs() < 1e-12);
        }
        // A table already in the model is a fixed point.
        let sat = build_graph_matrix(&UndirectedGraph::binary_complete(3)).unwrap();
        let fit = ips_fit(&sat, &n, 1e-12, 10).unwrap();
        assert!(fit.fitted.iter().zip(&counts).all(|(x, &y)| (x - y as f64).abs() < 1e-12));
    }

    fn names(sys: &MleSystem) -> Vec<String> {
        sys.names.clone()
    }

    /// Parses a polynomial over `a..l` with integer coefficients, as in
    /// `c*h-d*g` or `a+b+c+d-4`.
    fn parse_letters(s: &str, order: &TermOrder) -> Polynomial {
        let mut terms = Vec::new();
        let s = s.replace('-', "+-");
        for t in s.split('+').filter(|t| !t.is_empty()) {
            let (sign, body) = if let Some(b) = t.strip_prefix('-') { (-1, b) } else { (1, t) };
            let mut e = vec![0u32; 12];
            let mut c = sign;
            for f in body.split('*') {
                match f.parse::<i64>() {
                    Ok(k) => c *= k,
                    Err(_) => e[(f.as_bytes()[0] - b'a') as usize] += 1,
                }
            }
            terms.push((Rat::from_integer(c.into()), Monomial::new(e)));
        }
        Polynomial::new(12, terms, order)
    }

    const PRINTED_SYSTEM: [&str; 13] = [
        "c*h-d*g", "b*l-d*j", "a*k-c*i", "a*f-b*e", "e*h*j*k-f*g*i*l", "a+b+c+d-4", "e+f+g+h-4", "i+j+k+l-5",
        "a+b+i+j-4", "c+g+k-3", "d+h+l-4", "b+f+d+h-4", "i+k-2",
    ];

    #[test]
    fn assembled_system_matches_printed_one() {
        let a = four_cycle();
        let n = CountTable::new(DATA.to_vec()).unwrap();
        let sys = assemble_mle_system(&a, &n).unwrap();
        assert_eq!(names(&sys)[11], "m1011");
        let order = TermOrder::grevlex(12);
        let printed: Vec<Polynomial> = PRINTED_SYSTEM.iter().map(|s| parse_letters(s, &order)).collect();
        let ours = sys.polynomials(&order);
        assert!(ideal_equal(&ours, &printed, &order).unwrap());
        let gb: Vec<Polynomial> = sys.binomials.iter().map(|b| Polynomial::from_binomial(b, &order)).collect();
        for p in &printed[..5] {
            assert!(reduce(p, &gb, &order).is_zero());
        }
        let lin = sys.linear_equations(&order);
        for s in ["a+b+c+d-4", "i+k-2"] {
            let p = parse_letters(s, &order);
            assert!(lin.iter().any(|q| *q == p || *q == p.neg()), "{s} missing");
        }
    }

    #[test]
    fn exact_solution_reproduces_psi() {
        let a = four_cycle();
        let n = CountTable::new(DATA.to_vec()).unwrap();
        let sys = assemble_mle_system(&a, &n).unwrap();
        let sol = solve_mle_exact(&sys).unwrap();
        let want = [rat(480, 13), rat(-2368, 39), rat(110, 9), rat(6713, 351), rat(-362, 39), rat(1, 1)];
        assert_eq!(sol.psi, want.to_vec());
        assert_eq!(sol.psi_var, 11);
        let second = &sol.triangular[1];
        let mut l4 = vec![0u32; 12];
        l4[11] = 4;
        let coeff = second.terms().iter().find(|(_, m)| m.exponents() == &l4[..]).map(|(c, _)| c.clone());
        assert_eq!(coeff, Some(rat(6539, 22304)));
        assert_eq!(second.lead_monomial().unwrap().exponents()[10], 1);
        assert!(rational_root_check(&sol.psi).is_empty());
        let est = sol.estimate().unwrap();
        let fit = ips_fit(&a, &n, DEFAULT_IPS_TOL, DEFAULT_IPS_MAX_CYCLES).unwrap();
        for (x, y) in est.cells.iter().zip(&fit.fitted) {
            assert!((x - y).abs() < 1e-3);
        }
        assert!(eval_f64(&sol.psi, fit.fitted[11]).abs() <= 1e-2);
    }

    #[test]
    fn decomposable_exact_mle_is_rational() {
        let a = build_graph_matrix(&UndirectedGraph::binary_chain(3)).unwrap();
        let counts = vec![3, 1, 4, 1, 5, 9, 2, 6];
        let n = CountTable::new(counts.clone()).unwrap();
        let sys = assemble_mle_system(&a, &n).unwrap();
        assert_eq!(sys.binomials.len(), 2);
        assert_eq!(sys.binomials.len(), pairwise_ideal(&UndirectedGraph::binary_chain(3)).len());
        let sol = solve_mle_exact(&sys).unwrap();
        assert_eq!(sol.psi.len(), 2);
        let closed = chain_closed_form(&counts);
        assert_eq!(rational_root_check(&sol.psi), vec![closed[7].clone()]);
        let est = sol.estimate().unwrap();
        for (x, y) in est.cells.iter().zip(&closed) {
            assert!((x - rat_to_f64(y)).abs() < 1e-9);
        }
        assert_eq!(sol.rational_estimate(), Some(closed));
    }

    #[test]
    fn shape_route_agrees_with_lex_elimination() {
        let four = (four_cycle(), DATA.to_vec());
        let chain = (build_graph_matrix(&UndirectedGraph::binary_chain(3)).unwrap(), vec![3, 1, 4, 1, 5, 9, 2, 6]);
        let full = (build_graph_matrix(&UndirectedGraph::binary_complete(2)).unwrap(), vec![2, 3, 5, 7]);
        for (a, counts) in [four, chain, full] {
            let sys = assemble_mle_system(&a, &CountTable::new(counts).unwrap()).unwrap();
            assert_eq!(solve_mle_shape(&sys).unwrap(), solve_mle_exact(&sys).unwrap());
        }
    }

    #[test]
    fn saturated_model_returns_the_data() {
        let a = build_graph_matrix(&UndirectedGraph::binary_complete(2)).unwrap();
        let n = CountTable::new(vec![2, 3, 5, 7]).unwrap();
        let sys = assemble_mle_system(&a, &n).unwrap();
        assert!(sys.binomials.is_empty());
        assert_eq!(sys.matrix.d(), 4);
        let sol = solve_mle_exact(&sys).unwrap();
        assert_eq!(sol.estimate().unwrap().cells, vec![2.0, 3.0, 5.0, 7.0]);
    }

    #[test]
    fn rational_roots_of_small_polynomials() {
        // (x - 2)(x - 1/3) = x^2 - 7/3 x + 2/3
        assert_eq!(rational_root_check(&[rat(2, 3), rat(-7, 3), rat(1, 1)]), vec![rat(1, 3), rat(2, 1)]);
        let x5 = vec![Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero(), Rat::one()];
        assert_eq!(rational_root_check(&x5), vec![Rat::zero()]);
        // x^2 - 2 has real roots but no rational ones.
        assert!(rational_root_check(&[rat(-2, 1), Rat::zero(), Rat::one()]).is_empty());
        let roots = real_roots(&[rat(-2, 1), Rat::zero(), Rat::one()]);
        assert_eq!(roots.len(), 2);
    }

    proptest! {
        #[test]
        fn isolation_finds_planted_roots(mut rs in proptest::collection::btree_set(-20i64..20, 1..6), den in 1i64..5) {
            let roots: Vec<Rat> = std::mem::take(&mut rs).into_iter().map(|r| rat(r, den)).collect();
            let mut p = vec![Rat::one()];
            for r in &roots {
                // multiply by (x - r)
                let mut q = vec![Rat::zero(); p.len() + 1];
                for (i, c) in p.iter().enumerate() {
                    q[i + 1] += c;
                    q[i] -= c * r;
                }
                p = q;
            }
            let found = real_roots(&p);
            prop_assert_eq!(found.len(), roots.len());
            for (iv, r) in found.iter().zip(&roots) {
                prop_assert!(iv.lo <= *r && *r <= iv.hi);
            }
            prop_assert_eq!(rational_root_check(&p), roots);
        }
    }
}
