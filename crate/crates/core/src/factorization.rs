//! Whether a distribution factors, is only a limit of factoring
//! distributions, or neither: A-feasibility, facial sets, toric membership
//! by two independent routes, and explicit limit sequences.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{integer_kernel_lattice, rat_to_f64, Rat};
use crate::model_core::{monomial_map_f64, Distribution, ModelMatrix, NumericDistribution};
use crate::poly_engine::Binomial;
use crate::toric::{evaluate_binomial, evaluate_binomial_f64, ToricBasis};

/// Relative residual accepted from the floating-point log solve.
pub const LOG_RESIDUAL_TOL: f64 = 1e-8;

/// A vector `c` with `c·a_i = 0` on the face and `c·a_i ≥ 1` off it.
#[derive(Clone, Debug, PartialEq)]
pub struct FacialCertificate {
    pub c: Vec<Rat>,
}

impl FacialCertificate {
    /// Checks the defining equalities and inequalities exactly.
    pub fn certifies(&self, a: &ModelMatrix, f: &[usize]) -> bool {
        let inside = membership(a.m(), f);
        self.c.len() == a.d()
            && (0..a.m()).all(|i| {
                let s = dot_column(&self.c, a, i);
                if inside[i] {
                    s.is_zero()
                } else {
                    s >= Rat::one()
                }
            })
    }
}

fn membership(m: usize, f: &[usize]) -> Vec<bool> {
    let mut out = vec![false; m];
    for &j in f {
        assert!(j < m, "support index {j} out of range");
        out[j] = true;
    }
    out
}

fn dot_column(c: &[Rat], a: &ModelMatrix, i: usize) -> Rat {
    (0..a.d()).filter(|&r| a.entry(r, i) != 0).fold(Rat::zero(), |acc, r| acc + &c[r] * Rat::from_integer(a.entry(r, i).into()))
}

/// Rows touched by the columns in `f`.
pub fn covered_rows(a: &ModelMatrix, f: &[usize]) -> Vec<usize> {
    let mut hit = vec![false; a.d()];
    for &j in f {
        for r in a.column_support(j) {
            hit[r] = true;
        }
    }
    (0..a.d()).filter(|&r| hit[r]).collect()
}

/// Whether no column outside `f` has its support inside the rows covered by
/// `f`. The witness is the first column that does.
pub fn is_a_feasible(a: &ModelMatrix, f: &[usize]) -> (bool, Option<usize>) {
    let inside = membership(a.m(), f);
    let mut hit = vec![false; a.d()];
    for r in covered_rows(a, f) {
        hit[r] = true;
    }
    let witness = (0..a.m()).find(|&j| !inside[j] && a.column_support(j).iter().all(|&r| hit[r]));
    (witness.is_none(), witness)
}

/// A nonnegative solution of `rows · x = rhs`, by phase one of the simplex
/// method in exact arithmetic with Bland's rule.
fn feasible_point(rows: &[Vec<Rat>], rhs: &[Rat], n: usize) -> Option<Vec<Rat>> {
    let k = rows.len();
    let width = n + k + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(k);
    for (r, (row, b)) in rows.iter().zip(rhs).enumerate() {
        let flip = b.is_negative();
        let mut line: Vec<Rat> = row.iter().map(|x| if flip { -x } else { x.clone() }).collect();
        line.resize(width, Rat::zero());
        line[n + r] = Rat::one();
        line[width - 1] = if flip { -b } else { b.clone() };
        t.push(line);
    }
    let mut basis: Vec<usize> = (n..n + k).collect();
    // Reduced costs of the phase-one objective (sum of artificials); a
    // positive entry marks an improving column.
    let mut obj = vec![Rat::zero(); width];
    for line in &t {
        for j in 0..n {
            obj[j] += &line[j];
        }
        obj[width - 1] += &line[width - 1];
    }
    loop {
        let Some(enter) = (0..width - 1).find(|&j| obj[j].is_positive()) else { break };
        let mut leave: Option<usize> = None;
        for r in 0..k {
            if !t[r][enter].is_positive() {
                continue;
            }
            leave = match leave {
                None => Some(r),
                Some(l) => {
                    let a = &t[r][width - 1] / &t[r][enter];
                    let b = &t[l][width - 1] / &t[l][enter];
                    if a < b || (a == b && basis[r] < basis[l]) { Some(r) } else { Some(l) }
                }
            };
        }
        let r = leave.expect("phase-one objective is bounded below");
        let p = t[r][enter].clone();
        for x in t[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = t[r].clone();
        for (q, line) in t.iter_mut().enumerate() {
            if q != r && !line[enter].is_zero() {
                let f = line[enter].clone();
                for (x, y) in line.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (x, y) in obj.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        basis[r] = enter;
    }
    if !obj[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = t[r][width - 1].clone();
        }
    }
    Some(x)
}

/// Exact LP test that `f` is the support of a face: some `c` has
/// `c·a_i = 0` for `i ∈ f` and `c·a_i ≥ 1` otherwise.
pub fn is_facial_lp(a: &ModelMatrix, f: &[usize]) -> (bool, Option<FacialCertificate>) {
    let (d, m) = (a.d(), a.m());
    let inside = membership(m, f);
    let outside: Vec<usize> = (0..m).filter(|&i| !inside[i]).collect();
    if outside.is_empty() {
        return (true, Some(FacialCertificate { c: vec![Rat::zero(); d] }));
    }
    // Unknowns: c+ (d), c- (d), one surplus per column outside f.
    let n = 2 * d + outside.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rat::zero(); n];
        for r in 0..d {
            let x = Rat::from_integer(a.entry(r, i).into());
            row[d + r] = -x.clone();
            row[r] = x;
        }
        if let Some(k) = outside.iter().position(|&o| o == i) {
            row[2 * d + k] = -Rat::one();
            rhs.push(Rat::one());
        } else {
            rhs.push(Rat::zero());
        }
        rows.push(row);
    }
    match feasible_point(&rows, &rhs, n) {
        None => (false, None),
        Some(x) => {
            let c: Vec<Rat> = (0..d).map(|r| &x[r] - &x[d + r]).collect();
            let cert = FacialCertificate { c };
            assert!(cert.certifies(a, f), "simplex returned an invalid facial certificate");
            (true, Some(cert))
        }
    }
}

/// Whether the 0/1 indicator of `f` is a zero of every basis binomial.
pub fn is_facial_via_basis(basis: &ToricBasis, f: &[usize]) -> bool {
    let inside = membership(basis.matrix().m(), f);
    let covered = |e: &[u32]| e.iter().enumerate().all(|(j, &k)| k == 0 || inside[j]);
    basis.binomials().iter().all(|b| covered(b.u()) == covered(b.v()))
}

/// Exact membership in the nonnegative toric variety by evaluating the basis.
pub fn in_variety_via_basis(p: &Distribution, basis: &ToricBasis) -> bool {
    assert_eq!(p.len(), basis.matrix().m(), "distribution length differs from the model");
    basis.binomials().iter().all(|b| evaluate_binomial(b, p).is_zero())
}

/// Floating-point membership: `|P^u - P^v| ≤ tol · max(P^u, P^v)` for every
/// basis element.
pub fn in_variety_via_basis_f64(p: &[f64], basis: &ToricBasis, tol: f64) -> bool {
    assert_eq!(p.len(), basis.matrix().m(), "distribution length differs from the model");
    basis.binomials().iter().all(|b| {
        let (diff, scale) = evaluate_binomial_f64(b, p);
        diff.abs() <= tol * scale
    })
}

fn pow_signed(x: &Rat, k: &BigInt) -> Rat {
    let e = k.abs().to_usize().expect("kernel entry exceeds usize");
    let r = num_traits::pow(x.clone(), e);
    if k.is_negative() {
        r.recip()
    } else {
        r
    }
}

/// Membership without a Markov basis: the support must be facial and the
/// positive part must satisfy `p^w = 1` for a lattice basis `w` of the
/// kernel of `A` restricted to the support columns.
pub fn in_variety_kernel_oracle(a: &ModelMatrix, p: &Distribution) -> bool {
    assert_eq!(p.len(), a.m(), "distribution length differs from the model");
    let f = p.support();
    if !is_facial_lp(a, &f).0 {
        return false;
    }
    if f.is_empty() {
        return true;
    }
    let sub = a.int_matrix().select_columns(&f);
    let k = integer_kernel_lattice(&sub);
    let holds = k.row_iter().all(|w| {
        let prod = w.iter().zip(&f).filter(|(x, _)| !x.is_zero()).fold(Rat::one(), |acc, (x, &j)| acc * pow_signed(&p.values()[j], x));
        prod.is_one()
    });
    holds
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    Factors,
    LimitOnly,
    Outside,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::Factors => "factors",
            VerdictKind::LimitOnly => "limit_only",
            VerdictKind::Outside => "outside",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    /// Support is A-feasible and every basis element vanishes.
    None,
    /// A column outside the support whose rows are all covered by it.
    InfeasibleColumn { column: usize, covered_rows: Vec<usize> },
    /// First basis element, in basis order, that does not vanish.
    FailedBinomial { index: usize, binomial: Binomial, value: Rat },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub evidence: Evidence,
}

/// Factors when `P` is on the toric variety with A-feasible support, only a
/// limit of factoring distributions when the support is not A-feasible, and
/// outside otherwise. The zero vector lies on the variety, so its verdict
/// depends only on whether `A` has a zero column.
pub fn classify(a: &ModelMatrix, basis: &ToricBasis, p: &Distribution) -> Verdict {
    assert_eq!(p.len(), a.m(), "distribution length differs from the model");
    for (index, b) in basis.binomials().iter().enumerate() {
        let value = evaluate_binomial(b, p);
        if !value.is_zero() {
            return Verdict {
                kind: VerdictKind::Outside,
                evidence: Evidence::FailedBinomial { index, binomial: b.clone(), value },
            };
        }
    }
    let f = p.support();
    match is_a_feasible(a, &f) {
        (true, _) => Verdict { kind: VerdictKind::Factors, evidence: Evidence::None },
        (false, Some(column)) => Verdict {
            kind: VerdictKind::LimitOnly,
            evidence: Evidence::InfeasibleColumn { column, covered_rows: covered_rows(a, &f) },
        },
        (false, None) => unreachable!("infeasible support always has a witness"),
    }
}

/// Parameters `t(ε)` and the point `φ_A(t(ε))`, which tends to `P` as
/// `ε -> 0`.
///
/// Solves `A_F^T τ = log p_F` by least squares on the support `F`, sets
/// `t_i = exp(τ_i)` on rows touched by `F` and `0` elsewhere, and scales by
/// `ε^{c_i}` for a facial certificate `c` of `F`.
pub fn limit_sequence(a: &ModelMatrix, p: &Distribution, eps: &Rat) -> Result<(Vec<f64>, NumericDistribution)> {
    if p.len() != a.m() {
        return Err(Error::DimensionMismatch { expected: a.m(), found: p.len() });
    }
    if !eps.is_positive() {
        return Err(Error::OutOfRange("epsilon must be positive".into()));
    }
    if !in_variety_kernel_oracle(a, p) {
        return Err(Error::NotInVariety);
    }
    let f = p.support();
    let d = a.d();
    let (_, cert) = is_facial_lp(a, &f);
    let cert = cert.expect("support on the variety is facial");
    let mut t = vec![0.0; d];
    if !f.is_empty() {
        let b = DMatrix::from_fn(f.len(), d, |k, r| a.entry(r, f[k]) as f64);
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|&j| rat_to_f64(&p.values()[j]).ln()));
        let svd = b.clone().svd(true, true);
        let tau = svd.solve(&rhs, 1e-12).map_err(|_| Error::LogSystemResidual(f64::INFINITY))?;
        let residual = (&b * &tau - &rhs).norm();
        let scale = rhs.norm().max(1.0);
        if residual > LOG_RESIDUAL_TOL * scale {
            return Err(Error::LogSystemResidual(residual / scale));
        }
        for r in covered_rows(a, &f) {
            t[r] = tau[r].exp();
        }
    }
    let e = rat_to_f64(eps);
    for (ti, ci) in t.iter_mut().zip(&cert.c) {
        if *ti != 0.0 {
            *ti *= e.powf(rat_to_f64(ci));
        }
    }
    let point = monomial_map_f64(a, &t);
    Ok((t, NumericDistribution::new(point)?))
}
