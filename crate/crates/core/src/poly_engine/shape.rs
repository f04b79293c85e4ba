//! Lex bases of zero-dimensional ideals in shape position, read off from a
//! grevlex basis by linear algebra in the quotient ring. Lex Buchberger on a
//! dozen or more variables can run for hours where grevlex finishes in
//! seconds.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::groebner::{buchberger_with, interreduce, reduce, Budget};
use super::{Monomial, OrderKind, Polynomial, TermOrder};
use crate::error::{Error, Result};
use crate::exact_arith::{rref, Rat, RatMatrix};

/// Monomials divisible by no leading monomial, ascending. `None` when there
/// are infinitely many, i.e. some variable has no pure-power leading
/// monomial.
pub fn standard_monomials(leads: &[Monomial], nvars: usize) -> Option<Vec<Monomial>> {
    let pure = |v: usize| leads.iter().any(|m| m.iter().enumerate().all(|(w, &e)| (w == v) == (e > 0)));
    if !(0..nvars).all(pure) {
        return None;
    }
    let reducible = |m: &Monomial| leads.iter().any(|l| l.divides(m));
    let mut found = BTreeSet::new();
    let mut frontier = vec![Monomial::one(nvars)];
    while let Some(m) = frontier.pop() {
        if reducible(&m) || !found.insert(m.clone()) {
            continue;
        }
        frontier.extend((0..nvars).map(|v| m.mul(&Monomial::var(nvars, v))));
    }
    Some(found.into_iter().collect())
}

/// Reduced lex basis `{psi(t), x_j - g_j(t)}` of the ideal, where `t` is the
/// last variable of `priority` and the lex order ranks variables by
/// `priority`. The grevlex normal forms of `1, t, .., t^D` span the quotient
/// of dimension `D`; the ideal is in shape position exactly when the first
/// `D` of them are independent, and otherwise this returns `NotTriangular`.
pub fn shape_basis(f: &[Polynomial], priority: &[usize], budget: Budget) -> Result<Vec<Polynomial>> {
    let n = priority.len();
    let grevlex = TermOrder::grevlex(n);
    let f: Vec<Polynomial> = f.iter().map(|p| p.reorder(&grevlex)).collect();
    let g = buchberger_with(&f, &grevlex, budget)?;
    if g.iter().any(|p| p.lead_monomial().is_some_and(|m| m.is_one())) {
        return Err(Error::NotZeroDimensional("the equations have no common solution".into()));
    }
    let leads: Vec<Monomial> = g.iter().filter_map(|p| p.lead_monomial().cloned()).collect();
    let standard = standard_monomials(&leads, n)
        .ok_or_else(|| Error::NotZeroDimensional("some variable has no leading power".into()))?;
    let d = standard.len();
    let index: HashMap<&Monomial, usize> = standard.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let coords = |p: &Polynomial| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); d];
        for (c, m) in p.terms() {
            v[index[m]] = c.clone();
        }
        v
    };

    let t = *priority.last().expect("at least one variable");
    let tv = Polynomial::var(n, t);
    let mut powers = vec![Polynomial::constant(n, Rat::one())];
    for k in 1..=d {
        let next = reduce(&powers[k - 1].mul(&tv, &grevlex), &g, &grevlex);
        powers.push(next);
    }
    let others: Vec<usize> = priority[..n - 1].to_vec();
    // columns: t^0..t^{D-1}, then the targets t^D and each other variable
    let mut columns: Vec<Vec<Rat>> = powers.iter().map(&coords).collect();
    for &j in &others {
        columns.push(coords(&reduce(&Polynomial::var(n, j), &g, &grevlex)));
    }
    let width = columns.len();
    let rows: Vec<Vec<Rat>> = (0..d).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let (r, pivots) = rref(&RatMatrix::from_rows(rows, width));
    if pivots.len() != d || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(Error::NotTriangular(format!(
            "powers of variable {t} span {} of {d} quotient dimensions; not in shape position",
            pivots.iter().filter(|&&p| p < d).count()
        )));
    }

    let lex = TermOrder::with_priority(OrderKind::Lex, priority.to_vec());
    let t_pow = |k: usize| Monomial::new((0..n).map(|w| if w == t { k as u32 } else { 0 }).collect());
    let in_t = |target: usize| -> Vec<(Rat, Monomial)> { (0..d).map(|k| (-r.get(k, target).clone(), t_pow(k))).collect() };
    let mut basis = Vec::with_capacity(n);
    let mut psi = in_t(d);
    psi.push((Rat::one(), t_pow(d)));
    basis.push(Polynomial::new(n, psi, &lex));
    for (i, &j) in others.iter().enumerate() {
        let mut p = in_t(d + 1 + i);
        p.push((Rat::one(), Monomial::var(n, j)));
        basis.push(Polynomial::new(n, p, &lex));
    }
    Ok(interreduce(&basis, &lex))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_engine::buchberger;

    fn rat(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn poly(n: usize, terms: &[(i64, &[u32])], order: &TermOrder) -> Polynomial {
        Polynomial::new(n, terms.iter().map(|&(c, e)| (rat(c), Monomial::new(e.to_vec()))).collect(), order)
    }

    #[test]
    fn standard_monomials_of_a_staircase() {
        // leads x^2, xy, y^3: 1, y, y^2, x
        let leads = [Monomial::new(vec![2, 0]), Monomial::new(vec![1, 1]), Monomial::new(vec![0, 3])];
        let s = standard_monomials(&leads, 2).unwrap();
        assert_eq!(s.len(), 4);
        assert!(standard_monomials(&leads[..2], 2).is_none());
    }

    #[test]
    fn matches_lex_buchberger_on_a_small_system() {
        // x^2 + y^2 - 5, x - y - 1: solutions (2, 1) and (-1, -2)
        let lex = TermOrder::lex(2);
        let f = vec![poly(2, &[(1, &[2, 0]), (1, &[0, 2]), (-5, &[0, 0])], &lex), poly(2, &[(1, &[1, 0]), (-1, &[0, 1]), (-1, &[0, 0])], &lex)];
        let want = buchberger(&f, &lex).unwrap();
        let got = shape_basis(&f, &[0, 1], Budget::default()).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn rejects_a_non_separating_variable() {
        // x^2 - 1, y^2 - 1: y takes two values over four points
        let lex = TermOrder::lex(2);
        let f = vec![poly(2, &[(1, &[2, 0]), (-1, &[0, 0])], &lex), poly(2, &[(1, &[0, 2]), (-1, &[0, 0])], &lex)];
        assert!(matches!(shape_basis(&f, &[0, 1], Budget::default()), Err(Error::NotTriangular(_))));
    }

    #[test]
    fn positive_dimensional_ideals_are_rejected() {
        let lex = TermOrder::lex(2);
        let f = vec![poly(2, &[(1, &[1, 1]), (-1, &[0, 0])], &lex)];
        assert!(matches!(shape_basis(&f, &[0, 1], Budget::default()), Err(Error::NotZeroDimensional(_))));
    }
}
