//! Sparse multivariate polynomials over the rationals, term orders, and
//! Buchberger's algorithm (general and pure-binomial).

mod binomial;
mod groebner;
mod polynomial;
mod shape;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

pub use binomial::Binomial;
pub(crate) use groebner::binomial_groebner_primitive;
pub use groebner::{
    binomial_groebner, buchberger, buchberger_with, eliminate_to_triangular, ideal_equal,
    interreduce, reduce, reduce_binomial, s_polynomial, Budget, DEFAULT_PAIR_BUDGET,
};
pub use polynomial::Polynomial;
pub use shape::{shape_basis, standard_monomials};

/// Exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn into_exponents(self) -> Vec<u32> {
        self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Bit i set when variable i (mod 64) occurs. Divisibility prefilter.
    pub(crate) fn support_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |m, (i, _)| m | (1u64 << (i % 64)))
    }

    /// Writes the monomial as `p0011*p1110^2` given variable names; `1` for
    /// the empty product.
    pub fn fmt_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Deref for Monomial {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for Monomial {
    fn from(v: Vec<u32>) -> Self {
        Monomial(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    Grevlex,
    /// Weight 0 on the given variable, 1 on the others; grevlex tie-break.
    Cheapest(usize),
}

/// A term order together with a variable priority: `priority[0]` is the
/// most significant indeterminate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermOrder {
    kind: OrderKind,
    priority: Vec<usize>,
}

impl TermOrder {
    pub fn lex(nvars: usize) -> Self {
        Self::with_priority(OrderKind::Lex, (0..nvars).collect())
    }

    pub fn grevlex(nvars: usize) -> Self {
        Self::with_priority(OrderKind::Grevlex, (0..nvars).collect())
    }

    pub fn cheapest(nvars: usize, var: usize) -> Self {
        Self::with_priority(OrderKind::Cheapest(var), (0..nvars).collect())
    }

    /// Panics unless `priority` is a permutation of `0..n`.
    pub fn with_priority(kind: OrderKind, priority: Vec<usize>) -> Self {
        let mut seen = vec![false; priority.len()];
        for &p in &priority {
            assert!(p < priority.len() && !seen[p], "priority must be a permutation");
            seen[p] = true;
        }
        if let OrderKind::Cheapest(i) = kind {
            assert!(i < priority.len(), "cheapest variable out of range");
        }
        TermOrder { kind, priority }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    pub fn name(&self) -> String {
        match self.kind {
            OrderKind::Lex => "lex".into(),
            OrderKind::Grevlex => "grevlex".into(),
            OrderKind::Cheapest(i) => format!("cheapest({i})"),
        }
    }

    fn grevlex_cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        let da: u64 = a.iter().map(|&e| e as u64).sum();
        let db: u64 = b.iter().map(|&e| e as u64).sum();
        da.cmp(&db).then_with(|| {
            for &v in self.priority.iter().rev() {
                match a[v].cmp(&b[v]) {
                    Ordering::Equal => continue,
                    o => return o.reverse(),
                }
            }
            Ordering::Equal
        })
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.priority {
                    match a[v].cmp(&b[v]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Grevlex => self.grevlex_cmp(a, b),
            OrderKind::Cheapest(i) => {
                let wa = a.degree() - a[i] as u64;
                let wb = b.degree() - b[i] as u64;
                wa.cmp(&wb).then_with(|| self.grevlex_cmp(a, b))
            }
        }
    }

    /// A key whose lexicographic comparison agrees with `cmp`.
    pub fn sort_key(&self, m: &Monomial) -> Vec<i64> {
        let rev = |key: &mut Vec<i64>| {
            key.push(m.degree() as i64);
            key.extend(self.priority.iter().rev().map(|&v| -(m[v] as i64)));
        };
        let mut key = Vec::with_capacity(m.nvars() + 2);
        match self.kind {
            OrderKind::Lex => key.extend(self.priority.iter().map(|&v| m[v] as i64)),
            OrderKind::Grevlex => rev(&mut key),
            OrderKind::Cheapest(i) => {
                key.push(m.degree() as i64 - m[i] as i64);
                rev(&mut key);
            }
        }
        key
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(v: &[u32]) -> Monomial {
        Monomial::new(v.to_vec())
    }

    #[test]
    fn lex_and_grevlex_on_three_variables() {
        let lex = TermOrder::lex(3);
        let grl = TermOrder::grevlex(3);
        // x > y^5 in lex, the reverse in grevlex
        assert_eq!(lex.cmp(&m(&[1, 0, 0]), &m(&[0, 5, 0])), Ordering::Greater);
        assert_eq!(grl.cmp(&m(&[1, 0, 0]), &m(&[0, 5, 0])), Ordering::Less);
        // x*z vs y^2: same degree, grevlex prefers the one with less z
        assert_eq!(grl.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
        assert_eq!(lex.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Greater);
    }

    #[test]
    fn priority_permutation_changes_lex() {
        let o = TermOrder::with_priority(OrderKind::Lex, vec![2, 0, 1]);
        assert_eq!(o.cmp(&m(&[5, 0, 0]), &m(&[0, 0, 1])), Ordering::Less);
    }

    #[test]
    fn cheapest_variable_is_smallest() {
        let o = TermOrder::cheapest(3, 0);
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 0, 1])), Ordering::Less);
        assert_eq!(o.cmp(&m(&[3, 0, 0]), &m(&[0, 1, 0])), Ordering::Less);
    }

    fn mono(n: usize) -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0u32..4, n).prop_map(Monomial::new)
    }

    fn order(n: usize) -> impl Strategy<Value = TermOrder> {
        (0usize..3, 0..n, Just((0..n).collect::<Vec<_>>()).prop_shuffle()).prop_map(move |(k, i, p)| {
            let kind = match k {
                0 => OrderKind::Lex,
                1 => OrderKind::Grevlex,
                _ => OrderKind::Cheapest(i),
            };
            TermOrder::with_priority(kind, p)
        })
    }

    proptest! {
        #[test]
        fn term_order_axioms(o in order(4), a in mono(4), b in mono(4), c in mono(4)) {
            prop_assert_ne!(o.cmp(&Monomial::one(4), &a), Ordering::Greater);
            prop_assert_eq!(o.cmp(&a, &b), o.cmp(&a.mul(&c), &b.mul(&c)));
            prop_assert_eq!(o.cmp(&a, &b), o.sort_key(&a).cmp(&o.sort_key(&b)));
            prop_assert_eq!(o.cmp(&a, &b) == Ordering::Equal, a == b);
        }
    }
}
