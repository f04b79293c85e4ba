use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Binomial, Monomial, TermOrder};
use crate::exact_arith::{rat_to_f64, Rat};

/// Polynomial with rational coefficients. Terms are kept strictly
/// decreasing under the order they were last sorted with; routines taking a
/// `TermOrder` assume that order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Rat, Monomial)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::monomial(c, Monomial::one(nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Rat::one(), Monomial::var(nvars, i))
    }

    pub fn monomial(c: Rat, m: Monomial) -> Self {
        let nvars = m.nvars();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Polynomial { nvars, terms: vec![(c, m)] }
    }

    /// Combines like terms, drops zeros and sorts.
    pub fn new(nvars: usize, mut terms: Vec<(Rat, Monomial)>, order: &TermOrder) -> Self {
        for (_, m) in &terms {
            assert_eq!(m.nvars(), nvars, "monomial has wrong number of variables");
        }
        terms.sort_by(|a, b| order.cmp(&b.1, &a.1));
        let mut out: Vec<(Rat, Monomial)> = Vec::with_capacity(terms.len());
        for (c, m) in terms {
            match out.last_mut() {
                Some((lc, lm)) if *lm == m => *lc += c,
                _ => out.push((c, m)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        Polynomial { nvars, terms: out }
    }

    pub fn from_binomial(b: &Binomial, order: &TermOrder) -> Self {
        Self::new(
            b.nvars(),
            vec![(Rat::one(), b.u().clone()), (-Rat::one(), b.v().clone())],
            order,
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Rat, Monomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&(Rat, Monomial)> {
        self.terms.first()
    }

    pub fn lead_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn lead_coeff(&self) -> Option<&Rat> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(_, m)| m.degree()).max()
    }

    /// Re-sorts the terms under another order.
    pub fn reorder(&self, order: &TermOrder) -> Self {
        Self::new(self.nvars, self.terms.clone(), order)
    }

    pub fn monic(&self) -> Self {
        match self.lead_coeff() {
            None => self.clone(),
            Some(c) if c.is_one() => self.clone(),
            Some(c) => self.scale(&c.recip()),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(a, m)| (a * c, m.clone())).collect() }
    }

    pub fn mul_term(&self, c: &Rat, m: &Monomial) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, t)| (a * c, t.mul(m))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    /// Sorted merge of two polynomials sorted under `order`.
    pub fn add(&self, other: &Self, order: &TermOrder) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, ma) = &self.terms[i];
            let (b, mb) = &other.terms[j];
            match order.cmp(ma, mb) {
                Ordering::Greater => {
                    out.push((a.clone(), ma.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b.clone(), mb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = a + b;
                    if !s.is_zero() {
                        out.push((s, ma.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Polynomial { nvars: self.nvars, terms: out }
    }

    pub fn sub(&self, other: &Self, order: &TermOrder) -> Self {
        self.add(&other.neg(), order)
    }

    pub fn mul(&self, other: &Self, order: &TermOrder) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                terms.push((a * b, ma.mul(mb)));
            }
        }
        Self::new(self.nvars, terms, order)
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong length");
        self.terms
            .iter()
            .map(|(c, m)| {
                m.iter().zip(point).fold(c.clone(), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e as usize))
            })
            .fold(Rat::zero(), |a, b| a + b)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, m)| {
                let c = rat_to_f64(c);
                m.iter().zip(point).fold(c, |acc, (&e, x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    /// Indices of the variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&i| self.terms.iter().any(|(_, m)| m[i] > 0)).collect()
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(_, m)| m[var]).max().unwrap_or(0)
    }

    /// When the polynomial only involves `var`, its coefficients from the
    /// constant term upward.
    pub fn univariate_coeffs(&self, var: usize) -> Option<Vec<Rat>> {
        if self.variables().iter().any(|&v| v != var) {
            return None;
        }
        let mut c = vec![Rat::zero(); self.degree_in(var) as usize + 1];
        for (a, m) in &self.terms {
            c[m[var] as usize] += a;
        }
        Some(c)
    }

    /// `Some` when this is `c*(x^u - x^v)` for a nonzero `c`.
    pub fn as_binomial(&self) -> Option<Binomial> {
        match self.terms.as_slice() {
            [(a, u), (b, v)] if (a + b).is_zero() => Some(Binomial::new(u.clone(), v.clone())),
            _ => None,
        }
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (c, m)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if m.is_one() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&m.fmt_with(names));
            } else {
                s.push_str(&format!("{}*{}", a, m.fmt_with(names)));
            }
        }
        s
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.fmt_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn combining_and_sorting() {
        let o = TermOrder::lex(2);
        let p = Polynomial::new(
            2,
            vec![
                (r(1, 1), Monomial::new(vec![0, 1])),
                (r(2, 1), Monomial::new(vec![1, 0])),
                (r(-1, 1), Monomial::new(vec![0, 1])),
            ],
            &o,
        );
        assert_eq!(p.len(), 1);
        assert_eq!(p.lead_coeff(), Some(&r(2, 1)));
    }

    #[test]
    fn product_and_evaluation() {
        let o = TermOrder::grevlex(2);
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let s = x.add(&y, &o);
        let sq = s.mul(&s, &o);
        assert_eq!(sq.len(), 3);
        assert_eq!(sq.eval(&[r(1, 2), r(1, 3)]), r(25, 36));
        assert!((sq.eval_f64(&[0.5, 1.0 / 3.0]) - 25.0 / 36.0).abs() < 1e-12);
    }

    #[test]
    fn printing() {
        let o = TermOrder::lex(2);
        let names = vec!["a".to_string(), "b".to_string()];
        let p = Polynomial::new(
            2,
            vec![(r(-3, 2), Monomial::new(vec![0, 2])), (r(1, 1), Monomial::new(vec![1, 0])), (r(4, 1), Monomial::one(2))],
            &o,
        );
        assert_eq!(p.fmt_with(&names), "a - 3/2*b^2 + 4");
    }
}
