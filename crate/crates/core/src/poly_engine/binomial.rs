use std::cmp::Ordering;

use super::{Monomial, TermOrder};

/// The pure difference binomial `p^u - p^v`.
///
/// Values built by explicit constructions keep the orientation they were
/// built with; [`Binomial::canonical`] gives the coprime form with `u` the
/// larger monomial under an order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Binomial {
    u: Monomial,
    v: Monomial,
}

impl Binomial {
    /// Panics if the exponent vectors have different lengths.
    pub fn new(u: Monomial, v: Monomial) -> Self {
        assert_eq!(u.nvars(), v.nvars(), "binomial sides have different lengths");
        Binomial { u, v }
    }

    pub fn from_exponents(u: Vec<u32>, v: Vec<u32>) -> Self {
        Self::new(Monomial::new(u), Monomial::new(v))
    }

    /// The binomial `p^{w+} - p^{w-}` of an integer vector.
    pub fn from_difference(w: &[i64]) -> Self {
        let u = w.iter().map(|&x| x.max(0) as u32).collect();
        let v = w.iter().map(|&x| (-x).max(0) as u32).collect();
        Self::from_exponents(u, v)
    }

    pub fn u(&self) -> &Monomial {
        &self.u
    }

    pub fn v(&self) -> &Monomial {
        &self.v
    }

    pub fn nvars(&self) -> usize {
        self.u.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.u == self.v
    }

    pub fn degree(&self) -> u64 {
        self.u.degree().max(self.v.degree())
    }

    /// Whether both sides have the same total degree.
    pub fn is_homogeneous(&self) -> bool {
        self.u.degree() == self.v.degree()
    }

    pub fn is_coprime(&self) -> bool {
        self.u.is_coprime(&self.v)
    }

    /// `u - v` as an integer vector.
    pub fn difference(&self) -> Vec<i64> {
        self.u.iter().zip(self.v.iter()).map(|(&a, &b)| a as i64 - b as i64).collect()
    }

    pub fn swapped(&self) -> Self {
        Binomial { u: self.v.clone(), v: self.u.clone() }
    }

    /// Same binomial up to sign, with `u` the larger side.
    pub fn oriented(&self, order: &TermOrder) -> Self {
        match order.cmp(&self.u, &self.v) {
            Ordering::Less => self.swapped(),
            _ => self.clone(),
        }
    }

    /// Removes the common monomial factor of the two sides.
    pub fn primitive(&self) -> Self {
        let g = self.u.gcd(&self.v);
        Binomial { u: self.u.checked_div(&g).unwrap(), v: self.v.checked_div(&g).unwrap() }
    }

    /// Coprime and oriented.
    pub fn canonical(&self, order: &TermOrder) -> Self {
        self.primitive().oriented(order)
    }

    /// Equal as ideal generators, that is, up to sign.
    pub fn same_up_to_sign(&self, other: &Binomial) -> bool {
        self == other || (self.u == other.v && self.v == other.u)
    }

    pub fn text(&self, names: &[String]) -> String {
        format!("{} - {}", self.u.fmt_with(names), self.v.fmt_with(names))
    }
}
