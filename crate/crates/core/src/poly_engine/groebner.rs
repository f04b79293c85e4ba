use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use super::{Binomial, Monomial, Polynomial, TermOrder};
use crate::error::{Error, Result};

pub const DEFAULT_PAIR_BUDGET: usize = 1_000_000;

/// Upper bound on the number of S-pairs reduced in one Buchberger run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_pairs: usize,
}

impl Budget {
    pub fn new(max_pairs: usize) -> Self {
        Budget { max_pairs }
    }

    /// `TORICGM_BUDGET` when set to a positive integer, the default otherwise.
    pub fn from_env() -> Self {
        let max_pairs = std::env::var("TORICGM_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&b| b > 0)
            .unwrap_or(DEFAULT_PAIR_BUDGET);
        Budget { max_pairs }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::from_env()
    }
}

/// Basis element as seen by the pair machinery.
trait Element: Clone {
    fn lead(&self) -> &Monomial;
    fn s_pair(&self, other: &Self, order: &TermOrder) -> Self;
    fn reduce_by(&self, basis: &[&Self], order: &TermOrder) -> Option<Self>;
}

struct Pairs {
    heap: BinaryHeap<Reverse<(Vec<i64>, usize, usize)>>,
    live: HashMap<(usize, usize), Monomial>,
}

impl Pairs {
    fn insert(&mut self, i: usize, j: usize, lcm: Monomial, order: &TermOrder) {
        self.heap.push(Reverse((order.sort_key(&lcm), i, j)));
        self.live.insert((i, j), lcm);
    }

    fn pop(&mut self) -> Option<(usize, usize)> {
        while let Some(Reverse((_, i, j))) = self.heap.pop() {
            if self.live.remove(&(i, j)).is_some() {
                return Some((i, j));
            }
        }
        None
    }
}

/// Gebauer–Möller installation of element `t` into the pair set.
fn update(leads: &[Monomial], active: &mut [bool], pairs: &mut Pairs, t: usize, order: &TermOrder) {
    let lt = &leads[t];
    let mut cand: Vec<(usize, Monomial)> =
        (0..t).filter(|&i| active[i]).map(|i| (i, leads[i].lcm(lt))).collect();
    let mut keep: Vec<(usize, Monomial)> = Vec::new();
    while let Some((i, l)) = cand.pop() {
        let coprime = leads[i].is_coprime(lt);
        let dominated = cand.iter().chain(keep.iter()).any(|(_, l2)| l2.divides(&l));
        if coprime || !dominated {
            keep.push((i, l));
        }
    }
    // chain criterion on old pairs
    let doomed: Vec<(usize, usize)> = pairs
        .live
        .iter()
        .filter(|(&(i, j), l)| {
            lt.divides(l) && leads[i].lcm(lt) != **l && leads[j].lcm(lt) != **l
        })
        .map(|(&k, _)| k)
        .collect();
    for k in doomed {
        pairs.live.remove(&k);
    }
    // product criterion on new pairs
    for (i, l) in keep {
        if !leads[i].is_coprime(lt) {
            pairs.insert(i, t, l, order);
        }
    }
    for i in 0..t {
        if active[i] && lt.divides(&leads[i]) {
            active[i] = false;
        }
    }
    active[t] = true;
}

/// Returns every element added (a Gröbner basis, not yet reduced).
fn buchberger_core<E: Element>(input: Vec<E>, order: &TermOrder, budget: Budget) -> Result<Vec<E>> {
    let mut basis: Vec<E> = Vec::new();
    let mut leads: Vec<Monomial> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs = Pairs { heap: BinaryHeap::new(), live: HashMap::new() };
    let add = |e: E, basis: &mut Vec<E>, leads: &mut Vec<Monomial>, active: &mut Vec<bool>, pairs: &mut Pairs| {
        leads.push(e.lead().clone());
        basis.push(e);
        active.push(false);
        update(leads, active, pairs, basis.len() - 1, order);
    };
    for e in input {
        let reducers: Vec<&E> = basis.iter().zip(&active).filter(|(_, &a)| a).map(|(b, _)| b).collect();
        if let Some(r) = e.reduce_by(&reducers, order) {
            add(r, &mut basis, &mut leads, &mut active, &mut pairs);
        }
    }
    let mut processed = 0usize;
    while let Some((i, j)) = pairs.pop() {
        processed += 1;
        if processed > budget.max_pairs {
            return Err(Error::BudgetExceeded { budget: budget.max_pairs });
        }
        let s = basis[i].s_pair(&basis[j], order);
        let reducers: Vec<&E> = basis.iter().zip(&active).filter(|(_, &a)| a).map(|(b, _)| b).collect();
        if let Some(h) = s.reduce_by(&reducers, order) {
            add(h, &mut basis, &mut leads, &mut active, &mut pairs);
        }
    }
    Ok(basis.into_iter().zip(active).filter(|(_, a)| *a).map(|(b, _)| b).collect())
}

/// Keeps elements whose lead is not divisible by another lead (first
/// occurrence wins on equal leads).
fn minimalize<E: Element>(mut g: Vec<E>, order: &TermOrder) -> Vec<E> {
    g.sort_by(|a, b| order.cmp(a.lead(), b.lead()));
    let mut out: Vec<E> = Vec::new();
    for e in g {
        if !out.iter().any(|o| o.lead().divides(e.lead())) {
            out.push(e);
        }
    }
    out
}

// ---------------------------------------------------------------- general

impl Element for Polynomial {
    fn lead(&self) -> &Monomial {
        self.lead_monomial().expect("basis elements are nonzero")
    }

    fn s_pair(&self, other: &Self, order: &TermOrder) -> Self {
        s_polynomial(self, other, order)
    }

    fn reduce_by(&self, basis: &[&Self], order: &TermOrder) -> Option<Self> {
        let r = normal_form(self, basis, order);
        if r.is_zero() {
            None
        } else {
            Some(r.monic())
        }
    }
}

pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: &TermOrder) -> Polynomial {
    let (cf, mf) = f.lead().expect("nonzero");
    let (cg, mg) = g.lead().expect("nonzero");
    let l = mf.lcm(mg);
    let a = f.mul_term(&cf.recip(), &l.checked_div(mf).unwrap());
    let b = g.mul_term(&cg.recip(), &l.checked_div(mg).unwrap());
    a.sub(&b, order)
}

fn normal_form(f: &Polynomial, basis: &[&Polynomial], order: &TermOrder) -> Polynomial {
    let n = f.nvars();
    let masks: Vec<u64> = basis.iter().map(|g| Element::lead(*g).support_mask()).collect();
    let mut p = f.clone();
    let mut rem: Vec<(crate::exact_arith::Rat, Monomial)> = Vec::new();
    while let Some((c, m)) = p.lead().cloned() {
        let mm = m.support_mask();
        let hit = basis
            .iter()
            .zip(&masks)
            .find(|(g, &gm)| gm & !mm == 0 && Element::lead(**g).divides(&m))
            .map(|(g, _)| *g);
        match hit {
            Some(g) => {
                let (cg, mg) = g.lead().unwrap();
                let q = m.checked_div(mg).unwrap();
                p = p.sub(&g.mul_term(&(&c / cg), &q), order);
            }
            None => {
                rem.push((c.clone(), m.clone()));
                p = p.sub(&Polynomial::monomial(c, m), order);
            }
        }
    }
    Polynomial::new(n, rem, order)
}

/// Normal form of `f` modulo `g`; reducers are tried in list order.
pub fn reduce(f: &Polynomial, g: &[Polynomial], order: &TermOrder) -> Polynomial {
    let f = f.reorder(order);
    let g: Vec<Polynomial> = g.iter().filter(|p| !p.is_zero()).map(|p| p.reorder(order)).collect();
    let refs: Vec<&Polynomial> = g.iter().collect();
    normal_form(&f, &refs, order)
}

/// Reduced form of a Gröbner basis: minimal, monic, tails fully reduced,
/// sorted by ascending leading monomial.
pub fn interreduce(g: &[Polynomial], order: &TermOrder) -> Vec<Polynomial> {
    let g: Vec<Polynomial> =
        g.iter().filter(|p| !p.is_zero()).map(|p| p.reorder(order).monic()).collect();
    let min = minimalize(g, order);
    let mut out = Vec::with_capacity(min.len());
    for (k, p) in min.iter().enumerate() {
        let others: Vec<&Polynomial> = min.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, q)| q).collect();
        let (c, m) = p.lead().unwrap().clone();
        let tail = p.sub(&Polynomial::monomial(c.clone(), m.clone()), order);
        let tail = normal_form(&tail, &others, order);
        out.push(Polynomial::monomial(c, m).add(&tail, order));
    }
    out
}

/// Reduced Gröbner basis under `order` with the budget from the environment.
pub fn buchberger(f: &[Polynomial], order: &TermOrder) -> Result<Vec<Polynomial>> {
    buchberger_with(f, order, Budget::from_env())
}

/// Reduced Gröbner basis. Inputs that are all pure difference binomials go
/// through the binomial engine.
pub fn buchberger_with(f: &[Polynomial], order: &TermOrder, budget: Budget) -> Result<Vec<Polynomial>> {
    let f: Vec<Polynomial> = f.iter().filter(|p| !p.is_zero()).map(|p| p.reorder(order)).collect();
    if !f.is_empty() {
        if let Some(bins) = f.iter().map(|p| p.as_binomial()).collect::<Option<Vec<_>>>() {
            let g = binomial_groebner(&bins, order, budget)?;
            return Ok(g.iter().map(|b| Polynomial::from_binomial(b, order)).collect());
        }
    }
    let mut input = f;
    // deterministic input order, independent of how the caller listed F
    input.sort_by(|a, b| cmp_poly(a, b, order));
    input.dedup();
    let g = buchberger_core(input, order, budget)?;
    Ok(interreduce(&g, order))
}

fn cmp_poly(a: &Polynomial, b: &Polynomial, order: &TermOrder) -> Ordering {
    for (x, y) in a.terms().iter().zip(b.terms()) {
        let o = order.cmp(&x.1, &y.1).then_with(|| x.0.cmp(&y.0));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Whether two generating sets define the same ideal.
pub fn ideal_equal(f: &[Polynomial], g: &[Polynomial], order: &TermOrder) -> Result<bool> {
    let gf = buchberger(f, order)?;
    let gg = buchberger(g, order)?;
    Ok(f.iter().all(|p| reduce(p, &gg, order).is_zero()) && g.iter().all(|p| reduce(p, &gf, order).is_zero()))
}

/// Sorts a lex basis so that each element brings in at most one variable
/// not seen earlier, the univariate element first.
pub fn eliminate_to_triangular(g: &[Polynomial], priority: &[usize]) -> Result<Vec<Polynomial>> {
    let order = TermOrder::with_priority(super::OrderKind::Lex, priority.to_vec());
    let mut basis = interreduce(g, &order);
    basis.sort_by(|a, b| order.cmp(Element::lead(a), Element::lead(b)));
    let n = order.nvars();
    let rank: Vec<usize> = {
        let mut r = vec![0; n];
        for (k, &v) in priority.iter().enumerate() {
            r[v] = k;
        }
        r
    };
    let mut seen = vec![false; n];
    for p in &basis {
        let fresh: Vec<usize> = p.variables().into_iter().filter(|&v| !seen[v]).collect();
        if fresh.len() > 1 {
            return Err(Error::NotTriangular(format!(
                "element with leading monomial {:?} introduces {} new variables",
                Element::lead(p),
                fresh.len()
            )));
        }
        if let Some(&v) = fresh.first() {
            // a new variable must be the highest-priority one in the element
            if p.variables().iter().any(|&w| rank[w] < rank[v]) {
                return Err(Error::NotTriangular("new variable is not the leading one".into()));
            }
            seen[v] = true;
        }
    }
    Ok(basis)
}

// ---------------------------------------------------------------- binomial

/// `head - tail` with `head > tail` under the running order.
#[derive(Clone)]
struct Oriented {
    head: Monomial,
    tail: Monomial,
    mask: u64,
}

impl Oriented {
    fn new(b: &Binomial, order: &TermOrder) -> Option<Self> {
        let (h, t) = match order.cmp(b.u(), b.v()) {
            Ordering::Equal => return None,
            Ordering::Greater => (b.u().clone(), b.v().clone()),
            Ordering::Less => (b.v().clone(), b.u().clone()),
        };
        let mask = h.support_mask();
        Some(Oriented { head: h, tail: t, mask })
    }

    fn from_pair(a: Monomial, b: Monomial, order: &TermOrder) -> Option<Self> {
        Self::new(&Binomial::new(a, b), order)
    }

    fn to_binomial(&self) -> Binomial {
        Binomial::new(self.head.clone(), self.tail.clone())
    }
}

/// Replaces `m` by `m / head * tail` for the first reducer whose head divides it.
fn step(m: &Monomial, basis: &[&Oriented]) -> Option<Monomial> {
    let mm = m.support_mask();
    basis
        .iter()
        .find(|g| g.mask & !mm == 0 && g.head.divides(m))
        .map(|g| m.checked_div(&g.head).unwrap().mul(&g.tail))
}

fn reduce_oriented(mut head: Monomial, mut tail: Monomial, basis: &[&Oriented], order: &TermOrder) -> Option<Oriented> {
    loop {
        if let Some(h) = step(&head, basis) {
            head = h;
            match order.cmp(&head, &tail) {
                Ordering::Equal => return None,
                Ordering::Less => std::mem::swap(&mut head, &mut tail),
                Ordering::Greater => {}
            }
            continue;
        }
        break;
    }
    while let Some(t) = step(&tail, basis) {
        tail = t;
    }
    let mask = head.support_mask();
    Some(Oriented { head, tail, mask })
}

impl Element for Oriented {
    fn lead(&self) -> &Monomial {
        &self.head
    }

    fn s_pair(&self, other: &Self, order: &TermOrder) -> Self {
        let l = self.head.lcm(&other.head);
        let a = l.checked_div(&self.head).unwrap().mul(&self.tail);
        let b = l.checked_div(&other.head).unwrap().mul(&other.tail);
        match Oriented::from_pair(a.clone(), b, order) {
            Some(o) => o,
            None => Oriented { head: a.clone(), tail: a, mask: 0 },
        }
    }

    fn reduce_by(&self, basis: &[&Self], order: &TermOrder) -> Option<Self> {
        if self.head == self.tail {
            return None;
        }
        reduce_oriented(self.head.clone(), self.tail.clone(), basis, order)
    }
}

/// Oriented binomial whose reductions are divided by the common factor of
/// head and tail. Buchberger over these returns a Gröbner basis of an ideal
/// between the input ideal and its saturation by the product of all
/// variables.
#[derive(Clone)]
struct Primitive(Oriented);

impl Element for Primitive {
    fn lead(&self) -> &Monomial {
        &self.0.head
    }

    fn s_pair(&self, other: &Self, order: &TermOrder) -> Self {
        Primitive(self.0.s_pair(&other.0, order))
    }

    fn reduce_by(&self, basis: &[&Self], order: &TermOrder) -> Option<Self> {
        let inner: Vec<&Oriented> = basis.iter().map(|p| &p.0).collect();
        let mut cur = self.0.reduce_by(&inner, order)?;
        loop {
            let g = cur.head.gcd(&cur.tail);
            if g.is_one() {
                return Some(Primitive(cur));
            }
            let h = cur.head.checked_div(&g).unwrap();
            let t = cur.tail.checked_div(&g).unwrap();
            cur = reduce_oriented(h, t, &inner, order)?;
        }
    }
}

fn sorted_input(f: &[Binomial], order: &TermOrder) -> Vec<Oriented> {
    let mut input: Vec<Oriented> = f.iter().filter_map(|b| Oriented::new(b, order)).collect();
    input.sort_by(|a, b| order.cmp(&a.head, &b.head).then_with(|| order.cmp(&a.tail, &b.tail)));
    input.dedup_by(|a, b| a.head == b.head && a.tail == b.tail);
    input
}

/// Reduced Gröbner basis of a binomial ideal, each element oriented with
/// `u` the leading monomial, sorted by ascending leading monomial.
pub fn binomial_groebner(f: &[Binomial], order: &TermOrder, budget: Budget) -> Result<Vec<Binomial>> {
    let g = buchberger_core(sorted_input(f, order), order, budget)?;
    Ok(fully_reduce(g, order))
}

/// Like [`binomial_groebner`], but every new element is made primitive, so
/// the result generates some ideal `J'` with `<f> ⊆ J' ⊆ <f> : (p_1...p_m)^∞`.
pub(crate) fn binomial_groebner_primitive(f: &[Binomial], order: &TermOrder, budget: Budget) -> Result<Vec<Binomial>> {
    let input = sorted_input(f, order).into_iter().map(Primitive).collect();
    let g = buchberger_core(input, order, budget)?;
    Ok(fully_reduce(g.into_iter().map(|p| p.0).collect(), order))
}

fn fully_reduce(g: Vec<Oriented>, order: &TermOrder) -> Vec<Binomial> {
    let min = minimalize(g, order);
    let mut out = Vec::with_capacity(min.len());
    for (k, e) in min.iter().enumerate() {
        let others: Vec<&Oriented> = min.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, q)| q).collect();
        let mut tail = e.tail.clone();
        while let Some(t) = step(&tail, &others) {
            tail = t;
        }
        out.push(Binomial::new(e.head.clone(), tail));
    }
    out
}

/// Normal form of a binomial modulo binomials; `None` when it reduces to 0.
pub fn reduce_binomial(b: &Binomial, basis: &[Binomial], order: &TermOrder) -> Option<Binomial> {
    let g: Vec<Oriented> = basis.iter().filter_map(|x| Oriented::new(x, order)).collect();
    let refs: Vec<&Oriented> = g.iter().collect();
    let o = Oriented::new(b, order)?;
    reduce_oriented(o.head, o.tail, &refs, order).map(|o| o.to_binomial())
}
