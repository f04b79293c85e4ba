//! Toric ideals `I_A` by lattice-ideal saturation, plus membership and
//! evaluation of binomials.

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{saturated_integer_kernel, Rat};
use crate::model_core::{Distribution, ModelMatrix};
use crate::poly_engine::{binomial_groebner, binomial_groebner_primitive, reduce_binomial, Binomial, Budget, Polynomial, TermOrder};

/// Reduced Gröbner basis of `I_A` under `order`, elements coprime and
/// oriented leading-term first.
#[derive(Clone, Debug, PartialEq)]
pub struct ToricBasis {
    matrix: ModelMatrix,
    binomials: Vec<Binomial>,
    order: TermOrder,
}

impl ToricBasis {
    /// Wraps binomials read back from storage after checking `A u = A v`.
    pub fn from_parts(matrix: ModelMatrix, binomials: Vec<Binomial>, order: TermOrder) -> Result<Self> {
        for b in &binomials {
            check_kernel(&matrix, b)?;
        }
        Ok(ToricBasis { matrix, binomials, order })
    }

    pub fn matrix(&self) -> &ModelMatrix {
        &self.matrix
    }

    pub fn binomials(&self) -> &[Binomial] {
        &self.binomials
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.binomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.binomials.is_empty()
    }

    pub fn polynomials(&self) -> Vec<Polynomial> {
        self.binomials.iter().map(|b| Polynomial::from_binomial(b, &self.order)).collect()
    }

    pub fn texts(&self) -> Vec<String> {
        let names = self.matrix.var_names();
        self.binomials.iter().map(|b| b.text(&names)).collect()
    }
}

fn check_kernel(a: &ModelMatrix, b: &Binomial) -> Result<()> {
    if b.nvars() != a.m() {
        return Err(Error::DimensionMismatch { expected: a.m(), found: b.nvars() });
    }
    if !a.same_image(b.u(), b.v()) {
        return Err(Error::NotInKernel(b.text(&a.var_names())));
    }
    Ok(())
}

/// Binomials `p^{w+} - p^{w-}` for a lattice basis `w` of `ker_Z(A)`.
pub fn lattice_binomials(a: &ModelMatrix) -> Vec<Binomial> {
    let k = saturated_integer_kernel(&a.int_matrix());
    k.row_iter()
        .map(|r| {
            let w: Vec<i64> = r.iter().map(|x| x.to_i64().expect("kernel entry exceeds i64")).collect();
            Binomial::from_difference(&w)
        })
        .collect()
}

pub fn compute_toric_basis(a: &ModelMatrix, order: &TermOrder, seed: Option<&[Binomial]>) -> Result<ToricBasis> {
    compute_toric_basis_with(a, order, seed, Budget::from_env())
}

pub fn compute_toric_basis_with(
    a: &ModelMatrix,
    order: &TermOrder,
    seed: Option<&[Binomial]>,
    budget: Budget,
) -> Result<ToricBasis> {
    let m = a.m();
    if order.nvars() != m {
        return Err(Error::DimensionMismatch { expected: m, found: order.nvars() });
    }
    let mut gens = lattice_binomials(a);
    for b in seed.unwrap_or(&[]) {
        check_kernel(a, b)?;
        gens.push(b.clone());
    }
    gens = canonical_set(gens, order);
    // Saturating one variable at a time, each on a Gröbner basis that has
    // that variable cheapest, reaches `J : (p_1...p_m)^∞ = I_A` after one
    // pass. Intermediate ideals stay between `J` and `I_A`.
    for i in 0..m {
        let g = binomial_groebner_primitive(&gens, &TermOrder::cheapest(m, i), budget)?;
        let divided = g.into_iter().map(|b| {
            let k = b.u()[i].min(b.v()[i]);
            if k == 0 {
                return b;
            }
            let mut u = b.u().exponents().to_vec();
            let mut v = b.v().exponents().to_vec();
            u[i] -= k;
            v[i] -= k;
            Binomial::from_exponents(u, v)
        });
        gens = canonical_set(divided.collect(), order);
    }
    let binomials = binomial_groebner(&gens, order, budget)?;
    for b in &binomials {
        assert!(a.same_image(b.u(), b.v()), "toric basis element outside the kernel");
        assert!(b.is_coprime(), "toric basis element is not primitive");
    }
    Ok(ToricBasis { matrix: a.clone(), binomials, order: order.clone() })
}

fn canonical_set(gens: Vec<Binomial>, order: &TermOrder) -> Vec<Binomial> {
    let mut out: Vec<Binomial> =
        gens.iter().map(|b| b.canonical(order)).filter(|b| !b.is_zero()).collect();
    out.sort();
    out.dedup();
    out
}

/// Membership of `p^u - p^v` in `I_A`, decided both by reduction modulo the
/// basis and by the kernel test `A u = A v`.
pub fn binomial_in_ideal(b: &Binomial, basis: &ToricBasis) -> bool {
    let by_reduction = reduce_binomial(b, &basis.binomials, &basis.order).is_none();
    let by_kernel = basis.matrix.same_image(b.u(), b.v());
    assert_eq!(by_reduction, by_kernel, "reduction and kernel membership disagree for {:?}", b);
    by_reduction
}

/// `P^u - P^v` exactly.
pub fn evaluate_binomial(b: &Binomial, p: &Distribution) -> Rat {
    assert_eq!(b.nvars(), p.len(), "binomial and distribution lengths differ");
    let side = |e: &[u32]| {
        e.iter()
            .zip(p.values())
            .filter(|(&k, _)| k > 0)
            .fold(Rat::one(), |acc, (&k, x)| acc * num_traits::pow(x.clone(), k as usize))
    };
    side(b.u()) - side(b.v())
}

/// `(P^u - P^v, max(P^u, P^v))` in floating point.
pub fn evaluate_binomial_f64(b: &Binomial, p: &[f64]) -> (f64, f64) {
    assert_eq!(b.nvars(), p.len(), "binomial and distribution lengths differ");
    let side = |e: &[u32]| {
        e.iter().zip(p).filter(|(&k, _)| k > 0).map(|(&k, x)| x.powi(k as i32)).product::<f64>()
    };
    let (l, r) = (side(b.u()), side(b.v()));
    (l - r, l.abs().max(r.abs()))
}

/// Whether every element has degree 2 on both sides.
pub fn is_quadratic_basis(basis: &ToricBasis) -> bool {
    basis.binomials.iter().all(|b| b.u().degree() == 2 && b.v().degree() == 2)
}

/// Whether `P` is a common zero of the basis. Returns the index of the first
/// binomial that does not vanish.
pub fn first_nonvanishing(basis: &ToricBasis, p: &Distribution) -> Option<usize> {
    basis.binomials.iter().position(|b| !evaluate_binomial(b, p).is_zero())
}
